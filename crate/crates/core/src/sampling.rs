//! Seeded random sampling: independent per-task streams, Haar-random
//! states, random mixed states and simplex points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::hilbert::{ComplexMatrix, DensityOperator, PureState, C64};

pub type StreamRng = ChaCha8Rng;

/// Stream `index` derived from a master seed. Streams are independent of
/// how many others are drawn or in which order they are consumed.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector of the given dimension.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn haar_pure_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let dim = dims.iter().product();
    PureState::new(haar_vector(dim, rng), dims.to_vec()).expect("normalized by construction")
}

/// Hilbert-Schmidt random mixed state (`G G^dag / Tr`, `G` Ginibre).
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityOperator {
    let d: usize = dims.iter().product();
    let g = ComplexMatrix::new(d, d, (0..d * d).map(|_| gaussian_complex(rng)).collect()).expect("square");
    let m = g.matmul(&g.adjoint()).expect("square");
    let tr = m.trace().re;
    let mut m = m.scale(1.0 / tr);
    // symmetrize away rounding asymmetry
    m = m.add(&m.adjoint()).expect("same shape").scale(0.5);
    DensityOperator::new(m, dims.to_vec()).expect("positive by construction")
}

/// Random traceless Hermitian matrix with unit max-entry scale.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::new(dim, dim, (0..dim * dim).map(|_| gaussian_complex(rng)).collect()).expect("square");
    let h = g.add(&g.adjoint()).expect("same shape").scale(0.5);
    let shift = h.trace().re / dim as f64;
    h.sub(&ComplexMatrix::identity(dim).scale(shift)).expect("same shape")
}

/// Symmetric Dirichlet(1) sample, i.e. uniform on the simplex.
pub fn uniform_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / s).collect()
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    rand_distr::Uniform::new(lo, hi).expect("lo < hi").sample(rng)
}
