//! Quantum channels as Kraus lists, plus constructors for the multiple-access
//! channels studied here.
//!
//! Each input factor of a channel is labelled with the sender that controls
//! it (`0` = first sender, `1` = second, ...). For tensor products of
//! channels the factors are listed copy by copy, and inside each copy in
//! sender order, e.g. `Phi (x) Psi` has inputs `(A, B, A', B')` with senders
//! `[0, 1, 0, 1]`. [`crate::hilbert::permute_systems`] is the only place
//! factors are reordered.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::hilbert::{
    self, basis_projector, pauli, tensor, tensor_all, ComplexMatrix, DensityOperator, HilbertError, PureState, C64,
};

/// Tolerance on `sum K^dag K = I`.
pub const CPTP_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("no Kraus operators")]
    Empty,
    #[error("Kraus operator {index} is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    KrausShape { index: usize, rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error("not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("dimension mismatch: channel expects {expected:?}, got {got:?}")]
    DimensionMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("sender labels {labels:?} do not match {factors} input factors")]
    BadSenders { labels: Vec<usize>, factors: usize },
    #[error("invalid subsystem targets {0:?}")]
    BadTargets(Vec<usize>),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// A probability in `[0, 1]`: depolarizing strength of `phi_p`, branch
/// probability of `gamma_p`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NoiseParameter(f64);

impl NoiseParameter {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(ChannelError::InvalidProbability(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NoiseParameter {
    type Error = ChannelError;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

/// Completely positive trace-preserving map `rho -> sum_k K_k rho K_k^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
    senders: Vec<usize>,
}

impl KrausChannel {
    /// Validates shapes and trace preservation. All input factors are
    /// attributed to sender 0; see [`KrausChannel::with_senders`].
    pub fn new(kraus: Vec<ComplexMatrix>, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(ChannelError::Empty);
        }
        let d_in: usize = in_dims.iter().product();
        let d_out: usize = out_dims.iter().product();
        if in_dims.is_empty() || out_dims.is_empty() || d_in == 0 || d_out == 0 {
            return Err(ChannelError::DimensionMismatch { expected: in_dims, got: out_dims });
        }
        for (index, k) in kraus.iter().enumerate() {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(ChannelError::KrausShape {
                    index,
                    rows: k.rows(),
                    cols: k.cols(),
                    expected_rows: d_out,
                    expected_cols: d_in,
                });
            }
        }
        let senders = vec![0; in_dims.len()];
        let ch = Self { kraus, in_dims, out_dims, senders };
        let dev = ch.tp_deviation();
        if dev > CPTP_TOL {
            return Err(ChannelError::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    /// Relabels which sender controls each input factor.
    pub fn with_senders(mut self, senders: Vec<usize>) -> Result<Self> {
        if senders.len() != self.in_dims.len() {
            return Err(ChannelError::BadSenders { labels: senders, factors: self.in_dims.len() });
        }
        self.senders = senders;
        Ok(self)
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn in_dim(&self) -> usize {
        self.in_dims.iter().product()
    }

    pub fn out_dim(&self) -> usize {
        self.out_dims.iter().product()
    }

    pub fn senders(&self) -> &[usize] {
        &self.senders
    }

    /// `max |sum K^dag K - I|`.
    pub fn tp_deviation(&self) -> f64 {
        let d = self.in_dim();
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for k in &self.kraus {
            acc += k.as_nalgebra().adjoint() * k.as_nalgebra();
        }
        ComplexMatrix::from_nalgebra(acc).max_abs_diff(&ComplexMatrix::identity(d))
    }

    /// Applies the map to an arbitrary square matrix of input dimension
    /// (the map is linear, so traceless directions are fine).
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.in_dim() || m.cols() != self.in_dim() {
            return Err(ChannelError::DimensionMismatch { expected: self.in_dims.clone(), got: vec![m.rows()] });
        }
        let d = self.out_dim();
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for k in &self.kraus {
            let k = k.as_nalgebra();
            acc += k * m.as_nalgebra() * k.adjoint();
        }
        Ok(ComplexMatrix::from_nalgebra(acc))
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dims() != self.in_dims.as_slice() {
            return Err(ChannelError::DimensionMismatch { expected: self.in_dims.clone(), got: rho.dims().to_vec() });
        }
        let out = self.apply_matrix(rho.matrix())?;
        Ok(DensityOperator::from_trusted(out, self.out_dims.clone()))
    }

    /// Output for a pure input, `sum_k |K_k psi><K_k psi|`.
    pub fn apply_pure(&self, psi: &PureState) -> Result<DensityOperator> {
        if psi.dims() != self.in_dims.as_slice() {
            return Err(ChannelError::DimensionMismatch { expected: self.in_dims.clone(), got: psi.dims().to_vec() });
        }
        let d = self.out_dim();
        let amps = psi.amplitudes();
        let zero = C64::new(0.0, 0.0);
        let mut acc = DMatrix::<C64>::zeros(d, d);
        let mut image = vec![zero; d];
        for k in &self.kraus {
            // column-major storage: column j is k[j*d..(j+1)*d]
            image.fill(zero);
            for (column, a) in k.as_nalgebra().as_slice().chunks_exact(d).zip(amps) {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for (slot, kij) in image.iter_mut().zip(column) {
                    *slot += kij * a;
                }
            }
            for (column, ic) in acc.as_mut_slice().chunks_exact_mut(d).zip(&image) {
                let conj = ic.conj();
                for (slot, ir) in column.iter_mut().zip(&image) {
                    *slot += ir * conj;
                }
            }
        }
        Ok(DensityOperator::from_trusted(ComplexMatrix::from_nalgebra(acc), self.out_dims.clone()))
    }

    /// Applies the channel to the factors `targets` of a larger state and the
    /// identity elsewhere. Output factor `k` replaces input factor
    /// `targets[k]`, so the channel must keep its factor count.
    pub fn apply_to_subsystems(&self, rho: &DensityOperator, targets: &[usize]) -> Result<DensityOperator> {
        let dims = rho.dims();
        let n = dims.len();
        let mut seen = vec![false; n];
        if targets.len() != self.in_dims.len() || self.out_dims.len() != self.in_dims.len() {
            return Err(ChannelError::BadTargets(targets.to_vec()));
        }
        for (&t, &expected) in targets.iter().zip(&self.in_dims) {
            if t >= n || seen[t] || dims[t] != expected {
                return Err(ChannelError::BadTargets(targets.to_vec()));
            }
            seen[t] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|k| !seen[*k]).collect();
        let front: Vec<usize> = targets.iter().chain(rest.iter()).copied().collect();
        let moved = hilbert::permute_systems(rho, &front)?;

        let r: usize = rest.iter().map(|&k| dims[k]).product();
        let (d_in, d_out) = (self.in_dim(), self.out_dim());
        let src = moved.matrix().as_nalgebra();
        let mut out = DMatrix::<C64>::zeros(d_out * r, d_out * r);
        let mut left = DMatrix::<C64>::zeros(d_out * r, d_in * r);
        for k in &self.kraus {
            let k = k.as_nalgebra();
            // left = (K (x) I_r) rho
            left.fill(C64::new(0.0, 0.0));
            for a in 0..d_out {
                for b in 0..d_in {
                    let kab = k[(a, b)];
                    if kab.norm_sqr() == 0.0 {
                        continue;
                    }
                    for s in 0..r {
                        for col in 0..d_in * r {
                            left[(a * r + s, col)] += kab * src[(b * r + s, col)];
                        }
                    }
                }
            }
            // out += left (K (x) I_r)^dag
            for e in 0..d_out {
                for c in 0..d_in {
                    let kec = k[(e, c)].conj();
                    if kec.norm_sqr() == 0.0 {
                        continue;
                    }
                    for t in 0..r {
                        for row in 0..d_out * r {
                            out[(row, e * r + t)] += left[(row, c * r + t)] * kec;
                        }
                    }
                }
            }
        }
        let mut out_dims = self.out_dims.clone();
        out_dims.extend(rest.iter().map(|&k| dims[k]));
        let applied = DensityOperator::from_trusted(ComplexMatrix::from_nalgebra(out), out_dims);
        let mut back = vec![0; n];
        for (pos, &orig) in front.iter().enumerate() {
            back[orig] = pos;
        }
        Ok(hilbert::permute_systems(&applied, &back)?)
    }
}

fn drop_zero_operators(kraus: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    let nonzero: Vec<ComplexMatrix> =
        kraus.iter().filter(|k| k.as_nalgebra().iter().any(|z| z.norm_sqr() > 1e-30)).cloned().collect();
    if nonzero.is_empty() {
        kraus
    } else {
        nonzero
    }
}

/// Kraus set `{K_i (x) L_j}`; dims and sender labels are concatenated.
pub fn tensor_channels(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let kraus = a.kraus.iter().flat_map(|k| b.kraus.iter().map(move |l| tensor(k, l))).collect();
    let cat = |x: &[usize], y: &[usize]| x.iter().chain(y).copied().collect::<Vec<_>>();
    KrausChannel {
        kraus,
        in_dims: cat(&a.in_dims, &b.in_dims),
        out_dims: cat(&a.out_dims, &b.out_dims),
        senders: cat(&a.senders, &b.senders),
    }
}

/// `after o before`. Keeps the sender labels of `before`.
pub fn compose(after: &KrausChannel, before: &KrausChannel) -> Result<KrausChannel> {
    if after.in_dims != before.out_dims {
        return Err(ChannelError::DimensionMismatch { expected: after.in_dims.clone(), got: before.out_dims.clone() });
    }
    let kraus = after
        .kraus
        .iter()
        .flat_map(|k| before.kraus.iter().map(move |l| k.matmul(l).expect("shapes checked")))
        .collect();
    Ok(KrausChannel {
        kraus: drop_zero_operators(kraus),
        in_dims: before.in_dims.clone(),
        out_dims: after.out_dims.clone(),
        senders: before.senders.clone(),
    })
}

pub fn identity(dims: Vec<usize>) -> KrausChannel {
    let d = dims.iter().product();
    KrausChannel {
        kraus: vec![ComplexMatrix::identity(d)],
        senders: vec![0; dims.len()],
        in_dims: dims.clone(),
        out_dims: dims,
    }
}

/// `rho -> U rho U^dag`.
pub fn unitary(u: ComplexMatrix, dims: Vec<usize>) -> Result<KrausChannel> {
    if !u.is_unitary(1e-12) {
        return Err(ChannelError::NotTracePreserving(f64::NAN));
    }
    KrausChannel::new(vec![u], dims.clone(), dims)
}

/// Random mixture of unitaries, Kraus operators `sqrt(w_k) U_k`.
pub fn mixed_unitary(weights: &[f64], unitaries: &[ComplexMatrix], dims: Vec<usize>) -> Result<KrausChannel> {
    hilbert::validate_distribution(weights)?;
    let kraus = weights.iter().zip(unitaries).filter(|(w, _)| **w > 0.0).map(|(w, u)| u.scale(w.sqrt())).collect();
    KrausChannel::new(kraus, dims.clone(), dims)
}

/// Discards every factor not listed in `keep`.
pub fn partial_trace_channel(dims: Vec<usize>, keep: &[usize]) -> Result<KrausChannel> {
    let n = dims.len();
    if keep.iter().any(|&k| k >= n) {
        return Err(ChannelError::BadTargets(keep.to_vec()));
    }
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let kept: Vec<usize> = (0..n).filter(|k| keep.contains(k)).collect();
    let d_keep: usize = kept.iter().map(|&k| dims[k]).product();
    let d_trace: usize = traced.iter().map(|&k| dims[k]).product();
    let d: usize = dims.iter().product();
    let mut kraus = vec![ComplexMatrix::zeros(d_keep, d); d_trace];
    let mut digits = vec![0usize; n];
    for col in 0..d {
        let (mut row, mut t) = (0, 0);
        for &k in &kept {
            row = row * dims[k] + digits[k];
        }
        for &k in &traced {
            t = t * dims[k] + digits[k];
        }
        kraus[t].set(row, col, C64::new(1.0, 0.0));
        for k in (0..n).rev() {
            digits[k] += 1;
            if digits[k] < dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    let out_dims = if kept.is_empty() { vec![1] } else { kept.iter().map(|&k| dims[k]).collect() };
    KrausChannel::new(kraus, dims, out_dims)
}

/// Discrete Weyl operator `X^a Z^b` in dimension `d`.
fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * std::f64::consts::PI * (b * k) as f64 / d as f64;
        m.set((k + a) % d, k, C64::from_polar(1.0, phase));
    }
    m
}

/// Depolarizing channel `rho -> (1 - p) rho + p I/d`.
pub fn depolarizing(d: usize, p: f64) -> Result<KrausChannel> {
    let p = NoiseParameter::new(p)?.value();
    let dd = (d * d) as f64;
    let mut kraus = vec![ComplexMatrix::identity(d).scale((1.0 - p + p / dd).sqrt())];
    if p > 0.0 {
        for a in 0..d {
            for b in 0..d {
                if a + b > 0 {
                    kraus.push(weyl(d, a, b).scale(p.sqrt() / d as f64));
                }
            }
        }
    }
    KrausChannel::new(kraus, vec![d], vec![d])
}

/// `U = sum_i |i><i| (x) sigma_i` on `C^4 (x) C^2`.
pub fn controlled_pauli_unitary() -> ComplexMatrix {
    (0..4)
        .map(|i| tensor(&basis_projector(4, i), &pauli(i)))
        .reduce(|a, b| a.add(&b).expect("8x8"))
        .expect("four terms")
}

/// First sender's four-level input selects a Pauli on the second sender's
/// qubit, then the four-level factor is depolarized with strength `p`:
/// `(D_p (x) id_2) o Ad_U`. The output keeps both factors `C^4 (x) C^2`.
///
/// The circuit picture leaves the depolarizer placement open; this follows the
/// explicit action `(1-p) U(rho)U^dag + p I/4 (x) Tr_A[U rho U^dag]`.
pub fn phi_p(p: f64) -> Result<KrausChannel> {
    let noise = tensor_channels(&depolarizing(4, p)?, &identity(vec![2]));
    let coupling = unitary(controlled_pauli_unitary(), vec![4, 2])?;
    compose(&noise, &coupling)?.with_senders(vec![0, 1])
}

/// Noiseless transmission of one qubit from each of two senders.
pub fn psi_id() -> KrausChannel {
    identity(vec![2, 2]).with_senders(vec![0, 1]).expect("two factors")
}

/// Three-sender channel on `A1 (C^2) (x) B (C^4) (x) A2 (C^2)`. With
/// probability `1 - p` the Pauli selected by `B` hits `A1`, otherwise it hits
/// `A2`; `B` is then discarded. Output `A1 (x) A2`.
pub fn gamma_p(p: f64) -> Result<KrausChannel> {
    let p = NoiseParameter::new(p)?.value();
    let id2 = ComplexMatrix::identity(2);
    let sum = |f: &dyn Fn(usize) -> ComplexMatrix| {
        (0..4).map(f).reduce(|a, b| a.add(&b).expect("16x16")).expect("four terms")
    };
    let up = sum(&|j| tensor_all(&[&pauli(j), &basis_projector(4, j), &id2]));
    let down = sum(&|j| tensor_all(&[&id2, &basis_projector(4, j), &pauli(j)]));
    let branches = mixed_unitary(&[1.0 - p, p], &[up, down], vec![2, 4, 2])?;
    let discard_b = partial_trace_channel(vec![2, 4, 2], &[0, 2])?;
    compose(&discard_b, &branches)?.with_senders(vec![0, 1, 2])
}
