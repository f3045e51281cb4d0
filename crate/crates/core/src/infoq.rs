//! Holevo quantities for quantum multiple-access channels.
//!
//! Covers the three mutual informations that bound a two-sender rate
//! pentagon, the first sender's single-use and two-use Holevo rates for
//! [`phi_p`](crate::channels::phi_p) (closed forms, explicit protocol
//! and a brute-force optimizer), remote dense coding through
//! `phi_p (x) psi_id`, and numerical scans for the two entropy extremality
//! facts behind the single-use optimum.

use serde::Serialize;
use thiserror::Error;

use crate::channels::{self, tensor_channels, ChannelError, KrausChannel};
use crate::hilbert::{
    self, pauli, shannon_entropy, tensor, ComplexMatrix, DensityOperator, HilbertError, PureState, C64,
};
use crate::sampling::{self, haar_pure_state, haar_vector, random_density, stream, uniform_simplex, StreamRng};
use crate::search::{multi_restart, SearchConfig, StepSchedule};

pub use crate::channels::NoiseParameter;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("sender layout mismatch: {0}")]
    SenderLayout(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

pub type Result<T> = std::result::Result<T, InfoError>;

// ---------------------------------------------------------------------------
// Ensembles and Holevo quantities
// ---------------------------------------------------------------------------

/// A sender's code alphabet: probabilities paired with input states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if probs.len() != states.len() || states.is_empty() {
            return Err(InfoError::InvalidEnsemble(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        hilbert::validate_distribution(&probs)?;
        let dims = states[0].dims();
        if states.iter().any(|s| s.dims() != dims) {
            return Err(InfoError::InvalidEnsemble("states have different dims".into()));
        }
        Ok(Self { probs, states })
    }

    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn single(state: DensityOperator) -> Self {
        Self { probs: vec![1.0], states: vec![state] }
    }

    /// Uniform ensemble over the first `count` computational basis states.
    pub fn uniform_basis(dims: &[usize], count: usize) -> Result<Self> {
        Self::uniform((0..count).map(|k| DensityOperator::basis(dims.to_vec(), k)).collect())
    }

    pub fn from_pure(probs: Vec<f64>, states: &[PureState]) -> Result<Self> {
        Self::new(probs, states.iter().map(PureState::density).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dims(&self) -> &[usize] {
        self.states[0].dims()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `S(sum p_k rho_k) - sum p_k S(rho_k)` for states already at the receiver.
pub fn holevo_quantity(probs: &[f64], outputs: &[DensityOperator]) -> Result<f64> {
    let average = DensityOperator::mixture(probs, outputs)?;
    let mut chi = hilbert::von_neumann_entropy(&average)?;
    for (p, s) in probs.iter().zip(outputs) {
        if *p > 0.0 {
            chi -= p * hilbert::von_neumann_entropy(s)?;
        }
    }
    Ok(chi.max(0.0))
}

/// Holevo quantity of `ens` after transmission through `ch`.
pub fn holevo_chi(ch: &KrausChannel, ens: &Ensemble) -> Result<f64> {
    let outputs = ens.states.iter().map(|s| ch.apply(s)).collect::<std::result::Result<Vec<_>, _>>()?;
    holevo_quantity(&ens.probs, &outputs)
}

/// Bounds of the rate pentagon for one pair of input ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacInfoTriple {
    /// `I(A:C|B)`
    pub i_a_c_given_b: f64,
    /// `I(B:C|A)`
    pub i_b_c_given_a: f64,
    /// `I(AB:C)`
    pub i_ab_c: f64,
}

/// Builds the joint input `alice (x) bob` in the channel's factor order.
pub fn joint_input(ch: &KrausChannel, alice: &DensityOperator, bob: &DensityOperator) -> Result<DensityOperator> {
    let senders = ch.senders();
    let dims = ch.in_dims();
    if senders.iter().any(|&s| s > 1) {
        return Err(InfoError::SenderLayout(format!("labels {senders:?} are not two-sender")));
    }
    let expect =
        |who: usize| -> Vec<usize> { senders.iter().zip(dims).filter(|(s, _)| **s == who).map(|(_, d)| *d).collect() };
    for (who, state) in [(0, alice), (1, bob)] {
        let want = expect(who);
        if state.dims() != want.as_slice() {
            return Err(InfoError::SenderLayout(format!(
                "sender {who} has dims {:?}, channel expects {want:?}",
                state.dims()
            )));
        }
    }
    let n_alice = alice.dims().len();
    let (mut next_a, mut next_b) = (0, n_alice);
    let perm: Vec<usize> = senders
        .iter()
        .map(|&s| {
            let slot = if s == 0 { &mut next_a } else { &mut next_b };
            *slot += 1;
            *slot - 1
        })
        .collect();
    Ok(hilbert::permute_systems(&alice.tensor(bob), &perm)?)
}

/// The pentagon bounds for Alice (sender 0) and Bob (sender 1), conditioning
/// explicitly: `I(A:C|B) = sum_j q_j chi({p_i, Phi(rho_i (x) rho_j)})`.
pub fn mac_mutual_informations(ch: &KrausChannel, alice: &Ensemble, bob: &Ensemble) -> Result<MacInfoTriple> {
    let (na, nb) = (alice.len(), bob.len());
    let mut outputs = Vec::with_capacity(na * nb);
    for a in &alice.states {
        for b in &bob.states {
            outputs.push(ch.apply(&joint_input(ch, a, b)?)?);
        }
    }
    let at = |i: usize, j: usize| &outputs[i * nb + j];

    let mut i_a = 0.0;
    for j in 0..nb {
        let column: Vec<DensityOperator> = (0..na).map(|i| at(i, j).clone()).collect();
        i_a += bob.probs[j] * holevo_quantity(&alice.probs, &column)?;
    }
    let mut i_b = 0.0;
    for i in 0..na {
        let row: Vec<DensityOperator> = (0..nb).map(|j| at(i, j).clone()).collect();
        i_b += alice.probs[i] * holevo_quantity(&bob.probs, &row)?;
    }
    let joint: Vec<f64> = alice.probs.iter().flat_map(|p| bob.probs.iter().map(move |q| p * q)).collect();
    let i_ab = holevo_quantity(&joint, &outputs)?;
    Ok(MacInfoTriple { i_a_c_given_b: i_a, i_b_c_given_a: i_b, i_ab_c: i_ab })
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

fn h(p: &[f64]) -> f64 {
    shannon_entropy(p).expect("valid by construction")
}

/// `H(1 - 3p/4, p/4, p/4, p/4)`: minimal output entropy of `phi_p`, reached by
/// every input `|i>|v>`.
pub fn min_output_entropy_bound(p: NoiseParameter) -> f64 {
    let p = p.value();
    h(&[1.0 - 0.75 * p, p / 4.0, p / 4.0, p / 4.0])
}

/// Optimal single-use Holevo rate of the first sender of `phi_p`:
/// `H((2-p)/8 x4, p/8 x4) - H(1-3p/4, p/4, p/4, p/4)`.
pub fn chi1_closed_form(p: NoiseParameter) -> f64 {
    let q = p.value();
    let a = (2.0 - q) / 8.0;
    let b = q / 8.0;
    h(&[a, a, a, a, b, b, b, b]) - min_output_entropy_bound(p)
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Per-use Holevo rate of the two-use protocol (Bob shares `|Phi+>` across
/// both copies, Alice sends independent uniform basis states).
pub fn chi2_prime_closed_form(p: NoiseParameter) -> f64 {
    let p = p.value();
    let off = (2.0 - p) * p;
    let on = 4.0 - 6.0 * p + 3.0 * p * p;
    // eigenvalue off/64 has multiplicity 48, on/64 has multiplicity 16
    let average = -(48.0 * xlog2x(off / 64.0) + 16.0 * xlog2x(on / 64.0));
    average / 2.0 - min_output_entropy_bound(NoiseParameter::new(p).expect("in range"))
}

/// `chi2_prime - chi1`; positive strictly inside `(0, 1)`.
pub fn superadditivity_gap(p: NoiseParameter) -> f64 {
    chi2_prime_closed_form(p) - chi1_closed_form(p)
}

// ---------------------------------------------------------------------------
// Explicit protocols
// ---------------------------------------------------------------------------

/// Factor order of two copies of `phi_p`: `(A1, B1, A2, B2)`.
const TWO_COPY_ORDER: [usize; 4] = [0, 2, 1, 3];

/// The sixteen two-use inputs `e_i (x) e_j (x) |Phi+><Phi+|`, ordered
/// `(A1, B1, A2, B2)`, index `4 i + j`.
pub fn chi2_prime_inputs() -> Vec<DensityOperator> {
    let bell = PureState::bell_phi_plus().density();
    let mut inputs = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            let raw = DensityOperator::basis(vec![4], i).tensor(&DensityOperator::basis(vec![4], j)).tensor(&bell);
            inputs.push(hilbert::permute_systems(&raw, &TWO_COPY_ORDER).expect("valid permutation"));
        }
    }
    inputs
}

/// Receiver states of the two-use protocol, applying `phi_p` copy by copy.
pub fn chi2_prime_outputs(p: NoiseParameter) -> Result<Vec<DensityOperator>> {
    let ch = channels::phi_p(p.value())?;
    chi2_prime_inputs()
        .iter()
        .map(|rho| {
            let first = ch.apply_to_subsystems(rho, &[0, 1])?;
            Ok(ch.apply_to_subsystems(&first, &[2, 3])?)
        })
        .collect()
}

/// Holevo quantity of the sixteen equiprobable two-use outputs, per use.
pub fn chi2_prime_protocol(p: NoiseParameter) -> Result<f64> {
    let outputs = chi2_prime_outputs(p)?;
    Ok(holevo_quantity(&[1.0 / 16.0; 16], &outputs)? / 2.0)
}

/// First sender's rate through `phi_p (x) psi_id` when Bob feeds the halves of
/// `|Phi+>` into both B-inputs and Alice sends uniform `|i>` (her `psi_id`
/// qubit idle in `|0>`).
pub fn remote_dc_rate(p: NoiseParameter) -> Result<f64> {
    let ch = tensor_channels(&channels::phi_p(p.value())?, &channels::psi_id());
    let bell = PureState::bell_phi_plus().density();
    let idle = DensityOperator::basis(vec![2], 0);
    let outputs = (0..4)
        .map(|i| {
            let alice = DensityOperator::basis(vec![4], i).tensor(&idle);
            ch.apply(&joint_input(&ch, &alice, &bell)?).map_err(InfoError::from)
        })
        .collect::<Result<Vec<_>>>()?;
    holevo_quantity(&[0.25; 4], &outputs)
}

/// Holevo quantity of the four Bell states `(sigma_i (x) I)|Phi+>`.
pub fn dense_coding_rate() -> Result<f64> {
    let signals = (0..4)
        .map(|i| {
            let u = tensor(&pauli(i), &ComplexMatrix::identity(2));
            Ok(PureState::bell_phi_plus().evolve(&u)?.density())
        })
        .collect::<Result<Vec<_>>>()?;
    holevo_chi(&channels::identity(vec![2, 2]), &Ensemble::uniform(signals)?)
}

// ---------------------------------------------------------------------------
// Single-use brute force
// ---------------------------------------------------------------------------

const ALICE_STATES: usize = 4;
const PARAMS: usize = ALICE_STATES * 8 + ALICE_STATES + 4;

/// Best single-use ensemble found by [`chi1_bruteforce`].
#[derive(Debug, Clone, PartialEq)]
pub struct Chi1Search {
    pub value: f64,
    pub restart: usize,
    pub alice_probs: Vec<f64>,
    pub alice_states: Vec<PureState>,
    pub bob_state: PureState,
}

fn unit_from(raw: &[f64], dims: Vec<usize>) -> PureState {
    let amps: Vec<C64> = raw.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    PureState::normalized(amps, dims.clone()).unwrap_or_else(|_| PureState::basis(dims, 0))
}

/// Decodes a point of the search space: each block is a point on a sphere
/// after normalization, probabilities are squared coordinates.
fn decode(x: &[f64]) -> (Vec<f64>, Vec<PureState>, PureState) {
    let alice = (0..ALICE_STATES).map(|k| unit_from(&x[8 * k..8 * k + 8], vec![4])).collect();
    let w = &x[32..36];
    let norm: f64 = w.iter().map(|a| a * a).sum();
    let probs = if norm > 0.0 { w.iter().map(|a| a * a / norm).collect() } else { vec![0.25; 4] };
    let bob = unit_from(&x[36..40], vec![2]);
    (probs, alice, bob)
}

fn encode_state(v: &[C64], out: &mut Vec<f64>) {
    for z in v {
        out.push(z.re);
        out.push(z.im);
    }
}

/// Single-use rate `chi({p_i, phi_p(u_i (x) v)})` for pure Alice states `u_i`
/// and a pure Bob state `v`.
pub fn alice_single_use_chi(ch: &KrausChannel, probs: &[f64], alice: &[PureState], bob: &PureState) -> Result<f64> {
    let outputs = alice.iter().map(|u| ch.apply_pure(&u.tensor(bob))).collect::<std::result::Result<Vec<_>, _>>()?;
    holevo_quantity(probs, &outputs)
}

/// Maximizes the first sender's single-use Holevo rate of `phi_p` over
/// ensembles of up to four pure states and pure Bob states. Restart 0 starts
/// at the uniform standard-basis ensemble with `v = |0>`.
pub fn chi1_bruteforce(p: NoiseParameter, cfg: &SearchConfig) -> Result<Chi1Search> {
    if !cfg.is_valid() {
        return Err(InfoError::InvalidConfig(format!("{cfg:?}")));
    }
    let ch = channels::phi_p(p.value())?;
    let objective = |x: &[f64]| {
        let (probs, alice, bob) = decode(x);
        alice_single_use_chi(&ch, &probs, &alice, &bob).unwrap_or(f64::NEG_INFINITY)
    };
    let start = |k: usize, rng: &mut StreamRng| {
        let mut x = Vec::with_capacity(PARAMS);
        if k == 0 {
            for i in 0..ALICE_STATES {
                encode_state(&hilbert::ket(4, i), &mut x);
            }
            x.extend([0.5; ALICE_STATES]);
            encode_state(&hilbert::ket(2, 0), &mut x);
        } else {
            for _ in 0..ALICE_STATES {
                encode_state(&haar_vector(4, rng), &mut x);
            }
            x.extend(uniform_simplex(ALICE_STATES, rng).into_iter().map(f64::sqrt));
            encode_state(&haar_vector(2, rng), &mut x);
        }
        x
    };
    let schedule = StepSchedule { initial: 0.2, shrink: 0.5, min: 2e-3, min_gain: 1e-5 };
    let best = multi_restart(objective, start, cfg, schedule);
    let (alice_probs, alice_states, bob_state) = decode(&best.argmax);
    Ok(Chi1Search { value: best.value, restart: best.restart, alice_probs, alice_states, bob_state })
}

// ---------------------------------------------------------------------------
// Extremality scans
// ---------------------------------------------------------------------------

/// Tolerance for "no violation" in the scans below.
pub const SCAN_TOL: f64 = 1e-9;

/// Outcome of [`entropy_max_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyMaxReport {
    pub p: f64,
    pub trials: usize,
    /// `S(phi_p(I/4 (x) v))`, independent of `v`.
    pub reference_entropy: f64,
    /// Largest `S(phi_p(rho (x) v)) - reference` over the trials.
    pub max_violation: f64,
    pub violations: usize,
    pub directions: usize,
    /// Largest `|dS|` at `I/4` along the sampled traceless directions.
    pub max_derivative: f64,
}

impl EntropyMaxReport {
    pub fn passed(&self, derivative_tol: f64) -> bool {
        self.violations == 0 && self.max_derivative < derivative_tol
    }
}

/// Checks that Alice's maximally mixed input maximizes the output entropy of
/// `phi_p` and that it is a critical point.
pub fn entropy_max_check(p: NoiseParameter, trials: usize, seed: u64) -> Result<EntropyMaxReport> {
    if p.value() == 0.0 {
        return Err(InfoError::InvalidConfig("p = 0 gives a rank-deficient output".into()));
    }
    let ch = channels::phi_p(p.value())?;
    let mixed = DensityOperator::maximally_mixed(vec![4]);
    let reference = {
        let v = PureState::basis(vec![2], 0).density();
        hilbert::von_neumann_entropy(&ch.apply(&mixed.tensor(&v))?)?
    };
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    for t in 0..trials {
        let mut rng = stream(seed, t as u64);
        let rho = if t % 2 == 0 { random_density(&[4], &mut rng) } else { haar_pure_state(&[4], &mut rng).density() };
        let v = haar_pure_state(&[2], &mut rng).density();
        let s = hilbert::von_neumann_entropy(&ch.apply(&rho.tensor(&v))?)?;
        let excess = s - reference;
        max_violation = max_violation.max(excess);
        if excess > SCAN_TOL {
            violations += 1;
        }
    }
    let directions = 20;
    let mut max_derivative: f64 = 0.0;
    for k in 0..directions {
        let mut rng = stream(seed ^ 0x5eed_d1ec, k as u64);
        let v = haar_pure_state(&[2], &mut rng).density();
        let delta = sampling::random_traceless_hermitian(4, &mut rng);
        let rho = ch.apply(&mixed.tensor(&v))?;
        let direction = ch.apply_matrix(&tensor(&delta, v.matrix()))?;
        let d = hilbert::entropy_directional_derivative(&rho, &direction)?;
        max_derivative = max_derivative.max(d.abs());
    }
    Ok(EntropyMaxReport {
        p: p.value(),
        trials,
        reference_entropy: reference,
        max_violation,
        violations,
        directions,
        max_derivative,
    })
}

/// Outcome of [`min_output_entropy_scan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinOutputReport {
    pub p: f64,
    pub trials: usize,
    pub bound: f64,
    pub min_observed: f64,
    /// Largest `bound - S(phi_p(psi))` over the random inputs.
    pub max_violation: f64,
    pub violations: usize,
    /// Largest `|S(phi_p(|i>|v>)) - bound|`.
    pub equality_deviation: f64,
}

impl MinOutputReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.equality_deviation < 1e-12
    }
}

/// Scans Haar-random (possibly entangled) inputs of `phi_p` for output entropy
/// below `H(1-3p/4, p/4, p/4, p/4)` and checks equality on `|i>|v>`.
pub fn min_output_entropy_scan(p: NoiseParameter, trials: usize, seed: u64) -> Result<MinOutputReport> {
    let ch = channels::phi_p(p.value())?;
    let bound = min_output_entropy_bound(p);
    let mut min_observed = f64::INFINITY;
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    for t in 0..trials {
        let mut rng = stream(seed, t as u64);
        let psi = haar_pure_state(&[4, 2], &mut rng).density();
        let s = hilbert::von_neumann_entropy(&ch.apply(&psi)?)?;
        min_observed = min_observed.min(s);
        let deficit = bound - s;
        max_violation = max_violation.max(deficit);
        if deficit > SCAN_TOL {
            violations += 1;
        }
    }
    let mut rng = stream(seed ^ 0xba5e, 0);
    let mut equality_deviation: f64 = 0.0;
    let plus = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)], vec![2])?;
    for i in 0..4 {
        for v in [plus.clone(), haar_pure_state(&[2], &mut rng)] {
            let input = PureState::basis(vec![4], i).tensor(&v).density();
            let s = hilbert::von_neumann_entropy(&ch.apply(&input)?)?;
            equality_deviation = equality_deviation.max((s - bound).abs());
            min_observed = min_observed.min(s);
        }
    }
    Ok(MinOutputReport { p: p.value(), trials, bound, min_observed, max_violation, violations, equality_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np(p: f64) -> NoiseParameter {
        NoiseParameter::new(p).unwrap()
    }

    #[test]
    fn holevo_of_identity_qubit() {
        let ens = Ensemble::uniform_basis(&[2], 2).unwrap();
        assert!((holevo_chi(&channels::identity(vec![2]), &ens).unwrap() - 1.0).abs() < 1e-12);
        let repeated = Ensemble::uniform(vec![DensityOperator::basis(vec![2], 1); 3]).unwrap();
        assert!(holevo_chi(&channels::identity(vec![2]), &repeated).unwrap().abs() < 1e-12);
    }

    #[test]
    fn holevo_of_phi_basis_ensemble_is_chi1() {
        for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let ch = channels::phi_p(p).unwrap();
            let v = PureState::basis(vec![2], 0);
            let alice: Vec<PureState> = (0..4).map(|i| PureState::basis(vec![4], i)).collect();
            let chi = alice_single_use_chi(&ch, &[0.25; 4], &alice, &v).unwrap();
            assert!((chi - chi1_closed_form(np(p))).abs() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn holevo_rejects_mismatch() {
        let ens = Ensemble::uniform_basis(&[3], 2).unwrap();
        assert!(holevo_chi(&channels::identity(vec![2]), &ens).is_err());
        assert!(Ensemble::new(vec![0.5, 0.5], vec![DensityOperator::basis(vec![2], 0)]).is_err());
        assert!(Ensemble::new(vec![0.7, 0.7], vec![DensityOperator::basis(vec![2], 0); 2]).is_err());
    }

    #[test]
    fn triple_for_phi1_binary() {
        // outputs I/4 (x) sigma_a|b><b|sigma_a: one bit total, one bit each
        let alice = Ensemble::uniform_basis(&[4], 2).unwrap();
        let bob = Ensemble::uniform_basis(&[2], 2).unwrap();
        let t = mac_mutual_informations(&channels::phi_p(1.0).unwrap(), &alice, &bob).unwrap();
        assert!((t.i_a_c_given_b - 1.0).abs() < 1e-10);
        assert!((t.i_b_c_given_a - 1.0).abs() < 1e-10);
        assert!((t.i_ab_c - 1.0).abs() < 1e-10);
    }

    #[test]
    fn triple_for_psi_id_binary() {
        let alice = Ensemble::uniform_basis(&[2], 2).unwrap();
        let bob = Ensemble::uniform_basis(&[2], 2).unwrap();
        let t = mac_mutual_informations(&channels::psi_id(), &alice, &bob).unwrap();
        assert!((t.i_a_c_given_b - 1.0).abs() < 1e-12);
        assert!((t.i_b_c_given_a - 1.0).abs() < 1e-12);
        assert!((t.i_ab_c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn triple_for_single_states_is_zero() {
        let mut rng = stream(5, 0);
        let ch = channels::phi_p(0.4).unwrap();
        let alice = Ensemble::single(random_density(&[4], &mut rng));
        let bob = Ensemble::single(random_density(&[2], &mut rng));
        let t = mac_mutual_informations(&ch, &alice, &bob).unwrap();
        assert!(t.i_a_c_given_b.abs() < 1e-12 && t.i_b_c_given_a.abs() < 1e-12 && t.i_ab_c.abs() < 1e-12);
    }

    #[test]
    fn triple_layout_errors() {
        let alice = Ensemble::uniform_basis(&[2], 2).unwrap();
        let bob = Ensemble::uniform_basis(&[2], 2).unwrap();
        assert!(matches!(
            mac_mutual_informations(&channels::phi_p(0.5).unwrap(), &alice, &bob),
            Err(InfoError::SenderLayout(_))
        ));
        assert!(matches!(
            mac_mutual_informations(&channels::gamma_p(0.5).unwrap(), &alice, &bob),
            Err(InfoError::SenderLayout(_))
        ));
    }

    #[test]
    fn joint_input_interleaves_copies() {
        // phi (x) psi has inputs (A1, B1, A2, B2)
        let ch = tensor_channels(&channels::phi_p(0.0).unwrap(), &channels::psi_id());
        let alice = DensityOperator::basis(vec![4, 2], 2 * 3 + 1); // |3>|1>
        let bob = DensityOperator::basis(vec![2, 2], 2); // |1>|0>
        let joint = joint_input(&ch, &alice, &bob).unwrap();
        assert_eq!(joint.dims(), &[4, 2, 2, 2]);
        // |3>_A1 |1>_B1 |1>_A2 |0>_B2
        let expected = DensityOperator::basis(vec![4, 2, 2, 2], ((3 * 2 + 1) * 2 + 1) * 2);
        assert_eq!(joint, expected);
    }

    #[test]
    fn closed_form_endpoints() {
        assert!((chi1_closed_form(np(0.0)) - 2.0).abs() < 1e-12);
        assert!((chi1_closed_form(np(1.0)) - 1.0).abs() < 1e-12);
        assert!((chi2_prime_closed_form(np(0.0)) - 2.0).abs() < 1e-12);
        assert!((chi2_prime_closed_form(np(1.0)) - 1.0).abs() < 1e-12);
        assert!(superadditivity_gap(np(0.0)).abs() < 1e-12);
        assert!(superadditivity_gap(np(1.0)).abs() < 1e-12);
        assert!(superadditivity_gap(np(0.5)) > 1e-3);
    }

    #[test]
    fn closed_form_matches_literal_expression() {
        // literal transcription of the per-use formula with log2(x/64) terms
        for p in [0.1f64, 0.33, 0.5, 0.77, 0.95] {
            let a = (2.0 - p) * p;
            let b = 4.0 - 6.0 * p + 3.0 * p * p;
            let literal = -(3.0 / 8.0 * a * (a / 64.0).log2() + 1.0 / 8.0 * b * (b / 64.0).log2())
                - min_output_entropy_bound(np(p));
            assert!((literal - chi2_prime_closed_form(np(p))).abs() < 1e-12);
        }
    }

    #[test]
    fn protocol_endpoints() {
        assert!((chi2_prime_protocol(np(0.0)).unwrap() - 2.0).abs() < 1e-9);
        assert!((chi2_prime_protocol(np(1.0)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn protocol_signal_entropy_per_use() {
        let p = np(0.3);
        for out in chi2_prime_outputs(p).unwrap().iter().step_by(5) {
            let s = hilbert::von_neumann_entropy(out).unwrap();
            assert!((s / 2.0 - min_output_entropy_bound(p)).abs() < 1e-10);
        }
    }

    #[test]
    fn protocol_outputs_match_tensor_channel() {
        // oracle: the full 64-dimensional Kraus product of two copies
        let p = np(0.6);
        let ch = channels::phi_p(p.value()).unwrap();
        let both = tensor_channels(&ch, &ch);
        let outputs = chi2_prime_outputs(p).unwrap();
        for (k, input) in chi2_prime_inputs().iter().enumerate().step_by(3) {
            let direct = both.apply(input).unwrap();
            assert!(direct.matrix().max_abs_diff(outputs[k].matrix()) < 1e-13);
        }
    }

    #[test]
    fn remote_dense_coding() {
        for p in [0.0, 0.5, 1.0] {
            assert!((remote_dc_rate(np(p)).unwrap() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn dense_coding_two_bits() {
        assert!((dense_coding_rate().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_endpoints() {
        let cfg = SearchConfig { restarts: 3, seed: 1, iterations: 40 };
        for p in [0.0, 1.0] {
            let r = chi1_bruteforce(np(p), &cfg).unwrap();
            let closed = chi1_closed_form(np(p));
            assert!(r.value <= closed + 1e-6 && r.value >= closed - 1e-6, "p={p}: {}", r.value);
        }
        assert!(chi1_bruteforce(np(0.5), &SearchConfig { restarts: 0, seed: 0, iterations: 1 }).is_err());
    }

    #[test]
    fn entropy_max_small() {
        let r = entropy_max_check(np(0.5), 50, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_derivative < 1e-7);
        assert!(
            (r.reference_entropy - h(&[0.1875, 0.1875, 0.1875, 0.1875, 0.0625, 0.0625, 0.0625, 0.0625])).abs() < 1e-12
        );
        assert!(entropy_max_check(np(0.0), 10, 3).is_err());
    }

    #[test]
    fn pure_alice_input_has_lower_entropy() {
        let p = 0.4;
        let ch = channels::phi_p(p).unwrap();
        let v = PureState::basis(vec![2], 1).density();
        let pure =
            hilbert::von_neumann_entropy(&ch.apply(&DensityOperator::basis(vec![4], 0).tensor(&v)).unwrap()).unwrap();
        let mixed =
            hilbert::von_neumann_entropy(&ch.apply(&DensityOperator::maximally_mixed(vec![4]).tensor(&v)).unwrap())
                .unwrap();
        assert!(pure < mixed - 0.1);
    }

    #[test]
    fn min_output_small() {
        let r = min_output_entropy_scan(np(0.5), 200, 4).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.equality_deviation < 1e-12);
        let r0 = min_output_entropy_scan(np(0.0), 20, 4).unwrap();
        assert!(r0.min_observed.abs() < 1e-12);
        assert_eq!(r0.bound, 0.0);
    }
}
