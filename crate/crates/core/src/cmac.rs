//! Classical multiple-access channels.
//!
//! A [`ClassicalMac`] is a conditional distribution `p(y | x_1, ..., x_n)`
//! stored row-wise: one row per input tuple, tuples flattened with sender 0
//! as the most significant digit. On top of it this module provides subset
//! mutual-information bounds, products of channels, a Monte Carlo check of
//! the subset-information inequality behind additivity of classical regions,
//! Blahut–Arimoto capacities, and the classical reduction used to bound the
//! middle sender of the three-sender quantum channel.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::channels::{self, NoiseParameter};
use crate::hilbert::{permute_vector, PureState, C64};
use crate::infoq::{holevo_quantity, InfoError};
use crate::regions::{self, convex_hull, Halfspace, RatePoint, RateRegion2D, RegionError};
use crate::sampling::{stream, uniform_simplex, StreamRng};
use crate::search::{multi_restart, SearchConfig, StepSchedule};

/// Row-normalization tolerance for channel tables and input laws.
pub const PROB_TOL: f64 = 1e-9;
/// Largest violation [`additivity_check`] still counts as a pass.
pub const ADDITIVITY_TOL: f64 = 1e-9;
/// Blahut–Arimoto stops once the capacity bracket is narrower than this.
pub const BA_GAP: f64 = 1e-10;
pub const BA_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmacError {
    #[error("invalid channel table: {0}")]
    InvalidTable(String),
    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),
    #[error("shape mismatch: {0}")]
    Mismatch(String),
    #[error("operation needs {expected} sender(s), channel has {found}")]
    SenderCount { expected: usize, found: usize },
    #[error("invalid JSON channel description: {0}")]
    Json(String),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

pub type Result<T> = std::result::Result<T, CmacError>;

fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

fn entropy_of(p: impl IntoIterator<Item = f64>) -> f64 {
    -p.into_iter().map(xlog2).sum::<f64>()
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|x| !x.is_finite() || *x < -PROB_TOL) {
        return Err(CmacError::InvalidDistribution(format!("{what} has negative or non-finite entries")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(CmacError::InvalidDistribution(format!("{what} sums to {s}")));
    }
    Ok(())
}

/// Mixed-radix index of `digits` (first digit most significant).
fn flatten(digits: &[usize], sizes: &[usize]) -> usize {
    digits.iter().zip(sizes).fold(0, |acc, (d, s)| acc * s + d)
}

fn unflatten(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        digits[k] = index % sizes[k];
        index /= sizes[k];
    }
    digits
}

/// Discrete memoryless channel with one or more senders.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalMac {
    input_sizes: Vec<usize>,
    output_size: usize,
    rows: Vec<Vec<f64>>,
}

impl ClassicalMac {
    /// `rows[flatten(x)]` is `p(. | x)`.
    pub fn new(input_sizes: Vec<usize>, output_size: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if input_sizes.is_empty() || input_sizes.contains(&0) || output_size == 0 {
            return Err(CmacError::InvalidTable("alphabet sizes must be positive".into()));
        }
        let count: usize = input_sizes.iter().product();
        if rows.len() != count {
            return Err(CmacError::InvalidTable(format!("expected {count} rows, found {}", rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != output_size {
                return Err(CmacError::InvalidTable(format!("row {i} has {} entries", row.len())));
            }
            check_distribution(row, &format!("row {i}")).map_err(|e| CmacError::InvalidTable(e.to_string()))?;
        }
        Ok(Self { input_sizes, output_size, rows })
    }

    /// Channel whose output is `f(x)` with certainty.
    pub fn deterministic(input_sizes: Vec<usize>, output_size: usize, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let count: usize = input_sizes.iter().product();
        let rows = (0..count)
            .map(|i| {
                let mut row = vec![0.0; output_size];
                let y = f(&unflatten(i, &input_sizes));
                if y < output_size {
                    row[y] = 1.0;
                }
                row
            })
            .collect();
        Self::new(input_sizes, output_size, rows)
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn senders(&self) -> usize {
        self.input_sizes.len()
    }

    pub fn input_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, inputs: &[usize]) -> &[f64] {
        &self.rows[flatten(inputs, &self.input_sizes)]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Parses `{"input_sizes": [..], "output_size": n, "table": ...}` where
    /// `table` nests one list level per sender, innermost lists being
    /// output distributions.
    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |m: &str| CmacError::Json(m.to_string());
        let sizes: Vec<usize> = value
            .get("input_sizes")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing input_sizes"))?
            .iter()
            .map(|v| v.as_u64().map(|n| n as usize).ok_or_else(|| bad("input_sizes must be integers")))
            .collect::<Result<_>>()?;
        let output_size =
            value.get("output_size").and_then(Value::as_u64).ok_or_else(|| bad("missing output_size"))? as usize;
        let table = value.get("table").ok_or_else(|| bad("missing table"))?;
        let mut rows = Vec::new();
        collect_rows(table, sizes.len(), &mut rows)?;
        Self::new(sizes, output_size, rows)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| CmacError::Json(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        fn nest(rows: &[Vec<f64>], sizes: &[usize]) -> Value {
            if sizes.is_empty() {
                return serde_json::json!(rows[0]);
            }
            let block = rows.len() / sizes[0];
            Value::Array(rows.chunks(block).map(|c| nest(c, &sizes[1..])).collect())
        }
        serde_json::json!({
            "input_sizes": self.input_sizes,
            "output_size": self.output_size,
            "table": nest(&self.rows, &self.input_sizes),
        })
    }
}

fn collect_rows(v: &Value, depth: usize, out: &mut Vec<Vec<f64>>) -> Result<()> {
    let list = v.as_array().ok_or_else(|| CmacError::Json("table entries must be lists".into()))?;
    if depth == 0 {
        let row = list
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| CmacError::Json("probabilities must be numbers".into())))
            .collect::<Result<Vec<f64>>>()?;
        out.push(row);
    } else {
        for item in list {
            collect_rows(item, depth - 1, out)?;
        }
    }
    Ok(())
}

/// Independent input laws, one per sender.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenderDistributions(Vec<Vec<f64>>);

impl SenderDistributions {
    pub fn new(dists: Vec<Vec<f64>>) -> Result<Self> {
        for (i, d) in dists.iter().enumerate() {
            check_distribution(d, &format!("sender {i}"))?;
        }
        Ok(Self(dists))
    }

    pub fn uniform(sizes: &[usize]) -> Self {
        Self(sizes.iter().map(|&n| vec![1.0 / n as f64; n]).collect())
    }

    /// Sender `i` sends uniformly over its first `counts[i]` symbols.
    pub fn uniform_prefix(sizes: &[usize], counts: &[usize]) -> Self {
        Self(
            sizes
                .iter()
                .zip(counts)
                .map(|(&n, &k)| (0..n).map(|x| if x < k { 1.0 / k as f64 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn get(&self) -> &[Vec<f64>] {
        &self.0
    }

    /// Joint law over flattened input tuples.
    pub fn joint(&self) -> Vec<f64> {
        let sizes: Vec<usize> = self.0.iter().map(Vec::len).collect();
        let count: usize = sizes.iter().product();
        (0..count).map(|i| unflatten(i, &sizes).iter().enumerate().map(|(s, &x)| self.0[s][x]).product()).collect()
    }
}

/// `I(X(S) : Y | X(S^c))` for an arbitrary joint input law over the
/// channel's input tuples; `in_s[k]` marks sender `k` as part of `S`.
pub fn conditional_information(ch: &ClassicalMac, joint: &[f64], in_s: &[bool]) -> Result<f64> {
    if joint.len() != ch.input_count() || in_s.len() != ch.senders() {
        return Err(CmacError::Mismatch("joint law or subset does not fit the channel".into()));
    }
    check_distribution(joint, "joint input law")?;
    let cond_sizes: Vec<usize> = ch.input_sizes.iter().zip(in_s).filter(|(_, s)| !**s).map(|(n, _)| *n).collect();
    let cond_count: usize = cond_sizes.iter().product();
    let out = ch.output_size;
    let mut p_cond = vec![0.0; cond_count];
    let mut p_cond_y = vec![0.0; cond_count * out];
    let mut h_y_given_x = 0.0;
    for (i, (&px, row)) in joint.iter().zip(&ch.rows).enumerate() {
        if px <= 0.0 {
            continue;
        }
        let digits = unflatten(i, &ch.input_sizes);
        let cond: Vec<usize> = digits.iter().zip(in_s).filter(|(_, s)| !**s).map(|(d, _)| *d).collect();
        let key = flatten(&cond, &cond_sizes);
        p_cond[key] += px;
        for (y, &w) in row.iter().enumerate() {
            p_cond_y[key * out + y] += px * w;
        }
        h_y_given_x += px * entropy_of(row.iter().copied());
    }
    let h_y_given_cond = entropy_of(p_cond_y) - entropy_of(p_cond);
    Ok((h_y_given_cond - h_y_given_x).max(0.0))
}

/// One constraint `sum_{i in senders} R_i <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetBound {
    pub senders: Vec<usize>,
    pub bound: f64,
}

impl SubsetBound {
    /// The constraint as a halfspace in the two-sender rate plane.
    pub fn halfspace(&self) -> Result<Halfspace> {
        let a = if self.senders.contains(&0) { 1.0 } else { 0.0 };
        let b = if self.senders.contains(&1) { 1.0 } else { 0.0 };
        if self.senders.iter().any(|&s| s > 1) {
            return Err(CmacError::SenderCount { expected: 2, found: self.senders.iter().max().unwrap() + 1 });
        }
        Ok(Halfspace::new(a, b, self.bound)?)
    }
}

/// The `2^n - 1` constraints `R(S) <= I(X(S) : Y | X(S^c))` for a product
/// input law.
pub fn mac_region(ch: &ClassicalMac, dist: &SenderDistributions) -> Result<Vec<SubsetBound>> {
    let sizes: Vec<usize> = dist.get().iter().map(Vec::len).collect();
    if sizes != ch.input_sizes {
        return Err(CmacError::Mismatch(format!("input laws {sizes:?} vs alphabets {:?}", ch.input_sizes)));
    }
    let joint = dist.joint();
    let n = ch.senders();
    (1..1usize << n)
        .map(|mask| {
            let in_s: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
            let bound = conditional_information(ch, &joint, &in_s)?;
            Ok(SubsetBound { senders: (0..n).filter(|&k| in_s[k]).collect(), bound })
        })
        .collect()
}

/// Polygon cut out by two-sender subset bounds.
pub fn bounds_to_region(bounds: &[SubsetBound]) -> Result<RateRegion2D> {
    let hs = bounds.iter().map(SubsetBound::halfspace).collect::<Result<Vec<_>>>()?;
    Ok(regions::region_from_halfspaces(&hs)?)
}

/// [`mac_region`] of a two-sender channel as a polygon.
pub fn mac_region_2d(ch: &ClassicalMac, dist: &SenderDistributions) -> Result<RateRegion2D> {
    if ch.senders() != 2 {
        return Err(CmacError::SenderCount { expected: 2, found: ch.senders() });
    }
    bounds_to_region(&mac_region(ch, dist)?)
}

/// Two uses of a MAC pair: sender `i` controls `(x_{i,1}, x_{i,2})`, encoded
/// as `x_{i,1} * |X_{i,2}| + x_{i,2}`; the output is `y_1 * |Y_2| + y_2`.
pub fn product_mac(c1: &ClassicalMac, c2: &ClassicalMac) -> Result<ClassicalMac> {
    if c1.senders() != c2.senders() {
        return Err(CmacError::Mismatch(format!("{} vs {} senders", c1.senders(), c2.senders())));
    }
    let sizes: Vec<usize> = c1.input_sizes.iter().zip(&c2.input_sizes).map(|(a, b)| a * b).collect();
    let count: usize = sizes.iter().product();
    let rows = (0..count)
        .map(|i| {
            let pairs = unflatten(i, &sizes);
            let x1: Vec<usize> = pairs.iter().zip(&c2.input_sizes).map(|(p, b)| p / b).collect();
            let x2: Vec<usize> = pairs.iter().zip(&c2.input_sizes).map(|(p, b)| p % b).collect();
            outer(c1.row(&x1), c2.row(&x2))
        })
        .collect();
    ClassicalMac::new(sizes, c1.output_size * c2.output_size, rows)
}

fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Both channels side by side with every copy variable as its own sender:
/// senders `x_{1,1}..x_{n,1}, x_{1,2}..x_{n,2}`.
fn side_by_side(c1: &ClassicalMac, c2: &ClassicalMac) -> ClassicalMac {
    let sizes: Vec<usize> = c1.input_sizes.iter().chain(&c2.input_sizes).copied().collect();
    let n = c1.senders();
    let count: usize = sizes.iter().product();
    let rows = (0..count)
        .map(|i| {
            let d = unflatten(i, &sizes);
            outer(c1.row(&d[..n]), c2.row(&d[n..]))
        })
        .collect();
    ClassicalMac { input_sizes: sizes, output_size: c1.output_size * c2.output_size, rows }
}

/// Deviation report `{check, trials, max_violation, pass}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub trials: usize,
    pub max_violation: f64,
    pub pass: bool,
}

/// Largest `LHS - RHS` of the two-copy subset inequality for one input law;
/// `pair_laws[i]` is sender `i`'s joint law over `(x_{i,1}, x_{i,2})`,
/// flattened with the first copy major.
fn additivity_violation(
    c1: &ClassicalMac,
    c2: &ClassicalMac,
    both: &ClassicalMac,
    pair_laws: &[Vec<f64>],
) -> Result<f64> {
    let n = c1.senders();
    let (s1, s2) = (&c1.input_sizes, &c2.input_sizes);
    let marg1: Vec<Vec<f64>> =
        (0..n).map(|i| (0..s1[i]).map(|a| (0..s2[i]).map(|b| pair_laws[i][a * s2[i] + b]).sum()).collect()).collect();
    let marg2: Vec<Vec<f64>> =
        (0..n).map(|i| (0..s2[i]).map(|b| (0..s1[i]).map(|a| pair_laws[i][a * s2[i] + b]).sum()).collect()).collect();
    let joint1 = SenderDistributions(marg1).joint();
    let joint2 = SenderDistributions(marg2).joint();
    let joint: Vec<f64> = (0..both.input_count())
        .map(|k| {
            let d = unflatten(k, &both.input_sizes);
            (0..n).map(|i| pair_laws[i][d[i] * s2[i] + d[n + i]]).product()
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    for m1 in 0..1usize << n {
        for m2 in 0..1usize << n {
            if m1 == 0 && m2 == 0 {
                continue;
            }
            let bits = |m: usize| (0..n).map(move |k| m >> k & 1 == 1);
            let in_s: Vec<bool> = bits(m1).chain(bits(m2)).collect();
            let lhs = conditional_information(both, &joint, &in_s)?;
            let rhs = conditional_information(c1, &joint1, &bits(m1).collect::<Vec<_>>())?
                + conditional_information(c2, &joint2, &bits(m2).collect::<Vec<_>>())?;
            worst = worst.max(lhs - rhs);
        }
    }
    Ok(worst)
}

fn random_pair_laws(c1: &ClassicalMac, c2: &ClassicalMac, rng: &mut StreamRng) -> Vec<Vec<f64>> {
    c1.input_sizes.iter().zip(&c2.input_sizes).map(|(a, b)| uniform_simplex(a * b, rng)).collect()
}

/// Checks `I(X(S):Y|X(S^c)) <= I(X(S_1):Y_1|X(S_1^c)) + I(X(S_2):Y_2|X(S_2^c))`
/// for every split `S = S_1 u S_2` of the copy variables, under `trials`
/// random input laws that are independent across senders but arbitrarily
/// correlated across the two copies held by the same sender.
pub fn additivity_check(c1: &ClassicalMac, c2: &ClassicalMac, trials: usize, seed: u64) -> Result<CheckReport> {
    if c1.senders() != c2.senders() {
        return Err(CmacError::Mismatch(format!("{} vs {} senders", c1.senders(), c2.senders())));
    }
    let both = side_by_side(c1, c2);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = stream(seed, t as u64);
        let laws = random_pair_laws(c1, c2, &mut rng);
        worst = worst.max(additivity_violation(c1, c2, &both, &laws)?);
    }
    Ok(CheckReport {
        check: "classical-additivity".into(),
        trials,
        max_violation: worst,
        pass: worst <= ADDITIVITY_TOL,
    })
}

/// Like [`additivity_check`], but every trial also draws a fresh pair of
/// random two-sender channels with alphabets of size 2 to `max_alphabet`.
pub fn random_additivity_check(pairs: usize, seed: u64, max_alphabet: usize) -> Result<CheckReport> {
    if max_alphabet < 2 {
        return Err(CmacError::InvalidTable("max_alphabet must be at least 2".into()));
    }
    let mut worst: f64 = 0.0;
    for t in 0..pairs {
        let mut rng = stream(seed, t as u64);
        let size = |rng: &mut StreamRng| {
            2 + (crate::sampling::uniform(0.0, (max_alphabet - 1) as f64, rng) as usize).min(max_alphabet - 2)
        };
        let (a1, b1, o1) = (size(&mut rng), size(&mut rng), size(&mut rng));
        let (a2, b2, o2) = (size(&mut rng), size(&mut rng), size(&mut rng));
        let c1 = random_mac(&[a1, b1], o1, &mut rng);
        let c2 = random_mac(&[a2, b2], o2, &mut rng);
        let laws = random_pair_laws(&c1, &c2, &mut rng);
        worst = worst.max(additivity_violation(&c1, &c2, &side_by_side(&c1, &c2), &laws)?);
    }
    Ok(CheckReport {
        check: "classical-additivity".into(),
        trials: pairs,
        max_violation: worst,
        pass: worst <= ADDITIVITY_TOL,
    })
}

/// Channel with Dirichlet(1) rows.
pub fn random_mac(input_sizes: &[usize], output_size: usize, rng: &mut StreamRng) -> ClassicalMac {
    let count: usize = input_sizes.iter().product();
    let rows = (0..count).map(|_| uniform_simplex(output_size, rng)).collect();
    ClassicalMac::new(input_sizes.to_vec(), output_size, rows).expect("stochastic by construction")
}

// ---------------------------------------------------------------------------
// Sampled regions
// ---------------------------------------------------------------------------

/// Random input laws sampled by [`sampled_region`] on top of the
/// deterministic candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSampling {
    pub samples: usize,
    pub seed: u64,
}

impl Default for RegionSampling {
    fn default() -> Self {
        Self { samples: 200, seed: 0 }
    }
}

/// Inner approximation of a two-sender capacity region: convex hull of the
/// pentagons of point-mass, uniform-on-two and uniform input laws and of
/// `cfg.samples` Dirichlet(1) product laws.
pub fn sampled_region(ch: &ClassicalMac, cfg: &RegionSampling) -> Result<RateRegion2D> {
    if ch.senders() != 2 {
        return Err(CmacError::SenderCount { expected: 2, found: ch.senders() });
    }
    let sizes = ch.input_sizes.clone();
    let counts = |n: usize| {
        let mut c = vec![1, n];
        if n > 2 {
            c.push(2);
        }
        c
    };
    let mut points: Vec<RatePoint> = vec![[0.0, 0.0]];
    for &ka in &counts(sizes[0]) {
        for &kb in &counts(sizes[1]) {
            let dist = SenderDistributions::uniform_prefix(&sizes, &[ka, kb]);
            points.extend_from_slice(mac_region_2d(ch, &dist)?.vertices());
        }
    }
    for k in 0..cfg.samples {
        let mut rng = stream(cfg.seed, k as u64);
        let dist = SenderDistributions(sizes.iter().map(|&n| uniform_simplex(n, &mut rng)).collect());
        points.extend_from_slice(mac_region_2d(ch, &dist)?.vertices());
    }
    Ok(convex_hull(&points)?)
}

/// Sampled regions of two channels, their Minkowski sum and the sampled
/// region of their product.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityDemo {
    pub first: RateRegion2D,
    pub second: RateRegion2D,
    pub sum_region: RateRegion2D,
    pub product_region: RateRegion2D,
    pub hausdorff: f64,
    pub product_in_sum: bool,
    pub sum_in_product: bool,
}

/// Sampling-resolution slack for the subset verdicts of [`region_additivity_demo`].
pub const DEMO_TOL: f64 = 1e-3;

pub fn region_additivity_demo(c1: &ClassicalMac, c2: &ClassicalMac, cfg: &RegionSampling) -> Result<AdditivityDemo> {
    for c in [c1, c2] {
        if c.senders() != 2 {
            return Err(CmacError::SenderCount { expected: 2, found: c.senders() });
        }
    }
    let first = sampled_region(c1, cfg)?;
    let second = sampled_region(c2, cfg)?;
    let sum_region = regions::minkowski_sum(&first, &second);
    let product_region = sampled_region(&product_mac(c1, c2)?, cfg)?;
    Ok(AdditivityDemo {
        hausdorff: regions::hausdorff_distance(&sum_region, &product_region),
        product_in_sum: product_region.directed_distance(&sum_region) <= DEMO_TOL,
        sum_in_product: sum_region.directed_distance(&product_region) <= DEMO_TOL,
        first,
        second,
        sum_region,
        product_region,
    })
}

// ---------------------------------------------------------------------------
// Example channels
// ---------------------------------------------------------------------------

/// `y = x_1 xor x_2`.
pub fn xor_gate() -> ClassicalMac {
    ClassicalMac::deterministic(vec![2, 2], 2, |x| x[0] ^ x[1]).expect("valid")
}

/// Identity on `n` symbols.
pub fn noiseless(n: usize) -> ClassicalMac {
    ClassicalMac::deterministic(vec![n], n, |x| x[0]).expect("valid")
}

/// Every input tuple maps to output 0.
pub fn constant(input_sizes: Vec<usize>) -> ClassicalMac {
    ClassicalMac::deterministic(input_sizes, 1, |_| 0).expect("valid")
}

pub fn binary_symmetric(crossover: f64) -> Result<ClassicalMac> {
    let e = NoiseParameter::new(crossover).map_err(|e| CmacError::InvalidTable(e.to_string()))?.value();
    ClassicalMac::new(vec![2], 2, vec![vec![1.0 - e, e], vec![e, 1.0 - e]])
}

/// Output alphabet `{0, 1, erased}`.
pub fn binary_erasure(epsilon: f64) -> Result<ClassicalMac> {
    let e = NoiseParameter::new(epsilon).map_err(|e| CmacError::InvalidTable(e.to_string()))?.value();
    ClassicalMac::new(vec![2], 3, vec![vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]])
}

/// Crossover probability in `[0, 1/2]` with binary entropy `h`.
pub fn inverse_binary_entropy(h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if h >= 1.0 {
        return 0.5;
    }
    let binary = |x: f64| entropy_of([x, 1.0 - x]);
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two independent binary symmetric channels read by one receiver: sender
/// `i` drives a BSC whose crossover has binary entropy `noise[i]`; the
/// output is the pair `y_1 * 2 + y_2`.
pub fn bsc_pair(noise: [f64; 2]) -> Result<ClassicalMac> {
    let a = binary_symmetric(inverse_binary_entropy(noise[0]))?;
    let b = binary_symmetric(inverse_binary_entropy(noise[1]))?;
    let rows = (0..4).map(|i| outer(a.row(&[i / 2]), b.row(&[i % 2]))).collect();
    ClassicalMac::new(vec![2, 2], 4, rows)
}

// ---------------------------------------------------------------------------
// Point-to-point capacity
// ---------------------------------------------------------------------------

/// Outcome of [`blahut_arimoto_report`]: `capacity <= C <= upper_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub capacity: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    pub input: Vec<f64>,
}

/// Blahut–Arimoto iteration from the uniform input. After each step the
/// capacity is bracketed by `log2 sum_x r(x) 2^{D(x)}` and `max_x D(x)`,
/// `D(x)` the divergence of row `x` from the output law; iteration stops once
/// the bracket is below [`BA_GAP`] or after [`BA_MAX_ITERATIONS`] steps.
pub fn blahut_arimoto_report(ch: &ClassicalMac) -> Result<CapacityReport> {
    if ch.senders() != 1 {
        return Err(CmacError::SenderCount { expected: 1, found: ch.senders() });
    }
    let n = ch.input_count();
    let mut r = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        let mut q = vec![0.0; ch.output_size];
        for (rx, row) in r.iter().zip(&ch.rows) {
            for (qy, w) in q.iter_mut().zip(row) {
                *qy += rx * w;
            }
        }
        let d: Vec<f64> = ch
            .rows
            .iter()
            .map(|row| row.iter().zip(&q).filter(|(w, _)| **w > 0.0).map(|(w, qy)| w * (w / qy).log2()).sum())
            .collect();
        let weights: Vec<f64> = r.iter().zip(&d).map(|(rx, dx)| rx * dx.exp2()).collect();
        let z: f64 = weights.iter().sum();
        let lower = z.log2().max(0.0);
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(lower);
        if upper - lower < BA_GAP || iterations >= BA_MAX_ITERATIONS {
            return Ok(CapacityReport { capacity: lower, upper_bound: upper, iterations, input: r });
        }
        r = weights.into_iter().map(|w| w / z).collect();
        iterations += 1;
    }
}

/// Capacity in bits per use of a single-sender channel.
pub fn blahut_arimoto(ch: &ClassicalMac) -> Result<f64> {
    Ok(blahut_arimoto_report(ch)?.capacity)
}

// ---------------------------------------------------------------------------
// Three-sender reduction
// ---------------------------------------------------------------------------

/// What the middle sender's symbol `i` leaves in the second Pauli slot: `i`
/// with probability `p`, otherwise `0`.
pub fn lambda2_channel(p: NoiseParameter) -> ClassicalMac {
    let p = p.value();
    let rows = (0..4)
        .map(|i| {
            let mut row = vec![0.0; 4];
            if i == 0 {
                row[0] = 1.0;
            } else {
                row[0] = 1.0 - p;
                row[i] = p;
            }
            row
        })
        .collect();
    ClassicalMac::new(vec![4], 4, rows).expect("stochastic by construction")
}

/// Regularized bound `max_{p(B)} I(B : B_2) + 1` on the middle sender's rate.
pub fn gamma_rb_bound(p: NoiseParameter) -> f64 {
    blahut_arimoto(&lambda2_channel(p)).expect("single sender") + 1.0
}

/// Best single-copy rate found by [`gamma_single_copy_rb`].
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSingleCopy {
    pub value: f64,
    pub restart: usize,
    pub b_probs: Vec<f64>,
    pub a1: PureState,
    pub a2: PureState,
}

fn qubit_from(raw: &[f64]) -> PureState {
    let amps = vec![C64::new(raw[0], raw[1]), C64::new(raw[2], raw[3])];
    PureState::normalized(amps, vec![2]).unwrap_or_else(|_| PureState::basis(vec![2], 0))
}

fn decode_gamma(x: &[f64]) -> (Vec<f64>, PureState, PureState) {
    let norm: f64 = x[..4].iter().map(|a| a * a).sum();
    let probs = if norm > 0.0 { x[..4].iter().map(|a| a * a / norm).collect() } else { vec![0.25; 4] };
    (probs, qubit_from(&x[4..8]), qubit_from(&x[8..12]))
}

/// Holevo rate of the middle sender's standard-basis symbols through
/// `gamma_p` when the outer senders hold fixed pure qubits.
pub fn gamma_b_rate(ch: &channels::KrausChannel, probs: &[f64], a1: &PureState, a2: &PureState) -> Result<f64> {
    let outputs = (0..4)
        .map(|j| {
            let input = a1.tensor(&PureState::basis(vec![4], j)).tensor(a2);
            ch.apply_pure(&input).map_err(InfoError::from)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(holevo_quantity(probs, &outputs)?)
}

/// Maximizes [`gamma_b_rate`] over the symbol probabilities and both outer
/// pure states. Restart 0 starts from uniform symbols with `|0>, |0>`.
pub fn gamma_single_copy_rb(p: NoiseParameter, cfg: &SearchConfig) -> Result<GammaSingleCopy> {
    if !cfg.is_valid() {
        return Err(InfoError::InvalidConfig(format!("{cfg:?}")).into());
    }
    let ch = channels::gamma_p(p.value()).map_err(InfoError::from)?;
    let objective = |x: &[f64]| {
        let (probs, a1, a2) = decode_gamma(x);
        gamma_b_rate(&ch, &probs, &a1, &a2).unwrap_or(f64::NEG_INFINITY)
    };
    let start = |k: usize, rng: &mut StreamRng| {
        if k == 0 {
            vec![0.5, 0.5, 0.5, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        } else {
            let mut x: Vec<f64> = uniform_simplex(4, rng).into_iter().map(f64::sqrt).collect();
            for _ in 0..2 {
                x.extend(crate::sampling::haar_vector(2, rng).iter().flat_map(|z| [z.re, z.im]));
            }
            x
        }
    };
    let schedule = StepSchedule { initial: 0.2, shrink: 0.5, min: 1e-4, min_gain: 1e-9 };
    let best = multi_restart(objective, start, cfg, schedule);
    let (b_probs, a1, a2) = decode_gamma(&best.argmax);
    Ok(GammaSingleCopy { value: best.value, restart: best.restart, b_probs, a1, a2 })
}

/// Middle sender's rate when each outer sender feeds one half of a Bell
/// pair into `gamma_p` and the other half through the ideal two-qubit
/// channel; the four symbols are sent uniformly.
pub fn gamma_entangled_rb(p: NoiseParameter) -> Result<f64> {
    let ch = channels::tensor_channels(&channels::gamma_p(p.value()).map_err(InfoError::from)?, &channels::psi_id());
    let bell = PureState::bell_phi_plus();
    let outputs = (0..4)
        .map(|j| {
            // factors (A1, X, B, A2, Y) -> channel order (A1, B, A2, X, Y)
            let state = bell.tensor(&PureState::basis(vec![4], j)).tensor(&bell);
            let amps =
                permute_vector(state.amplitudes(), &[2, 2, 4, 2, 2], &[0, 2, 3, 1, 4]).map_err(InfoError::from)?;
            let input = PureState::new(amps, vec![2, 4, 2, 2, 2]).map_err(InfoError::from)?;
            ch.apply_pure(&input).map_err(InfoError::from)
        })
        .collect::<std::result::Result<Vec<_>, InfoError>>()?;
    Ok(holevo_quantity(&[0.25; 4], &outputs)?)
}
