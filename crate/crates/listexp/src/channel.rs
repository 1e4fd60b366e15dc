//! Channels, input distributions, tuple joints, and empirical types.
//!
//! All probability containers validate on construction with a fixed
//! normalization tolerance and are renormalized afterwards, so downstream
//! numerics always see rows that sum to one exactly (up to float rounding).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on probability normalization at ingestion.
pub const NORMALIZATION_TOL: f64 = 1e-9;

fn check_probability_rows(rows: &[Vec<f64>], what: &str) -> Result<usize> {
    let ncols = match rows.first() {
        Some(r) => r.len(),
        None => return Err(Error::Distribution(format!("{what}: no rows"))),
    };
    for (x, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Dimension(format!(
                "{what}: row {x} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        let mut sum = 0.0;
        for &p in row {
            if !p.is_finite() || p < 0.0 || p > 1.0 + NORMALIZATION_TOL {
                return Err(Error::Distribution(format!(
                    "{what}: entry {p} in row {x} is not a probability"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Distribution(format!(
                "{what}: row {x} sums to {sum}, not 1"
            )));
        }
    }
    Ok(ncols)
}

fn renormalize_rows(rows: &mut [Vec<f64>]) {
    for row in rows.iter_mut() {
        let sum: f64 = row.iter().sum();
        for p in row.iter_mut() {
            *p /= sum;
        }
    }
}

/// A discrete memoryless channel: a row-stochastic matrix `P(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    rows: Vec<Vec<f64>>,
}

impl Dmc {
    /// Builds a channel from transition rows, one per input symbol.
    ///
    /// Requires at least a 2x2 matrix; rows must sum to one within
    /// [`NORMALIZATION_TOL`] and are renormalized after validation.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ncols = check_probability_rows(&rows, "channel")?;
        if rows.len() < 2 || ncols < 2 {
            return Err(Error::Dimension(format!(
                "channel must be at least 2x2, got {}x{ncols}",
                rows.len()
            )));
        }
        let mut rows = rows;
        renormalize_rows(&mut rows);
        Ok(Self { rows })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("crossover {p} outside [0,1]")));
        }
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    /// FNV-1a hash of the dimensions and the exact bit patterns of the
    /// (renormalized) entries; stable across runs, used to tag output records.
    pub fn hash_hex(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |byte: u8| {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        };
        for b in (self.input_size() as u64).to_le_bytes() {
            eat(b);
        }
        for b in (self.output_size() as u64).to_le_bytes() {
            eat(b);
        }
        for row in &self.rows {
            for &p in row {
                for b in p.to_bits().to_le_bytes() {
                    eat(b);
                }
            }
        }
        format!("{h:016x}")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: ChannelSpec = serde_json::from_str(s)?;
        spec.try_into()
    }

    pub fn to_json_string(&self) -> String {
        let spec = ChannelSpec {
            input_size: self.input_size(),
            output_size: self.output_size(),
            matrix: self.rows.clone(),
        };
        serde_json::to_string_pretty(&spec).expect("channel spec serializes")
    }
}

/// On-disk channel description.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub input_size: usize,
    pub output_size: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<ChannelSpec> for Dmc {
    type Error = Error;

    fn try_from(spec: ChannelSpec) -> Result<Self> {
        if spec.matrix.len() != spec.input_size {
            return Err(Error::Dimension(format!(
                "matrix has {} rows, input_size says {}",
                spec.matrix.len(),
                spec.input_size
            )));
        }
        let dmc = Dmc::new(spec.matrix)?;
        if dmc.output_size() != spec.output_size {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, output_size says {}",
                dmc.output_size(),
                spec.output_size
            )));
        }
        Ok(dmc)
    }
}

/// A probability vector over the input alphabet (the composition `Q`).
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probability_rows(std::slice::from_ref(&probs), "input distribution")?;
        let mut rows = vec![probs];
        renormalize_rows(&mut rows);
        Ok(Self {
            probs: rows.pop().unwrap(),
        })
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct DistSpec {
            probs: Vec<f64>,
        }
        let spec: DistSpec = serde_json::from_str(s)?;
        Self::new(spec.probs)
    }
}

/// A test channel `P~(y|x)`: same shape and validation as [`Dmc`], but kept
/// as a separate type because it plays the role of an optimization variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalChannel {
    rows: Vec<Vec<f64>>,
}

impl ConditionalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        check_probability_rows(&rows, "test channel")?;
        let mut rows = rows;
        renormalize_rows(&mut rows);
        Ok(Self { rows })
    }

    /// The channel itself viewed as a test channel (the feasible point that
    /// makes every divergence term vanish).
    pub fn from_dmc(w: &Dmc) -> Self {
        Self {
            rows: w.rows().to_vec(),
        }
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }
}

/// Row access shared by [`Dmc`] and [`ConditionalChannel`] so the
/// information measures in [`crate::info`] work on either.
pub trait RowStochastic {
    fn stochastic_rows(&self) -> &[Vec<f64>];
}

impl RowStochastic for Dmc {
    fn stochastic_rows(&self) -> &[Vec<f64>] {
        self.rows()
    }
}

impl RowStochastic for ConditionalChannel {
    fn stochastic_rows(&self) -> &[Vec<f64>] {
        self.rows()
    }
}

/// Joint distribution of a tuple `(X_0, ..., X_L)` over a common finite
/// alphabet, stored as a dense tensor in row-major order (coordinate 0
/// fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct TupleJoint {
    order: usize,
    dims: usize,
    table: Vec<f64>,
}

impl TupleJoint {
    pub fn new(order: usize, dims: usize, table: Vec<f64>) -> Result<Self> {
        if order < 2 || dims < 1 {
            return Err(Error::Dimension(format!(
                "tuple joint needs order >= 2 and a nonempty alphabet, got order {order}, dims {dims}"
            )));
        }
        let want = dims.checked_pow(order as u32).ok_or_else(|| {
            Error::SizeCap(format!("tuple joint {dims}^{order} overflows"))
        })?;
        if table.len() != want {
            return Err(Error::Dimension(format!(
                "tuple joint table has {} entries, expected {want}",
                table.len()
            )));
        }
        let mut mass = 0.0;
        for &p in &table {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Distribution(format!(
                    "tuple joint entry {p} is not a probability"
                )));
            }
            mass += p;
        }
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Distribution(format!(
                "tuple joint mass is {mass}, not 1"
            )));
        }
        let mut table = table;
        for p in table.iter_mut() {
            *p /= mass;
        }
        Ok(Self { order, dims, table })
    }

    /// Product of `order` independent copies of `q`.
    pub fn product_of(q: &InputDistribution, order: usize) -> Self {
        let dims = q.len();
        let len = dims.pow(order as u32);
        let mut table = vec![0.0; len];
        let mut coords = vec![0usize; order];
        for (idx, slot) in table.iter_mut().enumerate() {
            let mut rem = idx;
            for c in coords.iter_mut() {
                *c = rem % dims;
                rem /= dims;
            }
            *slot = coords.iter().map(|&c| q.prob(c)).product();
        }
        Self { order, dims, table }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.order);
        let mut idx = 0;
        for &c in coords.iter().rev() {
            debug_assert!(c < self.dims);
            idx = idx * self.dims + c;
        }
        idx
    }

    pub fn prob(&self, coords: &[usize]) -> f64 {
        self.table[self.index(coords)]
    }

    /// Marginal distribution of coordinate `axis`.
    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims];
        let stride = self.dims.pow(axis as u32);
        for (idx, &p) in self.table.iter().enumerate() {
            out[(idx / stride) % self.dims] += p;
        }
        out
    }

    /// Average of the table over all coordinate permutations. Keeps the
    /// marginal set and, by convexity of the objectives used here, never
    /// increases them.
    pub fn symmetrized(&self) -> Self {
        let perms = permutations(self.order);
        let mut table = vec![0.0; self.table.len()];
        let mut coords = vec![0usize; self.order];
        let mut permuted = vec![0usize; self.order];
        for idx in 0..self.table.len() {
            let mut rem = idx;
            for c in coords.iter_mut() {
                *c = rem % self.dims;
                rem /= self.dims;
            }
            let mut acc = 0.0;
            for perm in &perms {
                for (slot, &src) in permuted.iter_mut().zip(perm.iter()) {
                    *slot = coords[src];
                }
                acc += self.prob(&permuted);
            }
            table[idx] = acc / perms.len() as f64;
        }
        Self {
            order: self.order,
            dims: self.dims,
            table,
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for sub in permutations(n - 1) {
        for pos in 0..n {
            let mut perm = sub.clone();
            perm.insert(pos, n - 1);
            out.push(perm);
        }
    }
    out
}

/// Empirical joint type of a pair of sequences over `X x Y`: integer counts
/// summing to the block length.
#[derive(Debug, Clone, PartialEq)]
pub struct JointType {
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl JointType {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.is_empty() || counts[0].is_empty() {
            return Err(Error::Dimension("joint type has empty shape".into()));
        }
        let ncols = counts[0].len();
        if counts.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("joint type rows have uneven lengths".into()));
        }
        let n = counts.iter().flatten().sum();
        if n == 0 {
            return Err(Error::Distribution("joint type has zero total count".into()));
        }
        Ok(Self { counts, n })
    }

    pub fn from_sequences(x: &[usize], y: &[usize], kx: usize, ky: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dimension(format!(
                "sequence lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::Dimension("empty sequences".into()));
        }
        let mut counts = vec![vec![0u64; ky]; kx];
        for (&a, &b) in x.iter().zip(y.iter()) {
            if a >= kx || b >= ky {
                return Err(Error::OutOfRange(format!(
                    "symbol ({a},{b}) outside alphabet {kx}x{ky}"
                )));
            }
            counts[a][b] += 1;
        }
        Ok(Self {
            counts,
            n: x.len() as u64,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// Normalizes the counts into an input marginal and a conditional row
    /// set. Rows with zero count get a uniform placeholder row; they carry
    /// zero weight in every information measure.
    pub fn normalized(&self) -> (InputDistribution, ConditionalChannel) {
        let kx = self.counts.len();
        let ky = self.counts[0].len();
        let n = self.n as f64;
        let mut q = Vec::with_capacity(kx);
        let mut rows = Vec::with_capacity(kx);
        for row in &self.counts {
            let rowsum: u64 = row.iter().sum();
            q.push(rowsum as f64 / n);
            if rowsum == 0 {
                rows.push(vec![1.0 / ky as f64; ky]);
            } else {
                rows.push(row.iter().map(|&c| c as f64 / rowsum as f64).collect());
            }
        }
        (
            InputDistribution { probs: q },
            ConditionalChannel { rows },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows() {
        assert!(Dmc::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(Dmc::new(vec![vec![1.1, -0.1], vec![0.5, 0.5]]).is_err());
        assert!(Dmc::new(vec![vec![1.0], vec![1.0]]).is_err());
        assert!(Dmc::new(vec![vec![0.5, 0.5], vec![0.5, 0.25, 0.25]]).is_err());
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let w = Dmc::new(vec![vec![0.9 + 4e-10, 0.1], vec![0.1, 0.9]]).unwrap();
        let sum: f64 = w.rows()[0].iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn channel_spec_round_trip() {
        let w = Dmc::bsc(0.1).unwrap();
        let s = w.to_json_string();
        let back = Dmc::from_json_str(&s).unwrap();
        assert_eq!(w, back);
        assert_eq!(w.hash_hex(), back.hash_hex());
    }

    #[test]
    fn channel_spec_dimension_cross_check() {
        let bad = r#"{"input_size": 3, "output_size": 2, "matrix": [[0.5,0.5],[0.5,0.5]]}"#;
        assert!(Dmc::from_json_str(bad).is_err());
        let bad2 = r#"{"input_size": 2, "output_size": 3, "matrix": [[0.5,0.5],[0.5,0.5]]}"#;
        assert!(Dmc::from_json_str(bad2).is_err());
    }

    #[test]
    fn hash_distinguishes_channels() {
        let a = Dmc::bsc(0.1).unwrap();
        let b = Dmc::bsc(0.11).unwrap();
        assert_ne!(a.hash_hex(), b.hash_hex());
    }

    #[test]
    fn tuple_joint_product_marginals() {
        let q = InputDistribution::new(vec![0.3, 0.7]).unwrap();
        let pj = TupleJoint::product_of(&q, 3);
        for axis in 0..3 {
            let m = pj.marginal(axis);
            assert!((m[0] - 0.3).abs() < 1e-12);
            assert!((m[1] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn tuple_joint_index_layout() {
        let q = InputDistribution::new(vec![0.25, 0.75]).unwrap();
        let pj = TupleJoint::product_of(&q, 2);
        // coordinate 0 is the fastest-varying index
        assert_eq!(pj.index(&[1, 0]), 1);
        assert_eq!(pj.index(&[0, 1]), 2);
        assert!((pj.prob(&[1, 0]) - 0.75 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn symmetrization_preserves_mass_and_marginals() {
        let table = vec![0.4, 0.1, 0.2, 0.3];
        let pj = TupleJoint::new(2, 2, table).unwrap();
        let sym = pj.symmetrized();
        let total: f64 = sym.table().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // symmetrized table must be permutation invariant
        assert!((sym.prob(&[0, 1]) - sym.prob(&[1, 0])).abs() < 1e-15);
    }

    #[test]
    fn joint_type_from_sequences() {
        let t = JointType::from_sequences(&[0, 0, 1, 1], &[0, 1, 0, 1], 2, 2).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.counts()[0][1], 1);
        assert!(JointType::from_sequences(&[0], &[0, 1], 2, 2).is_err());
    }
}
