//! Exact Haar measures of `B_q` and of pairwise intersections.
//!
//! `B_q` only depends on the first `r + s` fractional coefficients of `A`
//! (height `k^r`, `ψ = k^{-s}`), so it is a finite union of depth-`(r + s)`
//! cylinders and its measure is `(#cells in B_q) · k^{-mn(r+s)}`. The
//! conditions on different columns of `A` involve disjoint coordinates, so
//! the measure is computed on one column and raised to the `n`-th power
//! unless full enumeration is requested.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{FieldSpec, PolyVec};
use crate::approx::{bq_member, check_budget, count_solutions, CountOptions, Psi};
use crate::counting::{iter_vectors, Dims};
use crate::error::{Error, Result};
use crate::laurent::{Frac, FracMatrix};
use crate::rational::ExactRational;

/// Default cap on the number of enumerated cylinder cells.
pub const DEFAULT_MEASURE_BUDGET: u128 = 1 << 26;

/// A Haar measure in `[0, 1]`, exact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MeasureValue(ExactRational);

impl MeasureValue {
    pub fn new(value: ExactRational) -> Result<Self> {
        if value < ExactRational::zero() || value > ExactRational::one() {
            return Err(Error::Dimension(format!("measure {value} outside [0, 1]")));
        }
        Ok(MeasureValue(value))
    }

    pub fn value(&self) -> &ExactRational {
        &self.0
    }

    pub fn mul(&self, other: &MeasureValue) -> MeasureValue {
        MeasureValue(&self.0 * &other.0)
    }

    pub fn to_k_string(&self, k: u32) -> String {
        self.0.to_k_string(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureOptions {
    pub budget: u128,
    /// Enumerate all of `I^{mn}` instead of one column.
    pub full_enumeration: bool,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { budget: DEFAULT_MEASURE_BUDGET, full_enumeration: false }
    }
}

/// Rank-2 test: some `2 × 2` minor `q_i q'_j − q_j q'_i` is nonzero.
pub fn lin_indep(q: &PolyVec, q2: &PolyVec, f: &FieldSpec) -> Result<bool> {
    if q.is_zero() || q2.is_zero() {
        return Err(Error::ZeroVector);
    }
    if q.dim() != q2.dim() {
        return Err(Error::Dimension("vectors of different length".into()));
    }
    let (a, b) = (q.components(), q2.components());
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !a[i].mul(&b[j], f).sub(&a[j].mul(&b[i], f), f).is_zero() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Decodes cell `index` into an `rows × cols` matrix of depth `depth`,
/// digits taken base `k` with entry-major, depth-minor order.
fn cell_matrix(index: u64, rows: usize, cols: usize, depth: usize, f: &FieldSpec) -> FracMatrix {
    let k = f.k() as u64;
    let mut idx = index;
    let entries = (0..rows * cols)
        .map(|_| {
            Frac::new(
                (0..depth)
                    .map(|_| {
                        let d = (idx % k) as u32;
                        idx /= k;
                        f.elem(d).expect("digit below k")
                    })
                    .collect(),
            )
        })
        .collect();
    FracMatrix::new(rows, cols, entries).expect("well-formed cell")
}

/// Number of depth-`depth` cells of an `rows × cols` block satisfying `pred`.
fn count_cells<P>(rows: usize, cols: usize, depth: usize, f: &FieldSpec, budget: u128, pred: P) -> Result<(u64, u64)>
where
    P: Fn(&FracMatrix) -> Result<bool> + Sync,
{
    let exponent = (rows * cols * depth) as u64;
    check_budget(f.k(), exponent, budget)?;
    let total = (f.k() as u64).pow(exponent as u32);
    let hits = (0..total)
        .into_par_iter()
        .map(|idx| pred(&cell_matrix(idx, rows, cols, depth, f)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok((hits, total))
}

fn height_and_exponent(q: &PolyVec, psi: &Psi) -> Result<(usize, usize)> {
    let r = q.height_exp().ok_or(Error::ZeroVector)?;
    Ok((r, psi.eval(r as u32)? as usize))
}

fn ratio_pow(hits: u64, total: u64, n: usize) -> Result<MeasureValue> {
    let single = ExactRational::new(hits, total);
    let mut acc = ExactRational::one();
    for _ in 0..n {
        acc = &acc * &single;
    }
    MeasureValue::new(acc)
}

/// `μ(B_q)`, exact.
pub fn measure_bq(q: &PolyVec, psi: &Psi, n: usize, f: &FieldSpec, opts: &MeasureOptions) -> Result<MeasureValue> {
    let (r, s) = height_and_exponent(q, psi)?;
    let depth = r + s;
    let m = q.dim();
    if opts.full_enumeration {
        let (hits, total) = count_cells(m, n, depth, f, opts.budget, |a| bq_member(q, a, psi, f))?;
        return MeasureValue::new(ExactRational::new(hits, total));
    }
    let (hits, total) = count_cells(m, 1, depth, f, opts.budget, |a| bq_member(q, a, psi, f))?;
    ratio_pow(hits, total, n)
}

/// `μ(B_q ∩ B_q')`, exact.
pub fn measure_pair(
    q: &PolyVec,
    q2: &PolyVec,
    psi: &Psi,
    n: usize,
    f: &FieldSpec,
    opts: &MeasureOptions,
) -> Result<MeasureValue> {
    let (r1, s1) = height_and_exponent(q, psi)?;
    let (r2, s2) = height_and_exponent(q2, psi)?;
    if q.dim() != q2.dim() {
        return Err(Error::Dimension("vectors of different length".into()));
    }
    let depth = r1.max(r2) + s1.max(s2);
    let both = |a: &FracMatrix| Ok(bq_member(q, a, psi, f)? && bq_member(q2, a, psi, f)?);
    if opts.full_enumeration {
        let (hits, total) = count_cells(q.dim(), n, depth, f, opts.budget, both)?;
        return MeasureValue::new(ExactRational::new(hits, total));
    }
    let (hits, total) = count_cells(q.dim(), 1, depth, f, opts.budget, both)?;
    ratio_pow(hits, total, n)
}

/// Mean of `N(Q, A)` over every depth-`(Q + s(Q))` cylinder of `I^{mn}`.
pub fn expected_n(q_max: u32, psi: &Psi, dims: Dims, f: &FieldSpec, budget: u128) -> Result<ExactRational> {
    let depth = q_max as usize + psi.eval(q_max)? as usize;
    let exponent = (dims.m * dims.n * depth) as u64;
    check_budget(f.k(), exponent, budget)?;
    let total = (f.k() as u64).pow(exponent as u32);
    let opts = CountOptions::default();
    let sum: u64 = (0..total)
        .into_par_iter()
        .map(|idx| count_solutions(q_max, &cell_matrix(idx, dims.m, dims.n, depth, f), psi, f, &opts))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ExactRational::new(sum, total))
}

/// Which vectors a verification run covers.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub field: FieldSpec,
    pub dims: Dims,
    pub psi: Psi,
    /// Vectors of height at most `k^q_max`.
    pub q_max: u32,
    pub options: MeasureOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub p: u32,
    pub l: u32,
    pub k: u32,
    pub modulus: Option<Vec<u32>>,
    pub m: usize,
    pub n: usize,
    pub psi: String,
    #[serde(rename = "Q")]
    pub q_max: u32,
    pub full_enumeration: bool,
    pub budget: String,
}

impl VerifyConfig {
    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            p: self.field.p(),
            l: self.field.l(),
            k: self.field.k(),
            modulus: self.field.modulus().map(<[u32]>::to_vec),
            m: self.dims.m,
            n: self.dims.n,
            psi: self.psi.to_string(),
            q_max: self.q_max,
            full_enumeration: self.options.full_enumeration,
            budget: self.options.budget.to_string(),
        }
    }

    fn vectors(&self) -> Vec<PolyVec> {
        (0..=self.q_max as usize)
            .flat_map(|r| iter_vectors(r, self.dims.m, &self.field))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Case {
    pub q: String,
    pub r: usize,
    pub s: u32,
    pub measure: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Report {
    pub config: ConfigEcho,
    pub cases: Vec<Prop1Case>,
    pub passed: usize,
    pub failed: usize,
}

impl Prop1Report {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Checks `μ(B_q) = ψ(‖q‖∞)^n` for every nonzero `q` in range.
pub fn verify_prop1(cfg: &VerifyConfig) -> Result<Prop1Report> {
    let f = &cfg.field;
    let k = f.k();
    let mut cases = Vec::new();
    for q in cfg.vectors() {
        let (r, s) = height_and_exponent(&q, &cfg.psi)?;
        let measure = measure_bq(&q, &cfg.psi, cfg.dims.n, f, &cfg.options)?;
        let expected = ExactRational::inv_power(k, (s * cfg.dims.n) as u64);
        let pass = *measure.value() == expected;
        cases.push(Prop1Case {
            q: q.format(f),
            r,
            s: s as u32,
            measure: measure.to_k_string(k),
            expected: expected.to_k_string(k),
            pass,
        });
    }
    let passed = cases.iter().filter(|c| c.pass).count();
    Ok(Prop1Report { config: cfg.echo(), failed: cases.len() - passed, passed, cases })
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop2Case {
    pub q: String,
    pub q2: String,
    pub independent: bool,
    pub joint: String,
    pub product: String,
    /// Whether the joint measure equals the product.
    pub product_rule_holds: bool,
    /// Independent pairs pass when the product rule holds; dependent pairs
    /// carry no claim.
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop2Report {
    pub config: ConfigEcho,
    pub cases: Vec<Prop2Case>,
    pub independent_passed: usize,
    pub independent_failed: usize,
    pub dependent: usize,
    /// Dependent pairs whose joint measure differs from the product.
    pub dependent_violating: usize,
}

impl Prop2Report {
    pub fn all_pass(&self) -> bool {
        self.independent_failed == 0
    }
}

/// Checks `μ(B_q ∩ B_q') = μ(B_q) μ(B_q')` over all unordered pairs of
/// distinct vectors in range; dependent pairs are reported separately.
pub fn verify_prop2(cfg: &VerifyConfig) -> Result<Prop2Report> {
    let f = &cfg.field;
    let k = f.k();
    let vectors = cfg.vectors();
    let singles = vectors
        .iter()
        .map(|q| measure_bq(q, &cfg.psi, cfg.dims.n, f, &cfg.options))
        .collect::<Result<Vec<_>>>()?;
    let mut cases = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let (q, q2) = (&vectors[i], &vectors[j]);
            let independent = lin_indep(q, q2, f)?;
            let joint = measure_pair(q, q2, &cfg.psi, cfg.dims.n, f, &cfg.options)?;
            let product = singles[i].mul(&singles[j]);
            let holds = joint == product;
            let status = match (independent, holds) {
                (true, true) => "pass",
                (true, false) => "FAIL",
                (false, _) => "dependent: product rule not claimed",
            };
            cases.push(Prop2Case {
                q: q.format(f),
                q2: q2.format(f),
                independent,
                joint: joint.to_k_string(k),
                product: product.to_k_string(k),
                product_rule_holds: holds,
                status: status.into(),
            });
        }
    }
    let independent_passed = cases.iter().filter(|c| c.independent && c.product_rule_holds).count();
    let independent_failed = cases.iter().filter(|c| c.independent && !c.product_rule_holds).count();
    let dependent = cases.iter().filter(|c| !c.independent).count();
    let dependent_violating = cases.iter().filter(|c| !c.independent && !c.product_rule_holds).count();
    Ok(Prop2Report {
        config: cfg.echo(),
        cases,
        independent_passed,
        independent_failed,
        dependent,
        dependent_violating,
    })
}
