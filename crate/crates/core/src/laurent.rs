//! Truncated fractional Laurent series.
//!
//! A [`Frac`] of precision `t` stores the first `t` coefficients of
//! `x = Σ_{i≥1} a_i X^{-i}`, an element of the open unit ball `I`. It stands
//! for the whole cylinder of series sharing those coefficients, which has Haar
//! measure `k^{-t}`. Products with polynomials expose only the coefficients
//! that are identical across the cylinder.

use std::fmt;

use crate::algebra::{FieldElem, FieldSpec, Poly, PolyVec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Frac {
    coeffs: Vec<FieldElem>,
}

/// Absolute value of a fractional part as far as it is determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// `‖x‖ = k^{-v}`.
    Exact(usize),
    /// All `t` known coefficients vanish: `‖x‖ < k^{-t}`.
    BelowPrecision(usize),
}

impl Valuation {
    /// Whether `‖x‖ < k^{-s}` is certain from the known window.
    pub fn is_below(self, s: usize) -> Option<bool> {
        match self {
            Valuation::Exact(v) => Some(v > s),
            Valuation::BelowPrecision(t) if t >= s => Some(true),
            Valuation::BelowPrecision(_) => None,
        }
    }
}

impl Frac {
    /// `coeffs[i]` is the coefficient of `X^{-(i+1)}`.
    pub fn new(coeffs: Vec<FieldElem>) -> Self {
        Frac { coeffs }
    }

    pub fn zero(t: usize) -> Self {
        Frac { coeffs: vec![FieldElem::ZERO; t] }
    }

    pub fn from_ints(f: &FieldSpec, coeffs: &[u64]) -> Self {
        Frac { coeffs: coeffs.iter().map(|&c| f.from_int(c)).collect() }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of `X^{-depth}`, `depth ≥ 1`.
    pub fn coeff(&self, depth: usize) -> FieldElem {
        self.coeffs[depth - 1]
    }

    pub fn abs(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Valuation::Exact(i + 1),
            None => Valuation::BelowPrecision(self.coeffs.len()),
        }
    }

    pub fn truncate(&self, t: usize) -> Frac {
        Frac { coeffs: self.coeffs[..t.min(self.coeffs.len())].to_vec() }
    }

    /// Coefficientwise sum on the common window.
    pub fn add(&self, other: &Frac, f: &FieldSpec) -> Frac {
        Frac {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    /// `"t:"` followed by the coefficients depth-first, e.g. `"3:1,0,1"`.
    pub fn format(&self, f: &FieldSpec) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|&c| f.format_elem(c)).collect();
        format!("{}:{}", self.coeffs.len(), body.join(","))
    }

    pub fn parse(s: &str, f: &FieldSpec) -> Result<Frac> {
        let (t, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing precision prefix in {s:?}")))?;
        let t: usize = t.trim().parse().map_err(|_| Error::Parse(format!("bad precision {t:?}")))?;
        let coeffs = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(|c| f.parse_elem(c)).collect::<Result<Vec<_>>>()?
        };
        if coeffs.len() != t {
            return Err(Error::Parse(format!("precision {t} but {} coefficients", coeffs.len())));
        }
        Ok(Frac { coeffs })
    }
}

/// `‖x‖` of a fractional part.
pub fn frac_abs(x: &Frac) -> Valuation {
    x.abs()
}

/// Splits `q · x` into its polynomial part and its fractional part.
///
/// The fractional part has precision `t − deg q`; its coefficient at depth `j`
/// only involves `a_1 … a_{j + deg q}`.
pub fn poly_frac_mul(q: &Poly, x: &Frac, f: &FieldSpec) -> Result<(Poly, Frac)> {
    let t = x.precision();
    let Some(d) = q.degree() else {
        return Ok((Poly::zero(), Frac::zero(t)));
    };
    if d > t {
        return Err(Error::PrecisionExhausted { degree: d, precision: t });
    }
    let c = q.coeffs();
    let a = &x.coeffs;
    // Integer coefficient of X^e collects c_i · a_{i-e} for i > e.
    let integer: Vec<FieldElem> = (0..d)
        .map(|e| {
            (e + 1..=d).fold(FieldElem::ZERO, |acc, i| f.add(acc, f.mul(c[i], a[i - e - 1])))
        })
        .collect();
    let frac: Vec<FieldElem> = (1..=t - d)
        .map(|j| (0..=d).fold(FieldElem::ZERO, |acc, i| f.add(acc, f.mul(c[i], a[i + j - 1]))))
        .collect();
    Ok((Poly::new(integer), Frac { coeffs: frac }))
}

/// A vector of fractional parts of uniform precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracVec(pub Vec<Frac>);

impl FracVec {
    pub fn precision(&self) -> usize {
        self.0.first().map_or(0, Frac::precision)
    }

    pub fn components(&self) -> &[Frac] {
        &self.0
    }
}

/// `‖v‖∞` over the components.
pub fn inf_norm_frac(v: &FracVec) -> Valuation {
    v.0.iter()
        .filter_map(|x| match x.abs() {
            Valuation::Exact(e) => Some(e),
            Valuation::BelowPrecision(_) => None,
        })
        .min()
        .map_or(Valuation::BelowPrecision(v.precision()), Valuation::Exact)
}

/// An `m × n` matrix over `I`, entries stored row-major with one precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracMatrix {
    m: usize,
    n: usize,
    entries: Vec<Frac>,
}

impl FracMatrix {
    pub fn new(m: usize, n: usize, entries: Vec<Frac>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Dimension("matrix dimensions must be positive".into()));
        }
        if entries.len() != m * n {
            return Err(Error::Dimension(format!(
                "{m}x{n} matrix needs {} entries, got {}",
                m * n,
                entries.len()
            )));
        }
        let t = entries[0].precision();
        if entries.iter().any(|e| e.precision() != t) {
            return Err(Error::Dimension("matrix entries must share one precision".into()));
        }
        Ok(FracMatrix { m, n, entries })
    }

    /// Builds an `m × 1` matrix from a single column.
    pub fn column(entries: Vec<Frac>) -> Result<Self> {
        let m = entries.len();
        Self::new(m, 1, entries)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn precision(&self) -> usize {
        self.entries[0].precision()
    }

    pub fn get(&self, i: usize, j: usize) -> &Frac {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Frac] {
        &self.entries
    }

    pub fn truncate(&self, t: usize) -> FracMatrix {
        FracMatrix {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().map(|e| e.truncate(t)).collect(),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "k^-{v}"),
            Valuation::BelowPrecision(t) => write!(f, "<k^-{t}"),
        }
    }
}

/// The fractional part `⟨qA⟩`, so that `min_p ‖qA − p‖∞ = ‖⟨qA⟩‖∞`.
///
/// Output precision is `t − max deg q_i`.
pub fn qa_fracpart(q: &PolyVec, a: &FracMatrix, f: &FieldSpec) -> Result<FracVec> {
    if q.dim() != a.m() {
        return Err(Error::Dimension(format!(
            "vector of length {} against {} matrix rows",
            q.dim(),
            a.m()
        )));
    }
    let t = a.precision();
    let out_t = t.checked_sub(q.height_exp().unwrap_or(0)).ok_or(Error::PrecisionExhausted {
        degree: q.height_exp().unwrap_or(0),
        precision: t,
    })?;
    let mut cols = Vec::with_capacity(a.n());
    for j in 0..a.n() {
        let mut acc = Frac::zero(out_t);
        for (i, qi) in q.components().iter().enumerate() {
            if qi.is_zero() {
                continue;
            }
            let (_, frac) = poly_frac_mul(qi, a.get(i, j), f)?;
            acc = acc.add(&frac, f);
        }
        cols.push(acc);
    }
    Ok(FracVec(cols))
}
