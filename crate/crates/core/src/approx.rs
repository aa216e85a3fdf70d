//! Error functions, the `V`-valued floor, membership in `B_q` and the
//! solution counter `N(Q, A)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{FieldSpec, PolyVec};
use crate::counting::iter_vectors;
use crate::engine;
use crate::error::{Error, Result};
use crate::laurent::{qa_fracpart, FracMatrix};

/// Default cap on `k^{m(Q+1)}`, the number of vectors a count may visit.
pub const DEFAULT_COUNT_BUDGET: u128 = 1 << 28;

/// An error function with values in `{k^{-s}}`, stored as the exponent map
/// `r ↦ s(r)` with `ψ(k^r) = k^{-s(r)}`.
///
/// `s` is nondecreasing (ψ non-increasing). Whether `s = 0`, i.e. `ψ = 1`, is
/// admissible is chosen at construction; by default every value must be at
/// least 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Psi {
    /// `s(r) = slope · r + offset`.
    Linear { slope: u32, offset: u32 },
    /// `s(r) = values[r]`, defined for `r < values.len()`.
    Table(Vec<u32>),
}

impl Psi {
    pub fn linear(slope: u32, offset: u32) -> Result<Self> {
        Self::checked(Psi::Linear { slope, offset }, false)
    }

    pub fn table(values: Vec<u32>) -> Result<Self> {
        Self::checked(Psi::Table(values), false)
    }

    /// Like [`Psi::linear`] but admitting `s(0) = 0`.
    pub fn linear_allowing_unit(slope: u32, offset: u32) -> Result<Self> {
        Self::checked(Psi::Linear { slope, offset }, true)
    }

    pub fn table_allowing_unit(values: Vec<u32>) -> Result<Self> {
        Self::checked(Psi::Table(values), true)
    }

    fn checked(psi: Psi, allow_unit: bool) -> Result<Self> {
        match &psi {
            Psi::Linear { offset, .. } => {
                if !allow_unit && *offset == 0 {
                    return Err(Error::InvalidPsi("s(0) = 0 gives psi = 1, which is not enabled".into()));
                }
            }
            Psi::Table(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidPsi("empty table".into()));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidPsi("exponents must be nondecreasing".into()));
                }
                if !allow_unit && values[0] == 0 {
                    return Err(Error::InvalidPsi("s(0) = 0 gives psi = 1, which is not enabled".into()));
                }
            }
        }
        Ok(psi)
    }

    /// Parses `"linear:a,b"` or `"table:s0,s1,…"`.
    pub fn parse(text: &str, allow_unit: bool) -> Result<Self> {
        let (kind, body) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("psi {text:?} must look like linear:a,b or table:s0,...")))?;
        let nums = body
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let psi = match kind.trim() {
            "linear" => match nums[..] {
                [a, b] => Psi::Linear { slope: a, offset: b },
                _ => return Err(Error::Parse("linear psi takes exactly two integers".into())),
            },
            "table" => Psi::Table(nums),
            other => return Err(Error::Parse(format!("unknown psi kind {other:?}"))),
        };
        Self::checked(psi, allow_unit)
    }

    /// `s(r)`, so that `ψ(k^r) = k^{-s(r)}`.
    pub fn eval(&self, r: u32) -> Result<u32> {
        match self {
            Psi::Linear { slope, offset } => slope
                .checked_mul(r)
                .and_then(|v| v.checked_add(*offset))
                .ok_or_else(|| Error::InvalidPsi(format!("s({r}) overflows"))),
            Psi::Table(values) => values
                .get(r as usize)
                .copied()
                .ok_or(Error::OutOfRange { r, len: values.len() }),
        }
    }

    /// `s(0), …, s(q_max)`.
    pub fn exponents(&self, q_max: u32) -> Result<Vec<u32>> {
        (0..=q_max).map(|r| self.eval(r)).collect()
    }
}

impl fmt::Display for Psi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psi::Linear { slope, offset } => write!(f, "linear:{slope},{offset}"),
            Psi::Table(values) => {
                let body: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "table:{}", body.join(","))
            }
        }
    }
}

impl FromStr for Psi {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Psi::parse(s, false)
    }
}

/// `psi.eval(r)`.
pub fn psi_eval(psi: &Psi, r: u32) -> Result<u32> {
    psi.eval(r)
}

/// The exponent `n` with `k^{-n} ≤ x < k^{-n+1}`, i.e. `⌊x⌋ = k^{-n}` in `V`.
///
/// Decided in exact arithmetic on the binary value of `x`.
pub fn floor_to_v(x: f64, k: u32) -> Result<i64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::NonPositiveInput(x));
    }
    assert!(k >= 2, "field order is at least 2");
    let exact = BigRational::from_float(x).expect("finite float");
    let kb = BigInt::from(k);
    // k^{-n} as an exact rational.
    let pow = |n: i64| -> BigRational {
        if n >= 0 {
            BigRational::new(1.into(), kb.pow(n as u32))
        } else {
            BigRational::from_integer(kb.pow((-n) as u32))
        }
    };
    let mut n = -(x.ln() / (k as f64).ln()).floor() as i64;
    while pow(n) > exact {
        n += 1;
    }
    while pow(n - 1) <= exact {
        n -= 1;
    }
    Ok(n)
}

fn require_nonzero(q: &PolyVec) -> Result<usize> {
    q.height_exp().ok_or(Error::ZeroVector)
}

/// Whether `A ∈ B_q`: some `p` has `‖qA − p‖∞ < ψ(‖q‖∞)`.
///
/// Requires `t ≥ deg q + s`, which makes the strict inequality decidable: it
/// holds iff the first `s` coefficients of every component of `⟨qA⟩` vanish.
pub fn bq_member(q: &PolyVec, a: &FracMatrix, psi: &Psi, f: &FieldSpec) -> Result<bool> {
    let r = require_nonzero(q)?;
    let s = psi.eval(r as u32)? as usize;
    let needed = r + s;
    if a.precision() < needed {
        return Err(Error::InsufficientPrecision { needed, have: a.precision() });
    }
    let frac = qa_fracpart(q, a, f)?;
    Ok(frac
        .components()
        .iter()
        .all(|x| x.abs().is_below(s).expect("precision contract makes the test decidable")))
}

/// Options shared by the counting entry points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Visit one representative per scalar orbit `{c·q : c ∈ F*}` and
    /// multiply by `k − 1`.
    pub orbit_representatives: bool,
    /// Upper bound on `k^{m(Q+1)}`.
    pub budget: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { orbit_representatives: false, budget: DEFAULT_COUNT_BUDGET }
    }
}

pub(crate) fn check_budget(k: u32, exponent: u64, budget: u128) -> Result<()> {
    let needed = (k as u128).checked_pow(exponent as u32).unwrap_or(u128::MAX);
    if exponent > u32::MAX as u64 || needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn check_count_contract(q_max: u32, a: &FracMatrix, psi: &Psi) -> Result<Vec<u32>> {
    let s = psi.exponents(q_max)?;
    let needed = q_max as usize + s[q_max as usize] as usize;
    if a.precision() < needed {
        return Err(Error::InsufficientPrecision { needed, have: a.precision() });
    }
    Ok(s)
}

/// Per-height counts: entry `r` is the number of `q` with `‖q‖∞ = k^r` and
/// `A ∈ B_q`, for `r = 0..=q_max`.
pub fn shell_counts(
    q_max: u32,
    a: &FracMatrix,
    psi: &Psi,
    f: &FieldSpec,
    opts: &CountOptions,
) -> Result<Vec<u64>> {
    let s = check_count_contract(q_max, a, psi)?;
    check_budget(f.k(), a.m() as u64 * (q_max as u64 + 1), opts.budget)?;
    Ok(engine::shell_counts(a, &s, f, opts.orbit_representatives))
}

/// `N(Q, A)`: the number of nonzero `q ∈ F[X]^m` with `‖q‖∞ ≤ k^Q` and
/// `A ∈ B_q`. Each qualifying `q` counts once since its `p` is unique.
pub fn count_solutions(
    q_max: u32,
    a: &FracMatrix,
    psi: &Psi,
    f: &FieldSpec,
    opts: &CountOptions,
) -> Result<u64> {
    Ok(shell_counts(q_max, a, psi, f, opts)?.iter().sum())
}

/// `N(Q, A)` by testing [`bq_member`] on every vector. Slow; kept as a
/// reference for the incremental counter.
pub fn count_solutions_direct(
    q_max: u32,
    a: &FracMatrix,
    psi: &Psi,
    f: &FieldSpec,
    budget: u128,
) -> Result<u64> {
    check_count_contract(q_max, a, psi)?;
    check_budget(f.k(), a.m() as u64 * (q_max as u64 + 1), budget)?;
    let mut total = 0;
    for r in 0..=q_max {
        for q in iter_vectors(r as usize, a.m(), f) {
            if bq_member(&q, a, psi, f)? {
                total += 1;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::laurent::Frac;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn column(f: &FieldSpec) -> FracMatrix {
        FracMatrix::column(vec![Frac::from_ints(f, &[1, 1, 0]), Frac::from_ints(f, &[1, 0, 1])])
            .unwrap()
    }

    #[test]
    fn psi_eval_examples() {
        assert_eq!(psi_eval(&Psi::linear(1, 1).unwrap(), 2).unwrap(), 3);
        assert_eq!(psi_eval(&Psi::linear_allowing_unit(2, 0).unwrap(), 3).unwrap(), 6);
        let t = Psi::table(vec![1, 2, 2]).unwrap();
        assert_eq!(psi_eval(&t, 2).unwrap(), 2);
        assert_eq!(psi_eval(&t, 3), Err(Error::OutOfRange { r: 3, len: 3 }));
    }

    #[test]
    fn psi_validation() {
        assert!(Psi::linear(2, 0).is_err());
        assert!(Psi::table(vec![2, 1]).is_err());
        assert!(Psi::table(vec![]).is_err());
        assert!(Psi::table_allowing_unit(vec![0, 1]).is_ok());
        assert_eq!("linear:2,1".parse::<Psi>().unwrap(), Psi::linear(2, 1).unwrap());
        assert_eq!(Psi::parse("table:1,2,2", false).unwrap().to_string(), "table:1,2,2");
        assert!(Psi::parse("linear:1", false).is_err());
        assert!(Psi::parse("cubic:1,2", false).is_err());
        assert!(Psi::parse("linear:0,0", true).is_ok());
    }

    #[test]
    fn floor_examples() {
        assert_eq!(floor_to_v(0.3, 2).unwrap(), 2);
        assert_eq!(floor_to_v(0.25, 2).unwrap(), 2);
        assert_eq!(floor_to_v(1.0, 3).unwrap(), 0);
        assert_eq!(floor_to_v(9.0, 3).unwrap(), -2);
        assert_eq!(floor_to_v(8.999, 3).unwrap(), -1);
        assert!(matches!(floor_to_v(0.0, 2), Err(Error::NonPositiveInput(_))));
        assert!(matches!(floor_to_v(-1.0, 2), Err(Error::NonPositiveInput(_))));
        assert!(matches!(floor_to_v(f64::NAN, 2), Err(Error::NonPositiveInput(_))));
    }

    #[test]
    fn bq_examples() {
        let f = f2();
        let a = column(&f);
        let x = Poly::from_ints(&f, &[0, 1]);
        let q = PolyVec(vec![x, Poly::one()]);
        assert!(bq_member(&q, &a, &Psi::table(vec![1, 2]).unwrap(), &f).unwrap());
        let q = PolyVec(vec![Poly::one(), Poly::one()]);
        assert!(bq_member(&q, &a, &Psi::table(vec![1]).unwrap(), &f).unwrap());
        let q = PolyVec(vec![Poly::one(), Poly::zero()]);
        assert!(!bq_member(&q, &a, &Psi::table(vec![1]).unwrap(), &f).unwrap());
        assert_eq!(
            bq_member(&PolyVec::zero(2), &a, &Psi::table(vec![1]).unwrap(), &f),
            Err(Error::ZeroVector)
        );
        let q = PolyVec(vec![Poly::one(), Poly::one()]);
        assert_eq!(
            bq_member(&q, &a, &Psi::table(vec![4]).unwrap(), &f),
            Err(Error::InsufficientPrecision { needed: 4, have: 3 })
        );
    }

    #[test]
    fn count_examples() {
        let f = f2();
        let a = column(&f);
        let psi = Psi::linear(1, 1).unwrap();
        let opts = CountOptions::default();
        assert_eq!(count_solutions(0, &a, &psi, &f, &opts).unwrap(), 1);
        assert_eq!(count_solutions_direct(0, &a, &psi, &f, DEFAULT_COUNT_BUDGET).unwrap(), 1);
        assert!(matches!(
            count_solutions(0, &a, &Psi::linear(0, 9).unwrap(), &f, &opts),
            Err(Error::InsufficientPrecision { .. })
        ));
        let tight = CountOptions { budget: 3, ..opts };
        assert!(matches!(
            count_solutions(0, &a, &psi, &f, &tight),
            Err(Error::BudgetExceeded { needed: 4, budget: 3 })
        ));
    }
}
