//! Exact counts of polynomial vectors by height, the main term `Φ(Q)`, and the
//! divisor-weighted sums `τ(q)` and `T(Q)`.
//!
//! The closed form `m(k−1)k^{m−1+rm}` for the number of vectors of height
//! `k^r` overcounts vectors in which several coordinates reach the top degree;
//! the exact count is `k^{rm}(k^m − 1)`. Both are available through
//! [`CountVariant`] and agree only for `m = 1`.

use std::io::{self, Write};

use num_bigint::BigUint;
use serde::Serialize;

use crate::algebra::{FieldElem, FieldSpec, Poly, PolyVec};
use crate::approx::{check_budget, Psi, DEFAULT_COUNT_BUDGET};
use crate::error::{Error, Result};
use crate::rational::ExactRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountVariant {
    /// `m(k−1)k^{m−1+rm}` vectors per height shell.
    PaperFormula,
    /// `k^{rm}(k^m − 1)`, the true shell size.
    ExactEnumeration,
}

/// Matrix shape `m × n`: `q` has `m` coordinates, `p` has `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Dimension("m and n must be positive".into()));
        }
        Ok(Dims { m, n })
    }
}

/// Every `q ∈ F[X]^m` with `‖q‖∞ = k^r`, exactly once each.
///
/// Order is graded-lexicographic: within the shell, vectors follow a base-`k`
/// counter over the digits `(q_1[0], …, q_1[r], q_2[0], …)`, first digit least
/// significant, skipping vectors of smaller height.
pub struct VectorShell<'a> {
    f: &'a FieldSpec,
    r: usize,
    m: usize,
    digits: Vec<u32>,
    done: bool,
}

impl<'a> VectorShell<'a> {
    fn advance(&mut self) -> bool {
        let k = self.f.k();
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < k {
                return true;
            }
            *d = 0;
        }
        false
    }

    fn at_height(&self) -> bool {
        (0..self.m).any(|i| self.digits[i * (self.r + 1) + self.r] != 0)
    }

    fn current(&self) -> PolyVec {
        PolyVec(
            (0..self.m)
                .map(|i| {
                    let coeffs = &self.digits[i * (self.r + 1)..(i + 1) * (self.r + 1)];
                    Poly::new(coeffs.iter().map(|&c| self.f.elem(c).expect("digit below k")).collect())
                })
                .collect(),
        )
    }
}

impl Iterator for VectorShell<'_> {
    type Item = PolyVec;

    fn next(&mut self) -> Option<PolyVec> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                return None;
            }
            if self.at_height() {
                return Some(self.current());
            }
        }
        None
    }
}

/// Stream of all vectors of height exactly `k^r`.
pub fn iter_vectors(r: usize, m: usize, f: &FieldSpec) -> VectorShell<'_> {
    assert!(m >= 1, "vectors need at least one coordinate");
    VectorShell { f, r, m, digits: vec![0; m * (r + 1)], done: false }
}

/// Number of vectors of height `k^r` under the chosen variant.
pub fn count_height(r: u32, m: usize, f: &FieldSpec, variant: CountVariant) -> BigUint {
    let k = BigUint::from(f.k());
    let m32 = m as u32;
    match variant {
        CountVariant::PaperFormula => {
            BigUint::from(m) * BigUint::from(f.k() - 1) * k.pow(m32 - 1 + r * m32)
        }
        CountVariant::ExactEnumeration => k.pow(r * m32) * (k.pow(m32) - 1u32),
    }
}

/// `Φ(Q) = Σ_{r ≤ Q} count_height(r) · ψ(k^r)^n`, exact.
pub fn phi(q_max: u32, psi: &Psi, dims: Dims, f: &FieldSpec, variant: CountVariant) -> Result<ExactRational> {
    Ok(phi_series(q_max, psi, dims, f, variant)?.pop().expect("q_max + 1 terms"))
}

/// `Φ(0), …, Φ(q_max)`.
pub fn phi_series(
    q_max: u32,
    psi: &Psi,
    dims: Dims,
    f: &FieldSpec,
    variant: CountVariant,
) -> Result<Vec<ExactRational>> {
    let mut acc = ExactRational::zero();
    let mut out = Vec::with_capacity(q_max as usize + 1);
    for r in 0..=q_max {
        let s = psi.eval(r)? as u64;
        let count = ExactRational::from_integer(count_height(r, dims.m, f, variant));
        acc = acc + count * ExactRational::inv_power(f.k(), s * dims.n as u64);
        out.push(acc.clone());
    }
    Ok(out)
}

/// `d(q)`: number of monic common divisors of the coordinates of `q`.
pub fn d_of(q: &PolyVec, f: &FieldSpec) -> Result<u64> {
    crate::algebra::monic_divisor_count(&q.gcd(f)?, f)
}

/// `τ(q) = ψ(‖q‖∞)^n · d(q)`.
pub fn tau(q: &PolyVec, psi: &Psi, n: usize, f: &FieldSpec) -> Result<ExactRational> {
    let r = q.height_exp().ok_or(Error::ZeroVector)?;
    let s = psi.eval(r as u32)? as u64;
    Ok(ExactRational::from_integer(d_of(q, f)?) * ExactRational::inv_power(f.k(), s * n as u64))
}

/// `Σ d(q)` over the shell `‖q‖∞ = k^r`.
fn shell_divisor_sum(r: usize, m: usize, f: &FieldSpec, counter: &mut crate::algebra::DivisorCounter) -> Result<u64> {
    let mut total = 0;
    for q in iter_vectors(r, m, f) {
        total += counter.count(&q.gcd(f)?, f)?;
    }
    Ok(total)
}

/// `T(0), …, T(q_max)` by enumeration, where `T(Q) = Σ_{‖q‖∞ ≤ k^Q} τ(q)`.
pub fn big_t_series(
    q_max: u32,
    psi: &Psi,
    dims: Dims,
    f: &FieldSpec,
    budget: u128,
) -> Result<Vec<ExactRational>> {
    check_budget(f.k(), dims.m as u64 * (q_max as u64 + 1), budget)?;
    let mut counter = crate::algebra::DivisorCounter::new();
    let mut acc = ExactRational::zero();
    let mut out = Vec::with_capacity(q_max as usize + 1);
    for r in 0..=q_max {
        let s = psi.eval(r)? as u64;
        let sum = shell_divisor_sum(r as usize, dims.m, f, &mut counter)?;
        acc = acc + ExactRational::from_integer(sum) * ExactRational::inv_power(f.k(), s * dims.n as u64);
        out.push(acc.clone());
    }
    Ok(out)
}

/// `T(Q)` with the default enumeration budget.
pub fn big_t(q_max: u32, psi: &Psi, dims: Dims, f: &FieldSpec) -> Result<ExactRational> {
    Ok(big_t_series(q_max, psi, dims, f, DEFAULT_COUNT_BUDGET)?.pop().expect("q_max + 1 terms"))
}

/// One line of the height-count comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountsRow {
    pub r: u32,
    pub exact_count: String,
    pub paper_count: String,
    /// Closed-form count over exact count, in lowest terms.
    pub ratio_num: String,
    pub ratio_den: String,
}

pub fn counts_table(q_max: u32, m: usize, f: &FieldSpec) -> Vec<CountsRow> {
    (0..=q_max)
        .map(|r| {
            let exact = count_height(r, m, f, CountVariant::ExactEnumeration);
            let paper = count_height(r, m, f, CountVariant::PaperFormula);
            let ratio = ExactRational::new(paper.clone(), exact.clone());
            CountsRow {
                r,
                exact_count: exact.to_string(),
                paper_count: paper.to_string(),
                ratio_num: ratio.numer().to_string(),
                ratio_den: ratio.denom().to_string(),
            }
        })
        .collect()
}

/// Writes `counts.csv` rows under the header `r,exact_count,paper_count,ratio_num,ratio_den`.
/// `preamble` lines are emitted first, each prefixed with `# `.
pub fn write_counts_csv<W: Write>(out: &mut W, preamble: &[String], rows: &[CountsRow]) -> io::Result<()> {
    for line in preamble {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "r,exact_count,paper_count,ratio_num,ratio_den")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.r, row.exact_count, row.paper_count, row.ratio_num, row.ratio_den
        )?;
    }
    Ok(())
}

/// All nonzero scalar multiples of `q`.
pub fn scalar_orbit(q: &PolyVec, f: &FieldSpec) -> Vec<PolyVec> {
    f.nonzero_elements().map(|c: FieldElem| q.scale(c, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn iter_examples() {
        let f = f2();
        let got: Vec<_> = iter_vectors(1, 1, &f).collect();
        assert_eq!(got, vec![
            PolyVec(vec![Poly::from_ints(&f, &[0, 1])]),
            PolyVec(vec![Poly::from_ints(&f, &[1, 1])]),
        ]);
        let got: Vec<_> = iter_vectors(0, 2, &f).collect();
        assert_eq!(got, vec![
            PolyVec(vec![Poly::one(), Poly::zero()]),
            PolyVec(vec![Poly::zero(), Poly::one()]),
            PolyVec(vec![Poly::one(), Poly::one()]),
        ]);
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(iter_vectors(0, 1, &f3).count(), 2);
    }

    #[test]
    fn count_height_examples() {
        let f = f2();
        let c = |r, m, v| count_height(r, m, &f, v);
        assert_eq!(c(0, 2, CountVariant::PaperFormula), BigUint::from(4u32));
        assert_eq!(c(0, 2, CountVariant::ExactEnumeration), BigUint::from(3u32));
        assert_eq!(c(1, 2, CountVariant::ExactEnumeration), BigUint::from(12u32));
        assert_eq!(c(1, 2, CountVariant::PaperFormula), BigUint::from(16u32));
        assert_eq!(c(2, 1, CountVariant::ExactEnumeration), BigUint::from(4u32));
        assert_eq!(c(2, 1, CountVariant::PaperFormula), BigUint::from(4u32));
    }

    #[test]
    fn phi_examples() {
        let f = f2();
        let dims = Dims::new(2, 1).unwrap();
        let psi = Psi::linear_allowing_unit(2, 0).unwrap();
        assert_eq!(phi(3, &psi, dims, &f, CountVariant::PaperFormula).unwrap(), ExactRational::from_integer(16));
        assert_eq!(phi(3, &psi, dims, &f, CountVariant::ExactEnumeration).unwrap(), ExactRational::from_integer(12));
        let psi = Psi::linear(1, 1).unwrap();
        assert_eq!(phi(1, &psi, dims, &f, CountVariant::ExactEnumeration).unwrap(), ExactRational::new(9, 2));
    }

    #[test]
    fn d_and_tau_examples() {
        let f = f2();
        let x = Poly::from_ints(&f, &[0, 1]);
        let xx1 = Poly::from_ints(&f, &[0, 1, 1]);
        assert_eq!(d_of(&PolyVec(vec![x.clone(), x.clone()]), &f).unwrap(), 2);
        assert_eq!(d_of(&PolyVec(vec![Poly::one(), xx1.clone()]), &f).unwrap(), 1);
        assert_eq!(d_of(&PolyVec(vec![xx1.clone(), xx1.clone()]), &f).unwrap(), 4);
        assert_eq!(d_of(&PolyVec::zero(2), &f), Err(Error::ZeroVector));

        let psi = Psi::linear(1, 1).unwrap();
        assert_eq!(tau(&PolyVec(vec![x.clone(), x]), &psi, 1, &f).unwrap(), ExactRational::new(1, 2));
        assert_eq!(tau(&PolyVec(vec![Poly::one(), Poly::zero()]), &psi, 1, &f).unwrap(), ExactRational::new(1, 2));
        let psi2 = Psi::table(vec![2]).unwrap();
        assert_eq!(tau(&PolyVec(vec![Poly::one(), Poly::one()]), &psi2, 2, &f).unwrap(), ExactRational::new(1, 16));
    }

    #[test]
    fn big_t_examples() {
        let f = f2();
        let dims = Dims::new(2, 1).unwrap();
        let psi = Psi::linear(1, 1).unwrap();
        assert_eq!(big_t(0, &psi, dims, &f).unwrap(), ExactRational::new(3, 2));

        // Independent slow loop over every vector of height at most 2.
        let mut slow = ExactRational::zero();
        for r in 0..=1 {
            for q in iter_vectors(r, 2, &f) {
                slow = slow + tau(&q, &psi, 1, &f).unwrap();
            }
        }
        assert_eq!(big_t(1, &psi, dims, &f).unwrap(), slow);

        let f3 = FieldSpec::prime(3).unwrap();
        let psi = Psi::linear(0, 2).unwrap();
        let dims = Dims::new(3, 2).unwrap();
        let expected = ExactRational::from_integer(count_height(0, 3, &f3, CountVariant::ExactEnumeration))
            * ExactRational::inv_power(3, 4);
        assert_eq!(big_t(0, &psi, dims, &f3).unwrap(), expected);
    }

    #[test]
    fn counts_csv_layout() {
        let f = f2();
        let rows = counts_table(1, 2, &f);
        let mut buf = Vec::new();
        write_counts_csv(&mut buf, &["p=2".to_string()], &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# p=2\nr,exact_count,paper_count,ratio_num,ratio_den\n0,3,4,4,3\n1,12,16,4,3\n"
        );
    }
}
