use std::collections::HashMap;

use num_bigint::BigUint;

use super::field::{FieldElem, FieldSpec};
use crate::error::{Error, Result};

/// A polynomial in `F[X]`, coefficients low-to-high.
///
/// Always canonical: the zero polynomial has no coefficients and otherwise the
/// leading coefficient is nonzero, so structural equality is equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![FieldElem::ONE] }
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::new(vec![c])
    }

    /// `c · X^e`.
    pub fn monomial(c: FieldElem, e: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![FieldElem::ZERO; e + 1];
        coeffs[e] = c;
        Poly { coeffs }
    }

    /// Builds a polynomial over GF(p) from integer coefficients, low-to-high.
    pub fn from_ints(f: &FieldSpec, coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| f.from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<FieldElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElem::ONE)
    }

    /// `‖q‖ = k^deg q`, and `‖0‖ = 0`.
    pub fn abs(&self, f: &FieldSpec) -> BigUint {
        match self.degree() {
            None => BigUint::from(0u32),
            Some(d) => BigUint::from(f.k()).pow(d as u32),
        }
    }

    pub fn add(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, f: &FieldSpec) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn mul(&self, other: &Poly, f: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    /// Euclidean division: `self = quot · divisor + rem` with `deg rem < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly, f: &FieldSpec) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead_inv = f.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![FieldElem::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = f.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            let shift = top - dd;
            quot[shift] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, b));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn divides(&self, other: &Poly, f: &FieldSpec) -> Result<bool> {
        Ok(other.div_rem(self, f)?.1.is_zero())
    }

    /// The monic associate; zero stays zero.
    pub fn monic(&self, f: &FieldSpec) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(c) => self.scale(f.inv(c).expect("leading coefficient is nonzero"), f),
        }
    }

    /// Coefficients low-to-high, comma separated; `"0"` for the zero polynomial.
    pub fn format(&self, f: &FieldSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|&c| f.format_elem(c))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(s: &str, f: &FieldSpec) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Poly::zero());
        }
        let coeffs = s
            .split(',')
            .map(|t| f.parse_elem(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }
}

/// `‖q‖ = k^deg q` (zero for the zero polynomial).
pub fn poly_abs(q: &Poly, f: &FieldSpec) -> BigUint {
    q.abs(f)
}

/// Monic greatest common divisor.
pub fn poly_gcd(a: &Poly, b: &Poly, f: &FieldSpec) -> Result<Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.div_rem(&y, f)?.1;
        x = y;
        y = r;
    }
    Ok(x.monic(f))
}

/// Every monic polynomial of exactly degree `d`, lower coefficients counted
/// in base `k` with the constant term least significant.
pub fn monic_of_degree(d: usize, f: &FieldSpec) -> impl Iterator<Item = Poly> + '_ {
    let k = f.k() as u64;
    let count = k.pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(f.elem((idx % k) as u32).expect("digit below k"));
            idx /= k;
        }
        coeffs.push(FieldElem::ONE);
        Poly::new(coeffs)
    })
}

/// Number of monic `h` with `h | g`, by trial division over every monic
/// polynomial of degree at most `deg g`.
pub fn monic_divisor_count(g: &Poly, f: &FieldSpec) -> Result<u64> {
    let deg = g.degree().ok_or(Error::ZeroPolynomial)?;
    let mut count = 0;
    for d in 0..=deg {
        for h in monic_of_degree(d, f) {
            if h.divides(g, f)? {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Memoizes [`monic_divisor_count`] by monic gcd.
#[derive(Default)]
pub struct DivisorCounter {
    cache: HashMap<Poly, u64>,
}

impl DivisorCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&mut self, g: &Poly, f: &FieldSpec) -> Result<u64> {
        let g = g.monic(f);
        if let Some(&c) = self.cache.get(&g) {
            return Ok(c);
        }
        let c = monic_divisor_count(&g, f)?;
        self.cache.insert(g, c);
        Ok(c)
    }
}

/// A vector `q = (q_1, …, q_m)` in `F[X]^m`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyVec(pub Vec<Poly>);

impl PolyVec {
    pub fn new(components: Vec<Poly>) -> Self {
        PolyVec(components)
    }

    pub fn zero(m: usize) -> Self {
        PolyVec(vec![Poly::zero(); m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Poly::is_zero)
    }

    /// `log_k ‖q‖∞`, i.e. the largest component degree; `None` for the zero vector.
    pub fn height_exp(&self) -> Option<usize> {
        self.0.iter().filter_map(Poly::degree).max()
    }

    /// `‖q‖∞ = max ‖q_i‖`.
    pub fn height(&self, f: &FieldSpec) -> BigUint {
        match self.height_exp() {
            None => BigUint::from(0u32),
            Some(r) => BigUint::from(f.k()).pow(r as u32),
        }
    }

    pub fn add(&self, other: &PolyVec, f: &FieldSpec) -> PolyVec {
        PolyVec(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b, f)).collect())
    }

    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> PolyVec {
        PolyVec(self.0.iter().map(|a| a.scale(c, f)).collect())
    }

    pub fn mul_poly(&self, g: &Poly, f: &FieldSpec) -> PolyVec {
        PolyVec(self.0.iter().map(|a| a.mul(g, f)).collect())
    }

    /// Monic gcd of all coordinates.
    pub fn gcd(&self, f: &FieldSpec) -> Result<Poly> {
        let mut acc = Poly::zero();
        for q in &self.0 {
            if q.is_zero() {
                continue;
            }
            acc = if acc.is_zero() { q.monic(f) } else { poly_gcd(&acc, q, f)? };
        }
        if acc.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(acc)
    }

    /// Components joined by `;`, each in [`Poly::format`] syntax.
    pub fn format(&self, f: &FieldSpec) -> String {
        self.0.iter().map(|q| q.format(f)).collect::<Vec<_>>().join(";")
    }

    pub fn parse(s: &str, f: &FieldSpec) -> Result<PolyVec> {
        Ok(PolyVec(s.split(';').map(|t| Poly::parse(t, f)).collect::<Result<Vec<_>>>()?))
    }
}

/// `‖q‖∞`, the largest component absolute value.
pub fn inf_norm_polyvec(q: &PolyVec, f: &FieldSpec) -> BigUint {
    q.height(f)
}
