use std::fmt;

use crate::error::{Error, Result};

/// An element of a finite field, stored as the integer `Σ c_b p^b` of its
/// residue vector `(c_0, …, c_{l-1})` in the polynomial basis `1, Y, …, Y^{l-1}`.
///
/// The encoding makes `0` the additive and `1` the multiplicative identity.
/// Arithmetic goes through the owning [`FieldSpec`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The finite field of `k = p^l` elements.
///
/// For `l > 1` the field is `GF(p)[Y] / (modulus)`. Addition, multiplication,
/// negation and inversion are tabulated at construction, so the order is
/// capped at 256.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    l: u32,
    k: u32,
    modulus: Option<Vec<u32>>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("l", &self.l)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.l == other.l && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

const MAX_ORDER: u64 = 256;

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over Z/p, low-to-high, used only while building the tables.
fn zp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim_zp(&mut r);
    let db = b.len() - 1;
    let lead_inv = zp_inv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = (r[r.len() - 1] * lead_inv) % p;
        for (i, &bi) in b.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - (c * bi) % p) % p;
        }
        trim_zp(&mut r);
    }
    r
}

fn trim_zp(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn zp_inv(x: u32, p: u32) -> u32 {
    (1..p).find(|&y| (x * y) % p == 1).expect("nonzero residue mod a prime is invertible")
}

fn digits(mut v: u32, p: u32, l: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(l as usize);
    for _ in 0..l {
        out.push(v % p);
        v /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Irreducibility over Z/p by trial division against every monic polynomial
/// of degree `1..=deg/2`.
pub(crate) fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut cand = digits(low as u32, p, d as u32);
            cand.push(1);
            if zp_rem(modulus, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible of degree `l` over Z/p whose lower coefficients,
/// read as base-`p` digits (constant term least significant), are smallest.
///
/// For `p = 2` this yields `Y^2+Y+1`, `Y^3+Y+1` and `Y^4+Y+1`.
pub fn default_modulus(p: u32, l: u32) -> Result<Vec<u32>> {
    if !(2..=4).contains(&l) {
        return Err(Error::NoDefaultModulus(l));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let count = (p as u64).pow(l);
    if count > MAX_ORDER {
        return Err(Error::FieldTooLarge(count));
    }
    for low in 0..count {
        let mut cand = digits(low as u32, p, l);
        cand.push(1);
        if is_irreducible(&cand, p) {
            return Ok(cand);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// GF(p^l). `modulus` lists the residues of a monic degree-`l` polynomial
    /// low-to-high; when absent and `l > 1`, [`default_modulus`] is used.
    pub fn new(p: u32, l: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if l == 0 {
            return Err(Error::BadModulus("extension degree must be at least 1".into()));
        }
        let k = (p as u64).checked_pow(l).unwrap_or(u64::MAX);
        if k > MAX_ORDER {
            return Err(Error::FieldTooLarge(k));
        }
        let k = k as u32;
        let modulus = if l == 1 {
            if modulus.as_ref().is_some_and(|m| m.len() > 2) {
                return Err(Error::BadModulus("prime fields take no modulus of degree > 1".into()));
            }
            None
        } else {
            let m = match modulus {
                Some(m) => m,
                None => default_modulus(p, l)?,
            };
            if m.len() != l as usize + 1 {
                return Err(Error::BadModulus(format!(
                    "expected {} coefficients, got {}",
                    l + 1,
                    m.len()
                )));
            }
            if let Some(&bad) = m.iter().find(|&&c| c >= p) {
                return Err(Error::ResidueOutOfRange { value: bad, p });
            }
            if m[l as usize] != 1 {
                return Err(Error::BadModulus("modulus must be monic".into()));
            }
            if !is_irreducible(&m, p) {
                return Err(Error::ReducibleModulus(p));
            }
            Some(m)
        };

        let ku = k as usize;
        let mut add = vec![0u8; ku * ku];
        let mut mul = vec![0u8; ku * ku];
        let mut neg = vec![0u8; ku];
        let elems: Vec<Vec<u32>> = (0..k).map(|v| digits(v, p, l)).collect();
        for a in 0..ku {
            let ea = &elems[a];
            neg[a] = undigits(&ea.iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p) as u8;
            for b in 0..ku {
                let eb = &elems[b];
                let sum: Vec<u32> = ea.iter().zip(eb).map(|(&x, &y)| (x + y) % p).collect();
                add[a * ku + b] = undigits(&sum, p) as u8;

                let mut prod = vec![0u32; 2 * l as usize - 1];
                for (i, &x) in ea.iter().enumerate() {
                    for (j, &y) in eb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let reduced = match &modulus {
                    Some(m) => zp_rem(&prod, m, p),
                    None => {
                        let mut v = prod;
                        trim_zp(&mut v);
                        v
                    }
                };
                let mut padded = reduced;
                padded.resize(l as usize, 0);
                mul[a * ku + b] = undigits(&padded, p) as u8;
            }
        }
        let mut inv = vec![0u8; ku];
        for a in 1..ku {
            let b = (1..ku)
                .find(|&b| mul[a * ku + b] == 1)
                .expect("a field has no zero divisors");
            inv[a] = b as u8;
        }
        Ok(FieldSpec { p, l, k, modulus, add, mul, neg, inv })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn l(&self) -> u32 {
        self.l
    }

    /// Field order `p^l`.
    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    /// All elements in index order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.k).map(|v| FieldElem(v as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (1..self.k).map(|v| FieldElem(v as u8))
    }

    /// Element with the given index `Σ c_b p^b`.
    pub fn elem(&self, index: u32) -> Result<FieldElem> {
        if index >= self.k {
            return Err(Error::ResidueOutOfRange { value: index, p: self.k });
        }
        Ok(FieldElem(index as u8))
    }

    /// Image of an integer under `Z → GF(p) ⊂ F`.
    pub fn from_int(&self, v: u64) -> FieldElem {
        FieldElem((v % self.p as u64) as u8)
    }

    pub fn from_residues(&self, residues: &[u32]) -> Result<FieldElem> {
        if residues.len() != self.l as usize {
            return Err(Error::Parse(format!(
                "expected {} residues per element, got {}",
                self.l,
                residues.len()
            )));
        }
        if let Some(&bad) = residues.iter().find(|&&c| c >= self.p) {
            return Err(Error::ResidueOutOfRange { value: bad, p: self.p });
        }
        Ok(FieldElem(undigits(residues, self.p) as u8))
    }

    /// Residues of `x` in the polynomial basis, low-to-high; always `l` long.
    pub fn residues(&self, x: FieldElem) -> Vec<u32> {
        digits(x.0 as u32, self.p, self.l)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.index() * self.k as usize + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[a.index() * self.k as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.index()])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(FieldElem(self.inv[a.index()]))
    }

    /// Formats an element as its residues joined by `_` (a bare residue when `l = 1`).
    pub fn format_elem(&self, x: FieldElem) -> String {
        self.residues(x)
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("_")
    }

    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let residues = s
            .trim()
            .split('_')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad residue {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.l > 1 && residues.len() == 1 && residues[0] < self.p {
            // A bare residue names an element of the prime subfield.
            return Ok(FieldElem(residues[0] as u8));
        }
        self.from_residues(&residues)
    }
}

/// Multiplicative inverse in `f`.
pub fn field_inv(x: FieldElem, f: &FieldSpec) -> Result<FieldElem> {
    f.inv(x)
}
