//! Incremental enumeration behind [`crate::approx::shell_counts`].
//!
//! `⟨qA⟩` is linear in the coefficients of `q`. Coefficient positions are
//! numbered `P = e·m + i` (degree-major), so the top nonzero position of `q`
//! fixes its height `k^{P / m}`. For every top position and top coefficient
//! the lower coefficients are walked in a `p`-ary Gray code over their
//! `GF(p)` digits; each step adds one precomputed generator to the running
//! fractional part, and membership reads off a prefix of it.

use crate::algebra::{FieldElem, FieldSpec};
use crate::laurent::FracMatrix;

/// Per-position data: the first `depth` fractional coefficients of
/// `⟨c · X^e · row_i(A)⟩` for each column, flattened `(column, depth, digit)`.
struct Layout {
    m: usize,
    n: usize,
    l: usize,
    depth: usize,
}

impl Layout {
    fn width(&self) -> usize {
        self.n * self.depth * self.l
    }

    fn index(&self, col: usize, d: usize, b: usize) -> usize {
        (col * self.depth + d) * self.l + b
    }

    /// Digits of `c · X^e · A[i][·]` for position `P = e·m + i`.
    fn position_digits(&self, a: &FracMatrix, f: &FieldSpec, pos: usize, c: FieldElem) -> Vec<u8> {
        let (e, i) = (pos / self.m, pos % self.m);
        let mut out = vec![0u8; self.width()];
        for col in 0..self.n {
            let entry = a.get(i, col);
            for d in 0..self.depth {
                let v = f.mul(c, entry.coeff(e + d + 1));
                for (b, r) in f.residues(v).into_iter().enumerate() {
                    out[self.index(col, d, b)] = r as u8;
                }
            }
        }
        out
    }

    /// Generator for digit `b` of position `P`: the contribution of `Y^b`.
    fn generators(&self, a: &FracMatrix, f: &FieldSpec, positions: usize) -> Vec<Vec<u8>> {
        let mut gens = Vec::with_capacity(positions * self.l);
        for pos in 0..positions {
            let mut y_pow = FieldElem::ONE;
            for b in 0..self.l {
                if b > 0 {
                    y_pow = f.elem(f.p().pow(b as u32)).expect("basis element");
                }
                gens.push(self.position_digits(a, f, pos, y_pow));
            }
        }
        gens
    }
}

fn pack(digits: &[u8]) -> u128 {
    digits
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, &d)| acc | ((d as u128 & 1) << i))
}

pub(crate) fn shell_counts(a: &FracMatrix, s: &[u32], f: &FieldSpec, orbit: bool) -> Vec<u64> {
    let q_max = s.len() - 1;
    let layout = Layout { m: a.m(), n: a.n(), l: f.l() as usize, depth: s[q_max] as usize };
    let positions = layout.m * (q_max + 1);
    let gens = layout.generators(a, f, positions);
    let tops: Vec<FieldElem> =
        if orbit { vec![FieldElem::ONE] } else { f.nonzero_elements().collect() };
    let multiplier = if orbit { f.k() as u64 - 1 } else { 1 };

    let mut counts = vec![0u64; q_max + 1];
    if f.p() == 2 && layout.width() <= 128 {
        let packed: Vec<u128> = gens.iter().map(|g| pack(g)).collect();
        for (r, count) in counts.iter_mut().enumerate() {
            let mut mask = 0u128;
            for col in 0..layout.n {
                for d in 0..s[r] as usize {
                    for b in 0..layout.l {
                        mask |= 1u128 << layout.index(col, d, b);
                    }
                }
            }
            for pos in r * layout.m..(r + 1) * layout.m {
                let lower = pos * layout.l;
                for &c in &tops {
                    let start = pack(&layout.position_digits(a, f, pos, c));
                    *count += multiplier * binary_gray_walk(start, &packed[..lower], mask);
                }
            }
        }
    } else {
        let p = f.p() as u8;
        for (r, count) in counts.iter_mut().enumerate() {
            let prefix = s[r] as usize * layout.l;
            for pos in r * layout.m..(r + 1) * layout.m {
                let lower = pos * layout.l;
                for &c in &tops {
                    let start = layout.position_digits(a, f, pos, c);
                    *count += multiplier
                        * modular_gray_walk(start, &gens[..lower], p, &layout, prefix);
                }
            }
        }
    }
    counts
}

/// Counts states `v` with `v & mask == 0` over all `2^gens.len()` XOR
/// combinations reachable from `start`.
fn binary_gray_walk(start: u128, gens: &[u128], mask: u128) -> u64 {
    let mut v = start;
    let mut hits = (v & mask == 0) as u64;
    let steps = 1u64 << gens.len();
    for ctr in 1..steps {
        v ^= gens[ctr.trailing_zeros() as usize];
        hits += (v & mask == 0) as u64;
    }
    hits
}

/// Same walk over `GF(p)` digits: the modular Gray code changes exactly one
/// digit by `+1` per step, adding the matching generator once.
fn modular_gray_walk(mut v: Vec<u8>, gens: &[Vec<u8>], p: u8, layout: &Layout, prefix: usize) -> u64 {
    let block = layout.depth * layout.l;
    let is_hit = |v: &[u8]| (0..layout.n).all(|col| v[col * block..col * block + prefix].iter().all(|&d| d == 0));
    let mut hits = is_hit(&v) as u64;
    let mut counter = vec![0u8; gens.len()];
    loop {
        let Some(j) = counter.iter().position(|&d| d != p - 1) else {
            break;
        };
        counter[..j].fill(0);
        counter[j] += 1;
        for (x, &g) in v.iter_mut().zip(&gens[j]) {
            *x = (*x + g) % p;
        }
        hits += is_hit(&v) as u64;
    }
    hits
}
