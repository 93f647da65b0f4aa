//! Dense polynomials over `Z_{p^n}` and the search for basic primitive moduli.
//!
//! Residues are kept in `[0, p^n)` as `u64`. The ring size cap keeps `p^n`
//! far below 2^32, so products of two residues never overflow.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_factors};
use crate::error::{Error, Result};

/// Monic polynomial with coefficients in `Z_{p^n}`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<u64>,
}

impl Polynomial {
    /// Wraps `coeffs` (constant term first). The last entry must be 1.
    pub fn new(coeffs: Vec<u64>) -> Result<Self> {
        match coeffs.last() {
            Some(1) if coeffs.len() >= 2 => Ok(Self { coeffs }),
            _ => Err(Error::InvalidModulus(format!(
                "modulus {coeffs:?} is not monic of positive degree"
            ))),
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients reduced modulo `m`; stays monic.
    pub fn reduce_mod(&self, m: u64) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c % m).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Reduces `a` (any length) modulo the monic `h`, returning `deg h` coefficients.
pub(crate) fn rem_monic(a: &[u64], h: &[u64], m: u64) -> Vec<u64> {
    let s = h.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|c| c % m).collect();
    if r.len() < s {
        r.resize(s, 0);
        return r;
    }
    for top in (s..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        r[top] = 0;
        for i in 0..s {
            let sub = c * h[i] % m;
            let idx = top - s + i;
            r[idx] = (r[idx] + m - sub) % m;
        }
    }
    r.truncate(s);
    r
}

/// Product of two residues of degree `< deg h`, reduced modulo `h`.
pub(crate) fn mul_mod(a: &[u64], b: &[u64], h: &[u64], m: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % m;
        }
    }
    rem_monic(&prod, h, m)
}

pub(crate) fn pow_mod_poly(base: &[u64], mut exp: u128, h: &[u64], m: u64) -> Vec<u64> {
    let s = h.len() - 1;
    let mut result = vec![0u64; s];
    result[0] = 1 % m;
    let mut b = rem_monic(base, h, m);
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(&result, &b, h, m);
        }
        b = mul_mod(&b, &b, h, m);
        exp >>= 1;
    }
    result
}

fn x_residue(s: usize, h: &[u64], m: u64) -> Vec<u64> {
    rem_monic(&[0, 1], h, m)
        .into_iter()
        .chain(std::iter::repeat(0))
        .take(s)
        .collect()
}

fn is_one(r: &[u64]) -> bool {
    r[0] == 1 && r[1..].iter().all(|&c| c == 0)
}

/// True when the class of `x` has multiplicative order exactly `q - 1` in
/// `F_p[x]/(f)`, which forces `f` to be irreducible as well.
pub fn is_primitive_mod_p(f: &[u64], p: u64) -> bool {
    let s = f.len() - 1;
    if f[0] % p == 0 {
        return false;
    }
    let q = (p as u128).pow(s as u32);
    let order = q - 1;
    let x = x_residue(s, f, p);
    if !is_one(&pow_mod_poly(&x, order, f, p)) {
        return false;
    }
    prime_factors(order as u64)
        .into_iter()
        .all(|r| !is_one(&pow_mod_poly(&x, order / r as u128, f, p)))
}

/// True when `h` divides `x^{q-1} - 1` over `Z_m` (exact division check).
pub fn divides_x_pow_minus_one(h: &[u64], q: u64, m: u64) -> bool {
    let s = h.len() - 1;
    let x = x_residue(s, h, m);
    is_one(&pow_mod_poly(&x, (q - 1) as u128, h, m))
}

/// Smallest primitive polynomial of degree `s` over `F_p`, ordered by the
/// integer whose base-`p` digits are the non-leading coefficients.
pub fn smallest_primitive_mod_p(p: u64, s: usize) -> Vec<u64> {
    let count = p.pow(s as u32);
    for v in 0..count {
        let mut coeffs = Vec::with_capacity(s + 1);
        let mut t = v;
        for _ in 0..s {
            coeffs.push(t % p);
            t /= p;
        }
        coeffs.push(1);
        if is_primitive_mod_p(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("a primitive polynomial of every degree exists over F_p")
}

/// Monic basic primitive polynomial of degree `s` over `Z_{p^n}` dividing
/// `x^{q-1} - 1`.
///
/// The reduction mod `p` is the smallest primitive polynomial over `F_p`;
/// the lift is the unique monic factor of `x^{q-1} - 1` above it, obtained
/// as the product of `X - y^{p^j}` where `y` is the Teichmüller lift of the
/// class of `x`. For `s = 1` this is `x - g` with `g` the Teichmüller lift of
/// the smallest primitive root mod `p`.
pub fn find_basic_primitive_poly(p: u64, n: u32, s: usize) -> Result<Polynomial> {
    if !is_prime(p) {
        return Err(Error::InvalidParams(format!("p must be prime (got {p})")));
    }
    if n == 0 || s == 0 {
        return Err(Error::InvalidParams("n and s must be at least 1".into()));
    }
    let m = p.pow(n);
    let q = p.pow(s as u32);
    let f = smallest_primitive_mod_p(p, s);

    // Teichmüller lift of x in Z_{p^n}[x]/(f): y = x^{q^{n-1}}.
    let tq = (q as u128).pow(n - 1);
    let x = x_residue(s, &f, m);
    let y = pow_mod_poly(&x, tq, &f, m);

    // h(X) = prod_j (X - y^{p^j}), coefficients in Z_{p^n}[x]/(f).
    let mut h: Vec<Vec<u64>> = vec![one(s, m)];
    let mut root = y.clone();
    for _ in 0..s {
        let neg_root: Vec<u64> = root.iter().map(|&c| (m - c) % m).collect();
        let mut next = vec![vec![0u64; s]; h.len() + 1];
        for (i, c) in h.iter().enumerate() {
            add_assign(&mut next[i + 1], c, m);
            let t = mul_mod(c, &neg_root, &f, m);
            add_assign(&mut next[i], &t, m);
        }
        h = next;
        root = pow_mod_poly(&root, p as u128, &f, m);
    }
    let mut coeffs = Vec::with_capacity(s + 1);
    for c in &h {
        if c[1..].iter().any(|&v| v != 0) {
            return Err(Error::InvalidModulus(
                "Teichmüller conjugate product left the base ring".into(),
            ));
        }
        coeffs.push(c[0]);
    }
    let poly = Polynomial::new(coeffs)?;
    debug_assert!(divides_x_pow_minus_one(poly.coeffs(), q, m));
    Ok(poly)
}

fn one(s: usize, m: u64) -> Vec<u64> {
    let mut v = vec![0u64; s];
    v[0] = 1 % m;
    v
}

fn add_assign(acc: &mut [u64], other: &[u64], m: u64) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a = (*a + b) % m;
    }
}

/// Plain product of two coefficient vectors over `Z_m` (no reduction by a modulus).
pub fn poly_mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % m;
        }
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gr_4_16_modulus() {
        let h = find_basic_primitive_poly(2, 2, 2).unwrap();
        assert_eq!(h.coeffs(), &[1, 1, 1]);
        // (x - 1)(x^2 + x + 1) = x^3 - 1 over Z_4.
        let prod = poly_mul(&[3, 1], h.coeffs(), 4);
        assert_eq!(prod, vec![3, 0, 0, 1]);
    }

    #[test]
    fn z9_modulus_is_x_minus_teichmuller_generator() {
        let h = find_basic_primitive_poly(3, 2, 1).unwrap();
        // x - 8 == x + 1 over Z_9; 8^2 = 64 = 1 mod 9 and 8 != 1.
        assert_eq!(h.coeffs(), &[1, 1]);
        assert_eq!(8u64 * 8 % 9, 1);
    }

    #[test]
    fn f2_degree3_primitive() {
        let h = find_basic_primitive_poly(2, 1, 3).unwrap();
        assert_eq!(h.coeffs(), &[1, 1, 0, 1]);
        // brute force: powers of x in F_2[x]/(x^3+x+1) hit all 7 units
        let mut seen = std::collections::HashSet::new();
        let mut cur = vec![1, 0, 0];
        for _ in 0..7 {
            seen.insert(cur.clone());
            cur = mul_mod(&cur, &[0, 1, 0], h.coeffs(), 2);
        }
        assert_eq!(seen.len(), 7);
        assert_eq!(cur, vec![1, 0, 0]);
    }

    #[test]
    fn lifts_divide_x_pow_minus_one() {
        for &(p, n, s) in &[(2u64, 3u32, 2usize), (3, 2, 2), (2, 2, 3), (5, 2, 2), (3, 3, 1)] {
            let h = find_basic_primitive_poly(p, n, s).unwrap();
            let q = p.pow(s as u32);
            assert!(divides_x_pow_minus_one(h.coeffs(), q, p.pow(n)));
            assert!(is_primitive_mod_p(h.reduce_mod(p).coeffs(), p));
        }
    }

    #[test]
    fn reducible_is_not_primitive() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(!is_primitive_mod_p(&[1, 0, 1], 2));
        // x^2 + 1 irreducible over F_3 but x has order 4, not 8
        assert!(!is_primitive_mod_p(&[1, 0, 1], 3));
    }

    #[test]
    fn display() {
        let h = Polynomial::new(vec![3, 0, 2, 1]).unwrap();
        assert_eq!(h.to_string(), "x^3 + 2x^2 + 3");
    }
}
