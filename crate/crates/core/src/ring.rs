//! Galois ring `GR(p^n, p^{ns}) = Z_{p^n}[x]/(h(x))` with exact arithmetic.
//!
//! Elements are coordinate vectors `(a_0, ..., a_{s-1})` over `Z_{p^n}` in
//! the basis `1, ξ, ..., ξ^{s-1}`. Every element also has an index in
//! `[0, q^n)`: the coordinate tuple read as a base-`p^n` number with `a_0`
//! most significant. Index order is the lexicographic order on coordinate
//! tuples, and every "for all x in R" loop in the crate walks it.
//!
//! For `s = 1` the modulus is `x - ξ` and the ring is `Z_{p^n}` itself, with
//! `ξ` the Teichmüller lift of the smallest primitive root mod `p`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, is_prime, prime_factors};
use crate::characters::{decompose_unit_group, UnitGroupBasis};
use crate::error::{Error, Result};
use crate::poly::{self, Polynomial};

/// Default cap on `q^n`.
pub const DEFAULT_ELEMENT_CAP: u64 = 1 << 20;

/// Rings at or below this size get a precomputed multiplication table.
const MUL_TABLE_LIMIT: usize = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingParams {
    pub p: u64,
    pub n: u32,
    pub s: u32,
}

impl RingParams {
    pub fn new(p: u64, n: u32, s: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p must be prime (got {p})")));
        }
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if s == 0 {
            return Err(Error::InvalidParams("s must be at least 1".into()));
        }
        Ok(Self { p, n, s })
    }

    /// `q = p^s`, the size of the residue field.
    pub fn q(&self) -> u64 {
        self.p.pow(self.s)
    }

    /// `p^n`, the characteristic.
    pub fn char_modulus(&self) -> u64 {
        self.p.pow(self.n)
    }

    /// `q^n` as an exact integer, `None` on overflow.
    pub fn element_count(&self) -> Option<u128> {
        checked_pow(self.p as u128, self.n.checked_mul(self.s)?)
    }
}

/// An element in polynomial-basis coordinates over `Z_{p^n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RingElement {
    coords: Vec<u64>,
}

impl RingElement {
    pub fn from_coords(coords: Vec<u64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

/// JSON description of a ring: parameters plus modulus coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDescription {
    pub p: u64,
    pub n: u32,
    pub s: u32,
    pub modulus: Vec<u64>,
}

/// Valuation of an element: `x = p^k u` with `u` a unit of `GR(p^{n-k}, ·)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    pub k: u32,
    /// Coordinates of `u` modulo `p^{n-k}`; all zero when `x = 0`.
    pub unit: RingElement,
}

/// Immutable context for one Galois ring.
#[derive(Clone, Debug)]
pub struct GaloisRing {
    params: RingParams,
    modulus: Polynomial,
    pn: u64,
    size: usize,
    one: usize,
    /// `ξ^j` as element indices for `j = 0..q-1`.
    xi_powers: Vec<usize>,
    /// Per element index: exponent `j` with `x = ξ^j`, or `u32::MAX`.
    dlog_t: Vec<u32>,
    /// `ξ^{ip}` for `i = 0..s`, images of the basis under Frobenius.
    frob_basis: Vec<Vec<u64>>,
    units: Vec<usize>,
    /// `principal[k]` lists `1 + p^k R` for `k = 1..=n` (index 0 unused).
    principal: Vec<Vec<usize>>,
    mul_table: Option<Vec<u32>>,
    unit_group: UnitGroupBasis,
    fingerprint: u64,
}

impl GaloisRing {
    /// Builds `GR(p^n, p^{ns})` with the deterministic modulus and default cap.
    pub fn new(p: u64, n: u32, s: u32) -> Result<Self> {
        Self::build(RingParams::new(p, n, s)?, None, DEFAULT_ELEMENT_CAP)
    }

    /// Builds the ring, searching for a modulus when `modulus` is `None`.
    /// All structural invariants are checked eagerly.
    pub fn build(params: RingParams, modulus: Option<Polynomial>, cap: u64) -> Result<Self> {
        let size128 = params.element_count().ok_or(Error::SizeLimit {
            size: u128::MAX,
            cap,
        })?;
        if size128 > cap as u128 {
            return Err(Error::SizeLimit { size: size128, cap });
        }
        let size = size128 as usize;
        let RingParams { p, n, s } = params;
        let s_us = s as usize;
        let pn = params.char_modulus();
        let q = params.q();

        let modulus = match modulus {
            Some(h) => {
                if h.degree() != s_us {
                    return Err(Error::InvalidModulus(format!(
                        "modulus has degree {}, expected {s}",
                        h.degree()
                    )));
                }
                let h = h.reduce_mod(pn);
                if h.coeffs()[s_us] != 1 {
                    return Err(Error::InvalidModulus("modulus is not monic".into()));
                }
                h
            }
            None => poly::find_basic_primitive_poly(p, n, s_us)?,
        };
        if !poly::divides_x_pow_minus_one(modulus.coeffs(), q, pn) {
            return Err(Error::InvalidModulus(format!(
                "{modulus} does not divide x^{} - 1 over Z_{pn}",
                q - 1
            )));
        }
        if !poly::is_primitive_mod_p(modulus.reduce_mod(p).coeffs(), p) {
            return Err(Error::InvalidModulus(format!(
                "{modulus} is not primitive modulo {p}"
            )));
        }

        let mut ring = GaloisRing {
            params,
            modulus,
            pn,
            size,
            one: 0,
            xi_powers: Vec::new(),
            dlog_t: Vec::new(),
            frob_basis: Vec::new(),
            units: Vec::new(),
            principal: Vec::new(),
            mul_table: None,
            unit_group: UnitGroupBasis::default(),
            fingerprint: 0,
        };
        let mut one = vec![0u64; s_us];
        one[0] = 1 % pn;
        ring.one = ring.index_of_coords(&one);

        if size <= MUL_TABLE_LIMIT {
            let mut table = vec![0u32; size * size];
            for a in 0..size {
                let ca = ring.coords_of(a);
                for b in a..size {
                    let cb = ring.coords_of(b);
                    let c = ring.index_of_coords(&poly::mul_mod(&ca, &cb, ring.modulus.coeffs(), pn));
                    table[a * size + b] = c as u32;
                    table[b * size + a] = c as u32;
                }
            }
            ring.mul_table = Some(table);
        }

        // ξ = x mod h; for s = 1 this is the constant root of x - ξ.
        let xi_coords = poly::rem_monic(&[0, 1], ring.modulus.coeffs(), pn);
        let xi = ring.index_of_coords(&xi_coords);
        let mut xi_powers = Vec::with_capacity(q as usize - 1);
        let mut cur = ring.one;
        for _ in 0..q - 1 {
            xi_powers.push(cur);
            cur = ring.mul_idx(cur, xi);
        }
        if cur != ring.one {
            return Err(Error::InvalidModulus("ξ^(q-1) != 1".into()));
        }
        for r in prime_factors(q - 1) {
            if xi_powers[((q - 1) / r) as usize] == ring.one {
                return Err(Error::InvalidModulus(format!(
                    "ξ has order dividing {}",
                    (q - 1) / r
                )));
            }
        }
        let mut dlog_t = vec![u32::MAX; size];
        for (j, &e) in xi_powers.iter().enumerate() {
            if dlog_t[e] != u32::MAX {
                return Err(Error::InvalidModulus("powers of ξ repeat".into()));
            }
            dlog_t[e] = j as u32;
        }
        ring.xi_powers = xi_powers;
        ring.dlog_t = dlog_t;

        ring.frob_basis = (0..s_us)
            .map(|i| ring.coords_of(ring.xi_powers[(i as u64 * p % (q - 1)) as usize]))
            .collect();

        ring.units = (0..size).filter(|&i| ring.is_unit_idx(i)).collect();
        ring.principal = (0..=n).map(|k| if k == 0 { Vec::new() } else { ring.enumerate_principal(k) }).collect();

        let mut hasher = DefaultHasher::new();
        params.hash(&mut hasher);
        ring.modulus.hash(&mut hasher);
        ring.fingerprint = hasher.finish();

        ring.check_teichmuller_set()?;
        let expected_units = size - size / q as usize;
        if ring.units.len() != expected_units {
            return Err(Error::InvalidModulus(format!(
                "found {} units, expected {expected_units}",
                ring.units.len()
            )));
        }
        ring.unit_group = decompose_unit_group(&ring);
        Ok(ring)
    }

    fn check_teichmuller_set(&self) -> Result<()> {
        let q = self.q();
        for t in std::iter::once(0).chain(self.xi_powers.iter().copied()) {
            if self.pow_idx(t, q as u128) != t {
                return Err(Error::InvalidModulus("Teichmüller element with t^q != t".into()));
            }
        }
        Ok(())
    }

    fn enumerate_principal(&self, k: u32) -> Vec<usize> {
        // 1 + p^k R: a_0 ≡ 1 and a_i ≡ 0 mod p^k, each of p^{n-k} residues.
        let step = self.params.p.pow(k);
        let count = self.pn / step;
        let s = self.params.s as usize;
        let mut out = Vec::with_capacity((count as usize).pow(s as u32));
        let mut digits = vec![0u64; s];
        loop {
            let coords: Vec<u64> = digits
                .iter()
                .enumerate()
                .map(|(i, &d)| (if i == 0 { 1 } else { 0 } + d * step) % self.pn)
                .collect();
            out.push(self.index_of_coords(&coords));
            let mut pos = s;
            loop {
                if pos == 0 {
                    out.sort_unstable();
                    return out;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < count {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    // ------------------------------------------------------------------
    // Accessors
    // ------------------------------------------------------------------

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn n(&self) -> u32 {
        self.params.n
    }

    pub fn s(&self) -> u32 {
        self.params.s
    }

    pub fn q(&self) -> u64 {
        self.params.q()
    }

    /// `p^n`.
    pub fn char_modulus(&self) -> u64 {
        self.pn
    }

    pub fn modulus(&self) -> &Polynomial {
        &self.modulus
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn description(&self) -> RingDescription {
        RingDescription {
            p: self.params.p,
            n: self.params.n,
            s: self.params.s,
            modulus: self.modulus.coeffs().to_vec(),
        }
    }

    /// Stable identifier of `(params, modulus)`, used to reject mixed-ring operands.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn unit_group(&self) -> &UnitGroupBasis {
        &self.unit_group
    }

    /// Unit indices in enumeration order.
    pub fn unit_indices(&self) -> &[usize] {
        &self.units
    }

    /// Indices of `1 + p^k R` for `1 <= k <= n`.
    pub fn principal_units(&self, k: u32) -> &[usize] {
        &self.principal[k as usize]
    }

    pub fn zero(&self) -> RingElement {
        self.element(0)
    }

    pub fn one(&self) -> RingElement {
        self.element(self.one)
    }

    pub fn one_index(&self) -> usize {
        self.one
    }

    pub fn xi(&self) -> RingElement {
        self.element(self.xi_powers[1 % self.xi_powers.len()])
    }

    /// `T = {0, ξ^0, ..., ξ^{q-2}}`.
    pub fn teichmuller_set(&self) -> Vec<RingElement> {
        std::iter::once(0)
            .chain(self.xi_powers.iter().copied())
            .map(|i| self.element(i))
            .collect()
    }

    pub fn xi_power_index(&self, j: u64) -> usize {
        self.xi_powers[(j % (self.q() - 1)) as usize]
    }

    /// `j` with `x = ξ^j`, if `x ∈ T*`.
    pub fn teichmuller_exponent(&self, idx: usize) -> Option<u32> {
        match self.dlog_t[idx] {
            u32::MAX => None,
            j => Some(j),
        }
    }

    /// The scalar `c ∈ Z_{p^n}` embedded in `R`.
    pub fn scalar(&self, c: u64) -> RingElement {
        let mut coords = vec![0u64; self.params.s as usize];
        coords[0] = c % self.pn;
        RingElement { coords }
    }

    // ------------------------------------------------------------------
    // Index encoding
    // ------------------------------------------------------------------

    pub fn index_of(&self, x: &RingElement) -> usize {
        self.index_of_coords(&x.coords)
    }

    fn index_of_coords(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .fold(0usize, |acc, &c| acc * self.pn as usize + (c % self.pn) as usize)
    }

    pub fn element(&self, idx: usize) -> RingElement {
        RingElement {
            coords: self.coords_of(idx),
        }
    }

    fn coords_of(&self, mut idx: usize) -> Vec<u64> {
        let s = self.params.s as usize;
        let mut coords = vec![0u64; s];
        for slot in coords.iter_mut().rev() {
            *slot = (idx % self.pn as usize) as u64;
            idx /= self.pn as usize;
        }
        coords
    }

    /// Checks that `x` has `s` coordinates in range.
    pub fn validate(&self, x: &RingElement) -> Result<()> {
        if x.coords.len() != self.params.s as usize || x.coords.iter().any(|&c| c >= self.pn) {
            return Err(Error::Parse(format!(
                "{:?} is not an element of GR({}^{}, {}^{})",
                x.coords,
                self.params.p,
                self.params.n,
                self.params.p,
                self.params.n * self.params.s
            )));
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Index arithmetic (hot loops)
    // ------------------------------------------------------------------

    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        let pn = self.pn as usize;
        if self.params.s == 1 {
            return (a + b) % pn;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut place = 1usize;
        for _ in 0..self.params.s {
            out += ((a % pn + b % pn) % pn) * place;
            a /= pn;
            b /= pn;
            place *= pn;
        }
        out
    }

    pub fn neg_idx(&self, a: usize) -> usize {
        let pn = self.pn as usize;
        let mut a = a;
        let mut out = 0usize;
        let mut place = 1usize;
        for _ in 0..self.params.s {
            out += ((pn - a % pn) % pn) * place;
            a /= pn;
            place *= pn;
        }
        out
    }

    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        if let Some(t) = &self.mul_table {
            return t[a * self.size + b] as usize;
        }
        let c = poly::mul_mod(
            &self.coords_of(a),
            &self.coords_of(b),
            self.modulus.coeffs(),
            self.pn,
        );
        self.index_of_coords(&c)
    }

    pub fn pow_idx(&self, a: usize, mut e: u128) -> usize {
        let mut result = self.one;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_idx(result, base);
            }
            base = self.mul_idx(base, base);
            e >>= 1;
        }
        result
    }

    pub fn is_unit_idx(&self, mut idx: usize) -> bool {
        let pn = self.pn as usize;
        let p = self.params.p as usize;
        for _ in 0..self.params.s {
            if (idx % pn) % p != 0 {
                return true;
            }
            idx /= pn;
        }
        false
    }

    /// Multiplicative inverse of a unit index (via `x^{|R*|-1}`).
    pub fn inv_idx(&self, idx: usize) -> Result<usize> {
        if !self.is_unit_idx(idx) {
            return Err(Error::NotAUnit);
        }
        Ok(self.pow_idx(idx, self.units.len() as u128 - 1))
    }

    /// `tr_n(x)` as a residue mod `p^n`, by index.
    pub fn trace_idx(&self, idx: usize) -> Result<u64> {
        self.trace(&self.element(idx))
    }

    // ------------------------------------------------------------------
    // Element-level API
    // ------------------------------------------------------------------

    pub fn add(&self, x: &RingElement, y: &RingElement) -> RingElement {
        let coords = x
            .coords
            .iter()
            .zip(&y.coords)
            .map(|(a, b)| (a + b) % self.pn)
            .collect();
        RingElement { coords }
    }

    pub fn neg(&self, x: &RingElement) -> RingElement {
        RingElement {
            coords: x.coords.iter().map(|a| (self.pn - a % self.pn) % self.pn).collect(),
        }
    }

    pub fn sub(&self, x: &RingElement, y: &RingElement) -> RingElement {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> RingElement {
        RingElement {
            coords: poly::mul_mod(&x.coords, &y.coords, self.modulus.coeffs(), self.pn),
        }
    }

    pub fn pow(&self, x: &RingElement, e: u128) -> RingElement {
        self.element(self.pow_idx(self.index_of(x), e))
    }

    pub fn inv(&self, x: &RingElement) -> Result<RingElement> {
        Ok(self.element(self.inv_idx(self.index_of(x))?))
    }

    pub fn is_unit(&self, x: &RingElement) -> bool {
        x.coords.iter().any(|&c| c % self.params.p != 0)
    }

    /// `x = p^k u`; `valuation(0) = (n, 0)`.
    pub fn valuation(&self, x: &RingElement) -> Valuation {
        let p = self.params.p;
        let mut k = 0u32;
        let mut coords = x.coords.clone();
        while k < self.params.n && coords.iter().all(|&c| c % p == 0) {
            coords.iter_mut().for_each(|c| *c /= p);
            k += 1;
        }
        let m = p.pow(self.params.n - k);
        coords.iter_mut().for_each(|c| *c %= m);
        Valuation {
            k,
            unit: RingElement { coords },
        }
    }

    /// Teichmüller lift `y^{q^{n-1}}` of the residue class of `x`.
    pub fn teichmuller_lift_idx(&self, idx: usize) -> usize {
        let e = (self.q() as u128).pow(self.params.n - 1);
        self.pow_idx(idx, e)
    }

    /// Digits `c_0, ..., c_{n-1} ∈ T` with `x = Σ p^i c_i`.
    pub fn teichmuller_decompose(&self, x: &RingElement) -> Vec<RingElement> {
        let p = self.params.p;
        let mut digits = Vec::with_capacity(self.params.n as usize);
        let mut cur = x.clone();
        for _ in 0..self.params.n {
            let c = self.element(self.teichmuller_lift_idx(self.index_of(&cur)));
            let diff = self.sub(&cur, &c);
            // diff ∈ pR; dividing the coordinates by p gives a lift of (cur - c)/p.
            cur = RingElement {
                coords: diff.coords.iter().map(|&a| a / p).collect(),
            };
            digits.push(c);
        }
        digits
    }

    /// Inverse of [`teichmuller_decompose`](Self::teichmuller_decompose).
    pub fn teichmuller_compose(&self, digits: &[RingElement]) -> RingElement {
        let mut acc = self.zero();
        let mut scale = 1u64;
        for d in digits {
            acc = self.add(&acc, &self.mul(&self.scalar(scale), d));
            scale = scale * self.params.p % self.pn;
        }
        acc
    }

    /// Frobenius `Σ a_i ξ^i ↦ Σ a_i ξ^{ip}`.
    pub fn frobenius(&self, x: &RingElement) -> RingElement {
        let s = self.params.s as usize;
        let mut out = vec![0u64; s];
        for (a, img) in x.coords.iter().zip(&self.frob_basis) {
            for (o, b) in out.iter_mut().zip(img) {
                *o = (*o + a * b) % self.pn;
            }
        }
        RingElement { coords: out }
    }

    /// Generalized trace `x + φ(x) + ... + φ^{s-1}(x)`, landing in `Z_{p^n}`.
    pub fn trace(&self, x: &RingElement) -> Result<u64> {
        let mut acc = x.clone();
        let mut cur = x.clone();
        for _ in 1..self.params.s {
            cur = self.frobenius(&cur);
            acc = self.add(&acc, &cur);
        }
        if acc.coords[1..].iter().any(|&c| c != 0) {
            return Err(Error::NotInBaseRing);
        }
        Ok(acc.coords[0])
    }

    /// `τ_{n-k}`: coordinates reduced mod `p^{n-k}`, for `1 <= k <= n-1`.
    pub fn reduce(&self, x: &RingElement, k: u32) -> Result<RingElement> {
        self.check_level(k)?;
        let m = self.params.p.pow(self.params.n - k);
        Ok(RingElement {
            coords: x.coords.iter().map(|c| c % m).collect(),
        })
    }

    fn check_level(&self, k: u32) -> Result<()> {
        if k == 0 || k >= self.params.n {
            return Err(Error::BadLevel {
                k,
                max: self.params.n.saturating_sub(1),
            });
        }
        Ok(())
    }

    /// `GR(p^{n-k}, p^{(n-k)s})` with modulus `h mod p^{n-k}`.
    pub fn reduced(&self, k: u32) -> Result<GaloisRing> {
        self.check_level(k)?;
        let params = RingParams::new(self.params.p, self.params.n - k, self.params.s)?;
        let m = params.char_modulus();
        GaloisRing::build(params, Some(self.modulus.reduce_mod(m)), u64::MAX)
    }

    /// The residue field `F_q` as `GR(p, q)`; the ring itself when `n = 1`.
    pub fn residue_field(&self) -> Result<GaloisRing> {
        if self.params.n == 1 {
            Ok(self.clone())
        } else {
            self.reduced(self.params.n - 1)
        }
    }

    /// Index in `target` of `τ(x)`, where `target` is a reduction of `self`.
    pub fn reduce_idx_into(&self, idx: usize, target: &GaloisRing) -> usize {
        let m = target.pn;
        let coords: Vec<u64> = self.coords_of(idx).into_iter().map(|c| c % m).collect();
        target.index_of_coords(&coords)
    }

    /// Index in `self` of the coordinate-wise lift of `idx ∈ source`.
    pub fn lift_idx_from(&self, idx: usize, source: &GaloisRing) -> usize {
        self.index_of_coords(&source.coords_of(idx))
    }

    /// Unit of `R` whose reduction to `source` is `idx`, lifted digit by digit
    /// through the Teichmüller expansion (missing high digits set to zero).
    pub fn teichmuller_lift_from(&self, idx: usize, source: &GaloisRing) -> usize {
        let digits = source.teichmuller_decompose(&source.element(idx));
        let mut acc = 0usize;
        let mut scale = self.one;
        let p_idx = self.index_of(&self.scalar(self.params.p));
        for d in digits {
            let d_idx = source.index_of(&d);
            let lifted = match source.teichmuller_exponent(d_idx) {
                Some(j) => self.xi_power_index(j as u64),
                None => 0,
            };
            acc = self.add_idx(acc, self.mul_idx(scale, lifted));
            scale = self.mul_idx(scale, p_idx);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr4() -> GaloisRing {
        GaloisRing::new(2, 2, 2).unwrap()
    }

    #[test]
    fn z9_teichmuller_set() {
        let r = GaloisRing::new(3, 2, 1).unwrap();
        let mut t: Vec<u64> = r.teichmuller_set().iter().map(|x| x.coords()[0]).collect();
        t.sort();
        // exhaustive solve of t^3 = t in Z_9
        let brute: Vec<u64> = (0..9).filter(|&t| t * t * t % 9 == t).collect();
        assert_eq!(t, brute);
        assert_eq!(t, vec![0, 1, 8]);
    }

    #[test]
    fn sizes() {
        let r = gr4();
        assert_eq!(r.size(), 16);
        assert_eq!(r.unit_count(), 12);
        let f4 = GaloisRing::new(2, 1, 2).unwrap();
        assert_eq!(f4.size(), 4);
        assert_eq!(f4.unit_count(), 3);
    }

    #[test]
    fn bad_params() {
        assert!(matches!(GaloisRing::new(4, 2, 1), Err(Error::InvalidParams(_))));
        assert!(matches!(GaloisRing::new(2, 0, 1), Err(Error::InvalidParams(_))));
        let big = RingParams::new(2, 21, 1).unwrap();
        assert!(matches!(
            GaloisRing::build(big, None, DEFAULT_ELEMENT_CAP),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn rejects_bad_modulus() {
        let params = RingParams::new(2, 2, 2).unwrap();
        // x^2 + x + 3 is primitive mod 2 but does not divide x^3 - 1 over Z_4
        let h = Polynomial::new(vec![3, 1, 1]).unwrap();
        assert!(matches!(
            GaloisRing::build(params, Some(h), DEFAULT_ELEMENT_CAP),
            Err(Error::InvalidModulus(_))
        ));
        let params = RingParams::new(3, 2, 1).unwrap();
        // x - 1: ξ = 1 has order 1, not 2
        let h = Polynomial::new(vec![8, 1]).unwrap();
        assert!(GaloisRing::build(params, Some(h), DEFAULT_ELEMENT_CAP).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let z9 = GaloisRing::new(3, 2, 1).unwrap();
        assert_eq!(z9.inv(&z9.scalar(2)).unwrap(), z9.scalar(5));
        assert!(matches!(z9.inv(&z9.scalar(3)), Err(Error::NotAUnit)));

        let r = gr4();
        let xi = r.xi();
        assert_eq!(xi.coords(), &[0, 1]);
        // ξ^2 = -ξ - 1 = 3 + 3ξ over Z_4
        assert_eq!(r.mul(&xi, &xi).coords(), &[3, 3]);
        for i in 0..r.size() {
            let x = r.element(i);
            assert_eq!(r.add(&x, &r.neg(&x)), r.zero());
        }
    }

    #[test]
    fn teichmuller_examples() {
        let z9 = GaloisRing::new(3, 2, 1).unwrap();
        let d = z9.teichmuller_decompose(&z9.scalar(5));
        assert_eq!(d, vec![z9.scalar(8), z9.scalar(8)]);
        // exhaustive over T^2: only (8, 8) composes to 5
        let t = z9.teichmuller_set();
        let hits: Vec<_> = t
            .iter()
            .flat_map(|a| t.iter().map(move |b| (a.clone(), b.clone())))
            .filter(|(a, b)| z9.teichmuller_compose(&[a.clone(), b.clone()]) == z9.scalar(5))
            .collect();
        assert_eq!(hits, vec![(z9.scalar(8), z9.scalar(8))]);

        let r = gr4();
        assert_eq!(r.teichmuller_decompose(&r.zero()), vec![r.zero(), r.zero()]);
        assert_eq!(r.teichmuller_decompose(&r.xi()), vec![r.xi(), r.zero()]);
    }

    #[test]
    fn valuation_examples() {
        let z9 = GaloisRing::new(3, 2, 1).unwrap();
        let v = z9.valuation(&z9.scalar(6));
        assert_eq!(v.k, 1);
        assert_eq!(v.unit.coords(), &[2]);
        assert!(z9.is_unit(&z9.scalar(5)));
        assert_eq!(z9.valuation(&z9.zero()).k, 2);

        let r = gr4();
        let two_xi = r.mul(&r.scalar(2), &r.xi());
        let v = r.valuation(&two_xi);
        assert_eq!(v.k, 1);
        let f4 = r.residue_field().unwrap();
        assert_eq!(v.unit, f4.xi());
    }

    #[test]
    fn frobenius_and_trace_examples() {
        let r = gr4();
        assert_eq!(r.frobenius(&r.one()), r.one());
        let xi = r.xi();
        assert_eq!(r.frobenius(&xi), r.mul(&xi, &xi));
        // tr(ξ) = ξ + ξ^2 = -1 = 3
        assert_eq!(r.trace(&xi).unwrap(), 3);
        assert_eq!(r.trace(&r.one()).unwrap(), 2);

        let z9 = GaloisRing::new(3, 2, 1).unwrap();
        for i in 0..9 {
            assert_eq!(z9.trace_idx(i).unwrap(), i as u64);
        }
    }

    #[test]
    fn reduction_examples() {
        let z9 = GaloisRing::new(3, 2, 1).unwrap();
        assert_eq!(z9.reduce(&z9.scalar(5), 1).unwrap().coords(), &[2]);
        assert!(matches!(z9.reduce(&z9.scalar(5), 2), Err(Error::BadLevel { .. })));
        assert!(matches!(z9.reduce(&z9.scalar(5), 0), Err(Error::BadLevel { .. })));

        let r = gr4();
        let x = r.add(&r.mul(&r.scalar(2), &r.xi()), &r.one());
        assert_eq!(r.reduce(&x, 1).unwrap().coords(), &[1, 0]);

        // trace compatibility, all 16 elements
        let f4 = r.reduced(1).unwrap();
        for i in 0..r.size() {
            let x = r.element(i);
            let lhs = r.trace(&x).unwrap() % 2;
            let rhs = f4.trace(&r.reduce(&x, 1).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn principal_subgroup_sizes() {
        for &(p, n, s) in &[(2u64, 3u32, 2u32), (3, 2, 2), (3, 3, 1), (2, 3, 1)] {
            let r = GaloisRing::new(p, n, s).unwrap();
            let q = r.q() as usize;
            for k in 1..=n {
                assert_eq!(r.principal_units(k).len(), q.pow(n - k));
            }
            // |p^k R| = q^{n-k}
            let pk = p.pow(1);
            for k in 0..=n {
                let count = (0..r.size())
                    .filter(|&i| r.element(i).coords().iter().all(|&c| c % pk.pow(k) == 0))
                    .count();
                assert_eq!(count, q.pow(n - k));
            }
        }
    }
}
