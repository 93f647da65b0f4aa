//! Additive and multiplicative characters of a Galois ring.
//!
//! The unit group is split as `R* = T* × (1 + M)`. `T*` is cyclic of order
//! `q - 1` generated by `ξ`; the principal units `1 + M` are decomposed into
//! cyclic `p`-groups by a greedy maximal-order search. A multiplicative
//! character is then an exponent tuple against that basis, and its values are
//! exact roots of unity until a summation kernel converts them.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, lcm};
use crate::error::{Error, Result};
use crate::ring::{GaloisRing, RingElement};

/// Sentinel for "no value" in index-addressed tables.
pub(crate) const NONE: u32 = u32::MAX;

// ---------------------------------------------------------------------------
// Roots of unity
// ---------------------------------------------------------------------------

/// `e^{2πi · numerator / order}`, kept exact.
#[derive(Clone, Copy, Debug, Eq, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub numerator: u64,
    pub order: u64,
}

impl RootOfUnity {
    pub fn new(numerator: u64, order: u64) -> Self {
        assert!(order > 0, "root of unity needs a positive order");
        Self {
            numerator: numerator % order,
            order,
        }
    }

    pub fn one() -> Self {
        Self::new(0, 1)
    }

    pub fn is_one(&self) -> bool {
        self.numerator == 0
    }

    /// Same value in lowest terms.
    pub fn reduced(&self) -> Self {
        let g = gcd(self.numerator, self.order);
        if self.numerator == 0 {
            return Self::one();
        }
        Self::new(self.numerator / g, self.order / g)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = lcm(self.order, other.order);
        Self::new(
            self.numerator * (order / self.order) + other.numerator * (order / other.order),
            order,
        )
    }

    pub fn conj(&self) -> Self {
        Self::new(self.order - self.numerator, self.order)
    }

    pub fn to_complex(&self) -> Complex64 {
        let theta = std::f64::consts::TAU * self.numerator as f64 / self.order as f64;
        Complex64::new(theta.cos(), theta.sin())
    }
}

impl PartialEq for RootOfUnity {
    fn eq(&self, other: &Self) -> bool {
        self.numerator as u128 * other.order as u128 == other.numerator as u128 * self.order as u128
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.numerator == 0 {
            write!(f, "1")
        } else {
            write!(f, "e^(2πi·{}/{})", r.numerator, r.order)
        }
    }
}

/// Table of `e^{2πi r / order}` for `r = 0..order`.
pub(crate) fn root_table(order: u64) -> Vec<Complex64> {
    (0..order).map(|r| RootOfUnity::new(r, order).to_complex()).collect()
}

// ---------------------------------------------------------------------------
// Additive characters
// ---------------------------------------------------------------------------

/// `λ_b(x) = e^{2πi tr_n(bx) / p^n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveCharacter {
    pub b: RingElement,
}

impl AdditiveCharacter {
    pub fn new(b: RingElement) -> Self {
        Self { b }
    }

    /// The canonical character `λ = λ_1`.
    pub fn canonical(ring: &GaloisRing) -> Self {
        Self { b: ring.one() }
    }

    pub fn eval(&self, ring: &GaloisRing, x: &RingElement) -> Result<RootOfUnity> {
        additive_char_eval(ring, &self.b, x)
    }
}

pub fn additive_char_eval(ring: &GaloisRing, b: &RingElement, x: &RingElement) -> Result<RootOfUnity> {
    let t = ring.trace(&ring.mul(b, x))?;
    Ok(RootOfUnity::new(t, ring.char_modulus()))
}

// ---------------------------------------------------------------------------
// Unit group basis
// ---------------------------------------------------------------------------

/// Generators `g_1 = ξ, g_2, ..., g_r` of `R*` with `R* = Π ⟨g_i⟩`, plus a
/// discrete-log table over every unit.
#[derive(Clone, Debug, Default)]
pub struct UnitGroupBasis {
    generators: Vec<usize>,
    orders: Vec<u64>,
    /// Per element index: mixed-radix code of the exponent tuple, or `NONE`.
    codes: Vec<u32>,
    exponent: u64,
}

impl UnitGroupBasis {
    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn generators(&self, ring: &GaloisRing) -> Vec<RingElement> {
        self.generators.iter().map(|&g| ring.element(g)).collect()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Exponent of `R*` (lcm of the generator orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn group_order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent tuple of a unit index; `None` for non-units.
    pub fn dlog_idx(&self, idx: usize) -> Option<Vec<u64>> {
        match self.codes.get(idx) {
            Some(&c) if c != NONE => Some(self.decode(c as u64)),
            _ => None,
        }
    }

    pub fn dlog(&self, ring: &GaloisRing, x: &RingElement) -> Option<Vec<u64>> {
        self.dlog_idx(ring.index_of(x))
    }

    fn decode(&self, mut code: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.orders.len()];
        for (slot, &d) in out.iter_mut().zip(&self.orders).rev() {
            *slot = code % d;
            code /= d;
        }
        out
    }

    pub(crate) fn code_idx(&self, idx: usize) -> u32 {
        self.codes[idx]
    }
}

/// Splits `R*` as `⟨ξ⟩ × (1 + M)` and decomposes `1 + M` into cyclic factors.
///
/// Each round picks the element of largest order modulo the subgroup built
/// so far (smallest index on ties) and replaces it by the smallest-index
/// element of its coset whose true order equals that quotient order.
pub fn decompose_unit_group(ring: &GaloisRing) -> UnitGroupBasis {
    let q = ring.q();
    let p = ring.p();
    let size = ring.size();
    let mut generators = vec![ring.xi_power_index(1)];
    let mut orders = vec![q - 1];

    if ring.n() > 1 {
        let principal = ring.principal_units(1);
        let mut in_h = vec![false; size];
        let mut h_elems = vec![ring.one_index()];
        in_h[ring.one_index()] = true;
        while h_elems.len() < principal.len() {
            let mut best = (1u64, usize::MAX);
            for &u in principal {
                if in_h[u] {
                    continue;
                }
                let mut cur = u;
                let mut ord = 1u64;
                while !in_h[cur] {
                    cur = ring.pow_idx(cur, p as u128);
                    ord *= p;
                }
                if ord > best.0 {
                    best = (ord, u);
                }
            }
            let (d, u) = best;
            let mut rep = usize::MAX;
            for &h in &h_elems {
                let w = ring.mul_idx(u, h);
                if ring.pow_idx(w, d as u128) == ring.one_index() && w < rep {
                    rep = w;
                }
            }
            let mut next = Vec::with_capacity(h_elems.len() * d as usize);
            let mut power = ring.one_index();
            for _ in 0..d {
                for &h in &h_elems {
                    let e = ring.mul_idx(power, h);
                    next.push(e);
                }
                power = ring.mul_idx(power, rep);
            }
            for &e in &next {
                in_h[e] = true;
            }
            h_elems = next;
            generators.push(rep);
            orders.push(d);
        }
    }

    let mut codes = vec![NONE; size];
    let mut elems = vec![ring.one_index()];
    for (&g, &d) in generators.iter().zip(&orders) {
        // code = ((e_1 d_2 + e_2) d_3 + e_3) ...
        let mut next = vec![0usize; elems.len() * d as usize];
        let mut power = ring.one_index();
        let mut powers = Vec::with_capacity(d as usize);
        for _ in 0..d {
            powers.push(power);
            power = ring.mul_idx(power, g);
        }
        for (code, &e) in elems.iter().enumerate() {
            for (j, &gp) in powers.iter().enumerate() {
                next[code * d as usize + j] = ring.mul_idx(e, gp);
            }
        }
        elems = next;
    }
    for (code, &e) in elems.iter().enumerate() {
        debug_assert_eq!(codes[e], NONE, "unit basis is not independent");
        codes[e] = code as u32;
    }
    let exponent = orders.iter().fold(1, |acc, &d| lcm(acc, d));
    UnitGroupBasis {
        generators,
        orders,
        codes,
        exponent,
    }
}

// ---------------------------------------------------------------------------
// Multiplicative characters
// ---------------------------------------------------------------------------

/// `χ(g_i) = e^{2πi e_i / d_i}` against the ring's unit-group basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultCharacter {
    exponents: Vec<u64>,
    level: u32,
    ring: u64,
}

/// Exported form of a character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub exponents: Vec<u64>,
    pub triviality_level: u32,
}

impl MultCharacter {
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Triviality level `t`: 0 for `χ_0`, `n` for primitive characters.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_trivial(&self) -> bool {
        self.level == 0
    }

    pub fn ring_fingerprint(&self) -> u64 {
        self.ring
    }

    pub fn record(&self) -> CharacterRecord {
        CharacterRecord {
            exponents: self.exponents.clone(),
            triviality_level: self.level,
        }
    }
}

impl fmt::Display for MultCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        write!(f, "χ[{}]", e.join(","))
    }
}

fn check_ring(ring: &GaloisRing, chi: &MultCharacter) -> Result<()> {
    if chi.ring != ring.fingerprint() {
        return Err(Error::RingMismatch);
    }
    Ok(())
}

/// Builds the character with the given exponents (reduced mod the orders).
pub fn character(ring: &GaloisRing, exponents: &[u64]) -> Result<MultCharacter> {
    let basis = ring.unit_group();
    if exponents.len() != basis.rank() {
        return Err(Error::Parse(format!(
            "expected {} exponents, got {}",
            basis.rank(),
            exponents.len()
        )));
    }
    let exponents: Vec<u64> = exponents.iter().zip(basis.orders()).map(|(e, d)| e % d).collect();
    let mut chi = MultCharacter {
        exponents,
        level: 0,
        ring: ring.fingerprint(),
    };
    chi.level = compute_level(ring, &chi);
    Ok(chi)
}

pub fn trivial_character(ring: &GaloisRing) -> MultCharacter {
    MultCharacter {
        exponents: vec![0; ring.unit_group().rank()],
        level: 0,
        ring: ring.fingerprint(),
    }
}

/// Per-generator weights `e_i · (E / d_i)` so that `χ(x) = Σ w_i l_i (mod E)`.
fn weights(ring: &GaloisRing, chi: &MultCharacter) -> Vec<u64> {
    let basis = ring.unit_group();
    let e = basis.exponent();
    chi.exponents
        .iter()
        .zip(basis.orders())
        .map(|(x, d)| x * (e / d) % e)
        .collect()
}

fn eval_code(basis: &UnitGroupBasis, w: &[u64], code: u32) -> u64 {
    let e = basis.exponent();
    let l = basis.decode(code as u64);
    l.iter().zip(w).fold(0u64, |acc, (li, wi)| (acc + li * wi) % e)
}

fn trivial_on(ring: &GaloisRing, w: &[u64], elems: &[usize]) -> bool {
    let basis = ring.unit_group();
    elems.iter().all(|&u| eval_code(basis, w, basis.code_idx(u)) == 0)
}

fn compute_level(ring: &GaloisRing, chi: &MultCharacter) -> u32 {
    if chi.exponents.iter().all(|&e| e == 0) {
        return 0;
    }
    let w = weights(ring, chi);
    (1..ring.n())
        .find(|&k| trivial_on(ring, &w, ring.principal_units(k)))
        .unwrap_or(ring.n())
}

/// Triviality level of `χ` (recomputed from the definition).
pub fn classify(ring: &GaloisRing, chi: &MultCharacter) -> Result<u32> {
    check_ring(ring, chi)?;
    Ok(compute_level(ring, chi))
}

/// `χ(x)` for a unit index; `None` for non-units.
pub fn eval_idx(ring: &GaloisRing, chi: &MultCharacter, idx: usize) -> Option<RootOfUnity> {
    let basis = ring.unit_group();
    let code = basis.code_idx(idx);
    if code == NONE {
        return None;
    }
    let w = weights(ring, chi);
    Some(RootOfUnity::new(eval_code(basis, &w, code), basis.exponent()))
}

/// `χ(x)`; errors on non-units.
pub fn eval(ring: &GaloisRing, chi: &MultCharacter, x: &RingElement) -> Result<RootOfUnity> {
    check_ring(ring, chi)?;
    eval_idx(ring, chi, ring.index_of(x)).ok_or(Error::NotAUnit)
}

/// Value with the extension `χ(M) = 1` for `χ_0` and `χ(M) = 0` otherwise;
/// `None` stands for 0.
pub fn extended_eval(ring: &GaloisRing, chi: &MultCharacter, x: &RingElement) -> Result<Option<RootOfUnity>> {
    check_ring(ring, chi)?;
    Ok(extended_eval_idx(ring, chi, ring.index_of(x)))
}

pub fn extended_eval_idx(ring: &GaloisRing, chi: &MultCharacter, idx: usize) -> Option<RootOfUnity> {
    match eval_idx(ring, chi, idx) {
        Some(v) => Some(v),
        None if chi.is_trivial() => Some(RootOfUnity::one()),
        None => None,
    }
}

/// Numerators of `χ(x)` modulo `order` for every element index, `NONE` where
/// the value is zero (non-units, or `M` for nontrivial `χ` when `extended`).
/// `order` must be a multiple of the unit-group exponent.
pub(crate) fn numerator_table(ring: &GaloisRing, chi: &MultCharacter, order: u64, extended: bool) -> Vec<u32> {
    let basis = ring.unit_group();
    let e = basis.exponent();
    debug_assert_eq!(order % e, 0);
    let scale = order / e;
    let w = weights(ring, chi);
    (0..ring.size())
        .map(|idx| {
            let code = basis.code_idx(idx);
            if code != NONE {
                (eval_code(basis, &w, code) * scale) as u32
            } else if extended && chi.is_trivial() {
                0
            } else {
                NONE
            }
        })
        .collect()
}

/// All `|R*|` characters, exponent tuples in lexicographic order.
pub fn enumerate_characters(ring: &GaloisRing) -> Vec<MultCharacter> {
    let orders = ring.unit_group().orders().to_vec();
    let total: u64 = orders.iter().product();
    (0..total)
        .map(|mut code| {
            let mut exps = vec![0u64; orders.len()];
            for (slot, &d) in exps.iter_mut().zip(&orders).rev() {
                *slot = code % d;
                code /= d;
            }
            character(ring, &exps).expect("exponent tuple has the basis rank")
        })
        .collect()
}

pub fn char_mul(ring: &GaloisRing, a: &MultCharacter, b: &MultCharacter) -> Result<MultCharacter> {
    check_ring(ring, a)?;
    check_ring(ring, b)?;
    let exps: Vec<u64> = a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect();
    character(ring, &exps)
}

pub fn char_inv(ring: &GaloisRing, a: &MultCharacter) -> Result<MultCharacter> {
    check_ring(ring, a)?;
    let exps: Vec<u64> = a
        .exponents
        .iter()
        .zip(ring.unit_group().orders())
        .map(|(x, d)| (d - x) % d)
        .collect();
    character(ring, &exps)
}

/// Product of a list of characters (the trivial character for an empty list).
pub fn char_product(ring: &GaloisRing, chars: &[MultCharacter]) -> Result<MultCharacter> {
    chars
        .iter()
        .try_fold(trivial_character(ring), |acc, c| char_mul(ring, &acc, c))
}

// ---------------------------------------------------------------------------
// The subgroup 1 + p^{n-1} R and its characters φ_a
// ---------------------------------------------------------------------------

/// Which extension of `φ_a` to all of `R*` to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    /// Lexicographically smallest exponent tuple.
    #[default]
    Smallest,
    /// Lexicographically largest exponent tuple; `χ̃_0 = χ_0` still.
    Largest,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Smallest => write!(f, "smallest"),
            Section::Largest => write!(f, "largest"),
        }
    }
}

impl std::str::FromStr for Section {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smallest" => Ok(Section::Smallest),
            "largest" => Ok(Section::Largest),
            other => Err(Error::Parse(format!("unknown section '{other}'"))),
        }
    }
}

/// Recorded `φ_a` extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionRecord {
    pub a: RingElement,
    pub exponents: Vec<u64>,
}

fn require_n_ge_2(ring: &GaloisRing) -> Result<()> {
    if ring.n() < 2 {
        return Err(Error::InvalidParams(
            "the subgroup 1 + p^(n-1)R needs n >= 2".into(),
        ));
    }
    Ok(())
}

/// `φ_a(1 + p^{n-1} x) = e^{2πi tr(a τ_1(x)) / p}`; `a` is an element index
/// of `field` (the residue field of `ring`), `u` an element index of `ring`.
pub fn phi_a_eval(ring: &GaloisRing, field: &GaloisRing, a: usize, u: usize) -> Result<RootOfUnity> {
    require_n_ge_2(ring)?;
    let p = ring.p();
    let step = p.pow(ring.n() - 1);
    let diff = ring.sub(&ring.element(u), &ring.one());
    if diff.coords().iter().any(|c| c % step != 0) {
        return Err(Error::InvalidParams("element is not in 1 + p^(n-1)R".into()));
    }
    let x = RingElement::from_coords(diff.coords().iter().map(|c| (c / step) % p).collect());
    let t = field.trace(&field.mul(&field.element(a), &x))?;
    Ok(RootOfUnity::new(t, p))
}

/// Generators `1 + p^{n-1} ξ^j` (`j < s`) of `1 + p^{n-1} R`.
fn top_subgroup_generators(ring: &GaloisRing) -> Vec<usize> {
    let pk = ring.scalar(ring.p().pow(ring.n() - 1));
    (0..ring.s() as u64)
        .map(|j| {
            let t = ring.mul(&pk, &ring.element(ring.xi_power_index(j)));
            ring.index_of(&ring.add(&ring.one(), &t))
        })
        .collect()
}

/// Restriction of `χ` to `1 + p^{n-1} R` equals `φ_a`, checked on every element.
pub fn restricts_to_phi(ring: &GaloisRing, field: &GaloisRing, chi: &MultCharacter, a: usize) -> Result<bool> {
    check_ring(ring, chi)?;
    for &u in ring.principal_units(ring.n() - 1) {
        let lhs = eval_idx(ring, chi, u).ok_or(Error::NotAUnit)?;
        if lhs != phi_a_eval(ring, field, a, u)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extends `φ_a` to a character `χ̃_a` of `R*`.
///
/// Exponent tuples are scanned in lexicographic order, ascending for
/// [`Section::Smallest`] and descending for [`Section::Largest`]. The
/// smallest match always has `e_1 = 0`.
pub fn extend_phi(ring: &GaloisRing, field: &GaloisRing, a: usize, section: Section) -> Result<MultCharacter> {
    require_n_ge_2(ring)?;
    if a == 0 {
        return Ok(trivial_character(ring));
    }
    let gens = top_subgroup_generators(ring);
    let targets: Vec<RootOfUnity> = gens
        .iter()
        .map(|&u| phi_a_eval(ring, field, a, u))
        .collect::<Result<_>>()?;
    let orders = ring.unit_group().orders().to_vec();
    let total: u64 = orders.iter().product();
    for step in 0..total {
        let mut code = match section {
            Section::Smallest => step,
            Section::Largest => total - 1 - step,
        };
        let mut exps = vec![0u64; orders.len()];
        for (slot, &d) in exps.iter_mut().zip(&orders).rev() {
            *slot = code % d;
            code /= d;
        }
        let candidate = MultCharacter {
            exponents: exps,
            level: 0,
            ring: ring.fingerprint(),
        };
        let ok = gens
            .iter()
            .zip(&targets)
            .all(|(&u, t)| eval_idx(ring, &candidate, u).as_ref() == Some(t));
        if ok {
            return character(ring, &candidate.exponents);
        }
    }
    Err(Error::InvalidParams(format!(
        "no extension of φ_a found for a = {a}"
    )))
}

/// Converts generator values into an exponent tuple for `ring`'s basis.
fn from_generator_values(ring: &GaloisRing, values: &[RootOfUnity]) -> Result<MultCharacter> {
    let orders = ring.unit_group().orders();
    let exps = values
        .iter()
        .zip(orders)
        .map(|(v, &d)| {
            let num = v.numerator as u128 * d as u128;
            if num % v.order as u128 != 0 {
                return Err(Error::InvalidParams(format!(
                    "value {v} is not a {d}-th root of unity"
                )));
            }
            Ok((num / v.order as u128) as u64)
        })
        .collect::<Result<Vec<u64>>>()?;
    character(ring, &exps)
}

/// `χ = ψ ∘ τ_{n-k}` for `ψ` a character of `reduced = GR(p^{n-k}, ·)`.
pub fn lift_character(ring: &GaloisRing, reduced: &GaloisRing, psi: &MultCharacter) -> Result<MultCharacter> {
    check_ring(reduced, psi)?;
    if reduced.p() != ring.p() || reduced.s() != ring.s() || reduced.n() > ring.n() {
        return Err(Error::RingMismatch);
    }
    let values = ring
        .unit_group()
        .generator_indices()
        .iter()
        .map(|&g| eval_idx(reduced, psi, ring.reduce_idx_into(g, reduced)).ok_or(Error::NotAUnit))
        .collect::<Result<Vec<_>>>()?;
    from_generator_values(ring, &values)
}

/// Inverse of [`lift_character`]: `ψ(τ(x)) = χ(x)` for `χ` trivial on `1 + p^{n'} R`.
pub fn project_character(ring: &GaloisRing, reduced: &GaloisRing, chi: &MultCharacter) -> Result<MultCharacter> {
    check_ring(ring, chi)?;
    if reduced.p() != ring.p() || reduced.s() != ring.s() || reduced.n() > ring.n() {
        return Err(Error::RingMismatch);
    }
    if chi.level > reduced.n() {
        return Err(Error::InvalidParams(format!(
            "character of level {} does not factor through GR(p^{}, ·)",
            chi.level,
            reduced.n()
        )));
    }
    let values = reduced
        .unit_group()
        .generator_indices()
        .iter()
        .map(|&g| eval_idx(ring, chi, ring.lift_idx_from(g, reduced)).ok_or(Error::NotAUnit))
        .collect::<Result<Vec<_>>>()?;
    from_generator_values(reduced, &values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> GaloisRing {
        GaloisRing::new(3, 2, 1).unwrap()
    }

    fn root(n: u64, d: u64) -> RootOfUnity {
        RootOfUnity::new(n, d)
    }

    #[test]
    fn root_equality_is_by_value() {
        assert_eq!(root(1, 2), root(3, 6));
        assert_ne!(root(1, 3), root(1, 6));
        assert_eq!(root(0, 5), RootOfUnity::one());
        assert_eq!(root(2, 6).reduced(), root(1, 3));
        assert_eq!(root(1, 4).mul(&root(1, 4)), root(1, 2));
    }

    #[test]
    fn additive_examples() {
        let r = z9();
        for i in 0..9 {
            assert!(additive_char_eval(&r, &r.zero(), &r.element(i)).unwrap().is_one());
        }
        assert_eq!(additive_char_eval(&r, &r.one(), &r.one()).unwrap(), root(1, 9));
        let g = GaloisRing::new(2, 2, 2).unwrap();
        assert_eq!(additive_char_eval(&g, &g.one(), &g.xi()).unwrap(), root(3, 4));
    }

    #[test]
    fn z9_basis() {
        let r = z9();
        let b = r.unit_group();
        let gens: Vec<u64> = b.generators(&r).iter().map(|g| g.coords()[0]).collect();
        assert_eq!(gens, vec![8, 4]);
        assert_eq!(b.orders(), &[2, 3]);
        assert_eq!(b.group_order(), 6);
    }

    #[test]
    fn gr4_basis() {
        let r = GaloisRing::new(2, 2, 2).unwrap();
        let b = r.unit_group();
        assert_eq!(b.orders(), &[3, 2, 2]);
        // generators of 1 + M come from 1 + 2T*
        let one_plus_2t: Vec<RingElement> = (0..3)
            .map(|j| r.add(&r.one(), &r.mul(&r.scalar(2), &r.element(r.xi_power_index(j)))))
            .collect();
        for g in &b.generators(&r)[1..] {
            assert!(one_plus_2t.contains(g), "{g:?}");
        }
        let f4 = GaloisRing::new(2, 1, 2).unwrap();
        assert_eq!(f4.unit_group().orders(), &[3]);
    }

    #[test]
    fn dlog_covers_every_unit() {
        for &(p, n, s) in &[(2u64, 3u32, 2u32), (3, 2, 2), (3, 3, 1), (2, 3, 1), (5, 2, 1)] {
            let r = GaloisRing::new(p, n, s).unwrap();
            let b = r.unit_group();
            assert_eq!(b.group_order() as usize, r.unit_count());
            for &u in r.unit_indices() {
                let e = b.dlog_idx(u).unwrap();
                let mut acc = r.one_index();
                for (&g, &x) in b.generator_indices().iter().zip(&e) {
                    acc = r.mul_idx(acc, r.pow_idx(g, x as u128));
                }
                assert_eq!(acc, u);
            }
        }
    }

    #[test]
    fn character_counts() {
        assert_eq!(enumerate_characters(&z9()).len(), 6);
        assert_eq!(enumerate_characters(&GaloisRing::new(2, 2, 2).unwrap()).len(), 12);
        assert_eq!(enumerate_characters(&GaloisRing::new(3, 3, 1).unwrap()).len(), 18);
    }

    #[test]
    fn classify_examples() {
        let r = z9();
        assert_eq!(trivial_character(&r).level(), 0);
        // 2 = 8 · 4^2, so exponents (1, 1) give χ(2) = e^{2πi(1/2 + 2/3)} = e^{2πi/6}
        let chi = character(&r, &[1, 1]).unwrap();
        assert_eq!(eval(&r, &chi, &r.scalar(2)).unwrap(), root(1, 6));
        assert_eq!(chi.level(), 2);
        let sign = character(&r, &[1, 0]).unwrap();
        assert_eq!(eval(&r, &sign, &r.scalar(2)).unwrap(), root(1, 2));
        assert!(eval(&r, &sign, &r.scalar(4)).unwrap().is_one());
        assert_eq!(sign.level(), 1);
    }

    #[test]
    fn group_structure() {
        let r = z9();
        let all = enumerate_characters(&r);
        let chi0 = trivial_character(&r);
        for c in &all {
            assert_eq!(char_mul(&r, c, &char_inv(&r, c).unwrap()).unwrap(), chi0);
            assert_eq!(char_mul(&r, &chi0, c).unwrap(), *c);
        }
        let one_trivial: Vec<_> = all.iter().filter(|c| c.level() == 1).collect();
        for a in &one_trivial {
            for b in &one_trivial {
                assert!(char_mul(&r, a, b).unwrap().level() <= 1);
            }
        }
        let other = GaloisRing::new(2, 2, 2).unwrap();
        assert!(matches!(char_mul(&other, &all[1], &all[2]), Err(Error::RingMismatch)));
    }

    #[test]
    fn extended_examples() {
        let r = z9();
        let chi0 = trivial_character(&r);
        assert_eq!(extended_eval(&r, &chi0, &r.zero()).unwrap(), Some(RootOfUnity::one()));
        for c in enumerate_characters(&r).iter().filter(|c| !c.is_trivial()) {
            assert_eq!(extended_eval(&r, c, &r.scalar(3)).unwrap(), None);
            for &u in r.unit_indices() {
                let v = extended_eval_idx(&r, c, u).unwrap().to_complex();
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_examples() {
        let r = z9();
        let f = r.residue_field().unwrap();
        assert!(phi_a_eval(&r, &f, 0, 4).unwrap().is_one());
        assert_eq!(phi_a_eval(&r, &f, 1, 4).unwrap(), root(1, 3));
        // φ_a are pairwise distinct on the subgroup
        let sub = r.principal_units(1);
        let tables: Vec<Vec<RootOfUnity>> = (0..3)
            .map(|a| sub.iter().map(|&u| phi_a_eval(&r, &f, a, u).unwrap()).collect())
            .collect();
        assert_ne!(tables[0], tables[1]);
        assert_ne!(tables[1], tables[2]);
        assert_ne!(tables[0], tables[2]);
    }

    #[test]
    fn extend_phi_sections() {
        for ring in [z9(), GaloisRing::new(2, 2, 2).unwrap(), GaloisRing::new(2, 3, 2).unwrap(), GaloisRing::new(3, 3, 1).unwrap()] {
            let f = ring.residue_field().unwrap();
            for section in [Section::Smallest, Section::Largest] {
                let ext: Vec<_> = (0..f.size())
                    .map(|a| extend_phi(&ring, &f, a, section).unwrap())
                    .collect();
                assert!(ext[0].is_trivial());
                for (a, chi) in ext.iter().enumerate() {
                    assert!(restricts_to_phi(&ring, &f, chi, a).unwrap());
                }
                for a in 0..ext.len() {
                    for b in 0..ext.len() {
                        if a != b {
                            let d = char_mul(&ring, &ext[a], &char_inv(&ring, &ext[b]).unwrap()).unwrap();
                            assert_eq!(d.level(), ring.n());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lift_and_project() {
        let r = z9();
        let z3 = r.reduced(1).unwrap();
        let psis = enumerate_characters(&z3);
        assert_eq!(psis.len(), 2);
        let lifted = lift_character(&r, &z3, &psis[1]).unwrap();
        let one_trivial: Vec<_> = enumerate_characters(&r).into_iter().filter(|c| c.level() == 1).collect();
        assert_eq!(one_trivial, vec![lifted.clone()]);
        assert!(lift_character(&r, &z3, &psis[0]).unwrap().is_trivial());
        for psi in &psis {
            let back = project_character(&r, &z3, &lift_character(&r, &z3, psi).unwrap()).unwrap();
            assert_eq!(&back, psi);
        }
        let prim = character(&r, &[1, 1]).unwrap();
        assert!(project_character(&r, &z3, &prim).is_err());
    }
}
