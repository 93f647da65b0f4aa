//! Gauss sums, Jacobi sums and the modified sums `J̃` over a Galois ring.
//!
//! Every sum is evaluated twice: by brute force, accumulating an exact
//! integer histogram of root-of-unity exponents before a single conversion
//! to floating point, and by closed forms that classify the expected value or
//! magnitude. The two are compared by [`SumValue::agrees`].

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, lcm};
use crate::characters::{
    char_inv, char_product, eval_idx, numerator_table, project_character, root_table, MultCharacter, RootOfUnity,
    NONE,
};
use crate::error::{Error, Result};
use crate::ring::{GaloisRing, RingElement};

/// Default cap on the number of terms in one brute-force sum.
pub const DEFAULT_TERM_CAP: u128 = 10_000_000;

/// Tolerance for comparing a sum of `terms` unit-modulus terms.
pub fn default_tolerance(terms: u128) -> f64 {
    (1e-12 * terms as f64).max(1e-9)
}

// ---------------------------------------------------------------------------
// Expected values
// ---------------------------------------------------------------------------

/// Closed-form classification of a sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Magnitude {
    Zero,
    /// `|value| = q^{exponent_x2 / 2}`.
    PowerOfQ { exponent_x2: u32 },
    /// The value itself is this integer.
    Integer { value: i128 },
    /// Magnitude known only numerically (finite-field base cases).
    Numeric { value: f64 },
    Unclassified,
}

impl Magnitude {
    /// `|value|` implied by the classification.
    pub fn abs(&self, q: u64) -> Option<f64> {
        match *self {
            Magnitude::Zero => Some(0.0),
            Magnitude::PowerOfQ { exponent_x2 } => Some((q as f64).powf(exponent_x2 as f64 / 2.0)),
            Magnitude::Integer { value } => Some(value.unsigned_abs() as f64),
            Magnitude::Numeric { value } => Some(value),
            Magnitude::Unclassified => None,
        }
    }

    /// Multiplies by a positive power of `q` (`q^{e/2}`).
    fn times_q_pow(self, q: u64, e_x2: u32) -> Self {
        match self {
            Magnitude::Zero => Magnitude::Zero,
            Magnitude::PowerOfQ { exponent_x2 } => Magnitude::PowerOfQ {
                exponent_x2: exponent_x2 + e_x2,
            },
            Magnitude::Integer { value } if e_x2 % 2 == 0 => {
                match checked_pow(q as u128, e_x2 / 2).and_then(|f| value.checked_mul(f as i128)) {
                    Some(v) => Magnitude::Integer { value: v },
                    None => Magnitude::Numeric {
                        value: value as f64 * (q as f64).powf(e_x2 as f64 / 2.0),
                    },
                }
            }
            other => match other.abs(q) {
                Some(v) => Magnitude::Numeric {
                    value: v * (q as f64).powf(e_x2 as f64 / 2.0),
                },
                None => Magnitude::Unclassified,
            },
        }
    }

    /// Multiplies by an integer factor.
    fn times_int(self, q: u64, c: i128) -> Self {
        match self {
            Magnitude::Zero => Magnitude::Zero,
            Magnitude::Integer { value } => Magnitude::Integer { value: value * c },
            Magnitude::Unclassified => Magnitude::Unclassified,
            other => Magnitude::Numeric {
                value: other.abs(q).unwrap_or(0.0) * c.unsigned_abs() as f64,
            },
        }
    }

    /// Multiplies by a root of unity: only the magnitude survives unless the
    /// root is `±1`.
    fn rotate(self, q: u64, r: &RootOfUnity) -> Self {
        match self {
            Magnitude::Integer { value } => {
                if r.is_one() {
                    self
                } else if *r == RootOfUnity::new(1, 2) {
                    Magnitude::Integer { value: -value }
                } else {
                    from_abs_int(q, value.unsigned_abs())
                }
            }
            other => other,
        }
    }
}

fn from_abs_int(q: u64, v: u128) -> Magnitude {
    if v == 0 {
        return Magnitude::Zero;
    }
    let mut e = 0u32;
    let mut cur = 1u128;
    while cur < v {
        cur *= q as u128;
        e += 1;
    }
    if cur == v {
        Magnitude::PowerOfQ { exponent_x2: 2 * e }
    } else {
        Magnitude::Numeric { value: v as f64 }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Magnitude::Zero => write!(f, "0"),
            Magnitude::PowerOfQ { exponent_x2 } if exponent_x2 % 2 == 0 => write!(f, "|·| = q^{}", exponent_x2 / 2),
            Magnitude::PowerOfQ { exponent_x2 } => write!(f, "|·| = q^({exponent_x2}/2)"),
            Magnitude::Integer { value } => write!(f, "{value}"),
            Magnitude::Numeric { value } => write!(f, "|·| = {value}"),
            Magnitude::Unclassified => write!(f, "unclassified"),
        }
    }
}

/// Which closed form produced an expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Gauss sum with the trivial character or the zero twist.
    GaussTrivial,
    /// Gauss sum with a unit twist.
    GaussUnitTwist,
    /// Gauss sum with twist `p^k u`.
    GaussPowerTwist,
    /// All characters trivial: the solution count.
    AllTrivial,
    /// `a = 0`.
    ZeroTarget,
    /// Two characters, exactly one trivial.
    OneTrivial,
    /// Two nontrivial characters with trivial product.
    InversePair,
    /// Two characters, one primitive.
    PrimitivePair,
    /// At least three characters, one primitive.
    PrimitiveTuple,
    /// No primitive character: reduce to a smaller ring.
    LevelReduction,
    /// Residue-field base case evaluated directly.
    FieldBase,
    /// `J̃` with every tail character nontrivial.
    TildeUnitTail,
    /// `J̃` with all characters trivial.
    TildeAllTrivial,
    /// `J̃` with trivial tail and a nontrivial head character.
    TildeHeadNontrivial,
    /// `J̃` with a tail that is partly trivial.
    TildeMixedTail,
    /// No closed form applied.
    Brute,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

/// Closed-form expectation: a magnitude class and, when the formula gives
/// one, the exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub magnitude: Magnitude,
    pub exact: Option<Complex64>,
    pub rule: Rule,
}

impl Expectation {
    fn integer(v: i128, rule: Rule) -> Self {
        let magnitude = if v == 0 {
            Magnitude::Zero
        } else {
            Magnitude::Integer { value: v }
        };
        Self {
            magnitude,
            exact: Some(Complex64::new(v as f64, 0.0)),
            rule,
        }
    }

    fn zero(rule: Rule) -> Self {
        Self::integer(0, rule)
    }

    fn unclassified() -> Self {
        Self {
            magnitude: Magnitude::Unclassified,
            exact: None,
            rule: Rule::Brute,
        }
    }
}

/// A computed sum with its expectation attached.
#[derive(Clone, Debug, PartialEq)]
pub struct SumValue {
    pub value: Complex64,
    pub expected: Magnitude,
    pub exact: Option<Complex64>,
    pub rule: Rule,
    pub terms: u128,
    pub q: u64,
}

/// JSON form of a [`SumValue`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SumRecord {
    pub value: [f64; 2],
    pub expected: Magnitude,
    pub exact: Option<[f64; 2]>,
    pub lemma: String,
    pub terms: u128,
    pub agree: bool,
}

impl SumValue {
    fn brute(value: Complex64, terms: u128, q: u64) -> Self {
        Self {
            value,
            expected: Magnitude::Unclassified,
            exact: None,
            rule: Rule::Brute,
            terms,
            q,
        }
    }

    fn with(mut self, e: Expectation) -> Self {
        self.expected = e.magnitude;
        self.exact = e.exact;
        self.rule = e.rule;
        self
    }

    /// Distance between the computed magnitude and the expected one.
    pub fn magnitude_error(&self) -> Option<f64> {
        match self.expected {
            Magnitude::Integer { value } => Some((self.value - Complex64::new(value as f64, 0.0)).norm()),
            m => m.abs(self.q).map(|e| (self.value.norm() - e).abs()),
        }
    }

    /// Distance to the exact value, when one is known.
    pub fn exact_error(&self) -> Option<f64> {
        self.exact.map(|e| (self.value - e).norm())
    }

    /// True when the magnitude (and the exact value, if any) match within `tol`.
    pub fn agrees(&self, tol: f64) -> bool {
        match self.magnitude_error() {
            Some(err) if err <= tol => self.exact_error().map_or(true, |e| e <= tol),
            _ => false,
        }
    }

    pub fn record(&self, tol: f64) -> SumRecord {
        SumRecord {
            value: [self.value.re, self.value.im],
            expected: self.expected,
            exact: self.exact.map(|e| [e.re, e.im]),
            lemma: self.rule.to_string(),
            terms: self.terms,
            agree: self.agrees(tol),
        }
    }
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

fn trace_table(ring: &GaloisRing) -> Result<Vec<u64>> {
    (0..ring.size()).map(|i| ring.trace_idx(i)).collect()
}

fn histogram_value(hist: &[u64]) -> Complex64 {
    let roots = root_table(hist.len() as u64);
    hist.iter()
        .zip(&roots)
        .fold(Complex64::new(0.0, 0.0), |acc, (&c, z)| acc + z * c as f64)
}

fn check_same_ring(ring: &GaloisRing, chars: &[MultCharacter]) -> Result<()> {
    if chars.iter().any(|c| c.ring_fingerprint() != ring.fingerprint()) {
        return Err(Error::RingMismatch);
    }
    Ok(())
}

/// Histogram of exponents (mod `order`) of `Π t_i(x_i)` over tuples with
/// `x_i ∈ domains[i]` for `i < m-1` and `x_m = target - Σ x_i`. Table entries
/// equal to `NONE` are zero and drop the tuple.
fn product_histogram(
    ring: &GaloisRing,
    tables: &[Vec<u32>],
    domains: &[&[usize]],
    target: usize,
    order: u64,
) -> Vec<u64> {
    let m = tables.len();
    let order32 = order as u32;
    let walk = |first: usize| -> Vec<u64> {
        let mut hist = vec![0u64; order as usize];
        let n0 = tables[0][first];
        if n0 == NONE {
            return hist;
        }
        let mut stack: Vec<(usize, usize, u32)> = vec![(1, first, n0)];
        while let Some((pos, sum, num)) = stack.pop() {
            if pos == m - 1 {
                let last = ring.sub_idx(target, sum);
                let t = tables[pos][last];
                if t != NONE {
                    hist[((num + t) % order32) as usize] += 1;
                }
                continue;
            }
            for &x in domains[pos].iter().rev() {
                let t = tables[pos][x];
                if t != NONE {
                    stack.push((pos + 1, ring.add_idx(sum, x), (num + t) % order32));
                }
            }
        }
        hist
    };
    domains[0]
        .par_iter()
        .map(|&x| walk(x))
        .reduce(
            || vec![0u64; order as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn term_count(domains: &[&[usize]]) -> u128 {
    domains.iter().map(|d| d.len() as u128).product()
}

fn check_cap(terms: u128, cap: u128) -> Result<()> {
    if terms > cap {
        return Err(Error::TooLarge { terms, cap });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Gauss sums
// ---------------------------------------------------------------------------

/// `G(χ, λ_b) = Σ_{x ∈ R*} χ(x) λ_b(x)` by direct summation.
pub fn gauss_brute(ring: &GaloisRing, chi: &MultCharacter, b: &RingElement) -> Result<Complex64> {
    check_same_ring(ring, std::slice::from_ref(chi))?;
    ring.validate(b)?;
    let pn = ring.char_modulus();
    let order = lcm(ring.unit_group().exponent(), pn);
    let chi_num = numerator_table(ring, chi, order, false);
    let traces = trace_table(ring)?;
    let b_idx = ring.index_of(b);
    let scale = order / pn;
    let mut hist = vec![0u64; order as usize];
    for &x in ring.unit_indices() {
        let tr = traces[ring.mul_idx(b_idx, x)];
        let r = (chi_num[x] as u64 + tr * scale) % order;
        hist[r as usize] += 1;
    }
    Ok(histogram_value(&hist))
}

/// Closed-form value or magnitude of `G(χ, λ_b)`.
pub fn gauss_expected(ring: &GaloisRing, chi: &MultCharacter, b: &RingElement) -> Expectation {
    let n = ring.n();
    let q = ring.q() as i128;
    let v = ring.valuation(b);
    if chi.is_trivial() {
        let value = if v.k == n {
            q.pow(n) - q.pow(n - 1)
        } else if v.k == n - 1 {
            -q.pow(n - 1)
        } else {
            0
        };
        return Expectation::integer(value, Rule::GaussTrivial);
    }
    if v.k == n {
        return Expectation::zero(Rule::GaussTrivial);
    }
    let (rule, nonzero, exponent_x2) = if v.k == 0 {
        (Rule::GaussUnitTwist, chi.level() == n, n)
    } else {
        (Rule::GaussPowerTwist, chi.level() == n - v.k, n + v.k)
    };
    Expectation {
        magnitude: if nonzero {
            Magnitude::PowerOfQ { exponent_x2 }
        } else {
            Magnitude::Zero
        },
        exact: (!nonzero).then(|| Complex64::new(0.0, 0.0)),
        rule,
    }
}

pub fn gauss_sum(ring: &GaloisRing, chi: &MultCharacter, b: &RingElement) -> Result<SumValue> {
    let value = gauss_brute(ring, chi, b)?;
    let terms = ring.unit_count() as u128;
    Ok(SumValue::brute(value, terms, ring.q()).with(gauss_expected(ring, chi, b)))
}

fn gauss_canonical(ring: &GaloisRing, chi: &MultCharacter) -> Result<Complex64> {
    gauss_brute(ring, chi, &ring.one())
}

/// `2 log_q |G(χ, λ_b)|` from the classification, `None` when `G = 0`.
fn gauss_log_x2(ring: &GaloisRing, chi: &MultCharacter, b: &RingElement) -> Option<u32> {
    match gauss_expected(ring, chi, b).magnitude {
        Magnitude::PowerOfQ { exponent_x2 } => Some(exponent_x2),
        Magnitude::Integer { value } => match from_abs_int(ring.q(), value.unsigned_abs()) {
            Magnitude::PowerOfQ { exponent_x2 } => Some(exponent_x2),
            _ => None,
        },
        _ => None,
    }
}

/// Magnitude of `q^{extra/2} Π G(χ_i, λ) / G(ψ, λ_b)` from the Gauss classes.
fn quotient_magnitude(ring: &GaloisRing, chars: &[MultCharacter], extra_x2: u32, den: &MultCharacter, b: &RingElement) -> Magnitude {
    let one = ring.one();
    let mut total = extra_x2;
    for c in chars {
        match gauss_log_x2(ring, c, &one) {
            Some(e) => total += e,
            None => return Magnitude::Zero,
        }
    }
    match gauss_log_x2(ring, den, b) {
        Some(d) if d <= total => Magnitude::PowerOfQ { exponent_x2: total - d },
        _ => Magnitude::Unclassified,
    }
}

// ---------------------------------------------------------------------------
// Solution counts
// ---------------------------------------------------------------------------

/// Number of solutions of a linear equation in units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCount {
    pub count: u128,
}

/// `q^{nm-m-n}((q-1)^m + (-1)^m (q-1))` for `a ∈ M`, and
/// `q^{nm-m-n}((q-1)^m + (-1)^{m+1})` otherwise.
pub fn count_unit_solutions(q: u64, n: u32, m: u32, a_in_m: bool) -> Result<SolutionCount> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidParams("need m >= 2 and n >= 1".into()));
    }
    let overflow = || Error::InvalidParams("solution count overflows u128".into());
    let q = q as i128;
    let qm1 = q - 1;
    let sign: i128 = if m % 2 == 0 { 1 } else { -1 };
    let base = qm1.checked_pow(m).ok_or_else(overflow)?;
    let bracket = if a_in_m { base + sign * qm1 } else { base - sign };
    let e = (n * m) as i64 - m as i64 - n as i64;
    let count = if e >= 0 {
        q.checked_pow(e as u32)
            .and_then(|f| f.checked_mul(bracket))
            .ok_or_else(overflow)?
    } else {
        let d = q.pow((-e) as u32);
        debug_assert_eq!(bracket % d, 0);
        bracket / d
    };
    Ok(SolutionCount { count: count as u128 })
}

/// Exhaustive count of `(x_1, ..., x_m) ∈ (R*)^m` with `Σ x_i = a`.
pub fn brute_count(ring: &GaloisRing, m: usize, a: &RingElement, cap: u128) -> Result<SolutionCount> {
    if m < 2 {
        return Err(Error::InvalidParams("need m >= 2".into()));
    }
    ring.validate(a)?;
    let units = ring.unit_indices();
    let domains = vec![units; m - 1];
    check_cap(term_count(&domains), cap)?;
    let table: Vec<u32> = (0..ring.size())
        .map(|i| if ring.is_unit_idx(i) { 0 } else { NONE })
        .collect();
    let tables = vec![table; m];
    let hist = product_histogram(ring, &tables, &domains, ring.index_of(a), 1);
    Ok(SolutionCount { count: hist[0] as u128 })
}

/// `|S| = (q^n - q^{n-1})^k q^{n(m-k)} / q^n`.
pub fn s_cardinality(q: u64, n: u32, m: u32, k: u32) -> Result<u128> {
    if k < 1 || k >= m {
        return Err(Error::InvalidParams(format!("need 1 <= k <= m-1 (got m = {m}, k = {k})")));
    }
    let overflow = || Error::InvalidParams("|S| overflows u128".into());
    let qn = checked_pow(q as u128, n).ok_or_else(overflow)?;
    let units = qn - checked_pow(q as u128, n - 1).ok_or_else(overflow)?;
    // (q^n)^{m-k} / q^n = q^{n(m-k-1)}
    checked_pow(units, k)
        .and_then(|u| checked_pow(qn, m - k - 1).and_then(|v| u.checked_mul(v)))
        .ok_or_else(overflow)
}

/// `|S|` by enumeration.
pub fn s_enumerate(ring: &GaloisRing, m: usize, k: usize, a: &RingElement, cap: u128) -> Result<u128> {
    if k < 1 || k >= m {
        return Err(Error::InvalidParams(format!("need 1 <= k <= m-1 (got m = {m}, k = {k})")));
    }
    ring.validate(a)?;
    let all: Vec<usize> = (0..ring.size()).collect();
    let domains = s_domains(ring, &all, m, k);
    check_cap(term_count(&domains), cap)?;
    let tables = vec![vec![0u32; ring.size()]; m];
    let hist = product_histogram(ring, &tables, &domains, ring.index_of(a), 1);
    Ok(hist[0] as u128)
}

fn s_domains<'a>(ring: &'a GaloisRing, all: &'a [usize], m: usize, k: usize) -> Vec<&'a [usize]> {
    (0..m - 1)
        .map(|i| if i < k { ring.unit_indices() } else { all })
        .collect()
}

// ---------------------------------------------------------------------------
// Jacobi sums
// ---------------------------------------------------------------------------

/// Characters and target of one Jacobi sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiSpec {
    pub chars: Vec<MultCharacter>,
    pub a: RingElement,
}

/// Canonical target of a Jacobi sum: `0`, `1` or `p^k` with `1 <= k <= n-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Zero,
    One,
    PowerOfP(u32),
}

impl Target {
    pub fn element(&self, ring: &GaloisRing) -> RingElement {
        match *self {
            Target::Zero => ring.zero(),
            Target::One => ring.one(),
            Target::PowerOfP(k) => ring.scalar(ring.p().pow(k)),
        }
    }

    /// All canonical targets of `ring`.
    pub fn all(ring: &GaloisRing) -> Vec<Target> {
        let mut v = vec![Target::Zero, Target::One];
        v.extend((1..ring.n()).map(Target::PowerOfP));
        v
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Zero => write!(f, "0"),
            Target::One => write!(f, "1"),
            Target::PowerOfP(k) => write!(f, "p^{k}"),
        }
    }
}

/// `J_a = scalar · J_{target}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub target: Target,
    pub scalar: RootOfUnity,
    /// Unit `t` (as lifted to `R`) with `a = p^k t`; absent for `a = 0`.
    pub unit: Option<RingElement>,
}

/// Rewrites `J_a` as a root of unity times `J_0`, `J_1` or `J_{p^k}`.
///
/// For `a = p^k t` the unit `t ∈ R_{n-k}*` is lifted through its Teichmüller
/// digits, so the lift is `Σ_{i >= k} p^{i-k} c_i` with `a = Σ p^i c_i`.
pub fn canonicalize(ring: &GaloisRing, chars: &[MultCharacter], a: &RingElement) -> Result<Canonical> {
    check_same_ring(ring, chars)?;
    ring.validate(a)?;
    let n = ring.n();
    let v = ring.valuation(a);
    if v.k == n {
        return Ok(Canonical {
            target: Target::Zero,
            scalar: RootOfUnity::one(),
            unit: None,
        });
    }
    let product = char_product(ring, chars)?;
    let unit = if v.k == 0 {
        a.clone()
    } else {
        let digits = ring.teichmuller_decompose(a);
        ring.teichmuller_compose(&digits[v.k as usize..])
    };
    let scalar = eval_idx(ring, &product, ring.index_of(&unit)).ok_or(Error::NotAUnit)?;
    let target = if v.k == 0 { Target::One } else { Target::PowerOfP(v.k) };
    Ok(Canonical {
        target,
        scalar,
        unit: Some(unit),
    })
}

fn jacobi_tables(ring: &GaloisRing, chars: &[MultCharacter], order: u64) -> Vec<Vec<u32>> {
    chars.iter().map(|c| numerator_table(ring, c, order, false)).collect()
}

/// `J_a(χ_1, ..., χ_m)` by enumeration of `(x_1, ..., x_{m-1}) ∈ (R*)^{m-1}`.
pub fn jacobi_brute(ring: &GaloisRing, chars: &[MultCharacter], a: &RingElement, cap: u128) -> Result<SumValue> {
    if chars.len() < 2 {
        return Err(Error::InvalidParams("a Jacobi sum needs at least two characters".into()));
    }
    check_same_ring(ring, chars)?;
    ring.validate(a)?;
    let domains = vec![ring.unit_indices(); chars.len() - 1];
    let terms = term_count(&domains);
    check_cap(terms, cap)?;
    let order = ring.unit_group().exponent();
    let tables = jacobi_tables(ring, chars, order);
    let hist = product_histogram(ring, &tables, &domains, ring.index_of(a), order);
    Ok(SumValue::brute(histogram_value(&hist), terms, ring.q()))
}

/// Closed-form expectation for `J_a(χ_1, ..., χ_m)` at any `a`.
pub fn jacobi_expected(ring: &GaloisRing, chars: &[MultCharacter], a: &RingElement) -> Result<Expectation> {
    let canon = canonicalize(ring, chars, a)?;
    let e = expect_canonical(ring, chars, canon.target)?;
    Ok(Expectation {
        magnitude: e.magnitude.rotate(ring.q(), &canon.scalar),
        exact: e.exact.map(|v| v * canon.scalar.to_complex()),
        rule: e.rule,
    })
}

/// Brute-force value with the closed-form expectation attached.
pub fn jacobi_sum(ring: &GaloisRing, chars: &[MultCharacter], a: &RingElement, cap: u128) -> Result<SumValue> {
    let brute = jacobi_brute(ring, chars, a, cap)?;
    Ok(brute.with(jacobi_expected(ring, chars, a)?))
}

fn minus_one_sign(ring: &GaloisRing, chi: &MultCharacter) -> i128 {
    let minus_one = ring.neg_idx(ring.one_index());
    match eval_idx(ring, chi, minus_one) {
        Some(v) if v.is_one() => 1,
        _ => -1,
    }
}

fn all_trivial_value(q: u64, n: u32, m: usize, in_m: bool) -> Result<i128> {
    Ok(count_unit_solutions(q, n, m as u32, in_m)?.count as i128)
}

fn gauss_product(ring: &GaloisRing, chars: &[MultCharacter]) -> Result<Complex64> {
    chars
        .iter()
        .try_fold(Complex64::new(1.0, 0.0), |acc, c| Ok(acc * gauss_canonical(ring, c)?))
}

/// Moves the first character satisfying `pred` to the end.
fn move_last(chars: &[MultCharacter], pred: impl Fn(&MultCharacter) -> bool) -> Option<Vec<MultCharacter>> {
    let i = chars.iter().position(pred)?;
    let mut v = chars.to_vec();
    let c = v.remove(i);
    v.push(c);
    Some(v)
}

fn expect_canonical(ring: &GaloisRing, chars: &[MultCharacter], target: Target) -> Result<Expectation> {
    let n = ring.n();
    let q = ring.q();
    let qi = q as i128;
    let m = chars.len();
    let units = qi.pow(n) - qi.pow(n - 1);
    let product = char_product(ring, chars)?;

    if chars.iter().all(|c| c.is_trivial()) {
        let in_m = target != Target::One;
        return Ok(Expectation::integer(all_trivial_value(q, n, m, in_m)?, Rule::AllTrivial));
    }

    if target == Target::Zero {
        if !product.is_trivial() {
            return Ok(Expectation::zero(Rule::ZeroTarget));
        }
        let v = move_last(chars, |c| !c.is_trivial()).expect("some character is nontrivial");
        let sign = minus_one_sign(ring, &v[m - 1]);
        if m == 2 {
            return Ok(Expectation::integer(sign * units, Rule::ZeroTarget));
        }
        let inner = expect_canonical(ring, &v[..m - 1], Target::One)?;
        return Ok(Expectation {
            magnitude: inner.magnitude.times_int(q, sign * units),
            exact: inner.exact.map(|e| e * (sign * units) as f64),
            rule: Rule::ZeroTarget,
        });
    }

    if m == 2 {
        if let Some(e) = expect_pair(ring, chars, &product, target)? {
            return Ok(e);
        }
    } else if let Some(v) = move_last(chars, |c| c.level() == n) {
        return expect_primitive_tuple(ring, &v, target);
    }

    if chars.iter().all(|c| c.level() < n) {
        return expect_by_reduction(ring, chars, target);
    }
    Ok(Expectation::unclassified())
}

/// Two-character closed forms; `None` when no primitive character is present.
fn expect_pair(
    ring: &GaloisRing,
    chars: &[MultCharacter],
    product: &MultCharacter,
    target: Target,
) -> Result<Option<Expectation>> {
    let n = ring.n();
    let qi = ring.q() as i128;
    let units = qi.pow(n) - qi.pow(n - 1);
    let (c1, c2) = (&chars[0], &chars[1]);

    if c1.is_trivial() || c2.is_trivial() {
        let chi = if c1.is_trivial() { c2 } else { c1 };
        let value = match target {
            Target::One if chi.level() == 1 => -qi.pow(n - 1),
            _ => 0,
        };
        return Ok(Some(Expectation::integer(value, Rule::OneTrivial)));
    }

    if product.is_trivial() {
        let sign = minus_one_sign(ring, c2);
        let t = c2.level();
        let value = match target {
            Target::One if t == 1 => -sign * qi.pow(n - 1),
            Target::One => 0,
            Target::PowerOfP(k) if t > k + 1 => 0,
            Target::PowerOfP(k) if t <= k => sign * units,
            Target::PowerOfP(_) => -sign * qi.pow(n - 1),
            Target::Zero => unreachable!("a = 0 is handled before the pair rules"),
        };
        return Ok(Some(Expectation::integer(value, Rule::InversePair)));
    }

    let (c1, c2) = if c2.level() == n {
        (c1, c2)
    } else if c1.level() == n {
        (c2, c1)
    } else {
        return Ok(None);
    };
    let t = product.level();
    let zero = || Ok(Some(Expectation::zero(Rule::PrimitivePair)));
    match target {
        Target::One => {
            if t != n {
                return zero();
            }
            let exact = gauss_canonical(ring, c1)? * gauss_canonical(ring, c2)? / gauss_canonical(ring, product)?;
            let magnitude = quotient_magnitude(ring, &[c1.clone(), c2.clone()], 0, product, &ring.one());
            Ok(Some(Expectation {
                magnitude,
                exact: Some(exact),
                rule: Rule::PrimitivePair,
            }))
        }
        Target::PowerOfP(k) => {
            if t == n || k != n - t {
                return zero();
            }
            let pk = Target::PowerOfP(k).element(ring);
            let qk = qi.pow(k) as f64;
            let exact = gauss_canonical(ring, c1)? * gauss_canonical(ring, c2)? * qk / gauss_brute(ring, product, &pk)?;
            Ok(Some(Expectation {
                magnitude: quotient_magnitude(ring, &[c1.clone(), c2.clone()], 2 * k, product, &pk),
                exact: Some(exact),
                rule: Rule::PrimitivePair,
            }))
        }
        Target::Zero => unreachable!("a = 0 is handled before the pair rules"),
    }
}

/// `m >= 3`, last character primitive.
fn expect_primitive_tuple(ring: &GaloisRing, chars: &[MultCharacter], target: Target) -> Result<Expectation> {
    let n = ring.n();
    let qi = ring.q() as i128;
    let product = char_product(ring, chars)?;
    let t = product.level();
    let zero = || Ok(Expectation::zero(Rule::PrimitiveTuple));
    match target {
        Target::One => {
            if t == n {
                let exact = gauss_product(ring, chars)? / gauss_canonical(ring, &product)?;
                return Ok(Expectation {
                    magnitude: quotient_magnitude(ring, chars, 0, &product, &ring.one()),
                    exact: Some(exact),
                    rule: Rule::PrimitiveTuple,
                });
            }
            if n == 1 {
                return field_base(ring, chars);
            }
            zero()
        }
        Target::PowerOfP(k) => {
            if (1..n).contains(&t) && k == n - t {
                let pk = Target::PowerOfP(k).element(ring);
                let exact =
                    gauss_product(ring, chars)? * qi.pow(k) as f64 / gauss_brute(ring, &product, &pk)?;
                return Ok(Expectation {
                    magnitude: quotient_magnitude(ring, chars, 2 * k, &product, &pk),
                    exact: Some(exact),
                    rule: Rule::PrimitiveTuple,
                });
            }
            if t == 0 && k == n - 1 {
                let head = &chars[..chars.len() - 1];
                let head_product = char_product(ring, head)?;
                let sign = minus_one_sign(ring, &chars[chars.len() - 1]);
                let exact = gauss_product(ring, head)? * (-sign * qi.pow(n - 1)) as f64
                    / gauss_canonical(ring, &head_product)?;
                return Ok(Expectation {
                    magnitude: quotient_magnitude(ring, head, 2 * (n - 1), &head_product, &ring.one()),
                    exact: Some(exact),
                    rule: Rule::PrimitiveTuple,
                });
            }
            zero()
        }
        Target::Zero => unreachable!("a = 0 is handled before the tuple rules"),
    }
}

/// Residue-field sums not covered by a closed form, evaluated directly.
fn field_base(ring: &GaloisRing, chars: &[MultCharacter]) -> Result<Expectation> {
    let v = jacobi_brute(ring, chars, &ring.one(), DEFAULT_TERM_CAP)?.value;
    Ok(Expectation {
        magnitude: Magnitude::Numeric { value: v.norm() },
        exact: Some(v),
        rule: Rule::FieldBase,
    })
}

/// Every character is `(n-k)`-trivial: `J_a = q^{(m-1)k} J_{τ(a)}` over
/// `GR(p^{n-k}, ·)`.
fn expect_by_reduction(ring: &GaloisRing, chars: &[MultCharacter], target: Target) -> Result<Expectation> {
    let n = ring.n();
    let q = ring.q();
    let m = chars.len() as u32;
    let top = chars.iter().map(|c| c.level()).max().unwrap_or(0);
    let k = n - top;
    let reduced = ring.reduced(k)?;
    let projected = chars
        .iter()
        .map(|c| project_character(ring, &reduced, c))
        .collect::<Result<Vec<_>>>()?;
    let sub_target = match target {
        Target::PowerOfP(j) if j >= n - k => Target::Zero,
        other => other,
    };
    let inner = expect_canonical(&reduced, &projected, sub_target)?;
    let factor = checked_pow(q as u128, (m - 1) * k).ok_or(Error::InvalidParams("scale factor overflows".into()))?;
    Ok(Expectation {
        magnitude: inner.magnitude.times_q_pow(q, 2 * (m - 1) * k),
        exact: inner.exact.map(|e| e * factor as f64),
        rule: Rule::LevelReduction,
    })
}

/// `J_a` of characters that are all `(n-k)`-trivial, computed by brute force
/// over the reduced ring and scaled by `q^{exponent}`. Used to test the
/// reduction factor directly.
pub fn reduced_jacobi(
    ring: &GaloisRing,
    chars: &[MultCharacter],
    a: &RingElement,
    k: u32,
    exponent: u32,
    cap: u128,
) -> Result<Complex64> {
    let reduced = ring.reduced(k)?;
    let projected = chars
        .iter()
        .map(|c| project_character(ring, &reduced, c))
        .collect::<Result<Vec<_>>>()?;
    let a_red = ring.reduce(a, k)?;
    let inner = jacobi_brute(&reduced, &projected, &a_red, cap)?.value;
    let factor = checked_pow(ring.q() as u128, exponent).ok_or(Error::InvalidParams("scale factor overflows".into()))?;
    Ok(inner * factor as f64)
}

// ---------------------------------------------------------------------------
// Modified sums J̃
// ---------------------------------------------------------------------------

/// Sum over `S = (R*)^k × R^{m-k}` with `Σ x_i = a` of extended character values.
pub fn tilde_jacobi_brute(
    ring: &GaloisRing,
    chars: &[MultCharacter],
    k: usize,
    a: &RingElement,
    cap: u128,
) -> Result<SumValue> {
    let m = chars.len();
    if m < 2 || k < 1 || k >= m {
        return Err(Error::InvalidParams(format!("need m >= 2 and 1 <= k <= m-1 (got m = {m}, k = {k})")));
    }
    check_same_ring(ring, chars)?;
    ring.validate(a)?;
    let all: Vec<usize> = (0..ring.size()).collect();
    let domains = s_domains(ring, &all, m, k);
    let terms = term_count(&domains);
    check_cap(terms, cap)?;
    let order = ring.unit_group().exponent();
    let tables: Vec<Vec<u32>> = chars.iter().map(|c| numerator_table(ring, c, order, true)).collect();
    let hist = product_histogram(ring, &tables, &domains, ring.index_of(a), order);
    Ok(SumValue::brute(histogram_value(&hist), terms, ring.q()))
}

/// Expected `J̃_a` by the trivial/nontrivial pattern of head and tail.
pub fn tilde_jacobi_classify(ring: &GaloisRing, chars: &[MultCharacter], k: usize, a: &RingElement) -> Result<Expectation> {
    let m = chars.len();
    if m < 2 || k < 1 || k >= m {
        return Err(Error::InvalidParams(format!("need m >= 2 and 1 <= k <= m-1 (got m = {m}, k = {k})")));
    }
    let (head, tail) = chars.split_at(k);
    let tail_trivial = tail.iter().filter(|c| c.is_trivial()).count();
    if tail_trivial == 0 {
        let e = jacobi_expected(ring, chars, a)?;
        return Ok(Expectation {
            rule: Rule::TildeUnitTail,
            ..e
        });
    }
    if tail_trivial < tail.len() {
        return Ok(Expectation::zero(Rule::TildeMixedTail));
    }
    if head.iter().all(|c| c.is_trivial()) {
        let size = s_cardinality(ring.q(), ring.n(), m as u32, k as u32)?;
        return Ok(Expectation::integer(size as i128, Rule::TildeAllTrivial));
    }
    Ok(Expectation::zero(Rule::TildeHeadNontrivial))
}

pub fn tilde_jacobi(ring: &GaloisRing, chars: &[MultCharacter], k: usize, a: &RingElement, cap: u128) -> Result<SumValue> {
    let brute = tilde_jacobi_brute(ring, chars, k, a, cap)?;
    Ok(brute.with(tilde_jacobi_classify(ring, chars, k, a)?))
}

/// `χ̄` for every character, as used by the conjugation identity.
pub fn conjugates(ring: &GaloisRing, chars: &[MultCharacter]) -> Result<Vec<MultCharacter>> {
    chars.iter().map(|c| char_inv(ring, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{character, enumerate_characters, trivial_character};

    fn z9() -> GaloisRing {
        GaloisRing::new(3, 2, 1).unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn gauss_examples() {
        let r = z9();
        let chi0 = trivial_character(&r);
        let g = gauss_sum(&r, &chi0, &r.zero()).unwrap();
        assert!(close(g.value, Complex64::new(6.0, 0.0)));
        assert!(g.agrees(1e-9));
        let g = gauss_sum(&r, &chi0, &r.scalar(3)).unwrap();
        assert!(close(g.value, Complex64::new(-3.0, 0.0)));
        assert_eq!(g.expected, Magnitude::Integer { value: -3 });
        let prim = character(&r, &[1, 1]).unwrap();
        let g = gauss_sum(&r, &prim, &r.one()).unwrap();
        assert!((g.value.norm() - 3.0).abs() < 1e-9);
        assert!(g.agrees(1e-9));
    }

    #[test]
    fn unit_solution_counts() {
        let r = z9();
        assert_eq!(count_unit_solutions(3, 2, 2, false).unwrap().count, 3);
        assert_eq!(count_unit_solutions(3, 2, 2, true).unwrap().count, 6);
        assert_eq!(brute_count(&r, 2, &r.one(), DEFAULT_TERM_CAP).unwrap().count, 3);
        assert_eq!(brute_count(&r, 2, &r.scalar(3), DEFAULT_TERM_CAP).unwrap().count, 6);
        assert_eq!(brute_count(&r, 2, &r.zero(), DEFAULT_TERM_CAP).unwrap().count, 6);
        // n = 1 has a negative power of q in the formula
        assert_eq!(count_unit_solutions(5, 1, 2, true).unwrap().count, 4);
        assert_eq!(count_unit_solutions(5, 1, 2, false).unwrap().count, 3);
    }

    #[test]
    fn s_examples() {
        assert_eq!(s_cardinality(3, 2, 3, 1).unwrap(), 54);
        assert_eq!(s_cardinality(11, 2, 3, 1).unwrap(), 13310);
        assert_eq!(s_cardinality(5, 2, 2, 1).unwrap(), 20);
        let r = z9();
        assert_eq!(s_enumerate(&r, 3, 1, &r.one(), DEFAULT_TERM_CAP).unwrap(), 54);
    }

    #[test]
    fn jacobi_examples() {
        let r = z9();
        let chi0 = trivial_character(&r);
        let j = jacobi_sum(&r, &[chi0.clone(), chi0.clone()], &r.one(), DEFAULT_TERM_CAP).unwrap();
        assert!(close(j.value, Complex64::new(3.0, 0.0)));
        assert!(j.agrees(1e-9));
        let j = jacobi_sum(&r, &[chi0.clone(), chi0], &r.scalar(3), DEFAULT_TERM_CAP).unwrap();
        assert!(close(j.value, Complex64::new(6.0, 0.0)));
        let prim = character(&r, &[1, 1]).unwrap();
        let prim2 = character(&r, &[0, 1]).unwrap();
        let j = jacobi_sum(&r, &[prim.clone(), prim2], &r.one(), DEFAULT_TERM_CAP).unwrap();
        assert!((j.value.norm() - 3.0).abs() < 1e-9);
        assert!(j.agrees(1e-9));
        let third = character(&r, &[0, 2]).unwrap();
        let j = jacobi_sum(&r, &[prim.clone(), prim, third], &r.one(), DEFAULT_TERM_CAP).unwrap();
        assert_eq!(j.expected, Magnitude::PowerOfQ { exponent_x2: 4 });
        assert!(j.agrees(1e-9));
    }

    #[test]
    fn shifted_pair_magnitude() {
        // χ_2 primitive, χ_1 χ_2 1-trivial, a = p: |J| = 3^{3/2}
        let r = z9();
        let c2 = character(&r, &[0, 1]).unwrap();
        let c1 = character(&r, &[1, 2]).unwrap();
        assert_eq!(char_product(&r, &[c1.clone(), c2.clone()]).unwrap().level(), 1);
        let j = jacobi_sum(&r, &[c1, c2], &r.scalar(3), DEFAULT_TERM_CAP).unwrap();
        assert!((j.value.norm() - 27f64.sqrt()).abs() < 1e-9);
        assert!(j.agrees(1e-9));
    }

    #[test]
    fn canonical_examples() {
        let r = z9();
        let chars = enumerate_characters(&r);
        let c = canonicalize(&r, &chars[1..3], &r.one()).unwrap();
        assert_eq!(c.target, Target::One);
        assert!(c.scalar.is_one());
        let prod = char_product(&r, &chars[1..3]).unwrap();
        let c = canonicalize(&r, &chars[1..3], &r.scalar(2)).unwrap();
        assert_eq!(c.scalar, eval_idx(&r, &prod, 2).unwrap());
        let c = canonicalize(&r, &chars[2..4], &r.scalar(6)).unwrap();
        assert_eq!(c.target, Target::PowerOfP(1));
        // 2 reduces to the Teichmüller digit 8 (≡ -1 mod 3), padded with a zero digit
        assert_eq!(c.unit, Some(r.scalar(8)));
        let j6 = jacobi_brute(&r, &chars[2..4], &r.scalar(6), DEFAULT_TERM_CAP).unwrap().value;
        let j3 = jacobi_brute(&r, &chars[2..4], &r.scalar(3), DEFAULT_TERM_CAP).unwrap().value;
        assert!(close(j6, j3 * c.scalar.to_complex()));
    }

    #[test]
    fn caps_are_enforced() {
        let r = z9();
        let chars = vec![trivial_character(&r); 3];
        assert!(matches!(jacobi_brute(&r, &chars, &r.one(), 10), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn tilde_examples() {
        let r = z9();
        let chi0 = trivial_character(&r);
        let t = tilde_jacobi(&r, &[chi0.clone(), chi0.clone(), chi0.clone()], 1, &r.one(), DEFAULT_TERM_CAP).unwrap();
        assert!(close(t.value, Complex64::new(54.0, 0.0)));
        assert_eq!(t.rule, Rule::TildeAllTrivial);
        let prim = character(&r, &[1, 1]).unwrap();
        let t = tilde_jacobi(&r, &[prim.clone(), chi0.clone(), chi0.clone()], 1, &r.one(), DEFAULT_TERM_CAP).unwrap();
        assert!(t.agrees(1e-9));
        let t = tilde_jacobi(&r, &[chi0, prim.clone(), prim], 1, &r.one(), DEFAULT_TERM_CAP).unwrap();
        assert_eq!(t.rule, Rule::TildeUnitTail);
        assert!(t.agrees(1e-9));
    }

    #[test]
    fn rule_names() {
        assert_eq!(Rule::OneTrivial.to_string(), "one-trivial");
        assert_eq!(Rule::PrimitiveTuple.to_string(), "primitive-tuple");
    }
}
