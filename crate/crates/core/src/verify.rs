//! Named verification suites comparing closed forms against brute force.
//!
//! Each suite returns a [`SuiteReport`] listing how many checks ran and a
//! description of every mismatch. The CLI `verify` command and the
//! integration tests both drive these.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::characters::{char_product, enumerate_characters, MultCharacter};
use crate::error::{Error, Result};
use crate::ring::{GaloisRing, RingElement};
use crate::sums::{
    brute_count, count_unit_solutions, gauss_sum, jacobi_brute, jacobi_sum, reduced_jacobi, s_cardinality,
    s_enumerate, tilde_jacobi, Magnitude, Target, DEFAULT_TERM_CAP,
};

/// Outcome of one suite.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Checks where the dispatcher had no closed form.
    pub unclassified: usize,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.unclassified == 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checks, {} failures, {} unclassified",
            self.name,
            self.checks,
            self.failures.len(),
            self.unclassified
        )
    }
}

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &["gauss-laws", "jacobi-pairs", "jacobi-triples", "recursion", "counting", "tilde"];

pub fn run_suite(name: &str, tol: f64, seed: u64) -> Result<SuiteReport> {
    match name {
        "gauss-laws" => gauss_laws(&gauss_rings()?, tol, seed),
        "jacobi-pairs" => jacobi_suite(&small_rings()?, 2, tol),
        "jacobi-triples" => jacobi_suite(&small_rings()?, 3, tol),
        "recursion" => recursion(&recursion_rings()?, tol, false),
        "counting" => counting(&small_rings()?),
        "tilde" => tilde_cases(&small_rings()?, 500, tol, seed),
        other => Err(Error::Parse(format!(
            "unknown suite '{other}' (expected one of {})",
            SUITES.join(", ")
        ))),
    }
}

/// `Z_4, Z_8, Z_9, Z_27, GR(4,16), GR(8,64), GR(9,81)`.
pub fn gauss_rings() -> Result<Vec<GaloisRing>> {
    [(2, 2, 1), (2, 3, 1), (3, 2, 1), (3, 3, 1), (2, 2, 2), (2, 3, 2), (3, 2, 2)]
        .iter()
        .map(|&(p, n, s)| GaloisRing::new(p, n, s))
        .collect()
}

/// `Z_9` and `GR(4,16)`.
pub fn small_rings() -> Result<Vec<GaloisRing>> {
    Ok(vec![GaloisRing::new(3, 2, 1)?, GaloisRing::new(2, 2, 2)?])
}

/// `Z_27` and `GR(8,64)`.
pub fn recursion_rings() -> Result<Vec<GaloisRing>> {
    Ok(vec![GaloisRing::new(3, 3, 1)?, GaloisRing::new(2, 3, 2)?])
}

fn ring_name(r: &GaloisRing) -> String {
    format!("GR({}^{}, s={})", r.p(), r.n(), r.s())
}

/// Canonical twists `0, 1, p, ..., p^{n-1}` and a random unit multiple of each.
pub fn gauss_twists(ring: &GaloisRing, rng: &mut ChaCha8Rng) -> Vec<RingElement> {
    let mut out = Vec::new();
    for t in Target::all(ring) {
        let b = t.element(ring);
        let u = *ring.unit_indices().choose(rng).expect("rings have units");
        out.push(ring.mul(&b, &ring.element(u)));
        out.push(b);
    }
    out
}

pub fn gauss_laws(rings: &[GaloisRing], tol: f64, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("gauss-laws");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for ring in rings {
        let twists = gauss_twists(ring, &mut rng);
        for chi in enumerate_characters(ring) {
            for b in &twists {
                let g = gauss_sum(ring, &chi, b)?;
                rep.check(g.agrees(tol), || {
                    format!("{}: G({chi}, λ_{:?}) = {} expected {}", ring_name(ring), b.coords(), g.value, g.expected)
                });
            }
        }
    }
    Ok(rep)
}

/// All ordered `m`-tuples of characters.
pub fn char_tuples(chars: &[MultCharacter], m: usize) -> Vec<Vec<MultCharacter>> {
    let mut out: Vec<Vec<MultCharacter>> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                chars.iter().map(move |c| {
                    let mut v = t.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Every ordered `m`-tuple against every canonical target.
pub fn jacobi_suite(rings: &[GaloisRing], m: usize, tol: f64) -> Result<SuiteReport> {
    let name = if m == 2 { "jacobi-pairs" } else { "jacobi-triples" };
    let mut rep = SuiteReport::new(name);
    for ring in rings {
        let chars = enumerate_characters(ring);
        for tuple in char_tuples(&chars, m) {
            for t in Target::all(ring) {
                let j = jacobi_sum(ring, &tuple, &t.element(ring), DEFAULT_TERM_CAP)?;
                if j.expected == Magnitude::Unclassified {
                    rep.unclassified += 1;
                }
                rep.check(j.agrees(tol), || {
                    let names: Vec<String> = tuple.iter().map(|c| c.to_string()).collect();
                    format!(
                        "{}: J_{t}({}) = {} expected {} ({})",
                        ring_name(ring),
                        names.join(", "),
                        j.value,
                        j.expected,
                        j.rule
                    )
                });
            }
        }
    }
    Ok(rep)
}

/// Pairs of characters that are all `(n-k)`-trivial, compared against the
/// reduced-ring sum scaled by `q^{(m-1)k}` (or `q^{mk}` when `literal`).
pub fn recursion(rings: &[GaloisRing], tol: f64, literal: bool) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(if literal { "recursion-literal" } else { "recursion" });
    let m = 2u32;
    for ring in rings {
        let n = ring.n();
        let chars = enumerate_characters(ring);
        let p = ring.p();
        let targets: Vec<RingElement> = [0u64, 1, p, p * p]
            .iter()
            .filter(|&&a| a == 0 || a < ring.char_modulus())
            .map(|&a| ring.scalar(a))
            .collect();
        for k in 1..n {
            let eligible: Vec<&MultCharacter> = chars.iter().filter(|c| c.level() <= n - k).collect();
            for c1 in &eligible {
                for c2 in &eligible {
                    let pair = [(*c1).clone(), (*c2).clone()];
                    for a in &targets {
                        let full = jacobi_brute(ring, &pair, a, DEFAULT_TERM_CAP)?.value;
                        let e = if literal { m * k } else { (m - 1) * k };
                        let reduced = reduced_jacobi(ring, &pair, a, k, e, DEFAULT_TERM_CAP)?;
                        rep.check((full - reduced).norm() <= tol, || {
                            format!(
                                "{}: k={k} J_{:?}({}, {}) = {} but scaled reduced sum = {}",
                                ring_name(ring),
                                a.coords(),
                                c1,
                                c2,
                                full,
                                reduced
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Unit-solution counts and `|S|` against enumeration.
pub fn counting(rings: &[GaloisRing]) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("counting");
    for ring in rings {
        let (q, n) = (ring.q(), ring.n());
        let p = ring.scalar(ring.p());
        for m in [2usize, 3] {
            for a in [ring.zero(), ring.one(), p.clone()] {
                let in_m = !ring.is_unit(&a);
                let formula = count_unit_solutions(q, n, m as u32, in_m)?.count;
                let brute = brute_count(ring, m, &a, DEFAULT_TERM_CAP)?.count;
                rep.check(formula == brute, || {
                    format!("{}: m={m} a={:?}: formula {formula}, brute {brute}", ring_name(ring), a.coords())
                });
            }
        }
        for (m, k) in [(2usize, 1usize), (3, 1), (3, 2)] {
            for a in [ring.zero(), ring.one(), p.clone()] {
                let formula = s_cardinality(q, n, m as u32, k as u32)?;
                let brute = s_enumerate(ring, m, k, &a, DEFAULT_TERM_CAP)?;
                rep.check(formula == brute, || {
                    format!("{}: |S| m={m} k={k} a={:?}: formula {formula}, brute {brute}", ring_name(ring), a.coords())
                });
            }
        }
    }
    Ok(rep)
}

/// Random `(characters, k, a)` configurations for `J̃`, spread over the
/// four trivial/nontrivial patterns.
pub fn tilde_cases(rings: &[GaloisRing], count: usize, tol: f64, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("tilde");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let ring = &rings[i % rings.len()];
        let chars = enumerate_characters(ring);
        let trivial = chars[0].clone();
        let nontrivial: Vec<MultCharacter> = chars[1..].to_vec();
        let m = if i % 3 == 0 { 2 } else { 3 };
        let k = 1 + (i / 2) % (m - 1);
        // pattern: 0 = unit tail, 1 = all trivial, 2 = trivial tail, 3 = mixed tail
        let pattern = i % 4;
        let mut tuple: Vec<MultCharacter> = (0..m)
            .map(|_| {
                if rand::Rng::gen_bool(&mut rng, 0.5) {
                    trivial.clone()
                } else {
                    nontrivial.choose(&mut rng).expect("nonempty").clone()
                }
            })
            .collect();
        match pattern {
            0 => tuple[k..]
                .iter_mut()
                .for_each(|c| *c = nontrivial.choose(&mut rng).expect("nonempty").clone()),
            1 => tuple.iter_mut().for_each(|c| *c = trivial.clone()),
            2 => tuple[k..].iter_mut().for_each(|c| *c = trivial.clone()),
            _ => {
                if m - k >= 2 {
                    tuple[k] = trivial.clone();
                    tuple[m - 1] = nontrivial.choose(&mut rng).expect("nonempty").clone();
                }
            }
        }
        let a = ring.element(rand::Rng::gen_range(&mut rng, 0..ring.size()));
        let t = tilde_jacobi(ring, &tuple, k, &a, DEFAULT_TERM_CAP)?;
        if t.expected == Magnitude::Unclassified {
            rep.unclassified += 1;
        }
        rep.check(t.agrees(tol), || {
            let names: Vec<String> = tuple.iter().map(|c| c.to_string()).collect();
            format!(
                "{}: J̃_{:?}({}; k={k}) = {} expected {} ({})",
                ring_name(ring),
                a.coords(),
                names.join(", "),
                t.value,
                t.expected,
                t.rule
            )
        });
    }
    Ok(rep)
}

/// Product character of a tuple, re-exported for report formatting.
pub fn product_level(ring: &GaloisRing, chars: &[MultCharacter]) -> Result<u32> {
    Ok(char_product(ring, chars)?.level())
}
