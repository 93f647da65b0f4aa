//! Jacobi-sum codebooks `C = F ∪ E_K`, their maximum cross-correlation, and
//! the Welch bound.
//!
//! A row of `F` is indexed by `a_1 ∈ F_q` and pairs `(ψ_i, a_i)` for
//! `i = 2..m`, where `ψ_i` runs over characters of `GR(p^{n-1}, ·)`. Its
//! characters are `χ_1 = ψ_0 φ_{a_1}` and `χ_i = ψ_i φ_{a_i}` (lifted, with
//! `φ_a` extended by a fixed [`Section`]), and its entries are the products
//! `Π χ_i(x_i)` over `S = {x ∈ (R*)^k × R^{m-k} : Σ x_i = a}` in
//! lexicographic order, scaled to unit norm by the support size.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, prime_power};
use crate::characters::{
    char_mul, character, enumerate_characters, extend_phi, lift_character, numerator_table, root_table,
    MultCharacter, Section, NONE,
};
use crate::error::{Error, Result};
use crate::ring::{GaloisRing, RingDescription, RingElement};
use crate::sums::s_cardinality;

/// Default cap on `N · K` matrix entries.
pub const DEFAULT_ENTRY_CAP: u128 = 100_000_000;
/// Default cap on the number of row pairs scanned for `I_max`.
pub const DEFAULT_PAIR_CAP: u128 = 10_000_000;
/// Values of `q` listed in the published parameter table.
pub const TABLE2_Q: [u64; 8] = [11, 19, 31, 53, 81, 121, 179, 256];

const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodebookParams {
    pub m: usize,
    pub k: usize,
    pub a: RingElement,
    /// Exponents of `ψ_0` against the unit basis of `GR(p^{n-1}, ·)`.
    pub psi0: Vec<u64>,
    pub section: Section,
    /// Permit `a ∈ M`, for which the optimality statement does not apply.
    pub allow_non_unit: bool,
}

impl CodebookParams {
    /// `a = 1`, trivial `ψ_0`, default section.
    pub fn new(ring: &GaloisRing, m: usize, k: usize) -> Result<Self> {
        if ring.n() < 2 {
            return Err(Error::InvalidParams("codebooks need n >= 2".into()));
        }
        let rank = ring.reduced(1)?.unit_group().rank();
        Ok(Self {
            m,
            k,
            a: ring.one(),
            psi0: vec![0; rank],
            section: Section::default(),
            allow_non_unit: false,
        })
    }
}

/// `(N, K)` for the construction: `N = q(q^n - q^{n-1})^{m-1} + K`.
pub fn dimensions(q: u64, n: u32, m: u32, k: u32) -> Result<(u128, u128)> {
    let big_k = s_cardinality(q, n, m, k)?;
    let overflow = || Error::InvalidParams("codebook size overflows u128".into());
    let qn = checked_pow(q as u128, n).ok_or_else(overflow)?;
    let units = qn - qn / q as u128;
    let f = checked_pow(units, m - 1)
        .and_then(|u| u.checked_mul(q as u128))
        .and_then(|v| v.checked_add(big_k))
        .ok_or_else(overflow)?;
    Ok((f, big_k))
}

/// Metadata stored with every codebook and in its JSON export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodebookMeta {
    pub ring: RingDescription,
    pub m: usize,
    pub k: usize,
    pub a: RingElement,
    pub psi0: Vec<u64>,
    pub section: Section,
    #[serde(rename = "N")]
    pub n_rows: usize,
    #[serde(rename = "K")]
    pub length: usize,
}

/// What a row stands for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowIndex {
    /// Standard basis vector with a 1 at `position`.
    Basis { position: usize },
    /// `a_1` and `(ψ_i, a_i)` for `i = 2..m`, as indices into the residue
    /// field and the character list of `GR(p^{n-1}, ·)`.
    Characters { a1: usize, tail: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub meta: CodebookMeta,
    #[serde(with = "complex_rows")]
    pub rows: Vec<Vec<Complex64>>,
    pub index: Vec<RowIndex>,
    pub support: Vec<usize>,
}

mod complex_rows {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = rows.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect())
    }
}

impl Codebook {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn length(&self) -> usize {
        self.meta.length
    }

    /// Largest deviation of a row norm from 1.
    pub fn max_norm_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Tuples of `S` as element indices, in lexicographic order.
pub fn s_tuples(ring: &GaloisRing, m: usize, k: usize, a: &RingElement) -> Vec<Vec<usize>> {
    let a_idx = ring.index_of(a);
    let all: Vec<usize> = (0..ring.size()).collect();
    let domains: Vec<&[usize]> = (0..m - 1)
        .map(|i| if i < k { ring.unit_indices() } else { &all[..] })
        .collect();
    let mut out = Vec::new();
    let mut prefix: Vec<usize> = Vec::with_capacity(m);
    fn walk(
        ring: &GaloisRing,
        domains: &[&[usize]],
        a_idx: usize,
        sum: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == domains.len() {
            let mut t = prefix.clone();
            t.push(ring.sub_idx(a_idx, sum));
            out.push(t);
            return;
        }
        for &x in domains[prefix.len()] {
            prefix.push(x);
            walk(ring, domains, a_idx, ring.add_idx(sum, x), prefix, out);
            prefix.pop();
        }
    }
    walk(ring, &domains, a_idx, 0, &mut prefix, &mut out);
    out
}

/// The character `lift(ψ) · χ̃_a` for every `(ψ, a)`, indexed `ψ * q + a`.
fn row_characters(
    ring: &GaloisRing,
    reduced: &GaloisRing,
    field: &GaloisRing,
    psis: &[MultCharacter],
    section: Section,
) -> Result<Vec<MultCharacter>> {
    let phis = (0..field.size())
        .map(|a| extend_phi(ring, field, a, section))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(psis.len() * phis.len());
    for psi in psis {
        let lifted = lift_character(ring, reduced, psi)?;
        for phi in &phis {
            out.push(char_mul(ring, &lifted, phi)?);
        }
    }
    Ok(out)
}

/// Builds `C = F ∪ E_K`.
pub fn build_codebook(ring: &GaloisRing, params: &CodebookParams, cap: u128) -> Result<Codebook> {
    let (m, k) = (params.m, params.k);
    if m < 2 || k < 1 || k >= m {
        return Err(Error::InvalidParams(format!("need m >= 2 and 1 <= k <= m-1 (got m = {m}, k = {k})")));
    }
    if ring.n() < 2 {
        return Err(Error::InvalidParams("codebooks need n >= 2".into()));
    }
    ring.validate(&params.a)?;
    if !ring.is_unit(&params.a) {
        if !params.allow_non_unit {
            return Err(Error::NotAUnit);
        }
        log::warn!("a is not a unit: the codebook is built but the optimality statement does not apply");
    }
    let (n_rows, length) = dimensions(ring.q(), ring.n(), m as u32, k as u32)?;
    let entries = n_rows.saturating_mul(length);
    if entries > cap {
        return Err(Error::TooLarge { terms: entries, cap });
    }

    let reduced = ring.reduced(1)?;
    let field = ring.residue_field()?;
    let q = field.size();
    let psis = enumerate_characters(&reduced);
    let psi0 = character(&reduced, &params.psi0)?;
    let chars = row_characters(ring, &reduced, &field, &psis, params.section)?;
    let head = row_characters(ring, &reduced, &field, std::slice::from_ref(&psi0), params.section)?;

    let order = ring.unit_group().exponent();
    let roots = root_table(order);
    let tables: Vec<Vec<u32>> = chars.iter().map(|c| numerator_table(ring, c, order, true)).collect();
    let head_tables: Vec<Vec<u32>> = head.iter().map(|c| numerator_table(ring, c, order, true)).collect();

    let tuples = s_tuples(ring, m, k, &params.a);
    debug_assert_eq!(tuples.len() as u128, length);

    // Row labels in lexicographic order of (a_1, ψ_2, a_2, ..., ψ_m, a_m).
    let per_slot = psis.len() * q;
    let tail_count = per_slot.pow(m as u32 - 1);
    let mut index = Vec::with_capacity(n_rows as usize);
    for a1 in 0..q {
        for mut code in 0..tail_count {
            let mut tail = vec![(0usize, 0usize); m - 1];
            for slot in tail.iter_mut().rev() {
                let c = code % per_slot;
                code /= per_slot;
                *slot = (c / q, c % q);
            }
            index.push(RowIndex::Characters { a1, tail });
        }
    }

    let f_rows: Vec<(Vec<Complex64>, usize)> = index
        .par_iter()
        .map(|label| {
            let RowIndex::Characters { a1, tail } = label else {
                unreachable!("only character rows so far")
            };
            let mut row_tables: Vec<&[u32]> = vec![&head_tables[*a1]];
            row_tables.extend(tail.iter().map(|&(psi, a)| &tables[psi * q + a][..]));
            let nums: Vec<u32> = tuples
                .iter()
                .map(|t| {
                    t.iter().zip(&row_tables).try_fold(0u64, |acc, (&x, tab)| {
                        let v = tab[x];
                        (v != NONE).then(|| (acc + v as u64) % order)
                    })
                })
                .map(|v| v.map_or(NONE, |v| v as u32))
                .collect();
            let support = nums.iter().filter(|&&v| v != NONE).count();
            let scale = 1.0 / (support as f64).sqrt();
            let row = nums
                .iter()
                .map(|&v| {
                    if v == NONE {
                        Complex64::new(0.0, 0.0)
                    } else {
                        roots[v as usize] * scale
                    }
                })
                .collect();
            (row, support)
        })
        .collect();

    let length = length as usize;
    let mut rows = Vec::with_capacity(n_rows as usize);
    let mut support = Vec::with_capacity(n_rows as usize);
    for (r, s) in f_rows {
        rows.push(r);
        support.push(s);
    }
    for position in 0..length {
        let mut e = vec![Complex64::new(0.0, 0.0); length];
        e[position] = Complex64::new(1.0, 0.0);
        rows.push(e);
        support.push(1);
        index.push(RowIndex::Basis { position });
    }

    Ok(Codebook {
        meta: CodebookMeta {
            ring: ring.description(),
            m,
            k,
            a: params.a.clone(),
            psi0: params.psi0.clone(),
            section: params.section,
            n_rows: rows.len(),
            length,
        },
        rows,
        index,
        support,
    })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(rename = "N")]
    pub n_rows: usize,
    #[serde(rename = "K")]
    pub length: usize,
    pub imax_measured: f64,
    pub imax_formula: f64,
    pub welch: f64,
    /// `imax_measured / welch`.
    pub ratio: f64,
    pub argmax: [usize; 2],
}

/// `|⟨u, v⟩|` with the conjugate-transpose inner product `u v^H`.
pub fn correlation(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter()
        .zip(v)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
        .norm()
}

/// Keeps the larger value; near-ties keep the earlier pair.
fn better(best: (f64, [usize; 2]), cand: (f64, [usize; 2])) -> (f64, [usize; 2]) {
    if cand.0 > best.0 + TIE_EPS || ((cand.0 - best.0).abs() <= TIE_EPS && cand.1 < best.1) {
        cand
    } else {
        best
    }
}

/// Largest `|c_i c_j^H|` over `i < j`, with the pair that attains it.
pub fn max_correlation(rows: &[Vec<Complex64>], cap: u128) -> Result<(f64, [usize; 2])> {
    let n = rows.len() as u128;
    let pairs = n * n.saturating_sub(1) / 2;
    if pairs > cap {
        return Err(Error::TooLarge { terms: pairs, cap });
    }
    let per_row: Vec<(f64, [usize; 2])> = (0..rows.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..rows.len()).fold((-1.0, [usize::MAX, usize::MAX]), |best, j| {
                better(best, (correlation(&rows[i], &rows[j]), [i, j]))
            })
        })
        .collect();
    let best = per_row.into_iter().fold((-1.0, [0, 0]), |best, cand| {
        if cand.1[0] == usize::MAX {
            best
        } else {
            better(best, cand)
        }
    });
    Ok((best.0.max(0.0), best.1))
}

/// Exhaustive `I_max` together with the closed form and the Welch bound.
pub fn imax_exhaustive(cb: &Codebook, cap: u128) -> Result<EvalReport> {
    let (imax, argmax) = max_correlation(&cb.rows, cap)?;
    let d = &cb.meta.ring;
    let q = d.p.pow(d.s);
    let welch = welch_bound(cb.rows.len() as u128, cb.meta.length as u128)?;
    let a_unit = cb.meta.a.coords().iter().any(|c| c % d.p != 0);
    let imax_formula = if a_unit {
        imax_formula(q, d.n, cb.meta.m as u32)
    } else if cb.meta.a.coords().iter().all(|&c| c == 0) {
        imax_remark(q, d.n, cb.meta.m as u32, RemarkCase::Zero)
    } else {
        imax_remark(q, d.n, cb.meta.m as u32, RemarkCase::NonUnit)
    };
    Ok(EvalReport {
        n_rows: cb.rows.len(),
        length: cb.meta.length,
        imax_measured: imax,
        imax_formula,
        welch,
        ratio: imax / welch,
        argmax,
    })
}

fn bracket(q: f64, m: u32, plus_q_minus_one: bool) -> f64 {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    if plus_q_minus_one {
        (q - 1.0).powi(m as i32) + sign * (q - 1.0)
    } else {
        (q - 1.0).powi(m as i32) - sign
    }
}

/// `q^{(m-1)n/2} / (q^{mn-m-n}((q-1)^m + (-1)^{m+1}))`.
pub fn imax_formula(q: u64, n: u32, m: u32) -> f64 {
    let qf = q as f64;
    let e = (m * n) as i32 - m as i32 - n as i32;
    qf.powf((m - 1) as f64 * n as f64 / 2.0) / (qf.powi(e) * bracket(qf, m, false))
}

/// Which non-unit `a` a codebook was built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemarkCase {
    /// `a = 0`.
    Zero,
    /// `a ∈ M \ {0}`.
    NonUnit,
}

/// Claimed `I_max` for the non-unit choices of `a`.
pub fn imax_remark(q: u64, n: u32, m: u32, case: RemarkCase) -> f64 {
    let qf = q as f64;
    match case {
        RemarkCase::Zero => {
            let e = (m * n) as i32 - m as i32 - n as i32;
            (qf.powi(n as i32) - qf.powi(n as i32 - 1)) * qf.powf((m as f64 - 2.0) * n as f64 / 2.0)
                / (qf.powi(e) * bracket(qf, m, true))
        }
        RemarkCase::NonUnit => {
            let e = 2 * m as i32 + 2 * n as i32 - (m * n) as i32 - 1;
            qf.powi(e).sqrt() / bracket(qf, m, true)
        }
    }
}

/// `sqrt((N - K) / ((N - 1) K))`.
pub fn welch_bound(n: u128, k: u128) -> Result<f64> {
    if k < 1 || n <= k {
        return Err(Error::DegenerateDimensions { n, k });
    }
    Ok(((n - k) as f64 / ((n - 1) as f64 * k as f64)).sqrt())
}

/// `I_max / I_W` for the construction's parameters.
pub fn asymptotic_ratio(q: u64, n: u32, m: u32, k: u32) -> Result<f64> {
    let (big_n, big_k) = dimensions(q, n, m, k)?;
    Ok(imax_formula(q, n, m) / welch_bound(big_n, big_k)?)
}

/// `I_W / I_max` through the closed quotient
/// `sqrt(q^{mn-3m-n+k+2} (q-1)^{m-k-1} ((q-1)^m + (-1)^{m+1})^2 /
/// (q (q^n - q^{n-1})^{m-1} + (q-1)^k q^{mn-k-n} - 1))`.
pub fn welch_over_imax(q: u64, n: u32, m: u32, k: u32) -> f64 {
    let qf = q as f64;
    let (mi, ni, ki) = (m as i32, n as i32, k as i32);
    let num = qf.powi(mi * ni - 3 * mi - ni + ki + 2) * (qf - 1.0).powi(mi - ki - 1) * bracket(qf, m, false).powi(2);
    let units = qf.powi(ni) - qf.powi(ni - 1);
    let den = qf * units.powi(mi - 1) + (qf - 1.0).powi(ki) * qf.powi(mi * ni - ki - ni) - 1.0;
    (num / den).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub q: u64,
    #[serde(rename = "N")]
    pub n_rows: u128,
    #[serde(rename = "K")]
    pub length: u128,
    pub imax: f64,
    pub welch: f64,
    pub ratio: f64,
}

/// Decimal places used when printing a row: more for larger `q`, whose
/// values are smaller.
pub fn table2_decimals(q: u64) -> usize {
    match q {
        0..=30 => 9,
        31..=178 => 10,
        _ => 11,
    }
}

impl fmt::Display for Table2Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = table2_decimals(self.q);
        write!(
            f,
            "{:>5} {:>15} {:>12} {:>16.d$} {:>16.d$} {:>16.d$}",
            self.q,
            self.n_rows,
            self.length,
            self.imax,
            self.welch,
            self.ratio,
            d = d
        )
    }
}

/// Parameters of the `n = 2, m = 3, k = 1` codebooks for each `q`.
pub fn table2(qs: &[u64]) -> Result<Vec<Table2Row>> {
    qs.iter()
        .map(|&q| {
            if prime_power(q).is_none() {
                return Err(Error::NotPrimePower(q));
            }
            let (n_rows, length) = dimensions(q, 2, 3, 1)?;
            let imax = imax_formula(q, 2, 3);
            let welch = welch_bound(n_rows, length)?;
            Ok(Table2Row {
                q,
                n_rows,
                length,
                imax,
                welch,
                ratio: imax / welch,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Parse(format!("unknown export format '{other}'"))),
        }
    }
}

/// One line per row, `re,im` pairs interleaved. Floats use the shortest
/// representation that parses back to the same bits.
pub fn export_csv(rows: &[Vec<Complex64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn import_csv(text: &str) -> Result<Vec<Vec<Complex64>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let vals = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() % 2 != 0 {
                return Err(Error::Parse(format!("line {}: odd number of values", i + 1)));
            }
            Ok(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
        })
        .collect()
}

pub fn export_json(cb: &Codebook) -> Result<String> {
    Ok(serde_json::to_string(cb)?)
}

pub fn import_json(text: &str) -> Result<Codebook> {
    Ok(serde_json::from_str(text)?)
}

pub fn export_codebook(cb: &Codebook, format: ExportFormat) -> Result<Vec<u8>> {
    Ok(match format {
        ExportFormat::Csv => export_csv(&cb.rows).into_bytes(),
        ExportFormat::Json => export_json(cb)?.into_bytes(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimensions(3, 2, 3, 1).unwrap(), (162, 54));
        assert_eq!(dimensions(4, 2, 3, 1).unwrap(), (768, 192));
        assert_eq!(dimensions(11, 2, 3, 1).unwrap(), (146410, 13310));
    }

    #[test]
    fn formula_examples() {
        assert!(close(imax_formula(11, 2, 3), 0.010989011, 5e-10));
        assert!(close(imax_formula(19, 2, 3), 0.003257329, 5e-10));
        assert!(close(imax_formula(3, 2, 3), 1.0 / 3.0, 1e-15));
        assert!(close(imax_formula(4, 2, 3), 1.0 / 7.0, 1e-15));
        // substituting q = 3, n = 2, m = 3
        assert!(close(imax_remark(3, 2, 3, RemarkCase::Zero), 1.0, 1e-15));
        assert!(close(imax_remark(3, 2, 3, RemarkCase::NonUnit), 27f64.sqrt() / 6.0, 1e-15));
    }

    #[test]
    fn welch_examples() {
        assert!(close(welch_bound(146410, 13310).unwrap(), 0.008264491, 5e-10));
        assert!(close(welch_bound(2345778, 123462).unwrap(), 0.002770084, 5e-10));
        assert!(close(welch_bound(2, 1).unwrap(), 1.0, 1e-15));
        assert!(matches!(welch_bound(5, 5), Err(Error::DegenerateDimensions { .. })));
    }

    #[test]
    fn ratio_examples() {
        assert!(close(asymptotic_ratio(11, 2, 3, 1).unwrap(), 1.329665789, 5e-10));
        assert!(close(asymptotic_ratio(256, 2, 3, 1).unwrap(), 1.01181084127, 5e-12));
        for q in TABLE2_Q {
            let r = asymptotic_ratio(q, 2, 3, 1).unwrap();
            assert!(close(1.0 / r, welch_over_imax(q, 2, 3, 1), 1e-12), "q = {q}");
        }
    }

    #[test]
    fn table2_rejects_non_prime_powers() {
        assert!(matches!(table2(&[12]), Err(Error::NotPrimePower(12))));
        let rows = table2(&[53]).unwrap();
        assert_eq!((rows[0].n_rows, rows[0].length), (410305012, 7741604));
    }

    #[test]
    fn basis_rows_csv() {
        let rows = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        assert_eq!(export_csv(&rows), "1,0,0,0\n0,0,1,0\n");
        assert_eq!(import_csv(&export_csv(&rows)).unwrap(), rows);
        assert_eq!(max_correlation(&rows, DEFAULT_PAIR_CAP).unwrap().0, 0.0);
    }

    #[test]
    fn small_codebook() {
        let ring = GaloisRing::new(3, 2, 1).unwrap();
        let params = CodebookParams::new(&ring, 3, 1).unwrap();
        let cb = build_codebook(&ring, &params, DEFAULT_ENTRY_CAP).unwrap();
        assert_eq!((cb.n_rows(), cb.length()), (162, 54));
        assert!(cb.max_norm_error() < 1e-12);
        let rep = imax_exhaustive(&cb, DEFAULT_PAIR_CAP).unwrap();
        assert!(close(rep.imax_measured, 1.0 / 3.0, 1e-9));
        let mut bad = params.clone();
        bad.a = ring.scalar(3);
        assert!(matches!(build_codebook(&ring, &bad, DEFAULT_ENTRY_CAP), Err(Error::NotAUnit)));
    }
}
