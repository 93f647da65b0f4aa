use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use galois_sums::characters::{char_inv, char_mul, enumerate_characters, eval, MultCharacter};
use galois_sums::sums::{canonicalize, gauss_brute, jacobi_brute, DEFAULT_TERM_CAP};
use galois_sums::GaloisRing;

/// `Z_9`, `GR(4,16)`, `Z_27`, `Z_8`.
fn rings() -> &'static [GaloisRing] {
    static RINGS: OnceLock<Vec<GaloisRing>> = OnceLock::new();
    RINGS.get_or_init(|| {
        [(3, 2, 1), (2, 2, 2), (3, 3, 1), (2, 3, 1)]
            .iter()
            .map(|&(p, n, s)| GaloisRing::new(p, n, s).unwrap())
            .collect()
    })
}

fn is_primitive(r: &GaloisRing, c: &MultCharacter) -> bool {
    c.level() == r.n()
}

fn j(r: &GaloisRing, chars: &[MultCharacter], a: u64) -> Complex64 {
    jacobi_brute(r, chars, &r.scalar(a), DEFAULT_TERM_CAP).unwrap().value
}

#[test]
fn pair_sum_at_zero() {
    for r in &rings()[..2] {
        let chars = enumerate_characters(r);
        let minus_one = r.neg(&r.one());
        for c1 in &chars {
            for c2 in &chars {
                let prod = char_mul(r, c1, c2).unwrap();
                let expect = if prod.is_trivial() {
                    eval(r, c2, &minus_one).unwrap().to_complex() * r.unit_count() as f64
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((j(r, &[c1.clone(), c2.clone()], 0) - expect).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn pair_sum_through_gauss_sums() {
    for r in &rings()[..2] {
        let chars = enumerate_characters(r);
        let one = r.one();
        for c1 in &chars {
            for c2 in &chars {
                let prod = char_mul(r, c1, c2).unwrap();
                if !is_primitive(r, &prod) {
                    continue;
                }
                let g = |c: &MultCharacter| gauss_brute(r, c, &one).unwrap();
                let expect = g(c1) * g(c2) / g(&prod);
                assert!((j(r, &[c1.clone(), c2.clone()], 1) - expect).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn shifted_pair_through_gauss_sums() {
    let mut checked = 0;
    for r in &rings()[..2] {
        let (n, q, p) = (r.n(), r.q(), r.p());
        let chars = enumerate_characters(r);
        let one = r.one();
        for c1 in &chars {
            for c2 in chars.iter().filter(|c| is_primitive(r, c)) {
                let prod = char_mul(r, c1, c2).unwrap();
                let t = prod.level();
                if t == 0 || t >= n {
                    continue;
                }
                let k = n - t;
                let pk = r.scalar(p.pow(k));
                let lhs = j(r, &[c1.clone(), c2.clone()], p.pow(k)) * gauss_brute(r, &prod, &pk).unwrap();
                let rhs = gauss_brute(r, c1, &one).unwrap() * gauss_brute(r, c2, &one).unwrap() * (q.pow(k) as f64);
                assert!((lhs - rhs).norm() < 1e-9, "{c1} {c2}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

fn arb_case(m: usize) -> impl Strategy<Value = (usize, Vec<prop::sample::Index>, prop::sample::Index)> {
    (0usize..4, prop::collection::vec(any::<prop::sample::Index>(), m), any::<prop::sample::Index>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gauss_conjugation(ri in 0usize..4, c in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let r = &rings()[ri];
        let chars = enumerate_characters(r);
        let chi = &chars[c.index(chars.len())];
        let b = r.element(b.index(r.size()));
        let lhs = gauss_brute(r, &char_inv(r, chi).unwrap(), &r.neg(&b)).unwrap();
        let rhs = gauss_brute(r, chi, &b).unwrap().conj();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn jacobi_permutation_symmetry((ri, cs, a) in arb_case(3), rot in 1usize..3) {
        let r = &rings()[ri];
        let chars = enumerate_characters(r);
        let tuple: Vec<MultCharacter> = cs.iter().map(|c| chars[c.index(chars.len())].clone()).collect();
        let a = r.element(a.index(r.size()));
        let base = jacobi_brute(r, &tuple, &a, DEFAULT_TERM_CAP).unwrap().value;
        let mut rotated = tuple.clone();
        rotated.rotate_left(rot);
        let mut swapped = tuple.clone();
        swapped.swap(0, 1);
        for other in [rotated, swapped] {
            let v = jacobi_brute(r, &other, &a, DEFAULT_TERM_CAP).unwrap().value;
            prop_assert!((v - base).norm() < 1e-9);
        }
    }

    #[test]
    fn canonical_target_reduction((ri, cs, a) in arb_case(2)) {
        let r = &rings()[ri];
        let chars = enumerate_characters(r);
        let tuple: Vec<MultCharacter> = cs.iter().map(|c| chars[c.index(chars.len())].clone()).collect();
        let a = r.element(a.index(r.size()));
        let canon = canonicalize(r, &tuple, &a).unwrap();
        let direct = jacobi_brute(r, &tuple, &a, DEFAULT_TERM_CAP).unwrap().value;
        let via = jacobi_brute(r, &tuple, &canon.target.element(r), DEFAULT_TERM_CAP).unwrap().value;
        prop_assert!((direct - canon.scalar.to_complex() * via).norm() < 1e-9);
    }
}
