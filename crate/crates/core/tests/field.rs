mod common;

use addmds::field::{Field, FieldError, FieldTower};
use common::{poly_add, poly_mul};
use proptest::prelude::*;

fn f9() -> Field {
    Field::new(3, 2, None).unwrap()
}

#[test]
fn f9_uses_the_corpus_modulus() {
    let f = f9();
    let w = f.omega();
    // ω² = ω + 1
    assert_eq!(f.mul(w, w), f.add(w, 1));
    assert_eq!(f, Field::parse_descriptor("3^2:x^2-x-1").unwrap());
    assert_eq!(f, Field::parse_descriptor("9").unwrap());
}

#[test]
fn omega_has_full_order() {
    for q in [2u32, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128, 243, 256] {
        let f = Field::of_order(q).unwrap();
        let w = f.omega();
        let mut x = 1;
        for k in 1..q {
            x = f.mul(x, w);
            assert_eq!(x == 1, k == q - 1, "q={q}, k={k}");
        }
    }
}

#[test]
fn prime_field_omega_is_generator_and_f2_omega_is_one() {
    assert_eq!(Field::new(2, 1, None).unwrap().omega(), 1);
}

#[test]
fn reducible_and_invalid_moduli_are_rejected() {
    assert!(matches!(Field::new(2, 2, Some(&[0, 1, 1])), Err(FieldError::Reducible(_))));
    assert!(matches!(Field::new(4, 1, None), Err(FieldError::NotPrime(4))));
    assert!(matches!(Field::new(3, 0, None), Err(FieldError::ZeroDegree)));
    assert!(Field::parse_descriptor("2^2:x^2+x").is_err());
    assert!(Field::parse_descriptor("6").is_err());
}

#[test]
fn pinned_moduli() {
    let d = |q: u32| Field::of_order(q).unwrap().descriptor();
    assert_eq!(Field::of_order(4).unwrap(), Field::parse_descriptor("2^2:x^2+x+1").unwrap());
    assert_eq!(Field::of_order(8).unwrap(), Field::parse_descriptor("2^3:x^3+x+1").unwrap());
    assert_eq!(Field::of_order(16).unwrap(), Field::parse_descriptor("2^4:x^4+x+1").unwrap());
    // Descriptors round-trip.
    for q in [4u32, 8, 9, 16, 25, 27, 32] {
        assert_eq!(Field::parse_descriptor(&d(q)).unwrap(), Field::of_order(q).unwrap());
    }
}

#[test]
fn f9_examples() {
    let f = f9();
    let w = f.omega();
    assert_eq!(f.pow(w, 8), Some(1));
    assert_eq!(f.add(w, 0), w);
    assert_eq!(f.inv(0), None);
    // Repeated squaring oracle for ω^8 over the plain multiplication.
    let w2 = poly_mul(3, &[2, 2, 1], w, w);
    let w4 = poly_mul(3, &[2, 2, 1], w2, w2);
    assert_eq!(poly_mul(3, &[2, 2, 1], w4, w4), 1);
}

#[test]
fn arithmetic_matches_polynomial_oracle() {
    for q in [4u32, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 243, 256, 343] {
        let f = Field::of_order(q).unwrap();
        let m = f.modulus().to_vec();
        for a in 0..q {
            for b in 0..q {
                assert_eq!(f.mul(a, b), poly_mul(f.p(), &m, a, b), "q={q} {a}*{b}");
                assert_eq!(f.add(a, b), poly_add(f.p(), f.e(), a, b), "q={q} {a}+{b}");
            }
        }
    }
}

#[test]
fn inverses_and_negation() {
    for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 64, 81, 128, 243, 256, 512] {
        let f = Field::of_order(q).unwrap();
        for a in 1..q {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        for a in 0..q {
            assert_eq!(f.add(a, f.neg(a)), 0);
            assert_eq!(f.sub(a, a), 0);
        }
    }
}

proptest! {
    #[test]
    fn field_axioms(qi in 0usize..12, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = [2u32, 3, 4, 5, 8, 9, 16, 25, 27, 49, 256, 512][qi];
        let f = Field::of_order(q).unwrap();
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
    }

    #[test]
    fn pow_matches_repeated_multiplication(qi in 0usize..6, a in any::<u32>(), k in 0i64..40) {
        let q = [3u32, 4, 8, 9, 16, 27][qi];
        let f = Field::of_order(q).unwrap();
        let a = a % q;
        let mut x = 1;
        for _ in 0..k {
            x = f.mul(x, a);
        }
        prop_assert_eq!(f.pow(a, k), Some(x));
    }

    #[test]
    fn element_tokens_round_trip(qi in 0usize..5, a in any::<u32>()) {
        let q = [4u32, 8, 9, 16, 81][qi];
        let f = Field::of_order(q).unwrap();
        let a = a % q;
        prop_assert_eq!(f.parse_element(&f.format_element(a)).unwrap(), a);
        prop_assert_eq!(f.parse_element(&a.to_string()).unwrap(), a);
    }
}

#[test]
fn trace_examples() {
    let t = FieldTower::standard(3, 2).unwrap();
    let w = t.ext().omega();
    assert_eq!(t.trace_down(0), 0);
    assert_eq!(t.trace_down(w), 1);
    // ω + ω³ by the table-free multiplication.
    let m = t.ext().modulus().to_vec();
    let w3 = poly_mul(3, &m, w, poly_mul(3, &m, w, w));
    assert_eq!(poly_add(3, 2, w, w3), 1);
    let t4 = FieldTower::standard(2, 2).unwrap();
    assert_eq!(t4.trace_down(t4.ext().omega()), 1);
}

#[test]
fn trace_is_balanced_and_linear() {
    for (q, h) in [(2u32, 2u32), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2), (5, 2), (2, 8), (7, 2), (8, 2), (3, 4)] {
        let t = FieldTower::standard(q, h).unwrap();
        let ext = t.ext();
        let mut fiber = vec![0u32; q as usize];
        for x in 0..ext.order() {
            fiber[t.trace_down(x) as usize] += 1;
        }
        assert!(fiber.iter().all(|&c| c == q.pow(h - 1)), "q={q} h={h}: {fiber:?}");
        for x in (0..ext.order()).step_by(7) {
            for y in (0..ext.order()).step_by(5) {
                let lhs = t.trace_down(ext.add(x, y));
                assert_eq!(lhs, t.base().add(t.trace_down(x), t.trace_down(y)));
            }
            for a in 0..q {
                let scaled = t.trace_down(ext.mul(t.embed(a), x));
                assert_eq!(scaled, t.base().mul(a, t.trace_down(x)));
            }
        }
    }
}

#[test]
fn expansion_examples_and_bijection() {
    let t = FieldTower::standard(3, 2).unwrap();
    let w = t.ext().omega();
    assert_eq!(t.expand(0), &[0, 0]);
    assert_eq!(t.expand(t.ext().add(w, 2)), &[2, 1]);
    assert!(t.contract(&[1, 2, 0]).is_err());
    for (q, h) in [(2u32, 2u32), (2, 3), (3, 2), (4, 2), (2, 6), (3, 3), (4, 3), (9, 2)] {
        let t = FieldTower::standard(q, h).unwrap();
        let mut seen = std::collections::HashSet::new();
        for x in 0..t.ext().order() {
            let v = t.expand(x).to_vec();
            assert_eq!(t.contract(&v).unwrap(), x);
            assert!(seen.insert(v));
        }
    }
}

#[test]
fn non_prime_base_embedding_is_a_homomorphism() {
    let t = FieldTower::standard(4, 2).unwrap();
    let (b, e) = (t.base(), t.ext());
    for x in 0..4 {
        assert_eq!(t.restrict(t.embed(x)), Some(x));
        for y in 0..4 {
            assert_eq!(t.embed(b.mul(x, y)), e.mul(t.embed(x), t.embed(y)));
            assert_eq!(t.embed(b.add(x, y)), e.add(t.embed(x), t.embed(y)));
        }
    }
}

#[test]
fn tower_rejects_bad_bases() {
    let base = Field::of_order(3).unwrap();
    let ext = Field::of_order(9).unwrap();
    assert!(matches!(FieldTower::new(base.clone(), ext.clone(), Some(vec![1, 2])), Err(FieldError::DependentBasis)));
    assert!(matches!(FieldTower::new(base.clone(), ext.clone(), Some(vec![1])), Err(FieldError::BasisLength { .. })));
    assert!(FieldTower::new(Field::of_order(2).unwrap(), ext, None).is_err());
    assert!(FieldTower::new(Field::of_order(4).unwrap(), Field::of_order(8).unwrap(), None).is_err());
}
