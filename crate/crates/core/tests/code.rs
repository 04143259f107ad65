mod common;

use std::sync::Arc;

use addmds::classify::{self, ClassifyOptions, Filters};
use addmds::code::{self, AdditiveCode, CodeError, MdsKind, MinDistanceAlgorithm};
use addmds::construct;
use addmds::corpus;
use addmds::field::FieldTower;
use addmds::formats;
use addmds::geometry::{self, ProjectiveSystem, Subspace};
use common::{all_codewords, brute_min_distance, naive_rank, random_code_retry};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn tower(q: u32, h: u32) -> Arc<FieldTower> {
    Arc::new(FieldTower::standard(q, h).unwrap())
}

fn arc(i: usize) -> ProjectiveSystem {
    formats::parse_arc(corpus::raw(&format!("A{i}")).unwrap()).unwrap()
}

fn printed_code(i: usize) -> AdditiveCode {
    formats::parse_code(corpus::raw(&format!("G{i}")).unwrap()).unwrap()
}

/// The code of arc `A_i`, built through the geometry correspondence.
fn arc_code(i: usize) -> AdditiveCode {
    code::code_from_system(&arc(i), tower(3, 2)).unwrap()
}

#[test]
fn expansion_examples() {
    let t = tower(3, 2);
    let w = t.ext().omega();
    let c = AdditiveCode::new(t.clone(), 1, vec![vec![w]]).unwrap();
    let m = c.expand_generator();
    assert_eq!((m.rows(), m.cols()), (1, 2));
    assert_eq!(m.row(0), &[0, 1]);
    let g1 = printed_code(1).expand_generator();
    assert_eq!((g1.rows(), g1.cols()), (5, 24));
    assert_eq!(naive_rank(t.base(), &g1.row_vecs()), 5);
    let z = AdditiveCode::new(t, 2, vec![vec![1, 0]]).unwrap();
    assert_eq!(&z.expand_generator().row(0)[2..], &[0, 0]);
}

#[test]
fn dependent_rows_are_rejected_or_reduced() {
    let t = tower(2, 2);
    let rows = vec![vec![1, 2, 3], vec![1, 2, 3], vec![0, 1, 1]];
    assert!(matches!(AdditiveCode::new(t.clone(), 3, rows.clone()), Err(CodeError::DependentRows { rank: 2, rows: 3 })));
    let (c, dropped) = AdditiveCode::reduced(t, 3, rows).unwrap();
    assert_eq!((c.r(), dropped), (2, 1));
}

#[test]
fn derived_parameters() {
    let t = tower(2, 2);
    for r in 1..=6 {
        let c = AdditiveCode::full_space(t.clone(), 3);
        let rows: Vec<Vec<u32>> = c.rows().into_iter().take(r).collect();
        let c = AdditiveCode::new(t.clone(), 3, rows).unwrap();
        assert_eq!(c.k(), r.div_ceil(2));
        assert!(1 <= c.r0() && c.r0() <= 2);
        assert_eq!(c.r0(), r - (c.k() - 1) * 2);
    }
}

#[test]
fn system_round_trips() {
    let id = AdditiveCode::new(tower(5, 1), 3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let pts = code::system_from_code(&id).unwrap();
    assert_eq!(pts.len(), 3);
    assert!(pts.elements().iter().all(|e| e.dim() == 1));
    assert!(pts.elements().windows(2).all(|w| w[0] != w[1]));
    for i in 1..=6 {
        let a = arc(i);
        assert_eq!(code::system_from_code(&arc_code(i)).unwrap(), a);
    }
}

#[test]
fn min_distance_examples() {
    let ones = AdditiveCode::new(tower(3, 2), 7, vec![vec![1; 7]]).unwrap();
    assert_eq!(code::min_distance(&ones, MinDistanceAlgorithm::Enumerate).unwrap(), 7);
    assert_eq!(code::min_distance(&ones, MinDistanceAlgorithm::Hyperplane).unwrap(), 7);
    assert!(matches!(code::min_distance(&AdditiveCode::zero(tower(2, 2), 3), MinDistanceAlgorithm::Auto), Err(CodeError::ZeroCode)));
    for i in 1..=6 {
        let c = arc_code(i);
        assert_eq!(code::min_distance(&c, MinDistanceAlgorithm::Enumerate).unwrap(), 10);
        assert_eq!(code::min_distance(&c, MinDistanceAlgorithm::Hyperplane).unwrap(), 10);
    }
}

#[test]
fn min_distance_algorithms_agree_with_brute_force() {
    let mut rng = StdRng::seed_from_u64(10);
    let params = [(2u32, 2u32, 3usize), (2, 2, 5), (3, 2, 5), (3, 2, 7), (2, 3, 5), (3, 1, 7), (4, 2, 3), (2, 4, 6), (5, 1, 4)];
    for i in 0..100 {
        let (q, h, r) = params[i % params.len()];
        let n = rng.gen_range(r.div_ceil(h as usize)..=10);
        let c = random_code_retry(&mut rng, q, h, n, r);
        let d = brute_min_distance(&c);
        assert_eq!(code::min_distance(&c, MinDistanceAlgorithm::Enumerate).unwrap(), d);
        assert_eq!(code::min_distance(&c, MinDistanceAlgorithm::Hyperplane).unwrap(), d);
        assert_eq!(code::min_distance(&c, MinDistanceAlgorithm::Auto).unwrap(), d);
    }
}

#[test]
fn min_distance_of_printed_generators_matches_brute_force() {
    // Whatever the printed matrices give, both algorithms and the oracle agree.
    for i in 1..=6 {
        let g = printed_code(i);
        let d = brute_min_distance(&g);
        assert_eq!(code::min_distance(&g, MinDistanceAlgorithm::Enumerate).unwrap(), d);
        assert_eq!(code::min_distance(&g, MinDistanceAlgorithm::Hyperplane).unwrap(), d);
    }
}

#[test]
fn mds_status_examples() {
    for i in 1..=6 {
        let s = code::mds_status(&arc_code(i)).unwrap();
        assert_eq!((s.n, s.r, s.k, s.d, s.mds, s.faithful), (12, 5, 3, 10, MdsKind::Fractional, true));
    }
    let full = code::mds_status(&AdditiveCode::full_space(tower(2, 2), 4)).unwrap();
    assert_eq!((full.d, full.mds), (1, MdsKind::Integral));
    let k3 = code::mds_status(&construct::trace_construction_k3(2).unwrap()).unwrap();
    assert_eq!((k3.n, k3.r, k3.d, k3.mds), (8, 5, 6, MdsKind::Fractional));
}

#[test]
fn faithfulness() {
    let c = AdditiveCode::new(tower(2, 2), 3, vec![vec![1, 0, 2], vec![2, 0, 1]]).unwrap();
    assert!(!code::is_faithful(&c));
    for i in 1..=6 {
        assert!(code::is_faithful(&arc_code(i)));
    }
}

#[test]
fn unfaithful_iff_dual_distance_one() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut seen = [0usize; 2];
    for i in 0..50 {
        let (q, h, r, n) = [(2u32, 2u32, 3usize, 4usize), (3, 2, 3, 4), (2, 3, 4, 3), (2, 2, 2, 3)][i % 4];
        let c = random_code_retry(&mut rng, q, h, n, r);
        let d_perp = code::min_distance(&code::dual(&c), MinDistanceAlgorithm::Enumerate).unwrap();
        let faithful = code::is_faithful(&c);
        assert_eq!(!faithful, d_perp == 1);
        seen[faithful as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "both cases exercised: {seen:?}");
}

#[test]
fn faithful_with_distance_two_is_self_dual_property() {
    let mut rng = StdRng::seed_from_u64(12);
    for i in 0..50 {
        let (q, h, r, n) = [(2u32, 2u32, 4usize, 4usize), (3, 2, 4, 4), (2, 2, 5, 5)][i % 3];
        let c = random_code_retry(&mut rng, q, h, n, r);
        let dual = code::dual(&c);
        let lhs = code::is_faithful(&c) && brute_min_distance(&c) >= 2;
        let rhs = code::is_faithful(&dual) && brute_min_distance(&dual) >= 2;
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn make_faithful_examples() {
    for i in 1..=6 {
        assert_eq!(code::make_faithful(&arc(i)).unwrap(), arc(i));
    }
    let field = arc(1).field().clone();
    let pt = Subspace::from_rows(&field, 5, &[vec![1, 1, 0, 0, 0]]).unwrap();
    let zero = Subspace::zero(&field, 5);
    let sys = ProjectiveSystem::new(&field, 5, 2, vec![pt.clone(), zero]).unwrap();
    let f = code::make_faithful(&sys).unwrap();
    assert!(f.elements().iter().all(|e| e.dim() == 2));
    assert!(f.elements().iter().any(|e| e.contains(&pt)));
    let before = geometry::max_hyperplane_count(&sys).unwrap();
    assert!(geometry::max_hyperplane_count(&f).unwrap() <= before);
}

#[test]
fn make_faithful_never_lowers_distance() {
    let mut rng = StdRng::seed_from_u64(13);
    let t = tower(3, 2);
    for _ in 0..40 {
        let c = random_code_retry(&mut rng, 3, 2, 5, 4);
        let sys = code::system_from_code(&c).unwrap();
        let f = code::make_faithful(&sys).unwrap();
        let fc = code::code_from_system(&f, t.clone()).unwrap();
        assert!(code::is_faithful(&fc));
        assert!(brute_min_distance(&fc) >= brute_min_distance(&c));
    }
}

/// Membership of `v` in `c`, via the brute-force codeword list.
fn contains(words: &[Vec<u32>], v: &[u32]) -> bool {
    words.iter().any(|w| w == v)
}

#[test]
fn dual_of_trivial_codes() {
    let t = tower(2, 2);
    assert_eq!(code::dual(&AdditiveCode::full_space(t.clone(), 3)).r(), 0);
    assert_eq!(code::dual(&AdditiveCode::zero(t.clone(), 3)).r(), 6);
}

#[test]
fn dual_is_trace_orthogonal_and_involutive() {
    let mut rng = StdRng::seed_from_u64(14);
    for i in 0..50 {
        let (q, h, r, n) = [(2u32, 2u32, 3usize, 4usize), (3, 2, 3, 3), (2, 3, 4, 3), (4, 2, 3, 3), (2, 2, 5, 5)][i % 5];
        let c = random_code_retry(&mut rng, q, h, n, r);
        let d = code::dual(&c);
        let t = c.tower();
        assert_eq!(d.r() + c.r(), n * h as usize);
        for u in all_codewords(&c).iter().step_by(3) {
            for j in 0..d.r() {
                let v = d.row(j);
                let s = u.iter().zip(v).fold(0, |acc, (&a, &b)| t.ext().add(acc, t.ext().mul(a, b)));
                assert_eq!(t.trace_down(s), 0);
            }
        }
        let dd = code::dual(&d);
        assert!(dd.same_code(&c));
        let words = all_codewords(&c);
        for k in 0..dd.r() {
            assert!(contains(&words, dd.row(k)));
        }
    }
    for i in 1..=6 {
        let c = arc_code(i);
        assert!(code::dual(&code::dual(&c)).same_code(&c));
    }
}

#[test]
fn integral_dual_example() {
    // The integral [6, 3, 4] MDS codes over F_4, one per class of 6-arcs of lines in PG(5, 2).
    let options = ClassifyOptions { keep_reps: Some(6), ..Default::default() };
    let run = classify::classify_arcs(2, 2, 6, 6, Filters::default(), &options).unwrap();
    let reps = &run.reps[&6];
    assert_eq!(reps.len(), 1);
    for sys in reps {
        let c = code::code_from_system(sys, tower(2, 2)).unwrap();
        let s = code::mds_status(&c).unwrap();
        assert_eq!((s.n, s.r, s.d, s.mds), (6, 6, 4, MdsKind::Integral));
        let d = code::mds_status(&code::dual(&c)).unwrap();
        assert_eq!((d.n, d.r, d.d, d.mds), (6, 6, 4, MdsKind::Integral));
    }
}

#[test]
fn quotient_examples() {
    let c = arc_code(1);
    let q0 = code::geometric_quotient(&c, &[]).unwrap();
    assert!(q0.code.same_code(&c));
    let q = code::geometric_quotient(&c, &[11]).unwrap();
    assert_eq!((q.code.n(), q.code.r()), (11, 3));
    assert!(q.non_obliterating);
    assert!(matches!(code::geometric_quotient(&c, &[12]), Err(CodeError::BadPosition(12))));
}

#[test]
fn quotient_dimension_law() {
    let mut rng = StdRng::seed_from_u64(16);
    for i in 0..50 {
        let (q, h, r, n) = [(2u32, 2u32, 5usize, 6usize), (3, 2, 5, 6), (2, 3, 5, 4)][i % 3];
        let c = random_code_retry(&mut rng, q, h, n, r);
        let j: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        let qt = code::geometric_quotient(&c, &j).unwrap();
        let sys = code::system_from_code(&c).unwrap();
        let blocks: Vec<Subspace> = j.iter().map(|&x| element_of(&c, x)).collect();
        let u = geometry::span_in(sys.field(), r, &blocks).unwrap();
        assert_eq!(qt.code.r(), r - u.dim());
        assert_eq!(qt.non_obliterating, qt.code.r() >= h as usize);
        // Oracle: codewords vanishing on J, counted by brute force.
        let vanishing = all_codewords(&c).into_iter().filter(|w| j.iter().all(|&p| w[p] == 0)).count();
        assert_eq!(vanishing, (q as usize).pow(qt.code.r() as u32));
    }
}

/// Column space of block `x` of the expanded generator.
fn element_of(c: &AdditiveCode, x: usize) -> Subspace {
    let t = c.tower();
    let cols: Vec<Vec<u32>> = (0..c.h()).map(|b| (0..c.r()).map(|i| t.expand(c.entry(i, x))[b]).collect()).collect();
    Subspace::from_rows(t.base(), c.r(), &cols).unwrap()
}

#[test]
fn puncture_examples() {
    let c = arc_code(2);
    let (same, dropped) = code::puncture(&c, &[]).unwrap();
    assert!(same.same_code(&c) && dropped == 0);
    // One deletion keeps an MDS code while n - 1 ≥ k.
    let (p, _) = code::puncture(&c, &[4]).unwrap();
    let s = code::mds_status(&p).unwrap();
    assert_eq!((s.n, s.r, s.d, s.mds), (11, 5, 9, MdsKind::Fractional));
    let (short, dropped) = code::puncture(&c, &(4..12).collect::<Vec<_>>()).unwrap();
    assert_eq!((short.n(), dropped), (4, 0));
    assert!(brute_min_distance(&short) >= 2);
}

#[test]
fn dual_mds_criterion_matches_direct_dual() {
    let t = tower(2, 2);
    // Integral MDS: the criterion always holds.
    let rs = construct::additive_reed_solomon(t.clone(), &construct::CoefficientSets::standard(&t, 2, 2)).unwrap();
    assert!(code::dual_mds_criterion(&rs).unwrap().holds);
    // Fractional MDS codes from the classification of lines in PG(4, 2).
    let options = ClassifyOptions { keep_reps: Some(8), ..Default::default() };
    let run = classify::classify_arcs(2, 2, 5, 8, Filters::default(), &options).unwrap();
    let mut outcomes = [0usize; 2];
    for sys in run.reps.range(3..).flat_map(|(_, v)| v) {
        let c = code::code_from_system(sys, t.clone()).unwrap();
        let crit = code::dual_mds_criterion(&c).unwrap();
        let d = code::dual(&c);
        let direct = code::is_faithful(&d) && code::mds_status(&d).unwrap().mds != MdsKind::None;
        assert_eq!(crit.holds, direct, "{sys:?}");
        if let Some(j) = &crit.witness {
            let q = code::geometric_quotient(&c, j).unwrap();
            assert!(q.non_obliterating && !code::is_faithful(&q.code));
        }
        outcomes[crit.holds as usize] += 1;
    }
    assert!(outcomes[0] > 0, "some fractional MDS code has a non-MDS dual");
    let not_mds = AdditiveCode::new(t, 3, vec![vec![1, 1, 0]]).unwrap();
    assert!(matches!(code::dual_mds_criterion(&not_mds), Err(CodeError::NotMds)));
}
