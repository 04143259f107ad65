mod common;

use std::sync::Arc;

use addmds::bounds;
use addmds::code::{self, AdditiveCode, MdsKind};
use addmds::construct::{self, CoefficientSets, ConstructError, PartitionInput};
use addmds::field::FieldTower;
use addmds::geometry::{self, ProjectiveSystem, Subspace};
use common::brute_min_distance;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn params(c: &AdditiveCode) -> (usize, usize, usize, MdsKind) {
    let s = code::mds_status(c).unwrap();
    (s.n, s.r, s.d, s.mds)
}

fn frac(r: u32, h: u32) -> MdsKind {
    if r % h == 0 {
        MdsKind::Integral
    } else {
        MdsKind::Fractional
    }
}

fn subspace(t: &FieldTower, rows: &[Vec<u32>]) -> Subspace {
    Subspace::from_rows(t.base(), 2 * t.h(), rows).unwrap()
}

/// The first `dim` rows of a subspace's canonical basis.
fn shrink(s: &Subspace, dim: usize) -> Subspace {
    let rows = s.basis().row_vecs();
    Subspace::from_rows(s.field(), s.ambient(), &rows[..dim]).unwrap()
}

#[test]
fn reed_solomon_examples() {
    let t = Arc::new(FieldTower::standard(2, 2).unwrap());
    let sets = CoefficientSets { sets: vec![t.basis().to_vec(), vec![1]] };
    let c = construct::additive_reed_solomon(t.clone(), &sets).unwrap();
    assert_eq!(params(&c), (5, 3, 4, MdsKind::Fractional));
    assert_eq!(brute_min_distance(&c), 4);

    let t9 = Arc::new(FieldTower::standard(3, 2).unwrap());
    let c = construct::additive_reed_solomon(t9.clone(), &CoefficientSets::standard(&t9, 3, 1)).unwrap();
    assert_eq!(params(&c), (10, 5, 8, MdsKind::Fractional));
    assert_eq!(brute_min_distance(&c), 8);

    // Full coefficient sets give classical Reed-Solomon codes.
    for (q, h, k) in [(2u32, 2u32, 2usize), (2, 2, 3), (3, 2, 2), (2, 3, 3), (4, 2, 2)] {
        let t = Arc::new(FieldTower::standard(q, h).unwrap());
        let sets = CoefficientSets::standard(&t, k, h as usize);
        let c = construct::additive_reed_solomon(t, &sets).unwrap();
        let qh = q.pow(h) as usize;
        assert_eq!(params(&c), (qh + 1, k * h as usize, qh + 2 - k, MdsKind::Integral));
    }
}

#[test]
fn reed_solomon_errors() {
    let t = Arc::new(FieldTower::standard(2, 2).unwrap());
    assert!(matches!(
        construct::additive_reed_solomon(t.clone(), &CoefficientSets { sets: vec![] }),
        Err(ConstructError::NoSets)
    ));
    assert!(matches!(
        construct::additive_reed_solomon(t.clone(), &CoefficientSets { sets: vec![vec![1, 1]] }),
        Err(ConstructError::DependentSet(0))
    ));
    let too_many = CoefficientSets { sets: vec![vec![1]; 5] };
    assert!(matches!(construct::additive_reed_solomon(t, &too_many), Err(ConstructError::DegreeTooLarge(4))));
}

#[test]
fn reed_solomon_small_sets_are_not_mds() {
    // |C| = q^{(k-1)h} sits on the lemma's lower boundary: the last set is {0, 1} only
    // and the middle one is shrunk too.
    let t = Arc::new(FieldTower::standard(2, 2).unwrap());
    let sets = CoefficientSets { sets: vec![t.basis().to_vec(), vec![1], vec![1]] };
    let c = construct::additive_reed_solomon(t, &sets).unwrap();
    let s = code::mds_status(&c).unwrap();
    assert_eq!(s.d, brute_min_distance(&c));
    assert_eq!(s.r, 4);
}

#[test]
fn k2_examples() {
    for (q, h, r0, n) in [(2u32, 2u32, 1u32, 7usize), (3, 2, 1, 13), (2, 3, 1, 15)] {
        let c = construct::trace_construction_k2(q, h, r0).unwrap();
        let r = (h + r0) as usize;
        assert_eq!(params(&c), (n, r, n - 1, MdsKind::Fractional), "({q},{h},{r0})");
        assert_eq!(brute_min_distance(&c), n - 1);
    }
    assert!(matches!(construct::trace_construction_k2(2, 3, 2), Err(ConstructError::R0NotDividing { r0: 2, h: 3 })));
}

#[test]
fn k2_attains_the_mds_length_bound() {
    for q in [2u32, 3, 4, 5] {
        for h in 1u32..=4 {
            for r0 in (1..=h).filter(|r0| h % r0 == 0) {
                if (q as u64).pow(h + r0) > 1 << 12 {
                    continue;
                }
                let c = construct::trace_construction_k2(q, h, r0).unwrap();
                let rep = bounds::mds_parameter_bounds(q, h, h + r0, true).unwrap();
                let (n, _, d, kind) = params(&c);
                assert_eq!(kind, frac(h + r0, h));
                assert_eq!(rep.value("dbound_d"), Some(d as i128), "q={q} h={h} r0={r0}");
                assert_eq!(rep.value("dbound_n"), Some(n as i128));
            }
        }
    }
}

#[test]
fn k3_examples() {
    let c = construct::trace_construction_k3(1).unwrap();
    assert_eq!(params(&c), (4, 3, 2, MdsKind::Integral));
    assert_eq!(brute_min_distance(&c), 2);
    assert_eq!(params(&construct::trace_construction_k3(2).unwrap()), (8, 5, 6, MdsKind::Fractional));
    let c = construct::trace_construction_k3(3).unwrap();
    assert_eq!(params(&c), (16, 7, 14, MdsKind::Fractional));
    assert_eq!(brute_min_distance(&c), 14);
    assert!(matches!(construct::trace_construction_k3(0), Err(ConstructError::NonPositive)));
}

#[test]
fn spread_partitions_the_nonzero_vectors() {
    for (q, h) in [(2u32, 1u32), (2, 2), (3, 2), (2, 3), (3, 3), (4, 2)] {
        let spread = construct::spread_partition(q, h).unwrap();
        let qh = q.pow(h) as usize;
        assert_eq!(spread.len(), qh + 1);
        assert!(spread.iter().all(|s| s.dim() == h as usize));
        let t = FieldTower::standard(q, h).unwrap();
        let sys = ProjectiveSystem::new(t.base(), 2 * h as usize, h as usize, spread.clone()).unwrap();
        assert!(geometry::pairwise_disjoint_check(&sys).unwrap(), "q={q} h={h}");
        // Every nonzero vector lies in exactly one member.
        let total = (q as usize).pow(2 * h);
        for idx in 1..total {
            let v: Vec<u32> = (0..2 * h).map(|i| ((idx / (q as usize).pow(i)) % q as usize) as u32).collect();
            assert_eq!(spread.iter().filter(|s| s.contains_vector(&v)).count(), 1, "q={q} h={h} v={v:?}");
        }
    }
}

fn spread_input(q: u32, h: u32, dims: &[usize]) -> (Arc<FieldTower>, PartitionInput) {
    let t = Arc::new(FieldTower::standard(q, h).unwrap());
    let spread = construct::spread_partition(q, h).unwrap();
    let pi = dims.iter().enumerate().map(|(j, &d)| shrink(&spread[2 + j], d)).collect();
    (t, PartitionInput { pi_0: spread[0].clone(), pi_inf: spread[1].clone(), pi })
}

#[test]
fn partition_examples() {
    let (t, input) = spread_input(2, 2, &[2, 2, 2]);
    let c = construct::partition_construction(t, &input).unwrap();
    assert_eq!(params(&c), (5, 6, 3, MdsKind::Integral));
    assert_eq!(brute_min_distance(&c), 3);

    let (t, input) = spread_input(2, 2, &[2, 2, 1]);
    let c = construct::partition_construction(t, &input).unwrap();
    assert_eq!(params(&c), (5, 5, 3, MdsKind::Fractional));

    for (q, h, dim) in [(2u32, 2u32, 1usize), (2, 2, 2), (3, 2, 2), (2, 3, 2)] {
        let (t, input) = spread_input(q, h, &[dim]);
        let c = construct::partition_construction(t, &input).unwrap();
        let (n, r, d, _) = params(&c);
        assert_eq!((n, r, d), (3, dim, 3), "q={q} h={h} dim={dim}");
        assert_eq!(brute_min_distance(&c), 3);
    }
}

#[test]
fn partition_rejects_intersecting_input() {
    let (t, mut input) = spread_input(2, 2, &[2, 2]);
    input.pi[1] = input.pi[0].clone();
    assert!(matches!(construct::partition_construction(t.clone(), &input), Err(ConstructError::Intersecting(..))));
    let (_, mut input) = spread_input(2, 2, &[2]);
    input.pi_inf = shrink(&input.pi_inf, 1);
    assert!(matches!(construct::partition_construction(t.clone(), &input), Err(ConstructError::BadDimension(..))));
    // A line meeting π_0 = {(0, x)}.
    let (_, mut input) = spread_input(2, 2, &[2]);
    input.pi[0] = subspace(&t, &[vec![0, 0, 1, 0], vec![1, 0, 0, 0]]);
    assert!(matches!(construct::partition_construction(t, &input), Err(ConstructError::Intersecting(..))));
}

/// Random pairwise trivially intersecting inputs: a shuffled spread with random
/// members shrunk to random subspaces, and random complements for π_0, π_∞.
#[test]
fn partition_codes_have_weight_at_least_three() {
    let mut rng = StdRng::seed_from_u64(17);
    let mut runs = 0;
    for (q, h) in [(2u32, 2u32), (2, 3), (3, 2), (4, 2), (2, 4)] {
        let t = Arc::new(FieldTower::standard(q, h).unwrap());
        let mut spread = construct::spread_partition(q, h).unwrap();
        for _ in 0..12 {
            spread.shuffle(&mut rng);
            let k_max = spread.len() - 2;
            let k = rng.gen_range(1..=k_max);
            let dims: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=h as usize)).collect();
            let r: usize = dims.iter().sum();
            if (q as u64).pow(r as u32) > 1 << 12 {
                continue;
            }
            let pi: Vec<Subspace> = dims
                .iter()
                .enumerate()
                .map(|(j, &d)| {
                    // A random d-dimensional subspace of the member.
                    let rows = spread[2 + j].basis().row_vecs();
                    loop {
                        let mix: Vec<Vec<u32>> = (0..d)
                            .map(|_| {
                                let coef: Vec<u32> = (0..rows.len()).map(|_| rng.gen_range(0..q)).collect();
                                (0..rows[0].len())
                                    .map(|col| {
                                        rows.iter().zip(&coef).fold(0, |acc, (row, &c)| {
                                            t.base().add(acc, t.base().mul(c, row[col]))
                                        })
                                    })
                                    .collect()
                            })
                            .collect();
                        let s = Subspace::from_rows(t.base(), 2 * h as usize, &mix).unwrap();
                        if s.dim() == d {
                            break s;
                        }
                    }
                })
                .collect();
            let input = PartitionInput { pi_0: spread[0].clone(), pi_inf: spread[1].clone(), pi };
            let c = construct::partition_construction(t.clone(), &input).unwrap();
            assert_eq!((c.n(), c.r()), (k + 2, r));
            let d = brute_min_distance(&c);
            assert!(d >= 3, "q={q} h={h} dims={dims:?}: d={d}");
            assert_eq!(code::mds_status(&c).unwrap().d, d);
            runs += 1;
        }
    }
    assert!(runs > 30);
}

#[test]
fn d3_examples() {
    assert_eq!(params(&construct::d3_mds(2, 2, 5).unwrap()), (5, 5, 3, MdsKind::Fractional));
    let c = construct::d3_mds(2, 2, 6).unwrap();
    assert_eq!(params(&c), (5, 6, 3, MdsKind::Integral));
    assert_eq!(brute_min_distance(&c), 3);
    assert!(matches!(construct::d3_mds(2, 2, 8), Err(ConstructError::KTooLarge { k: 4, cap: 3 })));
}

#[test]
fn shrunk_spread_members_stay_disjoint() {
    for (q, h) in [(2u32, 2u32), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3)] {
        let t = FieldTower::standard(q, h).unwrap();
        let spread = construct::spread_partition(q, h).unwrap();
        let mut members: Vec<Subspace> = spread[..2].to_vec();
        members.extend(spread[2..].iter().map(|s| shrink(s, h as usize - 1)).filter(|s| s.dim() > 0));
        let elementwise = members.iter().enumerate().all(|(i, a)| members[i + 1..].iter().all(|b| a.intersects_trivially(b)));
        assert!(elementwise, "q={q} h={h}");
        if h > 1 {
            let sys = ProjectiveSystem::new(t.base(), 2 * h as usize, h as usize, members).unwrap();
            assert!(geometry::pairwise_disjoint_check(&sys).unwrap());
        }
    }
}

#[test]
fn d3_small_sweep() {
    for q in [2u32, 3, 4] {
        for h in 1u32..=3 {
            let cap = q.pow(h) - 1;
            for r in 1..=(cap * h) {
                if (q as u64).checked_pow(r).map_or(true, |x| x > 1 << 14) {
                    break;
                }
                let c = construct::d3_mds(q, h, r).unwrap();
                let k = r.div_ceil(h) as usize;
                assert_eq!(params(&c), (k + 2, r as usize, 3, frac(r, h)), "q={q} h={h} r={r}");
            }
        }
    }
}

#[test]
fn rs_small_sweep() {
    for q in [2u32, 3, 4, 5] {
        for h in 1u32..=3 {
            let t = Arc::new(FieldTower::standard(q, h).unwrap());
            let qh = q.pow(h) as usize;
            for k in 1..=qh {
                for r0 in 1..=h as usize {
                    let r = (k - 1) * h as usize + r0;
                    if (q as u64).checked_pow(r as u32).map_or(true, |x| x > 1 << 14) {
                        continue;
                    }
                    let c = construct::additive_reed_solomon(t.clone(), &CoefficientSets::standard(&t, k, r0)).unwrap();
                    assert_eq!(params(&c), (qh + 1, r, qh + 2 - k, frac(r as u32, h)), "q={q} h={h} k={k} r0={r0}");
                }
            }
        }
    }
}
