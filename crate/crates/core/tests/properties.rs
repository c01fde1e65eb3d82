mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{gauss_jordan_inverse, rel_fro, EdgeList};
use sqdist::linalg::{lu_det, lu_inverse, schur_det, Lu};
use sqdist::matrices::{self, TreeMatrices};
use sqdist::random::{assemble_tree, random_topology};
use sqdist::verify::{Checker, Tolerances};
use sqdist::{
    det_formula, fuzz, kron, parse_tree_file, random_tree, random_weights, write_tree_file, DenseMatrix,
    FuzzConfig, Identity, TopologyKind, Verdict, WeightMode, WeightRegime, WeightedTree,
};

fn build(n: usize, s: usize, mode: WeightMode, seed: u64) -> WeightedTree {
    let topo = random_tree(n, seed).unwrap();
    let weights = random_weights(n - 1, s, mode, seed ^ 0x9e37_79b9);
    assemble_tree(&topo, s, weights).unwrap()
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-3.0f64..3.0, rows * cols).prop_map(move |d| DenseMatrix::new(rows, cols, d).unwrap())
}

fn well_conditioned(n: usize) -> impl Strategy<Value = DenseMatrix> {
    matrix(n, n).prop_map(move |a| &a + &DenseMatrix::identity(n).scale(4.0 * n as f64))
}

fn trees(mode: WeightMode, s: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = WeightedTree> {
    (2usize..=9, s, any::<u64>()).prop_map(move |(n, s, seed)| build(n, s, mode, seed))
}

fn assert_pass(c: &Checker, id: Identity, tol: f64) -> Result<(), TestCaseError> {
    let r = c.run(id);
    prop_assert!(r.verdict != Verdict::Fail, "{r:?}");
    if r.verdict == Verdict::Pass {
        prop_assert!(r.ratio <= tol, "{r:?}");
    }
    Ok(())
}

const STRUCTURAL: [Identity; 8] = [
    Identity::LaplacianFactorization,
    Identity::OrientationDet,
    Identity::OrientationInverse,
    Identity::LaplacianDistance,
    Identity::SquaredDistanceDegree,
    Identity::IncidenceCongruence,
    Identity::SquaredDistanceLaplacian,
    Identity::EtaRelation,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_mixed_product(a in matrix(2, 3), b in matrix(3, 2), c in matrix(3, 2), d in matrix(2, 3)) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        let scale = lhs.fro_norm().max(rhs.fro_norm()).max(1.0);
        prop_assert!((&lhs - &rhs).fro_norm() <= 1e-12 * scale);
    }

    #[test]
    fn kron_inverse_and_det(a in well_conditioned(2), b in well_conditioned(3)) {
        let ab = kron(&a, &b);
        let inv = lu_inverse(&ab).unwrap();
        let expected = kron(&lu_inverse(&a).unwrap(), &lu_inverse(&b).unwrap());
        prop_assert!(rel_fro(&inv, &expected) <= 1e-9);
        // det(A⊗B) = det(A)^3 det(B)^2
        let lhs = lu_det(&ab).unwrap();
        let rhs = lu_det(&a).unwrap().powi(3) * lu_det(&b).unwrap().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn duplicated_row_is_singular(a in matrix(5, 5), src in 0usize..5, dst in 0usize..5) {
        prop_assume!(src != dst);
        let mut rows = a.to_rows();
        rows[dst] = rows[src].clone();
        let m = DenseMatrix::from_rows(&rows).unwrap();
        let lu = Lu::factor(&m).unwrap();
        prop_assert!(lu.min_pivot_ratio() < 1e-10);
        prop_assert!(lu.det().abs() <= 1e-9 * m.max_abs().powi(5).max(1.0));
    }

    #[test]
    fn lu_inverse_residual(a in well_conditioned(6)) {
        let inv = lu_inverse(&a).unwrap();
        prop_assert!((&(&a * &inv) - &DenseMatrix::identity(6)).fro_norm() <= 1e-10);
        prop_assert!(rel_fro(&inv, &gauss_jordan_inverse(&a)) <= 1e-10);
    }

    #[test]
    fn schur_matches_lu(a in well_conditioned(5)) {
        let a11 = a.submatrix(0, 0, 2, 2);
        let a12 = a.submatrix(0, 2, 2, 3);
        let a21 = a.submatrix(2, 0, 3, 2);
        let a22 = a.submatrix(2, 2, 3, 3);
        let s = schur_det(&a11, &a12, &a21, &a22).unwrap();
        let l = lu_det(&a).unwrap();
        prop_assert!((s - l).abs() <= 1e-9 * l.abs().max(1.0));
    }

    #[test]
    fn tau_sums_to_two(n in 2usize..40, seed in any::<u64>()) {
        let t = build(n, 1, WeightMode::Diagonal, seed);
        prop_assert_eq!(t.degree_profile().tau.iter().sum::<i64>(), 2);
    }

    #[test]
    fn path_reversal(t in trees(WeightMode::Diagonal, 1..=2), i in 0usize..9, j in 0usize..9) {
        let (i, j) = (i % t.n(), j % t.n());
        let mut back = t.path(j, i).unwrap();
        back.reverse();
        prop_assert_eq!(t.path(i, j).unwrap(), back);
    }

    #[test]
    fn constructions_match_edge_list(t in trees(WeightMode::General, 1..=3)) {
        let list = EdgeList::of(&t);
        let m = TreeMatrices::build(&t);
        prop_assert!(rel_fro(&m.d, &list.distance()) <= 1e-13);
        prop_assert!(rel_fro(&m.delta, &list.squared_distance()) <= 1e-13);
        prop_assert!(rel_fro(&m.l, &list.laplacian()) <= 1e-12);
        let hops = t.hop_distances();
        for i in 0..t.n() {
            prop_assert_eq!(hops[i][i], 0);
            for j in 0..t.n() {
                prop_assert_eq!(hops[i][j], list.hops(i, j));
            }
            prop_assert_eq!(t.degree(i), list.degree(i));
        }
        if t.degree_profile().has_deg2() {
            prop_assert!(m.tau_hat_kron.is_none());
        } else {
            prop_assert!(rel_fro(&sqdist::beta(&t).unwrap(), &list.beta()) <= 1e-12);
            prop_assert!(rel_fro(&sqdist::eta(&t).unwrap(), &list.eta()) <= 1e-10);
        }
    }

    #[test]
    fn orientation_invariance(t in trees(WeightMode::Commuting, 1..=3)) {
        let r = t.reversed();
        prop_assert_eq!(matrices::squared_distance_matrix(&t), matrices::squared_distance_matrix(&r));
        prop_assert_eq!(matrices::laplacian(&t), matrices::laplacian(&r));
        let q = matrices::incidence(&t);
        let qr = matrices::incidence(&r);
        prop_assert_eq!(q.scale(-1.0), qr);
        let a = det_formula(&t).unwrap();
        let b = det_formula(&r).unwrap();
        prop_assert_eq!(a.branch, b.branch);
        prop_assert!((a.value - b.value).abs() <= 1e-12 * a.value.abs().max(1.0));
    }

    #[test]
    fn scalar_weights_suite(t in trees(WeightMode::Diagonal, 1..=1)) {
        let c = Checker::new(&t, Tolerances::default());
        prop_assert_eq!(c.regime(), WeightRegime::Diagonal);
        for id in STRUCTURAL {
            assert_pass(&c, id, 1e-10)?;
        }
        assert_pass(&c, Identity::DetVsOracle, 1e-6)?;
        assert_pass(&c, Identity::InverseVsOracle, 1e-6)?;
    }

    #[test]
    fn diagonal_weights_suite(t in trees(WeightMode::Diagonal, 1..=3)) {
        let c = Checker::new(&t, Tolerances::default());
        for id in STRUCTURAL {
            assert_pass(&c, id, 1e-8)?;
        }
    }

    #[test]
    fn commuting_weights_suite(t in trees(WeightMode::Commuting, 2..=3)) {
        let c = Checker::new(&t, Tolerances::default());
        prop_assert!(matches!(c.regime(), WeightRegime::Commuting | WeightRegime::Diagonal));
        for id in STRUCTURAL {
            let r = c.run(id);
            prop_assert!(r.asserted, "{r:?}");
            assert_pass(&c, id, 1e-8)?;
        }
        assert_pass(&c, Identity::DetVsOracle, 1e-6)?;
    }

    #[test]
    fn round_trip_is_exact(t in trees(WeightMode::General, 1..=3)) {
        let text = write_tree_file(&t);
        let back = parse_tree_file(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(write_tree_file(&back), text);
    }
}

#[test]
fn prufer_trees_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut counts: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let samples = 3000;
    for _ in 0..samples {
        let topo = random_topology(4, TopologyKind::Uniform, &mut rng).unwrap();
        let mut key: Vec<(usize, usize)> = topo.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        key.sort();
        *counts.entry(key).or_default() += 1;
    }
    // Cayley: 4^2 labeled trees on four vertices
    assert_eq!(counts.len(), 16);
    for (tree, c) in counts {
        let freq = c as f64 / samples as f64;
        assert!((freq - 1.0 / 16.0).abs() <= 0.03, "{tree:?}: {freq}");
    }
}

#[test]
fn no_deg2_topology_has_no_degree_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2, 4, 5, 6, 9, 14] {
        for _ in 0..20 {
            let topo = random_topology(n, TopologyKind::NoDeg2, &mut rng).unwrap();
            let mut deg = vec![0; n];
            for &(a, b) in &topo.edges {
                deg[a] += 1;
                deg[b] += 1;
            }
            assert!(deg.iter().all(|&d| d != 2), "{topo:?}");
        }
    }
}

#[test]
fn fuzz_is_deterministic() {
    let cfg = FuzzConfig {
        trials: 20,
        seed: 11,
        ..FuzzConfig::default()
    };
    let a = fuzz(&cfg).unwrap();
    let b = fuzz(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.all_passed(), "{:?}", a.failures);
}

#[test]
fn long_paths_are_certified_singular() {
    let cfg = FuzzConfig {
        trials: 30,
        n_range: (4, 12),
        topology: TopologyKind::Path,
        seed: 3,
        ..FuzzConfig::default()
    };
    let report = fuzz(&cfg).unwrap();
    assert_eq!(report.det.singular_trials, cfg.trials);
    assert_eq!(report.det.singular_certified, cfg.trials);
    assert!(report.det.max_singular_pivot_ratio < 1e-10);
}

#[test]
fn general_weights_are_reported_not_asserted() {
    let cfg = FuzzConfig {
        trials: 30,
        s_range: (2, 3),
        weight_mode: WeightMode::General,
        seed: 1,
        ..FuzzConfig::default()
    };
    let report = fuzz(&cfg).unwrap();
    assert!(report.all_passed());
    assert!(report.identities.iter().any(|s| s.exceeds_tolerance));
    // structure-only identities hold in every regime
    for id in [Identity::LaplacianFactorization, Identity::OrientationDet, Identity::OrientationInverse] {
        assert!(!report.stats(id).unwrap().exceeds_tolerance, "{id:?}");
    }
}
