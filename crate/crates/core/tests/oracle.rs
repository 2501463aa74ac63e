mod common;

use std::collections::BTreeSet;

use common::*;
use dea_frontier::dataset::Point;
use dea_frontier::dea::{self, UnitClass, ZERO_TOL};
use dea_frontier::terminal::{self, DirectionKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pt(x: &[f64], y: &[f64]) -> Point {
    Point::new(x.to_vec(), y.to_vec()).unwrap()
}

fn class_matches(c: UnitClass, o: OracleClass) -> bool {
    matches!(
        (c, o),
        (UnitClass::ExtremeEfficient, OracleClass::Extreme)
            | (UnitClass::EfficientNonextreme, OracleClass::NonExtreme)
            | (UnitClass::WeaklyEfficient, OracleClass::Weak)
            | (UnitClass::Inefficient, OracleClass::Inefficient)
    )
}

fn library_directions(ds: &dea_frontier::Dataset, j: usize) -> BTreeSet<(bool, usize)> {
    terminal::terminal_directions(ds, j)
        .unwrap()
        .into_iter()
        .map(|d| (d.kind == DirectionKind::OutputDecrease, d.axis))
        .collect()
}

#[test]
fn oracles_agree_on_desk_values() {
    let ds = d3();
    assert!((oracle_theta(&ds, &pt(&[4.0, 4.0], &[1.0])).unwrap() - 0.5).abs() < 1e-12);
    assert!((grid_theta(&ds, &pt(&[4.0, 4.0], &[1.0]), 1000).unwrap() - 0.5).abs() < 2e-3);
    assert!((oracle_theta(&ds, &pt(&[1.0, 6.0], &[1.0])).unwrap() - 1.0).abs() < 1e-12);
    assert!((oracle_eta(&ds, &pt(&[2.0, 2.0], &[0.5])).unwrap() - 2.0).abs() < 1e-12);
    assert!(oracle_theta(&ds, &pt(&[1.0, 3.0], &[1.0])).unwrap() > 1.0);
    assert!(!oracle_member(&ds, &[0, 1, 2], &pt(&[0.5, 0.5], &[1.0])));
    // Every unit of D3 has output 1, so no point can raise it: (4,4) sits on
    // the boundary even though it is radially inefficient.
    assert!(oracle_gap(&ds, &pt(&[4.0, 4.0], &[1.0])).unwrap() < 1e-12);
    assert!(dea::wpe_gap(&ds, &pt(&[4.0, 4.0], &[1.0])).unwrap() <= ZERO_TOL);
    assert!(oracle_gap(&ds, &pt(&[4.0, 4.0], &[0.5])).unwrap() > 0.1);
    assert!(oracle_gap(&ds, &pt(&[1.0, 6.0], &[1.0])).unwrap() < 1e-12);
    let terminal: Vec<_> = (0..3).map(|j| oracle_terminal(&ds, j, 1.0)).collect();
    assert_eq!(terminal[0], BTreeSet::from([(false, 1), (true, 0)]));
    assert_eq!(terminal[1], BTreeSet::from([(true, 0)]));
    assert_eq!(terminal[2], BTreeSet::from([(false, 0), (true, 0)]));
}

#[test]
fn desk_scores_match_oracle() {
    let ds = d3();
    let a = dea::bcc_input(&ds, &pt(&[4.0, 4.0], &[1.0])).unwrap();
    assert!((a.score - 0.5).abs() < 1e-9);
    assert!(a.input_slacks.iter().all(|&s| s.abs() < 1e-9));
    assert_eq!(a.projection, pt(&[2.0, 2.0], &[1.0]));
    let g = dea::bcc_input(&ds, &pt(&[1.0, 6.0], &[1.0])).unwrap();
    assert!((g.score - 1.0).abs() < 1e-9);
    assert!(g.input_slacks[0].abs() < 1e-9 && (g.input_slacks[1] - 2.0).abs() < 1e-9, "{g:?}");
    let o = dea::bcc_output(&ds, &pt(&[2.0, 2.0], &[0.5])).unwrap();
    assert!((o.score - 2.0).abs() < 1e-9);
    assert!(matches!(dea::bcc_output(&ds, &pt(&[1.0, 3.0], &[1.0])), Err(dea_frontier::Error::OutsidePps)));
}

#[test]
fn classification_examples() {
    let ds = with_units(&d3(), &[("G", &[1.0, 6.0], &[1.0]), ("Q", &[4.0, 4.0], &[1.0]), ("M", &[1.5, 3.0], &[1.0])]);
    let classes: Vec<UnitClass> = (0..ds.len()).map(|j| dea::classify(&ds, j).unwrap()).collect();
    assert_eq!(
        classes,
        [
            UnitClass::ExtremeEfficient,
            UnitClass::ExtremeEfficient,
            UnitClass::ExtremeEfficient,
            UnitClass::WeaklyEfficient,
            UnitClass::Inefficient,
            UnitClass::EfficientNonextreme,
        ]
    );
    for j in 0..ds.len() {
        assert!(class_matches(classes[j], oracle_class(&ds, j)), "unit {}", ds.id(j));
    }
}

/// Random integer datasets with n ≤ 6 and m + r ≤ 4 against the
/// enumeration oracle: scores, classes, gap status and terminal sets.
#[test]
fn random_small_datasets_match_oracle() {
    let shapes = [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for case in 0..240 {
        let (m, r) = shapes[case % shapes.len()];
        let n = 1 + case % 6;
        let ds = random_dataset(&mut rng, n, m, r, 5);
        for j in 0..n {
            let p = ds.point(j);
            let eval = dea::evaluate_unit(&ds, j, ZERO_TOL).unwrap();
            let theta = oracle_theta(&ds, &p).unwrap();
            let eta = oracle_eta(&ds, &p).unwrap();
            assert!((eval.theta() - theta).abs() <= 2e-3, "case {case} unit {j}: θ {} vs {theta}", eval.theta());
            assert!((eval.eta().unwrap() - eta).abs() <= 2e-3 * eta, "case {case} unit {j}: η");
            let oc = oracle_class(&ds, j);
            assert!(class_matches(eval.class, oc), "case {case} unit {j}: {:?} vs {oc:?}\n{ds:?}", eval.class);
            let gap_zero = dea::wpe_gap(&ds, &p).unwrap() <= ZERO_TOL;
            assert_eq!(gap_zero, oracle_gap(&ds, &p).unwrap() <= 1e-9, "case {case} unit {j}: gap status");
            assert_eq!(library_directions(&ds, j), oracle_terminal(&ds, j, 1.0), "case {case} unit {j}: directions\n{ds:?}");
            checked += 1;
        }
    }
    assert!(checked > 500);
}
