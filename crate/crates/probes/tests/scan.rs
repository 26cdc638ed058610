mod common;

use common::{cl2, constant};
use discrete::{build_space, ExtensionSpec, RANK_TOL};
use probes::{bg_spectrum_scan, CellClass, ScanGrid, Sector};
use std::f64::consts::PI;

fn grid(center: f64) -> ScanGrid {
    ScanGrid {
        sector: Sector::new(center, PI / 2.0).unwrap(),
        rays: 3,
        radii: vec![1.0, 10.0, 100.0, 1000.0],
        tol: RANK_TOL,
    }
}

#[test]
fn negative_sector_is_background_resolvent() {
    let space = build_space(20.0, 256, 2).unwrap();
    let scan = bg_spectrum_scan(&cl2(0.0), &ExtensionSpec::span(vec![constant()]), &space, &grid(PI)).unwrap();
    assert_eq!(scan.cells.len(), 9);
    assert!(scan.all_good(), "{:?}", scan.flagged().collect::<Vec<_>>());
    assert!(scan.is_ray_consistent());
    for c in &scan.cells {
        assert!(c.injective && c.surjective);
    }
}

#[test]
fn positive_axis_is_flagged_ray_by_ray() {
    let space = build_space(20.0, 256, 2).unwrap();
    let scan = bg_spectrum_scan(&cl2(0.0), &ExtensionSpec::span(vec![constant()]), &space, &grid(0.0)).unwrap();
    assert!(scan.is_ray_consistent());
    for c in &scan.cells {
        let on_axis = c.ray == 1;
        assert_eq!(c.class == CellClass::Deficient, on_axis, "cell {c:?}");
    }
    let first = scan.cells.iter().find(|c| c.ray == 1 && c.r_lo == 1.0).unwrap();
    let j01_sq = 5.783185962946784;
    assert!(first.eigenvalues.iter().any(|e| (e[0] - j01_sq).abs() < 0.01 * j01_sq));
}

#[test]
fn malformed_grids_are_rejected() {
    let space = build_space(20.0, 64, 2).unwrap();
    let mut g = grid(PI);
    g.radii = vec![10.0, 1.0];
    g.rays = 0;
    let err = bg_spectrum_scan(&cl2(0.0), &ExtensionSpec::minimal(), &space, &g).unwrap_err();
    match err {
        mellin_core::Error::Validation(list) => assert_eq!(list.len(), 2),
        other => panic!("unexpected {other}"),
    }
}
