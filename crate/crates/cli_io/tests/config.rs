use cli_io::cli::parse_complex;
use cli_io::config::{normalize_degrees, GridConfig, RayConfig};
use cli_io::input::parse_json;
use cli_io::{exit_code, EXIT_INVALID, EXIT_NUMERICAL};
use mellin_core::Error;
use proptest::prelude::*;

#[test]
fn numerical_failures_map_to_exit_three() {
    let ill = Error::IllConditioned { cond: 1e12, context: "bordered matrix".into() };
    assert_eq!(exit_code(&ill), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::InSpectrum(mellin_core::c64(1.0, 0.0))), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::Validation(vec!["x".into()])), EXIT_INVALID);
    assert_eq!(exit_code(&Error::NotCElliptic), EXIT_INVALID);
}

#[test]
fn ray_config_enumerates_every_problem() {
    let err = RayConfig::new(f64::NAN, 0.0, -1.0, -2.0, 2).unwrap_err();
    match err {
        Error::Validation(list) => assert_eq!(list.len(), 5, "{list:?}"),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn grid_config_rejects_tiny_grids() {
    assert!(GridConfig::new(20.0, 8).is_err());
    assert!(GridConfig::new(0.0, 512).is_err());
    assert!(GridConfig::new(20.0, 512).is_ok());
}

#[test]
fn complex_arguments_parse() {
    assert_eq!(parse_complex("0,0.5").unwrap(), mellin_core::c64(0.0, 0.5));
    assert_eq!(parse_complex("-1").unwrap(), mellin_core::c64(-1.0, 0.0));
    assert!(parse_complex("1,2,3").is_err());
    assert!(parse_complex("a,b").is_err());
}

#[test]
fn json_errors_carry_the_field_path() {
    #[derive(serde::Deserialize, Debug)]
    #[allow(dead_code)]
    struct Probe {
        values: Vec<f64>,
    }
    let err = parse_json::<Probe>("{\"values\": [1, \"x\"]}", "probe").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("values[1]"), "{msg}");
    assert!(msg.contains("line 1"), "{msg}");
}

proptest! {
    #[test]
    fn normalized_degrees_stay_in_range_and_keep_direction(a in -1e4f64..1e4) {
        let n = normalize_degrees(a);
        prop_assert!((0.0..360.0).contains(&n));
        let d = (a - n) / 360.0;
        prop_assert!((d - d.round()).abs() < 1e-9);
    }

    #[test]
    fn ray_config_accepts_every_valid_ray(theta in -720.0f64..720.0, ap in 1.0f64..359.0, lo in 1e-3f64..10.0, span in 1.01f64..1e3, n in 8usize..200) {
        let rc = RayConfig::new(theta, ap, lo, lo * span, n).unwrap();
        prop_assert!((0.0..360.0).contains(&rc.theta0_deg));
        prop_assert!((rc.theta0().cos() - theta.to_radians().cos()).abs() < 1e-9);
    }
}
