use num_rational::Ratio;
use octanormal::normal::SurfaceKind;
use octanormal::slope::*;

fn r(a: i64, b: i64) -> Rational {
    Ratio::new(a, b)
}

#[test]
fn table_values_in_negative_regions() {
    assert_eq!(twist_contribution(SurfaceKind::I, 4, 1, 0, -3).unwrap(), r(-3, 2));
    assert_eq!(twist_contribution(SurfaceKind::II, 2, 2, 0, -3).unwrap(), r(-6, 1));
    assert_eq!(twist_contribution(SurfaceKind::II, 2, 2, 1, -3).unwrap(), r(-8, 1));
    assert_eq!(twist_contribution(SurfaceKind::III, 3, 0, 0, -5).unwrap(), r(0, 1));
}

#[test]
fn positive_regions_negate() {
    for (kind, k) in [(SurfaceKind::I, 1), (SurfaceKind::III, 0)] {
        let neg = twist_contribution(kind, 3, k, 0, -4).unwrap();
        let pos = twist_contribution(kind, 3, k, 0, 4).unwrap();
        assert_eq!(neg, -pos);
    }
}

#[test]
fn type_two_uses_the_signed_weight() {
    assert_eq!(twist_contribution(SurfaceKind::II, 3, 3, 2, 4).unwrap(), r(-4, 1));
    assert_eq!(twist_contribution(SurfaceKind::II, 3, 3, 2, -4).unwrap(), r(-12, 1));
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(twist_contribution(SurfaceKind::I, 2, 2, 0, 3).is_err());
    assert!(twist_contribution(SurfaceKind::I, 0, 0, 0, 3).is_err());
    assert!(twist_contribution(SurfaceKind::II, 2, 3, 0, 3).is_err());
    assert!(twist_contribution(SurfaceKind::II, 2, 2, 4, 3).is_err());
    assert!(twist_contribution(SurfaceKind::III, 2, 0, 0, 0).is_err());
}

#[test]
fn total_needs_each_region_once() {
    let c = |region, value| TwistContribution { region, kind: SurfaceKind::III, n: 1, k: 0, r: 0, w: 1, value };
    assert_eq!(total_twist(&[c(0, r(1, 2)), c(1, r(3, 2))], 2).unwrap(), r(2, 1));
    assert!(total_twist(&[c(0, r(1, 1))], 2).is_err());
    assert!(total_twist(&[c(0, r(1, 1)), c(0, r(1, 1))], 1).is_err());
}

#[test]
fn slope_is_difference_of_twists() {
    let s = boundary_slope(r(-6, 1), r(6, 1));
    assert_eq!(s.slope, r(-12, 1));
    assert_eq!(format_rational(r(-12, 1)), "-12");
    assert_eq!(format_rational(r(3, 6)), "1/2");
}
