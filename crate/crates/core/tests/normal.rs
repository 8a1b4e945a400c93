use octanormal::diagram::build_diagram;
use octanormal::fixtures;
use octanormal::normal::*;
use octanormal::triangulation::build_inflated;

fn trefoil_system() -> QMatchingSystem {
    let d = build_diagram(&fixtures::TREFOIL.graph()).unwrap();
    qmatching_matrix(&build_inflated(&d).unwrap())
}

#[test]
fn system_has_three_columns_per_tetrahedron() {
    let sys = trefoil_system();
    assert_eq!(sys.columns, 3 * 28);
    assert!(!sys.equation_rows().is_empty());
}

#[test]
fn zero_vector_is_normal() {
    let sys = trefoil_system();
    assert!(is_normal(&vec![0; sys.columns], &sys).unwrap());
}

#[test]
fn wrong_length_is_an_error() {
    let sys = trefoil_system();
    assert!(sys.residual(&[0; 5]).is_err());
}

#[test]
fn two_quad_types_in_one_tetrahedron_are_inadmissible() {
    assert!(!is_admissible(&[1, 1, 0]));
    assert!(!is_admissible(&[-1, 0, 0]));
    assert!(is_admissible(&[0, 2, 0, 1, 0, 0]));
}

#[test]
fn normal_unit_vectors_are_exactly_the_weight_one_fundamentals() {
    let sys = trefoil_system();
    let fund = fundamental_solutions(&sys, 1, usize::MAX).unwrap();
    for c in 0..sys.columns {
        let mut v = vec![0; sys.columns];
        v[c] = 1;
        assert_eq!(is_normal(&v, &sys).unwrap(), fund.contains(&v), "column {c}");
    }
}

#[test]
fn fundamental_solutions_are_normal_and_indecomposable() {
    let sys = trefoil_system();
    let fund = fundamental_solutions(&sys, 1, usize::MAX).unwrap();
    assert!(!fund.is_empty());
    for v in &fund {
        assert!(is_normal(v, &sys).unwrap());
        assert!(proper_subsolution(&sys, v).is_none());
    }
}

#[test]
fn sums_of_fundamentals_are_decomposable() {
    let sys = trefoil_system();
    let fund = fundamental_solutions(&sys, 1, usize::MAX).unwrap();
    let pair = fund.iter().flat_map(|a| fund.iter().map(move |b| (a, b))).find_map(|(a, b)| {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        (a != b && is_admissible(&s)).then_some(s)
    });
    let s = pair.expect("two compatible fundamental solutions");
    assert!(is_normal(&s, &sys).unwrap());
    assert!(proper_subsolution(&sys, &s).is_some());
}

#[test]
fn filter_drops_sums() {
    let a = vec![1, 0, 0, 0];
    let b = vec![0, 0, 0, 1];
    let ab = vec![1, 0, 0, 1];
    assert_eq!(fundamental_filter(&[ab, a.clone(), b.clone()]), vec![b, a]);
}

#[test]
fn resource_guard_trips() {
    let sys = trefoil_system();
    assert!(matches!(fundamental_solutions(&sys, 1, 3), Err(octanormal::Error::Resource(_))));
    assert!(fundamental_solutions(&sys, 0, 10).is_err());
}
