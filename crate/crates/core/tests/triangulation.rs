use octanormal::diagram::build_diagram;
use octanormal::fixtures;
use octanormal::triangulation::*;

#[test]
fn inflated_audit_on_fixtures() {
    for fx in fixtures::knots() {
        let d = build_diagram(&fx.graph()).unwrap();
        let c = d.crossing_count();
        if c <= 2 {
            continue;
        }
        let t0 = assemble_ideal(&d).unwrap();
        let r0 = validate_triangulation(&t0);
        let ts = insert_pillows(&d).unwrap();
        let rs = validate_triangulation(&ts);
        let t = build_inflated(&d).unwrap();
        let r = validate_triangulation(&t);
        let m = t.frame.as_ref().unwrap().x.len();
        println!("{} c={c} m={m}\n T0 {:?}\n T* {:?}\n T {:?}", fx.name, r0, rs, r);
        assert!(r.failures.is_empty());
        assert_eq!(r.free_faces, 2);
        assert_eq!(t.tet_count(), 5 * c + 4 + m + 3);
    }
}

#[test]
fn ideal_triangulation_is_closed_up() {
    for fx in fixtures::knots() {
        let d = build_diagram(&fx.graph()).unwrap();
        let t = assemble_ideal(&d).unwrap();
        let r = validate_triangulation(&t);
        assert_eq!(r.free_faces, 0, "{}", fx.name);
        assert_eq!(t.tet_count(), 5 * d.crossing_count(), "{}", fx.name);
        assert!(r.orientable);
    }
}

#[test]
fn pillows_leave_one_vertex_and_no_free_faces() {
    let d = build_diagram(&fixtures::TREFOIL.graph()).unwrap();
    let t = insert_pillows(&d).unwrap();
    let r = validate_triangulation(&t);
    assert_eq!(t.tet_count(), 5 * 3 + 4);
    assert_eq!(r.vertices, 1);
    assert!(r.failures.is_empty(), "{:?}", r.failures);
}

#[test]
fn single_octahedron_exposes_its_eight_faces() {
    for w in [1, -1] {
        let t = crossing_octahedron(w, 0);
        assert_eq!(t.tet_count(), 5);
        assert_eq!(t.free_faces().len(), 8);
    }
}

#[test]
fn gluing_table_round_trips() {
    for fx in [fixtures::TREFOIL, fixtures::THETA_1_1_1, fixtures::PRETZEL_5_M2] {
        let d = build_diagram(&fx.graph()).unwrap();
        let t = build_inflated(&d).unwrap();
        let table = export_gluing_table(&t);
        assert!(table.lines().nth(2).unwrap().starts_with("#free "));
        assert_eq!(table.lines().nth(2).unwrap().split_whitespace().count(), 3);
        let back = parse_gluing_table(&table).unwrap();
        assert_eq!(export_gluing_table(&back), table);
    }
}

#[test]
fn inflated_trefoil_is_a_knot_exterior() {
    let d = build_diagram(&fixtures::TREFOIL.graph()).unwrap();
    let r = validate_triangulation(&build_inflated(&d).unwrap());
    assert_eq!(r.vertices, 1);
    assert!(r.orientable);
    assert_eq!(r.h1_rank, 1);
    assert!(r.h1_torsion.is_empty());
}

#[test]
fn deleted_pairing_is_detected() {
    let d = build_diagram(&fixtures::TREFOIL.graph()).unwrap();
    let mut t = build_inflated(&d).unwrap();
    t.delete_pairing(0, 0);
    let r = validate_triangulation(&t);
    assert_eq!(r.free_faces, 4);
}

#[test]
fn too_few_crossings_are_refused() {
    let d = build_diagram(&fixtures::UNKNOT.graph()).unwrap();
    assert!(build_inflated(&d).is_err());
}
