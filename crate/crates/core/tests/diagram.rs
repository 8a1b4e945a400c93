use octanormal::diagram::*;
use octanormal::fixtures;
use octanormal::Error;

#[test]
fn zero_weight_is_rejected() {
    let text = r#"{"vertices":["a","b"],"rotations":{"a":["e"],"b":["e"]},"edges":[{"id":"e","ends":["a","b"],"weight":0}]}"#;
    assert!(matches!(parse_graph(text), Err(Error::Validation(_))));
}

#[test]
fn disconnected_graph_is_rejected() {
    let text = r#"{"vertices":["a","b","c"],"rotations":{"a":["e"],"b":["e"],"c":[]},"edges":[{"id":"e","ends":["a","b"],"weight":1}]}"#;
    assert!(matches!(parse_graph(text), Err(Error::Validation(_))));
}

#[test]
fn malformed_json_is_a_parse_error() {
    assert!(matches!(parse_graph("{"), Err(Error::Parse(_))));
}

#[test]
fn unknown_edge_in_rotation_is_rejected() {
    let text = r#"{"vertices":["a"],"rotations":{"a":["x","x"]},"edges":[]}"#;
    assert!(parse_graph(text).is_err());
}

#[test]
fn faces_satisfy_euler() {
    for f in fixtures::all() {
        let g = f.graph();
        let faces = g.compute_faces();
        let chi = g.vertex_ids.len() as i64 - g.edges.len() as i64 + faces.len() as i64;
        assert_eq!(chi, 2, "{}", f.name);
        assert_eq!(faces.iter().filter(|x| x.unbounded).count(), 1, "{}", f.name);
    }
}

#[test]
fn single_edge_faces() {
    let g = parse_graph(r#"{"vertices":["a","b"],"rotations":{"a":["e"],"b":["e"]},"edges":[{"id":"e","ends":["a","b"],"weight":1}]}"#)
        .unwrap();
    assert_eq!(g.compute_faces().len(), 1);
    let theta = fixtures::THETA_1_1_1.graph();
    assert_eq!(theta.compute_faces().len(), 3);
}

#[test]
fn weight_two_loop_is_not_a_knot() {
    let g = WeightedPlanarGraph::from_parts(1, &[(0, 0, 2)], &[vec![(0, 0), (0, 1)]]).unwrap();
    assert!(matches!(build_diagram(&g), Err(Error::Validation(_))));
}

#[test]
fn crossing_count_is_total_absolute_weight() {
    for f in fixtures::all() {
        let g = f.graph();
        let d = build_diagram(&g).unwrap();
        let total: i64 = g.edges.iter().map(|e| e.weight.abs()).sum();
        assert_eq!(d.crossing_count() as i64, total, "{}", f.name);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.traversal.len(), 2 * d.crossing_count());
    }
    let sq = build_diagram(&fixtures::SQUARE_DIAGONAL_20.graph()).unwrap();
    assert_eq!(sq.crossing_count(), 20);
}

#[test]
fn ports_are_an_involution() {
    for f in fixtures::knots() {
        let d = build_diagram(&f.graph()).unwrap();
        for (c, ports) in d.conn.iter().enumerate() {
            for h in Half::ALL {
                let (c2, h2) = ports[h as usize];
                assert_eq!(d.conn[c2][h2 as usize], (c, h));
            }
        }
    }
}

#[test]
fn mirror_negates_writhe_and_seifert_twist() {
    for f in fixtures::knots() {
        let g = f.graph();
        let d = build_diagram(&g).unwrap();
        let m = build_diagram(&g.mirror()).unwrap();
        assert_eq!(d.writhe(), -m.writhe(), "{}", f.name);
        for s in [SaddleSign::Plus, SaddleSign::Minus] {
            assert_eq!(seifert_twist(&d, s), -seifert_twist(&m, s), "{}", f.name);
        }
    }
}

#[test]
fn saddle_sign_flips_twist() {
    let d = build_diagram(&fixtures::TREFOIL.graph()).unwrap();
    assert_eq!(seifert_twist(&d, SaddleSign::Plus), -seifert_twist(&d, SaddleSign::Minus));
    assert_eq!(SaddleSign::parse("-").unwrap(), SaddleSign::Minus);
    assert!(SaddleSign::parse("x").is_err());
}

#[test]
fn trefoil_loop_crossings_share_a_sign() {
    let d = build_diagram(&fixtures::TREFOIL.graph()).unwrap();
    let signs = d.crossing_signs();
    assert_eq!(signs.len(), 3);
    assert!(signs.iter().all(|&s| s == signs[0]));
    assert_eq!(d.writhe().abs(), 3);
}
