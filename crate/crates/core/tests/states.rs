use octanormal::diagram::*;
use octanormal::fixtures;
use octanormal::states::*;
use octanormal::Error;

fn diagram(f: &fixtures::Fixture) -> KnotDiagram {
    build_diagram(&f.graph()).unwrap()
}

fn cube(edges: usize, n: usize) -> Vec<Vec<usize>> {
    (0..(n + 1).pow(edges as u32))
        .map(|mut x| {
            (0..edges)
                .map(|_| {
                    let v = x % (n + 1);
                    x /= n + 1;
                    v
                })
                .collect()
        })
        .collect()
}

#[test]
fn degree_formulas() {
    assert_eq!(skein_degree(1, 1, 1, 4).unwrap(), 1);
    assert_eq!(skein_degree(0, 0, 0, 3).unwrap(), 0);
    assert!(skein_degree(1, 1, 2, 4).is_err());
    assert_eq!(twist_degree(1, 3, 2, 1).unwrap(), 16);
    assert_eq!(twist_degree(1, 3, 2, -1).unwrap(), 2);
    assert_eq!(crossing_degree(3, 3, 1).unwrap(), 0);
    assert!(twist_degree(4, 3, 1, 1).is_err());
}

#[test]
fn state_values_are_bounded_by_n() {
    assert!(ColoredKauffmanState::new(2, vec![3]).is_err());
    assert!(ColoredKauffmanState::new(0, vec![]).is_err());
}

#[test]
fn unknot_cable_has_n_circles() {
    let d = diagram(&fixtures::UNKNOT);
    for n in 1..=5 {
        let c = state_circles(&d, &ColoredKauffmanState::new(n, vec![]).unwrap()).unwrap();
        assert_eq!(c.circles.len(), n);
    }
}

#[test]
fn n1_circles_match_kauffman_circles() {
    for f in fixtures::knots() {
        let d = diagram(&f);
        let g = &d.graph;
        for k in cube(g.edges.len(), 1) {
            let state = ColoredKauffmanState::new(1, k.clone()).unwrap();
            let cabled = state_circles(&d, &state).unwrap().circles.len();
            let (_, kauffman) = kauffman_circles(&d, &state.kauffman_smoothings(&d).unwrap());
            // A cut band hides |w| - 1 small circles between its end turnbacks.
            let hidden: usize = (0..g.edges.len()).filter(|&e| k[e] == 0).map(|e| g.edges[e].weight.unsigned_abs() as usize - 1).sum();
            assert_eq!(cabled + hidden, kauffman, "{} {k:?}", f.name);
        }
    }
}

#[test]
fn surface_kinds_follow_k() {
    assert_eq!(surface_kind(0, 3), octanormal::normal::SurfaceKind::III);
    assert_eq!(surface_kind(1, 3), octanormal::normal::SurfaceKind::I);
    assert_eq!(surface_kind(3, 3), octanormal::normal::SurfaceKind::II);
}

#[test]
fn theta_flow_states_induce_flows() {
    let d = diagram(&fixtures::THETA_3_M3_5);
    let mut v = Verifier::new(&d, PINNED_SADDLE_SIGN).unwrap();
    for k in [vec![0, 2, 2], vec![2, 2, 0]] {
        let state = ColoredKauffmanState::new(2, k.clone()).unwrap();
        let circles = state_circles(&d, &state).unwrap();
        let flow = induces_flow(&d, &state, &circles).unwrap();
        assert_eq!(flow.value, k);
        assert!(v.analyse(&state).unwrap().is_flow_surface_state(), "{k:?}");
    }
}

#[test]
fn zero_state_has_no_flow_constraint() {
    let d = diagram(&fixtures::THETA_3_M3_5);
    let state = ColoredKauffmanState::reference(&d, 2);
    let circles = state_circles(&d, &state).unwrap();
    let flow = induces_flow(&d, &state, &circles).unwrap();
    assert!(flow.value.iter().all(|&x| x == 0));
    assert!(check_conditions(&d, &state, &circles, &flow).all());
}

#[test]
fn partial_negative_edge_breaks_condition_four() {
    let d = diagram(&fixtures::THETA_3_M3_5);
    let neg = d.graph.edges.iter().position(|e| e.weight < 0).unwrap();
    let mut k = vec![0; 3];
    k[neg] = 1;
    let state = ColoredKauffmanState::new(2, k.clone()).unwrap();
    let circles = state_circles(&d, &state).unwrap();
    let flow = Flow { orientation: d.graph.edges.iter().map(|e| (e.ends[0], e.ends[1])).collect(), value: k };
    assert!(!check_conditions(&d, &state, &circles, &flow).negative_full);
}

#[test]
fn adequate_states_are_surface_states() {
    let d = diagram(&fixtures::TREFOIL);
    let mut v = Verifier::new(&d, PINNED_SADDLE_SIGN).unwrap();
    for n in 1..=3 {
        for k in [0, n] {
            let state = ColoredKauffmanState::new(n, vec![k]).unwrap();
            let adequate = is_adequate(&d, &state.kauffman_smoothings(&d).unwrap());
            assert_eq!(v.analyse(&state).unwrap().from_adequate_state, adequate);
        }
    }
}

#[test]
fn reference_record_uses_the_state_surface() {
    let d = diagram(&fixtures::TREFOIL);
    let r = reference_record(&d, 2, PINNED_SADDLE_SIGN).unwrap();
    assert_eq!(r.k_vector, vec![0]);
    assert_eq!(r.surface, "state");
    assert_eq!(r.h, 3 * 4);
}

#[test]
fn verify_rejects_the_unknot_and_large_jobs() {
    let u = diagram(&fixtures::UNKNOT);
    assert!(matches!(verify_main_theorem(&u, 1, PINNED_SADDLE_SIGN, STATE_LIMIT), Err(Error::Validation(_))));
    let t = diagram(&fixtures::THETA_3_M3_5);
    assert!(matches!(verify_main_theorem(&t, 4, PINNED_SADDLE_SIGN, 100), Err(Error::Resource(_))));
}

#[test]
fn verify_records_are_lexicographic() {
    let d = diagram(&fixtures::THETA_3_M3_5);
    let r = verify_main_theorem(&d, 2, PINNED_SADDLE_SIGN, STATE_LIMIT).unwrap();
    assert_eq!(r.states_examined, 27);
    let ks: Vec<_> = r.records.iter().map(|x| x.k_vector.clone()).collect();
    let mut sorted = ks.clone();
    sorted.sort();
    assert_eq!(ks, sorted);
    assert_eq!(ks[0], vec![0, 0, 0]);
}

#[test]
fn khovanov_of_the_unknot() {
    let kh = khovanov_homology(&diagram(&fixtures::UNKNOT)).unwrap();
    assert_eq!(kh.graded.into_iter().collect::<Vec<_>>(), vec![((0, -1), 1), ((0, 1), 1)]);
    assert!(kh.torsion.is_empty());
}

#[test]
fn khovanov_of_the_trefoil() {
    let d = diagram(&fixtures::TREFOIL);
    let kh = khovanov_homology(&d).unwrap();
    assert!(kh.d_squared_zero);
    assert_eq!(kh.graded.values().sum::<usize>(), 4);
    assert_eq!(kh.torsion.values().flatten().copied().collect::<Vec<_>>(), vec![2]);
    assert_eq!(kh.euler, expected_euler(&d).unwrap());
}

#[test]
fn complex_squares_to_zero_and_decategorifies() {
    for f in [fixtures::TREFOIL_MIRROR, fixtures::THETA_1_1_1, fixtures::PRETZEL_5_M2] {
        let d = diagram(&f);
        let cx = KhovanovComplex::new(&d).unwrap();
        assert_eq!(cx.d_squared_defects(), 0, "{}", f.name);
        assert_eq!(cx.chain_euler(), expected_euler(&d).unwrap(), "{}", f.name);
    }
}

#[test]
fn khovanov_guard() {
    let d = diagram(&fixtures::SQUARE_DIAGONAL_20);
    assert!(matches!(khovanov_homology(&d), Err(Error::Resource(_))));
}

#[test]
fn cycle_check_separates_adequate_states() {
    let d = diagram(&fixtures::TREFOIL);
    let mut saw_split = false;
    for mask in 0..8usize {
        let s: Vec<Smoothing> = (0..3).map(|x| if mask >> x & 1 == 1 { Smoothing::Cut } else { Smoothing::Continue }).collect();
        let check = cycle_check(&d, &s).unwrap();
        if is_adequate(&d, &s) {
            assert!(check.is_cycle && check.all_merges);
        }
        saw_split |= !check.all_merges;
    }
    assert!(saw_split);
    assert!(cycle_check(&d, &[Smoothing::Cut]).is_err());
}

#[test]
fn window_check_is_adequacy_for_unit_weights() {
    let d = diagram(&fixtures::THETA_1_1_1);
    for k in cube(3, 1) {
        let state = ColoredKauffmanState::new(1, k.clone()).unwrap();
        let adequate = is_adequate(&d, &state.kauffman_smoothings(&d).unwrap());
        assert_eq!(window_cycle_check(&d, &state).unwrap(), adequate, "{k:?}");
    }
}
