use octanormal::diagram::build_diagram;
use octanormal::fixtures;
use octanormal::skein::*;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-5i64..=5, -4i64..=4), 0..5).prop_map(|t| LaurentPoly::from_terms(&t))
}

fn invert(p: &LaurentPoly) -> LaurentPoly {
    p.map_monomials(|e| Some((1, -e))).unwrap()
}

proptest! {
    #[test]
    fn laurent_ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn rational_functions_cancel(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        let r = RationalFunction::new(&a * &b, b.clone()).unwrap();
        prop_assert_eq!(r.to_laurent(), Some(a));
    }

    #[test]
    fn projectors_kill_turnback_words(n in 2usize..=5, word in prop::collection::vec(1usize..5, 1..4)) {
        let p = jones_wenzl(n).unwrap();
        let mut x = TLElement::identity(n);
        for i in word.into_iter().filter(|&i| i < n) {
            x = x.multiply(&TLElement::turnback(n, i).unwrap()).unwrap();
        }
        let px = p.multiply(&x).unwrap();
        let only_identity = x.terms().all(|(m, _)| *m == PlanarMatching::identity(n));
        prop_assert_eq!(px.is_zero(), !only_identity);
    }

    #[test]
    fn evaluation_order_does_not_matter(seed in any::<u64>()) {
        use lcg::shuffle;
        let d = build_diagram(&fixtures::THETA_1_1_1.graph()).unwrap();
        let net = cable_network(&d, 2, Convention::Verbatim, ProjectorSites::None).unwrap();
        let mut order: Vec<usize> = (0..net.crossing_count()).collect();
        shuffle(&mut order, seed);
        prop_assert_eq!(net.evaluate_in_order(&order).unwrap(), net.evaluate().unwrap());
    }
}

mod lcg {
    /// Fisher-Yates driven by a 64-bit LCG.
    pub fn shuffle(v: &mut [usize], mut s: u64) {
        for i in (1..v.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            v.swap(i, (s >> 33) as usize % (i + 1));
        }
    }
}

#[test]
fn quantum_integers() {
    assert_eq!(quantum_int(1), RationalFunction::one());
    assert_eq!(quantum_int(2).to_laurent(), Some(LaurentPoly::circle()));
    assert_eq!(quantum_int(3).to_laurent(), Some(LaurentPoly::from_terms(&[(2, 1), (0, 1), (-2, 1)])));
}

#[test]
fn temperley_lieb_relations() {
    let n = 4;
    let e = |i| TLElement::turnback(n, i).unwrap();
    let delta = RationalFunction::from(LaurentPoly::circle());
    for i in 1..n {
        assert_eq!(e(i).multiply(&e(i)).unwrap(), e(i).scale(&delta));
    }
    assert_eq!(e(1).multiply(&e(2)).unwrap().multiply(&e(1)).unwrap(), e(1));
    assert_eq!(e(2).multiply(&e(1)).unwrap().multiply(&e(2)).unwrap(), e(2));
    assert_eq!(e(1).multiply(&e(3)).unwrap(), e(3).multiply(&e(1)).unwrap());
    assert!(TLElement::turnback(n, 0).is_err());
    assert!(TLElement::turnback(n, n).is_err());
}

#[test]
fn non_planar_matching_is_rejected() {
    assert!(PlanarMatching::new(vec![3, 2, 1, 0]).is_err());
    assert!(PlanarMatching::new(vec![1, 0, 3, 2]).is_ok());
}

#[test]
fn projector_trace_is_a_quantum_integer() {
    for n in 1..=5 {
        assert_eq!(jones_wenzl(n).unwrap().trace(), quantum_int(n as u32 + 1), "n = {n}");
    }
}

#[test]
fn projectors_are_idempotent() {
    for n in 1..=5 {
        let p = jones_wenzl(n).unwrap();
        assert!(p.multiply(&p).unwrap().sub(&p).unwrap().is_zero());
        assert_eq!(p.coefficient(&PlanarMatching::identity(n)), RationalFunction::one());
    }
}

#[test]
fn bracket_matches_state_sum() {
    for f in fixtures::all().into_iter().filter(|f| f.name != "square_diagonal_20") {
        let d = build_diagram(&f.graph()).unwrap();
        for conv in [Convention::Verbatim, Convention::Classical] {
            assert_eq!(bracket(&d, conv).unwrap(), bracket_exhaustive(&d, conv).unwrap(), "{} {conv:?}", f.name);
        }
    }
}

#[test]
fn unknot_normalization() {
    let d = build_diagram(&fixtures::UNKNOT.graph()).unwrap();
    for conv in [Convention::Verbatim, Convention::Classical] {
        assert_eq!(colored_jones(&d, 1, conv).unwrap().to_string(), "q + q^-1");
        assert_eq!(colored_jones(&d, 3, conv).unwrap(), LaurentPoly::circle().pow(3));
    }
}

#[test]
fn classical_jones_of_mirror_inverts_q() {
    let g = fixtures::TREFOIL.graph();
    let d = build_diagram(&g).unwrap();
    let m = build_diagram(&g.mirror()).unwrap();
    for n in 1..=2 {
        let a = colored_jones(&d, n, Convention::Classical).unwrap();
        let b = colored_jones(&m, n, Convention::Classical).unwrap();
        assert_eq!(a, invert(&b));
        assert_ne!(a, LaurentPoly::circle().pow(n as u32));
    }
}

#[test]
fn verbatim_n1_is_the_bracket() {
    let d = build_diagram(&fixtures::CINQUEFOIL.graph()).unwrap();
    assert_eq!(colored_jones(&d, 1, Convention::Verbatim).unwrap(), bracket(&d, Convention::Verbatim).unwrap());
}

#[test]
fn color_bounds() {
    let d = build_diagram(&fixtures::TREFOIL.graph()).unwrap();
    assert!(colored_jones(&d, 0, Convention::Verbatim).is_err());
    assert!(matches!(colored_jones(&d, MAX_COLOR + 1, Convention::Verbatim), Err(octanormal::Error::Resource(_))));
    assert!(Convention::parse("other").is_err());
}
