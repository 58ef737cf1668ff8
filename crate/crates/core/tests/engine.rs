use proptest::prelude::*;
use syntomic_core::engine::{no_room_report, pages, DifferentialRule, DifferentialShift, EngineError, SpectralSequence};
use syntomic_core::instances::{hochschild_may_sequence, tate_sequence, tp_page};
use syntomic_core::{AlgebraPresentation, Element, GeneratorSpec, Monomial, Trigrade, Window};

fn tp(p: u32, n: i32) -> SpectralSequence {
    tate_sequence(p, n, true, 64).unwrap()
}

fn mono(ss: &SpectralSequence, factors: &[(&str, i64)]) -> Monomial {
    ss.algebra().monomial(factors).unwrap()
}

fn single(ss: &SpectralSequence, factors: &[(&str, i64)], coeff: i64) -> Element {
    Element::from_monomial(mono(ss, factors), coeff, ss.algebra().prime())
}

#[test]
fn epsilon_hits_t_mu() {
    let ss = tp(2, 0);
    let d1 = ss.rule_on_page(1).unwrap();
    assert_eq!(ss.apply_rule(d1, &mono(&ss, &[("ε_1", 1)])), single(&ss, &[("t", 1), ("μ^{2}", 1)], 1));
    assert_eq!(
        ss.apply_rule(d1, &mono(&ss, &[("t", 1), ("μ^{2}", 1), ("ε_1", 1)])),
        single(&ss, &[("t", 2), ("μ^{2}", 2)], 1)
    );
}

#[test]
fn unmatched_monomial_has_zero_image() {
    let ss = tp(2, 0);
    let d1 = ss.rule_on_page(1).unwrap();
    assert!(ss.apply_rule(d1, &mono(&ss, &[("λ_1", 1), ("μ^{2}", 3)])).is_zero());
    let page = ss.initial_page(&Window::degrees(0, 2).with_filtration(0, 0)).unwrap();
    let matrices = syntomic_core::engine::leibniz_extend(&ss, d1, &page).unwrap();
    assert!(matrices.is_empty());
}

#[test]
fn t_squared_picks_up_a_two() {
    let ss = tp(3, 0);
    let d3 = ss.rule_on_page(3).unwrap();
    assert_eq!(ss.apply_rule(d3, &mono(&ss, &[("t", 1)])), single(&ss, &[("t", 4), ("λ_1", 1)], 1));
    assert_eq!(ss.apply_rule(d3, &mono(&ss, &[("t", 2)])), single(&ss, &[("t", 5), ("λ_1", 1)], 2));
    assert!(ss.apply_rule(d3, &mono(&ss, &[("t", 3)])).is_zero());
}

#[test]
fn no_rules_means_no_change() {
    let alg = AlgebraPresentation::new(
        3,
        vec![GeneratorSpec::exterior("x", 3, 1), GeneratorSpec::polynomial("y", 4, 0)],
    )
    .unwrap();
    let ss = SpectralSequence::new(alg, DifferentialShift::bockstein(), 5);
    let window = Window::degrees(0, 20).with_filtration(0, 0);
    let e1 = ss.initial_page(&window).unwrap();
    let run = ss.run(&window).unwrap();
    assert_eq!(run.e_infinity.classes(), e1.classes());
    assert!(run.log.is_empty());
    assert_eq!(run.collapse_page, 1);
}

#[test]
fn mismatched_image_is_rejected_at_registration() {
    let alg = AlgebraPresentation::new(
        2,
        vec![GeneratorSpec::exterior("x", 3, 1), GeneratorSpec::polynomial("y", 2, 0).with_filtration(1)],
    )
    .unwrap();
    let mut ss = SpectralSequence::new(alg.clone(), DifferentialShift::bockstein(), 4);
    let wrong = Element::from_monomial(alg.monomial(&[("y", 1)]).unwrap(), 1, 2);
    let err = ss.add_rule(DifferentialRule::new(1).with_action(0, 1, wrong)).unwrap_err();
    assert!(matches!(err, EngineError::BidegreeMismatch { page: 1, .. }), "{err}");
    assert!(err.to_string().starts_with("BIDEGREE_MISMATCH"));
}

#[test]
fn duplicate_pages_are_rejected() {
    let mut ss = tp(2, -1);
    let again = ss.rules()[0].clone();
    assert!(matches!(ss.add_rule(again), Err(EngineError::DuplicatePage(1))));
}

#[test]
fn constructed_no_room_candidate() {
    let occupied = [Trigrade::new(0, 0, 0), Trigrade::new(-1, 1, 1)];
    let found = no_room_report(&occupied, &DifferentialShift::bockstein(), 1..=1);
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].source, occupied[0]);
    assert_eq!(found[0].target, occupied[1]);
    assert!(no_room_report(&occupied, &DifferentialShift::bockstein(), 2..=5).is_empty());
}

#[test]
fn motivic_shift_scales_weight_with_page() {
    let m = DifferentialShift::motivic();
    assert_eq!(m.target(Trigrade::new(10, 0, 0), 3), Trigrade::new(9, 3, 0));
    let b = DifferentialShift::bockstein();
    assert_eq!(b.target(Trigrade::new(10, 0, 2), 3), Trigrade::new(9, 1, 5));
    assert_eq!(b.source(b.target(Trigrade::new(4, 1, 0), 7), 7), Trigrade::new(4, 1, 0));
}

#[test]
fn hochschild_may_page_two_homology() {
    let ss = hochschild_may_sequence(2, 0).unwrap();
    let report = Window::degrees(0, 8);
    let all = pages(&ss, &ss.closure(&report)).unwrap();
    let last = all.last().unwrap().restricted(&report);
    let alg = ss.algebra();
    let mut leads: Vec<String> = last.classes().iter().map(|c| alg.label(&c.leading)).collect();
    leads.sort();
    let mut expected: Vec<String> = [
        alg.one(),
        alg.monomial(&[("σv_0", 1), ("μ", 1)]).unwrap(),
        alg.monomial(&[("μ^{2}", 1)]).unwrap(),
        alg.monomial(&[("σv_0", 1), ("μ", 1), ("μ^{2}", 1)]).unwrap(),
        alg.monomial(&[("μ^{2}", 2)]).unwrap(),
    ]
    .iter()
    .map(|m| alg.label(m))
    .collect();
    expected.sort();
    assert_eq!(leads, expected);
}

#[test]
fn tp_height_two_at_two() {
    let run = tp_page(2, 2, &Window::degrees(-40, 40)).unwrap();
    let mut shape: Vec<(i64, i64)> = run.basis.classes.iter().map(|c| c.bidegree()).collect();
    shape.sort();
    let lambdas = [3i64, 7, 15];
    let mut expected = Vec::new();
    for mask in 0..8u32 {
        let d: i64 = (0..3).filter(|i| mask & (1 << i) != 0).map(|i| lambdas[i]).sum();
        for k in -10i64..=10 {
            let degree = d - 16 * k;
            if (-40..=40).contains(&degree) {
                expected.push((degree, mask.count_ones() as i64));
            }
        }
    }
    expected.sort();
    assert_eq!(shape, expected);
    assert!(run.basis.classes.iter().all(|c| !c.label.contains('ε') && !c.label.contains('μ')));
    let pages: std::collections::BTreeSet<u32> = run.run.log.iter().filter(|e| e.rank > 0).map(|e| e.page).collect();
    assert_eq!(pages.into_iter().collect::<Vec<_>>(), vec![1, 2, 4, 8]);
}

#[test]
fn after_page_one_no_epsilon_survives() {
    let ss = tate_sequence(2, 2, true, 64).unwrap();
    let report = Window::degrees(-20, 20).with_filtration(-20, 30);
    let all = pages(&ss, &ss.closure(&report)).unwrap();
    let e2 = all[1].restricted(&report);
    let alg = ss.algebra();
    let eps = alg.index_of("ε_3").unwrap();
    let mu = alg.index_of("μ^{8}").unwrap();
    for c in e2.classes() {
        assert_eq!(c.leading.exponent(eps), 0, "{}", alg.label(&c.leading));
        assert_eq!(c.leading.exponent(mu), 0, "{}", alg.label(&c.leading));
    }
}

#[test]
fn collapse_page_is_one_past_the_last_differential() {
    let run = tp_page(3, 0, &Window::degrees(-20, 20)).unwrap();
    assert_eq!(run.run.collapse_page, 4);
    assert!(run.run.no_room.is_empty());
}

#[test]
fn tight_window_is_reported() {
    let ss = tp(2, 0);
    let report = Window::degrees(-6, 6).with_filtration(-2, 2);
    let err = ss.run_in_window(&report, &report).unwrap_err();
    assert!(matches!(err, EngineError::WindowTooSmall { .. }), "{err}");
    assert!(ss.run(&report).is_ok());
}

#[test]
fn replay_is_deterministic() {
    let ss = tp(3, 1);
    let report = Window::degrees(-30, 30).with_filtration(-20, 25);
    let a = ss.run(&report).unwrap();
    let b = ss.run(&report).unwrap();
    assert_eq!(a.log, b.log);
    assert_eq!(a.turns, b.turns);
    assert_eq!(a.e_infinity.classes(), b.e_infinity.classes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bookkeeping_and_stability(p in prop::sample::select(vec![2u32, 3]), n in -1i32..=1, lo in -30i64..0, width in 1i64..30) {
        let ss = tate_sequence(p, n, true, 80).unwrap();
        let report = Window::degrees(lo, lo + width).with_filtration(-20, 20);
        let small = ss.run(&report).unwrap();
        for t in &small.turns {
            prop_assert!(!t.exact || t.dimension_after + 2 * t.rank_sum == t.dimension_before);
        }
        let wide = ss.run_in_window(&ss.closure(&report).expanded(10, 2, 10), &report).unwrap();
        let classes = |r: &syntomic_core::RunResult| {
            r.e_infinity.classes().into_iter().filter(|c| report.contains(c.trigrade)).map(|c| (c.trigrade, c.leading)).collect::<Vec<_>>()
        };
        prop_assert_eq!(classes(&small), classes(&wide));
    }

    #[test]
    fn differential_squares_to_zero(p in prop::sample::select(vec![2u32, 3, 5]), n in 0i32..=1, lo in -40i64..0) {
        let ss = tate_sequence(p, n, false, 80).unwrap();
        let report = Window::degrees(lo, lo + 30).with_filtration(0, 30);
        let shift = ss.shift();
        for page in pages(&ss, &ss.closure(&report)).unwrap() {
            for (s, m) in &page.matrices {
                if let Some(next) = page.matrices.get(&shift.target(*s, page.r)) {
                    prop_assert!(next.mul(m).unwrap().is_zero());
                }
            }
        }
    }
}
