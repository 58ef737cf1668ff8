use proptest::prelude::*;
use syntomic_core::instances::*;
use syntomic_core::Window;

fn labels(b: &BigradedBasis) -> Vec<&str> {
    b.labels()
}

#[test]
fn syntomic_at_height_minus_one() {
    let s = syntomic(2, -1, &syntomic_window(2, -1)).unwrap();
    assert_eq!(s.basis.bidegrees(), vec![(-1, 1), (0, 0)]);
    assert_eq!(labels(&s.basis), vec!["∂", "1"]);
}

#[test]
fn syntomic_at_three_zero() {
    let s = syntomic(3, 0, &syntomic_window(3, 0)).unwrap();
    let mut found: Vec<(&str, (i64, i64))> = s.basis.classes.iter().map(|c| (c.label.as_str(), c.bidegree())).collect();
    found.sort();
    let mut expected = vec![
        ("1", (0, 0)),
        ("∂", (-1, 1)),
        ("λ_1", (5, 1)),
        ("∂λ_1", (4, 2)),
        ("Ξ_{1,1}", (3, 1)),
        ("Ξ_{1,2}", (1, 1)),
    ];
    expected.sort();
    assert_eq!(found, expected);
}

#[test]
fn boundary_of_top_class_at_two_two() {
    let s = syntomic(2, 2, &syntomic_window(2, 2)).unwrap();
    assert_eq!(s.basis.find("∂λ_1λ_2λ_3").map(BasisClass::bidegree), Some((24, 4)));
    assert_eq!(s.basis.len() as u64, syntomic_dimension(2, 2));
    let stacked: Vec<&str> = s.basis.classes.iter().filter(|c| c.bidegree() == (3, 1)).map(|c| c.label.as_str()).collect();
    assert_eq!(stacked, vec!["Ξ_{2,1}", "λ_1"]);
}

#[test]
fn syntomic_needs_the_degree_range() {
    let err = syntomic(3, 1, &Window::degrees(0, 10)).unwrap_err();
    assert!(err.is_window_error());
    assert!(err.to_string().starts_with("WINDOW_TOO_SMALL"));
}

#[test]
fn invalid_parameters() {
    assert!(matches!(syntomic(4, 0, &Window::degrees(-5, 5)), Err(InstanceError::InvalidParameters(_))));
    assert!(matches!(tp_page(3, -2, &Window::degrees(-5, 5)), Err(InstanceError::InvalidParameters(_))));
}

#[test]
fn hochschild_may_detects_lambda_at_three() {
    let hm = hochschild_may(3, 0, &Window::degrees(0, 12)).unwrap();
    assert_eq!(hm.detection, vec![true]);
    assert!(hm.basis.classes.iter().any(|c| c.label == "σv_0μ^{2}" && c.bidegree() == (5, 1)));
    assert_eq!(hm.basis.bidegrees(), thh_bpn_page(3, 0, &Window::degrees(0, 12)).unwrap().bidegrees());
}

#[test]
fn hochschild_may_without_rules_is_polynomial() {
    let hm = hochschild_may(5, -1, &Window::degrees(0, 6)).unwrap();
    assert_eq!(labels(&hm.basis), vec!["1", "μ", "μ^{2}", "μ^{3}"]);
    assert!(hm.run.log.is_empty());
}

#[test]
fn tp_at_height_minus_one() {
    let tp = tp_page(2, -1, &Window::degrees(-8, 8)).unwrap();
    let degrees: Vec<i64> = tp.basis.classes.iter().map(|c| c.degree).collect();
    assert_eq!(degrees, vec![-8, -6, -4, -2, 0, 2, 4, 6, 8]);
    assert!(tp.basis.classes.iter().all(|c| c.adams_weight == 0));
}

#[test]
fn tc_minus_pieces_at_three_one() {
    let tc = tc_minus_page(3, 1, &Window::degrees(-20, 20)).unwrap();
    let mut xi: Vec<&str> = tc.decomposition.xi.iter().map(|c| c.label.as_str()).collect();
    xi.sort();
    let mut expected = vec!["Ξ_{1,1}", "Ξ_{1,1}λ_2", "Ξ_{1,2}", "Ξ_{1,2}λ_2", "λ_1Ξ_{2,1}", "λ_1Ξ_{2,2}", "Ξ_{2,1}", "Ξ_{2,2}"];
    expected.sort();
    assert_eq!(xi, expected);
    // λ_1λ_2 sits in degree 22
    assert_eq!(tc.decomposition.a00.len(), 3);
    let total = tc.decomposition.len();
    assert_eq!(total, tc.computation.basis.len());
}

#[test]
fn can_and_phi_on_named_classes() {
    let cp = can_phi_matrices(2, 0, &Window::degrees(-8, 8)).unwrap();
    let image = |label: &str| {
        for (i, src) in cp.sources.iter().enumerate() {
            if let Some(col) = src.iter().position(|c| c.label == label) {
                let can: Vec<String> = (0..cp.targets[i].len()).filter(|&r| cp.can[i].get(r, col) != 0).map(|r| cp.targets[i][r].label.clone()).collect();
                let phi: Vec<String> = (0..cp.targets[i].len()).filter(|&r| cp.phi[i].get(r, col) != 0).map(|r| cp.targets[i][r].label.clone()).collect();
                return (can, phi);
            }
        }
        panic!("{label} missing");
    };
    assert_eq!(image("λ_1"), (vec!["λ_1".to_string()], vec!["λ_1".to_string()]));
    assert_eq!(image("Ξ_{1,1}"), (vec![], vec![]));
    assert_eq!(image("μ^{2}"), (vec![], vec!["t^{-2}".to_string()]));
    assert_eq!(image("t^{2}"), (vec!["t^{2}".to_string()], vec![]));
}

#[test]
fn gap_check_at_height_minus_one() {
    let r = vn1_bockstein_gap_check(3, -1).unwrap();
    assert!(r.pass);
    assert!(r.witnesses.is_empty());
    assert_eq!(r.unit_candidates.len(), 1);
    assert_eq!(r.unit_candidates[0].target, "∂");
}

#[test]
fn bp2_examples() {
    let tc = tc_bp2(5, &Window::degrees(-3, 60)).unwrap();
    let at = |s: i64| tc.basis.classes.iter().filter(|c| c.degree == s).map(|c| c.label.clone()).collect::<Vec<_>>();
    assert!(at(-1).contains(&"∂".to_string()));
    assert!(at(9).contains(&"λ_1".to_string()));
    for (d, s) in [(1, 7), (2, 5), (3, 3), (4, 1)] {
        assert!(at(s).contains(&format!("Ξ_{{1,{d}}}")), "Ξ_{{1,{d}}} at {s}");
    }
    assert_eq!(v3_degree(7), 684);
    let k = k_bp2(5, &Window::degrees(-3, 60)).unwrap();
    let row = |s: i64| *k.iter().find(|r| r.degree == s).unwrap();
    assert_eq!(row(7).k, row(7).tc + 1);
    assert_eq!(row(56).k, row(56).tc + 1);
    assert_eq!(row(47).k, row(47).tc + 1);
    assert_eq!(row(8).k, row(8).tc);
    assert!(k.iter().filter(|r| r.degree < 0).all(|r| r.k == 0));
}

#[test]
fn bp2_rejects_small_primes() {
    assert!(matches!(tc_bp2(3, &Window::degrees(0, 10)), Err(InstanceError::Precondition(_))));
    assert!(matches!(k_bp2(2, &Window::degrees(0, 10)), Err(InstanceError::Precondition(_))));
    assert!(matches!(motivic_no_room(2), Err(InstanceError::Precondition(_))));
}

#[test]
fn labelings_list_both_conventions() {
    let l = NygaardDecomposition::labelings();
    assert_eq!(l[0]["A11"], "xi");
    assert_eq!(l[1]["A10"], "xi");
}

#[test]
fn hodge_tate_three_one() {
    let sq = hodge_tate_square(3, 1, &Window::degrees(-40, 40)).unwrap();
    assert!(sq.commutes);
    let fp = fp_comparison_check(3, 1, &Window::degrees(0, 40)).unwrap();
    assert!(fp.pass);
    assert!(fp.image.iter().all(|c| c.label == "1" || c.label.starts_with("μ^{9") || c.label.starts_with("μ^{18") || c.label.starts_with("μ^{27") || c.label.starts_with("μ^{36") || c.label == "ε_2"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn wider_windows_give_the_same_syntomic_basis(p in prop::sample::select(vec![2u32, 3, 5]), n in -1i32..=1, lo in 0i64..6, hi in 0i64..12) {
        let base = syntomic(p, n, &syntomic_window(p, n)).unwrap();
        let (a, b) = degree_range(p, n);
        let wide = syntomic(p, n, &Window::degrees(a - lo, b + hi)).unwrap();
        prop_assert_eq!(base.basis.classes, wide.basis.classes);
    }

    #[test]
    fn tp_inner_half_is_stable(p in prop::sample::select(vec![2u32, 3]), n in -1i32..=1, half in 4i64..24) {
        let small = tp_page(p, n, &Window::degrees(-half, half)).unwrap();
        let big = tp_page(p, n, &Window::degrees(-2 * half, 2 * half)).unwrap();
        let inner = |b: &BigradedBasis| b.classes.iter().filter(|c| c.degree.abs() <= half / 2).cloned().collect::<Vec<_>>();
        prop_assert_eq!(inner(&small.basis), inner(&big.basis));
    }

    #[test]
    fn gap_check_passes_everywhere(p in prop::sample::select(vec![2u32, 3, 5, 7, 11]), n in -1i32..=3) {
        prop_assert!(vn1_bockstein_gap_check(p, n).unwrap().pass);
    }

    #[test]
    fn k_table_is_connective(p in prop::sample::select(vec![5u32, 7, 11]), lo in -20i64..0, width in 1i64..200) {
        let rows = k_bp2(p, &Window::degrees(lo, lo + width)).unwrap();
        let corrections = k_bp2_corrections(p);
        for r in rows {
            if r.degree < 0 {
                prop_assert_eq!(r.k, 0);
            } else {
                prop_assert_eq!(r.k, r.tc + usize::from(corrections.contains(&r.degree)));
            }
        }
    }
}
