use proptest::prelude::*;
use syntomic_core::chart::{render_json, render_svg, render_text, ChartSpec, Dump, LabelPolicy};
use syntomic_core::instances::{syntomic, syntomic_window, tp_page, BasisClass, BigradedBasis};
use syntomic_core::Window;

#[test]
fn figure_axes() {
    let s = syntomic(2, 2, &syntomic_window(2, 2)).unwrap();
    let spec = ChartSpec::fit(&s.basis, LabelPolicy::Full);
    assert_eq!(spec.degrees, (-2, 26));
    assert_eq!(spec.weights, (-1, 5));
    let svg = render_svg(&s.basis, &spec).unwrap();
    assert_eq!(svg.matches("<circle").count(), 28);
    let dots = render_text(&s.basis, &ChartSpec { labels: LabelPolicy::Dots, ..spec }).unwrap();
    assert_eq!(dots.matches('*').count(), 28);
}

#[test]
fn minus_one_chart_has_two_marks() {
    let s = syntomic(2, -1, &syntomic_window(2, -1)).unwrap();
    let text = render_text(&s.basis, &ChartSpec::new((-1, 0), (0, 1), LabelPolicy::Dots)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "1 | *  .");
    assert_eq!(lines[1], "0 | .  *");
}

#[test]
fn dumps_round_trip() {
    let s = syntomic(2, 2, &syntomic_window(2, 2)).unwrap();
    let text = render_json(&Dump::new(&s.basis));
    let parsed = Dump::parse(&text).unwrap();
    assert_eq!(parsed.classes.len(), 28);
    assert_eq!(render_json(&parsed), text);
    assert!(Dump::parse("{\"p\": 2").is_err());
}

#[test]
fn tate_dump_logs_the_differentials() {
    let tp = tp_page(2, 2, &Window::degrees(-40, 40)).unwrap();
    let dump = Dump::new(&tp.basis).with_log(&tp.run.log);
    let text = render_json(&dump);
    let parsed = Dump::parse(&text).unwrap();
    let pages: std::collections::BTreeSet<u32> = parsed.differentials.unwrap().iter().filter(|e| e.rank > 0).map(|e| e.page).collect();
    assert_eq!(pages.into_iter().collect::<Vec<_>>(), vec![1, 2, 4, 8]);
}

fn basis() -> impl Strategy<Value = BigradedBasis> {
    prop::collection::vec(("[a-z<&>]{1,4}", -5i64..5, -2i64..3), 0..12).prop_map(|cs| {
        BigradedBasis::new(
            3,
            0,
            Window::degrees(-5, 5),
            cs.into_iter().map(|(l, d, w)| BasisClass::new(l, d, w)).collect(),
        )
    })
}

proptest! {
    #[test]
    fn every_class_rendered_once(b in basis()) {
        let spec = ChartSpec::new((-5, 5), (-2, 3), LabelPolicy::Dots);
        let text = render_text(&b, &spec).unwrap();
        prop_assert_eq!(text.matches('*').count(), b.len());
        let svg = render_svg(&b, &spec).unwrap();
        prop_assert_eq!(svg.matches("<circle").count(), b.len());
        prop_assert_eq!(&svg, &render_svg(&b, &spec).unwrap());
        let full = render_svg(&b, &ChartSpec { labels: LabelPolicy::Full, ..spec }).unwrap();
        prop_assert_eq!(full.matches("<text x=").count() - 11 - 6, b.len());
        let dump = Dump::parse(&render_json(&Dump::new(&b))).unwrap();
        prop_assert_eq!(dump.classes, b.classes);
    }
}
