mod common;

use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::lookahead::{build_table, is_measured, DelayMode, DelayTable, UNREACHABLE};
use place3d::placement::Loc;
use proptest::prelude::*;

fn check_against_oracle(spec: &ArchSpec) {
    let f = build_fabric(spec).unwrap();
    let t = build_table(&f, spec, DelayMode::Exact);
    for ls in 0..2 {
        let dist = common::oracle_ipin_dist(spec, &f, ls);
        for ld in 0..2 {
            for dx in 0..f.width() {
                for dy in 0..f.height() {
                    if !is_measured(&t, dx, dy) {
                        continue;
                    }
                    let want = common::oracle_entry(&dist, &f, ls, ld, dx, dy);
                    assert_eq!(t.entry(ls, ld, dx, dy), want, "{spec:?} [{ls}][{ld}][{dx}][{dy}]");
                }
            }
        }
    }
}

#[test]
fn sb_example_matches_oracle() {
    let spec = ArchSpec::new(6, 6, Style::Sb).with_delays(1.0, 5.0, 0.0, 0.0);
    check_against_oracle(&spec);
    let f = build_fabric(&spec).unwrap();
    let t = build_table(&f, &spec, DelayMode::Exact);
    assert_eq!(t.entry(0, 0, 2, 1), 3.0);
    assert_eq!(t.entry(0, 1, 0, 0), 5.0);
    assert_eq!(t.lookup(Loc::new(0, 1, 1), Loc::new(1, 1, 1)), 5.0);
}

#[test]
fn sparse_vertical_links_match_oracle() {
    for style in Style::ALL {
        for v_period in [2, 3, 5] {
            check_against_oracle(&ArchSpec::new(7, 5, style).with_v_period(v_period));
        }
    }
}

#[test]
fn entries_nonnegative_with_zero_diagonal() {
    for style in Style::ALL {
        let spec = ArchSpec::new(8, 8, style).with_v_period(3);
        let f = build_fabric(&spec).unwrap();
        for mode in [DelayMode::Exact, DelayMode::Average] {
            let t = build_table(&f, &spec, mode);
            assert!(t.entries().iter().all(|e| (0.0..=UNREACHABLE).contains(e)));
            assert_eq!(t.entry(0, 0, 0, 0), 0.0);
            assert_eq!(t.entry(1, 1, 0, 0), 0.0);
        }
    }
}

#[test]
fn average_mode_underestimates_vertical_on_tsv_fabric() {
    let spec = ArchSpec::new(6, 6, Style::Sb).with_delays(1.0, 5.0, 0.0, 0.0);
    let f = build_fabric(&spec).unwrap();
    let exact = build_table(&f, &spec, DelayMode::Exact);
    let avg = build_table(&f, &spec, DelayMode::Average);
    assert!(avg.entry(0, 1, 0, 0) < exact.entry(0, 1, 0, 0));
    assert!(avg.entry(0, 0, 3, 2) > exact.entry(0, 0, 3, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dump_round_trip(w in 3usize..9, h in 3usize..9, style in 0usize..7, dv in 0.0f64..6.0, avg in any::<bool>()) {
        let spec = ArchSpec::new(w, h, Style::ALL[style]).with_delays(1.0, dv, 0.5, 0.5);
        let f = build_fabric(&spec).unwrap();
        let mode = if avg { DelayMode::Average } else { DelayMode::Exact };
        let t = build_table(&f, &spec, mode);
        let back = DelayTable::from_bytes(&t.to_bytes()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn lookup_is_symmetric_in_offsets(x0 in 0usize..8, y0 in 0usize..8, x1 in 0usize..8, y1 in 0usize..8, l0 in 0usize..2, l1 in 0usize..2) {
        let spec = ArchSpec::new(8, 8, Style::Cb);
        let f = build_fabric(&spec).unwrap();
        let t = build_table(&f, &spec, DelayMode::Exact);
        let a = t.lookup(Loc::new(l0, x0, y0), Loc::new(l1, x1, y1));
        let mirrored = t.lookup(Loc::new(l0, x1, y1), Loc::new(l1, x0, y0));
        prop_assert_eq!(a, mirrored);
    }
}
