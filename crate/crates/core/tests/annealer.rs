mod common;

use std::path::Path;

use place3d::anneal::{place, Flags, MoveContext, MoveKind, PlaceOptions, Preset};
use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::harness::{auto_size, gen_netlist, GenParams};
use place3d::lookahead::{build_table, DelayMode};
use place3d::netlist::{BlockId, Netlist};
use place3d::placement::{Loc, Placement};
use place3d::timing::effective_delay;
use place3d::wirelength::net_cost;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_run(flags: Flags, seed: u64) -> (Netlist, place3d::arch::Fabric, place3d::anneal::PlaceResult) {
    let nl = gen_netlist(&GenParams { blocks: 120, seed: 4, ..GenParams::default() }).unwrap();
    let spec = auto_size(&nl, &ArchSpec::new(8, 8, Style::Sb)).unwrap();
    let f = build_fabric(&spec).unwrap();
    let t = build_table(&f, &spec, DelayMode::Exact);
    let opts = PlaceOptions { seed, flags, hyperparams: Preset::Sb.hyperparams(), ..PlaceOptions::default() };
    let r = place(&nl, &f, &t, &opts).unwrap();
    (nl, f, r)
}

#[test]
fn same_seed_same_bytes() {
    let (nl, _, a) = small_run(Flags::ALL_ON, 7);
    let (_, _, b) = small_run(Flags::ALL_ON, 7);
    assert_eq!(a.placement.to_text(&nl, 7), b.placement.to_text(&nl, 7));
    assert_eq!(a.trace.to_tsv(), b.trace.to_tsv());
    let (_, _, c) = small_run(Flags::ALL_ON, 8);
    assert_ne!(a.placement.to_text(&nl, 7), c.placement.to_text(&nl, 7));
}

#[test]
fn contracts_hold_for_every_flag_combination() {
    let hp = Preset::Sb.hyperparams();
    for bits in 0..16u32 {
        let flags = Flags {
            partition_init: bits & 1 != 0,
            adaptive_zeta: bits & 2 != 0,
            adaptive_theta: bits & 4 != 0,
            move_ext: bits & 8 != 0,
        };
        let (nl, f, r) = small_run(flags, 3);
        let bad = common::contract_violations(&nl, &f, &hp, &r);
        assert!(bad.is_empty(), "{flags:?}: {bad:?}");
        assert!(!r.trace.rows.is_empty());
        if !flags.adaptive_theta {
            assert!(r.trace.rows.iter().all(|row| row.theta == 0.5));
        }
        if !flags.adaptive_zeta {
            assert!(r.trace.rows.iter().all(|row| row.zeta == 1.0));
        }
        if !flags.move_ext {
            assert!(!r.stats.proposed_by_kind.contains_key(&MoveKind::LayerSwap));
        }
    }
}

#[test]
fn single_movable_block_reaches_best_site() {
    let text = "block pad io fixed\nblock c clb\nnet n pad.0 -> c.0\n";
    let nl = Netlist::parse(text, Path::new("one")).unwrap();
    let spec = ArchSpec::new(10, 10, Style::Sb);
    let f = build_fabric(&spec).unwrap();
    let t = build_table(&f, &spec, DelayMode::Exact);
    for seed in 0..5 {
        let opts = PlaceOptions { seed, inner_num: 40.0, ..PlaceOptions::default() };
        let r = place(&nl, &f, &t, &opts).unwrap();
        let got = r.placement.loc(BlockId(1));
        let pad_at = r.placement.loc(BlockId(0));
        // exhaustive oracle over every CLB site on both layers
        let mut best_bb = f64::MAX;
        let mut best_t = f64::MAX;
        for l in 0..2 {
            for &(x, y) in f.sites(place3d::netlist::BlockKind::Clb) {
                let s = Loc::new(l, x, y);
                best_bb = best_bb.min(net_cost([pad_at, s], 0.0));
                best_t = best_t.min(effective_delay(&t, pad_at, s, 1.0));
            }
        }
        assert_eq!(net_cost([pad_at, got], 0.0), best_bb, "seed {seed}: {got}");
        assert_eq!(effective_delay(&t, pad_at, got, 1.0), best_t, "seed {seed}: {got}");
    }
}

#[test]
fn layer_swap_keeps_xy() {
    // x = 2 is a DSP column in the default layout
    let text = "block a dsp\nblock b dsp\nnet n a.0 -> b.0\n";
    let nl = Netlist::parse(text, Path::new("swap")).unwrap();
    let f = build_fabric(&ArchSpec::new(8, 8, Style::Sb)).unwrap();
    let p = Placement::for_fabric(&f, vec![Loc::new(0, 2, 3), Loc::new(1, 2, 3)]);
    let movable = [BlockId(0)];
    let crit = vec![0.0; nl.connections().len()];
    let ctx = MoveContext {
        netlist: &nl,
        fabric: &f,
        placement: &p,
        movable: &movable,
        crit: &crit,
        rlim: 3.0,
        move_ext: true,
        weighted_centroid: false,
        max_retries: 10,
    };
    let m = ctx.propose(MoveKind::LayerSwap, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let mut q = p.clone();
    m.apply(&mut q);
    assert_eq!(q.loc(BlockId(0)), Loc::new(1, 2, 3));
    assert_eq!(q.loc(BlockId(1)), Loc::new(0, 2, 3));
    assert!(q.is_consistent());
}

#[test]
fn incremental_costs_track_recompute() {
    let nl = gen_netlist(&GenParams { blocks: 150, seed: 2, ..GenParams::default() }).unwrap();
    let spec = auto_size(&nl, &ArchSpec::new(8, 8, Style::Cb)).unwrap();
    let f = build_fabric(&spec).unwrap();
    let t = build_table(&f, &spec, DelayMode::Exact);
    let opts = PlaceOptions { verify_every: 7, ..PlaceOptions::default() };
    let r = place(&nl, &f, &t, &opts).unwrap();
    assert!(r.stats.max_rel_err <= 1e-9, "{}", r.stats.max_rel_err);
    assert!(r.stats.max_delta_err <= 1e-9, "{}", r.stats.max_delta_err);
}
