//! One annealing run with its per-step trace.
//!
//! cargo run --release --example anneal -- [blocks] [style] [seed]

use place3d::anneal::{place, PlaceOptions};
use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::harness::{auto_size, gen_netlist, preset_for, GenParams};
use place3d::lookahead::{build_table, DelayMode};

fn main() -> place3d::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let blocks = args.first().and_then(|s| s.parse().ok()).unwrap_or(500);
    let style: Style = args.get(1).map_or(Ok(Style::Sb), |s| s.parse())?;
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let nl = gen_netlist(&GenParams { blocks, ..GenParams::default() })?;
    let spec = auto_size(&nl, &ArchSpec::new(8, 8, style))?;
    let fabric = build_fabric(&spec)?;
    let table = build_table(&fabric, &spec, DelayMode::Exact);
    let opts = PlaceOptions { seed, hyperparams: preset_for(style).hyperparams(), ..PlaceOptions::default() };
    let r = place(&nl, &fabric, &table, &opts)?;

    print!("{}", r.trace.to_tsv());
    let s = &r.stats;
    println!("# {}x{} fabric, {} moves/step, {} steps", spec.width, spec.height, s.n_moves, s.steps);
    println!("# accepted {} of {}, best updated {} times", s.accepted, s.attempted, s.best_history.len() - 1);
    println!("# quench {:.4} -> {:.4}, final D_max {:.3}", s.quench_entry, s.quench_exit, r.timing.d_max);
    for (kind, n) in &s.proposed_by_kind {
        println!("# {kind}: {n} proposed, {} accepted", s.accepted_by_kind.get(kind).copied().unwrap_or(0));
    }
    Ok(())
}
