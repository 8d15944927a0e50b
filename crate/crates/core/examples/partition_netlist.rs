//! Splits a synthetic netlist across the two layers.
//!
//! cargo run --example partition_netlist -- [blocks] [seed]

use place3d::harness::{gen_netlist, GenParams};
use place3d::netlist::BlockKind;
use place3d::partition::{partition, Hypergraph};
use place3d::timing::{unit_delay_sta, BlockDelays};

fn main() -> place3d::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let blocks = args.first().copied().unwrap_or(400) as usize;
    let seed = args.get(1).copied().unwrap_or(1);
    let nl = gen_netlist(&GenParams { blocks, seed, ..GenParams::default() })?;

    let pre = unit_delay_sta(&nl, &BlockDelays::default())?;
    let h = Hypergraph::from_netlist(&nl, &pre);
    let a = partition(&h, 0.05, seed)?;
    println!("{} vertices, {} hyperedges, cut {:.2}", h.num_vertices(), h.num_edges(), a.cut);
    let passes: Vec<String> = a.pass_cuts.iter().map(|c| format!("{c:.1}")).collect();
    println!("cut after each pass: {}", passes.join(" -> "));
    for kind in BlockKind::ALL {
        let on0 = nl.blocks().iter().filter(|b| b.kind == kind && a.layer[b.id.0] == 0).count();
        println!("{kind:>5}: {on0} / {}", nl.count_kind(kind));
    }
    Ok(())
}
