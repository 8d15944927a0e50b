//! Generates a synthetic netlist and prints its statistics.
//!
//! cargo run --example gen_netlist -- [blocks] [seq_fraction] [seed]

use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::harness::{auto_size, gen_netlist, utilization, GenParams};
use place3d::netlist::BlockKind;

fn main() -> place3d::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p = GenParams {
        blocks: args.first().and_then(|s| s.parse().ok()).unwrap_or(500),
        seq_fraction: args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.1),
        seed: args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1),
        ..GenParams::default()
    };
    let nl = gen_netlist(&p)?;
    let fanouts: Vec<usize> = nl.nets().iter().map(|n| n.sinks.len()).collect();
    println!("{} blocks, {} nets, {} connections", nl.num_blocks(), nl.nets().len(), nl.connections().len());
    for kind in BlockKind::ALL {
        println!("{kind:>5}: {}", nl.count_kind(kind));
    }
    println!("sequential: {}", nl.blocks().iter().filter(|b| b.seq).count());
    println!("max fanout {}", fanouts.iter().max().unwrap_or(&0));
    let spec = auto_size(&nl, &ArchSpec::new(8, 8, Style::Sb))?;
    let f = build_fabric(&spec)?;
    println!("auto-sized to {}x{}, peak utilization {:.2}", spec.width, spec.height, utilization(&nl, &f));
    Ok(())
}
