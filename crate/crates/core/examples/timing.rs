//! Static timing of a random placement versus a placed one.
//!
//! cargo run --release --example timing

use place3d::anneal::{place, PlaceOptions};
use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::harness::{auto_size, gen_netlist, GenParams};
use place3d::lookahead::{build_table, DelayMode};
use place3d::partition::random_placement;
use place3d::timing::{run_sta, BlockDelays};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> place3d::Result<()> {
    let nl = gen_netlist(&GenParams { blocks: 300, ..GenParams::default() })?;
    let spec = auto_size(&nl, &ArchSpec::new(8, 8, Style::Sb))?;
    let fabric = build_fabric(&spec)?;
    let table = build_table(&fabric, &spec, DelayMode::Exact);
    let delays = BlockDelays::default();

    let random = random_placement(&nl, &fabric, &mut ChaCha8Rng::seed_from_u64(1))?;
    let placed = place(&nl, &fabric, &table, &PlaceOptions::default())?.placement;
    for (name, p) in [("random", &random), ("placed", &placed)] {
        let r = run_sta(&nl, p, &table, &delays)?;
        let path: Vec<&str> = r.critical_path.iter().map(|b| nl.block(*b).name.as_str()).collect();
        println!("{name}: D_max {:.2}, critical path of {} blocks", r.d_max, path.len());
        println!("  criticality histogram {:?}", r.criticality_histogram(10));
    }
    Ok(())
}
