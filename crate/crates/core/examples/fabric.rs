//! Prints a fabric's tile layout and the vertical edge count of each style.
//!
//! cargo run --example fabric -- [width] [height] [v_period]

use place3d::arch::{build_fabric, routing_edges, vertical_edges, ArchSpec, Style};
use place3d::netlist::BlockKind;

fn main() -> place3d::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (w, h, v) = (args.first().copied().unwrap_or(10), args.get(1).copied().unwrap_or(8), args.get(2).copied().unwrap_or(1));
    let spec = ArchSpec::new(w, h, Style::Sb).with_v_period(v);
    let fabric = build_fabric(&spec)?;

    for y in (0..h).rev() {
        let row: String = (0..w)
            .map(|x| match fabric.tile_kind(x, y) {
                None => ' ',
                Some(BlockKind::Io) => 'o',
                Some(BlockKind::Clb) => 'c',
                Some(BlockKind::Dsp) => 'D',
                Some(BlockKind::Bram) => 'B',
            })
            .collect();
        println!("{row}");
    }
    for kind in BlockKind::ALL {
        println!("{kind:>5}: {} sites per layer", fabric.capacity(kind));
    }
    for style in Style::ALL {
        let s = spec.clone().with_style(style);
        println!("{style:>9}: {} vertical of {} edges", vertical_edges(&s, &fabric).len(), routing_edges(&s, &fabric).len());
    }
    Ok(())
}
