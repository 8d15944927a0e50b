//! Exact vs averaged lookahead on a TSV-like fabric.
//!
//! cargo run --example delay_table -- [style] [d_v]

use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::lookahead::{build_table, DelayMode};

fn main() -> place3d::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let style: Style = args.first().map_or(Ok(Style::Sb), |s| s.parse())?;
    let d_v: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let spec = ArchSpec::new(8, 8, style).with_delays(1.0, d_v, 0.5, 0.5);
    let fabric = build_fabric(&spec)?;
    let exact = build_table(&fabric, &spec, DelayMode::Exact);
    let avg = build_table(&fabric, &spec, DelayMode::Average);

    println!("{style}, d_v = {d_v}: entry[l_src][l_dst][dx][0], exact / average");
    for (ls, ld) in [(0, 0), (0, 1)] {
        let cells: Vec<String> = (0..6)
            .map(|dx| format!("{:.2}/{:.2}", exact.entry(ls, ld, dx, 0), avg.entry(ls, ld, dx, 0)))
            .collect();
        println!("[{ls}][{ld}] {}", cells.join("  "));
    }
    Ok(())
}
