//! Writes run directories for a few seeds, then reads them back.
//!
//! cargo run --release --example run_and_report -- <out-dir>

use std::path::PathBuf;

use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::harness::{auto_size, gen_netlist, report, run_one, write_run_dir, GenParams, Mode, RunConfig, Tables};

fn main() -> place3d::Result<()> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "runs".into()).into();
    let nl = gen_netlist(&GenParams { blocks: 300, ..GenParams::default() })?;
    let spec = auto_size(&nl, &ArchSpec::new(8, 8, Style::CbI))?;
    let fabric = build_fabric(&spec)?;
    let tables = Tables::build(&fabric, &spec);
    let cfg = RunConfig::mode(Mode::Ours);
    for seed in 1..=3 {
        let o = run_one(&nl, &spec, &fabric, &tables, &cfg, seed)?;
        write_run_dir(&out.join(format!("seed{seed}")), &nl, &spec, &cfg, seed, &o)?;
    }
    print!("{}", report(&out)?.to_text());
    Ok(())
}
