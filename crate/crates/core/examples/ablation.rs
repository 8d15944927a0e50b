//! Each enhancement alone on top of the baseline, and the full flow.
//!
//! cargo run --release --example ablation -- [style] [netlists] [seeds] [min-max] [configs]

use place3d::arch::{ArchSpec, Style};
use place3d::harness::{geomean, synthetic_suite, sweep, RunConfig};

const CONFIGS: [&str; 7] = ["baseline", "+partition", "+zeta", "+theta", "+moves", "+exact", "ours"];

fn main() -> place3d::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let style: Style = args.first().map_or(Ok(Style::Sb), |s| s.parse())?;
    let count: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);

    let (lo, hi) = args
        .get(3)
        .and_then(|r| r.split_once('-'))
        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .unwrap_or((200, 800));
    let names: Vec<&str> = match args.get(4) {
        Some(list) => std::iter::once("baseline").chain(list.split(',')).collect(),
        None => CONFIGS.to_vec(),
    };

    let suite = synthetic_suite(count, lo, hi, 5)?;
    let configs: Vec<RunConfig> = names.iter().map(|c| RunConfig::named(c)).collect::<place3d::Result<_>>()?;
    let seeds: Vec<u64> = (1..=seeds).collect();
    let report = sweep(&suite, &ArchSpec::new(8, 8, style), &configs, &seeds)?;

    let base = report.means("baseline");
    let base_d = geomean(base.values().map(|m| m.0)).unwrap_or(f64::NAN);
    let base_h = geomean(base.values().map(|m| m.1)).unwrap_or(f64::NAN);
    println!("{:<12} {:>10} {:>10}", "config", "D_max", "HPWL");
    for c in names {
        let m = report.means(c);
        let d = geomean(m.values().map(|m| m.0)).unwrap_or(f64::NAN) / base_d;
        let h = geomean(m.values().map(|m| m.1)).unwrap_or(f64::NAN) / base_h;
        println!("{c:<12} {d:>10.4} {h:>10.4}");
    }
    Ok(())
}
