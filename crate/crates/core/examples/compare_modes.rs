//! Baseline vs full flow on a small synthetic suite.
//!
//! cargo run --release --example compare_modes -- [style] [netlists] [seeds]

use place3d::arch::{ArchSpec, Style};
use place3d::harness::{synthetic_suite, sweep, Mode, RunConfig};

fn main() -> place3d::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let style: Style = args.first().map_or(Ok(Style::Sb), |s| s.parse())?;
    let count: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);

    let suite = synthetic_suite(count, 300, 1500, 11)?;
    let configs = [RunConfig::mode(Mode::Baseline), RunConfig::mode(Mode::Ours)];
    let seeds: Vec<u64> = (1..=seeds).collect();
    let t = std::time::Instant::now();
    let report = sweep(&suite, &ArchSpec::new(8, 8, style), &configs, &seeds)?;
    let cmp = report.compare("baseline", "ours");
    print!("{}", cmp.to_text("baseline", "ours"));
    let runtimes: Vec<f64> = report.records.iter().filter_map(|r| r.outcome.as_ref().ok().map(|o| o.2)).collect();
    println!(
        "{} runs in {:.1}s, slowest {:.2}s",
        runtimes.len(),
        t.elapsed().as_secs_f64(),
        runtimes.iter().copied().fold(0.0, f64::max)
    );
    Ok(())
}
