use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use place3d::anneal::{place, Preset};
use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::harness::{
    auto_size, gen_netlist, report, run_one, sweep, synthetic_suite, utilization, write_run_dir, GenParams, Mode,
    RunConfig, Tables,
};
use place3d::lookahead::{build_table, is_measured, DelayMode, UNREACHABLE};
use place3d::netlist::{load_netlist, Netlist};
use place3d::partition::{partition, Hypergraph};
use place3d::placement::{assignment_to_text, parse_assignment};
use place3d::timing::{unit_delay_sta, BlockDelays};
use place3d::{Error, Result};

/// Timing-driven placement for two-layer 3D FPGAs.
#[derive(Parser)]
#[command(name = "place3d", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Architecture TOML; auto-sized from the netlist when omitted.
    #[arg(long, global = true)]
    arch: Option<PathBuf>,
    #[arg(long, global = true)]
    netlist: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value = "ours")]
    mode: Mode,
    /// Schedule preset; defaults to the style's own.
    #[arg(long, global = true)]
    preset: Option<Preset>,
    /// Style used when auto-sizing.
    #[arg(long, global = true, default_value = "sb")]
    style: Style,
    #[arg(long, global = true)]
    no_partition_init: bool,
    #[arg(long, global = true)]
    no_adaptive_zeta: bool,
    #[arg(long, global = true)]
    no_adaptive_theta: bool,
    #[arg(long, global = true)]
    no_move_ext: bool,
    /// Overrides the mode's delay model.
    #[arg(long, global = true)]
    delay_model: Option<DelayMode>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic netlist.
    Gen {
        #[arg(long, default_value_t = 500)]
        blocks: usize,
        #[arg(long, default_value_t = 0.1)]
        seq_fraction: f64,
        #[arg(long, default_value_t = 0.8)]
        locality: f64,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Assign blocks to layers with the FM partitioner.
    Partition {
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Build a delay lookahead table and optionally dump it.
    DelayTable,
    /// Place a netlist and write a run directory.
    Place {
        /// Layer assignment file replacing the partitioner.
        #[arg(long)]
        init_from: Option<PathBuf>,
    },
    /// Summarize one run directory or a directory of runs.
    Report {
        dir: PathBuf,
        /// Print tab-separated rows instead of the table.
        #[arg(long)]
        tsv: bool,
    },
    /// Run a configuration x seed matrix over netlists.
    Sweep {
        /// Generate this many synthetic netlists when no --netlist is given.
        #[arg(long, default_value_t = 10)]
        suite: usize,
        #[arg(long, default_value_t = 300)]
        min_blocks: usize,
        #[arg(long, default_value_t = 1500)]
        max_blocks: usize,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Comma-separated: baseline, ours, +partition, -moves, ...
        #[arg(long, default_value = "baseline,ours", value_delimiter = ',')]
        configs: Vec<String>,
    },
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Config(format!("--{flag} is required")))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl Global {
    fn config(&self) -> RunConfig {
        let mut c = RunConfig::mode(self.mode);
        c.flags.partition_init &= !self.no_partition_init;
        c.flags.adaptive_zeta &= !self.no_adaptive_zeta;
        c.flags.adaptive_theta &= !self.no_adaptive_theta;
        c.flags.move_ext &= !self.no_move_ext;
        if let Some(d) = self.delay_model {
            c.delay_mode = d;
        }
        c.preset = self.preset;
        c
    }

    fn arch_for(&self, netlist: Option<&Netlist>) -> Result<ArchSpec> {
        match (&self.arch, netlist) {
            (Some(p), _) => ArchSpec::load(p),
            (None, Some(nl)) => auto_size(nl, &ArchSpec::new(8, 8, self.style)),
            (None, None) => Err(Error::Config("--arch is required".into())),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Gen {
            blocks,
            seq_fraction,
            locality,
            depth,
        } => {
            let nl = gen_netlist(&GenParams {
                blocks,
                seq_fraction,
                locality,
                depth,
                seed: g.seed,
            })?;
            match &g.out {
                Some(p) => nl.save(p)?,
                None => print!("{}", nl.to_text()),
            }
        }
        Cmd::Partition { eps } => {
            let nl = load_netlist(need(&g.netlist, "netlist")?)?;
            let pre = unit_delay_sta(&nl, &BlockDelays::default())?;
            let a = partition(&Hypergraph::from_netlist(&nl, &pre), eps, g.seed)?;
            eprintln!("cut {} after {} passes", a.cut, a.pass_cuts.len());
            let text = assignment_to_text(&nl, &a.layer);
            match &g.out {
                Some(p) => write_file(p, &text)?,
                None => print!("{text}"),
            }
        }
        Cmd::DelayTable => {
            let spec = g.arch_for(None)?;
            let fabric = build_fabric(&spec)?;
            let mode = g.delay_model.unwrap_or(g.mode.delay_mode());
            let t = build_table(&fabric, &spec, mode);
            let (layers, w, h) = t.dims();
            let unreachable = t.entries().iter().filter(|&&e| e >= UNREACHABLE).count();
            let measured = (0..w).flat_map(|dx| (0..h).map(move |dy| (dx, dy))).filter(|&(dx, dy)| is_measured(&t, dx, dy)).count();
            println!("{mode} table {layers}x{layers}x{w}x{h}, anchor {:?}, {unreachable} unreachable, {measured} measured offsets", t.anchor());
            for ls in 0..layers {
                for ld in 0..layers {
                    println!("[{ls}][{ld}] (1,0) {} (0,1) {} (0,0) {}", t.entry(ls, ld, 1, 0), t.entry(ls, ld, 0, 1), t.entry(ls, ld, 0, 0));
                }
            }
            if let Some(p) = &g.out {
                t.save(p)?;
            }
        }
        Cmd::Place { init_from } => {
            let nl = load_netlist(need(&g.netlist, "netlist")?)?;
            let spec = g.arch_for(Some(&nl))?;
            let fabric = build_fabric(&spec)?;
            let cfg = g.config();
            info!("{}x{} fabric, utilization {:.2}", spec.width, spec.height, utilization(&nl, &fabric));
            let tables = Tables::build(&fabric, &spec);
            let out = if let Some(path) = init_from {
                let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
                let mut opts = cfg.place_options(spec.style, g.seed);
                opts.layer_assignment = Some(parse_assignment(&text, &nl, &path)?);
                let start = std::time::Instant::now();
                let result = place(&nl, &fabric, tables.get(cfg.delay_mode), &opts)?;
                let d_max = place3d::timing::run_sta(&nl, &result.placement, &tables.exact, &opts.block_delays)?.d_max;
                let hpwl = place3d::wirelength::hpwl(&result.placement, &nl, opts.w_z).total;
                place3d::harness::RunOutcome { result, d_max, hpwl, runtime_s: start.elapsed().as_secs_f64() }
            } else {
                run_one(&nl, &spec, &fabric, &tables, &cfg, g.seed)?
            };
            println!("D_max {:.4}  HPWL {:.1}  steps {}  {:.2}s", out.d_max, out.hpwl, out.result.stats.steps, out.runtime_s);
            if let Some(dir) = &g.out {
                write_run_dir(dir, &nl, &spec, &cfg, g.seed, &out)?;
            }
        }
        Cmd::Report { dir, tsv } => {
            let r = report(&dir)?;
            print!("{}", if tsv { r.to_tsv() } else { r.to_text() });
        }
        Cmd::Sweep {
            suite,
            min_blocks,
            max_blocks,
            seeds,
            configs,
        } => {
            let netlists = match &g.netlist {
                Some(p) => vec![(p.display().to_string(), load_netlist(p)?)],
                None => synthetic_suite(suite, min_blocks, max_blocks, g.seed)?,
            };
            let configs: Vec<RunConfig> = configs.iter().map(|c| RunConfig::named(c)).collect::<Result<_>>()?;
            let base = match &g.arch {
                Some(p) => ArchSpec::load(p)?,
                None => ArchSpec::new(8, 8, g.style),
            };
            let seeds: Vec<u64> = (1..=seeds).collect();
            let rep = sweep(&netlists, &base, &configs, &seeds)?;
            let (b, o) = (&configs[0].name, &configs[configs.len() - 1].name);
            let cmp = rep.compare(b, o);
            print!("{}", cmp.to_text(b, o));
            if let Some(dir) = &g.out {
                std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
                write_file(&dir.join("runs.tsv"), &rep.to_tsv())?;
                write_file(&dir.join("comparison.txt"), &cmp.to_text(b, o))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
