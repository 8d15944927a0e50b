//! Synthetic benchmarks, end-to-end runs, sweeps and reports.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::anneal::{place, Flags, PlaceOptions, PlaceResult, Preset, RunTrace};
use crate::arch::{build_fabric, ArchSpec, Fabric, Style};
use crate::error::{Error, Result};
use crate::lookahead::{build_table, DelayMode, DelayTable};
use crate::netlist::{load_netlist, Block, BlockId, BlockKind, Net, NetId, Netlist, PinRef};
use crate::placement::{check_legality, Placement};
use crate::timing::{run_sta, BlockDelays};
use crate::wirelength::hpwl;

/// Knobs for the synthetic netlist generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub blocks: usize,
    /// Fraction of non-IO blocks that are sequential.
    pub seq_fraction: f64,
    /// Probability that an input comes from the previous level near the
    /// same relative position rather than from anywhere earlier.
    pub locality: f64,
    /// Number of combinational levels; defaults to about `sqrt(n) / 2`.
    pub depth: Option<usize>,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            blocks: 500,
            seq_fraction: 0.1,
            locality: 0.8,
            depth: None,
            seed: 1,
        }
    }
}

/// Generates a layered DAG: input pads, `depth` levels of CLB/DSP/BRAM
/// blocks in the fabric's column ratio, then output pads. Every block
/// drives one net.
pub fn gen_netlist(p: &GenParams) -> Result<Netlist> {
    if !(0.0..=1.0).contains(&p.seq_fraction) || !(0.0..=1.0).contains(&p.locality) {
        return Err(Error::Config("seq_fraction and locality must lie in [0, 1]".into()));
    }
    let n = p.blocks;
    let n_io = ((0.06 * n as f64).round() as usize).max(4);
    if n < n_io + 4 {
        return Err(Error::Config(format!("{n} blocks leave no room for logic levels")));
    }
    let r = n - n_io;
    let n_dsp = (r as f64 / 8.0).round() as usize;
    let n_bram = n_dsp;
    let n_clb = r - n_dsp - n_bram;
    let depth = p.depth.unwrap_or(((r as f64).sqrt() / 2.0).round().max(2.0) as usize);
    if depth == 0 || depth > r {
        return Err(Error::Config(format!("depth {depth} yields empty levels for {r} logic blocks")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n_in = n_io.div_ceil(2);
    let n_out = n_io - n_in;

    let mut kinds: Vec<BlockKind> = std::iter::repeat_n(BlockKind::Clb, n_clb)
        .chain(std::iter::repeat_n(BlockKind::Dsp, n_dsp))
        .chain(std::iter::repeat_n(BlockKind::Bram, n_bram))
        .collect();
    kinds.shuffle(&mut rng);

    // levels[0] = input pads, 1..=depth logic, depth+1 = output pads
    let mut blocks: Vec<Block> = Vec::with_capacity(n);
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); depth + 2];
    let mut counters = [0usize; 4];
    let mut push = |blocks: &mut Vec<Block>, kind: BlockKind, seq: bool, prefix: &str| -> usize {
        let id = blocks.len();
        let c = &mut counters[kind.index()];
        blocks.push(Block {
            id: BlockId(id),
            name: format!("{prefix}{c}"),
            kind,
            fixed: false,
            seq,
        });
        *c += 1;
        id
    };
    for _ in 0..n_in {
        let id = push(&mut blocks, BlockKind::Io, false, "in");
        levels[0].push(id);
    }
    for (i, &kind) in kinds.iter().enumerate() {
        let level = 1 + i * depth / r;
        let seq = rng.gen::<f64>() < p.seq_fraction;
        let id = push(&mut blocks, kind, seq, kind.as_str());
        levels[level].push(id);
    }
    for _ in 0..n_out {
        let id = push(&mut blocks, BlockKind::Io, false, "out");
        levels[depth + 1].push(id);
    }
    let level_of: Vec<usize> = {
        let mut v = vec![0; n];
        for (l, ids) in levels.iter().enumerate() {
            for &b in ids {
                v[b] = l;
            }
        }
        v
    };

    let mut fanin: Vec<Vec<usize>> = vec![Vec::new(); n];
    for l in 1..=depth {
        let prev = &levels[l - 1];
        let earlier_end = levels[l][0];
        for (i, &b) in levels[l].iter().enumerate() {
            let k = match blocks[b].kind {
                BlockKind::Dsp => rng.gen_range(2..=4),
                BlockKind::Bram => rng.gen_range(1..=3),
                _ => [1, 2, 2, 3, 3, 4][rng.gen_range(0..6)],
            };
            let pos = i as f64 / levels[l].len() as f64;
            for _ in 0..k {
                let src = if rng.gen::<f64>() < p.locality {
                    let centre = (pos * prev.len() as f64) as i64 + rng.gen_range(-2..=2);
                    prev[centre.clamp(0, prev.len() as i64 - 1) as usize]
                } else {
                    rng.gen_range(0..earlier_end)
                };
                if !fanin[b].contains(&src) {
                    fanin[b].push(src);
                }
            }
        }
    }
    let tail: Vec<usize> = levels[depth].iter().chain(levels[depth.saturating_sub(1).max(1)].iter()).copied().collect();
    for &o in &levels[depth + 1] {
        fanin[o].push(tail[rng.gen_range(0..tail.len())]);
    }

    // every non-output block must drive something
    let mut has_fanout = vec![false; n];
    for f in &fanin {
        for &s in f {
            has_fanout[s] = true;
        }
    }
    for b in 0..n {
        if has_fanout[b] || level_of[b] == depth + 1 {
            continue;
        }
        let l = rng.gen_range(level_of[b] + 1..=depth + 1);
        let ids = &levels[l];
        let sink = ids[rng.gen_range(0..ids.len())];
        fanin[sink].push(b);
    }

    let mut sinks: Vec<Vec<PinRef>> = vec![Vec::new(); n];
    for (b, f) in fanin.iter().enumerate() {
        for (pin, &s) in f.iter().enumerate() {
            sinks[s].push(PinRef {
                block: BlockId(b),
                pin: pin as u32,
            });
        }
    }
    let mut nets = Vec::new();
    for (b, s) in sinks.into_iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        nets.push(Net {
            id: NetId(nets.len()),
            name: format!("n_{}", blocks[b].name),
            driver: PinRef {
                block: BlockId(b),
                pin: 0,
            },
            sinks: s,
            weight: 1.0,
        });
    }
    Netlist::new(blocks, nets)
}

/// `count` netlists with sizes spread evenly over `[min_blocks, max_blocks]`.
pub fn synthetic_suite(count: usize, min_blocks: usize, max_blocks: usize, seed: u64) -> Result<Vec<(String, Netlist)>> {
    (0..count)
        .map(|i| {
            let blocks = if count <= 1 {
                min_blocks
            } else {
                min_blocks + (max_blocks - min_blocks) * i / (count - 1)
            };
            let nl = gen_netlist(&GenParams {
                blocks,
                seed: seed.wrapping_mul(1000).wrapping_add(i as u64),
                ..GenParams::default()
            })?;
            Ok((format!("syn{i:02}_{blocks}"), nl))
        })
        .collect()
}

/// Highest per-kind utilization of `fabric` by `netlist`, over both layers.
pub fn utilization(netlist: &Netlist, fabric: &Fabric) -> f64 {
    BlockKind::ALL
        .iter()
        .filter(|&&k| netlist.count_kind(k) > 0)
        .map(|&k| netlist.count_kind(k) as f64 / (fabric.capacity(k) * fabric.layers()).max(1) as f64)
        .fold(0.0, f64::max)
}

pub const MAX_AUTO_UTILIZATION: f64 = 0.9;

/// Smallest-area fabric with `height ∈ {width, width + 1}` where no kind
/// exceeds 90% of its capacity. Delays, style and pattern come from `base`.
pub fn auto_size(netlist: &Netlist, base: &ArchSpec) -> Result<ArchSpec> {
    for w in 3..=512usize {
        for h in [w, w + 1] {
            let mut spec = base.clone();
            spec.width = w;
            spec.height = h;
            let Ok(f) = build_fabric(&spec) else { continue };
            let fits = BlockKind::ALL.iter().all(|&k| {
                netlist.count_kind(k) as f64 <= MAX_AUTO_UTILIZATION * (f.capacity(k) * f.layers()) as f64
            });
            if fits {
                return Ok(spec);
            }
        }
    }
    Err(Error::Capacity("no fabric up to 512x513 fits the netlist".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Baseline,
    Ours,
}

impl Mode {
    pub fn flags(self) -> Flags {
        match self {
            Mode::Baseline => Flags::ALL_OFF,
            Mode::Ours => Flags::ALL_ON,
        }
    }

    pub fn delay_mode(self) -> DelayMode {
        match self {
            Mode::Baseline => DelayMode::Average,
            Mode::Ours => DelayMode::Exact,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Baseline => "baseline",
            Mode::Ours => "ours",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Mode::Baseline),
            "ours" => Ok(Mode::Ours),
            _ => Err(Error::Config(format!("unknown mode `{s}` (expected baseline or ours)"))),
        }
    }
}

/// Default schedule preset for a style: hybrids use their base style's.
pub fn preset_for(style: Style) -> Preset {
    match style {
        Style::Cb | Style::Hybrid => Preset::Cb,
        Style::CbO | Style::HybridO => Preset::CbO,
        Style::CbI | Style::HybridI => Preset::CbI,
        Style::Sb => Preset::Sb,
    }
}

/// One placement configuration; seeds are supplied per run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub flags: Flags,
    pub delay_mode: DelayMode,
    /// `None` picks the style's preset.
    pub preset: Option<Preset>,
}

impl RunConfig {
    pub fn mode(mode: Mode) -> Self {
        RunConfig {
            name: mode.to_string(),
            flags: mode.flags(),
            delay_mode: mode.delay_mode(),
            preset: None,
        }
    }

    /// `baseline`, `ours`, a single enhancement on top of the baseline
    /// (`+partition`, `+zeta`, `+theta`, `+moves`, `+exact`) or one
    /// removed from the full flow (`-partition`, ...).
    pub fn named(name: &str) -> Result<Self> {
        let (base, sign, what) = match name {
            "baseline" => return Ok(Self::mode(Mode::Baseline)),
            "ours" => return Ok(Self::mode(Mode::Ours)),
            n if n.starts_with('+') => (Mode::Baseline, true, &n[1..]),
            n if n.starts_with('-') => (Mode::Ours, false, &n[1..]),
            _ => return Err(Error::Config(format!("unknown configuration `{name}`"))),
        };
        let mut c = Self::mode(base);
        c.name = name.to_string();
        match what {
            "partition" => c.flags.partition_init = sign,
            "zeta" => c.flags.adaptive_zeta = sign,
            "theta" => c.flags.adaptive_theta = sign,
            "moves" => c.flags.move_ext = sign,
            "exact" => c.delay_mode = if sign { DelayMode::Exact } else { DelayMode::Average },
            _ => return Err(Error::Config(format!("unknown enhancement `{what}` in `{name}`"))),
        }
        Ok(c)
    }

    pub fn place_options(&self, style: Style, seed: u64) -> PlaceOptions {
        PlaceOptions {
            hyperparams: self.preset.unwrap_or_else(|| preset_for(style)).hyperparams(),
            seed,
            flags: self.flags,
            ..PlaceOptions::default()
        }
    }
}

/// Both lookahead tables for one architecture.
#[derive(Debug, Clone)]
pub struct Tables {
    pub exact: DelayTable,
    pub average: DelayTable,
}

impl Tables {
    pub fn build(fabric: &Fabric, spec: &ArchSpec) -> Self {
        Tables {
            exact: build_table(fabric, spec, DelayMode::Exact),
            average: build_table(fabric, spec, DelayMode::Average),
        }
    }

    pub fn get(&self, mode: DelayMode) -> &DelayTable {
        match mode {
            DelayMode::Exact => &self.exact,
            DelayMode::Average => &self.average,
        }
    }
}

/// Result of one placement run. D_max is always measured on the exact table.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: PlaceResult,
    pub d_max: f64,
    pub hpwl: f64,
    pub runtime_s: f64,
}

pub fn run_one(netlist: &Netlist, spec: &ArchSpec, fabric: &Fabric, tables: &Tables, cfg: &RunConfig, seed: u64) -> Result<RunOutcome> {
    let start = Instant::now();
    let opts = cfg.place_options(spec.style, seed);
    let result = place(netlist, fabric, tables.get(cfg.delay_mode), &opts)?;
    let d_max = run_sta(netlist, &result.placement, &tables.exact, &opts.block_delays)?.d_max;
    let wl = hpwl(&result.placement, netlist, opts.w_z).total;
    Ok(RunOutcome {
        result,
        d_max,
        hpwl: wl,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

const SUMMARY_HEADER: &str = "# run summary v1";

/// Writes netlist, arch, placement, trace and summary into `dir`.
pub fn write_run_dir(dir: &Path, netlist: &Netlist, spec: &ArchSpec, cfg: &RunConfig, seed: u64, out: &RunOutcome) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    netlist.save(dir.join("netlist.txt"))?;
    let arch = dir.join("arch.toml");
    std::fs::write(&arch, spec.to_toml()).map_err(|e| Error::io(&arch, e))?;
    out.result.placement.save(dir.join("placement.txt"), netlist, seed)?;
    out.result.trace.save(dir.join("trace.tsv"))?;
    let s = &out.result.stats;
    let mut text = format!("{SUMMARY_HEADER}\n");
    let rows: [(&str, String); 10] = [
        ("config", cfg.name.clone()),
        ("seed", seed.to_string()),
        ("delay_model", cfg.delay_mode.to_string()),
        ("d_max", format!("{:?}", out.d_max)),
        ("hpwl", format!("{:?}", out.hpwl)),
        ("steps", s.steps.to_string()),
        ("moves_per_step", s.n_moves.to_string()),
        ("accepted", s.accepted.to_string()),
        ("attempted", s.attempted.to_string()),
        ("best_updates", s.best_history.len().saturating_sub(1).to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(text, "{k}\t{v}");
    }
    let path = dir.join("summary.tsv");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn read_summary(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SUMMARY_HEADER) {
        return Err(Error::Report(format!("{}: missing `{SUMMARY_HEADER}` header", path.display())));
    }
    Ok(lines
        .filter_map(|l| l.split_once('\t'))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

/// One run as re-evaluated by [`report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub d_max: f64,
    pub hpwl: f64,
    pub steps: usize,
    pub first_alpha: f64,
    pub last_alpha: f64,
    /// D_max recorded when the run finished.
    pub stored_d_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// `(D_max, HPWL)` geometric means, present with two or more runs.
    pub geomean: Option<(f64, f64)>,
    /// Acceptance curve of a single run: `(step, T, alpha, d_max)`.
    pub curve: Vec<(usize, f64, f64, f64)>,
}

fn is_run_dir(dir: &Path) -> bool {
    dir.join("summary.tsv").is_file()
}

fn report_run(dir: &Path, name: String) -> Result<(ReportRow, RunTrace)> {
    let netlist = load_netlist(dir.join("netlist.txt"))?;
    let spec = ArchSpec::load(dir.join("arch.toml"))?;
    let fabric = build_fabric(&spec)?;
    let (placement, _) = Placement::load(dir.join("placement.txt"), &netlist)?;
    if let Some(v) = check_legality(&placement, &netlist, &fabric).first() {
        return Err(Error::Report(format!("{}: stored placement is illegal: {v:?}", dir.display())));
    }
    let trace = RunTrace::load(dir.join("trace.tsv"))?;
    let table = build_table(&fabric, &spec, DelayMode::Exact);
    let d_max = run_sta(&netlist, &placement, &table, &BlockDelays::default())?.d_max;
    let summary = read_summary(&dir.join("summary.tsv"))?;
    let stored_d_max = summary.get("d_max").and_then(|v| v.parse().ok());
    if let Some(s) = stored_d_max {
        if s != d_max {
            warn!("{}: stored D_max {s} differs from recomputed {d_max}", dir.display());
        }
    }
    let row = ReportRow {
        name,
        d_max,
        hpwl: hpwl(&placement, &netlist, 0.0).total,
        steps: trace.rows.len(),
        first_alpha: trace.rows.first().map_or(f64::NAN, |r| r.alpha),
        last_alpha: trace.rows.last().map_or(f64::NAN, |r| r.alpha),
        stored_d_max,
    };
    Ok((row, trace))
}

/// Summarizes a run directory, or every run directory directly under `dir`.
pub fn report(dir: &Path) -> Result<Report> {
    let mut runs: Vec<(String, PathBuf)> = Vec::new();
    if is_run_dir(dir) {
        let name = dir.file_name().map_or_else(|| ".".into(), |n| n.to_string_lossy().into_owned());
        runs.push((name, dir.to_path_buf()));
    } else if dir.is_dir() {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for e in entries {
            let p = e.map_err(|e| Error::io(dir, e))?.path();
            if is_run_dir(&p) {
                runs.push((p.file_name().unwrap().to_string_lossy().into_owned(), p));
            }
        }
        runs.sort();
    } else {
        return Err(Error::Report(format!("{}: no runs found", dir.display())));
    }
    if runs.is_empty() {
        return Err(Error::Report(format!("{}: no runs found", dir.display())));
    }
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    for (name, p) in &runs {
        let (row, trace) = report_run(p, name.clone())?;
        if runs.len() == 1 {
            curve = trace.rows.iter().map(|r| (r.step, r.temperature, r.alpha, r.d_max)).collect();
        }
        rows.push(row);
    }
    let geomean = (rows.len() > 1).then(|| {
        (
            geomean(rows.iter().map(|r| r.d_max)).unwrap_or(f64::NAN),
            geomean(rows.iter().map(|r| r.hpwl)).unwrap_or(f64::NAN),
        )
    });
    Ok(Report { rows, geomean, curve })
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<24} {:>12} {:>12} {:>6} {:>8} {:>8}", "run", "D_max", "HPWL", "steps", "alpha0", "alpha_end");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<24} {:>12.4} {:>12.1} {:>6} {:>8.3} {:>8.3}",
                r.name, r.d_max, r.hpwl, r.steps, r.first_alpha, r.last_alpha
            );
        }
        if let Some((d, h)) = self.geomean {
            let _ = writeln!(s, "{:<24} {:>12.4} {:>12.1}", "geomean", d, h);
        }
        s
    }

    /// Machine-readable rows, then the acceptance curve when there is one run.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("run\td_max\thpwl\tsteps\talpha_first\talpha_last\n");
        for r in &self.rows {
            let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}\t{}", r.name, r.d_max, r.hpwl, r.steps, r.first_alpha, r.last_alpha);
        }
        if let Some((d, h)) = self.geomean {
            let _ = writeln!(s, "geomean\t{d}\t{h}\t\t\t");
        }
        if !self.curve.is_empty() {
            s.push_str("\nstep\tT\talpha\td_max\n");
            for (step, t, a, d) in &self.curve {
                let _ = writeln!(s, "{step}\t{t}\t{a}\t{d}");
            }
        }
        s
    }
}

/// Geometric mean of strictly positive values; `None` if any value is not.
pub fn geomean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        if !(v > 0.0 && v.is_finite()) {
            return None;
        }
        sum += v.ln();
        n += 1;
    }
    (n > 0).then(|| (sum / n as f64).exp())
}

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub netlist: String,
    pub config: String,
    pub seed: u64,
    /// `(D_max, HPWL, runtime in s)`, or the failure message.
    pub outcome: std::result::Result<(f64, f64, f64), String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
}

/// Ours-vs-base comparison over the netlists both configurations completed.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// `(netlist, base mean D_max, ours mean D_max)`.
    pub per_netlist: Vec<(String, f64, f64)>,
    /// Geomean of ours divided by geomean of base; `None` when undefined.
    pub ratio: Option<f64>,
    /// `(ratio - 1) * 100`.
    pub delta_pct: Option<f64>,
    /// Most negative per-netlist Δ%.
    pub max_improvement_pct: Option<f64>,
    pub hpwl_ratio: Option<f64>,
    pub note: Option<String>,
}

/// Runs every (netlist, config, seed) cell, in parallel across cells.
pub fn sweep(netlists: &[(String, Netlist)], base: &ArchSpec, configs: &[RunConfig], seeds: &[u64]) -> Result<SweepReport> {
    let prepared: Vec<(ArchSpec, Fabric, Tables)> = netlists
        .par_iter()
        .map(|(_, nl)| {
            let spec = auto_size(nl, base)?;
            let fabric = build_fabric(&spec)?;
            let tables = Tables::build(&fabric, &spec);
            Ok((spec, fabric, tables))
        })
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize, u64)> = (0..netlists.len())
        .flat_map(|n| (0..configs.len()).flat_map(move |c| seeds.iter().map(move |&s| (n, c, s))))
        .collect();
    let records = cells
        .par_iter()
        .map(|&(n, c, seed)| {
            let (spec, fabric, tables) = &prepared[n];
            let outcome = run_one(&netlists[n].1, spec, fabric, tables, &configs[c], seed)
                .map(|o| (o.d_max, o.hpwl, o.runtime_s))
                .map_err(|e| e.to_string());
            if let Err(e) = &outcome {
                warn!("{} / {} / seed {seed} failed: {e}", netlists[n].0, configs[c].name);
            }
            SweepRecord {
                netlist: netlists[n].0.clone(),
                config: configs[c].name.clone(),
                seed,
                outcome,
            }
        })
        .collect();
    Ok(SweepReport { records })
}

impl SweepReport {
    /// Arithmetic mean over successful seeds of `(D_max, HPWL)` per netlist.
    pub fn means(&self, config: &str) -> BTreeMap<String, (f64, f64)> {
        let mut acc: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.config == config) {
            if let Ok((d, h, _)) = r.outcome {
                let e = acc.entry(r.netlist.clone()).or_default();
                e.0 += d;
                e.1 += h;
                e.2 += 1;
            }
        }
        acc.into_iter()
            .map(|(k, (d, h, n))| (k, (d / n as f64, h / n as f64)))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.outcome.is_err()).count()
    }

    pub fn compare(&self, base: &str, ours: &str) -> Comparison {
        let (mb, mo) = (self.means(base), self.means(ours));
        let per_netlist: Vec<(String, f64, f64)> = mb
            .iter()
            .filter_map(|(k, b)| mo.get(k).map(|o| (k.clone(), b.0, o.0)))
            .collect();
        let cells = self.records.iter().filter(|r| r.config == base || r.config == ours).count();
        let mut note = None;
        if base == ours || cells < 2 || per_netlist.is_empty() {
            note = Some("Δ undefined: need both configurations on at least one netlist".to_string());
            return Comparison {
                per_netlist,
                ratio: None,
                delta_pct: None,
                max_improvement_pct: None,
                hpwl_ratio: None,
                note,
            };
        }
        if self.failures() > 0 {
            note = Some(format!("{} failed runs excluded", self.failures()));
        }
        let gb = geomean(per_netlist.iter().map(|r| r.1));
        let go = geomean(per_netlist.iter().map(|r| r.2));
        let ratio = gb.zip(go).map(|(b, o)| o / b);
        let hb = geomean(per_netlist.iter().filter_map(|r| mb.get(&r.0).map(|m| m.1)));
        let ho = geomean(per_netlist.iter().filter_map(|r| mo.get(&r.0).map(|m| m.1)));
        let max_improvement_pct = per_netlist
            .iter()
            .map(|r| (r.2 / r.1 - 1.0) * 100.0)
            .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.min(d))));
        Comparison {
            ratio,
            delta_pct: ratio.map(|r| (r - 1.0) * 100.0),
            max_improvement_pct,
            hpwl_ratio: hb.zip(ho).map(|(b, o)| o / b),
            per_netlist,
            note,
        }
    }

    /// Per-run rows; runtimes are left out so reruns compare byte-equal.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("netlist\tconfig\tseed\td_max\thpwl\tstatus\n");
        for r in &self.records {
            match &r.outcome {
                Ok((d, h, _)) => {
                    let _ = writeln!(s, "{}\t{}\t{}\t{d}\t{h}\tok", r.netlist, r.config, r.seed);
                }
                Err(e) => {
                    let _ = writeln!(s, "{}\t{}\t{}\t\t\tfailed: {e}", r.netlist, r.config, r.seed);
                }
            }
        }
        s
    }
}

impl Comparison {
    pub fn to_text(&self, base: &str, ours: &str) -> String {
        let mut s = format!("{:<20} {:>12} {:>12} {:>8}\n", "netlist", base, ours, "Δ%");
        for (n, b, o) in &self.per_netlist {
            let _ = writeln!(s, "{n:<20} {b:>12.4} {o:>12.4} {:>8.2}", (o / b - 1.0) * 100.0);
        }
        match (self.ratio, self.delta_pct, self.max_improvement_pct) {
            (Some(r), Some(d), Some(m)) => {
                let _ = writeln!(s, "geomean ratio {r:.4} (Δ {d:+.2}%), best netlist Δ {m:+.2}%");
            }
            _ => s.push_str("geomean Δ undefined\n"),
        }
        if let Some(h) = self.hpwl_ratio {
            let _ = writeln!(s, "HPWL geomean ratio {h:.4}");
        }
        if let Some(n) = &self.note {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}
