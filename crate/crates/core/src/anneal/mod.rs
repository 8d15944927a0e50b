//! Timing-driven 3D simulated annealing: initial layer assignment,
//! adaptive-schedule annealing with a learned move mix, and a final quench.

mod agent;
mod cost;
mod moves;
mod schedule;
mod trace;

use std::collections::BTreeMap;

use log::{debug, info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use agent::{EpsilonGreedy, MoveSelector};
pub use cost::CostState;
pub use moves::{layer_counts, nearest_site, sample_in, sample_layer, MoveContext, MoveKind, MoveProposal};
pub use schedule::{
    cooling_factor, moves_per_step, theta, theta_raw, update_rlim, zeta, AcceptanceWindow, Hyperparams, Preset,
};
pub use trace::{RunTrace, TraceRow};

use crate::arch::Fabric;
use crate::error::{Error, Result};
use crate::lookahead::DelayTable;
use crate::netlist::{BlockId, Netlist};
use crate::partition::{self, Hypergraph};
use crate::placement::{check_legality, Placement};
use crate::timing::{run_sta, unit_delay_sta, BlockDelays, TimingReport};

/// Enhancement switches. All on is the full flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub partition_init: bool,
    pub adaptive_zeta: bool,
    pub adaptive_theta: bool,
    pub move_ext: bool,
}

impl Flags {
    pub const ALL_ON: Flags = Flags {
        partition_init: true,
        adaptive_zeta: true,
        adaptive_theta: true,
        move_ext: true,
    };
    pub const ALL_OFF: Flags = Flags {
        partition_init: false,
        adaptive_zeta: false,
        adaptive_theta: false,
        move_ext: false,
    };
}

impl Default for Flags {
    fn default() -> Self {
        Flags::ALL_ON
    }
}

#[derive(Debug, Clone)]
pub struct PlaceOptions {
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub flags: Flags,
    /// θ used when the adaptive schedule is off.
    pub static_theta: f64,
    pub criticality_exponent: f64,
    /// Wirelength penalty per extra layer spanned by a net.
    pub w_z: f64,
    pub block_delays: BlockDelays,
    pub partition_eps: f64,
    pub weighted_centroid: bool,
    /// Move budget factor: `inner_num * N^(4/3)` moves per step.
    pub inner_num: f64,
    pub max_retries: usize,
    pub epsilon: f64,
    /// Compare incremental totals with a full recompute every k moves (0: off).
    pub verify_every: usize,
    /// Layer per block, replacing the partitioner's output.
    pub layer_assignment: Option<Vec<usize>>,
    /// Safety cap on temperature steps.
    pub max_steps: usize,
}

impl Default for PlaceOptions {
    fn default() -> Self {
        PlaceOptions {
            hyperparams: Hyperparams::default(),
            seed: 1,
            flags: Flags::ALL_ON,
            static_theta: 0.5,
            criticality_exponent: 1.0,
            w_z: 0.0,
            block_delays: BlockDelays::default(),
            partition_eps: 0.05,
            weighted_centroid: false,
            inner_num: 0.5,
            max_retries: 10,
            epsilon: 0.1,
            verify_every: 0,
            layer_assignment: None,
            max_steps: 5000,
        }
    }
}

/// Counters and bookkeeping from one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub n_moves: usize,
    pub steps: usize,
    pub attempted: u64,
    pub accepted: u64,
    /// Proposals for which no legal target was found.
    pub abandoned: u64,
    pub improving_proposed: u64,
    pub improving_accepted: u64,
    pub proposed_by_kind: BTreeMap<MoveKind, u64>,
    pub accepted_by_kind: BTreeMap<MoveKind, u64>,
    /// Successive (C_BB, C_timing) best tuples, starting with the initial one.
    pub best_history: Vec<(f64, f64)>,
    /// Temperature step of the last best update (0 when never improved).
    pub best_step: usize,
    pub t_init: f64,
    pub t_exit: f64,
    pub quench_entry: f64,
    pub quench_exit: f64,
    /// Largest relative drift of the incremental totals seen by the verifier.
    pub max_rel_err: f64,
    /// Largest `|Δ_incremental − Δ_recompute| / C_timing` seen by the verifier.
    pub max_delta_err: f64,
    pub relaxed_blocks: usize,
    pub partition_cut: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PlaceResult {
    pub placement: Placement,
    pub trace: RunTrace,
    pub stats: RunStats,
    /// STA of the final placement on the run's table.
    pub timing: TimingReport,
}

struct Normalizer {
    theta: f64,
    inv_bb: f64,
    inv_t: f64,
}

impl Normalizer {
    fn new(theta: f64, base_bb: f64, base_t: f64) -> Self {
        let inv = |b: f64| if b > 1e-12 { 1.0 / b } else { 0.0 };
        Normalizer {
            theta,
            inv_bb: inv(base_bb),
            inv_t: inv(base_t),
        }
    }

    #[inline]
    fn total(&self, d_bb: f64, d_t: f64) -> f64 {
        self.theta * d_t * self.inv_t + (1.0 - self.theta) * d_bb * self.inv_bb
    }
}

/// Runs the whole flow and returns the quenched best placement.
pub fn place(netlist: &Netlist, fabric: &Fabric, table: &DelayTable, opts: &PlaceOptions) -> Result<PlaceResult> {
    opts.hyperparams.validate()?;
    let hp = &opts.hyperparams;
    let flags = opts.flags;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats = RunStats::default();

    // Phase 1: initial placement.
    let mut placement = if flags.partition_init {
        let pre = unit_delay_sta(netlist, &opts.block_delays)?;
        let layer_of = match &opts.layer_assignment {
            Some(l) => l.clone(),
            None => {
                let h = Hypergraph::from_netlist(netlist, &pre);
                let a = partition::partition(&h, opts.partition_eps, opts.seed)?;
                stats.partition_cut = Some(a.cut);
                a.layer
            }
        };
        let init = partition::initial_placement(netlist, fabric, &layer_of, &pre.block_criticality(netlist))?;
        stats.relaxed_blocks = init.relaxed.len();
        if !init.relaxed.is_empty() {
            warn!("{} blocks placed off their assigned layer", init.relaxed.len());
        }
        init.placement
    } else {
        partition::random_placement(netlist, fabric, &mut rng)?
    };

    let movable: Vec<BlockId> = netlist.blocks().iter().filter(|b| !b.fixed).map(|b| b.id).collect();
    let n_moves = moves_per_step(movable.len(), opts.inner_num);
    stats.n_moves = n_moves;
    let kinds: &[MoveKind] = if flags.move_ext {
        &MoveKind::ALL
    } else {
        &MoveKind::ALL[..4]
    };
    let mut agent = EpsilonGreedy::new(kinds.len(), opts.epsilon, 0.99);
    let rlim_max = fabric.width().max(fabric.height()) as f64;
    let mut rlim = rlim_max;

    let mut window = AcceptanceWindow::default();
    let mut theta_floor = if flags.adaptive_theta { hp.theta_min } else { opts.static_theta };
    let mut theta_cur = theta_floor;
    let mut zeta_cur = if flags.adaptive_zeta { hp.zeta_max } else { 1.0 };

    let mut sta = run_sta(netlist, &placement, table, &opts.block_delays)?;
    let mut costs = CostState::new(netlist, table, opts.w_z);
    costs.reset(&placement, &sta.criticality, opts.criticality_exponent, zeta_cur);
    let mut norm = Normalizer::new(theta_cur, costs.total_bb, costs.total_timing);

    let mut best_locs = placement.locs().to_vec();
    let mut best = (costs.total_bb, costs.total_timing);
    stats.best_history.push(best);

    let mut trace = RunTrace::default();

    if !movable.is_empty() {
        // Starting temperature: spread of ΔC over trial proposals.
        let mut samples = Vec::with_capacity(movable.len());
        {
            let ctx = MoveContext {
                netlist,
                fabric,
                placement: &placement,
                movable: &movable,
                crit: &sta.criticality,
                rlim,
                move_ext: flags.move_ext,
                weighted_centroid: opts.weighted_centroid,
                max_retries: opts.max_retries,
            };
            for _ in 0..movable.len() {
                if let Some(m) = ctx.propose(MoveKind::Uniform, &mut rng) {
                    let (mv, k) = m.moved();
                    let (d_bb, d_t) = costs.delta(&placement, &mv[..k]);
                    samples.push(norm.total(d_bb, d_t));
                }
            }
        }
        let mut temp = 20.0 * std_dev(&samples);
        let t_exit = 0.005 * (norm.total(costs.total_bb, costs.total_timing)) / netlist.nets().len().max(1) as f64;
        if temp.is_nan() || temp <= t_exit {
            temp = t_exit;
        }
        stats.t_init = temp;
        stats.t_exit = t_exit;
        info!("T_init {temp:.3e}, T_exit {t_exit:.3e}, {n_moves} moves per step");

        // Phase 2: annealing.
        let mut step = 0usize;
        while temp > t_exit && step < opts.max_steps {
            let mut accepted = 0usize;
            for i in 0..n_moves {
                let arm = agent.select(&mut rng);
                let kind = kinds[arm];
                *stats.proposed_by_kind.entry(kind).or_default() += 1;
                stats.attempted += 1;
                let proposal = MoveContext {
                    netlist,
                    fabric,
                    placement: &placement,
                    movable: &movable,
                    crit: &sta.criticality,
                    rlim,
                    move_ext: flags.move_ext,
                    weighted_centroid: opts.weighted_centroid,
                    max_retries: opts.max_retries,
                }
                .propose(kind, &mut rng);
                let Some(m) = proposal else {
                    stats.abandoned += 1;
                    agent.reward(arm, 0.0);
                    continue;
                };
                let (mv, k) = m.moved();
                let (d_bb, d_t) = costs.delta(&placement, &mv[..k]);
                let dc = norm.total(d_bb, d_t);
                if !dc.is_finite() {
                    return Err(Error::NonFinite("annealing cost delta"));
                }
                if opts.verify_every > 0 && i % opts.verify_every == 0 {
                    verify_delta(&costs, &mut placement.clone(), &m, d_bb, d_t, &mut stats);
                }
                if dc < 0.0 {
                    stats.improving_proposed += 1;
                }
                let accept = dc < 0.0 || (-dc / temp).exp() > rng.gen::<f64>();
                agent.reward(arm, (-dc).max(0.0));
                if !accept {
                    continue;
                }
                if dc < 0.0 {
                    stats.improving_accepted += 1;
                }
                accepted += 1;
                stats.accepted += 1;
                *stats.accepted_by_kind.entry(kind).or_default() += 1;
                costs.commit(d_bb, d_t);
                m.apply(&mut placement);

                if costs.total_bb < best.0 && costs.total_timing < best.1 {
                    best = (costs.total_bb, costs.total_timing);
                    best_locs.copy_from_slice(placement.locs());
                    stats.best_history.push(best);
                    stats.best_step = step;
                }
                if opts.verify_every > 0 && stats.accepted % opts.verify_every as u64 == 0 {
                    check_totals(&costs, &placement, &mut stats);
                }
                if cfg!(debug_assertions) && stats.accepted % 1000 == 0 {
                    debug_assert!(placement.is_consistent());
                }
            }

            let alpha = accepted as f64 / n_moves as f64;
            window.push(alpha);
            let w = window.mean();
            if flags.adaptive_zeta {
                zeta_cur = zeta(w, hp);
            }
            if flags.adaptive_theta {
                theta_cur = theta(w, hp, &mut theta_floor);
            }
            rlim = update_rlim(rlim, alpha, rlim_max);
            let row_bb = costs.total_bb;
            let row_t = costs.total_timing;

            sta = run_sta(netlist, &placement, table, &opts.block_delays)?;
            costs.reset(&placement, &sta.criticality, opts.criticality_exponent, zeta_cur);
            norm = Normalizer::new(theta_cur, costs.total_bb, costs.total_timing);
            trace.rows.push(TraceRow {
                step,
                temperature: temp,
                alpha,
                w,
                zeta: zeta_cur,
                theta: theta_cur,
                c_bb: row_bb,
                c_timing: row_t,
                d_max: sta.d_max,
            });
            debug!("step {step}: T {temp:.3e} alpha {alpha:.3} D_max {:.3}", sta.d_max);
            temp *= cooling_factor(alpha);
            step += 1;
        }
        stats.steps = step;
    }

    // Phase 3: quench the best placement.
    placement = Placement::from_locs(fabric.layers(), fabric.width(), fabric.height(), best_locs);
    sta = run_sta(netlist, &placement, table, &opts.block_delays)?;
    costs.reset(&placement, &sta.criticality, opts.criticality_exponent, zeta_cur);
    let norm = Normalizer::new(theta_cur, costs.total_bb, costs.total_timing);
    stats.quench_entry = norm.total(costs.total_bb, costs.total_timing);
    let mut quench_total = stats.quench_entry;
    if !movable.is_empty() {
        for _ in 0..n_moves {
            let arm = agent.select(&mut rng);
            let kind = kinds[arm];
            let proposal = MoveContext {
                netlist,
                fabric,
                placement: &placement,
                movable: &movable,
                crit: &sta.criticality,
                rlim,
                move_ext: flags.move_ext,
                weighted_centroid: opts.weighted_centroid,
                max_retries: opts.max_retries,
            }
            .propose(kind, &mut rng);
            let Some(m) = proposal else { continue };
            let (mv, k) = m.moved();
            let (d_bb, d_t) = costs.delta(&placement, &mv[..k]);
            let dc = norm.total(d_bb, d_t);
            if !dc.is_finite() {
                return Err(Error::NonFinite("quench cost delta"));
            }
            agent.reward(arm, (-dc).max(0.0));
            if dc < 0.0 {
                costs.commit(d_bb, d_t);
                m.apply(&mut placement);
                quench_total += dc;
            }
        }
    }
    stats.quench_exit = quench_total;

    let violations = check_legality(&placement, netlist, fabric);
    if !violations.is_empty() {
        return Err(Error::InvalidNetlist(format!("placer produced an illegal placement: {:?}", violations[0])));
    }
    let timing = run_sta(netlist, &placement, table, &opts.block_delays)?;
    Ok(PlaceResult {
        placement,
        trace,
        stats,
        timing,
    })
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

fn check_totals(costs: &CostState, p: &Placement, stats: &mut RunStats) {
    let (bb, t) = costs.recompute(p);
    stats.max_rel_err = stats.max_rel_err.max(rel(costs.total_bb, bb)).max(rel(costs.total_timing, t));
}

fn verify_delta(costs: &CostState, scratch: &mut Placement, m: &MoveProposal, d_bb: f64, d_t: f64, stats: &mut RunStats) {
    let (bb0, t0) = costs.recompute(scratch);
    m.apply(scratch);
    let (bb1, t1) = costs.recompute(scratch);
    let e_t = ((t1 - t0) - d_t).abs() / t0.abs().max(1e-12);
    let e_bb = ((bb1 - bb0) - d_bb).abs() / bb0.abs().max(1e-12);
    stats.max_delta_err = stats.max_delta_err.max(e_t).max(e_bb);
}
