//! Layer assignment by timing-weighted FM bipartitioning, and the initial
//! placement that follows it.

use std::collections::BTreeSet;

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arch::Fabric;
use crate::error::{Error, Result};
use crate::netlist::{BlockId, BlockKind, Netlist};
use crate::placement::{Loc, Placement};
use crate::timing::TimingReport;

/// Weighted hypergraph with one balance class per vertex.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    classes: Vec<usize>,
    num_classes: usize,
    edge_weights: Vec<f64>,
    edge_pins: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// `classes[v]` is the balance class of vertex `v`; each edge is a weight
    /// and its pin list (duplicates are dropped).
    pub fn new(classes: Vec<usize>, edges: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let n = classes.len();
        let num_classes = classes.iter().map(|c| c + 1).max().unwrap_or(0);
        let mut incidence = vec![Vec::new(); n];
        let mut edge_weights = Vec::with_capacity(edges.len());
        let mut edge_pins = Vec::with_capacity(edges.len());
        for (e, (w, mut pins)) in edges.into_iter().enumerate() {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Config(format!("hyperedge {e} has invalid weight {w}")));
            }
            pins.sort_unstable();
            pins.dedup();
            if let Some(&v) = pins.iter().find(|&&v| v >= n) {
                return Err(Error::Config(format!("hyperedge {e} references vertex {v} of {n}")));
            }
            for &v in &pins {
                incidence[v].push(e);
            }
            edge_weights.push(w);
            edge_pins.push(pins);
        }
        Ok(Hypergraph {
            classes,
            num_classes,
            edge_weights,
            edge_pins,
            incidence,
        })
    }

    /// One vertex per block (balanced per kind), one hyperedge per net
    /// weighted `net.weight * (1 + max connection criticality)`.
    pub fn from_netlist(netlist: &Netlist, pre_placement: &TimingReport) -> Self {
        let classes = netlist.blocks().iter().map(|b| b.kind.index()).collect();
        let edges = netlist
            .nets()
            .iter()
            .map(|n| {
                let crit = netlist
                    .net_connections(n.id)
                    .map(|c| pre_placement.criticality[c])
                    .fold(0.0, f64::max);
                (n.weight * (1.0 + crit), n.pins().map(|b| b.0).collect())
            })
            .collect();
        Self::new(classes, edges).expect("netlist-derived hypergraph is valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.classes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_weights.len()
    }

    pub fn class(&self, v: usize) -> usize {
        self.classes[v]
    }

    pub fn edge(&self, e: usize) -> (f64, &[usize]) {
        (self.edge_weights[e], &self.edge_pins[e])
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Weighted cut of a bipartition.
    pub fn cut(&self, side: &[usize]) -> f64 {
        self.edge_pins
            .iter()
            .zip(&self.edge_weights)
            .filter(|(pins, _)| pins.iter().any(|&v| side[v] != side[pins[0]]))
            .map(|(_, w)| w)
            .sum()
    }

    /// Gain of moving `v` to the other side.
    pub fn move_gain(&self, side: &[usize], v: usize) -> f64 {
        let s = side[v];
        let mut g = 0.0;
        for &e in &self.incidence[v] {
            let pins = &self.edge_pins[e];
            let same = pins.iter().filter(|&&u| side[u] == s).count();
            let other = pins.len() - same;
            if same == 1 {
                g += self.edge_weights[e];
            }
            if other == 0 {
                g -= self.edge_weights[e];
            }
        }
        g
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut n = vec![0usize; self.num_classes];
        for &c in &self.classes {
            n[c] += 1;
        }
        n
    }
}

/// Allowed side-0 population for each class.
#[derive(Debug, Clone, PartialEq)]
pub struct Balance {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
    /// Classes whose tolerance had to widen to a floor/ceil split.
    pub relaxed: Vec<usize>,
}

impl Balance {
    /// `|count_0 - n/2| <= max(eps * n, 1/2 for odd n)` per class.
    pub fn new(class_sizes: &[usize], eps: f64) -> Self {
        let mut lo = Vec::with_capacity(class_sizes.len());
        let mut hi = Vec::with_capacity(class_sizes.len());
        let mut relaxed = Vec::new();
        for (k, &n) in class_sizes.iter().enumerate() {
            let half = n as f64 / 2.0;
            let mut dev = eps * n as f64;
            if n % 2 == 1 && dev < 0.5 {
                relaxed.push(k);
                dev = 0.5;
            }
            lo.push((half - dev - 1e-9).ceil().max(0.0) as usize);
            hi.push(((half + dev + 1e-9).floor() as usize).min(n));
        }
        Balance { lo, hi, relaxed }
    }

    pub fn holds(&self, count0: &[usize]) -> bool {
        count0.iter().enumerate().all(|(k, &c)| self.lo[k] <= c && c <= self.hi[k])
    }

    /// Whether moving one vertex of class `k` off/onto side 0 keeps the
    /// count within the bound widened by `slack`.
    fn allows(&self, count0: &[usize], k: usize, from_side: usize, slack: usize) -> bool {
        let c = count0[k];
        if from_side == 0 {
            c >= 1 && c - 1 + slack >= self.lo[k]
        } else {
            c < self.hi[k] + slack
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerAssignment {
    /// Layer (0 or 1) per vertex.
    pub layer: Vec<usize>,
    pub cut: f64,
    /// Largest `|count_0 - n/2| / n` over classes.
    pub imbalance: f64,
    /// Cut after the initial assignment and after each committed pass.
    pub pass_cuts: Vec<f64>,
    pub relaxed_classes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmOptions {
    pub eps: f64,
    pub seed: u64,
    /// Independent random starts; the lowest cut wins.
    pub restarts: usize,
    pub max_passes: usize,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions {
            eps: 0.05,
            seed: 1,
            restarts: 4,
            max_passes: 64,
        }
    }
}

const GAIN_EPS: f64 = 1e-9;

#[derive(Clone, Copy)]
struct Gain(f64);

impl PartialEq for Gain {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Gain {}

impl PartialOrd for Gain {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gain {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Partitions with imbalance `eps` and the given seed (default options otherwise).
pub fn partition(h: &Hypergraph, eps: f64, seed: u64) -> Result<LayerAssignment> {
    partition_with(
        h,
        &FmOptions {
            eps,
            seed,
            ..FmOptions::default()
        },
    )
}

pub fn partition_with(h: &Hypergraph, opts: &FmOptions) -> Result<LayerAssignment> {
    if h.num_vertices() < 2 {
        return Err(Error::Config("partitioning needs at least 2 vertices".into()));
    }
    if !(opts.eps > 0.0 && opts.eps < 0.5) {
        return Err(Error::Config(format!("imbalance must lie in (0, 0.5), got {}", opts.eps)));
    }
    let sizes = h.class_sizes();
    let balance = Balance::new(&sizes, opts.eps);
    for &k in &balance.relaxed {
        warn!(
            "class {k}: {} vertices cannot meet imbalance {}; using a floor/ceil split",
            sizes[k], opts.eps
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<LayerAssignment> = None;
    for _ in 0..opts.restarts.max(1) {
        let start_seed = rng.gen::<u64>();
        let result = fm_from_random_start(h, &balance, start_seed, opts.max_passes);
        if best.as_ref().is_none_or(|b| result.cut < b.cut) {
            best = Some(result);
        }
    }
    let mut best = best.unwrap();
    best.relaxed_classes = balance.relaxed.clone();
    Ok(best)
}

fn fm_from_random_start(h: &Hypergraph, balance: &Balance, seed: u64, max_passes: usize) -> LayerAssignment {
    let n = h.num_vertices();
    let sizes = h.class_sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut side = vec![1usize; n];
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    for v in 0..n {
        by_class[h.class(v)].push(v);
    }
    for (k, members) in by_class.iter_mut().enumerate() {
        members.shuffle(&mut rng);
        let mut take = sizes[k] / 2;
        if sizes[k] % 2 == 1 && rng.gen_bool(0.5) {
            take += 1;
        }
        let take = take.clamp(balance.lo[k], balance.hi[k]);
        for &v in members.iter().take(take) {
            side[v] = 0;
        }
    }

    let mut pass_cuts = vec![h.cut(&side)];
    loop {
        for _ in 0..max_passes {
            if !fm_pass(h, balance, &mut side) {
                break;
            }
            pass_cuts.push(h.cut(&side));
        }
        // single-vertex polish so the result is a strict local optimum
        if !polish(h, balance, &mut side) {
            break;
        }
        pass_cuts.push(h.cut(&side));
    }

    let cut = h.cut(&side);
    let count0 = side_zero_counts(h, &side);
    let imbalance = sizes
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0)
        .map(|(k, &s)| (count0[k] as f64 - s as f64 / 2.0).abs() / s as f64)
        .fold(0.0, f64::max);
    LayerAssignment {
        layer: side,
        cut,
        imbalance,
        pass_cuts,
        relaxed_classes: Vec::new(),
    }
}

fn side_zero_counts(h: &Hypergraph, side: &[usize]) -> Vec<usize> {
    let mut c = vec![0usize; h.class_sizes().len()];
    for (v, &s) in side.iter().enumerate() {
        if s == 0 {
            c[h.class(v)] += 1;
        }
    }
    c
}

/// One FM pass; moves may overshoot the balance bound by one vertex, but
/// only balanced prefixes are kept. Returns whether the cut improved.
fn fm_pass(h: &Hypergraph, balance: &Balance, side: &mut [usize]) -> bool {
    let n = h.num_vertices();
    let mut count0 = side_zero_counts(h, side);
    let mut pins_on: Vec<[usize; 2]> = (0..h.num_edges())
        .map(|e| {
            let mut c = [0usize; 2];
            for &v in h.edge(e).1 {
                c[side[v]] += 1;
            }
            c
        })
        .collect();
    let mut gain: Vec<f64> = (0..n).map(|v| h.move_gain(side, v)).collect();
    let mut locked = vec![false; n];
    let mut buckets: BTreeSet<(Gain, usize)> = (0..n).map(|v| (Gain(gain[v]), v)).collect();

    let mut moves = Vec::new();
    let mut cum = 0.0;
    let mut best_gain = 0.0;
    let mut best_len = 0usize;

    loop {
        let pick = buckets
            .iter()
            .rev()
            .find(|&&(_, v)| balance.allows(&count0, h.class(v), side[v], 1))
            .copied();
        let Some((Gain(g), v)) = pick else { break };
        buckets.remove(&(Gain(g), v));
        locked[v] = true;
        let from = side[v];
        let to = 1 - from;

        let adjust = |u: usize, delta: f64, gain: &mut Vec<f64>, buckets: &mut BTreeSet<(Gain, usize)>| {
            if locked[u] {
                return;
            }
            buckets.remove(&(Gain(gain[u]), u));
            gain[u] += delta;
            buckets.insert((Gain(gain[u]), u));
        };
        for &e in h.incident(v) {
            let (w, pins) = h.edge(e);
            if pins_on[e][to] == 0 {
                for &u in pins {
                    adjust(u, w, &mut gain, &mut buckets);
                }
            } else if pins_on[e][to] == 1 {
                for &u in pins {
                    if side[u] == to {
                        adjust(u, -w, &mut gain, &mut buckets);
                    }
                }
            }
            pins_on[e][from] -= 1;
            pins_on[e][to] += 1;
            if pins_on[e][from] == 0 {
                for &u in pins {
                    adjust(u, -w, &mut gain, &mut buckets);
                }
            } else if pins_on[e][from] == 1 {
                for &u in pins {
                    if side[u] == from && u != v {
                        adjust(u, w, &mut gain, &mut buckets);
                    }
                }
            }
        }
        side[v] = to;
        if from == 0 {
            count0[h.class(v)] -= 1;
        } else {
            count0[h.class(v)] += 1;
        }
        moves.push(v);
        cum += g;
        if cum > best_gain + GAIN_EPS && balance.holds(&count0) {
            best_gain = cum;
            best_len = moves.len();
        }
    }
    for &v in moves[best_len..].iter().rev() {
        side[v] = 1 - side[v];
    }
    best_len > 0
}

/// Applies the best strictly balanced single-vertex move while it has
/// positive gain.
fn polish(h: &Hypergraph, balance: &Balance, side: &mut [usize]) -> bool {
    let mut changed = false;
    loop {
        let count0 = side_zero_counts(h, side);
        let best = (0..h.num_vertices())
            .filter(|&v| balance.allows(&count0, h.class(v), side[v], 0))
            .map(|v| (h.move_gain(side, v), v))
            .filter(|(g, _)| *g > GAIN_EPS)
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((_, v)) => {
                side[v] = 1 - side[v];
                changed = true;
            }
            None => return changed,
        }
    }
}

/// Result of the criticality-ordered initial placement.
#[derive(Debug, Clone)]
pub struct InitialPlacement {
    pub placement: Placement,
    /// Blocks placed on the other layer because theirs was full.
    pub relaxed: Vec<BlockId>,
}

/// Errors with a per-kind deficit when the fabric cannot hold the netlist.
pub fn check_capacity(netlist: &Netlist, fabric: &Fabric) -> Result<()> {
    let mut deficits = Vec::new();
    for kind in BlockKind::ALL {
        let need = netlist.count_kind(kind);
        let have = fabric.capacity(kind) * fabric.layers();
        if need > have {
            deficits.push(format!("{kind}: need {need}, have {have} (short {})", need - have));
        }
    }
    if deficits.is_empty() {
        Ok(())
    } else {
        Err(Error::Capacity(deficits.join("; ")))
    }
}

/// Places blocks in decreasing criticality on their assigned layer at the
/// free compatible site nearest the fabric centre (Manhattan, ties by x then
/// y); a block whose layer is full goes to the other layer.
pub fn initial_placement(
    netlist: &Netlist,
    fabric: &Fabric,
    layer_of: &[usize],
    block_crit: &[f64],
) -> Result<InitialPlacement> {
    check_capacity(netlist, fabric)?;
    let cx = (fabric.width() - 1) as f64 / 2.0;
    let cy = (fabric.height() - 1) as f64 / 2.0;
    let ordered_sites: Vec<Vec<(usize, usize)>> = BlockKind::ALL
        .iter()
        .map(|&k| {
            let mut s = fabric.sites(k).to_vec();
            s.sort_by(|a, b| {
                let da = (a.0 as f64 - cx).abs() + (a.1 as f64 - cy).abs();
                let db = (b.0 as f64 - cx).abs() + (b.1 as f64 - cy).abs();
                da.total_cmp(&db).then(a.cmp(b))
            });
            s
        })
        .collect();
    let mut cursor = vec![[0usize; 2]; BlockKind::ALL.len()];

    let mut order: Vec<usize> = (0..netlist.num_blocks()).collect();
    order.sort_by(|&a, &b| block_crit[b].total_cmp(&block_crit[a]).then(a.cmp(&b)));

    let mut locs = vec![Loc::new(0, 0, 0); netlist.num_blocks()];
    let mut relaxed = Vec::new();
    for b in order {
        let k = netlist.blocks()[b].kind.index();
        let want = layer_of[b].min(1);
        let layer = if cursor[k][want] < ordered_sites[k].len() {
            want
        } else {
            relaxed.push(BlockId(b));
            1 - want
        };
        let (x, y) = ordered_sites[k][cursor[k][layer]];
        cursor[k][layer] += 1;
        locs[b] = Loc::new(layer, x, y);
    }
    Ok(InitialPlacement {
        placement: Placement::for_fabric(fabric, locs),
        relaxed,
    })
}

/// Uniformly random legal placement.
pub fn random_placement(netlist: &Netlist, fabric: &Fabric, rng: &mut impl Rng) -> Result<Placement> {
    check_capacity(netlist, fabric)?;
    let mut locs = vec![Loc::new(0, 0, 0); netlist.num_blocks()];
    for kind in BlockKind::ALL {
        let mut sites: Vec<Loc> = (0..fabric.layers())
            .flat_map(|l| fabric.sites(kind).iter().map(move |&(x, y)| Loc::new(l, x, y)))
            .collect();
        sites.shuffle(rng);
        let mut next = sites.into_iter();
        for b in netlist.blocks().iter().filter(|b| b.kind == kind) {
            locs[b.id.0] = next.next().expect("capacity checked");
        }
    }
    Ok(Placement::for_fabric(fabric, locs))
}
