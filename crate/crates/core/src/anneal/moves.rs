//! Move kinds, target-site sampling and neighbour-driven layer selection.

use std::fmt;

use rand::Rng;

use crate::arch::{Fabric, KindGrid};
use crate::netlist::{BlockId, BlockKind, Netlist};
use crate::placement::{Loc, Placement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Uniform,
    Centroid,
    Median,
    FeasibleRegion,
    LayerSwap,
}

impl MoveKind {
    pub const ALL: [MoveKind; 5] = [
        MoveKind::Uniform,
        MoveKind::Centroid,
        MoveKind::Median,
        MoveKind::FeasibleRegion,
        MoveKind::LayerSwap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Uniform => "uniform",
            MoveKind::Centroid => "centroid",
            MoveKind::Median => "median",
            MoveKind::FeasibleRegion => "feasible_region",
            MoveKind::LayerSwap => "layer_swap",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A proposed relocation of `block` to `to`, displacing `partner` (which
/// then takes `block`'s old site) when the target is occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveProposal {
    pub kind: MoveKind,
    pub block: BlockId,
    pub from: Loc,
    pub to: Loc,
    pub partner: Option<BlockId>,
}

impl MoveProposal {
    /// Blocks whose location changes, with their new locations.
    pub fn moved(&self) -> ([(BlockId, Loc); 2], usize) {
        let first = (self.block, self.to);
        match self.partner {
            Some(p) => ([first, (p, self.from)], 2),
            None => ([first, first], 1),
        }
    }

    pub fn apply(&self, p: &mut Placement) {
        match self.partner {
            Some(q) => p.swap(self.block, q),
            None => p.relocate(self.block, self.to),
        }
    }
}

/// Samples a layer with probability `counts[i] / sum(counts)`; `None` when
/// all counts are zero.
pub fn sample_layer(counts: &[usize], rng: &mut impl Rng) -> Option<usize> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let mut r = rng.gen_range(0..total);
    for (i, &c) in counts.iter().enumerate() {
        if r < c {
            return Some(i);
        }
        r -= c;
    }
    unreachable!()
}

/// Per-layer neighbour counts: all sinks when `b` drives a net, the driver
/// otherwise.
pub fn layer_counts(b: BlockId, netlist: &Netlist, p: &Placement) -> [usize; 2] {
    let mut counts = [0usize; 2];
    for &c in netlist.fanout_connections(b) {
        counts[p.loc(netlist.connection(c).sink).layer.min(1)] += 1;
    }
    for &c in netlist.fanin_connections(b) {
        counts[p.loc(netlist.connection(c).driver).layer.min(1)] += 1;
    }
    counts
}

/// Everything a proposal needs to look at.
pub struct MoveContext<'a> {
    pub netlist: &'a Netlist,
    pub fabric: &'a Fabric,
    pub placement: &'a Placement,
    /// Movable blocks.
    pub movable: &'a [BlockId],
    /// Per-connection criticality.
    pub crit: &'a [f64],
    pub rlim: f64,
    /// Sample centroid/median layers from the neighbour distribution and
    /// allow layer swaps; otherwise use the rounded neighbour mean/median.
    pub move_ext: bool,
    pub weighted_centroid: bool,
    pub max_retries: usize,
}

const FEASIBLE_CRIT: f64 = 0.8;

impl MoveContext<'_> {
    /// Draws a proposal of `kind`, or `None` after `max_retries` failures.
    pub fn propose(&self, kind: MoveKind, rng: &mut impl Rng) -> Option<MoveProposal> {
        if self.movable.is_empty() {
            return None;
        }
        for _ in 0..self.max_retries.max(1) {
            let b = self.movable[rng.gen_range(0..self.movable.len())];
            let from = self.placement.loc(b);
            let to = match kind {
                MoveKind::Uniform => self.uniform_target(b, from, rng),
                MoveKind::Centroid | MoveKind::Median => self.centroid_target(b, from, kind, rng),
                MoveKind::FeasibleRegion => self.feasible_target(b, from, rng),
                MoveKind::LayerSwap => Some(Loc::new(1 - from.layer.min(1), from.x, from.y)),
            };
            let Some(to) = to else { continue };
            if let Some(m) = self.finish(kind, b, from, to) {
                return Some(m);
            }
        }
        None
    }

    fn finish(&self, kind: MoveKind, b: BlockId, from: Loc, to: Loc) -> Option<MoveProposal> {
        if to == from || !self.fabric.in_bounds(to) {
            return None;
        }
        let k = self.netlist.block(b).kind;
        if self.fabric.tile_kind(to.x, to.y) != Some(k) {
            return None;
        }
        let partner = self.placement.block_at(to);
        if let Some(q) = partner {
            let qb = self.netlist.block(q);
            if qb.fixed || qb.kind != k {
                return None;
            }
        }
        Some(MoveProposal {
            kind,
            block: b,
            from,
            to,
            partner,
        })
    }

    fn kind_of(&self, b: BlockId) -> BlockKind {
        self.netlist.block(b).kind
    }

    fn window(&self, cx: usize, cy: usize, r: usize) -> (usize, usize, usize, usize) {
        let (w, h) = (self.fabric.width(), self.fabric.height());
        (cx.saturating_sub(r), (cx + r).min(w - 1), cy.saturating_sub(r), (cy + r).min(h - 1))
    }

    fn uniform_target(&self, b: BlockId, from: Loc, rng: &mut impl Rng) -> Option<Loc> {
        let r = self.rlim.round().max(1.0) as usize;
        let (x0, x1, y0, y1) = self.window(from.x, from.y, r);
        let (x, y) = sample_in(self.fabric.kind_grid(self.kind_of(b)), x0, x1, y0, y1, rng)?;
        let layer = rng.gen_range(0..self.fabric.layers());
        Some(Loc::new(layer, x, y))
    }

    fn centroid_target(&self, b: BlockId, from: Loc, kind: MoveKind, rng: &mut impl Rng) -> Option<Loc> {
        let mut pts: Vec<(Loc, f64)> = Vec::new();
        for &c in self.netlist.fanout_connections(b) {
            pts.push((self.placement.loc(self.netlist.connection(c).sink), self.crit[c.0]));
        }
        for &c in self.netlist.fanin_connections(b) {
            pts.push((self.placement.loc(self.netlist.connection(c).driver), self.crit[c.0]));
        }
        if pts.is_empty() {
            return self.uniform_target(b, from, rng);
        }
        let weighted = self.weighted_centroid && pts.iter().any(|p| p.1 > 0.0);
        if !weighted {
            for p in &mut pts {
                p.1 = 1.0;
            }
        }
        let (cx, cy) = if kind == MoveKind::Centroid {
            let wsum: f64 = pts.iter().map(|p| p.1).sum();
            let mx = pts.iter().map(|p| p.0.x as f64 * p.1).sum::<f64>() / wsum;
            let my = pts.iter().map(|p| p.0.y as f64 * p.1).sum::<f64>() / wsum;
            (mx.round() as usize, my.round() as usize)
        } else {
            let mut xs: Vec<usize> = pts.iter().map(|p| p.0.x).collect();
            let mut ys: Vec<usize> = pts.iter().map(|p| p.0.y).collect();
            xs.sort_unstable();
            ys.sort_unstable();
            (xs[(xs.len() - 1) / 2], ys[(ys.len() - 1) / 2])
        };

        let mut counts = [0usize; 2];
        for p in &pts {
            counts[p.0.layer.min(1)] += 1;
        }
        let layer = if self.move_ext {
            sample_layer(&counts, rng).unwrap_or(from.layer)
        } else if kind == MoveKind::Centroid {
            let wsum: f64 = pts.iter().map(|p| p.1).sum();
            let mean = pts.iter().map(|p| p.0.layer as f64 * p.1).sum::<f64>() / wsum;
            mean.round() as usize
        } else {
            usize::from(counts[1] > counts[0])
        };

        let grid = self.fabric.kind_grid(self.kind_of(b));
        let (nx, ny) = nearest_site(grid, cx, cy)?;
        let (x0, x1, y0, y1) = self.window(nx, ny, 1);
        let (x, y) = sample_in(grid, x0, x1, y0, y1, rng)?;
        Some(Loc::new(layer, x, y))
    }

    fn feasible_target(&self, b: BlockId, from: Loc, rng: &mut impl Rng) -> Option<Loc> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for &c in self.netlist.fanin_connections(b) {
            if self.crit[c.0] <= FEASIBLE_CRIT {
                continue;
            }
            let l = self.placement.loc(self.netlist.connection(c).driver);
            bbox = Some(match bbox {
                None => (l.x, l.x, l.y, l.y),
                Some((x0, x1, y0, y1)) => (x0.min(l.x), x1.max(l.x), y0.min(l.y), y1.max(l.y)),
            });
        }
        let grid = self.fabric.kind_grid(self.kind_of(b));
        let site = match bbox {
            Some((x0, x1, y0, y1)) if x0 < x1 || y0 < y1 => {
                sample_in(grid, x0, x1, y0, y1, rng).or_else(|| nearest_site(grid, (x0 + x1) / 2, (y0 + y1) / 2))
            }
            _ => {
                let r = self.rlim.round().max(1.0) as usize;
                let (x0, x1, y0, y1) = self.window(from.x, from.y, r);
                sample_in(grid, x0, x1, y0, y1, rng)
            }
        }?;
        Some(Loc::new(from.layer, site.0, site.1))
    }
}

/// Uniform column in `[x0, x1]`, then a uniform row of that column in
/// `[y0, y1]`.
pub fn sample_in(grid: &KindGrid, x0: usize, x1: usize, y0: usize, y1: usize, rng: &mut impl Rng) -> Option<(usize, usize)> {
    let lo = grid.columns.partition_point(|&c| c < x0);
    let hi = grid.columns.partition_point(|&c| c <= x1);
    if lo >= hi {
        return None;
    }
    let ci = rng.gen_range(lo..hi);
    let rows = &grid.rows[ci];
    let rlo = rows.partition_point(|&r| r < y0);
    let rhi = rows.partition_point(|&r| r <= y1);
    if rlo >= rhi {
        return None;
    }
    Some((grid.columns[ci], rows[rng.gen_range(rlo..rhi)]))
}

/// Compatible site closest to (x, y), column first then row.
pub fn nearest_site(grid: &KindGrid, x: usize, y: usize) -> Option<(usize, usize)> {
    let i = grid.columns.partition_point(|&c| c < x);
    let cands = [i.checked_sub(1), (i < grid.columns.len()).then_some(i)];
    let ci = cands.into_iter().flatten().min_by_key(|&c| grid.columns[c].abs_diff(x))?;
    let rows = &grid.rows[ci];
    let j = rows.partition_point(|&r| r < y);
    let rj = [j.checked_sub(1), (j < rows.len()).then_some(j)]
        .into_iter()
        .flatten()
        .min_by_key(|&r| rows[r].abs_diff(y))?;
    Some((grid.columns[ci], rows[rj]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn layer_sampling_matches_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_layer(&[3, 2], &mut rng) == Some(0)).count();
        assert!((hits as f64 / n as f64 - 0.6).abs() < 0.02);
        assert_eq!(sample_layer(&[0, 4], &mut rng), Some(1));
        assert_eq!(sample_layer(&[0, 0], &mut rng), None);
    }

    #[test]
    fn site_sampling() {
        let grid = KindGrid {
            columns: vec![1, 4, 7],
            rows: vec![vec![1, 2, 3], vec![1, 2, 3], vec![1, 2, 3]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (x, y) = sample_in(&grid, 2, 7, 3, 9, &mut rng).unwrap();
            assert!(x == 4 || x == 7);
            assert_eq!(y, 3);
        }
        assert_eq!(sample_in(&grid, 2, 3, 0, 9, &mut rng), None);
        assert_eq!(nearest_site(&grid, 3, 0), Some((4, 1)));
        assert_eq!(nearest_site(&grid, 0, 9), Some((1, 3)));
    }
}
