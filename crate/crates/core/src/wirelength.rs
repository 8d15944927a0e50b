//! Bounding-box wirelength with the crossing-count correction.

use crate::netlist::{BlockId, Netlist};
use crate::placement::{Loc, Placement};

/// (pins, q) breakpoints; linear in between, flat past 50 pins.
const CROSSING_BREAKPOINTS: [(usize, f64); 16] = [
    (3, 1.0),
    (4, 1.0828),
    (5, 1.1536),
    (6, 1.2206),
    (7, 1.2823),
    (8, 1.3385),
    (9, 1.3991),
    (10, 1.4493),
    (15, 1.6899),
    (20, 1.8924),
    (25, 2.0743),
    (30, 2.2334),
    (35, 2.3895),
    (40, 2.5356),
    (45, 2.6625),
    (50, 2.7933),
];

/// Crossing-count correction for a net with `pins` terminals.
pub fn crossing_count(pins: usize) -> f64 {
    if pins <= CROSSING_BREAKPOINTS[0].0 {
        return 1.0;
    }
    for w in CROSSING_BREAKPOINTS.windows(2) {
        let ((p0, q0), (p1, q1)) = (w[0], w[1]);
        if pins <= p1 {
            return q0 + (q1 - q0) * (pins - p0) as f64 / (p1 - p0) as f64;
        }
    }
    CROSSING_BREAKPOINTS[CROSSING_BREAKPOINTS.len() - 1].1
}

/// Cost of one net from its pin locations:
/// `q(pins) * (bb_x + bb_y) + w_z * (layers spanned - 1)`.
pub fn net_cost(pins: impl IntoIterator<Item = Loc>, w_z: f64) -> f64 {
    let mut it = pins.into_iter();
    let Some(first) = it.next() else { return 0.0 };
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (first.x, first.x, first.y, first.y);
    let (mut lmin, mut lmax) = (first.layer, first.layer);
    let mut n = 1usize;
    for l in it {
        xmin = xmin.min(l.x);
        xmax = xmax.max(l.x);
        ymin = ymin.min(l.y);
        ymax = ymax.max(l.y);
        lmin = lmin.min(l.layer);
        lmax = lmax.max(l.layer);
        n += 1;
    }
    let bb = (xmax - xmin + ymax - ymin) as f64;
    crossing_count(n) * bb + w_z * (lmax - lmin) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct WirelengthReport {
    pub total: f64,
    pub per_net: Vec<f64>,
    /// Sum of the costs of the nets incident to each block.
    pub per_block: Vec<f64>,
}

pub fn hpwl(p: &Placement, netlist: &Netlist, w_z: f64) -> WirelengthReport {
    let per_net: Vec<f64> = netlist
        .nets()
        .iter()
        .map(|n| net_cost(n.pins().map(|b| p.loc(b)), w_z))
        .collect();
    let per_block = (0..netlist.num_blocks())
        .map(|b| netlist.block_nets(BlockId(b)).iter().map(|n| per_net[n.0]).sum())
        .collect();
    WirelengthReport {
        total: per_net.iter().sum(),
        per_net,
        per_block,
    }
}
