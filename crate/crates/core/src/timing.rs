//! Block-level static timing analysis and the layer-scaled timing cost.
//!
//! Each block contributes an output node and an input node. IO pads and
//! sequential blocks launch at time 0 from their output and capture at their
//! input; combinational blocks add their kind delay from input to output.
//! Combinational blocks without fanout are endpoints as well.

use crate::error::{Error, Result};
use crate::lookahead::DelayTable;
use crate::netlist::{BlockId, BlockKind, ConnId, Netlist};
use crate::placement::{Loc, Placement};

/// Intra-block combinational delay per kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDelays {
    pub io: f64,
    pub clb: f64,
    pub dsp: f64,
    pub bram: f64,
}

impl Default for BlockDelays {
    fn default() -> Self {
        BlockDelays {
            io: 0.0,
            clb: 0.2,
            dsp: 0.8,
            bram: 0.6,
        }
    }
}

impl BlockDelays {
    pub fn zero() -> Self {
        BlockDelays {
            io: 0.0,
            clb: 0.0,
            dsp: 0.0,
            bram: 0.0,
        }
    }

    pub fn of(&self, kind: BlockKind) -> f64 {
        match kind {
            BlockKind::Io => self.io,
            BlockKind::Clb => self.clb,
            BlockKind::Dsp => self.dsp,
            BlockKind::Bram => self.bram,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    /// Critical-path delay estimate.
    pub d_max: f64,
    /// Per connection: the delay used by the analysis.
    pub conn_delay: Vec<f64>,
    pub slack: Vec<f64>,
    /// `1 - slack / d_max`, clamped to [0, 1]; all zero when `d_max == 0`.
    pub criticality: Vec<f64>,
    /// Blocks along the worst path, launch to capture.
    pub critical_path: Vec<BlockId>,
}

impl TimingReport {
    /// Max criticality over each block's incident connections.
    pub fn block_criticality(&self, netlist: &Netlist) -> Vec<f64> {
        let mut out = vec![0.0f64; netlist.num_blocks()];
        for (i, c) in netlist.connections().iter().enumerate() {
            let k = self.criticality[i];
            out[c.driver.0] = out[c.driver.0].max(k);
            out[c.sink.0] = out[c.sink.0].max(k);
        }
        out
    }

    /// Counts of connection criticalities in `bins` equal-width buckets.
    pub fn criticality_histogram(&self, bins: usize) -> Vec<usize> {
        let mut hist = vec![0usize; bins];
        for &c in &self.criticality {
            let i = ((c * bins as f64) as usize).min(bins - 1);
            hist[i] += 1;
        }
        hist
    }
}

/// Runs STA with an arbitrary per-connection delay.
pub fn analyze(netlist: &Netlist, delays: &BlockDelays, conn_delay: impl Fn(ConnId) -> f64) -> Result<TimingReport> {
    let nblk = netlist.num_blocks();
    let conns = netlist.connections();
    if netlist.topo_order().len() != nblk {
        return Err(Error::CombinationalCycle("<timing graph>".into()));
    }
    let cd: Vec<f64> = (0..conns.len()).map(|i| conn_delay(ConnId(i))).collect();
    let blocks = netlist.blocks();
    let boundary: Vec<bool> = blocks.iter().map(|b| b.is_timing_boundary()).collect();
    let bdelay: Vec<f64> = blocks.iter().map(|b| delays.of(b.kind)).collect();

    let mut arr_out = vec![0.0f64; nblk];
    for &b in netlist.topo_order() {
        let b = b.0;
        if boundary[b] {
            continue;
        }
        let mut a = 0.0f64;
        for &c in netlist.fanin_connections(BlockId(b)) {
            a = a.max(arr_out[conns[c.0].driver.0] + cd[c.0]);
        }
        arr_out[b] = a + bdelay[b];
    }
    let arr_in = |b: usize| -> f64 {
        netlist
            .fanin_connections(BlockId(b))
            .iter()
            .map(|c| arr_out[conns[c.0].driver.0] + cd[c.0])
            .fold(0.0, f64::max)
    };

    // endpoints: boundary inputs, combinational outputs without fanout
    let mut d_max = 0.0f64;
    let mut worst: Option<(usize, bool)> = None;
    for b in 0..nblk {
        let (t, at_input) = if boundary[b] {
            if netlist.fanin_connections(BlockId(b)).is_empty() {
                continue;
            }
            (arr_in(b), true)
        } else if netlist.fanout_connections(BlockId(b)).is_empty() {
            (arr_out[b], false)
        } else {
            continue;
        };
        if worst.is_none() || t > d_max {
            d_max = d_max.max(t);
            worst = Some((b, at_input));
        }
    }

    let mut req_out = vec![d_max; nblk];
    let req_in = |s: usize, req_out: &[f64]| if boundary[s] { d_max } else { req_out[s] - bdelay[s] };
    for &b in netlist.topo_order().iter().rev() {
        let b = b.0;
        let fo = netlist.fanout_connections(BlockId(b));
        if fo.is_empty() {
            continue;
        }
        let mut r = f64::INFINITY;
        for &c in fo {
            let s = conns[c.0].sink.0;
            r = r.min(req_in(s, &req_out) - cd[c.0]);
        }
        req_out[b] = r;
    }

    let mut slack = Vec::with_capacity(conns.len());
    let mut criticality = Vec::with_capacity(conns.len());
    for (i, c) in conns.iter().enumerate() {
        let s = req_in(c.sink.0, &req_out) - (arr_out[c.driver.0] + cd[i]);
        slack.push(s);
        let k = if d_max > 0.0 { (1.0 - s / d_max).clamp(0.0, 1.0) } else { 0.0 };
        criticality.push(k);
    }

    let mut critical_path = Vec::new();
    if let Some((end, at_input)) = worst {
        critical_path.push(BlockId(end));
        let mut cur = end;
        let mut follow = at_input || !boundary[end];
        while follow {
            let best = netlist
                .fanin_connections(BlockId(cur))
                .iter()
                .max_by(|a, b| {
                    let ta = arr_out[conns[a.0].driver.0] + cd[a.0];
                    let tb = arr_out[conns[b.0].driver.0] + cd[b.0];
                    ta.total_cmp(&tb)
                })
                .map(|c| conns[c.0].driver.0);
            match best {
                Some(d) => {
                    critical_path.push(BlockId(d));
                    cur = d;
                    follow = !boundary[d];
                }
                None => break,
            }
        }
        critical_path.reverse();
    }

    Ok(TimingReport {
        d_max,
        conn_delay: cd,
        slack,
        criticality,
        critical_path,
    })
}

/// STA of a placement with wire delays from the lookahead.
pub fn run_sta(netlist: &Netlist, p: &Placement, table: &DelayTable, delays: &BlockDelays) -> Result<TimingReport> {
    let conns = netlist.connections();
    analyze(netlist, delays, |c| {
        let c = &conns[c.0];
        table.lookup(p.loc(c.driver), p.loc(c.sink))
    })
}

/// STA before any placement exists: every connection costs one unit.
pub fn unit_delay_sta(netlist: &Netlist, delays: &BlockDelays) -> Result<TimingReport> {
    analyze(netlist, delays, |_| 1.0)
}

/// Layer-scaled connection delay:
/// `d2 + zeta * (d3 - d2)` with `d2` the same-layer entry at the
/// connection's offset and `d3` the cross-layer entry.
#[inline]
pub fn effective_delay(table: &DelayTable, src: Loc, dst: Loc, zeta: f64) -> f64 {
    let (dx, dy) = (src.x.abs_diff(dst.x), src.y.abs_diff(dst.y));
    let d2 = table.entry(src.layer, src.layer, dx, dy);
    if src.layer == dst.layer {
        return d2;
    }
    let d3 = table.entry(src.layer, dst.layer, dx, dy);
    d2 + zeta * (d3 - d2)
}

#[inline]
pub fn connection_cost(criticality: f64, exponent: f64, eff_delay: f64) -> f64 {
    criticality.powf(exponent) * eff_delay
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingCost {
    pub total: f64,
    pub per_connection: Vec<f64>,
    /// Sum over connections incident to each block.
    pub per_block: Vec<f64>,
}

pub fn timing_cost(
    netlist: &Netlist,
    criticality: &[f64],
    p: &Placement,
    table: &DelayTable,
    zeta: f64,
    exponent: f64,
) -> TimingCost {
    let conns = netlist.connections();
    let per_connection: Vec<f64> = conns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let eff = effective_delay(table, p.loc(c.driver), p.loc(c.sink), zeta);
            connection_cost(criticality[i], exponent, eff)
        })
        .collect();
    let mut per_block = vec![0.0; netlist.num_blocks()];
    for (i, c) in conns.iter().enumerate() {
        per_block[c.driver.0] += per_connection[i];
        if c.sink != c.driver {
            per_block[c.sink.0] += per_connection[i];
        }
    }
    TimingCost {
        total: per_connection.iter().sum(),
        per_connection,
        per_block,
    }
}
