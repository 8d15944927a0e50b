//! Incremental wirelength and timing costs.

use crate::lookahead::DelayTable;
use crate::netlist::{BlockId, ConnId, NetId, Netlist};
use crate::placement::{Loc, Placement};
use crate::timing::effective_delay;
use crate::wirelength::net_cost;

/// Cached per-net and per-connection costs with running totals.
pub struct CostState<'a> {
    netlist: &'a Netlist,
    table: &'a DelayTable,
    w_z: f64,
    zeta: f64,
    /// criticality^exponent per connection.
    weight: Vec<f64>,
    net_cost: Vec<f64>,
    conn_cost: Vec<f64>,
    pub total_bb: f64,
    pub total_timing: f64,
    net_mark: Vec<u32>,
    conn_mark: Vec<u32>,
    epoch: u32,
    pending_nets: Vec<(NetId, f64)>,
    pending_conns: Vec<(ConnId, f64)>,
}

/// Location of `b` with up to two blocks overridden.
#[inline]
fn loc_with(p: &Placement, moved: &[(BlockId, Loc)], b: BlockId) -> Loc {
    for &(m, l) in moved {
        if m == b {
            return l;
        }
    }
    p.loc(b)
}

impl<'a> CostState<'a> {
    pub fn new(netlist: &'a Netlist, table: &'a DelayTable, w_z: f64) -> Self {
        CostState {
            netlist,
            table,
            w_z,
            zeta: 1.0,
            weight: vec![0.0; netlist.connections().len()],
            net_cost: vec![0.0; netlist.nets().len()],
            conn_cost: vec![0.0; netlist.connections().len()],
            total_bb: 0.0,
            total_timing: 0.0,
            net_mark: vec![0; netlist.nets().len()],
            conn_mark: vec![0; netlist.connections().len()],
            epoch: 0,
            pending_nets: Vec::new(),
            pending_conns: Vec::new(),
        }
    }

    /// Sets criticalities and ζ, then recomputes every cost from scratch.
    pub fn reset(&mut self, p: &Placement, crit: &[f64], exponent: f64, zeta: f64) {
        self.zeta = zeta;
        for (w, &c) in self.weight.iter_mut().zip(crit) {
            *w = if exponent == 1.0 { c } else { c.powf(exponent) };
        }
        let (bb, t) = self.full(p);
        self.total_bb = bb;
        self.total_timing = t;
    }

    fn net_value(&self, p: &Placement, moved: &[(BlockId, Loc)], n: NetId) -> f64 {
        let net = self.netlist.net(n);
        net_cost(net.pins().map(|b| loc_with(p, moved, b)), self.w_z)
    }

    fn conn_value(&self, p: &Placement, moved: &[(BlockId, Loc)], c: ConnId) -> f64 {
        let w = self.weight[c.0];
        if w == 0.0 {
            return 0.0;
        }
        let conn = self.netlist.connection(c);
        let src = loc_with(p, moved, conn.driver);
        let dst = loc_with(p, moved, conn.sink);
        w * effective_delay(self.table, src, dst, self.zeta)
    }

    /// Recomputes the cached costs and returns `(C_BB, C_timing)`.
    pub fn full(&mut self, p: &Placement) -> (f64, f64) {
        for n in 0..self.net_cost.len() {
            self.net_cost[n] = self.net_value(p, &[], NetId(n));
        }
        for c in 0..self.conn_cost.len() {
            self.conn_cost[c] = self.conn_value(p, &[], ConnId(c));
        }
        (self.net_cost.iter().sum(), self.conn_cost.iter().sum())
    }

    /// From-scratch totals without touching the cache.
    pub fn recompute(&self, p: &Placement) -> (f64, f64) {
        let bb = (0..self.net_cost.len()).map(|n| self.net_value(p, &[], NetId(n))).sum();
        let t = (0..self.conn_cost.len()).map(|c| self.conn_value(p, &[], ConnId(c))).sum();
        (bb, t)
    }

    /// `(ΔC_BB, ΔC_timing)` of moving the listed blocks, staged for
    /// [`commit`](Self::commit).
    pub fn delta(&mut self, p: &Placement, moved: &[(BlockId, Loc)]) -> (f64, f64) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.net_mark.iter_mut().for_each(|m| *m = 0);
            self.conn_mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.pending_nets.clear();
        self.pending_conns.clear();
        let (mut d_bb, mut d_t) = (0.0, 0.0);
        for &(b, _) in moved {
            for &n in self.netlist.block_nets(b) {
                if self.net_mark[n.0] == self.epoch {
                    continue;
                }
                self.net_mark[n.0] = self.epoch;
                let v = self.net_value(p, moved, n);
                d_bb += v - self.net_cost[n.0];
                self.pending_nets.push((n, v));
            }
            let conns = self.netlist.fanout_connections(b).iter().chain(self.netlist.fanin_connections(b));
            for &c in conns {
                if self.conn_mark[c.0] == self.epoch {
                    continue;
                }
                self.conn_mark[c.0] = self.epoch;
                let v = self.conn_value(p, moved, c);
                d_t += v - self.conn_cost[c.0];
                self.pending_conns.push((c, v));
            }
        }
        (d_bb, d_t)
    }

    /// Applies the last staged delta.
    pub fn commit(&mut self, d_bb: f64, d_t: f64) {
        for &(n, v) in &self.pending_nets {
            self.net_cost[n.0] = v;
        }
        for &(c, v) in &self.pending_conns {
            self.conn_cost[c.0] = v;
        }
        self.total_bb += d_bb;
        self.total_timing += d_t;
    }
}
