//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use place3d::anneal::{Hyperparams, PlaceResult};
use place3d::arch::{ArchSpec, Fabric, Style};
use place3d::lookahead::{anchor_tile, UNREACHABLE};
use place3d::netlist::Netlist;
use place3d::placement::check_legality;

/// Shortest delay from the anchor OPIN on `l_src` to every IPIN, by a plain
/// O(V^2) Dijkstra over a graph rebuilt from the style rules.
pub fn oracle_ipin_dist(spec: &ArchSpec, fabric: &Fabric, l_src: usize) -> Vec<Vec<Vec<f64>>> {
    let (w, h) = (fabric.width(), fabric.height());
    // node = (layer, x, y, class) with class 0 = opin, 1 = chan, 2 = ipin
    let id = |l: usize, x: usize, y: usize, c: usize| ((l * h + y) * w + x) * 3 + c;
    let n = 2 * w * h * 3;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let (out_links, in_links, sw_links) = match spec.style {
        Style::Cb => (true, true, false),
        Style::CbO => (true, false, false),
        Style::CbI => (false, true, false),
        Style::Sb => (false, false, true),
        Style::Hybrid => (true, true, true),
        Style::HybridO => (true, false, true),
        Style::HybridI => (false, true, true),
    };
    for l in 0..2 {
        for y in 0..h {
            for x in 0..w {
                adj[id(l, x, y, 0)].push((id(l, x, y, 1), spec.d_co));
                adj[id(l, x, y, 1)].push((id(l, x, y, 2), spec.d_ci));
                for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                        adj[id(l, x, y, 1)].push((id(l, nx as usize, ny as usize, 1), spec.d_h));
                    }
                }
                if (x + y * w) % spec.v_period == 0 {
                    let o = 1 - l;
                    if out_links {
                        adj[id(l, x, y, 0)].push((id(o, x, y, 1), spec.d_v));
                    }
                    if in_links {
                        adj[id(l, x, y, 1)].push((id(o, x, y, 2), spec.d_v));
                    }
                    if sw_links {
                        adj[id(l, x, y, 1)].push((id(o, x, y, 1), spec.d_v));
                    }
                }
            }
        }
    }
    let (ax, ay) = (1, 1);
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[id(l_src, ax, ay, 0)] = 0.0;
    loop {
        let mut u = usize::MAX;
        for v in 0..n {
            if !done[v] && dist[v].is_finite() && (u == usize::MAX || dist[v] < dist[u]) {
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for &(v, d) in &adj[u] {
            if dist[u] + d < dist[v] {
                dist[v] = dist[u] + d;
            }
        }
    }
    (0..2)
        .map(|l| (0..w).map(|x| (0..h).map(|y| dist[id(l, x, y, 2)]).collect()).collect())
        .collect()
}

/// Expected table entry for a measured offset: minimum over the IPINs at
/// that absolute offset from the anchor, zero for the anchor itself.
pub fn oracle_entry(dist: &[Vec<Vec<f64>>], fabric: &Fabric, l_src: usize, l_dst: usize, dx: usize, dy: usize) -> f64 {
    if l_src == l_dst && dx == 0 && dy == 0 {
        return 0.0;
    }
    let (ax, ay) = anchor_tile(fabric);
    let mut best = f64::INFINITY;
    for (x, col) in dist[l_dst].iter().enumerate() {
        for (y, &d) in col.iter().enumerate() {
            if x.abs_diff(ax) == dx && y.abs_diff(ay) == dy {
                best = best.min(d);
            }
        }
    }
    if best.is_finite() {
        best
    } else {
        UNREACHABLE
    }
}

/// ζ(w) written directly from its definition.
pub fn zeta_ref(w: f64, hp: &Hyperparams) -> f64 {
    let wc = if w < hp.w_min {
        hp.w_min
    } else if w > hp.w_max {
        hp.w_max
    } else {
        w
    };
    hp.zeta_max + (hp.zeta_min - hp.zeta_max) * ((hp.w_max - wc) / (hp.w_max - hp.w_min)).powf(hp.p_zeta as f64)
}

/// θ(w) before the floor.
pub fn theta_ref(w: f64, hp: &Hyperparams) -> f64 {
    if w > 0.15 {
        hp.theta_max - w.powf(hp.p_theta as f64) * (hp.theta_max - hp.theta_min)
    } else {
        hp.theta_max
    }
}

/// Weighted cut: sum of weights of edges with pins on both sides.
pub fn cut_ref(edges: &[(f64, Vec<usize>)], side: &[usize]) -> f64 {
    edges
        .iter()
        .filter(|(_, pins)| pins.iter().any(|&v| side[v] == 0) && pins.iter().any(|&v| side[v] == 1))
        .map(|(w, _)| w)
        .sum()
}

/// Per-class balance `|c0 - n/2| <= max(eps * n, 1/2 when n is odd)`.
pub fn balanced_ref(classes: &[usize], side: &[usize], eps: f64) -> bool {
    let k = classes.iter().max().map_or(0, |m| m + 1);
    (0..k).all(|c| {
        let n = classes.iter().filter(|&&x| x == c).count();
        let c0 = classes.iter().zip(side).filter(|(&x, &s)| x == c && s == 0).count();
        let tol = if n % 2 == 1 { (eps * n as f64).max(0.5) } else { eps * n as f64 };
        (c0 as f64 - n as f64 / 2.0).abs() <= tol + 1e-9
    })
}

/// Rolling mean over the last five values, recomputed from scratch.
pub fn rolling_mean5(xs: &[f64], i: usize) -> f64 {
    let lo = i.saturating_sub(4);
    let win = &xs[lo..=i];
    win.iter().sum::<f64>() / win.len() as f64
}

/// Algorithm contracts on one finished run; returns the violations.
pub fn contract_violations(netlist: &Netlist, fabric: &Fabric, hp: &Hyperparams, r: &PlaceResult) -> Vec<String> {
    let mut bad = Vec::new();
    let rows = &r.trace.rows;
    for pair in rows.windows(2) {
        if pair[1].theta < pair[0].theta {
            bad.push(format!("theta fell at step {}: {} -> {}", pair[1].step, pair[0].theta, pair[1].theta));
        }
    }
    let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    for (i, row) in rows.iter().enumerate() {
        let m = rolling_mean5(&alphas, i);
        if (row.w - m).abs() > 1e-12 {
            bad.push(format!("w {} != rolling mean {m} at step {i}", row.w));
        }
        if row.zeta < hp.zeta_min.min(1.0) || row.zeta > hp.zeta_max.max(1.0) {
            bad.push(format!("zeta {} out of range at step {i}", row.zeta));
        }
    }
    let s = &r.stats;
    if s.improving_proposed != s.improving_accepted {
        bad.push(format!("{} improving moves proposed, {} accepted", s.improving_proposed, s.improving_accepted));
    }
    for pair in s.best_history.windows(2) {
        if !(pair[1].0 < pair[0].0 && pair[1].1 < pair[0].1) {
            bad.push(format!("best tuple {:?} does not dominate {:?}", pair[1], pair[0]));
        }
    }
    if s.quench_exit > s.quench_entry + 1e-12 * s.quench_entry.abs() {
        bad.push(format!("quench raised cost {} -> {}", s.quench_entry, s.quench_exit));
    }
    let legality = check_legality(&r.placement, netlist, fabric);
    if !legality.is_empty() {
        bad.push(format!("illegal placement: {:?}", legality[0]));
    }
    let n_blk = netlist.num_movable();
    let expect = ((0.5 * (n_blk as f64).powf(4.0 / 3.0)).round() as usize).max(1);
    if s.n_moves != expect {
        bad.push(format!("N_moves {} != {expect}", s.n_moves));
    }
    bad
}
