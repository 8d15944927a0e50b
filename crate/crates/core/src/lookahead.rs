//! The `[l_src][l_dst][dx][dy]` placement delay lookahead.
//!
//! A table is built by Dijkstra over the routing graph from the output pin
//! of an anchor tile near the bottom-left corner, keeping the minimum delay
//! that reaches an input pin at each absolute offset. In
//! [`DelayMode::Average`] every channel and vertical edge is first replaced
//! by their common arithmetic mean, so vertical hops look like ordinary
//! wire segments; [`DelayMode::Exact`] keeps each edge's own delay.
//!
//! Binary dump layout (little endian): magic `P3DLUT`, `u16` version (1),
//! `u8` mode (0 = average, 1 = exact), `u8` layers, `u32` width, `u32`
//! height, `u32` anchor x, `u32` anchor y, then `layers² · width · height`
//! `f64` entries in row-major `[l_src][l_dst][dx][dy]` order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::arch::{routing_edges, ArchSpec, EdgeClass, Fabric, NodeClass, RrNode};
use crate::error::{Error, Result};
use crate::placement::Loc;

/// Delay recorded for offsets no route reaches.
pub const UNREACHABLE: f64 = 1e9;

const MAGIC: &[u8; 6] = b"P3DLUT";
const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DelayMode {
    Average,
    Exact,
}

impl fmt::Display for DelayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DelayMode::Average => "average",
            DelayMode::Exact => "exact",
        })
    }
}

impl FromStr for DelayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "average" => Ok(DelayMode::Average),
            "exact" => Ok(DelayMode::Exact),
            other => Err(Error::Config(format!("unknown delay model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayTable {
    layers: usize,
    width: usize,
    height: usize,
    mode: DelayMode,
    anchor: (usize, usize),
    entries: Vec<f64>,
}

impl DelayTable {
    #[inline]
    fn index(&self, l_src: usize, l_dst: usize, dx: usize, dy: usize) -> usize {
        ((l_src * self.layers + l_dst) * self.width + dx) * self.height + dy
    }

    #[inline]
    pub fn entry(&self, l_src: usize, l_dst: usize, dx: usize, dy: usize) -> f64 {
        self.entries[self.index(l_src, l_dst, dx, dy)]
    }

    /// Delay between two sites, by absolute offset.
    #[inline]
    pub fn lookup(&self, src: Loc, dst: Loc) -> f64 {
        self.entry(src.layer, dst.layer, src.x.abs_diff(dst.x), src.y.abs_diff(dst.y))
    }

    pub fn mode(&self) -> DelayMode {
        self.mode
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.layers, self.width, self.height)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(28 + self.entries.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(match self.mode {
            DelayMode::Average => 0,
            DelayMode::Exact => 1,
        });
        out.push(self.layers as u8);
        for v in [self.width, self.height, self.anchor.0, self.anchor.1] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        for e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("delay table dump: {m}"));
        if bytes.len() < 26 || &bytes[..6] != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u16::from_le_bytes([bytes[6], bytes[7]]);
        if version != VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let mode = match bytes[8] {
            0 => DelayMode::Average,
            1 => DelayMode::Exact,
            m => return Err(bad(&format!("unknown mode {m}"))),
        };
        let layers = bytes[9] as usize;
        let word = |i: usize| u32::from_le_bytes(bytes[10 + 4 * i..14 + 4 * i].try_into().unwrap()) as usize;
        let (width, height, ax, ay) = (word(0), word(1), word(2), word(3));
        let n = layers * layers * width * height;
        let body = &bytes[26..];
        if body.len() != n * 8 {
            return Err(bad(&format!("expected {} entry bytes, found {}", n * 8, body.len())));
        }
        let entries = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(DelayTable {
            layers,
            width,
            height,
            mode,
            anchor: (ax, ay),
            entries,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

/// The tile the search starts from: the interior tile nearest the
/// bottom-left corner.
pub fn anchor_tile(fabric: &Fabric) -> (usize, usize) {
    (1.min(fabric.width() - 1), 1.min(fabric.height() - 1))
}

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other.0.total_cmp(&self.0)
    }
}

struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    delays: Vec<f64>,
}

fn node_index(n: RrNode, w: usize, h: usize) -> usize {
    let class = match n.class {
        NodeClass::Opin => 0,
        NodeClass::Chan => 1,
        NodeClass::Ipin => 2,
    };
    ((n.layer * h + n.y) * w + n.x) * 3 + class
}

/// Mean over the values, exact when every value is identical.
fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut groups: BTreeMap<u64, usize> = BTreeMap::new();
    for v in values {
        *groups.entry(v.to_bits()).or_default() += 1;
    }
    if groups.len() == 1 {
        return groups.keys().next().map(|b| f64::from_bits(*b));
    }
    let total: usize = groups.values().sum();
    if total == 0 {
        return None;
    }
    let sum: f64 = groups.iter().map(|(b, c)| f64::from_bits(*b) * *c as f64).sum();
    Some(sum / total as f64)
}

/// Builds the lookahead for a fabric.
pub fn build_table(fabric: &Fabric, spec: &ArchSpec, mode: DelayMode) -> DelayTable {
    let (w, h, layers) = (fabric.width(), fabric.height(), fabric.layers());
    let mut edges = routing_edges(spec, fabric);
    let mut hop = spec.d_h;
    if mode == DelayMode::Average {
        let averaged = |e: &crate::arch::RrEdge| matches!(e.class, EdgeClass::Channel | EdgeClass::Vertical);
        if let Some(mean) = mean_of(edges.iter().filter(|e| averaged(e)).map(|e| e.delay)) {
            for e in edges.iter_mut().filter(|e| averaged(e)) {
                e.delay = mean;
            }
            hop = mean;
        }
    }

    let nnodes = layers * w * h * 3;
    let mut offsets = vec![0usize; nnodes + 1];
    for e in &edges {
        offsets[node_index(e.from, w, h) + 1] += 1;
    }
    for i in 0..nnodes {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0usize; edges.len()];
    let mut delays = vec![0.0; edges.len()];
    for e in &edges {
        let f = node_index(e.from, w, h);
        targets[fill[f]] = node_index(e.to, w, h);
        delays[fill[f]] = e.delay;
        fill[f] += 1;
    }
    let graph = Graph {
        offsets,
        targets,
        delays,
    };

    let anchor = anchor_tile(fabric);
    let mut table = DelayTable {
        layers,
        width: w,
        height: h,
        mode,
        anchor,
        entries: vec![UNREACHABLE; layers * layers * w * h],
    };
    for l_src in 0..layers {
        let src = RrNode {
            layer: l_src,
            x: anchor.0,
            y: anchor.1,
            class: NodeClass::Opin,
        };
        let dist = dijkstra(&graph, node_index(src, w, h));
        for l_dst in 0..layers {
            for y in 0..h {
                for x in 0..w {
                    let ipin = RrNode {
                        layer: l_dst,
                        x,
                        y,
                        class: NodeClass::Ipin,
                    };
                    let d = dist[node_index(ipin, w, h)];
                    let i = table.index(l_src, l_dst, x.abs_diff(anchor.0), y.abs_diff(anchor.1));
                    if d < table.entries[i] {
                        table.entries[i] = d;
                    }
                }
            }
            if l_src == l_dst {
                let i = table.index(l_src, l_dst, 0, 0);
                table.entries[i] = 0.0;
            }
        }
    }
    extrapolate(&mut table, hop);
    table
}

/// Offsets that no tile reaches from the anchor continue the nearest
/// measured entry by one channel hop per step.
fn extrapolate(t: &mut DelayTable, hop: f64) {
    let max_dx = t.anchor.0.max(t.width - 1 - t.anchor.0);
    let max_dy = t.anchor.1.max(t.height - 1 - t.anchor.1);
    let step = |prev: f64| if prev >= UNREACHABLE { UNREACHABLE } else { prev + hop };
    for ls in 0..t.layers {
        for ld in 0..t.layers {
            for dx in max_dx + 1..t.width {
                for dy in 0..=max_dy {
                    let v = step(t.entry(ls, ld, dx - 1, dy));
                    let i = t.index(ls, ld, dx, dy);
                    t.entries[i] = v;
                }
            }
            for dx in 0..t.width {
                for dy in max_dy + 1..t.height {
                    let v = step(t.entry(ls, ld, dx, dy - 1));
                    let i = t.index(ls, ld, dx, dy);
                    t.entries[i] = v;
                }
            }
        }
    }
}

/// Whether `(dx, dy)` is measured from the anchor rather than extrapolated.
pub fn is_measured(t: &DelayTable, dx: usize, dy: usize) -> bool {
    dx <= t.anchor.0.max(t.width - 1 - t.anchor.0) && dy <= t.anchor.1.max(t.height - 1 - t.anchor.1)
}

fn dijkstra(g: &Graph, source: usize) -> Vec<f64> {
    let n = g.offsets.len() - 1;
    let mut dist = vec![UNREACHABLE; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push((Dist(0.0), source));
    while let Some((Dist(d), u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for e in g.offsets[u]..g.offsets[u + 1] {
            let v = g.targets[e];
            let nd = d + g.delays[e];
            if nd < dist[v] {
                dist[v] = nd;
                heap.push((Dist(nd), v));
            }
        }
    }
    dist
}
