//! Block → site mapping with its inverse occupancy grid, the legality
//! checker and the placement / layer-assignment file formats.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use crate::arch::Fabric;
use crate::error::{Error, Result};
use crate::netlist::{BlockId, BlockKind, Netlist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc {
    pub layer: usize,
    pub x: usize,
    pub y: usize,
}

impl Loc {
    pub fn new(layer: usize, x: usize, y: usize) -> Self {
        Loc { layer, x, y }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(l{},{},{})", self.layer, self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    layers: usize,
    width: usize,
    height: usize,
    locs: Vec<Loc>,
    grid: Vec<Option<BlockId>>,
}

impl Placement {
    /// Builds a placement from per-block locations. Overlapping or
    /// out-of-bounds locations are kept so that [`check_legality`] can
    /// report them; the occupancy grid records the last block at a site.
    pub fn from_locs(layers: usize, width: usize, height: usize, locs: Vec<Loc>) -> Self {
        let mut grid = vec![None; layers * width * height];
        for (i, l) in locs.iter().enumerate() {
            if l.layer < layers && l.x < width && l.y < height {
                grid[(l.layer * height + l.y) * width + l.x] = Some(BlockId(i));
            }
        }
        Placement {
            layers,
            width,
            height,
            locs,
            grid,
        }
    }

    pub fn for_fabric(fabric: &Fabric, locs: Vec<Loc>) -> Self {
        Self::from_locs(fabric.layers(), fabric.width(), fabric.height(), locs)
    }

    #[inline]
    fn site(&self, l: Loc) -> usize {
        (l.layer * self.height + l.y) * self.width + l.x
    }

    #[inline]
    pub fn loc(&self, b: BlockId) -> Loc {
        self.locs[b.0]
    }

    pub fn locs(&self) -> &[Loc] {
        &self.locs
    }

    #[inline]
    pub fn block_at(&self, l: Loc) -> Option<BlockId> {
        self.grid[self.site(l)]
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.layers, self.width, self.height)
    }

    pub fn num_blocks(&self) -> usize {
        self.locs.len()
    }

    /// Moves `b` to an empty site.
    pub fn relocate(&mut self, b: BlockId, to: Loc) {
        let from = self.locs[b.0];
        debug_assert!(self.block_at(to).is_none());
        let (fs, ts) = (self.site(from), self.site(to));
        self.grid[fs] = None;
        self.grid[ts] = Some(b);
        self.locs[b.0] = to;
    }

    /// Exchanges the sites of two blocks.
    pub fn swap(&mut self, a: BlockId, b: BlockId) {
        let (la, lb) = (self.locs[a.0], self.locs[b.0]);
        let (sa, sb) = (self.site(la), self.site(lb));
        self.grid[sa] = Some(b);
        self.grid[sb] = Some(a);
        self.locs[a.0] = lb;
        self.locs[b.0] = la;
    }

    /// Whether the occupancy grid and the location array are exact inverses.
    pub fn is_consistent(&self) -> bool {
        let mut seen = 0usize;
        for (i, slot) in self.grid.iter().enumerate() {
            if let Some(b) = slot {
                seen += 1;
                if b.0 >= self.locs.len() || self.site(self.locs[b.0]) != i {
                    return false;
                }
            }
        }
        seen == self.locs.len()
    }

    pub fn to_text(&self, netlist: &Netlist, seed: u64) -> String {
        let mut out = format!(
            "layers={} width={} height={} seed={}\n",
            self.layers, self.width, self.height, seed
        );
        for b in netlist.blocks() {
            let l = self.locs[b.id.0];
            let _ = writeln!(out, "block {} {} {} {}", b.name, l.layer, l.x, l.y);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>, netlist: &Netlist, seed: u64) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text(netlist, seed)).map_err(|e| Error::io(path, e))
    }

    /// Parses a placement file; returns the placement and the recorded seed.
    pub fn parse(text: &str, netlist: &Netlist, path: &Path) -> Result<(Self, u64)> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty placement file".into()))?;
        let mut kv = HashMap::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| perr(hline, format!("bad header token `{tok}`")))?;
            let v: u64 = v.parse().map_err(|_| perr(hline, format!("bad header value `{tok}`")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| perr(hline, format!("header lacks `{k}`")));
        let (layers, width, height, seed) = (get("layers")?, get("width")?, get("height")?, get("seed")?);

        let mut locs: Vec<Option<Loc>> = vec![None; netlist.num_blocks()];
        for (lineno, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 || toks[0] != "block" {
                return Err(perr(lineno, "expected `block <name> <layer> <x> <y>`".into()));
            }
            let b = netlist
                .find_block(toks[1])
                .ok_or_else(|| perr(lineno, format!("unknown block `{}`", toks[1])))?;
            let num = |s: &str| s.parse::<usize>().map_err(|_| perr(lineno, format!("bad coordinate `{s}`")));
            if locs[b.0].is_some() {
                return Err(perr(lineno, format!("block `{}` placed twice", toks[1])));
            }
            locs[b.0] = Some(Loc::new(num(toks[2])?, num(toks[3])?, num(toks[4])?));
        }
        let locs = locs
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| perr(0, format!("block `{}` not placed", netlist.blocks()[i].name))))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            Placement::from_locs(layers as usize, width as usize, height as usize, locs),
            seed,
        ))
    }

    pub fn load(path: impl AsRef<Path>, netlist: &Netlist) -> Result<(Self, u64)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, netlist, path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Overlap { loc: Loc, blocks: Vec<BlockId> },
    KindMismatch { block: BlockId, loc: Loc, tile: Option<BlockKind> },
    OutOfBounds { block: BlockId, loc: Loc },
    IoOffPeriphery { block: BlockId, loc: Loc },
    /// The occupancy grid disagrees with the location array.
    InverseMap,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { loc, blocks } => write!(f, "overlap at {loc}: {} blocks", blocks.len()),
            Violation::KindMismatch { block, loc, tile } => {
                write!(f, "kind mismatch: block #{} on {:?} tile at {loc}", block.0, tile)
            }
            Violation::OutOfBounds { block, loc } => write!(f, "out of bounds: block #{} at {loc}", block.0),
            Violation::IoOffPeriphery { block, loc } => {
                write!(f, "io block #{} off the periphery at {loc}", block.0)
            }
            Violation::InverseMap => f.write_str("occupancy grid inconsistent with block locations"),
        }
    }
}

/// Lists every legality violation; empty means legal.
pub fn check_legality(p: &Placement, netlist: &Netlist, fabric: &Fabric) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut occupants: HashMap<Loc, Vec<BlockId>> = HashMap::new();
    for b in netlist.blocks() {
        let loc = p.loc(b.id);
        if !fabric.in_bounds(loc) {
            out.push(Violation::OutOfBounds { block: b.id, loc });
            continue;
        }
        occupants.entry(loc).or_default().push(b.id);
        let tile = fabric.tile_kind(loc.x, loc.y);
        if b.kind == BlockKind::Io && !fabric.is_periphery(loc.x, loc.y) {
            out.push(Violation::IoOffPeriphery { block: b.id, loc });
        } else if tile != Some(b.kind) {
            out.push(Violation::KindMismatch {
                block: b.id,
                loc,
                tile,
            });
        }
    }
    let mut overlaps: Vec<_> = occupants.into_iter().filter(|(_, v)| v.len() > 1).collect();
    overlaps.sort();
    for (loc, blocks) in overlaps {
        out.push(Violation::Overlap { loc, blocks });
    }
    if out.is_empty() && !p.is_consistent() {
        out.push(Violation::InverseMap);
    }
    out
}

/// Writes a layer assignment as `block <name> <layer>` lines.
pub fn assignment_to_text(netlist: &Netlist, layers: &[usize]) -> String {
    let mut out = String::new();
    for b in netlist.blocks() {
        let _ = writeln!(out, "block {} {}", b.name, layers[b.id.0]);
    }
    out
}

pub fn parse_assignment(text: &str, netlist: &Netlist, path: &Path) -> Result<Vec<usize>> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut layers = vec![None; netlist.num_blocks()];
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "block" {
            return Err(perr(i + 1, "expected `block <name> <layer>`".into()));
        }
        let b = netlist
            .find_block(toks[1])
            .ok_or_else(|| perr(i + 1, format!("unknown block `{}`", toks[1])))?;
        let l: usize = toks[2].parse().map_err(|_| perr(i + 1, format!("bad layer `{}`", toks[2])))?;
        if l > 1 {
            return Err(perr(i + 1, format!("layer {l} out of range")));
        }
        layers[b.0] = Some(l);
    }
    layers
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| perr(0, format!("block `{}` has no layer", netlist.blocks()[i].name))))
        .collect()
}
