//! Packed netlist: blocks, multi-pin nets and the derived connection view.
//!
//! File format (line oriented, `#` starts a comment):
//!
//! ```text
//! block <name> <io|clb|dsp|bram> [fixed] [seq]
//! net <name> <driver>.<pin> -> <sink>.<pin>[, <sink>.<pin> ...] [weight=<w>]
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetId(pub usize);

/// Index into [`Netlist::connections`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    Io,
    Clb,
    Dsp,
    Bram,
}

impl BlockKind {
    pub const ALL: [BlockKind; 4] = [BlockKind::Io, BlockKind::Clb, BlockKind::Dsp, BlockKind::Bram];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BlockKind::Io => "io",
            BlockKind::Clb => "clb",
            BlockKind::Dsp => "dsp",
            BlockKind::Bram => "bram",
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BlockKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "io" => Ok(BlockKind::Io),
            "clb" => Ok(BlockKind::Clb),
            "dsp" => Ok(BlockKind::Dsp),
            "bram" => Ok(BlockKind::Bram),
            other => Err(format!("unknown block kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub id: BlockId,
    pub name: String,
    pub kind: BlockKind,
    /// Pinned by the user; never moved by the annealer.
    pub fixed: bool,
    /// Sequential start/endpoint (clock boundary).
    pub seq: bool,
}

impl Block {
    /// IO pads and sequential blocks break combinational paths.
    pub fn is_timing_boundary(&self) -> bool {
        self.seq || self.kind == BlockKind::Io
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PinRef {
    pub block: BlockId,
    pub pin: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub id: NetId,
    pub name: String,
    pub driver: PinRef,
    pub sinks: Vec<PinRef>,
    pub weight: f64,
}

impl Net {
    pub fn pins(&self) -> impl Iterator<Item = BlockId> + '_ {
        std::iter::once(self.driver.block).chain(self.sinks.iter().map(|s| s.block))
    }

    pub fn num_pins(&self) -> usize {
        1 + self.sinks.len()
    }
}

/// One driver → sink arc of a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connection {
    pub net: NetId,
    pub driver: BlockId,
    pub sink: BlockId,
}

/// A validated netlist with precomputed incidence.
#[derive(Debug, Clone)]
pub struct Netlist {
    blocks: Vec<Block>,
    nets: Vec<Net>,
    connections: Vec<Connection>,
    net_conn_start: Vec<usize>,
    block_nets: Vec<Vec<NetId>>,
    block_out_conns: Vec<Vec<ConnId>>,
    block_in_conns: Vec<Vec<ConnId>>,
    topo_order: Vec<BlockId>,
    by_name: HashMap<String, BlockId>,
}

impl Netlist {
    /// Validates the blocks and nets and builds the incidence views.
    pub fn new(blocks: Vec<Block>, nets: Vec<Net>) -> Result<Self> {
        let mut by_name = HashMap::with_capacity(blocks.len());
        for (i, b) in blocks.iter().enumerate() {
            if b.id.0 != i {
                return Err(Error::InvalidNetlist(format!(
                    "block `{}` has id {} at position {i}",
                    b.name, b.id.0
                )));
            }
            if by_name.insert(b.name.clone(), b.id).is_some() {
                return Err(Error::InvalidNetlist(format!("duplicate block name `{}`", b.name)));
            }
        }
        let nblk = blocks.len();
        let mut net_names = HashSet::with_capacity(nets.len());
        for (i, n) in nets.iter().enumerate() {
            if n.id.0 != i {
                return Err(Error::InvalidNetlist(format!("net `{}` has id {} at position {i}", n.name, n.id.0)));
            }
            if !net_names.insert(n.name.as_str()) {
                return Err(Error::InvalidNetlist(format!("duplicate net name `{}`", n.name)));
            }
            if n.sinks.is_empty() {
                return Err(Error::InvalidNetlist(format!("net `{}` has no sinks", n.name)));
            }
            if !(n.weight >= 0.0 && n.weight.is_finite()) {
                return Err(Error::InvalidNetlist(format!("net `{}` has invalid weight {}", n.name, n.weight)));
            }
            for p in n.pins() {
                if p.0 >= nblk {
                    return Err(Error::DanglingReference(format!("#{}", p.0)));
                }
            }
            let mut seen = HashSet::with_capacity(n.sinks.len());
            for s in &n.sinks {
                if !seen.insert(*s) {
                    return Err(Error::InvalidNetlist(format!(
                        "net `{}` lists sink {}.{} twice",
                        n.name, blocks[s.block.0].name, s.pin
                    )));
                }
            }
        }

        let mut connections = Vec::new();
        let mut net_conn_start = Vec::with_capacity(nets.len() + 1);
        let mut block_nets: Vec<Vec<NetId>> = vec![Vec::new(); nblk];
        let mut block_out_conns: Vec<Vec<ConnId>> = vec![Vec::new(); nblk];
        let mut block_in_conns: Vec<Vec<ConnId>> = vec![Vec::new(); nblk];
        for n in &nets {
            net_conn_start.push(connections.len());
            for s in &n.sinks {
                let c = ConnId(connections.len());
                connections.push(Connection {
                    net: n.id,
                    driver: n.driver.block,
                    sink: s.block,
                });
                block_out_conns[n.driver.block.0].push(c);
                block_in_conns[s.block.0].push(c);
            }
            for b in n.pins() {
                let list = &mut block_nets[b.0];
                if list.last() != Some(&n.id) && !list.contains(&n.id) {
                    list.push(n.id);
                }
            }
        }
        net_conn_start.push(connections.len());

        let mut nl = Netlist {
            blocks,
            nets,
            connections,
            net_conn_start,
            block_nets,
            block_out_conns,
            block_in_conns,
            topo_order: Vec::new(),
            by_name,
        };
        nl.topo_order = nl.compute_topo_order()?;
        Ok(nl)
    }

    /// Kahn's algorithm over combinational arcs; boundary blocks have no
    /// combinational input dependence.
    fn compute_topo_order(&self) -> Result<Vec<BlockId>> {
        let n = self.blocks.len();
        let mut indeg = vec![0usize; n];
        for c in &self.connections {
            if !self.blocks[c.sink.0].is_timing_boundary() {
                indeg[c.sink.0] += 1;
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<usize> = (0..n).rev().filter(|&b| indeg[b] == 0).collect();
        while let Some(b) = stack.pop() {
            order.push(BlockId(b));
            for &c in &self.block_out_conns[b] {
                let s = self.connections[c.0].sink.0;
                if self.blocks[s].is_timing_boundary() {
                    continue;
                }
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    stack.push(s);
                }
            }
        }
        if order.len() != n {
            let culprit = (0..n).find(|&b| indeg[b] > 0).unwrap_or(0);
            return Err(Error::CombinationalCycle(self.blocks[culprit].name.clone()));
        }
        Ok(order)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.0]
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.0]
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn connection(&self, id: ConnId) -> &Connection {
        &self.connections[id.0]
    }

    /// Connection ids of a net, in sink order.
    pub fn net_connections(&self, id: NetId) -> std::ops::Range<usize> {
        self.net_conn_start[id.0]..self.net_conn_start[id.0 + 1]
    }

    /// Distinct nets touching a block.
    pub fn block_nets(&self, id: BlockId) -> &[NetId] {
        &self.block_nets[id.0]
    }

    pub fn fanout_connections(&self, id: BlockId) -> &[ConnId] {
        &self.block_out_conns[id.0]
    }

    pub fn fanin_connections(&self, id: BlockId) -> &[ConnId] {
        &self.block_in_conns[id.0]
    }

    /// Blocks ordered so that every combinational arc goes forward.
    pub fn topo_order(&self) -> &[BlockId] {
        &self.topo_order
    }

    pub fn find_block(&self, name: &str) -> Option<BlockId> {
        self.by_name.get(name).copied()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Non-fixed blocks.
    pub fn num_movable(&self) -> usize {
        self.blocks.iter().filter(|b| !b.fixed).count()
    }

    pub fn count_kind(&self, kind: BlockKind) -> usize {
        self.blocks.iter().filter(|b| b.kind == kind).count()
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut blocks: Vec<Block> = Vec::new();
        let mut names: HashMap<String, BlockId> = HashMap::new();
        // (line, name, driver, sinks, weight); resolved after all blocks are known
        let mut raw_nets: Vec<RawNet> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            match toks.next() {
                Some("block") => {
                    let name = toks.next().ok_or_else(|| perr(lineno, "missing block name".into()))?;
                    let kind: BlockKind = toks
                        .next()
                        .ok_or_else(|| perr(lineno, "missing block kind".into()))?
                        .parse()
                        .map_err(|e| perr(lineno, e))?;
                    let (mut fixed, mut seq) = (false, false);
                    for flag in toks {
                        match flag {
                            "fixed" => fixed = true,
                            "seq" => seq = true,
                            other => return Err(perr(lineno, format!("unknown block flag `{other}`"))),
                        }
                    }
                    let id = BlockId(blocks.len());
                    if names.insert(name.to_string(), id).is_some() {
                        return Err(perr(lineno, format!("duplicate block name `{name}`")));
                    }
                    blocks.push(Block {
                        id,
                        name: name.to_string(),
                        kind,
                        fixed,
                        seq,
                    });
                }
                Some("net") => {
                    let rest = line["net".len()..].trim();
                    let (name, rest) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr(lineno, "missing net body".into()))?;
                    let (lhs, rhs) = rest
                        .split_once("->")
                        .ok_or_else(|| perr(lineno, "expected `->` in net".into()))?;
                    let driver = parse_pin(lhs.trim()).map_err(|e| perr(lineno, e))?;
                    let mut weight = 1.0;
                    let mut sinks = Vec::new();
                    let mut rhs = rhs.trim();
                    if let Some(pos) = rhs.find("weight=") {
                        let w = rhs[pos + "weight=".len()..].trim();
                        weight = w
                            .parse::<f64>()
                            .map_err(|_| perr(lineno, format!("bad weight `{w}`")))?;
                        if !(weight >= 0.0 && weight.is_finite()) {
                            return Err(perr(lineno, format!("weight must be finite and >= 0, got {w}")));
                        }
                        rhs = rhs[..pos].trim();
                    }
                    for s in rhs.split(',') {
                        let s = s.trim();
                        if s.is_empty() {
                            continue;
                        }
                        sinks.push(parse_pin(s).map_err(|e| perr(lineno, e))?);
                    }
                    if sinks.is_empty() {
                        return Err(perr(lineno, format!("net `{name}` has no sinks")));
                    }
                    raw_nets.push((lineno, name.to_string(), driver, sinks, weight));
                }
                Some(other) => return Err(perr(lineno, format!("unknown statement `{other}`"))),
                None => unreachable!(),
            }
        }

        let resolve = |lineno: usize, (name, pin): &(String, u32)| -> Result<PinRef> {
            names
                .get(name)
                .map(|&block| PinRef { block, pin: *pin })
                .ok_or_else(|| perr(lineno, format!("dangling reference to block `{name}`")))
        };
        let mut nets = Vec::with_capacity(raw_nets.len());
        for (lineno, name, driver, sinks, weight) in &raw_nets {
            nets.push(Net {
                id: NetId(nets.len()),
                name: name.clone(),
                driver: resolve(*lineno, driver)?,
                sinks: sinks.iter().map(|s| resolve(*lineno, s)).collect::<Result<_>>()?,
                weight: *weight,
            });
        }
        Netlist::new(blocks, nets)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let _ = write!(out, "block {} {}", b.name, b.kind);
            if b.fixed {
                out.push_str(" fixed");
            }
            if b.seq {
                out.push_str(" seq");
            }
            out.push('\n');
        }
        for n in &self.nets {
            let _ = write!(out, "net {} {}.{} ->", n.name, self.blocks[n.driver.block.0].name, n.driver.pin);
            for (i, s) in n.sinks.iter().enumerate() {
                let sep = if i == 0 { " " } else { ", " };
                let _ = write!(out, "{sep}{}.{}", self.blocks[s.block.0].name, s.pin);
            }
            if n.weight != 1.0 {
                let _ = write!(out, " weight={}", n.weight);
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// (line, name, driver, sinks, weight) before block names are resolved.
type RawNet = (usize, String, (String, u32), Vec<(String, u32)>, f64);

fn parse_pin(s: &str) -> std::result::Result<(String, u32), String> {
    let (name, pin) = s.rsplit_once('.').ok_or_else(|| format!("expected <block>.<pin>, got `{s}`"))?;
    let pin = pin.parse::<u32>().map_err(|_| format!("bad pin index in `{s}`"))?;
    if name.is_empty() {
        return Err(format!("empty block name in `{s}`"));
    }
    Ok((name.to_string(), pin))
}

pub fn load_netlist(path: impl AsRef<Path>) -> Result<Netlist> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Netlist::parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Netlist> {
        Netlist::parse(s, Path::new("test.net"))
    }

    #[test]
    fn smallest_legal_netlist() {
        let nl = parse("block a io\nblock b clb\nnet n a.0 -> b.0\n").unwrap();
        assert_eq!(nl.num_blocks(), 2);
        assert_eq!(nl.nets().len(), 1);
        assert_eq!(nl.connections().len(), 1);
        assert_eq!(nl.nets()[0].weight, 1.0);
    }

    #[test]
    fn dangling_reference_is_reported() {
        let err = parse("block a io\nblock b clb\nnet n a.0 -> b9.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dangling reference"), "{msg}");
        assert!(msg.contains(":3:"), "line number missing: {msg}");
    }

    #[test]
    fn combinational_cycle_rejected() {
        let text = "block a clb\nblock b clb\nnet n1 a.0 -> b.0\nnet n2 b.0 -> a.0\n";
        assert!(matches!(parse(text), Err(Error::CombinationalCycle(_))));
        // a register in the loop breaks it
        let text = "block a clb seq\nblock b clb\nnet n1 a.0 -> b.0\nnet n2 b.0 -> a.0\n";
        assert!(parse(text).is_ok());
    }

    #[test]
    fn duplicate_sink_and_names() {
        assert!(parse("block a io\nblock b clb\nnet n a.0 -> b.0, b.0\n").is_err());
        assert!(parse("block a io\nblock a clb\n").is_err());
        assert!(parse("block a io\nblock b clb\nnet n a.0 -> b.0 weight=-1\n").is_err());
    }

    #[test]
    fn weights_flags_and_comments() {
        let text = "# header\nblock a io fixed\nblock b clb seq  # reg\nblock c dsp\n\
                    net n a.0 -> b.0, c.1 weight=2.5\n";
        let nl = parse(text).unwrap();
        assert!(nl.block(BlockId(0)).fixed);
        assert!(nl.block(BlockId(1)).seq);
        assert_eq!(nl.net(NetId(0)).weight, 2.5);
        assert_eq!(nl.connections().len(), 2);
        assert_eq!(nl.num_movable(), 2);
        let again = parse(&nl.to_text()).unwrap();
        assert_eq!(again.to_text(), nl.to_text());
    }
}
