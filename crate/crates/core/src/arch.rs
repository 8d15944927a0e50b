//! Two-layer fabric generation and the routing-resource graph abstraction.
//!
//! Every tile on every layer carries three routing nodes: an output pin
//! (`Opin`), a channel (`Chan`) and an input pin (`Ipin`). Intra-layer edges
//! are `Opin → Chan` (d_co), `Chan → Ipin` (d_ci) and `Chan ↔ Chan` between
//! 4-neighbours (d_h). The vertical-connectivity style decides which extra
//! edges cross layers at vertical-capable tiles.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::BlockKind;
use crate::placement::Loc;

/// Vertical-connectivity style of the fabric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Style {
    /// Output and input pins cross layers.
    #[serde(rename = "cb")]
    Cb,
    /// Output pins drive the other layer's channel.
    #[serde(rename = "cb-o")]
    CbO,
    /// The channel drives the other layer's input pins.
    #[serde(rename = "cb-i")]
    CbI,
    /// Channel-to-channel links through the switch box.
    #[serde(rename = "sb")]
    Sb,
    #[serde(rename = "hybrid")]
    Hybrid,
    #[serde(rename = "hybrid-o")]
    HybridO,
    #[serde(rename = "hybrid-i")]
    HybridI,
}

impl Style {
    pub const ALL: [Style; 7] = [
        Style::Cb,
        Style::CbO,
        Style::CbI,
        Style::Sb,
        Style::Hybrid,
        Style::HybridO,
        Style::HybridI,
    ];

    fn has_output_links(self) -> bool {
        matches!(self, Style::Cb | Style::CbO | Style::Hybrid | Style::HybridO)
    }

    fn has_input_links(self) -> bool {
        matches!(self, Style::Cb | Style::CbI | Style::Hybrid | Style::HybridI)
    }

    fn has_switch_links(self) -> bool {
        matches!(self, Style::Sb | Style::Hybrid | Style::HybridO | Style::HybridI)
    }

    /// The hybrid style extending a pin-based style with switch-box links.
    pub fn hybrid_of(self) -> Option<Style> {
        match self {
            Style::Cb => Some(Style::Hybrid),
            Style::CbO => Some(Style::HybridO),
            Style::CbI => Some(Style::HybridI),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Style::Cb => "cb",
            Style::CbO => "cb-o",
            Style::CbI => "cb-i",
            Style::Sb => "sb",
            Style::Hybrid => "hybrid",
            Style::HybridO => "hybrid-o",
            Style::HybridI => "hybrid-i",
        }
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Style {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Style::ALL
            .into_iter()
            .find(|st| st.as_str() == norm)
            .ok_or_else(|| Error::InvalidArch(format!("unknown style `{s}`")))
    }
}

/// Declarative fabric description.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchSpec {
    pub width: usize,
    pub height: usize,
    pub layers: usize,
    pub style: Style,
    /// Channel hop delay between neighbouring tiles.
    pub d_h: f64,
    /// Inter-layer hop delay.
    pub d_v: f64,
    /// Output pin → channel.
    pub d_co: f64,
    /// Channel → input pin.
    pub d_ci: f64,
    /// Tiles with `(x + y * width) % v_period == 0` carry vertical links.
    pub v_period: usize,
    /// Repeating kind pattern for interior columns.
    pub column_pattern: Vec<BlockKind>,
}

/// Interior column pattern: six CLB columns for each DSP and BRAM column.
pub const DEFAULT_COLUMN_PATTERN: [BlockKind; 8] = [
    BlockKind::Clb,
    BlockKind::Dsp,
    BlockKind::Clb,
    BlockKind::Clb,
    BlockKind::Clb,
    BlockKind::Bram,
    BlockKind::Clb,
    BlockKind::Clb,
];

/// TSV-like vertical delay relative to `d_h`.
pub const TSV_DV_FACTOR: f64 = 3.0;
/// Monolithic-via-like vertical delay relative to `d_h`.
pub const MIV_DV_FACTOR: f64 = 0.3;

impl ArchSpec {
    pub fn new(width: usize, height: usize, style: Style) -> Self {
        ArchSpec {
            width,
            height,
            layers: 2,
            style,
            d_h: 1.0,
            d_v: TSV_DV_FACTOR,
            d_co: 0.5,
            d_ci: 0.5,
            v_period: 1,
            column_pattern: DEFAULT_COLUMN_PATTERN.to_vec(),
        }
    }

    pub fn with_style(mut self, style: Style) -> Self {
        self.style = style;
        self
    }

    pub fn with_delays(mut self, d_h: f64, d_v: f64, d_co: f64, d_ci: f64) -> Self {
        self.d_h = d_h;
        self.d_v = d_v;
        self.d_co = d_co;
        self.d_ci = d_ci;
        self
    }

    pub fn with_v_period(mut self, v_period: usize) -> Self {
        self.v_period = v_period;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers != 2 {
            return Err(Error::InvalidArch(format!("only 2-layer fabrics are supported, got {}", self.layers)));
        }
        for (name, d) in [("d_h", self.d_h), ("d_v", self.d_v), ("d_co", self.d_co), ("d_ci", self.d_ci)] {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::InvalidArch(format!("{name} must be finite and >= 0, got {d}")));
            }
        }
        if self.v_period == 0 {
            return Err(Error::InvalidArch("v_period must be >= 1".into()));
        }
        if self.column_pattern.is_empty() || self.column_pattern.contains(&BlockKind::Io) {
            return Err(Error::InvalidArch("column pattern must be non-empty and exclude io".into()));
        }
        if self.width < 3 || self.height < 3 {
            return Err(Error::InvalidArch(format!("grid too small: {}x{} has no interior", self.width, self.height)));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ArchFile = toml::from_str(text).map_err(|e| Error::InvalidArch(e.to_string()))?;
        let pattern = match &file.grid.column_pattern {
            Some(p) => parse_pattern(p)?,
            None => DEFAULT_COLUMN_PATTERN.to_vec(),
        };
        let spec = ArchSpec {
            width: file.grid.width,
            height: file.grid.height,
            layers: file.grid.layers.unwrap_or(2),
            style: file.style.style,
            d_h: file.delays.d_h,
            d_v: file.delays.d_v,
            d_co: file.delays.d_co,
            d_ci: file.delays.d_ci,
            v_period: file.style.v_period.unwrap_or(1),
            column_pattern: pattern,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        let file = ArchFile {
            grid: GridSection {
                width: self.width,
                height: self.height,
                layers: Some(self.layers),
                column_pattern: Some(self.column_pattern.iter().map(|k| pattern_char(*k)).collect()),
            },
            delays: DelaySection {
                d_h: self.d_h,
                d_v: self.d_v,
                d_co: self.d_co,
                d_ci: self.d_ci,
            },
            style: StyleSection {
                style: self.style,
                v_period: Some(self.v_period),
            },
        };
        toml::to_string(&file).expect("arch spec serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchFile {
    grid: GridSection,
    delays: DelaySection,
    style: StyleSection,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    width: usize,
    height: usize,
    layers: Option<usize>,
    /// One letter per interior column: `C`lb, `D`sp, `B`ram.
    column_pattern: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DelaySection {
    d_h: f64,
    d_v: f64,
    d_co: f64,
    d_ci: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StyleSection {
    style: Style,
    v_period: Option<usize>,
}

fn pattern_char(k: BlockKind) -> char {
    match k {
        BlockKind::Clb => 'C',
        BlockKind::Dsp => 'D',
        BlockKind::Bram => 'B',
        BlockKind::Io => 'I',
    }
}

fn parse_pattern(p: &str) -> Result<Vec<BlockKind>> {
    p.chars()
        .map(|c| match c.to_ascii_uppercase() {
            'C' => Ok(BlockKind::Clb),
            'D' => Ok(BlockKind::Dsp),
            'B' => Ok(BlockKind::Bram),
            other => Err(Error::InvalidArch(format!("bad column pattern letter `{other}`"))),
        })
        .collect()
}

/// Columns of one kind and, per column, the rows of that kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KindGrid {
    pub columns: Vec<usize>,
    pub rows: Vec<Vec<usize>>,
}

/// The generated fabric. Layers share one tile layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Fabric {
    width: usize,
    height: usize,
    layers: usize,
    tiles: Vec<Option<BlockKind>>,
    vertical: Vec<bool>,
    kind_grids: [KindGrid; 4],
    kind_sites: [Vec<(usize, usize)>; 4],
}

impl Fabric {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Kind of the tile at (x, y); `None` for the empty corners.
    pub fn tile_kind(&self, x: usize, y: usize) -> Option<BlockKind> {
        self.tiles[y * self.width + x]
    }

    pub fn is_vertical(&self, x: usize, y: usize) -> bool {
        self.vertical[y * self.width + x]
    }

    pub fn in_bounds(&self, loc: Loc) -> bool {
        loc.layer < self.layers && loc.x < self.width && loc.y < self.height
    }

    pub fn is_periphery(&self, x: usize, y: usize) -> bool {
        x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height
    }

    /// Sites of one kind on a single layer.
    pub fn capacity(&self, kind: BlockKind) -> usize {
        self.kind_sites[kind.index()].len()
    }

    /// (x, y) sites of one kind, row-major.
    pub fn sites(&self, kind: BlockKind) -> &[(usize, usize)] {
        &self.kind_sites[kind.index()]
    }

    pub fn kind_grid(&self, kind: BlockKind) -> &KindGrid {
        &self.kind_grids[kind.index()]
    }
}

/// Builds the tile grid: IO ring on the periphery (corners empty), interior
/// columns from the repeating pattern, vertical capability by modular spacing.
pub fn build_fabric(spec: &ArchSpec) -> Result<Fabric> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut tiles = vec![None; w * h];
    for y in 0..h {
        for x in 0..w {
            let corner = (x == 0 || x + 1 == w) && (y == 0 || y + 1 == h);
            let kind = if corner {
                None
            } else if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                Some(BlockKind::Io)
            } else {
                Some(spec.column_pattern[(x - 1) % spec.column_pattern.len()])
            };
            tiles[y * w + x] = kind;
        }
    }
    let vertical = (0..w * h).map(|i| i % spec.v_period == 0).collect();

    let mut kind_sites: [Vec<(usize, usize)>; 4] = Default::default();
    let mut kind_grids: [KindGrid; 4] = Default::default();
    for x in 0..w {
        for y in 0..h {
            if let Some(k) = tiles[y * w + x] {
                let g = &mut kind_grids[k.index()];
                if g.columns.last() != Some(&x) {
                    g.columns.push(x);
                    g.rows.push(Vec::new());
                }
                g.rows.last_mut().unwrap().push(y);
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            if let Some(k) = tiles[y * w + x] {
                kind_sites[k.index()].push((x, y));
            }
        }
    }
    Ok(Fabric {
        width: w,
        height: h,
        layers: spec.layers,
        tiles,
        vertical,
        kind_grids,
        kind_sites,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Opin,
    Chan,
    Ipin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RrNode {
    pub layer: usize,
    pub x: usize,
    pub y: usize,
    pub class: NodeClass,
}

/// Which delay family an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Opin → Chan or Chan → Ipin on one layer.
    Pin,
    /// Chan → Chan between neighbouring tiles on one layer.
    Channel,
    /// Any edge crossing layers.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrEdge {
    pub from: RrNode,
    pub to: RrNode,
    pub delay: f64,
    pub class: EdgeClass,
}

/// Vertical edges emitted by the style at every vertical-capable tile.
pub fn vertical_edges(spec: &ArchSpec, fabric: &Fabric) -> Vec<RrEdge> {
    let mut out = Vec::new();
    let node = |layer, x, y, class| RrNode { layer, x, y, class };
    for y in 0..fabric.height() {
        for x in 0..fabric.width() {
            if !fabric.is_vertical(x, y) {
                continue;
            }
            for l in 0..fabric.layers() {
                for lp in 0..fabric.layers() {
                    if l == lp {
                        continue;
                    }
                    let mut push = |from, to| {
                        out.push(RrEdge {
                            from,
                            to,
                            delay: spec.d_v,
                            class: EdgeClass::Vertical,
                        })
                    };
                    if spec.style.has_output_links() {
                        push(node(l, x, y, NodeClass::Opin), node(lp, x, y, NodeClass::Chan));
                    }
                    if spec.style.has_input_links() {
                        push(node(l, x, y, NodeClass::Chan), node(lp, x, y, NodeClass::Ipin));
                    }
                    if spec.style.has_switch_links() {
                        push(node(l, x, y, NodeClass::Chan), node(lp, x, y, NodeClass::Chan));
                    }
                }
            }
        }
    }
    out
}

/// Every edge of the routing graph: intra-layer edges followed by the
/// style's vertical edges.
pub fn routing_edges(spec: &ArchSpec, fabric: &Fabric) -> Vec<RrEdge> {
    let (w, h) = (fabric.width(), fabric.height());
    let mut out = Vec::new();
    let node = |layer, x, y, class| RrNode { layer, x, y, class };
    for l in 0..fabric.layers() {
        for y in 0..h {
            for x in 0..w {
                out.push(RrEdge {
                    from: node(l, x, y, NodeClass::Opin),
                    to: node(l, x, y, NodeClass::Chan),
                    delay: spec.d_co,
                    class: EdgeClass::Pin,
                });
                out.push(RrEdge {
                    from: node(l, x, y, NodeClass::Chan),
                    to: node(l, x, y, NodeClass::Ipin),
                    delay: spec.d_ci,
                    class: EdgeClass::Pin,
                });
                let mut nbrs = Vec::with_capacity(4);
                if x > 0 {
                    nbrs.push((x - 1, y));
                }
                if x + 1 < w {
                    nbrs.push((x + 1, y));
                }
                if y > 0 {
                    nbrs.push((x, y - 1));
                }
                if y + 1 < h {
                    nbrs.push((x, y + 1));
                }
                for (nx, ny) in nbrs {
                    out.push(RrEdge {
                        from: node(l, x, y, NodeClass::Chan),
                        to: node(l, nx, ny, NodeClass::Chan),
                        delay: spec.d_h,
                        class: EdgeClass::Channel,
                    });
                }
            }
        }
    }
    out.extend(vertical_edges(spec, fabric));
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn edge_set(spec: &ArchSpec) -> BTreeSet<(RrNode, RrNode)> {
        let f = build_fabric(spec).unwrap();
        vertical_edges(spec, &f).into_iter().map(|e| (e.from, e.to)).collect()
    }

    #[test]
    fn default_8x8_layout() {
        let spec = ArchSpec::new(8, 8, Style::Sb);
        let f = build_fabric(&spec).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let k = f.tile_kind(x, y);
                let corner = (x == 0 || x == 7) && (y == 0 || y == 7);
                if corner {
                    assert_eq!(k, None);
                } else if f.is_periphery(x, y) {
                    assert_eq!(k, Some(BlockKind::Io));
                } else {
                    assert_ne!(k, Some(BlockKind::Io));
                }
            }
        }
        assert!(f.capacity(BlockKind::Dsp) >= 6);
        assert!(f.capacity(BlockKind::Bram) >= 6);
        assert_eq!(f.capacity(BlockKind::Io), 24);
        assert_eq!(f.layers(), 2);
    }

    #[test]
    fn too_small_grid_rejected() {
        assert!(build_fabric(&ArchSpec::new(2, 8, Style::Sb)).is_err());
        // a narrow interior just lacks the kinds it has no column for
        let f = build_fabric(&ArchSpec::new(6, 6, Style::Sb)).unwrap();
        assert_eq!(f.capacity(BlockKind::Bram), 0);
        assert!(build_fabric(&ArchSpec::new(8, 8, Style::Sb).with_v_period(0)).is_err());
        let mut spec = ArchSpec::new(8, 8, Style::Sb);
        spec.layers = 3;
        assert!(build_fabric(&spec).is_err());
    }

    #[test]
    fn v_period_one_marks_every_tile() {
        let f = build_fabric(&ArchSpec::new(8, 8, Style::Sb)).unwrap();
        assert!((1..7).all(|x| (1..7).all(|y| f.is_vertical(x, y))));
        let f3 = build_fabric(&ArchSpec::new(8, 8, Style::Sb).with_v_period(3)).unwrap();
        assert!(f3.is_vertical(0, 0) && f3.is_vertical(3, 0) && !f3.is_vertical(1, 0));
        assert!(f3.is_vertical(1, 1)); // 1 + 8 = 9
    }

    #[test]
    fn vertical_edge_counts_per_style() {
        // a single capable tile: v_period larger than the grid leaves only (0,0)
        let base = ArchSpec::new(8, 8, Style::Sb).with_v_period(1000);
        let count = |s: Style| edge_set(&base.clone().with_style(s)).len();
        assert_eq!(count(Style::Sb), 2);
        assert_eq!(count(Style::Cb), 4);
        assert_eq!(count(Style::CbO), 2);
        assert_eq!(count(Style::CbI), 2);
        assert_eq!(count(Style::Hybrid), 6);
    }

    #[test]
    fn hybrid_is_union_and_monotone() {
        let base = ArchSpec::new(9, 7, Style::Sb).with_v_period(2);
        let es = |s: Style| edge_set(&base.clone().with_style(s));
        let sb = es(Style::Sb);
        for x in [Style::Cb, Style::CbO, Style::CbI] {
            let hx = es(x.hybrid_of().unwrap());
            let union: BTreeSet<_> = sb.union(&es(x)).copied().collect();
            assert_eq!(hx, union);
            assert!(es(x).is_subset(&hx));
        }
        assert!(es(Style::CbO).is_subset(&es(Style::Cb)));
        assert!(es(Style::CbI).is_subset(&es(Style::Cb)));
    }

    #[test]
    fn style_changes_edges_not_tiles() {
        let o = ArchSpec::new(8, 8, Style::CbO);
        let i = o.clone().with_style(Style::CbI);
        assert_eq!(build_fabric(&o).unwrap(), build_fabric(&i).unwrap());
        assert_ne!(edge_set(&o), edge_set(&i));
    }

    #[test]
    fn toml_round_trip() {
        let spec = ArchSpec::new(10, 12, Style::HybridO).with_delays(1.0, 0.3, 0.5, 0.25).with_v_period(2);
        let back = ArchSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(back, spec);
        let minimal = "[grid]\nwidth = 8\nheight = 8\n[delays]\nd_h = 1.0\nd_v = 3.0\nd_co = 0.5\nd_ci = 0.5\n\
                       [style]\nstyle = \"cb-i\"\n";
        let s = ArchSpec::from_toml(minimal).unwrap();
        assert_eq!(s.style, Style::CbI);
        assert_eq!(s.v_period, 1);
        assert!(ArchSpec::from_toml("[grid]\nwidth = 8\n").is_err());
    }
}
