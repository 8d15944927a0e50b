//! Timing-driven simulated-annealing placement for two-layer 3D FPGA fabrics.
//!
//! The flow is split into independent stages that can be driven from code
//! (see the crate's `examples/`) or from the `place3d` binary:
//!
//! - [`netlist`] / [`placement`] / [`wirelength`]: the packed netlist, the
//!   block → site mapping with its legality checker, and bounding-box cost.
//! - [`arch`]: fabric generation and the routing-resource graph for each
//!   vertical-connectivity style.
//! - [`lookahead`]: the `[l_src][l_dst][dx][dy]` delay table built by
//!   shortest-path search, in per-edge (exact) or segment-average mode.
//! - [`partition`]: FM bipartitioning for layer assignment and the
//!   criticality-ordered initial placement.
//! - [`timing`]: static timing analysis and the layer-scaled timing cost.
//! - [`anneal`]: the annealer with adaptive timing/3D schedules, the
//!   extended move set and the bandit move selector.
//! - [`harness`]: synthetic benchmarks, sweeps and reports.

pub mod anneal;
pub mod arch;
pub mod error;
pub mod harness;
pub mod lookahead;
pub mod netlist;
pub mod partition;
pub mod placement;
pub mod timing;
pub mod wirelength;

pub use error::{Error, Result};
