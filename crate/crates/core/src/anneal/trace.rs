//! Per-temperature-step run trace, stored as TSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "# runtrace v1";
const COLUMNS: [&str; 9] = ["step", "T", "alpha", "w", "zeta", "theta", "c_bb", "c_timing", "d_max"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub temperature: f64,
    pub alpha: f64,
    pub w: f64,
    pub zeta: f64,
    pub theta: f64,
    pub c_bb: f64,
    pub c_timing: f64,
    pub d_max: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    /// Floats are written with `{:?}` so they parse back bit-exactly.
    pub fn to_tsv(&self) -> String {
        let mut s = format!("{TRACE_HEADER}\n{}\n", COLUMNS.join("\t"));
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}\t{:?}",
                r.step, r.temperature, r.alpha, r.w, r.zeta, r.theta, r.c_bb, r.c_timing, r.d_max
            );
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TRACE_HEADER => {}
            _ => return Err(perr(1, format!("missing `{TRACE_HEADER}` header"))),
        }
        match lines.next() {
            Some((_, h)) if h.split('\t').eq(COLUMNS) => {}
            _ => return Err(perr(2, "unexpected column header".into())),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != COLUMNS.len() {
                return Err(perr(i + 1, format!("expected {} fields, got {}", COLUMNS.len(), f.len())));
            }
            let num = |k: usize| -> Result<f64> {
                f[k].parse::<f64>()
                    .map_err(|_| perr(i + 1, format!("bad number `{}` in column {}", f[k], COLUMNS[k])))
            };
            rows.push(TraceRow {
                step: f[0].parse().map_err(|_| perr(i + 1, format!("bad step `{}`", f[0])))?,
                temperature: num(1)?,
                alpha: num(2)?,
                w: num(3)?,
                zeta: num(4)?,
                theta: num(5)?,
                c_bb: num(6)?,
                c_timing: num(7)?,
                d_max: num(8)?,
            });
        }
        Ok(RunTrace { rows })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}
