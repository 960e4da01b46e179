//! CSV snapshots and their metadata sidecars.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::harness::config::CaseConfig;
use crate::state::FlowState;
use crate::timeint::StepRecord;

pub const HEADER: &str = "x,y,h,hu,hv,hC,zb,eta";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub x: f64,
    pub y: f64,
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
    pub hc: f64,
    pub zb: f64,
    pub eta: f64,
}

impl Record {
    /// Column by header name.
    pub fn field(&self, name: &str) -> Option<f64> {
        Some(match name {
            "x" => self.x,
            "y" => self.y,
            "h" => self.h,
            "hu" => self.hu,
            "hv" => self.hv,
            "hC" => self.hc,
            "zb" => self.zb,
            "eta" => self.eta,
            _ => return None,
        })
    }
}

/// Parsed snapshot, records in file order (row-major over `(k, i)`).
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub records: Vec<Record>,
}

impl Snapshot {
    /// Splits the records into rows of constant `y`.
    pub fn rows(&self) -> Vec<&[Record]> {
        let mut out = Vec::new();
        let mut start = 0;
        for n in 1..=self.records.len() {
            if n == self.records.len() || self.records[n].y != self.records[start].y {
                out.push(&self.records[start..n]);
                start = n;
            }
        }
        out
    }
}

/// Formats the interior of `state` as CSV text.
pub fn snapshot_csv(state: &FlowState) -> String {
    let g = state.grid();
    let mut s = String::with_capacity(g.interior_cells() * 8 * 25 + HEADER.len() + 1);
    s.push_str(HEADER);
    s.push('\n');
    for k in 0..g.ny as isize {
        for i in 0..g.nx as isize {
            let (x, y) = g.center(i, k);
            let w = state.get(i, k);
            let eta = w.h + w.zb;
            let _ = writeln!(
                s,
                "{x:.16e},{y:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{eta:.16e}",
                w.h, w.hu, w.hv, w.hc, w.zb
            );
        }
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| SolverError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| SolverError::io(path, e))
}

pub fn write_snapshot(state: &FlowState, path: &Path) -> Result<()> {
    write_file(path, &snapshot_csv(state))
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => {
            return Err(SolverError::config(
                "snapshot",
                format!(
                    "expected header `{HEADER}`, found {:?}",
                    other.unwrap_or("")
                ),
            ))
        }
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| SolverError::config("snapshot", format!("line {}: {e}", n + 2)))?;
        let [x, y, h, hu, hv, hc, zb, eta] = vals[..] else {
            return Err(SolverError::config(
                "snapshot",
                format!("line {}: expected 8 columns, found {}", n + 2, vals.len()),
            ));
        };
        records.push(Record {
            x,
            y,
            h,
            hu,
            hv,
            hc,
            zb,
            eta,
        });
    }
    Ok(Snapshot { records })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|e| SolverError::io(path, e))?;
    parse_snapshot(&text)
}

/// Sidecar written next to each snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub time: f64,
    pub steps: usize,
    pub min_h: f64,
    pub energy: f64,
    pub config: CaseConfig,
    pub step_log: Vec<StepRecord>,
}

/// `foo.csv` -> `foo.meta.toml`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.toml")
}

pub fn write_meta(meta: &SnapshotMeta, csv: &Path) -> Result<()> {
    let text = toml::to_string(meta)
        .map_err(|e| SolverError::Contract(format!("cannot serialize metadata: {e}")))?;
    write_file(&meta_path(csv), &text)
}

pub fn read_meta(csv: &Path) -> Result<SnapshotMeta> {
    let path = meta_path(csv);
    let text = fs::read_to_string(&path).map_err(|e| SolverError::io(&path, e))?;
    toml::from_str(&text).map_err(|e| SolverError::config("metadata", e.message().to_string()))
}

/// File name of the snapshot of `case` at time `t`.
pub fn snapshot_name(case: &str, t: f64) -> String {
    format!("{case}_t{t:.4}.csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid2D, GHOST_WIDTH};
    use crate::physics::ConservedState;

    #[test]
    fn single_cell_has_two_lines() {
        let g = Grid2D::new([0.0, 1.0, 0.0, 1.0], 1, 1, GHOST_WIDTH).unwrap();
        let s = FlowState::from_fn(&g, |_, _| ConservedState::new(1.0, 0.0, 0.0, 0.0, 0.5));
        let text = snapshot_csv(&s);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next(), Some(HEADER));
    }

    #[test]
    fn round_trip_is_bitwise() {
        let g = Grid2D::new([-1.0, 1.0, 0.0, 0.3], 7, 3, GHOST_WIDTH).unwrap();
        let s = FlowState::from_fn(&g, |x, y| {
            ConservedState::new(
                (x * 3.1).sin() + 2.0,
                x / 3.0,
                y * 1e-9,
                1.0 / 7.0,
                -y.exp(),
            )
        });
        let snap = parse_snapshot(&snapshot_csv(&s)).unwrap();
        assert_eq!(snap.records.len(), 21);
        assert_eq!(snap.rows().len(), 3);
        for (n, r) in snap.records.iter().enumerate() {
            let w = s.get((n % 7) as isize, (n / 7) as isize);
            assert_eq!((r.h, r.hu, r.hv, r.hc, r.zb), (w.h, w.hu, w.hv, w.hc, w.zb));
            assert_eq!(r.eta, r.h + r.zb);
        }
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(parse_snapshot("a,b\n1,2").is_err());
        assert!(parse_snapshot(&format!("{HEADER}\n1,2,3")).is_err());
        assert!(parse_snapshot(&format!("{HEADER}\n1,2,3,4,5,6,7,x")).is_err());
    }
}
