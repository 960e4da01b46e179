//! Run configuration: a TOML file with a fixed key set.
//!
//! ```toml
//! case = "dambreak1d"
//! nx = 100
//! cfl = 0.1
//! t_end = 1.0
//! snapshots = [0.5, 0.7, 1.0]
//!
//! [params]
//! n = 0.0
//!
//! [scheme]
//! quadrature = "gauss3"
//! ```
//!
//! Missing keys take the defaults of the selected case. A fully resolved
//! configuration is written next to every snapshot and reads back unchanged.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::grid::{BoundaryKind, BoundarySpec, Grid2D, GHOST_WIDTH};
use crate::physics::PhysParams;
use crate::scheme::SchemeConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    CProperty,
    #[serde(rename = "dambreak1d")]
    Dambreak1d,
    Multigrain,
    Bedmotion,
    #[serde(rename = "riemann2d")]
    Riemann2d,
    Custom,
}

impl CaseKind {
    pub const ALL: [CaseKind; 6] = [
        CaseKind::CProperty,
        CaseKind::Dambreak1d,
        CaseKind::Multigrain,
        CaseKind::Bedmotion,
        CaseKind::Riemann2d,
        CaseKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::CProperty => "c-property",
            CaseKind::Dambreak1d => "dambreak1d",
            CaseKind::Multigrain => "multigrain",
            CaseKind::Bedmotion => "bedmotion",
            CaseKind::Riemann2d => "riemann2d",
            CaseKind::Custom => "custom",
        }
    }

    /// One-dimensional cases run on a single row of cells.
    pub fn is_1d(self) -> bool {
        matches!(self, CaseKind::Dambreak1d | CaseKind::Multigrain)
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseKind {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        CaseKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = CaseKind::ALL.iter().map(|c| c.name()).collect();
                SolverError::config(
                    "case",
                    format!("unknown case `{s}`, expected one of {}", names.join(", ")),
                )
            })
    }
}

/// One side of the `custom` two-state initial condition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveState {
    pub h: f64,
    pub u: f64,
    pub v: f64,
    pub c: f64,
    pub zb: f64,
}

/// Case-specific knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseOptions {
    /// Amplitude of the concentration blob of the c-property case.
    pub c_blob: f64,
    /// Grain diameters swept by the multigrain case.
    pub d50_sweep: Vec<f64>,
    /// Uniform initial concentration (bedmotion, riemann2d).
    pub c0: f64,
    /// `custom`: state for `x <= x_split` and for `x > x_split`.
    pub x_split: f64,
    pub left: PrimitiveState,
    pub right: PrimitiveState,
}

impl Default for CaseOptions {
    fn default() -> Self {
        let still = PrimitiveState {
            h: 1.0,
            ..Default::default()
        };
        CaseOptions {
            c_blob: 0.7,
            d50_sweep: vec![0.002, 0.0032, 0.008, 0.02],
            c0: 0.0,
            x_split: 0.0,
            left: still,
            right: still,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub case: CaseKind,
    /// `[x_min, x_max, y_min, y_max]`.
    pub domain: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub max_steps: usize,
    pub output_dir: Option<PathBuf>,
    pub data_file: Option<PathBuf>,
    pub boundary: BoundarySpec,
    pub params: PhysParams,
    pub scheme: SchemeConfig,
    pub options: CaseOptions,
}

impl CaseConfig {
    /// Defaults of a built-in case. `riemann2d` has no default final time and
    /// gets `NaN`, which fails validation until one is supplied.
    pub fn defaults(case: CaseKind) -> Self {
        let mut cfg = CaseConfig {
            case,
            domain: [0.0, 1.0, 0.0, 1.0],
            nx: 100,
            ny: 100,
            cfl: 0.5,
            t_end: 1.0,
            snapshots: Vec::new(),
            max_steps: 10_000_000,
            output_dir: None,
            data_file: None,
            boundary: BoundarySpec::uniform(BoundaryKind::Outflow),
            params: PhysParams::default(),
            scheme: SchemeConfig::default(),
            options: CaseOptions::default(),
        };
        match case {
            CaseKind::CProperty => {
                cfg.scheme.exchange = false;
            }
            CaseKind::Dambreak1d => {
                cfg.domain = [-1.25, 1.25, 0.0, 1.0];
                cfg.ny = 1;
                cfg.cfl = 0.1;
                cfg.snapshots = vec![0.5, 0.7, 1.0];
                cfg.params.d50 = 0.0032;
                cfg.params.rho_s = 1540.0;
                cfg.scheme.exchange = false;
            }
            CaseKind::Multigrain => {
                cfg.domain = [-1.25, 1.25, 0.0, 1.0];
                cfg.ny = 1;
                cfg.cfl = 0.1;
                cfg.t_end = 0.25;
                cfg.snapshots = vec![0.25];
            }
            CaseKind::Bedmotion => {
                cfg.t_end = 0.3;
                cfg.snapshots = vec![0.3];
                cfg.options.c0 = 0.01;
            }
            CaseKind::Riemann2d => {
                cfg.domain = [-1.0, 1.0, -1.0, 1.0];
                cfg.t_end = f64::NAN;
                cfg.options.c0 = 0.001;
            }
            CaseKind::Custom => {
                cfg.domain = [-1.0, 1.0, 0.0, 1.0];
                cfg.ny = 1;
            }
        }
        cfg
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.domain, self.nx, self.ny, GHOST_WIDTH)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SolverError::config(
                "cfl",
                format!("{} is outside (0, 1]", self.cfl),
            ));
        }
        if self.t_end.is_nan() {
            return Err(SolverError::config(
                "t_end",
                format!("required for case {}", self.case),
            ));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::config(
                "t_end",
                format!("{} must be finite and non-negative", self.t_end),
            ));
        }
        if let Some(&s) = self
            .snapshots
            .iter()
            .find(|&&s| !(s > 0.0 && s <= self.t_end))
        {
            return Err(SolverError::config(
                "snapshots",
                format!("time {s} is outside (0, t_end = {}]", self.t_end),
            ));
        }
        if self.snapshots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SolverError::config(
                "snapshots",
                "times must be strictly increasing",
            ));
        }
        if self.max_steps == 0 {
            return Err(SolverError::config("max_steps", "must be at least 1"));
        }
        self.grid()?;
        self.boundary.validate()?;
        self.params.validate()?;
        let aeno = &self.scheme.aeno;
        if !(aeno.l > 0.0 && aeno.eps > 0.0) {
            return Err(SolverError::config(
                "scheme.aeno",
                "l and eps must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.options.c_blob) {
            return Err(SolverError::config("options.c_blob", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.options.c0) {
            return Err(SolverError::config("options.c0", "must lie in [0, 1]"));
        }
        if self.case == CaseKind::Multigrain && self.options.d50_sweep.iter().any(|&d| !(d > 0.0)) {
            return Err(SolverError::config(
                "options.d50_sweep",
                "diameters must be positive",
            ));
        }
        for (key, s) in [
            ("options.left", &self.options.left),
            ("options.right", &self.options.right),
        ] {
            if !(s.h >= 0.0) || !(0.0..=1.0).contains(&s.c) {
                return Err(SolverError::config(key, "needs h >= 0 and c in [0, 1]"));
            }
        }
        if let Some(path) = &self.data_file {
            if !path.is_file() {
                return Err(SolverError::config(
                    "data_file",
                    format!("{} does not exist", path.display()),
                ));
            }
        }
        Ok(())
    }

    /// Serializes every key.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self)
            .map_err(|e| SolverError::Contract(format!("cannot serialize config: {e}")))
    }
}

/// Top-level keys as written by the user; everything optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    case: Option<String>,
    domain: Option<[f64; 4]>,
    nx: Option<usize>,
    ny: Option<usize>,
    cfl: Option<f64>,
    t_end: Option<f64>,
    snapshots: Option<Vec<f64>>,
    max_steps: Option<usize>,
    output_dir: Option<PathBuf>,
    data_file: Option<PathBuf>,
    boundary: Option<toml::Table>,
    params: Option<toml::Table>,
    scheme: Option<toml::Table>,
    options: Option<toml::Table>,
}

/// Overlays the keys of `table` on `base`, rejecting keys `T` does not have.
fn overlay<T: Serialize + DeserializeOwned>(
    base: &T,
    table: Option<toml::Table>,
    section: &str,
) -> Result<T> {
    let table = table.unwrap_or_default();
    let mut merged =
        toml::Value::try_from(base).map_err(|e| SolverError::Contract(e.to_string()))?;
    merge_tables(&mut merged, toml::Value::Table(table));
    merged
        .try_into()
        .map_err(|e: toml::de::Error| SolverError::config(section, e.message().to_string()))
}

fn merge_tables(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot @ toml::Value::Table(_)) if v.is_table() => merge_tables(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Parses a configuration, using `case` when the text does not name one.
pub fn parse_config(text: &str, case: Option<CaseKind>) -> Result<CaseConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let key = e
            .message()
            .split('`')
            .nth(1)
            .unwrap_or("config")
            .to_string();
        SolverError::config(key, e.message().trim().to_string())
    })?;
    let case = match (&raw.case, case) {
        (Some(name), _) => name.parse()?,
        (None, Some(c)) => c,
        (None, None) => return Err(SolverError::config("case", "no case given")),
    };
    let mut cfg = CaseConfig::defaults(case);
    if let Some(v) = raw.domain {
        cfg.domain = v;
    }
    if let Some(v) = raw.nx {
        cfg.nx = v;
    }
    if let Some(v) = raw.ny {
        cfg.ny = v;
    }
    if let Some(v) = raw.cfl {
        cfg.cfl = v;
    }
    if let Some(v) = raw.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = raw.snapshots {
        cfg.snapshots = v;
    }
    if let Some(v) = raw.max_steps {
        cfg.max_steps = v;
    }
    if raw.output_dir.is_some() {
        cfg.output_dir = raw.output_dir;
    }
    if raw.data_file.is_some() {
        cfg.data_file = raw.data_file;
    }
    cfg.boundary = overlay(&cfg.boundary, raw.boundary, "boundary")?;
    cfg.params = overlay(&cfg.params, raw.params, "params")?;
    cfg.scheme = overlay(&cfg.scheme, raw.scheme, "scheme")?;
    cfg.options = overlay(&cfg.options, raw.options, "options")?;
    Ok(cfg)
}

/// Reads and parses a configuration file. Validation is left to the caller so
/// that command-line overrides can be applied first.
pub fn load_config(path: &Path, case: Option<CaseKind>) -> Result<CaseConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| SolverError::io(path, e))?;
    parse_config(&text, case)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_table_defaults() {
        let cfg = parse_config("", Some(CaseKind::CProperty)).unwrap();
        let p = cfg.params;
        assert_eq!(
            (p.rho_w, p.rho_s, p.phi_e, p.nu, p.p, p.g, p.d50, p.n, p.m),
            (1000.0, 2650.0, 0.015, 0.000012, 0.4, 9.8, 0.001, 0.028, 2.0)
        );
        cfg.validate().unwrap();
    }

    #[test]
    fn cfl_out_of_range_is_rejected() {
        let cfg = parse_config("cfl = 1.5", Some(CaseKind::CProperty)).unwrap();
        match cfg.validate() {
            Err(SolverError::Config { key, .. }) => assert_eq!(key, "cfl"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_named() {
        match parse_config("case = \"c-property\"\nbogus = 1", None) {
            Err(SolverError::Config { key, .. }) => assert_eq!(key, "bogus"),
            other => panic!("{other:?}"),
        }
        match parse_config("case = \"c-property\"\n[params]\nrho = 1.0", None) {
            Err(SolverError::Config { key, reason }) => {
                assert_eq!(key, "params");
                assert!(reason.contains("rho"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_config("case = \"nope\"", None).is_err());
        assert!(parse_config("nx = \"ten\"", Some(CaseKind::CProperty)).is_err());
    }

    #[test]
    fn round_trip() {
        for case in CaseKind::ALL {
            let mut cfg = CaseConfig::defaults(case);
            cfg.t_end = 0.25;
            cfg.snapshots = vec![0.1, 0.25];
            cfg.output_dir = Some("out/x".into());
            cfg.scheme.quadrature = crate::scheme::Quadrature::Gauss3;
            let text = cfg.to_toml().unwrap();
            let back = parse_config(&text, None).unwrap();
            assert_eq!(back, cfg, "{text}");
        }
    }

    #[test]
    fn partial_sections_merge() {
        let cfg = parse_config(
            "case = \"riemann2d\"\nt_end = 0.1\n[boundary]\nleft = \"reflective\"\n[scheme.aeno]\neps = 1e-6",
            None,
        )
        .unwrap();
        assert_eq!(cfg.boundary.left, BoundaryKind::Reflective);
        assert_eq!(cfg.boundary.right, BoundaryKind::Outflow);
        assert_eq!(cfg.scheme.aeno.eps, 1e-6);
        assert_eq!(cfg.scheme.aeno.l, 1.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn riemann_requires_final_time() {
        let cfg = parse_config("", Some(CaseKind::Riemann2d)).unwrap();
        assert!(
            matches!(cfg.validate(), Err(SolverError::Config { ref key, .. }) if key == "t_end")
        );
    }

    #[test]
    fn snapshot_times_are_checked() {
        let cfg = parse_config(
            "t_end = 1.0\nsnapshots = [0.5, 2.0]",
            Some(CaseKind::CProperty),
        )
        .unwrap();
        assert!(cfg.validate().is_err());
    }
}
