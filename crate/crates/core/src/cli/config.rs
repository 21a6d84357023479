//! Flat `key = value` scenario files.
//!
//! ```text
//! # 15 cm krypton release
//! grid.cells = 1000
//! left.h1 = 0.15
//! drag.a = 0.2
//! ```
//!
//! Unset keys take the krypton-in-air defaults. `left.h2` defaults to
//! `right.h2 − left.h1` and `drag.h0` to `left.h1`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::relaxation::DragLaw;
use crate::state::{CellState, DamBreak, FluidParams, Geometry, Grid1D, LayerState, SimConfig, H_MIN};

/// Configurations shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("krypton_5cm", include_str!("../../configs/krypton_5cm.cfg")),
    ("krypton_10cm", include_str!("../../configs/krypton_10cm.cfg")),
    ("krypton_15cm", include_str!("../../configs/krypton_15cm.cfg")),
];

pub const KEYS: &[&str] = &[
    "name",
    "grid.geometry",
    "grid.length",
    "grid.cells",
    "dam.position",
    "left.h1",
    "left.rho1",
    "left.u1",
    "left.h2",
    "left.rho2",
    "left.u2",
    "right.h1",
    "right.rho1",
    "right.u1",
    "right.h2",
    "right.rho2",
    "right.u2",
    "fluid1.rho_ref",
    "fluid1.c",
    "fluid1.theta",
    "fluid2.rho_ref",
    "fluid2.c",
    "fluid2.theta",
    "physics.g",
    "physics.p0",
    "time.cfl",
    "time.t_end",
    "time.output_interval",
    "drag.a",
    "drag.b",
    "drag.c",
    "drag.h0",
    "front.epsilon",
    "scheme.muscl",
    "scheme.pressure_relaxation",
    "output.snapshot_times",
    "fit.t_min",
    "fit.t_max",
    "diagnostics.mu_air",
];

const ALIASES: &[(&str, &str)] = &[
    ("theta1", "fluid1.theta"),
    ("theta2", "fluid2.theta"),
    ("m_cells", "grid.cells"),
    ("cfl", "time.cfl"),
    ("t_end", "time.t_end"),
];

/// Maps an alias to its dotted key and rejects unknown keys.
pub fn canonical_key(key: &str) -> Result<&'static str> {
    let key = key.trim();
    if let Some(&(_, full)) = ALIASES.iter().find(|(alias, _)| *alias == key) {
        return Ok(full);
    }
    KEYS.iter().copied().find(|k| *k == key).ok_or_else(|| Error::UnknownKey(key.to_string()))
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

/// Parsed but not yet interpreted configuration.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<&'static str, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: line_no, msg: format!("expected `key = value`, got `{content}`") })?;
            let key = canonical_key(key)?;
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::Parse { line: line_no, msg: format!("missing value for `{key}`") });
            }
            if let Some(prev) = raw.entries.get(key) {
                return Err(Error::Parse { line: line_no, msg: format!("`{key}` already set on line {}", prev.line) });
            }
            raw.entries.insert(key, Entry { line: line_no, value: value.to_string() });
        }
        Ok(raw)
    }

    /// Overrides one key (line 0 marks a command-line value).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = canonical_key(key)?;
        self.entries.insert(key, Entry { line: 0, value: value.trim().to_string() });
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        let Some(entry) = self.entries.get(key) else { return Ok(None) };
        entry.value.parse::<T>().map(Some).map_err(|_| self.bad(key, what))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.parse_value::<f64>(key, "a number")?.unwrap_or(default))
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        let Some(v) = self.get(key) else { return Ok(default) };
        match v.to_ascii_lowercase().as_str() {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            _ => Err(self.bad(key, "on/off")),
        }
    }

    fn bad(&self, key: &str, what: &str) -> Error {
        let entry = &self.entries[key];
        let msg = format!("`{key}` expects {what}, got `{}`", entry.value);
        if entry.line == 0 {
            Error::Config(msg)
        } else {
            Error::Parse { line: entry.line, msg }
        }
    }

    /// Interprets the entries on top of the defaults and validates the result.
    pub fn build(&self, default_name: &str) -> Result<SimConfig> {
        let base = SimConfig::krypton(0.15);
        let geometry = match self.get("grid.geometry") {
            Some(v) => v.parse::<Geometry>()?,
            None => base.grid.geometry,
        };
        let cells = self.parse_value::<usize>("grid.cells", "a positive integer")?.unwrap_or(base.grid.cells);
        let grid = Grid1D { geometry, length: self.f64_or("grid.length", base.grid.length)?, cells };

        let fluid = |k: &str, d: &FluidParams| -> Result<FluidParams> {
            Ok(FluidParams {
                rho_ref: self.f64_or(&format!("{k}.rho_ref"), d.rho_ref)?,
                c_phys: self.f64_or(&format!("{k}.c"), d.c_phys)?,
                theta: self.f64_or(&format!("{k}.theta"), d.theta)?,
            })
        };
        let fluids = crate::state::Fluids { lower: fluid("fluid1", &base.fluids.lower)?, upper: fluid("fluid2", &base.fluids.upper)? };

        let right_h2 = self.f64_or("right.h2", 1.2)?;
        let right = CellState::new(
            LayerState::new(
                self.f64_or("right.h1", H_MIN)?,
                self.f64_or("right.rho1", fluids.lower.rho_ref)?,
                self.f64_or("right.u1", 0.0)?,
            ),
            LayerState::new(right_h2, self.f64_or("right.rho2", fluids.upper.rho_ref)?, self.f64_or("right.u2", 0.0)?),
        );
        let left_h1 = self.f64_or("left.h1", base.dam.left.lower.h)?;
        let left = CellState::new(
            LayerState::new(left_h1, self.f64_or("left.rho1", fluids.lower.rho_ref)?, self.f64_or("left.u1", 0.0)?),
            LayerState::new(
                self.f64_or("left.h2", right_h2 - left_h1)?,
                self.f64_or("left.rho2", fluids.upper.rho_ref)?,
                self.f64_or("left.u2", 0.0)?,
            ),
        );

        let snapshot_times = match self.get("output.snapshot_times") {
            Some(v) => parse_list(v).map_err(|_| self.bad("output.snapshot_times", "a comma-separated list of times"))?,
            None => Vec::new(),
        };

        let config = SimConfig {
            name: self.get("name").unwrap_or(default_name).to_string(),
            grid,
            fluids,
            dam: DamBreak { position: self.f64_or("dam.position", base.dam.position)?, left, right },
            g: self.f64_or("physics.g", base.g)?,
            p0: self.f64_or("physics.p0", base.p0)?,
            cfl: self.f64_or("time.cfl", base.cfl)?,
            t_end: self.f64_or("time.t_end", base.t_end)?,
            drag: DragLaw {
                a: self.f64_or("drag.a", base.drag.a)?,
                b: self.f64_or("drag.b", base.drag.b)?,
                c: self.f64_or("drag.c", base.drag.c)?,
                h0: self.f64_or("drag.h0", left_h1)?,
            },
            epsilon_front: self.f64_or("front.epsilon", base.epsilon_front)?,
            muscl: self.bool_or("scheme.muscl", base.muscl)?,
            pressure_relaxation: self.bool_or("scheme.pressure_relaxation", base.pressure_relaxation)?,
            output_interval: self.f64_or("time.output_interval", base.output_interval)?,
            snapshot_times,
            fit_window: (self.f64_or("fit.t_min", base.fit_window.0)?, self.parse_value::<f64>("fit.t_max", "a number")?),
            mu_air: self.f64_or("diagnostics.mu_air", base.mu_air)?,
        };
        config.validate()?;
        crate::state::init_dam_break(&config)?;
        Ok(config)
    }
}

/// Comma-separated numbers; blanks are skipped.
pub fn parse_list(text: &str) -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
}

/// Loads a config from a file path, falling back to a bundled name.
pub fn load(source: &str) -> Result<(RawConfig, String)> {
    let path = Path::new(source);
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string();
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {source}: {e}")))?;
        return Ok((RawConfig::parse(&text)?, stem));
    }
    match BUNDLED.iter().find(|(name, _)| *name == source) {
        Some((name, text)) => Ok((RawConfig::parse(text)?, name.to_string())),
        None => Err(Error::Config(format!(
            "no config file `{source}` and no bundled config of that name (bundled: {})",
            BUNDLED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        ))),
    }
}

pub fn load_config(source: &str) -> Result<SimConfig> {
    let (raw, name) = load(source)?;
    raw.build(&name)
}
