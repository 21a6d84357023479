//! Cell states, fluid parameters, the 1D grid and dam-break initialization.
//!
//! Index 1 (the `lower` layer) is always the heavy fluid, index 2 (`upper`)
//! the light ambient one. Layer states hold primitives; conservative
//! quantities are derived on demand.

use crate::error::{Error, Result};
use crate::relaxation::DragLaw;

/// Lower bound applied to every layer height.
pub const H_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerState {
    /// Height (m).
    pub h: f64,
    /// Density (kg/m³).
    pub rho: f64,
    /// Layer-averaged velocity (m/s).
    pub u: f64,
}

impl LayerState {
    pub const fn new(h: f64, rho: f64, u: f64) -> Self {
        Self { h, rho, u }
    }

    /// Apparent density h·ρ (kg/m²).
    #[inline]
    pub fn mass(&self) -> f64 {
        self.h * self.rho
    }

    /// h·ρ·u (kg/(m·s)).
    #[inline]
    pub fn momentum(&self) -> f64 {
        self.h * self.rho * self.u
    }

    #[inline]
    pub fn mirrored(&self) -> Self {
        Self { u: -self.u, ..*self }
    }

    pub fn is_valid(&self) -> bool {
        self.h.is_finite() && self.rho.is_finite() && self.u.is_finite() && self.h > 0.0 && self.rho > 0.0
    }

    /// Raises the height to [`H_MIN`] keeping h·ρ, so the density absorbs the change.
    #[inline]
    pub fn floored(self) -> Self {
        if self.h >= H_MIN {
            self
        } else {
            let mass = self.mass();
            Self { h: H_MIN, rho: mass / H_MIN, u: self.u }
        }
    }

    /// Builds a layer from conservative variables (h, h·ρ, h·ρ·u).
    #[inline]
    pub fn from_conservative(h: f64, mass: f64, momentum: f64) -> Self {
        Self { h, rho: mass / h, u: momentum / mass }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    /// Heavy fluid (index 1).
    pub lower: LayerState,
    /// Light fluid (index 2).
    pub upper: LayerState,
}

impl CellState {
    pub const fn new(lower: LayerState, upper: LayerState) -> Self {
        Self { lower, upper }
    }

    #[inline]
    pub fn mirrored(&self) -> Self {
        Self { lower: self.lower.mirrored(), upper: self.upper.mirrored() }
    }

    pub fn is_valid(&self) -> bool {
        self.lower.is_valid() && self.upper.is_valid()
    }

    #[inline]
    pub fn floored(self) -> Self {
        Self { lower: self.lower.floored(), upper: self.upper.floored() }
    }

    /// Product h₁·h₂ used by the front indicator.
    #[inline]
    pub fn height_product(&self) -> f64 {
        self.lower.h * self.upper.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    /// Density at atmospheric pressure (kg/m³).
    pub rho_ref: f64,
    /// Physical sound speed (m/s), used for impedances and the relaxed hydrostatic correction.
    pub c_phys: f64,
    /// Numerical sound-speed factor of the hyperbolic step.
    pub theta: f64,
}

impl FluidParams {
    pub fn new(rho_ref: f64, c_phys: f64, theta: f64) -> Result<Self> {
        let params = Self { rho_ref, c_phys, theta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 1.0) {
            return Err(Error::Subcharacteristic(self.theta));
        }
        if !(self.rho_ref > 0.0 && self.rho_ref.is_finite()) {
            return Err(Error::config(format!("reference density must be positive, got {}", self.rho_ref)));
        }
        if !(self.c_phys > 0.0 && self.c_phys.is_finite()) {
            return Err(Error::config(format!("sound speed must be positive, got {}", self.c_phys)));
        }
        Ok(())
    }

    /// Acoustic impedance ρ·c at atmospheric conditions (kg/(m²·s)).
    pub fn impedance(&self) -> f64 {
        self.rho_ref * self.c_phys
    }

    /// Numerical sound speed for a layer of height `h`; θ is validated at construction.
    #[inline]
    pub fn sound_speed(&self, h: f64, g: f64) -> f64 {
        (self.theta * 0.5 * g * h).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fluids {
    pub lower: FluidParams,
    pub upper: FluidParams,
}

/// Krypton over air at atmospheric conditions, θ = 2 for both layers.
impl Default for Fluids {
    fn default() -> Self {
        Self {
            lower: FluidParams { rho_ref: 3.506, c_phys: 218.0, theta: 2.0 },
            upper: FluidParams { rho_ref: 1.29, c_phys: 340.0, theta: 2.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Planar,
    /// Radial coordinate with axis at x = 0.
    Cylindrical,
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "planar" => Ok(Geometry::Planar),
            "cylindrical" => Ok(Geometry::Cylindrical),
            other => Err(Error::config(format!("unknown geometry `{other}`"))),
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Geometry::Planar => "planar",
            Geometry::Cylindrical => "cylindrical",
        })
    }
}

/// Uniform grid on [0, length].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub geometry: Geometry,
    pub length: f64,
    pub cells: usize,
}

impl Grid1D {
    pub fn new(geometry: Geometry, length: f64, cells: usize) -> Result<Self> {
        let grid = Self { geometry, length, cells };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::config(format!("grid length must be positive, got {}", self.length)));
        }
        if self.cells < 2 {
            return Err(Error::config(format!("grid needs at least 2 cells, got {}", self.cells)));
        }
        Ok(())
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    #[inline]
    pub fn cell_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells).map(|i| self.cell_center(i))
    }
}

/// Piecewise-constant initial condition split at `position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamBreak {
    pub position: f64,
    pub left: CellState,
    pub right: CellState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub name: String,
    pub grid: Grid1D,
    pub fluids: Fluids,
    pub dam: DamBreak,
    pub g: f64,
    pub p0: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub drag: DragLaw,
    pub epsilon_front: f64,
    pub muscl: bool,
    /// Stiff pressure relaxation after each hyperbolic step.
    pub pressure_relaxation: bool,
    /// Front-trace cadence (s).
    pub output_interval: f64,
    pub snapshot_times: Vec<f64>,
    /// Regression window for the Froude fit; `None` upper bound means end of trace.
    pub fit_window: (f64, Option<f64>),
    pub mu_air: f64,
}

impl SimConfig {
    /// Cylindrical krypton release of initial height `h0` into air.
    pub fn krypton(h0: f64) -> Self {
        let fluids = Fluids::default();
        let left = CellState::new(
            LayerState::new(h0, fluids.lower.rho_ref, 0.0),
            LayerState::new(1.2 - h0, fluids.upper.rho_ref, 0.0),
        );
        let right = CellState::new(
            LayerState::new(H_MIN, fluids.lower.rho_ref, 0.0),
            LayerState::new(1.2, fluids.upper.rho_ref, 0.0),
        );
        Self {
            name: format!("krypton_{}cm", (h0 * 100.0).round() as i64),
            grid: Grid1D { geometry: Geometry::Cylindrical, length: 0.6, cells: 1000 },
            fluids,
            dam: DamBreak { position: 0.05, left, right },
            g: 9.81,
            p0: 101_325.0,
            cfl: 0.8,
            t_end: 1.0,
            drag: DragLaw { a: 0.2, b: 12.5, c: 5e-5, h0 },
            epsilon_front: 1e-10,
            muscl: true,
            pressure_relaxation: true,
            output_interval: 0.01,
            snapshot_times: Vec::new(),
            fit_window: (0.1, None),
            mu_air: crate::diagnostics::DEFAULT_MU_AIR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.fluids.lower.validate()?;
        self.fluids.upper.validate()?;
        self.drag.validate()?;
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::config(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.dam.position > 0.0 && self.dam.position < self.grid.length) {
            return Err(Error::config(format!(
                "dam position {} must lie strictly inside (0, {})",
                self.dam.position, self.grid.length
            )));
        }
        if !(self.epsilon_front > 0.0) {
            return Err(Error::config(format!("front epsilon must be positive, got {}", self.epsilon_front)));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::config(format!("gravity must be positive, got {}", self.g)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !(self.output_interval > 0.0) {
            return Err(Error::config(format!("output interval must be positive, got {}", self.output_interval)));
        }
        if self.snapshot_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::config("snapshot times must be finite and non-negative"));
        }
        if !(self.mu_air > 0.0) {
            return Err(Error::config(format!("air viscosity must be positive, got {}", self.mu_air)));
        }
        Ok(())
    }
}

fn checked_state(state: &CellState, side: &str) -> Result<CellState> {
    for (name, layer) in [("h1", &state.lower), ("h2", &state.upper)] {
        if !(layer.h > 0.0 && layer.h.is_finite()) {
            return Err(Error::config(format!("{side} {name} must be positive, got {}", layer.h)));
        }
        if !(layer.rho > 0.0 && layer.rho.is_finite()) {
            return Err(Error::config(format!("{side} density must be positive, got {}", layer.rho)));
        }
        if !layer.u.is_finite() {
            return Err(Error::config(format!("{side} velocity must be finite")));
        }
    }
    let floored = CellState {
        lower: LayerState { h: state.lower.h.max(H_MIN), ..state.lower },
        upper: LayerState { h: state.upper.h.max(H_MIN), ..state.upper },
    };
    Ok(floored)
}

/// Samples the dam-break states onto the grid by cell-center comparison.
pub fn init_dam_break(config: &SimConfig) -> Result<Vec<CellState>> {
    config.validate()?;
    let left = checked_state(&config.dam.left, "left")?;
    let right = checked_state(&config.dam.right, "right")?;
    let x0 = config.dam.position;
    Ok(config.grid.centers().map(|x| if x < x0 { left } else { right }).collect())
}
