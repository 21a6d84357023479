//! Explicit finite-volume integrator.
//!
//! One step is split as: hyperbolic update (boundaries, optional MUSCL,
//! face Riemann solves, Godunov update), cylindrical geometric sources,
//! stiff pressure relaxation, then velocity relaxation with the
//! time-dependent drag law.

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, try_map_indexed, Execution};
use crate::relaxation::{pressure_relax, velocity_relax};
use crate::riemann::{self, RiemannFan};
use crate::state::{init_dam_break, CellState, Fluids, Geometry, Grid1D, LayerState, SimConfig, H_MIN};

/// Largest signal speed |u_k| + √(c_k² + ½ g h_k) over the field.
pub fn max_signal_speed(field: &[CellState], fluids: &Fluids, g: f64) -> Result<f64> {
    let mut smax = 0.0_f64;
    for (i, cell) in field.iter().enumerate() {
        if !cell.is_valid() {
            return Err(Error::Numerical { cell: i, time: f64::NAN, what: format!("invalid state {cell:?}") });
        }
        for (layer, params) in [(&cell.lower, &fluids.lower), (&cell.upper, &fluids.upper)] {
            let c = params.sound_speed(layer.h, g);
            smax = smax.max(layer.u.abs() + (c * c + 0.5 * g * layer.h).sqrt());
        }
    }
    Ok(smax)
}

/// CFL-limited time step from the pre-step field.
pub fn compute_dt(field: &[CellState], grid: &Grid1D, cfl: f64, g: f64, fluids: &Fluids) -> Result<f64> {
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(Error::Config(format!("cfl must lie in (0, 1), got {cfl}")));
    }
    let smax = max_signal_speed(field, fluids, g)?;
    if !(smax > 0.0) {
        return Err(Error::Numerical { cell: 0, time: f64::NAN, what: "zero signal speed".into() });
    }
    Ok(cfl * grid.dx() / smax)
}

/// Reflective ghost states (left, right): mirrored edge cells.
pub fn apply_boundaries(field: &[CellState]) -> (CellState, CellState) {
    let first = field.first().expect("empty field");
    let last = field.last().expect("empty field");
    (first.mirrored(), last.mirrored())
}

#[inline]
fn van_leer(a: f64, b: f64) -> f64 {
    if a * b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

#[inline]
fn layer_slope(prev: &LayerState, cur: &LayerState, next: &LayerState) -> LayerState {
    LayerState {
        h: van_leer(cur.h - prev.h, next.h - cur.h),
        rho: van_leer(cur.rho - prev.rho, next.rho - cur.rho),
        u: van_leer(cur.u - prev.u, next.u - cur.u),
    }
}

#[inline]
fn extrapolate(cell: &LayerState, slope: &LayerState, sign: f64) -> LayerState {
    LayerState {
        h: (cell.h + sign * 0.5 * slope.h).max(H_MIN),
        rho: cell.rho + sign * 0.5 * slope.rho,
        u: cell.u + sign * 0.5 * slope.u,
    }
}

/// Face states without reconstruction. Face `j` separates cells `j − 1` and `j`.
pub fn first_order_faces(field: &[CellState], ghosts: (CellState, CellState)) -> Vec<(CellState, CellState)> {
    let m = field.len();
    (0..=m)
        .map(|j| {
            let left = if j == 0 { ghosts.0 } else { field[j - 1] };
            let right = if j == m { ghosts.1 } else { field[j] };
            (left, right)
        })
        .collect()
}

/// Limited linear reconstruction of (h, ρ, u) per layer with the van Leer limiter.
///
/// Edge cells and ghosts keep zero slopes.
pub fn muscl_reconstruct(field: &[CellState], ghosts: (CellState, CellState)) -> Vec<(CellState, CellState)> {
    let m = field.len();
    let zero = LayerState { h: 0.0, rho: 0.0, u: 0.0 };
    let slopes: Vec<(LayerState, LayerState)> = (0..m)
        .map(|i| {
            if i == 0 || i + 1 == m {
                (zero, zero)
            } else {
                let (p, c, n) = (&field[i - 1], &field[i], &field[i + 1]);
                (layer_slope(&p.lower, &c.lower, &n.lower), layer_slope(&p.upper, &c.upper, &n.upper))
            }
        })
        .collect();
    let face_value = |i: usize, sign: f64| {
        let c = &field[i];
        let (sl, su) = &slopes[i];
        CellState { lower: extrapolate(&c.lower, sl, sign), upper: extrapolate(&c.upper, su, sign) }
    };
    (0..=m)
        .map(|j| {
            let left = if j == 0 { ghosts.0 } else { face_value(j - 1, 1.0) };
            let right = if j == m { ghosts.1 } else { face_value(j, -1.0) };
            (left, right)
        })
        .collect()
}

pub fn solve_faces(
    faces: &[(CellState, CellState)],
    fluids: &Fluids,
    g: f64,
    p0: f64,
    exec: Execution,
    time: f64,
) -> Result<Vec<RiemannFan>> {
    try_map_indexed(exec, faces.len(), |j| {
        let (l, r) = &faces[j];
        riemann::solve(l, r, fluids, g, p0).map_err(|e| Error::Numerical {
            cell: j.min(faces.len() - 2),
            time,
            what: format!("face {j}: {e}"),
        })
    })
}

fn check_cell(cell: CellState, i: usize, time: f64, stage: &str) -> Result<CellState> {
    let masses_ok = cell.lower.mass() > 0.0 && cell.upper.mass() > 0.0;
    let finite = [cell.lower.h, cell.lower.rho, cell.lower.u, cell.upper.h, cell.upper.rho, cell.upper.u]
        .iter()
        .all(|v| v.is_finite());
    if masses_ok && finite {
        Ok(cell)
    } else {
        Err(Error::Numerical { cell: i, time, what: format!("{stage} produced {cell:?}") })
    }
}

/// Godunov update of heights, masses and momenta from face solutions.
///
/// The interlayer terms use the cell-centered pre-update h₁.
pub fn godunov_update(
    field: &[CellState],
    fans: &[RiemannFan],
    dt: f64,
    dx: f64,
    g: f64,
    exec: Execution,
    time: f64,
) -> Result<Vec<CellState>> {
    assert_eq!(fans.len(), field.len() + 1, "one fan per face");
    let ratio = dt / dx;
    try_map_indexed(exec, field.len(), |i| {
        let cell = &field[i];
        let (west, east) = (&fans[i], &fans[i + 1]);
        let coupling = g * cell.lower.h * (east.upper_mass_star - west.upper_mass_star);
        let update = |layer: &LayerState, w: &riemann::LayerFan, e: &riemann::LayerFan, sign: f64| {
            let h = layer.h - ratio * (e.height_flux - w.height_flux) + ratio * layer.h * (e.velocity - w.velocity);
            let mass = layer.mass() - ratio * (e.mass_flux - w.mass_flux);
            let momentum = layer.momentum() - ratio * (e.momentum_flux - w.momentum_flux) + sign * ratio * coupling;
            (h.max(H_MIN), mass, momentum)
        };
        let (h1, m1, q1) = update(&cell.lower, &west.lower, &east.lower, -1.0);
        let (h2, m2, q2) = update(&cell.upper, &west.upper, &east.upper, 1.0);
        let next = CellState {
            lower: LayerState::from_conservative(h1, m1, q1),
            upper: LayerState::from_conservative(h2, m2, q2),
        };
        check_cell(next, i, time, "hyperbolic update")
    })
}

/// Radial geometric sources −h_kρ_ku_k/r and −h_kρ_ku_k²/r, as a fractional step.
///
/// Face values come from the Riemann solutions: F*_mass and F*_mass·u*.
pub fn cylindrical_sources(
    field: &[CellState],
    fans: &[RiemannFan],
    dt: f64,
    grid: &Grid1D,
    exec: Execution,
    time: f64,
) -> Result<Vec<CellState>> {
    if grid.geometry == Geometry::Planar {
        return Ok(field.to_vec());
    }
    assert_eq!(fans.len(), field.len() + 1, "one fan per face");
    try_map_indexed(exec, field.len(), |i| {
        let radius = grid.cell_center(i);
        if !(radius > 0.0) {
            return Err(Error::Config(format!("cell {i} has non-positive radius {radius}")));
        }
        let cell = &field[i];
        let factor = dt / radius;
        let source = |layer: &LayerState, w: &riemann::LayerFan, e: &riemann::LayerFan| {
            let mass = layer.mass() - factor * 0.5 * (e.mass_flux + w.mass_flux);
            let momentum =
                layer.momentum() - factor * 0.5 * (e.mass_flux * e.velocity + w.mass_flux * w.velocity);
            LayerState::from_conservative(layer.h, mass, momentum)
        };
        let next = CellState {
            lower: source(&cell.lower, &fans[i].lower, &fans[i + 1].lower),
            upper: source(&cell.upper, &fans[i].upper, &fans[i + 1].upper),
        };
        check_cell(next, i, time, "cylindrical source")
    })
}

/// Hyperbolic operator of one stage: face solves, Godunov update and, in
/// cylindrical geometry, the geometric sources from the same face solutions.
pub fn hyperbolic_stage(
    field: &[CellState],
    t: f64,
    dt: f64,
    config: &SimConfig,
    exec: Execution,
) -> Result<Vec<CellState>> {
    let ghosts = apply_boundaries(field);
    let faces = if config.muscl { muscl_reconstruct(field, ghosts) } else { first_order_faces(field, ghosts) };
    let fans = solve_faces(&faces, &config.fluids, config.g, config.p0, exec, t)?;
    let next = godunov_update(field, &fans, dt, config.grid.dx(), config.g, exec, t)?;
    if config.grid.geometry == Geometry::Cylindrical {
        cylindrical_sources(&next, &fans, dt, &config.grid, exec, t)
    } else {
        Ok(next)
    }
}

/// Convex combination ½(a + b) in conservative variables (h, hρ, hρu).
fn average_conservative(a: &CellState, b: &CellState) -> CellState {
    let mix = |x: &LayerState, y: &LayerState| {
        LayerState::from_conservative(
            0.5 * (x.h + y.h),
            0.5 * (x.mass() + y.mass()),
            0.5 * (x.momentum() + y.momentum()),
        )
    };
    CellState { lower: mix(&a.lower, &b.lower), upper: mix(&a.upper, &b.upper) }
}

/// Advances `field` from `t` by `dt`.
///
/// With MUSCL on, the hyperbolic part uses two stages (Heun / SSP-RK2);
/// a single forward-Euler stage with limited slopes is unstable here.
pub fn step(field: &[CellState], t: f64, dt: f64, config: &SimConfig, exec: Execution) -> Result<Vec<CellState>> {
    let fluids = &config.fluids;
    let g = config.g;
    let next = if config.muscl {
        let stage1 = hyperbolic_stage(field, t, dt, config, exec)?;
        let stage2 = hyperbolic_stage(&stage1, t + dt, dt, config, exec)?;
        map_indexed(exec, field.len(), |i| average_conservative(&field[i], &stage2[i]))
    } else {
        hyperbolic_stage(field, t, dt, config, exec)?
    };
    let impedances = (fluids.lower.impedance(), fluids.upper.impedance());
    let relax_pressure = config.pressure_relaxation;
    let drag = config.drag;
    let relaxed = map_indexed(exec, next.len(), |i| {
        let mut cell = next[i].floored();
        if relax_pressure {
            cell = pressure_relax(&cell, fluids, g).floored();
        }
        velocity_relax(&cell, t, dt, &drag, impedances)
    });
    relaxed.into_iter().enumerate().map(|(i, c)| check_cell(c, i, t + dt, "relaxation")).collect()
}

/// Owns a field and advances it in time.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    field: Vec<CellState>,
    time: f64,
    steps: u64,
    exec: Execution,
    min_height: (f64, f64),
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        let field = init_dam_break(&config)?;
        Ok(Self::from_field(config, field))
    }

    pub fn from_field(config: SimConfig, field: Vec<CellState>) -> Self {
        let min_height = min_heights(&field);
        Self { config, field, time: 0.0, steps: 0, exec: Execution::default(), min_height }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn field(&self) -> &[CellState] {
        &self.field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Smallest (h₁, h₂) seen over all steps so far.
    pub fn min_height(&self) -> (f64, f64) {
        self.min_height
    }

    /// One CFL step, shortened to end no later than `t_limit`. Returns dt.
    pub fn step(&mut self, t_limit: f64) -> Result<f64> {
        let c = &self.config;
        let dt = compute_dt(&self.field, &c.grid, c.cfl, c.g, &c.fluids)
            .map_err(|e| match e {
                Error::Numerical { cell, what, .. } => Error::Numerical { cell, time: self.time, what },
                other => other,
            })?
            .min(t_limit - self.time);
        if !(dt > 0.0) {
            return Ok(0.0);
        }
        self.field = step(&self.field, self.time, dt, c, self.exec)?;
        self.steps += 1;
        // land exactly on the limit
        self.time = if self.time + dt >= t_limit { t_limit } else { self.time + dt };
        let (a, b) = min_heights(&self.field);
        self.min_height = (self.min_height.0.min(a), self.min_height.1.min(b));
        Ok(dt)
    }

    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        while self.time < t_target {
            self.step(t_target)?;
        }
        Ok(())
    }

    /// Per-layer totals: Σ h_kρ_k dx (planar) or Σ h_kρ_k r dx (cylindrical, per radian).
    pub fn layer_masses(&self) -> (f64, f64) {
        layer_masses(&self.field, &self.config.grid)
    }
}

fn min_heights(field: &[CellState]) -> (f64, f64) {
    field.iter().fold((f64::INFINITY, f64::INFINITY), |(a, b), c| (a.min(c.lower.h), b.min(c.upper.h)))
}

pub fn layer_masses(field: &[CellState], grid: &Grid1D) -> (f64, f64) {
    let dx = grid.dx();
    field.iter().enumerate().fold((0.0, 0.0), |(a, b), (i, c)| {
        let w = match grid.geometry {
            Geometry::Planar => dx,
            Geometry::Cylindrical => dx * grid.cell_center(i),
        };
        (a + c.lower.mass() * w, b + c.upper.mass() * w)
    })
}
