//! Time-loop orchestration: integrates a scenario and samples the front.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use crate::diagnostics::{fit_froude, front_position, BoxModelParams, FroudeFit, FrontTrace, Scaling};
use crate::error::Result;
use crate::parallel::Execution;
use crate::scheme::Simulation;
use crate::state::{CellState, Geometry, SimConfig};

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: FrontTrace,
    pub snapshots: Vec<(f64, Vec<CellState>)>,
    pub final_field: Vec<CellState>,
    pub final_time: f64,
    pub steps: u64,
    /// Relative drift of each layer's total mass.
    pub mass_drift: (f64, f64),
    pub min_height: (f64, f64),
    pub elapsed: Duration,
}

/// Box-model inputs implied by a dam-break scenario.
///
/// Cylindrical: the column is a disk of radius x₀; planar: a strip of width x₀ per unit length.
pub fn box_model_for(config: &SimConfig) -> BoxModelParams {
    let rc = config.dam.position;
    let h0 = config.dam.left.lower.h;
    let (volume, a0) = match config.grid.geometry {
        Geometry::Cylindrical => (PI * rc * rc * h0, PI * rc * rc),
        Geometry::Planar => (rc * h0, rc),
    };
    BoxModelParams {
        froude: 0.0,
        volume,
        rho_gas: config.dam.left.lower.rho,
        rho_air: config.dam.right.upper.rho,
        g: config.g,
        a0,
    }
}

pub fn scaling_for(config: &SimConfig) -> Result<Scaling> {
    Scaling::new(
        config.dam.position,
        config.dam.left.lower.h,
        config.dam.left.lower.rho,
        config.dam.right.upper.rho,
        config.g,
    )
}

/// Output instants: multiples of the cadence up to t_end, plus t_end itself.
fn output_times(config: &SimConfig) -> Vec<f64> {
    let mut times = Vec::new();
    let mut k = 0u64;
    loop {
        let t = k as f64 * config.output_interval;
        if t > config.t_end * (1.0 + 1e-12) {
            break;
        }
        times.push(t.min(config.t_end));
        k += 1;
    }
    if times.last().map_or(true, |&t| t < config.t_end) {
        times.push(config.t_end);
    }
    times
}

pub fn run_scenario(config: &SimConfig, exec: Execution) -> Result<RunOutput> {
    let start = Instant::now();
    let mut sim = Simulation::new(config.clone())?.with_execution(exec);
    let masses0 = sim.layer_masses();
    let mut trace = FrontTrace::new(config.name.clone(), config.dam.left.lower.h);

    let trace_times = output_times(config);
    let mut snap_times: Vec<f64> = config.snapshot_times.iter().copied().filter(|&t| t <= config.t_end).collect();
    snap_times.sort_by(f64::total_cmp);
    snap_times.dedup();

    let mut events: Vec<f64> = trace_times.iter().chain(&snap_times).copied().collect();
    events.sort_by(f64::total_cmp);
    events.dedup();

    let mut snapshots = Vec::new();
    let (mut ti, mut si) = (0, 0);
    for t in events {
        sim.advance_to(t)?;
        if ti < trace_times.len() && trace_times[ti] == t {
            trace.push(t, front_position(sim.field(), &config.grid, config.epsilon_front))?;
            ti += 1;
        }
        if si < snap_times.len() && snap_times[si] == t {
            snapshots.push((t, sim.field().to_vec()));
            si += 1;
        }
    }

    let masses = sim.layer_masses();
    Ok(RunOutput {
        trace,
        snapshots,
        final_time: sim.time(),
        steps: sim.steps(),
        mass_drift: ((masses.0 - masses0.0) / masses0.0, (masses.1 - masses0.1) / masses0.1),
        min_height: sim.min_height(),
        final_field: sim.field().to_vec(),
        elapsed: start.elapsed(),
    })
}

impl RunOutput {
    /// Froude fit over the configured window, clipped to the trace.
    pub fn fit(&self, config: &SimConfig) -> Result<FroudeFit> {
        let t_max = config.fit_window.1.unwrap_or(self.final_time);
        fit_froude(&self.trace, &box_model_for(config), (config.fit_window.0, t_max))
    }
}
