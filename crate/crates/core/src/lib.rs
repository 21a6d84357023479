//! Two-layer shallow-water solver for heavy-gas dispersal.
//!
//! The heavy gas (layer 1) spreads under the ambient air (layer 2). Each
//! layer is weakly compressible, which keeps the system hyperbolic; stiff
//! pressure relaxation after every step recovers the classical two-layer
//! equations. Interlayer drag is integrated exactly with a time-dependent
//! interfacial area. Planar and cylindrical (radial) 1D geometries are
//! supported, along with box-model diagnostics for the spreading front.

pub mod cli;
pub mod diagnostics;
pub mod eos;
pub mod error;
pub mod parallel;
pub mod relaxation;
pub mod riemann;
pub mod run;
pub mod scheme;
pub mod state;

pub use error::{Error, Result};
pub use parallel::Execution;
pub use relaxation::DragLaw;
pub use run::{run_scenario, RunOutput};
pub use scheme::Simulation;
pub use state::{CellState, FluidParams, Fluids, Geometry, Grid1D, LayerState, SimConfig, H_MIN};
