//! Barotropic equations of state and the numerical sound speed.

use crate::error::{Error, Result};
use crate::state::FluidParams;

/// Heavy-layer pressure p₁ = p0 + ρ₂ g h₂ + c₁² (ρ₁ − ρ₁(0)).
#[inline]
pub fn pressure_lower(rho1: f64, rho2: f64, h2: f64, params1: &FluidParams, g: f64, p0: f64, c1: f64) -> f64 {
    p0 + rho2 * g * h2 + c1 * c1 * (rho1 - params1.rho_ref)
}

/// Light-layer pressure p₂ = p0 + c₂² (ρ₂ − ρ₂(0)).
#[inline]
pub fn pressure_upper(rho2: f64, params2: &FluidParams, p0: f64, c2: f64) -> f64 {
    p0 + c2 * c2 * (rho2 - params2.rho_ref)
}

/// Sound speed √(θ·½·g·h) used during the hyperbolic step.
pub fn numerical_sound_speed(h: f64, theta: f64, g: f64) -> Result<f64> {
    if !(theta > 1.0) {
        return Err(Error::Subcharacteristic(theta));
    }
    Ok((theta * 0.5 * g * h.max(0.0)).sqrt())
}
