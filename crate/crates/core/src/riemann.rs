//! HLL-type Riemann solver for the two-layer system at one face.
//!
//! Both layers share one pair of extreme wave speeds. The non-conservative
//! interlayer product ρ₂gh₂ ∂h₁/∂x is made locally conservative by freezing
//! (ρ₂h₂)* at the face: the heavy-layer momentum flux carries
//! −g(ρ₂h₂)*h₁ and the light-layer flux carries +g(ρ₂h₂)*h₁.

use crate::eos;
use crate::error::{Error, Result};
use crate::state::{CellState, Fluids, LayerState};

/// Face solution for one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerFan {
    /// (ρh)* (kg/m²).
    pub mass_star: f64,
    /// (ρhu)* (kg/(m·s)).
    pub momentum_star: f64,
    /// F*_mass (kg/(m·s)).
    pub mass_flux: f64,
    /// F*_mom, coupling term included.
    pub momentum_flux: f64,
    /// Contact speed u* (m/s).
    pub velocity: f64,
    /// Height transport flux (hu)* (m²/s).
    pub height_flux: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannFan {
    pub s_left: f64,
    pub s_right: f64,
    pub lower: LayerFan,
    pub upper: LayerFan,
    /// Face-frozen (ρ₂h₂)* shared by the coupling terms.
    pub upper_mass_star: f64,
}

/// Per-layer extreme wave estimates (S_L,k, S_R,k).
#[inline]
pub fn wave_speed_estimates(left: &LayerState, right: &LayerState, c_left: f64, c_right: f64, g: f64) -> (f64, f64) {
    let a_left = (c_left * c_left + 0.5 * g * left.h).sqrt();
    let a_right = (c_right * c_right + 0.5 * g * right.h).sqrt();
    let s_l = (left.u - a_left).min(right.u - a_right);
    let s_r = (left.u + a_left).max(right.u + a_right);
    (s_l, s_r)
}

/// Outermost waves over both layers.
#[inline]
pub fn extreme_waves(lower: (f64, f64), upper: (f64, f64)) -> Result<(f64, f64)> {
    let s_l = lower.0.min(upper.0);
    let s_r = lower.1.max(upper.1);
    if !(s_l < s_r) {
        return Err(Error::DegenerateFan(s_l, s_r));
    }
    Ok((s_l, s_r))
}

/// Single HLL intermediate apparent density (ρh)*.
#[inline]
pub fn hll_mass(q_left: f64, q_right: f64, u_left: f64, u_right: f64, s_left: f64, s_right: f64) -> f64 {
    (q_right * (u_right - s_right) - q_left * (u_left - s_left)) / (s_left - s_right)
}

/// HLL star state and flux for one conserved component.
///
/// Returns the upwind flux when the fan lies entirely on one side of the face.
#[inline]
pub fn hll_flux(u_left: f64, u_right: f64, f_left: f64, f_right: f64, s_left: f64, s_right: f64) -> (f64, f64) {
    let denom = s_left - s_right;
    let u_star = (f_right - f_left - s_right * u_right + s_left * u_left) / denom;
    let f_star = if s_left >= 0.0 {
        f_left
    } else if s_right <= 0.0 {
        f_right
    } else {
        (f_right * s_left - f_left * s_right + s_left * s_right * (u_left - u_right)) / denom
    };
    (u_star, f_star)
}

#[inline]
pub fn interface_velocity(momentum_star: f64, mass_star: f64) -> f64 {
    momentum_star / mass_star
}

/// Height carried across the contact moving at `u_star`.
#[inline]
pub fn height_contact(h_left: f64, h_right: f64, u_star: f64) -> f64 {
    if u_star > 0.0 {
        h_left
    } else if u_star < 0.0 {
        h_right
    } else {
        0.5 * (h_left + h_right)
    }
}

/// Exact fluxes of a state: (mass₁, momentum₁, mass₂, momentum₂).
///
/// `upper_mass_star` is the face constant (ρ₂h₂)* entering the coupling terms.
pub fn physical_flux(cell: &CellState, upper_mass_star: f64, fluids: &Fluids, g: f64, p0: f64) -> [f64; 4] {
    let lo = &cell.lower;
    let up = &cell.upper;
    let c1 = fluids.lower.sound_speed(lo.h, g);
    let c2 = fluids.upper.sound_speed(up.h, g);
    let p1 = eos::pressure_lower(lo.rho, up.rho, up.h, &fluids.lower, g, p0, c1) - p0;
    let p2 = eos::pressure_upper(up.rho, &fluids.upper, p0, c2) - p0;
    let coupling = g * upper_mass_star * lo.h;
    [
        lo.momentum(),
        lo.momentum() * lo.u + lo.h * p1 + 0.5 * lo.rho * g * lo.h * lo.h - coupling,
        up.momentum(),
        up.momentum() * up.u + up.h * p2 + 0.5 * up.rho * g * up.h * up.h + coupling,
    ]
}

fn layer_fan(
    left: &LayerState,
    right: &LayerState,
    flux_left: (f64, f64),
    flux_right: (f64, f64),
    s_left: f64,
    s_right: f64,
) -> Result<LayerFan> {
    let (mass_star, mass_flux) = hll_flux(left.mass(), right.mass(), flux_left.0, flux_right.0, s_left, s_right);
    if !(mass_star > 0.0) {
        return Err(Error::InvalidStarMass(mass_star));
    }
    let (momentum_star, momentum_flux) =
        hll_flux(left.momentum(), right.momentum(), flux_left.1, flux_right.1, s_left, s_right);
    let velocity = interface_velocity(momentum_star, mass_star);
    let height_flux = height_contact(left.h, right.h, velocity) * velocity;
    Ok(LayerFan { mass_star, momentum_star, mass_flux, momentum_flux, velocity, height_flux })
}

/// Solves the face problem between `left` and `right`.
pub fn solve(left: &CellState, right: &CellState, fluids: &Fluids, g: f64, p0: f64) -> Result<RiemannFan> {
    let c_l1 = fluids.lower.sound_speed(left.lower.h, g);
    let c_r1 = fluids.lower.sound_speed(right.lower.h, g);
    let c_l2 = fluids.upper.sound_speed(left.upper.h, g);
    let c_r2 = fluids.upper.sound_speed(right.upper.h, g);
    let lower_waves = wave_speed_estimates(&left.lower, &right.lower, c_l1, c_r1, g);
    let upper_waves = wave_speed_estimates(&left.upper, &right.upper, c_l2, c_r2, g);
    let (s_left, s_right) = extreme_waves(lower_waves, upper_waves)?;

    let upper_mass_star =
        hll_mass(left.upper.mass(), right.upper.mass(), left.upper.u, right.upper.u, s_left, s_right);
    if !(upper_mass_star > 0.0) {
        return Err(Error::InvalidStarMass(upper_mass_star));
    }

    let fl = physical_flux(left, upper_mass_star, fluids, g, p0);
    let fr = physical_flux(right, upper_mass_star, fluids, g, p0);
    let lower = layer_fan(&left.lower, &right.lower, (fl[0], fl[1]), (fr[0], fr[1]), s_left, s_right)?;
    let upper = layer_fan(&left.upper, &right.upper, (fl[2], fl[3]), (fr[2], fr[3]), s_left, s_right)?;
    Ok(RiemannFan { s_left, s_right, lower, upper, upper_mass_star })
}
