//! Stiff pressure relaxation and drag-driven velocity relaxation.

use crate::error::{Error, Result};
use crate::state::{CellState, Fluids, LayerState};

/// Time-dependent interfacial area A_I(t) = a·h0·e^(−b·t) + c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragLaw {
    /// 1/m
    pub a: f64,
    /// 1/s
    pub b: f64,
    pub c: f64,
    /// Initial heavy-column height (m).
    pub h0: f64,
}

impl DragLaw {
    /// No interlayer drag.
    pub const NONE: DragLaw = DragLaw { a: 0.0, b: 0.0, c: 0.0, h0: 0.0 };

    /// Constant interfacial area.
    pub fn constant(area: f64) -> Self {
        Self { a: 0.0, b: 0.0, c: area, h0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !(ok(self.a) && ok(self.b) && ok(self.c) && ok(self.h0)) {
            return Err(Error::Config(format!(
                "drag parameters must be non-negative, got a = {}, b = {}, c = {}, h0 = {}",
                self.a, self.b, self.c, self.h0
            )));
        }
        Ok(())
    }

    /// ∫ A_I(t) dt over [t0, t0 + dt].
    pub fn integrated_area(&self, t0: f64, dt: f64) -> f64 {
        let amplitude = self.a * self.h0;
        let decaying = if self.b > 0.0 {
            amplitude * (-self.b * t0).exp() * (-(-self.b * dt).exp_m1()) / self.b
        } else {
            amplitude * dt
        };
        decaying + self.c * dt
    }
}

pub fn interfacial_area(t: f64, law: &DragLaw) -> f64 {
    law.a * law.h0 * (-law.b * t).exp() + law.c
}

/// Resets layer heights to pressure equilibrium, keeping each h·ρ.
///
/// The light layer returns to its reference density; the heavy layer takes
/// the hydrostatically loaded density ρ₁(0) + ρ₂* g h₂* / c₁².
pub fn pressure_relax(cell: &CellState, fluids: &Fluids, g: f64) -> CellState {
    let m1 = cell.lower.mass();
    let m2 = cell.upper.mass();
    let rho2 = fluids.upper.rho_ref;
    let h2 = m2 / rho2;
    let c1 = fluids.lower.c_phys;
    let rho1 = fluids.lower.rho_ref + rho2 * g * h2 / (c1 * c1);
    let h1 = m1 / rho1;
    CellState {
        lower: LayerState { h: h1, rho: m1 / h1, u: cell.lower.u },
        upper: LayerState { h: h2, rho: rho2, u: cell.upper.u },
    }
}

/// Integrates the interlayer drag over `[t0, t0 + dt]` exactly.
///
/// `impedances` are the constant acoustic impedances (Z₁, Z₂).
pub fn velocity_relax(cell: &CellState, t0: f64, dt: f64, law: &DragLaw, impedances: (f64, f64)) -> CellState {
    let (z1, z2) = impedances;
    let m1 = cell.lower.mass();
    let m2 = cell.upper.mass();
    let (u1, u2) = (cell.lower.u, cell.upper.u);
    let cst = -(z1 * z2 / (z1 + z2)) * (1.0 / m1 + 1.0 / m2);
    let exponent = cst * law.integrated_area(t0, dt);
    if exponent == 0.0 {
        return *cell;
    }
    let slip = (u2 - u1) * exponent.exp();
    let total = m1 * u1 + m2 * u2;
    let new_u2 = (total + m1 * slip) / (m1 + m2);
    let new_u1 = new_u2 - slip;
    CellState {
        lower: LayerState { u: new_u1, ..cell.lower },
        upper: LayerState { u: new_u2, ..cell.upper },
    }
}
