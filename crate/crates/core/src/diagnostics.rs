//! Front tracking, box-model spreading law, Froude regression, scaling
//! transforms and the release-planning formulas.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::state::{CellState, Grid1D, H_MIN};

/// Ideal gas constant (J/(mol·K)).
pub const GAS_CONSTANT: f64 = 8.314;
/// kg/mol
pub const MOLAR_MASS_KRYPTON: f64 = 83.8e-3;
/// kg/mol
pub const MOLAR_MASS_AIR: f64 = 29e-3;
/// Dynamic viscosity of air near 15–18 °C (Pa·s).
pub const DEFAULT_MU_AIR: f64 = 1.81e-5;

/// Front radius samples R(t) of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontTrace {
    samples: Vec<(f64, f64)>,
    /// Initial column height (m).
    pub h0: f64,
    pub scenario: String,
}

impl FrontTrace {
    pub fn new(scenario: impl Into<String>, h0: f64) -> Self {
        Self { samples: Vec::new(), h0, scenario: scenario.into() }
    }

    pub fn from_samples(scenario: impl Into<String>, h0: f64, samples: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut trace = Self::new(scenario, h0);
        for (t, r) in samples {
            trace.push(t, r)?;
        }
        Ok(trace)
    }

    pub fn push(&mut self, t: f64, radius: f64) -> Result<()> {
        if let Some(&(last, _)) = self.samples.last() {
            if !(t > last) {
                return Err(Error::Diagnostics(format!("trace times must increase: {t} after {last}")));
            }
        }
        if !(radius >= 0.0) {
            return Err(Error::Diagnostics(format!("negative front radius {radius} at t = {t}")));
        }
        self.samples.push((t, radius));
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Linear interpolation of R at `t`; `None` outside the sampled range.
    pub fn radius_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        let idx = s.partition_point(|&(ti, _)| ti < t);
        if idx < s.len() && s[idx].0 == t {
            return Some(s[idx].1);
        }
        if idx == 0 || idx == s.len() {
            return None;
        }
        let (t0, r0) = s[idx - 1];
        let (t1, r1) = s[idx];
        Some(r0 + (r1 - r0) * (t - t0) / (t1 - t0))
    }
}

/// Heavy-layer heights up to this multiple of the floor count as "no gas".
pub const PRESENCE_FACTOR: f64 = 2.0;

/// Position of the heavy-gas front.
///
/// Scans from the right boundary for the first adjacent pair whose h₁h₂
/// products differ by more than `epsilon`, where at least one of the two
/// cells holds heavy gas above [`PRESENCE_FACTOR`]·[`H_MIN`], and returns the
/// midpoint of the two centers; 0 when no such pair exists. Without the
/// presence test, air-layer waves running over the floor state trip the
/// threshold far ahead of the gas.
pub fn front_position(field: &[CellState], grid: &Grid1D, epsilon: f64) -> f64 {
    let present = |c: &CellState| c.lower.h > PRESENCE_FACTOR * H_MIN;
    (0..field.len().saturating_sub(1))
        .rev()
        .find(|&i| {
            let (a, b) = (&field[i], &field[i + 1]);
            (present(a) || present(b)) && (a.height_product() - b.height_product()).abs() > epsilon
        })
        .map(|i| 0.5 * (grid.cell_center(i) + grid.cell_center(i + 1)))
        .unwrap_or(0.0)
}

/// Inputs of the constant-volume box model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxModelParams {
    pub froude: f64,
    /// Released gas volume (m³).
    pub volume: f64,
    pub rho_gas: f64,
    pub rho_air: f64,
    pub g: f64,
    /// Initial cloud area (m²).
    pub a0: f64,
}

impl BoxModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_gas > self.rho_air && self.rho_air > 0.0) {
            return Err(Error::Diagnostics(format!(
                "box model needs rho_gas > rho_air > 0, got {} and {}",
                self.rho_gas, self.rho_air
            )));
        }
        if !(self.froude >= 0.0 && self.volume > 0.0 && self.g > 0.0) {
            return Err(Error::Diagnostics("box model needs Fr ≥ 0, V > 0, g > 0".into()));
        }
        Ok(())
    }

    /// √(g V/π · (ρ_gas − ρ_air)/ρ_air), the area growth rate per unit Froude number over 2π.
    pub fn buoyancy_scale(&self) -> f64 {
        (self.g * self.volume / PI * (self.rho_gas - self.rho_air) / self.rho_air).sqrt()
    }

    /// K = R dR/dt (m²/s).
    pub fn spreading_constant(&self) -> f64 {
        self.froude * self.buoyancy_scale()
    }

    /// dA/dt (m²/s).
    pub fn area_rate(&self) -> f64 {
        2.0 * PI * self.spreading_constant()
    }
}

/// Cloud area A(t) = 2π Fr √(gV/π · Δρ/ρ_air) t + A₀.
pub fn box_model_area(t: f64, p: &BoxModelParams) -> f64 {
    p.area_rate() * t + p.a0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root mean square of the residuals.
    pub residual_rms: f64,
    pub samples: usize,
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::Diagnostics("regression inputs differ in length".into()));
    }
    if n < 3 {
        return Err(Error::Diagnostics(format!("regression needs at least 3 samples, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let sum_sq: f64 = xs.iter().map(|x| x * x).sum();
    if !(sxx > 4.0 * f64::EPSILON * sum_sq) {
        return Err(Error::Diagnostics("regression times have zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LinearFit { slope, intercept, r_squared, residual_rms: (ss_res / nf).sqrt(), samples: n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FroudeFit {
    pub froude: f64,
    /// Area regression A(t) = slope·t + intercept over the window.
    pub area: LinearFit,
}

/// Regresses A = πR² on t inside `window` and inverts the box-model slope for Fr.
///
/// `p.froude` is ignored.
pub fn fit_froude(trace: &FrontTrace, p: &BoxModelParams, window: (f64, f64)) -> Result<FroudeFit> {
    let mut probe = *p;
    probe.froude = 1.0;
    probe.validate()?;
    let (ts, areas): (Vec<f64>, Vec<f64>) = trace
        .samples()
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .map(|&(t, r)| (t, PI * r * r))
        .unzip();
    let area = linear_fit(&ts, &areas)?;
    Ok(FroudeFit { froude: area.slope / (2.0 * PI * probe.buoyancy_scale()), area })
}

/// Dimensionless scaling factors S_r (1/m) and S_t (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling {
    pub s_r: f64,
    pub s_t: f64,
}

impl Scaling {
    /// `rc`: container radius, `h0`: column height, `rho0`/`rho_a`: gas and air densities.
    pub fn new(rc: f64, h0: f64, rho0: f64, rho_a: f64, g: f64) -> Result<Self> {
        if !(rc > 0.0 && h0 > 0.0) {
            return Err(Error::Diagnostics(format!("scaling needs Rc, h0 > 0, got {rc}, {h0}")));
        }
        if !(rho0 > rho_a && rho_a > 0.0) {
            return Err(Error::Diagnostics(format!("scaling needs rho0 > rho_a > 0, got {rho0}, {rho_a}")));
        }
        let s_r = (rc * rc * h0).powf(-1.0 / 3.0);
        let s_t = (s_r * g * (rho0 / rho_a - 1.0)).sqrt();
        Ok(Self { s_r, s_t })
    }

    /// λ = S_r R
    pub fn scale_radius(&self, r: f64) -> f64 {
        self.s_r * r
    }

    /// τ = S_t t
    pub fn scale_time(&self, t: f64) -> f64 {
        self.s_t * t
    }

    /// Σ = S_r² A
    pub fn scale_area(&self, a: f64) -> f64 {
        self.s_r * self.s_r * a
    }
}

/// Ideal-gas density ρ = (p/T)·(W/R̂).
pub fn gas_density(p: f64, temperature: f64, molar_mass: f64) -> f64 {
    p / temperature * molar_mass / GAS_CONSTANT
}

/// Filling duration and volume for a target height: (t, V) with t = πRc²h/Q.
pub fn fill_plan(h: f64, flow_rate: f64, rc: f64) -> (f64, f64) {
    let volume = PI * rc * rc * h;
    (volume / flow_rate, volume)
}

/// Volume and height actually filled after `duration`: (V, h).
pub fn fill_check(flow_rate: f64, duration: f64, rc: f64) -> (f64, f64) {
    let volume = flow_rate * duration;
    (volume, volume / (PI * rc * rc))
}

/// Spreading constant K (m²/s) and cloud Reynolds number ρ_air K / μ_air.
pub fn reynolds(p: &BoxModelParams, mu_air: f64) -> (f64, f64) {
    let k = p.spreading_constant();
    (k, p.rho_air / mu_air * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Geometry, LayerState};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn step_field(n: usize, edge: usize) -> Vec<CellState> {
        (0..n)
            .map(|i| {
                let h1 = if i <= edge { 0.1 } else { H_MIN };
                CellState::new(LayerState::new(h1, 3.5, 0.0), LayerState::new(1.2, 1.29, 0.0))
            })
            .collect()
    }

    fn kr15() -> BoxModelParams {
        BoxModelParams { froude: 0.85, volume: 1.18e-3, rho_gas: 3.41, rho_air: 1.29, g: 9.81, a0: PI * 0.05 * 0.05 }
    }

    #[test]
    fn front_of_uniform_field_is_zero() {
        let grid = Grid1D::new(Geometry::Planar, 0.6, 100).unwrap();
        let field = vec![step_field(1, 0)[0]; 100];
        assert_eq!(front_position(&field, &grid, 1e-10), 0.0);
    }

    #[test]
    fn front_of_step_field() {
        let grid = Grid1D::new(Geometry::Planar, 0.6, 100).unwrap();
        let field = step_field(100, 50);
        let expected = 0.5 * (grid.cell_center(50) + grid.cell_center(51));
        assert_relative_eq!(front_position(&field, &grid, 1e-10), expected, max_relative = 1e-15);
    }

    #[test]
    fn air_waves_over_floor_are_ignored() {
        let grid = Grid1D::new(Geometry::Planar, 0.6, 100).unwrap();
        let mut field = step_field(100, 30);
        for (i, c) in field.iter_mut().enumerate().skip(31) {
            c.upper.h = 1.2 + 1e-3 * (i as f64).sin();
            c.lower.h = H_MIN * (1.0 + 1e-3 * (i as f64).cos());
        }
        let expected = 0.5 * (grid.cell_center(30) + grid.cell_center(31));
        assert_relative_eq!(front_position(&field, &grid, 1e-10), expected, max_relative = 1e-15);
    }

    #[test]
    fn front_shifts_with_field() {
        let grid = Grid1D::new(Geometry::Planar, 0.6, 100).unwrap();
        let a = front_position(&step_field(100, 40), &grid, 1e-10);
        let b = front_position(&step_field(100, 41), &grid, 1e-10);
        assert_relative_eq!(b - a, grid.dx(), max_relative = 1e-12);
    }

    #[test]
    fn box_model_values() {
        let p = kr15();
        assert_eq!(box_model_area(0.0, &p), p.a0);
        let k = p.spreading_constant();
        assert!((k - 0.06).abs() < 0.2 * 0.06);
        assert_relative_eq!(p.area_rate(), 2.0 * PI * k, max_relative = 1e-15);
        let doubled = BoxModelParams { froude: 1.7, ..p };
        assert_relative_eq!(box_model_area(1.0, &doubled) - p.a0, 2.0 * (box_model_area(1.0, &p) - p.a0), max_relative = 1e-14);
    }

    #[test]
    fn fit_inverts_box_model() {
        let p = BoxModelParams { froude: 0.85, ..kr15() };
        let samples = (0..=100).map(|i| {
            let t = i as f64 * 0.01;
            (t, (box_model_area(t, &p) / PI).sqrt())
        });
        let trace = FrontTrace::from_samples("synthetic", 0.15, samples).unwrap();
        let fit = fit_froude(&trace, &p, (0.1, 1.0)).unwrap();
        assert_relative_eq!(fit.froude, 0.85, max_relative = 1e-12);
        assert!(fit.area.residual_rms < 1e-14);
        assert_relative_eq!(fit.area.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_needs_samples() {
        let trace = FrontTrace::from_samples("s", 0.1, [(0.0, 0.05), (0.5, 0.1)]).unwrap();
        assert!(fit_froude(&trace, &kr15(), (0.0, 1.0)).is_err());
        let flat = FrontTrace::from_samples("s", 0.1, [(0.2, 0.05)]).unwrap();
        assert!(linear_fit(&[0.2, 0.2, 0.2], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_froude(&flat, &kr15(), (0.0, 1.0)).is_err());
    }

    #[test]
    fn trace_rejects_unordered_times() {
        let mut trace = FrontTrace::new("s", 0.1);
        trace.push(0.1, 0.05).unwrap();
        assert!(trace.push(0.1, 0.06).is_err());
        assert!(trace.push(0.2, -0.1).is_err());
        assert_eq!(trace.radius_at(0.1), Some(0.05));
        trace.push(0.3, 0.15).unwrap();
        assert_relative_eq!(trace.radius_at(0.2).unwrap(), 0.1, max_relative = 1e-14);
        assert_eq!(trace.radius_at(0.4), None);
    }

    #[test]
    fn scaling_factors() {
        let s = Scaling::new(0.0498, 0.15, 3.40, 1.29, 9.81).unwrap();
        assert_relative_eq!(s.s_r, 13.904, epsilon = 1e-3);
        assert_relative_eq!(s.s_t, 14.937, epsilon = 1e-3);
        let unit = (0.0498f64 * 0.0498 * 0.15).cbrt();
        assert_relative_eq!(s.scale_radius(unit), 1.0, max_relative = 1e-14);
        assert_relative_eq!(s.scale_area(2.0), 2.0 * s.s_r * s.s_r, max_relative = 1e-15);
        assert!(Scaling::new(0.05, 0.1, 1.0, 1.29, 9.81).is_err());
    }

    #[test]
    fn ideal_gas_density() {
        assert!((gas_density(97_600.0, 289.95, MOLAR_MASS_KRYPTON) - 3.39).abs() < 0.005);
        assert!((gas_density(98_100.0, 291.0, MOLAR_MASS_KRYPTON) - 3.40).abs() < 0.005);
        assert_eq!(gas_density(0.0, 290.0, MOLAR_MASS_KRYPTON), 0.0);
    }

    #[test]
    fn fill_planning() {
        let q = 0.25e-3 / 60.0;
        let (t, _) = fill_plan(0.05, q, 0.0498);
        assert!((t - 94.0).abs() < 1.0, "fill time {t}");
        let (v, h) = fill_check(q, 284.0, 0.0498);
        assert!((v * 1e3 - 1.18).abs() < 5e-3, "volume {v}");
        assert!((h * 100.0 - 15.1).abs() <= 0.1, "height {h}");
        let (t, v) = fill_plan(0.123, q, 0.0498);
        let (v2, h2) = fill_check(q, t, 0.0498);
        assert_relative_eq!(v2, v, max_relative = 1e-14);
        assert_relative_eq!(h2, 0.123, max_relative = 1e-14);
    }

    #[test]
    fn reynolds_constants() {
        let (k15, re) = reynolds(&kr15(), DEFAULT_MU_AIR);
        assert!((k15 - 0.06).abs() <= 0.2 * 0.06, "K = {k15}");
        assert_relative_eq!(re, 1.29 / DEFAULT_MU_AIR * k15, max_relative = 1e-15);
        let p5 = BoxModelParams { froude: 0.69, volume: 0.39e-3, rho_gas: 3.40, ..kr15() };
        let (k5, _) = reynolds(&p5, DEFAULT_MU_AIR);
        assert!((k5 - 0.03).abs() <= 0.2 * 0.03, "K = {k5}");
        let still = BoxModelParams { froude: 0.0, ..kr15() };
        assert_eq!(reynolds(&still, DEFAULT_MU_AIR), (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn froude_round_trip(fr in 0.1f64..2.0, v in 1e-4f64..1e-2, a0 in 0.0f64..0.05) {
            let p = BoxModelParams { froude: fr, volume: v, a0, ..kr15() };
            let trace = FrontTrace::from_samples("s", 0.1, (0..50).map(|i| {
                let t = 0.02 * i as f64;
                (t, (box_model_area(t, &p) / PI).sqrt())
            })).unwrap();
            let fit = fit_froude(&trace, &p, (0.0, 1.0)).unwrap();
            prop_assert!((fit.froude - fr).abs() <= 1e-10 * fr);
        }

        #[test]
        fn scaled_box_model_collapses(fr in 0.3f64..1.2, h0a in 0.02f64..0.3, h0b in 0.02f64..0.3, tau in 0.0f64..20.0) {
            // equal Fr, different column heights: Σ(τ) − Σ(0) is identical
            let rc = 0.05;
            let sigma = |h0: f64| {
                let s = Scaling::new(rc, h0, 3.5, 1.29, 9.81).unwrap();
                let p = BoxModelParams { froude: fr, volume: PI * rc * rc * h0, rho_gas: 3.5, rho_air: 1.29, g: 9.81, a0: 0.0 };
                s.scale_area(box_model_area(tau / s.s_t, &p))
            };
            let (a, b) = (sigma(h0a), sigma(h0b));
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12));
        }

        #[test]
        fn density_linearity(p in 1e4f64..2e5, t in 200.0f64..400.0, w in 1e-3f64..0.2, k in 0.1f64..10.0) {
            let base = gas_density(p, t, w);
            prop_assert!((gas_density(k * p, t, w) - k * base).abs() <= 1e-12 * k * base);
            prop_assert!((gas_density(p, t, k * w) - k * base).abs() <= 1e-12 * k * base);
            prop_assert!((gas_density(p, k * t, w) - base / k).abs() <= 1e-12 * base / k);
        }
    }
}
