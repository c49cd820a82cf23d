//! Closed-form cycle statistics of the two-qubit SWAP machine.
//!
//! Qubit A (gap `ω_A`) thermalizes with the hot bath, qubit B (gap `ω_B`)
//! with the cold one; a SWAP exchanges their states. Everything below is a
//! function of the reduced state [`EffectivePoint`], i.e. the two gaps and the
//! two effective inverse temperatures. With `a = β^eff_A ω_A` and
//! `b = β^eff_B ω_B` the net population transfer per cycle is
//! `⟨Δn⟩ = (tanh(a/2) - tanh(b/2)) / 2`, and each current is a gap times
//! `Δn`.

use serde::{Deserialize, Serialize};

use crate::detector::{effective_inverse_temperature, BathSpec, DetectorSpec};
use crate::error::{Error, Result};
use crate::numerics::{generalized_tur_rhs, maximize_scalar, x_coth_half_x, Tolerance};

/// Relative width of the regime boundaries classified as [`OperatingRegime::Idle`].
pub const REGIME_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachineConfig {
    pub omega_a: f64,
    pub omega_b: f64,
    pub bath_a: BathSpec,
    pub bath_b: BathSpec,
    pub speed_a: f64,
    pub speed_b: f64,
}

impl MachineConfig {
    /// Validates gaps and speeds, and that bath A is not colder than bath B.
    ///
    /// Equal bath temperatures are accepted: with static qubits they give the
    /// idle equilibrium point.
    pub fn new(
        omega_a: f64,
        omega_b: f64,
        bath_a: BathSpec,
        bath_b: BathSpec,
        speed_a: f64,
        speed_b: f64,
    ) -> Result<Self> {
        for (field, gap) in [("omega_a", omega_a), ("omega_b", omega_b)] {
            if !(gap > 0.0) || !gap.is_finite() {
                return Err(Error::config(
                    field,
                    format!("must be positive and finite, got {gap}"),
                ));
            }
        }
        for (field, v) in [("speed_a", speed_a), ("speed_b", speed_b)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::config(field, format!("must lie in [0, 1), got {v}")));
            }
        }
        if bath_a.temperature() < bath_b.temperature() {
            return Err(Error::config(
                "temperature_a",
                format!(
                    "hot bath A ({}) must not be colder than bath B ({})",
                    bath_a.temperature(),
                    bath_b.temperature()
                ),
            ));
        }
        Ok(MachineConfig {
            omega_a,
            omega_b,
            bath_a,
            bath_b,
            speed_a,
            speed_b,
        })
    }
}

/// Reduced machine state: gaps and effective inverse temperatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectivePoint {
    pub omega_a: f64,
    pub omega_b: f64,
    pub beta_eff_a: f64,
    pub beta_eff_b: f64,
}

impl EffectivePoint {
    pub fn new(omega_a: f64, omega_b: f64, beta_eff_a: f64, beta_eff_b: f64) -> Result<Self> {
        for (name, x) in [
            ("omega_a", omega_a),
            ("omega_b", omega_b),
            ("beta_eff_a", beta_eff_a),
            ("beta_eff_b", beta_eff_b),
        ] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {x}"
                )));
            }
        }
        Ok(EffectivePoint {
            omega_a,
            omega_b,
            beta_eff_a,
            beta_eff_b,
        })
    }

    /// `β^eff_A ω_A`
    pub fn a(&self) -> f64 {
        self.beta_eff_a * self.omega_a
    }

    /// `β^eff_B ω_B`
    pub fn b(&self) -> f64 {
        self.beta_eff_b * self.omega_b
    }

    pub fn frequency_ratio(&self) -> f64 {
        self.omega_b / self.omega_a
    }

    /// `β^eff_A / β^eff_B = T^eff_B / T^eff_A`
    pub fn temperature_ratio(&self) -> f64 {
        self.beta_eff_a / self.beta_eff_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatingRegime {
    Refrigerator,
    Engine,
    Accelerator,
    Idle,
}

impl OperatingRegime {
    pub fn name(&self) -> &'static str {
        match self {
            OperatingRegime::Refrigerator => "Refrigerator",
            OperatingRegime::Engine => "Engine",
            OperatingRegime::Accelerator => "Accelerator",
            OperatingRegime::Idle => "Idle",
        }
    }
}

impl std::fmt::Display for OperatingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleStatistics {
    pub mean_work: f64,
    pub mean_heat_hot: f64,
    pub mean_heat_cold: f64,
    pub var_work: f64,
    pub var_heat_hot: f64,
    pub var_heat_cold: f64,
    pub entropy_production: f64,
    /// `None` at the reversible point `a = b`, where all means vanish.
    pub snr: Option<f64>,
    pub regime: OperatingRegime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurReport {
    pub snr: f64,
    pub classical_rhs: f64,
    pub shifted_rhs: f64,
    pub generalized_rhs: f64,
    pub ratio_r: f64,
}

/// Regime-dependent performance figures; fields outside the active regime
/// are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Performance {
    pub efficiency: Option<f64>,
    pub carnot_efficiency_eff: Option<f64>,
    pub efficiency_power_rhs: Option<f64>,
    pub cop: Option<f64>,
    pub cop_carnot_eff: Option<f64>,
    pub cop_tradeoff_rhs: Option<f64>,
    pub figure_of_merit: Option<f64>,
}

/// Effective point of the full pipeline: each qubit's `β^eff` at its own gap.
pub fn make_point(cfg: &MachineConfig) -> Result<EffectivePoint> {
    let qubit_a = DetectorSpec::new(cfg.omega_a, cfg.speed_a)?;
    let qubit_b = DetectorSpec::new(cfg.omega_b, cfg.speed_b)?;
    EffectivePoint::new(
        cfg.omega_a,
        cfg.omega_b,
        effective_inverse_temperature(&qubit_a, &cfg.bath_a)?,
        effective_inverse_temperature(&qubit_b, &cfg.bath_b)?,
    )
}

/// `tanh x - tanh y` without cancellation when `x ≈ y`.
pub(crate) fn tanh_diff(x: f64, y: f64) -> f64 {
    if x.abs().max(y.abs()) < 300.0 {
        (x - y).sinh() / (x.cosh() * y.cosh())
    } else {
        x.tanh() - y.tanh()
    }
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// `⟨Δn⟩ = (tanh(a/2) - tanh(b/2)) / 2`, the mean excitation carried from A to B.
fn mean_transfer(p: &EffectivePoint) -> f64 {
    0.5 * tanh_diff(0.5 * p.a(), 0.5 * p.b())
}

/// `Var[Δn] = p_a(1-p_a) + p_b(1-p_b)`
fn transfer_variance(p: &EffectivePoint) -> f64 {
    0.25 * (sech2(0.5 * p.a()) + sech2(0.5 * p.b()))
}

pub fn mean_work(p: &EffectivePoint) -> f64 {
    (p.omega_a - p.omega_b) * mean_transfer(p)
}

pub fn mean_heat_hot(p: &EffectivePoint) -> f64 {
    -p.omega_a * mean_transfer(p)
}

pub fn mean_heat_cold(p: &EffectivePoint) -> f64 {
    p.omega_b * mean_transfer(p)
}

pub fn variance_work(p: &EffectivePoint) -> f64 {
    let (a, b) = (p.a(), p.b());
    let d = p.omega_a - p.omega_b;
    let (ca, cb) = ((0.5 * a).cosh(), (0.5 * b).cosh());
    d * d * (2.0 + a.cosh() + b.cosh()) / (8.0 * ca * ca * cb * cb)
}

pub fn variance_heat_hot(p: &EffectivePoint) -> f64 {
    p.omega_a * p.omega_a / 4.0 * (sech2(0.5 * p.a()) + sech2(0.5 * p.b()))
}

pub fn variance_heat_cold(p: &EffectivePoint) -> f64 {
    p.omega_b * p.omega_b * transfer_variance(p)
}

/// `⟨Σ⟩ = (a - b)/2 · (tanh(a/2) - tanh(b/2))`, never negative.
pub fn entropy_production(p: &EffectivePoint) -> f64 {
    let (a, b) = (p.a(), p.b());
    0.5 * (a - b) * tanh_diff(0.5 * a, 0.5 * b)
}

/// Noise-to-signal ratio `Var[Q_H]/⟨Q_H⟩²`, shared by work and heat.
pub fn snr(p: &EffectivePoint) -> Result<f64> {
    if p.a() == p.b() {
        return Err(Error::Degenerate(
            "noise-to-signal ratio undefined at a = b (all currents vanish)".into(),
        ));
    }
    let q = mean_heat_hot(p);
    Ok(variance_heat_hot(p) / (q * q))
}

/// `R = ⟨Σ⟩·SNR = f(a - b) - ⟨Σ⟩` with `f(x) = x·coth(x/2)`; the second form is
/// regular at `a = b`, where `R = 2`.
pub fn tur_ratio(p: &EffectivePoint) -> f64 {
    x_coth_half_x(p.a() - p.b()) - entropy_production(p)
}

pub fn classify_regime(p: &EffectivePoint) -> OperatingRegime {
    let r = p.frequency_ratio();
    let q = p.temperature_ratio();
    if (r - 1.0).abs() <= REGIME_BOUNDARY_TOL || (r - q).abs() <= REGIME_BOUNDARY_TOL * q {
        OperatingRegime::Idle
    } else if r > 1.0 {
        OperatingRegime::Accelerator
    } else if r < q {
        OperatingRegime::Refrigerator
    } else {
        OperatingRegime::Engine
    }
}

pub fn cycle_statistics(p: &EffectivePoint) -> CycleStatistics {
    CycleStatistics {
        mean_work: mean_work(p),
        mean_heat_hot: mean_heat_hot(p),
        mean_heat_cold: mean_heat_cold(p),
        var_work: variance_work(p),
        var_heat_hot: variance_heat_hot(p),
        var_heat_cold: variance_heat_cold(p),
        entropy_production: entropy_production(p),
        snr: snr(p).ok(),
        regime: classify_regime(p),
    }
}

pub fn tur_report(p: &EffectivePoint) -> Result<TurReport> {
    let sigma = entropy_production(p);
    if !(sigma > 0.0) {
        return Err(Error::Degenerate(format!(
            "uncertainty relations need positive entropy production, got {sigma:e}"
        )));
    }
    let snr = snr(p)?;
    Ok(TurReport {
        snr,
        classical_rhs: 2.0 / sigma,
        shifted_rhs: 2.0 / sigma - 1.0,
        generalized_rhs: generalized_tur_rhs(sigma)?,
        ratio_r: sigma * snr,
    })
}

fn require(p: &EffectivePoint, expected: OperatingRegime) -> Result<()> {
    let actual = classify_regime(p);
    if actual != expected {
        return Err(Error::Regime {
            expected: expected.name(),
            actual: actual.name(),
        });
    }
    Ok(())
}

/// Otto efficiency `1 - ω_B/ω_A`.
pub fn otto_efficiency(p: &EffectivePoint) -> Result<f64> {
    require(p, OperatingRegime::Engine)?;
    Ok(1.0 - p.frequency_ratio())
}

/// `η_C^eff = 1 - T^eff_B/T^eff_A`
pub fn carnot_efficiency_eff(p: &EffectivePoint) -> f64 {
    1.0 - p.temperature_ratio()
}

/// `η_C^eff / (1 + 2⟨P⟩T^eff_B/⟨P²⟩)` with `P = -W` and `⟨P²⟩` the second moment.
pub fn efficiency_power_tradeoff_rhs(p: &EffectivePoint) -> Result<f64> {
    require(p, OperatingRegime::Engine)?;
    let power = -mean_work(p);
    let second_moment = variance_work(p) + power * power;
    let t_cold = 1.0 / p.beta_eff_b;
    Ok(carnot_efficiency_eff(p) / (1.0 + 2.0 * power * t_cold / second_moment))
}

/// Refrigerator COP `ω_B/(ω_A - ω_B)`.
pub fn cop(p: &EffectivePoint) -> Result<f64> {
    require(p, OperatingRegime::Refrigerator)?;
    Ok(p.omega_b / (p.omega_a - p.omega_b))
}

/// `ε_C^eff = 1/(T^eff_A/T^eff_B - 1)`
pub fn cop_carnot_eff(p: &EffectivePoint) -> Result<f64> {
    cop_carnot_from_betas(p.beta_eff_a, p.beta_eff_b)
}

pub(crate) fn cop_carnot_from_betas(beta_a: f64, beta_b: f64) -> Result<f64> {
    if beta_a == beta_b {
        return Err(Error::Degenerate(
            "Carnot COP diverges at equal effective temperatures".into(),
        ));
    }
    Ok(beta_a / (beta_b - beta_a))
}

/// `ε_C^eff / (1 + 2T^eff_A ε_C^eff ⟨Q_C⟩/⟨Q_C²⟩)`
pub fn cop_tradeoff_rhs(p: &EffectivePoint) -> Result<f64> {
    require(p, OperatingRegime::Refrigerator)?;
    let eps_c = cop_carnot_eff(p)?;
    let q_c = mean_heat_cold(p);
    let second_moment = variance_heat_cold(p) + q_c * q_c;
    let t_hot = 1.0 / p.beta_eff_a;
    Ok(eps_c / (1.0 + 2.0 * t_hot * eps_c * q_c / second_moment))
}

/// `χ = ε·⟨Q_C⟩`. Also accepted on the reversible boundary `a = b` below
/// `ω_B = ω_A`, where it vanishes.
pub fn figure_of_merit(p: &EffectivePoint) -> Result<f64> {
    let r = p.frequency_ratio();
    match classify_regime(p) {
        OperatingRegime::Refrigerator => {}
        OperatingRegime::Idle
            if r < 1.0 && (r - p.temperature_ratio()).abs() <= REGIME_BOUNDARY_TOL * r => {}
        other => {
            return Err(Error::Regime {
                expected: OperatingRegime::Refrigerator.name(),
                actual: other.name(),
            })
        }
    }
    let eps = p.omega_b / (p.omega_a - p.omega_b);
    Ok(eps * mean_heat_cold(p))
}

/// Frequency ratio `ω_B/ω_A` maximizing `χ` in the high-temperature regime:
/// `(β_A + 3β_B - √((β_A - β_B)(β_A - 9β_B))) / (4β_B)`.
pub fn optimal_frequency_ratio_chi(beta_eff_a: f64, beta_eff_b: f64) -> Result<f64> {
    if !(beta_eff_a > 0.0) || !(beta_eff_b > 0.0) || beta_eff_a > beta_eff_b {
        return Err(Error::domain(format!(
            "refrigerator optimum needs 0 < β_A^eff <= β_B^eff, got ({beta_eff_a}, {beta_eff_b})"
        )));
    }
    let disc = (beta_eff_a - beta_eff_b) * (beta_eff_a - 9.0 * beta_eff_b);
    if disc < 0.0 {
        return Err(Error::domain(format!("negative discriminant {disc:e}")));
    }
    Ok((beta_eff_a + 3.0 * beta_eff_b - disc.sqrt()) / (4.0 * beta_eff_b))
}

/// Brute-force counterpart of [`optimal_frequency_ratio_chi`]: golden-section
/// maximization of the exact `χ(ω_B)` at fixed `ω_A`, over the refrigerator
/// window `0 < ω_B/ω_A < β_A/β_B`. Agrees with the closed form as
/// `β_A ω_A → 0`.
pub fn maximize_figure_of_merit(
    omega_a: f64,
    beta_eff_a: f64,
    beta_eff_b: f64,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    let q = beta_eff_a / beta_eff_b;
    if !(q < 1.0) {
        return Err(Error::domain(format!(
            "no refrigerator window for β_A^eff/β_B^eff = {q}"
        )));
    }
    let chi = |r: f64| {
        EffectivePoint::new(omega_a, r * omega_a, beta_eff_a, beta_eff_b)
            .and_then(|p| figure_of_merit(&p))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let edge = 1e-9 * q;
    maximize_scalar(chi, edge, q - edge, tol)
}

/// COP at maximum figure of merit, `(√(8ε_C^eff + 9) - 3)/2`.
pub fn cop_at_max_chi(eps_carnot_eff: f64) -> Result<f64> {
    if !(eps_carnot_eff >= 0.0) {
        return Err(Error::domain(format!(
            "Carnot COP must be non-negative, got {eps_carnot_eff}"
        )));
    }
    // rationalized form of (√(8ε+9) - 3)/2
    Ok(4.0 * eps_carnot_eff / ((8.0 * eps_carnot_eff + 9.0).sqrt() + 3.0))
}

pub fn performance(p: &EffectivePoint) -> Performance {
    let mut out = Performance::default();
    match classify_regime(p) {
        OperatingRegime::Engine => {
            out.efficiency = otto_efficiency(p).ok();
            out.carnot_efficiency_eff = Some(carnot_efficiency_eff(p));
            out.efficiency_power_rhs = efficiency_power_tradeoff_rhs(p).ok();
        }
        OperatingRegime::Refrigerator => {
            out.cop = cop(p).ok();
            out.cop_carnot_eff = cop_carnot_eff(p).ok();
            out.cop_tradeoff_rhs = cop_tradeoff_rhs(p).ok();
            out.figure_of_merit = figure_of_merit(p).ok();
        }
        OperatingRegime::Accelerator | OperatingRegime::Idle => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn worked() -> EffectivePoint {
        EffectivePoint::new(1.0, 0.5, 0.5, 2.0).unwrap()
    }

    // 40-digit reference values for the worked point (ω_A, ω_B, β_A, β_B) = (1, 0.5, 0.5, 2).
    const W: f64 = -0.054_299_623_714_075_157;
    const QH: f64 = 0.108_599_247_428_150_315;
    const SIGMA: f64 = 0.054_299_623_714_075_157;
    const VAR_W: f64 = 0.107_903_911_360_769_085;
    const VAR_QH: f64 = 0.431_615_645_443_076_342;
    const SNR: f64 = 36.596_836_642_674_871_689;

    #[test]
    fn worked_point_moments() {
        let p = worked();
        assert!(rel(mean_work(&p), W) < 1e-14);
        assert!(rel(mean_heat_hot(&p), QH) < 1e-14);
        assert!(rel(mean_heat_cold(&p), W) < 1e-14);
        assert!(rel(variance_work(&p), VAR_W) < 1e-14);
        assert!(rel(variance_heat_hot(&p), VAR_QH) < 1e-14);
        assert!(rel(entropy_production(&p), SIGMA) < 1e-14);
        assert!(rel(snr(&p).unwrap(), SNR) < 1e-13);
    }

    #[test]
    fn entropy_production_matches_defining_form() {
        let p = worked();
        let defining =
            (p.beta_eff_b - p.beta_eff_a) * mean_heat_hot(&p) + p.beta_eff_b * mean_work(&p);
        assert!(rel(entropy_production(&p), defining) < 1e-14);
    }

    #[test]
    fn degenerate_points() {
        let same_gap = EffectivePoint::new(1.0, 1.0, 0.5, 2.0).unwrap();
        assert_eq!(mean_work(&same_gap), 0.0);
        assert_eq!(variance_work(&same_gap), 0.0);
        let reversible = EffectivePoint::new(1.0, 0.25, 0.5, 2.0).unwrap();
        assert_eq!(reversible.a(), reversible.b());
        assert_eq!(mean_work(&reversible), 0.0);
        assert_eq!(mean_heat_hot(&reversible), 0.0);
        assert_eq!(mean_heat_cold(&reversible), 0.0);
        assert_eq!(entropy_production(&reversible), 0.0);
        assert!(matches!(snr(&reversible), Err(Error::Degenerate(_))));
        assert!(matches!(tur_report(&reversible), Err(Error::Degenerate(_))));
        assert_eq!(tur_ratio(&reversible), 2.0);
    }

    #[test]
    fn frozen_populations_kill_fluctuations() {
        let p = EffectivePoint::new(1.0, 0.5, 400.0, 900.0).unwrap();
        assert!(variance_work(&p) < 1e-80);
        assert!(variance_heat_hot(&p) < 1e-80);
    }

    #[test]
    fn infinite_temperature_heat_variance() {
        let p = EffectivePoint::new(2.0, 0.5, 1e-300, 1e-300).unwrap();
        assert!(rel(variance_heat_hot(&p), 2.0) < 1e-15);
    }

    #[test]
    fn refrigerator_cold_heat_positive() {
        let p = EffectivePoint::new(1.0, 0.2, 0.5, 2.0).unwrap();
        let expected = 0.1 * (0.25f64.tanh() - 0.2f64.tanh());
        assert!(expected > 0.0);
        assert!(rel(mean_heat_cold(&p), expected) < 1e-14);
        assert_eq!(classify_regime(&p), OperatingRegime::Refrigerator);
    }

    #[test]
    fn heat_hot_sign_follows_b_minus_a() {
        let p = EffectivePoint::new(1.0, 0.8, 0.5, 2.0).unwrap();
        assert!(p.b() > p.a() && mean_heat_hot(&p) > 0.0);
    }

    #[test]
    fn tur_report_worked_point() {
        let t = tur_report(&worked()).unwrap();
        assert!(rel(t.snr, SNR) < 1e-13);
        assert!(rel(t.classical_rhs, 36.832_667_764_538_751_439) < 1e-13);
        assert!(rel(t.shifted_rhs, 35.832_667_764_538_751_439) < 1e-13);
        assert!(rel(t.generalized_rhs, 36.168_426_916_902_086_442) < 1e-10);
        assert!(rel(t.ratio_r, 1.987_194_458_822_723_127) < 1e-13);
        assert!(t.snr < t.classical_rhs);
        assert!(t.snr >= t.shifted_rhs && t.snr >= t.generalized_rhs);
    }

    #[test]
    fn ratio_r_tends_to_two_at_equilibrium() {
        for eps in [1e-3, 1e-5, 1e-7] {
            let p = EffectivePoint::new(1.0, 1.0 + eps, 1.0, 1.0).unwrap();
            assert!((tur_report(&p).unwrap().ratio_r - 2.0).abs() < 10.0 * eps);
            assert!((tur_ratio(&p) - 2.0).abs() < 10.0 * eps);
        }
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(&worked()), OperatingRegime::Engine);
        assert!(mean_work(&worked()) < 0.0);
        let acc = EffectivePoint::new(1.0, 1.2, 0.5, 2.0).unwrap();
        assert_eq!(classify_regime(&acc), OperatingRegime::Accelerator);
        let idle = EffectivePoint::new(1.0, 1.0, 0.5, 2.0).unwrap();
        assert_eq!(classify_regime(&idle), OperatingRegime::Idle);
        let boundary = EffectivePoint::new(1.0, 0.25, 0.5, 2.0).unwrap();
        assert_eq!(classify_regime(&boundary), OperatingRegime::Idle);
    }

    #[test]
    fn moving_hot_qubit_shifts_refrigerator_boundary() {
        // β_A/β_B = 1/2, v_A = 0.8, high temperature
        let cfg = |ratio: f64| {
            MachineConfig::new(
                1e-3,
                ratio * 1e-3,
                BathSpec::new(2.0).unwrap(),
                BathSpec::new(1.0).unwrap(),
                0.8,
                0.0,
            )
            .unwrap()
        };
        let fridge = make_point(&cfg(0.60)).unwrap();
        let engine = make_point(&cfg(0.61)).unwrap();
        assert_eq!(classify_regime(&fridge), OperatingRegime::Refrigerator);
        assert_eq!(classify_regime(&engine), OperatingRegime::Engine);
        let q = fridge.temperature_ratio();
        assert!((q - 0.606_826_151_084_558_262).abs() < 1e-6, "{q}");
    }

    #[test]
    fn make_point_static_and_equal_speed() {
        let cfg = MachineConfig::new(
            1.0,
            0.5,
            BathSpec::from_inverse_temperature(0.5).unwrap(),
            BathSpec::from_inverse_temperature(1.0).unwrap(),
            0.0,
            0.0,
        )
        .unwrap();
        let p = make_point(&cfg).unwrap();
        assert_eq!((p.beta_eff_a, p.beta_eff_b), (0.5, 1.0));

        let moving = MachineConfig {
            omega_a: 1e-3,
            omega_b: 1e-3,
            speed_a: 0.8,
            speed_b: 0.8,
            ..cfg
        };
        let p = make_point(&moving).unwrap();
        assert!(rel(p.beta_eff_a, 0.5 / 0.823_959_216_501_082_269) < 1e-6);
        assert!(rel(p.temperature_ratio(), 0.5) < 1e-6);
    }

    #[test]
    fn config_validation() {
        let hot = BathSpec::new(2.0).unwrap();
        let cold = BathSpec::new(1.0).unwrap();
        assert!(matches!(
            MachineConfig::new(1.0, 0.5, hot, cold, 1.5, 0.0),
            Err(Error::Config { ref field, .. }) if field == "speed_a"
        ));
        assert!(matches!(
            MachineConfig::new(1.0, 0.5, cold, hot, 0.0, 0.0),
            Err(Error::Config { .. })
        ));
        assert!(MachineConfig::new(1.0, 0.5, cold, cold, 0.0, 0.0).is_ok());
        assert!(MachineConfig::new(-1.0, 0.5, hot, cold, 0.0, 0.0).is_err());
        assert!(EffectivePoint::new(1.0, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn engine_quantities() {
        let p = worked();
        assert_eq!(otto_efficiency(&p).unwrap(), 0.5);
        assert!(rel(-mean_work(&p) / mean_heat_hot(&p), 0.5) < 1e-14);
        assert_eq!(carnot_efficiency_eff(&p), 0.75);
        let rhs = efficiency_power_tradeoff_rhs(&p).unwrap();
        assert!(rel(rhs, 0.503_410_666_058_421_984) < 1e-13, "{rhs}");
        assert!(rhs >= 0.5 && rhs <= 0.75);
        let fridge = EffectivePoint::new(1.0, 0.2, 0.5, 2.0).unwrap();
        assert!(matches!(
            otto_efficiency(&fridge),
            Err(Error::Regime { .. })
        ));
        assert!(matches!(
            efficiency_power_tradeoff_rhs(&fridge),
            Err(Error::Regime { .. })
        ));
        let equal = EffectivePoint::new(1.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(carnot_efficiency_eff(&equal), 0.0);
    }

    #[test]
    fn static_carnot_efficiency() {
        let cfg = MachineConfig::new(
            1.0,
            0.5,
            BathSpec::new(3.0).unwrap(),
            BathSpec::new(1.0).unwrap(),
            0.0,
            0.0,
        )
        .unwrap();
        let p = make_point(&cfg).unwrap();
        assert!(rel(carnot_efficiency_eff(&p), 1.0 - 1.0 / 3.0) < 1e-15);
    }

    #[test]
    fn refrigerator_quantities() {
        let p = EffectivePoint::new(1.0, 0.2, 0.5, 2.0).unwrap();
        assert!(rel(cop(&p).unwrap(), 0.25) < 1e-15);
        let eps_c = cop_carnot_eff(&p).unwrap();
        assert!(rel(eps_c, 1.0 / 3.0) < 1e-15);
        let rhs = cop_tradeoff_rhs(&p).unwrap();
        assert!(cop(&p).unwrap() <= rhs && rhs <= eps_c);
        let chi = figure_of_merit(&p).unwrap();
        assert!(chi > 0.0);
        assert!(matches!(cop(&worked()), Err(Error::Regime { .. })));
        let twice = EffectivePoint::new(1.0, 0.2, 1.0, 2.0).unwrap();
        assert_eq!(cop_carnot_eff(&twice).unwrap(), 1.0);
        let same = EffectivePoint::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(cop_carnot_eff(&same), Err(Error::Degenerate(_))));
    }

    #[test]
    fn figure_of_merit_vanishes_on_reversible_boundary() {
        let p = EffectivePoint::new(1.0, 0.25, 0.5, 2.0).unwrap();
        assert_eq!(figure_of_merit(&p).unwrap(), 0.0);
        assert!(figure_of_merit(&worked()).is_err());
    }

    #[test]
    fn optimal_ratio_examples() {
        let r = optimal_frequency_ratio_chi(1.0, 2.0).unwrap();
        assert!(rel(r, 0.359_611_796_797_792_431) < 1e-15);
        assert!(rel(r / (1.0 - r), 0.561_552_812_808_830_275) < 1e-14);
        assert_eq!(optimal_frequency_ratio_chi(1.5, 1.5).unwrap(), 1.0);
        assert!(optimal_frequency_ratio_chi(2.0, 1.0).is_err());
        let r = optimal_frequency_ratio_chi(0.3, 1.7).unwrap();
        assert!(r > 0.0 && r < 0.3 / 1.7);
    }

    #[test]
    fn golden_section_finds_closed_form_in_high_t_limit() {
        let (beta_a, beta_b) = (1.0, 2.0);
        let closed = optimal_frequency_ratio_chi(beta_a, beta_b).unwrap();
        let (numeric, _) =
            maximize_figure_of_merit(1e-4, beta_a, beta_b, &Tolerance::default()).unwrap();
        assert!((numeric - closed).abs() < 1e-6, "{numeric} vs {closed}");
        // at ω_A = 1 the exact tanh moves the optimum (40-digit value)
        let (exact, _) =
            maximize_figure_of_merit(1.0, beta_a, beta_b, &Tolerance::default()).unwrap();
        assert!((exact - 0.353_340_585_167_743_520).abs() < 1e-6, "{exact}");
    }

    #[test]
    fn cop_at_max_chi_examples() {
        assert_eq!(cop_at_max_chi(0.0).unwrap(), 0.0);
        assert!(rel(cop_at_max_chi(1.0).unwrap(), 0.561_552_812_808_830_275) < 1e-15);
        assert!(rel(cop_at_max_chi(2.0).unwrap(), 1.0) < 1e-15);
        assert!(cop_at_max_chi(-0.1).is_err());
    }

    #[test]
    fn performance_by_regime() {
        let e = performance(&worked());
        assert!(e.efficiency.is_some() && e.cop.is_none());
        let f = performance(&EffectivePoint::new(1.0, 0.2, 0.5, 2.0).unwrap());
        assert!(f.cop.is_some() && f.figure_of_merit.is_some() && f.efficiency.is_none());
        let a = performance(&EffectivePoint::new(1.0, 1.5, 0.5, 2.0).unwrap());
        assert_eq!(a, Performance::default());
    }
}
