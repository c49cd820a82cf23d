//! A two-level Unruh-DeWitt detector moving at constant speed through a
//! thermal scalar-field bath.
//!
//! Rates are handled in the log domain throughout: the effective inverse
//! temperature is a difference of log-rates, so it stays accurate when both
//! rates are far below `f64::MIN_POSITIVE`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_one_minus_exp_neg, log_ratio_one_minus_exp};

/// Speeds below this use the small-velocity expansion of the rate.
pub const STATIC_SERIES_THRESHOLD: f64 = 1e-4;

/// Thermal field bath, characterized by its rest-frame temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    temperature: f64,
}

impl BathSpec {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::domain(format!(
                "bath temperature must be positive and finite, got {temperature}"
            )));
        }
        Ok(BathSpec { temperature })
    }

    pub fn from_inverse_temperature(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain(format!(
                "inverse temperature must be positive and finite, got {beta}"
            )));
        }
        Ok(BathSpec {
            temperature: 1.0 / beta,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn inverse_temperature(&self) -> f64 {
        1.0 / self.temperature
    }
}

/// A qubit detector with gap `ω`, speed `v` relative to the bath and
/// coupling `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    gap: f64,
    speed: f64,
    coupling: f64,
}

impl DetectorSpec {
    pub fn new(gap: f64, speed: f64) -> Result<Self> {
        Self::with_coupling(gap, speed, 1.0)
    }

    pub fn with_coupling(gap: f64, speed: f64, coupling: f64) -> Result<Self> {
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(Error::domain(format!(
                "detector gap must be positive, got {gap}"
            )));
        }
        check_speed(speed)?;
        if coupling == 0.0 || !coupling.is_finite() {
            return Err(Error::domain(format!(
                "detector coupling must be finite and nonzero, got {coupling}"
            )));
        }
        Ok(DetectorSpec {
            gap,
            speed,
            coupling,
        })
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn lorentz_factor(&self) -> f64 {
        lorentz_factor(self.speed)
    }
}

/// Late-time reduced state of a detector: a Gibbs state at `β^eff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub effective_inverse_temperature: f64,
    pub excitation_probability: f64,
}

fn check_speed(speed: f64) -> Result<()> {
    if !(0.0..1.0).contains(&speed) {
        return Err(Error::domain(format!(
            "speed must lie in [0, 1), got {speed}"
        )));
    }
    Ok(())
}

pub fn lorentz_factor(speed: f64) -> f64 {
    1.0 / ((1.0 - speed) * (1.0 + speed)).sqrt()
}

/// `ln |h'(x)|` with `h(x) = ln(1 - e^{-x})`, so `h'(x) = 1/(e^x - 1)`.
fn ln_abs_planck(x: f64) -> f64 {
    if x > 0.0 {
        -x - ln_one_minus_exp_neg(x)
    } else {
        -ln_one_minus_exp_neg(-x)
    }
}

/// `h'''(x) / h'(x) = (1 + e^{-x}) / (1 - e^{-x})²`.
fn planck_curvature_ratio(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        let d = (-x).exp_m1();
        (1.0 + e) / (d * d)
    } else {
        let e = x.exp();
        let d = x.exp_m1();
        e * (1.0 + e) / (d * d)
    }
}

/// Natural log of the transition rate `G(ω)`.
///
/// `G(ω) = λ²/(4πβγv) · ln[(1 - e^{-βγ(1+v)ω}) / (1 - e^{-βγ(1-v)ω})]`, with
/// the `v → 0` limit `λ²ω/(2π) · 1/(e^{βω} - 1)` taken through a series that
/// keeps the `O(v²)` correction.
pub fn ln_transition_rate(detector: &DetectorSpec, bath: &BathSpec, omega: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::domain(format!(
            "transition frequency must be finite and nonzero, got {omega}"
        )));
    }
    check_speed(detector.speed)?;
    let v = detector.speed;
    let beta = bath.inverse_temperature();
    let ln_coupling = 2.0 * detector.coupling.abs().ln();
    let ln_rate = if v < STATIC_SERIES_THRESHOLD {
        ln_unit_rate_series(beta, v, omega)
    } else {
        ln_unit_rate_closed(beta, v, omega)?
    };
    Ok(ln_coupling + ln_rate)
}

/// Small-speed expansion at unit coupling, with `x = βγω`:
/// `G = ω/(2π) · h'(x) · (1 + h'''(x)/h'(x) · x²v²/6 + O(v⁴))`.
fn ln_unit_rate_series(beta: f64, v: f64, omega: f64) -> f64 {
    let x = beta * lorentz_factor(v) * omega;
    let correction = planck_curvature_ratio(x) * x * x * v * v / 6.0;
    (omega.abs() / (2.0 * PI)).ln() + ln_abs_planck(x) + correction.ln_1p()
}

fn ln_unit_rate_closed(beta: f64, v: f64, omega: f64) -> Result<f64> {
    let gamma = lorentz_factor(v);
    let x_plus = beta * gamma * (1.0 + v) * omega;
    let x_minus = beta * gamma * (1.0 - v) * omega;
    let ln_prefactor = -(4.0 * PI * beta * gamma * v).ln();
    let ln_log_term = if omega > 0.0 {
        ln_small_log_ratio(x_plus, x_minus)
    } else {
        log_ratio_one_minus_exp(x_plus, x_minus)?.ln()
    };
    Ok(ln_prefactor + ln_log_term)
}

/// `ln ln[(1 - e^{-p}) / (1 - e^{-m})]` for `p > m > 0`.
///
/// The inner logarithm is `ln(1 + u)` with
/// `u = (e^{-m} - e^{-p}) / (1 - e^{-m})`; `ln u` is assembled from
/// log-one-minus-exp pieces so it never underflows.
fn ln_small_log_ratio(p: f64, m: f64) -> f64 {
    let ln_u = -m + ln_one_minus_exp_neg(p - m) - ln_one_minus_exp_neg(m);
    let u = ln_u.exp();
    let ln1p_over_u = if u < 1e-8 {
        (-0.5 * u).ln_1p()
    } else {
        (u.ln_1p() / u).ln()
    };
    ln_u + ln1p_over_u
}

/// Detector transition rate `G(ω)`; `ω > 0` is excitation, `ω < 0`
/// de-excitation.
pub fn transition_rate(detector: &DetectorSpec, bath: &BathSpec, omega: f64) -> Result<f64> {
    ln_transition_rate(detector, bath, omega).map(f64::exp)
}

/// `β^eff = ln(G(-ω)/G(ω)) / ω` at the detector gap.
pub fn effective_inverse_temperature(detector: &DetectorSpec, bath: &BathSpec) -> Result<f64> {
    if detector.speed == 0.0 {
        return Ok(bath.inverse_temperature());
    }
    let omega = detector.gap;
    let down = ln_transition_rate(detector, bath, -omega)?;
    let up = ln_transition_rate(detector, bath, omega)?;
    Ok((down - up) / omega)
}

pub fn effective_temperature(detector: &DetectorSpec, bath: &BathSpec) -> Result<f64> {
    effective_inverse_temperature(detector, bath).map(|b| 1.0 / b)
}

/// Leading high-temperature (`βω ≪ 1`) effective temperature,
/// `T/(2γv) · ln((1+v)/(1-v))`. Always below `T` for `v ∈ (0, 1)`.
pub fn effective_temperature_high_t(bath: &BathSpec, speed: f64) -> Result<f64> {
    if !(speed > 0.0 && speed < 1.0) {
        return Err(Error::domain(format!(
            "high-temperature effective temperature needs speed in (0, 1), got {speed}"
        )));
    }
    Ok(bath.temperature * high_t_factor(speed))
}

/// `T^eff/T` in the high-temperature regime, continuous at `v = 0`.
pub fn high_t_factor(speed: f64) -> f64 {
    if speed == 0.0 {
        return 1.0;
    }
    // ln((1+v)/(1-v)) = 2·atanh(v)
    speed.atanh() / (lorentz_factor(speed) * speed)
}

/// Excited-state population of a qubit in a Gibbs state at `β^eff`.
pub fn excitation_probability(beta_eff: f64, omega: f64) -> f64 {
    1.0 / (1.0 + (beta_eff * omega).exp())
}

pub fn ground_probability(beta_eff: f64, omega: f64) -> f64 {
    1.0 / (1.0 + (-beta_eff * omega).exp())
}

pub fn steady_state(detector: &DetectorSpec, bath: &BathSpec) -> Result<SteadyState> {
    let beta_eff = effective_inverse_temperature(detector, bath)?;
    Ok(SteadyState {
        effective_inverse_temperature: beta_eff,
        excitation_probability: excitation_probability(beta_eff, detector.gap),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn bath(beta: f64) -> BathSpec {
        BathSpec::from_inverse_temperature(beta).unwrap()
    }

    #[test]
    fn static_rate_matches_planck_form() {
        let d = DetectorSpec::new(1.0, 0.0).unwrap();
        let g = transition_rate(&d, &bath(1.0), 1.0).unwrap();
        // 1/(2π(e-1))
        assert!(rel(g, 0.092_624_469_662_596_300) < 1e-14, "{g}");
    }

    #[test]
    fn series_branch_meets_closed_form() {
        for beta_omega in [0.01, 1.0, 10.0, -0.3, -5.0] {
            let w = f64::signum(beta_omega);
            let beta = f64::abs(beta_omega);
            for v in [STATIC_SERIES_THRESHOLD, 1e-3] {
                let series = ln_unit_rate_series(beta, v, w);
                let closed = ln_unit_rate_closed(beta, v, w).unwrap();
                assert!(
                    (series - closed).abs() < 1e-10,
                    "βω={beta_omega}, v={v}: {series} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn near_static_rate_approaches_planck_limit() {
        let g0 = transition_rate(&DetectorSpec::new(1.0, 0.0).unwrap(), &bath(1.0), 1.0).unwrap();
        let g6 = transition_rate(&DetectorSpec::new(1.0, 1e-6).unwrap(), &bath(1.0), 1.0).unwrap();
        let closed = ln_unit_rate_closed(1.0, 1e-6, 1.0).unwrap().exp();
        assert!(rel(g6, g0) < 1e-11);
        assert!(rel(closed, g0) < 1e-8);
    }

    #[test]
    fn rate_vanishes_as_speed_approaches_light() {
        let b = bath(1.0);
        let mut prev = f64::INFINITY;
        for v in [0.9, 0.99, 0.999, 0.9999, 0.99999, 1.0 - 1e-8] {
            let g = transition_rate(&DetectorSpec::new(1.0, v).unwrap(), &b, 1.0).unwrap();
            assert!(g < prev);
            prev = g;
        }
        let g = transition_rate(&DetectorSpec::new(1.0, 0.99999).unwrap(), &b, 1.0).unwrap();
        assert!(rel(g, 0.002_172_369_545_139_628) < 1e-10, "{g}");
        assert!(prev < 1e-3);
    }

    #[test]
    fn deexcitation_exceeds_excitation() {
        for v in [0.0, 0.3, 0.8, 0.99] {
            for beta_omega in [0.01, 1.0, 10.0] {
                let d = DetectorSpec::new(1.0, v).unwrap();
                let b = bath(beta_omega);
                assert!(
                    transition_rate(&d, &b, -1.0).unwrap() > transition_rate(&d, &b, 1.0).unwrap()
                );
            }
        }
    }

    #[test]
    fn rate_domain_errors() {
        let d = DetectorSpec::new(1.0, 0.5).unwrap();
        assert!(matches!(
            transition_rate(&d, &bath(1.0), 0.0),
            Err(Error::Domain(_))
        ));
        assert!(DetectorSpec::new(1.0, 1.0).is_err());
        assert!(DetectorSpec::new(1.0, -0.1).is_err());
        assert!(DetectorSpec::new(0.0, 0.1).is_err());
        assert!(DetectorSpec::with_coupling(1.0, 0.1, 0.0).is_err());
        assert!(BathSpec::new(0.0).is_err());
        assert!(BathSpec::new(f64::INFINITY).is_err());
    }

    #[test]
    fn static_detector_thermalizes_to_bath() {
        for beta in [0.1, 1.0, 7.0] {
            for gap in [0.01, 1.0, 30.0] {
                let d = DetectorSpec::new(gap, 0.0).unwrap();
                assert_eq!(
                    effective_inverse_temperature(&d, &bath(beta)).unwrap(),
                    beta
                );
            }
        }
    }

    #[test]
    fn effective_temperature_examples() {
        let d = DetectorSpec::new(0.01, 0.8).unwrap();
        let ratio = effective_temperature(&d, &bath(1.0)).unwrap();
        assert!(rel(ratio, 0.823_962_991_586_500_759) < 1e-10, "{ratio}");
        let hot = DetectorSpec::new(10.0, 0.8).unwrap();
        let t = effective_temperature(&hot, &bath(1.0)).unwrap();
        assert!(rel(t, 1.515_151_280_224_264_584) < 1e-10 && t > 1.0, "{t}");
    }

    #[test]
    fn high_t_examples() {
        let b = BathSpec::new(1.0).unwrap();
        assert!((effective_temperature_high_t(&b, 1e-4).unwrap() - 1.0).abs() < 1e-6);
        assert!(
            rel(
                effective_temperature_high_t(&b, 0.8).unwrap(),
                0.823_959_216_501_082_269
            ) < 1e-14
        );
        assert!(
            rel(
                effective_temperature_high_t(&b, 0.5).unwrap(),
                0.951_426_150_896_345_966
            ) < 1e-14
        );
        assert!(effective_temperature_high_t(&b, 0.0).is_err());
        assert!(effective_temperature_high_t(&b, 1.0).is_err());
        assert_eq!(high_t_factor(0.0), 1.0);
    }

    #[test]
    fn high_t_is_colder() {
        let b = BathSpec::new(3.0).unwrap();
        for i in 1..100 {
            let v = i as f64 / 100.0;
            assert!(effective_temperature_high_t(&b, v).unwrap() < 3.0);
        }
    }

    #[test]
    fn excitation_probability_examples() {
        assert_eq!(excitation_probability(0.0, 1.0), 0.5);
        assert!(rel(excitation_probability(0.5, 1.0), 0.377_540_668_798_145_435) < 1e-15);
        assert!(rel(excitation_probability(1.0, 1.0), 0.268_941_421_369_995_121) < 1e-15);
        let p = excitation_probability(2.0, 3.0);
        assert!((p + ground_probability(2.0, 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coupling_drops_out_of_effective_temperature() {
        let b = bath(0.7);
        let weak = DetectorSpec::with_coupling(1.3, 0.6, 1e-3).unwrap();
        let strong = DetectorSpec::with_coupling(1.3, 0.6, 2.0).unwrap();
        let unit = DetectorSpec::new(1.3, 0.6).unwrap();
        let reference = effective_inverse_temperature(&unit, &b).unwrap();
        assert!(rel(effective_inverse_temperature(&weak, &b).unwrap(), reference) < 1e-13);
        assert!(
            rel(
                effective_inverse_temperature(&strong, &b).unwrap(),
                reference
            ) < 1e-13
        );
        let g1 = transition_rate(&unit, &b, 1.3).unwrap();
        let g2 = transition_rate(&strong, &b, 1.3).unwrap();
        assert!(rel(g2, 4.0 * g1) < 1e-13);
    }

    #[test]
    fn log_domain_survives_underflowing_rates() {
        let d = DetectorSpec::new(2000.0, 0.5).unwrap();
        let b = bath(1.0);
        assert_eq!(transition_rate(&d, &b, 2000.0).unwrap(), 0.0);
        let beta_eff = effective_inverse_temperature(&d, &b).unwrap();
        assert!(beta_eff.is_finite() && beta_eff > 0.0);
    }

    #[test]
    fn steady_state_population_is_gibbs() {
        let d = DetectorSpec::new(0.5, 0.8).unwrap();
        let s = steady_state(&d, &bath(2.0)).unwrap();
        assert!(s.excitation_probability > 0.0 && s.excitation_probability < 0.5);
        assert_eq!(
            s.excitation_probability,
            excitation_probability(s.effective_inverse_temperature, 0.5)
        );
    }
}
