//! Exact two-point-measurement statistics of one SWAP cycle.
//!
//! Before the SWAP each qubit is found in its energy eigenstate `n ∈ {0, 1}`
//! with Gibbs weights at its effective temperature. The SWAP maps
//! `(n_a, n_b)` to `(n_b, n_a)`, so the whole outcome space is four
//! trajectories, each with a deterministic work, hot heat and entropy. With
//! `Δn = n_b - n_a`:
//!
//! - `W   = (ω_A - ω_B)·Δn`
//! - `Q_H = -ω_A·Δn`
//! - `σ   = Δn·(β^eff_A ω_A - β^eff_B ω_B)`
//!
//! Nothing here calls into the closed forms of [`crate::machine`]; this module
//! is what they are checked against.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detector::{excitation_probability, ground_probability};
use crate::error::{Error, Result};
use crate::machine::EffectivePoint;

/// Highest joint moment order supported by [`moments`].
pub const MAX_MOMENT_ORDER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n_a: u8,
    pub n_b: u8,
    pub probability: f64,
    pub work: f64,
    pub heat_hot: f64,
    pub entropy: f64,
}

impl Trajectory {
    pub fn transfer(&self) -> i8 {
        self.n_b as i8 - self.n_a as i8
    }

    /// Cold-bath heat closing the first law along this trajectory.
    pub fn heat_cold(&self) -> f64 {
        -self.work - self.heat_hot
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub trajectories: [Trajectory; 4],
    pub point: EffectivePoint,
}

/// Forward/reverse probabilities of one outcome and its entropy production.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeCheck {
    pub forward_prob: f64,
    pub reverse_prob: f64,
    pub entropy: f64,
}

impl ExchangeCheck {
    /// `|P_fwd/P_rev · e^{-σ} - 1|`
    pub fn deviation(&self) -> f64 {
        (self.forward_prob / self.reverse_prob * (-self.entropy).exp() - 1.0).abs()
    }
}

fn occupation_probability(n: u8, beta: f64, omega: f64) -> f64 {
    if n == 1 {
        excitation_probability(beta, omega)
    } else {
        ground_probability(beta, omega)
    }
}

pub fn enumerate_distribution(p: &EffectivePoint) -> JointDistribution {
    let affinity = p.a() - p.b();
    let outcome = |n_a: u8, n_b: u8| {
        let dn = f64::from(n_b) - f64::from(n_a);
        Trajectory {
            n_a,
            n_b,
            probability: occupation_probability(n_a, p.beta_eff_a, p.omega_a)
                * occupation_probability(n_b, p.beta_eff_b, p.omega_b),
            work: (p.omega_a - p.omega_b) * dn,
            heat_hot: -p.omega_a * dn,
            entropy: dn * affinity,
        }
    };
    JointDistribution {
        trajectories: [outcome(0, 0), outcome(0, 1), outcome(1, 0), outcome(1, 1)],
        point: *p,
    }
}

impl JointDistribution {
    pub fn total_probability(&self) -> f64 {
        self.trajectories.iter().map(|t| t.probability).sum()
    }

    fn expect(&self, f: impl Fn(&Trajectory) -> f64) -> f64 {
        self.trajectories.iter().map(|t| t.probability * f(t)).sum()
    }

    pub fn mean_work(&self) -> f64 {
        self.expect(|t| t.work)
    }

    pub fn mean_heat_hot(&self) -> f64 {
        self.expect(|t| t.heat_hot)
    }

    pub fn mean_heat_cold(&self) -> f64 {
        self.expect(Trajectory::heat_cold)
    }

    pub fn mean_entropy(&self) -> f64 {
        self.expect(|t| t.entropy)
    }

    pub fn variance_work(&self) -> f64 {
        let m = self.mean_work();
        self.expect(|t| (t.work - m).powi(2))
    }

    pub fn variance_heat_hot(&self) -> f64 {
        let m = self.mean_heat_hot();
        self.expect(|t| (t.heat_hot - m).powi(2))
    }

    pub fn variance_heat_cold(&self) -> f64 {
        let m = self.mean_heat_cold();
        self.expect(|t| (t.heat_cold() - m).powi(2))
    }

    pub fn covariance_work_heat(&self) -> f64 {
        let (mw, mq) = (self.mean_work(), self.mean_heat_hot());
        self.expect(|t| (t.work - mw) * (t.heat_hot - mq))
    }
}

/// Raw joint moment `⟨W^m Q_H^n⟩`.
pub fn moments(d: &JointDistribution, m: u32, n: u32) -> Result<f64> {
    if m + n > MAX_MOMENT_ORDER {
        return Err(Error::Order(m + n));
    }
    Ok(d.expect(|t| t.work.powi(m as i32) * t.heat_hot.powi(n as i32)))
}

/// `ln⟨e^{iχ_w W + iχ_h Q_H}⟩` summed over the four outcomes, principal branch.
pub fn cgf_numeric(d: &JointDistribution, chi_w: Complex64, chi_h: Complex64) -> Result<Complex64> {
    let i = Complex64::i();
    let z: Complex64 = d
        .trajectories
        .iter()
        .map(|t| t.probability * (i * (chi_w * t.work + chi_h * t.heat_hot)).exp())
        .sum();
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularLog);
    }
    Ok(z.ln())
}

/// Closed-form generating function,
/// `ln[cosh((a + iθ)/2)·cosh((b - iθ)/2) / (cosh(a/2)·cosh(b/2))]` with
/// `θ = ω_A(χ_w - χ_h) - ω_B χ_w`.
pub fn cgf_analytic(p: &EffectivePoint, chi_w: Complex64, chi_h: Complex64) -> Result<Complex64> {
    let i = Complex64::i();
    let theta = p.omega_a * (chi_w - chi_h) - p.omega_b * chi_w;
    let (a, b) = (p.a(), p.b());
    let num = ((a + i * theta) * 0.5).cosh() * ((b - i * theta) * 0.5).cosh();
    if num == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularLog);
    }
    Ok((num / ((0.5 * a).cosh() * (0.5 * b).cosh())).ln())
}

/// Second cumulants `(Var[W], Var[Q_H], Cov[W, Q_H])` from fourth-order
/// central differences of [`cgf_analytic`] at the origin, step `h`.
pub fn cgf_second_cumulants(p: &EffectivePoint, h: f64) -> Result<(f64, f64, f64)> {
    let c = |w: f64, q: f64| cgf_analytic(p, Complex64::new(w, 0.0), Complex64::new(q, 0.0));
    let c0 = c(0.0, 0.0)?;
    let second = |f: &dyn Fn(f64) -> Result<Complex64>| -> Result<Complex64> {
        Ok(
            (-f(2.0 * h)? + 16.0 * f(h)? - 30.0 * c0 + 16.0 * f(-h)? - f(-2.0 * h)?)
                / (12.0 * h * h),
        )
    };
    let cww = second(&|x| c(x, 0.0))?;
    let chh = second(&|x| c(0.0, x))?;
    // mixed partial: ∂²C/∂w∂h = (C_ss - C_ww - C_hh)/2 along the diagonal s = w = h
    let css = second(&|x| c(x, x))?;
    let cwh = 0.5 * (css - cww - chh);
    // C'' = -κ₂ for a characteristic-function generator
    Ok((-cww.re, -chh.re, -cwh.re))
}

/// Integral fluctuation theorem average `⟨e^{-σ}⟩`.
pub fn check_integral_ft(d: &JointDistribution) -> f64 {
    d.expect(|t| (-t.entropy).exp())
}

/// Pairs each outcome with its time reverse, the trajectory with `Δn`
/// negated; zero-current outcomes are their own reverse.
pub fn check_exchange_ft(d: &JointDistribution) -> Vec<ExchangeCheck> {
    d.trajectories
        .iter()
        .map(|t| {
            let reverse = d
                .trajectories
                .iter()
                .find(|r| r.n_a == t.n_b && r.n_b == t.n_a)
                .expect("outcome space is closed under exchange");
            ExchangeCheck {
                forward_prob: t.probability,
                reverse_prob: reverse.probability,
                entropy: t.entropy,
            }
        })
        .collect()
}

pub fn max_exchange_ft_deviation(d: &JointDistribution) -> f64 {
    check_exchange_ft(d)
        .iter()
        .map(ExchangeCheck::deviation)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> EffectivePoint {
        EffectivePoint::new(1.0, 0.5, 0.5, 2.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let p = EffectivePoint::new(1.0, 0.5, 1e-300, 1e-300).unwrap();
        for t in enumerate_distribution(&p).trajectories {
            assert!((t.probability - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn worked_point_transfer_probabilities() {
        let d = enumerate_distribution(&worked());
        let up = d.trajectories.iter().find(|t| t.transfer() == 1).unwrap();
        let down = d.trajectories.iter().find(|t| t.transfer() == -1).unwrap();
        assert!(rel(up.probability, 0.167_405_097_278_443_320) < 1e-14);
        assert!(rel(down.probability, 0.276_004_344_706_593_634) < 1e-14);
        assert!((d.total_probability() - 1.0).abs() < 1e-15);
        let idle = d
            .trajectories
            .iter()
            .filter(|t| t.work == 0.0 && t.heat_hot == 0.0)
            .count();
        assert_eq!(idle, 2);
    }

    #[test]
    fn zero_temperature_freezes_ground_state() {
        let p = EffectivePoint::new(1.0, 0.5, 800.0, 1600.0).unwrap();
        let d = enumerate_distribution(&p);
        assert_eq!((d.trajectories[0].n_a, d.trajectories[0].n_b), (0, 0));
        assert!((d.trajectories[0].probability - 1.0).abs() < 1e-300);
    }

    #[test]
    fn worked_point_moments() {
        let d = enumerate_distribution(&worked());
        assert_eq!(moments(&d, 0, 0).unwrap(), d.total_probability());
        assert!(rel(moments(&d, 1, 0).unwrap(), -0.054_299_623_714_075_157) < 1e-13);
        let var_q = moments(&d, 0, 2).unwrap() - moments(&d, 0, 1).unwrap().powi(2);
        assert!(rel(var_q, 0.431_615_645_443_076_342) < 1e-13);
        assert!(moments(&d, 2, 2).is_ok());
        assert!(matches!(moments(&d, 3, 2), Err(Error::Order(5))));
    }

    #[test]
    fn trajectory_first_law_and_cold_heat() {
        let d = enumerate_distribution(&worked());
        for t in d.trajectories {
            assert_eq!(t.heat_cold(), d.point.omega_b * f64::from(t.transfer()));
        }
    }

    #[test]
    fn cgf_normalization_and_ft_identity() {
        let p = worked();
        let d = enumerate_distribution(&p);
        let zero = Complex64::new(0.0, 0.0);
        assert!(cgf_numeric(&d, zero, zero).unwrap().norm() < 1e-15);
        assert!(cgf_analytic(&p, zero, zero).unwrap().norm() < 1e-15);
        let chi_w = Complex64::new(0.0, p.beta_eff_b);
        let chi_h = Complex64::new(0.0, p.beta_eff_b - p.beta_eff_a);
        assert!(cgf_numeric(&d, chi_w, chi_h).unwrap().norm() < 1e-14);
        assert!(cgf_analytic(&p, chi_w, chi_h).unwrap().norm() < 1e-14);
    }

    #[test]
    fn cgf_routes_agree_on_real_fields() {
        let p = worked();
        let d = enumerate_distribution(&p);
        for (w, h) in [(0.3, -1.2), (2.5, 0.7), (-4.0, 3.3), (1.1, 1.1)] {
            let (w, h) = (Complex64::new(w, 0.0), Complex64::new(h, 0.0));
            let diff = cgf_numeric(&d, w, h).unwrap() - cgf_analytic(&p, w, h).unwrap();
            assert!(diff.norm() < 1e-12);
        }
    }

    #[test]
    fn cgf_real_on_imaginary_axis() {
        let p = worked();
        let c = cgf_analytic(&p, Complex64::new(0.0, 0.4), Complex64::new(0.0, -0.9)).unwrap();
        assert!(c.im.abs() < 1e-14);
    }

    #[test]
    fn cgf_first_derivative_gives_mean_work() {
        // a +ω_B χ_w phase would give (ω_A + ω_B)·⟨Δn⟩ here
        let p = worked();
        let h = 1e-6;
        let dc = (cgf_analytic(&p, Complex64::new(h, 0.0), Complex64::new(0.0, 0.0)).unwrap()
            - cgf_analytic(&p, Complex64::new(-h, 0.0), Complex64::new(0.0, 0.0)).unwrap())
            / (2.0 * h);
        // -i ∂C/∂χ_w = ⟨W⟩
        let mean_w = (dc * Complex64::new(0.0, -1.0)).re;
        assert!(
            (mean_w - (-0.054_299_623_714_075_157)).abs() < 1e-9,
            "{mean_w}"
        );
    }

    #[test]
    fn second_cumulants_from_finite_differences() {
        let p = worked();
        let d = enumerate_distribution(&p);
        let (vw, vq, cov) = cgf_second_cumulants(&p, 1e-2).unwrap();
        assert!((vw - d.variance_work()).abs() < 1e-6);
        assert!((vq - d.variance_heat_hot()).abs() < 1e-6);
        assert!((cov - d.covariance_work_heat()).abs() < 1e-6);
    }

    #[test]
    fn integral_ft() {
        let d = enumerate_distribution(&worked());
        assert!((check_integral_ft(&d) - 1.0).abs() < 1e-15);
        let rev = EffectivePoint::new(1.0, 0.25, 0.5, 2.0).unwrap();
        let d = enumerate_distribution(&rev);
        assert!(d.trajectories.iter().all(|t| t.entropy == 0.0));
        assert_eq!(check_integral_ft(&d), d.total_probability());
    }

    #[test]
    fn exchange_ft() {
        let d = enumerate_distribution(&worked());
        let checks = check_exchange_ft(&d);
        assert_eq!(checks.len(), 4);
        let up = checks.iter().find(|c| c.entropy < 0.0).unwrap();
        assert!(rel(up.forward_prob / up.reverse_prob, (-0.5f64).exp()) < 1e-14);
        for c in &checks {
            if c.entropy == 0.0 {
                assert_eq!(c.forward_prob, c.reverse_prob);
            }
        }
        assert!(max_exchange_ft_deviation(&d) < 1e-14);
    }
}
