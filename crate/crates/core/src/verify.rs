//! Invariant suite behind `relmachine verify`: every closed form is checked
//! against the enumerated distribution, the fluctuation theorems, the
//! uncertainty-relation orderings and the performance bounds over a seeded
//! random sample of operating points.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detector::{effective_inverse_temperature, high_t_factor, BathSpec, DetectorSpec};
use crate::error::Result;
use crate::machine::{
    self, cop_at_max_chi, maximize_figure_of_merit, optimal_frequency_ratio_chi, EffectivePoint,
    OperatingRegime,
};
use crate::numerics::{generalized_tur_rhs, x_coth_half_x, Tolerance};
use crate::stochastic::{
    cgf_analytic, cgf_numeric, cgf_second_cumulants, check_integral_ft, enumerate_distribution,
    max_exchange_ft_deviation,
};
use crate::sweep::HIGH_T_PRODUCT;

/// Deliberate formula errors used to check that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// `⟨W⟩ = (ω_A - ω_B)/2 · (tanh(a/2) + tanh(b/2))`
    FlipMeanWorkSign,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Number of random operating points.
    pub grid: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid: 10_000,
            seed: 20_251_018,
            fault: None,
        }
    }
}

/// Outcome of one invariant family: the worst residual over `count` checks.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub count: usize,
}

impl FamilyResult {
    pub fn passed(&self) -> bool {
        self.count > 0 && self.worst <= self.tolerance
    }
}

impl fmt::Display for FamilyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<22} worst={:.3e} tol={:.1e} checks={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.count
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub families: Vec<FamilyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(FamilyResult::passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.families
            .iter()
            .filter(|f| !f.passed())
            .map(|f| f.name)
            .collect()
    }

    pub fn family(&self, name: &str) -> Option<&FamilyResult> {
        self.families.iter().find(|f| f.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fam in &self.families {
            writeln!(f, "{fam}")?;
        }
        let failed = self.failed();
        if failed.is_empty() {
            write!(f, "all {} families passed", self.families.len())
        } else {
            write!(f, "FAILED: {}", failed.join(", "))
        }
    }
}

/// Sample points with `a, b ∈ (0, 20]` and `ω_B/ω_A ∈ (0, 2]`, `ω_A ∈ (0.1, 2]`.
pub fn sample_points(n: usize, seed: u64) -> Vec<EffectivePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = 20.0 * (1.0 - rng.gen::<f64>());
            let b = 20.0 * (1.0 - rng.gen::<f64>());
            let r = 2.0 * (1.0 - rng.gen::<f64>());
            let omega_a = 0.1 + 1.9 * rng.gen::<f64>();
            let omega_b = r * omega_a;
            EffectivePoint::new(omega_a, omega_b, a / omega_a, b / omega_b)
                .expect("sampled parameters are positive")
        })
        .collect()
}

fn mean_work(p: &EffectivePoint, fault: Option<Fault>) -> f64 {
    match fault {
        None => machine::mean_work(p),
        Some(Fault::FlipMeanWorkSign) => {
            0.5 * (p.omega_a - p.omega_b) * ((0.5 * p.a()).tanh() + (0.5 * p.b()).tanh())
        }
    }
}

fn rel(x: f64, reference: f64) -> f64 {
    if x == reference {
        0.0
    } else {
        (x - reference).abs() / reference.abs()
    }
}

/// Relative amount by which `x` exceeds `bound`; NaN if either is undefined.
fn excess(x: f64, bound: f64) -> f64 {
    if x.is_nan() || bound.is_nan() {
        f64::NAN
    } else {
        (x - bound).max(0.0) / bound.abs()
    }
}

/// Like `f64::max`, but a NaN anywhere wins.
fn worst_of(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Per-point residuals of the point-wise families, `None` where a family does
/// not apply.
#[derive(Debug, Default, Clone, Copy)]
struct PointResiduals {
    first_law: f64,
    second_law: f64,
    oracle: f64,
    integral_ft: f64,
    exchange_ft: f64,
    snr_identity: Option<f64>,
    tur_ordering: Option<f64>,
    engine: Option<f64>,
    refrigerator: Option<f64>,
}

fn point_residuals(p: &EffectivePoint, fault: Option<Fault>) -> Result<PointResiduals> {
    let d = enumerate_distribution(p);
    let w = mean_work(p, fault);
    let q_h = machine::mean_heat_hot(p);
    let q_c = machine::mean_heat_cold(p);
    let sigma = machine::entropy_production(p);
    let scale = p.omega_a.max(p.omega_b);

    let traj_first_law = d
        .trajectories
        .iter()
        .map(|t| (t.work + t.heat_hot + t.heat_cold()).abs())
        .fold(0.0, f64::max);
    let mut out = PointResiduals {
        first_law: ((w + q_h + q_c).abs() / scale).max(traj_first_law),
        second_law: (-sigma).max(-d.mean_entropy()).max(0.0),
        integral_ft: (check_integral_ft(&d) - 1.0).abs(),
        exchange_ft: max_exchange_ft_deviation(&d),
        ..Default::default()
    };
    out.oracle = [
        (w, d.mean_work()),
        (q_h, d.mean_heat_hot()),
        (machine::variance_work(p), d.variance_work()),
        (machine::variance_heat_hot(p), d.variance_heat_hot()),
        (sigma, d.mean_entropy()),
    ]
    .iter()
    .map(|(x, y)| (x - y).abs())
    .fold(0.0, f64::max);

    if !(sigma > 0.0) {
        return Ok(out);
    }
    let x = p.a() - p.b();
    let identity = x_coth_half_x(x) / sigma - 1.0;
    let snr_heat = machine::variance_heat_hot(p) / (q_h * q_h);
    let mut worst = rel(snr_heat, identity);
    if p.omega_a != p.omega_b {
        worst = worst.max(rel(machine::variance_work(p) / (w * w), identity));
    }
    out.snr_identity = Some(worst);

    let shifted = 2.0 / sigma - 1.0;
    let generalized = generalized_tur_rhs(sigma)?;
    out.tur_ordering = Some(worst_of(
        excess(shifted, snr_heat),
        excess(generalized, snr_heat),
    ));

    // bounds are stated for bath A as the hot bath
    if p.beta_eff_a < p.beta_eff_b {
        let perf = machine::performance(p);
        match machine::classify_regime(p) {
            OperatingRegime::Engine => {
                let eta = perf.efficiency.unwrap_or(f64::NAN);
                let carnot = perf.carnot_efficiency_eff.unwrap_or(f64::NAN);
                let tradeoff = perf.efficiency_power_rhs.unwrap_or(f64::NAN);
                out.engine = Some(worst_of(excess(eta, carnot), excess(eta, tradeoff)));
            }
            OperatingRegime::Refrigerator => {
                let eps = perf.cop.unwrap_or(f64::NAN);
                let carnot = perf.cop_carnot_eff.unwrap_or(f64::NAN);
                let tradeoff = perf.cop_tradeoff_rhs.unwrap_or(f64::NAN);
                out.refrigerator = Some(worst_of(excess(eps, carnot), excess(eps, tradeoff)));
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Folds residuals into a family; NaN residuals count as failures.
fn family<I: IntoIterator<Item = f64>>(
    name: &'static str,
    tolerance: f64,
    residuals: I,
) -> FamilyResult {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for r in residuals {
        worst = if r.is_nan() {
            f64::INFINITY
        } else {
            worst.max(r)
        };
        count += 1;
    }
    FamilyResult {
        name,
        worst,
        tolerance,
        count,
    }
}

fn near_branch_cut(z: Complex64) -> bool {
    z.norm() < 1e-6 || (z.re < 0.0 && z.im.abs() < 1e-9 * z.norm())
}

/// Residuals of the generating-function identities at one point.
fn cgf_residuals(p: &EffectivePoint, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let (ba, bb) = (p.beta_eff_a, p.beta_eff_b);
    let d = enumerate_distribution(p);
    let mut out = vec![
        cgf_analytic(p, zero, zero)?.norm(),
        cgf_numeric(&d, zero, zero)?.norm(),
        cgf_analytic(p, i * bb, i * (bb - ba))?.norm(),
    ];
    for _ in 0..20 {
        let chi_w = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-0.5..0.5));
        let chi_h = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-0.5..0.5));
        let lhs = cgf_analytic(p, i * bb - chi_w, i * (bb - ba) - chi_h)?;
        let rhs = cgf_analytic(p, chi_w, chi_h)?;
        out.push((lhs - rhs).norm());
    }
    for j in 0..20 {
        for k in 0..20 {
            let u = -1.0 + 2.0 * j as f64 / 19.0;
            let v = -1.0 + 2.0 * k as f64 / 19.0;
            let chi = Complex64::new(u, v) * (5.0 / 2f64.sqrt());
            let (chi_w, chi_h) = (chi, 0.5 * chi.conj());
            let z = cgf_analytic(p, chi_w, chi_h)?.exp();
            if near_branch_cut(z) {
                continue;
            }
            let diff = cgf_numeric(&d, chi_w, chi_h)? - cgf_analytic(p, chi_w, chi_h)?;
            // a residual 2π jump means both sides straddle the cut; not a mismatch
            let wrapped =
                Complex64::new(diff.re, diff.im - 2.0 * PI * (diff.im / (2.0 * PI)).round());
            out.push(wrapped.norm());
        }
    }
    Ok(out)
}

fn cumulant_residual(p: &EffectivePoint) -> Result<f64> {
    let d = enumerate_distribution(p);
    let (var_w, var_q, cov) = cgf_second_cumulants(p, 1e-2)?;
    Ok([
        (var_w, d.variance_work()),
        (var_q, d.variance_heat_hot()),
        (cov, d.covariance_work_heat()),
    ]
    .iter()
    .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
    .fold(0.0, f64::max))
}

/// Closed-form optimum against golden-section search (high-temperature limit)
/// and the `ε*` identity, for one `(β_A, β_B)` pair.
fn optimization_residuals(beta_a: f64, beta_b: f64) -> Result<(f64, f64)> {
    let closed = optimal_frequency_ratio_chi(beta_a, beta_b)?;
    let (golden, _) = maximize_figure_of_merit(
        HIGH_T_PRODUCT / beta_a,
        beta_a,
        beta_b,
        &Tolerance::default(),
    )?;
    let eps_star = cop_at_max_chi(beta_a / (beta_b - beta_a))?;
    Ok((
        (closed - golden).abs(),
        rel(closed / (1.0 - closed), eps_star),
    ))
}

/// Effective-temperature checks: exact static limit, agreement with the
/// high-temperature series, and the cooling/heating crossover.
fn effective_temperature_residuals(rng: &mut ChaCha8Rng, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut exact = Vec::with_capacity(2 * n + 6);
    let mut series = Vec::with_capacity(n);
    for _ in 0..n {
        let bath = BathSpec::new(rng.gen_range(0.1..10.0))?;
        let gap = rng.gen_range(0.01..10.0);
        let beta = effective_inverse_temperature(&DetectorSpec::new(gap, 0.0)?, &bath)?;
        exact.push(rel(beta, bath.inverse_temperature()));

        let v = rng.gen_range(0.0..0.95);
        let beta_omega = 1e-3;
        let det = DetectorSpec::new(beta_omega * bath.temperature(), v)?;
        let ratio = 1.0 / (effective_inverse_temperature(&det, &bath)? * bath.temperature());
        series.push(rel(ratio, high_t_factor(v)));
    }
    let bath = BathSpec::new(1.0)?;
    for v in [0.2, 0.5, 0.8] {
        let t_eff = |beta_omega: f64| -> Result<f64> {
            Ok(1.0 / effective_inverse_temperature(&DetectorSpec::new(beta_omega, v)?, &bath)?)
        };
        // residual 1 marks a missing crossover
        exact.push(if t_eff(0.1)? < 1.0 { 0.0 } else { 1.0 });
        exact.push(if t_eff(10.0)? > 1.0 { 0.0 } else { 1.0 });
    }
    Ok((exact, series))
}

pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    let points = sample_points(opts.grid, opts.seed);
    let worked = EffectivePoint::new(1.0, 0.5, 0.5, 2.0)?;
    let all: Vec<EffectivePoint> = std::iter::once(worked)
        .chain(points.iter().copied())
        .collect();

    let residuals: Vec<PointResiduals> = all
        .par_iter()
        .map(|p| point_residuals(p, opts.fault))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut cgf = Vec::new();
    for p in all.iter().take(20) {
        cgf.extend(cgf_residuals(p, &mut rng)?);
    }
    let cumulants: Vec<f64> = all
        .iter()
        .take(200)
        .map(cumulant_residual)
        .collect::<Result<_>>()?;

    let pairs: Vec<(f64, f64)> = (0..100)
        .map(|_| {
            let beta_b = rng.gen_range(0.2..5.0);
            (beta_b * rng.gen_range(0.05..0.95), beta_b)
        })
        .collect();
    let optimization: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(a, b)| optimization_residuals(a, b))
        .collect::<Result<_>>()?;
    let (exact, series) = effective_temperature_residuals(&mut rng, 200)?;

    let refrigerator_optimum = {
        // a static cold qubit and a moving hot qubit whose ε* beats the static Carnot COP
        let beta_ratio = 0.65;
        let eps_static = beta_ratio / (1.0 - beta_ratio);
        let hot = BathSpec::new(1.0 / beta_ratio)?;
        let best = (0..100)
            .map(|k| 0.8 + 0.001 * k as f64)
            .filter_map(|v| {
                let beta_a =
                    effective_inverse_temperature(&DetectorSpec::new(0.1, v).ok()?, &hot).ok()?;
                (beta_a < 1.0)
                    .then(|| cop_at_max_chi(beta_a / (1.0 - beta_a)).ok())
                    .flatten()
            })
            .fold(0.0, f64::max);
        // residual 0 when some speed beats the static bound
        if best > eps_static {
            0.0
        } else {
            1.0
        }
    };

    let col = |f: fn(&PointResiduals) -> f64| residuals.iter().map(f).collect::<Vec<_>>();
    let opt =
        |f: fn(&PointResiduals) -> Option<f64>| residuals.iter().filter_map(f).collect::<Vec<_>>();
    let families = vec![
        family("first-law", 1e-14, col(|r| r.first_law)),
        family("second-law", 0.0, col(|r| r.second_law)),
        family("oracle-equivalence", 1e-12, col(|r| r.oracle)),
        family("integral-ft", 1e-13, col(|r| r.integral_ft)),
        family("exchange-ft", 1e-13, col(|r| r.exchange_ft)),
        family("snr-identity", 1e-11, opt(|r| r.snr_identity)),
        family("tur-ordering", 1e-12, opt(|r| r.tur_ordering)),
        family("engine-bounds", 1e-12, opt(|r| r.engine)),
        family("refrigerator-bounds", 1e-12, opt(|r| r.refrigerator)),
        family("cgf-identities", 1e-10, cgf),
        family("cumulant-closure", 1e-6, cumulants),
        family(
            "optimization-argmax",
            1e-6,
            optimization.iter().map(|r| r.0),
        ),
        family("optimization-cop", 1e-12, optimization.iter().map(|r| r.1)),
        family("cop-beyond-carnot", 0.0, [refrigerator_optimum]),
        family("effective-temperature", 1e-15, exact),
        family("high-t-series", 1e-6, series),
    ];
    Ok(VerifyReport { families })
}
