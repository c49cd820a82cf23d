//! Single-point reports and parameter sweeps behind the CLI subcommands.
//!
//! Sweep points are independent and evaluated on the rayon pool; results are
//! collected in sweep order, so output never depends on scheduling.

use rayon::prelude::*;

use crate::config::{Fig1Config, Fig2Config, Fig3Config, OptimizeConfig, RunConfig};
use crate::detector::{effective_inverse_temperature, BathSpec, DetectorSpec};
use crate::error::{Error, Result};
use crate::machine::{
    self, cop_at_max_chi, cop_carnot_eff, cycle_statistics, make_point, maximize_figure_of_merit,
    optimal_frequency_ratio_chi, performance, tur_ratio, tur_report, CycleStatistics,
    EffectivePoint, MachineConfig, OperatingRegime, Performance, TurReport,
};
use crate::numerics::Tolerance;
use crate::report::{Cell, RunReport};
use crate::stochastic::{check_integral_ft, enumerate_distribution, max_exchange_ft_deviation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    FreqRatio,
    AProduct,
    BProduct,
    SpeedA,
    SpeedB,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::FreqRatio => "freq_ratio",
            SweepVariable::AProduct => "a_product",
            SweepVariable::BProduct => "b_product",
            SweepVariable::SpeedA => "speed_a",
            SweepVariable::SpeedB => "speed_b",
        }
    }
}

/// A linear grid over one physical parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, lo: f64, hi: f64, count: usize) -> Result<Self> {
        let field = variable.name();
        if !(lo < hi) {
            return Err(Error::config(
                field,
                format!("sweep needs lo < hi, got [{lo}, {hi}]"),
            ));
        }
        if count < 2 {
            return Err(Error::config(
                field,
                format!("sweep needs at least 2 points, got {count}"),
            ));
        }
        let in_domain = match variable {
            SweepVariable::FreqRatio | SweepVariable::AProduct | SweepVariable::BProduct => {
                lo > 0.0
            }
            SweepVariable::SpeedA | SweepVariable::SpeedB => lo >= 0.0 && hi < 1.0,
        };
        if !in_domain || !hi.is_finite() {
            return Err(Error::config(
                field,
                format!("sweep range [{lo}, {hi}] leaves the physical domain"),
            ));
        }
        Ok(SweepSpec {
            variable,
            lo,
            hi,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

fn par_eval<T, F>(values: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    values.par_iter().map(|&x| f(x)).collect()
}

/// Everything reported for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    pub point: EffectivePoint,
    pub stats: CycleStatistics,
    pub tur: Option<TurReport>,
    pub performance: Performance,
    /// `R = ⟨Σ⟩·SNR` through the form that stays regular at `a = b`.
    pub ratio_r: f64,
    /// `R` from the enumerated distribution; `None` at `a = b`.
    pub ratio_r_enumerated: Option<f64>,
    pub ift_residual: f64,
    pub eft_max_deviation: f64,
    pub oracle_max_delta: f64,
}

pub fn evaluate(p: &EffectivePoint) -> Result<PointEval> {
    let stats = cycle_statistics(p);
    let tur = match tur_report(p) {
        Ok(t) => Some(t),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    let d = enumerate_distribution(p);
    let (enum_sigma, enum_q) = (d.mean_entropy(), d.mean_heat_hot());
    let ratio_r_enumerated =
        (p.a() != p.b()).then(|| enum_sigma * d.variance_heat_hot() / (enum_q * enum_q));
    let oracle_max_delta = [
        (stats.mean_work, d.mean_work()),
        (stats.mean_heat_hot, enum_q),
        (stats.mean_heat_cold, d.mean_heat_cold()),
        (stats.var_work, d.variance_work()),
        (stats.var_heat_hot, d.variance_heat_hot()),
        (stats.var_heat_cold, d.variance_heat_cold()),
        (stats.entropy_production, enum_sigma),
    ]
    .iter()
    .map(|(x, y)| (x - y).abs())
    .fold(0.0, f64::max);
    Ok(PointEval {
        point: *p,
        stats,
        tur,
        performance: performance(p),
        ratio_r: tur_ratio(p),
        ratio_r_enumerated,
        ift_residual: (check_integral_ft(&d) - 1.0).abs(),
        eft_max_deviation: max_exchange_ft_deviation(&d),
        oracle_max_delta,
    })
}

/// Adds the `#` header block: command, tool version, config digest, timestamp.
pub fn stamp(report: &mut RunReport, command: &str, cfg: &RunConfig) {
    report.metadata = vec![
        ("tool".into(), env!("CARGO_PKG_NAME").into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("command".into(), command.into()),
        ("config_sha256".into(), cfg.digest()),
        ("timestamp".into(), chrono::Utc::now().to_rfc3339()),
        ("rows".into(), report.rows.len().to_string()),
    ];
}

pub const POINT_COLUMNS: [&str; 32] = [
    "omega_a",
    "omega_b",
    "beta_eff_a",
    "beta_eff_b",
    "a",
    "b",
    "regime",
    "mean_work",
    "mean_heat_hot",
    "mean_heat_cold",
    "var_work",
    "var_heat_hot",
    "var_heat_cold",
    "entropy_production",
    "snr",
    "classical_rhs",
    "shifted_rhs",
    "generalized_rhs",
    "ratio_r",
    "classical_violated",
    "efficiency",
    "carnot_efficiency_eff",
    "efficiency_power_rhs",
    "power_second_moment",
    "cop",
    "cop_carnot_eff",
    "cop_tradeoff_rhs",
    "cold_heat_second_moment",
    "figure_of_merit",
    "ift_residual",
    "eft_max_deviation",
    "oracle_max_delta",
];

pub fn cmd_point(cfg: &RunConfig) -> Result<RunReport> {
    let p = cfg.point.resolve()?;
    let e = evaluate(&p)?;
    let s = &e.stats;
    let perf = &e.performance;
    let mut report = RunReport::new(POINT_COLUMNS.to_vec());
    let tur = |f: fn(&TurReport) -> f64| Cell::from(e.tur.as_ref().map(f));
    report.push_row(vec![
        p.omega_a.into(),
        p.omega_b.into(),
        p.beta_eff_a.into(),
        p.beta_eff_b.into(),
        p.a().into(),
        p.b().into(),
        s.regime.name().into(),
        s.mean_work.into(),
        s.mean_heat_hot.into(),
        s.mean_heat_cold.into(),
        s.var_work.into(),
        s.var_heat_hot.into(),
        s.var_heat_cold.into(),
        s.entropy_production.into(),
        s.snr.into(),
        tur(|t| t.classical_rhs),
        tur(|t| t.shifted_rhs),
        tur(|t| t.generalized_rhs),
        e.ratio_r.into(),
        e.tur
            .map_or(Cell::Missing, |t| (t.snr < t.classical_rhs).into()),
        perf.efficiency.into(),
        perf.carnot_efficiency_eff.into(),
        perf.efficiency_power_rhs.into(),
        (s.var_work + s.mean_work * s.mean_work).into(),
        perf.cop.into(),
        perf.cop_carnot_eff.into(),
        perf.cop_tradeoff_rhs.into(),
        (s.var_heat_cold + s.mean_heat_cold * s.mean_heat_cold).into(),
        perf.figure_of_merit.into(),
        e.ift_residual.into(),
        e.eft_max_deviation.into(),
        e.oracle_max_delta.into(),
    ]);
    Ok(report)
}

fn moving_point(
    omega_a: f64,
    omega_b: f64,
    temperature_a: f64,
    temperature_b: f64,
    speed_a: f64,
    speed_b: f64,
) -> Result<EffectivePoint> {
    make_point(&MachineConfig::new(
        omega_a,
        omega_b,
        BathSpec::new(temperature_a)?,
        BathSpec::new(temperature_b)?,
        speed_a,
        speed_b,
    )?)
}

/// Marks rows where the regime changes from the previous row, and idle rows.
fn boundary_flags(regimes: &[OperatingRegime]) -> Vec<bool> {
    regimes
        .iter()
        .enumerate()
        .map(|(i, r)| *r == OperatingRegime::Idle || (i > 0 && regimes[i - 1] != *r))
        .collect()
}

pub const FIG1_COLUMNS: [&str; 16] = [
    "panel",
    "speed_a",
    "speed_b",
    "freq_ratio",
    "beta_eff_a",
    "beta_eff_b",
    "regime",
    "boundary",
    "mean_heat_hot",
    "var_heat_hot",
    "entropy_production",
    "snr",
    "classical_rhs",
    "shifted_rhs",
    "generalized_rhs",
    "classical_violated",
];

/// Heat noise-to-signal ratio against the three uncertainty bounds versus
/// `ω_B/ω_A`, for qubit B moving (panel `a`) and qubit A moving (panel `b`),
/// or for the single `custom` panel when one is configured.
pub fn cmd_fig1(cfg: &Fig1Config) -> Result<RunReport> {
    let sweep = SweepSpec::new(
        SweepVariable::FreqRatio,
        cfg.ratio_min,
        cfg.ratio_max,
        cfg.grid,
    )?;
    let ratios = sweep.values();
    let temperature_a = cfg.temperature_b / cfg.beta_ratio;
    let mut report = RunReport::new(FIG1_COLUMNS.to_vec());
    let panels = match cfg.panel {
        Some((va, vb)) => vec![("custom", va, vb)],
        None => vec![("a", 0.0, cfg.moving_speed), ("b", cfg.moving_speed, 0.0)],
    };
    for (panel, speed_a, speed_b) in panels {
        let evals = par_eval(&ratios, |r| {
            let p = moving_point(
                cfg.omega_a,
                r * cfg.omega_a,
                temperature_a,
                cfg.temperature_b,
                speed_a,
                speed_b,
            )?;
            evaluate(&p)
        })?;
        let regimes: Vec<_> = evals.iter().map(|e| e.stats.regime).collect();
        for ((r, e), boundary) in ratios.iter().zip(&evals).zip(boundary_flags(&regimes)) {
            let tur = |f: fn(&TurReport) -> f64| Cell::from(e.tur.as_ref().map(f));
            report.push_row(vec![
                panel.into(),
                speed_a.into(),
                speed_b.into(),
                (*r).into(),
                e.point.beta_eff_a.into(),
                e.point.beta_eff_b.into(),
                e.stats.regime.name().into(),
                boundary.into(),
                e.stats.mean_heat_hot.into(),
                e.stats.var_heat_hot.into(),
                e.stats.entropy_production.into(),
                e.stats.snr.into(),
                tur(|t| t.classical_rhs),
                tur(|t| t.shifted_rhs),
                tur(|t| t.generalized_rhs),
                e.tur
                    .map_or(Cell::Missing, |t| (t.snr < t.classical_rhs).into()),
            ]);
        }
    }
    Ok(report)
}

pub const FIG2_COLUMNS: [&str; 11] = [
    "panel",
    "speed_a",
    "speed_b",
    "a_product",
    "b_product",
    "a_eff",
    "b_eff",
    "regime",
    "entropy_production",
    "ratio_r",
    "ratio_r_enumerated",
];

/// `R = ⟨Σ⟩·SNR` versus `β_B ω_B` at fixed `β_A ω_A` (panel `sweep_b`) and
/// versus `β_A ω_A` at fixed `β_B ω_B` (panel `sweep_a`). Products use the
/// rest-frame temperatures; the static pair `(0, 0)` is always included.
pub fn cmd_fig2(cfg: &Fig2Config) -> Result<RunReport> {
    let (beta_a, beta_b) = (1.0 / cfg.temperature_a, 1.0 / cfg.temperature_b);
    let mut speed_pairs = vec![(0.0, 0.0)];
    speed_pairs.extend(cfg.speeds.iter().copied().filter(|s| *s != (0.0, 0.0)));
    let mut report = RunReport::new(FIG2_COLUMNS.to_vec());
    for variable in [SweepVariable::BProduct, SweepVariable::AProduct] {
        let sweep = SweepSpec::new(variable, cfg.product_min, cfg.product_max, cfg.grid)?;
        let values = sweep.values();
        let panel = match variable {
            SweepVariable::BProduct => "sweep_b",
            _ => "sweep_a",
        };
        for &(speed_a, speed_b) in &speed_pairs {
            let evals = par_eval(&values, |x| {
                let (a_static, b_static) = match variable {
                    SweepVariable::BProduct => (cfg.fixed_product, x),
                    _ => (x, cfg.fixed_product),
                };
                let p = moving_point(
                    a_static / beta_a,
                    b_static / beta_b,
                    cfg.temperature_a,
                    cfg.temperature_b,
                    speed_a,
                    speed_b,
                )?;
                Ok((a_static, b_static, evaluate(&p)?))
            })?;
            for (a_static, b_static, e) in evals {
                report.push_row(vec![
                    panel.into(),
                    speed_a.into(),
                    speed_b.into(),
                    a_static.into(),
                    b_static.into(),
                    e.point.a().into(),
                    e.point.b().into(),
                    e.stats.regime.name().into(),
                    e.stats.entropy_production.into(),
                    e.ratio_r.into(),
                    e.ratio_r_enumerated.into(),
                ]);
            }
        }
    }
    Ok(report)
}

pub const FIG3_COLUMNS: [&str; 12] = [
    "panel",
    "speed_a",
    "speed_b",
    "freq_ratio",
    "beta_eff_a",
    "beta_eff_b",
    "regime",
    "mean_heat_cold",
    "eps_carnot",
    "eps_carnot_eff",
    "eps_star",
    "eps_at_optimal_ratio",
];

/// Cooling power versus `ω_B/ω_A` for the speed sets
/// `{(0,0), (v_A,0), (0,v_B), (v_A,v_B)}` (panel `cooling`), and the COP at
/// maximum figure of merit versus `v_A` with qubit B at rest (panel `cop`).
pub fn cmd_fig3(cfg: &Fig3Config) -> Result<RunReport> {
    let mut report = RunReport::new(FIG3_COLUMNS.to_vec());

    let sweep = SweepSpec::new(
        SweepVariable::FreqRatio,
        cfg.ratio_min,
        cfg.ratio_max,
        cfg.grid,
    )?;
    let ratios = sweep.values();
    let temperature_a = cfg.temperature_b / cfg.beta_ratio;
    let eps_carnot = cfg.beta_ratio / (1.0 - cfg.beta_ratio);
    let speed_sets = [
        (0.0, 0.0),
        (cfg.speed_a, 0.0),
        (0.0, cfg.speed_b),
        (cfg.speed_a, cfg.speed_b),
    ];
    for (speed_a, speed_b) in speed_sets {
        let points = par_eval(&ratios, |r| {
            moving_point(
                cfg.omega_a,
                r * cfg.omega_a,
                temperature_a,
                cfg.temperature_b,
                speed_a,
                speed_b,
            )
        })?;
        for (r, p) in ratios.iter().zip(points) {
            report.push_row(vec![
                "cooling".into(),
                speed_a.into(),
                speed_b.into(),
                (*r).into(),
                p.beta_eff_a.into(),
                p.beta_eff_b.into(),
                machine::classify_regime(&p).name().into(),
                machine::mean_heat_cold(&p).into(),
                eps_carnot.into(),
                cop_carnot_eff(&p).ok().into(),
                Cell::Missing,
                Cell::Missing,
            ]);
        }
    }

    let sweep = SweepSpec::new(SweepVariable::SpeedA, 0.0, cfg.speed_max, cfg.grid)?;
    let speeds = sweep.values();
    let beta_b = 1.0 / cfg.temperature_b;
    let hot = BathSpec::new(cfg.temperature_b / cfg.cop_beta_ratio)?;
    let eps_carnot = cfg.cop_beta_ratio / (1.0 - cfg.cop_beta_ratio);
    let rows = par_eval(&speeds, |v| {
        let beta_eff_a = effective_inverse_temperature(&DetectorSpec::new(cfg.omega_a, v)?, &hot)?;
        // no refrigerator window once the hot qubit perceives a temperature below T_B
        if beta_eff_a >= beta_b {
            return Ok((v, beta_eff_a, None));
        }
        let eps_eff = beta_eff_a / (beta_b - beta_eff_a);
        let ratio = optimal_frequency_ratio_chi(beta_eff_a, beta_b)?;
        Ok((
            v,
            beta_eff_a,
            Some((eps_eff, cop_at_max_chi(eps_eff)?, ratio)),
        ))
    })?;
    for (v, beta_eff_a, opt) in rows {
        report.push_row(vec![
            "cop".into(),
            v.into(),
            0.0.into(),
            opt.map(|o| o.2).into(),
            beta_eff_a.into(),
            beta_b.into(),
            Cell::Missing,
            Cell::Missing,
            eps_carnot.into(),
            opt.map(|o| o.0).into(),
            opt.map(|o| o.1).into(),
            opt.map(|o| o.2 / (1.0 - o.2)).into(),
        ]);
    }
    Ok(report)
}

pub const OPTIMIZE_COLUMNS: [&str; 10] = [
    "beta_eff_a",
    "beta_eff_b",
    "omega_a",
    "ratio_closed_form",
    "ratio_golden_high_t",
    "ratio_golden_exact",
    "chi_max_exact",
    "eps_carnot_eff",
    "eps_star",
    "eps_at_closed_form_ratio",
];

/// `a = β_A ω_A` used for the high-temperature golden-section cross-check.
pub const HIGH_T_PRODUCT: f64 = 1e-4;

/// Refrigerator optimum: closed-form ratio, golden-section maximization of the
/// exact `χ` (in the high-temperature limit and at the configured `ω_A`), and
/// the corresponding COPs.
pub fn cmd_optimize(cfg: &OptimizeConfig) -> Result<RunReport> {
    let (ba, bb) = (cfg.beta_eff_a, cfg.beta_eff_b);
    let tol = Tolerance::default();
    let closed = optimal_frequency_ratio_chi(ba, bb)?;
    let (high_t, _) = maximize_figure_of_merit(HIGH_T_PRODUCT / ba, ba, bb, &tol)?;
    let (exact, chi_max) = maximize_figure_of_merit(cfg.omega_a, ba, bb, &tol)?;
    let eps_eff = ba / (bb - ba);
    let mut report = RunReport::new(OPTIMIZE_COLUMNS.to_vec());
    report.push_row(vec![
        ba.into(),
        bb.into(),
        cfg.omega_a.into(),
        closed.into(),
        high_t.into(),
        exact.into(),
        chi_max.into(),
        eps_eff.into(),
        cop_at_max_chi(eps_eff)?.into(),
        (closed / (1.0 - closed)).into(),
    ]);
    Ok(report)
}
