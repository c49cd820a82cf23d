//! Run configuration, read from a TOML file with one table per subcommand.
//! Every field is optional; the defaults reproduce the figure parameter sets.
//!
//! ```toml
//! [point]
//! omega_a = 1.0
//! omega_b = 0.5
//! temperature_a = 2.0
//! temperature_b = 0.5
//! speed_a = 0.0
//! speed_b = 0.0
//! # beta_eff_a / beta_eff_b bypass the detector model when both are set
//!
//! [fig1]
//! beta_ratio = 0.5
//! moving_speed = 0.8
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detector::BathSpec;
use crate::error::{Error, Result};
use crate::machine::{make_point, EffectivePoint, MachineConfig};

pub const DEFAULT_GRID: usize = 400;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub point: PointConfig,
    pub fig1: Fig1Config,
    pub fig2: Fig2Config,
    pub fig3: Fig3Config,
    pub optimize: OptimizeConfig,
    pub verify: VerifyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointConfig {
    pub omega_a: f64,
    pub omega_b: f64,
    pub temperature_a: f64,
    pub temperature_b: f64,
    pub speed_a: f64,
    pub speed_b: f64,
    pub beta_eff_a: Option<f64>,
    pub beta_eff_b: Option<f64>,
}

impl Default for PointConfig {
    fn default() -> Self {
        PointConfig {
            omega_a: 1.0,
            omega_b: 0.5,
            temperature_a: 2.0,
            temperature_b: 0.5,
            speed_a: 0.0,
            speed_b: 0.0,
            beta_eff_a: None,
            beta_eff_b: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Config {
    /// `β_A/β_B`
    pub beta_ratio: f64,
    pub temperature_b: f64,
    pub omega_a: f64,
    pub moving_speed: f64,
    /// `(v_A, v_B)` of a single custom panel replacing the two defaults.
    pub panel: Option<(f64, f64)>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub grid: usize,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Fig1Config {
            beta_ratio: 0.5,
            temperature_b: 1.0,
            omega_a: 0.1,
            moving_speed: 0.8,
            panel: None,
            ratio_min: 0.01,
            ratio_max: 1.5,
            grid: DEFAULT_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Config {
    pub temperature_a: f64,
    pub temperature_b: f64,
    /// Value held by the product that is not swept.
    pub fixed_product: f64,
    pub product_min: f64,
    pub product_max: f64,
    /// Moving `(v_A, v_B)` pairs plotted against the static baseline.
    pub speeds: Vec<(f64, f64)>,
    pub grid: usize,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Fig2Config {
            temperature_a: 2.0,
            temperature_b: 1.0,
            fixed_product: 0.5,
            product_min: 0.01,
            product_max: 3.0,
            speeds: vec![(0.8, 0.0), (0.0, 0.8)],
            grid: DEFAULT_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig3Config {
    pub beta_ratio: f64,
    pub temperature_b: f64,
    pub omega_a: f64,
    pub speed_a: f64,
    pub speed_b: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// `β_A/β_B` of the COP panel.
    pub cop_beta_ratio: f64,
    pub speed_max: f64,
    pub grid: usize,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Fig3Config {
            beta_ratio: 0.5,
            temperature_b: 1.0,
            omega_a: 0.1,
            speed_a: 0.8,
            speed_b: 0.8,
            ratio_min: 0.01,
            ratio_max: 1.0,
            cop_beta_ratio: 0.65,
            speed_max: 0.95,
            grid: DEFAULT_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub beta_eff_a: f64,
    pub beta_eff_b: f64,
    pub omega_a: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            beta_eff_a: 1.0,
            beta_eff_b: 2.0,
            omega_a: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub grid: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid: 10_000,
            seed: 20_251_018,
        }
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("must be positive and finite, got {x}"),
        ))
    }
}

fn speed(field: &str, v: f64) -> Result<()> {
    if (0.0..1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(field, format!("must lie in [0, 1), got {v}")))
    }
}

fn range(field: &str, lo: f64, hi: f64) -> Result<()> {
    if lo < hi {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("needs min < max, got [{lo}, {hi}]"),
        ))
    }
}

fn grid(field: &str, n: usize) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("needs at least 2 points, got {n}"),
        ))
    }
}

fn ratio_below_one(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must lie in (0, 1), got {x}")))
    }
}

impl PointConfig {
    pub fn validate(&self) -> Result<()> {
        positive("point.omega_a", self.omega_a)?;
        positive("point.omega_b", self.omega_b)?;
        match (self.beta_eff_a, self.beta_eff_b) {
            (Some(a), Some(b)) => {
                positive("point.beta_eff_a", a)?;
                positive("point.beta_eff_b", b)
            }
            (None, None) => {
                positive("point.temperature_a", self.temperature_a)?;
                positive("point.temperature_b", self.temperature_b)?;
                speed("point.speed_a", self.speed_a)?;
                speed("point.speed_b", self.speed_b)?;
                if self.temperature_a < self.temperature_b {
                    return Err(Error::config(
                        "point.temperature_a",
                        "bath A is the hot bath and must not be colder than bath B",
                    ));
                }
                Ok(())
            }
            _ => Err(Error::config(
                "point.beta_eff_a",
                "beta_eff_a and beta_eff_b must be given together",
            )),
        }
    }

    pub fn machine_config(&self) -> Result<MachineConfig> {
        MachineConfig::new(
            self.omega_a,
            self.omega_b,
            BathSpec::new(self.temperature_a)?,
            BathSpec::new(self.temperature_b)?,
            self.speed_a,
            self.speed_b,
        )
    }

    /// Effective point from either direct `β^eff` values or the detector model.
    pub fn resolve(&self) -> Result<EffectivePoint> {
        self.validate()?;
        match (self.beta_eff_a, self.beta_eff_b) {
            (Some(a), Some(b)) => EffectivePoint::new(self.omega_a, self.omega_b, a, b),
            _ => make_point(&self.machine_config()?),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_owned()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.point.validate()?;

        let f = &self.fig1;
        ratio_below_one("fig1.beta_ratio", f.beta_ratio)?;
        positive("fig1.temperature_b", f.temperature_b)?;
        positive("fig1.omega_a", f.omega_a)?;
        speed("fig1.moving_speed", f.moving_speed)?;
        if let Some((va, vb)) = f.panel {
            speed("fig1.panel", va)?;
            speed("fig1.panel", vb)?;
        }
        positive("fig1.ratio_min", f.ratio_min)?;
        range("fig1.ratio_min", f.ratio_min, f.ratio_max)?;
        grid("fig1.grid", f.grid)?;

        let f = &self.fig2;
        positive("fig2.temperature_a", f.temperature_a)?;
        positive("fig2.temperature_b", f.temperature_b)?;
        if f.temperature_a < f.temperature_b {
            return Err(Error::config(
                "fig2.temperature_a",
                "must not be below temperature_b",
            ));
        }
        positive("fig2.fixed_product", f.fixed_product)?;
        positive("fig2.product_min", f.product_min)?;
        range("fig2.product_min", f.product_min, f.product_max)?;
        for &(va, vb) in &f.speeds {
            speed("fig2.speeds", va)?;
            speed("fig2.speeds", vb)?;
        }
        grid("fig2.grid", f.grid)?;

        let f = &self.fig3;
        ratio_below_one("fig3.beta_ratio", f.beta_ratio)?;
        positive("fig3.temperature_b", f.temperature_b)?;
        positive("fig3.omega_a", f.omega_a)?;
        speed("fig3.speed_a", f.speed_a)?;
        speed("fig3.speed_b", f.speed_b)?;
        positive("fig3.ratio_min", f.ratio_min)?;
        range("fig3.ratio_min", f.ratio_min, f.ratio_max)?;
        ratio_below_one("fig3.cop_beta_ratio", f.cop_beta_ratio)?;
        speed("fig3.speed_max", f.speed_max)?;
        range("fig3.speed_max", 0.0, f.speed_max)?;
        grid("fig3.grid", f.grid)?;

        let o = &self.optimize;
        positive("optimize.beta_eff_a", o.beta_eff_a)?;
        positive("optimize.beta_eff_b", o.beta_eff_b)?;
        positive("optimize.omega_a", o.omega_a)?;
        if o.beta_eff_a >= o.beta_eff_b {
            return Err(Error::config(
                "optimize.beta_eff_a",
                "must be below beta_eff_b for a refrigerator window to exist",
            ));
        }

        if self.verify.grid == 0 {
            return Err(Error::config("verify.grid", "must be at least 1"));
        }
        Ok(())
    }

    /// Applies `--grid` to every sweep and to the verify suite.
    pub fn set_grid(&mut self, n: usize) {
        self.fig1.grid = n;
        self.fig2.grid = n;
        self.fig3.grid = n;
        self.verify.grid = n;
    }

    /// Applies `--speeds vA,vB`: the single point, a single fig1 panel, the
    /// single fig2 moving pair and the fig3 speed sets.
    pub fn set_speeds(&mut self, speed_a: f64, speed_b: f64) {
        self.point.speed_a = speed_a;
        self.point.speed_b = speed_b;
        self.fig1.panel = Some((speed_a, speed_b));
        self.fig2.speeds = vec![(speed_a, speed_b)];
        self.fig3.speed_a = speed_a;
        self.fig3.speed_b = speed_b;
    }

    /// SHA-256 of the canonical TOML rendering of the effective configuration.
    pub fn digest(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes to TOML");
        let hash = Sha256::digest(canonical.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}
