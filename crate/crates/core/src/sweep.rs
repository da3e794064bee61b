//! Sum-rate sweeps over the Gaussian channel and their CSV form.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{self, CSwap, GaussConfig, GaussError, HkParams};

pub const CSV_HEADER: &str = "x,sum_rate_proposed,sum_rate_ian,sum_rate_snd,alpha1_star,alpha2_star,sigma2_star";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XVariable {
    P,
    R0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "lowercase", deny_unknown_fields)]
pub enum Grid {
    Log { start: f64, stop: f64, points: usize },
    Linear { start: f64, stop: f64, points: usize },
    Values { values: Vec<f64> },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, SweepError> {
        let v = match *self {
            Grid::Values { ref values } => values.clone(),
            Grid::Linear { start, stop, points } => {
                check_range(start, stop, points)?;
                spaced(points, |t| start + t * (stop - start))
            }
            Grid::Log { start, stop, points } => {
                check_range(start, stop, points)?;
                if start <= 0.0 || stop <= 0.0 {
                    return Err(SweepError::Invalid("log grid endpoints must be positive".into()));
                }
                let (a, b) = (start.log10(), stop.log10());
                spaced(points, |t| 10f64.powf(a + t * (b - a)))
            }
        };
        if v.is_empty() {
            return Err(SweepError::Invalid("grid is empty".into()));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(SweepError::Invalid(format!("grid value {x} is not finite")));
        }
        Ok(v)
    }
}

fn check_range(start: f64, stop: f64, points: usize) -> Result<(), SweepError> {
    if points == 0 {
        return Err(SweepError::Invalid("grid is empty".into()));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(SweepError::Invalid("grid endpoints must be finite".into()));
    }
    Ok(())
}

// Endpoints are hit exactly; interior points use t = k / (n - 1).
fn spaced(points: usize, at: impl Fn(f64) -> f64) -> Vec<f64> {
    if points == 1 {
        return vec![at(0.0)];
    }
    let last = (points - 1) as f64;
    (0..points)
        .map(|k| match k {
            0 => at(0.0),
            k if k == points - 1 => at(1.0),
            k => at(k as f64 / last),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaHandling {
    Fixed(f64),
    Grid(Vec<f64>),
}

impl SigmaHandling {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SigmaHandling::Fixed(s) => vec![*s],
            SigmaHandling::Grid(v) => v.clone(),
        }
    }
}

/// Parameters held constant along the sweep. The swept variable may be omitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    pub g31: f64,
    pub g32: f64,
    pub g41: f64,
    pub g42: f64,
    pub g51: f64,
    pub g52: f64,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(rename = "R0", default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub x_variable: XVariable,
    pub grid: Grid,
    pub fixed: FixedParams,
    pub alpha_step: f64,
    pub sigma2: SigmaHandling,
}

impl SweepSpec {
    /// The reference comparison: P on a log grid from 0.1 to 100, sigma2 = 5, R0 = 1.
    pub fn reference() -> Self {
        Self {
            x_variable: XVariable::P,
            grid: Grid::Log {
                start: 0.1,
                stop: 100.0,
                points: 21,
            },
            fixed: FixedParams {
                g31: 0.5,
                g32: 0.1,
                g41: 1.0,
                g42: 0.4,
                g51: 0.4,
                g52: 1.0,
                p: None,
                r0: Some(1.0),
            },
            alpha_step: 0.02,
            sigma2: SigmaHandling::Fixed(5.0),
        }
    }

    pub fn config_at(&self, x: f64) -> Result<GaussConfig, SweepError> {
        let f = &self.fixed;
        let (p, r0) = match self.x_variable {
            XVariable::P => (Some(x), f.r0),
            XVariable::R0 => (f.p, Some(x)),
        };
        let missing = |n: &str| SweepError::Invalid(format!("fixed.{n} is required when sweeping the other variable"));
        let cfg = GaussConfig {
            g31: f.g31,
            g32: f.g32,
            g41: f.g41,
            g42: f.g42,
            g51: f.g51,
            g52: f.g52,
            p: p.ok_or_else(|| missing("P"))?,
            r0: r0.ok_or_else(|| missing("R0"))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<Vec<(f64, GaussConfig)>, SweepError> {
        gauss::alpha_grid(self.alpha_step)?;
        let sigmas = self.sigma2.values();
        if sigmas.is_empty() {
            return Err(GaussError::EmptyGrid("sigma2").into());
        }
        for &s in &sigmas {
            HkParams::new(0.0, 0.0, s)?;
        }
        self.grid
            .values()?
            .into_iter()
            .map(|x| Ok((x, self.config_at(x)?)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub proposed: f64,
    pub ian: f64,
    pub snd: f64,
    pub best: HkParams,
}

pub fn run_sweep(spec: &SweepSpec, cswap: CSwap) -> Result<Vec<SweepRow>, SweepError> {
    let points = spec.validate()?;
    let sigmas = spec.sigma2.values();
    points
        .par_iter()
        .map(|&(x, cfg)| {
            let best = gauss::optimize_sum_rate_with(&cfg, spec.alpha_step, &sigmas, cswap)?;
            Ok(SweepRow {
                x,
                proposed: best.sum_rate,
                ian: gauss::baseline_ian_with(&cfg, &sigmas, cswap)?,
                snd: gauss::baseline_snd_with(&cfg, &sigmas, cswap)?,
                best: best.params,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[SweepRow], cswap: CSwap) -> String {
    let mut s = format!("# c-swap={}\n{CSV_HEADER}\n", cswap.as_str());
    for r in rows {
        writeln!(
            s,
            "{},{:.6},{:.6},{:.6},{},{},{}",
            r.x, r.proposed, r.ian, r.snd, r.best.alpha1, r.best.alpha2, r.best.sigma2
        )
        .unwrap();
    }
    s
}
