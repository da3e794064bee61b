//! Gaussian interference relay channel with orthogonal receiver components.
//!
//! Sources split power between a common part `U_i` (fraction `1 - alpha_i`)
//! and a private part `V_i` (fraction `alpha_i`). The relay quantizes
//! `Y3 + Z` with `Z ~ N(0, sigma2)` and forwards over a noiseless link of
//! rate `R0` shared by both destinations. All rates are in bits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{RateInequality, RateRegion2D};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("capacity function argument must be nonnegative, got {0}")]
    NegativeSnr(f64),
    #[error("invalid channel configuration: {0}")]
    Config(String),
    #[error("invalid rate-splitting parameters: {0}")]
    Params(String),
    #[error("{0} grid is empty")]
    EmptyGrid(&'static str),
    #[error("alpha step {0} must divide [0, 1] evenly")]
    AlphaStep(f64),
}

pub type Result<T> = std::result::Result<T, GaussError>;

/// `C(x) = 1/2 log2(1 + x)`.
pub fn cfn(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(GaussError::NegativeSnr(x));
    }
    Ok(cap(x))
}

#[inline]
fn cap(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "capacity argument {x}");
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

/// Channel gains (`g_jk` from node `k` to node `j`), per-source power and link rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussConfig {
    pub g31: f64,
    pub g32: f64,
    pub g41: f64,
    pub g42: f64,
    pub g51: f64,
    pub g52: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
}

impl GaussConfig {
    pub fn validate(&self) -> Result<()> {
        let gains = [self.g31, self.g32, self.g41, self.g42, self.g51, self.g52];
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(GaussError::Config("gains must be finite".into()));
        }
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(GaussError::Config(format!("P must be positive, got {}", self.p)));
        }
        if !(self.r0.is_finite() && self.r0 >= 0.0) {
            return Err(GaussError::Config(format!("R0 must be nonnegative, got {}", self.r0)));
        }
        Ok(())
    }

    /// Gains of the reference comparison with the given power and link rate.
    pub fn reference(p: f64, r0: f64) -> Self {
        Self {
            g31: 0.5,
            g32: 0.1,
            g41: 1.0,
            g42: 0.4,
            g51: 0.4,
            g52: 1.0,
            p,
            r0,
        }
    }

    /// Exchange the roles of the two source-destination pairs.
    pub fn swapped(&self) -> Self {
        Self {
            g31: self.g32,
            g32: self.g31,
            g41: self.g52,
            g42: self.g51,
            g51: self.g42,
            g52: self.g41,
            ..*self
        }
    }
}

/// Private-power fractions and compression noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HkParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub sigma2: f64,
}

impl HkParams {
    pub fn new(alpha1: f64, alpha2: f64, sigma2: f64) -> Result<Self> {
        let p = Self { alpha1, alpha2, sigma2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(GaussError::Params(format!("{name} = {a} is outside [0, 1]")));
            }
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(GaussError::Params(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            sigma2: self.sigma2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub a1: f64,
    pub a2: f64,
    pub b11: f64,
    pub b12: f64,
    pub b21: f64,
    pub b22: f64,
    /// Compression penalty at destination 4, in bits.
    pub c1: f64,
    /// Compression penalty at destination 5, in bits.
    pub c2: f64,
}

pub fn derived_constants(cfg: &GaussConfig, hk: &HkParams) -> DerivedConstants {
    let GaussConfig {
        g31,
        g32,
        g41,
        g42,
        g51,
        g52,
        p,
        ..
    } = *cfg;
    let HkParams { alpha1, alpha2, sigma2 } = *hk;
    DerivedConstants {
        a1: g31 * g42 - g32 * g41,
        a2: g31 * g52 - g32 * g51,
        b11: g31 * g31 + (1.0 + sigma2) * g41 * g41,
        b12: g32 * g32 + (1.0 + sigma2) * g42 * g42,
        b21: g31 * g31 + (1.0 + sigma2) * g51 * g51,
        b22: g32 * g32 + (1.0 + sigma2) * g52 * g52,
        c1: cap(((g32 * g32 + g42 * g42) * alpha2 * p + 1.0) / ((g42 * g42 * alpha2 * p + 1.0) * sigma2)),
        c2: cap(((g31 * g31 + g51 * g51) * alpha1 * p + 1.0) / ((g51 * g51 * alpha1 * p + 1.0) * sigma2)),
    }
}

/// How to attach the compression penalties in the one sum-rate bound whose
/// printed form pairs `C1` with a destination-5 term and `C2` with a
/// destination-4 term. Both readings subtract `C1 + C2` once, so they agree
/// numerically; the choice only affects how the bound is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CSwap {
    /// `C1` with the destination-4 term, `C2` with the destination-5 term.
    #[default]
    Pattern,
    /// As printed.
    Verbatim,
}

impl CSwap {
    pub fn as_str(self) -> &'static str {
        match self {
            CSwap::Pattern => "pattern",
            CSwap::Verbatim => "verbatim",
        }
    }
}

/// Rates decodable by destination 4 for user 1 in four decoding situations,
/// once with the relay's description (`via_relay`) and once from `Y4'`
/// alone (`direct`, to which the link contributes `R0 - C1`).
#[derive(Debug, Clone, Copy)]
struct SideRates {
    /// User 1 message given both common parts.
    private: f64,
    /// User 1 message given only the other user's common part.
    full: f64,
    /// User 1 message and the other user's common part, own common known.
    private_cross: f64,
    /// User 1 message together with the other user's common part.
    all: f64,
}

struct Side {
    via_relay: SideRates,
    direct: SideRates,
    /// Relay-link credit for one use of the direct form: `R0 - C1`.
    link: f64,
    penalty: f64,
}

fn side(cfg: &GaussConfig, hk: &HkParams) -> Side {
    let k = derived_constants(cfg, hk);
    let (p, a1, a2, s2) = (cfg.p, hk.alpha1, hk.alpha2, hk.sigma2);
    let relay_den = 1.0 + s2 + k.b12 * a2 * p;
    let direct_den = cfg.g42 * cfg.g42 * a2 * p + 1.0;
    let g41s = cfg.g41 * cfg.g41;
    let g42s = cfg.g42 * cfg.g42;
    let a1sq = k.a1 * k.a1;
    Side {
        via_relay: SideRates {
            private: cap((k.b11 * a1 * p + a1sq * a1 * a2 * p * p) / relay_den),
            full: cap((k.b11 * p + a1sq * a2 * p * p) / relay_den),
            private_cross: cap((k.b12 * (1.0 - a2) * p + k.b11 * a1 * p + a1sq * a1 * p * p) / relay_den),
            all: cap((k.b12 * (1.0 - a2) * p + k.b11 * p + a1sq * p * p) / relay_den),
        },
        direct: SideRates {
            private: cap(g41s * a1 * p / direct_den),
            full: cap(g41s * p / direct_den),
            private_cross: cap((g41s * a1 * p + (1.0 - a2) * g42s * p) / direct_den),
            all: cap((g41s * p + (1.0 - a2) * g42s * p) / direct_den),
        },
        link: cfg.r0 - k.c1,
        penalty: k.c1,
    }
}

/// The six bounds on `2R1 + R2` for one orientation of the channel.
fn weighted_bounds(one: &Side, two: &Side, r0: f64) -> [f64; 6] {
    let (r1, d1) = (&one.via_relay, &one.direct);
    let (r2, d2) = (&two.via_relay, &two.direct);
    [
        r1.private + r1.all + r2.private_cross,
        d1.private + d1.all + d2.private_cross + 3.0 * r0 - 2.0 * one.penalty - two.penalty,
        d1.private + d1.all + 2.0 * r0 - 2.0 * one.penalty + r2.private_cross,
        r1.private + r1.all + d2.private_cross + r0 - two.penalty,
        r1.private + d1.all + d2.private_cross + 2.0 * r0 - one.penalty - two.penalty,
        r1.private + r2.private_cross + d1.all + r0 - one.penalty,
    ]
}

/// Every bound of the Gaussian inner region, `C1`/`C2` attached per [`CSwap::Pattern`].
pub fn gauss_region(cfg: &GaussConfig, hk: &HkParams) -> Vec<RateInequality> {
    gauss_region_with(cfg, hk, CSwap::Pattern)
}

/// Every bound of the Gaussian inner region: two each on `R1` and `R2`,
/// twelve on `R1 + R2`, six each on `2R1 + R2` and `R1 + 2R2`.
pub fn gauss_region_with(cfg: &GaussConfig, hk: &HkParams, cswap: CSwap) -> Vec<RateInequality> {
    let one = side(cfg, hk);
    let two = side(&cfg.swapped(), &hk.swapped());
    let r0 = cfg.r0;
    let mut out = Vec::with_capacity(28);

    out.push(RateInequality::new(1, 0, one.via_relay.full, "R1 #1 relay"));
    out.push(RateInequality::new(1, 0, one.direct.full + one.link, "R1 #2 link"));
    out.push(RateInequality::new(0, 1, two.via_relay.full, "R2 #1 relay"));
    out.push(RateInequality::new(0, 1, two.direct.full + two.link, "R2 #2 link"));

    // Each sum-rate family pairs one decoding situation per destination and
    // takes every relay/link combination.
    let families: [(&str, f64, f64, f64, f64); 3] = [
        (
            "private 1 + all 2",
            one.via_relay.private,
            one.direct.private + one.link,
            two.via_relay.all,
            two.direct.all + two.link,
        ),
        (
            "private 2 + all 1",
            two.via_relay.private,
            two.direct.private + two.link,
            one.via_relay.all,
            one.direct.all + one.link,
        ),
        (
            "cross",
            one.via_relay.private_cross,
            one.direct.private_cross + one.link,
            two.via_relay.private_cross,
            two.direct.private_cross + two.link,
        ),
    ];
    let mut n = 0;
    for (fi, (name, relay_a, link_a, relay_b, link_b)) in families.into_iter().enumerate() {
        let link_link = if fi == 1 && cswap == CSwap::Verbatim {
            // printed as C(g52 term) - C1 + C(g41 term) - C2 + 2 R0
            two.direct.private - one.penalty + one.direct.all - two.penalty + 2.0 * r0
        } else {
            link_a + link_b
        };
        for (kind, rhs) in [
            ("relay/relay", relay_a + relay_b),
            ("link/link", link_link),
            ("relay/link", relay_a + link_b),
            ("link/relay", relay_b + link_a),
        ] {
            n += 1;
            out.push(RateInequality::new(1, 1, rhs, format!("R1+R2 #{n} {name} {kind}")));
        }
    }

    for (i, rhs) in weighted_bounds(&one, &two, r0).into_iter().enumerate() {
        out.push(RateInequality::new(2, 1, rhs, format!("2R1+R2 #{}", i + 1)));
    }
    for (i, rhs) in weighted_bounds(&two, &one, r0).into_iter().enumerate() {
        out.push(RateInequality::new(1, 2, rhs, format!("R1+2R2 #{}", i + 1)));
    }
    out
}

/// Maximum `R1 + R2` over the region; 0 when the region is empty.
pub fn sum_rate(cfg: &GaussConfig, hk: &HkParams) -> f64 {
    sum_rate_with(cfg, hk, CSwap::Pattern)
}

pub fn sum_rate_with(cfg: &GaussConfig, hk: &HkParams, cswap: CSwap) -> f64 {
    let region = RateRegion2D::new(gauss_region_with(cfg, hk, cswap))
        .expect("Gaussian bounds always carry both single-rate shapes");
    region.max_weighted(1.0, 1.0).expect("unit weights are valid").0
}

/// `0, step, 2 step, ..., 1`, requiring `1 / step` to be an integer.
pub fn alpha_grid(step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && step <= 1.0) {
        return Err(GaussError::AlphaStep(step));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(GaussError::AlphaStep(step));
    }
    let n = n as usize;
    Ok((0..=n).map(|k| k as f64 / n as f64).collect())
}

fn sorted_sigmas(sigmas: &[f64]) -> Result<Vec<f64>> {
    if sigmas.is_empty() {
        return Err(GaussError::EmptyGrid("sigma2"));
    }
    if let Some(&s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(GaussError::Params(format!("sigma2 must be positive, got {s}")));
    }
    let mut s = sigmas.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumRateOptimum {
    pub params: HkParams,
    pub sum_rate: f64,
}

/// Exhaustive grid search over `(alpha1, alpha2, sigma2)`.
///
/// Grid points are evaluated in parallel; the result is the first maximum
/// in lexicographic `(alpha1, alpha2, sigma2)` order, so it does not depend
/// on scheduling.
pub fn optimize_sum_rate(cfg: &GaussConfig, alpha_step: f64, sigmas: &[f64]) -> Result<SumRateOptimum> {
    optimize_sum_rate_with(cfg, alpha_step, sigmas, CSwap::Pattern)
}

pub fn optimize_sum_rate_with(
    cfg: &GaussConfig,
    alpha_step: f64,
    sigmas: &[f64],
    cswap: CSwap,
) -> Result<SumRateOptimum> {
    cfg.validate()?;
    let alphas = alpha_grid(alpha_step)?;
    let sigmas = sorted_sigmas(sigmas)?;
    let points: Vec<HkParams> = alphas
        .iter()
        .flat_map(|&a1| {
            let sigmas = &sigmas;
            alphas.iter().flat_map(move |&a2| {
                sigmas.iter().map(move |&s| HkParams {
                    alpha1: a1,
                    alpha2: a2,
                    sigma2: s,
                })
            })
        })
        .collect();
    let rates: Vec<f64> = points.par_iter().map(|hk| sum_rate_with(cfg, hk, cswap)).collect();
    let mut best = SumRateOptimum {
        params: points[0],
        sum_rate: rates[0],
    };
    for (hk, &r) in points.iter().zip(&rates).skip(1) {
        if r > best.sum_rate {
            best = SumRateOptimum {
                params: *hk,
                sum_rate: r,
            };
        }
    }
    Ok(best)
}

fn restricted(cfg: &GaussConfig, alpha: f64, sigmas: &[f64], cswap: CSwap) -> Result<f64> {
    cfg.validate()?;
    let sigmas = sorted_sigmas(sigmas)?;
    Ok(sigmas
        .iter()
        .map(|&s| {
            sum_rate_with(
                cfg,
                &HkParams {
                    alpha1: alpha,
                    alpha2: alpha,
                    sigma2: s,
                },
                cswap,
            )
        })
        .fold(0.0, f64::max))
}

/// All power private: interference treated as noise.
pub fn baseline_ian(cfg: &GaussConfig, sigmas: &[f64]) -> Result<f64> {
    restricted(cfg, 1.0, sigmas, CSwap::Pattern)
}

/// All power common: both messages decoded simultaneously.
pub fn baseline_snd(cfg: &GaussConfig, sigmas: &[f64]) -> Result<f64> {
    restricted(cfg, 0.0, sigmas, CSwap::Pattern)
}

pub fn baseline_ian_with(cfg: &GaussConfig, sigmas: &[f64], cswap: CSwap) -> Result<f64> {
    restricted(cfg, 1.0, sigmas, cswap)
}

pub fn baseline_snd_with(cfg: &GaussConfig, sigmas: &[f64], cswap: CSwap) -> Result<f64> {
    restricted(cfg, 0.0, sigmas, cswap)
}
