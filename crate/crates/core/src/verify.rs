//! Cross-checks between the evaluators and independent reference computations.
//!
//! [`oracle`] holds the reference computations, written without the
//! evaluators' machinery: naive enumeration of outcomes, Monte-Carlo
//! sampling, and a straight-line transcription of the Gaussian bounds.
//! [`random`] draws the seeded instances they are compared on.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::det_class::{self, theorem2_region};
use crate::dm_region::{corollary1_region, theorem1_region};
use crate::gauss::{self, CSwap, GaussConfig, HkParams};
use crate::sweep::{run_sweep, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn within(name: &str, max_deviation: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: max_deviation <= tolerance,
            max_deviation,
            tolerance,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, detail: impl fmt::Display) -> Self {
        Self {
            name: name.into(),
            passed: false,
            max_deviation: f64::NAN,
            tolerance: 0.0,
            detail: detail.to_string(),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} max deviation {:.3e} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Mi,
    Regions,
    Det,
    Gauss,
    All,
}

pub fn run_suite(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::Mi => mi_checks(),
        Suite::Regions => region_checks(),
        Suite::Det => det_checks(),
        Suite::Gauss => gauss_checks(),
        Suite::All => [mi_checks(), region_checks(), det_checks(), gauss_checks()].concat(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rhs(r: &[crate::geom::RateInequality]) -> Vec<f64> {
    r.iter().map(|i| i.rhs).collect()
}

// Each check body returns (max deviation, detail) or an error message.
fn check(name: &str, tol: f64, body: impl FnOnce() -> Result<(f64, String), String>) -> CheckResult {
    match body() {
        Ok((dev, detail)) => CheckResult::within(name, dev, tol, detail),
        Err(e) => CheckResult::failed(name, e),
    }
}

pub fn mi_checks() -> Vec<CheckResult> {
    vec![
        check("mi monte-carlo", 3.0, || {
            let mut r = rng(11);
            let mut worst = 0.0f64;
            let mut bits = 0.0f64;
            for _ in 0..10 {
                let j = random::joint(&mut r, 3);
                let exact = j.mutual_info(&["A"], &["B"], &["C"]).map_err(|e| e.to_string())?;
                let (est, se) = oracle::mc_conditional_mi(&j, 1_000_000, &mut r);
                worst = worst.max((exact - est).abs() / se);
                bits = bits.max((exact - est).abs());
            }
            Ok((
                worst,
                format!("in standard errors; largest gap {bits:.2e} bits over 10 joints"),
            ))
        }),
        check("mi identities", 1e-10, || {
            let mut r = rng(12);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let j = random::joint(&mut r, 3);
                let mi = |a: &[&str], b: &[&str], c: &[&str]| j.mutual_info(a, b, c).map_err(|e| e.to_string());
                let chain = mi(&["A"], &["B", "C"], &[])? - mi(&["A"], &["C"], &[])? - mi(&["A"], &["B"], &["C"])?;
                let sym = mi(&["A"], &["B"], &["C"])? - mi(&["B"], &["A"], &["C"])?;
                worst = worst.max(chain.abs()).max(sym.abs());
            }
            Ok((worst, "chain rule and symmetry over 100 joints".into()))
        }),
        check("entropy enumeration", 1e-12, || {
            let mut r = rng(13);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let j = random::joint(&mut r, 3);
                let o = oracle::Outcomes::from_joint(&j);
                for set in [&["A"][..], &["B", "C"], &["A", "B", "C"]] {
                    let h = j.entropy(set).map_err(|e| e.to_string())?;
                    worst = worst.max((h - o.entropy(set)).abs());
                }
            }
            Ok((worst, "marginal entropies over 100 joints".into()))
        }),
    ]
}

pub fn region_checks() -> Vec<CheckResult> {
    vec![
        check("theorem1 vs corollary1", 1e-12, || {
            let mut r = rng(21);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let inst = random::dm_instance(&mut r, 1, 2, 2);
                let a = theorem1_region(&inst.channel, &inst.input).map_err(|e| e.to_string())?;
                let b = corollary1_region(&inst.channel, &inst.input).map_err(|e| e.to_string())?;
                worst = worst.max(max_abs_diff(&rhs(&a), &rhs(&b)));
            }
            Ok((worst, "7 bounds on 20 binary instances".into()))
        }),
        check("relay-free han-kobayashi", 1e-12, || {
            let mut r = rng(22);
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let inst = random::dm_instance(&mut r, 1, 1, 1);
                let a = theorem1_region(&inst.channel, &inst.input).map_err(|e| e.to_string())?;
                let hk = oracle::han_kobayashi(&oracle::Outcomes::from_factors(&inst.factors));
                worst = worst.max(max_abs_diff(&rhs(&a), &hk));
            }
            Ok((worst, "silent relay on 10 instances".into()))
        }),
        check("max_weighted vs grid", 0.0, || {
            let mut r = rng(23);
            let mut excess = 0.0f64;
            for _ in 0..50 {
                let (region, (w1, w2)) = random::region(&mut r);
                let (exact, _) = region.max_weighted(w1, w2).map_err(|e| e.to_string())?;
                let (grid, pitch) = oracle::grid_max_weighted(&region, w1, w2, 2000);
                // the grid can only under-shoot, by at most one pitch
                excess = excess.max(grid - exact - 1e-9).max(exact - grid - pitch - 1e-9);
            }
            Ok((
                excess.max(0.0),
                "beyond one grid pitch, 50 regions on 2000x2000 grids".into(),
            ))
        }),
        check("frontier feasibility", 1e-9, || {
            let mut r = rng(24);
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let (region, _) = random::region(&mut r);
                for &(x, y) in region.frontier().vertices() {
                    let violations = region.inequalities().iter().map(|i| i.lhs(x, y) - i.rhs);
                    for v in violations.chain([-x, -y]) {
                        if v > worst {
                            worst = v;
                        }
                    }
                }
            }
            Ok((worst, "largest violation by a frontier vertex".into()))
        }),
    ]
}

pub fn det_checks() -> Vec<CheckResult> {
    vec![
        check("specialization", 1e-9, || {
            let uniform = det_class::DetInput::product(vec![0.5; 2], vec![0.5; 2]).map_err(|e| e.to_string())?;
            let mut worst = det_class::specialization_check(&det_class::modulo2_example(1.0), &uniform)
                .map_err(|e| e.to_string())?;
            let mut r = rng(31);
            for _ in 0..10 {
                let spec = random::ternary_det_spec(&mut r);
                let input = random::det_input(&mut r, &spec).to_input().map_err(|e| e.to_string())?;
                worst = worst.max(det_class::specialization_check(&spec, &input).map_err(|e| e.to_string())?);
            }
            Ok((worst, "modulo-2 channel and 10 ternary channels".into()))
        }),
        check("el gamal-costa reduction", 1e-10, || {
            let mut r = rng(32);
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let spec = random::egc_spec(&mut r);
                let raw = random::det_input(&mut r, &spec);
                let region =
                    theorem2_region(&spec, &raw.to_input().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let o = oracle::Outcomes::from_det(&spec, &raw);
                worst = worst.max(max_abs_diff(&rhs(&region), &oracle::el_gamal_costa(&o)));
            }
            Ok((worst, "silent relay on 10 instances".into()))
        }),
        check("single-source reduction", 1e-10, || {
            let mut r = rng(33);
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let spec = random::single_source_spec(&mut r);
                let raw = random::det_input(&mut r, &spec);
                let region =
                    theorem2_region(&spec, &raw.to_input().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let o = oracle::Outcomes::from_det(&spec, &raw);
                worst = worst.max((region[0].rhs - oracle::relay_channel_r1(&o, spec.r0)).abs());
            }
            Ok((worst, "R1 bound with |X2| = 1 on 10 instances".into()))
        }),
    ]
}

pub fn gauss_checks() -> Vec<CheckResult> {
    vec![
        check("gaussian transcription", 1e-12, || {
            let mut r = rng(41);
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let cfg = random::gauss_config(&mut r);
                let hk = random::hk_params(&mut r);
                let lit = oracle::gauss_literal(&cfg, &hk);
                for cs in [CSwap::Pattern, CSwap::Verbatim] {
                    worst = worst.max(max_abs_diff(&rhs(&gauss::gauss_region_with(&cfg, &hk, cs)), &lit));
                }
            }
            Ok((worst, "28 bounds on 50 configurations, both c-swap readings".into()))
        }),
        check("c-swap readings", 1e-12, || {
            // The printed mixed bound pairs C1 with a destination-5 term. Both
            // pairings subtract C1 + C2 once, so only the assembly differs.
            let mut r = rng(43);
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let cfg = random::gauss_config(&mut r);
                let hk = random::hk_params(&mut r);
                let a = rhs(&gauss::gauss_region_with(&cfg, &hk, CSwap::Pattern));
                let b = rhs(&gauss::gauss_region_with(&cfg, &hk, CSwap::Verbatim));
                worst = worst.max(max_abs_diff(&a, &b));
            }
            Ok((
                worst,
                "pattern and verbatim pairings of C1, C2 on 50 configurations".into(),
            ))
        }),
        check("r0 monotonicity", 0.0, || {
            let mut r = rng(42);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let mut cfg = random::gauss_config(&mut r);
                let hk = random::hk_params(&mut r);
                let mut prev = f64::NEG_INFINITY;
                for r0 in [0.0, 0.5, 1.0, 2.0] {
                    cfg.r0 = r0;
                    let s = gauss::sum_rate(&cfg, &hk);
                    worst = worst.max(prev - s);
                    prev = s;
                }
            }
            Ok((
                worst.max(0.0),
                "largest decrease of the sum rate over 20 configurations".into(),
            ))
        }),
        check("point-to-point limit", 1e-3, || {
            let cfg = GaussConfig {
                g31: 0.0,
                g32: 0.0,
                g41: 1.0,
                g42: 0.0,
                g51: 0.0,
                g52: 1.0,
                p: 10.0,
                r0: 0.0,
            };
            let hk = HkParams::new(1.0, 1.0, 1e6).map_err(|e| e.to_string())?;
            let expected = oracle::awgn(cfg.g41 * cfg.g41 * cfg.p) + oracle::awgn(cfg.g52 * cfg.g52 * cfg.p);
            Ok((
                (gauss::sum_rate(&cfg, &hk) - expected).abs(),
                format!("expected {expected:.6} bits"),
            ))
        }),
        check("reference sweep dominance", 1e-9, || {
            let rows = run_sweep(&SweepSpec::reference(), CSwap::Pattern).map_err(|e| e.to_string())?;
            let shortfall = rows.iter().map(|r| r.ian.max(r.snd) - r.proposed).fold(0.0, f64::max);
            let gain = rows
                .iter()
                .map(|r| r.proposed - r.ian.max(r.snd))
                .fold(f64::NEG_INFINITY, f64::max);
            if gain < 0.01 {
                return Err(format!("largest improvement over the baselines is only {gain:.6} bits"));
            }
            Ok((
                shortfall,
                format!("largest improvement {gain:.4} bits over {} points", rows.len()),
            ))
        }),
    ]
}

/// Seeded generators for the instances the checks run on.
pub mod random {
    use rand::seq::SliceRandom;
    use rand::Rng;

    use crate::det_class::{DetError, DetInput, InjectiveDetSpec};
    use crate::dm_region::{names, ImrcChannel, ImrcInputSpec, RelayInput};
    use crate::gauss::{GaussConfig, HkParams};
    use crate::geom::{RateInequality, RateRegion2D};
    use crate::prob::{build_joint, ConditionalFactor, NamedJoint, Variable};

    /// Flat Dirichlet(1) draw.
    pub fn pmf<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    /// A random conditional pmf table, one independent row per `given` assignment.
    pub fn factor<R: Rng>(rng: &mut R, outputs: Vec<Variable>, given: Vec<Variable>) -> ConditionalFactor {
        let rows: usize = given.iter().map(|v| v.size).product();
        let width: usize = outputs.iter().map(|v| v.size).product();
        let table: Vec<f64> = (0..rows).flat_map(|_| pmf(rng, width)).collect();
        ConditionalFactor::new(outputs, given, table).expect("rows are normalized")
    }

    /// Joint pmf over `n` variables named `A, B, C, ...` with 2 or 3 letters each.
    pub fn joint<R: Rng>(rng: &mut R, n: usize) -> NamedJoint {
        let vars: Vec<Variable> = (0..n)
            .map(|i| Variable::new(((b'A' + i as u8) as char).to_string(), rng.gen_range(2..=3)))
            .collect();
        let size = vars.iter().map(|v| v.size).product();
        NamedJoint::new(vars, pmf(rng, size)).expect("valid pmf")
    }

    pub struct DmInstance {
        pub channel: ImrcChannel,
        pub input: ImrcInputSpec,
        /// Every factor of the joint: input parts, channel law, compressions.
        pub factors: Vec<ConditionalFactor>,
    }

    /// A random instance with `relays` relays, binary `Q, U, X, Y`, relay
    /// inputs with `x3` letters and compressions with `yhat` letters.
    pub fn dm_instance<R: Rng>(rng: &mut R, relays: usize, x3: usize, yhat: usize) -> DmInstance {
        let v = |n: &str, s: usize| Variable::new(n, s);
        let q = v(names::Q, 2);
        let time_sharing = factor(rng, vec![q.clone()], vec![]);
        let s1 = factor(rng, vec![v(names::U1, 2), v(names::X1, 2)], vec![q.clone()]);
        let s2 = factor(rng, vec![v(names::U2, 2), v(names::X2, 2)], vec![q.clone()]);
        let mut given = vec![v(names::X1, 2), v(names::X2, 2)];
        given.extend((1..=relays).map(|k| v(&names::x3(k), x3)));
        let mut outputs: Vec<Variable> = (1..=relays).map(|k| v(&names::y3(k), 2)).collect();
        outputs.push(v(names::Y4, 2));
        outputs.push(v(names::Y5, 2));
        let law = factor(rng, outputs, given);
        let relay_parts: Vec<RelayInput> = (1..=relays)
            .map(|k| RelayInput {
                x3: factor(rng, vec![v(&names::x3(k), x3)], vec![q.clone()]),
                compress: factor(
                    rng,
                    vec![v(&names::yhat3(k), yhat)],
                    vec![v(&names::y3(k), 2), v(&names::x3(k), x3), q.clone()],
                ),
            })
            .collect();
        let mut factors = vec![time_sharing.clone(), s1.clone(), s2.clone()];
        factors.extend(relay_parts.iter().map(|r| r.x3.clone()));
        factors.push(law.clone());
        factors.extend(relay_parts.iter().map(|r| r.compress.clone()));
        DmInstance {
            channel: ImrcChannel::new(law).expect("law follows the naming scheme"),
            input: ImrcInputSpec::new(time_sharing, s1, s2, relay_parts).expect("input follows the naming scheme"),
            factors,
        }
    }

    /// Check that a factor list builds; used by tests that need the joint.
    pub fn dm_joint(inst: &DmInstance) -> NamedJoint {
        build_joint(&inst.factors).expect("factors chain")
    }

    fn injection<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Vec<usize> {
        let mut letters: Vec<usize> = (0..n + extra).collect();
        letters.shuffle(rng);
        letters.truncate(n);
        letters
    }

    fn maps<R: Rng>(rng: &mut R, n: usize, range: usize) -> Vec<usize> {
        (0..n).map(|_| rng.gen_range(0..range)).collect()
    }

    fn size_of(t: &[usize]) -> usize {
        t.iter().max().map_or(1, |m| m + 1)
    }

    /// Build a valid spec: `y4` rows injective in `t2`, `y5` rows injective
    /// in `t1`, and `y3 = g(t1, t2)` so the relay output factors as required.
    fn spec_from<R: Rng>(
        rng: &mut R,
        t1: Vec<usize>,
        t2: Vec<usize>,
        x3_size: usize,
        y3_letters: usize,
        r0: f64,
    ) -> InjectiveDetSpec {
        let (n1, n2) = (size_of(&t1), size_of(&t2));
        let mut rows = |count: usize, n: usize| -> Vec<Vec<usize>> {
            (0..count)
                .map(|_| {
                    let extra = rng.gen_range(0..=2);
                    injection(rng, n, extra)
                })
                .collect()
        };
        let y4 = rows(t1.len(), n2);
        let y5 = rows(t2.len(), n1);
        let g: Vec<Vec<usize>> = (0..n1).map(|_| maps(rng, n2, y3_letters)).collect();
        let y3 = t1.iter().map(|&a| t2.iter().map(|&b| g[a][b]).collect()).collect();
        InjectiveDetSpec {
            x1_size: t1.len(),
            x2_size: t2.len(),
            x3_size,
            t1,
            t2,
            y4,
            y5,
            y3,
            r0,
        }
    }

    /// Ternary inputs, `R0 = log2 |X3|` with `|X3|` in 1..=3.
    pub fn ternary_det_spec<R: Rng>(rng: &mut R) -> InjectiveDetSpec {
        let t1 = maps(rng, 3, 3);
        let t2 = maps(rng, 3, 3);
        let x3 = rng.gen_range(1..=3);
        spec_from(rng, t1, t2, x3, 3, (x3 as f64).log2())
    }

    /// Silent relay: `|X3| = 1` and a constant `y3`.
    pub fn egc_spec<R: Rng>(rng: &mut R) -> InjectiveDetSpec {
        let t1 = maps(rng, 3, 3);
        let t2 = maps(rng, 3, 3);
        let r0 = rng.gen_range(0.0..2.0);
        spec_from(rng, t1, t2, 1, 1, r0)
    }

    /// `|X2| = 1`: a relay channel for the first pair.
    pub fn single_source_spec<R: Rng>(rng: &mut R) -> InjectiveDetSpec {
        let t1 = maps(rng, 3, 3);
        let r0 = rng.gen_range(0.0..2.0);
        spec_from(rng, t1, vec![0], 1, 3, r0)
    }

    /// Input tables kept in raw form so the oracles can enumerate them directly.
    #[derive(Debug, Clone)]
    pub struct RawDetInput {
        pub q: Vec<f64>,
        pub x1: Vec<Vec<f64>>,
        pub x2: Vec<Vec<f64>>,
    }

    impl RawDetInput {
        pub fn to_input(&self) -> Result<DetInput, DetError> {
            DetInput::new(self.q.clone(), self.x1.clone(), self.x2.clone())
        }
    }

    pub fn det_input<R: Rng>(rng: &mut R, spec: &InjectiveDetSpec) -> RawDetInput {
        let nq = rng.gen_range(1..=2);
        RawDetInput {
            q: pmf(rng, nq),
            x1: (0..nq).map(|_| pmf(rng, spec.x1_size)).collect(),
            x2: (0..nq).map(|_| pmf(rng, spec.x2_size)).collect(),
        }
    }

    pub fn gauss_config<R: Rng>(rng: &mut R) -> GaussConfig {
        let mut g = || rng.gen_range(-1.5..1.5);
        let (g31, g32, g41, g42, g51, g52) = (g(), g(), g(), g(), g(), g());
        GaussConfig {
            g31,
            g32,
            g41,
            g42,
            g51,
            g52,
            p: 10f64.powf(rng.gen_range(-1.0..2.0)),
            r0: rng.gen_range(0.0..2.0),
        }
    }

    pub fn hk_params<R: Rng>(rng: &mut R) -> HkParams {
        HkParams {
            alpha1: rng.gen(),
            alpha2: rng.gen(),
            sigma2: 10f64.powf(rng.gen_range(-1.0..1.5)),
        }
    }

    /// A bounded region with one to three bounds of each shape, plus positive weights.
    pub fn region<R: Rng>(rng: &mut R) -> (RateRegion2D, (f64, f64)) {
        let mut ineqs = Vec::new();
        for &(a, b) in &crate::geom::SHAPES {
            let count = if a == 0 || b == 0 {
                rng.gen_range(1..=3)
            } else {
                rng.gen_range(0..=2)
            };
            for _ in 0..count {
                let rhs = rng.gen_range(0.0..3.0) * f64::from(a + b);
                ineqs.push(RateInequality::new(a, b, rhs, "random"));
            }
        }
        let w = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
        (RateRegion2D::new(ineqs).expect("both single-rate shapes present"), w)
    }
}

/// Reference computations that share no code with the evaluators.
pub mod oracle {
    use std::collections::BTreeMap;

    use rand::Rng;

    use super::random::RawDetInput;
    use crate::det_class::InjectiveDetSpec;
    use crate::gauss::{GaussConfig, HkParams};
    use crate::geom::RateRegion2D;
    use crate::prob::{ConditionalFactor, NamedJoint};

    /// `1/2 log2(1 + snr)`.
    pub fn awgn(snr: f64) -> f64 {
        0.5 * (1.0 + snr).log2()
    }

    /// A list of weighted outcomes over named columns.
    pub struct Outcomes {
        names: Vec<String>,
        rows: Vec<(f64, Vec<usize>)>,
    }

    impl Outcomes {
        fn cols(&self, set: &[&str]) -> Vec<usize> {
            set.iter()
                .map(|n| {
                    self.names
                        .iter()
                        .position(|m| m == n)
                        .unwrap_or_else(|| panic!("no column {n}"))
                })
                .collect()
        }

        pub fn entropy(&self, set: &[&str]) -> f64 {
            let cols = self.cols(set);
            let mut mass: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (p, row) in &self.rows {
                *mass.entry(cols.iter().map(|&c| row[c]).collect()).or_default() += p;
            }
            mass.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
        }

        pub fn cond_entropy(&self, a: &[&str], c: &[&str]) -> f64 {
            self.entropy(&[a, c].concat()) - self.entropy(c)
        }

        pub fn mutual_info(&self, a: &[&str], b: &[&str], c: &[&str]) -> f64 {
            self.entropy(&[a, c].concat()) + self.entropy(&[b, c].concat())
                - self.entropy(&[a, b, c].concat())
                - self.entropy(c)
        }

        pub fn from_joint(j: &NamedJoint) -> Self {
            let sizes: Vec<usize> = j.variables().iter().map(|v| v.size).collect();
            let rows = j
                .table()
                .iter()
                .enumerate()
                .map(|(mut idx, &p)| {
                    let mut a = vec![0; sizes.len()];
                    for (k, &s) in sizes.iter().enumerate().rev() {
                        a[k] = idx % s;
                        idx /= s;
                    }
                    (p, a)
                })
                .collect();
            Self {
                names: j.variables().iter().map(|v| v.name.clone()).collect(),
                rows,
            }
        }

        /// Multiply the factors out over every assignment of every variable.
        pub fn from_factors(factors: &[ConditionalFactor]) -> Self {
            let mut vars: Vec<(String, usize)> = Vec::new();
            for f in factors {
                for v in f.given().iter().chain(f.outputs()) {
                    if !vars.iter().any(|(n, _)| *n == v.name) {
                        vars.push((v.name.clone(), v.size));
                    }
                }
            }
            let pos = |name: &str| vars.iter().position(|(n, _)| n == name).unwrap();
            let layouts: Vec<Vec<(usize, usize)>> = factors
                .iter()
                .map(|f| {
                    f.given()
                        .iter()
                        .chain(f.outputs())
                        .map(|v| (pos(&v.name), v.size))
                        .collect()
                })
                .collect();
            let mut rows = Vec::new();
            let mut a = vec![0usize; vars.len()];
            'outer: loop {
                let p: f64 = factors
                    .iter()
                    .zip(&layouts)
                    .map(|(f, lay)| f.table()[lay.iter().fold(0, |acc, &(i, s)| acc * s + a[i])])
                    .product();
                if p > 0.0 {
                    rows.push((p, a.clone()));
                }
                for k in (0..a.len()).rev() {
                    a[k] += 1;
                    if a[k] < vars[k].1 {
                        continue 'outer;
                    }
                    a[k] = 0;
                }
                break;
            }
            Self {
                names: vars.into_iter().map(|(n, _)| n).collect(),
                rows,
            }
        }

        /// Outcomes `(Q, X1, X2, T1, T2, Y4p, Y5p, Y3)` of a deterministic channel.
        pub fn from_det(spec: &InjectiveDetSpec, input: &RawDetInput) -> Self {
            let mut rows = Vec::new();
            for (q, &pq) in input.q.iter().enumerate() {
                for (x1, &p1) in input.x1[q].iter().enumerate() {
                    for (x2, &p2) in input.x2[q].iter().enumerate() {
                        let (t1, t2) = (spec.t1[x1], spec.t2[x2]);
                        rows.push((
                            pq * p1 * p2,
                            vec![q, x1, x2, t1, t2, spec.y4[x1][t2], spec.y5[x2][t1], spec.y3[x1][x2]],
                        ));
                    }
                }
            }
            Self {
                names: ["Q", "X1", "X2", "T1", "T2", "Y4p", "Y5p", "Y3"]
                    .map(String::from)
                    .to_vec(),
                rows,
            }
        }
    }

    /// Plug-in estimate of `I(A; B | C)` from `n` samples of a three-variable
    /// joint, with the standard error of the information density mean.
    pub fn mc_conditional_mi<R: Rng>(j: &NamedJoint, n: usize, rng: &mut R) -> (f64, f64) {
        let sizes: Vec<usize> = j.variables().iter().map(|v| v.size).collect();
        assert_eq!(sizes.len(), 3, "expects a joint over three variables");
        let mut cdf = Vec::with_capacity(j.table().len());
        let mut acc = 0.0;
        for &p in j.table() {
            acc += p;
            cdf.push(acc);
        }
        let mut counts = vec![0usize; cdf.len()];
        for _ in 0..n {
            let u = rng.gen::<f64>() * acc;
            let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            counts[k] += 1;
        }
        let (na, nb, nc) = (sizes[0], sizes[1], sizes[2]);
        let idx = |a: usize, b: usize, c: usize| (a * nb + b) * nc + c;
        let mut ac = vec![0usize; na * nc];
        let mut bc = vec![0usize; nb * nc];
        let mut cc = vec![0usize; nc];
        for a in 0..na {
            for b in 0..nb {
                for c in 0..nc {
                    let k = counts[idx(a, b, c)];
                    ac[a * nc + c] += k;
                    bc[b * nc + c] += k;
                    cc[c] += k;
                }
            }
        }
        let mut density = Vec::new();
        for a in 0..na {
            for b in 0..nb {
                for c in 0..nc {
                    let k = counts[idx(a, b, c)];
                    if k > 0 {
                        let i = ((k * cc[c]) as f64 / (ac[a * nc + c] * bc[b * nc + c]) as f64).log2();
                        density.push((k as f64 / n as f64, i));
                    }
                }
            }
        }
        let mean: f64 = density.iter().map(|(w, i)| w * i).sum();
        let var: f64 = density.iter().map(|(w, i)| w * (i - mean).powi(2)).sum();
        (mean, (var / n as f64).sqrt())
    }

    /// The seven Han-Kobayashi bounds with time sharing, from outcomes over
    /// `Q, U1, X1, U2, X2, Y4, Y5`, in the evaluators' order.
    pub fn han_kobayashi(o: &Outcomes) -> Vec<f64> {
        let own1 = o.mutual_info(&["X1"], &["Y4"], &["U2", "Q"]);
        let own2 = o.mutual_info(&["X2"], &["Y5"], &["U1", "Q"]);
        let priv1 = o.mutual_info(&["X1"], &["Y4"], &["U1", "U2", "Q"]);
        let priv2 = o.mutual_info(&["X2"], &["Y5"], &["U1", "U2", "Q"]);
        let all1 = o.mutual_info(&["X1", "U2"], &["Y4"], &["Q"]);
        let all2 = o.mutual_info(&["X2", "U1"], &["Y5"], &["Q"]);
        let cross1 = o.mutual_info(&["X1", "U2"], &["Y4"], &["U1", "Q"]);
        let cross2 = o.mutual_info(&["X2", "U1"], &["Y5"], &["U2", "Q"]);
        vec![
            own1,
            own2,
            priv1 + all2,
            priv2 + all1,
            cross1 + cross2,
            priv1 + all1 + cross2,
            priv2 + all2 + cross1,
        ]
    }

    /// Capacity region of the injective deterministic interference channel
    /// without a relay, from outcomes of [`Outcomes::from_det`].
    pub fn el_gamal_costa(o: &Outcomes) -> Vec<f64> {
        let h = |a: &str, c: &[&str]| o.cond_entropy(&[a], &[c, &["Q"]].concat());
        vec![
            h("Y4p", &["T2"]),
            h("Y5p", &["T1"]),
            h("Y4p", &["T1", "T2"]) + h("Y5p", &[]),
            h("Y5p", &["T1", "T2"]) + h("Y4p", &[]),
            h("Y4p", &["T1"]) + h("Y5p", &["T2"]),
            h("Y4p", &["T1", "T2"]) + h("Y4p", &[]) + h("Y5p", &["T2"]),
            h("Y5p", &["T1", "T2"]) + h("Y5p", &[]) + h("Y4p", &["T1"]),
        ]
    }

    /// `min{H(Y4'|Q) + H(Y3|Y4',Q), H(Y4'|Q) + R0}`.
    pub fn relay_channel_r1(o: &Outcomes, r0: f64) -> f64 {
        let hy = o.cond_entropy(&["Y4p"], &["Q"]);
        (hy + o.cond_entropy(&["Y3"], &["Y4p", "Q"])).min(hy + r0)
    }

    /// Maximum of `w1 R1 + w2 R2` over an `n x n` grid covering the region,
    /// and the pitch-sized slack `w1 h1 + w2 h2` the grid may lose.
    pub fn grid_max_weighted(region: &RateRegion2D, w1: f64, w2: f64, n: usize) -> (f64, f64) {
        let ineqs = region.inequalities();
        let bound = |pick: fn(&crate::geom::RateInequality) -> u8| {
            ineqs
                .iter()
                .filter(|i| pick(i) > 0)
                .map(|i| i.rhs / f64::from(pick(i)))
                .fold(f64::INFINITY, f64::min)
                .max(0.0)
        };
        let (top1, top2) = (bound(|i| i.a), bound(|i| i.b));
        let (h1, h2) = (top1 / (n - 1) as f64, top2 / (n - 1) as f64);
        let feasible = |i: usize, j: usize| ineqs.iter().all(|q| q.lhs(i as f64 * h1, j as f64 * h2) <= q.rhs);
        let mut best = 0.0f64;
        for i in 0..n {
            if !feasible(i, 0) {
                continue;
            }
            // every coefficient is nonnegative, so feasible points in a column form a prefix
            let (mut lo, mut hi) = (0, n);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if feasible(i, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.max(w1 * i as f64 * h1 + w2 * lo as f64 * h2);
        }
        (best, w1 * h1 + w2 * h2)
    }

    /// The Gaussian bounds typed out one by one, `R1 + 2 R2` included.
    pub fn gauss_literal(cfg: &GaussConfig, hk: &HkParams) -> Vec<f64> {
        let GaussConfig {
            g31,
            g32,
            g41,
            g42,
            g51,
            g52,
            p,
            r0,
        } = *cfg;
        let (al1, al2, s2) = (hk.alpha1, hk.alpha2, hk.sigma2);
        let c = awgn;
        let sq = |x: f64| x * x;

        let a1 = g31 * g42 - g32 * g41;
        let a2 = g31 * g52 - g32 * g51;
        let b11 = sq(g31) + (1.0 + s2) * sq(g41);
        let b12 = sq(g32) + (1.0 + s2) * sq(g42);
        let b21 = sq(g31) + (1.0 + s2) * sq(g51);
        let b22 = sq(g32) + (1.0 + s2) * sq(g52);
        let c1 = c(((sq(g32) + sq(g42)) * al2 * p + 1.0) / ((sq(g42) * al2 * p + 1.0) * s2));
        let c2 = c(((sq(g31) + sq(g51)) * al1 * p + 1.0) / ((sq(g51) * al1 * p + 1.0) * s2));
        let den1 = 1.0 + s2 + b12 * al2 * p;
        let den2 = 1.0 + s2 + b21 * al1 * p;
        let d4 = sq(g42) * al2 * p + 1.0;
        let d5 = sq(g51) * al1 * p + 1.0;

        let r1_relay = c((b11 * p + sq(a1) * al2 * p * p) / den1);
        let r1_link = c(sq(g41) * p / d4);
        let r2_relay = c((b22 * p + sq(a2) * al1 * p * p) / den2);
        let r2_link = c(sq(g52) * p / d5);

        let relay1_priv = c((b11 * al1 * p + sq(a1) * al1 * al2 * p * p) / den1);
        let relay2_all = c((b21 * (1.0 - al1) * p + b22 * p + sq(a2) * p * p) / den2);
        let link1_priv = c(sq(g41) * al1 * p / d4);
        let link2_all = c((sq(g52) * p + (1.0 - al1) * sq(g51) * p) / d5);

        let relay2_priv = c((b22 * al2 * p + sq(a2) * al1 * al2 * p * p) / den2);
        let relay1_all = c((b12 * (1.0 - al2) * p + b11 * p + sq(a1) * p * p) / den1);
        let link2_priv = c(sq(g52) * al2 * p / d5);
        let link1_all = c((sq(g41) * p + (1.0 - al2) * sq(g42) * p) / d4);

        let relay1_pc = c((b12 * (1.0 - al2) * p + b11 * al1 * p + sq(a1) * al1 * p * p) / den1);
        let relay2_pc = c((b21 * (1.0 - al1) * p + b22 * al2 * p + sq(a2) * al2 * p * p) / den2);
        let link1_pc = c((sq(g41) * al1 * p + (1.0 - al2) * sq(g42) * p) / d4);
        let link2_pc = c((sq(g52) * al2 * p + (1.0 - al1) * sq(g51) * p) / d5);

        vec![
            r1_relay,
            r1_link - c1 + r0,
            r2_relay,
            r2_link - c2 + r0,
            relay1_priv + relay2_all,
            link1_priv - c1 + link2_all - c2 + 2.0 * r0,
            relay1_priv + link2_all - c2 + r0,
            relay2_all + link1_priv - c1 + r0,
            relay2_priv + relay1_all,
            link2_priv - c1 + link1_all - c2 + 2.0 * r0,
            relay2_priv + link1_all - c1 + r0,
            relay1_all + link2_priv - c2 + r0,
            relay1_pc + relay2_pc,
            link1_pc - c1 + link2_pc - c2 + 2.0 * r0,
            relay1_pc + link2_pc - c2 + r0,
            relay2_pc + link1_pc - c1 + r0,
            // 2 R1 + R2
            relay1_priv + relay1_all + relay2_pc,
            link1_priv + link1_all + link2_pc + 3.0 * r0 - 2.0 * c1 - c2,
            link1_priv + link1_all + 2.0 * r0 - 2.0 * c1 + relay2_pc,
            relay1_priv + relay1_all + link2_pc + r0 - c2,
            relay1_priv + link1_all + link2_pc + 2.0 * r0 - c1 - c2,
            relay1_priv + relay2_pc + link1_all + r0 - c1,
            // R1 + 2 R2
            relay2_priv + relay2_all + relay1_pc,
            link2_priv + link2_all + link1_pc + 3.0 * r0 - 2.0 * c2 - c1,
            link2_priv + link2_all + 2.0 * r0 - 2.0 * c2 + relay1_pc,
            relay2_priv + relay2_all + link1_pc + r0 - c1,
            relay2_priv + link2_all + link1_pc + 2.0 * r0 - c2 - c1,
            relay2_priv + relay1_pc + link2_all + r0 - c2,
        ]
    }
}
