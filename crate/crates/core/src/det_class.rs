//! Injective deterministic interference relay channels.
//!
//! Each destination sees `Y' = y(own input, interference signal)` plus the
//! relay's noiseless link symbol `X3`. The relay sees `Y3`, which must be
//! recoverable at either destination from its own input and `Y'`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dm_region::{
    corollary1_region, inputs, ChannelAlphabets, ImrcChannel, ImrcInputSpec, RegionError, RelayInput,
};
use crate::geom::RateInequality;
use crate::prob::{build_joint, ConditionalFactor, NamedJoint, ProbError, Variable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetError {
    #[error("malformed channel maps: {0}")]
    Malformed(String),
    #[error("channel is outside the injective class:\n{0}")]
    Invalid(ValidationReport),
    #[error("link rate must be finite and nonnegative, got {0}")]
    BadLinkRate(f64),
    #[error("the relay substitution needs R0 = log2 |X3| = {expected}, got {found}")]
    LinkRateMismatch { expected: f64, found: f64 },
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

pub type Result<T> = std::result::Result<T, DetError>;

/// The deterministic maps and link rate describing one channel.
///
/// `y4[x1][t2]`, `y5[x2][t1]` and `y3[x1][x2]`. Alphabets of the derived
/// signals are `0..=max` of each map.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct InjectiveDetSpec {
    pub x1_size: usize,
    pub x2_size: usize,
    pub x3_size: usize,
    pub t1: Vec<usize>,
    pub t2: Vec<usize>,
    pub y4: Vec<Vec<usize>>,
    pub y5: Vec<Vec<usize>>,
    pub y3: Vec<Vec<usize>>,
    pub r0: f64,
}

fn range_size(values: impl IntoIterator<Item = usize>) -> usize {
    values.into_iter().max().map_or(1, |m| m + 1)
}

impl InjectiveDetSpec {
    /// Check that every map is total over its declared domain.
    pub fn check_shape(&self) -> Result<()> {
        let bad = |m: String| Err(DetError::Malformed(m));
        if self.x1_size == 0 || self.x2_size == 0 || self.x3_size == 0 {
            return bad("alphabet sizes must be positive".into());
        }
        if !(self.r0.is_finite() && self.r0 >= 0.0) {
            return Err(DetError::BadLinkRate(self.r0));
        }
        if self.t1.len() != self.x1_size {
            return bad(format!("t1 has {} entries, |X1| = {}", self.t1.len(), self.x1_size));
        }
        if self.t2.len() != self.x2_size {
            return bad(format!("t2 has {} entries, |X2| = {}", self.t2.len(), self.x2_size));
        }
        let check = |name: &str, m: &[Vec<usize>], rows: usize, cols: usize| {
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(DetError::Malformed(format!("{name} must be a {rows}x{cols} table")));
            }
            Ok(())
        };
        check("y4", &self.y4, self.x1_size, self.t2_size())?;
        check("y5", &self.y5, self.x2_size, self.t1_size())?;
        check("y3", &self.y3, self.x1_size, self.x2_size)?;
        Ok(())
    }

    pub fn t1_size(&self) -> usize {
        range_size(self.t1.iter().copied())
    }

    pub fn t2_size(&self) -> usize {
        range_size(self.t2.iter().copied())
    }

    pub fn y4_size(&self) -> usize {
        range_size(self.y4.iter().flatten().copied())
    }

    pub fn y5_size(&self) -> usize {
        range_size(self.y5.iter().flatten().copied())
    }

    pub fn y3_size(&self) -> usize {
        range_size(self.y3.iter().flatten().copied())
    }
}

/// One way a spec fails to belong to the injective class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// `y4(x1, t2) == y4(x1, t2_other)` with `t2 != t2_other`.
    Y4NotInjective {
        x1: usize,
        t2: usize,
        t2_other: usize,
    },
    Y5NotInjective {
        x2: usize,
        t1: usize,
        t1_other: usize,
    },
    /// `t2(x2) == t2(x2_other)` but `y3` differs, so no `f1(X1, Y4')` exists.
    F1Missing {
        x1: usize,
        x2: usize,
        x2_other: usize,
    },
    F2Missing {
        x2: usize,
        x1: usize,
        x1_other: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Y4NotInjective { x1, t2, t2_other } => {
                write!(f, "y4 not injective: x1={x1}, t2={t2}, t2'={t2_other}")
            }
            Violation::Y5NotInjective { x2, t1, t1_other } => {
                write!(f, "y5 not injective: x2={x2}, t1={t1}, t1'={t1_other}")
            }
            Violation::F1Missing { x1, x2, x2_other } => {
                write!(f, "y3 not a function of (x1, y4'): x1={x1}, x2={x2}, x2'={x2_other}")
            }
            Violation::F2Missing { x2, x1, x1_other } => {
                write!(f, "y3 not a function of (x2, y5'): x2={x2}, x1={x1}, x1'={x1_other}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Exhaustive check of injectivity and of the relay-output factorization.
///
/// Assumes [`InjectiveDetSpec::check_shape`] passed.
pub fn validate(spec: &InjectiveDetSpec) -> ValidationReport {
    let mut violations = Vec::new();
    for x1 in 0..spec.x1_size {
        for t2 in 0..spec.t2_size() {
            for t2_other in t2 + 1..spec.t2_size() {
                if spec.y4[x1][t2] == spec.y4[x1][t2_other] {
                    violations.push(Violation::Y4NotInjective { x1, t2, t2_other });
                }
            }
        }
    }
    for x2 in 0..spec.x2_size {
        for t1 in 0..spec.t1_size() {
            for t1_other in t1 + 1..spec.t1_size() {
                if spec.y5[x2][t1] == spec.y5[x2][t1_other] {
                    violations.push(Violation::Y5NotInjective { x2, t1, t1_other });
                }
            }
        }
    }
    for x1 in 0..spec.x1_size {
        for x2 in 0..spec.x2_size {
            for x2_other in x2 + 1..spec.x2_size {
                if spec.t2[x2] == spec.t2[x2_other] && spec.y3[x1][x2] != spec.y3[x1][x2_other] {
                    violations.push(Violation::F1Missing { x1, x2, x2_other });
                }
            }
        }
    }
    for x2 in 0..spec.x2_size {
        for x1 in 0..spec.x1_size {
            for x1_other in x1 + 1..spec.x1_size {
                if spec.t1[x1] == spec.t1[x1_other] && spec.y3[x1][x2] != spec.y3[x1_other][x2] {
                    violations.push(Violation::F2Missing { x2, x1, x1_other });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Input distribution `p(q) p(x1|q) p(x2|q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetInput {
    q: ConditionalFactor,
    x1: ConditionalFactor,
    x2: ConditionalFactor,
}

impl DetInput {
    /// `x1_given_q[q][x1]`, `x2_given_q[q][x2]`.
    pub fn new(q: Vec<f64>, x1_given_q: Vec<Vec<f64>>, x2_given_q: Vec<Vec<f64>>) -> Result<Self> {
        let nq = q.len();
        if x1_given_q.len() != nq || x2_given_q.len() != nq {
            return Err(DetError::Malformed(
                "conditional input tables need one row per value of Q".into(),
            ));
        }
        let width = |rows: &[Vec<f64>], what: &str| -> Result<usize> {
            let w = rows.first().map_or(0, Vec::len);
            if w == 0 || rows.iter().any(|r| r.len() != w) {
                return Err(DetError::Malformed(format!("{what} rows must share a nonzero length")));
            }
            Ok(w)
        };
        let n1 = width(&x1_given_q, "p(x1|q)")?;
        let n2 = width(&x2_given_q, "p(x2|q)")?;
        let qv = Variable::new("Q", nq);
        Ok(Self {
            q: ConditionalFactor::marginal(vec![qv.clone()], q)?,
            x1: ConditionalFactor::new(vec![Variable::new("X1", n1)], vec![qv.clone()], x1_given_q.concat())?,
            x2: ConditionalFactor::new(vec![Variable::new("X2", n2)], vec![qv], x2_given_q.concat())?,
        })
    }

    /// Single-letter `Q` with the given input marginals.
    pub fn product(p_x1: Vec<f64>, p_x2: Vec<f64>) -> Result<Self> {
        Self::new(vec![1.0], vec![p_x1], vec![p_x2])
    }

    pub fn q_size(&self) -> usize {
        self.q.outputs()[0].size
    }

    pub fn x1_size(&self) -> usize {
        self.x1.outputs()[0].size
    }

    pub fn x2_size(&self) -> usize {
        self.x2.outputs()[0].size
    }

    fn p_q(&self) -> &[f64] {
        self.q.table()
    }

    fn row(f: &ConditionalFactor, q: usize) -> &[f64] {
        let w = f.outputs()[0].size;
        &f.table()[q * w..(q + 1) * w]
    }
}

fn checked(spec: &InjectiveDetSpec, input: &DetInput) -> Result<()> {
    spec.check_shape()?;
    if input.x1_size() != spec.x1_size || input.x2_size() != spec.x2_size {
        return Err(DetError::Malformed(format!(
            "input alphabets ({}, {}) do not match the channel ({}, {})",
            input.x1_size(),
            input.x2_size(),
            spec.x1_size,
            spec.x2_size
        )));
    }
    let report = validate(spec);
    if !report.passed() {
        return Err(DetError::Invalid(report));
    }
    Ok(())
}

/// Joint pmf over `(Q, X1, X2, T1, T2, Y4p, Y5p, Y3)`.
pub fn det_joint(spec: &InjectiveDetSpec, input: &DetInput) -> Result<NamedJoint> {
    checked(spec, input)?;
    let x1 = Variable::new("X1", spec.x1_size);
    let x2 = Variable::new("X2", spec.x2_size);
    let t1 = Variable::new("T1", spec.t1_size());
    let t2 = Variable::new("T2", spec.t2_size());
    let factors = vec![
        input.q.clone(),
        input.x1.clone(),
        input.x2.clone(),
        ConditionalFactor::deterministic(t1.clone(), vec![x1.clone()], |g| spec.t1[g[0]])?,
        ConditionalFactor::deterministic(t2.clone(), vec![x2.clone()], |g| spec.t2[g[0]])?,
        ConditionalFactor::deterministic(Variable::new("Y4p", spec.y4_size()), vec![x1.clone(), t2], |g| {
            spec.y4[g[0]][g[1]]
        })?,
        ConditionalFactor::deterministic(Variable::new("Y5p", spec.y5_size()), vec![x2.clone(), t1], |g| {
            spec.y5[g[0]][g[1]]
        })?,
        ConditionalFactor::deterministic(Variable::new("Y3", spec.y3_size()), vec![x1, x2], |g| {
            spec.y3[g[0]][g[1]]
        })?,
    ];
    Ok(build_joint(&factors)?)
}

/// The seven capacity-region bounds for one input distribution.
pub fn theorem2_region(spec: &InjectiveDetSpec, input: &DetInput) -> Result<Vec<RateInequality>> {
    let j = det_joint(spec, input)?;
    let r0 = spec.r0;
    let h = |a: &[&str], c: &[&str]| -> Result<f64> {
        let mut c = c.to_vec();
        c.push("Q");
        Ok(j.cond_entropy(a, &c)?)
    };
    // min{H(Y3, Y | C, Q), H(Y | C, Q) + R0}
    let m = |y: &str, c: &[&str]| -> Result<f64> { Ok(h(&["Y3", y], c)?.min(h(&[y], c)? + r0)) };

    let r1 = {
        let hy = h(&["Y4p"], &["T2"])?;
        (hy + h(&["Y3"], &["Y4p", "T2"])?).min(hy + r0)
    };
    let r2 = {
        let hy = h(&["Y5p"], &["T1"])?;
        (hy + h(&["Y3"], &["Y5p", "T1"])?).min(hy + r0)
    };
    let four_private = m("Y4p", &["T1", "T2"])?;
    let five_private = m("Y5p", &["T1", "T2"])?;
    let four_all = m("Y4p", &[])?;
    let five_all = m("Y5p", &[])?;
    let four_t1 = m("Y4p", &["T1"])?;
    let five_t2 = m("Y5p", &["T2"])?;

    Ok(vec![
        RateInequality::new(1, 0, r1, "R1"),
        RateInequality::new(0, 1, r2, "R2"),
        RateInequality::new(1, 1, four_private + five_all, "R1+R2 (private 1, all at 5)"),
        RateInequality::new(1, 1, five_private + four_all, "R1+R2 (private 2, all at 4)"),
        RateInequality::new(1, 1, four_t1 + five_t2, "R1+R2 (cross common)"),
        RateInequality::new(2, 1, four_private + four_all + five_t2, "2R1+R2"),
        RateInequality::new(1, 2, five_private + five_all + four_t1, "R1+2R2"),
    ])
}

/// The general-channel form of this class: `Y4 = (Y4', X3)`, `Y5 = (Y5', X3)`.
pub fn as_imrc(spec: &InjectiveDetSpec, input: &DetInput) -> Result<(ImrcChannel, ImrcInputSpec)> {
    checked(spec, input)?;
    let nx3 = spec.x3_size;
    let alph = ChannelAlphabets {
        x1: spec.x1_size,
        x2: spec.x2_size,
        x3: vec![nx3],
        y3: vec![spec.y3_size()],
        y4: spec.y4_size() * nx3,
        y5: spec.y5_size() * nx3,
    };
    let channel = ImrcChannel::deterministic(&alph, |x1, x2, x3| {
        let y4p = spec.y4[x1][spec.t2[x2]];
        let y5p = spec.y5[x2][spec.t1[x1]];
        (vec![spec.y3[x1][x2]], y4p * nx3 + x3[0], y5p * nx3 + x3[0])
    })?;

    let nq = input.q_size();
    let common = |t: &[usize], f: &ConditionalFactor, nx: usize, nt: usize| {
        let mut table = Vec::with_capacity(nq * nt * nx);
        for q in 0..nq {
            let row = DetInput::row(f, q);
            for u in 0..nt {
                table.extend((0..nx).map(|x| if t[x] == u { row[x] } else { 0.0 }));
            }
        }
        table
    };
    let q = inputs::time_sharing(input.p_q().to_vec())?;
    let source1 = inputs::source(
        1,
        nq,
        spec.t1_size(),
        spec.x1_size,
        common(&spec.t1, &input.x1, spec.x1_size, spec.t1_size()),
    )?;
    let source2 = inputs::source(
        2,
        nq,
        spec.t2_size(),
        spec.x2_size,
        common(&spec.t2, &input.x2, spec.x2_size, spec.t2_size()),
    )?;
    let relay = RelayInput {
        x3: inputs::relay_input(1, nq, nx3, vec![1.0 / nx3 as f64; nq * nx3])?,
        compress: inputs::identity_compression(1, spec.y3_size(), nx3, nq)?,
    };
    let input = ImrcInputSpec::new(q, source1, source2, vec![relay])?;
    Ok((channel, input))
}

/// Largest absolute difference between the capacity bounds and the
/// single-relay achievable bounds under `Yh3 = Y3, U1 = T1, U2 = T2`.
pub fn specialization_check(spec: &InjectiveDetSpec, input: &DetInput) -> Result<f64> {
    spec.check_shape()?;
    let expected = (spec.x3_size as f64).log2();
    if (spec.r0 - expected).abs() > 1e-12 {
        return Err(DetError::LinkRateMismatch {
            expected,
            found: spec.r0,
        });
    }
    let capacity = theorem2_region(spec, input)?;
    let (channel, imrc_input) = as_imrc(spec, input)?;
    let achievable = corollary1_region(&channel, &imrc_input)?;
    Ok(capacity
        .iter()
        .zip(&achievable)
        .map(|(c, a)| (c.rhs - a.rhs).abs())
        .fold(0.0, f64::max))
}

/// Binary modulo-2 example: `T_i = X_i`, `Y4' = X1 xor X2`, `Y5' = X1 xor X2`, `Y3 = X1 xor X2`.
pub fn modulo2_example(r0: f64) -> InjectiveDetSpec {
    let xor = vec![vec![0, 1], vec![1, 0]];
    InjectiveDetSpec {
        x1_size: 2,
        x2_size: 2,
        x3_size: 2,
        t1: vec![0, 1],
        t2: vec![0, 1],
        y4: xor.clone(),
        y5: xor.clone(),
        y3: xor,
        r0,
    }
}
