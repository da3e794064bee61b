//! Achievable region for the discrete memoryless interference multi-relay
//! channel, combining Han-Kobayashi rate splitting at the sources with
//! noisy network coding at the relays.
//!
//! Variables are named [`names::X1`], [`names::x3`]`(k)` and so on, with relay
//! indices starting at 1. Every information term is additionally conditioned
//! on the time-sharing variable `Q`.

use thiserror::Error;

use crate::geom::RateInequality;
use crate::prob::{build_joint, ConditionalFactor, NamedJoint, ProbError, Variable};

/// Largest relay count accepted by the subset enumeration.
pub const MAX_RELAYS: usize = 20;

pub mod names {
    pub const Q: &str = "Q";
    pub const U1: &str = "U1";
    pub const X1: &str = "X1";
    pub const U2: &str = "U2";
    pub const X2: &str = "X2";
    pub const Y4: &str = "Y4";
    pub const Y5: &str = "Y5";

    pub fn x3(k: usize) -> String {
        format!("X3_{k}")
    }

    pub fn y3(k: usize) -> String {
        format!("Y3_{k}")
    }

    /// Relay `k`'s compressed observation.
    pub fn yhat3(k: usize) -> String {
        format!("Yh3_{k}")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("channel law: {0}")]
    ChannelScope(String),
    #[error("input distribution: {0}")]
    InputScope(String),
    #[error("`{name}` has {channel} letters in the channel but {input} in the input")]
    AlphabetMismatch { name: String, channel: usize, input: usize },
    #[error("{0} relays exceeds the limit of {MAX_RELAYS}")]
    TooManyRelays(usize),
    #[error("the single-relay form needs exactly one relay, got {0}")]
    NotSingleRelay(usize),
}

pub type Result<T> = std::result::Result<T, RegionError>;

fn same_names(found: &[Variable], expected: &[String]) -> bool {
    found.len() == expected.len() && expected.iter().all(|e| found.iter().any(|v| &v.name == e))
}

fn list(names: &[String]) -> String {
    names.join(", ")
}

/// Channel law `p(y3_1..y3_N, y4, y5 | x1, x2, x3_1..x3_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImrcChannel {
    relays: usize,
    law: ConditionalFactor,
}

/// Alphabet sizes of every channel input and output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelAlphabets {
    pub x1: usize,
    pub x2: usize,
    pub x3: Vec<usize>,
    pub y3: Vec<usize>,
    pub y4: usize,
    pub y5: usize,
}

impl ChannelAlphabets {
    /// One relay, every alphabet of the given size.
    pub fn uniform(size: usize) -> Self {
        Self {
            x1: size,
            x2: size,
            x3: vec![size],
            y3: vec![size],
            y4: size,
            y5: size,
        }
    }

    fn inputs(&self) -> Vec<Variable> {
        let mut v = vec![Variable::new(names::X1, self.x1), Variable::new(names::X2, self.x2)];
        v.extend(
            self.x3
                .iter()
                .enumerate()
                .map(|(k, &s)| Variable::new(names::x3(k + 1), s)),
        );
        v
    }

    fn outputs(&self) -> Vec<Variable> {
        let mut v: Vec<Variable> = self
            .y3
            .iter()
            .enumerate()
            .map(|(k, &s)| Variable::new(names::y3(k + 1), s))
            .collect();
        v.push(Variable::new(names::Y4, self.y4));
        v.push(Variable::new(names::Y5, self.y5));
        v
    }
}

/// Channel outputs for one input assignment: `(y3 per relay, y4, y5)`.
pub type DeterministicOutputs = (Vec<usize>, usize, usize);

impl ImrcChannel {
    /// Wrap a law whose given/output variables follow the naming in [`names`].
    pub fn new(law: ConditionalFactor) -> Result<Self> {
        let relays = law.given().iter().filter(|v| v.name.starts_with("X3_")).count();
        if relays == 0 {
            return Err(RegionError::ChannelScope("no relay inputs X3_k".into()));
        }
        if relays > MAX_RELAYS {
            return Err(RegionError::TooManyRelays(relays));
        }
        let mut given = vec![names::X1.to_string(), names::X2.to_string()];
        given.extend((1..=relays).map(names::x3));
        if !same_names(law.given(), &given) {
            return Err(RegionError::ChannelScope(format!(
                "must condition on exactly {{{}}}",
                list(&given)
            )));
        }
        let mut outputs: Vec<String> = (1..=relays).map(names::y3).collect();
        outputs.push(names::Y4.into());
        outputs.push(names::Y5.into());
        if !same_names(law.outputs(), &outputs) {
            return Err(RegionError::ChannelScope(format!(
                "must produce exactly {{{}}}",
                list(&outputs)
            )));
        }
        Ok(Self { relays, law })
    }

    /// Tabulate a law from `p(x1, x2, x3s, y3s, y4, y5)`.
    pub fn from_fn(
        alphabets: &ChannelAlphabets,
        p: impl Fn(usize, usize, &[usize], &[usize], usize, usize) -> f64,
    ) -> Result<Self> {
        let n = alphabets.x3.len();
        if alphabets.y3.len() != n {
            return Err(RegionError::ChannelScope(
                "X3 and Y3 alphabet lists differ in length".into(),
            ));
        }
        let law = ConditionalFactor::from_fn(alphabets.outputs(), alphabets.inputs(), |g, o| {
            p(g[0], g[1], &g[2..], &o[..n], o[n], o[n + 1])
        })?;
        Self::new(law)
    }

    /// A noiseless channel given by a map from inputs to outputs.
    pub fn deterministic(
        alphabets: &ChannelAlphabets,
        f: impl Fn(usize, usize, &[usize]) -> DeterministicOutputs,
    ) -> Result<Self> {
        Self::from_fn(alphabets, |x1, x2, x3, y3, y4, y5| {
            let (e3, e4, e5) = f(x1, x2, x3);
            if e3.as_slice() == y3 && e4 == y4 && e5 == y5 {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn law(&self) -> &ConditionalFactor {
        &self.law
    }

    fn size_of(&self, name: &str) -> Option<usize> {
        self.law
            .given()
            .iter()
            .chain(self.law.outputs())
            .find(|v| v.name == name)
            .map(|v| v.size)
    }
}

/// Per-relay input: `p(x3_k | q)` and the compression test channel
/// `p(yhat3_k | y3_k, x3_k, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayInput {
    pub x3: ConditionalFactor,
    pub compress: ConditionalFactor,
}

/// The input factorization
/// `p(q) p(u1,x1|q) p(u2,x2|q) prod_k p(x3_k|q) p(yhat3_k|y3_k,x3_k,q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImrcInputSpec {
    q: ConditionalFactor,
    source1: ConditionalFactor,
    source2: ConditionalFactor,
    relays: Vec<RelayInput>,
}

fn check_scope(what: &str, factor: &ConditionalFactor, outputs: &[String], given: &[String]) -> Result<()> {
    if !same_names(factor.outputs(), outputs) || !same_names(factor.given(), given) {
        let found_out: Vec<String> = factor.outputs().iter().map(|v| v.name.clone()).collect();
        let found_given: Vec<String> = factor.given().iter().map(|v| v.name.clone()).collect();
        return Err(RegionError::InputScope(format!(
            "{what} must be p({} | {}), found p({} | {})",
            list(outputs),
            list(given),
            list(&found_out),
            list(&found_given)
        )));
    }
    Ok(())
}

fn s(names: &[&str]) -> Vec<String> {
    names.iter().map(|n| n.to_string()).collect()
}

impl ImrcInputSpec {
    pub fn new(
        q: ConditionalFactor,
        source1: ConditionalFactor,
        source2: ConditionalFactor,
        relays: Vec<RelayInput>,
    ) -> Result<Self> {
        check_scope("p(q)", &q, &s(&[names::Q]), &[])?;
        check_scope("source 1", &source1, &s(&[names::U1, names::X1]), &s(&[names::Q]))?;
        check_scope("source 2", &source2, &s(&[names::U2, names::X2]), &s(&[names::Q]))?;
        if relays.is_empty() {
            return Err(RegionError::InputScope("at least one relay is required".into()));
        }
        if relays.len() > MAX_RELAYS {
            return Err(RegionError::TooManyRelays(relays.len()));
        }
        for (i, r) in relays.iter().enumerate() {
            let k = i + 1;
            check_scope(&format!("relay {k} input"), &r.x3, &[names::x3(k)], &s(&[names::Q]))?;
            check_scope(
                &format!("relay {k} compression"),
                &r.compress,
                &[names::yhat3(k)],
                &[names::y3(k), names::x3(k), names::Q.to_string()],
            )?;
        }
        Ok(Self {
            q,
            source1,
            source2,
            relays,
        })
    }

    pub fn relays(&self) -> usize {
        self.relays.len()
    }

    fn declared(&self) -> impl Iterator<Item = &Variable> {
        [&self.q, &self.source1, &self.source2]
            .into_iter()
            .chain(self.relays.iter().flat_map(|r| [&r.x3, &r.compress]))
            .flat_map(|f| f.outputs().iter().chain(f.given()))
    }
}

/// The joint pmf of every variable in the coding scheme.
///
/// Factor order is sources, relay inputs, channel, then compression, so the
/// variables appear as `Q, U1, X1, U2, X2, X3_*, Y3_*, Y4, Y5, Yh3_*`.
pub fn full_joint(channel: &ImrcChannel, input: &ImrcInputSpec) -> Result<NamedJoint> {
    if channel.relays() != input.relays() {
        return Err(RegionError::InputScope(format!(
            "channel has {} relays but the input describes {}",
            channel.relays(),
            input.relays()
        )));
    }
    for v in input.declared() {
        if let Some(size) = channel.size_of(&v.name) {
            if size != v.size {
                return Err(RegionError::AlphabetMismatch {
                    name: v.name.clone(),
                    channel: size,
                    input: v.size,
                });
            }
        }
    }
    let mut factors = vec![input.q.clone(), input.source1.clone(), input.source2.clone()];
    factors.extend(input.relays.iter().map(|r| r.x3.clone()));
    factors.push(channel.law.clone());
    factors.extend(input.relays.iter().map(|r| r.compress.clone()));
    Ok(build_joint(&factors)?)
}

/// Which destination decodes: node 4 wants message 1, node 5 message 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Destination {
    Node4,
    Node5,
}

impl Destination {
    fn output(self) -> &'static str {
        match self {
            Destination::Node4 => names::Y4,
            Destination::Node5 => names::Y5,
        }
    }

    /// Source-side conditioning of the compression penalty.
    fn penalty_base(self) -> [&'static str; 2] {
        match self {
            Destination::Node4 => [names::X1, names::U2],
            Destination::Node5 => [names::X2, names::U1],
        }
    }
}

/// Noisy-network-coding term minimized over relay subsets `S`:
///
/// `min_S I(W, X3(S); Yh3(S^c), Y_d | V, X3(S^c)) - I(Yh3(S); Y3(S) | base_d, X3^N, Yh3(S^c), Y_d)`
///
/// where `base_d` is `{X1, U2}` for node 4 and `{X2, U1}` for node 5.
pub fn hybrid_term(joint: &NamedJoint, w: &[&str], dest: Destination, v: &[&str], relays: usize) -> Result<f64> {
    if relays > MAX_RELAYS {
        return Err(RegionError::TooManyRelays(relays));
    }
    let time_sharing: Vec<String> = if joint.has(names::Q) && !w.contains(&names::Q) && !v.contains(&names::Q) {
        vec![names::Q.to_string()]
    } else {
        Vec::new()
    };
    let y = dest.output().to_string();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << relays) {
        let in_s = |k: usize| mask >> (k - 1) & 1 == 1;
        let (ks, kc): (Vec<usize>, Vec<usize>) = (1..=relays).partition(|&k| in_s(k));

        let mut a: Vec<String> = w.iter().map(|n| n.to_string()).collect();
        a.extend(ks.iter().map(|&k| names::x3(k)));
        let mut b: Vec<String> = kc.iter().map(|&k| names::yhat3(k)).collect();
        b.push(y.clone());
        let mut c: Vec<String> = v.iter().map(|n| n.to_string()).collect();
        c.extend(kc.iter().map(|&k| names::x3(k)));
        c.extend(time_sharing.iter().cloned());
        let gain = joint.mutual_info(&a, &b, &c)?;

        let penalty = if ks.is_empty() {
            0.0
        } else {
            let a: Vec<String> = ks.iter().map(|&k| names::yhat3(k)).collect();
            let b: Vec<String> = ks.iter().map(|&k| names::y3(k)).collect();
            let mut c: Vec<String> = dest.penalty_base().iter().map(|n| n.to_string()).collect();
            c.extend((1..=relays).map(names::x3));
            c.extend(kc.iter().map(|&k| names::yhat3(k)));
            c.push(y.clone());
            c.extend(time_sharing.iter().cloned());
            joint.mutual_info(&a, &b, &c)?
        };
        best = best.min(gain - penalty);
    }
    Ok(best)
}

/// The seven achievable-rate bounds for a channel with any number of relays.
pub fn theorem1_region(channel: &ImrcChannel, input: &ImrcInputSpec) -> Result<Vec<RateInequality>> {
    use names::{U1, U2, X1, X2};
    use Destination::{Node4, Node5};

    let joint = full_joint(channel, input)?;
    let n = channel.relays();
    let t = |w: &[&str], d, v: &[&str]| hybrid_term(&joint, w, d, v, n);

    let own1 = t(&[X1], Node4, &[U2])?;
    let own2 = t(&[X2], Node5, &[U1])?;
    let priv1 = t(&[X1], Node4, &[U1, U2])?;
    let priv2 = t(&[X2], Node5, &[U1, U2])?;
    let all1 = t(&[X1, U2], Node4, &[])?;
    let all2 = t(&[X2, U1], Node5, &[])?;
    let cross1 = t(&[X1, U2], Node4, &[U1])?;
    let cross2 = t(&[X2, U1], Node5, &[U2])?;

    Ok(vec![
        RateInequality::new(1, 0, own1, "R1"),
        RateInequality::new(0, 1, own2, "R2"),
        RateInequality::new(1, 1, priv1 + all2, "R1+R2 (private 1, all at 5)"),
        RateInequality::new(1, 1, priv2 + all1, "R1+R2 (private 2, all at 4)"),
        RateInequality::new(1, 1, cross1 + cross2, "R1+R2 (cross common)"),
        RateInequality::new(2, 1, priv1 + all1 + cross2, "2R1+R2"),
        RateInequality::new(1, 2, priv2 + all2 + cross1, "R1+2R2"),
    ])
}

/// The single-relay region written out term by term, each bound a minimum
/// of the direct (relay decoded) and compressed-forwarding expressions.
pub fn corollary1_region(channel: &ImrcChannel, input: &ImrcInputSpec) -> Result<Vec<RateInequality>> {
    if channel.relays() != 1 {
        return Err(RegionError::NotSingleRelay(channel.relays()));
    }
    let j = full_joint(channel, input)?;
    let (x3, y3, yh) = ("X3_1", "Y3_1", "Yh3_1");
    let q = "Q";
    let mi = |a: &[&str], b: &[&str], c: &[&str]| j.mutual_info(a, b, c);

    // penalty at node 4 / node 5
    let pen4 = mi(&[yh], &[y3], &["X1", "U2", x3, "Y4", q])?;
    let pen5 = mi(&[yh], &[y3], &["X2", "U1", x3, "Y5", q])?;

    let r1 = mi(&["X1"], &[yh, "Y4"], &["U2", x3, q])?.min(mi(&["X1", x3], &["Y4"], &["U2", q])? - pen4);
    let r2 = mi(&["X2"], &[yh, "Y5"], &["U1", x3, q])?.min(mi(&["X2", x3], &["Y5"], &["U1", q])? - pen5);

    let m_x1_u1u2 =
        mi(&["X1"], &[yh, "Y4"], &["U1", "U2", x3, q])?.min(mi(&["X1", x3], &["Y4"], &["U1", "U2", q])? - pen4);
    let m_x2u1 = mi(&["X2", "U1"], &[yh, "Y5"], &[x3, q])?.min(mi(&["X2", "U1", x3], &["Y5"], &[q])? - pen5);
    let m_x2_u1u2 =
        mi(&["X2"], &[yh, "Y5"], &["U1", "U2", x3, q])?.min(mi(&["X2", x3], &["Y5"], &["U1", "U2", q])? - pen5);
    let m_x1u2 = mi(&["X1", "U2"], &[yh, "Y4"], &[x3, q])?.min(mi(&["X1", "U2", x3], &["Y4"], &[q])? - pen4);
    let m_x1u2_u1 =
        mi(&["X1", "U2"], &[yh, "Y4"], &["U1", x3, q])?.min(mi(&["X1", "U2", x3], &["Y4"], &["U1", q])? - pen4);
    let m_x2u1_u2 =
        mi(&["X2", "U1"], &[yh, "Y5"], &["U2", x3, q])?.min(mi(&["X2", "U1", x3], &["Y5"], &["U2", q])? - pen5);

    Ok(vec![
        RateInequality::new(1, 0, r1, "R1"),
        RateInequality::new(0, 1, r2, "R2"),
        RateInequality::new(1, 1, m_x1_u1u2 + m_x2u1, "R1+R2 (private 1, all at 5)"),
        RateInequality::new(1, 1, m_x2_u1u2 + m_x1u2, "R1+R2 (private 2, all at 4)"),
        RateInequality::new(1, 1, m_x1u2_u1 + m_x2u1_u2, "R1+R2 (cross common)"),
        RateInequality::new(2, 1, m_x1_u1u2 + m_x1u2 + m_x2u1_u2, "2R1+R2"),
        RateInequality::new(1, 2, m_x2_u1u2 + m_x2u1 + m_x1u2_u1, "R1+2R2"),
    ])
}

/// Convenience constructors for input factors.
pub mod inputs {
    use super::*;

    /// `p(q)` over `sizes.len()` letters.
    pub fn time_sharing(pq: Vec<f64>) -> Result<ConditionalFactor> {
        let n = pq.len();
        Ok(ConditionalFactor::marginal(vec![Variable::new(names::Q, n)], pq)?)
    }

    /// `p(u, x | q)` for source 1 or 2, table row-major over `(q, u, x)`.
    pub fn source(which: u8, q: usize, u: usize, x: usize, table: Vec<f64>) -> Result<ConditionalFactor> {
        let (un, xn) = match which {
            1 => (names::U1, names::X1),
            2 => (names::U2, names::X2),
            _ => return Err(RegionError::InputScope(format!("no source {which}"))),
        };
        Ok(ConditionalFactor::new(
            vec![Variable::new(un, u), Variable::new(xn, x)],
            vec![Variable::new(names::Q, q)],
            table,
        )?)
    }

    /// `p(x3_k | q)`, table row-major over `(q, x3)`.
    pub fn relay_input(k: usize, q: usize, x3: usize, table: Vec<f64>) -> Result<ConditionalFactor> {
        Ok(ConditionalFactor::new(
            vec![Variable::new(names::x3(k), x3)],
            vec![Variable::new(names::Q, q)],
            table,
        )?)
    }

    /// `p(yhat3_k | y3_k, x3_k, q)` from a closure.
    pub fn compression(
        k: usize,
        sizes: (usize, usize, usize, usize),
        p: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<ConditionalFactor> {
        let (y3, x3, q, yh) = sizes;
        Ok(ConditionalFactor::from_fn(
            vec![Variable::new(names::yhat3(k), yh)],
            vec![
                Variable::new(names::y3(k), y3),
                Variable::new(names::x3(k), x3),
                Variable::new(names::Q, q),
            ],
            |g, o| p(g[0], g[1], g[2], o[0]),
        )?)
    }

    /// `Yh3_k = Y3_k` exactly.
    pub fn identity_compression(k: usize, y3: usize, x3: usize, q: usize) -> Result<ConditionalFactor> {
        compression(k, (y3, x3, q, y3), |y, _, _, yh| if y == yh { 1.0 } else { 0.0 })
    }

    /// `Yh3_k` a constant.
    pub fn constant_compression(k: usize, y3: usize, x3: usize, q: usize) -> Result<ConditionalFactor> {
        compression(k, (y3, x3, q, 1), |_, _, _, _| 1.0)
    }
}
