//! Exact discrete probability over named finite-alphabet variables.
//!
//! A [`NamedJoint`] is a dense row-major tensor (last variable varies
//! fastest). Information quantities are reported in bits, with the
//! convention `0 log 0 = 0`.

use std::collections::HashSet;

use thiserror::Error;

/// Upper bound on the number of cells in any dense table.
pub const MAX_JOINT_ENTRIES: usize = 100_000_000;

/// Tolerance applied when validating that a distribution sums to one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty alphabet")]
    EmptyAlphabet(String),
    #[error("table has {actual} entries but the declared shape needs {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("entry {index} is {value}; probabilities must be finite and nonnegative")]
    InvalidEntry { index: usize, value: f64 },
    #[error("slice {slice} sums to {sum}, expected 1 within {NORMALIZATION_TOL:e}")]
    NotNormalized { slice: usize, sum: f64 },
    #[error("`{0}` is conditioned on before any factor produces it")]
    DanglingGiven(String),
    #[error("`{0}` is produced by more than one factor")]
    DuplicateOutput(String),
    #[error("`{name}` has alphabet size {found} here but {expected} where it was introduced")]
    AlphabetMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` appears in more than one argument set")]
    Overlap(String),
    #[error("dense table would have {0} entries (limit {MAX_JOINT_ENTRIES})")]
    TooLarge(usize),
}

pub type Result<T> = std::result::Result<T, ProbError>;

/// A named random variable with a finite alphabet `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub size: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Self {
            name: name.into(),
            size,
        }
    }
}

fn checked_volume(vars: &[Variable]) -> Result<usize> {
    let mut volume = 1usize;
    for v in vars {
        if v.size == 0 {
            return Err(ProbError::EmptyAlphabet(v.name.clone()));
        }
        volume = volume
            .checked_mul(v.size)
            .filter(|&n| n <= MAX_JOINT_ENTRIES)
            .ok_or(ProbError::TooLarge(usize::MAX))?;
    }
    Ok(volume)
}

fn check_unique<'a>(vars: impl IntoIterator<Item = &'a Variable>) -> Result<()> {
    let mut seen = HashSet::new();
    for v in vars {
        if !seen.insert(v.name.as_str()) {
            return Err(ProbError::DuplicateVariable(v.name.clone()));
        }
    }
    Ok(())
}

fn row_major_strides(vars: &[Variable]) -> Vec<usize> {
    let mut strides = vec![1; vars.len()];
    for i in (0..vars.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * vars[i + 1].size;
    }
    strides
}

/// Validate and renormalize consecutive slices of length `width`.
fn normalize_slices(table: &mut [f64], width: usize) -> Result<()> {
    for (index, &value) in table.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(ProbError::InvalidEntry { index, value });
        }
    }
    for (slice, chunk) in table.chunks_mut(width).enumerate() {
        let sum: f64 = chunk.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ProbError::NotNormalized { slice, sum });
        }
        chunk.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(())
}

/// A conditional pmf `p(outputs | given)`.
///
/// The table is row-major over `given` followed by `outputs`, so each
/// contiguous block of `outputs` cells is one conditional slice.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalFactor {
    outputs: Vec<Variable>,
    given: Vec<Variable>,
    table: Vec<f64>,
}

impl ConditionalFactor {
    pub fn new(outputs: Vec<Variable>, given: Vec<Variable>, mut table: Vec<f64>) -> Result<Self> {
        check_unique(outputs.iter().chain(given.iter()))?;
        let width = checked_volume(&outputs)?;
        let rows = checked_volume(&given)?;
        let expected = rows
            .checked_mul(width)
            .filter(|&n| n <= MAX_JOINT_ENTRIES)
            .ok_or(ProbError::TooLarge(usize::MAX))?;
        if table.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                actual: table.len(),
            });
        }
        normalize_slices(&mut table, width)?;
        Ok(Self { outputs, given, table })
    }

    /// An unconditional pmf over `outputs`.
    pub fn marginal(outputs: Vec<Variable>, table: Vec<f64>) -> Result<Self> {
        Self::new(outputs, Vec::new(), table)
    }

    /// A deterministic map `output = f(given assignment)`.
    pub fn deterministic(output: Variable, given: Vec<Variable>, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        Self::from_fn(vec![output], given, |g, o| if f(g) == o[0] { 1.0 } else { 0.0 })
    }

    /// Tabulate `p(outputs = o | given = g)` from a closure over both assignments.
    pub fn from_fn(
        outputs: Vec<Variable>,
        given: Vec<Variable>,
        p: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let rows = checked_volume(&given)?;
        let width = checked_volume(&outputs)?;
        let mut table = Vec::with_capacity(rows.saturating_mul(width));
        let mut g = vec![0; given.len()];
        let mut o = vec![0; outputs.len()];
        for _ in 0..rows {
            o.iter_mut().for_each(|v| *v = 0);
            for _ in 0..width {
                table.push(p(&g, &o));
                advance(&mut o, &outputs);
            }
            advance(&mut g, &given);
        }
        Self::new(outputs, given, table)
    }

    pub fn outputs(&self) -> &[Variable] {
        &self.outputs
    }

    pub fn given(&self) -> &[Variable] {
        &self.given
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn output_volume(&self) -> usize {
        self.outputs.iter().map(|v| v.size).product()
    }
}

/// Odometer increment over a row-major assignment.
fn advance(assignment: &mut [usize], vars: &[Variable]) {
    for i in (0..assignment.len()).rev() {
        assignment[i] += 1;
        if assignment[i] < vars[i].size {
            return;
        }
        assignment[i] = 0;
    }
}

/// A joint pmf over an ordered list of named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedJoint {
    vars: Vec<Variable>,
    strides: Vec<usize>,
    table: Vec<f64>,
}

impl NamedJoint {
    pub fn new(vars: Vec<Variable>, mut table: Vec<f64>) -> Result<Self> {
        check_unique(&vars)?;
        let expected = checked_volume(&vars)?;
        if table.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                actual: table.len(),
            });
        }
        normalize_slices(&mut table, expected)?;
        Ok(Self::from_parts(vars, table))
    }

    fn from_parts(vars: Vec<Variable>, table: Vec<f64>) -> Self {
        let strides = row_major_strides(&vars);
        Self { vars, strides, table }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn has(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Probability of a full assignment given in variable order.
    pub fn prob(&self, assignment: &[usize]) -> f64 {
        assert_eq!(assignment.len(), self.vars.len(), "assignment arity");
        let idx: usize = assignment.iter().zip(&self.strides).map(|(a, s)| a * s).sum();
        self.table[idx]
    }

    fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let pos = self
                .position(n)
                .ok_or_else(|| ProbError::UnknownVariable(n.to_string()))?;
            if !out.contains(&pos) {
                out.push(pos);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Marginal table over `positions` (sorted, joint order).
    fn marginal_table(&self, positions: &[usize]) -> Vec<f64> {
        if positions.len() == self.vars.len() {
            return self.table.clone();
        }
        let mut out_strides = vec![1usize; positions.len()];
        for i in (0..positions.len().saturating_sub(1)).rev() {
            out_strides[i] = out_strides[i + 1] * self.vars[positions[i + 1]].size;
        }
        let len = positions.iter().map(|&p| self.vars[p].size).product::<usize>();
        let mut out = vec![0.0; len];
        for (idx, &p) in self.table.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut proj = 0;
            for (k, &pos) in positions.iter().enumerate() {
                proj += ((idx / self.strides[pos]) % self.vars[pos].size) * out_strides[k];
            }
            out[proj] += p;
        }
        out
    }

    /// Sum out every variable not in `keep`. Kept variables retain joint order.
    pub fn marginalize<S: AsRef<str>>(&self, keep: &[S]) -> Result<NamedJoint> {
        let positions = self.positions(keep)?;
        let vars = positions.iter().map(|&p| self.vars[p].clone()).collect();
        Ok(Self::from_parts(vars, self.marginal_table(&positions)))
    }

    fn entropy_at(&self, positions: &[usize]) -> f64 {
        if positions.is_empty() {
            return 0.0;
        }
        entropy_bits(&self.marginal_table(positions))
    }

    fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    }

    fn disjoint(&self, sets: &[&[usize]]) -> Result<()> {
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                if let Some(&p) = a.iter().find(|p| b.contains(p)) {
                    return Err(ProbError::Overlap(self.vars[p].name.clone()));
                }
            }
        }
        Ok(())
    }

    /// Joint entropy `H(A)` in bits.
    pub fn entropy<S: AsRef<str>>(&self, a: &[S]) -> Result<f64> {
        Ok(self.entropy_at(&self.positions(a)?))
    }

    /// Conditional entropy `H(A | C)` in bits.
    pub fn cond_entropy<S: AsRef<str>, T: AsRef<str>>(&self, a: &[S], c: &[T]) -> Result<f64> {
        let a = self.positions(a)?;
        let c = self.positions(c)?;
        self.disjoint(&[&a, &c])?;
        let h = self.entropy_at(&Self::union(&a, &c)) - self.entropy_at(&c);
        Ok(h.max(0.0))
    }

    /// Conditional mutual information `I(A; B | C)` in bits.
    ///
    /// Computed as `H(A,C) + H(B,C) - H(A,B,C) - H(C)`; round-off below zero
    /// is clamped.
    pub fn mutual_info<S: AsRef<str>, T: AsRef<str>, U: AsRef<str>>(&self, a: &[S], b: &[T], c: &[U]) -> Result<f64> {
        let a = self.positions(a)?;
        let b = self.positions(b)?;
        let c = self.positions(c)?;
        self.disjoint(&[&a, &b, &c])?;
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let ac = Self::union(&a, &c);
        let bc = Self::union(&b, &c);
        let abc = Self::union(&ac, &b);
        let i = self.entropy_at(&ac) + self.entropy_at(&bc) - self.entropy_at(&abc) - self.entropy_at(&c);
        debug_assert!(i > -1e-9, "mutual information {i} far below zero");
        Ok(i.max(0.0))
    }
}

/// Shannon entropy in bits of a nonnegative table summing to one.
pub fn entropy_bits(table: &[f64]) -> f64 {
    -table.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Multiply a chain of conditional factors into one joint.
///
/// Each factor may condition only on variables produced by earlier factors.
/// The joint's variables appear in production order.
pub fn build_joint(factors: &[ConditionalFactor]) -> Result<NamedJoint> {
    let mut vars: Vec<Variable> = Vec::new();
    let mut table = vec![1.0];
    for factor in factors {
        let strides = row_major_strides(&vars);
        let mut given_pos = Vec::with_capacity(factor.given.len());
        for g in &factor.given {
            let pos = vars
                .iter()
                .position(|v| v.name == g.name)
                .ok_or_else(|| ProbError::DanglingGiven(g.name.clone()))?;
            if vars[pos].size != g.size {
                return Err(ProbError::AlphabetMismatch {
                    name: g.name.clone(),
                    expected: vars[pos].size,
                    found: g.size,
                });
            }
            given_pos.push(pos);
        }
        for o in &factor.outputs {
            if vars.iter().any(|v| v.name == o.name) {
                return Err(ProbError::DuplicateOutput(o.name.clone()));
            }
        }
        let given_strides = row_major_strides(&factor.given);
        let width = factor.output_volume();
        let len = table.len().checked_mul(width).ok_or(ProbError::TooLarge(usize::MAX))?;
        if len > MAX_JOINT_ENTRIES {
            return Err(ProbError::TooLarge(len));
        }
        let mut next = Vec::with_capacity(len);
        for (idx, &p) in table.iter().enumerate() {
            let row: usize = given_pos
                .iter()
                .zip(&given_strides)
                .map(|(&pos, &gs)| ((idx / strides[pos]) % vars[pos].size) * gs)
                .sum();
            let slice = &factor.table[row * width..(row + 1) * width];
            next.extend(slice.iter().map(|q| p * q));
        }
        vars.extend(factor.outputs.iter().cloned());
        table = next;
    }
    Ok(NamedJoint::from_parts(vars, table))
}
