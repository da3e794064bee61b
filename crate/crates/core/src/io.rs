//! JSON file formats and atomic output.
//!
//! Tables are nested arrays in row-major order, conditioning variables
//! outermost in their declared order, then outputs. A flat array of the
//! full length is accepted too.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::det_class::{DetInput, InjectiveDetSpec};
use crate::dm_region::{names, ImrcChannel, ImrcInputSpec, RelayInput};
use crate::prob::{ConditionalFactor, ProbError, Variable};
use crate::sweep::SweepSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed document or a value outside the model.
    Schema,
    /// A probability table that is not a pmf.
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub file: PathBuf,
    pub path: String,
    pub message: String,
    pub kind: ErrorKind,
}

impl InputError {
    fn schema(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            file: PathBuf::new(),
            path: path.into(),
            message: message.to_string(),
            kind: ErrorKind::Schema,
        }
    }

    fn in_file(mut self, file: &Path) -> Self {
        self.file = file.to_path_buf();
        self
    }

    /// Process exit code for this error: 2 for schema problems, 3 for pmf violations.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Schema => 2,
            ErrorKind::Numeric => 3,
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file.display())?;
        if !self.path.is_empty() {
            write!(f, ": at {}", self.path)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for InputError {}

type Result<T> = std::result::Result<T, InputError>;

fn prob_error(path: &str, e: ProbError) -> InputError {
    let kind = match e {
        ProbError::NotNormalized { .. } | ProbError::InvalidEntry { .. } => ErrorKind::Numeric,
        _ => ErrorKind::Schema,
    };
    InputError {
        kind,
        ..InputError::schema(path, e)
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        InputError::schema(path, e.into_inner())
    })
}

fn read(file: &Path) -> Result<String> {
    std::fs::read_to_string(file).map_err(|e| InputError::schema("", format!("cannot read file: {e}")).in_file(file))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    size: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    #[serde(default)]
    given: Vec<String>,
    output: Vec<String>,
    table: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    variables: Vec<RawVariable>,
    law: RawFactor,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    variables: Vec<RawVariable>,
    factors: Vec<RawFactor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetInput {
    #[serde(default = "single_letter")]
    q: Vec<f64>,
    x1_given_q: Vec<Vec<f64>>,
    x2_given_q: Vec<Vec<f64>>,
}

fn single_letter() -> Vec<f64> {
    vec![1.0]
}

fn declare(vars: &[RawVariable]) -> Result<HashMap<&str, usize>> {
    let mut out = HashMap::new();
    for (i, v) in vars.iter().enumerate() {
        if v.size == 0 {
            return Err(InputError::schema(
                format!("variables[{i}].size"),
                "alphabet size must be positive",
            ));
        }
        if out.insert(v.name.as_str(), v.size).is_some() {
            return Err(InputError::schema(
                format!("variables[{i}].name"),
                format!("`{}` is declared twice", v.name),
            ));
        }
    }
    Ok(out)
}

fn flatten(value: &Value, dims: &[usize], path: &mut String, out: &mut Vec<f64>) -> Result<()> {
    match (dims.split_first(), value) {
        (None, Value::Number(n)) => {
            out.push(n.as_f64().unwrap_or(f64::NAN));
            Ok(())
        }
        (None, _) => Err(InputError::schema(path.clone(), "expected a number")),
        (Some((&d, rest)), Value::Array(items)) => {
            if items.len() != d {
                return Err(InputError::schema(
                    path.clone(),
                    format!("expected {d} entries, found {}", items.len()),
                ));
            }
            for (i, item) in items.iter().enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                flatten(item, rest, path, out)?;
                path.truncate(len);
            }
            Ok(())
        }
        (Some(_), _) => Err(InputError::schema(path.clone(), "expected an array")),
    }
}

fn table_values(value: &Value, dims: &[usize], path: &str) -> Result<Vec<f64>> {
    let total: usize = dims.iter().product();
    if let Value::Array(items) = value {
        if dims.len() > 1 && items.len() == total && items.iter().all(Value::is_number) {
            return Ok(items.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect());
        }
    }
    let mut out = Vec::with_capacity(total);
    flatten(value, dims, &mut path.to_string(), &mut out)?;
    Ok(out)
}

fn factor(raw: &RawFactor, vars: &HashMap<&str, usize>, path: &str) -> Result<ConditionalFactor> {
    let resolve = |list: &[String], field: &str| -> Result<Vec<Variable>> {
        list.iter()
            .enumerate()
            .map(|(i, n)| {
                vars.get(n.as_str())
                    .map(|&s| Variable::new(n.clone(), s))
                    .ok_or_else(|| {
                        InputError::schema(
                            format!("{path}.{field}[{i}]"),
                            format!("`{n}` is not a declared variable"),
                        )
                    })
            })
            .collect()
    };
    let given = resolve(&raw.given, "given")?;
    let outputs = resolve(&raw.output, "output")?;
    if outputs.is_empty() {
        return Err(InputError::schema(
            format!("{path}.output"),
            "a factor needs at least one output",
        ));
    }
    let dims: Vec<usize> = given.iter().chain(&outputs).map(|v| v.size).collect();
    let table = table_values(&raw.table, &dims, &format!("{path}.table"))?;
    ConditionalFactor::new(outputs, given, table).map_err(|e| prob_error(&format!("{path}.table"), e))
}

pub fn parse_channel(text: &str) -> Result<ImrcChannel> {
    let raw: RawChannel = parse(text)?;
    let vars = declare(&raw.variables)?;
    let law = factor(&raw.law, &vars, "law")?;
    ImrcChannel::new(law).map_err(|e| InputError::schema("law", e))
}

enum Role {
    Q,
    Source(u8),
    RelayInput(usize),
    Compression(usize),
}

fn role(outputs: &[String]) -> Option<Role> {
    let mut sorted: Vec<&str> = outputs.iter().map(String::as_str).collect();
    sorted.sort_unstable();
    let relay_index = |name: &str, prefix: &str| name.strip_prefix(prefix)?.parse::<usize>().ok().filter(|&k| k > 0);
    match sorted.as_slice() {
        [names::Q] => Some(Role::Q),
        [names::U1, names::X1] => Some(Role::Source(1)),
        [names::U2, names::X2] => Some(Role::Source(2)),
        [one] => relay_index(one, "X3_")
            .map(Role::RelayInput)
            .or_else(|| relay_index(one, "Yh3_").map(Role::Compression)),
        _ => None,
    }
}

pub fn parse_input(text: &str) -> Result<ImrcInputSpec> {
    let raw: RawInput = parse(text)?;
    let vars = declare(&raw.variables)?;
    let mut q = None;
    let mut sources: [Option<ConditionalFactor>; 2] = [None, None];
    let mut relay_x3 = BTreeMap::new();
    let mut relay_c = BTreeMap::new();
    for (i, rf) in raw.factors.iter().enumerate() {
        let path = format!("factors[{i}]");
        let f = factor(rf, &vars, &path)?;
        let duplicate = || InputError::schema(format!("{path}.output"), "this part of the input is given twice");
        let slot = match role(&rf.output) {
            Some(Role::Q) => &mut q,
            Some(Role::Source(s)) => &mut sources[usize::from(s) - 1],
            Some(Role::RelayInput(k)) => relay_x3.entry(k).or_insert(None),
            Some(Role::Compression(k)) => relay_c.entry(k).or_insert(None),
            None => {
                return Err(InputError::schema(
                    format!("{path}.output"),
                    "outputs must be one of {Q}, {U1, X1}, {U2, X2}, {X3_k}, {Yh3_k}",
                ))
            }
        };
        if slot.replace(f).is_some() {
            return Err(duplicate());
        }
    }
    let missing = |what: &str| InputError::schema("factors", format!("missing the factor for {what}"));
    let n = relay_x3.len().max(relay_c.len());
    let mut relays = Vec::with_capacity(n);
    for k in 1..=n {
        let x3 = relay_x3.remove(&k).flatten().ok_or_else(|| missing(&names::x3(k)))?;
        let compress = relay_c.remove(&k).flatten().ok_or_else(|| missing(&names::yhat3(k)))?;
        relays.push(RelayInput { x3, compress });
    }
    if let Some(k) = relay_x3.keys().chain(relay_c.keys()).next() {
        return Err(InputError::schema("factors", format!("relay {k} skips an index")));
    }
    let [s1, s2] = sources;
    ImrcInputSpec::new(
        q.ok_or_else(|| missing(names::Q))?,
        s1.ok_or_else(|| missing("U1, X1"))?,
        s2.ok_or_else(|| missing("U2, X2"))?,
        relays,
    )
    .map_err(|e| InputError::schema("factors", e))
}

pub fn parse_det_spec(text: &str) -> Result<InjectiveDetSpec> {
    let spec: InjectiveDetSpec = parse(text)?;
    spec.check_shape().map_err(|e| InputError::schema("", e))?;
    Ok(spec)
}

pub fn parse_det_input(text: &str) -> Result<DetInput> {
    let raw: RawDetInput = parse(text)?;
    DetInput::new(raw.q, raw.x1_given_q, raw.x2_given_q).map_err(|e| match e {
        crate::det_class::DetError::Prob(p) => prob_error("", p),
        e => InputError::schema("", e),
    })
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    parse(text)
}

pub fn load_channel(file: &Path) -> Result<ImrcChannel> {
    parse_channel(&read(file)?).map_err(|e| e.in_file(file))
}

pub fn load_input(file: &Path) -> Result<ImrcInputSpec> {
    parse_input(&read(file)?).map_err(|e| e.in_file(file))
}

pub fn load_det_spec(file: &Path) -> Result<InjectiveDetSpec> {
    parse_det_spec(&read(file)?).map_err(|e| e.in_file(file))
}

pub fn load_det_input(file: &Path) -> Result<DetInput> {
    parse_det_input(&read(file)?).map_err(|e| e.in_file(file))
}

pub fn load_sweep(file: &Path) -> Result<SweepSpec> {
    parse_sweep(&read(file)?).map_err(|e| e.in_file(file))
}

/// Write `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dm_region::theorem1_region;

    const COPY_CHANNEL: &str = r#"{
      "variables": [
        {"name": "X1", "size": 2}, {"name": "X2", "size": 2}, {"name": "X3_1", "size": 1},
        {"name": "Y3_1", "size": 1}, {"name": "Y4", "size": 2}, {"name": "Y5", "size": 2}
      ],
      "law": {
        "given": ["X1", "X2", "X3_1"],
        "output": ["Y3_1", "Y4", "Y5"],
        "table": [
          [[[[[1, 0], [0, 0]]]], [[[[0, 1], [0, 0]]]]],
          [[[[[0, 0], [1, 0]]]], [[[[0, 0], [0, 1]]]]]
        ]
      }
    }"#;

    const UNIFORM_INPUT: &str = r#"{
      "variables": [
        {"name": "Q", "size": 1}, {"name": "U1", "size": 1}, {"name": "X1", "size": 2},
        {"name": "U2", "size": 1}, {"name": "X2", "size": 2}, {"name": "X3_1", "size": 1},
        {"name": "Y3_1", "size": 1}, {"name": "Yh3_1", "size": 1}
      ],
      "factors": [
        {"output": ["Q"], "table": [1]},
        {"given": ["Q"], "output": ["U1", "X1"], "table": [0.5, 0.5]},
        {"given": ["Q"], "output": ["U2", "X2"], "table": [[[0.5, 0.5]]]},
        {"given": ["Q"], "output": ["X3_1"], "table": [[1]]},
        {"given": ["Y3_1", "X3_1", "Q"], "output": ["Yh3_1"], "table": [[[[1]]]]}
      ]
    }"#;

    #[test]
    fn copy_channel_round_trip() {
        let ch = parse_channel(COPY_CHANNEL).unwrap();
        let input = parse_input(UNIFORM_INPUT).unwrap();
        let r = theorem1_region(&ch, &input).unwrap();
        assert!((r[0].rhs - 1.0).abs() < 1e-12);
        assert!((r[1].rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shape_errors_name_the_path() {
        let bad = COPY_CHANNEL.replace("[[[[0, 0], [0, 1]]]]", "[[[0, 0, 1]]]");
        let e = parse_channel(&bad).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Schema);
        assert_eq!(e.path, "law.table[1][1][0][0]");
    }

    #[test]
    fn unknown_variable() {
        let bad = UNIFORM_INPUT.replace(
            r#""given": ["Q"], "output": ["X3_1"]"#,
            r#""given": ["W"], "output": ["X3_1"]"#,
        );
        let e = parse_input(&bad).unwrap_err();
        assert_eq!((e.kind, e.path.as_str()), (ErrorKind::Schema, "factors[3].given[0]"));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unnormalized_is_numeric() {
        let bad = UNIFORM_INPUT.replace("[0.5, 0.5]", "[0.5, 0.6]");
        let e = parse_input(&bad).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Numeric);
        assert_eq!(e.exit_code(), 3);
        assert_eq!(e.path, "factors[1].table");
    }

    #[test]
    fn serde_errors_carry_paths() {
        let e = parse_channel(r#"{"variables": [{"name": "X1", "size": -1}], "law": {}}"#).unwrap_err();
        assert_eq!(e.path, "variables[0].size");
        let e = parse_sweep(r#"{"x_variable": "Q"}"#).unwrap_err();
        assert_eq!(e.path, "x_variable");
    }

    #[test]
    fn missing_and_duplicate_factors() {
        let no_q = UNIFORM_INPUT.replace(r#"{"output": ["Q"], "table": [1]},"#, "");
        assert!(parse_input(&no_q).unwrap_err().message.contains("Q"));
        let twice = UNIFORM_INPUT.replace(
            r#"{"output": ["Q"], "table": [1]},"#,
            r#"{"output": ["Q"], "table": [1]}, {"output": ["Q"], "table": [1]},"#,
        );
        assert_eq!(parse_input(&twice).unwrap_err().path, "factors[1].output");
    }

    #[test]
    fn det_files() {
        let spec = crate::det_class::modulo2_example(1.0);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(parse_det_spec(&text).unwrap(), spec);
        let input = parse_det_input(r#"{"x1_given_q": [[0.5, 0.5]], "x2_given_q": [[0.5, 0.5]]}"#).unwrap();
        assert_eq!(input.q_size(), 1);
        let e = parse_det_input(r#"{"x1_given_q": [[0.5, 0.6]], "x2_given_q": [[0.5, 0.5]]}"#).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Numeric);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
