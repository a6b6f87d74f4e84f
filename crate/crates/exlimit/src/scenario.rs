//! Scenario files.
//!
//! A scenario is a TOML document. Top-level keys:
//!
//! ```toml
//! name = "example2-verify"
//! mode = "verify"            # limit | simulate | verify | sweep
//! n = 10000                  # required by simulate and verify
//! replications = 100000      # default 100000
//! seed = 42                  # default 42
//! output = "example2.csv"    # default "<name>.csv"
//! grid = { lo = -1.0, hi = 4.0, steps = 101 }   # default; or x_grid = [..]
//! atom_window = 0.05         # default 0.05
//! sweep_ns = [100, 1000]     # required by sweep
//!
//! # measure: either a builder ...
//! builder = "example2"       # example1 | example2
//! p = 0.5                    # example2 only
//! xi = { family = "normal", mean = 0.0, variance = 1.0 }
//!
//! # ... or explicit components, one table each
//! [[components]]
//! weight = 1.0
//! family = "rademacher_shifted"
//! shift = 0.0
//! scale = 1.0
//! ```
//!
//! Families and their parameters: `normal` (mean, variance),
//! `rademacher_shifted` (shift, scale), `point_mass` (value),
//! `convolution_rademacher_normal` (none).

use std::path::PathBuf;
use std::str::FromStr;

use exlimit_core::measures::{example1_measure, example2_measure};
use exlimit_core::{ComponentLaw, DirectingMeasure, WeightedLaw};
use toml::{Table, Value};

pub const DEFAULT_REPLICATIONS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_GRID: GridSpec = GridSpec::Range {
    lo: -1.0,
    hi: 4.0,
    steps: 101,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        key: key.to_owned(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Limit,
    Simulate,
    Verify,
    Sweep,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Limit => "limit",
            Mode::Simulate => "simulate",
            Mode::Verify => "verify",
            Mode::Sweep => "sweep",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "limit" => Ok(Mode::Limit),
            "simulate" => Ok(Mode::Simulate),
            "verify" => Ok(Mode::Verify),
            "sweep" => Ok(Mode::Sweep),
            other => Err(format!(
                "unknown mode `{other}` (expected limit, simulate, verify or sweep)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Explicit(Vec<f64>),
    Range { lo: f64, hi: f64, steps: usize },
}

impl GridSpec {
    /// Grid points; `Range` yields `lo + (hi − lo)·i/(steps − 1)`.
    pub fn expand(&self) -> Vec<f64> {
        match self {
            GridSpec::Explicit(x) => x.clone(),
            GridSpec::Range { lo, hi, steps: 1 } => {
                debug_assert!(lo <= hi);
                vec![*lo]
            }
            GridSpec::Range { lo, hi, steps } => {
                let last = (*steps - 1) as f64;
                (0..*steps)
                    .map(|i| lo + (hi - lo) * i as f64 / last)
                    .collect()
            }
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        match self {
            GridSpec::Explicit(x) => {
                if x.is_empty() {
                    return Err(invalid("x_grid", "must not be empty"));
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("x_grid", "values must be finite"));
                }
                if x.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("x_grid", "must be strictly increasing"));
                }
            }
            GridSpec::Range { lo, hi, steps } => {
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(invalid("grid", "lo and hi must be finite"));
                }
                if *steps == 0 {
                    return Err(invalid("grid.steps", "must be >= 1"));
                }
                if *steps > 1 && lo >= hi {
                    return Err(invalid("grid", format!("needs lo < hi, got lo = {lo}, hi = {hi}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Example1,
    Example2 { p: f64, xi: ComponentLaw },
    Components(Vec<WeightedLaw>),
}

impl MeasureSpec {
    pub fn build(&self) -> Result<DirectingMeasure, exlimit_core::Error> {
        match self {
            MeasureSpec::Example1 => Ok(example1_measure()),
            MeasureSpec::Example2 { p, xi } => example2_measure(*p, *xi),
            MeasureSpec::Components(c) => {
                DirectingMeasure::new(c.iter().map(|w| (w.weight, w.law)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub measure: MeasureSpec,
    pub n: Option<u64>,
    pub replications: u64,
    pub seed: u64,
    pub grid: GridSpec,
    pub sweep_ns: Option<Vec<u64>>,
    pub atom_window: f64,
    pub output: Option<PathBuf>,
}

impl Scenario {
    pub fn x_grid(&self) -> Vec<f64> {
        self.grid.expand()
    }

    pub fn output_path(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.name)))
    }

    /// Checks everything that depends on more than one key, including that
    /// the measure builds.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        self.grid.validate()?;
        if self.replications == 0 {
            return Err(invalid("replications", "must be >= 1"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(invalid("seed", "must fit in a TOML integer (<= 2^63 - 1)"));
        }
        if let Some(0) = self.n {
            return Err(invalid("n", "must be >= 1"));
        }
        if !(self.atom_window.is_finite() && self.atom_window >= 0.0) {
            return Err(invalid("atom_window", "must be a finite number >= 0"));
        }
        match self.mode {
            Mode::Simulate | Mode::Verify if self.n.is_none() => {
                return Err(ScenarioError::Missing("n".into()))
            }
            Mode::Sweep => match &self.sweep_ns {
                None => return Err(ScenarioError::Missing("sweep_ns".into())),
                Some(ns) if ns.is_empty() => return Err(invalid("sweep_ns", "must not be empty")),
                Some(ns) if ns.contains(&0) => return Err(invalid("sweep_ns", "lengths must be >= 1")),
                Some(ns) if ns.windows(2).any(|w| w[0] >= w[1]) => {
                    return Err(invalid("sweep_ns", "must be strictly increasing"))
                }
                _ => {}
            },
            _ => {}
        }
        let key = match self.measure {
            MeasureSpec::Components(_) => "components",
            _ => "builder",
        };
        self.measure.build().map_err(|e| invalid(key, e.to_string()))?;
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        let mut t = Table::new();
        t.insert("name".into(), Value::String(self.name.clone()));
        t.insert("mode".into(), Value::String(self.mode.as_str().into()));
        if let Some(n) = self.n {
            t.insert("n".into(), int(n));
        }
        t.insert("replications".into(), int(self.replications));
        t.insert("seed".into(), int(self.seed));
        if let Some(out) = &self.output {
            t.insert("output".into(), Value::String(out.to_string_lossy().into_owned()));
        }
        match &self.grid {
            GridSpec::Explicit(x) => {
                t.insert("x_grid".into(), Value::Array(x.iter().map(|&v| Value::Float(v)).collect()));
            }
            GridSpec::Range { lo, hi, steps } => {
                let mut g = Table::new();
                g.insert("lo".into(), Value::Float(*lo));
                g.insert("hi".into(), Value::Float(*hi));
                g.insert("steps".into(), int(*steps as u64));
                t.insert("grid".into(), Value::Table(g));
            }
        }
        t.insert("atom_window".into(), Value::Float(self.atom_window));
        if let Some(ns) = &self.sweep_ns {
            t.insert("sweep_ns".into(), Value::Array(ns.iter().map(|&n| int(n)).collect()));
        }
        match &self.measure {
            MeasureSpec::Example1 => {
                t.insert("builder".into(), Value::String("example1".into()));
            }
            MeasureSpec::Example2 { p, xi } => {
                t.insert("builder".into(), Value::String("example2".into()));
                t.insert("p".into(), Value::Float(*p));
                t.insert("xi".into(), Value::Table(law_table(xi)));
            }
            MeasureSpec::Components(c) => {
                let rows = c
                    .iter()
                    .map(|w| {
                        let mut row = Table::new();
                        row.insert("weight".into(), Value::Float(w.weight));
                        row.extend(law_table(&w.law));
                        Value::Table(row)
                    })
                    .collect();
                t.insert("components".into(), Value::Array(rows));
            }
        }
        toml::to_string(&t).expect("scenario tables always serialize")
    }
}

fn int(v: u64) -> Value {
    Value::Integer(v as i64)
}

fn law_table(law: &ComponentLaw) -> Table {
    let mut t = Table::new();
    let mut put = |k: &str, v: Value| {
        t.insert(k.into(), v);
    };
    match *law {
        ComponentLaw::Normal { mean, variance } => {
            put("family", Value::String("normal".into()));
            put("mean", Value::Float(mean));
            put("variance", Value::Float(variance));
        }
        ComponentLaw::RademacherShifted { shift, scale } => {
            put("family", Value::String("rademacher_shifted".into()));
            put("shift", Value::Float(shift));
            put("scale", Value::Float(scale));
        }
        ComponentLaw::PointMass { value } => {
            put("family", Value::String("point_mass".into()));
            put("value", Value::Float(value));
        }
        ComponentLaw::ConvolutionRademacherNormal => {
            put("family", Value::String("convolution_rademacher_normal".into()));
        }
    }
    t
}

/// Keys of one table, consumed as they are read so leftovers can be reported.
struct Fields {
    prefix: String,
    table: Table,
}

impl Fields {
    fn new(prefix: impl Into<String>, table: Table) -> Self {
        Fields {
            prefix: prefix.into(),
            table,
        }
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_owned()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Value, ScenarioError> {
        self.take(key)
            .ok_or_else(|| ScenarioError::Missing(self.path(key)))
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, ScenarioError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(invalid(&self.path(key), format!("expected a string, got {}", other.type_str()))),
        }
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>, ScenarioError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => as_float(&v).map(Some).ok_or_else(|| {
                invalid(&self.path(key), format!("expected a number, got {}", v.type_str()))
            }),
        }
    }

    fn required_float(&mut self, key: &str) -> Result<f64, ScenarioError> {
        self.float(key)?.ok_or_else(|| ScenarioError::Missing(self.path(key)))
    }

    fn count(&mut self, key: &str) -> Result<Option<u64>, ScenarioError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => as_count(&v).map(Some).ok_or_else(|| {
                invalid(&self.path(key), "expected a non-negative integer")
            }),
        }
    }

    fn finish(self) -> Result<(), ScenarioError> {
        match self.table.keys().next() {
            Some(k) => Err(ScenarioError::UnknownKey(self.path(k))),
            None => Ok(()),
        }
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn as_count(v: &Value) -> Option<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Some(*i as u64),
        _ => None,
    }
}

fn parse_law(f: &mut Fields) -> Result<ComponentLaw, ScenarioError> {
    let family = f.string("family")?.ok_or_else(|| ScenarioError::Missing(f.path("family")))?;
    let law = match family.as_str() {
        "normal" => ComponentLaw::normal(f.required_float("mean")?, f.required_float("variance")?),
        "rademacher_shifted" => ComponentLaw::rademacher_shifted(
            f.required_float("shift")?,
            f.required_float("scale")?,
        ),
        "point_mass" => ComponentLaw::point_mass(f.required_float("value")?),
        "convolution_rademacher_normal" => Ok(ComponentLaw::ConvolutionRademacherNormal),
        other => {
            return Err(invalid(
                &f.path("family"),
                format!(
                    "unknown family `{other}` (expected normal, rademacher_shifted, \
                     point_mass or convolution_rademacher_normal)"
                ),
            ))
        }
    };
    law.map_err(|e| invalid(&f.prefix, e.to_string()))
}

fn sub_table(value: Value, path: &str) -> Result<Table, ScenarioError> {
    match value {
        Value::Table(t) => Ok(t),
        other => Err(invalid(path, format!("expected a table, got {}", other.type_str()))),
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        ScenarioError::Parse {
            line,
            column,
            message: e.message().trim().to_owned(),
        }
    })?;
    let mut f = Fields::new("", table);

    let name = f.string("name")?.ok_or_else(|| ScenarioError::Missing("name".into()))?;
    let mode = f
        .string("mode")?
        .ok_or_else(|| ScenarioError::Missing("mode".into()))?
        .parse()
        .map_err(|e: String| invalid("mode", e))?;
    let n = f.count("n")?;
    let replications = f.count("replications")?.unwrap_or(DEFAULT_REPLICATIONS);
    let seed = f.count("seed")?.unwrap_or(DEFAULT_SEED);
    let output = f.string("output")?.map(PathBuf::from);
    let atom_window = f
        .float("atom_window")?
        .unwrap_or(exlimit_core::verify::DEFAULT_ATOM_WINDOW);

    let grid = match (f.take("grid"), f.take("x_grid")) {
        (Some(_), Some(_)) => return Err(invalid("grid", "give either `grid` or `x_grid`, not both")),
        (Some(g), None) => {
            let mut g = Fields::new("grid", sub_table(g, "grid")?);
            let lo = g.required_float("lo")?;
            let hi = g.required_float("hi")?;
            let steps = g.count("steps")?.ok_or_else(|| ScenarioError::Missing("grid.steps".into()))?;
            g.finish()?;
            GridSpec::Range {
                lo,
                hi,
                steps: steps as usize,
            }
        }
        (None, Some(Value::Array(xs))) => GridSpec::Explicit(
            xs.iter()
                .map(as_float)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| invalid("x_grid", "expected an array of numbers"))?,
        ),
        (None, Some(_)) => return Err(invalid("x_grid", "expected an array of numbers")),
        (None, None) => DEFAULT_GRID,
    };

    let sweep_ns = match f.take("sweep_ns") {
        None => None,
        Some(Value::Array(ns)) => Some(
            ns.iter()
                .map(as_count)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| invalid("sweep_ns", "expected an array of non-negative integers"))?,
        ),
        Some(_) => return Err(invalid("sweep_ns", "expected an array of non-negative integers")),
    };

    let builder = f.string("builder")?;
    let components = f.take("components");
    let measure = match (builder, components) {
        (Some(_), Some(_)) => {
            return Err(invalid("builder", "give either `builder` or `components`, not both"))
        }
        (None, None) => return Err(ScenarioError::Missing("builder` or `components".into())),
        (Some(b), None) => match b.as_str() {
            "example1" => MeasureSpec::Example1,
            "example2" => {
                let p = f.required_float("p")?;
                let xi = f.require("xi")?;
                let mut xf = Fields::new("xi", sub_table(xi, "xi")?);
                let xi = parse_law(&mut xf)?;
                xf.finish()?;
                MeasureSpec::Example2 { p, xi }
            }
            other => {
                return Err(invalid(
                    "builder",
                    format!("unknown builder `{other}` (expected example1 or example2)"),
                ))
            }
        },
        (None, Some(Value::Array(rows))) => {
            let mut out = Vec::with_capacity(rows.len());
            for (i, row) in rows.into_iter().enumerate() {
                let path = format!("components[{i}]");
                let mut cf = Fields::new(path.clone(), sub_table(row, &path)?);
                let weight = cf.required_float("weight")?;
                let law = parse_law(&mut cf)?;
                cf.finish()?;
                out.push(WeightedLaw { weight, law });
            }
            MeasureSpec::Components(out)
        }
        (None, Some(_)) => return Err(invalid("components", "expected an array of tables")),
    };
    f.finish()?;

    let scenario = Scenario {
        name,
        mode,
        measure,
        n,
        replications,
        seed,
        grid,
        sweep_ns,
        atom_window,
        output,
    };
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_scenario("name = \"ex1\"\nbuilder = \"example1\"\nmode = \"limit\"\n").unwrap();
        assert_eq!(s.mode, Mode::Limit);
        assert_eq!(s.measure, MeasureSpec::Example1);
        assert_eq!(s.replications, 100_000);
        assert_eq!(s.seed, 42);
        assert_eq!(s.grid, DEFAULT_GRID);
        assert_eq!(s.atom_window, 0.05);
        assert_eq!(s.output_path(), PathBuf::from("ex1.csv"));
        let x = s.x_grid();
        assert_eq!(x.len(), 101);
        assert_eq!((x[0], x[20], x[100]), (-1.0, 0.0, 4.0));
        assert_eq!(x[40], 1.0);
    }

    #[test]
    fn components_round_trip() {
        let text = r#"
name = "mix"
mode = "verify"
n = 1000
seed = 7
x_grid = [0.5, 1, 2.0]
output = "out/mix.csv"

[[components]]
weight = 0.3
family = "normal"
mean = -1.0
variance = 1.0

[[components]]
weight = 0.2
family = "rademacher_shifted"
shift = 0.0
scale = 2.0

[[components]]
weight = 0.25
family = "point_mass"
value = 0.0

[[components]]
weight = 0.25
family = "convolution_rademacher_normal"
"#;
        let s = parse_scenario(text).unwrap();
        let again = parse_scenario(&s.to_toml_string()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.grid, GridSpec::Explicit(vec![0.5, 1.0, 2.0]));
    }

    #[test]
    fn example2_round_trip() {
        let text = "name = \"e2\"\nmode = \"sweep\"\nsweep_ns = [10, 100]\nbuilder = \"example2\"\np = 0.5\nxi = { family = \"normal\", mean = 0.0, variance = 1.0 }\ngrid = { lo = -1, hi = 3, steps = 81 }\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(parse_scenario(&s.to_toml_string()).unwrap(), s);
        assert_eq!(s.x_grid()[40], 1.0);
    }

    #[test]
    fn example2_needs_p() {
        let text = "name = \"e2\"\nmode = \"limit\"\nbuilder = \"example2\"\nxi = { family = \"normal\", mean = 0.0, variance = 1.0 }\n";
        assert_eq!(parse_scenario(text), Err(ScenarioError::Missing("p".into())));
    }

    #[test]
    fn weight_sum_is_checked() {
        let text = "name = \"bad\"\nmode = \"limit\"\n[[components]]\nweight = 0.9\nfamily = \"normal\"\nmean = 0.0\nvariance = 1.0\n";
        let err = parse_scenario(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("components"), "{msg}");
        assert!(msg.contains("weights sum to 0.9"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = "name = \"x\"\nmode = \"limit\"\nbuilder = \"example1\"\nrepetitions = 3\n";
        assert_eq!(parse_scenario(text), Err(ScenarioError::UnknownKey("repetitions".into())));
        let text = "name = \"x\"\nmode = \"limit\"\n[[components]]\nweight = 1.0\nfamily = \"normal\"\nmean = 0.0\nvariance = 1.0\nsd = 1.0\n";
        assert_eq!(parse_scenario(text), Err(ScenarioError::UnknownKey("components[0].sd".into())));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "name = \"x\"\nmode = \"limit\"\nbuilder = = 3\n";
        match parse_scenario(text) {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mode_requirements() {
        let base = "name = \"x\"\nbuilder = \"example1\"\n";
        assert_eq!(
            parse_scenario(&format!("{base}mode = \"verify\"\n")),
            Err(ScenarioError::Missing("n".into()))
        );
        assert_eq!(
            parse_scenario(&format!("{base}mode = \"sweep\"\n")),
            Err(ScenarioError::Missing("sweep_ns".into()))
        );
        assert!(parse_scenario(&format!("{base}mode = \"sweep\"\nsweep_ns = [100, 10]\n")).is_err());
        assert!(parse_scenario(&format!("{base}mode = \"run\"\n")).is_err());
        assert!(parse_scenario(&format!("{base}mode = \"limit\"\nx_grid = [1.0, 0.0]\n")).is_err());
        assert!(parse_scenario(&format!("{base}mode = \"limit\"\nx_grid = []\n")).is_err());
        assert!(parse_scenario(&format!("{base}mode = \"limit\"\ngrid = {{ lo = 1, hi = 0, steps = 5 }}\n")).is_err());
        assert!(parse_scenario(&format!("{base}mode = \"limit\"\nreplications = 0\n")).is_err());
    }

    #[test]
    fn measure_source_must_be_unique() {
        let text = "name = \"x\"\nmode = \"limit\"\nbuilder = \"example1\"\ncomponents = []\n";
        assert!(parse_scenario(text).is_err());
        let text = "name = \"x\"\nmode = \"limit\"\n";
        assert!(matches!(parse_scenario(text), Err(ScenarioError::Missing(_))));
    }
}
