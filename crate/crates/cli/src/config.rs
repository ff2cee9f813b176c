//! Merging of flags, config file and defaults into a validated plan.

use std::path::{Path, PathBuf};

use ldeconf_core::oscillation::RadialGrid;
use ldeconf_core::solve::SolverConfig;
use ldeconf_core::{ConformalMapSpec, Domain, Expr, OdeSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Cli, Command};
use crate::error::{CliError, CliResult, FieldContext};
use crate::parse::{parse_complex, parse_complex_list};

const DEFAULT_POINTS: [(f64, f64); 6] = [
    (0.0, 0.0),
    (0.3, 0.0),
    (0.0, 0.3),
    (-0.5, 0.2),
    (0.6, -0.4),
    (0.85, 0.1),
];
pub const DEFAULT_SHRINK: f64 = 0.5;
pub const DEFAULT_RMAX: f64 = 0.99;
pub const EXAMPLE_NAMES: [&str; 4] = ["petal51", "expsum52", "schwarz2", "kim-roundtrip"];

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<String>,
    i: Option<usize>,
    n: Option<usize>,
    args: Option<Value>,
    map: Option<Value>,
    ode: Option<Value>,
    points: Option<Value>,
    ics: Option<Value>,
    a: Option<Value>,
    k: Option<usize>,
    rgrid: Option<Value>,
    shrink_b: Option<f64>,
    name: Option<String>,
    alpha: Option<f64>,
    rmax: Option<f64>,
    out: Option<PathBuf>,
    solver_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BellInput {
    Integers(Vec<i128>),
    Complex(Vec<Complex64>),
}

/// Initial data at the base point, one row per solution.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    /// Unit rows `e_1, ..., e_{k-1}, e_0`, so that the last solution is 1 at the base point.
    Canonical,
    Rows(Vec<Vec<Complex64>>),
}

impl InitialData {
    pub fn rows(&self, k: usize) -> Vec<Vec<Complex64>> {
        match self {
            Self::Rows(rows) => rows.clone(),
            Self::Canonical => (0..k)
                .map(|i| {
                    let mut row = vec![Complex64::new(0.0, 0.0); k];
                    row[(i + 1) % k] = Complex64::new(1.0, 0.0);
                    row
                })
                .collect(),
        }
    }
}

impl Serialize for InitialData {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Canonical => serializer.serialize_str("canonical"),
            Self::Rows(rows) => rows.serialize(serializer),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Plan {
    Bell {
        i: usize,
        n: usize,
        args: BellInput,
    },
    Transform {
        map: ConformalMapSpec,
        ode: OdeSpec,
        points: Vec<Complex64>,
    },
    Recover {
        ode: OdeSpec,
        ics: InitialData,
        points: Vec<Complex64>,
    },
    Basis {
        a: Expr,
        k: usize,
        points: Vec<Complex64>,
    },
    Oscillate {
        map: ConformalMapSpec,
        ode: OdeSpec,
        ics: InitialData,
        #[serde(rename = "rgrid")]
        radii: Vec<f64>,
        shrink_b: f64,
    },
    Example {
        name: String,
        alpha: f64,
        rmax: f64,
        shrink_b: f64,
    },
}

/// Everything a run needs. Serialized as `run.json`, which is itself a valid `--config` file.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub plan: Plan,
    pub solver_order: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub dry_run: bool,
}

impl RunConfig {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            order: self.solver_order,
            ..SolverConfig::default()
        }
    }
}

/// A flag value or a config value, with the directory relative paths refer to.
enum Source {
    Flag(String),
    Config(Value, PathBuf),
}

fn pick(flag: Option<String>, config: Option<Value>, base: &Path) -> Option<Source> {
    flag.map(Source::Flag)
        .or_else(|| config.map(|v| Source::Config(v, base.to_path_buf())))
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves a JSON-valued input given inline, as a file path, or (in a config file) as a JSON value.
fn json_input(field: &str, source: Source) -> CliResult<Value> {
    let (text, base) = match source {
        Source::Config(Value::String(s), base) => (s, base),
        Source::Config(v, _) => return Ok(v),
        Source::Flag(s) => (s, PathBuf::from(".")),
    };
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| CliError::invalid(field, e));
    }
    let path = base.join(&text);
    serde_json::from_str(&read_file(&path)?)
        .map_err(|e| CliError::invalid(field, format!("{}: {e}", path.display())))
}

fn required<T>(field: &str, value: Option<T>) -> CliResult<T> {
    value.ok_or_else(|| CliError::invalid(field, "is required"))
}

fn parse_map(source: Source) -> CliResult<ConformalMapSpec> {
    let named = match &source {
        Source::Flag(s) => Some(s.as_str()),
        Source::Config(Value::String(s), _) => Some(s.as_str()),
        _ => None,
    };
    let map = match named {
        Some("cayley") => ConformalMapSpec::cayley(),
        Some("identity") => ConformalMapSpec::identity(),
        _ => serde_json::from_value(json_input("map", source)?)
            .map_err(|e| CliError::invalid("map", e))?,
    };
    map.validate().field("map")?;
    Ok(map)
}

fn parse_ode(source: Source) -> CliResult<OdeSpec> {
    let spec: OdeSpec = serde_json::from_value(json_input("ode", source)?)
        .map_err(|e| CliError::invalid("ode", e))?;
    spec.build().field("ode")?;
    Ok(spec)
}

fn parse_points(source: Option<Source>) -> CliResult<Vec<Complex64>> {
    let points = match source {
        None => DEFAULT_POINTS
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect(),
        Some(Source::Flag(s)) | Some(Source::Config(Value::String(s), _)) => {
            parse_complex_list(&s).map_err(|e| CliError::invalid("points", e))?
        }
        Some(Source::Config(v, _)) => {
            serde_json::from_value(v).map_err(|e| CliError::invalid("points", e))?
        }
    };
    if points.is_empty() {
        return Err(CliError::invalid("points", "no points given"));
    }
    if let Some(z) = points.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(CliError::invalid(
            "points",
            format!("{z} is not in the unit disc"),
        ));
    }
    Ok(points)
}

fn parse_ics(source: Option<Source>, k: usize) -> CliResult<InitialData> {
    let value = match source {
        None => return Ok(InitialData::Canonical),
        Some(Source::Flag(s)) | Some(Source::Config(Value::String(s), _)) if s == "canonical" => {
            return Ok(InitialData::Canonical)
        }
        Some(source) => json_input("ics", source)?,
    };
    let rows: Vec<Vec<Complex64>> =
        serde_json::from_value(value).map_err(|e| CliError::invalid("ics", e))?;
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(CliError::invalid(
            "ics",
            format!("expected {k} rows of {k} values"),
        ));
    }
    Ok(InitialData::Rows(rows))
}

fn parse_rgrid(source: Option<Source>, shrink: f64) -> CliResult<Vec<f64>> {
    let grid = match source {
        None => RadialGrid::geometric(0.5, DEFAULT_RMAX, 16, shrink),
        Some(Source::Config(v, _)) if v.is_array() => {
            let radii: Vec<f64> =
                serde_json::from_value(v).map_err(|e| CliError::invalid("rgrid", e))?;
            RadialGrid::new(radii, shrink)
        }
        Some(Source::Flag(s)) | Some(Source::Config(Value::String(s), _)) => {
            if let Some(rest) = s.strip_prefix("geometric:") {
                let parts: Vec<&str> = rest.split(':').collect();
                let [lo, hi, count] = parts[..] else {
                    return Err(CliError::invalid(
                        "rgrid",
                        "expected geometric:RMIN:RMAX:COUNT",
                    ));
                };
                let num = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::invalid("rgrid", e))
                };
                let count = count
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| CliError::invalid("rgrid", e))?;
                RadialGrid::geometric(num(lo)?, num(hi)?, count, shrink)
            } else {
                let radii = s
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::invalid("rgrid", e))?;
                RadialGrid::new(radii, shrink)
            }
        }
        Some(Source::Config(v, _)) => {
            return Err(CliError::invalid("rgrid", format!("unsupported value {v}")))
        }
    };
    Ok(grid.field("rgrid")?.radii().to_vec())
}

fn parse_bell_args(source: Source) -> CliResult<BellInput> {
    let text = match source {
        Source::Flag(s) | Source::Config(Value::String(s), _) => s,
        Source::Config(v, _) => {
            if let Ok(ints) = serde_json::from_value::<Vec<i128>>(v.clone()) {
                return Ok(BellInput::Integers(ints));
            }
            return serde_json::from_value(v)
                .map(BellInput::Complex)
                .map_err(|e| CliError::invalid("args", e));
        }
    };
    let items: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if let Ok(ints) = items
        .iter()
        .map(|t| t.parse::<i128>())
        .collect::<Result<Vec<_>, _>>()
    {
        return Ok(BellInput::Integers(ints));
    }
    let values = items
        .iter()
        .map(|t| parse_complex(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::invalid("args", e))?;
    Ok(BellInput::Complex(values))
}

/// The domain on which a stand-alone coefficient `a` lives.
pub fn coefficient_domain(a: &Expr) -> Domain {
    match a {
        Expr::Example51 { .. } => Domain::RightHalfPlane,
        _ => Domain::Plane,
    }
}

fn check_shrink(b: f64) -> CliResult<f64> {
    if !(b > 0.0 && b < 1.0) {
        return Err(CliError::invalid(
            "shrink_b",
            format!("{b} must lie in (0, 1)"),
        ));
    }
    Ok(b)
}

pub fn resolve(cli: Cli) -> CliResult<RunConfig> {
    let (file, base) = match &cli.config {
        Some(path) => {
            let text = read_file(path)?;
            let file: ConfigFile =
                serde_json::from_str(&text).map_err(|e| CliError::invalid("config", e))?;
            (
                file,
                path.parent().map(Path::to_path_buf).unwrap_or_default(),
            )
        }
        None => (ConfigFile::default(), PathBuf::from(".")),
    };
    let command = cli.command.name();
    if let Some(other) = file.command.as_deref().filter(|c| *c != command) {
        return Err(CliError::invalid(
            "command",
            format!("config is for `{other}`, not `{command}`"),
        ));
    }
    let solver_order = cli
        .solver_order
        .or(file.solver_order)
        .unwrap_or(SolverConfig::default().order);
    SolverConfig {
        order: solver_order,
        ..SolverConfig::default()
    }
    .validate()
    .field("solver_order")?;

    let (plan, out) = match cli.command {
        Command::Bell(args) => {
            let i = required("i", args.i.or(file.i))?;
            let n = required("n", args.n.or(file.n))?;
            if !(1..=i).contains(&n) || i > ldeconf_core::bell::MAX_BELL_INDEX {
                return Err(CliError::invalid(
                    "n",
                    format!("need 1 <= n <= i <= {}", ldeconf_core::bell::MAX_BELL_INDEX),
                ));
            }
            let values = parse_bell_args(required("args", pick(args.args, file.args, &base))?)?;
            let len = match &values {
                BellInput::Integers(v) => v.len(),
                BellInput::Complex(v) => v.len(),
            };
            if len < i - n + 1 {
                return Err(CliError::invalid(
                    "args",
                    format!("B_{{{i},{n}}} needs {} arguments, got {len}", i - n + 1),
                ));
            }
            (Plan::Bell { i, n, args: values }, None)
        }
        Command::Transform(args) => {
            let map = parse_map(required("map", pick(args.map, file.map, &base))?)?;
            let ode = parse_ode(required("ode", pick(args.ode, file.ode, &base))?)?;
            if !ode.domain.admits(&map) {
                return Err(CliError::invalid(
                    "map",
                    format!(
                        "the image of the {} map is not inside the equation domain",
                        map.name()
                    ),
                ));
            }
            let points = parse_points(pick(args.points, file.points, &base))?;
            (Plan::Transform { map, ode, points }, args.out.or(file.out))
        }
        Command::Recover(args) => {
            let ode = parse_ode(required("ode", pick(args.ode, file.ode, &base))?)?;
            let ics = parse_ics(pick(args.ics, file.ics, &base), ode.order)?;
            let points = parse_points(pick(args.points, file.points, &base))?;
            if let Some(z) = points.iter().find(|z| !ode.domain.contains(**z)) {
                return Err(CliError::invalid(
                    "points",
                    format!("{z} is outside the equation domain"),
                ));
            }
            (Plan::Recover { ode, ics, points }, args.out.or(file.out))
        }
        Command::Basis(args) => {
            let a: Expr = serde_json::from_value(json_input(
                "a",
                required("a", pick(args.a, file.a, &base))?,
            )?)
            .map_err(|e| CliError::invalid("a", e))?;
            a.validate().field("a")?;
            let k = required("k", args.k.or(file.k))?;
            if !(2..=12).contains(&k) {
                return Err(CliError::invalid("k", format!("{k} must lie in 2..=12")));
            }
            let points = parse_points(file.points.map(|v| Source::Config(v, base.clone())))?;
            (Plan::Basis { a, k, points }, args.out.or(file.out))
        }
        Command::Oscillate(args) => {
            let map = parse_map(required("map", pick(args.map, file.map, &base))?)?;
            let ode = parse_ode(required("ode", pick(args.ode, file.ode, &base))?)?;
            if !ode.domain.admits(&map) {
                return Err(CliError::invalid(
                    "map",
                    format!(
                        "the image of the {} map is not inside the equation domain",
                        map.name()
                    ),
                ));
            }
            let ics = parse_ics(pick(args.ics, file.ics, &base), ode.order)?;
            let shrink_b = check_shrink(args.shrink_b.or(file.shrink_b).unwrap_or(DEFAULT_SHRINK))?;
            let radii = parse_rgrid(pick(args.rgrid, file.rgrid, &base), shrink_b)?;
            (
                Plan::Oscillate {
                    map,
                    ode,
                    ics,
                    radii,
                    shrink_b,
                },
                args.out.or(file.out),
            )
        }
        Command::Example(args) => {
            let name = required("name", args.name.or(file.name))?;
            if !EXAMPLE_NAMES.contains(&name.as_str()) {
                return Err(CliError::invalid(
                    "name",
                    format!(
                        "unknown example `{name}` (expected one of {})",
                        EXAMPLE_NAMES.join(", ")
                    ),
                ));
            }
            let alpha = args.alpha.or(file.alpha).unwrap_or(1.5);
            if !(alpha > 0.0 && alpha < 2.0) {
                return Err(CliError::invalid(
                    "alpha",
                    format!("{alpha} must lie in (0, 2)"),
                ));
            }
            let rmax = args.rmax.or(file.rmax).unwrap_or(DEFAULT_RMAX);
            if !(rmax > 0.6 && rmax <= 0.999) {
                return Err(CliError::invalid(
                    "rmax",
                    format!("{rmax} must lie in (0.6, 0.999]"),
                ));
            }
            let shrink_b = check_shrink(file.shrink_b.unwrap_or(DEFAULT_SHRINK))?;
            (
                Plan::Example {
                    name,
                    alpha,
                    rmax,
                    shrink_b,
                },
                args.out.or(file.out),
            )
        }
    };
    Ok(RunConfig {
        plan,
        solver_order,
        out,
        dry_run: cli.dry_run,
    })
}
