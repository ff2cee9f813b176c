//! One executor per subcommand.

use std::fmt::Write as _;
use std::path::Path;

use ldeconf_core::basis::{base_point, power_basis};
use ldeconf_core::bell::{bell_polynomial, bell_polynomial_sum};
use ldeconf_core::kim::kim_recover;
use ldeconf_core::oscillation::{
    theorem2_report, CoefficientContext, OscillationReport, RadialGrid,
};
use ldeconf_core::presets::{exponential_sum_problem, sector_power_problem};
use ldeconf_core::solve::{SolutionEvaluator, SolverConfig};
use ldeconf_core::transform::{pushforward_solution, second_order_coefficient, transform_ode};
use ldeconf_core::{ConformalMapSpec, Domain, Expr, Func, LinearODE};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::{coefficient_domain, BellInput, InitialData, Plan, RunConfig};
use crate::error::{CliError, CliResult};
use crate::parse::format_complex;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Roots of the characteristic polynomial used by the `expsum52` preset.
const EXPSUM_ROOTS: [Complex64; 3] = [
    Complex64::new(2.0, 0.0),
    Complex64::new(-1.0, 0.3),
    Complex64::new(-1.0, -0.3),
];

/// A rectangular result with named columns.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
    summary: Map<String, Value>,
}

impl Table {
    fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Number(n) => format!("{:e}", n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(s) => s.clone(),
                    Value::Null => "NaN".into(),
                    other => other.to_string(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows, "summary": self.summary });
        serde_json::to_string_pretty(&doc).expect("tables hold plain JSON values")
    }
}

fn complex_columns(name: &str) -> [String; 2] {
    [format!("{name}_re"), format!("{name}_im")]
}

fn push_complex(row: &mut Vec<Value>, z: Complex64) {
    row.push(json!(z.re));
    row.push(json!(z.im));
}

fn relative_error(got: Complex64, expected: Complex64) -> f64 {
    (got - expected).norm() / expected.norm().max(1.0)
}

enum Output {
    Table(Table),
    Report(OscillationReport),
}

impl Output {
    fn csv(&self) -> String {
        match self {
            Self::Table(t) => t.to_csv(),
            Self::Report(r) => r.to_csv(),
        }
    }

    fn json(&self) -> CliResult<String> {
        match self {
            Self::Table(t) => Ok(t.to_json()),
            Self::Report(r) => Ok(r.to_json()?),
        }
    }

    fn summary(&self) -> String {
        match self {
            Self::Table(t) => t
                .summary
                .iter()
                .map(|(k, v)| format!("{k} {v}"))
                .collect::<Vec<_>>()
                .join(", "),
            Self::Report(r) => {
                let e = &r.exponents;
                let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
                let lhs: Vec<String> = e
                    .integrals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| format!("I_{j} {}", fmt(*v)))
                    .collect();
                format!(
                    "exponents on r in [{:.4}, {:.4}]: {}, rhs total {}",
                    r.fit_window.0,
                    r.fit_window.1,
                    lhs.join(", "),
                    fmt(e.rhs_total)
                )
            }
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `<stem>.csv`, `<stem>.json`, `run.json` and `reproduce.sh` into `dir`.
fn emit(run: &RunConfig, stem: &str, output: &Output) -> CliResult<()> {
    let Some(dir) = &run.out else {
        print!("{}", output.csv());
        return Ok(());
    };
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let run_json = serde_json::to_string_pretty(run).expect("plans serialize");
    let command = serde_json::to_value(&run.plan).expect("plans serialize")["command"]
        .as_str()
        .unwrap_or_default()
        .to_string();
    let script = format!(
        "#!/bin/sh\ncd \"$(dirname \"$0\")\" && exec ldeconf {command} --config run.json --out .\n"
    );
    let files = [
        (format!("{stem}.csv"), output.csv()),
        (format!("{stem}.json"), output.json()? + "\n"),
        ("run.json".to_string(), run_json + "\n"),
        ("reproduce.sh".to_string(), script),
    ];
    for (name, contents) in &files {
        write_file(&dir.join(name), contents)?;
    }
    println!(
        "wrote {stem}.csv, {stem}.json, run.json, reproduce.sh to {}",
        dir.display()
    );
    let summary = output.summary();
    if !summary.is_empty() {
        println!("{summary}");
    }
    Ok(())
}

pub fn execute(run: &RunConfig) -> CliResult<()> {
    if run.dry_run {
        println!(
            "{}",
            serde_json::to_string_pretty(run).expect("plans serialize")
        );
        return Ok(());
    }
    let solver = run.solver();
    match &run.plan {
        Plan::Bell { i, n, args } => {
            let value = match args {
                BellInput::Integers(z) => bell_polynomial_sum(*i, *n, &z[..i - n + 1])?.to_string(),
                BellInput::Complex(z) => format_complex(bell_polynomial(*i, *n, &z[..i - n + 1])?),
            };
            println!("{value}");
            Ok(())
        }
        Plan::Transform { map, ode, points } => emit(
            run,
            "transform",
            &Output::Table(transform_table(map, &ode.build()?, points)?),
        ),
        Plan::Recover { ode, ics, points } => emit(
            run,
            "recover",
            &Output::Table(recover_table(&ode.build()?, ics, points, solver)?),
        ),
        Plan::Basis { a, k, points } => emit(
            run,
            "basis",
            &Output::Table(basis_table(a, *k, points, solver)?),
        ),
        Plan::Oscillate {
            map,
            ode,
            ics,
            radii,
            shrink_b,
        } => {
            let ode = ode.build()?;
            let grid = RadialGrid::new(radii.clone(), *shrink_b)?;
            let base = pushed_basis(&ode, map, ics, solver)?;
            let report = theorem2_report(
                &base,
                &CoefficientContext::Pullback { ode, map: *map },
                &grid,
            )?;
            emit(run, "report", &Output::Report(report))
        }
        Plan::Example {
            name,
            alpha,
            rmax,
            shrink_b,
        } => {
            let grid = || RadialGrid::geometric(0.5, *rmax, 16, *shrink_b);
            let output = match name.as_str() {
                "petal51" => Output::Report(sector_power_problem(*alpha)?.report(&grid()?)?),
                "expsum52" => {
                    let map = ConformalMapSpec::Sector {
                        alpha: *alpha,
                        phi: 0.0,
                    };
                    Output::Report(exponential_sum_problem(map, &EXPSUM_ROOTS)?.report(&grid()?)?)
                }
                "schwarz2" => Output::Table(schwarz_table(*alpha)?),
                _ => Output::Table(kim_roundtrip_table(*alpha, solver)?),
            };
            let stem = match output {
                Output::Report(_) => "report",
                Output::Table(_) => name.as_str(),
            };
            emit(run, &stem.replace('-', "_"), &output)
        }
    }
}

/// Coefficients `b_j(z)` of the transformed equation next to `a_j(T(z))`.
fn transform_table(
    map: &ConformalMapSpec,
    ode: &LinearODE,
    points: &[Complex64],
) -> CliResult<Table> {
    let k = ode.order();
    let transformed = transform_ode(ode, map)?;
    let mut columns: Vec<String> = ["z", "w"].iter().flat_map(|n| complex_columns(n)).collect();
    for j in 0..k - 1 {
        columns.extend(complex_columns(&format!("b{j}")));
        columns.extend(complex_columns(&format!("a{j}_at_w")));
    }
    if k == 2 {
        columns.extend(complex_columns("b0_formula"));
        columns.push("b0_rel_err".into());
    }
    let mut table = Table::new(columns);
    let mut worst: f64 = 0.0;
    for &z in points {
        let w = map.eval(z)?;
        let mut row = Vec::new();
        push_complex(&mut row, z);
        push_complex(&mut row, w);
        for j in 0..k - 1 {
            push_complex(&mut row, transformed.coeff(j).value_at(z)?);
            push_complex(&mut row, ode.coeff(j).value_at(w)?);
        }
        if k == 2 {
            let formula = second_order_coefficient(ode.coeff(0).as_ref(), map, z)?;
            let err = relative_error(transformed.coeff(0).value_at(z)?, formula);
            worst = worst.max(err);
            push_complex(&mut row, formula);
            row.push(json!(err));
        }
        table.rows.push(row);
    }
    if k == 2 {
        table.summary.insert("max_b0_rel_err".into(), json!(worst));
    }
    Ok(table)
}

fn solve_rows(
    ode: &LinearODE,
    z0: Complex64,
    ics: &InitialData,
    solver: SolverConfig,
) -> CliResult<Vec<Func>> {
    ics.rows(ode.order())
        .iter()
        .map(|row| Ok(SolutionEvaluator::new(ode.clone(), z0, row, solver)?.shared()))
        .collect()
}

/// Coefficients recovered from a solved basis against the given ones.
fn recover_table(
    ode: &LinearODE,
    ics: &InitialData,
    points: &[Complex64],
    solver: SolverConfig,
) -> CliResult<Table> {
    let k = ode.order();
    let basis = solve_rows(ode, base_point(ode.domain()), ics, solver)?;
    let mut columns: Vec<String> = complex_columns("z").into();
    for j in 0..k - 1 {
        columns.extend(complex_columns(&format!("b{j}_recovered")));
        columns.extend(complex_columns(&format!("b{j}_given")));
        columns.push(format!("b{j}_rel_err"));
    }
    let mut table = Table::new(columns);
    let mut worst: f64 = 0.0;
    for &z in points {
        let recovered = kim_recover(&basis, z)?;
        let mut row = Vec::new();
        push_complex(&mut row, z);
        for (j, got) in recovered.into_iter().enumerate() {
            let given = ode.coeff(j).value_at(z)?;
            let err = relative_error(got, given);
            worst = worst.max(err);
            push_complex(&mut row, got);
            push_complex(&mut row, given);
            row.push(json!(err));
        }
        table.rows.push(row);
    }
    table.summary.insert("max_rel_err".into(), json!(worst));
    Ok(table)
}

/// Coefficients of the order-`k` equation of the power products and the Wronskian identity.
fn basis_table(a: &Expr, k: usize, points: &[Complex64], solver: SolverConfig) -> CliResult<Table> {
    let domain = coefficient_domain(a);
    let z0 = base_point(domain);
    // disc samples are centred at the base point
    let points: Vec<Complex64> = points.iter().map(|z| z + z0).collect();
    let basis = power_basis(
        a.clone().into_function(domain)?,
        k,
        z0,
        [(ONE, ZERO), (ZERO, ONE)],
        solver,
    )?;
    let mut columns: Vec<String> = complex_columns("z").into();
    for j in 0..k - 1 {
        columns.extend(complex_columns(&format!("b{j}")));
    }
    columns.extend(complex_columns("wronskian"));
    columns.extend(complex_columns("wronskian_identity"));
    columns.push("wronskian_rel_err".into());
    let mut table = Table::new(columns);
    let mut worst: f64 = 0.0;
    for z in points {
        let mut row = Vec::new();
        push_complex(&mut row, z);
        for b in basis.ode.coefficient_values(z)? {
            push_complex(&mut row, b);
        }
        let (lhs, rhs) = basis.wronskian_identity(z)?;
        let err = (lhs - rhs).norm() / rhs.norm().max(1e-300);
        worst = worst.max(err);
        push_complex(&mut row, lhs);
        push_complex(&mut row, rhs);
        row.push(json!(err));
        table.rows.push(row);
    }
    table
        .summary
        .insert("max_wronskian_rel_err".into(), json!(worst));
    Ok(table)
}

/// Solutions with initial data at `T(0)`, pushed forward to the disc.
fn pushed_basis(
    ode: &LinearODE,
    map: &ConformalMapSpec,
    ics: &InitialData,
    solver: SolverConfig,
) -> CliResult<Vec<Func>> {
    let k = ode.order();
    solve_rows(ode, map.eval(ZERO)?, ics, solver)?
        .into_iter()
        .map(|f| Ok(pushforward_solution(f, map, k)?))
        .collect()
}

fn preset_points() -> Vec<Complex64> {
    [
        (0.0, 0.0),
        (0.3, 0.0),
        (0.0, 0.3),
        (-0.5, 0.2),
        (0.6, -0.4),
        (0.85, 0.1),
    ]
    .iter()
    .map(|&(x, y)| Complex64::new(x, y))
    .collect()
}

fn preset_maps(alpha: f64) -> Vec<ConformalMapSpec> {
    vec![
        ConformalMapSpec::Mobius {
            a: Complex64::new(1.0, 0.5),
            b: Complex64::new(0.2, 0.0),
            c: Complex64::new(0.3, -0.2),
            d: Complex64::new(1.0, 0.4),
        },
        ConformalMapSpec::cayley(),
        ConformalMapSpec::StolzPetal {
            alpha: 0.5,
            zeta: ONE,
        },
        ConformalMapSpec::Horodisc {
            zeta: Complex64::new(0.5, 0.0),
        },
        ConformalMapSpec::Sector { alpha, phi: 0.0 },
        ConformalMapSpec::Strip {
            alpha: 1.0,
            phi: 0.0,
        },
    ]
}

/// `f'' + a f = 0` with polynomial `a` through every catalog map, against `(a∘T)(T')² + S_T/2`.
fn schwarz_table(alpha: f64) -> CliResult<Table> {
    let a = Expr::Polynomial {
        coeffs: vec![ONE, Complex64::new(0.0, 0.5), Complex64::new(0.25, 0.0)],
    };
    let ode = LinearODE::from_exprs(2, vec![a], Domain::Plane)?;
    let mut columns = vec!["map".to_string()];
    columns.extend(complex_columns("z"));
    columns.extend(complex_columns("b0"));
    columns.extend(complex_columns("b0_formula"));
    columns.push("rel_err".into());
    let mut table = Table::new(columns);
    let mut worst: f64 = 0.0;
    for map in preset_maps(alpha) {
        map.validate()?;
        let transformed = transform_ode(&ode, &map)?;
        for z in preset_points() {
            let b0 = transformed.coeff(0).value_at(z)?;
            let formula = second_order_coefficient(ode.coeff(0).as_ref(), &map, z)?;
            let err = relative_error(b0, formula);
            worst = worst.max(err);
            let mut row = vec![json!(map.name())];
            push_complex(&mut row, z);
            push_complex(&mut row, b0);
            push_complex(&mut row, formula);
            row.push(json!(err));
            table.rows.push(row);
        }
    }
    table.summary.insert("max_rel_err".into(), json!(worst));
    Ok(table)
}

/// Solve a third-order equation, push the basis through a map, and recover the
/// transformed coefficients from the pushed-forward basis.
fn kim_roundtrip_table(alpha: f64, solver: SolverConfig) -> CliResult<Table> {
    let ode = LinearODE::from_exprs(
        3,
        vec![
            Expr::Polynomial {
                coeffs: vec![ONE, Complex64::new(0.5, 0.5), Complex64::new(0.2, 0.0)],
            },
            Expr::Polynomial {
                coeffs: vec![Complex64::new(-0.3, 1.0), Complex64::new(0.0, 0.4)],
            },
        ],
        Domain::Plane,
    )?;
    let mut columns = vec!["map".to_string()];
    columns.extend(complex_columns("z"));
    for j in 0..2 {
        columns.extend(complex_columns(&format!("b{j}_recovered")));
        columns.extend(complex_columns(&format!("b{j}_transformed")));
        columns.push(format!("b{j}_rel_err"));
    }
    let mut table = Table::new(columns);
    let mut worst: f64 = 0.0;
    for map in [
        ConformalMapSpec::identity(),
        ConformalMapSpec::Sector { alpha, phi: 0.0 },
    ] {
        let transformed = transform_ode(&ode, &map)?;
        let basis = pushed_basis(&ode, &map, &InitialData::Canonical, solver)?;
        for z in preset_points().into_iter().filter(|z| z.norm() <= 0.6) {
            let recovered = kim_recover(&basis, z)?;
            let mut row = vec![json!(map.name())];
            push_complex(&mut row, z);
            for (j, got) in recovered.into_iter().enumerate() {
                let expected = transformed.coeff(j).value_at(z)?;
                let err = relative_error(got, expected);
                worst = worst.max(err);
                push_complex(&mut row, got);
                push_complex(&mut row, expected);
                row.push(json!(err));
            }
            table.rows.push(row);
        }
    }
    table.summary.insert("max_rel_err".into(), json!(worst));
    Ok(table)
}
