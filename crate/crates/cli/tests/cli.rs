use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CONST2: &str =
    r#"{"order":2,"coeffs":[{"family":"constant","value":[2,1]}],"domain":"plane"}"#;
const IDENTITY_MOBIUS: &str = r#"{"kind":"mobius","a":[1,0],"b":[0,0],"c":[0,0],"d":[1,0]}"#;
const STIFF2: &str =
    r#"{"order":2,"coeffs":[{"family":"constant","value":[100,0]}],"domain":"plane"}"#;

fn ldeconf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldeconf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

/// Stirling numbers of the second kind by `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
fn stirling2(n: usize, k: usize) -> i128 {
    let mut table = vec![vec![0i128; k + 1]; n + 1];
    table[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            table[i][j] = j as i128 * table[i - 1][j] + table[i - 1][j - 1];
        }
    }
    table[n][k]
}

#[test]
fn bell_of_ones_counts_set_partitions() {
    for (i, n) in [(4, 2), (6, 3), (10, 4)] {
        let ones = vec!["1"; i - n + 1].join(",");
        let out = ldeconf(&[
            "bell",
            "--i",
            &i.to_string(),
            "--n",
            &n.to_string(),
            "--args",
            &ones,
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(stdout(&out).trim(), stirling2(i, n).to_string());
    }
}

#[test]
fn bell_with_complex_arguments() {
    // B_{3,2}(z1, z2) = 3 z1 z2
    let out = ldeconf(&["bell", "--i", "3", "--n", "2", "--args", "1+i,-2i"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "6-6i");
}

#[test]
fn dry_run_prints_the_plan_without_writing() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let out = ldeconf(&[
        "oscillate",
        "--map",
        "identity",
        "--ode",
        STIFF2,
        "--rgrid",
        "geometric:0.5:0.9:6",
        "--out",
        out_dir.to_str().unwrap(),
        "--dry-run",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let plan: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(plan["command"], "oscillate");
    assert_eq!(plan["rgrid"].as_array().unwrap().len(), 6);
    assert_eq!(plan["shrink_b"], 0.5);
    assert_eq!(plan["ics"], "canonical");
    assert!(!out_dir.exists());
}

#[test]
fn validation_errors_exit_with_2_and_name_the_field() {
    let cases: [(&[&str], &str); 5] = [
        (
            &[
                "oscillate",
                "--map",
                "identity",
                "--ode",
                STIFF2,
                "--shrink-b",
                "1.5",
            ],
            "shrink_b",
        ),
        (&["transform", "--map", "identity"], "ode"),
        (&["example", "--name", "nope"], "name"),
        (
            &[
                "transform",
                "--map",
                r#"{"kind":"sector","alpha":2.5,"phi":0}"#,
                "--ode",
                CONST2,
            ],
            "map",
        ),
        (
            &[
                "basis",
                "--a",
                r#"{"family":"constant","value":[1,0]}"#,
                "--k",
                "1",
            ],
            "k",
        ),
    ];
    for (args, field) in cases {
        let out = ldeconf(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(
            stderr(&out).contains(&format!("`{field}`")),
            "{args:?}: {}",
            stderr(&out)
        );
    }
    let out = ldeconf(&["bell", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_is_a_validation_error() {
    let out = ldeconf(&[
        "transform",
        "--map",
        "identity",
        "--ode",
        "/nonexistent/ode.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/ode.json"));
}

#[test]
fn numeric_failures_exit_with_1() {
    // two equal rows of initial data give a dependent basis
    let out = ldeconf(&[
        "recover",
        "--ode",
        CONST2,
        "--ics",
        "[[[1,0],[0,0]],[[1,0],[0,0]]]",
        "--points",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("singular"), "{}", stderr(&out));
}

#[test]
fn identity_map_echoes_the_coefficient() {
    let dir = TempDir::new().unwrap();
    let ode_path = dir.path().join("const2.json");
    std::fs::write(&ode_path, CONST2).unwrap();
    let out = ldeconf(&[
        "transform",
        "--map",
        IDENTITY_MOBIUS,
        "--ode",
        ode_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("transform.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let b: (f64, f64) = (
            row[col("b0_re")].parse().unwrap(),
            row[col("b0_im")].parse().unwrap(),
        );
        assert!(
            (b.0 - 2.0).abs() < 1e-14 && (b.1 - 1.0).abs() < 1e-14,
            "{b:?}"
        );
    }
    for name in ["transform.json", "run.json", "reproduce.sh"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn oscillate_output_is_byte_identical_and_reproducible_from_run_json() {
    let dir = TempDir::new().unwrap();
    let (first, second, third) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let args = |out: &Path| {
        let out = out.to_str().unwrap().to_string();
        vec![
            "oscillate",
            "--map",
            "identity",
            "--ode",
            STIFF2,
            "--rgrid",
            "geometric:0.5:0.95:6",
        ]
        .into_iter()
        .map(String::from)
        .chain(["--out".into(), out])
        .collect::<Vec<_>>()
    };
    for out_dir in [&first, &second] {
        let argv = args(out_dir);
        let out = ldeconf(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let csv = std::fs::read(first.join("report.csv")).unwrap();
    assert_eq!(csv, std::fs::read(second.join("report.csv")).unwrap());
    assert_eq!(
        std::fs::read(first.join("report.json")).unwrap(),
        std::fs::read(second.join("report.json")).unwrap()
    );

    let config = first.join("run.json");
    let out = ldeconf(&[
        "oscillate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        third.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(csv, std::fs::read(third.join("report.csv")).unwrap());

    // sin(10z)/10, cos(10z) and their sum have 7, 6 and 6 zeros in |z| < 0.975
    let report: Value =
        serde_json::from_slice(&std::fs::read(first.join("report.json")).unwrap()).unwrap();
    let zeros: Vec<u64> = report["counting"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["zeros"].as_u64().unwrap())
        .collect();
    assert_eq!(zeros, [7, 6, 6]);
    assert_eq!(report["counting"][0]["origin_order"], 1);
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("basis.json");
    std::fs::write(
        &config,
        r#"{"a": {"family":"polynomial","coeffs":[[1,0],[0,1]]}, "k": 3, "points": [[0.1, 0.2]]}"#,
    )
    .unwrap();
    let base = ["basis", "--config", config.to_str().unwrap()];
    let from_file = ldeconf(&base);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    let overridden = ldeconf(&[&base[..], &["--k", "5"]].concat());
    assert!(overridden.status.success(), "{}", stderr(&overridden));
    let columns = |o: &Output| {
        stdout(o)
            .lines()
            .next()
            .unwrap()
            .split(',')
            .filter(|c| c.starts_with('b'))
            .count()
    };
    // two columns per coefficient b_0..b_{k-2}
    assert_eq!(columns(&from_file), 4);
    assert_eq!(columns(&overridden), 8);
    assert_eq!(stdout(&from_file).lines().count(), 2);

    std::fs::write(&config, r#"{"k": 3, "colour": "red"}"#).unwrap();
    let out = ldeconf(&base);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("colour"));
}

#[test]
fn schwarz_and_kim_presets_are_accurate() {
    for name in ["schwarz2", "kim-roundtrip"] {
        let dir = TempDir::new().unwrap();
        let out = ldeconf(&[
            "example",
            "--name",
            name,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let stem = name.replace('-', "_");
        let doc: Value = serde_json::from_slice(
            &std::fs::read(dir.path().join(format!("{stem}.json"))).unwrap(),
        )
        .unwrap();
        let err = doc["summary"]["max_rel_err"].as_f64().unwrap();
        assert!(err < 1e-8, "{name}: {err}");
    }
}
