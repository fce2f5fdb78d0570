use std::process::{Command, Output};

fn gencoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gencoh"))
        .args(args)
        .env_remove("OSC_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn poly_legendre_table() {
    let out = gencoh(&["poly", "--family", "legendre", "--n", "3", "--grid", "-1:1:5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("x,psi_0,psi_1,psi_2,psi_3\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    let last = &rows[4];
    assert_eq!(last[0], 1.0);
    assert!((last[2] - 3f64.sqrt()).abs() < 1e-14);
}

#[test]
fn poly_chebyshev_constant_column() {
    let out = gencoh(&["poly", "--family", "chebyshev", "--n", "0", "--grid", "0:0:2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "x,psi_0\n0,1\n0,1\n");
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["poly", "--family", "laguerre", "--alpha", "-2", "--n", "2", "--grid", "0:1:3"][..],
        &["poly", "--family", "jacobi", "--n", "2", "--grid", "0:1:3"],
        &["poly", "--family", "hermite", "--n", "2", "--grid", "0:1:1"],
        &["poly", "--family", "hermite", "--alpha", "1", "--n", "2", "--grid", "0:1:3"],
        &["coherent", "--family", "hermite", "--z", "1+2j"],
        &["coherent", "--family", "hermite", "--z", "1 + 2i"],
        &["verify", "--suite", "theorem2", "--tol", "-1"],
        &["verify", "--suite", "theorem2", "--dim", "3"],
    ] {
        let out = gencoh(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn coherent_legendre_coefficients() {
    let out = gencoh(&["coherent", "--family", "legendre", "--z", "0.3+0i", "--mode", "coeffs", "--dim", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 32);
    // S = ₂F₁(1/2, 3/2; 1; 0.18), summed here term by term
    let mut s = 0.0;
    let mut term = 1.0;
    for n in 0..200 {
        s += term;
        let nf = n as f64;
        term *= (0.5 + nf) * (1.5 + nf) / ((1.0 + nf) * (1.0 + nf)) * 0.18;
    }
    assert!((rows[0][1] - 1.0 / s.sqrt()).abs() < 1e-14);
}

#[test]
fn coherent_outside_domain_names_bound() {
    let out = gencoh(&["coherent", "--family", "legendre", "--z", "0.8+0i"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("1/√2"), "{err}");
}

#[test]
fn coherent_hermite_poisson_weights() {
    let out = gencoh(&["coherent", "--family", "hermite", "--z", "1+0i", "--mode", "coeffs"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let mut fact = 1.0f64;
    for (n, row) in rows.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        assert!((row[1] - (-0.5f64).exp() / fact.sqrt()).abs() < 1e-15, "n={n}");
        assert_eq!(row[2], 0.0);
    }
}

#[test]
fn coherent_wave_columns_agree() {
    for (family, z, extra) in [
        ("laguerre", "0.7-0.4i", vec!["--alpha", "1.5"]),
        ("legendre", "0.2+0.3i", vec![]),
        ("chebyshev", "-0.3+0.2i", vec![]),
        ("hermite", "1.2+0.7i", vec![]),
    ] {
        let mut args = vec!["coherent", "--family", family, "--z", z, "--mode", "wave"];
        args.extend(extra);
        let out = gencoh(&args);
        assert_eq!(out.status.code(), Some(0), "{family}");
        let text = stdout(&out);
        assert!(text.starts_with("x,series_re,series_im,closed_re,closed_im,abs_diff\n"));
        for row in csv_rows(&text) {
            let scale = row[1].hypot(row[2]);
            assert!(row[5] <= 1e-10 * scale.max(1.0), "{family}: {row:?}");
        }
    }
}

#[test]
fn verify_theorem2_single_report() {
    let out = gencoh(&["verify", "--suite", "theorem2", "--family", "chebyshev", "--dim", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["status"], "pass");
    assert_eq!(reports[0]["family"], "chebyshev");
}

#[test]
fn verify_unity_reports_d_vector() {
    let out = gencoh(&["verify", "--suite", "unity", "--family", "laguerre", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let report = &reports[0];
    assert_eq!(report["details"]["d"].as_array().unwrap().len(), 9);
    assert!(report["details"]["spread"].as_f64().unwrap() < 1e-6);
    assert_eq!(report["params"]["alpha"], 1.0);
}

#[test]
fn verify_all_passes() {
    let out = gencoh(&["verify", "--suite", "all", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for r in reports.as_array().unwrap() {
        assert_ne!(r["status"], "fail", "{r}");
    }
}

#[test]
fn failed_assertion_exits_1() {
    let out = gencoh(&["verify", "--suite", "theorem2", "--family", "hermite", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["status"], "fail");
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let args = ["coherent", "--family", "laguerre", "--alpha", "0.5", "--z", "1-1i", "--mode", "wave", "--format", "json"];
    let first = gencoh(&args);
    let second = gencoh(&args);
    assert_eq!(first.stdout, second.stdout);
    let path = std::env::temp_dir().join(format!("gencoh-cli-test-{}.json", std::process::id()));
    let mut with_out: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap().to_string();
    with_out.extend(["--out", &path_str]);
    let out = gencoh(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first.stdout);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn max_dim_env_caps_truncation() {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_gencoh"))
            .args(args)
            .env("OSC_MAX_DIM", "16")
            .output()
            .unwrap()
    };
    let out = run(&["coherent", "--family", "hermite", "--z", "1+0i", "--dim", "32"]);
    assert_eq!(out.status.code(), Some(2));
    // the automatic truncation cannot reach the tail target within 16 terms
    let out = run(&["coherent", "--family", "legendre", "--z", "0.6+0i"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["coherent", "--family", "hermite", "--z", "0.1+0i"]);
    assert_eq!(out.status.code(), Some(0));
}
