use std::path::Path;
use std::process::Command;

use ns_apriori::cli::{run_with, EXIT_DIVERGED, EXIT_INVALID, EXIT_OK, EXIT_VERIFY_FAILED};
use ns_apriori::function_spaces::io::{write_scalar, FieldFile};
use ns_apriori::function_spaces::{Grid, ScalarField};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut full = vec!["ns-apriori"];
    full.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn value(table: &str, key: &str) -> f64 {
    table
        .lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("{key} not in output"))
}

#[test]
fn exponents_table() {
    let (code, out, _) = run(&["exponents", "--alpha", "0.5", "--q", "6"]);
    assert_eq!(code, EXIT_OK);
    assert!((value(&out, "B") - 7.0).abs() < 1e-12);
    assert!((value(&out, "a1") - 0.833333).abs() < 1e-6);
    for key in ["omega_0", "omega_alpha", "omega_1", "omega_1alpha", "a2", "A_stated", "A_young"] {
        value(&out, key);
    }
    let (code, out, _) = run(&["exponents", "--alpha", "0.5", "--q", "6", "--l", "2.5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value(&out, "omega(2.5)"), 1.0);
}

#[test]
fn exponents_out_of_range() {
    let (code, _, err) = run(&["exponents", "--alpha", "1.5"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("alpha"));
    assert_eq!(run(&["exponents", "--q", "0.5"]).0, EXIT_INVALID);
    assert_eq!(run(&["exponents", "--l", "3"]).0, EXIT_INVALID);
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(run(&[]).0, EXIT_INVALID);
    assert_eq!(run(&["frobnicate"]).0, EXIT_INVALID);
    assert_eq!(run(&["young", "--seed", "minus-one"]).0, EXIT_INVALID);
}

#[test]
fn help_documents_columns_and_defaults() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("grid.n = 17") && out.contains("NS_APRIORI_OUT"));
    let (_, out, _) = run(&["verify-estimate", "--help"]);
    for col in "amplitude,f_alpha,v_2a,gradp_a,v_w12,v_l6,nlterm_a,g_alpha,B,Q,C_nl,C_schauder,converged"
        .split(',')
    {
        assert!(out.contains(col), "{col}");
    }
    let (_, out, _) = run(&["mms", "--help"]);
    assert!(out.contains("velocity_error") && out.contains("picard_iterations"));
}

fn write_field(dir: &Path, name: &str, f: impl Fn(f64, f64, f64) -> f64) -> String {
    let path = dir.join(name);
    write_scalar(&path, &ScalarField::from_fn(Grid::new(9).unwrap(), f)).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn norms_of_a_constant_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_field(dir.path(), "c.nsfld", |_, _, _| 2.5);
    let (code, out, _) = run(&["norms", &path]);
    assert_eq!(code, EXIT_OK);
    let header = out.lines().next().unwrap();
    assert_eq!(
        header,
        "component,sup_0,sup_1,sup_2,holder_0,holder_1,holder_2,c_norm,lq_norm,sobolev_norm"
    );
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r[1], 2.5);
    assert!(r[2..7].iter().all(|&x| x.abs() < 1e-12));
    assert!((r[8] - 2.5).abs() < 1e-12);
}

#[test]
fn norms_of_the_first_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_field(dir.path(), "x.nsfld", |x, _, _| x);
    let (code, out, _) = run(&["norms", &path, "--m", "1", "--alpha", "0.5"]);
    assert_eq!(code, EXIT_OK);
    let r = &csv_rows(&out)[0];
    // sup 1, |grad| sup 1, Holder_0 = sup |x - y| / |x - y|^0.5 = 1, Holder_1 = 0
    assert!((r[1] - 1.0).abs() < 1e-12);
    assert!((r[2] - 1.0).abs() < 1e-12);
    assert!((r[3] - 1.0).abs() < 1e-12);
    assert!(r[4].abs() < 1e-12);
    assert!((r[5] - 2.0).abs() < 1e-12);
}

#[test]
fn norms_rejects_truncated_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_field(dir.path(), "x.nsfld", |x, _, _| x);
    let bytes = std::fs::read(&path).unwrap();
    let cut = dir.path().join("cut.nsfld");
    std::fs::write(&cut, &bytes[..bytes.len() - 8]).unwrap();
    assert_eq!(run(&["norms", cut.to_str().unwrap()]).0, EXIT_INVALID);
    let bad = dir.path().join("bad.nsfld");
    std::fs::write(&bad, b"NSFLD2 9 9 9 1\n").unwrap();
    assert_eq!(run(&["norms", bad.to_str().unwrap()]).0, EXIT_INVALID);
    let missing = dir.path().join("missing.nsfld");
    assert_eq!(run(&["norms", missing.to_str().unwrap()]).0, EXIT_INVALID);
}

#[test]
fn norms_writes_file_with_optional_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_field(dir.path(), "x.nsfld", |x, _, _| x);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run(&["norms", &path, "--output", a.to_str().unwrap()]);
    run(&["norms", &path, "--output", b.to_str().unwrap(), "--no-timestamp"]);
    let (a, b) = (std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
    assert!(a.starts_with("# generated_unix="));
    assert_eq!(a.split_once('\n').unwrap().1, b);
}

fn out_dir(dir: &Path) -> Vec<String> {
    vec![
        "--output-dir".into(),
        dir.to_str().unwrap().into(),
        "--no-timestamp".into(),
    ]
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let extra = out_dir(dir);
    let mut all: Vec<&str> = args.to_vec();
    all.extend(extra.iter().map(String::as_str));
    run(&all)
}

#[test]
fn verify_interp_contracts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_in(dir.path(), &["verify-interp", "--n", "5"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("n >= 9"));

    let small = ["verify-interp", "--n", "9", "--family-size", "8"];
    let (code, out, _) = run_in(dir.path(), &small);
    assert_eq!(code, EXIT_OK, "{out}");
    for l in ["0.000", "0.500", "1.000", "1.500"] {
        assert!(dir.path().join(format!("interp_l{l}_n9.csv")).exists());
        assert!(dir.path().join(format!("interp_l{l}_n17.csv")).exists());
    }
    let csv = std::fs::read_to_string(dir.path().join("interp_l0.500_n9.csv")).unwrap();
    assert!(csv.starts_with("kind,param,seed,l,q,alpha,lhs,norm_2a,norm_q,omega,ratio\n"));
    assert!(csv.lines().last().unwrap().starts_with("C_emp,"));

    let mut tampered = small.to_vec();
    tampered.extend(["--stability-tol", "0"]);
    let (code, out, _) = run_in(dir.path(), &tampered);
    assert_eq!(code, EXIT_VERIFY_FAILED);
    assert!(out.contains("FAIL c_emp_refinement"));
    let summary = std::fs::read_to_string(dir.path().join("interp_summary.csv")).unwrap();
    assert!(summary.starts_with("check,l,value,threshold,pass\n"));
    assert!(summary.contains(",false"));
}

#[test]
fn config_file_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[grid]\nn = 9\n[verify]\nfamily_size = 4\nrefine = false\n").unwrap();
    let (code, _, _) = run_in(dir.path(), &["verify-interp", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(!dir.path().join("interp_l0.000_n17.csv").exists());

    std::fs::write(&cfg, "[grid]\nn = 9\nspacing = 0.1\n").unwrap();
    let (code, _, err) = run_in(dir.path(), &["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("spacing"));

    // schema violations stop before anything is written
    let fresh = tempfile::tempdir().unwrap();
    std::fs::write(&cfg, "[forcing]\nkind = \"vortex\"\n").unwrap();
    let (code, _, _) = run_in(fresh.path(), &["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert_eq!(std::fs::read_dir(fresh.path()).unwrap().count(), 0);
}

#[test]
fn solve_with_zero_forcing_gives_zero_fields() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run_in(dir.path(), &["solve", "--n", "9", "--amplitude", "0"]);
    assert_eq!(code, EXIT_OK);
    for name in ["velocity.nsfld", "pressure.nsfld", "forcing.nsfld"] {
        let f = FieldFile::read(&dir.path().join(name)).unwrap();
        assert_eq!(f.dims, [9, 9, 9]);
        assert!(f.components.iter().flatten().all(|&x| x == 0.0), "{name}");
    }
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,update_sup,residual_sup,div_max\n"));
}

#[test]
fn solve_stokes_and_navier_stokes() {
    let dir = tempfile::tempdir().unwrap();
    for (model, forcing) in [("stokes", "bump"), ("navier-stokes", "trig")] {
        let (code, out, _) = run_in(
            dir.path(),
            &["solve", "--n", "9", "--model", model, "--forcing", forcing],
        );
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("div_max="));
        let v = FieldFile::read(&dir.path().join("velocity.nsfld")).unwrap();
        assert_eq!(v.components.len(), 3);
        assert!(v.components.iter().flatten().any(|&x| x != 0.0));
    }
}

#[test]
fn large_amplitude_exits_with_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_in(dir.path(), &["solve", "--n", "9", "--amplitude", "1e6"]);
    assert_eq!(code, EXIT_DIVERGED);
    assert!(err.contains("diverged"));
}

#[test]
fn mms_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in(dir.path(), &["mms", "--levels", "9,17,33"]);
    assert_eq!(code, EXIT_OK);
    let orders: Vec<f64> = out
        .lines()
        .filter_map(|l| l.strip_prefix("order "))
        .map(|l| l.split(": ").nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(orders.len(), 2);
    assert!(orders.iter().all(|&o| o >= 1.7), "{orders:?}");
    assert!(dir.path().join("mms_navier-stokes.csv").exists());
    assert_eq!(run_in(dir.path(), &["mms", "--levels", "9"]).0, EXIT_INVALID);
    assert_eq!(run_in(dir.path(), &["mms", "--levels", "9,12"]).0, EXIT_INVALID);
}

#[test]
fn verify_estimate_writes_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in(
        dir.path(),
        &["verify-estimate", "--n", "9", "--amplitudes", "0,0.5,1"],
    );
    assert_eq!(code, EXIT_OK, "{out}");
    let csv = std::fs::read_to_string(dir.path().join("estimate.csv")).unwrap();
    assert!(csv.starts_with(ns_apriori::estimate_verify::CSV_HEADER));
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.path().join("estimate_refined.csv").exists());
}

#[test]
fn verify_estimate_flags_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run_in(
        dir.path(),
        &[
            "verify-estimate",
            "--n",
            "9",
            "--amplitudes",
            "1e6",
            "--refine",
            "false",
            "--max-picard",
            "20",
        ],
    );
    assert_eq!(code, EXIT_DIVERGED);
    let csv = std::fs::read_to_string(dir.path().join("estimate.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",false"));
}

#[test]
fn young_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in(dir.path(), &["young"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("-A_young=-5"));
    let csv = std::fs::read_to_string(dir.path().join("young.csv")).unwrap();
    assert!(csv.starts_with("eps,c_closed,c_search\n"));
    assert_eq!(csv.lines().count(), 14);
}

#[test]
fn binary_uses_output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ns-apriori"))
        .args(["young", "--no-timestamp"])
        .env("NS_APRIORI_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(dir.path().join("young.csv").exists());

    let status = Command::new(env!("CARGO_BIN_EXE_ns-apriori"))
        .args(["exponents", "--alpha", "2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INVALID));
}
