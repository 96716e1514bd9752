use std::fs;
use std::process::Command;

use kronbf::sim::{ExperimentKind, Method, SweepParam, DEFAULT_SEED};
use kronbf::Error;
use kronbf_cli::{parse_config, CliError};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kronbf"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn minimal_file_gets_defaults() {
    let spec = parse_config("[system]\nn = 64\n").unwrap();
    assert_eq!(spec.base.n, 64);
    assert_eq!((spec.base.k, spec.base.m, spec.base.l, spec.base.z), (4, 2, 2, 16));
    assert_eq!(spec.seed, DEFAULT_SEED);
    assert_eq!(spec.kind, ExperimentKind::Rate);
}

#[test]
fn full_file() {
    let text = "[system]\nn = 256\nk = 2\nm = 3\nl = 1\nz = 8\n\n\
                [sweep]\nparam = rho_i_db\nfrom = -10\nto = 10\npoints = 3\nscale = lin\n\n\
                [run]\ntrials = 7\nseed = 9\nmethods = cc, zf\n";
    let spec = parse_config(text).unwrap();
    assert_eq!((spec.base.n, spec.base.k, spec.base.m, spec.base.l, spec.base.z), (256, 2, 3, 1, 8));
    assert_eq!(spec.sweep.param, SweepParam::InterferenceSnrDb);
    assert_eq!(spec.sweep.values, vec![-10.0, 0.0, 10.0]);
    assert_eq!((spec.trials, spec.seed), (7, 9));
    assert_eq!(spec.methods, vec![Method::CoherentCombining, Method::ZeroForcing]);
    assert_eq!(spec.kind, ExperimentKind::GainError);
}

#[test]
fn db_scale_is_geometric() {
    let spec = parse_config("[sweep]\nparam = n\nfrom = 64\nto = 1024\npoints = 5\nscale = db\n").unwrap();
    assert_eq!(spec.sweep.values, vec![64.0, 128.0, 256.0, 512.0, 1024.0]);
}

#[test]
fn duplicate_key_is_named() {
    match parse_config("[system]\nn = 64\nn = 128\n") {
        Err(CliError::Parse(e)) => assert!(e.iter().any(|m| m.contains("`n`") && m.contains("duplicate")), "{e:?}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_key_is_named() {
    match parse_config("[system]\nantennas = 64\n") {
        Err(CliError::Parse(e)) => assert!(e[0].contains("antennas")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn every_violation_listed() {
    match parse_config("[system]\nk = 0\nz = 0\noversample = 1\n[run]\ntrials = 0\n") {
        Err(CliError::Lib(Error::InvalidConfig(v))) => {
            assert!(v.len() >= 4, "{v:?}");
            assert!(v.iter().any(|m| m.contains("trials")));
            assert!(v.iter().any(|m| m.contains("oversample")));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn prime_array_lacks_factors() {
    match parse_config("[system]\nn = 97\n[run]\nmethods = kronecker\n") {
        Err(CliError::Lib(Error::InsufficientFactors { needed: 2, available: 1 })) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn more_users_than_pilot_length() {
    match parse_config("[system]\nk = 5\nz = 4\n") {
        Err(CliError::Lib(Error::InvalidConfig(v))) => assert!(v.iter().any(|m| m.contains("pilot"))),
        other => panic!("{other:?}"),
    }
}

#[test]
fn spectrum_has_n_sam_rows() {
    let (code, out, _) = run(&["spectrum", "--preset", "fig4"]);
    assert_eq!(code, 0);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "angle,magnitude");
    assert_eq!(lines.len() - 1, 8 * 128);
}

#[test]
fn beamform_nulls_interference() {
    let (code, out, _) = run(&["beamform", "--set", "n=64", "--set", "methods=kronecker"]);
    assert_eq!(code, 0);
    let residuals: Vec<f64> = out
        .lines()
        .filter(|l| l.contains(",residual,"))
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(residuals.len(), 4 * 2);
    assert!(residuals.iter().all(|&r| r < 1e-9), "{residuals:?}");
    assert_eq!(out.lines().filter(|l| l.contains(",weight,")).count(), 4 * 64);
}

#[test]
fn exit_codes_by_class() {
    let (code, _, err) = run(&["beamform", "--set", "n=97"]);
    assert_eq!(code, kronbf_cli::exit::INSUFFICIENT_FACTORS);
    assert!(err.starts_with("error[InsufficientFactors]:"));
    assert_eq!(err.lines().count(), 1);
    let (code, _, err) = run(&["sweep", "--preset", "fig9"]);
    assert_eq!(code, kronbf_cli::exit::UNKNOWN_PRESET);
    assert!(err.contains("fig9"));
    let (code, _, _) = run(&["sweep", "--preset", "fig6a", "--set", "bogus=1"]);
    assert_eq!(code, kronbf_cli::exit::PARSE);
    let (code, _, _) = run(&["sweep", "--preset", "fig6a", "--set", "trials=0"]);
    assert_eq!(code, kronbf_cli::exit::INVALID_CONFIG);
}

#[test]
fn sweep_is_reproducible_and_thread_independent() {
    let args = ["sweep", "--preset", "fig6b", "--set", "trials=20", "--set", "n=64"];
    let (c1, a, _) = run(&args);
    let mut more = args.to_vec();
    more.extend(["--threads", "1"]);
    let (c2, b, _) = run(&more);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(a.starts_with("rho_i_db,method,metric,mean,stderr,trials\n"));
    assert_eq!(a.lines().count(), 1 + 9 * 4);
    let (_, c, _) = run(&[&args[..], &["--seed", "5"]].concat());
    assert_ne!(a, c);
}

#[test]
fn out_file_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["sweep", "--preset", "fig8a", "--set", "trials=2", "--set", "n=64", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("rho_u_db,"));
    let meta = fs::read_to_string(dir.path().join("r.csv.meta")).unwrap();
    assert!(meta.contains("experiment=fig8a"));
    assert!(meta.contains("note=iterative hybrid block diagonalization"));
}

#[test]
fn config_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.ini");
    fs::write(&path, "[system]\nn = 64\nk = 2\n[run]\ntrials = 3\nmethods = kronecker\n").unwrap();
    let out = bin()
        .args(["sweep"])
        .env("KRONBF_CONFIG", &path)
        .env("KRONBF_SEED", "11")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    let (_, same, _) = run(&["sweep", "--config", path.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(text, same);
}

#[test]
fn estimate_reports_paths() {
    let (code, out, _) = run(&["estimate", "--set", "rho_u_db=20", "--set", "rho_i_db=20", "--set", "min_sep=0.2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("data,")).count(), 4 * 2);
    assert_eq!(out.lines().filter(|l| l.starts_with("interference,")).count(), 2);
}
