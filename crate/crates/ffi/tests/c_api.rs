use std::ffi::CStr;
use std::ptr;

use whlab_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { whlab_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn couplings_and_protocol_round_trip() {
    let mut c = ptr::null_mut();
    let s = unsafe { whlab_couplings_sample(WhlabModel::Syk, 4, 4, 1.0, 3, &mut c) };
    assert_eq!(s, WhlabStatus::Ok);
    assert_eq!(unsafe { whlab_couplings_n(c) }, 4);

    let mut p = ptr::null_mut();
    assert_eq!(unsafe { whlab_protocol_new(c, 0.0, WhlabInteraction::V, &mut p) }, WhlabStatus::Ok);
    for mu in [0.0, 0.4, 1.2] {
        let mut i = f64::NAN;
        assert_eq!(unsafe { whlab_protocol_mutual_information(p, 0.0, 0.0, mu, &mut i) }, WhlabStatus::Ok);
        assert!((i - whlab_warmup_mutual_information(mu)).abs() < 1e-10, "mu = {mu}: {i}");
    }

    let (mut e0, mut gap) = (0.0, 0.0);
    assert_eq!(unsafe { whlab_eternal_gap(c, WhlabInteraction::V, 0.3, &mut e0, &mut gap) }, WhlabStatus::Ok);
    assert!(gap >= 0.0 && e0 < 0.0);

    unsafe {
        whlab_protocol_free(p);
        whlab_couplings_free(c);
    }
}

#[test]
fn errors_are_reported() {
    let mut c = ptr::null_mut();
    let s = unsafe { whlab_couplings_sample(WhlabModel::Syk, 5, 4, 1.0, 3, &mut c) };
    assert_eq!(s, WhlabStatus::InvalidArgument);
    assert!(c.is_null());
    assert!(!last_error().is_empty());

    let s = unsafe { whlab_protocol_new(ptr::null(), 1.0, WhlabInteraction::V, &mut ptr::null_mut()) };
    assert_eq!(s, WhlabStatus::NullPointer);
    assert!(last_error().contains("couplings"));

    unsafe {
        whlab_couplings_free(ptr::null_mut());
        whlab_protocol_free(ptr::null_mut());
    }
}

#[test]
fn run_experiment_reports_missing_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "experiment = \"warmup\"\nq = 4\nJ = 1.0\n[ensemble]\nmaster_seed = 1\ncount = 1\n").unwrap();
    let path = std::ffi::CString::new(cfg.to_str().unwrap()).unwrap();
    let s = unsafe { whlab_run_experiment(path.as_ptr(), ptr::null(), ptr::null_mut(), 0) };
    assert_eq!(s, WhlabStatus::Config);
    assert!(last_error().contains("`N`"), "{}", last_error());
}

#[test]
fn run_experiment_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("warmup.toml");
    std::fs::write(
        &cfg,
        "experiment = \"warmup\"\nN = 4\nq = 4\nJ = 1.0\n[ensemble]\nmaster_seed = 1\ncount = 1\n[grid]\nmu = [0.0, 0.5]\n",
    )
    .unwrap();
    let path = std::ffi::CString::new(cfg.to_str().unwrap()).unwrap();
    let out = std::ffi::CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let s = unsafe { whlab_run_experiment(path.as_ptr(), out.as_ptr(), buf.as_mut_ptr(), buf.len()) };
    assert_eq!(s, WhlabStatus::Ok, "{}", last_error());
    let written = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string();
    assert!(std::path::Path::new(&written).join("series.csv").exists());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(whlab_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated_and_parses() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/whlab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "whlab_couplings_sample",
        "whlab_protocol_mutual_information",
        "whlab_run_experiment",
        "WHLAB_STATUS_OK",
        "typedef struct WhlabCouplings WhlabCouplings",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    if let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c"])
        .arg(&header)
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
