use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use jholo_ffi::*;

fn grid(surface: &str, n: usize) -> *mut JholoGrid {
    let id = CString::new(surface).unwrap();
    let mut g = ptr::null_mut();
    let st = unsafe { jholo_grid_new(id.as_ptr(), ptr::null(), n, n, &mut g) };
    assert_eq!(st, JholoStatus::Ok);
    assert!(!g.is_null());
    g
}

fn last_error() -> String {
    let p = jholo_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(jholo_version()) };
    assert_eq!(v.to_str().unwrap(), jholo::VERSION);
}

#[test]
fn grid_lifecycle_and_angles() {
    let g = grid("t4-tilted-3-4-5", 16);
    unsafe {
        assert_eq!(jholo_grid_len(g), 256);
        let mut area = 0.0;
        assert_eq!(jholo_grid_area(g, &mut area), JholoStatus::Ok);
        assert!((area - 5.0).abs() < 1e-12);
        let mut c = vec![0.0; 256];
        let mut s = vec![0.0; 256];
        assert_eq!(
            jholo_grid_kahler_angles(g, c.as_mut_ptr(), s.as_mut_ptr(), 256),
            JholoStatus::Ok
        );
        assert!(c.iter().all(|v| (v - 0.6).abs() < 1e-12));
        assert!(s.iter().all(|v| (v - 0.8).abs() < 1e-12));
        assert_eq!(
            jholo_grid_kahler_angles(g, c.as_mut_ptr(), ptr::null_mut(), 10),
            JholoStatus::BufferTooSmall
        );
        let mut f = 0.0;
        let mut o = 0.0;
        assert_eq!(
            jholo_first_variation_distance_squared(g, &mut f, &mut o),
            JholoStatus::Ok
        );
        assert!((f - 0.64 * area).abs() < 1e-10 && (o - f).abs() < 1e-4);
        jholo_grid_free(g);
        jholo_grid_free(ptr::null_mut());
        assert_eq!(jholo_grid_len(ptr::null()), 0);
    }
}

#[test]
fn destabilize_summary_on_clifford_torus() {
    let g = grid("cp2-clifford", 24);
    let mut out = std::mem::MaybeUninit::<JholoDestabilizeSummary>::uninit();
    unsafe {
        assert_eq!(jholo_destabilize(g, out.as_mut_ptr()), JholoStatus::Ok);
        let s = out.assume_init();
        assert_eq!(s.certificate, JholoCertificate::Destabilized);
        assert!(s.consistent);
        assert!((s.saddle_d2 - 4.0).abs() < 1e-8);
        assert!(s.killing_a_second < 0.0 && s.killing_oracle_a_second < 0.0);
        jholo_grid_free(g);
    }
    let h = grid("t4-holomorphic", 16);
    let mut out = std::mem::MaybeUninit::<JholoDestabilizeSummary>::uninit();
    unsafe {
        assert_eq!(jholo_destabilize(h, out.as_mut_ptr()), JholoStatus::Ok);
        let s = out.assume_init();
        assert_eq!(s.certificate, JholoCertificate::Holomorphic);
        assert!(s.killing_a_second.is_nan());
        jholo_grid_free(h);
    }
}

#[test]
fn errors_are_reported_with_codes() {
    let mut g = ptr::null_mut();
    let bad = CString::new("no-such-surface").unwrap();
    let st = unsafe { jholo_grid_new(bad.as_ptr(), ptr::null(), 16, 16, &mut g) };
    assert_eq!(st, JholoStatus::UnknownId);
    assert!(g.is_null());
    assert!(last_error().contains("no-such-surface"));

    let id = CString::new("t4-holomorphic").unwrap();
    let amb = CString::new("cp2").unwrap();
    let st = unsafe { jholo_grid_new(id.as_ptr(), amb.as_ptr(), 16, 16, &mut g) };
    assert_eq!(st, JholoStatus::InvalidInput);

    let st = unsafe { jholo_grid_new(ptr::null(), ptr::null(), 16, 16, &mut g) };
    assert_eq!(st, JholoStatus::NullArgument);
    let st = unsafe { jholo_grid_area(ptr::null(), ptr::null_mut()) };
    assert_eq!(st, JholoStatus::NullArgument);

    let g = grid("t4-holomorphic", 16);
    let mut a = 0.0;
    assert_eq!(unsafe { jholo_grid_area(g, &mut a) }, JholoStatus::Ok);
    assert!(jholo_last_error_message().is_null());
    unsafe { jholo_grid_free(g) };
}

#[test]
fn scenario_round_trip() {
    let cmd = CString::new("killing-check").unwrap();
    let cfg = CString::new("surface = \"cp2-clifford\"\nresolution = 16\nnode = 3\n").unwrap();
    let mut json = ptr::null_mut();
    let mut code = -1;
    unsafe {
        assert_eq!(
            jholo_run_scenario(cmd.as_ptr(), cfg.as_ptr(), &mut json, &mut code),
            JholoStatus::Ok
        );
        assert_eq!(code, 0);
        let v: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert!((v["report"]["values"]["pairing"].as_f64().unwrap() - 1.0).abs() < 1e-8);
        jholo_string_free(json);

        let bad = CString::new("resolution = 4\nsurface = \"cp2-clifford\"").unwrap();
        let st = jholo_run_scenario(cmd.as_ptr(), bad.as_ptr(), &mut json, &mut code);
        assert_eq!(st, JholoStatus::ConfigError);
        assert!(json.is_null());

        let wrong = CString::new("fly").unwrap();
        let st = jholo_run_scenario(wrong.as_ptr(), cfg.as_ptr(), &mut json, &mut code);
        assert_eq!(st, JholoStatus::InvalidInput);
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/jholo.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "jholo_grid_new",
        "jholo_destabilize",
        "jholo_run_scenario",
        "JHOLO_STATUS_PANIC",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c11", "-Wall", "-Werror"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
