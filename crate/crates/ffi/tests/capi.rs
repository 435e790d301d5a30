use std::ffi::{c_char, CStr, CString};
use std::ptr;

use d3_ofdm_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { d3_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert_eq!(s.len(), n);
    s
}

// QPSK Gray points indexed by their bit label, built here rather than taken
// from the library.
fn qpsk(i: u32) -> (f64, f64) {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let re = if i & 0b10 == 0 { a } else { -a };
    let im = if i & 0b01 == 0 { a } else { -a };
    (re, im)
}

#[test]
fn noiseless_symbol_is_recovered_under_unknown_channel() {
    let (n, k) = (64usize, 4usize);
    let mut det = ptr::null_mut();
    let st = unsafe { d3_detector_new(n, k, D3SegmentMode::Single, D3Modulation::Qpsk, &mut det) };
    assert_eq!(st, D3Status::Ok);
    // Single-sided: a pilot opens every segment, so 16 of 64 cells are pilots.
    assert_eq!(unsafe { d3_detector_data_count(det) }, 48);

    let tx: Vec<u32> = (0..48).map(|i| (i * 7 + 3) % 4).collect();
    let mut data = tx.iter();
    let mut rx = Vec::with_capacity(2 * n);
    for v in 0..n {
        let (dr, di) = if v % k == 0 { (1.0, 0.0) } else { qpsk(*data.next().unwrap()) };
        // Smooth complex gain across subcarriers.
        let phase = 0.9 + 0.01 * v as f64;
        let (hr, hi) = (0.7 * phase.cos(), 0.7 * phase.sin());
        rx.push(hr * dr - hi * di);
        rx.push(hr * di + hi * dr);
    }
    let mut out = vec![u32::MAX; 48];
    let st = unsafe { d3_detector_detect(det, rx.as_ptr(), n, out.as_mut_ptr(), out.len()) };
    assert_eq!(st, D3Status::Ok);
    assert_eq!(out, tx);
    assert_eq!(d3_last_error_length(), 0);
    unsafe { d3_detector_free(det) };
}

#[test]
fn detector_argument_errors() {
    let mut det = ptr::null_mut();
    let st = unsafe { d3_detector_new(64, 1, D3SegmentMode::Single, D3Modulation::Bpsk, &mut det) };
    assert_eq!(st, D3Status::InvalidArgument);
    assert!(det.is_null());
    assert!(d3_last_error_length() > 0);

    let st = unsafe { d3_detector_new(16, 4, D3SegmentMode::Double, D3Modulation::Bpsk, &mut det) };
    assert_eq!(st, D3Status::Ok);
    let rx = vec![0.0; 32];
    let mut out = vec![0u32; 16];
    let st = unsafe { d3_detector_detect(det, rx.as_ptr(), 15, out.as_mut_ptr(), out.len()) };
    assert_eq!(st, D3Status::LengthMismatch);
    let st = unsafe { d3_detector_detect(det, rx.as_ptr(), 16, out.as_mut_ptr(), 2) };
    assert_eq!(st, D3Status::BufferTooSmall);
    assert!(last_error().contains("needed"));
    let st = unsafe { d3_detector_detect(det, ptr::null(), 16, out.as_mut_ptr(), 16) };
    assert_eq!(st, D3Status::NullPointer);
    let st = unsafe { d3_detector_detect(ptr::null(), rx.as_ptr(), 16, out.as_mut_ptr(), 16) };
    assert_eq!(st, D3Status::NullPointer);
    assert_eq!(unsafe { d3_detector_data_count(ptr::null()) }, 0);
    unsafe {
        d3_detector_free(det);
        d3_detector_free(ptr::null_mut());
    }
}

#[test]
fn complexity_division_counts() {
    let mut ops = D3OpCounts::default();
    let st = unsafe { d3_complexity(D3Receiver::Conventional, 128, 32, 2, &mut ops) };
    assert_eq!(st, D3Status::Ok);
    // One real division per data cell: N − N_P.
    assert_eq!(ops.divisions, 96);
    unsafe { d3_complexity(D3Receiver::Conventional, 2048, 512, 2, &mut ops) };
    assert_eq!(ops.divisions, 1536);
    unsafe { d3_complexity(D3Receiver::D3, 512, 128, 2, &mut ops) };
    assert_eq!(ops.divisions, 0);
    assert!(ops.additions > 0 && ops.multiplications > 0);
    let st = unsafe { d3_complexity(D3Receiver::D3, 16, 8, 2, &mut ops) };
    assert_eq!(st, D3Status::InvalidArgument);
    let st = unsafe { d3_complexity(D3Receiver::D3, 512, 128, 2, ptr::null_mut()) };
    assert_eq!(st, D3Status::NullPointer);
}

const CONFIG: &str = r#"{
  "scenario": "ffi-smoke",
  "channel": {"name": "flat"},
  "fading_block": "segment",
  "chain": "frequency",
  "modulation": "qpsk",
  "layout": {"kind": "segment", "k": 3, "mode": "ds"},
  "detectors": ["d3", "coherent"],
  "snr_db": [10.0],
  "min_bits": 10000,
  "max_symbols": 50,
  "noiseless": true
}"#;

#[test]
fn experiment_round_trip() {
    let json = CString::new(CONFIG).unwrap();
    let mut exp = ptr::null_mut();
    let st = unsafe { d3_experiment_from_json(json.as_ptr(), &mut exp) };
    assert_eq!(st, D3Status::Ok, "{}", last_error());
    let mut csv = ptr::null_mut();
    let st = unsafe { d3_experiment_run(exp, 1, &mut csv) };
    assert_eq!(st, D3Status::Ok, "{}", last_error());
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe {
        d3_string_free(csv);
        d3_experiment_free(exp);
    }
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "detector,snr_db,bits,bit_errors,ber,ci_low,ci_high,seq_errors,seqs,ser");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row[2].parse::<u64>().unwrap() >= 10000);
        assert_eq!(row[3], "0");
    }
}

#[test]
fn experiment_rejects_unknown_keys() {
    let bad = CONFIG.replace("\"noiseless\": true", "\"noiseless\": true, \"colour\": 1");
    let json = CString::new(bad).unwrap();
    let mut exp = ptr::null_mut();
    let st = unsafe { d3_experiment_from_json(json.as_ptr(), &mut exp) };
    assert_eq!(st, D3Status::Config);
    assert!(exp.is_null());
    assert!(last_error().contains("colour"));
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(d3_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/d3_ofdm.h")).unwrap();
    for name in [
        "d3_detector_new",
        "d3_detector_detect",
        "d3_experiment_run",
        "d3_last_error_message",
        "D3_STATUS_BUFFER_TOO_SMALL",
        "typedef struct D3Detector D3Detector",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
