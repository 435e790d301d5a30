//! C interface to `d3-ofdm`.
//!
//! Every fallible call returns a [`D3Status`]; on failure the message is kept
//! per thread and can be read with [`d3_last_error_message`]. Handles are
//! opaque and must be released with their matching `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use d3_ofdm::complexity::{conventional_ops, d3_ops, Modulus};
use d3_ofdm::detectors::d3_viterbi;
use d3_ofdm::frame::{Constellation, Modulation, SegmentLayout, SegmentMode, SymbolPlan};
use d3_ofdm::harness::{write_csv, Experiment, ExperimentConfig};
use d3_ofdm::{Complex, Error};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D3Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    BufferTooSmall = 4,
    Config = 5,
    Io = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D3Modulation {
    Bpsk = 0,
    Qpsk = 1,
    Qam16 = 2,
    Qam64 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D3SegmentMode {
    Single = 0,
    Double = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D3Receiver {
    Conventional = 0,
    D3 = 1,
}

/// Real additions, multiplications and divisions.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct D3OpCounts {
    pub additions: u64,
    pub multiplications: u64,
    pub divisions: u64,
}

/// Segment D³ detector for one OFDM symbol layout.
pub struct D3Detector {
    plan: SymbolPlan,
    constellation: Constellation,
}

/// Parsed and validated Monte Carlo experiment.
pub struct D3Experiment {
    inner: Experiment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: D3Status, msg: impl Into<String>) -> D3Status {
    set_error(msg);
    status
}

fn from_error(e: Error) -> D3Status {
    let status = match &e {
        Error::LengthMismatch { .. } => D3Status::LengthMismatch,
        Error::Config(_) => D3Status::Config,
        Error::Io { .. } => D3Status::Io,
        _ => D3Status::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `Internal` so they never cross the boundary.
fn guard(f: impl FnOnce() -> D3Status) -> D3Status {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(D3Status::Internal, "internal panic"))
}

/// Length of the last error message in bytes, excluding the terminator;
/// 0 when the last call succeeded.
#[no_mangle]
pub extern "C" fn d3_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes().len()))
}

/// Copies the last error message, NUL-terminated and truncated to fit, into
/// `buf`. Returns the number of bytes written without the terminator.
#[no_mangle]
pub unsafe extern "C" fn d3_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |s| s.as_bytes());
        let n = bytes.len().min(len - 1);
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
        *buf.add(n) = 0;
        n
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn d3_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a detector for `n` subcarriers split into segments of length `k`.
#[no_mangle]
pub unsafe extern "C" fn d3_detector_new(
    n: usize,
    k: usize,
    mode: D3SegmentMode,
    modulation: D3Modulation,
    out: *mut *mut D3Detector,
) -> D3Status {
    guard(|| {
        if out.is_null() {
            return fail(D3Status::NullPointer, "out is null");
        }
        let mode = match mode {
            D3SegmentMode::Single => SegmentMode::Single,
            D3SegmentMode::Double => SegmentMode::Double,
        };
        let modulation = match modulation {
            D3Modulation::Bpsk => Modulation::Bpsk,
            D3Modulation::Qpsk => Modulation::Qpsk,
            D3Modulation::Qam16 => Modulation::Qam16,
            D3Modulation::Qam64 => Modulation::Qam64,
        };
        let plan = match SegmentLayout::new(k, mode, Complex::new(1.0, 0.0)).and_then(|l| SymbolPlan::new(n, l)) {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        let det = D3Detector { plan, constellation: Constellation::new(modulation) };
        *out = Box::into_raw(Box::new(det));
        D3Status::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn d3_detector_free(det: *mut D3Detector) {
    if !det.is_null() {
        drop(Box::from_raw(det));
    }
}

/// Number of data subcarriers per symbol, i.e. the output length of
/// [`d3_detector_detect`]. Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn d3_detector_data_count(det: *const D3Detector) -> usize {
    det.as_ref().map_or(0, |d| d.plan.data_count())
}

/// Decides one OFDM symbol. `rx` holds `n` frequency-domain samples as
/// interleaved (re, im) pairs; the pilots are assumed to be 1. The decided
/// constellation indices (bit labels) of the data cells are written to `out`
/// in subcarrier order.
#[no_mangle]
pub unsafe extern "C" fn d3_detector_detect(
    det: *const D3Detector,
    rx: *const f64,
    n: usize,
    out: *mut u32,
    out_len: usize,
) -> D3Status {
    guard(|| {
        let Some(det) = det.as_ref() else {
            return fail(D3Status::NullPointer, "detector is null");
        };
        if rx.is_null() || out.is_null() {
            return fail(D3Status::NullPointer, "rx or out is null");
        }
        let plan = &det.plan;
        if n != plan.n {
            return from_error(Error::LengthMismatch { expected: plan.n, actual: n });
        }
        if out_len < plan.data_count() {
            return fail(
                D3Status::BufferTooSmall,
                format!("output holds {out_len} symbols, {} needed", plan.data_count()),
            );
        }
        let raw = std::slice::from_raw_parts(rx, 2 * n);
        let r: Vec<Complex> = raw.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect();
        let anchors = plan.anchors();
        let mut decided = vec![None; n];
        for &(start, len) in &plan.segments {
            match d3_viterbi(&r[start..start + len], &anchors[start..start + len], &det.constellation) {
                Ok(res) => {
                    let free = (start..start + len).filter(|&v| !plan.pilot_mask[v]);
                    for (v, idx) in free.zip(res.indices) {
                        decided[v] = Some(idx as u32);
                    }
                }
                Err(e) => return from_error(e),
            }
        }
        let out = std::slice::from_raw_parts_mut(out, out_len);
        for (slot, idx) in out.iter_mut().zip(decided.into_iter().flatten()) {
            *slot = idx;
        }
        D3Status::Ok
    })
}

/// Real-operation counts of one receiver for `n` subcarriers with `n_p`
/// pilots and `m` bits per symbol under the constant-modulus model.
#[no_mangle]
pub unsafe extern "C" fn d3_complexity(
    receiver: D3Receiver,
    n: u64,
    n_p: u64,
    m: u64,
    out: *mut D3OpCounts,
) -> D3Status {
    guard(|| {
        if out.is_null() {
            return fail(D3Status::NullPointer, "out is null");
        }
        let ops = match receiver {
            D3Receiver::Conventional => conventional_ops(n, n_p, m, Modulus::Cm),
            D3Receiver::D3 => d3_ops(n, n_p, m, Modulus::Cm),
        };
        match ops {
            Ok(o) => {
                *out = D3OpCounts { additions: o.r_a, multiplications: o.r_m, divisions: o.r_d };
                D3Status::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Parses and validates a JSON experiment configuration.
#[no_mangle]
pub unsafe extern "C" fn d3_experiment_from_json(json: *const c_char, out: *mut *mut D3Experiment) -> D3Status {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(D3Status::NullPointer, "json or out is null");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(D3Status::InvalidArgument, "configuration is not valid UTF-8");
        };
        match ExperimentConfig::from_json(text).and_then(|cfg| Experiment::new(&cfg)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(D3Experiment { inner }));
                D3Status::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn d3_experiment_free(exp: *mut D3Experiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Runs the experiment on `workers` threads (0 = all cores) and returns the
/// results as CSV in `*csv_out`. Release the string with [`d3_string_free`].
#[no_mangle]
pub unsafe extern "C" fn d3_experiment_run(
    exp: *const D3Experiment,
    workers: usize,
    csv_out: *mut *mut c_char,
) -> D3Status {
    guard(|| {
        let Some(exp) = exp.as_ref() else {
            return fail(D3Status::NullPointer, "experiment is null");
        };
        if csv_out.is_null() {
            return fail(D3Status::NullPointer, "csv_out is null");
        }
        match exp.inner.run(workers) {
            Ok(records) => match CString::new(write_csv(&records)) {
                Ok(s) => {
                    *csv_out = s.into_raw();
                    D3Status::Ok
                }
                Err(_) => fail(D3Status::Internal, "CSV contains a NUL byte"),
            },
            Err(e) => from_error(e),
        }
    })
}

/// Frees a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn d3_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
