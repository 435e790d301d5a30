use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, LayoutSpec};
use super::stats::BerRecord;
use crate::analysis::{
    coherent_bpsk_rayleigh, flat_quadrature, mrc_bpsk_rayleigh, sep_ds_flat, sep_simo_flat, sep_ss_flat,
    simo_quadrature, ClosedForm, QFunction, SnrPoint,
};
use crate::error::{Error, Result};
use crate::frame::{Modulation, SegmentMode};

pub const CSV_HEADER: &str = "detector,snr_db,bits,bit_errors,ber,ci_low,ci_high,seq_errors,seqs,ser";

pub fn write_csv(records: &[BerRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.6e},{:.6e},{:.6e},{},{},{:.6e}",
            r.detector, r.snr_db, r.bits, r.bit_errors, r.ber, r.ci_low, r.ci_high, r.seq_errors, r.seqs, r.ser
        );
    }
    s
}

/// Whitespace-separated plot table: SNR in the first column, one BER
/// column per detector in first-appearance order. Zero BER is written as
/// `nan` so log-scale plots skip it; unsaturated points are listed in a
/// trailing comment.
pub fn plot_data(records: &[BerRecord]) -> String {
    let mut detectors: Vec<&str> = Vec::new();
    let mut snrs: Vec<f64> = Vec::new();
    for r in records {
        if !detectors.contains(&r.detector.as_str()) {
            detectors.push(&r.detector);
        }
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    let mut s = format!("# snr_db {}\n", detectors.join(" "));
    for &snr in &snrs {
        let _ = write!(s, "{snr}");
        for d in &detectors {
            match records.iter().find(|r| r.snr_db == snr && r.detector == *d) {
                Some(r) if r.ber > 0.0 => {
                    let _ = write!(s, " {:.6e}", r.ber);
                }
                _ => s.push_str(" nan"),
            }
        }
        s.push('\n');
    }
    let weak: Vec<String> =
        records.iter().filter(|r| r.unsaturated).map(|r| format!("{}@{}", r.detector, r.snr_db)).collect();
    if !weak.is_empty() {
        let _ = writeln!(s, "# unsaturated: {}", weak.join(" "));
    }
    s
}

fn write_file(path: &Path, body: &str, overwrite: bool) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    if path.exists() && !overwrite {
        return Err(Error::Io {
            path: path.display().to_string(),
            message: "file exists; overwriting must be requested explicitly".into(),
        });
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, body).map_err(io)
}

/// Writes `<scenario>.csv` and `<scenario>.dat` into `dir`. Existing files
/// are replaced only with `overwrite`; nothing is ever appended.
pub fn emit_outputs(records: &[BerRecord], scenario: &str, dir: &Path, overwrite: bool) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to write".into()));
    }
    let csv = dir.join(format!("{scenario}.csv"));
    let dat = dir.join(format!("{scenario}.dat"));
    if !overwrite {
        for p in [&csv, &dat] {
            if p.exists() {
                return Err(Error::Io {
                    path: p.display().to_string(),
                    message: "file exists; overwriting must be requested explicitly".into(),
                });
            }
        }
    }
    write_file(&csv, &write_csv(records), overwrite)?;
    write_file(&dat, &plot_data(records), overwrite)?;
    Ok(vec![csv, dat])
}

/// Analytical predictions over the SNR grid of a flat-fading BPSK segment
/// experiment.
///
/// Columns: the reported prediction (`p_s`, BER midpoint and bounds, and
/// the method used), the closed form when one exists, quadrature of the
/// conditional SEP with the approximate and the exact Q-function, and the
/// coherent perfect-CSI reference (MRC for several branches).
pub fn theory_sweep(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let (k, mode) = match cfg.layout {
        LayoutSpec::Segment { k, mode } => (k, mode),
        LayoutSpec::ResourceBlock { .. } => {
            return Err(Error::Config("no analytical prediction for resource-block layouts".into()))
        }
    };
    if cfg.modulation != Modulation::Bpsk || !cfg.channel.profile()?.is_flat() {
        return Err(Error::Config("analytical predictions cover BPSK over flat fading only".into()));
    }
    let n = cfg.branches;
    if n > 1 && mode == SegmentMode::Double {
        return Err(Error::Config("receive-diversity predictions cover single-sided segments only".into()));
    }
    let closed = ClosedForm::ALL.iter().copied().find(|f| f.k() == k && f.mode() == mode && f.n_branches() == n);
    let mut s = String::from(
        "snr_db,p_s,p_b_mid,p_b_lower,p_b_upper,method,closed_form_p_s,quad_approx_q_p_s,quad_exact_q_p_s,coherent_ber\n",
    );
    for &db in &cfg.snr_db {
        let snr = SnrPoint::from_db(db);
        let pred = match (n, mode) {
            (1, SegmentMode::Single) => sep_ss_flat(k, snr)?,
            (1, SegmentMode::Double) => sep_ds_flat(k, snr)?,
            _ => sep_simo_flat(n, k, snr)?,
        };
        let quad = |q| if n == 1 { flat_quadrature(k, mode, snr, q) } else { simo_quadrature(n, k, snr, q) };
        let cf = closed.map(|f| format!("{:.9e}", f.eval(snr))).unwrap_or_default();
        let coherent = if n == 1 { coherent_bpsk_rayleigh(snr) } else { mrc_bpsk_rayleigh(n, snr) };
        let _ = writeln!(
            s,
            "{db},{:.9e},{:.9e},{:.9e},{:.9e},{},{cf},{:.9e},{:.9e},{:.9e}",
            pred.p_s,
            pred.p_b_mid,
            pred.p_b_lower,
            pred.p_b_upper,
            pred.method.name(),
            quad(QFunction::Approx)?,
            quad(QFunction::Exact)?,
            coherent
        );
    }
    Ok(s)
}
