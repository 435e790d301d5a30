use rand::Rng;
use rayon::prelude::*;

use super::config::{Chain, DetectorKind, ExperimentConfig, FadingBlock, FecSpec};
use super::stats::{BerRecord, Tally};
use crate::analysis::SnrPoint;
use crate::channel::{evolve, sample_realization, ChannelRealization, MobilityModel, TapProfile};
use crate::detectors::{
    coherent_mld, coherent_mrc, d3_simo_bruteforce, d3_simo_viterbi, detect_resource_block, glrt_simo_mlsd,
    ls_estimate_interpolate, rb_ls_estimate, slice, zf_equalize, CsiEstimate, Interpolation, DEFAULT_BF_BUDGET,
};
use crate::error::{Error, Result};
use crate::frame::{
    apply_channel_freq, build_resource_block, propagate, receive, transmit, Constellation, Grid, ResourceBlockLayout,
    SymbolPlan,
};
use crate::numerics::{Complex, FftEngine, RngStream, SimRng};

/// Trials evaluated between stopping-rule checks. Fixed so that the
/// stopping point, and hence every output, is independent of the worker
/// count.
pub const BATCH_TRIALS: u64 = 32;

/// RNG stream of one trial.
pub fn trial_stream(seed: u64, snr_index: usize, trial: u64) -> RngStream {
    RngStream::new(seed, ((snr_index as u64) << 40) | trial)
}

/// Received samples and true CFR, one vector per branch.
type Branches = (Vec<Vec<Complex>>, Vec<Vec<Complex>>);

/// A segment plan with its per-segment data indices precomputed.
struct PlanInfo {
    plan: SymbolPlan,
    data_pos: Vec<usize>,
    anchors: Vec<Option<Complex>>,
    /// Data-order indices of the free cells of each segment with data.
    groups: Vec<Vec<usize>>,
    /// `(start, len, group)` for each segment with data.
    lines: Vec<(usize, usize, usize)>,
    pilots: Vec<(usize, Complex)>,
}

impl PlanInfo {
    fn new(plan: SymbolPlan) -> Self {
        let data_pos = plan.data_positions();
        let mut order = vec![usize::MAX; plan.n];
        for (i, &p) in data_pos.iter().enumerate() {
            order[p] = i;
        }
        let mut groups = Vec::new();
        let mut lines = Vec::new();
        for &(start, len) in &plan.segments {
            let g: Vec<usize> = (start..start + len).filter(|&v| !plan.pilot_mask[v]).map(|v| order[v]).collect();
            if !g.is_empty() {
                lines.push((start, len, groups.len()));
                groups.push(g);
            }
        }
        let anchors = plan.anchors();
        let pilots = plan.pilot_positions().into_iter().map(|p| (p, plan.layout.pilot_value)).collect();
        Self { plan, data_pos, anchors, groups, lines, pilots }
    }
}

/// Prepared state shared by all trials of an experiment.
pub struct Experiment {
    cfg: ExperimentConfig,
    c: Constellation,
    engine: FftEngine,
    profile: TapProfile,
    mobility: Option<MobilityModel>,
    plan: Option<PlanInfo>,
    rb: Option<ResourceBlockLayout>,
}

#[derive(Debug, Clone, Default)]
struct TrialOutcome {
    tallies: Vec<Tally>,
    symbols: u64,
}

impl Experiment {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let engine = FftEngine::new(cfg.ofdm.n)?;
        let plan = match cfg.segment_layout() {
            Some(layout) => {
                let n = match cfg.fading_block {
                    FadingBlock::Symbol => cfg.ofdm.n,
                    FadingBlock::Segment => layout.k,
                };
                Some(PlanInfo::new(SymbolPlan::new(n, layout)?))
            }
            None => None,
        };
        Ok(Self {
            c: cfg.constellation(),
            profile: cfg.channel.profile()?,
            mobility: cfg.mobility_model()?,
            rb: cfg.rb_layout(),
            engine,
            plan,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    /// Runs every SNR point with `workers` threads (0: all cores).
    pub fn run(&self, workers: usize) -> Result<Vec<BerRecord>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let mut records = Vec::new();
        for (si, &snr_db) in self.cfg.snr_db.iter().enumerate() {
            let s2 = if self.cfg.noiseless { 0.0 } else { SnrPoint::from_db(snr_db).sigma_w2() };
            let mut totals = vec![Tally::default(); self.cfg.detectors.len()];
            let mut symbols = 0u64;
            let mut next = 0u64;
            loop {
                let batch: Vec<u64> = (next..next + BATCH_TRIALS).collect();
                next += BATCH_TRIALS;
                let outcomes: Vec<TrialOutcome> =
                    pool.install(|| batch.par_iter().map(|&t| self.trial(si, t, s2)).collect::<Result<_>>())?;
                for o in &outcomes {
                    for (acc, t) in totals.iter_mut().zip(&o.tallies) {
                        acc.merge(t);
                    }
                    symbols += o.symbols;
                }
                let bits = totals.iter().map(|t| t.bits).min().unwrap_or(0);
                let errors = totals.iter().map(|t| t.bit_errors).min().unwrap_or(0);
                if (bits >= self.cfg.min_bits && errors >= self.cfg.min_errors) || symbols >= self.cfg.max_symbols {
                    break;
                }
            }
            for (d, t) in self.cfg.detectors.iter().zip(&totals) {
                let rec = BerRecord::new(d.name(), snr_db, t, self.cfg.min_errors, symbols);
                log::info!(
                    "{} {:>6.2} dB {:<10} ber {:.3e} ({} / {} bits)",
                    self.cfg.scenario,
                    snr_db,
                    rec.detector,
                    rec.ber,
                    rec.bit_errors,
                    rec.bits
                );
                records.push(rec);
            }
        }
        Ok(records)
    }

    fn trial(&self, snr_index: usize, trial: u64, s2: f64) -> Result<TrialOutcome> {
        let mut rng = trial_stream(self.cfg.seed, snr_index, trial).rng();
        let mut out = TrialOutcome { tallies: vec![Tally::default(); self.cfg.detectors.len()], symbols: 0 };
        if let Some(fec) = &self.cfg.fec {
            self.coded_trial(fec, s2, &mut rng, &mut out)?;
        } else if self.rb.is_some() {
            self.rb_trial(s2, &mut rng, &mut out)?;
        } else {
            let units = match self.cfg.fading_block {
                FadingBlock::Symbol => 1,
                FadingBlock::Segment => (self.cfg.ofdm.n / self.plan().plan.n).max(1),
            };
            for _ in 0..units {
                self.segment_unit(s2, &mut rng, &mut out.tallies)?;
            }
            out.symbols = 1;
        }
        Ok(out)
    }

    fn plan(&self) -> &PlanInfo {
        self.plan.as_ref().expect("segment layout")
    }

    fn through(&self, d: &[Complex], ch: &ChannelRealization, s2: f64, rng: &mut SimRng) -> Result<Vec<Complex>> {
        match self.cfg.chain {
            Chain::Time => {
                let x = transmit(d, &self.cfg.ofdm, &self.engine)?;
                let y = propagate(&x, ch, self.cfg.ofdm.n_cp, s2, rng)?;
                receive(&y, &self.cfg.ofdm, &self.engine)
            }
            Chain::Frequency => apply_channel_freq(d, &ch.cfr[..d.len()], s2, rng),
        }
    }

    /// Random symbols on the data cells, one channel per branch.
    fn segment_unit(&self, s2: f64, rng: &mut SimRng, tallies: &mut [Tally]) -> Result<()> {
        let info = self.plan();
        let truth: Vec<usize> = (0..info.data_pos.len()).map(|_| rng.random_range(0..self.c.size())).collect();
        let (rs, hs) = self.send_symbol(info, &truth, s2, rng)?;
        for (di, &det) in self.cfg.detectors.iter().enumerate() {
            let dec = self.detect_symbol(det, info, &rs, &hs)?;
            let t = &mut tallies[di];
            for g in &info.groups {
                let errs: u32 = g.iter().map(|&i| (truth[i] ^ dec[i]).count_ones()).sum();
                t.bits += (g.len() * self.c.bits_per_symbol) as u64;
                t.bit_errors += errs as u64;
                t.seqs += 1;
                t.seq_errors += (errs > 0) as u64;
            }
        }
        Ok(())
    }

    fn send_symbol(&self, info: &PlanInfo, truth: &[usize], s2: f64, rng: &mut SimRng) -> Result<Branches> {
        let data: Vec<Complex> = truth.iter().map(|&i| self.c.point(i)).collect();
        let d = info.plan.build(&data)?;
        let mut rs = Vec::with_capacity(self.cfg.branches);
        let mut hs = Vec::with_capacity(self.cfg.branches);
        for _ in 0..self.cfg.branches {
            let ch = sample_realization(&self.profile, &self.engine, rng)?;
            rs.push(self.through(&d, &ch, s2, rng)?);
            hs.push(ch.cfr[..d.len()].to_vec());
        }
        Ok((rs, hs))
    }

    /// Decisions for every data cell of a symbol, in data order.
    fn detect_symbol(
        &self,
        det: DetectorKind,
        info: &PlanInfo,
        rs: &[Vec<Complex>],
        hs: &[Vec<Complex>],
    ) -> Result<Vec<usize>> {
        let c = &self.c;
        let pick = |v: &[Complex]| -> Vec<Complex> { info.data_pos.iter().map(|&p| v[p]).collect() };
        match det {
            DetectorKind::D3 | DetectorKind::D3Bf | DetectorKind::Glrt => {
                let mut dec = vec![0usize; info.data_pos.len()];
                for &(start, len, g) in &info.lines {
                    let anchors = &info.anchors[start..start + len];
                    let lines: Vec<&[Complex]> = rs.iter().map(|r| &r[start..start + len]).collect();
                    let out = match det {
                        DetectorKind::D3 => d3_simo_viterbi(&lines, anchors, c)?,
                        DetectorKind::D3Bf => d3_simo_bruteforce(&lines, anchors, c, DEFAULT_BF_BUDGET)?,
                        _ => glrt_simo_mlsd(&lines, anchors, c, DEFAULT_BF_BUDGET)?,
                    };
                    for (&i, &x) in info.groups[g].iter().zip(&out.indices) {
                        dec[i] = x;
                    }
                }
                Ok(dec)
            }
            DetectorKind::Coherent => {
                let r: Vec<Vec<Complex>> = rs.iter().map(|r| pick(r)).collect();
                let h: Vec<Vec<Complex>> = hs.iter().map(|h| pick(h)).collect();
                let r_ref: Vec<&[Complex]> = r.iter().map(|v| v.as_slice()).collect();
                let h_ref: Vec<&[Complex]> = h.iter().map(|v| v.as_slice()).collect();
                Ok(coherent_mrc(&r_ref, &h_ref, c)?.indices)
            }
            DetectorKind::CoherentL | DetectorKind::CoherentS => {
                let kind =
                    if det == DetectorKind::CoherentL { Interpolation::LsLinear } else { Interpolation::LsSpline };
                let ests: Vec<CsiEstimate> =
                    rs.iter().map(|r| ls_estimate_interpolate(r, &info.pilots, kind)).collect::<Result<_>>()?;
                if rs.len() == 1 {
                    let eq = zf_equalize(&rs[0], &ests[0])?;
                    return Ok(slice(&eq, &info.data_pos, c).indices);
                }
                let r: Vec<Vec<Complex>> = rs.iter().map(|r| pick(r)).collect();
                let h: Vec<Vec<Complex>> = ests.iter().map(|e| pick(&e.h_hat)).collect();
                let r_ref: Vec<&[Complex]> = r.iter().map(|v| v.as_slice()).collect();
                let h_ref: Vec<&[Complex]> = h.iter().map(|v| v.as_slice()).collect();
                Ok(coherent_mrc(&r_ref, &h_ref, c)?.indices)
            }
        }
    }

    /// One frame of resource blocks across the band over one block of
    /// OFDM symbols, the channel evolving between symbols.
    fn rb_trial(&self, s2: f64, rng: &mut SimRng, out: &mut TrialOutcome) -> Result<()> {
        let layout = self.rb.as_ref().expect("resource block");
        let c = &self.c;
        let n = self.cfg.ofdm.n;
        let n_rb = n / layout.rows;
        let cells = layout.data_cells();
        let start = sample_realization(&self.profile, &self.engine, rng)?;
        let channels = match &self.mobility {
            Some(m) if layout.cols > 1 => evolve(&start, self.profile.powers(), m, layout.cols - 1, &self.engine, rng)?,
            _ => vec![start; layout.cols],
        };
        let mut truth = Vec::with_capacity(n_rb);
        let mut tx = Vec::with_capacity(n_rb);
        for _ in 0..n_rb {
            let idx: Vec<usize> = (0..cells.len()).map(|_| rng.random_range(0..c.size())).collect();
            let data: Vec<Complex> = idx.iter().map(|&i| c.point(i)).collect();
            tx.push(build_resource_block(&data, layout)?);
            truth.push(idx);
        }
        let mut rx = vec![Grid::zeros(layout.rows, layout.cols); n_rb];
        let mut hg = vec![Grid::zeros(layout.rows, layout.cols); n_rb];
        for (col, ch) in channels.iter().enumerate().take(layout.cols) {
            let mut d = vec![Complex::new(0.0, 0.0); n];
            for (j, g) in tx.iter().enumerate() {
                for row in 0..layout.rows {
                    d[j * layout.rows + row] = g.get(row, col);
                }
            }
            let r = self.through(&d, ch, s2, rng)?;
            for j in 0..n_rb {
                for row in 0..layout.rows {
                    rx[j].set(row, col, r[j * layout.rows + row]);
                    hg[j].set(row, col, channels[col].cfr[j * layout.rows + row]);
                }
            }
        }
        for (di, &det) in self.cfg.detectors.iter().enumerate() {
            let t = &mut out.tallies[di];
            for j in 0..n_rb {
                let r_cells: Vec<Complex> = cells.iter().map(|&(a, b)| rx[j].get(a, b)).collect();
                let dec = match det {
                    DetectorKind::D3 => detect_resource_block(&rx[j], layout, c)?.indices,
                    DetectorKind::Coherent => {
                        let h: Vec<Complex> = cells.iter().map(|&(a, b)| hg[j].get(a, b)).collect();
                        coherent_mld(&r_cells, &h, c)?.indices
                    }
                    DetectorKind::CoherentL | DetectorKind::CoherentS => {
                        let kind = if det == DetectorKind::CoherentL {
                            Interpolation::LsLinear
                        } else {
                            Interpolation::LsSpline
                        };
                        let est = rb_ls_estimate(&rx[j], layout, kind)?;
                        let h_hat = cells.iter().map(|&(a, b)| est.get(a, b)).collect();
                        let eq = zf_equalize(&r_cells, &CsiEstimate { h_hat, method: kind })?;
                        let all: Vec<usize> = (0..cells.len()).collect();
                        slice(&eq, &all, c).indices
                    }
                    DetectorKind::D3Bf | DetectorKind::Glrt => unreachable!("rejected by validation"),
                };
                let errs: u32 = truth[j].iter().zip(&dec).map(|(a, b)| (a ^ b).count_ones()).sum();
                t.bits += (cells.len() * c.bits_per_symbol) as u64;
                t.bit_errors += errs as u64;
                t.seqs += 1;
                t.seq_errors += (errs > 0) as u64;
            }
        }
        out.symbols = layout.cols as u64;
        Ok(())
    }

    /// One coded frame: encode, optionally interleave, spread over as many
    /// OFDM symbols as needed (an independent channel each), detect,
    /// deinterleave and decode per block.
    fn coded_trial(&self, fec: &FecSpec, s2: f64, rng: &mut SimRng, out: &mut TrialOutcome) -> Result<()> {
        let info = self.plan();
        let c = &self.c;
        let code = fec.code();
        let blocks: Vec<Vec<u8>> = (0..fec.blocks_per_frame)
            .map(|_| (0..fec.block_bits).map(|_| rng.random_range(0..2u8)).collect())
            .collect();
        let coded: Vec<u8> = blocks.iter().flat_map(|b| code.encode(b)).collect();
        let tx_bits = if fec.interleaver { fec.interleaver().interleave(&coded)? } else { coded.clone() };
        let per_symbol = info.data_pos.len() * c.bits_per_symbol;
        let n_sym = tx_bits.len().div_ceil(per_symbol);
        let mut rx_bits = vec![Vec::with_capacity(n_sym * per_symbol); self.cfg.detectors.len()];
        for s in 0..n_sym {
            let mut chunk: Vec<u8> = tx_bits[s * per_symbol..((s + 1) * per_symbol).min(tx_bits.len())].to_vec();
            chunk.resize(per_symbol, 0);
            let truth = c.bits_to_indices(&chunk)?;
            let (rs, hs) = self.send_symbol(info, &truth, s2, rng)?;
            for (di, &det) in self.cfg.detectors.iter().enumerate() {
                let dec = self.detect_symbol(det, info, &rs, &hs)?;
                rx_bits[di].extend(c.indices_to_bits(&dec));
            }
        }
        let block_len = fec.coded_block_len();
        for (di, bits) in rx_bits.iter_mut().enumerate() {
            bits.truncate(tx_bits.len());
            let stream = if fec.interleaver { fec.interleaver().deinterleave(bits)? } else { bits.clone() };
            let t = &mut out.tallies[di];
            for (b, info_bits) in blocks.iter().enumerate() {
                let decoded = code.decode_hard(&stream[b * block_len..(b + 1) * block_len])?;
                let errs = decoded.iter().zip(info_bits).filter(|(a, b)| a != b).count() as u64;
                t.bits += info_bits.len() as u64;
                t.bit_errors += errs;
                t.seqs += 1;
                t.seq_errors += (errs > 0) as u64;
            }
        }
        out.symbols = n_sym as u64;
        Ok(())
    }
}

/// Runs `cfg` on all available cores.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<BerRecord>> {
    Experiment::new(cfg)?.run(0)
}

#[cfg(test)]
mod tests {
    use super::super::{scenario, write_csv, LayoutSpec};
    use super::*;
    use crate::frame::{Modulation, SegmentMode};

    fn quick(mut cfg: ExperimentConfig) -> ExperimentConfig {
        cfg.min_bits = 10_000;
        cfg.max_symbols = 64;
        cfg
    }

    #[test]
    fn noiseless_runs_are_error_free() {
        let mut configs = Vec::new();
        for (k, mode) in [(4, SegmentMode::Single), (5, SegmentMode::Double)] {
            let mut cfg = quick(scenario("fig-freq-selective").unwrap());
            cfg.channel = ChannelSpec::Named { name: "flat".into() };
            cfg.layout = LayoutSpec::Segment { k, mode };
            cfg.detectors = vec![D3, D3Bf, Coherent, CoherentL, CoherentS, Glrt];
            configs.push(cfg);
        }
        let mut simo = quick(scenario("simo-ds-k3-bpsk").unwrap());
        simo.detectors = vec![D3, D3Bf, Glrt, Coherent, CoherentL];
        configs.push(simo);
        let mut rb = quick(scenario("rb-mobility-50").unwrap());
        rb.channel = ChannelSpec::Named { name: "flat".into() };
        rb.mobility = None;
        rb.chain = Chain::Time;
        configs.push(rb);
        let mut coded = quick(scenario("coded-interleaved").unwrap());
        coded.channel = ChannelSpec::Named { name: "flat".into() };
        coded.max_symbols = 1;
        coded.fec = Some(FecSpec { interleaver: true, block_bits: 64, blocks_per_frame: 20, rows: 64, cols: 48 });
        configs.push(coded);
        for mut cfg in configs {
            cfg.noiseless = true;
            cfg.snr_db = vec![0.0];
            for rec in Experiment::new(&cfg).unwrap().run(2).unwrap() {
                assert!(rec.bits > 0);
                assert_eq!(rec.bit_errors, 0, "{} {}", cfg.scenario, rec.detector);
            }
        }
    }

    use super::super::ChannelSpec;
    use DetectorKind::*;

    #[test]
    fn worker_count_does_not_change_results() {
        for name in ["selective-ds-k3-bpsk", "rb-mobility-300"] {
            let mut cfg = quick(scenario(name).unwrap());
            cfg.snr_db = vec![5.0, 15.0];
            let exp = Experiment::new(&cfg).unwrap();
            let a = write_csv(&exp.run(1).unwrap());
            let b = write_csv(&exp.run(4).unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn stopping_rule_and_budget() {
        let mut cfg = scenario("flat-ss-k2-bpsk").unwrap();
        cfg.min_bits = 10_000;
        cfg.snr_db = vec![0.0, 60.0];
        cfg.max_symbols = 200;
        let recs = Experiment::new(&cfg).unwrap().run(0).unwrap();
        // 0 dB: errors are plentiful, so the minimum bit count governs.
        assert!(recs[0].bits >= 10_000 && recs[0].symbols < 200);
        assert!(!recs[0].unsaturated);
        // 60 dB: the symbol budget ends the point, flagged unsaturated.
        let hi = &recs[3];
        assert!(hi.symbols >= 200 && hi.unsaturated);
        assert_eq!(hi.symbols % BATCH_TRIALS, 0);
    }

    #[test]
    fn flat_ss_k2_matches_dbpsk_rate() {
        let mut cfg = scenario("flat-ss-k2-bpsk").unwrap();
        cfg.snr_db = vec![10.0];
        cfg.min_bits = 200_000;
        cfg.detectors = vec![D3];
        let rec = &Experiment::new(&cfg).unwrap().run(0).unwrap()[0];
        let p = 1.0 / 22.0;
        let sd = (p * (1.0 - p) / rec.bits as f64).sqrt();
        assert!((rec.ber - p).abs() < 4.0 * sd, "{} vs {p}", rec.ber);
    }

    #[test]
    fn invalid_combinations_are_rejected() {
        let mut cfg = scenario("rb-mobility-50").unwrap();
        cfg.detectors.push(Glrt);
        assert!(cfg.validate().is_err());
        let mut cfg = scenario("flat-ss-k2-bpsk").unwrap();
        cfg.chain = Chain::Time;
        assert!(cfg.validate().is_err());
        let mut cfg = scenario("qam16-ds-k7").unwrap();
        cfg.modulation = Modulation::Qam64;
        cfg.detectors.push(D3Bf);
        assert!(cfg.validate().is_err());
        let mut cfg = scenario("flat-ss-k2-bpsk").unwrap();
        cfg.min_bits = 10;
        assert!(cfg.validate().is_err());
        cfg.min_bits = 10_000;
        cfg.snr_db.clear();
        assert!(cfg.validate().is_err());
        let json = scenario("flat-ss-k2-bpsk").unwrap().to_json().replacen('{', "{\"bogus\": 1,", 1);
        assert!(ExperimentConfig::from_json(&json).is_err());
    }
}
