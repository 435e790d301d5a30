use super::{d3_viterbi, DetectionResult};
use crate::error::{invalid, Result};
use crate::frame::{Constellation, Grid, ResourceBlockLayout};
use crate::numerics::Complex;

/// Two-step D³ over one resource block.
///
/// Step 1 runs the 1-D detector along time on every pilot-bearing row.
/// Step 2 runs it along frequency on every column, anchored at the
/// pilot-row cells decided in step 1. Decisions are returned in
/// [`ResourceBlockLayout::data_cells`] order.
pub fn detect_resource_block(rx: &Grid, layout: &ResourceBlockLayout, c: &Constellation) -> Result<DetectionResult> {
    layout.validate()?;
    if rx.rows != layout.rows || rx.cols != layout.cols {
        return Err(invalid(format!(
            "received grid is {}x{}, layout is {}x{}",
            rx.rows, rx.cols, layout.rows, layout.cols
        )));
    }
    let mut decided: Vec<Option<usize>> = vec![None; rx.rows * rx.cols];
    let at = |r: usize, col: usize| r * rx.cols + col;
    let pilot_rows = layout.pilot_rows();

    for &row in &pilot_rows {
        let anchors: Vec<Option<Complex>> =
            (0..rx.cols).map(|col| layout.is_pilot(row, col).then(|| layout.pilot())).collect();
        let out = d3_viterbi(&rx.row(row), &anchors, c)?;
        let mut it = out.indices.into_iter();
        for col in 0..rx.cols {
            if anchors[col].is_none() {
                decided[at(row, col)] = it.next();
            }
        }
    }

    for col in 0..rx.cols {
        let anchors: Vec<Option<Complex>> = (0..rx.rows)
            .map(|row| {
                if layout.is_pilot(row, col) {
                    Some(layout.pilot())
                } else {
                    decided[at(row, col)].map(|i| c.point(i))
                }
            })
            .collect();
        let out = d3_viterbi(&rx.col(col), &anchors, c)?;
        let mut it = out.indices.into_iter();
        for row in 0..rx.rows {
            if anchors[row].is_none() {
                decided[at(row, col)] = it.next();
            }
        }
    }

    let indices =
        layout.data_cells().iter().map(|&(r, col)| decided[at(r, col)].expect("every data cell decided")).collect();
    Ok(DetectionResult::from_indices(indices, c, 0.0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{build_resource_block, Modulation};
    use crate::numerics::RngStream;
    use rand::Rng;

    #[test]
    fn noiseless_static_block() {
        let layout = ResourceBlockLayout::default();
        let mut rng = RngStream::new(8, 0).rng();
        for m in [Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16] {
            let c = Constellation::new(m);
            let idx: Vec<usize> = (0..160).map(|_| rng.random_range(0..c.size())).collect();
            let data: Vec<Complex> = idx.iter().map(|&i| c.point(i)).collect();
            let tx = build_resource_block(&data, &layout).unwrap();
            let mut rx = tx.clone();
            // Slowly varying channel across the block.
            for r in 0..12 {
                for col in 0..14 {
                    let h = Complex::from_polar(0.8 + 0.01 * r as f64, 0.3 + 0.02 * r as f64 + 0.01 * col as f64);
                    rx.set(r, col, h * tx.get(r, col));
                }
            }
            let out = detect_resource_block(&rx, &layout, &c).unwrap();
            assert_eq!(out.indices, idx, "{m:?}");
        }
    }

    #[test]
    fn rejects_mismatched_grid() {
        let layout = ResourceBlockLayout::default();
        let c = Constellation::new(Modulation::Bpsk);
        assert!(detect_resource_block(&Grid::zeros(12, 13), &layout, &c).is_err());
    }
}
