//! Rate-1/2, K = 7 convolutional code (generators 171/131 octal) with
//! zero-tail termination, hard-decision Viterbi decoding, and a block
//! interleaver.

use crate::error::{invalid, Result};

/// Feed-forward convolutional code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvCode {
    pub generators: [u32; 2],
    pub constraint_length: usize,
}

impl Default for ConvCode {
    fn default() -> Self {
        Self { generators: [0o171, 0o131], constraint_length: 7 }
    }
}

impl ConvCode {
    pub fn states(&self) -> usize {
        1 << (self.constraint_length - 1)
    }

    pub fn tail(&self) -> usize {
        self.constraint_length - 1
    }

    /// Output pair for register contents `reg` (newest bit most significant).
    #[inline]
    fn outputs(&self, reg: u32) -> [u8; 2] {
        [((reg & self.generators[0]).count_ones() & 1) as u8, ((reg & self.generators[1]).count_ones() & 1) as u8]
    }

    /// Encodes `bits` followed by `K − 1` zero tail bits; the output has
    /// `2 (len + K − 1)` bits.
    pub fn encode(&self, bits: &[u8]) -> Vec<u8> {
        let shift = self.constraint_length - 1;
        let mut state = 0u32;
        let mut out = Vec::with_capacity(2 * (bits.len() + shift));
        for &b in bits.iter().chain(std::iter::repeat_n(&0u8, shift)) {
            let reg = ((b as u32 & 1) << shift) | state;
            out.extend_from_slice(&self.outputs(reg));
            state = reg >> 1;
        }
        out
    }

    /// Hard-decision Viterbi decoding of a zero-terminated stream under the
    /// Hamming metric; ties keep the lower-numbered predecessor.
    pub fn decode_hard(&self, coded: &[u8]) -> Result<Vec<u8>> {
        if !coded.len().is_multiple_of(2) {
            return Err(invalid(format!("coded length {} is odd", coded.len())));
        }
        let steps = coded.len() / 2;
        let shift = self.constraint_length - 1;
        if steps < shift {
            return Err(invalid("coded stream shorter than the tail"));
        }
        let ns = self.states();
        let unreachable = u32::MAX / 2;
        let mut pm = vec![unreachable; ns];
        pm[0] = 0;
        let mut next = vec![0u32; ns];
        // decisions[t][s]: input bit that entered state s, plus the dropped bit.
        let mut back = vec![0u8; steps * ns];
        let mut branch = [[0u8; 2]; 128];
        for reg in 0..(ns << 1) as u32 {
            branch[reg as usize] = self.outputs(reg);
        }
        for t in 0..steps {
            let rx = [coded[2 * t] & 1, coded[2 * t + 1] & 1];
            for s in 0..ns {
                // State s = reg >> 1 where reg = (b << shift) | prev.
                // Predecessors: prev = ((s << 1) | x) & (ns - 1) for x ∈ {0,1}.
                let b = (s >> (shift - 1)) as u32;
                let mut best = u32::MAX;
                let mut best_x = 0u8;
                for x in 0..2u32 {
                    let prev = (((s as u32) << 1) | x) & (ns as u32 - 1);
                    let reg = (b << shift) | prev;
                    let o = branch[reg as usize];
                    let d = (o[0] ^ rx[0]) as u32 + (o[1] ^ rx[1]) as u32;
                    let m = pm[prev as usize].saturating_add(d);
                    if m < best {
                        best = m;
                        best_x = x as u8;
                    }
                }
                next[s] = best;
                back[t * ns + s] = best_x;
            }
            std::mem::swap(&mut pm, &mut next);
        }
        let mut s = 0usize;
        let mut bits = vec![0u8; steps];
        for t in (0..steps).rev() {
            bits[t] = (s >> (shift - 1)) as u8 & 1;
            let x = back[t * ns + s] as usize;
            s = ((s << 1) | x) & (ns - 1);
        }
        bits.truncate(steps - shift);
        Ok(bits)
    }
}

/// Row-in, column-out block interleaver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockInterleaver {
    pub rows: usize,
    pub cols: usize,
}

impl Default for BlockInterleaver {
    fn default() -> Self {
        Self { rows: 512, cols: 512 }
    }
}

impl BlockInterleaver {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Output position of input index `i`.
    pub fn position(&self, i: usize) -> usize {
        (i % self.cols) * self.rows + i / self.cols
    }

    /// Permutes `bits`, zero-padding to the block length first.
    pub fn interleave(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() > self.len() {
            return Err(invalid(format!("{} bits exceed the interleaver size {}", bits.len(), self.len())));
        }
        let mut out = vec![0u8; self.len()];
        for i in 0..self.len() {
            out[self.position(i)] = bits.get(i).copied().unwrap_or(0);
        }
        Ok(out)
    }

    /// Inverse permutation of a full block.
    pub fn deinterleave(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.len() {
            return Err(invalid(format!("deinterleave needs exactly {} bits, got {}", self.len(), bits.len())));
        }
        Ok((0..self.len()).map(|i| bits[self.position(i)]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_bits(seed: u64, n: usize) -> Vec<u8> {
        let mut rng = RngStream::new(seed, 0).rng();
        (0..n).map(|_| rng.random::<bool>() as u8).collect()
    }

    #[test]
    fn zeros_encode_to_zeros() {
        let code = ConvCode::default();
        let out = code.encode(&[0; 20]);
        assert_eq!(out.len(), 2 * 26);
        assert!(out.iter().all(|&b| b == 0));
    }

    #[test]
    fn impulse_response_is_generator_taps() {
        // Octal digits expand to 3 bits each, newest tap first:
        // 171 → 1 111 001, 131 → 1 011 001.
        let oct = |s: &str| -> Vec<u8> {
            let bits: Vec<u8> = s
                .chars()
                .flat_map(|c| {
                    let d = c.to_digit(8).unwrap() as u8;
                    [d >> 2 & 1, d >> 1 & 1, d & 1]
                })
                .collect();
            bits[bits.len() - 7..].to_vec()
        };
        let g0 = oct("171");
        let g1 = oct("131");
        let code = ConvCode::default();
        let out = code.encode(&[1, 0, 0, 0, 0, 0, 0]);
        for t in 0..7 {
            assert_eq!(out[2 * t], g0[t]);
            assert_eq!(out[2 * t + 1], g1[t]);
        }
        assert!(out[14..].iter().all(|&b| b == 0));
    }

    #[test]
    fn round_trip_and_single_flip() {
        let code = ConvCode::default();
        for block in 0..10_000u64 {
            let bits = random_bits(block, 256);
            let mut coded = code.encode(&bits);
            assert_eq!(code.decode_hard(&coded).unwrap(), bits);
            if block < 500 {
                let pos = (block as usize * 37) % coded.len();
                coded[pos] ^= 1;
                assert_eq!(code.decode_hard(&coded).unwrap(), bits);
            }
        }
    }

    #[test]
    fn corrects_well_separated_errors() {
        // Free distance 10: two errors far apart are always corrected.
        let code = ConvCode::default();
        let bits = random_bits(99, 256);
        let coded = code.encode(&bits);
        for a in (0..200).step_by(13) {
            let mut c = coded.clone();
            c[a] ^= 1;
            c[a + 1] ^= 1;
            c[a + 300] ^= 1;
            assert_eq!(code.decode_hard(&c).unwrap(), bits);
        }
    }

    #[test]
    fn rejects_odd_length() {
        assert!(ConvCode::default().decode_hard(&[0, 1, 0]).is_err());
    }

    #[test]
    fn interleaver_layout() {
        let il = BlockInterleaver::default();
        assert_eq!(il.position(0), 0);
        assert_eq!(il.position(1), 512);
        for i in 0..2000 {
            let d = il.position(i + 1) as i64 - il.position(i) as i64;
            if (i + 1) % 512 != 0 {
                assert!(d.abs() >= 512);
            }
        }
        let bits = random_bits(5, il.len() - 1000);
        let x = il.interleave(&bits).unwrap();
        let y = il.deinterleave(&x).unwrap();
        assert_eq!(&y[..bits.len()], &bits[..]);
        assert!(y[bits.len()..].iter().all(|&b| b == 0));
        assert!(il.deinterleave(&bits).is_err());
    }

    proptest! {
        #[test]
        fn encoder_is_linear(seed in any::<u64>(), n in 1usize..300) {
            let code = ConvCode::default();
            let a = random_bits(seed, n);
            let b = random_bits(seed ^ 0xabcdef, n);
            let x: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            let lhs = code.encode(&x);
            let rhs: Vec<u8> = code.encode(&a).iter().zip(code.encode(&b)).map(|(p, q)| p ^ q).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn small_interleaver_bijective(rows in 1usize..20, cols in 1usize..20, seed in any::<u64>()) {
            let il = BlockInterleaver { rows, cols };
            let bits = random_bits(seed, il.len());
            prop_assert_eq!(il.deinterleave(&il.interleave(&bits).unwrap()).unwrap(), bits);
        }
    }
}
