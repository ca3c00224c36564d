//! QAM constellations with Gray (square/rectangular) or quasi-Gray (cross)
//! bit labels, normalized to unit average energy.
//!
//! Supported orders: 2 (BPSK), 4/16/64/256 (square, per-axis reflected Gray),
//! 8 (4x2 rectangular, per-axis Gray), 32/128/512 (cross: square grid with
//! corner blocks folded in from the sides of a wider rectangle; fold blocks
//! keep their internal adjacency, so labels stay Gray except at fold seams).

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    /// Point for each label value, indexed 0..order.
    points: Vec<Complex64>,
}

fn gray(n: usize) -> usize {
    n ^ (n >> 1)
}

impl Constellation {
    /// Shared instance for `bits` bits per symbol (1..=9); built once.
    pub fn for_bits(bits: u8) -> Result<&'static Constellation> {
        static CACHE: std::sync::OnceLock<Vec<Constellation>> = std::sync::OnceLock::new();
        if !(1..=9).contains(&bits) {
            return Err(Error::Config(format!(
                "no constellation with {bits} bits per symbol"
            )));
        }
        let all = CACHE.get_or_init(|| {
            (1..=9u32)
                .map(|b| Constellation::new(1usize << b).expect("ladder order"))
                .collect()
        });
        Ok(&all[bits as usize - 1])
    }

    /// Build the constellation for modulation order `order`.
    pub fn new(order: usize) -> Result<Self> {
        if !matches!(order, 2 | 4 | 8 | 16 | 32 | 64 | 128 | 256 | 512) {
            return Err(Error::Config(format!(
                "unsupported modulation order {order}; expected a power of two in 2..=512"
            )));
        }
        let bits = order.trailing_zeros() as usize;
        let mut points = vec![Complex64::new(0.0, 0.0); order];

        if order == 2 {
            points[0] = Complex64::new(-1.0, 0.0);
            points[1] = Complex64::new(1.0, 0.0);
        } else if bits % 2 == 0 {
            // Square grid, independent Gray code per axis.
            let nb = bits / 2;
            let levels = 1usize << nb;
            for i in 0..levels {
                for q in 0..levels {
                    let label = (gray(i) << nb) | gray(q);
                    let x = (2 * i) as f64 - (levels - 1) as f64;
                    let y = (2 * q) as f64 - (levels - 1) as f64;
                    points[label] = Complex64::new(x, y);
                }
            }
        } else if order == 8 {
            // 4x2 rectangle: 2 Gray bits on I, 1 on Q.
            for i in 0..4 {
                for q in 0..2 {
                    let label = (gray(i) << 1) | q;
                    let x = (2 * i) as f64 - 3.0;
                    let y = (2 * q) as f64 - 1.0;
                    points[label] = Complex64::new(x, y);
                }
            }
        } else {
            // Cross constellation: start from a Gray-labeled 2^((b+1)/2) x
            // 2^((b-1)/2) rectangle and fold the outer column blocks into the
            // rows above and below the core, yielding an n x n grid with c x c
            // corners removed (n = n_i - 2c, c = n_i / 8).
            let nb_i = (bits + 1) / 2;
            let nb_q = bits / 2;
            let n_i = 1usize << nb_i;
            let n_q = 1usize << nb_q;
            let c = n_i / 8;
            let n = n_i - 2 * c;
            for i in 0..n_i {
                for q in 0..n_q {
                    let label = (gray(i) << nb_q) | gray(q);
                    let (u, v) = if i < c {
                        (c + q, i) // left block folds to the bottom rows
                    } else if i >= n_i - c {
                        (c + q, n_q + c + (i - (n_i - c))) // right block to the top
                    } else {
                        (i - c, c + q)
                    };
                    let x = (2 * u) as f64 - (n - 1) as f64;
                    let y = (2 * v) as f64 - (n - 1) as f64;
                    points[label] = Complex64::new(x, y);
                }
            }
        }

        let mean_energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
        let scale = 1.0 / mean_energy.sqrt();
        for p in &mut points {
            *p *= scale;
        }
        Ok(Self {
            order,
            bits_per_symbol: bits,
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point_for_label(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// Map `bits_per_symbol` bits (MSB first) to a constellation point.
    pub fn map_bits(&self, bits: &[bool]) -> Result<Complex64> {
        if bits.len() != self.bits_per_symbol {
            return Err(Error::Framing(format!(
                "expected {} bits per symbol for M={}, got {}",
                self.bits_per_symbol,
                self.order,
                bits.len()
            )));
        }
        let label = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        Ok(self.points[label])
    }

    /// Label of the minimum-Euclidean-distance point.
    pub fn nearest_label(&self, symbol: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (symbol - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    /// Hard-decision demap: appends `bits_per_symbol` bits (MSB first) to `out`.
    pub fn demap_into(&self, symbol: Complex64, out: &mut Vec<bool>) {
        let label = self.nearest_label(symbol);
        for j in (0..self.bits_per_symbol).rev() {
            out.push((label >> j) & 1 == 1);
        }
    }

    /// Hard-decision demap returning the bits of the nearest point.
    pub fn demap(&self, symbol: Complex64) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.bits_per_symbol);
        self.demap_into(symbol, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_ORDERS: [usize; 9] = [2, 4, 8, 16, 32, 64, 128, 256, 512];

    fn label_bits(label: usize, width: usize) -> Vec<bool> {
        (0..width).rev().map(|j| (label >> j) & 1 == 1).collect()
    }

    #[test]
    fn unit_average_energy() {
        for m in ALL_ORDERS {
            let c = Constellation::new(m).unwrap();
            let mean: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
            assert!((mean - 1.0).abs() < 1e-12, "M={m}: mean energy {mean}");
        }
    }

    #[test]
    fn labels_round_trip_for_every_order() {
        for m in ALL_ORDERS {
            let c = Constellation::new(m).unwrap();
            for label in 0..m {
                let bits = label_bits(label, c.bits_per_symbol());
                let sym = c.map_bits(&bits).unwrap();
                assert_eq!(c.demap(sym), bits, "M={m} label={label}");
            }
            // All points distinct.
            for a in 0..m {
                for b in a + 1..m {
                    assert!(
                        (c.point_for_label(a) - c.point_for_label(b)).norm() > 1e-9,
                        "M={m}: labels {a} and {b} collide"
                    );
                }
            }
        }
    }

    #[test]
    fn bpsk_is_plus_minus_one() {
        let c = Constellation::new(2).unwrap();
        assert!((c.point_for_label(0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((c.point_for_label(1) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn square_nearest_neighbors_differ_in_one_bit() {
        for m in [4usize, 16, 64, 256] {
            let c = Constellation::new(m).unwrap();
            // Minimum distance = one grid step.
            let mut min_d = f64::INFINITY;
            for a in 0..m {
                for b in a + 1..m {
                    min_d = min_d.min((c.point_for_label(a) - c.point_for_label(b)).norm());
                }
            }
            for a in 0..m {
                for b in 0..m {
                    if a == b {
                        continue;
                    }
                    let d = (c.point_for_label(a) - c.point_for_label(b)).norm();
                    if d < min_d + 1e-9 {
                        let ham = (a ^ b).count_ones();
                        assert_eq!(ham, 1, "M={m}: neighbors {a},{b} differ in {ham} bits");
                    }
                }
            }
        }
    }

    #[test]
    fn cross_orders_have_expected_shape() {
        // 32 -> 6x6 minus 1x1 corners, 128 -> 12x12 minus 2x2,
        // 512 -> 24x24 minus 4x4: verify extreme coordinates and symmetry.
        for (m, n, c_cut) in [(32usize, 6i64, 1i64), (128, 12, 2), (512, 24, 4)] {
            let c = Constellation::new(m).unwrap();
            let step = {
                let mut min_d = f64::INFINITY;
                for a in 0..m {
                    for b in a + 1..m {
                        min_d = min_d.min((c.point_for_label(a) - c.point_for_label(b)).norm());
                    }
                }
                min_d
            };
            // Corner cells must be absent: max |x| and |y| never co-occur.
            let max_c = (n - 1) as f64 * step / 2.0;
            let corner_band = max_c - (c_cut as f64 - 0.5) * step;
            for p in c.points() {
                assert!(
                    !(p.re.abs() > corner_band && p.im.abs() > corner_band),
                    "M={m}: corner point {p} present"
                );
            }
            // Four-fold symmetry of the point set.
            for p in c.points() {
                for q in [
                    Complex64::new(-p.re, p.im),
                    Complex64::new(p.re, -p.im),
                    Complex64::new(-p.re, -p.im),
                ] {
                    assert!(
                        c.points().iter().any(|r| (r - q).norm() < 1e-9),
                        "M={m}: point set not symmetric at {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        for m in [0usize, 1, 3, 6, 1024] {
            assert!(Constellation::new(m).is_err(), "M={m} should be rejected");
        }
    }

    #[test]
    fn wrong_bit_count_is_a_framing_error() {
        let c = Constellation::new(16).unwrap();
        assert!(c.map_bits(&[true, false]).is_err());
    }
}
