//! Regenerates `src/loading/cross_tables.rs`: Monte Carlo BER-vs-SNR curves
//! for the cross/rectangular constellations (M = 8, 32, 128, 512), which have
//! no closed-form Gray-coded BER expression.
//!
//! Run from the crate root and redirect stdout:
//!
//! ```text
//! cargo run --release -p lifi-core --example gen_cross_snr_tables \
//!     > crates/core/src/loading/cross_tables.rs
//! ```
//!
//! The RNG seed is fixed, so the output is reproducible byte for byte.

use lifi_core::dsp::Constellation;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_cab1e_5;
const GRID_START_DB: f64 = 0.0;
const GRID_STEP_DB: f64 = 0.5;
const GRID_LEN: usize = 85; // 0.0 ..= 42.0 dB
const SYMBOLS_PER_POINT: usize = 1_000_000;

/// Exact nearest-label demapper over the constellation's integer lattice.
/// Quantizes to the grid cell and, when the cell is a cut corner of a cross
/// layout, compares the (at most three) valid cells adjacent to the corner.
struct LatticeDemapper {
    n_cols: usize,
    n_rows: usize,
    step: f64,
    x0: f64,
    y0: f64,
    label_at: Vec<i32>,
    points: Vec<Complex64>,
}

impl LatticeDemapper {
    fn new(c: &Constellation) -> Self {
        let points = c.points().to_vec();
        let mut step = f64::INFINITY;
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                step = step.min((points[a] - points[b]).norm());
            }
        }
        let x0 = points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
        let y0 = points.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
        let x1 = points.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        let y1 = points.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max);
        let n_cols = ((x1 - x0) / step).round() as usize + 1;
        let n_rows = ((y1 - y0) / step).round() as usize + 1;
        let mut label_at = vec![-1i32; n_cols * n_rows];
        for (label, p) in points.iter().enumerate() {
            let u = ((p.re - x0) / step).round() as usize;
            let v = ((p.im - y0) / step).round() as usize;
            label_at[v * n_cols + u] = label as i32;
        }
        Self {
            n_cols,
            n_rows,
            step,
            x0,
            y0,
            label_at,
            points,
        }
    }

    fn demap(&self, sym: Complex64) -> usize {
        let uf = (sym.re - self.x0) / self.step;
        let vf = (sym.im - self.y0) / self.step;
        let u = (uf.round().max(0.0) as usize).min(self.n_cols - 1);
        let v = (vf.round().max(0.0) as usize).min(self.n_rows - 1);
        let direct = self.label_at[v * self.n_cols + u];
        if direct >= 0 {
            return direct as usize;
        }
        // Cut corner: the valid set near the corner is the union of two
        // half-planes, so the nearest valid cell keeps one coordinate and
        // clamps the other just inside the cut. Walk each axis inward.
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for axis in 0..2 {
            let (mut uu, mut vv) = (u, v);
            while self.label_at[vv * self.n_cols + uu] < 0 {
                if axis == 0 {
                    uu = Self::step_inward(uu, self.n_cols);
                } else {
                    vv = Self::step_inward(vv, self.n_rows);
                }
            }
            let label = self.label_at[vv * self.n_cols + uu] as usize;
            let d = (sym - self.points[label]).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    fn step_inward(i: usize, n: usize) -> usize {
        if i < n / 2 {
            i + 1
        } else {
            i - 1
        }
    }
}

fn ber_at(c: &Constellation, demapper: &LatticeDemapper, snr_db: f64, rng: &mut ChaCha8Rng) -> f64 {
    let gamma = 10f64.powf(snr_db / 10.0);
    // Unit average symbol energy; complex noise variance 1/gamma.
    let sigma_axis = (0.5 / gamma).sqrt();
    let m = c.order();
    let bits = c.bits_per_symbol();
    let mut bit_errors = 0u64;
    for _ in 0..SYMBOLS_PER_POINT {
        let label = rng.random_range(0..m);
        let p = c.point_for_label(label);
        let noisy = Complex64::new(
            p.re + sigma_axis * normal(rng),
            p.im + sigma_axis * normal(rng),
        );
        let decided = demapper.demap(noisy);
        bit_errors += (label ^ decided).count_ones() as u64;
    }
    bit_errors as f64 / (SYMBOLS_PER_POINT * bits) as f64
}

/// Box-Muller standard normal.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u1: f64 = rng.random();
        if u1 > 1e-300 {
            let u2: f64 = rng.random();
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

fn main() {
    println!("//! Monte Carlo BER-vs-SNR tables for the constellations without a");
    println!("//! closed-form Gray-coded BER formula (M = 8, 32, 128, 512).");
    println!("//!");
    println!("//! Generated by `examples/gen_cross_snr_tables.rs` (seed {SEED:#x},");
    println!("//! {SYMBOLS_PER_POINT} symbols per grid point). Do not edit by hand.");
    println!();
    println!("pub(super) const GRID_START_DB: f64 = {GRID_START_DB:?};");
    println!("pub(super) const GRID_STEP_DB: f64 = {GRID_STEP_DB:?};");
    println!("pub(super) const GRID_LEN: usize = {GRID_LEN};");
    for order in [8usize, 32, 128, 512] {
        let c = Constellation::new(order).expect("supported order");
        let demapper = LatticeDemapper::new(&c);
        // Spot-check the fast demapper against the exhaustive scan.
        let mut check_rng = ChaCha8Rng::seed_from_u64(SEED ^ order as u64);
        for _ in 0..20_000 {
            let sym = Complex64::new(
                3.0 * (check_rng.random::<f64>() - 0.5),
                3.0 * (check_rng.random::<f64>() - 0.5),
            );
            assert_eq!(
                demapper.demap(sym),
                c.nearest_label(sym),
                "fast demapper mismatch for M={order} at {sym}"
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add(order as u64));
        println!();
        println!("pub(super) const BER_M{order}: [f64; GRID_LEN] = [");
        for i in 0..GRID_LEN {
            let snr_db = GRID_START_DB + i as f64 * GRID_STEP_DB;
            let ber = ber_at(&c, &demapper, snr_db, &mut rng);
            println!("    {ber:e},");
        }
        println!("];");
        eprintln!("M={order} done");
    }
}
