//! Recursive-least-squares training of the Volterra equalizer weights
//! against a known reference sequence.

use nalgebra::{DMatrix, DVector};

use super::volterra::{term_value, Term, VolterraEqualizer};
use crate::error::{Error, Result};

/// Exponentially weighted RLS state: inverse-correlation estimate S,
/// forgetting factor beta, and the iteration counter.
#[derive(Debug, Clone)]
pub struct RlsState {
    pub s: DMatrix<f64>,
    pub beta: f64,
    pub iteration: usize,
    /// Initialization scale: S starts as (1 / var(x_ref)) * I.
    pub init_scale: f64,
}

/// Default forgetting factor: slow enough to average noise, fast enough to
/// track within a single training burst.
pub const DEFAULT_BETA: f64 = 0.9995;

/// Errors from this many trailing iterations form the reported training MSE.
const MSE_WINDOW: usize = 200;

/// Train equalizer weights so that the filtered received sequence `y`
/// tracks the reference `x_ref`, minimizing the beta-discounted squared
/// error. Returns the equalizer with the trailing windowed MSE recorded.
///
/// With `n_iter = 0` the zero-initialized weights are returned unchanged
/// and the reported MSE is that of the zero predictor.
pub fn rls_train(
    terms: &[Term],
    y: &[f64],
    x_ref: &[f64],
    beta: f64,
    n_iter: usize,
) -> Result<VolterraEqualizer> {
    if !(beta > 0.9 && beta <= 1.0) {
        return Err(Error::Config(format!(
            "forgetting factor must lie in (0.9, 1], got {beta}"
        )));
    }
    if terms.is_empty() {
        return Err(Error::Config("cannot train an empty term set".into()));
    }
    if y.len() != x_ref.len() {
        return Err(Error::Config(format!(
            "received record ({}) and reference ({}) differ in length",
            y.len(),
            x_ref.len()
        )));
    }
    if n_iter > y.len() {
        return Err(Error::Config(format!(
            "n_iter {n_iter} exceeds the {}-sample training record",
            y.len()
        )));
    }
    let n_terms = terms.len();
    if n_iter > 0 && n_iter < 10 * n_terms {
        log::warn!(
            "training run of {n_iter} iterations is short for {n_terms} weights; \
             expect an unconverged equalizer"
        );
    }
    let var_ref = variance(x_ref);
    let init_scale = if var_ref > 1e-30 { 1.0 / var_ref } else { 1.0 };
    let mut state = RlsState {
        s: DMatrix::identity(n_terms, n_terms) * init_scale,
        beta,
        iteration: 0,
        init_scale,
    };
    let mut w = DVector::zeros(n_terms);
    let mut phi = DVector::zeros(n_terms);
    let mut window = std::collections::VecDeque::with_capacity(MSE_WINDOW);
    for n in 0..n_iter {
        for (i, term) in terms.iter().enumerate() {
            phi[i] = term_value(term, y, n);
        }
        let e = x_ref[n] - w.dot(&phi);
        let s_vec = &state.s * &phi;
        let denom = beta + phi.dot(&s_vec);
        let gain = &s_vec / denom;
        // Rank-one downdate, then re-symmetrize against float drift.
        state.s -= &gain * s_vec.transpose();
        state.s /= beta;
        symmetrize(&mut state.s);
        w += e * &gain;
        state.iteration = n + 1;
        if !e.is_finite() || !denom.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::TrainingDiverged { iteration: n });
        }
        if window.len() == MSE_WINDOW {
            window.pop_front();
        }
        window.push_back(e * e);
    }
    let training_mse = if window.is_empty() {
        // Zero predictor: its error is the reference itself.
        x_ref.iter().map(|v| v * v).sum::<f64>() / x_ref.len().max(1) as f64
    } else {
        window.iter().sum::<f64>() / window.len() as f64
    };
    VolterraEqualizer::new(terms.to_vec(), w.iter().copied().collect(), beta, training_mse)
}

fn variance(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

fn symmetrize(s: &mut DMatrix<f64>) {
    let n = s.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = avg;
            s[(j, i)] = avg;
        }
    }
}
