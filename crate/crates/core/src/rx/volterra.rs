//! Sparse Volterra equalizer structure: per-order tap windows, a delay-spread
//! cap that prunes cross terms, and the weighted polynomial filter itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive tap-delay window; index `l` addresses input sample y[n - l],
/// so negative `l` reaches into the future (anti-causal side).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapWindow {
    pub lo: i32,
    pub hi: i32,
}

impl TapWindow {
    /// Window -l ..= l.
    pub fn symmetric(l: u32) -> Self {
        Self {
            lo: -(l as i32),
            hi: l as i32,
        }
    }

    /// Window of `total` taps centered on zero, with the extra tap on the
    /// causal (positive-delay) side when `total` is even.
    pub fn from_total_taps(total: usize) -> Self {
        let hi = (total / 2) as i32;
        Self {
            lo: hi - total as i32 + 1,
            hi,
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

/// Structure of a sparse Volterra equalizer: one tap window per polynomial
/// order 1..=q_max and, for orders >= 2, a cap on the delay spread
/// (max - min) within any product term. A cap equal to the full window
/// width disables pruning and recovers the dense Volterra expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolterraConfig {
    /// windows[q - 1] is the tap window of order q.
    pub windows: Vec<TapWindow>,
    /// max_delay_diff[q - 1] caps max - min inside an order-q term;
    /// the order-1 entry is ignored.
    pub max_delay_diff: Vec<u32>,
    /// Upper bound on the term count of any single order.
    pub term_budget_per_order: usize,
}

pub const DEFAULT_TERM_BUDGET: usize = 50;

impl VolterraConfig {
    /// Symmetric windows +/- spans[q-1] per order with the given delay caps.
    pub fn symmetric(spans: &[u32], max_delay_diff: &[u32]) -> Result<Self> {
        let cfg = Self {
            windows: spans.iter().map(|&l| TapWindow::symmetric(l)).collect(),
            max_delay_diff: max_delay_diff.to_vec(),
            term_budget_per_order: DEFAULT_TERM_BUDGET,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Purely linear equalizer with taps -l ..= l.
    pub fn linear(l: u32) -> Self {
        Self {
            windows: vec![TapWindow::symmetric(l)],
            max_delay_diff: vec![0],
            term_budget_per_order: DEFAULT_TERM_BUDGET,
        }
    }

    /// Fifth-order preset used by the reference receiver: 25 linear taps,
    /// then per-order window lengths {16, 7, 3, 2} with the extra tap on
    /// the causal side, adjacent-only cross terms at order 2 and pure
    /// powers above.
    pub fn reference_preset() -> Self {
        Self {
            windows: vec![
                TapWindow::symmetric(12),
                TapWindow::from_total_taps(16),
                TapWindow::from_total_taps(7),
                TapWindow::from_total_taps(3),
                TapWindow::from_total_taps(2),
            ],
            max_delay_diff: vec![0, 1, 0, 0, 0],
            term_budget_per_order: DEFAULT_TERM_BUDGET,
        }
    }

    pub fn q_max(&self) -> usize {
        self.windows.len()
    }

    /// Copy of this config keeping only orders 1..=q_max.
    pub fn truncated(&self, q_max: usize) -> Result<Self> {
        if q_max == 0 || q_max > self.windows.len() {
            return Err(Error::Config(format!(
                "cannot truncate a {}-order config to {q_max} orders",
                self.windows.len()
            )));
        }
        Ok(Self {
            windows: self.windows[..q_max].to_vec(),
            max_delay_diff: self.max_delay_diff[..q_max].to_vec(),
            term_budget_per_order: self.term_budget_per_order,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::Config("equalizer needs at least order 1".into()));
        }
        if self.max_delay_diff.len() != self.windows.len() {
            return Err(Error::Config(format!(
                "got {} delay caps for {} orders",
                self.max_delay_diff.len(),
                self.windows.len()
            )));
        }
        if self.term_budget_per_order == 0 {
            return Err(Error::Config("term budget must be positive".into()));
        }
        for (i, w) in self.windows.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::Config(format!(
                    "order {} tap window is empty ({}..{})",
                    i + 1,
                    w.lo,
                    w.hi
                )));
            }
            let width = (w.hi - w.lo) as u32;
            if i > 0 && self.max_delay_diff[i] > width {
                return Err(Error::Config(format!(
                    "order {} delay cap {} exceeds the window width {}",
                    i + 1,
                    self.max_delay_diff[i],
                    width
                )));
            }
        }
        Ok(())
    }
}

/// One product term: the sorted delays of its input factors. A term of
/// length q multiplies q (possibly repeated) input samples.
pub type Term = Vec<i32>;

/// Enumerate the canonical term set: per order, all non-decreasing delay
/// tuples inside the order's window whose spread (max - min) stays within
/// the order's cap. Order 1 contributes exactly its window of linear taps.
pub fn build_term_set(config: &VolterraConfig) -> Result<Vec<Term>> {
    config.validate()?;
    let mut terms = Vec::new();
    for (i, window) in config.windows.iter().enumerate() {
        let q = i + 1;
        let spread = if q == 1 {
            (window.hi - window.lo) as u32
        } else {
            config.max_delay_diff[i]
        };
        let start = terms.len();
        let mut tuple = Vec::with_capacity(q);
        extend_tuples(window, q, spread as i32, &mut tuple, &mut terms);
        let count = terms.len() - start;
        if count > config.term_budget_per_order {
            return Err(Error::Config(format!(
                "order {q} produces {count} terms, over the budget of {}",
                config.term_budget_per_order
            )));
        }
    }
    Ok(terms)
}

/// Depth-first enumeration of non-decreasing tuples; `tuple[0]` anchors the
/// allowed spread, so every later delay lies in [last, first + spread].
fn extend_tuples(window: &TapWindow, q: usize, spread: i32, tuple: &mut Term, out: &mut Vec<Term>) {
    if tuple.len() == q {
        out.push(tuple.clone());
        return;
    }
    let (lo, hi) = if tuple.is_empty() {
        (window.lo, window.hi)
    } else {
        (*tuple.last().unwrap(), (tuple[0] + spread).min(window.hi))
    };
    for l in lo..=hi {
        tuple.push(l);
        extend_tuples(window, q, spread, tuple, out);
        tuple.pop();
    }
}

/// A trained (or explicitly constructed) Volterra equalizer: weights
/// aligned one-to-one with the canonical term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolterraEqualizer {
    pub q_max: usize,
    pub terms: Vec<Term>,
    pub weights: Vec<f64>,
    pub beta: f64,
    pub training_mse: f64,
}

impl VolterraEqualizer {
    pub fn new(terms: Vec<Term>, weights: Vec<f64>, beta: f64, training_mse: f64) -> Result<Self> {
        let q_max = terms.iter().map(Vec::len).max().unwrap_or(0);
        let eq = Self {
            q_max,
            terms,
            weights,
            beta,
            training_mse,
        };
        eq.validate()?;
        Ok(eq)
    }

    /// Pure delay-free pass-through: weight 1 on the linear center tap.
    pub fn linear_identity(terms: Vec<Term>) -> Result<Self> {
        let weights = terms
            .iter()
            .map(|t| if t.as_slice() == [0] { 1.0 } else { 0.0 })
            .collect::<Vec<_>>();
        if !weights.contains(&1.0) {
            return Err(Error::Config(
                "term set has no linear center tap to set to 1".into(),
            ));
        }
        Self::new(terms, weights, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.len() != self.weights.len() {
            return Err(Error::Config(format!(
                "{} weights for {} terms",
                self.weights.len(),
                self.terms.len()
            )));
        }
        if self.terms.is_empty() {
            return Err(Error::Config("equalizer has no terms".into()));
        }
        if !self.weights.iter().all(|w| w.is_finite()) {
            return Err(Error::Config("equalizer weights must be finite".into()));
        }
        for t in &self.terms {
            if t.is_empty() || t.windows(2).any(|p| p[0] > p[1]) {
                return Err(Error::Config(format!("term {t:?} is not canonical")));
            }
        }
        Ok(())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let eq: Self =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        eq.validate()?;
        Ok(eq)
    }
}

/// Value of one product term at output index n, with zero padding outside
/// the record. Any out-of-range factor zeroes the whole product.
#[inline]
pub(crate) fn term_value(term: &[i32], y: &[f64], n: usize) -> f64 {
    let mut prod = 1.0;
    for &l in term {
        let idx = n as i64 - l as i64;
        if idx < 0 || idx >= y.len() as i64 {
            return 0.0;
        }
        prod *= y[idx as usize];
    }
    prod
}

/// Run the equalizer over a symbol-rate sequence:
/// z[n] = sum_i w_i * prod_{l in term_i} y[n - l].
pub fn volterra_apply(eq: &VolterraEqualizer, y: &[f64]) -> Result<Vec<f64>> {
    eq.validate()?;
    let mut z = vec![0.0; y.len()];
    for (slot_n, slot) in z.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (term, &w) in eq.terms.iter().zip(&eq.weights) {
            if w != 0.0 {
                acc += w * term_value(term, y, slot_n);
            }
        }
        *slot = acc;
    }
    Ok(z)
}
