use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A turn-point search strategy on the line.
///
/// Iteration `i` walks `turn(i)` away from the origin (right on even `i`,
/// left on odd `i`) and back. Past the listed turns every iteration walks the
/// terminal distance, so both directions are eventually covered up to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    turns: Vec<f64>,
    terminal: f64,
    lambda: f64,
}

impl Strategy {
    /// Validates a monotone strategy whose turns are all at least `lambda`.
    pub fn new(turns: Vec<f64>, terminal: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        if !(terminal.is_finite() && terminal >= lambda) {
            return Err(Error::InvalidArgument(format!(
                "terminal {terminal} must be finite and at least lambda {lambda}"
            )));
        }
        let floor = lambda * (1.0 - 1e-12);
        for (i, &t) in turns.iter().enumerate() {
            if !t.is_finite() || t < floor {
                return Err(Error::InvalidArgument(format!("turn {i} = {t} is below lambda {lambda}")));
            }
            if i > 0 && t < turns[i - 1] {
                return Err(Error::NotMonotone(i));
            }
        }
        if let Some(&last) = turns.last() {
            if last > terminal {
                return Err(Error::NotMonotone(turns.len()));
            }
        }
        Ok(Strategy { turns, terminal, lambda })
    }

    /// The single-shot strategy that walks straight to `terminal` each time.
    pub fn single_shot(terminal: f64, lambda: f64) -> Result<Self> {
        Self::new(Vec::new(), terminal, lambda)
    }

    pub fn turns(&self) -> &[f64] {
        &self.turns
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Distance walked in iteration `i`.
    pub fn turn(&self, i: usize) -> f64 {
        self.turns.get(i).copied().unwrap_or(self.terminal)
    }

    /// Turns followed by the terminal distance.
    pub fn with_terminal(&self) -> Vec<f64> {
        let mut v = self.turns.clone();
        v.push(self.terminal);
        v
    }

    /// The same strategy with every distance multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.turns.iter().map(|t| t * c).collect(),
            self.terminal * c,
            self.lambda * c,
        )
    }
}
