//! Physical configuration and Fock-space truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Largest Poisson weight allowed to fall outside the truncated Fock space.
pub const TAIL_LIMIT: f64 = 1e-12;

/// Smallest usable cutoff; `<a^4>` couples block `n` to `n + 4`.
pub const MIN_CUTOFF: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// `R = g2 / g1`.
    pub coupling_ratio: f64,
    /// Initial mean photon number `|alpha|^2`.
    pub nbar: f64,
    /// Coherent-state phase `phi` in radians.
    pub phase: f64,
    /// Highest excitation block kept.
    pub cutoff: usize,
}

impl ModelParams {
    /// Parameters with `phase = 0` and the automatic cutoff.
    pub fn new(coupling_ratio: f64, nbar: f64) -> Self {
        Self {
            coupling_ratio,
            nbar,
            phase: 0.0,
            cutoff: auto_cutoff(nbar),
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    /// Coherent amplitude `alpha = sqrt(nbar) e^{i phi}`.
    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.nbar.sqrt(), self.phase)
    }

    /// Checks every invariant, including the Poisson tail bound.
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_ratio.is_finite() && self.coupling_ratio >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling ratio must be finite and >= 0, got {}",
                self.coupling_ratio
            )));
        }
        if !(self.nbar.is_finite() && self.nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "nbar must be finite and >= 0, got {}",
                self.nbar
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phase must be finite, got {}",
                self.phase
            )));
        }
        let tail = poisson_tail(self.nbar, self.cutoff);
        if self.cutoff < MIN_CUTOFF || tail >= TAIL_LIMIT {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                nbar: self.nbar,
                tail,
                limit: TAIL_LIMIT,
            });
        }
        Ok(())
    }
}

/// `N_max = max(20, ceil(nbar + 12 sqrt(nbar + 1) + 8))`.
pub fn auto_cutoff(nbar: f64) -> usize {
    let n = (nbar + 12.0 * (nbar + 1.0).sqrt() + 8.0).ceil();
    if n.is_finite() {
        (n as usize).max(20)
    } else {
        20
    }
}

/// Poisson weights `p_n = e^{-nbar} nbar^n / n!` for `n = 0..=cutoff`.
pub fn poisson_weights(nbar: f64, cutoff: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(cutoff + 1);
    let mut w = (-nbar).exp();
    p.push(w);
    for n in 1..=cutoff {
        w *= nbar / n as f64;
        p.push(w);
    }
    p
}

/// Coherent amplitudes `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for `n = 0..=cutoff`.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut w = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    w.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        w.push(c);
    }
    w
}

/// Poisson mass above `cutoff`, summed term by term.
pub fn poisson_tail(nbar: f64, cutoff: usize) -> f64 {
    if nbar == 0.0 {
        return 0.0;
    }
    let p = poisson_weights(nbar, cutoff);
    let mut term = p[cutoff];
    let mut tail = 0.0;
    let mut n = cutoff;
    loop {
        n += 1;
        term *= nbar / n as f64;
        tail += term;
        if term < tail * 1e-17 || term == 0.0 {
            break;
        }
    }
    tail
}
