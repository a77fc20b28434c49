//! Textbook reference models for the two limits of the coupling ratio.
//!
//! `R = 0` is the single-atom Jaynes–Cummings model. `R = 1` is two identical
//! atoms, which never leave the symmetric (Dicke) subspace
//! `{|ee>, (|eg> + |ge>)/sqrt(2), |gg>}`. Both are written out here with their
//! own moment sums so they share no code with the main path.

use crate::C64;

/// Field amplitudes indexed by atomic configuration and photon number.
pub struct ReferenceState {
    components: Vec<Vec<C64>>,
}

fn coherent(nbar: f64, cutoff: usize) -> Vec<f64> {
    let mut w = vec![(-nbar / 2.0).exp()];
    for n in 1..=cutoff {
        let prev = w[n - 1];
        w.push(prev * nbar.sqrt() / (n as f64).sqrt());
    }
    w
}

/// Single atom starting in the ground state:
/// `|g, n> -> cos(sqrt(n) tau) |g, n> - i sin(sqrt(n) tau) |e, n-1>`.
pub fn single_atom(nbar: f64, tau: f64, cutoff: usize) -> ReferenceState {
    let w = coherent(nbar, cutoff);
    let mut ground = vec![C64::from(0.0); cutoff + 1];
    let mut excited = vec![C64::from(0.0); cutoff + 1];
    for n in 0..=cutoff {
        let rabi = (n as f64).sqrt() * tau;
        ground[n] = C64::from(w[n] * rabi.cos());
        if n >= 1 {
            excited[n - 1] = C64::new(0.0, -w[n] * rabi.sin());
        }
    }
    ReferenceState {
        components: vec![ground, excited],
    }
}

/// Two identical atoms starting in `|gg>`. Within the manifold of `n`
/// excitations the couplings are `sqrt(2n)` (`|gg,n> <-> |S,n-1>`) and
/// `sqrt(2(n-1))` (`|S,n-1> <-> |ee,n-2>`), giving one frequency
/// `Omega = sqrt(2(2n-1))` and a dark combination.
pub fn identical_atoms(nbar: f64, tau: f64, cutoff: usize) -> ReferenceState {
    let w = coherent(nbar, cutoff);
    let mut gg = vec![C64::from(0.0); cutoff + 1];
    let mut sym = vec![C64::from(0.0); cutoff + 1];
    let mut ee = vec![C64::from(0.0); cutoff + 1];
    gg[0] = C64::from(w[0]);
    for n in 1..=cutoff {
        let nf = n as f64;
        let upper = (2.0 * (nf - 1.0)).sqrt();
        let lower = (2.0 * nf).sqrt();
        let omega2 = upper * upper + lower * lower;
        let omega = omega2.sqrt();
        let (s, c) = (omega * tau).sin_cos();
        gg[n] = C64::from(w[n] * (upper * upper + lower * lower * c) / omega2);
        sym[n - 1] = C64::new(0.0, -w[n] * lower * s / omega);
        if n >= 2 {
            ee[n - 2] = C64::from(w[n] * upper * lower * (c - 1.0) / omega2);
        }
    }
    ReferenceState {
        components: vec![gg, sym, ee],
    }
}

impl ReferenceState {
    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .map(|x| x.norm_sqr())
            .sum()
    }

    fn lower(&self, k: usize) -> C64 {
        let mut acc = C64::from(0.0);
        for comp in &self.components {
            for m in 0..comp.len().saturating_sub(k) {
                let mut f = 1.0;
                for j in 1..=k {
                    f *= ((m + j) as f64).sqrt();
                }
                acc += comp[m].conj() * comp[m + k] * f;
            }
        }
        acc
    }

    pub fn mean_photons(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter().enumerate())
            .map(|(m, x)| m as f64 * x.norm_sqr())
            .sum()
    }

    /// `S1 = 2 <a+a> + 2 Re<a^2> - 4 (Re<a>)^2`.
    pub fn s1(&self) -> f64 {
        let a1 = self.lower(1);
        let a2 = self.lower(2);
        2.0 * self.mean_photons() + 2.0 * a2.re - 4.0 * a1.re * a1.re
    }
}
