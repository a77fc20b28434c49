//! The A0..A4 photon-number series, evaluated from block amplitudes.
//!
//! These sums weight each block by the Poisson probability `p_n` and pair
//! block `n` with block `n + k` for `<a^k>`. The corrected form applies:
//! * `Sum p_n n (n-1) |C4^(n)|^2` in A3 (the `n (n-1)` factor is missing in print),
//! * `C4^(n+4)` in the last A4 sum (printed with index `n+24`),
//! * `<a^4> = alpha^4 A4` (printed `alpha^2 4 A4`, and `<a^2>` on the left-hand side).
//!
//! With `alpha = sqrt(nbar) e^{i phi}`: `<a+a> = A0`, `<a> = alpha A1`,
//! `<a^2> = alpha^2 A2`, `<a+^2 a^2> = A3`, `<a^4> = alpha^4 A4`.

use serde::{Deserialize, Serialize};

use crate::closed_form::{self, AmplitudeBlock};
use crate::error::Result;
use crate::fock_oracle::MomentSet;
use crate::params::{poisson_weights, ModelParams};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub a0: f64,
    pub a1: C64,
    pub a2: C64,
    pub a3: f64,
    pub a4: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SeriesForm {
    #[default]
    Corrected,
    /// Literal reading of the printed sums (A3 without `n(n-1)` on the C4
    /// term, A4 pairing `C4^(n)` with `C4^(n+24)`).
    AsPrinted,
}

impl SeriesCoefficients {
    pub fn to_moments(&self, alpha: C64) -> MomentSet {
        MomentSet {
            mean_n: self.a0,
            m1: alpha * self.a1,
            m2: alpha.powi(2) * self.a2,
            m22: self.a3,
            m4: alpha.powi(4) * self.a4,
        }
    }
}

/// Pairs block `n` with block `n + k` across matching atomic states.
///
/// The square-root factors are `sqrt((n-1) n / ((n+k-1)(n+k)))` for `|++>`,
/// `sqrt(n / (n+k))` for `|+->`, `|-+>` and 1 for `|-->`.
fn shifted_sum(p: &[f64], blocks: &[AmplitudeBlock], k: usize, c4_shift: usize) -> C64 {
    let top = blocks.len();
    let mut total = C64::new(0.0, 0.0);
    for n in 0..top {
        let nf = n as f64;
        let kf = k as f64;
        let b = &blocks[n];
        if n >= 2 && n + k < top {
            let f = ((nf - 1.0) * nf / ((nf + kf - 1.0) * (nf + kf))).sqrt();
            total += p[n] * b.c[0].conj() * blocks[n + k].c[0] * f;
        }
        if n >= 1 && n + k < top {
            let f = (nf / (nf + kf)).sqrt();
            let up = blocks[n + k];
            total += p[n] * (b.c[1].conj() * up.c[1] + b.c[2].conj() * up.c[2]) * f;
        }
        if n + c4_shift < top {
            total += p[n] * b.c[3].conj() * blocks[n + c4_shift].c[3];
        }
    }
    total
}

/// Evaluates the series on given blocks `0..=cutoff`. Terms reaching past the
/// last block are dropped.
pub fn series_from_blocks(
    params: &ModelParams,
    blocks: &[AmplitudeBlock],
    form: SeriesForm,
) -> SeriesCoefficients {
    let p = poisson_weights(params.nbar, blocks.len().saturating_sub(1));

    let mut lost = 0.0;
    let mut a3 = 0.0;
    for (n, b) in blocks.iter().enumerate() {
        let nf = n as f64;
        lost += p[n] * (2.0 * b.c[0].norm_sqr() + b.c[1].norm_sqr() + b.c[2].norm_sqr());
        if n >= 4 {
            a3 += p[n] * (nf - 2.0) * (nf - 3.0) * b.c[0].norm_sqr();
        }
        if n >= 3 {
            a3 += p[n] * (nf - 1.0) * (nf - 2.0) * (b.c[1].norm_sqr() + b.c[2].norm_sqr());
        }
        if n >= 2 {
            let factor = match form {
                SeriesForm::Corrected => nf * (nf - 1.0),
                SeriesForm::AsPrinted => 1.0,
            };
            a3 += p[n] * factor * b.c[3].norm_sqr();
        }
    }

    let c4_shift_a4 = match form {
        SeriesForm::Corrected => 4,
        SeriesForm::AsPrinted => 24,
    };
    SeriesCoefficients {
        a0: params.nbar - lost,
        a1: shifted_sum(&p, blocks, 1, 1),
        a2: shifted_sum(&p, blocks, 2, 2),
        a3,
        a4: shifted_sum(&p, blocks, 4, c4_shift_a4),
    }
}

/// Corrected series at `tau` from the closed-form amplitudes.
pub fn series_coefficients(params: &ModelParams, tau: f64) -> Result<SeriesCoefficients> {
    params.validate()?;
    let blocks: Vec<_> = (0..=params.cutoff)
        .map(|n| closed_form::amplitudes(n, params.coupling_ratio, tau))
        .collect();
    Ok(series_from_blocks(params, &blocks, SeriesForm::Corrected))
}

/// `(S1, S2, Q1, Q2)` from the series in their `phi = 0` forms,
/// `S1 = 2 A0 + 2 nbar A2 - 4 nbar A1^2`, `S2 = 2 A0 - 2 nbar A2`,
/// `Q1 = (2 A3 + 2 nbar^2 A4 - 4 nbar^2 A2^2) / (4 (A0 + 1/2))`,
/// `Q2 = (2 A3 - 2 nbar^2 A4) / (4 (A0 + 1/2))`.
pub fn squeezing_from_series(a: &SeriesCoefficients, nbar: f64) -> [f64; 4] {
    let norm = 4.0 * (a.a0 + 0.5);
    [
        2.0 * a.a0 + 2.0 * nbar * a.a2.re - 4.0 * nbar * a.a1.re * a.a1.re,
        2.0 * a.a0 - 2.0 * nbar * a.a2.re,
        (2.0 * a.a3 + 2.0 * nbar * nbar * a.a4.re - 4.0 * nbar * nbar * a.a2.re * a.a2.re) / norm,
        (2.0 * a.a3 - 2.0 * nbar * nbar * a.a4.re) / norm,
    ]
}
