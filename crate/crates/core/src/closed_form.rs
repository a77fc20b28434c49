//! Analytic block amplitudes.
//!
//! Blocks `n = 0` and `n = 1` have elementary solutions. For `n >= 2` the
//! block coupling matrix is bipartite between `{|++>, |-->}` and
//! `{|+->, |-+>}`, so the amplitudes are cosines (first pair) and sines
//! (second pair) of the two eigenfrequencies `lambda_plus`, `lambda_minus`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_oracle;
use crate::C64;

/// Width of the band around the removable singularities of the `n >= 2`
/// solution (`lambda_minus -> 0` at `R = 1`, `beta -> 1 + R^2` at `R = 0`).
pub const DEGENERACY_EPS: f64 = 1e-6;

/// The four amplitudes of block `n`, ordered
/// `|++, n-2>`, `|+-, n-1>`, `|-+, n-1>`, `|--, n>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeBlock {
    pub n: usize,
    pub c: [C64; 4],
}

impl AmplitudeBlock {
    /// The `t = 0` block: both atoms down.
    pub fn ground(n: usize) -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            n,
            c: [z, z, z, C64::new(1.0, 0.0)],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest componentwise distance to another block.
    pub fn max_deviation(&self, other: &AmplitudeBlock) -> f64 {
        self.c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Number of excited atoms weighted by occupation: `2|c1|^2 + |c2|^2 + |c3|^2`.
    pub fn atomic_excitation(&self) -> f64 {
        2.0 * self.c[0].norm_sqr() + self.c[1].norm_sqr() + self.c[2].norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenfrequencies {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub beta: f64,
}

/// Which form of the `n >= 2` solution to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ClosedFormVariant {
    /// Second printed `C2` read as `C3`, and the `lambda_minus` terms of
    /// `C2` and `C3` added rather than subtracted.
    #[default]
    Corrected,
    /// The misprinted expressions: second `C2` read as `C3`, `lambda_minus`
    /// terms subtracted. Disagrees with the equations of motion; kept for
    /// diagnostics only.
    AsPrinted,
}

/// `beta = sqrt((2n-1)^2 (1+R^2)^2 - 4 (n-1) n (1-R^2)^2)` and
/// `lambda_pm = sqrt(((1+R^2)(2n-1) +- beta) / 2)`.
pub fn eigenfrequencies(n: usize, ratio: f64) -> Result<Eigenfrequencies> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "eigenfrequencies are defined for blocks n >= 2, got n = {n}"
        )));
    }
    let nf = n as f64;
    let s = 1.0 + ratio * ratio;
    let d = 1.0 - ratio * ratio;
    let beta = ((2.0 * nf - 1.0).powi(2) * s * s - 4.0 * (nf - 1.0) * nf * d * d)
        .max(0.0)
        .sqrt();
    let lambda_plus = ((s * (2.0 * nf - 1.0) + beta) / 2.0).sqrt();
    // lambda_plus^2 lambda_minus^2 = n (n-1) (1-R^2)^2 avoids the cancellation
    // in the direct formula near R = 1.
    let lambda_minus = (nf * (nf - 1.0)).sqrt() * d.abs() / lambda_plus;
    Ok(Eigenfrequencies {
        lambda_plus,
        lambda_minus,
        beta,
    })
}

/// Block `n = 0`: the vacuum with both atoms down does not evolve.
pub fn amplitudes_n0() -> AmplitudeBlock {
    AmplitudeBlock::ground(0)
}

/// Block `n = 1`: one excitation shared between the field and either atom.
pub fn amplitudes_n1(tau: f64, ratio: f64) -> AmplitudeBlock {
    let omega = (1.0 + ratio * ratio).sqrt();
    let (sin, cos) = (omega * tau).sin_cos();
    let z = C64::new(0.0, 0.0);
    AmplitudeBlock {
        n: 1,
        c: [
            z,
            C64::new(0.0, -sin / omega),
            C64::new(0.0, -ratio * sin / omega),
            C64::new(cos, 0.0),
        ],
    }
}

/// Analytic solution for `n >= 2`.
///
/// Returns [`Error::Degenerate`] inside the guard band; use [`amplitudes`]
/// to get the integrator fallback automatically.
pub fn amplitudes_general(
    n: usize,
    ratio: f64,
    tau: f64,
    variant: ClosedFormVariant,
) -> Result<AmplitudeBlock> {
    let ef = eigenfrequencies(n, ratio)?;
    let nf = n as f64;
    let r2 = ratio * ratio;
    let s = 1.0 + r2;
    let d = 1.0 - r2;
    let beta = ef.beta;
    // beta^2 - (1+R^2)^2 = 16 n (n-1) R^2
    let beta_minus_s = 16.0 * nf * (nf - 1.0) * r2 / (beta + s);
    let beta_plus_s = beta + s;

    if ef.lambda_minus < DEGENERACY_EPS {
        return Err(Error::Degenerate {
            n,
            ratio,
            reason: "lambda_minus vanishes",
        });
    }
    if beta_minus_s < DEGENERACY_EPS {
        return Err(Error::Degenerate {
            n,
            ratio,
            reason: "beta equals 1 + R^2",
        });
    }

    let (lp, lm) = (ef.lambda_plus, ef.lambda_minus);
    let (sp, cp) = (lp * tau).sin_cos();
    let (sm, cm) = (lm * tau).sin_cos();

    let c1 = 2.0 * ratio * (nf * (nf - 1.0)).sqrt() / beta * (cp - cm);
    let c4 = 8.0 * r2 * (nf - 1.0) * nf / beta * (cp / beta_minus_s + cm / beta_plus_s);

    let sign = match variant {
        ClosedFormVariant::Corrected => 1.0,
        ClosedFormVariant::AsPrinted => -1.0,
    };
    // lambda_plus^2 + (1-R^2) n = (4n + beta - (1+R^2)) / 2, free of cancellation
    let plus_c2 = (4.0 * nf + beta_minus_s) / 2.0;
    let plus_c3 = (4.0 * nf * r2 + beta_minus_s) / 2.0;
    let minus_c2 = lm * lm + d * nf;
    let minus_c3 = lm * lm - d * nf;

    let pre = 4.0 * (nf - 1.0) * nf.sqrt() / beta;
    let c2 = -pre
        * r2
        * (plus_c2 / (lp * beta_minus_s) * sp + sign * minus_c2 / (lm * beta_plus_s) * sm);
    let c3 = -pre
        * ratio
        * (plus_c3 / (lp * beta_minus_s) * sp + sign * minus_c3 / (lm * beta_plus_s) * sm);

    Ok(AmplitudeBlock {
        n,
        c: [
            C64::new(c1, 0.0),
            C64::new(0.0, c2),
            C64::new(0.0, c3),
            C64::new(c4, 0.0),
        ],
    })
}

/// Block amplitudes for any `n`, falling back to the RK4 oracle inside the
/// degeneracy guard band.
pub fn amplitudes(n: usize, ratio: f64, tau: f64) -> AmplitudeBlock {
    amplitudes_with(n, ratio, tau, ClosedFormVariant::Corrected)
}

pub fn amplitudes_with(
    n: usize,
    ratio: f64,
    tau: f64,
    variant: ClosedFormVariant,
) -> AmplitudeBlock {
    match n {
        0 => amplitudes_n0(),
        1 => amplitudes_n1(tau, ratio),
        _ => match amplitudes_general(n, ratio, tau, variant) {
            Ok(block) => block,
            Err(err) => {
                log::trace!("closed form unavailable ({err}); integrating block {n}");
                fock_oracle::integrate_block_default(n, ratio, tau)
            }
        },
    }
}

/// True when `amplitudes` would use the integrator for this block.
pub fn in_guard_band(n: usize, ratio: f64) -> bool {
    n >= 2
        && matches!(
            amplitudes_general(n, ratio, 0.0, ClosedFormVariant::Corrected),
            Err(Error::Degenerate { .. })
        )
}
