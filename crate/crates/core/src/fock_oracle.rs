//! Ground-truth path: RK4 integration of the block equations, assembly of the
//! truncated state vector, and field moments summed directly over Fock
//! components.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::closed_form::{self, AmplitudeBlock, ClosedFormVariant};
use crate::error::{Error, Result};
use crate::params::{coherent_amplitudes, poisson_weights, ModelParams};
use crate::C64;

/// Default RK4 step in units of `1/g1`.
pub const RK4_STEP: f64 = 1e-4;

/// Allowed disagreement between the step-`h` and step-`h/2` solutions.
pub const RICHARDSON_LIMIT: f64 = 1e-8;

/// Photon-number offset of each atomic configuration inside a block:
/// `|++>` holds `n-2` photons, `|+->` and `|-+>` hold `n-1`, `|-->` holds `n`.
pub const PHOTON_OFFSET: [usize; 4] = [2, 1, 1, 0];

/// Real symmetric coupling matrix `H_n` of block `n`, with `dC/dtau = -i H_n C`.
pub fn block_coupling_matrix(n: usize, ratio: f64) -> Matrix4<f64> {
    let mut h = Matrix4::zeros();
    if n == 0 {
        return h;
    }
    let below = ((n - 1) as f64).sqrt();
    let top = (n as f64).sqrt();
    // |++,n-2> <-> |+-,n-1> through atom 2, |++,n-2> <-> |-+,n-1> through atom 1
    h[(0, 1)] = ratio * below;
    h[(0, 2)] = below;
    // |+-,n-1> <-> |--,n> through atom 1, |-+,n-1> <-> |--,n> through atom 2
    h[(1, 3)] = top;
    h[(2, 3)] = ratio * top;
    h + h.transpose()
}

type Cmat = Matrix4<C64>;
type Cvec = Vector4<C64>;

fn generator(n: usize, ratio: f64) -> Cmat {
    block_coupling_matrix(n, ratio).map(|x| C64::new(0.0, -x))
}

/// One classical RK4 step of `dC/dtau = A C`.
pub fn rk4_step(a: &Cmat, c: &Cvec, h: f64) -> Cvec {
    let k1 = a * c;
    let k2 = a * (c + k1 * C64::from(h / 2.0));
    let k3 = a * (c + k2 * C64::from(h / 2.0));
    let k4 = a * (c + k3 * C64::from(h));
    c + (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(h / 6.0)
}

/// The RK4 one-step map of a linear system is a fixed matrix; build it by
/// stepping the basis vectors.
fn rk4_propagator(a: &Cmat, h: f64) -> Cmat {
    let mut p = Cmat::zeros();
    for j in 0..4 {
        let mut e = Cvec::zeros();
        e[j] = C64::from(1.0);
        p.set_column(j, &rk4_step(a, &e, h));
    }
    p
}

fn matrix_power(mut base: Cmat, mut k: u64) -> Cmat {
    let mut acc = Cmat::identity();
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        k >>= 1;
    }
    acc
}

/// `k` uniform RK4 steps from the ground block to `tau`.
fn rk4_solve(n: usize, ratio: f64, tau: f64, steps: u64) -> Cvec {
    let init = Cvec::new(
        C64::from(0.0),
        C64::from(0.0),
        C64::from(0.0),
        C64::from(1.0),
    );
    if steps == 0 || n == 0 {
        return init;
    }
    let p = rk4_propagator(&generator(n, ratio), tau / steps as f64);
    matrix_power(p, steps) * init
}

fn to_block(n: usize, v: &Cvec) -> AmplitudeBlock {
    AmplitudeBlock {
        n,
        c: [v[0], v[1], v[2], v[3]],
    }
}

fn solve_pair(n: usize, ratio: f64, tau: f64, step: f64) -> (AmplitudeBlock, AmplitudeBlock, f64) {
    let steps = (tau.abs() / step).ceil() as u64;
    let coarse = to_block(n, &rk4_solve(n, ratio, tau, steps));
    let fine = to_block(n, &rk4_solve(n, ratio, tau, 2 * steps));
    let gap = coarse.max_deviation(&fine);
    (coarse, fine, gap)
}

/// Integrates block `n` from the ground configuration to `tau` with a fixed
/// RK4 step no larger than `step`, checking against a half-step solution.
///
/// The `k` steps are applied as the `k`-th power of the one-step map, which
/// is the same linear map as stepping `k` times. Negative `tau` integrates
/// backwards.
pub fn integrate_block(n: usize, ratio: f64, tau: f64, step: f64) -> Result<AmplitudeBlock> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "RK4 step must be > 0, got {step}"
        )));
    }
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "time must be finite, got {tau}"
        )));
    }
    let (_, fine, gap) = solve_pair(n, ratio, tau, step);
    if gap > RICHARDSON_LIMIT {
        return Err(Error::StepRejected {
            n,
            disagreement: gap,
            limit: RICHARDSON_LIMIT,
        });
    }
    Ok(fine)
}

/// [`integrate_block`] at the default step. A failed Richardson check is
/// logged and the half-step solution returned.
pub fn integrate_block_default(n: usize, ratio: f64, tau: f64) -> AmplitudeBlock {
    let (_, fine, gap) = solve_pair(n, ratio, tau, RK4_STEP);
    if gap > RICHARDSON_LIMIT {
        log::warn!("block {n} at tau={tau}: Richardson disagreement {gap:e}");
    }
    fine
}

/// Literal step-by-step RK4, used to check the propagator shortcut.
pub fn integrate_block_stepwise(n: usize, ratio: f64, tau: f64, steps: u64) -> AmplitudeBlock {
    let a = generator(n, ratio);
    let h = tau / steps as f64;
    let mut c = Cvec::new(
        C64::from(0.0),
        C64::from(0.0),
        C64::from(0.0),
        C64::from(1.0),
    );
    for _ in 0..steps {
        c = rk4_step(&a, &c, h);
    }
    to_block(n, &c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AmplitudeSource {
    /// Analytic solution with integrator fallback in the guard band.
    #[default]
    ClosedForm,
    /// Analytic solution exactly as printed (diagnostics).
    PrintedClosedForm,
    /// RK4 for every block.
    Integrator,
}

/// Truncated state at one instant, in the frame rotating at the cavity
/// frequency (the `e^{-i(n-1) omega t}` block phases removed).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub params: ModelParams,
    pub time: f64,
    /// Blocks `0..=cutoff`.
    pub blocks: Vec<AmplitudeBlock>,
    /// Coherent amplitudes `alpha^n e^{-|alpha|^2/2} / sqrt(n!)`.
    pub weights: Vec<C64>,
}

impl StateVector {
    /// `sum_n p_n sum_i |c_i^(n)|^2`.
    pub fn global_norm(&self) -> f64 {
        self.blocks
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| w.norm_sqr() * b.norm_sqr())
            .sum()
    }

    /// `< R1^z + R2^z + 1 >`, the number of excited atoms.
    pub fn atomic_excitation(&self) -> f64 {
        self.blocks
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| w.norm_sqr() * b.atomic_excitation())
            .sum()
    }

    /// Field amplitudes for each atomic configuration, indexed by photon
    /// number: `psi[s][m]` multiplies `|s> |m>`.
    pub fn field_components(&self) -> [Vec<C64>; 4] {
        self.field_components_in_frame(|_| C64::from(1.0))
    }

    fn field_components_in_frame(&self, block_phase: impl Fn(usize) -> C64) -> [Vec<C64>; 4] {
        let len = self.blocks.len();
        let mut psi: [Vec<C64>; 4] = std::array::from_fn(|_| vec![C64::from(0.0); len]);
        for (block, w) in self.blocks.iter().zip(&self.weights) {
            let phase = block_phase(block.n);
            for (s, &off) in PHOTON_OFFSET.iter().enumerate() {
                if block.n >= off {
                    psi[s][block.n - off] = w * phase * block.c[s];
                }
            }
        }
        psi
    }
}

/// Assembles the state at `tau` from the chosen amplitude source.
pub fn build_state(params: &ModelParams, tau: f64, source: AmplitudeSource) -> Result<StateVector> {
    params.validate()?;
    let blocks = (0..=params.cutoff)
        .map(|n| match source {
            AmplitudeSource::ClosedForm => closed_form::amplitudes(n, params.coupling_ratio, tau),
            AmplitudeSource::PrintedClosedForm => closed_form::amplitudes_with(
                n,
                params.coupling_ratio,
                tau,
                ClosedFormVariant::AsPrinted,
            ),
            AmplitudeSource::Integrator => integrate_block_default(n, params.coupling_ratio, tau),
        })
        .collect();
    Ok(StateVector {
        params: *params,
        time: tau,
        blocks,
        weights: coherent_amplitudes(params.alpha(), params.cutoff),
    })
}

/// Poisson weights of the state's blocks.
pub fn block_probabilities(state: &StateVector) -> Vec<f64> {
    poisson_weights(state.params.nbar, state.params.cutoff)
}

/// Field moments in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    /// `<a+ a>`
    pub mean_n: f64,
    /// `e^{i omega t} <a>`
    pub m1: C64,
    /// `e^{2 i omega t} <a^2>`
    pub m2: C64,
    /// `<a+^2 a^2>`
    pub m22: f64,
    /// `e^{4 i omega t} <a^4>`
    pub m4: C64,
}

impl MomentSet {
    /// Moments of the coherent state `|alpha>`.
    pub fn coherent(alpha: C64) -> Self {
        let n = alpha.norm_sqr();
        Self {
            mean_n: n,
            m1: alpha,
            m2: alpha * alpha,
            m22: n * n,
            m4: alpha.powi(4),
        }
    }
}

fn lowering_moment(psi: &[Vec<C64>; 4], k: usize) -> C64 {
    let mut total = C64::from(0.0);
    for comp in psi {
        for m in 0..comp.len().saturating_sub(k) {
            let factor: f64 = (1..=k).map(|j| ((m + j) as f64).sqrt()).product();
            total += comp[m].conj() * comp[m + k] * factor;
        }
    }
    total
}

fn number_moments(psi: &[Vec<C64>; 4]) -> (f64, f64) {
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    for comp in psi {
        for (m, c) in comp.iter().enumerate() {
            let m = m as f64;
            n1 += m * c.norm_sqr();
            n2 += m * (m - 1.0) * c.norm_sqr();
        }
    }
    (n1, n2)
}

fn moments_from_components(psi: &[Vec<C64>; 4]) -> MomentSet {
    let (mean_n, m22) = number_moments(psi);
    MomentSet {
        mean_n,
        m1: lowering_moment(psi, 1),
        m2: lowering_moment(psi, 2),
        m22,
        m4: lowering_moment(psi, 4),
    }
}

/// Moments by exact summation over the truncated Fock components.
pub fn moments(state: &StateVector) -> MomentSet {
    moments_from_components(&state.field_components())
}

/// Moments computed in the laboratory frame at cavity frequency `omega`,
/// then demodulated by `e^{i k omega t}`. Agrees with [`moments`] for any
/// `omega`.
pub fn moments_with_carrier(state: &StateVector, omega: f64) -> MomentSet {
    let t = state.time;
    let psi =
        state.field_components_in_frame(|n| C64::from_polar(1.0, -(n as f64 - 1.0) * omega * t));
    let lab = moments_from_components(&psi);
    let demod = |k: f64| C64::from_polar(1.0, k * omega * t);
    MomentSet {
        mean_n: lab.mean_n,
        m1: lab.m1 * demod(1.0),
        m2: lab.m2 * demod(2.0),
        m22: lab.m22,
        m4: lab.m4 * demod(4.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coupling_matrix_low_blocks() {
        assert_eq!(block_coupling_matrix(0, 0.7), Matrix4::zeros());
        let h = block_coupling_matrix(1, 0.5);
        // |++> is unreachable with a single excitation
        assert_eq!(h.row(0).sum(), 0.0);
        assert_eq!(h[(1, 3)], 1.0);
        assert_eq!(h[(2, 3)], 0.5);
    }

    #[test]
    fn propagator_power_equals_stepping() {
        for (n, r, tau) in [(3, 0.4, 1.3), (6, 1.0, 2.0), (1, 0.7, 0.9)] {
            let steps = 2000;
            let a = integrate_block_stepwise(n, r, tau, steps);
            let b = to_block(n, &rk4_solve(n, r, tau, steps));
            assert!(a.max_deviation(&b) < 1e-13, "n={n}");
        }
    }

    #[test]
    fn integrate_examples() {
        let b = integrate_block(0, 0.7, 3.0, RK4_STEP).unwrap();
        assert_eq!(b, AmplitudeBlock::ground(0));

        let b = integrate_block(1, 0.5, 1.2, RK4_STEP).unwrap();
        assert!(b.max_deviation(&closed_form::amplitudes_n1(1.2, 0.5)) < 1e-8);

        let b = integrate_block(4, 1.0, 2.5, RK4_STEP).unwrap();
        assert_abs_diff_eq!(b.norm_sqr(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn richardson_rejects_coarse_steps() {
        let err = integrate_block(10, 1.0, 20.0, 0.2).unwrap_err();
        assert!(matches!(err, Error::StepRejected { n: 10, .. }));
        assert!(integrate_block(2, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn norm_drift_is_small_over_long_times() {
        for n in [2, 8, 25] {
            let b = integrate_block(n, 1.0, 50.0, RK4_STEP).unwrap();
            assert!((b.norm_sqr() - 1.0).abs() < 50.0 * 1e-9);
        }
    }

    #[test]
    fn vacuum_state() {
        let p = ModelParams::new(0.3, 0.0);
        let s = build_state(&p, 0.0, AmplitudeSource::ClosedForm).unwrap();
        assert_eq!(s.weights[0], C64::from(1.0));
        assert!(s.weights[1..].iter().all(|w| w.norm() == 0.0));
        assert_abs_diff_eq!(s.global_norm(), 1.0, epsilon = 1e-15);
        let m = moments(&build_state(&p, 4.0, AmplitudeSource::ClosedForm).unwrap());
        assert_eq!(m.mean_n, 0.0);
        assert_eq!(m.m1.norm() + m.m2.norm() + m.m4.norm() + m.m22, 0.0);
    }

    #[test]
    fn initial_norm() {
        let p = ModelParams::new(0.5, 0.2);
        let s = build_state(&p, 0.0, AmplitudeSource::ClosedForm).unwrap();
        assert_abs_diff_eq!(s.global_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn excitation_conservation() {
        let p = ModelParams::new(0.5, 1.0);
        for source in [AmplitudeSource::ClosedForm, AmplitudeSource::Integrator] {
            let s = build_state(&p, 10.0, source).unwrap();
            let m = moments(&s);
            assert_abs_diff_eq!(m.mean_n + s.atomic_excitation(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn coherent_moments_at_zero_time() {
        let p = ModelParams::new(0.5, 0.4);
        let m = moments(&build_state(&p, 0.0, AmplitudeSource::ClosedForm).unwrap());
        assert_abs_diff_eq!(m.mean_n, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(m.m1.re, 0.4f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(m.m2.re, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(m.m4.re, 0.16, epsilon = 1e-12);
        assert_abs_diff_eq!(m.m22, 0.16, epsilon = 1e-12);
        assert!(m.m1.im.abs() + m.m2.im.abs() + m.m4.im.abs() < 1e-15);
    }

    #[test]
    fn coherent_moments_with_phase() {
        let p = ModelParams::new(0.5, 0.9).with_phase(0.6);
        let m = moments(&build_state(&p, 0.0, AmplitudeSource::ClosedForm).unwrap());
        let c = MomentSet::coherent(p.alpha());
        assert!((m.m1 - c.m1).norm() < 1e-12);
        assert!((m.m2 - c.m2).norm() < 1e-12);
        assert!((m.m4 - c.m4).norm() < 1e-12);
    }

    #[test]
    fn closed_form_and_integrator_states_agree() {
        let p = ModelParams::new(0.7, 1.2);
        let a = moments(&build_state(&p, 6.5, AmplitudeSource::ClosedForm).unwrap());
        let b = moments(&build_state(&p, 6.5, AmplitudeSource::Integrator).unwrap());
        assert_abs_diff_eq!(a.mean_n, b.mean_n, epsilon = 1e-9);
        assert!((a.m1 - b.m1).norm() < 1e-9);
        assert!((a.m4 - b.m4).norm() < 1e-9);
    }

    #[test]
    fn carrier_phases_cancel() {
        let p = ModelParams::new(0.5, 0.6);
        let s = build_state(&p, 3.3, AmplitudeSource::ClosedForm).unwrap();
        let base = moments(&s);
        for omega in [0.0, 1.0, 17.5, 1234.0] {
            let m = moments_with_carrier(&s, omega);
            assert_abs_diff_eq!(m.mean_n, base.mean_n, epsilon = 1e-12);
            assert!((m.m1 - base.m1).norm() < 1e-12);
            assert!((m.m2 - base.m2).norm() < 1e-12);
            assert!((m.m4 - base.m4).norm() < 1e-12);
        }
    }

    #[test]
    fn doubling_cutoff_leaves_moments_unchanged() {
        for nbar in [0.5, 2.0] {
            let p = ModelParams::new(0.6, nbar);
            let q = p.with_cutoff(2 * p.cutoff);
            let a = moments(&build_state(&p, 7.0, AmplitudeSource::ClosedForm).unwrap());
            let b = moments(&build_state(&q, 7.0, AmplitudeSource::ClosedForm).unwrap());
            assert!((a.mean_n - b.mean_n).abs() < 1e-10);
            assert!((a.m22 - b.m22).abs() < 1e-10);
            assert!((a.m2 - b.m2).norm() < 1e-10);
            assert!((a.m4 - b.m4).norm() < 1e-10);
        }
    }

    #[test]
    fn cauchy_schwarz_bounds() {
        let p = ModelParams::new(0.35, 0.8);
        for tau in [0.5, 3.0, 11.0, 40.0] {
            let m = moments(&build_state(&p, tau, AmplitudeSource::ClosedForm).unwrap());
            assert!(m.m1.norm_sqr() <= m.mean_n + 1e-12);
            assert!(m.m2.norm_sqr() <= m.m22 + 1e-12);
        }
    }

    #[test]
    fn cutoff_error_propagates() {
        let p = ModelParams::new(0.5, 1.0).with_cutoff(4);
        assert!(matches!(
            build_state(&p, 1.0, AmplitudeSource::ClosedForm),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}
