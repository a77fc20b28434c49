//! Quadrature and amplitude-squared squeezing of the cavity field.
//!
//! With `X1 = (a + a+)/2`, `X2 = (a - a+)/(2i)` (slowly varying frame) the
//! coherent-state variance is 1/4 and `S_i = 4 Var(X_i) - 1`. With
//! `Y1 = (a^2 + a+^2)/2`, `Y2 = (a^2 - a+^2)/(2i)` the reference variance is
//! `<n> + 1/2` and `Q_i = Var(Y_i) / (<n> + 1/2) - 1`.

pub mod series;

use serde::{Deserialize, Serialize};

use crate::fock_oracle::MomentSet;

pub use series::{series_coefficients, SeriesCoefficients, SeriesForm};

/// `(Var X1, Var X2)`.
pub fn quadrature_variances(m: &MomentSet) -> (f64, f64) {
    let var1 = 0.25 * (1.0 + 2.0 * m.mean_n + 2.0 * m.m2.re - 4.0 * m.m1.re * m.m1.re);
    let var2 = 0.25 * (1.0 + 2.0 * m.mean_n - 2.0 * m.m2.re - 4.0 * m.m1.im * m.m1.im);
    (var1, var2)
}

/// `(S1, S2)`.
pub fn squeezing_s(m: &MomentSet) -> (f64, f64) {
    let s1 = 2.0 * m.mean_n + 2.0 * m.m2.re - 4.0 * m.m1.re * m.m1.re;
    let s2 = 2.0 * m.mean_n - 2.0 * m.m2.re - 4.0 * m.m1.im * m.m1.im;
    (s1, s2)
}

/// `(Var Y1, Var Y2)`.
///
/// `<Y1^2> = (<a^4> + <a+^4> + <a^2 a+^2> + <a+^2 a^2>) / 4` and
/// `a^2 a+^2 = a+^2 a^2 + 4 a+ a + 2`, so
/// `Var Y1 = (2 m22 + 2 Re m4 + 4 <n> + 2)/4 - (Re m2)^2`.
pub fn ass_variances(m: &MomentSet) -> (f64, f64) {
    let common = 0.25 * (2.0 * m.m22 + 4.0 * m.mean_n + 2.0);
    let var1 = common + 0.5 * m.m4.re - m.m2.re * m.m2.re;
    let var2 = common - 0.5 * m.m4.re - m.m2.im * m.m2.im;
    (var1, var2)
}

/// `(Q1, Q2)` normalised by the instantaneous `<n> + 1/2`.
pub fn ass_q(m: &MomentSet) -> (f64, f64) {
    ass_q_normalised(m, m.mean_n + 0.5)
}

/// `(Q1, Q2)` with an explicit normaliser, e.g. `nbar + 1/2`.
pub fn ass_q_normalised(m: &MomentSet, norm: f64) -> (f64, f64) {
    let q1 = (2.0 * m.m22 + 2.0 * m.m4.re - 4.0 * m.m2.re * m.m2.re) / (4.0 * norm);
    let q2 = (2.0 * m.m22 - 2.0 * m.m4.re - 4.0 * m.m2.im * m.m2.im) / (4.0 * norm);
    (q1, q2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Which {
    S1,
    S2,
    Q1,
    Q2,
}

impl std::str::FromStr for Which {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Which::S1),
            "S2" => Ok(Which::S2),
            "Q1" => Ok(Which::Q1),
            "Q2" => Ok(Which::Q2),
            other => Err(format!("unknown squeezing parameter {other:?}")),
        }
    }
}

/// All squeezing quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingRecord {
    pub time: f64,
    pub s1: f64,
    pub s2: f64,
    pub q1: f64,
    pub q2: f64,
    pub var_x1: f64,
    pub var_x2: f64,
    pub var_y1: f64,
    pub var_y2: f64,
    pub mean_n: f64,
    pub uncertainty_x: f64,
    pub uncertainty_y: f64,
}

/// Slack allowed on the uncertainty relations and lower bounds.
pub const BOUND_SLACK: f64 = 1e-9;

impl SqueezingRecord {
    pub fn from_moments(time: f64, m: &MomentSet) -> Self {
        let (var_x1, var_x2) = quadrature_variances(m);
        let (var_y1, var_y2) = ass_variances(m);
        let (s1, s2) = squeezing_s(m);
        let (q1, q2) = ass_q(m);
        Self {
            time,
            s1,
            s2,
            q1,
            q2,
            var_x1,
            var_x2,
            var_y1,
            var_y2,
            mean_n: m.mean_n,
            uncertainty_x: var_x1 * var_x2,
            uncertainty_y: var_y1 * var_y2,
        }
    }

    pub fn get(&self, which: Which) -> f64 {
        match which {
            Which::S1 => self.s1,
            Which::S2 => self.s2,
            Which::Q1 => self.q1,
            Which::Q2 => self.q2,
        }
    }

    /// Lists every violated record invariant; empty when the record is sound.
    pub fn violations(&self, slack: f64) -> Vec<String> {
        let mut out = Vec::new();
        let half = self.mean_n + 0.5;
        for (name, v) in [
            ("S1", self.s1),
            ("S2", self.s2),
            ("Q1", self.q1),
            ("Q2", self.q2),
        ] {
            if v.is_nan() || v < -1.0 - slack {
                out.push(format!("{name} = {v} below -1"));
            }
        }
        for (name, v) in [
            ("varX1", self.var_x1),
            ("varX2", self.var_x2),
            ("varY1", self.var_y1),
            ("varY2", self.var_y2),
        ] {
            if v.is_nan() || v < -slack {
                out.push(format!("{name} = {v} negative"));
            }
        }
        if self.uncertainty_x.is_nan() || self.uncertainty_x < 1.0 / 16.0 - slack {
            out.push(format!("varX1*varX2 = {} below 1/16", self.uncertainty_x));
        }
        if self.uncertainty_y.is_nan() || self.uncertainty_y < half * half - slack {
            out.push(format!(
                "varY1*varY2 = {} below (<n>+1/2)^2 = {}",
                self.uncertainty_y,
                half * half
            ));
        }
        if self.mean_n.is_nan() || self.mean_n < -slack {
            out.push(format!("mean_n = {} negative", self.mean_n));
        }
        out
    }
}
