//! Time series, squeezing minima, delay times and parameter scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_oracle::{build_state, moments, AmplitudeSource};
use crate::observables::{SqueezingRecord, Which};
use crate::params::{auto_cutoff, ModelParams};

/// Golden-section refinement stops at this bracket width.
pub const TAU_RESOLUTION: f64 = 1e-6;

/// Default "first squeezing" threshold for delay times.
pub const DEFAULT_DELAY_THRESHOLD: f64 = -1e-3;

/// Values above this count as "not squeezed" when counting intervals, so
/// round-off around zero does not open spurious intervals.
pub const INTERVAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        let grid = Self {
            t_start,
            t_end,
            steps,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `[0, 50]` with 5001 points.
    pub fn long() -> Self {
        Self {
            t_start: 0.0,
            t_end: 50.0,
            steps: 5001,
        }
    }

    /// `[0, 3]` at spacing `1e-3`, the window for first normal squeezing.
    pub fn short() -> Self {
        Self {
            t_start: 0.0,
            t_end: 3.0,
            steps: 3001,
        }
    }

    /// `[0, 4]` at spacing `1e-3`, the window for first amplitude-squared squeezing.
    pub fn short_ass() -> Self {
        Self {
            t_start: 0.0,
            t_end: 4.0,
            steps: 4001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite())
            || self.t_start < 0.0
            || self.t_end <= self.t_start
        {
            return Err(Error::InvalidParameter(format!(
                "time grid needs 0 <= t_start < t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs at least 2 points, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.steps - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.t_end
        } else {
            self.t_start + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }

    /// Same window, `2 (steps - 1) + 1` points.
    pub fn refined(&self) -> Self {
        Self {
            steps: 2 * (self.steps - 1) + 1,
            ..*self
        }
    }
}

/// The full squeezing record at a single instant.
pub fn record_at(params: &ModelParams, tau: f64) -> Result<SqueezingRecord> {
    let state = build_state(params, tau, AmplitudeSource::ClosedForm)?;
    Ok(SqueezingRecord::from_moments(tau, &moments(&state)))
}

fn value_at(params: &ModelParams, tau: f64, which: Which) -> Result<f64> {
    Ok(record_at(params, tau)?.get(which))
}

/// One record per grid point, in time order.
pub fn time_series(params: &ModelParams, grid: &TimeGrid) -> Result<Vec<SqueezingRecord>> {
    params.validate()?;
    grid.validate()?;
    grid.points()
        .into_par_iter()
        .map(|tau| record_at(params, tau))
        .collect()
}

fn values_on(params: &ModelParams, grid: &TimeGrid, which: Which) -> Result<Vec<f64>> {
    params.validate()?;
    grid.validate()?;
    grid.points()
        .into_par_iter()
        .map(|tau| value_at(params, tau, which))
        .collect()
}

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > TAU_RESOLUTION {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Minimum of a squeezing parameter over `window`: grid search, then
/// golden-section refinement around the best grid point. Returns `(tau, value)`.
pub fn min_squeezing(params: &ModelParams, window: &TimeGrid, which: Which) -> Result<(f64, f64)> {
    let values = values_on(params, window, which)?;
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid has at least two points");
    let lo = window.point(best.saturating_sub(1));
    let hi = window.point((best + 1).min(window.steps - 1));
    let (tau, value) = golden_section(lo, hi, |t| value_at(params, t, which))?;
    if value < best_value {
        Ok((tau, value))
    } else {
        Ok((window.point(best), best_value))
    }
}

/// First time the parameter drops below `threshold` inside `window`, located
/// on the grid and then bisected. `None` when it never does.
pub fn delay_time(
    params: &ModelParams,
    which: Which,
    threshold: f64,
    window: &TimeGrid,
) -> Result<Option<f64>> {
    if threshold.is_nan() || threshold >= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delay threshold must be negative, got {threshold}"
        )));
    }
    let values = values_on(params, window, which)?;
    let Some(first) = values.iter().position(|&v| v < threshold) else {
        return Ok(None);
    };
    if first == 0 {
        return Ok(Some(window.t_start));
    }
    let (mut lo, mut hi) = (window.point(first - 1), window.point(first));
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if value_at(params, mid, which)? < threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Number of maximal runs of consecutive records with the parameter below zero.
pub fn squeezing_intervals(records: &[SqueezingRecord], which: Which) -> usize {
    let mut count = 0;
    let mut inside = false;
    for r in records {
        let squeezed = r.get(which) < -INTERVAL_EPS;
        if squeezed && !inside {
            count += 1;
        }
        inside = squeezed;
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanAxis {
    Ratio,
    Nbar,
}

impl std::str::FromStr for ScanAxis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "R" | "r" | "ratio" => Ok(ScanAxis::Ratio),
            "nbar" => Ok(ScanAxis::Nbar),
            other => Err(format!(
                "unknown scan axis {other:?} (expected ratio or nbar)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub which: Which,
    /// Window for the minimum and the delay time.
    pub window: TimeGrid,
    /// Window for counting squeezing intervals.
    pub interval_window: TimeGrid,
    pub threshold: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            which: Which::S1,
            window: TimeGrid::short(),
            interval_window: TimeGrid::long(),
            threshold: DEFAULT_DELAY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub min_value: f64,
    pub argmin_tau: f64,
    /// `None` stands for "never squeezed in the window".
    pub delay: Option<f64>,
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub axis: ScanAxis,
    pub which: Which,
    pub points: Vec<ScanPoint>,
}

/// Parameters of one scan point. Scanning `nbar` raises the cutoff when the
/// new intensity needs it.
pub fn scan_params(template: &ModelParams, axis: ScanAxis, value: f64) -> ModelParams {
    match axis {
        ScanAxis::Ratio => ModelParams {
            coupling_ratio: value,
            ..*template
        },
        ScanAxis::Nbar => ModelParams {
            nbar: value,
            cutoff: template.cutoff.max(auto_cutoff(value)),
            ..*template
        },
    }
}

/// Evaluates each value independently; results are in input order.
pub fn scan(
    template: &ModelParams,
    axis: ScanAxis,
    values: &[f64],
    config: &ScanConfig,
) -> Result<ScanResult> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "scan needs at least one value".into(),
        ));
    }
    let points = values
        .par_iter()
        .map(|&value| {
            let params = scan_params(template, axis, value);
            let (argmin_tau, min_value) = min_squeezing(&params, &config.window, config.which)?;
            let delay = delay_time(&params, config.which, config.threshold, &config.window)?;
            let records = time_series(&params, &config.interval_window)?;
            Ok(ScanPoint {
                value,
                min_value,
                argmin_tau,
                delay,
                intervals: squeezing_intervals(&records, config.which),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        axis,
        which: config.which,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 5).is_err());
        assert!(TimeGrid::new(-1.0, 1.0, 5).is_err());
        let g = TimeGrid::new(0.0, 3.0, 3001).unwrap();
        assert_eq!(g.points().len(), 3001);
        assert_eq!(g.point(3000), 3.0);
        assert_abs_diff_eq!(g.spacing(), 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn zero_time_record() {
        let r = record_at(&ModelParams::new(0.5, 0.2), 0.0).unwrap();
        assert!(r.s1.abs() < 1e-10 && r.s2.abs() < 1e-10);
        assert!(r.q1.abs() < 1e-10 && r.q2.abs() < 1e-10);
    }

    #[test]
    fn long_series_oscillates() {
        let p = ModelParams::new(0.5, 0.2);
        let series = time_series(&p, &TimeGrid::new(0.0, 50.0, 1001).unwrap()).unwrap();
        assert_eq!(series.len(), 1001);
        assert!(series.windows(2).all(|w| w[0].time < w[1].time));
        assert!(series[0].s1.abs() < 1e-10);
        assert!(series[10].s1 < 0.0);
        assert!(series.iter().any(|r| r.s1 > 0.0));
        assert!(squeezing_intervals(&series, Which::S1) > 2);
        assert!(series.iter().all(|r| r.violations(1e-9).is_empty()));
    }

    #[test]
    fn vacuum_series_is_flat() {
        let p = ModelParams::new(0.7, 0.0);
        let series = time_series(&p, &TimeGrid::new(0.0, 20.0, 201).unwrap()).unwrap();
        for r in &series {
            assert_eq!((r.s1, r.s2, r.q1, r.q2), (0.0, 0.0, 0.0, 0.0));
        }
        assert_eq!(squeezing_intervals(&series, Which::S1), 0);
        let (_, v) = min_squeezing(&p, &TimeGrid::short(), Which::S1).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(
            delay_time(&p, Which::S1, -1e-3, &TimeGrid::short()).unwrap(),
            None
        );
    }

    #[test]
    fn single_atom_squeezes_immediately() {
        let p = ModelParams::new(0.0, 0.2);
        for tau in [0.01, 0.05, 0.1] {
            assert!(record_at(&p, tau).unwrap().s1 < 0.0);
        }
    }

    #[test]
    fn delay_time_is_a_crossing() {
        let p = ModelParams::new(0.5, 0.8);
        let d = delay_time(&p, Which::S1, -1e-3, &TimeGrid::short())
            .unwrap()
            .unwrap();
        assert!(d > 0.0);
        assert_abs_diff_eq!(record_at(&p, d).unwrap().s1, -1e-3, epsilon = 1e-8);
        assert!(delay_time(&p, Which::S1, 0.0, &TimeGrid::short()).is_err());
    }

    #[test]
    fn refined_minimum_beats_grid() {
        let p = ModelParams::new(0.5, 0.2);
        let grid = TimeGrid::new(0.0, 3.0, 31).unwrap();
        let (tau, v) = min_squeezing(&p, &grid, Which::S1).unwrap();
        let best_grid = time_series(&p, &grid)
            .unwrap()
            .iter()
            .map(|r| r.s1)
            .fold(f64::INFINITY, f64::min);
        assert!(v <= best_grid);
        assert!((0.0..=3.0).contains(&tau));
    }

    #[test]
    fn grid_refinement_is_stable() {
        for (r, nbar) in [(0.0, 0.2), (0.5, 0.4), (1.0, 0.8)] {
            let p = ModelParams::new(r, nbar);
            let (_, a) = min_squeezing(&p, &TimeGrid::short(), Which::S1).unwrap();
            let (_, b) = min_squeezing(&p, &TimeGrid::short().refined(), Which::S1).unwrap();
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn scan_is_ordered_and_deterministic() {
        let cfg = ScanConfig {
            interval_window: TimeGrid::new(0.0, 10.0, 501).unwrap(),
            ..ScanConfig::default()
        };
        let t = ModelParams::new(0.5, 0.2);
        let values = [1.0, 0.0, 0.5];
        let a = scan(&t, ScanAxis::Ratio, &values, &cfg).unwrap();
        let b = scan(&t, ScanAxis::Ratio, &values, &cfg).unwrap();
        assert_eq!(a, b);
        let got: Vec<f64> = a.points.iter().map(|p| p.value).collect();
        assert_eq!(got, values);
        assert!(scan(&t, ScanAxis::Ratio, &[], &cfg).is_err());
    }

    #[test]
    fn nbar_scan_raises_cutoff() {
        let t = ModelParams::new(0.5, 0.2);
        let p = scan_params(&t, ScanAxis::Nbar, 4.0);
        assert_eq!(p.cutoff, auto_cutoff(4.0));
        assert!(p.validate().is_ok());
    }

    #[test]
    fn interval_counting() {
        let mk = |v: f64| SqueezingRecord {
            s1: v,
            ..record_at(&ModelParams::new(0.5, 0.0), 0.0).unwrap()
        };
        let recs: Vec<_> = [0.0, -0.1, -0.2, 0.1, -0.3, 0.0, -1e-15]
            .iter()
            .map(|&v| mk(v))
            .collect();
        assert_eq!(squeezing_intervals(&recs, Which::S1), 2);
    }
}
