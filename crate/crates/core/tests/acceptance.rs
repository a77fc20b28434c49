//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use twoatom::closed_form::ClosedFormVariant;
use twoatom::fock_oracle::{build_state, moments, AmplitudeSource};
use twoatom::observables::series::{series_from_blocks, SeriesForm};
use twoatom::observables::{SqueezingRecord, Which};
use twoatom::sweep::{self, ScanAxis, ScanConfig, TimeGrid};
use twoatom::verify::{self, GridPoint, VerifyConfig};
use twoatom::ModelParams;

const GRID_SEED: u64 = 8;
const GRID_POINTS: usize = 1000;

type Criterion = fn() -> Outcome;

struct Outcome {
    passed: bool,
    measured: String,
}

fn outcome(passed: bool, measured: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        measured: measured.into(),
    }
}

fn min_s1(ratio: f64, nbar: f64) -> f64 {
    sweep::min_squeezing(
        &ModelParams::new(ratio, nbar),
        &TimeGrid::short(),
        Which::S1,
    )
    .unwrap()
    .1
}

fn min_q1(ratio: f64, nbar: f64) -> f64 {
    sweep::min_squeezing(
        &ModelParams::new(ratio, nbar),
        &TimeGrid::short_ass(),
        Which::Q1,
    )
    .unwrap()
    .1
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn ratio_scan(nbar: f64) -> Vec<f64> {
    let cfg = ScanConfig::default();
    let values = [0.0, 0.25, 0.5, 0.75, 1.0];
    sweep::scan(&ModelParams::new(0.0, nbar), ScanAxis::Ratio, &values, &cfg)
        .unwrap()
        .points
        .iter()
        .map(|p| p.min_value)
        .collect()
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_1() -> Outcome {
    let dev = verify::closed_form_vs_rk4(ClosedFormVariant::Corrected, 500);
    outcome(
        dev <= 1e-6,
        format!("max |closed form - RK4| = {dev:.2e} (tol 1e-6)"),
    )
}

fn criterion_2() -> Outcome {
    let mins = ratio_scan(0.2);
    let monotone = mins.windows(2).all(|w| w[1] >= w[0]);
    let ok = within(mins[0], -0.27, 0.03) && within(mins[4], -0.20, 0.03) && monotone;
    outcome(
        ok,
        format!(
            "min S1 at nbar=0.2, R=0..1: [{}]; nondecreasing: {monotone}",
            fmt_list(&mins)
        ),
    )
}

fn criterion_3() -> Outcome {
    let mins = ratio_scan(0.4);
    let reversed = mins.windows(2).all(|w| w[1] <= w[0]);
    let ok = within(mins[0], -0.18, 0.03) && within(mins[4], -0.28, 0.03) && reversed;
    outcome(
        ok,
        format!(
            "min S1 at nbar=0.4, R=0..1: [{}]; want R=0 in -0.18±0.03, R=1 in -0.28±0.03; nonincreasing: {reversed}",
            fmt_list(&mins)
        ),
    )
}

fn criterion_4() -> Outcome {
    let mins = [min_s1(0.0, 0.3), min_s1(0.5, 0.3), min_s1(1.0, 0.3)];
    let hi = mins.iter().cloned().fold(f64::MIN, f64::max);
    let lo = mins.iter().cloned().fold(f64::MAX, f64::min);
    outcome(
        hi - lo < 0.04,
        format!(
            "min S1 at nbar=0.3, R=0,0.5,1: [{}]; spread {:.4} (< 0.04)",
            fmt_list(&mins),
            hi - lo
        ),
    )
}

fn criterion_5() -> Outcome {
    let q = min_q1(0.5, 0.8);
    outcome(
        within(q, -0.06, 0.02),
        format!("min Q1 on [0,4] at nbar=0.8, R=0.5: {q:.4} (want -0.06±0.02)"),
    )
}

fn criterion_6() -> Outcome {
    let (q0, q1) = (min_q1(0.0, 0.4), min_q1(1.0, 0.4));
    let direct = within(q0, -0.05, 0.02) && within(q1, -0.015, 0.01);
    let swapped = within(q1, -0.05, 0.02) && within(q0, -0.015, 0.01);
    let which = if direct {
        "R=0 -> 5%, R=1 -> 1.5%"
    } else if swapped {
        "R=1 -> 5%, R=0 -> 1.5%"
    } else {
        "no assignment"
    };
    outcome(
        direct || swapped,
        format!("min Q1 at nbar=0.4: R=0 {q0:.4}, R=1 {q1:.4}; assignment: {which}"),
    )
}

fn criterion_7() -> Outcome {
    let delay = |r: f64| {
        sweep::delay_time(
            &ModelParams::new(r, 0.8),
            Which::S1,
            sweep::DEFAULT_DELAY_THRESHOLD,
            &TimeGrid::short(),
        )
        .unwrap()
        .unwrap_or(f64::INFINITY)
    };
    let (d0, d5, d1) = (delay(0.0), delay(0.5), delay(1.0));
    outcome(
        d5 > d0 && d5 > d1,
        format!("delay(S1 < -1e-3) at nbar=0.8: R=0 {d0:.4}, R=0.5 {d5:.4}, R=1 {d1:.4}"),
    )
}

fn grid() -> Vec<GridPoint> {
    verify::random_grid(GRID_POINTS, GRID_SEED)
}

fn criterion_8() -> Outcome {
    let mut norm: f64 = 0.0;
    let mut excitation: f64 = 0.0;
    let mut heisenberg: f64 = f64::INFINITY;
    let mut ass: f64 = f64::INFINITY;
    let mut lowest: f64 = f64::INFINITY;
    let mut zero: f64 = 0.0;
    for p in grid() {
        let params = ModelParams::new(p.ratio, p.nbar);
        let state = build_state(&params, p.tau, AmplitudeSource::ClosedForm).unwrap();
        let m = moments(&state);
        let rec = SqueezingRecord::from_moments(p.tau, &m);
        norm = norm.max((state.global_norm() - 1.0).abs());
        excitation = excitation.max((m.mean_n + state.atomic_excitation() - p.nbar).abs());
        heisenberg = heisenberg.min(rec.uncertainty_x - 1.0 / 16.0);
        let half = rec.mean_n + 0.5;
        ass = ass.min(rec.uncertainty_y - half * half);
        lowest = lowest.min(rec.s1.min(rec.s2).min(rec.q1).min(rec.q2));
        let r0 = sweep::record_at(&params, 0.0).unwrap();
        zero = zero.max(
            r0.s1
                .abs()
                .max(r0.s2.abs())
                .max(r0.q1.abs())
                .max(r0.q2.abs()),
        );
    }
    let ok = norm <= 1e-9
        && excitation <= 1e-9
        && heisenberg >= -1e-9
        && ass >= -1e-9
        && lowest >= -1.0
        && zero <= 1e-10;
    outcome(
        ok,
        format!(
            "{GRID_POINTS} points: norm {norm:.1e}, excitation {excitation:.1e}, \
             min(uncX-1/16) {heisenberg:.2e}, min(uncY-(n+1/2)^2) {ass:.2e}, min S/Q {lowest:.4}, |S,Q(0)| {zero:.1e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let nbars = [0.2, 0.4, 0.8, 1.2];
    let single = verify::limit_deviation(0.0, &nbars, 501).unwrap();
    let identical = verify::limit_deviation(1.0, &nbars, 501).unwrap();
    outcome(
        single <= 1e-8 && identical <= 1e-8,
        format!("max |dS1| on [0,25]: R=0 vs single-atom JCM {single:.1e}, R=1 vs Dicke {identical:.1e}"),
    )
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in grid() {
        let params = ModelParams::new(p.ratio, p.nbar);
        let state = build_state(&params, p.tau, AmplitudeSource::ClosedForm).unwrap();
        let series = series_from_blocks(&params, &state.blocks, SeriesForm::Corrected)
            .to_moments(params.alpha());
        let direct = moments(&build_state(&params, p.tau, AmplitudeSource::Integrator).unwrap());
        worst = worst
            .max((series.mean_n - direct.mean_n).abs())
            .max((series.m1 - direct.m1).norm())
            .max((series.m2 - direct.m2).norm())
            .max((series.m22 - direct.m22).abs())
            .max((series.m4 - direct.m4).norm());
    }
    let corrections = verify::corrections(&VerifyConfig::default());
    let documented = corrections.len() >= 5;
    outcome(
        worst <= 1e-8 && documented,
        format!(
            "max |series - direct| = {worst:.1e} on {GRID_POINTS} points; {} corrections documented",
            corrections.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("oracle equivalence", criterion_1),
        ("first squeezing vs R at nbar=0.2", criterion_2),
        ("first squeezing vs R at nbar=0.4", criterion_3),
        ("insensitivity to R at nbar=0.3", criterion_4),
        ("maximum ASS at nbar=0.8, R=0.5", criterion_5),
        ("ASS endpoints at nbar=0.4", criterion_6),
        ("delay time for nonidentical atoms", criterion_7),
        ("property suite", criterion_8),
        ("limit reductions", criterion_9),
        ("series/moment duality", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        if !result.passed {
            failures += 1;
        }
        println!(
            "[{}] criterion {:>2} ({name}): {} [{:.1}s]",
            if result.passed { "PASS" } else { "FAIL" },
            i + 1,
            result.measured,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
