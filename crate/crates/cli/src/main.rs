//! Command-line front end for the two-atom squeezing model.

mod config;
mod figures;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use twoatom::closed_form::ClosedFormVariant;
use twoatom::observables::series::SeriesForm;
use twoatom::observables::{SqueezingRecord, Which, BOUND_SLACK};
use twoatom::sweep::{self, ScanAxis, ScanConfig, ScanResult, TimeGrid};
use twoatom::verify::{self, VerifyConfig};
use twoatom::ModelParams;

use config::{CommonArgs, Merged};
use table::{Cell, Format, Table};

const DEFAULT_NBAR: f64 = 0.2;
const DEFAULT_RATIO: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(
    name = "twoatom",
    version,
    about = "Squeezing of a coherent field coupled to two nonidentical atoms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time series of all squeezing measures.
    Evolve(EvolveArgs),
    /// Minimum, delay time and interval count over a parameter axis.
    Scan(ScanArgs),
    /// Run the internal verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Regenerate the data for one of the reference figures.
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Parameter to scan: ratio or nbar.
    #[arg(long)]
    axis: Option<ScanAxis>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    values: Option<Vec<f64>>,
    /// Squeezing level defining the delay time (negative).
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Random grid size for the Fock-space checks.
    #[arg(long, default_value_t = VerifyConfig::default().grid_points)]
    grid_points: usize,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Time samples for the closed-form comparison.
    #[arg(long, default_value_t = VerifyConfig::default().tau_samples)]
    tau_samples: usize,
    /// Debug: use the closed-form amplitudes exactly as printed.
    #[arg(long)]
    printed_closed_form: bool,
    /// Debug: use the moment series exactly as printed.
    #[arg(long)]
    printed_series: bool,
    /// Skip the figure-level claims.
    #[arg(long)]
    no_claims: bool,
    /// Report path, `-` for standard output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// Figure number, 1 to 9.
    id: u32,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the figure's mean photon number.
    #[arg(long)]
    nbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phase: Option<f64>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<twoatom::Error> for CliError {
    fn from(e: twoatom::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(a) => evolve(&a),
        Command::Scan(a) => scan(&a),
        Command::Verify(a) => verify(&a),
        Command::Figure(a) => figure(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn model_params(
    nbar: f64,
    ratio: f64,
    phase: Option<f64>,
    cutoff: Option<usize>,
) -> CliResult<ModelParams> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(CliError::Usage(format!(
            "nbar must be finite and non-negative, got {nbar}"
        )));
    }
    let mut p = ModelParams::new(ratio, nbar).with_phase(phase.unwrap_or(0.0));
    if let Some(c) = cutoff {
        p = p.with_cutoff(c);
    }
    p.validate()?;
    Ok(p)
}

fn grid(
    tmin: Option<f64>,
    tmax: Option<f64>,
    steps: Option<usize>,
    default: TimeGrid,
) -> CliResult<TimeGrid> {
    Ok(TimeGrid::new(
        tmin.unwrap_or(default.t_start),
        tmax.unwrap_or(default.t_end),
        steps.unwrap_or(default.steps),
    )?)
}

fn merged_params(m: &Merged) -> CliResult<ModelParams> {
    model_params(
        m.nbar.unwrap_or(DEFAULT_NBAR),
        m.ratio.unwrap_or(DEFAULT_RATIO),
        m.phase,
        m.cutoff,
    )
}

const EVOLVE_COLUMNS: [&str; 12] = [
    "tau", "S1", "S2", "Q1", "Q2", "varX1", "varX2", "varY1", "varY2", "mean_n", "uncX", "uncY",
];

fn record_row(r: &SqueezingRecord) -> Vec<Cell> {
    [
        r.time,
        r.s1,
        r.s2,
        r.q1,
        r.q2,
        r.var_x1,
        r.var_x2,
        r.var_y1,
        r.var_y2,
        r.mean_n,
        r.uncertainty_x,
        r.uncertainty_y,
    ]
    .into_iter()
    .map(Cell::Num)
    .collect()
}

fn evolve_table(records: &[SqueezingRecord], comment: Option<String>) -> Table {
    Table {
        columns: EVOLVE_COLUMNS.to_vec(),
        rows: records.iter().map(record_row).collect(),
        comment,
    }
}

/// Re-reads a written evolve table and checks the physical bounds.
fn validate_evolve_output(path: &Path, expected_rows: usize) -> CliResult<()> {
    let (header, rows) = table::read_csv(path).map_err(io_error(path))?;
    if header != EVOLVE_COLUMNS {
        return Err(CliError::Numerical(format!(
            "unexpected header in {}",
            path.display()
        )));
    }
    if rows.len() != expected_rows {
        return Err(CliError::Numerical(format!(
            "{}: wrote {} rows, expected {expected_rows}",
            path.display(),
            rows.len()
        )));
    }
    // Slack covers the 12-digit rounding of the printed values.
    let slack = |x: f64| BOUND_SLACK + 1e-11 * x.abs();
    for (i, r) in rows.iter().enumerate() {
        let [_, s1, s2, q1, q2, vx1, vx2, vy1, vy2, n, ux, uy] = r[..] else {
            return Err(CliError::Numerical(format!("row {i}: wrong column count")));
        };
        let mut bad = Vec::new();
        for (name, v) in [("S1", s1), ("S2", s2), ("Q1", q1), ("Q2", q2)] {
            if !v.is_finite() || v < -1.0 - slack(v) {
                bad.push(format!("{name}={v}"));
            }
        }
        for (name, v) in [
            ("varX1", vx1),
            ("varX2", vx2),
            ("varY1", vy1),
            ("varY2", vy2),
            ("mean_n", n),
        ] {
            if !v.is_finite() || v < -slack(v) {
                bad.push(format!("{name}={v}"));
            }
        }
        if ux < 1.0 / 16.0 - slack(ux) {
            bad.push(format!("uncX={ux}"));
        }
        let bound_y = (n + 0.5).powi(2);
        if uy < bound_y - slack(uy) - 1e-10 * bound_y {
            bad.push(format!("uncY={uy}"));
        }
        if !bad.is_empty() {
            return Err(CliError::Numerical(format!(
                "{} row {i} violates bounds: {}",
                path.display(),
                bad.join(", ")
            )));
        }
    }
    Ok(())
}

fn write_output(t: &Table, out: &Path, format: Format) -> CliResult<()> {
    table::write_table(t, out, format).map_err(io_error(out))?;
    if out.as_os_str() != "-" {
        info!("wrote {} rows to {}", t.rows.len(), out.display());
    }
    Ok(())
}

fn evolve(a: &EvolveArgs) -> CliResult<()> {
    let m = a.common.merge().map_err(CliError::Usage)?;
    let params = merged_params(&m)?;
    let window = grid(m.tmin, m.tmax, m.steps, TimeGrid::long())?;
    let out = m.out.clone().unwrap_or_else(|| PathBuf::from("-"));
    let format = m.format.unwrap_or(Format::Csv);
    let records = sweep::time_series(&params, &window)?;
    let t = evolve_table(&records, None);
    write_output(&t, &out, format)?;
    if format == Format::Csv && out.as_os_str() != "-" {
        validate_evolve_output(&out, records.len())?;
    }
    Ok(())
}

fn scan_table(result: &ScanResult) -> Table {
    Table {
        columns: vec!["axis_value", "min_S1", "argmin_tau", "delay", "intervals"],
        rows: result
            .points
            .iter()
            .map(|p| {
                vec![
                    Cell::Num(p.value),
                    Cell::Num(p.min_value),
                    Cell::Num(p.argmin_tau),
                    p.delay.map_or(Cell::Infinite, Cell::Num),
                    Cell::Int(p.intervals),
                ]
            })
            .collect(),
        comment: None,
    }
}

fn scan(a: &ScanArgs) -> CliResult<()> {
    let m = a.common.merge().map_err(CliError::Usage)?;
    let axis = match (a.axis, m.file.axis.as_deref()) {
        (Some(axis), _) => axis,
        (None, Some(s)) => s.parse().map_err(CliError::Usage)?,
        (None, None) => ScanAxis::Ratio,
    };
    let values = a
        .values
        .clone()
        .or_else(|| m.file.values.clone())
        .unwrap_or_default();
    if values.is_empty() {
        return Err(CliError::Usage(
            "scan needs a non-empty --values list".into(),
        ));
    }
    let params = merged_params(&m)?;
    let config = ScanConfig {
        which: Which::S1,
        window: grid(m.tmin, m.tmax, m.steps, TimeGrid::short())?,
        interval_window: TimeGrid::long(),
        threshold: a
            .threshold
            .or(m.file.threshold)
            .unwrap_or(sweep::DEFAULT_DELAY_THRESHOLD),
    };
    let result = sweep::scan(&params, axis, &values, &config)?;
    let out = m.out.clone().unwrap_or_else(|| PathBuf::from("-"));
    write_output(&scan_table(&result), &out, m.format.unwrap_or(Format::Csv))
}

fn verify(a: &VerifyArgs) -> CliResult<()> {
    let cfg = VerifyConfig {
        grid_points: a.grid_points,
        seed: a.seed,
        tau_samples: a.tau_samples,
        closed_form: if a.printed_closed_form {
            ClosedFormVariant::AsPrinted
        } else {
            ClosedFormVariant::Corrected
        },
        series_form: if a.printed_series {
            SeriesForm::AsPrinted
        } else {
            SeriesForm::Corrected
        },
        claims: !a.no_claims,
    };
    let report = verify::run(&cfg)?;
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
    if a.out.as_os_str() == "-" {
        println!("{json}");
    } else {
        std::fs::write(&a.out, json + "\n").map_err(io_error(&a.out))?;
    }
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        info!(
            "{status} {}: {:.3e} (tol {:.1e})",
            c.name, c.max_deviation, c.tolerance
        );
    }
    for c in report.claims.iter().filter(|c| !c.consistent) {
        warn!("claim {} not reproduced: {}", c.name, c.computed);
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        Err(CliError::Verification(format!(
            "verification failed: {}",
            failed.join(", ")
        )))
    }
}

fn figure(a: &FigureArgs) -> CliResult<()> {
    let spec = figures::spec(a.id)
        .ok_or_else(|| CliError::Usage(format!("unknown figure id {} (expected 1-9)", a.id)))?;
    let nbar = a.nbar.unwrap_or(spec.nbar);
    let window = grid(a.tmin, a.tmax, a.steps, spec.window)?;
    std::fs::create_dir_all(&a.out).map_err(io_error(&a.out))?;
    for &ratio in spec.ratios {
        let params = model_params(nbar, ratio, a.phase, a.cutoff)?;
        let records = sweep::time_series(&params, &window)?;
        let comment = format!(
            "figure {}: nbar={} R={} window=[{}, {}] steps={} columns={}",
            a.id,
            nbar,
            ratio,
            window.t_start,
            window.t_end,
            window.steps,
            spec.columns.join(",")
        );
        let t = figures::project(&evolve_table(&records, Some(comment)), spec.columns);
        let path = a.out.join(format!(
            "fig{}_nbar{}_R{}.{}",
            a.id,
            nbar,
            ratio,
            a.format.extension()
        ));
        write_output(&t, &path, a.format)?;
    }
    Ok(())
}
