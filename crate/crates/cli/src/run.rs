//! Method dispatch over sweep points and CSV output.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use rfso_core::analytic::{self, Method, OutageEstimate, Scenario};
use rfso_core::mcsim::{estimate_outage_mc, McConfig};
use rfso_core::Error;

use crate::scenario::{Point, ScenarioFile};
use crate::sweep::SweepVar;

pub const CSV_HEADER: [&str; 11] = [
    "scenario_id",
    "sweep_var",
    "sweep_value",
    "mu1_db",
    "mu2_db",
    "method",
    "p_out",
    "uncertainty",
    "work",
    "wall_time_ms",
    "diagnostics",
];

/// Methods as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum MethodChoice {
    Exact,
    Gg,
    Single,
    Quadrature,
    Mc,
    FloorMu1,
    FloorMu2,
    FloorMu1App,
    /// Every method that applies to the point.
    All,
}

impl MethodChoice {
    fn method(self) -> Option<Method> {
        Some(match self {
            MethodChoice::Exact => Method::Exact,
            MethodChoice::Gg => Method::Gg,
            MethodChoice::Single => Method::Single,
            MethodChoice::Quadrature => Method::Quadrature,
            MethodChoice::Mc => Method::Mc,
            MethodChoice::FloorMu1 => Method::FloorMu1,
            MethodChoice::FloorMu2 => Method::FloorMu2,
            MethodChoice::FloorMu1App => Method::FloorMu1App,
            MethodChoice::All => return None,
        })
    }
}

/// Methods to run at one point, in command-line order without repeats.
/// `all` skips the GG path unless ρ_M = 1 and the single-relay path unless
/// M = 1.
pub fn expand(choices: &[MethodChoice], file: &ScenarioFile) -> Vec<Method> {
    let mut out: Vec<Method> = Vec::new();
    for &c in choices {
        let ms = match c.method() {
            Some(m) => vec![m],
            None => [
                Method::Exact,
                Method::Gg,
                Method::Single,
                Method::Quadrature,
                Method::Mc,
                Method::FloorMu1,
                Method::FloorMu2,
                Method::FloorMu1App,
            ]
            .into_iter()
            .filter(|m| match m {
                Method::Gg => file.malaga.rho_m == 1.0,
                Method::Single => file.relays == 1,
                _ => true,
            })
            .collect(),
        };
        for m in ms {
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario_id: String,
    pub sweep: Option<(SweepVar, f64)>,
    pub mu1_db: f64,
    pub mu2_db: f64,
    pub method: Method,
    /// Missing when the method failed outright; a non-converged series keeps
    /// its partial value.
    pub p_out: Option<f64>,
    pub uncertainty: Option<f64>,
    pub work: u64,
    pub wall_time_ms: f64,
    pub diagnostics: Vec<String>,
    pub failed: bool,
}

fn dispatch(method: Method, s: &Scenario, mc: &McConfig) -> rfso_core::Result<OutageEstimate> {
    match method {
        Method::Exact => analytic::outage_exact(s),
        Method::Gg => analytic::outage_gg(s),
        Method::Single => analytic::outage_single_relay(s),
        Method::Quadrature => analytic::outage_quadrature_oracle(s),
        Method::Mc => estimate_outage_mc(s, mc),
        Method::FloorMu1 => analytic::outage_floor_mu1(s),
        Method::FloorMu2 => analytic::outage_floor_mu2(s),
        Method::FloorMu1App => analytic::outage_floor_mu1_first_term(s),
    }
}

pub fn evaluate(point: &Point, method: Method, mc: &McConfig) -> ResultRow {
    let file = &point.file;
    let mut row = ResultRow {
        scenario_id: file.id.clone(),
        sweep: point.sweep,
        mu1_db: file.mu1_db,
        mu2_db: file.mu2_db,
        method,
        p_out: None,
        uncertainty: None,
        work: 0,
        wall_time_ms: 0.0,
        diagnostics: Vec::new(),
        failed: false,
    };
    let built = match file.build() {
        Ok(b) => b,
        Err(e) => {
            row.diagnostics.push(format!("error: {e}"));
            row.failed = true;
            return row;
        }
    };
    let scenario = if method == Method::Mc {
        &built.scenario
    } else {
        row.diagnostics.extend(built.warnings);
        &built.analytic
    };
    let start = Instant::now();
    let result = dispatch(method, scenario, mc);
    row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let estimate = match result {
        Ok(e) => Some(e),
        Err(Error::SeriesNotConverged { partial }) => {
            row.diagnostics.push(format!(
                "error: series not converged within t_max = {}; partial value reported",
                scenario.series.t_max
            ));
            row.failed = true;
            Some(*partial)
        }
        Err(e) => {
            row.diagnostics.push(format!("error: {e}"));
            row.failed = true;
            None
        }
    };
    if let Some(e) = estimate {
        row.p_out = Some(e.p_out);
        row.uncertainty = Some(e.uncertainty);
        row.work = e.work;
        row.diagnostics.extend(e.warnings);
    }
    row
}

/// Every (point, method) pair of the given files, evaluated in parallel and
/// returned in file, sweep and method order.
pub fn run_files(files: &[ScenarioFile], methods: &[MethodChoice], mc: &McConfig) -> Vec<ResultRow> {
    let tasks: Vec<(Point, Method)> = files
        .iter()
        .flat_map(|f| f.points())
        .flat_map(|p| {
            expand(methods, &p.file)
                .into_iter()
                .map(move |m| (p.clone(), m))
        })
        .collect();
    tasks
        .par_iter()
        .map(|(p, m)| evaluate(p, *m, mc))
        .collect()
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn record(row: &ResultRow) -> [String; 11] {
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    [
        row.scenario_id.clone(),
        row.sweep.map(|(v, _)| v.to_string()).unwrap_or_default(),
        opt(row.sweep.map(|(_, x)| x)),
        format_float(row.mu1_db),
        format_float(row.mu2_db),
        row.method.to_string(),
        opt(row.p_out),
        opt(row.uncertainty),
        row.work.to_string(),
        format_float(row.wall_time_ms),
        row.diagnostics.join("; "),
    ]
}

pub fn write_csv_to<W: Write>(out: W, rows: &[ResultRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV next to `path` and renames it into place, so readers
/// never see a partial file.
pub fn write_csv(path: &Path, rows: &[ResultRow]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write_csv_to(&mut tmp, rows).map_err(std::io::Error::other)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
