use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use super::config::RunConfig;
use super::environment::read_environment;
use super::format::sig9;
use super::tables::{components_to_rows, finish, read_components, read_measurements, read_text, write_components_csv};
use crate::calibration::{
    assemble_system, error_statistics, objective_linear, solve_linear_domain, solve_log_domain,
    CalibrationSystem, ErrorStatistics, LinearSolution, LogSolution, LossVector,
};
use crate::channel_stats::{
    compare_statistics, pdp_svg, scatter_svg, spread_report, synthesize_pdp, ComparisonRow, SpreadReport,
};
use crate::error::{Error, Result};
use crate::geometry::tessellate_icosahedron;
use crate::tracer::{trace_with_launch_set, Link, TraceResult};

/// Writes `contents` to `path` via a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), sig9)
}

#[derive(Debug, Clone)]
pub struct LinkOutcome {
    pub id: String,
    pub result: TraceResult,
    pub csv_path: PathBuf,
}

/// Traces every configured link and writes `components_<id>.csv` plus `trace_summary.csv`.
pub fn run_trace(cfg: &RunConfig) -> Result<Vec<LinkOutcome>> {
    let env = read_environment(cfg.require(&cfg.environment, "environment file")?)?;
    if cfg.links.is_empty() {
        return Err(Error::invalid("no links configured"));
    }
    cfg.trace.validate()?;
    let tx_pattern = cfg.tx_antenna.load()?;
    let rx_pattern = cfg.rx_antenna.load()?;
    let tess = tessellate_icosahedron(cfg.trace.tessellation_frequency)?;
    let mut seen = std::collections::BTreeSet::new();
    for l in &cfg.links {
        if !seen.insert(l.id.as_str()) {
            return Err(Error::invalid(format!("duplicate link id `{}`", l.id)));
        }
    }

    let results: Vec<Result<TraceResult>> = cfg
        .links
        .par_iter()
        .map(|l| {
            let (tx, rx) = l.poses()?;
            let link = Link {
                tx: &tx,
                rx: &rx,
                tx_pattern: &tx_pattern,
                rx_pattern: &rx_pattern,
            };
            trace_with_launch_set(&env, &link, &cfg.trace, &tess)
                .map_err(|e| Error::invalid(format!("link `{}`: {e}", l.id)))
        })
        .collect();

    let mut outcomes = Vec::with_capacity(results.len());
    for (l, r) in cfg.links.iter().zip(results) {
        outcomes.push(LinkOutcome {
            id: l.id.clone(),
            result: r?,
            csv_path: cfg.output_dir.join(format!("components_{}.csv", l.id)),
        });
    }

    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record(["link_id", "n_components", "strongest_power_dbm", "los"])?;
    for o in &outcomes {
        write_atomic(&o.csv_path, &write_components_csv(&components_to_rows(&o.result.components))?)?;
        summary.write_record([
            o.id.clone(),
            o.result.components.len().to_string(),
            opt(o.result.components.first().map(|c| c.power_dbm)),
            (!o.result.los_blocked).to_string(),
        ])?;
    }
    write_atomic(&cfg.output_dir.join("trace_summary.csv"), &finish(summary)?)?;
    Ok(outcomes)
}

#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub system: CalibrationSystem,
    pub log: LogSolution,
    pub linear: LinearSolution,
    /// OF_lin of the dB-domain solution.
    pub log_of_lin: f64,
    pub statistics: Option<ErrorStatistics>,
    pub warnings: Vec<String>,
}

/// Assembles, solves in both domains and writes `materials.csv`, `materials.txt` and
/// `residuals.csv`.
pub fn run_calibrate(cfg: &RunConfig) -> Result<CalibrationReport> {
    let env = read_environment(cfg.require(&cfg.environment, "environment file")?)?;
    let records = read_measurements(cfg.require(&cfg.measurements, "measurements file")?)?;
    let tx_pattern = cfg.tx_antenna.load()?;
    let rx_pattern = cfg.rx_antenna.load()?;
    let system = assemble_system(&records, &env, &tx_pattern, &rx_pattern, &cfg.trace, cfg.match_threshold())?;
    let log = solve_log_domain(&system)?;
    let linear = solve_linear_domain(&system, cfg.seed)?;
    let log_of_lin = objective_linear(&system, &log.losses);
    let statistics = error_statistics(&log.record_residuals).ok();

    let mut warnings = Vec::new();
    if log.rank_deficient {
        warnings.push(format!(
            "rank-deficient system: rank {} of {} unknowns, minimum-norm solution reported",
            log.rank,
            log.retained_columns.len()
        ));
    }
    if log.losses.has_negative() {
        warnings.push("negative fitted losses reported raw; forward simulation clamps them to 0 dB".into());
    }
    for (id, why) in &system.excluded {
        warnings.push(format!("record `{id}` excluded: {why}"));
    }

    let out = &cfg.output_dir;
    write_atomic(&out.join("materials.csv"), &materials_csv(&log.losses, &linear.losses)?)?;
    write_atomic(&out.join("residuals.csv"), &residuals_csv(&system, &log, &linear)?)?;
    let report = CalibrationReport {
        system,
        log,
        linear,
        log_of_lin,
        statistics,
        warnings,
    };
    write_atomic(&out.join("materials.txt"), &materials_text(&report))?;
    Ok(report)
}

fn materials_csv(log: &LossVector, lin: &LossVector) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "material",
        "refl_loss_log_db",
        "pen_loss_log_db",
        "refl_loss_lin_db",
        "pen_loss_lin_db",
    ])?;
    for m in &log.material_order {
        w.write_record([
            m.clone(),
            opt(log.reflection_db(m)),
            opt(log.penetration_db(m)),
            opt(lin.reflection_db(m)),
            opt(lin.penetration_db(m)),
        ])?;
    }
    finish(w)
}

fn residuals_csv(system: &CalibrationSystem, log: &LogSolution, lin: &LinearSolution) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "error_log_db", "error_lin_db"])?;
    for (j, id) in system.record_ids.iter().enumerate() {
        w.write_record([id.clone(), sig9(log.record_residuals[j]), sig9(lin.record_residuals[j])])?;
    }
    finish(w)
}

fn fixed1(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.1}"))
}

fn materials_text(r: &CalibrationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<20} {:>10} {:>10} {:>10} {:>10}", "Material", "Refl.", "Pen.", "Refl.", "Pen.");
    let _ = writeln!(s, "{:<20} {:>10} {:>10} {:>10} {:>10}", "", "(log, dB)", "(log, dB)", "(lin, dB)", "(lin, dB)");
    for m in &r.log.losses.material_order {
        let _ = writeln!(
            s,
            "{:<20} {:>10} {:>10} {:>10} {:>10}",
            m,
            fixed1(r.log.losses.reflection_db(m)),
            fixed1(r.log.losses.penetration_db(m)),
            fixed1(r.linear.losses.reflection_db(m)),
            fixed1(r.linear.losses.penetration_db(m)),
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<20} {:>10} {:>10}", "Objective", "Log. Opt.", "Lin. Opt.");
    let _ = writeln!(s, "{:<20} {:>10.3} {:>10.3}", "OF_dB (rms, dB)", r.log.of_db_rms, r.linear.of_db_rms);
    let _ = writeln!(s, "{:<20} {:>10.4} {:>10.4}", "OF_lin", r.log_of_lin, r.linear.of_lin);
    let _ = writeln!(s);
    let _ = writeln!(s, "records used: {}", r.system.rows());
    let _ = writeln!(s, "rank: {} of {}", r.log.rank, r.log.retained_columns.len());
    if let Some(st) = &r.statistics {
        let _ = writeln!(s, "error mean: {:.2} dB", st.mean_db);
        let _ = writeln!(s, "error std: {:.2} dB", st.std_db);
        let _ = writeln!(s, "abs error std: {:.2} dB", st.abs_std_db);
        let _ = writeln!(
            s,
            "best fit (AIC): {}",
            st.best_fit.map_or_else(|| "degenerate".to_string(), |d| d.to_string())
        );
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

const STATS_HEADER: [&str; 5] = [
    "location",
    "n_components",
    "rms_delay_spread_ns",
    "rms_angular_spread_deg",
    "angular_capped",
];

#[derive(Debug, Deserialize)]
struct StatsRow {
    location: String,
    n_components: usize,
    rms_delay_spread_ns: f64,
    rms_angular_spread_deg: f64,
    angular_capped: bool,
}

fn location_name(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Spread report per component CSV; writes `stats.csv` and `pdp_<location>.svg`.
pub fn run_stats(cfg: &RunConfig) -> Result<Vec<(String, SpreadReport)>> {
    if cfg.components.is_empty() {
        return Err(Error::invalid("no component files given"));
    }
    let mut out = Vec::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(STATS_HEADER)?;
    let mut plots = Vec::new();
    for p in &cfg.components {
        let comps = read_components(p)?
            .iter()
            .map(|r| r.to_component())
            .collect::<Result<Vec<_>>>()?;
        if comps.is_empty() {
            return Err(Error::EmptyInput(format!("{} has no components", p.display())));
        }
        let loc = location_name(p);
        let rep = spread_report(&comps);
        w.write_record([
            loc.clone(),
            rep.n_components.to_string(),
            sig9(rep.rms_delay_spread_ns),
            sig9(rep.rms_angular_spread_deg),
            rep.angular_capped.to_string(),
        ])?;
        let pdp = synthesize_pdp(&comps, cfg.pdp_resolution_ns)?;
        plots.push((cfg.output_dir.join(format!("pdp_{loc}.svg")), pdp_svg(&pdp, &format!("PDP {loc}"))));
        out.push((loc, rep));
    }
    write_atomic(&cfg.output_dir.join("stats.csv"), &finish(w)?)?;
    for (path, svg) in plots {
        write_atomic(&path, &svg)?;
    }
    Ok(out)
}

pub fn read_stats(path: &Path) -> Result<Vec<(String, SpreadReport)>> {
    let text = read_text(path)?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let rows: Vec<StatsRow> = r
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::schema(path.display().to_string(), e.to_string()))?;
    Ok(rows
        .into_iter()
        .map(|s| {
            (
                s.location,
                SpreadReport {
                    rms_delay_spread_ns: s.rms_delay_spread_ns,
                    rms_angular_spread_deg: s.rms_angular_spread_deg,
                    n_components: s.n_components,
                    angular_capped: s.angular_capped,
                },
            )
        })
        .collect())
}

/// Compares two stats CSVs over the same locations; writes `compare.csv` and scatter plots.
pub fn run_compare(cfg: &RunConfig) -> Result<Vec<ComparisonRow>> {
    let measured = read_stats(cfg.require(&cfg.measured_stats, "measured stats file")?)?;
    let predicted = read_stats(cfg.require(&cfg.predicted_stats, "predicted stats file")?)?;
    let mut m_locs: Vec<&str> = measured.iter().map(|m| m.0.as_str()).collect();
    let mut p_locs: Vec<&str> = predicted.iter().map(|p| p.0.as_str()).collect();
    m_locs.sort_unstable();
    p_locs.sort_unstable();
    if m_locs != p_locs {
        return Err(Error::invalid("measured and predicted stats cover different locations"));
    }
    let lookup: std::collections::BTreeMap<&str, &SpreadReport> =
        predicted.iter().map(|(l, r)| (l.as_str(), r)).collect();
    let m: Vec<SpreadReport> = measured.iter().map(|x| x.1.clone()).collect();
    let p: Vec<SpreadReport> = measured.iter().map(|x| lookup[x.0.as_str()].clone()).collect();
    let rows = compare_statistics(&m, &p)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "statistic",
        "mean_measured",
        "mean_predicted",
        "delta_mean",
        "std_measured",
        "std_predicted",
        "delta_std",
    ])?;
    for r in &rows {
        w.write_record([
            r.statistic.to_string(),
            sig9(r.mean_measured),
            sig9(r.mean_predicted),
            sig9(r.mean_delta),
            opt(r.std_measured),
            opt(r.std_predicted),
            opt(r.std_delta),
        ])?;
    }
    write_atomic(&cfg.output_dir.join("compare.csv"), &finish(w)?)?;
    let pairs = |f: fn(&SpreadReport) -> f64| m.iter().zip(&p).map(|(a, b)| (f(a), f(b))).collect::<Vec<_>>();
    write_atomic(
        &cfg.output_dir.join("angular_spread.svg"),
        &scatter_svg(&pairs(|r| r.rms_angular_spread_deg), "RMS angular spread", "(deg)"),
    )?;
    write_atomic(
        &cfg.output_dir.join("delay_spread.svg"),
        &scatter_svg(&pairs(|r| r.rms_delay_spread_ns), "RMS delay spread", "(ns)"),
    )?;
    Ok(rows)
}
