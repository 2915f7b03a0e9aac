use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use errdist::montecarlo::{
    convergence_study, convergence_study_with_threads, remainder_table_csv, run_monte_carlo,
    run_monte_carlo_with_threads, MonteCarloReport, ScenarioConfig,
};
use errdist::{
    var_efficient_meanzero, var_empirical, var_smoothed, variance_gap, BandwidthSchedule, Dataset,
    EdfCurve, Kernel, LocalPolyConfig, LocalPolyFit, SmoothedEdf,
};

use crate::config::{join, parse_sizes, parse_t_grid, scenario_sections, Ini, SimulationConfig};
use crate::error::{CliError, CliResult};
use crate::{ConvergenceArgs, EstimateArgs, SimulateArgs, VarianceTableArgs};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const MIN_ESTIMATE_ROWS: usize = 10;
pub const DEFAULT_GRID_POINTS: usize = 512;

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    })
}

/// `[run]` section followed by the resolved parameters.
fn manifest(
    command: &str,
    config_path: Option<&Path>,
    master_seed: Option<u64>,
    artifacts: &[PathBuf],
    body: &str,
) -> String {
    let mut out = String::from("[run]\n");
    let _ = writeln!(out, "command = {command}");
    let _ = writeln!(out, "version = {}", env!("CARGO_PKG_VERSION"));
    if let Some(p) = config_path {
        let _ = writeln!(out, "config_path = {}", p.display());
    }
    if let Some(seed) = master_seed {
        let _ = writeln!(out, "master_seed = {seed}");
    }
    let names: Vec<String> = artifacts.iter().map(|p| p.display().to_string()).collect();
    let _ = writeln!(out, "artifacts = {}", names.join(","));
    out.push('\n');
    out.push_str(body);
    out
}

/// Reads a `z,y` CSV. Errors name the offending line.
pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let shown = path.display();
    let input_err = |msg: String| CliError::Input(format!("{shown}: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input_err(format!("cannot open: {e}")))?;
    let headers = reader.headers().map_err(|e| input_err(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "z" || &headers[1] != "y" {
        return Err(input_err(format!(
            "expected header `z,y`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut z, mut y) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| input_err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() > 2 {
            return Err(CliError::Input(format!("{shown}:{line}: too many fields")));
        }
        let field = |i: usize, name: &str| -> CliResult<f64> {
            let raw = record
                .get(i)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| CliError::Input(format!("{shown}:{line}: missing {name} field")))?;
            raw.parse::<f64>()
                .map_err(|_| CliError::Input(format!("{shown}:{line}: invalid {name} value `{raw}`")))
        };
        z.push(field(0, "z")?);
        y.push(field(1, "y")?);
    }
    if z.len() < MIN_ESTIMATE_ROWS {
        return Err(input_err(format!(
            "need at least {MIN_ESTIMATE_ROWS} observations, found {}",
            z.len()
        )));
    }
    Ok(Dataset::new(z, y)?)
}

#[derive(Debug, Clone, PartialEq)]
struct EstimateParams {
    input: PathBuf,
    order: usize,
    a_const: f64,
    c_const: f64,
    grid_points: usize,
    smoothing_kernel: Kernel,
    regression_kernel: Kernel,
}

impl EstimateParams {
    fn resolve(args: &EstimateArgs) -> CliResult<Self> {
        let mut p = Self {
            input: PathBuf::new(),
            order: 2,
            a_const: 1.0,
            c_const: 1.0,
            grid_points: DEFAULT_GRID_POINTS,
            smoothing_kernel: Kernel::triweight(),
            regression_kernel: Kernel::epanechnikov(),
        };
        let mut input = None;
        if let Some(path) = &args.config {
            let ini = Ini::read(path)?;
            ini.check_sections(&["estimate", "run"])?;
            for e in ini.section("estimate") {
                let bad = |msg: String| ini.error_at(e, format!("bad value for `{}`: {msg}", e.key));
                let v = e.value.as_str();
                match e.key.as_str() {
                    "input" => input = Some(PathBuf::from(v)),
                    "order" => p.order = v.parse().map_err(|x| bad(format!("{x}")))?,
                    "a_const" => p.a_const = v.parse().map_err(|x| bad(format!("{x}")))?,
                    "c_const" => p.c_const = v.parse().map_err(|x| bad(format!("{x}")))?,
                    "grid_points" => p.grid_points = v.parse().map_err(|x| bad(format!("{x}")))?,
                    "smoothing_kernel" => p.smoothing_kernel = v.parse().map_err(|x| bad(format!("{x}")))?,
                    "regression_kernel" => p.regression_kernel = v.parse().map_err(|x| bad(format!("{x}")))?,
                    k => return Err(ini.error_at(e, format!("unknown key `{k}` in [estimate]"))),
                }
            }
        }
        p.input = args
            .input
            .clone()
            .or(input)
            .ok_or_else(|| CliError::Input("no input CSV given".into()))?;
        p.order = args.order.unwrap_or(p.order);
        p.a_const = args.a_const.unwrap_or(p.a_const);
        p.c_const = args.c_const.unwrap_or(p.c_const);
        p.grid_points = args.grid_points.unwrap_or(p.grid_points);
        p.smoothing_kernel = args.smoothing_kernel.unwrap_or(p.smoothing_kernel);
        p.regression_kernel = args.regression_kernel.unwrap_or(p.regression_kernel);
        if p.grid_points < 2 {
            return Err(CliError::Input("--grid-points must be at least 2".into()));
        }
        Ok(p)
    }

    fn section(&self) -> String {
        format!(
            "[estimate]\ninput = {}\norder = {}\na_const = {}\nc_const = {}\ngrid_points = {}\n\
             smoothing_kernel = {}\nregression_kernel = {}\n",
            self.input.display(),
            self.order,
            self.a_const,
            self.c_const,
            self.grid_points,
            self.smoothing_kernel,
            self.regression_kernel
        )
    }
}

pub fn estimate(args: &EstimateArgs) -> CliResult<()> {
    let params = EstimateParams::resolve(args)?;
    let data = read_dataset(&params.input)?;
    let n = data.len();
    let bw = BandwidthSchedule::new(params.a_const, params.c_const)?.bandwidths(n)?;
    let smoother = LocalPolyConfig::new(params.order, bw.c_n).with_kernel(params.regression_kernel);
    let fit = LocalPolyFit::new(smoother, &data)?;
    if !fit.warnings().is_empty() {
        eprintln!(
            "warning: {} covariate value(s) lie outside [0, 1]",
            fit.warnings().len()
        );
    }
    let fitted = fit.fitted_values()?;
    let residuals: Vec<f64> = data.y().iter().zip(&fitted).map(|(y, r)| y - r).collect();

    let mut residual_csv = String::from("i,z,y,rhat,residual\n");
    for i in 0..n {
        let _ = writeln!(
            residual_csv,
            "{i},{},{},{},{}",
            data.z()[i],
            data.y()[i],
            fitted[i],
            residuals[i]
        );
    }

    let smoothed = SmoothedEdf::new(residuals.clone(), bw.a_n, params.smoothing_kernel)?;
    let edf = EdfCurve::new(residuals)?;
    let sorted = smoothed.residuals();
    let lo = sorted[0] - bw.a_n;
    let hi = sorted[sorted.len() - 1] + bw.a_n;
    let m = params.grid_points;
    let mut curve_csv = String::from("t,Fhat_star,f_star,residual_edf\n");
    for k in 0..m {
        let t = lo + (hi - lo) * k as f64 / (m - 1) as f64;
        let _ = writeln!(
            curve_csv,
            "{t},{},{},{}",
            smoothed.eval(t),
            smoothed.density(t),
            edf.eval(t)
        );
    }

    ensure_dir(&args.out_dir)?;
    let residual_path = args.out_dir.join("residuals.csv");
    let curve_path = args.out_dir.join("curve.csv");
    write_file(&residual_path, &residual_csv)?;
    write_file(&curve_path, &curve_csv)?;
    let artifacts = [residual_path, curve_path];
    let body = params.section();
    write_file(
        &args.out_dir.join(MANIFEST_FILE),
        &manifest("estimate", args.config.as_deref(), None, &artifacts, &body),
    )?;
    println!("n = {n}, a_n = {}, c_n = {}", bw.a_n, bw.c_n);
    for a in &artifacts {
        println!("wrote {}", a.display());
    }
    Ok(())
}

pub fn variance_table_csv(args: &VarianceTableArgs) -> CliResult<String> {
    let grid = parse_t_grid(&args.t_grid).map_err(|m| CliError::Input(format!("--t-grid: {m}")))?;
    let model = &args.error;
    let mut out = String::from("t,var_empirical,var_smoothed,var_efficient_meanzero,variance_gap\n");
    for t in grid {
        let _ = writeln!(
            out,
            "{t},{},{},{},{}",
            var_empirical(model, t),
            var_smoothed(model, t),
            var_efficient_meanzero(model, t),
            variance_gap(model, t)
        );
    }
    Ok(out)
}

pub fn variance_table(args: &VarianceTableArgs) -> CliResult<()> {
    let csv = variance_table_csv(args)?;
    match &args.output {
        Some(path) => write_file(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn monte_carlo(config: &ScenarioConfig, threads: Option<u64>) -> errdist::Result<MonteCarloReport> {
    match threads {
        Some(t) => run_monte_carlo_with_threads(config, t as usize),
        None => run_monte_carlo(config),
    }
}

fn warn_failures(n: usize, failures: usize, replications: usize) {
    if failures > 0 {
        eprintln!("warning: n = {n}: {failures} of {replications} replications failed and were excluded");
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let cfg = SimulationConfig::read(&args.config)?;
    if !cfg.has_n {
        return Err(CliError::Input(format!(
            "{}: missing required key `n` in [scenario]",
            args.config.display()
        )));
    }
    let sc = &cfg.scenario;
    let report = monte_carlo(sc, args.threads.threads)?;
    warn_failures(sc.n, report.failures, report.replications);
    if report.insufficient_replications {
        eprintln!("warning: fewer than two successful replications; variances are undefined");
    }

    ensure_dir(&args.out_dir)?;
    let report_path = args.out_dir.join("report.csv");
    let remainder_path = args.out_dir.join("remainders.csv");
    write_file(&report_path, &report.to_csv())?;
    write_file(&remainder_path, &report.remainder_csv())?;
    let artifacts = [report_path, remainder_path];
    let body = scenario_sections(sc, true, cfg.sizes.as_deref());
    write_file(
        &args.out_dir.join(MANIFEST_FILE),
        &manifest("simulate", Some(&args.config), Some(sc.seed), &artifacts, &body),
    )?;
    println!(
        "n = {}, replications = {}, failures = {}, median remainder = {}",
        report.n, report.replications, report.failures, report.remainder.median
    );
    for a in &artifacts {
        println!("wrote {}", a.display());
    }
    Ok(())
}

/// Sorts the sizes, warning when they were out of order. Duplicates and
/// fewer than two sizes are errors.
pub fn normalize_sizes(mut sizes: Vec<usize>) -> CliResult<Vec<usize>> {
    if sizes.len() < 2 {
        return Err(CliError::Input(
            "a convergence study needs at least two sample sizes".into(),
        ));
    }
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        eprintln!("warning: sample sizes were not ascending; sorting them");
        sizes.sort_unstable();
    }
    if sizes.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Input(format!("duplicate sample sizes in {}", join(&sizes))));
    }
    Ok(sizes)
}

pub fn convergence(args: &ConvergenceArgs) -> CliResult<()> {
    let mut cfg = SimulationConfig::read(&args.config)?;
    let sizes = match (&args.sizes, &cfg.sizes) {
        (Some(s), _) => parse_sizes(s).map_err(|m| CliError::Input(format!("--sizes: {m}")))?,
        (None, Some(s)) => s.clone(),
        (None, None) => {
            return Err(CliError::Input(
                "no sample sizes: pass --sizes or set `sizes` in [grids]".into(),
            ))
        }
    };
    let sizes = normalize_sizes(sizes)?;
    if !cfg.has_n {
        cfg.scenario.n = sizes[0];
    }
    let sc = &cfg.scenario;
    let rows = match args.threads.threads {
        Some(t) => convergence_study_with_threads(sc, &sizes, t as usize)?,
        None => convergence_study(sc, &sizes)?,
    };
    for r in &rows {
        warn_failures(r.n, r.failures, sc.replications);
    }

    ensure_dir(&args.out_dir)?;
    let table_path = args.out_dir.join("convergence.csv");
    write_file(&table_path, &remainder_table_csv(&rows))?;
    let artifacts = [table_path];
    let body = scenario_sections(sc, cfg.has_n, Some(&sizes));
    write_file(
        &args.out_dir.join(MANIFEST_FILE),
        &manifest("convergence", Some(&args.config), Some(sc.seed), &artifacts, &body),
    )?;
    for r in &rows {
        println!(
            "n = {}: median remainder = {}, q90 = {}",
            r.n, r.median_remainder, r.q90_remainder
        );
    }
    println!("wrote {}", artifacts[0].display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_are_sorted_and_checked() {
        assert_eq!(normalize_sizes(vec![800, 200, 3200]).unwrap(), vec![200, 800, 3200]);
        assert!(normalize_sizes(vec![200]).is_err());
        assert!(normalize_sizes(vec![200, 800, 200]).is_err());
    }

    #[test]
    fn manifest_layout() {
        let m = manifest("simulate", Some(Path::new("c.ini")), Some(7), &[PathBuf::from("a.csv")], "[scenario]\n");
        assert!(m.starts_with("[run]\ncommand = simulate\n"));
        assert!(m.contains("master_seed = 7\n"));
        assert!(m.contains("artifacts = a.csv\n"));
        assert!(m.ends_with("\n[scenario]\n"));
    }

    #[test]
    fn exit_codes() {
        use errdist::Error as E;
        let code = |e: E| CliError::from(e).exit_code();
        assert_eq!(code(E::SingularDesign { x: 0.5, index: Some(3) }), 3);
        assert_eq!(code(E::AllReplicationsFailed { replications: 4 }), 4);
        assert_eq!(code(E::InvalidConfig("x".into())), 2);
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
    }
}
