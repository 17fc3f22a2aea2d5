use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cpsim::harness::{
    parse_id_list, run_scenario_with_report, run_suite, scenario_from_catalog, RunLog, ScenarioConfig,
};
use cpsim::metrics::{
    analyze, build_comparison, AnalysisParams, ComparisonTable, ReDenominator, SdMode, StabilityReport,
};
use cpsim::perception::CameraModel;
use cpsim::stimulation::{alignment_error, keystone_homography, virtual_camera_config, ProjectionGeometry};
use cpsim::Domain;
use cpsim_bridge::{Pacing, ServeOptions, Server};
use serde_json::json;

#[derive(Parser)]
#[command(name = "sim", version, about = "Cyber-physical VRU test bench simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its log.
    Run {
        /// Catalog id (1-12) or path to a scenario JSON file.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write the stability report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Run catalog scenarios, writing logs, reports and RW/CP comparisons.
    Suite {
        /// Ids such as `1-12` or `1,4,7-9`.
        #[arg(long, default_value = "1-12")]
        ids: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Analyze one log, or an RW/CP pair of logs, and print JSON.
    Analyze {
        #[arg(required = true, num_args = 1..=2)]
        logs: Vec<PathBuf>,
        /// Write `<stem>.report.json` per log and, for a pair,
        /// `comparison.csv` and `comparison.txt`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Virtual camera and keystone settings for a projection geometry.
    Calibrate {
        geometry: PathBuf,
        /// Check measured pixel heights of the same figure: RW then CP.
        #[arg(long, num_args = 2, value_names = ["RW", "CP"])]
        check: Option<Vec<f64>>,
        /// Allowed |alignment error| in percent for --check.
        #[arg(long, default_value_t = 1.5)]
        tolerance: f64,
    },
    /// Serve a live teleop session over TCP (WebSocket or NDJSON).
    Serve {
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Catalog id or scenario JSON file for the initial session.
        #[arg(long, default_value = "1")]
        scenario: String,
        /// Log of the first session; later sessions get a numeric suffix.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run as fast as possible instead of at the frame rate.
        #[arg(long)]
        unpaced: bool,
        /// Stop after this many ticks.
        #[arg(long)]
        ticks: Option<u64>,
    },
    /// Print the comparison table of an RW/CP pair of logs.
    Report {
        #[arg(long, num_args = 2, value_names = ["RW", "CP"], required = true)]
        pair: Vec<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Denominator {
    Rw,
    Cp,
}

#[derive(Clone, Copy, ValueEnum)]
enum SdModeArg {
    Raw,
    Residual,
}

#[derive(Args, Clone)]
struct AnalysisArgs {
    /// Distance bin width, m.
    #[arg(long, default_value_t = 1.0)]
    bin_width: f64,
    /// Moving-mean window, samples (odd).
    #[arg(long, default_value_t = 11)]
    window: usize,
    /// Smoothing spline penalty.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "residual")]
    sd_mode: SdModeArg,
    /// Relative error denominator.
    #[arg(long, value_enum, default_value = "rw")]
    re_denominator: Denominator,
    /// Compare all joints, not just the six tracked ones.
    #[arg(long)]
    all_joints: bool,
}

impl AnalysisArgs {
    fn params(&self) -> Result<AnalysisParams<f64>> {
        let p = AnalysisParams {
            bin_width: self.bin_width,
            window: self.window,
            lambda: self.lambda,
            sd_mode: match self.sd_mode {
                SdModeArg::Raw => SdMode::Raw,
                SdModeArg::Residual => SdMode::Residual,
            },
            ..AnalysisParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    fn denominator(&self) -> ReDenominator {
        match self.re_denominator {
            Denominator::Rw => ReDenominator::Rw,
            Denominator::Cp => ReDenominator::Cp,
        }
    }
}

fn load_scenario(spec: &str) -> Result<ScenarioConfig<f64>> {
    if let Ok(id) = spec.parse::<u32>() {
        return Ok(scenario_from_catalog(id)?);
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading scenario {spec}"))?;
    ScenarioConfig::from_json_str(&text).with_context(|| format!("scenario {spec}"))
}

fn read_log(path: &Path) -> Result<RunLog<f64>> {
    RunLog::read_file(path).with_context(|| format!("reading log {}", path.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Orders a pair of logs as (RW, CP).
fn rw_cp<'a>(a: &'a RunLog<f64>, b: &'a RunLog<f64>) -> Result<(&'a RunLog<f64>, &'a RunLog<f64>)> {
    match (a.meta.domain, b.meta.domain) {
        (Domain::Rw, Domain::Cp) => Ok((a, b)),
        (Domain::Cp, Domain::Rw) => Ok((b, a)),
        (d, _) => bail!("a pair needs one RW and one CP log, both are {d}"),
    }
}

fn compare(rw: &StabilityReport<f64>, cp: &StabilityReport<f64>, args: &AnalysisArgs) -> Result<ComparisonTable<f64>> {
    Ok(build_comparison(rw, cp, args.denominator(), args.all_joints)?)
}

fn summary_line(r: &StabilityReport<f64>) -> String {
    let id = r.meta.test_case_id.map_or("-".to_string(), |i| i.to_string());
    let b20 = r.bin_at(20.5).map_or("-".to_string(), |b| format!("{:.3}", b.max));
    format!(
        "{id:>3} {:<10} {:<2} {:<1} frames {:>4}  no-detects {:>3}  false-detects {:>3}  20m-max {b20}",
        r.meta.vru.to_string(),
        r.meta.domain.to_string(),
        r.meta.perspective.to_string(),
        r.frames,
        r.no_detects,
        r.false_detects
    )
}

fn cmd_run(scenario: &str, out: &Path, report: Option<&Path>, analysis: &AnalysisArgs) -> Result<()> {
    let cfg = load_scenario(scenario)?;
    let run = run_scenario_with_report(&cfg, &analysis.params()?)?;
    run.log.write_file(out).with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = report {
        write(path, to_json(&run.online_report)?)?;
    }
    println!("{}", summary_line(&run.online_report));
    Ok(())
}

fn cmd_suite(ids: &str, out_dir: &Path, analysis: &AnalysisArgs) -> Result<()> {
    let ids = parse_id_list(ids)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let suite = run_suite(&ids, &analysis.params()?, analysis.denominator(), analysis.all_joints)?;
    for (id, run) in &suite.runs {
        run.log.write_file(&out_dir.join(format!("run_{id:02}.jsonl")))?;
        write(&out_dir.join(format!("report_{id:02}.json")), to_json(&run.online_report)?)?;
        println!("{}", summary_line(&run.online_report));
    }
    for pair in &suite.pairs {
        let stem = format!("comparison_{:02}_{:02}", pair.rw_id, pair.cp_id);
        write(&out_dir.join(format!("{stem}.csv")), pair.table.to_csv())?;
        write(&out_dir.join(format!("{stem}.txt")), pair.table.to_text())?;
    }
    log::info!("wrote {} runs and {} comparisons to {}", suite.runs.len(), suite.pairs.len(), out_dir.display());
    Ok(())
}

fn cmd_analyze(paths: &[PathBuf], out_dir: Option<&Path>, analysis: &AnalysisArgs) -> Result<()> {
    let params = analysis.params()?;
    let logs = paths.iter().map(|p| read_log(p)).collect::<Result<Vec<_>>>()?;
    let reports = logs.iter().map(|l| analyze(l, &params)).collect::<cpsim::Result<Vec<_>>>()?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (path, report) in paths.iter().zip(&reports) {
            let stem = path.file_stem().map_or("run".into(), |s| s.to_string_lossy());
            write(&dir.join(format!("{stem}.report.json")), to_json(report)?)?;
        }
    }
    let output = match logs.as_slice() {
        [_] => to_json(&reports[0])?,
        [a, b] => {
            let (rw, _) = rw_cp(a, b)?;
            let (rw_r, cp_r) =
                if std::ptr::eq(rw, a) { (&reports[0], &reports[1]) } else { (&reports[1], &reports[0]) };
            let table = compare(rw_r, cp_r, analysis)?;
            if let Some(dir) = out_dir {
                write(&dir.join("comparison.csv"), table.to_csv())?;
                write(&dir.join("comparison.txt"), table.to_text())?;
            }
            to_json(&json!({ "rw": rw_r, "cp": cp_r, "comparison": table }))?
        }
        _ => unreachable!("clap limits the log count"),
    };
    print!("{output}");
    Ok(())
}

fn cmd_calibrate(path: &Path, check: Option<&[f64]>, tolerance: f64) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let g: ProjectionGeometry<f64> =
        serde_json::from_str(&text).with_context(|| format!("geometry {}", path.display()))?;
    let mut phys = CameraModel::<f64>::default();
    phys.mount.pitch = g.camera_pitch;
    phys.mount.z = g.h_cam;
    let vc = virtual_camera_config(&g, &phys)?;
    for w in &vc.warnings {
        log::warn!("{w}");
    }
    let keystone = keystone_homography(g.projector.pitch, 0.0, &g)?;
    let mut out = json!({
        "hfov_deg": vc.hfov.to_degrees(),
        "vfov_deg": vc.vfov.to_degrees(),
        "render_width": vc.render_width,
        "render_height": vc.render_height,
        "horizon_height": vc.horizon_height,
        "keystone": keystone,
        "warnings": vc.warnings,
    });
    let mut failed = None;
    if let Some(&[rw, cp]) = check {
        let err = alignment_error(rw, cp)?;
        out["alignment_error_pct"] = json!(err);
        if err.abs() > tolerance {
            failed = Some(err);
        }
    }
    print!("{}", to_json(&out)?);
    if let Some(err) = failed {
        bail!("alignment error {err:.2}% exceeds {tolerance}%");
    }
    Ok(())
}

fn cmd_serve(
    host: &str,
    port: u16,
    scenario: &str,
    out: Option<PathBuf>,
    unpaced: bool,
    ticks: Option<u64>,
) -> Result<()> {
    let cfg = load_scenario(scenario)?;
    let mut opts = ServeOptions::live(&cfg);
    if unpaced {
        opts.pacing = Pacing::Unpaced;
    }
    opts.log_path = out;
    opts.max_ticks = ticks;
    let server = Server::bind((host, port), cfg, opts).with_context(|| format!("binding {host}:{port}"))?;
    let handle = server.spawn()?;
    println!("listening on {}", handle.local_addr());
    let logs = handle.join()?;
    let frames: usize = logs.iter().map(|l| l.frames.len()).sum();
    println!("served {} session(s), {frames} ticks", logs.len());
    Ok(())
}

fn cmd_report(pair: &[PathBuf], csv: Option<&Path>, analysis: &AnalysisArgs) -> Result<()> {
    ensure!(pair.len() == 2, "--pair takes an RW and a CP log");
    let params = analysis.params()?;
    let (a, b) = (read_log(&pair[0])?, read_log(&pair[1])?);
    let (rw, cp) = rw_cp(&a, &b)?;
    let table = compare(&analyze(rw, &params)?, &analyze(cp, &params)?, analysis)?;
    if let Some(path) = csv {
        write(path, table.to_csv())?;
    }
    print!("{}", table.to_text());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, out, report, analysis } => cmd_run(&scenario, &out, report.as_deref(), &analysis),
        Command::Suite { ids, out_dir, analysis } => cmd_suite(&ids, &out_dir, &analysis),
        Command::Analyze { logs, out_dir, analysis } => cmd_analyze(&logs, out_dir.as_deref(), &analysis),
        Command::Calibrate { geometry, check, tolerance } => cmd_calibrate(&geometry, check.as_deref(), tolerance),
        Command::Serve { port, host, scenario, out, unpaced, ticks } => {
            cmd_serve(&host, port, &scenario, out, unpaced, ticks)
        }
        Command::Report { pair, csv, analysis } => cmd_report(&pair, csv.as_deref(), &analysis),
    }
}

fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
