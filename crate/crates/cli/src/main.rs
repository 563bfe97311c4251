//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 if a lab PASS criterion fails, 2 on errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use roughwave::dyadic::build_band_ops;
use roughwave::fbi::{fbi_forward, PhaseGrid, Window};
use roughwave::field::{make_metric_family, sobolev_data, Grid, Metric, MetricSpec};
use roughwave::hamflow::{deformation_derivative, trajectory, DeformationPath};
use roughwave::io::{
    field_csv, heatmap_csv, read_field, read_json, read_metric, trajectory_csv, write_csv_file, write_json, MetricJson,
    PhaseSpaceFieldJson, SampledFieldJson,
};
use roughwave::lab::{self, output, ExperimentConfig, PerturbationSweep};
use roughwave::parametrix::Parametrix;
use roughwave::solver::{solve, FdConfig, SolveConfig};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "roughwave", version, about = "Wave-packet solver for u_tt = a(x) u_xx with rough a")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve u_tt = a u_xx, u(0) = 0, u_t(0) = g and write u(t).
    Solve(SolveArgs),
    /// Stability experiments.
    #[command(subcommand)]
    Lab(LabCmd),
    /// |T_λ f| on a phase-space grid, as CSV rows x,xi,abs.
    Heatmap(HeatmapArgs),
    /// Bicharacteristic through (x0, xi0) for one band, as CSV rows t,x,xi.
    Trajectory(TrajectoryArgs),
    /// Per-band symbol diagnostics as JSON.
    Bands(BandsArgs),
    /// Per-band half- and full-wave residual ratios.
    Residuals(ResidualArgs),
    /// Derivative of the flow along the path between two metrics.
    Deformation(DeformationArgs),
    /// Write a generated metric or data field as JSON.
    #[command(subcommand)]
    Generate(GenerateCmd),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    metric: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long)]
    out: PathBuf,
    /// Solver settings (JSON); defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the solution as sampled-field JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the solve certificate as JSON.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LabCmd {
    Lipschitz(LabArgs),
    Uniform(LabArgs),
    Probes(LabArgs),
    Crosscheck(LabArgs),
}

#[derive(Args)]
struct LabArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    data: PathBuf,
    /// Packet scale λ = 2^k.
    #[arg(long)]
    k: u32,
    /// Frequency window |ξ| ∈ [lo, hi]; defaults to [λ/4, 2λ].
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the phase-space field as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long)]
    metric: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value = "plus")]
    sign: Sign,
    #[arg(long)]
    x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    xi0: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BandsArgs {
    #[arg(long)]
    metric: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ResidualArgs {
    #[arg(long)]
    metric: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Bands, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "5,6,7,8")]
    bands: Vec<u32>,
    #[arg(long, value_enum, default_value = "plus")]
    sign: Sign,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DeformationArgs {
    #[arg(long)]
    metric_a: PathBuf,
    #[arg(long)]
    metric_b: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value = "plus")]
    sign: Sign,
    #[arg(long)]
    x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    xi0: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Point on the path C_r = rA + (1-r)B.
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// A metric from a family spec, e.g. '{"kind":"rough_spline","params":{"amplitude":0.1,"knots":8}}'.
    Metric {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random-phase data with g ∈ H^s, cut off at max_freq.
    Data {
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        max_freq: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn csv_out(path: &Path) -> AnyResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run_solve(a: &SolveArgs) -> AnyResult<()> {
    let metric = read_metric(&a.metric)?;
    let g = read_field(&a.data)?;
    let cfg: SolveConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => SolveConfig::default(),
    };
    let sol = solve(&metric, &g, a.t, &cfg)?;
    field_csv(csv_out(&a.out)?, &sol.u)?;
    if let Some(p) = &a.json {
        write_json(p, &SampledFieldJson::from_field(&sol.u))?;
    }
    if let Some(p) = &a.certificate {
        write_json(p, &sol.certificate)?;
    }
    eprintln!(
        "t = {}: |K| = {:.3e}, Volterra diagonal factor {:.3e}, max |T g|/|g| = {:.3e}",
        a.t, sol.certificate.k_norm, sol.certificate.volterra.diag_factor, sol.certificate.residual_bound
    );
    Ok(())
}

fn verdict(name: &str, pass: bool, files: &[PathBuf]) -> bool {
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    println!("{} {name}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn run_lab(cmd: &LabCmd) -> AnyResult<bool> {
    let (args, name) = match cmd {
        LabCmd::Lipschitz(a) => (a, "lipschitz"),
        LabCmd::Uniform(a) => (a, "uniform"),
        LabCmd::Probes(a) => (a, "probes"),
        LabCmd::Crosscheck(a) => (a, "crosscheck"),
    };
    let cfg: ExperimentConfig = read_json(&args.config)?;
    std::fs::create_dir_all(&args.out)?;
    let dir = args.out.as_path();
    let sweep = cfg.sweep()?;
    Ok(match cmd {
        LabCmd::Lipschitz(_) => {
            let g = cfg.data(cfg.alpha + 1.0)?;
            let rep = lab::run_lipschitz_sweep(&sweep, &g, cfg.alpha, cfg.t, &cfg.solver)?;
            if let Some(f) = rep.fit {
                eprintln!("slope {:.4}, ratio drift {:.3}", f.slope, rep.ratio_drift);
            }
            verdict(name, rep.pass, &output::write_stability(dir, name, &rep)?)
        }
        LabCmd::Uniform(_) => {
            let g = cfg.data(cfg.alpha)?;
            let rep = lab::run_uniform_sweep(&sweep, &g, cfg.alpha, cfg.t, &cfg.solver)?;
            let interp = lab::interpolation_probe(&cfg.interpolation)?;
            for r in &interp.rows {
                eprintln!("kappa {}: exponent {:.4}", r.kappa, r.exponent);
            }
            verdict(name, rep.pass && interp.pass, &output::write_uniform(dir, name, &rep, &interp)?)
        }
        LabCmd::Probes(_) => {
            let rep = lab::operator_difference_probes(&sweep, &cfg.probe_config())?;
            for r in &rep.rows {
                eprintln!(
                    "{:<20} delta exponent {:.3}, lambda exponent {:.3} ({}{}) {}",
                    r.kind.name(),
                    r.delta_exponent,
                    r.lambda_exponent,
                    if r.bound == lab::ProbeBound::Upper { "<= " } else { "" },
                    r.lambda_power,
                    if r.pass { "ok" } else { "FAIL" }
                );
            }
            verdict(name, rep.pass, &output::write_probes(dir, name, &rep)?)
        }
        LabCmd::Crosscheck(_) => {
            let positive: Vec<f64> = cfg.deltas.iter().copied().filter(|d| *d > 0.0).collect();
            let sweep = PerturbationSweep::new(sweep.base.clone(), sweep.direction.clone(), &positive)?;
            let g = cfg.data(cfg.alpha + 1.0)?;
            let mut reps = Vec::new();
            for b in &sweep.metrics {
                let r = lab::energy_stability_crosscheck(
                    &sweep.base,
                    b,
                    &g,
                    cfg.alpha,
                    cfg.t,
                    &cfg.solver,
                    &FdConfig::default(),
                )?;
                eprintln!("distance {:.3e}: agreement {:.3e}", r.distance, r.agreement);
                reps.push(r);
            }
            let pass = reps.iter().all(|r| r.pass);
            verdict(name, pass, &output::write_crosscheck(dir, name, &reps)?)
        }
    })
}

fn run_heatmap(a: &HeatmapArgs) -> AnyResult<()> {
    let f = read_field(&a.data)?;
    let lambda = 2f64.powi(a.k as i32);
    let lo = a.lo.unwrap_or(lambda / 4.0);
    let hi = a.hi.unwrap_or(2.0 * lambda);
    let pg = PhaseGrid::resolved(lambda, f.grid().length, lo, hi)?;
    let tf = fbi_forward(&Window::new(lambda), &f, &pg)?;
    heatmap_csv(csv_out(&a.out)?, &tf)?;
    if let Some(p) = &a.json {
        write_json(p, &PhaseSpaceFieldJson::from_field(&tf))?;
    }
    Ok(())
}

fn run_trajectory(a: &TrajectoryArgs) -> AnyResult<()> {
    let m = read_metric(&a.metric)?;
    let ops = build_band_ops(&m, a.k)?;
    let states = trajectory(&ops, a.sign.value(), a.x0, a.xi0, a.t, a.samples)?;
    trajectory_csv(csv_out(&a.out)?, &states)?;
    Ok(())
}

fn run_bands(a: &BandsArgs) -> AnyResult<()> {
    let m = read_metric(&a.metric)?;
    let part = roughwave::dyadic::BandPartition::for_grid(m.grid());
    let diags = (1..=part.top).map(|k| Ok(build_band_ops(&m, k)?.diagnostics(&m))).collect::<AnyResult<Vec<_>>>()?;
    write_json(&a.out, &diags)?;
    Ok(())
}

fn run_residuals(a: &ResidualArgs) -> AnyResult<()> {
    let m = read_metric(&a.metric)?;
    let g = read_field(&a.data)?;
    let pmx = Parametrix::new(&m, &Default::default(), &[0.0, a.t.abs()])?;
    let table = pmx.residual_table(&g, &a.bands, a.sign.value(), a.t)?;
    write_csv_file(
        &a.out,
        &["k", "lambda", "input_norm", "halfwave_ratio", "fullwave_ratio"],
        table.rows.iter().map(|r| vec![r.k as f64, r.lambda, r.input_norm, r.halfwave_ratio, r.fullwave_ratio]),
    )?;
    if let Some(p) = &a.json {
        write_json(p, &table)?;
    }
    eprintln!("half-wave slope {:.3}, full-wave slope {:.3}", table.halfwave_slope, table.fullwave_slope);
    Ok(())
}

fn run_deformation(a: &DeformationArgs) -> AnyResult<()> {
    let path = DeformationPath::new(read_metric(&a.metric_a)?, read_metric(&a.metric_b)?)?;
    let rep = deformation_derivative(&path, a.k, a.sign.value(), a.x0, a.xi0, a.t, a.r)?;
    write_json(&a.out, &rep)?;
    Ok(())
}

fn run_generate(cmd: &GenerateCmd) -> AnyResult<()> {
    match cmd {
        GenerateCmd::Metric { spec, n, seed, out } => {
            let spec: MetricSpec = serde_json::from_str(spec)?;
            let m: Metric = make_metric_family(&spec, Grid::torus(*n)?, *seed)?;
            write_json(out, &MetricJson::from_metric(&m))?;
        }
        GenerateCmd::Data { n, s, eps, max_freq, seed, out } => {
            let g = sobolev_data(Grid::torus(*n)?, *s, *eps, *max_freq, *seed);
            write_json(out, &SampledFieldJson::from_field(&g))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res: AnyResult<bool> = match &cli.cmd {
        Cmd::Solve(a) => run_solve(a).map(|_| true),
        Cmd::Lab(c) => run_lab(c),
        Cmd::Heatmap(a) => run_heatmap(a).map(|_| true),
        Cmd::Trajectory(a) => run_trajectory(a).map(|_| true),
        Cmd::Bands(a) => run_bands(a).map(|_| true),
        Cmd::Residuals(a) => run_residuals(a).map(|_| true),
        Cmd::Deformation(a) => run_deformation(a).map(|_| true),
        Cmd::Generate(c) => run_generate(c).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
