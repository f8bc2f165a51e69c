use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cyclewalk::complex::sample_annulus;
use cyclewalk::heat::{HeatFlow, HeatMethod};
use cyclewalk::holes::{localize, AnnealSchedule};
use cyclewalk::io;
use cyclewalk::spectral::{
    betti_exact, betti_numbers, laplacian, spectrum, EigenRequest, LaplacianKind,
};
use cyclewalk::torus::{basis_cycles, run_scaling_experiment, OneForm, ScalingConfig};
use cyclewalk::walk::Record;
use cyclewalk::{
    build_cech, build_rips, build_torus_triangulation, simulate, IntChain, Metric, RealChain,
    SimplicialComplex, WalkConfig,
};

/// Malformed or unreadable input; reported with exit code 3.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(path: &Path, e: impl std::fmt::Display) -> anyhow::Error {
    InputError(format!("{}: {e}", path.display())).into()
}

#[derive(Parser)]
#[command(
    name = "cyclewalk",
    version,
    about = "Random walks on simplicial chains"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write logs to this file instead of stderr.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
    /// Log filter such as `info` or `cyclewalk=debug`.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Random seed; falls back to CYCLEWALK_SEED, then 0.
    #[arg(long, env = "CYCLEWALK_SEED")]
    seed: Option<u64>,
}

impl SeedArg {
    fn get(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Args)]
struct PointsArgs {
    /// Point cloud CSV, one point per row.
    #[arg(long, conflicts_with = "annulus")]
    points: Option<PathBuf>,
    /// Sample COUNT points uniformly from the annulus 1 ≤ |x| ≤ 2 instead.
    #[arg(long, value_name = "COUNT")]
    annulus: Option<usize>,
    /// Treat coordinates as points on the flat torus [0,2)×[0,√3).
    #[arg(long)]
    torus: bool,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Full,
    Up,
    Down,
}

impl From<Kind> for LaplacianKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Full => LaplacianKind::Full,
            Kind::Up => LaplacianKind::Up,
            Kind::Down => LaplacianKind::Down,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Eigen,
    Rk4,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordArg {
    Full,
    Summary,
}

#[derive(Subcommand)]
enum Command {
    /// Vietoris–Rips complex of a point cloud.
    BuildRips(PointsArgs),
    /// Čech complex of a planar or spatial point cloud.
    BuildCech(PointsArgs),
    /// Regular triangulation of the flat torus with side n.
    BuildTorus {
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the basis cycles as DIR/sigma1.json and DIR/sigma2.json.
        #[arg(long, value_name = "DIR")]
        basis: Option<PathBuf>,
    },
    /// Betti numbers from the exact integer ranks.
    Betti {
        complex: PathBuf,
        /// Print only β_dim.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Eigenvalues of a combinatorial Laplacian.
    Spectrum {
        complex: PathBuf,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_enum, default_value = "full")]
        kind: Kind,
        /// Also export the operator in coordinate text format.
        #[arg(long, value_name = "FILE")]
        coo: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate the chain-valued walk.
    Walk {
        complex: PathBuf,
        /// Initial integer chain (JSON).
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        max_jumps: Option<u64>,
        #[arg(long, value_enum, default_value = "full")]
        record: RecordArg,
        #[command(flatten)]
        seed: SeedArg,
        /// Event log (full) or summary (summary); stdout by default.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Summary JSON with the occupation measure.
        #[arg(long, value_name = "FILE")]
        summary: Option<PathBuf>,
    },
    /// Heat flow dω/dt = -L ω.
    Heat {
        complex: PathBuf,
        /// Initial chain (JSON, integer or real coefficients).
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        time: f64,
        /// Number of output steps in (0, time].
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum, default_value = "full")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        /// Final state as chain JSON; stdout by default.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Per-step CSV with columns t,norm,energy,residual.
        #[arg(long, value_name = "FILE")]
        norms: Option<PathBuf>,
    },
    /// Torus scaling diagnostics.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "4,8")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        horizon: f64,
        /// Test forms as builtin:<name>.
        #[arg(long, value_delimiter = ',', default_value = "builtin:cos_x2")]
        forms: Vec<String>,
        #[arg(long, default_value_t = 4)]
        trajectories: u64,
        #[arg(long, default_value_t = 10)]
        snapshots: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Flat CSV of the flat-norm traces.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Localize holes by simulated annealing.
    FindHoles {
        complex: PathBuf,
        /// Initial temperature; default is the energy of the seed cycle.
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long, default_value_t = 0.999)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        tmin: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Keep edges with |weight| ≥ cutoff · max |weight|.
        #[arg(long, default_value_t = 0.5)]
        cutoff: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Directory for the per-hole energy trace CSVs.
        #[arg(long, value_name = "DIR", default_value = ".")]
        trace_dir: PathBuf,
    },
    /// Check that a complex file is well formed and closed under faces.
    Validate { complex: PathBuf },
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| input_err(path, e))
}

fn read_complex(path: &Path) -> anyhow::Result<SimplicialComplex> {
    io::complex_from_json(&read_text(path)?).map_err(|e| input_err(path, e))
}

fn read_int_chain(path: &Path, complex: &SimplicialComplex) -> anyhow::Result<IntChain> {
    let c = io::int_chain_from_json(&read_text(path)?).map_err(|e| input_err(path, e))?;
    c.check_in(complex).map_err(|e| input_err(path, e))?;
    Ok(c)
}

fn read_real_chain(path: &Path, complex: &SimplicialComplex) -> anyhow::Result<RealChain> {
    let c = io::real_chain_from_json(&read_text(path)?).map_err(|e| input_err(path, e))?;
    c.check_in(complex).map_err(|e| input_err(path, e))?;
    Ok(c)
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_csv<S: Serialize>(path: &Path, rows: &[S]) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn build_points(args: &PointsArgs, cech: bool) -> anyhow::Result<String> {
    let metric = if args.torus {
        Metric::FlatTorus {
            periods: [2.0, 3f64.sqrt()],
        }
    } else {
        Metric::Euclidean
    };
    let cloud = match (&args.points, args.annulus) {
        (Some(p), _) => {
            io::point_cloud_from_csv(&read_text(p)?, metric).map_err(|e| input_err(p, e))?
        }
        (None, Some(count)) if !args.torus => sample_annulus(count, 1.0, 2.0, args.seed.get())?,
        (None, Some(_)) => bail!("--annulus samples a planar cloud; drop --torus"),
        (None, None) => bail!("one of --points or --annulus is required"),
    };
    let complex = if cech {
        build_cech(&cloud, args.radius, args.max_dim)?
    } else {
        build_rips(&cloud, args.radius, args.max_dim)?
    };
    log::info!("built complex with counts {:?}", complex.counts());
    Ok(io::complex_to_json(&complex))
}

#[derive(Serialize)]
struct BettiReport {
    format_version: u32,
    betti: Vec<usize>,
}

#[derive(Serialize)]
struct NormRow {
    t: f64,
    norm: f64,
    energy: f64,
    residual: f64,
}

#[derive(Serialize)]
struct FlatRow {
    n: usize,
    trajectory: usize,
    snapshot: usize,
    t: f64,
    flat_norm: f64,
}

#[derive(Serialize)]
struct TraceRow {
    step: u64,
    temperature: f64,
    energy: i64,
}

#[derive(Serialize)]
struct HoleOut {
    generator: usize,
    seed_energy: i64,
    final_energy: i64,
    accepted: u64,
    rejected: u64,
    stalls: u64,
    edges: Vec<(usize, i64)>,
    energy_trace_csv_path: String,
}

#[derive(Serialize)]
struct HolesOut {
    format_version: u32,
    betti_1: usize,
    holes: Vec<HoleOut>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::BuildRips(args) => emit(args.output.as_deref(), &build_points(&args, false)?),
        Command::BuildCech(args) => emit(args.output.as_deref(), &build_points(&args, true)?),
        Command::BuildTorus { n, output, basis } => {
            let c = build_torus_triangulation(n)?;
            if let Some(dir) = basis {
                fs::create_dir_all(&dir)?;
                let (s1, s2) = basis_cycles(&c)?;
                fs::write(dir.join("sigma1.json"), io::chain_to_json(&s1))?;
                fs::write(dir.join("sigma2.json"), io::chain_to_json(&s2))?;
            }
            emit(output.as_deref(), &io::complex_to_json(&c))
        }
        Command::Betti { complex, dim } => {
            let c = read_complex(&complex)?;
            match dim {
                Some(k) => emit(None, &format!("{}\n", betti_exact(&c, k))),
                None => emit(
                    None,
                    &io::report_json(&BettiReport {
                        format_version: io::FORMAT_VERSION,
                        betti: betti_numbers(&c),
                    }),
                ),
            }
        }
        Command::Spectrum {
            complex,
            dim,
            kind,
            coo,
            output,
        } => {
            let c = read_complex(&complex)?;
            if dim > c.top_dim() {
                bail!("complex has no {dim}-simplices");
            }
            let op = laplacian(&c, dim, kind.into());
            if let Some(p) = coo {
                fs::write(&p, op.to_coo_text())?;
            }
            let values = spectrum(&op.to_f64(), EigenRequest::All)?;
            let scale = values.last().copied().unwrap_or(0.0).abs().max(1.0);
            let nullity = values.iter().filter(|v| v.abs() <= 1e-9 * scale).count();
            let kind_name = match kind {
                Kind::Full => "full",
                Kind::Up => "up",
                Kind::Down => "down",
            };
            let report = io::SpectrumReport::new(dim, kind_name, betti_exact(&c, dim), values);
            if matches!(kind, Kind::Full) && nullity != report.betti {
                log::warn!(
                    "spectral nullity {nullity} differs from exact β_{dim} = {}",
                    report.betti
                );
            }
            emit(output.as_deref(), &report.to_json())
        }
        Command::Walk {
            complex,
            start,
            time,
            max_jumps,
            record,
            seed,
            output,
            summary,
        } => {
            let c = read_complex(&complex)?;
            let x0 = read_int_chain(&start, &c)?;
            let mut cfg = WalkConfig::new(seed.get(), time).with_record(match record {
                RecordArg::Full => Record::Full,
                RecordArg::Summary => Record::Summary,
            });
            if let Some(m) = max_jumps {
                cfg = cfg.with_max_jumps(m);
            }
            let traj = simulate(&c, &x0, &cfg)?;
            log::info!("{} jumps, stop {:?}", traj.jumps, traj.stop);
            let summary_text = io::trajectory_summary_json(&traj);
            if let Some(p) = summary {
                fs::write(&p, &summary_text)?;
            }
            match record {
                RecordArg::Full => emit(output.as_deref(), &io::trajectory_ndjson(&traj)),
                RecordArg::Summary => emit(output.as_deref(), &summary_text),
            }
        }
        Command::Heat {
            complex,
            start,
            time,
            steps,
            kind,
            method,
            output,
            norms,
        } => {
            let c = read_complex(&complex)?;
            let w0 = read_real_chain(&start, &c)?;
            if w0.dim() > c.top_dim() {
                bail!("complex has no {}-simplices", w0.dim());
            }
            let mut flow = HeatFlow::new(&c, w0.dim(), kind.into())?;
            let method = match method {
                Method::Auto => HeatMethod::Auto,
                Method::Eigen => HeatMethod::Eigen,
                Method::Rk4 => HeatMethod::Rk4,
            };
            let steps = steps.max(1);
            let times: Vec<f64> = (0..=steps)
                .map(|j| time * j as f64 / steps as f64)
                .collect();
            let states = flow.evolve_many(&w0, &times, method)?;
            if let Some(p) = norms {
                let rows = states
                    .iter()
                    .map(|s| {
                        Ok(NormRow {
                            t: s.t,
                            norm: s.omega.norm(),
                            energy: flow.energy(&s.omega)?,
                            residual: flow.residual(&s.omega)?,
                        })
                    })
                    .collect::<cyclewalk::Result<Vec<_>>>()?;
                write_csv(&p, &rows)?;
            }
            let last = states.last().ok_or_else(|| anyhow!("no heat states"))?;
            emit(output.as_deref(), &io::chain_to_json(&last.omega))
        }
        Command::Scaling {
            n_list,
            horizon,
            forms,
            trajectories,
            snapshots,
            seed,
            output,
            csv,
        } => {
            let forms = forms
                .iter()
                .map(|f| {
                    let name = f
                        .strip_prefix("builtin:")
                        .ok_or_else(|| anyhow!("form {f:?} must be written builtin:<name>"))?;
                    Ok(OneForm::builtin(name)?)
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let cfg = ScalingConfig {
                ns: n_list,
                forms,
                horizon,
                trajectories,
                snapshots,
                seed: seed.get(),
            };
            let report = run_scaling_experiment(&cfg)?;
            if let Some(p) = csv {
                let mut rows = Vec::new();
                for r in &report.rows {
                    for (i, trace) in r.flat_traces.iter().enumerate() {
                        for (j, v) in trace.iter().enumerate() {
                            rows.push(FlatRow {
                                n: r.n,
                                trajectory: i,
                                snapshot: j,
                                t: cfg.horizon * j as f64 / cfg.snapshots.max(1) as f64,
                                flat_norm: *v,
                            });
                        }
                    }
                }
                write_csv(&p, &rows)?;
            }
            emit(output.as_deref(), &io::report_json(&report))
        }
        Command::FindHoles {
            complex,
            t0,
            alpha,
            tmin,
            max_steps,
            cutoff,
            seed,
            output,
            trace_dir,
        } => {
            let c = read_complex(&complex)?;
            let schedule = AnnealSchedule {
                t0,
                alpha,
                t_min: tmin,
                max_steps,
            };
            let reports = localize(&c, &schedule, cutoff, seed.get())?;
            fs::create_dir_all(&trace_dir)?;
            let mut holes = Vec::new();
            for r in &reports {
                let path = trace_dir.join(format!("hole_{}_energy.csv", r.generator));
                let rows: Vec<TraceRow> = r
                    .anneal
                    .energy_trace
                    .iter()
                    .enumerate()
                    .map(|(m, &e)| TraceRow {
                        step: m as u64,
                        temperature: AnnealSchedule::temperature(r.anneal.t0, alpha, m as u64),
                        energy: e,
                    })
                    .collect();
                write_csv(&path, &rows)?;
                holes.push(HoleOut {
                    generator: r.generator,
                    seed_energy: r.anneal.energy_trace[0],
                    final_energy: r.anneal.final_energy,
                    accepted: r.anneal.accepted,
                    rejected: r.anneal.rejected,
                    stalls: r.anneal.stalls,
                    edges: r.edges.clone(),
                    energy_trace_csv_path: path.display().to_string(),
                });
            }
            for h in &holes {
                log::info!(
                    "hole {}: energy {} -> {}",
                    h.generator,
                    h.seed_energy,
                    h.final_energy
                );
            }
            let out = HolesOut {
                format_version: io::FORMAT_VERSION,
                betti_1: reports.len(),
                holes,
            };
            emit(output.as_deref(), &io::report_json(&out))
        }
        Command::Validate { complex } => {
            let text = read_text(&complex)?;
            let violations =
                io::validate_complex_json(&text).map_err(|e| input_err(&complex, e))?;
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("{}", serde_json::to_string(v)?);
                }
                return Err(input_err(
                    &complex,
                    format!("{} closure violation(s)", violations.len()),
                ));
            }
            let c = io::complex_from_json(&text).map_err(|e| input_err(&complex, e))?;
            emit(None, &format!("ok {:?}\n", c.counts()))
        }
    }
}

fn init_logging(cli: &Cli) -> anyhow::Result<()> {
    let mut b = env_logger::Builder::new();
    b.parse_filters(&cli.log_level);
    if let Some(p) = &cli.log {
        let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        b.target(env_logger::Target::Pipe(Box::new(f)));
    } else {
        b.target(env_logger::Target::Stderr);
    }
    b.try_init()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_logging(&cli) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
