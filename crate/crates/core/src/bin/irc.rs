use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use irc_core::det_class::{self, DetError, DetInput};
use irc_core::dm_region::{theorem1_region, RegionError};
use irc_core::gauss::{self, CSwap, GaussConfig, HkParams};
use irc_core::io::{self, InputError};
use irc_core::search::{det_grid_search, SearchError};
use irc_core::sweep::{self, SweepSpec};
use irc_core::verify::{self, Suite};
use irc_core::{Polygon2D, RateInequality, RateRegion2D};

#[derive(Parser)]
#[command(name = "irc", version, about = "Rate regions for interference relay channels")]
struct Cli {
    /// Worker threads for grid evaluations (default: all cores).
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the achievable region for a channel file and an input file.
    DmEval { channel: PathBuf, input: PathBuf },
    /// Capacity region of an injective deterministic channel.
    DetCapacity {
        spec: PathBuf,
        /// Input distribution file; uniform inputs when omitted.
        input: Option<PathBuf>,
        /// Search product inputs and report the hull of their regions.
        #[arg(long, value_enum)]
        search: Option<SearchMode>,
        #[arg(long, default_value_t = 0.1)]
        grid_step: f64,
        /// Write the hull vertices as CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum-rate sweep of the Gaussian channel; the reference comparison by default.
    GaussSweep {
        sweep: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CSwap::Pattern)]
        c_swap: CSwap,
    },
    /// Print every bound of the Gaussian region at one parameter point.
    GaussRegion {
        /// Channel gains, power and link rate as JSON; the reference gains otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        power: f64,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long)]
        alpha1: f64,
        #[arg(long)]
        alpha2: f64,
        #[arg(long, default_value_t = 5.0)]
        sigma2: f64,
        #[arg(long, value_enum, default_value_t = CSwap::Pattern)]
        c_swap: CSwap,
        /// Write the frontier vertices as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run self-check suites against independent reference computations.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    Grid,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn schema(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Self {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result = match cli.command {
        Command::DmEval { channel, input } => dm_eval(&channel, &input),
        Command::DetCapacity {
            spec,
            input,
            search,
            grid_step,
            out,
        } => det_capacity(&spec, input.as_deref(), search.is_some(), grid_step, out.as_deref()),
        Command::GaussSweep { sweep, out, c_swap } => gauss_sweep(sweep.as_deref(), out.as_deref(), c_swap),
        Command::GaussRegion {
            config,
            power,
            r0,
            alpha1,
            alpha2,
            sigma2,
            c_swap,
            out,
        } => gauss_region(
            config.as_deref(),
            power,
            r0,
            (alpha1, alpha2, sigma2),
            c_swap,
            out.as_deref(),
        ),
        Command::Verify { suite } => run_verify(suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn report(bounds: &[RateInequality], file: &Path) -> Result<String, Failure> {
    let region =
        RateRegion2D::new(bounds.to_vec()).map_err(|e| Failure::numeric(format!("{}: {e}", file.display())))?;
    let mut s = String::new();
    for b in bounds {
        writeln!(s, "{b}").unwrap();
    }
    s.push_str("frontier vertices (R1, R2):\n");
    for (x, y) in region.frontier().vertices() {
        writeln!(s, "  {x:.6}, {y:.6}").unwrap();
    }
    Ok(s)
}

fn vertices_csv(p: &Polygon2D) -> String {
    let mut s = String::from("r1,r2\n");
    for (x, y) in p.vertices() {
        writeln!(s, "{x:.6},{y:.6}").unwrap();
    }
    s
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => io::write_atomic(path, text.as_bytes())
            .map_err(|e| Failure::schema(format!("{}: cannot write output: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dm_eval(channel_file: &Path, input_file: &Path) -> Outcome {
    let channel = io::load_channel(channel_file)?;
    let input = io::load_input(input_file)?;
    let both = || format!("{} with {}", channel_file.display(), input_file.display());
    let bounds = theorem1_region(&channel, &input).map_err(|e| match e {
        RegionError::Prob(p) => Failure::numeric(format!("{}: {p}", both())),
        e => Failure::schema(format!("{}: {e}", both())),
    })?;
    print!("{}", report(&bounds, input_file)?);
    Ok(())
}

fn det_error(file: &Path, e: DetError) -> Failure {
    match e {
        DetError::Invalid(report) => Failure::schema(format!(
            "{}: channel is outside the injective class\n{}",
            file.display(),
            report.to_string().trim_end()
        )),
        DetError::Prob(p) => Failure::numeric(format!("{}: {p}", file.display())),
        e => Failure::schema(format!("{}: {e}", file.display())),
    }
}

fn det_capacity(spec_file: &Path, input_file: Option<&Path>, search: bool, step: f64, out: Option<&Path>) -> Outcome {
    let spec = io::load_det_spec(spec_file)?;
    let report_v = det_class::validate(&spec);
    if !report_v.passed() {
        return Err(det_error(spec_file, DetError::Invalid(report_v)));
    }
    if search {
        let found = det_grid_search(&spec, step).map_err(|e| match e {
            SearchError::Det(d) => det_error(spec_file, d),
            e => Failure::schema(format!("{}: {e}", spec_file.display())),
        })?;
        if !found.hull_contains_all() {
            return Err(Failure::numeric("hull does not contain every per-input region"));
        }
        eprintln!(
            "hull of {} input points, {} vertices; every per-input region lies inside",
            found.polygons.len(),
            found.hull.vertices().len()
        );
        return emit(&vertices_csv(&found.hull), out);
    }
    let input = match input_file {
        Some(f) => io::load_det_input(f)?,
        None => DetInput::product(
            vec![1.0 / spec.x1_size as f64; spec.x1_size],
            vec![1.0 / spec.x2_size as f64; spec.x2_size],
        )
        .map_err(|e| det_error(spec_file, e))?,
    };
    let bounds =
        det_class::theorem2_region(&spec, &input).map_err(|e| det_error(input_file.unwrap_or(spec_file), e))?;
    print!("{}", report(&bounds, spec_file)?);
    if let Some(path) = out {
        let region = RateRegion2D::new(bounds).map_err(|e| Failure::numeric(e.to_string()))?;
        emit(&vertices_csv(&region.frontier()), Some(path))?;
    }
    Ok(())
}

fn gauss_sweep(file: Option<&Path>, out: Option<&Path>, cswap: CSwap) -> Outcome {
    let spec = match file {
        Some(f) => io::load_sweep(f)?,
        None => SweepSpec::reference(),
    };
    let name = file.map_or_else(|| "default sweep".to_string(), |f| f.display().to_string());
    let rows = sweep::run_sweep(&spec, cswap).map_err(|e| Failure::schema(format!("{name}: {e}")))?;
    emit(&sweep::to_csv(&rows, cswap), out)
}

fn gauss_region(
    config: Option<&Path>,
    power: f64,
    r0: f64,
    (alpha1, alpha2, sigma2): (f64, f64, f64),
    cswap: CSwap,
    out: Option<&Path>,
) -> Outcome {
    let cfg = match config {
        Some(f) => {
            let text = std::fs::read_to_string(f)
                .map_err(|e| Failure::schema(format!("{}: cannot read file: {e}", f.display())))?;
            serde_json::from_str::<GaussConfig>(&text).map_err(|e| Failure::schema(format!("{}: {e}", f.display())))?
        }
        None => GaussConfig::reference(power, r0),
    };
    cfg.validate().map_err(|e| Failure::schema(e.to_string()))?;
    let hk = HkParams::new(alpha1, alpha2, sigma2).map_err(|e| Failure::schema(e.to_string()))?;
    let k = gauss::derived_constants(&cfg, &hk);
    println!("C1 = {:.6}, C2 = {:.6}, c-swap = {}", k.c1, k.c2, cswap.as_str());
    let bounds = gauss::gauss_region_with(&cfg, &hk, cswap);
    print!("{}", report(&bounds, config.unwrap_or(Path::new("gaussian region")))?);
    println!("sum rate {:.6}", gauss::sum_rate_with(&cfg, &hk, cswap));
    if let Some(path) = out {
        let region = RateRegion2D::new(bounds).map_err(|e| Failure::numeric(e.to_string()))?;
        emit(&vertices_csv(&region.frontier()), Some(path))?;
    }
    Ok(())
}

fn run_verify(suite: Suite) -> Outcome {
    let results = verify::run_suite(suite);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {} failed", results.len(), failed);
    if failed > 0 {
        return Err(Failure {
            code: 1,
            message: format!("{failed} verification check(s) failed"),
        });
    }
    Ok(())
}
