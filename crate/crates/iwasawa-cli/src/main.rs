use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use iwasawa_ff::config::RunConfig;
use iwasawa_ff::geometry::{count_points_model, count_points_splitting, zeta_numerator, CurveModel, FixedField};
use iwasawa_ff::lfun::theta_for_layer;
use iwasawa_ff::properties::run_algebra_suite;
use iwasawa_ff::rayclass::{build_layer, GaloisLayer, TowerConfig};
use iwasawa_ff::tower::{run_tower, TowerOptions, Verdict};
use iwasawa_ff::Error;

#[derive(Parser)]
#[command(name = "iwasawa", version, about = "Equivariant L-polynomials and finite-layer checks for Carlitz cyclotomic towers over F_q(θ)")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Θ_{S,Σ}(u) of a layer.
    Theta {
        #[command(flatten)]
        tower: TowerArgs,
        /// Use the trivial Galois group (L = k).
        #[arg(long)]
        trivial_group: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// χ(Θ)(u) for every character of a layer.
    Lpoly {
        #[command(flatten)]
        tower: TowerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Galois group, generators and Frobenius elements of a layer.
    Layer {
        #[command(flatten)]
        tower: TowerArgs,
        /// Largest degree of the places whose Frobenius is listed.
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// N_i of a layer by the plane model and by the splitting law.
    CountPoints {
        #[command(flatten)]
        tower: TowerArgs,
        /// Count N_1..N_i.
        #[arg(long, default_value_t = 4)]
        max_i: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Zeta numerator, genus and class number of a layer.
    Zeta {
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Run verification suites and write a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        tower: TowerArgs,
        /// Report path (default: the config's `output`, else iwasawa-report.json).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Randomized cases per algebra property.
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Model,
    Splitting,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Functoriality,
    Ordvan,
    Sigmaunit,
    Cnf,
    Fitting,
    All,
}

impl Suite {
    fn verdicts(self) -> &'static [&'static str] {
        match self {
            Suite::Functoriality => &["stabilization", "functoriality"],
            Suite::Ordvan => &["ordvan"],
            Suite::Sigmaunit => &["sigmaunit"],
            Suite::Cnf => &["nzd", "points", "zeta", "cnf", "sigma", "charpoly"],
            Suite::Fitting => &[],
            Suite::All => &["stabilization", "functoriality", "ordvan", "sigmaunit", "nzd", "points", "zeta", "cnf", "sigma", "charpoly"],
        }
    }
}

#[derive(Args, Clone)]
struct TowerArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field size, `p^e` or a prime power.
    #[arg(long)]
    q: Option<String>,
    /// Conductor 𝔣 (default 1).
    #[arg(long)]
    f: Option<String>,
    /// Tower prime 𝔭.
    #[arg(long)]
    p: Option<String>,
    /// Places of S, comma separated (`inf` for ∞).
    #[arg(long = "S", value_delimiter = ',')]
    s: Option<Vec<String>>,
    /// Places of Σ, comma separated.
    #[arg(long = "Sigma", value_delimiter = ',')]
    sigma: Option<Vec<String>>,
    /// Layer index n (top layer N for `verify`).
    #[arg(long)]
    n: Option<usize>,
    /// Enumeration degree of the Euler product.
    #[arg(long)]
    degree: Option<usize>,
    /// p-adic precision k.
    #[arg(long)]
    precision: Option<u32>,
    /// Largest q^i enumerated by the plane-model point count.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    /// Seed of the randomized algebra suites.
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long)]
    json: bool,
    #[arg(long, conflicts_with = "json")]
    csv: bool,
}

/// Failures mapped to exit codes: 2 for bad input, 1 for everything else.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidArgument(_) | Error::NotMonic(_) | Error::InvalidField(_) | Error::FieldMismatch(..) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl TowerArgs {
    /// The resolved configuration; a tower prime is optional only for the trivial group.
    fn resolve(&self, need_prime: bool) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?
            }
            None => RunConfig {
                q: self.q.clone().ok_or_else(|| Failure::Usage("either --config or --q is required".into()))?,
                f: "1".into(),
                p: String::new(),
                s: None,
                sigma: vec![],
                layers: 0,
                degree: None,
                precision: 24,
                budget: iwasawa_ff::geometry::DEFAULT_POINT_BUDGET,
                seed: 0,
                threads: None,
                output: None,
            },
        };
        if let Some(q) = &self.q {
            cfg.q = q.clone();
        }
        if let Some(f) = &self.f {
            cfg.f = f.clone();
        }
        if let Some(p) = &self.p {
            cfg.p = p.clone();
        }
        if let Some(s) = &self.s {
            cfg.s = Some(s.clone());
        }
        if let Some(sigma) = &self.sigma {
            cfg.sigma = sigma.clone();
        }
        if let Some(n) = self.n {
            cfg.layers = n;
        }
        cfg.degree = self.degree.or(cfg.degree);
        cfg.precision = self.precision.unwrap_or(cfg.precision);
        cfg.budget = self.budget.unwrap_or(cfg.budget);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        if cfg.p.is_empty() {
            if need_prime {
                return Err(Failure::Usage("a tower prime is required: pass --p or set \"p\" in the config".into()));
            }
            // Any finite place of S serves: the layer is replaced by the trivial group.
            let first = cfg.s.iter().flatten().find(|v| !matches!(v.as_str(), "inf" | "infinity" | "∞"));
            cfg.p = first.cloned().ok_or_else(|| Failure::Usage("--trivial-group needs --p or a finite place in --S".into()))?;
        }
        if cfg.sigma.is_empty() {
            return Err(Failure::Usage("Σ must be nonempty: pass --Sigma".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn tower_and_layer(args: &TowerArgs, trivial: bool) -> CliResult<(RunConfig, TowerConfig, GaloisLayer)> {
    let run = args.resolve(!trivial)?;
    let cfg = run.tower_config()?;
    let layer = if trivial { GaloisLayer::trivial(cfg.field()) } else { build_layer(&cfg, run.layers)? };
    Ok((run, cfg, layer))
}

/// c_0 + c_1 u + … with signs, e.g. `1 − u`.
fn format_poly(coeffs: &[i128]) -> String {
    let mut out = String::new();
    for (j, &c) in coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
        let sign = if c < 0 { "−" } else { "+" };
        if out.is_empty() {
            if c < 0 {
                out.push('−');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let a = c.unsigned_abs();
        let mono = match j {
            0 => String::new(),
            1 => "u".into(),
            _ => format!("u^{j}"),
        };
        if a != 1 || j == 0 {
            out.push_str(&a.to_string());
        }
        out.push_str(&mono);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn print_json(v: &impl serde::Serialize) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(v).map_err(|e| Failure::Run(e.to_string()))?);
    Ok(())
}

fn cmd_theta(tower: &TowerArgs, trivial: bool, out: &OutputArgs) -> CliResult<()> {
    let (run, cfg, layer) = tower_and_layer(tower, trivial)?;
    let theta = theta_for_layer(&cfg, &layer, run.degree)?;
    if out.json {
        return print_json(&json!({"config": run, "theta": theta}));
    }
    if out.csv {
        println!("degree,element,coefficient");
        for (j, c) in theta.theta.coeffs.iter().enumerate() {
            for (i, &x) in c.iter().enumerate().filter(|(_, &x)| x != 0) {
                println!("{j},\"{:?}\",{x}", layer.group().elem(i));
            }
        }
        return Ok(());
    }
    if layer.order() == 1 {
        let coeffs: Vec<i128> = theta.theta.coeffs.iter().map(|c| c[0]).collect();
        println!("{}", format_poly(&coeffs));
    } else {
        print!("{}", theta.theta.table());
    }
    println!("# bound {}, zero window up to u^{}", theta.certificate.bound, theta.certificate.enumeration_degree);
    Ok(())
}

fn cmd_lpoly(tower: &TowerArgs, out: &OutputArgs) -> CliResult<()> {
    let (run, cfg, layer) = tower_and_layer(tower, false)?;
    let theta = theta_for_layer(&cfg, &layer, run.degree)?;
    if out.json {
        return print_json(&json!({"config": run, "characters": theta.characters}));
    }
    let exponent = layer.group().exponent();
    if out.csv {
        println!("character,order,conductor_degree,bound,coefficients");
        for c in &theta.characters {
            println!("\"{:?}\",{},{},{},\"{:?}\"", c.character.values, c.character.order(), c.conductor_degree, c.bound, c.poly);
        }
        return Ok(());
    }
    println!("# coefficients in Z[ζ_{exponent}], power basis");
    for c in &theta.characters {
        let rational = c.poly.iter().all(|a| a.iter().skip(1).all(|&x| x == 0));
        let shown = if rational {
            format_poly(&c.poly.iter().map(|a| a.first().copied().unwrap_or(0)).collect::<Vec<_>>())
        } else {
            format!("{:?}", c.poly)
        };
        println!("χ = {:?}  deg 𝔠 = {}  bound {}  {}", c.character.values, c.conductor_degree, c.bound, shown);
    }
    Ok(())
}

fn cmd_layer(tower: &TowerArgs, max_degree: usize) -> CliResult<()> {
    let (_, _, layer) = tower_and_layer(tower, false)?;
    print_json(&layer.dump(max_degree)?)
}

fn cmd_count_points(tower: &TowerArgs, max_i: usize, method: Method, out: &OutputArgs) -> CliResult<()> {
    let (run, _, layer) = tower_and_layer(tower, false)?;
    let ff = FixedField::full(&layer);
    let model = if method != Method::Splitting { Some(CurveModel::for_layer(&layer)?) } else { None };
    let mut rows = Vec::new();
    for i in 1..=max_i {
        let m = model.as_ref().map(|m| count_points_model(m, i, run.budget)).transpose()?;
        let s = if method != Method::Model { Some(count_points_splitting(&ff, i, u64::MAX)?) } else { None };
        if let (Some(a), Some(b)) = (m, s) {
            if a != b {
                return Err(Failure::Run(format!("N_{i}: plane model {a} ≠ splitting law {b}")));
            }
        }
        rows.push((i, m, s));
    }
    let cell = |x: Option<u64>| x.map_or(String::new(), |v| v.to_string());
    if out.json {
        let v: Vec<Value> = rows.iter().map(|(i, m, s)| json!({"i": i, "model": m, "splitting": s})).collect();
        return print_json(&json!({"config": run, "budget": run.budget, "counts": v}));
    }
    println!("{}", if out.csv { "i,model,splitting" } else { "i\tmodel\tsplitting" });
    let sep = if out.csv { "," } else { "\t" };
    for (i, m, s) in rows {
        println!("{i}{sep}{}{sep}{}", cell(m), cell(s));
    }
    Ok(())
}

fn cmd_zeta(tower: &TowerArgs) -> CliResult<()> {
    let (run, cfg, layer) = tower_and_layer(tower, false)?;
    let ff = FixedField::full(&layer);
    let genus = ff.genus_from_conductors()? as usize;
    let counts = (1..=2 * genus + 2).map(|i| count_points_splitting(&ff, i, u64::MAX)).collect::<iwasawa_ff::Result<Vec<u64>>>()?;
    let mut zeta = zeta_numerator(&counts, cfg.field().q() as u64)?;
    zeta.genus_from_conductors = Some(genus as u64);
    print_json(&json!({
        "config": run,
        "zeta": zeta,
        "functional_equation": zeta.functional_equation_holds(),
        "weil_bounds": zeta.weil_bounds_hold(),
        "riemann_hypothesis": zeta.riemann_hypothesis_holds(),
    }))
}

fn cmd_verify(suite: Suite, tower: &TowerArgs, output: Option<&Path>, cases: usize) -> CliResult<bool> {
    let run = tower.resolve(true)?;
    let cfg = run.tower_config()?;
    let wanted = suite.verdicts();
    let mut report = json!({"config": run, "suite": format!("{:?}", suite_name(suite))});
    let mut verdicts: Vec<Verdict> = Vec::new();
    let mut passed = true;
    if !wanted.is_empty() {
        let geometry = wanted.contains(&"cnf");
        let options = TowerOptions { geometry, ..run.tower_options() };
        let top = if suite == Suite::Cnf { 0 } else { run.layers };
        let tower_run = run_tower(&cfg, top, &options)?;
        verdicts = tower_run.verdicts.iter().filter(|v| wanted.contains(&v.suite.as_str())).cloned().collect();
        passed &= verdicts.iter().all(|v| v.passed);
        report["tower"] = serde_json::to_value(&tower_run).map_err(|e| Failure::Run(e.to_string()))?;
    }
    if matches!(suite, Suite::Fitting | Suite::All) {
        let algebra = run_algebra_suite(run.seed, cases);
        for t in &algebra.properties {
            verdicts.push(Verdict {
                suite: "fitting".into(),
                shadows: t.property.clone(),
                layer: None,
                passed: t.holds(),
                precision: None,
                bound: None,
                detail: format!("{}: {}/{} cases, {} redrawn (seed {})", t.property, t.passed, t.cases, t.skipped, algebra.seed),
            });
        }
        passed &= algebra.holds();
        report["algebra"] = serde_json::to_value(&algebra).map_err(|e| Failure::Run(e.to_string()))?;
    }
    report["verdicts"] = serde_json::to_value(&verdicts).map_err(|e| Failure::Run(e.to_string()))?;
    report["passed"] = json!(passed);
    let path = output
        .map(Path::to_path_buf)
        .or_else(|| run.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("iwasawa-report.json"));
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Run(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))?;
    print!("{}", summary(&verdicts));
    println!("report written to {}", path.display());
    Ok(passed)
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Functoriality => "functoriality",
        Suite::Ordvan => "ordvan",
        Suite::Sigmaunit => "sigmaunit",
        Suite::Cnf => "cnf",
        Suite::Fitting => "fitting",
        Suite::All => "all",
    }
}

fn summary(verdicts: &[Verdict]) -> String {
    let mut out = format!("{:<14} {:>5} {:>6} {:>6}  {}\n", "suite", "layer", "prec", "result", "detail");
    for v in verdicts {
        let layer = v.layer.map_or("-".into(), |n| n.to_string());
        let prec = match (v.precision, v.bound) {
            (Some(k), _) => format!("p^{k}"),
            (None, Some(d)) => format!("D={d}"),
            _ => "exact".into(),
        };
        out += &format!("{:<14} {:>5} {:>6} {:>6}  {}\n", v.suite, layer, prec, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    out
}

fn run(cli: Cli) -> CliResult<bool> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::Run(e.to_string()))?;
    }
    match &cli.command {
        Command::Theta { tower, trivial_group, out } => cmd_theta(tower, *trivial_group, out).map(|_| true),
        Command::Lpoly { tower, out } => cmd_lpoly(tower, out).map(|_| true),
        Command::Layer { tower, max_degree } => cmd_layer(tower, *max_degree).map(|_| true),
        Command::CountPoints { tower, max_i, method, out } => cmd_count_points(tower, *max_i, *method, out).map(|_| true),
        Command::Zeta { tower } => cmd_zeta(tower).map(|_| true),
        Command::Verify { suite, tower, output, cases } => cmd_verify(*suite, tower, output.as_deref(), *cases),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
