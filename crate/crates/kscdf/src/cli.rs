//! Command-line surface. Subcommands: `estimate`, `band`, `maxsmooth`,
//! `simulate`, `theory`. Numeric output uses nine significant digits;
//! input data files are newline-separated decimals with `#` comments and
//! CRLF tolerated. Exit codes: 0 success, 1 computation/input error,
//! 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bands::{band_at, ks_quantile, membership_at, BandSpec};
use crate::bandwidth::{max_smoothing_bandwidth, BandwidthRule};
use crate::densities::TestDensity;
use crate::error::Error;
use crate::estimators::{Sample, Side, SmoothedEstimate};
use crate::kernels::Kernel;
use crate::numfmt::sig9;
use crate::simulation::{run_study, StudyConfig};
use crate::theory::AsymptoticContext;

#[derive(Debug, Parser)]
#[command(
    name = "kscdf",
    version,
    about = "Kernel-smoothed empirical CDFs, confidence bands, and bandwidth rules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the ECDF, smoothed CDF, and KDE of a dataset on a grid.
    Estimate(EstimateArgs),
    /// Confidence band around the data, with membership of the smoothed CDF.
    Band(BandArgs),
    /// Maximum smoothing bandwidth ĥ with search diagnostics.
    Maxsmooth(MaxsmoothArgs),
    /// Run a Monte Carlo band-inclusion study from a JSON config.
    Simulate(SimulateArgs),
    /// Asymptotic mean, variance, and inclusion probability of Z_n.
    Theory(TheoryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BandType {
    Ks,
    Pointwise,
    Global,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    /// Evenly spaced points over the data range extended by 3h.
    Auto(usize),
    Range {
        lo: f64,
        hi: f64,
        count: usize,
    },
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    if s == "auto" {
        return Ok(GridSpec::Auto(201));
    }
    if let Some(rest) = s.strip_prefix("auto:") {
        let count: usize = rest
            .parse()
            .map_err(|_| format!("invalid grid count '{rest}'"))?;
        if count == 0 {
            return Err("grid count must be positive".into());
        }
        return Ok(GridSpec::Auto(count));
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{s}' must be lo:hi:count or auto[:count]"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("invalid grid bound '{}'", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("invalid grid bound '{}'", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("invalid grid count '{}'", parts[2]))?;
    if !(lo <= hi) || count == 0 {
        return Err(format!("grid '{s}' must satisfy lo <= hi and count >= 1"));
    }
    Ok(GridSpec::Range { lo, hi, count })
}

fn parse_rule(s: &str) -> Result<BandwidthRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kernel(s: &str) -> Result<Kernel, String> {
    Kernel::from_name(s).map_err(|e| e.to_string())
}

fn parse_density(s: &str) -> Result<TestDensity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated sample sizes, newtyped so clap takes one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<usize>);

fn parse_n_list(s: &str) -> Result<NList, String> {
    let out: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match out {
        Ok(v) if !v.is_empty() && v.iter().all(|&n| n > 0) => Ok(NList(v)),
        _ => Err(format!(
            "invalid n list '{s}' (expected e.g. 100,1000,10000)"
        )),
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Data file: one decimal per line, `#` comments allowed.
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    pub kernel: Kernel,
    /// Bandwidth rule: `fixed:H`, `rate:a=A,eps=E[,abs]`, `quick:L`, `maxsmooth:L`, `ccv:L`.
    #[arg(long, value_parser = parse_rule)]
    pub bandwidth: BandwidthRule,
    /// Evaluation grid `lo:hi:count`, or `auto[:count]`.
    #[arg(long, default_value = "auto", value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: GridSpec,
    /// Output path, or - for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    pub kernel: Kernel,
    /// Band family.
    #[arg(long = "type", value_enum, default_value_t = BandType::Ks)]
    pub kind: BandType,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Bandwidth rule for the smoothed CDF under test (all types except corrected).
    #[arg(long, value_parser = parse_rule)]
    pub bandwidth: Option<BandwidthRule>,
    /// Smoothing bandwidth rule of the corrected band; defaults to the
    /// normal-reference (2d₁/(k₂²φ(1)))^{1/3} σ̂ n^{-1/3}.
    #[arg(long, value_parser = parse_rule)]
    pub h1: Option<BandwidthRule>,
    /// Derivative bandwidth rule of the corrected band; defaults to σ̂ n^{-1/7}.
    #[arg(long, value_parser = parse_rule)]
    pub h2: Option<BandwidthRule>,
    /// Explicit grid; when omitted the rows are the distinct data values
    /// and membership checks both sides of each jump.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct MaxsmoothArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    pub kernel: Kernel,
    #[arg(long, default_value_t = 0.90)]
    pub level: f64,
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long, value_enum, default_value_t = MaxsmoothFormat::Text)]
    pub format: MaxsmoothFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaxsmoothFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON study configuration.
    #[arg(long)]
    pub config: String,
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// stdnormal, normal:mu=,sigma=, uniform:a=,b=, or mix:w=,mu1=,sigma1=,mu2=,sigma2=.
    #[arg(long, default_value = "stdnormal", value_parser = parse_density)]
    pub density: TestDensity,
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    pub kernel: Kernel,
    /// Evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Band confidence level; sets c to the Kolmogorov quantile.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Explicit band constant overriding --level.
    #[arg(long)]
    pub constant: Option<f64>,
    /// Comma-separated sample sizes.
    #[arg(long = "n-list", value_parser = parse_n_list)]
    pub n_list: NList,
    /// Data-free bandwidth rule: fixed:H or rate:a=A,eps=E,abs.
    #[arg(long, value_parser = parse_rule)]
    pub bandwidth: BandwidthRule,
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations; exit code 2.
    Usage(String),
    /// Input or computation failure; exit code 1.
    Run(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Run(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Estimate(args) => estimate(args),
        Command::Band(args) => band(args),
        Command::Maxsmooth(args) => maxsmooth(args),
        Command::Simulate(args) => simulate(args),
        Command::Theory(args) => theory(args),
    }
}

/// Newline-separated decimals; blank lines and `#` comments skipped,
/// CRLF tolerated, parse failures reported with their line number.
pub fn read_data(path: &str) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Run(format!("cannot read {path}: {e}")))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim_end_matches('\r').trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| CliError::Run(format!("{path}:{}: invalid number '{t}'", i + 1)))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Run(format!("{path}: empty dataset")));
    }
    Ok(out)
}

fn write_out(path: &str, content: &str) -> CliResult<()> {
    if path == "-" {
        print!("{content}");
        Ok(())
    } else {
        std::fs::write(path, content)
            .map_err(|e| CliError::Run(format!("cannot write {path}: {e}")))
    }
}

fn grid_points(spec: GridSpec, sample: &Sample, h: f64) -> Vec<f64> {
    let (lo, hi, count) = match spec {
        GridSpec::Auto(count) => (sample.min() - 3.0 * h, sample.max() + 3.0 * h, count),
        GridSpec::Range { lo, hi, count } => (lo, hi, count),
    };
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn load_sample(path: &str) -> CliResult<Sample> {
    Ok(Sample::new(read_data(path)?)?)
}

fn estimate(args: EstimateArgs) -> CliResult<()> {
    let sample = load_sample(&args.input)?;
    let h = args.bandwidth.resolve(&sample, args.kernel)?;
    let est = SmoothedEstimate::new(&sample, args.kernel, h)?;
    let xs = grid_points(args.grid, &sample, h);
    let out = match args.format {
        OutputFormat::Csv => {
            let mut s = String::from("x,fhat,Fhat,Fn\n");
            for &x in &xs {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    sig9(x),
                    sig9(est.pdf(x)),
                    sig9(est.cdf(x)),
                    sig9(sample.ecdf(x, Side::At)),
                ));
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<_> = xs
                .iter()
                .map(|&x| {
                    json!({
                        "x": x,
                        "fhat": est.pdf(x),
                        "Fhat": est.cdf(x),
                        "Fn": sample.ecdf(x, Side::At),
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({ "h": h, "rows": rows })).unwrap();
            s.push('\n');
            s
        }
    };
    write_out(&args.out, &out)
}

struct BandRow {
    x: f64,
    fhat: f64,
    cdf_hat: f64,
    fn_at: f64,
    lo: f64,
    hi: f64,
    contained: Option<bool>,
}

fn band(args: BandArgs) -> CliResult<()> {
    let sample = load_sample(&args.input)?;
    let kernel = args.kernel;
    let n = sample.n() as f64;

    let rows: Vec<BandRow> = match args.kind {
        BandType::Corrected => {
            let h1 = match args.h1 {
                Some(rule) => rule.resolve(&sample, kernel)?,
                None => {
                    let m = kernel.moments();
                    let phi1 = crate::normal::std_normal_pdf(1.0);
                    (2.0 * m.d1 / (m.k2 * m.k2 * phi1)).cbrt() * sample.sd() * n.powf(-1.0 / 3.0)
                }
            };
            let h2 = match args.h2 {
                Some(rule) => rule.resolve(&sample, kernel)?,
                None => sample.sd() * n.powf(-1.0 / 7.0),
            };
            let spec = BandSpec::bias_corrected(args.level, h1, h2)?;
            let est = SmoothedEstimate::new(&sample, kernel, h1)?;
            let xs = match args.grid {
                Some(g) => grid_points(g, &sample, h1),
                None => {
                    let mut xs = sample.values().to_vec();
                    xs.dedup();
                    xs
                }
            };
            xs.iter()
                .map(|&x| {
                    let (_, interval) = crate::bands::corrected_band_at(&spec, &sample, kernel, x)?;
                    Ok(BandRow {
                        x,
                        fhat: est.pdf(x),
                        cdf_hat: est.cdf(x),
                        fn_at: sample.ecdf(x, Side::At),
                        lo: interval.lo,
                        hi: interval.hi,
                        // The corrected band covers F; the observable
                        // membership check is the ECDF against the band.
                        contained: Some(interval.contains(sample.ecdf(x, Side::At))),
                    })
                })
                .collect::<CliResult<_>>()?
        }
        _ => {
            let rule = args.bandwidth.ok_or_else(|| {
                CliError::Usage("--bandwidth is required for band types ks/pointwise/global".into())
            })?;
            let spec = match args.kind {
                BandType::Ks => BandSpec::ks_simultaneous(args.level)?,
                BandType::Pointwise => BandSpec::pointwise_normal(args.level)?,
                BandType::Global => BandSpec::global_normal(args.level)?,
                BandType::Corrected => unreachable!(),
            };
            let h = rule.resolve(&sample, kernel)?;
            let est = SmoothedEstimate::new(&sample, kernel, h)?;
            let (range_lo, range_hi) = match args.kind {
                BandType::Global => (sample.quantile(0.05), sample.quantile(0.95)),
                _ => (f64::NEG_INFINITY, f64::INFINITY),
            };
            match args.grid {
                Some(g) => grid_points(g, &sample, h)
                    .into_iter()
                    .map(|x| {
                        let interval = band_at(&spec, &sample, x, Side::At)?;
                        let cdf_hat = est.cdf(x);
                        let in_range = x >= range_lo && x <= range_hi;
                        Ok(BandRow {
                            x,
                            fhat: est.pdf(x),
                            cdf_hat,
                            fn_at: sample.ecdf(x, Side::At),
                            lo: interval.lo,
                            hi: interval.hi,
                            contained: in_range.then(|| interval.contains(cdf_hat)),
                        })
                    })
                    .collect::<CliResult<_>>()?,
                None => {
                    // Default rows are the jump candidates; membership is
                    // checked on both sides of each jump, which makes the
                    // KS verdict exact.
                    let mut xs = sample.values().to_vec();
                    xs.dedup();
                    xs.into_iter()
                        .map(|x| {
                            let interval = band_at(&spec, &sample, x, Side::At)?;
                            let in_range = x >= range_lo && x <= range_hi;
                            Ok(BandRow {
                                x,
                                fhat: est.pdf(x),
                                cdf_hat: est.cdf(x),
                                fn_at: sample.ecdf(x, Side::At),
                                lo: interval.lo,
                                hi: interval.hi,
                                contained: in_range
                                    .then(|| membership_at(&spec, &sample, &est, x))
                                    .transpose()?,
                            })
                        })
                        .collect::<CliResult<_>>()?
                }
            }
        }
    };

    let out = match args.format {
        OutputFormat::Csv => {
            let mut s = String::from("x,fhat,Fhat,Fn,lo,hi,contained\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    sig9(r.x),
                    sig9(r.fhat),
                    sig9(r.cdf_hat),
                    sig9(r.fn_at),
                    sig9(r.lo),
                    sig9(r.hi),
                    r.contained.map(|b| b.to_string()).unwrap_or_default(),
                ));
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "x": r.x,
                        "fhat": r.fhat,
                        "Fhat": r.cdf_hat,
                        "Fn": r.fn_at,
                        "lo": r.lo,
                        "hi": r.hi,
                        "contained": r.contained,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).unwrap();
            s.push('\n');
            s
        }
    };
    write_out(&args.out, &out)
}

fn maxsmooth(args: MaxsmoothArgs) -> CliResult<()> {
    let sample = load_sample(&args.input)?;
    let (hhat, diag) = max_smoothing_bandwidth(&sample, args.kernel, args.level)?;
    let out = match args.format {
        MaxsmoothFormat::Text => {
            let brackets = if diag.brackets.is_empty() {
                "none".to_string()
            } else {
                diag.brackets
                    .iter()
                    .map(|(lo, hi)| format!("[{},{}]", sig9(*lo), sig9(*hi)))
                    .collect::<Vec<_>>()
                    .join(";")
            };
            format!(
                "h_hat = {}\nlevel = {}\nc = {}\nkernel = {}\nn = {}\ngrid_lo = {}\ngrid_hi = {}\ntop_admissible = {}\nsign_evals = {}\nbrackets = {}\n",
                sig9(hhat),
                args.level,
                sig9(diag.c),
                args.kernel,
                sample.n(),
                sig9(diag.grid_lo),
                sig9(diag.grid_hi),
                diag.top_admissible,
                diag.sign_evals,
                brackets,
            )
        }
        MaxsmoothFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "h_hat": hhat,
                "level": args.level,
                "c": diag.c,
                "kernel": args.kernel.name(),
                "n": sample.n(),
                "grid_lo": diag.grid_lo,
                "grid_hi": diag.grid_hi,
                "top_admissible": diag.top_admissible,
                "sign_evals": diag.sign_evals,
                "brackets": diag.brackets,
            }))
            .unwrap();
            s.push('\n');
            s
        }
    };
    write_out(&args.out, &out)
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Run(format!("cannot read {}: {e}", args.config)))?;
    let cfg: StudyConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Run(format!("{}: invalid study config: {e}", args.config)))?;
    let result = run_study(&cfg)?;
    let out = match args.format {
        OutputFormat::Csv => result.to_csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&result).unwrap();
            s.push('\n');
            s
        }
    };
    write_out(&args.out, &out)
}

fn theory(args: TheoryArgs) -> CliResult<()> {
    match args.bandwidth {
        BandwidthRule::Fixed(_) | BandwidthRule::Rate { absolute: true, .. } => {}
        _ => {
            return Err(CliError::Usage(
                "theory needs a data-free bandwidth rule: fixed:H or rate:a=A,eps=E,abs".into(),
            ))
        }
    }
    let c = match args.constant {
        Some(c) if c > 0.0 => c,
        Some(c) => {
            return Err(CliError::Usage(format!(
                "--constant must be positive, got {c}"
            )))
        }
        None => ks_quantile(args.level)?,
    };
    let ctx = AsymptoticContext::new(args.density, args.kernel, args.x, c)?;
    let mut rows = Vec::new();
    for &n in &args.n_list.0 {
        let h = match args.bandwidth {
            BandwidthRule::Fixed(h) => h,
            BandwidthRule::Rate { a, eps, .. } => a * (n as f64).powf(-eps),
            _ => unreachable!(),
        };
        let mean = ctx.mean_z_leading(n as u64, h);
        let var = ctx.var_z_expansion(h, 3)?;
        let pi = ctx.inclusion_prob(n as u64, h)?;
        rows.push((n, h, mean, var, pi));
    }
    let out = match args.format {
        OutputFormat::Csv => {
            let mut s = String::from("n,h,mean,var,pi\n");
            for (n, h, mean, var, pi) in rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    n,
                    sig9(h),
                    sig9(mean),
                    sig9(var),
                    sig9(pi)
                ));
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(n, h, mean, var, pi)| {
                    json!({"n": n, "h": h, "mean": mean, "var": var, "pi": pi})
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).unwrap();
            s.push('\n');
            s
        }
    };
    write_out(&args.out, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("auto").unwrap(), GridSpec::Auto(201));
        assert_eq!(parse_grid("auto:50").unwrap(), GridSpec::Auto(50));
        assert_eq!(
            parse_grid("-4:4:200").unwrap(),
            GridSpec::Range {
                lo: -4.0,
                hi: 4.0,
                count: 200
            }
        );
        assert!(parse_grid("4:-4:10").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn n_list_parsing() {
        assert_eq!(parse_n_list("100,1000").unwrap(), NList(vec![100, 1000]));
        assert!(parse_n_list("").is_err());
        assert!(parse_n_list("0,5").is_err());
        assert!(parse_n_list("abc").is_err());
    }

    #[test]
    fn cli_parses_spec_examples() {
        Cli::try_parse_from([
            "kscdf",
            "estimate",
            "--input",
            "d.txt",
            "--kernel",
            "gaussian",
            "--bandwidth",
            "quick:0.95",
            "--grid",
            "-4:4:200",
        ])
        .unwrap();
        Cli::try_parse_from([
            "kscdf",
            "simulate",
            "--config",
            "study.json",
            "--out",
            "r.csv",
        ])
        .unwrap();
        Cli::try_parse_from([
            "kscdf",
            "estimate",
            "--input",
            "d.txt",
            "--bandwidth",
            "rate:a=1.059,eps=0.2",
        ])
        .unwrap();
        assert!(Cli::try_parse_from(["kscdf", "estimate", "--input", "d.txt"]).is_err());
        assert!(Cli::try_parse_from([
            "kscdf",
            "estimate",
            "--input",
            "d.txt",
            "--bandwidth",
            "bogus:1"
        ])
        .is_err());
    }

    #[test]
    fn data_file_reading() {
        let dir = std::env::temp_dir().join("kscdf-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.txt");
        std::fs::write(&path, "# comment\r\n1.5\r\n\r\n2.5\n-0.25\n").unwrap();
        let vals = read_data(path.to_str().unwrap()).unwrap();
        assert_eq!(vals, vec![1.5, 2.5, -0.25]);

        let bad = dir.join("bad.txt");
        std::fs::write(&bad, "1.0\nx7\n").unwrap();
        match read_data(bad.to_str().unwrap()) {
            Err(CliError::Run(msg)) => assert!(msg.contains(":2:"), "{msg}"),
            other => panic!("expected run error, got {other:?}"),
        }

        let empty = dir.join("empty.txt");
        std::fs::write(&empty, "# nothing\n").unwrap();
        assert!(read_data(empty.to_str().unwrap()).is_err());
    }
}
