//! Reproducible Monte Carlo studies of band inclusion, plus the
//! limiting-normality and white-noise diagnostics.
//!
//! Each replicate draws from its own [`RngStream`] whose index is derived
//! from the cell values (rule string, n, replicate), so extending a study
//! with new rules or sample sizes never perturbs existing cells, and
//! aggregation is an order-independent reduction over the replicate
//! vector — results are identical under any thread count.

use serde::{Deserialize, Serialize};

use crate::bands::{contains_globally, ks_quantile, membership_at, BandKind, BandSpec};
use crate::bandwidth::BandwidthRule;
use crate::densities::TestDensity;
use crate::error::{Error, Result};
use crate::estimators::{Side, SmoothedEstimate};
use crate::kernels::Kernel;
use crate::normal::std_normal_cdf;
use crate::numfmt::{csv_field, sig9};
use crate::rng::{derive_stream, RngStream};
use crate::theory::AsymptoticContext;

/// A Monte Carlo scenario. Densities, kernels, bands, and rules use the
/// same string syntax as the CLI (`stdnormal`, `gaussian`, `ks:0.95`,
/// `rate:a=3,eps=0.2,abs`, ...), so configs stay plain JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub density: String,
    pub kernel: String,
    pub bands: Vec<String>,
    pub rules: Vec<String>,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub eval_points: Vec<f64>,
    /// Also test membership simultaneously over all jump candidates.
    #[serde(default)]
    pub global: bool,
    /// Worker cap; falls back to the KSCDF_THREADS environment variable.
    #[serde(default)]
    pub threads: Option<usize>,
}

/// Band syntax for studies: `ks:LEVEL`, `pointwise:LEVEL`, `global:LEVEL`.
pub fn parse_band(s: &str) -> Result<BandSpec> {
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("band '{s}' is missing ':'")))?;
    let level: f64 = rest
        .parse()
        .map_err(|_| Error::Parse(format!("invalid level '{rest}' in band '{s}'")))?;
    match head {
        "ks" => BandSpec::ks_simultaneous(level),
        "pointwise" => BandSpec::pointwise_normal(level),
        "global" => BandSpec::global_normal(level),
        "corrected" => Err(Error::Parse(
            "the corrected band covers F rather than testing F̂ membership; \
             it is not available in simulation studies"
                .into(),
        )),
        other => Err(Error::Parse(format!(
            "unknown band kind '{other}' (expected ks, pointwise, or global)"
        ))),
    }
}

fn band_tag(spec: &BandSpec) -> String {
    format!("{}:{}", spec.kind.name(), spec.level)
}

/// One replicate of one study cell.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    /// Rule resolution failed; the row is flagged and carries no values.
    pub failed: bool,
    pub h: f64,
    /// Per eval point: Z_n at both sides and per-band membership.
    pub points: Vec<TrialPoint>,
    /// Per band: simultaneous membership over all jumps, with max |Z_n|.
    pub global_inside: Vec<bool>,
    pub z_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrialPoint {
    pub z_at: f64,
    pub z_left: f64,
    pub inside: Vec<bool>,
}

/// Draw a sample, resolve the bandwidth, and record Z_n and band
/// membership at every requested point (and globally when asked).
/// Rule-resolution failures flag the record instead of propagating.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    density: &TestDensity,
    kernel: Kernel,
    n: usize,
    rule: &BandwidthRule,
    bands: &[BandSpec],
    eval_points: &[f64],
    global: bool,
    seed: u64,
    stream_index: u64,
) -> TrialRecord {
    let failed = TrialRecord {
        failed: true,
        h: f64::NAN,
        points: Vec::new(),
        global_inside: Vec::new(),
        z_max: None,
    };
    let mut rng = RngStream::new(seed, stream_index);
    let sample = match density.sample(n, &mut rng) {
        Ok(s) => s,
        Err(_) => return failed,
    };
    let h = match rule.resolve(&sample, kernel) {
        Ok(h) => h,
        Err(_) => return failed,
    };
    let est = match SmoothedEstimate::new(&sample, kernel, h) {
        Ok(e) => e,
        Err(_) => return failed,
    };
    let points = eval_points
        .iter()
        .map(|&x| TrialPoint {
            z_at: est.z(x, Side::At),
            z_left: est.z(x, Side::Left),
            inside: bands
                .iter()
                .map(|b| membership_at(b, &sample, &est, x).unwrap_or(false))
                .collect(),
        })
        .collect();
    let (global_inside, z_max) = if global {
        let (zmax, _) = est.z_max_abs();
        let inside = bands
            .iter()
            .map(|b| match b.kind {
                BandKind::KsSimultaneous => zmax <= b.constant,
                _ => contains_globally(b, &sample, &est).unwrap_or(false),
            })
            .collect();
        (inside, Some(zmax))
    } else {
        (Vec::new(), None)
    };
    TrialRecord {
        failed: false,
        h,
        points,
        global_inside,
        z_max,
    }
}

/// One aggregated cell of a study.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub rule: String,
    pub band: String,
    /// Evaluation point, or None for the simultaneous (GLOBAL) row.
    pub x: Option<f64>,
    pub reps: usize,
    pub failures: usize,
    /// Fraction of successful replicates with F̂_h inside the band.
    pub freq: f64,
    /// Binomial Monte Carlo standard error √(p̂(1−p̂)/reps).
    pub mc_se: f64,
    /// Normal inclusion approximation, where it applies (KS band,
    /// data-free rule, single point); None otherwise.
    pub theory: Option<f64>,
    /// Mean and variance of Z_n(x) across replicates (of max |Z_n| for
    /// GLOBAL rows).
    pub z_mean: f64,
    pub z_var: f64,
    /// Mean resolved bandwidth.
    pub h_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
}

pub const STUDY_CSV_HEADER: &str =
    "n,rule,band,x,reps,failures,freq,mc_se,theory,z_mean,z_var,h_mean";

impl StudyResult {
    /// Stable CSV rendering: fixed header, 9 significant digits,
    /// byte-identical across runs and thread counts.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(STUDY_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let x = r.x.map(sig9).unwrap_or_else(|| "GLOBAL".into());
            let theory = r.theory.map(sig9).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.n,
                csv_field(&r.rule),
                csv_field(&r.band),
                x,
                r.reps,
                r.failures,
                sig9(r.freq),
                sig9(r.mc_se),
                theory,
                sig9(r.z_mean),
                sig9(r.z_var),
                sig9(r.h_mean),
            ));
        }
        out
    }
}

fn thread_cap(cfg: &StudyConfig) -> Option<usize> {
    cfg.threads.or_else(|| {
        std::env::var("KSCDF_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

/// Map the replicate indices through `f`, in parallel when the `parallel`
/// feature is enabled. The output is ordered by replicate index either way.
fn map_reps<T, F>(reps: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            builder = builder.num_threads(t.max(1));
        }
        match builder.build() {
            Ok(pool) => pool.install(|| (0..reps as u64).into_par_iter().map(&f).collect()),
            Err(_) => (0..reps as u64).map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        (0..reps as u64).map(f).collect()
    }
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (mut count, mut sum) = (0usize, 0.0);
    for v in values.clone() {
        count += 1;
        sum += v;
    }
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum / count as f64;
    if count == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (count as f64 - 1.0))
}

/// Run the full scenario: every (n, rule) cell is replicated `reps`
/// times, and one row is emitted per (n, rule, band, point) plus a GLOBAL
/// row per band when requested. Deterministic for a fixed seed.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    let density: TestDensity = cfg.density.parse()?;
    let kernel = Kernel::from_name(&cfg.kernel)?;
    let bands: Vec<BandSpec> = cfg
        .bands
        .iter()
        .map(|b| parse_band(b))
        .collect::<Result<_>>()?;
    let rules: Vec<BandwidthRule> = cfg.rules.iter().map(|r| r.parse()).collect::<Result<_>>()?;
    if cfg.reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    if cfg.n_list.is_empty() {
        return Err(Error::InvalidParameter("n_list must be nonempty".into()));
    }
    if bands.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one band is required".into(),
        ));
    }
    if rules.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one rule is required".into(),
        ));
    }
    if cfg.eval_points.is_empty() && !cfg.global {
        return Err(Error::InvalidParameter(
            "nothing to evaluate: no eval_points and global is false".into(),
        ));
    }
    let threads = thread_cap(cfg);

    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        if n == 0 {
            return Err(Error::InvalidParameter("n_list contains 0".into()));
        }
        for rule in &rules {
            let tag = rule.to_string();
            let trials = map_reps(cfg.reps, threads, |rep| {
                run_trial(
                    &density,
                    kernel,
                    n,
                    rule,
                    &bands,
                    &cfg.eval_points,
                    cfg.global,
                    cfg.seed,
                    derive_stream(&tag, n, rep),
                )
            });
            let ok: Vec<&TrialRecord> = trials.iter().filter(|t| !t.failed).collect();
            let failures = cfg.reps - ok.len();
            let h_mean = if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().map(|t| t.h).sum::<f64>() / ok.len() as f64
            };
            let theory_h = rule_is_data_free(rule).then(|| match rule {
                BandwidthRule::Fixed(h) => *h,
                BandwidthRule::Rate { a, eps, .. } => a * (n as f64).powf(-eps),
                _ => unreachable!(),
            });

            for (bi, band) in bands.iter().enumerate() {
                for (pi, &x) in cfg.eval_points.iter().enumerate() {
                    let inside = ok.iter().filter(|t| t.points[pi].inside[bi]).count();
                    let denom = ok.len().max(1) as f64;
                    let freq = inside as f64 / denom;
                    let (z_mean, z_var) = mean_var(ok.iter().map(|t| t.points[pi].z_at));
                    let theory = match (band.kind, theory_h) {
                        (BandKind::KsSimultaneous, Some(h)) => {
                            AsymptoticContext::new(density, kernel, x, band.constant)
                                .and_then(|ctx| ctx.inclusion_prob(n as u64, h))
                                .ok()
                        }
                        _ => None,
                    };
                    rows.push(StudyRow {
                        n,
                        rule: tag.clone(),
                        band: band_tag(band),
                        x: Some(x),
                        reps: cfg.reps,
                        failures,
                        freq,
                        mc_se: (freq * (1.0 - freq) / denom).sqrt(),
                        theory,
                        z_mean,
                        z_var,
                        h_mean,
                    });
                }
                if cfg.global {
                    let inside = ok.iter().filter(|t| t.global_inside[bi]).count();
                    let denom = ok.len().max(1) as f64;
                    let freq = inside as f64 / denom;
                    let (z_mean, z_var) = mean_var(
                        ok.iter()
                            .filter_map(|t| t.z_max)
                            .collect::<Vec<_>>()
                            .into_iter(),
                    );
                    rows.push(StudyRow {
                        n,
                        rule: tag.clone(),
                        band: band_tag(band),
                        x: None,
                        reps: cfg.reps,
                        failures,
                        freq,
                        mc_se: (freq * (1.0 - freq) / denom).sqrt(),
                        theory: None,
                        z_mean,
                        z_var,
                        h_mean,
                    });
                }
            }
        }
    }
    Ok(StudyResult {
        config: cfg.clone(),
        rows,
    })
}

fn rule_is_data_free(rule: &BandwidthRule) -> bool {
    matches!(
        rule,
        BandwidthRule::Fixed(_) | BandwidthRule::Rate { absolute: true, .. }
    )
}

/// Z_n(x) across replicates, one stream per replicate; the raw material
/// of the moment and normality diagnostics.
#[allow(clippy::too_many_arguments)]
pub fn collect_z_at_point(
    density: &TestDensity,
    kernel: Kernel,
    n: usize,
    h: f64,
    x: f64,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Vec<f64> {
    let density = *density;
    map_reps(reps, threads, |rep| {
        let mut rng = RngStream::new(seed, derive_stream("z-point", n, rep));
        let sample = density.sample(n, &mut rng).expect("n >= 1");
        let est = SmoothedEstimate::new(&sample, kernel, h).expect("positive h");
        est.z(x, Side::At)
    })
}

/// Kolmogorov–Smirnov distance between a sample and the standard normal.
pub fn ks_statistic_vs_std_normal(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let f = std_normal_cdf(v);
        d = d
            .max((f - i as f64 / m).abs())
            .max((f - (i as f64 + 1.0) / m).abs());
    }
    d
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalityReport {
    pub reps: usize,
    pub nh: f64,
    /// Set when nh < 10: the normalization is outside its regime.
    pub nh_warning: bool,
    /// KS distance of the standardized Z_n(x) replicates from N(0, 1).
    pub ks_stat: f64,
    /// √reps · ks_stat, compared against the level-0.01 quantile.
    pub scaled_stat: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Theory normalization √(V f(x) h) used for standardization.
    pub sd: f64,
    pub z_mean: f64,
}

/// Check that (Z_n(x) − mean)/√(V f(x) h) looks standard normal across
/// replicates, via a KS test at level 0.01.
#[allow(clippy::too_many_arguments)]
pub fn normality_diagnostic(
    density: &TestDensity,
    kernel: Kernel,
    n: usize,
    h: f64,
    x: f64,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<NormalityReport> {
    if reps < 100 {
        return Err(Error::InsufficientReplicates {
            needed: 100,
            got: reps,
        });
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let f = density.pdf(x);
    if f <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "degenerate normalization: f({x}) = 0"
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    let sd = (kernel.moments().v * f * h).sqrt();
    let density = *density;
    let zs = map_reps(reps, threads, |rep| {
        let mut rng = RngStream::new(seed, derive_stream("normality", n, rep));
        let sample = density.sample(n, &mut rng).expect("n >= 1");
        let est = SmoothedEstimate::new(&sample, kernel, h).expect("positive h");
        est.z(x, Side::At)
    });
    let z_mean = zs.iter().sum::<f64>() / reps as f64;
    let mut standardized: Vec<f64> = zs.iter().map(|z| (z - z_mean) / sd).collect();
    let ks_stat = ks_statistic_vs_std_normal(&mut standardized);
    let scaled = (reps as f64).sqrt() * ks_stat;
    let threshold = ks_quantile(0.99)?;
    Ok(NormalityReport {
        reps,
        nh: n as f64 * h,
        nh_warning: (n as f64) * h < 10.0,
        ks_stat,
        scaled_stat: scaled,
        threshold,
        pass: scaled < threshold,
        sd,
        z_mean,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub reps: usize,
    /// Pearson correlation of Z_n(x) and Z_n(y) across replicates.
    pub corr: f64,
    /// |x − y| >= 3h, the separation under which the white-noise claim applies.
    pub separated: bool,
    /// The |corr| <= 0.1 bound is asserted only for compact kernels;
    /// for the Gaussian it is reported without a verdict.
    pub asserted: bool,
    pub pass: Option<bool>,
    pub threshold: f64,
    /// Var(Z_n)/ (V f h) at each point; near 1 in the valid regime.
    pub var_ratio_x: f64,
    pub var_ratio_y: f64,
}

/// Estimate corr{Z_n(x), Z_n(y)} across replicates and compare with the
/// white-noise picture: for a compact kernel and |x − y| beyond the
/// smoothing range the correlation is O(h³).
#[allow(clippy::too_many_arguments)]
pub fn correlation_diagnostic(
    density: &TestDensity,
    kernel: Kernel,
    n: usize,
    h: f64,
    x: f64,
    y: f64,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CorrelationReport> {
    if reps < 500 {
        return Err(Error::InsufficientReplicates {
            needed: 500,
            got: reps,
        });
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    let density = *density;
    let pairs = map_reps(reps, threads, |rep| {
        let mut rng = RngStream::new(seed, derive_stream("correlation", n, rep));
        let sample = density.sample(n, &mut rng).expect("n >= 1");
        let est = SmoothedEstimate::new(&sample, kernel, h).expect("positive h");
        (est.z(x, Side::At), est.z(y, Side::At))
    });
    let m = reps as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
    for (zx, zy) in &pairs {
        vx += (zx - mx) * (zx - mx);
        vy += (zy - my) * (zy - my);
        cxy += (zx - mx) * (zy - my);
    }
    vx /= m - 1.0;
    vy /= m - 1.0;
    cxy /= m - 1.0;
    let corr = if x == y { 1.0 } else { cxy / (vx * vy).sqrt() };
    let v = kernel.moments().v;
    let separated = (x - y).abs() >= 3.0 * h;
    let asserted = kernel.support_radius().is_finite() && separated;
    Ok(CorrelationReport {
        reps,
        corr,
        separated,
        asserted,
        pass: asserted.then(|| corr.abs() <= 0.1),
        threshold: 0.1,
        var_ratio_x: vx / (v * density.pdf(x) * h),
        var_ratio_y: vy / (v * density.pdf(y) * h),
    })
}
