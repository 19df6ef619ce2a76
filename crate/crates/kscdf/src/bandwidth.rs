//! Bandwidth rules: fixed values, rate rules a·n^{−ε}, the maximum
//! smoothing bandwidth ĥ = sup{h > 0 : max_x |Z_n(x)| < c_n}, the
//! normal-based quick rule, and least-squares cross-validation with and
//! without the ĥ constraint.

use std::fmt;
use std::str::FromStr;

use crate::bands::ks_quantile;
use crate::densities::parse_kv;
use crate::error::{Error, Result};
use crate::estimators::{Sample, SmoothedEstimate};
use crate::kernels::Kernel;
use crate::normal::std_normal_pdf;

/// Grid and tolerance constants of the ĥ search. The sign of
/// c_n − max|Z_n| is scanned on a descending geometric grid over
/// [1e−6·sd, 10·sd] with ratio 0.97; the largest sign change is then
/// bisected to relative width 1e−6 and the admissible end is returned.
const H_SEARCH_TOP: f64 = 10.0;
const H_SEARCH_BOTTOM: f64 = 1e-6;
const H_SEARCH_RATIO: f64 = 0.97;
const H_SEARCH_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    Fixed(f64),
    /// h = a·n^{−eps}, with `a` a multiple of the sample standard
    /// deviation unless `absolute` is set.
    Rate {
        a: f64,
        eps: f64,
        absolute: bool,
    },
    Quick {
        level: f64,
    },
    MaxSmooth {
        level: f64,
    },
    ConstrainedCv {
        level: f64,
    },
}

impl BandwidthRule {
    /// Resolve the rule to a bandwidth for this sample and kernel.
    pub fn resolve(&self, s: &Sample, kernel: Kernel) -> Result<f64> {
        match *self {
            BandwidthRule::Fixed(h) => {
                if h > 0.0 && h.is_finite() {
                    Ok(h)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "fixed bandwidth must be positive, got {h}"
                    )))
                }
            }
            BandwidthRule::Rate { a, eps, absolute } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "rate coefficient must be positive, got {a}"
                    )));
                }
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "rate exponent must lie in (0, 1), got {eps}"
                    )));
                }
                let scale = if absolute {
                    1.0
                } else {
                    if s.sd() == 0.0 {
                        return Err(Error::DegenerateSample(
                            "sd-scaled rate rule on a zero-variance sample".into(),
                        ));
                    }
                    s.sd()
                };
                Ok(a * scale * (s.n() as f64).powf(-eps))
            }
            BandwidthRule::Quick { level } => quick_rule_bandwidth(s, kernel, level),
            BandwidthRule::MaxSmooth { level } => Ok(max_smoothing_bandwidth(s, kernel, level)?.0),
            BandwidthRule::ConstrainedCv { level } => constrained_cv_bandwidth(s, kernel, level),
        }
    }
}

impl fmt::Display for BandwidthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BandwidthRule::Fixed(h) => write!(f, "fixed:{h}"),
            BandwidthRule::Rate { a, eps, absolute } => {
                write!(f, "rate:a={a},eps={eps}")?;
                if absolute {
                    write!(f, ",abs")?;
                }
                Ok(())
            }
            BandwidthRule::Quick { level } => write!(f, "quick:{level}"),
            BandwidthRule::MaxSmooth { level } => write!(f, "maxsmooth:{level}"),
            BandwidthRule::ConstrainedCv { level } => write!(f, "ccv:{level}"),
        }
    }
}

impl FromStr for BandwidthRule {
    type Err = Error;

    /// Syntax: `fixed:0.3`, `rate:a=1.059,eps=0.2[,abs]`, `quick:0.95`,
    /// `maxsmooth:0.90`, `ccv:0.90`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bandwidth rule '{s}' is missing ':'")))?;
        let level = || -> Result<f64> {
            rest.parse()
                .map_err(|_| Error::Parse(format!("invalid level '{rest}' in rule '{s}'")))
        };
        match head {
            "fixed" => Ok(BandwidthRule::Fixed(rest.parse().map_err(|_| {
                Error::Parse(format!("invalid bandwidth '{rest}' in rule '{s}'"))
            })?)),
            "rate" => {
                let absolute = rest.split(',').any(|p| p == "abs");
                let kv: String = rest
                    .split(',')
                    .filter(|p| *p != "abs")
                    .collect::<Vec<_>>()
                    .join(",");
                let fields = parse_kv(&kv)?;
                let get = |key: &str| -> Result<f64> {
                    fields
                        .iter()
                        .find(|(k, _)| k == key)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| Error::Parse(format!("rule '{s}' is missing '{key}'")))
                };
                Ok(BandwidthRule::Rate {
                    a: get("a")?,
                    eps: get("eps")?,
                    absolute,
                })
            }
            "quick" => Ok(BandwidthRule::Quick { level: level()? }),
            "maxsmooth" => Ok(BandwidthRule::MaxSmooth { level: level()? }),
            "ccv" => Ok(BandwidthRule::ConstrainedCv { level: level()? }),
            other => Err(Error::Parse(format!(
                "unknown bandwidth rule '{other}' (expected fixed, rate, quick, maxsmooth, or ccv)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaxSmoothDiagnostics {
    /// Critical constant c_n used for admissibility.
    pub c: f64,
    /// Searched range [lo, hi].
    pub grid_lo: f64,
    pub grid_hi: f64,
    /// Every admissibility sign change found on the grid, largest first,
    /// as (admissible_h, inadmissible_h) pairs. max|Z_n| need not be
    /// monotone in h, so there can be several; ĥ is taken from the first.
    pub brackets: Vec<(f64, f64)>,
    /// Whether the top of the searched range was already admissible.
    pub top_admissible: bool,
    /// Number of max|Z_n| sign queries made.
    pub sign_evals: usize,
}

/// The maximum smoothing bandwidth ĥ: the largest h in the searched range
/// with max_x |Z_n(x)| < c_n. The returned value sits on the admissible
/// side of the final bisection bracket, so the band constraint holds at
/// ĥ itself.
pub fn max_smoothing_bandwidth(
    s: &Sample,
    kernel: Kernel,
    level: f64,
) -> Result<(f64, MaxSmoothDiagnostics)> {
    let c = ks_quantile(level)?;
    if s.sd() == 0.0 {
        return Err(Error::DegenerateSample(
            "maximum smoothing bandwidth of a zero-variance sample".into(),
        ));
    }
    let hi = H_SEARCH_TOP * s.sd();
    let lo = H_SEARCH_BOTTOM * s.sd();
    let mut evals = 0usize;
    let mut admissible = |h: f64| -> bool {
        evals += 1;
        let e = SmoothedEstimate::new(s, kernel, h).expect("positive h");
        !e.z_exceeds(c)
    };

    let mut brackets: Vec<(f64, f64)> = Vec::new();
    let mut h = hi;
    let top_admissible = admissible(h);
    let mut prev = Some((h, top_admissible));
    while h > lo {
        h *= H_SEARCH_RATIO;
        let a = admissible(h);
        if let Some((ph, pa)) = prev {
            if a && !pa {
                brackets.push((h, ph));
            }
        }
        prev = Some((h, a));
    }

    let (hhat, mut diag_brackets) = if top_admissible {
        (hi, brackets.clone())
    } else if let Some(&(mut blo, mut bhi)) = brackets.first() {
        while bhi - blo > H_SEARCH_REL_TOL * blo {
            let mid = 0.5 * (blo + bhi);
            if admissible(mid) {
                blo = mid;
            } else {
                bhi = mid;
            }
        }
        let mut refined = brackets.clone();
        refined[0] = (blo, bhi);
        (blo, refined)
    } else {
        return Err(Error::NoAdmissibleBandwidth { lo, hi });
    };
    let diag = MaxSmoothDiagnostics {
        c,
        grid_lo: lo,
        grid_hi: hi,
        brackets: std::mem::take(&mut diag_brackets),
        top_admissible,
        sign_evals: evals,
    };
    Ok((hhat, diag))
}

/// Normal-based quick rule √(2c/k₂)·φ(1)^{−1/2}·σ̂·n^{−1/4}, with c the
/// Kolmogorov quantile at `level` and σ̂ the sample standard deviation.
pub fn quick_rule_bandwidth(s: &Sample, kernel: Kernel, level: f64) -> Result<f64> {
    let c = ks_quantile(level)?;
    if s.n() < 2 {
        return Err(Error::InvalidParameter(
            "quick rule needs at least two observations".into(),
        ));
    }
    if s.sd() == 0.0 {
        return Err(Error::DegenerateSample(
            "quick rule on a zero-variance sample".into(),
        ));
    }
    let k2 = kernel.moments().k2;
    Ok((2.0 * c / k2).sqrt() / std_normal_pdf(1.0).sqrt() * s.sd() * (s.n() as f64).powf(-0.25))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPoint {
    pub h: f64,
    pub cv: f64,
}

/// Least-squares cross-validation criterion over an explicit grid:
/// CV(h) = ∫f̂_h² − (2/n) Σ_i f̂_{h,−i}(X_i). The ∫f̂² term uses the exact
/// pairwise self-convolution identity. Ties in the minimum break toward
/// the smallest h.
pub fn lscv_bandwidth(s: &Sample, kernel: Kernel, grid: &[f64]) -> Result<(f64, Vec<CvPoint>)> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(
            "empty cross-validation grid".into(),
        ));
    }
    if s.n() < 3 {
        return Err(Error::InvalidParameter(
            "cross-validation needs at least three observations".into(),
        ));
    }
    if s.sd() == 0.0 {
        return Err(Error::DegenerateSample(
            "cross-validation on a sample of identical values".into(),
        ));
    }
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted.dedup();
    if let Some(bad) = sorted.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "cross-validation grid contains non-positive bandwidth {bad}"
        )));
    }
    let curve: Vec<CvPoint> = sorted
        .iter()
        .map(|&h| CvPoint {
            h,
            cv: lscv_score(s, kernel, h),
        })
        .collect();
    let best = curve
        .iter()
        .fold(None::<CvPoint>, |acc, p| match acc {
            Some(b) if b.cv <= p.cv => Some(b),
            _ => Some(*p),
        })
        .unwrap();
    Ok((best.h, curve))
}

fn lscv_score(s: &Sample, kernel: Kernel, h: f64) -> f64 {
    let vals = s.values();
    let n = vals.len() as f64;
    let conv_r = kernel.self_convolution_radius() * h;
    let pdf_r = kernel.window_radius() * h;
    let scan_r = conv_r.max(pdf_r);
    let mut conv_sum = 0.0;
    let mut pdf_sum = 0.0;
    for i in 0..vals.len() {
        for j in (i + 1)..vals.len() {
            let gap = vals[j] - vals[i];
            if gap >= scan_r {
                break;
            }
            if gap < conv_r {
                conv_sum += kernel.self_convolution(gap / h);
            }
            if gap < pdf_r {
                pdf_sum += kernel.pdf(gap / h);
            }
        }
    }
    let integral_sq = (n * kernel.self_convolution(0.0) + 2.0 * conv_sum) / (n * n * h);
    let loo = 2.0 * pdf_sum / ((n - 1.0) * h);
    integral_sq - 2.0 / n * loo
}

/// Default geometric grid for cross-validation: 60 points spanning
/// [0.05·σ̂·n^{−1/5}, 3·σ̂].
pub fn default_cv_grid(s: &Sample) -> Vec<f64> {
    let lo = 0.05 * s.sd() * (s.n() as f64).powf(-0.2);
    let hi = 3.0 * s.sd();
    let count = 60;
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Cross-validation constrained to bandwidths that keep F̂_h inside the
/// level-`level` KS band: the default grid is cut at ĥ (which is appended
/// as a candidate), every surviving candidate is checked for band
/// admissibility, and LSCV picks among the rest. The result therefore
/// satisfies the global band constraint by construction.
pub fn constrained_cv_bandwidth(s: &Sample, kernel: Kernel, level: f64) -> Result<f64> {
    let (hhat, diag) = max_smoothing_bandwidth(s, kernel, level)?;
    let mut grid: Vec<f64> = default_cv_grid(s)
        .into_iter()
        .filter(|&h| h < hhat)
        .collect();
    grid.push(hhat);
    grid.retain(|&h| {
        let e = SmoothedEstimate::new(s, kernel, h).expect("positive h");
        !e.z_exceeds(diag.c)
    });
    let (h, _) = lscv_bandwidth(s, kernel, &grid)?;
    Ok(h)
}
