//! Confidence bands around the empirical CDF, the Kolmogorov–Smirnov
//! quantile, membership tests for the smoothed estimator, and the
//! bias-corrected band built from F̂_{h1} and f̂'_{h2}.

use crate::error::{Error, Result};
use crate::estimators::{Sample, Side, SmoothedEstimate};
use crate::kernels::Kernel;
use crate::normal::std_normal_quantile;

/// Asymptotic Kolmogorov distribution Q(x) = 1 − 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²x²).
/// The series is truncated once a term falls below 1e−14.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200u32 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += sign * term;
        if term < 1e-14 {
            break;
        }
        sign = -sign;
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Quantile of the asymptotic Kolmogorov distribution, by bisection to 1e−8.
pub fn ks_quantile(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let (mut lo, mut hi) = (1e-8, 8.0);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    /// F_n(x) ± c_n/√n with c_n the Kolmogorov quantile.
    KsSimultaneous,
    /// F_n(x) ± d_n √(F_n(1−F_n))/√n, pointwise normal-approximation level.
    PointwiseNormal,
    /// Same shape with the simultaneous constant, valid between the 0.05
    /// and 0.95 quantiles (taken from the sample).
    GlobalNormal,
    /// F̂_{h1} − ½k₂h₁²f̂'_{h2} ± c √(F̂_{h1}(1−F̂_{h1}))/√n covering F itself.
    BiasCorrected,
}

impl BandKind {
    pub fn name(&self) -> &'static str {
        match self {
            BandKind::KsSimultaneous => "ks",
            BandKind::PointwiseNormal => "pointwise",
            BandKind::GlobalNormal => "global",
            BandKind::BiasCorrected => "corrected",
        }
    }
}

/// The simultaneous constants for the √(F(1−F))-shaped band are known at
/// the two standard levels only.
fn global_normal_constant(level: f64) -> Result<f64> {
    if (level - 0.90).abs() < 1e-9 {
        Ok(2.89)
    } else if (level - 0.95).abs() < 1e-9 {
        Ok(3.15)
    } else {
        Err(Error::InvalidParameter(format!(
            "simultaneous normal-band constant is tabulated for levels 0.90 and 0.95 only, got {level}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub kind: BandKind,
    pub level: f64,
    /// Critical constant c_n or d_n matching `kind` and `level`.
    pub constant: f64,
    /// Bandwidths of the bias-corrected band; unused otherwise.
    pub h1: Option<f64>,
    pub h2: Option<f64>,
}

impl BandSpec {
    pub fn ks_simultaneous(level: f64) -> Result<Self> {
        Ok(BandSpec {
            kind: BandKind::KsSimultaneous,
            level,
            constant: ks_quantile(level)?,
            h1: None,
            h2: None,
        })
    }

    pub fn pointwise_normal(level: f64) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence level must lie in (0, 1), got {level}"
            )));
        }
        Ok(BandSpec {
            kind: BandKind::PointwiseNormal,
            level,
            constant: std_normal_quantile(0.5 * (1.0 + level)),
            h1: None,
            h2: None,
        })
    }

    pub fn global_normal(level: f64) -> Result<Self> {
        Ok(BandSpec {
            kind: BandKind::GlobalNormal,
            level,
            constant: global_normal_constant(level)?,
            h1: None,
            h2: None,
        })
    }

    /// The corrected band has the same √(F(1−F)) shape as the global
    /// normal band, so it uses the same simultaneous constant.
    pub fn bias_corrected(level: f64, h1: f64, h2: f64) -> Result<Self> {
        if !(h1 > 0.0 && h2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "corrected band requires positive bandwidths, got h1={h1}, h2={h2}"
            )));
        }
        Ok(BandSpec {
            kind: BandKind::BiasCorrected,
            level,
            constant: global_normal_constant(level)?,
            h1: Some(h1),
            h2: Some(h2),
        })
    }

    /// Same band family with an explicit critical constant.
    pub fn with_constant(kind: BandKind, level: f64, constant: f64) -> Result<Self> {
        if !(constant > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "critical constant must be positive, got {constant}"
            )));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence level must lie in (0, 1), got {level}"
            )));
        }
        Ok(BandSpec {
            kind,
            level,
            constant,
            h1: None,
            h2: None,
        })
    }
}

/// A band cross-section, clipped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandInterval {
    pub lo: f64,
    pub hi: f64,
}

impl BandInterval {
    fn around(center: f64, half_width: f64) -> Self {
        BandInterval {
            lo: (center - half_width).clamp(0.0, 1.0),
            hi: (center + half_width).clamp(0.0, 1.0),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

/// The band around F_n at x. Only the empirical-CDF bands are defined
/// here; the bias-corrected band needs a kernel and lives in
/// [`corrected_band_at`].
pub fn band_at(spec: &BandSpec, s: &Sample, x: f64, side: Side) -> Result<BandInterval> {
    let n = s.n() as f64;
    let fn_x = s.ecdf(x, side);
    match spec.kind {
        BandKind::KsSimultaneous => Ok(BandInterval::around(fn_x, spec.constant / n.sqrt())),
        BandKind::PointwiseNormal | BandKind::GlobalNormal => Ok(BandInterval::around(
            fn_x,
            spec.constant * (fn_x * (1.0 - fn_x)).max(0.0).sqrt() / n.sqrt(),
        )),
        BandKind::BiasCorrected => Err(Error::InvalidParameter(
            "bias-corrected band is centered on the smoothed estimator; use corrected_band_at"
                .into(),
        )),
    }
}

/// Evaluation set for membership tests.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalPoints {
    Points(Vec<f64>),
    /// The 2n jump candidates X_i and X_i−.
    AllJumps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCheck {
    pub x: f64,
    pub side: Side,
    pub fhat: f64,
    pub band: BandInterval,
    pub inside: bool,
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub all_inside: bool,
    pub first_violation: Option<(f64, Side)>,
    pub checks: Vec<PointCheck>,
}

/// Does F̂_h stay inside the band at the requested points?
///
/// For the KS band with [`EvalPoints::AllJumps`] this is exact: the
/// maximum discrepancy is attained at a jump candidate. The normal-shaped
/// bands vary between jumps, so explicit points are augmented with every
/// jump candidate inside their range; the global band is additionally
/// restricted to the sample's [0.05, 0.95] quantile range.
pub fn membership(
    spec: &BandSpec,
    s: &Sample,
    e: &SmoothedEstimate,
    points: &EvalPoints,
) -> Result<MembershipReport> {
    if spec.kind == BandKind::BiasCorrected {
        return Err(Error::InvalidParameter(
            "membership is a test of F̂_h against bands around F_n; the corrected band covers F"
                .into(),
        ));
    }
    let mut xs: Vec<f64> = match points {
        EvalPoints::Points(p) => {
            if p.is_empty() {
                return Err(Error::InvalidParameter(
                    "membership requires a nonempty evaluation set".into(),
                ));
            }
            let mut xs = p.clone();
            match spec.kind {
                BandKind::KsSimultaneous => {}
                _ => {
                    let (lo, hi) = xs
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                            (l.min(v), h.max(v))
                        });
                    xs.extend(s.values().iter().copied().filter(|v| *v >= lo && *v <= hi));
                }
            }
            xs.sort_unstable_by(f64::total_cmp);
            xs.dedup();
            xs
        }
        EvalPoints::AllJumps => {
            let mut xs = s.values().to_vec();
            xs.dedup();
            xs
        }
    };
    if spec.kind == BandKind::GlobalNormal {
        let (qlo, qhi) = (s.quantile(0.05), s.quantile(0.95));
        xs.retain(|&x| x >= qlo && x <= qhi);
        if xs.is_empty() {
            return Err(Error::InvalidParameter(
                "no evaluation points inside the [0.05, 0.95] quantile range".into(),
            ));
        }
    }

    let fhats = e.cdf_at_sorted(&xs);
    let mut checks = Vec::with_capacity(2 * xs.len());
    let mut all_inside = true;
    let mut first_violation = None;
    for (&x, &fhat) in xs.iter().zip(&fhats) {
        for side in [Side::At, Side::Left] {
            let band = band_at(spec, s, x, side)?;
            let inside = band.contains(fhat);
            if !inside && first_violation.is_none() {
                first_violation = Some((x, side));
            }
            all_inside &= inside;
            checks.push(PointCheck {
                x,
                side,
                fhat,
                band,
                inside,
            });
        }
    }
    Ok(MembershipReport {
        all_inside,
        first_violation,
        checks,
    })
}

/// Allocation-free global membership check, for hot Monte Carlo loops.
pub fn contains_globally(spec: &BandSpec, s: &Sample, e: &SmoothedEstimate) -> Result<bool> {
    match spec.kind {
        BandKind::KsSimultaneous => Ok(!e.z_exceeds(spec.constant)),
        BandKind::PointwiseNormal | BandKind::GlobalNormal => {
            Ok(membership(spec, s, e, &EvalPoints::AllJumps)?.all_inside)
        }
        BandKind::BiasCorrected => Err(Error::InvalidParameter(
            "membership is a test of F̂_h against bands around F_n; the corrected band covers F"
                .into(),
        )),
    }
}

/// Membership of F̂_h at a single point, both sides of F_n.
pub fn membership_at(spec: &BandSpec, s: &Sample, e: &SmoothedEstimate, x: f64) -> Result<bool> {
    let fhat = e.cdf(x);
    Ok(band_at(spec, s, x, Side::At)?.contains(fhat)
        && band_at(spec, s, x, Side::Left)?.contains(fhat))
}

/// Center and interval of the bias-corrected band at x:
/// F̂_{h1}(x) − ½ k₂ h₁² f̂'_{h2}(x) ± c √(F̂_{h1}(1−F̂_{h1}))/√n.
pub fn corrected_band_at(
    spec: &BandSpec,
    s: &Sample,
    kernel: Kernel,
    x: f64,
) -> Result<(f64, BandInterval)> {
    if spec.kind != BandKind::BiasCorrected {
        return Err(Error::InvalidParameter(format!(
            "corrected_band_at requires a bias-corrected spec, got {}",
            spec.kind.name()
        )));
    }
    let (h1, h2) = match (spec.h1, spec.h2) {
        (Some(h1), Some(h2)) => (h1, h2),
        _ => {
            return Err(Error::InvalidParameter(
                "bias-corrected spec is missing its h1/h2 bandwidths".into(),
            ))
        }
    };
    let smooth = SmoothedEstimate::new(s, kernel, h1)?;
    let deriv_est = SmoothedEstimate::new(s, kernel, h2)?;
    let fh = smooth.cdf(x);
    let k2 = kernel.moments().k2;
    let center = fh - 0.5 * k2 * h1 * h1 * deriv_est.pdf_deriv(x);
    let half = spec.constant * (fh * (1.0 - fh)).max(0.0).sqrt() / (s.n() as f64).sqrt();
    Ok((center, BandInterval::around(center, half)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn kolmogorov_cdf_reference_values() {
        // Reference values from an independent series evaluation.
        for (x, q) in [
            (0.5, 0.036054756335),
            (1.0, 0.730000328323),
            (1.2238478702, 0.899999999992),
            (1.3580986393, 0.949999999994),
            (2.0, 0.999329074744),
        ] {
            assert!((kolmogorov_cdf(x) - q).abs() < 1e-9, "Q({x})");
        }
        assert_eq!(kolmogorov_cdf(-1.0), 0.0);
        assert_eq!(kolmogorov_cdf(0.0), 0.0);
    }

    #[test]
    fn ks_quantile_paper_values() {
        assert!((ks_quantile(0.90).unwrap() - 1.224).abs() < 1e-3);
        assert!((ks_quantile(0.95).unwrap() - 1.358).abs() < 1e-3);
        for p in [0.5, 0.99] {
            let c = ks_quantile(p).unwrap();
            assert!((kolmogorov_cdf(c) - p).abs() < 1e-7, "round trip at {p}");
        }
        assert!(ks_quantile(0.0).is_err());
        assert!(ks_quantile(1.0).is_err());
    }

    #[test]
    fn band_constants() {
        assert!((BandSpec::pointwise_normal(0.90).unwrap().constant - 1.645).abs() < 1e-3);
        assert!((BandSpec::pointwise_normal(0.95).unwrap().constant - 1.96).abs() < 1e-3);
        assert_eq!(BandSpec::global_normal(0.90).unwrap().constant, 2.89);
        assert_eq!(BandSpec::global_normal(0.95).unwrap().constant, 3.15);
        assert!(BandSpec::global_normal(0.80).is_err());
    }

    fn uniform_grid_sample(n: usize) -> Sample {
        Sample::new((0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()).unwrap()
    }

    #[test]
    fn band_at_examples() {
        // n = 100, F_n(x) = 0.5.
        let s = uniform_grid_sample(100);
        let x = s.quantile(0.5);
        assert_eq!(s.ecdf(x, Side::At), 0.5);

        let ks = BandSpec::ks_simultaneous(0.95).unwrap();
        let b = band_at(&ks, &s, x, Side::At).unwrap();
        assert!((b.lo - (0.5 - 0.1358)).abs() < 2e-4);
        assert!((b.hi - (0.5 + 0.1358)).abs() < 2e-4);

        let g = BandSpec::global_normal(0.90).unwrap();
        let b = band_at(&g, &s, x, Side::At).unwrap();
        assert!((b.lo - 0.3555).abs() < 1e-4);
        assert!((b.hi - 0.6445).abs() < 1e-4);

        let p = BandSpec::pointwise_normal(0.95).unwrap();
        let b = band_at(&p, &s, -5.0, Side::At).unwrap();
        assert_eq!((b.lo, b.hi), (0.0, 0.0));

        let c = BandSpec::bias_corrected(0.90, 0.1, 0.2).unwrap();
        assert!(band_at(&c, &s, x, Side::At).is_err());
    }

    #[test]
    fn band_widths_and_nesting() {
        let s = uniform_grid_sample(50);
        let ks = BandSpec::ks_simultaneous(0.90).unwrap();
        let w = 2.0 * ks.constant / (50.0f64).sqrt();
        for &x in &[0.11, 0.52, 0.93] {
            let b = band_at(&ks, &s, x, Side::At).unwrap();
            if b.lo > 0.0 && b.hi < 1.0 {
                assert!((b.hi - b.lo - w).abs() < 1e-12);
            }
        }
        for make in [BandSpec::ks_simultaneous, BandSpec::pointwise_normal] {
            let narrow = make(0.90).unwrap();
            let wide = make(0.95).unwrap();
            for &x in &[0.1, 0.5, 0.9] {
                let a = band_at(&narrow, &s, x, Side::At).unwrap();
                let b = band_at(&wide, &s, x, Side::At).unwrap();
                assert!(b.lo <= a.lo && b.hi >= a.hi, "nesting at {x}");
            }
        }
    }

    #[test]
    fn membership_flips_at_the_exact_threshold() {
        let vals: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let s = Sample::new(vals).unwrap();
        let e = SmoothedEstimate::new(&s, Kernel::Gaussian, 0.5).unwrap();
        let (zmax, argmax) = e.z_max_abs();
        let above = BandSpec::with_constant(BandKind::KsSimultaneous, 0.95, zmax + 1e-9).unwrap();
        let below = BandSpec::with_constant(BandKind::KsSimultaneous, 0.95, zmax - 1e-9).unwrap();
        let rep = membership(&above, &s, &e, &EvalPoints::AllJumps).unwrap();
        assert!(rep.all_inside);
        let rep = membership(&below, &s, &e, &EvalPoints::AllJumps).unwrap();
        assert!(!rep.all_inside);
        assert_eq!(rep.first_violation.map(|(x, _)| x), Some(argmax));
        assert!(contains_globally(&above, &s, &e).unwrap());
        assert!(!contains_globally(&below, &s, &e).unwrap());
    }

    #[test]
    fn membership_single_point_example() {
        // n = 1 with any h: |Z| = 1/2 < 1.358.
        let s = Sample::new(vec![0.0]).unwrap();
        let e = SmoothedEstimate::new(&s, Kernel::Gaussian, 0.7).unwrap();
        let spec = BandSpec::ks_simultaneous(0.95).unwrap();
        assert!(
            membership(&spec, &s, &e, &EvalPoints::AllJumps)
                .unwrap()
                .all_inside
        );
        assert!(membership_at(&spec, &s, &e, 0.0).unwrap());
    }

    #[test]
    fn membership_rejects_empty_points() {
        let s = Sample::new(vec![0.0, 1.0]).unwrap();
        let e = SmoothedEstimate::new(&s, Kernel::Gaussian, 0.5).unwrap();
        let spec = BandSpec::ks_simultaneous(0.95).unwrap();
        assert!(membership(&spec, &s, &e, &EvalPoints::Points(vec![])).is_err());
    }

    #[test]
    fn ks_membership_agrees_with_z_max_sign() {
        let mut rng = RngStream::new(3, 1);
        for _ in 0..10 {
            let vals: Vec<f64> = (0..30)
                .map(|_| crate::normal::std_normal_quantile(rng.next_open01()))
                .collect();
            let s = Sample::new(vals).unwrap();
            let h = 0.05 + rng.next_open01();
            let e = SmoothedEstimate::new(&s, Kernel::Epanechnikov, h).unwrap();
            let spec = BandSpec::ks_simultaneous(0.95).unwrap();
            let rep = membership(&spec, &s, &e, &EvalPoints::AllJumps).unwrap();
            let (zmax, _) = e.z_max_abs();
            assert_eq!(rep.all_inside, zmax <= spec.constant);
        }
    }

    #[test]
    fn corrected_band_basics() {
        let s = Sample::new(vec![-1.0, 1.0]).unwrap();
        let spec = BandSpec::bias_corrected(0.90, 0.3, 0.5).unwrap();

        // Far below the data every term vanishes.
        let (center, band) = corrected_band_at(&spec, &s, Kernel::Gaussian, -50.0).unwrap();
        assert!(center.abs() < 1e-12);
        assert_eq!((band.lo, band.hi), (0.0, 0.0));

        // At the symmetry point f̂'_{h2} = 0, so the center reduces to F̂_{h1}.
        let e1 = SmoothedEstimate::new(&s, Kernel::Gaussian, 0.3).unwrap();
        let (center, _) = corrected_band_at(&spec, &s, Kernel::Gaussian, 0.0).unwrap();
        assert!((center - e1.cdf(0.0)).abs() < 1e-14);

        let ks = BandSpec::ks_simultaneous(0.95).unwrap();
        assert!(corrected_band_at(&ks, &s, Kernel::Gaussian, 0.0).is_err());
        assert!(BandSpec::bias_corrected(0.90, 0.0, 0.5).is_err());
    }
}
