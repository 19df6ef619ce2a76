//! Interactive browser demo, compiled to WebAssembly. Three operations,
//! each taking and returning JSON strings so the page stays a single
//! static file with no framework:
//!
//! - [`band_explore`]: draw a sample, smooth it at a chosen bandwidth,
//!   and report the band, the smoothed CDF, and whether it escapes.
//! - [`bandwidth_report`]: every bandwidth rule on one sample, with the
//!   cross-validation curve and the ĥ search diagnostics.
//! - [`inclusion_curve`]: the normal approximation to the inclusion
//!   probability as n grows, for a rate rule a·n^{-eps}.
//!
//! Errors come back as `{"error": "..."}` rather than exceptions.

use serde::Deserialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use kscdf::{
    constrained_cv_bandwidth, contains_globally, default_cv_grid, ks_quantile, lscv_bandwidth,
    max_smoothing_bandwidth, quick_rule_bandwidth, simulation::parse_band, AsymptoticContext,
    BandKind, Kernel, RngStream, Side, SmoothedEstimate, TestDensity,
};

const MAX_N: usize = 20_000;

fn fail(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

#[derive(Deserialize)]
struct ExploreReq {
    density: String,
    kernel: String,
    n: usize,
    seed: u64,
    /// Bandwidth; defaults to the normal rule of thumb 1.059 σ̂ n^{-1/5}.
    h: Option<f64>,
    level: f64,
    /// ks | pointwise | global.
    band: String,
    grid_points: Option<usize>,
}

/// Sample, smooth, and test band membership; returns every curve the
/// page draws.
#[wasm_bindgen]
pub fn band_explore(config: &str) -> String {
    match explore_impl(config) {
        Ok(s) => s,
        Err(e) => fail(e),
    }
}

fn explore_impl(config: &str) -> Result<String, String> {
    let req: ExploreReq = serde_json::from_str(config).map_err(|e| e.to_string())?;
    if req.n == 0 || req.n > MAX_N {
        return Err(format!("n must lie in 1..={MAX_N}"));
    }
    let density: TestDensity = req.density.parse().map_err(|e| format!("{e}"))?;
    let kernel = Kernel::from_name(&req.kernel).map_err(|e| format!("{e}"))?;
    let spec = parse_band(&format!("{}:{}", req.band, req.level)).map_err(|e| format!("{e}"))?;

    let mut rng = RngStream::new(req.seed, 0);
    let sample = density
        .sample(req.n, &mut rng)
        .map_err(|e| format!("{e}"))?;
    let h = match req.h {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(format!("h must be positive, got {h}")),
        None => 1.059 * sample.sd() * (req.n as f64).powf(-0.2),
    };
    let est = SmoothedEstimate::new(&sample, kernel, h).map_err(|e| format!("{e}"))?;

    let count = req.grid_points.unwrap_or(301).clamp(2, 2_000);
    let pad = 0.6 * sample.sd() + 2.0 * h;
    let (lo, hi) = (sample.min() - pad, sample.max() + pad);
    let xs: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();

    let mut f_hat = Vec::with_capacity(count);
    let mut cdf_hat = Vec::with_capacity(count);
    let mut f_n = Vec::with_capacity(count);
    let mut band_lo = Vec::with_capacity(count);
    let mut band_hi = Vec::with_capacity(count);
    let mut true_pdf = Vec::with_capacity(count);
    let mut true_cdf = Vec::with_capacity(count);
    for &x in &xs {
        f_hat.push(est.pdf(x));
        cdf_hat.push(est.cdf(x));
        f_n.push(sample.ecdf(x, Side::At));
        let b = kscdf::band_at(&spec, &sample, x, Side::At).map_err(|e| format!("{e}"))?;
        band_lo.push(b.lo);
        band_hi.push(b.hi);
        true_pdf.push(density.pdf(x));
        true_cdf.push(density.cdf(x));
    }

    let (z_max, z_argmax) = est.z_max_abs();
    let inside = contains_globally(&spec, &sample, &est).map_err(|e| format!("{e}"))?;
    let (h_hat, _) =
        max_smoothing_bandwidth(&sample, kernel, req.level).map_err(|e| format!("{e}"))?;
    let h_quick = quick_rule_bandwidth(&sample, kernel, req.level).map_err(|e| format!("{e}"))?;
    let (range_lo, range_hi) = if spec.kind == BandKind::GlobalNormal {
        (Some(sample.quantile(0.05)), Some(sample.quantile(0.95)))
    } else {
        (None, None)
    };

    let (jumps, jump_f): (Vec<f64>, Vec<f64>) = if req.n <= 400 {
        let mut xs = sample.values().to_vec();
        xs.dedup();
        let fs = xs.iter().map(|&v| sample.ecdf(v, Side::At)).collect();
        (xs, fs)
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(json!({
        "n": req.n,
        "h": h,
        "h_hat": h_hat,
        "h_quick": h_quick,
        "h_thumb": 1.059 * sample.sd() * (req.n as f64).powf(-0.2),
        "sd": sample.sd(),
        "c": spec.constant,
        "z_max": z_max,
        "z_argmax": z_argmax,
        "inside": inside,
        "range_lo": range_lo,
        "range_hi": range_hi,
        "xs": xs,
        "f_hat": f_hat,
        "F_hat": cdf_hat,
        "F_n": f_n,
        "band_lo": band_lo,
        "band_hi": band_hi,
        "true_pdf": true_pdf,
        "true_cdf": true_cdf,
        "jumps": jumps,
        "jump_F": jump_f,
    })
    .to_string())
}

#[derive(Deserialize)]
struct BandwidthReq {
    density: String,
    kernel: String,
    n: usize,
    seed: u64,
    level: f64,
}

/// Every bandwidth rule on one sample: ĥ with its brackets, the quick
/// rule, LSCV, constrained CV, and the CV curve.
#[wasm_bindgen]
pub fn bandwidth_report(config: &str) -> String {
    match bandwidth_impl(config) {
        Ok(s) => s,
        Err(e) => fail(e),
    }
}

fn bandwidth_impl(config: &str) -> Result<String, String> {
    let req: BandwidthReq = serde_json::from_str(config).map_err(|e| e.to_string())?;
    if req.n < 3 || req.n > MAX_N {
        return Err(format!("n must lie in 3..={MAX_N}"));
    }
    let density: TestDensity = req.density.parse().map_err(|e| format!("{e}"))?;
    let kernel = Kernel::from_name(&req.kernel).map_err(|e| format!("{e}"))?;
    let mut rng = RngStream::new(req.seed, 0);
    let sample = density
        .sample(req.n, &mut rng)
        .map_err(|e| format!("{e}"))?;

    let (h_hat, diag) =
        max_smoothing_bandwidth(&sample, kernel, req.level).map_err(|e| format!("{e}"))?;
    let h_quick = quick_rule_bandwidth(&sample, kernel, req.level).map_err(|e| format!("{e}"))?;
    let grid = default_cv_grid(&sample);
    let (h_lscv, curve) = lscv_bandwidth(&sample, kernel, &grid).map_err(|e| format!("{e}"))?;
    let h_ccv = constrained_cv_bandwidth(&sample, kernel, req.level).map_err(|e| format!("{e}"))?;

    Ok(json!({
        "n": req.n,
        "sd": sample.sd(),
        "c": diag.c,
        "h_hat": h_hat,
        "h_quick": h_quick,
        "h_lscv": h_lscv,
        "h_ccv": h_ccv,
        "h_thumb": 1.059 * sample.sd() * (req.n as f64).powf(-0.2),
        "brackets": diag.brackets,
        "cv": curve.iter().map(|p| vec![p.h, p.cv]).collect::<Vec<_>>(),
    })
    .to_string())
}

#[derive(Deserialize)]
struct InclusionReq {
    density: String,
    kernel: String,
    x: f64,
    /// Rate rule h = a n^{-eps} (absolute scale).
    a: f64,
    eps: f64,
    level: f64,
    n_lo: f64,
    n_hi: f64,
    points: Option<usize>,
}

/// Inclusion probability of the smoothed CDF in the KS band as n grows,
/// from the normal approximation.
#[wasm_bindgen]
pub fn inclusion_curve(config: &str) -> String {
    match inclusion_impl(config) {
        Ok(s) => s,
        Err(e) => fail(e),
    }
}

fn inclusion_impl(config: &str) -> Result<String, String> {
    let req: InclusionReq = serde_json::from_str(config).map_err(|e| e.to_string())?;
    let density: TestDensity = req.density.parse().map_err(|e| format!("{e}"))?;
    let kernel = Kernel::from_name(&req.kernel).map_err(|e| format!("{e}"))?;
    if !(req.a > 0.0 && req.eps > 0.0 && req.eps < 1.0) {
        return Err("need a > 0 and eps in (0, 1)".into());
    }
    if !(req.n_lo >= 2.0 && req.n_hi > req.n_lo && req.n_hi <= 1e12) {
        return Err("need 2 <= n_lo < n_hi <= 1e12".into());
    }
    let c = ks_quantile(req.level).map_err(|e| format!("{e}"))?;
    let ctx = AsymptoticContext::new(density, kernel, req.x, c).map_err(|e| format!("{e}"))?;
    let points = req.points.unwrap_or(120).clamp(2, 1_000);
    let mut ns = Vec::with_capacity(points);
    let mut pi = Vec::with_capacity(points);
    let mut means = Vec::with_capacity(points);
    let mut sds = Vec::with_capacity(points);
    for i in 0..points {
        let n = req.n_lo * (req.n_hi / req.n_lo).powf(i as f64 / (points - 1) as f64);
        let h = req.a * n.powf(-req.eps);
        let d = ctx
            .inclusion_detail(n.round() as u64, h)
            .map_err(|e| format!("{e}"))?;
        ns.push(n);
        pi.push(d.value);
        means.push(d.mean);
        sds.push(d.sd);
    }
    let a_critical = ctx.critical_amplitude().ok();
    Ok(json!({
        "c": c,
        "x": req.x,
        "a_critical": a_critical,
        "ns": ns,
        "pi": pi,
        "mean": means,
        "sd": sds,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explore_returns_consistent_curves() {
        let cfg = r#"{"density":"stdnormal","kernel":"gaussian","n":300,"seed":9,
                      "h":0.35,"level":0.95,"band":"ks","grid_points":101}"#;
        let v: serde_json::Value = serde_json::from_str(&band_explore(cfg)).unwrap();
        assert!(v.get("error").is_none(), "{v}");
        let xs = v["xs"].as_array().unwrap();
        assert_eq!(xs.len(), 101);
        assert_eq!(v["F_hat"].as_array().unwrap().len(), 101);
        let fh: Vec<f64> = v["F_hat"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert!(fh.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let z_max = v["z_max"].as_f64().unwrap();
        let c = v["c"].as_f64().unwrap();
        assert_eq!(v["inside"].as_bool().unwrap(), z_max <= c);
        assert!(v["h_hat"].as_f64().unwrap() > 0.0);
        assert_eq!(v["jumps"].as_array().unwrap().len(), 300);
    }

    #[test]
    fn explore_default_bandwidth_is_thumb_rule() {
        let cfg = r#"{"density":"stdnormal","kernel":"gaussian","n":200,"seed":3,
                      "level":0.95,"band":"ks"}"#;
        let v: serde_json::Value = serde_json::from_str(&band_explore(cfg)).unwrap();
        let h = v["h"].as_f64().unwrap();
        let thumb = v["h_thumb"].as_f64().unwrap();
        assert!((h - thumb).abs() < 1e-12);
    }

    #[test]
    fn explore_rejects_bad_input() {
        for cfg in [
            "{not json",
            r#"{"density":"cauchy","kernel":"gaussian","n":100,"seed":1,"level":0.95,"band":"ks"}"#,
            r#"{"density":"stdnormal","kernel":"gaussian","n":0,"seed":1,"level":0.95,"band":"ks"}"#,
            r#"{"density":"stdnormal","kernel":"gaussian","n":100,"seed":1,"level":0.95,"band":"corrected"}"#,
            r#"{"density":"stdnormal","kernel":"gaussian","n":100,"seed":1,"h":-0.5,"level":0.95,"band":"ks"}"#,
        ] {
            let v: serde_json::Value = serde_json::from_str(&band_explore(cfg)).unwrap();
            assert!(v.get("error").is_some(), "{cfg}");
        }
    }

    #[test]
    fn bandwidth_report_orders_rules_sensibly() {
        let cfg =
            r#"{"density":"stdnormal","kernel":"epanechnikov","n":400,"seed":11,"level":0.9}"#;
        let v: serde_json::Value = serde_json::from_str(&bandwidth_report(cfg)).unwrap();
        assert!(v.get("error").is_none(), "{v}");
        let h_hat = v["h_hat"].as_f64().unwrap();
        let h_ccv = v["h_ccv"].as_f64().unwrap();
        assert!(h_ccv <= h_hat * (1.0 + 1e-12));
        assert!(!v["cv"].as_array().unwrap().is_empty());
    }

    #[test]
    fn inclusion_curve_shows_the_escape() {
        // n^{-1/5} rate: inclusion decays toward zero for large n.
        let cfg = r#"{"density":"stdnormal","kernel":"gaussian","x":1.0,
                      "a":3.0,"eps":0.2,"level":0.95,"n_lo":100,"n_hi":1e10,"points":60}"#;
        let v: serde_json::Value = serde_json::from_str(&inclusion_curve(cfg)).unwrap();
        assert!(v.get("error").is_none(), "{v}");
        let pi: Vec<f64> = v["pi"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert!(pi.last().unwrap() < &1e-4);
        assert!((v["a_critical"].as_f64().unwrap() - 3.3504).abs() < 1.5e-3);

        // n^{-1/4} below the critical amplitude: inclusion tends to one.
        let cfg = r#"{"density":"stdnormal","kernel":"gaussian","x":1.0,
                      "a":3.0,"eps":0.25,"level":0.95,"n_lo":100,"n_hi":1e10,"points":60}"#;
        let v: serde_json::Value = serde_json::from_str(&inclusion_curve(cfg)).unwrap();
        let pi: Vec<f64> = v["pi"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert!(pi.last().unwrap() > &0.99);
    }
}
