//! Closed-form asymptotics for the discrepancy process
//! Z_n(x) = √n (F̂_h(x) − F_n(x)): its mean and variance expansions, the
//! normal approximation to the band-inclusion probability, the critical
//! rate amplitude, and the mean-squared-error expansion of the smoothed
//! CDF with its optimal bandwidth.
//!
//! Everything here is evaluated with the exact f, f', f'' of a
//! [`TestDensity`] — this module is the oracle side of theory-versus-
//! simulation comparisons, never an estimate.

use crate::densities::TestDensity;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelMoments};
use crate::normal::std_normal_cdf;

/// Density, kernel moments, evaluation point, and band constant bundled
/// for the expansion formulas.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticContext {
    pub density: TestDensity,
    pub moments: KernelMoments,
    pub x: f64,
    /// Band half-width constant c (the KS quantile for the simultaneous band).
    pub c: f64,
}

/// Validity indicators for the normal inclusion approximation. They are
/// reported, never enforced: the formula needs h → 0, nh → ∞, nh⁷ → 0.
#[derive(Debug, Clone, Copy)]
pub struct RegimeFlags {
    pub nh: f64,
    pub nh7: f64,
    pub h: f64,
}

impl RegimeFlags {
    /// Heuristic desk-scale reading of the asymptotic conditions.
    pub fn plausible(&self) -> bool {
        self.h <= 0.5 && self.nh >= 50.0 && self.nh7 <= 1.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InclusionApprox {
    pub value: f64,
    /// Leading mean ½k₂√n h² f'(x).
    pub mean: f64,
    /// Leading standard deviation √(V f(x) h).
    pub sd: f64,
    pub regime: RegimeFlags,
}

impl AsymptoticContext {
    pub fn new(density: TestDensity, kernel: Kernel, x: f64, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "band constant must be positive, got {c}"
            )));
        }
        Ok(AsymptoticContext {
            density,
            moments: *kernel.moments(),
            x,
            c,
        })
    }

    /// Leading mean of Z_n(x): ½ k₂ √n h² f'(x).
    pub fn mean_z_leading(&self, n: u64, h: f64) -> f64 {
        0.5 * self.moments.k2 * (n as f64).sqrt() * h * h * self.density.deriv(self.x)
    }

    /// Truncated variance expansion of Z_n(x):
    /// 2(e₁−d₁)hf − (e₂−d₂)h²f' + ⅓(e₃−d₃)h³f''. The middle term
    /// vanishes identically for symmetric kernels (e₂ = d₂).
    pub fn var_z_expansion(&self, h: f64, order: u8) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "variance expansion order must be 1, 2, or 3, got {order}"
            )));
        }
        let m = &self.moments;
        let f = self.density.pdf(self.x);
        let mut v = m.v * h * f;
        if order >= 2 {
            v -= (m.e2 - m.d2) * h * h * self.density.deriv(self.x);
        }
        if order >= 3 {
            v += (m.e3 - m.d3) * h * h * h * self.density.deriv2(self.x) / 3.0;
        }
        Ok(v)
    }

    /// Normal approximation to π_n = P{F̂_h(x) inside the ±c/√n band}:
    /// Φ((c − μ)/s) − Φ((−c − μ)/s) with μ and s the leading mean and
    /// standard deviation of Z_n(x).
    pub fn inclusion_prob(&self, n: u64, h: f64) -> Result<f64> {
        Ok(self.inclusion_detail(n, h)?.value)
    }

    pub fn inclusion_detail(&self, n: u64, h: f64) -> Result<InclusionApprox> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        let f = self.density.pdf(self.x);
        if f <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "degenerate normalization: f({}) = 0",
                self.x
            )));
        }
        let mean = self.mean_z_leading(n, h);
        let sd = (self.moments.v * f * h).sqrt();
        let value = std_normal_cdf((self.c - mean) / sd) - std_normal_cdf((-self.c - mean) / sd);
        let nf = n as f64;
        Ok(InclusionApprox {
            value,
            mean,
            sd,
            regime: RegimeFlags {
                nh: nf * h,
                nh7: nf * h.powi(7),
                h,
            },
        })
    }

    /// For h = a·n^{−1/4} the inclusion limit is 1 or 0 according to
    /// whether ½k₂a²|f'(x)| clears the band constant; this is the
    /// threshold amplitude a* = √(2c/(|f'(x)| k₂)).
    pub fn critical_amplitude(&self) -> Result<f64> {
        let fp = self.density.deriv(self.x);
        if fp == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "no finite threshold amplitude: f'({}) = 0",
                self.x
            )));
        }
        Ok((2.0 * self.c / (fp.abs() * self.moments.k2)).sqrt())
    }

    /// E{F̂_h(x) − F(x)}² expansion:
    /// n⁻¹F(1−F) − 2d₁hn⁻¹f + ¼k₂²h⁴f'².
    pub fn cdf_mse_expansion(&self, n: u64, h: f64) -> f64 {
        let nf = n as f64;
        let f_cdf = self.density.cdf(self.x);
        let f = self.density.pdf(self.x);
        let fp = self.density.deriv(self.x);
        let m = &self.moments;
        f_cdf * (1.0 - f_cdf) / nf - 2.0 * m.d1 * h * f / nf
            + 0.25 * m.k2 * m.k2 * h.powi(4) * fp * fp
    }

    /// Stationary point of the h-dependent MSE terms:
    /// h₁* = (2d₁f/(k₂²f'²))^{1/3} n^{−1/3}.
    pub fn optimal_h1(&self, n: u64) -> Result<f64> {
        let fp = self.density.deriv(self.x);
        if fp == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "no interior MSE optimum at this order: f'({}) = 0",
                self.x
            )));
        }
        let m = &self.moments;
        let f = self.density.pdf(self.x);
        Ok((2.0 * m.d1 * f / (m.k2 * m.k2 * fp * fp)).cbrt() * (n as f64).powf(-1.0 / 3.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::ks_quantile;
    use crate::normal::std_normal_pdf;

    fn ctx_at(x: f64) -> AsymptoticContext {
        AsymptoticContext::new(
            TestDensity::StdNormal,
            Kernel::Gaussian,
            x,
            ks_quantile(0.95).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn mean_examples() {
        let ctx = ctx_at(0.0);
        assert_eq!(ctx.mean_z_leading(1_000_000, 0.3), 0.0);

        let ctx = ctx_at(1.0);
        let h = 3.0 * (10_000f64).powf(-0.2);
        assert!((ctx.mean_z_leading(10_000, h) + 2.7351).abs() < 1e-3);

        // With eps = 1/4 the mean is independent of n: ½k₂a²f'(x).
        let a = 2.0;
        let m1 = ctx.mean_z_leading(1_000, a * (1_000f64).powf(-0.25));
        let m2 = ctx.mean_z_leading(1_000_000, a * (1_000_000f64).powf(-0.25));
        let want = 0.5 * a * a * TestDensity::StdNormal.deriv(1.0);
        assert!((m1 - want).abs() < 1e-10 && (m2 - want).abs() < 1e-10);
    }

    #[test]
    fn variance_expansion_values() {
        let ctx = ctx_at(1.0);
        let v1 = ctx.var_z_expansion(0.1, 1).unwrap();
        assert!((v1 - 5.6547e-3).abs() < 1e-6);
        // e2 = d2 makes order 2 equal order 1 for any symmetric kernel.
        assert_eq!(v1, ctx.var_z_expansion(0.1, 2).unwrap());
        // f''(1) = 0 for the standard normal, so order 3 coincides too.
        assert!((ctx.var_z_expansion(0.1, 3).unwrap() - v1).abs() < 1e-15);
        // At x = 0, f'' = -phi(0) gives a genuine third-order correction.
        let ctx0 = ctx_at(0.0);
        let v3 = ctx0.var_z_expansion(0.5, 3).unwrap();
        let v1 = ctx0.var_z_expansion(0.5, 1).unwrap();
        let want = (ctx0.moments.e3 - ctx0.moments.d3) * 0.125 * (-std_normal_pdf(0.0)) / 3.0;
        assert!((v3 - v1 - want).abs() < 1e-12);
        assert!(ctx0.var_z_expansion(0.5, 0).is_err());
        assert!(ctx0.var_z_expansion(0.5, 4).is_err());
    }

    #[test]
    fn inclusion_probability_behavior() {
        // f'(x) = 0: probability tends to one once nh is large.
        let ctx = ctx_at(0.0);
        let p = ctx.inclusion_prob(100_000, 0.01).unwrap();
        assert!(p > 0.9999, "{p}");

        // Composed example: a = 3, eps = 1/5 at n = 1e4 pushes the mean far
        // past the band, so inclusion is negligible.
        let ctx = ctx_at(1.0);
        let h = 3.0 * (10_000f64).powf(-0.2);
        let p = ctx.inclusion_prob(10_000, h).unwrap();
        assert!(p < 1e-3, "{p}");

        // The n^{-1/4} dichotomy: ½k₂a²|f'| below c keeps inclusion → 1,
        // above c kills it.
        let below = 3.0; // 0.5 * 9 * phi(1) = 1.089 < 1.358
        let above = 4.0; // 0.5 * 16 * phi(1) = 1.936 > 1.358
        for (a, expect_one) in [(below, true), (above, false)] {
            let n = 1e10 as u64;
            let h = a * (n as f64).powf(-0.25);
            let p = ctx.inclusion_prob(n, h).unwrap();
            if expect_one {
                assert!(p > 0.999, "a={a}: {p}");
            } else {
                assert!(p < 1e-3, "a={a}: {p}");
            }
        }

        // Eventually decreasing toward zero at the n^{-1/5} rate; the
        // decay is slow, so the n at which it first drops below 0.5 is
        // reported rather than pinned.
        let mut last = 1.0f64;
        let mut first_below_half = None;
        for k in [1e4f64, 1e6, 1e8, 1e10] {
            let n = k as u64;
            let p = ctx.inclusion_prob(n, 3.0 * k.powf(-0.2)).unwrap();
            assert!(p <= last + 1e-12);
            if p < 0.5 && first_below_half.is_none() {
                first_below_half = Some(n);
            }
            last = p;
        }
        assert!(last < 1e-6);
        assert!(first_below_half.is_some());

        // Symmetric in the sign of f'.
        let left = ctx_at(-1.0).inclusion_prob(10_000, 0.2).unwrap();
        let right = ctx_at(1.0).inclusion_prob(10_000, 0.2).unwrap();
        assert!((left - right).abs() < 1e-12);

        // Degenerate normalization.
        let flat = AsymptoticContext::new(
            TestDensity::uniform(0.0, 1.0).unwrap(),
            Kernel::Gaussian,
            5.0,
            1.358,
        )
        .unwrap();
        assert!(flat.inclusion_prob(100, 0.1).is_err());
    }

    #[test]
    fn critical_amplitude_values() {
        let ctx = ctx_at(1.0);
        let a = ctx.critical_amplitude().unwrap();
        assert!((a - 3.3504).abs() < 1.5e-3, "{a}");

        // Quadrupling c doubles the threshold.
        let ctx4 =
            AsymptoticContext::new(TestDensity::StdNormal, Kernel::Gaussian, 1.0, 4.0 * ctx.c)
                .unwrap();
        assert!((ctx4.critical_amplitude().unwrap() / a - 2.0).abs() < 1e-12);

        // Inclusion flips across the threshold for huge n.
        let n = 1e12 as u64;
        for (factor, expect_one) in [(0.8, true), (1.2, false)] {
            let h = a * factor * (n as f64).powf(-0.25);
            let p = ctx.inclusion_prob(n, h).unwrap();
            if expect_one {
                assert!(p > 0.99, "{p}");
            } else {
                assert!(p < 0.01, "{p}");
            }
        }

        assert!(ctx_at(0.0).critical_amplitude().is_err());
    }

    #[test]
    fn mse_expansion_and_optimal_h1() {
        let ctx = ctx_at(1.0);
        // h = 0 leaves exactly the binomial variance of F_n.
        let f = TestDensity::StdNormal.cdf(1.0);
        assert!((ctx.cdf_mse_expansion(50, 0.0) - f * (1.0 - f) / 50.0).abs() < 1e-15);

        // Independent route: h1* from the frozen d1 closed form.
        let d1 = 0.282_094_791_774;
        let phi1 = std_normal_pdf(1.0);
        let want = (2.0 * d1 * phi1 / (phi1 * phi1)).cbrt() * (10_000f64).powf(-1.0 / 3.0);
        let h1 = ctx.optimal_h1(10_000).unwrap();
        assert!((h1 - want).abs() < 1e-9);
        assert!((h1 - 0.061518).abs() < 1e-4);

        // n -> 8n halves h1*.
        let a = ctx.optimal_h1(1_000).unwrap();
        let b = ctx.optimal_h1(8_000).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);

        // The expansion is locally minimal at h1*.
        let n = 10_000;
        let at = ctx.cdf_mse_expansion(n, h1);
        assert!(ctx.cdf_mse_expansion(n, 0.8 * h1) > at);
        assert!(ctx.cdf_mse_expansion(n, 1.25 * h1) > at);

        assert!(ctx_at(0.0).optimal_h1(100).is_err());
    }

    #[test]
    fn regime_flags_report() {
        let ctx = ctx_at(1.0);
        let d = ctx.inclusion_detail(10_000, 0.1).unwrap();
        assert!((d.regime.nh - 1000.0).abs() < 1e-9);
        assert!(d.regime.plausible());
        let d = ctx.inclusion_detail(100, 1.2).unwrap();
        assert!(!d.regime.plausible());
    }
}
