//! Kernel primitives and the moment constants that drive the asymptotic
//! expansions: k2 = ∫u²k, e_j = ∫₀^∞ v^j k(v) dv, d_j = ∫ v^j k(v)K(v) dv,
//! and V = 2(e1 − d1).
//!
//! For any symmetric kernel e2 = d2 exactly and d1 < e1 strictly, so V > 0.
//! Both identities are asserted when moments are computed.

use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::normal::{std_normal_cdf, std_normal_pdf};
use crate::quad::adaptive_simpson;

/// Gaussian integrals are truncated here; the tail mass beyond 12 is
/// below 1e-30 and irrelevant at the quadrature tolerances in use.
pub(crate) const GAUSSIAN_WINDOW_RADIUS: f64 = 12.0;

const MOMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Gaussian,
    Epanechnikov,
}

impl Kernel {
    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Epanechnikov => "epanechnikov",
        }
    }

    pub fn from_name(name: &str) -> Result<Kernel> {
        match name {
            "gaussian" => Ok(Kernel::Gaussian),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            other => Err(Error::Parse(format!(
                "unknown kernel '{other}' (expected gaussian or epanechnikov)"
            ))),
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => std_normal_pdf(u),
            Kernel::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => std_normal_cdf(u),
            Kernel::Epanechnikov => {
                if u <= -1.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    0.25 * (2.0 + u * (3.0 - u * u))
                }
            }
        }
    }

    pub fn deriv(&self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => -u * std_normal_pdf(u),
            Kernel::Epanechnikov => {
                if u.abs() <= 1.0 {
                    -1.5 * u
                } else {
                    0.0
                }
            }
        }
    }

    /// Radius beyond which the pdf is exactly zero; infinite for Gaussian.
    pub fn support_radius(&self) -> f64 {
        match self {
            Kernel::Gaussian => f64::INFINITY,
            Kernel::Epanechnikov => 1.0,
        }
    }

    /// Finite radius used by the windowed estimator sums: contributions
    /// with |u| beyond it round to K = 0/1 and k = k' = 0. Exact for a
    /// compact kernel; for the Gaussian the induced absolute error is
    /// below 1e-12 of the full sum.
    pub(crate) fn window_radius(&self) -> f64 {
        match self {
            Kernel::Gaussian => GAUSSIAN_WINDOW_RADIUS,
            Kernel::Epanechnikov => 1.0,
        }
    }

    /// Moment constants, computed once at tolerance 1e-10 and cached.
    pub fn moments(&self) -> &'static KernelMoments {
        static GAUSSIAN: OnceLock<KernelMoments> = OnceLock::new();
        static EPANECHNIKOV: OnceLock<KernelMoments> = OnceLock::new();
        let cell = match self {
            Kernel::Gaussian => &GAUSSIAN,
            Kernel::Epanechnikov => &EPANECHNIKOV,
        };
        cell.get_or_init(|| {
            kernel_moments(*self, MOMENT_TOL)
                .expect("moment quadrature converges for shipped kernels")
        })
    }

    /// Self-convolution (k*k)(t), the kernel of the exact ∫f̂² identity
    /// used by cross-validation.
    pub(crate) fn self_convolution(&self, t: f64) -> f64 {
        match self {
            // phi * phi is a normal(0, 2) density.
            Kernel::Gaussian => {
                std_normal_pdf(t / std::f64::consts::SQRT_2) / std::f64::consts::SQRT_2
            }
            Kernel::Epanechnikov => {
                let a = t.abs();
                if a >= 2.0 {
                    0.0
                } else {
                    let d = 2.0 - a;
                    3.0 / 160.0 * d * d * d * (t * t + 6.0 * a + 4.0)
                }
            }
        }
    }

    pub(crate) fn self_convolution_radius(&self) -> f64 {
        match self {
            Kernel::Gaussian => 2.0 * GAUSSIAN_WINDOW_RADIUS,
            Kernel::Epanechnikov => 2.0,
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Kernel> {
        Kernel::from_name(s)
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    pub k2: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// V = 2(e1 - d1), the leading variance constant of the Z_n process.
    pub v: f64,
}

/// Compute all moment constants by adaptive quadrature at absolute
/// tolerance `tol`, then check the structural identities.
pub fn kernel_moments(kernel: Kernel, tol: f64) -> Result<KernelMoments> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "moment tolerance must be positive, got {tol}"
        )));
    }
    let r = match kernel {
        Kernel::Gaussian => GAUSSIAN_WINDOW_RADIUS,
        Kernel::Epanechnikov => 1.0,
    };
    let k2 = adaptive_simpson(|u| u * u * kernel.pdf(u), -r, r, tol, "k2")?;
    let e = |j: i32, name: &str| adaptive_simpson(|v| v.powi(j) * kernel.pdf(v), 0.0, r, tol, name);
    let d = |j: i32, name: &str| {
        adaptive_simpson(
            |v| v.powi(j) * kernel.pdf(v) * kernel.cdf(v),
            -r,
            r,
            tol,
            name,
        )
    };
    let e1 = e(1, "e1")?;
    let e2 = e(2, "e2")?;
    let e3 = e(3, "e3")?;
    let d1 = d(1, "d1")?;
    let d2 = d(2, "d2")?;
    let d3 = d(3, "d3")?;
    if (e2 - d2).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "kernel {kernel}: moment identity e2 = d2 violated (|e2 - d2| = {:.3e})",
            (e2 - d2).abs()
        )));
    }
    // e2 = d2 is an identity for symmetric kernels; once verified, store
    // it exactly so downstream expansions drop the term rather than keep
    // quadrature residue.
    let m = KernelMoments {
        k2,
        e1,
        e2,
        e3,
        d1,
        d2: e2,
        d3,
        v: 2.0 * (e1 - d1),
    };
    if m.e1 - m.d1 < 1e-3 {
        return Err(Error::InvalidParameter(format!(
            "kernel {kernel}: e1 - d1 = {:.3e} is not positive enough",
            m.e1 - m.d1
        )));
    }
    if !(m.k2 > 0.0 && m.k2.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kernel {kernel}: k2 = {} is not a positive finite number",
            m.k2
        )));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn gaussian_point_values() {
        assert_eq!(Kernel::Gaussian.cdf(0.0), 0.5);
        assert!((Kernel::Gaussian.pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(Kernel::Gaussian.deriv(0.0), 0.0);
    }

    #[test]
    fn epanechnikov_support() {
        assert_eq!(Kernel::Epanechnikov.pdf(2.0), 0.0);
        assert_eq!(Kernel::Epanechnikov.pdf(-1.5), 0.0);
        assert_eq!(Kernel::Epanechnikov.cdf(-1.0), 0.0);
        assert_eq!(Kernel::Epanechnikov.cdf(1.0), 1.0);
        assert_eq!(Kernel::Epanechnikov.cdf(0.0), 0.5);
        assert_eq!(Kernel::Epanechnikov.deriv(2.0), 0.0);
    }

    #[test]
    fn gaussian_moments_match_closed_forms() {
        // e1 = phi(0), e2 = 1/2, e3 = 2 phi(0),
        // d1 = 1/(2 sqrt(pi)), d2 = 1/2, d3 = 5/(4 sqrt(pi)).
        let m = kernel_moments(Kernel::Gaussian, 1e-10).unwrap();
        let phi0 = std_normal_pdf(0.0);
        assert!((m.k2 - 1.0).abs() < 1e-8);
        assert!((m.e1 - phi0).abs() < 1e-9);
        assert!((m.e2 - 0.5).abs() < 1e-9);
        assert!((m.e3 - 2.0 * phi0).abs() < 1e-9);
        assert!((m.d1 - 1.0 / (2.0 * SQRT_PI)).abs() < 1e-9);
        assert!((m.d2 - 0.5).abs() < 1e-9);
        assert!((m.d3 - 5.0 / (4.0 * SQRT_PI)).abs() < 1e-9);
        assert!((m.v - 0.233_694_977_255).abs() < 1e-6);
    }

    #[test]
    fn epanechnikov_moments_match_closed_forms() {
        // Polynomial integrals: k2 = 1/5, e1 = 3/16, e2 = 1/10, e3 = 1/16,
        // d1 = 9/70, d2 = 1/10, d3 = 11/210.
        let m = kernel_moments(Kernel::Epanechnikov, 1e-10).unwrap();
        assert!((m.k2 - 0.2).abs() < 1e-9);
        assert!((m.e1 - 0.1875).abs() < 1e-9);
        assert!((m.e2 - 0.1).abs() < 1e-9);
        assert!((m.e3 - 0.0625).abs() < 1e-9);
        assert!((m.d1 - 9.0 / 70.0).abs() < 1e-9);
        assert!((m.d2 - 0.1).abs() < 1e-8);
        assert!((m.d3 - 11.0 / 210.0).abs() < 1e-9);
        assert!((m.v - 33.0 / 280.0).abs() < 1e-9);
    }

    #[test]
    fn moment_identities_for_all_kernels() {
        for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
            let m = k.moments();
            assert!((m.e2 - m.d2).abs() <= 1e-8, "{k}: e2 != d2");
            assert!(m.e1 - m.d1 >= 1e-3, "{k}: e1 - d1 too small");
            assert!(m.v > 0.0);
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
            let r = k.window_radius();
            let mass = adaptive_simpson(|u| k.pdf(u), -r, r, 1e-12, "mass").unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "{k}: mass {mass}");
        }
    }

    #[test]
    fn cdf_matches_quadrature_of_pdf() {
        for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
            let r = k.window_radius();
            for i in 0..20 {
                let u = -r + (2.0 * r) * (i as f64 + 0.5) / 20.0;
                let q = adaptive_simpson(|t| k.pdf(t), -r, u, 1e-10, "K").unwrap();
                assert!((q - k.cdf(u)).abs() < 1e-8, "{k} at {u}");
            }
        }
    }

    #[test]
    fn deriv_matches_finite_differences() {
        for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
            // Interior points only; the Epanechnikov derivative jumps at +-1.
            for i in 0..20 {
                let u = -0.95 + 1.9 * (i as f64) / 19.0;
                let eps = 1e-6;
                let fd = (k.pdf(u + eps) - k.pdf(u - eps)) / (2.0 * eps);
                assert!((fd - k.deriv(u)).abs() < 1e-6, "{k} at {u}");
            }
        }
    }

    #[test]
    fn self_convolution_matches_quadrature() {
        for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
            let r = k.window_radius();
            for &t in &[0.0, 0.3, 1.0, 1.7, 2.5] {
                // Integrate over the support overlap so the adaptive rule
                // cannot skip a narrow sliver.
                let (a, b) = ((-r).max(t - r), r.min(t + r));
                let num = if a >= b {
                    0.0
                } else {
                    adaptive_simpson(|u| k.pdf(u) * k.pdf(t - u), a, b, 1e-11, "k*k").unwrap()
                };
                assert!(
                    (num - k.self_convolution(t)).abs() < 1e-9,
                    "{k} at t={t}: {num} vs {}",
                    k.self_convolution(t)
                );
            }
        }
    }

    #[test]
    fn name_round_trip() {
        for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
            assert_eq!(Kernel::from_name(k.name()).unwrap(), k);
        }
        assert!(Kernel::from_name("tophat").is_err());
    }
}
