//! Adaptive Simpson quadrature with interval bisection.
//!
//! Accuracy is controlled by an absolute tolerance that is split across
//! subintervals; the `15` factor is the usual Richardson error estimate for
//! Simpson's rule.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 52;
const MAX_EVALS: usize = 4_000_000;

struct Budget {
    evals: usize,
    exhausted: bool,
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// `name` identifies the integral in the non-convergence diagnostic.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, name: &str) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut budget = Budget {
        evals: 3,
        exhausted: false,
    };
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut budget);
    if budget.exhausted {
        return Err(Error::QuadratureNonConvergence {
            integral: name.to_string(),
        });
    }
    Ok(value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    if budget.evals + 2 > MAX_EVALS {
        budget.exhausted = true;
        return whole;
    }
    budget.evals += 2;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || lm == a {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        budget.exhausted = true;
        return left + right;
    }
    let half_tol = 0.5 * tol;
    recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1, budget)
        + recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::std_normal_pdf;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(|x| x * x, 0.0, 3.0, 1e-12, "x^2").unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn normal_mass_and_second_moment() {
        let mass = adaptive_simpson(std_normal_pdf, -12.0, 12.0, 1e-12, "phi").unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        let m2 =
            adaptive_simpson(|x| x * x * std_normal_pdf(x), -12.0, 12.0, 1e-12, "x^2 phi").unwrap();
        assert!((m2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_names_the_integral() {
        // Integrable singularity at 0 defeats Simpson refinement at this tolerance.
        let res = adaptive_simpson(
            |x| x.abs().powf(-0.97).min(1e250),
            0.0,
            1.0,
            1e-13,
            "singular",
        );
        match res {
            Err(Error::QuadratureNonConvergence { integral }) => assert_eq!(integral, "singular"),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn bad_tolerance_rejected() {
        assert!(adaptive_simpson(|x| x, 0.0, 1.0, 0.0, "t").is_err());
    }
}
