//! Analytic test densities: exact pdf, cdf, derivative, ‖f'‖, and
//! inverse-CDF samplers. These are the ground truth every simulation and
//! theory computation is compared against.
//!
//! Sampling is inverse-CDF through [`crate::normal::std_normal_quantile`]
//! (uniform draws from an [`RngStream`]), so a given (seed, stream) pair
//! reproduces the same sample everywhere. The mixture consumes two
//! uniforms per draw (component pick, then value).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::Sample;
use crate::normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestDensity {
    StdNormal,
    Normal {
        mu: f64,
        sigma: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    /// weight · N(mu1, sigma1²) + (1 − weight) · N(mu2, sigma2²).
    NormalMixture {
        weight: f64,
        mu1: f64,
        sigma1: f64,
        mu2: f64,
        sigma2: f64,
    },
}

impl TestDensity {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "normal requires finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(TestDensity::Normal { mu, sigma })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "uniform requires a < b, got a={a}, b={b}"
            )));
        }
        Ok(TestDensity::Uniform { a, b })
    }

    pub fn normal_mixture(
        weight: f64,
        mu1: f64,
        sigma1: f64,
        mu2: f64,
        sigma2: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!(
                "mixture weight must lie in [0, 1], got {weight}"
            )));
        }
        if !(sigma1 > 0.0 && sigma2 > 0.0) || !mu1.is_finite() || !mu2.is_finite() {
            return Err(Error::InvalidParameter(
                "mixture components require finite means and positive sigmas".into(),
            ));
        }
        Ok(TestDensity::NormalMixture {
            weight,
            mu1,
            sigma1,
            mu2,
            sigma2,
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            TestDensity::StdNormal => std_normal_pdf(x),
            TestDensity::Normal { mu, sigma } => std_normal_pdf((x - mu) / sigma) / sigma,
            TestDensity::Uniform { a, b } => {
                if x >= a && x <= b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            TestDensity::NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                weight * std_normal_pdf((x - mu1) / sigma1) / sigma1
                    + (1.0 - weight) * std_normal_pdf((x - mu2) / sigma2) / sigma2
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            TestDensity::StdNormal => std_normal_cdf(x),
            TestDensity::Normal { mu, sigma } => std_normal_cdf((x - mu) / sigma),
            TestDensity::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            TestDensity::NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                weight * std_normal_cdf((x - mu1) / sigma1)
                    + (1.0 - weight) * std_normal_cdf((x - mu2) / sigma2)
            }
        }
    }

    /// f'(x) where it exists; for the uniform this is the a.e. value 0
    /// (the distributional jumps at the endpoints are excluded — see
    /// [`TestDensity::sup_abs_deriv`]).
    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            TestDensity::StdNormal => -x * std_normal_pdf(x),
            TestDensity::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -z * std_normal_pdf(z) / (sigma * sigma)
            }
            TestDensity::Uniform { .. } => 0.0,
            TestDensity::NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                let z1 = (x - mu1) / sigma1;
                let z2 = (x - mu2) / sigma2;
                -weight * z1 * std_normal_pdf(z1) / (sigma1 * sigma1)
                    - (1.0 - weight) * z2 * std_normal_pdf(z2) / (sigma2 * sigma2)
            }
        }
    }

    /// f''(x) (a.e. value 0 for the uniform).
    pub fn deriv2(&self, x: f64) -> f64 {
        match *self {
            TestDensity::StdNormal => (x * x - 1.0) * std_normal_pdf(x),
            TestDensity::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                (z * z - 1.0) * std_normal_pdf(z) / (sigma * sigma * sigma)
            }
            TestDensity::Uniform { .. } => 0.0,
            TestDensity::NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                let z1 = (x - mu1) / sigma1;
                let z2 = (x - mu2) / sigma2;
                weight * (z1 * z1 - 1.0) * std_normal_pdf(z1) / (sigma1 * sigma1 * sigma1)
                    + (1.0 - weight) * (z2 * z2 - 1.0) * std_normal_pdf(z2)
                        / (sigma2 * sigma2 * sigma2)
            }
        }
    }

    /// ‖f'‖ = max_x |f'(x)| and a point attaining it. Closed form for the
    /// normals (|f'| peaks at mu ± sigma); dense grid scan plus
    /// golden-section refinement for the mixture. Errors for the uniform,
    /// whose density jumps at the support endpoints.
    pub fn sup_abs_deriv(&self) -> Result<(f64, f64)> {
        match *self {
            TestDensity::StdNormal => Ok((std_normal_pdf(1.0), 1.0)),
            TestDensity::Normal { mu, sigma } => {
                Ok((std_normal_pdf(1.0) / (sigma * sigma), mu + sigma))
            }
            TestDensity::Uniform { .. } => Err(Error::InvalidParameter(
                "uniform density has unbounded derivative at its support endpoints".into(),
            )),
            TestDensity::NormalMixture {
                mu1,
                sigma1,
                mu2,
                sigma2,
                ..
            } => {
                let lo = (mu1 - 8.0 * sigma1).min(mu2 - 8.0 * sigma2);
                let hi = (mu1 + 8.0 * sigma1).max(mu2 + 8.0 * sigma2);
                Ok(golden_max(|x| self.deriv(x).abs(), lo, hi, 4096))
            }
        }
    }

    /// Draw n observations, sorted; deterministic given the stream.
    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Sample> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.draw(rng));
        }
        Sample::new(out)
    }

    fn draw(&self, rng: &mut RngStream) -> f64 {
        match *self {
            TestDensity::StdNormal => std_normal_quantile(rng.next_open01()),
            TestDensity::Normal { mu, sigma } => {
                mu + sigma * std_normal_quantile(rng.next_open01())
            }
            TestDensity::Uniform { a, b } => a + (b - a) * rng.next_open01(),
            TestDensity::NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                let pick = rng.next_open01();
                let z = std_normal_quantile(rng.next_open01());
                if pick < weight {
                    mu1 + sigma1 * z
                } else {
                    mu2 + sigma2 * z
                }
            }
        }
    }
}

/// Grid scan followed by golden-section refinement of the best cell.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cells: usize) -> (f64, f64) {
    let step = (hi - lo) / cells as f64;
    let mut best_x = lo;
    let mut best = f(lo);
    for i in 1..=cells {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut a, mut b) = (best_x - step, best_x + step);
    let inv_phi = 0.618_033_988_749_894_9;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 * (1.0 + best_x.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (f(x), x)
}

impl fmt::Display for TestDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TestDensity::StdNormal => write!(f, "stdnormal"),
            TestDensity::Normal { mu, sigma } => write!(f, "normal:mu={mu},sigma={sigma}"),
            TestDensity::Uniform { a, b } => write!(f, "uniform:a={a},b={b}"),
            TestDensity::NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => write!(
                f,
                "mix:w={weight},mu1={mu1},sigma1={sigma1},mu2={mu2},sigma2={sigma2}"
            ),
        }
    }
}

impl FromStr for TestDensity {
    type Err = Error;

    /// Accepts `stdnormal`, `normal:mu=M,sigma=S`, `uniform:a=A,b=B`, and
    /// `mix:w=W,mu1=,sigma1=,mu2=,sigma2=`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, r),
            None => (s, ""),
        };
        let fields = parse_kv(rest)?;
        let get = |key: &str| -> Result<f64> {
            fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse(format!("density '{s}' is missing field '{key}'")))
        };
        match head {
            "stdnormal" => Ok(TestDensity::StdNormal),
            "normal" => TestDensity::normal(get("mu")?, get("sigma")?),
            "uniform" => TestDensity::uniform(get("a")?, get("b")?),
            "mix" => TestDensity::normal_mixture(
                get("w")?,
                get("mu1")?,
                get("sigma1")?,
                get("mu2")?,
                get("sigma2")?,
            ),
            other => Err(Error::Parse(format!(
                "unknown density '{other}' (expected stdnormal, normal, uniform, or mix)"
            ))),
        }
    }
}

pub(crate) fn parse_kv(s: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| Error::Parse(format!("invalid number '{v}' for '{k}'")))?;
        out.push((k.to_string(), v));
    }
    Ok(out)
}
