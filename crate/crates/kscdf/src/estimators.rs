//! The empirical CDF, the smoothed empirical CDF F̂_h, the kernel density
//! estimator f̂_h and its derivative, and the discrepancy process
//! Z_n(x) = √n (F̂_h(x) − F_n(x)).
//!
//! All evaluations are windowed exact sums over sorted data: points whose
//! scaled distance from the query exceeds the kernel's window radius
//! contribute exactly K = 0/1 (and k = k' = 0) and are handled by a binary
//! search, so a single evaluation costs O(log n + window). There is no
//! gridding: band-membership decisions need the exact values at the 2n
//! jump candidates X_i and X_i−, and max_x |Z_n(x)| is attained there
//! because F̂_h is nondecreasing while F_n is flat between jumps.

use crate::error::{Error, Result};
use crate::kernels::Kernel;

/// Which side of the empirical CDF to evaluate at a jump point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// F_n(x) = #{X_i <= x} / n.
    At,
    /// The left limit F_n(x−) = #{X_i < x} / n.
    Left,
}

/// A sorted sample with cached summary statistics.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Vec<f64>,
    mean: f64,
    sd: f64,
}

impl Sample {
    /// Sorts `values` and caches mean and standard deviation (divisor n−1;
    /// zero for a single observation). Rejects empty and non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample contains non-finite value {bad}"
            )));
        }
        values.sort_unstable_by(f64::total_cmp);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Sample { values, mean, sd })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub(crate) fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v <= x)
    }

    pub(crate) fn count_lt(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v < x)
    }

    /// F_n(x) or its left limit, by binary search.
    pub fn ecdf(&self, x: f64, side: Side) -> f64 {
        let c = match side {
            Side::At => self.count_le(x),
            Side::Left => self.count_lt(x),
        };
        c as f64 / self.n() as f64
    }

    /// Empirical p-quantile: the ⌈pn⌉-th order statistic, clamped.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.n();
        let idx = (p * n as f64).ceil() as isize - 1;
        self.values[idx.clamp(0, n as isize - 1) as usize]
    }
}

/// F̂_h and f̂_h for a sample, kernel, and bandwidth.
#[derive(Debug, Clone, Copy)]
pub struct SmoothedEstimate<'a> {
    sample: &'a Sample,
    kernel: Kernel,
    h: f64,
}

impl<'a> SmoothedEstimate<'a> {
    pub fn new(sample: &'a Sample, kernel: Kernel, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive and finite, got {h}"
            )));
        }
        Ok(SmoothedEstimate { sample, kernel, h })
    }

    pub fn sample(&self) -> &Sample {
        self.sample
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    fn window(&self, x: f64) -> (usize, usize) {
        let r = self.kernel.window_radius() * self.h;
        let vals = &self.sample.values;
        let lo = vals.partition_point(|&v| v <= x - r);
        let hi = vals.partition_point(|&v| v < x + r);
        (lo, hi)
    }

    /// F̂_h(x) = n⁻¹ Σ K((x − X_i)/h).
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let vals = &self.sample.values;
        let mut acc = 0.0;
        for &v in &vals[lo..hi] {
            acc += self.kernel.cdf((x - v) / self.h);
        }
        (lo as f64 + acc) / self.sample.n() as f64
    }

    /// f̂_h(x) = (nh)⁻¹ Σ k((x − X_i)/h).
    pub fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let vals = &self.sample.values;
        let mut acc = 0.0;
        for &v in &vals[lo..hi] {
            acc += self.kernel.pdf((x - v) / self.h);
        }
        acc / (self.sample.n() as f64 * self.h)
    }

    /// f̂'_h(x) = (nh²)⁻¹ Σ k'((x − X_i)/h).
    pub fn pdf_deriv(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let vals = &self.sample.values;
        let mut acc = 0.0;
        for &v in &vals[lo..hi] {
            acc += self.kernel.deriv((x - v) / self.h);
        }
        acc / (self.sample.n() as f64 * self.h * self.h)
    }

    /// Z_n(x) = √n (F̂_h(x) − F_n(x)), with F_n taken at `side`; F̂_h is
    /// continuous so only the empirical CDF distinguishes the sides.
    pub fn z(&self, x: f64, side: Side) -> f64 {
        (self.sample.n() as f64).sqrt() * (self.cdf(x) - self.sample.ecdf(x, side))
    }

    /// Exact maximum of |Z_n| over the line together with its location,
    /// computed by scanning the 2n jump candidates X_i and X_i−.
    pub fn z_max_abs(&self) -> (f64, f64) {
        let nf = self.sample.n() as f64;
        let sqrt_n = nf.sqrt();
        let mut best = (f64::NEG_INFINITY, self.sample.values[0]);
        self.scan_jumps(|x, fhat, le, lt| {
            let z_at = (sqrt_n * (fhat - le as f64 / nf)).abs();
            let z_left = (sqrt_n * (fhat - lt as f64 / nf)).abs();
            let z = z_at.max(z_left);
            if z > best.0 {
                best = (z, x);
            }
            false
        });
        best
    }

    /// Whether max |Z_n| >= c, with early exit on the first witness.
    pub fn z_exceeds(&self, c: f64) -> bool {
        let nf = self.sample.n() as f64;
        let sqrt_n = nf.sqrt();
        let mut hit = false;
        self.scan_jumps(|_, fhat, le, lt| {
            let z_at = (sqrt_n * (fhat - le as f64 / nf)).abs();
            let z_left = (sqrt_n * (fhat - lt as f64 / nf)).abs();
            if z_at >= c || z_left >= c {
                hit = true;
                return true;
            }
            false
        });
        hit
    }

    /// F̂_h at a nondecreasing sequence of query points.
    pub fn cdf_at_sorted(&self, xs: &[f64]) -> Vec<f64> {
        debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        match self.kernel {
            Kernel::Epanechnikov => {
                let mut sweep = EpanSweep::new(&self.sample.values, self.h);
                let n = self.sample.n() as f64;
                xs.iter().map(|&x| sweep.raw_sum(x) / n).collect()
            }
            _ => xs.iter().map(|&x| self.cdf(x)).collect(),
        }
    }

    /// Visit every distinct observation once (ties collapsed) with the
    /// exact F̂_h value and the <=/< counts there. The visitor returns
    /// `true` to stop early.
    fn scan_jumps<F>(&self, mut visit: F)
    where
        F: FnMut(f64, f64, usize, usize) -> bool,
    {
        let vals = &self.sample.values;
        let n = vals.len();
        let nf = n as f64;
        let mut sweep = match self.kernel {
            Kernel::Epanechnikov => Some(EpanSweep::new(vals, self.h)),
            _ => None,
        };
        let mut i = 0;
        while i < n {
            let x = vals[i];
            let mut j = i + 1;
            while j < n && vals[j] == x {
                j += 1;
            }
            let fhat = match sweep.as_mut() {
                Some(s) => s.raw_sum(x) / nf,
                None => self.cdf(x),
            };
            if visit(x, fhat, j, i) {
                return;
            }
            i = j;
        }
    }
}

/// Exact O(n) sweep for the Epanechnikov smoothed CDF at ascending query
/// points. K on the open window (x−h, x+h) is the cubic
/// (2 + 3u − u³)/4, so the window sum reduces to the first three power
/// sums of the windowed data. Those are maintained incrementally around a
/// rolling center (re-anchored once the query drifts more than h/2) so
/// every accumulated term is O(h) and the result is exact to roundoff.
struct EpanSweep<'a> {
    values: &'a [f64],
    h: f64,
    lo: usize,
    hi: usize,
    center: f64,
    s1: f64,
    s2: f64,
    s3: f64,
    last_x: f64,
}

impl<'a> EpanSweep<'a> {
    fn new(values: &'a [f64], h: f64) -> Self {
        EpanSweep {
            values,
            h,
            lo: 0,
            hi: 0,
            center: f64::NAN,
            s1: 0.0,
            s2: 0.0,
            s3: 0.0,
            last_x: f64::NEG_INFINITY,
        }
    }

    /// Returns lo_count + Σ_{window} K((x − v)/h); divide by n for F̂_h.
    fn raw_sum(&mut self, x: f64) -> f64 {
        debug_assert!(x >= self.last_x, "queries must be nondecreasing");
        self.last_x = x;
        let h = self.h;
        if !self.center.is_finite() {
            self.center = x;
        }
        while self.hi < self.values.len() && self.values[self.hi] < x + h {
            let d = self.values[self.hi] - self.center;
            self.s1 += d;
            self.s2 += d * d;
            self.s3 += d * d * d;
            self.hi += 1;
        }
        while self.lo < self.hi && self.values[self.lo] <= x - h {
            let d = self.values[self.lo] - self.center;
            self.s1 -= d;
            self.s2 -= d * d;
            self.s3 -= d * d * d;
            self.lo += 1;
        }
        if (x - self.center).abs() > 0.5 * h {
            self.center = x;
            self.s1 = 0.0;
            self.s2 = 0.0;
            self.s3 = 0.0;
            for &v in &self.values[self.lo..self.hi] {
                let d = v - self.center;
                self.s1 += d;
                self.s2 += d * d;
                self.s3 += d * d * d;
            }
        }
        let w = (self.hi - self.lo) as f64;
        let dx = x - self.center;
        let su = (w * dx - self.s1) / h;
        let su3 = (((dx * dx * dx) * w - 3.0 * dx * dx * self.s1) + 3.0 * dx * self.s2 - self.s3)
            / (h * h * h);
        self.lo as f64 + 0.25 * (2.0 * w + 3.0 * su - su3)
    }
}
