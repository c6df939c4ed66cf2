//! Tempo distributions: fixed-width histograms, the histogram CDF smoothed
//! by a monotone cubic whose derivative serves as a density, and Gaussian
//! kernel density estimates.

use crate::error::{Error, Result};

pub const DEFAULT_BIN_WIDTH: f64 = 2.0;
pub const DEFAULT_BIN_ORIGIN: f64 = 0.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bin_edges: Vec<f64>,
    counts: Vec<u64>,
    relative: Vec<f64>,
}

impl Histogram {
    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn relative(&self) -> &[f64] {
        &self.relative
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }
}

/// Bins at `origin + k * bin_width` spanning `[min, max]`. Bins are
/// half-open `[e_k, e_{k+1})` except the last, which is closed.
pub fn build_histogram(values: &[f64], bin_width: f64, origin: f64) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::domain("histogram of an empty sample"));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) || !origin.is_finite() {
        return Err(Error::domain(format!(
            "invalid bin width {bin_width} or origin {origin}"
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite value {v}")));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let edge = |k: i64| origin + k as f64 * bin_width;
    let mut k_lo = ((min - origin) / bin_width).floor() as i64;
    let mut k_hi = ((max - origin) / bin_width).ceil() as i64;
    // the quotient can round across an edge
    while edge(k_lo) > min {
        k_lo -= 1;
    }
    while edge(k_hi) < max {
        k_hi += 1;
    }
    let bins = (k_hi - k_lo).max(1) as usize;
    let bin_edges: Vec<f64> = (0..=bins as i64).map(|j| edge(k_lo + j)).collect();

    let mut counts = vec![0_u64; bins];
    for &v in values {
        // the upper edges bin_edges[1..] are ascending; count those <= v
        let idx = bin_edges[1..].partition_point(|&e| e <= v).min(bins - 1);
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    let relative = counts.iter().map(|&c| c as f64 / total).collect();
    Ok(Histogram {
        bin_edges,
        counts,
        relative,
    })
}

/// Cumulative fractions at bin right edges, anchored by `(left edge, 0)`.
/// The last fraction is exactly 1.
pub fn empirical_cdf(hist: &Histogram) -> Result<Vec<(f64, f64)>> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::domain("empirical CDF of an empty histogram"));
    }
    let mut points = Vec::with_capacity(hist.counts.len() + 1);
    points.push((hist.bin_edges[0], 0.0));
    let mut cum = 0_u64;
    for (i, &c) in hist.counts.iter().enumerate() {
        cum += c;
        points.push((hist.bin_edges[i + 1], cum as f64 / total as f64));
    }
    Ok(points)
}

/// Density obtained by differentiating a monotone cubic Hermite
/// interpolant of a CDF with zero slope at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPdf {
    knots: Vec<f64>,
    cdf: Vec<f64>,
    slopes: Vec<f64>,
}

impl SmoothPdf {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Interpolated CDF values at the knots.
    pub fn knot_values(&self) -> &[f64] {
        &self.cdf
    }

    /// Fitted slopes at the knots (the density there).
    pub fn knot_slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn min(&self) -> f64 {
        self.knots[0]
    }

    pub fn max(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    fn interval(&self, x: f64) -> usize {
        let n = self.knots.len();
        self.knots[..n - 1]
            .partition_point(|&k| k <= x)
            .saturating_sub(1)
            .min(n - 2)
    }

    /// Interpolated CDF; 0 below the support and 1 above.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.min() {
            return self.cdf[0];
        }
        if x >= self.max() {
            return *self.cdf.last().unwrap();
        }
        let k = self.interval(x);
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.cdf[k] + h10 * h * self.slopes[k] + h01 * self.cdf[k + 1] + h11 * h * self.slopes[k + 1]
    }

    /// Derivative of [`Self::cdf`]; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        if !(x >= self.min() && x <= self.max()) {
            return 0.0;
        }
        let k = self.interval(x);
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d11 = 3.0 * t2 - 2.0 * t;
        let v = d00 * (self.cdf[k] - self.cdf[k + 1]) / h + d10 * self.slopes[k] + d11 * self.slopes[k + 1];
        // monotone slopes make this nonnegative; clear rounding residue
        v.max(0.0)
    }
}

/// Fits the smoothed density to CDF points `(x, F)`.
///
/// Slopes start from the mean of adjacent secants (zero at the ends and
/// across flat intervals) and are then limited with the Fritsch–Carlson
/// condition `alpha^2 + beta^2 <= 9`, which keeps every cubic piece
/// nondecreasing.
pub fn spline_pdf(cdf_points: &[(f64, f64)]) -> Result<SmoothPdf> {
    let n = cdf_points.len();
    if n < 3 {
        return Err(Error::domain(format!(
            "spline PDF needs at least 3 CDF points, got {n}"
        )));
    }
    let knots: Vec<f64> = cdf_points.iter().map(|p| p.0).collect();
    let cdf: Vec<f64> = cdf_points.iter().map(|p| p.1).collect();
    if knots.iter().chain(&cdf).any(|v| !v.is_finite()) {
        return Err(Error::domain("CDF points must be finite"));
    }
    if knots.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("CDF abscissae must be strictly increasing"));
    }
    if cdf.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("CDF values must be nondecreasing"));
    }
    if cdf[0] != 0.0 || cdf[n - 1] != 1.0 {
        return Err(Error::domain("CDF must run from 0 to 1"));
    }

    let secants: Vec<f64> = (0..n - 1)
        .map(|k| (cdf[k + 1] - cdf[k]) / (knots[k + 1] - knots[k]))
        .collect();
    let mut slopes = vec![0.0; n];
    for k in 1..n - 1 {
        let (a, b) = (secants[k - 1], secants[k]);
        slopes[k] = if a == 0.0 || b == 0.0 { 0.0 } else { (a + b) / 2.0 };
    }
    for (k, &s) in secants.iter().enumerate() {
        if s == 0.0 {
            slopes[k] = 0.0;
            slopes[k + 1] = 0.0;
            continue;
        }
        let alpha = slopes[k] / s;
        let beta = slopes[k + 1] / s;
        let r2 = alpha * alpha + beta * beta;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            slopes[k] = tau * alpha * s;
            slopes[k + 1] = tau * beta * s;
        }
    }
    slopes[0] = 0.0;
    slopes[n - 1] = 0.0;
    Ok(SmoothPdf { knots, cdf, slopes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Silverman's rule of thumb.
    Auto,
    Fixed(f64),
}

/// Gaussian kernel density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDensity {
    sample: Vec<f64>,
    bandwidth: f64,
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

impl KernelDensity {
    pub fn sample(&self) -> &[f64] {
        &self.sample
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self
            .sample
            .iter()
            .map(|&v| {
                let z = (x - v) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        sum * INV_SQRT_2PI / (self.sample.len() as f64 * h)
    }

    /// `[min - pad*h, max + pad*h]`
    pub fn support(&self, pad: f64) -> (f64, f64) {
        let min = self.sample.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min - pad * self.bandwidth, max + pad * self.bandwidth)
    }
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// `0.9 * min(s, IQR/1.34) * n^(-1/5)`, with `s` the sample standard
/// deviation. An IQR of zero falls back to `s` alone.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::domain("automatic bandwidth needs at least 2 values"));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * (n as f64).powf(-0.2);
    if !(h > 0.0) {
        return Err(Error::domain(
            "automatic bandwidth is zero (all values identical); supply an explicit bandwidth",
        ));
    }
    Ok(h)
}

pub fn kde(values: &[f64], bandwidth: Bandwidth) -> Result<KernelDensity> {
    if values.is_empty() {
        return Err(Error::domain("kernel density of an empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("sample values must be finite"));
    }
    let h = match bandwidth {
        Bandwidth::Auto => silverman_bandwidth(values)?,
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed(h) => return Err(Error::domain(format!("bandwidth must be positive, got {h}"))),
    };
    Ok(KernelDensity {
        sample: values.to_vec(),
        bandwidth: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_single_value() {
        let h = build_histogram(&[240.0; 10], 2.0, 0.0).unwrap();
        assert_eq!(h.bin_edges(), &[240.0, 242.0]);
        assert_eq!(h.counts(), &[10]);
        assert_eq!(h.relative(), &[1.0]);
    }

    #[test]
    fn histogram_edge_assignment() {
        let h = build_histogram(&[239.0, 241.0], 2.0, 0.0).unwrap();
        assert_eq!(h.bin_edges(), &[238.0, 240.0, 242.0]);
        assert_eq!(h.counts(), &[1, 1]);
        // max on an edge lands in the closed last bin
        let h = build_histogram(&[239.0, 242.0], 2.0, 0.0).unwrap();
        assert_eq!(h.bin_edges(), &[238.0, 240.0, 242.0]);
        assert_eq!(h.counts(), &[1, 1]);
        // interior edge value goes right
        let h = build_histogram(&[239.0, 240.0, 243.0], 2.0, 0.0).unwrap();
        assert_eq!(h.counts(), &[1, 1, 1]);
        let h = build_histogram(&[1.0, 2.0], 2.0, 1.0).unwrap();
        assert_eq!(h.bin_edges(), &[1.0, 3.0]);
    }

    #[test]
    fn histogram_errors() {
        assert!(build_histogram(&[], 2.0, 0.0).is_err());
        assert!(build_histogram(&[1.0], 0.0, 0.0).is_err());
        assert!(build_histogram(&[f64::NAN], 2.0, 0.0).is_err());
    }

    #[test]
    fn cdf_examples() {
        let h = build_histogram(&[241.0], 2.0, 0.0).unwrap();
        assert_eq!(empirical_cdf(&h).unwrap(), vec![(240.0, 0.0), (242.0, 1.0)]);
        let h = build_histogram(&[239.0, 241.0], 2.0, 0.0).unwrap();
        assert_eq!(
            empirical_cdf(&h).unwrap(),
            vec![(238.0, 0.0), (240.0, 0.5), (242.0, 1.0)]
        );
    }

    #[test]
    fn spline_symmetric_two_bins() {
        let pdf = spline_pdf(&[(238.0, 0.0), (240.0, 0.5), (242.0, 1.0)]).unwrap();
        for i in 0..=100 {
            let d = i as f64 * 0.02;
            let a = pdf.density(240.0 - d);
            let b = pdf.density(240.0 + d);
            assert!((a - b).abs() < 1e-12, "{a} vs {b} at {d}");
        }
        assert_eq!(pdf.density(238.0), 0.0);
        assert_eq!(pdf.density(242.0), 0.0);
    }

    #[test]
    fn spline_errors() {
        assert!(spline_pdf(&[(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(spline_pdf(&[(0.0, 0.0), (1.0, 0.6), (2.0, 0.5), (3.0, 1.0)]).is_err());
        assert!(spline_pdf(&[(0.0, 0.0), (0.0, 0.5), (2.0, 1.0)]).is_err());
        assert!(spline_pdf(&[(0.0, 0.1), (1.0, 0.5), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn spline_flat_interval_has_zero_density() {
        let pdf = spline_pdf(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.5), (3.0, 1.0)]).unwrap();
        for i in 0..=10 {
            assert_eq!(pdf.density(1.0 + i as f64 * 0.1), 0.0);
        }
    }

    #[test]
    fn kde_symmetry_and_errors() {
        let k = kde(&[170.0, 175.0, 180.0, 185.0, 190.0], Bandwidth::Auto).unwrap();
        for d in [0.5, 3.0, 11.0] {
            let a = k.evaluate(180.0 - d);
            let b = k.evaluate(180.0 + d);
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300), "{a} {b}");
        }
        assert!(kde(&[], Bandwidth::Auto).is_err());
        assert!(kde(&[5.0, 5.0, 5.0], Bandwidth::Auto).is_err());
        assert!(kde(&[5.0, 5.0, 5.0], Bandwidth::Fixed(1.0)).is_ok());
        assert!(kde(&[5.0], Bandwidth::Fixed(0.0)).is_err());
    }

    #[test]
    fn silverman_reference_value() {
        // sd = sqrt(2.5), IQR = 2 -> min(1.5811, 1.4925) = 1.4925
        let h = silverman_bandwidth(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let expect = 0.9 * (2.0 / 1.34) * 5f64.powf(-0.2);
        assert!((h - expect).abs() < 1e-12);
        // zero IQR falls back to the standard deviation
        let h = silverman_bandwidth(&[1.0, 1.0, 1.0, 1.0, 1.0, 6.0]).unwrap();
        assert!(h > 0.0);
    }
}
