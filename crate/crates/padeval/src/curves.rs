//! Curve data behind the plots: probit warping, DET series, rate-vs-threshold
//! (EER) series, and Gaussian kernel density estimates of score
//! distributions.

use crate::error::{Error, Result};
use crate::metrics::{self, EerResult, Selector, SweepIndex, ThresholdGrid};
use crate::scores::ScoreSet;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// erfc via W. J. Cody's rational approximations (three regimes), accurate
/// to near machine precision over the range that matters here.
#[allow(clippy::excessive_precision)]
pub(crate) fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        return 1.0 - erf_small(x);
    }
    let v = if y <= 4.0 {
        const C: [f64; 8] = [
            5.64188496988670089e-1,
            8.88314979438837594e0,
            6.61191906371416295e1,
            2.98635138197400131e2,
            8.81952221241769090e2,
            1.71204761263407058e3,
            2.05107837782607147e3,
            1.23033935479799725e3,
        ];
        const D: [f64; 8] = [
            1.57449261107098347e1,
            1.17693950891312499e2,
            5.37181101862009858e2,
            1.62138957456669019e3,
            3.29079923573345963e3,
            4.36261909014324716e3,
            3.43936767414372164e3,
            1.23033935480374942e3,
        ];
        let mut num = 2.15311535474403846e-8 * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        let ratio = (num + C[7]) / (den + D[7]);
        exp_nxx(y) * ratio
    } else if y < 26.543 {
        const P: [f64; 5] = [
            3.05326634961232344e-1,
            3.60344899949804439e-1,
            1.25781726111229246e-1,
            1.60837851487422766e-2,
            6.58749161529837803e-4,
        ];
        const Q: [f64; 5] = [
            2.56852019228982242e0,
            1.87295284992346047e0,
            5.27905102951428412e-1,
            6.05183413124413191e-2,
            2.33520497626869185e-3,
        ];
        const INV_SQRT_PI: f64 = 5.6418958354775628695e-1;
        let z = 1.0 / (y * y);
        let mut num = 1.63153871373020978e-2 * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let ratio = z * (num + P[4]) / (den + Q[4]);
        exp_nxx(y) * (INV_SQRT_PI - ratio) / y
    } else {
        0.0
    };
    if x < 0.0 {
        2.0 - v
    } else {
        v
    }
}

/// exp(-y²) split as exp(-ysq²)·exp(-(y-ysq)(y+ysq)) with ysq truncated to
/// 1/16ths, reducing cancellation in the exponent.
fn exp_nxx(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// erf on |x| ≤ 0.46875.
#[allow(clippy::excessive_precision)]
fn erf_small(x: f64) -> f64 {
    const A: [f64; 4] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    let z = x * x;
    let mut num = 1.85777706184603153e-1 * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    x * (num + A[3]) / (den + B[3])
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Peter Acklam's rational approximation of the normal quantile,
/// relative error below 1.15e-9 on (0, 1).
#[allow(clippy::excessive_precision)]
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Inverse standard normal CDF: rational approximation plus one Halley
/// refinement step against the erfc-based CDF.
pub fn probit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityRange(p));
    }
    let x = acklam(p);
    let e = normal_cdf(x) - p;
    let u = e / normal_pdf(x);
    Ok(x - u / (1.0 + 0.5 * x * u))
}

/// One point of a DET series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub tau: f64,
    pub apcer: f64,
    pub bpcer: f64,
}

/// Ordered (τ, APCER, BPCER) triples for one species; τ strictly increasing,
/// APCER non-increasing, BPCER non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub label: String,
    pub points: Vec<CurvePoint>,
}

/// Evaluates the (APCER, BPCER) trade-off for one species over the full
/// threshold grid, dropping consecutive duplicate rate pairs.
pub fn det_curve(set: &ScoreSet, species: &str) -> Result<CurveSeries> {
    let indices = metrics::resolve_selector(set, &Selector::Species(species.to_string()))?;
    let grid = ThresholdGrid::from_set(set);
    let index = SweepIndex::new(set);
    let mut points: Vec<CurvePoint> = Vec::with_capacity(grid.len());
    for &tau in grid.thresholds() {
        let apcer = index.apcer(indices[0], tau);
        let bpcer = index.bpcer(tau);
        if let Some(last) = points.last() {
            if last.apcer == apcer && last.bpcer == bpcer {
                continue;
            }
        }
        points.push(CurvePoint { tau, apcer, bpcer });
    }
    Ok(CurveSeries {
        label: species.to_string(),
        points,
    })
}

/// Rate-vs-threshold series for the EER convergence plot.
#[derive(Debug, Clone, PartialEq)]
pub struct EerCurve {
    pub species: String,
    /// (τ, APCER) over the grid.
    pub apcer: Vec<(f64, f64)>,
    /// (τ, BPCER) over the grid.
    pub bpcer: Vec<(f64, f64)>,
    pub crossing: EerResult,
}

/// BPCER(τ) and APCER(τ) series over the grid with the crossing marked.
pub fn eer_curve(set: &ScoreSet, species: &str) -> Result<EerCurve> {
    let sel = Selector::Species(species.to_string());
    let indices = metrics::resolve_selector(set, &sel)?;
    let grid = ThresholdGrid::from_set(set);
    let index = SweepIndex::new(set);
    let mut apcer = Vec::with_capacity(grid.len());
    let mut bpcer = Vec::with_capacity(grid.len());
    for &tau in grid.thresholds() {
        apcer.push((tau, index.apcer(indices[0], tau)));
        bpcer.push((tau, index.bpcer(tau)));
    }
    let crossing = metrics::eer(set, &sel)?;
    Ok(EerCurve {
        species: species.to_string(),
        apcer,
        bpcer,
        crossing,
    })
}

/// A kernel density estimate sampled at fixed abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySeries {
    pub class_label: String,
    pub xs: Vec<f64>,
    pub densities: Vec<f64>,
    pub bandwidth: f64,
}

/// Silverman's rule of thumb, floored at 1e-3 to survive near-constant
/// score piles: h = 0.9·min(σ, IQR/1.34)·n^(-1/5).
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    let sigma = var.sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = sigma.min(iqr / 1.34);
    (0.9 * spread * n.powf(-0.2)).max(1e-3)
}

/// Linear-interpolation quantile of pre-sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Gaussian-kernel density estimate of `samples` evaluated at `xs`
/// (strictly increasing abscissae in [0, 1]). `bandwidth` of `None` selects
/// the Silverman rule.
pub fn kde(
    class_label: &str,
    samples: &[f64],
    xs: &[f64],
    bandwidth: Option<f64>,
) -> Result<DensitySeries> {
    if samples.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "kde needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if xs.is_empty() {
        return Err(Error::EmptyInput("kde abscissae are empty".into()));
    }
    for w in xs.windows(2) {
        if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidParameter(
                "kde abscissae must be strictly increasing".into(),
            ));
        }
    }
    if xs.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::InvalidParameter(
            "kde abscissae must lie in [0, 1]".into(),
        ));
    }
    // canonical sample order makes the f64 sums, and therefore the output,
    // exactly invariant to input order
    let mut samples = samples.to_vec();
    samples.sort_by(f64::total_cmp);
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {h}"
            )))
        }
        None => silverman_bandwidth(&samples),
    };
    let n = samples.len() as f64;
    let densities: Vec<f64> = xs
        .iter()
        .map(|&x| {
            samples
                .iter()
                .map(|&s| normal_pdf((x - s) / h))
                .sum::<f64>()
                / (n * h)
        })
        .collect();
    Ok(DensitySeries {
        class_label: class_label.to_string(),
        xs: xs.to_vec(),
        densities,
        bandwidth: h,
    })
}

/// Evenly spaced abscissae over [0, 1], endpoints included.
pub fn linspace01(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}
