//! Scalar special functions and the exact spherical edge-probability
//! machinery.
//!
//! The inner product of two independent uniform points on the unit sphere
//! in `R^d` has density
//!
//! ```text
//! f_d(x) = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)) * (1 - x^2)_+^{(d-3)/2}
//! ```
//!
//! so tail probabilities reduce to a regularized incomplete beta function
//! after the substitution `u = x^2`. Everything here is evaluated in log
//! space through `ln_gamma` differences so that dimensions up to `1e8`
//! neither overflow nor lose the tail.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

const EPS: f64 = 1e-15;
const FPMIN: f64 = 1e-300;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;

/// Lanczos approximation, g = 7, 9 coefficients. Relative error is below
/// 2e-15 on the positive real axis.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + 7.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// ln Gamma(z + 1/2) - ln Gamma(z) without forming the difference of two
/// huge logs (each carries ~|ln Gamma| * 1e-16 of absolute error, which
/// at z ~ 5e7 would wipe eight digits of the ~9 result).
///
/// For z >= 100 the Stirling series of the two terms is differenced
/// analytically; below that the plain difference is already accurate.
pub(crate) fn ln_gamma_half_ratio(z: f64) -> f64 {
    if z < 100.0 {
        return ln_gamma(z + 0.5) - ln_gamma(z);
    }
    let zh = z + 0.5;
    let t1 = -1.0 / (24.0 * z * zh);
    let t2 = (1.0 / z.powi(3) - 1.0 / zh.powi(3)) / 360.0;
    let t3 = -(1.0 / z.powi(5) - 1.0 / zh.powi(5)) / 1260.0;
    0.5 * z.ln() + z * (0.5 / z).ln_1p() - 0.5 + t1 + t2 + t3
}

/// ln Gamma(z + 1) - z ln z + z, the Stirling residual, again free of the
/// large-argument cancellation; tends to ln sqrt(2 pi z).
pub(crate) fn ln_stirling_residual(z: f64) -> f64 {
    if z < 100.0 {
        return ln_gamma(z + 1.0) - z * z.ln() + z;
    }
    0.5 * (2.0 * std::f64::consts::PI * z).ln() + 1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3))
        + 1.0 / (1260.0 * z.powi(5))
}

// ---------------------------------------------------------------------
// Incomplete gamma (series + continued fraction), used for erfc.
// ---------------------------------------------------------------------

/// Lower regularized incomplete gamma P(a, x) by series; requires x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Log of the upper regularized incomplete gamma Q(a, x) by Lentz's
/// continued fraction; requires x > 0, best for x >= a + 1.
fn ln_gamma_q_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    -x + a * x.ln() - ln_gamma(a) + h.ln()
}

// ---------------------------------------------------------------------
// Error function family and the normal distribution.
// ---------------------------------------------------------------------

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    let x2 = x * x;
    if x2 < 2.25 {
        1.0 - gamma_p_series(0.5, x2)
    } else {
        ln_gamma_q_cf(0.5, x2).exp()
    }
}

/// Log of erfc, finite far into the right tail (erfc(x) underflows near
/// x = 26.6; the log stays representable).
pub fn ln_erfc(x: f64) -> f64 {
    if x < 1.5 {
        erfc(x).ln()
    } else {
        ln_gamma_q_cf(0.5, x * x)
    }
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal survival function 1 - Phi(z).
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Log of the normal survival function, accurate for z up to ~1e4.
pub fn ln_normal_sf(z: f64) -> f64 {
    ln_erfc(z / std::f64::consts::SQRT_2) - std::f64::consts::LN_2
}

/// Quantile of the standard normal: the z with Phi(z) = q.
///
/// Acklam's rational approximation followed by two Newton refinements on
/// the CDF, which brings the residual |Phi(z) - q| below 1e-14.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::param(format!("normal_quantile: q = {q} not in (0,1)")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let mut z = if q < P_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else if q <= 1.0 - P_LOW {
        let r = q - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    } else {
        let r = (-2.0 * (1.0 - q).ln()).sqrt();
        -(((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    for _ in 0..2 {
        // In the tails Phi(z) - q is a difference of tiny numbers; the
        // survival-function form keeps full relative precision on each side.
        let err = if q < 0.5 {
            normal_sf(-z) - q
        } else {
            (1.0 - q) - normal_sf(z)
        };
        let pdf = normal_pdf(z);
        if pdf == 0.0 {
            break;
        }
        z -= err / pdf;
    }
    Ok(z)
}

// ---------------------------------------------------------------------
// Regularized incomplete beta.
// ---------------------------------------------------------------------

/// Log of the complete beta function B(a, b). The half-integer second
/// argument that the sphere tail produces goes through the
/// cancellation-free ratio.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    const LN_GAMMA_HALF: f64 = 0.572_364_942_924_700_1; // ln sqrt(pi)
    if b == 0.5 {
        return LN_GAMMA_HALF - ln_gamma_half_ratio(a);
    }
    if a == 0.5 {
        return LN_GAMMA_HALF - ln_gamma_half_ratio(b);
    }
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lentz continued fraction for the incomplete beta. Returns `None` when
/// the fraction has not met the tolerance within the iteration cap, which
/// signals the caller to fall back to quadrature.
fn beta_cf(a: f64, b: f64, x: f64) -> Option<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=20_000u32 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Some(h);
        }
    }
    None
}

/// Front factor and continued fraction for I_x(a, b), with the complement
/// of x supplied so the log of a near-1 argument keeps full precision.
fn beta_inc_front_cf(a: f64, b: f64, x: f64, xc: f64) -> Option<f64> {
    let ln_x = if x > 0.5 { (-xc).ln_1p() } else { x.ln() };
    let ln_xc = if xc > 0.5 { (-x).ln_1p() } else { xc.ln() };
    let ln_front = a * ln_x + b * ln_xc - ln_beta(a, b) - a.ln();
    let cf = beta_cf(a, b, x)?;
    Some((ln_front + cf.abs().ln()).exp() * cf.signum())
}

/// Regularized incomplete beta I_x(a, b) with the complement `xc = 1 - x`
/// supplied by the caller so that no precision is lost when x is close to
/// either endpoint. Swaps to the complementary fraction when x lies past
/// the usual convergence cutoff.
fn beta_inc_with_complement(a: f64, b: f64, x: f64, xc: f64) -> Option<f64> {
    if x <= 0.0 {
        return Some(0.0);
    }
    if xc <= 0.0 {
        return Some(1.0);
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        beta_inc_front_cf(a, b, x, xc)
    } else {
        Some(1.0 - beta_inc_front_cf(b, a, xc, x)?)
    }
}

/// Regularized incomplete beta function I_x(a, b).
pub fn beta_inc_reg(a: f64, b: f64, x: f64) -> Result<f64> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::param("beta_inc_reg: a, b must be positive"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(format!("beta_inc_reg: x = {x} outside [0,1]")));
    }
    beta_inc_with_complement(a, b, x, 1.0 - x)
        .ok_or_else(|| Error::numerical("beta continued fraction stalled"))
}

// ---------------------------------------------------------------------
// Spherical edge probabilities.
// ---------------------------------------------------------------------

fn check_dim(d: u32) -> Result<f64> {
    if d < 3 {
        return Err(Error::param(format!("dimension d = {d} must be >= 3")));
    }
    Ok(d as f64)
}

/// ln(1 - t^2) at full relative precision: through ln_1p of the exact
/// square for small |t|, through the (exact by Sterbenz) difference 1 - |t|
/// otherwise.
fn ln_one_minus_sq(t: f64) -> f64 {
    let ta = t.abs();
    if ta < 0.5 {
        (-ta * ta).ln_1p()
    } else {
        (1.0 - ta).ln() + (1.0 + ta).ln()
    }
}

/// Density of the inner product of two independent uniform points on the
/// unit sphere in `R^d`.
pub fn surface_density(x: f64, d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    if x.abs() >= 1.0 {
        return Ok(0.0);
    }
    let ln_c = ln_gamma_half_ratio(0.5 * (df - 1.0)) - 0.5 * std::f64::consts::PI.ln();
    let ln_supp = 0.5 * (df - 3.0) * ln_one_minus_sq(x);
    Ok((ln_c + ln_supp).exp())
}

/// Upper tail of the sphere inner-product density for 0 <= t < 1, by
/// adaptive quadrature of the log-space integrand with t kept exact:
///
/// ```text
/// integral = f_d(t) * int_0^{s_max} exp(a' ln((1-(t+s)^2)/(1-t^2))) ds
/// ```
///
/// Every evaluation goes through ln_1p of an exactly-formed small ratio,
/// so the result retains full relative precision even when d ~ 1e8 makes
/// 1 - t^2 unrepresentable at the needed granularity.
fn edge_tail_quadrature(t: f64, d: u32) -> f64 {
    let df = d as f64;
    let ap = 0.5 * (df - 3.0);
    let x1t2 = (1.0 - t) * (1.0 + t);
    // decay rate of the integrand; integrate out to 45 e-foldings
    let lambda = ((df - 3.0) * t / x1t2).max(1.0);
    let s_max = (45.0 / lambda).min(1.0 - t);
    let ln_at_t = ln_one_minus_sq(t);
    let shape = |s: f64| {
        let u = t + s;
        (ap * (ln_one_minus_sq(u.min(1.0)) - ln_at_t)).exp()
    };
    let f_t = surface_density(t, d).unwrap_or(0.0);
    if f_t == 0.0 {
        return 0.0;
    }
    f_t * adaptive_simpson(&shape, 0.0, s_max, 1e-13 / lambda)
}

/// Exact edge probability Pr[<X, Y> >= t] for independent uniform sphere
/// points: the upper tail of `surface_density`.
///
/// The tail is `0.5 * I_{1-t^2}((d-1)/2, 1/2)` for t >= 0, and the route
/// to it is a conditioning question, not just convergence:
///
/// - moderate tails (a t^2 <= 2): complementary fraction
///   `0.5 (1 - I_{t^2}(1/2, a))`, whose argument t^2 is exact and whose
///   final subtraction cancels at most ~20x;
/// - small tails at t >= 0.07: direct fraction `0.5 I_{1-t^2}(a, 1/2)`
///   (log of the near-1 argument through the complement); its internal
///   cancellation grows like 1/t^2, so small t is excluded;
/// - otherwise (tiny t with huge d): log-space quadrature, which is
///   uniformly well conditioned. The same quadrature backs a stalled
///   fraction.
pub fn edge_prob_exact(t: f64, d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    if t <= -1.0 {
        return Ok(1.0);
    }
    if t >= 1.0 {
        return Ok(0.0);
    }
    let ta = t.abs();
    let a = 0.5 * (df - 1.0);
    let x = (1.0 - ta) * (1.0 + ta);
    let xc = ta * ta;
    let upper = if a * xc <= 2.0 {
        beta_inc_front_cf(0.5, a, xc, x)
            .map(|i| 0.5 * (1.0 - i))
            .unwrap_or_else(|| edge_tail_quadrature(ta, d))
    } else if ta >= 0.07 {
        beta_inc_front_cf(a, 0.5, x, xc)
            .map(|i| 0.5 * i)
            .unwrap_or_else(|| edge_tail_quadrature(ta, d))
    } else {
        edge_tail_quadrature(ta, d)
    };
    Ok(if t >= 0.0 { upper } else { 1.0 - upper })
}

/// Derivative of `edge_prob_exact` in t is `-surface_density(t, d)`; used
/// by the threshold solver.
fn edge_prob_deriv(t: f64, d: u32) -> f64 {
    -surface_density(t, d).unwrap_or(0.0)
}

/// The threshold t such that `edge_prob_exact(t, d) = p`.
///
/// Bisection brings the bracket below 1e-6, then guarded Newton steps with
/// the analytic derivative finish to |dt| < 1e-13.
pub fn threshold(p: f64, d: u32) -> Result<f64> {
    check_dim(d)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("threshold: p = {p} not in (0,1)")));
    }
    // solve on the tail side: for p > 1/2 the residual edge_prob - p would
    // be swamped by rounding, but 1 - p is exact and f_d is even
    if p > 0.5 {
        return Ok(-threshold(1.0 - p, d)?);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    // edge_prob_exact is nonincreasing in t
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if edge_prob_exact(mid, d)? > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..60 {
        let f = edge_prob_exact(t, d)? - p;
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let df = edge_prob_deriv(t, d);
        let mut step = if df != 0.0 { -f / df } else { 0.0 };
        let mut t_new = t + step;
        if step == 0.0 || t_new <= lo || t_new >= hi {
            t_new = 0.5 * (lo + hi);
            step = t_new - t;
        }
        t = t_new;
        if step.abs() < 1e-13 {
            break;
        }
    }
    Ok(t)
}

/// Gaussian surrogate edge probability `p0 = 1 - Phi(sqrt(d) t)`, the
/// probability that a N(0, 1/d) variable exceeds t.
pub fn gaussian_edge_prob(t: f64, d: u32) -> f64 {
    let df = d as f64;
    normal_sf(df.sqrt() * t)
}

/// Log of `gaussian_edge_prob`, safe for sqrt(d)*t up to ~1e4.
pub fn ln_gaussian_edge_prob(t: f64, d: u32) -> f64 {
    let df = d as f64;
    ln_normal_sf(df.sqrt() * t)
}

/// Leading-order prediction for the ratio p / p0: `1 - d t^4 / 4`.
pub fn pp0_prediction(t: f64, d: u32) -> f64 {
    let df = d as f64;
    1.0 - df * t.powi(4) / 4.0
}

// ---------------------------------------------------------------------
// Model parameter bundle.
// ---------------------------------------------------------------------

/// The parameters of one spherical random-graph model instance: vertex
/// count, ambient dimension, edge probability, its threshold, and the
/// Gaussian surrogate probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub d: u32,
    pub p: f64,
    pub t: f64,
    pub p0: f64,
}

impl ModelParams {
    /// Build from a target edge probability; solves for the threshold.
    pub fn from_edge_prob(n: usize, d: u32, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n must be positive"));
        }
        let t = threshold(p, d)?;
        let p0 = gaussian_edge_prob(t, d);
        Ok(ModelParams { n, d, p, t, p0 })
    }

    /// Build from a threshold; computes the exact edge probability.
    pub fn from_threshold(n: usize, d: u32, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n must be positive"));
        }
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::param(format!("threshold t = {t} outside [-1,1]")));
        }
        let p = edge_prob_exact(t, d)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!(
                "threshold t = {t} gives degenerate edge probability {p}"
            )));
        }
        let p0 = gaussian_edge_prob(t, d);
        Ok(ModelParams { n, d, p, t, p0 })
    }
}
