//! Characteristic functions of Wishart-type matrices.
//!
//! `wishart_cf` evaluates the closed determinant form for the Gram matrix
//! of d independent standard normal vectors. For the Gram matrix of unit
//! sphere vectors (the hollow "spherical" variant) no closed form exists;
//! `spherical_wishart_cf` estimates it by averaging the steepest-descent
//! integrand over the diagonal contour `beta(u) = e^{iu}/sinc(u)`, whose
//! pullback density `eta_d` on (-pi, pi)^n is sampled by rejection under a
//! Gaussian envelope.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeSet;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::graphs::sample_sphere_points;
use crate::mat::{logdet_dense_rhp, real_sym_is_pd, real_sym_ln_det, ComplexSymMatrix};
use crate::mc::{complex_batch_stats, map_indexed, round_up_to_batches, McEstimate, Streams, MIN_BATCHES};
use crate::special::{ln_gamma, ln_stirling_residual};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

// ---------------------------------------------------------------------
// The contour map beta and friends.
// ---------------------------------------------------------------------

/// sinc(u) = sin(u)/u with the removable singularity filled in.
fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

/// u cot u + log sinc u - 1, the exponent driving eta_d. Series below
/// |u| < 1e-4 avoids the cancellation of the two terms against 1.
fn eta_exponent(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        -u2 / 2.0 - u2 * u2 / 36.0 - u2 * u2 * u2 / 405.0
    } else {
        u / u.tan() + sinc(u).ln() - 1.0
    }
}

/// Re beta'(u) = cot u - u csc^2 u (odd; the imaginary part of beta' is 1).
fn beta_prime_re(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        -2.0 * u / 3.0 - 4.0 * u * u2 / 45.0 - 4.0 * u * u2 * u2 / 315.0
    } else {
        let s = u.sin();
        1.0 / u.tan() - u / (s * s)
    }
}

fn check_contour_arg(u: f64) -> Result<()> {
    if u.abs() >= std::f64::consts::PI {
        return Err(Error::domain(format!(
            "contour parameter |u| = {} is outside (-pi, pi)",
            u.abs()
        )));
    }
    Ok(())
}

/// The diagonal contour point beta(u) = u cot u + i u = e^{iu}/sinc u.
pub fn beta_point(u: f64) -> Result<Complex64> {
    check_contour_arg(u)?;
    let re = if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 3.0 - u2 * u2 / 45.0
    } else {
        u / u.tan()
    };
    Ok(Complex64::new(re, u))
}

/// beta'(u) = cot u - u csc^2 u + i.
pub fn beta_prime(u: f64) -> Result<Complex64> {
    check_contour_arg(u)?;
    Ok(Complex64::new(beta_prime_re(u), 1.0))
}

/// 1/beta(u) = sinc(u) e^{-iu}, the factor the integrand actually needs.
fn beta_inv(u: f64) -> Complex64 {
    Complex64::from_polar(sinc(u), -u)
}

// ---------------------------------------------------------------------
// eta_d density and sampler.
// ---------------------------------------------------------------------

fn check_dim(d: u32) -> Result<f64> {
    if d < 3 {
        return Err(Error::param(format!("dimension d = {d} must be >= 3")));
    }
    Ok(d as f64)
}

/// ln of the normalizing constant of eta_d including the e^{d/2} from the
/// exponent recentred by `eta_exponent`: ln Gamma(d/2 + 1) - (d/2) ln(d/2)
/// + d/2 - ln 2pi, assembled cancellation-free.
fn eta_ln_const(df: f64) -> f64 {
    ln_stirling_residual(0.5 * df) - (2.0 * std::f64::consts::PI).ln()
}

/// Log-density of eta_d at u (negative infinity outside (-pi, pi)).
pub fn eta_log_density(u: f64, d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    if u.abs() >= std::f64::consts::PI {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(eta_ln_const(df) + 0.5 * df * eta_exponent(u))
}

/// The probability density on (-pi, pi) induced by the steepest-descent
/// contour: proportional to (exp(u cot u) sinc u)^{d/2}.
pub fn eta_density(u: f64, d: u32) -> Result<f64> {
    Ok(eta_log_density(u, d)?.exp())
}

/// Log of the Gaussian envelope sqrt(d/4pi) exp(-d u^2/4) e^{1/(3d)}.
/// The 1/(3d) factor makes the Stirling correction an upper bound.
fn eta_ln_envelope(u: f64, df: f64) -> f64 {
    0.5 * (df / (4.0 * std::f64::consts::PI)).ln() - 0.25 * df * u * u + 1.0 / (3.0 * df)
}

/// Exact sampler for eta_d: rejection from a truncated N(0, 2/d) proposal
/// under the envelope above. Construction validates the envelope pointwise
/// on a dense grid once per dimension per process.
#[derive(Debug, Clone)]
pub struct EtaSampler {
    df: f64,
    sigma: f64,
}

static VALIDATED_DIMS: Mutex<BTreeSet<u32>> = Mutex::new(BTreeSet::new());

impl EtaSampler {
    pub fn new(d: u32) -> Result<Self> {
        let df = check_dim(d)?;
        let mut seen = VALIDATED_DIMS.lock().expect("poisoned dimension cache");
        if !seen.contains(&d) {
            let grid = 100_000;
            for i in 0..=grid {
                let u = -std::f64::consts::PI
                    + 2.0 * std::f64::consts::PI * i as f64 / grid as f64;
                let ld = eta_ln_const(df) + 0.5 * df * eta_exponent(u);
                if u.abs() < std::f64::consts::PI && ld > eta_ln_envelope(u, df) {
                    return Err(Error::numerical(format!(
                        "eta envelope violated at d = {d}, u = {u}"
                    )));
                }
            }
            seen.insert(d);
        }
        Ok(EtaSampler {
            df,
            sigma: (2.0 / df).sqrt(),
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = self.sigma * rng.sample::<f64, _>(StandardNormal);
            if u.abs() >= std::f64::consts::PI {
                continue;
            }
            let ln_accept = eta_ln_const(self.df) + 0.5 * self.df * eta_exponent(u)
                - eta_ln_envelope(u, self.df);
            let v: f64 = rng.gen::<f64>();
            if v.ln() <= ln_accept {
                return u;
            }
        }
    }
}

// ---------------------------------------------------------------------
// Characteristic functions.
// ---------------------------------------------------------------------

/// Characteristic function of the Gram matrix W of d standard normal
/// vectors: det(Id - i(Theta + diag Theta))^{-d/2}.
///
/// Valid for complex symmetric Theta with Id + Im Theta + diag Im Theta
/// positive definite; the determinant power uses the continuous branch
/// that is 1 at Theta = 0.
pub fn wishart_cf(theta: &ComplexSymMatrix, d: u32) -> Result<Complex64> {
    let df = check_dim(d)?;
    let n = theta.dim();
    // precondition: Id + Im Theta + diag Im Theta > 0
    let mut re_part = vec![0.0f64; n * n];
    for j in 0..n {
        for k in 0..n {
            let mut v = theta.get(j, k).im;
            if j == k {
                v = 1.0 + 2.0 * v;
            }
            re_part[j * n + k] = v;
        }
    }
    if !real_sym_is_pd(&re_part, n) {
        return Err(Error::domain(
            "wishart_cf: Id + Im Theta + diag Im Theta is not positive definite",
        ));
    }
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            let mut v = -I * theta.get(j, k);
            if j == k {
                v = 1.0 + 2.0 * v;
            }
            s[j * n + k] = v;
        }
    }
    let ld = logdet_dense_rhp(&mut s, n)?;
    Ok((-0.5 * df * ld).exp())
}

/// Characteristic function of the hollow Gaussian matrix with iid
/// N(0, 1/d) off-diagonal entries: exp(-tr(Theta^2)/(4d)).
pub fn gaussian_cf(theta: &ComplexSymMatrix, d: u32) -> Result<Complex64> {
    let df = check_dim(d)?;
    if !theta.is_hollow() {
        return Err(Error::param("gaussian_cf: Theta must be hollow"));
    }
    let n = theta.dim();
    let mut tr_sq = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in (j + 1)..n {
            let v = theta.get(j, k);
            tr_sq += 2.0 * v * v;
        }
    }
    Ok((-tr_sq / (4.0 * df)).exp())
}

/// One draw of the steepest-descent integrand
/// det(Id - (i/d) Theta beta(U)^{-1})^{-d/2} * prod_j beta'(u_j)/i,
/// where dividing each beta' by i folds in the i^{-n} orientation factor
/// of the contour so that the weight has unit expectation.
///
/// The determinant is taken on the symmetrized matrix
/// Id - (i/d) B^{1/2} Theta B^{1/2} (B = beta(U)^{-1} diagonal), which has
/// positive-definite Hermitian part whenever ||Theta||_op < d, so the
/// branch-tracked log-determinant applies.
pub(crate) fn sd_draw(theta: &ComplexSymMatrix, df: f64, u: &[f64]) -> Result<Complex64> {
    let n = theta.dim();
    let sqrt_binv: Vec<Complex64> = u.iter().map(|&uj| beta_inv(uj).sqrt()).collect();
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            let mut v = -I / df * sqrt_binv[j] * theta.get(j, k) * sqrt_binv[k];
            if j == k {
                v += 1.0;
            }
            m[j * n + k] = v;
        }
    }
    let ld = logdet_dense_rhp(&mut m, n)?;
    let mut w = (-0.5 * df * ld).exp();
    for &uj in u {
        w *= Complex64::new(1.0, -beta_prime_re(uj));
    }
    Ok(w)
}

/// Options shared by the Monte Carlo characteristic-function estimators.
#[derive(Debug, Clone, Copy)]
pub struct CfBudget {
    pub draws: u64,
    pub workers: usize,
}

impl Default for CfBudget {
    fn default() -> Self {
        CfBudget {
            draws: 1 << 16,
            workers: 1,
        }
    }
}

fn check_hollow_opnorm(theta: &ComplexSymMatrix, df: f64) -> Result<()> {
    if !theta.is_hollow() {
        return Err(Error::param("spherical CF: Theta must be hollow"));
    }
    let norm = theta.op_norm();
    if norm >= df {
        return Err(Error::domain(format!(
            "spherical CF: ||Theta||_op = {norm} is not below d = {df}"
        )));
    }
    Ok(())
}

/// Steepest-descent Monte Carlo estimator of the characteristic function
/// of the hollow Gram matrix of n uniform sphere vectors.
///
/// Requires `||Theta||_op < d`. Draws are batched (64 batches) and each
/// batch runs on its own RNG substream, so the estimate is independent of
/// the worker count; the standard error is componentwise over batches.
pub fn spherical_wishart_cf(
    theta: &ComplexSymMatrix,
    d: u32,
    budget: CfBudget,
    streams: &Streams,
) -> Result<McEstimate<Complex64>> {
    let df = check_dim(d)?;
    check_hollow_opnorm(theta, df)?;
    let sampler = EtaSampler::new(d)?;
    let n = theta.dim();
    let draws = round_up_to_batches(budget.draws.max(MIN_BATCHES), MIN_BATCHES);
    let per_batch = draws / MIN_BATCHES;
    let batch_vals = map_indexed(MIN_BATCHES, budget.workers, |b| {
        let mut rng = streams.stream(b);
        let mut u = vec![0.0f64; n];
        let mut out = Vec::with_capacity(per_batch as usize);
        for _ in 0..per_batch {
            for uj in u.iter_mut() {
                *uj = sampler.sample(&mut rng);
            }
            out.push(sd_draw(theta, df, &u));
        }
        out
    });
    let mut values = Vec::with_capacity(draws as usize);
    for batch in batch_vals {
        for v in batch {
            values.push(v?);
        }
    }
    Ok(complex_batch_stats(&values, MIN_BATCHES))
}

/// Direct-definition Monte Carlo oracle for the same characteristic
/// function: sample n sphere vectors, form the hollow Gram matrix V, and
/// average exp(i <V, Theta>).
pub fn spherical_wishart_cf_direct(
    theta: &ComplexSymMatrix,
    d: u32,
    budget: CfBudget,
    streams: &Streams,
) -> Result<McEstimate<Complex64>> {
    check_dim(d)?;
    if !theta.is_hollow() {
        return Err(Error::param("spherical CF: Theta must be hollow"));
    }
    let n = theta.dim();
    let draws = round_up_to_batches(budget.draws.max(MIN_BATCHES), MIN_BATCHES);
    let per_batch = draws / MIN_BATCHES;
    let batch_vals = map_indexed(MIN_BATCHES, budget.workers, |b| {
        let mut rng = streams.stream(b);
        let mut out = Vec::with_capacity(per_batch as usize);
        for _ in 0..per_batch {
            let pts = sample_sphere_points(n, d, &mut rng);
            let mut phase = Complex64::new(0.0, 0.0);
            for j in 0..n {
                for k in (j + 1)..n {
                    let ip: f64 = pts[j].iter().zip(&pts[k]).map(|(a, b)| a * b).sum();
                    phase += theta.get(j, k) * ip;
                }
            }
            out.push((I * phase).exp());
        }
        out
    });
    let values: Vec<Complex64> = batch_vals.into_iter().flatten().collect();
    Ok(complex_batch_stats(&values, MIN_BATCHES))
}

/// Upper bound on |phi_V(Theta)| from the lambda = 1 contour estimate:
///
/// ```text
/// (Gamma(d/2+1) e^{d/2} / (2 sqrt(pi) (d/2)^{d/2}))^n
///   * Gamma((d-2n)/4)/Gamma(d/4)
///   * ||A||_op^n / det(A)^{d/2}
///   * (1 + ||Re Theta||_F^2 / ||d Id + Im Theta||_op^2)^{n/2 - d/4}
/// ```
///
/// with A = Id + Im Theta / d. Requires d > 2n and d Id + Im Theta > 0.
pub fn phi_v_modulus_bound(theta: &ComplexSymMatrix, d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    let n = theta.dim();
    if df <= 2.0 * n as f64 {
        return Err(Error::domain(format!(
            "modulus bound requires d > 2n (d = {d}, n = {n})"
        )));
    }
    let nf = n as f64;
    let mut a = vec![0.0f64; n * n];
    let mut re_theta = ComplexSymMatrix::zeros(n);
    let mut im_theta = ComplexSymMatrix::zeros(n);
    for j in 0..n {
        for k in j..n {
            let v = theta.get(j, k);
            re_theta.set(j, k, Complex64::new(v.re, 0.0));
            im_theta.set(j, k, Complex64::new(v.im, 0.0));
            a[j * n + k] = v.im / df + if j == k { 1.0 } else { 0.0 };
            a[k * n + j] = a[j * n + k];
        }
    }
    if !real_sym_is_pd(&a, n) {
        return Err(Error::domain("modulus bound requires d Id + Im Theta > 0"));
    }
    let ln_det_a = real_sym_ln_det(&a, n)?;
    let mut a_sym = ComplexSymMatrix::zeros(n);
    for j in 0..n {
        for k in j..n {
            a_sym.set(j, k, Complex64::new(a[j * n + k], 0.0));
        }
    }
    let a_op = a_sym.op_norm();
    let frob_re = re_theta.frobenius_norm();
    // each factor in log space; the last exponent n/2 - d/4 is negative
    let ln_prefactor = nf
        * (ln_stirling_residual(0.5 * df) - 2.0f64.ln() - 0.5 * std::f64::consts::PI.ln());
    let ln_gamma_ratio = ln_gamma((df - 2.0 * nf) / 4.0) - ln_gamma(df / 4.0);
    let ratio = (frob_re / (df * a_op)).powi(2);
    let ln_bound = ln_prefactor + ln_gamma_ratio + nf * a_op.ln() - 0.5 * df * ln_det_a
        + (0.5 * nf - 0.25 * df) * ratio.ln_1p();
    Ok(ln_bound.exp())
}
