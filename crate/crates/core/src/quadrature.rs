//! L²(ℝⁿ) norms of radial functions,
//! `‖f‖² = |S^{n−1}| ∫₀^∞ f(r)² r^{n−1} dr`.
//!
//! The half-line is cut at `r_max` and split into dyadic segments
//! `[r_max 2^{−i−1}, r_max 2^{−i}]` down to [`R_FLOOR`]; each segment is
//! integrated by adaptive bisection with a fixed Gauss–Legendre rule. The
//! remaining piece `[0, R_FLOOR]` is estimated from the declared power-law
//! behavior at the origin.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

pub const R_FLOOR: f64 = 1e-12;
pub const MAX_DEPTH: usize = 60;
const GAUSS_POINTS: usize = 15;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(GAUSS_POINTS).unwrap())
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// `2π^{n/2} / Γ(n/2)`.
pub fn surface_area(n: u32) -> f64 {
    let h = f64::from(n) / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// Smooth step `ψ(x) = B(x)/(B(x) + B(1−x))`, `B(x) = e^{−1/x}` for `x > 0`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let b = |y: f64| (-1.0 / y).exp();
    let (u, v) = (b(x), b(1.0 - x));
    u / (u + v)
}

/// Low/high frequency partition of unity with transition on `[ε*/2, ε*]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffSpec {
    pub eps_star: f64,
}

impl CutoffSpec {
    pub fn new(eps_star: f64) -> Result<Self> {
        if !(eps_star > 0.0 && eps_star.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps_star = {eps_star}")));
        }
        Ok(Self { eps_star })
    }

    pub fn chi_low(&self, r: f64) -> f64 {
        smooth_step((self.eps_star - r) / (self.eps_star / 2.0))
    }

    pub fn chi_high(&self, r: f64) -> f64 {
        1.0 - self.chi_low(r)
    }
}

/// A radial function together with its power-law exponent at the origin
/// (`|f(r)| ≲ r^{singularity}` as `r → 0`).
pub trait RadialIntegrand: Sync {
    fn value(&self, r: f64) -> f64;

    /// Value together with a bound on its rounding error. Refinement stops
    /// once the Richardson difference is inside this noise.
    fn value_with_noise(&self, r: f64) -> (f64, f64) {
        let v = self.value(r);
        (v, 4.0 * f64::EPSILON * v.abs())
    }

    fn singularity(&self) -> f64 {
        0.0
    }
}

/// Closure-backed [`RadialIntegrand`].
pub struct RadialFn<F> {
    f: F,
    singularity: f64,
}

impl<F: Fn(f64) -> f64 + Sync> RadialFn<F> {
    pub fn new(f: F) -> Self {
        Self { f, singularity: 0.0 }
    }

    pub fn with_singularity(f: F, singularity: f64) -> Self {
        Self { f, singularity }
    }
}

impl<F: Fn(f64) -> f64 + Sync> RadialIntegrand for RadialFn<F> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    fn singularity(&self) -> f64 {
        self.singularity
    }
}

/// Gauss estimate of `∫ f² r^{n−1}` on `[lo, hi]` and of its rounding noise.
#[derive(Debug, Clone, Copy)]
struct Estimate {
    value: f64,
    noise: f64,
}

fn gauss(f: &impl RadialIntegrand, n: u32, lo: f64, hi: f64) -> Result<Estimate> {
    let (half, mid) = (0.5 * (hi - lo), 0.5 * (hi + lo));
    let (mut value, mut noise) = (0.0, 0.0);
    for &(x, w) in rule() {
        let r = mid + half * x;
        let (v, nv) = f.value_with_noise(r);
        if !v.is_finite() {
            return Err(Error::NonFinite { r, value: v });
        }
        let jac = r.powi(n as i32 - 1);
        value += w * v * v * jac;
        noise += w * (2.0 * v.abs() + nv) * nv * jac;
    }
    Ok(Estimate {
        value: half * value,
        noise: half * noise + f64::EPSILON * (half * value).abs(),
    })
}

struct Refiner<'a, F> {
    f: &'a F,
    n: u32,
    rel_tol: f64,
}

impl<F: RadialIntegrand> Refiner<'_, F> {
    fn refine(&self, lo: f64, hi: f64, whole: Estimate, abs_tol: f64, depth: usize) -> Result<f64> {
        let mid = 0.5 * (lo + hi);
        let left = gauss(self.f, self.n, lo, mid)?;
        let right = gauss(self.f, self.n, mid, hi)?;
        let fine = left.value + right.value;
        let diff = (fine - whole.value).abs();
        let floor = 4.0 * (left.noise + right.noise).max(whole.noise);
        if diff <= self.rel_tol * fine.abs() || diff <= abs_tol || diff <= floor {
            return Ok(fine);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NonConvergence { lo, hi });
        }
        Ok(self.refine(lo, mid, left, abs_tol / 2.0, depth + 1)?
            + self.refine(mid, hi, right, abs_tol / 2.0, depth + 1)?)
    }
}

/// `∫₀^{r_max} f(r)² r^{n−1} dr` (without the sphere factor).
pub fn radial_square_integral(f: &impl RadialIntegrand, n: u32, r_max: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(r_max > R_FLOOR) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "tol = {tol}, r_max = {r_max}, n = {n}"
        )));
    }
    let power = 2.0 * f.singularity() + f64::from(n) - 1.0;
    if power <= -1.0 {
        return Err(Error::SingularityTooStrong {
            exponent: f.singularity(),
            n,
        });
    }

    let mut edges = vec![r_max];
    while *edges.last().unwrap() / 2.0 > R_FLOOR {
        let next = edges.last().unwrap() / 2.0;
        edges.push(next);
    }
    edges.push(R_FLOOR);
    let segments: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[1], w[0])).collect();

    let coarse = segments
        .par_iter()
        .map(|&(lo, hi)| gauss(f, n, lo, hi))
        .collect::<Result<Vec<Estimate>>>()?;
    let scale: f64 = coarse.iter().map(|c| c.value.abs()).sum();
    let abs_tol = tol * scale / segments.len() as f64;
    let refiner = Refiner { f, n, rel_tol: tol };
    let parts = segments
        .par_iter()
        .zip(coarse.par_iter())
        .map(|(&(lo, hi), &whole)| refiner.refine(lo, hi, whole, abs_tol, 0))
        .collect::<Result<Vec<f64>>>()?;
    let mut total: f64 = parts.iter().sum();
    // power-law extrapolation on [0, R_FLOOR]
    let v = f.value(R_FLOOR);
    total += v * v * R_FLOOR.powi(n as i32 - 1) * R_FLOOR / (power + 1.0);
    Ok(total)
}

/// `‖f‖_{L²(ℝⁿ)}` of a radial function supported (numerically) in `[0, r_max]`.
pub fn l2_radial(f: &impl RadialIntegrand, n: u32, r_max: f64, tol: f64) -> Result<f64> {
    let integral = radial_square_integral(f, n, r_max, tol)?;
    Ok((surface_area(n) * integral.max(0.0)).sqrt())
}

/// Log-log slope fit of a measured norm against its predicted exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Largest residual of the fit, in natural-log units.
    pub max_residual: f64,
    pub target: f64,
    pub gap: f64,
    pub points: usize,
}

/// Ordinary least squares of `y` on `x`; returns `(slope, intercept, max |residual|)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).abs())
        .fold(0.0, f64::max);
    Ok((slope, intercept, max_residual))
}

/// Fits `log E = intercept + slope · log t` (at least 5 points).
pub fn fit_power_law(times: &[f64], values: &[f64], target: f64) -> Result<FitResult> {
    if times.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "need at least 5 points, got {}",
            times.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit(format!("non-positive value {v}")));
    }
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept, max_residual) = least_squares(&x, &y)?;
    Ok(FitResult {
        slope,
        intercept,
        max_residual,
        target,
        gap: (slope - target).abs(),
        points: times.len(),
    })
}

/// Cutoff radius used by [`scaling_check`].
pub const SCALING_EPS_STAR: f64 = 0.5;

/// Measures `t ↦ ‖r^α e^{−c r^β t} χ_L(r)‖` on `t_grid` and fits its
/// log-log slope against `−n/(2β) − α/β`.
pub fn scaling_check(alpha: f64, beta: f64, c: f64, n: u32, t_grid: &[f64], tol: f64) -> Result<FitResult> {
    if !(alpha > -f64::from(n) / 2.0 && beta > 0.0 && c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha}, beta = {beta}, c = {c}, n = {n}"
        )));
    }
    let cut = CutoffSpec::new(SCALING_EPS_STAR)?;
    let values = t_grid
        .iter()
        .map(|&t| {
            let f = RadialFn::with_singularity(
                |r: f64| r.powf(alpha) * (-c * r.powf(beta) * t).exp() * cut.chi_low(r),
                alpha,
            );
            l2_radial(&f, n, cut.eps_star, tol)
        })
        .collect::<Result<Vec<f64>>>()?;
    let target = -f64::from(n) / (2.0 * beta) - alpha / beta;
    fit_power_law(t_grid, &values, target)
}
