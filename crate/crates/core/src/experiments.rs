//! Error curves `E(t) = ‖r^s (û(t) − profile(t) · data)‖`, slope fits and the
//! lemma-level checks built on top of them.

use std::fmt::Write as _;
use std::io;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::exact_multipliers;
use crate::model::{log_grid, ModelParams, RateCase};
use crate::profiles::profile;
use crate::quadrature::{
    fit_power_law, l2_radial, least_squares, CutoffSpec, FitResult, RadialFn, RadialIntegrand,
};

/// Default relative quadrature tolerance for error curves.
pub const DEFAULT_TOL: f64 = 1e-10;
pub const PER_DECADE: usize = 25;
pub const CURVE_T_MIN: f64 = 10.0;
pub const CURVE_T_MAX: f64 = 1e4;
pub const FIT_T_MIN: f64 = 1e2;
pub const FIT_T_MAX: f64 = 1e4;
/// Largest expansion order for error curves; beyond it the cancellation in
/// `exact − profile` approaches the rounding floor.
pub const MAX_CURVE_ORDER: usize = 3;
/// Below this fraction of the larger bracketed term a node is counted as cancelling.
pub const CANCELLATION_RATIO: f64 = 1e-13;
/// `e^{−760}` is far below the smallest subnormal.
const UNDERFLOW_ARG: f64 = 760.0;

/// Radial Fourier-side profile of one initial datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `c e^{−α r²}`
    Gaussian { c: f64, alpha: f64 },
    /// `c r² e^{−α r²}`
    MomentFree { c: f64, alpha: f64 },
}

impl Profile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Profile::Gaussian { c, alpha } => c * (-alpha * r * r).exp(),
            Profile::MomentFree { c, alpha } => c * r * r * (-alpha * r * r).exp(),
        }
    }

    fn alpha(&self) -> f64 {
        match *self {
            Profile::Gaussian { alpha, .. } | Profile::MomentFree { alpha, .. } => alpha,
        }
    }

    fn validate(&self) -> Result<()> {
        let (Profile::Gaussian { c, alpha } | Profile::MomentFree { c, alpha }) = *self;
        if !(alpha > 0.0 && alpha.is_finite() && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("data profile {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDataSpec {
    pub u0: Profile,
    pub u1: Profile,
}

impl SpectralDataSpec {
    pub fn gaussian(c: f64, alpha: f64) -> Self {
        let g = Profile::Gaussian { c, alpha };
        Self { u0: g, u1: g }
    }

    pub fn moment_free(c: f64, alpha: f64) -> Self {
        let g = Profile::MomentFree { c, alpha };
        Self { u0: g, u1: g }
    }

    /// `û1(0)`, the integral of `u1`.
    pub fn p1(&self) -> f64 {
        self.u1.value(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.u0.validate()?;
        self.u1.validate()
    }

    /// Radius beyond which both profiles (times any polynomial weight used
    /// here) underflow.
    pub fn support_radius(&self) -> f64 {
        let alpha = self.u0.alpha().min(self.u1.alpha());
        (UNDERFLOW_ARG / alpha).sqrt() + 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCurve {
    pub params: ModelParams,
    pub case: RateCase,
    pub k: usize,
    pub data: SpectralDataSpec,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Quadrature nodes where the error is below `CANCELLATION_RATIO` of the
    /// bracketed terms, per time.
    pub cancellations: Vec<usize>,
}

impl ErrorCurve {
    /// Index range of the times inside `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Range<usize> {
        let start = self.times.iter().position(|&t| t >= lo * (1.0 - 1e-12));
        let end = self.times.iter().rposition(|&t| t <= hi * (1.0 + 1e-12));
        match (start, end) {
            (Some(s), Some(e)) if s <= e => s..e + 1,
            _ => 0..0,
        }
    }

    pub fn target(&self) -> Result<f64> {
        self.params.error_exponent(self.k, self.case)
    }
}

/// Geometric grid with `per_decade` points per factor of ten, both ends included.
pub fn time_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && per_decade >= 1) {
        return Err(Error::InvalidArgument(format!(
            "time grid [{t_min}, {t_max}] with {per_decade} per decade"
        )));
    }
    let decades = (t_max / t_min).log10();
    let count = (decades * per_decade as f64).round() as usize + 1;
    Ok(log_grid(t_min, t_max, count.max(2)))
}

/// The standard slope-fit grid: 25 points per decade on `[10, 10⁴]`.
pub fn default_time_grid() -> Vec<f64> {
    time_grid(CURVE_T_MIN, CURVE_T_MAX, PER_DECADE).expect("static grid")
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Solution multiplier applied to the data at `(t, r)`.
pub fn solution(p: &ModelParams, data: &SpectralDataSpec, t: f64, r: f64) -> f64 {
    let m = exact_multipliers(p, t, r);
    m.k0 * data.u0.value(r) + m.k1 * data.u1.value(r)
}

/// Rounding noise of the error integrand, in ulps of the bracketed terms.
const NOISE_ULPS: f64 = 16.0;

struct ErrorIntegrand<'a> {
    p: &'a ModelParams,
    case: RateCase,
    k: usize,
    data: &'a SpectralDataSpec,
    t: f64,
    cancelled: AtomicUsize,
}

impl RadialIntegrand for ErrorIntegrand<'_> {
    fn value(&self, r: f64) -> f64 {
        self.value_with_noise(r).0
    }

    fn value_with_noise(&self, r: f64) -> (f64, f64) {
        let (v0, v1) = (self.data.u0.value(r), self.data.u1.value(r));
        let m = exact_multipliers(self.p, self.t, r);
        let (a0, a1) = profile(self.k, self.case, self.p, self.t, r).unwrap_or((f64::NAN, f64::NAN));
        let exact = m.k0 * v0 + m.k1 * v1;
        let approx = a0 * v0 + a1 * v1;
        let diff = exact - approx;
        if self.k > 0 && diff.abs() < CANCELLATION_RATIO * exact.abs().max(approx.abs()) {
            self.cancelled.fetch_add(1, Ordering::Relaxed);
        }
        let magnitude = (m.k0 * v0).abs() + (m.k1 * v1).abs() + (a0 * v0).abs() + (a1 * v1).abs();
        let weight = r.powf(self.p.s);
        (weight * diff, weight * NOISE_ULPS * f64::EPSILON * magnitude)
    }

    fn singularity(&self) -> f64 {
        self.p.s - 2.0 * self.p.sigma1
    }
}

fn error_at(
    p: &ModelParams,
    case: RateCase,
    k: usize,
    data: &SpectralDataSpec,
    t: f64,
    tol: f64,
) -> Result<(f64, usize)> {
    let f = ErrorIntegrand {
        p,
        case,
        k,
        data,
        t,
        cancelled: AtomicUsize::new(0),
    };
    let value = l2_radial(&f, p.n, data.support_radius(), tol)?;
    Ok((value, f.cancelled.into_inner()))
}

/// Samples `E(t)` on `times`. Times are evaluated concurrently and
/// collected in order.
pub fn error_curve(
    p: &ModelParams,
    case: RateCase,
    k: usize,
    data: &SpectralDataSpec,
    times: &[f64],
    tol: f64,
) -> Result<ErrorCurve> {
    p.validate(case)?;
    data.validate()?;
    check_times(times)?;
    if k > MAX_CURVE_ORDER {
        return Err(Error::OrderTooLarge {
            order: k,
            max: MAX_CURVE_ORDER,
        });
    }
    let points = times
        .par_iter()
        .map(|&t| error_at(p, case, k, data, t, tol))
        .collect::<Result<Vec<_>>>()?;
    let (values, cancellations) = points.into_iter().unzip();
    Ok(ErrorCurve {
        params: *p,
        case,
        k,
        data: *data,
        times: times.to_vec(),
        values,
        cancellations,
    })
}

/// Log-log fit over `window`, with the theoretical exponent as target.
pub fn fit_slope(curve: &ErrorCurve, window: Range<usize>) -> Result<FitResult> {
    if window.end > curve.times.len() || window.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "window {window:?} on a curve of {} points",
            curve.times.len()
        )));
    }
    fit_power_law(
        &curve.times[window.clone()],
        &curve.values[window],
        curve.target()?,
    )
}

/// Fit over the standard tail window `[10², 10⁴]`.
pub fn fit_tail(curve: &ErrorCurve) -> Result<FitResult> {
    fit_slope(curve, curve.window(FIT_T_MIN, FIT_T_MAX))
}

/// `(min, max)` of `E(t) (1+t)^{−target}` over the given samples.
pub fn band(times: &[f64], values: &[f64], target: f64) -> (f64, f64) {
    times
        .iter()
        .zip(values)
        .map(|(t, e)| e * (1.0 + t).powf(-target))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Lower-bound band of a curve; meaningful only for data with `P1 ≠ 0`.
pub fn lower_bound_band(curve: &ErrorCurve) -> Result<(f64, f64)> {
    if curve.data.p1() == 0.0 {
        return Err(Error::RequiresNonzeroP1);
    }
    Ok(band(&curve.times, &curve.values, curve.target()?))
}

/// Exponential fit `log H(t) ≈ intercept − rate · t` of the high-frequency part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighFreqReport {
    pub eps_star: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub rate: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub monotone: bool,
    /// `H(last) / H(first)`.
    pub ratio: f64,
}

pub fn high_freq_norm(p: &ModelParams, data: &SpectralDataSpec, cut: CutoffSpec, t: f64, tol: f64) -> Result<f64> {
    let f = RadialFn::new(|r: f64| r.powf(p.s) * solution(p, data, t, r) * cut.chi_high(r));
    l2_radial(&f, p.n, data.support_radius(), tol)
}

pub fn high_freq_decay_check(
    p: &ModelParams,
    data: &SpectralDataSpec,
    times: &[f64],
    tol: f64,
) -> Result<HighFreqReport> {
    p.validate(RateCase::for_params(p))?;
    data.validate()?;
    check_times(times)?;
    let cut = CutoffSpec::new(p.eps_star()?)?;
    let values = times
        .par_iter()
        .map(|&t| high_freq_norm(p, data, cut, t, tol))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::DegenerateFit(format!("high-frequency norm {v}")));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept, max_residual) = least_squares(times, &logs)?;
    Ok(HighFreqReport {
        eps_star: cut.eps_star,
        monotone: values.windows(2).all(|w| w[1] < w[0]),
        ratio: values[values.len() - 1] / values[0],
        times: times.to_vec(),
        values,
        rate: -slope,
        intercept,
        max_residual,
    })
}

/// Slope of `log(E_{k+1}/E_k)` against `log t`, with the per-order step as target.
pub fn order_improvement(lower: &ErrorCurve, upper: &ErrorCurve, window: Range<usize>) -> Result<FitResult> {
    if lower.times != upper.times || lower.params != upper.params {
        return Err(Error::InvalidArgument("curves are not comparable".into()));
    }
    let ratio: Vec<f64> = upper.values[window.clone()]
        .iter()
        .zip(&lower.values[window.clone()])
        .map(|(u, l)| u / l)
        .collect();
    let target = if upper.k == lower.k {
        0.0
    } else {
        (upper.k as f64 - lower.k as f64) * lower.params.order_step(lower.case)
    };
    fit_power_law(&lower.times[window], &ratio, target)
}

pub fn order_improvement_check(
    p: &ModelParams,
    case: RateCase,
    k: usize,
    data: &SpectralDataSpec,
    times: &[f64],
    tol: f64,
) -> Result<FitResult> {
    if data.p1() == 0.0 {
        return Err(Error::RequiresNonzeroP1);
    }
    let lower = error_curve(p, case, k, data, times, tol)?;
    let upper = error_curve(p, case, k + 1, data, times, tol)?;
    order_improvement(&lower, &upper, 0..times.len())
}

/// `{:.16e}`, i.e. 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with `# key=value` metadata lines followed by `t,E` rows.
pub fn curve_csv(curve: &ErrorCurve, fit: Option<&FitResult>) -> Result<String> {
    let mut out = String::new();
    let target = curve.target()?;
    let _ = writeln!(out, "# k={}", curve.k);
    let _ = writeln!(out, "# target_rate={}", sig17(target));
    if let Some(f) = fit {
        let _ = writeln!(out, "# fitted_slope={}", sig17(f.slope));
    }
    out.push_str("t,E\n");
    for (t, e) in curve.times.iter().zip(&curve.values) {
        let _ = writeln!(out, "{},{}", sig17(*t), sig17(*e));
    }
    Ok(out)
}

/// JSON formatter printing every float with 17 significant digits.
pub struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Serialize)]
struct CurveDocument<'a> {
    schema_version: u32,
    params: &'a ModelParams,
    case: RateCase,
    k: usize,
    data: &'a SpectralDataSpec,
    times: &'a [f64],
    values: &'a [f64],
    fit: Option<FitDocument>,
}

#[derive(Serialize)]
struct FitDocument {
    slope: f64,
    target: f64,
    gap: f64,
    residual: f64,
}

pub fn curve_json(curve: &ErrorCurve, fit: Option<&FitResult>) -> Result<String> {
    to_json(&CurveDocument {
        schema_version: 1,
        params: &curve.params,
        case: curve.case,
        k: curve.k,
        data: &curve.data,
        times: &curve.times,
        values: &curve.values,
        fit: fit.map(|f| FitDocument {
            slope: f.slope,
            target: f.target,
            gap: f.gap,
            residual: f.max_residual,
        }),
    })
}
