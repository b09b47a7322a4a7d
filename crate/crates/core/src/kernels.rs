//! Fourier multipliers of the solution.
//!
//! Two views are provided:
//!
//! * jets in the auxiliary parameters `(a, b)` at the origin of the building
//!   blocks `Γ1, Γ2, G⁻¹, λ1⁰, λ2⁰` and of the four kernels
//!   `K0¹ = G⁻¹ λ1⁰ e^{λ2⁰ t}`, `K0² = G⁻¹ λ2⁰ e^{λ1⁰ t}`,
//!   `K1¹ = G⁻¹ e^{λ1⁰ t}`, `K1² = G⁻¹ e^{λ2⁰ t}`;
//! * the exact multipliers `K0(t, r)`, `K1(t, r)` at `a = b = 1`, evaluated in
//!   a form that stays real and smooth through the zero of the discriminant.

use crate::error::Result;
use crate::jet2::Jet2;
use crate::model::ModelParams;

/// Exponential factors `e^{-x}` with `x` above this are flushed to zero.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;

/// Radial powers shared by all building blocks.
#[derive(Debug, Clone, Copy)]
pub struct RadialPowers {
    /// `r^{2σ1}`
    pub fast: f64,
    /// `r^{2(σ2−σ1)}`
    pub a_scale: f64,
    /// `r^{2(σ−2σ1)}`
    pub b_scale: f64,
    /// `r^{2(σ−σ1)}`
    pub slow: f64,
}

impl RadialPowers {
    pub fn new(p: &ModelParams, r: f64) -> Self {
        Self {
            fast: r.powf(2.0 * p.sigma1),
            a_scale: r.powf(2.0 * (p.sigma2 - p.sigma1)),
            b_scale: r.powf(2.0 * (p.sigma - 2.0 * p.sigma1)),
            slow: r.powf(2.0 * (p.sigma - p.sigma1)),
        }
    }
}

/// `1 + a·r^{2(σ2−σ1)}` as a jet.
fn damping_ratio_jet(pw: &RadialPowers, order: usize) -> Result<Jet2> {
    Jet2::from_fn(order, |j, m| match (j, m) {
        (0, 0) => 1.0,
        (1, 0) => pw.a_scale,
        _ => 0.0,
    })
}

pub fn gamma1_jet(p: &ModelParams, r: f64, order: usize) -> Result<Jet2> {
    damping_ratio_jet(&RadialPowers::new(p, r), order)?.reciprocal()
}

fn gamma2_from(pw: &RadialPowers, gamma1: &Jet2) -> Result<Jet2> {
    let order = gamma1.order();
    let b = Jet2::from_fn(order, |j, m| if (j, m) == (0, 1) { 1.0 } else { 0.0 })?;
    let inner = &(&b * gamma1) * gamma1;
    inner.scale(-4.0 * pw.b_scale).add_const(1.0).sqrt()
}

pub fn gamma2_jet(p: &ModelParams, r: f64, order: usize) -> Result<Jet2> {
    let pw = RadialPowers::new(p, r);
    let g1 = damping_ratio_jet(&pw, order)?.reciprocal()?;
    gamma2_from(&pw, &g1)
}

/// Jet of `G⁻¹ = r^{−2σ1} Γ1 Γ2⁻¹`.
pub fn g_inv_jet(p: &ModelParams, r: f64, order: usize) -> Result<Jet2> {
    Ok(Blocks::new(p, r, order)?.g_inv)
}

/// `(λ1⁰, λ2⁰)` as jets.
pub fn lambda_jets(p: &ModelParams, r: f64, order: usize) -> Result<(Jet2, Jet2)> {
    let b = Blocks::new(p, r, order)?;
    Ok((b.lambda1, b.lambda2))
}

struct Blocks {
    g_inv: Jet2,
    lambda1: Jet2,
    lambda2: Jet2,
}

impl Blocks {
    fn new(p: &ModelParams, r: f64, order: usize) -> Result<Self> {
        let pw = RadialPowers::new(p, r);
        let ratio = damping_ratio_jet(&pw, order)?;
        let g1 = ratio.reciprocal()?;
        let g2 = gamma2_from(&pw, &g1)?;
        let one_plus_g2 = g2.add_const(1.0);
        let g_inv = (&g1 * &g2.reciprocal()?).scale(1.0 / pw.fast);
        let lambda1 = (&g1 * &one_plus_g2.reciprocal()?).scale(-2.0 * pw.slow);
        let lambda2 = (&ratio * &one_plus_g2).scale(-0.5 * pw.fast);
        Ok(Self {
            g_inv,
            lambda1,
            lambda2,
        })
    }
}

/// Jet of `e^{λ t}`; zero when the constant factor underflows.
fn exp_time(lambda: &Jet2, t: f64) -> Result<Jet2> {
    let x0 = lambda.constant_term() * t;
    if -x0 > UNDERFLOW_EXPONENT {
        return Jet2::zero(lambda.order());
    }
    Ok(lambda.nilpotent().scale(t).exp()?.scale(x0.exp()))
}

/// Jets of the four kernels at a fixed `(t, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelJets {
    pub k0_1: Jet2,
    pub k0_2: Jet2,
    pub k1_1: Jet2,
    pub k1_2: Jet2,
}

impl KernelJets {
    pub fn as_array(&self) -> [&Jet2; 4] {
        [&self.k0_1, &self.k0_2, &self.k1_1, &self.k1_2]
    }
}

pub const KERNEL_NAMES: [&str; 4] = ["K0^1", "K0^2", "K1^1", "K1^2"];

pub fn kernel_jets(p: &ModelParams, t: f64, r: f64, order: usize) -> Result<KernelJets> {
    let b = Blocks::new(p, r, order)?;
    let e1 = exp_time(&b.lambda1, t)?;
    let e2 = exp_time(&b.lambda2, t)?;
    Ok(KernelJets {
        k0_1: &(&b.g_inv * &b.lambda1) * &e2,
        k0_2: &(&b.g_inv * &b.lambda2) * &e1,
        k1_1: &b.g_inv * &e1,
        k1_2: &b.g_inv * &e2,
    })
}

/// Direct evaluation of the four kernels at arbitrary `(a, b)` near the
/// origin. Used for finite-difference checks of the jets.
pub fn kernel_values(p: &ModelParams, t: f64, r: f64, a: f64, b: f64) -> [f64; 4] {
    let pw = RadialPowers::new(p, r);
    let ratio = 1.0 + a * pw.a_scale;
    let g1 = 1.0 / ratio;
    let g2 = (1.0 - 4.0 * b * pw.b_scale * g1 * g1).sqrt();
    let g = pw.fast * ratio * g2;
    let l1 = -2.0 * pw.slow * g1 / (1.0 + g2);
    let l2 = -0.5 * pw.fast * ratio * (1.0 + g2);
    let e1 = (l1 * t).exp();
    let e2 = (l2 * t).exp();
    [l1 * e2 / g, l2 * e1 / g, e1 / g, e2 / g]
}

/// Exact multipliers `K0(t, r)`, `K1(t, r)` at `a = b = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMultipliers {
    pub k0: f64,
    pub k1: f64,
}

/// `sinh(z)/z` for real `z`.
pub fn sinhc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 * (1.0 + z2 / 20.0)
    } else {
        z.sinh() / z
    }
}

/// `sin(y)/y`.
pub fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 * (1.0 - y2 / 20.0)
    } else {
        y.sin() / y
    }
}

/// With `A = r^{2σ1} + r^{2σ2}`, `D² = A² − 4 r^{2σ}` and `z = √D² t / 2`:
///
/// ```text
/// K0 = e^{−At/2} (cosh z + (At/2) sinhc z),   K1 = e^{−At/2} t sinhc z
/// ```
///
/// with `cosh(iy) = cos y`, `sinhc(iy) = sinc y` inside the band. For
/// `z >= 1` the real branch is rewritten through the roots
/// `λ1 = −2r^{2σ}/(A + √D²)`, `λ2 = −(A + √D²)/2` so that no large
/// exponentials are multiplied against tiny ones.
pub fn exact_multipliers(p: &ModelParams, t: f64, r: f64) -> ExactMultipliers {
    let fast = r.powf(2.0 * p.sigma1);
    let damp = fast + r.powf(2.0 * p.sigma2);
    let stiff = r.powf(2.0 * p.sigma);
    let disc = p.discriminant(r, 1.0, 1.0);
    let half = 0.5 * damp * t;

    let (k0, k1) = if disc >= 0.0 {
        let root = disc.sqrt();
        let z = 0.5 * root * t;
        if z < 1.0 {
            let env = (-half).exp();
            let sc = sinhc(z);
            (env * (z.cosh() + half * sc), env * t * sc)
        } else {
            let lambda1 = -2.0 * stiff / (damp + root);
            let lead = (lambda1 * t).exp();
            let tail = (-2.0 * z).exp();
            let gap = -(-2.0 * z).exp_m1();
            (
                lead * (0.5 * (1.0 + tail) + 0.5 * damp * gap / root),
                lead * gap / root,
            )
        }
    } else {
        let y = 0.5 * (-disc).sqrt() * t;
        let env = (-half).exp();
        let sc = sinc(y);
        (env * (y.cos() + half * sc), env * t * sc)
    };
    ExactMultipliers {
        k0: flush(k0),
        k1: flush(k1),
    }
}

fn flush(v: f64) -> f64 {
    if v.is_subnormal() { 0.0 } else { v }
}

/// Independent derivative route for the kernels: raw partial-derivative
/// tables combined with the explicit Leibniz rule and the partition-sum
/// Faà di Bruno formula. Shares no composition code with [`Jet2`].
pub mod oracle {
    use super::{RadialPowers, UNDERFLOW_EXPONENT};
    use crate::error::Result;
    use crate::jet2::{factorial, faa_di_bruno_coeff, Jet2};
    use crate::model::ModelParams;

    /// Raw derivatives `d[j][m] = ∂^{j+m} f(0,0)` for `j + m <= order`.
    #[derive(Debug, Clone, PartialEq)]
    pub struct DerivTable {
        order: usize,
        d: Vec<Vec<f64>>,
    }

    fn binom(n: usize, k: usize) -> f64 {
        factorial(n) / (factorial(k) * factorial(n - k))
    }

    impl DerivTable {
        pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> f64) -> Self {
            let d = (0..=order)
                .map(|j| (0..=order - j).map(|m| f(j, m)).collect())
                .collect();
            Self { order, d }
        }

        pub fn get(&self, j: usize, m: usize) -> f64 {
            if j + m > self.order { 0.0 } else { self.d[j][m] }
        }

        pub fn order(&self) -> usize {
            self.order
        }

        fn linear(order: usize, c0: f64, ca: f64, cb: f64) -> Self {
            Self::from_fn(order, |j, m| match (j, m) {
                (0, 0) => c0,
                (1, 0) => ca,
                (0, 1) => cb,
                _ => 0.0,
            })
        }

        fn scale(&self, c: f64) -> Self {
            Self::from_fn(self.order, |j, m| c * self.get(j, m))
        }

        fn shift(&self, c: f64) -> Self {
            Self::from_fn(self.order, |j, m| {
                self.get(j, m) + if (j, m) == (0, 0) { c } else { 0.0 }
            })
        }

        /// General Leibniz rule.
        pub fn leibniz(&self, other: &Self) -> Self {
            Self::from_fn(self.order, |j, m| {
                let mut s = 0.0;
                for i in 0..=j {
                    for l in 0..=m {
                        s += binom(j, i) * binom(m, l) * self.get(i, l) * other.get(j - i, m - l);
                    }
                }
                s
            })
        }

        /// `f ∘ self` given raw outer derivatives `f^{(l)}(self(0,0))`.
        pub fn compose(&self, outer_derivs: &[f64]) -> Result<Self> {
            let inner = Jet2::from_fn(self.order, |j, m| {
                self.get(j, m) / (factorial(j) * factorial(m))
            })?;
            let mut d = vec![Vec::new(); self.order + 1];
            for (j, row) in d.iter_mut().enumerate() {
                for m in 0..=self.order - j {
                    row.push(faa_di_bruno_coeff(outer_derivs, &inner, j, m)?);
                }
            }
            Ok(Self { order: self.order, d })
        }
    }

    /// Raw derivatives of `x ↦ c (1 + k x)^α` at 0 divided appropriately:
    /// returns `f^{(l)}(0)` for `f(q) = (1 + k q)^α`.
    fn power_derivs(alpha: f64, k: f64, order: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(order + 1);
        let mut falling = 1.0;
        for l in 0..=order {
            out.push(falling * k.powi(l as i32));
            falling *= alpha - l as f64;
        }
        out
    }

    fn exp_time(lambda: &DerivTable, t: f64) -> Result<DerivTable> {
        let x0 = lambda.get(0, 0) * t;
        if -x0 > UNDERFLOW_EXPONENT {
            return Ok(DerivTable::from_fn(lambda.order(), |_, _| 0.0));
        }
        lambda.scale(t).compose(&vec![x0.exp(); lambda.order() + 1])
    }

    /// Raw derivative tables of `[K0¹, K0², K1¹, K1²]`.
    pub fn kernel_derivatives(
        p: &ModelParams,
        t: f64,
        r: f64,
        order: usize,
    ) -> Result<[DerivTable; 4]> {
        let pw = RadialPowers::new(p, r);
        let ratio = DerivTable::linear(order, 1.0, pw.a_scale, 0.0);
        let gamma1 = DerivTable::linear(order, 0.0, pw.a_scale, 0.0)
            .compose(&power_derivs(-1.0, 1.0, order))?;
        let q = DerivTable::linear(order, 0.0, 0.0, pw.b_scale)
            .leibniz(&gamma1)
            .leibniz(&gamma1);
        let gamma2 = q.compose(&power_derivs(0.5, -4.0, order))?;
        let gamma2_inv = q.compose(&power_derivs(-0.5, -4.0, order))?;
        // 1/x at x = 2
        let inv_at_two: Vec<f64> = (0..=order)
            .map(|l| (-1f64).powi(l as i32) * factorial(l) / 2f64.powi(l as i32 + 1))
            .collect();
        let one_plus_g2 = gamma2.shift(1.0);
        let lambda1 = gamma1
            .leibniz(&one_plus_g2.compose(&inv_at_two)?)
            .scale(-2.0 * pw.slow);
        let lambda2 = ratio.leibniz(&one_plus_g2).scale(-0.5 * pw.fast);
        let g_inv = gamma1.leibniz(&gamma2_inv).scale(1.0 / pw.fast);
        let e1 = exp_time(&lambda1, t)?;
        let e2 = exp_time(&lambda2, t)?;
        Ok([
            g_inv.leibniz(&lambda1).leibniz(&e2),
            g_inv.leibniz(&lambda2).leibniz(&e1),
            g_inv.leibniz(&e1),
            g_inv.leibniz(&e2),
        ])
    }
}
