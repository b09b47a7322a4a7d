//! Truncated bivariate Taylor expansions ("jets") in the auxiliary
//! parameters `(a, b)` about `(0, 0)`.
//!
//! A [`Jet2`] of order `K` stores the normalized coefficients
//! `c[j][m] = ∂^{j+m} f / ∂a^j ∂b^m (0,0) / (j! m!)` for `j + m <= K`.
//! All arithmetic truncates at total degree `K`.
//!
//! The module also carries a direct implementation of the bivariate Faà di
//! Bruno formula ([`faa_di_bruno_coeff`]), kept independent of the Horner
//! composition used by the jet functions so it can serve as an oracle.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    order: usize,
    coeff: Vec<f64>,
}

#[inline]
fn index(j: usize, m: usize) -> usize {
    let d = j + m;
    d * (d + 1) / 2 + m
}

#[inline]
fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

impl Jet2 {
    pub fn zero(order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order,
                max: MAX_ORDER,
            });
        }
        Ok(Self {
            order,
            coeff: vec![0.0; len_for(order)],
        })
    }

    pub fn constant(v: f64, order: usize) -> Result<Self> {
        let mut z = Self::zero(order)?;
        z.coeff[0] = v;
        Ok(z)
    }

    /// The coordinate function `a`.
    pub fn var_a(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::OrderTooSmall(order));
        }
        let mut z = Self::zero(order)?;
        z.coeff[index(1, 0)] = 1.0;
        Ok(z)
    }

    /// The coordinate function `b`.
    pub fn var_b(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::OrderTooSmall(order));
        }
        let mut z = Self::zero(order)?;
        z.coeff[index(0, 1)] = 1.0;
        Ok(z)
    }

    /// Builds a jet from a coefficient function `(j, m) -> c[j][m]`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut z = Self::zero(order)?;
        for d in 0..=order {
            for m in 0..=d {
                z.coeff[index(d - m, m)] = f(d - m, m);
            }
        }
        Ok(z)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Normalized coefficient `c[j][m]`; zero beyond the truncation order.
    pub fn coeff(&self, j: usize, m: usize) -> f64 {
        if j + m > self.order {
            0.0
        } else {
            self.coeff[index(j, m)]
        }
    }

    /// Raw partial derivative `∂^{j+m}/∂a^j∂b^m` at the origin.
    pub fn derivative(&self, j: usize, m: usize) -> f64 {
        self.coeff(j, m) * factorial(j) * factorial(m)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff[0]
    }

    /// Iterates `(j, m, c[j][m])` by increasing total degree.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.order).flat_map(move |d| (0..=d).map(move |m| (d - m, m, self.coeff[index(d - m, m)])))
    }

    /// Sum of the coefficients of total degree `d`.
    pub fn degree_sum(&self, d: usize) -> f64 {
        if d > self.order {
            return 0.0;
        }
        (0..=d).map(|m| self.coeff[index(d - m, m)]).sum()
    }

    /// Evaluates the truncated polynomial at the increment `(da, db)`.
    pub fn eval(&self, da: f64, db: f64) -> f64 {
        // nested Horner in total degree is not worth it at K <= 8
        self.iter()
            .map(|(j, m, c)| c * da.powi(j as i32) * db.powi(m as i32))
            .sum()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            Err(Error::OrderMismatch(self.order, other.order))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            order: self.order,
            coeff: self.coeff.iter().zip(&other.coeff).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            order: self.order,
            coeff: self.coeff.iter().zip(&other.coeff).map(|(x, y)| x - y).collect(),
        })
    }

    /// Truncated Cauchy product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let k = self.order;
        let mut out = vec![0.0; len_for(k)];
        for d1 in 0..=k {
            for m1 in 0..=d1 {
                let x = self.coeff[index(d1 - m1, m1)];
                if x == 0.0 {
                    continue;
                }
                for d2 in 0..=(k - d1) {
                    for m2 in 0..=d2 {
                        let j = d1 - m1 + d2 - m2;
                        out[index(j, m1 + m2)] += x * other.coeff[index(d2 - m2, m2)];
                    }
                }
            }
        }
        Ok(Self {
            order: k,
            coeff: out,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            order: self.order,
            coeff: self.coeff.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> Self {
        let mut z = self.clone();
        z.coeff[0] += c;
        z
    }

    /// The jet with its constant term removed (nilpotent part).
    pub fn nilpotent(&self) -> Self {
        let mut z = self.clone();
        z.coeff[0] = 0.0;
        z
    }

    /// Composes a univariate function with this jet, given the normalized
    /// Taylor coefficients `f^{(l)}(x0) / l!` of the outer function at the
    /// constant term `x0`. Needs at least `order + 1` coefficients.
    pub fn compose(&self, outer_taylor: &[f64]) -> Result<Self> {
        let k = self.order;
        if outer_taylor.len() < k + 1 {
            return Err(Error::InsufficientOuterDerivs {
                needed: k + 1,
                got: outer_taylor.len(),
            });
        }
        let nil = self.nilpotent();
        let mut acc = Self::constant(outer_taylor[k], k)?;
        for l in (0..k).rev() {
            acc = acc.checked_mul(&nil)?.add_const(outer_taylor[l]);
        }
        Ok(acc)
    }

    pub fn reciprocal(&self) -> Result<Self> {
        let x0 = self.constant_term();
        if x0 == 0.0 || !x0.is_finite() {
            return Err(Error::SingularConstantTerm(x0));
        }
        let inv = 1.0 / x0;
        let mut taylor = Vec::with_capacity(self.order + 1);
        let mut term = inv;
        for _ in 0..=self.order {
            taylor.push(term);
            term *= -inv;
        }
        self.compose(&taylor)
    }

    pub fn powf(&self, alpha: f64) -> Result<Self> {
        let x0 = self.constant_term();
        if x0 <= 0.0 || !x0.is_finite() {
            return Err(Error::SingularConstantTerm(x0));
        }
        // binom(alpha, l) * x0^(alpha - l)
        let mut taylor = Vec::with_capacity(self.order + 1);
        let mut term = x0.powf(alpha);
        for l in 0..=self.order {
            taylor.push(term);
            term *= (alpha - l as f64) / ((l + 1) as f64 * x0);
        }
        self.compose(&taylor)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powf(0.5)
    }

    pub fn exp(&self) -> Result<Self> {
        let e0 = self.constant_term().exp();
        let mut taylor = Vec::with_capacity(self.order + 1);
        let mut term = e0;
        for l in 0..=self.order {
            taylor.push(term);
            term /= (l + 1) as f64;
        }
        self.compose(&taylor)
    }

    pub fn ln(&self) -> Result<Self> {
        let x0 = self.constant_term();
        if x0 <= 0.0 || !x0.is_finite() {
            return Err(Error::SingularConstantTerm(x0));
        }
        let mut taylor = vec![x0.ln()];
        for l in 1..=self.order {
            let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
            taylor.push(sign / (l as f64 * x0.powi(l as i32)));
        }
        self.compose(&taylor)
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    /// Panics on order mismatch; use [`Jet2::checked_add`] otherwise.
    fn add(self, rhs: &Jet2) -> Jet2 {
        self.checked_add(rhs).expect("jet order mismatch")
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        self.checked_sub(rhs).expect("jet order mismatch")
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.checked_mul(rhs).expect("jet order mismatch")
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// One block `(a_ρ, b1_ρ, b2_ρ)` of a partition: the bi-order
/// `(b1, b2)` occurs with multiplicity `mult`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartBlock {
    pub mult: usize,
    pub b1: usize,
    pub b2: usize,
}

/// An element of the index set of the bivariate Faà di Bruno formula:
/// blocks with strictly ≺-increasing bi-orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionTriple {
    pub blocks: Vec<PartBlock>,
}

impl PartitionTriple {
    pub fn h(&self) -> usize {
        self.blocks.len()
    }

    /// `(Σ a, Σ a·b1, Σ a·b2)`.
    pub fn totals(&self) -> (usize, usize, usize) {
        self.blocks.iter().fold((0, 0, 0), |(l, j, m), b| {
            (l + b.mult, j + b.mult * b.b1, m + b.mult * b.b2)
        })
    }
}

/// All partitions of the bi-order `(j, m)` into exactly `ell` nonzero parts,
/// grouped by distinct bi-order with multiplicities, in deterministic
/// (lexicographic by block) order.
pub fn enumerate_partitions(j: usize, m: usize, ell: usize) -> Vec<PartitionTriple> {
    // candidate bi-orders in ≺ order, (0,0) excluded
    let candidates: Vec<(usize, usize)> = (0..=j)
        .flat_map(|b1| (0..=m).map(move |b2| (b1, b2)))
        .filter(|&p| p != (0, 0))
        .collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    descend(&candidates, 0, j, m, ell, &mut stack, &mut out);
    out
}

fn descend(
    cands: &[(usize, usize)],
    start: usize,
    j_left: usize,
    m_left: usize,
    ell_left: usize,
    stack: &mut Vec<PartBlock>,
    out: &mut Vec<PartitionTriple>,
) {
    if j_left == 0 && m_left == 0 && ell_left == 0 {
        out.push(PartitionTriple {
            blocks: stack.clone(),
        });
        return;
    }
    if ell_left == 0 {
        return;
    }
    for (i, &(b1, b2)) in cands.iter().enumerate().skip(start) {
        let mut mult = 1;
        while mult <= ell_left && mult * b1 <= j_left && mult * b2 <= m_left {
            stack.push(PartBlock { mult, b1, b2 });
            descend(
                cands,
                i + 1,
                j_left - mult * b1,
                m_left - mult * b2,
                ell_left - mult,
                stack,
                out,
            );
            stack.pop();
            mult += 1;
        }
    }
}

/// Raw derivative `∂^{j+m}(f∘g)/∂a^j∂b^m` at the origin by direct summation
/// over [`enumerate_partitions`].
///
/// `outer_derivs[l]` is the raw derivative `f^{(l)}(g(0,0))`; entries
/// `0..=j+m` are required. `inner` is the jet of `g`, of order at least
/// `j + m`.
pub fn faa_di_bruno_coeff(outer_derivs: &[f64], inner: &Jet2, j: usize, m: usize) -> Result<f64> {
    let d = j + m;
    if outer_derivs.len() < d + 1 {
        return Err(Error::InsufficientOuterDerivs {
            needed: d + 1,
            got: outer_derivs.len(),
        });
    }
    if inner.order() < d {
        return Err(Error::OrderMismatch(inner.order(), d));
    }
    if d == 0 {
        return Ok(outer_derivs[0]);
    }
    let jm = factorial(j) * factorial(m);
    let mut total = 0.0;
    for ell in 1..=d {
        let inner_sum: f64 = enumerate_partitions(j, m, ell)
            .iter()
            .map(|part| {
                part.blocks
                    .iter()
                    .map(|b| inner.coeff(b.b1, b.b2).powi(b.mult as i32) / factorial(b.mult))
                    .product::<f64>()
            })
            .sum();
        total += outer_derivs[ell] * jm * inner_sum;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_plus(j: &Jet2) -> Jet2 {
        j.add_const(1.0)
    }

    #[test]
    fn constructors() {
        let c = Jet2::constant(3.0, 2).unwrap();
        assert_eq!(c.coeff(0, 0), 3.0);
        assert!(c.iter().skip(1).all(|(_, _, v)| v == 0.0));
        let a = Jet2::var_a(2).unwrap();
        assert_eq!(a.coeff(1, 0), 1.0);
        assert_eq!(a.iter().filter(|t| t.2 != 0.0).count(), 1);
        let b = Jet2::var_b(1).unwrap();
        assert_eq!(b.coeff(0, 1), 1.0);
        assert_eq!(Jet2::var_a(0), Err(Error::OrderTooSmall(0)));
        assert!(matches!(Jet2::zero(9), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn storage_is_triangular() {
        for k in 0..=MAX_ORDER {
            let z = Jet2::zero(k).unwrap();
            assert_eq!(z.iter().count(), (k + 1) * (k + 2) / 2);
            assert_eq!(z.coeff(k + 1, 0), 0.0);
        }
    }

    #[test]
    fn product_examples() {
        let a = Jet2::var_a(2).unwrap();
        let b = Jet2::var_b(2).unwrap();
        let p = &one_plus(&a) * &one_plus(&b);
        assert_eq!(p.coeff(0, 0), 1.0);
        assert_eq!(p.coeff(1, 0), 1.0);
        assert_eq!(p.coeff(0, 1), 1.0);
        assert_eq!(p.coeff(1, 1), 1.0);
        assert_eq!(p.coeff(2, 0), 0.0);
        let s = &a + &b;
        assert_eq!((s.coeff(1, 0), s.coeff(0, 1)), (1.0, 1.0));
        let a1 = Jet2::var_a(1).unwrap();
        assert!((&a1 * &a1).iter().all(|t| t.2 == 0.0));
        assert_eq!(
            a1.checked_mul(&a),
            Err(Error::OrderMismatch(1, 2))
        );
    }

    #[test]
    fn reciprocal_geometric_series() {
        let x = one_plus(&Jet2::var_a(3).unwrap());
        let r = x.reciprocal().unwrap();
        for (j, m, c) in r.iter() {
            let want = if m == 0 { (-1f64).powi(j as i32) } else { 0.0 };
            assert_eq!(c, want, "({j},{m})");
        }
        assert!(matches!(
            Jet2::var_a(3).unwrap().reciprocal(),
            Err(Error::SingularConstantTerm(_))
        ));
    }

    #[test]
    fn sqrt_binomial_series() {
        // oracle: d^l/dx^l (1-4x)^{1/2} at 0 divided by l!, computed term by term
        let mut want = vec![1.0];
        let mut deriv = 1.0; // product (1/2)(1/2-1)...(1/2-l+1) (-4)^l
        for l in 1..=3 {
            deriv *= (0.5 - (l - 1) as f64) * -4.0;
            want.push(deriv / factorial(l));
        }
        assert_eq!(want, vec![1.0, -2.0, -2.0, -4.0]);
        let x = one_plus(&Jet2::var_b(3).unwrap().scale(-4.0));
        let s = x.sqrt().unwrap();
        for (m, w) in want.iter().enumerate() {
            assert!((s.coeff(0, m) - w).abs() < 1e-14);
        }
        assert!(matches!(
            Jet2::constant(-1.0, 2).unwrap().sqrt(),
            Err(Error::SingularConstantTerm(_))
        ));
    }

    #[test]
    fn exp_series() {
        let x = &Jet2::var_a(2).unwrap() + &Jet2::var_b(2).unwrap();
        let e = x.exp().unwrap();
        assert_eq!(e.coeff(0, 0), 1.0);
        assert_eq!(e.coeff(1, 0), 1.0);
        assert_eq!(e.coeff(0, 1), 1.0);
        assert_eq!(e.coeff(2, 0), 0.5);
        assert_eq!(e.coeff(0, 2), 0.5);
        assert_eq!(e.coeff(1, 1), 1.0);
    }

    #[test]
    fn eval_and_degree_sum() {
        let x = &one_plus(&Jet2::var_a(3).unwrap()) * &one_plus(&Jet2::var_b(3).unwrap());
        assert_eq!(x.eval(1.0, 1.0), 4.0);
        assert_eq!(x.eval(2.0, 0.5), 4.5);
        assert_eq!(x.degree_sum(1), 2.0);
        assert_eq!(x.degree_sum(2), 1.0);
        assert_eq!(x.degree_sum(4), 0.0);
    }

    #[test]
    fn partitions_examples() {
        let p = enumerate_partitions(1, 0, 1);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].blocks, vec![PartBlock { mult: 1, b1: 1, b2: 0 }]);

        let p = enumerate_partitions(1, 1, 1);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].blocks, vec![PartBlock { mult: 1, b1: 1, b2: 1 }]);

        let p = enumerate_partitions(1, 1, 2);
        assert_eq!(p.len(), 1);
        assert_eq!(
            p[0].blocks,
            vec![
                PartBlock { mult: 1, b1: 0, b2: 1 },
                PartBlock { mult: 1, b1: 1, b2: 0 }
            ]
        );
    }

    /// Brute-force count of multiset partitions of (j, m) into `ell` nonzero
    /// bi-orders: enumerate nondecreasing sequences of bi-orders.
    fn brute_force_count(j: usize, m: usize, ell: usize) -> usize {
        fn rec(j: usize, m: usize, ell: usize, min: (usize, usize)) -> usize {
            if ell == 0 {
                return usize::from(j == 0 && m == 0);
            }
            let mut count = 0;
            for b1 in 0..=j {
                for b2 in 0..=m {
                    if (b1, b2) == (0, 0) || (b1, b2) < min {
                        continue;
                    }
                    count += rec(j - b1, m - b2, ell - 1, (b1, b2));
                }
            }
            count
        }
        rec(j, m, ell, (0, 0))
    }

    #[test]
    fn partitions_match_brute_force_and_invariants() {
        for j in 0..=4 {
            for m in 0..=4 {
                for ell in 1..=(j + m) {
                    let parts = enumerate_partitions(j, m, ell);
                    assert_eq!(parts.len(), brute_force_count(j, m, ell), "({j},{m},{ell})");
                    let mut seen = std::collections::HashSet::new();
                    for p in &parts {
                        assert_eq!(p.totals(), (ell, j, m));
                        assert!(p.blocks.iter().all(|b| b.mult > 0 && (b.b1, b.b2) != (0, 0)));
                        assert!(p.blocks.windows(2).all(|w| (w[0].b1, w[0].b2) < (w[1].b1, w[1].b2)));
                        assert!(seen.insert(p.clone()), "duplicate {p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn faa_di_bruno_examples() {
        // exp(a + b), mixed derivative
        let g = &Jet2::var_a(2).unwrap() + &Jet2::var_b(2).unwrap();
        let v = faa_di_bruno_coeff(&[1.0, 1.0, 1.0], &g, 1, 1).unwrap();
        assert!((v - 1.0).abs() < 1e-15);

        // (1+q)^{-1} with q = c a: second a-derivative is 2 c^2
        let c1 = 0.7;
        let g = Jet2::var_a(2).unwrap().scale(c1);
        let outer = [1.0, -1.0, 2.0];
        let v = faa_di_bruno_coeff(&outer, &g, 2, 0).unwrap();
        assert!((v - 2.0 * c1 * c1).abs() < 1e-15);

        assert_eq!(faa_di_bruno_coeff(&[4.2], &g, 0, 0).unwrap(), 4.2);
        assert!(matches!(
            faa_di_bruno_coeff(&[1.0], &g, 1, 0),
            Err(Error::InsufficientOuterDerivs { needed: 2, got: 1 })
        ));
    }

    fn arb_jet(order: usize) -> impl Strategy<Value = Jet2> {
        proptest::collection::vec(-2.0f64..2.0, len_for(order))
            .prop_map(move |v| Jet2 { order, coeff: v })
    }

    fn arb_positive_jet(order: usize) -> impl Strategy<Value = Jet2> {
        (0.5f64..3.0, arb_jet(order)).prop_map(|(c0, mut j)| {
            j.coeff[0] = c0;
            j
        })
    }

    proptest! {
        #[test]
        fn mul_commutes(x in arb_jet(4), y in arb_jet(4)) {
            let xy = &x * &y;
            let yx = &y * &x;
            for ((_, _, p), (_, _, q)) in xy.iter().zip(yx.iter()) {
                prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
            }
        }

        #[test]
        fn mul_associates(x in arb_jet(3), y in arb_jet(3), z in arb_jet(3)) {
            let l = &(&x * &y) * &z;
            let r = &x * &(&y * &z);
            for ((_, _, p), (_, _, q)) in l.iter().zip(r.iter()) {
                prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
            }
        }

        #[test]
        fn reciprocal_inverts(x in arb_positive_jet(5)) {
            let one = &x.reciprocal().unwrap() * &x;
            prop_assert!((one.coeff(0, 0) - 1.0).abs() < 1e-12);
            for (j, m, c) in one.iter().skip(1) {
                prop_assert!(c.abs() < 1e-10, "({}, {}) = {}", j, m, c);
            }
            let back = x.reciprocal().unwrap().reciprocal().unwrap();
            for ((_, _, p), (_, _, q)) in back.iter().zip(x.iter()) {
                prop_assert!((p - q).abs() <= 1e-10 * (1.0 + q.abs()));
            }
        }

        #[test]
        fn exp_ln_roundtrip(x in arb_positive_jet(5)) {
            let y = x.ln().unwrap().exp().unwrap();
            for ((_, _, p), (_, _, q)) in y.iter().zip(x.iter()) {
                prop_assert!((p - q).abs() <= 1e-10 * (1.0 + q.abs()));
            }
        }

        #[test]
        fn sqrt_squares_back(x in arb_positive_jet(4)) {
            let s = x.sqrt().unwrap();
            let y = &s * &s;
            for ((_, _, p), (_, _, q)) in y.iter().zip(x.iter()) {
                prop_assert!((p - q).abs() <= 1e-10 * (1.0 + q.abs()));
            }
        }

        #[test]
        fn faa_di_bruno_matches_horner(x in arb_positive_jet(4)) {
            // f = exp and f = 1/x, both routes
            let e = x.exp().unwrap();
            let x0 = x.constant_term();
            let exp_derivs = vec![x0.exp(); 5];
            let inv_derivs: Vec<f64> = (0..5)
                .map(|l| (-1f64).powi(l as i32) * factorial(l) / x0.powi(l as i32 + 1))
                .collect();
            let r = x.reciprocal().unwrap();
            for d in 0..=4 {
                for m in 0..=d {
                    let j = d - m;
                    let fe = faa_di_bruno_coeff(&exp_derivs, &x, j, m).unwrap();
                    prop_assert!((fe - e.derivative(j, m)).abs() <= 1e-9 * (1.0 + fe.abs()));
                    let fr = faa_di_bruno_coeff(&inv_derivs, &x, j, m).unwrap();
                    prop_assert!((fr - r.derivative(j, m)).abs() <= 1e-9 * (1.0 + fr.abs()));
                }
            }
        }
    }
}
