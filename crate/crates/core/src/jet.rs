//! Truncated Taylor jets in one and two variables, forward-mode duals, and
//! the [`Scalar`] abstraction that lets one evaluator produce plain values,
//! jets, or metric derivatives.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

/// Relative tolerance for exact jet division.
pub const DIVISIBILITY_TOL: f64 = 1e-9;
/// Coefficients of a difference that fall below this fraction of the
/// operands are rounding residue; see [`Jet2::chop`].
pub const CANCELLATION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("non-divisible: residual {residual:.3e} against scale {scale:.3e}")]
    NonDivisible { residual: f64, scale: f64 },
    #[error("divisor has a vanishing linear part")]
    DegenerateDivisor,
    #[error("jet of order {have} cannot supply order {need}")]
    InsufficientOrder { have: usize, need: usize },
}

/// Number type accepted by the expression evaluator and the geometry code.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same shape (order, base) as `self`.
    fn lift(&self, c: f64) -> Self;
    /// The constant term.
    fn value(&self) -> f64;
    fn scale(&self, c: f64) -> Self;
    fn shift(&self, c: f64) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powf(&self, a: f64) -> Self;

    fn tan(&self) -> Self {
        self.sin() / self.cos()
    }

    /// False only for plain numbers, where `sqrt(0)` is still meaningful.
    fn carries_derivatives(&self) -> bool {
        true
    }

    /// Integer power by repeated squaring.
    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = self.lift(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn shift(&self, c: f64) -> Self {
        self + c
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn powf(&self, a: f64) -> Self {
        f64::powf(*self, a)
    }
    fn carries_derivatives(&self) -> bool {
        false
    }
}

// Taylor coefficients of elementary functions at a0, through degree n.

fn series_exp(a0: f64, n: usize) -> Vec<f64> {
    let e = a0.exp();
    let mut out = Vec::with_capacity(n + 1);
    let mut fact = 1.0;
    for k in 0..=n {
        if k > 0 {
            fact *= k as f64;
        }
        out.push(e / fact);
    }
    out
}

fn series_sin_cos(a0: f64, n: usize, cosine: bool) -> Vec<f64> {
    let (s, c) = a0.sin_cos();
    // derivatives cycle sin, cos, -sin, -cos
    let cycle = if cosine { [c, -s, -c, s] } else { [s, c, -s, -c] };
    let mut out = Vec::with_capacity(n + 1);
    let mut fact = 1.0;
    for k in 0..=n {
        if k > 0 {
            fact *= k as f64;
        }
        out.push(cycle[k % 4] / fact);
    }
    out
}

fn series_ln(a0: f64, n: usize) -> Vec<f64> {
    let mut out = vec![a0.ln()];
    let mut p = 1.0;
    for k in 1..=n {
        p *= a0;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign / (k as f64 * p));
    }
    out
}

fn series_powf(a0: f64, alpha: f64, n: usize) -> Vec<f64> {
    let lead = a0.powf(alpha);
    let mut out = vec![lead];
    let mut binom = 1.0;
    let mut p = 1.0;
    for k in 1..=n {
        binom *= (alpha - (k - 1) as f64) / k as f64;
        p *= a0;
        out.push(lead * binom / p);
    }
    out
}

fn series_recip(a0: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut t = 1.0 / a0;
    for _ in 0..=n {
        out.push(t);
        t *= -1.0 / a0;
    }
    out
}

/// Jets whose non-constant part is nilpotent, so power series can be
/// composed with Horner's rule.
trait Truncated: Scalar {
    fn nilpotent(&self) -> Self;

    fn apply_series(&self, coeffs: &[f64]) -> Self {
        let x = self.nilpotent();
        let n = coeffs.len() - 1;
        let mut acc = self.lift(coeffs[n]);
        for k in (0..n).rev() {
            acc = (acc * x.clone()).shift(coeffs[k]);
        }
        acc
    }
}

macro_rules! jet_scalar_impl {
    ($t:ty) => {
        impl Scalar for $t {
            fn lift(&self, c: f64) -> Self {
                self.constant_like(c)
            }
            fn value(&self) -> f64 {
                self.c[0]
            }
            fn scale(&self, s: f64) -> Self {
                let mut out = self.clone();
                out.c.iter_mut().for_each(|x| *x *= s);
                out
            }
            fn shift(&self, s: f64) -> Self {
                let mut out = self.clone();
                out.c[0] += s;
                out
            }
            fn recip(&self) -> Self {
                self.apply_series(&series_recip(self.c[0], self.order))
            }
            fn sqrt(&self) -> Self {
                self.apply_series(&series_powf(self.c[0], 0.5, self.order))
            }
            fn exp(&self) -> Self {
                self.apply_series(&series_exp(self.c[0], self.order))
            }
            fn ln(&self) -> Self {
                self.apply_series(&series_ln(self.c[0], self.order))
            }
            fn sin(&self) -> Self {
                self.apply_series(&series_sin_cos(self.c[0], self.order, false))
            }
            fn cos(&self) -> Self {
                self.apply_series(&series_sin_cos(self.c[0], self.order, true))
            }
            fn powf(&self, a: f64) -> Self {
                self.apply_series(&series_powf(self.c[0], a, self.order))
            }
        }

        impl Truncated for $t {
            fn nilpotent(&self) -> Self {
                let mut out = self.clone();
                out.c[0] = 0.0;
                out
            }
        }

        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                let order = self.order.min(rhs.order);
                let mut out = self.truncate(order);
                for (a, b) in out.c.iter_mut().zip(rhs.c.iter()) {
                    *a += b;
                }
                out
            }
        }

        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                let order = self.order.min(rhs.order);
                let mut out = self.truncate(order);
                for (a, b) in out.c.iter_mut().zip(rhs.c.iter()) {
                    *a -= b;
                }
                out
            }
        }

        impl Neg for $t {
            type Output = $t;
            fn neg(mut self) -> $t {
                self.c.iter_mut().for_each(|x| *x = -*x);
                self
            }
        }

        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                self.mul_ref(&rhs)
            }
        }

        impl Div for $t {
            type Output = $t;
            #[allow(clippy::suspicious_arithmetic_impl)]
            fn div(self, rhs: $t) -> $t {
                self.mul_ref(&rhs.recip())
            }
        }
    };
}

/// Univariate truncated Taylor jet: `c[k]` is the k-th Taylor coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    order: usize,
    c: Vec<f64>,
}

impl Jet1 {
    pub fn zeros(order: usize) -> Self {
        Self { order, c: vec![0.0; order + 1] }
    }

    pub fn constant(order: usize, value: f64) -> Self {
        let mut j = Self::zeros(order);
        j.c[0] = value;
        j
    }

    /// The identity map `s ↦ s0 + s`.
    pub fn variable(order: usize, s0: f64) -> Self {
        let mut j = Self::constant(order, s0);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least a constant term");
        Self { order: coeffs.len() - 1, c: coeffs }
    }

    fn constant_like(&self, value: f64) -> Self {
        Self::constant(self.order, value)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Taylor coefficient of degree k (zero beyond the order).
    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    /// k-th derivative at the base point.
    pub fn derivative_value(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeff(k) * fact
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self { order, c: self.c[..=order].to_vec() }
    }

    /// Derivative jet, one order lower.
    pub fn derivative(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let c = (1..=self.order).map(|k| k as f64 * self.c[k]).collect();
        Self { order: self.order - 1, c }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &x| acc * s + x)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut c = vec![0.0; order + 1];
        for (i, a) in self.c.iter().enumerate().take(order + 1) {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate().take(order + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Self { order, c }
    }

    /// Divide by `s`; the constant term must vanish.
    pub fn deflate(&self) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::InsufficientOrder { have: 0, need: 1 });
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if self.c[0].abs() > DIVISIBILITY_TOL * scale {
            return Err(JetError::NonDivisible { residual: self.c[0].abs(), scale });
        }
        Ok(Self { order: self.order - 1, c: self.c[1..].to_vec() })
    }

    /// Exact quotient `self / rhs` where both vanish at the base point and
    /// `rhs` has a non-zero slope. The result has order `min - 1`.
    pub fn div_vanishing(&self, rhs: &Self) -> Result<Self, JetError> {
        let n = self.order.min(rhs.order);
        if n == 0 {
            return Err(JetError::InsufficientOrder { have: 0, need: 1 });
        }
        let b1 = rhs.c[1];
        let bscale = rhs.max_abs();
        if b1.abs() <= 1e-14 * bscale.max(f64::MIN_POSITIVE) || b1 == 0.0 {
            return Err(JetError::DegenerateDivisor);
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if self.c[0].abs() > DIVISIBILITY_TOL * scale {
            return Err(JetError::NonDivisible { residual: self.c[0].abs(), scale });
        }
        let mut q = vec![0.0; n];
        for k in 1..=n {
            let mut r = self.c[k];
            for j in 2..=k {
                r -= rhs.c[j] * q[k - j];
            }
            q[k - 1] = r / b1;
        }
        Ok(Self { order: n - 1, c: q })
    }
}

impl fmt::Display for Jet1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet1{:?}", self.c)
    }
}

jet_scalar_impl!(Jet1);

/// Bivariate truncated Taylor jet at `base`. Coefficient `c[i][j]` multiplies
/// `du^i dv^j`; storage is grouped by total degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    base: [f64; 2],
    order: usize,
    c: Vec<f64>,
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let k = i + j;
    k * (k + 1) / 2 + j
}

/// Number of coefficients of a bivariate jet of the given order.
pub fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Parameter-plane coordinate selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    U,
    V,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::U => Axis::V,
            Axis::V => Axis::U,
        }
    }
    pub fn index(self) -> usize {
        match self {
            Axis::U => 0,
            Axis::V => 1,
        }
    }
}

impl Jet2 {
    pub fn zeros(base: [f64; 2], order: usize) -> Self {
        Self { base, order, c: vec![0.0; coeff_count(order)] }
    }

    pub fn constant(base: [f64; 2], order: usize, value: f64) -> Self {
        let mut j = Self::zeros(base, order);
        j.c[0] = value;
        j
    }

    /// The coordinate function u (or v) expanded at `base`.
    pub fn variable(base: [f64; 2], order: usize, axis: Axis) -> Self {
        let mut j = Self::constant(base, order, base[axis.index()]);
        if order >= 1 {
            match axis {
                Axis::U => j.c[idx(1, 0)] = 1.0,
                Axis::V => j.c[idx(0, 1)] = 1.0,
            }
        }
        j
    }

    /// Build from a closure over (i, j) with i + j ≤ order.
    pub fn from_fn(base: [f64; 2], order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut j = Self::zeros(base, order);
        for k in 0..=order {
            for jj in 0..=k {
                j.c[idx(k - jj, jj)] = f(k - jj, jj);
            }
        }
        j
    }

    fn constant_like(&self, value: f64) -> Self {
        Self::constant(self.base, self.order, value)
    }

    pub fn base(&self) -> [f64; 2] {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Raw coefficients in degree-grouped order.
    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Taylor coefficient of `du^i dv^j`; zero beyond the order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[idx(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.order, "coefficient beyond jet order");
        self.c[idx(i, j)] = value;
    }

    /// ∂^{i+j}/∂u^i∂v^j at the base point.
    pub fn partial_value(&self, i: usize, j: usize) -> f64 {
        let fi: f64 = (1..=i).map(|x| x as f64).product();
        let fj: f64 = (1..=j).map(|x| x as f64).product();
        self.coeff(i, j) * fi * fj
    }

    /// Gradient (∂u, ∂v) at the base point.
    pub fn gradient(&self) -> [f64; 2] {
        [self.coeff(1, 0), self.coeff(0, 1)]
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self { base: self.base, order, c: self.c[..coeff_count(order)].to_vec() }
    }

    /// Partial derivative jet along `axis`, one order lower.
    pub fn partial(&self, axis: Axis) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.order - 1;
        Self::from_fn(self.base, n, |i, j| match axis {
            Axis::U => (i + 1) as f64 * self.c[idx(i + 1, j)],
            Axis::V => (j + 1) as f64 * self.c[idx(i, j + 1)],
        })
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = Self::zeros(self.base, order);
        for k1 in 0..=order {
            for j1 in 0..=k1 {
                let a = self.c[idx(k1 - j1, j1)];
                if a == 0.0 {
                    continue;
                }
                for k2 in 0..=(order - k1) {
                    let row = (k1 + k2) * (k1 + k2 + 1) / 2 + j1;
                    let src = k2 * (k2 + 1) / 2;
                    for j2 in 0..=k2 {
                        out.c[row + j2] += a * rhs.c[src + j2];
                    }
                }
            }
        }
        out
    }

    /// Zero every coefficient with magnitude at most `floor`.
    pub fn chop(mut self, floor: f64) -> Self {
        for c in &mut self.c {
            if c.abs() <= floor {
                *c = 0.0;
            }
        }
        self
    }

    /// Divide by the coordinate named by `axis`. Every coefficient free of
    /// that variable must vanish (relative tolerance 1e-9).
    pub fn deflate(&self, axis: Axis) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::InsufficientOrder { have: 0, need: 1 });
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut residual: f64 = 0.0;
        for k in 0..=self.order {
            let c = match axis {
                Axis::U => self.c[idx(0, k)],
                Axis::V => self.c[idx(k, 0)],
            };
            residual = residual.max(c.abs());
        }
        if residual > DIVISIBILITY_TOL * scale {
            return Err(JetError::NonDivisible { residual, scale });
        }
        Ok(Self::from_fn(self.base, self.order - 1, |i, j| match axis {
            Axis::U => self.c[idx(i + 1, j)],
            Axis::V => self.c[idx(i, j + 1)],
        }))
    }

    /// Exact quotient by a jet that vanishes at the base point with a
    /// non-zero linear part. Result order is `min(orders) - 1`.
    pub fn div_vanishing(&self, rhs: &Self) -> Result<Self, JetError> {
        let n = self.order.min(rhs.order);
        if n == 0 {
            return Err(JetError::InsufficientOrder { have: 0, need: 1 });
        }
        let (bu, bv) = (rhs.c[idx(1, 0)], rhs.c[idx(0, 1)]);
        let bscale = rhs.max_abs().max(f64::MIN_POSITIVE);
        if bu.abs().max(bv.abs()) <= 1e-14 * bscale {
            return Err(JetError::DegenerateDivisor);
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if self.c[0].abs() > DIVISIBILITY_TOL * scale {
            return Err(JetError::NonDivisible { residual: self.c[0].abs(), scale });
        }
        let mut q = Self::zeros(self.base, n - 1);
        let mut worst: f64 = 0.0;
        for k in 1..=n {
            // residual homogeneous part of degree k, indexed by v-power
            let mut r: Vec<f64> = (0..=k).map(|j| self.c[idx(k - j, j)]).collect();
            for d in 2..=k {
                let qd = k - d; // degree of the quotient part paired with rhs degree d
                for jb in 0..=d {
                    let b = rhs.c[idx(d - jb, jb)];
                    if b == 0.0 {
                        continue;
                    }
                    for jq in 0..=qd {
                        r[jb + jq] -= b * q.c[idx(qd - jq, jq)];
                    }
                }
            }
            let (part, rem) = divide_homogeneous(&r, bu, bv);
            worst = worst.max(rem.abs());
            for (j, x) in part.into_iter().enumerate() {
                q.c[idx(k - 1 - j, j)] = x;
            }
        }
        if worst > DIVISIBILITY_TOL * scale {
            return Err(JetError::NonDivisible { residual: worst, scale });
        }
        Ok(q)
    }

    /// Substitute `u = u0 + dx(s)`, `v = v0 + dy(s)`; both offsets must
    /// vanish at s = 0. Result order is the smaller of the orders involved.
    pub fn compose_curve(&self, dx: &Jet1, dy: &Jet1) -> Jet1 {
        let order = self.order.min(dx.order()).min(dy.order());
        let mut px = vec![Jet1::constant(order, 1.0)];
        let mut py = vec![Jet1::constant(order, 1.0)];
        let dx = dx.nilpotent().truncate(order);
        let dy = dy.nilpotent().truncate(order);
        for k in 1..=order {
            px.push(px[k - 1].mul_ref(&dx));
            py.push(py[k - 1].mul_ref(&dy));
        }
        let mut out = Jet1::zeros(order);
        for k in 0..=self.order {
            for j in 0..=k {
                let c = self.c[idx(k - j, j)];
                // offsets are nilpotent, so powers past the order vanish
                if c == 0.0 || k - j > order || j > order {
                    continue;
                }
                let term = px[k - j].mul_ref(&py[j]);
                for (o, t) in out.c.iter_mut().zip(term.c.iter()) {
                    *o += c * t;
                }
            }
        }
        out
    }

    /// Substitute `u = u0 + dx`, `v = v0 + dy` with bivariate offsets that
    /// vanish at their own base point.
    pub fn compose(&self, dx: &Jet2, dy: &Jet2) -> Jet2 {
        let order = self.order.min(dx.order).min(dy.order);
        let dx = dx.nilpotent().truncate(order);
        let dy = dy.nilpotent().truncate(order);
        let mut px = vec![Jet2::constant(dx.base, order, 1.0)];
        let mut py = vec![Jet2::constant(dx.base, order, 1.0)];
        for k in 1..=order {
            px.push(px[k - 1].mul_ref(&dx));
            py.push(py[k - 1].mul_ref(&dy));
        }
        let mut out = Jet2::zeros(dx.base, order);
        for k in 0..=self.order.min(order) {
            for j in 0..=k {
                let c = self.c[idx(k - j, j)];
                if c == 0.0 {
                    continue;
                }
                let term = px[k - j].mul_ref(&py[j]);
                for (o, t) in out.c.iter_mut().zip(term.c.iter()) {
                    *o += c * t;
                }
            }
        }
        out
    }

    /// Evaluate the Taylor polynomial at an offset from the base.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..=self.order {
            for j in 0..=k {
                sum += self.c[idx(k - j, j)] * du.powi((k - j) as i32) * dv.powi(j as i32);
            }
        }
        sum
    }

    /// Jet of a function of one variable along `axis`, constant in the other.
    pub fn lift_from(base: [f64; 2], axis: Axis, j: &Jet1) -> Jet2 {
        Jet2::from_fn(base, j.order(), |a, b| match axis {
            Axis::U if b == 0 => j.coeff(a),
            Axis::V if a == 0 => j.coeff(b),
            _ => 0.0,
        })
    }
}

/// Divide the homogeneous polynomial Σ r_j u^{k-j} v^j by `bu·u + bv·v`.
/// Returns the quotient coefficients (by v-power) and the remainder.
fn divide_homogeneous(r: &[f64], bu: f64, bv: f64) -> (Vec<f64>, f64) {
    let k = r.len() - 1;
    let mut q = vec![0.0; k];
    if bu.abs() >= bv.abs() {
        for j in 0..k {
            let prev = if j == 0 { 0.0 } else { q[j - 1] };
            q[j] = (r[j] - bv * prev) / bu;
        }
        let rem = r[k] - bv * q[k - 1];
        (q, rem)
    } else {
        for j in (1..=k).rev() {
            let next = if j == k { 0.0 } else { q[j] };
            q[j - 1] = (r[j] - bu * next) / bv;
        }
        let rem = r[0] - bu * q[0];
        (q, rem)
    }
}

impl fmt::Display for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet2@({}, {})[", self.base[0], self.base[1])?;
        let mut first = true;
        for k in 0..=self.order {
            for j in 0..=k {
                let c = self.c[idx(k - j, j)];
                if c != 0.0 {
                    if !first {
                        write!(f, ", ")?;
                    }
                    write!(f, "c{}{}={}", k - j, j, c)?;
                    first = false;
                }
            }
        }
        write!(f, "]")
    }
}

jet_scalar_impl!(Jet2);

/// Forward dual number with three tangent directions over any scalar.
/// Nesting (`Dual<Dual<f64>>`) gives second derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: [T; 3],
}

impl<T: Scalar> Dual<T> {
    pub fn constant(v: T) -> Self {
        let z = v.lift(0.0);
        Self { d: [z.clone(), z.clone(), z], v }
    }

    /// `v` seeded with the unit tangent along direction `k`.
    pub fn seeded(v: T, k: usize) -> Self {
        let mut out = Self::constant(v);
        out.d[k] = out.v.lift(1.0);
        out
    }

    fn chain(&self, v: T, dv: T) -> Self {
        Self { v, d: self.d.clone().map(|x| x * dv.clone()) }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a0, a1, a2] = self.d;
        let [b0, b1, b2] = rhs.d;
        Self { v: self.v + rhs.v, d: [a0 + b0, a1 + b1, a2 + b2] }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let [a0, a1, a2] = self.d;
        let [b0, b1, b2] = rhs.d;
        Self { v: self.v - rhs.v, d: [a0 - b0, a1 - b1, a2 - b2] }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d: self.d.map(|x| -x) }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = std::array::from_fn(|k| {
            self.v.clone() * rhs.d[k].clone() + self.d[k].clone() * rhs.v.clone()
        });
        Self { v: self.v * rhs.v, d }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn lift(&self, c: f64) -> Self {
        Self::constant(self.v.lift(c))
    }
    fn value(&self) -> f64 {
        self.v.value()
    }
    fn scale(&self, c: f64) -> Self {
        Self { v: self.v.scale(c), d: self.d.clone().map(|x| x.scale(c)) }
    }
    fn shift(&self, c: f64) -> Self {
        Self { v: self.v.shift(c), d: self.d.clone() }
    }
    fn recip(&self) -> Self {
        let r = self.v.recip();
        let dr = -(r.clone() * r.clone());
        self.chain(r, dr)
    }
    fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let ds = s.recip().scale(0.5);
        self.chain(s, ds)
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }
    fn sin(&self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn powf(&self, a: f64) -> Self {
        let p = self.v.powf(a);
        let dp = self.v.powf(a - 1.0).scale(a);
        self.chain(p, dp)
    }
    fn carries_derivatives(&self) -> bool {
        true
    }
}
