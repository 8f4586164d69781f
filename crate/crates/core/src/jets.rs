//! Truncated multivariate Taylor arithmetic ("jets") up to third order.
//!
//! A [`Jet`] carries the value of a scalar at a base point together with its
//! gradient, Hessian and third-derivative blocks with respect to the chart
//! coordinates. Arithmetic on jets is exact truncated Taylor algebra, so every
//! derivative the geometry pipeline consumes comes out of composition rules
//! rather than finite differencing.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("jet order {order} exceeds supported maximum {MAX_ORDER}")]
    OrderOutOfRange { order: usize },
    #[error("operands disagree in base point or order")]
    OperandMismatch,
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("sqrt of a jet with non-positive value {value}")]
    SqrtNonPositive { value: f64 },
    #[error("partial derivative requested from an order-0 jet")]
    NoDerivatives,
}

/// Base point and truncation order shared by a family of jets.
///
/// All jets entering a common expression must be created from the same space;
/// mixing base points or orders is a hard error.
#[derive(Clone, Debug)]
pub struct JetSpace {
    point: Arc<[f64]>,
    order: usize,
}

impl JetSpace {
    pub fn new(point: &[f64], order: usize) -> Result<Self, JetError> {
        if order > MAX_ORDER {
            return Err(JetError::OrderOutOfRange { order });
        }
        Ok(Self {
            point: point.into(),
            order,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    /// Jet of the `i`-th coordinate function: value `point[i]`, gradient the
    /// `i`-th unit vector, higher blocks zero.
    pub fn coordinate(&self, i: usize) -> Result<Jet, JetError> {
        let n = self.dim();
        if i >= n {
            return Err(JetError::IndexOutOfRange { index: i, dim: n });
        }
        let mut jet = Jet::zeroed(self.point.clone(), self.order, n);
        jet.value = self.point[i];
        if self.order >= 1 {
            jet.grad[i] = 1.0;
        }
        Ok(jet)
    }

    /// All coordinate jets in order.
    pub fn coordinates(&self) -> Vec<Jet> {
        (0..self.dim())
            .map(|i| self.coordinate(i).expect("index in range"))
            .collect()
    }

    pub fn constant(&self, value: f64) -> Jet {
        let mut jet = Jet::zeroed(self.point.clone(), self.order, self.dim());
        jet.value = value;
        jet
    }
}

/// Lift of the `i`-th coordinate at `point`, truncated at `order`.
pub fn lift_coordinate(i: usize, point: &[f64], order: usize) -> Result<Jet, JetError> {
    JetSpace::new(point, order)?.coordinate(i)
}

/// Truncated Taylor expansion of a scalar at a base point.
///
/// Derivative blocks are stored dense: `grad` has `n` entries, `hess` is the
/// full symmetric `n x n` matrix in row-major order and `third` the full
/// symmetric `n^3` block. Blocks beyond `order` are empty.
#[derive(Clone)]
pub struct Jet {
    point: Arc<[f64]>,
    nvars: usize,
    order: usize,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
    third: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("value", &self.value)
            .field("grad", &self.grad)
            .finish()
    }
}

impl Jet {
    fn zeroed(point: Arc<[f64]>, order: usize, nvars: usize) -> Self {
        Self {
            point,
            nvars,
            order,
            value: 0.0,
            grad: if order >= 1 { vec![0.0; nvars] } else { Vec::new() },
            hess: if order >= 2 {
                vec![0.0; nvars * nvars]
            } else {
                Vec::new()
            },
            third: if order >= 3 {
                vec![0.0; nvars * nvars * nvars]
            } else {
                Vec::new()
            },
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn base_point(&self) -> &[f64] {
        &self.point
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// First partial with respect to variable `i` (zero for order-0 jets).
    pub fn gradient(&self, i: usize) -> f64 {
        if self.order >= 1 {
            self.grad[i]
        } else {
            0.0
        }
    }

    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        if self.order >= 2 {
            self.hess[i * self.nvars + j]
        } else {
            0.0
        }
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        if self.order >= 3 {
            self.third[(i * self.nvars + j) * self.nvars + k]
        } else {
            0.0
        }
    }

    fn same_family(&self, other: &Jet) -> bool {
        self.order == other.order
            && self.nvars == other.nvars
            && (Arc::ptr_eq(&self.point, &other.point) || self.point[..] == other.point[..])
    }

    fn assert_family(&self, other: &Jet) {
        assert!(
            self.same_family(other),
            "jet operands disagree in base point or order"
        );
    }

    /// Copy truncated to a (lower or equal) order.
    pub fn truncated(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        let mut out = Jet::zeroed(self.point.clone(), order, self.nvars);
        out.value = self.value;
        if order >= 1 {
            out.grad.copy_from_slice(&self.grad);
        }
        if order >= 2 {
            out.hess.copy_from_slice(&self.hess);
        }
        if order >= 3 {
            out.third.copy_from_slice(&self.third);
        }
        out
    }

    /// Partial derivative as a jet of one order lower: the order-k Taylor data
    /// of `f` contains the order-(k-1) data of each first partial.
    pub fn partial(&self, k: usize) -> Result<Jet, JetError> {
        if self.order == 0 {
            return Err(JetError::NoDerivatives);
        }
        if k >= self.nvars {
            return Err(JetError::IndexOutOfRange {
                index: k,
                dim: self.nvars,
            });
        }
        let n = self.nvars;
        let mut out = Jet::zeroed(self.point.clone(), self.order - 1, n);
        out.value = self.grad[k];
        if out.order >= 1 {
            for i in 0..n {
                out.grad[i] = self.hess[k * n + i];
            }
        }
        if out.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.hess[i * n + j] = self.third[(k * n + i) * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Unary composition: applies an outer scalar function given its value and
    /// first three derivatives at `self.value()` (Faa di Bruno to order 3).
    ///
    /// This is the hook for analytic functions beyond the built-in set; the
    /// library itself uses it for `exp`, `sqrt` and `powf`.
    pub fn compose_scalar(&self, f0: f64, d1: f64, d2: f64, d3: f64) -> Jet {
        let n = self.nvars;
        let mut out = Jet::zeroed(self.point.clone(), self.order, n);
        out.value = f0;
        if self.order >= 1 {
            for i in 0..n {
                out.grad[i] = d1 * self.grad[i];
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in i..n {
                    let v = d2 * self.grad[i] * self.grad[j] + d1 * self.hess[i * n + j];
                    out.hess[i * n + j] = v;
                    out.hess[j * n + i] = v;
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let gi = self.grad[i];
                        let gj = self.grad[j];
                        let gk = self.grad[k];
                        let hij = self.hess[i * n + j];
                        let hik = self.hess[i * n + k];
                        let hjk = self.hess[j * n + k];
                        let v = d3 * gi * gj * gk
                            + d2 * (hij * gk + hik * gj + hjk * gi)
                            + d1 * self.third[(i * n + j) * n + k];
                        set_sym3(&mut out.third, n, i, j, k, v);
                    }
                }
            }
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.compose_scalar(e, e, e, e)
    }

    pub fn try_sqrt(&self) -> Result<Jet, JetError> {
        if self.value <= 0.0 {
            return Err(JetError::SqrtNonPositive { value: self.value });
        }
        let s = self.value.sqrt();
        Ok(self.compose_scalar(s, 0.5 / s, -0.25 / (s * self.value), 0.375 / (s * self.value * self.value)))
    }

    pub fn sqrt(&self) -> Jet {
        self.try_sqrt().expect("sqrt of non-positive jet value")
    }

    /// Real power `self^a` (requires positive value for non-integer `a`).
    pub fn powf(&self, a: f64) -> Jet {
        let x = self.value;
        let f0 = x.powf(a);
        self.compose_scalar(
            f0,
            a * x.powf(a - 1.0),
            a * (a - 1.0) * x.powf(a - 2.0),
            a * (a - 1.0) * (a - 2.0) * x.powf(a - 3.0),
        )
    }

    /// Integer power by repeated multiplication (valid for any value).
    pub fn powi(&self, mut e: u32) -> Jet {
        let space_one = {
            let mut jet = Jet::zeroed(self.point.clone(), self.order, self.nvars);
            jet.value = 1.0;
            jet
        };
        let mut acc = space_one;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn try_recip(&self) -> Result<Jet, JetError> {
        if self.value == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let x = self.value;
        let inv = 1.0 / x;
        Ok(self.compose_scalar(inv, -inv * inv, 2.0 * inv * inv * inv, -6.0 * inv * inv * inv * inv))
    }

    pub fn try_div(&self, rhs: &Jet) -> Result<Jet, JetError> {
        if !self.same_family(rhs) {
            return Err(JetError::OperandMismatch);
        }
        Ok(self * &rhs.try_recip()?)
    }

    pub fn scale(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.value *= c;
        for v in &mut out.grad {
            *v *= c;
        }
        for v in &mut out.hess {
            *v *= c;
        }
        for v in &mut out.third {
            *v *= c;
        }
        out
    }

    pub fn add_scalar(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.value += c;
        out
    }
}

fn set_sym3(third: &mut [f64], n: usize, i: usize, j: usize, k: usize, v: f64) {
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    third[idx(i, j, k)] = v;
    third[idx(i, k, j)] = v;
    third[idx(j, i, k)] = v;
    third[idx(j, k, i)] = v;
    third[idx(k, i, j)] = v;
    third[idx(k, j, i)] = v;
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.assert_family(rhs);
        let mut out = self.clone();
        out.value += rhs.value;
        for (a, b) in out.grad.iter_mut().zip(&rhs.grad) {
            *a += b;
        }
        for (a, b) in out.hess.iter_mut().zip(&rhs.hess) {
            *a += b;
        }
        for (a, b) in out.third.iter_mut().zip(&rhs.third) {
            *a += b;
        }
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.assert_family(rhs);
        let mut out = self.clone();
        out.value -= rhs.value;
        for (a, b) in out.grad.iter_mut().zip(&rhs.grad) {
            *a -= b;
        }
        for (a, b) in out.hess.iter_mut().zip(&rhs.hess) {
            *a -= b;
        }
        for (a, b) in out.third.iter_mut().zip(&rhs.third) {
            *a -= b;
        }
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.assert_family(rhs);
        let n = self.nvars;
        let mut out = Jet::zeroed(self.point.clone(), self.order, n);
        out.value = self.value * rhs.value;
        if self.order >= 1 {
            for i in 0..n {
                out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in i..n {
                    let v = self.hess[i * n + j] * rhs.value
                        + self.grad[i] * rhs.grad[j]
                        + self.grad[j] * rhs.grad[i]
                        + self.value * rhs.hess[i * n + j];
                    out.hess[i * n + j] = v;
                    out.hess[j * n + i] = v;
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let v = self.third[(i * n + j) * n + k] * rhs.value
                            + self.value * rhs.third[(i * n + j) * n + k]
                            + self.hess[i * n + j] * rhs.grad[k]
                            + self.hess[i * n + k] * rhs.grad[j]
                            + self.hess[j * n + k] * rhs.grad[i]
                            + self.grad[i] * rhs.hess[j * n + k]
                            + self.grad[j] * rhs.hess[i * n + k]
                            + self.grad[k] * rhs.hess[i * n + j];
                        set_sym3(&mut out.third, n, i, j, k, v);
                    }
                }
            }
        }
        out
    }
}

impl Div for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.try_div(rhs).expect("jet division")
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $trait::$method(self, &rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

/// Pushes ambient-variable jets of a quantity through source-variable jets of
/// a chart map (multivariate Faa di Bruno, truncated at the ambient order).
///
/// `ambient` is a jet in the ambient chart's variables at `map(p)`; `map`
/// holds source jets of each ambient coordinate of the chart map at `p`. The
/// result is the source-variable jet of the composite, at the order carried by
/// `ambient`.
pub fn compose_through(ambient: &Jet, map: &[Jet]) -> Jet {
    let amb_n = ambient.nvars;
    assert_eq!(amb_n, map.len(), "map component count != ambient dimension");
    let first = &map[0];
    let n = first.nvars;
    let order = ambient.order;
    assert!(
        map.iter().all(|m| m.order >= order),
        "map jets must carry at least the ambient order"
    );
    let mut out = Jet::zeroed(first.point.clone(), order, n);
    out.value = ambient.value;
    if order >= 1 {
        for s in 0..n {
            let mut acc = 0.0;
            for c in 0..amb_n {
                acc += ambient.grad[c] * map[c].grad[s];
            }
            out.grad[s] = acc;
        }
    }
    if order >= 2 {
        for s in 0..n {
            for t in s..n {
                let mut acc = 0.0;
                for c in 0..amb_n {
                    acc += ambient.grad[c] * map[c].hess[s * n + t];
                    for d in 0..amb_n {
                        acc += ambient.hess[c * amb_n + d] * map[c].grad[s] * map[d].grad[t];
                    }
                }
                out.hess[s * n + t] = acc;
                out.hess[t * n + s] = acc;
            }
        }
    }
    if order >= 3 {
        for s in 0..n {
            for t in s..n {
                for u in t..n {
                    let mut acc = 0.0;
                    for c in 0..amb_n {
                        acc += ambient.grad[c] * map[c].third[(s * n + t) * n + u];
                        for d in 0..amb_n {
                            acc += ambient.hess[c * amb_n + d]
                                * (map[c].hess[s * n + t] * map[d].grad[u]
                                    + map[c].hess[s * n + u] * map[d].grad[t]
                                    + map[c].grad[s] * map[d].hess[t * n + u]);
                            for e in 0..amb_n {
                                acc += ambient.third[(c * amb_n + d) * amb_n + e]
                                    * map[c].grad[s]
                                    * map[d].grad[t]
                                    * map[e].grad[u];
                            }
                        }
                    }
                    set_sym3(&mut out.third, n, s, t, u, acc);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: &[f64], order: usize) -> JetSpace {
        JetSpace::new(p, order).unwrap()
    }

    #[test]
    fn lift_coordinate_basics() {
        // lift x0 at (2,5), order 2
        let j = lift_coordinate(0, &[2.0, 5.0], 2).unwrap();
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.gradient(0), 1.0);
        assert_eq!(j.gradient(1), 0.0);
        for i in 0..2 {
            for k in 0..2 {
                assert_eq!(j.hessian(i, k), 0.0);
            }
        }

        // order-0 lift carries no derivative blocks
        let j0 = lift_coordinate(1, &[0.0, 0.0], 0).unwrap();
        assert_eq!(j0.value(), 0.0);
        assert_eq!(j0.gradient(1), 0.0);

        assert!(matches!(
            lift_coordinate(3, &[0.0, 0.0], 1),
            Err(JetError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            JetSpace::new(&[0.0], 4),
            Err(JetError::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn product_rule_through_xy() {
        let s = space(&[2.0, 5.0], 2);
        let x = s.coordinate(0).unwrap();
        let y = s.coordinate(1).unwrap();
        let f = &x * &y;
        assert_eq!(f.value(), 10.0);
        assert_eq!(f.gradient(0), 5.0);
        assert_eq!(f.gradient(1), 2.0);
        assert_eq!(f.hessian(0, 1), 1.0);
        assert_eq!(f.hessian(1, 0), 1.0);
        assert_eq!(f.hessian(0, 0), 0.0);
    }

    #[test]
    fn exp_series_at_zero() {
        let s = space(&[0.0], 3);
        let x = s.coordinate(0).unwrap();
        let e = x.exp();
        assert!((e.value() - 1.0).abs() < 1e-15);
        assert!((e.gradient(0) - 1.0).abs() < 1e-15);
        assert!((e.hessian(0, 0) - 1.0).abs() < 1e-15);
        assert!((e.third(0, 0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cube_via_product() {
        // x^2 * x at x=3, order 2: value 27, d/dx 27, d2/dx2 18
        let s = space(&[3.0], 2);
        let x = s.coordinate(0).unwrap();
        let f = &(&x * &x) * &x;
        assert!((f.value() - 27.0).abs() < 1e-12);
        assert!((f.gradient(0) - 27.0).abs() < 1e-12);
        assert!((f.hessian(0, 0) - 18.0).abs() < 1e-12);
    }

    #[test]
    fn division_and_sqrt_errors() {
        let s = space(&[1.0], 2);
        let zero = s.constant(0.0);
        let one = s.constant(1.0);
        assert!(matches!(one.try_div(&zero), Err(JetError::DivisionByZero)));
        let neg = s.constant(-2.0);
        assert!(matches!(
            neg.try_sqrt(),
            Err(JetError::SqrtNonPositive { .. })
        ));

        let other = space(&[2.0], 2).constant(1.0);
        assert!(matches!(one.try_div(&other), Err(JetError::OperandMismatch)));
    }

    #[test]
    fn partial_demotes_order() {
        // f = x^2 y at (1,2): f_x = 2xy, jet of f_x should carry its gradient.
        let s = space(&[1.0, 2.0], 3);
        let x = s.coordinate(0).unwrap();
        let y = s.coordinate(1).unwrap();
        let f = &(&x * &x) * &y;
        let fx = f.partial(0).unwrap();
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - 4.0).abs() < 1e-12); // 2xy = 4
        assert!((fx.gradient(0) - 4.0).abs() < 1e-12); // 2y
        assert!((fx.gradient(1) - 2.0).abs() < 1e-12); // 2x
        assert!((fx.hessian(0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn compose_through_matches_direct_evaluation() {
        // F(u,v) = u*v^2 + exp(u), map (s,t) -> (s^2 + t, s - t) at (0.4, -0.3).
        let p = [0.4, -0.3];
        let src = space(&p, 3);
        let sj = src.coordinate(0).unwrap();
        let tj = src.coordinate(1).unwrap();
        let m0 = &(&sj * &sj) + &tj;
        let m1 = &sj - &tj;

        // Direct: evaluate F on the source jets.
        let direct = &(&m0 * &(&m1 * &m1)) + &m0.exp();

        // Composed: ambient jets of F at (u0, v0), pushed through the map.
        let u0 = p[0] * p[0] + p[1];
        let v0 = p[0] - p[1];
        let amb = space(&[u0, v0], 3);
        let u = amb.coordinate(0).unwrap();
        let v = amb.coordinate(1).unwrap();
        let f_amb = &(&u * &(&v * &v)) + &u.exp();
        let composed = compose_through(&f_amb, &[m0.clone(), m1.clone()]);

        assert!((direct.value() - composed.value()).abs() < 1e-12);
        for i in 0..2 {
            assert!((direct.gradient(i) - composed.gradient(i)).abs() < 1e-12);
            for j in 0..2 {
                assert!((direct.hessian(i, j) - composed.hessian(i, j)).abs() < 1e-11);
                for k in 0..2 {
                    assert!((direct.third(i, j, k) - composed.third(i, j, k)).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn block_symmetry() {
        let s = space(&[0.7, -1.2, 0.3], 3);
        let x = s.coordinate(0).unwrap();
        let y = s.coordinate(1).unwrap();
        let z = s.coordinate(2).unwrap();
        let f = (&(&x * &y) * &z + &x.exp() * &(&y * &y)).powi(2);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.hessian(i, j), f.hessian(j, i));
                for k in 0..3 {
                    let v = f.third(i, j, k);
                    assert_eq!(v, f.third(i, k, j));
                    assert_eq!(v, f.third(j, i, k));
                    assert_eq!(v, f.third(k, j, i));
                }
            }
        }
    }
}
