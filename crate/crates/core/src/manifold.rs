//! Chart-based Riemannian geometry: metric charts, jet-liftable fields, and
//! everything derived from the metric (Levi-Civita connection, curvature,
//! gradients, exterior derivatives).
//!
//! Curvature convention used throughout:
//! `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z` with
//! the 4-tensor `R(X,Y,Z,W) = g(R(X,Y)Z, W)`. Under this convention the unit
//! round sphere has sectional curvature +1; the convention is pinned by
//! oracle tests and printed in the conventions fingerprint.

use std::sync::Arc;

use thiserror::Error;

use crate::jets::{compose_through, Jet, JetError, JetSpace};
use crate::linalg::{self, LinalgError};
use crate::tensor::{self, mat, sum, t3, t4, vec1, Mat, T3, T4, Vec1};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("singular metric: {0}")]
    SingularMetric(#[from] LinalgError),
    #[error("jet evaluation failed: {0}")]
    Jet(#[from] JetError),
    #[error("metric not symmetric at sampled point (residual {residual:e})")]
    NonSymmetricMetric { residual: f64 },
    #[error("metric not positive definite at sampled point (min eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("immersion differential rank-deficient (smallest singular value {sigma:e})")]
    RankDeficient { sigma: f64 },
    #[error("normal frame construction broke down (residual {residual:e})")]
    FrameBreakdown { residual: f64 },
}

pub type Result<T> = std::result::Result<T, GeomError>;

type ScalarFn = Arc<dyn Fn(&[Jet]) -> Jet + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;
type MatrixFn = Arc<dyn Fn(&[Jet]) -> Vec<Vec<Jet>> + Send + Sync>;

/// Scalar field evaluable with jets anywhere in a chart.
#[derive(Clone)]
pub struct ScalarField {
    f: ScalarFn,
}

impl ScalarField {
    pub fn new(f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |x| x[0].scale(0.0).add_scalar(c))
    }

    pub fn eval(&self, coords: &[Jet]) -> Jet {
        (self.f)(coords)
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        let space = JetSpace::new(p, 0).expect("order 0");
        self.eval(&space.coordinates()).value()
    }
}

/// Vector field given by chart components.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    f: VectorFn,
}

impl VectorField {
    pub fn new(dim: usize, f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), dim }
    }

    pub fn constant(components: Vec<f64>) -> Self {
        let dim = components.len();
        Self::new(dim, move |x| {
            components
                .iter()
                .map(|&c| x[0].scale(0.0).add_scalar(c))
                .collect()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, coords: &[Jet]) -> Vec<Jet> {
        (self.f)(coords)
    }

    pub fn values(&self, p: &[f64]) -> Vec1 {
        let space = JetSpace::new(p, 0).expect("order 0");
        self.eval(&space.coordinates())
            .iter()
            .map(Jet::value)
            .collect()
    }
}

/// One-form field given by chart components.
pub type OneFormField = VectorField;

/// (1,1)-tensor field: matrix `T^i_j` per point (row = upper index).
#[derive(Clone)]
pub struct MatrixField {
    dim: usize,
    f: MatrixFn,
}

impl MatrixField {
    pub fn new(dim: usize, f: impl Fn(&[Jet]) -> Vec<Vec<Jet>> + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, coords: &[Jet]) -> Vec<Vec<Jet>> {
        (self.f)(coords)
    }

    pub fn values(&self, p: &[f64]) -> Mat {
        let space = JetSpace::new(p, 0).expect("order 0");
        self.eval(&space.coordinates())
            .iter()
            .map(|row| row.iter().map(Jet::value).collect())
            .collect()
    }
}

/// 2-form field: antisymmetric component matrix per point.
pub type TwoFormField = MatrixField;

/// Tangent vector at a chart point (coordinate components).
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub base: Vec1,
    pub components: Vec1,
}

impl TangentVector {
    pub fn new(base: Vec1, components: Vec1) -> Self {
        Self { base, components }
    }
}

/// A coordinate chart with an analytic metric field and a sampling box.
#[derive(Clone)]
pub struct MetricChart {
    dim: usize,
    metric: MatrixField,
    domain: Vec<[f64; 2]>,
}

impl MetricChart {
    pub fn new(dim: usize, domain: Vec<[f64; 2]>, metric: MatrixField) -> Self {
        assert_eq!(domain.len(), dim, "domain box must match chart dimension");
        Self { dim, metric, domain }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }

    pub fn metric(&self) -> &MatrixField {
        &self.metric
    }

    /// Metric values at a point.
    pub fn metric_values(&self, p: &[f64]) -> Mat {
        self.metric.values(p)
    }

    /// Checks symmetry (1e-12) and positive definiteness of the metric at `p`.
    pub fn validate_at(&self, p: &[f64]) -> Result<()> {
        let g = self.metric_values(p);
        let n = self.dim;
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((g[i][j] - g[j][i]).abs());
            }
        }
        if asym > 1e-12 {
            return Err(GeomError::NonSymmetricMetric { residual: asym });
        }
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| g[i][j]);
        let eig = m.symmetric_eigenvalues();
        let min = eig.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min <= 0.0 {
            return Err(GeomError::NotPositiveDefinite { eigenvalue: min });
        }
        Ok(())
    }
}

/// Jet-valued connection data of a metric at a point.
///
/// `g` carries jets of the requested order, `gamma` one order lower (a
/// derivative was consumed), so curvature (one more derivative) needs
/// `order >= 2`.
pub struct MetricData {
    pub dim: usize,
    pub point: Vec1,
    pub g: Vec<Vec<Jet>>,
    pub ginv: Vec<Vec<Jet>>,
    /// Christoffel symbols of the second kind, upper index first: `gamma[k][i][j]`.
    pub gamma: Vec<Vec<Vec<Jet>>>,
}

impl MetricData {
    pub fn at(chart: &MetricChart, p: &[f64], order: usize) -> Result<Self> {
        Self::from_field(chart.metric(), chart.dim(), p, order)
    }

    pub fn from_field(metric: &MatrixField, dim: usize, p: &[f64], order: usize) -> Result<Self> {
        let space = JetSpace::new(p, order)?;
        let coords = space.coordinates();
        let g = metric.eval(&coords);
        let ginv = linalg::invert_jets(&g)?;
        let gamma = christoffel_jets(&g, &ginv, dim)?;
        Ok(Self {
            dim,
            point: p.to_vec(),
            g,
            ginv,
            gamma,
        })
    }

    pub fn g0(&self) -> Mat {
        mat(self.dim, |i, j| self.g[i][j].value())
    }

    pub fn ginv0(&self) -> Mat {
        mat(self.dim, |i, j| self.ginv[i][j].value())
    }

    /// Christoffel values `gamma0[k][i][j]`.
    pub fn gamma0(&self) -> T3 {
        t3(self.dim, |k, i, j| self.gamma[k][i][j].value())
    }

    /// Christoffel first partials `dgamma0[k][i][j][l] = d_l Gamma^k_ij`.
    pub fn dgamma0(&self) -> T4 {
        t4(self.dim, |k, i, j, l| self.gamma[k][i][j].gradient(l))
    }

    /// Curvature components `riem[l][i][j][k]` with
    /// `R(d_i, d_j) d_k = riem[l][i][j][k] d_l`.
    pub fn riemann0(&self) -> T4 {
        let n = self.dim;
        let gam = self.gamma0();
        let dgam = self.dgamma0();
        t4(n, |l, i, j, k| {
            dgam[l][j][k][i] - dgam[l][i][k][j]
                + sum(n, |m| gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k])
        })
    }
}

/// Christoffel symbols as jets (one order below the metric jets):
/// `Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)`.
pub(crate) fn christoffel_jets(
    g: &[Vec<Jet>],
    ginv: &[Vec<Jet>],
    dim: usize,
) -> std::result::Result<Vec<Vec<Vec<Jet>>>, JetError> {
    let n = dim;
    let order = g[0][0].order();
    if order == 0 {
        // No derivative data: only callers needing metric values hit this.
        return Ok(Vec::new());
    }
    // dg[i][j][k] = d_k g_ij as order-1-lower jets
    let mut dg = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut col = Vec::with_capacity(n);
            for k in 0..n {
                col.push(g[i][j].partial(k)?);
            }
            row.push(col);
        }
        dg.push(row);
    }
    let ginv_t: Vec<Vec<Jet>> = ginv
        .iter()
        .map(|row| row.iter().map(|j| j.truncated(order - 1)).collect())
        .collect();
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n {
        let mut gi = Vec::with_capacity(n);
        for i in 0..n {
            let mut gj = Vec::with_capacity(n);
            for j in 0..n {
                let mut acc = dg[0][0][0].scale(0.0);
                for l in 0..n {
                    let term = &(&dg[j][l][i] + &dg[i][l][j]) - &dg[i][j][l];
                    acc = &acc + &(&ginv_t[k][l] * &term);
                }
                gj.push(acc.scale(0.5));
            }
            gi.push(gj);
        }
        gamma.push(gi);
    }
    Ok(gamma)
}

/// Christoffel symbol values at `p`, upper index first.
pub fn christoffel(chart: &MetricChart, p: &[f64]) -> Result<T3> {
    Ok(MetricData::at(chart, p, 2)?.gamma0())
}

/// Covariant derivative `(nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j`.
pub fn covariant_derivative(
    chart: &MetricChart,
    field: &VectorField,
    direction: &TangentVector,
    p: &[f64],
) -> Result<TangentVector> {
    let n = chart.dim();
    let data = MetricData::at(chart, p, 2)?;
    let gamma = data.gamma0();
    let space = JetSpace::new(p, 1)?;
    let y = field.eval(&space.coordinates());
    let x = &direction.components;
    let comps = vec1(n, |k| {
        sum(n, |i| x[i] * y[k].gradient(i))
            + tensor::sum2(n, |i, j| gamma[k][i][j] * x[i] * y[j].value())
    });
    Ok(TangentVector::new(p.to_vec(), comps))
}

/// `R(X,Y)Z` for constant-extension probes.
pub fn riemann(
    chart: &MetricChart,
    p: &[f64],
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<TangentVector> {
    let data = MetricData::at(chart, p, 2)?;
    let riem = data.riemann0();
    let n = chart.dim();
    let comps = vec1(n, |l| {
        tensor::sum3(n, |i, j, k| riem[l][i][j][k] * x[i] * y[j] * z[k])
    });
    Ok(TangentVector::new(p.to_vec(), comps))
}

/// `g(R(X,Y)Z, W)`.
pub fn curvature_4(
    chart: &MetricChart,
    p: &[f64],
    x: &[f64],
    y: &[f64],
    z: &[f64],
    w: &[f64],
) -> Result<f64> {
    let data = MetricData::at(chart, p, 2)?;
    let riem = data.riemann0();
    let g = data.g0();
    let n = chart.dim();
    let rz = vec1(n, |l| {
        tensor::sum3(n, |i, j, k| riem[l][i][j][k] * x[i] * y[j] * z[k])
    });
    Ok(tensor::sum2(n, |l, m| g[l][m] * rz[l] * w[m]))
}

/// Gradient: `ds` raised with the inverse metric.
pub fn gradient(chart: &MetricChart, s: &ScalarField, p: &[f64]) -> Result<TangentVector> {
    let n = chart.dim();
    let space = JetSpace::new(p, 1)?;
    let sj = s.eval(&space.coordinates());
    let data = MetricData::at(chart, p, 1)?;
    let ginv = data.ginv0();
    let comps = vec1(n, |i| sum(n, |j| ginv[i][j] * sj.gradient(j)));
    Ok(TangentVector::new(p.to_vec(), comps))
}

/// Unnormalized Palais sum for a 1-form:
/// `d eta (X,Y) = X(eta(Y)) - Y(eta(X)) - eta([X,Y])`.
///
/// No 1/2 factor is applied; callers that need the "half" convention scale it
/// themselves.
pub fn exterior_derivative_1form(
    eta: &OneFormField,
    p: &[f64],
    x: &VectorField,
    y: &VectorField,
) -> Result<f64> {
    let n = eta.dim();
    let space = JetSpace::new(p, 1)?;
    let coords = space.coordinates();
    let ej = eta.eval(&coords);
    let xj = x.eval(&coords);
    let yj = y.eval(&coords);

    // eta(Y), eta(X) as scalar jets
    let eta_y = dot_jets(&ej, &yj);
    let eta_x = dot_jets(&ej, &xj);
    let x0: Vec1 = xj.iter().map(Jet::value).collect();
    let y0: Vec1 = yj.iter().map(Jet::value).collect();
    let bracket = bracket_values(&xj, &yj);
    let eta0: Vec1 = ej.iter().map(Jet::value).collect();

    let xe = sum(n, |i| x0[i] * eta_y.gradient(i));
    let ye = sum(n, |i| y0[i] * eta_x.gradient(i));
    let eb = sum(n, |i| eta0[i] * bracket[i]);
    Ok(xe - ye - eb)
}

/// Unnormalized Palais sum for a 2-form:
/// `d Phi (X,Y,Z) = X(Phi(Y,Z)) + Y(Phi(Z,X)) + Z(Phi(X,Y))
///                  - Phi([X,Y],Z) - Phi([Y,Z],X) - Phi([Z,X],Y)`.
pub fn exterior_derivative_2form(
    phi: &TwoFormField,
    p: &[f64],
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
) -> Result<f64> {
    let n = phi.dim();
    let space = JetSpace::new(p, 1)?;
    let coords = space.coordinates();
    let pj = phi.eval(&coords);
    let xj = x.eval(&coords);
    let yj = y.eval(&coords);
    let zj = z.eval(&coords);

    let pair = |a: &[Jet], b: &[Jet]| -> Jet {
        let mut acc = coords[0].scale(0.0);
        for i in 0..n {
            for j in 0..n {
                acc = &acc + &(&(&pj[i][j] * &a[i]) * &b[j]);
            }
        }
        acc
    };
    let x0: Vec1 = xj.iter().map(Jet::value).collect();
    let y0: Vec1 = yj.iter().map(Jet::value).collect();
    let z0: Vec1 = zj.iter().map(Jet::value).collect();
    let phi0 = mat(n, |i, j| pj[i][j].value());

    let d_along = |v0: &Vec1, f: &Jet| sum(n, |i| v0[i] * f.gradient(i));
    let phi_pair = |a: &Vec1, b: &Vec1| tensor::sum2(n, |i, j| phi0[i][j] * a[i] * b[j]);

    let term1 = d_along(&x0, &pair(&yj, &zj)) + d_along(&y0, &pair(&zj, &xj))
        + d_along(&z0, &pair(&xj, &yj));
    let bxy = bracket_values(&xj, &yj);
    let byz = bracket_values(&yj, &zj);
    let bzx = bracket_values(&zj, &xj);
    let term2 = phi_pair(&bxy, &z0) + phi_pair(&byz, &x0) + phi_pair(&bzx, &y0);
    Ok(term1 - term2)
}

/// Lie bracket values `[X,Y]^k = X^i d_i Y^k - Y^i d_i X^k` at the base point.
pub fn bracket_values(xj: &[Jet], yj: &[Jet]) -> Vec1 {
    let n = xj.len();
    vec1(n, |k| {
        sum(n, |i| xj[i].value() * yj[k].gradient(i) - yj[i].value() * xj[k].gradient(i))
    })
}

fn dot_jets(a: &[Jet], b: &[Jet]) -> Jet {
    let mut acc = a[0].scale(0.0);
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart_from(entries: [[f64; 2]; 2]) -> MetricChart {
        let metric = MatrixField::new(2, move |c| {
            let zero = c[0].scale(0.0);
            entries
                .iter()
                .map(|row| row.iter().map(|&v| zero.add_scalar(v)).collect())
                .collect()
        });
        MetricChart::new(2, vec![[-1.0, 1.0]; 2], metric)
    }

    #[test]
    fn validate_rejects_asymmetric_metric() {
        let chart = chart_from([[1.0, 0.3], [0.2, 1.0]]);
        assert!(matches!(
            chart.validate_at(&[0.0, 0.0]),
            Err(GeomError::NonSymmetricMetric { .. })
        ));
    }

    #[test]
    fn validate_rejects_indefinite_metric() {
        let chart = chart_from([[1.0, 0.0], [0.0, -2.0]]);
        assert!(matches!(
            chart.validate_at(&[0.0, 0.0]),
            Err(GeomError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn singular_metric_is_reported() {
        let chart = chart_from([[1.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(
            christoffel(&chart, &[0.0, 0.0]),
            Err(GeomError::SingularMetric(_))
        ));
    }

    #[test]
    fn constant_field_flat_metric_has_zero_derivative() {
        let chart = chart_from([[1.0, 0.0], [0.0, 1.0]]);
        let field = VectorField::constant(vec![0.7, -0.2]);
        let x = TangentVector::new(vec![0.1, 0.3], vec![1.0, 2.0]);
        let d = covariant_derivative(&chart, &field, &x, &[0.1, 0.3]).unwrap();
        assert!(d.components.iter().all(|v| v.abs() < 1e-15));
    }
}

/// Ambient jets of connection and structure data, for pushing through an
/// immersion via [`compose_through`].
pub struct AmbientJets {
    pub dim: usize,
    /// Christoffel jets (ambient variables), order 1.
    pub gamma: Vec<Vec<Vec<Jet>>>,
}

impl AmbientJets {
    pub fn at(metric: &MatrixField, dim: usize, q: &[f64]) -> Result<Self> {
        let data = MetricData::from_field(metric, dim, q, 2)?;
        Ok(Self {
            dim,
            gamma: data.gamma,
        })
    }

    /// Pushes the Christoffel jets through source jets of a chart map.
    pub fn gamma_through(&self, map: &[Jet]) -> Vec<Vec<Vec<Jet>>> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| compose_through(&self.gamma[k][i][j], map))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}
