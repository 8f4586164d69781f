//! Almost contact metric structures and their tensorial diagnostics:
//! structure identities, fundamental 2-form, Sasakian defect, and the
//! Nijenhuis normality defect.

use crate::jets::{Jet, JetSpace};
use crate::manifold::{
    bracket_values, exterior_derivative_1form, MatrixField, MetricChart, MetricData, OneFormField,
    Result, TangentVector, VectorField,
};
use crate::tensor::{self, mat, matvec, sum, vec1, Mat, Vec1};

/// Coefficient on the unnormalized Palais `d eta` in the normality defect.
///
/// The normality condition is stated as `[phi,phi] + 2 d_eta (x) xi = 0` under
/// the half-normalized exterior derivative; on the unnormalized Palais sum the
/// factor 2 becomes 1. The sign is frozen by the catalog Sasakian oracle (see
/// `normality_sign_frozen_by_catalog` in the tests).
pub const NORMALITY_DETA_COEFF: f64 = 1.0;

/// The quadruple (phi, xi, eta, g) as fields over a chart.
#[derive(Clone)]
pub struct AlmostContactStructure {
    chart: MetricChart,
    phi: MatrixField,
    xi: VectorField,
    eta: OneFormField,
}

/// Residuals of the structure identities at a point, each the max-norm of the
/// defect contracted against the coordinate probe basis.
#[derive(Clone, Debug)]
pub struct AlmostContactResiduals {
    /// `phi^2 + Id - xi (x) eta` (as a matrix).
    pub phi_square: f64,
    /// `|eta(xi) - 1|` together with the components of `phi xi`.
    pub eta_xi: f64,
    /// `g(phi X, phi Y) - g(X,Y) + eta(X) eta(Y)` over basis pairs.
    pub compatibility: f64,
    /// `eta(phi X)` over basis vectors.
    pub eta_phi: f64,
}

impl AlmostContactResiduals {
    pub fn max(&self) -> f64 {
        self.phi_square
            .max(self.eta_xi)
            .max(self.compatibility)
            .max(self.eta_phi)
    }
}

impl AlmostContactStructure {
    pub fn new(
        chart: MetricChart,
        phi: MatrixField,
        xi: VectorField,
        eta: OneFormField,
    ) -> Self {
        Self { chart, phi, xi, eta }
    }

    pub fn chart(&self) -> &MetricChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn phi(&self) -> &MatrixField {
        &self.phi
    }

    pub fn xi(&self) -> &VectorField {
        &self.xi
    }

    pub fn eta(&self) -> &OneFormField {
        &self.eta
    }

    /// Pointwise structure tensors (values only).
    pub fn values_at(&self, p: &[f64]) -> StructureValues {
        let space = JetSpace::new(p, 0).expect("order 0");
        let coords = space.coordinates();
        let n = self.dim();
        let phi_j = self.phi.eval(&coords);
        StructureValues {
            g: self.chart.metric_values(p),
            phi: mat(n, |i, j| phi_j[i][j].value()),
            xi: self.xi.eval(&coords).iter().map(Jet::value).collect(),
            eta: self.eta.eval(&coords).iter().map(Jet::value).collect(),
        }
    }

    /// Residual record for the structure identities at `p`.
    pub fn verify_almost_contact(&self, p: &[f64]) -> AlmostContactResiduals {
        let n = self.dim();
        let v = self.values_at(p);
        let phi2 = mat(n, |i, j| sum(n, |m| v.phi[i][m] * v.phi[m][j]));

        let mut phi_square = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                let defect = phi2[i][j] + id - v.xi[i] * v.eta[j];
                phi_square = phi_square.max(defect.abs());
            }
        }

        let eta_xi_val: f64 = sum(n, |i| v.eta[i] * v.xi[i]);
        let phi_xi = matvec(&v.phi, &v.xi);
        let eta_xi = (eta_xi_val - 1.0).abs().max(tensor::max_abs(&phi_xi));

        let mut compatibility = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let phi_i = vec1(n, |k| v.phi[k][i]);
                let phi_j2 = vec1(n, |k| v.phi[k][j]);
                let lhs = tensor::inner(&v.g, &phi_i, &phi_j2);
                let rhs = v.g[i][j] - v.eta[i] * v.eta[j];
                compatibility = compatibility.max((lhs - rhs).abs());
            }
        }

        let eta_phi = (0..n)
            .map(|j| sum(n, |i| v.eta[i] * v.phi[i][j]).abs())
            .fold(0.0f64, f64::max);

        AlmostContactResiduals {
            phi_square,
            eta_xi,
            compatibility,
            eta_phi,
        }
    }

    /// Fundamental 2-form `Phi(X,Y) = g(X, phi Y)`.
    pub fn fundamental_two_form(&self, p: &[f64], x: &[f64], y: &[f64]) -> f64 {
        let v = self.values_at(p);
        tensor::inner(&v.g, x, &matvec(&v.phi, y))
    }

    /// The fundamental 2-form as a component field `Phi_ij = g_ik phi^k_j`.
    pub fn fundamental_two_form_field(&self) -> MatrixField {
        let metric = self.chart.metric().clone();
        let phi = self.phi.clone();
        let n = self.dim();
        MatrixField::new(n, move |coords| {
            let g = metric.eval(coords);
            let ph = phi.eval(coords);
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut acc = coords[0].scale(0.0);
                            for k in 0..n {
                                acc = &acc + &(&g[i][k] * &ph[k][j]);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Covariant derivative `(nabla_X phi) Y` for coordinate-constant probes,
    /// with the structure's own Levi-Civita connection.
    pub fn nabla_phi(&self, p: &[f64], x: &[f64], y: &[f64]) -> Result<Vec1> {
        let n = self.dim();
        let data = MetricData::at(&self.chart, p, 2)?;
        let gamma = data.gamma0();
        let space = JetSpace::new(p, 1)?;
        let phi_j = self.phi.eval(&space.coordinates());
        let phi0 = mat(n, |i, j| phi_j[i][j].value());
        Ok(vec1(n, |k| {
            tensor::sum2(n, |i, j| {
                x[i] * y[j]
                    * (phi_j[k][j].gradient(i)
                        + sum(n, |m| gamma[k][i][m] * phi0[m][j] - gamma[m][i][j] * phi0[k][m]))
            })
        }))
    }

    /// Sasakian defect `(nabla_X phi)Y - g(X,Y) xi + eta(Y) X`; zero at `p`
    /// exactly when the structure is Sasakian there for these probes.
    pub fn sasakian_defect(&self, p: &[f64], x: &[f64], y: &[f64]) -> Result<TangentVector> {
        let n = self.dim();
        let v = self.values_at(p);
        let napy = self.nabla_phi(p, x, y)?;
        let gxy = tensor::inner(&v.g, x, y);
        let eta_y: f64 = sum(n, |i| v.eta[i] * y[i]);
        let comps = vec1(n, |k| napy[k] - gxy * v.xi[k] + eta_y * x[k]);
        Ok(TangentVector::new(p.to_vec(), comps))
    }

    /// Normality defect `[phi,phi](X,Y) + c * d_eta(X,Y) xi` for jet-liftable
    /// probe fields, with `c` = [`NORMALITY_DETA_COEFF`] on the unnormalized
    /// Palais derivative.
    pub fn nijenhuis_normality_defect(
        &self,
        p: &[f64],
        x: &VectorField,
        y: &VectorField,
    ) -> Result<Vec1> {
        let n = self.dim();
        let space = JetSpace::new(p, 1)?;
        let coords = space.coordinates();
        let phi_j = self.phi.eval(&coords);
        let xj = x.eval(&coords);
        let yj = y.eval(&coords);
        let phi0 = mat(n, |i, j| phi_j[i][j].value());

        let apply = |v: &[Jet]| -> Vec<Jet> {
            (0..n)
                .map(|i| {
                    let mut acc = coords[0].scale(0.0);
                    for j in 0..n {
                        acc = &acc + &(&phi_j[i][j] * &v[j]);
                    }
                    acc
                })
                .collect()
        };
        let phix = apply(&xj);
        let phiy = apply(&yj);

        let br_xy = bracket_values(&xj, &yj);
        let br_phix_phiy = bracket_values(&phix, &phiy);
        let br_phix_y = bracket_values(&phix, &yj);
        let br_x_phiy = bracket_values(&xj, &phiy);

        let phi2_br = matvec(&phi0, &matvec(&phi0, &br_xy));
        let phi_br1 = matvec(&phi0, &br_phix_y);
        let phi_br2 = matvec(&phi0, &br_x_phiy);

        let deta = exterior_derivative_1form(&self.eta, p, x, y)?;
        let xi0 = self.xi.values(p);

        Ok(vec1(n, |k| {
            phi2_br[k] + br_phix_phiy[k] - phi_br1[k] - phi_br2[k]
                + NORMALITY_DETA_COEFF * deta * xi0[k]
        }))
    }
}

/// Pointwise values of the structure tensors.
pub struct StructureValues {
    pub g: Mat,
    pub phi: Mat,
    pub xi: Vec1,
    pub eta: Vec1,
}
