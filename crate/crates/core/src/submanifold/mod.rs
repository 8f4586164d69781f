//! Isometric immersions: adapted frames, induced metric and connection,
//! second fundamental form, shape operators, normal connection and curvature,
//! and (in [`structure`]) the tangential/normal splitting of the ambient
//! contact structure along the immersion.
//!
//! The metric-level pipeline here works for any ambient metric field; the
//! contact-structure layer sits on top and is what the identity checks use.

pub mod structure;

use std::sync::Arc;

use crate::jets::{Jet, JetSpace};
use crate::linalg;
use crate::manifold::{christoffel_jets, GeomError, MatrixField, Result};
use crate::tensor::{self, mat, sum, t3, vec1, Mat, Vec1, T3};

pub use structure::{classify, ClassificationReport, CrDistributions, SubmanifoldStructure};

type MapFn = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;

/// Jet-liftable immersion of an `m`-dimensional source chart into an ambient
/// chart.
#[derive(Clone)]
pub struct Immersion {
    source_dim: usize,
    ambient_dim: usize,
    domain: Vec<[f64; 2]>,
    map: MapFn,
}

impl Immersion {
    pub fn new(
        source_dim: usize,
        ambient_dim: usize,
        domain: Vec<[f64; 2]>,
        map: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(domain.len(), source_dim);
        Self {
            source_dim,
            ambient_dim,
            domain,
            map: Arc::new(map),
        }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }

    pub fn eval(&self, coords: &[Jet]) -> Vec<Jet> {
        (self.map)(coords)
    }

    /// Ambient point of a source point.
    pub fn point(&self, p_src: &[f64]) -> Vec1 {
        let space = JetSpace::new(p_src, 0).expect("order 0");
        self.eval(&space.coordinates())
            .iter()
            .map(Jet::value)
            .collect()
    }

    /// Center of the source domain box (used for the deterministic normal
    /// frame candidate selection).
    pub fn domain_center(&self) -> Vec1 {
        self.domain.iter().map(|&[lo, hi]| 0.5 * (lo + hi)).collect()
    }
}

/// Smallest singular value of the differential allowed before the immersion
/// is declared rank-deficient.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Residual below which the Gram-Schmidt normal frame construction aborts.
pub const FRAME_BREAKDOWN_TOLERANCE: f64 = 1e-10;

/// Metric-level data of an immersion at one source point: frames, induced
/// metric and connection, second fundamental form, shape operators, normal
/// connection coefficients and normal curvature.
///
/// All stored quantities are source jets; the derivative orders are exactly
/// what the downstream covariant derivatives consume (immersion jets at order
/// 3, frames at order 2, `h`/`A`/`s` at order 1).
pub struct SubmanifoldData {
    pub m: usize,
    pub n_amb: usize,
    pub codim: usize,
    pub p_src: Vec1,
    pub q: Vec1,
    /// Source jets (order 3) of the immersion components.
    pub iota: Vec<Jet>,
    /// Tangent frame `E_i = d iota(d_i)`: `e[i][k]`, order 2.
    pub e: Vec<Vec<Jet>>,
    /// Orthonormal normal frame `nor[a][k]`, order 2.
    pub nor: Vec<Vec<Jet>>,
    /// Ambient metric composed through the immersion, order 2.
    pub g_amb: Vec<Vec<Jet>>,
    /// Ambient Christoffels composed through the immersion, order 1.
    pub gamma_amb: Vec<Vec<Vec<Jet>>>,
    /// Induced metric, order 2.
    pub g_ind: Vec<Vec<Jet>>,
    pub ginv_ind: Vec<Vec<Jet>>,
    /// Induced Christoffels, order 1.
    pub gamma_ind: Vec<Vec<Vec<Jet>>>,
    /// Second fundamental form `h[i][j][k]` (ambient components), order 1.
    pub h: Vec<Vec<Vec<Jet>>>,
    /// Shape operators `a_ops[a][i][j] = (A_a)^i_j`, order 1.
    pub a_ops: Vec<Vec<Vec<Jet>>>,
    /// Normal connection coefficients `s_coef[i][b][a] = g(nabla^perp_{d_i} N_a, N_b)`,
    /// order 1 (antisymmetric in `(a,b)`).
    pub s_coef: Vec<Vec<Vec<Jet>>>,
}

impl SubmanifoldData {
    /// Builds the data at `p_src` for the given ambient metric field.
    ///
    /// `normal_rotation`, when present, is an orthogonal matrix applied to the
    /// Gram-Schmidt normal frame (used by frame-covariance checks).
    pub fn at(
        imm: &Immersion,
        ambient_metric: &MatrixField,
        p_src: &[f64],
        normal_rotation: Option<&Mat>,
    ) -> Result<Self> {
        let m = imm.source_dim();
        let n = imm.ambient_dim();
        let codim = n - m;

        let space = JetSpace::new(p_src, 3)?;
        let coords = space.coordinates();
        let iota = imm.eval(&coords);
        let q: Vec1 = iota.iter().map(Jet::value).collect();

        // Tangent frame E_i^k = d_i iota^k (order 2).
        let e: Vec<Vec<Jet>> = (0..m)
            .map(|i| (0..n).map(|k| iota[k].partial(i).expect("order 3")).collect())
            .collect::<Vec<_>>();

        // Rank check on the differential.
        let jac = nalgebra::DMatrix::from_fn(n, m, |k, i| e[i][k].value());
        let svals = jac.singular_values();
        let sigma_min = svals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if sigma_min <= RANK_TOLERANCE {
            return Err(GeomError::RankDeficient { sigma: sigma_min });
        }

        // Ambient metric along the immersion (order 2) and composed
        // Christoffels (order 1).
        let iota2: Vec<Jet> = iota.iter().map(|j| j.truncated(2)).collect();
        let g_amb = ambient_metric.eval(&iota2);
        let amb_gamma = crate::manifold::AmbientJets::at(ambient_metric, n, &q)?;
        let gamma_amb = amb_gamma.gamma_through(&iota);

        // Induced metric and connection.
        let g_ind: Vec<Vec<Jet>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| inner_jets(&g_amb, &e[i], &e[j]))
                    .collect()
            })
            .collect();
        let ginv_ind = linalg::invert_jets(&g_ind)?;
        let gamma_ind = christoffel_jets(&g_ind, &ginv_ind, m).map_err(GeomError::Jet)?;

        // Normal frame: deterministic candidate selection at the domain
        // center, then modified Gram-Schmidt in jet arithmetic.
        let candidates = select_normal_candidates(imm, ambient_metric, codim)?;
        let mut nor: Vec<Vec<Jet>> = Vec::with_capacity(codim);
        let g_amb1: Vec<Vec<Jet>> = g_amb
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(2)).collect())
            .collect();
        let e2: Vec<Vec<Jet>> = e.clone();
        let zero = coords[0].scale(0.0).truncated(2);
        for &c in &candidates {
            let mut v: Vec<Jet> = (0..n)
                .map(|k| zero.add_scalar(if k == c { 1.0 } else { 0.0 }))
                .collect();
            // remove tangential part: v -= ginv^{ij} g(v, E_j) E_i
            let gve: Vec<Jet> = (0..m).map(|j| inner_jets(&g_amb1, &v, &e2[j])).collect();
            for i in 0..m {
                let mut coef = zero.clone();
                for j in 0..m {
                    coef = &coef + &(&ginv_ind[i][j] * &gve[j]);
                }
                for k in 0..n {
                    v[k] = &v[k] - &(&coef * &e2[i][k]);
                }
            }
            // remove previously built normals
            for b in nor.iter() {
                let coef = inner_jets(&g_amb1, &v, b);
                for k in 0..n {
                    v[k] = &v[k] - &(&coef * &b[k]);
                }
            }
            let norm_sq = inner_jets(&g_amb1, &v, &v);
            if norm_sq.value() < FRAME_BREAKDOWN_TOLERANCE {
                return Err(GeomError::FrameBreakdown {
                    residual: norm_sq.value(),
                });
            }
            let inv_norm = norm_sq.sqrt().try_recip().map_err(GeomError::Jet)?;
            nor.push(v.iter().map(|vk| vk * &inv_norm).collect());
        }
        if let Some(rot) = normal_rotation {
            let old = nor.clone();
            for a in 0..codim {
                for k in 0..n {
                    let mut acc = zero.clone();
                    for (b, ob) in old.iter().enumerate() {
                        acc = &acc + &ob[k].scale(rot[a][b]);
                    }
                    nor[a][k] = acc;
                }
            }
        }

        // Ambient derivative of the tangent frame:
        // D_ij^k = d_i E_j^k + Gamma^k_cd E_i^c E_j^d  (order 1).
        let e1: Vec<Vec<Jet>> = e
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();
        let g_amb_t1: Vec<Vec<Jet>> = g_amb
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();
        let ginv_ind1: Vec<Vec<Jet>> = ginv_ind
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();
        let mut d_frame: Vec<Vec<Vec<Jet>>> = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                let mut comp = Vec::with_capacity(n);
                for k in 0..n {
                    let mut acc = e[j][k].partial(i).expect("order 2");
                    for c in 0..n {
                        for d in 0..n {
                            acc = &acc + &(&(&gamma_amb[k][c][d] * &e1[i][c]) * &e1[j][d]);
                        }
                    }
                    comp.push(acc);
                }
                row.push(comp);
            }
            d_frame.push(row);
        }

        // h = normal part of D: subtract the tangential projection.
        let mut h: Vec<Vec<Vec<Jet>>> = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                let gde: Vec<Jet> = (0..m)
                    .map(|l| inner_jets(&g_amb_t1, &d_frame[i][j], &e1[l]))
                    .collect();
                let mut comp: Vec<Jet> = d_frame[i][j].clone();
                for a in 0..m {
                    let mut coef = gde[0].scale(0.0);
                    for l in 0..m {
                        coef = &coef + &(&ginv_ind1[a][l] * &gde[l]);
                    }
                    for k in 0..n {
                        comp[k] = &comp[k] - &(&coef * &e1[a][k]);
                    }
                }
                row.push(comp);
            }
            h.push(row);
        }

        // Shape operators: (A_a)^i_j = ginv^{ik} g(h(d_k, d_j), N_a).
        let nor1: Vec<Vec<Jet>> = nor
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();
        let mut a_ops: Vec<Vec<Vec<Jet>>> = Vec::with_capacity(codim);
        for na in nor1.iter() {
            let h_coef: Vec<Vec<Jet>> = (0..m)
                .map(|k| {
                    (0..m)
                        .map(|j| inner_jets(&g_amb_t1, &h[k][j], na))
                        .collect()
                })
                .collect();
            let mut op = Vec::with_capacity(m);
            for i in 0..m {
                let mut row = Vec::with_capacity(m);
                for j in 0..m {
                    let mut acc = h_coef[0][0].scale(0.0);
                    for k in 0..m {
                        acc = &acc + &(&ginv_ind1[i][k] * &h_coef[k][j]);
                    }
                    row.push(acc);
                }
                op.push(row);
            }
            a_ops.push(op);
        }

        // Normal connection coefficients:
        // s_coef[i][b][a] = g(nabla_{d_i} N_a, N_b)  (tangential parts drop).
        let mut s_coef: Vec<Vec<Vec<Jet>>> = Vec::with_capacity(m);
        for i in 0..m {
            // nabla_{d_i} N_a ambient components (order 1)
            let mut dn: Vec<Vec<Jet>> = Vec::with_capacity(codim);
            for na in nor.iter() {
                let mut comp = Vec::with_capacity(n);
                for k in 0..n {
                    let mut acc = na[k].partial(i).expect("order 2");
                    for c in 0..n {
                        for d in 0..n {
                            acc = &acc + &(&(&gamma_amb[k][c][d] * &e1[i][c]) * &na[d].truncated(1));
                        }
                    }
                    comp.push(acc);
                }
                dn.push(comp);
            }
            let mut sb = Vec::with_capacity(codim);
            for b in 0..codim {
                let mut sa = Vec::with_capacity(codim);
                for a in 0..codim {
                    sa.push(inner_jets(&g_amb_t1, &dn[a], &nor1[b]));
                }
                sb.push(sa);
            }
            s_coef.push(sb);
        }

        Ok(Self {
            m,
            n_amb: n,
            codim,
            p_src: p_src.to_vec(),
            q,
            iota,
            e,
            nor,
            g_amb,
            gamma_amb,
            g_ind,
            ginv_ind,
            gamma_ind,
            h,
            a_ops,
            s_coef,
        })
    }

    /// Pushforward of a source vector: ambient components of `d iota(x)`.
    pub fn push(&self, x: &[f64]) -> Vec1 {
        vec1(self.n_amb, |k| sum(self.m, |i| x[i] * self.e[i][k].value()))
    }

    /// Induced metric values.
    pub fn g_src(&self, x: &[f64], y: &[f64]) -> f64 {
        let g = mat(self.m, |i, j| self.g_ind[i][j].value());
        tensor::inner(&g, x, y)
    }

    /// Ambient metric values at the image point.
    pub fn g_amb_vals(&self) -> Mat {
        mat(self.n_amb, |k, l| self.g_amb[k][l].value())
    }

    /// Ambient inner product of ambient vectors at the image point.
    pub fn amb_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        tensor::inner(&self.g_amb_vals(), u, v)
    }

    /// `h(X,Y)` ambient components for source probes (values).
    pub fn h_of(&self, x: &[f64], y: &[f64]) -> Vec1 {
        vec1(self.n_amb, |k| {
            tensor::sum2(self.m, |i, j| x[i] * y[j] * self.h[i][j][k].value())
        })
    }

    /// `h(X,Y)` in normal-frame coefficients (values).
    pub fn h_coeffs(&self, x: &[f64], y: &[f64]) -> Vec1 {
        let hv = self.h_of(x, y);
        vec1(self.codim, |a| {
            self.amb_inner(&hv, &vec1(self.n_amb, |k| self.nor[a][k].value()))
        })
    }

    /// Shape operator values applied to a source probe: `A_a X`.
    pub fn shape_apply(&self, a: usize, x: &[f64]) -> Vec1 {
        vec1(self.m, |i| {
            sum(self.m, |j| self.a_ops[a][i][j].value() * x[j])
        })
    }

    /// `S_{ba}(d_i)` values.
    pub fn s_vals(&self) -> T3 {
        let mut out = vec![vec![vec![0.0; self.codim]; self.codim]; self.m];
        for i in 0..self.m {
            for b in 0..self.codim {
                for a in 0..self.codim {
                    out[i][b][a] = self.s_coef[i][b][a].value();
                }
            }
        }
        out
    }

    /// Normal curvature matrix `rperp[i][j][b][a]` with
    /// `R_perp(d_i, d_j) N_a = sum_b rperp[i][j][b][a] N_b`.
    pub fn normal_curvature(&self) -> Vec<Vec<Mat>> {
        let m = self.m;
        let p = self.codim;
        let mut out = vec![vec![vec![vec![0.0; p]; p]; m]; m];
        for i in 0..m {
            for j in 0..m {
                for b in 0..p {
                    for a in 0..p {
                        let ds = self.s_coef[j][b][a].gradient(i)
                            - self.s_coef[i][b][a].gradient(j);
                        let comm = sum(p, |c| {
                            self.s_coef[i][b][c].value() * self.s_coef[j][c][a].value()
                                - self.s_coef[j][b][c].value() * self.s_coef[i][c][a].value()
                        });
                        out[i][j][b][a] = ds + comm;
                    }
                }
            }
        }
        out
    }

    /// `R_perp(X,Y) nu` in frame coefficients for source probes and a normal
    /// vector given in frame coefficients.
    pub fn normal_curvature_apply(&self, x: &[f64], y: &[f64], nu: &[f64]) -> Vec1 {
        let rp = self.normal_curvature();
        vec1(self.codim, |b| {
            tensor::sum2(self.m, |i, j| {
                x[i] * y[j] * sum(self.codim, |a| rp[i][j][b][a] * nu[a])
            })
        })
    }

    /// Mean curvature vector `H = (1/m) ginv^{ij} h_ij` (ambient components).
    pub fn mean_curvature(&self) -> Vec1 {
        let m = self.m;
        vec1(self.n_amb, |k| {
            tensor::sum2(m, |i, j| self.ginv_ind[i][j].value() * self.h[i][j][k].value())
                / m as f64
        })
    }

    /// Induced curvature `R'(X,Y)Z` source components (values).
    pub fn induced_curvature_op(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec1 {
        let m = self.m;
        let gam = t3(m, |k, i, j| self.gamma_ind[k][i][j].value());
        let dgam = |l: usize, j: usize, k: usize, i: usize| self.gamma_ind[l][j][k].gradient(i);
        vec1(m, |l| {
            tensor::sum3(m, |i, j, k| {
                x[i] * y[j]
                    * z[k]
                    * (dgam(l, j, k, i) - dgam(l, i, k, j)
                        + sum(m, |mm| {
                            gam[l][i][mm] * gam[mm][j][k] - gam[l][j][mm] * gam[mm][i][k]
                        }))
            })
        })
    }

    /// `R'(X,Y,Z,W)` with the induced metric.
    pub fn induced_curvature4(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let r = self.induced_curvature_op(x, y, z);
        self.g_src(&r, w)
    }

    /// `(nabla'_X A_a) Y` source components for constant source probes.
    pub fn nabla_shape(&self, a: usize, x: &[f64], y: &[f64]) -> Vec1 {
        let m = self.m;
        let gam = |k: usize, c: usize, b: usize| self.gamma_ind[k][c][b].value();
        let op = &self.a_ops[a];
        vec1(m, |i| {
            tensor::sum2(m, |c, j| {
                x[c] * y[j]
                    * (op[i][j].gradient(c)
                        + sum(m, |b| {
                            gam(i, c, b) * op[b][j].value() - gam(b, c, j) * op[i][b].value()
                        }))
            })
        })
    }

    /// Tangential projection of an ambient vector, in source components.
    pub fn pullback_tangential(&self, u: &[f64]) -> Vec1 {
        let m = self.m;
        let gue: Vec1 = vec1(m, |j| {
            self.amb_inner(u, &vec1(self.n_amb, |k| self.e[j][k].value()))
        });
        vec1(m, |i| sum(m, |j| self.ginv_ind[i][j].value() * gue[j]))
    }

    /// Normal-frame coefficients of an ambient vector's normal part.
    pub fn normal_coeffs(&self, u: &[f64]) -> Vec1 {
        vec1(self.codim, |a| {
            self.amb_inner(u, &vec1(self.n_amb, |k| self.nor[a][k].value()))
        })
    }

    /// Ambient vector from normal-frame coefficients.
    pub fn normal_from_coeffs(&self, nu: &[f64]) -> Vec1 {
        vec1(self.n_amb, |k| {
            sum(self.codim, |a| nu[a] * self.nor[a][k].value())
        })
    }
}

/// The induced metric of an immersion as a jet-liftable field over the source
/// chart.
///
/// The induced metric consumes one derivative of the immersion, so the field
/// evaluates its own source-chart jets one order above the request and pushes
/// the result through the incoming jets (which may live over a different
/// variable space, e.g. a leaf chart). Supports input orders <= 2.
pub fn induced_metric_field(
    imm: &Immersion,
    ambient_metric: &MatrixField,
) -> crate::manifold::MatrixField {
    let imm = imm.clone();
    let ambient = ambient_metric.clone();
    let m = imm.source_dim();
    let n = imm.ambient_dim();
    crate::manifold::MatrixField::new(m, move |coords| {
        let order = coords[0].order();
        let q: Vec<f64> = coords.iter().map(Jet::value).collect();
        let space = JetSpace::new(&q, (order + 1).min(crate::jets::MAX_ORDER))
            .expect("valid order");
        let own = space.coordinates();
        let iota = imm.eval(&own);
        let e: Vec<Vec<Jet>> = (0..m)
            .map(|i| (0..n).map(|k| iota[k].partial(i).expect("order >= 1")).collect())
            .collect();
        let iota_t: Vec<Jet> = iota.iter().map(|j| j.truncated(order)).collect();
        let g = ambient.eval(&iota_t);
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let entry = inner_jets(&g, &e[i], &e[j]);
                        crate::jets::compose_through(&entry.truncated(order), coords)
                    })
                    .collect()
            })
            .collect()
    })
}

/// Deterministic normal-frame candidate selection: ambient coordinate basis
/// vectors ranked by the norm of their normal residual at the source domain
/// center, ties broken by index.
fn select_normal_candidates(
    imm: &Immersion,
    ambient_metric: &MatrixField,
    codim: usize,
) -> Result<Vec<usize>> {
    let m = imm.source_dim();
    let n = imm.ambient_dim();
    if codim == 0 {
        return Ok(Vec::new());
    }
    let center = imm.domain_center();
    let space = JetSpace::new(&center, 1)?;
    let iota = imm.eval(&space.coordinates());
    let q: Vec1 = iota.iter().map(Jet::value).collect();
    let frame: Vec<Vec1> = (0..m)
        .map(|i| vec1(n, |k| iota[k].gradient(i)))
        .collect();
    let g = ambient_metric.values(&q);
    let gram = mat(m, |i, j| tensor::inner(&g, &frame[i], &frame[j]));
    let gram_inv = linalg::invert(&gram)?;

    let mut scored: Vec<(usize, f64)> = (0..n)
        .map(|c| {
            let ec = vec1(n, |k| if k == c { 1.0 } else { 0.0 });
            let ge: Vec1 = vec1(m, |j| tensor::inner(&g, &ec, &frame[j]));
            let mut v = ec.clone();
            for i in 0..m {
                let coef = sum(m, |j| gram_inv[i][j] * ge[j]);
                tensor::axpy(&mut v, -coef, &frame[i]);
            }
            (c, tensor::inner(&g, &v, &v))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut picks: Vec<usize> = scored.iter().take(codim).map(|&(c, _)| c).collect();
    picks.sort_unstable();
    Ok(picks)
}

/// `g`-inner product of two jet vectors with a jet metric (truncates all
/// factors to the lowest order present).
pub(crate) fn inner_jets(g: &[Vec<Jet>], u: &[Jet], v: &[Jet]) -> Jet {
    let n = u.len();
    let target = g[0][0]
        .order()
        .min(u[0].order())
        .min(v[0].order());
    let mut acc = u[0].truncated(target).scale(0.0);
    for k in 0..n {
        let uk = u[k].truncated(target);
        for l in 0..n {
            acc = &acc + &(&(&g[k][l].truncated(target) * &uk) * &v[l].truncated(target));
        }
    }
    acc
}

pub(crate) use inner_jets as inner_product_jets;
