//! Contact-structure data along an immersion: the tangential/normal splitting
//! of `phi` (P, F, t and the normal part, called `f_nor` here to keep it apart
//! from the conformal exponent), Lee-vector splits, and the derived structure
//! equations for their covariant derivatives.

use crate::conformal::{AmbientPointData, ConformalSasakianSpace};
use crate::jets::{compose_through, Jet};
use crate::manifold::Result;
use crate::sample::Sampler;
use crate::tensor::{self, sum, vec1, Vec1};

use super::{Immersion, SubmanifoldData};

/// Constant-coefficient spans of the CR distributions in the source chart.
#[derive(Clone, Debug)]
pub struct CrDistributions {
    pub d_span: Vec<Vec1>,
    pub d_perp_span: Vec<Vec1>,
}

/// Structure-level data at one source point: metric-level pipeline plus the
/// composed contact fields and the operator blocks of `phi` along the
/// immersion.
pub struct SubmanifoldStructure {
    pub data: SubmanifoldData,
    pub amb: AmbientPointData,
    /// `phi` composed through the immersion (ambient indices, order 1).
    pub phi_c: Vec<Vec<Jet>>,
    pub xi_c: Vec<Jet>,
    pub eta_c: Vec<Jet>,
    pub omega_c: Vec<Jet>,
    pub omega_sharp_c: Vec<Jet>,
    /// Tangential block `P`: `p_op[i][j]` source indices, order 1.
    pub p_op: Vec<Vec<Jet>>,
    /// Normal block `F`: `f_op[a][j]` frame x source, order 1.
    pub f_op: Vec<Vec<Jet>>,
    /// Tangential block on normals `t`: `t_op[i][a]`, order 1.
    pub t_op: Vec<Vec<Jet>>,
    /// Normal block on normals `f_nor`: `fn_op[b][a]`, order 1.
    pub fn_op: Vec<Vec<Jet>>,
}

impl SubmanifoldStructure {
    pub fn at(
        imm: &Immersion,
        space: &ConformalSasakianSpace,
        p_src: &[f64],
        normal_rotation: Option<&tensor::Mat>,
    ) -> Result<Self> {
        let data = SubmanifoldData::at(imm, space.base().chart().metric(), p_src, normal_rotation)?;
        let amb = AmbientPointData::at(space, &data.q)?;
        let n = data.n_amb;
        let m = data.m;
        let p = data.codim;

        let phi_c: Vec<Vec<Jet>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| compose_through(&amb.phi_jets[k][l], &data.iota))
                    .collect()
            })
            .collect();
        let xi_c: Vec<Jet> = (0..n)
            .map(|k| compose_through(&amb.xi_jets[k], &data.iota))
            .collect();
        let eta_c: Vec<Jet> = (0..n)
            .map(|k| compose_through(&amb.eta_jets[k], &data.iota))
            .collect();
        let omega_c: Vec<Jet> = (0..n)
            .map(|k| compose_through(&amb.omega_jets[k], &data.iota))
            .collect();
        let omega_sharp_c: Vec<Jet> = (0..n)
            .map(|k| compose_through(&amb.omega_sharp_jets[k], &data.iota))
            .collect();

        // phi applied to the tangent frame / normal frame (ambient comps).
        let g1: Vec<Vec<Jet>> = data
            .g_amb
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();
        let e1: Vec<Vec<Jet>> = data
            .e
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();
        let nor1: Vec<Vec<Jet>> = data
            .nor
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();
        let ginv1: Vec<Vec<Jet>> = data
            .ginv_ind
            .iter()
            .map(|row| row.iter().map(|j| j.truncated(1)).collect())
            .collect();

        let apply_phi = |v: &[Jet]| -> Vec<Jet> {
            (0..n)
                .map(|k| {
                    let mut acc = phi_c[0][0].scale(0.0);
                    for l in 0..n {
                        acc = &acc + &(&phi_c[k][l] * &v[l]);
                    }
                    acc
                })
                .collect()
        };
        let phi_e: Vec<Vec<Jet>> = (0..m).map(|j| apply_phi(&e1[j])).collect();
        let phi_n: Vec<Vec<Jet>> = (0..p).map(|a| apply_phi(&nor1[a])).collect();

        let inner = |u: &[Jet], v: &[Jet]| super::inner_product_jets(&g1, u, v);

        // P^i_j = ginv^{ik} g(phi E_j, E_k); F^a_j = g(phi E_j, N_a)
        let p_op: Vec<Vec<Jet>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut acc = phi_c[0][0].scale(0.0);
                        for k in 0..m {
                            acc = &acc + &(&ginv1[i][k] * &inner(&phi_e[j], &e1[k]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let f_op: Vec<Vec<Jet>> = (0..p)
            .map(|a| (0..m).map(|j| inner(&phi_e[j], &nor1[a])).collect())
            .collect();
        // t^i_a = ginv^{ik} g(phi N_a, E_k); f_nor^b_a = g(phi N_a, N_b)
        let t_op: Vec<Vec<Jet>> = (0..m)
            .map(|i| {
                (0..p)
                    .map(|a| {
                        let mut acc = phi_c[0][0].scale(0.0);
                        for k in 0..m {
                            acc = &acc + &(&ginv1[i][k] * &inner(&phi_n[a], &e1[k]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let fn_op: Vec<Vec<Jet>> = (0..p)
            .map(|b| (0..p).map(|a| inner(&phi_n[a], &nor1[b])).collect())
            .collect();

        Ok(Self {
            data,
            amb,
            phi_c,
            xi_c,
            eta_c,
            omega_c,
            omega_sharp_c,
            p_op,
            f_op,
            t_op,
            fn_op,
        })
    }

    pub fn m(&self) -> usize {
        self.data.m
    }

    pub fn codim(&self) -> usize {
        self.data.codim
    }

    /// `exp(f/2)` at the image point.
    pub fn e_half(&self) -> f64 {
        (0.5 * self.amb.f).exp()
    }

    /// `eta(d iota(X))` for a source probe.
    pub fn eta_src(&self, x: &[f64]) -> f64 {
        let push = self.data.push(x);
        sum(self.data.n_amb, |k| self.eta_c[k].value() * push[k])
    }

    /// `omega(d iota(X))` for a source probe.
    pub fn omega_src(&self, x: &[f64]) -> f64 {
        let push = self.data.push(x);
        sum(self.data.n_amb, |k| self.omega_c[k].value() * push[k])
    }

    /// `omega(u)` for an ambient vector.
    pub fn omega_amb(&self, u: &[f64]) -> f64 {
        sum(self.data.n_amb, |k| self.omega_c[k].value() * u[k])
    }

    /// `eta(u)` for an ambient vector.
    pub fn eta_amb(&self, u: &[f64]) -> f64 {
        sum(self.data.n_amb, |k| self.eta_c[k].value() * u[k])
    }

    /// `phi u` for an ambient vector (values).
    pub fn phi_amb(&self, u: &[f64]) -> Vec1 {
        let n = self.data.n_amb;
        vec1(n, |k| sum(n, |l| self.phi_c[k][l].value() * u[l]))
    }

    /// `P X` source components (values).
    pub fn p_apply(&self, x: &[f64]) -> Vec1 {
        vec1(self.m(), |i| {
            sum(self.m(), |j| self.p_op[i][j].value() * x[j])
        })
    }

    /// `F X` frame coefficients (values).
    pub fn f_apply(&self, x: &[f64]) -> Vec1 {
        vec1(self.codim(), |a| {
            sum(self.m(), |j| self.f_op[a][j].value() * x[j])
        })
    }

    /// `t nu` source components for a normal in frame coefficients.
    pub fn t_apply(&self, nu: &[f64]) -> Vec1 {
        vec1(self.m(), |i| {
            sum(self.codim(), |a| self.t_op[i][a].value() * nu[a])
        })
    }

    /// `f_nor nu` frame coefficients.
    pub fn fn_apply(&self, nu: &[f64]) -> Vec1 {
        vec1(self.codim(), |b| {
            sum(self.codim(), |a| self.fn_op[b][a].value() * nu[a])
        })
    }

    /// Tangential part of `xi` in source components.
    pub fn xi_top_src(&self) -> Vec1 {
        let xi: Vec1 = self.xi_c.iter().map(Jet::value).collect();
        self.data.pullback_tangential(&xi)
    }

    /// Normal part of `xi` in frame coefficients.
    pub fn xi_perp_coeffs(&self) -> Vec1 {
        let xi: Vec1 = self.xi_c.iter().map(Jet::value).collect();
        self.data.normal_coeffs(&xi)
    }

    /// Tangential part of the Lee vector in source components.
    pub fn lee_top_src(&self) -> Vec1 {
        let os: Vec1 = self.omega_sharp_c.iter().map(Jet::value).collect();
        self.data.pullback_tangential(&os)
    }

    /// Normal part of the Lee vector in frame coefficients.
    pub fn lee_perp_coeffs(&self) -> Vec1 {
        let os: Vec1 = self.omega_sharp_c.iter().map(Jet::value).collect();
        self.data.normal_coeffs(&os)
    }

    /// Normal part of the Lee vector as an ambient vector.
    pub fn lee_perp_amb(&self) -> Vec1 {
        self.data.normal_from_coeffs(&self.lee_perp_coeffs())
    }

    /// `phi omega#` splits: tangential source components and frame coefficients.
    pub fn phi_lee_splits(&self) -> (Vec1, Vec1) {
        let os: Vec1 = self.omega_sharp_c.iter().map(Jet::value).collect();
        let phi_os = self.phi_amb(&os);
        (
            self.data.pullback_tangential(&phi_os),
            self.data.normal_coeffs(&phi_os),
        )
    }

    /// Modified B-tensor `B'(X,Y) = B(X,Y) + omega(h(X,Y))` for source probes.
    pub fn b_mod(&self, x: &[f64], y: &[f64]) -> f64 {
        let ex = self.data.push(x);
        let ey = self.data.push(y);
        let b = self.amb.b_of(&ex, &ey);
        let h = self.data.h_of(x, y);
        b + self.omega_amb(&h)
    }

    /// `B(d iota X, d iota Y)` (ambient B restricted to tangents).
    pub fn b_amb(&self, x: &[f64], y: &[f64]) -> f64 {
        self.amb.b_of(&self.data.push(x), &self.data.push(y))
    }

    /// Source 1-form `Y -> B'(X,Y)` raised with the induced metric.
    pub fn b_mod_sharp(&self, x: &[f64]) -> Vec1 {
        let m = self.m();
        let beta = vec1(m, |j| {
            let ej = vec1(m, |i| if i == j { 1.0 } else { 0.0 });
            self.b_mod(x, &ej)
        });
        vec1(m, |i| {
            sum(m, |j| self.data.ginv_ind[i][j].value() * beta[j])
        })
    }

    /// `(nabla'_X P) Y` source components for constant source probes.
    pub fn nabla_p(&self, x: &[f64], y: &[f64]) -> Vec1 {
        let m = self.m();
        let gam = |k: usize, c: usize, b: usize| self.data.gamma_ind[k][c][b].value();
        vec1(m, |i| {
            tensor::sum2(m, |c, j| {
                x[c] * y[j]
                    * (self.p_op[i][j].gradient(c)
                        + sum(m, |b| {
                            gam(i, c, b) * self.p_op[b][j].value()
                                - gam(b, c, j) * self.p_op[i][b].value()
                        }))
            })
        })
    }

    /// `(nabla'_X F) Y` frame coefficients.
    pub fn nabla_f(&self, x: &[f64], y: &[f64]) -> Vec1 {
        let m = self.m();
        let p = self.codim();
        let s = self.data.s_vals();
        let gam = |k: usize, c: usize, b: usize| self.data.gamma_ind[k][c][b].value();
        vec1(p, |a| {
            tensor::sum2(m, |c, j| {
                x[c] * y[j]
                    * (self.f_op[a][j].gradient(c)
                        + sum(p, |b| s[c][a][b] * self.f_op[b][j].value())
                        - sum(m, |b| gam(b, c, j) * self.f_op[a][b].value()))
            })
        })
    }

    /// `(nabla'_X t) N_a` source components.
    pub fn nabla_t(&self, x: &[f64], a: usize) -> Vec1 {
        let m = self.m();
        let p = self.codim();
        let s = self.data.s_vals();
        let gam = |k: usize, c: usize, b: usize| self.data.gamma_ind[k][c][b].value();
        vec1(m, |i| {
            sum(m, |c| {
                x[c] * (self.t_op[i][a].gradient(c)
                    + sum(m, |b| gam(i, c, b) * self.t_op[b][a].value())
                    - sum(p, |b| self.t_op[i][b].value() * s[c][b][a]))
            })
        })
    }

    /// `(nabla'_X f_nor) N_a` frame coefficients.
    pub fn nabla_fn(&self, x: &[f64], a: usize) -> Vec1 {
        let m = self.m();
        let p = self.codim();
        let s = self.data.s_vals();
        vec1(p, |b| {
            sum(m, |c| {
                x[c] * (self.fn_op[b][a].gradient(c)
                    + sum(p, |d| s[c][b][d] * self.fn_op[d][a].value())
                    - sum(p, |d| self.fn_op[b][d].value() * s[c][d][a]))
            })
        })
    }

    /// Shape operator applied to a normal given in frame coefficients.
    pub fn shape_of(&self, nu: &[f64], x: &[f64]) -> Vec1 {
        let m = self.m();
        vec1(m, |i| {
            sum(self.codim(), |a| nu[a] * self.data.shape_apply(a, x)[i])
        })
    }

    /// Structure-equation defect for the tangential block `P`, and the term
    /// scale. `include_xi_term` distinguishes the derived variant (which keeps
    /// the `exp(f/2) eta(N) X`-type terms absent from the printed displays;
    /// for this tangential equation derived == display).
    pub fn p_equation_defect(&self, x: &[f64], y: &[f64]) -> (Vec1, f64) {
        let m = self.m();
        let lhs = self.nabla_p(x, y);
        let e_half = self.e_half();
        let gxy = self.data.g_src(x, y);
        let eta_y = self.eta_src(y);
        let xi_top = self.xi_top_src();
        let fy = self.f_apply(y);
        let a_fy_x = self.shape_of(&fy, x);
        let h_co = self.data.h_coeffs(x, y);
        let th = self.t_apply(&h_co);
        let phi_ey = self.phi_amb(&self.data.push(y));
        let o_phiy = self.omega_amb(&phi_ey);
        let oy = self.omega_src(y);
        let px = self.p_apply(x);
        let (phi_lee_top, _) = self.phi_lee_splits();
        let lee_top = self.lee_top_src();
        let g_x_phiy = self.data.amb_inner(&self.data.push(x), &phi_ey);

        let t1 = vec1(m, |i| e_half * (gxy * xi_top[i] - eta_y * x[i]));
        let t2 = vec1(m, |i| a_fy_x[i] + th[i]);
        let t3 = vec1(m, |i| {
            0.5 * (o_phiy * x[i] - oy * px[i] + gxy * phi_lee_top[i] - g_x_phiy * lee_top[i])
        });
        let defect = vec1(m, |i| lhs[i] - t1[i] - t2[i] + t3[i]);
        let scale = tensor::max_abs(&lhs)
            .max(tensor::max_abs(&t1))
            .max(tensor::max_abs(&t2))
            .max(tensor::max_abs(&t3));
        (defect, scale)
    }

    /// Structure-equation defect for the normal block `F` (frame
    /// coefficients). The derived variant keeps the `exp(f/2) g(X,Y) xi_perp`
    /// term; the printed display omits it (it vanishes when `xi` is tangent).
    pub fn f_equation_defect(&self, x: &[f64], y: &[f64], derived: bool) -> (Vec1, f64) {
        let p = self.codim();
        let lhs = self.nabla_f(x, y);
        let e_half = self.e_half();
        let gxy = self.data.g_src(x, y);
        let h_co = self.data.h_coeffs(x, y);
        let fnh = self.fn_apply(&h_co);
        let py = self.p_apply(y);
        let h_x_py = self.data.h_coeffs(x, &py);
        let xi_perp = self.xi_perp_coeffs();
        let oy = self.omega_src(y);
        let fx = self.f_apply(x);
        let (_, phi_lee_perp) = self.phi_lee_splits();
        let lee_perp = self.lee_perp_coeffs();
        let phi_ey = self.phi_amb(&self.data.push(y));
        let g_x_phiy = self.data.amb_inner(&self.data.push(x), &phi_ey);

        let t1 = vec1(p, |a| fnh[a] - h_x_py[a]);
        let t_xi = vec1(p, |a| e_half * gxy * xi_perp[a]);
        let t2 = vec1(p, |a| {
            0.5 * (oy * fx[a] - gxy * phi_lee_perp[a] + g_x_phiy * lee_perp[a])
        });
        let defect = vec1(p, |a| {
            lhs[a] - t1[a] - if derived { t_xi[a] } else { 0.0 } - t2[a]
        });
        let scale = tensor::max_abs(&lhs)
            .max(tensor::max_abs(&t1))
            .max(tensor::max_abs(&t_xi))
            .max(tensor::max_abs(&t2));
        (defect, scale)
    }

    /// Structure-equation defect for `t` (source components, normal index
    /// `a`). The derived variant keeps the `exp(f/2) eta(N_a) X` term.
    pub fn t_equation_defect(&self, x: &[f64], a: usize, derived: bool) -> (Vec1, f64) {
        let m = self.m();
        let lhs = self.nabla_t(x, a);
        let e_half = self.e_half();
        let fn_a = vec1(self.codim(), |b| self.fn_op[b][a].value());
        let a_fn_x = self.shape_of(&fn_a, x);
        let pax = self.p_apply(&self.data.shape_apply(a, x));
        let na = vec1(self.data.n_amb, |k| self.data.nor[a][k].value());
        let eta_na = self.eta_amb(&na);
        let phi_na = self.phi_amb(&na);
        let o_phina = self.omega_amb(&phi_na);
        let o_na = self.omega_amb(&na);
        let px = self.p_apply(x);
        let lee_top = self.lee_top_src();
        let g_x_phina = self.data.amb_inner(&self.data.push(x), &phi_na);

        let t1 = vec1(m, |i| a_fn_x[i] - pax[i]);
        let t_xi = vec1(m, |i| e_half * eta_na * x[i]);
        let t2 = vec1(m, |i| {
            0.5 * (o_phina * x[i] - o_na * px[i] - g_x_phina * lee_top[i])
        });
        let defect = vec1(m, |i| {
            lhs[i] - t1[i] + if derived { t_xi[i] } else { 0.0 } + t2[i]
        });
        let scale = tensor::max_abs(&lhs)
            .max(tensor::max_abs(&t1))
            .max(tensor::max_abs(&t_xi))
            .max(tensor::max_abs(&t2));
        (defect, scale)
    }

    /// Structure-equation defect for `f_nor` (frame coefficients, normal
    /// index `a`); derived and display agree for this block.
    pub fn fn_equation_defect(&self, x: &[f64], a: usize) -> (Vec1, f64) {
        let p = self.codim();
        let lhs = self.nabla_fn(x, a);
        let t_col = vec1(self.m(), |i| self.t_op[i][a].value());
        let h_x_tn = self.data.h_coeffs(x, &t_col);
        let ax = self.data.shape_apply(a, x);
        let f_ax = self.f_apply(&ax);
        let na = vec1(self.data.n_amb, |k| self.data.nor[a][k].value());
        let o_na = self.omega_amb(&na);
        let fx = self.f_apply(x);
        let phi_na = self.phi_amb(&na);
        let g_x_phina = self.data.amb_inner(&self.data.push(x), &phi_na);
        let lee_perp = self.lee_perp_coeffs();

        let t1 = vec1(p, |b| -h_x_tn[b] - f_ax[b]);
        let t2 = vec1(p, |b| 0.5 * (o_na * fx[b] + g_x_phina * lee_perp[b]));
        let defect = vec1(p, |b| lhs[b] - t1[b] - t2[b]);
        let scale = tensor::max_abs(&lhs)
            .max(tensor::max_abs(&t1))
            .max(tensor::max_abs(&t2));
        (defect, scale)
    }
}

/// Classification flags with the residuals they were decided on.
#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub invariant: bool,
    pub anti_invariant: bool,
    pub xi_tangent: bool,
    pub xi_normal: bool,
    pub lee_tangent: bool,
    pub lee_normal: bool,
    pub max_f_residual: f64,
    pub max_p_residual: f64,
    pub max_xi_perp: f64,
    pub max_xi_top: f64,
    pub max_lee_perp: f64,
    pub max_lee_top: f64,
}

/// Samples the immersion and classifies it by the norms of the `P`/`F` blocks
/// and the splits of `xi` and the Lee vector.
pub fn classify(
    imm: &Immersion,
    space: &ConformalSasakianSpace,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<ClassificationReport> {
    let mut sampler = Sampler::for_key(seed, "classify");
    let m = imm.source_dim();
    let mut max_f = 0.0f64;
    let mut max_p = 0.0f64;
    let mut max_xi_perp = 0.0f64;
    let mut max_xi_top = 0.0f64;
    let mut max_lee_perp = 0.0f64;
    let mut max_lee_top = 0.0f64;

    for _ in 0..sample_count {
        let p_src = sampler.point(imm.domain());
        let st = SubmanifoldStructure::at(imm, space, &p_src, None)?;
        for _ in 0..4 {
            let x = sampler.probe(m);
            let fx = st.f_apply(&x);
            let px = st.p_apply(&x);
            // norms w.r.t. the relevant metrics
            let f_norm = fx.iter().map(|v| v * v).sum::<f64>().sqrt();
            let p_norm = st.data.g_src(&px, &px).max(0.0).sqrt();
            max_f = max_f.max(f_norm);
            max_p = max_p.max(p_norm);
        }
        let xi_perp = st.xi_perp_coeffs();
        let xi_top = st.xi_top_src();
        let xi_top_amb = st.data.push(&xi_top);
        max_xi_perp = max_xi_perp.max(xi_perp.iter().map(|v| v * v).sum::<f64>().sqrt());
        max_xi_top = max_xi_top.max(st.data.amb_inner(&xi_top_amb, &xi_top_amb).max(0.0).sqrt());
        let lee_perp = st.lee_perp_coeffs();
        let lee_top = st.lee_top_src();
        let lee_top_amb = st.data.push(&lee_top);
        max_lee_perp = max_lee_perp.max(lee_perp.iter().map(|v| v * v).sum::<f64>().sqrt());
        max_lee_top =
            max_lee_top.max(st.data.amb_inner(&lee_top_amb, &lee_top_amb).max(0.0).sqrt());
    }

    Ok(ClassificationReport {
        invariant: max_f <= tol,
        anti_invariant: max_p <= tol,
        xi_tangent: max_xi_perp <= tol,
        xi_normal: max_xi_top <= tol,
        lee_tangent: max_lee_perp <= tol,
        lee_normal: max_lee_top <= tol,
        max_f_residual: max_f,
        max_p_residual: max_p,
        max_xi_perp,
        max_xi_top,
        max_lee_perp,
        max_lee_top,
    })
}
