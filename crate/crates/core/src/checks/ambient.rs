//! Ambient checks: structure identities, the Sasakian property of the
//! rescaled structure, the conformal construction itself, and the four
//! transformation laws (connection, curvature, `phi`- and `xi`-derivative).

use crate::manifold::{exterior_derivative_1form, VectorField};
use crate::tensor::{self, sum, vec1};

use super::{Accum, CheckCtx, CheckOutcome, SuiteError};

/// eq2.1: structure identities of both the base and the rescaled quadruple.
pub fn check_structure(ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let mut sampler = ctx.sampler("eq2.1");
    let mut acc = Accum::new();
    for _ in 0..ctx.samples {
        let p = sampler.point(ctx.space.chart().domain());
        let base = ctx.space.base().verify_almost_contact(&p);
        let tilde = ctx.space.tilde().verify_almost_contact(&p);
        // Structure identities are O(1)-scaled: eta(xi)=1 pins the scale.
        acc.add(base.max(), 1.0);
        acc.add(tilde.max(), 1.0);
        acc.group("base", base.max());
        acc.group("tilde", tilde.max());
        acc.group("phi_square", base.phi_square.max(tilde.phi_square));
        acc.group("compatibility", base.compatibility.max(tilde.compatibility));
    }
    Ok(acc.into_outcome())
}

/// eq2.2: the rescaled structure is Sasakian (its own connection).
pub fn check_sasakian(ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let mut sampler = ctx.sampler("eq2.2");
    let mut acc = Accum::new();
    let tilde = ctx.space.tilde();
    let dim = tilde.dim();
    for _ in 0..ctx.samples {
        let p = sampler.point(tilde.chart().domain());
        for _ in 0..ctx.probes {
            let x = sampler.probe(dim);
            let y = sampler.probe(dim);
            let defect = tilde.sasakian_defect(&p, &x, &y)?;
            // Scale: the defining terms g(X,Y) xi and eta(Y) X.
            let v = tilde.values_at(&p);
            let gxy = tensor::inner(&v.g, &x, &y);
            let eta_y: f64 = sum(dim, |i| v.eta[i] * y[i]);
            let scale = vec1(dim, |k| gxy * v.xi[k])
                .iter()
                .map(|t| t.abs())
                .fold(0.0f64, f64::max)
                .max(tensor::max_abs(&vec1(dim, |k| eta_y * x[k])))
                .max(1e-3);
            acc.add_vec(&defect.components, scale);
        }
        // Curvature identity R~(X,Y)xi~ = eta~(Y)X - eta~(X)Y pins the
        // curvature sign convention on every catalog space.
        let amb = ctx.space.ambient_at(&p)?;
        for _ in 0..2 {
            let x = sampler.probe(dim);
            let y = sampler.probe(dim);
            let d = amb.tilde_curvature_xi_defect(&x, &y);
            acc.group("curvature_xi_identity", tensor::max_abs(&d));
            acc.add_vec(&d, 1.0);
        }
    }
    Ok(acc.into_outcome())
}

/// eq2.6: rescaling consistency (the tilde structure satisfies the structure
/// identities, the rescaling laws hold as evaluated fields, Lee data is
/// consistent, `d omega = 0`).
pub fn check_conformal_construction(ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let mut sampler = ctx.sampler("eq2.6");
    let mut acc = Accum::new();
    let space = ctx.space;
    let n = space.dim();
    let omega_field = space.omega_field();
    for _ in 0..ctx.samples {
        let p = sampler.point(space.chart().domain());
        let tilde_res = space.tilde().verify_almost_contact(&p);
        acc.add(tilde_res.max(), 1.0);
        acc.group("tilde_structure", tilde_res.max());

        // Rescaling laws evaluated through both field paths.
        let fv = {
            let s = crate::jets::JetSpace::new(&p, 0)?;
            space.factor().eval(&s.coordinates()).value()
        };
        let ef = fv.exp();
        let bg = space.base().chart().metric_values(&p);
        let tg = space.tilde().chart().metric_values(&p);
        let mut scaling = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                scaling = scaling.max((tg[i][j] - ef * bg[i][j]).abs());
            }
        }
        let teta = space.tilde().eta().values(&p);
        let beta = space.base().eta().values(&p);
        let txi = space.tilde().xi().values(&p);
        let bxi = space.base().xi().values(&p);
        for i in 0..n {
            scaling = scaling.max((teta[i] - ef.sqrt() * beta[i]).abs());
            scaling = scaling.max((txi[i] - bxi[i] / ef.sqrt()).abs());
        }
        acc.add(scaling, 1.0_f64.max(ef));
        acc.group("rescaling", scaling);

        // eta~(xi~) = 1 (exp factors cancel).
        let exi: f64 = sum(n, |i| teta[i] * txi[i]);
        acc.add((exi - 1.0).abs(), 1.0);

        // Lee duality g(omega#, X) = omega(X) and closedness of omega.
        let lee = space.lee_at(&p)?;
        for _ in 0..ctx.probes.min(4) {
            let x = sampler.probe(n);
            let lhs = tensor::inner(&bg, &lee.omega_sharp, &x);
            let rhs: f64 = sum(n, |i| lee.omega[i] * x[i]);
            acc.add((lhs - rhs).abs(), rhs.abs().max(1e-3));
            acc.group("lee_duality", (lhs - rhs).abs());

            let y = sampler.probe(n);
            let domega = exterior_derivative_1form(
                &omega_field,
                &p,
                &VectorField::constant(x.clone()),
                &VectorField::constant(y),
            )?;
            acc.add(domega.abs(), tensor::max_abs(&lee.omega).max(1e-3));
            acc.group("domega", domega.abs());
        }

        // B symmetry (omega closed + torsion-free connection).
        let amb = space.ambient_at(&p)?;
        let mut bsym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                bsym = bsym.max((amb.b[i][j] - amb.b[j][i]).abs());
            }
        }
        acc.add(bsym, tensor::max_abs(&amb.b.concat()).max(1e-3));
        acc.group("b_symmetry", bsym);
    }
    Ok(acc.into_outcome())
}

/// eq2.7: two-sided connection transformation law.
pub fn check_connection_law(ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let mut sampler = ctx.sampler("eq2.7");
    let mut acc = Accum::new();
    let n = ctx.space.dim();
    for _ in 0..ctx.samples {
        let p = sampler.point(ctx.space.chart().domain());
        let amb = ctx.space.ambient_at(&p)?;
        for _ in 0..ctx.probes {
            let x = sampler.probe(n);
            let y = sampler.probe(n);
            let (defect, scale) = amb.connection_defect(&x, &y);
            acc.add_vec(&defect, scale);
        }
    }
    Ok(acc.into_outcome())
}

/// eq2.8: two-sided curvature transformation law.
pub fn check_curvature_law(ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let mut sampler = ctx.sampler("eq2.8");
    let mut acc = Accum::new();
    let n = ctx.space.dim();
    for _ in 0..ctx.samples {
        let p = sampler.point(ctx.space.chart().domain());
        let amb = ctx.space.ambient_at(&p)?;
        for _ in 0..ctx.probes {
            let x = sampler.probe(n);
            let y = sampler.probe(n);
            let z = sampler.probe(n);
            let w = sampler.probe(n);
            let (defect, scale) = amb.curvature_defect(&x, &y, &z, &w);
            acc.add(defect, scale);
            // Antisymmetry inheritance in (X,Y).
            let (d2, _) = amb.curvature_defect(&y, &x, &z, &w);
            acc.group("xy_antisymmetry", (defect + d2).abs());
        }
    }
    Ok(acc.into_outcome())
}

/// eq2.9: structure-derivative law for `phi`.
pub fn check_dphi_law(ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let mut sampler = ctx.sampler("eq2.9");
    let mut acc = Accum::new();
    let n = ctx.space.dim();
    for _ in 0..ctx.samples {
        let p = sampler.point(ctx.space.chart().domain());
        let amb = ctx.space.ambient_at(&p)?;
        for _ in 0..ctx.probes {
            let x = sampler.probe(n);
            let y = sampler.probe(n);
            let (defect, scale) = amb.dphi_defect(&x, &y);
            acc.add_vec(&defect, scale);
        }
        // Y = xi cross-check: (nabla_X phi) xi = -phi nabla_X xi.
        let x = sampler.probe(n);
        let lhs = amb.nabla_phi(&x, &amb.xi.clone());
        let nxi = amb.nabla_xi(&x);
        let rhs = amb.phi_apply(&nxi);
        let d = vec1(n, |k| lhs[k] + rhs[k]);
        acc.group("xi_path", tensor::max_abs(&d));
        acc.add_vec(&d, tensor::max_abs(&lhs).max(tensor::max_abs(&rhs)).max(1e-3));
    }
    Ok(acc.into_outcome())
}

/// eq2.10: `xi`-derivative law. The primary residual uses the derived
/// coefficient `-exp(f/2)` on `phi X`; the as-printed `+exp(-f/2)` variant is
/// reported as the `display` group.
pub fn check_dxi_law(ctx: &CheckCtx) -> Result<CheckOutcome, SuiteError> {
    let mut sampler = ctx.sampler("eq2.10");
    let mut acc = Accum::new();
    let n = ctx.space.dim();
    for _ in 0..ctx.samples {
        let p = sampler.point(ctx.space.chart().domain());
        let amb = ctx.space.ambient_at(&p)?;
        for _ in 0..ctx.probes {
            let x = sampler.probe(n);
            let (defect, scale) = amb.dxi_defect(&x);
            acc.add_vec(&defect, scale);
            let (disp, _) = amb.dxi_defect_display(&x);
            acc.group("display", tensor::max_abs(&disp));
        }
        // g(nabla_X xi, xi) = 0 (unit length of xi).
        let x = sampler.probe(n);
        let nxi = amb.nabla_xi(&x);
        let proj = amb.g_inner(&nxi, &amb.xi.clone());
        acc.group("norm_constancy", proj.abs());
        acc.add(proj.abs(), tensor::max_abs(&nxi).max(1e-3));
    }
    Ok(acc.into_outcome())
}
