//! Acceptance suite: one test per acceptance criterion, each printing a
//! single PASS/FAIL line. Tolerances and budgets are pinned here in code.
//!
//! Run with `cargo test -p verifold --test acceptance -- --nocapture` to see
//! the lines; the wall-time budgets assume an optimized test profile on a
//! commodity 4-core machine.

use std::time::Instant;

use verifold::checks::{run_check, run_suite, CheckCtx, RunConfig, SpaceSpec};
use verifold::conformal::ConformalSasakianSpace;
use verifold::manifold::ScalarField;
use verifold::sample::Sampler;
use verifold::spaces::{
    conformal_space, immersion_catalog, perturb_metric, sasakian_model, scale_phi,
    CatalogImmersion, ConformalFactor,
};
use verifold::submanifold::SubmanifoldStructure;
use verifold::tensor::vec1;

fn ctx<'a>(
    space: &'a ConformalSasakianSpace,
    imm: Option<&'a CatalogImmersion>,
    samples: usize,
    probes: usize,
    tol: f64,
) -> CheckCtx<'a> {
    CheckCtx {
        space,
        space_id: "acceptance",
        immersion: imm,
        samples,
        probes,
        seed: 42,
        tolerance: tol,
    }
}

fn pass(line: &str) {
    println!("ACCEPTANCE {line}");
}

#[test]
fn acceptance_01_structure_validity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    // Models n = 1, 2, 3 directly.
    for n in 1..=3 {
        let model = sasakian_model(n).unwrap();
        let mut s = Sampler::for_key(42, &format!("acc1-model-{n}"));
        for _ in 0..32 {
            let p = s.point(model.chart().domain());
            worst = worst.max(model.verify_almost_contact(&p).max());
        }
    }
    // Base and rescaled structures of conformal spaces.
    for (n, factor) in [
        (1usize, ConformalFactor::LinearZ { a: 0.3 }),
        (2, ConformalFactor::Quad { c: 0.1 }),
        (3, ConformalFactor::LinearCoord { index: 4, a: 0.2 }),
    ] {
        let space = conformal_space(n, &factor).unwrap();
        let out = run_check("eq2.1", &ctx(&space, None, 32, 4, 1e-9)).unwrap();
        worst = worst.max(out.max_abs);
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(worst <= 1e-9, "criterion 1 FAILED: residual {worst:.3e}");
    assert!(secs <= 5.0, "criterion 1 FAILED: runtime {secs:.2}s > 5s");
    pass(&format!(
        "1: PASS — structure identities <= 1e-9 on all models and conformal structures \
         (max {worst:.2e}, {secs:.2}s)"
    ));
}

#[test]
fn acceptance_02_sasakian_model_oracle() {
    let mut worst_defect = 0.0f64;
    let mut worst_phi_sec = 0.0f64;
    for n in 1..=3 {
        let space = conformal_space(n, &ConformalFactor::LinearZ { a: 0.3 }).unwrap();
        let out = run_check("eq2.2", &ctx(&space, None, 16, 4, 1e-8)).unwrap();
        worst_defect = worst_defect.max(out.max_abs);

        // phi-sectional curvature of the model through the full
        // jet -> Christoffel -> curvature pipeline: -3 for unit horizontal X.
        let dim = 2 * n + 1;
        let mut s = Sampler::for_key(42, &format!("acc2-{n}"));
        for _ in 0..16 {
            let p = s.point(space.chart().domain());
            let amb = space.ambient_at(&p).unwrap();
            let raw = s.probe(dim);
            let teta_raw: f64 = verifold::tensor::sum(dim, |i| amb.teta[i] * raw[i]);
            let x = vec1(dim, |k| raw[k] - teta_raw * amb.txi[k]);
            let norm = amb.tg_inner(&x, &x).sqrt();
            let x = vec1(dim, |k| x[k] / norm);
            let phix = amb.phi_apply(&x);
            let k_sec = amb.tilde_curvature4(&x, &phix, &phix, &x);
            worst_phi_sec = worst_phi_sec.max((k_sec + 3.0).abs());
        }
    }
    assert!(
        worst_defect <= 1e-8,
        "criterion 2 FAILED: Sasakian defect {worst_defect:.3e}"
    );
    assert!(
        worst_phi_sec <= 1e-6,
        "criterion 2 FAILED: phi-sectional deviation {worst_phi_sec:.3e}"
    );
    pass(&format!(
        "2: PASS — Sasakian defect <= 1e-8 ({worst_defect:.2e}) and phi-sectional = -3 \
         within 1e-6 ({worst_phi_sec:.2e})"
    ));
}

#[test]
fn acceptance_03_conformal_transformation_laws() {
    let start = Instant::now();
    let factors = [
        ConformalFactor::Const { c: 0.4 },
        ConformalFactor::LinearZ { a: 0.1 },
        ConformalFactor::LinearZ { a: 0.5 },
        ConformalFactor::Quad { c: 0.05 },
        ConformalFactor::Quad { c: 0.2 },
    ];
    let mut worst_first = 0.0f64; // eq2.7, eq2.9, eq2.10 (<= 1e-8)
    let mut worst_curv = 0.0f64; // eq2.8 (<= 1e-7)
    for n in [1usize, 2] {
        for factor in &factors {
            let space = conformal_space(n, factor).unwrap();
            for id in ["eq2.7", "eq2.9", "eq2.10"] {
                let out = run_check(id, &ctx(&space, None, 32, 8, 1e-8)).unwrap();
                worst_first = worst_first.max(out.max_rel);
            }
            let out = run_check("eq2.8", &ctx(&space, None, 32, 8, 1e-7)).unwrap();
            worst_curv = worst_curv.max(out.max_rel);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(
        worst_first <= 1e-8,
        "criterion 3 FAILED: first-order laws {worst_first:.3e}"
    );
    assert!(worst_curv <= 1e-7, "criterion 3 FAILED: curvature law {worst_curv:.3e}");
    assert!(secs <= 30.0, "criterion 3 FAILED: runtime {secs:.2}s > 30s");
    pass(&format!(
        "3: PASS — transformation laws: first-order {worst_first:.2e} (<= 1e-8), \
         curvature {worst_curv:.2e} (<= 1e-7), {secs:.2}s"
    ));
}

#[test]
fn acceptance_04_fundamental_equations() {
    let entries = [
        ("invariant_1_in_2", 2usize),
        ("anti_xaxis_r3", 1),
        ("anti_y0_plane_r3", 1),
        ("anti_surface_r5", 2),
        ("cr_r5", 2),
        ("cr_r7", 3),
    ];
    let mut worst = 0.0f64;
    let mut worst_cov = 0.0f64;
    let mut ricci_ran = false;
    for (id, n) in entries {
        let factors = [
            ConformalFactor::LinearZ { a: 0.3 },
            ConformalFactor::Quad { c: 0.05 },
        ];
        for factor in factors {
            let space = conformal_space(n, &factor).unwrap();
            let cat = immersion_catalog(id, n).unwrap();
            for check in ["eq2.15", "eq2.16", "eq2.17"] {
                let out = run_check(check, &ctx(&space, Some(&cat), 8, 4, 1e-7)).unwrap();
                if !out.applicable {
                    continue; // codimension constraints
                }
                worst = worst.max(out.max_rel);
                if check == "eq2.17" {
                    ricci_ran = true;
                    for g in &out.groups {
                        if g.label == "frame_covariance" {
                            worst_cov = worst_cov.max(g.max_residual);
                        }
                    }
                }
            }
        }
    }
    assert!(ricci_ran, "criterion 4 FAILED: no codim >= 2 entry ran the Ricci check");
    assert!(worst <= 1e-7, "criterion 4 FAILED: residual {worst:.3e}");
    assert!(
        worst_cov <= 1e-8,
        "criterion 4 FAILED: frame covariance {worst_cov:.3e}"
    );
    pass(&format!(
        "4: PASS — Gauss/Codazzi/Ricci <= 1e-7 on every catalog immersion under two \
         factor families (max {worst:.2e}), Ricci frame-covariant ({worst_cov:.2e})"
    ));
}

#[test]
fn acceptance_05_structure_equations() {
    let mut worst = 0.0f64;
    for (id, n) in [("invariant_1_in_2", 2usize), ("anti_xaxis_r3", 1), ("anti_y0_plane_r3", 1)] {
        for factor in [
            ConformalFactor::LinearZ { a: 0.3 },
            ConformalFactor::Quad { c: 0.05 },
        ] {
            let space = conformal_space(n, &factor).unwrap();
            let cat = immersion_catalog(id, n).unwrap();
            for check in ["eq2.11", "eq2.12", "eq2.13", "eq2.14"] {
                let out = run_check(check, &ctx(&space, Some(&cat), 8, 4, 1e-7)).unwrap();
                if out.applicable {
                    worst = worst.max(out.max_rel);
                }
            }
        }
    }
    assert!(worst <= 1e-7, "criterion 5 FAILED: residual {worst:.3e}");
    pass(&format!(
        "5: PASS — structure equations for the phi blocks <= 1e-7 on invariant and \
         anti-invariant entries (max {worst:.2e})"
    ));
}

#[test]
fn acceptance_06_minimality() {
    // Tangential Lee vector: f = a z has its gradient tangent to the
    // invariant block, so the immersion is minimal.
    let space = conformal_space(2, &ConformalFactor::LinearZ { a: 0.4 }).unwrap();
    let cat = immersion_catalog("invariant_1_in_2", 2).unwrap();
    let mut s = Sampler::for_key(42, "acc6");
    let mut worst_h = 0.0f64;
    for _ in 0..8 {
        let p = s.point(cat.immersion.domain());
        let st = SubmanifoldStructure::at(&cat.immersion, &space, &p, None).unwrap();
        let h = st.data.mean_curvature();
        worst_h = worst_h.max(st.data.amb_inner(&h, &h).max(0.0).sqrt());
    }
    assert!(worst_h <= 1e-8, "criterion 6 FAILED: |H| = {worst_h:.3e} with tangent Lee");

    // Generic factor with a normal gradient component (f = a x^2, a
    // coordinate off the invariant block): m H = (k + 1/2) omega#-perp at
    // every sample.
    let space_q = conformal_space(2, &ConformalFactor::LinearCoord { index: 1, a: 0.4 }).unwrap();
    let mut worst_prop = 0.0f64;
    let mut lee_seen = 0.0f64;
    for _ in 0..8 {
        let p = s.point(cat.immersion.domain());
        let st = SubmanifoldStructure::at(&cat.immersion, &space_q, &p, None).unwrap();
        let m = st.m() as f64;
        let k = (st.m() - 1) as f64 / 2.0;
        let h = st.data.mean_curvature();
        let lee_perp = st.lee_perp_amb();
        let d = vec1(st.data.n_amb, |i| m * h[i] - (k + 0.5) * lee_perp[i]);
        worst_prop = worst_prop.max(st.data.amb_inner(&d, &d).max(0.0).sqrt());
        lee_seen = lee_seen.max(st.data.amb_inner(&lee_perp, &lee_perp).max(0.0).sqrt());
    }
    assert!(
        worst_prop <= 1e-7,
        "criterion 6 FAILED: proportionality residual {worst_prop:.3e}"
    );
    assert!(lee_seen > 1e-3, "criterion 6 needs a genuinely normal Lee part");
    pass(&format!(
        "6: PASS — minimal with tangent Lee (|H| {worst_h:.2e}), and m H = (k+1/2) w-perp \
         with generic factor ({worst_prop:.2e})"
    ));
}

#[test]
fn acceptance_07_anti_invariant_suite() {
    // eq4.1 on both anti-invariant entries.
    let mut worst_41 = 0.0f64;
    for (id, n) in [("anti_xaxis_r3", 1usize), ("anti_y0_plane_r3", 1)] {
        let space = conformal_space(n, &ConformalFactor::LinearZ { a: 0.3 }).unwrap();
        let cat = immersion_catalog(id, n).unwrap();
        let out = run_check("eq4.1", &ctx(&space, Some(&cat), 8, 4, 1e-7)).unwrap();
        assert!(out.applicable);
        worst_41 = worst_41.max(out.max_rel);
    }
    assert!(worst_41 <= 1e-7, "criterion 7 FAILED: eq4.1 {worst_41:.3e}");

    // eq4.2 term-group report: on a normal-Lee factor exactly the suspected
    // group deviates; the primary (derived) residual stays at precision.
    let space = conformal_space(1, &ConformalFactor::LinearCoord { index: 1, a: 0.4 }).unwrap();
    let cat = immersion_catalog("anti_y0_plane_r3", 1).unwrap();
    let out = run_check("eq4.2", &ctx(&space, Some(&cat), 8, 4, 1e-7)).unwrap();
    assert!(out.max_rel <= 1e-7, "criterion 7 FAILED: eq4.2 primary {:.3e}", out.max_rel);
    let flagged: Vec<&str> = out
        .groups
        .iter()
        .filter(|g| g.label.starts_with('G') && g.max_residual > 1e-7)
        .map(|g| g.label.as_str())
        .collect();
    assert!(
        flagged.len() <= 1,
        "criterion 7 FAILED: eq4.2 flags {flagged:?} (more than one group deviates)"
    );

    // prop4.2: equivalence holds per sample on the anti-invariant
    // xi-tangent entry.
    let space = conformal_space(1, &ConformalFactor::Quad { c: 0.08 }).unwrap();
    let out = run_check("prop4.2", &ctx(&space, Some(&cat), 8, 4, 1e-7)).unwrap();
    assert!(out.applicable);
    let equiv = out
        .groups
        .iter()
        .find(|g| g.label == "equivalence_violation")
        .map(|g| g.max_residual)
        .unwrap_or(1.0);
    assert!(equiv == 0.0, "criterion 7 FAILED: prop4.2 equivalence violated");
    assert!(out.max_rel <= 1e-7, "criterion 7 FAILED: prop4.2 residual {:.3e}", out.max_rel);

    // thm4.3 with theta = 0 on the x-axis: flat normal connection.
    let space = conformal_space(1, &ConformalFactor::LinearZ { a: 0.3 }).unwrap();
    let cat = immersion_catalog("anti_xaxis_r3", 1).unwrap();
    let out = run_check("thm4.3", &ctx(&space, Some(&cat), 8, 4, 1e-8)).unwrap();
    assert!(out.applicable);
    let rperp = out
        .groups
        .iter()
        .find(|g| g.label == "rperp_norm")
        .map(|g| g.max_residual)
        .unwrap_or(1.0);
    assert!(rperp <= 1e-8, "criterion 7 FAILED: |R-perp| = {rperp:.3e}");
    pass(&format!(
        "7: PASS — eq4.1 {worst_41:.2e}, eq4.2 with {} flagged group(s), prop4.2 \
         equivalence holds, |R-perp| = {rperp:.2e} on the x-axis",
        flagged.len()
    ));
}

#[test]
fn acceptance_08_cr_suite() {
    // thm5.1 on cr_r7 (two-dimensional anti-invariant distribution).
    let space = conformal_space(3, &ConformalFactor::LinearCoord { index: 4, a: 0.2 }).unwrap();
    let cat = immersion_catalog("cr_r7", 3).unwrap();
    let out = run_check("thm5.1", &ctx(&space, Some(&cat), 8, 4, 1e-8)).unwrap();
    assert!(out.applicable);
    let get = |label: &str| {
        out.groups
            .iter()
            .find(|g| g.label == label)
            .map(|g| g.max_residual)
            .unwrap_or(f64::INFINITY)
    };
    let bracket = get("bracket_projection");
    let dphi = get("dPhi_tilde");
    assert!(bracket <= 1e-8, "criterion 8 FAILED: bracket projection {bracket:.3e}");
    assert!(dphi <= 1e-8, "criterion 8 FAILED: dPhi~ residual {dphi:.3e}");

    // thm5.3 with a normal Lee vector: pairing identity, equivalence, and
    // the nested-leaf oracle.
    let out = run_check("thm5.3", &ctx(&space, Some(&cat), 6, 4, 1e-7)).unwrap();
    assert!(out.applicable);
    assert!(
        out.reason.is_none(),
        "criterion 8 FAILED: lee-normal hypothesis did not hold: {:?}",
        out.reason
    );
    let get53 = |label: &str| {
        out.groups
            .iter()
            .find(|g| g.label == label)
            .map(|g| g.max_residual)
            .unwrap_or(f64::INFINITY)
    };
    assert!(out.max_rel <= 1e-7, "criterion 8 FAILED: eq5.2 residual {:.3e}", out.max_rel);
    assert!(
        get53("equivalence_violation") == 0.0,
        "criterion 8 FAILED: thm5.3 equivalence violated"
    );
    let leaf = get53("leaf_oracle");
    assert!(leaf <= 1e-7, "criterion 8 FAILED: leaf oracle {leaf:.3e}");
    pass(&format!(
        "8: PASS — bracket projection {bracket:.2e}, dPhi~ {dphi:.2e}, mixed-geodesic \
         equivalence holds, leaf oracle {leaf:.2e}"
    ));
}

#[test]
fn acceptance_09_fault_injection() {
    // phi scaled by 1.01.
    let model = sasakian_model(1).unwrap();
    let bad_phi = ConformalSasakianSpace::from_sasakian(
        scale_phi(&model, 1.01),
        ScalarField::constant(0.0),
    );
    let out = run_check("eq2.1", &ctx(&bad_phi, None, 8, 4, 1e-6)).unwrap();
    assert!(
        out.max_abs >= 1e-4,
        "criterion 9 FAILED: phi corruption residual {:.3e}",
        out.max_abs
    );
    let phi_resid = out.max_abs;

    // Metric perturbed off the conformal class: the rescaled structure is no
    // longer Sasakian.
    let bad_metric = ConformalSasakianSpace::from_sasakian(
        perturb_metric(&model, 1e-2),
        ScalarField::constant(0.0),
    );
    let out21 = run_check("eq2.1", &ctx(&bad_metric, None, 8, 4, 1e-6)).unwrap();
    let out22 = run_check("eq2.2", &ctx(&bad_metric, None, 8, 4, 1e-6)).unwrap();
    let metric_resid = out21.max_abs.max(out22.max_abs);
    assert!(
        metric_resid >= 1e-4,
        "criterion 9 FAILED: metric perturbation residual {metric_resid:.3e}"
    );
    pass(&format!(
        "9: PASS — fault injection detected (phi-scale residual {phi_resid:.2e}, \
         off-class metric residual {metric_resid:.2e})"
    ));
}

#[test]
fn acceptance_10_determinism() {
    let config = RunConfig {
        spaces: vec![
            SpaceSpec {
                n: 1,
                factor: "linear_z:a=0.3".into(),
                phi_scale: 1.0,
            },
            SpaceSpec {
                n: 2,
                factor: "quad:c=0.05".into(),
                phi_scale: 1.0,
            },
        ],
        immersions: vec!["invariant_1_in_2".into(), "anti_y0_plane_r3".into()],
        checks: vec!["all".into()],
        samples: 3,
        probes: 2,
        seed: 7,
        tolerance: 1e-6,
    };
    let a = run_suite(&config).unwrap();
    let b = run_suite(&config).unwrap();
    let ja = serde_json::to_string(&a.without_timing()).unwrap();
    let jb = serde_json::to_string(&b.without_timing()).unwrap();
    assert_eq!(ja, jb, "criterion 10 FAILED: reports differ");
    pass("10: PASS — identical config and seed give byte-identical reports modulo timing");
}

#[test]
fn acceptance_11_default_suite_wall_time() {
    let start = Instant::now();
    let report = run_suite(&RunConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    assert!(
        report.all_passed(),
        "criterion 11 FAILED: default suite has failing checks"
    );
    assert!(secs <= 120.0, "criterion 11 FAILED: wall time {secs:.1}s > 120s");
    let executed = report.checks.iter().filter(|c| c.applicable).count();
    pass(&format!(
        "11: PASS — full default suite ({executed} executed checks) in {secs:.1}s (<= 120s)"
    ));
}
