//! Catalog of concrete spaces and immersions: the standard Sasakian models on
//! R^(2n+1), conformal factor families, and invariant / anti-invariant / CR
//! coordinate-block immersions with documented constructions.

use thiserror::Error;

use crate::conformal::ConformalSasakianSpace;
use crate::contact::AlmostContactStructure;
use crate::manifold::{MatrixField, MetricChart, OneFormField, ScalarField, VectorField};
use crate::submanifold::{CrDistributions, Immersion};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unsupported model dimension parameter n={0} (supported: 1, 2, 3)")]
    UnsupportedModel(usize),
    #[error("unknown factor id `{0}`")]
    UnknownFactor(String),
    #[error("unknown immersion id `{0}`")]
    UnknownImmersion(String),
    #[error("bad parameter syntax `{0}`")]
    BadParams(String),
    #[error("immersion `{id}` needs ambient n={expected}, space has n={actual}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        actual: usize,
    },
}

/// The standard Sasakian structure on R^(2n+1) with coordinates
/// (x^1..x^n, y^1..y^n, z):
///
/// - `eta = 1/2 (dz - sum_i y^i dx^i)`, `xi = 2 d_z`,
/// - `g = eta (x) eta + 1/4 sum_i ((dx^i)^2 + (dy^i)^2)`,
/// - `phi(d_{x^i}) = -d_{y^i}`, `phi(d_{y^i}) = d_{x^i} + y^i d_z`,
///   `phi(d_z) = 0`.
///
/// The phi sign block is the one that makes the Sasakian defect vanish; it is
/// pinned by the `model_is_sasakian` oracle test and printed in the
/// conventions fingerprint. This model has phi-sectional curvature -3.
pub fn sasakian_model(n: usize) -> Result<AlmostContactStructure, CatalogError> {
    if !(1..=3).contains(&n) {
        return Err(CatalogError::UnsupportedModel(n));
    }
    let dim = 2 * n + 1;
    let domain = vec![[-2.0, 2.0]; dim];

    let metric = MatrixField::new(dim, move |coords| {
        let quarter = coords[0].scale(0.0).add_scalar(0.25);
        let zero = coords[0].scale(0.0);
        let mut g = vec![vec![zero.clone(); dim]; dim];
        for i in 0..n {
            let yi = &coords[n + i];
            for j in 0..n {
                let yj = &coords[n + j];
                // x-x block: 1/4 (delta_ij + y^i y^j)
                g[i][j] = (yi * yj).scale(0.25);
                if i == j {
                    g[i][j] = &g[i][j] + &quarter;
                }
            }
            // x-z block: -y^i / 4
            let gxz = yi.scale(-0.25);
            g[i][2 * n] = gxz.clone();
            g[2 * n][i] = gxz;
            // y-y block: 1/4 delta
            g[n + i][n + i] = quarter.clone();
        }
        g[2 * n][2 * n] = quarter;
        g
    });

    let phi = MatrixField::new(dim, move |coords| {
        let zero = coords[0].scale(0.0);
        let one = zero.add_scalar(1.0);
        let mut m = vec![vec![zero.clone(); dim]; dim];
        for i in 0..n {
            // phi(d_x^i) = -d_y^i
            m[n + i][i] = -&one;
            // phi(d_y^i) = d_x^i + y^i d_z
            m[i][n + i] = one.clone();
            m[2 * n][n + i] = coords[n + i].clone();
        }
        m
    });

    let xi = VectorField::new(dim, move |coords| {
        let zero = coords[0].scale(0.0);
        let mut v = vec![zero.clone(); dim];
        v[2 * n] = zero.add_scalar(2.0);
        v
    });

    let eta = OneFormField::new(dim, move |coords| {
        let zero = coords[0].scale(0.0);
        let mut e = vec![zero.clone(); dim];
        for i in 0..n {
            e[i] = coords[n + i].scale(-0.5);
        }
        e[2 * n] = zero.add_scalar(0.5);
        e
    });

    Ok(AlmostContactStructure::new(
        MetricChart::new(dim, domain, metric),
        phi,
        xi,
        eta,
    ))
}

/// Copy of a structure with `phi` multiplied by a constant; used for fault
/// injection (any scale != 1 breaks the structure identities detectably).
pub fn scale_phi(acs: &AlmostContactStructure, scale: f64) -> AlmostContactStructure {
    let phi = acs.phi().clone();
    let dim = acs.dim();
    let scaled = MatrixField::new(dim, move |coords| {
        phi.eval(coords)
            .into_iter()
            .map(|row| row.into_iter().map(|j| j.scale(scale)).collect())
            .collect()
    });
    AlmostContactStructure::new(acs.chart().clone(), scaled, acs.xi().clone(), acs.eta().clone())
}

/// Copy of a structure with `eps * dz (x) dz` added to the metric: a
/// perturbation off the conformal class, used for fault injection.
pub fn perturb_metric(acs: &AlmostContactStructure, eps: f64) -> AlmostContactStructure {
    let metric = acs.chart().metric().clone();
    let dim = acs.dim();
    let perturbed = MatrixField::new(dim, move |coords| {
        let mut g = metric.eval(coords);
        g[dim - 1][dim - 1] = g[dim - 1][dim - 1].add_scalar(eps);
        g
    });
    AlmostContactStructure::new(
        MetricChart::new(dim, acs.chart().domain().to_vec(), perturbed),
        acs.phi().clone(),
        acs.xi().clone(),
        acs.eta().clone(),
    )
}

/// Conformal exponent families. `LinearCoord` generalizes `LinearZ` to an
/// arbitrary coordinate; the catalog uses it to aim the Lee vector at or away
/// from specific submanifolds.
#[derive(Clone, Debug, PartialEq)]
pub enum ConformalFactor {
    Const { c: f64 },
    LinearZ { a: f64 },
    LinearCoord { index: usize, a: f64 },
    Quad { c: f64 },
}

impl ConformalFactor {
    pub fn field(&self) -> ScalarField {
        match *self {
            ConformalFactor::Const { c } => ScalarField::constant(c),
            ConformalFactor::LinearZ { a } => ScalarField::new(move |coords| {
                coords[coords.len() - 1].scale(a)
            }),
            ConformalFactor::LinearCoord { index, a } => {
                ScalarField::new(move |coords| coords[index].scale(a))
            }
            ConformalFactor::Quad { c } => ScalarField::new(move |coords| {
                let mut acc = coords[0].scale(0.0);
                for x in coords {
                    acc = &acc + &(x * x);
                }
                acc.scale(c)
            }),
        }
    }

    pub fn id(&self) -> String {
        match *self {
            ConformalFactor::Const { c } => format!("const:c={c}"),
            ConformalFactor::LinearZ { a } => format!("linear_z:a={a}"),
            ConformalFactor::LinearCoord { index, a } => {
                format!("linear_coord:i={index},a={a}")
            }
            ConformalFactor::Quad { c } => format!("quad:c={c}"),
        }
    }

    /// Parses `name` or `name:key=v,key=v` (e.g. `linear_z:a=0.3`).
    pub fn parse(s: &str) -> Result<Self, CatalogError> {
        let (name, params) = split_spec(s);
        let get = |key: &str, default: f64| -> Result<f64, CatalogError> {
            lookup(&params, key)
                .map(|v| v.parse::<f64>().map_err(|_| CatalogError::BadParams(s.into())))
                .unwrap_or(Ok(default))
        };
        match name {
            "const" => Ok(ConformalFactor::Const { c: get("c", 0.0)? }),
            "linear_z" => Ok(ConformalFactor::LinearZ { a: get("a", 0.3)? }),
            "linear_coord" => {
                let index = lookup(&params, "i")
                    .ok_or_else(|| CatalogError::BadParams(s.into()))?
                    .parse::<usize>()
                    .map_err(|_| CatalogError::BadParams(s.into()))?;
                Ok(ConformalFactor::LinearCoord {
                    index,
                    a: get("a", 0.3)?,
                })
            }
            "quad" => Ok(ConformalFactor::Quad { c: get("c", 0.1)? }),
            _ => Err(CatalogError::UnknownFactor(s.into())),
        }
    }
}

/// Builds a conformal Sasakian space over the standard model (tilde-first).
pub fn conformal_space(
    n: usize,
    factor: &ConformalFactor,
) -> Result<ConformalSasakianSpace, CatalogError> {
    let model = sasakian_model(n)?;
    Ok(ConformalSasakianSpace::from_sasakian(model, factor.field()))
}

/// Advertised classification of a catalog immersion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclaredClass {
    Invariant,
    AntiInvariant,
    Cr,
    Identity,
}

/// A catalog immersion together with its declared classification, the ambient
/// model parameter it requires, and (for CR entries) its distribution spec.
#[derive(Clone)]
pub struct CatalogImmersion {
    pub id: String,
    pub ambient_n: usize,
    pub class: DeclaredClass,
    pub xi_tangent: bool,
    pub immersion: Immersion,
    pub cr: Option<CrDistributions>,
    pub doc: &'static str,
}

/// Coordinate inclusion dropping the ambient coordinates not listed in
/// `keep`: source coordinate `s_j` maps to ambient coordinate `keep[j]`,
/// all others are zero.
fn coordinate_inclusion(ambient_dim: usize, keep: Vec<usize>, domain: Vec<[f64; 2]>) -> Immersion {
    let m = keep.len();
    Immersion::new(m, ambient_dim, domain, move |coords| {
        let zero = coords[0].scale(0.0);
        let mut out = vec![zero; ambient_dim];
        for (j, &amb) in keep.iter().enumerate() {
            out[amb] = coords[j].clone();
        }
        out
    })
}

/// Builds a catalog immersion by id.
///
/// Constructions (ambient coordinates (x^1..x^n, y^1..y^n, z)):
/// - `invariant_k_in_n`: inclusion of (x^1..x^k, y^1..y^k, z); invariant,
///   xi tangent.
/// - `anti_xaxis_r3`: the x-axis in R^3; anti-invariant, xi normal (on the
///   image y=0 the axis is orthogonal to both phi(d_x) = -d_y and xi).
/// - `anti_y0_plane_r3`: the (x,z)-plane in R^3; anti-invariant, xi tangent.
/// - `anti_surface_r5`: the (x^1,x^2)-plane in R^5; anti-invariant, xi
///   normal, codimension 3.
/// - `cr_r5`: (x^1, y^1, x^2, z) in R^5; CR with D = span(dx^1, dy^1, xi)
///   and D-perp = span(dx^2), codimension 1.
/// - `cr_r7`: (x^1, y^1, x^2, x^3, z) in R^7; CR with
///   D-perp = span(dx^2, dx^3), codimension 2.
/// - `identity_n`: the ambient space immersed in itself.
pub fn immersion_catalog(id: &str, n: usize) -> Result<CatalogImmersion, CatalogError> {
    let (name, params) = split_spec(id);
    let dim = 2 * n + 1;
    let model_domain = vec![[-2.0, 2.0]; dim];
    let simple = |m: usize| vec![[-2.0, 2.0]; m];

    match name {
        "invariant_k_in_n" | "invariant_1_in_2" => {
            let k = if name == "invariant_1_in_2" {
                1
            } else {
                lookup(&params, "k")
                    .ok_or_else(|| CatalogError::BadParams(id.into()))?
                    .parse::<usize>()
                    .map_err(|_| CatalogError::BadParams(id.into()))?
            };
            if name == "invariant_1_in_2" && n != 2 {
                return Err(CatalogError::DimensionMismatch {
                    id: id.into(),
                    expected: 2,
                    actual: n,
                });
            }
            if k >= n {
                return Err(CatalogError::BadParams(format!(
                    "invariant_k_in_n needs k < n, got k={k}, n={n}"
                )));
            }
            // keep x^1..x^k, y^1..y^k, z
            let mut keep: Vec<usize> = (0..k).collect();
            keep.extend(n..n + k);
            keep.push(2 * n);
            Ok(CatalogImmersion {
                id: id.into(),
                ambient_n: n,
                class: DeclaredClass::Invariant,
                xi_tangent: true,
                immersion: coordinate_inclusion(dim, keep, simple(2 * k + 1)),
                cr: None,
                doc: "coordinate inclusion of a lower Sasakian block; phi-invariant, xi tangent",
            })
        }
        "anti_xaxis_r3" => {
            expect_n(id, n, 1)?;
            Ok(CatalogImmersion {
                id: id.into(),
                ambient_n: 1,
                class: DeclaredClass::AntiInvariant,
                xi_tangent: false,
                immersion: coordinate_inclusion(3, vec![0], simple(1)),
                cr: None,
                doc: "x-axis in R^3: phi(d_x) = -d_y is normal, xi = 2 d_z is normal",
            })
        }
        "anti_y0_plane_r3" => {
            expect_n(id, n, 1)?;
            Ok(CatalogImmersion {
                id: id.into(),
                ambient_n: 1,
                class: DeclaredClass::AntiInvariant,
                xi_tangent: true,
                immersion: coordinate_inclusion(3, vec![0, 2], simple(2)),
                cr: None,
                doc: "(x,z)-plane in R^3: phi(d_x) = -d_y is normal, xi tangent",
            })
        }
        "anti_surface_r5" => {
            expect_n(id, n, 2)?;
            Ok(CatalogImmersion {
                id: id.into(),
                ambient_n: 2,
                class: DeclaredClass::AntiInvariant,
                xi_tangent: false,
                immersion: coordinate_inclusion(5, vec![0, 1], simple(2)),
                cr: None,
                doc: "(x^1,x^2)-plane in R^5: phi maps both tangents to normal y-directions, xi normal",
            })
        }
        "cr_r5" => {
            expect_n(id, n, 2)?;
            // source coords -> ambient (x^1, y^1, x^2, z)
            let keep = vec![0, 2, 1, 4];
            let m = keep.len();
            Ok(CatalogImmersion {
                id: id.into(),
                ambient_n: 2,
                class: DeclaredClass::Cr,
                xi_tangent: true,
                immersion: coordinate_inclusion(5, keep, simple(m)),
                cr: Some(CrDistributions {
                    d_span: vec![
                        source_basis(m, 0),
                        source_basis(m, 1),
                        source_basis(m, 3),
                    ],
                    d_perp_span: vec![source_basis(m, 2)],
                }),
                doc: "invariant (x^1,y^1,z)-block times the anti-invariant x^2 direction in R^5",
            })
        }
        "cr_r7" => {
            expect_n(id, n, 3)?;
            // source coords -> ambient (x^1, y^1, x^2, x^3, z)
            let keep = vec![0, 3, 1, 2, 6];
            let m = keep.len();
            Ok(CatalogImmersion {
                id: id.into(),
                ambient_n: 3,
                class: DeclaredClass::Cr,
                xi_tangent: true,
                immersion: coordinate_inclusion(7, keep, simple(m)),
                cr: Some(CrDistributions {
                    d_span: vec![
                        source_basis(m, 0),
                        source_basis(m, 1),
                        source_basis(m, 4),
                    ],
                    d_perp_span: vec![source_basis(m, 2), source_basis(m, 3)],
                }),
                doc: "invariant (x^1,y^1,z)-block times the anti-invariant (x^2,x^3) directions in R^7",
            })
        }
        "identity" => Ok(CatalogImmersion {
            id: id.into(),
            ambient_n: n,
            class: DeclaredClass::Identity,
            xi_tangent: true,
            immersion: coordinate_inclusion(dim, (0..dim).collect(), model_domain),
            cr: None,
            doc: "the ambient space immersed in itself; h vanishes identically",
        }),
        _ => Err(CatalogError::UnknownImmersion(id.into())),
    }
}

/// All catalog immersion ids (with the ambient n each requires).
pub fn catalog_ids() -> Vec<(&'static str, usize)> {
    vec![
        ("invariant_1_in_2", 2),
        ("anti_xaxis_r3", 1),
        ("anti_y0_plane_r3", 1),
        ("anti_surface_r5", 2),
        ("cr_r5", 2),
        ("cr_r7", 3),
        ("identity", 0), // any n
    ]
}

fn expect_n(id: &str, actual: usize, expected: usize) -> Result<(), CatalogError> {
    if actual != expected {
        return Err(CatalogError::DimensionMismatch {
            id: id.into(),
            expected,
            actual,
        });
    }
    Ok(())
}

fn source_basis(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}

fn split_spec(s: &str) -> (&str, Vec<(&str, &str)>) {
    match s.split_once(':') {
        None => (s, Vec::new()),
        Some((name, rest)) => {
            let params = rest
                .split(',')
                .filter_map(|kv| kv.split_once('='))
                .collect();
            (name, params)
        }
    }
}

fn lookup<'a>(params: &[(&'a str, &'a str)], key: &str) -> Option<&'a str> {
    params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}
