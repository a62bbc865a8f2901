//! Residuals of the reduced Einstein system on a warped-product profile.
//!
//! With `b = m u'/u`, `c = λ - [(n-2)(k - u'²) - u u'']/u²` and
//! `a = ((n-1) u''/u + λ)/m` the system reads
//!
//! ```text
//! f' b + f c = 0        (tangential condition)
//! f'' + a f  = 0        (radial condition)
//! P(u, u', u'', u''') = 0   (compatibility, u only)
//! ```
//!
//! and at a boundary point (`f = 0`) additionally `f'' = u' = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{require_u, PointState, SpaceParams};
use crate::interp::Quintic;
use crate::profile::Profile;
use crate::quadrature::adaptive_simpson;

/// Default tolerance for treating `f` or `u` as zero at a profile end.
pub const ENDPOINT_ZERO_TOL: f64 = 1e-9;

/// Local absolute error target of the quadrature in [`f_from_u`].
pub const QUADRATURE_TOL: f64 = 1e-12;

/// The coefficient functions of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn coeff_abc(s: &PointState, p: &SpaceParams) -> Result<AbcCoefficients> {
    require_u(s)?;
    let (n, m) = (p.nf(), p.mf());
    let a = (n - 1.0) / m * s.ddu / s.u + p.lambda / m;
    let b = m * s.du / s.u;
    let c = p.lambda - ((n - 2.0) * p.k - (n - 2.0) * s.du * s.du - s.u * s.ddu) / (s.u * s.u);
    Ok(AbcCoefficients { a, b, c })
}

/// Tangential residual `f' b + f c`.
pub fn residual_second(s: &PointState, p: &SpaceParams) -> Result<f64> {
    let abc = coeff_abc(s, p)?;
    Ok(s.df * abc.b + s.f * abc.c)
}

/// Radial residual `f'' + a f`.
pub fn residual_first(s: &PointState, p: &SpaceParams) -> Result<f64> {
    let abc = coeff_abc(s, p)?;
    Ok(s.ddf + abc.a * s.f)
}

/// The eleven monomials of the compatibility polynomial; their sum is the
/// residual and the sum of their magnitudes is its natural scale.
pub fn compat_terms(u: f64, du: f64, ddu: f64, dddu: f64, p: &SpaceParams) -> [f64; 11] {
    let (d, m, l, k) = (p.nf() - 2.0, p.mf(), p.lambda, p.k);
    let (u2, du2) = (u * u, du * du);
    [
        l * l * u2 * u2,
        -2.0 * d * k * l * u2,
        2.0 * d * l * u2 * du2,
        (2.0 + m) * l * u2 * u * ddu,
        d * d * k * k,
        -(2.0 * d + m) * d * k * du2,
        -(2.0 + m) * d * k * u * ddu,
        d * (m + d) * du2 * du2,
        (2.0 * d + m) * u * du2 * ddu,
        (1.0 + m) * u2 * ddu * ddu,
        -m * u2 * du * dddu,
    ]
}

/// Compatibility residual: the numerator of `-a + (c/b)' - (c/b)²` after
/// multiplying by `m² u² u'²` and changing sign.
pub fn residual_compat(s: &PointState, p: &SpaceParams) -> Result<f64> {
    require_u(s)?;
    if !s.dddu.is_finite() {
        return Err(Error::MalformedProfile(format!("u''' missing at t = {}", s.t)));
    }
    Ok(compat_terms(s.u, s.du, s.ddu, s.dddu, p).iter().sum())
}

/// Boundary residual `|f''| + |u'|`, defined where `f = 0`.
pub fn residual_boundary(s: &PointState) -> Result<f64> {
    residual_boundary_with_tol(s, ENDPOINT_ZERO_TOL)
}

pub fn residual_boundary_with_tol(s: &PointState, f_tol: f64) -> Result<f64> {
    if !(s.f.abs() <= f_tol) {
        return Err(Error::NotBoundary { t: s.t, f: s.f });
    }
    Ok(s.ddf.abs() + s.du.abs())
}

/// Per-node weight `max(1, |λ| u², |f''|)` for the first and second residuals.
pub fn node_weight(s: &PointState, p: &SpaceParams) -> f64 {
    1f64.max(p.lambda.abs() * s.u * s.u).max(s.ddf.abs())
}

/// Per-node weight for the compatibility residual: the sum of the monomial
/// magnitudes, floored at 1.
pub fn compat_weight(s: &PointState, p: &SpaceParams) -> f64 {
    1f64.max(compat_terms(s.u, s.du, s.ddu, s.dddu, p).iter().map(|t| t.abs()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Sup-norm residuals of a profile. `*_norm` fields are the normalized
/// values the verdict is based on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub tolerance: f64,
    pub grid_size: usize,
    pub evaluated_nodes: usize,
    pub r_second: f64,
    pub r_compat: f64,
    pub r_first: f64,
    pub r_second_norm: f64,
    pub r_compat_norm: f64,
    pub r_first_norm: f64,
    pub r_boundary: Option<f64>,
    /// Smallest `|f'|` over boundary ends; must be nonzero.
    pub boundary_gradient: Option<f64>,
    /// Ends skipped because `u` vanishes there.
    pub degenerate_ends: Vec<String>,
    pub f_positive: bool,
    /// Derivative columns reconstructed by finite differences.
    pub filled_columns: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy)]
struct NodeResiduals {
    second: f64,
    compat: f64,
    first: f64,
    second_n: f64,
    compat_n: f64,
    first_n: f64,
}

fn sup(acc: f64, x: f64) -> f64 {
    if acc.is_nan() || x.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

fn node_residuals(s: &PointState, p: &SpaceParams) -> Result<NodeResiduals> {
    if !(s.u > 0.0) {
        return Err(Error::MalformedProfile(format!("u = {} is not positive at interior node t = {}", s.u, s.t)));
    }
    let second = residual_second(s, p)?.abs();
    let compat = residual_compat(s, p)?.abs();
    let first = residual_first(s, p)?.abs();
    let w = node_weight(s, p);
    Ok(NodeResiduals {
        second,
        compat,
        first,
        second_n: second / w,
        compat_n: compat / compat_weight(s, p),
        first_n: first / w,
    })
}

/// Evaluates all residuals on the profile grid.
///
/// End nodes with `|f| <= ENDPOINT_ZERO_TOL` are checked with the boundary
/// residual; end nodes with `|u| <= ENDPOINT_ZERO_TOL` are critical points
/// where the quotient residuals are undefined and are skipped.
pub fn verify(profile: &Profile, tol: f64) -> Result<ResidualReport> {
    if profile.states.is_empty() {
        return Err(Error::MalformedProfile("empty grid".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let p = &profile.params;
    let len = profile.states.len();
    let mut r_boundary: Option<f64> = None;
    let mut boundary_gradient: Option<f64> = None;
    let mut degenerate_ends = Vec::new();
    let mut interior = Vec::with_capacity(len);
    for (i, s) in profile.states.iter().enumerate() {
        let is_end = i == 0 || i + 1 == len;
        let side = if i == 0 { "left" } else { "right" };
        if is_end && s.f.abs() <= ENDPOINT_ZERO_TOL {
            let r = residual_boundary(s)?;
            r_boundary = Some(sup(r_boundary.unwrap_or(0.0), r));
            boundary_gradient = Some(boundary_gradient.map_or(s.df.abs(), |g: f64| g.min(s.df.abs())));
        } else if is_end && s.u.abs() <= ENDPOINT_ZERO_TOL {
            degenerate_ends.push(side.to_string());
        } else {
            interior.push(s);
        }
    }
    let per_node: Vec<NodeResiduals> = interior
        .par_iter()
        .map(|s| node_residuals(s, p))
        .collect::<Result<_>>()?;
    let zero = NodeResiduals { second: 0.0, compat: 0.0, first: 0.0, second_n: 0.0, compat_n: 0.0, first_n: 0.0 };
    let acc = per_node.iter().fold(zero, |a, r| NodeResiduals {
        second: sup(a.second, r.second),
        compat: sup(a.compat, r.compat),
        first: sup(a.first, r.first),
        second_n: sup(a.second_n, r.second_n),
        compat_n: sup(a.compat_n, r.compat_n),
        first_n: sup(a.first_n, r.first_n),
    });
    let pass = acc.second_n <= tol
        && acc.compat_n <= tol
        && acc.first_n <= tol
        && r_boundary.is_none_or(|r| r <= tol);
    Ok(ResidualReport {
        tolerance: tol,
        grid_size: len,
        evaluated_nodes: per_node.len(),
        r_second: acc.second,
        r_compat: acc.compat,
        r_first: acc.first,
        r_second_norm: acc.second_n,
        r_compat_norm: acc.compat_n,
        r_first_norm: acc.first_n,
        r_boundary,
        boundary_gradient,
        degenerate_ends,
        f_positive: interior.iter().all(|s| s.f > 0.0),
        filled_columns: profile.filled.clone(),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })
}

/// Outcome of [`f_from_u`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub profile: Profile,
    /// Intervals where adaptive quadrature did not converge and the
    /// trapezoid rule on the node values was used instead.
    pub trapezoid_intervals: usize,
}

fn c_over_b(u: f64, du: f64, ddu: f64, p: &SpaceParams) -> f64 {
    let (n, m) = (p.nf(), p.mf());
    let c = p.lambda - ((n - 2.0) * (p.k - du * du) - u * ddu) / (u * u);
    c / (m * du / u)
}

/// Rebuilds `f` from the warping function alone via
/// `f(t) = f(t_0) exp(-∫ c/b)`, then sets `f' = -(c/b) f` and `f'' = -a f`.
///
/// Between nodes `u` is represented by the quintic Hermite interpolant of
/// `(u, u', u'')`; the integral over each interval uses adaptive Simpson
/// with local tolerance [`QUADRATURE_TOL`].
pub fn f_from_u(u_profile: &Profile, f0: f64) -> Result<Reconstruction> {
    if !(f0 > 0.0) {
        return Err(Error::InvalidParams("f0 must be positive".into()));
    }
    let p = u_profile.params;
    let states = &u_profile.states;
    if states.is_empty() {
        return Err(Error::MalformedProfile("empty grid".into()));
    }
    for (i, s) in states.iter().enumerate() {
        require_u(s)?;
        if s.du.abs() <= f64::EPSILON * s.u.abs().max(1.0) {
            return Err(Error::SingularQuadrature { t: s.t });
        }
        if i > 0 && states[i - 1].du.signum() != s.du.signum() {
            return Err(Error::SingularQuadrature { t: s.t });
        }
    }
    let mut out = states.clone();
    let mut integral = 0.0;
    let mut fallbacks = 0;
    for i in 0..states.len() {
        if i > 0 {
            let (s0, s1) = (&states[i - 1], &states[i]);
            let q = Quintic::new(s0.t, s1.t, [s0.u, s0.du, s0.ddu], [s1.u, s1.du, s1.ddu]);
            let g = |t: f64| {
                let v = q.eval(t);
                c_over_b(v[0], v[1], v[2], &p)
            };
            let r = adaptive_simpson(&g, s0.t, s1.t, QUADRATURE_TOL, 30);
            integral += if r.converged && r.value.is_finite() {
                r.value
            } else {
                fallbacks += 1;
                0.5 * (s1.t - s0.t) * (c_over_b(s0.u, s0.du, s0.ddu, &p) + c_over_b(s1.u, s1.du, s1.ddu, &p))
            };
        }
        let s = &mut out[i];
        let f = f0 * (-integral).exp();
        let abc = coeff_abc(s, &p)?;
        s.f = f;
        s.df = -abc.c / abc.b * f;
        s.ddf = -abc.a * f;
    }
    let mut profile = u_profile.clone();
    profile.states = out;
    profile.dense = None;
    Ok(Reconstruction { profile, trapezoid_intervals: fallbacks })
}
