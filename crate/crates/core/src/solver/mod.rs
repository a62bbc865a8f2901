//! Initial-value integration of the `(u, f)` system, endpoint
//! classification and shooting.
//!
//! The first-order system is the tangential condition solved for `u''`
//! together with the radial condition `f'' = -a f`. It is singular where
//! `f u` vanishes: boundary points (`f = 0`) and critical points of `f`
//! (`u = 0`). Both are regular singular points; the integrator lands on them
//! by extrapolating the trajectory and can start from them with power series.

mod dense;
mod dopri;
mod endpoint;
mod integrate;
mod series;
mod shoot;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointState, SpaceParams};
use crate::residuals::compat_terms;

pub use dense::{DenseOutput, Piece};
pub use endpoint::{
    classify_endpoint, oddness_check, EndpointClass, EndpointDiagnostics, EndpointKind, OddnessReport, RadialCompleteness,
    ReachedBy, Side,
};
pub use integrate::{curvature_length, integrate, IntegrateOptions, OutputGrid};
pub use series::{boundary_series, critical_series, Series};
pub use shoot::{shoot, FreeParam, ShootResult, ShootTarget, ShootingProblem};

/// Smallest `f u` accepted by the right-hand side.
pub const SINGULAR_EPS: f64 = 1e-300;

/// State of the first-order system.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IvpState {
    pub t: f64,
    pub u: f64,
    pub du: f64,
    pub f: f64,
    pub df: f64,
}

impl IvpState {
    pub fn new(t: f64, u: f64, du: f64, f: f64, df: f64) -> Self {
        IvpState { t, u, du, f, df }
    }

    pub(crate) fn y(&self) -> [f64; 4] {
        [self.u, self.du, self.f, self.df]
    }

    pub(crate) fn from_y(t: f64, y: &[f64; 4]) -> Self {
        IvpState { t, u: y[0], du: y[1], f: y[2], df: y[3] }
    }
}

impl From<&PointState> for IvpState {
    fn from(s: &PointState) -> Self {
        IvpState { t: s.t, u: s.u, du: s.du, f: s.f, df: s.df }
    }
}

/// Second and third derivatives along the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub ddu: f64,
    pub dddu: f64,
    pub ddf: f64,
    pub dddf: f64,
}

fn check_regular(s: &IvpState) -> Result<()> {
    let fu = s.f * s.u;
    if !(fu > SINGULAR_EPS) || !(s.u > 0.0) {
        return Err(Error::SingularPoint { t: s.t, fu });
    }
    Ok(())
}

fn second_derivatives(s: &IvpState, p: &SpaceParams) -> (f64, f64) {
    let (n, m) = (p.nf(), p.mf());
    let num = -m * s.df * s.du * s.u - p.lambda * s.f * s.u * s.u + (n - 2.0) * s.f * (p.k - s.du * s.du);
    let ddu = num / (s.f * s.u);
    let a = ((n - 1.0) * ddu / s.u + p.lambda) / m;
    (ddu, -a * s.f)
}

/// `(u', u'', f', f'')` with `u''` from the tangential condition and
/// `f'' = -a f`.
pub fn ivp_rhs(s: &IvpState, p: &SpaceParams) -> Result<[f64; 4]> {
    check_regular(s)?;
    let (ddu, ddf) = second_derivatives(s, p);
    Ok([s.du, ddu, s.df, ddf])
}

/// Analytic second and third derivatives of `u` and `f` along the flow.
pub fn ivp_jet(s: &IvpState, p: &SpaceParams) -> Result<Jet> {
    check_regular(s)?;
    let (n, m) = (p.nf(), p.mf());
    let (u, du, f, df) = (s.u, s.du, s.f, s.df);
    let (ddu, ddf) = second_derivatives(s, p);
    let den = f * u;
    let dnum = -m * (ddf * du * u + df * ddu * u + df * du * du) - p.lambda * (df * u * u + 2.0 * f * u * du)
        + (n - 2.0) * (df * (p.k - du * du) - 2.0 * f * du * ddu);
    let dden = df * u + f * du;
    let dddu = (dnum - ddu * dden) / den;
    let a = ((n - 1.0) * ddu / u + p.lambda) / m;
    let da = (n - 1.0) / m * (dddu * u - ddu * du) / (u * u);
    Ok(Jet { ddu, dddu, ddf, dddf: -da * f - a * df })
}

/// Full point state at a regular point of the flow.
pub fn point_state(s: &IvpState, p: &SpaceParams) -> Result<PointState> {
    let j = ivp_jet(s, p)?;
    Ok(PointState { t: s.t, u: s.u, du: s.du, ddu: j.ddu, dddu: j.dddu, f: s.f, df: s.df, ddf: j.ddf })
}

/// Third-order formulation for cross-checks: state `(u, u', u'', f)`, with
/// `u'''` from the compatibility polynomial and `f' = -(c/b) f`. Singular
/// where `u'` vanishes.
pub fn secondary_rhs(t: f64, y: &[f64; 4], p: &SpaceParams) -> Result<[f64; 4]> {
    let [u, du, ddu, f] = *y;
    if !(u > 0.0) {
        return Err(Error::DivisionByZero { quantity: "u", t });
    }
    if du == 0.0 {
        return Err(Error::DivisionByZero { quantity: "u'", t });
    }
    let m = p.mf();
    let terms = compat_terms(u, du, ddu, 0.0, p);
    let dddu = terms.iter().sum::<f64>() / (m * u * u * du);
    let c = p.lambda - ((p.nf() - 2.0) * (p.k - du * du) - u * ddu) / (u * u);
    let b = m * du / u;
    Ok([du, ddu, dddu, -c / b * f])
}
