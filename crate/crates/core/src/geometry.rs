//! Pointwise curvature of `g = dt² + u²(t) g_N` with an Einstein fiber
//! `Ric_N = k (n-2) g_N`, and the Hessian of a radial potential `f(t)`.
//!
//! Note the two different "normalized" scalars: `k` belongs to the fiber,
//! while `rho` in [`EigenData`] is `((n-1)λ - Scal)/(m-1)` on the base.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for eigenvalue gaps and O-membership.
pub const DEFAULT_GAP_TOL: f64 = 1e-9;

/// Default relative tolerance when comparing the two Hessian eigenvalue routes.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-8;

/// Scalar problem data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    /// Dimension of the manifold, at least 2.
    pub n: u32,
    /// The `m` of the `(λ, n+m)`-Einstein equation, at least 2.
    pub m: u32,
    /// Einstein constant.
    pub lambda: f64,
    /// Normalized scalar curvature of the fiber.
    pub k: f64,
}

impl SpaceParams {
    pub fn new(n: u32, m: u32, lambda: f64, k: f64) -> Result<Self> {
        let p = SpaceParams { n, m, lambda, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("n = {} must be at least 2", self.n)));
        }
        if self.m < 2 {
            return Err(Error::InvalidParams(format!("m = {} must be at least 2", self.m)));
        }
        if !self.lambda.is_finite() || !self.k.is_finite() {
            return Err(Error::InvalidParams("lambda and k must be finite".into()));
        }
        Ok(())
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn mf(&self) -> f64 {
        self.m as f64
    }

    /// Sectional curvature `λ/(n+m-1)` of the Einstein model space with this λ.
    pub fn kbar(&self) -> f64 {
        self.lambda / (self.nf() + self.mf() - 1.0)
    }
}

/// Values of `u`, `f` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointState {
    pub t: f64,
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
    pub dddu: f64,
    pub f: f64,
    pub df: f64,
    pub ddf: f64,
}

/// Ricci, Schouten and Hessian eigenvalues at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenData {
    pub gamma1: f64,
    pub gamma2: f64,
    pub scal: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub p1: f64,
    pub p2: f64,
    /// Hessian eigenvalues from the derivatives of f.
    pub mu1: f64,
    pub mu2: f64,
    /// Hessian eigenvalues from `(f/m)(σ_i + Scal/(2(n-1)) - λ)`.
    pub mu1_schouten: f64,
    pub mu2_schouten: f64,
    pub in_o: bool,
}

pub(crate) fn require_u(s: &PointState) -> Result<()> {
    if s.u == 0.0 || !s.u.is_finite() {
        return Err(Error::DivisionByZero { quantity: "u", t: s.t });
    }
    Ok(())
}

/// Radial Ricci eigenvalue `-(n-1) u''/u`.
pub fn ricci_radial(s: &PointState, p: &SpaceParams) -> Result<f64> {
    require_u(s)?;
    Ok(-(p.nf() - 1.0) * s.ddu / s.u)
}

/// Tangential Ricci eigenvalue `[(n-2)(k - u'²) - u u'']/u²`.
pub fn ricci_tangential(s: &PointState, p: &SpaceParams) -> Result<f64> {
    require_u(s)?;
    Ok(((p.nf() - 2.0) * (p.k - s.du * s.du) - s.u * s.ddu) / (s.u * s.u))
}

/// Hessian eigenvalues `(f'', f' u'/u)`.
pub fn hess_components(s: &PointState) -> Result<(f64, f64)> {
    require_u(s)?;
    Ok((s.ddf, s.df * s.du / s.u))
}

/// `Δf = f'' + (n-1)(u'/u) f'`.
pub fn laplacian_f(s: &PointState, p: &SpaceParams) -> Result<f64> {
    require_u(s)?;
    Ok(s.ddf + (p.nf() - 1.0) * s.du / s.u * s.df)
}

/// The fiber Einstein constant `μ = f Δf + (m-1) f'² + λ f²`.
pub fn mu_invariant(s: &PointState, p: &SpaceParams) -> Result<f64> {
    let lap = laplacian_f(s, p)?;
    Ok(s.f * lap + (p.mf() - 1.0) * s.df * s.df + p.lambda * s.f * s.f)
}

/// Full eigenvalue data with the default consistency tolerance.
pub fn eigen_data(s: &PointState, p: &SpaceParams, gap_tol: f64) -> Result<EigenData> {
    eigen_data_with(s, p, gap_tol, DEFAULT_CONSISTENCY_TOL)
}

/// Full eigenvalue data. Fails with [`Error::Inconsistent`] when the two
/// routes to the Hessian eigenvalues disagree by more than `consistency_tol`
/// relative to the size of the terms involved.
pub fn eigen_data_with(
    s: &PointState,
    p: &SpaceParams,
    gap_tol: f64,
    consistency_tol: f64,
) -> Result<EigenData> {
    if !(gap_tol > 0.0) {
        return Err(Error::InvalidParams("gap_tol must be positive".into()));
    }
    let (n, m) = (p.nf(), p.mf());
    let gamma1 = ricci_radial(s, p)?;
    let gamma2 = ricci_tangential(s, p)?;
    let scal = gamma1 + (n - 1.0) * gamma2;
    let shift = scal / (2.0 * (n - 1.0));
    let sigma1 = gamma1 - shift;
    let sigma2 = gamma2 - shift;
    let rho = ((n - 1.0) * p.lambda - scal) / (m - 1.0);
    let (mu1, mu2) = hess_components(s)?;
    let mu1_schouten = s.f / m * (sigma1 + shift - p.lambda);
    let mu2_schouten = s.f / m * (sigma2 + shift - p.lambda);

    for (i, (d, e, g)) in [(mu1, mu1_schouten, gamma1), (mu2, mu2_schouten, gamma2)]
        .into_iter()
        .enumerate()
    {
        let scale = 1f64
            .max(d.abs())
            .max((s.f / m).abs() * g.abs().max(p.lambda.abs()));
        if (d - e).abs() > consistency_tol * scale {
            return Err(Error::Inconsistent {
                t: s.t,
                detail: format!("Hessian eigenvalue {} is {d} directly but {e} from curvature", i + 1),
            });
        }
    }

    let gap_scale = 1f64.max(sigma1.abs()).max(sigma2.abs());
    let in_o = s.df.abs() > gap_tol && (sigma1 - sigma2).abs() > gap_tol * gap_scale;
    Ok(EigenData {
        gamma1,
        gamma2,
        scal,
        sigma1,
        sigma2,
        rho,
        p1: gamma1 - rho,
        p2: gamma2 - rho,
        mu1,
        mu2,
        mu1_schouten,
        mu2_schouten,
        in_o,
    })
}

/// Radial and tangential components of `Ric + Hess φ - dφ⊗dφ/m - λ g` for
/// `φ = -m log f`. Both vanish exactly when the Einstein equation holds.
pub fn bakry_emery_defect(s: &PointState, p: &SpaceParams) -> Result<(f64, f64)> {
    if !(s.f > 0.0) {
        return Err(Error::DivisionByZero { quantity: "f", t: s.t });
    }
    let m = p.mf();
    let gamma1 = ricci_radial(s, p)?;
    let gamma2 = ricci_tangential(s, p)?;
    let g = s.df / s.f;
    let dphi = -m * g;
    let ddphi = -m * (s.ddf / s.f - g * g);
    let radial = gamma1 + ddphi - dphi * dphi / m - p.lambda;
    let tangential = gamma2 + s.du / s.u * dphi - p.lambda;
    Ok((radial, tangential))
}
