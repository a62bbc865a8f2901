//! Closed-form solutions used as ground truth.
//!
//! Every family has `λ = (n+m-1)·k̄` and warping function scaled by
//! `√|k|/√|k̄|` so that `u'² = k` wherever `u` vanishes. The tabulated
//! warping factors `√k̄ sin²(√k̄ t)` and `√(-k̄) cosh²(√(-k̄) t)` are kept as
//! text next to the resolved forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{eigen_data, mu_invariant, PointState, SpaceParams, DEFAULT_GAP_TOL};
use crate::profile::Profile;
use crate::solver::{EndpointClass, EndpointDiagnostics, EndpointKind, ReachedBy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Zero,
    Negative,
}

impl Sign {
    pub fn of(x: f64, tol: f64) -> Sign {
        if x > tol {
            Sign::Positive
        } else if x < -tol {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Zero => "0",
            Sign::Negative => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    SphericalCap,
    FlatRay,
    HyperbolicBoundary,
    ExpWarped,
    ExpEinstein,
    HyperbolicSpace,
}

/// Closed-form shape of `u` or `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Sin,
    Cos,
    Constant,
    Linear,
    Cosh,
    Sinh,
    Exp,
}

pub const FAMILY_NAMES: [&str; 6] =
    ["spherical-cap", "flat-ray", "hyperbolic-boundary", "exp-warped", "exp-einstein", "hyperbolic-space"];

impl FamilyKind {
    pub fn from_name(name: &str) -> Result<FamilyKind> {
        Ok(match name {
            "spherical-cap" | "sphere" => FamilyKind::SphericalCap,
            "flat-ray" => FamilyKind::FlatRay,
            "hyperbolic-boundary" => FamilyKind::HyperbolicBoundary,
            "exp-warped" => FamilyKind::ExpWarped,
            "exp-einstein" => FamilyKind::ExpEinstein,
            "hyperbolic-space" => FamilyKind::HyperbolicSpace,
            _ => return Err(Error::UnknownFamily(name.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::SphericalCap => "spherical-cap",
            FamilyKind::FlatRay => "flat-ray",
            FamilyKind::HyperbolicBoundary => "hyperbolic-boundary",
            FamilyKind::ExpWarped => "exp-warped",
            FamilyKind::ExpEinstein => "exp-einstein",
            FamilyKind::HyperbolicSpace => "hyperbolic-space",
        }
    }

    /// `(λ sign, μ sign)`.
    pub fn cell(self) -> (Sign, Sign) {
        use Sign::*;
        match self {
            FamilyKind::SphericalCap => (Positive, Positive),
            FamilyKind::FlatRay => (Zero, Positive),
            FamilyKind::HyperbolicBoundary => (Negative, Positive),
            FamilyKind::ExpWarped | FamilyKind::ExpEinstein => (Negative, Zero),
            FamilyKind::HyperbolicSpace => (Negative, Negative),
        }
    }

    fn forms(self) -> (Form, Form) {
        match self {
            FamilyKind::SphericalCap => (Form::Sin, Form::Cos),
            FamilyKind::FlatRay => (Form::Constant, Form::Linear),
            FamilyKind::HyperbolicBoundary => (Form::Cosh, Form::Sinh),
            FamilyKind::ExpWarped | FamilyKind::ExpEinstein => (Form::Exp, Form::Exp),
            FamilyKind::HyperbolicSpace => (Form::Sinh, Form::Cosh),
        }
    }

    fn tabulated(self) -> (&'static str, &'static str) {
        match self {
            FamilyKind::SphericalCap => ("g = dt² + √k̄ sin²(√k̄ t) g_S", "f(t) = C cos(√k̄ t)"),
            FamilyKind::FlatRay => ("g = dt² + g_F", "f(t) = C t"),
            FamilyKind::HyperbolicBoundary => ("g = dt² + √(-k̄) cosh²(√(-k̄) t) g_N", "f(t) = C sinh(√(-k̄) t)"),
            FamilyKind::ExpWarped => ("g = dt² + e^(2√(-k̄) t) g_F", "f(t) = C e^(√(-k̄) t)"),
            FamilyKind::ExpEinstein => ("g = dt² + e^(2t) g_F, λ = 1-n-m, k = 0", "f(t) = a e^t"),
            FamilyKind::HyperbolicSpace => ("g = dt² + √(-k̄) sinh²(√(-k̄) t) g_S", "f(t) = C cosh(√(-k̄) t)"),
        }
    }

    fn resolved(self) -> (&'static str, &'static str) {
        match self {
            FamilyKind::SphericalCap => ("u(t) = √k sin(√k̄ t)/√k̄", "f(t) = C cos(√k̄ t)"),
            FamilyKind::FlatRay => ("u(t) = 1", "f(t) = C t"),
            FamilyKind::HyperbolicBoundary => ("u(t) = √(-k) cosh(√(-k̄) t)/√(-k̄)", "f(t) = C sinh(√(-k̄) t)"),
            FamilyKind::ExpWarped => ("u(t) = e^(√(-k̄) t)", "f(t) = C e^(√(-k̄) t)"),
            FamilyKind::ExpEinstein => ("u(t) = e^t", "f(t) = a e^t"),
            FamilyKind::HyperbolicSpace => ("u(t) = √k sinh(√(-k̄) t)/√(-k̄)", "f(t) = C cosh(√(-k̄) t)"),
        }
    }
}

/// Free constants; unset ones take the family default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Constants {
    /// Amplitude `C` (or `a`) of the potential.
    pub c: Option<f64>,
    pub kbar: Option<f64>,
    /// Fiber curvature `k`.
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Domain {
    pub fn contains(&self, t: f64) -> bool {
        let lo_ok = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let hi_ok = if self.hi_closed { t <= self.hi } else { t < self.hi };
        lo_ok && hi_ok && t.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormText {
    pub metric: String,
    pub potential: String,
}

/// A family with all constants resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormFamily {
    pub name: String,
    pub kind: FamilyKind,
    pub params: SpaceParams,
    pub c: f64,
    pub kbar: f64,
    pub u_form: Form,
    pub f_form: Form,
    pub tabulated: FormText,
    pub resolved: FormText,
    pub domain: Domain,
    /// Interior zeros of `f` (boundary slices of the region where `f > 0`).
    pub f_zeros: Vec<f64>,
    pub expected_mu: f64,
    pub expected_mu_sign: Sign,
    pub expected_endpoints: [EndpointKind; 2],
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(what.to_string()))
    }
}

/// Resolves a family for dimensions `n, m` and the given constants.
pub fn instantiate(name: &str, n: u32, m: u32, constants: &Constants) -> Result<ClosedFormFamily> {
    use FamilyKind::*;
    let kind = FamilyKind::from_name(name)?;
    let c = constants.c.unwrap_or(1.0);
    check(c > 0.0 && c.is_finite(), "C must be positive")?;
    let (kbar_default, k_default) = match kind {
        SphericalCap => (1.0, 1.0),
        FlatRay => (0.0, 0.0),
        HyperbolicBoundary => (-1.0, -1.0),
        ExpWarped | ExpEinstein => (-1.0, 0.0),
        HyperbolicSpace => (-1.0, 1.0),
    };
    let kbar = constants.kbar.unwrap_or(kbar_default);
    let k = constants.k.unwrap_or(k_default);
    check(kbar.is_finite() && k.is_finite(), "constants must be finite")?;
    match kind {
        SphericalCap => {
            check(kbar > 0.0, "the λ > 0 row needs k̄ > 0")?;
            check(k > 0.0, "the spherical fiber needs k > 0")?;
        }
        FlatRay => {
            check(kbar == 0.0, "the λ = 0 row has k̄ = 0")?;
            check(k == 0.0, "the Ricci-flat fiber has k = 0")?;
        }
        HyperbolicBoundary => {
            check(kbar < 0.0, "the λ < 0 rows need k̄ < 0")?;
            check(k < 0.0, "the negative Einstein fiber needs k < 0")?;
        }
        ExpWarped => {
            check(kbar < 0.0, "the λ < 0 rows need k̄ < 0")?;
            check(k == 0.0, "the Ricci-flat fiber has k = 0")?;
        }
        ExpEinstein => {
            check(kbar == -1.0, "this family has λ = 1-n-m, so k̄ = -1")?;
            check(k == 0.0, "the Ricci-flat fiber has k = 0")?;
        }
        HyperbolicSpace => {
            check(kbar < 0.0, "the λ < 0 rows need k̄ < 0")?;
            check(k > 0.0, "the spherical fiber needs k > 0")?;
        }
    }
    let lambda = (n + m - 1) as f64 * kbar;
    let params = SpaceParams::new(n, m, lambda, k)?;
    let kappa = kbar.abs().sqrt();
    let mf = m as f64 - 1.0;
    let inf = f64::INFINITY;
    let (domain, f_zeros, expected_mu, ends) = match kind {
        SphericalCap => (
            Domain { lo: 0.0, hi: std::f64::consts::PI / kappa, lo_closed: false, hi_closed: false },
            vec![std::f64::consts::FRAC_PI_2 / kappa],
            mf * c * c * kappa * kappa,
            [EndpointKind::CriticalMax, EndpointKind::CriticalMin],
        ),
        FlatRay => (
            Domain { lo: 0.0, hi: inf, lo_closed: true, hi_closed: false },
            vec![],
            mf * c * c,
            [EndpointKind::Boundary, EndpointKind::Infinite],
        ),
        HyperbolicBoundary => (
            Domain { lo: 0.0, hi: inf, lo_closed: true, hi_closed: false },
            vec![],
            mf * c * c * kappa * kappa,
            [EndpointKind::Boundary, EndpointKind::Infinite],
        ),
        ExpWarped | ExpEinstein => (
            Domain { lo: -inf, hi: inf, lo_closed: false, hi_closed: false },
            vec![],
            0.0,
            [EndpointKind::Infinite, EndpointKind::Infinite],
        ),
        HyperbolicSpace => (
            Domain { lo: 0.0, hi: inf, lo_closed: false, hi_closed: false },
            vec![],
            -mf * c * c * kappa * kappa,
            [EndpointKind::CriticalMin, EndpointKind::Infinite],
        ),
    };
    let (u_form, f_form) = kind.forms();
    let (tm, tp) = kind.tabulated();
    let (rm, rp) = kind.resolved();
    Ok(ClosedFormFamily {
        name: kind.name().to_string(),
        kind,
        params,
        c,
        kbar,
        u_form,
        f_form,
        tabulated: FormText { metric: tm.into(), potential: tp.into() },
        resolved: FormText { metric: rm.into(), potential: rp.into() },
        domain,
        f_zeros,
        expected_mu,
        expected_mu_sign: kind.cell().1,
        expected_endpoints: ends,
    })
}

/// Agreement of the Ricci eigenvalues with `ρ = λ - m k̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoCheck {
    pub expected: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub agrees: bool,
}

impl ClosedFormFamily {
    fn kappa(&self) -> f64 {
        self.kbar.abs().sqrt()
    }

    /// Exact state at `t`.
    pub fn state(&self, t: f64) -> PointState {
        let kp = self.kappa();
        let c = self.c;
        let x = kp * t;
        let amp = if kp > 0.0 { self.params.k.abs().sqrt() / kp } else { 1.0 };
        let (u, du, ddu, dddu) = match self.u_form {
            Form::Sin => (amp * x.sin(), amp * kp * x.cos(), -amp * kp * kp * x.sin(), -amp * kp.powi(3) * x.cos()),
            Form::Cosh => (amp * x.cosh(), amp * kp * x.sinh(), amp * kp * kp * x.cosh(), amp * kp.powi(3) * x.sinh()),
            Form::Sinh => (amp * x.sinh(), amp * kp * x.cosh(), amp * kp * kp * x.sinh(), amp * kp.powi(3) * x.cosh()),
            Form::Exp => {
                let e = x.exp();
                (e, kp * e, kp * kp * e, kp.powi(3) * e)
            }
            Form::Constant | Form::Linear | Form::Cos => (1.0, 0.0, 0.0, 0.0),
        };
        let (f, df, ddf) = match self.f_form {
            Form::Cos => (c * x.cos(), -c * kp * x.sin(), -c * kp * kp * x.cos()),
            Form::Sinh => (c * x.sinh(), c * kp * x.cosh(), c * kp * kp * x.sinh()),
            Form::Cosh => (c * x.cosh(), c * kp * x.sinh(), c * kp * kp * x.cosh()),
            Form::Exp => {
                let e = x.exp();
                (c * e, c * kp * e, c * kp * kp * e)
            }
            Form::Linear => (c * t, c, 0.0),
            Form::Constant | Form::Sin => (c, 0.0, 0.0),
        };
        PointState { t, u, du, ddu, dddu, f, df, ddf }
    }

    /// Sampling interval: the domain with infinite ends cut off.
    pub fn default_range(&self) -> (f64, f64) {
        let lo = if self.domain.lo.is_finite() { self.domain.lo } else { -2.0 };
        let hi = if self.domain.hi.is_finite() { self.domain.hi } else { lo.max(0.0) + 3.0 };
        (lo, hi)
    }

    /// `nodes` evenly spaced points strictly inside the default range.
    pub fn interior_grid(&self, nodes: usize) -> Vec<f64> {
        let (a, b) = self.default_range();
        (1..=nodes).map(|i| a + (b - a) * i as f64 / (nodes + 1) as f64).collect()
    }

    /// Exact profile on `grid`. An end of the grid is labeled with the
    /// family's endpoint when no more than one grid spacing separates it
    /// from the domain end.
    pub fn sample(&self, grid: &[f64]) -> Result<Profile> {
        if grid.is_empty() {
            return Err(Error::GridOutsideDomain("empty grid".into()));
        }
        if let Some(t) = grid.iter().find(|t| !self.domain.contains(**t)) {
            return Err(Error::GridOutsideDomain(format!(
                "t = {t} outside the domain ({}, {}) of {}",
                self.domain.lo, self.domain.hi, self.name
            )));
        }
        let states: Vec<PointState> = grid.iter().map(|&t| self.state(t)).collect();
        let mut profile = Profile::new(self.params, states)?;
        let spacing = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let label = |t_grid: f64, t_dom: f64, kind: EndpointKind| -> EndpointClass {
            let s = self.state(t_grid);
            let diagnostics = EndpointDiagnostics { f: s.f, df: s.df, u: s.u, du: s.du, ddf: s.ddf, ..Default::default() };
            if kind == EndpointKind::Infinite {
                return EndpointClass {
                    kind,
                    t_end: None,
                    reached_by: ReachedBy::Unknown,
                    diagnostics: EndpointDiagnostics { note: Some("closed form continues without end".into()), ..diagnostics },
                };
            }
            if (t_grid - t_dom).abs() <= spacing || t_grid == t_dom {
                EndpointClass { kind, t_end: Some(t_dom), reached_by: ReachedBy::Unknown, diagnostics }
            } else {
                EndpointClass {
                    kind: EndpointKind::Stopped,
                    t_end: Some(t_grid),
                    reached_by: ReachedBy::Unknown,
                    diagnostics: EndpointDiagnostics { note: Some("sample ends inside the domain".into()), ..diagnostics },
                }
            }
        };
        profile.left_end = label(grid[0], self.domain.lo, self.expected_endpoints[0]);
        profile.right_end = label(grid[grid.len() - 1], self.domain.hi, self.expected_endpoints[1]);
        profile.crossings = self.f_zeros.iter().copied().filter(|z| *z > grid[0] && *z < grid[grid.len() - 1]).collect();
        Ok(profile)
    }

    /// `μ` at `t`, computed from the exact state.
    pub fn requested_mu(&self, t: f64) -> Result<f64> {
        mu_invariant(&self.state(t), &self.params)
    }

    /// Compares both Ricci eigenvalues at `t` with `λ - m k̄`.
    pub fn rho_check(&self, t: f64, tol: f64) -> Result<RhoCheck> {
        let e = eigen_data(&self.state(t), &self.params, DEFAULT_GAP_TOL)?;
        let expected = self.params.lambda - self.params.mf() * self.kbar;
        let scale = 1.0 + expected.abs();
        let agrees = (e.gamma1 - expected).abs() <= tol * scale && (e.gamma2 - expected).abs() <= tol * scale;
        Ok(RhoCheck { expected, gamma1: e.gamma1, gamma2: e.gamma2, agrees })
    }
}

/// One cell of the `(μ sign) × (λ sign)` classification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lambda_sign: Sign,
    pub mu_sign: Sign,
    pub family: Option<String>,
    pub model: Option<String>,
}

/// The nine cells, rows `μ > 0, μ = 0, μ < 0`, columns `λ > 0, λ = 0, λ < 0`.
pub fn cells() -> Vec<Cell> {
    use Sign::*;
    let mut out = Vec::with_capacity(9);
    for mu in [Positive, Zero, Negative] {
        for lambda in [Positive, Zero, Negative] {
            let hit = lookup_cell(lambda, mu).ok();
            let model = hit.map(|k| {
                match k {
                    FamilyKind::SphericalCap => "D^n",
                    FamilyKind::FlatRay => "[0,∞) × F",
                    FamilyKind::HyperbolicBoundary => "[0,∞) × N",
                    FamilyKind::ExpWarped | FamilyKind::ExpEinstein => "(-∞,∞) × F",
                    FamilyKind::HyperbolicSpace => "H^n",
                }
                .to_string()
            });
            out.push(Cell { lambda_sign: lambda, mu_sign: mu, family: hit.map(|k| k.name().to_string()), model });
        }
    }
    out
}

/// Family occupying a table cell.
pub fn lookup_cell(lambda: Sign, mu: Sign) -> Result<FamilyKind> {
    use Sign::*;
    match (lambda, mu) {
        (Positive, Positive) => Ok(FamilyKind::SphericalCap),
        (Zero, Positive) => Ok(FamilyKind::FlatRay),
        (Negative, Positive) => Ok(FamilyKind::HyperbolicBoundary),
        (Negative, Zero) => Ok(FamilyKind::ExpWarped),
        (Negative, Negative) => Ok(FamilyKind::HyperbolicSpace),
        _ => Err(Error::ConstraintViolation(format!(
            "no solution with λ {} 0 and μ {} 0",
            rel(lambda),
            rel(mu)
        ))),
    }
}

fn rel(s: Sign) -> &'static str {
    match s {
        Sign::Positive => ">",
        Sign::Zero => "=",
        Sign::Negative => "<",
    }
}

/// Every family with default constants for the given dimensions.
pub fn all(n: u32, m: u32) -> Result<Vec<ClosedFormFamily>> {
    FAMILY_NAMES.iter().map(|name| instantiate(name, n, m, &Constants::default())).collect()
}
