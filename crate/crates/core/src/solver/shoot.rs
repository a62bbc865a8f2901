//! One-parameter shooting onto boundary or critical ends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::profile::Profile;

use super::endpoint::{EndpointClass, EndpointKind, ReachedBy};
use super::integrate::{integrate, IntegrateOptions};
use super::IvpState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShootTarget {
    Boundary,
    CriticalMin,
    CriticalMax,
}

impl ShootTarget {
    fn kind(self) -> EndpointKind {
        match self {
            ShootTarget::Boundary => EndpointKind::Boundary,
            ShootTarget::CriticalMin => EndpointKind::CriticalMin,
            ShootTarget::CriticalMax => EndpointKind::CriticalMax,
        }
    }
}

/// Initial datum varied by the shooting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeParam {
    U0,
    Du0,
    F0,
    Df0,
    /// `f''` at a critical starting point.
    Ddf0,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingProblem {
    pub params: SpaceParams,
    pub target: ShootTarget,
    pub free: FreeParam,
    /// Initial data; the free component is overwritten.
    pub fixed: IvpState,
    pub bracket: (f64, f64),
    /// +1 to integrate toward larger `t`, -1 toward smaller.
    pub direction: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub options: IntegrateOptions,
}

#[derive(Debug, Clone)]
pub struct ShootResult {
    pub initial: IvpState,
    pub free_value: f64,
    pub ddf0: Option<f64>,
    pub iterations: usize,
    pub mismatch: f64,
    pub endpoint: EndpointClass,
    pub profile: Profile,
}

impl ShootingProblem {
    fn setup(&self, value: f64) -> (IvpState, IntegrateOptions) {
        let mut s = self.fixed;
        let mut opts = self.options.clone();
        match self.free {
            FreeParam::U0 => s.u = value,
            FreeParam::Du0 => s.du = value,
            FreeParam::F0 => s.f = value,
            FreeParam::Df0 => s.df = value,
            FreeParam::Ddf0 => opts.ddf0 = Some(value),
        }
        (s, opts)
    }

    fn span(&self) -> (f64, f64) {
        let t0 = self.fixed.t;
        if self.direction > 0.0 {
            (t0, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, t0)
        }
    }

    fn run(&self, value: f64, final_run: bool) -> Result<Profile> {
        let (s, mut opts) = self.setup(value);
        opts.stop_on_du = false;
        opts.stop_on_df = self.target != ShootTarget::Boundary;
        if !final_run {
            opts.grid = super::OutputGrid::Uniform(2);
        }
        integrate(&s, &self.params, self.span(), &opts)
    }

    fn far_end<'a>(&self, p: &'a Profile) -> &'a EndpointClass {
        if self.direction > 0.0 {
            &p.right_end
        } else {
            &p.left_end
        }
    }

    /// Scalar mismatch, zero exactly when the target end is hit.
    ///
    /// For a boundary target it is `-dir * u'` at the end, or `-dir` times
    /// the `u'` mismatch against the regular series when the end was landed
    /// on, so it is positive when the warping function collapses first and
    /// negative when it turns around. For a critical target it is `u` where
    /// `f'` vanishes if that happens first, else `dir` times the `u'`
    /// mismatch where `u` vanishes, or `-|f'|` there when no regular series
    /// matches.
    fn mismatch(&self, value: f64) -> Result<f64> {
        let dir = self.direction;
        let critical = self.target != ShootTarget::Boundary;
        let last = match self.run(value, false) {
            Ok(p) => {
                let end = self.far_end(&p);
                let d = &end.diagnostics;
                return Ok(match (critical, end.reached_by) {
                    (false, ReachedBy::Landing { mismatch: Some(m), .. }) => -dir * m,
                    (false, _) => -dir * d.du,
                    (true, ReachedBy::Event(_)) => d.u,
                    (true, ReachedBy::Landing { mismatch: Some(m), .. }) => dir * m,
                    (true, _) => -d.df.abs(),
                });
            }
            Err(Error::StepUnderflow { last }) | Err(Error::Blowup { last }) => last,
            Err(e) => return Err(e),
        };
        Ok(if critical { -last.df.abs() } else { -dir * last.du })
    }
}

/// Finds the free datum in the bracket for which the integration ends on
/// the target kind of endpoint.
pub fn shoot(problem: &ShootingProblem) -> Result<ShootResult> {
    problem.params.validate()?;
    let (mut a, mut b) = problem.bracket;
    if problem.direction != 1.0 && problem.direction != -1.0 {
        return Err(Error::InvalidParams(format!("direction must be 1 or -1, got {}", problem.direction)));
    }
    if !(problem.tol > 0.0) || problem.max_iter == 0 {
        return Err(Error::InvalidParams("shooting needs tol > 0 and max_iter >= 1".into()));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParams(format!("bracket [{a}, {b}] must be finite with lo < hi")));
    }
    let mut fa = problem.mismatch(a)?;
    let mut fb = problem.mismatch(b)?;
    if !(fa * fb <= 0.0) {
        return Err(Error::BracketNoStraddle { lo: a, hi: b, phi_lo: fa, phi_hi: fb });
    }
    let mut iterations = 0;
    let (mut best, mut best_phi) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    let mut side = 0i8;
    let target_phi = 1e-3 * problem.tol;
    while best_phi.abs() > target_phi && (b - a).abs() > problem.tol * (1.0 + best.abs()) {
        if iterations >= problem.max_iter {
            let (initial, _) = problem.setup(best);
            return Err(Error::MaxIterations { iterations, best: initial, mismatch: best_phi });
        }
        iterations += 1;
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !c.is_finite() || (c - a) * (c - b) >= 0.0 {
            c = 0.5 * (a + b);
        }
        let fc = problem.mismatch(c)?;
        if fc.abs() < best_phi.abs() {
            best = c;
            best_phi = fc;
        }
        if fc == 0.0 {
            break;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            side = 0;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let profile = problem.run(best, true)?;
    let endpoint = problem.far_end(&profile).clone();
    if endpoint.kind != problem.target.kind() {
        return Err(Error::TargetMissed(format!(
            "converged data end on {} instead of {}",
            endpoint.kind.as_str(),
            problem.target.kind().as_str()
        )));
    }
    let (initial, opts) = problem.setup(best);
    Ok(ShootResult { initial, free_value: best, ddf0: opts.ddf0, iterations, mismatch: best_phi, endpoint, profile })
}
