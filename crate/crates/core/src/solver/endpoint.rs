//! Classification of interval ends and the oddness test at critical points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointState, SpaceParams};
use crate::interp::fd_weights;
use crate::profile::Profile;

use super::dense::Piece;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    Boundary,
    CriticalMin,
    CriticalMax,
    Infinite,
    Stopped,
}

impl EndpointKind {
    pub fn is_critical(self) -> bool {
        matches!(self, EndpointKind::CriticalMin | EndpointKind::CriticalMax)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EndpointKind::Boundary => "boundary",
            EndpointKind::CriticalMin => "critical_min",
            EndpointKind::CriticalMax => "critical_max",
            EndpointKind::Infinite => "infinite",
            EndpointKind::Stopped => "stopped",
        }
    }
}

/// The quantity whose zero ended an extrapolated approach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vanishing {
    F,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    DfZero,
    DuZero,
}

/// How an end of a profile came about.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReachedBy {
    /// Integration started at this singular point.
    Start,
    /// A finite span end.
    Span,
    /// The horizon standing in for an infinite span end.
    Horizon,
    /// A sign change of `f'` or `u'` at a regular point.
    Event(EventKind),
    /// Landing on a zero of `f` or `u`, with the zeros of `f`, `u` and `f'`
    /// found on the landing piece. `mismatch` is the difference in `u'`
    /// between the trajectory and the matched regular series at the handoff
    /// point; it is absent when the end was extrapolated instead.
    Landing { on: Vanishing, t_f: Option<f64>, t_u: Option<f64>, t_df: Option<f64>, mismatch: Option<f64> },
    /// Not known (profiles read from files).
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EndpointDiagnostics {
    pub f: f64,
    pub df: f64,
    pub u: f64,
    pub du: f64,
    /// `f''` deciding minimum against maximum.
    pub ddf: f64,
    /// `(order, estimate)` of even derivatives of `u` at critical ends.
    pub u_even: Vec<(u32, f64)>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointClass {
    pub kind: EndpointKind,
    /// `None` for an unbounded end.
    pub t_end: Option<f64>,
    pub reached_by: ReachedBy,
    pub diagnostics: EndpointDiagnostics,
}

impl EndpointClass {
    pub fn unclassified(t: f64) -> Self {
        EndpointClass {
            kind: EndpointKind::Stopped,
            t_end: Some(t),
            reached_by: ReachedBy::Unknown,
            diagnostics: EndpointDiagnostics { note: Some("not classified".into()), ..Default::default() },
        }
    }
}

/// Fate of the radial geodesic, following the four completeness cases for
/// manifolds with boundary. A critical end is a pole the geodesic passes
/// through, so it continues along the profile from the other end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialCompleteness {
    /// `[a, ∞)` with `γ(a)` on the boundary.
    BoundaryToInfinity,
    /// `(-∞, b]` with `γ(b)` on the boundary.
    InfinityToBoundary,
    /// `[a, b]` with both ends on the boundary.
    BoundaryToBoundary,
    /// Defined on all of ℝ without meeting the boundary.
    Complete,
    /// Some end is neither boundary, pole nor infinite.
    Incomplete,
}

impl RadialCompleteness {
    pub fn from_ends(left: EndpointKind, right: EndpointKind) -> Self {
        use EndpointKind::*;
        let reflect = |own: EndpointKind, other: EndpointKind| if own.is_critical() { other } else { own };
        let (l, r) = (reflect(left, right), reflect(right, left));
        match (l, r) {
            (a, b) if a.is_critical() && b.is_critical() => RadialCompleteness::Complete,
            (Boundary, Infinite) => RadialCompleteness::BoundaryToInfinity,
            (Infinite, Boundary) => RadialCompleteness::InfinityToBoundary,
            (Boundary, Boundary) => RadialCompleteness::BoundaryToBoundary,
            (Infinite, Infinite) => RadialCompleteness::Complete,
            _ => RadialCompleteness::Incomplete,
        }
    }

    /// Case number 1-4, if complete.
    pub fn case(self) -> Option<u8> {
        match self {
            RadialCompleteness::BoundaryToInfinity => Some(1),
            RadialCompleteness::InfinityToBoundary => Some(2),
            RadialCompleteness::BoundaryToBoundary => Some(3),
            RadialCompleteness::Complete => Some(4),
            RadialCompleteness::Incomplete => None,
        }
    }
}

fn try_classify(s: &PointState, reached: ReachedBy, ddf: f64, tol: f64) -> Result<(EndpointKind, Option<String>)> {
    use EndpointKind::*;
    match reached {
        ReachedBy::Horizon => return Ok((Infinite, None)),
        ReachedBy::Span => return Ok((Stopped, Some("span end reached".into()))),
        ReachedBy::Event(EventKind::DfZero) => {
            return Ok((Stopped, Some("f' vanishes where u > 0".into())));
        }
        ReachedBy::Event(EventKind::DuZero) => return Ok((Stopped, Some("u' vanishes at a regular point".into()))),
        ReachedBy::Landing { mismatch: Some(m), .. } if !(m.abs() <= tol) => {
            return Ok((Stopped, Some(format!("trajectory is singular at the end (u' mismatch {m:e})"))));
        }
        _ => {}
    }
    let (f0, df0, u0) = (s.f.abs() <= tol, s.df.abs() <= tol, s.u.abs() <= tol);
    if f0 && df0 {
        return Err(Error::AmbiguousEndpoint { t: s.t });
    }
    if f0 {
        return Ok((Boundary, None));
    }
    if df0 && u0 {
        if !(s.du.abs() > tol) {
            return Ok((Stopped, Some("u and u' both vanish".into())));
        }
        return Ok(match ddf.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => (CriticalMin, None),
            Some(std::cmp::Ordering::Less) => (CriticalMax, None),
            _ => (Stopped, Some("f'' vanishes at the critical point".into())),
        });
    }
    let note = if u0 {
        format!("u vanishes but f' = {:e} does not", s.df)
    } else if df0 {
        format!("f' vanishes but u = {:e} does not", s.u)
    } else {
        "no vanishing quantity".to_string()
    };
    Ok((Stopped, Some(note)))
}

fn build(s: &PointState, reached: ReachedBy, ddf: f64, kind: EndpointKind, note: Option<String>) -> EndpointClass {
    EndpointClass {
        kind,
        t_end: if kind == EndpointKind::Infinite { None } else { Some(s.t) },
        reached_by: reached,
        diagnostics: EndpointDiagnostics { f: s.f, df: s.df, u: s.u, du: s.du, ddf, u_even: Vec::new(), note },
    }
}

/// Classification used during integration; ambiguous ends become `Stopped`.
pub(crate) fn classify_state(
    s: &PointState,
    reached: ReachedBy,
    _unbounded: bool,
    last_ddf: f64,
    _side: Side,
    _p: &SpaceParams,
    tol: f64,
) -> EndpointClass {
    match try_classify(s, reached, last_ddf, tol) {
        Ok((kind, note)) => build(s, reached, last_ddf, kind, note),
        Err(e) => build(s, reached, last_ddf, EndpointKind::Stopped, Some(e.to_string())),
    }
}

/// Classifies one end of a profile from its end node and the recorded way
/// the end was reached.
pub fn classify_endpoint(profile: &Profile, which: Side, tol: f64) -> Result<EndpointClass> {
    let len = profile.states.len();
    if len == 0 {
        return Err(Error::MalformedProfile("empty grid".into()));
    }
    let (idx, inner, prior) = match which {
        Side::Left => (0, 1.min(len - 1), &profile.left_end),
        Side::Right => (len - 1, len.saturating_sub(2), &profile.right_end),
    };
    let s = profile.states[idx];
    let reached = prior.reached_by;
    let ddf = match reached {
        ReachedBy::Landing { .. } => prior.diagnostics.ddf,
        _ if s.ddf.is_finite() && s.ddf != 0.0 => s.ddf,
        _ => profile.states[inner].ddf,
    };
    let (kind, note) = try_classify(&s, reached, ddf, tol)?;
    let mut c = build(&s, reached, ddf, kind, note);
    if kind.is_critical() {
        if let Ok(r) = oddness_check(profile, s.t, &[0, 2, 4], tol) {
            c.diagnostics.u_even = r.estimates.iter().map(|e| (e.order, e.value)).collect();
        }
    }
    Ok(c)
}

/// One derivative estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub order: u32,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddnessReport {
    pub t0: f64,
    pub estimates: Vec<DerivativeEstimate>,
    pub du: DerivativeEstimate,
    /// `u'² - k`; checked only for `n ≥ 3` and `k > 0`.
    pub du2_minus_k: f64,
    pub pass: bool,
}

const STENCIL: usize = 9;

/// Estimates derivatives of `u` at the end `t0` of the profile.
///
/// An end landed on with a power series reads them off its coefficients.
/// Otherwise one-sided stencils are used, Richardson-extrapolated from
/// spacings `h` and `h/2` on the dense output (or plain stencils on the grid
/// when there is none).
pub fn oddness_check(profile: &Profile, t0: f64, orders: &[u32], tol: f64) -> Result<OddnessReport> {
    let len = profile.states.len();
    if len < 2 {
        return Err(Error::MalformedProfile("profile too short".into()));
    }
    let (a, b) = (profile.states[0].t, profile.states[len - 1].t);
    let scale = 1e-9 * (1.0 + a.abs().max(b.abs()));
    let dir = if (t0 - a).abs() <= scale {
        1.0
    } else if (t0 - b).abs() <= scale {
        -1.0
    } else {
        return Err(Error::InvalidParams(format!("t0 = {t0} is not an end of the profile")));
    };

    let end_series = profile.dense.as_ref().and_then(|d| {
        d.pieces.iter().find_map(|pc| match pc {
            Piece::Series { series, .. } if (series.t0 - t0).abs() <= scale => Some(series),
            _ => None,
        })
    });
    let estimate = |q: u32| -> Result<DerivativeEstimate> {
        if let Some(series) = end_series {
            let c = series.u.get(q as usize).copied().unwrap_or(0.0);
            let fact: f64 = (1..=q).map(f64::from).product();
            return Ok(DerivativeEstimate { order: q, value: fact * c, error: 0.0 });
        }
        if let Some(d) = &profile.dense {
            let piece_len = d
                .pieces
                .iter()
                .map(|pc| pc.bounds())
                .find(|(lo, hi)| (*lo - t0).abs() <= scale || (*hi - t0).abs() <= scale)
                .map(|(lo, hi)| hi - lo)
                .unwrap_or(b - a);
            let big = piece_len.min((b - a) * 0.25).min(0.2);
            let sample = |h: f64| -> Option<f64> {
                let xs: Vec<f64> = (0..STENCIL).map(|j| j as f64 * h).collect();
                let w = fd_weights(0.0, &xs, q as usize);
                let mut acc = 0.0;
                for (j, x) in xs.iter().enumerate() {
                    let t = if j == 0 { t0 } else { t0 + dir * x };
                    acc += w[q as usize][j] * d.state(t)?.u;
                }
                Some(acc * dir.powi(q as i32))
            };
            let h1 = big / (STENCIL - 1) as f64;
            let (d1, d2) = match (sample(h1), sample(0.5 * h1)) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(Error::InsufficientResolution("dense output does not cover the stencil".into())),
            };
            let p = (STENCIL as i32 - q as i32).max(1);
            let r = (2f64.powi(p) * d2 - d1) / (2f64.powi(p) - 1.0);
            Ok(DerivativeEstimate { order: q, value: r, error: (d2 - d1).abs() / (2f64.powi(p) - 1.0) })
        } else {
            let take = STENCIL.min(len);
            if take <= q as usize + 1 {
                return Err(Error::InsufficientResolution(format!("{len} nodes cannot resolve order {q}")));
            }
            let nodes: Vec<&PointState> = if dir > 0.0 {
                profile.states[..take].iter().collect()
            } else {
                profile.states[len - take..].iter().rev().collect()
            };
            let est = |n: usize| {
                let xs: Vec<f64> = nodes[..n].iter().map(|s| s.t).collect();
                let w = fd_weights(t0, &xs, q as usize);
                nodes[..n].iter().zip(&w[q as usize]).map(|(s, wj)| wj * s.u).sum::<f64>()
            };
            let full = est(take);
            let less = est(take - 1);
            Ok(DerivativeEstimate { order: q, value: full, error: (full - less).abs() })
        }
    };

    let mut estimates = Vec::with_capacity(orders.len());
    for &q in orders {
        let e = estimate(q)?;
        if e.error > tol {
            return Err(Error::InsufficientResolution(format!(
                "derivative of order {q} only resolved to {:e}",
                e.error
            )));
        }
        estimates.push(e);
    }
    let du = estimate(1)?;
    let p = &profile.params;
    let du2_minus_k = du.value * du.value - p.k;
    let k_ok = !(p.n >= 3 && p.k > 0.0) || du2_minus_k.abs() <= tol;
    let pass = estimates.iter().all(|e| e.value.abs() <= tol) && du.value.abs() > tol && k_ok;
    Ok(OddnessReport { t0, estimates, du, du2_minus_k, pass })
}

/// Stores even-derivative estimates on critical ends of an integrated profile.
pub(crate) fn fill_oddness(profile: &mut Profile) {
    let tol = 1e-3;
    for side in [Side::Left, Side::Right] {
        let end = match side {
            Side::Left => &profile.left_end,
            Side::Right => &profile.right_end,
        };
        if !end.kind.is_critical() {
            continue;
        }
        let Some(t) = end.t_end else { continue };
        let result = oddness_check(profile, t, &[0, 2, 4], tol);
        let end = match side {
            Side::Left => &mut profile.left_end,
            Side::Right => &mut profile.right_end,
        };
        match result {
            Ok(r) => end.diagnostics.u_even = r.estimates.iter().map(|e| (e.order, e.value)).collect(),
            Err(e) => end.diagnostics.note = Some(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpaceParams;

    fn sphere(a: f64, b: f64, nodes: usize) -> Profile {
        let p = SpaceParams::new(3, 2, 4.0, 1.0).unwrap();
        let states = (0..nodes)
            .map(|i| {
                let t = a + (b - a) * i as f64 / (nodes - 1) as f64;
                PointState { t, u: t.sin(), du: t.cos(), ddu: -t.sin(), dddu: -t.cos(), f: t.cos(), df: -t.sin(), ddf: -t.cos() }
            })
            .collect();
        Profile::new(p, states).unwrap()
    }

    #[test]
    fn classifies_grid_ends() {
        let prof = sphere(0.0, std::f64::consts::FRAC_PI_2, 201);
        let left = classify_endpoint(&prof, Side::Left, 1e-9).unwrap();
        assert_eq!(left.kind, EndpointKind::CriticalMax);
        assert!(left.diagnostics.u_even.iter().all(|(_, v)| v.abs() < 1e-6));
        let right = classify_endpoint(&prof, Side::Right, 1e-9).unwrap();
        assert_eq!(right.kind, EndpointKind::Boundary);

        let inner = sphere(0.2, 1.0, 50);
        let left = classify_endpoint(&inner, Side::Left, 1e-9).unwrap();
        assert_eq!(left.kind, EndpointKind::Stopped);
        assert!(left.diagnostics.note.is_some());
    }

    #[test]
    fn oddness_by_finite_differences() {
        let prof = sphere(0.0, 1.0, 51);
        let r = oddness_check(&prof, 0.0, &[0, 2, 4], 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.du.value - 1.0).abs() < 1e-6);
        assert!(r.du2_minus_k.abs() < 1e-6);
        assert!(oddness_check(&prof, 0.5, &[0], 1e-6).is_err());
    }

    #[test]
    fn completeness_cases() {
        use EndpointKind::*;
        let c = RadialCompleteness::from_ends;
        assert_eq!(c(Boundary, Infinite).case(), Some(1));
        assert_eq!(c(Infinite, Boundary).case(), Some(2));
        assert_eq!(c(Boundary, Boundary).case(), Some(3));
        assert_eq!(c(CriticalMax, CriticalMin).case(), Some(4));
        assert_eq!(c(CriticalMin, Infinite), RadialCompleteness::Complete);
        assert_eq!(c(CriticalMax, Boundary), RadialCompleteness::BoundaryToBoundary);
        assert_eq!(c(Stopped, Infinite).case(), None);
    }

    #[test]
    fn ambiguous_end_is_an_error() {
        let s = PointState { t: 1.0, u: 1.0, f: 0.0, df: 0.0, ..Default::default() };
        assert!(matches!(try_classify(&s, ReachedBy::Unknown, 0.0, 1e-9), Err(Error::AmbiguousEndpoint { .. })));
        let c = classify_state(&s, ReachedBy::Unknown, false, 0.0, Side::Right, &SpaceParams::new(3, 2, 0.0, 0.0).unwrap(), 1e-9);
        assert_eq!(c.kind, EndpointKind::Stopped);
    }
}
