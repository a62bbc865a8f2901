//! Adaptive integration with event location and landing on singular ends.

use crate::error::{Error, Result};
use crate::geometry::{PointState, SpaceParams};
use crate::interp::{ChebSeries, Quintic};
use crate::profile::Profile;
use crate::roots::bisect;

use super::dense::{DenseOutput, Piece};
use super::dopri::{factor, step};
use super::endpoint::{classify_state, fill_oddness, EventKind, ReachedBy, Side, Vanishing};
use super::series::{boundary_series, critical_series, Series, DEFAULT_ORDER};
use super::{ivp_jet, ivp_rhs, point_state, IvpState};

/// Where the profile is sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputGrid {
    /// Evenly spaced nodes over the interval actually covered.
    Uniform(usize),
    /// Caller nodes; those outside the covered interval are dropped.
    Points(Vec<f64>),
    /// The accepted step points.
    Steps,
}

/// Integration settings.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    /// Relative and absolute local error target.
    pub tol: f64,
    /// Absolute accuracy in `t` of regular event location.
    pub event_tol: f64,
    /// Distance to a singular end below which the trajectory is matched to
    /// the regular power series there instead of stepped, in units of
    /// [`curvature_length`].
    pub handoff: f64,
    /// Length of the extrapolation window, in units of the handoff distance,
    /// used when no regular series matches.
    pub landing_window: f64,
    /// Degree of the extrapolating polynomials.
    pub landing_degree: usize,
    /// Distance integrated toward an infinite span end.
    pub horizon: f64,
    pub grid: OutputGrid,
    /// Stop where `f'` changes sign at a regular point.
    pub stop_on_df: bool,
    /// Stop where `u'` changes sign at a regular point.
    pub stop_on_du: bool,
    /// Continue through boundary points (where `f` changes sign) instead of
    /// stopping there.
    pub cross_boundary: bool,
    /// `f''` at a critical starting point (`u = 0`), a free datum there.
    pub ddf0: Option<f64>,
    /// Tolerance used to classify the ends.
    pub classify_tol: f64,
    pub max_steps: usize,
    /// Constant step size instead of error control.
    pub fixed_step: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tol: 1e-10,
            event_tol: 1e-12,
            handoff: 0.1,
            landing_window: 4.0,
            landing_degree: 12,
            horizon: 40.0,
            grid: OutputGrid::Uniform(201),
            stop_on_df: true,
            stop_on_du: true,
            cross_boundary: false,
            ddf0: None,
            classify_tol: 1e-6,
            max_steps: 1_000_000,
            fixed_step: None,
        }
    }
}

const LANDING_SAMPLES: usize = 41;

/// Result of extrapolating onto a singular end.
struct Landing {
    piece: Piece,
    end: PointState,
    t_f: Option<f64>,
    t_u: Option<f64>,
    t_df: Option<f64>,
    mismatch: Option<f64>,
    series: Option<Series>,
}

/// One direction of integration.
struct Leg {
    pieces: Vec<Piece>,
    steps: Vec<f64>,
    end: PointState,
    reached: ReachedBy,
    /// `f''` at the last regular state, with the sign of the true potential.
    last_ddf: f64,
    crossings: Vec<f64>,
}

fn history_state(pieces: &[Piece], t: f64, p: &SpaceParams) -> Option<PointState> {
    let piece = pieces.iter().rev().find(|pc| {
        let (lo, hi) = pc.bounds();
        lo <= t && t <= hi
    })?;
    Some(piece.raw_state(t, p))
}

fn approach(y: &[f64; 4], dir: f64) -> (f64, f64) {
    let d_u = if dir * y[1] < 0.0 { y[0] / y[1].abs() } else { f64::INFINITY };
    let d_f = if dir * y[3] < 0.0 { y[2] / y[3].abs() } else { f64::INFINITY };
    (d_f, d_u)
}

fn first_root(fit: &ChebSeries, from: f64, to: f64) -> Option<f64> {
    let n = 60;
    let mut a = from;
    let mut fa = fit.eval(a);
    for i in 1..=n {
        let b = from + (to - from) * i as f64 / n as f64;
        let fb = fit.eval(b);
        if fa == 0.0 {
            return Some(a);
        }
        if fa * fb <= 0.0 {
            return fit.root_in(a, b);
        }
        a = b;
        fa = fb;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn land(
    pieces: &[Piece],
    history_from: f64,
    t_h: f64,
    dir: f64,
    on: Vanishing,
    s_h: f64,
    sign: f64,
    opts: &IntegrateOptions,
    p: &SpaceParams,
) -> Option<Landing> {
    let w = (opts.landing_window * s_h).min((t_h - history_from).abs());
    if w <= 0.0 {
        return None;
    }
    let ta = t_h - dir * w;
    let nodes = ChebSeries::nodes(ta, t_h, LANDING_SAMPLES);
    let mut cols: Vec<Vec<f64>> = (0..7).map(|_| Vec::with_capacity(nodes.len())).collect();
    for &t in &nodes {
        let s = history_state(pieces, t, p)?;
        for (c, v) in cols.iter_mut().zip([s.u, s.du, s.ddu, s.dddu, s.f, s.df, s.ddf]) {
            c.push(v);
        }
    }
    let fits: Vec<ChebSeries> = cols.iter().map(|c| ChebSeries::fit(ta, t_h, c, opts.landing_degree)).collect();
    let fits: Box<[ChebSeries; 7]> = Box::new(fits.try_into().ok()?);
    let reach = t_h + dir * 3.0 * s_h;
    let t_f = first_root(&fits[4], t_h, reach);
    let t_u = first_root(&fits[0], t_h, reach);
    let t_df = first_root(&fits[5], t_h, reach);
    let t_end = match on {
        Vanishing::F => t_f?,
        Vanishing::U => t_u?,
    };
    let raw = |t: f64| PointState {
        t,
        u: fits[0].eval(t),
        du: fits[1].eval(t),
        ddu: fits[2].eval(t),
        dddu: fits[3].eval(t),
        f: sign * fits[4].eval(t),
        df: sign * fits[5].eval(t),
        ddf: sign * fits[6].eval(t),
    };
    let mut end = raw(t_end);
    match on {
        Vanishing::F => end.f = 0.0,
        Vanishing::U => end.u = 0.0,
    }
    Some(Landing { piece: Piece::Landing { t0: t_h, t1: t_end, fits, sign }, end, t_f, t_u, t_df, mismatch: None, series: None })
}

fn solve3(a: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    if !(d.abs() > 0.0) || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (j, xj) in x.iter_mut().enumerate() {
        let mut b = a;
        for i in 0..3 {
            b[i][j] = r[i];
        }
        *xj = det(&b) / d;
    }
    Some(x)
}

/// Fits the regular series at the singular end to `u, f, f'` of the raw
/// state `h` at the handoff point. The leftover difference in `u'` measures
/// the singular part of the trajectory.
fn match_series(h: &PointState, dir: f64, on: Vanishing, d: f64, p: &SpaceParams) -> Option<(Series, f64)> {
    let build = |x: &[f64; 3]| -> Option<Series> {
        match on {
            Vanishing::F => boundary_series(x[0], x[1], x[2], p, DEFAULT_ORDER).ok(),
            Vanishing::U => {
                let du0 = if p.n >= 3 { -dir * p.k.sqrt() } else { h.du };
                critical_series(x[0], x[1], du0, x[2], p, DEFAULT_ORDER).ok()
            }
        }
    };
    if on == Vanishing::U && p.n >= 3 && !(p.k > 0.0) {
        return None;
    }
    let resid = |x: &[f64; 3]| -> Option<[f64; 3]> {
        let s = build(x)?.eval(h.t);
        Some([s.u - h.u, s.f - h.f, s.df - h.df])
    };
    let mut x = match on {
        Vanishing::F => [h.t + dir * d, h.u, h.df],
        Vanishing::U => [h.t + dir * d, h.f, h.ddf],
    };
    let scale = [1.0 + h.t.abs(), 1.0 + x[1].abs(), 1.0 + x[2].abs()];
    let mut r = resid(&x)?;
    for _ in 0..30 {
        let mut jac = [[0.0; 3]; 3];
        for j in 0..3 {
            let e = 1e-7 * scale[j];
            let mut xp = x;
            let mut xm = x;
            xp[j] += e;
            xm[j] -= e;
            let (rp, rm) = (resid(&xp)?, resid(&xm)?);
            for i in 0..3 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * e);
            }
        }
        let dx = solve3(jac, r)?;
        let mut done = true;
        for j in 0..3 {
            x[j] -= dx[j];
            done &= dx[j].abs() <= 1e-15 * scale[j];
        }
        if (x[0] - h.t) * dir <= 0.0 {
            return None;
        }
        r = resid(&x)?;
        if done {
            break;
        }
    }
    let size = 1.0 + h.u.abs() + h.f.abs() + h.df.abs();
    if r.iter().map(|v| v.abs()).sum::<f64>() > 1e-12 * size {
        return None;
    }
    let series = build(&x)?;
    let mismatch = h.du - series.eval(h.t).du;
    Some((series, mismatch))
}

/// Lands on the singular end with the matched regular series, falling back
/// to extrapolation when no series fits.
#[allow(clippy::too_many_arguments)]
fn land_series(
    pieces: &[Piece],
    history_from: f64,
    t_h: f64,
    dir: f64,
    on: Vanishing,
    d: f64,
    sign: f64,
    opts: &IntegrateOptions,
    p: &SpaceParams,
) -> Option<Landing> {
    let h = history_state(pieces, t_h, p)?;
    let Some((series, mismatch)) = match_series(&h, dir, on, d, p) else {
        return land(pieces, history_from, t_h, dir, on, d, sign, opts, p);
    };
    let t_end = series.t0;
    let mut end = series.eval(t_end);
    end.f *= sign;
    end.df *= sign;
    end.ddf *= sign;
    let (t_f, t_u, t_df) = match on {
        Vanishing::F => (Some(t_end), None, None),
        Vanishing::U => (None, Some(t_end), Some(t_end)),
    };
    let piece = Piece::Series { t0: t_h, t1: t_end, series: series.clone(), sign };
    Some(Landing { piece, end, t_f, t_u, t_df, mismatch: Some(mismatch), series: Some(series) })
}

#[allow(clippy::too_many_arguments)]
fn hermite(t0: f64, t1: f64, y0: &[f64; 4], d0: &[f64; 4], e0: &[f64; 4], y1: &[f64; 4], d1: &[f64; 4], e1: &[f64; 4]) -> [Quintic; 4] {
    std::array::from_fn(|i| Quintic::new(t0, t1, [y0[i], d0[i], e0[i]], [y1[i], d1[i], e1[i]]))
}

fn jet_vec(s: &IvpState, p: &SpaceParams) -> Result<[f64; 4]> {
    let j = ivp_jet(s, p)?;
    Ok([j.ddu, j.dddu, j.ddf, j.dddf])
}

/// Length `√((n+m-1)/|λ|)` on which the solutions vary, clamped to
/// `[1/4, 4]`; 1 when `λ = 0`.
pub fn curvature_length(p: &SpaceParams) -> f64 {
    if p.lambda == 0.0 {
        return 1.0;
    }
    ((p.nf() + p.mf() - 1.0) / p.lambda.abs()).sqrt().clamp(0.25, 4.0)
}

/// Integrates from a regular state `start` toward `t_target`.
#[allow(clippy::too_many_arguments)]
fn run_leg(
    start: IvpState,
    mut sign: f64,
    dir: f64,
    t_target: f64,
    unbounded: bool,
    p: &SpaceParams,
    opts: &IntegrateOptions,
    mut pieces: Vec<Piece>,
) -> Result<Leg> {
    let rhs = |t: f64, y: &[f64; 4]| ivp_rhs(&IvpState::from_y(t, y), p);
    let mut t = start.t;
    let mut y = start.y();
    let mut dy = rhs(t, &y)?;
    let mut e = jet_vec(&start, p)?;
    let (d_f0, d_u0) = approach(&y, dir);
    let base_handoff = (opts.handoff * curvature_length(p)).min(0.5 * d_f0.min(d_u0));
    let mut handoff = base_handoff;
    let mut history_from = t;
    let mut steps = vec![t];
    let mut crossings = Vec::new();
    let mut h = opts.fixed_step.unwrap_or_else(|| 1e-2f64.min((t_target - t).abs()));
    let last_state = |t: f64, y: &[f64; 4], sign: f64| IvpState::new(t, y[0], y[1], sign * y[2], sign * y[3]);
    for _ in 0..opts.max_steps {
        let remaining = (t_target - t) * dir;
        if remaining <= 1e-13 * (1.0 + t.abs()) {
            let end = point_state(&IvpState::from_y(t, &y), p)?;
            let end = PointState { f: sign * end.f, df: sign * end.df, ddf: sign * end.ddf, ..end };
            let reached = if unbounded { ReachedBy::Horizon } else { ReachedBy::Span };
            return Ok(Leg { pieces, steps, end, reached, last_ddf: end.ddf, crossings });
        }
        let (d_f, d_u) = approach(&y, dir);
        let d = d_f.min(d_u);
        if d > base_handoff {
            handoff = base_handoff;
        }
        if d < handoff {
            let on = if d_f <= d_u { Vanishing::F } else { Vanishing::U };
            match land_series(&pieces, history_from, t, dir, on, d, sign, opts, p) {
                Some(l) => {
                    let last_ddf = sign * e[2];
                    pieces.push(l.piece);
                    if on == Vanishing::F && opts.cross_boundary {
                        let t_b = l.end.t;
                        let series = match l.series {
                            Some(s) => s,
                            None => boundary_series(t_b, l.end.u, sign * l.end.df, p, DEFAULT_ORDER)?,
                        };
                        let s_c = series.safe_radius(base_handoff, 1e-16);
                        let t_c = t_b + dir * s_c;
                        let st = series.eval(t_c);
                        pieces.push(Piece::Series { t0: t_b, t1: t_c, series, sign });
                        sign = -sign;
                        crossings.push(t_b);
                        t = t_c;
                        y = [st.u, st.du, -st.f, -st.df];
                        dy = rhs(t, &y)?;
                        e = jet_vec(&IvpState::from_y(t, &y), p)?;
                        history_from = t;
                        steps.push(t);
                        h = h.min(s_c);
                        continue;
                    }
                    let reached = ReachedBy::Landing { on, t_f: l.t_f, t_u: l.t_u, t_df: l.t_df, mismatch: l.mismatch };
                    return Ok(Leg { pieces, steps, end: l.end, reached, last_ddf, crossings });
                }
                None => handoff *= 0.25,
            }
        }
        // Absorb a sliver left over from rounding into the last step.
        let mut hs = if remaining <= h * (1.0 + 1e-9) { remaining } else { h };
        if d.is_finite() && opts.fixed_step.is_none() {
            hs = hs.min(0.5 * d);
        }
        if hs < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::StepUnderflow { last: last_state(t, &y, sign) });
        }
        let trial = step(&rhs, t, &y, &dy, dir * hs, opts.tol);
        let st = match trial {
            Ok(st) => st,
            Err(_) => {
                if opts.fixed_step.is_some() {
                    return Err(Error::StepUnderflow { last: last_state(t, &y, sign) });
                }
                h = 0.25 * hs;
                continue;
            }
        };
        if opts.fixed_step.is_none() && st.err > 1.0 {
            h = hs * factor(st.err).min(1.0);
            continue;
        }
        let t1 = t + dir * hs;
        let e1 = match jet_vec(&IvpState::from_y(t1, &st.y), p) {
            Ok(v) => v,
            Err(_) => {
                h = 0.25 * hs;
                continue;
            }
        };
        let q = hermite(t, t1, &y, &dy, &e, &st.y, &st.dy, &e1);
        // Regular events on this step.
        let mut event: Option<(f64, EventKind)> = None;
        for (idx, kind, enabled) in [(3usize, EventKind::DfZero, opts.stop_on_df), (1, EventKind::DuZero, opts.stop_on_du)] {
            if !enabled {
                continue;
            }
            let (g0, g1) = (y[idx], st.y[idx]);
            if g0 != 0.0 && g0 * g1 <= 0.0 {
                let te = bisect(|s| q[idx].eval(s)[0], t, t1, opts.event_tol).unwrap_or(t1);
                if event.is_none_or(|(prev, _)| (te - t) * dir < (prev - t) * dir) {
                    event = Some((te, kind));
                }
            }
        }
        if let Some((te, kind)) = event {
            pieces.push(Piece::Hermite { t0: t, t1: te, q, sign });
            let ys: [f64; 4] = std::array::from_fn(|i| q[i].eval(te)[0]);
            let s = IvpState::from_y(te, &ys);
            let end = point_state(&s, p).unwrap_or(PointState { t: te, u: ys[0], du: ys[1], f: ys[2], df: ys[3], ..Default::default() });
            let end = PointState { f: sign * end.f, df: sign * end.df, ddf: sign * end.ddf, ..end };
            steps.push(te);
            return Ok(Leg { pieces, steps, end, reached: ReachedBy::Event(kind), last_ddf: end.ddf, crossings });
        }
        pieces.push(Piece::Hermite { t0: t, t1, q, sign });
        t = t1;
        y = st.y;
        dy = st.dy;
        e = e1;
        steps.push(t);
        if y.iter().any(|v| !v.is_finite() || v.abs() > 1e100) {
            return Err(Error::Blowup { last: last_state(t, &y, sign) });
        }
        if opts.fixed_step.is_none() {
            h = hs * factor(st.err);
        }
    }
    Err(Error::StepUnderflow { last: last_state(t, &y, sign) })
}

/// A start at a singular point replaced by a short series segment.
struct SeriesStart {
    piece: Piece,
    start: PointState,
    regular: IvpState,
    dir: f64,
}

fn series_start(initial: &IvpState, p: &SpaceParams, opts: &IntegrateOptions) -> Result<Option<SeriesStart>> {
    let bc = 1e-10;
    let make = |series: Series, dir: f64| -> Result<SeriesStart> {
        let s = series.safe_radius(opts.handoff * curvature_length(p), 1e-16);
        let t1 = series.t0 + dir * s;
        let st = series.eval(t1);
        let start = series.eval(series.t0);
        Ok(SeriesStart {
            piece: Piece::Series { t0: series.t0, t1, series, sign: 1.0 },
            start,
            regular: IvpState::new(t1, st.u, st.du, st.f, st.df),
            dir,
        })
    };
    if initial.f == 0.0 {
        if initial.du.abs() > bc {
            return Err(Error::BoundaryCondition(format!(
                "f = 0 requires u' = 0 and f'' = 0 at a boundary point, but u' = {}",
                initial.du
            )));
        }
        if initial.df == 0.0 {
            return Err(Error::BoundaryCondition("the gradient of f must not vanish where f = 0".into()));
        }
        let series = boundary_series(initial.t, initial.u, initial.df, p, DEFAULT_ORDER)?;
        return make(series, initial.df.signum()).map(Some);
    }
    if initial.u == 0.0 {
        if initial.df.abs() > bc {
            return Err(Error::BoundaryCondition(format!("u = 0 requires f' = 0, but f' = {}", initial.df)));
        }
        let ddf0 = opts
            .ddf0
            .ok_or_else(|| Error::BoundaryCondition("a start where u = 0 needs f'' there".into()))?;
        let series = critical_series(initial.t, initial.f, initial.du, ddf0, p, DEFAULT_ORDER)?;
        return make(series, initial.du.signum()).map(Some);
    }
    Ok(None)
}

/// Integrates from `initial` over `span`, both directions if `initial.t` is
/// inside. Infinite span ends are replaced by `initial.t ± opts.horizon`.
///
/// A start with `f = 0` (boundary) or `u = 0` (critical point) uses a power
/// series and integrates away from the singular point only.
pub fn integrate(initial: &IvpState, params: &SpaceParams, span: (f64, f64), opts: &IntegrateOptions) -> Result<Profile> {
    params.validate()?;
    if !(opts.tol > 0.0) || !(opts.event_tol > 0.0) || !(opts.handoff > 0.0) {
        return Err(Error::InvalidParams("tolerances must be positive".into()));
    }
    let (lo, hi) = span;
    let t0 = initial.t;
    if !(lo <= t0 && t0 <= hi) || lo == hi {
        return Err(Error::InvalidParams(format!("start t = {t0} outside span [{lo}, {hi}]")));
    }
    let p = params;
    let target = |dir: f64| {
        let end = if dir > 0.0 { hi } else { lo };
        if end.is_finite() {
            (end, false)
        } else {
            (t0 + dir * opts.horizon, true)
        }
    };

    let mut legs: Vec<(f64, Leg)> = Vec::new();
    let mut start_state: PointState;
    let mut start_reached = ReachedBy::Span;
    if let Some(ss) = series_start(initial, p, opts)? {
        let (end, unb) = target(ss.dir);
        if (end - ss.regular.t) * ss.dir <= 0.0 {
            return Err(Error::InvalidParams("span does not extend away from the singular start".into()));
        }
        start_state = ss.start;
        start_reached = ReachedBy::Start;
        let leg = run_leg(ss.regular, 1.0, ss.dir, end, unb, p, opts, vec![ss.piece])?;
        legs.push((ss.dir, leg));
    } else {
        if !(initial.u > 0.0 && initial.f > 0.0) {
            return Err(Error::InvalidParams("initial state must have u > 0 and f > 0".into()));
        }
        start_state = point_state(initial, p)?;
        for dir in [-1.0, 1.0] {
            let (end, unb) = target(dir);
            if (end - t0) * dir > 0.0 {
                legs.push((dir, run_leg(*initial, 1.0, dir, end, unb, p, opts, Vec::new())?));
            }
        }
    }
    start_state.t = t0;

    let tol = opts.classify_tol;
    let mut pieces = Vec::new();
    let mut steps = Vec::new();
    let mut crossings = Vec::new();
    let mut left = None;
    let mut right = None;
    for (dir, leg) in legs {
        let unbounded = matches!(leg.reached, ReachedBy::Horizon);
        let side = if dir < 0.0 { Side::Left } else { Side::Right };
        let class = classify_state(&leg.end, leg.reached, unbounded, leg.last_ddf, side, p, tol);
        pieces.extend(leg.pieces);
        steps.extend(leg.steps);
        crossings.extend(leg.crossings);
        if dir < 0.0 {
            left = Some((leg.end, class));
        } else {
            right = Some((leg.end, class));
        }
    }
    let start_class = || classify_state(&start_state, start_reached, false, start_state.ddf, Side::Left, p, tol);
    let (left_state, left_class) = left.unwrap_or_else(|| (start_state, start_class()));
    let (right_state, right_class) = right.unwrap_or_else(|| {
        let mut c = start_class();
        c.diagnostics.note.get_or_insert_with(|| "start of integration".into());
        (start_state, c)
    });
    let dense = DenseOutput::new(*p, pieces);
    let (a, b) = (left_state.t, right_state.t);
    steps.sort_by(f64::total_cmp);
    crossings.sort_by(f64::total_cmp);
    let interior: Vec<f64> = match &opts.grid {
        OutputGrid::Uniform(n) => {
            let n = (*n).max(2);
            (1..n - 1).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        }
        OutputGrid::Points(v) => v.clone(),
        OutputGrid::Steps => steps,
    };
    let gap = 1e-12 * (1.0 + a.abs().max(b.abs()));
    let mut states = vec![left_state];
    let mut last = a;
    for t in interior {
        if t > last + gap && t < b - gap {
            if let Some(s) = dense.state(t) {
                states.push(s);
                last = t;
            }
        }
    }
    states.push(right_state);
    let mut profile = Profile::new(*p, states)?;
    profile.left_end = left_class;
    profile.right_end = right_class;
    profile.dense = Some(dense);
    profile.crossings = crossings;
    fill_oddness(&mut profile);
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::EndpointKind;
    use approx::assert_abs_diff_eq;

    fn ex21(t: f64) -> IvpState {
        IvpState::new(t, t.cosh(), t.sinh(), t.sinh(), t.cosh())
    }

    #[test]
    fn tracks_closed_form_forward() {
        let p = SpaceParams::new(4, 2, -5.0, -1.0).unwrap();
        let prof = integrate(&ex21(0.5), &p, (0.5, 2.0), &IntegrateOptions::default()).unwrap();
        for s in &prof.states {
            assert_abs_diff_eq!(s.u, s.t.cosh(), epsilon = 1e-8);
            assert_abs_diff_eq!(s.f, s.t.sinh(), epsilon = 1e-8);
        }
        assert_eq!(prof.right_end.reached_by, ReachedBy::Span);
        assert_eq!(prof.states.last().unwrap().t, 2.0);
    }

    #[test]
    fn lands_on_boundary_backward() {
        let p = SpaceParams::new(3, 2, -4.0, -1.0).unwrap();
        let prof = integrate(&ex21(1.0), &p, (f64::NEG_INFINITY, 1.0), &IntegrateOptions::default()).unwrap();
        assert_eq!(prof.left_end.kind, EndpointKind::Boundary);
        let s = prof.states[0];
        assert!(s.t.abs() < 1e-6);
        assert_abs_diff_eq!(s.df, 1.0, epsilon = 1e-6);
        match prof.left_end.reached_by {
            ReachedBy::Landing { on, mismatch: Some(m), .. } => {
                assert_eq!(on, Vanishing::F);
                assert!(m.abs() < 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn starts_on_series_at_boundary() {
        let p = SpaceParams::new(4, 3, -6.0, -1.0).unwrap();
        let start = IvpState::new(0.0, 1.0, 0.0, 0.0, 1.0);
        let prof = integrate(&start, &p, (0.0, 1.5), &IntegrateOptions::default()).unwrap();
        assert_eq!(prof.left_end.reached_by, ReachedBy::Start);
        assert_eq!(prof.left_end.kind, EndpointKind::Boundary);
        let last = prof.states.last().unwrap();
        assert_abs_diff_eq!(last.u, 1.5f64.cosh(), epsilon = 1e-8);
    }

    #[test]
    fn critical_start_needs_ddf() {
        let p = SpaceParams::new(3, 2, 4.0, 1.0).unwrap();
        let start = IvpState::new(0.0, 0.0, 1.0, 1.0, 0.0);
        let r = integrate(&start, &p, (0.0, 1.0), &IntegrateOptions::default());
        assert!(matches!(r, Err(Error::BoundaryCondition(_))));
    }

    #[test]
    fn crossing_continues_to_antipode() {
        let p = SpaceParams::new(3, 2, 4.0, 1.0).unwrap();
        let start = IvpState::new(0.0, 0.0, 1.0, 1.0, 0.0);
        let opts = IntegrateOptions { ddf0: Some(-1.0), cross_boundary: true, ..Default::default() };
        let prof = integrate(&start, &p, (0.0, f64::INFINITY), &opts).unwrap();
        assert_eq!(prof.crossings.len(), 1);
        assert_abs_diff_eq!(prof.crossings[0], std::f64::consts::FRAC_PI_2, epsilon = 1e-7);
        assert_eq!(prof.right_end.kind, EndpointKind::CriticalMin);
        assert_abs_diff_eq!(prof.right_end.t_end.unwrap(), std::f64::consts::PI, epsilon = 1e-7);
        for s in &prof.states {
            assert_abs_diff_eq!(s.f, s.t.cos(), epsilon = 1e-7);
        }
    }

    #[test]
    fn stops_on_regular_events() {
        let p = SpaceParams::new(3, 2, 4.0, 1.0).unwrap();
        let start = IvpState::new(0.0, 1.0, 0.1, 1.0, 0.0);
        let opts = IntegrateOptions { stop_on_du: true, ..Default::default() };
        let prof = integrate(&start, &p, (0.0, 1.0), &opts).unwrap();
        assert_eq!(prof.right_end.reached_by, ReachedBy::Event(EventKind::DuZero));
        let end = prof.states.last().unwrap();
        assert!(end.t > 0.0 && end.t < 0.1);
        assert!(end.du.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_span_and_tolerance() {
        let p = SpaceParams::new(3, 2, -4.0, -1.0).unwrap();
        assert!(matches!(integrate(&ex21(1.0), &p, (2.0, 3.0), &IntegrateOptions::default()), Err(Error::InvalidParams(_))));
        let opts = IntegrateOptions { tol: 0.0, ..Default::default() };
        assert!(matches!(integrate(&ex21(1.0), &p, (0.5, 3.0), &opts), Err(Error::InvalidParams(_))));
    }
}
