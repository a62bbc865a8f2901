//! Power series of `(u, f)` at the two kinds of singular points.
//!
//! At a boundary point `t_b` the data `u(t_b) > 0` and `f'(t_b) ≠ 0` fix the
//! series, with `f(t_b) = u'(t_b) = f''(t_b) = 0`. At a critical point `t_c`
//! the series is fixed by `f(t_c) > 0`, `u'(t_c)` with `u'(t_c)² = k` when
//! `n ≥ 3`, and the free value `f''(t_c)`; there `u(t_c) = f'(t_c) = 0` and
//! `u` is odd.

use crate::error::{Error, Result};
use crate::geometry::{PointState, SpaceParams};

/// Default number of series terms.
pub const DEFAULT_ORDER: usize = 24;

/// Truncated series for `u` and `f` in powers of `t - t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub t0: f64,
    pub u: Vec<f64>,
    pub f: Vec<f64>,
}

fn horner(c: &[f64], s: f64, deriv: usize) -> f64 {
    let mut acc = 0.0;
    for i in (deriv..c.len()).rev() {
        let mut w = 1.0;
        for d in 0..deriv {
            w *= (i - d) as f64;
        }
        acc = acc * s + w * c[i];
    }
    acc
}

impl Series {
    pub fn eval(&self, t: f64) -> PointState {
        let s = t - self.t0;
        PointState {
            t,
            u: horner(&self.u, s, 0),
            du: horner(&self.u, s, 1),
            ddu: horner(&self.u, s, 2),
            dddu: horner(&self.u, s, 3),
            f: horner(&self.f, s, 0),
            df: horner(&self.f, s, 1),
            ddf: horner(&self.f, s, 2),
        }
    }

    /// Largest `|t - t0| <= cap` (halving from `cap`) at which the last two
    /// terms are below `rel` times the leading magnitude.
    pub fn safe_radius(&self, cap: f64, rel: f64) -> f64 {
        let lead = |s: f64| 1.0 + self.u[0].abs() + self.f[0].abs() + (self.u[1].abs() + self.f[1].abs()) * s;
        let tail = |s: f64| {
            let l = self.u.len();
            (l - 2..l).map(|i| (self.u[i].abs() + self.f[i].abs()) * s.powi(i as i32)).sum::<f64>()
        };
        let mut s = cap;
        while tail(s) > rel * lead(s) && s > 1e-12 {
            s *= 0.5;
        }
        s
    }
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let l = a.len().min(b.len());
    let mut c = vec![0.0; l];
    for i in 0..l {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..l - i {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

fn deriv(a: &[f64]) -> Vec<f64> {
    let mut d: Vec<f64> = (1..a.len()).map(|i| i as f64 * a[i]).collect();
    d.push(0.0);
    d
}

/// Coefficients of the polynomial forms of the tangential and radial
/// conditions, `f u u'' + m f' u' u + λ f u² - (n-2) f (k - u'²)` and
/// `m u f'' + ((n-1) u'' + λ u) f`.
fn equations(u: &[f64], f: &[f64], p: &SpaceParams) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (p.nf(), p.mf());
    let du = deriv(u);
    let ddu = deriv(&du);
    let df = deriv(f);
    let ddf = deriv(&df);
    let fu = mul(f, u);
    let t1 = mul(&fu, &ddu);
    let t2 = mul(&mul(&df, &du), u);
    let t3 = mul(&fu, u);
    let du2 = mul(&du, &du);
    let kmdu2: Vec<f64> = du2.iter().enumerate().map(|(i, v)| if i == 0 { p.k - v } else { -v }).collect();
    let t4 = mul(f, &kmdu2);
    let e = (0..u.len())
        .map(|i| t1[i] + m * t2[i] + p.lambda * t3[i] - (n - 2.0) * t4[i])
        .collect();
    let g1 = mul(u, &ddf);
    let inner: Vec<f64> = (0..u.len()).map(|i| (n - 1.0) * ddu[i] + p.lambda * u[i]).collect();
    let g2 = mul(&inner, f);
    let g = (0..u.len()).map(|i| m * g1[i] + g2[i]).collect();
    (e, g)
}

/// Solves the pair of equations `(e_idx, g_idx)` for the coefficients
/// `u[ui]` and `f[fi]`, which enter linearly.
fn solve_pair(u: &mut [f64], f: &mut [f64], ui: usize, fi: usize, e_idx: usize, g_idx: usize, p: &SpaceParams) -> Result<()> {
    let mut eval = |x: f64, y: f64| {
        u[ui] = x;
        f[fi] = y;
        let (e, g) = equations(u, f, p);
        (e[e_idx], g[g_idx])
    };
    let r0 = eval(0.0, 0.0);
    let rx = eval(1.0, 0.0);
    let ry = eval(0.0, 1.0);
    let (a11, a21) = (rx.0 - r0.0, rx.1 - r0.1);
    let (a12, a22) = (ry.0 - r0.0, ry.1 - r0.1);
    let det = a11 * a22 - a12 * a21;
    let scale = (a11.abs() + a12.abs()) * (a21.abs() + a22.abs());
    if !(det.abs() > 1e-13 * scale) {
        return Err(Error::InsufficientResolution(format!("degenerate series recursion at order {ui}")));
    }
    u[ui] = (-r0.0 * a22 + r0.1 * a12) / det;
    f[fi] = (-r0.1 * a11 + r0.0 * a21) / det;
    Ok(())
}

/// Series at a boundary point `t_b` with `u(t_b) = u0 > 0` and
/// `f'(t_b) = df0 ≠ 0`.
pub fn boundary_series(t_b: f64, u0: f64, df0: f64, p: &SpaceParams, order: usize) -> Result<Series> {
    if !(u0 > 0.0) {
        return Err(Error::BoundaryCondition(format!("u = {u0} must be positive at a boundary point")));
    }
    if df0 == 0.0 || !df0.is_finite() {
        return Err(Error::BoundaryCondition("the gradient of f must not vanish on the boundary".into()));
    }
    let len = order.max(4) + 1;
    let mut u = vec![0.0; len];
    let mut f = vec![0.0; len];
    u[0] = u0;
    f[1] = df0;
    for j in 1..len - 2 {
        solve_pair(&mut u, &mut f, j + 1, j + 2, j, j, p)?;
    }
    u.truncate(len - 1);
    f.truncate(len - 1);
    Ok(Series { t0: t_b, u, f })
}

/// Series at a critical point `t_c` with `f(t_c) = f0 > 0`,
/// `u'(t_c) = du0` and `f''(t_c) = ddf0`.
pub fn critical_series(t_c: f64, f0: f64, du0: f64, ddf0: f64, p: &SpaceParams, order: usize) -> Result<Series> {
    if !(f0 > 0.0) {
        return Err(Error::BoundaryCondition(format!("f = {f0} must be positive at a critical point")));
    }
    if du0 == 0.0 || !du0.is_finite() {
        return Err(Error::BoundaryCondition("u' must not vanish where u vanishes".into()));
    }
    if p.n >= 3 {
        let k_gap = du0 * du0 - p.k;
        if k_gap.abs() > 1e-8 * p.k.abs().max(1.0) {
            return Err(Error::BoundaryCondition(format!("u'² = {} must equal k = {} where u vanishes", du0 * du0, p.k)));
        }
    }
    let len = order.max(4) + 2;
    let mut u = vec![0.0; len];
    let mut f = vec![0.0; len];
    u[1] = du0;
    f[0] = f0;
    f[2] = 0.5 * ddf0;
    for j in 1..len - 1 {
        if j == 2 {
            let mut eval = |x: f64| {
                u[3] = x;
                equations(&u, &f, p).1[1]
            };
            let r0 = eval(0.0);
            let r1 = eval(1.0);
            u[3] = -r0 / (r1 - r0);
        } else {
            solve_pair(&mut u, &mut f, j + 1, j, j, j - 1, p)?;
        }
    }
    u.truncate(len - 1);
    f.truncate(len - 1);
    Ok(Series { t0: t_c, u, f })
}
