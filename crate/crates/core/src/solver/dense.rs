//! Continuous representation of an integrated trajectory.

use crate::geometry::{PointState, SpaceParams};
use crate::interp::{ChebSeries, Quintic};

use super::series::Series;
use super::{ivp_jet, IvpState};

/// One piece of a trajectory. `sign` is -1 on stretches continued through a
/// boundary point, where the stored `f` is the negated potential.
#[derive(Debug, Clone)]
pub enum Piece {
    /// Accepted Runge-Kutta step; quintic Hermite in `u, u', f, f'`.
    Hermite { t0: f64, t1: f64, q: [Quintic; 4], sign: f64 },
    /// Extrapolated approach to a singular end; Chebyshev fits of
    /// `u, u', u'', u''', f, f', f''`.
    Landing { t0: f64, t1: f64, fits: Box<[ChebSeries; 7]>, sign: f64 },
    /// Power series next to a singular point.
    Series { t0: f64, t1: f64, series: Series, sign: f64 },
}

impl Piece {
    pub fn bounds(&self) -> (f64, f64) {
        let (a, b) = match self {
            Piece::Hermite { t0, t1, .. } | Piece::Landing { t0, t1, .. } | Piece::Series { t0, t1, .. } => (*t0, *t1),
        };
        (a.min(b), a.max(b))
    }

    fn sign(&self) -> f64 {
        match self {
            Piece::Hermite { sign, .. } | Piece::Landing { sign, .. } | Piece::Series { sign, .. } => *sign,
        }
    }

    /// State with the stored (positive) potential.
    pub(crate) fn raw_state(&self, t: f64, p: &SpaceParams) -> PointState {
        match self {
            Piece::Hermite { q, .. } => {
                let u = q[0].eval(t);
                let du = q[1].eval(t);
                let f = q[2].eval(t);
                let df = q[3].eval(t);
                let s = IvpState::new(t, u[0], du[0], f[0], df[0]);
                match ivp_jet(&s, p) {
                    Ok(j) => PointState { t, u: s.u, du: s.du, ddu: j.ddu, dddu: j.dddu, f: s.f, df: s.df, ddf: j.ddf },
                    Err(_) => PointState { t, u: u[0], du: du[0], ddu: du[1], dddu: du[2], f: f[0], df: df[0], ddf: df[1] },
                }
            }
            Piece::Landing { fits, .. } => PointState {
                t,
                u: fits[0].eval(t),
                du: fits[1].eval(t),
                ddu: fits[2].eval(t),
                dddu: fits[3].eval(t),
                f: fits[4].eval(t),
                df: fits[5].eval(t),
                ddf: fits[6].eval(t),
            },
            Piece::Series { series, .. } => series.eval(t),
        }
    }
}

/// Piecewise trajectory sorted by increasing `t`.
#[derive(Debug, Clone)]
pub struct DenseOutput {
    pub params: SpaceParams,
    pub pieces: Vec<Piece>,
}

impl DenseOutput {
    pub(crate) fn new(params: SpaceParams, mut pieces: Vec<Piece>) -> Self {
        pieces.sort_by(|a, b| a.bounds().0.total_cmp(&b.bounds().0));
        DenseOutput { params, pieces }
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.bounds().0, self.pieces.last()?.bounds().1))
    }

    fn piece_at(&self, t: f64) -> Option<&Piece> {
        let i = self.pieces.partition_point(|p| p.bounds().1 < t);
        let p = self.pieces.get(i)?;
        let (lo, hi) = p.bounds();
        (lo <= t && t <= hi).then_some(p)
    }

    /// Point state at `t`, or `None` outside the covered span.
    pub fn state(&self, t: f64) -> Option<PointState> {
        let piece = self.piece_at(t)?;
        let mut s = piece.raw_state(t, &self.params);
        let sg = piece.sign();
        s.f *= sg;
        s.df *= sg;
        s.ddf *= sg;
        Some(s)
    }
}
