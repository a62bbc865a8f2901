//! Sampled profiles `(t, u, u', u'', u''', f, f', f'')` with endpoint metadata.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mu_invariant, PointState, SpaceParams};
use crate::interp::fd_weights;
use crate::solver::{DenseOutput, EndpointClass, RadialCompleteness};

/// A sampled solution candidate on a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct Profile {
    pub params: SpaceParams,
    pub states: Vec<PointState>,
    pub left_end: EndpointClass,
    pub right_end: EndpointClass,
    /// Derivative columns reconstructed by finite differences.
    pub filled: Vec<String>,
    /// Continuous representation when the profile came from integration.
    pub dense: Option<DenseOutput>,
    /// Boundary points the integration continued through.
    pub crossings: Vec<f64>,
}

/// Column data of a profile where derivative columns may be absent.
#[derive(Debug, Clone, Default)]
pub struct ProfileColumns {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Option<Vec<f64>>,
    pub ddu: Option<Vec<f64>>,
    pub dddu: Option<Vec<f64>>,
    pub f: Vec<f64>,
    pub df: Option<Vec<f64>>,
    pub ddf: Option<Vec<f64>>,
}

/// Statistics of `μ` over a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl MuStats {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

impl Profile {
    /// Wraps states whose `t` values must be finite and strictly increasing.
    /// Both ends start out unclassified.
    pub fn new(params: SpaceParams, states: Vec<PointState>) -> Result<Self> {
        params.validate()?;
        for (i, s) in states.iter().enumerate() {
            if !s.t.is_finite() {
                return Err(Error::MalformedProfile(format!("non-finite t at node {i}")));
            }
            if i > 0 && !(s.t > states[i - 1].t) {
                return Err(Error::MalformedProfile(format!("grid not strictly increasing at node {i}")));
            }
        }
        let (lo, hi) = match (states.first(), states.last()) {
            (Some(a), Some(b)) => (a.t, b.t),
            _ => (f64::NAN, f64::NAN),
        };
        Ok(Profile {
            params,
            states,
            left_end: EndpointClass::unclassified(lo),
            right_end: EndpointClass::unclassified(hi),
            filled: Vec::new(),
            dense: None,
            crossings: Vec::new(),
        })
    }

    /// Builds a profile from columns, filling missing derivatives with
    /// finite differences of the highest-order column available.
    pub fn from_columns(params: SpaceParams, cols: ProfileColumns) -> Result<Self> {
        let len = cols.t.len();
        if cols.u.len() != len || cols.f.len() != len {
            return Err(Error::MalformedProfile("column lengths differ".into()));
        }
        let mut filled = Vec::new();
        let u_chain = [Some(cols.u.clone()), cols.du, cols.ddu, cols.dddu];
        let f_chain = [Some(cols.f.clone()), cols.df, cols.ddf];
        let u_names = ["u", "du", "ddu", "dddu"];
        let f_names = ["f", "df", "ddf"];
        let us = fill_chain(&cols.t, &u_chain, &u_names, &mut filled)?;
        let fs = fill_chain(&cols.t, &f_chain, &f_names, &mut filled)?;
        let states = (0..len)
            .map(|i| PointState {
                t: cols.t[i],
                u: us[0][i],
                du: us[1][i],
                ddu: us[2][i],
                dddu: us[3][i],
                f: fs[0][i],
                df: fs[1][i],
                ddf: fs[2][i],
            })
            .collect();
        let mut p = Profile::new(params, states)?;
        p.filled = filled;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn ts(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// `μ` over all nodes with `u > 0`.
    pub fn mu_stats(&self) -> Result<MuStats> {
        let mus: Vec<f64> = self
            .states
            .iter()
            .filter(|s| s.u > 0.0)
            .map(|s| mu_invariant(s, &self.params))
            .collect::<Result<_>>()?;
        if mus.is_empty() {
            return Err(Error::MalformedProfile("no node with u > 0".into()));
        }
        Ok(MuStats {
            min: mus.iter().copied().fold(f64::INFINITY, f64::min),
            max: mus.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: mus.iter().sum::<f64>() / mus.len() as f64,
        })
    }

    /// Fate of the radial geodesic through this profile, from the end kinds.
    pub fn radial_completeness(&self) -> RadialCompleteness {
        RadialCompleteness::from_ends(self.left_end.kind, self.right_end.kind)
    }
}

fn fill_chain(
    t: &[f64],
    chain: &[Option<Vec<f64>>],
    names: &[&str],
    filled: &mut Vec<String>,
) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(chain.len());
    for (order, col) in chain.iter().enumerate() {
        match col {
            Some(v) if v.len() == t.len() => out.push(v.clone()),
            Some(_) => return Err(Error::MalformedProfile(format!("column {} has wrong length", names[order]))),
            None => {
                let base = (0..order).rev().find(|&j| chain[j].is_some()).unwrap_or(0);
                out.push(differentiate(t, &out[base], order - base)?);
                filled.push(names[order].to_string());
            }
        }
    }
    Ok(out)
}

/// Derivative of the given order at every node, from `order + 4` nearby
/// samples (centered where possible, one-sided at the ends).
pub fn differentiate(t: &[f64], y: &[f64], order: usize) -> Result<Vec<f64>> {
    let width = order + 4;
    let len = t.len();
    if len < width {
        return Err(Error::MalformedProfile(format!(
            "{len} nodes cannot support a {width}-point stencil for a derivative of order {order}"
        )));
    }
    let mut d = Vec::with_capacity(len);
    for i in 0..len {
        let start = i.saturating_sub(width / 2).min(len - width);
        let xs = &t[start..start + width];
        let w = fd_weights(t[i], xs, order);
        d.push(w[order].iter().zip(&y[start..start + width]).map(|(a, b)| a * b).sum());
    }
    Ok(d)
}
