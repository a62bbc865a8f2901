//! Polynomial building blocks: quintic Hermite segments, Chebyshev fits and
//! finite-difference weights on arbitrary nodes.

/// Quintic polynomial on `[t0, t0 + h]` matching value, first and second
/// derivative at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quintic {
    pub t0: f64,
    pub h: f64,
    c: [f64; 6],
}

impl Quintic {
    /// `a = (y, y', y'')` at `t0`, `b` the same at `t1`. `t1 < t0` is allowed.
    pub fn new(t0: f64, t1: f64, a: [f64; 3], b: [f64; 3]) -> Self {
        let h = t1 - t0;
        let (y0, d0, e0) = (a[0], h * a[1], h * h * a[2]);
        let (y1, d1, e1) = (b[0], h * b[1], h * h * b[2]);
        let c = [
            y0,
            d0,
            0.5 * e0,
            -10.0 * y0 - 6.0 * d0 - 1.5 * e0 + 0.5 * e1 - 4.0 * d1 + 10.0 * y1,
            15.0 * y0 + 8.0 * d0 + 1.5 * e0 - e1 + 7.0 * d1 - 15.0 * y1,
            -6.0 * y0 - 3.0 * d0 - 0.5 * e0 + 0.5 * e1 - 3.0 * d1 + 6.0 * y1,
        ];
        Quintic { t0, h, c }
    }

    /// Value and derivatives up to order 3 at `t`.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let s = (t - self.t0) / self.h;
        let c = &self.c;
        let mut out = [0.0; 4];
        let mut coef = *c;
        let mut scale = 1.0;
        for (order, slot) in out.iter_mut().enumerate() {
            let deg = 5 - order;
            let mut acc = coef[deg];
            for j in (0..deg).rev() {
                acc = acc * s + coef[j];
            }
            *slot = acc * scale;
            for j in 0..deg {
                coef[j] = coef[j + 1] * (j + 1) as f64;
            }
            scale /= self.h;
        }
        out
    }
}

/// Chebyshev series on `[a, b]`, usable outside the interval for
/// extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    /// Gauss-Lobatto nodes `cos(πj/N)` mapped to `[a, b]`, j = 0..=N.
    pub fn nodes(a: f64, b: f64, npoints: usize) -> Vec<f64> {
        let nn = (npoints - 1) as f64;
        (0..npoints)
            .map(|j| {
                let x = (std::f64::consts::PI * j as f64 / nn).cos();
                0.5 * (a + b) + 0.5 * (b - a) * x
            })
            .collect()
    }

    /// Interpolant through values at [`ChebSeries::nodes`], truncated to
    /// `degree` (a discrete least-squares fit when `degree < npoints - 1`).
    pub fn fit(a: f64, b: f64, values: &[f64], degree: usize) -> Self {
        let npoints = values.len();
        let nn = npoints - 1;
        let mut coeffs = vec![0.0; nn + 1];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                let w = if j == 0 || j == nn { 0.5 } else { 1.0 };
                acc += w * v * (std::f64::consts::PI * (k * j) as f64 / nn as f64).cos();
            }
            *ck = 2.0 * acc / nn as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[nn] *= 0.5;
        coeffs.truncate(degree.min(nn) + 1);
        ChebSeries { a, b, coeffs }
    }

    fn x(&self, t: f64) -> f64 {
        (2.0 * t - self.a - self.b) / (self.b - self.a)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = self.x(t);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebSeries { a: self.a, b: self.b, coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let s = 2.0 / (self.b - self.a);
        ChebSeries { a: self.a, b: self.b, coeffs: d.into_iter().map(|c| c * s).collect() }
    }

    /// Root of the series in `[lo, hi]` (either order) by bracketed secant
    /// iteration, if the ends differ in sign.
    pub fn root_in(&self, lo: f64, hi: f64) -> Option<f64> {
        crate::roots::illinois(|t| self.eval(t), lo, hi, 1e-15, 200)
    }
}

/// Finite-difference weights (Fornberg) for derivatives `0..=max_order` at
/// `z` from samples at `x`. Returns `w[order][node]`.
pub fn fd_weights(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}
