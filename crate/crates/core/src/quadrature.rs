//! Adaptive Simpson quadrature.

/// Result of [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// False when some subinterval hit the depth limit before meeting `tol`.
    pub converged: bool,
    pub evaluations: usize,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Quadrature {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut q = Quadrature { value: 0.0, converged: true, evaluations: 3 };
    q.value = step(f, a, b, fa, fm, fb, whole, tol, max_depth, &mut q);
    q
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    q: &mut Quadrature,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    q.evaluations += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 || !delta.is_finite() {
        q.converged = false;
        return left + right + delta / 15.0;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, q)
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let q = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12, 40);
        assert!(q.converged);
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-12);
        let q = adaptive_simpson(&|x: f64| 1.0 / x, 2.0, 1.0, 1e-12, 40);
        assert!((q.value + 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn flags_nonconvergence() {
        let q = adaptive_simpson(&|x: f64| x.abs().sqrt().recip(), -1.0, 1.0, 1e-12, 6);
        assert!(!q.converged);
    }
}
