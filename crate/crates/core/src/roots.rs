//! Scalar root bracketing.

/// Illinois variant of regula falsi. Returns `None` unless `f(a)` and `f(b)`
/// have opposite signs (or one of them is zero).
pub fn illinois<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if !(fa * fb < 0.0) {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..max_iter {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c.is_finite() && (c - a) * (c - b) < 0.0 { c } else { 0.5 * (a + b) };
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() <= xtol * (1.0 + c.abs()) {
            return Some(c);
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
    Some((a * fb - b * fa) / (fb - fa))
}

/// Plain bisection to absolute width `xtol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if !(fa * fb < 0.0) {
        return None;
    }
    while (b - a).abs() > xtol {
        let c = 0.5 * (a + b);
        if c == a || c == b {
            break;
        }
        let fc = f(c);
        if fc == 0.0 {
            return Some(c);
        }
        if fc * fa < 0.0 {
            b = c;
        } else {
            a = c;
            fa = fc;
        }
    }
    Some(0.5 * (a + b))
}
