//! Adaptive Simpson integration and small Gauss rules.

/// Integrates `f` over `[a, b]` with adaptive Simpson refinement.
///
/// `tol` is an absolute tolerance on the whole interval; recursion stops at
/// `max_depth` halvings.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Nodes of the two-point Gauss–Legendre rule on `[0, 1]`.
pub const GAUSS2_UNIT: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 20);
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn integrates_reciprocal() {
        let v = adaptive_simpson(&|x: f64| 1.0 / x, 1.0, 10.0, 1e-12, 40);
        assert!((v - 10f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn gauss_nodes_are_symmetric() {
        assert!((GAUSS2_UNIT[0] + GAUSS2_UNIT[1] - 1.0).abs() < 1e-15);
        // exact for cubics
        let g = |x: f64| x * x * x;
        let v = 0.5 * (g(GAUSS2_UNIT[0]) + g(GAUSS2_UNIT[1]));
        assert!((v - 0.25).abs() < 1e-15);
    }
}
