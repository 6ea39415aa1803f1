//! Adaptive Simpson quadrature.

use crate::scalar::Real;

/// Default recursion cap for [`adaptive_simpson`].
pub const MAX_DEPTH: u32 = 60;

/// Result of a quadrature call.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    /// Sum of the local Richardson error estimates.
    pub error: T,
    pub evals: usize,
}

struct Panel<T> {
    a: T,
    m: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

/// Integrates `f` over `[a, b]` with absolute tolerance `tol`.
///
/// Subdivision also stops once the two Simpson estimates of a panel agree to
/// working precision, so an unreachable tolerance costs at most one pass to
/// the rounding floor instead of `2^max_depth` evaluations.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T, max_depth: u32) -> Integral<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Integral { value: T::zero(), error: T::zero(), evals: 0 };
    }
    let (lo, hi, sign) = if a < b { (a, b, T::one()) } else { (b, a, -T::one()) };
    let two = T::lit(2.0);
    let m = (lo + hi) / two;
    let (fa, fm, fb) = (f(lo), f(m), f(hi));
    let whole = simpson(lo, hi, fa, fm, fb);
    let mut evals = 3;
    let mut error = T::zero();
    let value = refine(
        &f,
        Panel { a: lo, m, b: hi, fa, fm, fb, whole },
        tol,
        max_depth,
        &mut evals,
        &mut error,
    );
    Integral { value: sign * value, error, evals }
}

#[inline]
fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

fn refine<T, F>(f: &F, p: Panel<T>, tol: T, depth: u32, evals: &mut usize, error: &mut T) -> T
where
    T: Real,
    F: Fn(T) -> T,
{
    let two = T::lit(2.0);
    let lm = (p.a + p.m) / two;
    let rm = (p.m + p.b) / two;
    let (flm, frm) = (f(lm), f(rm));
    *evals += 2;
    let left = simpson(p.a, p.m, p.fa, flm, p.fm);
    let right = simpson(p.m, p.b, p.fm, frm, p.fb);
    let both = left + right;
    let delta = both - p.whole;
    let fifteen = T::lit(15.0);
    let floor = T::lit(64.0) * T::epsilon() * (left.abs() + right.abs());
    let narrow = (p.b - p.a) <= T::lit(4.0) * T::epsilon() * p.b.abs().max(p.a.abs());
    if depth == 0 || narrow || delta.abs() <= fifteen * tol || delta.abs() <= floor {
        *error = *error + (delta / fifteen).abs();
        return both + delta / fifteen;
    }
    let half = tol / two;
    refine(
        f,
        Panel { a: p.a, m: lm, b: p.m, fa: p.fa, fm: flm, fb: p.fm, whole: left },
        half,
        depth - 1,
        evals,
        error,
    ) + refine(
        f,
        Panel { a: p.m, m: rm, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right },
        half,
        depth - 1,
        evals,
        error,
    )
}

/// Composite Simpson rule with `panels` (even) subintervals; used to size
/// tolerances before an adaptive pass.
pub fn composite_simpson<T, F>(f: F, a: T, b: T, panels: usize) -> T
where
    T: Real,
    F: Fn(T) -> T,
{
    let panels = panels.max(2) + panels % 2;
    let h = (b - a) / T::from_usize(panels).unwrap();
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc = acc + w * f(a + h * T::from_usize(i).unwrap());
    }
    acc * h / T::lit(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let r = adaptive_simpson(|x: f64| x * x * x - 2.0 * x, 0.0, 3.0, 1e-12, MAX_DEPTH);
        assert!((r.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn integrates_exponential() {
        let r = adaptive_simpson(f64::exp, 0.0, 2.0, 1e-12, MAX_DEPTH);
        assert!((r.value - (2.0_f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = adaptive_simpson(f64::cos, 1.0, 0.0, 1e-12, MAX_DEPTH);
        assert!((r.value + 1.0_f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn unreachable_tolerance_terminates() {
        let r = adaptive_simpson(f64::exp, 0.0, 40.0, 1e-30, MAX_DEPTH);
        let exact = 40.0_f64.exp() - 1.0;
        assert!(((r.value - exact) / exact).abs() < 1e-12);
        assert!(r.evals < 1_000_000);
    }

    #[test]
    fn composite_rule_is_close() {
        let v = composite_simpson(f64::exp, 0.0, 1.0, 32);
        assert!((v - (1.0_f64.exp() - 1.0)).abs() < 1e-7);
    }
}
