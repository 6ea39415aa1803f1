//! Inversion of increasing scalar functions.
//!
//! The bracket is grown by doubling from a starting guess, then narrowed with
//! safeguarded Newton steps when a derivative is available and Illinois false
//! position otherwise. Every step that would leave the bracket falls back to
//! bisection, so the iteration count is bounded by the bisection worst case.

use crate::error::{domain, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inversion<T> {
    pub x: T,
    /// `func(x) - target`.
    pub residual: T,
    pub iterations: usize,
}

/// Settings for [`invert_increasing`].
#[derive(Clone, Copy, Debug)]
pub struct InvertOptions<T> {
    /// Left end of the domain; `func(lower)` must not exceed the target.
    pub lower: T,
    /// Initial right end tried during bracket expansion.
    pub start: T,
    /// Largest abscissa the function may be evaluated at.
    pub upper_limit: T,
    /// Stop once `|func(x) - target| <= tol * max(1, |target|)` and, when a
    /// derivative is supplied, the Newton step is below `tol * max(1, |x|)`.
    pub tol: T,
}

/// Solves `func(x) = target` for an increasing `func`.
pub fn invert_increasing<T, F>(
    func: F,
    deriv: Option<&dyn Fn(T) -> T>,
    target: T,
    opts: InvertOptions<T>,
) -> Result<Inversion<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let scale = T::one().max(target.abs());
    let accept = opts.tol * scale;
    let mut lo = opts.lower;
    let mut flo = func(lo) - target;
    if flo > accept {
        return Err(domain("target", format!("{target} lies below the function's range")));
    }
    if flo.abs() <= accept {
        return Ok(Inversion { x: lo, residual: flo, iterations: 0 });
    }

    let two = T::lit(2.0);
    let mut hi = opts.start.max(lo + T::min_positive_value()).min(opts.upper_limit);
    let mut fhi = func(hi) - target;
    while fhi < T::zero() {
        if hi >= opts.upper_limit {
            return Err(domain(
                "target",
                format!("{target} exceeds the function value at the domain limit {}", opts.upper_limit),
            ));
        }
        lo = hi;
        flo = fhi;
        let width = (hi - opts.lower).max(T::one());
        hi = (hi + width).min(opts.upper_limit);
        fhi = func(hi) - target;
    }
    if fhi.abs() <= accept {
        return Ok(Inversion { x: hi, residual: fhi, iterations: 0 });
    }

    // Illinois bookkeeping: which end was retained on the previous step.
    let mut side = 0i8;
    let mut x = if let Some(d) = deriv {
        let dx = d(hi);
        let guess = hi - fhi / dx;
        if dx > T::zero() && guess > lo && guess < hi {
            guess
        } else {
            (lo + hi) / two
        }
    } else {
        lo - flo * (hi - lo) / (fhi - flo)
    };
    for it in 1..=MAX_ITER {
        if !(x > lo && x < hi) {
            x = (lo + hi) / two;
        }
        let fx = func(x) - target;
        // With a derivative, also require the implied Newton step to be
        // small, so flat stretches still pin `x` down.
        let settled = fx.abs() <= accept
            && deriv.is_none_or(|d| {
                let dx = d(x);
                dx > T::zero() && (fx / dx).abs() <= opts.tol * x.abs().max(T::one())
            });
        if settled || hi - lo <= T::lit(4.0) * T::epsilon() * hi.abs().max(T::one()) {
            return Ok(Inversion { x, residual: fx, iterations: it });
        }
        if fx < T::zero() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi = fhi / two;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo = flo / two;
            }
            side = 1;
        }
        x = match deriv {
            Some(d) => {
                let dx = d(x);
                if dx > T::zero() {
                    x - fx / dx
                } else {
                    (lo + hi) / two
                }
            }
            None => lo - flo * (hi - lo) / (fhi - flo),
        };
        // Newton can stall on one side of a strongly convex function.
        if it % 8 == 0 {
            x = (lo + hi) / two;
        }
    }
    let fx = func(x) - target;
    Ok(Inversion { x, residual: fx, iterations: MAX_ITER })
}
