//! Tail integrals of a pot function.
//!
//! `f(x) = ∫₀ˣ dτ/σ(-τ)` and `g(x) = ∫₀ˣ τ f''(τ) dτ` measure how fast the
//! left tail of `σ` vanishes: `f⁻¹` sets the two-player growth rate and
//! `g⁻¹` the many-player cap. `g` is evaluated through the integrated-by-parts
//! form `x/σ(-x) - f(x)`; the direct integral is kept as a cross-check.
//!
//! Tolerances are mixed absolute/relative: a result `v` is accurate to
//! `quad_tol · max(1, |v|)`, since `f` reaches `e^{30}` and beyond on ranges
//! of interest where an absolute bound is below one ulp.

use crate::error::{domain, Result};
use crate::numeric::{adaptive_simpson, composite_simpson, invert_increasing, quad::MAX_DEPTH, InvertOptions};
use crate::potfn::PotFunction;
use crate::scalar::Real;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Tolerance of the finite-difference cross-check path for `g`.
const DIRECT_G_TOL: f64 = 1e-9;
const SCALE_PANELS: usize = 32;

#[derive(Clone, Debug)]
pub struct TailFunctions<T: Real = f64> {
    pot: PotFunction<T>,
    quad_tol: T,
}

impl<T: Real> TailFunctions<T> {
    pub fn new(pot: PotFunction<T>) -> Self {
        Self { pot, quad_tol: T::lit(DEFAULT_QUAD_TOL) }
    }

    pub fn with_tol(pot: PotFunction<T>, quad_tol: T) -> Result<Self> {
        if !(quad_tol > T::zero()) || !quad_tol.is_finite() {
            return Err(domain("quad_tol", format!("must be positive, got {quad_tol}")));
        }
        Ok(Self { pot, quad_tol })
    }

    pub fn pot(&self) -> &PotFunction<T> {
        &self.pot
    }

    pub fn quad_tol(&self) -> T {
        self.quad_tol
    }

    /// Largest argument accepted by `eval_f` / `eval_g`.
    pub fn domain_limit(&self) -> T {
        self.pot.tail_limit()
    }

    fn check_arg(&self, name: &'static str, x: T) -> Result<()> {
        if !x.is_finite() || x < T::zero() {
            return Err(domain(name, format!("expected a finite value >= 0, got {x}")));
        }
        if x > self.domain_limit() {
            return Err(domain(
                name,
                format!("{x} exceeds the representable tail range [0, {}] of {}", self.domain_limit(), self.pot.name()),
            ));
        }
        Ok(())
    }

    /// `f'(x) = 1/σ(-x)`.
    pub fn f_prime(&self, x: T) -> T {
        T::one() / self.pot.left_tail(x)
    }

    fn integrate<F: Fn(T) -> T>(&self, integrand: F, x: T, tol: T) -> T {
        let scale = composite_simpson(&integrand, T::zero(), x, SCALE_PANELS).abs().max(T::one());
        adaptive_simpson(&integrand, T::zero(), x, tol * scale, MAX_DEPTH).value
    }

    pub fn eval_f(&self, x: T) -> Result<T> {
        self.check_arg("x", x)?;
        if x == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.integrate(|t| self.f_prime(t), x, self.quad_tol))
    }

    /// `f(b) - f(a)` for `0 ≤ a ≤ b`, integrated over `[a, b]` only.
    pub fn f_increment(&self, a: T, b: T) -> Result<T> {
        self.check_arg("a", a)?;
        self.check_arg("b", b)?;
        if b < a {
            return Err(domain("b", format!("expected b >= a, got a={a}, b={b}")));
        }
        if a == b {
            return Ok(T::zero());
        }
        let integrand = |t| self.f_prime(t);
        let scale = composite_simpson(integrand, a, b, SCALE_PANELS).abs().max(T::one());
        Ok(adaptive_simpson(integrand, a, b, self.quad_tol * scale, MAX_DEPTH).value)
    }

    /// `g(x)` through `x/σ(-x) - f(x)`.
    pub fn eval_g(&self, x: T) -> Result<T> {
        let f = self.eval_f(x)?;
        if x == T::zero() {
            return Ok(T::zero());
        }
        Ok(x * self.f_prime(x) - f)
    }

    /// `f''(τ)` by central differences of `f'` with step
    /// `h = max(1e-5, 1e-5|τ|)`, Richardson-extrapolated with `h/2`.
    pub fn f_second_fd(&self, t: T) -> T {
        let h = T::lit(1e-5).max(T::lit(1e-5) * t.abs());
        let central = |h: T| (self.f_prime(t + h) - self.f_prime(t - h)) / (h + h);
        (T::lit(4.0) * central(h / T::lit(2.0)) - central(h)) / T::lit(3.0)
    }

    /// `g(x)` by direct quadrature of `τ f''(τ)` with a finite-difference
    /// `f''`; accurate to roughly `1e-9` relative.
    pub fn eval_g_direct(&self, x: T) -> Result<T> {
        self.check_arg("x", x)?;
        if x == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.integrate(|t| t * self.f_second_fd(t), x, T::lit(DIRECT_G_TOL)))
    }

    fn check_target(&self, y: T) -> Result<()> {
        if !y.is_finite() || y < T::zero() {
            return Err(domain("y", format!("expected a finite value >= 0, got {y}")));
        }
        Ok(())
    }

    /// `f⁻¹(y)`.
    pub fn invert_f(&self, y: T) -> Result<T> {
        self.check_target(y)?;
        if y == T::zero() {
            return Ok(T::zero());
        }
        let deriv = |x: T| self.f_prime(x);
        let opts = InvertOptions {
            lower: T::zero(),
            start: T::one(),
            upper_limit: self.domain_limit(),
            tol: self.quad_tol,
        };
        let inv = invert_increasing(|x| self.eval_f(x).unwrap_or(T::infinity()), Some(&deriv), y, opts)?;
        Ok(inv.x)
    }

    /// `g⁻¹(y)`.
    pub fn invert_g(&self, y: T) -> Result<T> {
        self.check_target(y)?;
        if y == T::zero() {
            return Ok(T::zero());
        }
        // g'(x) = x f''(x); the finite-difference estimate only steers steps.
        let deriv = |x: T| x * self.f_second_fd(x);
        let opts = InvertOptions {
            lower: T::zero(),
            start: T::one(),
            upper_limit: self.domain_limit(),
            tol: self.quad_tol,
        };
        let inv = invert_increasing(|x| self.eval_g(x).unwrap_or(T::infinity()), Some(&deriv), y, opts)?;
        Ok(inv.x)
    }
}
