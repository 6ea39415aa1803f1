//! Pot functions: the stake rule `σ` of a generalized Elo system.
//!
//! A pot function maps a rating difference to the number of points a player
//! stakes; for `σ(z) + σ(-z) = 1` it doubles as the win probability of the
//! stronger side. This module provides the built-in family, table-backed
//! custom functions, the four regularity checks every routine downstream
//! relies on, and the constants derived from `σ` (threshold `A`, `c₁`, the
//! condition-4 supremum and `C₂`).

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{domain, Error, Result};
use crate::numeric::{golden_max, MonotoneCubic};
use crate::scalar::Real;

/// Table knots closer than this (relative to `max(1, |z|)`) are averaged.
const KNOT_MERGE_TOL: f64 = 1e-9;

/// Largest value of `-ln σ(-x)` for which `1/σ(-x)` is still comfortably
/// representable in `f64`.
const TAIL_LOG_LIMIT: f64 = 690.0;
/// Hard cap on the tail domain for polynomially decaying pot functions.
const TAIL_ABS_LIMIT: f64 = 1e8;
/// Switch point for the asymptotic `erfc` expansion in log space.
const ERFC_ASYMPTOTIC_FROM: f64 = 25.0;

/// Which member of the pot-function family this is.
#[derive(Clone, Debug, PartialEq)]
pub enum PotKind<T> {
    /// `1 / (1 + e^{-z})`
    Logistic,
    /// `½ z / (1 + |z|^p)^{1/p} + ½` with `p ≥ 1`
    Algebraic { p: T },
    /// `½ erf(z/√2) + ½`, the standard normal CDF
    Erf,
    /// User-supplied function, identified by name.
    Custom { name: String },
}

type Closure<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Shape<T> {
    Logistic,
    Algebraic(T),
    Erf,
    /// Interpolates `ln σ` on `z ≤ 0` and reflects through `σ(z) = 1 - σ(-z)`.
    Table(Arc<MonotoneCubic<T>>),
    Closure(Closure<T>),
}

/// Constants derived from `σ`, computed once on first use.
#[derive(Clone, Debug, PartialEq)]
pub struct PotConstants<T> {
    /// Sampled `sup_{z≥0} σ(-z)/σ(-z-2σ(-z))` over `[0, 100]`.
    pub sup4: T,
    /// Where the sampled supremum was attained.
    pub sup4_argmax: T,
    /// `sup4` inflated by the 1% safety margin.
    pub sup4_certified: T,
    /// `argmax_{z≥0} σ(-z) z²`, absent when that product keeps growing.
    pub threshold: Option<T>,
    /// `(σ(-A) A²)^{1/3}`.
    pub c1: Option<T>,
    /// `6 + 4·sup4 + 1/σ(-1)`.
    pub c2: T,
    /// Largest `x` at which the tail integrand `1/σ(-x)` may be evaluated.
    pub tail_limit: T,
}

/// A pot function together with its lazily computed constants.
///
/// Values are immutable and may be shared between threads; the constants are
/// computed at most once.
#[derive(Clone)]
pub struct PotFunction<T: Real = f64> {
    kind: PotKind<T>,
    shape: Shape<T>,
    constants: Arc<OnceLock<PotConstants<T>>>,
}

impl<T: Real> fmt::Debug for PotFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotFunction").field("kind", &self.kind).finish_non_exhaustive()
    }
}

impl<T: Real> PotFunction<T> {
    fn from_shape(kind: PotKind<T>, shape: Shape<T>) -> Self {
        Self { kind, shape, constants: Arc::new(OnceLock::new()) }
    }

    pub fn logistic() -> Self {
        Self::from_shape(PotKind::Logistic, Shape::Logistic)
    }

    pub fn erf() -> Self {
        Self::from_shape(PotKind::Erf, Shape::Erf)
    }

    pub fn algebraic(p: T) -> Result<Self> {
        if !(p >= T::one()) || !p.is_finite() {
            return Err(domain("p", format!("algebraic pot needs finite p >= 1, got {p}")));
        }
        Ok(Self::from_shape(PotKind::Algebraic { p }, Shape::Algebraic(p)))
    }

    /// Builds a pot function from its kind. Custom kinds cannot be built this
    /// way; use [`PotFunction::custom`] or [`PotFunction::from_table`].
    pub fn new(kind: PotKind<T>) -> Result<Self> {
        match kind {
            PotKind::Logistic => Ok(Self::logistic()),
            PotKind::Erf => Ok(Self::erf()),
            PotKind::Algebraic { p } => Self::algebraic(p),
            PotKind::Custom { name } => {
                Err(Error::InvalidPot(format!("custom pot `{name}` needs an evaluator")))
            }
        }
    }

    /// Wraps an arbitrary evaluator, rejecting it unless all four regularity
    /// assumptions pass on the default grid.
    pub fn custom<F>(name: impl Into<String>, eval: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let pot = Self::from_shape(PotKind::Custom { name: name.into() }, Shape::Closure(Arc::new(eval)));
        pot.require_valid()?;
        Ok(pot)
    }

    /// Builds a pot function from sampled `(z, σ(z))` pairs.
    ///
    /// Points with `z > 0` are reflected through `σ(-z) = 1 - σ(z)`, so the
    /// table may cover either or both sides; the left tail is interpolated
    /// monotonically in log space and continued exponentially beyond the
    /// smallest sample.
    pub fn from_table(name: impl Into<String>, points: &[(T, T)]) -> Result<Self> {
        let pot = Self::from_table_unvalidated(name, points)?;
        pot.require_valid()?;
        Ok(pot)
    }

    /// [`PotFunction::from_table`] without the assumption check, for callers
    /// that want the full [`ValidationReport`] instead of the first failure.
    pub fn from_table_unvalidated(name: impl Into<String>, points: &[(T, T)]) -> Result<Self> {
        let mut left: Vec<(T, T)> = Vec::with_capacity(points.len() + 1);
        for &(z, s) in points {
            if !z.is_finite() || !(s > T::zero() && s < T::one()) {
                return Err(Error::PotTable(format!("sample ({z}, {s}) must have finite z and 0 < σ < 1")));
            }
            if z.abs() <= T::lit(KNOT_MERGE_TOL) {
                continue;
            }
            left.push(if z > T::zero() { (-z, T::one() - s) } else { (z, s) });
        }
        left.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        let mut xs: Vec<T> = Vec::new();
        let mut ys: Vec<T> = Vec::new();
        let mut i = 0;
        while i < left.len() {
            let z = left[i].0;
            let mut acc = T::zero();
            let mut count = 0usize;
            while i < left.len() && left[i].0 - z <= T::lit(KNOT_MERGE_TOL) * z.abs().max(T::one()) {
                acc = acc + left[i].1;
                count += 1;
                i += 1;
            }
            xs.push(z);
            ys.push((acc / T::from_usize(count).unwrap()).ln());
        }
        xs.push(T::zero());
        ys.push(T::lit(0.5).ln());
        if xs.len() < 3 {
            return Err(Error::PotTable("need at least two samples away from z = 0".into()));
        }
        if ys.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::PotTable("samples are not strictly increasing".into()));
        }
        let interp = MonotoneCubic::new(xs, ys).ok_or_else(|| Error::PotTable("bad knots".into()))?;
        if !(interp.left_slope() > T::zero()) {
            return Err(Error::PotTable("left tail must decay".into()));
        }
        Ok(Self::from_shape(PotKind::Custom { name: name.into() }, Shape::Table(Arc::new(interp))))
    }

    /// Parses a two-column CSV (`z,sigma`), skipping a non-numeric header.
    pub fn from_table_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        Self::from_table(name, &Self::parse_table_csv(text)?)
    }

    /// Reads `(z, σ(z))` pairs from two-column CSV text.
    pub fn parse_table_csv(text: &str) -> Result<Vec<(T, T)>> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::PotTable(format!("line {}: expected two columns", lineno + 1))),
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(z), Ok(s)) => points.push((T::lit(z), T::lit(s))),
                _ if points.is_empty() && lineno == 0 => continue,
                _ => return Err(Error::PotTable(format!("line {}: non-numeric entry", lineno + 1))),
            }
        }
        Ok(points)
    }

    /// Parses a CLI pot name: `logistic`, `erf` or `alg:p=<real>`.
    pub fn from_name(text: &str) -> Result<Self> {
        match text.trim() {
            "logistic" => Ok(Self::logistic()),
            "erf" => Ok(Self::erf()),
            s => {
                let p = s
                    .strip_prefix("alg:p=")
                    .ok_or_else(|| Error::InvalidPot(format!("unknown pot function `{s}`")))?;
                let p: f64 = p.parse().map_err(|_| Error::InvalidPot(format!("bad exponent in `{s}`")))?;
                Self::algebraic(T::lit(p))
            }
        }
    }

    pub fn kind(&self) -> &PotKind<T> {
        &self.kind
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, PotKind::Custom { .. })
    }

    /// Name as accepted by [`PotFunction::from_name`] (custom pots report
    /// their own name).
    pub fn name(&self) -> String {
        match &self.kind {
            PotKind::Logistic => "logistic".into(),
            PotKind::Erf => "erf".into(),
            PotKind::Algebraic { p } => format!("alg:p={p}"),
            PotKind::Custom { name } => name.clone(),
        }
    }

    /// `σ(z)`.
    pub fn eval(&self, z: T) -> T {
        match &self.shape {
            Shape::Logistic => {
                if z >= T::zero() {
                    T::one() / (T::one() + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (T::one() + e)
                }
            }
            Shape::Closure(f) => f(z),
            _ => {
                if z <= T::zero() {
                    self.left_tail(-z)
                } else {
                    T::one() - self.left_tail(z)
                }
            }
        }
    }

    /// `σ(-x)` evaluated without cancellation for `x ≥ 0`.
    pub fn left_tail(&self, x: T) -> T {
        let half = T::lit(0.5);
        match &self.shape {
            Shape::Logistic => self.eval(-x),
            Shape::Algebraic(p) => {
                if x == T::zero() {
                    return half;
                }
                let u = x.powf(-*p);
                half * -(-(u.ln_1p()) / *p).exp_m1()
            }
            Shape::Erf => half * (x / T::SQRT_2()).erfc(),
            Shape::Table(m) => m.eval(-x).exp(),
            Shape::Closure(f) => f(-x),
        }
    }

    /// `ln σ(z)`, finite wherever `σ(z) > 0` holds mathematically.
    pub fn ln_eval(&self, z: T) -> T {
        match &self.shape {
            Shape::Logistic => {
                if z >= T::zero() {
                    -(-z).exp().ln_1p()
                } else {
                    z - z.exp().ln_1p()
                }
            }
            Shape::Closure(f) => f(z).ln(),
            _ if z > T::zero() => (-self.left_tail(z)).ln_1p(),
            Shape::Algebraic(p) => {
                let x = -z;
                if x == T::zero() {
                    return T::lit(0.5).ln();
                }
                let u = x.powf(-*p);
                T::lit(0.5).ln() + (-(-(u.ln_1p()) / *p).exp_m1()).ln()
            }
            Shape::Erf => {
                let x = -z / T::SQRT_2();
                if x < T::lit(ERFC_ASYMPTOTIC_FROM) {
                    (T::lit(0.5) * x.erfc()).ln()
                } else {
                    let inv = T::one() / (x * x);
                    let series = T::one()
                        + inv
                            * (T::lit(-0.5)
                                + inv * (T::lit(0.75) + inv * (T::lit(-1.875) + inv * T::lit(6.5625))));
                    -x * x - (x * T::PI().sqrt()).ln() + series.ln() - T::LN_2()
                }
            }
            Shape::Table(m) => m.eval(z),
        }
    }

    /// Derived constants (computed on first call, then cached).
    pub fn constants(&self) -> &PotConstants<T> {
        self.constants.get_or_init(|| compute_constants(self))
    }

    /// Threshold `A = argmax_{z≥0} σ(-z) z²`, if it exists.
    pub fn compute_a(&self) -> Option<T> {
        self.constants().threshold
    }

    /// `c₁ = (σ(-A) A²)^{1/3}`, if `A` exists.
    pub fn c1(&self) -> Option<T> {
        self.constants().c1
    }

    pub fn sup4(&self) -> T {
        self.constants().sup4
    }

    pub fn tail_limit(&self) -> T {
        self.constants().tail_limit
    }

    /// Runs all four checks on `grid`.
    pub fn validate(&self, grid: &ValidationGrid<T>) -> Result<ValidationReport<T>> {
        grid.check()?;
        Ok(validate_on(self, grid))
    }

    fn require_valid(&self) -> Result<()> {
        let report = validate_on(self, &ValidationGrid::default());
        match report.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::InvalidPot(format!(
                "{} fails assumption {} at z = {}",
                self.name(),
                c.assumption,
                c.witness.map(|w| w.to_f64_lossy()).unwrap_or(f64::NAN)
            ))),
        }
    }
}

/// Sampling plan for [`PotFunction::validate`].
#[derive(Clone, Copy, Debug)]
pub struct ValidationGrid<T> {
    /// Grid covers `[-half_width, half_width]`; at least 50.
    pub half_width: T,
    /// Number of samples; at least 10⁴.
    pub points: usize,
    /// Allowed `|σ(z) + σ(-z) - 1|`.
    pub symmetry_tol: T,
    /// Right end of the condition-4 sampling interval.
    pub sup4_range: T,
}

impl<T: Real> Default for ValidationGrid<T> {
    fn default() -> Self {
        Self { half_width: T::lit(50.0), points: 10_001, symmetry_tol: T::lit(1e-12), sup4_range: T::lit(100.0) }
    }
}

impl<T: Real> ValidationGrid<T> {
    fn check(&self) -> Result<()> {
        if !(self.half_width >= T::lit(50.0)) {
            return Err(domain("half_width", "validation grid must span at least [-50, 50]"));
        }
        if self.points < 10_000 {
            return Err(domain("points", "validation grid needs at least 10^4 samples"));
        }
        Ok(())
    }

    fn sample(&self, i: usize) -> T {
        let n = T::from_usize(self.points - 1).unwrap();
        -self.half_width + T::lit(2.0) * self.half_width * T::from_usize(i).unwrap() / n
    }
}

/// Outcome of one regularity assumption.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionCheck<T> {
    /// 1 through 4.
    pub assumption: u8,
    pub passed: bool,
    /// First sampled `z` at which the check failed.
    pub witness: Option<T>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub checks: [AssumptionCheck<T>; 4],
    pub sup4: T,
    pub sup4_argmax: T,
}

impl<T: Real> ValidationReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AssumptionCheck<T>> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn check<T: Real>(assumption: u8, witness: Option<(T, String)>) -> AssumptionCheck<T> {
    match witness {
        None => AssumptionCheck { assumption, passed: true, witness: None, detail: String::new() },
        Some((z, detail)) => AssumptionCheck { assumption, passed: false, witness: Some(z), detail },
    }
}

/// Ratio appearing in condition 4, evaluated in log space.
fn cond4_ratio<T: Real>(pot: &PotFunction<T>, z: T) -> T {
    let s = pot.left_tail(z);
    (pot.ln_eval(-z) - pot.ln_eval(-z - T::lit(2.0) * s)).exp()
}

fn sampled_sup4<T: Real>(pot: &PotFunction<T>, range: T, points: usize) -> (T, T) {
    let n = T::from_usize(points - 1).unwrap();
    let mut best = (T::zero(), T::neg_infinity());
    for i in 0..points {
        let z = range * T::from_usize(i).unwrap() / n;
        let r = cond4_ratio(pot, z);
        if r.is_nan() {
            return (z, T::nan());
        }
        if r > best.1 {
            best = (z, r);
        }
    }
    best
}

fn validate_on<T: Real>(pot: &PotFunction<T>, grid: &ValidationGrid<T>) -> ValidationReport<T> {
    let zs: Vec<T> = (0..grid.points).map(|i| grid.sample(i)).collect();

    // 1: positivity everywhere; strict increase is checked on the left half in
    // log space, where it stays representable, and carried to the right half
    // by the reflection identity (non-decrease is still checked there).
    let mut w1 = None;
    let mut prev: Option<(T, T, T)> = None;
    for &z in &zs {
        let (s, ls) = (pot.eval(z), pot.ln_eval(z));
        if !(s >= T::zero()) || !ls.is_finite() {
            w1 = Some((z, format!("σ({z}) = {s} is not positive")));
            break;
        }
        if let Some((pz, ps, pls)) = prev {
            let broken = if z <= T::zero() { !(pls < ls) } else { s < ps };
            if broken {
                w1 = Some((z, format!("σ decreases between {pz} and {z}")));
                break;
            }
        }
        prev = Some((z, s, ls));
    }

    let mut w2 = None;
    for &z in &zs {
        let dev = (pot.eval(z) + pot.eval(-z) - T::one()).abs();
        if !(dev <= grid.symmetry_tol) {
            w2 = Some((z, format!("|σ(z)+σ(-z)-1| = {dev}")));
            break;
        }
    }

    let mut w3 = None;
    for &z in zs.iter().filter(|z| **z > T::zero()) {
        let lhs = pot.eval(T::lit(2.0) - T::lit(2.0) * z) * z;
        if !(lhs < T::one()) {
            w3 = Some((z, format!("σ(2-2z)·z = {lhs} at z = {z}")));
            break;
        }
    }

    let (argmax, sup) = sampled_sup4(pot, grid.sup4_range, grid.points);
    let w4 = if sup.is_finite() { None } else { Some((argmax, format!("ratio is {sup}"))) };

    ValidationReport {
        checks: [check(1, w1), check(2, w2), check(3, w3), check(4, w4)],
        sup4: sup,
        sup4_argmax: argmax,
    }
}

/// `ln(σ(-z) z²)`; the product itself underflows for steep tails.
fn ln_threshold_objective<T: Real>(pot: &PotFunction<T>, z: T) -> T {
    pot.ln_eval(-z) + T::lit(2.0) * z.ln()
}

fn compute_threshold<T: Real>(pot: &PotFunction<T>) -> Option<T> {
    const GRID: usize = 4000;
    let (lo, hi) = (T::lit(1e-6), T::lit(200.0));
    let ratio = (hi / lo).ln() / T::from_usize(GRID - 1).unwrap();
    let zs: Vec<T> = (0..GRID).map(|i| lo * (ratio * T::from_usize(i).unwrap()).exp()).collect();
    let vals: Vec<T> = zs.iter().map(|&z| ln_threshold_objective(pot, z)).collect();
    let hundred = T::lit(100.0);
    let inner_max = zs
        .iter()
        .zip(&vals)
        .filter(|(z, _)| **z <= hundred)
        .map(|(_, v)| *v)
        .fold(T::neg_infinity(), T::max);
    if ln_threshold_objective(pot, hi) > inner_max {
        return None;
    }
    let (m, _) = vals
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let a = zs[m.saturating_sub(1)];
    let b = zs[(m + 1).min(GRID - 1)];
    let objective = |z| ln_threshold_objective(pot, z);
    let (z, _) = golden_max(objective, a, b, T::lit(1e-13));
    Some(polish_stationary(objective, a, b).unwrap_or(z))
}

/// Bisects on the sign of a Richardson-extrapolated central difference.
/// Comparing values alone cannot place a smooth maximum closer than about
/// `sqrt(ε)`; the slope changes sign sharply.
fn polish_stationary<T: Real, F: Fn(T) -> T>(func: F, mut a: T, mut b: T) -> Option<T> {
    let slope = |x: T| {
        let h = T::lit(1e-3) * x.abs().max(T::lit(1e-3));
        let d = |h: T| (func(x + h) - func(x - h)) / (h + h);
        (T::lit(4.0) * d(h / T::lit(2.0)) - d(h)) / T::lit(3.0)
    };
    if !(slope(a) > T::zero() && slope(b) < T::zero()) {
        return None;
    }
    for _ in 0..200 {
        let mid = (a + b) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        if slope(mid) > T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some((a + b) / T::lit(2.0))
}

fn compute_tail_limit<T: Real>(pot: &PotFunction<T>) -> T {
    let cap = T::lit(TAIL_ABS_LIMIT);
    let limit = T::lit(TAIL_LOG_LIMIT);
    let excess = |x: T| -pot.ln_eval(-x) - limit;
    let mut hi = T::one();
    while excess(hi) < T::zero() {
        if hi >= cap {
            return cap;
        }
        hi = (hi * T::lit(2.0)).min(cap);
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if excess(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    lo
}

fn compute_constants<T: Real>(pot: &PotFunction<T>) -> PotConstants<T> {
    let grid = ValidationGrid::<T>::default();
    let (sup4_argmax, sup4) = sampled_sup4(pot, grid.sup4_range, grid.points);
    let threshold = compute_threshold(pot);
    let c1 = threshold.map(|a| (pot.left_tail(a) * a * a).cbrt());
    let c2 = T::lit(6.0) + T::lit(4.0) * sup4 + T::one() / pot.left_tail(T::one());
    PotConstants {
        sup4,
        sup4_argmax,
        sup4_certified: sup4 * T::lit(1.01),
        threshold,
        c1,
        c2,
        tail_limit: compute_tail_limit(pot),
    }
}
