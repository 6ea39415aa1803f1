//! Closed-form bounds on the largest reachable rating.
//!
//! The two-player interval, the ladder guarantee, the potential `Φ` and its
//! lower bound, the game-count lower bound and the rating cap derived from
//! it, plus the asymptotic forms for the built-in pot functions.

use crate::dynamics::RatingState;
use crate::error::{domain, Error, Result};
use crate::potfn::{PotFunction, PotKind};
use crate::scalar::Real;
use crate::strategies::LADDER_CONSTANT;
use crate::tails::TailFunctions;

/// Half-width of the two-player interval around `½f⁻¹(2k)`.
pub const THEOREM1_HALF_WIDTH: f64 = 3.0;

/// Points in the growth-premise probe for [`coro1_cap`].
const PROBE_POINTS: usize = 200;

/// `Φ(r; π) = ‖r‖² + Σ f(r_{π(ℓ)} - r_{π(ℓ+1)})` with `π` sorting `r`
/// into non-increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiValue<T: Real = f64> {
    pub state: RatingState<T>,
    pub pi: Vec<usize>,
    pub value: T,
}

pub fn phi<T: Real>(state: &RatingState<T>, tails: &TailFunctions<T>) -> Result<PhiValue<T>> {
    if state.is_empty() {
        return Err(domain("state", "needs at least one player"));
    }
    let pi = state.sorting_permutation();
    let mut value = state.norm_sq();
    for w in pi.windows(2) {
        value = value + tails.eval_f(state.rating(w[0]) - state.rating(w[1]))?;
    }
    Ok(PhiValue { state: state.clone(), pi, value })
}

/// Constant of the upset-free rewriting: `2·sup_{z≥0} σ(-z)/σ(-z-2σ(-z))`.
pub fn lemma1_constant<T: Real>(pot: &PotFunction<T>) -> T {
    T::lit(2.0) * pot.sup4()
}

/// Per-unit-pot growth of `Φ` along non-upset edges:
/// `6 + 4·sup_{z≥0} σ(-z)/σ(-z-2σ(-z)) + 1/σ(-1)`.
pub fn lemma2_constant<T: Real>(pot: &PotFunction<T>) -> T {
    pot.constants().c2
}

/// `C = 1/(8·C₁·C₂)`, the largest constant the game-count bound allows.
pub fn thm3_constant<T: Real>(pot: &PotFunction<T>) -> T {
    T::one() / (T::lit(8.0) * lemma1_constant(pot) * lemma2_constant(pot))
}

fn check_rating<T: Real>(r: T) -> Result<()> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(domain("rating", format!("expected a finite value > 0, got {r}")));
    }
    Ok(())
}

/// `R³ / (8·g⁻¹(R²/4))`: `Φ` at any state whose top rating is at least `R`
/// is no smaller than this.
pub fn lemma3_bound<T: Real>(r: T, tails: &TailFunctions<T>) -> Result<T> {
    check_rating(r)?;
    let four = T::lit(4.0);
    Ok(r * r * r / (T::lit(8.0) * tails.invert_g(r * r / four)?))
}

/// `C·R³ / g⁻¹(R²/4)`: games needed before any rating reaches `R`.
pub fn thm3_games_lb<T: Real>(r: T, c: T, tails: &TailFunctions<T>) -> Result<T> {
    check_rating(r)?;
    check_c(c)?;
    let four = T::lit(4.0);
    Ok(c * r * r * r / tails.invert_g(r * r / four)?)
}

fn check_c<T: Real>(c: T) -> Result<()> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(domain("C", format!("expected a finite value > 0, got {c}")));
    }
    Ok(())
}

/// Range `[lo, hi]` on which the growth premise `g(x) ≥ (ax)²` is probed.
pub fn growth_probe_range<T: Real>(tails: &TailFunctions<T>) -> (T, T) {
    (T::lit(2.0), T::lit(50.0).min(tails.domain_limit()))
}

/// Checks `g(x) ≥ (ax)²` on [`growth_probe_range`], returning the first
/// failing `x`.
pub fn check_growth_premise<T: Real>(a: T, tails: &TailFunctions<T>) -> Result<()> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(domain("a", format!("expected a finite value > 0, got {a}")));
    }
    let (lo, hi) = growth_probe_range(tails);
    let step = (hi - lo) / T::from_usize(PROBE_POINTS - 1).unwrap();
    for i in 0..PROBE_POINTS {
        let x = lo + step * T::from_usize(i).unwrap();
        let ax = a * x;
        if tails.eval_g(x)? < ax * ax {
            return Err(Error::GrowthPremise { a: a.to_f64_lossy(), x: x.to_f64_lossy() });
        }
    }
    Ok(())
}

/// `C^{-1/3}·k^{1/3}·g⁻¹(k/(8aC))^{1/3}`, the largest rating reachable in
/// `k` games with any number of players, valid when `g(x) ≥ (ax)²`.
pub fn coro1_cap<T: Real>(k: u64, c: T, a: T, tails: &TailFunctions<T>) -> Result<T> {
    check_c(c)?;
    check_growth_premise(a, tails)?;
    let kf = T::from_u64(k).unwrap();
    let inner = tails.invert_g(kf / (T::lit(8.0) * a * c))?;
    Ok((kf * inner / c).cbrt())
}

/// `[½f⁻¹(2k) - 3, ½f⁻¹(2k) + 3]`.
pub fn theorem1_interval<T: Real>(k: u64, tails: &TailFunctions<T>) -> Result<(T, T)> {
    let mid = tails.invert_f(T::lit(2.0) * T::from_u64(k).unwrap())? / T::lit(2.0);
    let w = T::lit(THEOREM1_HALF_WIDTH);
    Ok((mid - w, mid + w))
}

/// `1.14·c₁·k^{1/3} - A`, or `None` when the pot has no threshold.
pub fn thm2_lower<T: Real>(k: u64, pot: &PotFunction<T>) -> Option<T> {
    let a = pot.compute_a()?;
    let c1 = pot.c1()?;
    Some(T::lit(LADDER_CONSTANT) * c1 * T::from_u64(k).unwrap().cbrt() - a)
}

/// Constants behind a [`BoundReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundConstants<T: Real = f64> {
    /// Rewriting constant `C₁`.
    pub c1: T,
    /// Potential growth constant `C₂`.
    pub c2: T,
    /// Game-count constant `C = 1/(8C₁C₂)`.
    pub c: T,
    /// Growth-premise slope `a`.
    pub a: T,
    /// Ladder threshold `A`, when it exists.
    pub threshold: Option<T>,
    /// Ladder constant `(σ(-A)A²)^{1/3}`.
    pub ladder_c1: Option<T>,
}

/// What a report was computed for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundScale<T> {
    Games(u64),
    Rating(T),
}

/// Every bound that applies at one scale. Game-count queries fill the
/// interval, the guarantee and the cap; rating queries fill the `Φ` bound
/// and the game-count bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T: Real = f64> {
    pub sigma_name: String,
    pub scale: BoundScale<T>,
    pub theorem1_interval: Option<(T, T)>,
    pub thm2_lower: Option<T>,
    pub lemma3_phi_lb: Option<T>,
    pub thm3_games_lb: Option<T>,
    pub coro1_cap: Option<T>,
    pub constants: BoundConstants<T>,
}

impl<T: Real> BoundReport<T> {
    pub fn constants_for(pot: &PotFunction<T>, a: T) -> BoundConstants<T> {
        BoundConstants {
            c1: lemma1_constant(pot),
            c2: lemma2_constant(pot),
            c: thm3_constant(pot),
            a,
            threshold: pot.compute_a(),
            ladder_c1: pot.c1(),
        }
    }

    pub fn for_games(k: u64, tails: &TailFunctions<T>, a: T) -> Result<Self> {
        let pot = tails.pot();
        let constants = Self::constants_for(pot, a);
        Ok(Self {
            sigma_name: pot.name(),
            scale: BoundScale::Games(k),
            theorem1_interval: Some(theorem1_interval(k, tails)?),
            thm2_lower: thm2_lower(k, pot),
            lemma3_phi_lb: None,
            thm3_games_lb: None,
            coro1_cap: Some(coro1_cap(k, constants.c, a, tails)?),
            constants,
        })
    }

    pub fn for_rating(r: T, tails: &TailFunctions<T>, a: T) -> Result<Self> {
        let pot = tails.pot();
        let constants = Self::constants_for(pot, a);
        Ok(Self {
            sigma_name: pot.name(),
            scale: BoundScale::Rating(r),
            theorem1_interval: None,
            thm2_lower: None,
            lemma3_phi_lb: Some(lemma3_bound(r, tails)?),
            thm3_games_lb: Some(thm3_games_lb(r, constants.c, tails)?),
            coro1_cap: None,
            constants,
        })
    }
}

/// Asymptotic forms of the largest rating for a built-in pot function.
#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row<T: Real = f64> {
    pub sigma_name: String,
    pub k: u64,
    /// Two-player closed form, e.g. `½ ln k` for the logistic pot.
    pub n2_value: T,
    /// Order of the many-player cap with its constant dropped.
    pub n_inf_order: T,
    /// Symbolic version of `n_inf_order`.
    pub n_inf_formula: String,
}

pub fn table1_row<T: Real>(pot: &PotFunction<T>, k: u64) -> Result<Table1Row<T>> {
    let kf = T::from_u64(k).unwrap();
    let ln_k = kf.ln();
    let half = T::lit(0.5);
    let third = T::one() / T::lit(3.0);
    let (n2_value, n_inf_order, n_inf_formula) = match pot.kind() {
        PotKind::Logistic => (half * ln_k, kf.cbrt() * ln_k.cbrt(), "k^(1/3) ln^(1/3) k".to_string()),
        PotKind::Erf => (half * ln_k.sqrt(), kf.cbrt() * ln_k.powf(T::lit(1.0 / 6.0)), "k^(1/3) ln^(1/6) k".to_string()),
        PotKind::Algebraic { p } => {
            let p = *p;
            let n2 = half * (T::one() + p.recip()).powf((p + T::one()).recip()) * kf.powf((p + T::one()).recip());
            let exp = third + T::lit(2.0) / (T::lit(3.0) * (T::lit(3.0) * p + T::one()));
            (n2, kf.powf(exp), format!("k^(1/3 + 2/(3(3p+1))), p={p}"))
        }
        PotKind::Custom { .. } => {
            return Err(domain("sigma", format!("no closed form for custom pot function {}", pot.name())))
        }
    };
    Ok(Table1Row { sigma_name: pot.name(), k, n2_value, n_inf_order, n_inf_formula })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn logistic() -> TailFunctions<f64> {
        TailFunctions::new(PotFunction::<f64>::logistic())
    }

    #[test]
    fn phi_examples() {
        let t = logistic();
        assert_eq!(phi(&RatingState::origin(5), &t).unwrap().value, 0.0);
        let a = phi(&RatingState::from_vec(vec![1.0, -1.0]).unwrap(), &t).unwrap();
        assert_abs_diff_eq!(a.value, 3.0 + 2f64.exp(), epsilon = 1e-9);
        assert_eq!(a.pi, vec![0, 1]);
        let b = phi(&RatingState::from_vec(vec![-1.0, 1.0]).unwrap(), &t).unwrap();
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-12);
        assert_eq!(b.pi, vec![1, 0]);
    }

    #[test]
    fn logistic_constants() {
        let pot = PotFunction::<f64>::logistic();
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(lemma1_constant(&pot), 1.0 + e, epsilon = 1e-9);
        assert_abs_diff_eq!(lemma2_constant(&pot), 6.0 + 2.0 * (1.0 + e) + (1.0 + e), epsilon = 1e-9);
        assert_abs_diff_eq!(lemma2_constant(&pot), 17.154_845_485_377_1, epsilon = 1e-9);
        for p in [PotFunction::<f64>::erf(), PotFunction::<f64>::algebraic(2.0).unwrap()] {
            assert!(lemma2_constant(&p) > 7.0);
        }
    }

    #[test]
    fn lemma3_values() {
        let t = logistic();
        assert_abs_diff_eq!(lemma3_bound(2.0, &t).unwrap(), 1.0, epsilon = 1e-9);
        // 1000 / (8 g⁻¹(25)) with g⁻¹(25) from an mpmath root.
        assert_abs_diff_eq!(lemma3_bound(10.0, &t).unwrap(), 46.868_831_306_567_1, epsilon = 1e-7);
        assert!(lemma3_bound(0.0, &t).is_err());
        assert!(lemma3_bound(-1.0, &t).is_err());
    }

    #[test]
    fn growth_premise_probe() {
        let t = logistic();
        assert!(check_growth_premise(1.0, &t).is_ok());
        assert!(matches!(check_growth_premise(3.0, &t), Err(Error::GrowthPremise { .. })));
        assert!(coro1_cap(100, 0.01, 3.0, &t).is_err());
        assert!(coro1_cap(100, 0.0, 1.0, &t).is_err());
    }

    #[test]
    fn cap_dominates_guarantee_and_grows_like_cube_root_log() {
        let t = logistic();
        let pot = t.pot().clone();
        let c = thm3_constant(&pot);
        let mut ratios = Vec::new();
        for e in 3..=9 {
            let k = 10u64.pow(e);
            let cap = coro1_cap(k, c, 1.0, &t).unwrap();
            assert!(cap >= thm2_lower(k, &pot).unwrap());
            let kf = k as f64;
            ratios.push(cap / (kf.cbrt() * kf.ln().cbrt()));
        }
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0f64), |(l, h), &r| (l.min(r), h.max(r)));
        assert!(hi / lo < 2.0, "{ratios:?}");
    }

    #[test]
    fn interval_and_reports() {
        let t = logistic();
        let (lo, hi) = theorem1_interval(100, &t).unwrap();
        assert_abs_diff_eq!((lo + hi) / 2.0, 5.276_701_917_304_37 / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(hi - lo, 6.0, epsilon = 1e-12);
        let g = BoundReport::for_games(1000, &t, 1.0).unwrap();
        assert!(g.theorem1_interval.is_some() && g.coro1_cap.is_some() && g.lemma3_phi_lb.is_none());
        let r = BoundReport::for_rating(10.0, &t, 1.0).unwrap();
        assert!(r.lemma3_phi_lb.unwrap() > 0.0 && r.thm3_games_lb.unwrap() > 0.0);
        assert!(r.constants.threshold.is_some());
    }

    #[test]
    fn table1_examples() {
        let row = table1_row(&PotFunction::<f64>::logistic(), 1_000_000).unwrap();
        assert_abs_diff_eq!(row.n2_value, 6.907_755_278_982_137, epsilon = 1e-12);
        let row = table1_row(&PotFunction::<f64>::algebraic(1.0).unwrap(), 10_000).unwrap();
        assert_abs_diff_eq!(row.n2_value, 70.710_678_118_654_75, epsilon = 1e-9);
        let row = table1_row(&PotFunction::<f64>::erf(), 1_000_000).unwrap();
        assert_abs_diff_eq!(row.n2_value, 1.858_461_094_424_919, epsilon = 1e-12);
        let custom = PotFunction::<f64>::custom("mine", |z| 1.0 / (1.0 + (-z).exp())).unwrap();
        assert!(table1_row(&custom, 10).is_err());
    }
}
