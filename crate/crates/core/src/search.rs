//! Exact optimum for tiny instances by depth-first branch and bound.
//!
//! Every game has a unit pot, so a node has at most `n(n-1)` children. Two
//! reductions keep the tree small:
//!
//! * players with exactly equal ratings are interchangeable, so only the
//!   lowest-indexed member of each tie class is tried as winner and as loser;
//! * one game raises the top rating by at most `σ(0) = ½` when `σ` is
//!   `½`-Lipschitz (all built-ins), and by less than 1 for any pot function,
//!   so a branch whose current top plus that allowance over the remaining
//!   games cannot beat the incumbent is cut.
//!
//! Among sequences reaching the same value the lexicographically smallest
//! `(winner, loser)` sequence is returned.

use crate::bounds::{coro1_cap, theorem1_interval, thm3_constant};
use crate::dynamics::{Move, Transcript};
use crate::error::{Error, Result};
use crate::potfn::PotFunction;
use crate::scalar::Real;
use crate::strategies::{ladder, repeat_win_value};
use crate::tails::TailFunctions;

pub const MAX_PLAYERS: usize = 6;
pub const MAX_GAMES: usize = 12;

/// Absorbs rounding in the pruning test.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SearchProblem<T: Real = f64> {
    pub pot: PotFunction<T>,
    pub n: usize,
    pub k: usize,
    /// Skip moves that only differ by exchanging equally rated players.
    pub symmetry: bool,
}

impl<T: Real> SearchProblem<T> {
    pub fn new(pot: PotFunction<T>, n: usize, k: usize) -> Result<Self> {
        let p = Self { pot, n, k, symmetry: true };
        p.check()?;
        Ok(p)
    }

    pub fn without_symmetry(mut self) -> Self {
        self.symmetry = false;
        self
    }

    fn check(&self) -> Result<()> {
        if !(2..=MAX_PLAYERS).contains(&self.n) {
            return Err(Error::SearchLimits(format!("n = {} must lie in 2..={MAX_PLAYERS}", self.n)));
        }
        if self.k > MAX_GAMES {
            return Err(Error::SearchLimits(format!("k = {} exceeds {MAX_GAMES}", self.k)));
        }
        Ok(())
    }

    /// Largest possible rise of the top rating in one game.
    pub fn per_game_allowance(&self) -> T {
        if self.pot.is_builtin() {
            T::lit(0.5)
        } else {
            T::one()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult<T: Real = f64> {
    pub best_value: T,
    pub best_transcript: Transcript<T>,
    pub nodes_expanded: u64,
    pub pruned: u64,
}

struct Dfs<'a, T: Real> {
    pot: &'a PotFunction<T>,
    k: usize,
    symmetry: bool,
    allowance: T,
    seed: T,
    ratings: Vec<T>,
    path: Vec<(usize, usize)>,
    best: Option<(T, Vec<(usize, usize)>)>,
    nodes: u64,
    pruned: u64,
}

impl<T: Real> Dfs<'_, T> {
    fn representative(&self, player: usize, skip: usize) -> bool {
        !self.symmetry || !(0..player).any(|q| q != skip && self.ratings[q] == self.ratings[player])
    }

    fn visit(&mut self, depth: usize) {
        self.nodes += 1;
        let top = self.ratings.iter().copied().fold(T::neg_infinity(), T::max);
        let remaining = self.k - depth;
        if remaining == 0 {
            if self.best.as_ref().is_none_or(|(v, _)| top > *v) {
                self.best = Some((top, self.path.clone()));
            }
            return;
        }
        let bound = top + self.allowance * T::from_usize(remaining).unwrap() + T::lit(PRUNE_SLACK);
        if bound < self.seed || self.best.as_ref().is_some_and(|(v, _)| bound <= *v) {
            self.pruned += 1;
            return;
        }
        let n = self.ratings.len();
        for w in 0..n {
            if !self.representative(w, usize::MAX) {
                continue;
            }
            for l in 0..n {
                if l == w || !self.representative(l, w) {
                    continue;
                }
                let (rw, rl) = (self.ratings[w], self.ratings[l]);
                let amount = self.pot.eval(rl - rw);
                self.ratings[w] = rw + amount;
                self.ratings[l] = rl - amount;
                self.path.push((w, l));
                self.visit(depth + 1);
                self.path.pop();
                self.ratings[w] = rw;
                self.ratings[l] = rl;
            }
        }
    }
}

/// Values known to be reachable, used only to cut branches early.
fn seed_value<T: Real>(p: &SearchProblem<T>) -> T {
    let mut seed = repeat_win_value(&p.pot, p.k as u64);
    if let Ok(run) = ladder(&p.pot, p.k as u64) {
        if run.players_used() <= p.n {
            seed = seed.max(run.r1);
        }
    }
    seed - T::lit(PRUNE_SLACK)
}

pub fn solve<T: Real>(p: &SearchProblem<T>) -> Result<SearchResult<T>> {
    p.check()?;
    let mut dfs = Dfs {
        pot: &p.pot,
        k: p.k,
        symmetry: p.symmetry,
        allowance: p.per_game_allowance(),
        seed: seed_value(p),
        ratings: vec![T::zero(); p.n],
        path: Vec::with_capacity(p.k),
        best: None,
        nodes: 0,
        pruned: 0,
    };
    dfs.visit(0);
    let (best_value, moves) = dfs.best.expect("the seed is reachable, so some leaf is kept");
    let mut best_transcript = Transcript::new(p.n, p.pot.name());
    best_transcript.moves = moves.into_iter().map(|(w, l)| Move::win(w, l)).collect();
    Ok(SearchResult { best_value, best_transcript, nodes_expanded: dfs.nodes, pruned: dfs.pruned })
}

/// Optimum against the strategies and bounds that apply to the same
/// instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison<T: Real = f64> {
    pub optimum: T,
    pub repeat_win: T,
    /// Ladder value, when the threshold exists and the run fits in `n`
    /// players.
    pub ladder: Option<T>,
    /// Two-player interval, for `n = 2` only.
    pub theorem1_interval: Option<(T, T)>,
    pub coro1_cap: T,
    /// Human-readable description of every violated relation.
    pub violations: Vec<String>,
    pub search: SearchResult<T>,
}

impl<T: Real> Comparison<T> {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Solves `p` and checks the optimum against the strategies (from below)
/// and the proved bounds, using growth slope `a = 1` for the cap.
pub fn compare<T: Real>(p: &SearchProblem<T>, tails: &TailFunctions<T>) -> Result<Comparison<T>> {
    let search = solve(p)?;
    let optimum = search.best_value;
    let k = p.k as u64;
    let tol = T::lit(1e-12);
    let mut violations = Vec::new();

    let rw = repeat_win_value(&p.pot, k);
    if optimum < rw - tol {
        violations.push(format!("optimum {optimum} below repeat_win {rw}"));
    }
    let ladder_value = ladder(&p.pot, k).ok().filter(|run| run.players_used() <= p.n).map(|run| run.r1);
    if let Some(lv) = ladder_value {
        if optimum < lv - tol {
            violations.push(format!("optimum {optimum} below ladder {lv}"));
        }
    }
    let interval = if p.n == 2 { Some(theorem1_interval(k, tails)?) } else { None };
    if let Some((lo, hi)) = interval {
        if optimum < lo || optimum > hi {
            violations.push(format!("optimum {optimum} outside [{lo}, {hi}]"));
        }
    }
    let cap = coro1_cap(k, thm3_constant(&p.pot), T::one(), tails)?;
    if optimum > cap {
        violations.push(format!("optimum {optimum} above the cap {cap}"));
    }
    Ok(Comparison { optimum, repeat_win: rw, ladder: ladder_value, theorem1_interval: interval, coro1_cap: cap, violations, search })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn problem(n: usize, k: usize) -> SearchProblem<f64> {
        SearchProblem::new(PotFunction::<f64>::logistic(), n, k).unwrap()
    }

    #[test]
    fn two_player_examples() {
        let r = solve(&problem(2, 1)).unwrap();
        assert_eq!(r.best_value, 0.5);
        assert_eq!(r.best_transcript.moves, vec![Move::win(0, 1)]);
        let r = solve(&problem(2, 2)).unwrap();
        assert_abs_diff_eq!(r.best_value, 0.5 + 1.0 / (1.0 + std::f64::consts::E), epsilon = 1e-15);
        assert_eq!(r.best_transcript.moves, vec![Move::win(0, 1); 2]);
    }

    #[test]
    fn zero_games() {
        let r = solve(&problem(3, 0)).unwrap();
        assert_eq!(r.best_value, 0.0);
        assert!(r.best_transcript.moves.is_empty());
    }

    #[test]
    fn three_players_three_games() {
        let pot = PotFunction::<f64>::logistic();
        let r = solve(&problem(3, 3)).unwrap();
        assert!(r.best_value >= repeat_win_value(&pot, 3));
        let replayed = r.best_transcript.replay(&pot).unwrap().final_state.max();
        assert_eq!(replayed, r.best_value);
    }

    #[test]
    fn limits() {
        let pot = PotFunction::<f64>::logistic();
        assert!(SearchProblem::new(pot.clone(), 1, 3).is_err());
        assert!(SearchProblem::new(pot.clone(), 7, 3).is_err());
        assert!(SearchProblem::new(pot, 3, 13).is_err());
    }

    #[test]
    fn reduced_and_full_search_agree() {
        for n in 2..=3 {
            for k in 0..=5 {
                let a = solve(&problem(n, k)).unwrap();
                let b = solve(&problem(n, k).without_symmetry()).unwrap();
                assert_eq!(a.best_value, b.best_value, "n={n} k={k}");
                assert!(a.nodes_expanded <= b.nodes_expanded);
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = solve(&problem(3, 6)).unwrap();
        let b = solve(&problem(3, 6)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn comparison_is_consistent() {
        let tails = TailFunctions::new(PotFunction::<f64>::logistic());
        let c = compare(&problem(2, 6), &tails).unwrap();
        assert!(c.consistent(), "{:?}", c.violations);
        assert!(c.theorem1_interval.is_some());
    }
}
