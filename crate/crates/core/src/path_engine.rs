//! Rewriting arbitrary game paths into upset-free ones.
//!
//! A path is a sequence of [`Edge`]s from a start state. The rewrite runs in
//! three stages:
//!
//! 1. every rank-swapping upset (the winner ends above the loser) is replaced
//!    by a cheaper game plus a relabeling of the two players, and all
//!    relabelings are pushed to the end of the path;
//! 2. the leftmost adjacent (upset, non-upset) pair is rewritten so the upset
//!    moves right, shrinks or disappears, repeating stage 1 as needed until no
//!    upset precedes a non-upset;
//! 3. the trailing upsets are deleted, which never lowers the top rating.
//!
//! Every local rewrite is replayed and must land within [`REWRITE_TOL`] of
//! the state the replaced edges reached. Edges are re-classified by replay
//! after each rewrite, so a moved upset may become a non-upset.

use crate::bounds::lemma1_constant;
use crate::dynamics::{is_upset, trace, weighted_len, Edge, Move, RatingState, Transcript};
use crate::error::{domain, Error, Result};
use crate::potfn::PotFunction;
use crate::scalar::Real;
use crate::tails::TailFunctions;

/// Largest endpoint drift allowed for one local rewrite.
pub const REWRITE_TOL: f64 = 1e-9;
/// Largest endpoint drift allowed for a whole rewrite before stripping.
pub const ENDPOINT_TOL: f64 = 1e-7;
/// Games with a smaller pot are dropped instead of emitted.
pub const MIN_WEIGHT: f64 = 1e-15;
/// Default limit on the number of pair rewrites.
pub const DEFAULT_REWRITE_CAP: usize = 1_000_000;

/// How many times each rule fired.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepCounts {
    /// Rank swaps that exactly exchange the two ratings.
    pub swap_exact: usize,
    /// Rank swaps replaced by a smaller upset.
    pub swap_partial: usize,
    /// Rank swaps replaced by a non-upset in the other direction.
    pub swap_full: usize,
    /// Pairs on disjoint players, swapped.
    pub commute_disjoint: usize,
    /// Pairs sharing the winner or the loser.
    pub commute_shared: usize,
    /// Chained pairs where the upset survives with a smaller transfer.
    pub commute_chain_keep: usize,
    /// Chained pairs where the upset disappears.
    pub commute_chain_remove: usize,
    /// Pairs between the same two players in opposite directions.
    pub cancel_opposite: usize,
    /// Pairs between the same two players in the same direction.
    pub merge_same: usize,
    /// Trailing upsets deleted.
    pub stripped: usize,
}

impl StepCounts {
    fn pairs(&self) -> [(&'static str, usize); 10] {
        [
            ("swap_exact", self.swap_exact),
            ("swap_partial", self.swap_partial),
            ("swap_full", self.swap_full),
            ("commute_disjoint", self.commute_disjoint),
            ("commute_shared", self.commute_shared),
            ("commute_chain_keep", self.commute_chain_keep),
            ("commute_chain_remove", self.commute_chain_remove),
            ("cancel_opposite", self.cancel_opposite),
            ("merge_same", self.merge_same),
            ("stripped", self.stripped),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteReport<T: Real = f64> {
    pub target: T,
    pub original_len: T,
    pub rewritten_len: T,
    /// `rewritten_len / original_len`.
    pub length_ratio: T,
    /// Rewriting constant the ratio is certified against.
    pub c1: T,
    /// Continuous length once the first rank swaps are removed.
    pub initial_continuous_len: T,
    /// Continuous length of the output path.
    pub continuous_len: T,
    /// Pair rewrites that raised the continuous length.
    pub continuous_increases: usize,
    /// Distance between the original endpoint and the endpoint before
    /// trailing upsets were deleted.
    pub endpoint_error: T,
    /// Largest drift of any single local rewrite.
    pub max_rewrite_error: T,
    pub rewrites: usize,
    pub upsets_remaining: usize,
    pub final_max: T,
    pub steps_applied: StepCounts,
}

impl<T: Real> RewriteReport<T> {
    pub fn reaches_target(&self) -> bool {
        self.final_max >= self.target - T::lit(REWRITE_TOL) * self.target.abs().max(T::one())
    }

    /// Zero upsets, endpoint preserved, target reached and length within `C₁`.
    pub fn certified(&self) -> bool {
        self.upsets_remaining == 0
            && self.endpoint_error <= T::lit(ENDPOINT_TOL)
            && self.reaches_target()
            && self.length_ratio <= self.c1
    }

    /// Report as a JSON object with sorted keys.
    pub fn to_json(&self) -> serde_json::Value {
        let f = |x: T| x.to_f64_lossy();
        let steps: serde_json::Map<String, serde_json::Value> =
            self.steps_applied.pairs().iter().map(|&(k, v)| (k.to_string(), v.into())).collect();
        serde_json::json!({
            "target": f(self.target),
            "original_len": f(self.original_len),
            "rewritten_len": f(self.rewritten_len),
            "length_ratio": f(self.length_ratio),
            "c1": f(self.c1),
            "initial_continuous_len": f(self.initial_continuous_len),
            "continuous_len": f(self.continuous_len),
            "continuous_increases": self.continuous_increases,
            "endpoint_error": f(self.endpoint_error),
            "max_rewrite_error": f(self.max_rewrite_error),
            "rewrites": self.rewrites,
            "upsets_remaining": self.upsets_remaining,
            "final_max": f(self.final_max),
            "reaches_target": self.reaches_target(),
            "certified": self.certified(),
            "steps_applied": steps,
        })
    }
}

/// `f(z + 2σ(-z)t) - f(z)` for a non-upset game with `z = r_w - r_l`.
pub fn continuous_cost<T: Real>(state: &RatingState<T>, m: &Move<T>, tails: &TailFunctions<T>) -> Result<T> {
    if is_upset(state, m) {
        return Err(domain("edge", format!("{} beats {} is an upset at this state", m.winner, m.loser)));
    }
    let z = state.gap(m.winner, m.loser);
    let top = z + T::lit(2.0) * tails.pot().left_tail(z) * m.t;
    tails.f_increment(z, top)
}

/// Sum of [`continuous_cost`] over the non-upset games of a path.
pub fn continuous_len<T: Real>(start: &RatingState<T>, path: &[Edge<T>], tails: &TailFunctions<T>) -> Result<T> {
    let states = trace(start, path, tails.pot())?;
    let mut total = T::zero();
    for (s, e) in states.iter().zip(path) {
        if let Edge::Game(m) = e {
            if !is_upset(s, m) {
                total = total + continuous_cost(s, m, tails)?;
            }
        }
    }
    Ok(total)
}

/// Upset whose winner finishes strictly above the loser.
pub fn is_rank_swap<T: Real>(state: &RatingState<T>, m: &Move<T>, pot: &PotFunction<T>) -> bool {
    if !is_upset(state, m) {
        return false;
    }
    let z = state.gap(m.loser, m.winner);
    z - T::lit(2.0) * pot.eval(z) * m.t < T::zero()
}

fn transposition(n: usize, i: usize, j: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, j);
    p
}

fn max_diff<T: Real>(a: &RatingState<T>, b: &RatingState<T>) -> T {
    a.as_slice().iter().zip(b.as_slice()).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// Composes every relabeling into one at the end of the path, relabeling
/// the games it passes.
pub fn push_permutations<T: Real>(path: &[Edge<T>], n: usize) -> Vec<Edge<T>> {
    let identity: Vec<usize> = (0..n).collect();
    let mut acc = identity.clone();
    let mut inv = identity.clone();
    let mut out = Vec::with_capacity(path.len() + 1);
    for e in path {
        match e {
            Edge::Permutation(p) => {
                acc = acc.iter().map(|&k| p[k]).collect();
                for (k, &seat) in acc.iter().enumerate() {
                    inv[seat] = k;
                }
            }
            Edge::Game(m) => out.push(Edge::game(inv[m.winner], inv[m.loser], m.t)),
        }
    }
    if acc != identity {
        out.push(Edge::Permutation(acc));
    }
    out
}

struct Engine<'a, T: Real> {
    pot: &'a PotFunction<T>,
    tails: Option<&'a TailFunctions<T>>,
    n: usize,
    counts: StepCounts,
    max_error: T,
    rewrites: usize,
    continuous_increases: usize,
}

impl<'a, T: Real> Engine<'a, T> {
    fn new(pot: &'a PotFunction<T>, tails: Option<&'a TailFunctions<T>>, n: usize) -> Self {
        Self {
            pot,
            tails,
            n,
            counts: StepCounts::default(),
            max_error: T::zero(),
            rewrites: 0,
            continuous_increases: 0,
        }
    }

    /// Emits games in which `w` beats `l` until exactly `amount` has moved,
    /// splitting pots above one; returns the resulting state.
    fn emit_transfer(&self, state: &RatingState<T>, w: usize, l: usize, mut amount: T, out: &mut Vec<Edge<T>>) -> RatingState<T> {
        let mut s = state.clone();
        let min_weight = T::lit(MIN_WEIGHT);
        while amount > T::zero() {
            let stake = self.pot.eval(s.gap(l, w));
            let t = amount / stake;
            if t <= T::one() {
                if t >= min_weight {
                    out.push(Edge::game(w, l, t));
                }
                s.transfer_in_place(w, l, amount);
                break;
            }
            out.push(Edge::game(w, l, T::one()));
            s.transfer_in_place(w, l, stake);
            amount = amount - stake;
        }
        s
    }

    fn check_local(&mut self, start: &RatingState<T>, edges: &[Edge<T>], expected: &RatingState<T>, rule: &str) -> Result<()> {
        let mut s = start.clone();
        for e in edges {
            s = e.apply(&s, self.pot)?;
        }
        let err = max_diff(&s, expected);
        if !(err <= T::lit(REWRITE_TOL)) {
            return Err(Error::RewriteContract(format!("{rule} rewrite moved the endpoint by {err}")));
        }
        self.max_error = self.max_error.max(err);
        Ok(())
    }

    fn remove_rank_swaps(&mut self, start: &RatingState<T>, path: &[Edge<T>]) -> Result<Vec<Edge<T>>> {
        let states = trace(start, path, self.pot)?;
        let mut out = Vec::with_capacity(path.len() + 2);
        let mut changed = false;
        for (idx, e) in path.iter().enumerate() {
            let r = &states[idx];
            let m = match e {
                Edge::Game(m) if is_rank_swap(r, m, self.pot) => *m,
                _ => {
                    out.push(e.clone());
                    continue;
                }
            };
            changed = true;
            let (i, j, t) = (m.winner, m.loser, m.t);
            let z = r.gap(j, i);
            let s = self.pot.eval(z);
            let after = z - T::lit(2.0) * s * t;
            let mut local = Vec::with_capacity(3);
            if (after + z).abs() <= T::lit(MIN_WEIGHT) * z.max(T::one()) {
                self.counts.swap_exact += 1;
            } else if -after < z {
                let gamma = z / s - t;
                if !(gamma > T::zero() && gamma <= t * (T::one() + T::lit(1e-12))) {
                    return Err(Error::RewriteContract(format!("partial swap weight {gamma} outside (0, {t}]")));
                }
                self.counts.swap_partial += 1;
                self.emit_transfer(r, i, j, s * gamma, &mut local);
            } else {
                let sn = self.pot.left_tail(z);
                let gamma = (s * t - z) / sn;
                if !(gamma > T::zero() && gamma < t) {
                    return Err(Error::RewriteContract(format!("full swap weight {gamma} outside (0, {t})")));
                }
                self.counts.swap_full += 1;
                self.emit_transfer(r, j, i, sn * gamma, &mut local);
            }
            local.push(Edge::Permutation(transposition(self.n, i, j)));
            self.check_local(r, &local, &states[idx + 1], "rank swap")?;
            out.extend(local);
        }
        Ok(if changed { push_permutations(&out, self.n) } else { out })
    }

    fn leftmost_pair(states: &[RatingState<T>], path: &[Edge<T>]) -> Option<usize> {
        (0..path.len().saturating_sub(1)).find(|&x| match (&path[x], &path[x + 1]) {
            (Edge::Game(u), Edge::Game(v)) => is_upset(&states[x], u) && !is_upset(&states[x + 1], v),
            _ => false,
        })
    }

    fn rewrite_pair(&mut self, r: &RatingState<T>, u: &Move<T>, v: &Move<T>) -> Vec<Edge<T>> {
        let (i, j) = (u.winner, u.loser);
        let (k, l) = (v.winner, v.loser);
        let a = self.pot.eval(r.gap(j, i)) * u.t;
        let mut r1 = r.clone();
        r1.transfer_in_place(i, j, a);
        let b = self.pot.eval(r1.gap(l, k)) * v.t;
        let ip = (i == k) as i32 + (j == l) as i32 - (i == l) as i32 - (j == k) as i32;
        let mut out = Vec::with_capacity(4);
        match ip {
            0 => {
                self.counts.commute_disjoint += 1;
                out.push(Edge::Game(*v));
                out.push(Edge::Game(*u));
            }
            1 => {
                self.counts.commute_shared += 1;
                let s = self.emit_transfer(r, k, l, b, &mut out);
                self.emit_transfer(&s, i, j, a, &mut out);
            }
            -1 => {
                let (p, q) = if j == k { (i, l) } else { (k, j) };
                if a >= b {
                    self.counts.commute_chain_keep += 1;
                    let s = self.emit_transfer(r, p, q, b, &mut out);
                    self.emit_transfer(&s, i, j, a - b, &mut out);
                } else {
                    self.counts.commute_chain_remove += 1;
                    let s = self.emit_transfer(r, p, q, a, &mut out);
                    self.emit_transfer(&s, k, l, b - a, &mut out);
                }
            }
            -2 => {
                self.counts.cancel_opposite += 1;
                if a >= b {
                    self.emit_transfer(r, i, j, a - b, &mut out);
                } else {
                    self.emit_transfer(r, k, l, b - a, &mut out);
                }
            }
            _ => {
                self.counts.merge_same += 1;
                self.emit_transfer(r, i, j, a + b, &mut out);
            }
        }
        out
    }

    fn local_continuous(&self, start: &RatingState<T>, edges: &[Edge<T>]) -> Result<T> {
        match self.tails {
            Some(tails) => continuous_len(start, edges, tails),
            None => Ok(T::zero()),
        }
    }

    /// Rewrites leftmost pairs until every upset trails every non-upset.
    /// With `fix_swaps`, rank swaps created along the way are removed;
    /// otherwise they are a contract violation.
    fn commute(&mut self, start: &RatingState<T>, mut path: Vec<Edge<T>>, cap: usize, fix_swaps: bool) -> Result<Vec<Edge<T>>> {
        loop {
            let mut states = trace(start, &path, self.pot)?;
            if let Some(idx) = path.iter().enumerate().position(|(x, e)| matches!(e, Edge::Game(m) if is_rank_swap(&states[x], m, self.pot))) {
                if !fix_swaps {
                    return Err(Error::RewriteContract(format!("rank-swapping upset at edge {idx}")));
                }
                path = self.remove_rank_swaps(start, &path)?;
                states = trace(start, &path, self.pot)?;
            }
            let Some(x) = Self::leftmost_pair(&states, &path) else {
                return Ok(path);
            };
            if self.rewrites >= cap {
                let residual = Transcript::from_edges(self.n, self.pot.name(), &path).to_json();
                return Err(Error::RewriteCap { cap, residual });
            }
            self.rewrites += 1;
            let (Edge::Game(u), Edge::Game(v)) = (&path[x], &path[x + 1]) else { unreachable!() };
            let new = self.rewrite_pair(&states[x], u, v);
            self.check_local(&states[x], &new, &states[x + 2], "pair")?;
            if self.tails.is_some() {
                let before = self.local_continuous(&states[x], &path[x..x + 2])?;
                let after = self.local_continuous(&states[x], &new)?;
                if after > before + T::lit(1e-12) * before.max(T::one()) {
                    self.continuous_increases += 1;
                }
            }
            path.splice(x..x + 2, new);
        }
    }

    fn strip(&mut self, start: &RatingState<T>, mut path: Vec<Edge<T>>, target: T) -> Result<Vec<Edge<T>>> {
        let states = trace(start, &path, self.pot)?;
        let mut seen_upset = false;
        for (x, e) in path.iter().enumerate() {
            if let Edge::Game(m) = e {
                if is_upset(&states[x], m) {
                    if is_rank_swap(&states[x], m, self.pot) {
                        return Err(Error::RewriteContract(format!("rank-swapping upset at edge {x}")));
                    }
                    seen_upset = true;
                } else if seen_upset {
                    return Err(Error::RewriteContract(format!("non-upset at edge {x} follows an upset")));
                }
            }
        }
        let mut x = path.len();
        while x > 0 {
            x -= 1;
            if let Edge::Game(m) = &path[x] {
                if !is_upset(&states[x], m) {
                    break;
                }
                path.remove(x);
                self.counts.stripped += 1;
            }
        }
        let end = trace(start, &path, self.pot)?.pop().expect("endpoint");
        let slack = T::lit(REWRITE_TOL) * target.abs().max(T::one());
        if end.max() < target - slack {
            return Err(Error::RewriteContract(format!(
                "top rating {} after deleting upsets is below the target {target}",
                end.max()
            )));
        }
        Ok(path)
    }
}

/// Stage 1: replaces every rank-swapping upset and moves all relabelings to
/// the end of the path.
pub fn remove_rank_swaps<T: Real>(start: &RatingState<T>, path: &[Edge<T>], pot: &PotFunction<T>) -> Result<Vec<Edge<T>>> {
    Engine::new(pot, None, start.len()).remove_rank_swaps(start, path)
}

/// Stage 2 on a path without rank-swapping upsets. Rewrites that create a
/// rank swap are reported as a contract violation; [`make_upset_free`]
/// removes them instead.
pub fn commute_upsets_right<T: Real>(start: &RatingState<T>, path: &[Edge<T>], pot: &PotFunction<T>) -> Result<Vec<Edge<T>>> {
    Engine::new(pot, None, start.len()).commute(start, path.to_vec(), DEFAULT_REWRITE_CAP, false)
}

/// Stage 3: deletes the upsets at the end of a path whose upsets all trail
/// its non-upsets; the endpoint must keep a rating of at least `target`.
pub fn strip_trailing_upsets<T: Real>(start: &RatingState<T>, path: &[Edge<T>], pot: &PotFunction<T>, target: T) -> Result<Vec<Edge<T>>> {
    Engine::new(pot, None, start.len()).strip(start, path.to_vec(), target)
}

/// Rewrites a path from the origin of `n` players that reaches a rating of
/// `target` into an upset-free path reaching it too.
pub fn make_upset_free<T: Real>(n: usize, path: &[Edge<T>], tails: &TailFunctions<T>, target: T) -> Result<(Vec<Edge<T>>, RewriteReport<T>)> {
    make_upset_free_with_cap(n, path, tails, target, DEFAULT_REWRITE_CAP)
}

pub fn make_upset_free_with_cap<T: Real>(
    n: usize,
    path: &[Edge<T>],
    tails: &TailFunctions<T>,
    target: T,
    cap: usize,
) -> Result<(Vec<Edge<T>>, RewriteReport<T>)> {
    let pot = tails.pot();
    let start = RatingState::origin(n);
    let original_end = trace(&start, path, pot)?.pop().expect("endpoint");
    if !(original_end.max() >= target) {
        return Err(domain("rating", format!("path tops out at {} and never reaches {target}", original_end.max())));
    }
    let mut engine = Engine::new(pot, Some(tails), n);
    let first = engine.remove_rank_swaps(&start, &push_permutations(path, n))?;
    let initial_continuous_len = continuous_len(&start, &first, tails)?;
    let commuted = engine.commute(&start, first, cap, true)?;
    let commuted_end = trace(&start, &commuted, pot)?.pop().expect("endpoint");
    let endpoint_error = max_diff(&original_end, &commuted_end);
    let out = engine.strip(&start, commuted, target)?;

    let states = trace(&start, &out, pot)?;
    let upsets_remaining =
        out.iter().zip(&states).filter(|(e, s)| matches!(e, Edge::Game(m) if is_upset(s, m))).count();
    let original_len = weighted_len(path);
    let rewritten_len = weighted_len(&out);
    let length_ratio = if original_len > T::zero() { rewritten_len / original_len } else { T::zero() };
    let report = RewriteReport {
        target,
        original_len,
        rewritten_len,
        length_ratio,
        c1: lemma1_constant(pot),
        initial_continuous_len,
        continuous_len: continuous_len(&start, &out, tails)?,
        continuous_increases: engine.continuous_increases,
        endpoint_error,
        max_rewrite_error: engine.max_error,
        rewrites: engine.rewrites,
        upsets_remaining,
        final_max: states.last().expect("endpoint").max(),
        steps_applied: engine.counts,
    };
    Ok((out, report))
}
