//! Constructive rating-inflation strategies.
//!
//! * [`repeat_win`]: two players, the first beats the second every game.
//! * [`ladder`]: players stand in a line; each game, the first player whose
//!   lead over the next one is below a threshold `A` beats that next player.
//!   The lead structure makes the top rating grow like `k^{1/3}` while only
//!   `O(k^{1/3})` players ever play.

use crate::dynamics::{Move, RatingState, Transcript};
use crate::error::{domain, Error, Result};
use crate::potfn::PotFunction;
use crate::scalar::Real;

/// Leading constant of the ladder guarantee, a rounded-down
/// `(2^{-1/3} + 2^{2/3}) / 9^{1/3} ≈ 1.1447`.
pub const LADDER_CONSTANT: f64 = 1.14;

/// Top rating after `k` straight wins of player 0 over player 1.
pub fn repeat_win_value<T: Real>(pot: &PotFunction<T>, k: u64) -> T {
    let two = T::lit(2.0);
    let mut r = T::zero();
    for _ in 0..k {
        r = r + pot.left_tail(two * r);
    }
    r
}

/// Like [`repeat_win_value`], also returning the transcript.
pub fn repeat_win<T: Real>(pot: &PotFunction<T>, k: u64) -> (T, Transcript<T>) {
    let mut t = Transcript::new(2, pot.name());
    t.moves = vec![Move::win(0, 1); k as usize];
    (repeat_win_value(pot, k), t)
}

/// `φ(r) = Σ_{i<n_k} (2n_k - 2i - 1) r_i` over the first `n_k` players
/// (0-based), which grows by exactly twice any transfer between neighbours
/// inside that prefix.
pub fn phi_k<T: Real>(state: &RatingState<T>, n_k: usize) -> Result<T> {
    if n_k > state.len() {
        return Err(domain("n_k", format!("{n_k} exceeds the {} players in the state", state.len())));
    }
    let two_n = 2 * n_k;
    Ok((0..n_k).fold(T::zero(), |acc, i| acc + T::from_usize(two_n - 2 * i - 1).unwrap() * state.rating(i)))
}

/// The same potential as a telescoping sum of neighbour differences,
/// `n_k² r_0 + Σ_{i<n_k-1} (n_k-1-i)² (r_{i+1} - r_i)`.
pub fn phi_k_telescoped<T: Real>(state: &RatingState<T>, n_k: usize) -> Result<T> {
    if n_k > state.len() {
        return Err(domain("n_k", format!("{n_k} exceeds the {} players in the state", state.len())));
    }
    if n_k == 0 {
        return Ok(T::zero());
    }
    let sq = |m: usize| T::from_usize(m * m).unwrap();
    let head = sq(n_k) * state.rating(0);
    Ok((0..n_k - 1).fold(head, |acc, i| acc + sq(n_k - 1 - i) * (state.rating(i + 1) - state.rating(i))))
}

/// State recorded just before the highest-indexed participant's first game.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderSnapshot<T: Real = f64> {
    pub games_played: u64,
    pub state: RatingState<T>,
}

/// Where a run could have stopped: the first time the top rating exceeded
/// the guarantee.
#[derive(Clone, Debug, PartialEq)]
pub struct EarlyStop<T: Real = f64> {
    pub games_played: u64,
    pub r1: T,
    pub players_used: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderRun<T: Real = f64> {
    pub k: u64,
    /// Threshold `A`.
    pub threshold: T,
    /// `(σ(-A) A²)^{1/3}`.
    pub c1: T,
    pub final_state: RatingState<T>,
    /// 0-based index of the highest player who played; equivalently, the
    /// participants are players `0..=n_k`.
    pub n_k: usize,
    pub r1: T,
    pub phi_k: T,
    /// `1.14·c₁·k^{1/3} - A`.
    pub guarantee: T,
    pub snapshot: LadderSnapshot<T>,
    pub early_stop: Option<EarlyStop<T>>,
    /// Left-tail value `σ(-A)`, kept for the certificates.
    pub sigma_neg_a: T,
}

/// One checked inequality `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<T: Real = f64> {
    pub name: &'static str,
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> Certificate<T> {
    pub fn margin(&self) -> T {
        self.lhs - self.rhs
    }

    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

impl<T: Real> LadderRun<T> {
    /// Players who played at least once in the full run.
    pub fn players_used(&self) -> usize {
        if self.k == 0 {
            0
        } else {
            self.n_k + 1
        }
    }

    /// `2.28·c₁·k^{1/3} / A`, the player budget of an early-stopped run.
    pub fn player_cap(&self) -> T {
        T::lit(2.0 * LADDER_CONSTANT) * self.c1 * kth_root(self.k) / self.threshold
    }

    /// The four ladder inequalities: the final lower bound on the top rating,
    /// the neighbour-gap sandwich at the snapshot, the potential sandwich and
    /// the player-count estimate, the last two on the final state.
    pub fn certificates(&self) -> Vec<Certificate<T>> {
        let a = self.threshold;
        let snap = self.snapshot.state.as_slice();
        let min_gap = (0..self.n_k.saturating_sub(1))
            .map(|i| snap[i] - snap[i + 1])
            .fold(T::infinity(), T::min);
        let k = T::from_u64(self.k).unwrap();
        let two = T::lit(2.0);
        vec![
            Certificate { name: "r1_final_lb", lhs: self.r1, rhs: self.guarantee },
            Certificate { name: "diff_sandwich", lhs: min_gap, rhs: a },
            Certificate { name: "phi_sandwich", lhs: self.phi_k, rhs: two * self.sigma_neg_a * k },
            Certificate {
                name: "r1_estimate_one",
                lhs: self.r1,
                rhs: a / two * (T::from_usize(self.n_k).unwrap() - T::one()),
            },
        ]
    }

    /// Players used by the early-stopped run against [`LadderRun::player_cap`].
    pub fn player_budget(&self) -> Certificate<T> {
        let used = self.early_stop.as_ref().map_or(self.players_used(), |e| e.players_used);
        Certificate { name: "player_budget", lhs: self.player_cap(), rhs: T::from_usize(used).unwrap() }
    }
}

fn kth_root<T: Real>(k: u64) -> T {
    T::from_u64(k).unwrap().cbrt()
}

/// Runs the ladder strategy for exactly `k` games with `A` from the pot.
pub fn ladder<T: Real>(pot: &PotFunction<T>, k: u64) -> Result<LadderRun<T>> {
    let a = pot.compute_a().ok_or_else(|| Error::NoThreshold(pot.name()))?;
    ladder_with_threshold(pot, k, a)
}

/// Runs the ladder strategy with an explicit threshold `A > 0`.
pub fn ladder_with_threshold<T: Real>(pot: &PotFunction<T>, k: u64, a: T) -> Result<LadderRun<T>> {
    run_ladder(pot, k, a, None)
}

/// Like [`ladder_with_threshold`], also returning every game played.
pub fn ladder_transcript<T: Real>(pot: &PotFunction<T>, k: u64, a: T) -> Result<(LadderRun<T>, Transcript<T>)> {
    let mut moves = Vec::with_capacity(k as usize);
    let run = run_ladder(pot, k, a, Some(&mut moves))?;
    let mut t = Transcript::new(run.players_used().max(2), pot.name());
    t.moves = moves;
    Ok((run, t))
}

fn run_ladder<T: Real>(pot: &PotFunction<T>, k: u64, a: T, mut record: Option<&mut Vec<Move<T>>>) -> Result<LadderRun<T>> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(domain("threshold", format!("A must be positive, got {a}")));
    }
    let sigma_neg_a = pot.left_tail(a);
    let c1 = (sigma_neg_a * a * a).cbrt();
    let guarantee = T::lit(LADDER_CONSTANT) * c1 * kth_root(k) - a;

    let mut state = RatingState::origin(2);
    let mut front: Option<usize> = None;
    let mut snapshot = LadderSnapshot { games_played: 0, state: state.clone() };
    let mut early_stop = None;
    let mut i = 0usize;
    for played in 0..k {
        if early_stop.is_none() && state.rating(0) > guarantee {
            early_stop = Some(EarlyStop {
                games_played: played,
                r1: state.rating(0),
                players_used: front.map_or(0, |f| f + 1),
            });
        }
        // Only positions i-1 and i can newly satisfy the condition after
        // player i beat i+1, so the scan resumes one step back.
        i = i.saturating_sub(1);
        while !(state.rating(i) < state.rating(i + 1) + a) {
            i += 1;
            state.ensure_players(i + 2);
        }
        if front.is_none_or(|f| i + 1 > f) {
            snapshot = LadderSnapshot { games_played: played, state: state.clone() };
            front = Some(i + 1);
            state.ensure_players(i + 3);
        }
        let amount = pot.eval(state.rating(i + 1) - state.rating(i));
        state.transfer_in_place(i, i + 1, amount);
        if let Some(moves) = record.as_deref_mut() {
            moves.push(Move::win(i, i + 1));
        }
    }
    if early_stop.is_none() && state.rating(0) > guarantee {
        early_stop =
            Some(EarlyStop { games_played: k, r1: state.rating(0), players_used: front.map_or(0, |f| f + 1) });
    }
    let n_k = front.unwrap_or(0);
    let phi = phi_k(&state, n_k)?;
    Ok(LadderRun {
        k,
        threshold: a,
        c1,
        r1: state.rating(0),
        final_state: state,
        n_k,
        phi_k: phi,
        guarantee,
        snapshot,
        early_stop,
        sigma_neg_a,
    })
}

/// Reference ladder with a full scan from the first player every game; only
/// used to check the cursor scan.
#[doc(hidden)]
pub fn ladder_naive_scan<T: Real>(pot: &PotFunction<T>, k: u64, a: T) -> RatingState<T> {
    let mut state = RatingState::origin(2);
    for _ in 0..k {
        let mut i = 0;
        loop {
            state.ensure_players(i + 2);
            if state.rating(i) < state.rating(i + 1) + a {
                break;
            }
            i += 1;
        }
        state.ensure_players(i + 3);
        let amount = pot.eval(state.rating(i + 1) - state.rating(i));
        state.transfer_in_place(i, i + 1, amount);
    }
    state
}
