//! Rating states, games with fractional pots, relabelings, and transcripts.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::potfn::PotFunction;
use crate::scalar::Real;

/// Ratings of `n` players, indexed `0..n`. Ratings always sum to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingState<T: Real = f64> {
    ratings: Vec<T>,
}

impl<T: Real> RatingState<T> {
    /// Every player at rating 0.
    pub fn origin(n: usize) -> Self {
        Self { ratings: vec![T::zero(); n] }
    }

    /// Accepts ratings whose sum is zero within `1e-9·n`.
    pub fn from_vec(ratings: Vec<T>) -> Result<Self> {
        let n = T::from_usize(ratings.len().max(1)).unwrap();
        if ratings.iter().any(|r| !r.is_finite()) {
            return Err(domain("ratings", "ratings must be finite"));
        }
        let sum = ratings.iter().fold(T::zero(), |a, &b| a + b);
        if sum.abs() > T::lit(1e-9) * n {
            return Err(domain("ratings", format!("ratings sum to {sum}, expected 0")));
        }
        Ok(Self { ratings })
    }

    /// Shifts arbitrary finite ratings so they sum to zero.
    pub fn recentered(mut ratings: Vec<T>) -> Self {
        if ratings.is_empty() {
            return Self { ratings };
        }
        let mean = ratings.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize(ratings.len()).unwrap();
        for r in &mut ratings {
            *r = *r - mean;
        }
        Self { ratings }
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.ratings
    }

    pub fn into_vec(self) -> Vec<T> {
        self.ratings
    }

    pub fn rating(&self, player: usize) -> T {
        self.ratings[player]
    }

    pub fn sum(&self) -> T {
        self.ratings.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn max(&self) -> T {
        self.ratings.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn norm_sq(&self) -> T {
        self.ratings.iter().fold(T::zero(), |a, &b| a + b * b)
    }

    /// Adds players at rating 0 until there are at least `n`.
    pub fn ensure_players(&mut self, n: usize) {
        if self.ratings.len() < n {
            self.ratings.resize(n, T::zero());
        }
    }

    /// Player indices in non-increasing rating order; ties keep index order.
    pub fn sorting_permutation(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.ratings.len()).collect();
        idx.sort_by(|&a, &b| self.ratings[b].partial_cmp(&self.ratings[a]).expect("finite ratings").then(a.cmp(&b)));
        idx
    }

    /// Ratings sorted into non-increasing order.
    pub fn sorted_desc(&self) -> Vec<T> {
        self.sorting_permutation().into_iter().map(|i| self.ratings[i]).collect()
    }

    /// `⟨r, e_w - e_l⟩`.
    pub fn gap(&self, winner: usize, loser: usize) -> T {
        self.ratings[winner] - self.ratings[loser]
    }

    /// Moves player `k`'s rating to seat `mapping[k]`.
    pub fn permuted(&self, mapping: &[usize]) -> Result<Self> {
        check_permutation(mapping, self.len())?;
        let mut out = vec![T::zero(); self.len()];
        for (k, &to) in mapping.iter().enumerate() {
            out[to] = self.ratings[k];
        }
        Ok(Self { ratings: out })
    }

    /// Adds `amount` to `winner` and removes it from `loser`.
    pub(crate) fn transfer_in_place(&mut self, winner: usize, loser: usize, amount: T) {
        self.ratings[winner] = self.ratings[winner] + amount;
        self.ratings[loser] = self.ratings[loser] - amount;
    }
}

pub(crate) fn check_permutation(mapping: &[usize], n: usize) -> Result<()> {
    if mapping.len() != n {
        return Err(domain("mapping", format!("expected {n} entries, got {}", mapping.len())));
    }
    let mut seen = vec![false; n];
    for &m in mapping {
        if m >= n || seen[m] {
            return Err(domain("mapping", format!("{mapping:?} is not a permutation of 0..{n}")));
        }
        seen[m] = true;
    }
    Ok(())
}

/// One game: `winner` beats `loser` for a pot of size `t ∈ (0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Move<T: Real = f64> {
    pub winner: usize,
    pub loser: usize,
    pub t: T,
}

impl<T: Real> Move<T> {
    pub fn new(winner: usize, loser: usize, t: T) -> Result<Self> {
        let m = Self { winner, loser, t };
        m.check()?;
        Ok(m)
    }

    /// A full-pot game.
    pub fn win(winner: usize, loser: usize) -> Self {
        Self { winner, loser, t: T::one() }
    }

    fn check(&self) -> Result<()> {
        if self.winner == self.loser {
            return Err(domain("move", format!("player {} cannot play themselves", self.winner)));
        }
        if !(self.t > T::zero() && self.t <= T::one()) {
            return Err(domain("t", format!("pot fraction must lie in (0, 1], got {}", self.t)));
        }
        Ok(())
    }

    fn check_in(&self, n: usize) -> Result<()> {
        self.check()?;
        if self.winner >= n || self.loser >= n {
            return Err(domain("move", format!("players ({}, {}) outside 0..{n}", self.winner, self.loser)));
        }
        Ok(())
    }
}

/// Points moved from loser to winner by `m` at `state`.
pub fn transfer<T: Real>(state: &RatingState<T>, m: &Move<T>, pot: &PotFunction<T>) -> T {
    pot.eval(-state.gap(m.winner, m.loser)) * m.t
}

/// Plays `m` at `state`.
pub fn apply_move<T: Real>(state: &RatingState<T>, m: &Move<T>, pot: &PotFunction<T>) -> Result<RatingState<T>> {
    m.check_in(state.len())?;
    let mut next = state.clone();
    let amount = transfer(state, m, pot);
    next.transfer_in_place(m.winner, m.loser, amount);
    Ok(next)
}

/// True when the lower-rated player wins; a tie is not an upset.
pub fn is_upset<T: Real>(state: &RatingState<T>, m: &Move<T>) -> bool {
    state.rating(m.winner) < state.rating(m.loser)
}

/// An edge of the game graph: a (possibly fractional) game or a free
/// relabeling of the players.
#[derive(Clone, Debug, PartialEq)]
pub enum Edge<T: Real = f64> {
    Game(Move<T>),
    /// Player `k`'s rating moves to seat `mapping[k]`.
    Permutation(Vec<usize>),
}

impl<T: Real> Edge<T> {
    pub fn game(winner: usize, loser: usize, t: T) -> Self {
        Edge::Game(Move { winner, loser, t })
    }

    /// Weight in the graph: `t` for games, zero for relabelings.
    pub fn weight(&self) -> T {
        match self {
            Edge::Game(m) => m.t,
            Edge::Permutation(_) => T::zero(),
        }
    }

    pub fn apply(&self, state: &RatingState<T>, pot: &PotFunction<T>) -> Result<RatingState<T>> {
        match self {
            Edge::Game(m) => apply_move(state, m, pot),
            Edge::Permutation(p) => state.permuted(p),
        }
    }
}

/// Sum of edge weights.
pub fn weighted_len<T: Real>(edges: &[Edge<T>]) -> T {
    edges.iter().fold(T::zero(), |a, e| a + e.weight())
}

/// States visited by `edges` starting at `start`; entry `i` is the state
/// before edge `i`, the last entry is the endpoint.
pub fn trace<T: Real>(start: &RatingState<T>, edges: &[Edge<T>], pot: &PotFunction<T>) -> Result<Vec<RatingState<T>>> {
    let mut states = Vec::with_capacity(edges.len() + 1);
    let mut cur = start.clone();
    for (index, e) in edges.iter().enumerate() {
        let next = e.apply(&cur, pot).map_err(|err| Error::InvalidMove { index, detail: err.to_string() })?;
        states.push(cur);
        cur = next;
    }
    states.push(cur);
    Ok(states)
}

/// A relabeling applied once `after_move` games have been played.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationStep {
    pub after_move: usize,
    pub mapping: Vec<usize>,
}

/// A sequence of games (and optional relabelings) among `n` players who all
/// start at rating 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript<T: Real = f64> {
    pub n: usize,
    /// Name of the pot function the games were played under.
    pub sigma: String,
    pub moves: Vec<Move<T>>,
    /// Sorted by `after_move`; several may share a position.
    pub perms: Vec<PermutationStep>,
}

/// Result of replaying a transcript.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay<T: Real = f64> {
    pub final_state: RatingState<T>,
    /// State after each edge, in order.
    pub trace: Vec<RatingState<T>>,
    pub len: T,
}

impl<T: Real> Transcript<T> {
    pub fn new(n: usize, sigma: impl Into<String>) -> Self {
        Self { n, sigma: sigma.into(), moves: Vec::new(), perms: Vec::new() }
    }

    pub fn push(&mut self, m: Move<T>) {
        self.moves.push(m);
    }

    /// Builds a transcript from interleaved edges.
    pub fn from_edges(n: usize, sigma: impl Into<String>, edges: &[Edge<T>]) -> Self {
        let mut t = Self::new(n, sigma);
        for e in edges {
            match e {
                Edge::Game(m) => t.moves.push(*m),
                Edge::Permutation(p) => {
                    t.perms.push(PermutationStep { after_move: t.moves.len(), mapping: p.clone() })
                }
            }
        }
        t
    }

    /// Interleaves moves and relabelings in play order.
    pub fn edges(&self) -> Vec<Edge<T>> {
        let mut perms: Vec<&PermutationStep> = self.perms.iter().collect();
        perms.sort_by_key(|p| p.after_move);
        let mut out = Vec::with_capacity(self.moves.len() + perms.len());
        let mut pi = 0;
        for (i, m) in self.moves.iter().enumerate() {
            while pi < perms.len() && perms[pi].after_move == i {
                out.push(Edge::Permutation(perms[pi].mapping.clone()));
                pi += 1;
            }
            out.push(Edge::Game(*m));
        }
        for p in &perms[pi..] {
            out.push(Edge::Permutation(p.mapping.clone()));
        }
        out
    }

    /// Total pot size played, `Σ t`.
    pub fn weighted_len(&self) -> T {
        self.moves.iter().fold(T::zero(), |a, m| a + m.t)
    }

    pub fn validate(&self) -> Result<()> {
        for (index, m) in self.moves.iter().enumerate() {
            m.check_in(self.n).map_err(|e| Error::InvalidMove { index, detail: e.to_string() })?;
        }
        for p in &self.perms {
            if p.after_move > self.moves.len() {
                return Err(Error::Transcript(format!("permutation after move {} past the end", p.after_move)));
            }
            check_permutation(&p.mapping, self.n).map_err(|e| Error::Transcript(e.to_string()))?;
        }
        Ok(())
    }

    pub fn replay(&self, pot: &PotFunction<T>) -> Result<Replay<T>> {
        self.validate()?;
        let mut states = trace(&RatingState::origin(self.n), &self.edges(), pot)?;
        let final_state = states.pop().expect("trace has an endpoint");
        let mut trace_after: Vec<RatingState<T>> = states.into_iter().skip(1).collect();
        trace_after.push(final_state.clone());
        Ok(Replay { final_state, trace: trace_after, len: self.weighted_len() })
    }

    pub fn to_json(&self) -> String {
        let file = TranscriptFile {
            n: self.n,
            sigma: self.sigma.clone(),
            moves: self.moves.iter().map(|m| MoveRecord { w: m.winner, l: m.loser, t: m.t.to_f64_lossy() }).collect(),
            perms: self.perms.clone(),
        };
        serde_json::to_string_pretty(&file).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TranscriptFile = serde_json::from_str(text).map_err(|e| Error::Transcript(e.to_string()))?;
        let t = Self {
            n: file.n,
            sigma: file.sigma,
            moves: file.moves.iter().map(|m| Move { winner: m.w, loser: m.l, t: T::lit(m.t) }).collect(),
            perms: file.perms,
        };
        t.validate()?;
        Ok(t)
    }
}

#[derive(Serialize, Deserialize)]
struct MoveRecord {
    w: usize,
    l: usize,
    t: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TranscriptFile {
    n: usize,
    sigma: String,
    moves: Vec<MoveRecord>,
    #[serde(default)]
    perms: Vec<PermutationStep>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn logistic() -> PotFunction<f64> {
        PotFunction::<f64>::logistic()
    }

    #[test]
    fn first_games() {
        let pot = logistic();
        let s = apply_move(&RatingState::origin(2), &Move::win(0, 1), &pot).unwrap();
        assert_eq!(s.as_slice(), &[0.5, -0.5]);
        let s2 = apply_move(&s, &Move::win(0, 1), &pot).unwrap();
        let x = 1.0 / (1.0 + std::f64::consts::E);
        assert_abs_diff_eq!(s2.rating(0), 0.5 + x, epsilon = 1e-15);
        assert_abs_diff_eq!(s2.rating(0), 0.768_941_421_369_995, epsilon = 1e-12);
        let up = apply_move(&s, &Move::win(1, 0), &pot).unwrap();
        let y = std::f64::consts::E / (1.0 + std::f64::consts::E);
        assert_abs_diff_eq!(up.rating(0), 0.5 - y, epsilon = 1e-15);
        assert_abs_diff_eq!(up.rating(1), 0.231_058_578_630_005, epsilon = 1e-12);
    }

    #[test]
    fn upset_classification() {
        let s = RatingState::from_vec(vec![0.5, -0.5]).unwrap();
        assert!(!is_upset(&s, &Move::win(0, 1)));
        assert!(is_upset(&s, &Move::win(1, 0)));
        assert!(!is_upset(&RatingState::<f64>::origin(2), &Move::win(0, 1)));
    }

    #[test]
    fn rejects_bad_moves() {
        assert!(Move::new(0, 0, 1.0).is_err());
        assert!(Move::new(0, 1, 0.0).is_err());
        assert!(Move::new(0, 1, 1.5).is_err());
        let pot = logistic();
        assert!(apply_move(&RatingState::origin(2), &Move::win(0, 2), &pot).is_err());
        assert!(RatingState::from_vec(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn replay_examples() {
        let pot = logistic();
        let empty = Transcript::<f64>::new(3, "logistic");
        assert_eq!(empty.replay(&pot).unwrap().final_state, RatingState::origin(3));

        let mut two = Transcript::new(2, "logistic");
        two.push(Move::win(0, 1));
        two.push(Move::win(0, 1));
        let r = two.replay(&pot).unwrap();
        assert_abs_diff_eq!(r.final_state.rating(0), 0.768_941_421_369_995, epsilon = 1e-12);
        assert_eq!(r.trace.len(), 2);
        assert_eq!(r.len, 2.0);

        let mut swapped = Transcript::new(2, "logistic");
        swapped.push(Move::win(0, 1));
        swapped.perms.push(PermutationStep { after_move: 1, mapping: vec![1, 0] });
        assert_eq!(swapped.replay(&pot).unwrap().final_state.as_slice(), &[-0.5, 0.5]);
    }

    #[test]
    fn replay_reports_offending_move() {
        let pot = logistic();
        let mut t = Transcript::new(2, "logistic");
        t.push(Move::win(0, 1));
        t.push(Move { winner: 0, loser: 5, t: 1.0 });
        match t.replay(&pot) {
            Err(Error::InvalidMove { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let pot = logistic();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = Transcript::new(4, "logistic");
        for _ in 0..50 {
            let w = rng.gen_range(0..4);
            let l = (w + rng.gen_range(1..4)) % 4;
            t.push(Move { winner: w, loser: l, t: rng.gen_range(1e-6..1.0) });
        }
        t.perms.push(PermutationStep { after_move: 7, mapping: vec![2, 0, 1, 3] });
        let back = Transcript::<f64>::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.replay(&pot).unwrap().final_state, t.replay(&pot).unwrap().final_state);
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(Transcript::<f64>::from_json("{").is_err());
        let bad = r#"{"n":2,"sigma":"logistic","moves":[{"w":0,"l":0,"t":1.0}],"perms":[]}"#;
        assert!(Transcript::<f64>::from_json(bad).is_err());
        let bad_perm = r#"{"n":2,"sigma":"logistic","moves":[],"perms":[{"after_move":0,"mapping":[0,0]}]}"#;
        assert!(Transcript::<f64>::from_json(bad_perm).is_err());
    }

    #[test]
    fn long_random_transcript_conserves_sum() {
        let pot = logistic();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 7;
        let mut s = RatingState::origin(n);
        for _ in 0..10_000 {
            let w = rng.gen_range(0..n);
            let l = (w + rng.gen_range(1..n)) % n;
            s = apply_move(&s, &Move { winner: w, loser: l, t: rng.gen_range(0.01..=1.0) }, &pot).unwrap();
        }
        assert!(s.sum().abs() <= 1e-9 * n as f64);
    }

    #[test]
    fn sorting_permutation_orders_ratings() {
        let s = RatingState::from_vec(vec![-1.0, 2.0, 0.0, -1.0]).unwrap();
        assert_eq!(s.sorting_permutation(), vec![1, 2, 0, 3]);
        assert_eq!(s.sorted_desc(), vec![2.0, 0.0, -1.0, -1.0]);
    }

    proptest! {
        #[test]
        fn transfer_is_linear_in_pot(
            r in proptest::collection::vec(-5.0f64..5.0, 3),
            t in 0.001f64..1.0,
        ) {
            let pot = logistic();
            let s = RatingState::recentered(r);
            let full = transfer(&s, &Move::win(0, 2), &pot);
            let part = transfer(&s, &Move { winner: 0, loser: 2, t }, &pot);
            prop_assert_eq!(part, pot.eval(-s.gap(0, 2)) * t);
            prop_assert!((part - t * full).abs() <= 1e-16);
        }

        #[test]
        fn non_upsets_by_the_leader_raise_the_maximum(
            r in proptest::collection::vec(-5.0f64..5.0, 4),
            l in 0usize..4,
            t in 0.01f64..=1.0,
        ) {
            let pot = logistic();
            let s = RatingState::recentered(r);
            let top = s.sorting_permutation()[0];
            prop_assume!(l != top);
            let next = apply_move(&s, &Move { winner: top, loser: l, t }, &pot).unwrap();
            prop_assert!(next.max() >= s.max());
        }

        #[test]
        fn non_swapping_upsets_never_raise_the_maximum(
            r in proptest::collection::vec(-5.0f64..5.0, 4),
            w in 0usize..4,
            l in 0usize..4,
            t in 0.01f64..=1.0,
        ) {
            prop_assume!(w != l);
            let pot = logistic();
            let s = RatingState::recentered(r);
            let m = Move { winner: w, loser: l, t };
            prop_assume!(is_upset(&s, &m));
            let next = apply_move(&s, &m, &pot).unwrap();
            prop_assume!(next.rating(w) <= next.rating(l));
            prop_assert!(next.max() <= s.max());
            prop_assert!(next.rating(w) <= s.rating(l));
        }
    }
}
