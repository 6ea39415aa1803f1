#![allow(dead_code)]

use eloforge::dynamics::{Edge, RatingState};
use eloforge::PotFunction;
use rand::seq::SliceRandom;
use rand::Rng;

/// `random_edges` random games (pots in `[0.05, 1]`, about one in twenty
/// edges a random relabeling), then unit wins of the leader over the
/// bottom player until someone reaches `target`.
pub fn random_path<R: Rng>(rng: &mut R, pot: &PotFunction, n: usize, random_edges: usize, target: f64) -> Vec<Edge> {
    let mut state = RatingState::origin(n);
    let mut path = Vec::with_capacity(random_edges + 8);
    for _ in 0..random_edges {
        let edge = if rng.gen_bool(0.05) {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            Edge::Permutation(p)
        } else {
            let w = rng.gen_range(0..n);
            let mut l = rng.gen_range(0..n - 1);
            if l >= w {
                l += 1;
            }
            Edge::game(w, l, rng.gen_range(0.05..=1.0))
        };
        state = edge.apply(&state, pot).unwrap();
        path.push(edge);
    }
    while state.max() < target {
        let order = state.sorting_permutation();
        let edge = Edge::game(order[0], order[n - 1], 1.0);
        state = edge.apply(&state, pot).unwrap();
        path.push(edge);
    }
    path
}

/// Zero-sum state with `n` entries drawn from `[-spread, spread]` and then
/// re-centred.
pub fn random_state<R: Rng>(rng: &mut R, n: usize, spread: f64) -> RatingState {
    RatingState::recentered((0..n).map(|_| rng.gen_range(-spread..=spread)).collect())
}
