//! Exact path counting over the extendibility automaton.
//!
//! Short horizons use a layered dynamic programme over distinct states.
//! Long horizons on finite, level-independent automata raise the transition
//! matrix to the required power instead.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::class::{ClassExpr, State};

/// Horizons up to this length always use the layered programme.
const LAYERED_HORIZON: u64 = 2048;
/// Largest reachable state space handled by matrix powering.
const MATRIX_STATES: usize = 256;

/// `counts[k]` is the number of length-`k` continuations from `state`, for
/// `k = 0 ..= steps`.
pub fn counts_from(e: &ClassExpr, state: &State, steps: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut layer: HashMap<State, BigUint> = HashMap::from([(state.clone(), BigUint::one())]);
    out.push(BigUint::one());
    for _ in 0..steps {
        layer = advance(e, &layer);
        out.push(layer.values().sum());
    }
    out
}

fn advance(e: &ClassExpr, layer: &HashMap<State, BigUint>) -> HashMap<State, BigUint> {
    let mut next: HashMap<State, BigUint> = HashMap::with_capacity(layer.len() * 2);
    for (s, m) in layer {
        for child in e.children(s).into_iter().flatten() {
            *next.entry(child).or_default() += m;
        }
    }
    next
}

/// Number of length-`steps` continuations from `state`.
pub fn count_from(e: &ClassExpr, state: &State, steps: u64) -> BigUint {
    if steps > LAYERED_HORIZON && e.is_time_invariant() {
        if let Some(system) = StateSystem::explore(e, state, MATRIX_STATES) {
            return system.count(steps);
        }
    }
    let mut layer: HashMap<State, BigUint> = HashMap::from([(state.clone(), BigUint::one())]);
    for _ in 0..steps {
        layer = advance(e, &layer);
    }
    layer.values().sum()
}

/// The reachable part of a finite automaton as an adjacency matrix.
struct StateSystem {
    /// `matrix[i][j]` = number of bits leading from state `i` to state `j`.
    matrix: Vec<Vec<BigUint>>,
}

impl StateSystem {
    fn explore(e: &ClassExpr, start: &State, cap: usize) -> Option<Self> {
        let mut index: HashMap<State, usize> = HashMap::from([(start.clone(), 0)]);
        let mut states = vec![start.clone()];
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut out = Vec::with_capacity(2);
            for child in e.children(&states[i]).into_iter().flatten() {
                let j = match index.get(&child) {
                    Some(&j) => j,
                    None => {
                        if states.len() == cap {
                            return None;
                        }
                        index.insert(child.clone(), states.len());
                        states.push(child);
                        states.len() - 1
                    }
                };
                out.push(j);
            }
            edges.push(out);
            i += 1;
        }
        let n = states.len();
        let mut matrix = vec![vec![BigUint::zero(); n]; n];
        for (i, out) in edges.iter().enumerate() {
            for &j in out {
                matrix[i][j] += 1u32;
            }
        }
        Some(StateSystem { matrix })
    }

    /// Sum of row 0 of `matrix^steps`.
    fn count(&self, mut steps: u64) -> BigUint {
        let n = self.matrix.len();
        let mut row: Vec<BigUint> = (0..n).map(|j| BigUint::from((j == 0) as u32)).collect();
        let mut power = self.matrix.clone();
        while steps > 0 {
            if steps & 1 == 1 {
                row = vec_mat(&row, &power);
            }
            steps >>= 1;
            if steps > 0 {
                power = mat_mat(&power, &power);
            }
        }
        row.into_iter().sum()
    }
}

fn vec_mat(v: &[BigUint], m: &[Vec<BigUint>]) -> Vec<BigUint> {
    let n = v.len();
    (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| !v[i].is_zero() && !m[i][j].is_zero())
                .map(|i| &v[i] * &m[i][j])
                .sum()
        })
        .collect()
}

fn mat_mat(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    (0..n).map(|i| vec_mat(&a[i], b)).collect()
}
