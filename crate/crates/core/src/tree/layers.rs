use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::class::{ClassExpr, State};
use crate::word::Word;

/// The nodes of one level sharing a state and a branching count `θ`.
#[derive(Clone, Debug)]
pub struct Cell {
    pub state: State,
    pub theta: usize,
    /// Lexicographically least node in the cell.
    pub rep: Word,
    /// Number of nodes in the cell.
    pub mult: BigUint,
}

/// One level, cells sorted by representative.
pub type Layer = Vec<Cell>;

/// Levels `0 ..= depth` grouped into cells.
///
/// Nodes in one cell have isomorphic subtrees and equal `θ`, so any
/// statement about all nodes of a level reduces to a statement about cells,
/// and the least counterexample is always some cell's representative.
pub fn layers(e: &ClassExpr, depth: usize) -> Vec<Layer> {
    let mut out = Vec::with_capacity(depth + 1);
    out.push(vec![Cell {
        state: e.start(),
        theta: 0,
        rep: Word::empty(),
        mult: BigUint::one(),
    }]);
    for _ in 0..depth {
        let prev = out.last().expect("nonempty");
        out.push(next_layer(e, prev));
    }
    out
}

fn next_layer(e: &ClassExpr, prev: &Layer) -> Layer {
    let mut index: HashMap<(State, usize), usize> = HashMap::new();
    let mut next: Layer = Vec::new();
    // Parents are visited in representative order and children 0 before 1,
    // so the first word reaching a cell is its least member.
    for cell in prev {
        let children = e.children(&cell.state);
        let branching = children.iter().all(Option::is_some);
        for (bit, child) in [false, true].into_iter().zip(children) {
            let Some(child) = child else { continue };
            let theta = cell.theta + branching as usize;
            match index.get(&(child.clone(), theta)) {
                Some(&i) => next[i].mult += &cell.mult,
                None => {
                    index.insert((child.clone(), theta), next.len());
                    next.push(Cell {
                        state: child,
                        theta,
                        rep: cell.rep.child(bit),
                        mult: cell.mult.clone(),
                    });
                }
            }
        }
    }
    next
}

/// Cells of a layer merged by state, ignoring `θ`; keeps the least
/// representative and sums multiplicities. Output is in representative order.
pub fn by_state(layer: &Layer) -> Vec<(State, Word, BigUint)> {
    let mut index: HashMap<&State, usize> = HashMap::new();
    let mut out: Vec<(State, Word, BigUint)> = Vec::new();
    for cell in layer {
        match index.get(&cell.state) {
            Some(&i) => out[i].2 += &cell.mult,
            None => {
                index.insert(&cell.state, out.len());
                out.push((cell.state.clone(), cell.rep.clone(), cell.mult.clone()));
            }
        }
    }
    out
}
