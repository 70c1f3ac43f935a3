//! Extendibility oracles as deterministic automata.
//!
//! Each expression has a start state and a partial transition function. A
//! word is extendible iff the transitions along it are all defined. Every
//! reachable state has at least one defined transition, which is the
//! no-dead-end property of a tree of extendible nodes.
//!
//! States are plain values, so two nodes with equal states have identical
//! subtrees. The tree engine relies on this to count and compare subtrees
//! without enumerating them.

use num_integer::Roots;

use super::ClassExpr;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Full,
    /// Index of the next bit in preperiod ++ period.
    Point(usize),
    /// The partial block read so far.
    Sft(Word),
    /// Next position, saturating at the separation bound.
    Sep(usize),
    Prod {
        left: Box<State>,
        right: Box<State>,
        right_turn: bool,
    },
    DSumRoot,
    DSumSide(bool, Box<State>),
    Union(Option<Box<State>>, Option<Box<State>>),
    CylPrefix(usize),
    CylBody(Box<State>),
    /// Position within the current round and that round's bit.
    Diag { phase: usize, bit: bool },
    /// Level of the node and whether it lies on the rightmost branch.
    AHom { level: usize, on_spine: bool },
    Ex3Root,
    /// Side and next index of X modulo 4.
    Ex3Side(bool, u8),
    Ex6Zeros,
    Ex6Ones,
}

/// `Some(n)` when `level == n * n` for some `n ≥ 2`.
fn square_root_from_two(level: usize) -> Option<usize> {
    let r = level.sqrt();
    (r >= 2 && r * r == level).then_some(r)
}

/// The rightmost branch of the a-homogeneous diagonal tree: bit `i` is 0
/// exactly when `i + 1` is a square of some `n ≥ 2`.
pub fn ahom_spine_bit(i: usize) -> bool {
    square_root_from_two(i + 1).is_none()
}

impl ClassExpr {
    pub fn start(&self) -> State {
        match self {
            ClassExpr::Full => State::Full,
            ClassExpr::Point(_) => State::Point(0),
            ClassExpr::Sft(_) => State::Sft(Word::empty()),
            ClassExpr::Sep(_) => State::Sep(0),
            ClassExpr::Prod(l, r) => State::Prod {
                left: Box::new(l.start()),
                right: Box::new(r.start()),
                right_turn: false,
            },
            ClassExpr::DSum(..) => State::DSumRoot,
            ClassExpr::Union(l, r) => {
                State::Union(Some(Box::new(l.start())), Some(Box::new(r.start())))
            }
            ClassExpr::Cyl(p, b) => {
                if p.is_empty() {
                    State::CylBody(Box::new(b.start()))
                } else {
                    State::CylPrefix(0)
                }
            }
            ClassExpr::Diag(_) => State::Diag {
                phase: 0,
                bit: false,
            },
            ClassExpr::AHomDiag => State::AHom {
                level: 0,
                on_spine: true,
            },
            ClassExpr::Ex3 => State::Ex3Root,
            ClassExpr::Ex6 => State::Ex6Zeros,
        }
    }

    /// The transition on `bit`, or `None` when the child is not extendible.
    ///
    /// `state` must have been produced by this expression.
    pub fn step(&self, state: &State, bit: bool) -> Option<State> {
        match (self, state) {
            (ClassExpr::Full, State::Full) => Some(State::Full),

            (ClassExpr::Point(p), State::Point(i)) => {
                if p.bit(*i) != bit {
                    return None;
                }
                let total = p.preperiod.len() + p.period.len();
                let next = if i + 1 == total { p.preperiod.len() } else { i + 1 };
                Some(State::Point(next))
            }

            (ClassExpr::Sft(s), State::Sft(partial)) => {
                let next = partial.child(bit);
                if next.len() == s.block_len() {
                    s.blocks().contains(&next).then(|| State::Sft(Word::empty()))
                } else {
                    (s.completions(&next) > 0).then_some(State::Sft(next))
                }
            }

            (ClassExpr::Sep(s), State::Sep(i)) => {
                if s.forced(*i).is_some_and(|f| f != bit) {
                    return None;
                }
                Some(State::Sep((i + 1).min(s.bound())))
            }

            (
                ClassExpr::Prod(l, r),
                State::Prod {
                    left,
                    right,
                    right_turn,
                },
            ) => {
                if *right_turn {
                    let right = r.step(right, bit)?;
                    Some(State::Prod {
                        left: left.clone(),
                        right: Box::new(right),
                        right_turn: false,
                    })
                } else {
                    let left = l.step(left, bit)?;
                    Some(State::Prod {
                        left: Box::new(left),
                        right: right.clone(),
                        right_turn: true,
                    })
                }
            }

            (ClassExpr::DSum(l, r), State::DSumRoot) => {
                let side = if bit { r } else { l };
                Some(State::DSumSide(bit, Box::new(side.start())))
            }
            (ClassExpr::DSum(l, r), State::DSumSide(side, s)) => {
                let e = if *side { r } else { l };
                e.step(s, bit)
                    .map(|next| State::DSumSide(*side, Box::new(next)))
            }

            (ClassExpr::Union(l, r), State::Union(a, b)) => {
                let a = a.as_ref().and_then(|s| l.step(s, bit)).map(Box::new);
                let b = b.as_ref().and_then(|s| r.step(s, bit)).map(Box::new);
                (a.is_some() || b.is_some()).then_some(State::Union(a, b))
            }

            (ClassExpr::Cyl(p, b), State::CylPrefix(i)) => {
                if p.bit(*i) != bit {
                    return None;
                }
                if i + 1 == p.len() {
                    Some(State::CylBody(Box::new(b.start())))
                } else {
                    Some(State::CylPrefix(i + 1))
                }
            }
            (ClassExpr::Cyl(_, b), State::CylBody(s)) => {
                b.step(s, bit).map(|next| State::CylBody(Box::new(next)))
            }

            (ClassExpr::Diag(n), State::Diag { phase, bit: round }) => {
                if *phase > 0 && *round != bit {
                    return None;
                }
                let phase = (phase + 1) % n.get();
                Some(State::Diag {
                    phase,
                    // the round bit is irrelevant once the round completes
                    bit: phase != 0 && bit,
                })
            }

            (ClassExpr::AHomDiag, State::AHom { level, on_spine }) => {
                let level = *level;
                let next_level = level + 1;
                if *on_spine {
                    // Forbid the all-ones extension at the end of each band.
                    if square_root_from_two(next_level).is_some() && bit {
                        return None;
                    }
                    Some(State::AHom {
                        level: next_level,
                        on_spine: bit == ahom_spine_bit(level),
                    })
                } else {
                    // Off the spine, rebalancing levels allow only the 0-child.
                    if square_root_from_two(level).is_some() && bit {
                        return None;
                    }
                    Some(State::AHom {
                        level: next_level,
                        on_spine: false,
                    })
                }
            }

            (ClassExpr::Ex3, State::Ex3Root) => Some(State::Ex3Side(bit, 0)),
            (ClassExpr::Ex3, State::Ex3Side(side, j)) => {
                let forced = match (side, j) {
                    (false, 0 | 1) => Some(false),
                    (true, 2 | 3) => Some(true),
                    _ => None,
                };
                if forced.is_some_and(|f| f != bit) {
                    return None;
                }
                Some(State::Ex3Side(*side, (j + 1) % 4))
            }

            (ClassExpr::Ex6, State::Ex6Zeros) => {
                Some(if bit { State::Ex6Ones } else { State::Ex6Zeros })
            }
            (ClassExpr::Ex6, State::Ex6Ones) => bit.then_some(State::Ex6Ones),

            (e, s) => panic!("state {s:?} does not belong to expression {e}"),
        }
    }

    pub fn children(&self, state: &State) -> [Option<State>; 2] {
        [self.step(state, false), self.step(state, true)]
    }

    /// Runs the automaton along `w`, returning the state at `w` if it is
    /// extendible.
    pub fn walk(&self, w: &Word) -> Option<State> {
        self.walk_from(self.start(), w)
    }

    pub fn walk_from(&self, start: State, w: &Word) -> Option<State> {
        w.iter().try_fold(start, |s, bit| self.step(&s, bit))
    }

    /// False when some state carries the node's level, which makes the
    /// reachable state space infinite.
    pub fn is_time_invariant(&self) -> bool {
        match self {
            ClassExpr::AHomDiag => false,
            ClassExpr::Prod(l, r) | ClassExpr::DSum(l, r) | ClassExpr::Union(l, r) => {
                l.is_time_invariant() && r.is_time_invariant()
            }
            ClassExpr::Cyl(_, b) => b.is_time_invariant(),
            _ => true,
        }
    }
}
