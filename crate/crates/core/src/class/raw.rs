//! Raw trees: decidable, downward-closed sets of words that may have dead
//! ends. They sit outside the class algebra and only feed the raw-tree
//! relative-measure comparison.

use std::fmt;
use std::sync::Arc;

use crate::word::Word;

type Membership = dyn Fn(&Word) -> bool + Send + Sync;

#[derive(Clone)]
pub struct RawTree {
    name: String,
    max_depth: usize,
    member: Arc<Membership>,
}

impl RawTree {
    /// `member` must be downward closed.
    pub fn new<F>(name: impl Into<String>, max_depth: usize, member: F) -> Self
    where
        F: Fn(&Word) -> bool + Send + Sync + 'static,
    {
        RawTree {
            name: name.into(),
            max_depth,
            member: Arc::new(member),
        }
    }

    /// `{0^n : n} ∪ {1^n 0^i : i ≤ n}`. Its paths are `0^ω` and `1^ω`, but
    /// every `1^n 0^n` is a dead end.
    pub fn ladder(max_depth: usize) -> Self {
        RawTree::new("ladder", max_depth, |w: &Word| {
            let ones = w.iter().take_while(|&b| b).count();
            let rest = &w.bits()[ones..];
            if rest.iter().any(|&b| b) {
                return false;
            }
            ones == 0 || rest.len() <= ones
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn contains(&self, w: &Word) -> bool {
        (self.member)(w)
    }
}

impl fmt::Debug for RawTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RawTree")
            .field("name", &self.name)
            .field("max_depth", &self.max_depth)
            .finish()
    }
}
