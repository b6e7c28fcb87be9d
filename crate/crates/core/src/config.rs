//! Sparse configurations, global states and patterns.
//!
//! A configuration only stores non-blank cells; the blank letter `⊥` is the
//! absence of an entry. Letters and states are small indices into the
//! alphabet and state list of the turedo they belong to.

use std::collections::{BTreeSet, HashMap};

use crate::lattice::{Dim, Position};

/// Index into a turedo alphabet. Never denotes the blank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u16);

/// Index into a turedo state list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u16);

/// A cell content: `None` is the blank `⊥`.
pub type Cell = Option<Letter>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Configuration {
    cells: HashMap<Position, Letter>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, z: &Position) -> Cell {
        self.cells.get(z).copied()
    }

    pub fn is_blank(&self, z: &Position) -> bool {
        !self.cells.contains_key(z)
    }

    /// Sets a cell; writing `None` erases it so that no stored cell is blank.
    pub fn set(&mut self, z: Position, c: Cell) {
        match c {
            Some(l) => {
                self.cells.insert(z, l);
            }
            None => {
                self.cells.remove(&z);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Position, &Letter)> {
        self.cells.iter()
    }

    /// Cells in lexicographic position order.
    pub fn sorted(&self) -> Vec<(Position, Letter)> {
        let mut v: Vec<_> = self.cells.iter().map(|(p, l)| (*p, *l)).collect();
        v.sort();
        v
    }

    /// Translation by `v`: the result maps `z + v` to `self(z)`.
    pub fn shift(&self, v: Position) -> Configuration {
        Configuration { cells: self.cells.iter().map(|(p, l)| (*p + v, *l)).collect() }
    }

    /// Keeps only the cells satisfying `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Position) -> bool) -> Configuration {
        Configuration {
            cells: self.cells.iter().filter(|(p, _)| keep(p)).map(|(p, l)| (*p, *l)).collect(),
        }
    }

    /// Smallest box `(min, max)` containing every stored cell.
    pub fn bounds(&self) -> Option<(Position, Position)> {
        let mut it = self.cells.keys();
        let first = *it.next()?;
        let mut lo = first.coords().to_vec();
        let mut hi = lo.clone();
        for p in it {
            for (i, c) in p.coords().iter().enumerate() {
                lo[i] = lo[i].min(*c);
                hi[i] = hi[i].max(*c);
            }
        }
        Some((Position::from_slice(&lo).ok()?, Position::from_slice(&hi).ok()?))
    }
}

impl FromIterator<(Position, Letter)> for Configuration {
    fn from_iter<I: IntoIterator<Item = (Position, Letter)>>(iter: I) -> Self {
        Configuration { cells: iter.into_iter().collect() }
    }
}

/// `(c, z, q)`: configuration, head position and head state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalState {
    pub config: Configuration,
    pub head: Position,
    pub state: StateId,
}

impl GlobalState {
    pub fn new(config: Configuration, head: Position, state: StateId) -> Self {
        GlobalState { config, head, state }
    }

    /// A lone head on the empty lattice.
    pub fn single_head(dim: Dim, state: StateId) -> Self {
        GlobalState { config: Configuration::new(), head: Position::origin(dim), state }
    }

    pub fn dim(&self) -> Dim {
        self.head.dim()
    }
}

/// Head position plus every non-blank position.
pub fn domain(s: &GlobalState) -> BTreeSet<Position> {
    let mut d: BTreeSet<Position> = s.config.iter().map(|(p, _)| *p).collect();
    d.insert(s.head);
    d
}

/// The values of `c` around `z` over an ordered offset list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub shape: Vec<Position>,
    pub values: Vec<Cell>,
}

impl Pattern {
    pub fn get(&self, offset: &Position) -> Option<Cell> {
        self.shape.iter().position(|p| p == offset).map(|i| self.values[i])
    }
}

/// `c[z; S]`, the pattern of shape `S` around `z`.
pub fn pattern_at(c: &Configuration, z: &Position, shape: &[Position]) -> Pattern {
    Pattern { shape: shape.to_vec(), values: shape.iter().map(|o| c.get(&(*z + *o))).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ball, Dim};

    #[test]
    fn empty_pattern_is_blank() {
        let b = ball(Dim::Two, 1);
        let p = pattern_at(&Configuration::new(), &Position::p2(4, -2), b.offsets());
        assert!(p.values.iter().all(|c| c.is_none()));
        assert_eq!(p.values.len(), 5);
    }

    #[test]
    fn single_letter_pattern() {
        let b = ball(Dim::Two, 1);
        let c: Configuration = [(Position::p2(1, 0), Letter(0))].into_iter().collect();
        let p = pattern_at(&c, &Position::p2(0, 0), b.offsets());
        for (o, v) in p.shape.iter().zip(&p.values) {
            if *o == Position::p2(1, 0) {
                assert_eq!(*v, Some(Letter(0)));
            } else {
                assert_eq!(*v, None);
            }
        }
        assert_eq!(p.get(&Position::p2(1, 0)), Some(Some(Letter(0))));
        assert_eq!(p.get(&Position::p2(5, 0)), None);
    }

    #[test]
    fn translation_invariance() {
        let b = ball(Dim::Two, 2);
        let c: Configuration = [
            (Position::p2(1, 0), Letter(0)),
            (Position::p2(2, 1), Letter(1)),
            (Position::p2(-1, -1), Letter(2)),
        ]
        .into_iter()
        .collect();
        let z = Position::p2(0, 0);
        let v = Position::p2(3, -7);
        let lhs = pattern_at(&c, &(z + v), b.offsets());
        let rhs = pattern_at(&c.shift(-v), &z, b.offsets());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn domain_examples() {
        let s = GlobalState::single_head(Dim::Two, StateId(0));
        assert_eq!(domain(&s).into_iter().collect::<Vec<_>>(), vec![Position::p2(0, 0)]);
        let c: Configuration = [(Position::p2(1, 0), Letter(0))].into_iter().collect();
        let s = GlobalState::new(c, Position::p2(0, 0), StateId(0));
        assert_eq!(domain(&s).len(), 2);
    }

    #[test]
    fn set_blank_erases() {
        let mut c = Configuration::new();
        c.set(Position::p2(0, 0), Some(Letter(3)));
        c.set(Position::p2(0, 0), None);
        assert!(c.is_empty());
    }
}
