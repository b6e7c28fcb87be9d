//! Radius-2 zigzag copier.
//!
//! The seed is a vertical word `u` of length `n` in column `-1`, rows
//! `0..n`, with the head at the origin. The machine copies the column to
//! the right `n` times, sweeping up and down alternately. It then leaves an
//! empty column (a single filler cell at the end where it crossed) and
//! makes `n` more copies, the first of them read across the gap with the
//! radius-2 neighbourhood. Finally it goes around the last block on the
//! side where the gap column is open and walks into that column until it
//! blocks. For even `n` the gap is open to the north and the head ends at
//! `(n, 1)`.
//!
//! Copy letters carry flags: `d` marks the counter diagonal (row `k-1` of
//! the `k`-th copy in a block), `f` the bottom row and `c` the top row.
//! A block is complete when the copy just written has its diagonal mark in
//! the top row. The flags let the copy that reads across the gap see the
//! ends of a column it cannot otherwise reach.

use crate::config::{Configuration, GlobalState};
use crate::error::TuredoError;
use crate::lattice::{Dim, Position};
use crate::rules::{action, Atom, Rule, StateMatch, Symmetry, Turedo, TuredoSpec};

pub const GAP: &str = "g";
pub const WALK: &str = "w";

const E: Position = Position::p2(1, 0);
const W: Position = Position::p2(-1, 0);
const N: Position = Position::p2(0, 1);
const S: Position = Position::p2(0, -1);
const SW: Position = Position::p2(-1, -1);
const NW: Position = Position::p2(-1, 1);
const FAR_W: Position = Position::p2(-2, 0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CopyCell {
    sym: usize,
    diag: bool,
    floor: bool,
    ceil: bool,
}

impl CopyCell {
    fn name(&self) -> String {
        let mut s = self.sym.to_string();
        if self.diag {
            s.push('d');
        }
        if self.floor {
            s.push('f');
        }
        if self.ceil {
            s.push('c');
        }
        s
    }

    fn all(symbols: usize) -> Vec<CopyCell> {
        let mut v = Vec::new();
        for sym in 0..symbols {
            for bits in 0..8u8 {
                v.push(CopyCell { sym, diag: bits & 1 != 0, floor: bits & 2 != 0, ceil: bits & 4 != 0 });
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    /// First block of copies.
    A,
    /// Second block, gap open to the north.
    B,
    /// Second block, gap open to the south.
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Src {
    Seed,
    Near,
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Column {
    block: Block,
    up: bool,
    src: Src,
    last: bool,
}

impl Column {
    fn near(block: Block, up: bool, last: bool) -> Column {
        Column { block, up, src: Src::Near, last }
    }

    fn name(&self) -> String {
        match (self.src, self.block) {
            (Src::Seed, _) => "seed".into(),
            (Src::Far, Block::C) => "farC".into(),
            (Src::Far, _) => "farB".into(),
            (Src::Near, b) => {
                format!("{}{:?}{}", if self.up { "up" } else { "dn" }, b, if self.last { "!" } else { "" })
            }
        }
    }

    /// Next state and move after writing `w`.
    fn after(&self, w: CopyCell) -> (String, Position) {
        let last = self.last || (w.diag && w.ceil);
        let at_end = if self.up { w.ceil } else { w.floor };
        if !at_end {
            let next = Column { last, ..*self };
            return (next.name(), if self.up { N } else { S });
        }
        if !last {
            return (Column::near(self.block, !self.up, false).name(), E);
        }
        match (self.block, self.up) {
            (Block::A, false) => ("gapB".into(), E),
            (Block::A, true) => ("gapT".into(), E),
            (Block::B, false) => ("climb".into(), E),
            (Block::C, false) => ("walkS".into(), S),
            _ => ("halt".into(), E),
        }
    }
}

fn near_columns() -> Vec<Column> {
    let mut v = Vec::new();
    for b in [Block::A, Block::B, Block::C] {
        v.push(Column::near(b, true, false));
        v.push(Column::near(b, false, false));
        v.push(Column::near(b, false, true));
    }
    v
}

fn symbol_names(symbols: usize) -> Vec<String> {
    (0..symbols).map(|s| s.to_string()).collect()
}

/// Zigzag copier over `symbols` base symbols (`"0"`, `"1"`, …).
pub fn zigzag_copier(symbols: usize) -> Result<TuredoSpec, TuredoError> {
    if !(1..=10).contains(&symbols) {
        return Err(TuredoError::Schema("zigzag copier supports 1 to 10 symbols".into()));
    }
    let cells = CopyCell::all(symbols);
    let diag_cells: Vec<CopyCell> = cells.iter().copied().filter(|c| c.diag).collect();
    let st = StateMatch::state;
    let mut rules = Vec::new();

    // First column: read the seed word directly and derive the flags.
    let seed = Column { block: Block::A, up: true, src: Src::Seed, last: false };
    for sym in 0..symbols {
        for floor in [true, false] {
            for ceil in [true, false] {
                let w = CopyCell { sym, diag: floor, floor, ceil };
                let (next, mv) = seed.after(w);
                let occ = |blank: bool| if blank { Atom::Blank } else { Atom::NotBlank };
                rules.push(Rule::new(
                    st("seed"),
                    [(W, Atom::letter(&sym.to_string())), (SW, occ(floor)), (NW, occ(ceil))],
                    action(&next, &w.name(), mv),
                ));
            }
        }
    }

    for col in near_columns() {
        let name = col.name();
        for src in &cells {
            for d in &diag_cells {
                let w = CopyCell { diag: true, ..*src };
                let (next, mv) = col.after(w);
                rules.push(Rule::new(
                    st(&name),
                    [(W, Atom::letter(&src.name())), (SW, Atom::letter(&d.name()))],
                    action(&next, &w.name(), mv),
                ));
            }
            let w = CopyCell { diag: false, ..*src };
            let (next, mv) = col.after(w);
            rules.push(Rule::new(st(&name), [(W, Atom::letter(&src.name()))], action(&next, &w.name(), mv)));
        }
    }

    // First column after the gap: read two cells away, restart the counter.
    for far in [
        Column { block: Block::B, up: true, src: Src::Far, last: false },
        Column { block: Block::C, up: false, src: Src::Far, last: false },
    ] {
        for src in &cells {
            let w = CopyCell { diag: src.floor, ..*src };
            let (next, mv) = far.after(w);
            rules.push(Rule::new(st(&far.name()), [(FAR_W, Atom::letter(&src.name()))], action(&next, &w.name(), mv)));
        }
    }

    rules.push(Rule::new(st("gapB"), [], action("farB", GAP, E)));
    rules.push(Rule::new(st("gapT"), [], action("farC", GAP, E)));

    rules.push(Rule::new(st("climb"), [(W, Atom::NotBlank)], action("climb", WALK, N)));
    rules.push(Rule::new(st("climb"), [], action("walkN", WALK, W)));
    rules.push(Rule::new(st("walkN"), [(S, Atom::Blank)], action("descend", WALK, S)));
    rules.push(Rule::new(st("walkN"), [(S, Atom::letter(GAP))], action("descend", WALK, S)));
    rules.push(Rule::new(st("walkN"), [], action("walkN", WALK, W)));
    rules.push(Rule::new(st("descend"), [], action("descend", WALK, S)));
    rules.push(Rule::new(st("walkS"), [(N, Atom::Blank)], action("ascend", WALK, N)));
    rules.push(Rule::new(st("walkS"), [(N, Atom::letter(GAP))], action("ascend", WALK, N)));
    rules.push(Rule::new(st("walkS"), [], action("walkS", WALK, W)));
    rules.push(Rule::new(st("ascend"), [], action("ascend", WALK, N)));
    rules.push(Rule::new(StateMatch::Any, [], action("halt", WALK, E)));

    let mut alphabet: Vec<String> = cells.iter().map(|c| c.name()).collect();
    alphabet.push(GAP.into());
    alphabet.push(WALK.into());
    let mut states = vec!["seed".to_string()];
    states.extend(near_columns().iter().map(|c| c.name()));
    states.extend(
        ["farB", "farC", "gapB", "gapT", "climb", "walkN", "descend", "walkS", "ascend", "halt"]
            .iter()
            .map(|s| s.to_string()),
    );
    Ok(TuredoSpec {
        name: format!("zigzag-copier-{symbols}"),
        dimension: Dim::Two,
        radius: 2,
        alphabet,
        states,
        rules,
        symmetry: Symmetry::None,
    })
}

/// The word `u` in column `-1`, bottom at row 0, head at the origin.
pub fn zigzag_seed(t: &Turedo, u: &[usize]) -> Result<GlobalState, TuredoError> {
    if u.is_empty() {
        return Err(TuredoError::Seed("zigzag seed needs a non-empty word".into()));
    }
    let names = symbol_names(t.num_letters());
    let mut c = Configuration::new();
    for (y, s) in u.iter().enumerate() {
        let name = names.get(*s).ok_or_else(|| TuredoError::Seed(format!("symbol {s} out of range")))?;
        c.set(Position::p2(-1, y as i64), Some(t.letter(name)?));
    }
    Ok(GlobalState::new(c, Position::p2(0, 0), t.state("seed")?))
}

/// Base symbol carried by a letter, ignoring copy flags. Fillers have none.
pub fn zigzag_symbol(name: &str) -> Option<usize> {
    let mut chars = name.chars();
    let sym = chars.next()?.to_digit(10)? as usize;
    chars.all(|c| matches!(c, 'd' | 'f' | 'c')).then_some(sym)
}

/// Symbols of column `x`, rows `0..n`; `None` where a cell is blank or a filler.
pub fn column_word(t: &Turedo, c: &Configuration, x: i64, n: usize) -> Vec<Option<usize>> {
    (0..n as i64)
        .map(|y| c.get(&Position::p2(x, y)).and_then(|l| zigzag_symbol(t.letter_name(l))))
        .collect()
}
