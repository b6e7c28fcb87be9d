//! The spiral-XOR turedo.
//!
//! The head holds a direction, tries to move that way and, when it can,
//! turns counter-clockwise. Otherwise it takes the first free neighbour in
//! clockwise order and keeps its direction. The letter left behind is the
//! parity of the non-blank neighbours.
//!
//! Templates are written for the `↑` state and expanded by quarter turns.

use crate::lattice::{Dim, Position};
use crate::rules::{action, Atom, Rule, StateMatch, Symmetry, TuredoSpec, DIRECTIONS};

const CELLS: [Option<u8>; 3] = [None, Some(0), Some(1)];

fn atom(c: Option<u8>) -> Atom {
    match c {
        None => Atom::Blank,
        Some(v) => Atom::letter(&v.to_string()),
    }
}

fn parity(cells: &[Option<u8>]) -> String {
    (cells.iter().flatten().sum::<u8>() % 2).to_string()
}

pub fn spiral_xor() -> TuredoSpec {
    let front = Position::p2(0, 1);
    let right = Position::p2(1, 0);
    let back = Position::p2(0, -1);
    let left = Position::p2(-1, 0);
    let ring = [front, right, back, left];
    let up = StateMatch::state("↑");
    let mut rules = Vec::new();

    // Row k: the first k neighbours (clockwise from the front) are occupied
    // and neighbour k is free.
    for free in 0..4 {
        let new_state = if free == 0 { "←" } else { "↑" };
        let occupied = &ring[..free];
        let rest = &ring[free + 1..];
        let occ_choices = product(&[Some(0), Some(1)], occupied.len());
        let rest_choices = product(&CELLS, rest.len());
        for occ in &occ_choices {
            for others in &rest_choices {
                let mut pattern: Vec<(Position, Atom)> =
                    occupied.iter().zip(occ).map(|(o, c)| (*o, atom(*c))).collect();
                pattern.push((ring[free], Atom::Blank));
                pattern.extend(rest.iter().zip(others).map(|(o, c)| (*o, atom(*c))));
                let all: Vec<Option<u8>> = occ.iter().chain(others.iter()).copied().collect();
                rules.push(Rule::new(up.clone(), pattern, action(new_state, &parity(&all), ring[free])));
            }
        }
    }
    // Only reached with all four neighbours occupied, where every move blocks.
    rules.push(Rule::new(StateMatch::Any, [], action("↑", "0", front)));

    TuredoSpec {
        name: "spiral-xor".into(),
        dimension: Dim::Two,
        radius: 1,
        alphabet: vec!["0".into(), "1".into()],
        states: DIRECTIONS.iter().map(|s| s.to_string()).collect(),
        rules,
        symmetry: Symmetry::Rot4,
    }
}

fn product(choices: &[Option<u8>], len: usize) -> Vec<Vec<Option<u8>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(*c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Unit vector of a direction state name.
pub fn direction_vector(state: &str) -> Option<Position> {
    let k = DIRECTIONS.iter().position(|d| *d == state)?;
    Some(Position::p2(1, 0).rot90(k as u8))
}
