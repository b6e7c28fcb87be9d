//! Comparator turedo of radius `r + 1`.
//!
//! With blanks directly north and south of the head, it compares the letters
//! at `(r+1, 0)` and `(0, r+1)` and moves north when they agree, south
//! otherwise. Two blank probes count as equal.

use crate::error::TuredoError;
use crate::lattice::{Dim, Position};
use crate::rules::{action, validate_spec, Atom, Rule, StateMatch, Symmetry, TuredoSpec};

pub const MARKER: &str = "#";

pub fn comparator(r: u32, letters: &[String]) -> Result<TuredoSpec, TuredoError> {
    if r < 1 {
        return Err(TuredoError::Schema("comparator needs r >= 1".into()));
    }
    if letters.len() < 2 {
        return Err(TuredoError::Schema("comparator needs at least two letters".into()));
    }
    let reach = r as i64 + 1;
    let east = Position::p2(reach, 0);
    let north_probe = Position::p2(0, reach);
    let n1 = Position::p2(0, 1);
    let s1 = Position::p2(0, -1);
    let q = StateMatch::state("q");
    let mut alphabet: Vec<String> = letters.to_vec();
    if !alphabet.iter().any(|l| l == MARKER) {
        alphabet.push(MARKER.to_string());
    }

    let mut rules = Vec::new();
    for l in &alphabet {
        rules.push(Rule::new(
            q.clone(),
            [(n1, Atom::Blank), (s1, Atom::Blank), (east, Atom::letter(l)), (north_probe, Atom::letter(l))],
            action("q", MARKER, n1),
        ));
    }
    rules.push(Rule::new(
        q.clone(),
        [(n1, Atom::Blank), (s1, Atom::Blank), (east, Atom::Blank), (north_probe, Atom::Blank)],
        action("q", MARKER, n1),
    ));
    rules.push(Rule::new(q, [(n1, Atom::Blank), (s1, Atom::Blank)], action("q", MARKER, s1)));
    rules.push(Rule::new(StateMatch::Any, [], action("q", MARKER, Position::p2(1, 0))));

    let spec = TuredoSpec {
        name: format!("comparator-r{}", reach),
        dimension: Dim::Two,
        radius: reach as u32,
        alphabet,
        states: vec!["q".into()],
        rules,
        symmetry: Symmetry::None,
    };
    let rep = validate_spec(&spec);
    if !rep.is_ok() {
        return Err(TuredoError::Validation(rep));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Configuration, GlobalState};
    use crate::engine::{step, StepOutcome};

    fn letters(n: usize) -> Vec<String> {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    }

    fn decide(r: u32, e: Option<&str>, n: Option<&str>) -> Position {
        let t = comparator(r, &letters(3)).unwrap().compile().unwrap();
        let reach = r as i64 + 1;
        let mut c = Configuration::new();
        if let Some(l) = e {
            c.set(Position::p2(reach, 0), Some(t.letter(l).unwrap()));
        }
        if let Some(l) = n {
            c.set(Position::p2(0, reach), Some(t.letter(l).unwrap()));
        }
        let s = GlobalState::new(c, Position::p2(0, 0), t.state("q").unwrap());
        match step(&t, &s, 0).1 {
            StepOutcome::Moved(e) => e.mv,
            StepOutcome::Blocked => panic!("blocked"),
        }
    }

    #[test]
    fn radius_is_r_plus_one() {
        assert_eq!(comparator(2, &letters(2)).unwrap().radius, 3);
    }

    #[test]
    fn equal_moves_north() {
        assert_eq!(decide(1, Some("a"), Some("a")), Position::p2(0, 1));
    }

    #[test]
    fn different_moves_south() {
        assert_eq!(decide(1, Some("a"), Some("b")), Position::p2(0, -1));
    }

    #[test]
    fn blank_probes_count_as_equal() {
        assert_eq!(decide(2, None, None), Position::p2(0, 1));
        assert_eq!(decide(2, None, Some("c")), Position::p2(0, -1));
    }

    #[test]
    fn rejects_small_alphabet() {
        assert!(comparator(1, &letters(1)).is_err());
        assert!(comparator(0, &letters(2)).is_err());
    }
}
