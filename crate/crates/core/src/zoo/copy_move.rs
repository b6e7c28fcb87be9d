//! The radius-1 equality tester built from copy-and-move steps, and its
//! seeds `σ(ā, i, a′)`.
//!
//! Orbit on `σ(ā, i, a′)`, with `n = |ā| - 1`:
//!
//! 1. `n + 1` copy-and-move cycles of five steps each. Cycle `j` runs
//!    `(3j,0) → (3j+1,0) → (3j+1,1) → (3j+2,1) → (3j+3,1) → (3j+3,0)` and
//!    leaves a copy of `a_j` at `(3j+1, 0)`. The phase ends at step
//!    `5(n+1)` with the head at `(3(n+1), 0)`.
//! 2. One step east, then the arrows `↓ ↓ ←` of column `3(n+1)+2` send the
//!    head down twice and then west along row `-2`.
//! 3. Next to the `↑` at `(3i, -2)` the head steps north, leaving a copy of
//!    `a′` at `(3i+1, -2)`.
//! 4. At `(3i+1, -1)` it compares north (`a_i`) with south (`a′`) and moves
//!    east on equality, west otherwise. Any further step heads north into
//!    an occupied cell, so the orbit blocks there.

use crate::config::{Configuration, GlobalState};
use crate::error::TuredoError;
use crate::lattice::{Dim, Position};
use crate::rules::{action, validate_spec, Atom, Rule, StateMatch, Symmetry, Turedo, TuredoSpec};

pub const DOWN: &str = "↓";
pub const LEFT: &str = "←";
pub const UP: &str = "↑";

const E: Position = Position::p2(1, 0);
const W: Position = Position::p2(-1, 0);
const N: Position = Position::p2(0, 1);
const S: Position = Position::p2(0, -1);

pub fn copy_and_move_tprime(a_plus: &[String]) -> Result<TuredoSpec, TuredoError> {
    if a_plus.len() < 2 {
        return Err(TuredoError::Schema("copy-and-move needs at least two letters".into()));
    }
    if a_plus.iter().any(|l| [DOWN, LEFT, UP].contains(&l.as_str())) {
        return Err(TuredoError::Schema("arrow letters are reserved".into()));
    }
    let fill = a_plus[0].as_str();
    let st = StateMatch::state;
    let mut rules = vec![Rule::new(st("c0"), [], action("c1", fill, E))];
    for a in a_plus {
        rules.push(Rule::new(st("c1"), [(E, Atom::letter(a))], action("c2", a, N)));
    }
    rules.push(Rule::new(st("c1"), [(E, Atom::letter(DOWN))], action("d", fill, S)));
    rules.push(Rule::new(st("c2"), [], action("c3", fill, E)));
    rules.push(Rule::new(st("c3"), [], action("c4", fill, E)));
    rules.push(Rule::new(st("c4"), [], action("c0", fill, S)));
    rules.push(Rule::new(st("d"), [(E, Atom::letter(DOWN))], action("d", fill, S)));
    rules.push(Rule::new(st("d"), [(E, Atom::letter(LEFT))], action("l", fill, W)));
    for a in a_plus {
        rules.push(Rule::new(st("l"), [(W, Atom::letter(UP)), (S, Atom::letter(a))], action("t", a, N)));
    }
    rules.push(Rule::new(st("l"), [], action("l", fill, W)));
    for a in a_plus {
        rules.push(Rule::new(st("t"), [(N, Atom::letter(a)), (S, Atom::letter(a))], action("done", fill, E)));
    }
    rules.push(Rule::new(st("t"), [], action("done", fill, W)));
    rules.push(Rule::new(StateMatch::Any, [], action("done", fill, N)));

    let mut alphabet = a_plus.to_vec();
    alphabet.extend([DOWN, LEFT, UP].iter().map(|s| s.to_string()));
    let spec = TuredoSpec {
        name: "copy-and-move".into(),
        dimension: Dim::Two,
        radius: 1,
        alphabet,
        states: ["c0", "c1", "c2", "c3", "c4", "d", "l", "t", "done"].iter().map(|s| s.to_string()).collect(),
        rules,
        symmetry: Symmetry::None,
    };
    let rep = validate_spec(&spec);
    if !rep.is_ok() {
        return Err(TuredoError::Validation(rep));
    }
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaSeedParams {
    pub a_vec: Vec<String>,
    pub i: usize,
    pub a_prime: String,
}

/// Head at the origin in state `c0`, `a_j` at `(3j+2, 0)`, `a′` at
/// `(3i+1, -3)`, arrows `↓ ↓ ←` down column `3(n+1)+2` and `↑` at `(3i, -2)`.
pub fn build_sigma_seed(t: &Turedo, p: &SigmaSeedParams) -> Result<GlobalState, TuredoError> {
    if p.a_vec.is_empty() {
        return Err(TuredoError::Seed("ā must hold at least one letter".into()));
    }
    let n = p.a_vec.len() as i64 - 1;
    let i = p.i as i64;
    if i > n {
        return Err(TuredoError::Seed(format!("i = {i} exceeds n = {n}")));
    }
    let arrow_x = 3 * (n + 1) + 2;
    let mut c = Configuration::new();
    let mut put = |x: i64, y: i64, name: &str| -> Result<(), TuredoError> {
        c.set(Position::p2(x, y), Some(t.letter(name)?));
        Ok(())
    };
    for (j, a) in p.a_vec.iter().enumerate() {
        put(3 * j as i64 + 2, 0, a)?;
    }
    put(3 * i + 1, -3, &p.a_prime)?;
    put(arrow_x, 0, DOWN)?;
    put(arrow_x, -1, DOWN)?;
    put(arrow_x, -2, LEFT)?;
    put(3 * i, -2, UP)?;
    Ok(GlobalState::new(c, Position::p2(0, 0), t.state("c0")?))
}

/// Step count and head position at the end of the copy phase.
pub fn copy_phase_end(n: usize) -> (u64, Position) {
    let n = n as i64;
    (5 * (n as u64 + 1), Position::p2(3 * (n + 1), 0))
}

/// Number of steps after which the head sits on its final cell, `t_{n,i}`
/// for this rule table.
pub fn decision_time(n: usize, i: usize) -> u64 {
    (8 * n + 13 - 3 * i) as u64
}

/// Final head position: `(3i+2, -1)` when `a_i = a′`, `(3i, -1)` otherwise.
pub fn expected_final(i: usize, equal: bool) -> Position {
    let x = 3 * i as i64 + if equal { 2 } else { 0 };
    Position::p2(x, -1)
}
