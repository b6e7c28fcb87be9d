#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use turedo::leakage::DividingPath;
use turedo::lattice::Dim;
use turedo::rules::{action, Atom, Rule, StateMatch, Symmetry};
use turedo::{Configuration, GlobalState, Position, Turedo, TuredoSpec};

pub const UNITS: [Position; 4] = [Position::p2(1, 0), Position::p2(0, 1), Position::p2(-1, 0), Position::p2(0, -1)];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_atom(r: &mut ChaCha8Rng, letters: &[String]) -> Atom {
    match r.gen_range(0..5) {
        0 => Atom::Blank,
        1 => Atom::NotBlank,
        2 => Atom::Any,
        _ => Atom::Letter(letters[r.gen_range(0..letters.len())].clone()),
    }
}

/// A planar radius-1 machine: `extra` random rules per state, each moving
/// into a cell it requires blank, then "first free neighbour" rules per
/// state and a catch-all. The head only blocks when boxed in.
pub fn random_machine(seed: u64, extra: usize) -> TuredoSpec {
    let mut r = rng(seed);
    let letters: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let states: Vec<String> = (0..3).map(|i| format!("q{i}")).collect();
    let mut rules = Vec::new();
    for q in &states {
        for _ in 0..extra {
            let mv = UNITS[r.gen_range(0..4)];
            let mut pat: Vec<(Position, Atom)> = Vec::new();
            for o in UNITS {
                if o == mv {
                    pat.push((o, Atom::Blank));
                } else if r.gen_bool(0.5) {
                    pat.push((o, random_atom(&mut r, &letters)));
                }
            }
            let to = &states[r.gen_range(0..states.len())];
            let w = &letters[r.gen_range(0..letters.len())];
            rules.push(Rule::new(StateMatch::state(q), pat, action(to, w, mv)));
        }
        let start = r.gen_range(0..4);
        for k in 0..4 {
            let mv = UNITS[(start + k) % 4];
            let to = &states[r.gen_range(0..states.len())];
            let w = &letters[r.gen_range(0..letters.len())];
            rules.push(Rule::new(StateMatch::state(q), [(mv, Atom::Blank)], action(to, w, mv)));
        }
    }
    rules.push(Rule::new(StateMatch::Any, [], action("q0", "a", UNITS[0])));
    TuredoSpec {
        name: format!("random-{seed}"),
        dimension: Dim::Two,
        radius: 1,
        alphabet: letters,
        states,
        rules,
        symmetry: Symmetry::None,
    }
}

/// Up to `cells` random letters in `[-span, span]²`, head on the blank origin.
pub fn random_seed(t: &Turedo, seed: u64, cells: usize, span: i64) -> GlobalState {
    let mut r = rng(seed);
    let mut c = Configuration::new();
    for _ in 0..cells {
        let p = Position::p2(r.gen_range(-span..=span), r.gen_range(-span..=span));
        if !p.is_zero() {
            c.set(p, Some(turedo::Letter(r.gen_range(0..t.num_letters() as u16))));
        }
    }
    let q = turedo::StateId(r.gen_range(0..t.num_states() as u16));
    GlobalState::new(c, Position::p2(0, 0), q)
}

/// A path running south from `(x0, top)` to `(.., -top)`, drifting sideways
/// but never left of `x_min`.
pub fn jittered_path(seed: u64, x0: i64, x_min: i64, top: i64) -> DividingPath {
    let mut r = rng(seed);
    let mut x = x0;
    let mut spine = vec![Position::p2(x, top)];
    let mut y = top;
    // sideways steps within one row keep a single direction
    let mut side = 0;
    while y > -top {
        if r.gen_bool(0.3) {
            if side == 0 {
                side = if r.gen_bool(0.5) { 1 } else { -1 };
            }
            let nx = (x + side).max(x_min);
            if nx != x {
                x = nx;
                spine.push(Position::p2(x, y));
                continue;
            }
        }
        side = 0;
        y -= 1;
        spine.push(Position::p2(x, y));
    }
    DividingPath::new(spine).expect("connected spine")
}

/// One spiral step computed from its description, independent of the rule
/// table: move ahead and turn left when possible, otherwise take the first
/// free neighbour clockwise from the front and keep the direction. Returns
/// `(letter, new head, new direction index)` or `None` when boxed in.
pub fn spiral_oracle(c: &Configuration, head: Position, dir: usize) -> Option<(u16, Position, usize)> {
    let front = UNITS[dir];
    let right = UNITS[(dir + 3) % 4];
    let back = UNITS[(dir + 2) % 4];
    let left = UNITS[(dir + 1) % 4];
    let parity = UNITS.iter().filter_map(|o| c.get(&(head + *o))).map(|l| l.0).sum::<u16>() % 2;
    if c.is_blank(&(head + front)) {
        return Some((parity, head + front, (dir + 1) % 4));
    }
    [right, back, left].into_iter().find(|o| c.is_blank(&(head + *o))).map(|o| (parity, head + o, dir))
}
