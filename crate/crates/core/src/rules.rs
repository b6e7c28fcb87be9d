//! Finite presentation of a local transition map as an ordered wildcard
//! rule list, its validation, and compilation to a fast evaluator.
//!
//! Rules are tried in order and the first whose state match and pattern
//! constraints hold fires. The list must end with an unconditional rule so
//! that the map is total.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::config::{Cell, Letter, Pattern, StateId};
use crate::error::TuredoError;
use crate::lattice::{ball, Ball, Dim, Position};

pub const BLANK: &str = "_";
pub const WILDCARD: &str = "*";
pub const NOT_BLANK: &str = "!_";

/// Direction-valued state names, in counter-clockwise order starting east.
pub const DIRECTIONS: [&str; 4] = ["→", "↑", "←", "↓"];

/// One constraint atom on a cell of the read pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Letter(String),
    Blank,
    NotBlank,
    Any,
}

impl Atom {
    pub fn as_str(&self) -> &str {
        match self {
            Atom::Letter(l) => l,
            Atom::Blank => BLANK,
            Atom::NotBlank => NOT_BLANK,
            Atom::Any => WILDCARD,
        }
    }

    pub fn parse(s: &str) -> Atom {
        match s {
            BLANK => Atom::Blank,
            NOT_BLANK => Atom::NotBlank,
            WILDCARD => Atom::Any,
            other => Atom::Letter(other.to_string()),
        }
    }

    pub fn letter(s: &str) -> Atom {
        Atom::Letter(s.to_string())
    }

    /// True when every cell satisfying `self` also satisfies `weaker`.
    fn implies(&self, weaker: &Atom) -> bool {
        match (self, weaker) {
            (_, Atom::Any) => true,
            (Atom::Letter(_), Atom::NotBlank) => true,
            (a, b) => a == b,
        }
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Atom::parse(&String::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StateMatch {
    Any,
    State(String),
}

impl StateMatch {
    pub fn state(s: &str) -> StateMatch {
        StateMatch::State(s.to_string())
    }

    fn covers(&self, other: &StateMatch) -> bool {
        match (self, other) {
            (StateMatch::Any, _) => true,
            (a, b) => a == b,
        }
    }
}

impl Serialize for StateMatch {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            StateMatch::Any => s.serialize_str(WILDCARD),
            StateMatch::State(q) => s.serialize_str(q),
        }
    }
}

impl<'de> Deserialize<'de> for StateMatch {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(if s == WILDCARD { StateMatch::Any } else { StateMatch::State(s) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub state: String,
    pub write: String,
    #[serde(rename = "move")]
    pub mv: Position,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub state: StateMatch,
    #[serde(with = "pattern_serde", default)]
    pub pattern: BTreeMap<Position, Atom>,
    pub action: Action,
}

impl Rule {
    pub fn new(state: StateMatch, pattern: impl IntoIterator<Item = (Position, Atom)>, action: Action) -> Rule {
        let pattern = pattern.into_iter().filter(|(_, a)| *a != Atom::Any).collect();
        Rule { state, pattern, action }
    }

    pub fn is_catch_all(&self) -> bool {
        self.state == StateMatch::Any && self.pattern.values().all(|a| *a == Atom::Any)
    }

    /// True when every input this rule accepts is already accepted by `earlier`.
    fn shadowed_by(&self, earlier: &Rule) -> bool {
        if !earlier.state.covers(&self.state) {
            return false;
        }
        earlier.pattern.iter().all(|(o, weak)| {
            let mine = self.pattern.get(o).unwrap_or(&Atom::Any);
            mine.implies(weak)
        })
    }
}

pub fn action(state: &str, write: &str, mv: Position) -> Action {
    Action { state: state.to_string(), write: write.to_string(), mv }
}

mod pattern_serde {
    use super::*;

    pub fn serialize<S: Serializer>(p: &BTreeMap<Position, Atom>, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(p.len()))?;
        for (k, v) in p {
            m.serialize_entry(&k.key(), v)?;
        }
        m.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Position, Atom>, D::Error> {
        let raw = BTreeMap::<String, Atom>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let p = Position::parse_key(&k).map_err(de::Error::custom)?;
            if out.insert(p, v).is_some() {
                return Err(de::Error::custom(format!("duplicate offset {k}")));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    #[default]
    None,
    Rot4,
}

/// A turedo `(A, Q, δ)` of a given dimension and radius, with `δ` given by
/// rule templates (expanded under `symmetry` before use).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuredoSpec {
    pub name: String,
    pub dimension: Dim,
    pub radius: u32,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub rules: Vec<Rule>,
    #[serde(default)]
    pub symmetry: Symmetry,
}

impl TuredoSpec {
    /// Concrete rule list after symmetry expansion.
    pub fn expanded_rules(&self) -> Result<Vec<Rule>, TuredoError> {
        match self.symmetry {
            Symmetry::None => Ok(self.rules.clone()),
            Symmetry::Rot4 => {
                if self.dimension != Dim::Two {
                    return Err(TuredoError::Rotation("rot4 symmetry needs dimension 2".into()));
                }
                expand_rotations(&self.rules, &self.states)
            }
        }
    }

    pub fn compile(&self) -> Result<Turedo, TuredoError> {
        Turedo::new(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    /// Index in the expanded rule list, when the issue concerns one rule.
    pub rule: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, rule: Option<usize>, msg: impl Into<String>) {
        self.errors.push(Issue { rule, message: msg.into() });
    }

    fn warn(&mut self, rule: Option<usize>, msg: impl Into<String>) {
        self.warnings.push(Issue { rule, message: msg.into() });
    }

    pub fn has_error(&self, needle: &str) -> bool {
        self.errors.iter().any(|e| e.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (kind, list) in [("error", &self.errors), ("warning", &self.warnings)] {
            for i in list {
                match i.rule {
                    Some(r) => writeln!(f, "{kind}: rule {r}: {}", i.message)?,
                    None => writeln!(f, "{kind}: {}", i.message)?,
                }
            }
        }
        Ok(())
    }
}

fn reserved(name: &str) -> bool {
    matches!(name, BLANK | WILDCARD | NOT_BLANK) || name.is_empty()
}

/// Structural checks on a spec. Never fails; everything is reported.
pub fn validate_spec(spec: &TuredoSpec) -> ValidationReport {
    let mut rep = ValidationReport::default();
    if spec.radius < 1 {
        rep.error(None, "radius must be at least 1");
    }
    if spec.alphabet.is_empty() {
        rep.error(None, "empty alphabet");
    }
    if spec.states.is_empty() {
        rep.error(None, "empty state set");
    }
    let mut seen = HashMap::new();
    for l in &spec.alphabet {
        if reserved(l) {
            rep.error(None, format!("letter {l:?} is reserved"));
        }
        if seen.insert(l.as_str(), ()).is_some() {
            rep.error(None, format!("duplicate letter {l:?}"));
        }
    }
    let mut seen = HashMap::new();
    for q in &spec.states {
        if q == WILDCARD || q.is_empty() {
            rep.error(None, format!("state name {q:?} is reserved"));
        }
        if seen.insert(q.as_str(), ()).is_some() {
            rep.error(None, format!("duplicate state {q:?}"));
        }
    }

    let rules = match spec.expanded_rules() {
        Ok(r) => r,
        Err(e) => {
            rep.error(None, e.to_string());
            return rep;
        }
    };
    let read = ball(spec.dimension, spec.radius);
    let moves = ball(spec.dimension, 1);
    let has_letter = |l: &str| spec.alphabet.iter().any(|a| a == l);
    let has_state = |q: &str| spec.states.iter().any(|s| s == q);

    for (i, r) in rules.iter().enumerate() {
        if let StateMatch::State(q) = &r.state {
            if !has_state(q) {
                rep.error(Some(i), format!("unknown state {q:?}"));
            }
        }
        for (o, a) in &r.pattern {
            if !read.contains(o) {
                rep.error(Some(i), format!("offset {o} outside the read ball"));
            }
            if let Atom::Letter(l) = a {
                if !has_letter(l) {
                    rep.error(Some(i), format!("unknown letter {l:?} in pattern"));
                }
            }
        }
        if !has_state(&r.action.state) {
            rep.error(Some(i), format!("unknown target state {:?}", r.action.state));
        }
        if r.action.write == BLANK {
            rep.error(Some(i), "blank write forbidden");
        } else if !has_letter(&r.action.write) {
            rep.error(Some(i), format!("unknown write letter {:?}", r.action.write));
        }
        if !moves.contains(&r.action.mv) {
            rep.error(Some(i), format!("move {} not in B_d(1)", r.action.mv));
        } else if r.action.mv.is_zero() {
            rep.warn(Some(i), "zero move: the head writes in place and blocks");
        }
    }

    match rules.last() {
        Some(r) if r.is_catch_all() => {}
        _ => rep.error(None, "non-total transition map: the last rule must be an unconditional catch-all"),
    }

    // Shadowing: first earlier rule that already accepts everything this one does.
    for j in 1..rules.len() {
        if let Some(i) = (0..j).find(|&i| rules[j].shadowed_by(&rules[i])) {
            rep.warn(Some(j), format!("unreachable: shadowed by rule {i}"));
        }
    }
    rep
}

fn rotate_state(q: &str, k: u8, states: &[String]) -> Result<String, TuredoError> {
    match DIRECTIONS.iter().position(|d| *d == q) {
        None => Ok(q.to_string()),
        Some(i) => {
            let r = DIRECTIONS[(i + k as usize) % 4];
            if states.iter().any(|s| s == r) {
                Ok(r.to_string())
            } else {
                Err(TuredoError::Rotation(format!(
                    "state {q:?} rotates to {r:?}, which is not a declared state"
                )))
            }
        }
    }
}

/// Emits each template four times, rotated by 0°, 90°, 180° and 270°
/// counter-clockwise. Offsets, moves and direction-valued states rotate;
/// letters and other states are left unchanged.
pub fn expand_rotations(rules: &[Rule], states: &[String]) -> Result<Vec<Rule>, TuredoError> {
    let mut out = Vec::with_capacity(rules.len() * 4);
    for r in rules {
        if let Some(o) = r.pattern.keys().next() {
            if o.dim() != Dim::Two {
                return Err(TuredoError::Rotation("planar rotation of a non-planar rule".into()));
            }
        }
        if r.action.mv.dim() != Dim::Two {
            return Err(TuredoError::Rotation("planar rotation of a non-planar move".into()));
        }
        for k in 0..4u8 {
            let state = match &r.state {
                StateMatch::Any => StateMatch::Any,
                StateMatch::State(q) => StateMatch::State(rotate_state(q, k, states)?),
            };
            let pattern = r.pattern.iter().map(|(o, a)| (o.rot90(k), a.clone())).collect();
            let action = Action {
                state: rotate_state(&r.action.state, k, states)?,
                write: r.action.write.clone(),
                mv: r.action.mv.rot90(k),
            };
            out.push(Rule { state, pattern, action });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    Letter(Letter),
    Blank,
    NotBlank,
}

impl Check {
    #[inline]
    fn holds(self, c: Cell) -> bool {
        match self {
            Check::Letter(l) => c == Some(l),
            Check::Blank => c.is_none(),
            Check::NotBlank => c.is_some(),
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    checks: Vec<(usize, Check)>,
    result: Transition,
}

/// Result of the local transition map `δ(q, p) = (q', a, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub state: StateId,
    pub write: Letter,
    pub mv: Position,
    /// Index of the firing rule in the expanded list.
    pub rule: usize,
}

/// A validated, compiled turedo. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Turedo {
    spec: TuredoSpec,
    rules: Vec<Rule>,
    read: Ball,
    letter_ids: HashMap<String, Letter>,
    state_ids: HashMap<String, StateId>,
    by_state: Vec<Vec<CompiledRule>>,
    warnings: Vec<Issue>,
}

impl Turedo {
    pub fn new(spec: &TuredoSpec) -> Result<Turedo, TuredoError> {
        let rep = validate_spec(spec);
        if !rep.is_ok() {
            return Err(TuredoError::Validation(rep));
        }
        let rules = spec.expanded_rules()?;
        let read = ball(spec.dimension, spec.radius);
        let letter_ids: HashMap<String, Letter> =
            spec.alphabet.iter().enumerate().map(|(i, l)| (l.clone(), Letter(i as u16))).collect();
        let state_ids: HashMap<String, StateId> =
            spec.states.iter().enumerate().map(|(i, q)| (q.clone(), StateId(i as u16))).collect();
        let mut by_state = vec![Vec::new(); spec.states.len()];
        for (i, r) in rules.iter().enumerate() {
            let checks = r
                .pattern
                .iter()
                .filter_map(|(o, a)| {
                    let idx = read.index_of(o).expect("validated offset");
                    match a {
                        Atom::Any => None,
                        Atom::Blank => Some((idx, Check::Blank)),
                        Atom::NotBlank => Some((idx, Check::NotBlank)),
                        Atom::Letter(l) => Some((idx, Check::Letter(letter_ids[l]))),
                    }
                })
                .collect();
            let result = Transition {
                state: state_ids[&r.action.state],
                write: letter_ids[&r.action.write],
                mv: r.action.mv,
                rule: i,
            };
            let cr = CompiledRule { checks, result };
            match &r.state {
                StateMatch::Any => by_state.iter_mut().for_each(|v| v.push(cr.clone())),
                StateMatch::State(q) => by_state[state_ids[q].0 as usize].push(cr),
            }
        }
        Ok(Turedo { spec: spec.clone(), rules, read, letter_ids, state_ids, by_state, warnings: rep.warnings })
    }

    pub fn spec(&self) -> &TuredoSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn dim(&self) -> Dim {
        self.spec.dimension
    }

    pub fn radius(&self) -> u32 {
        self.spec.radius
    }

    /// The read neighbourhood `B_d(r)`.
    pub fn read_ball(&self) -> &Ball {
        &self.read
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn warnings(&self) -> &[Issue] {
        &self.warnings
    }

    pub fn letter(&self, name: &str) -> Result<Letter, TuredoError> {
        self.letter_ids.get(name).copied().ok_or_else(|| TuredoError::UnknownLetter(name.to_string()))
    }

    pub fn state(&self, name: &str) -> Result<StateId, TuredoError> {
        self.state_ids.get(name).copied().ok_or_else(|| TuredoError::UnknownState(name.to_string()))
    }

    pub fn letter_name(&self, l: Letter) -> &str {
        &self.spec.alphabet[l.0 as usize]
    }

    pub fn cell_name(&self, c: Cell) -> &str {
        c.map(|l| self.letter_name(l)).unwrap_or(BLANK)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.spec.states[q.0 as usize]
    }

    pub fn num_letters(&self) -> usize {
        self.spec.alphabet.len()
    }

    pub fn num_states(&self) -> usize {
        self.spec.states.len()
    }

    /// Parses a cell name, mapping `_` to the blank.
    pub fn cell(&self, name: &str) -> Result<Cell, TuredoError> {
        if name == BLANK {
            Ok(None)
        } else {
            self.letter(name).map(Some)
        }
    }

    /// `δ(q, p)` over a pattern whose values follow [`Self::read_ball`] order.
    #[inline]
    pub fn eval_values(&self, q: StateId, values: &[Cell]) -> Transition {
        for r in &self.by_state[q.0 as usize] {
            if r.checks.iter().all(|&(i, c)| c.holds(values[i])) {
                return r.result;
            }
        }
        unreachable!("validated specs end with a catch-all rule")
    }

    /// `δ(q, p)`; the pattern shape must be the read ball.
    pub fn eval_delta(&self, q: StateId, p: &Pattern) -> Transition {
        debug_assert_eq!(p.shape.as_slice(), self.read.offsets());
        self.eval_values(q, &p.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{pattern_at, Configuration};

    fn p(x: i64, y: i64) -> Position {
        Position::p2(x, y)
    }

    fn base_spec(rules: Vec<Rule>) -> TuredoSpec {
        TuredoSpec {
            name: "t".into(),
            dimension: Dim::Two,
            radius: 1,
            alphabet: vec!["a".into(), "b".into()],
            states: vec!["q".into(), "r".into()],
            rules,
            symmetry: Symmetry::None,
        }
    }

    fn catch_all() -> Rule {
        Rule::new(StateMatch::Any, [], action("q", "a", p(1, 0)))
    }

    #[test]
    fn missing_catch_all_is_non_total() {
        let spec = base_spec(vec![Rule::new(StateMatch::state("q"), [], action("q", "a", p(1, 0)))]);
        let rep = validate_spec(&spec);
        assert!(rep.has_error("non-total transition map"));
        assert!(spec.compile().is_err());
    }

    #[test]
    fn blank_write_rejected() {
        let spec = base_spec(vec![
            Rule::new(StateMatch::state("q"), [], action("q", "_", p(1, 0))),
            catch_all(),
        ]);
        assert!(validate_spec(&spec).has_error("blank write forbidden"));
    }

    #[test]
    fn range_and_name_checks() {
        let mut spec = base_spec(vec![
            Rule::new(StateMatch::state("zz"), [(p(2, 0), Atom::letter("c"))], action("r", "a", p(1, 1))),
            catch_all(),
        ]);
        spec.alphabet.push("a".into());
        let rep = validate_spec(&spec);
        assert!(rep.has_error("unknown state"));
        assert!(rep.has_error("outside the read ball"));
        assert!(rep.has_error("unknown letter"));
        assert!(rep.has_error("not in B_d(1)"));
        assert!(rep.has_error("duplicate letter"));
    }

    #[test]
    fn zero_move_and_shadow_warnings() {
        let spec = base_spec(vec![
            Rule::new(StateMatch::Any, [(p(1, 0), Atom::NotBlank)], action("q", "a", p(0, 0))),
            Rule::new(StateMatch::state("q"), [(p(1, 0), Atom::letter("a"))], action("q", "a", p(1, 0))),
            catch_all(),
        ]);
        let rep = validate_spec(&spec);
        assert!(rep.is_ok(), "{rep}");
        assert!(rep.warnings.iter().any(|w| w.message.contains("zero move")));
        assert!(rep.warnings.iter().any(|w| w.rule == Some(1) && w.message.contains("shadowed by rule 0")));
    }

    #[test]
    fn catch_all_only_constant() {
        let t = base_spec(vec![catch_all()]).compile().unwrap();
        let b = t.read_ball().offsets().to_vec();
        let c: Configuration = [(p(1, 0), Letter(1))].into_iter().collect();
        let a1 = t.eval_delta(StateId(0), &pattern_at(&Configuration::new(), &p(0, 0), &b));
        let a2 = t.eval_delta(StateId(1), &pattern_at(&c, &p(0, 0), &b));
        assert_eq!((a1.state, a1.write, a1.mv), (a2.state, a2.write, a2.mv));
    }

    #[test]
    fn first_match_wins() {
        let t = base_spec(vec![
            Rule::new(StateMatch::state("q"), [(p(1, 0), Atom::NotBlank)], action("r", "b", p(0, 1))),
            Rule::new(StateMatch::state("q"), [(p(1, 0), Atom::letter("a"))], action("q", "a", p(0, -1))),
            catch_all(),
        ])
        .compile()
        .unwrap();
        let b = t.read_ball().offsets().to_vec();
        let c: Configuration = [(p(1, 0), Letter(0))].into_iter().collect();
        let tr = t.eval_delta(StateId(0), &pattern_at(&c, &p(0, 0), &b));
        assert_eq!(tr.rule, 0);
        assert_eq!(tr.mv, p(0, 1));
    }

    #[test]
    fn rotations_of_empty_list() {
        assert!(expand_rotations(&[], &[]).unwrap().is_empty());
    }

    #[test]
    fn rotation_invariant_rule_orbit() {
        let r = Rule::new(StateMatch::state("q"), [], action("q", "a", p(1, 0)));
        let out = expand_rotations(&[r], &["q".to_string()]).unwrap();
        let moves: Vec<_> = out.iter().map(|r| r.action.mv).collect();
        assert_eq!(moves, vec![p(1, 0), p(0, 1), p(-1, 0), p(0, -1)]);
    }

    #[test]
    fn rotation_of_undeclared_direction_fails() {
        let r = Rule::new(StateMatch::state("↑"), [], action("↑", "a", p(0, 1)));
        let states = vec!["↑".to_string()];
        assert!(matches!(expand_rotations(&[r], &states), Err(TuredoError::Rotation(_))));
    }

    #[test]
    fn rotation_turns_states_and_offsets() {
        let states: Vec<String> = DIRECTIONS.iter().map(|s| s.to_string()).collect();
        let r = Rule::new(StateMatch::state("↑"), [(p(0, 1), Atom::Blank)], action("←", "a", p(0, 1)));
        let out = expand_rotations(&[r], &states).unwrap();
        assert_eq!(out[1].state, StateMatch::state("←"));
        assert_eq!(out[1].action.state, "↓");
        assert_eq!(out[1].action.mv, p(-1, 0));
        assert!(out[1].pattern.contains_key(&p(-1, 0)));
    }

    #[test]
    fn serde_roundtrip() {
        let spec = base_spec(vec![
            Rule::new(StateMatch::state("q"), [(p(-1, 0), Atom::NotBlank), (p(1, 0), Atom::Blank)], action("r", "b", p(1, 0))),
            catch_all(),
        ]);
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"-1,0\":\"!_\""));
        let back: TuredoSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }
}
