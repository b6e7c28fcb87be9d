//! Crossing descriptions across a dividing path and reconstruction of the
//! far side from them, for radius-1 planar turedos.
//!
//! The path `ρ` is a finite 4-connected spine extended by a ray going north
//! from its first cell and a ray going south from its last cell. `A0` is
//! the component of `Z² ∖ ρ` holding the seed. Every step that vacates a
//! cell of `ρ` is recorded as an event; from those events alone the
//! configuration outside `A0` can be replayed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{domain, Configuration, GlobalState, Letter, StateId};
use crate::engine::{run, step_mut, StepOutcome};
use crate::error::TuredoError;
use crate::lattice::{ball, Dim, Position};
use crate::rules::Turedo;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DividingPath {
    pub spine: Vec<Position>,
}

impl DividingPath {
    pub fn new(spine: Vec<Position>) -> Result<DividingPath, TuredoError> {
        let p = DividingPath { spine };
        p.validate()?;
        Ok(p)
    }

    /// A straight vertical line `x = x0`.
    pub fn vertical(x0: i64) -> DividingPath {
        DividingPath { spine: vec![Position::p2(x0, 0)] }
    }

    pub fn validate(&self) -> Result<(), TuredoError> {
        let (Some(first), Some(last)) = (self.spine.first(), self.spine.last()) else {
            return Err(TuredoError::Path("empty spine".into()));
        };
        if self.spine.iter().any(|p| p.dim() != Dim::Two) {
            return Err(TuredoError::Path("dividing paths are planar".into()));
        }
        for w in self.spine.windows(2) {
            if (w[1] - w[0]).l1() != 1 {
                return Err(TuredoError::Path(format!("{} and {} are not 4-neighbours", w[0], w[1])));
            }
        }
        let set: BTreeSet<Position> = self.spine.iter().copied().collect();
        if set.len() != self.spine.len() {
            return Err(TuredoError::Path("spine revisits a cell".into()));
        }
        for p in &self.spine {
            let on_north = p.x() == first.x() && p.y() > first.y();
            let on_south = p.x() == last.x() && p.y() < last.y();
            if on_north || on_south {
                return Err(TuredoError::Path(format!("spine cell {p} lies on a ray")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &Position) -> bool {
        let first = self.spine[0];
        let last = self.spine[self.spine.len() - 1];
        (p.x() == first.x() && p.y() > first.y()) || (p.x() == last.x() && p.y() < last.y()) || self.spine.contains(p)
    }

    fn spine_bounds(&self) -> (Position, Position) {
        let xs = self.spine.iter().map(|p| p.x());
        let ys = self.spine.iter().map(|p| p.y());
        (
            Position::p2(xs.clone().min().unwrap_or(0), ys.clone().min().unwrap_or(0)),
            Position::p2(xs.max().unwrap_or(0), ys.max().unwrap_or(0)),
        )
    }
}

/// Closed rectangle `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Position,
    pub max: Position,
}

impl Rect {
    pub fn contains(&self, p: &Position) -> bool {
        (self.min.x()..=self.max.x()).contains(&p.x()) && (self.min.y()..=self.max.y()).contains(&p.y())
    }

    fn union(&self, o: &Rect) -> Rect {
        Rect {
            min: Position::p2(self.min.x().min(o.min.x()), self.min.y().min(o.min.y())),
            max: Position::p2(self.max.x().max(o.max.x()), self.max.y().max(o.max.y())),
        }
    }

    fn grow(&self, m: i64) -> Rect {
        Rect { min: self.min - Position::p2(m, m), max: self.max + Position::p2(m, m) }
    }

    fn clamp(&self, p: &Position) -> Position {
        Position::p2(p.x().clamp(self.min.x(), self.max.x()), p.y().clamp(self.min.y(), self.max.y()))
    }
}

/// Connected components of `Z² ∖ ρ`. Ids follow the lexicographically
/// smallest cell of each component inside the labelled window.
#[derive(Debug, Clone)]
pub struct Components {
    path: DividingPath,
    window: Rect,
    height: usize,
    labels: Vec<Option<usize>>,
    count: usize,
}

impl Components {
    pub fn new(path: &DividingPath, bbox: Rect) -> Result<Components, TuredoError> {
        path.validate()?;
        let (lo, hi) = path.spine_bounds();
        // One cell of margin keeps the window's border connected to the
        // unbounded parts of each side.
        let window = bbox.union(&Rect { min: lo, max: hi }).grow(1);
        let width = (window.max.x() - window.min.x() + 1) as usize;
        let height = (window.max.y() - window.min.y() + 1) as usize;
        let idx = |p: &Position| ((p.x() - window.min.x()) as usize) * height + (p.y() - window.min.y()) as usize;
        let mut labels: Vec<Option<usize>> = vec![None; width * height];
        let mut count = 0;
        // Column-major scan visits cells in lexicographic order.
        for x in window.min.x()..=window.max.x() {
            for y in window.min.y()..=window.max.y() {
                let start = Position::p2(x, y);
                if path.contains(&start) || labels[idx(&start)].is_some() {
                    continue;
                }
                let id = count;
                count += 1;
                labels[idx(&start)] = Some(id);
                let mut queue = VecDeque::from([start]);
                while let Some(p) = queue.pop_front() {
                    for d in [Position::p2(1, 0), Position::p2(-1, 0), Position::p2(0, 1), Position::p2(0, -1)] {
                        let q = p + d;
                        if window.contains(&q) && !path.contains(&q) && labels[idx(&q)].is_none() {
                            labels[idx(&q)] = Some(id);
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
        Ok(Components { path: path.clone(), window, height, labels, count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Component id of `p`, `None` on the path.
    pub fn component_of(&self, p: &Position) -> Option<usize> {
        if self.path.contains(p) {
            return None;
        }
        // Outside the window, the straight walk to the clamped cell avoids
        // both rays, so the clamped cell is in the same component.
        let q = if self.window.contains(p) { *p } else { self.window.clamp(p) };
        let i = ((q.x() - self.window.min.x()) as usize) * self.height + (q.y() - self.window.min.y()) as usize;
        self.labels[i]
    }
}

/// One step that vacated a path cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeakEvent {
    pub position: Position,
    pub leave_time: u64,
    pub letter: Letter,
    pub mv: Position,
    /// Head state after the step. Needed to resume the local replay when
    /// the head moves off the path away from `A0`.
    pub state: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeakDescription {
    pub events: Vec<LeakEvent>,
}

impl LeakDescription {
    pub fn visited_path_positions(&self) -> Vec<Position> {
        self.events.iter().map(|e| e.position).collect()
    }
}

fn leak_window(path: &DividingPath, s: &GlobalState) -> Rect {
    let d = domain(s);
    let lo = Position::p2(d.iter().map(|p| p.x()).min().unwrap_or(0), d.iter().map(|p| p.y()).min().unwrap_or(0));
    let hi = Position::p2(d.iter().map(|p| p.x()).max().unwrap_or(0), d.iter().map(|p| p.y()).max().unwrap_or(0));
    let (a, b) = path.spine_bounds();
    // Cells beyond the window are classified by clamping.
    Rect { min: lo, max: hi }.union(&Rect { min: a, max: b })
}

fn check_planar_radius_one(t: &Turedo) -> Result<(), TuredoError> {
    if t.dim() != Dim::Two || t.radius() != 1 {
        return Err(TuredoError::Seed("leakage analysis needs a planar radius-1 turedo".into()));
    }
    Ok(())
}

/// `A0` for a seed: its component, after checking the seed lies in one.
pub fn seed_component(path: &DividingPath, seed: &GlobalState) -> Result<(Components, usize), TuredoError> {
    let comps = Components::new(path, leak_window(path, seed))?;
    let mut ids = BTreeSet::new();
    for p in domain(seed) {
        match comps.component_of(&p) {
            None => return Err(TuredoError::Seed(format!("seed cell {p} lies on the path"))),
            Some(id) => {
                ids.insert(id);
            }
        }
    }
    if ids.len() != 1 {
        return Err(TuredoError::Seed("seed spans several components".into()));
    }
    Ok((comps, *ids.iter().next().expect("non-empty")))
}

fn check_seed(t: &Turedo, seed: &GlobalState) -> Result<(), TuredoError> {
    check_planar_radius_one(t)?;
    if seed.head != Position::p2(0, 0) {
        return Err(TuredoError::Seed("head must start at the origin".into()));
    }
    Ok(())
}

/// Runs `n` steps and records every step vacating a path cell. The second
/// value is the number of such visits.
pub fn record_crossings(
    t: &Turedo,
    seed: &GlobalState,
    path: &DividingPath,
    n: u64,
) -> Result<(LeakDescription, usize), TuredoError> {
    check_seed(t, seed)?;
    seed_component(path, seed)?;
    let trace = run(t, seed, n);
    let events: Vec<LeakEvent> = trace
        .events
        .iter()
        .filter(|e| path.contains(&e.vacated))
        .map(|e| LeakEvent { position: e.vacated, leave_time: e.t, letter: e.wrote, mv: e.mv, state: e.new_state })
        .collect();
    let count = events.len();
    Ok((LeakDescription { events }, count))
}

/// Replays the configuration outside `A0` after `n` steps using only the
/// description. `A0` is the component of the origin.
pub fn reconstruct_outside(
    t: &Turedo,
    path: &DividingPath,
    d: &LeakDescription,
    n: u64,
) -> Result<Configuration, TuredoError> {
    check_planar_radius_one(t)?;
    let probe = GlobalState::single_head(Dim::Two, StateId(0));
    let (comps, a0) = seed_component(path, &probe)?;
    let in_a0 = |p: &Position| comps.component_of(p) == Some(a0);
    let mut by_time: BTreeMap<u64, &LeakEvent> = BTreeMap::new();
    for e in &d.events {
        if by_time.insert(e.leave_time, e).is_some() {
            return Err(TuredoError::Reconstruction { step: e.leave_time, reason: "two events share a time".into() });
        }
        if !path.contains(&e.position) {
            return Err(TuredoError::Reconstruction {
                step: e.leave_time,
                reason: format!("event position {} is not on the path", e.position),
            });
        }
        if e.letter.0 as usize >= t.num_letters() || e.state.0 as usize >= t.num_states() || e.mv.l1() > 1 {
            return Err(TuredoError::Reconstruction { step: e.leave_time, reason: "event outside the alphabet".into() });
        }
    }

    // Outside configuration plus the head: `None` while it is in A0.
    let mut outside = GlobalState::new(Configuration::new(), Position::p2(0, 0), StateId(0));
    let mut head_known = false;
    let mut blocked = false;
    let mut used = 0usize;
    let fail = |step: u64, reason: String| TuredoError::Reconstruction { step, reason };
    for i in 0..n {
        if !head_known {
            // The head reaches the path at step i+1 iff it leaves it at i+1.
            if let Some(e) = by_time.get(&(i + 1)) {
                outside.head = e.position;
                head_known = true;
            }
            continue;
        }
        if blocked {
            continue;
        }
        if path.contains(&outside.head) {
            let Some(e) = by_time.get(&i) else {
                blocked = true;
                continue;
            };
            if e.position != outside.head {
                return Err(fail(i, format!("event at {} but the head is at {}", e.position, outside.head)));
            }
            used += 1;
            let target = outside.head + e.mv;
            if !outside.config.is_blank(&target) || e.mv.is_zero() {
                return Err(fail(i, format!("event moves onto occupied cell {target}")));
            }
            outside.config.set(outside.head, Some(e.letter));
            outside.head = target;
            outside.state = e.state;
            if in_a0(&target) {
                head_known = false;
            }
        } else {
            // Off the path and outside A0: every neighbour is outside A0 too.
            if step_mut(t, &mut outside, i) == StepOutcome::Blocked {
                blocked = true;
            }
        }
    }
    let expected_used = by_time.range(..n).count();
    if used != expected_used {
        return Err(fail(n, format!("{} of {} events were never reached", expected_used - used, expected_used)));
    }
    Ok(outside.config.restrict(|p| !in_a0(p)))
}

/// Ground truth: the configuration after `n` steps restricted to `Z² ∖ A0`.
pub fn truth_outside(t: &Turedo, seed: &GlobalState, path: &DividingPath, n: u64) -> Result<Configuration, TuredoError> {
    check_seed(t, seed)?;
    let (comps, a0) = seed_component(path, seed)?;
    let fin = run(t, seed, n).final_state;
    Ok(fin.config.restrict(|p| comps.component_of(p) != Some(a0)))
}

/// Bit width used for coordinates and times over `n` steps.
pub fn field_width(n: u64) -> u32 {
    u64::BITS - n.leading_zeros()
}

fn index_width(count: usize) -> u32 {
    if count <= 1 {
        0
    } else {
        usize::BITS - (count - 1).leading_zeros()
    }
}

pub const HEADER_BITS: u64 = 40;
/// Fields per event stored at the variable width: x, y and time.
pub const WIDE_FIELDS: u64 = 3;
const MOVE_BITS: u32 = 3;

/// Size in bits of the canonical encoding of `d` for an `n`-step run.
pub fn description_size(t: &Turedo, d: &LeakDescription, n: u64) -> u64 {
    let w = field_width(n) as u64;
    let per_event =
        2 * (1 + w) + w + index_width(t.num_letters()) as u64 + MOVE_BITS as u64 + index_width(t.num_states()) as u64;
    HEADER_BITS + per_event * d.events.len() as u64
}

struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    fn push(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            if self.bits.is_multiple_of(8) {
                self.bytes.push(0);
            }
            if (value >> i) & 1 == 1 {
                let last = self.bytes.last_mut().expect("pushed");
                *last |= 0x80 >> (self.bits % 8);
            }
            self.bits += 1;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    bits: u64,
}

impl BitReader<'_> {
    fn take(&mut self, width: u32) -> Result<u64, TuredoError> {
        let mut v = 0u64;
        for _ in 0..width {
            let byte = *self
                .bytes
                .get((self.bits / 8) as usize)
                .ok_or_else(|| TuredoError::Schema("truncated description".into()))?;
            v = (v << 1) | ((byte >> (7 - self.bits % 8)) & 1) as u64;
            self.bits += 1;
        }
        Ok(v)
    }
}

fn move_index(mv: &Position) -> u64 {
    ball(Dim::Two, 1).index_of(mv).expect("unit move") as u64
}

/// Canonical binary encoding: an 8-bit width `w` and a 32-bit event count,
/// then per event sign-magnitude x and y, the time in `w` bits, the letter,
/// the move index in `B_2(1)` and the new state.
pub fn encode_description(t: &Turedo, d: &LeakDescription, n: u64) -> Result<Vec<u8>, TuredoError> {
    let w = field_width(n);
    let lw = index_width(t.num_letters());
    let sw = index_width(t.num_states());
    let limit = 1u64 << w;
    let mut out = BitWriter { bytes: Vec::new(), bits: 0 };
    out.push(w as u64, 8);
    out.push(d.events.len() as u64, 32);
    for e in &d.events {
        for v in [e.position.x(), e.position.y()] {
            if v.unsigned_abs() >= limit {
                return Err(TuredoError::OutOfRange(e.position));
            }
            out.push((v < 0) as u64, 1);
            out.push(v.unsigned_abs(), w);
        }
        if e.leave_time >= limit {
            return Err(TuredoError::Schema(format!("time {} does not fit {w} bits", e.leave_time)));
        }
        out.push(e.leave_time, w);
        out.push(e.letter.0 as u64, lw);
        out.push(move_index(&e.mv), MOVE_BITS);
        out.push(e.state.0 as u64, sw);
    }
    debug_assert_eq!(out.bits, description_size(t, d, n));
    Ok(out.bytes)
}

pub fn decode_description(t: &Turedo, bytes: &[u8]) -> Result<(LeakDescription, u32), TuredoError> {
    let lw = index_width(t.num_letters());
    let sw = index_width(t.num_states());
    let moves = ball(Dim::Two, 1);
    let mut r = BitReader { bytes, bits: 0 };
    let w = r.take(8)? as u32;
    if w > 63 {
        return Err(TuredoError::Schema("width out of range".into()));
    }
    let count = r.take(32)?;
    let mut events = Vec::new();
    for _ in 0..count {
        let mut coord = || -> Result<i64, TuredoError> {
            let neg = r.take(1)? == 1;
            let mag = r.take(w)? as i64;
            Ok(if neg { -mag } else { mag })
        };
        let x = coord()?;
        let y = coord()?;
        let leave_time = r.take(w)?;
        let letter = Letter(r.take(lw)? as u16);
        let mi = r.take(MOVE_BITS)? as usize;
        let mv = *moves.offsets().get(mi).ok_or_else(|| TuredoError::Schema("bad move index".into()))?;
        let state = StateId(r.take(sw)? as u16);
        events.push(LeakEvent { position: Position::p2(x, y), leave_time, letter, mv, state });
    }
    Ok((LeakDescription { events }, w))
}

/// One JSON object per event, letters and states by name.
pub fn write_ndjson(t: &Turedo, d: &LeakDescription, mut out: impl Write) -> Result<(), TuredoError> {
    for e in &d.events {
        let line = serde_json::json!({
            "position": e.position,
            "leave_time": e.leave_time,
            "letter": t.letter_name(e.letter),
            "move": e.mv,
            "state": t.state_name(e.state),
        });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{action, Rule, StateMatch, Symmetry, TuredoSpec};

    fn p(x: i64, y: i64) -> Position {
        Position::p2(x, y)
    }

    fn right_mover() -> Turedo {
        TuredoSpec {
            name: "right".into(),
            dimension: Dim::Two,
            radius: 1,
            alphabet: vec!["a".into()],
            states: vec!["q".into()],
            rules: vec![Rule::new(StateMatch::Any, [], action("q", "a", p(1, 0)))],
            symmetry: Symmetry::None,
        }
        .compile()
        .unwrap()
    }

    #[test]
    fn vertical_line_two_components() {
        let c = Components::new(&DividingPath::vertical(0), Rect { min: p(-2, -2), max: p(2, 2) }).unwrap();
        assert_eq!(c.count(), 2);
        assert_eq!(c.component_of(&p(-1, 0)), Some(0));
        assert_eq!(c.component_of(&p(1, 5)), Some(1));
        assert_eq!(c.component_of(&p(-100, 100)), Some(0));
        assert_eq!(c.component_of(&p(0, 77)), None);
    }

    #[test]
    fn l_shaped_path() {
        let path = DividingPath::new(vec![p(0, 0), p(1, 0), p(2, 0), p(2, -1)]).unwrap();
        let c = Components::new(&path, Rect { min: p(-3, -3), max: p(3, 3) }).unwrap();
        assert_eq!(c.count(), 2);
        assert_eq!(c.component_of(&p(1, 1)), c.component_of(&p(5, 0)));
        assert_eq!(c.component_of(&p(1, -1)), c.component_of(&p(-5, 0)));
        assert_ne!(c.component_of(&p(1, 1)), c.component_of(&p(1, -1)));
        assert_eq!(c.component_of(&p(3, -50)), c.component_of(&p(1, 1)));
    }

    #[test]
    fn bad_paths_rejected() {
        assert!(DividingPath::new(vec![p(0, 0), p(1, 1)]).is_err());
        assert!(DividingPath::new(vec![p(0, 0), p(0, 1)]).is_err());
        assert!(DividingPath::new(vec![]).is_err());
    }

    #[test]
    fn right_mover_single_crossing() {
        let t = right_mover();
        let seed = GlobalState::single_head(Dim::Two, StateId(0));
        let path = DividingPath::vertical(5);
        let (d, count) = record_crossings(&t, &seed, &path, 20).unwrap();
        assert_eq!(count, 1);
        assert_eq!(d.events[0].leave_time, 5);
        assert_eq!(d.events[0].position, p(5, 0));
        assert_eq!(d.events[0].mv, p(1, 0));
        let rec = reconstruct_outside(&t, &path, &d, 20).unwrap();
        assert_eq!(rec, truth_outside(&t, &seed, &path, 20).unwrap());
        assert_eq!(rec.len(), 15);
    }

    #[test]
    fn confined_run_is_empty() {
        let t = right_mover();
        let seed = GlobalState::single_head(Dim::Two, StateId(0));
        let path = DividingPath::vertical(50);
        let (d, _) = record_crossings(&t, &seed, &path, 20).unwrap();
        assert!(d.events.is_empty());
        assert!(reconstruct_outside(&t, &path, &d, 20).unwrap().is_empty());
    }

    #[test]
    fn tampered_description_detected() {
        let t = right_mover();
        let seed = GlobalState::single_head(Dim::Two, StateId(0));
        let path = DividingPath::vertical(5);
        let (mut d, _) = record_crossings(&t, &seed, &path, 20).unwrap();
        let truth = truth_outside(&t, &seed, &path, 20).unwrap();
        d.events[0].leave_time = 7;
        assert_ne!(reconstruct_outside(&t, &path, &d, 20).unwrap(), truth);
        d.events[0].position = p(5, 3);
        assert!(reconstruct_outside(&t, &path, &d, 20).unwrap() != truth);
        d.events[0].position = p(4, 0);
        assert!(reconstruct_outside(&t, &path, &d, 20).is_err());
    }

    #[test]
    fn size_and_binary_roundtrip() {
        let t = right_mover();
        let seed = GlobalState::single_head(Dim::Two, StateId(0));
        let path = DividingPath::vertical(5);
        let (d, _) = record_crossings(&t, &seed, &path, 100).unwrap();
        // 40 header bits, then 8 + 8 + 7 + 0 + 3 + 0 for the event.
        assert_eq!(description_size(&t, &d, 100), 66);
        let bytes = encode_description(&t, &d, 100).unwrap();
        assert_eq!(bytes.len(), 9);
        let (back, w) = decode_description(&t, &bytes).unwrap();
        assert_eq!(back, d);
        assert_eq!(w, 7);
        assert_eq!(description_size(&t, &LeakDescription::default(), 100), HEADER_BITS);
    }

    #[test]
    fn widths() {
        assert_eq!(field_width(0), 0);
        assert_eq!(field_width(1), 1);
        assert_eq!(field_width(100), 7);
        assert_eq!(field_width(10_000), 14);
        assert_eq!(index_width(1), 0);
        assert_eq!(index_width(2), 1);
        assert_eq!(index_width(5), 3);
    }
}
