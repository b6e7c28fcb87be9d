//! Global transition map and orbit execution.

use crate::config::{Cell, GlobalState, Letter, StateId};
use crate::error::TuredoError;
use crate::lattice::Position;
use crate::rules::Turedo;

/// One non-blocked application of the global map. The event with index `t`
/// takes `F^t(s)` to `F^{t+1}(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepEvent {
    pub t: u64,
    pub vacated: Position,
    pub wrote: Letter,
    pub mv: Position,
    pub new_state: StateId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Moved(StepEvent),
    Blocked,
}

/// Checks that a global state belongs to `t`: same dimension, known letters
/// and state.
pub fn check_state(t: &Turedo, s: &GlobalState) -> Result<(), TuredoError> {
    if s.dim() != t.dim() {
        return Err(TuredoError::DimensionMismatch { expected: t.dim().get(), got: s.dim().get() });
    }
    if s.state.0 as usize >= t.num_states() {
        return Err(TuredoError::UnknownState(format!("#{}", s.state.0)));
    }
    for (p, l) in s.config.iter() {
        if p.dim() != t.dim() {
            return Err(TuredoError::DimensionMismatch { expected: t.dim().get(), got: p.dim().get() });
        }
        if l.0 as usize >= t.num_letters() {
            return Err(TuredoError::UnknownLetter(format!("#{}", l.0)));
        }
    }
    Ok(())
}

/// The values read by the head, in read-ball order.
pub fn read_values(t: &Turedo, s: &GlobalState) -> Vec<Cell> {
    t.read_ball().offsets().iter().map(|o| s.config.get(&(s.head + *o))).collect()
}

/// Applies the global map in place.
pub fn step_mut(t: &Turedo, s: &mut GlobalState, time: u64) -> StepOutcome {
    if !s.config.is_blank(&s.head) {
        return StepOutcome::Blocked;
    }
    let values = read_values(t, s);
    let tr = t.eval_values(s.state, &values);
    let target = s.head + tr.mv;
    if !s.config.is_blank(&target) {
        return StepOutcome::Blocked;
    }
    let ev = StepEvent { t: time, vacated: s.head, wrote: tr.write, mv: tr.mv, new_state: tr.state };
    s.config.set(s.head, Some(tr.write));
    s.head = target;
    s.state = tr.state;
    StepOutcome::Moved(ev)
}

/// `F_T(s)` together with the step event, or `Blocked` with `s` unchanged.
pub fn step(t: &Turedo, s: &GlobalState, time: u64) -> (GlobalState, StepOutcome) {
    let mut next = s.clone();
    let out = step_mut(t, &mut next, time);
    (next, out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTrace {
    pub events: Vec<StepEvent>,
    /// Step index at which the orbit was found blocked, if it was.
    pub blocked_at: Option<u64>,
    pub final_state: GlobalState,
}

impl OrbitTrace {
    pub fn blocked(&self) -> bool {
        self.blocked_at.is_some()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Head positions `z^0, z^1, …`, one more than the number of events.
    pub fn head_path(&self, start: &Position) -> Vec<Position> {
        let mut v = Vec::with_capacity(self.events.len() + 1);
        v.push(*start);
        v.extend(self.events.iter().map(|e| e.vacated + e.mv));
        v
    }
}

/// Iterates the global map up to `t_max` times, stopping at the first
/// blocked step (blocking is absorbing).
pub fn run(t: &Turedo, s: &GlobalState, t_max: u64) -> OrbitTrace {
    let mut cur = s.clone();
    let mut events = Vec::new();
    let mut blocked_at = None;
    for time in 0..t_max {
        match step_mut(t, &mut cur, time) {
            StepOutcome::Moved(ev) => events.push(ev),
            StepOutcome::Blocked => {
                blocked_at = Some(time);
                break;
            }
        }
    }
    OrbitTrace { events, blocked_at, final_state: cur }
}

/// Advances `s` in place by up to `steps` steps without recording events.
/// Returns the step index at which the orbit blocked, if it did.
pub fn advance(t: &Turedo, s: &mut GlobalState, from: u64, steps: u64) -> Option<u64> {
    (from..from + steps).find(|&time| step_mut(t, s, time) == StepOutcome::Blocked)
}
