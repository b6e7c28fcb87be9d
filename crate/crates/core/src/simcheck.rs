//! Block encodings, the global decoding map and mechanical checking of
//! simulation claims over finite seed sets and horizons.
//!
//! A claim carries its own seed encoder, and only that encoder's output is
//! checked for each simulated seed (claim-witness semantics). A passing
//! report therefore validates the claim as stated; it does not establish
//! the relation for every correctly encoded simulator seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{domain, Cell, Configuration, GlobalState, Letter, StateId};
use crate::engine::{step_mut, StepOutcome};
use crate::error::TuredoError;
use crate::lattice::{block_decompose, block_index, block_offsets, Position};
use crate::rules::Turedo;

/// Simulator cells of one block in row-major order over `R_b`.
pub type BlockPattern = Vec<Cell>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEncoding {
    pub b: Position,
    /// Headless decoding `α`, simulator block → simulated cell.
    pub alpha: BTreeMap<BlockPattern, Cell>,
    /// Head decoding `β`, (block, offset, simulator state) → (state, cell).
    pub beta: BTreeMap<(BlockPattern, Position, StateId), (StateId, Cell)>,
}

/// Where the encoder puts the head and what it writes in the head block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadBlock {
    pub pattern: BlockPattern,
    pub offset: Position,
    pub state: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedEncoder {
    pub letter_blocks: BTreeMap<Letter, BlockPattern>,
    /// Keyed by simulated head state and the simulated head cell.
    pub head_block: BTreeMap<(StateId, Cell), HeadBlock>,
}

#[derive(Debug, Clone)]
pub struct SimulationClaim {
    pub simulated: Turedo,
    pub simulator: Turedo,
    pub encoding: BlockEncoding,
    pub k: u64,
    pub seed_encoder: SeedEncoder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Liberal,
    Fuzzless,
    Rigorous,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Liberal, Mode::Fuzzless, Mode::Rigorous];

    pub fn parse(s: &str) -> Result<Mode, TuredoError> {
        match s {
            "liberal" => Ok(Mode::Liberal),
            "fuzzless" => Ok(Mode::Fuzzless),
            "rigorous" => Ok(Mode::Rigorous),
            _ => Err(TuredoError::Schema(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Liberal => "liberal",
            Mode::Fuzzless => "fuzzless",
            Mode::Rigorous => "rigorous",
        })
    }
}

/// Why a simulator state does not decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidState {
    /// Index of the offending block.
    pub block: Position,
    pub reason: String,
}

impl fmt::Display for InvalidState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block {}: {}", self.block, self.reason)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// The encoder has no block for some simulated letter or head.
    SetupEncoder,
    /// The encoded seed is not a valid encoded state.
    SetupInvalid,
    /// Block domain of the encoded seed differs from the seed's domain.
    SetupBlockDomain,
    /// The encoded seed does not decode to the seed.
    SetupDecode,
    InvalidState,
    DecodeMismatch,
    BlockDomainMismatch,
    HeadEscape,
}

impl Condition {
    pub fn is_setup(self) -> bool {
        matches!(self, Condition::SetupEncoder | Condition::SetupInvalid | Condition::SetupBlockDomain | Condition::SetupDecode)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub seed: usize,
    /// Simulated time whose check failed. For head escapes, the transition
    /// from `t` to `t + 1`.
    pub t: u64,
    pub condition: Condition,
    /// Simulator step at which a head escape happened.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub simulator_t: Option<u64>,
    /// Offending block index or simulated position.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub position: Option<Position>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SetupFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedVerdict {
    pub seed: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub mode: Mode,
    /// Always `"claim-witness"`: only the claim's own encoder is checked.
    pub semantics: String,
    pub k: u64,
    pub horizon: u64,
    pub seeds: Vec<SeedVerdict>,
    pub warnings: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.seeds.iter().all(|s| s.verdict == Verdict::Pass)
    }

    pub fn has_setup_failure(&self) -> bool {
        self.seeds.iter().any(|s| s.verdict == Verdict::SetupFailure)
    }

    pub fn first_failure(&self) -> Option<&Witness> {
        self.seeds.iter().find_map(|s| s.witness.as_ref())
    }
}

impl BlockEncoding {
    pub fn block_len(&self) -> usize {
        self.b.coords().iter().product::<i64>() as usize
    }

    /// Structural checks: block size, pattern lengths, `α(⊥…⊥) = ⊥`.
    pub fn check_shape(&self) -> Result<(), TuredoError> {
        if self.b.coords().iter().any(|&v| v < 1) {
            return Err(TuredoError::Schema(format!("block size {} must be positive", self.b)));
        }
        let n = self.block_len();
        let blank = vec![None; n];
        match self.alpha.get(&blank) {
            Some(None) => {}
            Some(Some(_)) => return Err(TuredoError::Schema("alpha must map the blank block to blank".into())),
            None => return Err(TuredoError::Schema("alpha must contain the blank block".into())),
        }
        for p in self.alpha.keys().chain(self.beta.keys().map(|k| &k.0)) {
            if p.len() != n {
                return Err(TuredoError::Schema(format!("block pattern of length {} (expected {n})", p.len())));
            }
        }
        for (_, off, _) in self.beta.keys() {
            if off.dim() != self.b.dim() || off.coords().iter().zip(self.b.coords()).any(|(o, b)| *o < 0 || o >= b) {
                return Err(TuredoError::Schema(format!("beta offset {off} outside the block")));
            }
        }
        Ok(())
    }
}

/// Non-blank blocks of `c`, keyed by block index.
fn blocks_of(b: &Position, c: &Configuration) -> BTreeMap<Position, BlockPattern> {
    let offsets = block_offsets(b);
    let n = offsets.len();
    let mut out: BTreeMap<Position, BlockPattern> = BTreeMap::new();
    for (z, l) in c.iter() {
        let (rho, mu) = block_decompose(z, b);
        let idx = block_index(&rho, b);
        let slot = offsets.binary_search_by(|o| row_major_cmp(o, &mu)).expect("offset inside block");
        out.entry(idx).or_insert_with(|| vec![None; n])[slot] = Some(*l);
    }
    out
}

fn row_major_cmp(a: &Position, b: &Position) -> std::cmp::Ordering {
    a.coords().iter().rev().cmp(b.coords().iter().rev())
}

fn block_at(b: &Position, c: &Configuration, idx: &Position) -> BlockPattern {
    let origin = idx.scale(b);
    block_offsets(b).iter().map(|o| c.get(&(origin + *o))).collect()
}

/// Block indices of non-blank blocks plus the head's block.
pub fn block_domain(b: &Position, s2: &GlobalState) -> BTreeSet<Position> {
    let mut d: BTreeSet<Position> = blocks_of(b, &s2.config).into_keys().collect();
    d.insert(block_index(&s2.head, b));
    d
}

/// `Γ(s2)`, or the first block that does not decode.
pub fn global_decode(e: &BlockEncoding, s2: &GlobalState) -> Result<GlobalState, InvalidState> {
    let head_idx = block_index(&s2.head, &e.b);
    let (_, mu) = block_decompose(&s2.head, &e.b);
    let head_pat = block_at(&e.b, &s2.config, &head_idx);
    let (q1, head_cell) = *e.beta.get(&(head_pat, mu, s2.state)).ok_or_else(|| InvalidState {
        block: head_idx,
        reason: format!("head block with offset {mu} is outside the domain of beta"),
    })?;
    let mut c1 = Configuration::new();
    for (idx, pat) in blocks_of(&e.b, &s2.config) {
        if idx == head_idx {
            continue;
        }
        match e.alpha.get(&pat) {
            Some(cell) => c1.set(idx, *cell),
            None => return Err(InvalidState { block: idx, reason: "block is outside the domain of alpha".into() }),
        }
    }
    c1.set(head_idx, head_cell);
    Ok(GlobalState::new(c1, head_idx, q1))
}

pub fn is_valid_encoded_state(e: &BlockEncoding, s2: &GlobalState) -> bool {
    global_decode(e, s2).is_ok()
}

/// `α` entries sending a non-blank block to blank; these allow fuzz.
pub fn fuzz_warnings(e: &BlockEncoding) -> Vec<String> {
    e.alpha
        .iter()
        .filter(|(p, c)| c.is_none() && p.iter().any(Option::is_some))
        .map(|(p, _)| format!("alpha maps a non-blank block to blank ({} cells set); fuzz is possible", p.iter().flatten().count()))
        .collect()
}

impl SimulationClaim {
    pub fn new(
        simulated: Turedo,
        simulator: Turedo,
        encoding: BlockEncoding,
        k: u64,
        seed_encoder: SeedEncoder,
    ) -> Result<SimulationClaim, TuredoError> {
        if simulated.dim() != simulator.dim() || encoding.b.dim() != simulated.dim() {
            return Err(TuredoError::DimensionMismatch { expected: simulated.dim().get(), got: simulator.dim().get() });
        }
        if k == 0 {
            return Err(TuredoError::Schema("time factor k must be positive".into()));
        }
        encoding.check_shape()?;
        let n = encoding.block_len();
        for p in seed_encoder.letter_blocks.values().chain(seed_encoder.head_block.values().map(|h| &h.pattern)) {
            if p.len() != n {
                return Err(TuredoError::Schema(format!("encoder block of length {} (expected {n})", p.len())));
            }
        }
        Ok(SimulationClaim { simulated, simulator, encoding, k, seed_encoder })
    }

    /// Encodes a simulated state with the claim's encoder.
    pub fn encode(&self, s1: &GlobalState) -> Result<GlobalState, String> {
        let b = &self.encoding.b;
        let offsets = block_offsets(b);
        let mut c2 = Configuration::new();
        let mut put = |idx: &Position, pat: &BlockPattern| {
            let origin = idx.scale(b);
            for (o, v) in offsets.iter().zip(pat) {
                c2.set(origin + *o, *v);
            }
        };
        for (z, l) in s1.config.sorted() {
            if z == s1.head {
                continue;
            }
            let pat = self
                .seed_encoder
                .letter_blocks
                .get(&l)
                .ok_or_else(|| format!("no block for letter {:?}", self.simulated.letter_name(l)))?;
            put(&z, pat);
        }
        let head_cell = s1.config.get(&s1.head);
        let hb = self.seed_encoder.head_block.get(&(s1.state, head_cell)).ok_or_else(|| {
            format!(
                "no head block for state {:?} on {:?}",
                self.simulated.state_name(s1.state),
                self.simulated.cell_name(head_cell)
            )
        })?;
        put(&s1.head, &hb.pattern);
        Ok(GlobalState::new(c2, s1.head.scale(b) + hb.offset, hb.state))
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = fuzz_warnings(&self.encoding);
        let images: BTreeSet<Cell> = self.encoding.alpha.values().copied().collect();
        for i in 0..self.simulated.num_letters() {
            if !images.contains(&Some(Letter(i as u16))) {
                w.push(format!("alpha has no preimage for letter {:?}", self.simulated.letter_name(Letter(i as u16))));
            }
        }
        w
    }
}

struct Failure {
    t: u64,
    condition: Condition,
    simulator_t: Option<u64>,
    position: Option<Position>,
    detail: String,
}

fn fail(t: u64, condition: Condition, position: Option<Position>, detail: impl Into<String>) -> Failure {
    Failure { t, condition, simulator_t: None, position, detail: detail.into() }
}

/// First position where two states disagree, for witnesses.
fn first_difference(t: &Turedo, got: &GlobalState, want: &GlobalState) -> (Option<Position>, String) {
    if got.head != want.head {
        return (Some(got.head), format!("head at {} but simulated head at {}", got.head, want.head));
    }
    if got.state != want.state {
        return (
            Some(got.head),
            format!("head state {:?} but simulated state {:?}", t.state_name(got.state), t.state_name(want.state)),
        );
    }
    let keys: BTreeSet<Position> = got.config.iter().chain(want.config.iter()).map(|(p, _)| *p).collect();
    for p in keys {
        let (g, w) = (got.config.get(&p), want.config.get(&p));
        if g != w {
            return (Some(p), format!("cell {p} decodes to {:?}, expected {:?}", t.cell_name(g), t.cell_name(w)));
        }
    }
    (None, "states differ".into())
}

fn check_seed(claim: &SimulationClaim, s1: &GlobalState, horizon: u64, mode: Mode) -> Option<Failure> {
    let e = &claim.encoding;
    let b = &e.b;
    let mut s2 = match claim.encode(s1) {
        Ok(s) => s,
        Err(msg) => return Some(fail(0, Condition::SetupEncoder, Some(s1.head), msg)),
    };
    match global_decode(e, &s2) {
        Err(inv) => return Some(fail(0, Condition::SetupInvalid, Some(inv.block), inv.reason)),
        Ok(d) if d != *s1 => {
            let (p, msg) = first_difference(&claim.simulated, &d, s1);
            return Some(fail(0, Condition::SetupDecode, p, msg));
        }
        Ok(_) => {}
    }
    let dom1 = domain(s1);
    let bd = block_domain(b, &s2);
    if bd != dom1 {
        let p = bd.symmetric_difference(&dom1).next().copied();
        return Some(fail(0, Condition::SetupBlockDomain, p, "block domain differs from the seed's domain"));
    }

    let mut s1 = s1.clone();
    let mut t2 = 0u64;
    for t in 0..=horizon {
        if t > 0 {
            let decoded = match global_decode(e, &s2) {
                Ok(d) => d,
                Err(inv) => return Some(fail(t, Condition::InvalidState, Some(inv.block), inv.reason)),
            };
            if decoded != s1 {
                let (p, msg) = first_difference(&claim.simulated, &decoded, &s1);
                return Some(fail(t, Condition::DecodeMismatch, p, msg));
            }
            if mode >= Mode::Fuzzless {
                let dom1 = domain(&s1);
                let bd = block_domain(b, &s2);
                if bd != dom1 {
                    let p = bd.symmetric_difference(&dom1).next().copied();
                    return Some(fail(t, Condition::BlockDomainMismatch, p, "block domain differs from the simulated domain"));
                }
            }
        }
        if t == horizon {
            break;
        }
        let z_before = s1.head;
        step_mut(&claim.simulated, &mut s1, t);
        let z_after = s1.head;
        for _ in 0..claim.k {
            if step_mut(&claim.simulator, &mut s2, t2) == StepOutcome::Blocked {
                // Blocking is absorbing; the remaining steps change nothing.
                t2 = claim.k * (t + 1);
                break;
            }
            t2 += 1;
            if mode == Mode::Rigorous {
                let blk = block_index(&s2.head, b);
                if blk != z_before && blk != z_after {
                    return Some(Failure {
                        t,
                        condition: Condition::HeadEscape,
                        simulator_t: Some(t2),
                        position: Some(s2.head),
                        detail: format!("simulator head in block {blk}, outside blocks {z_before} and {z_after}"),
                    });
                }
            }
        }
    }
    None
}

/// Checks a claim on every seed. Seeds run in parallel on the current rayon
/// pool; verdicts are returned in seed order.
pub fn check_simulation(claim: &SimulationClaim, seeds: &[GlobalState], horizon: u64, mode: Mode) -> CheckReport {
    let results: Vec<Option<Failure>> = seeds.par_iter().map(|s| check_seed(claim, s, horizon, mode)).collect();
    let seeds = results
        .into_iter()
        .enumerate()
        .map(|(i, f)| match f {
            None => SeedVerdict { seed: i, verdict: Verdict::Pass, witness: None },
            Some(f) => SeedVerdict {
                seed: i,
                verdict: if f.condition.is_setup() { Verdict::SetupFailure } else { Verdict::Fail },
                witness: Some(Witness {
                    seed: i,
                    t: f.t,
                    condition: f.condition,
                    simulator_t: f.simulator_t,
                    position: f.position,
                    detail: f.detail,
                }),
            },
        })
        .collect();
    CheckReport {
        mode,
        semantics: "claim-witness".into(),
        k: claim.k,
        horizon,
        seeds,
        warnings: claim.warnings(),
    }
}

/// Re-runs the check for the witness's seed up to the witness time and
/// returns whether the same failure is reported.
pub fn replay_witness(claim: &SimulationClaim, seeds: &[GlobalState], mode: Mode, w: &Witness) -> bool {
    let Some(seed) = seeds.get(w.seed) else { return false };
    let Some(f) = check_seed(claim, seed, w.t + 1, mode) else { return false };
    f.t == w.t && f.condition == w.condition && f.position == w.position && f.simulator_t == w.simulator_t && f.detail == w.detail
}

/// The claim that `t` simulates itself with unit blocks and `k = 1`.
pub fn identity_claim(t: &Turedo) -> SimulationClaim {
    let b = Position::origin(t.dim()) + unit(t.dim());
    let cells: Vec<Cell> = std::iter::once(None).chain((0..t.num_letters()).map(|i| Some(Letter(i as u16)))).collect();
    let alpha = cells.iter().map(|c| (vec![*c], *c)).collect();
    let origin = Position::origin(t.dim());
    let mut beta = BTreeMap::new();
    let mut head_block = BTreeMap::new();
    for q in 0..t.num_states() {
        let q = StateId(q as u16);
        for c in &cells {
            beta.insert((vec![*c], origin, q), (q, *c));
            head_block.insert((q, *c), HeadBlock { pattern: vec![*c], offset: origin, state: q });
        }
    }
    let letter_blocks = (0..t.num_letters()).map(|i| (Letter(i as u16), vec![Some(Letter(i as u16))])).collect();
    SimulationClaim::new(
        t.clone(),
        t.clone(),
        BlockEncoding { b, alpha, beta },
        1,
        SeedEncoder { letter_blocks, head_block },
    )
    .expect("identity claim is well formed")
}

fn unit(dim: crate::lattice::Dim) -> Position {
    match dim {
        crate::lattice::Dim::Two => Position::p2(1, 1),
        crate::lattice::Dim::Three => Position::p3(1, 1, 1),
    }
}

/// Half-letter claims: a right-mover writing `b` after an `a` and `a`
/// otherwise, simulated at block size `(2, 1)` and `k = 2` by a machine that
/// writes each letter as two halves.
pub mod half_letter {
    use super::*;
    use crate::lattice::Dim;
    use crate::rules::{action, Atom, Rule, StateMatch, Symmetry, TuredoSpec};

    pub fn simulated() -> TuredoSpec {
        let e = Position::p2(1, 0);
        TuredoSpec {
            name: "ab-right-mover".into(),
            dimension: Dim::Two,
            radius: 1,
            alphabet: vec!["a".into(), "b".into()],
            states: vec!["q".into()],
            rules: vec![
                Rule::new(StateMatch::state("q"), [(Position::p2(-1, 0), Atom::letter("a"))], action("q", "b", e)),
                Rule::new(StateMatch::Any, [], action("q", "a", e)),
            ],
            symmetry: Symmetry::None,
        }
    }

    pub fn simulator() -> TuredoSpec {
        let e = Position::p2(1, 0);
        let st = StateMatch::state;
        TuredoSpec {
            name: "ab-half-mover".into(),
            dimension: Dim::Two,
            radius: 1,
            alphabet: ["a1", "a2", "b1", "b2"].iter().map(|s| s.to_string()).collect(),
            states: ["p", "p_a", "p_b"].iter().map(|s| s.to_string()).collect(),
            rules: vec![
                Rule::new(st("p"), [(Position::p2(-1, 0), Atom::letter("a2"))], action("p_b", "b1", e)),
                Rule::new(st("p"), [], action("p_a", "a1", e)),
                Rule::new(st("p_a"), [], action("p", "a2", e)),
                Rule::new(st("p_b"), [], action("p", "b2", e)),
                Rule::new(StateMatch::Any, [], action("p", "a1", e)),
            ],
            symmetry: Symmetry::None,
        }
    }

    pub fn claim() -> SimulationClaim {
        let t1 = simulated().compile().expect("valid");
        let t2 = simulator().compile().expect("valid");
        let l1 = |n: &str| Some(t1.letter(n).expect("letter"));
        let l2 = |n: &str| Some(t2.letter(n).expect("letter"));
        let q = t1.state("q").expect("state");
        let [p, p_a, p_b] = ["p", "p_a", "p_b"].map(|n| t2.state(n).expect("state"));
        let alpha = [(vec![None, None], None), (vec![l2("a1"), l2("a2")], l1("a")), (vec![l2("b1"), l2("b2")], l1("b"))]
            .into_iter()
            .collect();
        let o0 = Position::p2(0, 0);
        let o1 = Position::p2(1, 0);
        let beta = [
            ((vec![None, None], o0, p), (q, None)),
            // A blocked simulated head: the simulator is stuck half way.
            ((vec![l2("a1"), None], o1, p_a), (q, None)),
            ((vec![l2("b1"), None], o1, p_b), (q, None)),
        ]
        .into_iter()
        .collect();
        let letter_blocks = [
            (t1.letter("a").expect("letter"), vec![l2("a1"), l2("a2")]),
            (t1.letter("b").expect("letter"), vec![l2("b1"), l2("b2")]),
        ]
        .into_iter()
        .collect();
        let head_block = [((q, None), HeadBlock { pattern: vec![None, None], offset: o0, state: p })].into_iter().collect();
        SimulationClaim::new(
            t1,
            t2,
            BlockEncoding { b: Position::p2(2, 1), alpha, beta },
            2,
            SeedEncoder { letter_blocks, head_block },
        )
        .expect("well formed")
    }

    /// Every row seed of width `1..=max_width` over `{⊥, a, b}` with the
    /// head on a blank cell of the row.
    pub fn row_seeds(t1: &Turedo, max_width: usize) -> Vec<GlobalState> {
        let q = t1.state("q").expect("state");
        let letters = [None, Some(Letter(0)), Some(Letter(1))];
        let mut out = Vec::new();
        for w in 1..=max_width {
            let total = 3usize.pow(w as u32);
            for code in 0..total {
                let mut c = Configuration::new();
                let mut rest = code;
                for x in 0..w {
                    c.set(Position::p2(x as i64, 0), letters[rest % 3]);
                    rest /= 3;
                }
                for h in 0..w {
                    let head = Position::p2(h as i64, 0);
                    if c.is_blank(&head) {
                        out.push(GlobalState::new(c.clone(), head, q));
                    }
                }
            }
        }
        out
    }
}
