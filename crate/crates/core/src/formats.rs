//! JSON file formats. Every document carries `"format": 1`; traces are
//! NDJSON with the version on the summary line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{Cell, Configuration, GlobalState};
use crate::engine::{OrbitTrace, StepEvent};
use crate::error::TuredoError;
use crate::lattice::{Dim, Position};
use crate::leakage::{DividingPath, LeakDescription, LeakEvent};
use crate::rules::{Turedo, TuredoSpec, BLANK};
use crate::simcheck::{BlockEncoding, BlockPattern, CheckReport, HeadBlock, SeedEncoder, SimulationClaim};

pub const FORMAT: u32 = 1;

fn check_format(v: u32) -> Result<(), TuredoError> {
    if v != FORMAT {
        return Err(TuredoError::Schema(format!("unsupported format {v} (expected {FORMAT})")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub format: u32,
    pub name: String,
    pub dimension: Dim,
    pub radius: u32,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub rules: Vec<crate::rules::Rule>,
    #[serde(default)]
    pub symmetry: crate::rules::Symmetry,
}

impl SpecFile {
    pub fn from_spec(s: &TuredoSpec) -> SpecFile {
        SpecFile {
            format: FORMAT,
            name: s.name.clone(),
            dimension: s.dimension,
            radius: s.radius,
            alphabet: s.alphabet.clone(),
            states: s.states.clone(),
            rules: s.rules.clone(),
            symmetry: s.symmetry,
        }
    }

    pub fn into_spec(self) -> Result<TuredoSpec, TuredoError> {
        check_format(self.format)?;
        Ok(TuredoSpec {
            name: self.name,
            dimension: self.dimension,
            radius: self.radius,
            alphabet: self.alphabet,
            states: self.states,
            rules: self.rules,
            symmetry: self.symmetry,
        })
    }
}

pub fn parse_spec(text: &str) -> Result<TuredoSpec, TuredoError> {
    serde_json::from_str::<SpecFile>(text)?.into_spec()
}

pub fn emit_spec(s: &TuredoSpec) -> String {
    let mut out = serde_json::to_string_pretty(&SpecFile::from_spec(s)).expect("serializable");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellEntry {
    Two(i64, i64, String),
    Three(i64, i64, i64, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFile {
    pub format: u32,
    pub dimension: Dim,
    pub head: Position,
    pub state: String,
    #[serde(default)]
    pub cells: Vec<CellEntry>,
}

impl SeedFile {
    pub fn from_state(t: &Turedo, s: &GlobalState) -> SeedFile {
        let cells = s
            .config
            .sorted()
            .into_iter()
            .map(|(p, l)| {
                let name = t.letter_name(l).to_string();
                match p.dim() {
                    Dim::Two => CellEntry::Two(p.x(), p.y(), name),
                    Dim::Three => CellEntry::Three(p.x(), p.y(), p.z(), name),
                }
            })
            .collect();
        SeedFile { format: FORMAT, dimension: s.dim(), head: s.head, state: t.state_name(s.state).to_string(), cells }
    }

    pub fn to_state(&self, t: &Turedo) -> Result<GlobalState, TuredoError> {
        check_format(self.format)?;
        if self.dimension != t.dim() || self.head.dim() != self.dimension {
            return Err(TuredoError::DimensionMismatch { expected: t.dim().get(), got: self.dimension.get() });
        }
        let mut c = Configuration::new();
        for e in &self.cells {
            let (p, name) = match e {
                CellEntry::Two(x, y, l) => (Position::p2(*x, *y), l),
                CellEntry::Three(x, y, z, l) => (Position::p3(*x, *y, *z), l),
            };
            if p.dim() != self.dimension {
                return Err(TuredoError::DimensionMismatch { expected: self.dimension.get(), got: p.dim().get() });
            }
            if c.get(&p).is_some() {
                return Err(TuredoError::Schema(format!("cell {p} listed twice")));
            }
            c.set(p, t.cell(name)?);
        }
        Ok(GlobalState::new(c, self.head, t.state(&self.state)?))
    }
}

pub fn parse_seed(t: &Turedo, text: &str) -> Result<GlobalState, TuredoError> {
    serde_json::from_str::<SeedFile>(text)?.to_state(t)
}

pub fn emit_seed(t: &Turedo, s: &GlobalState) -> String {
    let mut out = serde_json::to_string(&SeedFile::from_state(t, s)).expect("serializable");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEventLine {
    pub t: u64,
    pub vacated: Position,
    pub wrote: String,
    #[serde(rename = "move")]
    pub mv: Position,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSummary {
    pub summary: bool,
    pub format: u32,
    pub steps: u64,
    pub blocked: bool,
    pub head: Position,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub events: Vec<TraceEventLine>,
    pub summary: TraceSummary,
}

impl TraceFile {
    pub fn from_trace(t: &Turedo, tr: &OrbitTrace) -> TraceFile {
        let events = tr
            .events
            .iter()
            .map(|e| TraceEventLine {
                t: e.t,
                vacated: e.vacated,
                wrote: t.letter_name(e.wrote).to_string(),
                mv: e.mv,
                state: t.state_name(e.new_state).to_string(),
            })
            .collect();
        let summary = TraceSummary {
            summary: true,
            format: FORMAT,
            steps: tr.events.len() as u64,
            blocked: tr.blocked(),
            head: tr.final_state.head,
            state: t.state_name(tr.final_state.state).to_string(),
        };
        TraceFile { events, summary }
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("serializable"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary).expect("serializable"));
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<TraceFile, TuredoError> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let (last, body) = lines.split_last().ok_or_else(|| TuredoError::Schema("empty trace".into()))?;
        let summary: TraceSummary = serde_json::from_str(last)?;
        check_format(summary.format)?;
        if !summary.summary {
            return Err(TuredoError::Schema("last trace line must be the summary".into()));
        }
        let events = body.iter().map(|l| serde_json::from_str(l)).collect::<Result<Vec<TraceEventLine>, _>>()?;
        if events.len() as u64 != summary.steps {
            return Err(TuredoError::Schema("summary step count does not match the events".into()));
        }
        Ok(TraceFile { events, summary })
    }

    /// Resolves names against `t`.
    pub fn to_events(&self, t: &Turedo) -> Result<Vec<StepEvent>, TuredoError> {
        self.events
            .iter()
            .map(|e| {
                Ok(StepEvent { t: e.t, vacated: e.vacated, wrote: t.letter(&e.wrote)?, mv: e.mv, new_state: t.state(&e.state)? })
            })
            .collect()
    }
}

pub fn emit_trace(t: &Turedo, tr: &OrbitTrace) -> String {
    TraceFile::from_trace(t, tr).emit()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadBlockFile {
    pub pattern: Vec<String>,
    pub offset: Position,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedEncoderFile {
    pub letter_blocks: BTreeMap<String, Vec<String>>,
    /// Keys are a simulated state `q` (blank head cell) or `q|a`.
    pub head_block: BTreeMap<String, HeadBlockFile>,
}

pub type BetaEntry = (Vec<String>, Position, String, (String, String));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimFile {
    pub format: u32,
    pub simulated: SpecFile,
    pub simulator: SpecFile,
    pub b: Position,
    pub k: u64,
    pub alpha: Vec<(Vec<String>, String)>,
    pub beta: Vec<BetaEntry>,
    pub seed_encoder: SeedEncoderFile,
}

fn pattern_names(t: &Turedo, p: &BlockPattern) -> Vec<String> {
    p.iter().map(|c| t.cell_name(*c).to_string()).collect()
}

fn pattern_cells(t: &Turedo, p: &[String]) -> Result<BlockPattern, TuredoError> {
    p.iter().map(|n| t.cell(n)).collect()
}

fn head_key(t: &Turedo, q: crate::config::StateId, c: Cell) -> String {
    match c {
        None => t.state_name(q).to_string(),
        Some(l) => format!("{}|{}", t.state_name(q), t.letter_name(l)),
    }
}

fn parse_head_key(t: &Turedo, key: &str) -> Result<(crate::config::StateId, Cell), TuredoError> {
    if let Ok(q) = t.state(key) {
        return Ok((q, None));
    }
    let (q, a) = key.split_once('|').ok_or_else(|| TuredoError::UnknownState(key.to_string()))?;
    Ok((t.state(q)?, t.cell(a)?))
}

impl ClaimFile {
    pub fn from_claim(c: &SimulationClaim) -> ClaimFile {
        let (t1, t2) = (&c.simulated, &c.simulator);
        ClaimFile {
            format: FORMAT,
            simulated: SpecFile::from_spec(t1.spec()),
            simulator: SpecFile::from_spec(t2.spec()),
            b: c.encoding.b,
            k: c.k,
            alpha: c.encoding.alpha.iter().map(|(p, v)| (pattern_names(t2, p), t1.cell_name(*v).to_string())).collect(),
            beta: c
                .encoding
                .beta
                .iter()
                .map(|((p, off, q2), (q1, v))| {
                    (
                        pattern_names(t2, p),
                        *off,
                        t2.state_name(*q2).to_string(),
                        (t1.state_name(*q1).to_string(), t1.cell_name(*v).to_string()),
                    )
                })
                .collect(),
            seed_encoder: SeedEncoderFile {
                letter_blocks: c
                    .seed_encoder
                    .letter_blocks
                    .iter()
                    .map(|(l, p)| (t1.letter_name(*l).to_string(), pattern_names(t2, p)))
                    .collect(),
                head_block: c
                    .seed_encoder
                    .head_block
                    .iter()
                    .map(|((q, a), h)| {
                        (
                            head_key(t1, *q, *a),
                            HeadBlockFile {
                                pattern: pattern_names(t2, &h.pattern),
                                offset: h.offset,
                                state: t2.state_name(h.state).to_string(),
                            },
                        )
                    })
                    .collect(),
            },
        }
    }

    pub fn to_claim(&self) -> Result<SimulationClaim, TuredoError> {
        check_format(self.format)?;
        let t1 = self.simulated.clone().into_spec()?.compile()?;
        let t2 = self.simulator.clone().into_spec()?.compile()?;
        let mut alpha = BTreeMap::new();
        for (p, v) in &self.alpha {
            if alpha.insert(pattern_cells(&t2, p)?, t1.cell(v)?).is_some() {
                return Err(TuredoError::Schema("alpha lists a block twice".into()));
            }
        }
        let mut beta = BTreeMap::new();
        for (p, off, q2, (q1, v)) in &self.beta {
            let key = (pattern_cells(&t2, p)?, *off, t2.state(q2)?);
            if beta.insert(key, (t1.state(q1)?, t1.cell(v)?)).is_some() {
                return Err(TuredoError::Schema("beta lists an entry twice".into()));
            }
        }
        let mut letter_blocks = BTreeMap::new();
        for (l, p) in &self.seed_encoder.letter_blocks {
            letter_blocks.insert(t1.letter(l)?, pattern_cells(&t2, p)?);
        }
        let mut head_block = BTreeMap::new();
        for (k, h) in &self.seed_encoder.head_block {
            let hb = HeadBlock { pattern: pattern_cells(&t2, &h.pattern)?, offset: h.offset, state: t2.state(&h.state)? };
            head_block.insert(parse_head_key(&t1, k)?, hb);
        }
        SimulationClaim::new(
            t1,
            t2,
            BlockEncoding { b: self.b, alpha, beta },
            self.k,
            SeedEncoder { letter_blocks, head_block },
        )
    }
}

pub fn parse_claim(text: &str) -> Result<SimulationClaim, TuredoError> {
    serde_json::from_str::<ClaimFile>(text)?.to_claim()
}

pub fn emit_claim(c: &SimulationClaim) -> String {
    let mut out = serde_json::to_string_pretty(&ClaimFile::from_claim(c)).expect("serializable");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: u32,
    #[serde(flatten)]
    pub report: CheckReport,
}

pub fn emit_report(r: &CheckReport) -> String {
    let mut out =
        serde_json::to_string_pretty(&ReportFile { format: FORMAT, report: r.clone() }).expect("serializable");
    out.push('\n');
    out
}

pub fn parse_report(text: &str) -> Result<CheckReport, TuredoError> {
    let f: ReportFile = serde_json::from_str(text)?;
    check_format(f.format)?;
    Ok(f.report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub format: u32,
    pub spine: Vec<Position>,
}

pub fn parse_path(text: &str) -> Result<DividingPath, TuredoError> {
    let f: PathFile = serde_json::from_str(text)?;
    check_format(f.format)?;
    DividingPath::new(f.spine)
}

pub fn emit_path(p: &DividingPath) -> String {
    let mut out = serde_json::to_string(&PathFile { format: FORMAT, spine: p.spine.clone() }).expect("serializable");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakEventEntry {
    pub position: Position,
    pub leave_time: u64,
    pub letter: String,
    #[serde(rename = "move")]
    pub mv: Position,
    pub state: String,
}

/// A description together with the run it describes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptionFile {
    pub format: u32,
    pub steps: u64,
    pub spine: Vec<Position>,
    pub crossings: usize,
    pub events: Vec<LeakEventEntry>,
}

impl DescriptionFile {
    pub fn new(t: &Turedo, path: &DividingPath, d: &LeakDescription, n: u64) -> DescriptionFile {
        DescriptionFile {
            format: FORMAT,
            steps: n,
            spine: path.spine.clone(),
            crossings: d.events.len(),
            events: d
                .events
                .iter()
                .map(|e| LeakEventEntry {
                    position: e.position,
                    leave_time: e.leave_time,
                    letter: t.letter_name(e.letter).to_string(),
                    mv: e.mv,
                    state: t.state_name(e.state).to_string(),
                })
                .collect(),
        }
    }

    pub fn resolve(&self, t: &Turedo) -> Result<(DividingPath, LeakDescription, u64), TuredoError> {
        check_format(self.format)?;
        let path = DividingPath::new(self.spine.clone())?;
        let events = self
            .events
            .iter()
            .map(|e| {
                Ok(LeakEvent {
                    position: e.position,
                    leave_time: e.leave_time,
                    letter: t.letter(&e.letter)?,
                    mv: e.mv,
                    state: t.state(&e.state)?,
                })
            })
            .collect::<Result<Vec<_>, TuredoError>>()?;
        Ok((path, LeakDescription { events }, self.steps))
    }

    pub fn emit(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("serializable");
        out.push('\n');
        out
    }
}

/// A partial configuration as sorted `[x, y, letter]` triples.
pub fn emit_cells(t: &Turedo, c: &Configuration) -> String {
    let cells: Vec<CellEntry> = c
        .sorted()
        .into_iter()
        .map(|(p, l)| CellEntry::Two(p.x(), p.y(), t.letter_name(l).to_string()))
        .collect();
    let mut out = serde_json::to_string(&serde_json::json!({ "format": FORMAT, "cells": cells })).expect("serializable");
    out.push('\n');
    out
}

pub fn parse_cells(t: &Turedo, text: &str) -> Result<Configuration, TuredoError> {
    #[derive(Deserialize)]
    struct CellsFile {
        format: u32,
        cells: Vec<CellEntry>,
    }
    let f: CellsFile = serde_json::from_str(text)?;
    check_format(f.format)?;
    let mut c = Configuration::new();
    for e in f.cells {
        match e {
            CellEntry::Two(x, y, l) if l != BLANK => c.set(Position::p2(x, y), Some(t.letter(&l)?)),
            _ => return Err(TuredoError::Schema("cells must be planar letters".into())),
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::simcheck::{half_letter, identity_claim};
    use crate::zoo::spiral_xor;

    #[test]
    fn spec_roundtrip() {
        let s = spiral_xor();
        let text = emit_spec(&s);
        assert_eq!(parse_spec(&text).unwrap(), s);
        assert!(text.contains("\"format\": 1"));
    }

    #[test]
    fn bad_format_rejected() {
        let text = emit_spec(&spiral_xor()).replace("\"format\": 1", "\"format\": 2");
        assert!(parse_spec(&text).is_err());
    }

    #[test]
    fn seed_and_trace_roundtrip() {
        let t = spiral_xor().compile().unwrap();
        let s = GlobalState::single_head(Dim::Two, t.state("↑").unwrap());
        let tr = run(&t, &s, 30);
        let seed_text = emit_seed(&t, &tr.final_state);
        assert_eq!(parse_seed(&t, &seed_text).unwrap(), tr.final_state);
        let text = emit_trace(&t, &tr);
        let parsed = TraceFile::parse(&text).unwrap();
        assert_eq!(parsed.emit(), text);
        assert_eq!(parsed.to_events(&t).unwrap(), tr.events);
        assert_eq!(text.lines().count(), 31);
    }

    #[test]
    fn claim_roundtrip() {
        for claim in [half_letter::claim(), identity_claim(&spiral_xor().compile().unwrap())] {
            let text = emit_claim(&claim);
            let back = parse_claim(&text).unwrap();
            assert_eq!(emit_claim(&back), text);
            assert_eq!(back.encoding, claim.encoding);
            assert_eq!(back.seed_encoder, claim.seed_encoder);
        }
    }
}
