//! Generators for the concrete machines and seed families.

pub mod comparator;
pub mod copy_move;
pub mod spiral;
pub mod zigzag;

use std::collections::BTreeMap;

use crate::error::TuredoError;
use crate::rules::{validate_spec, TuredoSpec};

pub use comparator::comparator;
pub use copy_move::{build_sigma_seed, copy_and_move_tprime, SigmaSeedParams};
pub use spiral::spiral_xor;
pub use zigzag::{zigzag_copier, zigzag_seed};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZooEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamInfo>,
}

pub fn entries() -> Vec<ZooEntry> {
    vec![
        ZooEntry { name: "spiral-xor", summary: "radius-1 spiral writing neighbour parity", params: vec![] },
        ZooEntry {
            name: "comparator",
            summary: "radius r+1 comparator of two distant probes",
            params: vec![
                ParamInfo { name: "r", default: "1", help: "probe distance minus one (>= 1)" },
                ParamInfo { name: "letters", default: "2", help: "alphabet size, letters a, b, ... (>= 2)" },
            ],
        },
        ZooEntry {
            name: "copy-and-move",
            summary: "radius-1 copy-and-move equality tester",
            params: vec![ParamInfo { name: "letters", default: "3", help: "size of A+, letters a, b, ... (>= 2)" }],
        },
        ZooEntry {
            name: "zigzag-copier",
            summary: "radius-2 zigzag copier of a vertical word",
            params: vec![ParamInfo { name: "symbols", default: "2", help: "number of base symbols 0, 1, ... (1..10)" }],
        },
    ]
}

/// Letters `a`, `b`, … used by the parameterised generators.
pub fn latin_letters(n: usize) -> Result<Vec<String>, TuredoError> {
    if n > 26 {
        return Err(TuredoError::Schema("at most 26 letters".into()));
    }
    Ok((0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect())
}

/// Builds a zoo machine by name. Unknown parameters are rejected.
pub fn generate(name: &str, params: &BTreeMap<String, String>) -> Result<TuredoSpec, TuredoError> {
    let entry = entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| TuredoError::Schema(format!("unknown zoo machine {name:?}")))?;
    for k in params.keys() {
        if !entry.params.iter().any(|p| p.name == k) {
            return Err(TuredoError::Schema(format!("{name} has no parameter {k:?}")));
        }
    }
    let get = |key: &str| -> Result<usize, TuredoError> {
        let p = entry.params.iter().find(|p| p.name == key).expect("declared parameter");
        let raw = params.get(key).map(String::as_str).unwrap_or(p.default);
        raw.parse().map_err(|_| TuredoError::Schema(format!("parameter {key} must be a non-negative integer")))
    };
    let spec = match name {
        "spiral-xor" => spiral_xor(),
        "comparator" => comparator(get("r")? as u32, &latin_letters(get("letters")?)?)?,
        "copy-and-move" => copy_and_move_tprime(&latin_letters(get("letters")?)?)?,
        "zigzag-copier" => zigzag_copier(get("symbols")?)?,
        _ => unreachable!(),
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

    #[test]
    fn every_entry_generates_valid_spec() {
        for e in entries() {
            let spec = generate(e.name, &BTreeMap::new()).unwrap();
            assert!(validate_spec(&spec).is_ok(), "{}", e.name);
        }
        assert_eq!(entries().len(), 4);
    }

    #[test]
    fn params_are_checked() {
        let mut p = BTreeMap::new();
        p.insert("r".to_string(), "2".to_string());
        assert_eq!(generate("comparator", &p).unwrap().radius, 3);
        p.insert("bogus".to_string(), "1".to_string());
        assert!(generate("comparator", &p).is_err());
        assert!(generate("nope", &BTreeMap::new()).is_err());
    }
}
