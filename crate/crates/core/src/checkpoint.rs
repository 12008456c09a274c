//! Line-oriented JSON checkpoints.
//!
//! Line 1 is a header; then one line per generator in `(s, index)` order;
//! then one line per completed step in `(s, t)` order. Output is canonical,
//! so loading and saving again reproduces the file byte for byte.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freemod::{FreeElement, GeneratorRef, RawElement, WireElement};
use crate::milnor::MilnorExponent;
use crate::resolution::{Generator, Resolution};

pub const FORMAT: &str = "steenres-checkpoint";
pub const VERSION: u32 = 1;
/// Pins the global basis order of `C_{s,t}`.
pub const BASIS_ORDER: &str = "generator-index-major/milnor-length-then-lex";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported checkpoint version {found} (expected {VERSION})")]
    Version { found: u32 },
    #[error("checkpoint is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub prime: u32,
    pub basis_order: String,
    pub strategy: String,
    /// `[s, t]` pairs: steps `(s, s..=t)` are complete.
    pub frontier: Vec<[u32; 2]>,
}

#[derive(Serialize)]
struct GeneratorLine<'a> {
    s: u32,
    index: u32,
    t: u32,
    d: WireElement<'a>,
}

#[derive(Serialize)]
struct StepLine<'a> {
    step: [u32; 2],
    method: &'a str,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Record {
    Generator {
        s: u32,
        index: u32,
        t: u32,
        d: RawElement,
    },
    Step {
        step: [u32; 2],
        method: String,
    },
}

fn json_line<W: Write, T: Serialize>(out: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

/// Writes `res` in canonical form, recording `strategy` in the header.
pub fn save<W: Write>(res: &Resolution, strategy: &str, mut out: W) -> io::Result<()> {
    let header = Header {
        format: FORMAT.to_string(),
        version: VERSION,
        prime: 2,
        basis_order: BASIS_ORDER.to_string(),
        strategy: strategy.to_string(),
        frontier: res.frontier().iter().map(|(&s, &t)| [s, t]).collect(),
    };
    json_line(&mut out, &header)?;
    for s in 0..=res.max_s() {
        for (index, g) in res.generators(s).iter().enumerate() {
            let line = GeneratorLine {
                s,
                index: index as u32,
                t: g.t,
                d: WireElement(&g.differential),
            };
            json_line(&mut out, &line)?;
        }
    }
    for (&(s, t), method) in res.methods() {
        json_line(&mut out, &StepLine { step: [s, t], method })?;
    }
    out.flush()
}

pub fn to_string(res: &Resolution, strategy: &str) -> String {
    let mut buf = Vec::new();
    save(res, strategy, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Reads a checkpoint, validating version, ordering and references.
pub fn load<R: BufRead>(input: R) -> Result<(Resolution, Header), CheckpointError> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, message: String| CheckpointError::Parse {
        line: line + 1,
        message,
    };
    let (_, first) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty checkpoint".into()))?;
    let first = first?;
    let raw: serde_json::Value =
        serde_json::from_str(&first).map_err(|e| parse_err(0, e.to_string()))?;
    if raw.get("format").and_then(|v| v.as_str()) != Some(FORMAT) {
        return Err(parse_err(0, "not a steenres checkpoint".into()));
    }
    if let Some(found) = raw.get("version").and_then(|v| v.as_u64()) {
        if found != VERSION as u64 {
            return Err(CheckpointError::Version {
                found: found as u32,
            });
        }
    }
    let header: Header = serde_json::from_value(raw).map_err(|e| parse_err(0, e.to_string()))?;
    if header.prime != 2 {
        return Err(parse_err(0, format!("prime {} is not supported", header.prime)));
    }
    if header.basis_order != BASIS_ORDER {
        return Err(parse_err(
            0,
            format!("basis order {:?} is not supported", header.basis_order),
        ));
    }

    let mut generators: Vec<Vec<Generator>> = Vec::new();
    let mut methods = BTreeMap::new();
    for (n, line) in lines {
        let line = line?;
        let record: Record = serde_json::from_str(&line).map_err(|e| parse_err(n, e.to_string()))?;
        match record {
            Record::Generator { s, index, t, d } => {
                if !methods.is_empty() {
                    return Err(parse_err(n, "generator after step records".into()));
                }
                if generators.len() < s as usize {
                    generators.resize_with(s as usize, Vec::new);
                }
                if generators.len() == s as usize {
                    generators.push(Vec::new());
                }
                if generators.len() != s as usize + 1 {
                    return Err(parse_err(n, "generators out of order".into()));
                }
                let list = &generators[s as usize];
                if list.len() != index as usize || list.last().is_some_and(|g| g.t > t) {
                    return Err(parse_err(n, format!("generator ({s}, {index}) out of order")));
                }
                let lookup = |hs: u32, hi: u32| -> Option<GeneratorRef> {
                    let g = generators.get(hs as usize)?.get(hi as usize)?;
                    Some(GeneratorRef {
                        s: hs,
                        index: hi,
                        t: g.t,
                    })
                };
                let mut differential = FreeElement::zero();
                for (r, hs, hi) in d.0 {
                    if s == 0 || hs != s - 1 {
                        return Err(parse_err(n, format!("term on C_{hs} in d of C_{s}")));
                    }
                    let h = lookup(hs, hi)
                        .ok_or_else(|| parse_err(n, format!("unknown generator ({hs}, {hi})")))?;
                    if h.t + MilnorExponent::degree(&r) != t {
                        return Err(parse_err(n, format!("term {r} on ({hs}, {hi}) has wrong degree")));
                    }
                    differential.add_term(r, h);
                }
                generators[s as usize].push(Generator { t, differential });
            }
            Record::Step { step: [s, t], method } => {
                if methods.insert((s, t), method).is_some() {
                    return Err(parse_err(n, format!("duplicate step ({s}, {t})")));
                }
            }
        }
    }
    if generators.is_empty() {
        return Err(CheckpointError::Inconsistent("no generators".into()));
    }

    let frontier: BTreeMap<u32, u32> = header.frontier.iter().map(|&[s, t]| (s, t)).collect();
    if frontier.len() != header.frontier.len() {
        return Err(CheckpointError::Inconsistent("repeated frontier entry".into()));
    }
    let expected: usize = frontier.iter().map(|(&s, &t)| (t + 1).saturating_sub(s) as usize).sum();
    let covered = methods
        .keys()
        .all(|&(s, t)| t >= s && frontier.get(&s).is_some_and(|&f| t <= f));
    if !covered || expected != methods.len() {
        return Err(CheckpointError::Inconsistent(
            "step records do not match the frontier".into(),
        ));
    }
    Ok((Resolution::from_parts(generators, frontier, methods), header))
}

pub fn from_str(text: &str) -> Result<(Resolution, Header), CheckpointError> {
    load(text.as_bytes())
}
