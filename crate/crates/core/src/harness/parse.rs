//! Text forms of sweep rules and the flat key-value SweepSpec file.
//!
//! A SweepSpec file is a flat TOML document:
//!
//! ```toml
//! dim = 2
//! sides = "50..=120:10"      # or [50, 60, 70]
//! M = 1
//! a_rule = "4.01/N"          # or a number, or a list of either
//! coin = "grover"            # or "hadamard:0.5:0.4:1"
//! oracle_mode = "per_target_flip"
//! t_max_rule = "default"     # "4N", "4sqrt(NlnN)", or a step count
//! threshold = "none"         # "1/lnN", "1/log2N", or a probability
//! output = "fig4-m1.csv"
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use super::{CoinRule, SelfLoopRule, StepRule, SweepSpec, TargetPlacement, ThresholdRule};
use crate::coin::HadamardKind;
use crate::error::{Error, Result};
use crate::lattice::Geometry;

fn number(s: &str, what: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: `{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("{what}: `{s}` is not finite")));
    }
    Ok(x)
}

fn integer(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: `{s}` is not a non-negative integer")))
}

/// Coefficient in front of a symbolic suffix; empty means 1.
fn coefficient(prefix: &str, what: &str) -> Result<f64> {
    let p = prefix.trim().trim_end_matches('*').trim();
    if p.is_empty() {
        Ok(1.0)
    } else {
        number(p, what)
    }
}

impl FromStr for SelfLoopRule {
    type Err = Error;

    /// `"0.01"` or `"4.01/N"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.strip_suffix('N') {
            Some(head) => {
                let c = head
                    .trim_end()
                    .strip_suffix('/')
                    .ok_or_else(|| Error::Parse(format!("self-loop rule `{s}`: expected `c/N`")))?;
                Ok(SelfLoopRule::PerVertex(number(c, "self-loop rule")?))
            }
            None => Ok(SelfLoopRule::Absolute(number(t, "self-loop rule")?)),
        }
    }
}

impl FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "default" {
            return Ok(StepRule::Default);
        }
        if let Some(head) = t.strip_suffix("sqrt(NlnN)") {
            return Ok(StepRule::SqrtNLogN(coefficient(head, "t_max rule")?));
        }
        if let Some(head) = t.strip_suffix('N') {
            return Ok(StepRule::PerVertex(coefficient(head, "t_max rule")?));
        }
        Ok(StepRule::Fixed(integer(t, "t_max rule")?))
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "1/lnN" => Ok(ThresholdRule::InverseLn),
            "1/log2N" => Ok(ThresholdRule::InverseLog2),
            other => Ok(ThresholdRule::Fixed(number(other, "threshold")?)),
        }
    }
}

impl FromStr for CoinRule {
    type Err = Error;

    /// `grover`, `hadamard:γ:δ` or `hadamard:γ:γ_target:δ`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let delta = |d: &str| -> Result<HadamardKind> {
            let d = integer(d, "hadamard delta")?;
            HadamardKind::from_delta(u8::try_from(d).unwrap_or(u8::MAX))
        };
        match parts.as_slice() {
            ["grover"] => Ok(CoinRule::Grover),
            ["hadamard", g, d] => Ok(CoinRule::Hadamard {
                gamma: number(g, "hadamard gamma")?,
                target_gamma: None,
                kind: delta(d)?,
            }),
            ["hadamard", g, tg, d] => Ok(CoinRule::Hadamard {
                gamma: number(g, "hadamard gamma")?,
                target_gamma: Some(number(tg, "hadamard target gamma")?),
                kind: delta(d)?,
            }),
            _ => Err(Error::Parse(format!(
                "coin `{s}`: expected `grover`, `hadamard:γ:δ` or `hadamard:γ:γt:δ`"
            ))),
        }
    }
}

/// A target given on the command line: a flat index or `x,y,…` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetToken {
    Index(usize),
    Coords(Vec<usize>),
}

impl FromStr for TargetToken {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains(',') {
            let coords = s
                .split(',')
                .map(|c| integer(c, "target coordinate"))
                .collect::<Result<Vec<_>>>()?;
            Ok(TargetToken::Coords(coords))
        } else {
            Ok(TargetToken::Index(integer(s, "target index")?))
        }
    }
}

impl TargetToken {
    pub fn resolve(&self, g: &Geometry) -> Result<usize> {
        match self {
            TargetToken::Index(v) if *v < g.n_vertices() => Ok(*v),
            TargetToken::Index(v) => Err(Error::InvalidArgument(format!(
                "target {v} outside [0, {})",
                g.n_vertices()
            ))),
            TargetToken::Coords(c) => g.vertex_index(c),
        }
    }
}

/// `"a..=b:step"`, `"a..b:step"` (step defaults to 1) or a single size.
pub fn parse_size_range(s: &str) -> Result<Vec<usize>> {
    let t = s.trim();
    let (range, step) = match t.split_once(':') {
        Some((r, st)) => (r, integer(st, "size step")?),
        None => (t, 1),
    };
    if step == 0 {
        return Err(Error::Parse(format!("size range `{s}`: step must be >= 1")));
    }
    let (lo, hi) = if let Some((a, b)) = range.split_once("..=") {
        (integer(a, "size range")?, integer(b, "size range")?)
    } else if let Some((a, b)) = range.split_once("..") {
        let b = integer(b, "size range")?;
        if b == 0 {
            return Ok(Vec::new());
        }
        (integer(a, "size range")?, b - 1)
    } else {
        let v = integer(range, "size")?;
        (v, v)
    };
    if hi < lo {
        return Ok(Vec::new());
    }
    if (hi - lo) / step >= 1 << 20 {
        return Err(Error::Parse(format!("size range `{s}` is too long")));
    }
    Ok((lo..=hi).step_by(step).collect())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(x) => format!("{x:?}"),
            Scalar::Str(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Scalar),
    Many(Vec<Scalar>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Sides {
    List(Vec<usize>),
    Range(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    dim: usize,
    sides: Sides,
    #[serde(rename = "M")]
    m: usize,
    a_rule: Option<OneOrMany>,
    coin: Option<String>,
    oracle_mode: Option<String>,
    t_max_rule: Option<Scalar>,
    threshold: Option<Scalar>,
    targets: Option<Vec<Vec<usize>>>,
    output: Option<String>,
}

/// Parse and validate a SweepSpec document.
pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let sides = match raw.sides {
        Sides::List(v) => v,
        Sides::Range(r) => parse_size_range(&r)?,
    };
    let self_loops = match raw.a_rule {
        None => vec![SelfLoopRule::Absolute(0.0)],
        Some(OneOrMany::One(s)) => vec![s.text().parse()?],
        Some(OneOrMany::Many(v)) => v.iter().map(|s| s.text().parse()).collect::<Result<_>>()?,
    };
    let threshold = match raw.threshold {
        None => None,
        Some(Scalar::Str(s)) if s.trim() == "none" => None,
        Some(s) => Some(s.text().parse()?),
    };
    let placement = match raw.targets {
        None => TargetPlacement::Standard,
        Some(coords) => TargetPlacement::Coordinates(coords),
    };
    let spec = SweepSpec {
        dim: raw.dim,
        sides,
        targets: raw.m,
        placement,
        self_loops,
        coin: raw.coin.as_deref().unwrap_or("grover").parse()?,
        oracle_mode: raw.oracle_mode.as_deref().unwrap_or("per_target_flip").parse()?,
        t_max: match raw.t_max_rule {
            None => StepRule::Default,
            Some(s) => s.text().parse()?,
        },
        threshold,
        output: raw.output.map(PathBuf::from),
    };
    spec.validate()?;
    Ok(spec)
}

impl SweepSpec {
    /// The SweepSpec document that parses back to `self`.
    pub fn to_document(&self) -> String {
        let mut t = toml::Table::new();
        t.insert("dim".into(), (self.dim as i64).into());
        t.insert(
            "sides".into(),
            toml::Value::Array(self.sides.iter().map(|&s| (s as i64).into()).collect()),
        );
        t.insert("M".into(), (self.targets as i64).into());
        t.insert(
            "a_rule".into(),
            toml::Value::Array(self.self_loops.iter().map(|r| r.to_string().into()).collect()),
        );
        t.insert("coin".into(), self.coin.to_string().into());
        t.insert("oracle_mode".into(), self.oracle_mode.as_str().into());
        t.insert("t_max_rule".into(), self.t_max.to_string().into());
        t.insert(
            "threshold".into(),
            self.threshold.map_or_else(|| "none".to_string(), |r| r.to_string()).into(),
        );
        if let TargetPlacement::Coordinates(cs) = &self.placement {
            let rows = cs
                .iter()
                .map(|c| toml::Value::Array(c.iter().map(|&x| (x as i64).into()).collect()))
                .collect();
            t.insert("targets".into(), toml::Value::Array(rows));
        }
        if let Some(out) = &self.output {
            t.insert("output".into(), out.display().to_string().into());
        }
        toml::to_string(&t).expect("flat table always serializes")
    }
}
