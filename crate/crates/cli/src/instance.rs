//! Instance files: JSON with a `kind` tag and exact rational payloads.

use std::path::Path;

use polyvol::rational::{format, parse};
use polyvol::{CrossPolytope, Error, Rational, Vector};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// A rational written as a string (`"p/q"`, `"0.25"`, `"3"`) or a JSON integer.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
}

impl Number {
    fn to_rational(&self) -> Result<Rational, Error> {
        match self {
            Number::Text(s) => parse(s),
            Number::Int(i) => Ok(Rational::from_integer((*i).into())),
        }
    }
}

fn rationals(values: &[Number]) -> Result<Vec<Rational>, Error> {
    values.iter().map(Number::to_rational).collect()
}

#[derive(Debug, Deserialize)]
struct RawBall {
    center: Vec<Number>,
    radius: Number,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawInstance {
    TwoBalls {
        c: Option<Vec<Number>>,
        r: Option<Number>,
        balls: Option<Vec<RawBall>>,
    },
    KBalls {
        centers: Vec<Vec<Number>>,
        radii: Vec<Number>,
    },
    KnapsackDual {
        a: Vec<u64>,
    },
    VPolytope {
        vertices: Vec<Vec<Number>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoBalls {
    /// `C(0,1) ∩ C(c, r)`.
    Canonical { c: Vec<Rational>, r: Rational },
    /// Two arbitrary balls, normalized before running the engine.
    General([CrossPolytope; 2]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    TwoBalls(TwoBalls),
    KBalls { centers: Vec<Vec<Rational>>, radii: Vec<Rational> },
    KnapsackDual { a: Vec<u64> },
    VPolytope { vertices: Vec<Vec<Rational>> },
}

fn ball(center: Vec<Rational>, radius: Rational) -> Result<CrossPolytope, Error> {
    CrossPolytope::new(Vector::new(center)?, radius)
}

impl Instance {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInstance(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let raw: RawInstance =
            serde_json::from_str(text).map_err(|e| Error::InvalidInstance(format!("malformed instance: {e}")))?;
        match raw {
            RawInstance::TwoBalls { c, r, balls } => match (c, r, balls) {
                (Some(c), Some(r), None) => {
                    Ok(Instance::TwoBalls(TwoBalls::Canonical { c: rationals(&c)?, r: r.to_rational()? }))
                }
                (None, None, Some(balls)) => {
                    let [first, second] = <[RawBall; 2]>::try_from(balls)
                        .map_err(|b| Error::InvalidInstance(format!("two_balls needs exactly 2 balls, got {}", b.len())))?;
                    Ok(Instance::TwoBalls(TwoBalls::General([
                        ball(rationals(&first.center)?, first.radius.to_rational()?)?,
                        ball(rationals(&second.center)?, second.radius.to_rational()?)?,
                    ])))
                }
                _ => Err(Error::InvalidInstance("two_balls needs either `c` and `r` or `balls`".into())),
            },
            RawInstance::KBalls { centers, radii } => Ok(Instance::KBalls {
                centers: centers.iter().map(|p| rationals(p)).collect::<Result<_, _>>()?,
                radii: rationals(&radii)?,
            }),
            RawInstance::KnapsackDual { a } => Ok(Instance::KnapsackDual { a }),
            RawInstance::VPolytope { vertices } => Ok(Instance::VPolytope {
                vertices: vertices.iter().map(|p| rationals(p)).collect::<Result<_, _>>()?,
            }),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::TwoBalls(_) => "two_balls",
            Instance::KBalls { .. } => "k_balls",
            Instance::KnapsackDual { .. } => "knapsack_dual",
            Instance::VPolytope { .. } => "v_polytope",
        }
    }

    /// Whitespace- and notation-independent JSON form, with sorted keys and
    /// every rational written as `p/q`.
    pub fn canonical_json(&self) -> Value {
        let list = |v: &[Rational]| Value::from(v.iter().map(format).collect::<Vec<_>>());
        let body = match self {
            Instance::TwoBalls(TwoBalls::Canonical { c, r }) => json!({ "c": list(c), "r": format(r) }),
            Instance::TwoBalls(TwoBalls::General(balls)) => json!({
                "balls": balls
                    .iter()
                    .map(|b| json!({ "center": list(b.center().coords()), "radius": format(b.radius()) }))
                    .collect::<Vec<_>>()
            }),
            Instance::KBalls { centers, radii } => json!({
                "centers": centers.iter().map(|p| list(p)).collect::<Vec<_>>(),
                "radii": list(radii),
            }),
            Instance::KnapsackDual { a } => json!({ "a": a }),
            Instance::VPolytope { vertices } => json!({
                "vertices": vertices.iter().map(|p| list(p)).collect::<Vec<_>>()
            }),
        };
        let mut obj = body;
        obj["kind"] = Value::from(self.kind());
        obj
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.canonical_json()).expect("JSON values serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
