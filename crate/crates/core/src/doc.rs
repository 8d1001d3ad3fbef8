//! The on-disk curve document: JSON with arbitrary-precision integers
//! (decimal strings once past 64 bits) and rationals as "p/q" strings.
//! Parsing accepts numbers or strings everywhere; the canonical serializer
//! is deterministic, so serialize ∘ parse is the identity on canonical
//! documents.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constraints::AffineConstraint;
use crate::curve::{Edge, Marking, PsiVector, TropicalCurve, Vertex};
use crate::lattice::{IntVector, Sublattice};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigIntJson(pub BigInt);

impl Serialize for BigIntJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for BigIntJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigIntJson(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Ok(BigIntJson(BigInt::from(u)))
                } else {
                    Err(D::Error::custom("integers must be exact (no floats)"))
                }
            }
            serde_json::Value::String(str) => str
                .parse::<BigInt>()
                .map(BigIntJson)
                .map_err(|e| D::Error::custom(format!("bad integer literal {str:?}: {e}"))),
            other => Err(D::Error::custom(format!("expected integer, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalJson(pub BigRational);

impl Serialize for RationalJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.denom().is_one() {
            s.serialize_str(&self.0.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
        }
    }
}

impl<'de> Deserialize<'de> for RationalJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let parse_str = |s: &str| -> std::result::Result<BigRational, String> {
            match s.split_once('/') {
                None => s
                    .parse::<BigInt>()
                    .map(BigRational::from)
                    .map_err(|e| format!("bad rational {s:?}: {e}")),
                Some((p, q)) => {
                    let p = p.parse::<BigInt>().map_err(|e| e.to_string())?;
                    let q = q.parse::<BigInt>().map_err(|e| e.to_string())?;
                    if q.is_zero() {
                        return Err("zero denominator".into());
                    }
                    Ok(BigRational::new(p, q))
                }
            }
        };
        use num_traits::Zero;
        match &v {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(RationalJson(BigRational::from(BigInt::from(i))))
                } else {
                    Err(D::Error::custom(
                        "rationals must be exact: use \"p/q\" strings",
                    ))
                }
            }
            serde_json::Value::String(s) => {
                parse_str(s).map(RationalJson).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: u32,
    pub genus: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: u32,
    pub tail: u32,
    pub head: Option<u32>,
    pub weight: u64,
    pub direction: Vec<BigIntJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub span: Vec<Vec<BigIntJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<RationalJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<BigIntJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkingDoc {
    pub index: u32,
    pub edge: u32,
    pub constraint: ConstraintDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveDocument {
    pub rank: usize,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    pub markings: Vec<MarkingDoc>,
}

impl CurveDocument {
    pub fn parse(text: &str) -> Result<CurveDocument> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("{e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    /// Decode into the in-memory model; the curve is validated, constraint
    /// spans are saturated as stored (rejecting unsaturated spans keeps the
    /// document the single source of truth for quotient bases).
    pub fn to_instance(&self) -> Result<(TropicalCurve, Vec<AffineConstraint>, PsiVector)> {
        let r = self.rank;
        let curve = TropicalCurve {
            rank: r,
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex {
                    id: v.id,
                    genus: v.genus,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    if e.direction.len() != r {
                        return Err(Error::Parse(format!(
                            "edge {}: direction has {} entries, rank is {}",
                            e.id,
                            e.direction.len(),
                            r
                        )));
                    }
                    Ok(Edge {
                        id: e.id,
                        tail: e.tail,
                        head: e.head,
                        weight: e.weight,
                        direction: IntVector::new(
                            e.direction.iter().map(|b| b.0.clone()).collect(),
                        ),
                    })
                })
                .collect::<Result<_>>()?,
            markings: self
                .markings
                .iter()
                .map(|m| Marking {
                    index: m.index,
                    edge: m.edge,
                })
                .collect(),
        };
        let mut constraints = Vec::new();
        for m in &self.markings {
            for row in &m.constraint.span {
                if row.len() != r {
                    return Err(Error::Parse(format!(
                        "marking {}: span vector has {} entries, rank is {}",
                        m.index,
                        row.len(),
                        r
                    )));
                }
            }
            let span = Sublattice::new(
                r,
                m.constraint
                    .span
                    .iter()
                    .map(|row| IntVector::new(row.iter().map(|b| b.0.clone()).collect()))
                    .collect(),
            );
            let weight = m
                .constraint
                .weight
                .as_ref()
                .map(|w| w.0.clone())
                .unwrap_or_else(BigInt::one);
            if weight.is_negative() || weight == BigInt::from(0) {
                return Err(Error::Parse(format!(
                    "marking {}: constraint weight must be positive",
                    m.index
                )));
            }
            let translation = match &m.constraint.translation {
                None => None,
                Some(t) => {
                    if t.len() != r {
                        return Err(Error::Parse(format!(
                            "marking {}: translation has {} entries, rank is {}",
                            m.index,
                            t.len(),
                            r
                        )));
                    }
                    Some(t.iter().map(|x| x.0.clone()).collect())
                }
            };
            constraints.push(AffineConstraint {
                span,
                translation,
                weight,
            });
        }
        let mut psi = PsiVector::empty();
        for m in &self.markings {
            if let Some(s) = m.psi {
                psi.s.insert(m.index, s);
            }
        }
        Ok((curve, constraints, psi))
    }

    pub fn from_instance(
        curve: &TropicalCurve,
        constraints: &[AffineConstraint],
        psi: &PsiVector,
    ) -> CurveDocument {
        CurveDocument {
            rank: curve.rank,
            vertices: curve
                .vertices
                .iter()
                .map(|v| VertexDoc {
                    id: v.id,
                    genus: v.genus,
                })
                .collect(),
            edges: curve
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id,
                    tail: e.tail,
                    head: e.head,
                    weight: e.weight,
                    direction: e.direction.coords.iter().cloned().map(BigIntJson).collect(),
                })
                .collect(),
            markings: curve
                .markings
                .iter()
                .zip(constraints)
                .map(|(m, a)| MarkingDoc {
                    index: m.index,
                    edge: m.edge,
                    constraint: ConstraintDoc {
                        span: a
                            .span
                            .basis()
                            .iter()
                            .map(|row| row.coords.iter().cloned().map(BigIntJson).collect())
                            .collect(),
                        translation: a
                            .translation
                            .as_ref()
                            .map(|t| t.iter().cloned().map(RationalJson).collect()),
                        weight: if a.weight.is_one() {
                            None
                        } else {
                            Some(BigIntJson(a.weight.clone()))
                        },
                    },
                    psi: match psi.get(m.index) {
                        0 => None,
                        s => Some(s),
                    },
                })
                .collect(),
        }
    }
}
