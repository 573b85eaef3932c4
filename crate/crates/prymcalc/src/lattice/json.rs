//! JSON form of models and classes. Rationals are written as `p/q` strings
//! so documents stay exact; parity groups are written with labels rather
//! than indices to keep them readable.

use super::{LatticeClass, LatticeError, LatticeModel, ModelKind, ParityRule, Result};
use crate::rational::{doubled, format_rat, half, parse_rat, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
struct ParityDoc {
    integral: Vec<String>,
    groups: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    name: String,
    rank: usize,
    labels: Vec<String>,
    gram: Vec<Vec<String>>,
    parity_groups: ParityDoc,
    named_classes: BTreeMap<String, Vec<String>>,
    nef: Vec<String>,
    neg2: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ClassDoc {
    model: String,
    coeffs: Vec<String>,
}

impl Serialize for LatticeModel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let label_of = |k: &usize| self.labels[*k].clone();
        let doc = ModelDoc {
            name: self.name.clone(),
            rank: self.rank(),
            labels: self.labels.clone(),
            gram: self
                .gram
                .iter()
                .map(|row| row.iter().map(format_rat).collect())
                .collect(),
            parity_groups: ParityDoc {
                integral: self.parity.integral.iter().map(label_of).collect(),
                groups: self
                    .parity
                    .groups
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|term| term.iter().map(label_of).collect())
                            .collect()
                    })
                    .collect(),
            },
            named_classes: self
                .named
                .iter()
                .map(|(l, d)| (l.clone(), d.iter().map(|x| format_rat(&half(x))).collect()))
                .collect(),
            nef: self.nef.clone(),
            neg2: self.neg2.clone(),
        };
        doc.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LatticeModel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = ModelDoc::deserialize(de)?;
        model_from_doc(doc).map_err(serde::de::Error::custom)
    }
}

fn model_from_doc(doc: ModelDoc) -> Result<LatticeModel> {
    if doc.labels.len() != doc.rank {
        return Err(LatticeError::InvalidModel {
            detail: format!(
                "declared rank {} does not match {} labels",
                doc.rank,
                doc.labels.len()
            ),
        });
    }
    let index_of = |l: &String| -> Result<usize> {
        doc.labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| LatticeError::InvalidModel {
                detail: format!("parity rule references unknown label `{l}`"),
            })
    };
    let mut gram = Vec::with_capacity(doc.gram.len());
    for row in &doc.gram {
        let mut r: Vec<Rat> = Vec::with_capacity(row.len());
        for s in row {
            r.push(parse_rat(s).map_err(|e| LatticeError::InvalidModel {
                detail: format!("gram entry: {e}"),
            })?);
        }
        gram.push(r);
    }
    let parity = ParityRule {
        integral: doc
            .parity_groups
            .integral
            .iter()
            .map(index_of)
            .collect::<Result<_>>()?,
        groups: doc
            .parity_groups
            .groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|term| term.iter().map(index_of).collect())
                    .collect()
            })
            .collect::<Result<_>>()?,
    };
    let mut named = Vec::new();
    for (l, coeffs) in &doc.named_classes {
        let mut dd = Vec::with_capacity(coeffs.len());
        for s in coeffs {
            let c = parse_rat(s).map_err(|e| LatticeError::InvalidModel {
                detail: format!("named class `{l}`: {e}"),
            })?;
            let d = doubled(&c).ok_or_else(|| LatticeError::NotHalfIntegral {
                detail: format!("named class `{l}` coefficient {c}"),
            })?;
            dd.push(d);
        }
        named.push((l.clone(), dd));
    }
    let model = LatticeModel::custom(
        doc.name, ModelKind::Custom, doc.labels, gram, parity, named, doc.nef, doc.neg2,
    )?;
    Ok(adopt_builtin_kind(model))
}

/// A deserialized model that matches a built-in by name and content takes
/// on the built-in kind, so round-trips preserve it.
fn adopt_builtin_kind(model: LatticeModel) -> LatticeModel {
    for (prefix, make) in [
        ("standard-hyp-g", (|p| ModelKind::StandardHyperelliptic { g: p }) as fn(i64) -> ModelKind),
        ("standard-g", |p| ModelKind::Standard { g: p }),
        ("nonstandard-hyp-i", |p| ModelKind::NonstandardHyperelliptic { i: p }),
        ("nonstandard-i", |p| ModelKind::Nonstandard { i: p }),
    ] {
        if let Some(rest) = model.name.strip_prefix(prefix) {
            if let Ok(p) = rest.parse::<i64>() {
                if let Ok(built) = super::build_model(make(p)) {
                    let mut candidate = model.clone();
                    candidate.kind = built.kind;
                    if candidate == built {
                        return candidate;
                    }
                }
            }
            break;
        }
    }
    model
}

impl Serialize for LatticeClass {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ClassDoc {
            model: self.model.clone(),
            coeffs: self.coeffs().iter().map(format_rat).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LatticeClass {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = ClassDoc::deserialize(de)?;
        let mut coeffs = Vec::with_capacity(doc.coeffs.len());
        for s in &doc.coeffs {
            coeffs.push(parse_rat(s).map_err(serde::de::Error::custom)?);
        }
        LatticeClass::from_rationals(doc.model, &coeffs).map_err(serde::de::Error::custom)
    }
}
