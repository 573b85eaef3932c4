//! Non-effectivity certificates and their independent replay checker.
//!
//! A certificate is a flat DAG of proof nodes keyed by target class. Each
//! node either closes by a direct leaf argument (negative pairing against a
//! nef class, or exceptional support with a non-effective coefficient
//! pattern) or records a complete candidate analysis: after peeling known
//! base curves off the target, every (−2)-class D that could split off an
//! effective piece is listed together with the reason it cannot, where
//! "cannot" may delegate to another node in the pool.
//!
//! Replay trusts nothing but the model's pairing, the membership test and
//! the enumeration routine. It re-derives every pairing value, re-runs the
//! candidate search inside the recorded bounds and demands an exact match,
//! walks the DAG with cycle detection, and checks that recursion depths
//! strictly decrease. A certificate that passes replay is a machine-checked
//! proof that the target class is not effective.

use super::enumerate::{enumerate, BoundsRecord};
use super::{span_combination, EffectivityError};
use crate::lattice::{LatticeClass, LatticeModel};
use crate::rational::{format_rat, rat_string, rat_string_vec, Rat};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// Closing argument applied directly to a (possibly peeled) target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeafReason {
    /// The target pairs negatively with a declared nef class, so no
    /// effective representative exists.
    NegativeOnNef {
        nef: String,
        #[serde(with = "rat_string")]
        value: Rat,
    },
    /// The target lies in the span of the known (−2)-curves but is not a
    /// nonnegative integral combination of them.
    ExceptionalSupport {
        #[serde(with = "rat_string_vec")]
        combo: Vec<Rat>,
    },
}

/// Why one enumerated candidate D cannot split off from the peeled target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "data", rename_all = "snake_case")]
pub enum EliminationReason {
    /// pair(B, D) is already nonnegative; D never satisfied the defining
    /// inequality. Kept for schema completeness; the enumeration filters
    /// these out before they are ever recorded.
    DirectContradiction {
        #[serde(with = "rat_string")]
        pairing: Rat,
    },
    /// B − D has exceptional support with a non-effective pattern.
    ExceptionalSupport {
        class: LatticeClass,
        #[serde(with = "rat_string_vec")]
        combo: Vec<Rat>,
    },
    /// B − D pairs negatively with a nef class.
    NegativeOnNef {
        class: LatticeClass,
        nef: String,
        #[serde(with = "rat_string")]
        value: Rat,
    },
    /// B − D is itself non-effective; see the pool node for that target.
    Recursive { target: LatticeClass },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    #[serde(rename = "D")]
    pub d: LatticeClass,
    #[serde(flatten)]
    pub elimination: EliminationReason,
}

/// One subtraction A ← A − N of a known base curve, justified by the
/// recorded negative pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeelStep {
    pub curve: String,
    #[serde(with = "rat_string")]
    pub pairing: Rat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertNode {
    pub target: LatticeClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<LeafReason>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub peel_steps: Vec<PeelStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peeled_target: Option<LatticeClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<CandidateRecord>,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonEffectivityCertificate {
    pub model_name: String,
    #[serde(flatten)]
    pub root: CertNode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_certificates: Vec<CertNode>,
}

impl NonEffectivityCertificate {
    pub fn target(&self) -> &LatticeClass {
        &self.root.target
    }

    pub fn depth(&self) -> u32 {
        self.root.depth
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("replay failed at {place}: {detail}")]
    Invalid { place: String, detail: String },
    #[error(transparent)]
    Effectivity(#[from] EffectivityError),
}

fn fail<T>(place: impl Into<String>, detail: impl Into<String>) -> Result<T, ReplayError> {
    Err(ReplayError::Invalid {
        place: place.into(),
        detail: detail.into(),
    })
}

/// Re-check a certificate from scratch against the model. Returns only when
/// every node verifies; the first defect aborts with its location.
pub fn replay_certificate(
    model: &LatticeModel,
    cert: &NonEffectivityCertificate,
) -> Result<(), ReplayError> {
    if cert.model_name != model.name() {
        return fail(
            "header",
            format!(
                "certificate names model `{}`, checker got `{}`",
                cert.model_name,
                model.name()
            ),
        );
    }

    let mut pool: HashMap<&LatticeClass, &CertNode> = HashMap::new();
    for node in &cert.sub_certificates {
        if node.target == cert.root.target {
            return fail("pool", "pool duplicates the root target");
        }
        if pool.insert(&node.target, node).is_some() {
            return fail(
                "pool",
                format!("duplicate pool entry for target {}", describe(model, &node.target)),
            );
        }
    }

    let mut verified: HashSet<&LatticeClass> = HashSet::new();
    let mut visiting: HashSet<&LatticeClass> = HashSet::new();
    verify_node(model, &cert.root, &pool, &mut verified, &mut visiting)?;

    // `verified` holds the root plus every pool node the walk reached
    if verified.len() != cert.sub_certificates.len() + 1 {
        return fail(
            "pool",
            format!(
                "{} pool node(s) are unreachable from the root",
                cert.sub_certificates.len() + 1 - verified.len()
            ),
        );
    }
    Ok(())
}

fn describe(model: &LatticeModel, class: &LatticeClass) -> String {
    class.display_with(model)
}

fn verify_node<'c>(
    model: &LatticeModel,
    node: &'c CertNode,
    pool: &HashMap<&'c LatticeClass, &'c CertNode>,
    verified: &mut HashSet<&'c LatticeClass>,
    visiting: &mut HashSet<&'c LatticeClass>,
) -> Result<(), ReplayError> {
    if !visiting.insert(&node.target) {
        return fail(
            describe(model, &node.target),
            "cyclic recursion between pool nodes",
        );
    }
    let result = verify_node_inner(model, node, pool, verified, visiting);
    visiting.remove(&node.target);
    result
}

fn verify_node_inner<'c>(
    model: &LatticeModel,
    node: &'c CertNode,
    pool: &HashMap<&'c LatticeClass, &'c CertNode>,
    verified: &mut HashSet<&'c LatticeClass>,
    visiting: &mut HashSet<&'c LatticeClass>,
) -> Result<(), ReplayError> {
    let place = describe(model, &node.target);
    if !model.is_member(&node.target).map_err(EffectivityError::from)? {
        return fail(&place, "target is not a member class");
    }

    // Recompute the peel sequence step by step.
    let mut current = node.target.clone();
    for (idx, step) in node.peel_steps.iter().enumerate() {
        let curve = model
            .neg2_classes()
            .into_iter()
            .find(|(label, _)| *label == step.curve);
        let Some((_, n)) = curve else {
            return fail(&place, format!("peel step {idx} names unknown curve `{}`", step.curve));
        };
        let pairing = model.pair(&current, &n).map_err(EffectivityError::from)?;
        if pairing != step.pairing {
            return fail(
                &place,
                format!(
                    "peel step {idx}: recorded pairing {} but recomputed {}",
                    format_rat(&step.pairing),
                    format_rat(&pairing)
                ),
            );
        }
        if !pairing.is_negative() {
            return fail(&place, format!("peel step {idx} subtracts a curve pairing >= 0"));
        }
        current = current.sub(&n);
    }
    if node.peel_steps.is_empty() {
        if node.peeled_target.is_some() {
            return fail(&place, "peeled_target recorded without peel steps");
        }
    } else {
        match &node.peeled_target {
            None => return fail(&place, "peel steps recorded without peeled_target"),
            Some(p) if *p != current => {
                return fail(&place, "peeled_target does not match the recomputed peel");
            }
            _ => {}
        }
        // the prover peels to a fixpoint
        for (label, n) in model.neg2_classes() {
            if model
                .pair(&current, &n)
                .map_err(EffectivityError::from)?
                .is_negative()
            {
                return fail(
                    &place,
                    format!("peel stopped early: still pairs negatively with {label}"),
                );
            }
        }
    }
    let peeled = current;

    match (&node.leaf, node.bounds.is_some() || !node.candidates.is_empty()) {
        (Some(leaf), false) => {
            verify_leaf(model, &place, &peeled, leaf)?;
            if node.depth != 0 {
                return fail(&place, "leaf node must have depth 0");
            }
        }
        (Some(_), true) => {
            return fail(&place, "node mixes a leaf argument with a candidate analysis");
        }
        (None, _) => {
            verify_schema_node(model, node, &place, &peeled, pool, verified, visiting)?;
        }
    }

    verified.insert(&node.target);
    Ok(())
}

fn verify_leaf(
    model: &LatticeModel,
    place: &str,
    target: &LatticeClass,
    leaf: &LeafReason,
) -> Result<(), ReplayError> {
    match leaf {
        LeafReason::NegativeOnNef { nef, value } => {
            if !model.nef_labels().iter().any(|l| l == nef) {
                return fail(place, format!("`{nef}` is not a declared nef class"));
            }
            let Some(h) = model.resolve(nef) else {
                return fail(place, format!("nef class `{nef}` does not resolve"));
            };
            let recomputed = model.pair(target, &h).map_err(EffectivityError::from)?;
            if recomputed != *value {
                return fail(
                    place,
                    format!(
                        "leaf pairing with {nef}: recorded {} but recomputed {}",
                        format_rat(value),
                        format_rat(&recomputed)
                    ),
                );
            }
            if !recomputed.is_negative() {
                return fail(place, "leaf claims a negative nef pairing that is >= 0");
            }
            Ok(())
        }
        LeafReason::ExceptionalSupport { combo } => {
            verify_exceptional(model, place, target, combo)
        }
    }
}

/// Exceptional-support witness: the combination must reproduce the class
/// exactly, the known curves must be linearly independent (so the
/// combination is the only one), and the pattern must not be a nonnegative
/// integral one.
fn verify_exceptional(
    model: &LatticeModel,
    place: &str,
    class: &LatticeClass,
    combo: &[Rat],
) -> Result<(), ReplayError> {
    let knowns = model.neg2_classes();
    if combo.len() != knowns.len() {
        return fail(place, "exceptional-support combination has the wrong length");
    }
    match span_combination(model, class)? {
        None => fail(
            place,
            "class is not in the span of the known curves (or they are dependent)",
        ),
        Some(unique) => {
            if unique != combo {
                return fail(place, "recorded combination differs from the solved one");
            }
            if combo.iter().all(|c| c.is_integer() && !c.is_negative()) {
                return fail(
                    place,
                    "combination is nonnegative integral, which proves nothing",
                );
            }
            Ok(())
        }
    }
}

fn verify_schema_node<'c>(
    model: &LatticeModel,
    node: &'c CertNode,
    place: &str,
    peeled: &LatticeClass,
    pool: &HashMap<&'c LatticeClass, &'c CertNode>,
    verified: &mut HashSet<&'c LatticeClass>,
    visiting: &mut HashSet<&'c LatticeClass>,
) -> Result<(), ReplayError> {
    let Some(bounds) = &node.bounds else {
        return fail(place, "candidate analysis without a bounds record");
    };
    let sq = model.pair(peeled, peeled).map_err(EffectivityError::from)?;
    if sq != crate::rational::rat_int(-4) {
        return fail(
            place,
            format!("candidate analysis needs square -4, target has {}", format_rat(&sq)),
        );
    }

    let fresh = enumerate(model, peeled)?;
    if fresh.bounds != *bounds {
        return fail(place, "bounds record does not match a fresh derivation");
    }
    let recorded: Vec<&LatticeClass> = node.candidates.iter().map(|c| &c.d).collect();
    let derived: Vec<&LatticeClass> = fresh.candidates.iter().collect();
    if recorded != derived {
        return fail(
            place,
            format!(
                "candidate list mismatch: recorded {} class(es), enumeration found {}",
                recorded.len(),
                derived.len()
            ),
        );
    }

    let mut max_child_depth = 0u32;
    for cand in &node.candidates {
        let residue = peeled.sub(&cand.d);
        match &cand.elimination {
            EliminationReason::DirectContradiction { pairing } => {
                let recomputed = model.pair(peeled, &cand.d).map_err(EffectivityError::from)?;
                if recomputed != *pairing || pairing.is_negative() {
                    return fail(place, "direct-contradiction witness does not hold");
                }
            }
            EliminationReason::NegativeOnNef { class, nef, value } => {
                if *class != residue {
                    return fail(place, "elimination class is not target minus candidate");
                }
                verify_leaf(
                    model,
                    place,
                    class,
                    &LeafReason::NegativeOnNef {
                        nef: nef.clone(),
                        value: value.clone(),
                    },
                )?;
            }
            EliminationReason::ExceptionalSupport { class, combo } => {
                if *class != residue {
                    return fail(place, "elimination class is not target minus candidate");
                }
                verify_exceptional(model, place, class, combo)?;
            }
            EliminationReason::Recursive { target } => {
                if *target != residue {
                    return fail(place, "recursive target is not target minus candidate");
                }
                let Some(child) = pool.get(target) else {
                    return fail(
                        place,
                        format!("recursive target {} missing from pool", describe(model, target)),
                    );
                };
                if !verified.contains(&child.target) {
                    verify_node(model, child, pool, verified, visiting)?;
                }
                if child.depth >= node.depth {
                    return fail(place, "recursion does not decrease certificate depth");
                }
                max_child_depth = max_child_depth.max(child.depth);
            }
        }
    }

    if node.depth != 1 + max_child_depth {
        return fail(
            place,
            format!(
                "depth {} does not equal 1 + max child depth {max_child_depth}",
                node.depth
            ),
        );
    }
    Ok(())
}
