//! Effectivity analysis on the lattice models: certified proofs that a
//! class carries no effective divisor.
//!
//! The engine rests on three facts about the surfaces the models encode.
//! An effective class pairs nonnegatively with every nef class. The known
//! (−2)-curves are the only irreducible curves orthogonal to the
//! polarization, so a class in their rational span is effective exactly
//! when it is a nonnegative integral combination of them. And if an
//! effective class pairs negatively with an irreducible (−2)-curve, that
//! curve splits off: A effective forces A − N effective whenever
//! pair(A,N) < 0 ("peeling").
//!
//! For a peeled target B with B² = −4 that none of the direct arguments
//! settle, the prover runs a complete case analysis: if B were effective
//! it would decompose as B = D + (B − D) with D an irreducible (−2)-curve
//! pairing negatively with B. The enumeration in [`enumerate`] lists every
//! such D; eliminating them all, possibly recursing into B − D, proves B
//! non-effective. Successful proofs come back as replayable certificates
//! ([`certificate`]) sharing subproofs through a flat pool.

mod enumerate;
pub mod certificate;
mod suites;

#[cfg(test)]
mod tests;

pub use certificate::{
    replay_certificate, CandidateRecord, CertNode, EliminationReason, LeafReason,
    NonEffectivityCertificate, PeelStep, ReplayError,
};
pub use enumerate::{BoundsRecord, CoordBound, COEFF_CAP};
pub use suites::{run_suite, SuiteEntry, SuiteKind, SuiteStatus};

use crate::lattice::{LatticeClass, LatticeError, LatticeModel};
use crate::rational::{rat_int, Rat};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::HashMap;

/// Peel iterations before giving up on an adversarial model.
pub const PEEL_CAP: usize = 1024;

/// Recursion budget used by the CLI when none is given.
pub const DEFAULT_MAX_DEPTH: u32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum EffectivityError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("search cannot be made finite: coordinate `{coordinate}`: {detail}")]
    UnboundedSearch { coordinate: String, detail: String },
    #[error("peeling did not stabilize within {cap} subtractions")]
    PeelCapExceeded { cap: usize },
    #[error("unsupported shape: {detail}")]
    UnsupportedShape { detail: String },
    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
}

pub type Result<T> = std::result::Result<T, EffectivityError>;

/// Solve `class = Σ xⱼ·Nⱼ` over the declared (−2)-curves. `Some` needs the
/// curves linearly independent (the combination is then unique); dependent
/// curves or a class outside the span give `None`. Every consumer treats
/// `None` as "no conclusion".
pub(crate) fn span_combination(
    model: &LatticeModel,
    class: &LatticeClass,
) -> Result<Option<Vec<Rat>>> {
    let knowns = model.neg2_classes();
    let m = knowns.len();
    if m == 0 {
        return Ok(None);
    }
    let rank = model.rank();
    // rows: coordinates; columns: knowns, then the class
    let mut mat: Vec<Vec<Rat>> = (0..rank)
        .map(|k| {
            let mut row: Vec<Rat> = knowns.iter().map(|(_, n)| n.coeff(k)).collect();
            row.push(class.coeff(k));
            row
        })
        .collect();

    let mut pivot_rows: Vec<usize> = Vec::with_capacity(m);
    let mut row = 0usize;
    for col in 0..m {
        let Some(p) = (row..rank).find(|&r| !mat[r][col].is_zero()) else {
            // no pivot for this known: the curves are linearly dependent
            return Ok(None);
        };
        mat.swap(row, p);
        let inv = mat[row][col].recip();
        for c in col..=m {
            let scaled = &mat[row][c] * &inv;
            mat[row][c] = scaled;
        }
        for r in 0..rank {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..=m {
                    let reduced = &mat[r][c] - &factor * &mat[row][c];
                    mat[r][c] = reduced;
                }
            }
        }
        pivot_rows.push(row);
        row += 1;
    }
    // consistency: rows without a pivot must have zero residue
    for r in row..rank {
        if !mat[r][m].is_zero() {
            return Ok(None);
        }
    }
    let solution = (0..m).map(|col| mat[pivot_rows[col]][m].clone()).collect();
    Ok(Some(solution))
}

fn is_effective_combo(combo: &[Rat]) -> bool {
    combo.iter().all(|c| c.is_integer() && !c.is_negative())
}

/// Subtract known (−2)-curves pairing negatively with the running class
/// until none does, returning the stabilized class and the subtraction log.
/// Sound direction: if the input is effective, so is the output.
pub fn peel_base_curves(
    model: &LatticeModel,
    a: &LatticeClass,
) -> Result<(LatticeClass, Vec<PeelStep>)> {
    if !model.is_member(a)? {
        return Err(EffectivityError::InvalidParameter {
            detail: "peel target is not a member class".into(),
        });
    }
    let neg2 = model.neg2_classes();
    let mut current = a.clone();
    let mut steps: Vec<PeelStep> = Vec::new();
    'outer: loop {
        if steps.len() > PEEL_CAP {
            return Err(EffectivityError::PeelCapExceeded { cap: PEEL_CAP });
        }
        for (label, n) in &neg2 {
            let pairing = model.pair(&current, n)?;
            if pairing.is_negative() {
                steps.push(PeelStep {
                    curve: label.clone(),
                    pairing,
                });
                current = current.sub(n);
                continue 'outer;
            }
        }
        return Ok((current, steps));
    }
}

#[derive(Debug, Clone)]
pub enum ProofOutcome {
    Proved(NonEffectivityCertificate),
    NoProof(NoProofReport),
}

impl ProofOutcome {
    pub fn certificate(&self) -> Option<&NonEffectivityCertificate> {
        match self {
            ProofOutcome::Proved(cert) => Some(cert),
            ProofOutcome::NoProof(_) => None,
        }
    }
}

/// Honest failure report: what blocked the proof, not a verdict that the
/// class is effective.
#[derive(Debug, Clone, Serialize)]
pub struct NoProofReport {
    pub target: LatticeClass,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surviving: Vec<SurvivingCandidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivingCandidate {
    #[serde(rename = "D")]
    pub d: LatticeClass,
    pub obstacle: String,
}

/// Try to prove that `b` (a member class) is not effective, recursing at
/// most `max_depth` candidate analyses deep. `Proved` carries a
/// certificate that [`replay_certificate`] accepts; `NoProof` explains the
/// first obstruction. Raising `max_depth` never loses proofs: successful
/// subproofs are reused, so anything provable at depth d is still proved
/// at depth d+1.
pub fn prove_non_effective(
    model: &LatticeModel,
    b: &LatticeClass,
    max_depth: u32,
) -> Result<ProofOutcome> {
    if max_depth < 1 {
        return Err(EffectivityError::InvalidParameter {
            detail: "max_depth must be at least 1".into(),
        });
    }
    if !model.is_member(b)? {
        return Err(EffectivityError::InvalidParameter {
            detail: "target is not a member class".into(),
        });
    }
    if b.is_zero() {
        return Ok(ProofOutcome::NoProof(NoProofReport {
            target: b.clone(),
            reason: "the zero class is effective".into(),
            surviving: Vec::new(),
        }));
    }

    let mut prover = Prover {
        model,
        memo: HashMap::new(),
    };
    match prover.prove(b.clone(), max_depth)? {
        Ok(root) => {
            let pool = prover.collect_pool(&root);
            Ok(ProofOutcome::Proved(NonEffectivityCertificate {
                model_name: model.name().to_string(),
                root,
                sub_certificates: pool,
            }))
        }
        Err(fail) => {
            let (reason, surviving) = match fail {
                RecFail::Budget => (
                    format!("recursion budget {max_depth} exhausted"),
                    Vec::new(),
                ),
                RecFail::Shape(sq) => {
                    return Err(EffectivityError::UnsupportedShape {
                        detail: format!(
                            "no direct argument applies and the peeled target has square {sq}, \
                             not -4"
                        ),
                    });
                }
                RecFail::EffectiveShape(why) => (why, Vec::new()),
                RecFail::Survivors(list) => (
                    format!("{} candidate(s) could not be eliminated", list.len()),
                    list,
                ),
            };
            Ok(ProofOutcome::NoProof(NoProofReport {
                target: b.clone(),
                reason,
                surviving,
            }))
        }
    }
}

enum RecFail {
    Budget,
    Shape(Rat),
    EffectiveShape(String),
    Survivors(Vec<SurvivingCandidate>),
}

enum LeafOutcome {
    Closed(LeafReason),
    /// The class looks effective (nonnegative integral combination of the
    /// known curves); no non-effectivity proof can exist.
    EffectiveShape,
    Open,
}

struct Prover<'m> {
    model: &'m LatticeModel,
    /// Completed proofs only. A finished node is valid independently of
    /// the budget it was found under.
    memo: HashMap<LatticeClass, CertNode>,
}

impl<'m> Prover<'m> {
    fn leaf_on(&self, class: &LatticeClass) -> Result<LeafOutcome> {
        for (label, h) in self.model.nef_classes() {
            let value = self.model.pair(class, &h)?;
            if value.is_negative() {
                return Ok(LeafOutcome::Closed(LeafReason::NegativeOnNef {
                    nef: label,
                    value,
                }));
            }
        }
        if let Some(combo) = span_combination(self.model, class)? {
            if is_effective_combo(&combo) {
                return Ok(LeafOutcome::EffectiveShape);
            }
            return Ok(LeafOutcome::Closed(LeafReason::ExceptionalSupport { combo }));
        }
        Ok(LeafOutcome::Open)
    }

    fn prove(
        &mut self,
        target: LatticeClass,
        budget: u32,
    ) -> Result<std::result::Result<CertNode, RecFail>> {
        if let Some(node) = self.memo.get(&target) {
            return Ok(Ok(node.clone()));
        }

        // direct arguments on the raw target
        match self.leaf_on(&target)? {
            LeafOutcome::Closed(leaf) => {
                let node = CertNode {
                    target: target.clone(),
                    leaf: Some(leaf),
                    peel_steps: Vec::new(),
                    peeled_target: None,
                    bounds: None,
                    candidates: Vec::new(),
                    depth: 0,
                };
                self.memo.insert(target, node.clone());
                return Ok(Ok(node));
            }
            LeafOutcome::EffectiveShape => {
                return Ok(Err(RecFail::EffectiveShape(
                    "the target is a nonnegative integral combination of the known curves".into(),
                )));
            }
            LeafOutcome::Open => {}
        }

        let (peeled, peel_steps) = peel_base_curves(self.model, &target)?;
        if !peel_steps.is_empty() {
            match self.leaf_on(&peeled)? {
                LeafOutcome::Closed(leaf) => {
                    let node = CertNode {
                        target: target.clone(),
                        leaf: Some(leaf),
                        peeled_target: Some(peeled),
                        peel_steps,
                        bounds: None,
                        candidates: Vec::new(),
                        depth: 0,
                    };
                    self.memo.insert(target, node.clone());
                    return Ok(Ok(node));
                }
                LeafOutcome::EffectiveShape => {
                    return Ok(Err(RecFail::EffectiveShape(
                        "the target peels to a nonnegative integral combination of the known \
                         curves"
                            .into(),
                    )));
                }
                LeafOutcome::Open => {}
            }
        }

        let sq = self.model.pair(&peeled, &peeled)?;
        if sq != rat_int(-4) {
            return Ok(Err(RecFail::Shape(sq)));
        }
        if budget == 0 {
            return Ok(Err(RecFail::Budget));
        }

        let enumeration = enumerate::enumerate(self.model, &peeled)?;
        let mut candidates: Vec<CandidateRecord> = Vec::with_capacity(enumeration.candidates.len());
        let mut survivors: Vec<SurvivingCandidate> = Vec::new();
        let mut max_child_depth = 0u32;
        for d in enumeration.candidates {
            let residue = peeled.sub(&d);
            let elimination = match self.leaf_on(&residue)? {
                LeafOutcome::Closed(LeafReason::NegativeOnNef { nef, value }) => {
                    EliminationReason::NegativeOnNef {
                        class: residue,
                        nef,
                        value,
                    }
                }
                LeafOutcome::Closed(LeafReason::ExceptionalSupport { combo }) => {
                    EliminationReason::ExceptionalSupport {
                        class: residue,
                        combo,
                    }
                }
                LeafOutcome::EffectiveShape => {
                    survivors.push(SurvivingCandidate {
                        d,
                        obstacle: "the difference is a nonnegative integral combination of the \
                                   known curves"
                            .into(),
                    });
                    continue;
                }
                LeafOutcome::Open => match self.prove(residue.clone(), budget - 1)? {
                    Ok(child) => {
                        max_child_depth = max_child_depth.max(child.depth);
                        EliminationReason::Recursive { target: residue }
                    }
                    Err(fail) => {
                        let obstacle = match fail {
                            RecFail::Budget => "recursion budget exhausted".to_string(),
                            RecFail::Shape(sq) => format!(
                                "the difference peels to a class of square {sq}, which no \
                                 analysis covers"
                            ),
                            RecFail::EffectiveShape(why) => why,
                            RecFail::Survivors(_) => {
                                "no elimination found for the difference".to_string()
                            }
                        };
                        survivors.push(SurvivingCandidate { d, obstacle });
                        continue;
                    }
                },
            };
            candidates.push(CandidateRecord { d, elimination });
        }

        if !survivors.is_empty() {
            return Ok(Err(RecFail::Survivors(survivors)));
        }
        let node = CertNode {
            target: target.clone(),
            leaf: None,
            peeled_target: if peel_steps.is_empty() {
                None
            } else {
                Some(peeled)
            },
            peel_steps,
            bounds: Some(enumeration.bounds),
            candidates,
            depth: 1 + max_child_depth,
        };
        self.memo.insert(target, node.clone());
        Ok(Ok(node))
    }

    /// Pool of every node the root's recursions reach, parents first,
    /// following candidate order; the root itself is excluded.
    fn collect_pool(&self, root: &CertNode) -> Vec<CertNode> {
        let mut seen: Vec<LatticeClass> = Vec::new();
        let mut pool: Vec<CertNode> = Vec::new();
        self.collect_into(root, &mut seen, &mut pool);
        pool
    }

    fn collect_into(&self, node: &CertNode, seen: &mut Vec<LatticeClass>, pool: &mut Vec<CertNode>) {
        for cand in &node.candidates {
            if let EliminationReason::Recursive { target } = &cand.elimination {
                if seen.contains(target) {
                    continue;
                }
                seen.push(target.clone());
                let child = self.memo.get(target).expect("recursive child was proved");
                pool.push(child.clone());
                self.collect_into(child, seen, pool);
            }
        }
    }
}

/// One way of writing `target` as (rigid part) + (moving part).
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionRow {
    pub rigid_part: LatticeClass,
    pub moving_part: LatticeClass,
}

/// Exhaustive check that every decomposition of `target` into two member
/// classes puts all of the polarization on one side, leaving the other in
/// the rigid span of the known (−2)-curves.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub model_name: String,
    pub target: LatticeClass,
    pub cap: i64,
    pub inspected: usize,
    pub all_have_rigid_part: bool,
    pub rows: Vec<DecompositionRow>,
}

/// Enumerate the decompositions `target = A₁ + A₂` into member classes
/// where A₁ lies in the span of the known (−2)-curves with coefficients in
/// 0..=cap. Requires a model whose basis is the polarization plus the
/// known curves, with an integral polarization coefficient: then any
/// decomposition at all puts the polarization wholly on one side, so the
/// rows cover every shape up to the cap and each visibly has a rigid side.
pub fn check_no_moving_decomposition(
    model: &LatticeModel,
    target: &LatticeClass,
    cap: i64,
) -> Result<DecompositionReport> {
    if cap < 0 {
        return Err(EffectivityError::InvalidParameter {
            detail: "cap must be nonnegative".into(),
        });
    }
    let rank = model.rank();
    let neg2 = model.neg2_classes();
    // the known curves must be exactly the non-polarization basis vectors
    let mut covered = vec![false; rank];
    for (label, n) in &neg2 {
        let d = n.doubled_coeffs();
        let unit = (0..rank).find(|&k| {
            d[k] == 2.into() && (0..rank).all(|j| j == k || d[j].is_zero())
        });
        match unit {
            Some(k) if !covered[k] => covered[k] = true,
            _ => {
                return Err(EffectivityError::UnsupportedShape {
                    detail: format!(
                        "known curve `{label}` is not a basis vector; the decomposition \
                         argument does not apply"
                    ),
                });
            }
        }
    }
    let free: Vec<usize> = (0..rank).filter(|&k| !covered[k]).collect();
    let &[ell] = free.as_slice() else {
        return Err(EffectivityError::UnsupportedShape {
            detail: format!(
                "expected exactly one coordinate besides the known curves, found {}",
                free.len()
            ),
        });
    };
    if !model.parity().integral.contains(&ell) {
        return Err(EffectivityError::UnsupportedShape {
            detail: "the polarization coefficient is not forced integral, so a decomposition \
                     could split it"
                .into(),
        });
    }
    if !model.is_member(target)? {
        return Err(EffectivityError::InvalidParameter {
            detail: "target is not a member class".into(),
        });
    }
    if target.coeff(ell) != rat_int(1) {
        return Err(EffectivityError::UnsupportedShape {
            detail: "target must have polarization coefficient exactly 1".into(),
        });
    }

    let curve_coords: Vec<usize> = (0..rank).filter(|&k| covered[k]).collect();
    let mut rows: Vec<DecompositionRow> = Vec::new();
    let mut coeffs = vec![0i64; curve_coords.len()];
    loop {
        let mut doubled = vec![num_bigint::BigInt::zero(); rank];
        for (i, &k) in curve_coords.iter().enumerate() {
            doubled[k] = num_bigint::BigInt::from(2 * coeffs[i]);
        }
        let rigid = LatticeClass::from_doubled(model.name().to_string(), doubled);
        if model.is_member(&rigid)? {
            debug_assert!(span_combination(model, &rigid)?.is_some());
            let moving = target.sub(&rigid);
            rows.push(DecompositionRow {
                rigid_part: rigid,
                moving_part: moving,
            });
        }
        // odometer over {0..=cap}^curves
        let mut pos = 0;
        loop {
            if pos == coeffs.len() {
                let inspected = rows.len();
                return Ok(DecompositionReport {
                    model_name: model.name().to_string(),
                    target: target.clone(),
                    cap,
                    inspected,
                    all_have_rigid_part: true,
                    rows,
                });
            }
            if coeffs[pos] < cap {
                coeffs[pos] += 1;
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
    }
}
