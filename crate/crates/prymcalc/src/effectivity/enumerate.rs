//! Exhaustive enumeration of (−2)-candidates against a square-(−4) class.
//!
//! Given a member class B with B² = −4, every decomposition B = D + (B−D)
//! into effective pieces with D a (−2)-curve obeys a stack of linear and
//! quadratic constraints. This module turns the declared nef classes into a
//! finite coefficient box, walks it, and returns every member class D that
//! survives all of them:
//!
//!   D² = −2,  pair(B,D) < 0,
//!   0 ≤ pair(D,H) and 0 ≤ pair(B−D,H) for every declared nef H,
//!   pair(D,N) ≥ 0 and D ≠ N for every known (−2)-curve N with pair(B,N) ≥ 0,
//!   D is not a non-effective exceptional-span class (see below).
//!
//! The last filter drops D lying in the span of the known (−2)-curves
//! without being a nonnegative integral combination of them: such a class
//! can never be the effective curve the decomposition needs.
//!
//! Coordinates split in two. A coordinate with negative self-pairing,
//! orthogonal to the rest of the basis and to every nef class, is bounded
//! by the quadratic constraint alone (the "negative block", the N-slots in
//! the built-in models); the remaining coordinates must be pinned down by
//! the nef inequalities, and interval propagation to a fixpoint derives
//! their ranges. An unconstrained or absurdly wide coordinate is an error,
//! never a silent truncation.

use super::{span_combination, EffectivityError, Result};
use crate::lattice::{LatticeClass, LatticeModel};
use crate::rational::{format_rat, half, rat_int, Rat};
use num_bigint::BigInt;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Widest half-coefficient magnitude the derived box may reach before the
/// enumeration refuses to run.
pub const COEFF_CAP: i64 = 32;

const PROPAGATION_PASSES: usize = 64;

/// The inequalities that made the search finite, in replayable form. Replay
/// re-derives this record and compares it verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRecord {
    /// One entry per declared nef class H: the two-sided constraint
    /// 0 ≤ pair(D,H) ≤ pair(B,H).
    pub nef_constraints: Vec<String>,
    /// Derived per-coordinate ranges for the linearly bounded coordinates.
    pub intervals: Vec<CoordBound>,
    /// Labels of the quadratically bounded coordinates.
    pub negative_block: Vec<String>,
    /// Whether the exceptional-span exclusion filter was applied.
    pub span_support_rule: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordBound {
    pub coordinate: String,
    /// Inclusive bounds on the coefficient, as exact rationals.
    pub lo: String,
    pub hi: String,
}

/// A half-open-ended exact interval on a doubled coefficient.
#[derive(Debug, Clone)]
struct Interval {
    lo: Option<Rat>,
    hi: Option<Rat>,
}

impl Interval {
    fn unbounded() -> Self {
        Interval { lo: None, hi: None }
    }

    /// Intersect with [lo, hi]; report whether anything changed.
    fn tighten(&mut self, lo: Option<&Rat>, hi: Option<&Rat>) -> bool {
        let mut changed = false;
        if let Some(l) = lo {
            if self.lo.as_ref().is_none_or(|cur| l > cur) {
                self.lo = Some(l.clone());
                changed = true;
            }
        }
        if let Some(h) = hi {
            if self.hi.as_ref().is_none_or(|cur| h < cur) {
                self.hi = Some(h.clone());
                changed = true;
            }
        }
        changed
    }

    fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => l > h,
            _ => false,
        }
    }
}

/// One linear constraint lo ≤ Σ wⱼ·dⱼ ≤ hi over doubled coordinates.
struct LinearConstraint {
    weights: Vec<Rat>, // indexed by position in the box-coordinate list
    lo: Rat,
    hi: Rat,
}

#[derive(Debug)]
pub(super) struct Enumeration {
    pub candidates: Vec<LatticeClass>,
    pub bounds: BoundsRecord,
}

/// See the module docs. `b` must be a member with pair(b,b) = −4.
pub(super) fn enumerate(model: &LatticeModel, b: &LatticeClass) -> Result<Enumeration> {
    let sq = model.pair(b, b)?;
    if sq != rat_int(-4) {
        return Err(EffectivityError::UnsupportedShape {
            detail: format!(
                "candidate enumeration needs a square -4 target, got square {sq}"
            ),
        });
    }
    if !model.is_member(b)? {
        return Err(EffectivityError::InvalidParameter {
            detail: "enumeration target is not a member class".into(),
        });
    }
    let rank = model.rank();
    let nef = model.nef_classes();
    let neg2 = model.neg2_classes();
    let units: Vec<LatticeClass> = (0..rank)
        .map(|k| {
            let mut d = vec![BigInt::zero(); rank];
            d[k] = BigInt::from(2);
            LatticeClass::from_doubled(model.name().to_string(), d)
        })
        .collect();

    // Split coordinates: `neg_block` collects the ones bounded by the
    // quadratic constraint, `box_coords` the ones the nef inequalities
    // must bound.
    let mut neg_block: Vec<usize> = Vec::new();
    let mut box_coords: Vec<usize> = Vec::new();
    'coord: for k in 0..rank {
        let gram = model.gram();
        if gram[k][k].is_negative()
            && (0..rank).all(|j| j == k || gram[k][j].is_zero())
        {
            for (_, h) in &nef {
                if !h.doubled_coeffs()[k].is_zero() {
                    // a nef class rides this coordinate; treat it linearly
                    box_coords.push(k);
                    continue 'coord;
                }
            }
            neg_block.push(k);
        } else {
            box_coords.push(k);
        }
    }

    // Per-doubled-unit weight of coordinate k against H is pair(unit_k,H)/2.
    let mut constraints: Vec<LinearConstraint> = Vec::new();
    let mut nef_constraint_text: Vec<String> = Vec::new();
    for (label, h) in &nef {
        let cap = model.pair(b, h)?;
        nef_constraint_text.push(format!(
            "0 <= pair(D, {label}) <= {}",
            format_rat(&cap)
        ));
        let weights: Vec<Rat> = box_coords
            .iter()
            .map(|&k| model.pair(&units[k], h).expect("same model") / rat_int(2))
            .collect();
        constraints.push(LinearConstraint {
            weights,
            lo: Rat::zero(),
            hi: cap,
        });
    }

    let mut intervals: Vec<Interval> = box_coords.iter().map(|_| Interval::unbounded()).collect();
    propagate(&constraints, &mut intervals);

    // Materialize integer ranges on the doubled coordinates.
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(box_coords.len());
    let mut interval_record: Vec<CoordBound> = Vec::with_capacity(box_coords.len());
    let mut box_empty = false;
    for (pos, &k) in box_coords.iter().enumerate() {
        let label = &model.labels()[k];
        let iv = &intervals[pos];
        let (Some(lo), Some(hi)) = (&iv.lo, &iv.hi) else {
            return Err(EffectivityError::UnboundedSearch {
                coordinate: label.clone(),
                detail: "the declared nef classes leave this coordinate unbounded".into(),
            });
        };
        let lo_int = lo.ceil().to_integer();
        let hi_int = hi.floor().to_integer();
        let too_wide = |v: &BigInt| v.abs() > BigInt::from(2 * COEFF_CAP);
        if too_wide(&lo_int) || too_wide(&hi_int) {
            return Err(EffectivityError::UnboundedSearch {
                coordinate: label.clone(),
                detail: format!(
                    "derived range [{}, {}] exceeds the coefficient cap {COEFF_CAP}",
                    format_rat(&half(&lo_int)),
                    format_rat(&half(&hi_int)),
                ),
            });
        }
        let lo_int = lo_int.to_i64().expect("capped");
        let hi_int = hi_int.to_i64().expect("capped");
        if lo_int > hi_int {
            box_empty = true;
        }
        interval_record.push(CoordBound {
            coordinate: label.clone(),
            lo: format_rat(&half(&BigInt::from(lo_int))),
            hi: format_rat(&half(&BigInt::from(hi_int))),
        });
        ranges.push((lo_int, hi_int));
    }

    let bounds = BoundsRecord {
        nef_constraints: nef_constraint_text,
        intervals: interval_record,
        negative_block: neg_block.iter().map(|&k| model.labels()[k].clone()).collect(),
        span_support_rule: true,
    };

    if box_empty {
        return Ok(Enumeration {
            candidates: Vec::new(),
            bounds,
        });
    }

    // Coordinates whose doubled value must be even (integral coefficients).
    let even_only: Vec<bool> = box_coords
        .iter()
        .map(|k| model.parity().integral.contains(k))
        .collect();

    // Sign pruning on the negative block: if a known (−2)-curve is exactly
    // the unit class of coordinate k and pairs ≥ 0 with B, then
    // pair(D, N) ≥ 0 forces the coordinate ≤ 0.
    let mut nonpositive = vec![false; rank];
    for (_, n) in &neg2 {
        if let Some(k) = (0..rank).find(|&k| *n == units[k]) {
            if !model.pair(b, n)?.is_negative() {
                nonpositive[k] = true;
            }
        }
    }

    let mut found: Vec<LatticeClass> = Vec::new();
    let mut point = vec![0i64; box_coords.len()];
    walk_box(
        model,
        b,
        &WalkContext {
            box_coords: &box_coords,
            neg_block: &neg_block,
            ranges: &ranges,
            even_only: &even_only,
            constraints: &constraints,
            nonpositive: &nonpositive,
            nef: &nef,
            neg2: &neg2,
        },
        0,
        &mut point,
        &mut found,
    )?;

    found.sort_by(|x, y| x.doubled_coeffs().cmp(y.doubled_coeffs()));
    found.dedup();
    Ok(Enumeration {
        candidates: found,
        bounds,
    })
}

struct WalkContext<'a> {
    box_coords: &'a [usize],
    neg_block: &'a [usize],
    ranges: &'a [(i64, i64)],
    even_only: &'a [bool],
    constraints: &'a [LinearConstraint],
    nonpositive: &'a [bool],
    nef: &'a [(String, LatticeClass)],
    neg2: &'a [(String, LatticeClass)],
}

fn walk_box(
    model: &LatticeModel,
    b: &LatticeClass,
    ctx: &WalkContext,
    pos: usize,
    point: &mut Vec<i64>,
    found: &mut Vec<LatticeClass>,
) -> Result<()> {
    if pos < ctx.box_coords.len() {
        let (lo, hi) = ctx.ranges[pos];
        for v in lo..=hi {
            if ctx.even_only[pos] && v % 2 != 0 {
                continue;
            }
            point[pos] = v;
            walk_box(model, b, ctx, pos + 1, point, found)?;
        }
        return Ok(());
    }

    // Exact recheck of every nef constraint at this box point; interval
    // propagation is a relaxation, the point itself must satisfy them.
    for c in ctx.constraints {
        let mut acc = Rat::zero();
        for (w, &v) in c.weights.iter().zip(point.iter()) {
            acc += w * rat_int(v);
        }
        if acc < c.lo || acc > c.hi {
            return Ok(());
        }
    }

    // Quadratic budget for the negative block: D² = −2 pins
    // Σ (−gram[k][k])·dₖ² over the block to 4·(q_box + 2).
    let mut q_box = Rat::zero();
    for (i, &ki) in ctx.box_coords.iter().enumerate() {
        for (j, &kj) in ctx.box_coords.iter().enumerate() {
            let g = &model.gram()[ki][kj];
            if !g.is_zero() {
                q_box += g * rat_int(point[i] * point[j]);
            }
        }
    }
    let budget = q_box / rat_int(4) + rat_int(2);
    let budget4 = budget * rat_int(4);
    if budget4.is_negative() {
        return Ok(());
    }

    let masses: Vec<Rat> = ctx
        .neg_block
        .iter()
        .map(|&k| -model.gram()[k][k].clone())
        .collect();
    let mut block = vec![0i64; ctx.neg_block.len()];
    fill_block(
        model,
        b,
        ctx,
        &masses,
        budget4,
        0,
        &mut block,
        point,
        found,
    )
}

#[allow(clippy::too_many_arguments)]
fn fill_block(
    model: &LatticeModel,
    b: &LatticeClass,
    ctx: &WalkContext,
    masses: &[Rat],
    remaining: Rat,
    pos: usize,
    block: &mut Vec<i64>,
    point: &[i64],
    found: &mut Vec<LatticeClass>,
) -> Result<()> {
    if pos == ctx.neg_block.len() {
        if remaining.is_zero() {
            finish_candidate(model, b, ctx, point, block, found)?;
        }
        return Ok(());
    }
    // |d|² ≤ remaining / mass, d integer
    let top = (&remaining / &masses[pos]).floor().to_integer();
    if top.is_negative() {
        return Ok(());
    }
    let top = top.sqrt().to_i64().expect("block bound fits i64");
    let lo = -top;
    let hi = if ctx.nonpositive[ctx.neg_block[pos]] { 0.min(top) } else { top };
    for d in lo..=hi {
        let spent = &masses[pos] * rat_int(d * d);
        if spent > remaining {
            continue;
        }
        block[pos] = d;
        fill_block(
            model,
            b,
            ctx,
            masses,
            &remaining - spent,
            pos + 1,
            block,
            point,
            found,
        )?;
    }
    Ok(())
}

fn finish_candidate(
    model: &LatticeModel,
    b: &LatticeClass,
    ctx: &WalkContext,
    point: &[i64],
    block: &[i64],
    found: &mut Vec<LatticeClass>,
) -> Result<()> {
    let mut doubled = vec![BigInt::zero(); model.rank()];
    for (i, &k) in ctx.box_coords.iter().enumerate() {
        doubled[k] = BigInt::from(point[i]);
    }
    for (i, &k) in ctx.neg_block.iter().enumerate() {
        doubled[k] = BigInt::from(block[i]);
    }
    let d = LatticeClass::from_doubled(model.name().to_string(), doubled);

    if !model.is_member(&d)? {
        return Ok(());
    }
    debug_assert_eq!(model.pair(&d, &d)?, rat_int(-2));
    if !model.pair(b, &d)?.is_negative() {
        return Ok(());
    }
    for (_, h) in ctx.nef {
        if model.pair(&d, h)?.is_negative() {
            return Ok(());
        }
        if model.pair(&b.sub(&d), h)?.is_negative() {
            return Ok(());
        }
    }
    for (_, n) in ctx.neg2 {
        if !model.pair(b, n)?.is_negative() {
            if d == *n {
                return Ok(());
            }
            if model.pair(&d, n)?.is_negative() {
                return Ok(());
            }
        }
    }
    // Exceptional-span exclusion: a candidate lying in the span of the
    // known (−2)-curves but not expressible as a nonnegative integral
    // combination of them cannot be an effective curve class.
    if let Some(combo) = span_combination(model, &d)? {
        let effective_shape = combo.iter().all(|c| c.is_integer() && !c.is_negative());
        if !effective_shape {
            return Ok(());
        }
    }
    found.push(d);
    Ok(())
}

/// Interval refinement to a fixpoint (bounded pass count; refinement only
/// ever shrinks, so stopping early keeps a superset of the solutions).
fn propagate(constraints: &[LinearConstraint], intervals: &mut [Interval]) {
    for _ in 0..PROPAGATION_PASSES {
        let mut changed = false;
        for c in constraints {
            for target in 0..intervals.len() {
                let w = &c.weights[target];
                if w.is_zero() {
                    continue;
                }
                // bound w·d_target by [c.lo − rest_hi, c.hi − rest_lo]
                let mut rest_lo = Some(Rat::zero());
                let mut rest_hi = Some(Rat::zero());
                for (other, iv) in intervals.iter().enumerate() {
                    if other == target || c.weights[other].is_zero() {
                        continue;
                    }
                    let wo = &c.weights[other];
                    let (term_lo, term_hi) = if wo.is_positive() {
                        (
                            iv.lo.as_ref().map(|l| wo * l),
                            iv.hi.as_ref().map(|h| wo * h),
                        )
                    } else {
                        (
                            iv.hi.as_ref().map(|h| wo * h),
                            iv.lo.as_ref().map(|l| wo * l),
                        )
                    };
                    rest_lo = match (rest_lo, term_lo) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                    rest_hi = match (rest_hi, term_hi) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                }
                let num_lo = rest_hi.map(|rh| &c.lo - rh);
                let num_hi = rest_lo.map(|rl| &c.hi - rl);
                let (new_lo, new_hi) = if w.is_positive() {
                    (num_lo.map(|v| v / w), num_hi.map(|v| v / w))
                } else {
                    (num_hi.map(|v| v / w), num_lo.map(|v| v / w))
                };
                if intervals[target].tighten(new_lo.as_ref(), new_hi.as_ref()) {
                    changed = true;
                }
                if intervals[target].is_empty() {
                    // no solutions at all; collapse to a canonical empty box
                    for iv in intervals.iter_mut() {
                        iv.lo = Some(rat_int(1));
                        iv.hi = Some(Rat::zero());
                    }
                    return;
                }
            }
        }
        if !changed {
            break;
        }
    }
}
