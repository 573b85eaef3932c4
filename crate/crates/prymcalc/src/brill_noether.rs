//! Closed-form dimension counts for linear series: the classical
//! Brill-Noether number, expected dimensions of secant loci, the search for
//! divisorial secant cases, and the itemized dimension bound coming from
//! limit-linear-series weight bookkeeping on a reducible curve.
//!
//! All functions are pure integer/rational formula evaluations; the value of
//! the module is that the formulas are pinned down by tests rather than
//! rederived at every call site.

use crate::rational::{rat_int, Rat};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BnError {
    #[error("out of range: {detail}")]
    OutOfRange { detail: String },
}

pub type Result<T> = std::result::Result<T, BnError>;

fn out_of_range<T>(detail: impl Into<String>) -> Result<T> {
    Err(BnError::OutOfRange {
        detail: detail.into(),
    })
}

/// The Brill-Noether number g − (r+1)(g−d+r). Total on all integer inputs.
///
/// Panics only on i64 overflow, which no meaningful genus can reach.
pub fn rho(g: i64, r: i64, d: i64) -> i64 {
    let v = i128::from(g) - (i128::from(r) + 1) * (i128::from(g) - i128::from(d) + i128::from(r));
    i64::try_from(v).expect("rho overflows i64")
}

/// Expected dimension e − f(r+1−e+f) of the locus of degree-e divisors
/// imposing at most e−f conditions on a fixed series of rank r.
pub fn secant_expected_dim(e: i64, f: i64, r: i64) -> Result<i64> {
    if f < 0 || f >= e {
        return out_of_range(format!("need 0 <= f < e, got e = {e}, f = {f}"));
    }
    Ok(e - f * (r + 1 - e + f))
}

/// The secant count specialised to the Prym-canonical series: rank g−2, so
/// the expected dimension is e − f(g−1−e+f).
pub fn prym_secant_expected_dim(g: i64, e: i64, f: i64) -> Result<i64> {
    if f < 0 || f >= e || e >= g {
        return out_of_range(format!("need 0 <= f < e < g, got g = {g}, e = {e}, f = {f}"));
    }
    Ok(e - f * (g - 1 - e + f))
}

/// All (e, f) with 0 ≤ f ≤ e ≤ g−1 where e − f(g−1−e+f) is exactly −1,
/// i.e. the secant condition cuts a divisor. Sorted by f, then e.
///
/// Only e ≤ g−1 is searched; the supporting dimension arguments need e < g.
/// The boundary f = e is admitted because the genus-3 difference divisor
/// lives there: (1, 1) is the single f = e instance at any genus (f = e
/// forces e(g−2) = 1). Note also the square-genus family: for g = f² the
/// pair (g−1, f) qualifies.
pub fn divisorial_pairs(g: i64) -> Result<Vec<(i64, i64)>> {
    if g < 3 {
        return out_of_range(format!("need g >= 3, got g = {g}"));
    }
    let mut pairs = Vec::new();
    for f in 1..g {
        for e in f..g {
            if e - f * (g - 1 - e + f) == -1 {
                pairs.push((e, f));
            }
        }
    }
    pairs.sort_by_key(|&(e, f)| (f, e));
    Ok(pairs)
}

/// Slope 6 + 12/(g+1) of the divisor of curves carrying a degree-(g+1)/2…
/// pencil, exact.
pub fn hurwitz_slope(g: i64) -> Result<Rat> {
    if g < 1 {
        return out_of_range(format!("need g >= 1, got g = {g}"));
    }
    Ok(rat_int(6) + rat_int(12) / rat_int(g + 1))
}

/// Vanishing orders of a rank-r degree-d series at a point, normalized:
/// entries α₀ ≤ … ≤ α_r with 0 ≤ αᵢ ≤ d−r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationSequence {
    r: i64,
    d: i64,
    entries: Vec<i64>,
}

impl RamificationSequence {
    pub fn new(r: i64, d: i64, entries: Vec<i64>) -> Result<Self> {
        if r < 0 || d < r {
            return out_of_range(format!("need 0 <= r <= d, got r = {r}, d = {d}"));
        }
        if entries.len() as i64 != r + 1 {
            return out_of_range(format!(
                "rank {r} sequence needs {} entries, got {}",
                r + 1,
                entries.len()
            ));
        }
        let mut prev = 0;
        for (k, &a) in entries.iter().enumerate() {
            if a < prev {
                return out_of_range(format!("entry {k} breaks monotonicity: {a} < {prev}"));
            }
            prev = a;
        }
        if prev > d - r {
            return out_of_range(format!("top entry {prev} exceeds d - r = {}", d - r));
        }
        Ok(RamificationSequence { r, d, entries })
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }
}

/// Total ramification weight: the sum of the sequence.
pub fn ram_weight(seq: &RamificationSequence) -> i64 {
    seq.entries.iter().sum()
}

/// Weight data for the dimension count on a g-component degeneration: per
/// component j a weight wt_j and its complement bar_j with
/// wt_j + bar_j = f(e−f+1), plus the two node weights summing to the same
/// budget. `m` marks how many components carry the shifted count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    pub g: i64,
    pub e: i64,
    pub f: i64,
    pub m: i64,
    pub alpha_weights: Vec<i64>,
    pub bar_alpha_weights: Vec<i64>,
    pub p_weights: [i64; 2],
}

/// The four itemized contributions to the dimension bound and their total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitBoundBreakdown {
    /// Σ over the g−m unmarked components of f(e−f) − wt_j.
    pub unmarked_points: i64,
    /// Σ over the m marked components of 1 + f(e−f) − wt_j.
    pub marked_points: i64,
    /// f(e+1−f) − Σ_{marked} bar_j − p₁.
    pub node_left: i64,
    /// f(e+1−f) − Σ_{unmarked} bar_j − p₂.
    pub node_right: i64,
    pub total: i64,
}

fn weight_budget(e: i64, f: i64) -> i64 {
    f * (e - f + 1)
}

impl WeightAssignment {
    fn validate(&self) -> Result<()> {
        let &WeightAssignment { g, e, f, m, .. } = self;
        if g < 0 || f < 0 || f >= e {
            return out_of_range(format!("need g >= 0 and 0 <= f < e, got g = {g}, e = {e}, f = {f}"));
        }
        if m < 0 || m > e || m > g {
            return out_of_range(format!("need 0 <= m <= min(e, g), got m = {m}"));
        }
        let budget = weight_budget(e, f);
        for (name, list) in [
            ("alpha_weights", &self.alpha_weights),
            ("bar_alpha_weights", &self.bar_alpha_weights),
        ] {
            if list.len() as i64 != g {
                return out_of_range(format!("{name} needs {g} entries, got {}", list.len()));
            }
            if let Some(w) = list.iter().find(|&&w| w < 0 || w > budget) {
                return out_of_range(format!("{name} entry {w} outside [0, {budget}]"));
            }
        }
        for (wt, bar) in self.alpha_weights.iter().zip(&self.bar_alpha_weights) {
            if wt + bar != budget {
                return out_of_range(format!(
                    "weights {wt} + {bar} do not meet the budget {budget}"
                ));
            }
        }
        let [p1, p2] = self.p_weights;
        if p1 < 0 || p2 < 0 || p1 + p2 != budget {
            return out_of_range(format!(
                "node weights ({p1}, {p2}) must be nonnegative and sum to {budget}"
            ));
        }
        Ok(())
    }
}

/// Adds up the component-by-component dimension contributions. The total
/// telescopes: whatever valid weights are chosen, it equals
/// m − f(g−1−e+f). The point of returning the breakdown is to make that
/// cancellation auditable.
pub fn limit_series_dimension_bound(w: &WeightAssignment) -> Result<LimitBoundBreakdown> {
    w.validate()?;
    let m = w.m as usize;
    let per_point = w.f * (w.e - w.f);
    let node_budget = w.f * (w.e + 1 - w.f);

    let unmarked_points: i64 = w.alpha_weights[m..].iter().map(|wt| per_point - wt).sum();
    let marked_points: i64 = w.alpha_weights[..m]
        .iter()
        .map(|wt| 1 + per_point - wt)
        .sum();
    let node_left =
        node_budget - w.bar_alpha_weights[..m].iter().sum::<i64>() - w.p_weights[0];
    let node_right =
        node_budget - w.bar_alpha_weights[m..].iter().sum::<i64>() - w.p_weights[1];
    let total = unmarked_points + marked_points + node_left + node_right;
    Ok(LimitBoundBreakdown {
        unmarked_points,
        marked_points,
        node_left,
        node_right,
        total,
    })
}
