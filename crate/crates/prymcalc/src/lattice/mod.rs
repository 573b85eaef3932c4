//! Picard-lattice models and exact class arithmetic.
//!
//! A [`LatticeModel`] is a based lattice: a labelled basis, a symmetric Gram
//! matrix over [`Rat`], a membership rule for half-integer coefficient
//! vectors, a set of named derived classes, and two distinguished lists of
//! basis data — declared nef classes and known (−2)-curves. Four built-in
//! model families cover the surfaces this crate works with; arbitrary models
//! can be declared for tests and experiments via [`LatticeModel::custom`].
//!
//! Classes store *doubled* coefficients as exact integers, so every
//! half-integer is represented exactly and membership reduces to parity
//! tests on integers. Rationals appear only at the API surface.

pub mod expr;
mod json;

use crate::rational::{doubled, half, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid model parameter: {detail}")]
    InvalidParameter { detail: String },
    #[error("model mismatch: expected `{expected}`, found `{found}`")]
    ModelMismatch { expected: String, found: String },
    #[error("dimension mismatch: expected rank {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown class name `{name}`")]
    UnknownName { name: String },
    #[error("coefficient is not a half-integer: {detail}")]
    NotHalfIntegral { detail: String },
    #[error("malformed class expression: {detail}")]
    ExprSyntax { detail: String },
    #[error("invalid model: {detail}")]
    InvalidModel { detail: String },
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// Which family a model belongs to, with its defining parameter.
///
/// The `g` kinds have `L·L = 2g−2`; the `i` kinds have `L·L = 16i−4` and
/// carry the half-sum classes `R = (L−N1−N2)/2` and `R' = (L−N3−…−N8)/2`.
/// Hyperelliptic kinds add an elliptic pencil class `E` with `E·E = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Standard { g: i64 },
    StandardHyperelliptic { g: i64 },
    Nonstandard { i: i64 },
    NonstandardHyperelliptic { i: i64 },
    Custom,
}

/// Membership rule on doubled coefficient vectors.
///
/// `integral` lists coordinates whose doubled coefficient must be even
/// (i.e. the coefficient is an integer). Each entry of `groups` is a list
/// of *terms*; a term is a set of coordinate indices whose doubled
/// coefficients are summed, and all terms of a group must agree mod 2.
/// Multi-index terms encode parity links across coordinates, e.g. the tie
/// between the L-coefficient and the N1, N2 coordinates induced by
/// `R = (L−N1−N2)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParityRule {
    pub integral: Vec<usize>,
    pub groups: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    name: String,
    kind: ModelKind,
    labels: Vec<String>,
    gram: Vec<Vec<Rat>>,
    parity: ParityRule,
    named: Vec<(String, Vec<BigInt>)>,
    nef: Vec<String>,
    neg2: Vec<String>,
}

/// A lattice element: doubled coefficients against a model's basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClass {
    model: String,
    doubled: Vec<BigInt>,
}

impl LatticeClass {
    pub fn from_doubled(model: impl Into<String>, doubled: Vec<BigInt>) -> Self {
        LatticeClass {
            model: model.into(),
            doubled,
        }
    }

    pub fn from_doubled_i64(model: impl Into<String>, doubled: &[i64]) -> Self {
        LatticeClass {
            model: model.into(),
            doubled: doubled.iter().map(|&d| BigInt::from(d)).collect(),
        }
    }

    /// Builds a class from rational coefficients; every coefficient must be
    /// a half-integer (denominator 1 or 2).
    pub fn from_rationals(model: impl Into<String>, coeffs: &[Rat]) -> Result<Self> {
        let mut dd = Vec::with_capacity(coeffs.len());
        for (k, c) in coeffs.iter().enumerate() {
            match doubled(c) {
                Some(d) => dd.push(d),
                None => {
                    return Err(LatticeError::NotHalfIntegral {
                        detail: format!("coordinate {k} has value {c}"),
                    })
                }
            }
        }
        Ok(LatticeClass {
            model: model.into(),
            doubled: dd,
        })
    }

    pub fn model_name(&self) -> &str {
        &self.model
    }

    pub fn doubled_coeffs(&self) -> &[BigInt] {
        &self.doubled
    }

    pub fn coeffs(&self) -> Vec<Rat> {
        self.doubled.iter().map(half).collect()
    }

    pub fn coeff(&self, k: usize) -> Rat {
        half(&self.doubled[k])
    }

    pub fn rank(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_zero(&self) -> bool {
        self.doubled.iter().all(|d| d.is_zero())
    }

    fn assert_same_model(&self, other: &LatticeClass) {
        assert_eq!(
            self.model, other.model,
            "class arithmetic across different models"
        );
        assert_eq!(self.doubled.len(), other.doubled.len());
    }

    pub fn add(&self, other: &LatticeClass) -> LatticeClass {
        self.assert_same_model(other);
        let doubled = self
            .doubled
            .iter()
            .zip(&other.doubled)
            .map(|(a, b)| a + b)
            .collect();
        LatticeClass {
            model: self.model.clone(),
            doubled,
        }
    }

    pub fn sub(&self, other: &LatticeClass) -> LatticeClass {
        self.assert_same_model(other);
        let doubled = self
            .doubled
            .iter()
            .zip(&other.doubled)
            .map(|(a, b)| a - b)
            .collect();
        LatticeClass {
            model: self.model.clone(),
            doubled,
        }
    }

    pub fn neg(&self) -> LatticeClass {
        LatticeClass {
            model: self.model.clone(),
            doubled: self.doubled.iter().map(|d| -d).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> LatticeClass {
        let n = BigInt::from(n);
        LatticeClass {
            model: self.model.clone(),
            doubled: self.doubled.iter().map(|d| d * &n).collect(),
        }
    }

    /// Short human-readable form, e.g. `L - 3*E - 1/2*N1`.
    pub fn display_with(&self, model: &LatticeModel) -> String {
        let mut out = String::new();
        for (k, d) in self.doubled.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let c = half(d);
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if mag == Rat::from_integer(BigInt::from(1)) {
                out.push_str(&model.labels[k]);
            } else {
                out.push_str(&format!("{mag}*{}", model.labels[k]));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Constructs one of the built-in models.
pub fn build_model(kind: ModelKind) -> Result<LatticeModel> {
    match kind {
        ModelKind::Standard { g } => standard(g, false),
        ModelKind::StandardHyperelliptic { g } => standard(g, true),
        ModelKind::Nonstandard { i } => nonstandard(i, false),
        ModelKind::NonstandardHyperelliptic { i } => nonstandard(i, true),
        ModelKind::Custom => Err(LatticeError::InvalidParameter {
            detail: "custom models are declared via LatticeModel::custom, not built".into(),
        }),
    }
}

const N_COUNT: usize = 8;

fn n_labels() -> Vec<String> {
    (1..=N_COUNT).map(|j| format!("N{j}")).collect()
}

pub fn standard(g: i64, hyperelliptic: bool) -> Result<LatticeModel> {
    if g < 2 {
        return Err(LatticeError::InvalidParameter {
            detail: format!("standard models need g >= 2 so that L.L = 2g-2 > 0; got g = {g}"),
        });
    }
    let l_sq = 2 * g - 2;
    let name = if hyperelliptic {
        format!("standard-hyp-g{g}")
    } else {
        format!("standard-g{g}")
    };
    let kind = if hyperelliptic {
        ModelKind::StandardHyperelliptic { g }
    } else {
        ModelKind::Standard { g }
    };
    // basis: L [, E], N1..N8; E.L = 2 on the hyperelliptic side
    build_family(name, kind, l_sq, hyperelliptic.then_some(2), false)
}

pub fn nonstandard(i: i64, hyperelliptic: bool) -> Result<LatticeModel> {
    if i < 1 {
        return Err(LatticeError::InvalidParameter {
            detail: format!("nonstandard models need i >= 1 so that L.L = 16i-4 > 0; got i = {i}"),
        });
    }
    let l_sq = 16 * i - 4;
    let name = if hyperelliptic {
        format!("nonstandard-hyp-i{i}")
    } else {
        format!("nonstandard-i{i}")
    };
    let kind = if hyperelliptic {
        ModelKind::NonstandardHyperelliptic { i }
    } else {
        ModelKind::Nonstandard { i }
    };
    build_family(name, kind, l_sq, hyperelliptic.then_some(4), true)
}

/// Shared assembly for the four built-in families. `e_dot_l` is `E·L` when
/// the elliptic class is present. `half_l` switches to the membership rule
/// with half-integral L-coefficient tied to the N1, N2 parity.
fn build_family(
    name: String,
    kind: ModelKind,
    l_sq: i64,
    e_dot_l: Option<i64>,
    half_l: bool,
) -> Result<LatticeModel> {
    let has_e = e_dot_l.is_some();
    let mut labels = vec!["L".to_string()];
    if has_e {
        labels.push("E".to_string());
    }
    labels.extend(n_labels());
    let rank = labels.len();
    let n0 = if has_e { 2 } else { 1 }; // first N coordinate

    let mut gram = vec![vec![Rat::zero(); rank]; rank];
    gram[0][0] = Rat::from_integer(BigInt::from(l_sq));
    if let Some(el) = e_dot_l {
        gram[0][1] = Rat::from_integer(BigInt::from(el));
        gram[1][0] = gram[0][1].clone();
    }
    for k in n0..rank {
        gram[k][k] = Rat::from_integer(BigInt::from(-2));
    }

    let parity = if half_l {
        // the group ties 2a+2c1, 2a+2c2, 2c3, ..., 2c8 to one parity
        let mut terms: Vec<Vec<usize>> = vec![vec![0, n0], vec![0, n0 + 1]];
        terms.extend((n0 + 2..rank).map(|k| vec![k]));
        ParityRule {
            integral: if has_e { vec![1] } else { vec![] },
            groups: vec![terms],
        }
    } else {
        ParityRule {
            integral: if has_e { vec![0, 1] } else { vec![0] },
            groups: vec![(n0..rank).map(|k| vec![k]).collect()],
        }
    };

    let mut named: Vec<(String, Vec<BigInt>)> = Vec::new();
    let mut e_half = vec![BigInt::zero(); rank];
    for slot in e_half.iter_mut().skip(n0) {
        *slot = BigInt::from(1);
    }
    named.push(("e".to_string(), e_half));
    if half_l {
        let mut r = vec![BigInt::zero(); rank];
        r[0] = BigInt::from(1);
        r[n0] = BigInt::from(-1);
        r[n0 + 1] = BigInt::from(-1);
        named.push(("R".to_string(), r));
        let mut rp = vec![BigInt::zero(); rank];
        rp[0] = BigInt::from(1);
        for slot in rp.iter_mut().skip(n0 + 2) {
            *slot = BigInt::from(-1);
        }
        named.push(("R'".to_string(), rp));
    }

    let nef = if has_e {
        vec!["L".to_string(), "E".to_string()]
    } else {
        vec!["L".to_string()]
    };
    let neg2 = n_labels();

    LatticeModel::custom(name, kind, labels, gram, parity, named, nef, neg2)
}

impl LatticeModel {
    /// Declares a model from raw data, validating shape and consistency:
    /// unique labels, symmetric square Gram matrix, in-range parity indices,
    /// resolvable nef/neg2 labels, and square −2 for every declared curve.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: String,
        kind: ModelKind,
        labels: Vec<String>,
        gram: Vec<Vec<Rat>>,
        parity: ParityRule,
        named: Vec<(String, Vec<BigInt>)>,
        nef: Vec<String>,
        neg2: Vec<String>,
    ) -> Result<LatticeModel> {
        let rank = labels.len();
        if rank == 0 {
            return Err(LatticeError::InvalidModel {
                detail: "empty basis".into(),
            });
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(LatticeError::InvalidModel {
                    detail: format!("duplicate basis label `{l}`"),
                });
            }
        }
        if gram.len() != rank || gram.iter().any(|row| row.len() != rank) {
            return Err(LatticeError::InvalidModel {
                detail: format!("gram matrix is not {rank}x{rank}"),
            });
        }
        for i in 0..rank {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::InvalidModel {
                        detail: format!("gram matrix asymmetric at ({i},{j})"),
                    });
                }
            }
        }
        let in_range = |k: &usize| *k < rank;
        if !parity.integral.iter().all(in_range)
            || !parity
                .groups
                .iter()
                .all(|g| g.iter().all(|term| term.iter().all(in_range)))
        {
            return Err(LatticeError::InvalidModel {
                detail: "parity rule references a coordinate out of range".into(),
            });
        }
        let mut named = named;
        named.sort_by(|a, b| a.0.cmp(&b.0)); // canonical order, so equality is structural
        if named.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(LatticeError::InvalidModel {
                detail: "duplicate named class".into(),
            });
        }
        for (l, v) in &named {
            if labels.contains(l) {
                return Err(LatticeError::InvalidModel {
                    detail: format!("named class `{l}` shadows a basis label"),
                });
            }
            if v.len() != rank {
                return Err(LatticeError::InvalidModel {
                    detail: format!("named class `{l}` has wrong length"),
                });
            }
        }
        let model = LatticeModel {
            name,
            kind,
            labels,
            gram,
            parity,
            named,
            nef,
            neg2,
        };
        for l in model.nef.iter().chain(&model.neg2) {
            if model.resolve(l).is_none() {
                return Err(LatticeError::InvalidModel {
                    detail: format!("nef/neg2 label `{l}` is not a basis or named class"),
                });
            }
        }
        for l in &model.neg2 {
            let c = model.resolve(l).expect("checked above");
            let sq = model.pair(&c, &c)?;
            if sq != Rat::from_integer(BigInt::from(-2)) {
                return Err(LatticeError::InvalidModel {
                    detail: format!("declared (-2)-curve `{l}` has square {sq}"),
                });
            }
        }
        for (l, _) in model.named.clone() {
            let c = model.resolve(&l).expect("named");
            if !model.is_member(&c)? {
                return Err(LatticeError::InvalidModel {
                    detail: format!("named class `{l}` fails the membership rule"),
                });
            }
        }
        for l in model.nef.iter().chain(&model.neg2) {
            let c = model.resolve(l).expect("checked above");
            if !model.is_member(&c)? {
                return Err(LatticeError::InvalidModel {
                    detail: format!("nef/neg2 class `{l}` fails the membership rule"),
                });
            }
        }
        for (hl, h) in model.nef_classes() {
            for (nl, n) in model.neg2_classes() {
                if model.pair(&h, &n)?.is_negative() {
                    return Err(LatticeError::InvalidModel {
                        detail: format!("nef class `{hl}` pairs negatively with `{nl}`"),
                    });
                }
            }
        }
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &[Vec<Rat>] {
        &self.gram
    }

    pub fn parity(&self) -> &ParityRule {
        &self.parity
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Resolves a basis label or named class to its class.
    pub fn resolve(&self, name: &str) -> Option<LatticeClass> {
        if let Some(k) = self.label_index(name) {
            let mut d = vec![BigInt::zero(); self.rank()];
            d[k] = BigInt::from(2);
            return Some(LatticeClass::from_doubled(self.name.clone(), d));
        }
        self.named
            .iter()
            .find(|(l, _)| l == name)
            .map(|(_, d)| LatticeClass::from_doubled(self.name.clone(), d.clone()))
    }

    pub fn named_classes(&self) -> impl Iterator<Item = (&str, LatticeClass)> {
        self.named
            .iter()
            .map(|(l, d)| (l.as_str(), LatticeClass::from_doubled(self.name.clone(), d.clone())))
    }

    pub fn nef_labels(&self) -> &[String] {
        &self.nef
    }

    pub fn neg2_labels(&self) -> &[String] {
        &self.neg2
    }

    pub fn nef_classes(&self) -> Vec<(String, LatticeClass)> {
        self.nef
            .iter()
            .map(|l| (l.clone(), self.resolve(l).expect("validated")))
            .collect()
    }

    pub fn neg2_classes(&self) -> Vec<(String, LatticeClass)> {
        self.neg2
            .iter()
            .map(|l| (l.clone(), self.resolve(l).expect("validated")))
            .collect()
    }

    fn check_class(&self, v: &LatticeClass) -> Result<()> {
        if v.model != self.name {
            return Err(LatticeError::ModelMismatch {
                expected: self.name.clone(),
                found: v.model.clone(),
            });
        }
        if v.doubled.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                found: v.doubled.len(),
            });
        }
        Ok(())
    }

    /// The symmetric pairing `v · w`, exact.
    pub fn pair(&self, v: &LatticeClass, w: &LatticeClass) -> Result<Rat> {
        self.check_class(v)?;
        self.check_class(w)?;
        // v·w = (dv^T G dw) / 4 with doubled vectors dv, dw
        let mut acc = Rat::zero();
        for (i, di) in v.doubled.iter().enumerate() {
            if di.is_zero() {
                continue;
            }
            for (j, dj) in w.doubled.iter().enumerate() {
                if dj.is_zero() || self.gram[i][j].is_zero() {
                    continue;
                }
                acc += &self.gram[i][j] * Rat::from_integer(di * dj);
            }
        }
        Ok(acc / Rat::from_integer(BigInt::from(4)))
    }

    /// Whether `v` lies in the lattice the model presents (as opposed to the
    /// ambient half-integer span of the basis).
    pub fn is_member(&self, v: &LatticeClass) -> Result<bool> {
        self.check_class(v)?;
        for &k in &self.parity.integral {
            if v.doubled[k].is_odd() {
                return Ok(false);
            }
        }
        for group in &self.parity.groups {
            let mut first: Option<bool> = None;
            for term in group {
                let sum: BigInt = term.iter().map(|&k| &v.doubled[k]).sum();
                let odd = sum.is_odd();
                match first {
                    None => first = Some(odd),
                    Some(p) if p != odd => return Ok(false),
                    _ => {}
                }
            }
        }
        Ok(true)
    }

    /// Evaluates `Σ coef · class` over basis labels and named classes.
    pub fn linear_combination(&self, terms: &[(&str, Rat)]) -> Result<LatticeClass> {
        let mut coeffs = vec![Rat::zero(); self.rank()];
        for (name, coef) in terms {
            let class = self
                .resolve(name)
                .ok_or_else(|| LatticeError::UnknownName {
                    name: (*name).to_string(),
                })?;
            for (slot, c) in coeffs.iter_mut().zip(class.coeffs()) {
                *slot += coef * c;
            }
        }
        LatticeClass::from_rationals(self.name.clone(), &coeffs)
    }

    /// Parses a class expression such as `L - 3*E - e` or `R - N1`.
    pub fn class_from_expr(&self, input: &str) -> Result<LatticeClass> {
        expr::parse(self, input)
    }
}

#[cfg(test)]
mod tests;
