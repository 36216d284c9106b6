//! Deciding Σ-homotopy equivalence from critical types, and minimality.
//!
//! Two Morse mappings on the same surface into the same target are
//! Σ-homotopic exactly when their critical types agree, so the decision
//! procedure is a field-by-field comparison. Boundary signs are compared
//! label by label.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::surface::{flip_target_orientation, validate_critical_type, CriticalType, CriticalTypeError, Sign, Surface, Target};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("critical types have different targets")]
    TargetMismatch,
    #[error("homotopy vectors have different lengths ({0} and {1})")]
    QLengthMismatch(usize, usize),
    #[error("boundary label sets differ")]
    LabelMismatch,
    #[error("operation needs a circle-valued type")]
    NeedsCircle,
    #[error("minimality of null-homotopic circle-valued maps reduces to the line-valued case")]
    NullHomotopicCircle,
    #[error(transparent)]
    Type(#[from] CriticalTypeError),
    #[error("malformed gluing data: {0}")]
    Gluing(String),
}

/// Outcome of comparing two critical types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub equivalent: bool,
    /// `"ok"`, or the first field that differs: `q`, `c0`, `c1`, `c2`, `eps`.
    pub reason: &'static str,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

fn comparable(k1: &CriticalType, k2: &CriticalType) -> Result<(), ClassifyError> {
    if k1.target != k2.target {
        return Err(ClassifyError::TargetMismatch);
    }
    if k1.q.len() != k2.q.len() {
        return Err(ClassifyError::QLengthMismatch(k1.q.len(), k2.q.len()));
    }
    if !k1.eps.labels().eq(k2.eps.labels()) {
        return Err(ClassifyError::LabelMismatch);
    }
    Ok(())
}

/// Compares two types field by field.
pub fn compare(k1: &CriticalType, k2: &CriticalType) -> Result<Verdict, ClassifyError> {
    comparable(k1, k2)?;
    let reason = if k1.q != k2.q {
        "q"
    } else if k1.c0 != k2.c0 {
        "c0"
    } else if k1.c1 != k2.c1 {
        "c1"
    } else if k1.c2 != k2.c2 {
        "c2"
    } else if k1.eps != k2.eps {
        "eps"
    } else {
        "ok"
    };
    Ok(Verdict { equivalent: reason == "ok", reason })
}

pub fn sigma_homotopy_equivalent(k1: &CriticalType, k2: &CriticalType) -> Result<bool, ClassifyError> {
    Ok(compare(k1, k2)?.equivalent)
}

/// Equivalence allowing the orientation of the target to be reversed.
pub fn equivalent_up_to_flip(k1: &CriticalType, k2: &CriticalType) -> Result<bool, ClassifyError> {
    Ok(sigma_homotopy_equivalent(k1, k2)? || sigma_homotopy_equivalent(k1, &flip_target_orientation(k2))?)
}

/// Least number of fiber components over a regular value among mappings of
/// this homotopy class: the index of the image of `H₁` in `H₁(S¹) = ℤ`, or 0
/// when the image is trivial.
pub fn minimal_fiber_count(k: &CriticalType) -> Result<u64, ClassifyError> {
    if k.target != Target::Circle {
        return Err(ClassifyError::NeedsCircle);
    }
    Ok(k.q.iter().fold(0i64, |acc, x| acc.gcd(x)).unsigned_abs())
}

/// Whether `k` has the fewest critical points among types on `s` with the
/// same boundary signs (and homotopy class).
pub fn is_minimal(s: &Surface, k: &CriticalType) -> Result<bool, ClassifyError> {
    validate_critical_type(s, k)?;
    match k.target {
        Target::Line => {
            let want = |count: usize| u64::from(count == 0);
            Ok(k.c0 == want(k.eps.negative_count()) && k.c2 == want(k.eps.positive_count()))
        }
        Target::Circle if k.is_null_homotopic() => Err(ClassifyError::NullHomotopicCircle),
        Target::Circle => Ok(k.c0 == 0 && k.c2 == 0),
    }
}

/// How a boundary circle of a half sits in the glued surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Lies on the level 0.
    B0,
    /// Lies on the level 1.
    B1,
    /// Lies on the middle level, shared with a half on the other side.
    Z,
    /// Any other boundary circle.
    Free,
}

/// One connected component of `f⁻¹[0, ½]` or `f⁻¹[½, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Half {
    pub surface: Surface,
    pub k: CriticalType,
    /// Role of each boundary label; unlisted labels are [`Role::Free`].
    pub roles: BTreeMap<String, Role>,
}

impl Half {
    fn labels_with(&self, role: Role) -> impl Iterator<Item = &str> {
        self.roles.iter().filter(move |(_, r)| **r == role).map(|(l, _)| l.as_str())
    }
}

/// A connected component of a line-valued map into `[0, 1]`, given as its
/// pieces below and above the middle level.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Component {
    pub lower: Vec<Half>,
    pub upper: Vec<Half>,
}

fn check_half(h: &Half, lower: bool) -> Result<(), ClassifyError> {
    let bad = |m: String| Err(ClassifyError::Gluing(m));
    if h.k.target != Target::Line {
        return bad("halves must be line-valued".into());
    }
    validate_critical_type(&h.surface, &h.k)?;
    for (label, role) in &h.roles {
        let Some(sign) = h.k.eps.get(label) else {
            return bad(format!("role given for unknown boundary label {label:?}"));
        };
        let expected = match (role, lower) {
            (Role::B0, true) => Sign::Negative,
            (Role::Z, true) => Sign::Positive,
            (Role::Z, false) => Sign::Negative,
            (Role::B1, false) => Sign::Positive,
            (Role::Free, _) => sign,
            (Role::B0, false) => return bad(format!("{label:?} is on level 0 but lies above the middle")),
            (Role::B1, true) => return bad(format!("{label:?} is on level 1 but lies below the middle")),
        };
        if sign != expected {
            return bad(format!("{label:?} has the wrong sign for its level"));
        }
    }
    Ok(())
}

/// Decides whether the glued map is minimal by checking the three gluing
/// hypotheses and minimality of every half: the levels 0, 1 and ½ are all
/// met, every component reaches level 0 or 1, the halves are minimal, and a
/// component crossing the middle reaches both 0 and 1.
pub fn is_minimal_composite(components: &[Component]) -> Result<bool, ClassifyError> {
    let mut seen = BTreeSet::new();
    for c in components {
        for h in &c.lower {
            check_half(h, true)?;
        }
        for h in &c.upper {
            check_half(h, false)?;
        }
        if c.lower.is_empty() && c.upper.is_empty() {
            return Err(ClassifyError::Gluing("empty component".into()));
        }
        let side = |halves: &[Half]| -> Result<BTreeSet<String>, ClassifyError> {
            let mut labels = BTreeSet::new();
            for (label, _) in halves.iter().flat_map(|h| h.roles.iter().filter(|(_, r)| **r != Role::Free)) {
                if !labels.insert(label.clone()) {
                    return Err(ClassifyError::Gluing(format!("label {label:?} used twice")));
                }
            }
            Ok(labels)
        };
        let (below, above) = (side(&c.lower)?, side(&c.upper)?);
        let z = |halves: &[Half]| -> BTreeSet<String> { halves.iter().flat_map(|h| h.labels_with(Role::Z)).map(String::from).collect() };
        let middle = z(&c.lower);
        if middle != z(&c.upper) || below.intersection(&above).cloned().collect::<BTreeSet<_>>() != middle {
            return Err(ClassifyError::Gluing("middle-level circles do not match up".into()));
        }
        for label in below.union(&above) {
            if !seen.insert(label.clone()) {
                return Err(ClassifyError::Gluing(format!("label {label:?} used in two components")));
            }
        }
    }

    let meets = |c: &Component, role: Role| c.lower.iter().chain(&c.upper).any(|h| h.labels_with(role).next().is_some());
    let any = |role: Role| components.iter().any(|c| meets(c, role));
    let hypothesis_1 = any(Role::B0) && any(Role::B1) && any(Role::Z) && components.iter().all(|c| meets(c, Role::B0) || meets(c, Role::B1));
    let hypothesis_3 = components.iter().filter(|c| meets(c, Role::Z)).all(|c| meets(c, Role::B0) && meets(c, Role::B1));
    let mut hypothesis_2 = true;
    for h in components.iter().flat_map(|c| c.lower.iter().chain(&c.upper)) {
        hypothesis_2 &= is_minimal(&h.surface, &h.k)?;
    }
    Ok(hypothesis_1 && hypothesis_2 && hypothesis_3)
}
