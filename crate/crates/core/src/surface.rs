//! Compact surfaces and the critical type of a Morse mapping on them.
//!
//! A [`Surface`] is described by orientability, genus and an ordered list of
//! boundary-circle labels. The [`CriticalType`] of a Morse mapping collects its
//! homotopy-class vector, the number of critical points of each index and the
//! sign of every boundary circle. Two validation identities tie the two
//! together: the Morse equality `c0 - c1 + c2 = χ(M)` and the rule that maps to
//! the line are null-homotopic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Target of a Morse mapping: the real line or the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    Line,
    Circle,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Line => f.write_str("Line"),
            Target::Circle => f.write_str("Circle"),
        }
    }
}

/// Sign of a boundary circle: positive when the mapping increases in the
/// outward direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("a non-orientable surface must have genus at least 1")]
    NonOrientableGenusZero,
    #[error("duplicate boundary label `{0}`")]
    DuplicateLabel(String),
    #[error("malformed surface description `{0}`; expected `orientable:<g>[:<label>,...]` or `nonorientable:<g>[:<label>,...]`")]
    Malformed(String),
}

/// A compact connected surface: orientability, genus and labelled boundary
/// circles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surface {
    orientable: bool,
    genus: u32,
    boundary: Vec<String>,
}

impl Surface {
    pub fn new<S: Into<String>>(
        orientable: bool,
        genus: u32,
        boundary: impl IntoIterator<Item = S>,
    ) -> Result<Self, SurfaceError> {
        if !orientable && genus == 0 {
            return Err(SurfaceError::NonOrientableGenusZero);
        }
        let boundary: Vec<String> = boundary.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for label in &boundary {
            if !seen.insert(label.as_str()) {
                return Err(SurfaceError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Surface { orientable, genus, boundary })
    }

    pub fn orientable(genus: u32) -> Self {
        Surface { orientable: true, genus, boundary: Vec::new() }
    }

    pub fn non_orientable(genus: u32) -> Result<Self, SurfaceError> {
        Surface::new(false, genus, Vec::<String>::new())
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn boundary(&self) -> &[String] {
        &self.boundary
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(self)
    }

    /// Rank of `H¹` of the closed surface obtained by collapsing every
    /// boundary circle to a point: `2g` when orientable, `g - 1` otherwise.
    pub fn rank(&self) -> usize {
        if self.orientable {
            2 * self.genus as usize
        } else {
            self.genus as usize - 1
        }
    }

    /// The same surface with one more boundary circle.
    pub fn with_boundary(&self, label: impl Into<String>) -> Result<Self, SurfaceError> {
        let mut boundary = self.boundary.clone();
        boundary.push(label.into());
        Surface::new(self.orientable, self.genus, boundary)
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.orientable { "orientable" } else { "non-orientable" };
        write!(f, "{kind} genus {} with {} boundary circle(s)", self.genus, self.boundary.len())
    }
}

/// Parses `orientable:<g>` or `nonorientable:<g>`, optionally followed by
/// `:<label>,<label>,...` listing the boundary circles in order.
impl FromStr for Surface {
    type Err = SurfaceError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || SurfaceError::Malformed(text.to_string());
        let mut parts = text.trim().splitn(3, ':');
        let orientable = match parts.next() {
            Some("orientable") => true,
            Some("nonorientable") => false,
            _ => return Err(malformed()),
        };
        let genus = parts.next().and_then(|g| g.parse().ok()).ok_or_else(malformed)?;
        let labels: Vec<&str> = match parts.next() {
            Some(list) => list.split(',').collect(),
            None => Vec::new(),
        };
        if labels.iter().any(|l| l.is_empty()) {
            return Err(malformed());
        }
        Surface::new(orientable, genus, labels)
    }
}

/// Euler characteristic `2 - 2g - b` (orientable) or `2 - g - b`.
pub fn euler_characteristic(s: &Surface) -> i64 {
    let g = i64::from(s.genus);
    let b = s.boundary.len() as i64;
    if s.orientable {
        2 - 2 * g - b
    } else {
        2 - g - b
    }
}

/// Signs of the boundary circles, keyed by label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundarySigns(BTreeMap<String, Sign>);

impl BoundarySigns {
    pub fn new() -> Self {
        BoundarySigns(BTreeMap::new())
    }

    pub fn insert(&mut self, label: impl Into<String>, sign: Sign) -> Option<Sign> {
        self.0.insert(label.into(), sign)
    }

    pub fn get(&self, label: &str) -> Option<Sign> {
        self.0.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Sign)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Number of positive circles.
    pub fn positive_count(&self) -> usize {
        self.0.values().filter(|s| **s == Sign::Positive).count()
    }

    /// Number of negative circles.
    pub fn negative_count(&self) -> usize {
        self.0.values().filter(|s| **s == Sign::Negative).count()
    }

    pub fn negated(&self) -> Self {
        BoundarySigns(self.0.iter().map(|(k, v)| (k.clone(), -*v)).collect())
    }

    /// Labels present in exactly one of `self` and `labels`, as
    /// `(missing_from_self, extra_in_self)`.
    fn label_difference<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> (Vec<String>, Vec<String>) {
        let expected: BTreeSet<&str> = labels.into_iter().collect();
        let actual: BTreeSet<&str> = self.labels().collect();
        let missing = expected.difference(&actual).map(|s| s.to_string()).collect();
        let extra = actual.difference(&expected).map(|s| s.to_string()).collect();
        (missing, extra)
    }
}

impl<S: Into<String>> FromIterator<(S, Sign)> for BoundarySigns {
    fn from_iter<I: IntoIterator<Item = (S, Sign)>>(iter: I) -> Self {
        BoundarySigns(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// The complete invariant of a Morse mapping up to homotopy through Morse
/// mappings.
///
/// Serialized as a single-line JSON object with keys in the order
/// `target`, `q`, `c0`, `c1`, `c2`, `eps`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CriticalType {
    pub target: Target,
    pub q: Vec<i64>,
    pub c0: u64,
    pub c1: u64,
    pub c2: u64,
    pub eps: BoundarySigns,
}

impl CriticalType {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("critical type serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s.trim())
    }

    /// `c0 - c1 + c2`.
    pub fn alternating_count(&self) -> i64 {
        self.c0 as i64 - self.c1 as i64 + self.c2 as i64
    }

    pub fn total_critical(&self) -> u64 {
        self.c0 + self.c1 + self.c2
    }

    pub fn is_null_homotopic(&self) -> bool {
        self.q.iter().all(|x| *x == 0)
    }
}

/// A single violated identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `q` does not have the rank of `H¹`.
    QLength { expected: usize, found: usize },
    /// A map to the line must have the zero homotopy vector.
    NonZeroQOnLine,
    /// `c0 - c1 + c2` differs from the Euler characteristic.
    MorseEquality { alternating: i64, euler: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::QLength { expected, found } => {
                write!(f, "homotopy vector q has length {found}, expected r = {expected}")
            }
            Violation::NonZeroQOnLine => f.write_str("homotopy vector q must be zero for a Line target"),
            Violation::MorseEquality { alternating, euler } => {
                write!(f, "Morse equality fails: c0 - c1 + c2 = {alternating} but χ = {euler}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CriticalTypeError {
    #[error("boundary labels of eps do not match the surface (missing: {missing:?}, extra: {extra:?})")]
    BoundaryMismatch { missing: Vec<String>, extra: Vec<String> },
    #[error("invalid critical type: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Violations(Vec<Violation>),
}

/// Checks that `k` can be the critical type of a Morse mapping on `s`.
pub fn validate_critical_type(s: &Surface, k: &CriticalType) -> Result<(), CriticalTypeError> {
    let (missing, extra) = k.eps.label_difference(s.boundary().iter().map(String::as_str));
    if !missing.is_empty() || !extra.is_empty() {
        return Err(CriticalTypeError::BoundaryMismatch { missing, extra });
    }

    let mut violations = Vec::new();
    let r = s.rank();
    if k.q.len() != r {
        violations.push(Violation::QLength { expected: r, found: k.q.len() });
    }
    if k.target == Target::Line && !k.is_null_homotopic() {
        violations.push(Violation::NonZeroQOnLine);
    }
    let euler = s.euler_characteristic();
    let alternating = k.alternating_count();
    if alternating != euler {
        violations.push(Violation::MorseEquality { alternating, euler });
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(CriticalTypeError::Violations(violations))
    }
}

/// Critical type of the same mapping after reversing the orientation of the
/// target: `c0` and `c2` swap, every `q_i` and every boundary sign flips.
pub fn flip_target_orientation(k: &CriticalType) -> CriticalType {
    CriticalType {
        target: k.target,
        q: k.q.iter().map(|x| -x).collect(),
        c0: k.c2,
        c1: k.c1,
        c2: k.c0,
        eps: k.eps.negated(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn surface_descriptions() {
        let s: Surface = "orientable:2:V1,V2".parse().unwrap();
        assert_eq!(s, Surface::new(true, 2, ["V1", "V2"]).unwrap());
        assert_eq!("nonorientable:3".parse::<Surface>().unwrap(), Surface::non_orientable(3).unwrap());
        assert!(matches!("orientable".parse::<Surface>(), Err(SurfaceError::Malformed(_))));
        assert!(matches!("torus:1".parse::<Surface>(), Err(SurfaceError::Malformed(_))));
        assert!(matches!("orientable:1:a,".parse::<Surface>(), Err(SurfaceError::Malformed(_))));
        assert_eq!("nonorientable:0".parse::<Surface>(), Err(SurfaceError::NonOrientableGenusZero));
    }

    fn ktype(target: Target, q: &[i64], c: (u64, u64, u64), eps: &[(&str, Sign)]) -> CriticalType {
        CriticalType {
            target,
            q: q.to_vec(),
            c0: c.0,
            c1: c.1,
            c2: c.2,
            eps: eps.iter().map(|(l, s)| (*l, *s)).collect(),
        }
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(euler_characteristic(&Surface::orientable(0)), 2);
        assert_eq!(euler_characteristic(&Surface::orientable(1)), 0);
        let s = Surface::new(false, 2, ["V1"]).unwrap();
        assert_eq!(euler_characteristic(&s), -1);
    }

    #[test]
    fn rank_of_cohomology() {
        assert_eq!(Surface::orientable(3).rank(), 6);
        assert_eq!(Surface::non_orientable(1).unwrap().rank(), 0);
        assert_eq!(Surface::non_orientable(4).unwrap().rank(), 3);
    }

    #[test]
    fn surface_rejects_bad_descriptors() {
        assert_eq!(Surface::new(false, 0, Vec::<String>::new()), Err(SurfaceError::NonOrientableGenusZero));
        assert_eq!(Surface::new(true, 0, ["a", "a"]), Err(SurfaceError::DuplicateLabel("a".into())));
    }

    #[test]
    fn torus_line_type_needs_zero_vector_of_rank_length() {
        let torus = Surface::orientable(1);
        let short = ktype(Target::Line, &[], (1, 2, 1), &[]);
        match validate_critical_type(&torus, &short) {
            Err(CriticalTypeError::Violations(v)) => {
                assert_eq!(v, vec![Violation::QLength { expected: 2, found: 0 }])
            }
            other => panic!("unexpected {other:?}"),
        }
        let ok = ktype(Target::Line, &[0, 0], (1, 2, 1), &[]);
        assert_eq!(validate_critical_type(&torus, &ok), Ok(()));
        let nonzero = ktype(Target::Line, &[1, 0], (1, 2, 1), &[]);
        assert_eq!(
            validate_critical_type(&torus, &nonzero),
            Err(CriticalTypeError::Violations(vec![Violation::NonZeroQOnLine]))
        );
    }

    #[test]
    fn sphere_height_function_is_valid() {
        let k = ktype(Target::Line, &[], (1, 0, 1), &[]);
        assert_eq!(validate_critical_type(&Surface::orientable(0), &k), Ok(()));
    }

    #[test]
    fn genus_two_circle_type_is_valid() {
        let k = ktype(Target::Circle, &[1, 0, 0, 0], (0, 2, 0), &[]);
        assert_eq!(validate_critical_type(&Surface::orientable(2), &k), Ok(()));
    }

    #[test]
    fn morse_equality_violation_is_reported() {
        // the printed variant c0 + c1 - c2 would accept this one
        let k = ktype(Target::Line, &[0, 0], (1, 1, 2), &[]);
        assert_eq!(
            validate_critical_type(&Surface::orientable(1), &k),
            Err(CriticalTypeError::Violations(vec![Violation::MorseEquality { alternating: 2, euler: 0 }]))
        );
    }

    #[test]
    fn mismatched_labels_are_a_distinct_error() {
        let s = Surface::new(true, 0, ["V1"]).unwrap();
        let k = ktype(Target::Line, &[], (1, 0, 0), &[("V2", Sign::Positive)]);
        assert_eq!(
            validate_critical_type(&s, &k),
            Err(CriticalTypeError::BoundaryMismatch { missing: vec!["V1".into()], extra: vec!["V2".into()] })
        );
    }

    #[test]
    fn flip_example() {
        let k = ktype(Target::Circle, &[1], (0, 3, 1), &[("V1", Sign::Positive)]);
        let flipped = flip_target_orientation(&k);
        assert_eq!(flipped, ktype(Target::Circle, &[-1], (1, 3, 0), &[("V1", Sign::Negative)]));
    }

    #[test]
    fn symmetric_type_is_a_fixed_point() {
        let k = ktype(Target::Line, &[0, 0], (2, 4, 2), &[]);
        assert_eq!(flip_target_orientation(&k), k);
    }

    #[test]
    fn json_layout() {
        let k = ktype(Target::Line, &[], (1, 0, 1), &[]);
        assert_eq!(k.to_json(), r#"{"target":"Line","q":[],"c0":1,"c1":0,"c2":1,"eps":{}}"#);
        let k = ktype(Target::Circle, &[1, -2], (0, 1, 1), &[("b", Sign::Negative), ("a", Sign::Positive)]);
        assert_eq!(k.to_json(), r#"{"target":"Circle","q":[1,-2],"c0":0,"c1":1,"c2":1,"eps":{"a":1,"b":-1}}"#);
        assert_eq!(CriticalType::from_json(&k.to_json()).unwrap(), k);
        assert!(CriticalType::from_json(r#"{"target":"Line","q":[],"c0":1,"c1":0,"c2":1,"eps":{"a":0}}"#).is_err());
    }

    fn arb_type() -> impl Strategy<Value = (Surface, CriticalType)> {
        (any::<bool>(), 0u32..4, 0usize..4, prop::bool::ANY).prop_flat_map(|(orientable, genus, b, circle)| {
            let genus = if orientable { genus } else { genus + 1 };
            let labels: Vec<String> = (0..b).map(|i| format!("V{i}")).collect();
            let s = Surface::new(orientable, genus, labels.clone()).unwrap();
            let r = s.rank();
            let target = if circle { Target::Circle } else { Target::Line };
            (
                Just(s),
                prop::collection::vec(-3i64..=3, r),
                0u64..4,
                0u64..12,
                0u64..4,
                prop::collection::vec(any::<bool>(), b),
                Just(target),
            )
                .prop_map(move |(s, q, c0, c1, c2, signs, target)| {
                    let q = if target == Target::Line { vec![0; q.len()] } else { q };
                    let eps = labels
                        .iter()
                        .zip(signs)
                        .map(|(l, p)| (l.clone(), if p { Sign::Positive } else { Sign::Negative }))
                        .collect();
                    (s, CriticalType { target, q, c0, c1, c2, eps })
                })
        })
    }

    proptest! {
        #[test]
        fn flip_is_an_involution((_s, k) in arb_type()) {
            prop_assert_eq!(flip_target_orientation(&flip_target_orientation(&k)), k);
        }

        #[test]
        fn validation_is_flip_invariant((s, k) in arb_type()) {
            let flipped = flip_target_orientation(&k);
            prop_assert_eq!(validate_critical_type(&s, &k).is_ok(), validate_critical_type(&s, &flipped).is_ok());
        }

        #[test]
        fn adding_a_boundary_circle_lowers_euler_characteristic(orientable in any::<bool>(), genus in 0u32..6, b in 0usize..5) {
            let genus = if orientable { genus } else { genus + 1 };
            let s = Surface::new(orientable, genus, (0..b).map(|i| format!("V{i}"))).unwrap();
            let t = s.with_boundary("extra").unwrap();
            prop_assert_eq!(t.euler_characteristic(), s.euler_characteristic() - 1);
        }
    }
}
