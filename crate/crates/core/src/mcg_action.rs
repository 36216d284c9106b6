//! Mapping class group generators adapted to a canonical mapping, their
//! action on `H₁`, and homological admissibility.
//!
//! Homology lives in `ℤ^{2g}` with the `α_1..α_g, β_1..β_g` basis of the
//! symplectic module. A circle-valued mapping with homotopy vector `q`
//! (`q_i` = degree along the `i`-th basis curve) has level set class
//! `[L] = Ωq`, the unique class with `ω([L], c) = q·c`.
//!
//! Curves of the configuration used by [`canonical_generator_set`]:
//!
//! * `α_i`, `β_i` (`i = 1..g`): the meridian/longitude pairs, classes `α_i`, `β_i`;
//! * `γ_i` (`i = 1..g-1`): chain curves between consecutive handles, class `α_i − α_{i+1}`;
//! * `δ_j` (`j = 1..n-1`): curves parallel to `α_g` with `V_1..V_j` on one side, class `α_g`;
//! * `ε_j` (`j = 1..n-1`): curves cutting off `V_1..V_j`, class 0;
//! * `σ_ij`: the curve bounding a pair of pants with `V_i`, `V_j`, class 0.
//!
//! On non-orientable surfaces of genus `2r + 1` or `2r + 2` the handle curves
//! run over `i = 1..r` with `γ_r` joining the last handle to the crosscaps,
//! and even genus adds `β_0`, `δ_0` around the pair of crosscaps. No classes
//! are attached there.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::surface::{validate_critical_type, CriticalType, CriticalTypeError, Surface, Target};
use crate::symplectic::{carry_alpha1_to, evaluate, stabilizer_decompose, transvection, GeneratorWord, SpMatrix, SymplecticError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum McgError {
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("homology vectors need even length, got {0}")]
    OddLength(usize),
    #[error("circle-valued mappings on non-orientable surfaces are not supported")]
    Unsupported,
    #[error("homotopy vector is not primitive (gcd {0}); the level set class cannot be part of a basis")]
    NotPrimitive(u64),
    #[error("matrix does not fix the level set class")]
    DoesNotFixLevelClass,
    #[error(transparent)]
    Type(#[from] CriticalTypeError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// A homology class in `ℤ^{2g}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveClass {
    pub coords: Vec<BigInt>,
    /// Set when only the class up to sign is meaningful.
    pub unoriented: bool,
}

impl CurveClass {
    pub fn new(coords: Vec<BigInt>) -> Self {
        CurveClass { coords, unoriented: false }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        CurveClass::new(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(genus: usize) -> Self {
        CurveClass::new(vec![BigInt::zero(); 2 * genus])
    }

    fn basis(genus: usize, index: usize) -> Self {
        let mut c = CurveClass::zero(genus);
        c.coords[index] = BigInt::from(1);
        c
    }

    pub fn alpha(genus: usize, i: usize) -> Self {
        CurveClass::basis(genus, i - 1)
    }

    pub fn beta(genus: usize, i: usize) -> Self {
        CurveClass::basis(genus, genus + i - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn even(n: usize) -> Result<usize, McgError> {
    if n.is_multiple_of(2) {
        Ok(n / 2)
    } else {
        Err(McgError::OddLength(n))
    }
}

/// The class `[L] = (q_β; −q_α)` of a regular fiber.
pub fn level_set_class(q: &[i64]) -> Result<CurveClass, McgError> {
    let g = even(q.len())?;
    let coords = q[g..].iter().map(|&x| BigInt::from(x)).chain(q[..g].iter().map(|&x| -BigInt::from(x))).collect();
    Ok(CurveClass::new(coords))
}

/// Degree of the mapping restricted to a curve in the class `gamma`.
pub fn degree_along(q: &[i64], gamma: &CurveClass) -> Result<BigInt, McgError> {
    if q.len() != gamma.coords.len() {
        return Err(McgError::LengthMismatch { expected: q.len(), found: gamma.coords.len() });
    }
    Ok(q.iter().zip(&gamma.coords).map(|(&a, b)| BigInt::from(a) * b).sum())
}

/// Action of the Dehn twist along `gamma` on homology.
pub fn twist_action(gamma: &CurveClass) -> Result<SpMatrix, McgError> {
    even(gamma.coords.len())?;
    Ok(transvection(&gamma.coords)?)
}

/// Whether the twist along `gamma` keeps the mapping in its homotopy class:
/// the mapping must have degree 0 along `gamma`.
pub fn twist_admissible(q: &[i64], gamma: &CurveClass) -> Result<bool, McgError> {
    Ok(degree_along(q, gamma)?.is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveName {
    Alpha(usize),
    Beta(usize),
    Gamma(usize),
    Delta(usize),
    Epsilon(usize),
    Sigma(usize, usize),
}

impl fmt::Display for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveName::Alpha(i) => write!(f, "alpha_{i}"),
            CurveName::Beta(i) => write!(f, "beta_{i}"),
            CurveName::Gamma(i) => write!(f, "gamma_{i}"),
            CurveName::Delta(i) => write!(f, "delta_{i}"),
            CurveName::Epsilon(i) => write!(f, "epsilon_{i}"),
            CurveName::Sigma(i, j) => write!(f, "sigma_{i}_{j}"),
        }
    }
}

/// Which loop a boundary circle slides along on a non-orientable surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlideLoop {
    /// `ν_k`: the loop through the (first) crosscap pair.
    Nu,
    /// `ω_k`: the loop through the second crosscap pair, even genus only.
    Omega,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    DehnTwist { curve: CurveName, class: Option<CurveClass> },
    /// `b_ij`, `i < j`: swaps the boundary circles `V_i` and `V_j`.
    BoundaryPermutation { i: usize, j: usize },
    OrientationReversal,
    BoundarySlide { k: usize, along: SlideLoop },
    CrosscapSlide,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::DehnTwist { curve, .. } => write!(f, "t({curve})"),
            GeneratorKind::BoundaryPermutation { i, j } => write!(f, "b_{i}_{j}"),
            GeneratorKind::OrientationReversal => write!(f, "O"),
            GeneratorKind::BoundarySlide { k, along: SlideLoop::Nu } => write!(f, "nu_{k}"),
            GeneratorKind::BoundarySlide { k, along: SlideLoop::Omega } => write!(f, "omega_{k}"),
            GeneratorKind::CrosscapSlide => write!(f, "y"),
        }
    }
}

/// Whether a generator preserves the mapping up to Σ-homotopy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Admissible {
    Yes,
    No,
    /// Admissible because it factors through admissible generators, though
    /// the curve itself is not a level set.
    YesViaWord,
}

impl fmt::Display for Admissible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MCGGenerator {
    pub kind: GeneratorKind,
    pub admissible: Admissible,
}

impl MCGGenerator {
    fn yes(kind: GeneratorKind) -> Self {
        MCGGenerator { kind, admissible: Admissible::Yes }
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({ "generator": self.name(), "admissible": self.admissible.to_string() });
        if let GeneratorKind::DehnTwist { class: Some(c), .. } = &self.kind {
            v["class"] = serde_json::json!(c.coords.iter().map(ToString::to_string).collect::<Vec<_>>());
        }
        v
    }
}

fn twist(curve: CurveName, class: Option<CurveClass>) -> MCGGenerator {
    MCGGenerator::yes(GeneratorKind::DehnTwist { curve, class })
}

/// The configuration curves of an orientable surface of genus `g ≥ 1` with
/// `n` boundary circles, with their classes.
fn orientable_configuration(g: usize, n: usize) -> Vec<MCGGenerator> {
    let mut out = Vec::new();
    for i in 1..=g {
        out.push(twist(CurveName::Alpha(i), Some(CurveClass::alpha(g, i))));
    }
    for i in 1..=g {
        out.push(twist(CurveName::Beta(i), Some(CurveClass::beta(g, i))));
    }
    for i in 1..g {
        let mut c = CurveClass::alpha(g, i);
        c.coords[i] = BigInt::from(-1);
        out.push(twist(CurveName::Gamma(i), Some(c)));
    }
    for j in 1..n {
        out.push(twist(CurveName::Delta(j), Some(CurveClass::alpha(g, g))));
    }
    for j in 1..n {
        out.push(twist(CurveName::Epsilon(j), Some(CurveClass::zero(g))));
    }
    out
}

fn non_orientable_configuration(g: usize, n: usize) -> Vec<MCGGenerator> {
    let mut out = Vec::new();
    if g == 2 {
        out.push(twist(CurveName::Beta(0), None));
        return out;
    }
    let r = (g - 1) / 2;
    if r == 0 {
        return out;
    }
    for i in 1..=r {
        out.push(twist(CurveName::Alpha(i), None));
    }
    for i in 1..=r {
        out.push(twist(CurveName::Beta(i), None));
    }
    for i in 1..=r {
        out.push(twist(CurveName::Gamma(i), None));
    }
    for j in 1..n {
        out.push(twist(CurveName::Delta(j), None));
    }
    for j in 1..n {
        out.push(twist(CurveName::Epsilon(j), None));
    }
    if g.is_multiple_of(2) {
        out.push(twist(CurveName::Beta(0), None));
        out.push(twist(CurveName::Delta(0), None));
    }
    out
}

/// Generators of the mapping classes preserving the boundary sign sets,
/// adapted to the canonical mapping of type `k`, each flagged with its
/// admissibility.
///
/// Boundary circles are numbered `1..n` in the order of `s.boundary()`.
/// Swapping two circles of opposite sign is never admissible, so such a pair
/// contributes the twist `t(σ_ij) = b_ij²` instead of `b_ij`.
pub fn canonical_generator_set(s: &Surface, k: &CriticalType) -> Result<Vec<MCGGenerator>, McgError> {
    validate_critical_type(s, k)?;
    if k.target == Target::Circle && !s.is_orientable() {
        return Err(McgError::Unsupported);
    }
    let g = s.genus() as usize;
    let n = s.boundary_count();
    let mut out = Vec::new();
    if s.is_orientable() {
        out.push(MCGGenerator::yes(GeneratorKind::OrientationReversal));
        if g >= 1 {
            out.extend(orientable_configuration(g, n));
        }
        if k.target == Target::Circle && !k.is_null_homotopic() {
            // the fiber is α_1 and the mapping winds once along β_1
            for generator in &mut out {
                if matches!(generator.kind, GeneratorKind::DehnTwist { curve: CurveName::Beta(1), .. }) {
                    generator.admissible = Admissible::No;
                }
            }
        }
    } else {
        if g >= 2 {
            out.push(MCGGenerator::yes(GeneratorKind::CrosscapSlide));
        }
        out.extend(non_orientable_configuration(g, n));
        for k in 1..=n {
            out.push(MCGGenerator::yes(GeneratorKind::BoundarySlide { k, along: SlideLoop::Nu }));
        }
        if g >= 4 && g.is_multiple_of(2) {
            for k in 1..=n {
                out.push(MCGGenerator::yes(GeneratorKind::BoundarySlide { k, along: SlideLoop::Omega }));
            }
        }
    }

    let labels = s.boundary();
    // without extrema or other boundary, σ_12 is not a level set but its twist
    // is a product of configuration twists
    let bare_pair = k.c0 == 0 && k.c2 == 0 && n == 2;
    for i in 1..=n {
        for j in i + 1..=n {
            if k.eps.get(&labels[i - 1]) == k.eps.get(&labels[j - 1]) {
                out.push(MCGGenerator::yes(GeneratorKind::BoundaryPermutation { i, j }));
            } else {
                let class = s.is_orientable().then(|| CurveClass::zero(g));
                let admissible = if bare_pair { Admissible::YesViaWord } else { Admissible::Yes };
                out.push(MCGGenerator { kind: GeneratorKind::DehnTwist { curve: CurveName::Sigma(i, j), class }, admissible });
            }
        }
    }
    Ok(out)
}

/// `h = C · evaluate(word) · C⁻¹ · residual`, where `C` carries `α_1` to the
/// level set class and `word` avoids `t_{β_1}`, `η_{1i}`, `ν_{i1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerFactorization {
    /// Word for the basis change `C`.
    pub basis_change: GeneratorWord,
    pub basis_matrix: SpMatrix,
    /// Word for `C⁻¹ h C` in the adapted basis.
    pub word: GeneratorWord,
    /// `evaluate(word)⁻¹ · C⁻¹ h C`; acts trivially on homology.
    pub residual: SpMatrix,
}

impl StabilizerFactorization {
    /// Whether the part of `h` not covered by the word lies in the Torelli
    /// group, i.e. acts trivially on homology.
    pub fn is_torelli(&self) -> bool {
        self.residual.is_identity()
    }
}

/// Factors a symplectic `h` fixing the level set class of `q` into twists
/// that are admissible for a mapping with homotopy vector `q`.
pub fn factor_stabilizer(h: &SpMatrix, q: &[i64]) -> Result<StabilizerFactorization, McgError> {
    if q.len() != h.dim() {
        return Err(McgError::LengthMismatch { expected: h.dim(), found: q.len() });
    }
    let d = q.iter().fold(0i64, |acc, x| acc.gcd(x)).unsigned_abs();
    if d != 1 {
        return Err(McgError::NotPrimitive(d));
    }
    let level = level_set_class(q)?;
    if h.apply(&level.coords)? != level.coords {
        return Err(McgError::DoesNotFixLevelClass);
    }
    let genus = h.genus();
    let basis_change = carry_alpha1_to(&level.coords)?;
    let c = evaluate(&basis_change, genus)?;
    let adapted = &(&c.inverse() * h) * &c;
    let word = stabilizer_decompose(&adapted)?;
    let residual = &evaluate(&word, genus)?.inverse() * &adapted;
    Ok(StabilizerFactorization { basis_change, basis_matrix: c, word, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{BoundarySigns, Sign};
    use crate::symplectic::{named_generator, omega, Generator};

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn level_class_examples() {
        assert!(level_set_class(&[0, 0, 0, 0]).unwrap().is_zero());
        assert_eq!(level_set_class(&[0, 1]).unwrap(), CurveClass::alpha(1, 1));
        let q = [3, -1, 4, 2];
        let l = level_set_class(&q).unwrap();
        for c in [[1, 0, 0, 0], [0, 1, 0, 0], [2, -5, 7, 1]] {
            assert_eq!(omega(&l.coords, &v(&c)).unwrap(), degree_along(&q, &CurveClass::from_i64(&c)).unwrap());
        }
        assert_eq!(level_set_class(&[1, 2, 3]), Err(McgError::OddLength(3)));
    }

    #[test]
    fn degrees() {
        let q = [0, 1];
        assert!(degree_along(&q, &level_set_class(&q).unwrap()).unwrap().is_zero());
        assert_eq!(degree_along(&q, &CurveClass::beta(1, 1)).unwrap(), BigInt::from(1));
        assert!(degree_along(&[5, -3, 2, 9], &CurveClass::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn torus_twists() {
        let q = [0, 1];
        assert!(twist_admissible(&q, &CurveClass::zero(1)).unwrap());
        assert!(!twist_admissible(&q, &CurveClass::beta(1, 1)).unwrap());
        assert!(twist_admissible(&q, &CurveClass::alpha(1, 1)).unwrap());
        let t = twist_action(&CurveClass::alpha(1, 1)).unwrap();
        assert_eq!(t, named_generator(Generator::TAlpha(1), 1).unwrap());
    }

    fn closed(target: Target, q: Vec<i64>, c: (u64, u64, u64)) -> CriticalType {
        CriticalType { target, q, c0: c.0, c1: c.1, c2: c.2, eps: BoundarySigns::new() }
    }

    fn names(gens: &[MCGGenerator]) -> Vec<String> {
        gens.iter().map(MCGGenerator::name).collect()
    }

    #[test]
    fn sphere_with_two_holes() {
        let s = Surface::new(true, 0, ["V1", "V2"]).unwrap();
        let eps: BoundarySigns = [("V1", Sign::Positive), ("V2", Sign::Positive)].into_iter().collect();
        let k = CriticalType { target: Target::Line, q: vec![], c0: 1, c1: 1, c2: 0, eps };
        let gens = canonical_generator_set(&s, &k).unwrap();
        assert_eq!(names(&gens), ["O", "b_1_2"]);
        assert!(gens.iter().all(|g| g.admissible == Admissible::Yes));
    }

    #[test]
    fn annulus_pair_twist_is_admissible_via_word() {
        let s = Surface::new(true, 0, ["V1", "V2"]).unwrap();
        let eps: BoundarySigns = [("V1", Sign::Positive), ("V2", Sign::Negative)].into_iter().collect();
        let k = CriticalType { target: Target::Line, q: vec![], c0: 0, c1: 0, c2: 0, eps };
        let gens = canonical_generator_set(&s, &k).unwrap();
        assert_eq!(names(&gens), ["O", "t(sigma_1_2)"]);
        assert_eq!(gens[1].admissible, Admissible::YesViaWord);
    }

    #[test]
    fn klein_bottle_with_hole() {
        let s = Surface::new(false, 2, ["V1"]).unwrap();
        let eps: BoundarySigns = [("V1", Sign::Positive)].into_iter().collect();
        let k = CriticalType { target: Target::Line, q: vec![0], c0: 1, c1: 2, c2: 0, eps };
        let gens = canonical_generator_set(&s, &k).unwrap();
        assert_eq!(names(&gens), ["y", "t(beta_0)", "nu_1"]);
        assert!(gens.iter().all(|g| g.admissible == Admissible::Yes));
    }

    #[test]
    fn circle_flags_only_beta_1() {
        let s = Surface::orientable(2);
        let gens = canonical_generator_set(&s, &closed(Target::Circle, vec![0, 0, 1, 0], (0, 2, 0))).unwrap();
        let no: Vec<_> = gens.iter().filter(|g| g.admissible == Admissible::No).map(MCGGenerator::name).collect();
        assert_eq!(no, ["t(beta_1)"]);
        // the flags agree with the homological criterion for the fiber α_1
        for g in &gens {
            if let GeneratorKind::DehnTwist { class: Some(c), .. } = &g.kind {
                assert_eq!(twist_admissible(&[0, 0, 1, 0], c).unwrap(), g.admissible != Admissible::No);
            }
        }
        let s = Surface::non_orientable(3).unwrap();
        assert_eq!(canonical_generator_set(&s, &closed(Target::Circle, vec![1, 0], (0, 1, 0))), Err(McgError::Unsupported));
    }

    #[test]
    fn no_orientation_reversal_on_non_orientable() {
        for g in 1..7 {
            let s = Surface::new(false, g, ["a", "b"]).unwrap();
            let eps: BoundarySigns = [("a", Sign::Negative), ("b", Sign::Positive)].into_iter().collect();
            let k = CriticalType { target: Target::Line, q: vec![0; g as usize - 1], c0: 0, c1: g as u64, c2: 0, eps };
            let gens = canonical_generator_set(&s, &k).unwrap();
            assert!(!gens.iter().any(|x| x.kind == GeneratorKind::OrientationReversal));
        }
    }

    #[test]
    fn factor_examples() {
        let q = [0, 0, 1, 0];
        let f = factor_stabilizer(&SpMatrix::identity(2), &q).unwrap();
        assert!(f.word.is_empty() && f.basis_change.is_empty() && f.is_torelli());
        let t = named_generator(Generator::TAlpha(1), 2).unwrap();
        assert_eq!(factor_stabilizer(&t, &q).unwrap().word.to_string(), "Ta1");
        let tb = named_generator(Generator::TBeta(1), 2).unwrap();
        assert_eq!(factor_stabilizer(&tb, &q), Err(McgError::DoesNotFixLevelClass));
        assert_eq!(factor_stabilizer(&t, &[0, 0, 2, 0]), Err(McgError::NotPrimitive(2)));
    }

    #[test]
    fn factor_in_a_rotated_basis() {
        let q = [2, -3, 1, 5];
        let l = level_set_class(&q).unwrap();
        let h = &twist_action(&l).unwrap() * &twist_action(&CurveClass::from_i64(&[3, 2, 0, 0])).unwrap();
        // the second twist has degree 6 - 6 = 0 along q, so h fixes [L]
        let f = factor_stabilizer(&h, &q).unwrap();
        assert!(f.is_torelli());
        assert!(f.word.generators().all(|g| g.fixes_alpha1()));
        let rebuilt = &(&f.basis_matrix * &evaluate(&f.word, 2).unwrap()) * &f.basis_matrix.inverse();
        assert_eq!(rebuilt, h);
    }
}
