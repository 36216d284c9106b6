//! The integer symplectic group `Sp(2g, Z)`.
//!
//! Coordinates are ordered `α_1..α_g, β_1..β_g`, vectors are columns and
//! matrices act on the left, so `p ∘ q` is the matrix product `p * q` (apply
//! `q` first). The form is `ω(x, y) = xᵀ Ω y` with `Ω = [[0, I], [-I, 0]]`,
//! giving `ω(α_i, β_i) = 1`.
//!
//! All arithmetic is exact over [`BigInt`].

mod decompose;
mod word;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use decompose::{carry_alpha1_to, factor_symplectic, general_sp_factor, stabilizer_decompose};
pub use word::{evaluate, Generator, GeneratorWord};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("matrix does not fix α_1")]
    DoesNotFixAlpha1,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("matrix is not the identity on the symplectic pairs below index {0}")]
    NotInSubgroup(usize),
    #[error("generator index out of range for genus {genus}: {generator}")]
    IndexOutOfRange { generator: String, genus: usize },
    #[error("generator needs two distinct indices: {0}")]
    RepeatedIndex(String),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("malformed word token `{0}`")]
    MalformedToken(String),
}

/// Symplectic form `ω(x, y) = Σ x_{α_i} y_{β_i} − x_{β_i} y_{α_i}`.
pub fn omega(x: &[BigInt], y: &[BigInt]) -> Result<BigInt, SymplecticError> {
    if x.len() != y.len() {
        return Err(SymplecticError::LengthMismatch { expected: x.len(), found: y.len() });
    }
    if !x.len().is_multiple_of(2) {
        return Err(SymplecticError::LengthMismatch { expected: x.len() + 1, found: x.len() });
    }
    let g = x.len() / 2;
    let mut acc = BigInt::zero();
    for i in 0..g {
        acc += &x[i] * &y[g + i];
        acc -= &x[g + i] * &y[i];
    }
    Ok(acc)
}

/// A `2g × 2g` integer matrix preserving `ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpMatrix {
    genus: usize,
    // row-major, n = 2g
    entries: Vec<BigInt>,
}

impl SpMatrix {
    pub fn identity(genus: usize) -> Self {
        let n = 2 * genus;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        SpMatrix { genus, entries }
    }

    /// Builds a matrix from rows, checking the symplectic condition.
    pub fn from_rows(genus: usize, rows: Vec<Vec<BigInt>>) -> Result<Self, SymplecticError> {
        let n = 2 * genus;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(SymplecticError::MalformedMatrix(format!("expected {n} rows of {n} entries")));
        }
        let m = SpMatrix { genus, entries: rows.into_iter().flatten().collect() };
        if !m.preserves_form() {
            return Err(SymplecticError::NotSymplectic);
        }
        Ok(m)
    }

    pub fn from_i64_rows(genus: usize, rows: &[&[i64]]) -> Result<Self, SymplecticError> {
        SpMatrix::from_rows(genus, rows.iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim() + col]
    }

    pub(crate) fn get_mut(&mut self, row: usize, col: usize) -> &mut BigInt {
        let n = self.dim();
        &mut self.entries[row * n + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.dim().max(1))
    }

    pub fn column(&self, col: usize) -> Vec<BigInt> {
        (0..self.dim()).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == SpMatrix::identity(self.genus)
    }

    /// Checks `MᵀΩM = Ω` entrywise.
    pub fn preserves_form(&self) -> bool {
        let n = self.dim();
        let cols: Vec<Vec<BigInt>> = (0..n).map(|c| self.column(c)).collect();
        for i in 0..n {
            for j in 0..n {
                let expected = omega_basis(self.genus, i, j);
                if omega(&cols[i], &cols[j]).expect("equal lengths") != BigInt::from(expected) {
                    return false;
                }
            }
        }
        true
    }

    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>, SymplecticError> {
        let n = self.dim();
        if x.len() != n {
            return Err(SymplecticError::LengthMismatch { expected: n, found: x.len() });
        }
        Ok(self.rows().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    /// Inverse via `M⁻¹ = -Ω Mᵀ Ω`, exact for symplectic matrices.
    pub fn inverse(&self) -> SpMatrix {
        let g = self.genus;
        let n = self.dim();
        // Ω pairs coordinate k with k ± g; the result is a signed transpose
        // with the α and β halves exchanged.
        let partner = |k: usize| if k < g { k + g } else { k - g };
        let side = |k: usize| k < g;
        let mut out = SpMatrix::identity(g);
        for r in 0..n {
            for c in 0..n {
                let v = self.get(partner(c), partner(r)).clone();
                *out.get_mut(r, c) = if side(r) == side(c) { v } else { -v };
            }
        }
        out
    }

    pub fn pow(&self, exponent: i64) -> SpMatrix {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut e = exponent.unsigned_abs();
        let mut acc = SpMatrix::identity(self.genus);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        acc
    }

    /// Largest absolute entry, useful for reporting growth.
    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// Parses the `SP <g>` text format: a header line followed by `2g` rows of
    /// space-separated decimal integers.
    pub fn parse(text: &str) -> Result<Self, SymplecticError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| SymplecticError::MalformedMatrix("empty input".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("SP") {
            return Err(SymplecticError::MalformedMatrix(format!("expected `SP <g>` header, got `{header}`")));
        }
        let genus: usize = parts
            .next()
            .and_then(|g| g.parse().ok())
            .ok_or_else(|| SymplecticError::MalformedMatrix(format!("bad genus in header `{header}`")))?;
        if parts.next().is_some() {
            return Err(SymplecticError::MalformedMatrix(format!("trailing tokens in header `{header}`")));
        }
        let rows = lines
            .map(|line| {
                line.split_whitespace()
                    .map(|tok| {
                        BigInt::from_str(tok)
                            .map_err(|_| SymplecticError::MalformedMatrix(format!("bad integer `{tok}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        SpMatrix::from_rows(genus, rows)
    }
}

impl fmt::Display for SpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SP {}", self.genus)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl std::ops::Mul<&SpMatrix> for &SpMatrix {
    type Output = SpMatrix;

    fn mul(self, rhs: &SpMatrix) -> SpMatrix {
        assert_eq!(self.genus, rhs.genus, "genus mismatch in product");
        let n = self.dim();
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out[i * n + j] += a * b;
                    }
                }
            }
        }
        SpMatrix { genus: self.genus, entries: out }
    }
}

/// `ω(e_i, e_j)` for coordinate vectors.
fn omega_basis(genus: usize, i: usize, j: usize) -> i64 {
    if i < genus && j == i + genus {
        1
    } else if i >= genus && j + genus == i {
        -1
    } else {
        0
    }
}

/// Matrix of the transvection `x ↦ ω(γ, x)·γ + x`.
pub fn transvection(gamma: &[BigInt]) -> Result<SpMatrix, SymplecticError> {
    rank_one_update(gamma, false)
}

/// Inverse transvection `x ↦ −ω(γ, x)·γ + x`.
pub fn inverse_transvection(gamma: &[BigInt]) -> Result<SpMatrix, SymplecticError> {
    rank_one_update(gamma, true)
}

// I ± γ (γᵀΩ)
fn rank_one_update(gamma: &[BigInt], negate: bool) -> Result<SpMatrix, SymplecticError> {
    if !gamma.len().is_multiple_of(2) {
        return Err(SymplecticError::LengthMismatch { expected: gamma.len() + 1, found: gamma.len() });
    }
    let g = gamma.len() / 2;
    let n = gamma.len();
    let covector: Vec<BigInt> = (0..n)
        .map(|c| {
            let x = if c < g { -&gamma[g + c] } else { gamma[c - g].clone() };
            if negate {
                -x
            } else {
                x
            }
        })
        .collect();
    let mut m = SpMatrix::identity(g);
    for (r, gr) in gamma.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (c, w) in covector.iter().enumerate() {
            *m.get_mut(r, c) += gr * w;
        }
    }
    Ok(m)
}

/// Standard basis vector `α_i` (1-based) in `Z^{2g}`.
pub fn alpha(genus: usize, i: usize) -> Vec<BigInt> {
    unit(2 * genus, i - 1)
}

/// Standard basis vector `β_i` (1-based) in `Z^{2g}`.
pub fn beta(genus: usize, i: usize) -> Vec<BigInt> {
    unit(2 * genus, genus + i - 1)
}

fn unit(n: usize, k: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[k] = BigInt::one();
    v
}

/// Closed-form matrix of a named generator.
pub fn named_generator(generator: Generator, genus: usize) -> Result<SpMatrix, SymplecticError> {
    generator.check(genus)?;
    let mut m = SpMatrix::identity(genus);
    for (r, c, v) in generator.nilpotent_entries(genus) {
        *m.get_mut(r, c) += v;
    }
    Ok(m)
}
