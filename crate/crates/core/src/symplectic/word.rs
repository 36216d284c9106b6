use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{SpMatrix, SymplecticError};

/// Named generators of `Sp(2g, Z)`, with 1-based indices.
///
/// `Mu` and `Eta` are symmetric in their indices and are kept with `i < j`
/// (use [`Generator::mu`] / [`Generator::eta`]); `Nu(i, j)` is ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `t_{α_i}`
    TAlpha(usize),
    /// `t_{β_i}`
    TBeta(usize),
    /// `μ_ij = t_{α_i} t_{α_j} t_{α_i+α_j}⁻¹`
    Mu(usize, usize),
    /// `η_ij = t_{β_i} t_{β_j} t_{β_i+β_j}⁻¹`
    Eta(usize, usize),
    /// `ν_ij = t_{α_i} t_{β_j} t_{α_i+β_j}⁻¹`
    Nu(usize, usize),
}

impl Generator {
    pub fn mu(i: usize, j: usize) -> Generator {
        Generator::Mu(i.min(j), i.max(j))
    }

    pub fn eta(i: usize, j: usize) -> Generator {
        Generator::Eta(i.min(j), i.max(j))
    }

    pub(crate) fn check(&self, genus: usize) -> Result<(), SymplecticError> {
        let in_range = |i: usize| (1..=genus).contains(&i);
        let ok = match *self {
            Generator::TAlpha(i) | Generator::TBeta(i) => in_range(i),
            Generator::Mu(i, j) | Generator::Eta(i, j) | Generator::Nu(i, j) => {
                if i == j {
                    return Err(SymplecticError::RepeatedIndex(self.to_string()));
                }
                in_range(i) && in_range(j)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SymplecticError::IndexOutOfRange { generator: self.to_string(), genus })
        }
    }

    /// Whether the generator lies in the generating set of the stabilizer of
    /// `α_1`: everything except `t_{β_1}`, `η_{1i}` and `ν_{i1}`.
    pub fn fixes_alpha1(&self) -> bool {
        !matches!(
            *self,
            Generator::TBeta(1) | Generator::Eta(1, _) | Generator::Eta(_, 1) | Generator::Nu(_, 1)
        )
    }

    /// Nonzero entries `(row, col, value)` of `G − I`, 0-based. Every generator
    /// is `I + N` with `N² = 0`, so `G^t = I + tN`, and the rows written by
    /// `N` are disjoint from the rows it reads.
    pub(crate) fn nilpotent_entries(&self, genus: usize) -> Vec<(usize, usize, i64)> {
        let g = genus;
        match *self {
            Generator::TAlpha(i) => vec![(i - 1, g + i - 1, 1)],
            Generator::TBeta(i) => vec![(g + i - 1, i - 1, -1)],
            Generator::Mu(i, j) => vec![(i - 1, g + j - 1, -1), (j - 1, g + i - 1, -1)],
            Generator::Eta(i, j) => vec![(g + i - 1, j - 1, 1), (g + j - 1, i - 1, 1)],
            Generator::Nu(i, j) => vec![(i - 1, j - 1, 1), (g + j - 1, g + i - 1, -1)],
        }
    }

    /// `m ← G^t · m` as row operations.
    pub(crate) fn left_apply(&self, t: &BigInt, m: &mut SpMatrix) {
        let n = m.dim();
        for (r, c, v) in self.nilpotent_entries(m.genus()) {
            let factor = t * v;
            for x in 0..n {
                let add = &factor * m.get(c, x);
                *m.get_mut(r, x) += add;
            }
        }
    }

    /// `m ← m · G^t` as column operations.
    pub(crate) fn right_apply(&self, t: &BigInt, m: &mut SpMatrix) {
        let n = m.dim();
        for (r, c, v) in self.nilpotent_entries(m.genus()) {
            let factor = t * v;
            for x in 0..n {
                let add = &factor * m.get(x, r);
                *m.get_mut(x, c) += add;
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::TAlpha(i) => write!(f, "Ta{i}"),
            Generator::TBeta(i) => write!(f, "Tb{i}"),
            Generator::Mu(i, j) => write!(f, "Mu{i},{j}"),
            Generator::Eta(i, j) => write!(f, "Eta{i},{j}"),
            Generator::Nu(i, j) => write!(f, "Nu{i},{j}"),
        }
    }
}

impl FromStr for Generator {
    type Err = SymplecticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SymplecticError::MalformedToken(s.to_string());
        let (name, rest) = ["Eta", "Mu", "Nu", "Ta", "Tb"]
            .iter()
            .find_map(|p| s.strip_prefix(p).map(|rest| (*p, rest)))
            .ok_or_else(bad)?;
        let index = |x: &str| x.parse::<usize>().map_err(|_| bad());
        match name {
            "Ta" | "Tb" => {
                let i = index(rest)?;
                Ok(if name == "Ta" { Generator::TAlpha(i) } else { Generator::TBeta(i) })
            }
            _ => {
                let (i, j) = rest.split_once(',').ok_or_else(bad)?;
                let (i, j) = (index(i)?, index(j)?);
                Ok(match name {
                    "Mu" => Generator::mu(i, j),
                    "Eta" => Generator::eta(i, j),
                    _ => Generator::Nu(i, j),
                })
            }
        }
    }
}

/// A product of generator powers, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GeneratorWord(Vec<(Generator, BigInt)>);

impl GeneratorWord {
    pub fn new() -> Self {
        GeneratorWord(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (Generator, i64)>) -> Self {
        let mut w = GeneratorWord::new();
        for (gen, e) in letters {
            w.push(gen, BigInt::from(e));
        }
        w
    }

    /// Appends `gen^exponent`, merging with an equal trailing generator and
    /// dropping zero exponents.
    pub fn push(&mut self, gen: Generator, exponent: BigInt) {
        if exponent.is_zero() {
            return;
        }
        if let Some((last, e)) = self.0.last_mut() {
            if *last == gen {
                *e += exponent;
                if e.is_zero() {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push((gen, exponent));
    }

    pub fn extend(&mut self, other: &GeneratorWord) {
        for (gen, e) in &other.0 {
            self.push(*gen, e.clone());
        }
    }

    pub fn letters(&self) -> &[(Generator, BigInt)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.0.iter().map(|(g, _)| *g)
    }

    /// The formal inverse: letters reversed with negated exponents.
    pub fn inverse(&self) -> GeneratorWord {
        let mut w = GeneratorWord::new();
        for (gen, e) in self.0.iter().rev() {
            w.push(*gen, -e);
        }
        w
    }

    /// Parses tokens like `Ta1^3 Nu2,3^-1` separated by whitespace.
    pub fn parse(text: &str) -> Result<Self, SymplecticError> {
        let mut w = GeneratorWord::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((name, exp)) => {
                    let e = BigInt::from_str(exp).map_err(|_| SymplecticError::MalformedToken(tok.to_string()))?;
                    if e.is_zero() {
                        return Err(SymplecticError::MalformedToken(tok.to_string()));
                    }
                    (name, e)
                }
                None => (tok, BigInt::one()),
            };
            let gen: Generator = name.parse().map_err(|_| SymplecticError::MalformedToken(tok.to_string()))?;
            w.0.push((gen, exp));
        }
        Ok(w)
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (gen, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if e.is_one() {
                write!(f, "{gen}")?;
            } else {
                write!(f, "{gen}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Left-to-right product of the generator powers in `word`.
pub fn evaluate(word: &GeneratorWord, genus: usize) -> Result<SpMatrix, SymplecticError> {
    let mut m = SpMatrix::identity(genus);
    for (gen, e) in word.letters() {
        gen.check(genus)?;
        gen.right_apply(e, &mut m);
    }
    Ok(m)
}
