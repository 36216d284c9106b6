//! Factoring symplectic matrices into named generators.
//!
//! Both entry points run the same elimination: left-multiply the input by
//! generator powers until it becomes the identity, recording each step. If
//! `G_k ⋯ G_1 · h = I` then `h = G_1⁻¹ ⋯ G_k⁻¹`, which is the returned word.
//!
//! Pair `k` is cleared in two stages. First the column `h(α_k)` is carried to
//! `α_k`: Euclid on each `(a_i, b_i)` with `t_{α_i}`/`t_{β_i}` powers kills the
//! β-coordinates, then Euclid between `a_k` and `a_i` with `ν_{ki}`/`ν_{ik}`
//! gathers the gcd (which is ±1) into `a_k`. Then, with `α_k` fixed,
//! `h(β_k) = a_kα_k + β_k + Σ_{j>k} (a_jα_j + b_jβ_j)` is carried to `β_k` by
//! `t_{α_k}^{-a'} ∏ν_{kj}^{b_j} ∏μ_{ki}^{a_i}` with `a' = a_k − Σ a_j b_j`.
//! What remains is the identity on the pair and acts on the orthogonal
//! complement, so the procedure recurses on `k + 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Generator, GeneratorWord, SpMatrix, SymplecticError};

struct Eliminator {
    current: SpMatrix,
    applied: Vec<(Generator, BigInt)>,
}

impl Eliminator {
    fn new(h: &SpMatrix) -> Self {
        Eliminator { current: h.clone(), applied: Vec::new() }
    }

    fn genus(&self) -> usize {
        self.current.genus()
    }

    fn apply(&mut self, gen: Generator, t: BigInt) {
        if t.is_zero() {
            return;
        }
        gen.left_apply(&t, &mut self.current);
        self.applied.push((gen, t));
    }

    // coordinates of the column h(α_k) / h(β_k), 1-based pair index
    fn a(&self, col: usize, i: usize) -> BigInt {
        self.current.get(i - 1, col).clone()
    }

    fn b(&self, col: usize, i: usize) -> BigInt {
        self.current.get(self.genus() + i - 1, col).clone()
    }

    /// Uses `t_{α_i}`, `t_{β_i}` to make the β_i-coordinate of column `col` zero.
    fn clear_beta(&mut self, col: usize, i: usize) {
        loop {
            let (a, b) = (self.a(col, i), self.b(col, i));
            if b.is_zero() {
                return;
            }
            if a.is_zero() {
                // (0, b) → (b, b) → (b, 0)
                self.apply(Generator::TAlpha(i), BigInt::one());
                self.apply(Generator::TBeta(i), BigInt::one());
                return;
            }
            if a.abs() <= b.abs() {
                // b ← b mod a
                self.apply(Generator::TBeta(i), b.div_floor(&a));
            } else {
                // a ← a mod b
                self.apply(Generator::TAlpha(i), -a.div_floor(&b));
            }
        }
    }

    /// Uses `ν_{ki}`, `ν_{ik}` to move the α_i-coordinate of column `col` into
    /// the α_k-coordinate. All β-coordinates must already be zero.
    fn gather_alpha(&mut self, col: usize, k: usize, i: usize) {
        loop {
            let ai = self.a(col, i);
            if ai.is_zero() {
                return;
            }
            if self.a(col, k).is_zero() {
                self.apply(Generator::Nu(k, i), BigInt::one());
            }
            // a_i ← a_i mod a_k
            let q = ai.div_floor(&self.a(col, k));
            self.apply(Generator::Nu(i, k), -q);
            let ai = self.a(col, i);
            if ai.is_zero() {
                return;
            }
            // a_k ← a_k mod a_i
            let q = self.a(col, k).div_floor(&ai);
            self.apply(Generator::Nu(k, i), -q);
        }
    }

    /// Carries the column `h(α_k)` to `α_k` using generators with indices ≥ k.
    fn fix_alpha(&mut self, k: usize) -> Result<(), SymplecticError> {
        let g = self.genus();
        let col = k - 1;
        for i in k..=g {
            self.clear_beta(col, i);
        }
        for i in k + 1..=g {
            self.gather_alpha(col, k, i);
        }
        let ak = self.a(col, k);
        if ak == -BigInt::one() {
            // (t_α t_β t_α)² = −I on the pair
            for _ in 0..2 {
                self.apply(Generator::TAlpha(k), BigInt::one());
                self.apply(Generator::TBeta(k), BigInt::one());
                self.apply(Generator::TAlpha(k), BigInt::one());
            }
        } else if !ak.is_one() {
            // a primitive column of a unimodular matrix has gcd 1
            return Err(SymplecticError::NotSymplectic);
        }
        Ok(())
    }

    /// With `α_k` fixed, carries `h(β_k)` to `β_k`.
    fn fix_beta(&mut self, k: usize) -> Result<(), SymplecticError> {
        let g = self.genus();
        let col = g + k - 1;
        if !self.b(col, k).is_one() {
            return Err(SymplecticError::NotSymplectic);
        }
        let a: Vec<BigInt> = (1..=g).map(|i| self.a(col, i)).collect();
        let b: Vec<BigInt> = (1..=g).map(|i| self.b(col, i)).collect();
        let mut a_prime = a[k - 1].clone();
        for j in k + 1..=g {
            a_prime -= &a[j - 1] * &b[j - 1];
        }
        for i in k + 1..=g {
            self.apply(Generator::mu(k, i), a[i - 1].clone());
        }
        for j in k + 1..=g {
            self.apply(Generator::Nu(k, j), b[j - 1].clone());
        }
        self.apply(Generator::TAlpha(k), -a_prime);
        debug_assert!(self.pair_is_identity(k));
        Ok(())
    }

    fn pair_is_identity(&self, k: usize) -> bool {
        let g = self.genus();
        let n = 2 * g;
        [k - 1, g + k - 1].iter().all(|&c| {
            (0..n).all(|r| {
                let expected = if r == c { BigInt::one() } else { BigInt::zero() };
                *self.current.get(r, c) == expected && *self.current.get(c, r) == expected
            })
        })
    }

    fn into_word(self) -> GeneratorWord {
        let mut w = GeneratorWord::new();
        for (gen, t) in self.applied {
            w.push(gen, -t);
        }
        w
    }
}

fn fixes_alpha1(h: &SpMatrix) -> bool {
    let n = h.dim();
    (0..n).all(|r| *h.get(r, 0) == if r == 0 { BigInt::one() } else { BigInt::zero() })
}

/// Factors `h` in the stabilizer of `α_1` into generators other than
/// `t_{β_1}`, `η_{1i}` and `ν_{i1}`.
pub fn stabilizer_decompose(h: &SpMatrix) -> Result<GeneratorWord, SymplecticError> {
    if !h.preserves_form() {
        return Err(SymplecticError::NotSymplectic);
    }
    if h.genus() == 0 || !fixes_alpha1(h) {
        return Err(SymplecticError::DoesNotFixAlpha1);
    }
    let mut elim = Eliminator::new(h);
    elim.fix_beta(1)?;
    for k in 2..=h.genus() {
        elim.fix_alpha(k)?;
        elim.fix_beta(k)?;
    }
    Ok(elim.into_word())
}

/// Factors a symplectic `h` that is the identity on the pairs `1..from` into
/// generators whose indices are all `≥ from`.
pub fn general_sp_factor(h: &SpMatrix, from: usize) -> Result<GeneratorWord, SymplecticError> {
    if !h.preserves_form() {
        return Err(SymplecticError::NotSymplectic);
    }
    let from = from.max(1);
    let mut elim = Eliminator::new(h);
    if (1..from.min(h.genus() + 1)).any(|k| !elim.pair_is_identity(k)) {
        return Err(SymplecticError::NotInSubgroup(from));
    }
    for k in from..=h.genus() {
        elim.fix_alpha(k)?;
        elim.fix_beta(k)?;
    }
    Ok(elim.into_word())
}

/// Finds a word `w` whose matrix carries `α_1` to the primitive vector `v`,
/// so `evaluate(w)` is a symplectic basis change with first column `v`.
pub fn carry_alpha1_to(v: &[BigInt]) -> Result<GeneratorWord, SymplecticError> {
    if v.is_empty() || !v.len().is_multiple_of(2) {
        return Err(SymplecticError::LengthMismatch { expected: v.len() + v.len() % 2, found: v.len() });
    }
    let genus = v.len() / 2;
    let n = v.len();
    let mut entries = vec![BigInt::zero(); n * n];
    for (r, x) in v.iter().enumerate() {
        entries[r * n] = x.clone();
    }
    // only the first column is read by the elimination
    let mut elim = Eliminator::new(&SpMatrix { genus, entries });
    elim.fix_alpha(1).map_err(|_| SymplecticError::NotPrimitive)?;
    Ok(elim.into_word())
}

/// Factors any element of `Sp(2g, Z)` into the named generators.
pub fn factor_symplectic(h: &SpMatrix) -> Result<GeneratorWord, SymplecticError> {
    general_sp_factor(h, 1)
}

#[cfg(test)]
mod tests {
    use super::super::{evaluate, named_generator};
    use super::*;

    #[test]
    fn identity_gives_empty_word() {
        assert!(stabilizer_decompose(&SpMatrix::identity(3)).unwrap().is_empty());
        assert!(general_sp_factor(&SpMatrix::identity(3), 2).unwrap().is_empty());
    }

    #[test]
    fn allowed_generator_is_returned_as_is() {
        let h = named_generator(Generator::TBeta(2), 2).unwrap();
        assert_eq!(stabilizer_decompose(&h).unwrap().to_string(), "Tb2");
    }

    #[test]
    fn basis_change_to_a_primitive_vector() {
        let v: Vec<BigInt> = [6, -10, 15, 4].iter().map(|&x| BigInt::from(x)).collect();
        let c = evaluate(&carry_alpha1_to(&v).unwrap(), 2).unwrap();
        assert_eq!(c.column(0), v);
        assert!(carry_alpha1_to(&super::super::alpha(3, 1)).unwrap().is_empty());
        let w: Vec<BigInt> = [2, 0, 4, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(carry_alpha1_to(&w), Err(SymplecticError::NotPrimitive));
        let h = named_generator(Generator::TBeta(2), 3).unwrap();
        assert_eq!(general_sp_factor(&h, 2).unwrap().to_string(), "Tb2");
    }

    #[test]
    fn rejects_matrices_outside_the_stabilizer() {
        let h = named_generator(Generator::TBeta(1), 2).unwrap();
        assert_eq!(stabilizer_decompose(&h), Err(SymplecticError::DoesNotFixAlpha1));
        let h = named_generator(Generator::Nu(2, 1), 2).unwrap();
        assert_eq!(general_sp_factor(&h, 2), Err(SymplecticError::NotInSubgroup(2)));
    }

    #[test]
    fn minus_identity_factors() {
        let g = 2;
        let mut rows = vec![vec![BigInt::zero(); 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = -BigInt::one();
        }
        let h = SpMatrix::from_rows(g, rows).unwrap();
        let w = factor_symplectic(&h).unwrap();
        assert_eq!(evaluate(&w, g).unwrap(), h);
    }

    #[test]
    fn large_entries_round_trip() {
        let w = GeneratorWord::parse("Ta2^97 Tb2^-55 Nu2,3^41 Ta3^-13 Mu2,3^8 Eta2,3^-21 Tb3^34 Nu3,2^-89").unwrap();
        let h = evaluate(&w, 3).unwrap();
        let out = stabilizer_decompose(&h).unwrap();
        assert_eq!(evaluate(&out, 3).unwrap(), h);
        assert!(out.generators().all(|g| g.fixes_alpha1()));
    }
}
