//! Shared fixtures for the benchmarks.

use morse_topo::kr_graph::{samples, HeightMesh};
use morse_topo::symplectic::{evaluate, Generator, GeneratorWord, SpMatrix};

/// Torus grids of increasing resolution, labelled by vertex count.
pub fn torus_meshes() -> Vec<(usize, HeightMesh)> {
    [(10, 8), (18, 14), (38, 30)]
        .into_iter()
        .map(|(u, v)| {
            let m = samples::torus_grid(u, v);
            (m.vertex_count(), m)
        })
        .collect()
}

/// A word of `len` letters over the generators fixing `α_1`, cycling through
/// them with exponents in `-3..=3`.
pub fn stabilizer_word(genus: usize, len: usize) -> GeneratorWord {
    let mut gens = Vec::new();
    for i in 1..=genus {
        gens.push(Generator::TAlpha(i));
        if i >= 2 {
            gens.push(Generator::TBeta(i));
        }
        for j in i + 1..=genus {
            gens.push(Generator::Mu(i, j));
            if i >= 2 {
                gens.push(Generator::Eta(i, j));
            }
        }
        for j in 2..=genus {
            if i != j {
                gens.push(Generator::Nu(i, j));
            }
        }
    }
    let letters = (0..len).map(|k| {
        let e = (k as i64 * 5 + 2) % 7 - 3;
        (gens[(k * 7 + 3) % gens.len()], if e == 0 { 1 } else { e })
    });
    GeneratorWord::from_letters(letters)
}

pub fn stabilizer_matrix(genus: usize, len: usize) -> SpMatrix {
    evaluate(&stabilizer_word(genus, len), genus).expect("generators are in range")
}
