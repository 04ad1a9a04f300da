//! Ready-made generating algebras and worked-example algebras.

use crate::algebra::{power, product, FiniteAlgebra, Signature};
use crate::{Error, Result};

pub fn boolean_signature() -> Signature {
    Signature::new(vec![("zero", 0), ("one", 0), ("and", 2), ("or", 2), ("not", 1)]).unwrap()
}

pub fn dl_signature() -> Signature {
    Signature::new(vec![("meet", 2), ("join", 2)]).unwrap()
}

pub fn median_signature() -> Signature {
    Signature::new(vec![("m", 3)]).unwrap()
}

pub fn mv_signature() -> Signature {
    Signature::new(vec![("zero", 0), ("one", 0), ("oplus", 2), ("otimes", 2), ("neg", 1)])
        .unwrap()
}

pub fn group_signature() -> Signature {
    Signature::new(vec![("plus", 2), ("zero", 0)]).unwrap()
}

/// The two-element Boolean algebra `⟨{0,1}, 0, 1, ∧, ∨, ¬⟩`.
pub fn boolean_algebra() -> FiniteAlgebra {
    FiniteAlgebra::new(
        2,
        boolean_signature(),
        vec![vec![0], vec![1], vec![0, 0, 0, 1], vec![0, 1, 1, 1], vec![1, 0]],
    )
    .unwrap()
}

/// The two-element unbounded distributive lattice `⟨{0,1}, ∧, ∨⟩`.
pub fn distributive_lattice() -> FiniteAlgebra {
    FiniteAlgebra::new(2, dl_signature(), vec![vec![0, 0, 0, 1], vec![0, 1, 1, 1]]).unwrap()
}

/// The two-element median algebra: `m` is the majority operation.
pub fn median_algebra() -> FiniteAlgebra {
    let mut table = Vec::with_capacity(8);
    for x in 0..2usize {
        for y in 0..2usize {
            for z in 0..2usize {
                table.push(usize::from(x + y + z >= 2));
            }
        }
    }
    FiniteAlgebra::new(2, median_signature(), vec![table]).unwrap()
}

/// The `(m+1)`-element Łukasiewicz chain: carrier `{0, .., m}` standing for
/// `{0, 1/m, .., 1}`, with `x ⊕ y = min(m, x+y)`, `x ⊙ y = max(0, x+y−m)`
/// and `¬x = m − x`.
pub fn lukasiewicz(m: usize) -> FiniteAlgebra {
    assert!(m >= 1, "lukasiewicz chains need m >= 1");
    let s = m + 1;
    let mut oplus = Vec::with_capacity(s * s);
    let mut otimes = Vec::with_capacity(s * s);
    for x in 0..s {
        for y in 0..s {
            oplus.push((x + y).min(m));
            otimes.push((x + y).saturating_sub(m));
        }
    }
    let neg = (0..s).map(|x| m - x).collect();
    FiniteAlgebra::new(s, mv_signature(), vec![vec![0], vec![m], oplus, otimes, neg]).unwrap()
}

/// The two-element Boolean group `⟨{0,1}, +, 0⟩`.
pub fn boolean_group() -> FiniteAlgebra {
    FiniteAlgebra::new(2, group_signature(), vec![vec![0, 1, 1, 0], vec![0]]).unwrap()
}

/// Builds a lattice in the `meet`/`join` signature from its order relation.
/// Fails when some pair lacks a meet or a join.
pub fn lattice_from_order(size: usize, le: &dyn Fn(usize, usize) -> bool) -> Result<FiniteAlgebra> {
    let mut meet = Vec::with_capacity(size * size);
    let mut join = Vec::with_capacity(size * size);
    for x in 0..size {
        for y in 0..size {
            let lower: Vec<usize> = (0..size).filter(|&z| le(z, x) && le(z, y)).collect();
            let m = lower
                .iter()
                .copied()
                .find(|&z| lower.iter().all(|&w| le(w, z)))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("elements {x}, {y} have no meet"))
                })?;
            meet.push(m);
            let upper: Vec<usize> = (0..size).filter(|&z| le(x, z) && le(y, z)).collect();
            let j = upper
                .iter()
                .copied()
                .find(|&z| upper.iter().all(|&w| le(z, w)))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("elements {x}, {y} have no join"))
                })?;
            join.push(j);
        }
    }
    FiniteAlgebra::new(size, dl_signature(), vec![meet, join])
}

/// The six-element distributive lattice used by the `example-5.2` scenario:
/// elements `0 < a, b`; `a < c, d`; `b < d`; `c, d < 1`, encoded as
/// `0, a, b, c, d, 1 = 0..6`.
pub fn fig1_lattice() -> FiniteAlgebra {
    const N: usize = 6;
    let covers = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 4), (3, 5), (4, 5)];
    let mut le = [[false; N]; N];
    for i in 0..N {
        le[i][i] = true;
    }
    for &(a, b) in &covers {
        le[a][b] = true;
    }
    for _ in 0..N {
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    if le[i][j] && le[j][k] {
                        le[i][k] = true;
                    }
                }
            }
        }
    }
    lattice_from_order(N, &|x, y| le[x][y]).unwrap()
}

/// A pentagon-containing (hence non-distributive) five-element lattice:
/// `0 < x < z < 1` and `0 < y < 1`.
pub fn pentagon_lattice() -> FiniteAlgebra {
    let le = |a: usize, b: usize| -> bool {
        if a == b || a == 0 || b == 4 {
            return true;
        }
        matches!((a, b), (1, 3))
    };
    lattice_from_order(5, &le).unwrap()
}

/// `2^k` as a Boolean algebra.
pub fn boolean_cube(k: usize) -> Result<FiniteAlgebra> {
    power(&boolean_algebra(), k)
}

/// `2^n` as a (complemented) distributive lattice.
pub fn dl_cube(n: usize) -> Result<FiniteAlgebra> {
    power(&distributive_lattice(), n)
}

/// The median reduct of `2^k`.
pub fn median_cube(k: usize) -> Result<FiniteAlgebra> {
    power(&median_algebra(), k)
}

/// A product of Łukasiewicz chains `Ł_{m_1} × ⋯ × Ł_{m_t}`.
pub fn mv_chain_product(ms: &[usize]) -> Result<FiniteAlgebra> {
    let factors: Vec<FiniteAlgebra> = ms.iter().map(|&m| lukasiewicz(m)).collect();
    product(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_is_a_lattice_with_expected_order() {
        let l = fig1_lattice();
        let meet = l.signature().op_index("meet").unwrap();
        let join = l.signature().op_index("join").unwrap();
        // c ∧ d = a, a ∨ b = d, c ∨ d = 1.
        assert_eq!(l.apply(meet, &[3, 4]), 1);
        assert_eq!(l.apply(join, &[1, 2]), 4);
        assert_eq!(l.apply(join, &[3, 4]), 5);
    }

    #[test]
    fn pentagon_violates_distributivity() {
        let l = pentagon_lattice();
        let meet = l.signature().op_index("meet").unwrap();
        let join = l.signature().op_index("join").unwrap();
        // x ∧ (y ∨ z) ≠ (x ∧ y) ∨ (x ∧ z) for the pentagon's witnesses.
        let lhs = l.apply(meet, &[3, l.apply(join, &[2, 1])]);
        let rhs = l.apply(join, &[l.apply(meet, &[3, 2]), l.apply(meet, &[3, 1])]);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn median_of_cube_is_coordinatewise_majority() {
        let c = median_cube(2).unwrap();
        let m = c.signature().op_index("m").unwrap();
        // (1,0), (0,1), (1,1) -> (1,1): encodings 1, 2, 3 -> 3.
        assert_eq!(c.apply(m, &[1, 2, 3]), 3);
    }
}
