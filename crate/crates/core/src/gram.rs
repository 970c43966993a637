//! Gram matrices of Fock states, the generic permutation matrices, and the
//! permutation-invariance diagnostics.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, FockState, ModeIndex, Monomial};
use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::{serde_rational, Rational};

/// Largest number of Gram entries built in one matrix.
pub const GRAM_ENTRY_LIMIT: u128 = 1_000_000;

/// Same-length words without duplicates, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis(Vec<Monomial>);

impl MonomialBasis {
    pub fn new(mut words: Vec<Monomial>) -> Result<Self> {
        words.sort();
        words.dedup();
        if let Some(first) = words.first() {
            if words.iter().any(|w| w.len() != first.len()) {
                return Err(Error::InvalidParameter(
                    "basis words must share one length".into(),
                ));
            }
        }
        Ok(MonomialBasis(words))
    }

    pub fn words(&self) -> &[Monomial] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Combination `Σ coeffs[r] · basis[r]`.
    pub fn combine(&self, coeffs: &[Rational]) -> FockState {
        FockState::from_terms(self.0.iter().cloned().zip(coeffs.iter().cloned()))
    }
}

/// Every distinct ordering of the multiset with `occupation[k]` copies of
/// mode `k + 1`, in lexicographic order.
pub fn distinct_orderings(occupation: &[usize]) -> MonomialBasis {
    let mut word: Vec<usize> = occupation
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat_n(k + 1, c))
        .collect();
    let mut out = Vec::new();
    loop {
        out.push(Monomial::from_modes(&word).expect("modes are positive"));
        if !next_permutation(&mut word) {
            break;
        }
    }
    MonomialBasis(out)
}

/// Advances to the next lexicographic arrangement; false at the last one.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|x| *x > v[i]).expect("successor exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// All permutations of `0..n` in lexicographic one-line order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// Position of `p` in [`permutations`] order.
pub fn permutation_rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&k| outer[k]).collect()
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (k, &v) in p.iter().enumerate() {
        inv[v] = k;
    }
    inv
}

/// Cycle notation with 1-based points, `"id"` for the identity.
pub fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let sep = if p.len() > 9 { "," } else { "" };
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            cycle.push((k + 1).to_string());
            k = p[k];
        }
        out.push('(');
        out.push_str(&cycle.join(sep));
        out.push(')');
    }
    if out.is_empty() {
        "id".into()
    } else {
        out
    }
}

fn guard(what: &str, rows: usize, cols: usize) -> Result<()> {
    let needed = rows as u128 * cols as u128;
    if needed > GRAM_ENTRY_LIMIT {
        return Err(Error::GuardExceeded {
            what: what.into(),
            needed,
            limit: GRAM_ENTRY_LIMIT,
        });
    }
    Ok(())
}

/// Fills `out[lo..hi]` with `<rows[r] | state>`; the rows are sorted so
/// that words sharing a prefix are contiguous and share annihilations.
fn overlaps_sorted(
    spec: &AlgebraSpec,
    rows: &[&[ModeIndex]],
    depth: usize,
    state: &FockState,
    out: &mut [Rational],
) {
    if state.is_zero() {
        return;
    }
    if rows.first().is_none_or(|r| r.len() == depth) {
        let v = state.vacuum_coefficient();
        out.iter_mut().for_each(|x| *x = v.clone());
        return;
    }
    let mut lo = 0;
    while lo < rows.len() {
        let letter = rows[lo][depth];
        let hi = lo + rows[lo..].iter().take_while(|r| r[depth] == letter).count();
        let next = spec.annihilate_unchecked(letter, state);
        overlaps_sorted(spec, &rows[lo..hi], depth + 1, &next, &mut out[lo..hi]);
        lo = hi;
    }
}

/// `<row|v>` for every row word. Rows may be in any order and must all
/// have the same length.
pub fn overlaps(spec: &AlgebraSpec, rows: &[Monomial], v: &FockState) -> Result<Vec<Rational>> {
    let n = rows.first().map_or(0, Monomial::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("rows must share one length".into()));
    }
    if n > spec.max_n() {
        return Err(Error::MaxNExceeded {
            n,
            max_n: spec.max_n(),
        });
    }
    for r in rows {
        for &k in r.word() {
            spec.check_mode(k)?;
        }
    }
    let ket: FockState = FockState::from_terms(
        v.terms()
            .filter(|(m, _)| m.len() == n)
            .map(|(m, c)| (m.clone(), c.clone())),
    );
    spec.check_state(&ket)?;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].cmp(&rows[b]));
    let sorted: Vec<&[ModeIndex]> = order.iter().map(|&r| rows[r].word()).collect();
    let mut values = vec![Rational::default(); rows.len()];
    overlaps_sorted(spec, &sorted, 0, &ket, &mut values);
    let mut out = vec![Rational::default(); rows.len()];
    for (slot, &r) in order.iter().enumerate() {
        out[r] = values[slot].clone();
    }
    Ok(out)
}

/// Matrix of scalar products `<words[r] | words[c]>` in the given order,
/// without the symmetry check.
pub fn gram_matrix_unchecked(spec: &AlgebraSpec, words: &[Monomial]) -> Result<RationalMatrix> {
    let n = words.len();
    guard("Gram matrix", n, n)?;
    let columns: Vec<Vec<Rational>> = words
        .par_iter()
        .map(|v| overlaps(spec, words, &FockState::from(v.clone())))
        .collect::<Result<_>>()?;
    Ok(RationalMatrix::from_fn(n, n, |r, c| columns[c][r].clone()))
}

/// Gram matrix over a canonical basis. A non-symmetric result means the
/// algebra definition is inconsistent and is reported as an error.
pub fn gram_matrix(spec: &AlgebraSpec, basis: &MonomialBasis) -> Result<RationalMatrix> {
    let g = gram_matrix_unchecked(spec, basis.words())?;
    match g.first_asymmetry() {
        Some((row, col)) => Err(Error::SymmetryViolation { row, col }),
        None => Ok(g),
    }
}

/// Words `(i_{π(1)}, ..., i_{π(N)})` for π in lexicographic order.
pub fn generic_words(indices: &[ModeIndex]) -> Result<Vec<Monomial>> {
    let mut sorted = indices.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateIndices);
    }
    Ok(permutations(indices.len())
        .into_iter()
        .map(|p| Monomial::new(p.iter().map(|&k| indices[k]).collect()))
        .collect())
}

/// The `N! x N!` matrix of scalar products between all orderings of `N`
/// distinct modes; rows and columns follow lexicographic permutation order.
pub fn gram_generic(spec: &AlgebraSpec, indices: &[ModeIndex]) -> Result<RationalMatrix> {
    for &k in indices {
        spec.check_mode(k)?;
    }
    let size = factorial(indices.len());
    if size * size > GRAM_ENTRY_LIMIT {
        return Err(Error::GuardExceeded {
            what: "generic Gram matrix".into(),
            needed: size * size,
            limit: GRAM_ENTRY_LIMIT,
        });
    }
    gram_matrix_unchecked(spec, &generic_words(indices)?)
}

fn check_factorial(a: &RationalMatrix, n: usize) -> Result<()> {
    let size = factorial(n);
    if !a.is_square() || a.rows() as u128 != size {
        return Err(Error::NotFactorial(a.rows(), n));
    }
    Ok(())
}

/// `A[πμ, πν] = A[μ, ν]` for every adjacent transposition π.
pub fn left_invariance_check(a: &RationalMatrix, n: usize) -> Result<bool> {
    check_factorial(a, n)?;
    let perms = permutations(n);
    for t in 0..n.saturating_sub(1) {
        let mut pi: Vec<usize> = (0..n).collect();
        pi.swap(t, t + 1);
        let moved: Vec<usize> = perms
            .iter()
            .map(|mu| permutation_rank(&compose(&pi, mu)))
            .collect();
        for (mu, &pm) in moved.iter().enumerate() {
            for (nu, &pn) in moved.iter().enumerate() {
                if a.get(pm, pn) != a.get(mu, nu) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `c(π)` with a permutation in 1-based one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationCoefficient {
    pub perm: Vec<usize>,
    pub cycles: String,
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
}

/// `A = Σ_π c(π) R(π)` with `R` the right regular representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularDecomposition {
    pub n: usize,
    pub coefficients: Vec<PermutationCoefficient>,
    /// True when the reconstruction differs from the input.
    pub residual: bool,
}

impl RegularDecomposition {
    pub fn coefficient(&self, cycles: &str) -> Option<&Rational> {
        self.coefficients
            .iter()
            .find(|c| c.cycles == cycles)
            .map(|c| &c.coeff)
    }
}

impl fmt::Display for RegularDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .map(|c| format!("{}: {}", c.cycles, c.coeff))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))?;
        if self.residual {
            write!(f, " (residual)")?;
        }
        Ok(())
    }
}

/// Reads `c(σ) = A[id, σ]` off the identity row and rebuilds
/// `A[μ, ν] = c(μ⁻¹ν)`.
pub fn regular_decompose(a: &RationalMatrix, n: usize) -> Result<RegularDecomposition> {
    check_factorial(a, n)?;
    let perms = permutations(n);
    let coeffs: Vec<Rational> = a.row(0).to_vec();
    let mut residual = false;
    'outer: for (mu, pm) in perms.iter().enumerate() {
        let inv = inverse(pm);
        for (nu, pn) in perms.iter().enumerate() {
            let sigma = compose(&inv, pn);
            if &coeffs[permutation_rank(&sigma)] != a.get(mu, nu) {
                residual = true;
                break 'outer;
            }
        }
    }
    Ok(RegularDecomposition {
        n,
        coefficients: perms
            .iter()
            .zip(coeffs)
            .map(|(p, coeff)| PermutationCoefficient {
                perm: p.iter().map(|k| k + 1).collect(),
                cycles: cycle_notation(p),
                coeff,
            })
            .collect(),
        residual,
    })
}

/// Exhaustive check that words of length `n` with different occupation
/// vectors have zero scalar product.
pub fn multiset_orthogonality_check(spec: &AlgebraSpec, n: usize) -> Result<bool> {
    let count = (spec.modes() as u128).saturating_pow(n as u32);
    let needed = count.saturating_mul(count);
    if needed > GRAM_ENTRY_LIMIT {
        return Err(Error::GuardExceeded {
            what: "multiset orthogonality check".into(),
            needed,
            limit: GRAM_ENTRY_LIMIT,
        });
    }
    let words = spec.all_words(n);
    let g = gram_matrix_unchecked(spec, &words)?;
    let occ: Vec<Vec<usize>> = words
        .iter()
        .map(|w| w.multiplicities(spec.modes()))
        .collect();
    for r in 0..words.len() {
        for c in 0..words.len() {
            if occ[r] != occ[c] && !num_traits::Zero::is_zero(g.get(r, c)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::PresetId;
    use crate::rational::{int, rat};

    fn idx(v: &[usize]) -> Vec<ModeIndex> {
        v.iter().map(|&k| ModeIndex::new(k).unwrap()).collect()
    }

    #[test]
    fn permutation_helpers() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![0, 2, 1]);
        for (r, q) in p.iter().enumerate() {
            assert_eq!(permutation_rank(q), r);
        }
        assert_eq!(cycle_notation(&[1, 0, 2]), "(12)");
        assert_eq!(cycle_notation(&[0, 1]), "id");
        assert_eq!(cycle_notation(&[1, 2, 0]), "(123)");
    }

    #[test]
    fn distinct_orderings_of_multiset() {
        let b = distinct_orderings(&[2, 1]);
        let w: Vec<Vec<usize>> = b.words().iter().map(Monomial::modes).collect();
        assert_eq!(w, vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]);
        assert_eq!(distinct_orderings(&[0, 0]).len(), 1);
    }

    #[test]
    fn quon_generic_two() {
        let s = PresetId::Quon { q: rat(1, 2) }.build(2).unwrap();
        let g = gram_generic(&s, &idx(&[1, 2])).unwrap();
        assert_eq!(
            g.to_rows(),
            vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), int(1)]]
        );
        let d = regular_decompose(&g, 2).unwrap();
        assert_eq!(d.coefficient("id"), Some(&int(1)));
        assert_eq!(d.coefficient("(12)"), Some(&rat(1, 2)));
        assert!(!d.residual);
    }

    #[test]
    fn one_particle_gram_is_identity() {
        for id in [
            PresetId::Okubo { p: 2 },
            PresetId::KleinMarshalek,
            PresetId::Quon { q: int(3) },
        ] {
            let s = id.build(3).unwrap();
            let basis = MonomialBasis::new(s.all_words(1)).unwrap();
            assert_eq!(
                gram_matrix(&s, &basis).unwrap(),
                RationalMatrix::identity(3)
            );
        }
    }

    #[test]
    fn palev_fermi_two_particle_block() {
        let s = PresetId::PalevFermi { p: 2 }.build(2).unwrap();
        let basis = distinct_orderings(&[1, 1]);
        let g = gram_matrix(&s, &basis).unwrap();
        assert_eq!(
            g.to_rows(),
            vec![vec![rat(1, 2), rat(-1, 2)], vec![rat(-1, 2), rat(1, 2)]]
        );
        let d = regular_decompose(&g, 2).unwrap();
        assert_eq!(d.coefficient("(12)"), Some(&rat(-1, 2)));
    }

    #[test]
    fn green_parafermi_order_one() {
        let s = PresetId::GreenParafermi { p: 1 }.build(2).unwrap();
        let g = gram_generic(&s, &idx(&[1, 2])).unwrap();
        assert_eq!(
            g.to_rows(),
            vec![vec![int(1), int(-1)], vec![int(-1), int(1)]]
        );
    }

    #[test]
    fn invariance_checks() {
        assert!(left_invariance_check(&RationalMatrix::identity(1), 1).unwrap());
        let s = PresetId::Quon { q: rat(1, 2) }.build(3).unwrap();
        let g = gram_generic(&s, &idx(&[1, 2, 3])).unwrap();
        assert!(left_invariance_check(&g, 3).unwrap());
        assert!(!regular_decompose(&g, 3).unwrap().residual);
        let mut bad = RationalMatrix::identity(2);
        bad.set(1, 1, int(2));
        assert!(!left_invariance_check(&bad, 2).unwrap());
        assert!(regular_decompose(&bad, 2).unwrap().residual);
        assert!(matches!(
            left_invariance_check(&RationalMatrix::identity(3), 2),
            Err(Error::NotFactorial(3, 2))
        ));
    }

    #[test]
    fn duplicate_generic_indices() {
        let s = PresetId::Quon { q: int(0) }.build(2).unwrap();
        assert_eq!(
            gram_generic(&s, &idx(&[1, 1])),
            Err(Error::DuplicateIndices)
        );
    }

    #[test]
    fn multiset_orthogonality_examples() {
        let q0 = PresetId::Quon { q: int(0) }.build(2).unwrap();
        assert!(multiset_orthogonality_check(&q0, 2).unwrap());
        let sup = PresetId::PalevSuper { mb: 1, mf: 1, p: 2 }
            .build(2)
            .unwrap();
        assert!(multiset_orthogonality_check(&sup, 2).unwrap());
        let ok = PresetId::Okubo { p: 2 }.build(2).unwrap();
        assert!(!multiset_orthogonality_check(&ok, 2).unwrap());
        let w11 = Monomial::from_modes(&[1, 1]).unwrap();
        let w22 = Monomial::from_modes(&[2, 2]).unwrap();
        assert_eq!(ok.inner_product(&w11, &w22).unwrap(), int(-1));
    }

    #[test]
    fn overlaps_match_inner_products() {
        let s = PresetId::PalevBose { p: 3 }.build(3).unwrap();
        let words = s.all_words(3);
        let v = FockState::from(Monomial::from_modes(&[2, 1, 2]).unwrap());
        let fast = overlaps(&s, &words, &v).unwrap();
        for (w, x) in words.iter().zip(&fast) {
            assert_eq!(&s.inner_product_state(w, &v).unwrap(), x);
        }
    }

    #[test]
    fn gram_guard() {
        let s = PresetId::Quon { q: int(0) }.build(2).unwrap();
        let s = s.with_max_n(7).unwrap();
        assert!(matches!(
            gram_generic(&s, &idx(&[1, 2, 3, 4, 5, 6, 7])),
            Err(Error::IndexOutOfRange { .. })
        ));
        let wide = PresetId::Quon { q: int(0) }
            .build(7)
            .unwrap()
            .with_max_n(7)
            .unwrap();
        assert!(matches!(
            gram_generic(&wide, &idx(&[1, 2, 3, 4, 5, 6, 7])),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
