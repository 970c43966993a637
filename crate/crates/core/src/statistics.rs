//! State counting: `d_λ`, `D(M, N)`, null states, and extended Haldane
//! statistics parameters.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, FockState, ModeIndex, Monomial};
use crate::error::{Error, Result};
use crate::gram::{
    distinct_orderings, gram_matrix_unchecked, multiset_orthogonality_check, MonomialBasis,
};
use crate::linalg::{null_basis, rank, RationalMatrix};
use crate::rational::{serde_rational, Rational};

/// Weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidParameter(
                "partition parts must be positive".into(),
            ));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct ways to place the parts on `modes` modes:
    /// `M! / ((M-k)! Π_j c_j!)` with `c_j` the multiplicity of each part size.
    pub fn assignments(&self, modes: usize) -> Result<u64> {
        let k = self.0.len();
        if k > modes {
            return Ok(0);
        }
        let mut num: u128 = 1;
        for m in (modes - k + 1)..=modes {
            num = num
                .checked_mul(m as u128)
                .ok_or(Error::Overflow("index assignments"))?;
        }
        let mut den: u128 = 1;
        let mut i = 0;
        while i < k {
            let run = self.0[i..].iter().take_while(|&&x| x == self.0[i]).count();
            den *= (1..=run as u128).product::<u128>();
            i += run;
        }
        u64::try_from(num / den).map_err(|_| Error::Overflow("index assignments"))
    }

    /// Occupation vector with part `r` on mode `r + 1`.
    pub fn canonical_occupation(&self, modes: usize) -> Result<Vec<usize>> {
        if self.0.len() > modes {
            return Err(Error::PartitionTooWide {
                parts: self.0.len(),
                modes,
            });
        }
        let mut occ = vec![0; modes];
        occ[..self.0.len()].copy_from_slice(&self.0);
        Ok(occ)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Partitions of `n` with at most `max_parts` parts, reverse-lexicographic.
pub fn partitions(n: usize, max_parts: usize) -> Vec<Partition> {
    fn go(
        n: usize,
        max_part: usize,
        max_parts: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if cur.len() == max_parts {
            return;
        }
        for part in (1..=max_part.min(n)).rev() {
            cur.push(part);
            go(n - part, part, max_parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, max_parts, &mut Vec::new(), &mut out);
    out
}

/// Occupation vectors of `n` particles on `modes` modes, lexicographically
/// decreasing (mode 1 filled first).
pub fn occupations(n: usize, modes: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot + 1 == cur.len() {
            cur[slot] = n;
            out.push(cur.clone());
            return;
        }
        for c in (0..=n).rev() {
            cur[slot] = c;
            go(n - c, slot + 1, cur, out);
        }
        cur[slot] = 0;
    }
    let mut out = Vec::new();
    if modes == 0 {
        return out;
    }
    go(n, 0, &mut vec![0; modes], &mut out);
    out
}

fn check_size(spec: &AlgebraSpec, n: usize) -> Result<()> {
    if n > spec.max_n() {
        return Err(Error::MaxNExceeded {
            n,
            max_n: spec.max_n(),
        });
    }
    Ok(())
}

/// Rank of the Gram block of all orderings of the multiset that puts
/// `parts[r]` copies of `modes[r]`.
pub fn d_lambda_assigned(
    spec: &AlgebraSpec,
    lambda: &Partition,
    modes: &[ModeIndex],
) -> Result<usize> {
    Ok(rank(&lambda_gram(spec, lambda, modes)?.1))
}

fn lambda_gram(
    spec: &AlgebraSpec,
    lambda: &Partition,
    modes: &[ModeIndex],
) -> Result<(MonomialBasis, RationalMatrix)> {
    check_size(spec, lambda.size())?;
    if lambda.len() > spec.modes() {
        return Err(Error::PartitionTooWide {
            parts: lambda.len(),
            modes: spec.modes(),
        });
    }
    if modes.len() != lambda.len() {
        return Err(Error::InvalidParameter(
            "one mode per part is required".into(),
        ));
    }
    let mut occ = vec![0; spec.modes()];
    for (&m, &part) in modes.iter().zip(lambda.parts()) {
        spec.check_mode(m)?;
        if occ[m.get() - 1] != 0 {
            return Err(Error::DuplicateIndices);
        }
        occ[m.get() - 1] = part;
    }
    let basis = distinct_orderings(&occ);
    let g = gram_matrix_unchecked(spec, basis.words())?;
    Ok((basis, g))
}

fn canonical_modes(lambda: &Partition) -> Vec<ModeIndex> {
    (1..=lambda.len())
        .map(|k| ModeIndex::new(k).expect("positive"))
        .collect()
}

/// `d_λ` with modes `1..k` assigned to the parts in order.
pub fn d_lambda(spec: &AlgebraSpec, lambda: &Partition) -> Result<usize> {
    if lambda.len() > spec.modes() {
        return Err(Error::PartitionTooWide {
            parts: lambda.len(),
            modes: spec.modes(),
        });
    }
    d_lambda_assigned(spec, lambda, &canonical_modes(lambda))
}

/// Kernel of the `λ` block mapped back to states; each has zero overlap
/// with every state of the block.
pub fn null_states(spec: &AlgebraSpec, lambda: &Partition) -> Result<Vec<FockState>> {
    if lambda.len() > spec.modes() {
        return Err(Error::PartitionTooWide {
            parts: lambda.len(),
            modes: spec.modes(),
        });
    }
    let (basis, g) = lambda_gram(spec, lambda, &canonical_modes(lambda))?;
    Ok(null_basis(&g).iter().map(|v| basis.combine(v)).collect())
}

/// How the `N`-particle space is cut into Gram blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// One representative multiset per partition, weighted by the number
    /// of index assignments.
    Partition,
    /// Every occupation vector separately.
    Occupation,
    /// The whole `M^N` word space.
    Full,
}

/// One Gram block of the `N`-particle space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub n: usize,
    pub kind: BlockKind,
    pub partition: Option<Partition>,
    pub occupation: Option<Vec<usize>>,
    pub multiplicity: u64,
    pub basis: Vec<Monomial>,
}

impl Block {
    pub fn gram(&self, spec: &AlgebraSpec) -> Result<RationalMatrix> {
        gram_matrix_unchecked(spec, &self.basis)
    }

    pub fn label(&self) -> String {
        match (&self.kind, &self.occupation) {
            (BlockKind::Full, _) => format!("N={} full", self.n),
            (_, Some(occ)) => {
                let o: Vec<String> = occ.iter().map(usize::to_string).collect();
                format!("N={} occupation [{}]", self.n, o.join(","))
            }
            _ => format!("N={}", self.n),
        }
    }
}

/// Whether distinct occupations are orthogonal at `n` particles: by
/// construction when `z` is diagonal, otherwise by exhaustive check.
pub fn occupations_orthogonal(spec: &AlgebraSpec, n: usize) -> Result<bool> {
    if spec.conserves_multiplicities() {
        return Ok(true);
    }
    multiset_orthogonality_check(spec, n)
}

/// Gram blocks covering the `n`-particle space.
pub fn sector_blocks(spec: &AlgebraSpec, n: usize) -> Result<Vec<Block>> {
    check_size(spec, n)?;
    let modes = spec.modes();
    if !occupations_orthogonal(spec, n)? {
        let basis = spec.all_words(n);
        return Ok(vec![Block {
            n,
            kind: BlockKind::Full,
            partition: None,
            occupation: None,
            multiplicity: 1,
            basis,
        }]);
    }
    if spec.is_index_uniform() {
        partitions(n, modes)
            .into_iter()
            .map(|lambda| {
                let occ = lambda.canonical_occupation(modes)?;
                Ok(Block {
                    n,
                    kind: BlockKind::Partition,
                    multiplicity: lambda.assignments(modes)?,
                    basis: distinct_orderings(&occ).words().to_vec(),
                    partition: Some(lambda),
                    occupation: Some(occ),
                })
            })
            .collect()
    } else {
        occupations(n, modes)
            .into_iter()
            .map(|occ| {
                let parts: Vec<usize> = occ.iter().copied().filter(|&c| c > 0).collect();
                Ok(Block {
                    n,
                    kind: BlockKind::Occupation,
                    partition: Some(Partition::new(parts)?),
                    multiplicity: 1,
                    basis: distinct_orderings(&occ).words().to_vec(),
                    occupation: Some(occ),
                })
            })
            .collect()
    }
}

/// One row of a [`DimensionTable`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub n: usize,
    pub kind: BlockKind,
    pub partition: Option<Partition>,
    pub occupation: Option<Vec<usize>>,
    /// Rank of the block's Gram matrix.
    pub d: usize,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTotal {
    pub n: usize,
    pub dimension: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub modes: usize,
    pub rows: Vec<DimensionRow>,
    pub totals: Vec<DimensionTotal>,
}

impl DimensionTable {
    pub fn dimension(&self, n: usize) -> Option<u64> {
        self.totals.iter().find(|t| t.n == n).map(|t| t.dimension)
    }

    pub fn d_lambda(&self, lambda: &Partition) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.kind == BlockKind::Partition && r.partition.as_ref() == Some(lambda))
            .map(|r| r.d)
    }
}

fn dimension_of(rows: &[DimensionRow]) -> Result<u64> {
    rows.iter().try_fold(0u64, |acc, r| {
        (r.d as u64)
            .checked_mul(r.multiplicity)
            .and_then(|x| acc.checked_add(x))
            .ok_or(Error::Overflow("Fock dimension"))
    })
}

fn rows_for(spec: &AlgebraSpec, n: usize) -> Result<Vec<DimensionRow>> {
    let blocks = sector_blocks(spec, n)?;
    blocks
        .par_iter()
        .map(|b| {
            Ok(DimensionRow {
                n,
                kind: b.kind,
                partition: b.partition.clone(),
                occupation: b.occupation.clone(),
                d: rank(&b.gram(spec)?),
                multiplicity: b.multiplicity,
            })
        })
        .collect()
}

/// `D(M, N)`: the number of linearly independent `N`-particle states.
pub fn fock_dimension(spec: &AlgebraSpec, n: usize) -> Result<u64> {
    dimension_of(&rows_for(spec, n)?)
}

/// `d` and `D(M, N)` for `N = 0..=max_n`.
pub fn dimension_table(spec: &AlgebraSpec, max_n: usize) -> Result<DimensionTable> {
    let mut rows = Vec::new();
    let mut totals = Vec::new();
    for n in 0..=max_n {
        let r = rows_for(spec, n)?;
        totals.push(DimensionTotal {
            n,
            dimension: dimension_of(&r)?,
        });
        rows.extend(r);
    }
    Ok(DimensionTable {
        modes: spec.modes(),
        rows,
        totals,
    })
}

/// Rank of the Gram matrix of `{a+_k w |0> : k = 1..M}` for the given
/// reference word `w` of `n - 1` particles.
pub fn available_dim_with_reference(spec: &AlgebraSpec, reference: &[ModeIndex]) -> Result<usize> {
    check_size(spec, reference.len() + 1)?;
    let words: Vec<Monomial> = spec
        .mode_indices()
        .map(|k| {
            let mut w = Vec::with_capacity(reference.len() + 1);
            w.push(k);
            w.extend_from_slice(reference);
            Monomial::new(w)
        })
        .collect();
    Ok(rank(&gram_matrix_unchecked(spec, &words)?))
}

/// `d_n`: available one-particle dimension with `n - 1` particles fixed in
/// modes `1..n-1`.
pub fn available_dim(spec: &AlgebraSpec, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n - 1 > spec.modes() {
        return Err(Error::NoReferenceWord {
            needed: n - 1,
            modes: spec.modes(),
        });
    }
    let reference: Vec<ModeIndex> = (1..n)
        .map(|k| ModeIndex::new(k).expect("positive"))
        .collect();
    available_dim_with_reference(spec, &reference)
}

/// `g_{n -> n+k} = (d_n - d_{n+k}) / k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaldaneRecord {
    pub n: usize,
    pub k: usize,
    pub d_n: usize,
    pub d_n_plus_k: usize,
    #[serde(with = "serde_rational")]
    pub g: Rational,
}

pub fn haldane_g(spec: &AlgebraSpec, n: usize, k: usize) -> Result<HaldaneRecord> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("n and k must be at least 1".into()));
    }
    check_size(spec, n + k)?;
    let d_n = available_dim(spec, n)?;
    let d_n_plus_k = available_dim(spec, n + k)?;
    let g = Rational::new((d_n as i64 - d_n_plus_k as i64).into(), (k as i64).into());
    Ok(HaldaneRecord {
        n,
        k,
        d_n,
        d_n_plus_k,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::PresetId;
    use crate::rational::{int, rat};

    fn part(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn partition_enumeration_order() {
        let ps: Vec<Vec<usize>> = partitions(4, 4)
            .iter()
            .map(|p| p.parts().to_vec())
            .collect();
        assert_eq!(
            ps,
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
        assert_eq!(partitions(4, 2).len(), 3);
        assert_eq!(partitions(0, 3), vec![Partition(vec![])]);
    }

    #[test]
    fn assignment_counts() {
        assert_eq!(part(&[1, 1]).assignments(4).unwrap(), 6);
        assert_eq!(part(&[2, 1]).assignments(3).unwrap(), 6);
        assert_eq!(part(&[2]).assignments(5).unwrap(), 5);
        assert_eq!(part(&[1, 1, 1]).assignments(2).unwrap(), 0);
        assert_eq!(Partition(vec![]).assignments(3).unwrap(), 1);
    }

    #[test]
    fn occupation_enumeration() {
        let o = occupations(2, 2);
        assert_eq!(o, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(occupations(3, 3).len(), 10);
    }

    #[test]
    fn d_lambda_examples() {
        for id in [
            PresetId::Okubo { p: 2 },
            PresetId::PalevFermi { p: 2 },
            PresetId::Quon { q: int(2) },
        ] {
            let s = id.build(2).unwrap();
            assert_eq!(d_lambda(&s, &part(&[1])).unwrap(), 1);
        }
        let pf = PresetId::PalevFermi { p: 3 }.build(2).unwrap();
        assert_eq!(d_lambda(&pf, &part(&[2])).unwrap(), 0);
        let q = PresetId::Quon { q: rat(1, 2) }.build(2).unwrap();
        assert_eq!(d_lambda(&q, &part(&[1, 1])).unwrap(), 2);
        assert!(matches!(
            d_lambda(&q, &part(&[1, 1, 1])),
            Err(Error::PartitionTooWide { parts: 3, modes: 2 })
        ));
    }

    #[test]
    fn fock_dimension_examples() {
        let pf = PresetId::PalevFermi { p: 2 }.build(4).unwrap();
        assert_eq!(fock_dimension(&pf, 2).unwrap(), 6);
        assert_eq!(fock_dimension(&pf, 3).unwrap(), 0);
        let pb = PresetId::PalevBose { p: 2 }.build(3).unwrap();
        assert_eq!(fock_dimension(&pb, 2).unwrap(), 6);
        assert_eq!(fock_dimension(&pb, 3).unwrap(), 0);
        let km = PresetId::KleinMarshalek.build(5).unwrap();
        assert_eq!(fock_dimension(&km, 1).unwrap(), 5);
        assert_eq!(fock_dimension(&km, 2).unwrap(), 0);
        assert_eq!(fock_dimension(&km, 0).unwrap(), 1);
    }

    #[test]
    fn quon_zero_counts_all_words() {
        let s = PresetId::Quon { q: int(0) }.build(2).unwrap();
        for n in 0..=3 {
            assert_eq!(fock_dimension(&s, n).unwrap(), 2u64.pow(n as u32));
        }
    }

    #[test]
    fn null_state_examples() {
        let q = PresetId::Quon { q: rat(1, 2) }.build(2).unwrap();
        assert!(null_states(&q, &part(&[1, 1])).unwrap().is_empty());
        let pf = PresetId::PalevFermi { p: 2 }.build(2).unwrap();
        let ns = null_states(&pf, &part(&[1, 1])).unwrap();
        assert_eq!(ns.len(), 1);
        let sym = FockState::from_terms([
            (Monomial::from_modes(&[1, 2]).unwrap(), int(1)),
            (Monomial::from_modes(&[2, 1]).unwrap(), int(1)),
        ]);
        assert_eq!(ns[0], sym);
        assert!(pf.is_null(&ns[0]).unwrap());
        let km = PresetId::PalevBose { p: 1 }.build(2).unwrap();
        assert_eq!(null_states(&km, &part(&[1, 1])).unwrap().len(), 2);
    }

    #[test]
    fn available_dimension_examples() {
        let pf = PresetId::PalevFermi { p: 3 }.build(5).unwrap();
        assert_eq!(available_dim(&pf, 1).unwrap(), 5);
        assert_eq!(available_dim(&pf, 2).unwrap(), 4);
        let pb = PresetId::PalevBose { p: 2 }.build(4).unwrap();
        assert_eq!(available_dim(&pb, 2).unwrap(), 4);
        let small = PresetId::Quon { q: int(0) }.build(1).unwrap();
        assert!(matches!(
            available_dim(&small, 3),
            Err(Error::NoReferenceWord { .. })
        ));
    }

    #[test]
    fn haldane_examples() {
        let pf = PresetId::PalevFermi { p: 3 }.build(5).unwrap();
        assert_eq!(haldane_g(&pf, 1, 1).unwrap().g, int(1));
        let r = haldane_g(&pf, 2, 2).unwrap();
        assert_eq!((r.d_n, r.d_n_plus_k, r.g), (4, 0, int(2)));
        let pb = PresetId::PalevBose { p: 2 }.build(4).unwrap();
        assert_eq!(haldane_g(&pb, 1, 2).unwrap().g, int(2));
        assert_eq!(haldane_g(&pb, 1, 1).unwrap().g, int(0));
    }

    #[test]
    fn graded_blocks_are_per_occupation() {
        let s = PresetId::PalevSuper { mb: 1, mf: 1, p: 2 }
            .build(2)
            .unwrap();
        let blocks = sector_blocks(&s, 2).unwrap();
        assert!(blocks.iter().all(|b| b.kind == BlockKind::Occupation));
        assert_eq!(blocks.len(), 3);
        // a+_B^2, a+_B a+_F: allowed; a+_F^2 is null.
        assert_eq!(fock_dimension(&s, 2).unwrap(), 2);
    }

    #[test]
    fn okubo_uses_full_block() {
        let s = PresetId::Okubo { p: 2 }.build(2).unwrap();
        let blocks = sector_blocks(&s, 2).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].kind, BlockKind::Full);
        assert_eq!(blocks[0].basis.len(), 4);
    }
}
