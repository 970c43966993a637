//! Independent oracle: para-operators realized as `a+_i = Σ_α b+_{iα}` on an
//! explicit tensor product of `p` ordinary Bose or Fermi copies.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parastat::algebra::Monomial;
use parastat::linalg::RationalMatrix;
use parastat::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Bose copies, anticommuting between different copies.
    ParaBose,
    /// Fermi copies, commuting between different copies.
    ParaFermi,
}

/// Occupation numbers indexed by `copy * modes + mode`.
type Occ = Vec<u32>;
type State = BTreeMap<Occ, BigInt>;

pub struct GreenOracle {
    pub flavor: Flavor,
    pub modes: usize,
    pub p: usize,
}

impl GreenOracle {
    pub fn new(flavor: Flavor, modes: usize, p: usize) -> Self {
        GreenOracle { flavor, modes, p }
    }

    fn slot(&self, mode: usize, copy: usize) -> usize {
        copy * self.modes + mode
    }

    /// `b+_{mode,copy}` on a single occupation vector; the canonical
    /// ordering of a basis vector is copy-major, then mode.
    fn raise(&self, occ: &Occ, mode: usize, copy: usize) -> Option<(Occ, bool)> {
        let s = self.slot(mode, copy);
        let negative = match self.flavor {
            Flavor::ParaBose => {
                let before: u32 = occ[..copy * self.modes].iter().sum();
                before % 2 == 1
            }
            Flavor::ParaFermi => {
                if occ[s] == 1 {
                    return None;
                }
                let before: u32 = occ[copy * self.modes..s].iter().sum();
                before % 2 == 1
            }
        };
        let mut out = occ.clone();
        out[s] += 1;
        Some((out, negative))
    }

    fn create(&self, state: &State, mode: usize) -> State {
        let mut out = State::new();
        for (occ, c) in state {
            for copy in 0..self.p {
                if let Some((next, negative)) = self.raise(occ, mode, copy) {
                    let e = out.entry(next).or_insert_with(BigInt::zero);
                    if negative {
                        *e -= c;
                    } else {
                        *e += c;
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `a+_{w_1} ... a+_{w_N} |0>`.
    pub fn ket(&self, word: &Monomial) -> State {
        let mut s = State::new();
        s.insert(vec![0; self.modes * self.p], BigInt::one());
        for k in word.word().iter().rev() {
            s = self.create(&s, k.get() - 1);
        }
        s
    }

    fn norm(&self, occ: &Occ) -> BigInt {
        match self.flavor {
            Flavor::ParaFermi => BigInt::one(),
            Flavor::ParaBose => occ
                .iter()
                .map(|&n| (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k)))
                .product(),
        }
    }

    /// Gram matrix normalized so that `<0| a_i a+_i |0> = 1`.
    pub fn gram(&self, words: &[Monomial]) -> RationalMatrix {
        let kets: Vec<State> = words.iter().map(|w| self.ket(w)).collect();
        let n = words.first().map_or(0, Monomial::len);
        let scale = BigInt::from(self.p).pow(n as u32);
        RationalMatrix::from_fn(words.len(), words.len(), |r, c| {
            let mut acc = BigInt::zero();
            for (occ, x) in &kets[r] {
                if let Some(y) = kets[c].get(occ) {
                    acc += x * y * self.norm(occ);
                }
            }
            Rational::new(acc, scale.clone())
        })
    }
}
