//! Normal-ordered operator expressions, the published low-order expansions
//! of the transition number operators, and checks of those expansions and
//! of the triple relation against the exact Fock-space action.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, FockState, ModeIndex};
use crate::error::{Error, Result};
use crate::presets::PresetId;
use crate::rational::{int, rat, Rational};

/// `coeff · a+_{c_1} ... a+_{c_r} a_{d_1} ... a_{d_s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTerm {
    pub creation: Vec<ModeIndex>,
    pub annihilation: Vec<ModeIndex>,
    pub coeff: Rational,
}

/// Sum of normally ordered terms. Every term applies its annihilation
/// word first (rightmost letter first), then its creation word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalOrderedOperator {
    terms: BTreeMap<(Vec<ModeIndex>, Vec<ModeIndex>), Rational>,
}

impl NormalOrderedOperator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a term, merging with an existing one of the same shape.
    pub fn add(&mut self, creation: Vec<ModeIndex>, annihilation: Vec<ModeIndex>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let key = (creation, annihilation);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> Vec<OperatorTerm> {
        self.terms
            .iter()
            .map(|((c, a), x)| OperatorTerm {
                creation: c.clone(),
                annihilation: a.clone(),
                coeff: x.clone(),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest number of annihilators in any term.
    pub fn order(&self) -> usize {
        self.terms.keys().map(|(_, a)| a.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for NormalOrderedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((c, a), x)| {
                let mut s = format!("({x})");
                for k in c {
                    s.push_str(&format!(" a+{k}"));
                }
                for k in a {
                    s.push_str(&format!(" a{k}"));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Acts with `op` on `state`.
pub fn apply_operator(
    spec: &AlgebraSpec,
    op: &NormalOrderedOperator,
    state: &FockState,
) -> Result<FockState> {
    let mut out = FockState::zero();
    for ((creation, annihilation), coeff) in &op.terms {
        let mut s = state.clone();
        for &k in annihilation.iter().rev() {
            if s.is_zero() {
                break;
            }
            s = spec.annihilate(k, &s)?;
        }
        if s.is_zero() {
            continue;
        }
        let s = spec.apply_creation_word(&s, creation)?;
        out = &out + &s.scaled(coeff);
    }
    Ok(out)
}

fn mi(k: usize) -> ModeIndex {
    ModeIndex::new(k).expect("positive mode")
}

/// `K Σ_l Y_jl† Y_il` with `Y_il = a_i a_l - c a_l a_i`, multiplied out.
fn add_y_bilinear(
    op: &mut NormalOrderedOperator,
    modes: usize,
    i: ModeIndex,
    j: ModeIndex,
    c: &Rational,
    k: &Rational,
) {
    for l in (1..=modes).map(mi) {
        // Y_jl† = a+_l a+_j - c a+_j a+_l
        op.add(vec![l, j], vec![i, l], k.clone());
        op.add(vec![l, j], vec![l, i], -(k * c));
        op.add(vec![j, l], vec![i, l], -(k * c));
        op.add(vec![j, l], vec![l, i], k * c * c);
    }
}

fn pole(what: &str) -> Error {
    Error::UndefinedCoefficient(what.into())
}

/// The published expansion of `N_ij` for `preset`, with dummy sums
/// expanded over the modes of `spec`.
pub fn instantiate_expansion(
    preset: &PresetId,
    spec: &AlgebraSpec,
    i: ModeIndex,
    j: ModeIndex,
) -> Result<NormalOrderedOperator> {
    spec.check_mode(i)?;
    spec.check_mode(j)?;
    let modes = spec.modes();
    let mut op = NormalOrderedOperator::new();
    op.add(vec![j], vec![i], Rational::one());
    match preset {
        PresetId::GreenParabose { p } | PresetId::GreenParafermi { p } => {
            if *p == 1 {
                return Err(pole("p^2/(4(p-1)) at p = 1"));
            }
            let p = *p as i64;
            // The sign in Y is +1 for para-Bose and -1 for para-Fermi, the
            // opposite of the exchange coefficient in a_i a+_j.
            let sign = if matches!(preset, PresetId::GreenParabose { .. }) {
                int(1)
            } else {
                int(-1)
            };
            let c = sign * (rat(2, p) - int(1));
            let k = rat(p * p, 4 * (p - 1));
            add_y_bilinear(&mut op, modes, i, j, &c, &k);
        }
        PresetId::Govorkov { p, sign } => {
            let (p, lam) = (*p as i64, *sign as i64);
            if p * p == lam * lam {
                return Err(pole("p^2/(p^2 - lambda^2) at p = 1"));
            }
            let c = rat(-lam, p);
            let k = rat(p * p, p * p - lam * lam);
            add_y_bilinear(&mut op, modes, i, j, &c, &k);
        }
        PresetId::Quon { q } => {
            let denom = Rational::one() - q * q;
            if denom.is_zero() {
                return Err(pole("1/(1 - q^2) at |q| = 1"));
            }
            add_y_bilinear(&mut op, modes, i, j, q, &denom.recip());
        }
        PresetId::PalevFermi { p } | PresetId::PalevBose { p } | PresetId::PalevSuper { p, .. } => {
            if *p == 1 {
                return Err(pole("1/(p-1) at p = 1"));
            }
            let p = *p as i64;
            let graded = matches!(preset, PresetId::PalevSuper { .. });
            let odd_ij = (spec.grade(i) + spec.grade(j)) % 2 == 1;
            let sign = |ls: &[ModeIndex]| -> Rational {
                let fermionic = ls.iter().filter(|&&l| spec.grade(l) == 1).count();
                if graded && odd_ij && fermionic % 2 == 1 {
                    int(-1)
                } else {
                    int(1)
                }
            };
            let second = rat(1, p - 1);
            for l in (1..=modes).map(mi) {
                op.add(vec![l, j], vec![i, l], &second * sign(&[l]));
            }
            // The third-order term has a (p-2) pole and is absent for p = 2.
            if p > 2 {
                let third = rat(2, (p - 1) * (p - 2));
                for l1 in (1..=modes).map(mi) {
                    for l2 in (1..=modes).map(mi) {
                        op.add(vec![l2, l1, j], vec![i, l1, l2], &third * sign(&[l1, l2]));
                    }
                }
            }
        }
        other => return Err(Error::NoPublishedExpansion(other.to_string())),
    }
    Ok(op)
}

/// True when `op` acts as `N_ij` on every word with at most `n_max`
/// particles, equality taken in the Fock space (modulo null vectors).
pub fn verify_transition(
    spec: &AlgebraSpec,
    op: &NormalOrderedOperator,
    i: ModeIndex,
    j: ModeIndex,
    n_max: usize,
) -> Result<bool> {
    for n in 0..=n_max {
        for w in spec.all_words(n) {
            let s = FockState::from(w);
            let lhs = apply_operator(spec, op, &s)?;
            let rhs = spec.transition_apply(i, j, &s)?;
            if !spec.states_equivalent(&lhs, &rhs)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of checking an expansion for every index pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionVerdict {
    pub preset: String,
    pub n_max: usize,
    pub max_order: usize,
    pub pairs_checked: usize,
    /// `(i, j)` pairs where the expansion disagrees with `N_ij`.
    pub failures: Vec<(usize, usize)>,
}

impl TransitionVerdict {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_transition_all(
    preset: &PresetId,
    spec: &AlgebraSpec,
    n_max: usize,
) -> Result<TransitionVerdict> {
    let mut failures = Vec::new();
    let mut pairs = 0;
    let mut max_order = 0;
    for i in spec.mode_indices() {
        for j in spec.mode_indices() {
            let op = instantiate_expansion(preset, spec, i, j)?;
            max_order = max_order.max(op.order());
            pairs += 1;
            if !verify_transition(spec, &op, i, j, n_max)? {
                failures.push((i.get(), j.get()));
            }
        }
    }
    Ok(TransitionVerdict {
        preset: preset.to_string(),
        n_max,
        max_order,
        pairs_checked: pairs,
        failures,
    })
}

/// Checks `[[a_i, a+_j]_q, a+_k] = x d_ij a+_k + y d_ik a+_j + z d_jk a+_i`
/// on every word with at most `n_max` particles and every index triple.
pub fn verify_triple_relation(
    spec: &AlgebraSpec,
    x: &Rational,
    y: &Rational,
    z: &Rational,
    q: &Rational,
    n_max: usize,
) -> Result<bool> {
    match spec.f().as_affine() {
        Some((a, _)) if a.is_one() => {}
        _ => return Err(Error::NotAffineFamily("f is not 1 + x n".into())),
    }
    if !spec.h().is_constant_one() {
        return Err(Error::NotAffineFamily("exchange scale h is not 1".into()));
    }
    if spec.is_graded() {
        return Err(Error::NotAffineFamily("graded modes".into()));
    }
    if n_max + 2 > spec.max_n() {
        return Err(Error::MaxNExceeded {
            n: n_max + 2,
            max_n: spec.max_n(),
        });
    }
    let delta = |a: ModeIndex, b: ModeIndex| a == b;
    for n in 0..=n_max {
        for w in spec.all_words(n) {
            let s = FockState::from(w);
            for i in spec.mode_indices() {
                for j in spec.mode_indices() {
                    for k in spec.mode_indices() {
                        let cre = |k: ModeIndex, s: &FockState| spec.apply_creation(s, k);
                        let ann = |k: ModeIndex, s: &FockState| spec.annihilate(k, s);
                        // a_i a+_j a+_k s - q a+_j a_i a+_k s
                        let ks = cre(k, &s)?;
                        let t1 = ann(i, &cre(j, &ks)?)?;
                        let t2 = cre(j, &ann(i, &ks)?)?.scaled(q);
                        // - a+_k (a_i a+_j s - q a+_j a_i s)
                        let t3 = cre(k, &ann(i, &cre(j, &s)?)?)?;
                        let t4 = cre(k, &cre(j, &ann(i, &s)?)?)?.scaled(q);
                        let lhs = &(&(&t1 - &t2) - &t3) + &t4;
                        let mut rhs = FockState::zero();
                        if delta(i, j) && !x.is_zero() {
                            rhs = &rhs + &cre(k, &s)?.scaled(x);
                        }
                        if delta(i, k) && !y.is_zero() {
                            rhs = &rhs + &cre(j, &s)?.scaled(y);
                        }
                        if delta(j, k) && !z.is_zero() {
                            rhs = &rhs + &cre(i, &s)?.scaled(z);
                        }
                        if !spec.states_equivalent(&lhs, &rhs)? {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `(x, y, z, q)` recovered from an affine-family spec with constant
/// coefficients, if it is one.
pub fn affine_parameters(spec: &AlgebraSpec) -> Option<[Rational; 4]> {
    let (a, x) = spec.f().as_affine()?;
    if !a.is_one() || !spec.h().is_constant_one() || spec.is_graded() || !spec.is_index_uniform() {
        return None;
    }
    let first = |m: &crate::linalg::RationalMatrix| -> Option<Rational> {
        let v = m.get(0, 0).clone();
        (m.entries().iter().all(|e| *e == v)).then_some(v)
    };
    Some([
        x.clone(),
        first(spec.y())?,
        first(spec.z())?,
        first(spec.q())?,
    ])
}

/// Necessary condition for a positive metric in the affine family.
pub fn z_sign_ok(z: &Rational) -> bool {
    !z.is_negative()
}
