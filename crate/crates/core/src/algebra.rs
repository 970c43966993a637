//! Algebras of `M` creation/annihilation pairs given by a normally ordered
//! rewrite rule, and their exact action on Fock states.
//!
//! The rule is
//!
//! ```text
//! a_i a+_j = f(N) d_ij + q_ij h(N) a+_j a_i + y_ij N_ij + z_ij N_ji
//! ```
//!
//! together with `a_i |0> = 0` and `<0|0> = 1`. Here `N_ij` is the
//! transition number operator: on a word of creation operators it
//! replaces one occurrence of mode `i` by mode `j` (with a sign for graded
//! modes), summed over occurrences.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::{format_rational, parse_rational, Rational};

/// Default particle-number ceiling. The generic Gram matrix at `N = 6`
/// already has `720²` entries.
pub const DEFAULT_MAX_N: usize = 6;

/// A mode label, 1-based.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeIndex(u16);

impl ModeIndex {
    pub fn new(value: usize) -> Result<Self> {
        if value == 0 || value > u16::MAX as usize {
            return Err(Error::IndexOutOfRange {
                index: value,
                modes: u16::MAX as usize,
            });
        }
        Ok(ModeIndex(value as u16))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Zero-based position for matrix lookups.
    pub(crate) fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A level-dependent coefficient `n -> value`, total on the naturals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LevelFnRepr", into = "LevelFnRepr")]
pub enum LevelFn {
    /// `n -> a + b n`
    Affine(Rational, Rational),
    /// `n -> 1` if `n < p`, else `0`.
    Step(u64),
    Product(Vec<LevelFn>),
}

impl LevelFn {
    pub fn constant(c: Rational) -> Self {
        LevelFn::Affine(c, Rational::zero())
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn eval(&self, n: usize) -> Rational {
        match self {
            LevelFn::Affine(a, b) => a + b * Rational::from_integer(n.into()),
            LevelFn::Step(p) => {
                if (n as u64) < *p {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            LevelFn::Product(fs) => fs.iter().fold(Rational::one(), |acc, f| acc * f.eval(n)),
        }
    }

    /// `(a, b)` when the function is literally `a + b n`.
    pub fn as_affine(&self) -> Option<(&Rational, &Rational)> {
        match self {
            LevelFn::Affine(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(self.as_affine(), Some((a, b)) if a.is_one() && b.is_zero())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum LevelFnRepr {
    Affine([String; 2]),
    Step(u64),
    Product(Vec<LevelFnRepr>),
}

impl TryFrom<LevelFnRepr> for LevelFn {
    type Error = Error;

    fn try_from(r: LevelFnRepr) -> Result<Self> {
        Ok(match r {
            LevelFnRepr::Affine([a, b]) => {
                LevelFn::Affine(parse_rational(&a)?, parse_rational(&b)?)
            }
            LevelFnRepr::Step(0) => {
                return Err(Error::InvalidParameter(
                    "step threshold must be positive".into(),
                ))
            }
            LevelFnRepr::Step(p) => LevelFn::Step(p),
            LevelFnRepr::Product(fs) => LevelFn::Product(
                fs.into_iter()
                    .map(LevelFn::try_from)
                    .collect::<Result<Vec<_>>>()?,
            ),
        })
    }
}

impl From<LevelFn> for LevelFnRepr {
    fn from(f: LevelFn) -> Self {
        match f {
            LevelFn::Affine(a, b) => {
                LevelFnRepr::Affine([format_rational(&a), format_rational(&b)])
            }
            LevelFn::Step(p) => LevelFnRepr::Step(p),
            LevelFn::Product(fs) => LevelFnRepr::Product(fs.into_iter().map(Into::into).collect()),
        }
    }
}

/// A creation-operator word `a+_{k_1} ... a+_{k_N} |0>`; the leftmost
/// letter is applied last. The empty word is the vacuum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<ModeIndex>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(word: Vec<ModeIndex>) -> Self {
        Monomial(word)
    }

    /// From 1-based mode numbers.
    pub fn from_modes(modes: &[usize]) -> Result<Self> {
        modes
            .iter()
            .map(|&m| ModeIndex::new(m))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }

    pub fn word(&self) -> &[ModeIndex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Occupation of each mode `1..=modes`.
    pub fn multiplicities(&self, modes: usize) -> Vec<usize> {
        let mut counts = vec![0; modes];
        for k in &self.0 {
            counts[k.slot()] += 1;
        }
        counts
    }

    pub fn modes(&self) -> Vec<usize> {
        self.0.iter().map(|k| k.get()).collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "|0>");
        }
        for k in &self.0 {
            write!(f, "a+{k} ")?;
        }
        write!(f, "|0>")
    }
}

/// A finite rational combination of words, stored in lexicographic word
/// order with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FockState {
    terms: BTreeMap<Monomial, Rational>,
}

impl FockState {
    pub fn zero() -> Self {
        FockState::default()
    }

    pub fn vacuum() -> Self {
        Self::from(Monomial::vacuum())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut s = FockState::zero();
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn add_term(&mut self, monomial: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn vacuum_coefficient(&self) -> Rational {
        self.coefficient(&Monomial::vacuum())
    }

    pub fn max_particles(&self) -> usize {
        self.terms.keys().map(Monomial::len).max().unwrap_or(0)
    }

    pub fn scaled(&self, c: &Rational) -> FockState {
        if c.is_zero() {
            return FockState::zero();
        }
        FockState {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Splits into fixed-particle-number components.
    pub fn homogeneous_parts(&self) -> BTreeMap<usize, FockState> {
        let mut parts: BTreeMap<usize, FockState> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.len())
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        parts
    }
}

impl From<Monomial> for FockState {
    fn from(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Rational::one());
        FockState { terms }
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c}) {m}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &FockState {
    type Output = FockState;
    fn add(self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &FockState {
    type Output = FockState;
    fn sub(self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &FockState {
    type Output = FockState;
    fn neg(self) -> FockState {
        self.scaled(&-Rational::one())
    }
}

impl Mul<&FockState> for &Rational {
    type Output = FockState;
    fn mul(self, rhs: &FockState) -> FockState {
        rhs.scaled(self)
    }
}

/// Word-to-coefficient accumulator used inside the recursions.
type Terms = BTreeMap<Vec<ModeIndex>, Rational>;

fn accumulate(out: &mut Terms, word: Vec<ModeIndex>, coeff: Rational) {
    if coeff.is_zero() {
        return;
    }
    match out.entry(word) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += coeff;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn into_state(terms: Terms) -> FockState {
    FockState {
        terms: terms.into_iter().map(|(w, c)| (Monomial(w), c)).collect(),
    }
}

/// A parameterized algebra: mode count, grades, and the coefficients of
/// the normally ordered rewrite rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraSpecRepr", into = "AlgebraSpecRepr")]
pub struct AlgebraSpec {
    modes: usize,
    grades: Vec<u8>,
    f: LevelFn,
    h: LevelFn,
    q: RationalMatrix,
    y: RationalMatrix,
    z: RationalMatrix,
    max_n: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraSpecRepr {
    modes: usize,
    grades: Vec<u8>,
    f: LevelFn,
    h: LevelFn,
    q: RationalMatrix,
    y: RationalMatrix,
    z: RationalMatrix,
    max_n: usize,
}

impl TryFrom<AlgebraSpecRepr> for AlgebraSpec {
    type Error = Error;
    fn try_from(r: AlgebraSpecRepr) -> Result<Self> {
        AlgebraSpec::new(r.modes, r.grades, r.f, r.h, r.q, r.y, r.z, r.max_n)
    }
}

impl From<AlgebraSpec> for AlgebraSpecRepr {
    fn from(s: AlgebraSpec) -> Self {
        AlgebraSpecRepr {
            modes: s.modes,
            grades: s.grades,
            f: s.f,
            h: s.h,
            q: s.q,
            y: s.y,
            z: s.z,
            max_n: s.max_n,
        }
    }
}

impl AlgebraSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        modes: usize,
        grades: Vec<u8>,
        f: LevelFn,
        h: LevelFn,
        q: RationalMatrix,
        y: RationalMatrix,
        z: RationalMatrix,
        max_n: usize,
    ) -> Result<Self> {
        if modes == 0 || modes > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("mode count {modes}")));
        }
        if max_n == 0 {
            return Err(Error::InvalidParameter("max_n must be positive".into()));
        }
        if grades.len() != modes || grades.iter().any(|&g| g > 1) {
            return Err(Error::InvalidParameter(
                "grades must list 0 or 1 for every mode".into(),
            ));
        }
        for (name, m) in [("q", &q), ("y", &y), ("z", &z)] {
            if m.rows() != modes || m.cols() != modes {
                return Err(Error::InvalidParameter(format!(
                    "{name} is {}x{}, expected {modes}x{modes}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(AlgebraSpec {
            modes,
            grades,
            f,
            h,
            q,
            y,
            z,
            max_n,
        })
    }

    /// Ungraded algebra with the same `q`, `y`, `z` for every index pair.
    pub fn uniform(
        modes: usize,
        f: LevelFn,
        h: LevelFn,
        q: Rational,
        y: Rational,
        z: Rational,
    ) -> Result<Self> {
        AlgebraSpec::new(
            modes,
            vec![0; modes],
            f,
            h,
            RationalMatrix::filled(modes, modes, q),
            RationalMatrix::filled(modes, modes, y),
            RationalMatrix::filled(modes, modes, z),
            DEFAULT_MAX_N,
        )
    }

    /// `a_i a+_j = (1 + xN) d_ij + q a+_j a_i + y N_ij + z N_ji`.
    pub fn affine_family(
        modes: usize,
        x: Rational,
        y: Rational,
        z: Rational,
        q: Rational,
    ) -> Result<Self> {
        Self::uniform(
            modes,
            LevelFn::Affine(Rational::one(), x),
            LevelFn::one(),
            q,
            y,
            z,
        )
    }

    pub fn with_max_n(mut self, max_n: usize) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::InvalidParameter("max_n must be positive".into()));
        }
        self.max_n = max_n;
        Ok(self)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn grades(&self) -> &[u8] {
        &self.grades
    }

    pub fn grade(&self, i: ModeIndex) -> u8 {
        self.grades[i.slot()]
    }

    pub fn f(&self) -> &LevelFn {
        &self.f
    }

    pub fn h(&self) -> &LevelFn {
        &self.h
    }

    pub fn q(&self) -> &RationalMatrix {
        &self.q
    }

    pub fn y(&self) -> &RationalMatrix {
        &self.y
    }

    pub fn z(&self) -> &RationalMatrix {
        &self.z
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn is_graded(&self) -> bool {
        self.grades.contains(&1)
    }

    /// All mode indices `1..=M`.
    pub fn mode_indices(&self) -> impl Iterator<Item = ModeIndex> + Clone {
        (1..=self.modes as u16).map(ModeIndex)
    }

    pub fn mode(&self, value: usize) -> Result<ModeIndex> {
        let i = ModeIndex::new(value).map_err(|_| Error::IndexOutOfRange {
            index: value,
            modes: self.modes,
        })?;
        self.check_mode(i)?;
        Ok(i)
    }

    pub fn check_mode(&self, i: ModeIndex) -> Result<()> {
        if i.get() > self.modes {
            return Err(Error::IndexOutOfRange {
                index: i.get(),
                modes: self.modes,
            });
        }
        Ok(())
    }

    pub(crate) fn check_state(&self, state: &FockState) -> Result<()> {
        for m in state.terms.keys() {
            if m.len() > self.max_n {
                return Err(Error::MaxNExceeded {
                    n: m.len(),
                    max_n: self.max_n,
                });
            }
            for &k in m.word() {
                self.check_mode(k)?;
            }
        }
        Ok(())
    }

    /// Invariant under every simultaneous relabeling of the modes: equal
    /// grades, and each coefficient matrix constant on and off its
    /// diagonal.
    pub fn is_index_uniform(&self) -> bool {
        let equal_grades = self.grades.windows(2).all(|w| w[0] == w[1]);
        let uniform = |m: &RationalMatrix| {
            let d = m.get(0, 0);
            let off = (self.modes > 1).then(|| m.get(0, 1));
            (0..self.modes).all(|r| {
                (0..self.modes).all(|c| {
                    if r == c {
                        m.get(r, c) == d
                    } else {
                        Some(m.get(r, c)) == off
                    }
                })
            })
        };
        equal_grades && uniform(&self.q) && uniform(&self.y) && uniform(&self.z)
    }

    /// With `z_ij = 0` for `i != j`, `a_i` lowers the occupation of mode
    /// `i` by exactly one, so words with different occupations are
    /// orthogonal.
    pub fn conserves_multiplicities(&self) -> bool {
        (0..self.modes).all(|r| (0..self.modes).all(|c| r == c || self.z.get(r, c).is_zero()))
    }

    /// Prepends `a+_i` to every word.
    pub fn apply_creation(&self, state: &FockState, i: ModeIndex) -> Result<FockState> {
        self.check_mode(i)?;
        Ok(FockState {
            terms: state
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut w = Vec::with_capacity(m.len() + 1);
                    w.push(i);
                    w.extend_from_slice(m.word());
                    (Monomial(w), c.clone())
                })
                .collect(),
        })
    }

    /// Applies the word's creation operators to `state`, rightmost first.
    pub fn apply_creation_word(&self, state: &FockState, word: &[ModeIndex]) -> Result<FockState> {
        word.iter()
            .rev()
            .try_fold(state.clone(), |s, &k| self.apply_creation(&s, k))
    }

    /// `(-1)^{(s_i + s_j) s_k}` for moving `N_ij` past `a+_k`.
    fn transition_parity(&self, i: ModeIndex, j: ModeIndex) -> bool {
        (self.grade(i) + self.grade(j)) % 2 == 1
    }

    fn transition_into(
        &self,
        i: ModeIndex,
        j: ModeIndex,
        word: &[ModeIndex],
        prefix: &[ModeIndex],
        coeff: &Rational,
        out: &mut Terms,
    ) {
        let odd = self.transition_parity(i, j);
        let mut negative = false;
        for (m, &k) in word.iter().enumerate() {
            if k == i {
                let mut w = Vec::with_capacity(prefix.len() + word.len());
                w.extend_from_slice(prefix);
                w.extend_from_slice(word);
                w[prefix.len() + m] = j;
                let c = if negative {
                    -coeff.clone()
                } else {
                    coeff.clone()
                };
                accumulate(out, w, c);
            }
            if odd && self.grade(k) == 1 {
                negative = !negative;
            }
        }
    }

    /// The transition number operator `N_ij`: replaces one `a+_i` by
    /// `a+_j`, summed over positions, with the graded sign of the letters
    /// it passes.
    pub fn transition_apply(
        &self,
        i: ModeIndex,
        j: ModeIndex,
        state: &FockState,
    ) -> Result<FockState> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        let mut out = Terms::new();
        for (m, c) in &state.terms {
            self.transition_into(i, j, m.word(), &[], c, &mut out);
        }
        Ok(into_state(out))
    }

    fn annihilate_into(
        &self,
        i: ModeIndex,
        word: &[ModeIndex],
        prefix: &mut Vec<ModeIndex>,
        coeff: &Rational,
        out: &mut Terms,
    ) {
        let Some((&j, rest)) = word.split_first() else {
            return;
        };
        let n = rest.len();
        let (r, c) = (i.slot(), j.slot());
        if i == j {
            let fc = coeff * self.f.eval(n);
            if !fc.is_zero() {
                let mut w = prefix.clone();
                w.extend_from_slice(rest);
                accumulate(out, w, fc);
            }
        }
        let q = self.q.get(r, c);
        if !q.is_zero() {
            let qh = q * self.h.eval(n);
            if !qh.is_zero() {
                prefix.push(j);
                self.annihilate_into(i, rest, prefix, &(coeff * qh), out);
                prefix.pop();
            }
        }
        let y = self.y.get(r, c);
        if !y.is_zero() {
            self.transition_into(i, j, rest, prefix, &(coeff * y), out);
        }
        let z = self.z.get(r, c);
        if !z.is_zero() {
            self.transition_into(j, i, rest, prefix, &(coeff * z), out);
        }
    }

    /// `a_i` acting on `state` through the rewrite rule.
    pub fn annihilate(&self, i: ModeIndex, state: &FockState) -> Result<FockState> {
        self.check_mode(i)?;
        self.check_state(state)?;
        Ok(self.annihilate_unchecked(i, state))
    }

    pub(crate) fn annihilate_unchecked(&self, i: ModeIndex, state: &FockState) -> FockState {
        let mut out = Terms::new();
        let mut prefix = Vec::new();
        for (m, c) in &state.terms {
            self.annihilate_into(i, m.word(), &mut prefix, c, &mut out);
        }
        into_state(out)
    }

    /// Applies `a_{w_1}` first, then `a_{w_2}`, and so on: the adjoint of
    /// creating the word `w`.
    pub fn annihilate_word(&self, word: &[ModeIndex], state: &FockState) -> Result<FockState> {
        for &k in word {
            self.check_mode(k)?;
        }
        self.check_state(state)?;
        let mut s = state.clone();
        for &k in word {
            if s.is_zero() {
                break;
            }
            s = self.annihilate_unchecked(k, &s);
        }
        Ok(s)
    }

    /// `<u|v> = <0| a_{u_N} ... a_{u_1} a+_{v_1} ... a+_{v_N} |0>`.
    pub fn inner_product(&self, u: &Monomial, v: &Monomial) -> Result<Rational> {
        self.inner_product_state(u, &FockState::from(v.clone()))
    }

    /// `<u|v>` for a general ket.
    pub fn inner_product_state(&self, u: &Monomial, v: &FockState) -> Result<Rational> {
        if u.len() > self.max_n {
            return Err(Error::MaxNExceeded {
                n: u.len(),
                max_n: self.max_n,
            });
        }
        for &k in u.word() {
            self.check_mode(k)?;
        }
        self.check_state(v)?;
        // Each annihilator lowers particle number by exactly one.
        let v = FockState {
            terms: v
                .terms
                .iter()
                .filter(|(m, _)| m.len() == u.len())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        };
        Ok(self.annihilate_word(u.word(), &v)?.vacuum_coefficient())
    }

    /// True when `<w|state> = 0` for every word `w`, i.e. the state is the
    /// zero vector of the Fock space.
    pub fn is_null(&self, state: &FockState) -> Result<bool> {
        self.check_state(state)?;
        Ok(state
            .homogeneous_parts()
            .values()
            .all(|part| self.is_null_homogeneous(part)))
    }

    fn is_null_homogeneous(&self, state: &FockState) -> bool {
        if state.is_zero() {
            return true;
        }
        if state.max_particles() == 0 {
            return false;
        }
        self.mode_indices()
            .all(|k| self.is_null_homogeneous(&self.annihilate_unchecked(k, state)))
    }

    /// Equality as Fock-space vectors (formal difference is null).
    pub fn states_equivalent(&self, a: &FockState, b: &FockState) -> Result<bool> {
        self.is_null(&(a - b))
    }

    /// All `M^n` words of length `n` in lexicographic order.
    pub fn all_words(&self, n: usize) -> Vec<Monomial> {
        let mut words = vec![Vec::new()];
        for _ in 0..n {
            words = words
                .into_iter()
                .flat_map(|w: Vec<ModeIndex>| {
                    self.mode_indices().map(move |k| {
                        let mut w = w.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        words.into_iter().map(Monomial).collect()
    }
}
