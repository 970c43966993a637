//! Dense exact linear algebra over the rationals.
//!
//! Everything here decides signs and ranks exactly; there is no floating
//! point on any path.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged matrix rows".into()));
        }
        let n = rows.len();
        Ok(RationalMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Constant `rows x cols` matrix.
    pub fn filled(rows: usize, cols: usize, value: Rational) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    /// First `(row, col)` with `A[row][col] != A[col][row]`, scanning the
    /// upper triangle row by row.
    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for r in 0..self.rows {
            for c in r + 1..self.cols {
                if self.get(r, c) != self.get(c, r) {
                    return Some((r, c));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `wᵀ A w`.
    pub fn quadratic_form(&self, w: &[Rational]) -> Rational {
        self.mul_vec(w)
            .iter()
            .zip(w)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(format_rational).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RationalMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// Outcome of [`psd_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd,
    /// `witnessᵀ A witness = value < 0`.
    Indefinite {
        witness: Vec<Rational>,
        value: Rational,
    },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PsdVerdict::Psd => "PSD",
            PsdVerdict::Indefinite { .. } => "INDEFINITE",
        }
    }
}

/// Scales a row of rationals to integers by the lcm of its denominators.
fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn rank(a: &RationalMatrix) -> usize {
    let mut m: Vec<Vec<BigInt>> = (0..a.rows())
        .map(|r| clear_denominators(a.row(r)))
        .collect();
    let (rows, cols) = (a.rows(), a.cols());
    let mut prev = BigInt::one();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let Some(found) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, found);
        let (head, tail) = m.split_at_mut(pivot_row + 1);
        let pivot = &head[pivot_row];
        for row in tail.iter_mut() {
            let lead = row[col].clone();
            for c in col + 1..cols {
                let num = &pivot[col] * &row[c] - &lead * &pivot[c];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                row[c] = q;
            }
            row[col] = BigInt::zero();
        }
        prev = m[pivot_row][col].clone();
        pivot_row += 1;
    }
    pivot_row
}

/// Multiplies `v` by a positive rational so that it becomes a primitive
/// integer vector. Zero vectors are returned unchanged.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

/// Cheapest witness with support at most two and entries in {-1, 0, 1}:
/// the most negative diagonal, else the most negative `e_i ± e_j`.
fn sparse_witness(a: &RationalMatrix) -> Option<(Vec<Rational>, Rational)> {
    let n = a.rows();
    let unit = (0..n)
        .filter(|&i| a.get(i, i).is_negative())
        .min_by(|&i, &j| a.get(i, i).cmp(a.get(j, j)).then(i.cmp(&j)));
    if let Some(i) = unit {
        let mut w = vec![Rational::zero(); n];
        w[i] = Rational::one();
        return Some((w, a.get(i, i).clone()));
    }
    let mut best: Option<(usize, usize, bool, Rational)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let base = a.get(i, i) + a.get(j, j);
            let cross = a.get(i, j) + a.get(j, i);
            for plus in [true, false] {
                let value = if plus { &base + &cross } else { &base - &cross };
                if value.is_negative() && best.as_ref().is_none_or(|b| value < b.3) {
                    best = Some((i, j, plus, value));
                }
            }
        }
    }
    best.map(|(i, j, plus, value)| {
        let mut w = vec![Rational::zero(); n];
        w[i] = Rational::one();
        w[j] = if plus {
            Rational::one()
        } else {
            -Rational::one()
        };
        (w, value)
    })
}

/// Positive-semidefiniteness by LDLᵀ with symmetric pivoting on the largest
/// remaining diagonal entry (ties to the smallest index).
///
/// When the matrix is indefinite the returned witness prefers a
/// support-two `{-1,0,1}` vector if one exists; otherwise it is the vector
/// recovered from the elimination (negative pivot, or the `[[0,b],[b,d]]`
/// block of a zero-diagonal remainder), scaled to a primitive integer
/// vector.
pub fn psd_check(a: &RationalMatrix) -> Result<PsdVerdict> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut s = a.to_rows();
    let mut remaining: Vec<usize> = (0..n).collect();
    // (pivot, [(j, s_jp / d)]) per elimination step.
    let mut steps: Vec<(usize, Vec<(usize, Rational)>)> = Vec::new();

    let seed: Vec<(usize, Rational)> = loop {
        let Some(&p) = remaining
            .iter()
            .max_by(|&&i, &&j| s[i][i].cmp(&s[j][j]).then(j.cmp(&i)))
        else {
            return Ok(PsdVerdict::Psd);
        };
        let d = s[p][p].clone();
        if d.is_positive() {
            let rest: Vec<usize> = remaining.iter().copied().filter(|&j| j != p).collect();
            let multipliers: Vec<(usize, Rational)> =
                rest.iter().map(|&j| (j, &s[j][p] / &d)).collect();
            for (j, l) in &multipliers {
                if l.is_zero() {
                    continue;
                }
                for &k in &rest {
                    if !s[p][k].is_zero() {
                        let delta = l * &s[p][k];
                        s[*j][k] -= delta;
                    }
                }
            }
            steps.push((p, multipliers));
            remaining.retain(|&j| j != p);
            continue;
        }
        if d.is_negative() {
            break vec![(p, Rational::one())];
        }
        // Largest remaining diagonal is zero.
        if let Some(&m) = remaining
            .iter()
            .filter(|&&j| s[j][j].is_negative())
            .min_by(|&&i, &&j| s[i][i].cmp(&s[j][j]).then(i.cmp(&j)))
        {
            break vec![(m, Rational::one())];
        }
        let off = remaining.iter().enumerate().find_map(|(x, &j)| {
            remaining[x + 1..]
                .iter()
                .find(|&&k| !s[j][k].is_zero())
                .map(|&k| (j, k))
        });
        match off {
            None => return Ok(PsdVerdict::Psd),
            Some((j, k)) => {
                let b = &s[j][k];
                let dk = &s[k][k];
                // (t e_j + e_k): value 2bt + d_k < 0.
                let two = Rational::from_integer(2.into());
                let mag = dk.abs() / (&two * b.abs()) + Rational::one();
                let t = if b.is_positive() { -mag } else { mag };
                break vec![(j, t), (k, Rational::one())];
            }
        }
    };

    let mut w = vec![Rational::zero(); n];
    for (idx, value) in seed {
        w[idx] = value;
    }
    for (p, multipliers) in steps.iter().rev() {
        let acc = multipliers
            .iter()
            .fold(Rational::zero(), |acc, (j, l)| acc + l * &w[*j]);
        w[*p] = -acc;
    }

    if let Some((witness, value)) = sparse_witness(a) {
        return Ok(PsdVerdict::Indefinite { witness, value });
    }
    let witness = primitive_integer_vector(&w);
    let value = a.quadratic_form(&witness);
    assert!(value.is_negative(), "elimination witness must be negative");
    Ok(PsdVerdict::Indefinite { witness, value })
}

/// Basis of `{v : A v = 0}` from the reduced row echelon form. Each vector
/// has a 1 in its free column and is scaled to a primitive integer vector.
pub fn null_basis(a: &RationalMatrix) -> Vec<Vec<Rational>> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.to_rows();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(found) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, found);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            primitive_integer_vector(&v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[Rational]]) -> RationalMatrix {
        RationalMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RationalMatrix::identity(3)), 3);
        assert_eq!(rank(&RationalMatrix::zeros(3, 3)), 0);
        let palev = m(&[&[rat(1, 2), rat(-1, 2)], &[rat(-1, 2), rat(1, 2)]]);
        assert_eq!(rank(&palev), 1);
        let quon = m(&[&[int(1), rat(1, 2)], &[rat(1, 2), int(1)]]);
        assert_eq!(rank(&quon), 2);
        assert_eq!(rank(&RationalMatrix::zeros(0, 0)), 0);
    }

    #[test]
    fn rank_rectangular_and_skipped_columns() {
        let a = m(&[
            &[int(0), int(1), int(2)],
            &[int(0), int(2), int(4)],
            &[int(0), int(0), int(1)],
        ]);
        assert_eq!(rank(&a), 2);
        let wide = m(&[
            &[int(1), int(2), int(3), int(4)],
            &[int(2), int(4), int(6), int(8)],
        ]);
        assert_eq!(rank(&wide), 1);
    }

    #[test]
    fn psd_identity_and_zero() {
        assert_eq!(
            psd_check(&RationalMatrix::identity(4)).unwrap(),
            PsdVerdict::Psd
        );
        assert_eq!(
            psd_check(&RationalMatrix::zeros(3, 3)).unwrap(),
            PsdVerdict::Psd
        );
        assert!(psd_check(&RationalMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn psd_indefinite_two_by_two() {
        let a = m(&[&[int(1), int(2)], &[int(2), int(1)]]);
        match psd_check(&a).unwrap() {
            PsdVerdict::Indefinite { witness, value } => {
                assert_eq!(witness, vec![int(1), int(-1)]);
                assert_eq!(value, int(-2));
            }
            v => panic!("expected indefinite, got {v:?}"),
        }
    }

    #[test]
    fn psd_single_negative_entry() {
        let a = m(&[&[int(-1)]]);
        match psd_check(&a).unwrap() {
            PsdVerdict::Indefinite { witness, value } => {
                assert_eq!(witness, vec![int(1)]);
                assert_eq!(value, int(-1));
            }
            v => panic!("expected indefinite, got {v:?}"),
        }
    }

    #[test]
    fn psd_negative_behind_zero_diagonal() {
        let a = m(&[&[int(0), int(0)], &[int(0), int(-1)]]);
        match psd_check(&a).unwrap() {
            PsdVerdict::Indefinite { witness, value } => {
                assert_eq!(witness, vec![int(0), int(1)]);
                assert_eq!(value, int(-1));
            }
            v => panic!("expected indefinite, got {v:?}"),
        }
    }

    #[test]
    fn psd_zero_diagonal_with_coupling() {
        let a = m(&[&[int(0), int(3)], &[int(3), int(0)]]);
        let v = psd_check(&a).unwrap();
        assert!(!v.is_psd());
        if let PsdVerdict::Indefinite { witness, value } = v {
            assert_eq!(a.quadratic_form(&witness), value);
            assert!(value.is_negative());
        }
    }

    #[test]
    fn elimination_witness_without_sparse_shortcut() {
        // All diagonals and all e_i ± e_j forms are positive, but the
        // all-ones direction has value 3 - 18/5 < 0.
        let c = rat(-3, 5);
        let a = m(&[
            &[int(1), c.clone(), c.clone()],
            &[c.clone(), int(1), c.clone()],
            &[c.clone(), c.clone(), int(1)],
        ]);
        match psd_check(&a).unwrap() {
            PsdVerdict::Indefinite { witness, value } => {
                assert_eq!(a.quadratic_form(&witness), value);
                assert!(value.is_negative());
                assert!(witness.iter().all(|x| !x.is_zero()));
            }
            v => panic!("expected indefinite, got {v:?}"),
        }
    }

    #[test]
    fn null_basis_examples() {
        assert!(null_basis(&RationalMatrix::identity(3)).is_empty());
        let palev = m(&[&[rat(1, 2), rat(-1, 2)], &[rat(-1, 2), rat(1, 2)]]);
        assert_eq!(null_basis(&palev), vec![vec![int(1), int(1)]]);
        let z = RationalMatrix::zeros(2, 2);
        assert_eq!(null_basis(&z).len(), 2);
    }

    #[test]
    fn matrix_serde_round_trip() {
        let a = m(&[&[rat(1, 2), int(-3)], &[int(0), rat(7, 9)]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["1/2","-3/1"],["0/1","7/9"]]"#);
        let b: RationalMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
