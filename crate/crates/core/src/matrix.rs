//! Dense matrices of arbitrary-precision integers.
//!
//! This is the computational backbone of every presentation in the crate:
//! exact products, determinants (fraction-free Bareiss elimination), brute
//! force determinant divisors and Smith normal form. There is no floating
//! point anywhere in this module.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// A dense `rows x cols` matrix of exact integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

/// Invariant factors of a matrix under unimodular equivalence.
///
/// `invariant_factors` holds the positive diagonal entries `d_1 | d_2 | ...`
/// of the Smith normal form, one per nonzero diagonal slot; zero rows and
/// columns of the diagonal form are reported through `rank`, not as factors.
/// `determinant_divisors` holds the cumulative products
/// `D_i = d_1 * ... * d_i`, i.e. the gcds of all `i x i` minors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub determinant_divisors: Vec<BigInt>,
}

impl SnfResult {
    /// The invariant factors that are >= 2. These are the invariant factors
    /// of the abelian group presented by the matrix.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(IntegerMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for fixed test matrices.
    pub fn from_i64<const C: usize>(rows: &[[i64; C]]) -> Self {
        IntegerMatrix {
            rows: rows.len(),
            cols: C,
            entries: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
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

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        let idx = self.idx(i, j);
        self.entries[idx] = v;
    }

    /// Entries rendered as decimal strings, row by row. Integers always cross
    /// serialization boundaries in decimal form.
    pub fn rows_as_decimal(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).to_string()).collect())
            .collect()
    }

    pub fn multiply(&self, rhs: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntegerMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self.at(i, k);
                if lhs.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = out.idx(i, j);
                    out.entries[idx] += lhs * rhs.at(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination. The empty
    /// 0x0 matrix has determinant 1.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.at(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                    let (q, r) = t.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    m.set(i, j, q);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.at(k, k).clone();
        }
        let d = m.at(n - 1, n - 1).clone();
        Ok(if sign < 0 { -d } else { d })
    }

    /// Determinant divisors `D_1, D_2, ...` by direct enumeration of all
    /// `k x k` minors; `D_k` is the gcd of their absolute values. Enumeration
    /// stops at the first `k` whose minors all vanish (the rank bound).
    ///
    /// This route is deliberately independent of the elimination used by
    /// [`IntegerMatrix::snf`], so the two can check each other. Only meant
    /// for small matrices.
    pub fn determinant_divisors(&self) -> Vec<BigInt> {
        let kmax = self.rows.min(self.cols);
        let mut divisors = Vec::new();
        for k in 1..=kmax {
            let mut g = BigInt::zero();
            for row_set in combinations(self.rows, k) {
                for col_set in combinations(self.cols, k) {
                    let minor = self.submatrix(&row_set, &col_set);
                    let det = minor.determinant().expect("submatrix is square");
                    g = g.gcd(&det);
                    if g.is_one() {
                        break;
                    }
                }
                if g.is_one() {
                    break;
                }
            }
            if g.is_zero() {
                break;
            }
            divisors.push(g);
        }
        divisors
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(rows.len(), cols.len());
        for (i, &ri) in rows.iter().enumerate() {
            for (j, &cj) in cols.iter().enumerate() {
                m.set(i, j, self.at(ri, cj).clone());
            }
        }
        m
    }

    /// Smith normal form: the unique invariant factors of the matrix under
    /// unimodular row and column operations.
    ///
    /// Classic elimination. Each round picks the nonzero entry of least
    /// absolute value as pivot (which keeps coefficient growth down), clears
    /// its row and column with nearest-quotient reductions, and then forces
    /// the pivot to divide the whole remaining submatrix before moving on,
    /// so the divisibility chain holds by construction.
    pub fn snf(&self) -> SnfResult {
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut factors: Vec<BigInt> = Vec::new();

        'pivots: for k in 0..rows.min(cols) {
            let Some((pi, pj)) = m.min_abs_nonzero_from(k) else {
                break 'pivots;
            };
            m.swap_rows(k, pi);
            m.swap_cols(k, pj);
            loop {
                if m.at(k, k).is_negative() {
                    m.negate_row(k);
                }
                let mut clean = true;
                for i in k + 1..rows {
                    if m.at(i, k).is_zero() {
                        continue;
                    }
                    let q = div_nearest(m.at(i, k), m.at(k, k));
                    if !q.is_zero() {
                        m.row_sub_scaled(i, k, &q);
                    }
                    if !m.at(i, k).is_zero() {
                        // The remainder is strictly smaller: promote it and
                        // restart (it may be negative).
                        m.swap_rows(k, i);
                        clean = false;
                        break;
                    }
                }
                if !clean {
                    continue;
                }
                for j in k + 1..cols {
                    if m.at(k, j).is_zero() {
                        continue;
                    }
                    let q = div_nearest(m.at(k, j), m.at(k, k));
                    if !q.is_zero() {
                        m.col_sub_scaled(j, k, &q);
                    }
                    if !m.at(k, j).is_zero() {
                        m.swap_cols(k, j);
                        clean = false;
                        break;
                    }
                }
                if !clean {
                    continue;
                }
                if !m.at(k, k).magnitude().is_one() {
                    let mut divides_all = true;
                    'scan: for i in k + 1..rows {
                        for j in k + 1..cols {
                            if !(m.at(i, j) % m.at(k, k)).is_zero() {
                                // Pull the offending row up so the next round
                                // shrinks the pivot.
                                m.row_add(k, i);
                                divides_all = false;
                                break 'scan;
                            }
                        }
                    }
                    if !divides_all {
                        continue;
                    }
                }
                break;
            }
            factors.push(m.at(k, k).abs());
        }

        let mut determinant_divisors = Vec::with_capacity(factors.len());
        let mut acc = BigInt::one();
        for d in &factors {
            acc *= d;
            determinant_divisors.push(acc.clone());
        }
        SnfResult {
            rank: factors.len(),
            invariant_factors: factors,
            determinant_divisors,
        }
    }

    /// A pseudo-random product of elementary row operations (unit shears,
    /// swaps, sign flips), so its determinant is +-1. Deterministic in the
    /// seed. Used to fuzz invariance of the Smith normal form.
    pub fn random_unimodular(size: usize, seed: u64) -> IntegerMatrix {
        let mut m = IntegerMatrix::identity(size);
        if size < 2 {
            return m;
        }
        let mut rng = SplitMix64::new(seed);
        let steps = 3 * size * size;
        for _ in 0..steps {
            match rng.below(4) {
                0 => {
                    let (i, j) = distinct_pair(&mut rng, size);
                    let c = BigInt::from(rng.below(4) as i64 - 2);
                    if !c.is_zero() {
                        m.row_add_scaled(i, j, &c);
                    }
                }
                1 => {
                    let (i, j) = distinct_pair(&mut rng, size);
                    m.swap_rows(i, j);
                }
                2 => {
                    let i = rng.below(size as u64) as usize;
                    m.negate_row(i);
                }
                _ => {
                    let (i, j) = distinct_pair(&mut rng, size);
                    let c = BigInt::from(rng.below(2) as i64 + 1);
                    m.row_add_scaled(i, j, &(-c));
                }
            }
        }
        m
    }

    fn min_abs_nonzero_from(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..self.rows {
            for j in k..self.cols {
                let v = self.at(i, j);
                if v.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.at(bi, bj).magnitude() <= v.magnitude() => {}
                    _ => {
                        if v.magnitude().is_one() {
                            return Some((i, j));
                        }
                        best = Some((i, j));
                    }
                }
            }
        }
        best
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            let (a, b) = (self.idx(i, c), self.idx(j, c));
            self.entries.swap(a, b);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            let (a, b) = (self.idx(r, i), self.idx(r, j));
            self.entries.swap(a, b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let idx = self.idx(i, c);
            let v = std::mem::take(&mut self.entries[idx]);
            self.entries[idx] = -v;
        }
    }

    /// `row_i -= q * row_k`
    fn row_sub_scaled(&mut self, i: usize, k: usize, q: &BigInt) {
        for c in 0..self.cols {
            let t = q * self.at(k, c);
            let idx = self.idx(i, c);
            self.entries[idx] -= t;
        }
    }

    /// `row_i += q * row_k`
    fn row_add_scaled(&mut self, i: usize, k: usize, q: &BigInt) {
        for c in 0..self.cols {
            let t = q * self.at(k, c);
            let idx = self.idx(i, c);
            self.entries[idx] += t;
        }
    }

    /// `col_j -= q * col_k`
    fn col_sub_scaled(&mut self, j: usize, k: usize, q: &BigInt) {
        for r in 0..self.rows {
            let t = q * self.at(r, k);
            let idx = self.idx(r, j);
            self.entries[idx] -= t;
        }
    }

    /// `row_dst += row_src`
    fn row_add(&mut self, dst: usize, src: usize) {
        for c in 0..self.cols {
            let t = self.at(src, c).clone();
            let idx = self.idx(dst, c);
            self.entries[idx] += t;
        }
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix({}x{})", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "\n  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<usize> = (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self.at(i, j).to_string().len())
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        for i in 0..self.rows {
            write!(f, "[")?;
            for (j, width) in widths.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", self.at(i, j).to_string())?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Nearest-integer quotient for `a / p` with `p > 0`; the remainder
/// `a - q*p` lands in `(-p/2, p/2]`.
fn div_nearest(a: &BigInt, p: &BigInt) -> BigInt {
    debug_assert!(p.is_positive());
    let (mut q, r) = a.div_mod_floor(p);
    if &(&r + &r) > p {
        q += 1;
    }
    q
}

fn distinct_pair(rng: &mut SplitMix64, size: usize) -> (usize, usize) {
    let i = rng.below(size as u64) as usize;
    let mut j = rng.below(size as u64 - 1) as usize;
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// All `k`-element subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
