//! Exact integer matrix algebra: column Hermite normal form, Smith normal
//! form, integer kernels, lattice arithmetic (membership, solve, sum,
//! equality) and the mod-p counterparts. This is the engine room for
//! homology computations; matrices are dense `BigInt`, sizes are desk scale.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense column-major friendly integer matrix (stored row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows_in: Vec<Vec<i64>>) -> Self {
        let rows = rows_in.len();
        let cols = rows_in.first().map_or(0, |r| r.len());
        let data = rows_in
            .into_iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols);
                r.into_iter().map(BigInt::from)
            })
            .collect();
        IMat { rows, cols, data }
    }

    pub fn from_columns(rows: usize, cols_in: Vec<Vec<BigInt>>) -> Self {
        let cols = cols_in.len();
        let mut m = IMat::zero(rows, cols);
        for (j, col) in cols_in.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in 0..rows {
                *m.at_mut(i, j) = col[i].clone();
            }
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn col(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.at(i, j) * &v[j])
                    .fold(BigInt::zero(), |a, b| a + b)
            })
            .collect()
    }

    pub fn hstack(&self, other: &IMat) -> IMat {
        assert_eq!(self.rows, other.rows);
        let mut out = IMat::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(i, j) = self.at(i, j).clone();
            }
            for j in 0..other.cols {
                *out.at_mut(i, self.cols + j) = other.at(i, j).clone();
            }
        }
        out
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `col_a += f * col_b`
    fn add_col(&mut self, a: usize, b: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = f * self.at(r, b);
            *self.at_mut(r, a) += add;
        }
    }

    fn negate_col(&mut self, a: usize) {
        for r in 0..self.rows {
            let v = -self.at(r, a).clone();
            *self.at_mut(r, a) = v;
        }
    }

    pub fn rank(&self) -> usize {
        let (h, _) = hnf_col(self);
        (0..h.cols)
            .filter(|&j| (0..h.rows).any(|i| !h.at(i, j).is_zero()))
            .count()
    }
}

/// Column-style Hermite normal form: returns `(H, U)` with `A·U = H`, `U`
/// unimodular, `H` in column echelon form with nonnegative pivots and the
/// zero columns on the right.
pub fn hnf_col(a: &IMat) -> (IMat, IMat) {
    let mut h = a.clone();
    let mut u = IMat::identity(a.cols);
    let mut pivot_col = 0usize;
    for row in 0..a.rows {
        if pivot_col >= h.cols {
            break;
        }
        // gcd sweep on this row across columns ≥ pivot_col
        loop {
            let mut best: Option<(usize, BigInt)> = None;
            for j in pivot_col..h.cols {
                let v = h.at(row, j).abs();
                if !v.is_zero() {
                    match &best {
                        Some((_, b)) if *b <= v => {}
                        _ => best = Some((j, v)),
                    }
                }
            }
            let (jmin, _) = match best {
                Some(x) => x,
                None => break,
            };
            h.swap_cols(pivot_col, jmin);
            u.swap_cols(pivot_col, jmin);
            let piv = h.at(row, pivot_col).clone();
            let mut done = true;
            for j in pivot_col + 1..h.cols {
                let q = quot_round(h.at(row, j), &piv);
                if !q.is_zero() {
                    let neg_q = -q;
                    h.add_col(j, pivot_col, &neg_q);
                    u.add_col(j, pivot_col, &neg_q);
                }
                if !h.at(row, j).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.at(row, pivot_col).is_zero() {
            continue;
        }
        if h.at(row, pivot_col).is_negative() {
            h.negate_col(pivot_col);
            u.negate_col(pivot_col);
        }
        // reduce columns to the left of the pivot
        let piv = h.at(row, pivot_col).clone();
        for j in 0..pivot_col {
            let q = quot_floor(h.at(row, j), &piv);
            if !q.is_zero() {
                let neg_q = -q;
                h.add_col(j, pivot_col, &neg_q);
                u.add_col(j, pivot_col, &neg_q);
            }
        }
        pivot_col += 1;
    }
    (h, u)
}

fn quot_round(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer quotient keeps entries small during the gcd sweep
    let two = BigInt::from(2);
    let (q, r) = a.div_rem(b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn quot_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Basis of the integer kernel `{x : A x = 0}` as columns.
pub fn kernel_basis(a: &IMat) -> IMat {
    let (h, u) = hnf_col(a);
    let zero_cols: Vec<usize> = (0..h.cols)
        .filter(|&j| (0..h.rows).all(|i| h.at(i, j).is_zero()))
        .collect();
    let mut out = IMat::zero(a.cols, zero_cols.len());
    for (k, &j) in zero_cols.iter().enumerate() {
        for i in 0..a.cols {
            *out.at_mut(i, k) = u.at(i, j).clone();
        }
    }
    out
}

/// Factored integer solver: one Hermite decomposition, many right-hand
/// sides.
pub struct Solver {
    rows: usize,
    cols: usize,
    h: IMat,
    u: IMat,
}

impl Solver {
    pub fn new(a: &IMat) -> Self {
        let (h, u) = hnf_col(a);
        Solver {
            rows: a.rows,
            cols: a.cols,
            h,
            u,
        }
    }

    /// One solution of `A x = b` over the integers, if any. The forward
    /// substitution verifies the residual, so a returned solution is exact.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.rows);
        let mut residual: Vec<BigInt> = b.to_vec();
        let mut y = vec![BigInt::zero(); self.cols];
        let mut col = 0usize;
        for row in 0..self.rows {
            if col >= self.h.cols {
                break;
            }
            if self.h.at(row, col).is_zero() {
                continue;
            }
            let piv = self.h.at(row, col);
            let (q, r) = residual[row].div_rem(piv);
            if !r.is_zero() {
                return None;
            }
            for i in row..self.rows {
                let sub = &q * self.h.at(i, col);
                residual[i] -= sub;
            }
            y[col] = q;
            col += 1;
        }
        if residual.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(self.u.mul_vec(&y))
    }

    /// Solve for every column, producing the coordinate matrix.
    pub fn solve_matrix(&self, cols: &IMat) -> Option<IMat> {
        assert_eq!(cols.rows, self.rows);
        let mut out = IMat::zero(self.cols, cols.cols);
        for j in 0..cols.cols {
            let sol = self.solve(&cols.col(j))?;
            for i in 0..self.cols {
                *out.at_mut(i, j) = sol[i].clone();
            }
        }
        Some(out)
    }
}

/// Solve `A x = b` over the integers, if possible.
pub fn solve_int(a: &IMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    Solver::new(a).solve(b)
}

/// Does the integer lattice spanned by the columns of `a` contain `b`?
pub fn lattice_contains(a: &IMat, b: &[BigInt]) -> bool {
    solve_int(a, b).is_some()
}

/// Canonical form of a column lattice: the nonzero columns of the HNF.
pub fn lattice_canonical(a: &IMat) -> IMat {
    let (h, _) = hnf_col(a);
    let nonzero: Vec<usize> = (0..h.cols)
        .filter(|&j| (0..h.rows).any(|i| !h.at(i, j).is_zero()))
        .collect();
    let mut out = IMat::zero(a.rows, nonzero.len());
    for (k, &j) in nonzero.iter().enumerate() {
        for i in 0..a.rows {
            *out.at_mut(i, k) = h.at(i, j).clone();
        }
    }
    out
}

pub fn lattice_eq(a: &IMat, b: &IMat) -> bool {
    lattice_canonical(a) == lattice_canonical(b)
}

/// Preimage lattice `{x : M x ∈ colspan(L)}`, as columns.
pub fn preimage_lattice(m: &IMat, l: &IMat) -> IMat {
    // kernel of [M | −L] projected to the x block
    let mut stacked = IMat::zero(m.rows, m.cols + l.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *stacked.at_mut(i, j) = m.at(i, j).clone();
        }
        for j in 0..l.cols {
            *stacked.at_mut(i, m.cols + j) = -l.at(i, j).clone();
        }
    }
    let ker = kernel_basis(&stacked);
    let mut out = IMat::zero(m.cols, ker.cols);
    for j in 0..ker.cols {
        for i in 0..m.cols {
            *out.at_mut(i, j) = ker.at(i, j).clone();
        }
    }
    lattice_canonical(&out)
}

/// Smith normal form: the invariant factors (nonzero diagonal, in
/// divisibility order). Transforms are not tracked; betti numbers and
/// torsion only need the factors.
pub fn smith_invariant_factors(a: &IMat) -> Vec<BigInt> {
    let mut m = a.clone();
    let mut factors = Vec::new();
    let mut top = 0usize;
    while top < m.rows && top < m.cols {
        // find the nonzero entry of least magnitude
        let mut best: Option<(usize, usize)> = None;
        for i in top..m.rows {
            for j in top..m.cols {
                if m.at(i, j).is_zero() {
                    continue;
                }
                match &best {
                    Some((bi, bj)) if m.at(*bi, *bj).abs() <= m.at(i, j).abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let (pi, pj) = match best {
            Some(x) => x,
            None => break,
        };
        swap_rows(&mut m, top, pi);
        m.swap_cols(top, pj);
        // clear row and column by Euclidean steps
        loop {
            let mut clean = true;
            for i in top + 1..m.rows {
                if !m.at(i, top).is_zero() {
                    let q = quot_round(&m.at(i, top).clone(), m.at(top, top));
                    add_row(&mut m, i, top, &-q);
                    if !m.at(i, top).is_zero() {
                        swap_rows(&mut m, top, i);
                        clean = false;
                    }
                }
            }
            for j in top + 1..m.cols {
                if !m.at(top, j).is_zero() {
                    let q = quot_round(&m.at(top, j).clone(), m.at(top, top));
                    let neg_q = -q;
                    m.add_col(j, top, &neg_q);
                    if !m.at(top, j).is_zero() {
                        m.swap_cols(top, j);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        // divisibility: fold in any entry the pivot does not divide
        let mut redo = false;
        'outer: for i in top + 1..m.rows {
            for j in top + 1..m.cols {
                if !(m.at(i, j) % m.at(top, top)).is_zero() {
                    add_row(&mut m, top, i, &BigInt::one());
                    redo = true;
                    break 'outer;
                }
            }
        }
        if redo {
            continue;
        }
        let mut d = m.at(top, top).clone();
        if d.is_negative() {
            d = -d;
        }
        factors.push(d);
        top += 1;
    }
    factors
}

fn swap_rows(m: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..m.cols {
        m.data.swap(a * m.cols + c, b * m.cols + c);
    }
}

/// `row_a += f * row_b`
fn add_row(m: &mut IMat, a: usize, b: usize, f: &BigInt) {
    if f.is_zero() {
        return;
    }
    for c in 0..m.cols {
        let add = f * m.at(b, c);
        *m.at_mut(a, c) += add;
    }
}

// --- arithmetic mod a prime -------------------------------------------------

pub fn mod_p(v: &BigInt, p: u64) -> u64 {
    let m = v.mod_floor(&BigInt::from(p));
    // result of mod_floor with positive modulus is in [0, p)
    m.to_u64_digits().1.first().copied().unwrap_or(0)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid; p prime, a ≠ 0 mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible");
    ((t % p as i128 + p as i128) % p as i128) as u64
}

/// Dense matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMat {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    pub data: Vec<u64>,
}

impl PMat {
    pub fn from_imat(a: &IMat, p: u64) -> Self {
        PMat {
            rows: a.rows,
            cols: a.cols,
            p,
            data: a.data.iter().map(|v| mod_p(v, p)).collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut u64 {
        &mut self.data[r * self.cols + c]
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let piv = (rank..m.rows).find(|&r| m.at(r, col) != 0);
            let piv = match piv {
                Some(p0) => p0,
                None => continue,
            };
            for c in 0..m.cols {
                let tmp = m.at(rank, c);
                *m.at_mut(rank, c) = m.at(piv, c);
                *m.at_mut(piv, c) = tmp;
            }
            let inv = inv_mod(m.at(rank, col), m.p);
            for c in 0..m.cols {
                *m.at_mut(rank, c) = m.at(rank, c) * inv % m.p;
            }
            for r in 0..m.rows {
                if r != rank && m.at(r, col) != 0 {
                    let f = m.at(r, col);
                    for c in 0..m.cols {
                        let sub = f * m.at(rank, c) % m.p;
                        *m.at_mut(r, c) = (m.at(r, c) + m.p - sub) % m.p;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }
}
