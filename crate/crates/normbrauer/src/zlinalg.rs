//! Exact integer-matrix and lattice arithmetic.
//!
//! Everything here is arbitrary-precision and deterministic: Hermite and
//! Smith normal forms with unimodular transforms, canonical lattice bases,
//! lattice quotients as invariant factors, and an integer linear solver.
//! No floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZlinalgError {
    #[error("denominator lattice is not contained in the numerator lattice")]
    Containment,
    #[error("denominator lattice has lower rank than the numerator (quotient infinite)")]
    Rank,
    #[error("ambient ranks differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count mismatch");
        IntMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: r, cols: c, entries }
    }

    pub fn diagonal(diag: &[BigInt]) -> Self {
        let mut m = Self::zero(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, entries }
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(|x| x.is_zero())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let swap = (k + 1..n).find(|&i| !a[(i, k)].is_zero());
                match swap {
                    Some(i) => {
                        for j in 0..n {
                            let tmp = a[(k, j)].clone();
                            a[(k, j)] = a[(i, j)].clone();
                            a[(i, j)] = tmp;
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero());
                    a[(i, j)] = q;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// row[dst] -= q * row[src]
    fn row_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let sub = q * &self[(src, j)];
            self[(dst, j)] -= sub;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// col[dst] -= q * col[src]
    fn col_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let sub = q * &self[(i, src)];
            self[(i, dst)] -= sub;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Row-style Hermite normal form: returns `(h, u)` with `h = u * m`,
/// `u` unimodular, pivots positive, entries above a pivot reduced into
/// `[0, pivot)`. Pivot selection: smallest absolute value, then lowest
/// row index, so the output is deterministic.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivot_row = 0usize;
    for col in 0..h.cols {
        if pivot_row >= h.rows {
            break;
        }
        // Eliminate below until at most one nonzero remains in this column.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..h.rows {
                if h[(r, col)].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(r),
                    Some(b) => {
                        if h[(r, col)].abs() < h[(b, col)].abs() {
                            Some(r)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut any_left = false;
            for r in pivot_row + 1..h.rows {
                if h[(r, col)].is_zero() {
                    continue;
                }
                let q = h[(r, col)].div_floor(&h[(pivot_row, col)]);
                h.row_submul(r, pivot_row, &q);
                u.row_submul(r, pivot_row, &q);
                if !h[(r, col)].is_zero() {
                    any_left = true;
                }
            }
            if !any_left {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue; // no pivot in this column
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        // Reduce entries above the pivot into [0, pivot).
        for r in 0..pivot_row {
            let q = h[(r, col)].div_floor(&h[(pivot_row, col)]);
            h.row_submul(r, pivot_row, &q);
            u.row_submul(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(d, u, v)` with `d = u * m * v` diagonal,
/// `d_1 | d_2 | ...`, `u` and `v` unimodular. Deterministic.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (d, u, v, _) = snf_with_inverse(m);
    (d, u, v)
}

/// As `smith_normal_form`, additionally returning `v^-1` (tracked during
/// the column operations; needed for generator lifts in lattice quotients).
pub fn snf_with_inverse(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix, IntMatrix) {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let mut v_inv = IntMatrix::identity(m.cols);
    let t_max = m.rows.min(m.cols);
    let mut t = 0usize;
    while t < t_max {
        // Find pivot: minimal |nonzero| in a[t.., t..], ties by (row, col).
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        if a[(i, j)].abs() < a[(bi, bj)].abs() {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        u.swap_rows(t, bi);
        a.swap_cols(t, bj);
        v.swap_cols(t, bj);
        v_inv.swap_rows(t, bj);
        // Clear row and column t; repeat until both are clear.
        loop {
            let mut dirty = false;
            for i in t + 1..a.rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                a.row_submul(i, t, &q);
                u.row_submul(i, t, &q);
                if !a[(i, t)].is_zero() {
                    // Remainder smaller than pivot: swap up and restart.
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            for j in t + 1..a.cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                a.col_submul(j, t, &q);
                v.col_submul(j, t, &q);
                // inverse op on v_inv: row t += q * row j
                let q_neg = -q;
                v_inv.row_submul(t, j, &q_neg);
                if !a[(t, j)].is_zero() {
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                    v_inv.swap_rows(t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        // Divisibility: a[t][t] must divide every remaining entry.
        let mut fixed = true;
        'outer: for i in t + 1..a.rows {
            for j in t + 1..a.cols {
                if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                    // Add row i to row t and re-run the pivot step.
                    let minus_one = -BigInt::one();
                    a.row_submul(t, i, &minus_one);
                    u.row_submul(t, i, &minus_one);
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    (a, u, v, v_inv)
}

/// Canonical basis of a sublattice of `Z^ambient_rank`: rows are
/// independent, stored in row-HNF with zero rows dropped, so equal
/// lattices have identical representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub ambient_rank: usize,
    pub basis: IntMatrix,
}

impl LatticeBasis {
    /// Canonicalize an arbitrary generating set.
    pub fn from_generators(ambient_rank: usize, gens: IntMatrix) -> Self {
        assert_eq!(gens.cols, ambient_rank);
        let (h, _) = hermite_normal_form(&gens);
        let nz = (0..h.rows).filter(|&i| !h.is_zero_row(i)).count();
        let mut entries = Vec::with_capacity(nz * ambient_rank);
        for i in 0..h.rows {
            if !h.is_zero_row(i) {
                entries.extend_from_slice(h.row(i));
            }
        }
        LatticeBasis { ambient_rank, basis: IntMatrix::new(nz, ambient_rank, entries) }
    }

    pub fn full(n: usize) -> Self {
        LatticeBasis { ambient_rank: n, basis: IntMatrix::identity(n) }
    }

    pub fn zero(n: usize) -> Self {
        LatticeBasis { ambient_rank: n, basis: IntMatrix::zero(0, n) }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    /// Pivot column of each basis row.
    pub fn pivot_cols(&self) -> Vec<usize> {
        (0..self.basis.rows)
            .map(|i| (0..self.basis.cols).find(|&j| !self.basis[(i, j)].is_zero()).unwrap())
            .collect()
    }

    /// Solve `x * basis = v` over the integers (unique if it exists,
    /// since basis rows are independent and in HNF).
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient_rank);
        let pivots = self.pivot_cols();
        let mut rem: Vec<BigInt> = v.to_vec();
        let mut coeffs = vec![BigInt::zero(); self.basis.rows];
        for (i, &p) in pivots.iter().enumerate() {
            let (q, r) = rem[p].div_rem(&self.basis[(i, p)]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for j in 0..self.ambient_rank {
                    let sub = &q * &self.basis[(i, j)];
                    rem[j] -= sub;
                }
            }
            coeffs[i] = q;
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &LatticeBasis) -> bool {
        (0..other.basis.rows).all(|i| self.contains(other.basis.row(i)))
    }
}

/// Invariant-factor form of a finite abelian group, together with lifts
/// of a generating set into ambient integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupStructure {
    /// d_1 | d_2 | ... | d_s, each >= 2; empty for the trivial group.
    pub invariant_factors: Vec<BigInt>,
    /// One row per invariant factor.
    pub generator_lifts: IntMatrix,
}

impl AbelianGroupStructure {
    pub fn trivial(ambient: usize) -> Self {
        AbelianGroupStructure {
            invariant_factors: vec![],
            generator_lifts: IntMatrix::zero(0, ambient),
        }
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

/// Invariant factors of `numerator / denominator` for two sublattices of
/// the same ambient `Z^n`, with generator lifts in ambient coordinates.
pub fn quotient_structure(
    numerator: &LatticeBasis,
    denominator: &LatticeBasis,
) -> Result<AbelianGroupStructure, ZlinalgError> {
    if numerator.ambient_rank != denominator.ambient_rank {
        return Err(ZlinalgError::AmbientMismatch(
            numerator.ambient_rank,
            denominator.ambient_rank,
        ));
    }
    let k = numerator.rank();
    if denominator.rank() < k {
        // Containment is still required for a meaningful error report.
        if !numerator.contains_lattice(denominator) {
            return Err(ZlinalgError::Containment);
        }
        return Err(ZlinalgError::Rank);
    }
    // Express denominator rows in numerator coordinates.
    let mut x_entries = Vec::with_capacity(denominator.rank() * k);
    for i in 0..denominator.rank() {
        match numerator.coordinates(denominator.basis.row(i)) {
            Some(c) => x_entries.extend(c),
            None => return Err(ZlinalgError::Containment),
        }
    }
    let x = IntMatrix::new(denominator.rank(), k, x_entries);
    let (d, _u, _v, v_inv) = snf_with_inverse(&x);
    // Full-rank containment: every diagonal entry is nonzero.
    for t in 0..k {
        if d[(t, t)].is_zero() {
            return Err(ZlinalgError::Rank);
        }
    }
    let lifted = v_inv.mul(&numerator.basis);
    let mut factors = Vec::new();
    let mut lift_rows: Vec<BigInt> = Vec::new();
    for t in 0..k {
        if d[(t, t)] > BigInt::one() {
            factors.push(d[(t, t)].clone());
            lift_rows.extend_from_slice(lifted.row(t));
        }
    }
    let s = factors.len();
    Ok(AbelianGroupStructure {
        invariant_factors: factors,
        generator_lifts: IntMatrix::new(s, numerator.ambient_rank, lift_rows),
    })
}

/// Some integer solution `x` of `a * x = b`, or `None`. Deterministic.
pub fn solve_integer_linear(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "rhs length mismatch");
    // Row-HNF of a^T: h = u * a^T, so a * (y u)^T = b^T has a solution
    // iff y * h = b has one, solved by forward substitution on pivots.
    let (h, u) = hermite_normal_form(&a.transpose());
    let mut rem: Vec<BigInt> = b.to_vec();
    let mut y = vec![BigInt::zero(); h.rows];
    for i in 0..h.rows {
        let Some(p) = (0..h.cols).find(|&j| !h[(i, j)].is_zero()) else { break };
        let (q, r) = rem[p].div_rem(&h[(i, p)]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for j in 0..h.cols {
                let sub = &q * &h[(i, j)];
                rem[j] -= sub;
            }
        }
        y[i] = q;
    }
    if rem.iter().any(|x| !x.is_zero()) {
        return None;
    }
    // x = (y * u)^T
    let mut x = vec![BigInt::zero(); a.cols];
    for (i, yi) in y.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += yi * &u[(i, j)];
        }
    }
    Some(x)
}

/// Rows spanning `{ x : x * m = 0 }`.
pub fn left_kernel(m: &IntMatrix) -> LatticeBasis {
    let (h, u) = hermite_normal_form(m);
    let mut rows: Vec<BigInt> = Vec::new();
    let mut count = 0usize;
    for i in 0..h.rows {
        if h.is_zero_row(i) {
            rows.extend_from_slice(u.row(i));
            count += 1;
        }
    }
    LatticeBasis::from_generators(m.rows, IntMatrix::new(count, m.rows, rows))
}

/// Intersection of two sublattices of the same ambient space.
pub fn lattice_intersection(a: &LatticeBasis, b: &LatticeBasis) -> LatticeBasis {
    assert_eq!(a.ambient_rank, b.ambient_rank);
    let stacked = a.basis.vstack(&b.basis);
    let ker = left_kernel(&stacked);
    // Rows (y | z) with y*A + z*B = 0; then x = y*A = -z*B lies in both.
    let mut rows: Vec<BigInt> = Vec::new();
    for i in 0..ker.rank() {
        let coeffs = ker.basis.row(i);
        let mut x = vec![BigInt::zero(); a.ambient_rank];
        for (r, c) in coeffs.iter().take(a.rank()).enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..a.ambient_rank {
                x[j] += c * &a.basis[(r, j)];
            }
        }
        rows.extend(x);
    }
    LatticeBasis::from_generators(a.ambient_rank, IntMatrix::new(ker.rank(), a.ambient_rank, rows))
}

/// `{ x in Z^n : conditions * x ~ 0 }`, where row `r` of `conditions` is
/// read modulo `moduli[r]`.
pub fn congruence_lattice(conditions: &IntMatrix, moduli: &[BigInt]) -> LatticeBasis {
    let n = conditions.cols;
    let c = conditions.rows;
    assert_eq!(moduli.len(), c);
    // Unknown row (x | z): x * conditions^T + z * diag(moduli) = 0.
    let stacked = conditions.transpose().vstack(&IntMatrix::diagonal(moduli));
    let ker = left_kernel(&stacked);
    let mut rows: Vec<BigInt> = Vec::new();
    for i in 0..ker.rank() {
        rows.extend_from_slice(&ker.basis.row(i)[..n]);
    }
    LatticeBasis::from_generators(n, IntMatrix::new(ker.rank(), n, rows))
}

/// Saturation `(L tensor Q) intersect Z^n` of a sublattice `L`.
///
/// Works in the pivot coordinates of the HNF basis, so the cost is
/// `O(k^2 n)` for a rank-`k` lattice in `Z^n`; no `n x n` transform is
/// ever formed (the oracle feeds coboundary lattices with large `n`).
pub fn saturate(l: &LatticeBasis) -> LatticeBasis {
    let k = l.rank();
    let n = l.ambient_rank;
    if k == 0 {
        return LatticeBasis::zero(n);
    }
    let pivots = l.pivot_cols();
    let h = &l.basis;
    let delta: BigInt = (0..k).map(|i| h[(i, pivots[i])].clone()).product();
    if delta == BigInt::one() {
        return l.clone();
    }
    // A = delta * H_J^{-1} * H by back-substitution (H_J upper triangular).
    let mut a = IntMatrix::zero(k, n);
    for i in (0..k).rev() {
        for j in 0..n {
            let mut num = &delta * &h[(i, j)];
            for t in i + 1..k {
                num -= &h[(i, pivots[t])] * &a[(t, j)];
            }
            let (q, r) = num.div_rem(&h[(i, pivots[i])]);
            debug_assert!(r.is_zero(), "saturation back-substitution not exact");
            a[(i, j)] = q;
        }
    }
    // Column lattice of [A | delta*I] in Z^k, as row-HNF generators.
    let col_gens = a.transpose().vstack(&IntMatrix::diagonal(&vec![delta.clone(); k]));
    let col_lat = LatticeBasis::from_generators(k, col_gens);
    // K = { y in Z^k : y . c ~ 0 mod delta for every generator column c }.
    let moduli = vec![delta.clone(); col_lat.rank()];
    let kdelta = congruence_lattice(&col_lat.basis, &moduli);
    // Saturated rows: (y * A) / delta.
    let prod = kdelta.basis.mul(&a);
    let mut rows: Vec<BigInt> = Vec::with_capacity(prod.rows * n);
    for i in 0..prod.rows {
        for j in 0..n {
            let (q, r) = prod[(i, j)].div_rem(&delta);
            debug_assert!(r.is_zero(), "saturation projection not integral");
            rows.push(q);
        }
    }
    let sat = LatticeBasis::from_generators(n, IntMatrix::new(prod.rows, n, rows));
    debug_assert!(sat.contains_lattice(l));
    sat
}
