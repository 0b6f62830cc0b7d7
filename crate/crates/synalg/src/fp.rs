//! Exact arithmetic and small-scale linear algebra over a prime field F_p.
//!
//! Everything works with `u32` residues in `0..p`. Matrices act on row
//! vectors (`v ↦ v · M`), which makes the matrix of a composite word the
//! plain product of the letter matrices in reading order.

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn add(p: u32, a: u32, b: u32) -> u32 {
    (a + b) % p
}

pub fn sub(p: u32, a: u32, b: u32) -> u32 {
    (a + p - b) % p
}

pub fn mul(p: u32, a: u32, b: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn inv(p: u32, a: u32) -> u32 {
    // Fermat: a^(p-2) mod p, fine for the small primes used here.
    assert!(a % p != 0, "zero has no inverse");
    pow(p, a, p - 2)
}

pub fn pow(p: u32, mut base: u32, mut exp: u32) -> u32 {
    let mut acc = 1u32;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(p, acc, base);
        }
        base = mul(p, base, base);
        exp >>= 1;
    }
    acc
}

/// A dense matrix over F_p, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct FpMat {
    pub p: u32,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl FpMat {
    pub fn zero(p: u32, rows: usize, cols: usize) -> Self {
        FpMat {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = FpMat::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(p: u32, rows: Vec<Vec<u32>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.into_iter().map(|x| x % p));
        }
        FpMat {
            p,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `self · other`.
    pub fn mat_mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = FpMat::zero(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.data[i * other.cols + j] = add(p, cur, mul(p, a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn add_mat(&self, other: &FpMat) -> FpMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = add(self.p, *x, y);
        }
        out
    }

    pub fn scale(&self, c: u32) -> FpMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = mul(self.p, *x, c);
        }
        out
    }
}

/// Row-vector times matrix.
pub fn vec_mat(p: u32, v: &[u32], m: &FpMat) -> Vec<u32> {
    assert_eq!(v.len(), m.rows);
    let mut out = vec![0u32; m.cols];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..m.cols {
            out[j] = add(p, out[j], mul(p, vi, m.get(i, j)));
        }
    }
    out
}

/// Dot product of two vectors.
pub fn dot(p: u32, a: &[u32], b: &[u32]) -> u32 {
    assert_eq!(a.len(), b.len());
    let mut acc = 0u32;
    for (&x, &y) in a.iter().zip(b.iter()) {
        acc = add(p, acc, mul(p, x, y));
    }
    acc
}

/// Outcome of inserting a vector into a [`SpanBasis`].
pub enum Insert {
    /// The vector was already in the span; the payload expresses it as a
    /// coordinate vector over the *raw* basis vectors, in insertion order.
    Dependent(Vec<u32>),
    /// The vector was independent and appended; payload is its index.
    Independent(usize),
}

/// An incrementally grown basis of a subspace of F_p^n.
///
/// Keeps the vectors exactly as inserted (the "raw" basis, whose order
/// callers care about) next to a reduced echelon copy used for membership
/// tests and coordinate extraction.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    p: u32,
    ambient: usize,
    raw: Vec<Vec<u32>>,
    echelon: Vec<Vec<u32>>,
    /// combo[i] expresses echelon[i] as a combination of raw vectors.
    combo: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl SpanBasis {
    pub fn new(p: u32, ambient: usize) -> Self {
        SpanBasis {
            p,
            ambient,
            raw: Vec::new(),
            echelon: Vec::new(),
            combo: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.raw.len()
    }

    pub fn raw_basis(&self) -> &[Vec<u32>] {
        &self.raw
    }

    /// Reduces `v` against the echelon rows. Returns the residue and the
    /// coefficients used per echelon row.
    fn reduce(&self, v: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let p = self.p;
        let mut r: Vec<u32> = v.iter().map(|&x| x % p).collect();
        let mut coeffs = vec![0u32; self.echelon.len()];
        for (i, e) in self.echelon.iter().enumerate() {
            let c = r[self.pivots[i]];
            if c != 0 {
                coeffs[i] = c;
                for j in 0..self.ambient {
                    r[j] = sub(p, r[j], mul(p, c, e[j]));
                }
            }
        }
        (r, coeffs)
    }

    fn raw_combination(&self, coeffs: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.raw.len()];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (k, &ck) in self.combo[i].iter().enumerate() {
                    out[k] = add(self.p, out[k], mul(self.p, c, ck));
                }
            }
        }
        out
    }

    /// Coordinates of `v` over the raw basis, if `v` lies in the span.
    pub fn coords(&self, v: &[u32]) -> Option<Vec<u32>> {
        let (residue, coeffs) = self.reduce(v);
        if residue.iter().any(|&x| x != 0) {
            return None;
        }
        Some(self.raw_combination(&coeffs))
    }

    pub fn insert(&mut self, v: &[u32]) -> Insert {
        assert_eq!(v.len(), self.ambient);
        let (residue, coeffs) = self.reduce(v);
        if let Some(pivot) = residue.iter().position(|&x| x != 0) {
            let p = self.p;
            let lead_inv = inv(p, residue[pivot]);
            let e: Vec<u32> = residue.iter().map(|&x| mul(p, x, lead_inv)).collect();
            // combo for e: (raw_new - Σ coeffs_i · combo_i) · lead⁻¹
            let new_index = self.raw.len();
            let mut combo = vec![0u32; new_index + 1];
            combo[new_index] = lead_inv;
            for (i, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for (k, &ck) in self.combo[i].iter().enumerate() {
                        combo[k] = sub(p, combo[k], mul(p, mul(p, c, ck), lead_inv));
                    }
                }
            }
            for old in self.combo.iter_mut() {
                old.resize(new_index + 1, 0);
            }
            self.raw.push(v.iter().map(|&x| x % p).collect());
            self.echelon.push(e);
            self.combo.push(combo);
            self.pivots.push(pivot);
            Insert::Independent(new_index)
        } else {
            Insert::Dependent(self.raw_combination(&coeffs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(7));
        assert!(!is_prime(1));
        assert!(!is_prime(9));
    }

    #[test]
    fn span_basis_coords_reconstruct() {
        // Over F_5, insert a few vectors and check coords() · raw == vector.
        let p = 5;
        let mut b = SpanBasis::new(p, 3);
        let vs = [vec![1, 2, 3], vec![0, 1, 1], vec![0, 0, 1], vec![3, 1, 4]];
        for v in &vs {
            b.insert(v);
        }
        assert_eq!(b.dim(), 3);
        for v in &vs {
            let c = b.coords(v).unwrap();
            let mut rebuilt = vec![0u32; 3];
            for (i, &ci) in c.iter().enumerate() {
                for j in 0..3 {
                    rebuilt[j] = add(p, rebuilt[j], mul(p, ci, b.raw_basis()[i][j]));
                }
            }
            assert_eq!(&rebuilt, v);
        }
        assert!(b.coords(&[1, 1, 1]).is_some());
    }

    #[test]
    fn dependent_insert_reports_raw_coordinates() {
        let p = 2;
        let mut b = SpanBasis::new(p, 2);
        b.insert(&[1, 0]);
        b.insert(&[1, 1]);
        match b.insert(&[0, 1]) {
            Insert::Dependent(c) => assert_eq!(c, vec![1, 1]),
            Insert::Independent(_) => panic!("should be dependent"),
        }
    }

    #[test]
    fn matrix_multiplication_mod_p() {
        let m = FpMat::from_rows(3, vec![vec![1, 2], vec![2, 1]]);
        let sq = m.mat_mul(&m);
        assert_eq!(sq.data, vec![2, 1, 1, 2]);
        let id = FpMat::identity(3, 2);
        assert_eq!(m.mat_mul(&id), m);
        assert_eq!(vec_mat(3, &[1, 1], &m), vec![0, 0]);
    }
}
