//! Dense matrices over `F_q` with `u32` entries (generic fields).
//!
//! The rank-heavy paths (classification, hyperplane census) use the packed
//! vectors of [`crate::packed`] instead; this type backs the public API.

use std::fmt;

use thiserror::Error;

use crate::field::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },
    #[error("entry {0} is not an element of the field")]
    BadEntry(u32),
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFq {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixFq {}x{} over F_{}", self.rows, self.cols, self.field.order())?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of row reduction: the reduced matrix, its rank and pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: MatrixFq,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl MatrixFq {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> MatrixFq {
        MatrixFq { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> MatrixFq {
        let mut m = MatrixFq::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<u32>]) -> Result<MatrixFq, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::Shape { expected: format!("{cols} columns"), got: format!("{}", r.len()) });
            }
            for &v in r {
                if v >= field.order() {
                    return Err(LinalgError::BadEntry(v));
                }
                data.push(v);
            }
        }
        Ok(MatrixFq { field: field.clone(), rows: rows.len(), cols, data })
    }

    pub fn from_flat(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<MatrixFq, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape { expected: format!("{} entries", rows * cols), got: format!("{}", data.len()) });
        }
        if let Some(&v) = data.iter().find(|&&v| v >= field.order()) {
            return Err(LinalgError::BadEntry(v));
        }
        Ok(MatrixFq { field: field.clone(), rows, cols, data })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> MatrixFq {
        let mut t = MatrixFq::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Matrix with the given rows stacked below this one.
    pub fn stack(&self, other: &MatrixFq) -> Result<MatrixFq, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::Shape { expected: format!("{} columns", self.cols), got: format!("{}", other.cols) });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatrixFq { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn mul(&self, other: &MatrixFq) -> Result<MatrixFq, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape { expected: format!("{} rows", self.cols), got: format!("{}", other.rows) });
        }
        let f = &self.field;
        let mut out = MatrixFq::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut out = vec![0; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(a, self.get(i, j)));
            }
        }
        out
    }

    /// Reduced row echelon form; zero rows are kept at the bottom.
    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&i| m.get(i, col) != 0) else { continue };
            m.swap_rows(row, piv);
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            if inv != 1 {
                for j in col..m.cols {
                    let v = f.mul(m.get(row, j), inv);
                    m.set(row, j, v);
                }
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let c = m.get(i, col);
                if c == 0 {
                    continue;
                }
                let nc = f.neg(c);
                for j in col..m.cols {
                    let v = f.add(m.get(i, j), f.mul(nc, m.get(row, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { rank: pivots.len(), matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// The first `rank` rows of the RREF (a canonical row-space basis).
    pub fn row_space_basis(&self) -> MatrixFq {
        let r = self.rref();
        let mut m = r.matrix;
        m.data.truncate(r.rank * m.cols);
        m.rows = r.rank;
        m
    }

    /// Basis (as rows, in RREF) of the right kernel `{x : M x = 0}`.
    pub fn nullspace(&self) -> MatrixFq {
        let f = &self.field;
        let r = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !r.pivots.contains(c)).collect();
        let mut rows = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![0; self.cols];
            v[fc] = 1;
            for (i, &pc) in r.pivots.iter().enumerate() {
                v[pc] = f.neg(r.matrix.get(i, fc));
            }
            rows.push(v);
        }
        let m = MatrixFq::from_rows(f, self.cols, &rows).expect("consistent shape");
        m.row_space_basis()
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[u32]) -> bool {
        let base = self.rank();
        let mut data = self.data.clone();
        data.extend_from_slice(v);
        let m = MatrixFq { field: self.field.clone(), rows: self.rows + 1, cols: self.cols, data };
        m.rank() == base
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<MatrixFq> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = MatrixFq::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let r = aug.rref();
        if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = MatrixFq::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.matrix.get(i, n + j));
            }
        }
        Some(inv)
    }
}
