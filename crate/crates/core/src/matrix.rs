//! Sparse exact matrices stored by column.

use std::collections::HashMap;
use std::fmt;

use crate::field::{Field, Scalar};

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SVec = Vec<(usize, Scalar)>;

/// `y + a·x` for sparse vectors.
pub fn axpy(field: Field, y: &SVec, a: &Scalar, x: &SVec) -> SVec {
    if a.is_zero() || x.is_empty() {
        return y.clone();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        if j >= x.len() || (i < y.len() && y[i].0 < x[j].0) {
            out.push(y[i].clone());
            i += 1;
        } else if i >= y.len() || x[j].0 < y[i].0 {
            out.push((x[j].0, field.mul(a, &x[j].1)));
            j += 1;
        } else {
            let v = field.add(&y[i].1, &field.mul(a, &x[j].1));
            if !v.is_zero() {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale_vec(field: Field, a: &Scalar, x: &SVec) -> SVec {
    if a.is_zero() {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, field.mul(a, v))).collect()
}

/// Sparse vector from a dense slice of scalars.
pub fn svec_from_dense(v: &[Scalar]) -> SVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<SVec>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Dense accumulator used by products.
struct Accum {
    vals: Vec<Option<Scalar>>,
    touched: Vec<usize>,
}

impl Accum {
    fn new(n: usize) -> Self {
        Accum { vals: vec![None; n], touched: Vec::new() }
    }
    fn add(&mut self, field: Field, i: usize, v: Scalar) {
        match &mut self.vals[i] {
            Some(x) => *x = field.add(x, &v),
            slot @ None => {
                *slot = Some(v);
                self.touched.push(i);
            }
        }
    }
    fn drain(&mut self) -> SVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            if let Some(v) = self.vals[i].take() {
                if !v.is_zero() {
                    out.push((i, v));
                }
            }
        }
        self.touched.clear();
        out
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let data = (0..n).map(|i| vec![(i, field.one())]).collect();
        Matrix { field, rows: n, cols: n, data }
    }

    /// Builds from columns that are already sorted and zero-free.
    pub fn from_columns(field: Field, rows: usize, data: Vec<SVec>) -> Matrix {
        debug_assert!(data.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)));
        debug_assert!(data.iter().all(|c| c.iter().all(|(r, v)| *r < rows && !v.is_zero())));
        Matrix { field, rows, cols: data.len(), data }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets<I>(field: Field, rows: usize, cols: usize, triplets: I) -> Matrix
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of {rows}x{cols}");
            if !v.is_zero() {
                per_col[c].push((r, v));
            }
        }
        let data = per_col
            .into_iter()
            .map(|mut col| {
                col.sort_by_key(|e| e.0);
                let mut out: SVec = Vec::with_capacity(col.len());
                for (r, v) in col {
                    match out.last_mut() {
                        Some((lr, lv)) if *lr == r => *lv = field.add(lv, &v),
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|(_, v)| !v.is_zero());
                out
            })
            .collect();
        Matrix { field, rows, cols, data }
    }

    /// Dense integer rows, mostly for tests.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_triplets(
            field,
            r,
            c,
            rows.iter().enumerate().flat_map(|(i, row)| {
                assert_eq!(row.len(), c);
                row.iter().enumerate().map(move |(j, v)| (i, j, field.from_i64(*v)))
            }),
        )
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn col(&self, c: usize) -> &SVec {
        &self.data[c]
    }
    pub fn columns(&self) -> &[SVec] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.data[c].binary_search_by_key(&r, |e| e.0) {
            Ok(i) => self.data[c][i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    /// Entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_triplets(
            self.field,
            self.cols,
            self.rows,
            self.entries().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    pub fn apply(&self, x: &SVec) -> SVec {
        let mut acc = Accum::new(self.rows);
        for (k, xv) in x {
            for (r, v) in &self.data[*k] {
                acc.add(self.field, *r, self.field.mul(v, xv));
            }
        }
        acc.drain()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "product shape {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols);
        let mut acc = Accum::new(self.rows);
        let data = other
            .data
            .iter()
            .map(|col| {
                for (k, xv) in col {
                    for (r, v) in &self.data[*k] {
                        acc.add(self.field, *r, self.field.mul(v, xv));
                    }
                }
                acc.drain()
            })
            .collect();
        Matrix { field: self.field, rows: self.rows, cols: other.cols, data }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum shape");
        let one = self.field.one();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| axpy(self.field, a, &one, b))
            .collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, a: &Scalar) -> Matrix {
        let data = self.data.iter().map(|c| scale_vec(self.field, a, c)).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    /// Kronecker product; index of (a, b) is `a * other_dim + b`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let f = self.field;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = Vec::with_capacity(cols);
        for a in 0..self.cols {
            for b in 0..other.cols {
                let mut col = Vec::with_capacity(self.data[a].len() * other.data[b].len());
                for (ra, va) in &self.data[a] {
                    for (rb, vb) in &other.data[b] {
                        col.push((ra * other.rows + rb, f.mul(va, vb)));
                    }
                }
                data.push(col);
            }
        }
        Matrix { field: f, rows, cols, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut pos = HashMap::new();
        for (i, r) in idx.iter().enumerate() {
            pos.insert(*r, i);
        }
        Matrix::from_triplets(
            self.field,
            idx.len(),
            self.cols,
            self.entries().filter_map(|(r, c, v)| pos.get(&r).map(|i| (*i, c, v.clone()))),
        )
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let data = idx.iter().map(|c| self.data[*c].clone()).collect();
        Matrix { field: self.field, rows: self.rows, cols: idx.len(), data }
    }

    /// Assembles a block matrix from placed blocks; absent blocks are zero.
    pub fn from_blocks(
        field: Field,
        row_sizes: &[usize],
        col_sizes: &[usize],
        blocks: Vec<(usize, usize, Matrix)>,
    ) -> Matrix {
        let row_off = offsets(row_sizes);
        let col_off = offsets(col_sizes);
        let rows = *row_off.last().unwrap();
        let cols = *col_off.last().unwrap();
        let mut trip = Vec::new();
        for (bi, bj, m) in blocks {
            assert_eq!((m.rows, m.cols), (row_sizes[bi], col_sizes[bj]), "block ({bi},{bj}) shape");
            for (r, c, v) in m.entries() {
                trip.push((row_off[bi] + r, col_off[bj] + c, v.clone()));
            }
        }
        Matrix::from_triplets(field, rows, cols, trip)
    }

    pub fn block_diag(field: Field, blocks: &[&Matrix]) -> Matrix {
        let rs: Vec<usize> = blocks.iter().map(|m| m.rows).collect();
        let cs: Vec<usize> = blocks.iter().map(|m| m.cols).collect();
        Matrix::from_blocks(
            field,
            &rs,
            &cs,
            blocks.iter().enumerate().map(|(i, m)| (i, i, (*m).clone())).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        let mut red = Reducer::new(self.field, false);
        for col in &self.data {
            red.insert(col.clone(), Vec::new());
        }
        red.rank()
    }

    /// Basis of the null space, one sparse vector per basis element.
    pub fn kernel_basis(&self) -> Vec<SVec> {
        let mut red = Reducer::new(self.field, true);
        let mut out = Vec::new();
        for (j, col) in self.data.iter().enumerate() {
            let (r, t) = red.insert(col.clone(), vec![(j, self.field.one())]);
            if r.is_empty() {
                out.push(t);
            }
        }
        out
    }
}

pub fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

/// Incremental column reduction keyed by the lowest (largest-index) entry.
pub struct Reducer {
    field: Field,
    track: bool,
    pivots: HashMap<usize, (SVec, SVec)>,
}

impl Reducer {
    pub fn new(field: Field, track: bool) -> Self {
        Reducer { field, track, pivots: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the stored pivots; returns the remainder and the
    /// accumulated combination of transforms.
    pub fn reduce(&self, mut v: SVec, mut t: SVec) -> (SVec, SVec) {
        let f = self.field;
        while let Some((low, val)) = v.last().cloned() {
            match self.pivots.get(&low) {
                Some((pv, pt)) => {
                    let factor = f.neg(&f.div(&val, &pv.last().unwrap().1));
                    v = axpy(f, &v, &factor, pv);
                    if self.track {
                        t = axpy(f, &t, &factor, pt);
                    }
                }
                None => break,
            }
        }
        (v, t)
    }

    /// Reduces and, if nonzero, stores the remainder as a new pivot.
    pub fn insert(&mut self, v: SVec, t: SVec) -> (SVec, SVec) {
        let (r, t) = self.reduce(v, t);
        if let Some((low, _)) = r.last() {
            self.pivots.insert(*low, (r.clone(), t.clone()));
        }
        (r, t)
    }

    pub fn in_span(&self, v: SVec) -> bool {
        self.reduce(v, Vec::new()).0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hollow_triangle_rank() {
        let q = Field::Rationals;
        let d = Matrix::from_rows(q, &[vec![-1, 1, 0], vec![0, -1, 1], vec![1, 0, -1]]);
        assert_eq!(d.rank(), 2);
        assert_eq!(d.kernel_basis().len(), 1);
    }

    #[test]
    fn product_and_kron() {
        let q = Field::Rationals;
        let a = Matrix::from_rows(q, &[vec![1, 2], vec![0, 1]]);
        let b = Matrix::from_rows(q, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b), Matrix::from_rows(q, &[vec![2, 1], vec![1, 0]]));
        let k = a.kron(&b);
        assert_eq!(k.get(0, 1), q.from_i64(1));
        assert_eq!(k.get(1, 2), q.from_i64(2));
        assert_eq!(k.get(3, 2), q.from_i64(1));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let q = Field::Rationals;
        let m = Matrix::from_rows(q, &[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.apply(&v).is_empty());
        }
    }
}
