use std::fmt;

use super::{Field, LinalgError, Scalar};

/// Dense row-major matrix with exact entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Scalar>,
}

/// Output of [`Matrix::rref`]: `transform * input == form`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub form: Matrix,
    pub pivots: Vec<usize>,
    pub transform: Matrix,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            field,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                debug_assert!(field.contains(&v));
                data.push(v);
            }
        }
        Matrix {
            rows,
            cols,
            field,
            data,
        }
    }

    /// Builds a matrix from integer rows. All rows must have the same length.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(field, rows.len(), cols, |r, c| field.from_i64(rows[r][c]))
    }

    /// Zero-row or zero-column matrices carry their shape explicitly.
    pub fn from_rows(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<Scalar>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                op: "from_rows",
                left: (rows, cols),
                right: (entries.len(), 1),
            });
        }
        if entries.iter().any(|e| !field.contains(e)) {
            return Err(LinalgError::FieldMismatch);
        }
        Ok(Matrix {
            rows,
            cols,
            field,
            data: entries,
        })
    }

    /// Single column built from a vector.
    pub fn column_vector(field: Field, v: &[Scalar]) -> Self {
        Self::from_fn(field, v.len(), 1, |r, _| v[r].clone())
    }

    /// Columns placed side by side; `rows` is needed when `columns` is empty.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        Self::from_fn(field, rows, columns.len(), |r, c| columns[c][r].clone())
    }

    /// `m x m` Jordan block with `lambda` on the diagonal and ones above it.
    pub fn jordan_block(m: usize, lambda: &Scalar) -> Self {
        let field = lambda.field();
        Self::from_fn(field, m, m, |r, c| {
            if r == c {
                lambda.clone()
            } else if c == r + 1 {
                field.one()
            } else {
                field.zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        debug_assert!(self.field.contains(&v));
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let v = self.get(r, c);
                    if r == c {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    fn check_field(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.field != other.field {
            Err(LinalgError::FieldMismatch)
        } else {
            Ok(())
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * out.cols + c;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "apply",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(&Scalar, &Scalar) -> Scalar,
    ) -> Result<Matrix, LinalgError> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Horizontal concatenation; all blocks need `rows` rows.
    pub fn hstack(field: Field, rows: usize, blocks: &[&Matrix]) -> Result<Matrix, LinalgError> {
        let cols = blocks.iter().map(|b| b.cols).sum();
        for b in blocks {
            if b.field != field {
                return Err(LinalgError::FieldMismatch);
            }
            if b.rows != rows {
                return Err(LinalgError::DimensionMismatch {
                    op: "hstack",
                    left: (rows, cols),
                    right: b.shape(),
                });
            }
        }
        let mut out = Matrix::zeros(field, rows, cols);
        let mut offset = 0;
        for b in blocks {
            for r in 0..rows {
                for c in 0..b.cols {
                    out.set(r, offset + c, b.get(r, c).clone());
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    /// Block-diagonal matrix.
    pub fn block_diagonal(field: Field, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |r, c| {
            self.get(rows[r], c).clone()
        })
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |r, c| {
            self.get(r, cols[c]).clone()
        })
    }

    /// Reduced row echelon form. Pivot rule: columns left to right, the first
    /// nonzero entry at or below the current pivot row.
    pub fn rref(&self) -> Rref {
        let field = self.field;
        let mut form = self.clone();
        let mut transform = Matrix::identity(field, self.rows);
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(found) = (pivot_row..self.rows).find(|&r| !form.get(r, col).is_zero()) else {
                continue;
            };
            form.swap_rows(found, pivot_row);
            transform.swap_rows(found, pivot_row);
            let inv = form.get(pivot_row, col).inverse().expect("nonzero pivot");
            form.scale_row(pivot_row, &inv);
            transform.scale_row(pivot_row, &inv);
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = form.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                form.add_row_multiple(r, pivot_row, &-&factor);
                transform.add_row_multiple(r, pivot_row, &-&factor);
            }
            pivots.push(col);
            pivot_row += 1;
        }
        Rref {
            form,
            pivots,
            transform,
        }
    }

    /// Row reduction without tracking the transform.
    fn echelon(&self) -> (Matrix, Vec<usize>) {
        let mut form = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(found) = (pivot_row..self.rows).find(|&r| !form.get(r, col).is_zero()) else {
                continue;
            };
            form.swap_rows(found, pivot_row);
            let inv = form.get(pivot_row, col).inverse().expect("nonzero pivot");
            form.scale_row(pivot_row, &inv);
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = form.get(r, col).clone();
                if !factor.is_zero() {
                    form.add_row_multiple(r, pivot_row, &-&factor);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (form, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Basis of `{v : self * v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (form, pivots) = self.echelon();
        let field = self.field;
        let mut is_pivot = vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        (0..self.cols)
            .filter(|&c| is_pivot[c].is_none())
            .map(|free| {
                let mut v = vec![field.zero(); self.cols];
                v[free] = field.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -form.get(row, free);
                }
                v
            })
            .collect()
    }

    /// Canonical basis of the column space: nonzero rows of rref(transpose).
    pub fn column_space(&self) -> Vec<Vec<Scalar>> {
        let (form, pivots) = self.transpose().echelon();
        (0..pivots.len()).map(|r| form.row(r).to_vec()).collect()
    }

    /// Canonical basis of the span of `vectors` (each of length `len`).
    pub fn span_basis(field: Field, len: usize, vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        Matrix::from_columns(field, len, vectors).column_space()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let r = self.rref();
        (r.pivots.len() == self.rows).then_some(r.transform)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn determinant(&self) -> Result<Scalar, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.shape()));
        }
        let mut m = self.clone();
        let mut det = self.field.one();
        for col in 0..self.cols {
            let Some(found) = (col..self.rows).find(|&r| !m.get(r, col).is_zero()) else {
                return Ok(self.field.zero());
            };
            if found != col {
                m.swap_rows(found, col);
                det = -&det;
            }
            let pivot = m.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inverse().expect("nonzero pivot");
            for r in col + 1..self.rows {
                let factor = m.get(r, col).clone();
                if !factor.is_zero() {
                    m.add_row_multiple(r, col, &-&(&factor * &inv));
                }
            }
        }
        Ok(det)
    }

    /// `self^k`, with `self^0 = I`.
    pub fn power(&self, mut k: u64) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.shape()));
        }
        let mut acc = Matrix::identity(self.field, self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Some `X` with `self * X == rhs`, or `None` if inconsistent.
    pub fn solve(&self, rhs: &Matrix) -> Result<Option<Matrix>, LinalgError> {
        self.check_field(rhs)?;
        if rhs.rows != self.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "solve",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let aug = Matrix::hstack(self.field, self.rows, &[self, rhs])?;
        let (form, pivots) = aug.echelon();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.field, self.cols, rhs.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                x.set(pc, c, form.get(row, self.cols + c).clone());
            }
        }
        Ok(Some(x))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, s: &Scalar) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            if !self.data[idx].is_zero() {
                self.data[idx] = &self.data[idx] * s;
            }
        }
    }

    /// `row[target] += factor * row[source]`
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, factor: &Scalar) {
        for c in 0..self.cols {
            let s = &self.data[source * self.cols + c];
            if s.is_zero() {
                continue;
            }
            let add = s * factor;
            let idx = target * self.cols + c;
            self.data[idx] = &self.data[idx] + &add;
        }
    }

    /// `col[target] += factor * col[source]`
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, factor: &Scalar) {
        for r in 0..self.rows {
            let s = &self.data[r * self.cols + source];
            if s.is_zero() {
                continue;
            }
            let add = s * factor;
            let idx = r * self.cols + target;
            self.data[idx] = &self.data[idx] + &add;
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{}x{}[", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|s| s.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(Q, rows)
    }

    #[test]
    fn identity_product() {
        let a = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(Matrix::identity(Q, 2).mul(&a).unwrap(), a);
    }

    #[test]
    fn short_exact_sequence_composites() {
        let row = m(&[&[1, 1]]);
        assert_eq!(row.mul(&m(&[&[0], &[1]])).unwrap(), m(&[&[1]]));
        assert!(row.mul(&m(&[&[-1], &[1]])).unwrap().is_zero());
    }

    #[test]
    fn mul_errors() {
        let a = m(&[&[1, 1]]);
        assert!(matches!(a.mul(&a), Err(LinalgError::DimensionMismatch { .. })));
        let b = Matrix::identity(Field::prime(5).unwrap(), 2);
        assert!(matches!(a.mul(&b), Err(LinalgError::FieldMismatch)));
    }

    #[test]
    fn rref_examples() {
        let z = Matrix::zeros(Q, 2, 3);
        let r = z.rref();
        assert_eq!(r.form, z);
        assert!(r.pivots.is_empty());

        let p = m(&[&[0, 1], &[1, 0]]);
        let r = p.rref();
        assert!(r.form.is_identity());
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.transform.mul(&p).unwrap(), r.form);

        let gf2 = Field::prime(2).unwrap();
        let ones = Matrix::from_i64(gf2, &[&[1, 1], &[1, 1]]);
        let r = ones.rref();
        assert_eq!(r.form, Matrix::from_i64(gf2, &[&[1, 1], &[0, 0]]));
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn nullspace_examples() {
        assert!(Matrix::identity(Q, 3).nullspace().is_empty());
        let ns = m(&[&[1, 1]]).nullspace();
        assert_eq!(ns, vec![vec![Q.from_i64(-1), Q.from_i64(1)]]);
        assert_eq!(Matrix::zeros(Q, 1, 2).nullspace().len(), 2);
    }

    #[test]
    fn powers_and_jordan_blocks() {
        let a = m(&[&[2, 1], &[7, 3]]);
        assert!(a.power(0).unwrap().is_identity());
        let j = Matrix::jordan_block(2, &Q.zero());
        assert_eq!(j, m(&[&[0, 1], &[0, 0]]));
        assert!(j.power(2).unwrap().is_zero());
        assert_eq!(Matrix::jordan_block(1, &Q.zero()), m(&[&[0]]));
        let f5 = Field::prime(5).unwrap();
        let j3 = Matrix::jordan_block(3, &f5.from_i64(2));
        assert_eq!(j3, Matrix::from_i64(f5, &[&[2, 1, 0], &[0, 2, 1], &[0, 0, 2]]));
        assert!(matches!(m(&[&[1, 2]]).power(2), Err(LinalgError::NotSquare(_))));
    }

    #[test]
    fn idempotent_squares_to_itself() {
        // The c-component of the idempotent splitting the six-element component module.
        let a = m(&[&[0, -1, -1], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.power(2).unwrap(), a);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert_eq!(a.determinant().unwrap(), Q.from_i64(1));
        let b = m(&[&[3], &[2]]);
        let x = a.solve(&b).unwrap().unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        let singular = m(&[&[1, 1], &[1, 1]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&m(&[&[1], &[0]])).unwrap().is_none());
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-3i64..=3, rows * cols)
            .prop_map(move |v| Matrix::from_fn(Q, rows, cols, |r, c| Q.from_i64(v[r * cols + c])))
    }

    proptest! {
        #[test]
        fn associativity(a in small_matrix(2, 3), b in small_matrix(3, 2), c in small_matrix(2, 4)) {
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn rank_nullity(a in small_matrix(3, 5)) {
            let ns = a.nullspace();
            prop_assert_eq!(a.rank() + ns.len(), 5);
            for v in &ns {
                prop_assert!(a.apply(v).unwrap().iter().all(Scalar::is_zero));
            }
        }

        #[test]
        fn rref_transform_is_invertible(a in small_matrix(4, 3)) {
            let r = a.rref();
            prop_assert_eq!(r.transform.mul(&a).unwrap(), r.form.clone());
            let inv = r.transform.inverse().unwrap();
            prop_assert!(r.transform.mul(&inv).unwrap().is_identity());
        }

        #[test]
        fn determinant_matches_invertibility(a in small_matrix(3, 3)) {
            prop_assert_eq!(a.determinant().unwrap().is_zero(), !a.is_invertible());
        }
    }
}
