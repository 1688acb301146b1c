//! Dense vectors and matrices over a [`Field`].
//!
//! Elimination uses the first nonzero entry in a column as pivot. Field
//! arithmetic is exact, so singularity is decided exactly.

use std::fmt;

use crate::error::{param, Error, Result};
use crate::gf::{Field, FieldElement, Symbol};

#[derive(Clone, PartialEq, Eq)]
pub struct FieldVector {
    field: Field,
    elems: Vec<Symbol>,
}

impl FieldVector {
    pub fn new(field: &Field, elems: Vec<Symbol>) -> Result<Self> {
        for &e in &elems {
            field.check(e)?;
        }
        Ok(Self {
            field: field.clone(),
            elems,
        })
    }

    pub fn zeros(field: &Field, len: usize) -> Self {
        Self {
            field: field.clone(),
            elems: vec![0; len],
        }
    }

    /// Unit vector `e_i` of length `len`.
    pub fn unit(field: &Field, len: usize, i: usize) -> Result<Self> {
        if i >= len {
            return param(format!("unit index {i} out of range for length {len}"));
        }
        let mut v = Self::zeros(field, len);
        v.elems[i] = 1;
        Ok(v)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.elems
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.elems
    }

    pub fn get(&self, i: usize) -> Option<FieldElement> {
        self.elems
            .get(i)
            .map(|&v| FieldElement::new(&self.field, v).expect("stored symbols are in range"))
    }

    pub fn dot(&self, other: &FieldVector) -> Result<Symbol> {
        if self.field != other.field {
            return param("dot product of vectors over different fields");
        }
        if self.len() != other.len() {
            return param(format!(
                "dot product length mismatch: {} vs {}",
                self.len(),
                other.len()
            ));
        }
        Ok(self.field.dot(&self.elems, &other.elems))
    }
}

impl fmt::Debug for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.elems)
    }
}

/// Row-major matrix over a single field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Symbol>,
}

impl FieldMatrix {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<Symbol>) -> Result<Self> {
        if data.len() != rows * cols {
            return param(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        for &e in &data {
            field.check(e)?;
        }
        Ok(Self {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows<R: AsRef<[Symbol]>>(field: &Field, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return param("ragged rows");
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(field, rows.len(), cols, data)
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        m
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

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Symbol {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Symbol) -> Result<()> {
        self.field.check(value)?;
        self.data[row * self.cols + col] = value;
        Ok(())
    }

    pub fn row(&self, row: usize) -> &[Symbol] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Symbol> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn column_vector(&self, col: usize) -> FieldVector {
        FieldVector {
            field: self.field.clone(),
            elems: self.column(col),
        }
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return param(format!("column {bad} out of range for {} columns", self.cols));
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            data.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        Ok(Self {
            field: self.field.clone(),
            rows: self.rows,
            cols: cols.len(),
            data,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            data.extend((0..self.rows).map(|r| self.get(r, c)));
        }
        Self {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul_vec(&self, x: &FieldVector) -> Result<FieldVector> {
        if self.field != *x.field() || x.len() != self.cols {
            return param(format!(
                "cannot multiply {}x{} matrix by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            ));
        }
        Ok(FieldVector {
            field: self.field.clone(),
            elems: self.mul_slice(x.as_slice()),
        })
    }

    /// Unchecked `A·x` on raw symbols; `x.len()` must equal `cols`.
    pub fn mul_slice(&self, x: &[Symbol]) -> Vec<Symbol> {
        (0..self.rows)
            .map(|r| self.field.dot(self.row(r), x))
            .collect()
    }

    pub fn scale_row(&mut self, row: usize, by: Symbol) {
        let f = self.field.clone();
        for v in &mut self.data[row * self.cols..(row + 1) * self.cols] {
            *v = f.mul(*v, by);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `row[dst] += by * row[src]`.
    fn add_scaled_row(&mut self, dst: usize, src: usize, by: Symbol) {
        for c in 0..self.cols {
            let s = self.field.mul(self.get(src, c), by);
            self.data[dst * self.cols + c] ^= s;
        }
    }

    /// Row-reduces in place to reduced echelon form; returns the rank.
    fn reduce(&mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(rank, pivot);
            let inv = self.field.inv(self.get(rank, col)).expect("pivot is nonzero");
            self.scale_row(rank, inv);
            for r in 0..self.rows {
                let factor = self.get(r, col);
                if r != rank && factor != 0 {
                    self.add_scaled_row(r, rank, factor);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce()
    }

    /// Inverse of a square matrix by Gauss-Jordan on `[A | I]`.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return param(format!("cannot invert {}x{} matrix", self.rows, self.cols));
        }
        let n = self.rows;
        let mut aug = Self::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.data[r * 2 * n + c] = self.get(r, c);
            }
            aug.data[r * 2 * n + n + r] = 1;
        }
        aug.reduce();
        for i in 0..n {
            if aug.get(i, i) != 1 {
                return Err(Error::SingularMatrix);
            }
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        aug.select_columns(&idx)
    }

    /// Solves `A·x = b` for square invertible `A`.
    pub fn solve(&self, b: &FieldVector) -> Result<FieldVector> {
        if self.rows != self.cols {
            return param(format!("solve needs a square matrix, got {}x{}", self.rows, self.cols));
        }
        if b.len() != self.rows || *b.field() != self.field {
            return param("right-hand side does not match the matrix");
        }
        let n = self.rows;
        let mut aug = Self::zeros(&self.field, n, n + 1);
        for r in 0..n {
            for c in 0..n {
                aug.data[r * (n + 1) + c] = self.get(r, c);
            }
            aug.data[r * (n + 1) + n] = b.as_slice()[r];
        }
        aug.reduce();
        for i in 0..n {
            if aug.get(i, i) != 1 {
                return Err(Error::SingularMatrix);
            }
        }
        Ok(FieldVector {
            field: self.field.clone(),
            elems: (0..n).map(|r| aug.get(r, n)).collect(),
        })
    }
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binary_g() -> FieldMatrix {
        FieldMatrix::from_rows(&Field::gf2(), &[[1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]]).unwrap()
    }

    #[test]
    fn dot_examples() {
        let f = Field::gf2();
        // x_5 = (x12, x13, x14) against v_1 = (1, 1, 1)
        for bits in 0..8u16 {
            let x = FieldVector::new(&f, vec![bits & 1, bits >> 1 & 1, bits >> 2 & 1]).unwrap();
            let v1 = binary_g().column_vector(0);
            assert_eq!(x.dot(&v1).unwrap(), (bits & 1) ^ (bits >> 1 & 1) ^ (bits >> 2 & 1));
        }
        let f = Field::gf256();
        let u = FieldVector::new(&f, vec![7, 200, 33]).unwrap();
        assert_eq!(u.dot(&FieldVector::zeros(&f, 3)).unwrap(), 0);
        for i in 0..3 {
            assert_eq!(u.dot(&FieldVector::unit(&f, 3, i).unwrap()).unwrap(), u.as_slice()[i]);
        }
        assert!(u.dot(&FieldVector::zeros(&f, 2)).is_err());
        assert!(u.dot(&FieldVector::zeros(&Field::gf2(), 3)).is_err());
    }

    #[test]
    fn rank_examples() {
        let f = Field::gf256();
        assert_eq!(FieldMatrix::identity(&f, 4).rank(), 4);
        let dup = FieldMatrix::from_rows(&f, &[[1, 5, 1], [2, 9, 2], [3, 4, 3]]).unwrap();
        assert!(dup.rank() < 3);
        let g = binary_g().select_columns(&[0, 1, 2]).unwrap();
        assert_eq!(g, FieldMatrix::from_rows(&Field::gf2(), &[[1, 1, 0], [1, 0, 1], [1, 0, 0]]).unwrap());
        assert_eq!(g.rank(), 3);
        assert_eq!(FieldMatrix::zeros(&f, 3, 5).rank(), 0);
    }

    #[test]
    fn solve_examples() {
        let f = Field::gf256();
        let b = FieldVector::new(&f, vec![9, 8, 7]).unwrap();
        assert_eq!(FieldMatrix::identity(&f, 3).solve(&b).unwrap(), b);

        let g = binary_g();
        let f2 = Field::gf2();
        for cols in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            // the system is x·v_c = b_c, i.e. A^T x = b
            let a = g.select_columns(&cols).unwrap().transpose();
            for bits in 0..8u16 {
                let x = FieldVector::new(&f2, vec![bits & 1, bits >> 1 & 1, bits >> 2 & 1]).unwrap();
                let b = a.mul_vec(&x).unwrap();
                assert_eq!(a.solve(&b).unwrap(), x);
            }
        }

        let singular = FieldMatrix::from_rows(&f, &[[1, 2, 3], [1, 2, 3], [0, 0, 1]]).unwrap();
        assert_eq!(singular.solve(&b), Err(Error::SingularMatrix));
        assert_eq!(singular.inverse(), Err(Error::SingularMatrix));
        let rect = FieldMatrix::zeros(&f, 2, 3);
        assert!(matches!(rect.solve(&b), Err(Error::Parameter(_))));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let f = Field::with_degree(4).unwrap();
        let a = FieldMatrix::from_rows(&f, &[[1, 2, 3], [4, 5, 6], [7, 8, 10]]).unwrap();
        let inv = a.inverse().unwrap();
        for c in 0..3 {
            let e = FieldVector::unit(&f, 3, c).unwrap();
            let col = inv.column_vector(c);
            assert_eq!(a.mul_vec(&col).unwrap(), e);
        }
    }

    fn field_strategy() -> impl Strategy<Value = Field> {
        prop_oneof![Just(1u32), Just(4u32), Just(8u32)].prop_map(|m| Field::with_degree(m).unwrap())
    }

    fn square(max: usize) -> impl Strategy<Value = (Field, usize, Vec<u16>, Vec<u16>)> {
        (field_strategy(), 1..=max).prop_flat_map(|(f, n)| {
            let q = f.order() as u16;
            (
                Just(f),
                Just(n),
                proptest::collection::vec(0..q, n * n),
                proptest::collection::vec(0..q, n),
            )
        })
    }

    proptest! {
        #[test]
        fn solve_round_trips((f, n, data, x) in square(6)) {
            let a = FieldMatrix::new(&f, n, n, data).unwrap();
            let x = FieldVector::new(&f, x).unwrap();
            let b = a.mul_vec(&x).unwrap();
            match a.solve(&b) {
                Ok(sol) => {
                    prop_assert_eq!(a.rank(), n);
                    prop_assert_eq!(sol, x);
                }
                Err(e) => {
                    prop_assert_eq!(e, Error::SingularMatrix);
                    prop_assert!(a.rank() < n);
                }
            }
        }

        #[test]
        fn rank_invariant_under_row_ops(
            (f, n, data, _x) in square(6),
            swap in (0usize..6, 0usize..6),
            scale in (0usize..6, 1u16..=u16::MAX),
        ) {
            let a = FieldMatrix::new(&f, n, n, data).unwrap();
            let r = a.rank();
            let mut b = a.clone();
            b.swap_rows(swap.0 % n, swap.1 % n);
            prop_assert_eq!(b.rank(), r);
            let by = 1 + scale.1 % (f.order() as u16 - 1).max(1);
            let by = if f.contains(by) { by } else { 1 };
            b.scale_row(scale.0 % n, by);
            prop_assert_eq!(b.rank(), r);
        }
    }
}
