//! Generator matrices whose every `k` columns are linearly independent.

use itertools::Itertools;

use crate::error::{param, Error, Result};
use crate::gf::{Field, Symbol};
use crate::matrix::FieldMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// The fixed 3x4 binary matrix of the n = 5, k = 3 worked example.
    BuiltinGf2,
    /// Column `j` is `(1, p_j, p_j^2, ..., p_j^(k-1))`.
    Vandermonde,
}

impl GeneratorKind {
    pub fn code(self) -> u8 {
        match self {
            GeneratorKind::BuiltinGf2 => 0,
            GeneratorKind::Vandermonde => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(GeneratorKind::BuiltinGf2),
            1 => Ok(GeneratorKind::Vandermonde),
            other => param(format!("unknown generator kind {other}")),
        }
    }
}

const BINARY_G: [[Symbol; 4]; 3] = [[1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub k: usize,
    pub length: usize,
    pub field: Field,
    /// Empty for the builtin kind.
    pub eval_points: Vec<Symbol>,
}

impl GeneratorSpec {
    pub fn builtin_gf2() -> Self {
        Self {
            kind: GeneratorKind::BuiltinGf2,
            k: 3,
            length: 4,
            field: Field::gf2(),
            eval_points: Vec::new(),
        }
    }

    pub fn vandermonde(field: &Field, k: usize, eval_points: Vec<Symbol>) -> Self {
        Self {
            kind: GeneratorKind::Vandermonde,
            k,
            length: eval_points.len(),
            field: field.clone(),
            eval_points,
        }
    }

    /// Vandermonde spec on the points `0, 1, ..., length - 1`.
    pub fn default_vandermonde(field: &Field, k: usize, length: usize) -> Result<Self> {
        if length as u64 > field.order() as u64 {
            return param(format!(
                "a length-{length} Vandermonde generator needs q >= {length}, field has q = {}",
                field.order()
            ));
        }
        Ok(Self::vandermonde(field, k, (0..length as u32).map(|p| p as Symbol).collect()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return param("generator dimension k must be at least 1");
        }
        if self.k > self.length {
            return param(format!(
                "generator dimension k = {} exceeds length {}",
                self.k, self.length
            ));
        }
        match self.kind {
            GeneratorKind::BuiltinGf2 => {
                if self.k != 3 || self.length != 4 || self.field != Field::gf2() {
                    return param(format!(
                        "builtin binary generator only exists for k = 3, length 4 over GF(2); \
                         requested k = {}, length {}, {:?}",
                        self.k, self.length, self.field
                    ));
                }
            }
            GeneratorKind::Vandermonde => {
                if self.eval_points.len() != self.length {
                    return param("number of evaluation points differs from generator length");
                }
                for &p in &self.eval_points {
                    self.field.check(p)?;
                }
                if let Some(dup) = self.eval_points.iter().duplicates().next() {
                    return param(format!("duplicate evaluation point {dup}"));
                }
            }
        }
        Ok(())
    }
}

/// Raw Vandermonde matrix, no distinctness check.
pub fn vandermonde_matrix(field: &Field, k: usize, points: &[Symbol]) -> Result<FieldMatrix> {
    let mut data = Vec::with_capacity(k * points.len());
    for row in 0..k {
        for &p in points {
            field.check(p)?;
            data.push(field.pow(p, row as u32));
        }
    }
    FieldMatrix::new(field, k, points.len(), data)
}

pub fn build_generator(spec: &GeneratorSpec) -> Result<FieldMatrix> {
    spec.validate()?;
    let g = match spec.kind {
        GeneratorKind::BuiltinGf2 => FieldMatrix::from_rows(&spec.field, &BINARY_G)?,
        GeneratorKind::Vandermonde => vandermonde_matrix(&spec.field, spec.k, &spec.eval_points)?,
    };
    if !is_mds(&g, spec.k)? {
        return Err(Error::Internal(format!("generator {spec:?} is not MDS")));
    }
    Ok(g)
}

/// True iff every `k`-column submatrix of `g` has full rank.
pub fn is_mds(g: &FieldMatrix, k: usize) -> Result<bool> {
    if g.rows() != k {
        return param(format!("is_mds: k = {k} but matrix has {} rows", g.rows()));
    }
    if k > g.cols() {
        return Ok(false);
    }
    for cols in (0..g.cols()).combinations(k) {
        if g.select_columns(&cols)?.rank() != k {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Determinant by Laplace expansion; independent of elimination.
    fn det(f: &Field, m: &[Vec<Symbol>]) -> Symbol {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut acc = 0;
        for c in 0..n {
            let minor: Vec<Vec<Symbol>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                .collect();
            // characteristic 2: no signs
            acc ^= f.mul(m[0][c], det(f, &minor));
        }
        acc
    }

    #[test]
    fn builtin_matches_worked_example() {
        let g = build_generator(&GeneratorSpec::builtin_gf2()).unwrap();
        assert_eq!(g.row(0), &[1, 1, 0, 0]);
        assert_eq!(g.row(1), &[1, 0, 1, 0]);
        assert_eq!(g.row(2), &[1, 0, 0, 1]);
        assert!(is_mds(&g, 3).unwrap());
    }

    #[test]
    fn builtin_rejects_other_shapes() {
        let mut spec = GeneratorSpec::builtin_gf2();
        spec.k = 2;
        assert!(build_generator(&spec).is_err());
        let mut spec = GeneratorSpec::builtin_gf2();
        spec.field = Field::gf256();
        assert!(build_generator(&spec).is_err());
    }

    #[test]
    fn vandermonde_k1_is_all_ones() {
        let f = Field::gf256();
        let g = build_generator(&GeneratorSpec::vandermonde(&f, 1, vec![0, 5, 9])).unwrap();
        assert_eq!(g.row(0), &[1, 1, 1]);
    }

    #[test]
    fn vandermonde_gf4_k2() {
        let f = Field::with_degree(2).unwrap();
        let g = build_generator(&GeneratorSpec::vandermonde(&f, 2, vec![1, 2, 3])).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(g.select_columns(&[a, b]).unwrap().rank(), 2);
        }
    }

    #[test]
    fn duplicate_points_rejected() {
        let f = Field::gf256();
        let err = build_generator(&GeneratorSpec::vandermonde(&f, 2, vec![1, 2, 1])).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
        assert!(GeneratorSpec::default_vandermonde(&Field::gf2(), 2, 3).is_err());
    }

    #[test]
    fn zero_column_is_not_mds() {
        let f = Field::gf256();
        let g = FieldMatrix::from_rows(&f, &[[1, 0, 3], [2, 0, 4]]).unwrap();
        assert!(!is_mds(&g, 2).unwrap());
        assert!(is_mds(&g, 3).is_err());
    }

    #[test]
    fn distinct_vandermonde_is_mds_by_determinant() {
        let f = Field::gf256();
        let points = [0u16, 1, 2, 3, 7, 100];
        for k in 1..=points.len() {
            let g = vandermonde_matrix(&f, k, &points).unwrap();
            assert!(is_mds(&g, k).unwrap());
            for cols in (0..points.len()).combinations(k) {
                let sub: Vec<Vec<Symbol>> =
                    (0..k).map(|r| cols.iter().map(|&c| g.get(r, c)).collect()).collect();
                assert_ne!(det(&f, &sub), 0);
            }
        }
    }

    #[test]
    fn is_mds_equals_distinctness_for_small_fields() {
        for m in 1..=4 {
            let f = Field::with_degree(m).unwrap();
            let q = f.order() as u16;
            for k in 1..=3usize {
                for len in k..=4usize {
                    let tuples = (0..len).map(|_| 0..q).multi_cartesian_product();
                    for pts in tuples {
                        let g = vandermonde_matrix(&f, k, &pts).unwrap();
                        let distinct = pts.iter().all_unique();
                        // k = 1: every column is (1), so always MDS
                        let expect = k == 1 || distinct;
                        assert_eq!(is_mds(&g, k).unwrap(), expect, "m={m} k={k} pts={pts:?}");
                    }
                }
            }
        }
    }
}
