//! Exact linear algebra over a number field: matrices, subspaces of R^N,
//! and affine flats.
//!
//! Complex subspaces of C^m are stored as subspaces of R^(2m) in
//! interleaved coordinates (re1, im1, re2, im2, ...) and are required to
//! be invariant under the i-action J(re, im) = (-im, re). All scalars of a
//! subspace live in one real-embedded field; complex-coordinate data is
//! converted on the way in through `complex_span`.

use crate::numberfield::{ComplexSplit, Elem, Field, NfError};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinError {
    DimensionMismatch,
    FieldMismatch,
    NotRealField,
    NotInvariant,
    OddAmbient,
    Singular,
    Nf(NfError),
    AmbientMismatch,
    ModeMismatch,
    NotRational,
}

impl fmt::Display for LinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinError::DimensionMismatch => write!(f, "dimension mismatch"),
            LinError::FieldMismatch => write!(f, "field mismatch"),
            LinError::NotRealField => {
                write!(f, "subspace scalars must come from a real-embedded field")
            }
            LinError::NotInvariant => write!(f, "complex subspace is not i-invariant"),
            LinError::OddAmbient => write!(f, "complex mode needs even real dimension"),
            LinError::Singular => write!(f, "matrix is singular"),
            LinError::Nf(e) => write!(f, "{}", e),
            LinError::AmbientMismatch => write!(f, "ambient dimensions differ"),
            LinError::ModeMismatch => write!(f, "scalar modes differ"),
            LinError::NotRational => write!(f, "operation needs rational entries"),
        }
    }
}

impl From<NfError> for LinError {
    fn from(e: NfError) -> Self {
        LinError::Nf(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Elem>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for e in row {
                assert!(e.field() == field, "field mismatch");
                data.push(e);
            }
        }
        Matrix { field: field.clone(), rows: r, cols: c, data }
    }

    pub fn from_rational_rows(field: &Field, rows: &[Vec<BigRational>]) -> Matrix {
        let conv: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|q| field.from_rational(q.clone())).collect())
            .collect();
        Matrix::from_rows(field, conv)
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

    pub fn at(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimension");
        assert!(self.field == other.field, "field mismatch");
        let mut m = Matrix::zero(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.field.zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
                }
                *m.at_mut(i, j) = acc;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn stack(&self, below: &Matrix) -> Matrix {
        assert_eq!(self.cols, below.cols);
        assert!(self.field == below.field);
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        Matrix {
            field: self.field.clone(),
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn augment(&self, right: &Matrix) -> Matrix {
        assert_eq!(self.rows, right.rows);
        assert!(self.field == right.field);
        let mut m = Matrix::zero(&self.field, self.rows, self.cols + right.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = self.at(i, j).clone();
            }
            for j in 0..right.cols {
                *m.at_mut(i, self.cols + j) = right.at(i, j).clone();
            }
        }
        m
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let mut piv = None;
            for i in r..self.rows {
                if !self.at(i, c).is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            self.swap_rows(r, p);
            let inv = self.at(r, c).inv().expect("pivot nonzero");
            for j in c..self.cols {
                *self.at_mut(r, j) = self.at(r, j).mul(&inv);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let factor = self.at(i, c).clone();
                    for j in c..self.cols {
                        let t = self.at(r, j).mul(&factor);
                        *self.at_mut(i, j) = self.at(i, j).sub(&t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel {x : Mx = 0}, as rows.
    pub fn kernel(&self) -> Vec<Vec<Elem>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.sort();
        let mut out = Vec::with_capacity(free.len());
        for &fcol in &free {
            let mut v = vec![self.field.zero(); self.cols];
            v[fcol] = self.field.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = m.at(ri, fcol).neg();
            }
            out.push(v);
        }
        out
    }

    /// One solution of Mx = b, if consistent.
    pub fn solve(&self, b: &[Elem]) -> Option<Vec<Elem>> {
        assert_eq!(b.len(), self.rows);
        let rhs = Matrix::from_rows(
            &self.field,
            b.iter().map(|e| vec![e.clone()]).collect(),
        );
        let mut aug = self.augment(&rhs);
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(ri, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Matrix, LinError> {
        if self.rows != self.cols {
            return Err(LinError::DimensionMismatch);
        }
        let n = self.rows;
        let mut aug = self.augment(&Matrix::identity(&self.field, n));
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(LinError::Singular);
        }
        let mut inv = Matrix::zero(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                *inv.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Ok(inv)
    }

    pub fn is_rational(&self) -> bool {
        self.data.iter().all(|e| e.is_rational())
    }
}

pub fn dot(u: &[Elem], v: &[Elem]) -> Elem {
    assert_eq!(u.len(), v.len());
    let mut acc = u[0].field().zero();
    for (a, b) in u.iter().zip(v) {
        acc = acc.add(&a.mul(b));
    }
    acc
}

pub fn vec_sub(u: &[Elem], v: &[Elem]) -> Vec<Elem> {
    u.iter().zip(v).map(|(a, b)| a.sub(b)).collect()
}

pub fn vec_add(u: &[Elem], v: &[Elem]) -> Vec<Elem> {
    u.iter().zip(v).map(|(a, b)| a.add(b)).collect()
}

pub fn vec_is_zero(v: &[Elem]) -> bool {
    v.iter().all(|e| e.is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Real,
    Complex,
}

/// Linear subspace of R^N in reduced row echelon basis, so equality of
/// subspaces is equality of stored bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    mode: Mode,
    ambient: usize,
    basis: Matrix, // RREF rows, rank many
}

/// The i-action on interleaved real coordinates: (re, im) -> (-im, re).
pub fn apply_j(v: &[Elem]) -> Vec<Elem> {
    assert!(v.len() % 2 == 0);
    let mut out = Vec::with_capacity(v.len());
    for p in v.chunks(2) {
        out.push(p[1].neg());
        out.push(p[0].clone());
    }
    out
}

impl Subspace {
    /// Span of real-picture vectors. In complex mode the span must already
    /// be i-invariant; use `complex_span` to close it instead.
    pub fn span(
        mode: Mode,
        ambient: usize,
        field: &Field,
        vectors: Vec<Vec<Elem>>,
    ) -> Result<Subspace, LinError> {
        if !field.is_real() {
            return Err(LinError::NotRealField);
        }
        if mode == Mode::Complex && ambient % 2 != 0 {
            return Err(LinError::OddAmbient);
        }
        for v in &vectors {
            if v.len() != ambient {
                return Err(LinError::DimensionMismatch);
            }
            for e in v {
                if e.field() != field {
                    return Err(LinError::FieldMismatch);
                }
            }
        }
        let mut m = Matrix::from_rows(field, vectors);
        if m.rows() == 0 {
            m = Matrix::zero(field, 0, ambient);
        }
        m.rref();
        let rank = (0..m.rows())
            .take_while(|&i| (0..m.cols()).any(|j| !m.at(i, j).is_zero()))
            .count();
        let basis = Matrix::from_rows(field, (0..rank).map(|i| m.row(i)).collect());
        let s = Subspace {
            mode,
            ambient,
            basis: if rank == 0 { Matrix::zero(field, 0, ambient) } else { basis },
        };
        if mode == Mode::Complex && !s.is_i_invariant() {
            return Err(LinError::NotInvariant);
        }
        Ok(s)
    }

    pub fn zero(mode: Mode, ambient: usize, field: &Field) -> Subspace {
        Subspace::span(mode, ambient, field, Vec::new()).expect("zero span")
    }

    pub fn full(mode: Mode, ambient: usize, field: &Field) -> Subspace {
        let rows = (0..ambient)
            .map(|i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Subspace::span(mode, ambient, field, rows).expect("full span")
    }

    /// Smallest i-invariant span containing the vectors: adds J v for each v.
    pub fn complex_closure(
        ambient: usize,
        field: &Field,
        vectors: Vec<Vec<Elem>>,
    ) -> Result<Subspace, LinError> {
        let mut all = Vec::with_capacity(vectors.len() * 2);
        for v in vectors {
            all.push(apply_j(&v));
            all.push(v);
        }
        Subspace::span(Mode::Complex, ambient, field, all)
    }

    /// C-span of complex-coordinate vectors, as a real-picture subspace.
    /// Entries may come from the rationals, a real field, or a nonreal
    /// quadratic; the scalars of the result live in the split's real field.
    pub fn complex_span(
        complex_dim: usize,
        field: &Field,
        vectors: &[Vec<Elem>],
    ) -> Result<Subspace, LinError> {
        let split = ComplexSplit::new(field)?;
        let rf = split.real_field().clone();
        let mut real_vecs = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != complex_dim {
                return Err(LinError::DimensionMismatch);
            }
            let mut rv = Vec::with_capacity(2 * complex_dim);
            for e in v {
                let (re, im) = split.split(e);
                rv.push(re);
                rv.push(im);
            }
            real_vecs.push(rv);
        }
        Subspace::complex_closure(2 * complex_dim, &rf, real_vecs)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.dim()).map(|i| self.basis.row(i)).collect()
    }

    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_i_invariant(&self) -> bool {
        if self.ambient % 2 != 0 {
            return false;
        }
        for i in 0..self.dim() {
            if !self.contains_vec(&apply_j(&self.basis.row(i))) {
                return false;
            }
        }
        true
    }

    pub fn contains_vec(&self, v: &[Elem]) -> bool {
        assert_eq!(v.len(), self.ambient);
        if vec_is_zero(v) {
            return true;
        }
        if self.dim() == 0 {
            return false;
        }
        // solve B^T a = v
        self.basis.transpose().solve(v).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other
            .basis_rows()
            .iter()
            .all(|v| self.contains_vec(v))
    }

    pub fn equals(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && self.contains(other)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinError> {
        self.check_compatible(other)?;
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subspace::span(self.mode, self.ambient, self.field(), rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinError> {
        self.check_compatible(other)?;
        let (ka, kb) = (self.dim(), other.dim());
        if ka == 0 || kb == 0 {
            return Ok(Subspace::zero(self.mode, self.ambient, self.field()));
        }
        // columns: coefficients (a, b) with B_A^T a - B_B^T b = 0
        let m = self
            .basis
            .transpose()
            .augment(&neg_matrix(&other.basis.transpose()));
        let ker = m.kernel();
        let rows: Vec<Vec<Elem>> = ker
            .iter()
            .map(|ab| {
                let a = &ab[..ka];
                self.basis.transpose().mul_vec_cols(a)
            })
            .collect();
        Subspace::span(self.mode, self.ambient, self.field(), rows)
    }

    /// Euclidean orthogonal complement. For complex mode this is the real
    /// picture of the Hermitian complement, and i-invariance is automatic.
    pub fn orth_complement(&self) -> Subspace {
        let ker = self.basis.kernel();
        Subspace::span(self.mode, self.ambient, self.field(), ker)
            .expect("complement of invariant span is invariant")
    }

    /// Orthogonal projection matrix onto this subspace.
    pub fn projection_matrix(&self) -> Matrix {
        let n = self.ambient;
        let f = self.field();
        if self.dim() == 0 {
            return Matrix::zero(f, n, n);
        }
        let b = &self.basis;
        let bt = b.transpose();
        let gram = b.mul(&bt);
        let gram_inv = gram.inverse().expect("gram of independent rows");
        bt.mul(&gram_inv).mul(b)
    }

    /// Exact squared Euclidean distance from a point to the subspace.
    pub fn dist_sq(&self, v: &[Elem]) -> Elem {
        let p = self.projection_matrix();
        let proj = p.mul_vec(v);
        let d = vec_sub(v, &proj);
        dot(&d, &d)
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), LinError> {
        if self.ambient != other.ambient {
            return Err(LinError::AmbientMismatch);
        }
        if self.mode != other.mode {
            return Err(LinError::ModeMismatch);
        }
        if self.field() != other.field() {
            return Err(LinError::FieldMismatch);
        }
        Ok(())
    }

    /// Rational complex-mode subspace as complex-coordinate vectors over
    /// Q(i). Only for rational scalars.
    pub fn complex_coordinates(&self) -> Result<Vec<Vec<Elem>>, LinError> {
        if self.mode != Mode::Complex {
            return Err(LinError::ModeMismatch);
        }
        if !self.basis.is_rational() {
            return Err(LinError::NotRational);
        }
        let gi = Field::gaussian();
        let i = gi.gen();
        let mut out = Vec::new();
        for row in self.basis_rows() {
            let mut cv = Vec::with_capacity(self.ambient / 2);
            for p in row.chunks(2) {
                let re = gi.from_rational(p[0].to_rational().unwrap());
                let im = gi.from_rational(p[1].to_rational().unwrap());
                cv.push(re.add(&im.mul(&i)));
            }
            out.push(cv);
        }
        // reduce over Q(i)
        let mut m = Matrix::from_rows(&gi, out);
        m.rref();
        let rank = (0..m.rows())
            .take_while(|&r| (0..m.cols()).any(|c| !m.at(r, c).is_zero()))
            .count();
        Ok((0..rank).map(|r| m.row(r)).collect())
    }

    /// Change of scalars along a coercion (rationals into a bigger field).
    pub fn promote(&self, target: &Field) -> Result<Subspace, LinError> {
        let rows = self
            .basis_rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| e.promote(target))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Subspace::span(self.mode, self.ambient, target, rows)
    }
}

fn neg_matrix(m: &Matrix) -> Matrix {
    let rows = (0..m.rows())
        .map(|i| m.row(i).iter().map(|e| e.neg()).collect())
        .collect();
    Matrix::from_rows(m.field(), rows)
}

impl Matrix {
    /// B * a interpreting `a` as coefficients of columns of B.
    fn mul_vec_cols(&self, a: &[Elem]) -> Vec<Elem> {
        self.mul_vec(a)
    }
}

/// Affine flat: base point plus direction subspace, in the real picture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    pub base: Vec<Elem>,
    pub dir: Subspace,
}

#[derive(Clone, Debug)]
pub enum FlatMeet {
    Empty,
    Flat(Flat),
}

impl Flat {
    pub fn new(base: Vec<Elem>, dir: Subspace) -> Result<Flat, LinError> {
        if base.len() != dir.ambient() {
            return Err(LinError::DimensionMismatch);
        }
        for e in &base {
            if e.field() != dir.field() {
                return Err(LinError::FieldMismatch);
            }
        }
        Ok(Flat { base, dir })
    }

    pub fn point(base: Vec<Elem>, mode: Mode) -> Result<Flat, LinError> {
        let f = base[0].field().clone();
        let n = base.len();
        Flat::new(base, Subspace::zero(mode, n, &f))
    }

    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    pub fn ambient(&self) -> usize {
        self.dir.ambient()
    }

    pub fn contains_point(&self, p: &[Elem]) -> bool {
        self.dir.contains_vec(&vec_sub(p, &self.base))
    }

    pub fn equals(&self, other: &Flat) -> bool {
        self.dir.equals(&other.dir) && self.contains_point(&other.base)
    }

    pub fn translate(&self, v: &[Elem]) -> Flat {
        Flat {
            base: vec_add(&self.base, v),
            dir: self.dir.clone(),
        }
    }

    /// Intersection of two flats; empty is a first-class outcome.
    pub fn intersect(&self, other: &Flat) -> Result<FlatMeet, LinError> {
        if self.ambient() != other.ambient() {
            return Err(LinError::AmbientMismatch);
        }
        if self.dir.field() != other.dir.field() {
            return Err(LinError::FieldMismatch);
        }
        let f = self.dir.field();
        let (ka, kb) = (self.dim(), other.dim());
        // solve B_A^T a - B_B^T b = base_B - base_A
        let rhs = vec_sub(&other.base, &self.base);
        let m = if ka + kb == 0 {
            Matrix::zero(f, self.ambient(), 0)
        } else if ka == 0 {
            neg_matrix(&other.dir.basis_matrix().transpose())
        } else if kb == 0 {
            self.dir.basis_matrix().transpose()
        } else {
            self.dir
                .basis_matrix()
                .transpose()
                .augment(&neg_matrix(&other.dir.basis_matrix().transpose()))
        };
        match m.solve(&rhs) {
            None => Ok(FlatMeet::Empty),
            Some(sol) => {
                let a = &sol[..ka];
                let pt = if ka == 0 {
                    self.base.clone()
                } else {
                    vec_add(&self.base, &self.dir.basis_matrix().transpose().mul_vec(a))
                };
                let dir = self.dir.intersect(&other.dir)?;
                Ok(FlatMeet::Flat(Flat { base: pt, dir }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn qf() -> Field {
        Field::rationals()
    }

    fn qvec(f: &Field, xs: &[i64]) -> Vec<Elem> {
        xs.iter().map(|&x| f.from_int(x)).collect()
    }

    #[test]
    fn rref_and_rank() {
        let f = qf();
        let m = Matrix::from_rational_rows(
            &f,
            &[
                vec![int(1), int(2), int(3)],
                vec![int(2), int(4), int(6)],
                vec![int(1), int(0), int(1)],
            ],
        );
        assert_eq!(m.rank(), 2);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        for k in &ker {
            assert!(vec_is_zero(&m.mul_vec(k)));
        }
    }

    #[test]
    fn solve_and_inverse() {
        let f = qf();
        let m = Matrix::from_rational_rows(
            &f,
            &[vec![int(2), int(1)], vec![int(1), int(1)]],
        );
        let b = qvec(&f, &[3, 2]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 2));
        // inconsistent system
        let sing = Matrix::from_rational_rows(
            &f,
            &[vec![int(1), int(1)], vec![int(2), int(2)]],
        );
        assert!(sing.solve(&qvec(&f, &[0, 1])).is_none());
        assert!(matches!(sing.inverse(), Err(LinError::Singular)));
    }

    #[test]
    fn subspace_canonical_equality() {
        let f = qf();
        let a = Subspace::span(
            Mode::Real,
            3,
            &f,
            vec![qvec(&f, &[1, 1, 0]), qvec(&f, &[0, 1, 1])],
        )
        .unwrap();
        let b = Subspace::span(
            Mode::Real,
            3,
            &f,
            vec![qvec(&f, &[1, 2, 1]), qvec(&f, &[1, 0, -1])],
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.equals(&b));
    }

    #[test]
    fn sum_and_intersection() {
        let f = qf();
        let xy = Subspace::span(
            Mode::Real,
            3,
            &f,
            vec![qvec(&f, &[1, 0, 0]), qvec(&f, &[0, 1, 0])],
        )
        .unwrap();
        let yz = Subspace::span(
            Mode::Real,
            3,
            &f,
            vec![qvec(&f, &[0, 1, 0]), qvec(&f, &[0, 0, 1])],
        )
        .unwrap();
        let meet = xy.intersect(&yz).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet.contains_vec(&qvec(&f, &[0, 1, 0])));
        let join = xy.sum(&yz).unwrap();
        assert_eq!(join.dim(), 3);
    }

    #[test]
    fn complex_plane_intersection_is_zero() {
        // C x 0 and 0 x C inside C^2 meet only at the origin
        let gi = Field::gaussian();
        let e1 = vec![gi.one(), gi.zero()];
        let e2 = vec![gi.zero(), gi.one()];
        let a = Subspace::complex_span(2, &gi, &[e1]).unwrap();
        let b = Subspace::complex_span(2, &gi, &[e2]).unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(b.dim(), 2);
        let meet = a.intersect(&b).unwrap();
        assert_eq!(meet.dim(), 0);
    }

    #[test]
    fn hermitian_complement_of_span_1_i() {
        // (span(1, i))^perp = span(i, 1) up to scale, inside C^2
        let gi = Field::gaussian();
        let i = gi.gen();
        let v = vec![gi.one(), i.clone()];
        let s = Subspace::complex_span(2, &gi, &[v]).unwrap();
        let perp = s.orth_complement();
        assert_eq!(perp.dim(), 2);
        assert!(perp.is_i_invariant());
        let w = vec![i.clone(), gi.one()];
        let sw = Subspace::complex_span(2, &gi, &[w]).unwrap();
        assert!(perp.equals(&sw));
    }

    #[test]
    fn complex_span_over_real_quadratic() {
        // span_C((1, sqrt2)) in C^2: real picture over Q(sqrt2), dim_R 2
        let f = Field::sqrt2();
        let v = vec![f.one(), f.gen()];
        let s = Subspace::complex_span(2, &f, &[v]).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.is_i_invariant());
    }

    #[test]
    fn complex_mode_rejects_non_invariant() {
        let f = qf();
        let r = Subspace::span(Mode::Complex, 2, &f, vec![qvec(&f, &[1, 0])]);
        assert!(matches!(r, Err(LinError::NotInvariant)));
    }

    #[test]
    fn projection_and_distance() {
        let f = qf();
        let line = Subspace::span(Mode::Real, 2, &f, vec![qvec(&f, &[1, 1])]).unwrap();
        let d = line.dist_sq(&qvec(&f, &[1, 0]));
        assert_eq!(d.to_rational().unwrap(), rat(1, 2));
        let p = line.projection_matrix();
        let proj = p.mul_vec(&qvec(&f, &[1, 0]));
        assert_eq!(proj[0].to_rational().unwrap(), rat(1, 2));
        assert_eq!(proj[1].to_rational().unwrap(), rat(1, 2));
    }

    #[test]
    fn flat_intersection_cases() {
        let f = qf();
        // two lines in the plane meeting at (1, 1)
        let l1 = Flat::new(
            qvec(&f, &[0, 0]),
            Subspace::span(Mode::Real, 2, &f, vec![qvec(&f, &[1, 1])]).unwrap(),
        )
        .unwrap();
        let l2 = Flat::new(
            qvec(&f, &[2, 0]),
            Subspace::span(Mode::Real, 2, &f, vec![qvec(&f, &[1, -1])]).unwrap(),
        )
        .unwrap();
        match l1.intersect(&l2).unwrap() {
            FlatMeet::Flat(fl) => {
                assert_eq!(fl.dim(), 0);
                assert_eq!(fl.base, qvec(&f, &[1, 1]));
            }
            FlatMeet::Empty => panic!("lines meet"),
        }
        // parallel lines
        let l3 = l1.translate(&qvec(&f, &[1, 0]));
        assert!(matches!(l1.intersect(&l3).unwrap(), FlatMeet::Empty));
        // equal flats
        assert!(l1.equals(&l1.translate(&qvec(&f, &[2, 2]))));
    }

    #[test]
    fn flat_intersect_matches_equation_form() {
        // independent path: flats as solution sets of linear equations,
        // stacked and solved, must give the same dimension
        let f = qf();
        let fl1 = Flat::new(
            qvec(&f, &[1, 0, 0]),
            Subspace::span(
                Mode::Real,
                3,
                &f,
                vec![qvec(&f, &[1, 1, 0]), qvec(&f, &[0, 0, 1])],
            )
            .unwrap(),
        )
        .unwrap();
        let fl2 = Flat::new(
            qvec(&f, &[0, 1, 0]),
            Subspace::span(
                Mode::Real,
                3,
                &f,
                vec![qvec(&f, &[1, 0, 0]), qvec(&f, &[0, 1, 1])],
            )
            .unwrap(),
        )
        .unwrap();
        let meet = fl1.intersect(&fl2).unwrap();
        // equation form: E_k x = E_k base_k with E_k the complement basis
        let stack_dim = {
            let e1 = fl1.dir.orth_complement();
            let e2 = fl2.dir.orth_complement();
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for r in e1.basis_rows() {
                rhs.push(dot(&r, &fl1.base));
                rows.push(r);
            }
            for r in e2.basis_rows() {
                rhs.push(dot(&r, &fl2.base));
                rows.push(r);
            }
            let m = Matrix::from_rows(&f, rows);
            match m.solve(&rhs) {
                None => None,
                Some(_) => Some(m.cols() - m.rank()),
            }
        };
        match meet {
            FlatMeet::Flat(fl) => assert_eq!(Some(fl.dim()), stack_dim),
            FlatMeet::Empty => assert_eq!(stack_dim, None),
        }
    }

    #[test]
    fn subspace_over_sqrt2_contains() {
        let f = Field::sqrt2();
        let v = vec![f.one(), f.gen()]; // (1, sqrt2)
        let s = Subspace::span(Mode::Real, 2, &f, vec![v.clone()]).unwrap();
        assert!(s.contains_vec(&[f.gen(), f.from_int(2)])); // sqrt2 * (1, sqrt2)
        assert!(!s.contains_vec(&[f.one(), f.one()]));
    }
}
