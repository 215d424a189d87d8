//! Full-rank lattices in R^n, integer column Hermite normal form, and
//! lattice saturation of subspaces.
//!
//! Saturation of a subspace H under a lattice L is the smallest real
//! subspace containing H that is spanned by rational vectors in lattice
//! coordinates. It is computed by expanding each basis vector of H, read
//! in lattice coordinates, into the rational coefficient vectors of its
//! field entries and taking their span. The result is always defined over
//! the rationals.

use crate::linalg::{LinError, Matrix, Mode, Subspace};
use crate::numberfield::{rational_coefficient_vectors, Elem, Field};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Lattice with rational generator matrix B (generators are the columns).
/// B must be square and invertible; the lattice is { B k : k integer }.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: Matrix,   // columns generate
    inverse: Matrix, // B^(-1)
}

impl Lattice {
    pub fn new(generators: &[Vec<BigRational>]) -> Result<Lattice, LinError> {
        let n = generators.len();
        if n == 0 || generators.iter().any(|g| g.len() != n) {
            return Err(LinError::DimensionMismatch);
        }
        let q = Field::rationals();
        // generators arrive as vectors; assemble them as columns
        let rows: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| generators[j][i].clone()).collect())
            .collect();
        let basis = Matrix::from_rational_rows(&q, &rows);
        let inverse = basis.inverse()?;
        Ok(Lattice { basis, inverse })
    }

    /// The integer lattice Z^n.
    pub fn standard(n: usize) -> Lattice {
        let q = Field::rationals();
        Lattice {
            basis: Matrix::identity(&q, n),
            inverse: Matrix::identity(&q, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn inverse_matrix(&self) -> &Matrix {
        &self.inverse
    }

    pub fn generators(&self) -> Vec<Vec<BigRational>> {
        (0..self.dim())
            .map(|j| {
                (0..self.dim())
                    .map(|i| self.basis.at(i, j).to_rational().unwrap())
                    .collect()
            })
            .collect()
    }

    /// Coordinates of a vector in the lattice basis, over any field.
    pub fn to_coords(&self, v: &[Elem]) -> Vec<Elem> {
        rat_mat_apply(&self.inverse, v)
    }

    pub fn from_coords(&self, v: &[Elem]) -> Vec<Elem> {
        rat_mat_apply(&self.basis, v)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        let q = Field::rationals();
        let ve: Vec<Elem> = v.iter().map(|x| q.from_rational(x.clone())).collect();
        self.to_coords(&ve)
            .iter()
            .all(|c| c.to_rational().map(|r| r.is_integer()).unwrap_or(false))
    }
}

/// Apply a rational matrix to a vector over any field.
pub fn rat_mat_apply(m: &Matrix, v: &[Elem]) -> Vec<Elem> {
    assert_eq!(m.cols(), v.len());
    assert!(!v.is_empty());
    let f = v[0].field().clone();
    (0..m.rows())
        .map(|i| {
            let mut acc = f.zero();
            for j in 0..m.cols() {
                let q = m.at(i, j).to_rational().expect("rational matrix");
                acc = acc.add(&v[j].mul_rat(&q));
            }
            acc
        })
        .collect()
}

/// Column Hermite normal form. Returns (H, U) with H = M U, U unimodular,
/// pivot columns first with positive pivots, entries left of a pivot
/// reduced into [0, pivot), zero columns last.
pub fn hnf(m: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut h: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let col_op = |h: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for r in h.iter_mut() {
            let t = &r[src] * q;
            r[dst] -= t;
        }
        for r in u.iter_mut() {
            let t = &r[src] * q;
            r[dst] -= t;
        }
    };
    let swap_cols = |h: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for r in h.iter_mut() {
            r.swap(a, b);
        }
        for r in u.iter_mut() {
            r.swap(a, b);
        }
    };
    let negate_col = |h: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c: usize| {
        for r in h.iter_mut() {
            let t = -r[c].clone();
            r[c] = t;
        }
        for r in u.iter_mut() {
            let t = -r[c].clone();
            r[c] = t;
        }
    };
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut next = 0usize; // next pivot column position
    for row in 0..rows {
        if next == cols {
            break;
        }
        loop {
            // smallest nonzero entry in this row at columns >= next
            let mut best: Option<usize> = None;
            for j in next..cols {
                if !h[row][j].is_zero() {
                    match best {
                        None => best = Some(j),
                        Some(b) => {
                            if h[row][j].abs() < h[row][b].abs() {
                                best = Some(j);
                            }
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            swap_cols(&mut h, &mut u, next, b);
            let mut done = true;
            for j in next + 1..cols {
                if !h[row][j].is_zero() {
                    let q = div_round(&h[row][j], &h[row][next]);
                    col_op(&mut h, &mut u, j, next, &q);
                    if !h[row][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                if h[row][next].is_negative() {
                    negate_col(&mut h, &mut u, next);
                }
                // reduce earlier pivot columns at this row
                for &pc in &pivot_cols {
                    let q = h[row][pc].div_floor(&h[row][next]);
                    if !q.is_zero() {
                        col_op(&mut h, &mut u, pc, next, &q);
                    }
                }
                pivot_cols.push(next);
                next += 1;
                break;
            }
        }
    }
    (h, u)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer quotient, ties toward zero; keeps remainders small
    let two = BigInt::from(2);
    let (q, r) = a.div_rem(b);
    if (&r * &two).abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}

/// Basis of the integer kernel { x in Z^c : M x = 0 }.
pub fn integer_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    if m.is_empty() || cols == 0 {
        return (0..cols)
            .map(|i| {
                let mut v = vec![BigInt::zero(); cols];
                v[i] = BigInt::one();
                v
            })
            .collect();
    }
    let (h, u) = hnf(m);
    let rows = h.len();
    let mut out = Vec::new();
    for j in 0..cols {
        if (0..rows).all(|i| h[i][j].is_zero()) {
            out.push((0..cols).map(|i| u[i][j].clone()).collect());
        }
    }
    out
}

/// Z-basis of (Q-span of the given rational vectors) intersected with Z^n.
pub fn integral_span_basis(span_rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    let n = span_rows.first().map(|r| r.len()).unwrap_or(0);
    if span_rows.is_empty() || n == 0 {
        return Vec::new();
    }
    let q = Field::rationals();
    let m = Matrix::from_rational_rows(&q, span_rows);
    // equations cutting out the span
    let eqs = m.kernel();
    if eqs.is_empty() {
        // full space
        return (0..n)
            .map(|i| {
                let mut v = vec![BigInt::zero(); n];
                v[i] = BigInt::one();
                v
            })
            .collect();
    }
    let int_eqs: Vec<Vec<BigInt>> = eqs
        .iter()
        .map(|row| clear_denominators(&row.iter().map(|e| e.to_rational().unwrap()).collect::<Vec<_>>()))
        .collect();
    integer_kernel(&int_eqs)
}

fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in row {
        lcm = lcm.lcm(x.denom());
    }
    row.iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect()
}

/// Smallest subspace containing `h` that is spanned by vectors rational in
/// the coordinates of `lattice`. Output scalars are rational; the result
/// keeps complex mode only when it is itself i-invariant.
pub fn saturate(h: &Subspace, lattice: &Lattice) -> Result<Subspace, LinError> {
    if h.ambient() != lattice.dim() {
        return Err(LinError::AmbientMismatch);
    }
    let q = Field::rationals();
    let n = h.ambient();
    if h.dim() == 0 {
        return Subspace::span(h.mode(), n, &q, Vec::new());
    }
    let mut coeff_rows: Vec<Vec<BigRational>> = Vec::new();
    for v in h.basis_rows() {
        let w = lattice.to_coords(&v);
        coeff_rows.extend(rational_coefficient_vectors(&w));
    }
    let mut m = Matrix::from_rational_rows(&q, &coeff_rows);
    m.rref();
    let rank = (0..m.rows())
        .take_while(|&r| (0..m.cols()).any(|c| !m.at(r, c).is_zero()))
        .count();
    let back: Vec<Vec<Elem>> = (0..rank)
        .map(|r| lattice.from_coords(&m.row(r)))
        .collect();
    let sat_real = Subspace::span(Mode::Real, n, &q, back.clone())?;
    if h.mode() == Mode::Complex && sat_real.is_i_invariant() {
        return Subspace::span(Mode::Complex, n, &q, back);
    }
    Ok(sat_real)
}

/// Independent route to the saturation: the real span of all Galois
/// conjugates of the lattice-coordinate basis. Valid when every embedding
/// of the scalar field is an automorphism, so degree at most two. Returns
/// whether that span agrees with `result`.
pub fn conjugate_span_agrees(
    h: &Subspace,
    lattice: &Lattice,
    result: &Subspace,
) -> Result<bool, LinError> {
    let k = h.field();
    if k.degree() > 2 {
        return Err(LinError::Nf(
            crate::numberfield::NfError::NotConjugationClosed,
        ));
    }
    if h.dim() == 0 {
        return Ok(result.dim() == 0);
    }
    let autos = k.automorphisms();
    let mut conj: Vec<Vec<Elem>> = Vec::new();
    for v in h.basis_rows() {
        let w = lattice.to_coords(&v);
        for sigma in &autos {
            conj.push(w.iter().map(|e| e.map_gen(sigma)).collect());
        }
    }
    // result basis in lattice coordinates, promoted into K
    let mut res_rows: Vec<Vec<Elem>> = Vec::new();
    for v in result.basis_rows() {
        let w = lattice.to_coords(&v);
        let promoted = w
            .iter()
            .map(|e| e.promote(k))
            .collect::<Result<Vec<_>, _>>()?;
        res_rows.push(promoted);
    }
    let cm = Matrix::from_rows(k, conj.clone());
    if cm.rank() != result.dim() {
        return Ok(false);
    }
    let span_c = Matrix::from_rows(k, conj).transpose();
    for r in &res_rows {
        if span_c.solve(r).is_none() {
            return Ok(false);
        }
    }
    if res_rows.is_empty() {
        return Ok(false); // rank was nonzero but result empty
    }
    let span_r = Matrix::from_rows(k, res_rows).transpose();
    for c in 0..span_c.cols() {
        if span_r.solve(&span_c.col(c)).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does the saturation contain the input? Checked over the input's field.
pub fn saturation_contains(h: &Subspace, result: &Subspace) -> Result<bool, LinError> {
    let k = h.field();
    let promoted = result.promote(k)?;
    Ok(promoted.contains(h))
}
