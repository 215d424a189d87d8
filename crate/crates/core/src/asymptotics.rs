//! Asymptotic flats of unbounded branches and the direction membership
//! test behind them.
//!
//! A parameter-free branch alpha(z) = sum_q a_q z^q walks off to infinity
//! along the flat A = a_0 + span{a_q : q < 0}, with the span taken over C
//! in the complex picture. A is optimal in both directions: the branch
//! approaches it (every functional vanishing on the directions kills the
//! principal part), and no smaller flat works, certified by one witness
//! functional per principal direction whose pairing with the branch has
//! an exactly negative valuation.
//!
//! Everything here is computed in the real picture: complex coordinates
//! are interleaved as (re, im) pairs over the split real field, so flats
//! plug directly into integral saturation and torus folding.

use crate::linalg::{dot, vec_sub, Flat, LinError, Mode, Subspace};
use crate::numberfield::{ComplexSplit, Elem, Field, NfError};
use crate::poly::Poly;
use crate::puiseux::{eval_poly_at_series, BranchFamily, PuiseuxScalar, Valuation};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_rational::BigRational;
use num_traits::Signed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatError {
    /// The operation needs a parameter-free branch.
    Parametric,
    /// The real-torus picture needs real branch coefficients.
    NotRealBranch,
    /// The coefficient field has no supported split into re and im parts.
    Unsplittable(NfError),
    /// The chosen subspace does not lie inside the branch's flat.
    DirectionNotInFlat,
    Lin(LinError),
    Nf(NfError),
}

impl fmt::Display for FlatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatError::Parametric => write!(f, "branch must be parameter-free"),
            FlatError::NotRealBranch => {
                write!(f, "real picture needs real branch coefficients")
            }
            FlatError::Unsplittable(e) => write!(f, "cannot split coefficients: {}", e),
            FlatError::DirectionNotInFlat => {
                write!(f, "subspace is not contained in the branch's flat")
            }
            FlatError::Lin(e) => write!(f, "{}", e),
            FlatError::Nf(e) => write!(f, "{}", e),
        }
    }
}

impl From<LinError> for FlatError {
    fn from(e: LinError) -> Self {
        FlatError::Lin(e)
    }
}

impl From<NfError> for FlatError {
    fn from(e: NfError) -> Self {
        FlatError::Nf(e)
    }
}

/// Coefficient realification. Complex mode interleaves (re, im) per
/// coordinate over the split real field; real mode passes through.
pub struct Realifier {
    mode: Mode,
    split: Option<ComplexSplit>,
    rf: Field,
}

impl Realifier {
    pub fn new(field: &Field, mode: Mode) -> Result<Realifier, FlatError> {
        match mode {
            Mode::Real => {
                if !field.is_real() {
                    return Err(FlatError::NotRealBranch);
                }
                Ok(Realifier {
                    mode,
                    split: None,
                    rf: field.clone(),
                })
            }
            Mode::Complex => {
                let split = ComplexSplit::new(field).map_err(FlatError::Unsplittable)?;
                let rf = split.real_field().clone();
                Ok(Realifier {
                    mode,
                    split: Some(split),
                    rf,
                })
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn real_field(&self) -> &Field {
        &self.rf
    }

    /// Real coordinates per complex one.
    pub fn width(&self) -> usize {
        match self.mode {
            Mode::Real => 1,
            Mode::Complex => 2,
        }
    }

    pub fn vec(&self, v: &[Elem]) -> Vec<Elem> {
        match &self.split {
            None => v.to_vec(),
            Some(split) => {
                let mut out = Vec::with_capacity(2 * v.len());
                for e in v {
                    let (re, im) = split.split(e);
                    out.push(re);
                    out.push(im);
                }
                out
            }
        }
    }

    /// Real-picture series of one parameter-free component.
    pub fn series(&self, s: &PuiseuxScalar) -> Result<Vec<PuiseuxScalar>, FlatError> {
        if s.nparams() != 0 {
            return Err(FlatError::Parametric);
        }
        let trunc = s.trunc().cloned();
        match &self.split {
            None => Ok(vec![s.clone()]),
            Some(split) => {
                let mut re_terms = Vec::new();
                let mut im_terms = Vec::new();
                for (q, c) in s.terms() {
                    let e = c.constant_value().expect("parameter-free coefficient");
                    let (re, im) = split.split(&e);
                    re_terms.push((q.clone(), Poly::constant(&self.rf, 0, re)));
                    im_terms.push((q.clone(), Poly::constant(&self.rf, 0, im)));
                }
                Ok(vec![
                    PuiseuxScalar::from_terms(&self.rf, 0, re_terms, trunc.clone()),
                    PuiseuxScalar::from_terms(&self.rf, 0, im_terms, trunc),
                ])
            }
        }
    }

    /// Whole branch in the real picture, coordinates interleaved.
    pub fn branch(&self, fam: &BranchFamily) -> Result<Vec<PuiseuxScalar>, FlatError> {
        if fam.is_parametric() {
            return Err(FlatError::Parametric);
        }
        let mut out = Vec::with_capacity(fam.ambient_dim() * self.width());
        for c in fam.components() {
            out.extend(self.series(c)?);
        }
        Ok(out)
    }
}

/// One minimality certificate: a functional vanishing on every other
/// principal direction, pairing with the branch at exactly `observed`.
#[derive(Clone, Debug)]
pub struct MinimalityWitness {
    pub functional: Vec<Elem>,
    pub observed: BigRational,
}

#[derive(Clone, Debug)]
pub struct AsymptoticFlat {
    pub flat: Flat,
    pub witnesses: Vec<MinimalityWitness>,
}

fn coeff_vector(series: &[PuiseuxScalar], q: &BigRational) -> Vec<Elem> {
    series
        .iter()
        .map(|s| {
            s.coeff_at(q)
                .constant_value()
                .expect("parameter-free coefficient")
        })
        .collect()
}

fn direction_span(
    mode: Mode,
    ambient: usize,
    field: &Field,
    v: &[Elem],
) -> Result<Subspace, LinError> {
    match mode {
        Mode::Real => Subspace::span(mode, ambient, field, vec![v.to_vec()]),
        Mode::Complex => Subspace::complex_closure(ambient, field, vec![v.to_vec()]),
    }
}

/// Functional pairing with the tail of the branch after the constant
/// term is removed.
fn paired_tail(series: &[PuiseuxScalar], base: &[Elem], m: &[Elem]) -> PuiseuxScalar {
    let rf = base[0].field();
    let mut acc = PuiseuxScalar::zero(rf, 0);
    let mut shift = rf.zero();
    for (i, s) in series.iter().enumerate() {
        acc = acc.add(&s.mul_elem(&m[i]));
        shift = shift.add(&m[i].mul(&base[i]));
    }
    acc.sub(&PuiseuxScalar::constant_elem(rf, 0, shift))
}

/// Exact asymptotic flat of a parameter-free branch, with one witness
/// per principal direction. Bounded branches yield a point.
pub fn flat_of_branch(fam: &BranchFamily, mode: Mode) -> Result<AsymptoticFlat, FlatError> {
    let field = fam.components()[0].field().clone();
    let real = Realifier::new(&field, mode)?;
    let rf = real.real_field().clone();
    let series = real.branch(fam)?;
    flat_from_series(mode, &rf, &series)
}

/// Flat of an already realified series vector.
fn flat_from_series(
    mode: Mode,
    rf: &Field,
    series: &[PuiseuxScalar],
) -> Result<AsymptoticFlat, FlatError> {
    let rf = rf.clone();
    let ambient = series.len();

    let mut negatives: Vec<BigRational> = Vec::new();
    for s in series {
        for (q, _) in s.terms() {
            if q.is_negative() && !negatives.contains(q) {
                negatives.push(q.clone());
            }
        }
    }
    negatives.sort();

    let mut dir = Subspace::zero(mode, ambient, &rf);
    let mut selected: Vec<(BigRational, Vec<Elem>)> = Vec::new();
    for q in &negatives {
        let w = coeff_vector(series, q);
        if !dir.contains_vec(&w) {
            dir = dir.sum(&direction_span(mode, ambient, &rf, &w)?)?;
            selected.push((q.clone(), w));
        }
    }

    let base = coeff_vector(series, &BigRational::from_integer(0.into()));

    let mut witnesses = Vec::with_capacity(selected.len());
    for (k, (q_star, w_star)) in selected.iter().enumerate() {
        let mut others = Subspace::zero(mode, ambient, &rf);
        for (j, (_, w)) in selected.iter().enumerate() {
            if j != k {
                others = others.sum(&direction_span(mode, ambient, &rf, w)?)?;
            }
        }
        let ann = others.orth_complement();
        let row = ann
            .basis_rows()
            .into_iter()
            .find(|m| !dot(m, w_star).is_zero())
            .expect("complement row separating an independent direction");
        debug_assert_eq!(
            paired_tail(series, &base, &row).valuation(None),
            Valuation::Exact(q_star.clone())
        );
        witnesses.push(MinimalityWitness {
            functional: row,
            observed: q_star.clone(),
        });
    }

    Ok(AsymptoticFlat {
        flat: Flat::new(base, dir)?,
        witnesses,
    })
}

/// Valuations of the branch against each defining equation of the flat.
/// The branch approaches the flat iff every one exceeds zero.
pub fn approach_residuals(
    fam: &BranchFamily,
    flat: &Flat,
    mode: Mode,
) -> Result<Vec<Valuation>, FlatError> {
    let field = fam.components()[0].field().clone();
    let real = Realifier::new(&field, mode)?;
    let rf = real.real_field().clone();
    let series = real.branch(fam)?;
    let (dir, base) = if flat.dir.field() == &rf {
        (flat.dir.clone(), flat.base.clone())
    } else {
        let dir = flat.dir.promote(&rf)?;
        let base = flat
            .base
            .iter()
            .map(|e| e.promote(&rf))
            .collect::<Result<Vec<_>, _>>()?;
        (dir, base)
    };
    let ann = dir.orth_complement();
    Ok(ann
        .basis_rows()
        .iter()
        .map(|m| paired_tail(&series, &base, m).valuation(None))
        .collect())
}

/// Does the branch approach the flat, meaning every defining functional
/// of the flat pairs with the branch at positive valuation?
pub fn within_mu_of(fam: &BranchFamily, flat: &Flat, mode: Mode) -> Result<bool, FlatError> {
    let zero = BigRational::from_integer(0.into());
    Ok(approach_residuals(fam, flat, mode)?
        .iter()
        .all(|v| v.exceeds(&zero)))
}

/// Splitting a flat along a chosen direction subspace.
pub struct FlatDecomposition {
    /// Branch with the chosen directions projected out, in real-picture
    /// interleaved coordinates.
    pub projected: Vec<PuiseuxScalar>,
    /// Flat of the projected branch.
    pub part: AsymptoticFlat,
    /// Chosen subspace plus the part's directions; equals the original
    /// flat exactly.
    pub reassembled: Flat,
}

/// Split the branch's flat as h ⊕ (flat of the projection along h). The
/// projection lands in the orthogonal complement of h, and the direct
/// sum recovers the original flat exactly.
pub fn flat_decompose(
    fam: &BranchFamily,
    h: &Subspace,
    mode: Mode,
) -> Result<FlatDecomposition, FlatError> {
    let field = fam.components()[0].field().clone();
    let real = Realifier::new(&field, mode)?;
    let rf = real.real_field().clone();
    let series = real.branch(fam)?;
    let whole = flat_from_series(mode, &rf, &series)?;
    if !whole.flat.dir.contains(h) {
        return Err(FlatError::DirectionNotInFlat);
    }
    let p = h.orth_complement().projection_matrix();
    let projected: Vec<PuiseuxScalar> = (0..series.len())
        .map(|i| {
            let mut acc = PuiseuxScalar::zero(&rf, 0);
            for (j, s) in series.iter().enumerate() {
                let c = p.at(i, j);
                if !c.is_zero() {
                    acc = acc.add(&s.mul_elem(c));
                }
            }
            acc
        })
        .collect();
    let part = flat_from_series(mode, &rf, &projected)?;
    let dir = h.sum(&part.flat.dir)?;
    let reassembled = Flat::new(part.flat.base.clone(), dir)?;
    assert!(
        reassembled.equals(&whole.flat),
        "direct sum must recover the flat"
    );
    Ok(FlatDecomposition {
        projected,
        part,
        reassembled,
    })
}

/// True when every component certifiably stays bounded as z -> 0.
pub fn is_bounded(fam: &BranchFamily) -> bool {
    let cs = if fam.is_parametric() {
        Some(fam.constraints())
    } else {
        None
    };
    fam.components().iter().all(|c| match c.valuation(cs) {
        Valuation::Exact(v) => !v.is_negative(),
        Valuation::Above(b) => !b.is_negative(),
        Valuation::Infinite => true,
    })
}

/// Component of p orthogonal to the subspace; p minus the result lies in
/// the subspace exactly.
pub fn translate_part(p: &[Elem], dir: &Subspace) -> Result<Vec<Elem>, LinError> {
    let proj = dir.projection_matrix().mul_vec(p);
    let c = vec_sub(p, &proj);
    debug_assert!(dir.contains_vec(&proj));
    debug_assert!(dir.basis_rows().iter().all(|r| dot(r, &c).is_zero()));
    Ok(c)
}

/// Outcome of the direction membership test: a witness point on the
/// variety infinitesimally close to branch + v, a certified obstruction
/// at one exponent, or no decision.
#[derive(Clone, Debug)]
pub enum StabVerdict {
    Member { witness: Vec<PuiseuxScalar> },
    NotMember { row: usize, exponent: BigRational },
    Unknown,
}

fn val_at_least(v: &Valuation, rho: &BigRational) -> bool {
    match v {
        Valuation::Exact(e) => e >= rho,
        Valuation::Above(b) => b >= rho,
        Valuation::Infinite => true,
    }
}

/// Every mixed partial of f, evaluated along beta, has valuation at
/// least rho. Derivatives are walked with nondecreasing variable index;
/// the zero polynomial prunes the subtree.
fn partials_certify(f: &Poly, beta: &[PuiseuxScalar], rho: &BigRational, from: usize) -> bool {
    for i in from..beta.len() {
        let d = f.partial(i);
        if d.is_zero() {
            continue;
        }
        let val = eval_poly_at_series(&d, beta).valuation(None);
        if !val_at_least(&val, rho) {
            return false;
        }
        if !partials_certify(&d, beta, rho, i) {
            return false;
        }
    }
    true
}

/// Decide whether the branch shifted by v still hugs the variety: search
/// for an infinitesimal correction delta with F(branch + v + delta) = 0
/// through the stated order. Linear in each step: the lowest surviving
/// residual layer is cancelled against the Jacobian along the shifted
/// branch. A layer none of whose Jacobian terms can reach, while all
/// higher derivatives sit at or above it, is a proof of non-membership.
pub fn mu_stab_member(
    system: &[Poly],
    fam: &BranchFamily,
    v: &[Elem],
    order: &BigRational,
) -> Result<StabVerdict, FlatError> {
    if fam.is_parametric() {
        return Err(FlatError::Parametric);
    }
    let n = fam.ambient_dim();
    assert_eq!(v.len(), n, "direction dimension");
    let field = fam.components()[0].field().clone();
    let sys: Vec<Poly> = system
        .iter()
        .map(|f| {
            if f.field() == &field {
                Ok(f.clone())
            } else {
                f.promote(&field)
            }
        })
        .collect::<Result<_, _>>()?;
    let vv: Vec<Elem> = v
        .iter()
        .map(|e| {
            if e.field() == &field {
                Ok(e.clone())
            } else {
                e.promote(&field)
            }
        })
        .collect::<Result<_, _>>()?;

    let mut beta: Vec<PuiseuxScalar> = fam
        .components()
        .iter()
        .zip(&vv)
        .map(|(c, e)| c.add(&PuiseuxScalar::constant_elem(&field, 0, e.clone())))
        .collect();

    let mut prev_rho: Option<BigRational> = None;
    for _ in 0..256 {
        let residuals: Vec<PuiseuxScalar> =
            sys.iter().map(|f| eval_poly_at_series(f, &beta)).collect();
        let vals: Vec<Valuation> = residuals.iter().map(|r| r.valuation(None)).collect();
        if vals.iter().all(|v| v.exceeds(order)) {
            return Ok(StabVerdict::Member { witness: beta });
        }
        let rho = match vals
            .iter()
            .filter_map(|v| match v {
                Valuation::Exact(e) => Some(e.clone()),
                _ => None,
            })
            .min()
        {
            Some(r) => r,
            // only truncation noise is left and it stops short of order
            None => return Ok(StabVerdict::Unknown),
        };
        if let Some(p) = &prev_rho {
            if &rho <= p {
                return Ok(StabVerdict::Unknown);
            }
        }
        let active: Vec<usize> = (0..sys.len())
            .filter(|&j| vals[j] == Valuation::Exact(rho.clone()))
            .collect();

        for &j in &active {
            if partials_certify(&sys[j], &beta, &rho, 0) {
                return Ok(StabVerdict::NotMember {
                    row: j,
                    exponent: rho,
                });
            }
        }

        // Jacobian rows for the active layer
        let jac: Vec<Vec<PuiseuxScalar>> = active
            .iter()
            .map(|&j| {
                (0..n)
                    .map(|i| eval_poly_at_series(&sys[j].partial(i), &beta))
                    .collect()
            })
            .collect();
        let mut columns: Vec<(usize, BigRational)> = Vec::new();
        for row in &jac {
            for (i, entry) in row.iter().enumerate() {
                for (q, _) in entry.terms() {
                    if q < &rho {
                        let s = &rho - q;
                        if !columns.contains(&(i, s.clone())) {
                            columns.push((i, s));
                        }
                    }
                }
            }
        }
        if columns.is_empty() {
            return Ok(StabVerdict::Unknown);
        }
        let mut rows: Vec<Vec<Elem>> = Vec::with_capacity(active.len());
        let mut rhs: Vec<Elem> = Vec::with_capacity(active.len());
        for (a, &j) in active.iter().enumerate() {
            let row: Vec<Elem> = columns
                .iter()
                .map(|(i, s)| {
                    jac[a][*i]
                        .coeff_at(&(&rho - s))
                        .constant_value()
                        .expect("parameter-free Jacobian")
                })
                .collect();
            rows.push(row);
            rhs.push(
                residuals[j]
                    .coeff_at(&rho)
                    .constant_value()
                    .expect("parameter-free residual")
                    .neg(),
            );
        }
        let m = crate::linalg::Matrix::from_rows(&field, rows);
        let delta = match m.solve(&rhs) {
            Some(d) => d,
            None => return Ok(StabVerdict::Unknown),
        };
        for ((i, s), d) in columns.iter().zip(&delta) {
            if d.is_zero() {
                continue;
            }
            beta[*i] = beta[*i].add(&PuiseuxScalar::monomial(
                &field,
                0,
                s.clone(),
                Poly::constant(&field, 0, d.clone()),
            ));
        }
        prev_rho = Some(rho);
    }
    Ok(StabVerdict::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn q() -> Field {
        Field::rationals()
    }

    fn series_exact(field: &Field, terms: Vec<(BigRational, BigRational)>) -> PuiseuxScalar {
        PuiseuxScalar::from_terms(
            field,
            0,
            terms
                .into_iter()
                .map(|(q, c)| (q, Poly::constant(field, 0, field.from_rational(c))))
                .collect(),
            None,
        )
    }

    fn hyperbola_branch() -> BranchFamily {
        let f = q();
        let x = series_exact(&f, vec![(int(-1), int(1))]);
        let y = series_exact(&f, vec![(int(1), int(1))]);
        BranchFamily::without_params(vec![x, y]).unwrap()
    }

    #[test]
    fn hyperbola_flat_is_complex_axis() {
        let fam = hyperbola_branch();
        let af = flat_of_branch(&fam, Mode::Complex).unwrap();
        assert_eq!(af.flat.ambient(), 4);
        assert_eq!(af.flat.dim(), 2);
        // C x {0}: real coordinates (re x, im x, re y, im y)
        let f = af.flat.dir.field().clone();
        let e = |k: usize| {
            let mut v = vec![f.zero(); 4];
            v[k] = f.one();
            v
        };
        assert!(af.flat.dir.contains_vec(&e(0)));
        assert!(af.flat.dir.contains_vec(&e(1)));
        assert!(!af.flat.dir.contains_vec(&e(2)));
        assert!(af.flat.contains_point(&vec![
            f.from_rational(int(7)),
            f.from_rational(int(-3)),
            f.zero(),
            f.zero()
        ]));
        assert_eq!(af.witnesses.len(), 1);
        assert_eq!(af.witnesses[0].observed, int(-1));
    }

    #[test]
    fn parabola_flat_fills_space() {
        let f = q();
        let x = series_exact(&f, vec![(int(-1), int(1))]);
        let y = series_exact(&f, vec![(int(-2), int(1))]);
        let fam = BranchFamily::without_params(vec![x, y]).unwrap();
        let af = flat_of_branch(&fam, Mode::Complex).unwrap();
        assert_eq!(af.flat.dim(), 4);
        assert_eq!(af.witnesses.len(), 2);
        let mut seen: Vec<BigRational> =
            af.witnesses.iter().map(|w| w.observed.clone()).collect();
        seen.sort();
        assert_eq!(seen, vec![int(-2), int(-1)]);
    }

    #[test]
    fn real_mode_keeps_dimension_low() {
        let fam = hyperbola_branch();
        let af = flat_of_branch(&fam, Mode::Real).unwrap();
        assert_eq!(af.flat.ambient(), 2);
        assert_eq!(af.flat.dim(), 1);
        for v in approach_residuals(&fam, &af.flat, Mode::Real).unwrap() {
            assert!(v.exceeds(&int(0)), "residual {:?}", v);
        }
    }

    #[test]
    fn witnesses_pair_to_observed_valuations() {
        // different leading exponents in the two coordinates, shared base
        let f = q();
        let x = series_exact(&f, vec![(int(-3), int(2)), (int(0), int(5)), (int(2), int(1))]);
        let y = series_exact(
            &f,
            vec![(int(-3), int(1)), (int(-1), int(4)), (int(0), int(-2))],
        );
        let fam = BranchFamily::without_params(vec![x, y]).unwrap();
        let af = flat_of_branch(&fam, Mode::Complex).unwrap();
        assert_eq!(af.flat.dim(), 4);
        let series = Realifier::new(&q(), Mode::Complex)
            .unwrap()
            .branch(&fam)
            .unwrap();
        for w in &af.witnesses {
            assert!(w.observed.is_negative());
            let val = paired_tail(&series, &af.flat.base, &w.functional).valuation(None);
            assert_eq!(val, Valuation::Exact(w.observed.clone()));
        }
        for v in approach_residuals(&fam, &af.flat, Mode::Complex).unwrap() {
            assert!(v.exceeds(&int(0)));
        }
    }

    #[test]
    fn gaussian_coefficients_span_complex_line() {
        // single coordinate i/z: directions must be all of C
        let g = Field::gaussian();
        let i = g.gen();
        let s = PuiseuxScalar::from_terms(
            &g,
            0,
            vec![(int(-1), Poly::constant(&g, 0, i))],
            None,
        );
        let fam = BranchFamily::without_params(vec![s]).unwrap();
        let af = flat_of_branch(&fam, Mode::Complex).unwrap();
        assert_eq!(af.flat.ambient(), 2);
        assert_eq!(af.flat.dim(), 2);
        assert!(af.flat.dir.field().is_rationals());
    }

    #[test]
    fn truncated_sqrt2_branch_flat() {
        // x = 1/z, y = theta/z + theta z/4 + unknown tail
        let k = Field::sqrt2();
        let th = k.gen();
        let x = PuiseuxScalar::from_terms(
            &k,
            0,
            vec![(int(-1), Poly::one(&k, 0))],
            None,
        );
        let y = PuiseuxScalar::from_terms(
            &k,
            0,
            vec![
                (int(-1), Poly::constant(&k, 0, th.clone())),
                (int(1), Poly::constant(&k, 0, th.mul_rat(&rat(1, 4)))),
            ],
            Some(int(5)),
        );
        let fam = BranchFamily::without_params(vec![x, y]).unwrap();
        let af = flat_of_branch(&fam, Mode::Complex).unwrap();
        // complex line {(w, theta w)}
        assert_eq!(af.flat.dim(), 2);
        let f = af.flat.dir.field().clone();
        assert_eq!(f.degree(), 2);
        let w = vec![f.one(), f.zero(), f.gen(), f.zero()];
        assert!(af.flat.dir.contains_vec(&w));
        for v in approach_residuals(&fam, &af.flat, Mode::Complex).unwrap() {
            assert!(v.exceeds(&int(0)), "residual {:?}", v);
        }
    }

    #[test]
    fn boundedness_detection() {
        let f = q();
        let bounded = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(0), int(3)), (rat(1, 2), int(1))]),
            series_exact(&f, vec![(int(2), int(1))]),
        ])
        .unwrap();
        assert!(is_bounded(&bounded));
        assert!(!is_bounded(&hyperbola_branch()));
        let af = flat_of_branch(&bounded, Mode::Complex).unwrap();
        assert_eq!(af.flat.dim(), 0);
        assert!(af.witnesses.is_empty());
    }

    #[test]
    fn translate_part_splits_orthogonally() {
        let f = q();
        let dir = Subspace::span(
            Mode::Real,
            2,
            &f,
            vec![vec![f.one(), f.one()]],
        )
        .unwrap();
        let p = vec![f.from_rational(int(1)), f.from_rational(int(2))];
        let c = translate_part(&p, &dir).unwrap();
        assert_eq!(c[0].to_rational().unwrap(), rat(-1, 2));
        assert_eq!(c[1].to_rational().unwrap(), rat(1, 2));
    }

    fn parabola_setup() -> (Vec<Poly>, BranchFamily) {
        let f = q();
        let x = Poly::var(&f, 2, 0);
        let y = Poly::var(&f, 2, 1);
        let sys = vec![y.sub(&x.pow(2))];
        let fam = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1))]),
            series_exact(&f, vec![(int(-2), int(1))]),
        ])
        .unwrap();
        (sys, fam)
    }

    #[test]
    fn parabola_vertical_shift_is_member() {
        let (sys, fam) = parabola_setup();
        let f = q();
        let v = vec![f.zero(), f.one()];
        match mu_stab_member(&sys, &fam, &v, &int(6)).unwrap() {
            StabVerdict::Member { witness } => {
                // x picks up z/2 - z^3/8 + ...
                let x = &witness[0];
                assert_eq!(
                    x.coeff_at(&int(1)).constant_value().unwrap().to_rational().unwrap(),
                    rat(1, 2)
                );
                assert_eq!(
                    x.coeff_at(&int(3)).constant_value().unwrap().to_rational().unwrap(),
                    rat(-1, 8)
                );
                let resid = eval_poly_at_series(&sys[0], &witness);
                assert!(resid.valuation(None).exceeds(&int(6)));
            }
            other => panic!("expected membership, got {:?}", other),
        }
    }

    #[test]
    fn parabola_horizontal_shift_is_obstructed() {
        let (sys, fam) = parabola_setup();
        let f = q();
        let v = vec![f.one(), f.zero()];
        match mu_stab_member(&sys, &fam, &v, &int(6)).unwrap() {
            StabVerdict::NotMember { row, exponent } => {
                assert_eq!(row, 0);
                assert_eq!(exponent, int(-1));
            }
            other => panic!("expected obstruction, got {:?}", other),
        }
    }

    #[test]
    fn decompose_parabola_along_first_axis() {
        let f = q();
        let fam = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1))]),
            series_exact(&f, vec![(int(-2), int(1))]),
        ])
        .unwrap();
        let h = Subspace::complex_closure(4, &f, vec![vec![
            f.one(),
            f.zero(),
            f.zero(),
            f.zero(),
        ]])
        .unwrap();
        let d = flat_decompose(&fam, &h, Mode::Complex).unwrap();
        // projection kills the x coordinate, leaving (0, 0, z^-2, 0)
        assert!(d.projected[0].is_exactly_zero());
        assert!(d.projected[1].is_exactly_zero());
        assert_eq!(d.projected[2].valuation(None), Valuation::Exact(int(-2)));
        assert_eq!(d.part.flat.dim(), 2);
        assert_eq!(d.reassembled.dim(), 4);

        // trivial split: h = 0 leaves the branch alone
        let zero_h = Subspace::zero(Mode::Complex, 4, &f);
        let d0 = flat_decompose(&fam, &zero_h, Mode::Complex).unwrap();
        assert_eq!(d0.part.flat.dim(), 4);

        // a direction outside the flat is rejected
        let hyper = hyperbola_branch();
        let bad = Subspace::complex_closure(4, &f, vec![vec![
            f.zero(),
            f.zero(),
            f.one(),
            f.zero(),
        ]])
        .unwrap();
        assert!(matches!(
            flat_decompose(&hyper, &bad, Mode::Complex),
            Err(FlatError::DirectionNotInFlat)
        ));
    }

    #[test]
    fn approach_is_stable_under_intersection() {
        // (1/z, z, z) hugs e1+e2 and e1+e3; it must hug their meet e1
        let f = q();
        let fam = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1))]),
            series_exact(&f, vec![(int(1), int(1))]),
            series_exact(&f, vec![(int(1), int(2))]),
        ])
        .unwrap();
        let e = |k: usize| {
            let mut v = vec![f.zero(); 6];
            v[k] = f.one();
            v
        };
        let base = vec![f.zero(); 6];
        let a1 = Flat::new(
            base.clone(),
            Subspace::complex_closure(6, &f, vec![e(0), e(2)]).unwrap(),
        )
        .unwrap();
        let a2 = Flat::new(
            base,
            Subspace::complex_closure(6, &f, vec![e(0), e(4)]).unwrap(),
        )
        .unwrap();
        assert!(within_mu_of(&fam, &a1, Mode::Complex).unwrap());
        assert!(within_mu_of(&fam, &a2, Mode::Complex).unwrap());
        match a1.intersect(&a2).unwrap() {
            crate::linalg::FlatMeet::Flat(meet) => {
                assert_eq!(meet.dim(), 2);
                assert!(within_mu_of(&fam, &meet, Mode::Complex).unwrap());
            }
            crate::linalg::FlatMeet::Empty => panic!("flats share the origin"),
        }
    }

    #[test]
    fn translation_moves_the_flat_with_the_branch() {
        let f = q();
        let fam = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1)), (int(0), int(1))]),
            series_exact(&f, vec![(int(-2), int(1)), (int(0), int(2))]),
            series_exact(&f, vec![(int(0), int(5)), (int(1), int(1))]),
        ])
        .unwrap();
        let c = [int(3), int(-1), int(7)];
        let shifted = BranchFamily::without_params(
            fam.components()
                .iter()
                .zip(&c)
                .map(|(s, k)| {
                    s.add(&PuiseuxScalar::constant_elem(
                        &f,
                        0,
                        f.from_rational(k.clone()),
                    ))
                })
                .collect(),
        )
        .unwrap();
        let af = flat_of_branch(&fam, Mode::Complex).unwrap();
        let af_shifted = flat_of_branch(&shifted, Mode::Complex).unwrap();
        // realified translation vector interleaves (re, im) = (k, 0)
        let mut rc = Vec::new();
        for k in &c {
            rc.push(f.from_rational(k.clone()));
            rc.push(f.zero());
        }
        assert!(af_shifted.flat.equals(&af.flat.translate(&rc)));
    }

    #[test]
    fn members_translate_the_flat_onto_itself() {
        let f = q();
        let (sys, fam) = parabola_setup();
        let v = vec![f.zero(), f.one()];
        assert!(matches!(
            mu_stab_member(&sys, &fam, &v, &int(6)).unwrap(),
            StabVerdict::Member { .. }
        ));
        let af = flat_of_branch(&fam, Mode::Complex).unwrap();
        let rv = vec![f.zero(), f.zero(), f.one(), f.zero()];
        assert!(af.flat.translate(&rv).equals(&af.flat));
    }

    #[test]
    fn hyperbola_axis_direction_is_member() {
        // x y = 1 along (1/z, z): shifting x by 1 stays attracted
        let f = q();
        let x = Poly::var(&f, 2, 0);
        let y = Poly::var(&f, 2, 1);
        let sys = vec![x.mul(&y).sub(&Poly::one(&f, 2))];
        let fam = hyperbola_branch();
        let v = vec![f.one(), f.zero()];
        match mu_stab_member(&sys, &fam, &v, &int(8)).unwrap() {
            StabVerdict::Member { witness } => {
                let resid = eval_poly_at_series(&sys[0], &witness);
                assert!(resid.valuation(None).exceeds(&int(8)));
            }
            other => panic!("expected membership, got {:?}", other),
        }
        // shifting y by 1 forces x y = 1 to drift: x(z + 1) = 1 has
        // solution x -> 0, far from 1/z
        let w = vec![f.zero(), f.one()];
        match mu_stab_member(&sys, &fam, &w, &int(8)).unwrap() {
            StabVerdict::NotMember { row, exponent } => {
                assert_eq!(row, 0);
                assert_eq!(exponent, int(-1));
            }
            other => panic!("expected obstruction, got {:?}", other),
        }
    }
}
