//! Assembling the closure of a projected variety from branch data.
//!
//! Each unbounded branch family contributes one component: the span V of
//! its principal directions (over all parameter values), the translate
//! set C of base points pushed into the orthogonal complement of V, and
//! the lattice saturation of V. The closure of the projection is the
//! projected variety itself together with the projections of the sets
//! C + V^sat, with duplicate components merged and maximal ones marked.
//!
//! Parametric families keep their base points as polynomials in the
//! family parameters, constrained to the parameter locus; their span is
//! read off the coefficient vectors of each parameter monomial and
//! cross-checked by rank stabilization at sampled parameter points.

use crate::asymptotics::{flat_of_branch, translate_part, AsymptoticFlat, FlatError, Realifier};
use crate::lattice::{integral_span_basis, saturate, saturation_contains, Lattice};
use crate::linalg::{dot, LinError, Matrix, Mode, Subspace};
use crate::numberfield::{Elem, Field, NfError};
use crate::poly::{ConstraintSystem, Poly};
use crate::puiseux::{BranchFamily, Valuation};
use crate::rat;
use crate::rng::Sampler;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_rational::BigRational;
use num_traits::Signed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureError {
    /// At least one family is needed to fix mode and ambient dimension.
    NoFamilies,
    /// Families must share the scalar mode.
    ModeMismatch,
    /// Families and lattice must share the ambient dimension.
    AmbientMismatch,
    /// Two distinct nonrational coefficient fields cannot be merged.
    FieldMixture,
    /// A component's valuation cannot be certified from stored terms.
    UncertifiedValuation,
    /// A parametric base point with a component inside the span cannot
    /// be split off exactly; only bases orthogonal to the span are kept.
    UnsplittableBase,
    /// The prescribed span does not contain the family's directions.
    SpanNotContained,
    Flat(FlatError),
    Lin(LinError),
    Nf(NfError),
}

impl fmt::Display for ClosureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureError::NoFamilies => write!(f, "no branch families given"),
            ClosureError::ModeMismatch => write!(f, "families use different scalar modes"),
            ClosureError::AmbientMismatch => write!(f, "ambient dimensions differ"),
            ClosureError::FieldMixture => {
                write!(f, "cannot merge distinct nonrational coefficient fields")
            }
            ClosureError::UncertifiedValuation => {
                write!(f, "a coordinate valuation cannot be certified")
            }
            ClosureError::UnsplittableBase => {
                write!(f, "parametric base point is not orthogonal to the span")
            }
            ClosureError::SpanNotContained => {
                write!(f, "family directions are not inside the given span")
            }
            ClosureError::Flat(e) => write!(f, "{}", e),
            ClosureError::Lin(e) => write!(f, "{}", e),
            ClosureError::Nf(e) => write!(f, "{}", e),
        }
    }
}

impl From<FlatError> for ClosureError {
    fn from(e: FlatError) -> Self {
        ClosureError::Flat(e)
    }
}

impl From<LinError> for ClosureError {
    fn from(e: LinError) -> Self {
        ClosureError::Lin(e)
    }
}

impl From<NfError> for ClosureError {
    fn from(e: NfError) -> Self {
        ClosureError::Nf(e)
    }
}

/// Base points of one family. A parameter-free family carries a single
/// real-picture point; a parametric one keeps complex-coordinate
/// polynomials in the parameters, restricted to the constraint locus.
#[derive(Clone, Debug)]
pub enum BaseSet {
    Point(Vec<Elem>),
    Parametric {
        polys: Vec<Poly>,
        constraints: ConstraintSystem,
    },
}

impl BaseSet {
    pub fn is_finite(&self) -> bool {
        matches!(self, BaseSet::Point(_))
    }

    fn equals(&self, other: &BaseSet) -> bool {
        match (self, other) {
            (BaseSet::Point(a), BaseSet::Point(b)) => a == b,
            (
                BaseSet::Parametric {
                    polys: pa,
                    constraints: ca,
                },
                BaseSet::Parametric {
                    polys: pb,
                    constraints: cb,
                },
            ) => {
                pa == pb
                    && ca.nvars() == cb.nvars()
                    && ca.constraints() == cb.constraints()
            }
            _ => false,
        }
    }
}

/// One branch family reduced to its closure data: the span of every
/// member's principal directions and the set of member base points.
#[derive(Clone, Debug)]
pub struct FlatFamily {
    mode: Mode,
    span: Subspace,
    member_dim: usize,
    span_certified: bool,
    base: BaseSet,
}

impl FlatFamily {
    /// Singleton family around one parameter-free flat.
    pub fn from_flat(af: &AsymptoticFlat) -> FlatFamily {
        FlatFamily {
            mode: af.flat.dir.mode(),
            span: af.flat.dir.clone(),
            member_dim: af.flat.dim(),
            span_certified: true,
            base: BaseSet::Point(af.flat.base.clone()),
        }
    }

    /// Closure data of a branch family. Parameter-free input reduces to
    /// the exact flat. Parametric input spans the coefficient vectors of
    /// every parameter monomial at every principal exponent; sampling the
    /// parameter locus must reproduce that span for it to be certified.
    pub fn from_branches(
        fam: &BranchFamily,
        mode: Mode,
        sampler: &mut Sampler,
    ) -> Result<FlatFamily, ClosureError> {
        if !fam.is_parametric() {
            return Ok(FlatFamily::from_flat(&flat_of_branch(fam, mode)?));
        }
        let field = fam.field().clone();
        let real = Realifier::new(&field, mode)?;
        let rf = real.real_field().clone();
        let width = real.width();
        let n = fam.ambient_dim();
        let ambient = n * width;
        let cons = fam.constraints();

        // certified principal exponents, skipping coefficients that die
        // on the parameter locus
        let mut principal: Vec<BigRational> = Vec::new();
        for c in fam.components() {
            match c.valuation(Some(cons)) {
                Valuation::Exact(_) | Valuation::Infinite => {}
                Valuation::Above(b) => {
                    if b.is_negative() {
                        return Err(ClosureError::UncertifiedValuation);
                    }
                }
            }
            for (q, p) in c.terms() {
                if q.is_negative() && !cons.is_zero_mod(p) && !principal.contains(q) {
                    principal.push(q.clone());
                }
            }
        }
        principal.sort();

        let mut span = Subspace::zero(mode, ambient, &rf);
        for q in &principal {
            // coefficient vectors per parameter monomial
            let coeffs: Vec<Poly> = fam.components().iter().map(|c| c.coeff_at(q)).collect();
            let mut monomials: Vec<Vec<u32>> = Vec::new();
            for p in &coeffs {
                if cons.is_zero_mod(p) {
                    continue;
                }
                for (m, _) in p.terms() {
                    if !monomials.contains(m) {
                        monomials.push(m.clone());
                    }
                }
            }
            for m in &monomials {
                let v: Vec<Elem> = coeffs
                    .iter()
                    .map(|p| {
                        p.terms()
                            .find(|(k, _)| k == &m)
                            .map(|(_, c)| c.clone())
                            .unwrap_or_else(|| field.zero())
                    })
                    .collect();
                let rv = real.vec(&v);
                span = span.sum(&span_of(mode, ambient, &rf, &rv)?)?;
            }
        }

        // rank stabilization: sampled members must reproduce the span
        let mut sampled = Subspace::zero(mode, ambient, &rf);
        let mut member_dim = 0;
        for _ in 0..20 {
            let point = cons.sample(sampler);
            let mut member = Subspace::zero(mode, ambient, &rf);
            for q in &principal {
                let v: Vec<Elem> = fam
                    .components()
                    .iter()
                    .map(|c| {
                        c.coeff_at(q)
                            .eval(&point)
                    })
                    .collect();
                let rv = real.vec(&v);
                member = member.sum(&span_of(mode, ambient, &rf, &rv)?)?;
            }
            member_dim = member_dim.max(member.dim());
            sampled = sampled.sum(&member)?;
            if sampled.equals(&span) {
                break;
            }
        }
        let span_certified = sampled.equals(&span);
        debug_assert!(span.contains(&sampled));

        let base_polys: Vec<Poly> = fam
            .components()
            .iter()
            .map(|c| c.coeff_at(&BigRational::from_integer(0.into())))
            .collect();

        Ok(FlatFamily {
            mode,
            span,
            member_dim,
            span_certified,
            base: BaseSet::Parametric {
                polys: base_polys,
                constraints: cons.clone(),
            },
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Span of every member's principal directions.
    pub fn span(&self) -> &Subspace {
        &self.span
    }

    /// Direction dimension of a generic single member.
    pub fn member_dim(&self) -> usize {
        self.member_dim
    }

    pub fn span_certified(&self) -> bool {
        self.span_certified
    }

    pub fn base(&self) -> &BaseSet {
        &self.base
    }
}

fn span_of(
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

/// Base points of the family pushed into the orthogonal complement of
/// the span: the representatives the component is translated by.
/// Parameter-free bases are projected exactly; parametric bases must
/// already be orthogonal monomial by monomial, anything else is refused
/// rather than approximated.
pub fn translate_set(fam: &FlatFamily, v: &Subspace) -> Result<BaseSet, ClosureError> {
    if !v.contains(&fam.span) {
        return Err(ClosureError::SpanNotContained);
    }
    match &fam.base {
        BaseSet::Point(b) => Ok(BaseSet::Point(translate_part(b, v)?)),
        BaseSet::Parametric { polys, .. } => {
            let field = polys[0].field().clone();
            let real = Realifier::new(&field, fam.mode)?;
            let basis = v.basis_rows();
            let mut monomials: Vec<Vec<u32>> = Vec::new();
            for p in polys {
                for (m, _) in p.terms() {
                    if !monomials.contains(m) {
                        monomials.push(m.clone());
                    }
                }
            }
            for m in &monomials {
                let w: Vec<Elem> = polys
                    .iter()
                    .map(|p| {
                        p.terms()
                            .find(|(k, _)| k == &m)
                            .map(|(_, c)| c.clone())
                            .unwrap_or_else(|| field.zero())
                    })
                    .collect();
                let rw = real.vec(&w);
                if basis.iter().any(|r| !dot(r, &rw).is_zero()) {
                    return Err(ClosureError::UnsplittableBase);
                }
            }
            Ok(fam.base.clone())
        }
    }
}

/// One component of the closure: translates C, direction span V, and the
/// smallest lattice-rational span containing V.
#[derive(Clone, Debug)]
pub struct ClosureComponent {
    pub translates: BaseSet,
    pub dir: Subspace,
    pub dir_saturated: Subspace,
    pub maximal: bool,
    pub span_certified: bool,
}

#[derive(Clone, Debug)]
pub struct ClosureDescription {
    pub mode: Mode,
    pub ambient: usize,
    pub components: Vec<ClosureComponent>,
    pub lattice: Lattice,
}

/// Merge the families into the closure description: bounded families
/// drop out (their members sit inside the projected variety), duplicate
/// (V, C) pairs collapse, and components whose span is not strictly
/// contained in another's are marked maximal.
pub fn assemble_closure(
    families: &[FlatFamily],
    lattice: &Lattice,
) -> Result<ClosureDescription, ClosureError> {
    let first = families.first().ok_or(ClosureError::NoFamilies)?;
    let mode = first.mode;
    let ambient = first.span.ambient();
    if ambient != lattice.dim() {
        return Err(ClosureError::AmbientMismatch);
    }
    for fam in families {
        if fam.mode != mode {
            return Err(ClosureError::ModeMismatch);
        }
        if fam.span.ambient() != ambient {
            return Err(ClosureError::AmbientMismatch);
        }
    }
    // one real scalar field for every span
    let mut rf = Field::rationals();
    for fam in families {
        let f = fam.span.field();
        if !f.is_rationals() {
            if !rf.is_rationals() && &rf != f {
                return Err(ClosureError::FieldMixture);
            }
            rf = f.clone();
        }
    }

    let mut components: Vec<ClosureComponent> = Vec::new();
    for fam in families {
        if fam.span.dim() == 0 {
            continue;
        }
        let span = if fam.span.field() == &rf {
            fam.span.clone()
        } else {
            fam.span.promote(&rf)?
        };
        let base = match &fam.base {
            BaseSet::Point(b) if b.first().map(|e| e.field()) != Some(&rf) => BaseSet::Point(
                b.iter()
                    .map(|e| e.promote(&rf))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            other => other.clone(),
        };
        let promoted = FlatFamily {
            mode,
            span: span.clone(),
            member_dim: fam.member_dim,
            span_certified: fam.span_certified,
            base,
        };
        let translates = translate_set(&promoted, &span)?;
        let dir_saturated = saturate(&span, lattice)?;
        debug_assert!(saturation_contains(&span, &dir_saturated)?);
        if components
            .iter()
            .any(|c| c.dir.equals(&span) && c.translates.equals(&translates))
        {
            continue;
        }
        components.push(ClosureComponent {
            translates,
            dir: span,
            dir_saturated,
            maximal: false,
            span_certified: fam.span_certified,
        });
    }

    let flags: Vec<bool> = (0..components.len())
        .map(|i| {
            !components.iter().enumerate().any(|(j, c)| {
                j != i && c.dir.contains(&components[i].dir) && !c.dir.equals(&components[i].dir)
            })
        })
        .collect();
    for (c, m) in components.iter_mut().zip(flags) {
        c.maximal = m;
    }

    Ok(ClosureDescription {
        mode,
        ambient,
        components,
        lattice: lattice.clone(),
    })
}

/// Dimension facts checked against the source variety's dimension.
#[derive(Clone, Debug)]
pub struct ComponentCheck {
    /// Dimension of the translate set (generic rank of its
    /// parametrization over the constraint locus).
    pub translate_dim: usize,
    /// Translate set is lower-dimensional than the variety.
    pub translate_small: bool,
    /// Maximal components must carry finitely many translates.
    pub finite_on_maximal: bool,
}

#[derive(Clone, Debug)]
pub struct ClauseReport {
    pub components: Vec<ComponentCheck>,
    pub all_pass: bool,
}

/// Check each component's translate set against dim X: the translates
/// must form a set of strictly smaller dimension, and a maximal
/// component must have a finite translate set.
pub fn clause_checks(
    desc: &ClosureDescription,
    dim_x: usize,
    sampler: &mut Sampler,
) -> ClauseReport {
    let mut out = Vec::with_capacity(desc.components.len());
    for comp in &desc.components {
        let translate_dim = match &comp.translates {
            BaseSet::Point(_) => 0,
            BaseSet::Parametric { polys, constraints } => {
                parametrization_rank(polys, constraints, sampler)
            }
        };
        out.push(ComponentCheck {
            translate_dim,
            translate_small: translate_dim < dim_x,
            finite_on_maximal: !comp.maximal || comp.translates.is_finite(),
        });
    }
    let all_pass = out
        .iter()
        .all(|c| c.translate_small && c.finite_on_maximal);
    ClauseReport {
        components: out,
        all_pass,
    }
}

/// Generic rank of the parametrization over the constraint locus: the
/// chain rule is pushed through the triangular constraints at sampled
/// rational points and the largest observed Jacobian rank wins.
fn parametrization_rank(
    polys: &[Poly],
    cons: &ConstraintSystem,
    sampler: &mut Sampler,
) -> usize {
    let field = cons.field().clone();
    let k = cons.nvars();
    let free = cons.free_vars();
    let nfree = free.len();
    if nfree == 0 {
        return 0;
    }
    let cap = nfree.min(polys.len());
    let mut best = 0;
    let mut samples = 0;
    for _ in 0..200 {
        if samples == 20 || best == cap {
            break;
        }
        let point = cons.sample(sampler);
        // tangent rows dt[v] of each parameter against the free ones
        let mut dt: Vec<Option<Vec<Elem>>> = vec![None; k];
        for (slot, &v) in free.iter().enumerate() {
            let mut row = vec![field.zero(); nfree];
            row[slot] = field.one();
            dt[v] = Some(row);
        }
        let mut degenerate = false;
        for (j, c) in cons.constraints().iter().enumerate() {
            let b = cons.bound_vars()[j];
            let a = c.partial(b).eval(&point);
            if a.is_zero() {
                degenerate = true;
                break;
            }
            let mut row = vec![field.zero(); nfree];
            for i in 0..k {
                if i == b {
                    continue;
                }
                let d = c.partial(i);
                if d.is_zero() {
                    continue;
                }
                let coeff = d.eval(&point);
                if coeff.is_zero() {
                    continue;
                }
                let ri = dt[i].as_ref().expect("triangular constraint order");
                for s in 0..nfree {
                    row[s] = row[s].sub(&coeff.mul(&ri[s]));
                }
            }
            let ainv = a.inv().expect("nonzero pivot");
            for entry in row.iter_mut() {
                *entry = entry.mul(&ainv);
            }
            dt[b] = Some(row);
        }
        if degenerate {
            continue;
        }
        samples += 1;
        let rows: Vec<Vec<Elem>> = polys
            .iter()
            .map(|p| {
                let mut row = vec![field.zero(); nfree];
                for i in 0..k {
                    let d = p.partial(i);
                    if d.is_zero() {
                        continue;
                    }
                    let coeff = d.eval(&point);
                    if coeff.is_zero() {
                        continue;
                    }
                    let ri = dt[i].as_ref().expect("triangular constraint order");
                    for s in 0..nfree {
                        row[s] = row[s].add(&coeff.mul(&ri[s]));
                    }
                }
                row
            })
            .collect();
        best = best.max(Matrix::from_rows(&field, rows).rank());
    }
    best
}

/// One subtorus of the quotient: the image of a saturated span, with an
/// integral direction basis in lattice coordinates. Rational point bases
/// fold exactly; parametric or irrational ones are left unfolded.
#[derive(Clone, Debug)]
pub struct SubtorusInfo {
    pub dim: usize,
    pub lattice_dirs: Vec<Vec<BigRational>>,
    pub folded_translates: Option<Vec<Vec<BigRational>>>,
}

pub fn torus_description(desc: &ClosureDescription) -> Result<Vec<SubtorusInfo>, ClosureError> {
    let mut out = Vec::with_capacity(desc.components.len());
    for comp in &desc.components {
        let mut coord_rows: Vec<Vec<BigRational>> = Vec::new();
        for row in comp.dir_saturated.basis_rows() {
            let w = desc.lattice.to_coords(&row);
            coord_rows.push(
                w.iter()
                    .map(|e| e.to_rational().ok_or(ClosureError::Lin(LinError::NotRational)))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let lattice_dirs: Vec<Vec<BigRational>> = integral_span_basis(&coord_rows)
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let folded_translates = match &comp.translates {
            BaseSet::Point(b) => {
                let rats: Option<Vec<BigRational>> = b.iter().map(|e| e.to_rational()).collect();
                rats.map(|_| {
                    let coords = desc.lattice.to_coords(b);
                    vec![coords
                        .iter()
                        .map(|e| rat::frac(&e.to_rational().expect("rational coordinates")))
                        .collect()]
                })
            }
            BaseSet::Parametric { .. } => None,
        };
        out.push(SubtorusInfo {
            dim: comp.dir_saturated.dim(),
            lattice_dirs,
            folded_translates,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::PuiseuxScalar;
    use crate::rat::int;
    use num_traits::Zero;

    fn q() -> Field {
        Field::rationals()
    }

    fn series_exact(
        field: &Field,
        terms: Vec<(BigRational, BigRational)>,
        trunc: Option<BigRational>,
    ) -> PuiseuxScalar {
        PuiseuxScalar::from_terms(
            field,
            0,
            terms
                .into_iter()
                .map(|(q, c)| (q, Poly::constant(field, 0, field.from_rational(c))))
                .collect(),
            trunc,
        )
    }

    fn unit(f: &Field, n: usize, k: usize) -> Vec<Elem> {
        let mut v = vec![f.zero(); n];
        v[k] = f.one();
        v
    }

    /// The four families of the running surface x(1 - y w) = 1.
    fn golden_families(sampler: &mut Sampler) -> Vec<FlatFamily> {
        let f = q();
        // x bounded: -z^3 - z^6 known through 8
        let f1 = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(3), int(-1)), (int(6), int(-1))], Some(int(8))),
            series_exact(&f, vec![(int(-1), int(1))], None),
            series_exact(&f, vec![(int(-2), int(1))], None),
        ])
        .unwrap();
        let f2 = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-2), int(1))], None),
            series_exact(&f, vec![(int(1), int(1)), (int(3), int(-1))], None),
            series_exact(&f, vec![(int(-1), int(1))], None),
        ])
        .unwrap();
        let f3 = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-2), int(1))], None),
            series_exact(&f, vec![(int(-1), int(1))], None),
            series_exact(&f, vec![(int(1), int(1)), (int(3), int(-1))], None),
        ])
        .unwrap();
        // (t/z, t - z, u) with t u = 1
        let t = Poly::var(&f, 2, 0);
        let u = Poly::var(&f, 2, 1);
        let cons =
            ConstraintSystem::new(&f, 2, vec![t.mul(&u).sub(&Poly::one(&f, 2))]).unwrap();
        let f4 = BranchFamily::new(
            vec![
                PuiseuxScalar::monomial(&f, 2, int(-1), t.clone()),
                PuiseuxScalar::constant(&f, 2, t.clone())
                    .sub(&PuiseuxScalar::monomial(&f, 2, int(1), Poly::one(&f, 2))),
                PuiseuxScalar::constant(&f, 2, u.clone()),
            ],
            cons,
        )
        .unwrap();
        vec![
            FlatFamily::from_branches(&f1, Mode::Complex, sampler).unwrap(),
            FlatFamily::from_branches(&f2, Mode::Complex, sampler).unwrap(),
            FlatFamily::from_branches(&f3, Mode::Complex, sampler).unwrap(),
            FlatFamily::from_branches(&f4, Mode::Complex, sampler).unwrap(),
        ]
    }

    fn complex_plane(f: &Field, n: usize, axes: &[usize]) -> Subspace {
        // complex coordinate k realifies to real coordinates 2k, 2k+1
        Subspace::complex_closure(
            2 * n,
            f,
            axes.iter().map(|&k| unit(f, 2 * n, 2 * k)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn golden_surface_components() {
        let f = q();
        let mut sampler = Sampler::new(7);
        let families = golden_families(&mut sampler);
        let lattice = Lattice::standard(6);
        let desc = assemble_closure(&families, &lattice).unwrap();
        assert_eq!(desc.components.len(), 4);

        let pi1 = complex_plane(&f, 3, &[1, 2]);
        let pi2 = complex_plane(&f, 3, &[0, 2]);
        let pi3 = complex_plane(&f, 3, &[0, 1]);
        let v4 = complex_plane(&f, 3, &[0]);

        for (i, expect) in [&pi1, &pi2, &pi3].iter().enumerate() {
            let c = &desc.components[i];
            assert!(c.dir.equals(expect), "component {} span", i);
            assert!(c.dir_saturated.equals(&c.dir));
            assert!(c.maximal);
            assert!(c.span_certified);
            match &c.translates {
                BaseSet::Point(b) => {
                    assert!(b.iter().all(|e| e.is_zero()), "zero translate");
                }
                other => panic!("expected a point, got {:?}", other),
            }
        }
        let c4 = &desc.components[3];
        assert!(c4.dir.equals(&v4));
        assert!(!c4.maximal, "line inside two planes");
        assert!(c4.span_certified);
        match &c4.translates {
            BaseSet::Parametric { polys, constraints } => {
                assert!(polys[0].is_zero());
                assert_eq!(polys[1], Poly::var(&f, 2, 0));
                assert_eq!(polys[2], Poly::var(&f, 2, 1));
                assert_eq!(constraints.dim(), 1);
            }
            other => panic!("expected a parametric set, got {:?}", other),
        }
    }

    #[test]
    fn golden_clause_checks() {
        let mut sampler = Sampler::new(11);
        let families = golden_families(&mut sampler);
        let lattice = Lattice::standard(6);
        let desc = assemble_closure(&families, &lattice).unwrap();
        let report = clause_checks(&desc, 2, &mut sampler);
        assert!(report.all_pass);
        assert_eq!(report.components[3].translate_dim, 1);
        for c in &report.components[..3] {
            assert_eq!(c.translate_dim, 0);
        }
        // a one-dimensional variety cannot dominate its translate set
        let tight = clause_checks(&desc, 1, &mut sampler);
        assert!(!tight.all_pass);
        assert!(!tight.components[3].translate_small);
    }

    #[test]
    fn golden_torus_description() {
        let mut sampler = Sampler::new(13);
        let families = golden_families(&mut sampler);
        let lattice = Lattice::standard(6);
        let desc = assemble_closure(&families, &lattice).unwrap();
        let info = torus_description(&desc).unwrap();
        assert_eq!(info[0].dim, 4);
        assert_eq!(info[3].dim, 2);
        // coordinate planes: integral directions are standard basis rows
        let dirs: Vec<usize> = info[0]
            .lattice_dirs
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        assert_eq!(dirs, vec![2, 3, 4, 5]);
        assert_eq!(
            info[0].folded_translates,
            Some(vec![vec![int(0); 6]])
        );
        assert_eq!(info[3].folded_translates, None);
    }

    #[test]
    fn hyperbola_closure_has_two_lines() {
        let f = q();
        let mut sampler = Sampler::new(3);
        let b1 = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1))], None),
            series_exact(&f, vec![(int(1), int(1))], None),
        ])
        .unwrap();
        let b2 = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(1), int(1))], None),
            series_exact(&f, vec![(int(-1), int(1))], None),
        ])
        .unwrap();
        let families = vec![
            FlatFamily::from_branches(&b1, Mode::Complex, &mut sampler).unwrap(),
            FlatFamily::from_branches(&b2, Mode::Complex, &mut sampler).unwrap(),
        ];
        let desc = assemble_closure(&families, &Lattice::standard(4)).unwrap();
        assert_eq!(desc.components.len(), 2);
        assert!(desc.components[0].dir.equals(&complex_plane(&f, 2, &[0])));
        assert!(desc.components[1].dir.equals(&complex_plane(&f, 2, &[1])));
        assert!(desc.components.iter().all(|c| c.maximal));
        for c in &desc.components {
            match &c.translates {
                BaseSet::Point(b) => assert!(b.iter().all(|e| e.is_zero())),
                other => panic!("expected points, got {:?}", other),
            }
        }
    }

    #[test]
    fn duplicates_collapse_and_sublines_lose_maximality() {
        let f = q();
        let mut sampler = Sampler::new(5);
        let line = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1))], None),
            series_exact(&f, vec![(int(1), int(1))], None),
        ])
        .unwrap();
        let plane = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1))], None),
            series_exact(&f, vec![(int(-2), int(1))], None),
        ])
        .unwrap();
        let families = vec![
            FlatFamily::from_branches(&line, Mode::Complex, &mut sampler).unwrap(),
            FlatFamily::from_branches(&line, Mode::Complex, &mut sampler).unwrap(),
            FlatFamily::from_branches(&plane, Mode::Complex, &mut sampler).unwrap(),
        ];
        let desc = assemble_closure(&families, &Lattice::standard(4)).unwrap();
        assert_eq!(desc.components.len(), 2);
        assert!(!desc.components[0].maximal);
        assert!(desc.components[1].maximal);
        assert_eq!(desc.components[1].dir.dim(), 4);
    }

    #[test]
    fn bounded_families_leave_no_component() {
        let f = q();
        let mut sampler = Sampler::new(9);
        let bounded = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(0), int(3)), (int(1), int(1))], None),
            series_exact(&f, vec![(int(2), int(5))], None),
        ])
        .unwrap();
        let fam = FlatFamily::from_branches(&bounded, Mode::Complex, &mut sampler).unwrap();
        assert_eq!(fam.span().dim(), 0);
        let desc = assemble_closure(&[fam], &Lattice::standard(4)).unwrap();
        assert!(desc.components.is_empty());
    }

    #[test]
    fn translate_set_projects_the_base_point() {
        let f = q();
        let mut sampler = Sampler::new(17);
        // (1/z + 1, 2 + z): flat is C x {2} based at (1, 2)
        let fam = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1)), (int(0), int(1))], None),
            series_exact(&f, vec![(int(0), int(2)), (int(1), int(1))], None),
        ])
        .unwrap();
        let ff = FlatFamily::from_branches(&fam, Mode::Complex, &mut sampler).unwrap();
        match translate_set(&ff, ff.span()).unwrap() {
            BaseSet::Point(b) => {
                let want = [int(0), int(0), int(2), int(0)];
                for (e, w) in b.iter().zip(&want) {
                    assert_eq!(e.to_rational().unwrap(), w.clone());
                }
            }
            other => panic!("expected a point, got {:?}", other),
        }
        // refusing a span that misses the directions
        let small = Subspace::zero(Mode::Complex, 4, &f);
        assert!(matches!(
            translate_set(&ff, &small),
            Err(ClosureError::SpanNotContained)
        ));
    }

    #[test]
    fn parametric_base_inside_span_is_refused() {
        let f = q();
        let mut sampler = Sampler::new(23);
        // (t/z + t, u) with t u = 1: base (t, u) leans into the span C e1
        let t = Poly::var(&f, 2, 0);
        let u = Poly::var(&f, 2, 1);
        let cons =
            ConstraintSystem::new(&f, 2, vec![t.mul(&u).sub(&Poly::one(&f, 2))]).unwrap();
        let fam = BranchFamily::new(
            vec![
                PuiseuxScalar::monomial(&f, 2, int(-1), t.clone())
                    .add(&PuiseuxScalar::constant(&f, 2, t.clone())),
                PuiseuxScalar::constant(&f, 2, u.clone()),
            ],
            cons,
        )
        .unwrap();
        let ff = FlatFamily::from_branches(&fam, Mode::Complex, &mut sampler).unwrap();
        assert_eq!(ff.span().dim(), 2);
        assert!(matches!(
            translate_set(&ff, ff.span()),
            Err(ClosureError::UnsplittableBase)
        ));
    }

    #[test]
    fn skew_lattice_saturation_grows_the_span() {
        // direction (1, sqrt 2) in real mode: saturation against Z^2 is
        // the whole plane, and the subtorus report says so
        let k = Field::sqrt2();
        let th = k.gen();
        let mut sampler = Sampler::new(29);
        let fam = BranchFamily::without_params(vec![
            PuiseuxScalar::from_terms(&k, 0, vec![(int(-1), Poly::one(&k, 0))], None),
            PuiseuxScalar::from_terms(
                &k,
                0,
                vec![(int(-1), Poly::constant(&k, 0, th))],
                None,
            ),
        ])
        .unwrap();
        let ff = FlatFamily::from_branches(&fam, Mode::Real, &mut sampler).unwrap();
        assert_eq!(ff.span().dim(), 1);
        let desc = assemble_closure(&[ff], &Lattice::standard(2)).unwrap();
        assert_eq!(desc.components[0].dir_saturated.dim(), 2);
        let info = torus_description(&desc).unwrap();
        assert_eq!(info[0].dim, 2);
        assert_eq!(info[0].folded_translates, Some(vec![vec![int(0), int(0)]]));
    }

    #[test]
    fn mode_and_ambient_mismatches_are_rejected() {
        let f = q();
        let mut sampler = Sampler::new(31);
        let a = BranchFamily::without_params(vec![
            series_exact(&f, vec![(int(-1), int(1))], None),
            series_exact(&f, vec![(int(1), int(1))], None),
        ])
        .unwrap();
        let fa = FlatFamily::from_branches(&a, Mode::Complex, &mut sampler).unwrap();
        let fb = FlatFamily::from_branches(&a, Mode::Real, &mut sampler).unwrap();
        assert!(matches!(
            assemble_closure(&[fa.clone(), fb], &Lattice::standard(4)),
            Err(ClosureError::ModeMismatch)
        ));
        assert!(matches!(
            assemble_closure(&[fa], &Lattice::standard(6)),
            Err(ClosureError::AmbientMismatch)
        ));
        assert!(matches!(
            assemble_closure(&[], &Lattice::standard(4)),
            Err(ClosureError::NoFamilies)
        ));
    }

    #[test]
    fn rank_stabilization_sees_through_parameter_powers() {
        let f = q();
        let mut sampler = Sampler::new(37);
        // (t^2/z, t/z): each member is one line, but two members already
        // span both axes, matching the monomial span
        let t = Poly::var(&f, 1, 0);
        let fam = BranchFamily::new(
            vec![
                PuiseuxScalar::monomial(&f, 1, int(-1), t.mul(&t)),
                PuiseuxScalar::monomial(&f, 1, int(-1), t.clone()),
            ],
            ConstraintSystem::unconstrained(&f, 1),
        )
        .unwrap();
        let ff = FlatFamily::from_branches(&fam, Mode::Complex, &mut sampler).unwrap();
        assert_eq!(ff.span().dim(), 4);
        assert_eq!(ff.member_dim(), 2);
        assert!(ff.span_certified(), "two samples span both axes");
    }
}
