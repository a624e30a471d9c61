//! The bundles `𝒵^a`, the sharp and Reeb maps, the graded extension `♯_a`
//! with values in `⋁_{n+1−a}/K_{n+1−a}`, and the bracket written through them.
//!
//! Sign convention: `α = ι_X dΘ + γΘ` with `ι_XΘ = 0` gives `♯α = X` and
//! `ℛα = γ`, so `ι_{♯α}dΘ = α − ℛ(α)Θ`. For `a < n`, `𝒵^a` is spanned by
//! `ι_{e_J} g` with `g` running over the generators `ι_k dΘ` (`k` in a basis
//! of `ker₁Θ`) and `Θ`, and `♯_a(ι_{e_J} g) = ♯(g) ∧ e_J`.

use crate::coeffring::Coefficient;
use crate::elimination::{assemble, blades, LinearSystem, Solution};
use crate::exterior::{Blade, DiffForm, MultiVector};
use crate::structures::{reduce_modulo, sign, ConformalData, KernelOf, NFormStructure, Result, StructureError};

/// A member of `𝒵^a` with its image under `♯_a` and its Reeb part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZDecomposition {
    source: DiffForm,
    sharp: MultiVector,
    reeb: MultiVector,
}

impl ZDecomposition {
    pub fn source(&self) -> &DiffForm {
        &self.source
    }

    /// Representative of `♯_a(source)`, degree `n + 1 − a`.
    pub fn sharp(&self) -> &MultiVector {
        &self.sharp
    }

    /// `W` of degree `n − a` with `ι_{♯_a(source)}dΘ = source − ι_WΘ`.
    pub fn reeb(&self) -> &MultiVector {
        &self.reeb
    }

    /// `ℛ(source)` when the source has top degree.
    pub fn gamma(&self) -> Option<Coefficient> {
        self.reeb.as_scalar()
    }
}

/// Outcome of a `𝒵^a` membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZMembership {
    Member(ZDecomposition),
    /// Row of the reduced system reading `0 = residual`.
    NotMember { row: usize, residual: Coefficient },
}

impl ZMembership {
    pub fn member(self) -> Option<ZDecomposition> {
        match self {
            ZMembership::Member(d) => Some(d),
            ZMembership::NotMember { .. } => None,
        }
    }
}

/// A class in `⋁_p / K_p`, stored as its reduced representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMultiVector {
    representative: MultiVector,
    modulus: Vec<MultiVector>,
}

impl QuotientMultiVector {
    pub fn new(structure: &NFormStructure, u: &MultiVector) -> Result<QuotientMultiVector> {
        let modulus = structure.kernel_basis(u.degree(), KernelOf::Both)?;
        let representative = reduce_modulo(&modulus, u)?;
        Ok(QuotientMultiVector { representative, modulus })
    }

    pub fn representative(&self) -> &MultiVector {
        &self.representative
    }

    pub fn modulus(&self) -> &[MultiVector] {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.representative.degree()
    }

    /// Whether `u` lies in this class.
    pub fn contains(&self, u: &MultiVector) -> Result<bool> {
        Ok(reduce_modulo(&self.modulus, u)? == self.representative)
    }
}

struct Generators {
    /// `(J, k)` for `ι_{e_J}ι_{k} dΘ`, `k = None` standing for `Θ`.
    labels: Vec<(Blade, Option<usize>)>,
    columns: Vec<DiffForm>,
    ker: Vec<MultiVector>,
}

fn generators(s: &NFormStructure, a: usize) -> Result<Generators> {
    let ker = s.kernel_basis(1, KernelOf::Theta)?;
    let mut top: Vec<(Option<usize>, DiffForm)> = Vec::new();
    for (k, v) in ker.iter().enumerate() {
        top.push((Some(k), s.dtheta().interior(v)?));
    }
    top.push((None, s.theta().clone()));
    let mut labels = Vec::new();
    let mut columns = Vec::new();
    for j in blades(s.chart().dimension(), s.n() - a) {
        let e = MultiVector::basis(s.chart(), j);
        for (k, g) in &top {
            let col = g.interior(&e)?;
            if !col.is_zero() {
                labels.push((j, *k));
                columns.push(col);
            }
        }
    }
    Ok(Generators { labels, columns, ker })
}

/// Decides `alpha ∈ 𝒵^a` by one exact solve and returns `♯_a` and the Reeb part.
pub fn z_membership(s: &NFormStructure, alpha: &DiffForm) -> Result<ZMembership> {
    Ok(match z_solve(s, alpha)? {
        ZSolve::Member(d, _) => ZMembership::Member(d),
        ZSolve::NotMember(row, residual) => ZMembership::NotMember { row, residual },
    })
}

enum ZSolve {
    /// Decomposition plus an alternative `♯_a` representative, if any.
    Member(ZDecomposition, Option<MultiVector>),
    NotMember(usize, Coefficient),
}

fn z_solve(s: &NFormStructure, alpha: &DiffForm) -> Result<ZSolve> {
    if alpha.chart() != s.chart() {
        return Err(StructureError::StructureMismatch);
    }
    let a = alpha.degree();
    if a == 0 || a > s.n() {
        return Err(StructureError::Degree(format!("Z^a is defined for 1 <= a <= {}, got {a}", s.n())));
    }
    let gens = generators(s, a)?;
    if gens.columns.is_empty() {
        return Ok(if alpha.is_zero() {
            ZSolve::Member(assemble_parts(s, alpha, &gens, &[])?, None)
        } else {
            ZSolve::NotMember(0, alpha.terms().next().map(|(_, c)| c.clone()).unwrap_or_default())
        });
    }
    let sys = LinearSystem::from_columns(&gens.columns, Some(alpha));
    match sys.solve(s.chart()) {
        Solution::Solved { particular, kernel, .. } => {
            let dec = assemble_parts(s, alpha, &gens, &particular)?;
            let alt = match kernel.first() {
                Some(k) => {
                    let shifted: Vec<Coefficient> = particular.iter().zip(k).map(|(x, y)| x + y).collect();
                    Some(assemble_parts(s, alpha, &gens, &shifted)?.sharp)
                }
                None => None,
            };
            Ok(ZSolve::Member(dec, alt))
        }
        Solution::Inconsistent { row, residual } => Ok(ZSolve::NotMember(row, residual)),
        Solution::GenericRankOnly { pivots, .. } => Err(StructureError::GenericRankOnly(format!(
            "Z^{a} membership stalled after {} pivots",
            pivots.len()
        ))),
    }
}

fn assemble_parts(s: &NFormStructure, alpha: &DiffForm, g: &Generators, c: &[Coefficient]) -> Result<ZDecomposition> {
    let a = alpha.degree();
    let chart = s.chart();
    let mut sharp = MultiVector::zero(chart, s.n() + 1 - a);
    let mut reeb_blades = Vec::new();
    let mut reeb_values = Vec::new();
    for ((j, k), ck) in g.labels.iter().zip(c) {
        if ck.is_zero() {
            continue;
        }
        match k {
            Some(k) => {
                let piece = g.ker[*k].wedge(&MultiVector::basis(chart, *j))?;
                sharp = sharp.add(&piece.scale(ck))?;
            }
            None => {
                reeb_blades.push(*j);
                reeb_values.push(ck.clone());
            }
        }
    }
    let reeb = assemble(chart, s.n() - a, &reeb_blades, &reeb_values);
    Ok(ZDecomposition { source: alpha.clone(), sharp, reeb })
}

/// `(♯α, ℛα)` for `α ∈ 𝒵^n`.
pub fn sharp_and_reeb(s: &NFormStructure, alpha: &DiffForm) -> Result<(MultiVector, Coefficient)> {
    if alpha.degree() != s.n() {
        return Err(StructureError::Degree(format!(
            "sharp and Reeb act on {}-forms, got degree {}",
            s.n(),
            alpha.degree()
        )));
    }
    let d = require_member(s, alpha)?;
    let gamma = d.gamma().unwrap_or_default();
    Ok((d.sharp, gamma))
}

fn require_member(s: &NFormStructure, alpha: &DiffForm) -> Result<ZDecomposition> {
    match z_membership(s, alpha)? {
        ZMembership::Member(d) => Ok(d),
        ZMembership::NotMember { residual, .. } => Err(StructureError::Domain(format!(
            "form of degree {} is not in Z (certificate: 0 = {residual})",
            alpha.degree()
        ))),
    }
}

/// `♯_a(α)` as a class modulo `K_{n+1−a}`; a second decomposition, when the
/// solve has freedom, is checked to land in the same class.
pub fn sharp_graded(s: &NFormStructure, alpha: &DiffForm) -> Result<QuotientMultiVector> {
    let (d, alt) = match z_solve(s, alpha)? {
        ZSolve::Member(d, alt) => (d, alt),
        ZSolve::NotMember(_, residual) => {
            return Err(StructureError::Domain(format!(
                "form of degree {} is not in Z (certificate: 0 = {residual})",
                alpha.degree()
            )))
        }
    };
    let class = QuotientMultiVector::new(s, &d.sharp)?;
    if let Some(other) = alt {
        if !class.contains(&other)? {
            return Err(StructureError::Domain(
                "two decompositions give different sharp classes".into(),
            ));
        }
    }
    Ok(class)
}

/// `R ∈ ker_p dΘ` with `ι_RΘ = −α`, if any.
pub fn reeb_lift(s: &NFormStructure, alpha: &DiffForm, p: usize) -> Result<Option<MultiVector>> {
    if alpha.degree() + p != s.n() {
        return Err(StructureError::Degree(format!(
            "a lift of degree {p} needs a form of degree {}",
            s.n().saturating_sub(p)
        )));
    }
    let (basis, on_theta) = crate::elimination::contraction_columns(s.theta(), p);
    let (_, on_dtheta) = crate::elimination::contraction_columns(s.dtheta(), p);
    let mut sys = LinearSystem::from_columns(&on_theta, Some(&alpha.neg()));
    sys.append(LinearSystem::from_columns(&on_dtheta, None));
    match sys.solve(s.chart()) {
        Solution::Solved { particular, .. } => Ok(Some(assemble(s.chart(), p, &basis, &particular))),
        Solution::Inconsistent { .. } => Ok(None),
        Solution::GenericRankOnly { pivots, .. } => Err(StructureError::GenericRankOnly(format!(
            "Reeb lift stalled after {} pivots",
            pivots.len()
        ))),
    }
}

/// Canonical witnesses `X = (−1)^{p+1}♯_{n+1−p}(dα) + R_α` and `V = −W`,
/// validated as conformal data.
pub fn canonical_witness(s: &NFormStructure, alpha: &DiffForm) -> Result<ConformalData> {
    if alpha.degree() >= s.n() {
        return Err(StructureError::Degree(format!(
            "conformal forms have degree below {}, got {}",
            s.n(),
            alpha.degree()
        )));
    }
    let p = s.n() - alpha.degree();
    let dec = require_member(s, &alpha.d())?;
    let lift = reeb_lift(s, alpha, p)?.ok_or_else(|| {
        StructureError::Domain("no R in ker dtheta with i_R theta = -alpha".into())
    })?;
    let x = dec.sharp.scale_int(sign(p + 1)).add(&lift)?;
    s.make_conformal_data(alpha.clone(), x, dec.reeb.neg())
}

/// Both sides of the bracket written through `♯`:
/// `(−1)^q d(α∨β) + (−1)^{(p−1)q} ι_{♯(dα)}dβ + (−1)^{q+1} ι_{V_β}α − (−1)^{(p−1)q} ι_{V_α}β`
/// with canonical witnesses for `α`. Errors when the two sides differ.
pub fn bracket_via_sharp(s: &NFormStructure, a: &ConformalData, b: &ConformalData) -> Result<DiffForm> {
    let (p, q) = (a.p(), b.p());
    let chart = s.chart();
    let deg = (s.n() + 1).checked_sub(p + q).ok_or_else(|| {
        StructureError::Degree(format!("bracket of p = {p} and q = {q} exceeds degree {}", s.n()))
    })?;
    let definitional = match s.jacobi_bracket(a, b)? {
        Some(d) => d.alpha().clone(),
        None => DiffForm::zero(chart, deg),
    };
    let can = canonical_witness(s, a.alpha())?;
    let cup = match s.cup_product(&can, b)? {
        Some(c) => c.alpha().d().scale_int(sign(q)),
        None => DiffForm::zero(chart, deg),
    };
    let dbeta = b.alpha().d();
    let sharp_da = require_member(s, &a.alpha().d())?.sharp;
    let middle = dbeta.interior(&sharp_da)?.scale_int(sign((p - 1) * q));
    let third = a.alpha().interior(b.v_field())?.scale_int(sign(q + 1));
    let fourth = b.alpha().interior(can.v_field())?.scale_int(sign((p - 1) * q));
    let rhs = cup.add(&middle)?.add(&third)?.sub(&fourth)?;
    if rhs != definitional {
        return Err(StructureError::Validation {
            equation: "bracket through sharp equals the definitional bracket",
            residual: rhs.sub(&definitional)?,
        });
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests;
