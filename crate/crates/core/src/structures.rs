//! Structures defined by an n-form: kernels, the multicontact predicate,
//! conformal Hamiltonian data, the graded Jacobi bracket and the cup product.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::coeffring::{Coefficient, Rational};
use crate::elimination::{assemble, contraction_columns, LinearSystem, Solution};
use crate::exterior::{Blade, Chart, DiffForm, ExteriorError, MultiVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("{equation} fails; residual: {residual}")]
    Validation { equation: &'static str, residual: DiffForm },
    #[error("objects belong to different structures")]
    StructureMismatch,
    #[error("{0}")]
    Degree(String),
    #[error("elimination met a non-invertible pivot; only a generic rank is available ({0})")]
    GenericRankOnly(String),
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, StructureError>;

pub(crate) fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Which form a kernel is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelOf {
    Theta,
    DTheta,
    Both,
}

impl KernelOf {
    fn slot(self) -> usize {
        match self {
            KernelOf::Theta => 0,
            KernelOf::DTheta => 1,
            KernelOf::Both => 2,
        }
    }
}

impl fmt::Display for KernelOf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelOf::Theta => "theta",
            KernelOf::DTheta => "dtheta",
            KernelOf::Both => "both",
        })
    }
}

/// Kernel computation outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kernel {
    /// Generating set obtained by exact elimination.
    Exact(Vec<MultiVector>),
    /// Elimination stalled; the unreduced block is kept for pointwise ranks.
    GenericRankOnly { system: LinearSystem, pivots: usize, unknowns: usize },
}

impl Kernel {
    pub fn exact(&self) -> Option<&[MultiVector]> {
        match self {
            Kernel::Exact(v) => Some(v),
            Kernel::GenericRankOnly { .. } => None,
        }
    }
}

/// A chart with an n-form `Θ`, its differential and lazily cached kernels.
#[derive(Debug)]
pub struct NFormStructure {
    chart: Chart,
    theta: DiffForm,
    dtheta: DiffForm,
    kernels: Vec<[OnceLock<Kernel>; 3]>,
}

impl Clone for NFormStructure {
    fn clone(&self) -> Self {
        NFormStructure::new(self.theta.clone())
    }
}

impl PartialEq for NFormStructure {
    fn eq(&self, other: &Self) -> bool {
        self.theta == other.theta
    }
}

impl Eq for NFormStructure {}

impl NFormStructure {
    pub fn new(theta: DiffForm) -> NFormStructure {
        let chart = theta.chart().clone();
        let dtheta = theta.d();
        let kernels = (0..=theta.degree() + 1).map(|_| Default::default()).collect();
        NFormStructure { chart, theta, dtheta, kernels }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn theta(&self) -> &DiffForm {
        &self.theta
    }

    pub fn dtheta(&self) -> &DiffForm {
        &self.dtheta
    }

    /// Degree `n` of `Θ`.
    pub fn n(&self) -> usize {
        self.theta.degree()
    }

    /// Generating set of `{u ∈ ⋁_p : ι_u(target) = 0}`.
    pub fn kernel(&self, p: usize, which: KernelOf) -> Result<Kernel> {
        let max = match which {
            KernelOf::Theta | KernelOf::Both => self.n(),
            KernelOf::DTheta => self.n() + 1,
        };
        if p == 0 || p > max {
            return Err(StructureError::Degree(format!(
                "kernel of {which} is defined for 1 <= p <= {max}, got {p}"
            )));
        }
        let cell = &self.kernels[p][which.slot()];
        if let Some(k) = cell.get() {
            return Ok(k.clone());
        }
        let k = self.compute_kernel(p, which);
        Ok(cell.get_or_init(|| k).clone())
    }

    /// Exact kernel basis; stalls are reported as errors.
    pub fn kernel_basis(&self, p: usize, which: KernelOf) -> Result<Vec<MultiVector>> {
        match self.kernel(p, which)? {
            Kernel::Exact(v) => Ok(v),
            Kernel::GenericRankOnly { pivots, unknowns, .. } => Err(StructureError::GenericRankOnly(
                format!("ker_{p} {which}: {pivots} exact pivots among {unknowns} unknowns"),
            )),
        }
    }

    /// Pointwise kernel dimension at a sample point; the fallback for stalled
    /// elimination.
    pub fn kernel_dimension_at(
        &self,
        p: usize,
        which: KernelOf,
        point: &BTreeMap<String, Rational>,
    ) -> Result<usize> {
        match self.kernel(p, which)? {
            Kernel::Exact(v) => {
                let basis = crate::elimination::blades(self.chart.dimension(), p);
                let mut sys = LinearSystem::new(v.len());
                for b in &basis {
                    let mut row = crate::elimination::Row::default();
                    for (j, u) in v.iter().enumerate() {
                        let c = u.get(*b);
                        if !c.is_zero() {
                            row.entries.insert(j, c);
                        }
                    }
                    sys.push(row);
                }
                Ok(sys.rank_at(&self.chart, point)?)
            }
            Kernel::GenericRankOnly { system, pivots, unknowns } => {
                let rank = pivots + system.rank_at(&self.chart, point)?;
                Ok(unknowns - rank)
            }
        }
    }

    fn compute_kernel(&self, p: usize, which: KernelOf) -> Kernel {
        let mut sys: Option<LinearSystem> = None;
        let mut basis = Vec::new();
        let targets: Vec<&DiffForm> = match which {
            KernelOf::Theta => vec![&self.theta],
            KernelOf::DTheta => vec![&self.dtheta],
            KernelOf::Both => vec![&self.theta, &self.dtheta],
        };
        for t in targets {
            let (b, cols) = contraction_columns(t, p);
            basis = b;
            let s = LinearSystem::from_columns(&cols, None);
            match &mut sys {
                None => sys = Some(s),
                Some(acc) => acc.append(s),
            }
        }
        let sys = sys.expect("at least one target");
        match sys.solve(&self.chart) {
            Solution::Solved { kernel, .. } => Kernel::Exact(
                kernel
                    .iter()
                    .map(|v| assemble(&self.chart, p, &basis, v))
                    .collect(),
            ),
            Solution::Inconsistent { .. } => unreachable!("homogeneous systems are consistent"),
            Solution::GenericRankOnly { reduced, pivots } => {
                Kernel::GenericRankOnly { system: reduced, pivots: pivots.len(), unknowns: basis.len() }
            }
        }
    }

    /// Multicontact iff `ker₁Θ ∩ ker₁dΘ = 0` and `ker₁dΘ ≠ 0`.
    pub fn is_multicontact(&self) -> Result<MulticontactReport> {
        let both = self.kernel_basis(1, KernelOf::Both)?;
        if let Some(w) = both.first() {
            return Ok(MulticontactReport {
                multicontact: false,
                witness: Some(w.clone()),
                reason: "ker1 theta and ker1 dtheta intersect".into(),
            });
        }
        let dk = self.kernel_basis(1, KernelOf::DTheta)?;
        match dk.first() {
            None => Ok(MulticontactReport {
                multicontact: false,
                witness: None,
                reason: "ker1 dtheta is zero".into(),
            }),
            Some(w) => Ok(MulticontactReport {
                multicontact: true,
                witness: Some(w.clone()),
                reason: "ker1 dtheta is nonzero and meets ker1 theta trivially".into(),
            }),
        }
    }

    fn check_chart<K: crate::exterior::Kind>(&self, t: &crate::exterior::Graded<K>) -> Result<()> {
        if t.chart() != &self.chart {
            return Err(ExteriorError::ChartMismatch.into());
        }
        Ok(())
    }

    /// Finds `V` with `𝓛_XΘ = ι_VΘ`, if any.
    pub fn verify_conformal(&self, x: &MultiVector) -> Result<Option<MultiVector>> {
        self.check_chart(x)?;
        let p = x.degree();
        if p == 0 || p > self.n() {
            return Err(StructureError::Degree(format!(
                "conformal fields have degree 1..={}, got {p}",
                self.n()
            )));
        }
        let lie = self.theta.lie(x)?;
        let (basis, cols) = contraction_columns(&self.theta, p - 1);
        let sys = LinearSystem::from_columns(&cols, Some(&lie));
        match sys.solve(&self.chart) {
            Solution::Solved { particular, .. } => Ok(Some(assemble(&self.chart, p - 1, &basis, &particular))),
            Solution::Inconsistent { .. } => Ok(None),
            Solution::GenericRankOnly { pivots, .. } => Err(StructureError::GenericRankOnly(format!(
                "conformal factor solve stalled after {} pivots",
                pivots.len()
            ))),
        }
    }

    /// Validates `ι_XΘ = −α` and `ι_X dΘ = (−1)^{p+1}(dα + ι_VΘ)`.
    pub fn make_conformal_data(&self, alpha: DiffForm, x: MultiVector, v: MultiVector) -> Result<ConformalData> {
        self.check_chart(&alpha)?;
        self.check_chart(&x)?;
        self.check_chart(&v)?;
        let p = x.degree();
        if p == 0 || p > self.n() || alpha.degree() + p != self.n() || v.degree() + 1 != p {
            return Err(StructureError::Degree(format!(
                "need deg X = p in 1..={n}, deg alpha = n - p, deg V = p - 1; got X {p}, alpha {}, V {}",
                alpha.degree(),
                v.degree(),
                n = self.n()
            )));
        }
        let r1 = self.theta.interior(&x)?.add(&alpha)?;
        if !r1.is_zero() {
            return Err(StructureError::Validation { equation: "i_X theta = -alpha", residual: r1 });
        }
        let rhs = alpha.d().add(&self.theta.interior(&v)?)?.scale_int(sign(p + 1));
        let r2 = self.dtheta.interior(&x)?.sub(&rhs)?;
        if !r2.is_zero() {
            return Err(StructureError::Validation {
                equation: "i_X dtheta = (-1)^(p+1) (d alpha + i_V theta)",
                residual: r2,
            });
        }
        Ok(ConformalData { alpha, x_field: x, v_field: v })
    }

    /// Packages `(−ι_XΘ, X, V)` after finding `V`.
    pub fn conformal_from_field(&self, x: MultiVector) -> Result<Option<ConformalData>> {
        let Some(v) = self.verify_conformal(&x)? else { return Ok(None) };
        let alpha = self.theta.interior(&x)?.neg();
        self.make_conformal_data(alpha, x, v).map(Some)
    }

    /// Graded Jacobi bracket; `None` when `p + q − 1 > n`.
    pub fn jacobi_bracket(&self, a: &ConformalData, b: &ConformalData) -> Result<Option<ConformalData>> {
        self.check_chart(&a.alpha)?;
        self.check_chart(&b.alpha)?;
        let (p, q) = (a.p(), b.p());
        if p + q - 1 > self.n() {
            return Ok(None);
        }
        let x = a.x_field.schouten(&b.x_field)?;
        let alpha = self.theta.interior(&x)?.neg();
        let v = a
            .x_field
            .schouten(&b.v_field)?
            .sub(&b.x_field.schouten(&a.v_field)?.scale_int(sign((p - 1) * (q - 1))))?;
        self.make_conformal_data(alpha, x, v).map(Some)
    }

    /// Cup product `α∨β = −ι_{X_α∧X_β}Θ`; `None` when `p + q > n`.
    pub fn cup_product(&self, a: &ConformalData, b: &ConformalData) -> Result<Option<ConformalData>> {
        self.check_chart(&a.alpha)?;
        self.check_chart(&b.alpha)?;
        let (p, q) = (a.p(), b.p());
        if p + q > self.n() {
            return Ok(None);
        }
        let x = a.x_field.wedge(&b.x_field)?;
        let alpha = self.theta.interior(&x)?.neg();
        let via_b = a.alpha.interior(&b.x_field)?;
        if via_b != alpha {
            return Err(StructureError::Validation {
                equation: "alpha cup beta = i_{X_beta} alpha",
                residual: via_b.sub(&alpha)?,
            });
        }
        let via_a = b.alpha.interior(&a.x_field)?.scale_int(sign(p * q));
        if via_a != alpha {
            return Err(StructureError::Validation {
                equation: "alpha cup beta = (-1)^{pq} i_{X_alpha} beta",
                residual: via_a.sub(&alpha)?,
            });
        }
        // 𝓛_{X∧Y}Θ = (−1)^q ι_{V_a∧Y}Θ + (−1)^{(q−1)p} ι_{[Y,X] + V_b∧X}Θ
        let first = a.v_field.wedge(&b.x_field)?.scale_int(sign(q));
        let second = b
            .x_field
            .schouten(&a.x_field)?
            .add(&b.v_field.wedge(&a.x_field)?)?
            .scale_int(sign((q - 1) * p));
        let v = first.add(&second)?;
        self.make_conformal_data(alpha, x, v).map(Some)
    }

    /// Componentwise sum of two data of the same degree, re-validated.
    pub fn add_conformal(&self, a: &ConformalData, b: &ConformalData) -> Result<ConformalData> {
        self.make_conformal_data(
            a.alpha.add(&b.alpha)?,
            a.x_field.add(&b.x_field)?,
            a.v_field.add(&b.v_field)?,
        )
    }

    /// Scales a datum by a rational constant.
    pub fn scale_conformal(&self, a: &ConformalData, k: &Rational) -> Result<ConformalData> {
        let c = Coefficient::constant(k.clone());
        self.make_conformal_data(a.alpha.scale(&c), a.x_field.scale(&c), a.v_field.scale(&c))
    }

    /// Zero form of degree `n − p` with zero witnesses.
    pub fn zero_conformal(&self, p: usize) -> Result<ConformalData> {
        self.make_conformal_data(
            DiffForm::zero(&self.chart, self.n() - p),
            MultiVector::zero(&self.chart, p),
            MultiVector::zero(&self.chart, p - 1),
        )
    }
}

/// Outcome of the multicontact predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticontactReport {
    pub multicontact: bool,
    /// Offending common kernel vector, or a nonzero element of `ker₁dΘ`.
    pub witness: Option<MultiVector>,
    pub reason: String,
}

/// A validated triple `(α, X_α, V_α)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformalData {
    alpha: DiffForm,
    x_field: MultiVector,
    v_field: MultiVector,
}

impl ConformalData {
    pub fn alpha(&self) -> &DiffForm {
        &self.alpha
    }

    pub fn x_field(&self) -> &MultiVector {
        &self.x_field
    }

    pub fn v_field(&self) -> &MultiVector {
        &self.v_field
    }

    /// Degree `p` of the conformal field.
    pub fn p(&self) -> usize {
        self.x_field.degree()
    }

    pub fn into_parts(self) -> (DiffForm, MultiVector, MultiVector) {
        (self.alpha, self.x_field, self.v_field)
    }
}

/// `X` with `ι_XΩ = dα` for a closed `Ω`, if one exists.
pub fn ms_hamiltonian_pair(omega: &DiffForm, alpha: &DiffForm) -> Result<Option<MultiVector>> {
    if omega.chart() != alpha.chart() {
        return Err(ExteriorError::ChartMismatch.into());
    }
    let dom = omega.d();
    if !dom.is_zero() {
        return Err(StructureError::Validation { equation: "d omega = 0", residual: dom });
    }
    let da = alpha.d();
    if da.degree() > omega.degree() {
        return Err(StructureError::Degree(format!(
            "d alpha has degree {} above omega's {}",
            da.degree(),
            omega.degree()
        )));
    }
    let p = omega.degree() - da.degree();
    let (basis, cols) = contraction_columns(omega, p);
    let sys = LinearSystem::from_columns(&cols, Some(&da));
    match sys.solve(omega.chart()) {
        Solution::Solved { particular, .. } => Ok(Some(assemble(omega.chart(), p, &basis, &particular))),
        Solution::Inconsistent { .. } => Ok(None),
        Solution::GenericRankOnly { pivots, .. } => Err(StructureError::GenericRankOnly(format!(
            "Hamiltonian solve stalled after {} pivots",
            pivots.len()
        ))),
    }
}

/// Membership of `target` in the span of `generators` over the coefficient
/// ring; returns the combination coefficients.
pub fn span_membership(generators: &[DiffForm], target: &DiffForm) -> Result<Option<Vec<Coefficient>>> {
    let chart = target.chart();
    if generators.is_empty() {
        return Ok(target.is_zero().then(Vec::new));
    }
    let sys = LinearSystem::from_columns(generators, Some(target));
    match sys.solve(chart) {
        Solution::Solved { particular, .. } => Ok(Some(particular)),
        Solution::Inconsistent { .. } => Ok(None),
        Solution::GenericRankOnly { pivots, .. } => Err(StructureError::GenericRankOnly(format!(
            "span membership stalled after {} pivots",
            pivots.len()
        ))),
    }
}

/// Reduces `target` against `generators` with the fixed pivot order and
/// returns the canonical remainder (a normal form for the quotient class).
pub fn reduce_modulo<K: crate::exterior::Kind>(
    generators: &[crate::exterior::Graded<K>],
    target: &crate::exterior::Graded<K>,
) -> Result<crate::exterior::Graded<K>> {
    let chart = target.chart();
    let mut rows: Vec<(Blade, crate::exterior::Graded<K>)> = Vec::new();
    // echelon form of the generators with unit leading coefficients
    let mut gens: Vec<crate::exterior::Graded<K>> = generators.to_vec();
    loop {
        let mut chosen: Option<(usize, Blade)> = None;
        'outer: for (k, g) in gens.iter().enumerate() {
            for (b, c) in g.terms() {
                if chart.is_unit(c) {
                    chosen = Some((k, *b));
                    break 'outer;
                }
            }
        }
        let Some((k, lead)) = chosen else { break };
        let g = gens.remove(k);
        let g = g.scale(&chart.inverse(&g.get(lead))?);
        for other in gens.iter_mut() {
            let f = other.get(lead);
            if !f.is_zero() {
                *other = other.sub(&g.scale(&f))?;
            }
        }
        for (_, r) in rows.iter_mut() {
            let f = r.get(lead);
            if !f.is_zero() {
                *r = r.sub(&g.scale(&f))?;
            }
        }
        rows.push((lead, g));
        gens.retain(|x| !x.is_zero());
    }
    if gens.iter().any(|g| !g.is_zero()) {
        return Err(StructureError::GenericRankOnly(
            "quotient generators have no unit leading coefficient".into(),
        ));
    }
    let mut out = target.clone();
    for (lead, g) in &rows {
        let f = out.get(*lead);
        if !f.is_zero() {
            out = out.sub(&g.scale(&f))?;
        }
    }
    Ok(out)
}
