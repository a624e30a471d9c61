//! The canonical (pre-)multisymplectization `M × ℝ_×` of an n-form `Θ`:
//! `Υ = z·Θ`, `Ω = −dΥ`, Liouville field `Δ = z∂_z`, the homogeneous lift of
//! conformal transformations and the map `Ψ(α) = (−1)^{p+1} z·α`.
//!
//! The connection is `ker dz`, so horizontal lifts are coefficient-wise
//! inclusions with no `∂_z` part. Nonvanishing of `Θ` is certified only
//! generically by the polynomial model.

use crate::coeffring::Coefficient;
use crate::elimination::{assemble, contraction_columns, LinearSystem, Solution};
use crate::exterior::{Chart, DiffForm, ExteriorError, MultiVector};
use crate::structures::{sign, ConformalData, KernelOf, NFormStructure, Result, StructureError};

#[derive(Debug, Clone)]
pub struct Symplectization {
    base: NFormStructure,
    extended: Chart,
    fiber: String,
    upsilon: DiffForm,
    omega: DiffForm,
    liouville: MultiVector,
    conformal_factor: Coefficient,
}

/// `z`, or `z1`, `z2`, … when the base already uses the name.
fn fresh_fiber_name(chart: &Chart) -> String {
    if chart.index_of("z").is_none() {
        return "z".into();
    }
    (1..)
        .map(|k| format!("z{k}"))
        .find(|n| chart.index_of(n).is_none())
        .expect("finitely many coordinates")
}

impl Symplectization {
    pub fn build(base: &NFormStructure) -> Result<Symplectization> {
        let fiber = fresh_fiber_name(base.chart());
        let extended = base.chart().extended(&[fiber.as_str()], &[fiber.as_str()])?;
        let z = Coefficient::var(&fiber);
        let upsilon = base.theta().transport(&extended)?.scale(&z);
        let omega = upsilon.d().neg();
        let liouville = extended.e(&fiber)?.scale(&z);
        let sy = Symplectization {
            base: base.clone(),
            extended,
            fiber,
            upsilon,
            omega,
            liouville,
            conformal_factor: z,
        };
        let r = sy.omega.interior(&sy.liouville)?.add(&sy.upsilon)?;
        if !r.is_zero() {
            return Err(StructureError::Validation { equation: "i_Delta omega = -upsilon", residual: r });
        }
        if sy.liouville.apply(&sy.conformal_factor)? != sy.conformal_factor {
            return Err(StructureError::Domain("Delta(phi) differs from phi".into()));
        }
        Ok(sy)
    }

    pub fn base(&self) -> &NFormStructure {
        &self.base
    }

    pub fn extended_chart(&self) -> &Chart {
        &self.extended
    }

    /// Name of the `ℝ_×` coordinate.
    pub fn fiber(&self) -> &str {
        &self.fiber
    }

    pub fn upsilon(&self) -> &DiffForm {
        &self.upsilon
    }

    pub fn omega(&self) -> &DiffForm {
        &self.omega
    }

    pub fn liouville(&self) -> &MultiVector {
        &self.liouville
    }

    pub fn conformal_factor(&self) -> &Coefficient {
        &self.conformal_factor
    }

    /// Basis of `ker₁Ω`.
    pub fn omega_kernel(&self) -> Result<Vec<MultiVector>> {
        let (basis, cols) = contraction_columns(&self.omega, 1);
        match LinearSystem::from_columns(&cols, None).solve(&self.extended) {
            Solution::Solved { kernel, .. } => {
                Ok(kernel.iter().map(|v| assemble(&self.extended, 1, &basis, v)).collect())
            }
            Solution::Inconsistent { .. } => unreachable!("homogeneous systems are consistent"),
            Solution::GenericRankOnly { pivots, .. } => Err(StructureError::GenericRankOnly(format!(
                "ker1 omega stalled after {} pivots",
                pivots.len()
            ))),
        }
    }

    /// `ker₁Ω = 0`.
    pub fn nondegeneracy_check(&self) -> Result<bool> {
        Ok(self.omega_kernel()?.is_empty())
    }

    /// Whether nondegeneracy agrees with the multicontact predicate; `None`
    /// when `ker₁dΘ = 0`, where the two need not agree.
    pub fn nondegeneracy_matches_multicontact(&self) -> Result<Option<bool>> {
        if self.base.kernel_basis(1, KernelOf::DTheta)?.is_empty() {
            return Ok(None);
        }
        Ok(Some(self.nondegeneracy_check()? == self.base.is_multicontact()?.multicontact))
    }

    /// Coefficient-wise inclusion of base data.
    pub fn horizontal<K: crate::exterior::Kind>(
        &self,
        t: &crate::exterior::Graded<K>,
    ) -> Result<crate::exterior::Graded<K>> {
        if t.chart() != self.base.chart() {
            return Err(ExteriorError::ChartMismatch.into());
        }
        Ok(t.transport(&self.extended)?)
    }

    /// `X̃ = X^h + (−1)^p Δ∧V^h`, checked to satisfy `𝓛_{X̃}Υ = 0`.
    pub fn lift_conformal(&self, x: &MultiVector, v: &MultiVector) -> Result<MultiVector> {
        let p = x.degree();
        if p == 0 || v.degree() + 1 != p {
            return Err(StructureError::Degree(format!(
                "lift needs deg X >= 1 and deg V = deg X - 1; got {p} and {}",
                v.degree()
            )));
        }
        let theta = self.base.theta();
        let r = theta.lie(x)?.sub(&theta.interior(v)?)?;
        if !r.is_zero() {
            return Err(StructureError::Validation { equation: "L_X theta = i_V theta", residual: r });
        }
        let lifted = self
            .horizontal(x)?
            .add(&self.liouville.wedge(&self.horizontal(v)?)?.scale_int(sign(p)))?;
        let r = self.upsilon.lie(&lifted)?;
        if !r.is_zero() {
            return Err(StructureError::Validation { equation: "L_{lift} upsilon = 0", residual: r });
        }
        Ok(lifted)
    }

    /// `(−1)^{q−1} ι_{X_a∧X_b}Ω` after re-checking `ι_{X}Ω = dα` for both pairs.
    pub fn poisson_bracket(
        &self,
        (alpha, xa): (&DiffForm, &MultiVector),
        (beta, xb): (&DiffForm, &MultiVector),
    ) -> Result<DiffForm> {
        for (form, x) in [(alpha, xa), (beta, xb)] {
            let r = self.omega.interior(x)?.sub(&form.d())?;
            if !r.is_zero() {
                return Err(StructureError::Validation { equation: "i_X omega = d alpha", residual: r });
            }
        }
        let q = xb.degree();
        let wedge = xa.wedge(xb)?;
        if wedge.degree() > self.omega.degree() {
            let deg = (self.omega.degree() + 1).saturating_sub(xa.degree() + q);
            return Ok(DiffForm::zero(&self.extended, deg));
        }
        Ok(self.omega.interior(&wedge)?.scale_int(sign(q + 1)))
    }

    /// `Ψ(α) = (−1)^{p+1} z·α` with its Hamiltonian field `−X̃`.
    ///
    /// The lift satisfies `ι_{X̃}Ω = (−1)^p d(zα) = −dΨ(α)`, so the field
    /// paired with `Ψ(α)` is the negated lift. Brackets are quadratic in the
    /// fields and do not see the sign.
    pub fn psi_map(&self, a: &ConformalData) -> Result<(DiffForm, MultiVector)> {
        let p = a.p();
        let psi = self.psi_form(a.alpha(), p)?;
        let lifted = self.lift_conformal(a.x_field(), a.v_field())?.neg();
        let r = self.omega.interior(&lifted)?.sub(&psi.d())?;
        if !r.is_zero() {
            return Err(StructureError::Validation { equation: "i_{-lift} omega = d psi", residual: r });
        }
        Ok((psi, lifted))
    }

    fn psi_form(&self, alpha: &DiffForm, p: usize) -> Result<DiffForm> {
        Ok(self.horizontal(alpha)?.scale(&self.conformal_factor).scale_int(sign(p + 1)))
    }

    /// `{Ψa, Ψb}_P − Ψ{a,b} − (−1)^q dΨ(a∨b)`; identically zero.
    pub fn check_correspondence(&self, a: &ConformalData, b: &ConformalData) -> Result<DiffForm> {
        let (p, q) = (a.p(), b.p());
        let (psi_a, xa) = self.psi_map(a)?;
        let (psi_b, xb) = self.psi_map(b)?;
        let lhs = self.poisson_bracket((&psi_a, &xa), (&psi_b, &xb))?;
        let deg = lhs.degree();
        let bracket = match self.base.jacobi_bracket(a, b)? {
            Some(d) => self.psi_form(d.alpha(), p + q - 1)?,
            None => DiffForm::zero(&self.extended, deg),
        };
        let cup = match self.base.cup_product(a, b)? {
            Some(d) => self.psi_form(d.alpha(), p + q)?.d().scale_int(sign(q)),
            None => DiffForm::zero(&self.extended, deg),
        };
        Ok(lhs.sub(&bracket)?.sub(&cup)?)
    }
}

#[cfg(test)]
mod tests;
