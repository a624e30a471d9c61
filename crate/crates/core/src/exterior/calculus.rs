//! Interior product, exterior derivative, Lie derivative along multivectors and
//! the Schouten–Nijenhuis bracket.

use super::{DiffForm, ExteriorError, MultiVector, Result};
use crate::coeffring::Coefficient;

fn parity_sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl DiffForm {
    /// `ι_U ω` with `ι_{X₁∧⋯∧X_p} = ι_{X_p}∘⋯∘ι_{X₁}`; a degree-0 `U` acts by
    /// multiplication.
    pub fn interior(&self, u: &MultiVector) -> Result<DiffForm> {
        if u.chart() != self.chart() {
            return Err(ExteriorError::ChartMismatch);
        }
        if u.degree() > self.degree() {
            return Err(ExteriorError::Degree {
                op: "interior product",
                expected: format!("multivector degree <= {}", self.degree()),
                got: u.degree(),
            });
        }
        let mut out = DiffForm::zero(self.chart(), self.degree() - u.degree());
        for (vb, vc) in u.terms() {
            for (fb, fc) in self.terms() {
                if let Some((sign, rest)) = fb.contract(*vb) {
                    let k = if sign > 0 { vc.clone() } else { -vc };
                    out.add_scaled_term(rest, fc, &k);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative; only chart coordinates are differentiated.
    pub fn d(&self) -> DiffForm {
        let chart = self.chart().clone();
        let mut out = DiffForm::zero(&chart, self.degree() + 1);
        if self.degree() >= chart.dimension() {
            return out;
        }
        for (b, c) in self.terms() {
            for v in c.variables() {
                let Some(k) = chart.index_of(&v) else { continue };
                if b.contains(k) {
                    continue;
                }
                let dc = c.partial(&v);
                let dc = if b.insert_sign(k) > 0 { dc } else { -dc };
                out.add_term(b.with(k), &dc);
            }
        }
        out
    }

    /// `𝓛_U ω = d ι_U ω − (−1)^p ι_U dω` for `U` of degree `p ≥ 1`.
    pub fn lie(&self, u: &MultiVector) -> Result<DiffForm> {
        let p = u.degree();
        let a = self.degree();
        if p == 0 || p > a + 1 {
            return Err(ExteriorError::Degree {
                op: "Lie derivative",
                expected: format!("1 <= degree <= {}", a + 1),
                got: p,
            });
        }
        let second = self.d().interior(u)?.scale_int(-parity_sign(p));
        if p > a {
            return Ok(second);
        }
        self.interior(u)?.d().add(&second)
    }
}

/// Global sign of the bracket relative to the superfield expansion
/// `Σ_i ∂^R U/∂θ_i ∂V/∂x^i − (−1)^{(p−1)(q−1)} ∂^R V/∂θ_i ∂U/∂x^i`.
/// With `+1` the bracket satisfies `ι_{[U,V]} = (−1)^{(p−1)q} 𝓛_U ι_V − ι_V 𝓛_U`.
pub const SN_GLOBAL_SIGN: i64 = 1;

impl MultiVector {
    /// Schouten–Nijenhuis bracket `[self, other]`, of degree `p + q − 1`.
    pub fn schouten(&self, other: &MultiVector) -> Result<MultiVector> {
        if self.chart() != other.chart() {
            return Err(ExteriorError::ChartMismatch);
        }
        let (p, q) = (self.degree(), other.degree());
        let chart = self.chart().clone();
        if p + q == 0 {
            return Ok(MultiVector::zero(&chart, 0));
        }
        let degree = p + q - 1;
        let mut out = MultiVector::zero(&chart, degree);
        if degree > chart.dimension() {
            return Ok(out);
        }
        // graded sign of the second sum: (−1)^{(p−1)(q−1)} with p−1, q−1 possibly −1
        let twist = if (p + 1) * (q + 1) % 2 == 0 { 1 } else { -1 };
        raw_half(self, other, 1, &mut out);
        raw_half(other, self, -twist, &mut out);
        Ok(if SN_GLOBAL_SIGN == 1 { out } else { out.neg() })
    }
}

/// Adds `sign · Σ_i (∂^R U/∂θ_i)(∂V/∂x^i)` to `out`.
fn raw_half(u: &MultiVector, v: &MultiVector, sign: i64, out: &mut MultiVector) {
    let chart = u.chart();
    for (ub, uc) in u.terms() {
        for i in ub.indices() {
            let (rs, rest) = ub.right_remove(i).unwrap();
            let name = chart.coordinate(i);
            for (vb, vc) in v.terms() {
                if !vc.mentions(name) {
                    continue;
                }
                let Some(ws) = rest.wedge_sign(*vb) else { continue };
                let dv = vc.partial(name);
                let s = sign * rs as i64 * ws as i64;
                let k: Coefficient = if s > 0 { dv } else { -dv };
                out.add_scaled_term(rest.union(*vb), uc, &k);
            }
        }
    }
}

