use std::collections::BTreeMap;

use super::{Chart, DiffForm, ExteriorError, Result};
use crate::coeffring::{Coefficient, Var};

/// Polynomial map between charts: one component over `source` per
/// coordinate of `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    source: Chart,
    target: Chart,
    components: Vec<Coefficient>,
}

impl PolyMap {
    pub fn new(source: &Chart, target: &Chart, components: Vec<Coefficient>) -> Result<PolyMap> {
        if components.len() != target.dimension() {
            return Err(ExteriorError::Interchange(format!(
                "map has {} components, target has dimension {}",
                components.len(),
                target.dimension()
            )));
        }
        for c in &components {
            source.check_coefficient(c)?;
        }
        Ok(PolyMap { source: source.clone(), target: target.clone(), components })
    }

    pub fn identity(chart: &Chart) -> PolyMap {
        let components = chart.coordinates().iter().map(|c| Coefficient::var(c)).collect();
        PolyMap { source: chart.clone(), target: chart.clone(), components }
    }

    /// Projection from a chart onto a chart whose coordinates it contains.
    pub fn projection(source: &Chart, target: &Chart) -> Result<PolyMap> {
        for c in target.coordinates() {
            source.require_index(c)?;
        }
        let components = target.coordinates().iter().map(|c| Coefficient::var(c)).collect();
        Ok(PolyMap { source: source.clone(), target: target.clone(), components })
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[Coefficient] {
        &self.components
    }

    /// Composition `f ∘ φ` for a scalar on the target.
    pub fn compose(&self, f: &Coefficient) -> Result<Coefficient> {
        let images: BTreeMap<Var, Coefficient> = self
            .target
            .coordinates()
            .iter()
            .cloned()
            .zip(self.components.iter().cloned())
            .collect();
        let src = &self.source;
        Ok(f.substitute(&images, &|v: &str| src.is_nonvanishing(v))?)
    }

    pub fn pullback(&self, form: &DiffForm) -> Result<DiffForm> {
        if form.chart() != &self.target {
            return Err(ExteriorError::ChartMismatch);
        }
        let differentials: Vec<DiffForm> = self
            .components
            .iter()
            .map(|c| DiffForm::scalar(&self.source, c.clone()).d())
            .collect();
        let mut out = DiffForm::zero(&self.source, form.degree());
        for (b, c) in form.terms() {
            let mut acc = DiffForm::scalar(&self.source, self.compose(c)?);
            for k in b.indices() {
                acc = acc.wedge(&differentials[k])?;
            }
            for (bb, cc) in acc.terms() {
                out.add_term(*bb, cc);
            }
        }
        Ok(out)
    }
}
