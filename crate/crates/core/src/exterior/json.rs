//! JSON interchange: `{kind, degree, chart, terms: [{indices, coeff}]}`.

use serde::{Deserialize, Serialize};

use super::{Blade, Chart, ExteriorError, Graded, Kind, Result};
use crate::coeffring::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartJson {
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub nonvanishing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub kind: String,
    pub degree: usize,
    pub chart: ChartJson,
    pub terms: Vec<TermJson>,
}

impl From<&Chart> for ChartJson {
    fn from(c: &Chart) -> Self {
        ChartJson {
            coordinates: c.coordinates().iter().map(|v| v.to_string()).collect(),
            nonvanishing: c.nonvanishing().iter().map(|v| v.to_string()).collect(),
        }
    }
}

impl TryFrom<&ChartJson> for Chart {
    type Error = ExteriorError;
    fn try_from(c: &ChartJson) -> Result<Chart> {
        Chart::new(&c.coordinates, &c.nonvanishing)
    }
}

impl<K: Kind> Graded<K> {
    /// Canonical ordering on emit.
    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            kind: K::NAME.to_string(),
            degree: self.degree(),
            chart: self.chart().into(),
            terms: self
                .terms()
                .map(|(b, c)| TermJson { indices: b.indices().collect(), coeff: c.to_string() })
                .collect(),
        }
    }

    /// Accepts terms in any order and with unsorted indices (sign applied).
    pub fn from_json(j: &TensorJson, chart: Option<&Chart>) -> Result<Self> {
        if j.kind != K::NAME {
            return Err(ExteriorError::Interchange(format!(
                "expected kind `{}`, found `{}`",
                K::NAME,
                j.kind
            )));
        }
        let own = Chart::try_from(&j.chart)?;
        let chart = match chart {
            Some(c) if c == &own => c.clone(),
            Some(_) => return Err(ExteriorError::ChartMismatch),
            None => own,
        };
        let mut out = Self::zero(&chart, j.degree);
        for t in &j.terms {
            if t.indices.len() != j.degree {
                return Err(ExteriorError::Interchange(format!(
                    "term {:?} does not have degree {}",
                    t.indices, j.degree
                )));
            }
            if t.indices.iter().any(|&k| k >= chart.dimension()) {
                return Err(ExteriorError::Interchange(format!("index out of range in {:?}", t.indices)));
            }
            let c: Coefficient = t.coeff.parse()?;
            chart.check_coefficient(&c)?;
            let mut acc = Self::scalar(&chart, c);
            for &k in &t.indices {
                acc = acc.wedge(&Self::basis(&chart, Blade::single(k)))?;
            }
            for (b, c) in acc.terms() {
                out.add_term(*b, c);
            }
        }
        Ok(out)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("tensor serializes")
    }

    pub fn from_json_str(s: &str, chart: Option<&Chart>) -> Result<Self> {
        let j: TensorJson =
            serde_json::from_str(s).map_err(|e| ExteriorError::Interchange(e.to_string()))?;
        Self::from_json(&j, chart)
    }
}
