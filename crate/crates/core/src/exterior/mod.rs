//! Charts, differential forms, multivector fields and the calculus operators
//! acting on them.
//!
//! Forms and multivectors share one sparse representation, [`Graded`], keyed
//! by [`Blade`] (a strictly increasing index tuple stored as a bit set).

mod blade;
mod calculus;
mod json;
mod pullback;
mod render;

pub use blade::Blade;
pub use calculus::SN_GLOBAL_SIGN;
pub use json::{ChartJson, TensorJson, TermJson};
pub use pullback::PolyMap;
pub use render::{latex_coefficient, plain_coefficient};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use thiserror::Error;

use crate::coeffring::{CoeffError, Coefficient, Rational, Var};

/// Largest supported chart dimension; blades are 64-bit sets.
pub const MAX_DIMENSION: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("objects live on different charts")]
    ChartMismatch,
    #[error("{op}: degree {got} is not admissible (expected {expected})")]
    Degree { op: &'static str, expected: String, got: usize },
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("coordinate `{0}` carries a negative power but is not flagged nonvanishing")]
    NotNonvanishing(String),
    #[error("malformed interchange data: {0}")]
    Interchange(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

pub type Result<T> = std::result::Result<T, ExteriorError>;

#[derive(Debug)]
struct ChartData {
    coordinates: Vec<Var>,
    nonvanishing: BTreeSet<Var>,
    index: HashMap<Var, usize>,
}

/// Ordered coordinate names with the subset allowed to appear with negative
/// powers. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Chart(Arc<ChartData>);

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.coordinates == other.0.coordinates
                && self.0.nonvanishing == other.0.nonvanishing)
    }
}

impl Eq for Chart {}

impl Chart {
    pub fn new<S: AsRef<str>>(coordinates: &[S], nonvanishing: &[S]) -> Result<Chart> {
        let coords: Vec<Var> = coordinates.iter().map(|s| Var::from(s.as_ref())).collect();
        if coords.len() > MAX_DIMENSION {
            return Err(ExteriorError::InvalidChart(format!(
                "dimension {} exceeds {MAX_DIMENSION}",
                coords.len()
            )));
        }
        let mut index = HashMap::new();
        for (k, c) in coords.iter().enumerate() {
            let valid = c.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic())
                && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            if !valid {
                return Err(ExteriorError::InvalidChart(format!("bad coordinate name `{c}`")));
            }
            if index.insert(c.clone(), k).is_some() {
                return Err(ExteriorError::InvalidChart(format!("duplicate coordinate `{c}`")));
            }
        }
        let mut nv = BTreeSet::new();
        for s in nonvanishing {
            let v = Var::from(s.as_ref());
            if !index.contains_key(&v) {
                return Err(ExteriorError::InvalidChart(format!(
                    "nonvanishing coordinate `{v}` is not a coordinate"
                )));
            }
            nv.insert(v);
        }
        Ok(Chart(Arc::new(ChartData { coordinates: coords, nonvanishing: nv, index })))
    }

    pub fn dimension(&self) -> usize {
        self.0.coordinates.len()
    }

    pub fn coordinates(&self) -> &[Var] {
        &self.0.coordinates
    }

    pub fn coordinate(&self, k: usize) -> &str {
        &self.0.coordinates[k]
    }

    pub fn nonvanishing(&self) -> &BTreeSet<Var> {
        &self.0.nonvanishing
    }

    pub fn is_nonvanishing(&self, name: &str) -> bool {
        self.0.nonvanishing.contains(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn require_index(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| ExteriorError::UnknownCoordinate(name.to_string()))
    }

    /// Chart with extra coordinates appended.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S], extra_nonvanishing: &[S]) -> Result<Chart> {
        let mut coords: Vec<String> = self.0.coordinates.iter().map(|c| c.to_string()).collect();
        coords.extend(extra.iter().map(|s| s.as_ref().to_string()));
        let mut nv: Vec<String> = self.0.nonvanishing.iter().map(|c| c.to_string()).collect();
        nv.extend(extra_nonvanishing.iter().map(|s| s.as_ref().to_string()));
        Chart::new(&coords, &nv)
    }

    /// Negative powers are admissible only on nonvanishing coordinates.
    /// Names outside the chart are treated as constant parameters.
    pub fn check_coefficient(&self, c: &Coefficient) -> Result<()> {
        for (m, _) in c.terms() {
            for (v, e) in m.powers() {
                if *e < 0 && !self.is_nonvanishing(v) {
                    return Err(ExteriorError::NotNonvanishing(v.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn is_unit(&self, c: &Coefficient) -> bool {
        c.is_unit(|v| self.is_nonvanishing(v))
    }

    pub fn inverse(&self, c: &Coefficient) -> Result<Coefficient> {
        Ok(c.inverse_unit(|v| self.is_nonvanishing(v))?)
    }

    /// Evaluates at a point that assigns every coordinate; nonvanishing
    /// coordinates must be assigned nonzero values.
    pub fn evaluate(&self, c: &Coefficient, point: &BTreeMap<String, Rational>) -> Result<Rational> {
        for v in &self.0.coordinates {
            match point.get(&**v) {
                None => return Err(CoeffError::Unassigned(v.to_string()).into()),
                Some(x) if num::Zero::is_zero(x) && self.is_nonvanishing(v) => {
                    return Err(CoeffError::ZeroDivision(v.to_string()).into())
                }
                _ => {}
            }
        }
        Ok(c.evaluate(point)?)
    }

    pub fn d(&self, name: &str) -> Result<DiffForm> {
        let k = self.require_index(name)?;
        Ok(DiffForm::basis(self, Blade::single(k)))
    }

    pub fn e(&self, name: &str) -> Result<MultiVector> {
        let k = self.require_index(name)?;
        Ok(MultiVector::basis(self, Blade::single(k)))
    }

    pub fn function(&self, c: Coefficient) -> DiffForm {
        DiffForm::scalar(self, c)
    }
}

/// Marker for the two graded kinds.
pub trait Kind: Clone + fmt::Debug + PartialEq + Eq + Default + Send + Sync + 'static {
    const NAME: &'static str;
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormKind;
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VectorKind;

impl Kind for FormKind {
    const NAME: &'static str = "form";
}
impl Kind for VectorKind {
    const NAME: &'static str = "multivector";
}

/// Homogeneous sparse element of the exterior algebra of either the cotangent
/// or the tangent bundle. Zero objects keep their degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graded<K: Kind> {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<Blade, Coefficient>,
    kind: PhantomData<K>,
}

pub type DiffForm = Graded<FormKind>;
pub type MultiVector = Graded<VectorKind>;

impl<K: Kind> Graded<K> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Graded { chart: chart.clone(), degree, terms: BTreeMap::new(), kind: PhantomData }
    }

    pub fn scalar(chart: &Chart, c: Coefficient) -> Self {
        Self::from_terms(chart, 0, [(Blade::EMPTY, c)])
    }

    pub fn basis(chart: &Chart, blade: Blade) -> Self {
        Self::from_terms(chart, blade.len(), [(blade, Coefficient::one())])
    }

    /// Basis element from coordinate names in the given order (sign applied).
    pub fn basis_named(chart: &Chart, names: &[&str]) -> Result<Self> {
        let mut acc = Self::scalar(chart, Coefficient::one());
        for n in names {
            let k = chart.require_index(n)?;
            acc = acc.wedge(&Self::basis(chart, Blade::single(k)))?;
        }
        Ok(acc)
    }

    pub fn from_terms<I: IntoIterator<Item = (Blade, Coefficient)>>(
        chart: &Chart,
        degree: usize,
        terms: I,
    ) -> Self {
        let mut out = Self::zero(chart, degree);
        for (b, c) in terms {
            debug_assert_eq!(b.len(), degree);
            out.add_term(b, &c);
        }
        out
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Coefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, b: Blade) -> Coefficient {
        self.terms.get(&b).cloned().unwrap_or_default()
    }

    /// Degree-0 value as a coefficient.
    pub fn as_scalar(&self) -> Option<Coefficient> {
        (self.degree == 0).then(|| self.get(Blade::EMPTY))
    }

    pub(crate) fn add_term(&mut self, b: Blade, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&b) {
            Some(existing) => {
                existing.add_assign_ref(c);
                if existing.is_zero() {
                    self.terms.remove(&b);
                }
            }
            None => {
                self.terms.insert(b, c.clone());
            }
        }
    }

    pub(crate) fn add_scaled_term(&mut self, b: Blade, c: &Coefficient, k: &Coefficient) {
        let entry = self.terms.entry(b).or_default();
        entry.add_scaled(c, k);
        if entry.is_zero() {
            self.terms.remove(&b);
        }
    }

    fn same_chart(&self, other_chart: &Chart) -> Result<()> {
        if &self.chart == other_chart {
            Ok(())
        } else {
            Err(ExteriorError::ChartMismatch)
        }
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        self.same_chart(&other.chart)?;
        if self.degree != other.degree {
            return Err(ExteriorError::Degree {
                op,
                expected: self.degree.to_string(),
                got: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(*b, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, k: &Coefficient) -> Self {
        self.map_coefficients(|c| c * k)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.map_coefficients(|c| c.scale_int(n))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (b, c) in &self.terms {
            out.add_term(*b, &f(c));
        }
        out
    }

    /// Fallible version of [`Graded::map_coefficients`].
    pub fn try_map_coefficients<E>(
        &self,
        f: impl Fn(&Coefficient) -> std::result::Result<Coefficient, E>,
    ) -> std::result::Result<Self, E> {
        let mut out = Self::zero(&self.chart, self.degree);
        for (b, c) in &self.terms {
            out.add_term(*b, &f(c)?);
        }
        Ok(out)
    }

    /// Exterior product; degrees beyond the dimension give the zero object.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_chart(&other.chart)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(&self.chart, degree);
        if degree > self.chart.dimension() {
            return Ok(out);
        }
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(sign) = a.wedge_sign(*b) {
                    let k = if sign > 0 { cb.clone() } else { -cb };
                    out.add_scaled_term(a.union(*b), ca, &k);
                }
            }
        }
        Ok(out)
    }

    /// Re-expresses on a chart that contains every coordinate of this one.
    pub fn transport(&self, target: &Chart) -> Result<Self> {
        let map: Vec<usize> = self
            .chart
            .coordinates()
            .iter()
            .map(|c| target.require_index(c))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(target, self.degree);
        for (b, c) in &self.terms {
            let mut acc = Self::scalar(target, c.clone());
            for k in b.indices() {
                acc = acc.wedge(&Self::basis(target, Blade::single(map[k])))?;
            }
            for (bb, cc) in acc.terms {
                out.add_term(bb, &cc);
            }
        }
        Ok(out)
    }

    /// Checks the Laurent admissibility of every coefficient.
    pub fn validate(&self) -> Result<()> {
        for c in self.terms.values() {
            self.chart.check_coefficient(c)?;
        }
        Ok(())
    }
}

impl MultiVector {
    /// Derivation action of a vector field on a function.
    pub fn apply(&self, f: &Coefficient) -> Result<Coefficient> {
        if self.degree != 1 {
            return Err(ExteriorError::Degree { op: "apply", expected: "1".into(), got: self.degree });
        }
        let mut out = Coefficient::zero();
        for (b, c) in &self.terms {
            let k = b.indices().next().unwrap();
            let df = f.partial(self.chart.coordinate(k));
            out.add_scaled(c, &df);
        }
        Ok(out)
    }
}

impl<K: Kind> fmt::Display for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::plain(self))
    }
}
