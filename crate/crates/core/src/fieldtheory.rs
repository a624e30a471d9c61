//! Action-dependent field theory on the canonical multicontact phase space
//! `(x^μ, y^i, p, p^μ_i, s^μ)` with
//! `Θ = ds^μ∧dⁿ⁻¹x_μ − p dⁿx − p^μ_i dy^i∧dⁿ⁻¹x_μ`, where
//! `dⁿ⁻¹x_μ = ι_{∂_{x^μ}}dⁿx`.
//!
//! Coordinate names: `x0…`, `y` (one field) or `y0…`, `p`, `p0…` (one field)
//! or `p{μ}_{i}`, and `s0…`. Sections are modelled by first-order jet
//! symbols `{c}_x{ν}` standing for `∂c/∂x^ν`.

use std::collections::BTreeMap;

use crate::coeffring::{ratio, Coefficient, Var};
use crate::elimination::{assemble, blades, contraction_columns, LinearSystem, Solution};
use crate::exterior::{Chart, DiffForm, MultiVector};
use crate::structures::{
    reduce_modulo, span_membership, ConformalData, KernelOf, NFormStructure, Result, StructureError,
};

/// Base dimension `n` and number of fields `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseSpaceSpec {
    n: usize,
    m: usize,
}

impl PhaseSpaceSpec {
    pub fn new(n: usize, m: usize) -> Result<PhaseSpaceSpec> {
        if n < 2 || m < 1 {
            return Err(StructureError::Domain(format!("need n >= 2 and m >= 1, got n = {n}, m = {m}")));
        }
        Ok(PhaseSpaceSpec { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x(&self, mu: usize) -> String {
        format!("x{mu}")
    }

    pub fn y(&self, i: usize) -> String {
        if self.m == 1 {
            "y".into()
        } else {
            format!("y{i}")
        }
    }

    pub fn energy(&self) -> String {
        "p".into()
    }

    pub fn momentum(&self, mu: usize, i: usize) -> String {
        if self.m == 1 {
            format!("p{mu}")
        } else {
            format!("p{mu}_{i}")
        }
    }

    pub fn s(&self, mu: usize) -> String {
        format!("s{mu}")
    }

    /// All coordinates in chart order.
    pub fn coordinates(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..self.n).map(|mu| self.x(mu)).collect();
        out.extend((0..self.m).map(|i| self.y(i)));
        out.push(self.energy());
        for mu in 0..self.n {
            out.extend((0..self.m).map(|i| self.momentum(mu, i)));
        }
        out.extend((0..self.n).map(|mu| self.s(mu)));
        out
    }

    /// Coordinates other than the `x^μ`.
    pub fn fiber_coordinates(&self) -> Vec<String> {
        self.coordinates().split_off(self.n)
    }

    /// Jet symbol for `∂c/∂x^ν`.
    pub fn jet(&self, coordinate: &str, nu: usize) -> String {
        format!("{coordinate}_x{nu}")
    }
}

/// The canonical structure together with its naming scheme.
#[derive(Debug, Clone)]
pub struct CanonicalStructure {
    spec: PhaseSpaceSpec,
    structure: NFormStructure,
}

pub fn build_canonical(spec: PhaseSpaceSpec) -> Result<CanonicalStructure> {
    let chart = Chart::new(&spec.coordinates(), &[])?;
    let volume = volume_on(&chart, spec)?;
    let mut theta = volume.scale(&-Coefficient::var(&spec.energy()));
    for mu in 0..spec.n {
        let h = volume.interior(&chart.e(&spec.x(mu))?)?;
        theta = theta.add(&chart.d(&spec.s(mu))?.wedge(&h)?)?;
        for i in 0..spec.m {
            let t = chart.d(&spec.y(i))?.wedge(&h)?.scale(&Coefficient::var(&spec.momentum(mu, i)));
            theta = theta.sub(&t)?;
        }
    }
    let structure = NFormStructure::new(theta);
    if !structure.is_multicontact()?.multicontact {
        return Err(StructureError::Domain("canonical form failed the multicontact test".into()));
    }
    Ok(CanonicalStructure { spec, structure })
}

fn volume_on(chart: &Chart, spec: PhaseSpaceSpec) -> Result<DiffForm> {
    let names: Vec<String> = (0..spec.n).map(|mu| spec.x(mu)).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(DiffForm::basis_named(chart, &refs)?)
}

impl CanonicalStructure {
    pub fn spec(&self) -> PhaseSpaceSpec {
        self.spec
    }

    pub fn structure(&self) -> &NFormStructure {
        &self.structure
    }

    pub fn chart(&self) -> &Chart {
        self.structure.chart()
    }

    /// `dx⁰∧…∧dx^{n−1}`.
    pub fn volume(&self) -> Result<DiffForm> {
        volume_on(self.chart(), self.spec)
    }

    /// `dⁿ⁻¹x_μ = ι_{∂_{x^μ}}dⁿx`.
    pub fn hyper(&self, mu: usize) -> Result<DiffForm> {
        Ok(self.volume()?.interior(&self.chart().e(&self.spec.x(mu))?)?)
    }

    fn var(&self, name: &str) -> Coefficient {
        Coefficient::var(name)
    }

    fn e(&self, name: &str) -> Result<MultiVector> {
        Ok(self.chart().e(name)?)
    }
}

/// Vertical conformal field built from `F(x, y)` and `G^μ` with
/// `∂G^μ/∂p^ν_i = δ^μ_ν c^i`, the common value `c^i` read at any fixed `μ`.
pub fn vertical_conformal_from_fg(
    c: &CanonicalStructure,
    f: &Coefficient,
    g: &[Coefficient],
) -> Result<ConformalData> {
    let spec = c.spec;
    if g.len() != spec.n {
        return Err(StructureError::Degree(format!("need {} components G^mu, got {}", spec.n, g.len())));
    }
    for v in f.variables() {
        let allowed = (0..spec.n).any(|mu| *v == *spec.x(mu)) || (0..spec.m).any(|i| *v == *spec.y(i));
        if c.chart().index_of(&v).is_some() && !allowed {
            return Err(StructureError::Domain(format!("F must depend on x and y only; it mentions {v}")));
        }
    }
    let mut forbidden = vec![spec.energy()];
    forbidden.extend((0..spec.n).map(|mu| spec.s(mu)));
    for (mu, gm) in g.iter().enumerate() {
        if let Some(v) = forbidden.iter().find(|v| gm.mentions(v)) {
            return Err(StructureError::Domain(format!("G^{mu} must not depend on {v}")));
        }
    }
    // c^i = ∂G^0/∂p^0_i, and ∂G^μ/∂p^ν_i = δ^μ_ν c^i
    let cvec: Vec<Coefficient> = (0..spec.m).map(|i| g[0].partial(&spec.momentum(0, i))).collect();
    for (mu, gm) in g.iter().enumerate() {
        for nu in 0..spec.n {
            for (i, ci) in cvec.iter().enumerate() {
                let d = gm.partial(&spec.momentum(nu, i));
                let expected = if mu == nu { ci.clone() } else { Coefficient::zero() };
                if d != expected {
                    return Err(StructureError::Domain(format!(
                        "constraint dG^mu/dp^nu_i = delta c^i fails at (mu, nu, i) = ({mu}, {nu}, {i})"
                    )));
                }
            }
        }
    }
    let mut x = MultiVector::zero(c.chart(), 1);
    let mut alpha = DiffForm::zero(c.chart(), spec.n - 1);
    let p = c.var(&spec.energy());
    let mut dp_coeff = f * &p;
    for (mu, g_mu) in g.iter().enumerate().take(spec.n) {
        let s = c.var(&spec.s(mu));
        let mut a = &(f * &s) + g_mu;
        for (i, ci) in cvec.iter().enumerate() {
            a = &a - &(&c.var(&spec.momentum(mu, i)) * ci);
        }
        x = x.add(&c.e(&spec.s(mu))?.scale(&a))?;
        for (i, ci) in cvec.iter().enumerate() {
            let y = spec.y(i);
            let pm = spec.momentum(mu, i);
            let coeff = &(&(&f.partial(&y) * &s) + &g_mu.partial(&y)) + &(f * &c.var(&pm));
            x = x.add(&c.e(&pm)?.scale(&coeff))?;
            if mu == 0 {
                x = x.sub(&c.e(&y)?.scale(ci))?;
            }
        }
        let xm = spec.x(mu);
        dp_coeff = &dp_coeff + &(&(&f.partial(&xm) * &s) + &g_mu.partial(&xm));
        let am = -&(&(f * &s) + g_mu);
        alpha = alpha.add(&c.hyper(mu)?.scale(&am))?;
    }
    x = x.add(&c.e(&spec.energy())?.scale(&dp_coeff))?;
    c.structure.make_conformal_data(alpha, x, MultiVector::scalar(c.chart(), f.clone()))
}

/// Label of an elementary conformal Hamiltonian form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elementary {
    /// `s^μ dⁿ⁻¹x_μ`.
    Action,
    /// `y^i dⁿ⁻¹x_μ`.
    Field { i: usize, mu: usize },
    /// `p^μ_i dⁿ⁻¹x_μ`.
    Momentum { i: usize },
    /// `dⁿ⁻¹x_μ`.
    Hyper { mu: usize },
}

impl Elementary {
    pub fn all(spec: PhaseSpaceSpec) -> Vec<Elementary> {
        let mut out = vec![Elementary::Action];
        for i in 0..spec.m {
            for mu in 0..spec.n {
                out.push(Elementary::Field { i, mu });
            }
        }
        out.extend((0..spec.m).map(|i| Elementary::Momentum { i }));
        out.extend((0..spec.n).map(|mu| Elementary::Hyper { mu }));
        out
    }

    pub fn label(&self) -> String {
        match self {
            Elementary::Action => "s^mu d^{n-1}x_mu".into(),
            Elementary::Field { i, mu } => format!("y^{i} d^{{n-1}}x_{mu}"),
            Elementary::Momentum { i } => format!("p^mu_{i} d^{{n-1}}x_mu"),
            Elementary::Hyper { mu } => format!("d^{{n-1}}x_{mu}"),
        }
    }

    fn fg(&self, c: &CanonicalStructure) -> (Coefficient, Vec<Coefficient>) {
        let spec = c.spec;
        let zero = || vec![Coefficient::zero(); spec.n];
        match *self {
            Elementary::Action => (Coefficient::int(-1), zero()),
            Elementary::Field { i, mu } => {
                let mut g = zero();
                g[mu] = -c.var(&spec.y(i));
                (Coefficient::zero(), g)
            }
            Elementary::Momentum { i } => {
                (Coefficient::zero(), (0..spec.n).map(|mu| -c.var(&spec.momentum(mu, i))).collect())
            }
            Elementary::Hyper { mu } => {
                let mut g = zero();
                g[mu] = Coefficient::int(-1);
                (Coefficient::zero(), g)
            }
        }
    }

    pub fn data(&self, c: &CanonicalStructure) -> Result<ConformalData> {
        let (f, g) = self.fg(c);
        vertical_conformal_from_fg(c, &f, &g)
    }
}

/// One Table-1 style row.
#[derive(Debug, Clone)]
pub struct ElementaryRow {
    pub label: Elementary,
    pub data: ConformalData,
}

/// Bracket of two elementary forms with the printed value it is compared with.
#[derive(Debug, Clone)]
pub struct BracketCell {
    pub row: Elementary,
    pub column: Elementary,
    pub computed: DiffForm,
    pub printed: DiffForm,
    pub matches: bool,
}

/// Printed reference values; dummy indices on the printed free index are
/// read as the free index of the row or column that carries one.
fn printed_entry(c: &CanonicalStructure, a: Elementary, b: Elementary) -> Result<DiffForm> {
    use Elementary::*;
    let zero = DiffForm::zero(c.chart(), c.spec.n - 1);
    Ok(match (a, b) {
        (Action, Field { i, mu }) => c.hyper(mu)?.scale(&c.var(&c.spec.y(i))),
        (Action, Hyper { mu }) => c.hyper(mu)?,
        (Field { i, mu }, Action) => c.hyper(mu)?.scale(&-c.var(&c.spec.y(i))),
        (Field { i, mu }, Momentum { i: j }) if i == j => c.hyper(mu)?,
        (Momentum { i }, Field { i: j, mu }) if i == j => c.hyper(mu)?.neg(),
        (Hyper { mu }, Action) => c.hyper(mu)?.neg(),
        _ => zero,
    })
}

/// Elementary rows and all their pairwise brackets, each compared with the
/// printed table.
pub fn elementary_tables(c: &CanonicalStructure) -> Result<(Vec<ElementaryRow>, Vec<BracketCell>)> {
    let labels = Elementary::all(c.spec);
    let rows: Vec<ElementaryRow> = labels
        .iter()
        .map(|l| Ok(ElementaryRow { label: *l, data: l.data(c)? }))
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for a in &rows {
        for b in &rows {
            let computed = c
                .structure
                .jacobi_bracket(&a.data, &b.data)?
                .map(|d| d.alpha().clone())
                .unwrap_or_else(|| DiffForm::zero(c.chart(), c.spec.n - 1));
            let printed = printed_entry(c, a.label, b.label)?;
            let matches = computed == printed;
            cells.push(BracketCell { row: a.label, column: b.label, computed, printed, matches });
        }
    }
    Ok((rows, cells))
}

/// `R̃ = (1/n) Σ R_i ⊗ u^i` with `R_i` a basis of `ker₁dΘ` and
/// `ι_{u^j}ι_{R_i}Θ = δ^j_i`.
#[derive(Debug, Clone)]
pub struct RefinedReeb {
    n: usize,
    pairs: Vec<(MultiVector, MultiVector)>,
}

impl RefinedReeb {
    pub fn pairs(&self) -> &[(MultiVector, MultiVector)] {
        &self.pairs
    }

    /// `(1/n) Σ R_i ∧ u^i`.
    pub fn assembled(&self, chart: &Chart) -> Result<MultiVector> {
        let mut out = MultiVector::zero(chart, self.n);
        for (r, u) in &self.pairs {
            out = out.add(&r.wedge(u)?)?;
        }
        Ok(out.scale(&Coefficient::constant(ratio(1, self.n as i64))))
    }

    /// `Σ ι_{R_i}ι_{u^i} β`: the dual factor contracts first.
    pub fn contract(&self, beta: &DiffForm) -> Result<DiffForm> {
        let mut out: Option<DiffForm> = None;
        for (r, u) in &self.pairs {
            let t = beta.interior(u)?.interior(r)?;
            out = Some(match out {
                None => t,
                Some(acc) => acc.add(&t)?,
            });
        }
        let out = out.ok_or_else(|| StructureError::Domain("refined Reeb has no components".into()))?;
        Ok(out.scale(&Coefficient::constant(ratio(1, self.n as i64))))
    }
}

/// `Im ♭_Θ`: the forms `ι_RΘ` for `R` in the `ker₁dΘ` basis.
pub fn flat_image(s: &NFormStructure) -> Result<Vec<DiffForm>> {
    s.kernel_basis(1, KernelOf::DTheta)?
        .iter()
        .map(|r| Ok(s.theta().interior(r)?))
        .collect()
}

pub fn refined_reeb(s: &NFormStructure) -> Result<RefinedReeb> {
    let n = s.n();
    let kernel = s.kernel_basis(1, KernelOf::DTheta)?;
    let images = flat_image(s)?;
    let chart = s.chart();
    let basis = blades(chart.dimension(), n - 1);
    let mut pairs = Vec::new();
    for (i, r) in kernel.iter().enumerate() {
        let mut sys = LinearSystem::new(basis.len());
        for (k, alpha) in images.iter().enumerate() {
            let cols: Vec<DiffForm> = basis
                .iter()
                .map(|b| alpha.interior(&MultiVector::basis(chart, *b)))
                .collect::<std::result::Result<_, _>>()?;
            let rhs = DiffForm::scalar(chart, Coefficient::int(i64::from(k == i)));
            sys.append(LinearSystem::from_columns(&cols, Some(&rhs)));
        }
        match sys.solve(chart) {
            Solution::Solved { particular, .. } => pairs.push((r.clone(), assemble(chart, n - 1, &basis, &particular))),
            _ => return Err(StructureError::Domain("no dual multivectors for Im flat".into())),
        }
    }
    let reeb = RefinedReeb { n, pairs };
    let full = reeb.assembled(chart)?;
    if s.theta().interior(&full)?.as_scalar().is_none_or(|c| !c.is_one()) {
        return Err(StructureError::Domain("refined Reeb does not contract theta to 1".into()));
    }
    if !s.dtheta().interior(&full)?.is_zero() {
        return Err(StructureError::Domain("refined Reeb does not annihilate dtheta".into()));
    }
    Ok(reeb)
}

/// `ι_v h ∈ Im ♭_Θ` for every coordinate field `v`.
pub fn hamiltonian_subbundle_check(s: &NFormStructure, h: &DiffForm) -> Result<bool> {
    Ok(first_non_hamiltonian_direction(s, h)?.is_none())
}

fn first_non_hamiltonian_direction(s: &NFormStructure, h: &DiffForm) -> Result<Option<usize>> {
    if h.degree() != s.n() {
        return Err(StructureError::Degree(format!("Hamiltonians are {}-forms, got {}", s.n(), h.degree())));
    }
    let image = flat_image(s)?;
    let (_, cols) = contraction_columns(h, 1);
    for (k, col) in cols.iter().enumerate() {
        if span_membership(&image, col)?.is_none() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Outcome of the good-Hamiltonian test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessReport {
    pub good: bool,
    /// Index into the `ker₁dΘ` basis whose contraction leaves `ℋ`.
    pub failing_kernel_vector: Option<usize>,
}

/// `ι_R dh ∈ ℋ` for every `R` in the `ker₁dΘ` basis.
pub fn good_hamiltonian_check(s: &NFormStructure, h: &DiffForm) -> Result<GoodnessReport> {
    if let Some(k) = first_non_hamiltonian_direction(s, h)? {
        return Err(StructureError::Domain(format!(
            "h is not in the Hamiltonian subbundle (contraction by {} leaves Im flat)",
            s.chart().coordinate(k)
        )));
    }
    let dh = h.d();
    for (i, r) in s.kernel_basis(1, KernelOf::DTheta)?.iter().enumerate() {
        if !hamiltonian_subbundle_check(s, &dh.interior(r)?)? {
            return Ok(GoodnessReport { good: false, failing_kernel_vector: Some(i) });
        }
    }
    Ok(GoodnessReport { good: true, failing_kernel_vector: None })
}

/// `σ_h = n·ι_{R̃}dh`.
pub fn dissipation_form(s: &NFormStructure, h: &DiffForm) -> Result<DiffForm> {
    let report = good_hamiltonian_check(s, h)?;
    if !report.good {
        return Err(StructureError::Domain("dissipation form needs a good Hamiltonian".into()));
    }
    let reeb = refined_reeb(s)?;
    Ok(reeb.contract(&h.d())?.scale_int(s.n() as i64))
}

/// `H(x, y, p^μ_i, s^μ)` with induced `h̃ = (p + H)dⁿx`.
#[derive(Debug, Clone)]
pub struct HamiltonianSection {
    hamiltonian: Coefficient,
    form: DiffForm,
}

impl HamiltonianSection {
    pub fn new(c: &CanonicalStructure, hamiltonian: Coefficient) -> Result<HamiltonianSection> {
        let energy = c.spec.energy();
        if hamiltonian.mentions(&energy) {
            return Err(StructureError::Domain("H must not depend on p".into()));
        }
        let form = c.volume()?.scale(&(&c.var(&energy) + &hamiltonian));
        form.validate()?;
        if !hamiltonian_subbundle_check(&c.structure, &form)? {
            return Err(StructureError::Domain("(p + H) d^n x left the Hamiltonian subbundle".into()));
        }
        Ok(HamiltonianSection { hamiltonian, form })
    }

    pub fn hamiltonian(&self) -> &Coefficient {
        &self.hamiltonian
    }

    pub fn form(&self) -> &DiffForm {
        &self.form
    }
}

/// A section `x ↦ (x, y(x), p(x), p^μ_i(x), s^μ(x))` through its jets.
#[derive(Debug, Clone)]
pub struct JetSection {
    spec: PhaseSpaceSpec,
    phase: Chart,
    base: Chart,
    /// Jet symbols per phase coordinate index; empty for the `x^μ`.
    jets: Vec<Vec<Var>>,
}

impl JetSection {
    pub fn new(c: &CanonicalStructure) -> Result<JetSection> {
        let spec = c.spec;
        let names: Vec<String> = (0..spec.n).map(|mu| spec.x(mu)).collect();
        let base = Chart::new(&names, &[])?;
        let jets = c
            .chart()
            .coordinates()
            .iter()
            .enumerate()
            .map(|(k, name)| {
                if k < spec.n {
                    Vec::new()
                } else {
                    (0..spec.n).map(|nu| Var::from(spec.jet(name, nu).as_str())).collect()
                }
            })
            .collect();
        Ok(JetSection { spec, phase: c.chart().clone(), base, jets })
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    /// `(symbol, meaning)` pairs for every jet symbol.
    pub fn legend(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (k, js) in self.jets.iter().enumerate() {
            for (nu, j) in js.iter().enumerate() {
                out.push((j.to_string(), format!("d{}/d{}", self.phase.coordinate(k), self.spec.x(nu))));
            }
        }
        out
    }

    /// `ψ*`: `dx^μ ↦ dx^μ`, `dc ↦ Σ_ν c_ν dx^ν`, coefficients kept as symbols.
    pub fn pullback(&self, form: &DiffForm) -> Result<DiffForm> {
        if form.chart() != &self.phase {
            return Err(crate::exterior::ExteriorError::ChartMismatch.into());
        }
        let images: Vec<DiffForm> = (0..self.phase.dimension())
            .map(|k| {
                if k < self.spec.n {
                    Ok(self.base.d(&self.spec.x(k))?)
                } else {
                    let mut acc = DiffForm::zero(&self.base, 1);
                    for (nu, j) in self.jets[k].iter().enumerate() {
                        acc = acc.add(&self.base.d(&self.spec.x(nu))?.scale(&Coefficient::var(j)))?;
                    }
                    Ok(acc)
                }
            })
            .collect::<Result<_>>()?;
        let mut out = DiffForm::zero(&self.base, form.degree());
        for (b, c) in form.terms() {
            let mut acc = DiffForm::scalar(&self.base, c.clone());
            for k in b.indices() {
                acc = acc.wedge(&images[k])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Coefficient of `dⁿx` in `ψ*β` for an n-form `β`.
    pub fn top_coefficient(&self, beta: &DiffForm) -> Result<Coefficient> {
        if beta.degree() != self.spec.n {
            return Err(StructureError::Degree(format!(
                "top coefficient needs an {}-form, got degree {}",
                self.spec.n,
                beta.degree()
            )));
        }
        let pulled = self.pullback(beta)?;
        Ok(pulled.get(crate::exterior::Blade::from_indices(0..self.spec.n).expect("distinct")))
    }

    fn jet(&self, name: &str, nu: usize) -> Coefficient {
        Coefficient::var(&self.spec.jet(name, nu))
    }
}

/// Hamilton–de Donder–Weyl system of a Hamiltonian section.
#[derive(Debug, Clone)]
pub struct HdwSystem {
    /// Every nonzero top coefficient of `ψ*(Θ + h)` and of
    /// `ψ*ι_{∂_k}(d + σ_h∧)(Θ + h)`, in coordinate order.
    pub raw: Vec<Coefficient>,
    /// `∂_μ s^μ − p^μ_i ∂H/∂p^μ_i + H`.
    pub action: Coefficient,
    /// `((i, μ), ∂y^i/∂x^μ − ∂H/∂p^μ_i)`.
    pub fields: Vec<((usize, usize), Coefficient)>,
    /// `(i, ∂_μ p^μ_i + ∂H/∂y^i + ∂H/∂s^μ p^μ_i)`.
    pub momenta: Vec<(usize, Coefficient)>,
    /// Substitution solving each normalized equation for its lead jet.
    reduction: BTreeMap<Var, Coefficient>,
    /// `(symbol, meaning)` for the jet symbols.
    pub legend: Vec<(String, String)>,
}

impl HdwSystem {
    /// Normal form modulo the ideal of the system; zero iff in the ideal.
    pub fn reduce(&self, c: &Coefficient) -> Result<Coefficient> {
        c.substitute(&self.reduction, &|_: &str| false).map_err(|e| StructureError::Domain(e.to_string()))
    }

    /// Normalized equations in family order: action, fields, momenta.
    pub fn equations(&self) -> Vec<Coefficient> {
        let mut out = vec![self.action.clone()];
        out.extend(self.fields.iter().map(|(_, e)| e.clone()));
        out.extend(self.momenta.iter().map(|(_, e)| e.clone()));
        out
    }
}

/// Emits the HDW system and the reduction that decides ideal membership.
pub fn hdw_residuals(c: &CanonicalStructure, section: &HamiltonianSection, jets: &JetSection) -> Result<HdwSystem> {
    let s = &c.structure;
    let spec = c.spec;
    let h = section.form();
    let sigma = dissipation_form(s, h)?;
    let total = s.theta().add(h)?;
    let big = total.d().add(&sigma.wedge(&total)?)?;
    let mut raw = Vec::new();
    let top = jets.top_coefficient(&total)?;
    if !top.is_zero() {
        raw.push(top.clone());
    }
    for name in c.chart().coordinates() {
        let e = c.chart().e(name)?;
        let r = jets.top_coefficient(&big.interior(&e)?)?;
        if !r.is_zero() {
            raw.push(r);
        }
    }
    let hh = section.hamiltonian();
    let mut reduction: BTreeMap<Var, Coefficient> = BTreeMap::new();
    let mut fields = Vec::new();
    for i in 0..spec.m {
        for mu in 0..spec.n {
            let y = spec.y(i);
            let hp = hh.partial(&spec.momentum(mu, i));
            fields.push(((i, mu), &jets.jet(&y, mu) - &hp));
            reduction.insert(Var::from(spec.jet(&y, mu).as_str()), hp);
        }
    }
    // ψ*(Θ + h) with the field equations substituted
    let mut action = hh.clone();
    for mu in 0..spec.n {
        action = &action + &jets.jet(&spec.s(mu), mu);
        for i in 0..spec.m {
            let pm = spec.momentum(mu, i);
            action = &action - &(&c.var(&pm) * &hh.partial(&pm));
        }
    }
    let lead = jets.jet(&spec.s(0), 0);
    reduction.insert(Var::from(spec.jet(&spec.s(0), 0).as_str()), &lead - &action);
    let mut momenta = Vec::new();
    for i in 0..spec.m {
        let mut eq = hh.partial(&spec.y(i));
        for mu in 0..spec.n {
            let pm = spec.momentum(mu, i);
            eq = &eq + &jets.jet(&pm, mu);
            eq = &eq + &(&hh.partial(&spec.s(mu)) * &c.var(&pm));
        }
        let pm0 = spec.momentum(0, i);
        let lead = jets.jet(&pm0, 0);
        reduction.insert(Var::from(spec.jet(&pm0, 0).as_str()), &lead - &eq);
        momenta.push((i, eq));
    }
    let system = HdwSystem { raw, action, fields, momenta, reduction, legend: jets.legend() };
    for r in &system.raw {
        let left = system.reduce(r)?;
        if !left.is_zero() {
            return Err(StructureError::Domain(format!(
                "pulled-back equation {r} is not generated by the normalized system (remainder {left})"
            )));
        }
    }
    for e in system.equations() {
        if !system.reduce(&e)?.is_zero() {
            return Err(StructureError::Domain(format!("normalized equation {e} does not reduce to zero")));
        }
    }
    Ok(system)
}

/// Evolution residual of an (n−1)-form along HDW solutions.
#[derive(Debug, Clone)]
pub struct EvolutionResidual {
    /// Top coefficient of `ψ*(dα + ℛ(dα)h + ι_X dh + σ_h∧α − σ_h∧ι_X h)`.
    pub residual: Coefficient,
    /// Its normal form modulo the HDW system.
    pub reduced: Coefficient,
}

/// `ℛ(dα)` is read off the witness as `−V_α`.
pub fn evolution_residual(
    c: &CanonicalStructure,
    section: &HamiltonianSection,
    a: &ConformalData,
    jets: &JetSection,
) -> Result<EvolutionResidual> {
    let s = &c.structure;
    if a.p() != 1 {
        return Err(StructureError::Degree(format!("evolution applies to (n-1)-forms; p = {}", a.p())));
    }
    let h = section.form();
    let sigma = dissipation_form(s, h)?;
    let reeb_da = a.v_field().as_scalar().unwrap_or_default().scale_int(-1);
    let x = a.x_field();
    let e = a
        .alpha()
        .d()
        .add(&h.scale(&reeb_da))?
        .add(&h.d().interior(x)?)?
        .add(&sigma.wedge(a.alpha())?)?
        .sub(&sigma.wedge(&h.interior(x)?)?)?;
    let residual = jets.top_coefficient(&e)?;
    let system = hdw_residuals(c, section, jets)?;
    let reduced = system.reduce(&residual)?;
    Ok(EvolutionResidual { residual, reduced })
}

/// Left side of the sufficient condition
/// `−(𝓛_X + ℛ(dα))h + (d + σ_h∧)ι_X h`.
pub fn dissipation_defect(s: &NFormStructure, h: &DiffForm, a: &ConformalData) -> Result<DiffForm> {
    if a.p() != 1 {
        return Err(StructureError::Degree(format!("dissipated forms have p = 1, got {}", a.p())));
    }
    let sigma = dissipation_form(s, h)?;
    let reeb_da = a.v_field().as_scalar().unwrap_or_default().scale_int(-1);
    let x = a.x_field();
    let ixh = h.interior(x)?;
    let lhs = h.lie(x)?.add(&h.scale(&reeb_da))?.neg();
    Ok(lhs.add(&ixh.d())?.add(&sigma.wedge(&ixh)?)?)
}

pub fn dissipated_check(s: &NFormStructure, h: &DiffForm, a: &ConformalData) -> Result<bool> {
    Ok(dissipation_defect(s, h, a)?.is_zero())
}

/// `ι_{R∧R'}Θ = 0` for all pairs of a `ker₁dΘ` basis.
pub fn variational_check(s: &NFormStructure) -> Result<bool> {
    let kernel = s.kernel_basis(1, KernelOf::DTheta)?;
    for (i, r) in kernel.iter().enumerate() {
        for rr in &kernel[i + 1..] {
            if !s.theta().interior(&r.wedge(rr)?)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Class representatives of `C_Θ(R_i, R_j) = ι_{R_i}dι_{R_j}Θ` modulo `Im ♭_Θ`.
#[derive(Debug, Clone)]
pub struct Distortion {
    pub table: Vec<Vec<DiffForm>>,
    pub all_zero: bool,
}

pub fn distortion(s: &NFormStructure) -> Result<Distortion> {
    if !variational_check(s)? {
        return Err(StructureError::Domain("distortion is defined on variational structures".into()));
    }
    let kernel = s.kernel_basis(1, KernelOf::DTheta)?;
    let image = flat_image(s)?;
    let mut table = Vec::new();
    for r in &kernel {
        let mut row = Vec::new();
        for rr in &kernel {
            let raw = s.theta().interior(rr)?.d().interior(r)?;
            row.push(reduce_modulo(&image, &raw)?);
        }
        table.push(row);
    }
    for (i, row) in table.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if *entry != table[j][i] {
                return Err(StructureError::Domain(format!("distortion is not symmetric at ({i}, {j})")));
            }
        }
    }
    let all_zero = table.iter().flatten().all(DiffForm::is_zero);
    Ok(Distortion { table, all_zero })
}

/// Representative of `𝓛_R ι_v h − ι_v dι_R h` modulo `Im ♭_Θ`.
pub fn gamma_obstruction(s: &NFormStructure, h: &DiffForm, r: &MultiVector, v: &MultiVector) -> Result<DiffForm> {
    if !hamiltonian_subbundle_check(s, h)? {
        return Err(StructureError::Domain("h is not in the Hamiltonian subbundle".into()));
    }
    if !s.dtheta().interior(r)?.is_zero() {
        return Err(StructureError::Domain("R is not in ker1 dtheta".into()));
    }
    let raw = h.interior(v)?.lie(r)?.sub(&h.interior(r)?.d().interior(v)?)?;
    reduce_modulo(&flat_image(s)?, &raw)
}

/// `F(x, y)` and `G^μ = g^μ(x, y) + Σ_i c^i(x, y) p^μ_i`, random.
pub fn random_vertical(c: &CanonicalStructure, rng: &mut crate::random::Sampler) -> Result<ConformalData> {
    let spec = c.spec;
    let mut base: Vec<String> = (0..spec.n).map(|mu| spec.x(mu)).collect();
    base.extend((0..spec.m).map(|i| spec.y(i)));
    let f = rng.polynomial(&base, 2, 2);
    let ci: Vec<Coefficient> = (0..spec.m).map(|_| rng.polynomial(&base, 1, 2)).collect();
    let g: Vec<Coefficient> = (0..spec.n)
        .map(|mu| {
            let mut gm = rng.polynomial(&base, 2, 2);
            for (i, cc) in ci.iter().enumerate() {
                gm = &gm + &(cc * &c.var(&spec.momentum(mu, i)));
            }
            gm
        })
        .collect();
    vertical_conformal_from_fg(c, &f, &g)
}
