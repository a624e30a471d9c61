//! `gj` subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::elaborate::{function, Env, Value};
use super::render::{render, Format, Item, Report};
use super::session::Session;
use super::{parse, CliError};
use crate::exterior::{Chart, DiffForm, MultiVector};
use crate::fieldtheory::{
    build_canonical, dissipated_check, dissipation_defect, dissipation_form, distortion, elementary_tables,
    hdw_residuals, variational_check, vertical_conformal_from_fg, CanonicalStructure, Elementary,
    HamiltonianSection, JetSection, PhaseSpaceSpec,
};
use crate::sharp::{z_membership, ZMembership};
use crate::structures::{ConformalData, Kernel, KernelOf, NFormStructure};
use crate::symplectization::Symplectization;

#[derive(Debug, Parser)]
#[command(name = "gj", version, about = "Exact calculus for multicontact n-forms and their graded Jacobi brackets")]
pub struct Cli {
    /// Session file holding the chart, the n-form and named objects.
    #[arg(long, global = true, default_value = "gj-session.json")]
    pub session: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a session with a fresh chart.
    Chart {
        #[command(subcommand)]
        action: ChartAction,
    },
    /// Set or show the session n-form.
    Theta {
        #[command(subcommand)]
        action: ThetaAction,
    },
    /// Bind a name to the value of an expression.
    Let {
        name: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Run a structural predicate on the session n-form.
    Check {
        #[command(subcommand)]
        what: CheckWhat,
    },
    /// Kernel of the n-form, its differential or both, in a given degree.
    Kernel {
        /// Multivector degree.
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Which form the fields must annihilate.
        #[arg(long, value_enum, default_value_t = KernelArg::Both)]
        of: KernelArg,
    },
    /// Conformal multivector fields.
    Conformal {
        #[command(subcommand)]
        action: ConformalAction,
    },
    /// Graded Jacobi bracket of two conformal data expressions.
    Bracket { a: String, b: String },
    /// Cup product of two conformal data expressions.
    Cup { a: String, b: String },
    /// Symplectization of the session n-form.
    Symplectize,
    /// Homogeneous lift of a conformal datum.
    Lift { a: String },
    /// Poisson bracket of the images of two conformal data.
    Poisson { a: String, b: String },
    /// Residual of the bracket correspondence under the symplectization.
    PsiCheck { a: String, b: String },
    /// Sharp and Reeb components of an n-form.
    Sharp {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Elementary conformal forms of the canonical structure and their brackets.
    Tables {
        /// Base dimension.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of fields.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Field equations of a Hamiltonian section on the canonical structure.
    Hdw {
        #[command(flatten)]
        canonical: CanonicalArgs,
    },
    /// Dissipation one-form of a Hamiltonian section.
    Sigma {
        #[command(flatten)]
        canonical: CanonicalArgs,
    },
    /// Whether a vertical conformal form is dissipated along a Hamiltonian section.
    Dissipated {
        #[command(flatten)]
        canonical: CanonicalArgs,
        /// `action`, `field:I:MU`, `momentum:I` or `hyper:MU`.
        #[arg(long, conflicts_with_all = ["f", "g"])]
        elementary: Option<String>,
        /// Scale part `F(x, y)` of the conformal field.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// Components `G^mu`, one flag per index.
        #[arg(long, allow_hyphen_values = true)]
        g: Vec<String>,
    },
    /// Distortion of the session n-form, or of the canonical one with `--n`.
    Distortion {
        /// Base dimension of the canonical structure.
        #[arg(long)]
        n: Option<usize>,
        /// Number of fields of the canonical structure.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Evaluate an expression and print it.
    Render {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChartAction {
    /// Start a new session; existing contents of the session file are replaced.
    New {
        /// Comma-separated coordinate names.
        #[arg(long, value_delimiter = ',', required = true)]
        coords: Vec<String>,
        /// Coordinates known not to vanish.
        #[arg(long, value_delimiter = ',')]
        nonvanishing: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ThetaAction {
    /// Replace the session n-form.
    Set {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Print the session n-form.
    Show,
}

#[derive(Debug, Subcommand)]
pub enum CheckWhat {
    /// Whether ker1 theta and ker1 dtheta meet trivially with ker1 dtheta nonzero.
    Multicontact,
    /// Whether theta vanishes on pairs from ker1 dtheta.
    Variational,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Theta,
    Dtheta,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum ConformalAction {
    /// Find the factor of a multivector field, if it is conformal.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Bind conformal data generated by a field.
    Make {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
}

#[derive(Debug, clap::Args)]
pub struct CanonicalArgs {
    /// Base dimension.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Number of fields.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Hamiltonian `H`; names outside the chart are constant parameters.
    #[arg(long = "H", short = 'H', allow_hyphen_values = true)]
    hamiltonian: String,
}

/// Rendered report, exit status and warnings of one command.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    /// False when a check or validation failed (exit code 1).
    pub success: bool,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(report: Report, warnings: Vec<String>) -> Outcome {
        Outcome { report, success: true, warnings }
    }
}

fn load(cli: &Cli) -> Result<Session, CliError> {
    Session::load(&cli.session)
}

fn evaluate(session: &Session, text: &str, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    let e = parse(text)?;
    let mut env = Env::new(session.chart()?, session.structure(), session.bindings());
    let v = env.elaborate(&e);
    warnings.append(&mut env.warnings);
    v
}

fn evaluate_form(session: &Session, text: &str, warnings: &mut Vec<String>) -> Result<DiffForm, CliError> {
    match evaluate(session, text, warnings)? {
        Value::Form(t) => Ok(t),
        other => Err(CliError::Usage(format!("expected a form, got {other}"))),
    }
}

fn evaluate_vector(session: &Session, text: &str, warnings: &mut Vec<String>) -> Result<MultiVector, CliError> {
    match evaluate(session, text, warnings)? {
        Value::Vector(t) => Ok(t),
        other => Err(CliError::Usage(format!("expected a multivector, got {other}"))),
    }
}

fn evaluate_conformal(session: &Session, text: &str, warnings: &mut Vec<String>) -> Result<ConformalData, CliError> {
    if session.bindings().get(text.trim()).is_none() && text.trim().chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(CliError::Resolution { name: text.trim().into(), pos: super::Pos { line: 1, column: 1 } });
    }
    match evaluate(session, text, warnings)? {
        Value::Conformal(c) => Ok(c),
        other => Err(CliError::Usage(format!("expected conformal data, got {other}"))),
    }
}

fn value_item(v: Value) -> Item {
    match v {
        Value::Form(t) => Item::Form(t),
        Value::Vector(t) => Item::Vector(t),
        Value::Conformal(c) => Item::Conformal(c),
    }
}

fn canonical(n: usize, m: usize) -> Result<CanonicalStructure, CliError> {
    Ok(build_canonical(PhaseSpaceSpec::new(n, m)?)?)
}

fn section(args: &CanonicalArgs, warnings: &mut Vec<String>) -> Result<(CanonicalStructure, HamiltonianSection), CliError> {
    let c = canonical(args.n, args.m)?;
    let h = function(c.chart(), &args.hamiltonian, warnings)?;
    let s = HamiltonianSection::new(&c, h)?;
    Ok((c, s))
}

fn parse_elementary(text: &str, spec: PhaseSpaceSpec) -> Result<Elementary, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let index = |s: &str, bound: usize| -> Result<usize, CliError> {
        s.parse::<usize>()
            .ok()
            .filter(|k| *k < bound)
            .ok_or_else(|| CliError::Usage(format!("index `{s}` out of range in `{text}`")))
    };
    Ok(match parts.as_slice() {
        ["action"] => Elementary::Action,
        ["field", i, mu] => Elementary::Field { i: index(i, spec.m())?, mu: index(mu, spec.n())? },
        ["momentum", i] => Elementary::Momentum { i: index(i, spec.m())? },
        ["hyper", mu] => Elementary::Hyper { mu: index(mu, spec.n())? },
        _ => return Err(CliError::Usage(format!("unknown elementary form `{text}`"))),
    })
}

fn kernel_report(report: &mut Report, label: &str, kernel: Kernel) {
    match kernel {
        Kernel::Exact(basis) if basis.is_empty() => {
            report.push(label, Item::Text("0".into()));
        }
        Kernel::Exact(basis) => {
            for (k, v) in basis.into_iter().enumerate() {
                report.push(format!("{label}[{k}]"), Item::Vector(v));
            }
        }
        Kernel::GenericRankOnly { pivots, unknowns, .. } => {
            report.push(label, Item::Text(format!("generic rank only: {pivots} pivots over {unknowns} unknowns")));
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    match &cli.command {
        Command::Chart { action: ChartAction::New { coords, nonvanishing } } => {
            let chart = Chart::new(coords, nonvanishing)?;
            let session = Session::with_chart(chart.clone());
            session.save(&cli.session)?;
            let mut r = Report::new("chart");
            r.push("coordinates", Item::Text(coords.join(", ")));
            Ok(Outcome::ok(r, warnings))
        }
        Command::Theta { action } => {
            let mut session = load(cli)?;
            match action {
                ThetaAction::Set { expr } => {
                    let theta = evaluate_form(&session, expr, &mut warnings)?;
                    for name in session.set_theta(theta.clone()) {
                        warnings.push(format!("dropped conformal binding `{name}` of the previous n-form"));
                    }
                    session.save(&cli.session)?;
                    let mut r = Report::new("theta");
                    r.push("", Item::Form(theta));
                    Ok(Outcome::ok(r, warnings))
                }
                ThetaAction::Show => {
                    let mut r = Report::new("theta");
                    r.push("", Item::Form(session.require_structure()?.theta().clone()));
                    Ok(Outcome::ok(r, warnings))
                }
            }
        }
        Command::Let { name, expr } => {
            let mut session = load(cli)?;
            let v = evaluate(&session, expr, &mut warnings)?;
            session.bind(name, v.clone())?;
            session.save(&cli.session)?;
            let mut r = Report::new(format!("let {name}"));
            r.push(name.clone(), value_item(v));
            Ok(Outcome::ok(r, warnings))
        }
        Command::Check { what } => {
            let session = load(cli)?;
            let s = session.require_structure()?;
            match what {
                CheckWhat::Multicontact => {
                    let m = s.is_multicontact()?;
                    let mut r = Report::new("multicontact");
                    r.push("multicontact", Item::Flag(m.multicontact));
                    r.push("reason", Item::Text(m.reason));
                    if let Some(w) = m.witness {
                        r.push("witness", Item::Vector(w));
                    }
                    Ok(Outcome { report: r, success: m.multicontact, warnings })
                }
                CheckWhat::Variational => {
                    let v = variational_check(s)?;
                    let mut r = Report::new("variational");
                    r.push("variational", Item::Flag(v));
                    Ok(Outcome { report: r, success: v, warnings })
                }
            }
        }
        Command::Kernel { degree, of } => {
            let session = load(cli)?;
            let s = session.require_structure()?;
            let which = match of {
                KernelArg::Theta => KernelOf::Theta,
                KernelArg::Dtheta => KernelOf::DTheta,
                KernelArg::Both => KernelOf::Both,
            };
            let mut r = Report::new(format!("ker{degree} {which}"));
            kernel_report(&mut r, "basis", s.kernel(*degree, which)?);
            Ok(Outcome::ok(r, warnings))
        }
        Command::Conformal { action } => {
            let mut session = load(cli)?;
            match action {
                ConformalAction::Verify { x } => {
                    let field = evaluate_vector(&session, x, &mut warnings)?;
                    let factor = session.require_structure()?.verify_conformal(&field)?;
                    let mut r = Report::new("conformal");
                    r.push("conformal", Item::Flag(factor.is_some()));
                    if let Some(v) = &factor {
                        r.push("V", Item::Vector(v.clone()));
                    }
                    Ok(Outcome { report: r, success: factor.is_some(), warnings })
                }
                ConformalAction::Make { name, x } => {
                    let field = evaluate_vector(&session, x, &mut warnings)?;
                    let data = session.require_structure()?.conformal_from_field(field)?;
                    let Some(data) = data else {
                        let mut r = Report::new("conformal");
                        r.push("conformal", Item::Flag(false));
                        return Ok(Outcome { report: r, success: false, warnings });
                    };
                    session.bind(name, Value::Conformal(data.clone()))?;
                    session.save(&cli.session)?;
                    let mut r = Report::new(format!("conformal {name}"));
                    r.push(name.clone(), Item::Conformal(data));
                    Ok(Outcome::ok(r, warnings))
                }
            }
        }
        Command::Bracket { a, b } | Command::Cup { a, b } => {
            let session = load(cli)?;
            let s = session.require_structure()?;
            let da = evaluate_conformal(&session, a, &mut warnings)?;
            let db = evaluate_conformal(&session, b, &mut warnings)?;
            let is_bracket = matches!(cli.command, Command::Bracket { .. });
            let out = if is_bracket { s.jacobi_bracket(&da, &db)? } else { s.cup_product(&da, &db)? };
            let mut r = Report::new(if is_bracket { "bracket" } else { "cup" });
            match out {
                Some(d) => r.push("", Item::Conformal(d)),
                None => r.push("", Item::Text("outside the graded range".into())),
            };
            Ok(Outcome::ok(r, warnings))
        }
        Command::Symplectize => {
            let session = load(cli)?;
            let sy = Symplectization::build(session.require_structure()?)?;
            let mut r = Report::new("symplectization");
            r.push("fiber", Item::Text(sy.fiber().to_string()));
            r.push("upsilon", Item::Form(sy.upsilon().clone()));
            r.push("omega", Item::Form(sy.omega().clone()));
            r.push("liouville", Item::Vector(sy.liouville().clone()));
            r.push("nondegenerate", Item::Flag(sy.nondegeneracy_check()?));
            Ok(Outcome::ok(r, warnings))
        }
        Command::Lift { a } => {
            let session = load(cli)?;
            let sy = Symplectization::build(session.require_structure()?)?;
            let d = evaluate_conformal(&session, a, &mut warnings)?;
            let mut r = Report::new("lift");
            r.push("", Item::Vector(sy.lift_conformal(d.x_field(), d.v_field())?));
            Ok(Outcome::ok(r, warnings))
        }
        Command::Poisson { a, b } | Command::PsiCheck { a, b } => {
            let session = load(cli)?;
            let sy = Symplectization::build(session.require_structure()?)?;
            let da = evaluate_conformal(&session, a, &mut warnings)?;
            let db = evaluate_conformal(&session, b, &mut warnings)?;
            if matches!(cli.command, Command::Poisson { .. }) {
                let (pa, xa) = sy.psi_map(&da)?;
                let (pb, xb) = sy.psi_map(&db)?;
                let mut r = Report::new("poisson");
                r.push("", Item::Form(sy.poisson_bracket((&pa, &xa), (&pb, &xb))?));
                return Ok(Outcome::ok(r, warnings));
            }
            let residual = sy.check_correspondence(&da, &db)?;
            let ok = residual.is_zero();
            let mut r = Report::new("correspondence");
            r.push("holds", Item::Flag(ok));
            r.push("residual", Item::Form(residual));
            Ok(Outcome { report: r, success: ok, warnings })
        }
        Command::Sharp { expr } => {
            let session = load(cli)?;
            let s = session.require_structure()?;
            let alpha = evaluate_form(&session, expr, &mut warnings)?;
            let mut r = Report::new("sharp");
            match z_membership(s, &alpha)? {
                ZMembership::Member(d) => {
                    r.push("sharp", Item::Vector(d.sharp().clone()));
                    r.push("reeb", Item::Vector(d.reeb().clone()));
                    Ok(Outcome::ok(r, warnings))
                }
                ZMembership::NotMember { row, residual } => {
                    r.push("member", Item::Flag(false));
                    r.push(format!("obstruction (row {row})"), Item::Scalar(residual));
                    Ok(Outcome { report: r, success: false, warnings })
                }
            }
        }
        Command::Tables { n, m } => {
            let c = canonical(*n, *m)?;
            let (rows, cells) = elementary_tables(&c)?;
            let mut r = Report::new(format!("elementary conformal forms, n = {n}, m = {m}"));
            for row in rows {
                r.push(row.label.label(), Item::Conformal(row.data));
            }
            let mut mismatches = 0;
            for cell in cells {
                let flag = if cell.matches { "MATCH" } else { "MISMATCH" };
                let mut text = format!("{}  [{flag}]", cell.computed);
                if !cell.matches {
                    mismatches += 1;
                    text.push_str(&format!("  printed: {}", cell.printed));
                }
                r.push(format!("{{{}, {}}}", cell.row.label(), cell.column.label()), Item::Text(text));
            }
            r.push("mismatches", Item::Text(mismatches.to_string()));
            Ok(Outcome::ok(r, warnings))
        }
        Command::Hdw { canonical } => {
            let (c, sec) = section(canonical, &mut warnings)?;
            let jets = JetSection::new(&c)?;
            let sys = hdw_residuals(&c, &sec, &jets)?;
            let spec = c.spec();
            let mut r = Report::new("field equations (each expression = 0)");
            r.push("sigma", Item::Form(dissipation_form(c.structure(), sec.form())?));
            r.push("action", Item::Scalar(sys.action.clone()));
            for ((i, mu), eq) in &sys.fields {
                r.push(format!("field {} along {}", spec.y(*i), spec.x(*mu)), Item::Scalar(eq.clone()));
            }
            for (i, eq) in &sys.momenta {
                r.push(format!("momentum {}", spec.y(*i)), Item::Scalar(eq.clone()));
            }
            for (sym, meaning) in &sys.legend {
                r.push(format!("symbol {sym}"), Item::Text(meaning.clone()));
            }
            Ok(Outcome::ok(r, warnings))
        }
        Command::Sigma { canonical } => {
            let (c, sec) = section(canonical, &mut warnings)?;
            let mut r = Report::new("dissipation form");
            r.push("", Item::Form(dissipation_form(c.structure(), sec.form())?));
            Ok(Outcome::ok(r, warnings))
        }
        Command::Dissipated { canonical, elementary, f, g } => {
            let (c, sec) = section(canonical, &mut warnings)?;
            let data = match (elementary, f) {
                (Some(e), _) => parse_elementary(e, c.spec())?.data(&c)?,
                (None, Some(f)) => {
                    let f = function(c.chart(), f, &mut warnings)?;
                    let g = g
                        .iter()
                        .map(|t| function(c.chart(), t, &mut warnings))
                        .collect::<Result<Vec<_>, _>>()?;
                    vertical_conformal_from_fg(&c, &f, &g)?
                }
                (None, None) => return Err(CliError::Usage("give --elementary or --f with --g".into())),
            };
            let defect = dissipation_defect(c.structure(), sec.form(), &data)?;
            let ok = dissipated_check(c.structure(), sec.form(), &data)?;
            let mut r = Report::new("dissipated");
            r.push("dissipated", Item::Flag(ok));
            r.push("defect", Item::Form(defect));
            Ok(Outcome { report: r, success: ok, warnings })
        }
        Command::Distortion { n, m } => {
            let owned: NFormStructure;
            let session;
            let s = match n {
                Some(n) => {
                    owned = canonical(*n, *m)?.structure().clone();
                    &owned
                }
                None => {
                    session = load(cli)?;
                    session.require_structure()?
                }
            };
            let dist = distortion(s)?;
            let mut r = Report::new("distortion modulo the flat image");
            r.push("vanishes", Item::Flag(dist.all_zero));
            for (i, row) in dist.table.iter().enumerate() {
                for (j, entry) in row.iter().enumerate() {
                    r.push(format!("C[{i},{j}]"), Item::Form(entry.clone()));
                }
            }
            Ok(Outcome::ok(r, warnings))
        }
        Command::Render { expr } => {
            let session = load(cli)?;
            let v = evaluate(&session, expr, &mut warnings)?;
            let mut r = Report::default();
            r.push("", value_item(v));
            Ok(Outcome::ok(r, warnings))
        }
    }
}

/// Parses arguments, runs the command and prints; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            let _ = writeln!(std::io::stdout(), "{}", render(&out.report, cli.format));
            if out.success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
