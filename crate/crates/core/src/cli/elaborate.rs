//! Elaboration of parsed expressions against a chart, an optional structure
//! and named bindings.
//!
//! Names resolve in order: bindings, coordinates, `d<coordinate>`,
//! `e_<coordinate>`; anything else is a constant parameter, except inside
//! `jb`, `cup` and `psi`, whose arguments must name conformal data.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use super::parse::{BinaryOp, Call, Expr, ExprKind, Pos};
use super::CliError;
use crate::coeffring::{Coefficient, Rational};
use crate::exterior::{Chart, DiffForm, MultiVector};
use crate::structures::{ConformalData, NFormStructure};
use crate::symplectization::Symplectization;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Form(DiffForm),
    Vector(MultiVector),
    Conformal(ConformalData),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Form(t) => write!(f, "{t}"),
            Value::Vector(t) => write!(f, "{t}"),
            Value::Conformal(c) => write!(f, "{} with X = {}, V = {}", c.alpha(), c.x_field(), c.v_field()),
        }
    }
}

impl Value {
    fn describe(&self) -> String {
        match self {
            Value::Form(t) => format!("a form of degree {}", t.degree()),
            Value::Vector(t) => format!("a multivector of degree {}", t.degree()),
            Value::Conformal(c) => format!("conformal data of degree {}", c.p()),
        }
    }

    fn as_function(&self) -> Option<Coefficient> {
        match self {
            Value::Form(t) => t.as_scalar(),
            _ => None,
        }
    }
}

pub struct Env<'a> {
    chart: &'a Chart,
    structure: Option<&'a NFormStructure>,
    bindings: &'a BTreeMap<String, Value>,
    symplectization: Option<Symplectization>,
    pub warnings: Vec<String>,
}

fn constant(r: Rational) -> Coefficient {
    Coefficient::constant(r)
}

impl<'a> Env<'a> {
    pub fn new(
        chart: &'a Chart,
        structure: Option<&'a NFormStructure>,
        bindings: &'a BTreeMap<String, Value>,
    ) -> Env<'a> {
        Env { chart, structure, bindings, symplectization: None, warnings: Vec::new() }
    }

    fn structure(&self, pos: Pos, what: &str) -> Result<&'a NFormStructure, CliError> {
        self.structure
            .ok_or_else(|| CliError::Type { pos, message: format!("`{what}` needs a structure; run `theta set` first") })
    }

    pub fn elaborate(&mut self, e: &Expr) -> Result<Value, CliError> {
        match &e.kind {
            ExprKind::Number(n) => Ok(Value::Form(DiffForm::scalar(self.chart, constant(Rational::from(n.clone()))))),
            ExprKind::Ident(name) => Ok(self.resolve(name)),
            ExprKind::Neg(inner) => match self.elaborate(inner)? {
                Value::Form(t) => Ok(Value::Form(t.neg())),
                Value::Vector(t) => Ok(Value::Vector(t.neg())),
                Value::Conformal(c) => {
                    let s = self.structure(e.pos, "-")?;
                    Ok(Value::Conformal(s.scale_conformal(&c, &-Rational::one())?))
                }
            },
            ExprKind::Power(base, k) => match self.elaborate(base)? {
                Value::Form(t) if t.degree() == 0 => {
                    let f = t.as_scalar().expect("degree 0");
                    Ok(Value::Form(DiffForm::scalar(self.chart, self.power(&f, k, e.pos)?)))
                }
                Value::Form(t) => Ok(Value::Form(t.scale(&constant(Rational::from(k.clone()))))),
                Value::Vector(t) => Ok(Value::Vector(t.scale(&constant(Rational::from(k.clone()))))),
                Value::Conformal(c) => {
                    let s = self.structure(e.pos, "^")?;
                    Ok(Value::Conformal(s.scale_conformal(&c, &Rational::from(k.clone()))?))
                }
            },
            ExprKind::Binary(op, l, r) => self.binary(op, l, r, e.pos),
            ExprKind::Call(call, args) => self.call(*call, args, e.pos),
        }
    }

    fn resolve(&mut self, name: &str) -> Value {
        if let Some(v) = self.bindings.get(name) {
            return v.clone();
        }
        if self.chart.index_of(name).is_some() {
            return Value::Form(DiffForm::scalar(self.chart, Coefficient::var(name)));
        }
        if let Some(rest) = name.strip_prefix('d') {
            if let Ok(f) = self.chart.d(rest) {
                return Value::Form(f);
            }
        }
        if let Some(rest) = name.strip_prefix("e_") {
            if let Ok(v) = self.chart.e(rest) {
                return Value::Vector(v);
            }
        }
        self.warnings.push(format!("`{name}` is not bound; treating it as a constant parameter"));
        Value::Form(DiffForm::scalar(self.chart, Coefficient::var(name)))
    }

    fn conformal_arg(&mut self, e: &Expr, call: Call) -> Result<ConformalData, CliError> {
        if let ExprKind::Ident(name) = &e.kind {
            if !self.bindings.contains_key(name) {
                return Err(CliError::Resolution { name: name.clone(), pos: e.pos });
            }
        }
        match self.elaborate(e)? {
            Value::Conformal(c) => Ok(c),
            other => Err(CliError::Type {
                pos: e.pos,
                message: format!("`{}` expects conformal data, got {}", call.name(), other.describe()),
            }),
        }
    }

    fn binary(&mut self, op: &BinaryOp, l: &Expr, r: &Expr, pos: Pos) -> Result<Value, CliError> {
        let left = self.elaborate(l)?;
        let right = self.elaborate(r)?;
        let mismatch = |op: &'static str, a: &Value, b: &Value| CliError::Degree {
            pos,
            op,
            left: a.describe(),
            right: b.describe(),
        };
        match op {
            BinaryOp::Add | BinaryOp::Sub => {
                let sub = *op == BinaryOp::Sub;
                let name = if sub { "subtract" } else { "add" };
                match (&left, &right) {
                    (Value::Form(a), Value::Form(b)) if a.degree() == b.degree() => {
                        Ok(Value::Form(if sub { a.sub(b)? } else { a.add(b)? }))
                    }
                    (Value::Vector(a), Value::Vector(b)) if a.degree() == b.degree() => {
                        Ok(Value::Vector(if sub { a.sub(b)? } else { a.add(b)? }))
                    }
                    (Value::Conformal(a), Value::Conformal(b)) if a.p() == b.p() => {
                        let s = self.structure(pos, name)?;
                        let b = if sub { s.scale_conformal(b, &-Rational::one())? } else { b.clone() };
                        Ok(Value::Conformal(s.add_conformal(a, &b)?))
                    }
                    _ => Err(mismatch(name, &left, &right)),
                }
            }
            BinaryOp::Wedge | BinaryOp::Mul => {
                let out = match (&left, &right) {
                    (Value::Form(a), Value::Form(b)) => Value::Form(a.wedge(b)?),
                    (Value::Vector(a), Value::Vector(b)) => Value::Vector(a.wedge(b)?),
                    (Value::Form(a), Value::Vector(v)) | (Value::Vector(v), Value::Form(a)) => match a.as_scalar() {
                        Some(f) => Value::Vector(v.scale(&f)),
                        None => return Err(mismatch("multiply", &left, &right)),
                    },
                    (Value::Form(a), Value::Conformal(c)) | (Value::Conformal(c), Value::Form(a)) => {
                        match a.as_scalar().and_then(|f| f.as_constant()) {
                            Some(k) => Value::Conformal(self.structure(pos, "scale")?.scale_conformal(c, &k)?),
                            None => return Err(mismatch("multiply", &left, &right)),
                        }
                    }
                    _ => return Err(mismatch("multiply", &left, &right)),
                };
                let nonzero = |v: &Value| match v {
                    Value::Form(t) => t.degree() > 0 && !t.is_zero(),
                    Value::Vector(t) => t.degree() > 0 && !t.is_zero(),
                    Value::Conformal(_) => false,
                };
                let vanished = match &out {
                    Value::Form(t) => t.is_zero(),
                    Value::Vector(t) => t.is_zero(),
                    Value::Conformal(_) => false,
                };
                if vanished && nonzero(&left) && nonzero(&right) {
                    self.warnings.push(format!("wedge product at {pos} vanishes identically"));
                }
                Ok(out)
            }
            BinaryOp::Div => {
                let Some(f) = right.as_function() else {
                    return Err(mismatch("divide", &left, &right));
                };
                let inv = match f.as_constant() {
                    Some(k) if k.is_zero() => {
                        return Err(CliError::Type { pos, message: "division by zero".into() })
                    }
                    Some(k) => constant(k.recip()),
                    None => self.chart.inverse(&f).map_err(|_| CliError::Type {
                        pos,
                        message: format!("`{f}` is not invertible on this chart"),
                    })?,
                };
                match left {
                    Value::Form(a) => Ok(Value::Form(a.scale(&inv))),
                    Value::Vector(a) => Ok(Value::Vector(a.scale(&inv))),
                    Value::Conformal(c) => match inv.as_constant() {
                        Some(k) => Ok(Value::Conformal(self.structure(pos, "/")?.scale_conformal(&c, &k)?)),
                        None => Err(CliError::Type { pos, message: "conformal data scale by constants only".into() }),
                    },
                }
            }
        }
    }

    fn power(&self, f: &Coefficient, k: &BigInt, pos: Pos) -> Result<Coefficient, CliError> {
        let e = k
            .abs()
            .to_u32()
            .ok_or_else(|| CliError::Type { pos, message: format!("exponent {k} is too large") })?;
        let base = if k.is_negative() {
            self.chart.inverse(f).map_err(|_| CliError::Type {
                pos,
                message: format!("negative power of `{f}`, which is not invertible on this chart"),
            })?
        } else {
            f.clone()
        };
        Ok(base.pow(e))
    }

    fn call(&mut self, call: Call, args: &[Expr], pos: Pos) -> Result<Value, CliError> {
        let type_error = |message: String| CliError::Type { pos, message };
        match call {
            Call::D => match self.elaborate(&args[0])? {
                Value::Form(t) => Ok(Value::Form(t.d())),
                other => Err(type_error(format!("`d` expects a form, got {}", other.describe()))),
            },
            Call::Interior | Call::Lie => {
                let u = self.elaborate(&args[0])?;
                let w = self.elaborate(&args[1])?;
                match (u, w) {
                    (Value::Vector(u), Value::Form(w)) => {
                        if u.degree() > w.degree() && call == Call::Interior {
                            return Err(CliError::Degree {
                                pos,
                                op: "contract",
                                left: format!("a multivector of degree {}", u.degree()),
                                right: format!("a form of degree {}", w.degree()),
                            });
                        }
                        Ok(Value::Form(if call == Call::Interior { w.interior(&u)? } else { w.lie(&u)? }))
                    }
                    (u, w) => Err(type_error(format!(
                        "`{}` expects a multivector and a form, got {} and {}",
                        call.name(),
                        u.describe(),
                        w.describe()
                    ))),
                }
            }
            Call::Schouten => match (self.elaborate(&args[0])?, self.elaborate(&args[1])?) {
                (Value::Vector(a), Value::Vector(b)) => Ok(Value::Vector(a.schouten(&b)?)),
                (a, b) => Err(type_error(format!(
                    "`sn` expects two multivectors, got {} and {}",
                    a.describe(),
                    b.describe()
                ))),
            },
            Call::Jacobi | Call::Cup => {
                let a = self.conformal_arg(&args[0], call)?;
                let b = self.conformal_arg(&args[1], call)?;
                let s = self.structure(pos, call.name())?;
                let out = if call == Call::Jacobi { s.jacobi_bracket(&a, &b)? } else { s.cup_product(&a, &b)? };
                out.map(Value::Conformal).ok_or_else(|| {
                    type_error(format!("`{}` of degrees {} and {} leaves the graded range", call.name(), a.p(), b.p()))
                })
            }
            Call::Psi => {
                let a = self.conformal_arg(&args[0], call)?;
                let s = self.structure(pos, "psi")?;
                if self.symplectization.is_none() {
                    self.symplectization = Some(Symplectization::build(s)?);
                }
                let sy = self.symplectization.as_ref().expect("built above");
                Ok(Value::Form(sy.psi_map(&a)?.0))
            }
        }
    }
}

/// Parses and elaborates a function (degree-0 form).
pub fn function(chart: &Chart, text: &str, warnings: &mut Vec<String>) -> Result<Coefficient, CliError> {
    let empty = BTreeMap::new();
    let mut env = Env::new(chart, None, &empty);
    let e = super::parse::parse(text)?;
    let v = env.elaborate(&e)?;
    warnings.append(&mut env.warnings);
    v.as_function().ok_or_else(|| CliError::Type { pos: e.pos, message: format!("expected a function, got {}", v.describe()) })
}
