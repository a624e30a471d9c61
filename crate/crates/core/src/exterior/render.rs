//! Plain and LaTeX text for forms, multivectors and coefficients.
//!
//! Plain text is accepted back by the command-line expression parser.

use num::{One, Signed};

use super::{Blade, Chart, Graded, Kind};
use crate::coeffring::{Coefficient, Monomial, Rational};

fn plain_basis<K: Kind>(chart: &Chart, b: Blade) -> String {
    let prefix = if K::NAME == "form" { "d" } else { "e_" };
    b.indices()
        .map(|k| format!("{prefix}{}", chart.coordinate(k)))
        .collect::<Vec<_>>()
        .join("^")
}

/// Terms `(sign, body)` in canonical order, one per monomial.
fn plain_terms(c: &Coefficient, basis: &str) -> Vec<(bool, String)> {
    c.terms()
        .map(|(m, r)| {
            let mut parts = Vec::new();
            let a = r.abs();
            if !a.is_one() || (m.is_one() && basis.is_empty()) {
                parts.push(a.to_string());
            }
            if !m.is_one() {
                parts.push(m.to_string());
            }
            if !basis.is_empty() {
                parts.push(basis.to_string());
            }
            (r.is_negative(), parts.join("*"))
        })
        .collect()
}

fn join_signed(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (neg, body)) in terms.into_iter().enumerate() {
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&body);
    }
    s
}

/// Compact plain text for a coefficient (unit factors omitted).
pub fn plain_coefficient(c: &Coefficient) -> String {
    join_signed(plain_terms(c, ""))
}

pub(crate) fn plain<K: Kind>(t: &Graded<K>) -> String {
    let mut all = Vec::new();
    for (b, c) in t.terms() {
        all.extend(plain_terms(c, &plain_basis::<K>(t.chart(), *b)));
    }
    join_signed(all)
}

fn latex_name(name: &str) -> String {
    let split = name.find(|c: char| c.is_ascii_digit() || c == '_').unwrap_or(name.len());
    let (head, tail) = name.split_at(split);
    let tail = tail.trim_start_matches('_').replace('_', ",");
    if tail.is_empty() {
        head.to_string()
    } else {
        format!("{head}_{{{tail}}}")
    }
}

fn latex_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn latex_monomial(m: &Monomial) -> String {
    m.powers()
        .iter()
        .map(|(v, e)| {
            if *e == 1 {
                latex_name(v)
            } else {
                format!("{}^{{{e}}}", latex_name(v))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn latex_terms(c: &Coefficient, basis: &str) -> Vec<(bool, String)> {
    c.terms()
        .map(|(m, r)| {
            let mut parts = Vec::new();
            let a = r.abs();
            if !a.is_one() || (m.is_one() && basis.is_empty()) {
                parts.push(latex_rational(&a));
            }
            if !m.is_one() {
                parts.push(latex_monomial(m));
            }
            if !basis.is_empty() {
                parts.push(basis.to_string());
            }
            (r.is_negative(), parts.join(" \\, "))
        })
        .collect()
}

pub fn latex_coefficient(c: &Coefficient) -> String {
    join_signed(latex_terms(c, ""))
}

pub(crate) fn latex<K: Kind>(t: &Graded<K>) -> String {
    let mut all = Vec::new();
    for (b, c) in t.terms() {
        let basis = b
            .indices()
            .map(|k| {
                let n = latex_name(t.chart().coordinate(k));
                if K::NAME == "form" {
                    format!("\\mathrm{{d}}{n}")
                } else {
                    format!("\\partial_{{{n}}}")
                }
            })
            .collect::<Vec<_>>()
            .join(" \\wedge ");
        all.extend(latex_terms(c, &basis));
    }
    join_signed(all)
}

impl<K: Kind> Graded<K> {
    pub fn to_latex(&self) -> String {
        latex(self)
    }
}
