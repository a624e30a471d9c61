//! Reports and their plain, LaTeX and JSON renderings.

use clap::ValueEnum;
use serde_json::{json, Value as Json};

use crate::coeffring::Coefficient;
use crate::exterior::{latex_coefficient, plain_coefficient, DiffForm, MultiVector};
use crate::structures::ConformalData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Latex,
    Json,
}

#[derive(Debug, Clone)]
pub enum Item {
    Form(DiffForm),
    Vector(MultiVector),
    Scalar(Coefficient),
    Conformal(ConformalData),
    Flag(bool),
    Text(String),
}

/// Titled list of labelled items; an empty label renders the bare value.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub entries: Vec<(String, Item)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report { title: title.into(), entries: Vec::new() }
    }

    pub fn push(&mut self, label: impl Into<String>, item: Item) -> &mut Report {
        self.entries.push((label.into(), item));
        self
    }
}

fn plain_item(item: &Item) -> String {
    match item {
        Item::Form(t) => t.to_string(),
        Item::Vector(t) => t.to_string(),
        Item::Scalar(c) => plain_coefficient(c),
        Item::Conformal(c) => format!("{}  [X = {}; V = {}]", c.alpha(), c.x_field(), c.v_field()),
        Item::Flag(b) => b.to_string(),
        Item::Text(s) => s.clone(),
    }
}

fn latex_item(item: &Item) -> String {
    match item {
        Item::Form(t) => format!("${}$", t.to_latex()),
        Item::Vector(t) => format!("${}$", t.to_latex()),
        Item::Scalar(c) => format!("${}$", latex_coefficient(c)),
        Item::Conformal(c) => format!(
            "${}$ with $X = {}$, $V = {}$",
            c.alpha().to_latex(),
            c.x_field().to_latex(),
            c.v_field().to_latex()
        ),
        Item::Flag(b) => format!("\\texttt{{{b}}}"),
        Item::Text(s) => s.clone(),
    }
}

fn json_item(item: &Item) -> Json {
    match item {
        Item::Form(t) => json!({"kind": "form", "value": t.to_json()}),
        Item::Vector(t) => json!({"kind": "multivector", "value": t.to_json()}),
        Item::Scalar(c) => json!({"kind": "scalar", "value": c.to_string()}),
        Item::Conformal(c) => json!({
            "kind": "conformal",
            "alpha": c.alpha().to_json(),
            "x": c.x_field().to_json(),
            "v": c.v_field().to_json(),
        }),
        Item::Flag(b) => json!({"kind": "flag", "value": b}),
        Item::Text(s) => json!({"kind": "text", "value": s}),
    }
}

pub fn render(report: &Report, format: Format) -> String {
    if format == Format::Json {
        let entries: Vec<Json> = report
            .entries
            .iter()
            .map(|(label, item)| {
                let mut j = json_item(item);
                j["label"] = json!(label);
                j
            })
            .collect();
        return serde_json::to_string_pretty(&json!({"title": report.title, "entries": entries}))
            .expect("report serializes");
    }
    let item = if format == Format::Latex { latex_item } else { plain_item };
    let mut lines = Vec::new();
    if !report.title.is_empty() {
        lines.push(if format == Format::Latex { format!("% {}", report.title) } else { format!("# {}", report.title) });
    }
    for (label, it) in &report.entries {
        if label.is_empty() {
            lines.push(item(it));
        } else {
            lines.push(format!("{label}: {}", item(it)));
        }
    }
    lines.join("\n")
}
