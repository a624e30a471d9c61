//! Session files: one chart, an optional n-form and named objects, stored as
//! JSON under a schema tag. Files with another tag are refused.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CliError, Value};
use crate::exterior::{Chart, ChartJson, DiffForm, MultiVector, TensorJson};
use crate::structures::NFormStructure;

pub const SCHEMA: &str = "gj-session/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum StoredObject {
    Form { value: TensorJson },
    Multivector { value: TensorJson },
    Conformal { alpha: Box<TensorJson>, x: Box<TensorJson>, v: Box<TensorJson> },
}

#[derive(Debug, Serialize, Deserialize)]
struct SessionFile {
    schema: String,
    chart: Option<ChartJson>,
    theta: Option<TensorJson>,
    #[serde(default)]
    objects: BTreeMap<String, StoredObject>,
}

#[derive(Debug, Clone, Default)]
pub struct Session {
    chart: Option<Chart>,
    structure: Option<NFormStructure>,
    bindings: BTreeMap<String, Value>,
}

impl Session {
    pub fn with_chart(chart: Chart) -> Session {
        Session { chart: Some(chart), structure: None, bindings: BTreeMap::new() }
    }

    pub fn chart(&self) -> Result<&Chart, CliError> {
        self.chart.as_ref().ok_or_else(|| CliError::Usage("no chart in the session; run `chart new` first".into()))
    }

    pub fn structure(&self) -> Option<&NFormStructure> {
        self.structure.as_ref()
    }

    pub fn require_structure(&self) -> Result<&NFormStructure, CliError> {
        self.structure.as_ref().ok_or_else(|| CliError::Usage("no n-form in the session; run `theta set` first".into()))
    }

    pub fn bindings(&self) -> &BTreeMap<String, Value> {
        &self.bindings
    }

    /// Replaces the n-form; returns the names of conformal bindings that were
    /// dropped because they belong to the old one.
    pub fn set_theta(&mut self, theta: DiffForm) -> Vec<String> {
        let dropped: Vec<String> = self
            .bindings
            .iter()
            .filter(|(_, v)| matches!(v, Value::Conformal(_)))
            .map(|(k, _)| k.clone())
            .collect();
        for k in &dropped {
            self.bindings.remove(k);
        }
        self.structure = Some(NFormStructure::new(theta));
        dropped
    }

    pub fn bind(&mut self, name: &str, value: Value) -> Result<(), CliError> {
        let valid = name.chars().next().is_some_and(|c| c.is_alphabetic())
            && name.chars().all(|c| c.is_alphanumeric() || c == '_');
        if !valid {
            return Err(CliError::Usage(format!("`{name}` is not a valid name")));
        }
        let chart = self.chart()?;
        if chart.index_of(name).is_some() {
            return Err(CliError::Usage(format!("`{name}` is a coordinate")));
        }
        self.bindings.insert(name.to_string(), value);
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Session, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Session(format!("cannot read {}: {e}", path.display())))?;
        Session::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| CliError::Session(format!("cannot write {}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Session, CliError> {
        let file: SessionFile = serde_json::from_str(text).map_err(|e| CliError::Session(e.to_string()))?;
        if file.schema != SCHEMA {
            return Err(CliError::Session(format!("schema `{}` is not supported (expected `{SCHEMA}`)", file.schema)));
        }
        let Some(chart_json) = &file.chart else {
            return Ok(Session::default());
        };
        let chart = Chart::try_from(chart_json)?;
        let structure = match &file.theta {
            Some(t) => Some(NFormStructure::new(DiffForm::from_json(t, Some(&chart))?)),
            None => None,
        };
        let mut bindings = BTreeMap::new();
        for (name, obj) in &file.objects {
            let value = match obj {
                StoredObject::Form { value } => Value::Form(DiffForm::from_json(value, Some(&chart))?),
                StoredObject::Multivector { value } => Value::Vector(MultiVector::from_json(value, Some(&chart))?),
                StoredObject::Conformal { alpha, x, v } => {
                    let s = structure.as_ref().ok_or_else(|| {
                        CliError::Session(format!("conformal object `{name}` stored without an n-form"))
                    })?;
                    let alpha = DiffForm::from_json(alpha, Some(&chart))?;
                    let x = MultiVector::from_json(x, Some(&chart))?;
                    let v = MultiVector::from_json(v, Some(&chart))?;
                    let data = s
                        .make_conformal_data(alpha, x, v)
                        .map_err(|e| CliError::Session(format!("conformal object `{name}` does not validate: {e}")))?;
                    Value::Conformal(data)
                }
            };
            bindings.insert(name.clone(), value);
        }
        Ok(Session { chart: Some(chart), structure, bindings })
    }

    pub fn to_json(&self) -> String {
        let objects = self
            .bindings
            .iter()
            .map(|(k, v)| {
                let obj = match v {
                    Value::Form(t) => StoredObject::Form { value: t.to_json() },
                    Value::Vector(t) => StoredObject::Multivector { value: t.to_json() },
                    Value::Conformal(c) => StoredObject::Conformal {
                        alpha: Box::new(c.alpha().to_json()),
                        x: Box::new(c.x_field().to_json()),
                        v: Box::new(c.v_field().to_json()),
                    },
                };
                (k.clone(), obj)
            })
            .collect();
        let file = SessionFile {
            schema: SCHEMA.into(),
            chart: self.chart.as_ref().map(ChartJson::from),
            theta: self.structure.as_ref().map(|s| s.theta().to_json()),
            objects,
        };
        serde_json::to_string_pretty(&file).expect("session serializes")
    }
}
