use serde_json::{json, Map, Value};

use oligocat::measure::Witness;

/// A single check outcome. Serializes with sorted keys, so output is
/// byte-for-byte reproducible.
#[derive(Debug)]
pub struct Report {
    pub check: String,
    pub instance: String,
    pub bound: usize,
    pub witnesses: Vec<Value>,
    pub data: Map<String, Value>,
}

impl Report {
    pub fn new(check: &str, instance: String, bound: usize) -> Self {
        Report {
            check: check.into(),
            instance,
            bound,
            witnesses: Vec::new(),
            data: Map::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.into(), v.into());
    }

    pub fn fail(&mut self, axiom: &str, detail: impl Into<String>) {
        self.witnesses.push(json!({ "axiom": axiom, "detail": detail.into() }));
    }

    pub fn fail_all(&mut self, ws: &[Witness]) {
        for w in ws {
            self.fail(&w.axiom, w.detail.clone());
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "instance": self.instance,
            "bound": self.bound,
            "status": if self.passed() { "pass" } else { "fail" },
            "witnesses": self.witnesses,
            "data": self.data,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} on {} (bound {}): {}\n",
            self.check,
            self.instance,
            self.bound,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for w in &self.witnesses {
            out.push_str(&format!("  witness: {}\n", plain(w)));
        }
        for (k, v) in &self.data {
            out.push_str(&format!("  {k}: {}\n", plain(v)));
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
