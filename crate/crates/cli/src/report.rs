//! Versioned JSON reports.
//!
//! Keys are emitted in sorted order and timings are recorded only on
//! request, so two runs of the same command with the same seed produce
//! byte-identical output.

use serde_json::{json, Map, Value};

/// Schema tag written into every report.
pub const SCHEMA: &str = "nchopf-report/1";

/// Overall outcome and its process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Usage,
    Undecided,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Usage => 2,
            Status::Undecided => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Usage => "usage",
            Status::Undecided => "undecided",
        }
    }
}

/// One named check with its verdict and supporting data.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub preset: Option<String>,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    pub bounds: Vec<Value>,
    pub timings: Vec<(String, f64)>,
    pub error: Option<String>,
    pub undecided: bool,
}

impl Report {
    pub fn new(command: &str, args: &[String]) -> Report {
        Report {
            command: command.to_string(),
            args: args.to_vec(),
            preset: None,
            results: Map::new(),
            checks: Vec::new(),
            bounds: Vec::new(),
            timings: Vec::new(),
            error: None,
            undecided: false,
        }
    }

    pub fn result(&mut self, key: &str, value: Value) -> &mut Report {
        self.results.insert(key.to_string(), value);
        self
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: Value) -> &mut Report {
        self.checks.push(Check { name: name.to_string(), pass, detail });
        self
    }

    /// Record a bound used by a bounded procedure.
    pub fn bound(&mut self, what: &str, value: usize, cap: usize) -> &mut Report {
        self.bounds.push(json!({ "what": what, "bound": value, "cap": cap }));
        self
    }

    pub fn timing(&mut self, what: &str, seconds: f64) -> &mut Report {
        self.timings.push((what.to_string(), seconds));
        self
    }

    pub fn status(&self) -> Status {
        if self.error.is_some() && !self.undecided {
            Status::Fail
        } else if self.undecided {
            Status::Undecided
        } else if self.checks.iter().all(|c| c.pass) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn to_value(&self, with_timings: bool) -> Value {
        let checks: Vec<Value> = self.checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect();
        let mut root = Map::new();
        root.insert("schema".into(), json!(SCHEMA));
        root.insert("command".into(), json!({ "name": self.command, "args": self.args }));
        if let Some(p) = &self.preset {
            root.insert("preset".into(), json!(p));
        }
        root.insert("results".into(), Value::Object(self.results.clone()));
        root.insert("checks".into(), Value::Array(checks));
        root.insert("bounds".into(), Value::Array(self.bounds.clone()));
        root.insert("pass".into(), json!(self.status() == Status::Pass));
        root.insert("status".into(), json!(self.status().label()));
        if let Some(e) = &self.error {
            root.insert("error".into(), json!(e));
        }
        if with_timings {
            let t: Map<String, Value> = self.timings.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            root.insert("timings".into(), Value::Object(t));
        }
        Value::Object(root)
    }

    pub fn render(&self, with_timings: bool) -> String {
        serde_json::to_string_pretty(&self.to_value(with_timings)).expect("reports serialize")
    }
}

/// A float carried together with the tolerance it is judged against.
pub fn measured(value: f64, tolerance: f64) -> Value {
    json!({ "value": value, "tolerance": tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_timings_optional() {
        let mut r = Report::new("demo", &[]);
        r.result("zeta", json!(1)).result("alpha", json!(2)).timing("total", 0.5);
        r.check("ok", true, json!(null));
        let text = r.render(false);
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
        assert!(!text.contains("timings"));
        assert!(r.render(true).contains("timings"));
        assert_eq!(r.status(), Status::Pass);
    }

    #[test]
    fn undecided_has_its_own_code() {
        let mut r = Report::new("demo", &[]);
        r.undecided = true;
        assert_eq!(r.status().code(), 3);
    }
}
