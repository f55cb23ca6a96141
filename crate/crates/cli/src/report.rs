//! Check reports: one record per verification, emitted as human text or JSON
//! lines. Reports are deterministic for fixed parameters; elapsed times are
//! excluded unless explicitly requested, so report streams are byte-identical
//! across runs and across parallelism levels.

use serde_json::{json, Map, Value};
use std::time::Duration;

/// One parameter of a check, kept in insertion order.
#[derive(Debug, Clone)]
pub enum ParamValue {
    Int(i64),
    Text(String),
}

/// The outcome of a single check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub parameters: Vec<(String, ParamValue)>,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
    pub reading_notes: Vec<String>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> CheckReport {
        CheckReport {
            name: name.into(),
            parameters: Vec::new(),
            expected: String::new(),
            computed: String::new(),
            pass: false,
            reading_notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn param(mut self, key: &str, value: i64) -> CheckReport {
        self.parameters.push((key.into(), ParamValue::Int(value)));
        self
    }

    pub fn param_text(mut self, key: &str, value: impl Into<String>) -> CheckReport {
        self.parameters.push((key.into(), ParamValue::Text(value.into())));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> CheckReport {
        self.reading_notes.push(note.into());
        self
    }

    pub fn notes(mut self, notes: &[String]) -> CheckReport {
        self.reading_notes.extend(notes.iter().cloned());
        self
    }

    /// Records the comparison that decides the check.
    pub fn outcome(
        mut self,
        expected: impl Into<String>,
        computed: impl Into<String>,
        pass: bool,
    ) -> CheckReport {
        self.expected = expected.into();
        self.computed = computed.into();
        self.pass = pass;
        self
    }

    /// Marks the check failed because a computation errored out.
    pub fn failure(mut self, expected: impl Into<String>, error: impl Into<String>) -> CheckReport {
        self.expected = expected.into();
        self.computed = format!("error: {}", error.into());
        self.pass = false;
        self
    }

    pub fn to_json(&self, with_timings: bool) -> Value {
        let mut parameters = Map::new();
        for (key, value) in &self.parameters {
            let v = match value {
                ParamValue::Int(i) => json!(i),
                ParamValue::Text(t) => json!(t),
            };
            parameters.insert(key.clone(), v);
        }
        let mut record = Map::new();
        record.insert("check-name".into(), json!(self.name));
        record.insert("parameters".into(), Value::Object(parameters));
        record.insert("expected".into(), json!(self.expected));
        record.insert("computed".into(), json!(self.computed));
        record.insert("pass".into(), json!(self.pass));
        record.insert("reading-notes".into(), json!(self.reading_notes));
        if with_timings {
            record.insert("elapsed-ms".into(), json!(self.elapsed.as_millis() as u64));
        }
        Value::Object(record)
    }

    pub fn to_text(&self, with_timings: bool) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut line = format!("{verdict} {}", self.name);
        for (key, value) in &self.parameters {
            match value {
                ParamValue::Int(i) => line.push_str(&format!(" {key}={i}")),
                ParamValue::Text(t) => line.push_str(&format!(" {key}={t}")),
            }
        }
        line.push_str(&format!(
            " :: expected {}; computed {}",
            self.expected, self.computed
        ));
        if !self.reading_notes.is_empty() {
            line.push_str(&format!(" [{}]", self.reading_notes.join("; ")));
        }
        if with_timings {
            line.push_str(&format!(" ({} ms)", self.elapsed.as_millis()));
        }
        line
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Prints the report stream and a summary on stderr; returns whether every
/// check passed.
pub fn emit(reports: &[CheckReport], format: Format, with_timings: bool) -> bool {
    for report in reports {
        match format {
            Format::Text => println!("{}", report.to_text(with_timings)),
            Format::Json => println!("{}", report.to_json(with_timings)),
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    eprintln!(
        "{} checks: {} passed, {} failed",
        reports.len(),
        passed,
        reports.len() - passed
    );
    passed == reports.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CheckReport {
        CheckReport::new("kernel-n1")
            .param("g", 7)
            .note("theta indices read with the top row clamped")
            .outcome("dimension 2", "dimension 2", true)
    }

    #[test]
    fn text_lines_carry_verdict_parameters_and_notes() {
        let line = sample().to_text(false);
        assert_eq!(
            line,
            "PASS kernel-n1 g=7 :: expected dimension 2; computed dimension 2 \
             [theta indices read with the top row clamped]"
        );
    }

    #[test]
    fn json_records_use_the_report_field_names() {
        let v = sample().to_json(false);
        assert_eq!(v["check-name"], "kernel-n1");
        assert_eq!(v["parameters"]["g"], 7);
        assert_eq!(v["pass"], true);
        assert!(v.get("elapsed-ms").is_none());
        let timed = sample().to_json(true);
        assert!(timed.get("elapsed-ms").is_some());
    }

    #[test]
    fn failures_embed_the_error_text() {
        let r = CheckReport::new("map/fprime-w").failure("zero class", "no such class");
        assert!(!r.pass);
        assert_eq!(r.computed, "error: no such class");
    }
}
