use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::exactnum::{format_rational, to_decimal_string, Rational};

/// Process exit codes, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitCode {
    Success = 0,
    Violated = 1,
    InputError = 2,
    CapRefused = 3,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Value,
    Error,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Value => "value",
            Verdict::Error => "error",
        }
    }
}

/// One command's outcome, rendered as JSON or text.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub input: Option<String>,
    pub verdict: Verdict,
    pub exit: ExitCode,
    pub epsilon_min: Option<Rational>,
    pub representation: Option<Value>,
    pub certificate: Option<Value>,
    pub details: Option<Value>,
    pub error: Option<String>,
    pub timing_ms: u128,
    /// Human-readable lines for text mode.
    pub lines: Vec<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, input: Option<String>, verdict: Verdict) -> RunReport {
        let exit = match verdict {
            Verdict::Violated => ExitCode::Violated,
            Verdict::Error => ExitCode::InputError,
            _ => ExitCode::Success,
        };
        RunReport {
            command: command.into(),
            input,
            verdict,
            exit,
            epsilon_min: None,
            representation: None,
            certificate: None,
            details: None,
            error: None,
            timing_ms: 0,
            lines: Vec::new(),
        }
    }

    pub fn failure(command: impl Into<String>, input: Option<String>, err: &Error) -> RunReport {
        let mut r = RunReport::new(command, input, Verdict::Error);
        if matches!(err, Error::CapExceeded { .. }) {
            r.exit = ExitCode::CapRefused;
        }
        r.error = Some(err.to_string());
        r.lines.push(format!("error: {err}"));
        r
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        if let Some(i) = &self.input {
            m.insert("input".into(), json!(i));
        }
        m.insert("verdict".into(), json!(self.verdict.as_str()));
        m.insert("exit_code".into(), json!(self.exit.code()));
        if let Some(e) = &self.epsilon_min {
            m.insert("epsilon_min".into(), rational(e));
            m.insert("epsilon_min_approx".into(), json!(to_decimal_string(e, 12)));
        }
        for (key, value) in [
            ("representation", &self.representation),
            ("certificate", &self.certificate),
            ("details", &self.details),
        ] {
            if let Some(v) = value {
                m.insert(key.into(), v.clone());
            }
        }
        if let Some(e) = &self.error {
            m.insert("error".into(), json!(e));
        }
        m.insert("timing_ms".into(), json!(self.timing_ms));
        Value::Object(m)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let head = match &self.input {
            Some(i) => format!("{} [{}]: {}", self.command, i, self.verdict.as_str()),
            None => format!("{}: {}", self.command, self.verdict.as_str()),
        };
        out.push_str(&head);
        out.push('\n');
        if let Some(e) = &self.epsilon_min {
            out.push_str(&format!(
                "  epsilon_min = {} (≈ {})\n",
                format_rational(e),
                to_decimal_string(e, 12)
            ));
        }
        for l in &self.lines {
            out.push_str("  ");
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

pub fn rational(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

/// `[a, b, c]` in wire form.
pub fn bracket(v: &[Rational]) -> String {
    let items: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", items.join(", "))
}

/// `{a,b}` for an event given as a bitmask over labelled points.
pub fn event_label(mask: u64, labels: &[String]) -> String {
    let items: Vec<&str> = labels
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, l)| l.as_str())
        .collect();
    if items.is_empty() {
        return "∅".to_string();
    }
    format!("{{{}}}", items.join(","))
}
