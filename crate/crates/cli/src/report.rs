use std::fmt::Write as _;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use orbitstat::Rational;
use serde::Serialize;

/// One named output value.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub label: String,
    #[serde(flatten)]
    pub value: Value,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Value {
    Exact { num: String, den: String, decimal: String },
    Integer { value: String },
    Text { value: String },
    Flag { value: bool },
}

impl Value {
    pub fn exact(r: &Rational) -> Self {
        Value::Exact {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            decimal: decimal6(r),
        }
    }

    fn render(&self) -> String {
        match self {
            Value::Exact { num, den, decimal } if den == "1" => format!("{num} ({decimal})"),
            Value::Exact { num, den, decimal } => format!("{num}/{den} ({decimal})"),
            Value::Integer { value } | Value::Text { value } => value.clone(),
            Value::Flag { value } => value.to_string(),
        }
    }
}

/// Rounds half away from zero to six places.
pub fn decimal6(r: &Rational) -> String {
    let scale = BigInt::from(1_000_000u32);
    let two = BigInt::from(2u32);
    let den = r.denom().clone();
    let scaled = (r.numer().abs() * &scale * &two + &den) / (&den * &two);
    let (whole, frac) = (&scaled / &scale, &scaled % &scale);
    let sign = if r.is_negative() && !scaled.is_zero() { "-" } else { "" };
    format!("{sign}{whole}.{frac:0>6}")
}

/// Everything a subcommand reports. Exact values are authoritative.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<Entry>,
    pub methods: Vec<String>,
    pub results: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            methods: Vec::new(),
            results: Vec::new(),
            agreement: None,
            ok: true,
            elapsed_ms: None,
        }
    }

    pub fn input(&mut self, label: &str, value: impl ToString) -> &mut Self {
        self.inputs.push(Entry {
            label: label.to_string(),
            value: Value::Text { value: value.to_string() },
        });
        self
    }

    pub fn push(&mut self, label: impl Into<String>, value: Value) -> &mut Self {
        self.results.push(Entry { label: label.into(), value });
        self
    }

    pub fn exact(&mut self, label: impl Into<String>, r: &Rational) -> &mut Self {
        self.push(label, Value::exact(r))
    }

    pub fn integer(&mut self, label: impl Into<String>, n: impl ToString) -> &mut Self {
        self.push(label, Value::Integer { value: n.to_string() })
    }

    pub fn text(&mut self, label: impl Into<String>, s: impl ToString) -> &mut Self {
        self.push(label, Value::Text { value: s.to_string() })
    }

    pub fn flag(&mut self, label: impl Into<String>, b: bool) -> &mut Self {
        self.push(label, Value::Flag { value: b })
    }

    /// Records a comparison; any disagreement fails the run.
    pub fn agree(&mut self, agreed: bool) {
        self.agreement = Some(self.agreement.unwrap_or(true) && agreed);
        self.ok &= agreed;
    }

    pub fn set_elapsed(&mut self, elapsed: Duration) {
        self.elapsed_ms = Some(elapsed.as_secs_f64() * 1000.0);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for e in &self.inputs {
            let _ = writeln!(out, "input {}: {}", e.label, e.value.render());
        }
        if !self.methods.is_empty() {
            let _ = writeln!(out, "method: {}", self.methods.join(", "));
        }
        for e in &self.results {
            let _ = writeln!(out, "{} = {}", e.label, e.value.render());
        }
        if let Some(a) = self.agreement {
            let _ = writeln!(out, "agreement: {a}");
        }
        let _ = writeln!(out, "status: {}", if self.ok { "ok" } else { "failed" });
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(out, "elapsed_ms: {ms:.3}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn decimals_round_half_away_from_zero() {
        assert_eq!(decimal6(&r(1, 2)), "0.500000");
        assert_eq!(decimal6(&r(2, 3)), "0.666667");
        assert_eq!(decimal6(&r(-1, 3)), "-0.333333");
        assert_eq!(decimal6(&r(7, 1)), "7.000000");
        assert_eq!(decimal6(&r(-1, 10_000_000)), "0.000000");
        assert_eq!(decimal6(&r(1, 2_000_000)), "0.000001");
    }

    #[test]
    fn agreement_is_sticky() {
        let mut rep = RunReport::new("eval");
        rep.agree(true);
        rep.agree(false);
        rep.agree(true);
        assert_eq!(rep.agreement, Some(false));
        assert!(!rep.ok);
    }
}
