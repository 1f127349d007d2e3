//! Check and run reports with deterministic text and JSON renderings.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIP",
        }
    }
}

/// A real printed with 17 significant digits; non-finite values become null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let text = format!("{:.16e}", self.0);
        let n: serde_json::Number = text.parse().map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub x: Vec<Real>,
    pub residual: Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub points: Vec<PointRecord>,
    /// Largest residual of each named identity, in evaluation order.
    pub identities: Vec<(String, f64)>,
    pub note: Option<String>,
    pub reason: Option<String>,
}

impl CheckReport {
    /// Verdict from the residual rule: pass iff max residual < tolerance.
    pub fn from_residuals(
        name: &str,
        tolerance: f64,
        points: Vec<PointRecord>,
        identities: Vec<(String, f64)>,
    ) -> CheckReport {
        let max = identities
            .iter()
            .map(|(_, r)| *r)
            .chain(points.iter().map(|p| p.residual.0))
            .fold(0.0f64, |a, r| if r.is_nan() || a.is_nan() { f64::NAN } else { a.max(r) });
        CheckReport {
            name: name.to_string(),
            max_residual: max,
            tolerance,
            verdict: if max < tolerance { Verdict::Pass } else { Verdict::Fail },
            points,
            identities,
            note: None,
            reason: None,
        }
    }

    pub fn skipped(name: &str, tolerance: f64, reason: impl Into<String>) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            max_residual: f64::NAN,
            tolerance,
            verdict: Verdict::Skipped,
            points: Vec::new(),
            identities: Vec::new(),
            note: None,
            reason: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckReport {
        let note = note.into();
        if !note.is_empty() {
            self.note = Some(match self.note.take() {
                Some(old) => format!("{old}; {note}"),
                None => note,
            });
        }
        self
    }

    /// Force a failure for a reason that is not a residual.
    pub fn failed(mut self, why: impl Into<String>) -> CheckReport {
        self.verdict = Verdict::Fail;
        self.with_note(why)
    }
}

struct Identities<'a>(&'a [(String, f64)]);

impl Serialize for Identities<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(k, &Real(*v))?;
        }
        m.end()
    }
}

impl Serialize for CheckReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("name", &self.name)?;
        m.serialize_entry("max_residual", &Real(self.max_residual))?;
        m.serialize_entry("tolerance", &Real(self.tolerance))?;
        m.serialize_entry("verdict", &self.verdict)?;
        m.serialize_entry("points", &self.points)?;
        if !self.identities.is_empty() {
            m.serialize_entry("identities", &Identities(&self.identities))?;
        }
        if let Some(n) = &self.note {
            m.serialize_entry("note", n)?;
        }
        if let Some(r) = &self.reason {
            m.serialize_entry("reason", r)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub overall: Verdict,
}

impl RunReport {
    pub fn new(scenario: &str, seed: u64, checks: Vec<CheckReport>) -> RunReport {
        let overall = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        RunReport {
            scenario: scenario.to_string(),
            version: VERSION.to_string(),
            seed,
            checks,
            overall,
        }
    }

    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (statgeom {}, seed {})", self.scenario, self.version, self.seed);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = write!(out, "{}  {:width$}", c.verdict.label(), c.name);
            if c.verdict == Verdict::Skipped {
                let _ = write!(out, "  skipped: {}", c.reason.as_deref().unwrap_or(""));
            } else {
                let _ = write!(out, "  max {:.3e}  tol {:.1e}  points {}", c.max_residual, c.tolerance, c.points.len());
            }
            let _ = writeln!(out);
            for (k, v) in &c.identities {
                let _ = writeln!(out, "      {k:<32} {v:.3e}");
            }
            if let Some(n) = &c.note {
                let _ = writeln!(out, "      note: {n}");
            }
        }
        let _ = writeln!(out, "overall {}", self.overall.label());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_print_seventeen_digits() {
        let s = serde_json::to_string(&Real(0.1)).unwrap();
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(serde_json::to_string(&Real(f64::NAN)).unwrap(), "null");
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn overall_ignores_skips() {
        let a = CheckReport::from_residuals("a", 1e-8, Vec::new(), vec![("x".into(), 1e-12)]);
        let b = CheckReport::skipped("b", 1e-8, "n/a");
        assert!(RunReport::new("s", 42, vec![a.clone(), b]).passed());
        let c = CheckReport::from_residuals("c", 1e-8, Vec::new(), vec![("x".into(), 1.0)]);
        assert!(!RunReport::new("s", 42, vec![a, c]).passed());
    }
}
