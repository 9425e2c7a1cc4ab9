use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use xlate_core::{Algebra, AxiomReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &Path, contents: &[u8]) -> InputDigest {
        InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct NamedReport {
    pub name: String,
    pub passed: bool,
    pub verdicts: Vec<Value>,
}

/// Everything covered by the digest.
#[derive(Debug, Serialize)]
pub struct Body {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub reports: Vec<NamedReport>,
    pub artifacts: Map<String, Value>,
}

#[derive(Debug, Serialize)]
struct Timing {
    total_ms: f64,
}

#[derive(Debug, Serialize)]
struct RunReport<'a> {
    #[serde(flatten)]
    body: &'a Body,
    report_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

impl Body {
    pub fn new(command: &str) -> Body {
        Body {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs: Vec::new(),
            reports: Vec::new(),
            artifacts: Map::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn add_report(&mut self, name: &str, report: &AxiomReport, algebras: [&Algebra; 2]) {
        self.reports.push(NamedReport {
            name: name.into(),
            passed: report.passed(),
            verdicts: report.verdicts.iter().map(|v| verdict_json(v, algebras)).collect(),
        });
    }

    pub fn artifact(&mut self, key: &str, value: Value) {
        self.artifacts.insert(key.into(), value);
    }

    pub fn to_json(&self, elapsed_ms: Option<f64>) -> String {
        let canonical = serde_json::to_vec(self).expect("report serializes");
        let report = RunReport {
            body: self,
            report_digest: hex::encode(Sha256::digest(&canonical)),
            timing: elapsed_ms.map(|total_ms| Timing { total_ms }),
        };
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        text
    }
}

pub fn verdict_json(v: &Verdict, algebras: [&Algebra; 2]) -> Value {
    let witness = v.witness.as_ref().map(|w| {
        let items: Vec<Value> = w
            .items
            .iter()
            .map(|i| {
                json!({
                    "role": i.role,
                    "language": i.side.number(),
                    "value": algebras[i.side.index()].render(i.value),
                })
            })
            .collect();
        json!({
            "operator": w.operator.map(|op| op.to_string()),
            "items": items,
            "text": w.describe(algebras),
        })
    });
    json!({ "axiom": v.axiom, "passed": v.passed, "witness": witness })
}

/// One line per verdict.
pub fn report_text(name: &str, report: &AxiomReport, algebras: [&Algebra; 2]) -> String {
    let status = |ok: bool| if ok { "pass" } else { "FAIL" };
    let mut out = format!("{name}: {}\n", status(report.passed()));
    for v in &report.verdicts {
        out.push_str(&format!("  {:<22} {}", v.axiom, status(v.passed)));
        if let Some(w) = &v.witness {
            out.push_str(&format!("  [{}]", w.describe(algebras)));
        }
        out.push('\n');
    }
    out
}
