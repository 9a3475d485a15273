//! The machine-readable report document.  Every field is a pure function of
//! the input bytes and the cutoffs, so identical runs produce identical
//! bytes; wall-clock timings go to stderr, never into the document.

use crate::state::sha256_hex;
use griess::axioms::CheckReport;
use griess::coalgebra::{weights_of_length, CoalgebraTower};
use griess::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Serialize)]
pub struct ReportDoc {
    pub format: String,
    pub input_digest: String,
    pub max_length: usize,
    pub max_degree: i64,
    pub b0_dims: Vec<usize>,
    pub omega0_dims: BTreeMap<String, usize>,
    pub new_generators: BTreeMap<String, usize>,
    pub checks: Vec<CheckDoc>,
    pub quotient_dims: BTreeMap<String, usize>,
    pub pairing_len_cap: Option<usize>,
}

#[derive(Serialize)]
pub struct CheckDoc {
    pub suite: String,
    pub attempted: usize,
    pub passed: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

pub fn build_report(
    algebra_text: &str,
    tower: &CoalgebraTower,
    max_degree: i64,
    checks: &[CheckReport],
    quotient: &BTreeMap<i64, usize>,
    pairing_len_cap: Option<usize>,
) -> ReportDoc {
    let mut omega0_dims = BTreeMap::new();
    let mut new_generators = BTreeMap::new();
    for l in 0..=tower.max_length {
        for w in weights_of_length(tower.algebra.n, l) {
            let key = format!("{:?}", w.0);
            omega0_dims.insert(key.clone(), tower.omega0[&w].dim());
            if let Some(&g) = tower.new_gens.get(&w) {
                if g > 0 {
                    new_generators.insert(key, g);
                }
            }
        }
    }
    ReportDoc {
        format: "griess-report-1".into(),
        input_digest: sha256_hex(algebra_text.as_bytes()),
        max_length: tower.max_length,
        max_degree,
        b0_dims: tower.b0_dims.clone(),
        omega0_dims,
        new_generators,
        checks: checks
            .iter()
            .map(|r| CheckDoc {
                suite: r.suite.clone(),
                attempted: r.attempted,
                passed: r.passed,
                skipped: r.skipped,
                failures: r.failures.clone(),
            })
            .collect(),
        quotient_dims: quotient.iter().map(|(d, v)| (d.to_string(), *v)).collect(),
        pairing_len_cap,
    }
}

pub fn write_report(state_dir: &Path, doc: &ReportDoc) -> Result<()> {
    let bytes = serde_json::to_vec_pretty(doc)
        .map_err(|e| Error::State(format!("report serialization: {e}")))?;
    let dir = state_dir.join("reports");
    std::fs::create_dir_all(&dir).map_err(|e| Error::State(format!("reports dir: {e}")))?;
    std::fs::write(dir.join("report.json"), &bytes)
        .map_err(|e| Error::State(format!("report write: {e}")))?;
    Ok(())
}
