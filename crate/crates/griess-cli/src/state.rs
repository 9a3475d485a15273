//! State directory layout and content-addressed manifest.
//!
//! ```text
//! state/
//!   manifest.json       file -> sha256, plus cutoffs and the input digest
//!   algebra.json        the input document, byte for byte
//!   tower/b0.json       dimensions, restriction and evaluation matrices
//!   tower/omega0/w_*.txt   weight-space bases, one function per line
//!   character.json      the augmentation character's functions
//!   reports/report.json
//! ```

use griess::coalgebra::{
    internalize, load_algebra, weights_of_length, CoalgebraTower, Weight,
};
use griess::error::{Error, Result};
use griess::funspaces::{echelonized_space, SpaceKind};
use griess::linalg::Matrix;
use griess::quotient::Character;
use griess::rat::{format_rat, parse_rat};
use griess::ratfun::{parse_ratfun, RatFun};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub input_digest: String,
    pub max_length: usize,
    pub max_degree: i64,
    pub files: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct TowerDoc {
    b0_dims: Vec<usize>,
    restr: Vec<Vec<Vec<String>>>,
    weights: Vec<WeightDoc>,
}

#[derive(Serialize, Deserialize)]
struct WeightDoc {
    slots: Vec<usize>,
    dim: usize,
    new_gens: usize,
    ev: Vec<Vec<String>>,
    basis_file: String,
}

fn matrix_to_doc(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| format_rat(&m[(i, j)])).collect())
        .collect()
}

fn matrix_from_doc(doc: &[Vec<String>], cols_hint: usize) -> Result<Matrix> {
    let rows = doc.len();
    let cols = doc.first().map(|r| r.len()).unwrap_or(cols_hint);
    let mut m = Matrix::zero(rows, cols);
    for (i, row) in doc.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = parse_rat(v)?;
        }
    }
    Ok(m)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn weight_filename(w: &Weight) -> String {
    if w.is_empty() {
        "tower/omega0/w_unit.txt".into()
    } else {
        format!(
            "tower/omega0/w_{}.txt",
            w.0.iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join("_")
        )
    }
}

pub struct StateWriter {
    pub dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl StateWriter {
    pub fn create(dir: &Path) -> std::io::Result<StateWriter> {
        fs::create_dir_all(dir.join("tower/omega0"))?;
        fs::create_dir_all(dir.join("reports"))?;
        Ok(StateWriter {
            dir: dir.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> std::io::Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, bytes)?;
        self.files.insert(rel.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn finish(mut self, input_digest: &str, max_length: usize, max_degree: i64) -> std::io::Result<()> {
        let manifest = Manifest {
            format: "griess-state-1".into(),
            input_digest: input_digest.into(),
            max_length,
            max_degree,
            files: std::mem::take(&mut self.files),
        };
        let bytes = serde_json::to_vec_pretty(&manifest).expect("manifest json");
        fs::write(self.dir.join("manifest.json"), bytes)
    }
}

pub fn save_state(
    dir: &Path,
    algebra_text: &str,
    tower: &CoalgebraTower,
    chi: &Character,
    max_degree: i64,
) -> std::io::Result<()> {
    let mut w = StateWriter::create(dir)?;
    w.write("algebra.json", algebra_text.as_bytes())?;
    let mut weights = Vec::new();
    for l in 0..=tower.max_length {
        for wt in weights_of_length(tower.algebra.n, l) {
            let space = &tower.omega0[&wt];
            let rel = weight_filename(&wt);
            let mut lines = vec![format!("nvars {}", space.l)];
            for b in &space.basis {
                lines.push(b.to_string());
            }
            w.write(&rel, lines.join("\n").as_bytes())?;
            weights.push(WeightDoc {
                slots: wt.0.clone(),
                dim: space.dim(),
                new_gens: tower.new_gens.get(&wt).copied().unwrap_or(0),
                ev: matrix_to_doc(&tower.ev[&wt]),
                basis_file: rel,
            });
        }
    }
    let tower_doc = TowerDoc {
        b0_dims: tower.b0_dims.clone(),
        restr: tower.restr.iter().map(matrix_to_doc).collect(),
        weights,
    };
    w.write(
        "tower/b0.json",
        &serde_json::to_vec_pretty(&tower_doc).expect("tower json"),
    )?;
    // character functions
    let chi_doc: BTreeMap<String, String> = chi
        .functions
        .iter()
        .map(|(wt, f)| {
            (
                wt.0.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("_"),
                f.to_string(),
            )
        })
        .collect();
    w.write(
        "character.json",
        &serde_json::to_vec_pretty(&chi_doc).expect("chi json"),
    )?;
    w.finish(&sha256_hex(algebra_text.as_bytes()), tower.max_length, max_degree)
}

pub struct LoadedState {
    pub algebra_text: String,
    pub tower: CoalgebraTower,
    pub chi: Character,
    pub max_degree: i64,
}

pub fn load_state(dir: &Path) -> Result<LoadedState> {
    let manifest: Manifest = serde_json::from_slice(
        &fs::read(dir.join("manifest.json"))
            .map_err(|e| Error::State(format!("manifest: {e}")))?,
    )
    .map_err(|e| Error::State(format!("manifest: {e}")))?;
    // integrity: every listed file must hash to its manifest entry
    for (rel, digest) in &manifest.files {
        let bytes = fs::read(dir.join(rel))
            .map_err(|e| Error::State(format!("{rel}: {e}")))?;
        let got = sha256_hex(&bytes);
        if &got != digest {
            return Err(Error::State(format!(
                "integrity failure in {rel}: expected {digest}, found {got}"
            )));
        }
    }
    let algebra_text = fs::read_to_string(dir.join("algebra.json"))
        .map_err(|e| Error::State(format!("algebra.json: {e}")))?;
    if sha256_hex(algebra_text.as_bytes()) != manifest.input_digest {
        return Err(Error::State("algebra digest mismatch".into()));
    }
    let input = load_algebra(&algebra_text)?;
    let algebra = internalize(&input)?;
    let tower_doc: TowerDoc = serde_json::from_slice(
        &fs::read(dir.join("tower/b0.json"))
            .map_err(|e| Error::State(format!("tower/b0.json: {e}")))?,
    )
    .map_err(|e| Error::State(format!("tower doc: {e}")))?;
    let mut tower = CoalgebraTower::new(algebra);
    tower.max_length = manifest.max_length;
    tower.b0_dims = tower_doc.b0_dims.clone();
    tower.restr = tower_doc
        .restr
        .iter()
        .map(|d| matrix_from_doc(d, 0))
        .collect::<Result<_>>()?;
    for wd in &tower_doc.weights {
        let wt = Weight::new(wd.slots.clone());
        let text = fs::read_to_string(dir.join(&wd.basis_file))
            .map_err(|e| Error::State(format!("{}: {e}", wd.basis_file)))?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        let nvars: usize = header
            .strip_prefix("nvars ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::State(format!("bad header in {}", wd.basis_file)))?;
        let basis: Vec<RatFun> = lines
            .map(|line| parse_ratfun(nvars, line))
            .collect::<Result<_>>()?;
        if basis.len() != wd.dim {
            return Err(Error::State(format!(
                "dimension mismatch in {}",
                wd.basis_file
            )));
        }
        let space = echelonized_space(nvars, SpaceKind::Admissible, &basis);
        if space.dim() != wd.dim {
            return Err(Error::State(format!(
                "stored basis of {} is dependent",
                wd.basis_file
            )));
        }
        tower.omega0.insert(wt.clone(), space);
        tower.ev.insert(wt.clone(), matrix_from_doc(&wd.ev, wd.dim)?);
        tower.new_gens.insert(wt, wd.new_gens);
    }
    let chi_doc: BTreeMap<String, String> = serde_json::from_slice(
        &fs::read(dir.join("character.json"))
            .map_err(|e| Error::State(format!("character.json: {e}")))?,
    )
    .map_err(|e| Error::State(format!("character doc: {e}")))?;
    let mut functions = BTreeMap::new();
    for (key, text) in &chi_doc {
        let slots: Vec<usize> = if key.is_empty() {
            vec![]
        } else {
            key.split('_')
                .map(|s| s.parse().map_err(|_| Error::State("bad weight key".into())))
                .collect::<Result<_>>()?
        };
        let w = Weight::new(slots);
        functions.insert(w.clone(), parse_ratfun(w.len(), text)?);
    }
    Ok(LoadedState {
        algebra_text,
        tower,
        chi: Character { functions },
        max_degree: manifest.max_degree,
    })
}
