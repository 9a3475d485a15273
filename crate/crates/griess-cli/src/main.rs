//! Command-line pipeline: function-space bases, the degree-zero tower, the
//! truncated vertex algebra, verification suites, and quotient dimension
//! tables, with a content-addressed state directory between stages.
//!
//! Exit codes: 0 success, 1 check failures, 2 usage/parse errors,
//! 3 algebra validation errors.

mod report;
mod state;

use clap::{Parser, Subcommand};
use griess::axioms::{
    check_b0_polynomiality, check_commutator, check_griess, check_unit_translation,
    check_virasoro, CheckRanges, CheckReport, QuotientView,
};
use griess::coalgebra::{build_tower, internalize, load_algebra};
use griess::error::Error;
use griess::funspaces::{self, SpaceCache};
use griess::quotient::{
    augmentation_character, character_from_coords, corr_quotient_dim, simple_quotient_dims,
    Character, CorrFamily,
};
use griess::vertexbuild::build_truncation;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "griess", version, about = "Exact OZ vertex algebra engine")]
struct Cli {
    /// Worker threads (recorded in reports; evaluation is sequential and
    /// deterministic regardless).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Print the dimension and basis of a function space.
    Spaces {
        /// Number of variables.
        #[arg(long)]
        l: usize,
        /// regular | admissible | indecomposable | simple-pole |
        /// simple-pole-indecomposable | ord-bounded
        #[arg(long, default_value = "admissible")]
        kind: String,
        /// Pole bound for ord-bounded mode.
        #[arg(long, default_value_t = -4)]
        bound: i64,
        /// Homogeneous degree for ord-bounded mode (defaults to -2l).
        #[arg(long)]
        degree: Option<i64>,
        /// Print the basis functions, not only the dimension.
        #[arg(long)]
        basis: bool,
    },
    /// Build the tower and character for an algebra and write the state.
    Build {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_length: usize,
        #[arg(long, default_value_t = 6)]
        max_degree: i64,
        #[arg(long)]
        out: PathBuf,
        /// Proceed despite a degenerate Gram form.
        #[arg(long)]
        allow_degenerate: bool,
    },
    /// Run verification suites against a state directory.
    Verify {
        #[arg(long)]
        state: PathBuf,
        /// all | unit | commutator | virasoro | griess | b0
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Quotient dimension table.
    Quotient {
        #[arg(long)]
        state: PathBuf,
        /// aug, or a path to a character file (weight -> coordinates).
        #[arg(long, default_value = "aug")]
        character: String,
        #[arg(long, default_value_t = 6)]
        max_degree: i64,
        /// Weight-length cap per side of the pairing.
        #[arg(long)]
        len_cap: Option<usize>,
        #[arg(long)]
        allow_degenerate: bool,
    },
    /// Re-emit the stored report of a state directory.
    Report {
        #[arg(long)]
        state: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        eprintln!("note: --threads {t} recorded; evaluation is sequential and deterministic");
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::AlgebraInput(_) | Error::Character(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Commands::Spaces {
            l,
            kind,
            bound,
            degree,
            basis,
        } => {
            let mut cache = SpaceCache::new();
            let space = match kind.as_str() {
                "regular" => funspaces::regular_space(l, &vec![4; l], -4)?,
                "admissible" => cache.admissible(l)?.clone(),
                "indecomposable" => cache.indecomposable(l)?.clone(),
                "simple-pole" => cache.simple_pole(l)?.clone(),
                "simple-pole-indecomposable" => cache.simple_pole_indecomposable(l)?.clone(),
                "ord-bounded" => {
                    let d = degree.unwrap_or(-2 * l as i64);
                    funspaces::ord_bounded_space(l, bound, d)?
                }
                other => {
                    eprintln!("unknown kind {other:?}");
                    return Ok(ExitCode::from(2));
                }
            };
            println!("kind = {kind}, l = {l}");
            println!("dim = {}", space.dim());
            if basis {
                for b in &space.basis {
                    println!("{b}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Commands::Build {
            algebra,
            max_length,
            max_degree,
            out,
            allow_degenerate,
        } => {
            if max_length < 2 || max_degree < 2 {
                eprintln!("error: build needs max-length >= 2 and max-degree >= 2");
                return Ok(ExitCode::from(2));
            }
            let text = std::fs::read_to_string(&algebra)
                .map_err(|e| Error::State(format!("{}: {e}", algebra.display())))?;
            let input = load_algebra(&text)?;
            if !input.nondegenerate {
                eprintln!("warning: the Gram form is degenerate");
                if !allow_degenerate {
                    eprintln!("         (pass --allow-degenerate to proceed to quotients)");
                }
            }
            let alg = internalize(&input)?;
            let mut cache = SpaceCache::new();
            let t0 = std::time::Instant::now();
            let tower = build_tower(alg, max_length, &mut cache)?;
            let chi = augmentation_character(&tower)?;
            eprintln!(
                "tower built to length {max_length} in {:.1?}; B_0 dims {:?}",
                t0.elapsed(),
                tower.b0_dims
            );
            state::save_state(&out, &text, &tower, &chi, max_degree)
                .map_err(|e| Error::State(format!("writing state: {e}")))?;
            let doc = report::build_report(&text, &tower, max_degree, &[], &BTreeMap::new(), None);
            report::write_report(&out, &doc)?;
            println!("state written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Commands::Verify { state, suite } => {
            let loaded = state::load_state(&state)?;
            let trunc = build_truncation(loaded.tower, state_len(&loaded.chi), loaded.max_degree)?;
            let family = CorrFamily::from_character(&loaded.chi);
            let view = QuotientView {
                trunc: &trunc,
                family: &family,
            };
            let ranges = CheckRanges {
                n_min: -4,
                n_max: 6,
                max_degree: loaded.max_degree.min(6),
            };
            let mut reports: Vec<CheckReport> = Vec::new();
            let has_unit = trunc.tower.algebra.omega.is_some();
            let want = |name: &str| suite == "all" || suite == name;
            if want("unit") {
                reports.push(check_unit_translation(&trunc, ranges)?);
            }
            if want("commutator") {
                reports.push(check_commutator(&trunc, ranges)?);
            }
            if want("virasoro") {
                if has_unit {
                    reports.push(check_virasoro(&trunc, &view)?);
                } else if suite == "virasoro" {
                    eprintln!("error: the input algebra has no unit");
                    return Ok(ExitCode::from(2));
                }
            }
            if want("griess") {
                reports.push(check_griess(&trunc, &view)?);
            }
            if want("b0") {
                reports.push(check_b0_polynomiality(&trunc.tower, trunc.tower.max_length)?);
            }
            let mut all_ok = true;
            for r in &reports {
                println!("{}", r.summary());
                for f in &r.failures {
                    println!("  FAIL {f}");
                }
                all_ok &= r.ok();
            }
            let doc = report::build_report(
                &loaded.algebra_text,
                &trunc.tower,
                loaded.max_degree,
                &reports,
                &BTreeMap::new(),
                None,
            );
            report::write_report(&state, &doc)?;
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Commands::Quotient {
            state,
            character,
            max_degree,
            len_cap,
            allow_degenerate,
        } => {
            let loaded = state::load_state(&state)?;
            let input = load_algebra(&loaded.algebra_text)?;
            if !input.nondegenerate && !allow_degenerate {
                eprintln!(
                    "error: the Gram form is degenerate; pass --allow-degenerate to proceed"
                );
                return Ok(ExitCode::from(3));
            }
            let chi: Character = if character == "aug" {
                loaded.chi.clone()
            } else {
                let text = std::fs::read_to_string(&character)
                    .map_err(|e| Error::State(format!("{character}: {e}")))?;
                let entries: BTreeMap<Vec<usize>, Vec<String>> = serde_json::from_str(&text)
                    .map_err(|e| Error::Character(format!("character file: {e}")))?;
                character_from_coords(&loaded.tower, &entries)?
            };
            let n = loaded.tower.algebra.n;
            let tower_len = loaded.tower.max_length;
            let cap = len_cap.unwrap_or(tower_len / 2);
            if 2 * cap > tower_len {
                eprintln!(
                    "error: len-cap {cap} needs tower length {} (have {tower_len})",
                    2 * cap
                );
                return Ok(ExitCode::from(2));
            }
            let family = CorrFamily::from_character(&chi);
            let mut table: BTreeMap<i64, usize> = BTreeMap::new();
            println!("d  dim V_d");
            for d in 0..=max_degree {
                let dim = corr_quotient_dim(&family, n, d, cap)?;
                println!("{d}  {dim}");
                table.insert(d, dim);
            }
            // cross-check against the truncation-assembled Gram where the
            // cutoffs allow it
            let trunc = build_truncation(loaded.tower.clone(), tower_len, loaded.max_degree)?;
            let dims2 = simple_quotient_dims(&trunc, &chi, max_degree.min(loaded.max_degree), cap)?;
            for (d, rank, _) in &dims2 {
                if let Some(expect) = table.get(d) {
                    if rank != expect {
                        eprintln!(
                            "error: assembled Gram rank {rank} disagrees with pairings {expect} at degree {d}"
                        );
                        return Ok(ExitCode::from(1));
                    }
                }
            }
            let doc = report::build_report(
                &loaded.algebra_text,
                &loaded.tower,
                loaded.max_degree,
                &[],
                &table,
                Some(cap),
            );
            report::write_report(&state, &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Commands::Report { state } => {
            let path = state.join("reports/report.json");
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::State(format!("{}: {e}", path.display())))?;
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// The tower length recorded through the character's weight list.
fn state_len(chi: &Character) -> usize {
    chi.functions.keys().map(|w| w.len()).max().unwrap_or(0)
}
