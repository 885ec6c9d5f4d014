//! Command-line interface: ray catalogs, collection transforms and walks,
//! randomized verification, gauge equivalence/canonicalization, and SVG
//! diagrams, over JSON system documents.
//!
//! Exit codes: 0 success, 1 verification or equivalence failure,
//! 2 usage/IO/validation errors (one-line diagnostic on stderr).

use clap::{ArgGroup, Parser, Subcommand};
use std::path::{Path, PathBuf};

use stokesray::document::{
    collection_to_document, document_to_collection, emit_system, format_significant, parse_angle,
    parse_system, SystemDocument,
};
use stokesray::oracle::{invariant_suite, table_check_with, OracleError};
use stokesray::{
    canonical_gauge, gauge_equivalent, ordering_on_ray, sector_layout, separating_rays,
    GaugeWitness, StokesCollection, WalkState,
};

#[derive(Parser)]
#[command(
    name = "stokesray",
    version,
    about = "Ray geometry of irregular singularities and Stokes matrix transformations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the separating/critical ray catalog and the ordering on every arc
    Rays { file: PathBuf },
    /// Move the starting ray to THETA and print the transformed document
    Transform {
        file: PathBuf,
        /// Target angle, e.g. "1.5708", "1.5708rad" or "90deg"
        #[arg(long)]
        theta: String,
    },
    /// Print one collection block per arc traversed
    #[command(group(ArgGroup::new("target").required(true).args(["full_turn", "to"])))]
    Walk {
        file: PathBuf,
        /// Cross every separating ray once, returning to the starting ray
        #[arg(long)]
        full_turn: bool,
        /// Walk counterclockwise up to this angle
        #[arg(long)]
        to: Option<String>,
    },
    /// Run the randomized verification suites; exit 0 iff everything passes
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide diagonal gauge equivalence of two documents
    Equiv { file_a: PathBuf, file_b: PathBuf },
    /// Print the canonical gauge of the collection (document on stdout,
    /// witness on stderr)
    Canon { file: PathBuf },
    /// Render the rays and sectors as a deterministic SVG
    Diagram {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() {
    // Die quietly on closed pipes (`stokesray rays f.json | head`) instead
    // of panicking in println!.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}

fn load(path: &Path) -> Result<(SystemDocument, StokesCollection), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let doc = parse_system(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let coll = document_to_collection(&doc).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((doc, coll))
}

fn order_label(perm: &[usize]) -> String {
    perm.iter()
        .map(|&i| format!("λ{}", i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn pairs_label(pairs: &[(usize, usize)]) -> String {
    pairs
        .iter()
        .map(|&(p, q)| format!("({},{})", p + 1, q + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_block(coll: &StokesCollection) {
    println!(
        "== starting ray theta = {} rad  order: {}",
        format_significant(coll.starting_angle()),
        order_label(coll.eigen_permutation())
    );
    for (j, m) in coll.matrices().iter().enumerate() {
        println!("C({}) =", j + 1);
        print!("{m}");
    }
    println!();
}

fn run(command: Command) -> Result<i32, String> {
    match command {
        Command::Rays { file } => {
            let (_, coll) = load(&file)?;
            let config = coll.config();
            let catalog = separating_rays(config).map_err(|e| e.to_string())?;
            println!(
                "configuration: k = {}, n = {};  {} separating rays (u = {} critical lines, 2ku = {})",
                config.k(),
                config.n(),
                catalog.separating.len(),
                catalog.count_u,
                2 * config.k() * catalog.count_u
            );
            println!("separating rays:");
            for (i, ray) in catalog.separating.iter().enumerate() {
                println!(
                    "  phi_{:<2} = {} rad   pairs: {}",
                    i + 1,
                    format_significant(ray.angle),
                    pairs_label(&ray.pairs)
                );
            }
            println!("critical rays:");
            for (i, ray) in catalog.critical.iter().enumerate() {
                println!(
                    "  psi_{:<2} = {} rad   pairs: {}",
                    i + 1,
                    format_significant(ray.angle),
                    pairs_label(&ray.pairs)
                );
            }
            println!("arc orderings:");
            let m = catalog.separating.len();
            for i in 0..m {
                let a = catalog.separating[i].angle;
                let b = catalog.separating[(i + 1) % m].angle;
                let gap = stokesray::angle::ccw_distance(a, b);
                let mid = stokesray::angle::normalize(a + gap / 2.0);
                let ordering = ordering_on_ray(config, mid);
                println!(
                    "  (phi_{}, phi_{}): order {}  partition ({})",
                    i + 1,
                    (i + 1) % m + 1,
                    order_label(&ordering.permutation),
                    ordering
                        .partition
                        .parts()
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
            }
            Ok(0)
        }

        Command::Transform { file, theta } => {
            let (_, coll) = load(&file)?;
            let theta = parse_angle(&theta).map_err(|e| e.to_string())?;
            let walked = WalkState::new(coll)
                .retarget(theta)
                .map_err(|e| e.to_string())?;
            print!(
                "{}",
                emit_system(&collection_to_document(walked.collection()))
            );
            Ok(0)
        }

        Command::Walk {
            file,
            full_turn,
            to,
        } => {
            let (_, coll) = load(&file)?;
            let angle_tol = coll.config().tolerances().angle;
            let catalog = separating_rays(coll.config()).map_err(|e| e.to_string())?;
            let mut state = WalkState::new(coll);
            if full_turn {
                print_block(state.collection());
                let total = catalog.separating.len();
                for step in 0..total {
                    state = state.cross_ray().map_err(|e| e.to_string())?;
                    if step + 1 == total {
                        let config = state.collection().config().clone();
                        state = finish_at(state, config, None)?;
                    }
                    print_block(state.collection());
                }
            } else {
                let theta = parse_angle(&to.expect("clap enforces the target group"))
                    .map_err(|e| e.to_string())?;
                if catalog.is_separating(theta, angle_tol) {
                    return Err(format!("target angle {theta} rad is a separating ray"));
                }
                print_block(state.collection());
                let start = state.collection().starting_angle();
                let span = stokesray::angle::ccw_distance(start, theta);
                let crossings = catalog
                    .separating
                    .iter()
                    .filter(|r| {
                        let d = stokesray::angle::ccw_distance(start, r.angle);
                        d > angle_tol && d < span
                    })
                    .count();
                if crossings == 0 {
                    state = state.retarget(theta).map_err(|e| e.to_string())?;
                    print_block(state.collection());
                } else {
                    for step in 0..crossings {
                        state = state.cross_ray().map_err(|e| e.to_string())?;
                        if step + 1 == crossings {
                            let config = state.collection().config().clone();
                            state = finish_at(state, config, Some(theta))?;
                        }
                        print_block(state.collection());
                    }
                }
            }
            Ok(0)
        }

        Command::Verify { file, trials, seed } => {
            let (_, coll) = load(&file)?;
            let config = coll.config();
            let mut all_pass = true;
            match table_check_with(config, trials, seed) {
                Ok(report) => {
                    println!("table check (k = 1, n = 3 shape):");
                    print!("{report}");
                    all_pass &= report.all_pass();
                }
                Err(OracleError::ConfigShape(reason)) => {
                    println!("table check skipped: {reason}");
                }
                Err(e) => return Err(e.to_string()),
            }
            println!("invariant suite:");
            let report = invariant_suite(trials, seed);
            print!("{report}");
            all_pass &= report.all_pass();
            println!("overall: {}", if all_pass { "PASS" } else { "FAIL" });
            Ok(if all_pass { 0 } else { 1 })
        }

        Command::Equiv { file_a, file_b } => {
            let (_, a) = load(&file_a)?;
            let (_, b) = load(&file_b)?;
            let (equivalent, witness) = gauge_equivalent(&a, &b).map_err(|e| e.to_string())?;
            if equivalent {
                println!("gauge equivalent");
                print_witness(&witness.expect("witness accompanies equivalence"));
                Ok(0)
            } else {
                println!("not gauge equivalent");
                Ok(1)
            }
        }

        Command::Canon { file } => {
            let (_, coll) = load(&file)?;
            let (canon, witness) = canonical_gauge(&coll).map_err(|e| e.to_string())?;
            print!("{}", emit_system(&collection_to_document(&canon)));
            eprintln!("witness diagonals D_j (C'(j) = D_j C(j) D_{{j+1}}^-1):");
            for (j, d) in witness.diagonals.iter().enumerate() {
                eprintln!(
                    "  D{} = diag({})",
                    j + 1,
                    d.iter()
                        .map(|z| format!("{:+.12e}{:+.12e}i", z.re, z.im))
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            Ok(0)
        }

        Command::Diagram { file, output } => {
            let (_, coll) = load(&file)?;
            let config = coll.config();
            let catalog = separating_rays(config).map_err(|e| e.to_string())?;
            let layout = sector_layout(config, coll.starting_angle()).map_err(|e| e.to_string())?;
            let svg = stokesray::svg::emit_svg(&catalog, &layout);
            std::fs::write(&output, svg)
                .map_err(|e| format!("cannot write {}: {e}", output.display()))?;
            Ok(0)
        }
    }
}

/// Re-anchors the final walk block: at `Some(theta)` for a targeted walk, or
/// back at the original starting ray for a completed full turn.
fn finish_at(
    state: WalkState,
    config: stokesray::EigenvalueConfig,
    theta: Option<f64>,
) -> Result<WalkState, String> {
    match theta {
        Some(theta) => state.retarget(theta).map_err(|e| e.to_string()),
        None => {
            let anchored = StokesCollection::new(
                config,
                state.collection().matrices().to_vec(),
                state
                    .history()
                    .first()
                    .map(|r| r.from_angle)
                    .unwrap_or(state.collection().starting_angle()),
            )
            .map_err(|e| e.to_string())?;
            Ok(WalkState::new(anchored))
        }
    }
}

fn print_witness(witness: &GaugeWitness) {
    println!("witness diagonals D_j (b(j) = D_j a(j) D_{{j+1}}^-1):");
    for (j, d) in witness.diagonals.iter().enumerate() {
        println!(
            "  D{} = diag({})",
            j + 1,
            d.iter()
                .map(|z| format!("{:+.12e}{:+.12e}i", z.re, z.im))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
}
