//! Acceptance gate: one test per release criterion, each printing a PASS
//! line with the measured residual/runtime. Run with
//!
//! ```bash
//! cargo test -p stokesray-cli --test acceptance -- --nocapture
//! ```
//!
//! Criteria:
//! 1. k=1, n=3 walk reproduces all four hard-coded transformation-table
//!    rows over 100 random instantiations, residual ≤ 1e-12, < 1 s.
//! 2. Half-turn diagonal identity and recovered witnesses, 100/100.
//! 3. Block reversal around every separating ray of 10⁴ random
//!    configurations (n ≤ 6, k ≤ 3), zero mismatches, < 30 s.
//! 4. Characteristic-polynomial invariance under every crossing of 500
//!    random walks, relative tolerance 1e-10.
//! 5. Cross/uncross round trips to 1e-12 and full-turn gauge equivalence
//!    with identity net permutation, 500/500.
//! 6. Commuting passages on the Λ = (4+i, 3+i, 2, 1) instance and 100
//!    constructed multi-block instances, both signs of ε, within 1e-6.
//! 7. Ray-count law (2k·u) and one separating ray per pair per sector for
//!    10⁴ sampled configurations.
//! 8. Lossless parse→emit round trip and CLI exit codes matching report
//!    status.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stokesray::document::{collection_to_document, emit_system, parse_system};
use stokesray::oracle::{
    block_reversal_trials, commuting_passage_trials, ray_count_trials, table_check,
    walk_invariant_trials, TrialReport,
};
use stokesray::{ComplexMatrix, EigenvalueConfig, StokesCollection, WalkState};

const SEED: u64 = 20260809;

fn stat<'r>(report: &'r TrialReport, name: &str) -> &'r stokesray::oracle::PropertyStat {
    report
        .properties
        .iter()
        .find(|p| p.name == name)
        .unwrap_or_else(|| panic!("property {name} missing from report"))
}

#[test]
fn criterion_1_table_reproduction() {
    // Drive the full-turn walk on the k=1, n=3 configuration and compare
    // the collection on each of the first four arcs against the hard-coded
    // table rows, for 100 random complex instantiations.
    let config = stokesray::oracle::table_config();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let unit = |rng: &mut ChaCha8Rng| {
        Complex64::from_polar(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inputs = stokesray::oracle::TableInputs {
            cp: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i <= j {
                        unit(&mut rng)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }),
            cm: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i >= j {
                        unit(&mut rng)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }),
        };
        let (upper, lower) = inputs.matrices();
        let mut state =
            WalkState::new(StokesCollection::new(config.clone(), vec![upper, lower], 0.0).unwrap());
        for row in 0..=3 {
            if row > 0 {
                state = state.cross_ray().unwrap();
            }
            let (want_upper, want_lower) = stokesray::oracle::table_row(&inputs, row);
            let residual = state
                .collection()
                .matrix(0)
                .max_rel_diff(&want_upper)
                .max(state.collection().matrix(1).max_rel_diff(&want_lower));
            assert!(
                residual <= 1e-12,
                "row {row} residual {residual:.3e} exceeds 1e-12"
            );
            worst = worst.max(residual);
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "table walk took {elapsed:?}, budget is 1 s"
    );

    // The randomized retarget-based oracle run must agree as well.
    let report = table_check(100, SEED);
    for row in ["table_row_1", "table_row_2", "table_row_3"] {
        let s = stat(&report, row);
        assert_eq!(s.fail, 0, "{report}");
        assert_eq!(s.pass, 100, "{report}");
        assert!(s.worst_residual <= 1e-12, "{report}");
    }
    println!(
        "ACCEPTANCE 1 PASS: four table rows reproduced by the walk in 100/100 trials, worst residual {worst:.2e}, runtime {elapsed:?}"
    );
}

#[test]
fn criterion_2_half_turn_identity() {
    let report = table_check(100, SEED ^ 0x2222);
    let identity = stat(&report, "half_turn_identity");
    assert_eq!(identity.pass, 100, "{report}");
    assert_eq!(identity.fail, 0, "{report}");
    assert!(identity.worst_residual <= 1e-12, "{report}");
    let witness = stat(&report, "half_turn_witness");
    assert_eq!(witness.pass, 100, "{report}");
    assert_eq!(witness.fail, 0, "{report}");
    println!(
        "ACCEPTANCE 2 PASS: half-turn identity and proportional witnesses in 100/100 trials, worst residual {:.2e}",
        identity.worst_residual.max(witness.worst_residual)
    );
}

#[test]
fn criterion_3_block_reversal_lemma() {
    let start = Instant::now();
    let report = block_reversal_trials(10_000, SEED ^ 0x3333);
    let elapsed = start.elapsed();
    let s = stat(&report, "block_reversal");
    assert_eq!(s.pass, 10_000, "{report}");
    assert_eq!(s.fail, 0, "{report}");
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "block reversal took {elapsed:?}, budget is 30 s"
    );
    println!(
        "ACCEPTANCE 3 PASS: block reversal verified around every separating ray of 10000 configurations, zero mismatches, runtime {elapsed:?}"
    );
}

#[test]
fn criterion_4_conjugacy_invariance() {
    let report = walk_invariant_trials(500, SEED ^ 0x4444);
    let s = stat(&report, "conjugacy_invariance");
    assert_eq!(s.pass, 500, "{report}");
    assert_eq!(s.fail, 0, "{report}");
    assert!(s.worst_residual <= 1e-10, "{report}");
    println!(
        "ACCEPTANCE 4 PASS: characteristic polynomial invariant under every crossing of 500 walks, worst residual {:.2e}",
        s.worst_residual
    );
}

#[test]
fn criterion_5_round_trip_and_full_turn() {
    let report = walk_invariant_trials(500, SEED ^ 0x5555);
    let round = stat(&report, "round_trip");
    assert_eq!(round.pass, 500, "{report}");
    assert_eq!(round.fail, 0, "{report}");
    assert!(round.worst_residual <= 1e-12, "{report}");
    let full = stat(&report, "full_turn_gauge");
    assert_eq!(full.pass, 500, "{report}");
    assert_eq!(full.fail, 0, "{report}");
    println!(
        "ACCEPTANCE 5 PASS: uncross∘cross identity to {:.2e} and 500/500 full turns gauge equivalent with identity permutation",
        round.worst_residual
    );
}

#[test]
fn criterion_6_commuting_passages() {
    // The fixed instance: Λ = (4+i, 3+i, 2, 1), k = 1, partition
    // (0,2,0,2,0) at φ = π/2.
    let config = EigenvalueConfig::new(
        1,
        vec![
            Complex64::new(4.0, 1.0),
            Complex64::new(3.0, 1.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
        ],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x6666);
    let unit = |rng: &mut ChaCha8Rng| {
        Complex64::from_polar(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    let matrices: Vec<ComplexMatrix> = (0..2)
        .map(|j| {
            ComplexMatrix::from_fn(4, |r, c| {
                let keep = if j % 2 == 0 { r <= c } else { r >= c };
                if keep {
                    unit(&mut rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    let coll = StokesCollection::new(config.clone(), matrices, 0.0).unwrap();
    let arc = stokesray::separating_rays(&config).unwrap().min_arc_width();
    let epsilon = 1e-3 * arc;
    assert!(
        WalkState::new(coll)
            .perturbed_composition_check(epsilon)
            .unwrap(),
        "fixed multi-block instance disagreed"
    );

    let report = commuting_passage_trials(100, SEED ^ 0x6666);
    let s = stat(&report, "commuting_passages");
    assert_eq!(s.pass, 100, "{report}");
    assert_eq!(s.fail, 0, "{report}");
    println!(
        "ACCEPTANCE 6 PASS: split crossings (both signs of ε = 1e-3·arc) match the direct multi-block crossing on the fixed instance and 100 random instances"
    );
}

#[test]
fn criterion_7_ray_count_law() {
    let report = ray_count_trials(10_000, SEED ^ 0x7777);
    let count = stat(&report, "ray_count_law");
    assert_eq!(count.pass, 10_000, "{report}");
    assert_eq!(count.fail, 0, "{report}");
    let sector = stat(&report, "sector_containment");
    assert_eq!(sector.pass, 10_000, "{report}");
    assert_eq!(sector.fail, 0, "{report}");
    println!(
        "ACCEPTANCE 7 PASS: 2k·u separating rays and one ray per pair per sector in 10000/10000 configurations"
    );
}

#[test]
fn criterion_8_cli_and_format_contract() {
    // Lossless parse→emit round trip over randomized documents.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x8888);
    for _ in 0..200 {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=5);
        let mut re = 0.0;
        let lambdas: Vec<Complex64> = (0..n)
            .map(|_| {
                let z = Complex64::new(re, rng.gen_range(-2.0..2.0));
                re -= rng.gen_range(0.4..1.6);
                z
            })
            .collect();
        let Ok(config) = EigenvalueConfig::new(k, lambdas) else {
            continue;
        };
        let matrices: Vec<ComplexMatrix> = (0..2 * k)
            .map(|j| {
                ComplexMatrix::from_fn(n, |r, c| {
                    let keep = if j % 2 == 0 { r <= c } else { r >= c };
                    if keep {
                        Complex64::from_polar(
                            rng.gen_range(0.5..2.0),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        let Ok(coll) = StokesCollection::new(config, matrices, 0.0) else {
            continue;
        };
        let doc = collection_to_document(&coll);
        let text = emit_system(&doc);
        let parsed = parse_system(&text).expect("emitted document parses");
        assert_eq!(parsed, doc, "round trip changed the document");
        assert_eq!(emit_system(&parsed), text, "emit is not canonical");
    }

    // CLI exit codes track the verification status.
    let dir = std::env::temp_dir().join(format!("stokesray-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    let table = stokesray::oracle::table_config();
    let unit = |rng: &mut ChaCha8Rng| {
        Complex64::from_polar(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    let matrices: Vec<ComplexMatrix> = (0..2)
        .map(|j| {
            ComplexMatrix::from_fn(3, |r, c| {
                let keep = if j % 2 == 0 { r <= c } else { r >= c };
                if keep {
                    unit(&mut rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    let coll = StokesCollection::new(table, matrices, 0.0).unwrap();
    std::fs::write(&good, emit_system(&collection_to_document(&coll))).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_stokesray"))
        .args([
            "verify",
            good.to_str().unwrap(),
            "--trials",
            "25",
            "--seed",
            "5",
        ])
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("overall: PASS"), "{text}");
    assert_eq!(out.status.code(), Some(0), "exit code mismatch: {text}");

    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_stokesray"))
        .args(["verify", bad.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));

    println!(
        "ACCEPTANCE 8 PASS: 200 documents round-tripped losslessly; verify exit codes match report status"
    );
}
