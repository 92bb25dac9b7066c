//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use infogen::adapt::{propose, refine, snap_align, ProposalParams, DEFAULT_SNAP_EPSILON};
use infogen::corpus::{learn_distribution, load_library, ExampleLibrary};
use infogen::init::Draft;
use infogen::retrieval::{distance, ExampleIndex, Query, QueryElement, Binding};
use infogen::rng::seeded;
use infogen::scorer::{self, build_tree, score_pair, ScorerModel, TrainConfig};
use infogen::statement::segment;
use infogen_cli::{cmd_generate, cmd_train, RunConfig, TrainArgs, DEFAULT_CORPUS, DEFAULT_MODEL};
use tempfile::TempDir;

use common::*;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn corpus() -> ExampleLibrary {
    load_library(DEFAULT_CORPUS).expect("bundled corpus")
}

fn c1_distribution() -> Outcome {
    let t = Instant::now();
    let mut r = seeded(1);
    let mut mismatches = 0;
    for _ in 0..100 {
        let lib = toy_library(&mut r, 20);
        if distribution_as_sets(&learn_distribution(&lib)) != count_choices_by_hand(&lib) {
            mismatches += 1;
        }
    }
    let el = t.elapsed();
    check(mismatches == 0 && el < Duration::from_secs(1), format!("100 libraries, {mismatches} mismatches, {el:.2?}"))
}

fn c2_distance() -> Outcome {
    let t = Instant::now();
    let mut r = seeded(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b) = (random_descriptors(&mut r, 6), random_descriptors(&mut r, 6));
        let expected = exhaustive_distance(&a, &b);
        let index = ExampleIndex { example_id: "x".into(), descriptors: a };
        let query = Query {
            choice: infogen::corpus::DesignChoice::new([]),
            elements: b.into_iter().map(|d| QueryElement { descriptor: d, binding: Binding::Text(String::new()) }).collect(),
        };
        worst = worst.max((distance(&index, &query) - expected).abs());
    }
    let el = t.elapsed();
    check(worst <= 1e-9 && el < Duration::from_secs(5), format!("1000 instances, max |Δ| {worst:.1e}, {el:.2?}"))
}

fn c3_tree() -> Outcome {
    let t = Instant::now();
    let mut r = seeded(3);
    let mut mismatches = 0;
    for _ in 0..500 {
        let layout = random_layout(&mut r, 5);
        if !same_tree(&build_tree(&layout), &reference_tree(&layout)) {
            mismatches += 1;
        }
    }
    let el = t.elapsed();
    check(mismatches == 0 && el < Duration::from_secs(10), format!("500 layouts, {mismatches} mismatches, {el:.2?}"))
}

fn c4_gradient() -> Outcome {
    let mut r = seeded(4);
    let (mut worst, mut checked, mut skipped): (f64, usize, usize) = (0.0, 0, 0);
    for _ in 0..50 {
        let model = random_small_model(&mut r);
        let (a, b) = (random_layout(&mut r, 4), random_layout(&mut r, 4));
        let g = gradient_check(&model, &a, &b, random_label(&mut r), 1e-5);
        worst = worst.max(g.max_rel_error);
        checked += g.checked;
        skipped += g.skipped;
    }
    check(worst <= 1e-4, format!("50 cases, {checked} partials checked ({skipped} skipped at ReLU kinks), max rel err {worst:.1e}"))
}

fn c5_training(out: &Path) -> Outcome {
    let args = TrainArgs {
        corpus_path: DEFAULT_CORPUS.into(),
        model_out: out.join("model.bin"),
        metrics_csv: Some(out.join("metrics.csv")),
        n_train: 20_000,
        n_val: 2_000,
        config: TrainConfig::default(),
    };
    let t = Instant::now();
    let report = cmd_train(&args, |_| {}).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    let acc = report.best.val_accuracy_original;
    check(
        acc >= 0.90 && el <= Duration::from_secs(30 * 60),
        format!("20000/2000 pairs, best epoch {}, pattern-1 val acc {acc:.4}, {el:.1?}", report.best.epoch),
    )
}

fn c6_refinement(model: &ScorerModel) -> Outcome {
    let lib = corpus();
    let (mut improved, mut slowest) = (0, Duration::ZERO);
    for run in 0..50u64 {
        let e = &lib.examples[run as usize % lib.examples.len()];
        let perturbed = scorer::perturb(e, 1000 + run);
        let mut initial = Draft::from_example(e);
        for (el, moved) in initial.elements.iter_mut().zip(&perturbed.layout.elements) {
            el.bbox = moved.bbox;
            el.refit_text();
        }
        let params = ProposalParams { iterations: 1000, seed: run, ..ProposalParams::default() };
        let t = Instant::now();
        let (fin, _) = refine(&initial, model, &params).map_err(|e| e.to_string())?;
        slowest = slowest.max(t.elapsed());
        if score_pair(model, &fin, &initial).0 > 0.5 {
            improved += 1;
        }
    }
    check(improved >= 48 && slowest <= Duration::from_secs(10), format!("{improved}/50 runs favor the refined draft, slowest run {slowest:.2?}"))
}

fn generate_into(dir: &Path, m_prime: usize) -> Result<infogen_cli::Manifest, String> {
    let config = RunConfig { output_dir: dir.to_path_buf(), m_prime, seed: 42, ..RunConfig::default() };
    cmd_generate("More than 74% of users are female", &config).map_err(|e| e.to_string())
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn c7_determinism() -> Outcome {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    generate_into(a.path(), 5)?;
    generate_into(b.path(), 5)?;
    let (fa, fb) = (dir_bytes(a.path()), dir_bytes(b.path()));
    check(fa == fb && !fa.is_empty(), format!("{} files compared byte for byte", fa.len()))
}

fn c8_segmentation() -> Outcome {
    let a = segment("More than 74% of users are female").map_err(|e| e.to_string())?;
    let ok_a = a.before.is_none()
        && a.modifier.as_deref() == Some("More than")
        && a.number == "74%"
        && a.after.as_deref() == Some("of users are female")
        && (a.percentage - 0.74).abs() < 1e-12;
    let b = segment("1 out of 3 patients have used a portal to connect with doctors.").map_err(|e| e.to_string())?;
    let ok_b = b.before.is_none()
        && b.modifier.is_none()
        && b.number == "1 out of 3"
        && b.after.as_deref() == Some("patients have used a portal to connect with doctors.")
        && (b.percentage - 1.0 / 3.0).abs() < 1e-12;
    check(ok_a && ok_b, format!("74% statement {}, 1-out-of-3 statement {}", ok_a, ok_b))
}

fn c9_end_to_end() -> Outcome {
    let corpus_choices = learn_distribution(&corpus()).len();
    let dir = TempDir::new().unwrap();
    let manifest = generate_into(dir.path(), 5)?;
    let mut choices: Vec<&str> = manifest.outputs.iter().map(|o| o.choice.as_str()).collect();
    choices.sort();
    choices.dedup();
    let mut inside = true;
    for o in &manifest.outputs {
        let d = Draft::from_json(&std::fs::read_to_string(dir.path().join(&o.draft)).unwrap()).unwrap();
        inside &= d.all_inside(1e-6);
        let svg = std::fs::read_to_string(dir.path().join(&o.svg)).unwrap();
        inside &= roxmltree::Document::parse(&svg).is_ok();
    }
    check(
        manifest.outputs.len() == 5 && choices.len() >= 3 && corpus_choices >= 8 && inside,
        format!(
            "{} SVGs, {} distinct choices (corpus has {corpus_choices}), all inside canvas: {inside}",
            manifest.outputs.len(),
            choices.len()
        ),
    )
}

fn c10_snap_idempotence() -> Outcome {
    let lib = corpus();
    let mut r = seeded(10);
    let params = ProposalParams { sigma_pos: 0.05, sigma_size: 0.2, ..ProposalParams::default() };
    let mut failures = 0;
    for i in 0..200 {
        let mut d = Draft::from_example(&lib.examples[i % lib.examples.len()]);
        for _ in 0..(1 + i % 7) {
            d = propose(&d, &params, &mut r).0;
        }
        let once = snap_align(&d, DEFAULT_SNAP_EPSILON);
        if snap_align(&once, DEFAULT_SNAP_EPSILON) != once {
            failures += 1;
        }
    }
    check(failures == 0, format!("200 drafts, {failures} not idempotent"))
}

fn main() {
    let scratch = TempDir::new().unwrap();
    let mut trained: Option<ScorerModel> = None;
    let mut failed = 0;
    for n in 1..=10 {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| match n {
            1 => c1_distribution(),
            2 => c2_distance(),
            3 => c3_tree(),
            4 => c4_gradient(),
            5 => {
                let r = c5_training(scratch.path());
                trained = scorer::load_model(scratch.path().join("model.bin")).ok();
                r
            }
            6 => {
                let fallback = || scorer::load_model(DEFAULT_MODEL).expect("bundled model");
                c6_refinement(&trained.clone().unwrap_or_else(fallback))
            }
            7 => c7_determinism(),
            8 => c8_segmentation(),
            9 => c9_end_to_end(),
            _ => c10_snap_idempotence(),
        }))
        .unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2}: {tag}  {detail}  [{:.1?}]", started.elapsed());
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
