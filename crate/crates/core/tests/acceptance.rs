//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use num_traits::One;
use qkforms::blade::binomial;
use qkforms::casimir_matrix::{verify_c_decomposition, verify_j_casimir, verify_projection};
use qkforms::decomposition::{joint_eigenspaces, verify_normalizations, DEFAULT_MATRIX_CAP};
use qkforms::flat_model::{
    verify_comfor, verify_killing_examples, verify_killing_projections, verify_reindexing, FlatConfig, FlatModel,
};
use qkforms::quaternionic::{
    verify_alg_commutators, verify_basic_commutators, verify_frame, verify_spot_values, verify_structural,
    OperatorFamily, QuaternionicFrame, SweepConfig,
};
use qkforms::rep_theory::{admissible_labels, casimir_label, eigenvalue_j, excluded_by_rank, ClosedForm, RepLabel};
use qkforms::report::CheckRecord;
use qkforms::theorem_checker::{classify, lambda_injectivity, theorem_report, Case};
use qkforms::{LinearOperator, Scalar};

struct Outcome {
    ok: bool,
    summary: String,
}

impl Outcome {
    fn from_records(records: &[CheckRecord]) -> Self {
        let failed: BTreeSet<&str> = records.iter().filter(|r| !r.passed()).map(|r| r.id.as_str()).collect();
        let summary = if failed.is_empty() {
            format!("{} records exact", records.len())
        } else {
            let n = records.iter().filter(|r| !r.passed()).count();
            format!("{n} of {} records failed: {}", records.len(), failed.into_iter().collect::<Vec<_>>().join(", "))
        };
        Outcome { ok: summary.ends_with("exact"), summary }
    }

    fn and(self, ok: bool, what: &str) -> Self {
        if ok {
            self
        } else {
            Outcome { ok: false, summary: format!("{}; {what}", self.summary) }
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn frame(m: usize) -> QuaternionicFrame {
    QuaternionicFrame::new(m).expect("valid m")
}

/// Algebraic commutator suite.
fn criterion_1() -> Outcome {
    let printed = |r: &CheckRecord| !r.id.ends_with("-derived");
    let mut recs = Vec::new();
    let f2 = frame(2);
    let cfg = SweepConfig { seed: 0x5eed, random_vectors: 3, degrees: None };
    recs.extend(verify_basic_commutators(&f2, &cfg));
    recs.extend(verify_alg_commutators(&f2, &cfg).into_iter().filter(printed));
    let f3 = frame(3);
    let spot = SweepConfig { seed: 0x5eed, random_vectors: 3, degrees: Some(vec![2, 3, 4]) };
    recs.extend(verify_basic_commutators(&f3, &spot));
    recs.extend(verify_alg_commutators(&f3, &spot).into_iter().filter(printed));
    // 8 basis vectors, one fixed mixed vector, 3 seeded random vectors
    let vectors_ok = recs
        .iter()
        .filter(|r| r.params.get("m") == Some(&2.into()))
        .all(|r| r.params.get("vectors").and_then(|v| v.as_u64()) == Some(12));
    Outcome::from_records(&recs).and(vectors_ok, "m=2 sweep did not cover the basis and 3 random vectors")
}

/// Frame and structure suite.
fn criterion_2() -> Outcome {
    let mut recs = Vec::new();
    for m in [2, 3] {
        let f = frame(m);
        recs.extend(verify_frame(&f));
        recs.extend(verify_structural(&f, None));
    }
    Outcome::from_records(&recs)
}

/// Spectrum of `J`, its value on 1-forms, and `J = 2m Cas_{𝔰𝔭(1)}`.
fn criterion_3() -> Outcome {
    let f = frame(2);
    let fam = OperatorFamily::new(&f);
    let mut recs = Vec::new();
    let mut spectrum_ok = true;
    for p in 0..=8 {
        // J is symmetric, so Π_k (J + k(k+2)) = 0 confines its spectrum
        let ks: BTreeSet<usize> = admissible_labels(p, 2).into_iter().map(|l| l.k).collect();
        let j = fam.j().matrix(p);
        let mut prod = LinearOperator::identity(8, p);
        for k in ks {
            prod = &prod * &(&j - &LinearOperator::scalar(8, p, &eigenvalue_j(k)));
        }
        spectrum_ok &= prod.is_zero();
        recs.push(verify_j_casimir(&f, p).expect("within cap"));
    }
    let one_forms = fam.j().matrix(1) == LinearOperator::scalar(8, 1, &Scalar::from(-3));
    recs.extend(verify_spot_values(&f).into_iter().filter(|r| r.id == "spot.j-on-1-forms"));
    Outcome::from_records(&recs)
        .and(spectrum_ok, "J has an eigenvalue outside {−k(k+2)}")
        .and(one_forms, "J ≠ −3 on 1-forms")
}

/// `C` in terms of the `𝔰𝔭(m)` Casimir, the `𝔰𝔬(4m)` Casimir, and `pr`.
fn criterion_4() -> Outcome {
    let keep = |r: &CheckRecord| matches!(r.id.as_str(), "cas.c-decomposition" | "cas.so-casimir");
    let mut recs = Vec::new();
    for (m, top) in [(2, 8), (3, 4)] {
        let f = frame(m);
        for p in 0..=top {
            recs.extend(verify_c_decomposition(&f, p).expect("within cap").into_iter().filter(keep));
        }
        recs.extend(
            verify_projection(&f)
                .expect("within cap")
                .into_iter()
                .filter(|r| matches!(r.id.as_str(), "pr.idempotent" | "pr.rank")),
        );
    }
    Outcome::from_records(&recs)
}

/// Closed-form Casimir values and the two normalization factors.
fn criterion_5() -> Outcome {
    let mut ok = true;
    for m in 1..=8 {
        for k in 0..=6 {
            ok &= casimir_label(ClosedForm::SymE(k), m).is_ok();
        }
        for a in 0..=m {
            ok &= casimir_label(ClosedForm::Alt(a), m).is_ok();
            for b in 0..=a {
                ok &= casimir_label(ClosedForm::Cartan { a, b }, m).is_ok();
            }
        }
        ok &= casimir_label(ClosedForm::SymE(2), m).ok() == Some(Scalar::one());
    }
    let fam = OperatorFamily::new(&frame(2));
    let mut recs = Vec::new();
    for p in 0..=8 {
        recs.extend(verify_normalizations(&fam, p, DEFAULT_MATRIX_CAP).expect("within cap"));
    }
    let covered = (0..=8).all(|p| recs.iter().any(|r| r.params.get("p") == Some(&p.into())));
    Outcome::from_records(&recs)
        .and(ok, "closed forms disagree with the weight formula or the adjoint value is not 1")
        .and(covered, "some degree has no normalization record")
}

/// Decomposition tables for `m = 2`.
fn criterion_6() -> Outcome {
    let fam = OperatorFamily::new(&frame(2));
    let mut recs = Vec::new();
    let mut tables = Vec::new();
    let mut complete = true;
    for p in 0..=8 {
        let d = joint_eigenspaces(&fam, p, DEFAULT_MATRIX_CAP).expect("within cap");
        complete &= d.total == binomial(8, p) && d.is_complete();
        let present: BTreeSet<(usize, usize, usize, usize)> =
            d.present().map(|e| (e.k, e.a, e.b, e.eigenspace_dim)).collect();
        tables.push(present);
        recs.push(d.record());
    }
    let p2: BTreeSet<_> = [(0, 1, 1, 10), (2, 2, 0, 15), (2, 0, 0, 3)].into_iter().collect();
    let p3: BTreeSet<_> = [(1, 2, 1, 32), (1, 1, 0, 8), (3, 1, 0, 16)].into_iter().collect();
    let noted = excluded_by_rank(3, 2).contains(&RepLabel::new(3, 3, 0))
        && recs[3].params.contains_key("absent_since_a_exceeds_m");
    Outcome::from_records(&recs)
        .and(complete, "completeness fails")
        .and(tables[2] == p2, "p=2 table differs")
        .and(tables[3] == p3, "p=3 table differs")
        .and(noted, "a ≤ m vanishing not noted at p=3")
}

/// Flat model.
fn criterion_7() -> Outcome {
    let model = FlatModel::new(&frame(2));
    let cfg = FlatConfig::default();
    let mut recs = Vec::new();
    for p in 0..=8 {
        recs.extend(verify_comfor(&model, p, &cfg).into_iter().filter(|r| !r.id.ends_with("-derived")));
        recs.extend(verify_killing_projections(&model, p));
        recs.extend(verify_reindexing(model.family(), p));
    }
    recs.extend(verify_killing_examples(&model).expect("homogeneous samples").into_iter().filter(|r| {
        matches!(
            r.id.as_str(),
            "killing.constant" | "killing.rotation" | "killing.x1dx1-not-killing" | "killing.x1dx1-twistor"
        )
    }));
    Outcome::from_records(&recs)
}

/// Theorem certificate.
fn criterion_8() -> Outcome {
    let start = Instant::now();
    let report = theorem_report(2..=10, None, DEFAULT_MATRIX_CAP).expect("valid ranges");
    let enumeration_time = start.elapsed();
    let mut ok = true;
    let mut notes = Vec::new();
    for s in report.solutions() {
        let (p, k, k2) = (s.pair.p, s.pair.source.k, s.pair.target.k);
        ok &= (k, k2) == (p, p + 1) || (k, k2) == (1, 0);
        let m = s.pair.m;
        let a = s.pair.source.a;
        if classify(s) != Some(Case::Case2b) || 4 * m - p != 2 * a - 1 || p < 2 * m + 1 {
            ok = false;
            notes.push(format!("non-2b survivor at m={m} p={p}"));
        }
    }
    let m2: Vec<String> = report
        .solutions()
        .filter(|s| s.pair.m == 2)
        .map(|s| format!("p={} {}→{}", s.pair.p, s.pair.source, s.pair.target))
        .collect();
    let start = Instant::now();
    let injective = (6..=8).all(|q| lambda_injectivity(2, q, DEFAULT_MATRIX_CAP).unwrap_or(false));
    let injectivity_time = start.elapsed();
    let mut out = Outcome::from_records(&report.records)
        .and(ok, &notes.join(", "))
        .and(m2.is_empty(), &format!("m=2 solution set is not empty ({})", m2.join(", ")))
        .and(injective, "Λ not injective on some q ∈ {6,7,8}")
        .and(enumeration_time.as_secs() < 60 && injectivity_time.as_secs() < 60, "runtime over one minute");
    out.summary = format!("{} survivors, {}", report.solutions().count(), out.summary);
    out
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qkforms")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// CLI contract.
fn criterion_9() -> Outcome {
    let mut problems = Vec::new();
    let runs: [&[&str]; 4] = [
        &["decompose", "--m", "2", "--p", "2", "--format", "json"],
        &["flat", "--m", "2", "--p", "2", "--seed", "7", "--format", "json"],
        &["verify-algebra", "--m", "2", "--p-range", "0..3", "--format", "json"],
        &["casimir", "--m", "2", "--label", "0,1,1", "--format", "json"],
    ];
    for args in runs {
        let (code, first) = cli(args);
        let (code2, second) = cli(args);
        if first != second || code != code2 {
            problems.push(format!("{} not reproducible", args[0]));
        }
        let Ok(doc) = serde_json::from_slice::<serde_json::Value>(&first) else {
            problems.push(format!("{} emitted invalid JSON", args[0]));
            continue;
        };
        let expected = match doc["verdict"].as_str() {
            Some("PASS" | "AMBIGUOUS") => 0,
            Some("FAIL") => 1,
            _ => -1,
        };
        if code != expected || !first.ends_with(b"\n") {
            problems.push(format!("{} exit {code} for verdict {}", args[0], doc["verdict"]));
        }
        for key in ["version", "config", "records", "verdict"] {
            if doc.get(key).is_none() {
                problems.push(format!("{} lacks {key}", args[0]));
            }
        }
    }
    let (pass_code, _) = cli(&["decompose", "--m", "2", "--p", "2"]);
    let (fail_code, _) = cli(&["verify-algebra", "--m", "2", "--p", "3"]);
    for (args, want) in [(&["verify-algebra", "--m", "0"][..], 2), (&["decompose", "--bogus"][..], 2)] {
        let (code, _) = cli(args);
        if code != want {
            problems.push(format!("{} gave {code}, want {want}", args.join(" ")));
        }
    }
    if pass_code != 0 {
        problems.push(format!("passing run exited {pass_code}"));
    }
    if fail_code != 1 {
        problems.push(format!("failing run exited {fail_code}"));
    }
    Outcome {
        ok: problems.is_empty(),
        summary: if problems.is_empty() {
            "exit codes and JSON reproducibility hold".into()
        } else {
            problems.join("; ")
        },
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("algebraic commutators", criterion_1),
        ("structure", criterion_2),
        ("J eigenvalues", criterion_3),
        ("C eigenvalue", criterion_4),
        ("Casimir values and normalizations", criterion_5),
        ("decomposition", criterion_6),
        ("flat model", criterion_7),
        ("theorem certificate", criterion_8),
        ("CLI contract", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.ok);
        println!("criterion {} [{name}]: {tag} ({:.1?}) {}", i + 1, start.elapsed(), outcome.summary);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
