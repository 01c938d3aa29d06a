//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//!
//! The brute-force oracle used here recomputes every rate with direct
//! per-record loops at each candidate threshold and never touches the
//! library's sweep machinery.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use padeval::metrics::{
    acer_from_rates, apcer_pais, apcer_worst, bpcer, bpcer_at_ap, bpcer_ladder, confusion_matrix,
    eer, BpcerApResult, MatrixMode, Selector, LADDER_APS,
};
use padeval::report::{parse_report, round_pct4};
use padeval::scores::{ScoreRecord, ScoreSet};
use padeval::synth::{gen_multiclass, gen_two_class, ClassSpec, Squash, SynthSpec};
use padeval::taxonomy::ClassTaxonomy;
use padeval::weights::{class_weights, ClassCounts};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn check(name: &str, cond: bool, detail: &str) {
    if cond {
        println!("PASS {name}");
    } else {
        println!("FAIL {name}: {detail}");
        panic!("{name} failed: {detail}");
    }
}

fn within(start: Instant, budget: Duration) -> bool {
    start.elapsed() <= budget
}

// ───────────────────────────────────────────────────────────────────
// criterion 1 — class-weight reproduction
// ───────────────────────────────────────────────────────────────────

#[test]
fn criterion_1_class_weight_reproduction() {
    let start = Instant::now();
    let exp1 = ClassCounts::new(vec![
        ("bonafide".into(), 21_139),
        ("composite".into(), 21_448),
        ("synthetic".into(), 19_862),
    ])
    .unwrap();
    let w1: Vec<f64> = class_weights(&exp1)
        .iter()
        .map(|(_, w)| round_pct4(w / 100.0))
        .collect();
    let exp2 = ClassCounts::new(vec![
        ("bonafide".into(), 21_139),
        ("print_plastic".into(), 25_761),
        ("display".into(), 25_423),
    ])
    .unwrap();
    let w2: Vec<f64> = class_weights(&exp2)
        .iter()
        .map(|(_, w)| round_pct4(w / 100.0))
        .collect();
    check(
        "criterion 1 — class-weight reproduction",
        w1 == vec![0.9847, 0.9705, 1.0480]
            && w2 == vec![1.1404, 0.9358, 0.9483]
            && within(start, Duration::from_secs(1)),
        &format!("w1={w1:?} w2={w2:?} elapsed={:?}", start.elapsed()),
    );
}

// ───────────────────────────────────────────────────────────────────
// criterion 2 — ACER arithmetic reproduction
// ───────────────────────────────────────────────────────────────────

#[test]
fn criterion_2_acer_arithmetic() {
    let start = Instant::now();
    let a1 = round_pct4(acer_from_rates(0.009950, 0.016823));
    let a2 = round_pct4(acer_from_rates(0.009994, 0.023667));
    check(
        "criterion 2 — ACER arithmetic reproduction",
        a1 == 1.3387 && a2 == 1.6831 && within(start, Duration::from_secs(1)),
        &format!("got {a1} and {a2}"),
    );
}

// ───────────────────────────────────────────────────────────────────
// criterion 3 — analytic EER on the seeded Gaussian set
// ───────────────────────────────────────────────────────────────────

#[test]
fn criterion_3_analytic_eer() {
    let start = Instant::now();
    let set = gen_two_class(0.6, 0.4, 0.1, 100_000, 7).unwrap();
    let measured = eer(&set, &Selector::Worst).unwrap();
    let analytic = 0.158655;
    let close = (measured.eer - analytic).abs() <= 0.004;

    // exact invariance under a different strictly increasing squash on the
    // same draws
    let spec_a = SynthSpec {
        bona_fide: ClassSpec::new("bonafide", 0.6, 0.1, 100_000),
        species: vec![ClassSpec::new("attack", 0.4, 0.1, 100_000)],
        seed: 7,
        squash: Squash::Logistic {
            center: 0.5,
            rate: 6.0,
        },
    };
    let mut spec_b = spec_a.clone();
    spec_b.squash = Squash::Logistic {
        center: 0.1,
        rate: 2.0,
    };
    let eer_a = eer(&gen_multiclass(&spec_a).unwrap(), &Selector::Worst).unwrap();
    let eer_b = eer(&gen_multiclass(&spec_b).unwrap(), &Selector::Worst).unwrap();

    check(
        "criterion 3 — analytic EER 15.8655% ± 0.4pp with exact squash invariance",
        close && eer_a.eer == eer_b.eer && within(start, Duration::from_secs(5)),
        &format!(
            "measured {:.6} vs {analytic}, squash {:.9} vs {:.9}, elapsed {:?}",
            measured.eer,
            eer_a.eer,
            eer_b.eer,
            start.elapsed()
        ),
    );
}

// ───────────────────────────────────────────────────────────────────
// criterion 4 — oracle equivalence
// ───────────────────────────────────────────────────────────────────

/// Candidate thresholds, built independently of the library.
fn oracle_grid(set: &ScoreSet) -> Vec<f64> {
    let mut t = vec![0.0, 1.0];
    for r in set.records() {
        t.push(r.bona_fide_score());
    }
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

fn oracle_bpcer(set: &ScoreSet, tau: f64) -> f64 {
    let bf = set.taxonomy().bona_fide();
    let mut n = 0u64;
    let mut rejected = 0u64;
    for r in set.records() {
        if r.true_label() == bf {
            n += 1;
            if r.bona_fide_score() <= tau {
                rejected += 1;
            }
        }
    }
    rejected as f64 / n as f64
}

fn oracle_apcer(set: &ScoreSet, species: &str, tau: f64) -> f64 {
    let mut n = 0u64;
    let mut accepted = 0u64;
    for r in set.records() {
        if r.true_label() == species {
            n += 1;
            if r.bona_fide_score() > tau {
                accepted += 1;
            }
        }
    }
    accepted as f64 / n as f64
}

fn non_empty_species(set: &ScoreSet) -> Vec<String> {
    set.taxonomy()
        .attack_species()
        .iter()
        .zip(set.species_counts())
        .filter(|(_, &n)| n > 0)
        .map(|(s, _)| s.clone())
        .collect()
}

fn oracle_apcer_worst(set: &ScoreSet, tau: f64) -> (f64, String) {
    let mut best: Option<(f64, String)> = None;
    for species in non_empty_species(set) {
        let rate = oracle_apcer(set, &species, tau);
        match &best {
            Some((b, _)) if rate <= *b => {}
            _ => best = Some((rate, species)),
        }
    }
    best.unwrap()
}

fn oracle_worst_rate(set: &ScoreSet, tau: f64) -> f64 {
    non_empty_species(set)
        .iter()
        .map(|s| oracle_apcer(set, s, tau))
        .fold(0.0, f64::max)
}

/// Same sweep/interpolation contract as the library, driven by loop rates.
fn oracle_eer(set: &ScoreSet) -> (f64, f64, bool) {
    let grid = oracle_grid(set);
    let mut prev: Option<(f64, f64, f64)> = None; // tau, apcer, diff
    let mut best: Option<(f64, f64, f64, f64)> = None; // |d|, tau, a, b
    for &tau in &grid {
        let a = oracle_worst_rate(set, tau);
        let b = oracle_bpcer(set, tau);
        let d = a - b;
        if d == 0.0 {
            return (a, tau, true);
        }
        if let Some((pt, pa, pd)) = prev {
            if pd > 0.0 && d < 0.0 {
                let s = pd / (pd - d);
                return (pa + s * (a - pa), pt + s * (tau - pt), false);
            }
        }
        if best.is_none_or(|(bd, ..)| d.abs() < bd) {
            best = Some((d.abs(), tau, a, b));
        }
        prev = Some((tau, a, d));
    }
    let (_, tau, a, b) = best.unwrap();
    ((a + b) / 2.0, tau, false)
}

fn oracle_bpcer_at_ap(set: &ScoreSet, ap: u32) -> (f64, f64, bool, Option<f64>) {
    let grid = oracle_grid(set);
    let target = 1.0 / f64::from(ap);
    let mut pos = grid.len() - 1;
    for (i, &tau) in grid.iter().enumerate() {
        if oracle_worst_rate(set, tau) <= target {
            pos = i;
            break;
        }
    }
    let tau = grid[pos];
    let b = oracle_bpcer(set, tau);
    let saturated = pos == grid.len() - 1;
    let interp = if !saturated && pos > 0 {
        let a_prev = oracle_worst_rate(set, grid[pos - 1]);
        let a_cur = oracle_worst_rate(set, tau);
        if a_cur < target && a_prev > target {
            let b_prev = oracle_bpcer(set, grid[pos - 1]);
            let frac = (a_prev - target) / (a_prev - a_cur);
            Some(b_prev + frac * (b - b_prev))
        } else {
            None
        }
    } else {
        None
    };
    (b, tau, saturated, interp)
}

fn oracle_confusion(set: &ScoreSet, tau: f64, binary: bool) -> Vec<Vec<u64>> {
    let classes = set.taxonomy().classes();
    let k = if binary { 2 } else { classes.len() };
    let mut counts = vec![vec![0u64; k]; k];
    for r in set.records() {
        let true_idx = classes.iter().position(|c| *c == r.true_label()).unwrap();
        let pred_idx = if r.bona_fide_score() > tau {
            0
        } else {
            let mut best = 1;
            for j in 2..classes.len() {
                if r.scores()[j] > r.scores()[best] {
                    best = j;
                }
            }
            best
        };
        if binary {
            counts[usize::from(true_idx != 0)][usize::from(pred_idx != 0)] += 1;
        } else {
            counts[true_idx][pred_idx] += 1;
        }
    }
    counts
}

/// Seeded random set with ties, piles at the extremes, and varying size.
fn random_set(seed: u64) -> ScoreSet {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n_species = rng.random_range(1..=3usize);
    let species: Vec<String> = (0..n_species).map(|i| format!("sp{i}")).collect();
    let tax = ClassTaxonomy::new("bonafide", species).unwrap();
    let n: usize = match seed % 5 {
        0 => rng.random_range(600..=999),
        _ => rng.random_range(20..=300),
    };
    let style = seed % 4;
    let mut records = vec![ScoreRecord::new(
        &tax,
        "seed-bf",
        "bonafide",
        vec![0.5; n_species + 1],
    )
    .unwrap()];
    for i in 0..n {
        let cls = rng.random_range(0..=n_species);
        let label = if cls == 0 {
            "bonafide".to_string()
        } else {
            format!("sp{}", cls - 1)
        };
        let raw: f64 = match style {
            0 => rng.random::<f64>(),
            1 => f64::from(rng.random_range(0..=16u32)) / 16.0, // heavy ties
            2 => {
                // clamped separated gaussians pile mass at 0 and 1
                let centre = if cls == 0 { 0.75 } else { 0.25 };
                (centre + 0.35 * (rng.random::<f64>() - 0.5) * 4.0).clamp(0.0, 1.0)
            }
            _ => {
                // attacks partially saturated at the top score
                if cls > 0 && rng.random::<f64>() < 0.3 {
                    1.0
                } else {
                    rng.random::<f64>()
                }
            }
        };
        let mut scores = vec![raw];
        let mut weights = Vec::with_capacity(n_species);
        let mut sum = 0.0;
        for _ in 0..n_species {
            let w: f64 = rng.random::<f64>();
            sum += w;
            weights.push(w);
        }
        for w in weights {
            scores.push((1.0 - raw) * w / sum.max(1e-12));
        }
        records.push(ScoreRecord::new(&tax, format!("r{i}"), label, scores).unwrap());
    }
    ScoreSet::new(tax, records).unwrap()
}

/// Handcrafted edge-shape sets.
fn special_sets() -> Vec<ScoreSet> {
    let tax = ClassTaxonomy::new("bonafide", vec!["attack".into()]).unwrap();
    let mk = |pairs: &[(&str, f64)]| -> ScoreSet {
        let records = pairs
            .iter()
            .enumerate()
            .map(|(i, (l, s))| {
                ScoreRecord::new(&tax, format!("s{i}"), *l, vec![*s, 1.0 - *s]).unwrap()
            })
            .collect();
        ScoreSet::new(tax.clone(), records).unwrap()
    };
    vec![
        // perfect separation
        mk(&[
            ("bonafide", 0.9),
            ("bonafide", 0.8),
            ("attack", 0.1),
            ("attack", 0.2),
        ]),
        // all scores identical
        mk(&[("bonafide", 0.5), ("bonafide", 0.5), ("attack", 0.5)]),
        // single attack record
        mk(&[("bonafide", 0.7), ("attack", 0.4)]),
        // every attack at the top score
        mk(&[
            ("bonafide", 0.3),
            ("bonafide", 0.8),
            ("attack", 1.0),
            ("attack", 1.0),
        ]),
        // bona fide at zero
        mk(&[("bonafide", 0.0), ("bonafide", 1.0), ("attack", 0.5)]),
    ]
}

#[test]
fn criterion_4_oracle_equivalence() {
    let start = Instant::now();
    let mut sets: Vec<ScoreSet> = (0..50).map(random_set).collect();
    sets.extend(special_sets());
    assert!(sets.len() >= 50);
    assert!(sets.iter().all(|s| s.len() <= 1000));

    for (si, set) in sets.iter().enumerate() {
        let grid = oracle_grid(set);
        for &tau in &grid {
            let b = bpcer(set, tau).unwrap();
            assert_eq!(b, oracle_bpcer(set, tau), "set {si} bpcer at {tau}");
            for species in non_empty_species(set) {
                let a = apcer_pais(set, &species, tau).unwrap();
                assert_eq!(a, oracle_apcer(set, &species, tau), "set {si} {species}");
            }
            let (w, ws) = apcer_worst(set, tau).unwrap();
            let (ow, ows) = oracle_apcer_worst(set, tau);
            assert_eq!((w, ws.to_string()), (ow, ows), "set {si} worst at {tau}");
            assert_eq!(
                padeval::metrics::acer(set, tau).unwrap(),
                acer_from_rates(ow, oracle_bpcer(set, tau)),
                "set {si} acer at {tau}"
            );
        }

        let lib_eer = eer(set, &Selector::Worst).unwrap();
        let (oe, ot, ox) = oracle_eer(set);
        assert!(
            (lib_eer.eer - oe).abs() <= 1e-12 && (lib_eer.tau - ot).abs() <= 1e-12,
            "set {si} eer {lib_eer:?} vs ({oe}, {ot}, {ox})"
        );
        assert_eq!(lib_eer.exact, ox, "set {si} eer exactness");

        for ap in [2u32, 3, 7, 10, 20, 50, 100, 200, 500, 1000, 10000] {
            let lib = bpcer_at_ap(set, ap, &Selector::Worst).unwrap();
            let (ob, otau, osat, ointerp) = oracle_bpcer_at_ap(set, ap);
            assert_eq!(
                (lib.bpcer, lib.tau, lib.saturated, lib.bpcer_interpolated),
                (ob, otau, osat, ointerp),
                "set {si} bpcer_at_ap {ap}"
            );
        }

        for tau in [0.0, 0.21, 0.5, 0.93, 1.0] {
            let full = confusion_matrix(set, tau, MatrixMode::Full).unwrap();
            assert_eq!(full.counts, oracle_confusion(set, tau, false), "set {si}");
            let bin = confusion_matrix(set, tau, MatrixMode::Binary).unwrap();
            assert_eq!(bin.counts, oracle_confusion(set, tau, true), "set {si}");
        }
    }
    check(
        "criterion 4 — oracle equivalence on 55 randomized sets",
        within(start, Duration::from_secs(30)),
        &format!("elapsed {:?}", start.elapsed()),
    );
}

// ───────────────────────────────────────────────────────────────────
// criterion 5 — ladder monotonicity and saturation
// ───────────────────────────────────────────────────────────────────

#[test]
fn criterion_5_ladder_monotonicity_and_saturation() {
    let mut sets: Vec<ScoreSet> = (0..50).map(random_set).collect();
    sets.extend(special_sets());
    for (si, set) in sets.iter().enumerate() {
        if non_empty_species(set).is_empty() {
            continue;
        }
        let ladder = bpcer_ladder(set, &Selector::Worst).unwrap();
        for w in ladder.windows(2) {
            assert!(
                w[0].bpcer <= w[1].bpcer,
                "set {si}: ladder not monotone: {w:?}"
            );
        }
    }

    // attacks pile at 1.0: 2 of 50 attack scores saturate, so APCER targets
    // below 4% are only reachable at the reject-all endpoint
    let tax = ClassTaxonomy::new("bonafide", vec!["attack".into()]).unwrap();
    let mut records = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for i in 0..50 {
        let s = 0.2 + 0.75 * rng.random::<f64>();
        records.push(ScoreRecord::new(&tax, format!("b{i}"), "bonafide", vec![s, 1.0 - s]).unwrap());
    }
    for i in 0..50 {
        let s = if i < 2 { 1.0 } else { 0.5 * rng.random::<f64>() };
        records.push(ScoreRecord::new(&tax, format!("a{i}"), "attack", vec![s, 1.0 - s]).unwrap());
    }
    let saturated_set = ScoreSet::new(tax, records).unwrap();
    let ladder = bpcer_ladder(&saturated_set, &Selector::Worst).unwrap();
    let saturated_rows: Vec<&BpcerApResult> =
        ladder.iter().filter(|r| r.saturated).collect();
    assert!(
        saturated_rows.len() >= 2,
        "expected several saturated rows, ladder = {ladder:?}"
    );
    let first = saturated_rows[0];
    for row in &saturated_rows {
        assert_eq!(row.bpcer, first.bpcer, "saturated rows must repeat BPCER");
        assert_eq!(row.tau, 1.0, "saturated rows sit at the max grid threshold");
    }
    // the BPCER_1000 / BPCER_10000 pattern: both saturated and identical
    let b1000 = ladder.iter().find(|r| r.ap == 1000).unwrap();
    let b10000 = ladder.iter().find(|r| r.ap == 10000).unwrap();
    check(
        "criterion 5 — ladder monotone in AP; saturation flag and repeated BPCER",
        b1000.saturated && b10000.saturated && b1000.bpcer == b10000.bpcer,
        &format!("{b1000:?} vs {b10000:?}"),
    );
}

// ───────────────────────────────────────────────────────────────────
// criterion 6 — cascade bounds
// ───────────────────────────────────────────────────────────────────

fn random_pair(seed: u64) -> padeval::cascade::CascadeConfig {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let tax_b = ClassTaxonomy::new("bonafide", vec!["sp0".into(), "sp1".into()]).unwrap();
    let tax_s = ClassTaxonomy::new("bonafide", vec!["sp0".into(), "sp1".into()]).unwrap();
    let n = rng.random_range(30..=400usize);
    let mut border = Vec::new();
    let mut source = Vec::new();
    for i in 0..=n {
        let cls = if i == 0 { 0 } else { rng.random_range(0..=2usize) };
        let label = match cls {
            0 => "bonafide",
            1 => "sp0",
            _ => "sp1",
        };
        // source scores stay strictly positive for the degenerate-stage check
        let b: f64 = rng.random::<f64>();
        let s: f64 = 0.01 + 0.99 * rng.random::<f64>();
        border.push(
            ScoreRecord::new(
                &tax_b,
                format!("id{i}"),
                label,
                vec![b, (1.0 - b) / 2.0, (1.0 - b) / 2.0],
            )
            .unwrap(),
        );
        source.push(
            ScoreRecord::new(
                &tax_s,
                format!("id{i}"),
                label,
                vec![s, (1.0 - s) / 2.0, (1.0 - s) / 2.0],
            )
            .unwrap(),
        );
    }
    let tau_b: f64 = rng.random::<f64>();
    let tau_s: f64 = rng.random::<f64>();
    padeval::cascade::CascadeConfig::new(
        ScoreSet::new(tax_b, border).unwrap(),
        ScoreSet::new(tax_s, source).unwrap(),
        tau_b,
        tau_s,
    )
    .unwrap()
}

#[test]
fn criterion_6_cascade_bounds() {
    let mut evaluated = 0;
    for seed in 0..25u64 {
        let cfg = random_pair(seed);
        let p = match padeval::cascade::cascade_rates(&cfg) {
            Ok(p) => p,
            Err(_) => continue, // no attack samples in this draw
        };
        evaluated += 1;
        let b_border = bpcer(cfg.border(), cfg.tau_border()).unwrap();
        let b_source = bpcer(cfg.source(), cfg.tau_source()).unwrap();
        assert!(
            p.bpcer >= b_border.max(b_source) && p.bpcer <= b_border + b_source + 1e-15,
            "seed {seed}: {} vs [{}, {}]",
            p.bpcer,
            b_border.max(b_source),
            b_border + b_source
        );
        for (species, rate) in &p.apcer_per_species {
            let a_b = apcer_pais(cfg.border(), species, cfg.tau_border()).unwrap();
            let a_s = apcer_pais(cfg.source(), species, cfg.tau_source()).unwrap();
            assert!(*rate <= a_b.min(a_s), "seed {seed} {species}");
        }

        // degenerate-stage identity: τ_source = 0 and all source scores > 0
        let degenerate = padeval::cascade::CascadeConfig::new(
            cfg.border().clone(),
            cfg.source().clone(),
            cfg.tau_border(),
            0.0,
        )
        .unwrap();
        let pd = padeval::cascade::cascade_rates(&degenerate).unwrap();
        assert_eq!(pd.bpcer, bpcer(cfg.border(), cfg.tau_border()).unwrap());
        for (species, rate) in &pd.apcer_per_species {
            assert_eq!(
                *rate,
                apcer_pais(cfg.border(), species, cfg.tau_border()).unwrap(),
                "seed {seed} degenerate {species}"
            );
        }
    }
    check(
        "criterion 6 — cascade bounds and degenerate-stage identity on 25 pairs",
        evaluated >= 20,
        &format!("only {evaluated} pairs evaluated"),
    );
}

// ───────────────────────────────────────────────────────────────────
// criterion 7 — probit accuracy against a bisection oracle
// ───────────────────────────────────────────────────────────────────

/// erf-based standard normal CDF (statrs erf, independent of the library).
fn oracle_cdf(x: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(x / std::f64::consts::SQRT_2))
}

fn oracle_probit(p: f64) -> f64 {
    let (mut lo, mut hi) = (-9.0_f64, 9.0_f64);
    while hi - lo > 1e-13 {
        let mid = (lo + hi) / 2.0;
        if oracle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}

#[test]
fn criterion_7_probit_accuracy() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let p = 1e-6 + (1.0 - 2e-6) * rng.random::<f64>();
        let err = (padeval::curves::probit(p).unwrap() - oracle_probit(p)).abs();
        worst = worst.max(err);
    }
    check(
        "criterion 7 — probit within 1e-8 of the bisection oracle on 10,000 points",
        worst < 1e-8 && within(start, Duration::from_secs(5)),
        &format!("worst error {worst:e}, elapsed {:?}", start.elapsed()),
    );
}

// ───────────────────────────────────────────────────────────────────
// criteria 8 & 9 — CLI determinism and report shape
// ───────────────────────────────────────────────────────────────────

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_padeval"));
    c.env_remove("PADEVAL_OUT");
    c
}

fn run_ok(c: &mut Command) {
    let out = c.output().expect("spawn padeval");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        c,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// One full pipeline run into `dir`; returns the relative paths written.
fn pipeline(dir: &Path) -> Vec<&'static str> {
    let p = |s: &str| dir.join(s).to_string_lossy().into_owned();

    run_ok(bin().args([
        "synth",
        "--two-class",
        "--mu-bf",
        "0.6",
        "--mu-attack",
        "0.4",
        "--sigma",
        "0.1",
        "--n",
        "2000",
        "--seed",
        "7",
        "--out",
        &p("demo"),
    ]));
    run_ok(bin().args([
        "synth",
        "--bona-fide",
        "bonafide:0.8:0.1:400",
        "--species",
        "composite:0.2:0.15:250",
        "--species",
        "synthetic:0.1:0.1:150",
        "--seed",
        "11",
        "--out",
        &p("border"),
    ]));
    run_ok(bin().args([
        "synth",
        "--bona-fide",
        "bonafide:0.7:0.15:400",
        "--species",
        "composite:0.3:0.12:250",
        "--species",
        "synthetic:0.25:0.1:150",
        "--seed",
        "12",
        "--out",
        &p("source"),
    ]));
    run_ok(bin().args([
        "eval",
        "--scores",
        &p("border/scores.csv"),
        "--manifest",
        &p("border/manifest.json"),
        "--tau",
        "auto:bpcer100",
        "--out",
        &p("report.json"),
        "--plots",
        &p("plots"),
    ]));
    run_ok(bin().args([
        "eval",
        "--scores",
        &p("demo/scores.csv"),
        "--manifest",
        &p("demo/manifest.json"),
        "--format",
        "markdown",
        "--out",
        &p("report.md"),
    ]));
    run_ok(bin().args([
        "det",
        "--scores",
        &p("border/scores.csv"),
        "--manifest",
        &p("border/manifest.json"),
        "--out",
        &p("det.svg"),
    ]));
    run_ok(bin().args([
        "kde",
        "--scores",
        &p("demo/scores.csv"),
        "--manifest",
        &p("demo/manifest.json"),
        "--log",
        "--out",
        &p("kde.svg"),
    ]));
    run_ok(bin().args([
        "cascade",
        "--border-scores",
        &p("border/scores.csv"),
        "--border-manifest",
        &p("border/manifest.json"),
        "--source-scores",
        &p("source/scores.csv"),
        "--source-manifest",
        &p("source/manifest.json"),
        "--out",
        &p("cascade.json"),
        "--confusion",
        &p("cascade-confusion.svg"),
        "--confusion-binary",
        &p("cascade-confusion-binary.svg"),
    ]));
    run_ok(bin().args([
        "weights",
        "--counts",
        "bonafide=21139,composite=21448,synthetic=19862",
        "--out",
        &p("weights.json"),
    ]));

    vec![
        "demo/manifest.json",
        "demo/scores.csv",
        "demo/scores.jsonl",
        "border/manifest.json",
        "border/scores.csv",
        "border/scores.jsonl",
        "source/manifest.json",
        "source/scores.csv",
        "source/scores.jsonl",
        "report.json",
        "report.md",
        "plots/det.svg",
        "plots/eer.svg",
        "plots/kde-linear.svg",
        "plots/kde-log.svg",
        "plots/confusion-full.svg",
        "plots/confusion-binary.svg",
        "det.svg",
        "kde.svg",
        "cascade.json",
        "cascade-confusion.svg",
        "cascade-confusion-binary.svg",
        "weights.json",
    ]
}

#[test]
fn criterion_8_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let run1 = tmp.path().join("run1");
    let run2 = tmp.path().join("run2");
    let files = pipeline(&run1);
    let files2 = pipeline(&run2);
    assert_eq!(files, files2);
    for file in &files {
        let a = std::fs::read(run1.join(file)).unwrap_or_else(|e| panic!("{file}: {e}"));
        let b = std::fs::read(run2.join(file)).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    check(
        "criterion 8 — every CLI output byte-identical across two runs",
        true,
        "",
    );
}

#[test]
fn criterion_9_report_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    pipeline(&dir);
    let text = std::fs::read_to_string(dir.join("report.json")).unwrap();
    let report = parse_report(&text).unwrap();

    assert_eq!(
        report.ladder.iter().map(|r| r.ap).collect::<Vec<_>>(),
        LADDER_APS.to_vec(),
        "8-row ladder"
    );
    for row in &report.ladder {
        assert!((0.0..=1.0).contains(&row.tau), "ladder threshold present");
        assert!((0.0..=1.0).contains(&row.bpcer));
    }
    assert!((0.0..=1.0).contains(&report.eer.eer), "EER row present");
    assert_eq!(
        report.per_species_apcer.len(),
        2,
        "two species APCER rows at τ"
    );
    assert!((0.0..=1.0).contains(&report.bpcer_at_tau));
    let worst = report
        .per_species_apcer
        .iter()
        .map(|s| s.apcer)
        .fold(0.0, f64::max);
    assert_eq!(
        report.acer_at_tau,
        acer_from_rates(worst, report.bpcer_at_tau),
        "ACER consistency at τ"
    );
    assert_eq!(report.tau_selector, "auto:bpcer100");
    let row100 = report.ladder.iter().find(|r| r.ap == 100).unwrap();
    assert_eq!(report.chosen_tau, row100.tau, "auto:bpcer100 τ");
    check(
        "criterion 9 — eval emits the full report structure at auto:bpcer100",
        true,
        "",
    );
}
