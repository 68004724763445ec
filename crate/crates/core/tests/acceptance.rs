//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measurements. Run with `cargo test --test acceptance -- --nocapture`.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unicover::chains::Chain;
use unicover::engine::{self, Verdict};
use unicover::metric::{
    critical_scales, entourage_graph, pc_components, pu_derivative, pu_entourage, MetricSpace,
    PartitionOfUnity, Scale,
};
use unicover::pi1::{presentation, simplify, ChainClass};
use unicover::spaces;
use unicover::structures::{PuncturedOutcome, RelationContext, SltMode};
use unicover::word::Word;

fn random_partition_of_unity(rng: &mut ChaCha8Rng, points: usize, funcs: usize) -> PartitionOfUnity {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for _ in 0..points {
        let mut col: Vec<f64> = (0..funcs).map(|_| rng.gen_range(0.0..1.0)).collect();
        // sparsify some entries so supports vary
        for w in col.iter_mut() {
            if rng.gen_bool(0.3) {
                *w = 0.0;
            }
        }
        let sum: f64 = col.iter().sum();
        if sum == 0.0 {
            col[0] = 1.0;
        } else {
            for w in col.iter_mut() {
                *w /= sum;
            }
        }
        cols.push(col);
    }
    let functions: Vec<Vec<f64>> = (0..funcs)
        .map(|s| (0..points).map(|p| cols[p][s]).collect())
        .collect();
    PartitionOfUnity::new(functions).expect("generated weights sum to one")
}

#[test]
fn acceptance_1_partition_of_unity_derivative_law() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cases = 200;
    for case in 0..cases {
        let points = rng.gen_range(2..=20);
        let funcs = rng.gen_range(1..=8);
        let f = random_partition_of_unity(&mut rng, points, funcs);
        let space = MetricSpace::from_points(
            "grid",
            (0..points).map(|i| vec![i as f64]).collect(),
            0,
        )
        .unwrap();
        let ef = pu_entourage(&space, &f).unwrap();
        let g = pu_derivative(&f).unwrap();
        let eg = pu_entourage(&space, &g).unwrap();
        assert!(
            eg.is_subset_of(&ef),
            "case {case}: derivative entourage must refine the original"
        );
        assert!(
            eg.compose(&eg).is_subset_of(&ef),
            "case {case}: composed derivative entourage escapes the original"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "runtime {elapsed:?} exceeds 5 s"
    );
    println!(
        "ACCEPTANCE 1 (derivative composition law): PASS — {cases} random partitions, {:.2?}",
        elapsed
    );
}

#[test]
fn acceptance_2_presentation_goldens() {
    let start = Instant::now();

    // circle(12, 1) at 0.6: free of rank 1, oracle rank = edges - vertices + 1
    let circle = spaces::circle(12, 1.0).unwrap();
    let p = simplify(&presentation(&circle, Scale(0.6)));
    let g = entourage_graph(&circle, Scale(0.6));
    let oracle = g.edge_count() - circle.len() + 1;
    assert_eq!((p.gen_count(), p.relators().len()), (oracle, 0));
    assert_eq!(oracle, 1);

    // circle(12, 1) at 2.0: trivial
    let p = simplify(&presentation(&circle, Scale(2.0)));
    assert_eq!(p.gen_count(), 0);

    // wedge of three unit circles at the nearest scale: free of rank 3
    let wedge = spaces::wedge_circles(&[1.0, 1.0, 1.0], 16).unwrap();
    let nearest = critical_scales(&wedge)[0];
    let raw = presentation(&wedge, nearest);
    let g = entourage_graph(&wedge, nearest);
    let oracle = g.edge_count() - wedge.len() + 1;
    assert_eq!(oracle, 3, "triangle-free rank oracle");
    let p = simplify(&raw);
    assert_eq!((p.gen_count(), p.relators().len()), (3, 0));

    // torus 4x4 at the filling scale: abelianization Z^2 (Smith normal form
    // oracle), cross-checked by coset enumeration of the mod-2 quotient
    let torus = spaces::torus_grid(4, 4).unwrap();
    let filling = Scale((2.0f64).sqrt() + 1e-12);
    let raw = presentation(&torus, filling);
    let inv = engine::abelianization(&raw);
    assert_eq!(
        (inv.free_rank, inv.torsion.as_slice()),
        (2, &[] as &[u64]),
        "torus abelianization"
    );
    let squares: Vec<Word> = (0..raw.gen_count())
        .map(|g| {
            let w = Word::generator(g, false);
            w.concat(&w)
        })
        .collect();
    let quotient = raw.with_extra_relators(&squares).unwrap();
    let table = engine::todd_coxeter(&quotient, &[], 200_000).unwrap();
    assert_eq!(
        table.index(),
        Some(4),
        "Z^2 mod squares has order 4 (coset enumeration oracle)"
    );

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "runtime {elapsed:?} exceeds 10 s"
    );
    println!("ACCEPTANCE 2 (presentation goldens): PASS — {:.2?}", elapsed);
}

/// Shared corpus for criteria 3-5: random spaces, two critical scales each,
/// loop classes of word length at most 3.
struct CorpusCell {
    space: MetricSpace,
    fine: Scale,
}

fn corpus() -> &'static Vec<CorpusCell> {
    static CORPUS: OnceLock<Vec<CorpusCell>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut cells = Vec::new();
        for seed in 0..20u64 {
            let count = rng.gen_range(4..=8);
            let space = spaces::random_cloud(count, 2, seed).unwrap();
            let scales = critical_scales(&space);
            // scales where the basepoint component carries at least one loop
            let mut picked = Vec::new();
            for &s in &scales {
                let p = presentation(&space, s);
                if p.gen_count() >= 1 {
                    picked.push(s);
                }
            }
            if picked.is_empty() {
                continue;
            }
            let chosen = [picked[0], picked[picked.len() / 2]];
            for s in chosen {
                cells.push(CorpusCell {
                    space: space.clone(),
                    fine: s,
                });
            }
        }
        cells
    })
}

/// Loop classes of word length <= 3 over the first two generators, deduplicated
/// by group element, capped for runtime.
fn corpus_classes(ctx: &RelationContext<'_>) -> Vec<ChainClass> {
    let base = ctx.space().basepoint();
    let gens = ctx.presentation().gen_count().min(2);
    let letters: Vec<i32> = (0..gens as i32)
        .flat_map(|g| [g + 1, -(g + 1)])
        .collect();
    let mut words = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l);
                if v.len() == w.len() + 1 {
                    next.push(v.clone());
                    words.push(v);
                }
            }
        }
        frontier = next;
    }
    let mut seen = std::collections::HashSet::new();
    let mut classes = Vec::new();
    for w in words {
        let key = ctx.decidable_word(&w);
        if seen.insert(key) {
            classes.push(ChainClass { end: base, word: w });
            if classes.len() >= 8 {
                break;
            }
        }
    }
    classes
}

#[test]
fn acceptance_3_lasso_iff_punctured_homotopy() {
    let start = Instant::now();
    let mut total = 0usize;
    let mut unknown_rows = 0usize;
    let mut contradictions = 0usize;
    for cell in corpus() {
        let ctx = RelationContext::new(&cell.space, cell.fine, 30_000).unwrap();
        let coarse = cell.fine;
        let classes = corpus_classes(&ctx);
        for i in 0..classes.len() {
            for j in i..classes.len() {
                let (a, b) = (&classes[i], &classes[j]);
                total += 1;
                let lasso = ctx.lasso_close(a, b, coarse).unwrap().verdict;
                let ca = ctx.presentation().realize_class(a).unwrap();
                let cb = ctx.presentation().realize_class(b).unwrap();
                let budget = if lasso.is_yes() { 100_000 } else { 2_000 };
                let outcome = ctx
                    .punctured_homotopy_search(&ca, &cb, coarse, budget)
                    .unwrap();
                match (&lasso, &outcome) {
                    (Verdict::No, PuncturedOutcome::Found(_)) => contradictions += 1,
                    (Verdict::Yes, PuncturedOutcome::Found(w)) => {
                        ctx.verify_punctured_witness(&ca, &cb, w, coarse).unwrap();
                    }
                    (Verdict::Yes, PuncturedOutcome::NotFound { .. }) => unknown_rows += 1,
                    (Verdict::Unknown(_), _) => unknown_rows += 1,
                    (Verdict::No, PuncturedOutcome::NotFound { .. }) => {}
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(contradictions, 0, "search succeeded against a lasso No");
    assert!(
        (unknown_rows as f64) <= 0.10 * (total as f64),
        "unknown rows {unknown_rows}/{total} exceed 10%"
    );
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime {elapsed:?} exceeds 60 s"
    );
    println!(
        "ACCEPTANCE 3 (lasso iff punctured homotopy): PASS — {total} pairs, {unknown_rows} unknown, {:.2?}",
        elapsed
    );
}

#[test]
fn acceptance_4_bp_filter_law() {
    let start = Instant::now();
    let mut checked = 0usize;
    for cell in corpus() {
        let ctx = RelationContext::new(&cell.space, cell.fine, 30_000).unwrap();
        let eps = cell.fine;
        let classes = corpus_classes(&ctx);
        let n = classes.len();
        let mut yes = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                yes[i][j] = ctx
                    .bp_close(&classes[i], &classes[j], eps)
                    .unwrap()
                    .verdict
                    .is_yes();
            }
        }
        let four = Scale(4.0 * eps.epsilon());
        for i in 0..n {
            for j in 0..n {
                if !yes[i][j] {
                    continue;
                }
                for k in 0..n {
                    if yes[j][k] {
                        checked += 1;
                        let composed = ctx.bp_close(&classes[i], &classes[k], four).unwrap();
                        assert!(
                            composed.verdict.is_yes(),
                            "filter law violated: bp at {} twice but not at {}",
                            eps.epsilon(),
                            four.epsilon()
                        );
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 4 (bp filter law): PASS — {checked} compositions, {:.2?}",
        elapsed
    );
}

#[test]
fn acceptance_5_james_sandwich() {
    let start = Instant::now();
    let mut witnesses = 0usize;
    let mut converse_checks = 0usize;
    for cell in corpus() {
        let ctx = RelationContext::new(&cell.space, cell.fine, 30_000).unwrap();
        let eps = cell.fine;
        let classes = corpus_classes(&ctx);
        for i in 0..classes.len() {
            for j in i..classes.len() {
                let (a, b) = (&classes[i], &classes[j]);
                let lasso = ctx.lasso_close(a, b, eps).unwrap().verdict;
                if !lasso.is_yes() {
                    continue;
                }
                // forward: lasso Yes at eps gives an equal-length pointwise
                // 2*eps pair witness, built from the punctured decomposition
                let ca = ctx.presentation().realize_class(a).unwrap();
                let cb = ctx.presentation().realize_class(b).unwrap();
                let outcome = ctx
                    .punctured_homotopy_search(&ca, &cb, eps, 100_000)
                    .unwrap();
                let w = match outcome {
                    PuncturedOutcome::Found(w) => w,
                    PuncturedOutcome::NotFound { .. } => {
                        panic!("lasso Yes without recoverable decomposition")
                    }
                };
                let pair = ctx.uc_witness_from_punctures(a, b, &w, eps).unwrap();
                ctx.verify_pair_path(&pair, a, b, 2.0 * eps.epsilon())
                    .unwrap();
                witnesses += 1;
                // every rung of the pair path is bounded at twice its bound
                for rung in ctx.rung_loops(&pair) {
                    assert!(
                        unicover::chains::bounded_center(
                            &cell.space,
                            2.0 * (2.0 * eps.epsilon()),
                            &rung
                        )
                        .is_some(),
                        "unbounded rung in pair witness"
                    );
                }
                // converse: a pointwise 2*eps witness forces lasso Yes at 4*eps
                let back = ctx
                    .lasso_close(a, b, Scale(4.0 * eps.epsilon()))
                    .unwrap()
                    .verdict;
                assert!(
                    back.is_yes(),
                    "direct witness at {} without lasso at {}",
                    2.0 * eps.epsilon(),
                    4.0 * eps.epsilon()
                );
                converse_checks += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 5 (james sandwich): PASS — {witnesses} pair witnesses, {converse_checks} converse checks, {:.2?}",
        elapsed
    );
}

#[test]
fn acceptance_6_hawaiian_transfer_failure() {
    let start = Instant::now();
    let space = spaces::hawaiian(3, 16).unwrap();
    let fine = Scale((std::f64::consts::PI / 16.0).sin() + 1e-12);
    let ctx = RelationContext::new(&space, fine, 100_000).unwrap();

    // the transfer report at ball 0.6 / target 0.6 must refuse the
    // small-circle class at the wedge point
    let report = ctx
        .slt_check(Scale(0.6), Scale(0.6), SltMode::Uniform)
        .unwrap();
    assert!(!report.all_yes, "hawaiian transfer must fail");
    let c1 = ctx
        .class_of(&Chain::new(&space, fine, spaces::hawaiian_circle_loop(16, 1)).unwrap())
        .unwrap()
        .word;
    let c2 = ctx
        .class_of(&Chain::new(&space, fine, spaces::hawaiian_circle_loop(16, 2)).unwrap())
        .unwrap()
        .word;
    let h_gens = ctx.ball_subgroup(0, Scale(0.6)).unwrap().gens;
    // the small circle sits in the target ball, the big one does not
    assert!(ctx.subgroup_membership(&h_gens, &c2).unwrap().is_yes());
    assert!(ctx.subgroup_membership(&h_gens, &c1).unwrap().is_no());
    // the refused row at the wedge point
    let bad_rows: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r.center == 0 && r.verdict.is_no())
        .collect();
    assert!(!bad_rows.is_empty(), "want a refused transfer at the wedge point");
    for row in &bad_rows {
        let min = row
            .minimal_passing_target
            .expect("transfer passes once the ball swallows the big circle");
        assert!(
            (min - 1.0).abs() < 1e-6,
            "minimal passing target {min} should be the big-circle diameter"
        );
    }

    // the paper's obstruction, stated directly: conjugating the small-circle
    // class along the big circle leaves the ball subgroup
    let conj = c2.conjugate_by(&c1.inverse());
    assert!(
        ctx.subgroup_membership(&h_gens, &conj).unwrap().is_no(),
        "g1^-1 g2 g1 must escape the ball subgroup"
    );
    // certified on the quotient by the ball subgroup: the big-circle class
    // survives abelianization of the quotient
    assert!(
        engine::abelianized_exponent_check(ctx.presentation(), &h_gens, &c1)
            .unwrap()
            .is_no(),
        "big-circle class must survive the quotient lattice"
    );

    // cross-check through the retraction on the bouquet model (where the
    // retraction is honestly nonexpanding)
    let bq = spaces::hawaiian_bouquet(3, 16).unwrap();
    let bq_fine = Scale((std::f64::consts::PI / 16.0).sin() + 1e-12);
    let r = spaces::hawaiian_retraction(&bq, 3, 16, 2).unwrap();
    assert!(r.is_nonexpanding());
    let bq_ctx = RelationContext::new(&bq, bq_fine, 100_000).unwrap();
    let bp = bq_ctx.presentation();
    let m = spaces::map_pi1(&r, &bq, &bq, bp, bp, bq_fine).unwrap();
    let loop_word = |i: usize| {
        bq_ctx
            .class_of(&Chain::new(&bq, bq_fine, spaces::hawaiian_circle_loop(16, i)).unwrap())
            .unwrap()
            .word
    };
    let (b1, b2, b3) = (loop_word(1), loop_word(2), loop_word(3));
    // r fixes circles 1 and 2 and kills circle 3
    assert!(bq_ctx.words_equal(&m.apply(&b1).unwrap(), &b1).unwrap().is_yes());
    assert!(bq_ctx.words_equal(&m.apply(&b2).unwrap(), &b2).unwrap().is_yes());
    assert!(bq_ctx
        .words_equal(&m.apply(&b3).unwrap(), &Word::identity())
        .unwrap()
        .is_yes());
    // exponent-sum oracle on the image of the conjugate: one occurrence of
    // the small circle, net zero of the big one
    let t = b2.conjugate_by(&b1.inverse());
    let image = m.apply(&t).unwrap();
    let rank = bp.gen_count();
    let e_total = image.exponent_vector(rank);
    let e2 = b2.exponent_vector(rank);
    let e1 = b1.exponent_vector(rank);
    let dot = |x: &Vec<i64>, y: &Vec<i64>| -> i64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
    assert_eq!(dot(&e_total, &e2), dot(&e2, &e2), "one net small-circle pass");
    assert_eq!(dot(&e_total, &e1), 0, "net-zero big-circle exponent");
    // were the transfer possible, the image would be a power of the small
    // circle; it is not
    assert!(
        bq_ctx.subgroup_membership(&[b2.clone()], &image).unwrap().is_no(),
        "image must not be a power of the retained circle class"
    );

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "runtime {elapsed:?} exceeds 10 s"
    );
    println!(
        "ACCEPTANCE 6 (hawaiian transfer failure): PASS — {} refused rows, {:.2?}",
        bad_rows.len(),
        elapsed
    );
}

#[test]
fn acceptance_7_lasso_congruence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(777);

    // figure-eight and torus presentations, simplified from the spaces
    let wedge = spaces::wedge_circles(&[1.0, 1.0], 16).unwrap();
    let wedge_pres = simplify(&presentation(&wedge, critical_scales(&wedge)[0]));
    assert_eq!(wedge_pres.gen_count(), 2);
    let torus = spaces::torus_grid(4, 4).unwrap();
    let torus_pres = simplify(&presentation(&torus, Scale((2.0f64).sqrt() + 1e-12)));
    assert!(torus_pres.gen_count() >= 2);

    let mut checked = 0usize;
    for (pres, label) in [(&wedge_pres, "figure-eight"), (&torus_pres, "torus")] {
        let gens = vec![Word::generator(0, false)];
        let rank = pres.gen_count();
        let mut random_word = |rng: &mut ChaCha8Rng, len: usize| {
            Word::from_letters((0..len).map(|_| {
                let g = rng.gen_range(1..=(rank as i32));
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            }))
        };
        for _ in 0..5_000 {
            let (l1, l2, l3) = (
                rng.gen_range(0..3),
                rng.gen_range(0..3),
                rng.gen_range(0..4),
            );
            let u1 = random_word(&mut rng, l1);
            let u2 = random_word(&mut rng, l2);
            let u = random_word(&mut rng, l3);
            let w1 = gens[0].conjugate_by(&u1);
            let w2 = gens[0].inverse().conjugate_by(&u2);
            for w in [w1.concat(&w2), w1.inverse(), w1.conjugate_by(&u)] {
                checked += 1;
                assert!(
                    engine::in_normal_closure(pres, &gens, &w, 50_000)
                        .unwrap()
                        .is_yes(),
                    "{label}: closure must contain {w}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 7 (lasso congruence): PASS — {checked} closure checks, {:.2?}",
        elapsed
    );
}

#[test]
fn acceptance_8_whisker_discreteness_analog() {
    let start = Instant::now();

    // circle: qualifies at its smallest critical scale (arcs are trees)
    let circle = spaces::circle(12, 1.0).unwrap();
    let fine = critical_scales(&circle)[0];
    let got = unicover::structures::semilocal_simply_connected(&circle, fine)
        .unwrap()
        .expect("circle qualifies");
    assert!((got.epsilon() - fine.epsilon()).abs() < 1e-9);

    // wedge: same, at its nearest sample gap
    let wedge = spaces::wedge_circles(&[1.0, 1.0, 1.0], 16).unwrap();
    let wfine = critical_scales(&wedge)[0];
    let got = unicover::structures::semilocal_simply_connected(&wedge, wfine)
        .unwrap()
        .expect("wedge qualifies");
    assert!((got.epsilon() - wfine.epsilon()).abs() < 1e-9);

    // torus: qualifies at the grid step (ball loops are filled)
    let torus = spaces::torus_grid(4, 4).unwrap();
    let tfine = Scale((2.0f64).sqrt() + 1e-12);
    let got = unicover::structures::semilocal_simply_connected(&torus, tfine)
        .unwrap()
        .expect("torus qualifies");
    assert!(
        (got.epsilon() - 1.0).abs() < 1e-9,
        "grid-step feature size, got {}",
        got.epsilon()
    );

    // hawaiian(5, 16): above the smallest circle's diameter 1/5, no scale
    // qualifies (every ball swallows an essential circle)
    let hw = spaces::hawaiian(5, 16).unwrap();
    let hfine = Scale((std::f64::consts::PI / 16.0).sin() + 1e-12);
    let above = unicover::structures::ssc_scan(&hw, hfine, 0.2 + 1e-9).unwrap();
    assert!(
        above.scale.is_none(),
        "no qualifying scale above the smallest circle diameter, got {:?}",
        above.scale
    );
    assert!(above.gaps.is_empty(), "all verdicts decided: {:?}", above.gaps);
    // while the full scan still finds the below-feature-size scale
    let full = unicover::structures::semilocal_simply_connected(&hw, hfine).unwrap();
    let first = full.expect("tiny balls are contractible");
    assert!(first.epsilon() < 0.2, "qualifying scale {} below 1/5", first.epsilon());

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 8 (whisker discreteness analog): PASS — {:.2?}",
        elapsed
    );
}
