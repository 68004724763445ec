//! Small-loop-transfer checkers, the whisker-discreteness analog, and the
//! small-loop subgroup.

use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use super::RelationContext;
use crate::engine::{self, FoldedGraph, Verdict};
use crate::error::{Error, Result};
use crate::metric::{critical_scales, MetricSpace, Scale};
use crate::word::Word;

/// Quantifier mode for the transfer check. Rows are computed the same way
/// (conjugation is absorbed into the normal core); the mode changes the
/// summary: `Uniform` demands one target scale for every center, `PerPoint`
/// reports each center against its own minimal passing scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SltMode {
    PerPoint,
    Uniform,
}

/// One transfer check: a ball loop at a center, transferred to the basepoint,
/// tested against the normal core of the target ball subgroup.
#[derive(Clone, Debug, Serialize)]
pub struct SltRow {
    pub center: usize,
    pub gen_index: usize,
    pub transferred: Word,
    pub verdict: Verdict,
    /// For refuted rows: a conjugator pushing the class outside the target
    /// subgroup, when a short one exists.
    pub witness_conjugator: Option<Word>,
    /// For rows that fail at the given target: the smallest critical scale at
    /// which they pass.
    pub minimal_passing_target: Option<f64>,
}

/// Full transfer report at a scale triple.
#[derive(Clone, Debug, Serialize)]
pub struct SltReport {
    pub mode: SltMode,
    pub fine: f64,
    pub ball: f64,
    pub target: f64,
    pub rows: Vec<SltRow>,
    pub all_yes: bool,
    pub any_unknown: bool,
    /// Uniform mode: the smallest critical scale at which every row passes.
    pub uniform_minimal_target: Option<f64>,
}

/// Membership tester for the normal core of a target ball subgroup.
enum CoreTester {
    /// Certified-free ambient group, graph over the simplified basis: folded
    /// graphs decide exactly. Incomplete graphs mean infinite index, whose
    /// core is trivial.
    Free(FoldedGraph),
    Table(engine::CosetTable),
    Unknown(String),
}

impl<'a> RelationContext<'a> {
    fn core_tester(&self, target: f64) -> Result<CoreTester> {
        let gens = self
            .ball_subgroup(self.space().basepoint(), Scale(target))?
            .gens;
        if let Some(rank) = self.free_rank() {
            let basis: Vec<Word> = gens
                .iter()
                .map(|g| self.decidable_word(g))
                .filter(|g| !g.is_empty())
                .collect();
            return Ok(CoreTester::Free(FoldedGraph::new(rank, &basis)));
        }
        let table = engine::todd_coxeter(self.presentation(), &gens, self.cap())?;
        if table.is_complete() {
            Ok(CoreTester::Table(table))
        } else {
            Ok(CoreTester::Unknown(format!(
                "target subgroup enumeration exhausted at cap {}",
                self.cap()
            )))
        }
    }

    fn core_verdict(&self, tester: &CoreTester, w: &Word) -> Verdict {
        match tester {
            CoreTester::Free(g) => {
                if g.core_contains(&self.decidable_word(w)) {
                    Verdict::Yes
                } else {
                    Verdict::No
                }
            }
            CoreTester::Table(t) => engine::in_normal_core(t, w)
                .unwrap_or_else(|e| Verdict::Unknown(format!("core query failed: {e}"))),
            CoreTester::Unknown(reason) => Verdict::Unknown(reason.clone()),
        }
    }

    fn subgroup_verdict(&self, tester: &CoreTester, w: &Word) -> Verdict {
        match tester {
            CoreTester::Free(g) => {
                if g.contains(&self.decidable_word(w)) {
                    Verdict::Yes
                } else {
                    Verdict::No
                }
            }
            CoreTester::Table(t) => engine::is_in_subgroup(w, t),
            CoreTester::Unknown(reason) => Verdict::Unknown(reason.clone()),
        }
    }

    /// Transfer check: for every center and every generator of its ball-loop
    /// group, does the class transferred to the basepoint land in the normal
    /// core of the target ball subgroup (so that every conjugate, i.e. every
    /// transfer path, keeps it inside)?
    pub fn slt_check(&self, ball: Scale, target: Scale, mode: SltMode) -> Result<SltReport> {
        let mut testers: HashMap<u64, Rc<CoreTester>> = HashMap::new();
        let mut tester_at = |ctx: &Self, scale: f64| -> Result<Rc<CoreTester>> {
            if let Some(t) = testers.get(&scale.to_bits()) {
                return Ok(Rc::clone(t));
            }
            let t = Rc::new(ctx.core_tester(scale)?);
            testers.insert(scale.to_bits(), Rc::clone(&t));
            Ok(t)
        };

        let scales_above: Vec<f64> = critical_scales(self.space())
            .into_iter()
            .map(|s| s.epsilon())
            .filter(|&s| s > target.epsilon())
            .collect();

        let mut rows = Vec::new();
        for center in 0..self.space().len() {
            if !self.presentation().in_component(center) {
                continue;
            }
            let loops = self.ball_loops_at(center, ball.epsilon(), center)?;
            for (gen_index, l) in loops.iter().enumerate() {
                let transferred = self.transfer_loop(center, l.vertices())?;
                // null-homotopic loops transfer trivially; no tester needed
                let verdict = if transferred.is_empty()
                    || self.words_equal(&transferred, &Word::identity())?.is_yes()
                {
                    Verdict::Yes
                } else {
                    let tester = tester_at(self, target.epsilon())?;
                    self.core_verdict(&tester, &transferred)
                };
                let witness_conjugator = if verdict.is_no() {
                    let tester = tester_at(self, target.epsilon())?;
                    self.escape_conjugator(&tester, &transferred)
                } else {
                    None
                };
                let minimal_passing_target = if verdict.is_yes() {
                    None
                } else {
                    let mut found = None;
                    for &s in &scales_above {
                        let t = tester_at(self, s)?;
                        if self.core_verdict(&t, &transferred).is_yes() {
                            found = Some(s);
                            break;
                        }
                    }
                    found
                };
                rows.push(SltRow {
                    center,
                    gen_index,
                    transferred,
                    verdict,
                    witness_conjugator,
                    minimal_passing_target,
                });
            }
        }

        let all_yes = rows.iter().all(|r| r.verdict.is_yes());
        let any_unknown = rows.iter().any(|r| r.verdict.is_unknown());
        let uniform_minimal_target = if all_yes {
            Some(target.epsilon())
        } else if rows
            .iter()
            .all(|r| r.verdict.is_yes() || r.minimal_passing_target.is_some())
        {
            rows.iter()
                .filter_map(|r| r.minimal_passing_target)
                .fold(None, |acc: Option<f64>, s| {
                    Some(acc.map_or(s, |a| a.max(s)))
                })
        } else {
            None
        };

        Ok(SltReport {
            mode,
            fine: self.fine().epsilon(),
            ball: ball.epsilon(),
            target: target.epsilon(),
            rows,
            all_yes,
            any_unknown,
            uniform_minimal_target,
        })
    }

    /// Short conjugator pushing a refuted class outside the target subgroup.
    fn escape_conjugator(&self, tester: &CoreTester, t: &Word) -> Option<Word> {
        let mut candidates = vec![Word::identity()];
        for g in 0..self.presentation().gen_count() {
            candidates.push(Word::generator(g, false));
            candidates.push(Word::generator(g, true));
        }
        candidates
            .into_iter()
            .find(|c| self.subgroup_verdict(tester, &t.conjugate_by(c)).is_no())
    }
}

/// Spec-shaped transfer check entry point.
pub fn slt_check(
    space: &MetricSpace,
    fine: Scale,
    ball: Scale,
    target: Scale,
    mode: SltMode,
    cap: usize,
) -> Result<SltReport> {
    RelationContext::new(space, fine, cap)?.slt_check(ball, target, mode)
}

/// Result of the whisker-discreteness scan.
#[derive(Clone, Debug, Serialize)]
pub struct SscOutcome {
    /// Smallest qualifying critical scale, if any.
    pub scale: Option<f64>,
    /// Scales whose ball triviality could not be decided.
    pub gaps: Vec<(f64, String)>,
}

/// Scans critical scales at or above `min_scale` for the smallest radius
/// whose basepoint ball has certified-trivial loop image.
pub fn ssc_scan(space: &MetricSpace, fine: Scale, min_scale: f64) -> Result<SscOutcome> {
    if space.len() == 1 {
        return Ok(SscOutcome {
            scale: Some(0.0),
            gaps: Vec::new(),
        });
    }
    let ctx = RelationContext::new(space, fine, engine::DEFAULT_COSET_CAP)?;
    let mut gaps = Vec::new();
    for r in critical_scales(space) {
        if r.epsilon() < min_scale {
            continue;
        }
        let gens = ctx.ball_subgroup(space.basepoint(), r)?.gens;
        let mut all_trivial = true;
        let mut unknown: Option<String> = None;
        for w in &gens {
            match ctx.words_equal(w, &Word::identity())? {
                Verdict::Yes => {}
                Verdict::No => {
                    all_trivial = false;
                    break;
                }
                Verdict::Unknown(reason) => {
                    all_trivial = false;
                    unknown = Some(reason);
                    break;
                }
            }
        }
        if all_trivial {
            return Ok(SscOutcome {
                scale: Some(r.epsilon()),
                gaps,
            });
        }
        if let Some(reason) = unknown {
            gaps.push((r.epsilon(), reason));
        }
    }
    Ok(SscOutcome { scale: None, gaps })
}

/// Discrete analog of whisker-topology discreteness at the basepoint: the
/// smallest critical scale whose basepoint ball carries only null-homotopic
/// loops, or none.
pub fn semilocal_simply_connected(space: &MetricSpace, fine: Scale) -> Result<Option<Scale>> {
    Ok(ssc_scan(space, fine, 0.0)?.scale.map(Scale))
}

/// Result of the small-loop subgroup computation.
#[derive(Clone, Debug, Serialize)]
pub enum SmallLoopOutcome {
    /// Generators of the intersection of ball images across the scales.
    /// Empty certifies the homotopically-Hausdorff analog at these scales.
    Gens(Vec<Word>),
    Unknown(String),
}

/// Generators of the intersection of basepoint ball-subgroup images across a
/// descending list of scales. Free ambient groups use folded-graph fiber
/// products; presented groups intersect coset tables (finite index required).
pub fn small_loop_subgroup(
    space: &MetricSpace,
    fine: Scale,
    scales: &[Scale],
) -> Result<SmallLoopOutcome> {
    if scales.is_empty() {
        return Err(Error::Validation("need at least one scale".into()));
    }
    for w in scales.windows(2) {
        if w[0].epsilon() < w[1].epsilon() {
            return Err(Error::Validation("scales must be descending".into()));
        }
    }
    let ctx = RelationContext::new(space, fine, engine::DEFAULT_COSET_CAP)?;
    let gens_per_scale: Vec<Vec<Word>> = scales
        .iter()
        .map(|&s| Ok(ctx.ball_subgroup(space.basepoint(), s)?.gens))
        .collect::<Result<_>>()?;

    if let Some(rank) = ctx.free_rank() {
        let mut meet: Option<FoldedGraph> = None;
        for gens in &gens_per_scale {
            let basis: Vec<Word> = gens
                .iter()
                .map(|g| ctx.decidable_word(g))
                .filter(|g| !g.is_empty())
                .collect();
            let g = FoldedGraph::new(rank, &basis);
            meet = Some(match meet {
                None => g,
                Some(m) => m.intersect(&g),
            });
        }
        let gens = meet
            .expect("nonempty scales")
            .subgroup_generators()
            .into_iter()
            .map(|w| ctx.basis_word_to_raw(&w))
            .collect();
        return Ok(SmallLoopOutcome::Gens(gens));
    }

    // presented case: product of coset actions, Schreier generators of the
    // stabilizer of the all-zeros tuple
    let mut tables = Vec::new();
    for gens in &gens_per_scale {
        let t = engine::todd_coxeter(ctx.presentation(), gens, ctx.cap())?;
        if !t.is_complete() {
            return Ok(SmallLoopOutcome::Unknown(format!(
                "ball subgroup enumeration exhausted at cap {}",
                ctx.cap()
            )));
        }
        tables.push(t);
    }
    let start: Vec<usize> = vec![0; tables.len()];
    let mut words: HashMap<Vec<usize>, Word> = HashMap::new();
    words.insert(start.clone(), Word::identity());
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    let mut gens_out: Vec<Word> = Vec::new();
    while let Some(tuple) = queue.pop_front() {
        let base = words[&tuple].clone();
        for g in 0..ctx.presentation().gen_count() {
            for inverse in [false, true] {
                let letter = if inverse {
                    -((g as i32) + 1)
                } else {
                    (g as i32) + 1
                };
                let next: Option<Vec<usize>> = tuple
                    .iter()
                    .zip(&tables)
                    .map(|(&c, t)| t.act(c, letter))
                    .collect();
                let next = match next {
                    Some(n) => n,
                    None => continue,
                };
                let candidate = base.concat(&Word::generator(g, inverse));
                if let Some(existing) = words.get(&next) {
                    let schreier = candidate.concat(&existing.inverse());
                    if !schreier.is_empty()
                        && !gens_out.contains(&schreier)
                        && !gens_out.contains(&schreier.inverse())
                    {
                        gens_out.push(schreier);
                    }
                } else {
                    if words.len() >= ctx.cap() {
                        return Ok(SmallLoopOutcome::Unknown(format!(
                            "product action exceeded cap {}",
                            ctx.cap()
                        )));
                    }
                    words.insert(next.clone(), candidate);
                    queue.push_back(next);
                }
            }
        }
    }
    gens_out.sort();
    Ok(SmallLoopOutcome::Gens(gens_out))
}
