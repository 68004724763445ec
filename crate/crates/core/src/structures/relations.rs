//! The bp, lasso, and James closeness relations, the punctured-homotopy
//! search, and pair-path witnesses.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::{RelationContext, RelationKind, StructureVerdict, Witness};
use crate::chains::{bounded_center, Chain};
use crate::engine::{self, Verdict};
use crate::error::{Error, Result};
use crate::metric::{components_of, Scale};
use crate::pi1::ChainClass;
use crate::word::Word;

/// One conjugated bounded loop in a lasso decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct Puncture {
    /// Based conjugator as a class word.
    pub conjugator: Word,
    /// The bounded loop, based at its root inside the ball.
    pub loop_chain: Vec<usize>,
    /// Center of a ball bounding the loop.
    pub center: usize,
    /// Sign of the loop in the decomposition.
    pub inverse: bool,
}

/// Result of the punctured-homotopy search.
#[derive(Clone, Debug)]
pub enum PuncturedOutcome {
    Found(PuncturedWitness),
    NotFound { budget: usize },
}

impl PuncturedOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, PuncturedOutcome::Found(_))
    }
}

/// Explicit decomposition: the difference of the two chain classes equals the
/// product of the conjugated bounded loops (modulo triangle relators).
#[derive(Clone, Debug)]
pub struct PuncturedWitness {
    pub punctures: Vec<Puncture>,
    pub states_explored: usize,
}

/// Equal-length representatives walked in lockstep.
#[derive(Clone, Debug, Serialize)]
pub struct PairPath {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl PairPath {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Largest pointwise distance along the pair.
    pub fn pointwise_bound(&self, space: &crate::metric::MetricSpace) -> f64 {
        self.left
            .iter()
            .zip(&self.right)
            .map(|(&l, &r)| space.dist(l, r))
            .fold(0.0, f64::max)
    }
}

impl<'a> RelationContext<'a> {
    /// Candidate coarse balls containing both endpoints and connecting them
    /// in the in-ball fine graph, with a connector chain each.
    fn connecting_balls(&self, u: usize, v: usize, coarse: f64) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for p in 0..self.space().len() {
            if self.space().dist(p, u) > coarse || self.space().dist(p, v) > coarse {
                continue;
            }
            let sub = self.ball_graph(p, coarse);
            if !components_of(&sub).same(u, v) {
                continue;
            }
            let sigma = bfs_path(&sub, u, v).expect("components agree");
            out.push((p, sigma));
        }
        out
    }

    /// The loop word `walk(tree_v * sigma^-1 * tree_u^-1) * w_a^-1 * w_b`:
    /// membership in the endpoint ball subgroup decides bp-closeness in one
    /// ball.
    fn bp_target(&self, a: &ChainClass, b: &ChainClass, sigma: &[usize]) -> Result<Word> {
        let mut walk = self.presentation().tree_path(b.end)?;
        let mut rev: Vec<usize> = sigma.to_vec();
        rev.reverse();
        walk.extend_from_slice(&rev[1..]);
        let mut up = self.presentation().tree_path(a.end)?;
        up.reverse();
        walk.extend_from_slice(&up[1..]);
        let s = self.presentation().walk_word(&walk);
        Ok(s.concat(&a.word.inverse()).concat(&b.word))
    }

    /// Berestovskii-Plaut closeness: the classes differ by a chain inside one
    /// coarse ball. Quantifies over ball centers exhaustively.
    pub fn bp_close(&self, a: &ChainClass, b: &ChainClass, coarse: Scale) -> Result<StructureVerdict> {
        let candidates = self.connecting_balls(a.end, b.end, coarse.epsilon());
        let mut unknown: Option<String> = None;
        let mut any = false;
        for (p, sigma) in candidates {
            any = true;
            // loops at the shared endpoint inside this ball, pushed to the basepoint
            let loops = self.ball_loops_at(p, coarse.epsilon(), b.end)?;
            let mut gens = Vec::new();
            for l in &loops {
                let w = self.transfer_loop(b.end, l.vertices())?;
                if !w.is_empty() && !gens.contains(&w) {
                    gens.push(w);
                }
            }
            let target = self.bp_target(a, b, &sigma)?;
            match self.subgroup_membership(&gens, &target)? {
                Verdict::Yes => {
                    return Ok(StructureVerdict {
                        relation: RelationKind::Bp,
                        fine: self.fine().epsilon(),
                        coarse: coarse.epsilon(),
                        verdict: Verdict::Yes,
                        witness: Some(Witness::Ball {
                            center: p,
                            connector: sigma,
                        }),
                    })
                }
                Verdict::No => {}
                Verdict::Unknown(reason) => unknown = Some(reason),
            }
        }
        let verdict = if let Some(reason) = unknown {
            Verdict::Unknown(reason)
        } else if any {
            Verdict::No
        } else {
            Verdict::No
        };
        Ok(StructureVerdict {
            relation: RelationKind::Bp,
            fine: self.fine().epsilon(),
            coarse: coarse.epsilon(),
            verdict,
            witness: None,
        })
    }

    /// The word whose normal-closure membership decides lasso-closeness:
    /// `w_a * walk(tree_u * sigma * tree_v^-1) * w_b^-1` for any in-ball
    /// connector `sigma` (the choice washes out modulo the closure).
    fn lasso_target(&self, a: &ChainClass, b: &ChainClass, coarse: f64) -> Result<Option<Word>> {
        if a.end == b.end {
            return Ok(Some(a.word.concat(&b.word.inverse())));
        }
        let candidates = self.connecting_balls(a.end, b.end, coarse);
        let (_, sigma) = match candidates.into_iter().next() {
            Some(c) => c,
            None => return Ok(None),
        };
        let mut walk = self.presentation().tree_path(a.end)?;
        walk.extend_from_slice(&sigma[1..]);
        let mut up = self.presentation().tree_path(b.end)?;
        up.reverse();
        walk.extend_from_slice(&up[1..]);
        let t = self.presentation().walk_word(&walk);
        Ok(Some(a.word.concat(&t).concat(&b.word.inverse())))
    }

    /// Lasso closeness: the classes differ by a product of conjugates of
    /// coarse-bounded loops (times a bounded connector when endpoints differ).
    pub fn lasso_close(
        &self,
        a: &ChainClass,
        b: &ChainClass,
        coarse: Scale,
    ) -> Result<StructureVerdict> {
        let target = match self.lasso_target(a, b, coarse.epsilon())? {
            Some(t) => t,
            None => {
                return Ok(StructureVerdict {
                    relation: RelationKind::Lasso,
                    fine: self.fine().epsilon(),
                    coarse: coarse.epsilon(),
                    verdict: Verdict::No,
                    witness: None,
                })
            }
        };
        let gens = self.coarse_ball_loops(coarse.epsilon())?;
        let gen_words: Vec<Word> = gens.iter().map(|g| g.word.clone()).collect();
        let verdict = self.in_closure(&gen_words, &target)?;
        let witness = if verdict.is_yes() {
            Some(Witness::ClosureMembership { word: target })
        } else {
            None
        };
        Ok(StructureVerdict {
            relation: RelationKind::Lasso,
            fine: self.fine().epsilon(),
            coarse: coarse.epsilon(),
            verdict,
            witness,
        })
    }

    /// James closeness through the sandwich: a direct pointwise witness or a
    /// lasso certificate at this scale gives `Yes`; lasso failure at double
    /// the scale gives `No`; the gap stays `Unknown`.
    pub fn james_close(
        &self,
        a: &ChainClass,
        b: &ChainClass,
        coarse: Scale,
    ) -> Result<StructureVerdict> {
        let mk = |verdict, witness| StructureVerdict {
            relation: RelationKind::James,
            fine: self.fine().epsilon(),
            coarse: coarse.epsilon(),
            verdict,
            witness,
        };
        // direct equal-length witness from the canonical representatives
        if let Some(pp) = self.padded_pair(a, b, coarse.epsilon())? {
            let bound = pp.pointwise_bound(self.space());
            return Ok(mk(
                Verdict::Yes,
                Some(Witness::DirectPair {
                    left: pp.left,
                    right: pp.right,
                    pointwise_bound: bound,
                }),
            ));
        }
        let lower = self.lasso_close(a, b, coarse)?;
        if lower.verdict.is_yes() {
            return Ok(mk(
                Verdict::Yes,
                Some(Witness::Sandwich {
                    lasso_scale: coarse.epsilon(),
                    uc_scale: 2.0 * coarse.epsilon(),
                }),
            ));
        }
        let upper = self.lasso_close(a, b, Scale(2.0 * coarse.epsilon()))?;
        if upper.verdict.is_no() {
            return Ok(mk(Verdict::No, None));
        }
        Ok(mk(
            Verdict::Unknown("sandwich gap between lasso scales".into()),
            None,
        ))
    }

    /// Canonical representatives padded to equal length; `Some` when they are
    /// pointwise within the bound (a direct uniform witness).
    fn padded_pair(&self, a: &ChainClass, b: &ChainClass, bound: f64) -> Result<Option<PairPath>> {
        let ca = self.presentation().realize_class(a)?;
        let cb = self.presentation().realize_class(b)?;
        let mut left = ca.vertices().to_vec();
        let mut right = cb.vertices().to_vec();
        while left.len() < right.len() {
            left.push(*left.last().unwrap());
        }
        while right.len() < left.len() {
            right.push(*right.last().unwrap());
        }
        let pp = PairPath { left, right };
        if pp.pointwise_bound(self.space()) <= bound {
            Ok(Some(pp))
        } else {
            Ok(None)
        }
    }

    /// Bounded search for a punctured homotopy between two based chains:
    /// a decomposition of their class difference into conjugates of
    /// coarse-bounded loops (punctures) modulo triangle moves.
    ///
    /// The search runs on class words: inserting a bounded-loop word at a
    /// position multiplies by a conjugate of it (a puncture); inserting a
    /// triangle relator is a move and costs nothing. Budget counts explored
    /// states. Soundness is by construction; `NotFound` only reports budget
    /// exhaustion, never impossibility.
    pub fn punctured_homotopy_search(
        &self,
        a: &Chain,
        b: &Chain,
        coarse: Scale,
        budget: usize,
    ) -> Result<PuncturedOutcome> {
        let ca = self.class_of(a)?;
        let cb = self.class_of(b)?;
        let target = match self.lasso_target(&ca, &cb, coarse.epsilon())? {
            Some(t) => {
                // search orientation: decompose w_b-side minus w_a-side
                t.inverse()
            }
            None => return Ok(PuncturedOutcome::NotFound { budget }),
        };
        if target.is_empty() {
            return Ok(PuncturedOutcome::Found(PuncturedWitness {
                punctures: Vec::new(),
                states_explored: 0,
            }));
        }

        let gens = self.coarse_ball_loops(coarse.epsilon())?;

        // When the group is certified free, search in the simplified basis:
        // exact words, no relator moves needed, smaller branching. Otherwise
        // search raw words with triangle relators as zero-cost moves.
        let in_basis = self.free_rank().is_some();
        let target = self.decidable_word(&target);
        if target.is_empty() {
            return Ok(PuncturedOutcome::Found(PuncturedWitness {
                punctures: Vec::new(),
                states_explored: 0,
            }));
        }

        // pieces: (word, Some(gen index)) for punctures, (relator, None) for moves
        let mut pieces: Vec<(Word, Option<usize>)> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let w = self.decidable_word(&g.word);
            if w.is_empty() {
                continue;
            }
            pieces.push((w.clone(), Some(i)));
            pieces.push((w.inverse(), Some(i)));
        }
        if !in_basis {
            for r in self.presentation().relators() {
                if !r.is_empty() {
                    pieces.push((r.clone(), None));
                    pieces.push((r.inverse(), None));
                }
            }
        }
        if pieces.is_empty() {
            return Ok(PuncturedOutcome::NotFound { budget });
        }
        let max_piece = pieces.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        let max_len = target.len() + 3 * max_piece + 6;

        // op log per state: (prefix, piece index applied)
        type Trail = Vec<(Word, usize)>;
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue: VecDeque<(Word, Trail)> = VecDeque::new();
        seen.insert(target.clone());
        queue.push_back((target.clone(), Vec::new()));
        let mut states = 0usize;

        while let Some((w, trail)) = queue.pop_front() {
            states += 1;
            if states > budget {
                return Ok(PuncturedOutcome::NotFound { budget });
            }
            for pos in 0..=w.len() {
                let prefix = Word::from_letters(w.letters()[..pos].iter().copied());
                let suffix = Word::from_letters(w.letters()[pos..].iter().copied());
                for (pi, (piece, _)) in pieces.iter().enumerate() {
                    let next = prefix.concat(piece).concat(&suffix);
                    if next.len() > max_len || seen.contains(&next) {
                        continue;
                    }
                    let mut next_trail = trail.clone();
                    next_trail.push((prefix.clone(), pi));
                    if next.is_empty() {
                        let witness =
                            self.witness_from_trail(&pieces, &gens, next_trail, states, in_basis);
                        return Ok(PuncturedOutcome::Found(witness));
                    }
                    seen.insert(next.clone());
                    queue.push_back((next, next_trail));
                }
            }
        }
        Ok(PuncturedOutcome::NotFound { budget })
    }

    fn witness_from_trail(
        &self,
        pieces: &[(Word, Option<usize>)],
        gens: &[super::BallLoop],
        trail: Vec<(Word, usize)>,
        states: usize,
        in_basis: bool,
    ) -> PuncturedWitness {
        // target = product over ops (in order) of prefix * piece^-1 * prefix^-1;
        // relator pieces are moves, generator pieces are punctures
        let mut punctures = Vec::new();
        for (prefix, pi) in trail {
            let (piece, gen_idx) = &pieces[pi];
            if let Some(gi) = gen_idx {
                let g = &gens[*gi];
                // piece is the (possibly rewritten) gen word or its inverse;
                // the decomposition uses piece^-1
                let gen_word = if in_basis {
                    self.decidable_word(&g.word)
                } else {
                    g.word.clone()
                };
                let inverse = *piece == gen_word;
                let conjugator = if in_basis {
                    self.basis_word_to_raw(&prefix)
                } else {
                    prefix
                };
                punctures.push(Puncture {
                    conjugator,
                    loop_chain: g.chain.clone(),
                    center: g.center,
                    inverse,
                });
            }
        }
        PuncturedWitness {
            punctures,
            states_explored: states,
        }
    }

    /// Verifies a punctured witness: every loop is coarse-bounded and the
    /// decomposition reproduces the class difference.
    pub fn verify_punctured_witness(
        &self,
        a: &Chain,
        b: &Chain,
        w: &PuncturedWitness,
        coarse: Scale,
    ) -> Result<()> {
        let ca = self.class_of(a)?;
        let cb = self.class_of(b)?;
        let mut product = Word::identity();
        for p in &w.punctures {
            if bounded_center(self.space(), coarse.epsilon(), &p.loop_chain).is_none() {
                return Err(Error::Validation(format!(
                    "puncture loop at center {} is not {}-bounded",
                    p.center,
                    coarse.epsilon()
                )));
            }
            let root = p.loop_chain[0];
            let mut loop_word = self.transfer_loop(root, &p.loop_chain)?;
            if p.inverse {
                loop_word = loop_word.inverse();
            }
            product = product.concat(&loop_word.conjugate_by(&p.conjugator));
        }
        // product * w_a-side must equal w_b-side in the group
        let lhs = match self.lasso_target(&ca, &cb, coarse.epsilon())? {
            Some(t) => t.inverse(),
            None => return Err(Error::Validation("endpoints not coarse-connected".into())),
        };
        match self.words_equal(&lhs, &product)? {
            Verdict::Yes => Ok(()),
            other => Err(Error::Validation(format!(
                "decomposition mismatch: {other}"
            ))),
        }
    }

    /// Builds the uniform pair witness from a punctured witness: both sides
    /// walk the conjugators and connectors together; the right side traverses
    /// each bounded loop while the left waits at its root, so the pointwise
    /// distance stays within twice the bound.
    pub fn uc_witness_from_punctures(
        &self,
        a: &ChainClass,
        b: &ChainClass,
        w: &PuncturedWitness,
        _coarse: Scale,
    ) -> Result<PairPath> {
        if a.end != b.end {
            return Err(Error::Validation(
                "pair witness construction expects a common endpoint".into(),
            ));
        }
        let mut left: Vec<usize> = vec![self.space().basepoint()];
        let mut right: Vec<usize> = vec![self.space().basepoint()];
        let extend_both = |seq: &[usize], left: &mut Vec<usize>, right: &mut Vec<usize>| {
            for &v in &seq[1..] {
                left.push(v);
                right.push(v);
            }
        };
        for p in &w.punctures {
            // out along the conjugator and the tree path to the loop root
            let conj_class = ChainClass {
                end: self.space().basepoint(),
                word: p.conjugator.clone(),
            };
            let conj_chain = self.presentation().realize_class(&conj_class)?;
            extend_both(conj_chain.vertices(), &mut left, &mut right);
            let root = p.loop_chain[0];
            let out = self.presentation().tree_path(root)?;
            extend_both(&out, &mut left, &mut right);
            // the loop: right walks it, left waits at the root
            let mut loop_vertices = p.loop_chain.clone();
            if p.inverse {
                loop_vertices.reverse();
            }
            for &v in &loop_vertices[1..] {
                left.push(root);
                right.push(v);
            }
            // back home
            let mut back = self.presentation().tree_path(root)?;
            back.reverse();
            extend_both(&back, &mut left, &mut right);
            let conj_back = crate::chains::reverse(&conj_chain);
            extend_both(conj_back.vertices(), &mut left, &mut right);
        }
        // both walk a representative of the left class
        let base = self.presentation().realize_class(a)?;
        extend_both(base.vertices(), &mut left, &mut right);
        Ok(PairPath { left, right })
    }

    /// Checks a pair path end to end: lockstep fine steps, pointwise bound,
    /// and the classes of the two sides.
    pub fn verify_pair_path(
        &self,
        pp: &PairPath,
        a: &ChainClass,
        b: &ChainClass,
        bound: f64,
    ) -> Result<()> {
        if pp.left.len() != pp.right.len() || pp.is_empty() {
            return Err(Error::Validation("pair path sides must match".into()));
        }
        let eps = self.fine().epsilon();
        let base = self.space().basepoint();
        if pp.left[0] != base || pp.right[0] != base {
            return Err(Error::Validation("pair path must start at the basepoint pair".into()));
        }
        for side in [&pp.left, &pp.right] {
            for st in side.windows(2) {
                let d = self.space().dist(st[0], st[1]);
                if d > eps {
                    return Err(Error::MoveBreaksChain(st[0], st[1], d, eps));
                }
            }
        }
        let worst = pp.pointwise_bound(self.space());
        if worst > bound {
            return Err(Error::Validation(format!(
                "pointwise distance {worst} exceeds bound {bound}"
            )));
        }
        let left_class = ChainClass {
            end: *pp.left.last().unwrap(),
            word: self.presentation().walk_word(&pp.left),
        };
        let right_class = ChainClass {
            end: *pp.right.last().unwrap(),
            word: self.presentation().walk_word(&pp.right),
        };
        for (got, want, side) in [(left_class, a, "left"), (right_class, b, "right")] {
            if got.end != want.end || !self.words_equal(&got.word, &want.word)?.is_yes() {
                return Err(Error::Validation(format!(
                    "{side} side of the pair path represents the wrong class"
                )));
            }
        }
        Ok(())
    }

    /// Rung loops of a pair path: each quadrilateral step loop, every one of
    /// which must be bounded at twice the pointwise bound. This is the
    /// converse construction turning a pair witness into a lasso.
    pub fn rung_loops(&self, pp: &PairPath) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..pp.len() - 1 {
            let (l0, l1, r1, r0) = (pp.left[i], pp.left[i + 1], pp.right[i + 1], pp.right[i]);
            let rung = vec![l0, l1, r1, r0, l0];
            out.push(rung);
        }
        out
    }
}

fn bfs_path(graph: &crate::metric::EpsilonGraph, from: usize, to: usize) -> Option<Vec<usize>> {
    if from == to {
        return Some(vec![from]);
    }
    let mut prev: Vec<Option<usize>> = vec![None; graph.len()];
    let mut seen = vec![false; graph.len()];
    seen[from] = true;
    let mut queue = VecDeque::new();
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some(u);
                if v == to {
                    let mut path = vec![to];
                    let mut cur = to;
                    while let Some(p) = prev[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
    }
    None
}

/// Spec-shaped one-shot wrappers.
pub fn bp_close(
    space: &crate::metric::MetricSpace,
    a: &ChainClass,
    b: &ChainClass,
    fine: Scale,
    coarse: Scale,
    cap: usize,
) -> Result<StructureVerdict> {
    RelationContext::new(space, fine, cap)?.bp_close(a, b, coarse)
}

pub fn lasso_close(
    space: &crate::metric::MetricSpace,
    a: &ChainClass,
    b: &ChainClass,
    fine: Scale,
    coarse: Scale,
    cap: usize,
) -> Result<StructureVerdict> {
    RelationContext::new(space, fine, cap)?.lasso_close(a, b, coarse)
}

pub fn james_close(
    space: &crate::metric::MetricSpace,
    a: &ChainClass,
    b: &ChainClass,
    fine: Scale,
    coarse: Scale,
    cap: usize,
) -> Result<StructureVerdict> {
    RelationContext::new(space, fine, cap)?.james_close(a, b, coarse)
}

pub fn punctured_homotopy_search(
    space: &crate::metric::MetricSpace,
    a: &Chain,
    b: &Chain,
    coarse: Scale,
    budget: usize,
) -> Result<PuncturedOutcome> {
    let ctx = RelationContext::new(space, a.scale(), engine::DEFAULT_COSET_CAP)?;
    ctx.punctured_homotopy_search(a, b, coarse, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::critical_scales;
    use crate::spaces;

    fn twelve_gon_halves() -> (
        crate::metric::MetricSpace,
        Scale,
        ChainClass,
        ChainClass,
    ) {
        let space = spaces::circle(12, 1.0).unwrap();
        let fine = critical_scales(&space)[0];
        let ctx = RelationContext::new(&space, fine, 10_000).unwrap();
        let a = ctx
            .class_of(&Chain::new(&space, fine, vec![0, 1, 2, 3, 4, 5, 6]).unwrap())
            .unwrap();
        let b = ctx
            .class_of(&Chain::new(&space, fine, vec![0, 11, 10, 9, 8, 7, 6]).unwrap())
            .unwrap();
        (space, fine, a, b)
    }

    #[test]
    fn bp_reflexive_and_small_scale_no() {
        let (space, fine, a, b) = twelve_gon_halves();
        let ctx = RelationContext::new(&space, fine, 10_000).unwrap();
        assert!(ctx.bp_close(&a, &a, Scale(0.6)).unwrap().verdict.is_yes());
        // the two half-circle chains differ by the full loop: no 0.6-ball
        // realizes it
        assert!(ctx.bp_close(&a, &b, Scale(0.6)).unwrap().verdict.is_no());
        // whole space in one ball at the diameter
        assert!(ctx.bp_close(&a, &b, Scale(2.0)).unwrap().verdict.is_yes());
    }

    #[test]
    fn bp_symmetry() {
        let (space, fine, a, b) = twelve_gon_halves();
        let ctx = RelationContext::new(&space, fine, 10_000).unwrap();
        for coarse in [0.6, 1.0, 2.0] {
            let ab = ctx.bp_close(&a, &b, Scale(coarse)).unwrap().verdict;
            let ba = ctx.bp_close(&b, &a, Scale(coarse)).unwrap().verdict;
            assert_eq!(ab.label(), ba.label(), "bp symmetric at {coarse}");
        }
    }

    #[test]
    fn lasso_no_at_small_scale_matches_bp() {
        let (space, fine, a, b) = twelve_gon_halves();
        let ctx = RelationContext::new(&space, fine, 10_000).unwrap();
        // all 0.6-balls are arcs, the closure is trivial, so lasso reduces to bp
        assert!(ctx.lasso_close(&a, &b, Scale(0.6)).unwrap().verdict.is_no());
        assert!(ctx.lasso_close(&a, &a, Scale(0.6)).unwrap().verdict.is_yes());
    }

    #[test]
    fn figure_eight_conjugate_is_lasso_but_not_bp() {
        // big circle 0 (radius 1), small circle 1 (radius 0.5)
        let space = spaces::wedge_circles(&[1.0, 0.5], 16).unwrap();
        // the big circle's sample gap; the small circle is finer
        let fine = Scale(2.0 * (std::f64::consts::PI / 16.0).sin() + 1e-12);
        let ctx = RelationContext::new(&space, fine, 50_000).unwrap();
        // the small circle picks up second-neighbor triangles at this scale,
        // but the group still simplifies to a free one
        assert!(ctx.is_decidably_free());
        let g0 = ctx
            .class_of(
                &Chain::new(&space, fine, spaces::wedge_circle_loop(16, 0)).unwrap(),
            )
            .unwrap();
        let g1 = ctx
            .class_of(
                &Chain::new(&space, fine, spaces::wedge_circle_loop(16, 1)).unwrap(),
            )
            .unwrap();
        let conj = ChainClass {
            end: 0,
            word: g1.word.conjugate_by(&g0.word),
        };
        let trivial = ChainClass::trivial(0);
        // coarse = diameter of the small circle: it fits in a ball, the big
        // circle does not
        let coarse = Scale(1.0);
        let lasso = ctx.lasso_close(&conj, &trivial, coarse).unwrap();
        assert!(lasso.verdict.is_yes(), "conjugate of a bounded loop is a lasso");
        let bp = ctx.bp_close(&conj, &trivial, coarse).unwrap();
        assert!(bp.verdict.is_no(), "no single ball contains the conjugate");
    }

    #[test]
    fn punctured_search_finds_conjugate_witness() {
        let space = spaces::wedge_circles(&[1.0, 0.5], 16).unwrap();
        // the big circle's sample gap; the small circle is finer
        let fine = Scale(2.0 * (std::f64::consts::PI / 16.0).sin() + 1e-12);
        let ctx = RelationContext::new(&space, fine, 50_000).unwrap();
        let g0 = spaces::wedge_circle_loop(16, 0);
        let g1 = spaces::wedge_circle_loop(16, 1);
        // chain for g0 * g1 * g0^-1
        let mut verts = g0.clone();
        verts.extend_from_slice(&g1[1..]);
        let mut rev = g0.clone();
        rev.reverse();
        verts.extend_from_slice(&rev[1..]);
        let a = Chain::new(&space, fine, verts).unwrap();
        let b = Chain::constant(&space, fine, 0).unwrap();
        let coarse = Scale(1.0);
        let out = ctx
            .punctured_homotopy_search(&a, &b, coarse, 100_000)
            .unwrap();
        match out {
            PuncturedOutcome::Found(w) => {
                assert_eq!(w.punctures.len(), 1, "one puncture suffices");
                ctx.verify_punctured_witness(&a, &b, &w, coarse).unwrap();
            }
            PuncturedOutcome::NotFound { .. } => panic!("witness must be found"),
        }
    }

    #[test]
    fn punctured_search_honors_no_certificates() {
        let (space, fine, a_class, _) = twelve_gon_halves();
        let ctx = RelationContext::new(&space, fine, 10_000).unwrap();
        let a = ctx.presentation().realize_class(&a_class).unwrap();
        let full = Chain::new(&space, fine, vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0]).unwrap();
        let trivial = Chain::constant(&space, fine, 0).unwrap();
        let _ = a;
        // the full loop is not lasso-trivial at 0.6; search must not succeed
        let out = ctx
            .punctured_homotopy_search(&full, &trivial, Scale(0.6), 3000)
            .unwrap();
        assert!(!out.is_found());
    }

    #[test]
    fn james_sandwich_on_twelve_gon() {
        let (space, fine, a, b) = twelve_gon_halves();
        let ctx = RelationContext::new(&space, fine, 10_000).unwrap();
        // lasso fails at 1.2 = 2 * 0.6, so james is No at 0.6
        let j = ctx.james_close(&a, &b, Scale(0.6)).unwrap();
        assert!(j.verdict.is_no());
        // identical classes are always james-close
        let j2 = ctx.james_close(&a, &a, Scale(0.6)).unwrap();
        assert!(j2.verdict.is_yes());
        // at the diameter everything is one ball
        let j3 = ctx.james_close(&a, &b, Scale(2.0)).unwrap();
        assert!(j3.verdict.is_yes());
    }

    #[test]
    fn pair_witness_from_punctures_verifies() {
        let space = spaces::wedge_circles(&[1.0, 0.5], 16).unwrap();
        // the big circle's sample gap; the small circle is finer
        let fine = Scale(2.0 * (std::f64::consts::PI / 16.0).sin() + 1e-12);
        let ctx = RelationContext::new(&space, fine, 50_000).unwrap();
        let g0 = spaces::wedge_circle_loop(16, 0);
        let g1 = spaces::wedge_circle_loop(16, 1);
        let mut verts = g0.clone();
        verts.extend_from_slice(&g1[1..]);
        let mut rev = g0;
        rev.reverse();
        verts.extend_from_slice(&rev[1..]);
        let a = Chain::new(&space, fine, verts).unwrap();
        let b = Chain::constant(&space, fine, 0).unwrap();
        let coarse = Scale(1.0);
        let w = match ctx
            .punctured_homotopy_search(&a, &b, coarse, 100_000)
            .unwrap()
        {
            PuncturedOutcome::Found(w) => w,
            _ => panic!("expected witness"),
        };
        let ca = ctx.class_of(&a).unwrap();
        let cb = ctx.class_of(&b).unwrap();
        // left side walks a, right side walks the decomposition onto b
        let pp = ctx.uc_witness_from_punctures(&ca, &cb, &w, coarse).unwrap();
        ctx.verify_pair_path(&pp, &ca, &cb, 2.0 * coarse.epsilon())
            .unwrap();
        // every rung loop is bounded at twice the bound
        for rung in ctx.rung_loops(&pp) {
            assert!(
                bounded_center(&space, 2.0 * coarse.epsilon(), &rung).is_some(),
                "rung {rung:?} unbounded"
            );
        }
    }
}
