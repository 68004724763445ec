//! Closeness relations on the universal-cover set and small-loop-transfer
//! checkers, in discrete form.
//!
//! Three relations on homotopy classes of based chains are decided at a pair
//! of scales (fine for chains, coarse for bounds):
//!
//! * `bp_close` — the classes differ by a chain contained in one coarse ball;
//! * `lasso_close` — they differ by a lasso: a product of conjugates of
//!   coarse-bounded loops;
//! * `james_close` — they admit representatives forming a pointwise-close
//!   pair path, decided through a sandwich of lasso queries plus a direct
//!   witness search.
//!
//! Everything is three-valued: `Yes` and `No` come with certificates, caps
//! surface as `Unknown`.

mod relations;
mod slt;

pub use relations::{
    bp_close, james_close, lasso_close, punctured_homotopy_search, PairPath, Puncture,
    PuncturedOutcome, PuncturedWitness,
};
pub use slt::{
    semilocal_simply_connected, slt_check, small_loop_subgroup, ssc_scan, SltMode, SltReport,
    SltRow, SmallLoopOutcome, SscOutcome,
};

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use crate::chains::Chain;
use crate::engine::{self, FoldedGraph, Verdict};
use crate::error::{Error, Result};
use crate::metric::{components_of, entourage_graph, EpsilonGraph, MetricSpace, Scale};
use crate::pi1::{presentation, presentation_of_graph, simplify_with_map, ChainClass, Presentation};
use crate::word::Word;

/// Image of the loops of a ball at the basepoint: generators of the subgroup
/// of classes representable inside `B(center, ball_scale)`.
#[derive(Clone, Debug, Serialize)]
pub struct BallSubgroup {
    pub center: usize,
    pub ball_scale: f64,
    pub fine_scale: f64,
    pub gens: Vec<Word>,
}

/// Which relation a verdict talks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RelationKind {
    Bp,
    Lasso,
    James,
}

/// Checkable witness attached to a `Yes` (or bounding a `No`).
#[derive(Clone, Debug, Serialize)]
pub enum Witness {
    /// A coarse ball realizing bp-closeness: its center and the in-ball
    /// connector between the endpoints.
    Ball { center: usize, connector: Vec<usize> },
    /// Lasso decomposition into conjugated bounded loops.
    Lasso { punctures: Vec<Puncture> },
    /// Equal-length representatives forming a pointwise-bounded pair path.
    DirectPair {
        left: Vec<usize>,
        right: Vec<usize>,
        pointwise_bound: f64,
    },
    /// Sandwich certificate: lasso holds at `lasso_scale`, hence a uniform
    /// pair witness exists at `uc_scale`.
    Sandwich { lasso_scale: f64, uc_scale: f64 },
    /// The word proved to lie in the normal closure of the coarse ball loops
    /// (recheckable through the engine).
    ClosureMembership { word: Word },
}

/// Verdict for one relation query at a scale pair.
#[derive(Clone, Debug, Serialize)]
pub struct StructureVerdict {
    pub relation: RelationKind,
    pub fine: f64,
    pub coarse: f64,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

/// One coarse-ball loop together with its transfer to the basepoint.
#[derive(Clone, Debug)]
pub struct BallLoop {
    /// Ball center the loop is bounded by.
    pub center: usize,
    /// Root vertex the raw loop is based at.
    pub root: usize,
    /// Raw loop vertices (based at `root`, inside the ball).
    pub chain: Vec<usize>,
    /// Class word after conjugating to the basepoint along the tree.
    pub word: Word,
}

/// Isomorphism onto a free basis, available when Tietze simplification kills
/// every relator: words rewritten through it have exact normal forms.
struct FreeView {
    rank: usize,
    /// Raw generator -> word over the free basis.
    images: Vec<Word>,
    /// Free basis generator -> the raw generator it survived from.
    basis_to_raw: Vec<usize>,
}

impl FreeView {
    fn rewrite(&self, w: &Word) -> Word {
        let map: Vec<Option<Word>> = self.images.iter().cloned().map(Some).collect();
        w.substitute(&map)
    }

    /// Letterwise conversion of a basis word back into raw generators
    /// (each basis generator is a surviving raw generator).
    fn to_raw(&self, w: &Word) -> Word {
        Word::from_letters(w.letters().iter().map(|&l| {
            let raw = self.basis_to_raw[Word::gen_of(l)] as i32 + 1;
            if l > 0 {
                raw
            } else {
                -raw
            }
        }))
    }
}

/// Shared state for relation queries on one space at one fine scale:
/// the ambient presentation plus caches for ball data and engine calls.
pub struct RelationContext<'a> {
    space: &'a MetricSpace,
    fine: Scale,
    pres: Presentation,
    cap: usize,
    free_view: Option<FreeView>,
    coarse_gens: RefCell<HashMap<u64, Rc<Vec<BallLoop>>>>,
    folded: RefCell<HashMap<Vec<Word>, Rc<FoldedGraph>>>,
}

fn scale_key(s: f64) -> u64 {
    s.to_bits()
}

impl<'a> RelationContext<'a> {
    pub fn new(space: &'a MetricSpace, fine: Scale, cap: usize) -> Result<Self> {
        if cap < 1 {
            return Err(Error::CapTooSmall);
        }
        let pres = presentation(space, fine);
        let simplified = simplify_with_map(&pres);
        let free_view = if simplified.presentation.relators().is_empty() {
            let rank = simplified.presentation.gen_count();
            let mut basis_to_raw = vec![usize::MAX; rank];
            for (raw, im) in simplified.gen_images.iter().enumerate() {
                if im.letters().len() == 1 && im.letters()[0] > 0 {
                    let b = Word::gen_of(im.letters()[0]);
                    if basis_to_raw[b] == usize::MAX {
                        basis_to_raw[b] = raw;
                    }
                }
            }
            debug_assert!(basis_to_raw.iter().all(|&r| r != usize::MAX));
            Some(FreeView {
                rank,
                images: simplified.gen_images,
                basis_to_raw,
            })
        } else {
            None
        };
        Ok(RelationContext {
            space,
            fine,
            pres,
            cap,
            free_view,
            coarse_gens: RefCell::new(HashMap::new()),
            folded: RefCell::new(HashMap::new()),
        })
    }

    /// Whether class-word questions here are exactly decidable (the group is
    /// certified free).
    pub fn is_decidably_free(&self) -> bool {
        self.free_view.is_some()
    }

    pub fn space(&self) -> &MetricSpace {
        self.space
    }

    pub fn fine(&self) -> Scale {
        self.fine
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Class of a based chain in the ambient presentation.
    pub fn class_of(&self, c: &Chain) -> Result<ChainClass> {
        self.pres.chain_class(c)
    }

    /// Fine-scale subgraph induced on the closed ball `B(center, radius)`.
    pub fn ball_graph(&self, center: usize, radius: f64) -> EpsilonGraph {
        let graph = entourage_graph(self.space, self.fine);
        graph.induced(&self.space.ball(center, radius))
    }

    /// Loop chains generating the fundamental group of the ball subgraph
    /// component of `root`, based at `root`. Empty when `root` is outside the
    /// ball.
    pub fn ball_loops_at(&self, center: usize, radius: f64, root: usize) -> Result<Vec<Chain>> {
        if self.space.dist(center, root) > radius {
            return Ok(Vec::new());
        }
        let sub = self.ball_graph(center, radius);
        let bpres = presentation_of_graph(self.space, &sub, root);
        let mut loops = Vec::with_capacity(bpres.gen_count());
        for g in 0..bpres.gen_count() {
            let class = ChainClass {
                end: root,
                word: Word::generator(g, false),
            };
            loops.push(bpres.realize_class(&class)?);
        }
        Ok(loops)
    }

    /// Transfers a loop based at `root` to a based class word along the
    /// ambient tree path.
    pub fn transfer_loop(&self, root: usize, loop_vertices: &[usize]) -> Result<Word> {
        let mut walk = self.pres.tree_path(root)?;
        walk.extend_from_slice(&loop_vertices[1..]);
        let mut back = self.pres.tree_path(root)?;
        back.reverse();
        walk.extend_from_slice(&back[1..]);
        Ok(self.pres.walk_word(&walk))
    }

    /// The ball subgroup at the basepoint: loops of `B(center, ball)` that are
    /// based at the basepoint, pushed into the ambient group.
    pub fn ball_subgroup(&self, center: usize, ball: Scale) -> Result<BallSubgroup> {
        let basepoint = self.space.basepoint();
        let loops = self.ball_loops_at(center, ball.epsilon(), basepoint)?;
        let mut gens = Vec::new();
        for l in &loops {
            let w = self.pres.chain_class(l)?.word;
            if !w.is_empty() && !gens.contains(&w) {
                gens.push(w);
            }
        }
        Ok(BallSubgroup {
            center,
            ball_scale: ball.epsilon(),
            fine_scale: self.fine.epsilon(),
            gens,
        })
    }

    /// All coarse-ball loops across all centers and in-ball components
    /// (reachable from the basepoint component), transferred to the
    /// basepoint. Their normal closure is the lasso subgroup at this scale.
    pub fn coarse_ball_loops(&self, coarse: f64) -> Result<Rc<Vec<BallLoop>>> {
        if let Some(cached) = self.coarse_gens.borrow().get(&scale_key(coarse)) {
            return Ok(Rc::clone(cached));
        }
        let mut out: Vec<BallLoop> = Vec::new();
        let mut seen_balls: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
        let mut seen_words: std::collections::HashSet<Word> = std::collections::HashSet::new();
        for center in 0..self.space.len() {
            let ball = self.space.ball(center, coarse);
            if !seen_balls.insert(ball.clone()) {
                continue;
            }
            let sub = self.ball_graph(center, coarse);
            let comps = components_of(&sub);
            let mut roots: Vec<usize> = Vec::new();
            for &v in &ball {
                let r = comps.representative(v);
                if !roots.contains(&r) && self.pres.in_component(r) {
                    roots.push(r);
                }
            }
            for root in roots {
                for l in self.ball_loops_at(center, coarse, root)? {
                    let w = self.transfer_loop(root, l.vertices())?;
                    if !w.is_empty() && seen_words.insert(w.clone()) {
                        out.push(BallLoop {
                            center,
                            root,
                            chain: l.vertices().to_vec(),
                            word: w,
                        });
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.coarse_gens
            .borrow_mut()
            .insert(scale_key(coarse), Rc::clone(&rc));
        Ok(rc)
    }

    /// Exact subgroup membership when the group is certified free (through
    /// the simplified basis); coset enumeration otherwise.
    pub fn subgroup_membership(&self, gens: &[Word], w: &Word) -> Result<Verdict> {
        if let Some(view) = &self.free_view {
            let basis_gens: Vec<Word> = gens.iter().map(|g| view.rewrite(g)).collect();
            let folded = self.folded_graph(view.rank, &basis_gens);
            return Ok(if folded.contains(&view.rewrite(w)) {
                Verdict::Yes
            } else {
                Verdict::No
            });
        }
        let table = engine::todd_coxeter(&self.pres, gens, self.cap)?;
        Ok(engine::is_in_subgroup(w, &table))
    }

    fn folded_graph(&self, rank: usize, gens: &[Word]) -> Rc<FoldedGraph> {
        let key: Vec<Word> = gens.to_vec();
        if let Some(g) = self.folded.borrow().get(&key) {
            return Rc::clone(g);
        }
        let g = Rc::new(FoldedGraph::new(rank, gens));
        self.folded.borrow_mut().insert(key, Rc::clone(&g));
        g
    }

    /// Equality of two class words as group elements: exact through the free
    /// basis when available, engine-backed otherwise.
    pub fn words_equal(&self, w1: &Word, w2: &Word) -> Result<Verdict> {
        if w1 == w2 {
            return Ok(Verdict::Yes);
        }
        if let Some(view) = &self.free_view {
            return Ok(if view.rewrite(w1) == view.rewrite(w2) {
                Verdict::Yes
            } else {
                Verdict::No
            });
        }
        let diff = w1.concat(&w2.inverse());
        engine::in_normal_closure(&self.pres, &[], &diff, self.cap)
    }

    /// Normal-closure membership in the ambient group, run over the smallest
    /// available presentation (the free basis when one exists).
    pub fn in_closure(&self, normal_gens: &[Word], w: &Word) -> Result<Verdict> {
        if let Some(view) = &self.free_view {
            let free_pres = Presentation::free(view.rank);
            let gens: Vec<Word> = normal_gens
                .iter()
                .map(|g| view.rewrite(g))
                .filter(|g| !g.is_empty())
                .collect();
            return engine::in_normal_closure(&free_pres, &gens, &view.rewrite(w), self.cap);
        }
        engine::in_normal_closure(&self.pres, normal_gens, w, self.cap)
    }

    /// Basis-space view of a word: the exact free normal form when the group
    /// is certified free, the word itself otherwise. Equal outputs mean equal
    /// group elements whenever [`RelationContext::is_decidably_free`] holds.
    pub fn decidable_word(&self, w: &Word) -> Word {
        match &self.free_view {
            Some(view) => view.rewrite(w),
            None => w.clone(),
        }
    }

    pub(crate) fn free_rank(&self) -> Option<usize> {
        self.free_view.as_ref().map(|v| v.rank)
    }

    pub(crate) fn basis_word_to_raw(&self, w: &Word) -> Word {
        match &self.free_view {
            Some(view) => view.to_raw(w),
            None => w.clone(),
        }
    }

    /// Equality of chain classes (same end, equal words in the group).
    pub fn classes_equal(&self, a: &ChainClass, b: &ChainClass) -> Result<Verdict> {
        if a.end != b.end {
            return Ok(Verdict::No);
        }
        self.words_equal(&a.word, &b.word)
    }
}

/// Spec-shaped one-shot: ball subgroup at the basepoint.
pub fn ball_subgroup(
    space: &MetricSpace,
    fine: Scale,
    ball: Scale,
    center: usize,
) -> Result<BallSubgroup> {
    RelationContext::new(space, fine, engine::DEFAULT_COSET_CAP)?.ball_subgroup(center, ball)
}
