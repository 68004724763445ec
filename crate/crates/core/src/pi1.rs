//! Presentations of the ε-chain fundamental group.
//!
//! The group at a scale is the edge-path group of the ε-graph with one
//! generator per non-tree edge of a BFS spanning tree and one relator per
//! ε-triangle (triple with all pairwise distances within scale). Only the
//! basepoint's component is presented. Chain classes are stored in spanning
//! tree normal form: the end vertex plus the freely reduced word of non-tree
//! edges crossed.
//!
//! Equality of class words is equality in the free group on the generators;
//! at triangle-free scales that coincides with equality of homotopy classes,
//! and in general two classes are equal iff their words agree modulo the
//! triangle relators (a question for the engine module).

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::metric::{entourage_graph, EpsilonGraph, MetricSpace, Scale};
use crate::word::Word;

/// A finite presentation, optionally backed by the ε-graph it came from.
#[derive(Clone, Debug)]
pub struct Presentation {
    gen_count: usize,
    relators: Vec<Word>,
    /// Oriented non-tree edge per generator: traversing `(u, v)` forward reads
    /// the positive letter. `None` for generators that lost their edge during
    /// simplification merges (never the case for raw presentations).
    generator_edges: Vec<Option<(usize, usize)>>,
    graph: Option<GraphBacking>,
}

/// BFS spanning tree data for presentations built from a space.
#[derive(Clone, Debug)]
struct GraphBacking {
    scale: Scale,
    basepoint: usize,
    /// Parent in the BFS tree; `None` for the root and for vertices outside
    /// the basepoint component.
    tree_parent: Vec<Option<usize>>,
    in_component: Vec<bool>,
    /// Oriented edge -> signed letter, both orientations stored. Tree edges absent.
    edge_letter: HashMap<(usize, usize), i32>,
}

/// Homotopy class of a based chain: end vertex plus tree-normal-form word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ChainClass {
    pub end: usize,
    pub word: Word,
}

impl ChainClass {
    pub fn trivial(basepoint: usize) -> Self {
        ChainClass {
            end: basepoint,
            word: Word::identity(),
        }
    }
}

impl Presentation {
    /// A presentation with no graph backing (free groups, quotients, test input).
    pub fn from_parts(gen_count: usize, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            r.check_over(gen_count)?;
        }
        Ok(Presentation {
            gen_count,
            relators,
            generator_edges: vec![None; gen_count],
            graph: None,
        })
    }

    /// Free group of the given rank.
    pub fn free(rank: usize) -> Self {
        Presentation {
            gen_count: rank,
            relators: Vec::new(),
            generator_edges: vec![None; rank],
            graph: None,
        }
    }

    pub fn gen_count(&self) -> usize {
        self.gen_count
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_edge(&self, gen: usize) -> Option<(usize, usize)> {
        self.generator_edges[gen]
    }

    pub fn scale(&self) -> Option<Scale> {
        self.graph.as_ref().map(|g| g.scale)
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.graph.as_ref().map(|g| g.basepoint)
    }

    /// Whether a vertex lies in the presented (basepoint) component.
    pub fn in_component(&self, v: usize) -> bool {
        self.graph
            .as_ref()
            .map(|g| g.in_component[v])
            .unwrap_or(false)
    }

    /// Extend the relator set (quotient presentation). Graph backing is kept.
    pub fn with_extra_relators(&self, extra: &[Word]) -> Result<Presentation> {
        for r in extra {
            r.check_over(self.gen_count)?;
        }
        let mut out = self.clone();
        out.relators.extend(extra.iter().cloned());
        Ok(out)
    }

    fn backing(&self) -> Result<&GraphBacking> {
        self.graph
            .as_ref()
            .ok_or_else(|| Error::Validation("presentation has no graph backing".into()))
    }

    /// Tree path from the basepoint to `v` (inclusive).
    pub fn tree_path(&self, v: usize) -> Result<Vec<usize>> {
        let g = self.backing()?;
        if !g.in_component[v] {
            return Err(Error::Validation(format!(
                "vertex {v} is outside the basepoint component"
            )));
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = g.tree_parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Signed letter read when stepping `u -> v`; `None` on tree edges and
    /// stationary steps.
    pub fn step_letter(&self, u: usize, v: usize) -> Option<i32> {
        if u == v {
            return None;
        }
        self.backing().ok()?.edge_letter.get(&(u, v)).copied()
    }

    /// Word read along an arbitrary walk in the ε-graph.
    pub fn walk_word(&self, seq: &[usize]) -> Word {
        let mut w = Word::identity();
        for step in seq.windows(2) {
            if let Some(l) = self.step_letter(step[0], step[1]) {
                w.push(l);
            }
        }
        w
    }

    /// Tree normal form of a based chain.
    pub fn chain_class(&self, c: &Chain) -> Result<ChainClass> {
        let g = self.backing()?;
        if c.start() != g.basepoint {
            return Err(Error::NotBased(c.start(), g.basepoint));
        }
        Ok(ChainClass {
            end: c.end(),
            word: self.walk_word(c.vertices()),
        })
    }

    /// A canonical chain representing a class: spell the word through tree
    /// paths and generator edges, then walk the tree to the end vertex.
    pub fn realize_class(&self, class: &ChainClass) -> Result<Chain> {
        let g = self.backing()?;
        class.word.check_over(self.gen_count)?;
        let mut vertices: Vec<usize> = vec![g.basepoint];
        for &letter in class.word.letters() {
            let gen = Word::gen_of(letter);
            let (u, v) = self.generator_edges[gen].ok_or_else(|| {
                Error::Validation(format!("generator {gen} has no edge to realize"))
            })?;
            let (from, to) = if letter > 0 { (u, v) } else { (v, u) };
            // back to the root, out to the edge tail, across the edge
            let mut up = self.tree_path(*vertices.last().unwrap())?;
            up.reverse();
            vertices.extend_from_slice(&up[1..]);
            let down = self.tree_path(from)?;
            vertices.extend_from_slice(&down[1..]);
            vertices.push(to);
        }
        let mut up = self.tree_path(*vertices.last().unwrap())?;
        up.reverse();
        vertices.extend_from_slice(&up[1..]);
        let down = self.tree_path(class.end)?;
        vertices.extend_from_slice(&down[1..]);
        // the walk uses tree and generator edges only, all valid at this scale
        Ok(Chain::from_raw(vertices, g.scale))
    }

    /// Text form: `gens: n` then one `rel: <word>` line per relator.
    pub fn to_text(&self) -> String {
        let mut out = format!("gens: {}\n", self.gen_count);
        for r in &self.relators {
            out.push_str(&format!("rel: {r}\n"));
        }
        out
    }

    /// Parses the text form produced by [`Presentation::to_text`].
    pub fn parse_text(text: &str) -> Result<Presentation> {
        let mut gen_count: Option<usize> = None;
        let mut relators = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gens:") {
                gen_count = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad generator count {rest:?}")))?,
                );
            } else if let Some(rest) = line.strip_prefix("rel:") {
                relators.push(Word::parse(rest)?);
            } else {
                return Err(Error::Parse(format!("unrecognized line {line:?}")));
            }
        }
        let gen_count =
            gen_count.ok_or_else(|| Error::Parse("missing `gens:` header".into()))?;
        Presentation::from_parts(gen_count, relators)
    }
}

/// Builds the presentation of the ε-chain fundamental group at a scale,
/// restricted to the basepoint component. Deterministic: BFS with ascending
/// neighbor order, generators sorted by edge, relators by triangle.
pub fn presentation(space: &MetricSpace, s: Scale) -> Presentation {
    let graph = entourage_graph(space, s);
    presentation_of_graph(space, &graph, space.basepoint())
}

/// Presentation of an explicit subgraph (used for ball subgroups): the graph
/// need not be the full ε-graph, only symmetric with valid indices.
pub fn presentation_of_graph(
    _space: &MetricSpace,
    graph: &EpsilonGraph,
    root: usize,
) -> Presentation {
    let n = graph.len();
    let mut tree_parent: Vec<Option<usize>> = vec![None; n];
    let mut in_component = vec![false; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    in_component[root] = true;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in graph.neighbors(u) {
            if !in_component[v] {
                in_component[v] = true;
                tree_parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }

    let is_tree_edge = |u: usize, v: usize| tree_parent[v] == Some(u) || tree_parent[u] == Some(v);

    let mut non_tree: Vec<(usize, usize)> = graph
        .edges()
        .into_iter()
        .filter(|&(u, v)| in_component[u] && in_component[v] && !is_tree_edge(u, v))
        .collect();
    non_tree.sort_unstable();

    let mut edge_letter = HashMap::new();
    let mut generator_edges = Vec::with_capacity(non_tree.len());
    for (gen, &(u, v)) in non_tree.iter().enumerate() {
        let letter = (gen as i32) + 1;
        edge_letter.insert((u, v), letter);
        edge_letter.insert((v, u), -letter);
        generator_edges.push(Some((u, v)));
    }

    let backing = GraphBacking {
        scale: graph.scale,
        basepoint: root,
        tree_parent,
        in_component: in_component.clone(),
        edge_letter,
    };
    let pres_partial = Presentation {
        gen_count: non_tree.len(),
        relators: Vec::new(),
        generator_edges,
        graph: Some(backing),
    };

    // one relator per triangle, written as the word of its boundary loop
    let mut relators = Vec::new();
    for a in 0..n {
        if !in_component[a] {
            continue;
        }
        let nbrs_a = graph.neighbors(a);
        for &b in nbrs_a {
            if b <= a {
                continue;
            }
            for &c in nbrs_a {
                if c <= b || !graph.has_edge(b, c) {
                    continue;
                }
                relators.push(pres_partial.walk_word(&[a, b, c, a]));
            }
        }
    }

    let mut pres = pres_partial;
    pres.relators = relators;
    pres
}

/// Spec-shaped convenience: class of a based chain at a scale.
pub fn chain_class(space: &MetricSpace, s: Scale, c: &Chain) -> Result<ChainClass> {
    presentation(space, s).chain_class(c)
}

/// Homomorphism data induced by growing the scale: each source generator's
/// loop, reread as a chain at the coarser scale.
#[derive(Clone, Debug)]
pub struct ScaleMap {
    source_gens: usize,
    images: Vec<Word>,
}

impl ScaleMap {
    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Pushes a word over source generators through the map.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        w.check_over(self.source_gens)?;
        let map: Vec<Option<Word>> = self.images.iter().cloned().map(Some).collect();
        Ok(w.substitute(&map))
    }
}

/// Builds the scale-change homomorphism between two presentations of the same
/// space with `s1 <= s2`.
pub fn scale_map(
    space: &MetricSpace,
    source: &Presentation,
    target: &Presentation,
) -> Result<ScaleMap> {
    let (s1, s2) = match (source.scale(), target.scale()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Validation(
                "scale_map requires graph-backed presentations".into(),
            ))
        }
    };
    if s1.epsilon() > s2.epsilon() {
        return Err(Error::Validation(format!(
            "scale_map requires source scale <= target scale ({} > {})",
            s1.epsilon(),
            s2.epsilon()
        )));
    }
    let mut images = Vec::with_capacity(source.gen_count());
    for gen in 0..source.gen_count() {
        let class = ChainClass {
            end: source.basepoint().unwrap(),
            word: Word::generator(gen, false),
        };
        let loop_chain = source.realize_class(&class)?;
        let coarser = Chain::new(space, s2, loop_chain.vertices().to_vec())?;
        images.push(target.chain_class(&coarser)?.word);
    }
    Ok(ScaleMap {
        source_gens: source.gen_count(),
        images,
    })
}

fn cyclic_canonical(w: &Word) -> Vec<i32> {
    let base = w.cyclic_reduce();
    let mut best: Option<Vec<i32>> = None;
    for cand in [base.clone(), base.inverse()] {
        let letters = cand.letters().to_vec();
        let k = letters.len();
        for shift in 0..k.max(1) {
            let mut rot = Vec::with_capacity(k);
            for i in 0..k {
                rot.push(letters[(i + shift) % k]);
            }
            if best.as_ref().map(|b| rot < *b).unwrap_or(true) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// A simplified presentation together with the isomorphism data: the image of
/// every original generator as a word over the simplified generators.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub presentation: Presentation,
    /// Original generator -> word over the simplified generators.
    pub gen_images: Vec<Word>,
}

impl Simplified {
    /// Rewrites a word over the original generators into the simplified basis.
    pub fn rewrite(&self, w: &Word) -> Word {
        let map: Vec<Option<Word>> = self.gen_images.iter().cloned().map(Some).collect();
        w.substitute(&map)
    }
}

/// Tietze simplification: free/cyclic reduction, empty and duplicate relator
/// removal, trivial-generator elimination (length-1 relators), generator
/// merges (length-2 relators), and elimination of generators occurring exactly
/// once across the relator set. Deterministic given input order; the result
/// presents an isomorphic group.
pub fn simplify(p: &Presentation) -> Presentation {
    simplify_with_map(p).presentation
}

/// Simplification that also tracks where each original generator went; when
/// the output has no relators the group is free on the surviving generators
/// and the images give exact normal forms for arbitrary words.
pub fn simplify_with_map(p: &Presentation) -> Simplified {
    let mut gen_alive: Vec<bool> = vec![true; p.gen_count];
    let mut relators: Vec<Word> = p.relators.clone();
    // original generator -> word in the current (raw-indexed) generators
    let mut images: Vec<Word> = (0..p.gen_count)
        .map(|g| Word::generator(g, false))
        .collect();

    let identity_map = |n: usize| -> Vec<Option<Word>> {
        (0..n).map(|g| Some(Word::generator(g, false))).collect()
    };
    let apply = |relators: &mut Vec<Word>, images: &mut Vec<Word>, map: &[Option<Word>]| {
        for r in relators.iter_mut() {
            *r = r.substitute(map);
        }
        for im in images.iter_mut() {
            *im = im.substitute(map);
        }
    };

    loop {
        let mut changed = false;

        // reduce, drop empties, dedupe up to rotation and inversion
        let mut seen = std::collections::BTreeSet::new();
        let mut next: Vec<Word> = Vec::new();
        for r in &relators {
            let red = r.cyclic_reduce();
            if red.is_empty() {
                changed = changed || !r.is_empty();
                continue;
            }
            let key = cyclic_canonical(&red);
            if seen.insert(key) {
                if red.len() != r.len() {
                    changed = true;
                }
                next.push(red);
            } else {
                changed = true;
            }
        }
        relators = next;

        // trivial generator: relator of length 1
        if let Some(pos) = relators.iter().position(|r| r.len() == 1) {
            let gen = Word::gen_of(relators[pos].letters()[0]);
            let mut map = identity_map(p.gen_count);
            map[gen] = Some(Word::identity());
            relators.remove(pos);
            apply(&mut relators, &mut images, &map);
            gen_alive[gen] = false;
            continue;
        }

        // generator merge: relator of length 2 over two distinct generators
        if let Some((pos, a, b)) = relators.iter().enumerate().find_map(|(i, r)| {
            if r.len() == 2 {
                let (a, b) = (r.letters()[0], r.letters()[1]);
                if Word::gen_of(a) != Word::gen_of(b) {
                    return Some((i, a, b));
                }
            }
            None
        }) {
            // a·b = 1, eliminate the higher-index generator
            let (keep, kill) = if Word::gen_of(a) < Word::gen_of(b) {
                (a, b)
            } else {
                (b, a)
            };
            let kill_gen = Word::gen_of(kill);
            // kill^sign = keep^-sign  =>  kill = keep^(-sign_kill * sign_keep)
            let replacement_letter = if kill > 0 { -keep } else { keep };
            let mut map = identity_map(p.gen_count);
            map[kill_gen] = Some(Word::from_letters([replacement_letter]));
            relators.remove(pos);
            apply(&mut relators, &mut images, &map);
            gen_alive[kill_gen] = false;
            continue;
        }

        // single-occurrence generator: solve its relator for it and drop both
        let mut occurrences = vec![0usize; p.gen_count];
        let mut home = vec![usize::MAX; p.gen_count];
        for (i, r) in relators.iter().enumerate() {
            for &l in r.letters() {
                let g = Word::gen_of(l);
                occurrences[g] += 1;
                home[g] = i;
            }
        }
        if let Some(gen) = (0..p.gen_count).find(|&g| gen_alive[g] && occurrences[g] == 1) {
            let r = relators.remove(home[gen]);
            let pos = r
                .letters()
                .iter()
                .position(|&l| Word::gen_of(l) == gen)
                .unwrap();
            let letter = r.letters()[pos];
            let before = Word::from_letters(r.letters()[..pos].iter().copied());
            let after = Word::from_letters(r.letters()[pos + 1..].iter().copied());
            // before * gen^sign * after = 1
            let solved = if letter > 0 {
                before.inverse().concat(&after.inverse())
            } else {
                after.concat(&before)
            };
            let mut map = identity_map(p.gen_count);
            map[gen] = Some(solved);
            apply(&mut relators, &mut images, &map);
            gen_alive[gen] = false;
            changed = true;
        }

        if !changed {
            break;
        }
    }

    // reindex surviving generators
    let mut new_index = vec![None; p.gen_count];
    let mut count = 0usize;
    for g in 0..p.gen_count {
        if gen_alive[g] {
            new_index[g] = Some(count);
            count += 1;
        }
    }
    let map: Vec<Option<Word>> = (0..p.gen_count)
        .map(|g| new_index[g].map(|ng| Word::generator(ng, false)))
        .collect();
    let relators: Vec<Word> = relators.iter().map(|r| r.substitute(&map)).collect();
    let images: Vec<Word> = images.iter().map(|im| im.substitute(&map)).collect();
    let mut generator_edges = vec![None; count];
    for g in 0..p.gen_count {
        if let Some(ng) = new_index[g] {
            generator_edges[ng] = p.generator_edges[g];
        }
    }

    Simplified {
        presentation: Presentation {
            gen_count: count,
            relators,
            generator_edges,
            graph: p.graph.clone(),
        },
        gen_images: images,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::critical_scales;

    fn polygon(k: usize, r: f64) -> MetricSpace {
        let points = (0..k)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * (j as f64) / (k as f64);
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        MetricSpace::from_points("polygon", points, 0).unwrap()
    }

    #[test]
    fn twelve_gon_cycle_presentation() {
        let space = polygon(12, 1.0);
        let p = presentation(&space, Scale(0.6));
        // rank oracle on the triangle-free cycle: edges - vertices + 1
        assert_eq!(p.gen_count(), 12 - 12 + 1);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn complete_scale_simplifies_to_trivial() {
        let space = polygon(7, 1.0);
        let p = simplify(&presentation(&space, Scale(2.5)));
        assert_eq!(p.gen_count(), 0);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn twelve_gon_annulus_scale_is_free_rank_one() {
        // second-neighbor chords fill triangles; the group stays infinite cyclic
        let space = polygon(12, 1.0);
        let s = critical_scales(&space)[1]; // second chord length, 1.0 up to float ties
        assert!((s.epsilon() - 1.0).abs() < 1e-9);
        let raw = presentation(&space, s);
        assert_eq!(raw.gen_count(), 24 - 12 + 1);
        assert_eq!(raw.relators().len(), 12);
        let p = simplify(&raw);
        assert_eq!(p.gen_count(), 1, "annulus group is infinite cyclic");
        assert!(p.relators().is_empty());
    }

    #[test]
    fn trivial_chain_has_trivial_class() {
        let space = polygon(12, 1.0);
        let s = Scale(0.6);
        let p = presentation(&space, s);
        let c = Chain::constant(&space, s, 0).unwrap();
        assert_eq!(p.chain_class(&c).unwrap(), ChainClass::trivial(0));
    }

    #[test]
    fn tree_paths_carry_no_letters() {
        let space = polygon(12, 1.0);
        let s = Scale(0.6);
        let p = presentation(&space, s);
        for v in 0..12 {
            let path = p.tree_path(v).unwrap();
            let c = Chain::new(&space, s, path).unwrap();
            let class = p.chain_class(&c).unwrap();
            assert_eq!(class.end, v);
            assert!(class.word.is_empty(), "tree path to {v} reads letters");
        }
    }

    #[test]
    fn full_loop_reads_the_generator_once() {
        let space = polygon(12, 1.0);
        let s = Scale(0.6);
        let p = presentation(&space, s);
        let c = Chain::new(&space, s, vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0]).unwrap();
        let class = p.chain_class(&c).unwrap();
        assert_eq!(class.end, 0);
        assert_eq!(class.word.len(), 1);
    }

    #[test]
    fn chain_class_respects_groupoid_composition() {
        let space = polygon(12, 1.0);
        let s = Scale(0.6);
        let p = presentation(&space, s);
        let a = Chain::new(&space, s, vec![0, 1, 2, 3]).unwrap();
        let b = Chain::new(&space, s, vec![3, 4, 5, 6]).unwrap();
        let ab = crate::chains::concat(&a, &b).unwrap();
        let wa = p.chain_class(&a).unwrap().word;
        let wb = p.walk_word(b.vertices());
        assert_eq!(p.chain_class(&ab).unwrap().word, wa.concat(&wb));
        let rev = crate::chains::reverse(&ab);
        assert_eq!(
            p.walk_word(rev.vertices()),
            p.chain_class(&ab).unwrap().word.inverse()
        );
    }

    #[test]
    fn class_invariant_under_random_moves() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let space = polygon(12, 1.0);
        let scales = critical_scales(&space);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &s in &[scales[0], scales[1]] {
            let p = presentation(&space, s);
            let mut c = Chain::new(&space, s, vec![0, 1, 2, 3, 4]).unwrap();
            let class = p.chain_class(&c).unwrap();
            for _ in 0..400 {
                let moves = crate::chains::valid_moves(&space, &c);
                if moves.is_empty() {
                    break;
                }
                let m = *moves.choose(&mut rng).unwrap();
                // keep chains from growing without bound
                if c.len() > 40 && matches!(m, crate::chains::HomotopyMove::Insert { .. }) {
                    continue;
                }
                c = crate::chains::apply_move(&space, &c, m).unwrap();
                let now = p.chain_class(&c).unwrap();
                assert_eq!(now.end, class.end);
                if p.relators().is_empty() {
                    assert_eq!(now.word, class.word, "free case: word is invariant");
                } else {
                    let _ = rng.gen::<bool>(); // relator case checked via engine elsewhere
                }
            }
        }
    }

    #[test]
    fn realize_class_round_trips() {
        let space = polygon(12, 1.0);
        let s = Scale(0.6);
        let p = presentation(&space, s);
        for (end, word) in [
            (0usize, Word::identity()),
            (3, Word::identity()),
            (0, Word::generator(0, false)),
            (5, Word::from_letters([1, 1])),
            (7, Word::from_letters([-1])),
        ] {
            let class = ChainClass { end, word };
            let chain = p.realize_class(&class).unwrap();
            assert!(crate::chains::is_chain(&space, s, chain.vertices()).unwrap());
            assert_eq!(p.chain_class(&chain).unwrap(), class);
        }
    }

    #[test]
    fn scale_map_identity_and_collapse() {
        let space = polygon(12, 1.0);
        let p1 = presentation(&space, Scale(0.6));
        let m_id = scale_map(&space, &p1, &p1).unwrap();
        assert_eq!(m_id.images()[0], Word::generator(0, false));
        let p2 = presentation(&space, Scale(2.0));
        let m = scale_map(&space, &p1, &p2).unwrap();
        // complete-graph target: the image lies in a trivial group, but the
        // raw word need not be empty; simplification decides. Check via the
        // simplified target instead: it has no generators at all.
        assert_eq!(simplify(&p2).gen_count(), 0);
        assert_eq!(m.images().len(), 1);
    }

    #[test]
    fn simplify_golden_cases() {
        // single generator killed by its relator
        let p = Presentation::from_parts(1, vec![Word::from_letters([1])]).unwrap();
        let s = simplify(&p);
        assert_eq!((s.gen_count(), s.relators().len()), (0, 0));

        // g1 g2^-1 merges the generators
        let p = Presentation::from_parts(2, vec![Word::from_letters([1, -2])]).unwrap();
        let s = simplify(&p);
        assert_eq!((s.gen_count(), s.relators().len()), (1, 0));
    }

    #[test]
    fn presentation_text_round_trip() {
        let p = Presentation::from_parts(
            3,
            vec![Word::from_letters([1, 2, -1, -2]), Word::from_letters([3])],
        )
        .unwrap();
        let text = p.to_text();
        assert!(text.starts_with("gens: 3"));
        let q = Presentation::parse_text(&text).unwrap();
        assert_eq!(q.gen_count(), 3);
        assert_eq!(q.relators(), p.relators());
    }
}
