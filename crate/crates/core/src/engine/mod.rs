//! Decision procedures over finitely presented groups.
//!
//! Coset enumeration, subgroup membership, normal-closure membership, and
//! normal cores, all with explicit resource caps and three-valued verdicts.
//! The word problem is undecidable in general, so every procedure either
//! proves its answer (completed table, lattice certificate, folded graph) or
//! reports `Unknown` with the exhausted cap.

mod abelian;
mod coset;
mod stallings;

pub use abelian::{abelianization, AbelianInvariants};
pub use coset::{todd_coxeter, todd_coxeter_with_watch, CosetTable, TableStatus};
pub use stallings::FoldedGraph;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pi1::Presentation;
use crate::word::Word;

/// Default cap on coset table rows.
pub const DEFAULT_COSET_CAP: usize = 200_000;

/// Three-valued answer: `Yes` and `No` are proved, `Unknown` carries the
/// reason (typically an exhausted cap).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    Unknown(String),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Yes => write!(f, "yes"),
            Verdict::No => write!(f, "no"),
            Verdict::Unknown(reason) => write!(f, "unknown ({reason})"),
        }
    }
}

/// Membership of a word in the subgroup a coset table was enumerated against.
///
/// Complete tables decide membership. Partial tables can still prove `Yes`
/// when the trace stays inside defined entries and returns to coset 0 (every
/// entry is a consequence of the relations); anything else is `Unknown`.
pub fn is_in_subgroup(w: &Word, t: &CosetTable) -> Verdict {
    match t.trace(0, w) {
        Some(0) => Verdict::Yes,
        Some(_) if t.is_complete() => Verdict::No,
        None if t.is_complete() => {
            // complete tables have total actions; unreachable in practice
            Verdict::Unknown("trace failed on a complete table".into())
        }
        _ => match t.status() {
            TableStatus::Exhausted(cap) => {
                Verdict::Unknown(format!("enumeration exhausted at cap {cap}"))
            }
            TableStatus::Complete => Verdict::No,
        },
    }
}

/// Membership of `w` in the normal closure of `normal_gens` inside the group
/// presented by `p`: enumerates the quotient `p / <<normal_gens>>` against the
/// trivial subgroup, with an early exit as soon as the trace of `w` closes.
pub fn in_normal_closure(
    p: &Presentation,
    normal_gens: &[Word],
    w: &Word,
    cap: usize,
) -> Result<Verdict> {
    w.check_over(p.gen_count())?;
    if w.is_empty() {
        return Ok(Verdict::Yes);
    }
    for g in normal_gens {
        if w == g || *w == g.inverse() {
            return Ok(Verdict::Yes);
        }
    }
    if abelianized_exponent_check(p, normal_gens, w)?.is_no() {
        return Ok(Verdict::No);
    }
    let quotient = p.with_extra_relators(normal_gens)?;
    let (table, watch_hit) = todd_coxeter_with_watch(&quotient, &[], cap, Some(w))?;
    if watch_hit {
        return Ok(Verdict::Yes);
    }
    Ok(match table.trace(0, w) {
        Some(0) => Verdict::Yes,
        Some(_) if table.is_complete() => Verdict::No,
        _ => match table.status() {
            TableStatus::Complete => Verdict::No,
            TableStatus::Exhausted(cap) => {
                Verdict::Unknown(format!("quotient enumeration exhausted at cap {cap}"))
            }
        },
    })
}

/// Fast `No` oracle on exponent sums: `No` when the exponent vector of `w`
/// lies outside the integer lattice spanned by the relators and the normal
/// generators. Never answers `Yes`.
pub fn abelianized_exponent_check(
    p: &Presentation,
    normal_gens: &[Word],
    w: &Word,
) -> Result<Verdict> {
    w.check_over(p.gen_count())?;
    let mut lattice: Vec<Vec<i64>> = Vec::new();
    for r in p.relators() {
        lattice.push(r.exponent_vector(p.gen_count()));
    }
    for g in normal_gens {
        g.check_over(p.gen_count())?;
        lattice.push(g.exponent_vector(p.gen_count()));
    }
    let v = w.exponent_vector(p.gen_count());
    if abelian::in_lattice(&lattice, &v) {
        Ok(Verdict::Unknown(
            "exponent vector lies in the lattice".into(),
        ))
    } else {
        Ok(Verdict::No)
    }
}

/// Schreier generators of the normal core (kernel of the coset action) of the
/// subgroup a completed table enumerates. Largest normal subgroup inside it.
pub fn normal_core(t: &CosetTable) -> Result<Vec<Word>> {
    if !t.is_complete() {
        let cap = match t.status() {
            TableStatus::Exhausted(c) => c,
            TableStatus::Complete => unreachable!(),
        };
        return Err(Error::CoreRequiresFiniteIndex(cap));
    }
    let index = t.index().unwrap();
    let gen_count = t.gen_count();

    // permutation image of each generator
    let perm_of_gen: Vec<Vec<usize>> = (0..gen_count)
        .map(|g| {
            (0..index)
                .map(|c| t.act(c, (g as i32) + 1).unwrap())
                .collect()
        })
        .collect();

    // BFS over the image permutation group, tracking transversal words
    let identity: Vec<usize> = (0..index).collect();
    let mut words: std::collections::HashMap<Vec<usize>, Word> = std::collections::HashMap::new();
    words.insert(identity.clone(), Word::identity());
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(identity);
    let mut core: Vec<Word> = Vec::new();
    let image_cap = 100_000usize;
    while let Some(perm) = queue.pop_front() {
        let base_word = words[&perm].clone();
        for g in 0..gen_count {
            for inverse in [false, true] {
                let next: Vec<usize> = if inverse {
                    let mut inv = vec![0; index];
                    for (from, &to) in perm_of_gen[g].iter().enumerate() {
                        inv[to] = from;
                    }
                    perm.iter().map(|&c| inv[c]).collect()
                } else {
                    perm.iter().map(|&c| perm_of_gen[g][c]).collect()
                };
                let step = Word::generator(g, inverse);
                let candidate = base_word.concat(&step);
                if let Some(existing) = words.get(&next) {
                    let schreier = canonical_up_to_inverse(candidate.concat(&existing.inverse()));
                    if !schreier.is_empty() && !core.contains(&schreier) {
                        core.push(schreier);
                    }
                } else {
                    if words.len() >= image_cap {
                        return Err(Error::Validation(format!(
                            "coset action image exceeds {image_cap} permutations"
                        )));
                    }
                    words.insert(next.clone(), candidate);
                    queue.push_back(next);
                }
            }
        }
    }
    core.sort();
    core.dedup();
    Ok(core)
}

/// Picks the nicer of `w` and `w⁻¹` (generators before inverses, then lower
/// indices) so Schreier generating sets come out without redundant inverses.
fn canonical_up_to_inverse(w: Word) -> Word {
    let key = |x: &Word| -> Vec<(usize, bool)> {
        x.letters().iter().map(|&l| (Word::gen_of(l), l < 0)).collect()
    };
    let inv = w.inverse();
    if key(&inv) < key(&w) {
        inv
    } else {
        w
    }
}

/// Membership in the normal core of a completed table's subgroup: the word
/// must fix every coset.
pub fn in_normal_core(t: &CosetTable, w: &Word) -> Result<Verdict> {
    if !t.is_complete() {
        return Ok(Verdict::Unknown(
            "core membership needs a completed enumeration".into(),
        ));
    }
    let index = t.index().unwrap();
    for c in 0..index {
        match t.trace(c, w) {
            Some(dst) if dst == c => {}
            Some(_) => return Ok(Verdict::No),
            None => return Ok(Verdict::Unknown("trace failed".into())),
        }
    }
    Ok(Verdict::Yes)
}
