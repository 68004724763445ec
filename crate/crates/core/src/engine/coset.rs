//! HLT-style Todd-Coxeter coset enumeration with lookahead compaction.
//!
//! Coset numbering is deterministic (first-definition order), so completed
//! tables are reproducible. Coincidences merge toward the smaller index, which
//! keeps coset 0 (the subgroup) alive throughout.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pi1::Presentation;
use crate::word::Word;

/// Outcome of an enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableStatus {
    Complete,
    Exhausted(usize),
}

/// Coset action table. Rows are live cosets after compaction; columns come in
/// pairs (generator, inverse).
#[derive(Clone, Debug)]
pub struct CosetTable {
    gen_count: usize,
    rows: Vec<Vec<Option<usize>>>,
    status: TableStatus,
}

impl CosetTable {
    pub fn gen_count(&self) -> usize {
        self.gen_count
    }

    pub fn status(&self) -> TableStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == TableStatus::Complete
    }

    /// Number of cosets when the enumeration completed.
    pub fn index(&self) -> Option<usize> {
        self.is_complete().then_some(self.rows.len())
    }

    /// Rows currently in the table (live cosets).
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Action of a signed letter on a coset.
    pub fn act(&self, coset: usize, letter: i32) -> Option<usize> {
        self.rows.get(coset)?.get(col_of(letter))?.as_ref().copied()
    }

    /// Traces a word through the table; `None` if it leaves defined entries.
    pub fn trace(&self, from: usize, w: &Word) -> Option<usize> {
        let mut c = from;
        for &l in w.letters() {
            c = self.act(c, l)?;
        }
        Some(c)
    }

    /// TSV dump: one row per coset, one column per signed generator.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("coset");
        for g in 0..self.gen_count {
            out.push_str(&format!("\tg{g}\tG{g}"));
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&i.to_string());
            for entry in row {
                match entry {
                    Some(c) => out.push_str(&format!("\t{c}")),
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn col_of(letter: i32) -> usize {
    let g = Word::gen_of(letter);
    if letter > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

fn inv_col(col: usize) -> usize {
    col ^ 1
}

struct Enumerator<'a> {
    cols: usize,
    cap: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    relators: &'a [Word],
    live_estimate: usize,
    exhausted: bool,
}

impl<'a> Enumerator<'a> {
    fn new(gen_count: usize, relators: &'a [Word], cap: usize) -> Self {
        Enumerator {
            cols: 2 * gen_count,
            cap,
            table: vec![vec![None; 2 * gen_count]],
            parent: vec![0],
            relators,
            live_estimate: 1,
            exhausted: false,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != x {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn is_live(&mut self, x: usize) -> bool {
        self.find(x) == x
    }

    fn entry(&mut self, coset: usize, col: usize) -> Option<usize> {
        self.table[coset][col].map(|raw| self.find(raw))
    }

    /// Creates a new coset as the image of `coset` under `col`. Returns
    /// `None` at the cap; the driver then runs lookahead compaction at a safe
    /// point and retries.
    fn define(&mut self, coset: usize, col: usize) -> Option<usize> {
        if self.table.len() >= self.cap {
            return None;
        }
        let new = self.table.len();
        self.table.push(vec![None; self.cols]);
        self.parent.push(new);
        self.table[coset][col] = Some(new);
        self.table[new][inv_col(col)] = Some(coset);
        self.live_estimate += 1;
        Some(new)
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill] = keep;
        self.live_estimate -= 1;
        queue.push(kill);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        while let Some(dead) = queue.pop() {
            for col in 0..self.cols {
                if let Some(target) = self.table[dead][col] {
                    self.table[dead][col] = None;
                    let target_rep = self.find(target);
                    // detach the inverse entry pointing back at the dead coset
                    if self.table[target_rep][inv_col(col)].map(|r| self.find(r))
                        == Some(self.find(dead))
                    {
                        self.table[target_rep][inv_col(col)] = None;
                    }
                    let keep = self.find(dead);
                    match self.entry(keep, col) {
                        Some(existing) => self.merge(existing, target_rep, &mut queue),
                        None => {
                            let target_rep = self.find(target_rep);
                            match self.entry(target_rep, inv_col(col)) {
                                Some(existing) => self.merge(keep, existing, &mut queue),
                                None => {
                                    let keep = self.find(keep);
                                    self.table[keep][col] = Some(target_rep);
                                    self.table[target_rep][inv_col(col)] = Some(keep);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Scans a word from a coset, filling gaps with new cosets except for the
    /// final deduction. Returns `false` when the cap blocked a definition.
    fn scan_and_fill(&mut self, start: usize, w: &Word) -> bool {
        let letters = w.letters();
        if letters.is_empty() {
            return true;
        }
        let mut i = 0usize;
        let mut j = letters.len(); // exclusive upper end
        let mut f = self.find(start);
        let mut b = f;
        loop {
            while i < j {
                match self.entry(f, col_of(letters[i])) {
                    Some(next) => {
                        f = next;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j > i {
                match self.entry(b, col_of(-letters[j - 1])) {
                    Some(next) => {
                        b = next;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j == i {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            if j == i + 1 {
                // deduction closes the scan
                let col = col_of(letters[i]);
                self.table[f][col] = Some(b);
                self.table[b][inv_col(col)] = Some(f);
                return true;
            }
            match self.define(f, col_of(letters[i])) {
                Some(_) => {} // forward scan resumes and consumes it
                None => return false,
            }
        }
    }

    /// Deduction-only pass over all live cosets; may trigger coincidences that
    /// free rows, after which the table is compacted. Returns the new index of
    /// the tracked cursor (its representative's index after renumbering).
    fn lookahead_and_compact(&mut self, cursor: usize) -> usize {
        for coset in 0..self.table.len() {
            if !self.is_live(coset) {
                continue;
            }
            for r in self.relators {
                self.scan_no_fill(coset, r);
                if !self.is_live(coset) {
                    break;
                }
            }
        }
        self.compact_tracking(cursor)
    }

    /// Like `scan_and_fill` but never defines new cosets. Returns whether any
    /// deduction or coincidence happened.
    fn scan_no_fill(&mut self, start: usize, w: &Word) -> bool {
        let letters = w.letters();
        if letters.is_empty() {
            return false;
        }
        let mut i = 0usize;
        let mut j = letters.len();
        let mut f = self.find(start);
        let mut b = f;
        while i < j {
            match self.entry(f, col_of(letters[i])) {
                Some(next) => {
                    f = next;
                    i += 1;
                }
                None => break,
            }
        }
        if i == j {
            if f != b {
                self.coincidence(f, b);
                return true;
            }
            return false;
        }
        while j > i {
            match self.entry(b, col_of(-letters[j - 1])) {
                Some(next) => {
                    b = next;
                    j -= 1;
                }
                None => break,
            }
        }
        if j == i {
            if f != b {
                self.coincidence(f, b);
                return true;
            }
            false
        } else if j == i + 1 {
            let col = col_of(letters[i]);
            self.table[f][col] = Some(b);
            self.table[b][inv_col(col)] = Some(f);
            true
        } else {
            false
        }
    }

    /// Renumbers live cosets in first-definition order and drops dead rows.
    fn compact(&mut self) {
        self.compact_tracking(0);
    }

    /// Compaction that reports where a tracked coset landed.
    fn compact_tracking(&mut self, cursor: usize) -> usize {
        let n = self.table.len();
        let tracked = if n == 0 { 0 } else { self.find(cursor.min(n - 1)) };
        let mut new_index = vec![usize::MAX; n];
        let mut count = 0usize;
        for old in 0..n {
            if self.find(old) == old {
                new_index[old] = count;
                count += 1;
            }
        }
        let mut rows = Vec::with_capacity(count);
        for old in 0..n {
            if new_index[old] == usize::MAX {
                continue;
            }
            let row: Vec<Option<usize>> = (0..self.cols)
                .map(|col| self.entry(old, col).map(|t| new_index[t]))
                .collect();
            rows.push(row);
        }
        self.table = rows;
        self.parent = (0..count).collect();
        self.live_estimate = count;
        if n == 0 {
            0
        } else {
            new_index[tracked]
        }
    }

    fn into_table(mut self, gen_count: usize) -> CosetTable {
        self.compact();
        let complete = !self.exhausted
            && self
                .table
                .iter()
                .all(|row| row.iter().all(|e| e.is_some()));
        CosetTable {
            gen_count,
            rows: self.table,
            status: if complete {
                TableStatus::Complete
            } else {
                TableStatus::Exhausted(self.cap)
            },
        }
    }

    /// Traces a word through current entries from coset 0 without defining.
    fn watch_trace_closes(&mut self, w: &Word) -> bool {
        let mut c = self.find(0);
        for &l in w.letters() {
            match self.entry(c, col_of(l)) {
                Some(next) => c = next,
                None => return false,
            }
        }
        c == self.find(0)
    }
}

/// Standard coset enumeration of the subgroup generated by `subgroup_gens`.
pub fn todd_coxeter(
    p: &Presentation,
    subgroup_gens: &[Word],
    cap: usize,
) -> Result<CosetTable> {
    Ok(todd_coxeter_with_watch(p, subgroup_gens, cap, None)?.0)
}

/// Enumeration with an optional watch word: stops early with a `true` flag as
/// soon as the watch word provably stabilizes coset 0 in the partial table.
/// Used for normal-closure queries against infinite quotients.
pub fn todd_coxeter_with_watch(
    p: &Presentation,
    subgroup_gens: &[Word],
    cap: usize,
    watch: Option<&Word>,
) -> Result<(CosetTable, bool)> {
    if cap < 1 {
        return Err(Error::CapTooSmall);
    }
    for w in subgroup_gens {
        w.check_over(p.gen_count())?;
    }
    if let Some(w) = watch {
        w.check_over(p.gen_count())?;
    }

    let mut e = Enumerator::new(p.gen_count(), p.relators(), cap);

    // cap-hit recovery: deduction-only lookahead plus compaction; the caller
    // retries its scan afterwards. Gives up when no rows were freed.
    macro_rules! recover_or_exhaust {
        ($cursor:expr) => {{
            let tracked = e.lookahead_and_compact($cursor);
            if e.table.len() >= e.cap {
                e.exhausted = true;
                return Ok((e.into_table(p.gen_count()), false));
            }
            tracked
        }};
    }

    let mut idx = 0usize;
    while idx < subgroup_gens.len() {
        if e.scan_and_fill(0, &subgroup_gens[idx]) {
            idx += 1;
        } else {
            recover_or_exhaust!(0);
        }
    }
    if let Some(w) = watch {
        if e.watch_trace_closes(w) {
            return Ok((e.into_table(p.gen_count()), true));
        }
    }

    loop {
        let mut cursor = 0usize;
        while cursor < e.table.len() {
            if !e.is_live(cursor) {
                cursor += 1;
                continue;
            }
            let mut ri = 0usize;
            while ri < p.relators().len() {
                if !e.is_live(cursor) {
                    break;
                }
                if e.scan_and_fill(cursor, &p.relators()[ri]) {
                    ri += 1;
                } else {
                    cursor = recover_or_exhaust!(cursor);
                    ri = 0;
                }
            }
            if e.is_live(cursor) {
                let mut col = 0usize;
                while col < e.cols {
                    if e.entry(cursor, col).is_some() {
                        col += 1;
                        continue;
                    }
                    match e.define(cursor, col) {
                        Some(_) => col += 1,
                        None => {
                            cursor = recover_or_exhaust!(cursor);
                            if !e.is_live(cursor) {
                                break;
                            }
                            col = 0;
                        }
                    }
                }
            }
            if let Some(w) = watch {
                if e.watch_trace_closes(w) {
                    return Ok((e.into_table(p.gen_count()), true));
                }
            }
            cursor += 1;
        }

        // verification sweep: compaction and coincidences can leave a coset
        // whose relator scans were only done under a dead identity; rescan
        // everything without defining until quiescent
        let mut dirty = false;
        for coset in 0..e.table.len() {
            if !e.is_live(coset) {
                continue;
            }
            for r in p.relators() {
                if e.scan_no_fill(coset, r) {
                    dirty = true;
                }
                if !e.is_live(coset) {
                    break;
                }
            }
        }
        for w in subgroup_gens {
            if e.scan_no_fill(0, w) {
                dirty = true;
            }
        }
        let all_defined = (0..e.table.len()).all(|c| {
            !e.is_live(c) || (0..e.cols).all(|col| e.table[c][col].is_some())
        });
        if !dirty && all_defined {
            break;
        }
        if !dirty && !all_defined {
            // undefined entries remain (only possible after coincidences
            // detached them); let the cursor loop fill them
            continue;
        }
    }

    Ok((e.into_table(p.gen_count()), false))
}
