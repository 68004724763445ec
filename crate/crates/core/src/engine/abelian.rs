//! Integer linear algebra on exponent vectors: lattice membership (Hermite
//! reduction) and abelianization invariants (Smith normal form).

use serde::Serialize;

use crate::pi1::Presentation;

/// Invariant factors of the abelianized group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    /// Rank of the free part.
    pub free_rank: usize,
    /// Nontrivial finite invariant factors, each dividing the next.
    pub torsion: Vec<u64>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "trivial")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Abelianization of a presentation via Smith normal form of the relator
/// exponent matrix.
pub fn abelianization(p: &Presentation) -> AbelianInvariants {
    let cols = p.gen_count();
    let rows: Vec<Vec<i128>> = p
        .relators()
        .iter()
        .map(|r| {
            r.exponent_vector(cols)
                .into_iter()
                .map(|x| x as i128)
                .collect()
        })
        .collect();
    let diag = smith_diagonal(rows, cols);
    let rank = diag.iter().filter(|&&d| d != 0).count();
    let torsion: Vec<u64> = diag
        .iter()
        .filter(|&&d| d > 1)
        .map(|&d| d as u64)
        .collect();
    AbelianInvariants {
        free_rank: cols - rank,
        torsion,
    }
}

/// Whether `v` lies in the integer row span of `lattice`.
pub fn in_lattice(lattice: &[Vec<i64>], v: &[i64]) -> bool {
    let cols = v.len();
    let rows: Vec<Vec<i128>> = lattice
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let echelon = hermite_echelon(rows, cols);
    let mut target: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for row in &echelon {
        let pivot_col = match row.iter().position(|&x| x != 0) {
            Some(c) => c,
            None => continue,
        };
        if target[pivot_col] != 0 {
            let pivot = row[pivot_col];
            if target[pivot_col] % pivot != 0 {
                return false;
            }
            let q = target[pivot_col] / pivot;
            for c in 0..cols {
                target[c] -= q * row[c];
            }
        }
    }
    target.iter().all(|&x| x == 0)
}

/// Row echelon form over the integers (gcd elimination per column). Rows span
/// the same lattice as the input.
fn hermite_echelon(mut rows: Vec<Vec<i128>>, cols: usize) -> Vec<Vec<i128>> {
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let mut rank = 0usize;
    for col in 0..cols {
        if rank >= rows.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for (i, row) in rows.iter().enumerate().skip(rank) {
                if row[col] != 0 {
                    best = match best {
                        Some(b) if rows[b][col].abs() <= row[col].abs() => Some(b),
                        _ => Some(i),
                    };
                }
            }
            let pivot_row = match best {
                Some(i) => i,
                None => break,
            };
            rows.swap(rank, pivot_row);
            let mut any_left = false;
            for i in (rank + 1)..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[rank][col]);
                    for c in 0..cols {
                        let sub = q * rows[rank][c];
                        rows[i][c] -= sub;
                    }
                    if rows[i][col] != 0 {
                        any_left = true;
                    }
                }
            }
            if !any_left {
                if rows[rank][col] < 0 {
                    for c in 0..cols {
                        rows[rank][c] = -rows[rank][c];
                    }
                }
                rank += 1;
                break;
            }
        }
    }
    rows.truncate(rank);
    rows
}

/// Diagonal of the Smith normal form (nonnegative, each dividing the next).
fn smith_diagonal(mut m: Vec<Vec<i128>>, cols: usize) -> Vec<i128> {
    m.retain(|r| r.iter().any(|&x| x != 0));
    let rows = m.len();
    let n = rows.min(cols);
    let mut diag = Vec::new();
    let mut top = 0usize;
    let mut left = 0usize;
    while top < m.len() && left < cols && diag.len() < n {
        // find the nonzero entry of smallest magnitude in the working block
        let mut pivot: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(top) {
            for (j, &x) in row.iter().enumerate().skip(left) {
                if x != 0 {
                    pivot = match pivot {
                        Some((pi, pj)) if m[pi][pj].abs() <= x.abs() => Some((pi, pj)),
                        _ => Some((i, j)),
                    };
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        m.swap(top, pi);
        for row in m.iter_mut() {
            row.swap(left, pj);
        }

        // clear the pivot row and column by gcd steps
        let mut dirty = false;
        for i in (top + 1)..m.len() {
            if m[i][left] != 0 {
                let q = m[i][left].div_euclid(m[top][left]);
                for c in left..cols {
                    let sub = q * m[top][c];
                    m[i][c] -= sub;
                }
                if m[i][left] != 0 {
                    dirty = true;
                }
            }
        }
        for j in (left + 1)..cols {
            if m[top][j] != 0 {
                let q = m[top][j].div_euclid(m[top][left]);
                for row in m.iter_mut().skip(top) {
                    let sub = q * row[left];
                    row[j] -= sub;
                }
                if m[top][j] != 0 {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }

        // pivot must divide every remaining entry; otherwise mix the offending
        // row in and repeat
        let p = m[top][left].abs();
        let mut fixed = true;
        'outer: for i in (top + 1)..m.len() {
            for j in (left + 1)..cols {
                if m[i][j] % p != 0 {
                    for c in left..cols {
                        let add = m[i][c];
                        m[top][c] += add;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        diag.push(p);
        top += 1;
        left += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    #[test]
    fn abelianization_of_free_group() {
        let p = Presentation::free(3);
        let inv = abelianization(&p);
        assert_eq!(inv.free_rank, 3);
        assert!(inv.torsion.is_empty());
        assert_eq!(inv.to_string(), "Z^3");
    }

    #[test]
    fn abelianization_with_torsion() {
        // <a, b | a^2, b^3> abelianized: Z/2 x Z/3 = Z/6
        let p = Presentation::from_parts(
            2,
            vec![Word::from_letters([1, 1]), Word::from_letters([2, 2, 2])],
        )
        .unwrap();
        let inv = abelianization(&p);
        assert_eq!(inv.free_rank, 0);
        assert_eq!(inv.torsion, vec![6]);
    }

    #[test]
    fn abelianization_of_surface_relator() {
        // <a, b | [a, b]> abelianized: Z^2
        let p =
            Presentation::from_parts(2, vec![Word::from_letters([1, 2, -1, -2])]).unwrap();
        let inv = abelianization(&p);
        assert_eq!(inv.free_rank, 2);
        assert!(inv.torsion.is_empty());
        assert_eq!(inv.to_string(), "Z^2");
    }

    #[test]
    fn lattice_membership() {
        assert!(!in_lattice(&[vec![0, 1]], &[1, 0]));
        assert!(in_lattice(&[vec![0, 1]], &[0, 3]));
        assert!(in_lattice(&[], &[0, 0]));
        assert!(!in_lattice(&[], &[1, 0]));
        assert!(in_lattice(&[vec![2, 0], vec![0, 2]], &[4, 6]));
        assert!(!in_lattice(&[vec![2, 0], vec![0, 2]], &[1, 2]));
        // lattice needs combination of rows
        assert!(in_lattice(&[vec![1, 1], vec![0, 2]], &[1, 3]));
        assert!(!in_lattice(&[vec![1, 1], vec![0, 2]], &[1, 2]));
    }

    #[test]
    fn trivial_display() {
        let p = Presentation::from_parts(1, vec![Word::from_letters([1])]).unwrap();
        assert_eq!(abelianization(&p).to_string(), "trivial");
    }
}
