//! ε-chains: finite point sequences whose consecutive pairs are ε-close.
//!
//! These are the discrete paths. Elementary homotopy moves insert or delete a
//! single interior vertex subject to the chain condition; this is the move set
//! that generates the edge-path group of the complex whose triangles are
//! ε-triangles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Scale};

/// A valid ε-chain. Consecutive duplicates are normalized away (a single
/// vertex survives as itself), so chains are canonical as vertex sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    vertices: Vec<usize>,
    scale: Scale,
}

impl Chain {
    /// Validates and normalizes a vertex sequence at a scale.
    pub fn new(space: &MetricSpace, s: Scale, vertices: Vec<usize>) -> Result<Chain> {
        if vertices.is_empty() {
            return Err(Error::Validation("chain must be nonempty".into()));
        }
        for &v in &vertices {
            space.check_index(v)?;
        }
        for w in vertices.windows(2) {
            let d = space.dist(w[0], w[1]);
            if d > s.epsilon() {
                return Err(Error::MoveBreaksChain(w[0], w[1], d, s.epsilon()));
            }
        }
        Ok(Chain {
            vertices: normalize(vertices),
            scale: s,
        })
    }

    /// Single-vertex chain.
    pub fn constant(space: &MetricSpace, s: Scale, v: usize) -> Result<Chain> {
        Chain::new(space, s, vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // chains are nonempty by construction
    }

    pub fn is_loop(&self) -> bool {
        self.start() == self.end()
    }

    /// Internal constructor for walks already known to use valid edges
    /// (tree paths, generator edges). Normalizes but skips distance checks.
    pub(crate) fn from_raw(vertices: Vec<usize>, scale: Scale) -> Chain {
        debug_assert!(!vertices.is_empty());
        Chain {
            vertices: normalize(vertices),
            scale,
        }
    }
}

fn normalize(vertices: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// True iff all consecutive distances are within the scale.
pub fn is_chain(space: &MetricSpace, s: Scale, seq: &[usize]) -> Result<bool> {
    if seq.is_empty() {
        return Err(Error::Validation("chain must be nonempty".into()));
    }
    for &v in seq {
        space.check_index(v)?;
    }
    Ok(seq
        .windows(2)
        .all(|w| space.dist(w[0], w[1]) <= s.epsilon()))
}

/// Some point whose ε-ball contains every vertex of the chain, or none.
/// Centers on the chain itself are preferred (in traversal order), then the
/// remaining points ascending, so the answer is deterministic.
pub fn is_bounded(space: &MetricSpace, s: Scale, c: &Chain) -> Option<usize> {
    bounded_center(space, s.epsilon(), c.vertices())
}

/// Ball-containment check for a raw vertex set at a radius.
pub fn bounded_center(space: &MetricSpace, radius: f64, vertices: &[usize]) -> Option<usize> {
    let covers = |p: usize| vertices.iter().all(|&v| space.dist(p, v) <= radius);
    vertices
        .iter()
        .copied()
        .find(|&p| covers(p))
        .or_else(|| (0..space.len()).find(|&p| covers(p)))
}

/// Concatenation `a * b`; the duplicated junction vertex is dropped.
pub fn concat(a: &Chain, b: &Chain) -> Result<Chain> {
    if a.scale.epsilon() != b.scale.epsilon() {
        return Err(Error::ScaleMismatch(a.scale.epsilon(), b.scale.epsilon()));
    }
    if a.end() != b.start() {
        return Err(Error::EndpointMismatch {
            left: a.end(),
            right: b.start(),
        });
    }
    let mut vertices = a.vertices.clone();
    vertices.extend_from_slice(&b.vertices[1..]);
    Ok(Chain {
        vertices: normalize(vertices),
        scale: a.scale,
    })
}

/// The reversed chain.
pub fn reverse(a: &Chain) -> Chain {
    let mut vertices = a.vertices.clone();
    vertices.reverse();
    Chain {
        vertices,
        scale: a.scale,
    }
}

/// An elementary homotopy move: insert or delete one interior vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HomotopyMove {
    /// Insert `point` so that it becomes the vertex at `position`
    /// (between the current `position - 1` and `position`).
    Insert { position: usize, point: usize },
    /// Delete the interior vertex at `position`.
    Delete { position: usize },
}

/// Applies a move, checking that endpoints stay fixed and the chain condition
/// holds at the chain's scale. Rejections carry the violated pair.
pub fn apply_move(space: &MetricSpace, c: &Chain, m: HomotopyMove) -> Result<Chain> {
    let s = c.scale;
    let eps = s.epsilon();
    let mut vertices = c.vertices.clone();
    match m {
        HomotopyMove::Insert { position, point } => {
            space.check_index(point)?;
            if position == 0 || position > vertices.len() - 1 {
                return Err(Error::InvalidMove(format!(
                    "insert position {position} must be interior (1..={})",
                    vertices.len() - 1
                )));
            }
            let before = vertices[position - 1];
            let after = vertices[position];
            let d1 = space.dist(before, point);
            if d1 > eps {
                return Err(Error::MoveBreaksChain(before, point, d1, eps));
            }
            let d2 = space.dist(point, after);
            if d2 > eps {
                return Err(Error::MoveBreaksChain(point, after, d2, eps));
            }
            vertices.insert(position, point);
        }
        HomotopyMove::Delete { position } => {
            if vertices.len() < 2 {
                return Err(Error::InvalidMove("cannot delete from a single-vertex chain".into()));
            }
            if position == 0 || position >= vertices.len() - 1 {
                return Err(Error::InvalidMove(format!(
                    "delete position {position} must be interior (1..={})",
                    vertices.len().saturating_sub(2)
                )));
            }
            let before = vertices[position - 1];
            let after = vertices[position + 1];
            let d = space.dist(before, after);
            if d > eps {
                return Err(Error::MoveBreaksChain(before, after, d, eps));
            }
            vertices.remove(position);
        }
    }
    Ok(Chain {
        vertices: normalize(vertices),
        scale: s,
    })
}

/// All single moves valid on a chain, in deterministic order.
pub fn valid_moves(space: &MetricSpace, c: &Chain) -> Vec<HomotopyMove> {
    let eps = c.scale.epsilon();
    let v = c.vertices();
    let mut out = Vec::new();
    for position in 1..v.len() {
        for point in 0..space.len() {
            if space.dist(v[position - 1], point) <= eps && space.dist(point, v[position]) <= eps {
                out.push(HomotopyMove::Insert { position, point });
            }
        }
    }
    if v.len() >= 3 {
        for position in 1..v.len() - 1 {
            if space.dist(v[position - 1], v[position + 1]) <= eps {
                out.push(HomotopyMove::Delete { position });
            }
        }
    }
    out
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
    fn single_vertex_is_chain() {
        let s = polygon(4, 1.0);
        assert!(is_chain(&s, Scale(0.0), &[2]).unwrap());
    }

    #[test]
    fn nearest_neighbor_walk_on_twelve_gon() {
        let s = polygon(12, 1.0);
        let eps = Scale(0.6);
        assert!(is_chain(&s, eps, &[0, 1, 2, 3]).unwrap());
        // jump across the diameter fails: distance 2 > 0.6
        assert!(!is_chain(&s, eps, &[0, 6]).unwrap());
        assert!(is_chain(&s, eps, &[0, 20]).is_err());
    }

    #[test]
    fn constant_chain_is_bounded_by_itself() {
        let s = polygon(12, 1.0);
        let c = Chain::new(&s, Scale(0.6), vec![3]).unwrap();
        assert_eq!(is_bounded(&s, Scale(0.6), &c), Some(3));
    }

    #[test]
    fn three_consecutive_vertices_bounded_by_middle() {
        let s = polygon(12, 1.0);
        let c = Chain::new(&s, Scale(0.6), vec![0, 1, 2]).unwrap();
        // chord to both ends from vertex 1 is 2 sin(π/12) ≈ 0.5176 ≤ 0.6
        assert_eq!(is_bounded(&s, Scale(0.6), &c), Some(1));
    }

    #[test]
    fn antipodal_chain_is_unbounded_at_small_scale() {
        let s = polygon(12, 1.0);
        let c = Chain::new(&s, Scale(0.6), vec![0, 1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(is_bounded(&s, Scale(0.6), &c), None);
    }

    #[test]
    fn subchains_share_the_bounding_center() {
        let s = polygon(12, 1.0);
        let scale = Scale(1.0);
        let c = Chain::new(&s, scale, vec![0, 1, 2]).unwrap();
        let p = is_bounded(&s, scale, &c).unwrap();
        for lo in 0..c.len() {
            for hi in (lo + 1)..=c.len() {
                let sub = c.vertices()[lo..hi].to_vec();
                assert!(sub.iter().all(|&v| s.dist(p, v) <= scale.epsilon()));
            }
        }
    }

    #[test]
    fn concat_drops_junction() {
        let s = polygon(12, 1.0);
        let eps = Scale(0.6);
        let a = Chain::new(&s, eps, vec![0, 1]).unwrap();
        let b = Chain::new(&s, eps, vec![1, 2]).unwrap();
        assert_eq!(concat(&a, &b).unwrap().vertices(), &[0, 1, 2]);
        let bad = Chain::new(&s, eps, vec![3, 4]).unwrap();
        assert!(concat(&a, &bad).is_err());
    }

    #[test]
    fn reverse_involution_and_out_and_back() {
        let s = polygon(12, 1.0);
        let eps = Scale(0.6);
        let a = Chain::new(&s, eps, vec![0, 1, 2]).unwrap();
        assert_eq!(reverse(&a).vertices(), &[2, 1, 0]);
        assert_eq!(reverse(&reverse(&a)), a);
        let back = concat(&a, &reverse(&a)).unwrap();
        assert_eq!(back.vertices(), &[0, 1, 2, 1, 0]);
    }

    #[test]
    fn delete_normalizes_duplicates() {
        let s = polygon(12, 1.0);
        let eps = Scale(0.6);
        let c = Chain::new(&s, eps, vec![0, 1, 0]).unwrap();
        let out = apply_move(&s, &c, HomotopyMove::Delete { position: 1 }).unwrap();
        assert_eq!(out.vertices(), &[0]);
    }

    #[test]
    fn insert_requires_both_distances() {
        let s = polygon(12, 1.0);
        let eps = Scale(0.6);
        let c = Chain::new(&s, eps, vec![0, 1]).unwrap();
        // vertex 2 is 1.0 away from 0: rejected
        let err = apply_move(
            &s,
            &c,
            HomotopyMove::Insert {
                position: 1,
                point: 2,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::MoveBreaksChain(0, 2, _, _)));
        // vertex 0's other neighbor 11 is fine between 0 and... no: 11-1 is a
        // second-neighbor chord (length 1), also rejected.
        let err = apply_move(
            &s,
            &c,
            HomotopyMove::Insert {
                position: 1,
                point: 11,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::MoveBreaksChain(11, 1, _, _)));
    }

    #[test]
    fn delete_cannot_shortcut_second_neighbor() {
        let s = polygon(12, 1.0);
        let eps = Scale(0.6);
        let c = Chain::new(&s, eps, vec![0, 1, 2]).unwrap();
        let err = apply_move(&s, &c, HomotopyMove::Delete { position: 1 }).unwrap_err();
        assert!(matches!(err, Error::MoveBreaksChain(0, 2, _, _)));
    }

    #[test]
    fn moves_preserve_endpoints_and_validity() {
        let s = polygon(12, 1.0);
        let scales = critical_scales(&s);
        let eps = scales[1]; // second-neighbor scale, some moves available
        let c = Chain::new(&s, eps, vec![0, 1, 2, 3, 4]).unwrap();
        for m in valid_moves(&s, &c) {
            let out = apply_move(&s, &c, m).unwrap();
            assert_eq!(out.start(), c.start());
            assert_eq!(out.end(), c.end());
            assert!(is_chain(&s, eps, out.vertices()).unwrap());
        }
    }
}
