//! Generators for test spaces (sampled circles, wedges, truncated Hawaiian
//! earrings, flat torus grids, random clouds) and short-map morphisms with
//! induced maps on the chain fundamental group.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Scale};
use crate::pi1::{ChainClass, Presentation};
use crate::word::Word;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Recipe for a generated space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpaceRecipe {
    Hawaiian { circles: usize, samples: usize },
    WedgeCircles { radii: Vec<f64>, samples: usize },
    Circle { samples: usize, radius: f64 },
    TorusGrid { rows: usize, cols: usize },
    RandomCloud { count: usize, dim: usize, seed: u64 },
}

impl SpaceRecipe {
    /// Parses the CLI recipe syntax:
    /// `circle:12,1` | `wedge:3x16` | `wedge:1.0,0.5x16` | `hawaiian:3,16` |
    /// `torus:4,4` | `cloud:8,2`.
    pub fn parse(text: &str) -> Result<SpaceRecipe> {
        let (kind, args) = text
            .split_once(':')
            .ok_or_else(|| Error::Recipe(format!("missing `:` in recipe {text:?}")))?;
        let nums = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Recipe(format!("bad number {t:?} in recipe {text:?}")))
                })
                .collect()
        };
        match kind {
            "circle" => {
                let v = nums(args)?;
                if v.len() != 2 {
                    return Err(Error::Recipe("circle needs samples,radius".into()));
                }
                Ok(SpaceRecipe::Circle {
                    samples: v[0] as usize,
                    radius: v[1],
                })
            }
            "hawaiian" => {
                let v = nums(args)?;
                if v.len() != 2 {
                    return Err(Error::Recipe("hawaiian needs circles,samples".into()));
                }
                Ok(SpaceRecipe::Hawaiian {
                    circles: v[0] as usize,
                    samples: v[1] as usize,
                })
            }
            "wedge" => {
                let (spec, samples) = args
                    .split_once('x')
                    .ok_or_else(|| Error::Recipe("wedge needs <circles|radii>x<samples>".into()))?;
                let samples: usize = samples
                    .trim()
                    .parse()
                    .map_err(|_| Error::Recipe(format!("bad sample count {samples:?}")))?;
                let v = nums(spec)?;
                let radii = if v.len() == 1 && v[0].fract() == 0.0 && v[0] >= 1.0 {
                    vec![1.0; v[0] as usize]
                } else {
                    v
                };
                Ok(SpaceRecipe::WedgeCircles { radii, samples })
            }
            "torus" => {
                let v = nums(args)?;
                if v.len() != 2 {
                    return Err(Error::Recipe("torus needs rows,cols".into()));
                }
                Ok(SpaceRecipe::TorusGrid {
                    rows: v[0] as usize,
                    cols: v[1] as usize,
                })
            }
            "cloud" => {
                let v = nums(args)?;
                if v.len() < 2 || v.len() > 3 {
                    return Err(Error::Recipe("cloud needs count,dim[,seed]".into()));
                }
                Ok(SpaceRecipe::RandomCloud {
                    count: v[0] as usize,
                    dim: v[1] as usize,
                    seed: v.get(2).map(|&s| s as u64).unwrap_or(0),
                })
            }
            other => Err(Error::Recipe(format!("unknown recipe kind {other:?}"))),
        }
    }

    pub fn with_seed(mut self, new_seed: u64) -> SpaceRecipe {
        if let SpaceRecipe::RandomCloud { seed, .. } = &mut self {
            *seed = new_seed;
        }
        self
    }

    pub fn generate(&self) -> Result<MetricSpace> {
        match *self {
            SpaceRecipe::Hawaiian { circles, samples } => hawaiian(circles, samples),
            SpaceRecipe::WedgeCircles { ref radii, samples } => wedge_circles(radii, samples),
            SpaceRecipe::Circle { samples, radius } => circle(samples, radius),
            SpaceRecipe::TorusGrid { rows, cols } => torus_grid(rows, cols),
            SpaceRecipe::RandomCloud { count, dim, seed } => random_cloud(count, dim, seed),
        }
    }
}

/// Truncated Hawaiian earring: `n` circles tangent at the origin, circle `i`
/// (1-based) of diameter `1/i`, each sampled at `k` equally spaced points with
/// the tangency point shared. Point count is `n(k-1) + 1`; the origin is the
/// basepoint at index 0.
pub fn hawaiian(n: usize, k: usize) -> Result<MetricSpace> {
    if n < 1 {
        return Err(Error::Recipe("hawaiian needs at least one circle".into()));
    }
    if k < 8 {
        return Err(Error::Recipe(
            "hawaiian needs at least 8 samples per circle".into(),
        ));
    }
    let mut points = vec![vec![0.0, 0.0]];
    for i in 1..=n {
        let r = 1.0 / (2.0 * i as f64);
        for j in 1..k {
            // angle measured from the center; the origin sits at angle π
            let t = std::f64::consts::PI + TAU * (j as f64) / (k as f64);
            points.push(vec![r + r * t.cos(), r * t.sin()]);
        }
    }
    MetricSpace::from_points(&format!("hawaiian({n},{k})"), points, 0)
}

/// Vertex index of sample `j` on hawaiian circle `i` (1-based); sample 0 is
/// the shared origin.
pub fn hawaiian_index(k: usize, i: usize, j: usize) -> usize {
    if j == 0 {
        0
    } else {
        (i - 1) * (k - 1) + j
    }
}

/// The loop of hawaiian circle `i` as a vertex sequence based at the origin.
pub fn hawaiian_circle_loop(k: usize, i: usize) -> Vec<usize> {
    let mut seq = vec![0];
    for j in 1..k {
        seq.push(hawaiian_index(k, i, j));
    }
    seq.push(0);
    seq
}

/// Truncated Hawaiian earring with the bouquet (through-origin) metric
/// instead of the planar one: same circles and sample layout as
/// [`hawaiian`], but the circles stay metrically disjoint away from the
/// origin. The planar model intertwines its nested circles at distances below
/// the nearest-sample scale, which makes the retraction expand there; this
/// model is where the retraction is genuinely nonexpanding.
pub fn hawaiian_bouquet(n: usize, k: usize) -> Result<MetricSpace> {
    if n < 1 {
        return Err(Error::Recipe("hawaiian needs at least one circle".into()));
    }
    if k < 8 {
        return Err(Error::Recipe(
            "hawaiian needs at least 8 samples per circle".into(),
        ));
    }
    let radii: Vec<f64> = (1..=n).map(|i| 1.0 / (2.0 * i as f64)).collect();
    wedge_circles(&radii, k)
}

/// Wedge of sampled circles joined only at the origin, with the bouquet
/// metric: within one circle distances are Euclidean chords of its own planar
/// copy, across circles they pass through the origin. Distinct planar circles
/// through a common point would intersect a second time, so the metric gluing
/// is what keeps the circles genuinely disjoint. Point count `m(k-1) + 1`.
pub fn wedge_circles(radii: &[f64], k: usize) -> Result<MetricSpace> {
    if radii.is_empty() {
        return Err(Error::Recipe("wedge needs at least one circle".into()));
    }
    if k < 3 {
        return Err(Error::Recipe(
            "wedge needs at least 3 samples per circle".into(),
        ));
    }
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Recipe("wedge radii must be positive".into()));
    }
    let m = radii.len();
    // chord within circle c between samples j1 and j2 of its own planar copy
    let chord = |c: usize, j1: usize, j2: usize| -> f64 {
        let dt = std::f64::consts::PI * ((j1 as f64 - j2 as f64) / k as f64);
        2.0 * radii[c] * dt.sin().abs()
    };
    let count = m * (k - 1) + 1;
    let mut dist = vec![vec![0.0; count]; count];
    let locate = |idx: usize| -> (usize, usize) {
        // (circle, sample); the origin is sample 0 of every circle
        if idx == 0 {
            (0, 0)
        } else {
            ((idx - 1) / (k - 1), (idx - 1) % (k - 1) + 1)
        }
    };
    for a in 0..count {
        for b in (a + 1)..count {
            let (ca, ja) = locate(a);
            let (cb, jb) = locate(b);
            let d = if a == 0 {
                chord(cb, 0, jb)
            } else if ca == cb {
                chord(ca, ja, jb)
            } else {
                chord(ca, 0, ja) + chord(cb, 0, jb)
            };
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    MetricSpace::from_matrix(&format!("wedge({m}x{k})"), dist, 0)
}

/// Vertex index of sample `j` on wedge circle `c` (0-based).
pub fn wedge_index(k: usize, c: usize, j: usize) -> usize {
    if j == 0 {
        0
    } else {
        c * (k - 1) + j
    }
}

/// The loop of wedge circle `c` as a vertex sequence based at the origin.
pub fn wedge_circle_loop(k: usize, c: usize) -> Vec<usize> {
    let mut seq = vec![0];
    for j in 1..k {
        seq.push(wedge_index(k, c, j));
    }
    seq.push(0);
    seq
}

/// A single sampled circle of radius `r` centered at the origin; the
/// basepoint is the sample at angle 0.
pub fn circle(k: usize, r: f64) -> Result<MetricSpace> {
    if k < 3 {
        return Err(Error::Recipe("circle needs at least 3 samples".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Recipe("circle radius must be positive".into()));
    }
    let points = (0..k)
        .map(|j| {
            let t = TAU * (j as f64) / (k as f64);
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    MetricSpace::from_points(&format!("circle({k},{r})"), points, 0)
}

/// Flat torus metric on an `m x n` grid with unit step: coordinate
/// differences wrap around.
pub fn torus_grid(m: usize, n: usize) -> Result<MetricSpace> {
    if m < 3 || n < 3 {
        return Err(Error::Recipe("torus grid needs at least 3 x 3 points".into()));
    }
    let count = m * n;
    let mut dist = vec![vec![0.0; count]; count];
    let idx = |i: usize, j: usize| i * n + j;
    for i1 in 0..m {
        for j1 in 0..n {
            for i2 in 0..m {
                for j2 in 0..n {
                    let di = (i1 as i64 - i2 as i64).unsigned_abs() as usize;
                    let dj = (j1 as i64 - j2 as i64).unsigned_abs() as usize;
                    let di = di.min(m - di) as f64;
                    let dj = dj.min(n - dj) as f64;
                    dist[idx(i1, j1)][idx(i2, j2)] = (di * di + dj * dj).sqrt();
                }
            }
        }
    }
    MetricSpace::from_matrix(&format!("torus({m}x{n})"), dist, 0)
}

/// Deterministic random point cloud in the unit cube.
pub fn random_cloud(count: usize, dim: usize, seed: u64) -> Result<MetricSpace> {
    if count < 1 || dim < 1 {
        return Err(Error::Recipe("cloud needs count >= 1 and dim >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    MetricSpace::from_points(&format!("cloud({count},{dim};seed={seed})"), points, 0)
}

/// A basepoint-preserving vertex map between two spaces, with its measured
/// expansion. The paper-level maps are nonexpanding; sampled models may
/// expand some pairs, so the slack is recorded and scale preservation is
/// checked per scale where it matters.
#[derive(Clone, Debug)]
pub struct ShortMap {
    vertex_map: Vec<usize>,
    /// `max(0, d(f x, f y) - d(x, y))` over all pairs.
    expansion_slack: f64,
}

impl ShortMap {
    pub fn new(source: &MetricSpace, target: &MetricSpace, vertex_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != source.len() {
            return Err(Error::Validation(format!(
                "vertex map has {} entries for {} points",
                vertex_map.len(),
                source.len()
            )));
        }
        for &img in &vertex_map {
            target.check_index(img)?;
        }
        if vertex_map[source.basepoint()] != target.basepoint() {
            return Err(Error::Validation(
                "map must send basepoint to basepoint".into(),
            ));
        }
        let mut slack = 0.0f64;
        for x in 0..source.len() {
            for y in (x + 1)..source.len() {
                let expand = target.dist(vertex_map[x], vertex_map[y]) - source.dist(x, y);
                slack = slack.max(expand);
            }
        }
        Ok(ShortMap {
            vertex_map,
            expansion_slack: slack.max(0.0),
        })
    }

    pub fn apply(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn expansion_slack(&self) -> f64 {
        self.expansion_slack
    }

    pub fn is_nonexpanding(&self) -> bool {
        self.expansion_slack <= 1e-12
    }

    /// Scale preservation: pairs within `s` stay within `s` after mapping.
    /// This is what sending ε-chains to ε-chains (and ε-bounded sets to
    /// ε-bounded sets) actually requires.
    pub fn preserves_scale(&self, source: &MetricSpace, target: &MetricSpace, s: Scale) -> bool {
        let eps = s.epsilon();
        for x in 0..source.len() {
            for y in (x + 1)..source.len() {
                if source.dist(x, y) <= eps
                    && target.dist(self.vertex_map[x], self.vertex_map[y]) > eps
                {
                    return false;
                }
            }
        }
        true
    }

    /// Pushes a chain through the map.
    pub fn map_chain(&self, target: &MetricSpace, c: &Chain) -> Result<Chain> {
        let vertices: Vec<usize> = c.vertices().iter().map(|&v| self.vertex_map[v]).collect();
        Chain::new(target, c.scale(), vertices)
    }
}

/// The retraction of a truncated Hawaiian earring onto circles 1 and `m`:
/// circle 1 is fixed, circles `1 < i <= m` wrap angularly onto circle `m`,
/// and circles beyond `m` collapse to the origin. Sampling uses the same
/// angular grid on every circle, so no snapping is needed; construction fails
/// if the map does not preserve the nearest-sample scale.
pub fn hawaiian_retraction(space: &MetricSpace, n: usize, k: usize, m: usize) -> Result<ShortMap> {
    if !(1 < m && m <= n) {
        return Err(Error::Recipe(format!(
            "retraction index m={m} must satisfy 1 < m <= n={n}"
        )));
    }
    if space.len() != n * (k - 1) + 1 {
        return Err(Error::Validation(format!(
            "space has {} points, hawaiian({n},{k}) has {}",
            space.len(),
            n * (k - 1) + 1
        )));
    }
    let mut map = vec![0usize; space.len()];
    for i in 1..=n {
        for j in 1..k {
            let from = hawaiian_index(k, i, j);
            map[from] = if i == 1 {
                from
            } else if i <= m {
                hawaiian_index(k, m, j)
            } else {
                0
            };
        }
    }
    let short = ShortMap::new(space, space, map)?;
    // nearest-sample scale: the largest same-circle sample gap (circle 1)
    let fine = Scale((std::f64::consts::PI / k as f64).sin() + 1e-12);
    if !short.preserves_scale(space, space, fine) {
        return Err(Error::NotScalePreserving {
            scale: fine.epsilon(),
            i: 0,
            j: 0,
            got: short.expansion_slack,
        });
    }
    Ok(short)
}

/// Homomorphism induced on chain fundamental groups by a scale-preserving map.
#[derive(Clone, Debug)]
pub struct Pi1Map {
    source_gens: usize,
    images: Vec<Word>,
}

impl Pi1Map {
    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        w.check_over(self.source_gens)?;
        let map: Vec<Option<Word>> = self.images.iter().cloned().map(Some).collect();
        Ok(w.substitute(&map))
    }
}

/// Generator images of the induced map on fundamental groups at a scale.
/// Requires the map to preserve the scale so chains stay chains.
pub fn map_pi1(
    f: &ShortMap,
    source_space: &MetricSpace,
    target_space: &MetricSpace,
    source_pres: &Presentation,
    target_pres: &Presentation,
    s: Scale,
) -> Result<Pi1Map> {
    if !f.preserves_scale(source_space, target_space, s) {
        return Err(Error::NotScalePreserving {
            scale: s.epsilon(),
            i: 0,
            j: 0,
            got: f.expansion_slack(),
        });
    }
    let mut images = Vec::with_capacity(source_pres.gen_count());
    for gen in 0..source_pres.gen_count() {
        let class = ChainClass {
            end: source_pres.basepoint().ok_or_else(|| {
                Error::Validation("map_pi1 requires graph-backed presentations".into())
            })?,
            word: Word::generator(gen, false),
        };
        let loop_chain = source_pres.realize_class(&class)?;
        let mapped = f.map_chain(target_space, &loop_chain)?;
        images.push(target_pres.chain_class(&mapped)?.word);
    }
    Ok(Pi1Map {
        source_gens: source_pres.gen_count(),
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::critical_scales;

    #[test]
    fn hawaiian_point_count_and_basepoint() {
        let s = hawaiian(3, 16).unwrap();
        assert_eq!(s.len(), 3 * 15 + 1);
        assert_eq!(s.basepoint(), 0);
        // every circle passes through the basepoint: sample 1 of each circle
        // is one sample gap away
        for i in 1..=3 {
            let gap = (std::f64::consts::PI / 16.0).sin() / i as f64;
            let d = s.dist(0, hawaiian_index(16, i, 1));
            assert!((d - gap).abs() < 1e-9, "circle {i}: {d} vs {gap}");
        }
    }

    #[test]
    fn hawaiian_single_circle() {
        let s = hawaiian(1, 8).unwrap();
        assert_eq!(s.len(), 8);
        // diameter 1: the antipodal sample is at distance 1
        assert!((s.dist(0, hawaiian_index(8, 1, 4)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hawaiian_circle_loops_are_chains_at_nearest_scale() {
        let s = hawaiian(3, 16).unwrap();
        let fine = Scale((std::f64::consts::PI / 16.0).sin() + 1e-12);
        for i in 1..=3 {
            assert!(
                crate::chains::is_chain(&s, fine, &hawaiian_circle_loop(16, i)).unwrap(),
                "circle {i} loop must be a chain at the nearest scale"
            );
        }
    }

    #[test]
    fn wedge_three_circles_rank() {
        let s = wedge_circles(&[1.0, 1.0, 1.0], 16).unwrap();
        assert_eq!(s.len(), 3 * 15 + 1);
        let fine = critical_scales(&s)[0];
        let p = crate::pi1::simplify(&crate::pi1::presentation(&s, fine));
        assert_eq!(p.gen_count(), 3, "wedge of 3 circles is free of rank 3");
        assert!(p.relators().is_empty());
    }

    #[test]
    fn circle_nearest_chord() {
        let s = circle(12, 1.0).unwrap();
        let scales = critical_scales(&s);
        let expect = 2.0 * (std::f64::consts::PI / 12.0).sin();
        assert!((scales[0].epsilon() - expect).abs() < 1e-9);
    }

    #[test]
    fn torus_metric_wraps() {
        let s = torus_grid(4, 4).unwrap();
        assert_eq!(s.len(), 16);
        // (0,0) to (3,0) wraps to distance 1
        assert_eq!(s.dist(0, 12), 1.0);
        assert_eq!(s.dist(0, 5), (2.0f64).sqrt());
        assert!(s.triangle_ok());
    }

    #[test]
    fn random_cloud_is_deterministic() {
        let a = random_cloud(6, 2, 42).unwrap();
        let b = random_cloud(6, 2, 42).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(a.dist(i, j), b.dist(i, j));
            }
        }
        let c = random_cloud(6, 2, 43).unwrap();
        assert!((0..6).any(|i| (0..6).any(|j| a.dist(i, j) != c.dist(i, j))));
    }

    #[test]
    fn recipe_parsing() {
        assert_eq!(
            SpaceRecipe::parse("circle:12,1").unwrap(),
            SpaceRecipe::Circle {
                samples: 12,
                radius: 1.0
            }
        );
        assert_eq!(
            SpaceRecipe::parse("wedge:3x16").unwrap(),
            SpaceRecipe::WedgeCircles {
                radii: vec![1.0, 1.0, 1.0],
                samples: 16
            }
        );
        assert_eq!(
            SpaceRecipe::parse("wedge:1.0,0.5x16").unwrap(),
            SpaceRecipe::WedgeCircles {
                radii: vec![1.0, 0.5],
                samples: 16
            }
        );
        assert!(SpaceRecipe::parse("bogus:1").is_err());
    }

    #[test]
    fn identity_map_induces_identity() {
        let s = circle(12, 1.0).unwrap();
        let fine = critical_scales(&s)[0];
        let id = ShortMap::new(&s, &s, (0..12).collect()).unwrap();
        assert!(id.is_nonexpanding());
        let p = crate::pi1::presentation(&s, fine);
        let m = map_pi1(&id, &s, &s, &p, &p, fine).unwrap();
        assert_eq!(m.images()[0], Word::generator(0, false));
    }

    #[test]
    fn collapse_map_kills_everything() {
        let s = circle(12, 1.0).unwrap();
        let fine = critical_scales(&s)[0];
        let collapse = ShortMap::new(&s, &s, vec![0; 12]).unwrap();
        let p = crate::pi1::presentation(&s, fine);
        let m = map_pi1(&collapse, &s, &s, &p, &p, fine).unwrap();
        assert!(m.images()[0].is_empty());
    }

    #[test]
    fn retraction_structure() {
        let n = 3;
        let k = 16;
        let s = hawaiian_bouquet(n, k).unwrap();
        let r = hawaiian_retraction(&s, n, k, 2).unwrap();
        assert!(r.is_nonexpanding(), "bouquet retraction must not expand");
        // origin fixed
        assert_eq!(r.apply(0), 0);
        // circle 1 fixed pointwise
        for j in 1..k {
            assert_eq!(r.apply(hawaiian_index(k, 1, j)), hawaiian_index(k, 1, j));
        }
        // circle 2 fixed (i = m), circle 3 collapsed
        for j in 1..k {
            assert_eq!(r.apply(hawaiian_index(k, 2, j)), hawaiian_index(k, 2, j));
            assert_eq!(r.apply(hawaiian_index(k, 3, j)), 0);
        }
    }

    #[test]
    fn retraction_on_planar_model_errors() {
        // the planar model intertwines circles 2 and 3 below the chain scale,
        // so collapsing circle 3 cannot preserve it
        let s = hawaiian(3, 16).unwrap();
        assert!(hawaiian_retraction(&s, 3, 16, 2).is_err());
    }

    #[test]
    fn retraction_maps_chains_to_chains() {
        let n = 3;
        let k = 16;
        let s = hawaiian_bouquet(n, k).unwrap();
        let r = hawaiian_retraction(&s, n, k, 2).unwrap();
        let fine = Scale((std::f64::consts::PI / k as f64).sin() + 1e-12);
        for i in 1..=n {
            let c = Chain::new(&s, fine, hawaiian_circle_loop(k, i)).unwrap();
            let mapped = r.map_chain(&s, &c).unwrap();
            assert!(crate::chains::is_chain(&s, fine, mapped.vertices()).unwrap());
            // bounded chains stay bounded
            if let Some(center) = crate::chains::is_bounded(&s, Scale(1.0), &c) {
                let image_center = r.apply(center);
                for &v in mapped.vertices() {
                    assert!(s.dist(image_center, v) <= 1.0 + 1e-9);
                }
            }
        }
    }
}
