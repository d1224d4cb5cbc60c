//! Incremental 3-D convex hull with degeneracy fallbacks, used as the
//! geometric oracle for qubit interconversion. Point sets here are tiny
//! (at most 30 Bloch vectors).

use crate::error::{MagicError, Result};

type P3 = [f64; 3];

const BUILD_EPS: f64 = 1e-10;

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone)]
struct Facet {
    verts: [usize; 3],
    /// unit outward normal
    normal: P3,
    offset: f64,
}

/// Convex hull of a full-dimensional point set, or the lower-dimensional
/// fallback when all points are (nearly) affinely dependent.
#[derive(Debug, Clone)]
pub enum ConvexHull3 {
    /// Full-dimensional hull with triangulated facets.
    Solid {
        points: Vec<P3>,
        facets: Vec<([usize; 3], P3, f64)>,
    },
    /// All points in a plane: basis + 2-D hull vertices in basis coords.
    Planar {
        origin: P3,
        basis: [P3; 2],
        normal: P3,
        polygon: Vec<[f64; 2]>,
        points: Vec<P3>,
    },
    /// All points on a line segment.
    Segment { a: P3, b: P3 },
    /// A single point.
    Point(P3),
}

impl ConvexHull3 {
    pub fn build(input: &[P3]) -> Result<Self> {
        // dedup
        let mut points: Vec<P3> = Vec::new();
        for p in input {
            if !points.iter().any(|q| norm(sub(*p, *q)) < 1e-9) {
                points.push(*p);
            }
        }
        if points.is_empty() {
            return Err(MagicError::InvalidInput("empty point set".into()));
        }
        if points.len() == 1 {
            return Ok(ConvexHull3::Point(points[0]));
        }

        // pick extreme points for the initial simplex
        let i0 = 0usize;
        let i1 = (0..points.len())
            .max_by(|&a, &b| {
                norm(sub(points[a], points[i0]))
                    .partial_cmp(&norm(sub(points[b], points[i0])))
                    .unwrap()
            })
            .unwrap();
        if norm(sub(points[i1], points[i0])) < 1e-9 {
            return Ok(ConvexHull3::Point(points[i0]));
        }
        let line = sub(points[i1], points[i0]);
        let i2 = (0..points.len())
            .max_by(|&a, &b| {
                norm(cross(sub(points[a], points[i0]), line))
                    .partial_cmp(&norm(cross(sub(points[b], points[i0]), line)))
                    .unwrap()
            })
            .unwrap();
        if norm(cross(sub(points[i2], points[i0]), line)) < BUILD_EPS {
            return Ok(Self::build_segment(&points));
        }
        let plane_normal = cross(sub(points[i1], points[i0]), sub(points[i2], points[i0]));
        let i3 = (0..points.len())
            .max_by(|&a, &b| {
                dot(sub(points[a], points[i0]), plane_normal)
                    .abs()
                    .partial_cmp(&dot(sub(points[b], points[i0]), plane_normal).abs())
                    .unwrap()
            })
            .unwrap();
        if dot(sub(points[i3], points[i0]), plane_normal).abs() < BUILD_EPS {
            return Self::build_planar(&points, points[i0], plane_normal);
        }

        Self::build_solid(points, [i0, i1, i2, i3])
    }

    fn build_segment(points: &[P3]) -> Self {
        let dir = sub(points[points.len() - 1], points[0]);
        let mut lo = (0.0, points[0]);
        let mut hi = (0.0, points[0]);
        for p in points {
            let t = dot(sub(*p, points[0]), dir);
            if t < lo.0 {
                lo = (t, *p);
            }
            if t > hi.0 {
                hi = (t, *p);
            }
        }
        ConvexHull3::Segment { a: lo.1, b: hi.1 }
    }

    fn build_planar(points: &[P3], origin: P3, normal: P3) -> Result<Self> {
        let n = {
            let l = norm(normal);
            [normal[0] / l, normal[1] / l, normal[2] / l]
        };
        // orthonormal in-plane basis
        let seed = if n[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let u = {
            let c = cross(n, seed);
            let l = norm(c);
            [c[0] / l, c[1] / l, c[2] / l]
        };
        let v = cross(n, u);
        let coords: Vec<[f64; 2]> = points
            .iter()
            .map(|p| [dot(sub(*p, origin), u), dot(sub(*p, origin), v)])
            .collect();
        // monotone chain
        let mut idx: Vec<usize> = (0..coords.len()).collect();
        idx.sort_by(|&a, &b| {
            coords[a]
                .partial_cmp(&coords[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let cross2 = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| -> f64 {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let mut hull: Vec<usize> = Vec::new();
        for &i in idx.iter().chain(idx.iter().rev().skip(1)) {
            while hull.len() >= 2
                && cross2(
                    coords[hull[hull.len() - 2]],
                    coords[hull[hull.len() - 1]],
                    coords[i],
                ) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
        Ok(ConvexHull3::Planar {
            origin,
            basis: [u, v],
            normal: n,
            polygon: hull.iter().map(|&i| coords[i]).collect(),
            points: points.to_vec(),
        })
    }

    fn build_solid(points: Vec<P3>, simplex: [usize; 4]) -> Result<Self> {
        let centroid = {
            let mut c = [0.0; 3];
            for &i in &simplex {
                for k in 0..3 {
                    c[k] += points[i][k] / 4.0;
                }
            }
            c
        };
        let mk_facet = |a: usize, b: usize, c: usize| -> Facet {
            let n = cross(sub(points[b], points[a]), sub(points[c], points[a]));
            let l = norm(n);
            let mut normal = [n[0] / l, n[1] / l, n[2] / l];
            let mut offset = dot(normal, points[a]);
            if dot(normal, centroid) > offset {
                normal = [-normal[0], -normal[1], -normal[2]];
                offset = -offset;
            }
            Facet {
                verts: [a, b, c],
                normal,
                offset,
            }
        };
        let [i0, i1, i2, i3] = simplex;
        let mut facets = vec![
            mk_facet(i0, i1, i2),
            mk_facet(i0, i1, i3),
            mk_facet(i0, i2, i3),
            mk_facet(i1, i2, i3),
        ];

        // insert remaining points, farthest from the centroid first
        let mut order: Vec<usize> = (0..points.len()).filter(|i| !simplex.contains(i)).collect();
        order.sort_by(|&a, &b| {
            norm(sub(points[b], centroid))
                .partial_cmp(&norm(sub(points[a], centroid)))
                .unwrap()
        });

        for &pi in &order {
            let p = points[pi];
            let mut visible: Vec<bool> = facets
                .iter()
                .map(|f| dot(f.normal, p) - f.offset > BUILD_EPS)
                .collect();
            if !visible.iter().any(|&v| v) {
                continue; // inside or on the boundary
            }
            // absorb coplanar facets adjacent to the visible region so the
            // horizon stays closed
            loop {
                let mut changed = false;
                for i in 0..facets.len() {
                    if visible[i] {
                        continue;
                    }
                    let d = dot(facets[i].normal, p) - facets[i].offset;
                    if d.abs() <= BUILD_EPS {
                        let shares_edge = facets.iter().enumerate().any(|(j, fj)| {
                            visible[j]
                                && facets[i]
                                    .verts
                                    .iter()
                                    .filter(|v| fj.verts.contains(v))
                                    .count()
                                    >= 2
                        });
                        if shares_edge {
                            visible[i] = true;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            // horizon edges: edges of visible facets shared with no other
            // visible facet
            let mut horizon: Vec<(usize, usize)> = Vec::new();
            for (i, f) in facets.iter().enumerate() {
                if !visible[i] {
                    continue;
                }
                for e in [
                    (f.verts[0], f.verts[1]),
                    (f.verts[1], f.verts[2]),
                    (f.verts[2], f.verts[0]),
                ] {
                    let shared_with_visible = facets.iter().enumerate().any(|(j, fj)| {
                        j != i && visible[j] && fj.verts.contains(&e.0) && fj.verts.contains(&e.1)
                    });
                    if !shared_with_visible {
                        horizon.push(e);
                    }
                }
            }
            let survivors: Vec<Facet> = facets
                .iter()
                .zip(&visible)
                .filter(|(_, &v)| !v)
                .map(|(f, _)| f.clone())
                .collect();
            facets = survivors;
            for (a, b) in horizon {
                let n = cross(sub(points[b], points[a]), sub(p, points[a]));
                let l = norm(n);
                if l < 1e-14 {
                    continue; // degenerate sliver
                }
                let mut normal = [n[0] / l, n[1] / l, n[2] / l];
                let mut offset = dot(normal, points[a]);
                if dot(normal, centroid) > offset {
                    normal = [-normal[0], -normal[1], -normal[2]];
                    offset = -offset;
                }
                facets.push(Facet {
                    verts: [a, b, pi],
                    normal,
                    offset,
                });
            }
        }

        Ok(ConvexHull3::Solid {
            facets: facets
                .into_iter()
                .map(|f| (f.verts, f.normal, f.offset))
                .collect(),
            points,
        })
    }

    /// Membership within tolerance.
    pub fn contains(&self, p: P3, tol: f64) -> bool {
        match self {
            ConvexHull3::Solid { facets, .. } => {
                facets.iter().all(|(_, n, off)| dot(*n, p) <= off + tol)
            }
            ConvexHull3::Planar {
                origin,
                basis,
                normal,
                polygon,
                ..
            } => {
                if dot(sub(p, *origin), *normal).abs() > tol {
                    return false;
                }
                let q = [
                    dot(sub(p, *origin), basis[0]),
                    dot(sub(p, *origin), basis[1]),
                ];
                polygon_contains(polygon, q, tol)
            }
            ConvexHull3::Segment { a, b } => point_segment_distance(p, *a, *b) <= tol,
            ConvexHull3::Point(q) => norm(sub(p, *q)) <= tol,
        }
    }

    /// Euclidean distance from a point to the hull (zero inside).
    pub fn distance(&self, p: P3) -> f64 {
        match self {
            ConvexHull3::Solid { points, facets } => {
                if self.contains(p, 1e-12) {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for (v, _, _) in facets {
                    let d = point_triangle_distance(p, points[v[0]], points[v[1]], points[v[2]]);
                    best = best.min(d);
                }
                best
            }
            ConvexHull3::Planar {
                origin,
                basis,
                normal,
                polygon,
                ..
            } => {
                let off = dot(sub(p, *origin), *normal);
                let q = [
                    dot(sub(p, *origin), basis[0]),
                    dot(sub(p, *origin), basis[1]),
                ];
                let in_plane = polygon_distance(polygon, q);
                (off * off + in_plane * in_plane).sqrt()
            }
            ConvexHull3::Segment { a, b } => point_segment_distance(p, *a, *b),
            ConvexHull3::Point(q) => norm(sub(p, *q)),
        }
    }

    /// Facet list (solid hulls only): vertex index triples with outward
    /// normals and offsets. Indices refer to [`Self::input_points`].
    pub fn facet_planes(&self) -> Vec<([usize; 3], P3, f64)> {
        match self {
            ConvexHull3::Solid { facets, .. } => facets.clone(),
            _ => Vec::new(),
        }
    }

    /// The deduplicated point list facet indices refer to (solid hulls).
    pub fn input_points(&self) -> Vec<P3> {
        match self {
            ConvexHull3::Solid { points, .. } => points.clone(),
            other => other.vertex_points(),
        }
    }

    pub fn vertex_points(&self) -> Vec<P3> {
        match self {
            ConvexHull3::Solid { points, facets } => {
                let mut used: Vec<usize> = facets.iter().flat_map(|(v, _, _)| v.to_vec()).collect();
                used.sort_unstable();
                used.dedup();
                used.into_iter().map(|i| points[i]).collect()
            }
            ConvexHull3::Planar {
                origin,
                basis,
                polygon,
                ..
            } => polygon
                .iter()
                .map(|q| {
                    [
                        origin[0] + q[0] * basis[0][0] + q[1] * basis[1][0],
                        origin[1] + q[0] * basis[0][1] + q[1] * basis[1][1],
                        origin[2] + q[0] * basis[0][2] + q[1] * basis[1][2],
                    ]
                })
                .collect(),
            ConvexHull3::Segment { a, b } => vec![*a, *b],
            ConvexHull3::Point(p) => vec![*p],
        }
    }
}

fn polygon_contains(polygon: &[[f64; 2]], q: [f64; 2], tol: f64) -> bool {
    if polygon.len() < 3 {
        return polygon_distance(polygon, q) <= tol;
    }
    // polygon is counter-clockwise from the monotone chain
    for i in 0..polygon.len() {
        let a = polygon[i];
        let b = polygon[(i + 1) % polygon.len()];
        let cr = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
        if cr < -tol {
            return false;
        }
    }
    true
}

fn polygon_distance(polygon: &[[f64; 2]], q: [f64; 2]) -> f64 {
    if polygon.is_empty() {
        return f64::INFINITY;
    }
    if polygon.len() == 1 {
        return ((q[0] - polygon[0][0]).powi(2) + (q[1] - polygon[0][1]).powi(2)).sqrt();
    }
    if polygon_contains(polygon, q, 0.0) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..polygon.len() {
        let a = polygon[i];
        let b = polygon[(i + 1) % polygon.len()];
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if len2 > 0.0 {
            (((q[0] - a[0]) * ab[0] + (q[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let proj = [a[0] + t * ab[0], a[1] + t * ab[1]];
        let d = ((q[0] - proj[0]).powi(2) + (q[1] - proj[1]).powi(2)).sqrt();
        best = best.min(d);
    }
    best
}

fn point_segment_distance(p: P3, a: P3, b: P3) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 {
        (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let proj = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
    norm(sub(p, proj))
}

/// Closest distance from a point to a triangle (Ericson's region method).
fn point_triangle_distance(p: P3, a: P3, b: P3, c: P3) -> f64 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return norm(ap);
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return norm(bp);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return norm(sub(
            p,
            [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]],
        ));
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return norm(cp);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return norm(sub(
            p,
            [a[0] + t * ac[0], a[1] + t * ac[1], a[2] + t * ac[2]],
        ));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        let bc = sub(c, b);
        return norm(sub(
            p,
            [b[0] + t * bc[0], b[1] + t * bc[1], b[2] + t * bc[2]],
        ));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let closest = [
        a[0] + ab[0] * v + ac[0] * w,
        a[1] + ab[1] * v + ac[1] * w,
        a[2] + ab[2] * v + ac[2] * w,
    ];
    norm(sub(p, closest))
}
