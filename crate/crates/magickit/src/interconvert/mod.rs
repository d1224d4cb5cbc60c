//! Qubit interconversion under CSPOs: the feasibility system with Farkas
//! certificates, the Clifford orbit on Bloch vectors, the convex-hull
//! geometric oracle, the canonical facet sets, and the interconversion
//! distance.

pub mod hull;

use crate::error::Result;
use crate::numerics::lp::{lp_feasibility_with_certificate, FeasibilityOutcome};
use crate::numerics::matrix::ComplexMatrix;
use crate::stabilizer::bloch_vector;
pub use hull::ConvexHull3;

pub type BlochVector = [f64; 3];

/// One signed-permutation action on a Bloch vector: output component i is
/// `signs[i] · r[perm[i]]`.
#[derive(Debug, Clone, Copy)]
pub struct BlochTransform {
    pub label: &'static str,
    pub perm: [usize; 3],
    pub signs: [f64; 3],
}

impl BlochTransform {
    pub fn apply(&self, r: BlochVector) -> BlochVector {
        [
            self.signs[0] * r[self.perm[0]],
            self.signs[1] * r[self.perm[1]],
            self.signs[2] * r[self.perm[2]],
        ]
    }
}

/// The 24 Bloch-vector transformations effected by the unitary CSPOs
/// (the rotation group of the stabilizer octahedron).
pub const BLOCH_TRANSFORMS: [BlochTransform; 24] = [
    BlochTransform {
        label: "I",
        perm: [0, 1, 2],
        signs: [1.0, 1.0, 1.0],
    },
    BlochTransform {
        label: "SH",
        perm: [1, 2, 0],
        signs: [1.0, 1.0, 1.0],
    },
    BlochTransform {
        label: "HSZ",
        perm: [2, 0, 1],
        signs: [1.0, 1.0, 1.0],
    },
    BlochTransform {
        label: "X",
        perm: [0, 1, 2],
        signs: [1.0, -1.0, -1.0],
    },
    BlochTransform {
        label: "SHXZ",
        perm: [1, 2, 0],
        signs: [1.0, -1.0, -1.0],
    },
    BlochTransform {
        label: "HS",
        perm: [2, 0, 1],
        signs: [1.0, -1.0, -1.0],
    },
    BlochTransform {
        label: "Z",
        perm: [0, 1, 2],
        signs: [-1.0, -1.0, 1.0],
    },
    BlochTransform {
        label: "SHX",
        perm: [1, 2, 0],
        signs: [-1.0, -1.0, 1.0],
    },
    BlochTransform {
        label: "HXSZ",
        perm: [2, 0, 1],
        signs: [-1.0, -1.0, 1.0],
    },
    BlochTransform {
        label: "Y",
        perm: [0, 1, 2],
        signs: [-1.0, 1.0, -1.0],
    },
    BlochTransform {
        label: "SHZ",
        perm: [1, 2, 0],
        signs: [-1.0, 1.0, -1.0],
    },
    BlochTransform {
        label: "HXS",
        perm: [2, 0, 1],
        signs: [-1.0, 1.0, -1.0],
    },
    BlochTransform {
        label: "SHS",
        perm: [0, 2, 1],
        signs: [1.0, 1.0, -1.0],
    },
    BlochTransform {
        label: "HZ",
        perm: [2, 1, 0],
        signs: [1.0, 1.0, -1.0],
    },
    BlochTransform {
        label: "XZS",
        perm: [1, 0, 2],
        signs: [1.0, 1.0, -1.0],
    },
    BlochTransform {
        label: "SHSX",
        perm: [0, 2, 1],
        signs: [1.0, -1.0, 1.0],
    },
    BlochTransform {
        label: "H",
        perm: [2, 1, 0],
        signs: [1.0, -1.0, 1.0],
    },
    BlochTransform {
        label: "ZS",
        perm: [1, 0, 2],
        signs: [1.0, -1.0, 1.0],
    },
    BlochTransform {
        label: "SHSZ",
        perm: [0, 2, 1],
        signs: [-1.0, 1.0, 1.0],
    },
    BlochTransform {
        label: "HX",
        perm: [2, 1, 0],
        signs: [-1.0, 1.0, 1.0],
    },
    BlochTransform {
        label: "S",
        perm: [1, 0, 2],
        signs: [-1.0, 1.0, 1.0],
    },
    BlochTransform {
        label: "SHSXZ",
        perm: [0, 2, 1],
        signs: [-1.0, -1.0, -1.0],
    },
    BlochTransform {
        label: "HY",
        perm: [2, 1, 0],
        signs: [-1.0, -1.0, -1.0],
    },
    BlochTransform {
        label: "XS",
        perm: [1, 0, 2],
        signs: [-1.0, -1.0, -1.0],
    },
];

/// Bloch vectors of the six pure qubit stabilizer states, in a fixed order.
pub const OCTAHEDRON_VERTICES: [BlochVector; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

/// Deduplicated Clifford orbit of a qubit state on the Bloch sphere
/// (between 1 and 24 vectors depending on symmetry).
pub fn clifford_orbit(rho: &ComplexMatrix) -> Result<Vec<BlochVector>> {
    let r = bloch_vector(rho)?;
    Ok(clifford_orbit_bloch(r))
}

pub fn clifford_orbit_bloch(r: BlochVector) -> Vec<BlochVector> {
    let mut out: Vec<BlochVector> = Vec::with_capacity(24);
    for t in &BLOCH_TRANSFORMS {
        let img = t.apply(r);
        if !out.iter().any(|q| {
            (q[0] - img[0]).abs() < 1e-9
                && (q[1] - img[1]).abs() < 1e-9
                && (q[2] - img[2]).abs() < 1e-9
        }) {
            out.push(img);
        }
    }
    out
}

/// The Theorem-2 feasibility system: a 4×31 matrix whose first 24 columns
/// are the orbit images (padded by repetition for symmetric states), the
/// next 6 the octahedron vertices, and a final slack column; a fourth
/// all-ones row encodes the convexity constraint with b extended by 1.
#[derive(Debug, Clone)]
pub struct InterconversionSystem {
    pub a: Vec<Vec<f64>>,
    pub b: [f64; 4],
    pub orbit: Vec<BlochVector>,
    pub stab_vertices: [BlochVector; 6],
}

pub fn build_interconversion_system(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
) -> Result<InterconversionSystem> {
    let orbit = clifford_orbit(rho)?;
    let target = bloch_vector(sigma)?;
    let mut columns: Vec<BlochVector> = Vec::with_capacity(31);
    for k in 0..24 {
        columns.push(orbit[k % orbit.len()]);
    }
    columns.extend_from_slice(&OCTAHEDRON_VERTICES);

    let mut a = vec![vec![0.0; 31]; 4];
    for (c, col) in columns.iter().enumerate() {
        for r in 0..3 {
            a[r][c] = col[r];
        }
        a[3][c] = 1.0;
    }
    // slack column (0,0,0,1): sub-convex mixtures are completed by the
    // zero-sum octahedron pairs, so feasibility is unchanged
    a[3][30] = 1.0;
    Ok(InterconversionSystem {
        a,
        b: [target[0], target[1], target[2], 1.0],
        orbit,
        stab_vertices: OCTAHEDRON_VERTICES,
    })
}

/// Decide ρ → σ under CSPOs by linear programming; infeasibility comes with
/// a Farkas certificate for the 4×31 system.
pub fn qubit_convertible(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<FeasibilityOutcome> {
    let system = build_interconversion_system(rho, sigma)?;
    lp_feasibility_with_certificate(&system.a, &system.b)
}

/// Reachable polytope of ρ: convex hull of its Clifford orbit and the
/// stabilizer octahedron.
pub fn reachable_hull(rho: &ComplexMatrix) -> Result<ConvexHull3> {
    let orbit = clifford_orbit(rho)?;
    let mut pts = orbit;
    pts.extend_from_slice(&OCTAHEDRON_VERTICES);
    ConvexHull3::build(&pts)
}

/// Geometric decision independent of the LP path: hull membership of the
/// target's Bloch vector within 1e-9.
pub fn geometric_convertible(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<bool> {
    let hull = reachable_hull(rho)?;
    let target = bloch_vector(sigma)?;
    Ok(hull.contains(target, 1e-9))
}

/// Map a Bloch vector into the canonical subset P_X (positive octant with
/// |r₁| ≤ |r₂|, |r₁| ≤ |r₃|), returning the canonical vector and the index
/// of the transformation used.
pub fn canonicalize_to_px(v: BlochVector) -> (BlochVector, usize) {
    for (i, t) in BLOCH_TRANSFORMS.iter().enumerate() {
        let img = t.apply(v);
        if img[0] >= -1e-12
            && img[1] >= -1e-12
            && img[2] >= -1e-12
            && img[0] <= img[1] + 1e-12
            && img[0] <= img[2] + 1e-12
        {
            return (img, i);
        }
    }
    unreachable!("the 24 rotations cover every symmetry cell of the octahedron")
}

/// The candidate facet sets covering P_X, one per possible polytope shape.
#[derive(Debug, Clone)]
pub struct FacetSet {
    pub possibility: u8,
    /// Vertex-index triples into [r₁..r₁₀] (1-based, as tabulated).
    pub facets: Vec<[usize; 3]>,
    /// Outward normals with offsets: v·p ≤ offset for hull members.
    pub normals: Vec<(BlochVector, f64)>,
}

/// Neighbour vectors r₁..r₁₀ used to assemble the candidate facets.
pub fn px_neighbour_vectors(r1: BlochVector) -> [BlochVector; 10] {
    let (x, y, z) = (r1[0], r1[1], r1[2]);
    [
        [x, y, z],
        [z, x, y],
        [y, z, x],
        [-x, z, y],
        [-y, x, z],
        [y, -x, z],
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0],
        [-z, y, x],
        [z, y, -x],
    ]
}

const POSSIBILITY_1: [[usize; 3]; 7] = [
    [1, 6, 7],
    [1, 7, 5],
    [1, 5, 4],
    [1, 4, 3],
    [1, 3, 2],
    [1, 2, 6],
    [3, 4, 8],
];
const POSSIBILITY_2: [[usize; 3]; 5] = [[1, 3, 2], [1, 2, 7], [1, 7, 4], [1, 4, 8], [1, 8, 3]];
const POSSIBILITY_3: [[usize; 3]; 7] = [
    [1, 10, 3],
    [1, 3, 2],
    [1, 2, 4],
    [1, 4, 9],
    [1, 9, 8],
    [1, 8, 10],
    [4, 2, 7],
];

/// All three candidate facet sets for a canonical vector in P_X. Which set
/// matches the actual hull depends on the location of r₁; callers compare
/// against [`reachable_hull`].
pub fn facet_sets(r1: BlochVector) -> [FacetSet; 3] {
    let vs = px_neighbour_vectors(r1);
    let build = |possibility: u8, triples: &[[usize; 3]]| -> FacetSet {
        let normals = triples
            .iter()
            .map(|t| {
                let a = vs[t[0] - 1];
                let b = vs[t[1] - 1];
                let c = vs[t[2] - 1];
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let w = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let mut n = [
                    u[1] * w[2] - u[2] * w[1],
                    u[2] * w[0] - u[0] * w[2],
                    u[0] * w[1] - u[1] * w[0],
                ];
                let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                if len < 1e-12 {
                    return ([0.0, 0.0, 0.0], 0.0);
                }
                for v in n.iter_mut() {
                    *v /= len;
                }
                let mut offset = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
                // outward means away from the origin (always interior)
                if offset < 0.0 {
                    n = [-n[0], -n[1], -n[2]];
                    offset = -offset;
                }
                (n, offset)
            })
            .collect();
        FacetSet {
            possibility,
            facets: triples.to_vec(),
            normals,
        }
    };
    [
        build(1, &POSSIBILITY_1),
        build(2, &POSSIBILITY_2),
        build(3, &POSSIBILITY_3),
    ]
}

/// Interconversion distance d(ρ → σ): half the Euclidean distance from the
/// target's Bloch vector to the reachable polytope (trace preservation
/// removes the trace part of the norm, so the qubit trace-norm objective
/// reduces to the Bloch gap).
pub fn interconversion_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let hull = reachable_hull(rho)?;
    let target = bloch_vector(sigma)?;
    Ok(hull.distance(target) / 2.0)
}
