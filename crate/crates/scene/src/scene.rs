//! Exact synthetic two-view scenes with ground-truth essential matrices.
//!
//! Rotations come from integer quaternions with odd norm, so the rotation
//! matrix is an integer matrix divided by a 2-adic unit and every projection
//! stays inside the 2-adic integers. The first camera is `[I | 0]`, the
//! second `[M | qq t] / qq`; a homogeneous point `(X, w)` projects to `X` and
//! `M X + qq w t`, and the pair annihilates `skew(t) M` exactly over the
//! integers.

use dyadic_core::pose::{Correspondence, PoseError, ResidueMat3};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A matched pair of integer homogeneous image points `(u, v)`.
pub type ImagePair = ([BigInt; 3], [BigInt; 3]);

/// A projective camera with rational entries whose common denominator is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CameraMatrix {
    numerator: [[i64; 4]; 3],
    denominator: i64,
}

impl CameraMatrix {
    /// # Panics
    ///
    /// Panics if the denominator is even or the matrix does not have rank 3.
    pub fn new(numerator: [[i64; 4]; 3], denominator: i64) -> Self {
        assert!(denominator % 2 != 0, "denominator must be a 2-adic unit");
        let cam = Self {
            numerator,
            denominator,
        };
        assert!(cam.has_rank_3(), "camera matrix must have rank 3");
        cam
    }

    fn has_rank_3(&self) -> bool {
        // some 3x3 minor of the numerator must be nonzero
        (0..4).any(|drop| {
            let cols: Vec<usize> = (0..4).filter(|&c| c != drop).collect();
            let m = |r: usize, c: usize| i128::from(self.numerator[r][cols[c]]);
            let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
            det != 0
        })
    }

    pub fn numerator(&self) -> &[[i64; 4]; 3] {
        &self.numerator
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// Projects a homogeneous 3D point, dropping the odd denominator (a unit
    /// scale that does not move the projective point).
    pub fn project(&self, point: &[i64; 4]) -> [BigInt; 3] {
        let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (r, row) in self.numerator.iter().enumerate() {
            let mut acc = 0i128;
            for (entry, coord) in row.iter().zip(point) {
                acc += i128::from(*entry) * i128::from(*coord);
            }
            out[r] = BigInt::from(acc);
        }
        out
    }
}

/// Generation parameters: how many points, and the coordinate box.
#[derive(Debug, Clone, Copy)]
pub struct SceneParams {
    pub points: usize,
    pub coordinate_bound: i64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            points: 8,
            coordinate_bound: 64,
        }
    }
}

/// An exact two-view scene: cameras, 3D points, correspondences, and the
/// ground-truth essential matrix as an integer numerator over an odd
/// denominator.
#[derive(Debug, Clone)]
pub struct Scene {
    pub seed: u64,
    pub quaternion: [i64; 4],
    pub translation: [i64; 3],
    pub camera_first: CameraMatrix,
    pub camera_second: CameraMatrix,
    /// Homogeneous integer 3D points `(X, w)`.
    pub points: Vec<[i64; 4]>,
    /// `skew(t) . M(q)`, the essential matrix numerator; the true matrix is
    /// this divided by the odd quaternion norm.
    pub e_numerator: [i64; 9],
    pub denominator: i64,
    /// Exact image pairs `(u, v)` with `u^T E v = 0`; `u` lives in the
    /// second (moving) image, `v` in the first.
    pub correspondences: Vec<ImagePair>,
}

fn quaternion_rotation_numerator(q: [i64; 4]) -> [[i64; 3]; 3] {
    let [w, x, y, z] = q;
    [
        [
            w * w + x * x - y * y - z * z,
            2 * (x * y - w * z),
            2 * (x * z + w * y),
        ],
        [
            2 * (x * y + w * z),
            w * w - x * x + y * y - z * z,
            2 * (y * z - w * x),
        ],
        [
            2 * (x * z - w * y),
            2 * (y * z + w * x),
            w * w - x * x - y * y + z * z,
        ],
    ]
}

fn skew(t: [i64; 3]) -> [[i64; 3]; 3] {
    [[0, -t[2], t[1]], [t[2], 0, -t[0]], [-t[1], t[0], 0]]
}

fn matmul3(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut out = [[0i64; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = (0..3).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

/// Deterministic scene generation from a seed.
///
/// Points are resampled until both projections have an odd coordinate, so
/// every homogeneous scale in the output is odd and every image point is a
/// valid 2-adic projective point.
pub fn gen_scene(seed: u64, params: &SceneParams) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let quaternion = loop {
        let q: [i64; 4] = [
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
        ];
        let norm: i64 = q.iter().map(|c| c * c).sum();
        if norm % 2 == 1 {
            break q;
        }
    };
    let norm: i64 = quaternion.iter().map(|c| c * c).sum();
    let rotation = quaternion_rotation_numerator(quaternion);

    let translation = loop {
        let t: [i64; 3] = [
            rng.gen_range(-8..=8),
            rng.gen_range(-8..=8),
            rng.gen_range(-8..=8),
        ];
        if t.iter().any(|c| c % 2 != 0) {
            break t;
        }
    };

    let e_matrix = matmul3(&skew(translation), &rotation);
    let e_numerator: [i64; 9] = [
        e_matrix[0][0],
        e_matrix[0][1],
        e_matrix[0][2],
        e_matrix[1][0],
        e_matrix[1][1],
        e_matrix[1][2],
        e_matrix[2][0],
        e_matrix[2][1],
        e_matrix[2][2],
    ];

    let camera_first = CameraMatrix::new([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], 1);
    let mut second = [[0i64; 4]; 3];
    for r in 0..3 {
        for c in 0..3 {
            second[r][c] = rotation[r][c];
        }
        second[r][3] = norm * translation[r];
    }
    let camera_second = CameraMatrix::new(second, norm);

    // Both projections reduce modulo 2 to functions of the point's parity
    // class (X mod 2, w mod 2) alone, and only a handful of classes give
    // unit-normalizable pairs. Cycling through the usable classes instead of
    // sampling them blindly keeps the epipolar rows spread out modulo 2,
    // which is what the rank hypotheses of the solvers feed on.
    let t_parity: Vec<i64> = translation.iter().map(|c| c.rem_euclid(2)).collect();
    let mut classes: Vec<([i64; 3], i64)> = Vec::new();
    for xp in 0..2i64 {
        for yp in 0..2i64 {
            for zp in 0..2i64 {
                for wp in 0..2i64 {
                    let x_par = [xp, yp, zp];
                    if x_par == [0, 0, 0] {
                        continue;
                    }
                    // second projection is congruent to X + w t modulo 2
                    let u_par: Vec<i64> = (0..3)
                        .map(|i| (x_par[i] + wp * t_parity[i]).rem_euclid(2))
                        .collect();
                    if u_par == [0, 0, 0] {
                        continue;
                    }
                    classes.push((x_par, wp));
                }
            }
        }
    }

    let bound = params.coordinate_bound;
    let mut points = Vec::with_capacity(params.points);
    let mut correspondences = Vec::with_capacity(params.points);
    let mut order: Vec<usize> = Vec::new();
    while points.len() < params.points {
        if order.is_empty() {
            order = (0..classes.len()).collect();
            // Fisher-Yates with the scene RNG keeps generation deterministic
            for i in (1..order.len()).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
        }
        let (x_par, w_par) = classes[order.pop().expect("refilled above")];
        let half = (bound / 2).max(1);
        let point = [
            x_par[0] + 2 * rng.gen_range(-half..=half),
            x_par[1] + 2 * rng.gen_range(-half..=half),
            x_par[2] + 2 * rng.gen_range(-half..=half),
            w_par + 2 * rng.gen_range(0..=1),
        ];
        let v = camera_first.project(&point);
        let u = camera_second.project(&point);
        let odd = |p: &[BigInt; 3]| p.iter().any(|c| !(c % BigInt::from(2)).is_zero());
        debug_assert!(
            odd(&v) && odd(&u),
            "class selection keeps projections primitive"
        );
        if correspondences.iter().any(|(a, b)| a == &u && b == &v) {
            continue;
        }
        // the defining identity, exactly over the integers
        debug_assert!(epipolar_product(&u, &e_numerator, &v).is_zero());
        points.push(point);
        correspondences.push((u, v));
    }

    Scene {
        seed,
        quaternion,
        translation,
        camera_first,
        camera_second,
        points,
        e_numerator,
        denominator: norm,
        correspondences,
    }
}

/// `u^T E v` over the integers.
pub fn epipolar_product(u: &[BigInt; 3], e: &[i64; 9], v: &[BigInt; 3]) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc += &u[i] * e[3 * i + j] * &v[j];
        }
    }
    acc
}

impl Scene {
    /// The ground-truth numerator reduced to residues.
    pub fn e_reference(&self, precision: u32) -> ResidueMat3 {
        ResidueMat3::from_integers(&self.e_numerator, precision)
    }

    /// The first `count` correspondences reduced modulo `2^precision`.
    pub fn correspondences_at(
        &self,
        count: usize,
        precision: u32,
    ) -> Result<Vec<Correspondence>, PoseError> {
        assert!(
            count <= self.correspondences.len(),
            "not enough points generated"
        );
        self.correspondences[..count]
            .iter()
            .map(|(u, v)| Correspondence::from_integers(u, v, precision))
            .collect()
    }
}
