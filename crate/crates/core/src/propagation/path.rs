use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::geometry::{SurfaceId, Vec3};

pub type Vertices = SmallVec<[Vec3; 4]>;
pub type Sequence = SmallVec<[SurfaceId; 4]>;

/// Integer wavefront identifier derived from an interaction sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathHash(pub u64);

impl fmt::Display for PathHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

const HASH_SEED: u64 = 0x9E37_79B9_7F4A_7C15;
/// Token between the Tx and Rx halves of a combined sequence. Surface ids
/// are `u32`, so this can never collide with one.
const LEG_SEPARATOR: u64 = u64::MAX;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive 64-bit hash of a token stream; the empty stream maps to 0
/// and no non-empty stream does.
fn hash_tokens(tokens: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = HASH_SEED;
    let mut empty = true;
    for t in tokens {
        empty = false;
        h = splitmix(h.rotate_left(23) ^ splitmix(t.wrapping_add(HASH_SEED)));
    }
    match (empty, h) {
        (true, _) => 0,
        (false, 0) => 1,
        (false, h) => h,
    }
}

/// Hash of an ordered sequence of surface interactions. `[]` (line of sight) is 0.
pub fn path_hash(sequence: &[SurfaceId]) -> PathHash {
    PathHash(hash_tokens(sequence.iter().map(|s| u64::from(s.0))))
}

/// Identity of a full Tx → point → Rx wavefront: Tx sequence, separator,
/// then the Rx sequence reversed (so the whole chain reads Tx to Rx).
pub fn combined_hash(tx_sequence: &[SurfaceId], rx_sequence: &[SurfaceId]) -> PathHash {
    let tx = tx_sequence.iter().map(|s| u64::from(s.0));
    let rx = rx_sequence.iter().rev().map(|s| u64::from(s.0));
    PathHash(hash_tokens(tx.chain(std::iter::once(LEG_SEPARATOR)).chain(rx)))
}

/// One geometrical-optics leg between an image-domain point (`endpoint_a`)
/// and an antenna (`endpoint_b`).
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationPath {
    pub endpoint_a: Vec3,
    pub endpoint_b: Vec3,
    /// Bounce points, ordered from `endpoint_a` to `endpoint_b`.
    pub vertices: Vertices,
    /// Unit surface normal at each bounce.
    pub normals: Vertices,
    pub interaction_sequence: Sequence,
    pub total_length: f64,
    pub hash: PathHash,
}

impl PropagationPath {
    pub fn line_of_sight(a: Vec3, b: Vec3) -> Self {
        Self {
            endpoint_a: a,
            endpoint_b: b,
            vertices: Vertices::new(),
            normals: Vertices::new(),
            interaction_sequence: Sequence::new(),
            total_length: (b - a).norm(),
            hash: PathHash(0),
        }
    }

    /// Builds a path from its bounce chain; the length is the sum of the
    /// segment lengths.
    pub fn from_chain(a: Vec3, b: Vec3, vertices: Vertices, normals: Vertices, interaction_sequence: Sequence) -> Self {
        debug_assert_eq!(vertices.len(), interaction_sequence.len());
        debug_assert_eq!(normals.len(), interaction_sequence.len());
        let mut path = Self {
            endpoint_a: a,
            endpoint_b: b,
            vertices,
            normals,
            hash: path_hash(&interaction_sequence),
            interaction_sequence,
            total_length: 0.0,
        };
        path.total_length = path.segments().map(|(p, q)| (q - p).norm()).sum();
        path
    }

    /// Number of reflections.
    pub fn order(&self) -> usize {
        self.interaction_sequence.len()
    }

    pub fn is_line_of_sight(&self) -> bool {
        self.interaction_sequence.is_empty()
    }

    /// Consecutive polyline segments from `endpoint_a` to `endpoint_b`.
    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        let points: SmallVec<[Vec3; 6]> = std::iter::once(self.endpoint_a)
            .chain(self.vertices.iter().copied())
            .chain(std::iter::once(self.endpoint_b))
            .collect();
        (0..points.len() - 1).map(move |i| (points[i], points[i + 1]))
    }

    /// Unit direction of the first segment, leaving `endpoint_a`.
    pub fn first_direction(&self) -> Vec3 {
        let next = self.vertices.first().copied().unwrap_or(self.endpoint_b);
        (next - self.endpoint_a).normalize()
    }

    /// Unit direction of the last segment, arriving at `endpoint_b`.
    pub fn last_direction(&self) -> Vec3 {
        let prev = self.vertices.last().copied().unwrap_or(self.endpoint_a);
        (self.endpoint_b - prev).normalize()
    }

    /// Position of the mirror image of `endpoint_a` seen from `endpoint_b`
    /// along the unfolded path.
    pub fn unfolded_source(&self) -> Vec3 {
        self.endpoint_b - self.total_length * self.last_direction()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn ids(v: &[u32]) -> Vec<SurfaceId> {
        v.iter().copied().map(SurfaceId).collect()
    }

    #[test]
    fn hash_examples() {
        assert_eq!(path_hash(&[]), PathHash(0));
        assert_ne!(path_hash(&ids(&[3])), path_hash(&ids(&[7])));
        assert_ne!(path_hash(&ids(&[3, 7])), path_hash(&ids(&[7, 3])));
    }

    #[test]
    fn no_collisions_on_short_sequences() {
        let mut seen = HashSet::new();
        let mut count = 0;
        seen.insert(path_hash(&[]));
        for a in 0..22u32 {
            seen.insert(path_hash(&ids(&[a])));
            for b in 0..22u32 {
                seen.insert(path_hash(&ids(&[a, b])));
                for c in 0..20u32 {
                    seen.insert(path_hash(&ids(&[a, b, c])));
                    count += 1;
                }
            }
        }
        // 1 + 22 + 484 + 9680 distinct sequences
        assert_eq!(seen.len(), 1 + 22 + 484 + count);
    }

    #[test]
    fn combined_hash_separates_legs() {
        let a = combined_hash(&ids(&[1]), &ids(&[]));
        let b = combined_hash(&ids(&[]), &ids(&[1]));
        assert_ne!(a, b);
        assert_ne!(combined_hash(&[], &[]), PathHash(0));
        assert_eq!(
            combined_hash(&ids(&[1, 2]), &ids(&[4, 3])),
            combined_hash(&ids(&[1, 2]), &ids(&[4, 3]))
        );
    }

    #[test]
    fn chain_length_is_segment_sum() {
        let path = PropagationPath::from_chain(
            Vec3::new(0.0, 0.0, 0.7),
            Vec3::new(0.8, 0.0, 0.7),
            [Vec3::new(0.4, 0.0, 0.0)].into_iter().collect(),
            [Vec3::z()].into_iter().collect(),
            ids(&[0]).into_iter().collect(),
        );
        let expected = 2.0 * (0.4f64 * 0.4 + 0.7 * 0.7).sqrt();
        assert!((path.total_length - expected).abs() < 1e-15);
        assert!((path.unfolded_source() - Vec3::new(0.0, 0.0, -0.7)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn reversed_sequence_hash_differs(seq in proptest::collection::vec(0u32..50, 0..6)) {
            let rev: Vec<u32> = seq.iter().rev().copied().collect();
            prop_assume!(rev != seq);
            prop_assert_ne!(path_hash(&ids(&seq)), path_hash(&ids(&rev)));
        }
    }
}
