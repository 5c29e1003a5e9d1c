use super::path::{combined_hash, PathHash, PropagationPath};
use crate::geometry::Vec3;

/// One Tx-leg × Rx-leg combination through a common image-domain point.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefrontPair {
    pub tx_leg: PropagationPath,
    pub rx_leg: PropagationPath,
    pub combined_hash: PathHash,
    /// 1 when the co-polar signs of the legs differ (π phase), else 0.
    pub delta: u8,
    /// Sum of both leg lengths, meters.
    pub phase_length: f64,
}

impl WavefrontPair {
    /// `e^{jπδ}` as a real sign.
    pub fn half_wave_sign(&self) -> f64 {
        if self.delta == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Cartesian product of Tx and Rx legs; pairs with a cross-polarized leg
/// are left out.
pub fn pair_wavefronts(tx_paths: &[PropagationPath], rx_paths: &[PropagationPath], copol: &Vec3) -> Vec<WavefrontPair> {
    let tx: Vec<_> = tx_paths
        .iter()
        .filter_map(|p| p.pol_sign(copol).ok().map(|s| (p, s)))
        .collect();
    let rx: Vec<_> = rx_paths
        .iter()
        .filter_map(|p| p.pol_sign(copol).ok().map(|s| (p, s)))
        .collect();
    let mut pairs = Vec::with_capacity(tx.len() * rx.len());
    for (t, ts) in &tx {
        for (r, rs) in &rx {
            debug_assert!((t.endpoint_a - r.endpoint_a).norm() < 1e-12);
            pairs.push(WavefrontPair {
                tx_leg: (*t).clone(),
                rx_leg: (*r).clone(),
                combined_hash: combined_hash(&t.interaction_sequence, &r.interaction_sequence),
                delta: u8::from(ts.product(*rs) != super::PolSign::Plus),
                phase_length: t.total_length + r.total_length,
            });
        }
    }
    pairs
}
