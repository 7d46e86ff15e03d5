use sha2::{Digest, Sha256};

/// Per-cell RNG seed: the first 8 bytes (little-endian) of
/// `SHA-256(master_seed ‖ alpha bits ‖ image_name)`.
pub fn derive_seed(master_seed: u64, image_name: &str, alpha: f64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(alpha.to_bits().to_le_bytes());
    hasher.update(image_name.as_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}
