//! Content digests over canonical JSON.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// SHA-256 hex digest of the JSON encoding of `value`. Maps and sets in this
/// crate are ordered, so the encoding is canonical.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("in-memory values always serialize");
    format!("{:x}", Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_stable_and_distinct() {
        assert_eq!(digest(&[1, 2]), digest(&[1, 2]));
        assert_ne!(digest(&[1, 2]), digest(&[2, 1]));
        assert_eq!(digest("x").len(), 64);
    }
}
