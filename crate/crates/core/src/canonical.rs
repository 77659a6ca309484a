//! Canonical JSON serialization and content digests.
//!
//! Every file the toolkit writes goes through [`to_canonical_json`]: struct
//! keys in declaration order, maps ordered (all persisted maps are
//! `BTreeMap`s), two-space indent, LF newlines and a trailing newline.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Serializes `value` in the canonical form used for every persisted file.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("in-memory values always serialize");
    out.push('\n');
    out
}

/// Short content digest: the first 8 bytes of SHA-256, hex encoded.
pub fn digest_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..8])
}
