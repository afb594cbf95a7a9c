//! Append-only JSONL result cache.
//!
//! Each line is `{"key": .., "checksum": .., "record": ..}` where `record` is
//! the exact output text and `checksum` its SHA-256. Lines that fail to parse
//! or whose checksum does not match are ignored.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Serialize, Deserialize)]
struct Line {
    key: String,
    checksum: String,
    record: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Stable key for a canonical JSON value. `serde_json` maps keep keys sorted,
/// so the compact serialization is canonical.
pub fn cache_key(canonical: &Value) -> String {
    sha256_hex(canonical.to_string().as_bytes())
}

pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn new(path: impl AsRef<Path>) -> Self {
        Cache {
            path: path.as_ref().to_path_buf(),
        }
    }

    pub fn get(&self, key: &str) -> std::io::Result<Option<String>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        file.lock_shared()?;
        let mut found = None;
        for line in BufReader::new(&file).lines() {
            let Ok(line) = line else { continue };
            let Ok(entry) = serde_json::from_str::<Line>(&line) else {
                continue;
            };
            if entry.key == key && sha256_hex(entry.record.as_bytes()) == entry.checksum {
                found = Some(entry.record);
                break;
            }
        }
        file.unlock()?;
        Ok(found)
    }

    pub fn put(&self, key: &str, record: &str) -> std::io::Result<()> {
        let line = Line {
            key: key.to_string(),
            checksum: sha256_hex(record.as_bytes()),
            record: record.to_string(),
        };
        let mut text = serde_json::to_string(&line).map_err(std::io::Error::other)?;
        text.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.lock()?;
        let written = file.write_all(text.as_bytes()).and_then(|_| file.flush());
        file.unlock()?;
        written
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn temp(name: &str) -> PathBuf {
        let p = std::env::temp_dir().join(format!("qpz-cache-{}-{name}.jsonl", std::process::id()));
        std::fs::remove_file(&p).ok();
        p
    }

    #[test]
    fn round_trip_and_miss() {
        let path = temp("rt");
        let cache = Cache::new(&path);
        assert_eq!(cache.get("k").unwrap(), None);
        cache.put("k", "{\"x\":\"1.5\"}").unwrap();
        cache.put("other", "{}").unwrap();
        assert_eq!(cache.get("k").unwrap().as_deref(), Some("{\"x\":\"1.5\"}"));
        assert_eq!(cache.get("missing").unwrap(), None);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn corrupted_lines_are_misses() {
        let path = temp("corrupt");
        let cache = Cache::new(&path);
        cache.put("k", "{\"x\":\"1.5\"}").unwrap();
        let text = std::fs::read_to_string(&path).unwrap().replace("1.5", "2.5");
        std::fs::write(&path, format!("not json\n{text}")).unwrap();
        assert_eq!(cache.get("k").unwrap(), None);
        cache.put("k", "{\"x\":\"1.5\"}").unwrap();
        assert_eq!(cache.get("k").unwrap().as_deref(), Some("{\"x\":\"1.5\"}"));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn key_ignores_construction_order() {
        let a = json!({"command": "zeta", "params": {"k": 2, "N": 3}});
        let b = json!({"params": {"N": 3, "k": 2}, "command": "zeta"});
        assert_eq!(cache_key(&a), cache_key(&b));
        assert_ne!(cache_key(&a), cache_key(&json!({"command": "zeta"})));
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
