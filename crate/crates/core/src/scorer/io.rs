//! Binary model file.
//!
//! ```text
//! offset  size   field
//! 0       4      magic "IGSM"
//! 4       4      format version, u32 LE (currently 1)
//! 8       4      hidden width H, u32 LE
//! 12      4      config length L, u32 LE
//! 16      L      training config, UTF-8 JSON
//! 16+L    8      parameter count P, u64 LE
//! 24+L    8·P    parameters, f64 LE, in ScorerModel::blocks order
//! 24+L+8P 4      CRC-32 (IEEE) of all preceding bytes, u32 LE
//! ```

use std::path::Path;

use super::model::ScorerModel;
use super::train::TrainConfig;

pub const MAGIC: &[u8; 4] = b"IGSM";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot access model file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("not a scorer model file (bad magic)")]
    BadMagic,
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model file: {0}")]
    Corrupt(String),
}

pub fn to_bytes(model: &ScorerModel, config: &TrainConfig) -> Vec<u8> {
    let cfg = serde_json::to_vec(config).expect("config serializes");
    let params = model.params();
    let mut out = Vec::with_capacity(28 + cfg.len() + 8 * params.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(model.hidden() as u32).to_le_bytes());
    out.extend_from_slice(&(cfg.len() as u32).to_le_bytes());
    out.extend_from_slice(&cfg);
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for p in params {
        out.extend_from_slice(&p.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], ModelError> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| ModelError::Corrupt(format!("truncated while reading {what}")))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &str) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<(ScorerModel, TrainConfig), ModelError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(ModelError::BadMagic);
    }
    let mut r = Reader { bytes, at: 4 };
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(ModelError::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    let hidden = r.u32("hidden width")? as usize;
    let cfg_len = r.u32("config length")? as usize;
    let cfg = r.take(cfg_len, "config")?;
    let count = r.u64("parameter count")?;
    let expected = ScorerModel::param_count(hidden.max(1)) as u64;
    if hidden == 0 || count != expected {
        return Err(ModelError::Corrupt(format!("{count} parameters for hidden width {hidden}")));
    }
    let raw = r.take(8 * count as usize, "parameters")?;
    let body_end = r.at;
    let crc = r.u32("checksum")?;
    if r.at != bytes.len() {
        return Err(ModelError::Corrupt(format!("{} trailing bytes", bytes.len() - r.at)));
    }
    if crc32fast::hash(&bytes[..body_end]) != crc {
        return Err(ModelError::Corrupt("checksum mismatch".into()));
    }
    let config: TrainConfig =
        serde_json::from_slice(cfg).map_err(|e| ModelError::Corrupt(format!("config: {e}")))?;
    let params: Vec<f64> = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let model = ScorerModel::from_params(hidden, params).expect("length checked");
    if !model.is_finite() {
        return Err(ModelError::Corrupt("non-finite parameter".into()));
    }
    Ok((model, config))
}

pub fn save_model(model: &ScorerModel, config: &TrainConfig, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    std::fs::write(path, to_bytes(model, config))
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })
}

pub fn load_model_with_config(path: impl AsRef<Path>) -> Result<(ScorerModel, TrainConfig), ModelError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    from_bytes(&bytes)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ScorerModel, ModelError> {
    load_model_with_config(path).map(|(m, _)| m)
}
