//! Field dump format: a JSON sidecar header next to a flat little-endian
//! binary payload. `<base>.json` describes `<base>.bin`; the loader validates
//! the payload size against `N^n · 8` bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::field::{GridSpec, ScalarField};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    pub label: String,
    pub byte_order: String,
    pub dtype: String,
}

/// Write `<base>.json` + `<base>.bin`.
pub fn dump_field(field: &ScalarField, base: &Path) -> Result<()> {
    let header = FieldHeader {
        n: field.spec().dim(),
        points: field.spec().points(),
        label: field.label().to_string(),
        byte_order: "little".to_string(),
        dtype: "f64".to_string(),
    };
    let json = serde_json::to_string_pretty(&header)?;
    fs::write(base.with_extension("json"), json)?;
    let mut bytes = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(base.with_extension("bin"), bytes)?;
    Ok(())
}

/// Load a field dumped by [`dump_field`]; `base` may carry either extension
/// or none.
pub fn load_field(base: &Path) -> Result<ScalarField> {
    let json_path = base.with_extension("json");
    let bin_path = base.with_extension("bin");
    let header: FieldHeader = serde_json::from_str(&fs::read_to_string(&json_path)?)?;
    if header.dtype != "f64" {
        return Err(Error::Serde(format!("unsupported dtype {}", header.dtype)));
    }
    if header.byte_order != "little" {
        return Err(Error::Serde(format!("unsupported byte order {}", header.byte_order)));
    }
    let spec = GridSpec::new(header.n, header.points)?;
    let bytes = fs::read(&bin_path)?;
    let expect = spec.len() * 8;
    if bytes.len() != expect {
        return Err(Error::Serde(format!(
            "payload {} has {} bytes, header implies {}",
            bin_path.display(),
            bytes.len(),
            expect
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_values(spec, &header.label, values)
}
