//! Reads a wheel's `*.dist-info/top_level.txt`.

use std::collections::BTreeSet;
use std::io::{Cursor, Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use zip::ZipArchive;

#[derive(Debug, Error)]
pub enum WheelError {
    #[error("not a readable zip archive: {0}")]
    Zip(#[from] zip::result::ZipError),
    #[error("failed to read {entry}: {source}")]
    Read {
        entry: String,
        source: std::io::Error,
    },
    #[error("archive has no *.dist-info directory")]
    NoDistInfo,
    #[error("archive has several *.dist-info directories: {0:?}")]
    MultipleDistInfo(Vec<String>),
    #[error("cannot split {0:?} into name and version")]
    BadDistInfoName(String),
    #[error("invalid resource name {0:?} in top_level.txt")]
    BadResource(String),
}

/// Name, version and top-level resources of one distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WheelMetadataRecord {
    pub name: String,
    pub version: String,
    #[serde(default)]
    pub top_level: Vec<String>,
}

pub fn parse_wheel_toplevel(archive: &[u8]) -> Result<WheelMetadataRecord, WheelError> {
    let mut zip = ZipArchive::new(Cursor::new(archive))?;

    let dist_infos: BTreeSet<String> = zip
        .file_names()
        .filter_map(|name| {
            let first = name.split('/').next()?;
            (first.ends_with(".dist-info") && name.len() > first.len()).then(|| first.to_string())
        })
        .collect();
    let dist_info = match dist_infos.len() {
        0 => return Err(WheelError::NoDistInfo),
        1 => dist_infos.into_iter().next().unwrap(),
        _ => {
            return Err(WheelError::MultipleDistInfo(
                dist_infos.into_iter().collect(),
            ))
        }
    };
    let stem = dist_info.trim_end_matches(".dist-info");
    let (name, version) =
        split_name_version(stem).ok_or_else(|| WheelError::BadDistInfoName(dist_info.clone()))?;

    let entry = format!("{dist_info}/top_level.txt");
    let mut top_level = Vec::new();
    // wheels without top_level.txt are legal and export nothing we can see
    if let Ok(mut file) = zip.by_name(&entry) {
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)
            .map_err(|source| WheelError::Read {
                entry: entry.clone(),
                source,
            })?;
        let text = String::from_utf8_lossy(&bytes);
        for line in text.lines() {
            let resource = line.trim();
            if resource.is_empty() {
                continue;
            }
            if resource.chars().any(char::is_whitespace) {
                return Err(WheelError::BadResource(resource.to_string()));
            }
            if !top_level.iter().any(|r| r == resource) {
                top_level.push(resource.to_string());
            }
        }
    }

    Ok(WheelMetadataRecord {
        name,
        version,
        top_level,
    })
}

fn looks_like_version(segment: &str) -> bool {
    segment.starts_with(|c: char| c.is_ascii_digit())
        && segment
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '!' | '+' | '_'))
}

/// Splits `{name}-{version}` at the last dash-separated segment that looks
/// like a version.
fn split_name_version(stem: &str) -> Option<(String, String)> {
    let segments: Vec<&str> = stem.split('-').collect();
    let idx = (1..segments.len())
        .rev()
        .find(|&i| looks_like_version(segments[i]))?;
    let name = segments[..idx].join("-");
    if name.is_empty() {
        return None;
    }
    Some((name, segments[idx..].join("-")))
}
