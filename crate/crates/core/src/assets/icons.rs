use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::statement::SegmentedStatement;

pub const FALLBACK_ICON: &str = "generic_person";

const BUNDLED_KEYWORDS: &str = include_str!("../../../../data/icons/keywords.json");
const BUNDLED_ASSETS: &str = include_str!("../../../../data/icons/assets.json");

/// A vector icon. `path_data` is SVG path syntax in a box normalized to unit
/// height, i.e. spanning `[0, aspect_ratio] × [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IconAsset {
    pub name: String,
    pub aspect_ratio: f64,
    pub path_data: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeywordEntry {
    pub keyword: String,
    pub icon_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssetRecord {
    aspect_ratio: f64,
    path_data: String,
}

#[derive(Debug, thiserror::Error)]
pub enum IconError {
    #[error("cannot read icon file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed icon file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("keyword `{keyword}` refers to unknown icon `{icon}`")]
    UnknownIcon { keyword: String, icon: String },
    #[error("icon `{0}` needs a positive aspect ratio and non-empty path")]
    BadAsset(String),
    #[error("icon set lacks the `{FALLBACK_ICON}` fallback")]
    NoFallback,
}

/// Keyword table plus icon assets. Table order is lookup priority.
#[derive(Debug, Clone)]
pub struct IconLibrary {
    keywords: Vec<KeywordEntry>,
    assets: BTreeMap<String, AssetRecord>,
}

impl IconLibrary {
    pub fn from_json(keywords: &str, assets: &str) -> Result<Self, IconError> {
        let keywords: Vec<KeywordEntry> = serde_json::from_str(keywords)?;
        let assets: BTreeMap<String, AssetRecord> = serde_json::from_str(assets)?;
        for (name, a) in &assets {
            if !(a.aspect_ratio.is_finite() && a.aspect_ratio > 0.0) || a.path_data.trim().is_empty() {
                return Err(IconError::BadAsset(name.clone()));
            }
        }
        if !assets.contains_key(FALLBACK_ICON) {
            return Err(IconError::NoFallback);
        }
        if let Some(k) = keywords.iter().find(|k| !assets.contains_key(&k.icon_name)) {
            return Err(IconError::UnknownIcon { keyword: k.keyword.clone(), icon: k.icon_name.clone() });
        }
        Ok(IconLibrary { keywords, assets })
    }

    pub fn from_files(keywords: impl AsRef<Path>, assets: impl AsRef<Path>) -> Result<Self, IconError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| IconError::Io { path: p.display().to_string(), source })
        };
        IconLibrary::from_json(&read(keywords.as_ref())?, &read(assets.as_ref())?)
    }

    pub fn bundled() -> &'static IconLibrary {
        static LIB: std::sync::LazyLock<IconLibrary> = std::sync::LazyLock::new(|| {
            IconLibrary::from_json(BUNDLED_KEYWORDS, BUNDLED_ASSETS).expect("bundled icon set is valid")
        });
        &LIB
    }

    pub fn keywords(&self) -> &[KeywordEntry] {
        &self.keywords
    }

    pub fn get(&self, name: &str) -> Option<IconAsset> {
        self.assets.get(name).map(|a| IconAsset {
            name: name.to_string(),
            aspect_ratio: a.aspect_ratio,
            path_data: a.path_data.clone(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.assets.keys().map(String::as_str)
    }

    pub fn fallback(&self) -> IconAsset {
        self.get(FALLBACK_ICON).expect("checked at construction")
    }

    /// First table keyword (in table order) that appears as a word, or its
    /// plural, in the after and before segments; the fallback otherwise.
    pub fn lookup_icon(&self, s: &SegmentedStatement) -> IconAsset {
        let text = format!("{} {}", s.after.as_deref().unwrap_or(""), s.before.as_deref().unwrap_or(""));
        let words: Vec<String> = text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        let hit = self.keywords.iter().find(|k| {
            let kw = k.keyword.to_lowercase();
            words.iter().any(|w| {
                w == &kw || w.strip_suffix('s') == Some(kw.as_str()) || w.strip_suffix("es") == Some(kw.as_str())
            })
        });
        hit.and_then(|k| self.get(&k.icon_name)).unwrap_or_else(|| self.fallback())
    }
}
