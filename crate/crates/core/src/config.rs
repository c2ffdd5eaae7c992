use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use regex::Regex;

use crate::error::{Error, Result};

/// A pattern that must span whole `/`-delimited segments of a package path:
/// the raw regex is compiled between slash sentinels, so `entity` matches
/// `/com/x/entity/` but not `/com/x/entitys/`. Misspelled package names fall
/// outside the naming convention on purpose.
#[derive(Debug, Clone)]
pub struct SegmentPattern {
    raw: String,
    compiled: Regex,
}

impl SegmentPattern {
    pub fn new(raw: &str) -> std::result::Result<Self, regex::Error> {
        Ok(SegmentPattern {
            raw: raw.to_string(),
            compiled: Regex::new(&format!("/(?:{raw})/"))?,
        })
    }

    pub fn is_match(&self, package_path: &str) -> bool {
        self.compiled.is_match(package_path)
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }
}

/// Tunables for the extraction passes. Every knob has a default that matches
/// common Spring Cloud project layout conventions; a config file only needs
/// to list the keys it overrides.
///
/// File format: one `key = value` per line, `#` starts a comment. List values
/// are comma separated. Regex values are used verbatim (no extra anchoring
/// except where documented on the field).
#[derive(Debug, Clone)]
pub struct ExtractionConfig {
    /// Matched against the slash-delimited package path of a compilation unit
    /// (e.g. `/com/shop/user/entity/`) to decide entity candidacy.
    pub entity_package_pattern: SegmentPattern,
    /// Package-path side of DTO detection.
    pub dto_package_pattern: SegmentPattern,
    /// Simple-name side of DTO detection.
    pub dto_name_pattern: Regex,
    /// Annotation simple names that confirm an entity candidate.
    pub entity_annotations: BTreeSet<String>,
    /// Scanned (unanchored) over each HTTP path to collect version markers.
    pub version_pattern: Regex,
    /// Must match the entire host token of a reconstructed URL for the token
    /// to count as a service name.
    pub service_name_pattern: String,
    service_name_full: Regex,
    /// When set, entity attribute counting follows `extends` chains to base
    /// classes declared in the same module.
    pub include_inherited_entity_fields: bool,
    /// RestTemplate methods whose first argument is treated as a request URL.
    pub rest_client_methods: BTreeSet<String>,
    /// Nano-service flagging: a business service is flagged when all three
    /// metrics are at or below their threshold.
    pub nano_entity_max: u64,
    pub nano_controller_max: u64,
    pub nano_api_max: u64,
}

const DEFAULT_ENTITY_PACKAGE: &str = "(?i)(entity|pojo|model|domain|bean)";
const DEFAULT_DTO_PACKAGE: &str = "(?i)dto";
const DEFAULT_DTO_NAME: &str = "(?i)dto";
const DEFAULT_VERSION: &str = r"(?i)v\d+(\.\d+)?";
const DEFAULT_SERVICE_NAME: &str = r"\S*(service|Service|SERVICE)";

const DEFAULT_ENTITY_ANNOTATIONS: &[&str] = &["Entity", "Table", "TableName", "Document"];

const DEFAULT_REST_CLIENT_METHODS: &[&str] = &[
    "getForObject",
    "getForEntity",
    "postForObject",
    "postForEntity",
    "exchange",
    "execute",
    "put",
    "delete",
    "patchForObject",
    "headForHeaders",
    "optionsForAllow",
];

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            entity_package_pattern: SegmentPattern::new(DEFAULT_ENTITY_PACKAGE).unwrap(),
            dto_package_pattern: SegmentPattern::new(DEFAULT_DTO_PACKAGE).unwrap(),
            dto_name_pattern: Regex::new(DEFAULT_DTO_NAME).unwrap(),
            entity_annotations: DEFAULT_ENTITY_ANNOTATIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            version_pattern: Regex::new(DEFAULT_VERSION).unwrap(),
            service_name_pattern: DEFAULT_SERVICE_NAME.to_string(),
            service_name_full: full_match(DEFAULT_SERVICE_NAME).unwrap(),
            include_inherited_entity_fields: false,
            rest_client_methods: DEFAULT_REST_CLIENT_METHODS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            nano_entity_max: 1,
            nano_controller_max: 1,
            nano_api_max: 2,
        }
    }
}

fn full_match(pattern: &str) -> std::result::Result<Regex, regex::Error> {
    Regex::new(&format!("^(?:{pattern})$"))
}

impl ExtractionConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExtractionConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                message: format!("line {}: expected `key = value`", lineno + 1),
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.set(key, value).map_err(|message| Error::Config {
                message: format!("line {}: {message}", lineno + 1),
            })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let re = |v: &str| Regex::new(v).map_err(|e| format!("bad regex for `{key}`: {e}"));
        let seg =
            |v: &str| SegmentPattern::new(v).map_err(|e| format!("bad regex for `{key}`: {e}"));
        match key {
            "entity_package_pattern" => self.entity_package_pattern = seg(value)?,
            "dto_package_pattern" => self.dto_package_pattern = seg(value)?,
            "dto_name_pattern" => self.dto_name_pattern = re(value)?,
            "version_pattern" => self.version_pattern = re(value)?,
            "service_name_pattern" => {
                self.service_name_full =
                    full_match(value).map_err(|e| format!("bad regex for `{key}`: {e}"))?;
                self.service_name_pattern = value.to_string();
            }
            "entity_annotations" => self.entity_annotations = list(value),
            "rest_client_methods" => self.rest_client_methods = list(value),
            "include_inherited_entity_fields" => {
                self.include_inherited_entity_fields = parse_bool(key, value)?
            }
            "nano_entity_max" => self.nano_entity_max = parse_u64(key, value)?,
            "nano_controller_max" => self.nano_controller_max = parse_u64(key, value)?,
            "nano_api_max" => self.nano_api_max = parse_u64(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// True when `token` as a whole is an acceptable service-name host token.
    pub fn matches_service_token(&self, token: &str) -> bool {
        self.service_name_full.is_match(token)
    }
}

fn list(value: &str) -> BTreeSet<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true/false for `{key}`, got `{value}`")),
    }
}

fn parse_u64(key: &str, value: &str) -> std::result::Result<u64, String> {
    value
        .parse::<u64>()
        .map_err(|_| format!("expected an integer for `{key}`, got `{value}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_classify_common_package_paths() {
        let cfg = ExtractionConfig::default();
        assert!(cfg.entity_package_pattern.is_match("/com/x/entity/"));
        assert!(cfg.entity_package_pattern.is_match("/com/x/POJO/util/"));
        assert!(cfg.entity_package_pattern.is_match("/com/x/domain/"));
        // Patterns span whole segments: a misspelled package does not match.
        assert!(!cfg.entity_package_pattern.is_match("/com/x/entitys/"));
        assert!(!cfg.entity_package_pattern.is_match("/com/x/models/"));
        assert!(!cfg.entity_package_pattern.is_match("/"));
        assert!(cfg.dto_package_pattern.is_match("/com/x/dto/"));
        // Name matching is a plain substring search.
        assert!(cfg.dto_name_pattern.is_match("UserDTO"));
        assert!(cfg.dto_name_pattern.is_match("DtoMapper"));
    }

    #[test]
    fn default_service_token_matching() {
        let cfg = ExtractionConfig::default();
        assert!(cfg.matches_service_token("ts-station-food-service"));
        assert!(cfg.matches_service_token("USER-SERVICE"));
        assert!(cfg.matches_service_token("Service"));
        assert!(!cfg.matches_service_token("payments.example.com"));
        assert!(!cfg.matches_service_token("service-gateway"));
        assert!(!cfg.matches_service_token(""));
    }

    #[test]
    fn version_pattern_is_unanchored() {
        let cfg = ExtractionConfig::default();
        assert!(cfg.version_pattern.is_match("/api/v1/orders"));
        assert!(cfg.version_pattern.is_match("/api/V2.1/orders"));
        assert!(!cfg.version_pattern.is_match("/api/orders"));
    }

    #[test]
    fn parse_overrides_and_rejects_unknown_keys() {
        let cfg = ExtractionConfig::parse(
            "# comment\n\
             nano_api_max = 5\n\
             entity_annotations = Entity, Document\n\
             include_inherited_entity_fields = true\n",
        )
        .unwrap();
        assert_eq!(cfg.nano_api_max, 5);
        assert_eq!(cfg.entity_annotations.len(), 2);
        assert!(cfg.include_inherited_entity_fields);
        // Untouched keys keep their defaults.
        assert_eq!(cfg.nano_entity_max, 1);

        assert!(ExtractionConfig::parse("no_such_key = 1").is_err());
        assert!(ExtractionConfig::parse("version_pattern = (unclosed").is_err());
        assert!(ExtractionConfig::parse("just a line").is_err());
    }
}
