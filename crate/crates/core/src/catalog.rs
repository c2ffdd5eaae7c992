use std::collections::BTreeSet;
use std::path::Path;

use url::Url;

use crate::error::{Error, Result};

pub const CATALOG_HEADER: [&str; 6] = [
    "name",
    "git_url",
    "service_number",
    "multiple_tags",
    "introduction",
    "stars",
];

/// One analyzable system: a named git repository plus the curation columns
/// that came with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub git_url: String,
    pub stars: u64,
    pub claimed_service_count: u64,
    pub multiple_tags: bool,
    pub introduction: String,
}

/// Star counts appear both as plain integers and in display form like
/// "28.7K"; the suffix scales by 1000 and the result is rounded.
fn parse_stars(text: &str) -> std::result::Result<u64, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty stars field".to_string());
    }
    if let Some(prefix) = t.strip_suffix(['K', 'k']) {
        let v: f64 = prefix
            .trim()
            .parse()
            .map_err(|_| format!("unparseable stars value `{text}`"))?;
        if v < 0.0 || !v.is_finite() {
            return Err(format!("negative or non-finite stars value `{text}`"));
        }
        Ok((v * 1000.0).round() as u64)
    } else {
        t.parse()
            .map_err(|_| format!("unparseable stars value `{text}`"))
    }
}

fn parse_multiple_tags(text: &str) -> std::result::Result<bool, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "yes" => Ok(true),
        "no" => Ok(false),
        other => Err(format!("multiple_tags must be Yes or No, got `{other}`")),
    }
}

pub fn load_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    let err_at = |row: usize, message: String| Error::Catalog {
        path: path.to_path_buf(),
        row,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => err_at(1, e.to_string()),
        })?;

    let headers = reader.headers().map_err(|e| err_at(1, e.to_string()))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != CATALOG_HEADER {
        return Err(err_at(
            1,
            format!(
                "catalog header mismatch: expected {:?}, got {:?}",
                CATALOG_HEADER.join(","),
                got.join(",")
            ),
        ));
    }

    let mut entries = Vec::new();
    let mut seen_names = BTreeSet::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| err_at(row, e.to_string()))?;
        if record.len() != CATALOG_HEADER.len() {
            return Err(err_at(
                row,
                format!("expected {} fields, got {}", CATALOG_HEADER.len(), record.len()),
            ));
        }
        let name = record[0].trim().to_string();
        if name.is_empty() {
            return Err(err_at(row, "empty system name".to_string()));
        }
        if !seen_names.insert(name.clone()) {
            return Err(err_at(row, format!("duplicate system name `{name}`")));
        }
        let git_url = record[1].trim().to_string();
        Url::parse(&git_url).map_err(|e| err_at(row, format!("invalid git_url `{git_url}`: {e}")))?;
        let claimed_service_count: u64 = record[2]
            .trim()
            .parse()
            .map_err(|_| err_at(row, format!("unparseable service_number `{}`", &record[2])))?;
        let multiple_tags = parse_multiple_tags(&record[3]).map_err(|m| err_at(row, m))?;
        let introduction = record[4].to_string();
        let stars = parse_stars(&record[5]).map_err(|m| err_at(row, m))?;

        entries.push(CatalogEntry {
            name,
            git_url,
            stars,
            claimed_service_count,
            multiple_tags,
            introduction,
        });
    }
    Ok(entries)
}

/// Inverse of load_catalog up to star display form: stars are written as
/// plain integers, so load(write(load(f))) == load(f).
pub fn write_catalog(path: &Path, entries: &[CatalogEntry]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    writer
        .write_record(CATALOG_HEADER)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    for e in entries {
        writer
            .write_record([
                e.name.as_str(),
                e.git_url.as_str(),
                &e.claimed_service_count.to_string(),
                if e.multiple_tags { "Yes" } else { "No" },
                e.introduction.as_str(),
                &e.stars.to_string(),
            ])
            .map_err(|err| Error::io(path, std::io::Error::other(err.to_string())))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn temp_catalog(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_rows_and_normalizes_stars() {
        let f = temp_catalog(
            "name,git_url,service_number,multiple_tags,introduction,stars\n\
             apollo,https://github.com/apolloconfig/apollo,5,Yes,config center,28.7K\n\
             train-tickets,https://github.com/x/y,41,Yes,booking demo,627\n",
        );
        let entries = load_catalog(f.path()).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].name, "apollo");
        assert_eq!(entries[0].stars, 28700);
        assert_eq!(entries[0].claimed_service_count, 5);
        assert!(entries[0].multiple_tags);
        assert_eq!(entries[1].stars, 627);
    }

    #[test]
    fn header_only_file_is_empty() {
        let f = temp_catalog("name,git_url,service_number,multiple_tags,introduction,stars\n");
        assert!(load_catalog(f.path()).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_rows_with_row_numbers() {
        let dup = temp_catalog(
            "name,git_url,service_number,multiple_tags,introduction,stars\n\
             a,https://e.com/a,1,No,x,1\n\
             a,https://e.com/b,1,No,x,1\n",
        );
        let e = load_catalog(dup.path()).unwrap_err().to_string();
        assert!(e.contains("row 3") && e.contains("duplicate"), "{e}");

        let stars = temp_catalog(
            "name,git_url,service_number,multiple_tags,introduction,stars\n\
             a,https://e.com/a,1,No,x,many\n",
        );
        let e = load_catalog(stars.path()).unwrap_err().to_string();
        assert!(e.contains("row 2") && e.contains("stars"), "{e}");

        let url = temp_catalog(
            "name,git_url,service_number,multiple_tags,introduction,stars\n\
             a,not a url,1,No,x,1\n",
        );
        let e = load_catalog(url.path()).unwrap_err().to_string();
        assert!(e.contains("git_url"), "{e}");
    }

    #[test]
    fn rejects_wrong_header() {
        let f = temp_catalog("name,url,services,tags,intro,stars\na,https://e.com,1,No,x,1\n");
        let e = load_catalog(f.path()).unwrap_err().to_string();
        assert!(e.contains("header mismatch"), "{e}");
    }

    #[test]
    fn missing_file_is_io_error() {
        let e = load_catalog(Path::new("/nonexistent/catalog.csv")).unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
    }

    #[test]
    fn multiple_tags_case_insensitive() {
        let f = temp_catalog(
            "name,git_url,service_number,multiple_tags,introduction,stars\n\
             a,https://e.com/a,1,YES,x,1\n\
             b,https://e.com/b,1,no,x,1\n",
        );
        let entries = load_catalog(f.path()).unwrap();
        assert!(entries[0].multiple_tags);
        assert!(!entries[1].multiple_tags);
    }

    #[test]
    fn write_then_load_round_trips() {
        let entries = vec![
            CatalogEntry {
                name: "alpha".into(),
                git_url: "https://example.com/alpha.git".into(),
                stars: 28700,
                claimed_service_count: 7,
                multiple_tags: true,
                introduction: "has, commas and \"quotes\"".into(),
            },
            CatalogEntry {
                name: "beta".into(),
                git_url: "https://example.com/beta".into(),
                stars: 0,
                claimed_service_count: 0,
                multiple_tags: false,
                introduction: String::new(),
            },
        ];
        let f = tempfile::NamedTempFile::new().unwrap();
        write_catalog(f.path(), &entries).unwrap();
        assert_eq!(load_catalog(f.path()).unwrap(), entries);
    }

    #[test]
    fn fractional_k_rounds() {
        assert_eq!(parse_stars("28.7K").unwrap(), 28700);
        assert_eq!(parse_stars("1.2345k").unwrap(), 1235);
        assert_eq!(parse_stars("0K").unwrap(), 0);
        assert!(parse_stars("-1K").is_err());
        assert!(parse_stars("").is_err());
    }
}
