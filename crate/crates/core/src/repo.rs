use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::{DateTime, Utc};

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};

/// One analyzable snapshot of a repository: a tag, or the literal "HEAD"
/// for repositories without any tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseRef {
    pub release_id: String,
    pub commit_id: String,
    pub commit_timestamp: DateTime<Utc>,
}

/// Runs git with the given arguments, treating a nonzero exit as an error.
/// `context` names the operation for error messages.
fn git(dir: Option<&Path>, args: &[&str], context: &str) -> Result<String> {
    let mut cmd = Command::new("git");
    if let Some(d) = dir {
        cmd.arg("-C").arg(d);
    }
    cmd.args(args);
    let output = cmd.output().map_err(|e| Error::Git {
        context: context.to_string(),
        message: format!("failed to run git: {e}"),
    })?;
    if !output.status.success() {
        let stderr = String::from_utf8_lossy(&output.stderr);
        return Err(Error::Git {
            context: context.to_string(),
            message: stderr.trim().to_string(),
        });
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

/// Clones entry.git_url to workspace/<name>, or refreshes refs if the clone
/// already exists. A non-repository occupying the target path is an error,
/// never overwritten.
pub fn fetch_repository(entry: &CatalogEntry, workspace: &Path) -> Result<PathBuf> {
    let dest = workspace.join(&entry.name);
    if dest.join(".git").exists() {
        git(
            Some(&dest),
            &["fetch", "--tags", "--force", "--prune"],
            &format!("refreshing `{}`", entry.name),
        )?;
        return Ok(dest);
    }
    if dest.exists() {
        return Err(Error::Git {
            context: format!("fetching `{}`", entry.name),
            message: format!(
                "target path {} exists and is not a git repository",
                dest.display()
            ),
        });
    }
    std::fs::create_dir_all(workspace).map_err(|e| Error::io(workspace, e))?;
    git(
        None,
        &["clone", "--quiet", &entry.git_url, &dest.to_string_lossy()],
        &format!("cloning `{}`", entry.name),
    )?;
    Ok(dest)
}

/// All tags as releases, ascending by commit timestamp (ties broken by tag
/// name). Annotated tags are peeled to the commit they point at. A repo
/// with zero tags yields one pseudo-release for the current branch tip.
pub fn list_releases(repo: &Path) -> Result<Vec<ReleaseRef>> {
    let listing = git(
        Some(repo),
        &[
            "for-each-ref",
            "refs/tags",
            "--format=%(refname:short)%00%(objectname)%00%(*objectname)",
        ],
        "listing tags",
    )?;

    let mut releases = Vec::new();
    for line in listing.lines() {
        let mut parts = line.split('\0');
        let (Some(name), Some(obj), Some(peeled)) = (parts.next(), parts.next(), parts.next())
        else {
            continue;
        };
        let commit_id = if peeled.is_empty() { obj } else { peeled };
        releases.push(ReleaseRef {
            release_id: name.to_string(),
            commit_id: commit_id.to_string(),
            commit_timestamp: commit_timestamp(repo, commit_id)?,
        });
    }

    if releases.is_empty() {
        let head = git(Some(repo), &["rev-parse", "HEAD"], "resolving HEAD")?;
        let commit_id = head.trim().to_string();
        releases.push(ReleaseRef {
            commit_timestamp: commit_timestamp(repo, &commit_id)?,
            release_id: "HEAD".to_string(),
            commit_id,
        });
    }

    releases.sort_by(|a, b| {
        (a.commit_timestamp, &a.release_id).cmp(&(b.commit_timestamp, &b.release_id))
    });
    Ok(releases)
}

fn commit_timestamp(repo: &Path, commit_id: &str) -> Result<DateTime<Utc>> {
    let out = git(
        Some(repo),
        &["show", "-s", "--format=%ct", commit_id],
        &format!("reading timestamp of {commit_id}"),
    )?;
    let secs: i64 = out.trim().parse().map_err(|_| Error::Git {
        context: format!("reading timestamp of {commit_id}"),
        message: format!("unparseable committer timestamp `{}`", out.trim()),
    })?;
    DateTime::from_timestamp(secs, 0).ok_or_else(|| Error::Git {
        context: format!("reading timestamp of {commit_id}"),
        message: format!("timestamp {secs} out of range"),
    })
}

/// Detaches the working tree at the release's commit. A dirty tree is
/// refused so local edits are never clobbered.
pub fn checkout_release(repo: &Path, release: &ReleaseRef) -> Result<PathBuf> {
    let status = git(Some(repo), &["status", "--porcelain"], "checking tree state")?;
    if !status.trim().is_empty() {
        return Err(Error::Git {
            context: format!("checking out `{}`", release.release_id),
            message: format!("working tree at {} has local changes", repo.display()),
        });
    }
    git(
        Some(repo),
        &["checkout", "--quiet", "--detach", &release.commit_id],
        &format!("checking out `{}`", release.release_id),
    )?;
    Ok(repo.to_path_buf())
}
