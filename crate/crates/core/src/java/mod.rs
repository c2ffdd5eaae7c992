pub mod loc;
pub mod parse;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// One parsed `.java` file, reduced to the facts the metric passes need.
/// This is a lossy projection: bodies survive only as call lists, local
/// bindings and (for trivial methods) a return expression.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    pub file_path: PathBuf,
    /// Slash-delimited, with leading and trailing slash: `/com/x/entity/`.
    /// The default package is `/`.
    pub package_path: String,
    /// Top-level and nested named types. Anonymous classes are not modeled.
    pub types: Vec<TypeDecl>,
    pub imports: Vec<String>,
    pub had_syntax_errors: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
    Record,
    Annotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub simple_name: String,
    pub kind: TypeKind,
    pub is_abstract: bool,
    pub annotations: Vec<Annotation>,
    /// Simple names from `extends` and `implements` clauses, type arguments
    /// stripped.
    pub super_type_names: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
}

/// Annotation with its statically-literal members. `@Foo("x")` is stored as
/// `value -> x`; members whose value is not a literal are omitted. For array
/// values only the first element is kept, which is all path joining needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub name: String,
    pub members: BTreeMap<String, String>,
}

impl Annotation {
    pub fn value(&self) -> Option<&str> {
        self.members.get("value").map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    /// Declared type with generics stripped: `List<User>` becomes `List`.
    pub type_name: String,
    pub is_static: bool,
    pub initializer: Option<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visibility {
    Public,
    Protected,
    Package,
    Private,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub visibility: Visibility,
    pub annotations: Vec<Annotation>,
    /// `(name, declared type)` in declaration order.
    pub parameters: Vec<(String, String)>,
    /// Every method invocation anywhere in the body, in source order,
    /// including those nested in arguments, lambdas and anonymous classes.
    pub body_calls: Vec<CallExpr>,
    /// Local declaration and plain-assignment events in source order. The
    /// same name may appear more than once; the last write wins when folded
    /// into a lookup map.
    pub bindings: Vec<(String, Expr)>,
    /// Present when the body is exactly one `return <expr>;` statement.
    pub return_expr: Option<Expr>,
}

impl MethodDecl {
    /// Last-write-wins view of `bindings`.
    pub fn binding_map(&self) -> BTreeMap<String, Expr> {
        self.bindings.iter().cloned().collect()
    }
}

/// Expression shapes that matter for URL reconstruction. Everything else is
/// `Opaque`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    StringLiteral(String),
    /// A bare identifier or `this.x`.
    NameRef(String),
    Call(Box<CallExpr>),
    Concat(Box<Expr>, Box<Expr>),
    Opaque,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallExpr {
    /// `Some("restTemplate")` for `restTemplate.exchange(..)` and
    /// `this.restTemplate.exchange(..)`; `None` for unqualified calls and
    /// receivers that are not a simple name.
    pub receiver: Option<String>,
    pub method_name: String,
    pub arguments: Vec<Expr>,
}

/// Directory names that hold generated or compiled sources; nothing under
/// them is analyzed.
const SKIPPED_DIRS: &[&str] = &["target", "generated-sources", "generated"];

/// All `.java` files under `dir`, sorted, skipping build output directories.
pub fn enumerate_source_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::Invalid(format!(
            "{}: not a readable directory",
            dir.display()
        )));
    }
    let mut files = Vec::new();
    let walker = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_entry(|e| !(e.file_type().is_dir() && is_skipped_dir(e.file_name())));
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| dir.to_path_buf());
            match e.into_io_error() {
                Some(io) => Error::io(path, io),
                None => Error::Invalid(format!("{}: walk failed", path.display())),
            }
        })?;
        if entry.file_type().is_file()
            && entry.path().extension().is_some_and(|ext| ext == "java")
        {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}

fn is_skipped_dir(name: &std::ffi::OsStr) -> bool {
    SKIPPED_DIRS.iter().any(|s| name == *s)
}

/// True for files under a Maven test root (`src/test/...`).
pub fn is_test_source(path: &Path) -> bool {
    let comps: Vec<_> = path
        .components()
        .map(|c| c.as_os_str().to_string_lossy().to_string())
        .collect();
    comps.windows(2).any(|w| w[0] == "src" && w[1] == "test")
}
