use std::fs;
use std::path::Path;

use tree_sitter::{Node, Parser};

use crate::diag::Diagnostic;
use crate::error::{Error, Result};
use crate::java::{
    Annotation, CallExpr, Expr, FieldDecl, MethodDecl, SourceUnit, TypeDecl, TypeKind, Visibility,
};

/// Parses one file. I/O failures are hard errors; syntax errors are not. A
/// file that does not parse cleanly is harvested for whatever declarations
/// the parser still recognized, flagged in the unit, and reported once.
pub fn parse_source_unit(path: &Path, diags: &mut Vec<Diagnostic>) -> Result<SourceUnit> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let unit = parse_source(&text, path);
    if unit.had_syntax_errors {
        diags.push(Diagnostic::warning(
            path.display().to_string(),
            "syntax errors; partial declarations harvested",
        ));
    }
    Ok(unit)
}

pub fn parse_source(text: &str, path: &Path) -> SourceUnit {
    let mut parser = Parser::new();
    parser
        .set_language(&tree_sitter_java::LANGUAGE.into())
        .expect("java grammar");
    let src = text.as_bytes();
    let tree = parser.parse(src, None);

    let mut unit = SourceUnit {
        file_path: path.to_path_buf(),
        package_path: "/".to_string(),
        types: Vec::new(),
        imports: Vec::new(),
        had_syntax_errors: false,
    };
    let Some(tree) = tree else {
        unit.had_syntax_errors = true;
        return unit;
    };
    let root = tree.root_node();
    unit.had_syntax_errors = root.has_error();

    let mut cursor = root.walk();
    for child in root.named_children(&mut cursor) {
        match child.kind() {
            "package_declaration" => {
                if let Some(name) = child.named_child(0) {
                    let dotted = node_text(name, src);
                    unit.package_path = format!("/{}/", dotted.replace('.', "/"));
                }
            }
            "import_declaration" => {
                let raw = node_text(child, src);
                let spec = raw
                    .trim_start_matches("import")
                    .trim()
                    .trim_start_matches("static")
                    .trim()
                    .trim_end_matches(';')
                    .trim();
                unit.imports.push(spec.to_string());
            }
            _ => collect_types(child, src, &mut unit.types),
        }
    }
    unit
}

fn node_text<'a>(node: Node, src: &'a [u8]) -> &'a str {
    node.utf8_text(src).unwrap_or("")
}

fn collect_types(node: Node, src: &[u8], out: &mut Vec<TypeDecl>) {
    let kind = match node.kind() {
        "class_declaration" => TypeKind::Class,
        "interface_declaration" => TypeKind::Interface,
        "enum_declaration" => TypeKind::Enum,
        "record_declaration" => TypeKind::Record,
        "annotation_type_declaration" => TypeKind::Annotation,
        // ERROR nodes can wrap otherwise-fine declarations; look inside.
        "ERROR" => {
            let mut cursor = node.walk();
            for child in node.named_children(&mut cursor) {
                collect_types(child, src, out);
            }
            return;
        }
        _ => return,
    };
    let mut nested = Vec::new();
    let decl = lower_type(node, src, kind, &mut nested);
    out.push(decl);
    out.extend(nested);
}

fn lower_type(node: Node, src: &[u8], kind: TypeKind, out: &mut Vec<TypeDecl>) -> TypeDecl {
    let (annotations, is_abstract, _) = lower_modifiers(node, src);
    let simple_name = node
        .child_by_field_name("name")
        .map(|n| node_text(n, src).to_string())
        .unwrap_or_default();

    let mut super_type_names = Vec::new();
    if let Some(sc) = node.child_by_field_name("superclass") {
        // `superclass` wraps the `extends` keyword and one type.
        if let Some(ty) = sc.named_child(sc.named_child_count().saturating_sub(1)) {
            super_type_names.push(type_simple_name(ty, src));
        }
    }
    if let Some(ifaces) = node.child_by_field_name("interfaces") {
        push_type_list(ifaces, src, &mut super_type_names);
    }
    // Interfaces keep their supertypes in an `extends_interfaces` child.
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        if child.kind() == "extends_interfaces" {
            push_type_list(child, src, &mut super_type_names);
        }
    }

    let mut fields = Vec::new();
    let mut methods = Vec::new();
    if let Some(body) = node.child_by_field_name("body") {
        lower_body(body, src, kind, &mut fields, &mut methods, out);
    }

    TypeDecl {
        simple_name,
        kind,
        is_abstract,
        annotations,
        super_type_names,
        fields,
        methods,
    }
}

fn push_type_list(node: Node, src: &[u8], out: &mut Vec<String>) {
    let mut cursor = node.walk();
    for child in node.named_children(&mut cursor) {
        if child.kind() == "type_list" {
            let mut inner = child.walk();
            for ty in child.named_children(&mut inner) {
                out.push(type_simple_name(ty, src));
            }
        }
    }
}

fn lower_body(
    body: Node,
    src: &[u8],
    container: TypeKind,
    fields: &mut Vec<FieldDecl>,
    methods: &mut Vec<MethodDecl>,
    nested: &mut Vec<TypeDecl>,
) {
    let mut cursor = body.walk();
    for member in body.named_children(&mut cursor) {
        match member.kind() {
            "field_declaration" | "constant_declaration" => {
                lower_fields(member, src, fields);
            }
            "method_declaration" => methods.push(lower_method(member, src, container)),
            // Enum constants live before the `;`; members after it are in
            // an enum_body_declarations node.
            "enum_body_declarations" => {
                lower_body(member, src, container, fields, methods, nested);
            }
            "class_declaration"
            | "interface_declaration"
            | "enum_declaration"
            | "record_declaration"
            | "annotation_type_declaration" => collect_types(member, src, nested),
            _ => {}
        }
    }
}

/// Modifier list of a declaration: annotations, `abstract`, and visibility
/// keyword if present.
fn lower_modifiers(node: Node, src: &[u8]) -> (Vec<Annotation>, bool, Option<Visibility>) {
    let mut annotations = Vec::new();
    let mut is_abstract = false;
    let mut visibility = None;
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        if child.kind() != "modifiers" {
            continue;
        }
        let mut inner = child.walk();
        for m in child.children(&mut inner) {
            match m.kind() {
                "marker_annotation" | "annotation" => {
                    annotations.push(lower_annotation(m, src));
                }
                "abstract" => is_abstract = true,
                "public" => visibility = Some(Visibility::Public),
                "protected" => visibility = Some(Visibility::Protected),
                "private" => visibility = Some(Visibility::Private),
                _ => {}
            }
        }
    }
    (annotations, is_abstract, visibility)
}

fn lower_annotation(node: Node, src: &[u8]) -> Annotation {
    let name = node
        .child_by_field_name("name")
        .map(|n| simple_suffix(node_text(n, src)))
        .unwrap_or_default();
    let mut members = std::collections::BTreeMap::new();
    if let Some(args) = node.child_by_field_name("arguments") {
        let mut cursor = args.walk();
        for arg in args.named_children(&mut cursor) {
            match arg.kind() {
                "element_value_pair" => {
                    let key = arg
                        .child_by_field_name("key")
                        .map(|k| node_text(k, src).to_string())
                        .unwrap_or_default();
                    if let Some(value) = arg.child_by_field_name("value") {
                        if let Some(v) = literal_value(value, src) {
                            members.insert(key, v);
                        }
                    }
                }
                _ => {
                    if let Some(v) = literal_value(arg, src) {
                        members.insert("value".to_string(), v);
                    }
                }
            }
        }
    }
    Annotation { name, members }
}

/// Literal annotation member value, or None when it is an expression the
/// model does not evaluate. Arrays yield their first literal element.
fn literal_value(node: Node, src: &[u8]) -> Option<String> {
    match node.kind() {
        "string_literal" => Some(string_literal_content(node, src)),
        "decimal_integer_literal" | "hex_integer_literal" | "decimal_floating_point_literal"
        | "true" | "false" | "character_literal" => Some(node_text(node, src).to_string()),
        "element_value_array_initializer" => {
            let mut cursor = node.walk();
            let first = node
                .named_children(&mut cursor)
                .find_map(|c| literal_value(c, src));
            first
        }
        _ => None,
    }
}

fn lower_fields(node: Node, src: &[u8], out: &mut Vec<FieldDecl>) {
    let mut is_static = false;
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        if child.kind() == "modifiers" {
            let mut inner = child.walk();
            if child.children(&mut inner).any(|m| m.kind() == "static") {
                is_static = true;
            }
        }
    }
    let type_name = node
        .child_by_field_name("type")
        .map(|t| type_simple_name(t, src))
        .unwrap_or_default();
    let mut cursor = node.walk();
    for decl in node.named_children(&mut cursor) {
        if decl.kind() != "variable_declarator" {
            continue;
        }
        let name = decl
            .child_by_field_name("name")
            .map(|n| node_text(n, src).to_string())
            .unwrap_or_default();
        let initializer = decl
            .child_by_field_name("value")
            .map(|v| lower_expr(v, src));
        out.push(FieldDecl {
            name,
            type_name: type_name.clone(),
            is_static,
            initializer,
        });
    }
}

fn lower_method(node: Node, src: &[u8], container: TypeKind) -> MethodDecl {
    let (annotations, _, visibility) = lower_modifiers(node, src);
    // Interface and annotation members are implicitly public.
    let default_vis = match container {
        TypeKind::Interface | TypeKind::Annotation => Visibility::Public,
        _ => Visibility::Package,
    };
    let name = node
        .child_by_field_name("name")
        .map(|n| node_text(n, src).to_string())
        .unwrap_or_default();

    let mut parameters = Vec::new();
    if let Some(params) = node.child_by_field_name("parameters") {
        let mut cursor = params.walk();
        for p in params.named_children(&mut cursor) {
            match p.kind() {
                "formal_parameter" => {
                    let ty = p
                        .child_by_field_name("type")
                        .map(|t| type_simple_name(t, src))
                        .unwrap_or_default();
                    let pname = p
                        .child_by_field_name("name")
                        .map(|n| node_text(n, src).to_string())
                        .unwrap_or_default();
                    parameters.push((pname, ty));
                }
                "spread_parameter" => {
                    let mut ty = String::new();
                    let mut pname = String::new();
                    let mut inner = p.walk();
                    for c in p.named_children(&mut inner) {
                        if c.kind() == "variable_declarator" {
                            if let Some(n) = c.child_by_field_name("name") {
                                pname = node_text(n, src).to_string();
                            }
                        } else {
                            ty = type_simple_name(c, src);
                        }
                    }
                    parameters.push((pname, format!("{ty}...")));
                }
                _ => {}
            }
        }
    }

    let mut body_calls = Vec::new();
    let mut bindings = Vec::new();
    let mut return_expr = None;
    if let Some(body) = node.child_by_field_name("body") {
        walk_body(body, src, &mut body_calls, &mut bindings);
        return_expr = sole_return_expr(body, src);
    }

    MethodDecl {
        name,
        visibility: visibility.unwrap_or(default_vis),
        annotations,
        parameters,
        body_calls,
        bindings,
        return_expr,
    }
}

/// Pre-order walk of a method body, harvesting every invocation plus local
/// declaration and assignment events.
fn walk_body(node: Node, src: &[u8], calls: &mut Vec<CallExpr>, bindings: &mut Vec<(String, Expr)>) {
    match node.kind() {
        "method_invocation" => calls.push(lower_call(node, src)),
        "local_variable_declaration" => {
            let mut cursor = node.walk();
            for decl in node.named_children(&mut cursor) {
                if decl.kind() != "variable_declarator" {
                    continue;
                }
                if let (Some(name), Some(value)) = (
                    decl.child_by_field_name("name"),
                    decl.child_by_field_name("value"),
                ) {
                    bindings.push((node_text(name, src).to_string(), lower_expr(value, src)));
                }
            }
        }
        "assignment_expression" => {
            let left = node.child_by_field_name("left");
            let op = node
                .child_by_field_name("operator")
                .map(|o| node_text(o, src))
                .unwrap_or("");
            let right = node.child_by_field_name("right");
            if let (Some(left), Some(right)) = (left, right) {
                if left.kind() == "identifier" {
                    let name = node_text(left, src).to_string();
                    match op {
                        "=" => bindings.push((name, lower_expr(right, src))),
                        "+=" => {
                            let folded = Expr::Concat(
                                Box::new(Expr::NameRef(name.clone())),
                                Box::new(lower_expr(right, src)),
                            );
                            bindings.push((name, folded));
                        }
                        _ => bindings.push((name, Expr::Opaque)),
                    }
                }
            }
        }
        _ => {}
    }
    let mut cursor = node.walk();
    for child in node.named_children(&mut cursor) {
        walk_body(child, src, calls, bindings);
    }
}

/// `Some(expr)` when the body is exactly `{ return <expr>; }`.
fn sole_return_expr(body: Node, src: &[u8]) -> Option<Expr> {
    let mut cursor = body.walk();
    let stmts: Vec<Node> = body
        .named_children(&mut cursor)
        .filter(|n| !matches!(n.kind(), "line_comment" | "block_comment"))
        .collect();
    if stmts.len() != 1 || stmts[0].kind() != "return_statement" {
        return None;
    }
    let ret = stmts[0];
    let mut cursor = ret.walk();
    let expr = ret
        .named_children(&mut cursor)
        .find(|n| !matches!(n.kind(), "line_comment" | "block_comment"))
        .map(|e| lower_expr(e, src));
    expr
}

fn lower_call(node: Node, src: &[u8]) -> CallExpr {
    let receiver = node.child_by_field_name("object").and_then(|obj| match obj.kind() {
        "identifier" => Some(node_text(obj, src).to_string()),
        "field_access" => {
            let on_this = obj
                .child_by_field_name("object")
                .is_some_and(|o| o.kind() == "this");
            let field = obj.child_by_field_name("field")?;
            (on_this && field.kind() == "identifier")
                .then(|| node_text(field, src).to_string())
        }
        _ => None,
    });
    let method_name = node
        .child_by_field_name("name")
        .map(|n| node_text(n, src).to_string())
        .unwrap_or_default();
    let mut arguments = Vec::new();
    if let Some(args) = node.child_by_field_name("arguments") {
        let mut cursor = args.walk();
        for a in args.named_children(&mut cursor) {
            if !matches!(a.kind(), "line_comment" | "block_comment") {
                arguments.push(lower_expr(a, src));
            }
        }
    }
    CallExpr {
        receiver,
        method_name,
        arguments,
    }
}

fn lower_expr(node: Node, src: &[u8]) -> Expr {
    match node.kind() {
        "string_literal" => Expr::StringLiteral(string_literal_content(node, src)),
        "identifier" => Expr::NameRef(node_text(node, src).to_string()),
        "field_access" => {
            let on_this = node
                .child_by_field_name("object")
                .is_some_and(|o| o.kind() == "this");
            match (on_this, node.child_by_field_name("field")) {
                (true, Some(f)) if f.kind() == "identifier" => {
                    Expr::NameRef(node_text(f, src).to_string())
                }
                _ => Expr::Opaque,
            }
        }
        "binary_expression" => {
            let op = node
                .child_by_field_name("operator")
                .map(|o| node_text(o, src))
                .unwrap_or("");
            if op == "+" {
                let left = node
                    .child_by_field_name("left")
                    .map(|n| lower_expr(n, src))
                    .unwrap_or(Expr::Opaque);
                let right = node
                    .child_by_field_name("right")
                    .map(|n| lower_expr(n, src))
                    .unwrap_or(Expr::Opaque);
                Expr::Concat(Box::new(left), Box::new(right))
            } else {
                Expr::Opaque
            }
        }
        "method_invocation" => Expr::Call(Box::new(lower_call(node, src))),
        "parenthesized_expression" => node
            .named_child(0)
            .map(|inner| lower_expr(inner, src))
            .unwrap_or(Expr::Opaque),
        _ => Expr::Opaque,
    }
}

fn string_literal_content(node: Node, src: &[u8]) -> String {
    let mut content = String::new();
    let mut cursor = node.walk();
    for part in node.named_children(&mut cursor) {
        match part.kind() {
            "string_fragment" | "multiline_string_fragment" => {
                content.push_str(node_text(part, src));
            }
            "escape_sequence" => content.push_str(&unescape(node_text(part, src))),
            _ => {}
        }
    }
    content
}

fn unescape(esc: &str) -> String {
    let body = esc.strip_prefix('\\').unwrap_or(esc);
    let mut chars = body.chars();
    let Some(first) = chars.next() else {
        return String::new();
    };
    match first {
        'n' => "\n".into(),
        't' => "\t".into(),
        'r' => "\r".into(),
        'b' => "\u{8}".into(),
        'f' => "\u{c}".into(),
        '0'..='7' => {
            let octal: String = std::iter::once(first).chain(chars).collect();
            u32::from_str_radix(&octal, 8)
                .ok()
                .and_then(char::from_u32)
                .map(String::from)
                .unwrap_or_default()
        }
        'u' => {
            let hex: String = chars.collect();
            u32::from_str_radix(&hex, 16)
                .ok()
                .and_then(char::from_u32)
                .map(String::from)
                .unwrap_or_default()
        }
        other => other.to_string(),
    }
}

/// Simple name of a type node: generics stripped, qualifiers dropped,
/// array suffix kept.
fn type_simple_name(node: Node, src: &[u8]) -> String {
    match node.kind() {
        "generic_type" => node
            .named_child(0)
            .map(|n| type_simple_name(n, src))
            .unwrap_or_default(),
        "scoped_type_identifier" => node
            .named_child(node.named_child_count().saturating_sub(1))
            .map(|n| type_simple_name(n, src))
            .unwrap_or_default(),
        "array_type" => {
            let elem = node
                .child_by_field_name("element")
                .map(|n| type_simple_name(n, src))
                .unwrap_or_default();
            format!("{elem}[]")
        }
        _ => {
            let raw = node_text(node, src);
            let no_args = raw.split('<').next().unwrap_or(raw);
            no_args
                .rsplit('.')
                .next()
                .unwrap_or(no_args)
                .trim()
                .to_string()
        }
    }
}

fn simple_suffix(name: &str) -> String {
    name.rsplit('.').next().unwrap_or(name).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn parse(text: &str) -> SourceUnit {
        parse_source(text, &PathBuf::from("Test.java"))
    }

    #[test]
    fn package_and_imports() {
        let unit = parse(
            "package com.shop.user.entity;\n\
             import java.util.List;\n\
             import static java.util.Objects.requireNonNull;\n\
             import com.shop.*;\n\
             public class User {}\n",
        );
        assert_eq!(unit.package_path, "/com/shop/user/entity/");
        assert_eq!(
            unit.imports,
            vec!["java.util.List", "java.util.Objects.requireNonNull", "com.shop.*"]
        );
        assert!(!unit.had_syntax_errors);
    }

    #[test]
    fn default_package() {
        let unit = parse("class A {}");
        assert_eq!(unit.package_path, "/");
        assert_eq!(unit.types[0].simple_name, "A");
    }

    #[test]
    fn type_kinds_and_abstract() {
        let unit = parse(
            "public abstract class A {}\n\
             interface B {}\n\
             enum C { X, Y }\n\
             record D(int x) {}\n\
             @interface E {}\n",
        );
        let kinds: Vec<_> = unit.types.iter().map(|t| (t.kind, t.is_abstract)).collect();
        assert_eq!(
            kinds,
            vec![
                (TypeKind::Class, true),
                (TypeKind::Interface, false),
                (TypeKind::Enum, false),
                (TypeKind::Record, false),
                (TypeKind::Annotation, false),
            ]
        );
    }

    #[test]
    fn supertypes_are_simple_names() {
        let unit = parse(
            "class A extends base.BaseModel<Long> implements java.io.Serializable, Cloneable {}\n\
             interface I extends com.x.J, K<String> {}\n",
        );
        assert_eq!(
            unit.types[0].super_type_names,
            vec!["BaseModel", "Serializable", "Cloneable"]
        );
        assert_eq!(unit.types[1].super_type_names, vec!["J", "K"]);
    }

    #[test]
    fn annotations_with_members() {
        let unit = parse(
            "@RestController\n\
             @RequestMapping(\"/api/v1/users\")\n\
             @Table(name = \"t_user\", schema = \"s\")\n\
             @GetMapping({\"/a\", \"/b\"})\n\
             @Foo(path = Constants.BASE)\n\
             class C {}\n",
        );
        let anns = &unit.types[0].annotations;
        assert_eq!(anns[0].name, "RestController");
        assert!(anns[0].members.is_empty());
        assert_eq!(anns[1].value(), Some("/api/v1/users"));
        assert_eq!(anns[2].members.get("name").map(String::as_str), Some("t_user"));
        // Array values keep their first element.
        assert_eq!(anns[3].value(), Some("/a"));
        // Non-literal members are omitted.
        assert!(anns[4].members.is_empty());
    }

    #[test]
    fn qualified_annotation_name_is_simplified() {
        let unit = parse("@javax.persistence.Entity class E {}");
        assert_eq!(unit.types[0].annotations[0].name, "Entity");
    }

    #[test]
    fn fields_with_types_and_static() {
        let unit = parse(
            "class A {\n\
               private Long id;\n\
               static final String BASE = \"http://x\";\n\
               private List<User> users, extras;\n\
               int[] nums;\n\
             }\n",
        );
        let fields = &unit.types[0].fields;
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0].name, "id");
        assert_eq!(fields[0].type_name, "Long");
        assert!(!fields[0].is_static);
        assert!(fields[1].is_static);
        assert_eq!(
            fields[1].initializer,
            Some(Expr::StringLiteral("http://x".into()))
        );
        assert_eq!(fields[2].type_name, "List");
        assert_eq!(fields[3].name, "extras");
        assert_eq!(fields[4].type_name, "int[]");
    }

    #[test]
    fn method_visibility_defaults() {
        let unit = parse(
            "class A { void m() {} private void p() {} }\n\
             interface I { void m(); }\n",
        );
        assert_eq!(unit.types[0].methods[0].visibility, Visibility::Package);
        assert_eq!(unit.types[0].methods[1].visibility, Visibility::Private);
        assert_eq!(unit.types[1].methods[0].visibility, Visibility::Public);
    }

    #[test]
    fn parameters_and_varargs() {
        let unit = parse(
            "class A { String f(Long id, Map<String, Object> m, String... rest) { return null; } }",
        );
        let m = &unit.types[0].methods[0];
        assert_eq!(
            m.parameters,
            vec![
                ("id".to_string(), "Long".to_string()),
                ("m".to_string(), "Map".to_string()),
                ("rest".to_string(), "String...".to_string()),
            ]
        );
    }

    #[test]
    fn body_calls_include_nested_and_lambda() {
        let unit = parse(
            "class A { void m() {\n\
               svc.find(helper.key());\n\
               list.forEach(x -> other.run(x));\n\
             } }",
        );
        let names: Vec<_> = unit.types[0].methods[0]
            .body_calls
            .iter()
            .map(|c| (c.receiver.clone(), c.method_name.clone()))
            .collect();
        assert_eq!(
            names,
            vec![
                (Some("svc".into()), "find".into()),
                (Some("helper".into()), "key".into()),
                (Some("list".into()), "forEach".into()),
                (Some("other".into()), "run".into()),
            ]
        );
    }

    #[test]
    fn this_qualified_receiver() {
        let unit = parse("class A { void m() { this.restTemplate.exchange(url); this.helper(); } }");
        let calls = &unit.types[0].methods[0].body_calls;
        assert_eq!(calls[0].receiver, Some("restTemplate".into()));
        // A call on `this` itself is an unqualified self call.
        assert_eq!(calls[1].receiver, None);
        assert_eq!(calls[1].method_name, "helper");
    }

    #[test]
    fn bindings_in_order_with_assignment() {
        let unit = parse(
            "class A { void m() {\n\
               String u = \"http://a\";\n\
               u = u + \"/x\";\n\
               u += \"/y\";\n\
               int n; n = 3;\n\
             } }",
        );
        let b = &unit.types[0].methods[0].bindings;
        assert_eq!(b.len(), 4);
        assert_eq!(b[0], ("u".into(), Expr::StringLiteral("http://a".into())));
        assert_eq!(
            b[1],
            (
                "u".into(),
                Expr::Concat(
                    Box::new(Expr::NameRef("u".into())),
                    Box::new(Expr::StringLiteral("/x".into()))
                )
            )
        );
        match &b[2].1 {
            Expr::Concat(l, _) => assert_eq!(**l, Expr::NameRef("u".into())),
            other => panic!("expected concat, got {other:?}"),
        }
    }

    #[test]
    fn sole_return_expression() {
        let unit = parse(
            "class A {\n\
               String one() { return \"http://\" + name; }\n\
               String two() { log(); return \"x\"; }\n\
             }",
        );
        assert!(matches!(
            unit.types[0].methods[0].return_expr,
            Some(Expr::Concat(_, _))
        ));
        assert_eq!(unit.types[0].methods[1].return_expr, None);
    }

    #[test]
    fn string_escapes_are_decoded() {
        let unit = parse(r#"class A { String s = "a\n\t\"q\"A\\"; }"#);
        assert_eq!(
            unit.types[0].fields[0].initializer,
            Some(Expr::StringLiteral("a\n\t\"q\"A\\".into()))
        );
    }

    #[test]
    fn nested_types_are_collected() {
        let unit = parse("class Outer { class Inner {} static class S {} void m() {} }");
        let names: Vec<_> = unit.types.iter().map(|t| t.simple_name.as_str()).collect();
        assert_eq!(names, vec!["Outer", "Inner", "S"]);
        // Members stay with their declaring type.
        assert_eq!(unit.types[0].methods.len(), 1);
    }

    #[test]
    fn broken_file_is_harvested_and_flagged() {
        let unit = parse(
            "package com.x;\n\
             public class Good { void m() {} }\n\
             public class Bad { void broken( {}\n",
        );
        assert!(unit.had_syntax_errors);
        assert!(unit.types.iter().any(|t| t.simple_name == "Good"));
    }

    #[test]
    fn opaque_expressions() {
        let unit = parse(
            "class A { void m() {\n\
               String a = cond ? \"x\" : \"y\";\n\
               String b = arr[0];\n\
               String c = (\"p\") + q;\n\
             } }",
        );
        let b = &unit.types[0].methods[0].bindings;
        assert_eq!(b[0].1, Expr::Opaque);
        assert_eq!(b[1].1, Expr::Opaque);
        assert_eq!(
            b[2].1,
            Expr::Concat(
                Box::new(Expr::StringLiteral("p".into())),
                Box::new(Expr::NameRef("q".into()))
            )
        );
    }
}
