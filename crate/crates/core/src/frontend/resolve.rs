//! Name resolution across all parsed files and assembly of the snapshot.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::body::RawTarget;
use super::lexer::PRIMITIVES;
use super::parser::{FileContext, ParsedFile, RawClass};
use super::syntax::base_type;
use super::ParseDiagnostic;
use crate::model::{CallSite, ClassKind, ClassNode, ForeignField, ModelError, PackageNode, Snapshot};

struct Resolver<'a> {
    known: HashMap<&'a str, ClassKind>,
}

impl<'a> Resolver<'a> {
    fn knows(&self, name: &str) -> bool {
        self.known.contains_key(name)
    }

    fn simple(&self, name: &str, class: &RawClass, ctx: &FileContext) -> String {
        let chain = std::iter::once(&class.qualified_name).chain(class.enclosing.iter());
        for enclosing in chain {
            let member = format!("{enclosing}${name}");
            if self.knows(&member) {
                return member;
            }
            if last_segment(enclosing) == name {
                return enclosing.clone();
            }
        }
        if let Some(full) = ctx.single_imports.get(name) {
            return self.dotted_known(full).unwrap_or_else(|| full.clone());
        }
        let local = if ctx.package.is_empty() {
            name.to_string()
        } else {
            format!("{}.{name}", ctx.package)
        };
        if self.knows(&local) {
            return local;
        }
        for prefix in &ctx.on_demand {
            let candidate = format!("{prefix}.{name}");
            if let Some(found) = self.dotted_known(&candidate) {
                return found;
            }
        }
        name.to_string()
    }

    /// Known class spelled by a dotted name, trying every package/member split.
    fn dotted_known(&self, dotted: &str) -> Option<String> {
        if self.knows(dotted) {
            return Some(dotted.to_string());
        }
        let segments: Vec<&str> = dotted.split('.').collect();
        (1..segments.len()).find_map(|k| {
            let candidate = format!("{}.{}", segments[..k].join("."), segments[k..].join("$"));
            self.knows(&candidate).then_some(candidate)
        })
    }

    fn name(&self, name: &str, class: &RawClass, ctx: &FileContext) -> String {
        if PRIMITIVES.contains(&name) || name == "?" || name == "extends" || name == "super" {
            return name.to_string();
        }
        match name.split_once('.') {
            None => self.simple(name, class, ctx),
            Some((first, rest)) => {
                if let Some(found) = self.dotted_known(name) {
                    return found;
                }
                let head = self.simple(first, class, ctx);
                let nested = format!("{head}${}", rest.replace('.', "$"));
                if self.knows(&nested) {
                    nested
                } else {
                    name.to_string()
                }
            }
        }
    }

    /// Rewrites every dotted identifier run inside a type text.
    fn type_text(&self, text: &str, class: &RawClass, ctx: &FileContext) -> String {
        let mut out = String::with_capacity(text.len());
        let mut run = String::new();
        for ch in text.chars() {
            if ch == '_' || ch == '$' || ch == '.' || ch.is_alphanumeric() {
                run.push(ch);
            } else {
                if !run.is_empty() {
                    out.push_str(&self.name(&run, class, ctx));
                    run.clear();
                }
                out.push(ch);
            }
        }
        if !run.is_empty() {
            out.push_str(&self.name(&run, class, ctx));
        }
        out
    }

    /// Resolved type text without type arguments or array dimensions.
    fn type_name(&self, text: &str, class: &RawClass, ctx: &FileContext) -> String {
        base_type(&self.type_text(text, class, ctx)).to_string()
    }

    /// Class named by a reference-bearing type text, or `None` for primitives.
    fn target_type(&self, text: &str, class: &RawClass, ctx: &FileContext) -> Option<String> {
        let resolved = self.type_text(text, class, ctx);
        let base = base_type(&resolved);
        (!base.is_empty() && !PRIMITIVES.contains(&base)).then(|| base.to_string())
    }
}

fn last_segment(name: &str) -> &str {
    name.rsplit(['.', '$']).next().unwrap_or(name)
}

fn is_root_object(name: &str) -> bool {
    name == "Object" || name == "java.lang.Object"
}

/// Resolves all classes of the parsed files and builds the snapshot.
/// `files` must be ordered by path; the first declaration of a duplicated
/// class name wins.
pub(crate) fn assemble(
    files: Vec<ParsedFile>,
    label: &str,
    root: &str,
) -> Result<(Snapshot, Vec<ParseDiagnostic>), ModelError> {
    let mut diagnostics = Vec::new();
    let mut seen: HashMap<String, String> = HashMap::new();
    let mut kept: Vec<(&FileContext, &str, &RawClass)> = Vec::new();
    let mut packages: BTreeMap<String, Vec<ClassNode>> = BTreeMap::new();

    for file in &files {
        diagnostics.extend(file.diagnostics.iter().cloned());
        if !file.parsed {
            continue;
        }
        packages.entry(file.context.package.clone()).or_default();
        for class in &file.classes {
            if let Some(first) = seen.get(&class.qualified_name) {
                diagnostics.push(ParseDiagnostic {
                    severity: super::Severity::Error,
                    file: file.path.clone(),
                    line: class.line,
                    message: format!(
                        "duplicate class `{}` (first declared in {first}); skipped",
                        class.qualified_name
                    ),
                });
                continue;
            }
            seen.insert(class.qualified_name.clone(), file.path.clone());
            kept.push((&file.context, file.path.as_str(), class));
        }
    }

    let resolver = Resolver {
        known: kept
            .iter()
            .map(|(_, _, c)| (c.qualified_name.as_str(), c.kind))
            .collect(),
    };

    for (ctx, path, raw) in &kept {
        let node = resolve_class(&resolver, ctx, path, raw);
        packages.entry(ctx.package.clone()).or_default().push(node);
    }

    let packages = packages
        .into_iter()
        .map(|(qualified_name, classes)| PackageNode {
            qualified_name,
            classes,
        })
        .collect();
    Ok((Snapshot::new(label, root, packages)?, diagnostics))
}

fn resolve_class(r: &Resolver, ctx: &FileContext, path: &str, raw: &RawClass) -> ClassNode {
    let mut superclass = raw
        .superclass
        .as_ref()
        .map(|s| r.type_name(s, raw, ctx))
        .filter(|s| !is_root_object(s));
    let mut interfaces: Vec<String> = raw.interfaces.iter().map(|i| r.type_name(i, raw, ctx)).collect();
    if let Some(base) = &raw.anonymous_base {
        let resolved = r.type_name(base, raw, ctx);
        if r.known.get(resolved.as_str()) == Some(&ClassKind::Interface) {
            interfaces.push(resolved);
        } else if !is_root_object(&resolved) {
            superclass = Some(resolved);
        }
    }
    let super_target = superclass.clone();
    let own = raw.qualified_name.as_str();

    let owner = |target: &RawTarget| -> Option<String> {
        match target {
            RawTarget::SelfClass => Some(own.to_string()),
            RawTarget::Super => super_target.clone(),
            RawTarget::Type(t) => r.target_type(t, raw, ctx),
            RawTarget::Outer(q) => Some(q.clone()),
            RawTarget::Unknown => None,
        }
    };

    let fields = raw
        .fields
        .iter()
        .map(|f| {
            let mut f = f.clone();
            f.declared_type_name = r.type_text(&f.declared_type_name, raw, ctx);
            f
        })
        .collect();

    let methods = raw
        .methods
        .iter()
        .map(|m| {
            let mut node = m.node.clone();
            node.return_type_name = node.return_type_name.map(|t| r.type_text(&t, raw, ctx));
            node.parameter_type_names = node
                .parameter_type_names
                .iter()
                .map(|t| r.type_text(t, raw, ctx))
                .collect();
            let mut counts: BTreeMap<(Option<String>, String), u32> = BTreeMap::new();
            for (target, method) in &m.calls {
                *counts.entry((owner(target), method.clone())).or_default() += 1;
            }
            node.calls = counts
                .into_iter()
                .map(|((target, method), count)| CallSite { target, method, count })
                .collect();
            let mut foreign = BTreeSet::new();
            for (target, field) in &m.foreign_fields {
                match owner(target) {
                    Some(class) if class == own => {
                        if raw.fields.iter().any(|f| &f.name == field) {
                            node.accessed_own_fields.insert(field.clone());
                        }
                    }
                    Some(class) => {
                        foreign.insert(ForeignField {
                            class,
                            field: field.clone(),
                        });
                    }
                    None => {}
                }
            }
            node.accessed_foreign_fields = foreign;
            node
        })
        .collect();

    ClassNode {
        qualified_name: raw.qualified_name.clone(),
        kind: raw.kind,
        source_file: path.to_string(),
        line: raw.line,
        superclass_name: superclass,
        implemented_interfaces: interfaces,
        fields,
        methods,
        doc_comment_present: raw.doc_comment_present,
        line_count: raw.line_count,
        comments: raw.comments.clone(),
        string_literals: raw.string_literals.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_file;
    use super::*;

    fn build(files: &[(&str, &str)]) -> (Snapshot, Vec<ParseDiagnostic>) {
        let parsed = files.iter().map(|(p, s)| parse_file(p, s)).collect();
        assemble(parsed, "v", "root").unwrap()
    }

    #[test]
    fn resolves_same_package_imports_and_nested() {
        let (snap, diags) = build(&[
            (
                "a/A.java",
                "package a; import b.B; class A extends B { In x; B.Deep d; class In {} void m(){ x.go(); new C(); } }",
            ),
            ("a/C.java", "package a; class C { }"),
            ("b/B.java", "package b; public class B { public static class Deep {} }"),
        ]);
        assert!(diags.is_empty(), "{diags:?}");
        let a = snap.lookup_class("a.A").unwrap();
        assert_eq!(a.superclass_name.as_deref(), Some("b.B"));
        let ty = |n: &str| {
            a.fields
                .iter()
                .find(|f| f.name == n)
                .unwrap()
                .declared_type_name
                .clone()
        };
        assert_eq!(ty("x"), "a.A$In");
        assert_eq!(ty("d"), "b.B$Deep");
        let targets: Vec<_> = a.methods[0].calls.iter().map(|c| c.target.clone()).collect();
        assert_eq!(targets, [Some("a.A$In".to_string()), Some("a.C".to_string())]);
    }

    #[test]
    fn object_superclass_is_absent_and_externals_kept() {
        let (snap, _) = build(&[(
            "X.java",
            "import java.util.List; class X extends Object { List<X> xs; Foo f; }",
        )]);
        let x = snap.lookup_class("X").unwrap();
        assert_eq!(x.superclass_name, None);
        assert_eq!(x.fields[0].declared_type_name, "Foo");
        assert_eq!(x.fields[1].declared_type_name, "java.util.List<X>");
    }

    #[test]
    fn self_qualified_field_access_becomes_own() {
        let (snap, _) = build(&[(
            "P.java",
            "class P { int v; P other; void m(){ other.v = 1; other.w = 2; q.z(); } }",
        )]);
        let m = &snap.lookup_class("P").unwrap().methods[0];
        assert!(m.accessed_own_fields.contains("v"));
        assert!(m.accessed_foreign_fields.is_empty());
        assert_eq!(m.calls[0].target, None);
    }

    #[test]
    fn anonymous_class_of_known_interface() {
        let (snap, _) = build(&[
            ("I.java", "interface I { void f(); }"),
            (
                "U.java",
                "class U { I i = new I() { public void f() {} }; Object o = new Object() {}; }",
            ),
        ]);
        let anon = snap.lookup_class("U$1").unwrap();
        assert_eq!(anon.implemented_interfaces, ["I"]);
        assert_eq!(anon.superclass_name, None);
        assert_eq!(snap.lookup_class("U$2").unwrap().superclass_name, None);
    }

    #[test]
    fn duplicate_class_keeps_first_file() {
        let (snap, diags) = build(&[("a/A.java", "class A { int x; }"), ("b/A.java", "class A { }")]);
        assert_eq!(snap.lookup_class("A").unwrap().source_file, "a/A.java");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("duplicate class"));
    }
}
