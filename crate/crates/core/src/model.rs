//! Language-neutral representation of one parsed version snapshot.
//!
//! Everything downstream (metrics, the three maintainability models, the
//! evolution pipeline) consumes a [`Snapshot`]. A snapshot is validated and
//! canonically ordered at construction and is read-only afterwards.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate package name `{0}`")]
    DuplicatePackage(String),
    #[error("duplicate class name `{0}`")]
    DuplicateClass(String),
    #[error("class `{class}` has line_count 0 (must be at least 1)")]
    EmptyClass { class: String },
    #[error("class `{class}` is not a member of package `{package}`")]
    ForeignClass { class: String, package: String },
    #[error("field in class `{class}` has an empty name")]
    EmptyFieldName { class: String },
    #[error("method `{class}.{method}` has more distinct {what} than occurrences")]
    HalsteadCounts {
        class: String,
        method: String,
        what: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Class,
    Interface,
    Enum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub name: String,
    pub declared_type_name: String,
    pub doc_comment_present: bool,
}

/// A field touched by a method of another class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ForeignField {
    pub class: String,
    pub field: String,
}

/// Call sites sharing one `(target, method)` identity.
///
/// `target` is `None` when the receiver type could not be determined.
/// Constructor invocations use the method name `<init>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CallSite {
    pub target: Option<String>,
    pub method: String,
    pub count: u32,
}

/// One full expression and the number of conditional operators
/// (`&&`, `||`, `?:`) it contains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpressionFact {
    pub line: u32,
    pub conditional_operators: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodNode {
    pub name: String,
    pub line: u32,
    pub line_count: u32,
    /// `None` for constructors.
    pub return_type_name: Option<String>,
    pub parameter_type_names: Vec<String>,
    /// Abstract and interface methods have no body.
    pub has_body: bool,
    pub statements: u32,
    pub decision_points: u32,
    pub operator_occurrences: u32,
    pub distinct_operators: u32,
    pub operand_occurrences: u32,
    pub distinct_operands: u32,
    pub accessed_own_fields: BTreeSet<String>,
    pub accessed_foreign_fields: BTreeSet<ForeignField>,
    pub calls: Vec<CallSite>,
    pub doc_comment_present: bool,
    pub max_nesting_depth: u32,
    /// Expressions with at least one conditional operator.
    pub expressions: Vec<ExpressionFact>,
    pub empty_catch_lines: Vec<u32>,
}

impl MethodNode {
    /// A bodiless method with every count at zero.
    pub fn new(name: impl Into<String>) -> Self {
        MethodNode {
            name: name.into(),
            line: 1,
            line_count: 1,
            return_type_name: Some("void".to_string()),
            parameter_type_names: Vec::new(),
            has_body: true,
            statements: 0,
            decision_points: 0,
            operator_occurrences: 0,
            distinct_operators: 0,
            operand_occurrences: 0,
            distinct_operands: 0,
            accessed_own_fields: BTreeSet::new(),
            accessed_foreign_fields: BTreeSet::new(),
            calls: Vec::new(),
            doc_comment_present: false,
            max_nesting_depth: 0,
            expressions: Vec::new(),
            empty_catch_lines: Vec::new(),
        }
    }

    /// Distinct `(target, method)` pairs invoked by this method.
    pub fn invoked_methods(&self) -> BTreeSet<(Option<&str>, &str)> {
        self.calls
            .iter()
            .map(|c| (c.target.as_deref(), c.method.as_str()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommentKind {
    Line,
    Block,
    Doc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub line: u32,
    pub kind: CommentKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringLiteralUse {
    /// Literal contents as written, without the quotes.
    pub value: String,
    pub count: u32,
    pub first_line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNode {
    pub qualified_name: String,
    pub kind: ClassKind,
    pub source_file: String,
    pub line: u32,
    pub superclass_name: Option<String>,
    pub implemented_interfaces: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodNode>,
    pub doc_comment_present: bool,
    pub line_count: u32,
    pub comments: Vec<Comment>,
    pub string_literals: Vec<StringLiteralUse>,
}

impl ClassNode {
    pub fn new(qualified_name: impl Into<String>, kind: ClassKind) -> Self {
        ClassNode {
            qualified_name: qualified_name.into(),
            kind,
            source_file: String::new(),
            line: 1,
            superclass_name: None,
            implemented_interfaces: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            doc_comment_present: false,
            line_count: 1,
            comments: Vec::new(),
            string_literals: Vec::new(),
        }
    }

    /// Name after the last package dot and the last `$`.
    pub fn simple_name(&self) -> &str {
        let tail = self.qualified_name.rsplit('.').next().unwrap_or(&self.qualified_name);
        tail.rsplit('$').next().unwrap_or(tail)
    }

    /// Nested, local and anonymous classes carry a `$` in their name.
    pub fn is_nested(&self) -> bool {
        self.qualified_name.contains('$')
    }

    pub fn has_field(&self, name: &str) -> bool {
        self.fields.iter().any(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageNode {
    /// Empty for the default package.
    pub qualified_name: String,
    pub classes: Vec<ClassNode>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeVector {
    pub n_packages: u64,
    pub n_classes: u64,
    pub n_methods: u64,
    pub n_statements: u64,
    pub n_lines: u64,
}

/// One version of an application's source tree.
///
/// Packages, classes and methods are kept in lexicographic order of their
/// names so traversal is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    version_label: String,
    source_root: String,
    packages: Vec<PackageNode>,
}

#[derive(Deserialize)]
struct RawSnapshot {
    version_label: String,
    source_root: String,
    packages: Vec<PackageNode>,
}

impl<'de> Deserialize<'de> for Snapshot {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawSnapshot::deserialize(de)?;
        Snapshot::new(raw.version_label, raw.source_root, raw.packages).map_err(serde::de::Error::custom)
    }
}

impl Snapshot {
    pub fn new(
        version_label: impl Into<String>,
        source_root: impl Into<String>,
        mut packages: Vec<PackageNode>,
    ) -> Result<Self, ModelError> {
        packages.sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name));
        let mut class_names = HashSet::new();
        for pair in packages.windows(2) {
            if pair[0].qualified_name == pair[1].qualified_name {
                return Err(ModelError::DuplicatePackage(pair[0].qualified_name.clone()));
            }
        }
        for package in &mut packages {
            package.classes.sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name));
            for class in &mut package.classes {
                validate_class(class, &package.qualified_name)?;
                if !class_names.insert(class.qualified_name.clone()) {
                    return Err(ModelError::DuplicateClass(class.qualified_name.clone()));
                }
            }
        }
        Ok(Snapshot {
            version_label: version_label.into(),
            source_root: source_root.into(),
            packages,
        })
    }

    pub fn empty(version_label: impl Into<String>) -> Self {
        Snapshot {
            version_label: version_label.into(),
            source_root: String::new(),
            packages: Vec::new(),
        }
    }

    pub fn version_label(&self) -> &str {
        &self.version_label
    }

    pub fn source_root(&self) -> &str {
        &self.source_root
    }

    pub fn packages(&self) -> &[PackageNode] {
        &self.packages
    }

    /// Same contents under a different version label.
    pub fn relabeled(&self, label: impl Into<String>) -> Snapshot {
        Snapshot {
            version_label: label.into(),
            ..self.clone()
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassNode> {
        self.packages.iter().flat_map(|p| p.classes.iter())
    }

    /// Classes paired with the name of their package.
    pub fn classes_with_package(&self) -> impl Iterator<Item = (&str, &ClassNode)> {
        self.packages
            .iter()
            .flat_map(|p| p.classes.iter().map(move |c| (p.qualified_name.as_str(), c)))
    }

    pub fn lookup_class(&self, qualified_name: &str) -> Option<&ClassNode> {
        self.classes().find(|c| c.qualified_name == qualified_name)
    }

    pub fn package_of(&self, qualified_name: &str) -> Option<&str> {
        self.classes_with_package()
            .find(|(_, c)| c.qualified_name == qualified_name)
            .map(|(p, _)| p)
    }

    pub fn size_vector(&self) -> SizeVector {
        let mut size = SizeVector {
            n_packages: self.packages.len() as u64,
            ..SizeVector::default()
        };
        for class in self.classes() {
            size.n_classes += 1;
            size.n_methods += class.methods.len() as u64;
            size.n_statements += class.methods.iter().map(|m| u64::from(m.statements)).sum::<u64>();
            // Nested classes lie inside their outer class's line span.
            if !class.is_nested() {
                size.n_lines += u64::from(class.line_count);
            }
        }
        size
    }
}

fn validate_class(class: &mut ClassNode, package: &str) -> Result<(), ModelError> {
    let in_package = if package.is_empty() {
        !class.qualified_name.contains('.')
    } else {
        class
            .qualified_name
            .strip_prefix(package)
            .and_then(|rest| rest.strip_prefix('.'))
            .is_some_and(|rest| !rest.contains('.'))
    };
    if !in_package {
        return Err(ModelError::ForeignClass {
            class: class.qualified_name.clone(),
            package: package.to_string(),
        });
    }
    if class.line_count == 0 {
        return Err(ModelError::EmptyClass {
            class: class.qualified_name.clone(),
        });
    }
    if class.fields.iter().any(|f| f.name.is_empty()) {
        return Err(ModelError::EmptyFieldName {
            class: class.qualified_name.clone(),
        });
    }
    for method in &mut class.methods {
        let what = if method.distinct_operators > method.operator_occurrences {
            Some("operators")
        } else if method.distinct_operands > method.operand_occurrences {
            Some("operands")
        } else {
            None
        };
        if let Some(what) = what {
            return Err(ModelError::HalsteadCounts {
                class: class.qualified_name.clone(),
                method: method.name.clone(),
                what,
            });
        }
        method.calls.sort();
        method.expressions.sort();
        method.empty_catch_lines.sort_unstable();
    }
    // Overloads share a name, so the parameter list and line break ties.
    class
        .methods
        .sort_by(|a, b| (&a.name, &a.parameter_type_names, a.line).cmp(&(&b.name, &b.parameter_type_names, b.line)));
    class.fields.sort_by(|a, b| a.name.cmp(&b.name));
    class.string_literals.sort_by(|a, b| a.value.cmp(&b.value));
    class.comments.sort_by_key(|c| c.line);
    Ok(())
}
