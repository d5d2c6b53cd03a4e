//! Declaration-level parser for one source file.
//!
//! Parsing runs in two phases per class: the structure pass collects
//! fields, method signatures and member classes; the body pass then
//! analyzes code regions once every enclosing field is known. Anonymous
//! and local classes found in code regions are carved out and flattened
//! into their own classes named `Outer$1`, `Outer$1Local`.

use std::collections::{BTreeSet, HashMap};

use super::body::{analyze_body, BodyFacts, RawTarget, Scope};
use super::lexer::{tokenize, RawComment, Token, TokenKind};
use super::syntax::{angle_close, bracket_pairs, generic_mask, parse_type, skip_annotations, NONE};
use super::{ParseDiagnostic, Severity};
use crate::model::{ClassKind, Comment, CommentKind, FieldDecl, MethodNode, StringLiteralUse};

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
];

/// Import context used to resolve simple type names.
#[derive(Debug, Default, Clone)]
pub(crate) struct FileContext {
    pub package: String,
    /// Simple name to imported dotted name.
    pub single_imports: HashMap<String, String>,
    pub on_demand: Vec<String>,
}

#[derive(Debug)]
pub(crate) struct RawMethod {
    pub node: MethodNode,
    pub calls: Vec<(RawTarget, String)>,
    pub foreign_fields: Vec<(RawTarget, String)>,
}

#[derive(Debug)]
pub(crate) struct RawClass {
    pub qualified_name: String,
    /// Enclosing classes, innermost first.
    pub enclosing: Vec<String>,
    pub kind: ClassKind,
    pub line: u32,
    pub line_count: u32,
    pub superclass: Option<String>,
    pub interfaces: Vec<String>,
    /// Supertype named in `new T() { ... }`.
    pub anonymous_base: Option<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<RawMethod>,
    pub doc_comment_present: bool,
    pub comments: Vec<Comment>,
    pub string_literals: Vec<StringLiteralUse>,
    body_span: (usize, usize),
}

#[derive(Debug)]
pub(crate) struct ParsedFile {
    pub path: String,
    pub context: FileContext,
    pub classes: Vec<RawClass>,
    pub diagnostics: Vec<ParseDiagnostic>,
    /// False when a file-level failure caused the file to be skipped.
    pub parsed: bool,
}

struct MethodDraft {
    name: String,
    line: u32,
    line_count: u32,
    return_type: Option<String>,
    params: Vec<(String, String)>,
    body: Option<usize>,
    doc: bool,
}

enum Region {
    Method(usize),
    Initializer(usize),
    FieldInit(usize, usize),
    ConstantBody(usize),
}

struct ClassDraft {
    qualified_name: String,
    kind: ClassKind,
    line: u32,
    line_count: u32,
    superclass: Option<String>,
    interfaces: Vec<String>,
    anonymous_base: Option<String>,
    doc: bool,
    open: usize,
    close: usize,
    fields: Vec<FieldDecl>,
    methods: Vec<MethodDraft>,
    /// Code regions keyed by their first token, in source order.
    regions: Vec<(usize, Region)>,
    nested: Vec<ClassDraft>,
}

enum Carved {
    Anonymous { base: String, start: usize, open: usize },
    Local { start: usize, keyword: usize },
}

pub(crate) fn parse_file(path: &str, source: &str) -> ParsedFile {
    let mut parsed = ParsedFile {
        path: path.to_string(),
        context: FileContext::default(),
        classes: Vec::new(),
        diagnostics: Vec::new(),
        parsed: false,
    };
    let lexed = match tokenize(source) {
        Ok(l) => l,
        Err(e) => {
            parsed.diagnostics.push(ParseDiagnostic::error(path, e.line, e.message));
            return parsed;
        }
    };
    let toks: Vec<&Token> = lexed.tokens.iter().collect();
    let pairs = match bracket_pairs(&toks) {
        Ok(p) => p,
        Err(line) => {
            parsed
                .diagnostics
                .push(ParseDiagnostic::error(path, line, "unbalanced brackets"));
            return parsed;
        }
    };
    let mut parser = FileParser {
        generic: generic_mask(&toks),
        toks,
        pairs,
        comments: &lexed.comments,
        comment_offsets: lexed.comments.iter().map(|c| c.offset).collect(),
        path,
        context: FileContext::default(),
        drafts: Vec::new(),
        classes: Vec::new(),
        diagnostics: Vec::new(),
    };
    match parser.compilation_unit() {
        Ok(()) => {
            let drafts = std::mem::take(&mut parser.drafts);
            for draft in drafts {
                parser.finish_class(draft, &[]);
            }
            parser.attach_comments_and_literals();
            parsed.parsed = true;
            parsed.classes = parser.classes;
            parsed.context = parser.context;
            parsed.diagnostics = parser.diagnostics;
        }
        Err((line, message)) => {
            parsed.diagnostics = parser.diagnostics;
            parsed
                .diagnostics
                .push(ParseDiagnostic::error(path, line, format!("{message}; file skipped")));
        }
    }
    parsed
}

type Failure = (u32, String);

struct FileParser<'a> {
    toks: Vec<&'a Token>,
    pairs: Vec<usize>,
    generic: Vec<bool>,
    comments: &'a [RawComment],
    comment_offsets: Vec<usize>,
    path: &'a str,
    context: FileContext,
    drafts: Vec<ClassDraft>,
    classes: Vec<RawClass>,
    diagnostics: Vec<ParseDiagnostic>,
}

impl<'a> FileParser<'a> {
    fn at(&self, i: usize, text: &str) -> bool {
        self.toks.get(i).is_some_and(|t| t.is(text))
    }

    fn ident_at(&self, i: usize) -> Option<&'a str> {
        self.toks.get(i).filter(|t| t.is_ident()).map(|t| t.text.as_str())
    }

    fn line(&self, i: usize) -> u32 {
        self.toks.get(i).or(self.toks.last()).map_or(1, |t| t.line)
    }

    fn fail<T>(&self, i: usize, message: impl Into<String>) -> Result<T, Failure> {
        Err((self.line(i), message.into()))
    }

    fn warn(&mut self, i: usize, message: impl Into<String>) {
        let line = self.line(i);
        self.diagnostics
            .push(ParseDiagnostic::warning(self.path, line, message));
    }

    /// Dotted name starting at `pos`; returns the name and the index after it.
    fn dotted_name(&self, pos: usize) -> Option<(String, usize)> {
        let mut name = self.ident_at(pos)?.to_string();
        let mut i = pos + 1;
        while self.at(i, ".") {
            match self.ident_at(i + 1) {
                Some(seg) => {
                    name.push('.');
                    name.push_str(seg);
                    i += 2;
                }
                None => break,
            }
        }
        Some((name, i))
    }

    fn compilation_unit(&mut self) -> Result<(), Failure> {
        let mut pos = 0;
        let after_annotations = skip_annotations(&self.toks, &self.pairs, pos);
        if self.at(after_annotations, "package") {
            let Some((name, next)) = self.dotted_name(after_annotations + 1) else {
                return self.fail(after_annotations, "malformed package declaration");
            };
            if !self.at(next, ";") {
                return self.fail(next, "expected `;` after package declaration");
            }
            self.context.package = name;
            pos = next + 1;
        }
        while self.at(pos, "import") {
            let mut p = pos + 1;
            let is_static = self.at(p, "static");
            if is_static {
                p += 1;
            }
            let Some((name, mut next)) = self.dotted_name(p) else {
                return self.fail(p, "malformed import");
            };
            let on_demand = self.at(next, ".") && self.at(next + 1, "*");
            if on_demand {
                next += 2;
            }
            if !self.at(next, ";") {
                return self.fail(next, "expected `;` after import");
            }
            if !is_static {
                if on_demand {
                    self.context.on_demand.push(name);
                } else {
                    let simple = name.rsplit('.').next().unwrap_or(&name).to_string();
                    self.context.single_imports.insert(simple, name);
                }
            }
            pos = next + 1;
        }
        let prefix = if self.context.package.is_empty() {
            String::new()
        } else {
            format!("{}.", self.context.package)
        };
        while pos < self.toks.len() {
            if self.at(pos, ";") {
                pos += 1;
                continue;
            }
            let start = pos;
            let p = self.skip_modifiers(pos);
            if let Some(next) = self.skip_unsupported(p) {
                pos = next;
                continue;
            }
            if !(self.at(p, "class") || self.at(p, "interface") || self.at(p, "enum")) {
                return self.fail(p, "expected a type declaration");
            }
            let Some(name) = self.ident_at(p + 1) else {
                return self.fail(p + 1, "expected a type name");
            };
            let draft = self.class_declaration(start, p, format!("{prefix}{name}"))?;
            pos = draft.close + 1;
            self.drafts.push(draft);
        }
        Ok(())
    }

    fn skip_modifiers(&self, mut pos: usize) -> usize {
        loop {
            let p = skip_annotations(&self.toks, &self.pairs, pos);
            let Some(t) = self.toks.get(p) else { return p };
            if (t.kind == TokenKind::Keyword && MODIFIERS.contains(&t.text.as_str()))
                || (t.is_ident() && t.text == "sealed")
            {
                pos = p + 1;
            } else if t.is_ident() && t.text == "non" && self.at(p + 1, "-") && self.ident_at(p + 2) == Some("sealed") {
                pos = p + 3;
            } else {
                return p;
            }
        }
    }

    /// Skips records and annotation type declarations with a warning.
    fn skip_unsupported(&mut self, p: usize) -> Option<usize> {
        let what = if self.at(p, "@") && self.at(p + 1, "interface") {
            "annotation type declaration"
        } else if self.ident_at(p) == Some("record") && self.ident_at(p + 1).is_some() {
            "record declaration"
        } else {
            return None;
        };
        let open = (p..self.toks.len()).find(|&i| self.at(i, "{"))?;
        self.warn(p, format!("unsupported {what} skipped"));
        Some(self.pairs[open] + 1)
    }

    fn doc_before(&self, idx: usize) -> bool {
        let Some(t) = self.toks.get(idx) else { return false };
        let lower = idx.checked_sub(1).map(|p| self.toks[p].offset);
        self.comments
            .iter()
            .any(|c| c.kind == CommentKind::Doc && lower.is_none_or(|l| c.offset > l) && c.offset < t.offset)
    }

    fn type_list(&self, mut pos: usize) -> (Vec<String>, usize) {
        let mut types = Vec::new();
        while let Some((ty, next)) = parse_type(&self.toks, &self.pairs, pos) {
            types.push(ty);
            pos = next;
            if self.at(pos, ",") {
                pos += 1;
            } else {
                break;
            }
        }
        (types, pos)
    }

    fn class_declaration(
        &mut self,
        start: usize,
        keyword: usize,
        qualified_name: String,
    ) -> Result<ClassDraft, Failure> {
        let kind = match self.toks[keyword].text.as_str() {
            "interface" => ClassKind::Interface,
            "enum" => ClassKind::Enum,
            _ => ClassKind::Class,
        };
        let mut p = keyword + 2;
        if self.at(p, "<") {
            match angle_close(&self.toks, p) {
                Some(end) => p = end + 1,
                None => return self.fail(p, "malformed type parameters"),
            }
        }
        let mut superclass = None;
        let mut interfaces = Vec::new();
        loop {
            if self.at(p, "extends") {
                let (types, next) = self.type_list(p + 1);
                if kind == ClassKind::Interface {
                    interfaces.extend(types);
                } else {
                    superclass = types.into_iter().next();
                }
                p = next;
            } else if self.at(p, "implements") {
                let (types, next) = self.type_list(p + 1);
                interfaces.extend(types);
                p = next;
            } else if self.ident_at(p) == Some("permits") {
                p = self.type_list(p + 1).1;
            } else {
                break;
            }
        }
        if !self.at(p, "{") {
            return self.fail(p, format!("expected class body for `{qualified_name}`"));
        }
        let open = p;
        let close = self.pairs[open];
        let mut draft = ClassDraft {
            line: self.line(start),
            line_count: self.line(close) - self.line(start) + 1,
            doc: self.doc_before(start),
            qualified_name,
            kind,
            superclass,
            interfaces,
            anonymous_base: None,
            open,
            close,
            fields: Vec::new(),
            methods: Vec::new(),
            regions: Vec::new(),
            nested: Vec::new(),
        };
        self.members(&mut draft);
        Ok(draft)
    }

    fn members(&mut self, draft: &mut ClassDraft) {
        let close = draft.close;
        let mut pos = draft.open + 1;
        if draft.kind == ClassKind::Enum {
            pos = self.enum_constants(draft, pos);
        }
        while pos < close {
            pos = match self.member(draft, pos) {
                Ok(next) => next.max(pos + 1),
                Err((line, message)) => {
                    self.diagnostics.push(ParseDiagnostic::warning(
                        self.path,
                        line,
                        format!("{message}; member skipped"),
                    ));
                    self.recover(pos, close)
                }
            };
        }
    }

    fn recover(&self, pos: usize, close: usize) -> usize {
        let mut i = pos;
        while i < close {
            if self.at(i, "{") {
                return self.pairs[i] + 1;
            }
            if self.at(i, ";") {
                return i + 1;
            }
            i += 1;
        }
        close
    }

    fn enum_constants(&mut self, draft: &mut ClassDraft, mut pos: usize) -> usize {
        let enum_name = draft
            .qualified_name
            .rsplit(['.', '$'])
            .next()
            .unwrap_or_default()
            .to_string();
        loop {
            if self.at(pos, ";") {
                return pos + 1;
            }
            let start = pos;
            let p = skip_annotations(&self.toks, &self.pairs, pos);
            let Some(name) = self.ident_at(p) else {
                return pos;
            };
            draft.fields.push(FieldDecl {
                name: name.to_string(),
                declared_type_name: enum_name.clone(),
                doc_comment_present: self.doc_before(start),
            });
            let mut q = p + 1;
            if self.at(q, "(") {
                q = self.pairs[q] + 1;
            }
            if self.at(q, "{") {
                draft.regions.push((q, Region::ConstantBody(q)));
                q = self.pairs[q] + 1;
            }
            if self.at(q, ",") {
                pos = q + 1;
            } else if self.at(q, ";") {
                return q + 1;
            } else {
                return q;
            }
        }
    }

    fn member(&mut self, draft: &mut ClassDraft, pos: usize) -> Result<usize, Failure> {
        if self.at(pos, ";") {
            return Ok(pos + 1);
        }
        let block = if self.at(pos, "{") {
            Some(pos)
        } else if self.at(pos, "static") && self.at(pos + 1, "{") {
            Some(pos + 1)
        } else {
            None
        };
        if let Some(open) = block {
            draft.regions.push((open, Region::Initializer(open)));
            return Ok(self.pairs[open] + 1);
        }
        let start = pos;
        let doc = self.doc_before(start);
        let mut p = self.skip_modifiers(pos);
        if let Some(next) = self.skip_unsupported(p) {
            return Ok(next);
        }
        if self.at(p, "class") || self.at(p, "interface") || self.at(p, "enum") {
            let Some(name) = self.ident_at(p + 1) else {
                return self.fail(p + 1, "expected a type name");
            };
            let qualified = format!("{}${}", draft.qualified_name, name);
            let child = self.class_declaration(start, p, qualified)?;
            let next = child.close + 1;
            draft.nested.push(child);
            return Ok(next);
        }
        if self.at(p, "<") {
            match angle_close(&self.toks, p) {
                Some(end) => p = end + 1,
                None => return self.fail(p, "malformed type parameters"),
            }
        }
        if let Some(name) = self.ident_at(p) {
            if self.at(p + 1, "(") {
                return self.method_rest(draft, start, doc, name.to_string(), None, p + 1);
            }
        }
        let Some((ty, after)) = parse_type(&self.toks, &self.pairs, p) else {
            return self.fail(p, "expected a member declaration");
        };
        let Some(name) = self.ident_at(after) else {
            return self.fail(after, "expected a member name");
        };
        if self.at(after + 1, "(") {
            return self.method_rest(draft, start, doc, name.to_string(), Some(ty), after + 1);
        }
        self.field_declarators(draft, doc, ty, after)
    }

    fn method_rest(
        &mut self,
        draft: &mut ClassDraft,
        start: usize,
        doc: bool,
        name: String,
        return_type: Option<String>,
        paren: usize,
    ) -> Result<usize, Failure> {
        let close = self.pairs[paren];
        let params = self.parameters(paren + 1, close)?;
        let mut p = close + 1;
        while self.at(p, "[") && self.at(p + 1, "]") {
            p += 2;
        }
        if self.at(p, "throws") {
            p = self.type_list(p + 1).1;
        }
        if self.at(p, "default") {
            while p < draft.close && !self.at(p, ";") {
                p += 1;
            }
        }
        let (body, end, next) = if self.at(p, "{") {
            (Some(p), self.pairs[p], self.pairs[p] + 1)
        } else if self.at(p, ";") {
            (None, p, p + 1)
        } else {
            return self.fail(p, format!("expected body of method `{name}`"));
        };
        if let Some(open) = body {
            draft.regions.push((open, Region::Method(draft.methods.len())));
        }
        draft.methods.push(MethodDraft {
            name,
            line: self.line(start),
            line_count: self.line(end) - self.line(start) + 1,
            return_type,
            params,
            body,
            doc,
        });
        Ok(next)
    }

    fn parameters(&self, start: usize, close: usize) -> Result<Vec<(String, String)>, Failure> {
        let mut params = Vec::new();
        let mut p = start;
        while p < close {
            p = skip_annotations(&self.toks, &self.pairs, p);
            if self.at(p, "final") {
                p += 1;
            }
            let Some((mut ty, after)) = parse_type(&self.toks, &self.pairs, p) else {
                return self.fail(p, "malformed parameter list");
            };
            p = after;
            if self.at(p, "this") {
                p += 1;
            } else {
                let Some(name) = self.ident_at(p) else {
                    return self.fail(p, "expected a parameter name");
                };
                p += 1;
                while self.at(p, "[") && self.at(p + 1, "]") {
                    ty.push_str("[]");
                    p += 2;
                }
                params.push((ty, name.to_string()));
            }
            if self.at(p, ",") {
                p += 1;
            } else if p != close {
                return self.fail(p, "malformed parameter list");
            }
        }
        Ok(params)
    }

    fn find_initializer_end(&self, start: usize, limit: usize) -> usize {
        let mut i = start;
        while i < limit {
            if self.generic[i] {
                i += 1;
                continue;
            }
            let t = self.toks[i];
            if t.kind == TokenKind::Punct && matches!(t.text.as_str(), "(" | "[" | "{") {
                i = self.pairs[i] + 1;
                continue;
            }
            if t.is(",") || t.is(";") {
                return i;
            }
            i += 1;
        }
        limit
    }

    fn field_declarators(
        &mut self,
        draft: &mut ClassDraft,
        doc: bool,
        ty: String,
        mut j: usize,
    ) -> Result<usize, Failure> {
        loop {
            let Some(name) = self.ident_at(j) else {
                return self.fail(j, "expected a field name");
            };
            let mut declared = ty.clone();
            j += 1;
            while self.at(j, "[") && self.at(j + 1, "]") {
                declared.push_str("[]");
                j += 2;
            }
            if self.at(j, "=") {
                let end = self.find_initializer_end(j + 1, draft.close);
                draft.regions.push((j + 1, Region::FieldInit(j + 1, end)));
                j = end;
            }
            draft.fields.push(FieldDecl {
                name: name.to_string(),
                declared_type_name: declared,
                doc_comment_present: doc,
            });
            if self.at(j, ",") {
                j += 1;
                continue;
            }
            if self.at(j, ";") {
                return Ok(j + 1);
            }
            return self.fail(j, "expected `;` after field declaration");
        }
    }

    /// Removes anonymous and local class bodies from `[start, end)`.
    fn carve(&mut self, start: usize, end: usize) -> (Vec<usize>, Vec<Carved>) {
        let mut kept = Vec::new();
        let mut carved = Vec::new();
        let mut i = start;
        while i < end {
            let t = self.toks[i];
            if t.is("new") {
                if let Some((ty, after)) = parse_type(&self.toks, &self.pairs, i + 1) {
                    if self.at(after, "(") {
                        let body = self.pairs[after] + 1;
                        if body < end && self.at(body, "{") {
                            kept.extend(i..body);
                            carved.push(Carved::Anonymous {
                                base: ty,
                                start: i,
                                open: body,
                            });
                            i = self.pairs[body] + 1;
                            continue;
                        }
                    }
                }
            }
            let declares = (t.is("class") || t.is("interface") || t.is("enum"))
                && !(i > 0 && self.toks[i - 1].is("."))
                && self.ident_at(i + 1).is_some();
            let record = t.is_ident()
                && t.text == "record"
                && self.ident_at(i + 1).is_some()
                && self.at(i + 2, "(")
                && !(i > 0 && self.toks[i - 1].is("."));
            if declares || record {
                if let Some(open) = (i..end).find(|&k| self.at(k, "{")) {
                    let mut decl_start = i;
                    while let Some(&last) = kept.last() {
                        let lt: &Token = self.toks[last];
                        if lt.kind == TokenKind::Keyword && MODIFIERS.contains(&lt.text.as_str()) {
                            kept.pop();
                            decl_start = last;
                        } else {
                            break;
                        }
                    }
                    if record {
                        self.warn(i, "unsupported record declaration skipped");
                    } else {
                        carved.push(Carved::Local {
                            start: decl_start,
                            keyword: i,
                        });
                    }
                    i = self.pairs[open] + 1;
                    continue;
                }
            }
            kept.push(i);
            i += 1;
        }
        (kept, carved)
    }

    /// Body pass: analyzes code regions of `draft` and emits it together
    /// with every class nested in it.
    fn finish_class(&mut self, mut draft: ClassDraft, outer: &[(String, HashMap<String, String>)]) {
        let own_fields: HashMap<String, String> = draft
            .fields
            .iter()
            .map(|f| (f.name.clone(), f.declared_type_name.clone()))
            .collect();
        let mut chain = Vec::with_capacity(outer.len() + 1);
        chain.push((draft.qualified_name.clone(), own_fields.clone()));
        chain.extend_from_slice(outer);

        let mut anonymous = 0u32;
        let mut locals: HashMap<String, u32> = HashMap::new();
        let mut methods: Vec<Option<RawMethod>> = draft.methods.iter().map(|_| None).collect();
        let mut regions = std::mem::take(&mut draft.regions);
        regions.sort_by_key(|(k, _)| *k);

        for (_, region) in regions {
            let (start, end) = match region {
                Region::Method(m) => {
                    let open = draft.methods[m].body.unwrap_or(NONE);
                    (open, self.pairs[open] + 1)
                }
                Region::Initializer(open) => (open, self.pairs[open] + 1),
                Region::FieldInit(s, e) => (s, e),
                Region::ConstantBody(open) => {
                    anonymous += 1;
                    let child = self.anonymous_draft(
                        format!("{}${anonymous}", draft.qualified_name),
                        draft
                            .qualified_name
                            .rsplit(['.', '$'])
                            .next()
                            .unwrap_or_default()
                            .to_string(),
                        open - 1,
                        open,
                    );
                    self.finish_class(child, &chain);
                    continue;
                }
            };
            let (kept, carved) = self.carve(start, end);
            for c in carved {
                let child = match c {
                    Carved::Anonymous { base, start, open } => {
                        anonymous += 1;
                        self.anonymous_draft(format!("{}${anonymous}", draft.qualified_name), base, start, open)
                    }
                    Carved::Local { start, keyword } => {
                        let name = self.ident_at(keyword + 1).unwrap_or_default().to_string();
                        let n = locals.entry(name.clone()).or_default();
                        *n += 1;
                        let qualified = format!("{}${}{}", draft.qualified_name, n, name);
                        match self.class_declaration(start, keyword, qualified) {
                            Ok(child) => child,
                            Err((line, message)) => {
                                self.diagnostics
                                    .push(ParseDiagnostic::warning(self.path, line, message));
                                continue;
                            }
                        }
                    }
                };
                self.finish_class(child, &chain);
            }
            if let Region::Method(m) = region {
                let toks: Vec<&Token> = kept.iter().map(|&k| self.toks[k]).collect();
                let method = &draft.methods[m];
                let params: Vec<(String, String)> = method.params.iter().map(|(t, n)| (n.clone(), t.clone())).collect();
                let scope = Scope {
                    own_fields: &own_fields,
                    outer,
                    params: &params,
                    comment_offsets: &self.comment_offsets,
                };
                let facts = analyze_body(&toks, &scope);
                methods[m] = Some(self.raw_method(method, facts));
            }
        }

        let methods = draft
            .methods
            .iter()
            .zip(methods)
            .map(|(d, m)| m.unwrap_or_else(|| self.raw_method(d, BodyFacts::default())))
            .collect();
        let nested = std::mem::take(&mut draft.nested);
        let qualified_name = draft.qualified_name.clone();
        self.classes.push(RawClass {
            qualified_name: draft.qualified_name,
            enclosing: outer.iter().map(|(n, _)| n.clone()).collect(),
            kind: draft.kind,
            line: draft.line,
            line_count: draft.line_count,
            superclass: draft.superclass,
            interfaces: draft.interfaces,
            anonymous_base: draft.anonymous_base,
            fields: draft.fields,
            methods,
            doc_comment_present: draft.doc,
            comments: Vec::new(),
            string_literals: Vec::new(),
            body_span: (self.toks[draft.open].offset, self.toks[draft.close].offset),
        });
        debug_assert!(chain[0].0 == qualified_name);
        for child in nested {
            self.finish_class(child, &chain);
        }
    }

    fn anonymous_draft(&mut self, qualified_name: String, base: String, start: usize, open: usize) -> ClassDraft {
        let close = self.pairs[open];
        let mut draft = ClassDraft {
            qualified_name,
            kind: ClassKind::Class,
            line: self.line(start),
            line_count: self.line(close) - self.line(start) + 1,
            superclass: None,
            interfaces: Vec::new(),
            anonymous_base: Some(base),
            doc: false,
            open,
            close,
            fields: Vec::new(),
            methods: Vec::new(),
            regions: Vec::new(),
            nested: Vec::new(),
        };
        self.members(&mut draft);
        draft
    }

    fn raw_method(&mut self, draft: &MethodDraft, facts: BodyFacts) -> RawMethod {
        for (line, message) in &facts.warnings {
            self.diagnostics.push(ParseDiagnostic::warning(
                self.path,
                *line,
                format!("in `{}`: {message}", draft.name),
            ));
        }
        let node = MethodNode {
            name: draft.name.clone(),
            line: draft.line,
            line_count: draft.line_count,
            return_type_name: draft.return_type.clone(),
            parameter_type_names: draft.params.iter().map(|(t, _)| t.clone()).collect(),
            has_body: draft.body.is_some(),
            statements: facts.statements,
            decision_points: facts.decision_points,
            operator_occurrences: facts.operator_occurrences,
            distinct_operators: facts.distinct_operators,
            operand_occurrences: facts.operand_occurrences,
            distinct_operands: facts.distinct_operands,
            accessed_own_fields: facts.own_fields,
            accessed_foreign_fields: BTreeSet::new(),
            calls: Vec::new(),
            doc_comment_present: draft.doc,
            max_nesting_depth: facts.max_nesting_depth,
            expressions: facts.expressions,
            empty_catch_lines: facts.empty_catch_lines,
        };
        RawMethod {
            node,
            calls: facts.calls,
            foreign_fields: facts.foreign_fields,
        }
    }

    /// Gives every non-doc comment and string literal to the innermost class
    /// whose body contains it.
    fn attach_comments_and_literals(&mut self) {
        let innermost = |classes: &[RawClass], offset: usize| -> Option<usize> {
            classes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.body_span.0 < offset && offset < c.body_span.1)
                .min_by_key(|(_, c)| c.body_span.1 - c.body_span.0)
                .map(|(i, _)| i)
        };
        for comment in self.comments {
            if comment.kind == CommentKind::Doc {
                continue;
            }
            if let Some(i) = innermost(&self.classes, comment.offset) {
                self.classes[i].comments.push(Comment {
                    line: comment.line,
                    kind: comment.kind,
                    text: comment.text.clone(),
                });
            }
        }
        let mut literals: Vec<HashMap<String, (u32, u32)>> = vec![HashMap::new(); self.classes.len()];
        for t in &self.toks {
            if t.kind != TokenKind::StringLiteral {
                continue;
            }
            if let Some(i) = innermost(&self.classes, t.offset) {
                let value = literal_value(&t.text).to_string();
                let entry = literals[i].entry(value).or_insert((0, t.line));
                entry.0 += 1;
            }
        }
        for (class, uses) in self.classes.iter_mut().zip(literals) {
            class.string_literals = uses
                .into_iter()
                .map(|(value, (count, first_line))| StringLiteralUse {
                    value,
                    count,
                    first_line,
                })
                .collect();
            class.string_literals.sort_by(|a, b| a.value.cmp(&b.value));
        }
    }
}

fn literal_value(text: &str) -> &str {
    text.strip_prefix("\"\"\"")
        .and_then(|t| t.strip_suffix("\"\"\""))
        .or_else(|| text.strip_prefix('"').and_then(|t| t.strip_suffix('"')))
        .unwrap_or(text)
}

impl ParseDiagnostic {
    fn error(file: &str, line: u32, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }

    fn warning(file: &str, line: u32, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity: Severity::Warning,
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }
}
