//! Fact extraction from a method or initializer body.
//!
//! The body arrives with nested class bodies already carved out by the
//! declaration parser, so every token seen here belongs to the method.
//!
//! Token classification for Halstead counts:
//! - operators: every operator symbol except `:` (a ternary counts once as
//!   `?:`), the control-flow keywords plus `new`, `instanceof`, `assert`,
//!   `synchronized`, method-call parentheses `()` and subscripts `[]`;
//! - operands: identifiers, literals, `true`, `false`, `null`, `this`, `super`.
//!
//! Type arguments in expression code are neither.

use std::collections::{BTreeSet, HashMap};

use super::lexer::{Token, TokenKind};
use super::syntax::{base_type, bracket_pairs, generic_mask, parse_type, skip_annotations, starts_uppercase, NONE};
use crate::model::ExpressionFact;

const OPERATOR_KEYWORDS: &[&str] = &[
    "if",
    "else",
    "for",
    "while",
    "do",
    "switch",
    "case",
    "default",
    "try",
    "catch",
    "finally",
    "return",
    "throw",
    "break",
    "continue",
    "new",
    "instanceof",
    "assert",
    "synchronized",
];

/// Receiver of a call or owner of an accessed field, before name resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RawTarget {
    SelfClass,
    Super,
    /// Type text as written; resolved against imports later.
    Type(String),
    /// An enclosing class, already qualified.
    Outer(String),
    Unknown,
}

#[derive(Debug, Default)]
pub(crate) struct BodyFacts {
    pub statements: u32,
    pub decision_points: u32,
    pub operator_occurrences: u32,
    pub distinct_operators: u32,
    pub operand_occurrences: u32,
    pub distinct_operands: u32,
    pub own_fields: BTreeSet<String>,
    pub foreign_fields: Vec<(RawTarget, String)>,
    pub calls: Vec<(RawTarget, String)>,
    pub max_nesting_depth: u32,
    pub expressions: Vec<ExpressionFact>,
    pub empty_catch_lines: Vec<u32>,
    pub warnings: Vec<(u32, String)>,
}

/// Names visible inside a body besides its locals.
pub(crate) struct Scope<'s> {
    /// Fields of the class owning the body: name to declared type text.
    pub own_fields: &'s HashMap<String, String>,
    /// Enclosing classes, innermost first: qualified name and fields.
    pub outer: &'s [(String, HashMap<String, String>)],
    pub params: &'s [(String, String)],
    /// Byte offsets of comments in the file.
    pub comment_offsets: &'s [usize],
}

/// Analyzes `toks`, which must start with `{` and end with its matching `}`.
pub(crate) fn analyze_body(toks: &[&Token], scope: &Scope) -> BodyFacts {
    let pairs = match bracket_pairs(toks) {
        Ok(p) => p,
        Err(line) => {
            return BodyFacts {
                warnings: vec![(line, "unbalanced brackets in body".into())],
                ..BodyFacts::default()
            }
        }
    };
    let generic = generic_mask(toks);
    let mut walker = Walker {
        toks,
        pairs,
        generic,
        scope,
        locals: scope.params.iter().cloned().collect(),
        depth: 0,
        facts: BodyFacts::default(),
    };
    if !toks.is_empty() {
        walker.block(0);
    }
    walker.count_tokens();
    walker.collect_references();
    walker.facts
}

struct Walker<'a> {
    toks: &'a [&'a Token],
    pairs: Vec<usize>,
    generic: Vec<bool>,
    scope: &'a Scope<'a>,
    locals: HashMap<String, String>,
    depth: u32,
    facts: BodyFacts,
}

impl Walker<'_> {
    fn at(&self, i: usize, text: &str) -> bool {
        self.toks.get(i).is_some_and(|t| t.is(text))
    }

    fn warn(&mut self, i: usize, message: String) {
        let line = self.toks.get(i).or(self.toks.last()).map_or(0, |t| t.line);
        self.facts.warnings.push((line, message));
    }

    fn block(&mut self, open: usize) -> usize {
        let close = self.pairs[open];
        let mut pos = open + 1;
        while pos < close {
            pos = self.statement(pos, close);
        }
        close + 1
    }

    fn nested<F: FnOnce(&mut Self) -> usize>(&mut self, f: F) -> usize {
        self.depth += 1;
        self.facts.max_nesting_depth = self.facts.max_nesting_depth.max(self.depth);
        let next = f(self);
        self.depth -= 1;
        next
    }

    fn nested_statement(&mut self, pos: usize, end: usize) -> usize {
        self.nested(|w| w.statement(pos, end))
    }

    fn nested_block(&mut self, pos: usize, end: usize) -> usize {
        if self.at(pos, "{") {
            self.nested(|w| w.block(pos))
        } else {
            self.warn(pos, "expected `{`".into());
            self.skip_statement(pos, end)
        }
    }

    /// First index in `[start, end)` holding one of `stops` outside brackets
    /// and type arguments, or `end`.
    fn find_top_level(&self, start: usize, end: usize, stops: &[&str]) -> usize {
        let mut i = start;
        while i < end {
            let t = self.toks[i];
            if self.generic[i] {
                i += 1;
                continue;
            }
            if t.kind == TokenKind::Punct && matches!(t.text.as_str(), "(" | "[" | "{") && self.pairs[i] != NONE {
                i = self.pairs[i] + 1;
                continue;
            }
            if stops.iter().any(|s| t.is(s)) {
                return i;
            }
            i += 1;
        }
        end
    }

    fn skip_statement(&self, pos: usize, end: usize) -> usize {
        let stop = self.find_top_level(pos, end, &[";"]);
        (stop + 1).min(end).max(pos + 1)
    }

    fn paren_expression(&mut self, pos: usize) -> usize {
        if !self.at(pos, "(") {
            self.warn(pos, "expected `(`".into());
            return pos;
        }
        let close = self.pairs[pos];
        self.expression(pos + 1, close);
        close + 1
    }

    fn statement(&mut self, pos: usize, end: usize) -> usize {
        let next = self.statement_inner(pos, end);
        next.max(pos + 1)
    }

    fn statement_inner(&mut self, pos: usize, end: usize) -> usize {
        let t = self.toks[pos];
        match (t.kind, t.text.as_str()) {
            (TokenKind::Punct, "{") => self.block(pos),
            (TokenKind::Punct, ";") => pos + 1,
            (TokenKind::Keyword, "if") => {
                let mut p = self.paren_expression(pos + 1);
                p = self.nested_statement(p, end);
                while p < end && self.at(p, "else") {
                    if self.at(p + 1, "if") {
                        p = self.paren_expression(p + 2);
                        p = self.nested_statement(p, end);
                    } else {
                        p = self.nested_statement(p + 1, end);
                        break;
                    }
                }
                p
            }
            (TokenKind::Keyword, "while") => {
                let p = self.paren_expression(pos + 1);
                self.nested_statement(p, end)
            }
            (TokenKind::Keyword, "do") => {
                let mut p = self.nested_statement(pos + 1, end);
                if self.at(p, "while") {
                    p = self.paren_expression(p + 1);
                } else {
                    self.warn(p, "expected `while` after `do` body".into());
                }
                if self.at(p, ";") {
                    p += 1;
                }
                p
            }
            (TokenKind::Keyword, "for") => {
                if !self.at(pos + 1, "(") {
                    self.warn(pos, "expected `(` after `for`".into());
                    return self.skip_statement(pos, end);
                }
                let close = self.pairs[pos + 1];
                self.for_header(pos + 2, close);
                self.nested_statement(close + 1, end)
            }
            (TokenKind::Keyword, "switch") => {
                let p = self.paren_expression(pos + 1);
                if self.at(p, "{") {
                    self.switch_body(p)
                } else {
                    self.warn(p, "expected switch body".into());
                    self.skip_statement(p, end)
                }
            }
            (TokenKind::Keyword, "try") => self.try_statement(pos, end),
            (TokenKind::Keyword, "synchronized") => {
                let p = self.paren_expression(pos + 1);
                self.nested_block(p, end)
            }
            (TokenKind::Keyword, "return" | "throw" | "assert") => self.simple_statement(pos + 1, end),
            (TokenKind::Keyword, "break" | "continue") => {
                self.facts.statements += 1;
                self.skip_statement(pos, end)
            }
            (TokenKind::Keyword, kw @ ("else" | "case" | "default" | "catch" | "finally")) => {
                self.warn(pos, format!("unexpected `{kw}`, statement skipped"));
                self.skip_statement(pos, end)
            }
            (TokenKind::Ident, "yield")
                if !self
                    .toks
                    .get(pos + 1)
                    .is_some_and(|n| ["=", "(", ".", "[", "++", "--", ";"].iter().any(|s| n.is(s))) =>
            {
                self.simple_statement(pos + 1, end)
            }
            (TokenKind::Ident, _) if self.at(pos + 1, ":") => self.statement(pos + 2, end),
            _ => {
                if let Some((next, has_initializer)) = self.declaration(pos, end) {
                    if has_initializer {
                        self.facts.statements += 1;
                    }
                    return next;
                }
                self.simple_statement(pos, end)
            }
        }
    }

    /// A counted statement whose remaining tokens up to `;` form one expression.
    fn simple_statement(&mut self, start: usize, end: usize) -> usize {
        self.facts.statements += 1;
        let stop = self.find_top_level(start, end, &[";"]);
        self.expression(start, stop);
        if stop >= end {
            self.warn(stop, "missing `;`".into());
            return end;
        }
        stop + 1
    }

    /// Local variable declaration. Returns the index after it and whether
    /// any declarator has an initializer.
    fn declaration(&mut self, pos: usize, end: usize) -> Option<(usize, bool)> {
        let mut i = pos;
        loop {
            let j = skip_annotations(self.toks, &self.pairs, i);
            if self.at(j, "final") {
                i = j + 1;
            } else {
                i = j;
                break;
            }
        }
        let (ty, after) = parse_type(self.toks, &self.pairs, i)?;
        if after >= end || !self.toks[after].is_ident() {
            return None;
        }
        if !["=", ";", ",", "[", ":", ")"].iter().any(|s| self.at(after + 1, s)) {
            return None;
        }
        let mut j = after;
        let mut has_initializer = false;
        while j < end && self.toks[j].is_ident() {
            let name = self.toks[j].text.clone();
            let mut declared = ty.clone();
            j += 1;
            while self.at(j, "[") && self.at(j + 1, "]") {
                declared.push_str("[]");
                j += 2;
            }
            if self.at(j, "=") {
                has_initializer = true;
                let stop = self.find_top_level(j + 1, end, &[",", ";"]);
                if declared == "var" {
                    declared = self.inferred_type(j + 1).unwrap_or_default();
                }
                self.expression(j + 1, stop);
                j = stop;
            }
            self.locals.insert(name, declared);
            if self.at(j, ",") {
                j += 1;
            } else {
                break;
            }
        }
        if self.at(j, ";") {
            j += 1;
        }
        Some((j, has_initializer))
    }

    fn inferred_type(&self, init: usize) -> Option<String> {
        if self.at(init, "new") {
            parse_type(self.toks, &self.pairs, init + 1).map(|(t, _)| t)
        } else {
            None
        }
    }

    fn for_header(&mut self, start: usize, close: usize) {
        let colon = self.find_top_level(start, close, &[":"]);
        if colon < close {
            let mut i = skip_annotations(self.toks, &self.pairs, start);
            if self.at(i, "final") {
                i += 1;
            }
            if let Some((ty, after)) = parse_type(self.toks, &self.pairs, i) {
                if after < colon && self.toks[after].is_ident() {
                    self.locals.insert(self.toks[after].text.clone(), ty);
                }
            }
            self.expression(colon + 1, close);
            return;
        }
        let first = self.find_top_level(start, close, &[";"]);
        if self.declaration(start, first).is_none() {
            self.expression(start, first);
        }
        if first >= close {
            return;
        }
        let second = self.find_top_level(first + 1, close, &[";"]);
        self.expression(first + 1, second);
        if second < close {
            self.expression(second + 1, close);
        }
    }

    fn switch_body(&mut self, open: usize) -> usize {
        let close = self.pairs[open];
        self.nested(|w| {
            let mut pos = open + 1;
            while pos < close {
                if w.at(pos, "case") || w.at(pos, "default") {
                    let stop = w.find_top_level(pos + 1, close, &[":", "->"]);
                    if stop >= close {
                        w.warn(pos, "unterminated case label".into());
                        break;
                    }
                    pos = stop + 1;
                    if w.toks[stop].is("->") && pos < close {
                        pos = if w.at(pos, "{") {
                            w.block(pos)
                        } else {
                            w.statement(pos, close)
                        };
                    }
                } else {
                    pos = w.statement(pos, close);
                }
            }
            close + 1
        })
    }

    fn try_statement(&mut self, pos: usize, end: usize) -> usize {
        let mut p = pos + 1;
        if self.at(p, "(") {
            let close = self.pairs[p];
            let mut start = p + 1;
            while start < close {
                let stop = self.find_top_level(start, close, &[";"]);
                if self.declaration(start, stop).is_none() {
                    self.expression(start, stop);
                }
                start = stop + 1;
            }
            p = close + 1;
        }
        p = self.nested_block(p, end);
        while self.at(p, "catch") {
            let catch_line = self.toks[p].line;
            if !self.at(p + 1, "(") {
                self.warn(p, "expected `(` after `catch`".into());
                return self.skip_statement(p, end);
            }
            let close = self.pairs[p + 1];
            self.catch_parameter(p + 2, close);
            let body = close + 1;
            if self.at(body, "{") && self.pairs[body] == body + 1 && !self.has_comment_between(body, body + 1) {
                self.facts.empty_catch_lines.push(catch_line);
            }
            p = self.nested_block(body, end);
        }
        if self.at(p, "finally") {
            p = self.nested_block(p + 1, end);
        }
        p
    }

    fn catch_parameter(&mut self, start: usize, close: usize) {
        let mut i = skip_annotations(self.toks, &self.pairs, start);
        if self.at(i, "final") {
            i += 1;
        }
        let first_type = parse_type(self.toks, &self.pairs, i).map(|(t, _)| t);
        if close > start && self.toks[close - 1].is_ident() {
            let name = self.toks[close - 1].text.clone();
            self.locals.insert(name, first_type.unwrap_or_default());
        }
    }

    fn has_comment_between(&self, open: usize, close: usize) -> bool {
        let (from, to) = (self.toks[open].offset, self.toks[close].offset);
        self.scope.comment_offsets.iter().any(|&o| o > from && o < to)
    }

    /// Records conditional-operator density of the expression in
    /// `[start, end)`. Block-bodied lambdas are analyzed as nested blocks.
    fn expression(&mut self, start: usize, end: usize) {
        if start >= end {
            return;
        }
        let mut operators = 0;
        let mut i = start;
        while i < end {
            let t = self.toks[i];
            if t.is("->") {
                self.lambda_parameters(i);
                if self.at(i + 1, "{") && self.pairs[i + 1] != NONE {
                    i = self.block(i + 1);
                    continue;
                }
            }
            if !self.generic[i] && (t.is("&&") || t.is("||") || t.is("?")) {
                operators += 1;
            }
            i += 1;
        }
        if operators > 0 {
            self.facts.expressions.push(ExpressionFact {
                line: self.toks[start].line,
                conditional_operators: operators,
            });
        }
    }

    fn lambda_parameters(&mut self, arrow: usize) {
        if arrow == 0 {
            return;
        }
        let prev = self.toks[arrow - 1];
        if prev.is_ident() {
            self.locals.insert(prev.text.clone(), String::new());
        } else if prev.is(")") {
            let open = self.pairs[arrow - 1];
            for k in open + 1..arrow - 1 {
                let t = self.toks[k];
                if t.is_ident() && (self.at(k + 1, ",") || k + 1 == arrow - 1) {
                    self.locals.insert(t.text.clone(), String::new());
                }
            }
        }
    }

    fn count_tokens(&mut self) {
        let mut operators: HashMap<&str, u32> = HashMap::new();
        let mut operands: HashMap<&str, u32> = HashMap::new();
        for (i, t) in self.toks.iter().enumerate() {
            if self.generic[i] {
                continue;
            }
            let text = t.text.as_str();
            match t.kind {
                TokenKind::Ident => {
                    if i == 0 || !self.toks[i - 1].is("@") {
                        *operands.entry(text).or_default() += 1;
                    }
                }
                TokenKind::Literal | TokenKind::StringLiteral => *operands.entry(text).or_default() += 1,
                TokenKind::Keyword => match text {
                    "true" | "false" | "null" | "this" | "super" => *operands.entry(text).or_default() += 1,
                    kw if OPERATOR_KEYWORDS.contains(&kw) => *operators.entry(kw).or_default() += 1,
                    _ => {}
                },
                TokenKind::Op => match text {
                    ":" | "..." => {}
                    "?" => *operators.entry("?:").or_default() += 1,
                    op => *operators.entry(op).or_default() += 1,
                },
                TokenKind::Punct => match text {
                    "(" if self.is_call_paren(i) => *operators.entry("()").or_default() += 1,
                    "[" => *operators.entry("[]").or_default() += 1,
                    _ => {}
                },
            }
            let decision = match t.kind {
                TokenKind::Keyword => matches!(text, "if" | "for" | "while" | "case" | "catch"),
                TokenKind::Op => matches!(text, "&&" | "||" | "?"),
                _ => false,
            };
            if decision {
                self.facts.decision_points += 1;
            }
        }
        self.facts.operator_occurrences = operators.values().sum();
        self.facts.distinct_operators = operators.len() as u32;
        self.facts.operand_occurrences = operands.values().sum();
        self.facts.distinct_operands = operands.len() as u32;
    }

    fn is_call_paren(&self, i: usize) -> bool {
        if i == 0 {
            return false;
        }
        let prev = self.toks[i - 1];
        if prev.is_ident() {
            return i < 2 || !self.toks[i - 2].is("@");
        }
        prev.is("this") || prev.is("super") || (self.generic[i - 1] && prev.text.starts_with('>'))
    }

    /// Index of the previous token outside type arguments.
    fn prev_index(&self, i: usize) -> Option<usize> {
        let mut j = i.checked_sub(1)?;
        while self.generic[j] {
            j = j.checked_sub(1)?;
        }
        Some(j)
    }

    fn field_type(&self, name: &str) -> Option<RawTarget> {
        let typed = |ty: &String| {
            if ty.is_empty() || ty.contains('[') {
                RawTarget::Unknown
            } else {
                RawTarget::Type(base_type(ty).to_string())
            }
        };
        if let Some(ty) = self.locals.get(name) {
            return Some(typed(ty));
        }
        if let Some(ty) = self.scope.own_fields.get(name) {
            return Some(typed(ty));
        }
        self.scope
            .outer
            .iter()
            .find_map(|(_, fields)| fields.get(name))
            .map(typed)
    }

    fn qualifier(&self, q: usize) -> RawTarget {
        let t = self.toks[q];
        if t.is("this") {
            if q >= 2 && self.toks[q - 1].is(".") && self.toks[q - 2].is_ident() {
                return RawTarget::Type(self.toks[q - 2].text.clone());
            }
            return RawTarget::SelfClass;
        }
        if t.is("super") {
            return RawTarget::Super;
        }
        if !t.is_ident() {
            return RawTarget::Unknown;
        }
        if q >= 1 && self.toks[q - 1].is(".") {
            let mut segments = vec![t.text.as_str()];
            let mut k = q;
            while k >= 2 && self.toks[k - 1].is(".") && self.toks[k - 2].is_ident() {
                segments.push(&self.toks[k - 2].text);
                k -= 2;
            }
            if k >= 1 && self.toks[k - 1].is(".") {
                return RawTarget::Unknown;
            }
            segments.reverse();
            if self.field_type(segments[0]).is_some() || !starts_uppercase(segments[segments.len() - 1]) {
                return RawTarget::Unknown;
            }
            return RawTarget::Type(segments.join("."));
        }
        if let Some(target) = self.field_type(&t.text) {
            return target;
        }
        if starts_uppercase(&t.text) {
            return RawTarget::Type(t.text.clone());
        }
        RawTarget::Unknown
    }

    fn collect_references(&mut self) {
        let toks = self.toks;
        let mut i = 0;
        while i < toks.len() {
            let t = toks[i];
            if self.generic[i] {
                i += 1;
                continue;
            }
            if t.is("new") {
                if let Some((ty, after)) = parse_type(toks, &self.pairs, i + 1) {
                    if self.at(after, "(") {
                        self.facts
                            .calls
                            .push((RawTarget::Type(base_type(&ty).to_string()), "<init>".into()));
                    }
                    i = after;
                    continue;
                }
            }
            if t.is("::") && i > 0 {
                let target = self.qualifier(i - 1);
                if let Some(next) = toks.get(i + 1) {
                    if next.is_ident() {
                        self.facts.calls.push((target, next.text.clone()));
                    } else if next.is("new") {
                        self.facts.calls.push((target, "<init>".into()));
                    }
                }
                i += 2;
                continue;
            }
            if t.is_ident() {
                self.reference(i);
            }
            i += 1;
        }
    }

    fn reference(&mut self, i: usize) {
        let t = self.toks[i];
        let prev = self.prev_index(i);
        if prev.is_some_and(|p| self.toks[p].is("@")) {
            return;
        }
        let qualified = prev.is_some_and(|p| self.toks[p].is("."));
        let qualifier = || prev.and_then(|p| p.checked_sub(1));
        let name = t.text.clone();
        if self.at(i + 1, "(") {
            let target = match (qualified, qualifier()) {
                (true, Some(q)) => self.qualifier(q),
                (true, None) => RawTarget::Unknown,
                (false, _) => RawTarget::SelfClass,
            };
            self.facts.calls.push((target, name));
            return;
        }
        if qualified {
            match qualifier().map_or(RawTarget::Unknown, |q| self.qualifier(q)) {
                RawTarget::Unknown => {}
                RawTarget::SelfClass => {
                    if self.scope.own_fields.contains_key(&name) {
                        self.facts.own_fields.insert(name);
                    }
                }
                target => self.facts.foreign_fields.push((target, name)),
            }
            return;
        }
        let next = self.toks.get(i + 1);
        if next.is_some_and(|n| n.is_ident() || n.is("->")) || self.locals.contains_key(&name) {
            return;
        }
        if self.scope.own_fields.contains_key(&name) {
            self.facts.own_fields.insert(name);
        } else if let Some((outer, _)) = self.scope.outer.iter().find(|(_, f)| f.contains_key(&name)) {
            self.facts.foreign_fields.push((RawTarget::Outer(outer.clone()), name));
        }
    }
}
