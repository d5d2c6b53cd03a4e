//! Token-level helpers shared by the declaration parser and the body analyzer.

use super::lexer::{Token, TokenKind, PRIMITIVES};

pub(crate) const NONE: usize = usize::MAX;

/// Index of the matching bracket for every `(`, `[`, `{` and its closer.
/// Returns the line of the first unbalanced bracket on failure.
pub(crate) fn bracket_pairs(toks: &[&Token]) -> Result<Vec<usize>, u32> {
    let mut pairs = vec![NONE; toks.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        if t.kind != TokenKind::Punct {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => stack.push(i),
            ")" | "]" | "}" => {
                let open = stack.pop().ok_or(t.line)?;
                let expected = match t.text.as_str() {
                    ")" => "(",
                    "]" => "[",
                    _ => "{",
                };
                if toks[open].text != expected {
                    return Err(t.line);
                }
                pairs[open] = i;
                pairs[i] = open;
            }
            _ => {}
        }
    }
    match stack.first() {
        Some(&open) => Err(toks[open].line),
        None => Ok(pairs),
    }
}

/// Closing `>` of a type-argument list opened at `open`, when the tokens in
/// between can only form type arguments. A `>>` or `>>>` closer is reported
/// as the closing token of the whole list.
pub(crate) fn angle_close(toks: &[&Token], open: usize) -> Option<usize> {
    let mut depth: i32 = 1;
    for (i, t) in toks.iter().enumerate().skip(open + 1).take(256) {
        match (t.kind, t.text.as_str()) {
            (TokenKind::Op, "<") => depth += 1,
            (TokenKind::Op, ">") => depth -= 1,
            (TokenKind::Op, ">>") => depth -= 2,
            (TokenKind::Op, ">>>") => depth -= 3,
            (TokenKind::Ident, _) => {}
            (TokenKind::Punct, "." | "," | "[" | "]" | "@") => {}
            (TokenKind::Op, "?" | "&") => {}
            (TokenKind::Keyword, kw) if kw == "extends" || kw == "super" || PRIMITIVES.contains(&kw) => {}
            _ => return None,
        }
        if depth == 0 {
            return Some(i);
        }
        if depth < 0 {
            return None;
        }
    }
    None
}

/// Like [`angle_close`] but only where a `<` plausibly opens type
/// arguments inside expression code: after a capitalized identifier or
/// after a `.` (explicit method type arguments).
pub(crate) fn generic_end(toks: &[&Token], open: usize) -> Option<usize> {
    if !toks[open].is("<") || open == 0 {
        return None;
    }
    let prev = toks[open - 1];
    let plausible = prev.is(".") || (prev.is_ident() && prev.text.starts_with(|c: char| c.is_uppercase()));
    if !plausible {
        return None;
    }
    angle_close(toks, open)
}

/// Marks every token that belongs to a type-argument list in expression code.
pub(crate) fn generic_mask(toks: &[&Token]) -> Vec<bool> {
    let mut mask = vec![false; toks.len()];
    let mut i = 0;
    while i < toks.len() {
        if let Some(end) = generic_end(toks, i) {
            mask[i..=end].iter_mut().for_each(|m| *m = true);
            i = end + 1;
        } else {
            i += 1;
        }
    }
    mask
}

/// Skips annotations (`@Name`, `@a.b.Name(...)`) starting at `pos`.
pub(crate) fn skip_annotations(toks: &[&Token], pairs: &[usize], mut pos: usize) -> usize {
    while pos + 1 < toks.len() && toks[pos].is("@") && toks[pos + 1].is_ident() {
        pos += 2;
        while pos + 1 < toks.len() && toks[pos].is(".") && toks[pos + 1].is_ident() {
            pos += 2;
        }
        if pos < toks.len() && toks[pos].is("(") && pairs[pos] != NONE {
            pos = pairs[pos] + 1;
        }
    }
    pos
}

/// Parses a type reference at `pos` and returns its source text (without
/// whitespace, varargs normalized to `[]`) and the index after it.
pub(crate) fn parse_type(toks: &[&Token], pairs: &[usize], pos: usize) -> Option<(String, usize)> {
    let mut i = skip_annotations(toks, pairs, pos);
    let first = toks.get(i)?;
    let mut text = String::new();
    if first.kind == TokenKind::Keyword && PRIMITIVES.contains(&first.text.as_str()) {
        text.push_str(&first.text);
        i += 1;
    } else if first.is_ident() {
        loop {
            text.push_str(&toks[i].text);
            i += 1;
            if toks.get(i).is_some_and(|t| t.is("<")) {
                let end = angle_close(toks, i)?;
                for t in &toks[i..=end] {
                    text.push_str(&t.text);
                }
                i = end + 1;
            }
            if toks.get(i).is_some_and(|t| t.is(".")) && toks.get(i + 1).is_some_and(|t| t.is_ident()) {
                text.push('.');
                i += 1;
                continue;
            }
            break;
        }
    } else {
        return None;
    }
    while toks.get(i).is_some_and(|t| t.is("[")) && toks.get(i + 1).is_some_and(|t| t.is("]")) {
        text.push_str("[]");
        i += 2;
    }
    if toks.get(i).is_some_and(|t| t.is("...")) {
        text.push_str("[]");
        i += 1;
    }
    Some((text, i))
}

/// Type text with type arguments and array dimensions removed.
pub(crate) fn base_type(text: &str) -> &str {
    let end = text.find(['<', '[']).unwrap_or(text.len());
    &text[..end]
}

pub(crate) fn starts_uppercase(s: &str) -> bool {
    s.starts_with(|c: char| c.is_uppercase())
}
