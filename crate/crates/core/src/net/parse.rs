//! Line-oriented text format for labelled nets.
//!
//! ```text
//! place <id> [*]          # `*` marks the place initially
//! trans <id> [: <label>]  # no label means tau
//! arc <id> -> <id>
//! ```

use std::fmt::Write;

use super::{Label, LabelledNet, NetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Star,
    Colon,
    Arrow,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Star => "`*`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
        }
    }
}

fn lex(line: &str, lineno: usize) -> Result<Vec<(usize, Tok<'_>)>, NetError> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let bytes = code.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let col = i + 1;
        if b.is_ascii_whitespace() {
            i += 1;
        } else if b == b'*' {
            out.push((col, Tok::Star));
            i += 1;
        } else if b == b':' {
            out.push((col, Tok::Colon));
            i += 1;
        } else if b == b'-' && bytes.get(i + 1) == Some(&b'>') {
            out.push((col, Tok::Arrow));
            i += 2;
        } else if b.is_ascii_alphanumeric() || b == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((col, Tok::Ident(&code[start..i])));
        } else {
            let ch = code[i..].chars().next().unwrap_or('?');
            return Err(NetError::Syntax {
                line: lineno,
                column: col,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

/// Parses the net text format. Ids are kept verbatim; arcs may only refer
/// to elements declared on earlier lines.
pub fn parse_net(text: &str) -> Result<LabelledNet, NetError> {
    let mut builder = LabelledNet::builder();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex(line, lineno)?;
        let Some(&(col0, first)) = toks.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| NetError::Syntax {
            line: lineno,
            column,
            message,
        };
        let at = |column: usize, e: NetError| NetError::AtLine {
            line: lineno,
            column,
            source: Box::new(e),
        };
        let end_col = line.len() + 1;
        let ident = |i: usize, what: &str| -> Result<(usize, &str), NetError> {
            match toks.get(i) {
                Some(&(c, Tok::Ident(s))) => Ok((c, s)),
                Some((c, t)) => Err(syntax(*c, format!("expected {what}, found {}", t.describe()))),
                None => Err(syntax(end_col, format!("expected {what}"))),
            }
        };
        let expect_end = |i: usize| -> Result<(), NetError> {
            match toks.get(i) {
                Some((c, t)) => Err(syntax(*c, format!("unexpected {}", t.describe()))),
                None => Ok(()),
            }
        };

        match first {
            Tok::Ident("place") => {
                let (c, id) = ident(1, "place id")?;
                let marked = matches!(toks.get(2), Some((_, Tok::Star)));
                expect_end(if marked { 3 } else { 2 })?;
                builder.place(id, marked).map_err(|e| at(c, e))?;
            }
            Tok::Ident("trans") => {
                let (c, id) = ident(1, "transition id")?;
                let label = match toks.get(2) {
                    Some((_, Tok::Colon)) => {
                        let (_, l) = ident(3, "label")?;
                        expect_end(4)?;
                        Label::visible(l)
                    }
                    _ => {
                        expect_end(2)?;
                        Label::Tau
                    }
                };
                builder.transition(id, label).map_err(|e| at(c, e))?;
            }
            Tok::Ident("arc") => {
                let (c, from) = ident(1, "arc source")?;
                match toks.get(2) {
                    Some((_, Tok::Arrow)) => {}
                    Some((c, t)) => {
                        return Err(syntax(*c, format!("expected `->`, found {}", t.describe())))
                    }
                    None => return Err(syntax(end_col, "expected `->`".into())),
                }
                let (_, to) = ident(3, "arc target")?;
                expect_end(4)?;
                builder.arc(from, to).map_err(|e| at(c, e))?;
            }
            other => {
                return Err(syntax(
                    col0,
                    format!("expected `place`, `trans` or `arc`, found {}", other.describe()),
                ))
            }
        }
    }
    builder.build()
}

/// Deterministic text form: places, then transitions, then arcs, each sorted
/// by id. The empty net serialises to the empty string.
pub fn serialize_net(net: &LabelledNet) -> String {
    let mut out = String::new();
    for p in net.places() {
        let star = if net.initial_marking().contains(p) { " *" } else { "" };
        let _ = writeln!(out, "place {}{star}", net.place_name(p));
    }
    for t in net.transitions() {
        match net.label(t) {
            Label::Tau => {
                let _ = writeln!(out, "trans {}", net.transition_name(t));
            }
            Label::Visible(l) => {
                let _ = writeln!(out, "trans {} : {l}", net.transition_name(t));
            }
        }
    }
    let mut arcs: Vec<(&str, &str)> = net
        .arcs()
        .into_iter()
        .map(|(a, b)| (net.node_name(a), net.node_name(b)))
        .collect();
    arcs.sort();
    for (a, b) in arcs {
        let _ = writeln!(out, "arc {a} -> {b}");
    }
    out
}
