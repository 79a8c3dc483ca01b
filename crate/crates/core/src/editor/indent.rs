//! Brace-depth indentation, four spaces per level.

use crate::language::{tokenize, TokenKind};

pub const INDENT_WIDTH: usize = 4;

struct LineInfo {
    /// Brace depth at the start of the line.
    depth: usize,
    /// First token on the line is `}`.
    closes: bool,
    /// The line starts inside a multi-line comment or unterminated token.
    continuation: bool,
}

fn line_infos(document: &str) -> Vec<LineInfo> {
    let line_count = document.split('\n').count();
    let mut infos: Vec<LineInfo> = (0..line_count)
        .map(|_| LineInfo {
            depth: 0,
            closes: false,
            continuation: false,
        })
        .collect();
    let mut depth: usize = 0;
    let mut seen_code_on_line = vec![false; line_count];
    let mut last_line = 0;
    for t in tokenize(document) {
        let line = t.line as usize - 1;
        while last_line < line {
            last_line += 1;
            infos[last_line].depth = depth;
        }
        let end_line = t.end().line as usize - 1;
        if end_line > line && matches!(t.kind, TokenKind::Comment | TokenKind::Error) {
            for info in &mut infos[line + 1..=end_line] {
                info.continuation = true;
            }
        }
        if t.kind != TokenKind::Whitespace && !seen_code_on_line[line] {
            seen_code_on_line[line] = true;
            if t.kind == TokenKind::Punct && t.lexeme == "}" {
                infos[line].closes = true;
            }
        }
        if t.kind == TokenKind::Punct {
            match t.lexeme.as_str() {
                "{" => depth += 1,
                "}" => depth = depth.saturating_sub(1),
                _ => {}
            }
        }
    }
    while last_line + 1 < line_count {
        last_line += 1;
        infos[last_line].depth = depth;
    }
    infos
}

fn column(info: &LineInfo) -> usize {
    let depth = if info.closes {
        info.depth.saturating_sub(1)
    } else {
        info.depth
    };
    depth * INDENT_WIDTH
}

/// Target indentation column of a 1-based line. Lines past the end get the
/// depth at the end of the document.
pub fn indent_line(document: &str, line_no: usize) -> usize {
    let infos = line_infos(document);
    match infos.get(line_no.saturating_sub(1)) {
        Some(info) if info.continuation => leading_width(document.split('\n').nth(line_no - 1).unwrap_or("")),
        Some(info) => column(info),
        None => column(infos.last().expect("at least one line")),
    }
}

fn leading_width(line: &str) -> usize {
    line.chars()
        .take_while(|c| *c == ' ' || *c == '\t')
        .map(|c| if c == '\t' { INDENT_WIDTH } else { 1 })
        .sum()
}

/// Reindent every line. Blank lines become empty; lines inside block
/// comments keep their text.
pub fn reindent(document: &str) -> String {
    let infos = line_infos(document);
    let mut out = String::with_capacity(document.len());
    for (i, (line, info)) in document.split('\n').zip(&infos).enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if info.continuation {
            out.push_str(line);
            continue;
        }
        let (body, cr) = match line.strip_suffix('\r') {
            Some(b) => (b, "\r"),
            None => (line, ""),
        };
        let content = body.trim_start_matches([' ', '\t']);
        if !content.trim().is_empty() {
            out.extend(std::iter::repeat_n(' ', column(info)));
            out.push_str(content);
        }
        out.push_str(cr);
    }
    out
}
