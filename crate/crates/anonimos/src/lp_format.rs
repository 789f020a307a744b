//! CPLEX-style LP text for box-bounded minimization models.
//!
//! ```text
//! Minimize
//! obj: 0.25 x_0 - 0.5 x_1 + 0 x_2
//! Subject To
//! c0: x_0 + x_1 - x_2 <= -1
//! Bounds
//! 1 <= x_0 <= 1000
//! ...
//! End
//! ```
//!
//! Every objective coefficient is written, zeros included, and numbers use
//! their shortest exact decimal form, so parsing the output reproduces the
//! model bit for bit. Long expressions continue on indented lines. A row
//! without terms is written with a lone `0` on the left.

use std::fmt::Write as _;

use anonimos_core::lp::LpError;
use anonimos_core::{LpModel, LpRow};

use crate::numfmt::shortest;

pub const DEFAULT_PREFIX: &str = "x_";

const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpTextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown variable {name:?}")]
    UnknownVariable { line: usize, name: String },
    #[error("invalid model: {0}")]
    Model(LpError),
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], prefix: &str) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(var, coeff)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let negative = coeff.is_sign_negative();
        let magnitude = coeff.abs();
        match (k, negative) {
            (0, false) => out.push(' '),
            (0, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        if magnitude != 1.0 {
            out.push_str(&shortest(magnitude));
            out.push(' ');
        }
        let _ = write!(out, "{prefix}{var}");
    }
}

/// Renders `model` with variables named `<prefix><index>`.
pub fn export_lp_text(model: &LpModel, prefix: &str) -> String {
    let mut out = String::from("Minimize\nobj:");
    let objective: Vec<(usize, f64)> = model.objective.iter().copied().enumerate().collect();
    push_terms(&mut out, &objective, prefix);
    out.push_str("\nSubject To\n");
    for (i, row) in model.rows.iter().enumerate() {
        let _ = write!(out, "c{i}:");
        push_terms(&mut out, &row.coeffs, prefix);
        let _ = writeln!(out, " <= {}", shortest(row.rhs));
    }
    out.push_str("Bounds\n");
    for (j, (l, u)) in model.lower.iter().zip(&model.upper).enumerate() {
        let _ = writeln!(out, "{} <= {prefix}{j} <= {}", shortest(*l), shortest(*u));
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Done,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
}

fn syntax(line: usize, message: impl Into<String>) -> LpTextError {
    LpTextError::Syntax {
        line,
        message: message.into(),
    }
}

fn number(tok: &Token) -> Result<f64, LpTextError> {
    tok.text
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| syntax(tok.line, format!("expected a number, got {:?}", tok.text)))
}

fn looks_numeric(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

struct Vars<'p> {
    prefix: &'p str,
    count: usize,
}

impl Vars<'_> {
    fn index(&self, tok: &Token) -> Result<usize, LpTextError> {
        tok.text
            .strip_prefix(self.prefix)
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&j| j < self.count)
            .ok_or_else(|| LpTextError::UnknownVariable {
                line: tok.line,
                name: tok.text.to_string(),
            })
    }
}

/// Parses `[sign] [coeff] var` terms until `stop` (or the end of `tokens`).
/// A lone `0` stands for an empty expression.
fn parse_terms(
    tokens: &[Token],
    pos: &mut usize,
    vars: &Vars,
    stop: Option<&str>,
) -> Result<Vec<(usize, f64)>, LpTextError> {
    let at_stop = |p: usize| p >= tokens.len() || Some(tokens[p].text) == stop;
    if *pos < tokens.len() && tokens[*pos].text == "0" && at_stop(*pos + 1) {
        *pos += 1;
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    while !at_stop(*pos) {
        let first = terms.is_empty();
        let mut negative = false;
        match tokens[*pos].text {
            "+" | "-" => {
                negative = tokens[*pos].text == "-";
                *pos += 1;
            }
            _ if !first => {
                return Err(syntax(
                    tokens[*pos].line,
                    format!("expected + or -, got {:?}", tokens[*pos].text),
                ))
            }
            _ => {}
        }
        let Some(tok) = tokens.get(*pos) else {
            return Err(syntax(
                tokens[*pos - 1].line,
                "expression ends after a sign",
            ));
        };
        let mut coeff = 1.0;
        if looks_numeric(tok.text) {
            coeff = number(tok)?;
            *pos += 1;
        }
        let Some(var) = tokens.get(*pos) else {
            return Err(syntax(tokens[*pos - 1].line, "expected a variable"));
        };
        let j = vars.index(var)?;
        *pos += 1;
        terms.push((j, if negative { -coeff } else { coeff }));
    }
    Ok(terms)
}

/// Inverse of [`export_lp_text`] for variables named `<prefix><index>`.
pub fn parse_lp_text_with(text: &str, prefix: &str) -> Result<LpModel, LpTextError> {
    let mut section = Section::Preamble;
    let mut objective_tokens = Vec::new();
    let mut row_tokens = Vec::new();
    let mut bounds = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('\\').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let next = match content.to_ascii_lowercase().as_str() {
            "minimize" if section == Section::Preamble => Some(Section::Objective),
            "subject to" if section == Section::Objective => Some(Section::Rows),
            "bounds" if section == Section::Rows => Some(Section::Bounds),
            "end" if section == Section::Bounds => Some(Section::Done),
            "minimize" | "subject to" | "bounds" | "end" => {
                return Err(syntax(line, format!("unexpected section {content:?}")))
            }
            _ => None,
        };
        if let Some(next) = next {
            section = next;
            continue;
        }
        let tokens = content
            .split_ascii_whitespace()
            .map(|text| Token { text, line });
        match section {
            Section::Objective => objective_tokens.extend(tokens),
            Section::Rows => row_tokens.extend(tokens),
            Section::Bounds => bounds.push(tokens.collect::<Vec<_>>()),
            Section::Preamble => return Err(syntax(line, "expected Minimize")),
            Section::Done => return Err(syntax(line, "text after End")),
        }
    }
    if section != Section::Done {
        return Err(syntax(last_line.max(1), "missing End"));
    }

    // Bounds first: they fix the variable count.
    let count = bounds.len();
    let vars = Vars { prefix, count };
    let mut lower = vec![0.0; count];
    let mut upper = vec![0.0; count];
    for (j, toks) in bounds.iter().enumerate() {
        let line = toks[0].line;
        if toks.len() != 5 || toks[1].text != "<=" || toks[3].text != "<=" {
            return Err(syntax(line, "expected `L <= var <= U`"));
        }
        if vars.index(&toks[2])? != j {
            return Err(syntax(
                line,
                format!("bounds out of order: expected {prefix}{j}"),
            ));
        }
        lower[j] = number(&toks[0])?;
        upper[j] = number(&toks[4])?;
    }

    let mut pos = 0;
    let mut objective = vec![0.0; count];
    match objective_tokens.first() {
        Some(t) if t.text == "obj:" => pos = 1,
        Some(t) => return Err(syntax(t.line, "expected `obj:`")),
        None => {}
    }
    let mut seen = vec![false; count];
    for (j, c) in parse_terms(&objective_tokens, &mut pos, &vars, None)? {
        if std::mem::replace(&mut seen[j], true) {
            return Err(syntax(
                objective_tokens[pos - 1].line,
                format!("{prefix}{j} repeated in objective"),
            ));
        }
        objective[j] = c;
    }

    let mut rows = Vec::new();
    let mut pos = 0;
    while pos < row_tokens.len() {
        let label = &row_tokens[pos];
        if !label.text.ends_with(':') {
            return Err(syntax(
                label.line,
                format!("expected a row label, got {:?}", label.text),
            ));
        }
        pos += 1;
        let coeffs = parse_terms(&row_tokens, &mut pos, &vars, Some("<="))?;
        match row_tokens.get(pos) {
            Some(t) if t.text == "<=" => pos += 1,
            _ => return Err(syntax(label.line, "row without `<=`")),
        }
        let Some(rhs) = row_tokens.get(pos) else {
            return Err(syntax(label.line, "row without right-hand side"));
        };
        let rhs = number(rhs)?;
        pos += 1;
        rows.push(LpRow { coeffs, rhs });
    }
    LpModel::new(objective, rows, lower, upper).map_err(LpTextError::Model)
}

/// [`parse_lp_text_with`] using the default `x_` prefix.
pub fn parse_lp_text(text: &str) -> Result<LpModel, LpTextError> {
    parse_lp_text_with(text, DEFAULT_PREFIX)
}
