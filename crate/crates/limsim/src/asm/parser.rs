//! Line-oriented source parser. One label and/or one instruction or
//! directive per line; `#` starts a comment.

use crate::isa::{MemOpCode, Reg};

use super::AsmError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub line: usize,
    pub label: Option<String>,
    pub body: Option<Body>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Instruction { mnemonic: String, operands: Vec<String> },
    Directive { name: String, args: Vec<String> },
}

fn is_label_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn is_valid_label(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if is_label_start(c)) && chars.all(is_label_char)
}

/// Splits an operand/argument list on commas, keeping quoted strings intact.
fn split_args(text: &str) -> Vec<String> {
    let mut args = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    let mut escaped = false;
    for c in text.chars() {
        if in_quotes {
            current.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_quotes = false;
            }
        } else if c == '"' {
            current.push(c);
            in_quotes = true;
        } else if c == ',' {
            args.push(current.trim().to_string());
            current.clear();
        } else {
            current.push(c);
        }
    }
    if !current.trim().is_empty() {
        args.push(current.trim().to_string());
    }
    args
}

/// Parses a whole source file into statements, stripping comments and
/// blank lines.
pub fn parse(source: &str) -> Result<Vec<Statement>, AsmError> {
    let mut statements = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let mut text = raw;
        // Strip a comment, but not a '#' inside a string literal.
        let mut in_quotes = false;
        let mut escaped = false;
        for (pos, c) in raw.char_indices() {
            match c {
                '\\' if in_quotes && !escaped => escaped = true,
                '"' if !escaped => in_quotes = !in_quotes,
                '#' if !in_quotes => {
                    text = &raw[..pos];
                    break;
                }
                _ => escaped = false,
            }
        }
        let mut text = text.trim();
        if text.is_empty() {
            continue;
        }

        let mut label = None;
        if let Some(colon) = text.find(':') {
            // Only a leading whitespace-free token can be a label; colons
            // elsewhere (e.g. inside string literals) are left alone.
            let candidate = &text[..colon];
            if !candidate.contains(char::is_whitespace) && !candidate.contains('"') {
                if is_valid_label(candidate) {
                    label = Some(candidate.to_string());
                    text = text[colon + 1..].trim();
                } else {
                    return Err(AsmError::BadOperand {
                        line,
                        msg: format!("invalid label '{candidate}'"),
                    });
                }
            }
        }

        let body = if text.is_empty() {
            None
        } else if let Some(rest) = text.strip_prefix('.') {
            let (name, args) = match rest.split_once(char::is_whitespace) {
                Some((name, args)) => (name, split_args(args)),
                None => (rest, Vec::new()),
            };
            Some(Body::Directive { name: name.to_string(), args })
        } else {
            let (mnemonic, operands) = match text.split_once(char::is_whitespace) {
                Some((m, rest)) => (m, split_args(rest)),
                None => (text, Vec::new()),
            };
            Some(Body::Instruction {
                mnemonic: mnemonic.to_ascii_lowercase(),
                operands,
            })
        };

        statements.push(Statement { line, label, body });
    }
    Ok(statements)
}

const ABI_NAMES: [&str; 32] = [
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0", "a1", "a2", "a3", "a4",
    "a5", "a6", "a7", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9", "s10", "s11", "t3", "t4",
    "t5", "t6",
];

pub fn parse_reg(token: &str) -> Option<Reg> {
    if let Some(num) = token.strip_prefix('x') {
        if let Ok(n) = num.parse::<u8>() {
            return Reg::new(n);
        }
    }
    if token == "fp" {
        return Reg::new(8);
    }
    ABI_NAMES.iter().position(|&n| n == token).and_then(|i| Reg::new(i as u8))
}

/// Parses a signed integer literal: decimal or 0x hex, optional sign.
pub fn parse_int(token: &str) -> Option<i64> {
    let (negative, rest) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let value = if let Some(hex) = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X")) {
        i64::from_str_radix(hex, 16).ok()?
    } else {
        rest.parse::<i64>().ok()?
    };
    Some(if negative { -value } else { value })
}

/// Parses `offset(reg)` / `(reg)` memory operands.
pub fn parse_mem_operand(token: &str) -> Option<(i64, Reg)> {
    let open = token.find('(')?;
    let close = token.strip_suffix(')')?;
    let offset_text = token[..open].trim();
    let offset = if offset_text.is_empty() { 0 } else { parse_int(offset_text)? };
    let reg = parse_reg(close[open + 1..].trim())?;
    Some((offset, reg))
}

pub fn parse_mem_op(token: &str) -> Option<MemOpCode> {
    MemOpCode::from_name(token)
}

/// Decodes a quoted string literal with \n \t \r \0 \\ \" escapes.
pub fn parse_string_literal(token: &str) -> Option<Vec<u8>> {
    let inner = token.strip_prefix('"')?.strip_suffix('"')?;
    let mut bytes = Vec::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            let escaped = match chars.next()? {
                'n' => b'\n',
                't' => b'\t',
                'r' => b'\r',
                '0' => 0,
                '\\' => b'\\',
                '"' => b'"',
                _ => return None,
            };
            bytes.push(escaped);
        } else {
            let mut buf = [0u8; 4];
            bytes.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
        }
    }
    Some(bytes)
}
