//! Job files: a flat key-value description of one run.
//!
//! The grammar is line oriented.  Each line is `key = value`, a `#` comment,
//! or blank; values are unsigned integers, bare words, double-quoted strings,
//! or single-line bracketed lists of quoted strings.  Polynomials always
//! travel as quoted strings so that spaces and parentheses survive.  Every
//! diagnostic carries the 1-based line and column of the offending token, and
//! keys that do not belong to the declared group are rejected rather than
//! ignored.

use std::collections::BTreeMap;

use divseq::error::{Error, Result};

/// One parsed job, typed but not yet interpreted: polynomial strings are
/// kept verbatim for the pipeline parsers.
#[derive(Debug, Clone, Default)]
pub struct JobSpec {
    pub group: String,
    /// 1-based (line, col) of each key, for diagnostics raised after parsing.
    pub positions: BTreeMap<String, (usize, usize)>,
    pub coords: Option<Vec<String>>,
    pub q_coords: Option<Vec<String>>,
    pub a_invariants: Option<Vec<String>>,
    pub point: Option<Vec<String>>,
    pub q_point: Option<Vec<String>>,
    pub mode: Option<String>,
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub nmax: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub window: Option<u32>,
    pub trials: Option<u32>,
    pub out: Option<String>,
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum RawValue {
    Int(u64),
    Str(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: u32,
    col: u32,
}

fn err(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.line as usize,
        col: pos.col as usize,
        msg: msg.into(),
    }
}

/// Character scanner over one line.
struct LineScanner<'a> {
    chars: Vec<char>,
    at: usize,
    line: u32,
    _src: &'a str,
}

impl<'a> LineScanner<'a> {
    fn new(src: &'a str, line: u32) -> Self {
        LineScanner {
            chars: src.chars().collect(),
            at: 0,
            line,
            _src: src,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.at as u32 + 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.at += 1;
        }
        c
    }

    fn skip_space(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.at += 1;
        }
    }

    /// True when only whitespace or a comment remains.
    fn at_end(&mut self) -> bool {
        self.skip_space();
        matches!(self.peek(), None | Some('#'))
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos();
        let mut out = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            out.push(self.bump().expect("peeked"));
        }
        if out.is_empty() {
            return Err(err(start, "expected an identifier"));
        }
        Ok(out)
    }

    fn quoted(&mut self) -> Result<String> {
        let start = self.pos();
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some(c) => out.push(c),
                None => return Err(err(start, "unterminated string")),
            }
        }
    }

    fn value(&mut self) -> Result<RawValue> {
        self.skip_space();
        let start = self.pos();
        match self.peek() {
            Some('"') => Ok(RawValue::Str(self.quoted()?)),
            Some('[') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_space();
                    match self.peek() {
                        Some(']') => {
                            self.bump();
                            return Ok(RawValue::List(items));
                        }
                        Some('"') => {
                            items.push(self.quoted()?);
                            self.skip_space();
                            match self.peek() {
                                Some(',') => {
                                    self.bump();
                                }
                                Some(']') => {}
                                _ => {
                                    return Err(err(
                                        self.pos(),
                                        "expected `,` or `]` in list",
                                    ))
                                }
                            }
                        }
                        _ => {
                            return Err(err(
                                self.pos(),
                                "lists hold double-quoted strings",
                            ))
                        }
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let mut digits = String::new();
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    digits.push(self.bump().expect("peeked"));
                }
                digits
                    .parse::<u64>()
                    .map(RawValue::Int)
                    .map_err(|_| err(start, "integer out of range"))
            }
            Some(c) if c.is_ascii_alphabetic() => Ok(RawValue::Str(self.ident()?)),
            _ => Err(err(start, "expected a value")),
        }
    }
}

/// Raw entries in file order with their positions; keys must be unique.
fn scan(text: &str) -> Result<Vec<(String, RawValue, Pos)>> {
    let mut out: Vec<(String, RawValue, Pos)> = Vec::new();
    let mut seen: BTreeMap<String, Pos> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let mut sc = LineScanner::new(raw_line, idx as u32 + 1);
        if sc.at_end() {
            continue;
        }
        let key_pos = sc.pos();
        let key = sc.ident()?;
        sc.skip_space();
        if sc.peek() != Some('=') {
            return Err(err(sc.pos(), format!("expected `=` after key `{key}`")));
        }
        sc.bump();
        let value = sc.value()?;
        if !sc.at_end() {
            return Err(err(sc.pos(), "unexpected trailing text"));
        }
        if seen.insert(key.clone(), key_pos).is_some() {
            return Err(err(key_pos, format!("duplicate key `{key}`")));
        }
        out.push((key, value, key_pos));
    }
    Ok(out)
}

fn want_list(key: &str, value: RawValue, pos: Pos) -> Result<Vec<String>> {
    match value {
        RawValue::List(items) => Ok(items),
        _ => Err(err(pos, format!("key `{key}` takes a bracketed list"))),
    }
}

fn want_str(key: &str, value: RawValue, pos: Pos) -> Result<String> {
    match value {
        RawValue::Str(s) => Ok(s),
        _ => Err(err(pos, format!("key `{key}` takes a string"))),
    }
}

fn want_int(key: &str, value: RawValue, pos: Pos) -> Result<u64> {
    match value {
        RawValue::Int(v) => Ok(v),
        _ => Err(err(pos, format!("key `{key}` takes an unsigned integer"))),
    }
}

/// Keys every group accepts.
const COMMON_KEYS: [&str; 7] = ["group", "nmax", "seed", "threads", "window", "out", "format"];

/// Group-specific payload keys.
fn payload_keys(group: &str) -> &'static [&'static str] {
    match group {
        "gm" => &["coords", "q_coords"],
        "ec" => &["a_invariants", "point", "q_point", "trials"],
        "mixed" => &["a_invariants", "point", "coords", "trials"],
        "indep" => &["coords", "mode"],
        "intseq" => &["a", "b"],
        _ => &[],
    }
}

/// Parses and validates one job file.
pub fn parse_job(text: &str) -> Result<JobSpec> {
    let entries = scan(text)?;
    let group_entry = entries.iter().find(|(k, _, _)| k == "group");
    let Some((_, group_value, group_pos)) = group_entry else {
        return Err(err(Pos { line: 0, col: 0 }, "missing required key `group`"));
    };
    let group = want_str("group", group_value.clone(), *group_pos)?;
    if !matches!(group.as_str(), "gm" | "ec" | "mixed" | "indep" | "intseq") {
        return Err(err(
            *group_pos,
            format!("unknown group `{group}`; expected gm, ec, mixed, indep, or intseq"),
        ));
    }

    let mut spec = JobSpec {
        group: group.clone(),
        ..JobSpec::default()
    };
    for (key, value, pos) in entries {
        spec.positions
            .insert(key.clone(), (pos.line as usize, pos.col as usize));
        if key != "group"
            && !COMMON_KEYS.contains(&key.as_str())
            && !payload_keys(&group).contains(&key.as_str())
        {
            return Err(err(
                pos,
                format!("key `{key}` does not apply to group `{group}`"),
            ));
        }
        match key.as_str() {
            "group" => {}
            "coords" => {
                let items = want_list(&key, value, pos)?;
                if group == "mixed" && items.len() != 1 {
                    return Err(err(
                        pos,
                        "group `mixed` takes exactly one torus coordinate in `coords`",
                    ));
                }
                spec.coords = Some(items);
            }
            "q_coords" => spec.q_coords = Some(want_list(&key, value, pos)?),
            "a_invariants" => {
                let items = want_list(&key, value, pos)?;
                if items.len() != 5 {
                    return Err(err(
                        pos,
                        "key `a_invariants` takes exactly five entries: a1, a2, a3, a4, a6",
                    ));
                }
                spec.a_invariants = Some(items);
            }
            "point" | "q_point" => {
                let items = want_list(&key, value, pos)?;
                if items.len() != 2 {
                    return Err(err(pos, format!("key `{key}` takes exactly two entries: x, y")));
                }
                if key == "point" {
                    spec.point = Some(items);
                } else {
                    spec.q_point = Some(items);
                }
            }
            "mode" => {
                let m = want_str(&key, value, pos)?;
                if !matches!(m.as_str(), "exact" | "modulo-constants") {
                    return Err(err(
                        pos,
                        format!("unknown mode `{m}`; expected exact or modulo-constants"),
                    ));
                }
                spec.mode = Some(m);
            }
            "a" => spec.a = Some(want_int(&key, value, pos)?),
            "b" => spec.b = Some(want_int(&key, value, pos)?),
            "nmax" => {
                let n = want_int(&key, value, pos)?;
                if n == 0 {
                    return Err(err(pos, "nmax must be at least 1"));
                }
                spec.nmax = Some(n);
            }
            "seed" => spec.seed = Some(want_int(&key, value, pos)?),
            "threads" => spec.threads = Some(want_int(&key, value, pos)? as usize),
            "window" => spec.window = Some(want_int(&key, value, pos)?.min(u32::MAX as u64) as u32),
            "trials" => spec.trials = Some(want_int(&key, value, pos)?.min(u32::MAX as u64) as u32),
            "out" => spec.out = Some(want_str(&key, value, pos)?),
            "format" => {
                let f = want_str(&key, value, pos)?;
                if !matches!(f.as_str(), "json" | "csv" | "both") {
                    return Err(err(
                        pos,
                        format!("unknown format `{f}`; expected json, csv, or both"),
                    ));
                }
                spec.format = Some(f);
            }
            _ => unreachable!("validated against the key tables"),
        }
    }
    Ok(spec)
}
