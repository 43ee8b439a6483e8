//! Plain-text group definitions.
//!
//! ```text
//! [basis]
//! w1: 1
//! v1: 1
//! v2: 2
//! [brackets]
//! [v1, w1] = v2
//! [subgroup]
//! w1
//! [coordinates]
//! y1 x1 x2
//! ```
//!
//! `[order]` optionally lists every basis vector in adapted order (subgroup
//! first). `[coordinates]` names the coordinates in adapted order. Lines
//! starting with `#` are comments.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lie::{AlgebraError, RawAlgebra, StratifiedAlgebra};
use crate::quotient::{QuotientError, QuotientModel, SubgroupSpec};
use crate::scalar::{format_rational, parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown basis vector `{0}`")]
    UnknownName(String),
    #[error("bracket [{0},{1}] listed twice")]
    DuplicateBracket(String, String),
    #[error("[order] must list every basis vector once")]
    BadOrder,
    #[error("[coordinates] must give {expected} names")]
    BadCoordinates { expected: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupDefinition {
    pub raw: RawAlgebra,
    pub subgroup: Vec<String>,
    pub order: Option<Vec<String>>,
    pub coordinates: Option<Vec<String>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Basis,
    Brackets,
    Subgroup,
    Order,
    Coordinates,
}

fn words(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty())
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl GroupDefinition {
    pub fn parse(src: &str) -> Result<Self, GroupFileError> {
        let mut def = GroupDefinition::default();
        let mut section = Section::None;
        let mut pending: Vec<(usize, String, String, String)> = Vec::new();
        for (idx, line) in src.lines().enumerate() {
            let line_no = idx + 1;
            let syntax = |msg: String| GroupFileError::Syntax { line: line_no, msg };
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let header = match line {
                "[basis]" => Some(Section::Basis),
                "[brackets]" => Some(Section::Brackets),
                "[subgroup]" => Some(Section::Subgroup),
                "[order]" => Some(Section::Order),
                "[coordinates]" => Some(Section::Coordinates),
                _ => None,
            };
            if let Some(h) = header {
                section = h;
                if h == Section::Order {
                    def.order.get_or_insert_with(Vec::new);
                }
                if h == Section::Coordinates {
                    def.coordinates.get_or_insert_with(Vec::new);
                }
                continue;
            }
            match section {
                Section::None => return Err(syntax(format!("`{line}` outside any section"))),
                Section::Basis => {
                    let (name, w) = line.split_once(':').ok_or_else(|| syntax("expected `name: weight`".into()))?;
                    let name = name.trim();
                    if !valid_name(name) {
                        return Err(syntax(format!("bad basis name `{name}`")));
                    }
                    if def.raw.names.iter().any(|n| n == name) {
                        return Err(syntax(format!("basis vector `{name}` declared twice")));
                    }
                    let w: u32 = w.trim().parse().map_err(|_| syntax(format!("bad weight `{}`", w.trim())))?;
                    def.raw.names.push(name.to_string());
                    def.raw.weights.push(w);
                }
                Section::Brackets => {
                    let (lhs, rhs) = line.split_once('=').ok_or_else(|| syntax("expected `[a, b] = ...`".into()))?;
                    let inner = lhs
                        .trim()
                        .strip_prefix('[')
                        .and_then(|s| s.strip_suffix(']'))
                        .ok_or_else(|| syntax("bracket must be written `[a, b]`".into()))?;
                    let (a, b) = inner.split_once(',').ok_or_else(|| syntax("bracket needs two entries".into()))?;
                    pending.push((line_no, a.trim().to_string(), b.trim().to_string(), rhs.trim().to_string()));
                }
                Section::Subgroup => def.subgroup.extend(words(line).map(str::to_string)),
                Section::Order => def.order.as_mut().unwrap().extend(words(line).map(str::to_string)),
                Section::Coordinates => def.coordinates.as_mut().unwrap().extend(words(line).map(str::to_string)),
            }
        }
        let mut seen = BTreeSet::new();
        for (line, a, b, rhs) in pending {
            let i = def.index(&a)?;
            let j = def.index(&b)?;
            if !seen.insert((i, j)) {
                return Err(GroupFileError::DuplicateBracket(a, b));
            }
            let terms = parse_combination(&rhs)
                .map_err(|msg| GroupFileError::Syntax { line, msg })?
                .into_iter()
                .map(|(name, c)| Ok((def.index(&name)?, c)))
                .collect::<Result<Vec<_>, GroupFileError>>()?;
            def.raw.brackets.push((i, j, terms));
        }
        for s in &def.subgroup {
            def.index(s)?;
        }
        Ok(def)
    }

    fn index(&self, name: &str) -> Result<usize, GroupFileError> {
        self.raw.names.iter().position(|n| n == name).ok_or_else(|| GroupFileError::UnknownName(name.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("[basis]\n");
        for (n, w) in self.raw.names.iter().zip(&self.raw.weights) {
            let _ = writeln!(s, "{n}: {w}");
        }
        s.push_str("[brackets]\n");
        for (i, j, terms) in &self.raw.brackets {
            let _ = writeln!(s, "[{}, {}] = {}", self.raw.names[*i], self.raw.names[*j], format_combination(terms, &self.raw.names));
        }
        s.push_str("[subgroup]\n");
        if !self.subgroup.is_empty() {
            let _ = writeln!(s, "{}", self.subgroup.join(" "));
        }
        if let Some(o) = &self.order {
            let _ = writeln!(s, "[order]\n{}", o.join(" "));
        }
        if let Some(c) = &self.coordinates {
            let _ = writeln!(s, "[coordinates]\n{}", c.join(" "));
        }
        s
    }

    pub fn algebra(&self) -> Result<StratifiedAlgebra, GroupFileError> {
        Ok(StratifiedAlgebra::validate(&self.raw)?)
    }

    pub fn subgroup_spec(&self) -> Result<SubgroupSpec, GroupFileError> {
        let idx = self.subgroup.iter().map(|s| self.index(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(SubgroupSpec::new(&idx))
    }

    pub fn build(&self) -> Result<QuotientModel, GroupFileError> {
        let alg = self.algebra()?;
        let spec = self.subgroup_spec()?;
        let order = match &self.order {
            Some(o) => {
                let idx = o.iter().map(|s| self.index(s)).collect::<Result<Vec<_>, _>>()?;
                let set: BTreeSet<usize> = idx.iter().copied().collect();
                if idx.len() != alg.dim() || set.len() != alg.dim() {
                    return Err(GroupFileError::BadOrder);
                }
                Some(idx)
            }
            None => None,
        };
        if let Some(c) = &self.coordinates {
            if c.len() != alg.dim() || c.iter().any(|n| !valid_name(n)) {
                return Err(GroupFileError::BadCoordinates { expected: alg.dim() });
            }
        }
        Ok(QuotientModel::build(&alg, &spec, order.as_deref(), self.coordinates.clone())?)
    }
}

/// `q*name + ...`, `-name`, `(p/q)*name`.
fn parse_combination(src: &str) -> Result<Vec<(String, Rational)>, String> {
    let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty right-hand side".into());
    }
    if compact == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (neg, body) = match rest.as_bytes()[0] {
            b'+' => (false, &rest[1..]),
            b'-' => (true, &rest[1..]),
            _ if out.is_empty() => (false, rest),
            _ => return Err(format!("expected + or - before `{rest}`")),
        };
        let end = split_point(body);
        let term = &body[..end];
        rest = &body[end..];
        let (coeff, name) = match term.rsplit_once('*') {
            Some((c, n)) => {
                let c = c.trim_start_matches('(').trim_end_matches(')');
                (parse_rational(c).ok_or_else(|| format!("bad coefficient `{c}`"))?, n)
            }
            None => (Rational::one(), term),
        };
        if !valid_name(name) {
            return Err(format!("bad basis name `{name}`"));
        }
        out.push((name.to_string(), if neg { -coeff } else { coeff }));
    }
    Ok(out)
}

/// Index of the first top-level `+` or `-` after the first character.
pub(crate) fn split_point(s: &str) -> usize {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 => return i,
            _ => {}
        }
    }
    s.len()
}

fn format_combination(terms: &[(usize, Rational)], names: &[String]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (idx, c)) in terms.iter().enumerate() {
        let sign = if c.is_negative() { "-" } else { "+" };
        if k == 0 {
            if c.is_negative() {
                s.push('-');
            }
        } else {
            let _ = write!(s, " {sign} ");
        }
        let a = c.abs();
        if a.is_one() {
            s.push_str(&names[*idx]);
        } else if a.is_zero() {
            let _ = write!(s, "0*{}", names[*idx]);
        } else {
            let _ = write!(s, "{}*{}", format_rational(&a), names[*idx]);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRUSHIN: &str = "# plane\n[basis]\nw1: 1\nv1: 1\nv2: 2\n[brackets]\n[v1, w1] = v2\n[subgroup]\nw1\n[coordinates]\ny1 x1 x2\n";

    #[test]
    fn parse_print_parse() {
        let d = GroupDefinition::parse(GRUSHIN).unwrap();
        assert_eq!(d.raw.names, vec!["w1", "v1", "v2"]);
        let again = GroupDefinition::parse(&d.to_text()).unwrap();
        assert_eq!(again, d);
        let m = d.build().unwrap();
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn coefficients() {
        let src = "[basis]\na: 1\nb: 1\nc: 2\nd: 2\n[brackets]\n[a, b] = 1/2*c - 3*d\n[subgroup]\n";
        let d = GroupDefinition::parse(src).unwrap();
        assert_eq!(d.to_text().lines().nth(6).unwrap(), "[a, b] = 1/2*c - 3*d");
        let terms = parse_combination("(-2/3)*c+d").unwrap();
        assert_eq!(terms[0].1, crate::scalar::rat(-2, 3));
    }

    #[test]
    fn errors() {
        let dup = "[basis]\na: 1\nb: 1\nc: 2\n[brackets]\n[a, b] = c\n[a, b] = c\n";
        assert!(matches!(GroupDefinition::parse(dup), Err(GroupFileError::DuplicateBracket(..))));
        let both = "[basis]\na: 1\nb: 1\nc: 2\n[brackets]\n[a, b] = c\n[b, a] = -c\n";
        assert!(GroupDefinition::parse(both).unwrap().build().is_ok());
        let clash = "[basis]\na: 1\nb: 1\nc: 2\n[brackets]\n[a, b] = c\n[b, a] = c\n";
        assert!(matches!(
            GroupDefinition::parse(clash).unwrap().build(),
            Err(GroupFileError::Algebra(AlgebraError::ConflictingBracket(..)))
        ));
        let unknown = "[basis]\na: 1\n[brackets]\n[a, z] = a\n";
        assert_eq!(GroupDefinition::parse(unknown), Err(GroupFileError::UnknownName("z".into())));
        assert!(matches!(GroupDefinition::parse("a: 1"), Err(GroupFileError::Syntax { line: 1, .. })));
    }
}
