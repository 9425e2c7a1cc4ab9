//! Propositional formulas and language definition files.
//!
//! Formula syntax, loosest binding first: `->` (right associative), `|`, `&`,
//! then prefix `!`. Constants are `true` and `false`.
//!
//! A language file looks like
//!
//! ```text
//! # comment
//! language english
//! atoms: egg_only mam_only plat
//! believe: egg_only | mam_only | plat
//! believe: !(egg_only & mam_only)
//! ```
//!
//! `believe:` may appear any number of times; the beliefs are conjoined.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// A propositional formula over named elementary propositions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

/// Parse failures carry a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}, column {column}: undeclared atom `{name}`")]
    UndeclaredAtom {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("line {line}: atom `{name}` declared twice")]
    DuplicateAtom { name: String, line: usize },
    #[error("line {line}: `{directive}` given more than once")]
    DuplicateDirective { directive: String, line: usize },
    #[error("missing `{directive}` directive")]
    MissingDirective { directive: String },
    #[error("line {line}: unrecognised line `{text}`")]
    UnknownLine { line: usize, text: String },
}

impl ParseError {
    /// Shift a position reported for a single line to its place in a file.
    pub(crate) fn at_line(self, line: usize, column_offset: usize) -> ParseError {
        match self {
            ParseError::Syntax {
                column,
                expected,
                found,
                ..
            } => ParseError::Syntax {
                line,
                column: column + column_offset,
                expected,
                found,
            },
            ParseError::UndeclaredAtom { name, column, .. } => ParseError::UndeclaredAtom {
                name,
                line,
                column: column + column_offset,
            },
            other => other,
        }
    }
}

/// A parsed language file. Formulas are kept as written; `->` is only
/// rewritten by [`Formula::desugar`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSpec {
    pub name: String,
    pub atoms: Vec<String>,
    pub beliefs: Vec<Formula>,
}

impl LanguageSpec {
    /// Position of an elementary proposition in declaration order.
    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }
}

impl fmt::Display for LanguageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "language {}", self.name)?;
        writeln!(f, "atoms: {}", self.atoms.join(" "))?;
        for b in &self.beliefs {
            writeln!(f, "believe: {b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '!' => out.push((Tok::Not, col)),
            '&' => out.push((Tok::And, col)),
            '|' => out.push((Tok::Or, col)),
            '(' => out.push((Tok::LParen, col)),
            ')' => out.push((Tok::RParen, col)),
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, col));
                i += 2;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                out.push((tok, start + 1));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    line: 1,
                    column: col,
                    expected: "a formula token".into(),
                    found: format!("`{other}`"),
                })
            }
        }
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    known: Option<&'a HashSet<&'a str>>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            line: 1,
            column: self.column(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let col = self.column();
        match self.peek().clone() {
            Tok::Not => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::True => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Tok::False => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                if let Some(known) = self.known {
                    if !known.contains(name.as_str()) {
                        return Err(ParseError::UndeclaredAtom {
                            name,
                            line: 1,
                            column: col,
                        });
                    }
                }
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("`)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("a formula")),
        }
    }
}

fn parse_with(src: &str, known: Option<&HashSet<&str>>) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        known,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(f)
}

/// Parse a formula without checking atom names.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    parse_with(src, None)
}

/// Parse a formula, rejecting names outside `atoms`.
pub fn parse_formula_in(src: &str, atoms: &[String]) -> Result<Formula, ParseError> {
    let known: HashSet<&str> = atoms.iter().map(String::as_str).collect();
    parse_with(src, Some(&known))
}

/// Parse the text of a language file.
pub fn parse_language(src: &str) -> Result<LanguageSpec, ParseError> {
    let mut name: Option<(String, usize)> = None;
    let mut atoms: Option<Vec<String>> = None;
    let mut belief_lines: Vec<(usize, usize, &str)> = Vec::new();

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let offset = line.len() - line.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix("language") {
            if !rest.starts_with(char::is_whitespace) {
                return Err(ParseError::UnknownLine {
                    line: line_no,
                    text: trimmed.into(),
                });
            }
            if name.is_some() {
                return Err(ParseError::DuplicateDirective {
                    directive: "language".into(),
                    line: line_no,
                });
            }
            let n = rest.trim();
            if !is_identifier(n) {
                return Err(ParseError::Syntax {
                    line: line_no,
                    column: offset + "language".len() + 2,
                    expected: "a language name".into(),
                    found: format!("`{n}`"),
                });
            }
            name = Some((n.into(), line_no));
        } else if let Some(rest) = trimmed.strip_prefix("atoms:") {
            if atoms.is_some() {
                return Err(ParseError::DuplicateDirective {
                    directive: "atoms".into(),
                    line: line_no,
                });
            }
            let mut list: Vec<String> = Vec::new();
            for word in rest.split_whitespace() {
                if !is_identifier(word) || word == "true" || word == "false" {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column: offset + 1 + trimmed.find(word).unwrap_or(0),
                        expected: "an atom name".into(),
                        found: format!("`{word}`"),
                    });
                }
                if list.iter().any(|a| a == word) {
                    return Err(ParseError::DuplicateAtom {
                        name: word.into(),
                        line: line_no,
                    });
                }
                list.push(word.into());
            }
            if list.is_empty() {
                return Err(ParseError::Syntax {
                    line: line_no,
                    column: offset + trimmed.len() + 1,
                    expected: "at least one atom".into(),
                    found: "end of line".into(),
                });
            }
            atoms = Some(list);
        } else if let Some(rest) = trimmed.strip_prefix("believe:") {
            let col = offset + "believe:".len();
            belief_lines.push((line_no, col, rest));
        } else {
            return Err(ParseError::UnknownLine {
                line: line_no,
                text: trimmed.into(),
            });
        }
    }

    let (name, _) = name.ok_or(ParseError::MissingDirective {
        directive: "language".into(),
    })?;
    let atoms = atoms.ok_or(ParseError::MissingDirective {
        directive: "atoms".into(),
    })?;
    let mut beliefs = Vec::with_capacity(belief_lines.len());
    for (line_no, col, text) in belief_lines {
        let f = parse_formula_in(text, &atoms).map_err(|e| e.at_line(line_no, col))?;
        beliefs.push(f);
    }
    Ok(LanguageSpec {
        name,
        atoms,
        beliefs,
    })
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Rewrite every `a -> b` as `!a | b`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
        }
    }

    /// Names of the elementary propositions that occur, first occurrence first.
    pub fn atoms(&self) -> Vec<&str> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a str>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(n) => {
                    if !out.contains(&n.as_str()) {
                        out.push(n);
                    }
                }
                Formula::Not(a) => walk(a, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Truth value under an assignment given by `value`.
    pub fn eval(&self, value: &impl Fn(&str) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(n) => value(n),
            Formula::Not(a) => !a.eval(value),
            Formula::And(a, b) => a.eval(value) && b.eval(value),
            Formula::Or(a, b) => a.eval(value) || b.eval(value),
            Formula::Implies(a, b) => !a.eval(value) || b.eval(value),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, c: &Formula, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(n) => f.write_str(n),
            Formula::Not(a) => {
                f.write_str("!")?;
                child(f, a, a.precedence() < 4)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let p = self.precedence();
                let op = if p == 3 { " & " } else { " | " };
                child(f, a, a.precedence() < p)?;
                f.write_str(op)?;
                child(f, b, b.precedence() <= p)
            }
            Formula::Implies(a, b) => {
                child(f, a, a.precedence() <= 1)?;
                f.write_str(" -> ")?;
                child(f, b, b.precedence() < 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a | b & !c -> d -> e").unwrap();
        let expect = Formula::implies(
            Formula::or(
                Formula::atom("a"),
                Formula::and(Formula::atom("b"), Formula::not(Formula::atom("c"))),
            ),
            Formula::implies(Formula::atom("d"), Formula::atom("e")),
        );
        assert_eq!(f, expect);
        let g = parse_formula("a & b & c").unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::and(Formula::atom("a"), Formula::atom("b")),
                Formula::atom("c")
            )
        );
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        for src in [
            "a | b & c",
            "(a | b) & c",
            "a | (b | c)",
            "a & (b & c)",
            "(a -> b) -> c",
            "a -> b -> c",
            "!(a & b)",
            "!!a",
            "!true | false",
            "(a -> b) & c",
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(f.to_string(), src);
        }
        assert_eq!(parse_formula("((a))").unwrap().to_string(), "a");
        assert_eq!(parse_formula("(a | b) | c").unwrap().to_string(), "a | b | c");
    }

    #[test]
    fn desugar_removes_implication() {
        let f = parse_formula("a -> b").unwrap().desugar();
        assert_eq!(f.to_string(), "!a | b");
        let assign = |n: &str| n == "a";
        assert_eq!(
            parse_formula("a -> b").unwrap().eval(&assign),
            f.eval(&assign)
        );
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse_formula("a & ").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 1,
                column: 5,
                expected: "a formula".into(),
                found: "end of input".into()
            }
        );
        let err = parse_formula("(a | b").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { column: 7, .. }));
        let err = parse_formula("a $ b").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { column: 3, .. }));
        let err = parse_formula("a b").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { column: 3, .. }));
    }

    #[test]
    fn undeclared_atom_is_rejected() {
        let err = parse_formula_in("p & q", &atoms(&["p"])).unwrap_err();
        assert_eq!(
            err,
            ParseError::UndeclaredAtom {
                name: "q".into(),
                line: 1,
                column: 5
            }
        );
    }

    #[test]
    fn language_file_round_trip() {
        let src = "# platypus\nlanguage english\natoms: egg_only mam_only plat\n\
                   believe: egg_only | mam_only | plat\n\
                   believe: !(egg_only & mam_only) # exclusive\n";
        let spec = parse_language(src).unwrap();
        assert_eq!(spec.name, "english");
        assert_eq!(spec.atoms, atoms(&["egg_only", "mam_only", "plat"]));
        assert_eq!(spec.beliefs.len(), 2);
        let again = parse_language(&spec.to_string()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn language_file_errors() {
        assert_eq!(
            parse_language("atoms: a\n").unwrap_err(),
            ParseError::MissingDirective {
                directive: "language".into()
            }
        );
        assert!(matches!(
            parse_language("language x\natoms: a a\n").unwrap_err(),
            ParseError::DuplicateAtom { line: 2, .. }
        ));
        assert!(matches!(
            parse_language("language x\natoms: a\nbelieve: a & b\n").unwrap_err(),
            ParseError::UndeclaredAtom { line: 3, column: 14, .. }
        ));
        assert!(matches!(
            parse_language("language x\natoms: a\nbelieve: a &\n").unwrap_err(),
            ParseError::Syntax { line: 3, .. }
        ));
        assert!(matches!(
            parse_language("language x\natoms: a\nwhatever\n").unwrap_err(),
            ParseError::UnknownLine { line: 3, .. }
        ));
        assert!(matches!(
            parse_language("language x\natoms: a\natoms: b\n").unwrap_err(),
            ParseError::DuplicateDirective { line: 3, .. }
        ));
    }
}
