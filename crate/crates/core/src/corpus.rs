//! Translation files, implication seed files and corpus directories.
//!
//! Translation file lines:
//!
//! ```text
//! outer 1>2: <atom formula> => <formula or *>
//! override inner 2>1: <formula> => <formula or *>
//! ```
//!
//! Every atom of each language needs exactly one `outer` line; the inner
//! maps are derived. `override` lines then replace single table entries,
//! which is how deliberately inconsistent translations are written down.
//!
//! Seed file lines: `imp: <lang>.<formula> => <lang>.<formula>`, where
//! `<lang>` is a language name or `1`/`2`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::algebra::{Algebra, Limits, Side, StarProp};
use crate::error::{Error, Result};
use crate::implication::{CrossImplication, Node};
use crate::lang::{parse_formula_in, strip_comment, ParseError};
use crate::report::{Mode, Operator};
use crate::translation::Translation;

fn syntax(line: usize, column: usize, expected: &str, found: &str) -> Error {
    Error::Parse(ParseError::Syntax {
        line,
        column,
        expected: expected.into(),
        found: format!("`{found}`"),
    })
}

/// Parse `text` (a formula or `*`) in `a`; `column` is where `text` starts.
fn parse_value(a: &Algebra, text: &str, line: usize, column: usize) -> Result<StarProp> {
    if text.trim() == "*" {
        return Ok(StarProp::Star);
    }
    let f = parse_formula_in(text, &a.spec().atoms).map_err(|e| e.at_line(line, column - 1))?;
    Ok(StarProp::Prop(a.denote(&f)?))
}

fn parse_direction(s: &str) -> Option<Side> {
    match s {
        "1>2" => Some(Side::One),
        "2>1" => Some(Side::Two),
        _ => None,
    }
}

/// Split `head: body` at the first colon, with the body's 1-based column.
fn split_header(line: &str) -> Option<(&str, &str, usize)> {
    let i = line.find(':')?;
    Some((&line[..i], &line[i + 1..], i + 2))
}

/// Split at the single `=>`, returning both halves and the column of the
/// right half relative to the start of `body`.
fn split_arrow(body: &str) -> Option<(&str, &str, usize)> {
    let i = body.find("=>")?;
    let rest = &body[i + 2..];
    if rest.contains("=>") {
        return None;
    }
    Some((&body[..i], rest, i + 2))
}

/// Parse a translation file over the two algebras.
pub fn parse_translation(src: &str, a1: Arc<Algebra>, a2: Arc<Algebra>) -> Result<Translation> {
    let algebras = [&a1, &a2];
    let mut outers: [Vec<Option<StarProp>>; 2] = [vec![None; a1.model_count()], vec![None; a2.model_count()]];
    let mut overrides: Vec<(usize, Operator, StarProp, StarProp)> = Vec::new();

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let unknown = || {
            Error::Parse(ParseError::UnknownLine {
                line: line_no,
                text: line.trim().into(),
            })
        };
        let (head, body, body_col) = split_header(line).ok_or_else(unknown)?;
        let words: Vec<&str> = head.split_whitespace().collect();
        let (is_override, mode, dir) = match words.as_slice() {
            ["outer", dir] => (false, Mode::Outer, *dir),
            ["override", "inner", dir] => (true, Mode::Inner, *dir),
            ["override", "outer", dir] => (true, Mode::Outer, *dir),
            _ => return Err(unknown()),
        };
        let from = parse_direction(dir).ok_or_else(|| syntax(line_no, 1, "a direction `1>2` or `2>1`", dir))?;
        let (lhs, rhs, rhs_off) = split_arrow(body)
            .ok_or_else(|| syntax(line_no, body_col, "a single `=>`", body.trim()))?;
        let src_alg = algebras[from.index()];
        let dst_alg = algebras[from.other().index()];
        let x = parse_value(src_alg, lhs, line_no, body_col)?;
        let y = parse_value(dst_alg, rhs, line_no, body_col + rhs_off)?;
        let op = Operator { from, mode };
        if is_override {
            overrides.push((line_no, op, x, y));
            continue;
        }
        let atom = match x {
            StarProp::Prop(p) if src_alg.is_atom(p) => p.models().next().unwrap_or(0),
            _ => {
                return Err(syntax(
                    line_no,
                    body_col,
                    &format!("an atom of `{}`", src_alg.name()),
                    lhs.trim(),
                ))
            }
        };
        let slot = &mut outers[from.index()][atom];
        if slot.is_some() {
            return Err(Error::MalformedTranslation(format!(
                "line {line_no}: atom `{}` of `{}` already has an outer image",
                src_alg.model_label(atom),
                src_alg.name()
            )));
        }
        *slot = Some(y);
    }

    let mut images: [Vec<StarProp>; 2] = Default::default();
    for side in Side::BOTH {
        let a = algebras[side.index()];
        for (k, v) in outers[side.index()].iter().enumerate() {
            match v {
                Some(v) => images[side.index()].push(*v),
                None => {
                    return Err(Error::MalformedTranslation(format!(
                        "no `outer {}>{}` line for atom `{}` of `{}`",
                        side.number(),
                        side.other().number(),
                        a.model_label(k),
                        a.name()
                    )))
                }
            }
        }
    }
    let mut t = Translation::from_atom_outers(a1.clone(), a2.clone(), &images[0], &images[1])?;
    for (line_no, op, x, y) in overrides {
        t = t
            .with_entry(op, x, y)
            .map_err(|e| Error::MalformedTranslation(format!("line {line_no}: {e}")))?;
    }
    Ok(t)
}

/// Parse an implication seed file and close it.
pub fn parse_seeds(src: &str, a1: Arc<Algebra>, a2: Arc<Algebra>) -> Result<CrossImplication> {
    let algebras = [&a1, &a2];
    let side_of = |name: &str| -> Option<Side> {
        match name {
            "1" => Some(Side::One),
            "2" => Some(Side::Two),
            n if n == a1.name() => Some(Side::One),
            n if n == a2.name() => Some(Side::Two),
            _ => None,
        }
    };
    let mut seeds = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (_, body, body_col) = split_header(line)
            .filter(|(h, _, _)| h.trim() == "imp")
            .ok_or_else(|| {
                Error::Parse(ParseError::UnknownLine {
                    line: line_no,
                    text: line.trim().into(),
                })
            })?;
        let (lhs, rhs, rhs_off) = split_arrow(body)
            .ok_or_else(|| syntax(line_no, body_col, "a single `=>`", body.trim()))?;
        let mut ends = Vec::with_capacity(2);
        for (part, col) in [(lhs, body_col), (rhs, body_col + rhs_off)] {
            let dot = part
                .find('.')
                .ok_or_else(|| syntax(line_no, col, "`<language>.<formula>`", part.trim()))?;
            let lang = part[..dot].trim();
            let side = side_of(lang).ok_or_else(|| syntax(line_no, col, "a language name", lang))?;
            let value = parse_value(algebras[side.index()], &part[dot + 1..], line_no, col + dot + 1)?;
            ends.push(Node::new(side, value));
        }
        seeds.push((ends[0], ends[1]));
    }
    CrossImplication::from_seeds(a1, a2, &seeds)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::File { .. } => e,
        other => Error::File {
            path: path.display().to_string(),
            message: other.to_string(),
        },
    }
}

/// Paths making up one problem instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFiles {
    pub languages: [PathBuf; 2],
    pub translation: Option<PathBuf>,
    pub implication: Option<PathBuf>,
}

impl CorpusFiles {
    /// The standard layout: `language1.lang`, `language2.lang`, and at
    /// least one of `translation.tr` and `implication.imp`.
    pub fn in_dir(dir: &Path) -> Result<CorpusFiles> {
        let optional = |name: &str| {
            let p = dir.join(name);
            p.is_file().then_some(p)
        };
        let files = CorpusFiles {
            languages: [dir.join("language1.lang"), dir.join("language2.lang")],
            translation: optional("translation.tr"),
            implication: optional("implication.imp"),
        };
        if files.translation.is_none() && files.implication.is_none() {
            return Err(Error::File {
                path: dir.display().to_string(),
                message: "neither translation.tr nor implication.imp is present".into(),
            });
        }
        Ok(files)
    }
}

/// A loaded instance: both algebras plus whatever the files describe.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub algebras: [Arc<Algebra>; 2],
    pub translation: Option<Translation>,
    pub implication: Option<CrossImplication>,
    /// Every file read, with its contents.
    pub sources: Vec<(PathBuf, String)>,
}

impl Corpus {
    pub fn load(files: &CorpusFiles, limits: Limits) -> Result<Corpus> {
        let mut sources = Vec::new();
        let mut algebras = Vec::with_capacity(2);
        for path in &files.languages {
            let text = read(path)?;
            let a = Algebra::from_source(&text, limits).map_err(|e| in_file(path, e))?;
            algebras.push(Arc::new(a));
            sources.push((path.clone(), text));
        }
        let (a1, a2) = (algebras[0].clone(), algebras[1].clone());
        let translation = match &files.translation {
            Some(path) => {
                let text = read(path)?;
                let t = parse_translation(&text, a1.clone(), a2.clone()).map_err(|e| in_file(path, e))?;
                sources.push((path.clone(), text));
                Some(t)
            }
            None => None,
        };
        let implication = match &files.implication {
            Some(path) => {
                let text = read(path)?;
                let r = parse_seeds(&text, a1.clone(), a2.clone()).map_err(|e| in_file(path, e))?;
                sources.push((path.clone(), text));
                Some(r)
            }
            None => None,
        };
        Ok(Corpus {
            algebras: [a1, a2],
            translation,
            implication,
            sources,
        })
    }

    pub fn load_dir(dir: &Path, limits: Limits) -> Result<Corpus> {
        Corpus::load(&CorpusFiles::in_dir(dir)?, limits)
    }

    /// The translation file if present, else the operators read off the
    /// implication relation, which must then satisfy its axioms.
    pub fn resolved_translation(&self) -> Result<Translation> {
        match (&self.translation, &self.implication) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(r)) => r.to_translation(),
            (None, None) => Err(Error::MalformedTranslation("no translation or implication given".into())),
        }
    }
}
