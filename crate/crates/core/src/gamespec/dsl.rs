//! Line-oriented game description language.
//!
//! ```text
//! game "fx1"
//! space 1 = interval [0,1]
//! space 2 = interval [0,1]
//! pref 1 piecewise:
//!   when x1 in [0,1) : (x1,1]
//!   when x1 in {1} : empty
//! ```
//!
//! Beyond membership conditions, a `when` clause may compare two
//! coordinates (`x1 < x2`), and an interval space may name the set its
//! correspondences were written for (`space 1 = interval {1} within [0,1]`).

use std::collections::HashMap;
use std::fmt::Write as _;

use qualred_intervalset::{format_rational, parse_rational, Boundary, Interval, IntervalSet, Rational};
use thiserror::Error;

use super::{
    Backend, Cell, ContinuumGame, CoverageError, EndpointExpr, FiniteCorrespondence, FiniteGame, Piece,
    PiecewiseCorrespondence, QualitativeGame, RelOp, Relation, SymbolicValue, UtilityTable,
};
use crate::sets::LabelSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("unknown player {0}")]
    UnknownPlayer(usize),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("cell overlaps the cell on line {other_line} at {witness}")]
    Overlap { other_line: usize, witness: String },
    #[error("no cell covers {witness}")]
    Uncovered { witness: String },
    #[error("value leaves the carrier at {witness}")]
    EscapesCarrier { witness: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '/' | '-')
}

fn lex(line: usize, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if is_word_char(c) {
            let start = k;
            while k < chars.len() && is_word_char(chars[k]) {
                k += 1;
            }
            out.push(Token {
                tok: Tok::Word(chars[start..k].iter().collect()),
                col,
            });
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            k += 1;
            loop {
                match chars.get(k) {
                    None => {
                        return Err(ParseError {
                            line,
                            column: col,
                            kind: ParseErrorKind::Syntax("unterminated string".into()),
                        })
                    }
                    Some('"') => break,
                    Some('\\') if k + 1 < chars.len() => {
                        s.push(chars[k + 1]);
                        k += 2;
                    }
                    Some(ch) => {
                        s.push(*ch);
                        k += 1;
                    }
                }
            }
            k += 1;
            out.push(Token { tok: Tok::Str(s), col });
            continue;
        }
        let two: String = chars[k..(k + 2).min(chars.len())].iter().collect();
        let sym = match two.as_str() {
            "<=" => Some("<="),
            ">=" => Some(">="),
            _ => None,
        };
        if let Some(s) = sym {
            out.push(Token { tok: Tok::Sym(s), col });
            k += 2;
            continue;
        }
        let sym = match c {
            '[' => "[",
            ']' => "]",
            '(' => "(",
            ')' => ")",
            '{' => "{",
            '}' => "}",
            ',' => ",",
            ':' => ":",
            '=' => "=",
            '<' => "<",
            '>' => ">",
            '+' => "+",
            '*' => "*",
            _ => {
                return Err(ParseError {
                    line,
                    column: col,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
                })
            }
        };
        out.push(Token {
            tok: Tok::Sym(sym),
            col,
        });
        k += 1;
    }
    Ok(out)
}

struct Line {
    no: usize,
    toks: Vec<Token>,
    pos: usize,
    end_col: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Line {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.no,
            column: self.col(),
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.peek_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{s}`")))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{w}`")))
        }
    }

    fn word(&mut self, what: &str) -> PResult<(String, usize)> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Word(w), col }) => {
                let out = (w.clone(), *col);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn label(&mut self) -> PResult<(String, usize)> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Word(w) | Tok::Str(w),
                col,
            }) => {
                let out = (w.clone(), *col);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.syntax("expected a label")),
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.pos < self.toks.len() {
            Err(self.syntax("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    fn player(&mut self) -> PResult<(usize, usize)> {
        let col = self.col();
        let (w, _) = self.word("a player number")?;
        match w.parse::<usize>() {
            Ok(k) if k >= 1 => Ok((k, col)),
            _ => Err(ParseError {
                line: self.no,
                column: col,
                kind: ParseErrorKind::Syntax(format!("`{w}` is not a player number")),
            }),
        }
    }

    fn rational(&mut self) -> PResult<Rational> {
        let col = self.col();
        let (w, _) = self.word("a rational")?;
        parse_rational(&w).map_err(|e| ParseError {
            line: self.no,
            column: col,
            kind: ParseErrorKind::Syntax(e.message),
        })
    }

    fn interval(&mut self) -> PResult<Vec<Interval>> {
        let col = self.col();
        if self.eat_sym("{") {
            let mut pts = vec![Interval::point(self.rational()?)];
            while self.eat_sym(",") {
                pts.push(Interval::point(self.rational()?));
            }
            self.expect_sym("}")?;
            return Ok(pts);
        }
        let lo_closed = if self.eat_sym("[") {
            true
        } else if self.eat_sym("(") {
            false
        } else {
            return Err(self.syntax("expected an interval, `{p}`, or `empty`"));
        };
        let lo = self.rational()?;
        self.expect_sym(",")?;
        let hi = self.rational()?;
        let hi_closed = if self.eat_sym("]") {
            true
        } else if self.eat_sym(")") {
            false
        } else {
            return Err(self.syntax("expected `]` or `)`"));
        };
        Interval::new(Boundary::new(lo, lo_closed), Boundary::new(hi, hi_closed))
            .map(|i| vec![i])
            .ok_or(ParseError {
                line: self.no,
                column: col,
                kind: ParseErrorKind::Syntax("interval is empty; write `empty` instead".into()),
            })
    }

    fn set(&mut self) -> PResult<IntervalSet> {
        if self.eat_word("empty") {
            return Ok(IntervalSet::empty());
        }
        let mut parts = self.interval()?;
        while self.eat_word("u") {
            parts.extend(self.interval()?);
        }
        Ok(IntervalSet::from_intervals(parts))
    }

    fn coord(&mut self) -> PResult<(usize, usize)> {
        let col = self.col();
        let (w, _) = self.word("a coordinate `xK`")?;
        coord_index(&w)
            .ok_or(ParseError {
                line: self.no,
                column: col,
                kind: ParseErrorKind::Syntax(format!("expected a coordinate `xK`, found `{w}`")),
            })
            .map(|k| (k, col))
    }

    fn expr(&mut self) -> PResult<RawExpr> {
        let col = self.col();
        let (w, _) = self.word("a rational or a coordinate")?;
        if self.peek_sym("+") || self.peek_sym("*") {
            return Err(self.error(ParseErrorKind::Unsupported(
                "affine endpoint expressions are not supported".into(),
            )));
        }
        if let Some(k) = coord_index(&w) {
            return Ok(RawExpr::Coord(k, col));
        }
        if let Ok(r) = parse_rational(&w) {
            return Ok(RawExpr::Const(r));
        }
        let kind = if w.starts_with('x') && w[1..].starts_with(|c: char| c.is_ascii_digit()) {
            ParseErrorKind::Unsupported("affine endpoint expressions are not supported".into())
        } else {
            ParseErrorKind::Syntax(format!("expected a rational or a coordinate, found `{w}`"))
        };
        Err(ParseError {
            line: self.no,
            column: col,
            kind,
        })
    }

    fn value(&mut self) -> PResult<RawValue> {
        if self.eat_word("empty") {
            return Ok(RawValue::Empty);
        }
        let col = self.col();
        let lo_closed = if self.eat_sym("[") {
            true
        } else if self.eat_sym("(") {
            false
        } else {
            return Err(self.syntax("expected a value: `empty` or an interval"));
        };
        let lo = self.expr()?;
        self.expect_sym(",")?;
        let hi = self.expr()?;
        let hi_closed = if self.eat_sym("]") {
            true
        } else if self.eat_sym(")") {
            false
        } else {
            return Err(self.syntax("expected `]` or `)`"));
        };
        if self.peek_word("u") {
            return Err(self.error(ParseErrorKind::Unsupported(
                "union values are not supported; split the cell instead".into(),
            )));
        }
        Ok(RawValue::Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
            col,
        })
    }

    fn profile(&mut self) -> PResult<Vec<(String, usize)>> {
        self.expect_sym("(")?;
        let mut out = vec![self.label()?];
        while self.eat_sym(",") {
            out.push(self.label()?);
        }
        self.expect_sym(")")?;
        Ok(out)
    }
}

fn coord_index(w: &str) -> Option<usize> {
    let digits = w.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[derive(Debug)]
enum RawExpr {
    Const(Rational),
    Coord(usize, usize),
}

#[derive(Debug)]
enum RawValue {
    Empty,
    Interval {
        lo: RawExpr,
        lo_closed: bool,
        hi: RawExpr,
        hi_closed: bool,
        col: usize,
    },
}

#[derive(Debug)]
enum RawCond {
    In {
        var: usize,
        col: usize,
        set: IntervalSet,
    },
    Rel {
        left: usize,
        op: RelOp,
        right: usize,
        col: usize,
    },
}

#[derive(Debug)]
struct RawPiece {
    line: usize,
    conds: Vec<RawCond>,
    value: RawValue,
}

#[derive(Debug)]
struct RawRow {
    line: usize,
    profile: Vec<(String, usize)>,
    labels: Vec<(String, usize)>,
    utility: Option<Rational>,
}

#[derive(Debug)]
enum RawBody {
    Piecewise(Vec<RawPiece>),
    Table(Vec<RawRow>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DeclKind {
    Pref,
    Comp,
    Util,
}

#[derive(Debug)]
struct RawDecl {
    line: usize,
    col: usize,
    kind: DeclKind,
    player: usize,
    body: RawBody,
}

#[derive(Debug)]
enum RawSpace {
    Finite(Vec<(String, usize)>),
    Interval {
        space: IntervalSet,
        ambient: Option<IntervalSet>,
    },
}

pub fn parse_game(text: &str) -> Result<QualitativeGame, ParseError> {
    let mut lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let toks = lex(k + 1, raw)?;
        if !toks.is_empty() {
            lines.push(Line {
                no: k + 1,
                toks,
                pos: 0,
                end_col: raw.chars().count() + 1,
            });
        }
    }
    let last_line = text.lines().count().max(1);
    let mut it = lines.into_iter().peekable();
    let mut head = it.next().ok_or(ParseError {
        line: 1,
        column: 1,
        kind: ParseErrorKind::Syntax("expected `game \"name\"`".into()),
    })?;
    head.expect_word("game")?;
    let name = match head.toks.get(head.pos) {
        Some(Token { tok: Tok::Str(s), .. }) => s.clone(),
        _ => return Err(head.syntax("expected the game name as a quoted string")),
    };
    head.pos += 1;
    head.finish()?;

    let mut spaces: Vec<(usize, usize, usize, RawSpace)> = Vec::new();
    let mut decls: Vec<RawDecl> = Vec::new();
    while let Some(mut line) = it.next() {
        let col = line.col();
        let (kw, _) = line.word("a declaration")?;
        match kw.as_str() {
            "space" => {
                let (player, _) = line.player()?;
                line.expect_sym("=")?;
                let space = if line.eat_word("finite") {
                    line.expect_sym("{")?;
                    let mut labels = vec![line.label()?];
                    while line.eat_sym(",") {
                        labels.push(line.label()?);
                    }
                    line.expect_sym("}")?;
                    RawSpace::Finite(labels)
                } else if line.eat_word("interval") {
                    let space = line.set()?;
                    let ambient = if line.eat_word("within") {
                        Some(line.set()?)
                    } else {
                        None
                    };
                    RawSpace::Interval { space, ambient }
                } else {
                    return Err(line.syntax("expected `finite` or `interval`"));
                };
                line.finish()?;
                spaces.push((line.no, col, player, space));
            }
            "pref" | "comp" | "util" => {
                let kind = match kw.as_str() {
                    "pref" => DeclKind::Pref,
                    "comp" => DeclKind::Comp,
                    _ => DeclKind::Util,
                };
                let (player, _) = line.player()?;
                let piecewise = if kind != DeclKind::Util && line.eat_word("piecewise") {
                    true
                } else if line.eat_word("table") {
                    false
                } else if kind == DeclKind::Util {
                    return Err(line.syntax("expected `table:`"));
                } else {
                    return Err(line.syntax("expected `piecewise:` or `table:`"));
                };
                line.expect_sym(":")?;
                line.finish()?;
                let opener = if piecewise { "when" } else { "at" };
                let mut body_lines = Vec::new();
                while it.peek().is_some_and(|l| l.peek_word(opener)) {
                    body_lines.push(it.next().expect("peeked"));
                }
                if body_lines.is_empty() {
                    return Err(ParseError {
                        line: line.no,
                        column: line.end_col,
                        kind: ParseErrorKind::Syntax(format!("expected at least one `{opener}` line")),
                    });
                }
                let body = if piecewise {
                    RawBody::Piecewise(body_lines.into_iter().map(parse_when).collect::<PResult<_>>()?)
                } else {
                    RawBody::Table(
                        body_lines
                            .into_iter()
                            .map(|l| parse_row(l, kind == DeclKind::Util))
                            .collect::<PResult<_>>()?,
                    )
                };
                decls.push(RawDecl {
                    line: line.no,
                    col,
                    kind,
                    player,
                    body,
                });
            }
            "when" | "at" => {
                return Err(ParseError {
                    line: line.no,
                    column: col,
                    kind: ParseErrorKind::Syntax(format!("`{kw}` line outside a correspondence")),
                })
            }
            other => {
                return Err(ParseError {
                    line: line.no,
                    column: col,
                    kind: ParseErrorKind::Syntax(format!("unknown declaration `{other}`")),
                })
            }
        }
    }
    build(name, spaces, decls, last_line)
}

fn parse_when(mut l: Line) -> PResult<RawPiece> {
    l.expect_word("when")?;
    let mut conds = Vec::new();
    loop {
        let (var, col) = l.coord()?;
        if l.eat_word("in") {
            conds.push(RawCond::In {
                var,
                col,
                set: l.set()?,
            });
        } else {
            let op = if l.eat_sym("<") {
                RelOp::Lt
            } else if l.eat_sym("<=") {
                RelOp::Le
            } else if l.eat_sym("=") {
                RelOp::Eq
            } else if l.eat_sym(">=") {
                RelOp::Ge
            } else if l.eat_sym(">") {
                RelOp::Gt
            } else {
                return Err(l.syntax("expected `in` or a comparison"));
            };
            let (right, _) = l.coord()?;
            conds.push(RawCond::Rel {
                left: var,
                op,
                right,
                col,
            });
        }
        if !l.eat_word("and") {
            break;
        }
    }
    l.expect_sym(":")?;
    let value = l.value()?;
    l.finish()?;
    Ok(RawPiece {
        line: l.no,
        conds,
        value,
    })
}

fn parse_row(mut l: Line, utility: bool) -> PResult<RawRow> {
    l.expect_word("at")?;
    let profile = l.profile()?;
    let mut labels = Vec::new();
    let mut value = None;
    if utility {
        l.expect_sym("=")?;
        value = Some(l.rational()?);
    } else {
        l.expect_sym(":")?;
        l.expect_sym("{")?;
        while !l.eat_sym("}") {
            labels.push(l.label()?);
            l.eat_sym(",");
        }
    }
    l.finish()?;
    Ok(RawRow {
        line: l.no,
        profile,
        labels,
        utility: value,
    })
}

fn err_at(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

fn build(
    name: String,
    mut spaces: Vec<(usize, usize, usize, RawSpace)>,
    decls: Vec<RawDecl>,
    last_line: usize,
) -> Result<QualitativeGame, ParseError> {
    spaces.sort_by_key(|s| s.2);
    let n = spaces.len();
    for (k, (line, col, player, _)) in spaces.iter().enumerate() {
        if *player != k + 1 {
            let msg = if *player <= k {
                format!("space {player} declared twice")
            } else {
                format!("space {} is missing", k + 1)
            };
            return Err(err_at(*line, *col, ParseErrorKind::Invalid(msg)));
        }
    }
    if n < 2 {
        return Err(err_at(
            last_line,
            1,
            ParseErrorKind::Invalid("a game needs at least two `space` declarations".into()),
        ));
    }
    let finite = matches!(spaces[0].3, RawSpace::Finite(_));
    for (line, col, _, s) in &spaces {
        if matches!(s, RawSpace::Finite(_)) != finite {
            return Err(err_at(
                *line,
                *col,
                ParseErrorKind::Invalid("all spaces must be finite or all must be intervals".into()),
            ));
        }
    }
    let mut seen: HashMap<(usize, u8), usize> = HashMap::new();
    for d in &decls {
        if d.player > n {
            return Err(err_at(d.line, d.col, ParseErrorKind::UnknownPlayer(d.player)));
        }
        let tag = d.kind as u8;
        if let Some(prev) = seen.insert((d.player, tag), d.line) {
            return Err(err_at(
                d.line,
                d.col,
                ParseErrorKind::Invalid(format!("duplicate declaration (first on line {prev})")),
            ));
        }
        let table = matches!(d.body, RawBody::Table(_));
        if d.kind != DeclKind::Util && table != finite {
            let msg = if finite {
                "finite games use `table:` correspondences"
            } else {
                "interval games use `piecewise:` correspondences"
            };
            return Err(err_at(d.line, d.col, ParseErrorKind::Invalid(msg.into())));
        }
        if d.kind == DeclKind::Util && !finite {
            return Err(err_at(
                d.line,
                d.col,
                ParseErrorKind::Invalid("utility tables need finite spaces".into()),
            ));
        }
    }
    let count = |kind: DeclKind| decls.iter().filter(|d| d.kind == kind).count();
    for kind in [DeclKind::Pref, DeclKind::Comp, DeclKind::Util] {
        let c = count(kind);
        let required = kind == DeclKind::Pref && !(finite && count(DeclKind::Util) == n);
        if (c > 0 || required) && c < n {
            let missing = (1..=n)
                .find(|p| !decls.iter().any(|d| d.kind == kind && d.player == *p))
                .unwrap_or(1);
            let what = match kind {
                DeclKind::Pref => "pref",
                DeclKind::Comp => "comp",
                DeclKind::Util => "util",
            };
            return Err(err_at(
                last_line,
                1,
                ParseErrorKind::Invalid(format!("missing `{what} {missing}`")),
            ));
        }
    }
    let game = if finite {
        build_finite(&spaces, &decls, n)?
    } else {
        build_continuum(&spaces, decls, n)?
    };
    Ok(QualitativeGame { name, backend: game })
}

fn build_finite(
    spaces: &[(usize, usize, usize, RawSpace)],
    decls: &[RawDecl],
    n: usize,
) -> Result<Backend, ParseError> {
    let mut labels = Vec::new();
    for (line, _, _, s) in spaces {
        let RawSpace::Finite(l) = s else { unreachable!() };
        let mut names: Vec<String> = Vec::new();
        for (name, col) in l {
            if names.contains(name) {
                return Err(err_at(
                    *line,
                    *col,
                    ParseErrorKind::Invalid(format!("label `{name}` repeated")),
                ));
            }
            names.push(name.clone());
        }
        labels.push(names);
    }
    let mut strides = vec![1usize; n];
    for i in (0..n - 1).rev() {
        strides[i] = strides[i + 1] * labels[i + 1].len();
    }
    let total = strides[0] * labels[0].len();
    let resolve = |i: usize, name: &str, line: usize, col: usize| -> PResult<usize> {
        labels[i]
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| err_at(line, col, ParseErrorKind::UnknownLabel(name.to_string())))
    };
    let flat_of = |row: &RawRow| -> PResult<usize> {
        if row.profile.len() != n {
            let col = row.profile.first().map_or(1, |p| p.1);
            return Err(err_at(
                row.line,
                col,
                ParseErrorKind::Syntax(format!("profile needs {n} labels")),
            ));
        }
        let mut f = 0;
        for (i, (name, col)) in row.profile.iter().enumerate() {
            f += resolve(i, name, row.line, *col)? * strides[i];
        }
        Ok(f)
    };
    let describe = |f: usize| -> String {
        let names: Vec<&str> = (0..n)
            .map(|i| labels[i][(f / strides[i]) % labels[i].len()].as_str())
            .collect();
        format!("({})", names.join(", "))
    };
    let mut pref = vec![None; n];
    let mut comp = vec![None; n];
    let mut util = vec![None; n];
    for d in decls {
        let RawBody::Table(rows) = &d.body else { unreachable!() };
        let owner = d.player - 1;
        let mut sets: Vec<Option<LabelSet>> = vec![None; total];
        let mut utils: Vec<Option<Rational>> = vec![None; total];
        for row in rows {
            let f = flat_of(row)?;
            if sets[f].is_some() || utils[f].is_some() {
                return Err(err_at(
                    row.line,
                    row.profile[0].1,
                    ParseErrorKind::Invalid(format!("profile {} listed twice", describe(f))),
                ));
            }
            if let Some(u) = &row.utility {
                utils[f] = Some(u.clone());
            } else {
                let mut s = LabelSet::empty(labels[owner].len());
                for (name, col) in &row.labels {
                    s.insert(resolve(owner, name, row.line, *col)?);
                }
                sets[f] = Some(s);
            }
        }
        let missing = |present: &dyn Fn(usize) -> bool| -> PResult<()> {
            match (0..total).find(|f| !present(*f)) {
                Some(f) => Err(err_at(
                    d.line,
                    d.col,
                    ParseErrorKind::Invalid(format!("table lacks profile {}", describe(f))),
                )),
                None => Ok(()),
            }
        };
        if d.kind == DeclKind::Util {
            missing(&|f| utils[f].is_some())?;
            util[owner] = Some(UtilityTable {
                owner,
                table: utils.into_iter().flatten().collect(),
            });
        } else {
            missing(&|f| sets[f].is_some())?;
            let corr = FiniteCorrespondence {
                owner,
                table: sets.into_iter().flatten().collect(),
            };
            if d.kind == DeclKind::Pref {
                pref[owner] = Some(corr);
            } else {
                comp[owner] = Some(corr);
            }
        }
    }
    let game = FiniteGame::new(labels, all_or_none(pref), all_or_none(comp), all_or_none(util))
        .map_err(|e| err_at(1, 1, ParseErrorKind::Invalid(e.to_string())))?;
    Ok(Backend::Finite(game))
}

fn all_or_none<T>(v: Vec<Option<T>>) -> Option<Vec<T>> {
    v.into_iter().collect()
}

fn build_continuum(
    spaces: &[(usize, usize, usize, RawSpace)],
    decls: Vec<RawDecl>,
    n: usize,
) -> Result<Backend, ParseError> {
    let mut carriers = Vec::new();
    let mut ambients = Vec::new();
    for (line, col, _, s) in spaces {
        let RawSpace::Interval { space, ambient } = s else {
            unreachable!()
        };
        if space.is_empty() {
            return Err(err_at(*line, *col, ParseErrorKind::Invalid("space is empty".into())));
        }
        let ambient = ambient.clone().unwrap_or_else(|| space.clone());
        if !space.is_subset(&ambient) {
            return Err(err_at(
                *line,
                *col,
                ParseErrorKind::Invalid("space is not inside its `within` set".into()),
            ));
        }
        carriers.push(space.clone());
        ambients.push(ambient);
    }
    type Slot = Option<(PiecewiseCorrespondence, Vec<usize>, usize)>;
    let mut pref: Vec<Slot> = vec![None; n];
    let mut comp: Vec<Slot> = vec![None; n];
    for d in decls {
        let RawBody::Piecewise(raw) = d.body else {
            unreachable!()
        };
        let owner = d.player - 1;
        let mut pieces = Vec::new();
        let mut lines = Vec::new();
        for rp in raw {
            let mut factors = carriers.clone();
            let mut relations = Vec::new();
            for c in rp.conds {
                match c {
                    RawCond::In { var, col, set } => {
                        if var == 0 || var > n {
                            return Err(err_at(rp.line, col, ParseErrorKind::UnknownPlayer(var)));
                        }
                        if !set.is_subset(&carriers[var - 1]) {
                            return Err(err_at(
                                rp.line,
                                col,
                                ParseErrorKind::Invalid(format!("condition on x{var} leaves its space")),
                            ));
                        }
                        factors[var - 1] = factors[var - 1].intersect(&set);
                    }
                    RawCond::Rel { left, op, right, col } => {
                        for v in [left, right] {
                            if v == 0 || v > n {
                                return Err(err_at(rp.line, col, ParseErrorKind::UnknownPlayer(v)));
                            }
                        }
                        if left == right {
                            return Err(err_at(
                                rp.line,
                                col,
                                ParseErrorKind::Invalid("a comparison needs two different coordinates".into()),
                            ));
                        }
                        relations.push(Relation {
                            left: left - 1,
                            op,
                            right: right - 1,
                        });
                    }
                }
            }
            let value = match rp.value {
                RawValue::Empty => SymbolicValue::Empty,
                RawValue::Interval {
                    lo,
                    lo_closed,
                    hi,
                    hi_closed,
                    col,
                } => {
                    let conv = |e: RawExpr| -> PResult<EndpointExpr> {
                        match e {
                            RawExpr::Const(c) => Ok(EndpointExpr::Const(c)),
                            RawExpr::Coord(k, c) if k == 0 || k > n => {
                                Err(err_at(rp.line, c, ParseErrorKind::UnknownPlayer(k)))
                            }
                            RawExpr::Coord(k, _) => Ok(EndpointExpr::Coord(k - 1)),
                        }
                    };
                    let (lo, hi) = (conv(lo)?, conv(hi)?);
                    if let (EndpointExpr::Const(a), EndpointExpr::Const(b)) = (&lo, &hi) {
                        if Interval::new(Boundary::new(a.clone(), lo_closed), Boundary::new(b.clone(), hi_closed))
                            .is_none()
                        {
                            return Err(err_at(
                                rp.line,
                                col,
                                ParseErrorKind::Syntax("interval is empty; write `empty` instead".into()),
                            ));
                        }
                    }
                    SymbolicValue::Interval {
                        lo,
                        lo_closed,
                        hi,
                        hi_closed,
                    }
                }
            };
            relations.sort();
            relations.dedup();
            pieces.push(Piece {
                cell: Cell { factors, relations },
                value,
            });
            lines.push(rp.line);
        }
        let corr = PiecewiseCorrespondence { owner, pieces };
        let slot = if d.kind == DeclKind::Pref {
            &mut pref[owner]
        } else {
            &mut comp[owner]
        };
        *slot = Some((corr, lines, d.line));
    }
    let game = ContinuumGame::unchecked(
        carriers,
        ambients,
        pref.iter().flatten().map(|(c, _, _)| c.clone()).collect(),
        if comp.iter().all(Option::is_some) {
            Some(comp.iter().flatten().map(|(c, _, _)| c.clone()).collect())
        } else {
            None
        },
    )
    .map_err(|e| err_at(1, 1, ParseErrorKind::Invalid(e.to_string())))?;
    for (corr, lines, header) in pref.iter().chain(&comp).flatten() {
        if let Err(e) = game.check_correspondence(corr) {
            let render = |w: &[Rational]| super::render_point(w);
            let (line, kind) = match &e {
                CoverageError::Overlap { first, second, witness } => (
                    lines[*second],
                    ParseErrorKind::Overlap {
                        other_line: lines[*first],
                        witness: render(witness),
                    },
                ),
                CoverageError::Uncovered { witness } => (
                    *header,
                    ParseErrorKind::Uncovered {
                        witness: render(witness),
                    },
                ),
                CoverageError::Escapes { piece, witness } => (
                    lines[*piece],
                    ParseErrorKind::EscapesCarrier {
                        witness: render(witness),
                    },
                ),
            };
            return Err(err_at(line, 1, kind));
        }
    }
    let canon = |v: &[Slot]| -> Vec<PiecewiseCorrespondence> {
        v.iter()
            .flatten()
            .map(|(c, _, _)| PiecewiseCorrespondence::new(c.owner, c.pieces.clone()))
            .collect()
    };
    let comp = comp.iter().all(Option::is_some).then(|| canon(&comp));
    let game = ContinuumGame::unchecked(
        game.spaces().to_vec(),
        (0..n).map(|i| game.ambient(i).clone()).collect(),
        canon(&pref),
        comp,
    )
    .map_err(|e| err_at(1, 1, ParseErrorKind::Invalid(e.to_string())))?;
    Ok(Backend::Continuum(game))
}

fn bare(label: &str) -> bool {
    !label.is_empty() && label.chars().all(is_word_char)
}

fn render_label(label: &str) -> String {
    if bare(label) {
        label.to_string()
    } else {
        let escaped = label.replace('\\', "\\\\").replace('"', "\\\"");
        format!("\"{escaped}\"")
    }
}

fn render_expr(e: &EndpointExpr) -> String {
    match e {
        EndpointExpr::Const(c) => format_rational(c),
        EndpointExpr::Coord(j) => format!("x{}", j + 1),
    }
}

pub(super) fn render_value(v: &SymbolicValue) -> String {
    match v {
        SymbolicValue::Empty => "empty".into(),
        SymbolicValue::Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        } => format!(
            "{}{},{}{}",
            if *lo_closed { '[' } else { '(' },
            render_expr(lo),
            render_expr(hi),
            if *hi_closed { ']' } else { ')' }
        ),
    }
}

/// Canonical text for a game; `parse_game` reads it back unchanged.
pub fn serialize_game(game: &QualitativeGame) -> String {
    let mut out = String::new();
    let name = game.name.replace('\\', "\\\\").replace('"', "\\\"");
    let _ = writeln!(out, "game \"{name}\"");
    match &game.backend {
        Backend::Finite(g) => {
            let n = g.players();
            for i in 0..n {
                let labels: Vec<String> = g.labels(i).iter().map(|l| render_label(l)).collect();
                let _ = writeln!(out, "space {} = finite {{{}}}", i + 1, labels.join(", "));
            }
            let profile = |f: usize| -> String {
                let names: Vec<String> = g
                    .unflat(f)
                    .iter()
                    .enumerate()
                    .map(|(i, k)| render_label(&g.labels(i)[*k]))
                    .collect();
                format!("({})", names.join(", "))
            };
            let tables = [("pref", Some(g.pref_tables())), ("comp", g.comp_tables())];
            for (kw, t) in tables {
                let Some(t) = t else { continue };
                for c in t {
                    let _ = writeln!(out, "{kw} {} table:", c.owner + 1);
                    for (f, s) in c.table.iter().enumerate() {
                        let names: Vec<String> = s.iter().map(|k| render_label(&g.labels(c.owner)[k])).collect();
                        let _ = writeln!(out, "  at {} : {{{}}}", profile(f), names.join(" "));
                    }
                }
            }
            if let Some(u) = g.util_tables() {
                for t in u {
                    let _ = writeln!(out, "util {} table:", t.owner + 1);
                    for (f, v) in t.table.iter().enumerate() {
                        let _ = writeln!(out, "  at {} = {}", profile(f), format_rational(v));
                    }
                }
            }
        }
        Backend::Continuum(g) => {
            for i in 0..g.players() {
                let _ = write!(out, "space {} = interval {}", i + 1, g.space(i));
                if g.ambient(i) != g.space(i) {
                    let _ = write!(out, " within {}", g.ambient(i));
                }
                out.push('\n');
            }
            for (kw, corr) in [("pref", super::Corr::Pref), ("comp", super::Corr::Comp)] {
                for i in 0..g.players() {
                    let Some(c) = g.correspondence(corr, i) else { continue };
                    let _ = writeln!(out, "{kw} {} piecewise:", i + 1);
                    for p in &c.pieces {
                        let mut conds: Vec<String> = p
                            .cell
                            .factors
                            .iter()
                            .enumerate()
                            .filter(|(j, f)| *f != g.space(*j))
                            .map(|(j, f)| format!("x{} in {f}", j + 1))
                            .collect();
                        conds.extend(
                            p.cell
                                .relations
                                .iter()
                                .map(|r| format!("x{} {} x{}", r.left + 1, r.op.symbol(), r.right + 1)),
                        );
                        if conds.is_empty() {
                            conds.push(format!("x{} in {}", i + 1, g.space(i)));
                        }
                        let _ = writeln!(out, "  when {} : {}", conds.join(" and "), render_value(&p.value));
                    }
                }
            }
        }
    }
    out
}
