//! Textual form: `[a,b]`, `(a,b]`, `[a,b)`, `(a,b)`, `{p}`, `empty`, joined
//! by `u`. Rationals print as `p/q`, or as a bare integer when `q = 1`.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::{Boundary, Interval, IntervalSet, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("offset {offset}: {message}")]
pub struct ParseSetError {
    pub offset: usize,
    pub message: String,
}

impl ParseSetError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseSetError {
            offset,
            message: message.into(),
        }
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or an integer, with an optional leading minus sign.
pub fn parse_rational(s: &str) -> Result<Rational, ParseSetError> {
    let bad = || ParseSetError::new(0, format!("invalid rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let unsigned = num.strip_prefix('-').unwrap_or(num);
    if !digits(unsigned) || den.is_some_and(|d| !digits(d)) {
        return Err(bad());
    }
    let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => 1.into(),
    };
    if den == 0.into() {
        return Err(ParseSetError::new(0, format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", format_rational(&self.lo.value));
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo.closed { '[' } else { '(' },
            format_rational(&self.lo.value),
            format_rational(&self.hi.value),
            if self.hi.closed { ']' } else { ')' },
        )
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("empty");
        }
        for (k, part) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseSetError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseSetError::new(self.pos, format!("expected `{c}`")))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let boundary = rest[word.len().min(rest.len())..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        if rest.starts_with(word) && boundary {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseSetError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_digit() || c == '/' || c == '-'))
            .unwrap_or(self.src.len() - start);
        self.pos += len;
        parse_rational(&self.src[start..self.pos]).map_err(|e| ParseSetError::new(start, e.message))
    }

    fn interval(&mut self) -> Result<Vec<Interval>, ParseSetError> {
        let start = self.pos;
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                let mut points = vec![Interval::point(self.rational()?)];
                while self.eat(',') {
                    points.push(Interval::point(self.rational()?));
                }
                self.expect('}')?;
                Ok(points)
            }
            Some(open @ ('[' | '(')) => {
                self.pos += 1;
                let lo = self.rational()?;
                self.expect(',')?;
                let hi = self.rational()?;
                let close = match self.peek() {
                    Some(c @ (']' | ')')) => {
                        self.pos += 1;
                        c
                    }
                    _ => return Err(ParseSetError::new(self.pos, "expected `]` or `)`")),
                };
                let interval = Interval::new(Boundary::new(lo, open == '['), Boundary::new(hi, close == ']'))
                    .ok_or_else(|| ParseSetError::new(start, "interval is empty; write `empty` instead"))?;
                Ok(vec![interval])
            }
            _ => Err(ParseSetError::new(self.pos, "expected an interval, `{p}`, or `empty`")),
        }
    }
}

/// Parses a set at the start of `src`, returning it with the number of bytes
/// consumed. Used by callers that embed set literals in larger grammars.
pub(crate) fn parse_prefix(src: &str) -> Result<(IntervalSet, usize), ParseSetError> {
    let mut cur = Cursor { src, pos: 0 };
    if cur.keyword("empty") {
        return Ok((IntervalSet::empty(), cur.pos));
    }
    let mut parts = cur.interval()?;
    loop {
        let save = cur.pos;
        if cur.keyword("u") {
            parts.extend(cur.interval()?);
        } else {
            cur.pos = save;
            break;
        }
    }
    Ok((IntervalSet::from_intervals(parts), cur.pos))
}

impl IntervalSet {
    /// Parses a set literal at the start of `src`; returns the set and the
    /// byte length consumed (trailing text is left for the caller).
    pub fn parse_prefix(src: &str) -> Result<(IntervalSet, usize), ParseSetError> {
        parse_prefix(src)
    }
}

impl FromStr for IntervalSet {
    type Err = ParseSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (set, used) = parse_prefix(s)?;
        if !s[used..].trim().is_empty() {
            return Err(ParseSetError::new(used, "unexpected trailing input"));
        }
        Ok(set)
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(de::Error::custom)
    }
}
