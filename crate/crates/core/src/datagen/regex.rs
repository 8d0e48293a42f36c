//! Random strings drawn from a regular expression.
//!
//! Supported: literals, escapes (`\d`, `\w`, `\s` and escaped
//! metacharacters), `.`, groups (also `(?:..)`), alternation, positive
//! character classes with ranges, and the quantifiers `?`, `*`, `+`, `{n}`,
//! `{m,n}`, `{n,}`. Open-ended repetition is capped at [`MAX_REPEAT`].

use rand::Rng;
use thiserror::Error;

pub const MAX_REPEAT: u32 = 10;

/// `.` draws from printable ASCII without space.
const DOT: (char, char) = ('\u{21}', '\u{7e}');

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegexNode {
    Alternation(Vec<RegexNode>),
    Concat(Vec<RegexNode>),
    Group(Box<RegexNode>),
    /// Inclusive character ranges.
    Class(Vec<(char, char)>),
    Literal(char),
    Repeat { node: Box<RegexNode>, min: u32, max: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegexError {
    #[error("unsupported regex feature at {position}: {feature}")]
    UnsupportedRegexFeature { feature: &'static str, position: usize },
    #[error("invalid regex at {position}: {reason}")]
    Syntax { reason: &'static str, position: usize },
}

pub fn parse_regex(pattern: &str) -> Result<RegexNode, RegexError> {
    let mut p = RegexParser { chars: pattern.chars().collect(), pos: 0 };
    let node = p.alternation()?;
    if p.pos < p.chars.len() {
        return Err(p.syntax("unbalanced ')'"));
    }
    Ok(node)
}

/// Parses `pattern` and draws one matching string.
pub fn sample_regex<R: Rng + ?Sized>(pattern: &str, rng: &mut R) -> Result<String, RegexError> {
    Ok(sample(&parse_regex(pattern)?, rng))
}

pub fn sample<R: Rng + ?Sized>(node: &RegexNode, rng: &mut R) -> String {
    let mut out = String::new();
    emit(node, rng, &mut out);
    out
}

fn emit<R: Rng + ?Sized>(node: &RegexNode, rng: &mut R, out: &mut String) {
    match node {
        RegexNode::Alternation(branches) => {
            let i = rng.random_range(0..branches.len());
            emit(&branches[i], rng, out);
        }
        RegexNode::Concat(items) => items.iter().for_each(|n| emit(n, rng, out)),
        RegexNode::Group(inner) => emit(inner, rng, out),
        RegexNode::Literal(c) => out.push(*c),
        RegexNode::Class(ranges) => {
            let total: u32 = ranges.iter().map(|(lo, hi)| *hi as u32 - *lo as u32 + 1).sum();
            let mut pick = rng.random_range(0..total);
            for (lo, hi) in ranges {
                let width = *hi as u32 - *lo as u32 + 1;
                if pick < width {
                    out.push(char::from_u32(*lo as u32 + pick).unwrap_or(*lo));
                    return;
                }
                pick -= width;
            }
        }
        RegexNode::Repeat { node, min, max } => {
            for _ in 0..rng.random_range(*min..=*max) {
                emit(node, rng, out);
            }
        }
    }
}

struct RegexParser {
    chars: Vec<char>,
    pos: usize,
}

impl RegexParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn syntax(&self, reason: &'static str) -> RegexError {
        RegexError::Syntax { reason, position: self.pos }
    }

    fn unsupported(&self, feature: &'static str) -> RegexError {
        RegexError::UnsupportedRegexFeature { feature, position: self.pos }
    }

    fn alternation(&mut self) -> Result<RegexNode, RegexError> {
        let mut branches = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap_or(RegexNode::Concat(Vec::new())) } else { RegexNode::Alternation(branches) })
    }

    fn concat(&mut self) -> Result<RegexNode, RegexError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let atom = self.atom()?;
            items.push(self.quantified(atom)?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap_or(RegexNode::Concat(Vec::new())) } else { RegexNode::Concat(items) })
    }

    fn quantified(&mut self, atom: RegexNode) -> Result<RegexNode, RegexError> {
        let (min, max) = match self.peek() {
            Some('*') => (0, MAX_REPEAT),
            Some('+') => (1, MAX_REPEAT),
            Some('?') => (0, 1),
            Some('{') => {
                self.pos += 1;
                return self.braces(atom);
            }
            _ => return Ok(atom),
        };
        self.pos += 1;
        self.check_no_stacked_quantifier()?;
        Ok(RegexNode::Repeat { node: Box::new(atom), min, max })
    }

    fn check_no_stacked_quantifier(&self) -> Result<(), RegexError> {
        match self.peek() {
            Some('*' | '+' | '?' | '{') => Err(self.unsupported("stacked or lazy quantifier")),
            _ => Ok(()),
        }
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().ok()
    }

    /// Body of `{n}`, `{m,n}` or `{n,}` after the opening brace.
    fn braces(&mut self, atom: RegexNode) -> Result<RegexNode, RegexError> {
        let min = self.number().ok_or_else(|| self.syntax("expected repetition count"))?;
        let max = if self.peek() == Some(',') {
            self.pos += 1;
            if self.peek() == Some('}') {
                min.max(MAX_REPEAT)
            } else {
                self.number().ok_or_else(|| self.syntax("expected repetition bound"))?
            }
        } else {
            min
        };
        if self.peek() != Some('}') {
            return Err(self.syntax("expected '}'"));
        }
        self.pos += 1;
        if min > max {
            return Err(self.syntax("repetition minimum exceeds maximum"));
        }
        self.check_no_stacked_quantifier()?;
        Ok(RegexNode::Repeat { node: Box::new(atom), min, max })
    }

    fn atom(&mut self) -> Result<RegexNode, RegexError> {
        let c = self.peek().ok_or_else(|| self.syntax("unexpected end of pattern"))?;
        match c {
            '(' => {
                self.pos += 1;
                if self.peek() == Some('?') {
                    if self.chars.get(self.pos + 1) == Some(&':') {
                        self.pos += 2;
                    } else {
                        return Err(self.unsupported("lookaround or group flags"));
                    }
                }
                let inner = self.alternation()?;
                if self.peek() != Some(')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                Ok(RegexNode::Group(Box::new(inner)))
            }
            '[' => {
                self.pos += 1;
                self.class()
            }
            '.' => {
                self.pos += 1;
                Ok(RegexNode::Class(vec![DOT]))
            }
            '^' | '$' => Err(self.unsupported("anchor")),
            '*' | '+' | '?' | '{' => Err(self.syntax("nothing to repeat")),
            '\\' => {
                self.pos += 1;
                self.escape(false)
            }
            _ => {
                self.pos += 1;
                Ok(RegexNode::Literal(c))
            }
        }
    }

    /// Escape after the backslash. Shorthand classes expand to ranges.
    fn escape(&mut self, in_class: bool) -> Result<RegexNode, RegexError> {
        let c = self.peek().ok_or_else(|| self.syntax("dangling escape"))?;
        let node = match c {
            'd' => RegexNode::Class(vec![('0', '9')]),
            'w' => RegexNode::Class(vec![('0', '9'), ('A', 'Z'), ('_', '_'), ('a', 'z')]),
            's' => RegexNode::Class(vec![(' ', ' ')]),
            'D' | 'W' | 'S' => return Err(self.unsupported("negated shorthand class")),
            'b' | 'B' | 'A' | 'z' | 'Z' if !in_class => return Err(self.unsupported("anchor")),
            '1'..='9' => return Err(self.unsupported("backreference")),
            'n' => RegexNode::Literal('\n'),
            't' => RegexNode::Literal('\t'),
            'r' => RegexNode::Literal('\r'),
            c if c.is_ascii_alphanumeric() => return Err(self.unsupported("unknown escape")),
            c => RegexNode::Literal(c),
        };
        self.pos += 1;
        Ok(node)
    }

    fn class(&mut self) -> Result<RegexNode, RegexError> {
        if self.peek() == Some('^') {
            return Err(self.unsupported("negated class"));
        }
        let mut ranges = Vec::new();
        loop {
            let c = self.peek().ok_or_else(|| self.syntax("unterminated class"))?;
            if c == ']' && !ranges.is_empty() {
                self.pos += 1;
                break;
            }
            if c == '[' {
                return Err(self.unsupported("nested class"));
            }
            let lo = self.class_char()?;
            let lo = match lo {
                RegexNode::Literal(ch) => ch,
                RegexNode::Class(shorthand) => {
                    ranges.extend(shorthand);
                    continue;
                }
                _ => unreachable!("class_char yields literals or classes"),
            };
            let is_range = self.peek() == Some('-') && self.chars.get(self.pos + 1).is_some_and(|&n| n != ']');
            if is_range {
                self.pos += 1;
                let hi = match self.class_char()? {
                    RegexNode::Literal(ch) => ch,
                    _ => return Err(self.syntax("class shorthand cannot end a range")),
                };
                if hi < lo {
                    return Err(self.syntax("reversed class range"));
                }
                ranges.push((lo, hi));
            } else {
                ranges.push((lo, lo));
            }
        }
        Ok(RegexNode::Class(ranges))
    }

    fn class_char(&mut self) -> Result<RegexNode, RegexError> {
        let c = self.peek().ok_or_else(|| self.syntax("unterminated class"))?;
        self.pos += 1;
        if c == '\\' {
            return self.escape(true);
        }
        Ok(RegexNode::Literal(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full_match(pattern: &str) -> regex::Regex {
        regex::Regex::new(&format!("^(?:{pattern})$")).unwrap()
    }

    #[test]
    fn nif_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let s = sample_regex("(1|2)[0-9]{8}", &mut rng).unwrap();
            assert_eq!(s.len(), 9);
            assert!(s.starts_with('1') || s.starts_with('2'));
            assert!(s.chars().all(|c| c.is_ascii_digit()));
        }
    }

    #[test]
    fn single_literal() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_regex("a", &mut rng).unwrap(), "a");
    }

    #[test]
    fn bounded_repetition_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = [false; 5];
        for _ in 0..1000 {
            let s = sample_regex("[0-9]{2,4}", &mut rng).unwrap();
            assert!((2..=4).contains(&s.len()));
            seen[s.len()] = true;
        }
        assert!(seen[2] && seen[3] && seen[4]);
    }

    #[test]
    fn rejects_unsupported_features() {
        for p in ["^a", "a$", "(a)\\1", "(?=a)", "[^a]", "\\bx", "\\D"] {
            assert!(
                matches!(parse_regex(p), Err(RegexError::UnsupportedRegexFeature { .. })),
                "{p}"
            );
        }
        for p in ["(a", "a)", "*", "a{3,1}", "[", "[z-a]"] {
            assert!(matches!(parse_regex(p), Err(RegexError::Syntax { .. })), "{p}");
        }
    }

    #[test]
    fn samples_match_an_independent_engine() {
        let corpus = [
            "(1|2)[0-9]{8}",
            "[0-9]{2,4}",
            "a(b|c)*d",
            "9[0-9]{8}",
            "[a-z0-9_.-]{1,10}@[a-z]{1,8}\\.[a-z]{2,3}",
            "x?y+z{3,}",
            "(?:ab|c)\\d\\w\\.",
            "...",
            "[A-Z][a-z]{2,12}( [A-Z][a-z]{2,12})?",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for pattern in corpus {
            let re = full_match(pattern);
            let node = parse_regex(pattern).unwrap();
            for _ in 0..500 {
                let s = sample(&node, &mut rng);
                assert!(re.is_match(&s), "{pattern} produced {s:?}");
            }
        }
    }

    #[test]
    fn unbounded_repetition_is_capped() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            assert!(sample_regex("a*", &mut rng).unwrap().len() <= MAX_REPEAT as usize);
            assert!(sample_regex("a{12,}", &mut rng).unwrap().len() == 12);
        }
    }
}
