//! Hand-written recursive-descent parser for contract formulas.
//!
//! Tokens are scanned on demand because URL blocks (`/players/2020-a`) use a
//! different lexeme than the rest of the language.
//!
//! Boolean operators bind `&&` tighter than `||`, and `||` tighter than `=>`.
//! `&&` and `||` associate to the left, `=>` to the right.

use std::fmt;

use thiserror::Error;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    /// Byte offset into the input; never beyond its length.
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Keyword(Keyword),
    Ident(String),
    Int(i64),
    Sym(Sym),
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Keyword {
    For,
    Exists,
    In,
    Previous,
    This,
    Header(Header),
    Method(Method),
    True,
    False,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    Turnstile,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Slash,
    Dot,
    Cmp(Comparator),
    Bool(BoolOp),
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "for" => Keyword::For,
            "exists" => Keyword::Exists,
            "in" => Keyword::In,
            "previous" => Keyword::Previous,
            "this" => Keyword::This,
            "request_body" => Keyword::Header(Header::RequestBody),
            "response_body" => Keyword::Header(Header::ResponseBody),
            "response_code" => Keyword::Header(Header::ResponseCode),
            "GET" => Keyword::Method(Method::Get),
            "POST" => Keyword::Method(Method::Post),
            "PUT" => Keyword::Method(Method::Put),
            "DELETE" => Keyword::Method(Method::Delete),
            "T" => Keyword::True,
            "F" => Keyword::False,
            _ => return None,
        })
    }

    fn text(self) -> &'static str {
        match self {
            Keyword::For => "for",
            Keyword::Exists => "exists",
            Keyword::In => "in",
            Keyword::Previous => "previous",
            Keyword::This => "this",
            Keyword::Header(h) => h.keyword(),
            Keyword::Method(m) => m.as_str(),
            Keyword::True => "T",
            Keyword::False => "F",
        }
    }
}

impl Sym {
    fn text(self) -> &'static str {
        match self {
            Sym::Turnstile => ":-",
            Sym::LParen => "(",
            Sym::RParen => ")",
            Sym::LBrace => "{",
            Sym::RBrace => "}",
            Sym::Slash => "/",
            Sym::Dot => ".",
            Sym::Cmp(c) => c.symbol(),
            Sym::Bool(b) => b.symbol(),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Keyword(k) => write!(f, "'{}'", k.text()),
            Token::Ident(s) => write!(f, "identifier '{s}'"),
            Token::Int(i) => write!(f, "integer {i}"),
            Token::Sym(s) => write!(f, "'{}'", s.text()),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_continue(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'-'
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { src: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn error<T>(&self, at: usize, expected: &[&str], found: String) -> PResult<T> {
        Err(SyntaxError {
            position: at.min(self.src.len()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        })
    }

    /// Scans the next token starting at `self.pos` (after whitespace) without
    /// committing. Returns the token, its start and its end offset.
    fn scan(&self) -> PResult<(Token, usize, usize)> {
        let mut start = self.pos;
        while start < self.src.len() && self.src[start].is_ascii_whitespace() {
            start += 1;
        }
        let src = self.src;
        if start >= src.len() {
            return Ok((Token::Eof, start, start));
        }
        let c = src[start];
        let next = src.get(start + 1).copied();
        let two = |sym: Sym| Ok((Token::Sym(sym), start, start + 2));
        let one = |sym: Sym| Ok((Token::Sym(sym), start, start + 1));
        match (c, next) {
            (b':', Some(b'-')) => two(Sym::Turnstile),
            (b'=', Some(b'=')) => two(Sym::Cmp(Comparator::Eq)),
            (b'=', Some(b'>')) => two(Sym::Bool(BoolOp::Implies)),
            (b'!', Some(b'=')) => two(Sym::Cmp(Comparator::Ne)),
            (b'<', Some(b'=')) => two(Sym::Cmp(Comparator::Le)),
            (b'>', Some(b'=')) => two(Sym::Cmp(Comparator::Ge)),
            (b'&', Some(b'&')) => two(Sym::Bool(BoolOp::And)),
            (b'|', Some(b'|')) => two(Sym::Bool(BoolOp::Or)),
            (b'<', _) => one(Sym::Cmp(Comparator::Lt)),
            (b'>', _) => one(Sym::Cmp(Comparator::Gt)),
            (b'(', _) => one(Sym::LParen),
            (b')', _) => one(Sym::RParen),
            (b'{', _) => one(Sym::LBrace),
            (b'}', _) => one(Sym::RBrace),
            (b'/', _) => one(Sym::Slash),
            (b'.', _) => one(Sym::Dot),
            (b'-', Some(d)) if d.is_ascii_digit() => self.scan_int(start),
            (d, _) if d.is_ascii_digit() => self.scan_int(start),
            (s, _) if is_ident_start(s) => {
                let mut end = start + 1;
                while end < src.len() && is_ident_continue(src[end]) {
                    end += 1;
                }
                let word = std::str::from_utf8(&src[start..end]).unwrap_or_default();
                let token = match Keyword::from_word(word) {
                    Some(k) => Token::Keyword(k),
                    None => Token::Ident(word.to_string()),
                };
                Ok((token, start, end))
            }
            _ => {
                let ch = std::str::from_utf8(&src[start..]).ok().and_then(|s| s.chars().next()).unwrap_or('?');
                self.error(start, &["a token"], format!("unexpected character '{ch}'"))
            }
        }
    }

    fn scan_int(&self, start: usize) -> PResult<(Token, usize, usize)> {
        let mut end = start + 1;
        while end < self.src.len() && self.src[end].is_ascii_digit() {
            end += 1;
        }
        let text = std::str::from_utf8(&self.src[start..end]).unwrap_or_default();
        match text.parse::<i64>() {
            Ok(v) => Ok((Token::Int(v), start, end)),
            Err(_) => self.error(start, &["integer literal"], format!("out-of-range integer {text}")),
        }
    }

    fn peek(&self) -> PResult<Token> {
        self.scan().map(|(t, _, _)| t)
    }

    fn bump(&mut self) -> PResult<(Token, usize)> {
        let (token, start, end) = self.scan()?;
        self.pos = end;
        Ok((token, start))
    }

    fn expect_sym(&mut self, sym: Sym) -> PResult<()> {
        let (token, start, end) = self.scan()?;
        if token == Token::Sym(sym) {
            self.pos = end;
            Ok(())
        } else {
            self.error(start, &[&format!("'{}'", sym.text())], token.to_string())
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        let (token, start) = self.bump()?;
        match token {
            Token::Ident(s) => Ok(s),
            other => self.error(start, &["identifier"], other.to_string()),
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let formula = match self.peek()? {
            Token::Keyword(Keyword::For) | Token::Keyword(Keyword::Exists) => {
                Formula::Quantified(self.quantified()?)
            }
            _ => Formula::Boolean(self.boolean_expression()?),
        };
        let (token, start, _) = self.scan()?;
        if token != Token::Eof {
            let expected: &[&str] = match formula {
                Formula::Boolean(_) => &["'&&'", "'||'", "'=>'", "end of input"],
                Formula::Quantified(_) => &["'&&'", "'||'", "'=>'", "end of input"],
            };
            return self.error(start, expected, token.to_string());
        }
        Ok(formula)
    }

    fn quantified(&mut self) -> PResult<QuantifiedFormula> {
        let quantifier = match self.bump()?.0 {
            Token::Keyword(Keyword::Exists) => Quantifier::Exists,
            _ => Quantifier::ForAll,
        };
        let variable = self.expect_ident()?;
        let (token, start) = self.bump()?;
        if token != Token::Keyword(Keyword::In) {
            return self.error(start, &["'in'"], token.to_string());
        }
        let collection = match self.peek()? {
            Token::Keyword(Keyword::Previous) => Call::Previous(self.previous()?),
            _ => Call::Op(self.operation()?),
        };
        self.expect_sym(Sym::Turnstile)?;
        let body = self.boolean_expression()?;
        Ok(QuantifiedFormula { quantifier, variable, collection, body })
    }

    fn boolean_expression(&mut self) -> PResult<BooleanExpression> {
        self.implication()
    }

    fn implication(&mut self) -> PResult<BooleanExpression> {
        let lhs = self.disjunction()?;
        if self.peek()? == Token::Sym(Sym::Bool(BoolOp::Implies)) {
            self.bump()?;
            let rhs = self.implication()?;
            return Ok(BooleanExpression::binary(BoolOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<BooleanExpression> {
        let mut lhs = self.conjunction()?;
        while self.peek()? == Token::Sym(Sym::Bool(BoolOp::Or)) {
            self.bump()?;
            let rhs = self.conjunction()?;
            lhs = BooleanExpression::binary(BoolOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<BooleanExpression> {
        let mut lhs = self.clause()?;
        while self.peek()? == Token::Sym(Sym::Bool(BoolOp::And)) {
            self.bump()?;
            let rhs = self.clause()?;
            lhs = BooleanExpression::binary(BoolOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn clause(&mut self) -> PResult<BooleanExpression> {
        let clause = match self.peek()? {
            Token::Keyword(Keyword::True) => {
                self.bump()?;
                Clause::True
            }
            Token::Keyword(Keyword::False) => {
                self.bump()?;
                Clause::False
            }
            _ => Clause::Comparison(self.comparison()?),
        };
        Ok(BooleanExpression::Clause(clause))
    }

    fn comparison(&mut self) -> PResult<Comparison> {
        let lhs = self.term()?;
        let (token, start) = self.bump()?;
        let cmp = match token {
            Token::Sym(Sym::Cmp(c)) => c,
            other => {
                return self.error(start, &["'=='", "'!='", "'<='", "'>='", "'<'", "'>'"], other.to_string())
            }
        };
        let rhs = self.term()?;
        Ok(Comparison { lhs, cmp, rhs })
    }

    fn term(&mut self) -> PResult<Term> {
        let (token, start, _) = self.scan()?;
        match token {
            Token::Keyword(Keyword::Previous) => Ok(Term::Previous(self.previous()?)),
            Token::Keyword(Keyword::Header(_)) => Ok(Term::Op(self.operation()?)),
            Token::Int(i) => {
                self.bump()?;
                Ok(Term::Int(i))
            }
            Token::Ident(_) => Ok(Term::Param(self.dotted_name()?)),
            other => self.error(
                start,
                &["'T'", "'F'", "'previous'", "'request_body'", "'response_body'", "'response_code'", "identifier", "integer"],
                other.to_string(),
            ),
        }
    }

    fn dotted_name(&mut self) -> PResult<Vec<String>> {
        let mut path = vec![self.expect_ident()?];
        while self.peek()? == Token::Sym(Sym::Dot) {
            self.bump()?;
            path.push(self.expect_ident()?);
        }
        Ok(path)
    }

    fn previous(&mut self) -> PResult<OperationRef> {
        self.bump()?; // 'previous'
        self.expect_sym(Sym::LParen)?;
        let op = self.operation()?;
        self.expect_sym(Sym::RParen)?;
        Ok(op)
    }

    fn operation(&mut self) -> PResult<OperationRef> {
        let (token, start) = self.bump()?;
        let header = match token {
            Token::Keyword(Keyword::Header(h)) => h,
            other => {
                return self.error(start, &["'request_body'", "'response_body'", "'response_code'"], other.to_string())
            }
        };
        self.expect_sym(Sym::LParen)?;
        let (token, start) = self.bump()?;
        let target = match token {
            Token::Keyword(Keyword::This) => Target::This,
            Token::Keyword(Keyword::Method(method)) => {
                let segments = self.url()?;
                Target::Request(HttpRequest { method, segments })
            }
            other => return self.error(start, &["'this'", "'GET'", "'POST'", "'PUT'", "'DELETE'"], other.to_string()),
        };
        self.expect_sym(Sym::RParen)?;
        let function = if self.peek()? == Token::Sym(Sym::Dot) {
            self.bump()?;
            Some(self.expect_ident()?)
        } else {
            None
        };
        Ok(OperationRef { header, target, function })
    }

    /// `url ::= segment+`, `segment ::= / block (. block)*`. Raw characters,
    /// no whitespace inside.
    fn url(&mut self) -> PResult<Vec<Segment>> {
        self.skip_ws();
        let mut segments = Vec::new();
        loop {
            if self.src.get(self.pos) != Some(&b'/') {
                if segments.is_empty() {
                    let (token, start, _) = self.scan()?;
                    return self.error(start, &["'/'"], token.to_string());
                }
                return Ok(segments);
            }
            self.pos += 1;
            let mut segment = vec![self.block()?];
            while self.src.get(self.pos) == Some(&b'.') {
                self.pos += 1;
                segment.push(self.block()?);
            }
            segments.push(segment);
        }
    }

    fn block(&mut self) -> PResult<Block> {
        if self.src.get(self.pos) == Some(&b'{') {
            self.pos += 1;
            let param = match self.peek()? {
                Token::Keyword(Keyword::Previous) => BlockParameter::NestedPrevious(self.previous()?),
                Token::Keyword(Keyword::Header(_)) => BlockParameter::NestedOp(self.operation()?),
                _ => BlockParameter::Name(self.dotted_name()?),
            };
            self.expect_sym(Sym::RBrace)?;
            return Ok(Block::Placeholder(param));
        }
        let start = self.pos;
        while self.pos < self.src.len() && is_ident_continue(self.src[self.pos]) {
            self.pos += 1;
        }
        if self.pos == start {
            let (token, at, _) = self.scan()?;
            return self.error(at, &["URL block"], token.to_string());
        }
        Ok(Block::Literal(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()))
    }
}

/// Parses a single contract formula.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut parser = Parser::new(text);
    if parser.peek()? == Token::Eof {
        return parser.error(0, &["formula"], Token::Eof.to_string());
    }
    parser.formula()
}

// Printing. The output is whitespace-normalized and reparses to an equal tree.

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Quantified(q) => q.fmt(f),
            Formula::Boolean(b) => b.fmt(f),
        }
    }
}

impl fmt::Display for QuantifiedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.quantifier {
            Quantifier::ForAll => "for",
            Quantifier::Exists => "exists",
        };
        write!(f, "{q} {} in {} :- {}", self.variable, self.collection, self.body)
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Call::Op(op) => op.fmt(f),
            Call::Previous(op) => write!(f, "previous({op})"),
        }
    }
}

impl fmt::Display for BooleanExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanExpression::Binary { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            BooleanExpression::Clause(Clause::True) => f.write_str("T"),
            BooleanExpression::Clause(Clause::False) => f.write_str("F"),
            BooleanExpression::Clause(Clause::Comparison(c)) => c.fmt(f),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.cmp.symbol(), self.rhs)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Op(op) => op.fmt(f),
            Term::Previous(op) => write!(f, "previous({op})"),
            Term::Param(path) => f.write_str(&path.join(".")),
            Term::Int(i) => write!(f, "{i}"),
        }
    }
}

impl fmt::Display for OperationRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.header.keyword())?;
        match &self.target {
            Target::This => f.write_str("this")?,
            Target::Request(req) => req.fmt(f)?,
        }
        f.write_str(")")?;
        if let Some(name) = &self.function {
            write!(f, ".{name}")?;
        }
        Ok(())
    }
}

impl HttpRequest {
    /// The URL path, e.g. `/players/{playerNIF}`.
    pub fn path(&self) -> String {
        let mut out = String::new();
        for segment in &self.segments {
            out.push('/');
            for (i, block) in segment.iter().enumerate() {
                if i > 0 {
                    out.push('.');
                }
                match block {
                    Block::Literal(text) => out.push_str(text),
                    Block::Placeholder(p) => {
                        out.push('{');
                        match p {
                            BlockParameter::Name(path) => out.push_str(&path.join(".")),
                            BlockParameter::NestedOp(op) => out.push_str(&op.to_string()),
                            BlockParameter::NestedPrevious(op) => out.push_str(&format!("previous({op})")),
                        }
                        out.push('}');
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for HttpRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.method, self.path())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(segments: Vec<Segment>) -> Target {
        Target::Request(HttpRequest { method: Method::Get, segments })
    }

    fn lit(s: &str) -> Block {
        Block::Literal(s.into())
    }

    fn name(path: &[&str]) -> Block {
        Block::Placeholder(BlockParameter::Name(path.iter().map(|s| s.to_string()).collect()))
    }

    #[test]
    fn parses_status_code_comparison() {
        let f = parse_formula("response_code(GET /players/{playerNIF}) == 404").unwrap();
        let expected = Formula::Boolean(BooleanExpression::Clause(Clause::Comparison(Comparison {
            lhs: Term::Op(OperationRef {
                header: Header::ResponseCode,
                target: get(vec![vec![lit("players")], vec![name(&["playerNIF"])]]),
                function: None,
            }),
            cmp: Comparator::Eq,
            rhs: Term::Int(404),
        })));
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_atomic_clauses() {
        assert_eq!(parse_formula("T").unwrap(), Formula::Boolean(BooleanExpression::Clause(Clause::True)));
        assert_eq!(parse_formula("  F ").unwrap(), Formula::Boolean(BooleanExpression::Clause(Clause::False)));
    }

    #[test]
    fn parses_capacity_invariant() {
        let text = "for t in response_body(GET /tournaments) :- \
                    response_body(GET /tournaments/{t.tournamentId}/enrollments).length \
                    <= response_body(GET /tournaments/{t.tournamentId}/capacity)";
        let Formula::Quantified(q) = parse_formula(text).unwrap() else { panic!("expected quantifier") };
        assert_eq!(q.quantifier, Quantifier::ForAll);
        assert_eq!(q.variable, "t");
        assert_eq!(q.collection.to_string(), "response_body(GET /tournaments)");
        let BooleanExpression::Clause(Clause::Comparison(c)) = &q.body else { panic!() };
        let Term::Op(lhs) = &c.lhs else { panic!() };
        assert_eq!(lhs.function.as_deref(), Some("length"));
        assert_eq!(c.cmp, Comparator::Le);
        let Target::Request(req) = &lhs.target else { panic!() };
        assert_eq!(req.segments[1], vec![name(&["t", "tournamentId"])]);
    }

    #[test]
    fn parses_previous_against_this() {
        let f = parse_formula("response_body(this) == previous(response_body(GET /players/{playerNIF}))").unwrap();
        let Formula::Boolean(BooleanExpression::Clause(Clause::Comparison(c))) = f else { panic!() };
        assert_eq!(c.lhs, Term::Op(OperationRef { header: Header::ResponseBody, target: Target::This, function: None }));
        let Term::Previous(op) = c.rhs else { panic!("expected previous") };
        assert_eq!(op.header, Header::ResponseBody);
    }

    #[test]
    fn boolean_precedence_and_associativity() {
        let f = parse_formula("T || F && F => F => T").unwrap();
        // (T || (F && F)) => (F => T)
        let Formula::Boolean(BooleanExpression::Binary { op: BoolOp::Implies, lhs, rhs }) = f else { panic!() };
        assert!(matches!(*lhs, BooleanExpression::Binary { op: BoolOp::Or, .. }));
        assert!(matches!(*rhs, BooleanExpression::Binary { op: BoolOp::Implies, .. }));
        let f = parse_formula("T && F && T").unwrap();
        let Formula::Boolean(BooleanExpression::Binary { lhs, .. }) = f else { panic!() };
        assert!(matches!(*lhs, BooleanExpression::Binary { op: BoolOp::And, .. }));
    }

    #[test]
    fn url_blocks_accept_digits_hyphens_and_dots() {
        let f = parse_formula("response_code(GET /a/2020-x.json/{b}.{c}) != -1").unwrap();
        let Formula::Boolean(BooleanExpression::Clause(Clause::Comparison(c))) = f else { panic!() };
        let Term::Op(op) = &c.lhs else { panic!() };
        let Target::Request(req) = &op.target else { panic!() };
        assert_eq!(req.segments[1], vec![lit("2020-x"), lit("json")]);
        assert_eq!(req.segments[2], vec![name(&["b"]), name(&["c"])]);
        assert_eq!(c.rhs, Term::Int(-1));
    }

    #[test]
    fn nested_quantifier_is_a_syntax_error() {
        let text = "for t in response_body(GET /tournaments) :- \
                    for p in response_body(GET /tournaments/{t.tournamentId}/players) :- \
                    response_code(/tournaments/{tournamentId}/enrollments/{p.playerNIF} == 200";
        let err = parse_formula(text).unwrap_err();
        assert_eq!(err.found, "'for'");
    }

    #[test]
    fn multi_variable_quantifier_is_a_syntax_error() {
        let text = "for t in response_body(GET /tournaments), \
                    p in response_body(GET /tournaments/{t.tournamentId}/players) :- \
                    response_code(/tournaments/{tournamentId}/enrollments/{p.playerNIF} == 200";
        let err = parse_formula(text).unwrap_err();
        assert!(err.found.contains("','"), "{err}");
    }

    #[test]
    fn error_positions_point_into_the_input() {
        for text in ["", "response_code(", "T &&", "response_code(GET ) == 1", "x ==", "(T)"] {
            let err = parse_formula(text).unwrap_err();
            assert!(err.position <= text.len(), "{text:?}: {err}");
        }
    }

    #[test]
    fn missing_method_is_rejected() {
        assert!(parse_formula("response_code(/players) == 200").is_err());
        assert!(parse_formula("response_code(GET players) == 200").is_err());
        assert!(parse_formula("response_code(GET /) == 200").is_err());
    }

    #[test]
    fn prints_normalized_text() {
        let f = parse_formula("response_body(this)==previous(response_body(GET   /players/{playerNIF}))").unwrap();
        assert_eq!(f.to_string(), "response_body(this) == previous(response_body(GET /players/{playerNIF}))");
        let implies = Formula::Boolean(BooleanExpression::binary(
            BoolOp::Implies,
            BooleanExpression::Clause(Clause::True),
            BooleanExpression::Clause(Clause::False),
        ));
        assert_eq!(implies.to_string(), "T => F");
        assert_eq!(parse_formula("T").unwrap().to_string(), "T");
    }

    #[test]
    fn nested_block_parameters_round_trip() {
        let text = "response_code(GET /t/{response_body(GET /first).length}/{previous(response_body(GET /x))}) == 200";
        let f = parse_formula(text).unwrap();
        assert_eq!(f.to_string(), text);
    }
}
