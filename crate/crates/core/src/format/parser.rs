use std::collections::BTreeSet;

use num_bigint::BigUint;

use super::FormatError;
use crate::error::Error;
use crate::model::{
    is_identifier, Architecture, ArchitectureBuilder, ChannelId, ComponentId, ComponentSpec,
    ExprItem, ExprSeq, KeyId, SecretId,
};

/// Deepest block nesting accepted in expressions.
pub const MAX_NESTING: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(char),
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, FormatError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let ch = chars.next().expect("peeked");
            if ch == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            ch
        };
        match c {
            '\n' => {
                bump(&mut chars);
                if depth == 0 {
                    out.push(Token {
                        tok: Tok::Newline,
                        line: tline,
                        column: tcol,
                    });
                }
            }
            ' ' | '\t' | '\r' => {
                bump(&mut chars);
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            '(' | '[' | '{' | ')' | ']' | '}' | ',' | ':' | ';' => {
                bump(&mut chars);
                match c {
                    '(' | '[' | '{' => depth += 1,
                    ')' | ']' | '}' => depth = depth.saturating_sub(1),
                    _ => {}
                }
                out.push(Token {
                    tok: Tok::Punct(c),
                    line: tline,
                    column: tcol,
                });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while chars
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    s.push(bump(&mut chars));
                }
                if !s.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(FormatError::parse(
                        tline,
                        tcol,
                        "a number or identifier",
                        format!("`{s}`"),
                    ));
                }
                out.push(Token {
                    tok: Tok::Number(s),
                    line: tline,
                    column: tcol,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while chars
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    s.push(bump(&mut chars));
                }
                out.push(Token {
                    tok: Tok::Ident(s),
                    line: tline,
                    column: tcol,
                });
            }
            other => {
                return Err(FormatError::parse(
                    tline,
                    tcol,
                    "a token",
                    format!("{other:?}"),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// Names declared so far; references must resolve against these.
#[derive(Default)]
struct Scope {
    keys: BTreeSet<KeyId>,
    secrets: BTreeSet<SecretId>,
    channels: BTreeSet<ChannelId>,
    components: BTreeSet<ComponentId>,
    pairs: BTreeSet<(KeyId, KeyId)>,
}

struct Parser<'t, 's> {
    tokens: &'t [Token],
    pos: usize,
    /// `None` parses expressions without resolving names.
    scope: Option<&'s Scope>,
}

type PResult<T> = Result<T, FormatError>;

impl Parser<'_, '_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &str) -> FormatError {
        let t = self.peek();
        FormatError::parse(t.line, t.column, expected, t.tok.describe())
    }

    fn punct(&mut self, c: char) -> PResult<()> {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(&format!("`{c}`")))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, usize, usize)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                self.next();
                Ok((s, t.line, t.column))
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn idlist(&mut self, what: &str) -> PResult<Vec<(String, usize, usize)>> {
        let mut names = vec![self.ident(what)?];
        while self.eat_punct(',') {
            names.push(self.ident(what)?);
        }
        Ok(names)
    }

    fn end_of_statement(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error_here("end of line")),
        }
    }

    fn resolve<T>(
        &self,
        name: &str,
        line: usize,
        column: usize,
        pick: impl FnOnce(&Scope) -> &BTreeSet<T>,
        unknown: impl FnOnce(T) -> Error,
    ) -> PResult<T>
    where
        T: Ord + From<String>,
    {
        let id = T::from(name.to_string());
        match self.scope {
            Some(scope) if !pick(scope).contains(&id) => {
                Err(FormatError::invalid(line, column, unknown(id)))
            }
            _ => Ok(id),
        }
    }

    fn expr_list(&mut self, depth: usize) -> PResult<Vec<ExprItem>> {
        let mut items = vec![self.expr(depth)?];
        while self.eat_punct(',') {
            items.push(self.expr(depth)?);
        }
        Ok(items)
    }

    /// `[` exprlist? `]`
    fn bracketed(&mut self, depth: usize) -> PResult<ExprSeq> {
        self.punct('[')?;
        if self.eat_punct(']') {
            return Ok(ExprSeq::new());
        }
        let items = self.expr_list(depth)?;
        self.punct(']')?;
        Ok(ExprSeq::from(items))
    }

    fn expr(&mut self, depth: usize) -> PResult<ExprItem> {
        if depth > MAX_NESTING {
            return Err(self.error_here(&format!("at most {MAX_NESTING} nested blocks")));
        }
        let (ctor, line, column) =
            self.ident("an expression (key, secret, data, id, enc or sign)")?;
        self.punct('(')?;
        let item = match ctor.as_str() {
            "key" => {
                let (n, l, c) = self.ident("a key name")?;
                ExprItem::Key(self.resolve(&n, l, c, |s| &s.keys, Error::UnknownKey)?)
            }
            "secret" => {
                let (n, l, c) = self.ident("a secret name")?;
                ExprItem::Secret(self.resolve(&n, l, c, |s| &s.secrets, Error::UnknownSecret)?)
            }
            "id" => {
                let (n, l, c) = self.ident("a component name")?;
                ExprItem::Id(self.resolve(&n, l, c, |s| &s.components, Error::UnknownComponent)?)
            }
            "data" => match self.next() {
                Token {
                    tok: Tok::Number(digits),
                    ..
                } => ExprItem::Data(digits.parse::<BigUint>().expect("lexer admits only digits")),
                t => {
                    return Err(FormatError::parse(
                        t.line,
                        t.column,
                        "a natural number",
                        t.tok.describe(),
                    ))
                }
            },
            "enc" | "sign" => {
                let (n, l, c) = self.ident("a key name")?;
                let key = self.resolve(&n, l, c, |s| &s.keys, Error::UnknownKey)?;
                self.punct(',')?;
                let payload = self.bracketed(depth + 1)?;
                if ctor == "enc" {
                    ExprItem::Enc { key, payload }
                } else {
                    ExprItem::Sign { key, payload }
                }
            }
            _ => {
                return Err(FormatError::parse(
                    line,
                    column,
                    "an expression (key, secret, data, id, enc or sign)",
                    format!("`{ctor}`"),
                ))
            }
        };
        self.punct(')')?;
        Ok(item)
    }
}

fn declare<T: Ord + From<String>>(
    set: &mut BTreeSet<T>,
    kind: &'static str,
    (name, line, column): (String, usize, usize),
) -> PResult<T> {
    if !is_identifier(&name) {
        return Err(FormatError::invalid(
            line,
            column,
            Error::InvalidIdentifier(name),
        ));
    }
    let id = T::from(name.clone());
    if set.contains(&id) {
        return Err(FormatError::invalid(
            line,
            column,
            Error::Duplicate { kind, name },
        ));
    }
    set.insert(T::from(name));
    Ok(id)
}

/// Parses and validates an architecture document.
pub fn parse_architecture(text: &str) -> Result<Architecture, FormatError> {
    let tokens = lex(text)?;
    let mut scope = Scope::default();
    let mut builder = Architecture::builder();
    let mut pos = 0;

    loop {
        // each statement is parsed against the scope so far, then declares
        let mut parser = Parser {
            tokens: &tokens,
            pos,
            scope: Some(&scope),
        };
        while parser.peek().tok == Tok::Newline {
            parser.next();
        }
        if parser.peek().tok == Tok::Eof {
            break;
        }
        let (kw, line, column) =
            parser.ident("a statement (keys, pair, secrets, channels, component or expr)")?;
        let decl = match kw.as_str() {
            "keys" => Decl::Keys(parser.idlist("a key name")?),
            "secrets" => Decl::Secrets(parser.idlist("a secret name")?),
            "channels" => Decl::Channels(parser.idlist("a channel name")?),
            "pair" => {
                parser.punct('(')?;
                let (a, al, ac) = parser.ident("a key name")?;
                let enc: KeyId = parser.resolve(&a, al, ac, |s| &s.keys, Error::UnknownKey)?;
                parser.punct(',')?;
                let (b, bl, bc) = parser.ident("a key name")?;
                let dec: KeyId = parser.resolve(&b, bl, bc, |s| &s.keys, Error::UnknownKey)?;
                parser.punct(')')?;
                Decl::Pair(enc, dec, line, column)
            }
            "component" => {
                let name = parser.ident("a component name")?;
                Decl::Component(name.clone(), component_body(&mut parser, &name.0)?)
            }
            "expr" => {
                let (n, l, c) = parser.ident("a channel name")?;
                let ch: ChannelId =
                    parser.resolve(&n, l, c, |s| &s.channels, Error::UnknownChannel)?;
                parser.punct(':')?;
                Decl::Facts(ch, parser.expr_list(0)?)
            }
            _ => {
                return Err(FormatError::parse(
                    line,
                    column,
                    "a statement (keys, pair, secrets, channels, component or expr)",
                    format!("`{kw}`"),
                ))
            }
        };
        parser.end_of_statement()?;
        pos = parser.pos;

        builder = apply(builder, &mut scope, decl)?;
    }
    builder.build().map_err(FormatError::Validation)
}

enum Decl {
    Keys(Vec<(String, usize, usize)>),
    Secrets(Vec<(String, usize, usize)>),
    Channels(Vec<(String, usize, usize)>),
    Pair(KeyId, KeyId, usize, usize),
    Component((String, usize, usize), ComponentSpec),
    Facts(ChannelId, Vec<ExprItem>),
}

fn apply(
    mut builder: ArchitectureBuilder,
    scope: &mut Scope,
    decl: Decl,
) -> PResult<ArchitectureBuilder> {
    match decl {
        Decl::Keys(names) => {
            for n in names {
                let k: KeyId = declare(&mut scope.keys, "key", n)?;
                builder = builder.key(k);
            }
        }
        Decl::Secrets(names) => {
            for n in names {
                let s: SecretId = declare(&mut scope.secrets, "secret", n)?;
                builder = builder.secrets([s]);
            }
        }
        Decl::Channels(names) => {
            for n in names {
                let ch: ChannelId = declare(&mut scope.channels, "channel", n)?;
                builder = builder.channels([ch]);
            }
        }
        Decl::Pair(enc, dec, line, column) => {
            if !scope.pairs.insert((enc.clone(), dec.clone())) {
                return Err(FormatError::invalid(
                    line,
                    column,
                    Error::Duplicate {
                        kind: "pair",
                        name: format!("({enc}, {dec})"),
                    },
                ));
            }
            builder = builder.pair(enc, dec);
        }
        Decl::Component(name, spec) => {
            declare::<ComponentId>(&mut scope.components, "component", name)?;
            builder = builder.component(spec);
        }
        Decl::Facts(ch, items) => {
            for item in items {
                builder = builder.fact(ch.clone(), item);
            }
        }
    }
    Ok(builder)
}

fn component_body(p: &mut Parser<'_, '_>, name: &str) -> PResult<ComponentSpec> {
    let mut spec = ComponentSpec::new(name);
    let mut seen = BTreeSet::new();
    p.punct('{')?;
    while !p.eat_punct('}') {
        let (field, line, column) =
            p.ident("a component field (sub, ins, loc, out, keys or secrets) or `}`")?;
        if !["sub", "ins", "loc", "out", "keys", "secrets"].contains(&field.as_str()) {
            return Err(FormatError::parse(
                line,
                column,
                "a component field (sub, ins, loc, out, keys or secrets)",
                format!("`{field}`"),
            ));
        }
        if !seen.insert(field.clone()) {
            return Err(FormatError::invalid(
                line,
                column,
                Error::Duplicate {
                    kind: "component field",
                    name: format!("{name}.{field}"),
                },
            ));
        }
        let names = p.idlist("a name")?;
        p.punct(';')?;
        for (n, l, c) in names {
            let fresh = match field.as_str() {
                "sub" => {
                    // a self reference resolves so validation reports the cycle
                    let id: ComponentId = if n == name {
                        ComponentId::new(&n)
                    } else {
                        p.resolve(&n, l, c, |s| &s.components, Error::UnknownComponent)?
                    };
                    spec.subcomponents.insert(id)
                }
                "ins" | "loc" | "out" => {
                    let ch: ChannelId =
                        p.resolve(&n, l, c, |s| &s.channels, Error::UnknownChannel)?;
                    let set = match field.as_str() {
                        "ins" => &mut spec.ins,
                        "loc" => &mut spec.loc,
                        _ => &mut spec.out,
                    };
                    set.insert(ch)
                }
                "keys" => spec
                    .keys
                    .insert(p.resolve(&n, l, c, |s| &s.keys, Error::UnknownKey)?),
                _ => spec.secrets.insert(p.resolve(
                    &n,
                    l,
                    c,
                    |s| &s.secrets,
                    Error::UnknownSecret,
                )?),
            };
            if !fresh {
                return Err(FormatError::invalid(
                    l,
                    c,
                    Error::Duplicate {
                        kind: "entry",
                        name: format!("{name}.{field} {n}"),
                    },
                ));
            }
        }
    }
    Ok(spec)
}

/// Parses a single expression item without resolving names.
pub fn parse_expr(text: &str) -> Result<ExprItem, FormatError> {
    let tokens = expr_tokens(text)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        scope: None,
    };
    let item = p.expr(0)?;
    expect_eof(&mut p)?;
    Ok(item)
}

/// Parses `[a, b]`, `a, b` or `[]` without resolving names.
pub fn parse_expr_list(text: &str) -> Result<ExprSeq, FormatError> {
    let tokens = expr_tokens(text)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        scope: None,
    };
    let seq = if p.peek().tok == Tok::Punct('[') {
        p.bracketed(0)?
    } else {
        ExprSeq::from(p.expr_list(0)?)
    };
    expect_eof(&mut p)?;
    Ok(seq)
}

fn expr_tokens(text: &str) -> PResult<Vec<Token>> {
    let mut tokens = lex(text)?;
    tokens.retain(|t| t.tok != Tok::Newline);
    Ok(tokens)
}

fn expect_eof(p: &mut Parser<'_, '_>) -> PResult<()> {
    if p.peek().tok == Tok::Eof {
        Ok(())
    } else {
        Err(p.error_here("end of input"))
    }
}

/// Parses raw bytes; invalid UTF-8 is reported as a parse error at the
/// offending byte.
pub fn parse_bytes(bytes: &[u8]) -> Result<Architecture, FormatError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_architecture(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
            let line = valid.matches('\n').count() + 1;
            let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(FormatError::parse(
                line,
                column,
                "UTF-8 text",
                "an invalid byte sequence".to_string(),
            ))
        }
    }
}
