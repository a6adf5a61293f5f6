//! The lens-file format: a structural model, its parser and its printer.
//!
//! Parsing validates as it goes (totality, membership, names declared before
//! use) and builds the runtime objects alongside the model.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use bxlens::effects::FiniteMonoid;
use bxlens::equivalence::{BaseMap, Direction, EquivKind, IsoWitness, SpanEquivWitness};
use bxlens::lens::{compose_pure, LensTable, PureLens};
use bxlens::mlens::{compose_m, lens2mlens, MLens};
use bxlens::spans::{compose_span, Span};
use bxlens::symmetric::{compose_s, compose_sm, SLens, SMLens};
use bxlens::{Carrier, Effect, EffectValue, Monoid, Value};

use crate::lexer::{tokenize, Tok, Token};
use crate::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogDecl {
    List(String),
    Multiset(String),
    Xor,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectDecl {
    Identity,
    Maybe,
    List,
    State(String),
    Writer(LogDecl),
}

impl fmt::Display for EffectDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectDecl::Identity => f.write_str("identity"),
            EffectDecl::Maybe => f.write_str("maybe"),
            EffectDecl::List => f.write_str("list"),
            EffectDecl::State(c) => write!(f, "state {c}"),
            EffectDecl::Writer(LogDecl::List(c)) => write!(f, "writer list {c}"),
            EffectDecl::Writer(LogDecl::Multiset(c)) => write!(f, "writer multiset {c}"),
            EffectDecl::Writer(LogDecl::Xor) => f.write_str("writer xor"),
            EffectDecl::Writer(LogDecl::Or) => f.write_str("writer or"),
        }
    }
}

/// An effect literal as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectLit {
    Pure(Value),
    Just(Value),
    Nothing,
    List(Vec<Value>),
    Writer {
        log: Value,
        value: Value,
    },
    /// `(start state, result, final state)` rows.
    State(Vec<(Value, Value, Value)>),
}

impl fmt::Display for EffectLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectLit::Pure(v) => write!(f, "{v}"),
            EffectLit::Just(v) => write!(f, "just {v}"),
            EffectLit::Nothing => f.write_str("nothing"),
            EffectLit::List(vs) => write!(f, "{}", Value::List(vs.clone())),
            EffectLit::Writer { log, value } => write!(f, "({log}; {value})"),
            EffectLit::State(rows) => {
                let cells: Vec<String> = rows
                    .iter()
                    .map(|(s, v, t)| format!("{s} -> ({v}, {t})"))
                    .collect();
                write!(f, "{{{}}}", cells.join("; "))
            }
        }
    }
}

/// The literal for a computation of `effect`.
pub fn effect_lit(effect: &Effect, m: &EffectValue) -> EffectLit {
    match m {
        EffectValue::Identity(v) => EffectLit::Pure(v.clone()),
        EffectValue::Maybe(Some(v)) => EffectLit::Just(v.clone()),
        EffectValue::Maybe(None) => EffectLit::Nothing,
        EffectValue::List(vs) => EffectLit::List(vs.clone()),
        EffectValue::Writer { log, value } => EffectLit::Writer {
            log: log.clone(),
            value: value.clone(),
        },
        EffectValue::State(rows) => {
            let states = effect
                .state_carrier()
                .map(|c| c.elements().to_vec())
                .unwrap_or_default();
            EffectLit::State(
                rows.iter()
                    .enumerate()
                    .map(|(i, (v, j))| (states[i].clone(), v.clone(), states[*j].clone()))
                    .collect(),
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureDef {
    pub name: String,
    pub source: String,
    pub view: String,
    pub get: Vec<(Value, Value)>,
    pub put: Vec<(Value, Value, Value)>,
    pub create: Vec<(Value, Value)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MLensDef {
    pub name: String,
    pub source: String,
    pub view: String,
    pub get: Vec<(Value, Value)>,
    pub put: Vec<(Value, Value, EffectLit)>,
    pub create: Vec<(Value, EffectLit)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymDef<R> {
    pub name: String,
    pub left: String,
    pub right: String,
    pub complement: String,
    pub put_r: Vec<(Value, Value, R)>,
    pub put_l: Vec<(Value, Value, R)>,
    pub missing: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDef {
    pub name: String,
    pub source: String,
    pub target: String,
    pub images: Vec<(Value, Value)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Carrier {
        name: String,
        elements: Vec<Value>,
    },
    Effect(EffectDecl),
    Pure(PureDef),
    MLens(MLensDef),
    SLens(SymDef<Value>),
    SMLens(SymDef<EffectLit>),
    Span {
        name: String,
        left: String,
        right: String,
    },
    Map(MapDef),
    Iso {
        name: String,
        forward: String,
        backward: String,
    },
    Witness {
        name: String,
        direction: Direction,
        lens: String,
    },
    Compose {
        name: String,
        left: String,
        right: String,
    },
    Check {
        name: String,
    },
    Equiv {
        kind: EquivKind,
        a: String,
        b: String,
        witness: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LensFile {
    pub decls: Vec<Decl>,
}

/// A named runtime object.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum Object {
    Pure(PureLens),
    MLens(MLens),
    SLens(SLens),
    SMLens(SMLens),
    Span(Span),
    Map(BaseMap),
    Iso(IsoWitness),
    Witness(SpanEquivWitness),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Pure(_) => "pure-lens",
            Object::MLens(_) => "mlens",
            Object::SLens(_) => "slens",
            Object::SMLens(_) => "smlens",
            Object::Span(_) => "span",
            Object::Map(_) => "map",
            Object::Iso(_) => "iso",
            Object::Witness(_) => "witness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Check {
        name: String,
    },
    Equiv {
        kind: EquivKind,
        a: String,
        b: String,
        witness: Option<String>,
    },
}

/// Runtime objects of a parsed file, by name.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub carriers: BTreeMap<String, Carrier>,
    pub objects: BTreeMap<String, Object>,
    pub directives: Vec<Directive>,
}

impl Env {
    pub fn object(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub file: LensFile,
    pub env: Env,
}

pub fn parse(text: &str) -> Result<Loaded, Diagnostic> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        env: Env::default(),
        effect: Effect::Identity,
    };
    let mut file = LensFile::default();
    while p.peek().tok != Tok::Eof {
        file.decls.push(p.decl()?);
    }
    Ok(Loaded { file, env: p.env })
}

fn at(t: &Token, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(t.line, t.col, message)
}

fn show_key(names: &[&str], key: &[Value]) -> String {
    if key.len() == 1 {
        format!("{} = {}", names[0], key[0])
    } else {
        let vs: Vec<String> = key.iter().map(|v| v.to_string()).collect();
        format!("({}) = ({})", names.join(", "), vs.join(", "))
    }
}

fn cartesian(carriers: &[&Carrier]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for c in carriers {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.elements().iter().map(move |x| {
                    let mut k = prefix.clone();
                    k.push(x.clone());
                    k
                })
            })
            .collect();
    }
    out
}

fn lit_value(effect: &Effect, lit: &EffectLit, results: &Carrier) -> Result<EffectValue, String> {
    let check = |v: &Value| {
        if results.contains(v) {
            Ok(())
        } else {
            Err(format!(
                "`{v}` is not an element of carrier `{}`",
                results.name()
            ))
        }
    };
    Ok(match (effect, lit) {
        (Effect::Identity, EffectLit::Pure(v)) => {
            check(v)?;
            EffectValue::Identity(v.clone())
        }
        (Effect::Maybe, EffectLit::Just(v)) => {
            check(v)?;
            EffectValue::Maybe(Some(v.clone()))
        }
        (Effect::Maybe, EffectLit::Nothing) => EffectValue::Maybe(None),
        (Effect::List, EffectLit::List(vs)) => {
            vs.iter().try_for_each(check)?;
            EffectValue::List(vs.clone())
        }
        (Effect::Writer(m), EffectLit::Writer { log, value }) => {
            m.check_log(log).map_err(|e| e.to_string())?;
            check(value)?;
            EffectValue::Writer {
                log: log.clone(),
                value: value.clone(),
            }
        }
        (Effect::State(states), EffectLit::State(rows)) => {
            for (s, _, _) in rows {
                if !states.contains(s) {
                    return Err(format!("`{s}` is not a state of `{}`", states.name()));
                }
            }
            let mut out = Vec::new();
            for s in states.elements() {
                let found: Vec<_> = rows.iter().filter(|(k, _, _)| k == s).collect();
                let [(_, v, t)] = found[..] else {
                    return Err(if found.is_empty() {
                        format!("state literal has no row for state `{s}`")
                    } else {
                        format!("state literal has two rows for state `{s}`")
                    });
                };
                check(v)?;
                let j = states
                    .index_of(t)
                    .ok_or_else(|| format!("`{t}` is not a state of `{}`", states.name()))?;
                out.push((v.clone(), j));
            }
            EffectValue::State(out)
        }
        (e, l) => return Err(format!("literal `{l}` is not a computation of effect {e}")),
    })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    env: Env,
    effect: Effect,
}

type Table<R> = Vec<(Vec<Value>, R)>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if &self.peek().tok == want {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Tok) -> Result<Token, Diagnostic> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(at(&t, format!("expected {want}, found {}", t.tok)))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token), Diagnostic> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => Err(at(&t, format!("expected {what}, found {other}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Token, Diagnostic> {
        let t = self.next();
        if t.tok == Tok::Ident(kw.to_string()) {
            Ok(t)
        } else {
            Err(at(&t, format!("expected `{kw}`, found {}", t.tok)))
        }
    }

    fn fresh_name(&mut self) -> Result<String, Diagnostic> {
        let (name, t) = self.ident("a name")?;
        if self.env.carriers.contains_key(&name) || self.env.objects.contains_key(&name) {
            return Err(at(&t, format!("`{name}` is already declared")));
        }
        Ok(name)
    }

    fn carrier_ref(&mut self) -> Result<(String, Carrier), Diagnostic> {
        let (name, t) = self.ident("a carrier name")?;
        match self.env.carriers.get(&name) {
            Some(c) => Ok((name, c.clone())),
            None => Err(at(&t, format!("unknown carrier `{name}`"))),
        }
    }

    fn object_ref(&mut self) -> Result<(String, Object, Token), Diagnostic> {
        let (name, t) = self.ident("an object name")?;
        match self.env.objects.get(&name) {
            Some(o) => Ok((name, o.clone(), t)),
            None => Err(at(&t, format!("unknown name `{name}`"))),
        }
    }

    fn value(&mut self) -> Result<Value, Diagnostic> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => Ok(Value::Int(*n)),
            Tok::Ident(s) => Ok(match s.as_str() {
                "T" => Value::Bool(true),
                "F" => Value::Bool(false),
                "none" => Value::none(),
                "some" => {
                    self.expect(Tok::LParen)?;
                    let v = self.value()?;
                    self.expect(Tok::RParen)?;
                    Value::some(v)
                }
                _ => Value::sym(s),
            }),
            Tok::LParen => {
                if self.eat(&Tok::RParen) {
                    return Ok(Value::Unit);
                }
                let mut items = vec![self.value()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.value()?);
                }
                self.expect(Tok::RParen)?;
                Ok(if items.len() == 1 {
                    items.pop().unwrap_or(Value::Unit)
                } else {
                    Value::Tuple(items)
                })
            }
            Tok::LBracket => {
                let mut items = Vec::new();
                while !self.eat(&Tok::RBracket) {
                    items.push(self.value()?);
                }
                Ok(Value::List(items))
            }
            other => Err(at(&t, format!("expected a value, found {other}"))),
        }
    }

    fn member(&mut self, c: &Carrier) -> Result<Value, Diagnostic> {
        let t = self.peek().clone();
        let v = self.value()?;
        if c.contains(&v) {
            Ok(v)
        } else {
            Err(at(
                &t,
                format!("`{v}` is not an element of carrier `{}`", c.name()),
            ))
        }
    }

    fn lit(&mut self, effect: &Effect) -> Result<EffectLit, Diagnostic> {
        Ok(match effect {
            Effect::Identity => EffectLit::Pure(self.value()?),
            Effect::Maybe => {
                let (kw, t) = self.ident("`just` or `nothing`")?;
                match kw.as_str() {
                    "just" => EffectLit::Just(self.value()?),
                    "nothing" => EffectLit::Nothing,
                    other => {
                        return Err(at(
                            &t,
                            format!("expected `just` or `nothing`, found `{other}`"),
                        ))
                    }
                }
            }
            Effect::List => {
                self.expect(Tok::LBracket)?;
                let mut items = Vec::new();
                while !self.eat(&Tok::RBracket) {
                    items.push(self.value()?);
                }
                EffectLit::List(items)
            }
            Effect::Writer(_) => {
                self.expect(Tok::LParen)?;
                let log = self.value()?;
                self.expect(Tok::Semi)?;
                let value = self.value()?;
                self.expect(Tok::RParen)?;
                EffectLit::Writer { log, value }
            }
            Effect::State(_) => {
                self.expect(Tok::LBrace)?;
                let mut rows = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    let s = self.value()?;
                    self.expect(Tok::Arrow)?;
                    let t = self.peek().clone();
                    let Value::Tuple(mut parts) = self.value()? else {
                        return Err(at(&t, "expected `(result, state)`"));
                    };
                    if parts.len() != 2 {
                        return Err(at(&t, "expected `(result, state)`"));
                    }
                    let fin = parts.pop().unwrap_or(Value::Unit);
                    let v = parts.pop().unwrap_or(Value::Unit);
                    rows.push((s, v, fin));
                    if !self.eat(&Tok::Semi) && self.peek().tok != Tok::RBrace {
                        let t = self.peek().clone();
                        return Err(at(&t, format!("expected `;` or `}}`, found {}", t.tok)));
                    }
                }
                EffectLit::State(rows)
            }
        })
    }

    fn computation(&mut self, results: &Carrier) -> Result<(EffectLit, EffectValue), Diagnostic> {
        let start = self.peek().clone();
        let effect = self.effect.clone();
        let lit = self.lit(&effect)?;
        let v = lit_value(&effect, &lit, results).map_err(|m| at(&start, m))?;
        Ok((lit, v))
    }

    /// `section { k.. -> r; ... }`, total over the key carriers.
    fn table<R>(
        &mut self,
        owner: &str,
        section: &str,
        keys: &[(&str, &Carrier)],
        mut result: impl FnMut(&mut Parser) -> Result<R, Diagnostic>,
    ) -> Result<Table<R>, Diagnostic> {
        self.keyword(section)?;
        self.expect(Tok::LBrace)?;
        let names: Vec<&str> = keys.iter().map(|(n, _)| *n).collect();
        let mut rows: Table<R> = Vec::new();
        while self.peek().tok != Tok::RBrace {
            let row = self.peek().clone();
            let mut key = Vec::new();
            for (_, c) in keys {
                key.push(self.member(c)?);
            }
            if rows.iter().any(|(k, _)| *k == key) {
                return Err(at(
                    &row,
                    format!(
                        "table `{section}` of `{owner}` has a second row for {}",
                        show_key(&names, &key)
                    ),
                ));
            }
            self.expect(Tok::Arrow)?;
            let r = result(self)?;
            rows.push((key, r));
            if !self.eat(&Tok::Semi) && self.peek().tok != Tok::RBrace {
                let t = self.peek().clone();
                return Err(at(&t, format!("expected `;` or `}}`, found {}", t.tok)));
            }
        }
        let close = self.expect(Tok::RBrace)?;
        let carriers: Vec<&Carrier> = keys.iter().map(|(_, c)| *c).collect();
        for key in cartesian(&carriers) {
            if !rows.iter().any(|(k, _)| *k == key) {
                return Err(at(
                    &close,
                    format!(
                        "table `{section}` of `{owner}` is missing the cell {}",
                        show_key(&names, &key)
                    ),
                ));
            }
        }
        Ok(rows)
    }

    fn decl(&mut self) -> Result<Decl, Diagnostic> {
        let (kw, t) = self.ident("a declaration")?;
        match kw.as_str() {
            "carrier" => self.carrier_decl(),
            "effect" => self.effect_decl(),
            "pure-lens" => self.pure_decl(),
            "mlens" => self.mlens_decl(),
            "slens" => self.slens_decl(),
            "smlens" => self.smlens_decl(),
            "span" => self.span_decl(),
            "map" => self.map_decl(),
            "iso" => self.iso_decl(),
            "witness" => self.witness_decl(),
            "compose" => self.compose_decl(),
            "check" => {
                let (name, _, _) = self.object_ref()?;
                self.env
                    .directives
                    .push(Directive::Check { name: name.clone() });
                Ok(Decl::Check { name })
            }
            "equiv" => self.equiv_decl(),
            other => Err(at(&t, format!("unknown declaration `{other}`"))),
        }
    }

    fn carrier_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.fresh_name()?;
        self.expect(Tok::LBrace)?;
        let mut elements = Vec::new();
        while self.peek().tok != Tok::RBrace {
            let t = self.peek().clone();
            let v = self.value()?;
            if elements.contains(&v) {
                return Err(at(&t, format!("carrier `{name}` lists `{v}` twice")));
            }
            elements.push(v);
        }
        self.expect(Tok::RBrace)?;
        let c = Carrier::new(name.clone(), elements.clone())
            .map_err(|e| at(self.peek(), e.to_string()))?;
        self.env.carriers.insert(name.clone(), c);
        Ok(Decl::Carrier { name, elements })
    }

    fn effect_decl(&mut self) -> Result<Decl, Diagnostic> {
        let (kw, t) = self.ident("an effect")?;
        let (decl, effect) = match kw.as_str() {
            "identity" => (EffectDecl::Identity, Effect::Identity),
            "maybe" => (EffectDecl::Maybe, Effect::Maybe),
            "list" => (EffectDecl::List, Effect::List),
            "state" => {
                let (n, c) = self.carrier_ref()?;
                (EffectDecl::State(n), Effect::State(c))
            }
            "writer" => {
                let (log, t) = self.ident("a log monoid")?;
                match log.as_str() {
                    "list" => {
                        let (n, c) = self.carrier_ref()?;
                        (
                            EffectDecl::Writer(LogDecl::List(n)),
                            Effect::Writer(Monoid::FreeList(c)),
                        )
                    }
                    "multiset" => {
                        let (n, c) = self.carrier_ref()?;
                        (
                            EffectDecl::Writer(LogDecl::Multiset(n)),
                            Effect::Writer(Monoid::Multiset(c)),
                        )
                    }
                    "xor" => (
                        EffectDecl::Writer(LogDecl::Xor),
                        Effect::Writer(Monoid::Finite(FiniteMonoid::xor())),
                    ),
                    "or" => (
                        EffectDecl::Writer(LogDecl::Or),
                        Effect::Writer(Monoid::Finite(FiniteMonoid::or())),
                    ),
                    other => return Err(at(&t, format!("unknown log monoid `{other}`"))),
                }
            }
            other => return Err(at(&t, format!("unknown effect `{other}`"))),
        };
        self.effect = effect;
        Ok(Decl::Effect(decl))
    }

    fn header(
        &mut self,
        arrow: Tok,
    ) -> Result<(String, String, Carrier, String, Carrier), Diagnostic> {
        let name = self.fresh_name()?;
        self.expect(Tok::Colon)?;
        let (an, a) = self.carrier_ref()?;
        self.expect(arrow)?;
        let (bn, b) = self.carrier_ref()?;
        Ok((name, an, a, bn, b))
    }

    fn pure_decl(&mut self) -> Result<Decl, Diagnostic> {
        let (name, an, a, bn, b) = self.header(Tok::Squiggle)?;
        self.expect(Tok::LBrace)?;
        let get = self.table(&name, "get", &[("a", &a)], |p| p.member(&b))?;
        let put = self.table(&name, "put", &[("a", &a), ("b", &b)], |p| p.member(&a))?;
        let create = self.table(&name, "create", &[("b", &b)], |p| p.member(&a))?;
        self.expect(Tok::RBrace)?;
        let find1 = |rows: &Table<Value>, k: &Value| {
            rows.iter()
                .find(|(key, _)| key[0] == *k)
                .map(|(_, r)| r.clone())
        };
        let idx = |c: &Carrier, v: Option<Value>| v.and_then(|v| c.index_of(&v)).unwrap_or(0);
        let table = LensTable {
            get: a
                .elements()
                .iter()
                .map(|x| idx(&b, find1(&get, x)))
                .collect(),
            put: a
                .elements()
                .iter()
                .map(|x| {
                    b.elements()
                        .iter()
                        .map(|y| {
                            idx(
                                &a,
                                put.iter()
                                    .find(|(k, _)| k[0] == *x && k[1] == *y)
                                    .map(|(_, r)| r.clone()),
                            )
                        })
                        .collect()
                })
                .collect(),
            create: b
                .elements()
                .iter()
                .map(|y| idx(&a, find1(&create, y)))
                .collect(),
        };
        let lens = PureLens::from_table(name.clone(), a, b, table)
            .map_err(|e| at(self.peek(), e.to_string()))?;
        self.env.objects.insert(name.clone(), Object::Pure(lens));
        Ok(Decl::Pure(PureDef {
            name,
            source: an,
            view: bn,
            get: get.into_iter().map(|(k, r)| (k[0].clone(), r)).collect(),
            put: put
                .into_iter()
                .map(|(k, r)| (k[0].clone(), k[1].clone(), r))
                .collect(),
            create: create.into_iter().map(|(k, r)| (k[0].clone(), r)).collect(),
        }))
    }

    fn mlens_decl(&mut self) -> Result<Decl, Diagnostic> {
        let (name, an, a, bn, b) = self.header(Tok::Squiggle)?;
        self.expect(Tok::LBrace)?;
        let get = self.table(&name, "get", &[("a", &a)], |p| p.member(&b))?;
        let put = self.table(&name, "put", &[("a", &a), ("b", &b)], |p| p.computation(&a))?;
        let create = self.table(&name, "create", &[("b", &b)], |p| p.computation(&a))?;
        self.expect(Tok::RBrace)?;
        let get_map: HashMap<&Value, &Value> = get.iter().map(|(k, r)| (&k[0], r)).collect();
        let put_map: HashMap<(&Value, &Value), &EffectValue> =
            put.iter().map(|(k, r)| ((&k[0], &k[1]), &r.1)).collect();
        let create_map: HashMap<&Value, &EffectValue> =
            create.iter().map(|(k, r)| (&k[0], &r.1)).collect();
        let lens = MLens::from_tables(
            name.clone(),
            self.effect.clone(),
            a.clone(),
            b.clone(),
            a.elements().iter().map(|x| get_map[x].clone()).collect(),
            a.elements()
                .iter()
                .map(|x| {
                    b.elements()
                        .iter()
                        .map(|y| put_map[&(x, y)].clone())
                        .collect()
                })
                .collect(),
            b.elements().iter().map(|y| create_map[y].clone()).collect(),
        )
        .map_err(|e| at(self.peek(), e.to_string()))?;
        self.env.objects.insert(name.clone(), Object::MLens(lens));
        Ok(Decl::MLens(MLensDef {
            name,
            source: an,
            view: bn,
            get: get.into_iter().map(|(k, r)| (k[0].clone(), r)).collect(),
            put: put
                .into_iter()
                .map(|(k, r)| (k[0].clone(), k[1].clone(), r.0))
                .collect(),
            create: create
                .into_iter()
                .map(|(k, r)| (k[0].clone(), r.0))
                .collect(),
        }))
    }

    #[allow(clippy::type_complexity)]
    fn sym_header(
        &mut self,
    ) -> Result<
        (
            String,
            (String, Carrier),
            (String, Carrier),
            (String, Carrier),
        ),
        Diagnostic,
    > {
        let name = self.fresh_name()?;
        self.expect(Tok::Colon)?;
        let left = self.carrier_ref()?;
        self.expect(Tok::Both)?;
        let right = self.carrier_ref()?;
        self.keyword("with")?;
        let complement = self.carrier_ref()?;
        Ok((name, left, right, complement))
    }

    fn sym_missing(&mut self, c: &Carrier) -> Result<Value, Diagnostic> {
        self.keyword("missing")?;
        let v = self.member(c)?;
        self.eat(&Tok::Semi);
        self.expect(Tok::RBrace)?;
        Ok(v)
    }

    fn slens_decl(&mut self) -> Result<Decl, Diagnostic> {
        let (name, (ln, a), (rn, b), (cn, c)) = self.sym_header()?;
        self.expect(Tok::LBrace)?;
        let (bc, ac) = (Carrier::product(&b, &c), Carrier::product(&a, &c));
        let put_r = self.table(&name, "putR", &[("a", &a), ("c", &c)], |p| p.member(&bc))?;
        let put_l = self.table(&name, "putL", &[("b", &b), ("c", &c)], |p| p.member(&ac))?;
        let missing = self.sym_missing(&c)?;
        let grid = |rows: &Table<Value>, xs: &Carrier| -> Vec<Vec<(Value, Value)>> {
            xs.elements()
                .iter()
                .map(|x| {
                    c.elements()
                        .iter()
                        .map(|y| {
                            let r = rows
                                .iter()
                                .find(|(k, _)| k[0] == *x && k[1] == *y)
                                .map(|(_, r)| r);
                            match r.and_then(|r| r.split_pair().ok()) {
                                Some((u, v)) => (u.clone(), v.clone()),
                                None => (Value::Unit, Value::Unit),
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let sl = SLens::from_tables(
            name.clone(),
            a.clone(),
            b.clone(),
            c.clone(),
            grid(&put_r, &a),
            grid(&put_l, &b),
            missing.clone(),
        )
        .map_err(|e| at(self.peek(), e.to_string()))?;
        self.env.objects.insert(name.clone(), Object::SLens(sl));
        let flat = |rows: Table<Value>| {
            rows.into_iter()
                .map(|(k, r)| (k[0].clone(), k[1].clone(), r))
                .collect()
        };
        Ok(Decl::SLens(SymDef {
            name,
            left: ln,
            right: rn,
            complement: cn,
            put_r: flat(put_r),
            put_l: flat(put_l),
            missing,
        }))
    }

    fn smlens_decl(&mut self) -> Result<Decl, Diagnostic> {
        let (name, (ln, a), (rn, b), (cn, c)) = self.sym_header()?;
        self.expect(Tok::LBrace)?;
        let (bc, ac) = (Carrier::product(&b, &c), Carrier::product(&a, &c));
        let put_r = self.table(&name, "putR", &[("a", &a), ("c", &c)], |p| {
            p.computation(&bc)
        })?;
        let put_l = self.table(&name, "putL", &[("b", &b), ("c", &c)], |p| {
            p.computation(&ac)
        })?;
        let missing = self.sym_missing(&c)?;
        let grid =
            |rows: &Table<(EffectLit, EffectValue)>, xs: &Carrier| -> Vec<Vec<EffectValue>> {
                xs.elements()
                    .iter()
                    .map(|x| {
                        c.elements()
                            .iter()
                            .map(|y| {
                                rows.iter()
                                    .find(|(k, _)| k[0] == *x && k[1] == *y)
                                    .map(|(_, r)| r.1.clone())
                                    .unwrap_or(EffectValue::Identity(Value::Unit))
                            })
                            .collect()
                    })
                    .collect()
            };
        let sl = SMLens::from_tables(
            name.clone(),
            self.effect.clone(),
            a.clone(),
            b.clone(),
            c.clone(),
            grid(&put_r, &a),
            grid(&put_l, &b),
            missing.clone(),
        )
        .map_err(|e| at(self.peek(), e.to_string()))?;
        self.env.objects.insert(name.clone(), Object::SMLens(sl));
        let flat = |rows: Table<(EffectLit, EffectValue)>| {
            rows.into_iter()
                .map(|(k, r)| (k[0].clone(), k[1].clone(), r.0))
                .collect()
        };
        Ok(Decl::SMLens(SymDef {
            name,
            left: ln,
            right: rn,
            complement: cn,
            put_r: flat(put_r),
            put_l: flat(put_l),
            missing,
        }))
    }

    fn pair_of_refs(&mut self) -> Result<[(String, Object, Token); 2], Diagnostic> {
        self.expect(Tok::LParen)?;
        let first = self.object_ref()?;
        self.expect(Tok::Comma)?;
        let second = self.object_ref()?;
        self.expect(Tok::RParen)?;
        Ok([first, second])
    }

    fn span_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.fresh_name()?;
        let eq = self.expect(Tok::Equals)?;
        let [(ln, lo, lt), (rn, ro, rt)] = self.pair_of_refs()?;
        let effect = match (&lo, &ro) {
            (Object::MLens(m), _) | (_, Object::MLens(m)) => m.effect().clone(),
            _ => Effect::Identity,
        };
        let leg = |o: &Object, t: &Token| match o {
            Object::MLens(m) => Ok(m.clone()),
            Object::Pure(l) => Ok(lens2mlens(&effect, l)),
            other => Err(at(
                t,
                format!(
                    "a span leg must be an mlens or pure-lens, not a {}",
                    other.kind()
                ),
            )),
        };
        let (left, right) = (leg(&lo, &lt)?, leg(&ro, &rt)?);
        let sp = Span::new(name.clone(), left, right).map_err(|e| at(&eq, e.to_string()))?;
        self.env.objects.insert(name.clone(), Object::Span(sp));
        Ok(Decl::Span {
            name,
            left: ln,
            right: rn,
        })
    }

    fn map_decl(&mut self) -> Result<Decl, Diagnostic> {
        let (name, an, a, bn, b) = self.header(Tok::Arrow)?;
        let rows = self.table(&name, "images", &[("s", &a)], |p| p.member(&b))?;
        let images = a
            .elements()
            .iter()
            .map(|x| {
                rows.iter()
                    .find(|(k, _)| k[0] == *x)
                    .map(|(_, r)| r.clone())
                    .unwrap_or(Value::Unit)
            })
            .collect();
        let m = BaseMap::from_images(name.clone(), &a, &b, images)
            .map_err(|e| at(self.peek(), e.to_string()))?;
        self.env.objects.insert(name.clone(), Object::Map(m));
        Ok(Decl::Map(MapDef {
            name,
            source: an,
            target: bn,
            images: rows.into_iter().map(|(k, r)| (k[0].clone(), r)).collect(),
        }))
    }

    fn iso_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.fresh_name()?;
        let eq = self.expect(Tok::Equals)?;
        let [(fname, fo, ft), (bname, bo, bt)] = self.pair_of_refs()?;
        let as_map = |o: Object, t: &Token| match o {
            Object::Map(m) => Ok(m),
            other => Err(at(
                t,
                format!("an iso is built from two maps, not a {}", other.kind()),
            )),
        };
        let iso = IsoWitness::new(as_map(fo, &ft)?, as_map(bo, &bt)?)
            .map_err(|e| at(&eq, e.to_string()))?;
        self.env.objects.insert(name.clone(), Object::Iso(iso));
        Ok(Decl::Iso {
            name,
            forward: fname,
            backward: bname,
        })
    }

    fn witness_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.fresh_name()?;
        self.expect(Tok::Equals)?;
        let (dir, t) = self.ident("`forward` or `backward`")?;
        let direction = match dir.as_str() {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            other => {
                return Err(at(
                    &t,
                    format!("expected `forward` or `backward`, found `{other}`"),
                ))
            }
        };
        let (lens, o, t) = self.object_ref()?;
        let Object::Pure(l) = o else {
            return Err(at(
                &t,
                format!(
                    "a span-equivalence witness needs a pure-lens, not a {}",
                    o.kind()
                ),
            ));
        };
        let w = match direction {
            Direction::Forward => SpanEquivWitness::forward(l),
            Direction::Backward => SpanEquivWitness::backward(l),
        };
        self.env.objects.insert(name.clone(), Object::Witness(w));
        Ok(Decl::Witness {
            name,
            direction,
            lens,
        })
    }

    fn compose_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.fresh_name()?;
        let eq = self.expect(Tok::Equals)?;
        let [(ln, lo, _), (rn, ro, rt)] = self.pair_of_refs()?;
        let composed = compose_objects(&name, &lo, &ro).map_err(|m| at(&rt, m))?;
        let _ = eq;
        self.env.objects.insert(name.clone(), composed);
        Ok(Decl::Compose {
            name,
            left: ln,
            right: rn,
        })
    }

    fn equiv_decl(&mut self) -> Result<Decl, Diagnostic> {
        let (k, t) = self.ident("`iso`, `span` or `bisim`")?;
        let kind: EquivKind = k
            .parse()
            .map_err(|e: bxlens::BxError| at(&t, e.to_string()))?;
        let mut spans = Vec::new();
        for _ in 0..2 {
            let (n, o, t) = self.object_ref()?;
            if !matches!(o, Object::Span(_)) {
                return Err(at(&t, format!("`{n}` is a {}, not a span", o.kind())));
            }
            spans.push(n);
        }
        let witness = if self.peek().tok == Tok::Ident("by".into()) {
            self.next();
            let (n, o, t) = self.object_ref()?;
            let fits = matches!(
                (kind, &o),
                (EquivKind::Iso, Object::Iso(_))
                    | (EquivKind::Span, Object::Witness(_))
                    | (EquivKind::Bisim, Object::Span(_))
            );
            if !fits {
                return Err(at(
                    &t,
                    format!("a {} is not a witness for {kind} equivalence", o.kind()),
                ));
            }
            Some(n)
        } else {
            None
        };
        let b = spans.pop().unwrap_or_default();
        let a = spans.pop().unwrap_or_default();
        self.env.directives.push(Directive::Equiv {
            kind,
            a: a.clone(),
            b: b.clone(),
            witness: witness.clone(),
        });
        Ok(Decl::Equiv {
            kind,
            a,
            b,
            witness,
        })
    }
}

/// Sequential composition of two objects of the same kind.
pub fn compose_objects(name: &str, left: &Object, right: &Object) -> Result<Object, String> {
    let err = |e: bxlens::BxError| e.to_string();
    Ok(match (left, right) {
        (Object::Pure(l), Object::Pure(r)) => {
            Object::Pure(compose_pure(l, r).map_err(err)?.with_name(name))
        }
        (Object::MLens(l), Object::MLens(r)) => {
            Object::MLens(compose_m(l, r).map_err(err)?.with_name(name))
        }
        (Object::SLens(l), Object::SLens(r)) => {
            Object::SLens(compose_s(l, r).map_err(err)?.with_name(name))
        }
        (Object::SMLens(l), Object::SMLens(r)) => {
            Object::SMLens(compose_sm(l, r).map_err(err)?.with_name(name))
        }
        (Object::Span(l), Object::Span(r)) => {
            Object::Span(compose_span(l, r).map_err(err)?.with_name(name))
        }
        (l, r) => return Err(format!("cannot compose a {} with a {}", l.kind(), r.kind())),
    })
}

fn write_rows(out: &mut String, section: &str, rows: Vec<String>) {
    if rows.is_empty() {
        let _ = writeln!(out, "  {section} {{ }}");
        return;
    }
    let _ = writeln!(out, "  {section} {{");
    for r in rows {
        let _ = writeln!(out, "    {r};");
    }
    let _ = writeln!(out, "  }}");
}

fn render_sym<R: fmt::Display>(out: &mut String, kw: &str, d: &SymDef<R>) {
    let _ = writeln!(
        out,
        "{kw} {} : {} <-> {} with {} {{",
        d.name, d.left, d.right, d.complement
    );
    write_rows(
        out,
        "putR",
        d.put_r
            .iter()
            .map(|(a, c, r)| format!("{a} {c} -> {r}"))
            .collect(),
    );
    write_rows(
        out,
        "putL",
        d.put_l
            .iter()
            .map(|(b, c, r)| format!("{b} {c} -> {r}"))
            .collect(),
    );
    let _ = writeln!(out, "  missing {}", d.missing);
    let _ = writeln!(out, "}}");
}

/// Prints a file in the syntax [`parse`] reads.
pub fn render(file: &LensFile) -> String {
    let mut out = String::new();
    for d in &file.decls {
        match d {
            Decl::Carrier { name, elements } => {
                let es: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "carrier {name} {{ {} }}", es.join(" "));
            }
            Decl::Effect(e) => {
                let _ = writeln!(out, "effect {e}");
            }
            Decl::Pure(p) => {
                let _ = writeln!(out, "pure-lens {} : {} ~> {} {{", p.name, p.source, p.view);
                write_rows(
                    &mut out,
                    "get",
                    p.get.iter().map(|(a, b)| format!("{a} -> {b}")).collect(),
                );
                write_rows(
                    &mut out,
                    "put",
                    p.put
                        .iter()
                        .map(|(a, b, r)| format!("{a} {b} -> {r}"))
                        .collect(),
                );
                write_rows(
                    &mut out,
                    "create",
                    p.create
                        .iter()
                        .map(|(b, a)| format!("{b} -> {a}"))
                        .collect(),
                );
                let _ = writeln!(out, "}}");
            }
            Decl::MLens(m) => {
                let _ = writeln!(out, "mlens {} : {} ~> {} {{", m.name, m.source, m.view);
                write_rows(
                    &mut out,
                    "get",
                    m.get.iter().map(|(a, b)| format!("{a} -> {b}")).collect(),
                );
                write_rows(
                    &mut out,
                    "put",
                    m.put
                        .iter()
                        .map(|(a, b, r)| format!("{a} {b} -> {r}"))
                        .collect(),
                );
                write_rows(
                    &mut out,
                    "create",
                    m.create
                        .iter()
                        .map(|(b, r)| format!("{b} -> {r}"))
                        .collect(),
                );
                let _ = writeln!(out, "}}");
            }
            Decl::SLens(s) => render_sym(&mut out, "slens", s),
            Decl::SMLens(s) => render_sym(&mut out, "smlens", s),
            Decl::Span { name, left, right } => {
                let _ = writeln!(out, "span {name} = ({left}, {right})");
            }
            Decl::Map(m) => {
                let _ = write!(out, "map {} : {} -> {} ", m.name, m.source, m.target);
                let rows: Vec<String> = m
                    .images
                    .iter()
                    .map(|(s, t)| format!("{s} -> {t}"))
                    .collect();
                let _ = writeln!(out, "images {{ {} }}", rows.join("; "));
            }
            Decl::Iso {
                name,
                forward,
                backward,
            } => {
                let _ = writeln!(out, "iso {name} = ({forward}, {backward})");
            }
            Decl::Witness {
                name,
                direction,
                lens,
            } => {
                let _ = writeln!(out, "witness {name} = {direction} {lens}");
            }
            Decl::Compose { name, left, right } => {
                let _ = writeln!(out, "compose {name} = ({left}, {right})");
            }
            Decl::Check { name } => {
                let _ = writeln!(out, "check {name}");
            }
            Decl::Equiv {
                kind,
                a,
                b,
                witness,
            } => {
                let _ = match witness {
                    Some(w) => writeln!(out, "equiv {kind} {a} {b} by {w}"),
                    None => writeln!(out, "equiv {kind} {a} {b}"),
                };
            }
        }
    }
    out
}
