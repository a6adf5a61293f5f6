//! Enumerable effects: return/bind/equality, membership, and law checkers.
//!
//! Effectful results are first-order [`EffectValue`]s. A `State` value is
//! stored as its full transition table, so equality is extensional by
//! construction.

use std::fmt;
use std::sync::Arc;

use crate::error::{BxError, Result};
use crate::report::{LawReport, StateDivergence, Violation};
use crate::value::{Carrier, Value};

/// Enumeration limits for the exhaustive checkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Largest tabulated function space (or value space) a checker may build.
    pub functions: u128,
    /// Largest number of law instances a single checker may evaluate.
    pub instances: u128,
    /// Longest `List` payload generated when enumerating computations.
    pub max_list_len: usize,
    /// Longest free-list (or multiset) log generated for `Writer`.
    pub max_log_len: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            functions: 1_000_000,
            instances: 50_000_000,
            max_list_len: 2,
            max_log_len: 1,
        }
    }
}

// ---------------------------------------------------------------------------
// Monoids
// ---------------------------------------------------------------------------

/// A monoid on a finite carrier, stored as its operation table.
#[derive(Clone)]
pub struct FiniteMonoid {
    name: String,
    carrier: Carrier,
    unit: usize,
    table: Arc<Vec<Vec<usize>>>,
}

impl FiniteMonoid {
    /// Tabulates `op` and checks closure, the unit laws and associativity.
    pub fn new(
        name: impl Into<String>,
        carrier: Carrier,
        unit: Value,
        op: impl Fn(&Value, &Value) -> Value,
    ) -> Result<FiniteMonoid> {
        let name = name.into();
        let unit = carrier
            .index_of(&unit)
            .ok_or_else(|| BxError::InvalidMonoid(format!("{name}: unit {unit} not in carrier")))?;
        let n = carrier.len();
        let mut table = vec![vec![0; n]; n];
        for (i, x) in carrier.elements().iter().enumerate() {
            for (j, y) in carrier.elements().iter().enumerate() {
                let z = op(x, y);
                table[i][j] = carrier.index_of(&z).ok_or_else(|| {
                    BxError::InvalidMonoid(format!("{name}: {x}·{y} = {z} leaves the carrier"))
                })?;
            }
        }
        for (i, row) in table.iter().enumerate() {
            if table[unit][i] != i || row[unit] != i {
                return Err(BxError::InvalidMonoid(format!(
                    "{name}: unit law fails at {}",
                    carrier.elements()[i]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[table[i][j]][k] != table[i][table[j][k]] {
                        return Err(BxError::InvalidMonoid(format!(
                            "{name}: associativity fails at ({}, {}, {})",
                            carrier.elements()[i],
                            carrier.elements()[j],
                            carrier.elements()[k]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMonoid {
            name,
            carrier,
            unit,
            table: Arc::new(table),
        })
    }

    /// Addition modulo 2 on `{0, 1}`.
    pub fn xor() -> FiniteMonoid {
        FiniteMonoid::new(
            "Z2",
            Carrier::int_range(0, 1),
            Value::Int(0),
            |x, y| match (x, y) {
                (Value::Int(a), Value::Int(b)) => Value::Int((a + b) % 2),
                _ => Value::Unit,
            },
        )
        .expect("Z2 is a monoid")
    }

    /// Disjunction on `{F, T}`.
    pub fn or() -> FiniteMonoid {
        FiniteMonoid::new("Or", Carrier::bool(), Value::Bool(false), |x, y| {
            match (x, y) {
                (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a || *b),
                _ => Value::Unit,
            }
        })
        .expect("Or is a monoid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn unit(&self) -> &Value {
        &self.carrier.elements()[self.unit]
    }

    pub fn combine(&self, a: &Value, b: &Value) -> Result<Value> {
        let i = self.carrier.position(a)?;
        let j = self.carrier.position(b)?;
        Ok(self.carrier.elements()[self.table[i][j]].clone())
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.carrier.len();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }
}

impl PartialEq for FiniteMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.carrier == other.carrier
            && self.unit == other.unit
            && self.table == other.table
    }
}

impl fmt::Debug for FiniteMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteMonoid({})", self.name)
    }
}

/// Log monoid for the `Writer` effect.
#[derive(Debug, Clone, PartialEq)]
pub enum Monoid {
    /// Lists over the carrier under concatenation.
    FreeList(Carrier),
    /// Finite multisets over the carrier; logs are kept as sorted lists.
    Multiset(Carrier),
    Finite(FiniteMonoid),
}

impl Monoid {
    pub fn name(&self) -> String {
        match self {
            Monoid::FreeList(c) => format!("list {}", c.name()),
            Monoid::Multiset(c) => format!("multiset {}", c.name()),
            Monoid::Finite(m) => m.name().to_string(),
        }
    }

    pub fn unit(&self) -> Value {
        match self {
            Monoid::FreeList(_) | Monoid::Multiset(_) => Value::List(Vec::new()),
            Monoid::Finite(m) => m.unit().clone(),
        }
    }

    fn list_items<'a>(&self, base: &Carrier, log: &'a Value) -> Result<&'a [Value]> {
        match log {
            Value::List(items) => {
                for x in items {
                    base.check_member(x)?;
                }
                Ok(items)
            }
            other => Err(BxError::Shape(format!("expected a log list, got {other}"))),
        }
    }

    pub fn combine(&self, a: &Value, b: &Value) -> Result<Value> {
        match self {
            Monoid::FreeList(base) => {
                let mut items = self.list_items(base, a)?.to_vec();
                items.extend_from_slice(self.list_items(base, b)?);
                Ok(Value::List(items))
            }
            Monoid::Multiset(base) => {
                let mut items = self.list_items(base, a)?.to_vec();
                items.extend_from_slice(self.list_items(base, b)?);
                items.sort_by_key(|x| base.index_of(x));
                Ok(Value::List(items))
            }
            Monoid::Finite(m) => m.combine(a, b),
        }
    }

    /// The log recording the single entry `x`.
    pub fn singleton(&self, x: &Value) -> Result<Value> {
        match self {
            Monoid::FreeList(base) | Monoid::Multiset(base) => {
                base.check_member(x)?;
                Ok(Value::List(vec![x.clone()]))
            }
            Monoid::Finite(m) => {
                m.carrier().check_member(x)?;
                Ok(x.clone())
            }
        }
    }

    pub fn check_log(&self, log: &Value) -> Result<()> {
        match self {
            Monoid::FreeList(base) => self.list_items(base, log).map(|_| ()),
            Monoid::Multiset(base) => {
                let items = self.list_items(base, log)?;
                let sorted = items
                    .windows(2)
                    .all(|w| base.index_of(&w[0]) <= base.index_of(&w[1]));
                if sorted {
                    Ok(())
                } else {
                    Err(BxError::Shape(format!(
                        "multiset log {log} is not in canonical order"
                    )))
                }
            }
            Monoid::Finite(m) => m.carrier().check_member(log),
        }
    }

    /// Every log up to `max_len` entries (all elements for a finite monoid),
    /// shortest first.
    pub fn logs(&self, max_len: usize) -> Vec<Value> {
        match self {
            Monoid::FreeList(base) => {
                let mut out = vec![Vec::new()];
                let mut layer: Vec<Vec<Value>> = vec![Vec::new()];
                for _ in 0..max_len {
                    let mut next = Vec::new();
                    for prefix in &layer {
                        for x in base.elements() {
                            let mut l = prefix.clone();
                            l.push(x.clone());
                            next.push(l);
                        }
                    }
                    out.extend(next.iter().cloned());
                    layer = next;
                }
                out.into_iter().map(Value::List).collect()
            }
            Monoid::Multiset(base) => {
                let mut out = vec![Vec::new()];
                let mut layer: Vec<(Vec<Value>, usize)> = vec![(Vec::new(), 0)];
                for _ in 0..max_len {
                    let mut next = Vec::new();
                    for (prefix, from) in &layer {
                        for (i, x) in base.elements().iter().enumerate().skip(*from) {
                            let mut l = prefix.clone();
                            l.push(x.clone());
                            next.push((l, i));
                        }
                    }
                    out.extend(next.iter().map(|(l, _)| l.clone()));
                    layer = next;
                }
                out.into_iter().map(Value::List).collect()
            }
            Monoid::Finite(m) => m.carrier().elements().to_vec(),
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            Monoid::FreeList(base) => base.len() <= 1,
            Monoid::Multiset(_) => true,
            Monoid::Finite(m) => m.is_commutative(),
        }
    }
}

// ---------------------------------------------------------------------------
// Effects and effectful values
// ---------------------------------------------------------------------------

/// The effect (monad) an effectful operation runs in.
#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    Identity,
    Maybe,
    List,
    Writer(Monoid),
    State(Carrier),
}

/// A computation in some [`Effect`], in first-order form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EffectValue {
    Identity(Value),
    Maybe(Option<Value>),
    List(Vec<Value>),
    Writer {
        log: Value,
        value: Value,
    },
    /// Row `i` is the (result, final state index) when started in state `i`.
    State(Vec<(Value, usize)>),
}

impl EffectValue {
    fn kind(&self) -> &'static str {
        match self {
            EffectValue::Identity(_) => "Identity",
            EffectValue::Maybe(_) => "Maybe",
            EffectValue::List(_) => "List",
            EffectValue::Writer { .. } => "Writer",
            EffectValue::State(_) => "State",
        }
    }

    /// Every result value the computation can produce.
    pub fn results(&self) -> Vec<&Value> {
        match self {
            EffectValue::Identity(v) => vec![v],
            EffectValue::Maybe(o) => o.iter().collect(),
            EffectValue::List(vs) => vs.iter().collect(),
            EffectValue::Writer { value, .. } => vec![value],
            EffectValue::State(rows) => rows.iter().map(|(v, _)| v).collect(),
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Identity => write!(f, "identity"),
            Effect::Maybe => write!(f, "maybe"),
            Effect::List => write!(f, "list"),
            Effect::Writer(m) => write!(f, "writer {}", m.name()),
            Effect::State(c) => write!(f, "state {}", c.name()),
        }
    }
}

impl Effect {
    pub fn is_identity(&self) -> bool {
        matches!(self, Effect::Identity)
    }

    pub fn state_carrier(&self) -> Option<&Carrier> {
        match self {
            Effect::State(s) => Some(s),
            _ => None,
        }
    }

    /// Errors unless both effects are the same monad.
    pub fn expect_same(&self, other: &Effect, context: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(BxError::EffectMismatch {
                context: context.to_string(),
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }

    /// Structural check that `m` is a computation of this effect.
    pub fn check_tag(&self, m: &EffectValue) -> Result<()> {
        let ok = match (self, m) {
            (Effect::Identity, EffectValue::Identity(_))
            | (Effect::Maybe, EffectValue::Maybe(_))
            | (Effect::List, EffectValue::List(_)) => true,
            (Effect::Writer(mon), EffectValue::Writer { log, .. }) => {
                mon.check_log(log)?;
                true
            }
            (Effect::State(s), EffectValue::State(rows)) => {
                rows.len() == s.len() && rows.iter().all(|(_, j)| *j < s.len())
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(BxError::TagMismatch {
                expected: self.to_string(),
                found: m.kind().to_string(),
            })
        }
    }

    /// Checks the tag and that every result lies in `carrier`.
    pub fn check_results(&self, m: &EffectValue, carrier: &Carrier) -> Result<()> {
        self.check_tag(m)?;
        for v in m.results() {
            carrier.check_member(v)?;
        }
        Ok(())
    }

    pub fn ret(&self, v: Value) -> EffectValue {
        match self {
            Effect::Identity => EffectValue::Identity(v),
            Effect::Maybe => EffectValue::Maybe(Some(v)),
            Effect::List => EffectValue::List(vec![v]),
            Effect::Writer(m) => EffectValue::Writer {
                log: m.unit(),
                value: v,
            },
            Effect::State(s) => EffectValue::State((0..s.len()).map(|i| (v.clone(), i)).collect()),
        }
    }

    pub fn bind(
        &self,
        m: &EffectValue,
        f: &mut dyn FnMut(&Value) -> Result<EffectValue>,
    ) -> Result<EffectValue> {
        self.check_tag(m)?;
        let mut next = |v: &Value| -> Result<EffectValue> {
            let r = f(v)?;
            self.check_tag(&r)?;
            Ok(r)
        };
        Ok(match (self, m) {
            (Effect::Identity, EffectValue::Identity(v)) => next(v)?,
            (Effect::Maybe, EffectValue::Maybe(None)) => EffectValue::Maybe(None),
            (Effect::Maybe, EffectValue::Maybe(Some(v))) => next(v)?,
            (Effect::List, EffectValue::List(vs)) => {
                let mut out = Vec::new();
                for v in vs {
                    match next(v)? {
                        EffectValue::List(ws) => out.extend(ws),
                        _ => unreachable!("tag checked"),
                    }
                }
                EffectValue::List(out)
            }
            (Effect::Writer(mon), EffectValue::Writer { log, value }) => match next(value)? {
                EffectValue::Writer { log: log2, value } => EffectValue::Writer {
                    log: mon.combine(log, &log2)?,
                    value,
                },
                _ => unreachable!("tag checked"),
            },
            (Effect::State(_), EffectValue::State(rows)) => {
                let mut cache: Vec<(Value, Vec<(Value, usize)>)> = Vec::new();
                let mut out = Vec::with_capacity(rows.len());
                for (v, mid) in rows {
                    let pos = match cache.iter().position(|(k, _)| k == v) {
                        Some(p) => p,
                        None => match next(v)? {
                            EffectValue::State(t) => {
                                cache.push((v.clone(), t));
                                cache.len() - 1
                            }
                            _ => unreachable!("tag checked"),
                        },
                    };
                    out.push(cache[pos].1[*mid].clone());
                }
                EffectValue::State(out)
            }
            _ => unreachable!("tag checked"),
        })
    }

    /// `do { x <- m; return (g x) }`.
    pub fn map(&self, m: &EffectValue, g: impl Fn(&Value) -> Result<Value>) -> Result<EffectValue> {
        self.bind(m, &mut |v| Ok(self.ret(g(v)?)))
    }

    pub fn eq(&self, a: &EffectValue, b: &EffectValue) -> Result<bool> {
        self.check_tag(a)?;
        self.check_tag(b)?;
        Ok(a == b)
    }

    /// Monad membership; defined for `Maybe` and `List` only.
    pub fn member(&self, x: &Value, m: &EffectValue) -> Result<bool> {
        self.check_tag(m)?;
        match m {
            EffectValue::Maybe(o) => Ok(o.as_ref() == Some(x)),
            EffectValue::List(vs) => Ok(vs.contains(x)),
            _ => Err(BxError::UnsupportedMembership(self.to_string())),
        }
    }

    pub fn supports_membership(&self) -> bool {
        matches!(self, Effect::Maybe | Effect::List)
    }

    pub fn nothing(&self) -> Result<EffectValue> {
        match self {
            Effect::Maybe => Ok(EffectValue::Maybe(None)),
            Effect::List => Ok(EffectValue::List(Vec::new())),
            other => Err(BxError::InvalidParameter(format!("{other} has no failure"))),
        }
    }

    /// `do { set s; return v }`.
    pub fn set(&self, s: &Value, v: Value) -> Result<EffectValue> {
        match self {
            Effect::State(c) => {
                let j = c.position(s)?;
                Ok(EffectValue::State(vec![(v, j); c.len()]))
            }
            other => Err(BxError::InvalidParameter(format!(
                "set needs a state effect, not {other}"
            ))),
        }
    }

    /// Returns the current state.
    pub fn get_state(&self) -> Result<EffectValue> {
        match self {
            Effect::State(c) => Ok(EffectValue::State(
                c.elements()
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, s)| (s, i))
                    .collect(),
            )),
            other => Err(BxError::InvalidParameter(format!(
                "get needs a state effect, not {other}"
            ))),
        }
    }

    /// `tell log`, returning unit.
    pub fn tell(&self, log: Value) -> Result<EffectValue> {
        match self {
            Effect::Writer(m) => {
                m.check_log(&log)?;
                Ok(EffectValue::Writer {
                    log,
                    value: Value::Unit,
                })
            }
            other => Err(BxError::InvalidParameter(format!(
                "tell needs a writer effect, not {other}"
            ))),
        }
    }

    /// Runs a state computation from `s`, giving (result, final state).
    pub fn run_state(&self, m: &EffectValue, s: &Value) -> Result<(Value, Value)> {
        self.check_tag(m)?;
        match (self, m) {
            (Effect::State(c), EffectValue::State(rows)) => {
                let (v, j) = &rows[c.position(s)?];
                Ok((v.clone(), c.elements()[*j].clone()))
            }
            _ => Err(BxError::InvalidParameter(format!("run_state on {self}"))),
        }
    }

    /// The first initial state where two state computations differ.
    pub fn divergence(&self, lhs: &EffectValue, rhs: &EffectValue) -> Option<StateDivergence> {
        match (self, lhs, rhs) {
            (Effect::State(c), EffectValue::State(a), EffectValue::State(b)) => {
                let i = (0..a.len().min(b.len())).find(|&i| a[i] != b[i])?;
                Some(StateDivergence {
                    initial: c.elements()[i].clone(),
                    lhs_result: a[i].0.clone(),
                    lhs_final: c.elements()[a[i].1].clone(),
                    rhs_result: b[i].0.clone(),
                    rhs_final: c.elements()[b[i].1].clone(),
                })
            }
            _ => None,
        }
    }

    /// Literal syntax, as accepted by the lens-file format.
    pub fn render(&self, m: &EffectValue) -> String {
        match m {
            EffectValue::Identity(v) => v.to_string(),
            EffectValue::Maybe(None) => "nothing".into(),
            EffectValue::Maybe(Some(v)) => format!("just {v}"),
            EffectValue::List(vs) => Value::List(vs.clone()).to_string(),
            EffectValue::Writer { log, value } => format!("({log}; {value})"),
            EffectValue::State(rows) => match self {
                Effect::State(c) => {
                    let cells: Vec<String> = rows
                        .iter()
                        .enumerate()
                        .map(|(i, (v, j))| {
                            format!("{} -> ({v}, {})", c.elements()[i], c.elements()[*j])
                        })
                        .collect();
                    format!("{{{}}}", cells.join("; "))
                }
                _ => format!("{m:?}"),
            },
        }
    }

    /// Short human description; recognises `set s`, `return v` and `get`.
    pub fn describe(&self, m: &EffectValue) -> String {
        if let (Effect::State(c), EffectValue::State(rows)) = (self, m) {
            if let Some((v0, j0)) = rows.first() {
                let same_result = rows.iter().all(|(v, _)| v == v0);
                let const_state = rows.iter().all(|(_, j)| j == j0);
                let identity_state = rows.iter().enumerate().all(|(i, (_, j))| i == *j);
                if same_result && identity_state {
                    return format!("return {v0}");
                }
                if same_result && const_state {
                    let s = &c.elements()[*j0];
                    return if *v0 == Value::Unit {
                        format!("set {s}")
                    } else {
                        format!("set {s}; return {v0}")
                    };
                }
            }
        }
        self.render(m)
    }

    /// Every computation over `carrier`, within `bounds`.
    pub fn enumerate(&self, carrier: &Carrier, bounds: &Bounds) -> Result<Vec<EffectValue>> {
        let vals = carrier.elements();
        let out: Vec<EffectValue> = match self {
            Effect::Identity => vals.iter().cloned().map(EffectValue::Identity).collect(),
            Effect::Maybe => std::iter::once(EffectValue::Maybe(None))
                .chain(vals.iter().cloned().map(|v| EffectValue::Maybe(Some(v))))
                .collect(),
            Effect::List => {
                let lists = Monoid::FreeList(carrier.clone()).logs(bounds.max_list_len);
                lists
                    .into_iter()
                    .map(|l| match l {
                        Value::List(items) => EffectValue::List(items),
                        _ => unreachable!(),
                    })
                    .collect()
            }
            Effect::Writer(m) => {
                let mut out = Vec::new();
                for log in m.logs(bounds.max_log_len) {
                    for v in vals {
                        out.push(EffectValue::Writer {
                            log: log.clone(),
                            value: v.clone(),
                        });
                    }
                }
                out
            }
            Effect::State(s) => {
                let cells = vals.len() * s.len();
                let count = checked_pow(cells, s.len());
                if count > bounds.functions {
                    return Err(BxError::bound(
                        format!("state computations over {}", carrier.name()),
                        count,
                        bounds.functions,
                    ));
                }
                let mut out = Vec::new();
                for choice in odometer(cells, s.len()) {
                    out.push(EffectValue::State(
                        choice
                            .iter()
                            .map(|&k| (vals[k / s.len()].clone(), k % s.len()))
                            .collect(),
                    ));
                }
                out
            }
        };
        Ok(out)
    }

    /// Primitive operations listed ahead of the rest when searching for a
    /// first witness: `set s; return v` for State, single-entry `tell` for
    /// Writer.
    pub fn primitives(&self, carrier: &Carrier) -> Vec<EffectValue> {
        match self {
            Effect::State(s) => {
                let mut out = Vec::new();
                for v in carrier.elements() {
                    for j in 0..s.len() {
                        out.push(EffectValue::State(vec![(v.clone(), j); s.len()]));
                    }
                }
                out
            }
            Effect::Writer(m) => {
                let mut out = Vec::new();
                let entries: Vec<Value> = match m {
                    Monoid::FreeList(b) | Monoid::Multiset(b) => b.elements().to_vec(),
                    Monoid::Finite(f) => f.carrier().elements().to_vec(),
                };
                for x in entries {
                    if let Ok(log) = m.singleton(&x) {
                        for v in carrier.elements() {
                            out.push(EffectValue::Writer {
                                log: log.clone(),
                                value: v.clone(),
                            });
                        }
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }
}

/// `base^exp`, saturating.
pub(crate) fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Lexicographic counter over `radices`, last position fastest.
pub(crate) struct Counter {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Counter {
    pub(crate) fn new(radices: Vec<usize>) -> Counter {
        let next = if radices.contains(&0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        Counter { radices, next }
    }
}

impl Iterator for Counter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        while i > 0 {
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.radices[i] {
                self.next = Some(succ);
                return Some(cur);
            }
            succ[i] = 0;
        }
        Some(cur)
    }
}

/// All length-`len` vectors over `0..radix`, last position fastest.
pub(crate) fn odometer(radix: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    if radix == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0; len];
    loop {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < radix {
                break;
            }
            cur[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Instances under test
// ---------------------------------------------------------------------------

/// The monad interface the law checkers quantify over.
///
/// [`Effect`] is the lawful implementation; the others in this module are
/// deliberately broken and exist to show the checkers catch them.
pub trait MonadInstance {
    fn label(&self) -> String;
    fn ret(&self, v: &Value) -> EffectValue;
    fn bind(
        &self,
        m: &EffectValue,
        f: &mut dyn FnMut(&Value) -> Result<EffectValue>,
    ) -> Result<EffectValue>;
    fn equal(&self, a: &EffectValue, b: &EffectValue) -> Result<bool>;
    fn member(&self, x: &Value, m: &EffectValue) -> Result<bool>;
    fn enumerate(&self, carrier: &Carrier, bounds: &Bounds) -> Result<Vec<EffectValue>>;
    fn primitives(&self, _carrier: &Carrier) -> Vec<EffectValue> {
        Vec::new()
    }
    fn render(&self, m: &EffectValue) -> String;
    fn describe(&self, m: &EffectValue) -> String {
        self.render(m)
    }
    fn divergence(&self, _lhs: &EffectValue, _rhs: &EffectValue) -> Option<StateDivergence> {
        None
    }
}

impl MonadInstance for Effect {
    fn label(&self) -> String {
        self.to_string()
    }
    fn ret(&self, v: &Value) -> EffectValue {
        Effect::ret(self, v.clone())
    }
    fn bind(
        &self,
        m: &EffectValue,
        f: &mut dyn FnMut(&Value) -> Result<EffectValue>,
    ) -> Result<EffectValue> {
        Effect::bind(self, m, f)
    }
    fn equal(&self, a: &EffectValue, b: &EffectValue) -> Result<bool> {
        self.eq(a, b)
    }
    fn member(&self, x: &Value, m: &EffectValue) -> Result<bool> {
        Effect::member(self, x, m)
    }
    fn enumerate(&self, carrier: &Carrier, bounds: &Bounds) -> Result<Vec<EffectValue>> {
        Effect::enumerate(self, carrier, bounds)
    }
    fn primitives(&self, carrier: &Carrier) -> Vec<EffectValue> {
        Effect::primitives(self, carrier)
    }
    fn render(&self, m: &EffectValue) -> String {
        Effect::render(self, m)
    }
    fn describe(&self, m: &EffectValue) -> String {
        Effect::describe(self, m)
    }
    fn divergence(&self, lhs: &EffectValue, rhs: &EffectValue) -> Option<StateDivergence> {
        Effect::divergence(self, lhs, rhs)
    }
}

/// A writer whose bind drops the earlier log once the combined log would
/// exceed `cap` entries. The unit laws survive; associativity does not.
#[derive(Debug, Clone)]
pub struct LossyWriter {
    pub base: Carrier,
    pub cap: usize,
}

impl LossyWriter {
    fn effect(&self) -> Effect {
        Effect::Writer(Monoid::FreeList(self.base.clone()))
    }
}

impl MonadInstance for LossyWriter {
    fn label(&self) -> String {
        format!("lossy writer list {} (cap {})", self.base.name(), self.cap)
    }
    fn ret(&self, v: &Value) -> EffectValue {
        self.effect().ret(v.clone())
    }
    fn bind(
        &self,
        m: &EffectValue,
        f: &mut dyn FnMut(&Value) -> Result<EffectValue>,
    ) -> Result<EffectValue> {
        let EffectValue::Writer { log, value } = m else {
            return Err(BxError::TagMismatch {
                expected: "Writer".into(),
                found: m.kind().into(),
            });
        };
        let EffectValue::Writer {
            log: log2,
            value: out,
        } = f(value)?
        else {
            return Err(BxError::TagMismatch {
                expected: "Writer".into(),
                found: "other".into(),
            });
        };
        let (Value::List(a), Value::List(b)) = (log, &log2) else {
            return Err(BxError::Shape("writer logs must be lists".into()));
        };
        let log = if a.len() + b.len() > self.cap {
            log2.clone()
        } else {
            let mut all = a.clone();
            all.extend(b.iter().cloned());
            Value::List(all)
        };
        Ok(EffectValue::Writer { log, value: out })
    }
    fn equal(&self, a: &EffectValue, b: &EffectValue) -> Result<bool> {
        Ok(a == b)
    }
    fn member(&self, _x: &Value, _m: &EffectValue) -> Result<bool> {
        Err(BxError::UnsupportedMembership(self.label()))
    }
    fn enumerate(&self, carrier: &Carrier, bounds: &Bounds) -> Result<Vec<EffectValue>> {
        self.effect().enumerate(carrier, bounds)
    }
    fn render(&self, m: &EffectValue) -> String {
        self.effect().render(m)
    }
}

/// A lawful monad paired with a membership test that always says yes.
#[derive(Debug, Clone)]
pub struct AlwaysMember(pub Effect);

impl MonadInstance for AlwaysMember {
    fn label(&self) -> String {
        format!("{} with always-true membership", self.0)
    }
    fn ret(&self, v: &Value) -> EffectValue {
        self.0.ret(v.clone())
    }
    fn bind(
        &self,
        m: &EffectValue,
        f: &mut dyn FnMut(&Value) -> Result<EffectValue>,
    ) -> Result<EffectValue> {
        self.0.bind(m, f)
    }
    fn equal(&self, a: &EffectValue, b: &EffectValue) -> Result<bool> {
        self.0.eq(a, b)
    }
    fn member(&self, _x: &Value, _m: &EffectValue) -> Result<bool> {
        Ok(true)
    }
    fn enumerate(&self, carrier: &Carrier, bounds: &Bounds) -> Result<Vec<EffectValue>> {
        self.0.enumerate(carrier, bounds)
    }
    fn render(&self, m: &EffectValue) -> String {
        self.0.render(m)
    }
}

// ---------------------------------------------------------------------------
// Checkers
// ---------------------------------------------------------------------------

/// Records one equation between computations, attaching a state divergence
/// when the sides differ.
pub(crate) fn record_effect_eq(
    report: &mut LawReport,
    inst: &dyn MonadInstance,
    law: &str,
    lhs: &EffectValue,
    rhs: &EffectValue,
    bindings: impl FnOnce() -> Vec<(String, Value)>,
) -> Result<bool> {
    let ok = inst.equal(lhs, rhs)?;
    report.record(law, ok, || Violation {
        law: law.to_string(),
        bindings: bindings(),
        lhs: inst.render(lhs),
        rhs: inst.render(rhs),
        divergence: inst.divergence(lhs, rhs),
    });
    Ok(ok)
}

fn shown(name: &str, text: String) -> (String, Value) {
    (name.to_string(), Value::sym(&text))
}

struct Tabulation {
    values: Vec<EffectValue>,
    functions: Vec<Vec<usize>>,
}

fn tabulate(inst: &dyn MonadInstance, carrier: &Carrier, bounds: &Bounds) -> Result<Tabulation> {
    let values = inst.enumerate(carrier, bounds)?;
    let count = checked_pow(values.len(), carrier.len());
    if count > bounds.functions {
        return Err(BxError::bound(
            format!("functions {} -> {}", carrier.name(), inst.label()),
            count,
            bounds.functions,
        ));
    }
    let functions = odometer(values.len(), carrier.len());
    Ok(Tabulation { values, functions })
}

fn render_fn(inst: &dyn MonadInstance, carrier: &Carrier, tab: &Tabulation, f: &[usize]) -> String {
    let cells: Vec<String> = carrier
        .elements()
        .iter()
        .zip(f)
        .map(|(x, &k)| format!("{x} -> {}", inst.render(&tab.values[k])))
        .collect();
    format!("{{{}}}", cells.join("; "))
}

/// Left unit, right unit and associativity, exhaustively over `carrier`.
pub fn check_monad_laws(
    inst: &dyn MonadInstance,
    carrier: &Carrier,
    bounds: &Bounds,
) -> Result<LawReport> {
    let tab = tabulate(inst, carrier, bounds)?;
    let nv = tab.values.len() as u128;
    let nf = tab.functions.len() as u128;
    let needed = nv.saturating_mul(nf).saturating_mul(nf);
    if needed > bounds.instances {
        return Err(BxError::bound(
            format!("associativity instances for {}", inst.label()),
            needed,
            bounds.instances,
        ));
    }
    let mut report = LawReport::new(format!(
        "monad laws: {} over {}",
        inst.label(),
        carrier.name()
    ));
    for law in ["LeftUnit", "RightUnit", "Assoc"] {
        report.declare(law);
    }
    let apply = |f: &[usize], x: &Value| -> Result<EffectValue> {
        Ok(tab.values[f[carrier.position(x)?]].clone())
    };

    for (i, a) in carrier.elements().iter().enumerate() {
        for f in &tab.functions {
            let lhs = inst.bind(&inst.ret(a), &mut |x| apply(f, x))?;
            let rhs = tab.values[f[i]].clone();
            record_effect_eq(&mut report, inst, "LeftUnit", &lhs, &rhs, || {
                vec![
                    ("a".into(), a.clone()),
                    shown("f", render_fn(inst, carrier, &tab, f)),
                ]
            })?;
        }
    }
    for m in &tab.values {
        let lhs = inst.bind(m, &mut |x| Ok(inst.ret(x)))?;
        record_effect_eq(&mut report, inst, "RightUnit", &lhs, m, || {
            vec![shown("m", inst.render(m))]
        })?;
    }
    for m in &tab.values {
        for f in &tab.functions {
            let mf = inst.bind(m, &mut |x| apply(f, x))?;
            for g in &tab.functions {
                let lhs = inst.bind(&mf, &mut |y| apply(g, y))?;
                let rhs = inst.bind(m, &mut |x| inst.bind(&apply(f, x)?, &mut |y| apply(g, y)))?;
                record_effect_eq(&mut report, inst, "Assoc", &lhs, &rhs, || {
                    vec![
                        shown("m", inst.render(m)),
                        shown("f", render_fn(inst, carrier, &tab, f)),
                        shown("g", render_fn(inst, carrier, &tab, g)),
                    ]
                })?;
            }
        }
    }
    Ok(report)
}

/// A pair of computations that do not commute.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutativityWitness {
    pub first: EffectValue,
    pub second: EffectValue,
    pub first_shown: String,
    pub second_shown: String,
    pub lhs: String,
    pub rhs: String,
    pub divergence: Option<StateDivergence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutativityReport {
    pub effect: String,
    pub commutative: bool,
    pub pairs_checked: u64,
    pub witness: Option<CommutativityWitness>,
}

impl fmt::Display for CommutativityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(
                f,
                "{} is commutative ({} pairs checked)",
                self.effect, self.pairs_checked
            ),
            Some(w) => write!(
                f,
                "{} is not commutative: ({}, {}) gives {} versus {}",
                self.effect, w.first_shown, w.second_shown, w.lhs, w.rhs
            ),
        }
    }
}

/// Checks `do {a <- x; b <- y; return (a,b)} = do {b <- y; a <- x; return (a,b)}`.
///
/// Candidates are the instance's primitive operations followed by the rest
/// of the tabulation; pairs run with `y` as the outer loop.
pub fn check_commutative(
    inst: &dyn MonadInstance,
    carrier: &Carrier,
    bounds: &Bounds,
) -> Result<CommutativityReport> {
    let mut order = inst.primitives(carrier);
    for v in inst.enumerate(carrier, bounds)? {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let pairs = (order.len() as u128).saturating_mul(order.len() as u128);
    if pairs > bounds.instances {
        return Err(BxError::bound(
            format!("commutation pairs for {}", inst.label()),
            pairs,
            bounds.instances,
        ));
    }
    let mut checked = 0;
    for y in &order {
        for x in &order {
            checked += 1;
            let lhs = inst.bind(x, &mut |a| {
                inst.bind(y, &mut |b| Ok(inst.ret(&Value::pair(a.clone(), b.clone()))))
            })?;
            let rhs = inst.bind(y, &mut |b| {
                inst.bind(x, &mut |a| Ok(inst.ret(&Value::pair(a.clone(), b.clone()))))
            })?;
            if !inst.equal(&lhs, &rhs)? {
                return Ok(CommutativityReport {
                    effect: inst.label(),
                    commutative: false,
                    pairs_checked: checked,
                    witness: Some(CommutativityWitness {
                        first: x.clone(),
                        second: y.clone(),
                        first_shown: inst.describe(x),
                        second_shown: inst.describe(y),
                        lhs: inst.render(&lhs),
                        rhs: inst.render(&rhs),
                        divergence: inst.divergence(&lhs, &rhs),
                    }),
                });
            }
        }
    }
    Ok(CommutativityReport {
        effect: inst.label(),
        commutative: true,
        pairs_checked: checked,
        witness: None,
    })
}

/// The membership laws, each split into its two directions:
///
/// * `MemberId(=>)`:  `y = x` implies `y ∈ return x`
/// * `MemberId(<=)`:  `y ∈ return x` implies `y = x`
/// * `MemberBind(=>)`: `y ∈ (m >>= f)` implies some `x ∈ m` has `y ∈ f x`
/// * `MemberBind(<=)`: the converse
pub fn check_membership_laws(
    inst: &dyn MonadInstance,
    carrier: &Carrier,
    bounds: &Bounds,
) -> Result<LawReport> {
    if let Some(x) = carrier.elements().first() {
        inst.member(x, &inst.ret(x))?;
    }
    let tab = tabulate(inst, carrier, bounds)?;
    let mut report = LawReport::new(format!(
        "membership laws: {} over {}",
        inst.label(),
        carrier.name()
    ));
    for law in [
        "MemberId(=>)",
        "MemberId(<=)",
        "MemberBind(=>)",
        "MemberBind(<=)",
    ] {
        report.declare(law);
    }
    let elems = carrier.elements();
    for x in elems {
        let rx = inst.ret(x);
        for y in elems {
            let m = inst.member(y, &rx)?;
            let binds = || vec![("x".to_string(), x.clone()), ("y".to_string(), y.clone())];
            if x == y {
                report.record("MemberId(=>)", m, || {
                    Violation::new(
                        "MemberId(=>)",
                        binds(),
                        format!("{y} ∈ {}", inst.render(&rx)),
                        "false".into(),
                    )
                });
            } else {
                report.record("MemberId(<=)", !m, || {
                    Violation::new(
                        "MemberId(<=)",
                        binds(),
                        format!("{y} ∈ {}", inst.render(&rx)),
                        format!("{y} ≠ {x}"),
                    )
                });
            }
        }
    }
    for m in &tab.values {
        for f in &tab.functions {
            let fx = |x: &Value| -> Result<EffectValue> {
                Ok(tab.values[f[carrier.position(x)?]].clone())
            };
            let bound = inst.bind(m, &mut |x| fx(x))?;
            for y in elems {
                let lhs = inst.member(y, &bound)?;
                let mut rhs = false;
                for x in elems {
                    if inst.member(x, m)? && inst.member(y, &fx(x)?)? {
                        rhs = true;
                        break;
                    }
                }
                let binds = || {
                    vec![
                        shown("m", inst.render(m)),
                        shown("f", render_fn(inst, carrier, &tab, f)),
                        ("y".to_string(), y.clone()),
                    ]
                };
                report.record("MemberBind(=>)", !lhs || rhs, || {
                    Violation::new(
                        "MemberBind(=>)",
                        binds(),
                        format!("{y} ∈ {}", inst.render(&bound)),
                        "no x ∈ m with y ∈ f x".into(),
                    )
                });
                report.record("MemberBind(<=)", !rhs || lhs, || {
                    Violation::new(
                        "MemberBind(<=)",
                        binds(),
                        format!("{y} ∉ {}", inst.render(&bound)),
                        "some x ∈ m has y ∈ f x".into(),
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Checks that `effectEq` is an equivalence on the enumerated computations.
pub fn check_effect_eq_equivalence(
    effect: &Effect,
    carrier: &Carrier,
    bounds: &Bounds,
) -> Result<LawReport> {
    let vals = effect.enumerate(carrier, bounds)?;
    let mut report = LawReport::new(format!(
        "effect equality on {effect} over {}",
        carrier.name()
    ));
    for law in ["Reflexive", "Symmetric", "Transitive"] {
        report.declare(law);
    }
    for a in &vals {
        report.record("Reflexive", effect.eq(a, a)?, || {
            Violation::new(
                "Reflexive",
                vec![shown("m", effect.render(a))],
                effect.render(a),
                effect.render(a),
            )
        });
        for b in &vals {
            let ab = effect.eq(a, b)?;
            report.record("Symmetric", ab == effect.eq(b, a)?, || {
                Violation::new("Symmetric", vec![], effect.render(a), effect.render(b))
            });
            if ab {
                for c in &vals {
                    if effect.eq(b, c)? {
                        report.record("Transitive", effect.eq(a, c)?, || {
                            Violation::new("Transitive", vec![], effect.render(a), effect.render(c))
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
