//! Runtime values and finite carriers.
//!
//! Every law in this crate is quantified over a [`Carrier`]: a named,
//! ordered, duplicate-free list of [`Value`]s. The declaration order is the
//! enumeration order, and all "first witness" results follow it.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{BxError, Result};

/// An opaque element of some finite carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i64),
    Sym(Arc<str>),
    Tuple(Vec<Value>),
    Opt(Option<Box<Value>>),
    List(Vec<Value>),
}

impl Value {
    pub fn sym(name: &str) -> Value {
        Value::Sym(Arc::from(name))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Tuple(vec![a, b])
    }

    pub fn triple(a: Value, b: Value, c: Value) -> Value {
        Value::Tuple(vec![a, b, c])
    }

    pub fn some(v: Value) -> Value {
        Value::Opt(Some(Box::new(v)))
    }

    pub fn none() -> Value {
        Value::Opt(None)
    }

    /// Component `i` of a tuple value.
    pub fn component(&self, i: usize) -> Result<&Value> {
        match self {
            Value::Tuple(items) if i < items.len() => Ok(&items[i]),
            other => Err(BxError::Shape(format!(
                "expected a tuple with at least {} components, got {other}",
                i + 1
            ))),
        }
    }

    /// Splits a pair value into its components.
    pub fn split_pair(&self) -> Result<(&Value, &Value)> {
        match self {
            Value::Tuple(items) if items.len() == 2 => Ok((&items[0], &items[1])),
            other => Err(BxError::Shape(format!("expected a pair, got {other}"))),
        }
    }

    pub fn as_int(&self) -> Result<i64> {
        match self {
            Value::Int(n) => Ok(*n),
            other => Err(BxError::Shape(format!("expected an integer, got {other}"))),
        }
    }

    pub fn as_bool(&self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(BxError::Shape(format!("expected a boolean, got {other}"))),
        }
    }

    pub fn as_option(&self) -> Result<Option<&Value>> {
        match self {
            Value::Opt(o) => Ok(o.as_deref()),
            other => Err(BxError::Shape(format!("expected an option, got {other}"))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Bool(true) => write!(f, "T"),
            Value::Bool(false) => write!(f, "F"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Tuple(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
            Value::Opt(None) => write!(f, "none"),
            Value::Opt(Some(v)) => write!(f, "some({v})"),
            Value::List(items) => {
                write!(f, "[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<()> for Value {
    fn from(_: ()) -> Self {
        Value::Unit
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::sym(s)
    }
}

struct CarrierInner {
    name: String,
    elements: Vec<Value>,
    index: HashMap<Value, usize>,
}

/// A named, enumerable, equality-bearing value domain.
///
/// Cheap to clone; elements are pairwise distinct and kept in declaration
/// order.
#[derive(Clone)]
pub struct Carrier(Arc<CarrierInner>);

impl Carrier {
    pub fn new(name: impl Into<String>, elements: Vec<Value>) -> Result<Carrier> {
        let name = name.into();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(BxError::DuplicateElement {
                    carrier: name,
                    element: e.to_string(),
                });
            }
        }
        Ok(Carrier(Arc::new(CarrierInner {
            name,
            elements,
            index,
        })))
    }

    /// Builds a carrier whose elements are known to be distinct (products,
    /// filters and liftings of existing carriers).
    fn derived(name: String, elements: Vec<Value>) -> Carrier {
        Carrier::new(name, elements).expect("derived carriers have distinct elements")
    }

    pub fn unit() -> Carrier {
        Carrier::derived("()".into(), vec![Value::Unit])
    }

    /// `{F, T}` in that order.
    pub fn bool() -> Carrier {
        Carrier::derived("Bool".into(), vec![Value::Bool(false), Value::Bool(true)])
    }

    pub fn empty(name: impl Into<String>) -> Carrier {
        Carrier::derived(name.into(), Vec::new())
    }

    /// The integers `lo..=hi` in ascending order.
    pub fn int_range(lo: i64, hi: i64) -> Carrier {
        Carrier::derived(format!("[{lo}..{hi}]"), (lo..=hi).map(Value::Int).collect())
    }

    pub fn symbols(name: impl Into<String>, names: &[&str]) -> Result<Carrier> {
        Carrier::new(name, names.iter().map(|n| Value::sym(n)).collect())
    }

    /// Binary product, enumerated lexicographically (left component major).
    pub fn product(a: &Carrier, b: &Carrier) -> Carrier {
        let mut elements = Vec::with_capacity(a.len() * b.len());
        for x in a.elements() {
            for y in b.elements() {
                elements.push(Value::pair(x.clone(), y.clone()));
            }
        }
        Carrier::derived(format!("{}*{}", a.name(), b.name()), elements)
    }

    pub fn product3(a: &Carrier, b: &Carrier, c: &Carrier) -> Carrier {
        let mut elements = Vec::with_capacity(a.len() * b.len() * c.len());
        for x in a.elements() {
            for y in b.elements() {
                for z in c.elements() {
                    elements.push(Value::triple(x.clone(), y.clone(), z.clone()));
                }
            }
        }
        Carrier::derived(format!("{}*{}*{}", a.name(), b.name(), c.name()), elements)
    }

    /// `none` followed by `some(x)` for each element, in order.
    pub fn maybe(c: &Carrier) -> Carrier {
        let mut elements = vec![Value::none()];
        elements.extend(c.elements().iter().cloned().map(Value::some));
        Carrier::derived(format!("Maybe {}", c.name()), elements)
    }

    /// The sub-carrier of elements satisfying `keep`, order preserved.
    pub fn filter(&self, name: impl Into<String>, mut keep: impl FnMut(&Value) -> bool) -> Carrier {
        let elements = self
            .elements()
            .iter()
            .filter(|v| keep(v))
            .cloned()
            .collect();
        Carrier::derived(name.into(), elements)
    }

    /// Like [`Carrier::filter`] with a fallible predicate.
    pub fn try_filter(
        &self,
        name: impl Into<String>,
        mut keep: impl FnMut(&Value) -> Result<bool>,
    ) -> Result<Carrier> {
        let mut elements = Vec::new();
        for v in self.elements() {
            if keep(v)? {
                elements.push(v.clone());
            }
        }
        Ok(Carrier::derived(name.into(), elements))
    }

    pub fn renamed(&self, name: impl Into<String>) -> Carrier {
        Carrier::derived(name.into(), self.elements().to_vec())
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn elements(&self) -> &[Value] {
        &self.0.elements
    }

    pub fn len(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elements.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.0.index.contains_key(v)
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        self.0.index.get(v).copied()
    }

    /// Position of `v`, or an error naming the carrier.
    pub fn position(&self, v: &Value) -> Result<usize> {
        self.index_of(v).ok_or_else(|| BxError::OutsideCarrier {
            carrier: self.name().to_string(),
            value: v.to_string(),
        })
    }

    pub fn check_member(&self, v: &Value) -> Result<()> {
        self.position(v).map(|_| ())
    }

    /// Same elements in the same order; names are ignored.
    pub fn same_elements(&self, other: &Carrier) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.elements() == other.elements()
    }

    /// Errors unless the two carriers have the same elements.
    pub fn expect_same(&self, other: &Carrier, context: &str) -> Result<()> {
        if self.same_elements(other) {
            Ok(())
        } else {
            Err(BxError::CarrierMismatch {
                context: context.to_string(),
                left: self.name().to_string(),
                right: other.name().to_string(),
            })
        }
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        self.same_elements(other)
    }
}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Carrier({} {{", self.name())?;
        for e in self.elements() {
            write!(f, " {e}")?;
        }
        write!(f, " }})")
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}
