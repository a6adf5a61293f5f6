//! Monadic lenses (pure `mget`, effectful `mput`/`mcreate`), together with
//! two weaker variants kept apart on purpose: naive lenses whose `mget` is
//! effectful too, and put-lenses whose laws are stated with membership.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::effects::{odometer, record_effect_eq, Bounds, Effect, EffectValue, Monoid};
use crate::error::{BxError, Result};
use crate::lens::{PureLens, ValueFn};
use crate::report::{LawReport, Violation};
use crate::value::{Carrier, Value};

pub type EffectFn = Arc<dyn Fn(&Value) -> Result<EffectValue> + Send + Sync>;
pub type EffectFn2 = Arc<dyn Fn(&Value, &Value) -> Result<EffectValue> + Send + Sync>;

/// A monadic lens from `source` to `view` in `effect`.
#[derive(Clone)]
pub struct MLens {
    name: String,
    effect: Effect,
    source: Carrier,
    view: Carrier,
    mget: ValueFn,
    mput: EffectFn2,
    mcreate: EffectFn,
}

impl MLens {
    pub fn new(
        name: impl Into<String>,
        effect: Effect,
        source: Carrier,
        view: Carrier,
        mget: impl Fn(&Value) -> Result<Value> + Send + Sync + 'static,
        mput: impl Fn(&Value, &Value) -> Result<EffectValue> + Send + Sync + 'static,
        mcreate: impl Fn(&Value) -> Result<EffectValue> + Send + Sync + 'static,
    ) -> MLens {
        MLens {
            name: name.into(),
            effect,
            source,
            view,
            mget: Arc::new(mget),
            mput: Arc::new(mput),
            mcreate: Arc::new(mcreate),
        }
    }

    /// Builds a lens from explicit tables: `get[a]`, `put[a][b]`, `create[b]`.
    pub fn from_tables(
        name: impl Into<String>,
        effect: Effect,
        source: Carrier,
        view: Carrier,
        get: Vec<Value>,
        put: Vec<Vec<EffectValue>>,
        create: Vec<EffectValue>,
    ) -> Result<MLens> {
        let name = name.into();
        if get.len() != source.len()
            || put.len() != source.len()
            || put.iter().any(|row| row.len() != view.len())
            || create.len() != view.len()
        {
            return Err(BxError::Shape(format!(
                "tables of {name} do not fit the carriers"
            )));
        }
        for b in &get {
            view.check_member(b)?;
        }
        for m in put.iter().flatten().chain(create.iter()) {
            effect.check_results(m, &source)?;
        }
        let (get, put, create) = (Arc::new(get), Arc::new(put), Arc::new(create));
        let (s1, s2, v2, v3) = (source.clone(), source.clone(), view.clone(), view.clone());
        Ok(MLens::new(
            name,
            effect,
            source,
            view,
            move |a| Ok(get[s1.position(a)?].clone()),
            move |a, b| Ok(put[s2.position(a)?][v2.position(b)?].clone()),
            move |b| Ok(create[v3.position(b)?].clone()),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> MLens {
        self.name = name.into();
        self
    }

    pub fn effect(&self) -> &Effect {
        &self.effect
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn view(&self) -> &Carrier {
        &self.view
    }

    pub fn mget(&self, a: &Value) -> Result<Value> {
        self.source.check_member(a)?;
        let b = (self.mget)(a)?;
        self.view.check_member(&b)?;
        Ok(b)
    }

    pub fn mput(&self, a: &Value, b: &Value) -> Result<EffectValue> {
        self.source.check_member(a)?;
        self.view.check_member(b)?;
        let m = (self.mput)(a, b)?;
        self.effect.check_results(&m, &self.source)?;
        Ok(m)
    }

    pub fn mcreate(&self, b: &Value) -> Result<EffectValue> {
        self.view.check_member(b)?;
        let m = (self.mcreate)(b)?;
        self.effect.check_results(&m, &self.source)?;
        Ok(m)
    }

    /// The same operations, declared over a different source carrier (used
    /// to view a leg over a state subset or its wider representation).
    pub fn with_source(&self, source: Carrier) -> MLens {
        let mut l = self.clone();
        l.source = source;
        l
    }

    /// `get`, `put` and `create` tables in the lens-file syntax.
    pub fn render_tables(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "mlens {} : {} ~> {} [{}]",
            self.name,
            self.source.name(),
            self.view.name(),
            self.effect
        );
        for a in self.source.elements() {
            let _ = writeln!(out, "  get {a} = {}", self.mget(a)?);
        }
        for a in self.source.elements() {
            for b in self.view.elements() {
                let _ = writeln!(
                    out,
                    "  put {a} {b} = {}",
                    self.effect.render(&self.mput(a, b)?)
                );
            }
        }
        for b in self.view.elements() {
            let _ = writeln!(
                out,
                "  create {b} = {}",
                self.effect.render(&self.mcreate(b)?)
            );
        }
        Ok(out)
    }
}

impl fmt::Debug for MLens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MLens({} : {} ~> {} [{}])",
            self.name,
            self.source.name(),
            self.view.name(),
            self.effect
        )
    }
}

/// Lifts a pure lens: `mput a b = return (put a b)`, likewise `mcreate`.
pub fn lens2mlens(effect: &Effect, l: &PureLens) -> MLens {
    let (e1, e2) = (effect.clone(), effect.clone());
    let (g, p, c) = (l.clone(), l.clone(), l.clone());
    MLens::new(
        format!("lift {}", l.name()),
        effect.clone(),
        l.source().clone(),
        l.view().clone(),
        move |a| g.get(a),
        move |a, b| Ok(e1.ret(p.put(a, b)?)),
        move |b| Ok(e2.ret(c.create(b)?)),
    )
}

/// Reads an identity-effect monadic lens back as a pure lens.
pub fn mlens_to_pure(l: &MLens) -> Result<PureLens> {
    if !l.effect.is_identity() {
        return Err(BxError::NonPureInput(format!(
            "{} runs in {}",
            l.name, l.effect
        )));
    }
    let unwrap = |m: EffectValue| match m {
        EffectValue::Identity(v) => Ok(v),
        other => Err(BxError::TagMismatch {
            expected: "identity".into(),
            found: format!("{other:?}"),
        }),
    };
    let (g, p, c) = (l.clone(), l.clone(), l.clone());
    Ok(PureLens::new(
        l.name.clone(),
        l.source.clone(),
        l.view.clone(),
        move |a| g.mget(a),
        move |a, b| unwrap(p.mput(a, b)?),
        move |b| unwrap(c.mcreate(b)?),
    ))
}

/// `l1 ; l2` for monadic lenses.
pub fn compose_m(l1: &MLens, l2: &MLens) -> Result<MLens> {
    l1.effect
        .expect_same(&l2.effect, "monadic lens composition")?;
    l1.view
        .expect_same(&l2.source, "monadic lens composition")?;
    let (g1, g2) = (l1.clone(), l2.clone());
    let (p1, p2) = (l1.clone(), l2.clone());
    let (c1, c2) = (l1.clone(), l2.clone());
    Ok(MLens::new(
        format!("({} ; {})", l1.name, l2.name),
        l1.effect.clone(),
        l1.source.clone(),
        l2.view.clone(),
        move |a| g2.mget(&g1.mget(a)?),
        move |a, c| {
            let inner = p2.mput(&p1.mget(a)?, c)?;
            p1.effect.bind(&inner, &mut |b| p1.mput(a, b))
        },
        move |c| {
            let inner = c2.mcreate(c)?;
            c1.effect.bind(&inner, &mut |b| c1.mcreate(b))
        },
    ))
}

/// A lens onto a constant view `b` (Maybe effect): any put that changes the
/// view fails. `mcreate` succeeds only on `b`, producing `default`.
pub fn const_mlens(source: &Carrier, view: &Carrier, b: Value, default: Value) -> Result<MLens> {
    view.check_member(&b)?;
    source.check_member(&default)?;
    let (b1, b2) = (b.clone(), b.clone());
    Ok(MLens::new(
        format!("const {b}"),
        Effect::Maybe,
        source.clone(),
        view.clone(),
        move |_| Ok(b.clone()),
        move |a, b_new| {
            Ok(EffectValue::Maybe(if *b_new == b1 {
                Some(a.clone())
            } else {
                None
            }))
        },
        move |b_new| {
            Ok(EffectValue::Maybe(if *b_new == b2 {
                Some(default.clone())
            } else {
                None
            }))
        },
    ))
}

/// Absolute value from `[-n, n]` to `[0, n]` (Maybe effect). Putting a
/// negative view fails; otherwise the source's sign is kept.
pub fn abs_lens(n: i64) -> Result<MLens> {
    if n < 0 {
        return Err(BxError::InvalidParameter(format!(
            "abs lens bound {n} is negative"
        )));
    }
    Ok(abs_lens_over(
        Carrier::int_range(-n, n),
        Carrier::int_range(0, n),
    ))
}

/// Absolute value over caller-supplied integer carriers; the view carrier
/// may include negative numbers, on which `mput` and `mcreate` fail.
pub fn abs_lens_over(source: Carrier, view: Carrier) -> MLens {
    MLens::new(
        "abs",
        Effect::Maybe,
        source,
        view,
        |a| Ok(Value::Int(a.as_int()?.abs())),
        |a, b| {
            let (a, b) = (a.as_int()?, b.as_int()?);
            Ok(EffectValue::Maybe(if b < 0 {
                None
            } else if a < 0 {
                Some(Value::Int(-b))
            } else {
                Some(Value::Int(b))
            }))
        },
        |b| {
            let b = b.as_int()?;
            Ok(EffectValue::Maybe(if b < 0 {
                None
            } else {
                Some(Value::Int(b))
            }))
        },
    )
}

/// Wraps a pure lens so that every put which changes the source logs the
/// old source (Writer over lists of sources).
pub fn log_lens(l: &PureLens) -> MLens {
    let effect = Effect::Writer(Monoid::FreeList(l.source().clone()));
    let (g, p, c) = (l.clone(), l.clone(), l.clone());
    let (e1, e2) = (effect.clone(), effect.clone());
    MLens::new(
        format!("log {}", l.name()),
        effect,
        l.source().clone(),
        l.view().clone(),
        move |a| g.get(a),
        move |a, b| {
            let a2 = p.put(a, b)?;
            let log = if *a != a2 {
                vec![a.clone()]
            } else {
                Vec::new()
            };
            let tell = e1.tell(Value::List(log))?;
            e1.bind(&tell, &mut |_| Ok(e1.ret(a2.clone())))
        },
        move |b| Ok(e2.ret(c.create(b)?)),
    )
}

fn pair_ret(effect: &Effect, a: &Value, b: Value) -> EffectValue {
    effect.ret(Value::pair(a.clone(), b))
}

/// MGetPut, and MPutGet / MCreateGet at the pair-returning continuation.
pub fn check_mlens_laws(l: &MLens) -> Result<LawReport> {
    check_mlens_laws_on(l, l.source.elements())
}

/// As [`check_mlens_laws`], quantifying sources over `sources` only.
pub fn check_mlens_laws_on(l: &MLens, sources: &[Value]) -> Result<LawReport> {
    let e = &l.effect;
    let mut report = LawReport::new(format!("monadic lens {} [{}]", l.name, e));
    for law in ["MGetPut", "MPutGet", "MCreateGet"] {
        report.declare(law);
    }
    for a in sources {
        let lhs = l.mput(a, &l.mget(a)?)?;
        let rhs = e.ret(a.clone());
        record_effect_eq(&mut report, e, "MGetPut", &lhs, &rhs, || {
            vec![("a".into(), a.clone())]
        })?;
    }
    for a in sources {
        for b in l.view.elements() {
            let m = l.mput(a, b)?;
            let lhs = e.bind(&m, &mut |a2| Ok(pair_ret(e, a2, l.mget(a2)?)))?;
            let rhs = e.bind(&m, &mut |a2| Ok(pair_ret(e, a2, b.clone())))?;
            record_effect_eq(&mut report, e, "MPutGet", &lhs, &rhs, || {
                vec![("a".into(), a.clone()), ("b".into(), b.clone())]
            })?;
        }
    }
    for b in l.view.elements() {
        let m = l.mcreate(b)?;
        let lhs = e.bind(&m, &mut |a| Ok(pair_ret(e, a, l.mget(a)?)))?;
        let rhs = e.bind(&m, &mut |a| Ok(pair_ret(e, a, b.clone())))?;
        record_effect_eq(&mut report, e, "MCreateGet", &lhs, &rhs, || {
            vec![("b".into(), b.clone())]
        })?;
    }
    Ok(report)
}

/// The first point where two monadic lenses disagree, if any.
pub fn mlens_difference(l1: &MLens, l2: &MLens) -> Result<Option<String>> {
    l1.effect
        .expect_same(&l2.effect, "monadic lens comparison")?;
    l1.source
        .expect_same(&l2.source, "monadic lens comparison (source)")?;
    l1.view
        .expect_same(&l2.view, "monadic lens comparison (view)")?;
    let e = &l1.effect;
    for a in l1.source.elements() {
        let (x, y) = (l1.mget(a)?, l2.mget(a)?);
        if x != y {
            return Ok(Some(format!("mget {a}: {x} vs {y}")));
        }
        for b in l1.view.elements() {
            let (x, y) = (l1.mput(a, b)?, l2.mput(a, b)?);
            if !e.eq(&x, &y)? {
                return Ok(Some(format!(
                    "mput {a} {b}: {} vs {}",
                    e.render(&x),
                    e.render(&y)
                )));
            }
        }
    }
    for b in l1.view.elements() {
        let (x, y) = (l1.mcreate(b)?, l2.mcreate(b)?);
        if !e.eq(&x, &y)? {
            return Ok(Some(format!(
                "mcreate {b}: {} vs {}",
                e.render(&x),
                e.render(&y)
            )));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Naive monadic lenses (effectful get)
// ---------------------------------------------------------------------------

/// A lens whose `mget` may also have effects. Its laws are weaker and its
/// composition does not preserve them.
#[derive(Clone)]
pub struct NaiveMLens {
    name: String,
    effect: Effect,
    source: Carrier,
    view: Carrier,
    mget: EffectFn,
    mput: EffectFn2,
}

impl NaiveMLens {
    pub fn new(
        name: impl Into<String>,
        effect: Effect,
        source: Carrier,
        view: Carrier,
        mget: impl Fn(&Value) -> Result<EffectValue> + Send + Sync + 'static,
        mput: impl Fn(&Value, &Value) -> Result<EffectValue> + Send + Sync + 'static,
    ) -> NaiveMLens {
        NaiveMLens {
            name: name.into(),
            effect,
            source,
            view,
            mget: Arc::new(mget),
            mput: Arc::new(mput),
        }
    }

    pub fn from_tables(
        name: impl Into<String>,
        effect: Effect,
        source: Carrier,
        view: Carrier,
        get: Vec<EffectValue>,
        put: Vec<Vec<EffectValue>>,
    ) -> Result<NaiveMLens> {
        let name = name.into();
        if get.len() != source.len()
            || put.len() != source.len()
            || put.iter().any(|row| row.len() != view.len())
        {
            return Err(BxError::Shape(format!(
                "tables of {name} do not fit the carriers"
            )));
        }
        for m in &get {
            effect.check_results(m, &view)?;
        }
        for m in put.iter().flatten() {
            effect.check_results(m, &source)?;
        }
        let (get, put) = (Arc::new(get), Arc::new(put));
        let (s1, s2, v2) = (source.clone(), source.clone(), view.clone());
        Ok(NaiveMLens::new(
            name,
            effect,
            source,
            view,
            move |a| Ok(get[s1.position(a)?].clone()),
            move |a, b| Ok(put[s2.position(a)?][v2.position(b)?].clone()),
        ))
    }

    /// Views a monadic lens as a naive one (`mget` returns purely).
    pub fn from_mlens(l: &MLens) -> NaiveMLens {
        let (g, p) = (l.clone(), l.clone());
        NaiveMLens::new(
            l.name.clone(),
            l.effect.clone(),
            l.source.clone(),
            l.view.clone(),
            move |a| Ok(g.effect.ret(g.mget(a)?)),
            move |a, b| p.mput(a, b),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn effect(&self) -> &Effect {
        &self.effect
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn view(&self) -> &Carrier {
        &self.view
    }

    pub fn mget(&self, a: &Value) -> Result<EffectValue> {
        self.source.check_member(a)?;
        let m = (self.mget)(a)?;
        self.effect.check_results(&m, &self.view)?;
        Ok(m)
    }

    pub fn mput(&self, a: &Value, b: &Value) -> Result<EffectValue> {
        self.source.check_member(a)?;
        self.view.check_member(b)?;
        let m = (self.mput)(a, b)?;
        self.effect.check_results(&m, &self.source)?;
        Ok(m)
    }

    pub fn render_tables(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "naive lens {} : {} ~> {} [{}]",
            self.name,
            self.source.name(),
            self.view.name(),
            self.effect
        );
        for a in self.source.elements() {
            let _ = writeln!(out, "  get {a} = {}", self.effect.describe(&self.mget(a)?));
        }
        for a in self.source.elements() {
            for b in self.view.elements() {
                let _ = writeln!(
                    out,
                    "  put {a} {b} = {}",
                    self.effect.describe(&self.mput(a, b)?)
                );
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for NaiveMLens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NaiveMLens({} : {} ~> {} [{}])",
            self.name,
            self.source.name(),
            self.view.name(),
            self.effect
        )
    }
}

/// Sequential composition: run both gets, put through the second lens, then
/// put the result back through the first.
pub fn compose_naive(l1: &NaiveMLens, l2: &NaiveMLens) -> Result<NaiveMLens> {
    l1.effect
        .expect_same(&l2.effect, "naive lens composition")?;
    l1.view.expect_same(&l2.source, "naive lens composition")?;
    let (g1, g2) = (l1.clone(), l2.clone());
    let (p1, p2) = (l1.clone(), l2.clone());
    Ok(NaiveMLens::new(
        format!("({} ; {})", l1.name, l2.name),
        l1.effect.clone(),
        l1.source.clone(),
        l2.view.clone(),
        move |a| {
            let e = &g1.effect;
            e.bind(&g1.mget(a)?, &mut |b| g2.mget(b))
        },
        move |a, c| {
            let e = &p1.effect;
            e.bind(&p1.mget(a)?, &mut |b| {
                e.bind(&p2.mput(b, c)?, &mut |b2| p1.mput(a, b2))
            })
        },
    ))
}

/// MGetPut₀ and MPutGet₀.
pub fn check_naive_laws(l: &NaiveMLens) -> Result<LawReport> {
    let e = &l.effect;
    let mut report = LawReport::new(format!("naive lens {} [{}]", l.name, e));
    report.declare("MGetPut0");
    report.declare("MPutGet0");
    for a in l.source.elements() {
        let (lhs, rhs) = naive_get_put(l, a)?;
        record_effect_eq(&mut report, e, "MGetPut0", &lhs, &rhs, || {
            vec![("a".into(), a.clone())]
        })?;
    }
    for a in l.source.elements() {
        for b in l.view.elements() {
            let (lhs, rhs) = naive_put_get(l, a, b)?;
            record_effect_eq(&mut report, e, "MPutGet0", &lhs, &rhs, || {
                vec![("a".into(), a.clone()), ("b".into(), b.clone())]
            })?;
        }
    }
    Ok(report)
}

fn naive_get_put(l: &NaiveMLens, a: &Value) -> Result<(EffectValue, EffectValue)> {
    let e = &l.effect;
    let lhs = e.bind(&l.mget(a)?, &mut |b| l.mput(a, b))?;
    Ok((lhs, e.ret(a.clone())))
}

fn naive_put_get(l: &NaiveMLens, a: &Value, b: &Value) -> Result<(EffectValue, EffectValue)> {
    let e = &l.effect;
    let m = l.mput(a, b)?;
    let lhs = e.bind(&m, &mut |a2| l.mget(a2))?;
    let rhs = e.bind(&m, &mut |_| Ok(e.ret(b.clone())))?;
    Ok((lhs, rhs))
}

/// Two individually lawful naive lenses whose composite breaks a law.
#[derive(Debug, Clone)]
pub struct NaiveCounterexample {
    pub first: NaiveMLens,
    pub second: NaiveMLens,
    pub composite: NaiveMLens,
    pub violation: Violation,
}

impl NaiveCounterexample {
    /// Re-evaluates the violated law at the recorded bindings.
    pub fn reverify(&self) -> Result<bool> {
        let e = &self.composite.effect;
        let a = self
            .violation
            .binding("a")
            .ok_or_else(|| BxError::InvalidWitness("violation lacks binding a".into()))?;
        let (lhs, rhs) = match self.violation.law.as_str() {
            "MGetPut0" => naive_get_put(&self.composite, a)?,
            "MPutGet0" => {
                let b = self
                    .violation
                    .binding("b")
                    .ok_or_else(|| BxError::InvalidWitness("violation lacks binding b".into()))?;
                naive_put_get(&self.composite, a, b)?
            }
            other => return Err(BxError::InvalidWitness(format!("unknown law {other}"))),
        };
        Ok(!e.eq(&lhs, &rhs)?
            && e.render(&lhs) == self.violation.lhs
            && e.render(&rhs) == self.violation.rhs)
    }
}

#[derive(Debug, Clone)]
pub enum NaiveSearch {
    Found(Box<NaiveCounterexample>),
    NotFound { pairs_examined: u64 },
}

/// Work counter for bounded searches; every candidate evaluation costs one.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    spent: u64,
    what: String,
}

impl Budget {
    pub fn new(what: impl Into<String>, limit: u64) -> Budget {
        Budget {
            limit,
            spent: 0,
            what: what.into(),
        }
    }

    pub fn spend(&mut self, n: u64) -> Result<()> {
        self.spent = self.spent.saturating_add(n);
        if self.spent > self.limit {
            Err(BxError::bound(
                self.what.clone(),
                self.spent as u128,
                self.limit as u128,
            ))
        } else {
            Ok(())
        }
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }
}

/// Default work budget for [`search_naive_counterexample`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 5_000_000;

fn indexed_carrier(prefix: &str, n: usize) -> Carrier {
    let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Carrier::symbols(format!("{}{n}", prefix.to_uppercase()), &refs).expect("distinct names")
}

/// Every lawful naive lens over `effect` from `source` to `view`, in
/// enumeration order (get table first, then put rows).
pub fn lawful_naive_lenses(
    effect: &Effect,
    source: &Carrier,
    view: &Carrier,
    bounds: &Bounds,
    budget: &mut Budget,
) -> Result<Vec<NaiveMLens>> {
    let gets = effect.enumerate(view, bounds)?;
    let puts = effect.enumerate(source, bounds)?;
    let mut out = Vec::new();
    for get_choice in odometer(gets.len(), source.len()) {
        let get: Vec<EffectValue> = get_choice.iter().map(|&i| gets[i].clone()).collect();
        // MPutGet₀ constrains each put cell on its own.
        let mut cell_ok: Vec<Vec<Vec<usize>>> = Vec::with_capacity(source.len());
        for _a in source.elements() {
            let mut row = Vec::with_capacity(view.len());
            for b in view.elements() {
                let mut ok = Vec::new();
                for (k, m) in puts.iter().enumerate() {
                    budget.spend(1)?;
                    let lhs = effect.bind(m, &mut |a2| Ok(get[source.position(a2)?].clone()))?;
                    let rhs = effect.bind(m, &mut |_| Ok(effect.ret(b.clone())))?;
                    if lhs == rhs {
                        ok.push(k);
                    }
                }
                row.push(ok);
            }
            cell_ok.push(row);
        }
        // MGetPut₀ constrains each put row.
        let mut rows_ok: Vec<Vec<Vec<usize>>> = Vec::with_capacity(source.len());
        for (ai, a) in source.elements().iter().enumerate() {
            let radices: Vec<usize> = cell_ok[ai].iter().map(Vec::len).collect();
            let mut good = Vec::new();
            for pick in mixed_odometer(&radices) {
                budget.spend(1)?;
                let row: Vec<usize> = pick
                    .iter()
                    .enumerate()
                    .map(|(bi, &j)| cell_ok[ai][bi][j])
                    .collect();
                let lhs =
                    effect.bind(&get[ai], &mut |b| Ok(puts[row[view.position(b)?]].clone()))?;
                if lhs == effect.ret(a.clone()) {
                    good.push(row);
                }
            }
            if good.is_empty() {
                break;
            }
            rows_ok.push(good);
        }
        if rows_ok.len() < source.len() {
            continue;
        }
        let radices: Vec<usize> = rows_ok.iter().map(Vec::len).collect();
        for pick in mixed_odometer(&radices) {
            budget.spend(1)?;
            let put: Vec<Vec<EffectValue>> = pick
                .iter()
                .enumerate()
                .map(|(ai, &r)| rows_ok[ai][r].iter().map(|&k| puts[k].clone()).collect())
                .collect();
            let name = format!("n{}", out.len());
            out.push(NaiveMLens::from_tables(
                name,
                effect.clone(),
                source.clone(),
                view.clone(),
                get.clone(),
                put,
            )?);
        }
    }
    Ok(out)
}

/// All vectors `v` with `v[i] < radices[i]`, last position fastest.
pub(crate) fn mixed_odometer(radices: &[usize]) -> Vec<Vec<usize>> {
    if radices.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0; radices.len()];
    loop {
        out.push(cur.clone());
        let mut i = radices.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < radices[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Searches pairs of lawful naive lenses `A ~> B`, `B ~> C` with
/// `|A| <= max_source` and `|B|, |C| <= max_view`, smallest carriers first,
/// for one whose composite violates MGetPut₀ or MPutGet₀.
pub fn search_naive_counterexample(
    effect: &Effect,
    max_source: usize,
    max_view: usize,
    budget: u64,
) -> Result<NaiveSearch> {
    let mut budget = Budget::new("naive composition search", budget);
    budget.spend(1)?;
    let bounds = Bounds::default();
    let mut examined = 0;
    for na in 1..=max_source {
        for nb in 1..=max_view {
            for nc in 1..=max_view {
                let (ca, cb, cc) = (
                    indexed_carrier("a", na),
                    indexed_carrier("b", nb),
                    indexed_carrier("c", nc),
                );
                let firsts = lawful_naive_lenses(effect, &ca, &cb, &bounds, &mut budget)?;
                if firsts.is_empty() {
                    continue;
                }
                let seconds = lawful_naive_lenses(effect, &cb, &cc, &bounds, &mut budget)?;
                for l1 in &firsts {
                    for l2 in &seconds {
                        budget.spend(1)?;
                        examined += 1;
                        let composite = compose_naive(l1, l2)?;
                        let report = check_naive_laws(&composite)?;
                        if let Some(v) = report.first_violation() {
                            return Ok(NaiveSearch::Found(Box::new(NaiveCounterexample {
                                first: l1.clone(),
                                second: l2.clone(),
                                composite,
                                violation: v.clone(),
                            })));
                        }
                    }
                }
            }
        }
    }
    Ok(NaiveSearch::NotFound {
        pairs_examined: examined,
    })
}

// ---------------------------------------------------------------------------
// Put-lenses (laws via membership)
// ---------------------------------------------------------------------------

/// A lens with pure `mget` whose laws are stated with monad membership;
/// restricted to effects where membership is defined.
#[derive(Clone)]
pub struct PutLens {
    name: String,
    effect: Effect,
    source: Carrier,
    view: Carrier,
    mget: ValueFn,
    mput: EffectFn2,
}

impl PutLens {
    pub fn new(
        name: impl Into<String>,
        effect: Effect,
        source: Carrier,
        view: Carrier,
        mget: impl Fn(&Value) -> Result<Value> + Send + Sync + 'static,
        mput: impl Fn(&Value, &Value) -> Result<EffectValue> + Send + Sync + 'static,
    ) -> Result<PutLens> {
        if !effect.supports_membership() {
            return Err(BxError::UnsupportedMembership(effect.to_string()));
        }
        Ok(PutLens {
            name: name.into(),
            effect,
            source,
            view,
            mget: Arc::new(mget),
            mput: Arc::new(mput),
        })
    }

    /// Forgets `mcreate`.
    pub fn from_mlens(l: &MLens) -> Result<PutLens> {
        let (g, p) = (l.clone(), l.clone());
        PutLens::new(
            l.name.clone(),
            l.effect.clone(),
            l.source.clone(),
            l.view.clone(),
            move |a| g.mget(a),
            move |a, b| p.mput(a, b),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mget(&self, a: &Value) -> Result<Value> {
        self.source.check_member(a)?;
        let b = (self.mget)(a)?;
        self.view.check_member(&b)?;
        Ok(b)
    }

    pub fn mput(&self, a: &Value, b: &Value) -> Result<EffectValue> {
        self.source.check_member(a)?;
        self.view.check_member(b)?;
        let m = (self.mput)(a, b)?;
        self.effect.check_results(&m, &self.source)?;
        Ok(m)
    }
}

impl fmt::Debug for PutLens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PutLens({} [{}])", self.name, self.effect)
    }
}

/// MGetPut₁ (`v = mget s` implies `mput s v = return s`) and MPutGet₁
/// (`s' ∈ mput s v` implies `v = mget s'`).
pub fn check_put_lens_laws(l: &PutLens) -> Result<LawReport> {
    let e = &l.effect;
    let mut report = LawReport::new(format!("put-lens {} [{}]", l.name, e));
    report.declare("MGetPut1");
    report.declare("MPutGet1");
    for s in l.source.elements() {
        for v in l.view.elements() {
            if *v != l.mget(s)? {
                continue;
            }
            let lhs = l.mput(s, v)?;
            let rhs = e.ret(s.clone());
            record_effect_eq(&mut report, e, "MGetPut1", &lhs, &rhs, || {
                vec![("s".into(), s.clone()), ("v".into(), v.clone())]
            })?;
        }
    }
    for s in l.source.elements() {
        for v in l.view.elements() {
            let m = l.mput(s, v)?;
            for s2 in l.source.elements() {
                if !e.member(s2, &m)? {
                    continue;
                }
                let got = l.mget(s2)?;
                report.record("MPutGet1", got == *v, || {
                    Violation::new(
                        "MPutGet1",
                        vec![
                            ("s".into(), s.clone()),
                            ("v".into(), v.clone()),
                            ("s'".into(), s2.clone()),
                        ],
                        format!("mget {s2} = {got}"),
                        v.to_string(),
                    )
                });
            }
        }
    }
    Ok(report)
}
