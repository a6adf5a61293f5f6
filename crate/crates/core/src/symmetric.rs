//! Symmetric lenses (pure and monadic) with a complement threaded through
//! both directions, their composition, and complement-relating equivalence.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::effects::{record_effect_eq, Effect, EffectValue};
use crate::error::{BxError, Result};
use crate::report::{LawReport, Violation};
use crate::value::{Carrier, Value};

pub type PairFn = Arc<dyn Fn(&Value, &Value) -> Result<(Value, Value)> + Send + Sync>;
pub type EffectPairFn = Arc<dyn Fn(&Value, &Value) -> Result<EffectValue> + Send + Sync>;

/// A pure symmetric lens between `left` and `right` with complement carrier
/// `complement`.
#[derive(Clone)]
pub struct SLens {
    name: String,
    left: Carrier,
    right: Carrier,
    complement: Carrier,
    put_r: PairFn,
    put_l: PairFn,
    missing: Value,
}

impl SLens {
    pub fn new(
        name: impl Into<String>,
        left: Carrier,
        right: Carrier,
        complement: Carrier,
        put_r: impl Fn(&Value, &Value) -> Result<(Value, Value)> + Send + Sync + 'static,
        put_l: impl Fn(&Value, &Value) -> Result<(Value, Value)> + Send + Sync + 'static,
        missing: Value,
    ) -> Result<SLens> {
        complement.check_member(&missing)?;
        Ok(SLens {
            name: name.into(),
            left,
            right,
            complement,
            put_r: Arc::new(put_r),
            put_l: Arc::new(put_l),
            missing,
        })
    }

    /// From tables indexed by `[x][c]`, holding `(output, complement)`.
    pub fn from_tables(
        name: impl Into<String>,
        left: Carrier,
        right: Carrier,
        complement: Carrier,
        put_r: Vec<Vec<(Value, Value)>>,
        put_l: Vec<Vec<(Value, Value)>>,
        missing: Value,
    ) -> Result<SLens> {
        let name = name.into();
        let fits = |t: &Vec<Vec<(Value, Value)>>, rows: usize| {
            t.len() == rows && t.iter().all(|r| r.len() == complement.len())
        };
        if !fits(&put_r, left.len()) || !fits(&put_l, right.len()) {
            return Err(BxError::Shape(format!(
                "tables of {name} do not fit the carriers"
            )));
        }
        let (put_r, put_l) = (Arc::new(put_r), Arc::new(put_l));
        let (a1, c1, b2, c2) = (
            left.clone(),
            complement.clone(),
            right.clone(),
            complement.clone(),
        );
        SLens::new(
            name,
            left,
            right,
            complement,
            move |a, c| Ok(put_r[a1.position(a)?][c1.position(c)?].clone()),
            move |b, c| Ok(put_l[b2.position(b)?][c2.position(c)?].clone()),
            missing,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> SLens {
        self.name = name.into();
        self
    }

    pub fn left(&self) -> &Carrier {
        &self.left
    }

    pub fn right(&self) -> &Carrier {
        &self.right
    }

    pub fn complement(&self) -> &Carrier {
        &self.complement
    }

    pub fn missing(&self) -> &Value {
        &self.missing
    }

    pub fn put_r(&self, a: &Value, c: &Value) -> Result<(Value, Value)> {
        self.left.check_member(a)?;
        self.complement.check_member(c)?;
        let (b, c2) = (self.put_r)(a, c)?;
        self.right.check_member(&b)?;
        self.complement.check_member(&c2)?;
        Ok((b, c2))
    }

    pub fn put_l(&self, b: &Value, c: &Value) -> Result<(Value, Value)> {
        self.right.check_member(b)?;
        self.complement.check_member(c)?;
        let (a, c2) = (self.put_l)(b, c)?;
        self.left.check_member(&a)?;
        self.complement.check_member(&c2)?;
        Ok((a, c2))
    }
}

impl fmt::Debug for SLens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SLens({} : {} <-> {} with {})",
            self.name,
            self.left.name(),
            self.right.name(),
            self.complement.name()
        )
    }
}

/// `sl1 ; sl2`, threading the paired complement.
pub fn compose_s(sl1: &SLens, sl2: &SLens) -> Result<SLens> {
    sl1.right
        .expect_same(&sl2.left, "symmetric lens composition")?;
    let (r1, r2) = (sl1.clone(), sl2.clone());
    let (l1, l2) = (sl1.clone(), sl2.clone());
    SLens::new(
        format!("({} ; {})", sl1.name, sl2.name),
        sl1.left.clone(),
        sl2.right.clone(),
        Carrier::product(&sl1.complement, &sl2.complement),
        move |a, c| {
            let (c1, c2) = c.split_pair()?;
            let (b, c1n) = r1.put_r(a, c1)?;
            let (z, c2n) = r2.put_r(&b, c2)?;
            Ok((z, Value::pair(c1n, c2n)))
        },
        move |z, c| {
            let (c1, c2) = c.split_pair()?;
            let (b, c2n) = l2.put_l(z, c2)?;
            let (a, c1n) = l1.put_l(&b, c1)?;
            Ok((a, Value::pair(c1n, c2n)))
        },
        Value::pair(sl1.missing.clone(), sl2.missing.clone()),
    )
}

/// Identity symmetric lens with unit complement.
pub fn id_slens(c: &Carrier) -> SLens {
    SLens::new(
        format!("id_sl {}", c.name()),
        c.clone(),
        c.clone(),
        Carrier::unit(),
        |a, u| Ok((a.clone(), u.clone())),
        |b, u| Ok((b.clone(), u.clone())),
        Value::Unit,
    )
    .expect("unit complement")
}

/// PutRL and PutLR over every value/complement pair.
pub fn check_slens_laws(sl: &SLens) -> Result<LawReport> {
    let mut report = LawReport::new(format!("symmetric lens {}", sl.name));
    report.declare("PutRL");
    report.declare("PutLR");
    for a in sl.left.elements() {
        for c in sl.complement.elements() {
            let (b, c2) = sl.put_r(a, c)?;
            let back = sl.put_l(&b, &c2)?;
            let want = (a.clone(), c2.clone());
            report.record("PutRL", back == want, || {
                Violation::new(
                    "PutRL",
                    vec![("a".into(), a.clone()), ("c".into(), c.clone())],
                    Value::pair(back.0.clone(), back.1.clone()).to_string(),
                    Value::pair(want.0.clone(), want.1.clone()).to_string(),
                )
            });
        }
    }
    for b in sl.right.elements() {
        for c in sl.complement.elements() {
            let (a, c2) = sl.put_l(b, c)?;
            let back = sl.put_r(&a, &c2)?;
            let want = (b.clone(), c2.clone());
            report.record("PutLR", back == want, || {
                Violation::new(
                    "PutLR",
                    vec![("b".into(), b.clone()), ("c".into(), c.clone())],
                    Value::pair(back.0.clone(), back.1.clone()).to_string(),
                    Value::pair(want.0.clone(), want.1.clone()).to_string(),
                )
            });
        }
    }
    Ok(report)
}

/// The first point where two symmetric lenses over the same carriers differ.
pub fn slens_difference(sl1: &SLens, sl2: &SLens) -> Result<Option<String>> {
    sl1.complement
        .expect_same(&sl2.complement, "symmetric lens comparison")?;
    if sl1.missing != sl2.missing {
        return Ok(Some(format!("missing: {} vs {}", sl1.missing, sl2.missing)));
    }
    for a in sl1.left.elements() {
        for c in sl1.complement.elements() {
            let (x, y) = (sl1.put_r(a, c)?, sl2.put_r(a, c)?);
            if x != y {
                return Ok(Some(format!("putR ({a}, {c}): {x:?} vs {y:?}")));
            }
        }
    }
    for b in sl1.right.elements() {
        for c in sl1.complement.elements() {
            let (x, y) = (sl1.put_l(b, c)?, sl2.put_l(b, c)?);
            if x != y {
                return Ok(Some(format!("putL ({b}, {c}): {x:?} vs {y:?}")));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Complement-relating equivalence
// ---------------------------------------------------------------------------

/// A relation between two complement carriers.
pub type Relation = Vec<(Value, Value)>;

/// Outcome of checking a candidate relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivCheck {
    pub holds: bool,
    pub reason: Option<String>,
}

impl EquivCheck {
    fn ok() -> EquivCheck {
        EquivCheck {
            holds: true,
            reason: None,
        }
    }

    fn fail(reason: String) -> EquivCheck {
        EquivCheck {
            holds: false,
            reason: Some(reason),
        }
    }
}

fn expect_same_views(sl1: &SLens, sl2: &SLens) -> Result<()> {
    sl1.left
        .expect_same(&sl2.left, "symmetric lens equivalence (left)")?;
    sl1.right
        .expect_same(&sl2.right, "symmetric lens equivalence (right)")
}

/// Checks that `relation` contains the missing pair and relates both put
/// directions: outputs agree and resulting complements stay related.
pub fn verify_slens_equiv(
    sl1: &SLens,
    sl2: &SLens,
    relation: &[(Value, Value)],
) -> Result<EquivCheck> {
    expect_same_views(sl1, sl2)?;
    let set: HashSet<(Value, Value)> = relation.iter().cloned().collect();
    for (c1, c2) in relation {
        sl1.complement.check_member(c1)?;
        sl2.complement.check_member(c2)?;
    }
    if !set.contains(&(sl1.missing.clone(), sl2.missing.clone())) {
        return Ok(EquivCheck::fail(format!(
            "missing pair ({}, {}) is not related",
            sl1.missing, sl2.missing
        )));
    }
    for (c1, c2) in relation {
        for x in sl1.left.elements() {
            let (y1, d1) = sl1.put_r(x, c1)?;
            let (y2, d2) = sl2.put_r(x, c2)?;
            if y1 != y2 {
                return Ok(EquivCheck::fail(format!(
                    "putR ({x}, {c1}|{c2}) outputs {y1} vs {y2}"
                )));
            }
            if !set.contains(&(d1.clone(), d2.clone())) {
                return Ok(EquivCheck::fail(format!(
                    "putR ({x}, {c1}|{c2}) leaves ({d1}, {d2}) unrelated"
                )));
            }
        }
        for x in sl1.right.elements() {
            let (y1, d1) = sl1.put_l(x, c1)?;
            let (y2, d2) = sl2.put_l(x, c2)?;
            if y1 != y2 {
                return Ok(EquivCheck::fail(format!(
                    "putL ({x}, {c1}|{c2}) outputs {y1} vs {y2}"
                )));
            }
            if !set.contains(&(d1.clone(), d2.clone())) {
                return Ok(EquivCheck::fail(format!(
                    "putL ({x}, {c1}|{c2}) leaves ({d1}, {d2}) unrelated"
                )));
            }
        }
    }
    Ok(EquivCheck::ok())
}

/// Default cap on `|C1| * |C2|` for [`search_slens_equiv`].
pub const DEFAULT_RELATION_BOUND: u128 = 1 << 20;

/// Decides equivalence by closing `{(missing1, missing2)}` under both puts.
///
/// Every witness must contain this closure, and the closure is itself a
/// witness unless some forced pair yields different outputs, so the search
/// is exact. The returned relation is sorted in `C1 * C2` order.
pub fn search_slens_equiv(sl1: &SLens, sl2: &SLens, bound: u128) -> Result<Option<Relation>> {
    expect_same_views(sl1, sl2)?;
    let size = (sl1.complement.len() as u128) * (sl2.complement.len() as u128);
    if size > bound {
        return Err(BxError::bound("complement pairs", size, bound));
    }
    let start = (sl1.missing.clone(), sl2.missing.clone());
    let mut seen: HashSet<(Value, Value)> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((c1, c2)) = queue.pop_front() {
        let mut successors = Vec::new();
        for x in sl1.left.elements() {
            let (y1, d1) = sl1.put_r(x, &c1)?;
            let (y2, d2) = sl2.put_r(x, &c2)?;
            if y1 != y2 {
                return Ok(None);
            }
            successors.push((d1, d2));
        }
        for x in sl1.right.elements() {
            let (y1, d1) = sl1.put_l(x, &c1)?;
            let (y2, d2) = sl2.put_l(x, &c2)?;
            if y1 != y2 {
                return Ok(None);
            }
            successors.push((d1, d2));
        }
        for p in successors {
            if seen.insert(p.clone()) {
                queue.push_back(p);
            }
        }
    }
    let mut rel: Relation = seen.into_iter().collect();
    rel.sort_by_key(|(c1, c2)| (sl1.complement.index_of(c1), sl2.complement.index_of(c2)));
    Ok(Some(rel))
}

/// Relational composition `r1 ; r2`, sorted and deduplicated.
pub fn compose_relations(r1: &[(Value, Value)], r2: &[(Value, Value)]) -> Relation {
    let mut out: Vec<(Value, Value)> = Vec::new();
    for (x, y) in r1 {
        for (y2, z) in r2 {
            if y == y2 {
                out.push((x.clone(), z.clone()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The converse relation.
pub fn converse(r: &[(Value, Value)]) -> Relation {
    r.iter().map(|(x, y)| (y.clone(), x.clone())).collect()
}

// ---------------------------------------------------------------------------
// Monadic symmetric lenses
// ---------------------------------------------------------------------------

/// A symmetric lens whose puts run in `effect`. Results of `mput_r` are
/// pairs `(b, c)`, results of `mput_l` pairs `(a, c)`.
#[derive(Clone)]
pub struct SMLens {
    name: String,
    effect: Effect,
    left: Carrier,
    right: Carrier,
    complement: Carrier,
    right_out: Carrier,
    left_out: Carrier,
    mput_r: EffectPairFn,
    mput_l: EffectPairFn,
    missing: Value,
}

impl SMLens {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        effect: Effect,
        left: Carrier,
        right: Carrier,
        complement: Carrier,
        mput_r: impl Fn(&Value, &Value) -> Result<EffectValue> + Send + Sync + 'static,
        mput_l: impl Fn(&Value, &Value) -> Result<EffectValue> + Send + Sync + 'static,
        missing: Value,
    ) -> Result<SMLens> {
        complement.check_member(&missing)?;
        Ok(SMLens {
            name: name.into(),
            effect,
            right_out: Carrier::product(&right, &complement),
            left_out: Carrier::product(&left, &complement),
            left,
            right,
            complement,
            mput_r: Arc::new(mput_r),
            mput_l: Arc::new(mput_l),
            missing,
        })
    }

    /// From tables indexed by `[x][c]`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        name: impl Into<String>,
        effect: Effect,
        left: Carrier,
        right: Carrier,
        complement: Carrier,
        mput_r: Vec<Vec<EffectValue>>,
        mput_l: Vec<Vec<EffectValue>>,
        missing: Value,
    ) -> Result<SMLens> {
        let name = name.into();
        let fits = |t: &Vec<Vec<EffectValue>>, rows: usize| {
            t.len() == rows && t.iter().all(|r| r.len() == complement.len())
        };
        if !fits(&mput_r, left.len()) || !fits(&mput_l, right.len()) {
            return Err(BxError::Shape(format!(
                "tables of {name} do not fit the carriers"
            )));
        }
        let (tr, tl) = (Arc::new(mput_r), Arc::new(mput_l));
        let (a1, c1, b2, c2) = (
            left.clone(),
            complement.clone(),
            right.clone(),
            complement.clone(),
        );
        SMLens::new(
            name,
            effect,
            left,
            right,
            complement,
            move |a, c| Ok(tr[a1.position(a)?][c1.position(c)?].clone()),
            move |b, c| Ok(tl[b2.position(b)?][c2.position(c)?].clone()),
            missing,
        )
    }

    /// Lifts a pure symmetric lens into `effect`.
    pub fn lift(effect: &Effect, sl: &SLens) -> SMLens {
        let (r, l) = (sl.clone(), sl.clone());
        let (e1, e2) = (effect.clone(), effect.clone());
        SMLens::new(
            format!("lift {}", sl.name),
            effect.clone(),
            sl.left.clone(),
            sl.right.clone(),
            sl.complement.clone(),
            move |a, c| {
                let (b, c2) = r.put_r(a, c)?;
                Ok(e1.ret(Value::pair(b, c2)))
            },
            move |b, c| {
                let (a, c2) = l.put_l(b, c)?;
                Ok(e2.ret(Value::pair(a, c2)))
            },
            sl.missing.clone(),
        )
        .expect("missing already checked")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> SMLens {
        self.name = name.into();
        self
    }

    pub fn effect(&self) -> &Effect {
        &self.effect
    }

    pub fn left(&self) -> &Carrier {
        &self.left
    }

    pub fn right(&self) -> &Carrier {
        &self.right
    }

    pub fn complement(&self) -> &Carrier {
        &self.complement
    }

    pub fn missing(&self) -> &Value {
        &self.missing
    }

    pub fn mput_r(&self, a: &Value, c: &Value) -> Result<EffectValue> {
        self.left.check_member(a)?;
        self.complement.check_member(c)?;
        let m = (self.mput_r)(a, c)?;
        self.effect.check_results(&m, &self.right_out)?;
        Ok(m)
    }

    pub fn mput_l(&self, b: &Value, c: &Value) -> Result<EffectValue> {
        self.right.check_member(b)?;
        self.complement.check_member(c)?;
        let m = (self.mput_l)(b, c)?;
        self.effect.check_results(&m, &self.left_out)?;
        Ok(m)
    }

    /// Reads an identity-effect lens back as a pure one.
    pub fn to_pure(&self) -> Result<SLens> {
        if !self.effect.is_identity() {
            return Err(BxError::NonPureInput(format!(
                "{} runs in {}",
                self.name, self.effect
            )));
        }
        let unwrap = |m: EffectValue| -> Result<(Value, Value)> {
            match m {
                EffectValue::Identity(v) => {
                    let (x, c) = v.split_pair()?;
                    Ok((x.clone(), c.clone()))
                }
                other => Err(BxError::Shape(format!("expected identity, got {other:?}"))),
            }
        };
        let (r, l) = (self.clone(), self.clone());
        SLens::new(
            self.name.clone(),
            self.left.clone(),
            self.right.clone(),
            self.complement.clone(),
            move |a, c| unwrap(r.mput_r(a, c)?),
            move |b, c| unwrap(l.mput_l(b, c)?),
            self.missing.clone(),
        )
    }
}

impl fmt::Debug for SMLens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SMLens({} : {} <-> {} with {} [{}])",
            self.name,
            self.left.name(),
            self.right.name(),
            self.complement.name(),
            self.effect
        )
    }
}

/// The evident monadic generalisation of [`compose_s`]. It preserves the
/// laws only when the effect commutes.
pub fn compose_sm(sl1: &SMLens, sl2: &SMLens) -> Result<SMLens> {
    sl1.effect
        .expect_same(&sl2.effect, "monadic symmetric lens composition")?;
    sl1.right
        .expect_same(&sl2.left, "monadic symmetric lens composition")?;
    let (r1, r2) = (sl1.clone(), sl2.clone());
    let (l1, l2) = (sl1.clone(), sl2.clone());
    SMLens::new(
        format!("({} ; {})", sl1.name, sl2.name),
        sl1.effect.clone(),
        sl1.left.clone(),
        sl2.right.clone(),
        Carrier::product(&sl1.complement, &sl2.complement),
        move |a, c| {
            let e = &r1.effect;
            let (c1, c2) = c.split_pair()?;
            e.bind(&r1.mput_r(a, c1)?, &mut |bc1| {
                let (b, c1n) = bc1.split_pair()?;
                e.bind(&r2.mput_r(b, c2)?, &mut |zc2| {
                    let (z, c2n) = zc2.split_pair()?;
                    Ok(e.ret(Value::pair(
                        z.clone(),
                        Value::pair(c1n.clone(), c2n.clone()),
                    )))
                })
            })
        },
        move |z, c| {
            let e = &l1.effect;
            let (c1, c2) = c.split_pair()?;
            e.bind(&l2.mput_l(z, c2)?, &mut |bc2| {
                let (b, c2n) = bc2.split_pair()?;
                e.bind(&l1.mput_l(b, c1)?, &mut |ac1| {
                    let (a, c1n) = ac1.split_pair()?;
                    Ok(e.ret(Value::pair(
                        a.clone(),
                        Value::pair(c1n.clone(), c2n.clone()),
                    )))
                })
            })
        },
        Value::pair(sl1.missing.clone(), sl2.missing.clone()),
    )
}

/// Unit-to-unit lens over `State Bool` whose puts set the state to `flag`.
pub fn set_bool(flag: bool) -> SMLens {
    let effect = Effect::State(Carrier::bool());
    let (e1, e2) = (effect.clone(), effect.clone());
    let unit = Carrier::unit();
    SMLens::new(
        format!("setBool {}", Value::Bool(flag)),
        effect,
        unit.clone(),
        unit.clone(),
        unit,
        move |_, _| e1.set(&Value::Bool(flag), Value::pair(Value::Unit, Value::Unit)),
        move |_, _| e2.set(&Value::Bool(flag), Value::pair(Value::Unit, Value::Unit)),
        Value::Unit,
    )
    .expect("unit complement")
}

/// Unit-to-unit lens over `Maybe` whose puts always fail.
pub fn fail_smlens() -> SMLens {
    let unit = Carrier::unit();
    SMLens::new(
        "fail",
        Effect::Maybe,
        unit.clone(),
        unit.clone(),
        unit,
        |_, _| Ok(EffectValue::Maybe(None)),
        |_, _| Ok(EffectValue::Maybe(None)),
        Value::Unit,
    )
    .expect("unit complement")
}

/// PutRLM and PutLRM over every value/complement pair.
pub fn check_smlens_laws(sl: &SMLens) -> Result<LawReport> {
    let e = &sl.effect;
    let mut report = LawReport::new(format!("monadic symmetric lens {} [{}]", sl.name, e));
    report.declare("PutRLM");
    report.declare("PutLRM");
    for a in sl.left.elements() {
        for c in sl.complement.elements() {
            let m = sl.mput_r(a, c)?;
            let lhs = e.bind(&m, &mut |bc| {
                let (b, c2) = bc.split_pair()?;
                sl.mput_l(b, c2)
            })?;
            let rhs = e.bind(&m, &mut |bc| {
                let (_, c2) = bc.split_pair()?;
                Ok(e.ret(Value::pair(a.clone(), c2.clone())))
            })?;
            record_effect_eq(&mut report, e, "PutRLM", &lhs, &rhs, || {
                vec![("a".into(), a.clone()), ("c".into(), c.clone())]
            })?;
        }
    }
    for b in sl.right.elements() {
        for c in sl.complement.elements() {
            let m = sl.mput_l(b, c)?;
            let lhs = e.bind(&m, &mut |ac| {
                let (a, c2) = ac.split_pair()?;
                sl.mput_r(a, c2)
            })?;
            let rhs = e.bind(&m, &mut |ac| {
                let (_, c2) = ac.split_pair()?;
                Ok(e.ret(Value::pair(b.clone(), c2.clone())))
            })?;
            record_effect_eq(&mut report, e, "PutLRM", &lhs, &rhs, || {
                vec![("b".into(), b.clone()), ("c".into(), c.clone())]
            })?;
        }
    }
    Ok(report)
}

/// The first point where two monadic symmetric lenses differ.
pub fn smlens_difference(sl1: &SMLens, sl2: &SMLens) -> Result<Option<String>> {
    sl1.effect
        .expect_same(&sl2.effect, "monadic symmetric lens comparison")?;
    sl1.complement
        .expect_same(&sl2.complement, "monadic symmetric lens comparison")?;
    let e = &sl1.effect;
    if sl1.missing != sl2.missing {
        return Ok(Some(format!("missing: {} vs {}", sl1.missing, sl2.missing)));
    }
    for a in sl1.left.elements() {
        for c in sl1.complement.elements() {
            let (x, y) = (sl1.mput_r(a, c)?, sl2.mput_r(a, c)?);
            if !e.eq(&x, &y)? {
                return Ok(Some(format!(
                    "mputR ({a}, {c}): {} vs {}",
                    e.render(&x),
                    e.render(&y)
                )));
            }
        }
    }
    for b in sl1.right.elements() {
        for c in sl1.complement.elements() {
            let (x, y) = (sl1.mput_l(b, c)?, sl2.mput_l(b, c)?);
            if !e.eq(&x, &y)? {
                return Ok(Some(format!(
                    "mputL ({b}, {c}): {} vs {}",
                    e.render(&x),
                    e.render(&y)
                )));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits() -> Carrier {
        Carrier::int_range(0, 1)
    }

    #[test]
    fn identity_symmetric_lens() {
        let id = id_slens(&bits());
        assert_eq!(
            id.put_r(&Value::Int(1), &Value::Unit).unwrap(),
            (Value::Int(1), Value::Unit)
        );
        assert_eq!(
            id.put_l(&Value::Int(0), &Value::Unit).unwrap(),
            (Value::Int(0), Value::Unit)
        );
        assert!(check_slens_laws(&id).unwrap().passed());
    }

    #[test]
    fn set_bool_sets_state() {
        let sl = set_bool(true);
        let m = sl.mput_r(&Value::Unit, &Value::Unit).unwrap();
        let run = sl.effect().run_state(&m, &Value::Bool(false)).unwrap();
        assert_eq!(
            run,
            (Value::pair(Value::Unit, Value::Unit), Value::Bool(true))
        );
        assert!(check_smlens_laws(&sl).unwrap().passed());
        assert!(check_smlens_laws(&set_bool(false)).unwrap().passed());
    }

    #[test]
    fn set_bool_composite_breaks_put_rl() {
        let comp = compose_sm(&set_bool(true), &set_bool(false)).unwrap();
        let r = check_smlens_laws(&comp).unwrap();
        let v = r.violation("PutRLM").unwrap();
        let d = v.divergence.as_ref().unwrap();
        assert_eq!(d.initial, Value::Bool(false));
        assert_eq!(d.lhs_final, Value::Bool(true));
        assert_eq!(d.rhs_final, Value::Bool(false));
        assert_eq!(v.binding("c"), Some(&Value::pair(Value::Unit, Value::Unit)));
    }

    #[test]
    fn fail_lens_is_lawful() {
        let f = fail_smlens();
        assert_eq!(
            f.mput_r(&Value::Unit, &Value::Unit).unwrap(),
            EffectValue::Maybe(None)
        );
        assert!(check_smlens_laws(&f).unwrap().passed());
    }

    #[test]
    fn identity_effect_composition_matches_pure() {
        let id = id_slens(&bits());
        let pure = compose_s(&id, &id).unwrap();
        let lifted = compose_sm(
            &SMLens::lift(&Effect::Identity, &id),
            &SMLens::lift(&Effect::Identity, &id),
        )
        .unwrap()
        .to_pure()
        .unwrap();
        assert!(slens_difference(&pure, &lifted).unwrap().is_none());
    }

    #[test]
    fn identity_unit_law_via_relation() {
        let id = id_slens(&bits());
        let rel = search_slens_equiv(&compose_s(&id, &id).unwrap(), &id, DEFAULT_RELATION_BOUND)
            .unwrap()
            .unwrap();
        assert_eq!(
            rel,
            vec![(Value::pair(Value::Unit, Value::Unit), Value::Unit)]
        );
        assert!(
            verify_slens_equiv(&compose_s(&id, &id).unwrap(), &id, &rel)
                .unwrap()
                .holds
        );
        assert!(!verify_slens_equiv(&id, &id, &[]).unwrap().holds);
    }

    #[test]
    fn different_outputs_refute_equivalence() {
        let id = id_slens(&bits());
        let flip = SLens::new(
            "flip",
            bits(),
            bits(),
            Carrier::unit(),
            |a, u| Ok((Value::Int(1 - a.as_int()?), u.clone())),
            |b, u| Ok((Value::Int(1 - b.as_int()?), u.clone())),
            Value::Unit,
        )
        .unwrap();
        assert!(check_slens_laws(&flip).unwrap().passed());
        assert_eq!(
            search_slens_equiv(&id, &flip, DEFAULT_RELATION_BOUND).unwrap(),
            None
        );
    }
}
