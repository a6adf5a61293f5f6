//! Equivalences of spans: isomorphism (`≡i`), span equivalence (`≡s`) and
//! bisimulation (`≡b`), as checkable witnesses, bounded searches, and the
//! constructions that turn one kind of witness into another.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::effects::{record_effect_eq, Counter, Effect, EffectValue};
use crate::error::{BxError, Result};
use crate::lens::{check_pure_laws, compose_pure, id_lens, LensTable, PureLens};
use crate::mlens::{compose_m, lens2mlens, mlens_to_pure, Budget, MLens};
use crate::report::{LawReport, Violation};
use crate::spans::{join, Span};
use crate::value::{Carrier, Value};

/// Default work budget for [`search_equivalence`].
pub const DEFAULT_EQUIV_BUDGET: u64 = 1_000_000;

/// A total function between state carriers, stored as a table.
#[derive(Clone, PartialEq)]
pub struct BaseMap {
    name: String,
    source: Carrier,
    target: Carrier,
    images: Vec<Value>,
}

impl BaseMap {
    pub fn new(
        name: impl Into<String>,
        source: &Carrier,
        target: &Carrier,
        f: impl Fn(&Value) -> Result<Value>,
    ) -> Result<BaseMap> {
        let images = source
            .elements()
            .iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        BaseMap::from_images(name, source, target, images)
    }

    pub fn from_images(
        name: impl Into<String>,
        source: &Carrier,
        target: &Carrier,
        images: Vec<Value>,
    ) -> Result<BaseMap> {
        let name = name.into();
        if images.len() != source.len() {
            return Err(BxError::Shape(format!(
                "map {name} has {} images for {} elements",
                images.len(),
                source.len()
            )));
        }
        for v in &images {
            target.check_member(v)?;
        }
        Ok(BaseMap {
            name,
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn identity(c: &Carrier) -> BaseMap {
        BaseMap::from_images(format!("id {}", c.name()), c, c, c.elements().to_vec())
            .expect("identity")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn target(&self) -> &Carrier {
        &self.target
    }

    pub fn images(&self) -> &[Value] {
        &self.images
    }

    pub fn apply(&self, s: &Value) -> Result<Value> {
        Ok(self.images[self.source.position(s)?].clone())
    }
}

impl fmt::Debug for BaseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BaseMap({} : {} -> {} {{",
            self.name,
            self.source.name(),
            self.target.name()
        )?;
        for (s, t) in self.source.elements().iter().zip(&self.images) {
            write!(f, " {s} -> {t};")?;
        }
        write!(f, " }})")
    }
}

/// The three base-map equations from `l1` to `l2` along `h`.
pub fn check_base_map(h: &BaseMap, l1: &MLens, l2: &MLens) -> Result<LawReport> {
    l1.effect().expect_same(l2.effect(), "base map")?;
    l1.view().expect_same(l2.view(), "base map")?;
    h.source.expect_same(l1.source(), "base map source")?;
    h.target.expect_same(l2.source(), "base map target")?;
    let e = l1.effect();
    let mut report = LawReport::new(format!(
        "base map {} from {} to {}",
        h.name,
        l1.name(),
        l2.name()
    ));
    for law in ["BaseGet", "BasePut", "BaseCreate"] {
        report.declare(law);
    }
    for s in h.source.elements() {
        let hs = h.apply(s)?;
        let (x, y) = (l1.mget(s)?, l2.mget(&hs)?);
        report.record("BaseGet", x == y, || {
            Violation::new(
                "BaseGet",
                vec![("s".into(), s.clone())],
                x.to_string(),
                y.to_string(),
            )
        });
    }
    for s in h.source.elements() {
        let hs = h.apply(s)?;
        for v in l1.view().elements() {
            let lhs = e.map(&l1.mput(s, v)?, |s2| h.apply(s2))?;
            let rhs = l2.mput(&hs, v)?;
            record_effect_eq(&mut report, e, "BasePut", &lhs, &rhs, || {
                vec![("s".into(), s.clone()), ("v".into(), v.clone())]
            })?;
        }
    }
    for v in l1.view().elements() {
        let lhs = e.map(&l1.mcreate(v)?, |s2| h.apply(s2))?;
        let rhs = l2.mcreate(v)?;
        record_effect_eq(&mut report, e, "BaseCreate", &lhs, &rhs, || {
            vec![("v".into(), v.clone())]
        })?;
    }
    Ok(report)
}

/// A bijection between two state carriers.
#[derive(Debug, Clone)]
pub struct IsoWitness {
    pub forward: BaseMap,
    pub backward: BaseMap,
}

impl IsoWitness {
    /// Fails unless the two maps are mutually inverse.
    pub fn new(forward: BaseMap, backward: BaseMap) -> Result<IsoWitness> {
        forward
            .source
            .expect_same(&backward.target, "isomorphism")?;
        forward
            .target
            .expect_same(&backward.source, "isomorphism")?;
        for s in forward.source.elements() {
            if &backward.apply(&forward.apply(s)?)? != s {
                return Err(BxError::InvalidWitness(format!(
                    "{} is not inverted at {s}",
                    forward.name
                )));
            }
        }
        for t in backward.source.elements() {
            if &forward.apply(&backward.apply(t)?)? != t {
                return Err(BxError::InvalidWitness(format!(
                    "{} is not inverted at {t}",
                    backward.name
                )));
            }
        }
        Ok(IsoWitness { forward, backward })
    }

    pub fn identity(c: &Carrier) -> IsoWitness {
        IsoWitness {
            forward: BaseMap::identity(c),
            backward: BaseMap::identity(c),
        }
    }

    /// `get = forward`, `put _ t = backward t`, `create = backward`.
    pub fn to_lens(&self) -> PureLens {
        let (f, b1, b2) = (
            self.forward.clone(),
            self.backward.clone(),
            self.backward.clone(),
        );
        PureLens::new(
            self.forward.name.clone(),
            self.forward.source.clone(),
            self.forward.target.clone(),
            move |s| f.apply(s),
            move |_, t| b1.apply(t),
            move |t| b2.apply(t),
        )
    }

    pub fn to_span_witness(&self) -> SpanEquivWitness {
        SpanEquivWitness {
            lens: self.to_lens(),
            direction: Direction::Forward,
        }
    }
}

/// Which way a span-equivalence step points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// The lens goes from the first span's state to the second's.
    Forward,
    /// The lens goes from the second span's state to the first's.
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// One step of span equivalence: a full lens between the state carriers
/// that the other span's legs factor through.
#[derive(Debug, Clone)]
pub struct SpanEquivWitness {
    pub lens: PureLens,
    pub direction: Direction,
}

impl SpanEquivWitness {
    pub fn forward(lens: PureLens) -> SpanEquivWitness {
        SpanEquivWitness {
            lens,
            direction: Direction::Forward,
        }
    }

    pub fn backward(lens: PureLens) -> SpanEquivWitness {
        SpanEquivWitness {
            lens,
            direction: Direction::Backward,
        }
    }
}

/// A span over a relation between the two state carriers.
#[derive(Debug, Clone)]
pub struct BisimWitness {
    pub span: Span,
}

impl BisimWitness {
    pub fn new(span: Span) -> BisimWitness {
        BisimWitness { span }
    }

    pub fn relation(&self) -> &Carrier {
        self.span.state()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquivKind {
    Iso,
    Span,
    Bisim,
}

impl FromStr for EquivKind {
    type Err = BxError;

    fn from_str(s: &str) -> Result<EquivKind> {
        match s {
            "iso" => Ok(EquivKind::Iso),
            "span" => Ok(EquivKind::Span),
            "bisim" => Ok(EquivKind::Bisim),
            other => Err(BxError::InvalidParameter(format!(
                "unknown equivalence kind `{other}`"
            ))),
        }
    }
}

impl fmt::Display for EquivKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquivKind::Iso => "iso",
            EquivKind::Span => "span",
            EquivKind::Bisim => "bisim",
        })
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum EquivWitness {
    Iso(IsoWitness),
    Span(SpanEquivWitness),
    Bisim(BisimWitness),
}

impl EquivWitness {
    pub fn kind(&self) -> EquivKind {
        match self {
            EquivWitness::Iso(_) => EquivKind::Iso,
            EquivWitness::Span(_) => EquivKind::Span,
            EquivWitness::Bisim(_) => EquivKind::Bisim,
        }
    }
}

fn compatible(sp1: &Span, sp2: &Span) -> Result<()> {
    sp1.effect().expect_same(sp2.effect(), "span equivalence")?;
    sp1.left_view()
        .expect_same(sp2.left_view(), "span equivalence (left view)")?;
    sp1.right_view()
        .expect_same(sp2.right_view(), "span equivalence (right view)")
}

/// Records `lhs = rhs` for two monadic lenses with the same carriers, one
/// instance per operation and argument.
fn record_lens_equation(report: &mut LawReport, law: &str, lhs: &MLens, rhs: &MLens) -> Result<()> {
    lhs.source().expect_same(rhs.source(), law)?;
    lhs.view().expect_same(rhs.view(), law)?;
    let e = lhs.effect();
    report.declare(law);
    for s in lhs.source().elements() {
        let (x, y) = (lhs.mget(s)?, rhs.mget(s)?);
        report.record(law, x == y, || {
            Violation::new(
                law,
                vec![("s".into(), s.clone())],
                format!("get {x}"),
                format!("get {y}"),
            )
        });
        for v in lhs.view().elements() {
            record_effect_eq(report, e, law, &lhs.mput(s, v)?, &rhs.mput(s, v)?, || {
                vec![("s".into(), s.clone()), ("v".into(), v.clone())]
            })?;
        }
    }
    for v in lhs.view().elements() {
        record_effect_eq(report, e, law, &lhs.mcreate(v)?, &rhs.mcreate(v)?, || {
            vec![("v".into(), v.clone())]
        })?;
    }
    Ok(())
}

/// Checks `h ; outer.legs = inner.legs` where `h : inner.state ~> outer.state`.
fn record_factoring(
    report: &mut LawReport,
    h: &PureLens,
    inner: &Span,
    outer: &Span,
) -> Result<()> {
    let lifted = lens2mlens(inner.effect(), h);
    record_lens_equation(
        report,
        "LeftLeg",
        &compose_m(&lifted, outer.left())?,
        inner.left(),
    )?;
    record_lens_equation(
        report,
        "RightLeg",
        &compose_m(&lifted, outer.right())?,
        inner.right(),
    )
}

/// Verifies a witness of the given kind between `sp1` and `sp2`.
pub fn verify_equivalence(sp1: &Span, sp2: &Span, w: &EquivWitness) -> Result<LawReport> {
    compatible(sp1, sp2)?;
    let mut report = LawReport::new(format!(
        "{} equivalence of {} and {}",
        w.kind(),
        sp1.name(),
        sp2.name()
    ));
    match w {
        EquivWitness::Iso(iso) => {
            iso.forward
                .source
                .expect_same(sp1.state(), "isomorphism source")?;
            iso.forward
                .target
                .expect_same(sp2.state(), "isomorphism target")?;
            record_factoring(&mut report, &iso.to_lens(), sp1, sp2)?;
        }
        EquivWitness::Span(sw) => {
            let (inner, outer) = match sw.direction {
                Direction::Forward => (sp1, sp2),
                Direction::Backward => (sp2, sp1),
            };
            sw.lens
                .source()
                .expect_same(inner.state(), "span witness source")?;
            sw.lens
                .view()
                .expect_same(outer.state(), "span witness target")?;
            report.absorb("witness", check_pure_laws(&sw.lens)?);
            record_factoring(&mut report, &sw.lens, inner, outer)?;
        }
        EquivWitness::Bisim(bw) => verify_bisim(&mut report, sp1, sp2, &bw.span)?,
    }
    Ok(report)
}

fn verify_bisim(report: &mut LawReport, sp1: &Span, sp2: &Span, sp: &Span) -> Result<()> {
    report.declare("Relation");
    let product = Carrier::product(sp1.state(), sp2.state());
    for p in sp.state().elements() {
        report.record("Relation", product.contains(p), || {
            Violation::new(
                "Relation",
                vec![("r".into(), p.clone())],
                p.to_string(),
                format!("an element of {}", product.name()),
            )
        });
    }
    if report.tally("Relation").is_some_and(|t| t.failed > 0) {
        return Ok(());
    }
    let r = sp.state();
    let fst = BaseMap::new("fst", r, sp1.state(), |p| Ok(p.split_pair()?.0.clone()))?;
    let snd = BaseMap::new("snd", r, sp2.state(), |p| Ok(p.split_pair()?.1.clone()))?;
    report.absorb("fst.left", check_base_map(&fst, sp.left(), sp1.left())?);
    report.absorb("fst.right", check_base_map(&fst, sp.right(), sp1.right())?);
    report.absorb("snd.left", check_base_map(&snd, sp.left(), sp2.left())?);
    report.absorb("snd.right", check_base_map(&snd, sp.right(), sp2.right())?);
    Ok(())
}

/// First witness of the given kind in enumeration order, or `None` after
/// the space is exhausted. Every candidate costs one unit of `budget`.
pub fn search_equivalence(
    kind: EquivKind,
    sp1: &Span,
    sp2: &Span,
    budget: u64,
) -> Result<Option<EquivWitness>> {
    compatible(sp1, sp2)?;
    let mut budget = Budget::new(format!("{kind} equivalence search"), budget);
    Ok(match kind {
        EquivKind::Iso => search_iso(sp1, sp2, &mut budget)?.map(EquivWitness::Iso),
        EquivKind::Span => {
            let found = match search_factoring(sp1, sp2, &mut budget)? {
                Some(h) => Some(SpanEquivWitness::forward(h)),
                None => search_factoring(sp2, sp1, &mut budget)?.map(SpanEquivWitness::backward),
            };
            found.map(EquivWitness::Span)
        }
        EquivKind::Bisim => search_bisim(sp1, sp2, &mut budget)?.map(EquivWitness::Bisim),
    })
}

fn factors(h: &PureLens, inner: &Span, outer: &Span) -> Result<bool> {
    let mut report = LawReport::new("candidate");
    record_factoring(&mut report, h, inner, outer)?;
    Ok(report.passed())
}

fn search_iso(sp1: &Span, sp2: &Span, budget: &mut Budget) -> Result<Option<IsoWitness>> {
    let (s1, s2) = (sp1.state(), sp2.state());
    if s1.len() != s2.len() {
        return Ok(None);
    }
    let n = s1.len();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        budget.spend(1)?;
        let forward = BaseMap::from_images(
            "iso",
            s1,
            s2,
            perm.iter().map(|&i| s2.elements()[i].clone()).collect(),
        )?;
        let mut inv = vec![0; n];
        for (i, &j) in perm.iter().enumerate() {
            inv[j] = i;
        }
        let backward = BaseMap::from_images(
            "iso inverse",
            s2,
            s1,
            inv.iter().map(|&i| s1.elements()[i].clone()).collect(),
        )?;
        let w = IsoWitness { forward, backward };
        if factors(&w.to_lens(), sp1, sp2)? {
            return Ok(Some(w));
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Searches a full lens `h : inner.state ~> outer.state` with
/// `h ; outer.legs = inner.legs`: get tables restricted pointwise by the
/// leg gets, then each put row by the laws and the put equations at that
/// source, then the create table.
fn search_factoring(inner: &Span, outer: &Span, budget: &mut Budget) -> Result<Option<PureLens>> {
    let (si, so) = (inner.state(), outer.state());
    let e = inner.effect();
    let mut get_choices: Vec<Vec<usize>> = Vec::with_capacity(si.len());
    for s in si.elements() {
        let (a, b) = (inner.left().mget(s)?, inner.right().mget(s)?);
        let mut c = Vec::new();
        for (j, t) in so.elements().iter().enumerate() {
            if outer.left().mget(t)? == a && outer.right().mget(t)? == b {
                c.push(j);
            }
        }
        get_choices.push(c);
    }
    let radices: Vec<usize> = get_choices.iter().map(Vec::len).collect();
    'gets: for digits in Counter::new(radices) {
        budget.spend(1)?;
        let get: Vec<usize> = digits
            .iter()
            .enumerate()
            .map(|(i, &d)| get_choices[i][d])
            .collect();
        let mut fibres: Vec<Vec<usize>> = vec![Vec::new(); so.len()];
        for (i, &j) in get.iter().enumerate() {
            fibres[j].push(i);
        }
        if fibres.iter().any(Vec::is_empty) {
            continue;
        }
        let mut put = Vec::with_capacity(si.len());
        for (i, s) in si.elements().iter().enumerate() {
            let cell_choices: Vec<Vec<usize>> = (0..so.len())
                .map(|j| {
                    if j == get[i] {
                        vec![i]
                    } else {
                        fibres[j].clone()
                    }
                })
                .collect();
            let mut found = None;
            for row_digits in Counter::new(cell_choices.iter().map(Vec::len).collect()) {
                budget.spend(1)?;
                let row: Vec<usize> = row_digits
                    .iter()
                    .enumerate()
                    .map(|(j, &d)| cell_choices[j][d])
                    .collect();
                let back = |t: &Value| -> Result<Value> {
                    Ok(si.elements()[row[so.position(t)?]].clone())
                };
                let t = &so.elements()[get[i]];
                let mut ok = true;
                for (leg_in, leg_out) in
                    [(inner.left(), outer.left()), (inner.right(), outer.right())]
                {
                    for v in leg_in.view().elements() {
                        let lhs = e.map(&leg_out.mput(t, v)?, back)?;
                        if !e.eq(&lhs, &leg_in.mput(s, v)?)? {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        break;
                    }
                }
                if ok {
                    found = Some(row);
                    break;
                }
            }
            match found {
                Some(row) => put.push(row),
                None => continue 'gets,
            }
        }
        for create_digits in Counter::new(fibres.iter().map(Vec::len).collect()) {
            budget.spend(1)?;
            let create: Vec<usize> = create_digits
                .iter()
                .enumerate()
                .map(|(j, &d)| fibres[j][d])
                .collect();
            let back =
                |t: &Value| -> Result<Value> { Ok(si.elements()[create[so.position(t)?]].clone()) };
            let mut ok = true;
            for (leg_in, leg_out) in [(inner.left(), outer.left()), (inner.right(), outer.right())]
            {
                for v in leg_in.view().elements() {
                    let lhs = e.map(&leg_out.mcreate(v)?, back)?;
                    if !e.eq(&lhs, &leg_in.mcreate(v)?)? {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                let table = LensTable {
                    get: get.clone(),
                    put,
                    create,
                };
                return Ok(Some(PureLens::from_table(
                    "h",
                    si.clone(),
                    so.clone(),
                    table,
                )?));
            }
        }
    }
    Ok(None)
}

/// Pairs two computations that agree on their effect. `None` when no
/// computation projects onto both (different failure, log or final state).
/// For lists the positional pairing is used.
fn zip_effect(e: &Effect, m1: &EffectValue, m2: &EffectValue) -> Result<Option<EffectValue>> {
    e.check_tag(m1)?;
    e.check_tag(m2)?;
    Ok(match (m1, m2) {
        (EffectValue::Identity(x), EffectValue::Identity(y)) => {
            Some(EffectValue::Identity(Value::pair(x.clone(), y.clone())))
        }
        (EffectValue::Maybe(x), EffectValue::Maybe(y)) => match (x, y) {
            (None, None) => Some(EffectValue::Maybe(None)),
            (Some(x), Some(y)) => Some(EffectValue::Maybe(Some(Value::pair(x.clone(), y.clone())))),
            _ => None,
        },
        (EffectValue::List(xs), EffectValue::List(ys)) if xs.len() == ys.len() => {
            Some(EffectValue::List(
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| Value::pair(x.clone(), y.clone()))
                    .collect(),
            ))
        }
        (EffectValue::Writer { log: l1, value: x }, EffectValue::Writer { log: l2, value: y })
            if l1 == l2 =>
        {
            Some(EffectValue::Writer {
                log: l1.clone(),
                value: Value::pair(x.clone(), y.clone()),
            })
        }
        (EffectValue::State(r1), EffectValue::State(r2)) => {
            let mut rows = Vec::with_capacity(r1.len());
            for ((x, f1), (y, f2)) in r1.iter().zip(r2) {
                if f1 != f2 {
                    return Ok(None);
                }
                rows.push((Value::pair(x.clone(), y.clone()), *f1));
            }
            Some(EffectValue::State(rows))
        }
        _ => None,
    })
}

fn zip_or_none(e: &Effect, m1: &EffectValue, m2: &EffectValue, at: &str) -> Result<EffectValue> {
    zip_effect(e, m1, m2)?.ok_or_else(|| {
        BxError::InvalidWitness(format!(
            "{at}: {} and {} cannot be paired",
            e.render(m1),
            e.render(m2)
        ))
    })
}

/// The span over `relation` whose operations pair up those of `sp1` and `sp2`.
fn paired_span(sp1: &Span, sp2: &Span, relation: Carrier) -> Span {
    let leg = |l1: &MLens, l2: &MLens, name: &str| {
        let (g1, p1, p2, c1, c2) = (l1.clone(), l1.clone(), l2.clone(), l1.clone(), l2.clone());
        let (ep, ec) = (l1.effect().clone(), l1.effect().clone());
        MLens::new(
            name,
            l1.effect().clone(),
            relation.clone(),
            l1.view().clone(),
            move |p| g1.mget(p.split_pair()?.0),
            move |p, v| {
                let (s1, s2) = p.split_pair()?;
                zip_or_none(&ep, &p1.mput(s1, v)?, &p2.mput(s2, v)?, "put")
            },
            move |v| zip_or_none(&ec, &c1.mcreate(v)?, &c2.mcreate(v)?, "create"),
        )
    };
    Span::new(
        format!("pair {} {}", sp1.name(), sp2.name()),
        leg(sp1.left(), sp2.left(), "pair.left"),
        leg(sp1.right(), sp2.right(), "pair.right"),
    )
    .expect("legs share the relation")
}

/// The span over `relation` whose legs run the two spans' operations side
/// by side. It is a bisimulation witness exactly when it verifies.
pub fn paired_bisim(sp1: &Span, sp2: &Span, relation: Carrier) -> BisimWitness {
    BisimWitness::new(paired_span(sp1, sp2, relation))
}

/// The least relation containing the paired create results and closed
/// under paired puts; `None` if some pair disagrees on a get or cannot be
/// paired.
fn search_bisim(sp1: &Span, sp2: &Span, budget: &mut Budget) -> Result<Option<BisimWitness>> {
    let e = sp1.effect().clone();
    let mut seen: HashSet<Value> = HashSet::new();
    let mut queue: VecDeque<Value> = VecDeque::new();
    let legs = [(sp1.left(), sp2.left()), (sp1.right(), sp2.right())];
    for (l1, l2) in legs {
        for v in l1.view().elements() {
            budget.spend(1)?;
            let Some(m) = zip_effect(&e, &l1.mcreate(v)?, &l2.mcreate(v)?)? else {
                return Ok(None);
            };
            for p in m.results() {
                if seen.insert(p.clone()) {
                    queue.push_back(p.clone());
                }
            }
        }
    }
    while let Some(p) = queue.pop_front() {
        let (s1, s2) = p.split_pair()?;
        for (l1, l2) in legs {
            if l1.mget(s1)? != l2.mget(s2)? {
                return Ok(None);
            }
            for v in l1.view().elements() {
                budget.spend(1)?;
                let Some(m) = zip_effect(&e, &l1.mput(s1, v)?, &l2.mput(s2, v)?)? else {
                    return Ok(None);
                };
                for q in m.results() {
                    if seen.insert(q.clone()) {
                        queue.push_back(q.clone());
                    }
                }
            }
        }
    }
    let product = Carrier::product(sp1.state(), sp2.state());
    let relation = product.filter("R", |p| seen.contains(p));
    Ok(Some(BisimWitness::new(paired_span(sp1, sp2, relation))))
}

/// The bisimulation induced by one span-equivalence step: the graph of the
/// witness's get, with each operation run on the side the lens starts from.
pub fn bisim_from_span_witness(
    sp1: &Span,
    sp2: &Span,
    w: &SpanEquivWitness,
) -> Result<BisimWitness> {
    let report = verify_equivalence(sp1, sp2, &EquivWitness::Span(w.clone()))?;
    if !report.passed() {
        let why = report
            .first_violation()
            .map(|v| v.to_string())
            .unwrap_or_default();
        return Err(BxError::InvalidWitness(why));
    }
    let h = w.lens.clone();
    let forward = w.direction == Direction::Forward;
    let product = Carrier::product(sp1.state(), sp2.state());
    let relation = product.try_filter("R", |p| {
        let (s1, s2) = p.split_pair()?;
        Ok(if forward {
            &h.get(s1)? == s2
        } else {
            &h.get(s2)? == s1
        })
    })?;
    let graph = move |h: &PureLens, s: &Value| -> Result<Value> {
        let t = h.get(s)?;
        Ok(if forward {
            Value::pair(s.clone(), t)
        } else {
            Value::pair(t, s.clone())
        })
    };
    let leg = |side: &MLens, name: &str| {
        let e = side.effect().clone();
        let (g, p, c) = (side.clone(), side.clone(), side.clone());
        let (hp, hc) = (h.clone(), h.clone());
        let (ep, ec) = (e.clone(), e.clone());
        MLens::new(
            name,
            e,
            relation.clone(),
            side.view().clone(),
            move |r| {
                let (s1, s2) = r.split_pair()?;
                g.mget(if forward { s1 } else { s2 })
            },
            move |r, v| {
                let (s1, s2) = r.split_pair()?;
                let m = p.mput(if forward { s1 } else { s2 }, v)?;
                ep.map(&m, |s| graph(&hp, s))
            },
            move |v| ec.map(&c.mcreate(v)?, |s| graph(&hc, s)),
        )
    };
    let from = if forward { sp1 } else { sp2 };
    let span = Span::new(
        format!("graph {}", h.name()),
        leg(from.left(), "graph.left"),
        leg(from.right(), "graph.right"),
    )?;
    Ok(BisimWitness::new(span))
}

/// A span of pure lenses between two state carriers.
#[derive(Debug, Clone)]
pub struct LensSpan {
    pub state: Carrier,
    pub left: PureLens,
    pub right: PureLens,
}

/// Both lens laws for each leg of `ls`, and the two equations
/// `ls.left ; sp1.leg = ls.right ; sp2.leg` for each side.
pub fn check_lens_span(ls: &LensSpan, sp1: &Span, sp2: &Span) -> Result<LawReport> {
    compatible(sp1, sp2)?;
    ls.left.view().expect_same(sp1.state(), "lens span left")?;
    ls.right
        .view()
        .expect_same(sp2.state(), "lens span right")?;
    let mut report = LawReport::new(format!(
        "lens span between {} and {}",
        sp1.name(),
        sp2.name()
    ));
    report.absorb("l", check_pure_laws(&ls.left)?);
    report.absorb("r", check_pure_laws(&ls.right)?);
    let e = sp1.effect();
    let (l, r) = (lens2mlens(e, &ls.left), lens2mlens(e, &ls.right));
    record_lens_equation(
        &mut report,
        "LeftLegs",
        &compose_m(&l, sp1.left())?,
        &compose_m(&r, sp2.left())?,
    )?;
    record_lens_equation(
        &mut report,
        "RightLegs",
        &compose_m(&l, sp1.right())?,
        &compose_m(&r, sp2.right())?,
    )?;
    Ok(report)
}

fn pure_identity_legs(sp: &Span) -> Result<(PureLens, PureLens)> {
    if !sp.effect().is_identity() {
        return Err(BxError::NonPureInput(format!(
            "{} runs in {}",
            sp.name(),
            sp.effect()
        )));
    }
    Ok((mlens_to_pure(sp.left())?, mlens_to_pure(sp.right())?))
}

fn require_bisim(sp1: &Span, sp2: &Span, w: &BisimWitness) -> Result<()> {
    let report = verify_equivalence(sp1, sp2, &EquivWitness::Bisim(w.clone()))?;
    if report.passed() {
        Ok(())
    } else {
        let why = report
            .first_violation()
            .map(|v| v.to_string())
            .unwrap_or_default();
        Err(BxError::InvalidWitness(why))
    }
}

/// The span `(l, r)` over the relation of `w` exactly as the classical
/// construction reads: `l.put (s1, s2) s1' = l0.put (s1, s2) (l1.get s1')`,
/// `l.create s1 = l0.create (l1.get s1)`, and the mirror image for `r`,
/// where `l0` is the bisimulation's left leg and `l1`, `l2` the left legs
/// of the two spans.
///
/// Only the left legs are consulted, and a put forgets any part of the
/// state that `l1.get` does not show, so the result generally fails the
/// lens laws. [`span_witness_from_bisim`] is the working construction.
pub fn direct_span_witness(sp1: &Span, sp2: &Span, w: &BisimWitness) -> Result<LensSpan> {
    let (l1, _) = pure_identity_legs(sp1)?;
    let (l2, _) = pure_identity_legs(sp2)?;
    require_bisim(sp1, sp2, w)?;
    let (l0, _) = pure_identity_legs(&w.span)?;
    let rel = w.relation().clone();
    let (p1, c1, p2, c2) = (l0.clone(), l0.clone(), l0.clone(), l0);
    let (g1, h1, g2, h2) = (l1.clone(), l1, l2.clone(), l2);
    let left = PureLens::new(
        "l",
        rel.clone(),
        sp1.state().clone(),
        |p| Ok(p.split_pair()?.0.clone()),
        move |p, s1| p1.put(p, &g1.get(s1)?),
        move |s1| c1.create(&h1.get(s1)?),
    );
    let right = PureLens::new(
        "r",
        rel.clone(),
        sp2.state().clone(),
        |p| Ok(p.split_pair()?.1.clone()),
        move |p, s2| p2.put(p, &g2.get(s2)?),
        move |s2| c2.create(&h2.get(s2)?),
    );
    Ok(LensSpan {
        state: rel,
        left,
        right,
    })
}

/// Forced cells of one put row or of the create tables: key is the
/// argument, value the required result pair.
type Forced = BTreeMap<usize, Value>;

fn force(map: &mut Forced, key: usize, value: Value) -> bool {
    match map.get(&key) {
        Some(v) => v == &value,
        None => {
            map.insert(key, value);
            true
        }
    }
}

/// A span of full lenses between the state carriers of two pure spans,
/// whenever one exists.
///
/// Any such span can be replaced by one whose state is a set `G` of pairs
/// `(s1, s2)` with the projections as gets. The equations then fix some
/// cells: `l.put (s1, s2) (l1.put s1 a) = (l1.put s1 a, l2.put s2 a)`, the
/// same through the right legs and for `r`, `l.put g (fst g) = g`, and the
/// creates likewise. So `G` must hold only pairs that agree on both gets
/// and force no cell two ways, must be closed under the forced results, and
/// must contain the forced creates and cover both state carriers. The
/// largest such set is computed; other cells take the first pair of `G`
/// with the required component. `NoSpanWitness` when no `G` exists.
///
/// `w` must verify; it is a precondition, not an ingredient.
pub fn span_witness_from_bisim(sp1: &Span, sp2: &Span, w: &BisimWitness) -> Result<LensSpan> {
    let (l1, r1) = pure_identity_legs(sp1)?;
    let (l2, r2) = pure_identity_legs(sp2)?;
    require_bisim(sp1, sp2, w)?;
    let (s1c, s2c) = (sp1.state(), sp2.state());
    let product = Carrier::product(s1c, s2c);
    let a_view = sp1.left_view().elements();
    let b_view = sp1.right_view().elements();

    // Per pair: forced put cells on both sides and its successors.
    struct Row {
        ok: bool,
        left: Forced,
        right: Forced,
        next: Vec<Value>,
    }
    let mut rows = Vec::with_capacity(product.len());
    for p in product.elements() {
        let (s1, s2) = p.split_pair()?;
        let mut row = Row {
            ok: l1.get(s1)? == l2.get(s2)? && r1.get(s1)? == r2.get(s2)?,
            left: Forced::new(),
            right: Forced::new(),
            next: Vec::new(),
        };
        if row.ok {
            row.ok &= force(&mut row.left, s1c.position(s1)?, p.clone());
            row.ok &= force(&mut row.right, s2c.position(s2)?, p.clone());
            let moves = a_view
                .iter()
                .map(|a| Ok((l1.put(s1, a)?, l2.put(s2, a)?)))
                .chain(b_view.iter().map(|b| Ok((r1.put(s1, b)?, r2.put(s2, b)?))));
            for m in moves {
                let (t1, t2): (Value, Value) = m?;
                let q = Value::pair(t1.clone(), t2.clone());
                row.ok &= force(&mut row.left, s1c.position(&t1)?, q.clone());
                row.ok &= force(&mut row.right, s2c.position(&t2)?, q.clone());
                row.next.push(q);
            }
        }
        rows.push(row);
    }

    let mut keep: Vec<bool> = rows.iter().map(|r| r.ok).collect();
    loop {
        let mut changed = false;
        for i in 0..rows.len() {
            if keep[i] {
                for q in &rows[i].next {
                    if !keep[product.position(q)?] {
                        keep[i] = false;
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let (mut create_l, mut create_r) = (Forced::new(), Forced::new());
    let creates = a_view
        .iter()
        .map(|a| Ok((l1.create(a)?, l2.create(a)?)))
        .chain(b_view.iter().map(|b| Ok((r1.create(b)?, r2.create(b)?))));
    for c in creates {
        let (t1, t2): (Value, Value) = c?;
        let q = Value::pair(t1.clone(), t2.clone());
        if !keep[product.position(&q)?] {
            return Err(BxError::NoSpanWitness(format!(
                "the created pair {q} cannot belong to any closed consistent set"
            )));
        }
        if !force(&mut create_l, s1c.position(&t1)?, q.clone())
            || !force(&mut create_r, s2c.position(&t2)?, q.clone())
        {
            return Err(BxError::NoSpanWitness(format!(
                "creates disagree about {q}"
            )));
        }
    }

    let g = product.filter("G", |p| keep[product.position(p).expect("own element")]);
    let mut first_l: Vec<Option<usize>> = vec![None; s1c.len()];
    let mut first_r: Vec<Option<usize>> = vec![None; s2c.len()];
    for (k, p) in g.elements().iter().enumerate() {
        let (s1, s2) = p.split_pair()?;
        first_l[s1c.position(s1)?].get_or_insert(k);
        first_r[s2c.position(s2)?].get_or_insert(k);
    }
    if let Some(i) = first_l.iter().position(Option::is_none) {
        return Err(BxError::NoSpanWitness(format!(
            "no usable pair covers {}",
            s1c.elements()[i]
        )));
    }
    if let Some(j) = first_r.iter().position(Option::is_none) {
        return Err(BxError::NoSpanWitness(format!(
            "no usable pair covers {}",
            s2c.elements()[j]
        )));
    }

    let pick = |forced: &Forced, key: usize, first: &[Option<usize>]| -> Result<usize> {
        match forced.get(&key) {
            Some(q) => g.position(q),
            None => Ok(first[key].expect("covered")),
        }
    };
    let mut lt = LensTable {
        get: Vec::new(),
        put: Vec::new(),
        create: Vec::new(),
    };
    let mut rt = lt.clone();
    for p in g.elements() {
        let (s1, s2) = p.split_pair()?;
        let row = &rows[product.position(p)?];
        lt.get.push(s1c.position(s1)?);
        rt.get.push(s2c.position(s2)?);
        lt.put.push(
            (0..s1c.len())
                .map(|k| pick(&row.left, k, &first_l))
                .collect::<Result<_>>()?,
        );
        rt.put.push(
            (0..s2c.len())
                .map(|k| pick(&row.right, k, &first_r))
                .collect::<Result<_>>()?,
        );
    }
    lt.create = (0..s1c.len())
        .map(|k| pick(&create_l, k, &first_l))
        .collect::<Result<_>>()?;
    rt.create = (0..s2c.len())
        .map(|k| pick(&create_r, k, &first_r))
        .collect::<Result<_>>()?;
    Ok(LensSpan {
        left: PureLens::from_table("l", g.clone(), s1c.clone(), lt)?,
        right: PureLens::from_table("r", g.clone(), s2c.clone(), rt)?,
        state: g,
    })
}

/// `l1 ⋈ l2` for pure lenses, as a lens span.
pub fn pure_join(l1: &PureLens, l2: &PureLens) -> Result<LensSpan> {
    let j = join(
        &lens2mlens(&Effect::Identity, l1),
        &lens2mlens(&Effect::Identity, l2),
    )?;
    Ok(LensSpan {
        state: j.state().clone(),
        left: mlens_to_pure(j.left())?,
        right: mlens_to_pure(j.right())?,
    })
}

/// Collapses a chain `start = sp_0, sp_1, ..., sp_n` of single
/// span-equivalence steps into one span of pure lenses between the state
/// carriers of `sp_0` and `sp_n`. Each step is verified first.
pub fn normalize_equiv_chain(start: &Span, steps: &[(Span, SpanEquivWitness)]) -> Result<LensSpan> {
    let mut prev = start;
    for (i, (next, w)) in steps.iter().enumerate() {
        let report = verify_equivalence(prev, next, &EquivWitness::Span(w.clone()))
            .map_err(|e| BxError::InvalidChain(format!("step {i}: {e}")))?;
        if let Some(v) = report.first_violation() {
            return Err(BxError::InvalidChain(format!("step {i}: {v}")));
        }
        prev = next;
    }
    let last = prev.state();
    let mut acc = LensSpan {
        state: last.clone(),
        left: id_lens(last),
        right: id_lens(last),
    };
    for (_, w) in steps.iter().rev() {
        acc = match w.direction {
            Direction::Backward => LensSpan {
                left: compose_pure(&acc.left, &w.lens)?,
                ..acc
            },
            Direction::Forward => {
                let j = pure_join(&w.lens, &acc.left)?;
                LensSpan {
                    right: compose_pure(&j.right, &acc.right)?,
                    state: j.state,
                    left: j.left,
                }
            }
        };
    }
    Ok(acc)
}

/// Lifts a witness between `sp1` and `sp2` to one between `sp1 ; sp3` and
/// `sp2 ; sp3`: the lens acts on the first component of the state pairs.
pub fn lift_witness_right(
    w: &SpanEquivWitness,
    sp1: &Span,
    sp2: &Span,
    sp3: &Span,
) -> Result<(Span, Span, SpanEquivWitness)> {
    let c1 = crate::spans::compose_span(sp1, sp3)?;
    let c2 = crate::spans::compose_span(sp2, sp3)?;
    let (from, to) = match w.direction {
        Direction::Forward => (&c1, &c2),
        Direction::Backward => (&c2, &c1),
    };
    let lens = on_component(&w.lens, from.state(), to.state(), 0)?;
    Ok((
        c1,
        c2,
        SpanEquivWitness {
            lens,
            direction: w.direction,
        },
    ))
}

/// Lifts a witness between `sp1` and `sp2` to one between `sp3 ; sp1` and
/// `sp3 ; sp2`, acting on the second component.
pub fn lift_witness_left(
    w: &SpanEquivWitness,
    sp3: &Span,
    sp1: &Span,
    sp2: &Span,
) -> Result<(Span, Span, SpanEquivWitness)> {
    let c1 = crate::spans::compose_span(sp3, sp1)?;
    let c2 = crate::spans::compose_span(sp3, sp2)?;
    let (from, to) = match w.direction {
        Direction::Forward => (&c1, &c2),
        Direction::Backward => (&c2, &c1),
    };
    let lens = on_component(&w.lens, from.state(), to.state(), 1)?;
    Ok((
        c1,
        c2,
        SpanEquivWitness {
            lens,
            direction: w.direction,
        },
    ))
}

fn on_component(h: &PureLens, source: &Carrier, view: &Carrier, k: usize) -> Result<PureLens> {
    let swap = move |p: &Value, x: Value| -> Result<Value> {
        let (a, b) = p.split_pair()?;
        Ok(if k == 0 {
            Value::pair(x, b.clone())
        } else {
            Value::pair(a.clone(), x)
        })
    };
    let (g, p, c) = (h.clone(), h.clone(), h.clone());
    Ok(PureLens::new(
        format!("{} on component {k}", h.name()),
        source.clone(),
        view.clone(),
        move |s| swap(s, g.get(s.component(k)?)?),
        move |s, t| swap(t, p.put(s.component(k)?, t.component(k)?)?),
        move |t| swap(t, c.create(t.component(k)?)?),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spans::id_span;

    fn unit_span() -> Span {
        id_span(&Effect::Identity, &Carrier::unit())
    }

    fn collapse() -> PureLens {
        PureLens::new(
            "h",
            Carrier::bool(),
            Carrier::unit(),
            |_| Ok(Value::Unit),
            |a, _| Ok(a.clone()),
            |_| Ok(Value::Bool(true)),
        )
    }

    fn bool_span() -> Span {
        let lifted = lens2mlens(&Effect::Identity, &collapse());
        let sp1 = unit_span();
        Span::new(
            "bool",
            compose_m(&lifted, sp1.left()).unwrap(),
            compose_m(&lifted, sp1.right()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn unit_and_bool_spans_are_span_but_not_iso_equivalent() {
        let (sp1, sp2) = (unit_span(), bool_span());
        assert!(search_equivalence(EquivKind::Iso, &sp1, &sp2, 1000)
            .unwrap()
            .is_none());
        let w = SpanEquivWitness::backward(collapse());
        assert!(verify_equivalence(&sp1, &sp2, &EquivWitness::Span(w))
            .unwrap()
            .passed());
        let Some(EquivWitness::Span(found)) =
            search_equivalence(EquivKind::Span, &sp1, &sp2, 1000).unwrap()
        else {
            panic!("span witness expected");
        };
        assert_eq!(found.direction, Direction::Backward);
        assert_eq!(found.lens.create(&Value::Unit).unwrap(), Value::Bool(true));
    }

    #[test]
    fn graph_of_witness_is_a_bisimulation() {
        let (sp1, sp2) = (bool_span(), unit_span());
        let w = SpanEquivWitness::forward(collapse());
        let b = bisim_from_span_witness(&sp1, &sp2, &w).unwrap();
        assert_eq!(
            b.relation().elements(),
            &[
                Value::pair(Value::Bool(false), Value::Unit),
                Value::pair(Value::Bool(true), Value::Unit)
            ]
        );
        assert!(
            verify_equivalence(&sp1, &sp2, &EquivWitness::Bisim(b.clone()))
                .unwrap()
                .passed()
        );
        let ls = span_witness_from_bisim(&sp1, &sp2, &b).unwrap();
        assert!(check_lens_span(&ls, &sp1, &sp2).unwrap().passed());
    }

    #[test]
    fn identity_witnesses_verify() {
        let sp = id_span(&Effect::Maybe, &Carrier::int_range(0, 2));
        let iso = IsoWitness::identity(sp.state());
        assert!(verify_equivalence(&sp, &sp, &EquivWitness::Iso(iso))
            .unwrap()
            .passed());
        let Some(EquivWitness::Bisim(b)) =
            search_equivalence(EquivKind::Bisim, &sp, &sp, 1000).unwrap()
        else {
            panic!("bisimulation expected");
        };
        let diag: Vec<Value> = (0..3)
            .map(|x| Value::pair(Value::Int(x), Value::Int(x)))
            .collect();
        assert_eq!(b.relation().elements(), &diag[..]);
    }

    #[test]
    fn constant_base_map_fails_on_put() {
        let c = Carrier::int_range(0, 1);
        let l = lens2mlens(&Effect::Maybe, &id_lens(&c));
        let h = BaseMap::new("zero", &c, &c, |_| Ok(Value::Int(0))).unwrap();
        let report = check_base_map(&h, &l, &l).unwrap();
        assert!(!report.passed());
        assert!(report.violation("BasePut").is_some());
    }

    #[test]
    fn chain_of_one_forward_step() {
        let (sp1, sp2) = (bool_span(), unit_span());
        let ls = normalize_equiv_chain(
            &sp1,
            &[(sp2.clone(), SpanEquivWitness::forward(collapse()))],
        )
        .unwrap();
        assert!(check_lens_span(&ls, &sp1, &sp2).unwrap().passed());
        let ls = normalize_equiv_chain(&sp1, &[]).unwrap();
        assert!(check_lens_span(&ls, &sp1, &sp1).unwrap().passed());
    }

    #[test]
    fn permutations_in_order() {
        let mut p = vec![0, 1, 2];
        let mut seen = vec![p.clone()];
        while next_permutation(&mut p) {
            seen.push(p.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
    }
}
