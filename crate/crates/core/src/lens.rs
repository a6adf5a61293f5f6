//! Pure full lenses: get, put and create.

use std::fmt;
use std::sync::Arc;

use crate::error::{BxError, Result};
use crate::report::{LawReport, Violation};
use crate::value::{Carrier, Value};

pub type ValueFn = Arc<dyn Fn(&Value) -> Result<Value> + Send + Sync>;
pub type ValueFn2 = Arc<dyn Fn(&Value, &Value) -> Result<Value> + Send + Sync>;

/// A full lens from `source` to `view`.
///
/// The operations are total over the declared carriers; every call checks
/// its arguments and its result against them.
#[derive(Clone)]
pub struct PureLens {
    name: String,
    source: Carrier,
    view: Carrier,
    get: ValueFn,
    put: ValueFn2,
    create: ValueFn,
}

/// Index tables of a lens over its carriers' enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LensTable {
    pub get: Vec<usize>,
    /// `put[a][b]`.
    pub put: Vec<Vec<usize>>,
    pub create: Vec<usize>,
}

impl PureLens {
    pub fn new(
        name: impl Into<String>,
        source: Carrier,
        view: Carrier,
        get: impl Fn(&Value) -> Result<Value> + Send + Sync + 'static,
        put: impl Fn(&Value, &Value) -> Result<Value> + Send + Sync + 'static,
        create: impl Fn(&Value) -> Result<Value> + Send + Sync + 'static,
    ) -> PureLens {
        PureLens {
            name: name.into(),
            source,
            view,
            get: Arc::new(get),
            put: Arc::new(put),
            create: Arc::new(create),
        }
    }

    /// Builds a lens from index tables; dimensions are validated.
    pub fn from_table(
        name: impl Into<String>,
        source: Carrier,
        view: Carrier,
        table: LensTable,
    ) -> Result<PureLens> {
        let (na, nb) = (source.len(), view.len());
        let dims_ok = table.get.len() == na
            && table.get.iter().all(|&b| b < nb)
            && table.put.len() == na
            && table
                .put
                .iter()
                .all(|row| row.len() == nb && row.iter().all(|&a| a < na))
            && table.create.len() == nb
            && table.create.iter().all(|&a| a < na);
        if !dims_ok {
            return Err(BxError::Shape(format!(
                "lens table does not fit {} ~> {}",
                source.name(),
                view.name()
            )));
        }
        let table = Arc::new(table);
        let (s1, v1, t1) = (source.clone(), view.clone(), table.clone());
        let (s2, t2) = (source.clone(), table.clone());
        let (s3, v3, t3) = (source.clone(), view.clone(), table);
        let v2 = view.clone();
        Ok(PureLens::new(
            name,
            source,
            view,
            move |a| Ok(v1.elements()[t1.get[s1.position(a)?]].clone()),
            move |a, b| Ok(s2.elements()[t2.put[s2.position(a)?][v2.position(b)?]].clone()),
            move |b| Ok(s3.elements()[t3.create[v3.position(b)?]].clone()),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> PureLens {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn view(&self) -> &Carrier {
        &self.view
    }

    pub fn get(&self, a: &Value) -> Result<Value> {
        self.source.check_member(a)?;
        let b = (self.get)(a)?;
        self.view.check_member(&b)?;
        Ok(b)
    }

    pub fn put(&self, a: &Value, b: &Value) -> Result<Value> {
        self.source.check_member(a)?;
        self.view.check_member(b)?;
        let a2 = (self.put)(a, b)?;
        self.source.check_member(&a2)?;
        Ok(a2)
    }

    pub fn create(&self, b: &Value) -> Result<Value> {
        self.view.check_member(b)?;
        let a = (self.create)(b)?;
        self.source.check_member(&a)?;
        Ok(a)
    }

    pub fn tabulate(&self) -> Result<LensTable> {
        let mut get = Vec::with_capacity(self.source.len());
        let mut put = Vec::with_capacity(self.source.len());
        for a in self.source.elements() {
            get.push(self.view.position(&self.get(a)?)?);
            let mut row = Vec::with_capacity(self.view.len());
            for b in self.view.elements() {
                row.push(self.source.position(&self.put(a, b)?)?);
            }
            put.push(row);
        }
        let mut create = Vec::with_capacity(self.view.len());
        for b in self.view.elements() {
            create.push(self.source.position(&self.create(b)?)?);
        }
        Ok(LensTable { get, put, create })
    }

    /// Whether every view element is reached by `get`.
    pub fn get_is_surjective(&self) -> Result<bool> {
        let mut hit = vec![false; self.view.len()];
        for a in self.source.elements() {
            hit[self.view.position(&self.get(a)?)?] = true;
        }
        Ok(hit.into_iter().all(|h| h))
    }
}

impl fmt::Debug for PureLens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PureLens({} : {} ~> {})",
            self.name,
            self.source.name(),
            self.view.name()
        )
    }
}

/// `l1 ; l2`.
pub fn compose_pure(l1: &PureLens, l2: &PureLens) -> Result<PureLens> {
    l1.view.expect_same(&l2.source, "pure lens composition")?;
    let (g1, g2) = (l1.clone(), l2.clone());
    let (p1, p2) = (l1.clone(), l2.clone());
    let (c1, c2) = (l1.clone(), l2.clone());
    Ok(PureLens::new(
        format!("({} ; {})", l1.name, l2.name),
        l1.source.clone(),
        l2.view.clone(),
        move |a| g2.get(&g1.get(a)?),
        move |a, c| p1.put(a, &p2.put(&p1.get(a)?, c)?),
        move |c| c1.create(&c2.create(c)?),
    ))
}

/// The identity lens.
pub fn id_lens(c: &Carrier) -> PureLens {
    PureLens::new(
        format!("id {}", c.name()),
        c.clone(),
        c.clone(),
        |a| Ok(a.clone()),
        |_, b| Ok(b.clone()),
        |b| Ok(b.clone()),
    )
}

/// First projection from `a * b`; `create x` pairs `x` with `default`.
pub fn fst_lens(a: &Carrier, b: &Carrier, default: Value) -> Result<PureLens> {
    b.check_member(&default)?;
    Ok(PureLens::new(
        format!("fst {}*{}", a.name(), b.name()),
        Carrier::product(a, b),
        a.clone(),
        |s| Ok(s.component(0)?.clone()),
        |s, x| Ok(Value::pair(x.clone(), s.component(1)?.clone())),
        move |x| Ok(Value::pair(x.clone(), default.clone())),
    ))
}

/// Second projection from `a * b`; `create y` pairs `default` with `y`.
pub fn snd_lens(a: &Carrier, b: &Carrier, default: Value) -> Result<PureLens> {
    a.check_member(&default)?;
    Ok(PureLens::new(
        format!("snd {}*{}", a.name(), b.name()),
        Carrier::product(a, b),
        b.clone(),
        |s| Ok(s.component(1)?.clone()),
        |s, y| Ok(Value::pair(s.component(0)?.clone(), y.clone())),
        move |y| Ok(Value::pair(default.clone(), y.clone())),
    ))
}

fn ab(a: &Value, b: &Value) -> Vec<(String, Value)> {
    vec![("a".into(), a.clone()), ("b".into(), b.clone())]
}

/// GetPut, PutGet and CreateGet over every source and view element.
pub fn check_pure_laws(l: &PureLens) -> Result<LawReport> {
    let mut report = LawReport::new(format!("pure lens {}", l.name));
    for law in ["GetPut", "PutGet", "CreateGet"] {
        report.declare(law);
    }
    for a in l.source.elements() {
        let b = l.get(a)?;
        let back = l.put(a, &b)?;
        report.record("GetPut", &back == a, || {
            Violation::new(
                "GetPut",
                vec![("a".into(), a.clone())],
                back.to_string(),
                a.to_string(),
            )
        });
    }
    for a in l.source.elements() {
        for b in l.view.elements() {
            let got = l.get(&l.put(a, b)?)?;
            report.record("PutGet", &got == b, || {
                Violation::new("PutGet", ab(a, b), got.to_string(), b.to_string())
            });
        }
    }
    for b in l.view.elements() {
        let got = l.get(&l.create(b)?)?;
        report.record("CreateGet", &got == b, || {
            Violation::new(
                "CreateGet",
                vec![("b".into(), b.clone())],
                got.to_string(),
                b.to_string(),
            )
        });
    }
    Ok(report)
}

/// The first point where two lenses over the same carriers disagree.
pub fn pure_difference(l1: &PureLens, l2: &PureLens) -> Result<Option<String>> {
    l1.source
        .expect_same(&l2.source, "lens comparison (source)")?;
    l1.view.expect_same(&l2.view, "lens comparison (view)")?;
    for a in l1.source.elements() {
        let (x, y) = (l1.get(a)?, l2.get(a)?);
        if x != y {
            return Ok(Some(format!("get {a}: {x} vs {y}")));
        }
    }
    for a in l1.source.elements() {
        for b in l1.view.elements() {
            let (x, y) = (l1.put(a, b)?, l2.put(a, b)?);
            if x != y {
                return Ok(Some(format!("put {a} {b}: {x} vs {y}")));
            }
        }
    }
    for b in l1.view.elements() {
        let (x, y) = (l1.create(b)?, l2.create(b)?);
        if x != y {
            return Ok(Some(format!("create {b}: {x} vs {y}")));
        }
    }
    Ok(None)
}
