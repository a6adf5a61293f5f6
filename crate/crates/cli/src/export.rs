//! Runtime objects back into lens-file declarations.

use std::collections::BTreeSet;

use bxlens::equivalence::{BaseMap, IsoWitness, SpanEquivWitness};
use bxlens::lens::PureLens;
use bxlens::mlens::MLens;
use bxlens::spans::Span;
use bxlens::symmetric::{SLens, SMLens};
use bxlens::{Carrier, Effect, Monoid, Value};

use crate::format::{
    effect_lit, Decl, EffectDecl, LensFile, LogDecl, MLensDef, MapDef, PureDef, SymDef,
};

fn sanitize(s: &str) -> String {
    if s == "()" {
        return "Unit".to_string();
    }
    let mut out = String::new();
    for c in s.chars() {
        if c.is_alphanumeric() || c == '_' || c == '\'' {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let out = out.trim_matches('_').to_string();
    match out.chars().next() {
        None => "C".to_string(),
        Some(c) if !c.is_alphabetic() => format!("x{out}"),
        _ => out,
    }
}

type Res<T> = Result<T, String>;

fn err(e: bxlens::BxError) -> String {
    e.to_string()
}

/// Accumulates declarations; carriers and effects are emitted on first use.
pub struct Exporter {
    decls: Vec<Decl>,
    carriers: Vec<(String, Carrier)>,
    names: BTreeSet<String>,
    effect: Effect,
}

impl Default for Exporter {
    fn default() -> Self {
        Exporter::new()
    }
}

impl Exporter {
    pub fn new() -> Exporter {
        Exporter {
            decls: Vec::new(),
            carriers: Vec::new(),
            names: BTreeSet::new(),
            effect: Effect::Identity,
        }
    }

    fn name(&mut self, wanted: &str) -> String {
        let base = sanitize(wanted);
        let mut name = base.clone();
        let mut i = 2;
        while self.names.contains(&name) {
            name = format!("{base}{i}");
            i += 1;
        }
        self.names.insert(name.clone());
        name
    }

    pub fn carrier(&mut self, c: &Carrier) -> String {
        if let Some((n, _)) = self
            .carriers
            .iter()
            .find(|(_, k)| k.elements() == c.elements())
        {
            return n.clone();
        }
        let name = self.name(c.name());
        self.carriers.push((name.clone(), c.clone()));
        self.decls.push(Decl::Carrier {
            name: name.clone(),
            elements: c.elements().to_vec(),
        });
        name
    }

    fn effect(&mut self, e: &Effect) -> Res<()> {
        if *e == self.effect {
            return Ok(());
        }
        let decl = match e {
            Effect::Identity => EffectDecl::Identity,
            Effect::Maybe => EffectDecl::Maybe,
            Effect::List => EffectDecl::List,
            Effect::State(c) => EffectDecl::State(self.carrier(c)),
            Effect::Writer(Monoid::FreeList(c)) => {
                EffectDecl::Writer(LogDecl::List(self.carrier(c)))
            }
            Effect::Writer(Monoid::Multiset(c)) => {
                EffectDecl::Writer(LogDecl::Multiset(self.carrier(c)))
            }
            Effect::Writer(Monoid::Finite(m)) => match m.name() {
                "Z2" => EffectDecl::Writer(LogDecl::Xor),
                "Or" => EffectDecl::Writer(LogDecl::Or),
                other => return Err(format!("the log monoid {other} has no file syntax")),
            },
        };
        self.decls.push(Decl::Effect(decl));
        self.effect = e.clone();
        Ok(())
    }

    pub fn pure(&mut self, name: &str, l: &PureLens) -> Res<String> {
        let (a, b) = (self.carrier(l.source()), self.carrier(l.view()));
        let name = self.name(name);
        let mut def = PureDef {
            name: name.clone(),
            source: a,
            view: b,
            get: Vec::new(),
            put: Vec::new(),
            create: Vec::new(),
        };
        for x in l.source().elements() {
            def.get.push((x.clone(), l.get(x).map_err(err)?));
        }
        for x in l.source().elements() {
            for y in l.view().elements() {
                def.put
                    .push((x.clone(), y.clone(), l.put(x, y).map_err(err)?));
            }
        }
        for y in l.view().elements() {
            def.create.push((y.clone(), l.create(y).map_err(err)?));
        }
        self.decls.push(Decl::Pure(def));
        Ok(name)
    }

    pub fn mlens(&mut self, name: &str, l: &MLens) -> Res<String> {
        let (a, b) = (self.carrier(l.source()), self.carrier(l.view()));
        self.effect(l.effect())?;
        let name = self.name(name);
        let e = l.effect();
        let mut def = MLensDef {
            name: name.clone(),
            source: a,
            view: b,
            get: Vec::new(),
            put: Vec::new(),
            create: Vec::new(),
        };
        for x in l.source().elements() {
            def.get.push((x.clone(), l.mget(x).map_err(err)?));
        }
        for x in l.source().elements() {
            for y in l.view().elements() {
                def.put.push((
                    x.clone(),
                    y.clone(),
                    effect_lit(e, &l.mput(x, y).map_err(err)?),
                ));
            }
        }
        for y in l.view().elements() {
            def.create
                .push((y.clone(), effect_lit(e, &l.mcreate(y).map_err(err)?)));
        }
        self.decls.push(Decl::MLens(def));
        Ok(name)
    }

    fn sym_names(
        &mut self,
        name: &str,
        left: &Carrier,
        right: &Carrier,
        complement: &Carrier,
    ) -> [String; 4] {
        let (a, b, c) = (
            self.carrier(left),
            self.carrier(right),
            self.carrier(complement),
        );
        [self.name(name), a, b, c]
    }

    pub fn slens(&mut self, name: &str, sl: &SLens) -> Res<String> {
        let [name, a, b, c] = self.sym_names(name, sl.left(), sl.right(), sl.complement());
        let mut def = SymDef {
            name: name.clone(),
            left: a,
            right: b,
            complement: c,
            put_r: Vec::new(),
            put_l: Vec::new(),
            missing: sl.missing().clone(),
        };
        for x in sl.left().elements() {
            for k in sl.complement().elements() {
                let (y, k2) = sl.put_r(x, k).map_err(err)?;
                def.put_r.push((x.clone(), k.clone(), Value::pair(y, k2)));
            }
        }
        for y in sl.right().elements() {
            for k in sl.complement().elements() {
                let (x, k2) = sl.put_l(y, k).map_err(err)?;
                def.put_l.push((y.clone(), k.clone(), Value::pair(x, k2)));
            }
        }
        self.decls.push(Decl::SLens(def));
        Ok(name)
    }

    pub fn smlens(&mut self, name: &str, sl: &SMLens) -> Res<String> {
        let [name, a, b, c] = self.sym_names(name, sl.left(), sl.right(), sl.complement());
        self.effect(sl.effect())?;
        let e = sl.effect();
        let mut def = SymDef {
            name: name.clone(),
            left: a,
            right: b,
            complement: c,
            put_r: Vec::new(),
            put_l: Vec::new(),
            missing: sl.missing().clone(),
        };
        for x in sl.left().elements() {
            for k in sl.complement().elements() {
                def.put_r.push((
                    x.clone(),
                    k.clone(),
                    effect_lit(e, &sl.mput_r(x, k).map_err(err)?),
                ));
            }
        }
        for y in sl.right().elements() {
            for k in sl.complement().elements() {
                def.put_l.push((
                    y.clone(),
                    k.clone(),
                    effect_lit(e, &sl.mput_l(y, k).map_err(err)?),
                ));
            }
        }
        self.decls.push(Decl::SMLens(def));
        Ok(name)
    }

    pub fn span(&mut self, name: &str, sp: &Span) -> Res<String> {
        let left = self.mlens(&format!("{name}_left"), sp.left())?;
        let right = self.mlens(&format!("{name}_right"), sp.right())?;
        let name = self.name(name);
        self.decls.push(Decl::Span {
            name: name.clone(),
            left,
            right,
        });
        Ok(name)
    }

    pub fn map(&mut self, name: &str, m: &BaseMap) -> Res<String> {
        let (s, t) = (self.carrier(m.source()), self.carrier(m.target()));
        let name = self.name(name);
        let images = m
            .source()
            .elements()
            .iter()
            .cloned()
            .zip(m.images().iter().cloned())
            .collect();
        self.decls.push(Decl::Map(MapDef {
            name: name.clone(),
            source: s,
            target: t,
            images,
        }));
        Ok(name)
    }

    pub fn iso(&mut self, name: &str, iso: &IsoWitness) -> Res<String> {
        let forward = self.map(&format!("{name}_forward"), &iso.forward)?;
        let backward = self.map(&format!("{name}_backward"), &iso.backward)?;
        let name = self.name(name);
        self.decls.push(Decl::Iso {
            name: name.clone(),
            forward,
            backward,
        });
        Ok(name)
    }

    pub fn witness(&mut self, name: &str, w: &SpanEquivWitness) -> Res<String> {
        let lens = self.pure(&format!("{name}_lens"), &w.lens)?;
        let name = self.name(name);
        self.decls.push(Decl::Witness {
            name: name.clone(),
            direction: w.direction,
            lens,
        });
        Ok(name)
    }

    pub fn finish(self) -> LensFile {
        LensFile { decls: self.decls }
    }
}
