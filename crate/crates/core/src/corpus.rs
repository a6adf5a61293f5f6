//! Generators for small lawful structures: exhaustive where the space is
//! small, seeded random otherwise. Used by the property tests and examples.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::effects::{Bounds, Counter, Effect, EffectValue};
use crate::equivalence::{
    paired_bisim, verify_equivalence, BisimWitness, EquivWitness, SpanEquivWitness,
};
use crate::error::{BxError, Result};
use crate::lens::{LensTable, PureLens};
use crate::mlens::{lens2mlens, mlens_to_pure, Budget, MLens};
use crate::spans::Span;
use crate::symmetric::{SLens, SMLens};
use crate::value::{Carrier, Value};

fn fibres(get: &[usize], view_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); view_len];
    for (i, &j) in get.iter().enumerate() {
        out[j].push(i);
    }
    out
}

/// Every well-behaved lens from `source` to `view`, get table first.
pub fn lawful_pure_lenses(
    source: &Carrier,
    view: &Carrier,
    budget: &mut Budget,
) -> Result<Vec<PureLens>> {
    let (na, nb) = (source.len(), view.len());
    let mut out = Vec::new();
    for get in Counter::new(vec![nb; na]) {
        budget.spend(1)?;
        let fib = fibres(&get, nb);
        if fib.iter().any(Vec::is_empty) {
            continue;
        }
        let mut cells: Vec<Vec<usize>> = Vec::with_capacity(na * nb + nb);
        for &g in &get {
            for (j, f) in fib.iter().enumerate() {
                cells.push(if j == g {
                    vec![cells.len() / nb]
                } else {
                    f.clone()
                });
            }
        }
        cells.extend(fib.iter().cloned());
        for digits in Counter::new(cells.iter().map(Vec::len).collect()) {
            budget.spend(1)?;
            let pick: Vec<usize> = digits
                .iter()
                .enumerate()
                .map(|(k, &d)| cells[k][d])
                .collect();
            let table = LensTable {
                get: get.clone(),
                put: pick[..na * nb].chunks(nb).map(<[usize]>::to_vec).collect(),
                create: pick[na * nb..].to_vec(),
            };
            let name = format!("lens{}", out.len());
            out.push(PureLens::from_table(
                name,
                source.clone(),
                view.clone(),
                table,
            )?);
        }
    }
    Ok(out)
}

/// A random lawful monadic lens with a surjective `mget`. Each put and
/// create cell is drawn from the computations whose results lie in the
/// fibre of the view value, except `mput a (mget a) = return a`.
pub fn random_lawful_mlens<R: Rng + ?Sized>(
    rng: &mut R,
    effect: &Effect,
    source: &Carrier,
    view: &Carrier,
    bounds: &Bounds,
) -> Result<MLens> {
    let (na, nb) = (source.len(), view.len());
    if na < nb || (nb == 0 && na > 0) {
        return Err(BxError::InvalidParameter(format!(
            "no surjection from {} onto {}",
            source.name(),
            view.name()
        )));
    }
    let mut get: Vec<usize> = (0..na)
        .map(|i| if i < nb { i } else { rng.gen_range(0..nb) })
        .collect();
    get.shuffle(rng);
    let fib = fibres(&get, nb);
    let mut options = Vec::with_capacity(nb);
    for f in &fib {
        let sub = Carrier::new(
            format!("{}|fibre", source.name()),
            f.iter().map(|&i| source.elements()[i].clone()).collect(),
        )?;
        options.push(effect.enumerate(&sub, bounds)?);
    }
    let draw = |j: usize, rng: &mut R| -> EffectValue {
        let o = &options[j];
        o[rng.gen_range(0..o.len())].clone()
    };
    let mut put = Vec::with_capacity(na);
    for (i, a) in source.elements().iter().enumerate() {
        put.push(
            (0..nb)
                .map(|j| {
                    if j == get[i] {
                        effect.ret(a.clone())
                    } else {
                        draw(j, rng)
                    }
                })
                .collect(),
        );
    }
    let create = (0..nb).map(|j| draw(j, rng)).collect();
    let get_values = get.iter().map(|&j| view.elements()[j].clone()).collect();
    MLens::from_tables(
        "random",
        effect.clone(),
        source.clone(),
        view.clone(),
        get_values,
        put,
        create,
    )
}

pub fn random_pure_lens<R: Rng + ?Sized>(
    rng: &mut R,
    source: &Carrier,
    view: &Carrier,
) -> Result<PureLens> {
    let l = random_lawful_mlens(rng, &Effect::Identity, source, view, &Bounds::default())?;
    mlens_to_pure(&l)
}

/// A random well-behaved span.
pub fn random_span<R: Rng + ?Sized>(
    rng: &mut R,
    effect: &Effect,
    state: &Carrier,
    left: &Carrier,
    right: &Carrier,
) -> Result<Span> {
    let bounds = Bounds::default();
    let l = random_lawful_mlens(rng, effect, state, left, &bounds)?.with_name("left");
    let r = random_lawful_mlens(rng, effect, state, right, &bounds)?.with_name("right");
    Span::new("random", l, r)
}

fn cell(outer: &Carrier, complement: &Carrier, k: usize) -> (Value, Value) {
    let nc = complement.len();
    (
        outer.elements()[k / nc].clone(),
        complement.elements()[k % nc].clone(),
    )
}

/// Every pure symmetric lens satisfying PutRL and PutLR over the given
/// carriers, `putR` table first.
pub fn lawful_pure_slenses(
    left: &Carrier,
    right: &Carrier,
    complement: &Carrier,
    missing: &Value,
    budget: &mut Budget,
) -> Result<Vec<SLens>> {
    complement.check_member(missing)?;
    let (na, nb, nc) = (left.len(), right.len(), complement.len());
    let mut out = Vec::new();
    for r in Counter::new(vec![nb * nc; na * nc]) {
        budget.spend(1)?;
        // putL (b, c) must be some (a, c') with putR (a, c') = (b, c').
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); nb * nc];
        for a in 0..na {
            for c in 0..nc {
                let out_r = r[a * nc + c];
                let (b, c2) = (out_r / nc, out_r % nc);
                if c2 == c {
                    for cell in cells.iter_mut().skip(b * nc).take(nc) {
                        cell.push(a * nc + c);
                    }
                }
            }
        }
        'l: for digits in Counter::new(cells.iter().map(Vec::len).collect()) {
            budget.spend(1)?;
            let l: Vec<usize> = digits
                .iter()
                .enumerate()
                .map(|(k, &d)| cells[k][d])
                .collect();
            for a in 0..na {
                for c in 0..nc {
                    let (b, c2) = (r[a * nc + c] / nc, r[a * nc + c] % nc);
                    if l[b * nc + c2] != a * nc + c2 {
                        continue 'l;
                    }
                }
            }
            let (rt, lt) = (r.clone(), l);
            let (a1, b1, c1) = (left.clone(), right.clone(), complement.clone());
            let (a2, b2, c2) = (left.clone(), right.clone(), complement.clone());
            let name = format!("slens{}", out.len());
            out.push(SLens::new(
                name,
                left.clone(),
                right.clone(),
                complement.clone(),
                move |a, c| Ok(cell(&b1, &c1, rt[a1.position(a)? * nc + c1.position(c)?])),
                move |b, c| Ok(cell(&a2, &c2, lt[b2.position(b)? * nc + c2.position(c)?])),
                missing.clone(),
            )?);
        }
    }
    Ok(out)
}

/// Every monadic symmetric lens over `effect` satisfying PutRLM and
/// PutLRM, with cells drawn from [`Effect::enumerate`].
pub fn lawful_smlenses(
    effect: &Effect,
    left: &Carrier,
    right: &Carrier,
    complement: &Carrier,
    missing: &Value,
    bounds: &Bounds,
    budget: &mut Budget,
) -> Result<Vec<SMLens>> {
    use crate::symmetric::check_smlens_laws;
    complement.check_member(missing)?;
    let r_opts = effect.enumerate(&Carrier::product(right, complement), bounds)?;
    let l_opts = effect.enumerate(&Carrier::product(left, complement), bounds)?;
    let (nr, nl) = (
        left.len() * complement.len(),
        right.len() * complement.len(),
    );
    let radices: Vec<usize> = std::iter::repeat_n(r_opts.len(), nr)
        .chain(std::iter::repeat_n(l_opts.len(), nl))
        .collect();
    let nc = complement.len();
    let mut out = Vec::new();
    for digits in Counter::new(radices) {
        budget.spend(1)?;
        let rows = |opts: &[EffectValue], ds: &[usize]| -> Vec<Vec<EffectValue>> {
            ds.chunks(nc)
                .map(|row| row.iter().map(|&d| opts[d].clone()).collect())
                .collect()
        };
        let sl = SMLens::from_tables(
            format!("smlens{}", out.len()),
            effect.clone(),
            left.clone(),
            right.clone(),
            complement.clone(),
            rows(&r_opts, &digits[..nr]),
            rows(&l_opts, &digits[nr..]),
            missing.clone(),
        )?;
        if check_smlens_laws(&sl)?.passed() {
            out.push(sl);
        }
    }
    Ok(out)
}

/// Every span of well-behaved pure lenses (lifted to Identity) with the
/// given state and views.
pub fn lawful_pure_spans(
    state: &Carrier,
    left: &Carrier,
    right: &Carrier,
    budget: &mut Budget,
) -> Result<Vec<Span>> {
    let ls = lawful_pure_lenses(state, left, budget)?;
    let rs = lawful_pure_lenses(state, right, budget)?;
    let mut out = Vec::new();
    for l in &ls {
        for r in &rs {
            budget.spend(1)?;
            let name = format!("span{}", out.len());
            out.push(Span::new(
                name,
                lens2mlens(&Effect::Identity, l).with_name("left"),
                lens2mlens(&Effect::Identity, r).with_name("right"),
            )?);
        }
    }
    Ok(out)
}

/// Every single-step span witness between `sp1` and `sp2`: forward lenses
/// `S1 ~> S2` first, then backward lenses `S2 ~> S1`.
pub fn span_steps(sp1: &Span, sp2: &Span, budget: &mut Budget) -> Result<Vec<SpanEquivWitness>> {
    let mut out = Vec::new();
    let candidates = [
        (lawful_pure_lenses(sp1.state(), sp2.state(), budget)?, true),
        (lawful_pure_lenses(sp2.state(), sp1.state(), budget)?, false),
    ];
    for (lenses, forward) in candidates {
        for h in lenses {
            budget.spend(1)?;
            let w = if forward {
                SpanEquivWitness::forward(h)
            } else {
                SpanEquivWitness::backward(h)
            };
            if verify_equivalence(sp1, sp2, &EquivWitness::Span(w.clone()))?.passed() {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Every bisimulation between two spans: each nonempty relation
/// `R ⊆ S1 × S2`, in subset order, whose paired span verifies.
pub fn bisimulations(sp1: &Span, sp2: &Span, budget: &mut Budget) -> Result<Vec<BisimWitness>> {
    let product = Carrier::product(sp1.state(), sp2.state());
    let n = product.len();
    if n > 20 {
        return Err(BxError::bound(
            "relations over the state product",
            1u128 << n.min(127),
            1 << 20,
        ));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        budget.spend(1)?;
        let name = format!("R{mask}");
        let relation = product.filter(name, |p| {
            (mask >> product.position(p).unwrap_or(0)) & 1 == 1
        });
        let w = paired_bisim(sp1, sp2, relation);
        // Leaving the relation or failing to pair surfaces as an error.
        if let Ok(report) = verify_equivalence(sp1, sp2, &EquivWitness::Bisim(w.clone())) {
            if report.passed() {
                out.push(w);
            }
        }
    }
    Ok(out)
}
