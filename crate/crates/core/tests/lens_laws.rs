use bxlens::corpus::{lawful_pure_lenses, random_pure_lens};
use bxlens::lens::{check_pure_laws, compose_pure, id_lens, pure_difference, LensTable, PureLens};
use bxlens::mlens::Budget;
use bxlens::{Carrier, Value};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn sizes() -> Vec<Carrier> {
    vec![Carrier::int_range(0, 0), Carrier::int_range(0, 1)]
}

fn corpus(a: &Carrier, b: &Carrier) -> Vec<PureLens> {
    let mut budget = Budget::new("corpus", 10_000_000);
    lawful_pure_lenses(a, b, &mut budget).unwrap()
}

// Independent oracle: the three laws straight from the tables.
fn lawful_by_table(t: &LensTable, na: usize, nb: usize) -> bool {
    (0..na).all(|a| t.put[a][t.get[a]] == a)
        && (0..na).all(|a| (0..nb).all(|b| t.get[t.put[a][b]] == b))
        && (0..nb).all(|b| t.get[t.create[b]] == b)
}

#[test]
fn composition_closed_on_small_carriers() {
    let mut pairs = 0;
    for a in sizes() {
        for b in sizes() {
            for c in sizes() {
                for l1 in corpus(&a, &b) {
                    for l2 in corpus(&b, &c) {
                        let l = compose_pure(&l1, &l2).unwrap();
                        let report = check_pure_laws(&l).unwrap();
                        assert!(report.passed(), "{}", report.render_human());
                        let t = l.tabulate().unwrap();
                        assert!(lawful_by_table(&t, a.len(), c.len()));
                        pairs += 1;
                    }
                }
            }
        }
    }
    assert!(pairs > 0);
}

#[test]
fn composition_closed_up_to_three() {
    let (two, three) = (Carrier::int_range(0, 1), Carrier::int_range(0, 2));
    for l1 in corpus(&three, &two) {
        for l2 in corpus(&two, &two) {
            assert!(check_pure_laws(&compose_pure(&l1, &l2).unwrap())
                .unwrap()
                .passed());
        }
    }
}

#[test]
fn generated_lenses_match_table_oracle() {
    let (a, b) = (Carrier::int_range(0, 2), Carrier::int_range(0, 1));
    for l in corpus(&a, &b) {
        let t = l.tabulate().unwrap();
        assert!(lawful_by_table(&t, 3, 2), "{}", l.name());
    }
}

#[test]
fn get_of_full_lens_is_surjective() {
    let (a, b) = (Carrier::int_range(0, 2), Carrier::int_range(0, 1));
    for l in corpus(&a, &b) {
        assert!(l.get_is_surjective().unwrap());
    }
}

#[test]
fn no_full_lens_onto_a_larger_view() {
    assert!(corpus(&Carrier::int_range(0, 0), &Carrier::int_range(0, 1)).is_empty());
}

#[test]
fn broken_put_is_caught_with_first_witness() {
    let c = Carrier::int_range(0, 2);
    let stuck = PureLens::new(
        "stuck",
        c.clone(),
        c,
        |a| Ok(a.clone()),
        |a, _| Ok(a.clone()),
        |b| Ok(b.clone()),
    );
    let report = check_pure_laws(&stuck).unwrap();
    let v = report.violation("PutGet").unwrap();
    assert_eq!(v.binding("a"), Some(&Value::Int(0)));
    assert_eq!(v.binding("b"), Some(&Value::Int(1)));
    assert!(report.violation("GetPut").is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (a, b, c, d) = (
            Carrier::int_range(0, 3),
            Carrier::int_range(0, 2),
            Carrier::int_range(0, 1),
            Carrier::int_range(0, 0),
        );
        let l1 = random_pure_lens(&mut rng, &a, &b).unwrap();
        let l2 = random_pure_lens(&mut rng, &b, &c).unwrap();
        let l3 = random_pure_lens(&mut rng, &c, &d).unwrap();
        let left = compose_pure(&compose_pure(&l1, &l2).unwrap(), &l3).unwrap();
        let right = compose_pure(&l1, &compose_pure(&l2, &l3).unwrap()).unwrap();
        prop_assert_eq!(pure_difference(&left, &right).unwrap(), None);
    }

    #[test]
    fn identity_is_neutral(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (a, b) = (Carrier::int_range(0, 2), Carrier::int_range(0, 1));
        let l = random_pure_lens(&mut rng, &a, &b).unwrap();
        prop_assert_eq!(pure_difference(&compose_pure(&id_lens(&a), &l).unwrap(), &l).unwrap(), None);
        prop_assert_eq!(pure_difference(&compose_pure(&l, &id_lens(&b)).unwrap(), &l).unwrap(), None);
    }

    #[test]
    fn random_lenses_are_lawful(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let l = random_pure_lens(&mut rng, &Carrier::int_range(0, 3), &Carrier::int_range(0, 2)).unwrap();
        let t = l.tabulate().unwrap();
        prop_assert!(lawful_by_table(&t, 4, 3));
        prop_assert!(check_pure_laws(&l).unwrap().passed());
    }
}
