//! Composing pure lenses and reading a law report.

use bxlens::lens::{check_pure_laws, compose_pure, fst_lens, id_lens, PureLens};
use bxlens::{Carrier, Value};

fn main() -> bxlens::Result<()> {
    let (a, b) = (
        Carrier::int_range(0, 2),
        Carrier::symbols("AB", &["a", "b"])?,
    );
    let fst = fst_lens(&a, &b, Value::sym("a"))?;
    let l = compose_pure(&fst, &id_lens(&a))?;
    let s = Value::pair(Value::Int(1), Value::sym("b"));
    println!("get {s} = {}", l.get(&s)?);
    println!("put {s} 2 = {}", l.put(&s, &Value::Int(2))?);
    println!("create 0 = {}", l.create(&Value::Int(0))?);
    print!("{}", check_pure_laws(&l)?.render_human());

    // A put that ignores the new view breaks PutGet.
    let stuck = PureLens::new(
        "stuck",
        a.clone(),
        a,
        |x| Ok(x.clone()),
        |x, _| Ok(x.clone()),
        |y| Ok(y.clone()),
    );
    print!("{}", check_pure_laws(&stuck)?.render_human());
    Ok(())
}
