//! The monadic lens gallery: absolute value, constant view, logging.

use bxlens::lens::id_lens;
use bxlens::mlens::{
    abs_lens, abs_lens_over, check_mlens_laws, check_put_lens_laws, compose_m, const_mlens,
    lens2mlens, log_lens, PutLens,
};
use bxlens::{Carrier, Effect, Value};

fn main() -> bxlens::Result<()> {
    let abs = abs_lens(3)?;
    print!("{}", check_mlens_laws(&abs)?.render_human());

    let wide = abs_lens_over(Carrier::int_range(-5, 5), Carrier::int_range(-5, 5));
    let e = wide.effect().clone();
    for (a, b) in [(-3, 5), (4, -2)] {
        let m = wide.mput(&Value::Int(a), &Value::Int(b))?;
        println!("abs.mput({a}, {b}) = {}", e.render(&m));
    }

    let digits = Carrier::int_range(0, 2);
    let constant = const_mlens(
        &digits,
        &Carrier::int_range(6, 8),
        Value::Int(7),
        Value::Int(0),
    )?;
    print!("{}", check_mlens_laws(&constant)?.render_human());

    let log = log_lens(&id_lens(&digits));
    let m = log.mput(&Value::Int(1), &Value::Int(2))?;
    println!("log.mput(1, 2) = {}", log.effect().render(&m));

    let composite = compose_m(&abs, &lens2mlens(&Effect::Maybe, &id_lens(abs.view())))?;
    print!("{}", check_mlens_laws(&composite)?.render_human());

    print!(
        "{}",
        check_put_lens_laws(&PutLens::from_mlens(&abs)?)?.render_human()
    );
    Ok(())
}
