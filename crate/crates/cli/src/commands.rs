//! Subcommands.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use bxlens::equivalence::{
    search_equivalence, verify_equivalence, BisimWitness, EquivKind, EquivWitness,
};
use bxlens::lens::check_pure_laws;
use bxlens::mlens::{check_mlens_laws, DEFAULT_SEARCH_BUDGET};
use bxlens::spans::{check_span_wb, consistent_triples, smlens2span, span2smlens};
use bxlens::symmetric::{check_slens_laws, check_smlens_laws, SMLens};
use bxlens::{BxError, Effect};

use crate::demos;
use crate::export::Exporter;
use crate::format::{compose_objects, parse, render, Directive, Env, Object};
use crate::report::{Outcome, Report};

pub const DEFAULT_EQUIV_SEARCH_BUDGET: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "bxlens",
    version,
    about = "Law checking, composition and equivalence of finite lenses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Pure,
    Mlens,
    Slens,
    Smlens,
    Span,
}

impl Kind {
    fn object_kind(self) -> &'static str {
        match self {
            Kind::Pure => "pure-lens",
            Kind::Mlens => "mlens",
            Kind::Slens => "slens",
            Kind::Smlens => "smlens",
            Kind::Span => "span",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertOp {
    Span2smlens,
    Smlens2span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquivArg {
    Iso,
    Span,
    Bisim,
}

impl From<EquivArg> for EquivKind {
    fn from(k: EquivArg) -> EquivKind {
        match k {
            EquivArg::Iso => EquivKind::Iso,
            EquivArg::Span => EquivKind::Span,
            EquivArg::Bisim => EquivKind::Bisim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    SetboolCompose,
    FailSpan,
    BoolUnitEquiv,
    NaiveComposeSearch,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the laws of a named object, or run the file's check/equiv directives.
    Check {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Compose two objects of the same kind.
    Compose {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Also check the laws of the composite.
        #[arg(long)]
        check: bool,
    },
    /// Convert between spans and symmetric monadic lenses.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        op: ConvertOp,
        #[arg(long)]
        name: String,
    },
    /// Verify or search for an equivalence between two spans.
    Equiv {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: EquivArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, conflicts_with = "search")]
        witness: Option<String>,
        /// Search for a witness (the default without --witness).
        #[arg(long)]
        search: bool,
    },
    /// Run a built-in counterexample.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    /// Enumeration cap for searches.
    pub budget: Option<u64>,
}

impl Settings {
    /// Reads `BXLENS_BUDGET`.
    pub fn from_env() -> Result<Settings, String> {
        match std::env::var("BXLENS_BUDGET") {
            Err(_) => Ok(Settings { budget: None }),
            Ok(s) => match s.trim().parse::<u64>() {
                Ok(n) if n > 0 => Ok(Settings { budget: Some(n) }),
                _ => Err(format!(
                    "BXLENS_BUDGET must be a positive integer, got `{s}`"
                )),
            },
        }
    }

    pub fn search_budget(&self) -> u64 {
        self.budget.unwrap_or(DEFAULT_SEARCH_BUDGET)
    }

    pub fn equiv_budget(&self) -> u64 {
        self.budget.unwrap_or(DEFAULT_EQUIV_SEARCH_BUDGET)
    }
}

pub fn run(command: &Command, settings: &Settings) -> Outcome {
    match command {
        Command::Demo { name } => demos::run(*name, settings),
        Command::Check { file, name } => {
            with_file(file, |env| check(env, name.as_deref(), settings))
        }
        Command::Compose {
            file,
            kind,
            left,
            right,
            check,
        } => with_file(file, |env| compose(env, *kind, left, right, *check)),
        Command::Convert { file, op, name } => with_file(file, |env| convert(env, *op, name)),
        Command::Equiv {
            file,
            kind,
            a,
            b,
            witness,
            ..
        } => with_file(file, |env| {
            let mut r = Report::new("equiv");
            equiv(
                env,
                &mut r,
                "equiv",
                (*kind).into(),
                a,
                b,
                witness.as_deref(),
                settings,
            )?;
            Ok(r)
        }),
    }
}

fn with_file(path: &Path, body: impl FnOnce(&Env) -> Result<Report, String>) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("cannot read {}: {e}", path.display())),
    };
    let loaded = match parse(&text) {
        Ok(l) => l,
        Err(d) => {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("{}:{d}\n", path.display()),
            }
        }
    };
    match body(&loaded.env) {
        Ok(r) => r.finish(),
        Err(m) => Outcome::usage(m),
    }
}

fn lookup<'a>(env: &'a Env, name: &str) -> Result<&'a Object, String> {
    env.object(name)
        .ok_or_else(|| format!("no object named `{name}`"))
}

fn laws_of(name: &str, o: &Object) -> Result<bxlens::LawReport, String> {
    let r = match o {
        Object::Pure(l) => check_pure_laws(l),
        Object::MLens(l) => check_mlens_laws(l),
        Object::SLens(l) => check_slens_laws(l),
        Object::SMLens(l) => check_smlens_laws(l),
        Object::Span(sp) => check_span_wb(sp),
        Object::Witness(w) => check_pure_laws(&w.lens),
        other => {
            return Err(format!(
                "`{name}` is a {}, which has no laws to check",
                other.kind()
            ))
        }
    };
    r.map_err(|e| e.to_string())
}

fn check(env: &Env, name: Option<&str>, settings: &Settings) -> Result<Report, String> {
    let mut r = Report::new("check");
    if let Some(name) = name {
        let report = laws_of(name, lookup(env, name)?)?;
        r.laws("check", &report);
        return Ok(r);
    }
    if env.directives.is_empty() {
        return Err("no --name given and the file has no check or equiv directives".into());
    }
    for (i, d) in env.directives.iter().enumerate() {
        let prefix = format!("directive{}", i + 1);
        match d {
            Directive::Check { name } => {
                r.key(&format!("{prefix}.kind"), "check");
                let report = laws_of(name, lookup(env, name)?)?;
                r.laws(&prefix, &report);
            }
            Directive::Equiv {
                kind,
                a,
                b,
                witness,
            } => {
                r.key(&format!("{prefix}.kind"), "equiv");
                equiv(
                    env,
                    &mut r,
                    &prefix,
                    *kind,
                    a,
                    b,
                    witness.as_deref(),
                    settings,
                )?;
            }
        }
        r.line("");
    }
    Ok(r)
}

fn show_export(
    r: &mut Report,
    title: &str,
    build: impl FnOnce(&mut Exporter) -> Result<String, String>,
) {
    let mut ex = Exporter::new();
    match build(&mut ex) {
        Ok(_) => {
            r.line(format!("{title}:"));
            r.text(&render(&ex.finish()));
        }
        Err(e) => r.line(format!("{title}: cannot be tabulated ({e})")),
    }
}

fn export_object(ex: &mut Exporter, name: &str, o: &Object) -> Result<String, String> {
    match o {
        Object::Pure(l) => ex.pure(name, l),
        Object::MLens(l) => ex.mlens(name, l),
        Object::SLens(l) => ex.slens(name, l),
        Object::SMLens(l) => ex.smlens(name, l),
        Object::Span(sp) => ex.span(name, sp),
        Object::Map(m) => ex.map(name, m),
        Object::Iso(i) => ex.iso(name, i),
        Object::Witness(w) => ex.witness(name, w),
    }
}

fn compose(env: &Env, kind: Kind, left: &str, right: &str, check: bool) -> Result<Report, String> {
    let (lo, ro) = (lookup(env, left)?, lookup(env, right)?);
    for (n, o) in [(left, lo), (right, ro)] {
        if o.kind() != kind.object_kind() {
            return Err(format!(
                "`{n}` is a {}, not a {}",
                o.kind(),
                kind.object_kind()
            ));
        }
    }
    let name = format!("{left}_then_{right}");
    let composite = compose_objects(&name, lo, ro)?;
    let mut r = Report::new("compose");
    r.key("compose.left", left);
    r.key("compose.right", right);
    show_export(&mut r, &format!("composite of {left} and {right}"), |ex| {
        export_object(ex, &name, &composite)
    });
    if check {
        r.laws("composite", &laws_of(&name, &composite)?);
    }
    Ok(r)
}

fn convert(env: &Env, op: ConvertOp, name: &str) -> Result<Report, String> {
    let o = lookup(env, name)?;
    let mut r = Report::new("convert");
    match op {
        ConvertOp::Span2smlens => {
            let Object::Span(sp) = o else {
                return Err(format!("`{name}` is a {}, not a span", o.kind()));
            };
            let sl = span2smlens(sp).map_err(|e| e.to_string())?;
            r.line(format!("complement: {}", sl.complement()));
            show_export(&mut r, &format!("symmetric lens of span {name}"), |ex| {
                ex.smlens(&format!("{name}_smlens"), &sl)
            });
            r.laws(
                "converted",
                &check_smlens_laws(&sl).map_err(|e| e.to_string())?,
            );
        }
        ConvertOp::Smlens2span => {
            let sl = match o {
                Object::SMLens(sl) => sl.clone(),
                Object::SLens(sl) => SMLens::lift(&Effect::Identity, sl),
                other => {
                    return Err(format!(
                        "`{name}` is a {}, not a symmetric lens",
                        other.kind()
                    ))
                }
            };
            let triples = consistent_triples(&sl).map_err(|e| e.to_string())?;
            let (sp, warnings) = smlens2span(&sl).map_err(|e| e.to_string())?;
            let shown: Vec<String> = triples.elements().iter().map(|t| t.to_string()).collect();
            r.line(format!(
                "consistent triples ({}): {{{}}}",
                triples.len(),
                shown.join(", ")
            ));
            r.key("convert.consistent_triples", triples.len());
            if !sl.effect().is_identity() {
                r.line(format!(
                    "note: {name} runs in {}; the span is guaranteed well-behaved only for pure inputs",
                    sl.effect()
                ));
            }
            for (i, w) in warnings.iter().enumerate() {
                r.line(format!("warning: {w}"));
                r.key(&format!("convert.warning{}", i + 1), w);
            }
            show_export(&mut r, &format!("span of {name}"), |ex| {
                ex.span(&format!("{name}_span"), &sp)
            });
            r.laws("converted", &check_span_wb(&sp).map_err(|e| e.to_string())?);
        }
    }
    Ok(r)
}

fn export_witness(ex: &mut Exporter, w: &EquivWitness) -> Result<String, String> {
    match w {
        EquivWitness::Iso(i) => ex.iso("witness", i),
        EquivWitness::Span(s) => ex.witness("witness", s),
        EquivWitness::Bisim(b) => ex.span("witness", &b.span),
    }
}

#[allow(clippy::too_many_arguments)]
fn equiv(
    env: &Env,
    r: &mut Report,
    prefix: &str,
    kind: EquivKind,
    a: &str,
    b: &str,
    witness: Option<&str>,
    settings: &Settings,
) -> Result<(), String> {
    let span = |n: &str| match lookup(env, n)? {
        Object::Span(sp) => Ok(sp.clone()),
        other => Err(format!("`{n}` is a {}, not a span", other.kind())),
    };
    let (sp1, sp2) = (span(a)?, span(b)?);
    r.line(format!("{kind} equivalence of {a} and {b}"));
    r.key(&format!("{prefix}.equivalence"), kind);
    let w = match witness {
        Some(wn) => {
            let w = match (kind, lookup(env, wn)?) {
                (EquivKind::Iso, Object::Iso(i)) => EquivWitness::Iso(i.clone()),
                (EquivKind::Span, Object::Witness(s)) => EquivWitness::Span(s.clone()),
                (EquivKind::Bisim, Object::Span(sp)) => {
                    EquivWitness::Bisim(BisimWitness::new(sp.clone()))
                }
                (_, other) => {
                    return Err(format!(
                        "a {} is not a witness for {kind} equivalence",
                        other.kind()
                    ))
                }
            };
            r.line(format!("witness: {wn}"));
            w
        }
        None => match search_equivalence(kind, &sp1, &sp2, settings.equiv_budget()) {
            Ok(Some(w)) => {
                r.key(&format!("{prefix}.found"), true);
                show_export(r, "witness found", |ex| export_witness(ex, &w));
                w
            }
            Ok(None) => {
                r.line(format!("no {kind} witness exists"));
                r.key(&format!("{prefix}.found"), false);
                r.fail();
                return Ok(());
            }
            Err(e @ BxError::BoundExceeded { .. }) => {
                r.line(format!("search stopped: {e}"));
                r.key(&format!("{prefix}.found"), "budget_exhausted");
                r.fail();
                return Ok(());
            }
            Err(e) => return Err(e.to_string()),
        },
    };
    match verify_equivalence(&sp1, &sp2, &w) {
        Ok(report) => r.laws(prefix, &report),
        Err(e) => {
            r.line(format!("FAIL witness rejected: {e}"));
            r.key(&format!("{prefix}.status"), "fail");
            r.key(&format!("{prefix}.error"), e);
            r.fail();
        }
    }
    Ok(())
}
