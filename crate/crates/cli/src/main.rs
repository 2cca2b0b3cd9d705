mod fixture;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use plethys::basicrep::{basic_context, basic_element_plethysm};
use plethys::bimodule::{
    check_monoid, check_pentagon, check_triangle, correspondence_roundtrip, monoidal_constraints,
    Bimodule, BimoduleMonoid,
};
use plethys::corecat::validate_category;
use plethys::decorate::lambda_iso;
use plethys::elements::{element_category, element_plethysm, ElementRep, RepMap};
use plethys::factorize::{basic_action_bimodule, hereditary_check, horizontal_extension, monad_structure};
use plethys::relative::{equivalence_roundtrip, linearize_monoid, relative_plethysm};
use plethys::zoo::{
    build_cospan, build_glue, build_surjection, build_tau, cospan_pair_witness, plus_roundtrip_check,
    CospanVariant, GlueBounds, TauVariant,
};
use plethys::{FunctorData, Flavor, LawReport, TargetMor};

/// Law suites, product tables, horizontal extensions, and round-trip
/// theorems over textual or built-in fixtures.
#[derive(Parser)]
#[command(name = "plethys", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Opts {
    /// built-in fixture: cospan | surjection | glue | tau-n | tau-s
    #[arg(long, conflicts_with = "fixture")]
    zoo: Option<String>,
    /// path to a fixture document
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// truncation bound for built-in fixtures
    #[arg(long, default_value_t = 2)]
    nmax: usize,
    /// word-length cap for extensions and monad laws
    #[arg(long, default_value_t = 2)]
    cap: usize,
    /// isolated-vertex bound for the full cospan variant
    #[arg(long, default_value_t = 1)]
    isolated_cap: usize,
    /// cospan variant: full | nd
    #[arg(long, default_value = "nd")]
    variant: String,
    /// value category: finset | finvect
    #[arg(long, default_value = "finset")]
    target: String,
    /// also run the seeded random associativity sample
    #[arg(long)]
    seed: Option<u64>,
    /// append a machine-readable key=value block
    #[arg(long)]
    summary: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// run a law suite: category | monoid | monoidal | hereditary | monad | glue | rep
    Check {
        suite: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// compute a product table: box | diamond | basic | relative
    Plethysm {
        #[arg(default_value = "box")]
        product: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// compute horizontal-extension class counts
    Extend {
        #[command(flatten)]
        opts: Opts,
    },
    /// run a round-trip theorem: bimodcat | main-thm | elementrelative
    Correspond {
        which: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// emit a built-in fixture document
    Zoo {
        name: String,
        #[command(flatten)]
        opts: Opts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let passed = match run(&cli.cmd, &mut out) {
        Ok(passed) => passed,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    print!("{out}");
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cmd: &Cmd, out: &mut String) -> Result<bool> {
    match cmd {
        Cmd::Check { suite, opts } => check(suite, opts, out),
        Cmd::Plethysm { product, opts } => plethysm_table(product, opts, out),
        Cmd::Extend { opts } => extend(opts, out),
        Cmd::Correspond { which, opts } => correspond(which, opts, out),
        Cmd::Zoo { name, opts } => {
            let m = zoo_monoid(name, opts)?;
            out.push_str(&fixture::emit_monoid(&m));
            Ok(true)
        }
    }
}

fn variant(opts: &Opts) -> Result<CospanVariant> {
    match opts.variant.as_str() {
        "full" => Ok(CospanVariant::Full),
        "nd" => Ok(CospanVariant::Nd),
        v => bail!("unknown variant {v} (expected full or nd)"),
    }
}

fn flavor(opts: &Opts) -> Result<Flavor> {
    match opts.target.as_str() {
        "finset" => Ok(Flavor::FinSet),
        "finvect" => Ok(Flavor::FinVect),
        v => bail!("unknown target {v} (expected finset or finvect)"),
    }
}

fn parse_fixture(path: &PathBuf) -> Result<fixture::Fixture> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    fixture::parse(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn zoo_monoid(name: &str, opts: &Opts) -> Result<BimoduleMonoid> {
    match name {
        "cospan" => Ok(build_cospan(opts.nmax, opts.isolated_cap, variant(opts)?)?.monoid),
        "surjection" => Ok(build_surjection(opts.nmax)?.monoid),
        other => bail!("no built-in monoid fixture named {other}"),
    }
}

fn monoid_input(opts: &Opts) -> Result<(String, BimoduleMonoid)> {
    if let Some(path) = &opts.fixture {
        let fx = parse_fixture(path)?;
        let m = fx.monoid().map_err(|e| anyhow!("{}: {e}", path.display()))?;
        Ok((path.display().to_string(), m))
    } else if let Some(name) = &opts.zoo {
        Ok((describe(name, opts), zoo_monoid(name, opts)?))
    } else {
        bail!("supply --fixture <path> or --zoo <name>")
    }
}

fn bimodule_input(opts: &Opts) -> Result<(String, Bimodule)> {
    if let Some(path) = &opts.fixture {
        let fx = parse_fixture(path)?;
        let r = fx.bimodule().map_err(|e| anyhow!("{}: {e}", path.display()))?;
        Ok((path.display().to_string(), r))
    } else {
        let (name, m) = monoid_input(opts)?;
        Ok((name, m.bimodule))
    }
}

fn describe(name: &str, opts: &Opts) -> String {
    format!(
        "zoo {name} nmax={} cap={} variant={}",
        opts.nmax, opts.cap, opts.variant
    )
}

fn finish(
    out: &mut String,
    header: &str,
    input: &str,
    report: &LawReport,
    opts: &Opts,
    extra: &[(String, String)],
) -> Result<bool> {
    writeln!(out, "command: {header}")?;
    writeln!(out, "input: {input}")?;
    write!(out, "{report}")?;
    let status = if report.is_ok() { "pass" } else { "fail" };
    writeln!(out, "result: {status}")?;
    if opts.summary {
        writeln!(out, "summary.status={status}")?;
        writeln!(out, "summary.violations={}", report.violations.len())?;
        for (k, v) in extra {
            writeln!(out, "summary.{k}={v}")?;
        }
    }
    Ok(report.is_ok())
}

fn check(suite: &str, opts: &Opts, out: &mut String) -> Result<bool> {
    let header = format!("check {suite}");
    match suite {
        "category" => {
            let (name, r) = bimodule_input(opts)?;
            let report = validate_category(&r.action);
            finish(out, &header, &name, &report, opts, &[])
        }
        "monoid" => {
            let (name, m0) = monoid_input(opts)?;
            let m = linearize_monoid(&m0, flavor(opts)?)?;
            let mut report = check_monoid(&m.bimodule, &m.gamma, m.unit.as_ref())?;
            if let Some(seed) = opts.seed {
                // sample set-level representatives, before any linearization
                report.merge(sampled_assoc(&m0, seed, 200).prefixed("sampled associativity"));
            }
            finish(out, &header, &name, &report, opts, &[])
        }
        "monoidal" => {
            let (name, r) = bimodule_input(opts)?;
            monoidal_constraints(&r, &r, &r)?;
            let mut report = check_pentagon(&r, &r, &r, &r)?;
            report.merge(check_triangle(&r, &r)?);
            finish(out, &header, &name, &report, opts, &[])
        }
        "hereditary" => {
            if opts.zoo.as_deref() != Some("cospan") {
                bail!("the hereditary suite runs on --zoo cospan");
            }
            let f = build_cospan(opts.nmax, opts.isolated_cap, variant(opts)?)?;
            let (gamma0, pairs, basics) = cospan_pair_witness(&f, opts.cap)?;
            let mut report = gamma0.validate().prefixed("pair inclusion");
            report.merge(hereditary_check(&f.monoid.gamma, &pairs, &basics)?.prefixed("gamma"));
            let wh = basic_action_bimodule(&f.fa, f.witness.cap)?;
            let unit = f.monoid.unit.as_ref().unwrap();
            report.merge(hereditary_check(unit, &wh, &f.witness)?.prefixed("unit"));
            finish(out, &header, &describe("cospan", opts), &report, opts, &[])
        }
        "monad" => {
            let (name, basic, fa) = match opts.zoo.as_deref() {
                Some("tau-n") => {
                    let (fa, w) = build_tau(TauVariant::N, opts.nmax, 1)?;
                    ("tau-n", w.basic, fa)
                }
                Some("tau-s") => {
                    let (fa, w) = build_tau(TauVariant::S, opts.nmax, 1)?;
                    ("tau-s", w.basic, fa)
                }
                Some("cospan") => {
                    let f = build_cospan(opts.nmax, opts.isolated_cap, variant(opts)?)?;
                    ("cospan", f.witness.basic.clone(), f.fa)
                }
                Some("surjection") => {
                    let f = build_surjection(opts.nmax)?;
                    ("surjection", f.witness.basic.clone(), f.fa)
                }
                _ => bail!("the monad suite runs on --zoo tau-n | tau-s | cospan | surjection"),
            };
            let m = monad_structure(&basic, &fa, opts.cap, opts.cap)?;
            finish(out, &header, &describe(name, opts), &m.report, opts, &[])
        }
        "glue" => {
            let f = build_glue(GlueBounds {
                nmax: opts.nmax,
                ..GlueBounds::default()
            })?;
            let report = plethys::zoo::glue_square_check(&f, 2, 0)?;
            finish(out, &header, &describe("glue", opts), &report, opts, &[])
        }
        "rep" => {
            let path = opts
                .fixture
                .as_ref()
                .ok_or_else(|| anyhow!("the rep suite needs --fixture with a REP section"))?;
            let fx = parse_fixture(path)?;
            let mut report = LawReport::new();
            let mut counted = 0usize;
            for (section, fibers) in [("REP", &fx.rep), ("DECOR", &fx.decor)] {
                if fibers.is_empty() {
                    continue;
                }
                counted += 1;
                let rep = fx
                    .decoration_rep(fibers)
                    .map_err(|e| anyhow!("{}: {section}: {e}", path.display()))?;
                report.merge(rep.validate().prefixed(section));
                if let Err(e) = lambda_iso(&rep) {
                    report.violation(format!("{section}: pointing comparison fails: {e}"));
                }
            }
            if counted == 0 {
                bail!("{}: no REP or DECOR section", path.display());
            }
            finish(out, &header, &path.display().to_string(), &report, opts, &[])
        }
        other => bail!("unknown suite {other}"),
    }
}

/// A seeded spot-check of associativity on representatives, independent of
/// the coend-level associativity constraint.
fn sampled_assoc(m: &BimoduleMonoid, seed: u64, samples: usize) -> LawReport {
    let mut report = LawReport::new();
    let objects = &m.bimodule.action.objects;
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    let mut next = move |n: usize| -> usize {
        // xorshift64*
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 33) as usize % n.max(1)
    };
    let mut tried = 0usize;
    let mut budget = samples * 20;
    while tried < samples && budget > 0 {
        budget -= 1;
        let a = &objects[next(objects.len())];
        let b = &objects[next(objects.len())];
        let c = &objects[next(objects.len())];
        let d = &objects[next(objects.len())];
        let (xs, ys, zs) = (m.bimodule.val(a, b), m.bimodule.val(b, c), m.bimodule.val(c, d));
        if xs.size() == 0 || ys.size() == 0 || zs.size() == 0 {
            continue;
        }
        let x = &xs.names()[next(xs.size())];
        let y = &ys.names()[next(ys.size())];
        let z = &zs.names()[next(zs.size())];
        let xy = m.gamma.at(a, c).apply(m.square.slice(a, c).class_of(b, x, y));
        let yz = m.gamma.at(b, d).apply(m.square.slice(b, d).class_of(c, y, z));
        let left = m.gamma.at(a, d).apply(m.square.slice(a, d).class_of(c, xy, z));
        let right = m.gamma.at(a, d).apply(m.square.slice(a, d).class_of(b, x, yz));
        if left != right {
            report.violation(format!(
                "associativity fails on ({x}, {y}, {z}) over ({a}, {b}, {c}, {d}): {left} vs {right}"
            ));
        }
        tried += 1;
    }
    report
}

fn plethysm_table(product: &str, opts: &Opts, out: &mut String) -> Result<bool> {
    let header = format!("plethysm {product}");
    let mut lines: Vec<String> = Vec::new();
    let input;
    match product {
        "box" => {
            let (name, r) = bimodule_input(opts)?;
            input = name;
            let p = plethys::bimodule::plethysm(&r, &r)?;
            for ((a, c), v) in &p.product.value {
                lines.push(format!("box {a} {c} {}", v.size()));
            }
        }
        "diamond" => {
            let (name, m) = monoid_input(opts)?;
            input = name;
            let el = element_category(&m.bimodule)?;
            let d = ElementRep::trivial(&el, Flavor::FinSet);
            let dd = element_plethysm(&d, &d, &m)?;
            for (ob, v) in &dd.rep.fun.ob {
                lines.push(format!("diamond {ob} {}", v.size()));
            }
        }
        "basic" => {
            let (name, f) = match opts.zoo.as_deref() {
                Some("surjection") => ("surjection", build_surjection(opts.nmax)?),
                Some("cospan") => {
                    let c = build_cospan(opts.nmax, opts.isolated_cap, variant(opts)?)?;
                    (
                        "cospan",
                        plethys::zoo::SurjFixture {
                            fa: c.fa,
                            monoid: c.monoid,
                            witness: c.witness,
                        },
                    )
                }
                _ => bail!("the basic product runs on --zoo surjection | cospan"),
            };
            input = describe(name, opts);
            let ctx = basic_context(&f.fa, &f.monoid, &f.witness)?;
            let d = ElementRep::trivial(&ctx.el_nu, Flavor::FinSet);
            let dd = basic_element_plethysm(&d, &d, &ctx)?;
            for (ob, v) in &dd.rep.fun.ob {
                lines.push(format!("basic {ob} {}", v.size()));
            }
        }
        "relative" => {
            if !matches!(opts.zoo.as_deref(), None | Some("glue")) {
                bail!("the relative product runs on --zoo glue");
            }
            input = describe("glue", opts);
            let f = build_glue(GlueBounds {
                nmax: opts.nmax,
                ..GlueBounds::default()
            })?;
            let (sq, _) = relative_plethysm(&f.relative, &f.relative)?;
            for ((a, c), v) in &sq.total.value {
                lines.push(format!("relative {a} {c} {}", v.size()));
            }
        }
        other => bail!("unknown product {other}"),
    }
    writeln!(out, "command: {header}")?;
    writeln!(out, "input: {input}")?;
    for l in &lines {
        writeln!(out, "{l}")?;
    }
    writeln!(out, "result: pass")?;
    if opts.summary {
        writeln!(out, "summary.status=pass")?;
        writeln!(out, "summary.entries={}", lines.len())?;
    }
    Ok(true)
}

fn extend(opts: &Opts, out: &mut String) -> Result<bool> {
    let (name, basic, fa) = match opts.zoo.as_deref() {
        Some("tau-n") => {
            let (fa, w) = build_tau(TauVariant::N, opts.nmax, 1)?;
            ("tau-n", w.basic, fa)
        }
        Some("tau-s") => {
            let (fa, w) = build_tau(TauVariant::S, opts.nmax, 1)?;
            ("tau-s", w.basic, fa)
        }
        Some("cospan") => {
            let f = build_cospan(opts.nmax, opts.isolated_cap, variant(opts)?)?;
            ("cospan", f.witness.basic.clone(), f.fa)
        }
        Some("surjection") => {
            let f = build_surjection(opts.nmax)?;
            ("surjection", f.witness.basic.clone(), f.fa)
        }
        _ => bail!("extend runs on --zoo tau-n | tau-s | cospan | surjection"),
    };
    let w = horizontal_extension(&basic, &fa, opts.cap, true)?;
    writeln!(out, "command: extend")?;
    writeln!(out, "input: {}", describe(name, opts))?;
    let mut total = 0usize;
    for ((a, b), v) in &w.extension.value {
        writeln!(out, "ext {a} {b} {}", v.size())?;
        total += v.size();
    }
    writeln!(out, "result: pass")?;
    if opts.summary {
        writeln!(out, "summary.status=pass")?;
        writeln!(out, "summary.classes={total}")?;
    }
    Ok(true)
}

fn correspond(which: &str, opts: &Opts, out: &mut String) -> Result<bool> {
    let header = format!("correspond {which}");
    match which {
        "bimodcat" => {
            let (name, r) = bimodule_input(opts)?;
            let report =
                correspondence_roundtrip(&r.action, &FunctorData::identity(&r.action))?;
            finish(out, &header, &name, &report, opts, &[])
        }
        "main-thm" => {
            let f = build_surjection(opts.nmax)?;
            let ctx = basic_context(&f.fa, &f.monoid, &f.witness)?;
            let d = ElementRep::trivial(&ctx.el_nu, Flavor::FinSet);
            let dd = basic_element_plethysm(&d, &d, &ctx)?;
            let component: BTreeMap<_, _> = dd
                .rep
                .fun
                .ob
                .iter()
                .map(|(y, v)| {
                    let name = d.value(y).names()[0].clone();
                    (y.clone(), TargetMor::from_fn(v, d.value(y), |_| name.clone()))
                })
                .collect();
            let g = RepMap {
                source: dd.rep.clone(),
                target: d.clone(),
                component,
            };
            let mut report = g.validate().prefixed("multiplication");
            report.merge(plus_roundtrip_check(&d, &g, &ctx)?);
            finish(out, &header, &describe("surjection", opts), &report, opts, &[])
        }
        "elementrelative" => {
            let f = build_glue(GlueBounds {
                nmax: opts.nmax,
                ..GlueBounds::default()
            })?;
            let report = equivalence_roundtrip(&f.relative)?;
            finish(out, &header, &describe("glue", opts), &report, opts, &[])
        }
        other => bail!("unknown correspondence {other}"),
    }
}
