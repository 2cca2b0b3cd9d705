//! Line-oriented fixture documents.
//!
//! A document is a sequence of sections, each opened by a header keyword on
//! its own line. Blank lines are skipped and `#` starts a comment. Tokens
//! are whitespace-delimited and may not contain `#`.
//!
//! ```text
//! OBJECTS      # one line per object: <object> <identity-morphism>
//! MORPHISMS    # <name> <source> <target>
//! COMPOSE      # <f> <g> <f-then-g>
//! BIMODULE     # val <A> <B> <elements...>   value set at the pair
//!              # act <s> <t> <x> <y>         (s, t) sends x to y
//! GAMMA        # <A> <B> <C> <x> <y> <z>     multiplication on representatives
//! ETA          # <s> <x>                     unit on a hom generator
//! REP          # <x> <fiber elements...>     decoration fiber over element x
//! DECOR        # <x> <fiber elements...>
//! WEIGHT       # <x> <rational>
//! ```

use std::collections::BTreeMap;
use std::fmt;

use plethys::bimodule::{gamma_from_fn, hom_unit, plethysm, Bimodule, BimoduleMap, BimoduleMonoid};
use plethys::corecat::{validate_category, Id};
use plethys::elements::{element_category, ElementRep};
use plethys::target::TargetFunctor;
use plethys::{FinCategory, Flavor, TargetMor, TargetObj};

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        msg: msg.into(),
    })
}

/// A token with its 1-based column.
type Tok = (usize, String);

fn tokenize(line: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut col = 0usize;
    let mut cur = String::new();
    let mut start = 0usize;
    for ch in line.chars() {
        col += 1;
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() {
            if !cur.is_empty() {
                out.push((start, std::mem::take(&mut cur)));
            }
        } else {
            if cur.is_empty() {
                start = col;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((start, cur));
    }
    out
}

const SECTIONS: [&str; 9] = [
    "OBJECTS",
    "MORPHISMS",
    "COMPOSE",
    "BIMODULE",
    "GAMMA",
    "ETA",
    "REP",
    "DECOR",
    "WEIGHT",
];

/// A parsed document: the category, the optional bimodule data, and the
/// optional decoration / weight tables. Cross-references are resolved and
/// checked during parsing; laws (category axioms, functoriality) are checked
/// by `category` / `bimodule`.
#[derive(Debug, Default)]
pub struct Fixture {
    pub objects: Vec<(Id, Id)>,
    pub morphisms: Vec<(Id, Id, Id)>,
    pub compose: Vec<(Id, Id, Id)>,
    pub values: BTreeMap<(Id, Id), Vec<Id>>,
    pub actions: BTreeMap<(Id, Id), BTreeMap<Id, Id>>,
    /// (A, B, C, x, y) -> z
    pub gamma: BTreeMap<(Id, Id, Id, Id, Id), Id>,
    pub eta: BTreeMap<Id, Id>,
    pub rep: BTreeMap<Id, Vec<Id>>,
    pub decor: BTreeMap<Id, Vec<Id>>,
    pub weight: BTreeMap<Id, String>,
}

pub fn parse(text: &str) -> Result<Fixture, ParseError> {
    let mut f = Fixture::default();
    let mut section: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        if toks.len() == 1 && SECTIONS.contains(&toks[0].1.as_str()) {
            section = Some(SECTIONS.iter().find(|s| **s == toks[0].1).unwrap());
            continue;
        }
        let sec = match section {
            Some(s) => s,
            None => return err(line, toks[0].0, format!("expected a section header, got {}", toks[0].1)),
        };
        match sec {
            "OBJECTS" => {
                let [ob, idm] = fixed::<2>(line, &toks, "object identity-morphism")?;
                f.objects.push((ob, idm));
            }
            "MORPHISMS" => {
                let [m, s, t] = fixed::<3>(line, &toks, "morphism source target")?;
                f.morphisms.push((m, s, t));
            }
            "COMPOSE" => {
                let [a, b, c] = fixed::<3>(line, &toks, "f g f-then-g")?;
                f.compose.push((a, b, c));
            }
            "BIMODULE" => match toks[0].1.as_str() {
                "val" => {
                    if toks.len() < 3 {
                        return err(line, toks[0].0, "expected: val A B elements...");
                    }
                    let key = (toks[1].1.clone(), toks[2].1.clone());
                    let elems = toks[3..].iter().map(|(_, t)| t.clone()).collect();
                    if f.values.insert(key, elems).is_some() {
                        return err(line, toks[1].0, "duplicate value line for this pair");
                    }
                }
                "act" => {
                    let rest = &toks[1..];
                    if rest.len() != 4 {
                        return err(line, toks[0].0, "expected: act s t x y");
                    }
                    let key = (rest[0].1.clone(), rest[1].1.clone());
                    let table = f.actions.entry(key).or_default();
                    if table.insert(rest[2].1.clone(), rest[3].1.clone()).is_some() {
                        return err(line, rest[2].0, format!("duplicate action entry for {}", rest[2].1));
                    }
                }
                other => return err(line, toks[0].0, format!("expected val or act, got {other}")),
            },
            "GAMMA" => {
                let [a, b, c, x, y, z] = fixed::<6>(line, &toks, "A B C x y z")?;
                if f.gamma.insert((a, b, c, x, y), z).is_some() {
                    return err(line, toks[3].0, "duplicate multiplication entry");
                }
            }
            "ETA" => {
                let [s, x] = fixed::<2>(line, &toks, "morphism element")?;
                if f.eta.insert(s, x).is_some() {
                    return err(line, toks[0].0, "duplicate unit entry");
                }
            }
            "REP" | "DECOR" => {
                if toks.len() < 2 {
                    return err(line, toks[0].0, "expected: element fiber-elements...");
                }
                let fibers = if sec == "REP" { &mut f.rep } else { &mut f.decor };
                let elems = toks[1..].iter().map(|(_, t)| t.clone()).collect();
                if fibers.insert(toks[0].1.clone(), elems).is_some() {
                    return err(line, toks[0].0, "duplicate fiber line");
                }
            }
            "WEIGHT" => {
                let [x, q] = fixed::<2>(line, &toks, "element rational")?;
                if !is_rational(&q) {
                    return err(line, toks[1].0, format!("not a rational number: {q}"));
                }
                f.weight.insert(x, q);
            }
            _ => unreachable!(),
        }
    }
    resolve(&f, text)?;
    Ok(f)
}

fn fixed<const N: usize>(line: usize, toks: &[Tok], shape: &str) -> Result<[Id; N], ParseError> {
    if toks.len() != N {
        return err(line, toks[0].0, format!("expected: {shape}"));
    }
    Ok(std::array::from_fn(|i| toks[i].1.clone()))
}

fn is_rational(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('/') {
        Some((p, q)) => {
            !p.is_empty()
                && !q.is_empty()
                && p.chars().all(|c| c.is_ascii_digit())
                && q.chars().all(|c| c.is_ascii_digit())
                && q.chars().any(|c| c != '0')
        }
        None => !body.is_empty() && body.chars().all(|c| c.is_ascii_digit()),
    }
}

/// Re-scan the document for cross-reference errors so they carry the line and
/// column of the offending token.
fn resolve(f: &Fixture, text: &str) -> Result<(), ParseError> {
    let objects: Vec<&Id> = f.objects.iter().map(|(o, _)| o).collect();
    let morphisms: Vec<&Id> = f.morphisms.iter().map(|(m, _, _)| m).collect();
    let identities: Vec<&Id> = f.objects.iter().map(|(_, m)| m).collect();
    let known_mor = |m: &str| morphisms.contains(&&m.to_string()) || identities.contains(&&m.to_string());
    let mut section = "";
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        if toks.len() == 1 && SECTIONS.contains(&toks[0].1.as_str()) {
            section = SECTIONS.iter().find(|s| **s == toks[0].1).unwrap();
            continue;
        }
        let check_ob = |tok: &Tok| -> Result<(), ParseError> {
            if objects.contains(&&tok.1) {
                Ok(())
            } else {
                err(line, tok.0, format!("unknown object {}", tok.1))
            }
        };
        let check_mor = |tok: &Tok| -> Result<(), ParseError> {
            if known_mor(&tok.1) {
                Ok(())
            } else {
                err(line, tok.0, format!("unknown morphism {}", tok.1))
            }
        };
        match section {
            "MORPHISMS" => {
                check_ob(&toks[1])?;
                check_ob(&toks[2])?;
            }
            "COMPOSE" => {
                for t in &toks {
                    check_mor(t)?;
                }
            }
            "BIMODULE" if toks[0].1 == "val" => {
                check_ob(&toks[1])?;
                check_ob(&toks[2])?;
            }
            "BIMODULE" => {
                check_mor(&toks[1])?;
                check_mor(&toks[2])?;
            }
            "GAMMA" => {
                for t in &toks[..3] {
                    check_ob(t)?;
                }
                let has = |p: (&Id, &Id), e: &Tok| -> Result<(), ParseError> {
                    match f.values.get(&(p.0.clone(), p.1.clone())) {
                        Some(v) if v.contains(&e.1) => Ok(()),
                        _ => err(
                            line,
                            e.0,
                            format!("element {} is not in the value set at ({}, {})", e.1, p.0, p.1),
                        ),
                    }
                };
                has((&toks[0].1, &toks[1].1), &toks[3])?;
                has((&toks[1].1, &toks[2].1), &toks[4])?;
                has((&toks[0].1, &toks[2].1), &toks[5])?;
            }
            "ETA" => check_mor(&toks[0])?,
            _ => {}
        }
    }
    Ok(())
}

impl Fixture {
    pub fn category(&self) -> Result<FinCategory, String> {
        let mut morphisms: BTreeMap<Id, (Id, Id)> = BTreeMap::new();
        for (ob, idm) in &self.objects {
            morphisms.insert(idm.clone(), (ob.clone(), ob.clone()));
        }
        for (m, s, t) in &self.morphisms {
            morphisms.insert(m.clone(), (s.clone(), t.clone()));
        }
        let mut compose: BTreeMap<(Id, Id), Id> = BTreeMap::new();
        // identity composites are implied; explicit lines may override
        for (m, (s, t)) in &morphisms {
            let si = &self.objects.iter().find(|(o, _)| o == s).unwrap().1;
            let ti = &self.objects.iter().find(|(o, _)| o == t).unwrap().1;
            compose.insert((si.clone(), m.clone()), m.clone());
            compose.insert((m.clone(), ti.clone()), m.clone());
        }
        for (a, b, c) in &self.compose {
            compose.insert((a.clone(), b.clone()), c.clone());
        }
        let cat = FinCategory {
            objects: self.objects.iter().map(|(o, _)| o.clone()).collect(),
            morphisms,
            identity: self.objects.iter().cloned().collect(),
            compose,
        };
        let report = validate_category(&cat);
        if report.is_ok() {
            Ok(cat)
        } else {
            Err(format!("invalid category: {report}"))
        }
    }

    pub fn bimodule(&self) -> Result<Bimodule, String> {
        let cat = self.category()?;
        if self.values.is_empty() {
            return Err("fixture has no BIMODULE section".into());
        }
        let mut value = BTreeMap::new();
        for a in &cat.objects {
            for b in &cat.objects {
                let names = self
                    .values
                    .get(&(a.clone(), b.clone()))
                    .cloned()
                    .unwrap_or_default();
                value.insert((a.clone(), b.clone()), TargetObj::set(names));
            }
        }
        let mut act = BTreeMap::new();
        for (s, (s_src, s_tgt)) in &cat.morphisms {
            for (t, (t_src, t_tgt)) in &cat.morphisms {
                let dom = &value[&(s_tgt.clone(), t_src.clone())];
                let cod = &value[&(s_src.clone(), t_tgt.clone())];
                let empty = BTreeMap::new();
                let table = self
                    .actions
                    .get(&(s.clone(), t.clone()))
                    .unwrap_or(&empty);
                let mut map = BTreeMap::new();
                for x in dom.names() {
                    let y = table.get(x).cloned().or_else(|| {
                        // identity pairs default to the identity action
                        (cat.identity.values().any(|i| i == s)
                            && cat.identity.values().any(|i| i == t)
                            && cod.names().contains(x))
                        .then(|| x.clone())
                    });
                    match y {
                        Some(y) if cod.names().contains(&y) => {
                            map.insert(x.clone(), y);
                        }
                        Some(y) => {
                            return Err(format!(
                                "action ({s}, {t}) sends {x} to {y}, which is not in the target value set"
                            ))
                        }
                        None => {
                            return Err(format!("action ({s}, {t}) is missing an entry for {x}"))
                        }
                    }
                }
                act.insert((s.clone(), t.clone()), TargetMor::from_map(dom, cod, map));
            }
        }
        let r = Bimodule {
            action: cat,
            flavor: Flavor::FinSet,
            value,
            act,
        };
        let report = r.validate();
        if report.is_ok() {
            Ok(r)
        } else {
            Err(format!("bimodule is not functorial: {report}"))
        }
    }

    pub fn monoid(&self) -> Result<BimoduleMonoid, String> {
        let rho = self.bimodule()?;
        if self.gamma.is_empty() {
            return Err("fixture has no GAMMA section".into());
        }
        let square = plethysm(&rho, &rho).map_err(|e| e.to_string())?;
        let gamma = gamma_from_fn(&square, &rho, |a, c, b, x, y| {
            self.gamma
                .get(&(
                    a.to_string(),
                    b.to_string(),
                    c.to_string(),
                    x.to_string(),
                    y.to_string(),
                ))
                .cloned()
        })
        .map_err(|e| e.to_string())?;
        let unit = if self.eta.is_empty() {
            None
        } else {
            let unit_src = hom_unit(&rho.action, Flavor::FinSet);
            let mut component = BTreeMap::new();
            for ((a, b), v) in &unit_src.value {
                let mut map = BTreeMap::new();
                for s in v.names() {
                    let x = self
                        .eta
                        .get(s)
                        .ok_or_else(|| format!("ETA is missing an entry for morphism {s}"))?;
                    if !rho.val(a, b).names().contains(x) {
                        return Err(format!("ETA sends {s} to {x}, which is not in the value set"));
                    }
                    map.insert(s.clone(), x.clone());
                }
                component.insert(
                    (a.clone(), b.clone()),
                    TargetMor::from_map(v, rho.val(a, b), map),
                );
            }
            Some(BimoduleMap {
                source: unit_src,
                target: rho.clone(),
                component,
            })
        };
        Ok(BimoduleMonoid {
            bimodule: rho,
            square,
            gamma,
            unit,
        })
    }

    /// The decoration representation described by a fiber table: fibers must
    /// agree along every lift, which then acts by the identity on fibers.
    pub fn decoration_rep(&self, fibers: &BTreeMap<Id, Vec<Id>>) -> Result<ElementRep, String> {
        let rho = self.bimodule()?;
        let base = element_category(&rho).map_err(|e| e.to_string())?;
        let mut ob = BTreeMap::new();
        for (o, (_, _, x)) in &base.data {
            let fiber = fibers
                .get(x)
                .ok_or_else(|| format!("no fiber listed for element {x}"))?;
            ob.insert(o.clone(), TargetObj::set(fiber.clone()));
        }
        let mut mor = BTreeMap::new();
        for (m, (src, tgt)) in &base.cat.morphisms {
            if ob[src] != ob[tgt] {
                return Err(format!(
                    "fibers differ along the lift {m}; identity lifts need equal fibers"
                ));
            }
            mor.insert(m.clone(), TargetMor::identity(&ob[src]));
        }
        Ok(ElementRep {
            base: base.clone(),
            fun: TargetFunctor {
                source: base.cat,
                flavor: Flavor::FinSet,
                ob,
                mor,
            },
        })
    }
}

/// Serialize a monoid back into the document format. Emission is total:
/// gamma is written on every coend generator, the unit on every hom
/// generator.
pub fn emit_monoid(m: &BimoduleMonoid) -> String {
    let cat = &m.bimodule.action;
    let mut out = String::new();
    out.push_str("OBJECTS\n");
    for o in &cat.objects {
        out.push_str(&format!("{} {}\n", o, cat.identity[o]));
    }
    out.push_str("MORPHISMS\n");
    for (mo, (s, t)) in &cat.morphisms {
        if cat.identity.values().any(|i| i == mo) {
            continue;
        }
        out.push_str(&format!("{mo} {s} {t}\n"));
    }
    out.push_str("COMPOSE\n");
    for ((a, b), c) in &cat.compose {
        let ida = cat.identity.values().any(|i| i == a);
        let idb = cat.identity.values().any(|i| i == b);
        if ida || idb {
            continue;
        }
        out.push_str(&format!("{a} {b} {c}\n"));
    }
    out.push_str("BIMODULE\n");
    for ((a, b), v) in &m.bimodule.value {
        if v.size() == 0 {
            continue;
        }
        out.push_str(&format!("val {a} {b} {}\n", v.names().join(" ")));
    }
    for ((s, t), mor) in &m.bimodule.act {
        let ids = cat.identity.values().any(|i| i == s);
        let idt = cat.identity.values().any(|i| i == t);
        if ids && idt {
            continue;
        }
        for x in mor.dom.names() {
            out.push_str(&format!("act {s} {t} {x} {}\n", mor.apply(x)));
        }
    }
    out.push_str("GAMMA\n");
    for ((a, c), slice) in &m.square.classes.slices {
        for g in &slice.generators {
            let (b, x, y) = plethys::bimodule::split_gen(g);
            let z = m.gamma.at(a, c).apply(slice.class_of(&b, &x, &y));
            out.push_str(&format!("{a} {b} {c} {x} {y} {z}\n"));
        }
    }
    if let Some(unit) = &m.unit {
        out.push_str("ETA\n");
        for ((_, _), mor) in &unit.component {
            for s in mor.dom.names() {
                out.push_str(&format!("{s} {}\n", mor.apply(s)));
            }
        }
    }
    out
}

