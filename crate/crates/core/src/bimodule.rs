//! Bimodules over an action category, the plethysm product with its unit and
//! coherence constraints, bimodule monoids, and the two-way correspondence
//! with categories carrying an identity-on-objects functor.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::corecat::{
    check_functor, join_parts, opposite_product, pair_mor, pair_ob, split_parts, FinCategory,
    FunctorData, Id,
};
use crate::report::LawReport;
use crate::target::{
    induce_through_quotient, mat_zero, quotient_set, quotient_vect, Flavor, FinSetObj, MorData,
    TargetFunctor, TargetMor, TargetObj,
};
use crate::PlError;

/// A functor `action^op x action -> C`, stored pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    pub action: FinCategory,
    pub flavor: Flavor,
    /// (A, B) -> value object
    pub value: BTreeMap<(Id, Id), TargetObj>,
    /// (sigma, tau) -> value(tgt sigma, src tau) -> value(src sigma, tgt tau)
    pub act: BTreeMap<(Id, Id), TargetMor>,
}

impl Bimodule {
    pub fn val(&self, a: &str, b: &str) -> &TargetObj {
        &self.value[&(a.to_string(), b.to_string())]
    }

    pub fn action_mor(&self, sigma: &str, tau: &str) -> &TargetMor {
        &self.act[&(sigma.to_string(), tau.to_string())]
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Id, Id)> {
        self.value.keys()
    }

    /// Build from a value table and an action rule (FinSet flavor).
    pub fn from_rule(
        action: &FinCategory,
        value: BTreeMap<(Id, Id), TargetObj>,
        rule: impl Fn(&str, &str, &str) -> Id,
    ) -> Bimodule {
        let mut act = BTreeMap::new();
        for (s, (s_src, s_tgt)) in &action.morphisms {
            for (t, (t_src, t_tgt)) in &action.morphisms {
                let dom = value[&(s_tgt.clone(), t_src.clone())].clone();
                let cod = value[&(s_src.clone(), t_tgt.clone())].clone();
                let m = TargetMor::from_fn(&dom, &cod, |x| rule(s, t, x));
                act.insert((s.clone(), t.clone()), m);
            }
        }
        Bimodule {
            action: action.clone(),
            flavor: Flavor::FinSet,
            value,
            act,
        }
    }

    pub fn empty(action: &FinCategory, flavor: Flavor) -> Bimodule {
        let init = TargetObj::initial(flavor);
        let mut value = BTreeMap::new();
        for a in &action.objects {
            for b in &action.objects {
                value.insert((a.clone(), b.clone()), init.clone());
            }
        }
        let mut act = BTreeMap::new();
        for s in action.morphisms.keys() {
            for t in action.morphisms.keys() {
                act.insert((s.clone(), t.clone()), TargetMor::identity(&init));
            }
        }
        Bimodule {
            action: action.clone(),
            flavor,
            value,
            act,
        }
    }

    /// Present the bimodule as a functor on `action^op x action`.
    pub fn as_functor(&self) -> TargetFunctor {
        let base = opposite_product(&self.action, &self.action);
        let ob = self
            .value
            .iter()
            .map(|((a, b), v)| (pair_ob(a, b), v.clone()))
            .collect();
        let mor = self
            .act
            .iter()
            .map(|((s, t), m)| (pair_mor(s, t), m.clone()))
            .collect();
        TargetFunctor {
            source: base,
            flavor: self.flavor,
            ob,
            mor,
        }
    }

    pub fn validate(&self) -> LawReport {
        self.as_functor().validate()
    }

    pub fn total_size(&self) -> usize {
        self.value.values().map(|v| v.size()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimoduleMap {
    pub source: Bimodule,
    pub target: Bimodule,
    pub component: BTreeMap<(Id, Id), TargetMor>,
}

impl BimoduleMap {
    pub fn identity(r: &Bimodule) -> BimoduleMap {
        BimoduleMap {
            source: r.clone(),
            target: r.clone(),
            component: r
                .value
                .iter()
                .map(|(k, v)| (k.clone(), TargetMor::identity(v)))
                .collect(),
        }
    }

    pub fn at(&self, a: &str, b: &str) -> &TargetMor {
        &self.component[&(a.to_string(), b.to_string())]
    }

    /// "self then g".
    pub fn then(&self, g: &BimoduleMap) -> BimoduleMap {
        BimoduleMap {
            source: self.source.clone(),
            target: g.target.clone(),
            component: self
                .component
                .iter()
                .map(|(k, m)| (k.clone(), m.then(&g.component[k])))
                .collect(),
        }
    }

    pub fn is_iso(&self) -> bool {
        self.component.values().all(|m| m.is_iso())
    }

    pub fn inverse(&self) -> Option<BimoduleMap> {
        let mut component = BTreeMap::new();
        for (k, m) in &self.component {
            component.insert(k.clone(), m.inverse()?);
        }
        Some(BimoduleMap {
            source: self.target.clone(),
            target: self.source.clone(),
            component,
        })
    }

    /// Component-wise injectivity — the operative reading of "faithful".
    pub fn is_faithful(&self) -> bool {
        self.component.values().all(|m| m.is_injective())
    }

    pub fn validate(&self) -> LawReport {
        let mut r = LawReport::new();
        for ((a, b), m) in &self.component {
            if &m.dom != self.source.val(a, b) || &m.cod != self.target.val(a, b) {
                r.violation(format!("component at ({a}, {b}) has wrong endpoints"));
            }
        }
        for key in self.source.value.keys() {
            if !self.component.contains_key(key) {
                r.violation(format!("missing component at ({}, {})", key.0, key.1));
            }
        }
        if !r.is_ok() {
            return r;
        }
        for (s, (s_src, s_tgt)) in &self.source.action.morphisms {
            for (t, (t_src, t_tgt)) in &self.source.action.morphisms {
                let dom_pair = (s_tgt.clone(), t_src.clone());
                let cod_pair = (s_src.clone(), t_tgt.clone());
                let lhs = self.component[&dom_pair].then(self.target.action_mor(s, t));
                let rhs = self.source.action_mor(s, t).then(&self.component[&cod_pair]);
                if lhs != rhs {
                    r.violation(format!("naturality fails at ({s} | {t})"));
                }
            }
        }
        r
    }
}

/// Hom-set bimodule of the action category (free objects on hom-sets for the
/// vector-space flavor); the unit for the plethysm product.
pub fn hom_unit(a: &FinCategory, flavor: Flavor) -> Bimodule {
    let mut value = BTreeMap::new();
    for x in &a.objects {
        for y in &a.objects {
            let homs = FinSetObj::new(a.hom(x, y));
            value.insert(
                (x.clone(), y.clone()),
                crate::target::free_obj(flavor, &homs),
            );
        }
    }
    let mut act = BTreeMap::new();
    for (s, (s_src, s_tgt)) in &a.morphisms {
        for (t, (t_src, t_tgt)) in &a.morphisms {
            let dom = FinSetObj::new(a.hom(s_tgt, t_src));
            let cod = FinSetObj::new(a.hom(s_src, t_tgt));
            let map: BTreeMap<Id, Id> = dom
                .elems
                .iter()
                .map(|h| (h.clone(), a.then(a.then(s, h), t).clone()))
                .collect();
            act.insert(
                (s.clone(), t.clone()),
                crate::target::free_mor(flavor, &dom, &cod, &map),
            );
        }
    }
    Bimodule {
        action: a.clone(),
        flavor,
        value,
        act,
    }
}

pub fn gen_id(b: &str, x: &str, y: &str) -> Id {
    join_parts(&[b, x, y])
}

pub fn split_gen(g: &str) -> (Id, Id, Id) {
    let parts = split_parts(g);
    assert_eq!(parts.len(), 3, "not a coend generator: {g}");
    let mut it = parts.into_iter();
    (it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
}

/// One object pair's worth of coend data.
#[derive(Debug, Clone)]
pub struct CoendSlice {
    /// generator ids `<B><x><y>`
    pub generators: Vec<Id>,
    /// the free object on the generators (coproduct / direct sum of the
    /// middle-indexed tensors)
    pub gen_obj: TargetObj,
    /// projection onto the quotient value
    pub project: TargetMor,
    /// generating relation edges, kept as a debugging witness
    pub witness: Vec<String>,
}

impl CoendSlice {
    /// FinSet only: representative of a raw generator triple.
    pub fn class_of(&self, b: &str, x: &str, y: &str) -> &Id {
        self.project.apply(&gen_id(b, x, y))
    }
}

#[derive(Debug, Clone, Default)]
pub struct CoendPresentation {
    pub slices: BTreeMap<(Id, Id), CoendSlice>,
}

#[derive(Debug, Clone)]
pub struct PlethysmResult {
    pub product: Bimodule,
    pub classes: CoendPresentation,
}

impl PlethysmResult {
    pub fn slice(&self, a: &str, c: &str) -> &CoendSlice {
        &self.classes.slices[&(a.to_string(), c.to_string())]
    }
}

/// Build a morphism between two coend generator objects from per-middle maps
/// on the two tensor factors. Generators missing in the codomain's generator
/// set are rejected by the name lookup.
fn coend_gen_mor<'a>(
    dom: &TargetObj,
    cod: &TargetObj,
    flavor: Flavor,
    f1: impl Fn(&str) -> &'a TargetMor,
    f2: impl Fn(&str) -> &'a TargetMor,
) -> TargetMor {
    match flavor {
        Flavor::FinSet => TargetMor::from_fn(dom, cod, |g| {
            let (b, x, y) = split_gen(g);
            gen_id(&b, f1(&b).apply(&x), f2(&b).apply(&y))
        }),
        Flavor::FinVect => {
            let mut mat = mat_zero(cod.size(), dom.size());
            for (j, g) in dom.names().iter().enumerate() {
                let (b, x, y) = split_gen(g);
                let m1 = f1(&b);
                let m2 = f2(&b);
                let k1 = m1.dom.names().iter().position(|e| e == &x).unwrap();
                let k2 = m2.dom.names().iter().position(|e| e == &y).unwrap();
                for (i1, x2) in m1.cod.names().iter().enumerate() {
                    let c1 = &m1.matrix()[i1][k1];
                    if c1.is_zero() {
                        continue;
                    }
                    for (i2, y2) in m2.cod.names().iter().enumerate() {
                        let c2 = &m2.matrix()[i2][k2];
                        if c2.is_zero() {
                            continue;
                        }
                        let name = gen_id(&b, x2, y2);
                        let i = cod.names().iter().position(|e| e == &name).unwrap();
                        mat[i][j] = c1 * c2;
                    }
                }
            }
            TargetMor {
                dom: dom.clone(),
                cod: cod.clone(),
                data: MorData::Matrix(mat),
            }
        }
    }
}

/// The plethysm product: for each `(A, C)` the coend over the middle variable,
/// computed as a quotient of the generator object by the co-wedge relations.
/// For groupoid actions this agrees with the cocone shortcut relation
/// `(x, y) ~ ((id|s).x, (s^-1|id).y)`; the zig-zag closure below needs no
/// groupoid hypothesis.
pub fn plethysm(r1: &Bimodule, r2: &Bimodule) -> Result<PlethysmResult, PlError> {
    if r1.action != r2.action || r1.flavor != r2.flavor {
        return Err(PlError::Mismatch(
            "plethysm: actions or flavors differ".into(),
        ));
    }
    let a_cat = &r1.action;
    let flavor = r1.flavor;
    let mut slices = BTreeMap::new();
    let mut value = BTreeMap::new();
    for a in &a_cat.objects {
        for c in &a_cat.objects {
            let mut gens = Vec::new();
            for b in &a_cat.objects {
                for x in r1.val(a, b).names() {
                    for y in r2.val(b, c).names() {
                        gens.push(gen_id(b, x, y));
                    }
                }
            }
            let gen_obj = match flavor {
                Flavor::FinSet => TargetObj::set(gens.clone()),
                Flavor::FinVect => TargetObj::vect(gens.clone()),
            };
            let mut witness = Vec::new();
            let (obj, project) = match flavor {
                Flavor::FinSet => {
                    let mut edges = Vec::new();
                    for (m, (b, b2)) in &a_cat.morphisms {
                        if a_cat.is_identity(m) {
                            continue;
                        }
                        // (B', (id|m).x, y') ~ (B, x, (m|id).y')
                        let left = r1.action_mor(a_cat.id_of(a), m);
                        let right = r2.action_mor(m, a_cat.id_of(c));
                        for x in r1.val(a, b).names() {
                            for y2 in r2.val(b2, c).names() {
                                let lhs = gen_id(b2, left.apply(x), y2);
                                let rhs = gen_id(b, x, right.apply(y2));
                                witness.push(format!("{m}: {lhs} ~ {rhs}"));
                                edges.push((lhs, rhs));
                            }
                        }
                    }
                    let (obj, class_of) = quotient_set(&gens, &edges);
                    let project = TargetMor::from_fn(&gen_obj, &obj, |g| class_of[g].clone());
                    (obj, project)
                }
                Flavor::FinVect => {
                    let index: BTreeMap<&Id, usize> =
                        gens.iter().enumerate().map(|(i, g)| (g, i)).collect();
                    let mut relations: Vec<Vec<BigRational>> = Vec::new();
                    for (m, (b, b2)) in &a_cat.morphisms {
                        if a_cat.is_identity(m) {
                            continue;
                        }
                        let left = r1.action_mor(a_cat.id_of(a), m);
                        let right = r2.action_mor(m, a_cat.id_of(c));
                        for (kx, x) in r1.val(a, b).names().iter().enumerate() {
                            for (ky2, y2) in r2.val(b2, c).names().iter().enumerate() {
                                let mut row = vec![BigRational::zero(); gens.len()];
                                for (i1, x2) in left.cod.names().iter().enumerate() {
                                    let c1 = &left.matrix()[i1][kx];
                                    if !c1.is_zero() {
                                        row[index[&gen_id(b2, x2, y2)]] += c1.clone();
                                    }
                                }
                                for (i2, yb) in right.cod.names().iter().enumerate() {
                                    let c2 = &right.matrix()[i2][ky2];
                                    if !c2.is_zero() {
                                        row[index[&gen_id(b, x, yb)]] -= c2.clone();
                                    }
                                }
                                witness.push(format!("{m}: relation on ({x}, {y2})"));
                                relations.push(row);
                            }
                        }
                    }
                    quotient_vect(&gens, &relations)
                }
            };
            value.insert((a.clone(), c.clone()), obj);
            slices.insert(
                (a.clone(), c.clone()),
                CoendSlice {
                    generators: gens,
                    gen_obj,
                    project,
                    witness,
                },
            );
        }
    }
    // induced outer action on classes
    let mut act = BTreeMap::new();
    for (s, (s_src, s_tgt)) in &a_cat.morphisms {
        for (t, (t_src, t_tgt)) in &a_cat.morphisms {
            let src_slice = &slices[&(s_tgt.clone(), t_src.clone())];
            let tgt_slice = &slices[&(s_src.clone(), t_tgt.clone())];
            let gm = coend_gen_mor(
                &src_slice.gen_obj,
                &tgt_slice.gen_obj,
                flavor,
                |b| r1.action_mor(s, a_cat.id_of(b)),
                |b| r2.action_mor(a_cat.id_of(b), t),
            );
            let induced = induce_through_quotient(&src_slice.project, &gm, &tgt_slice.project)
                .map_err(|e| {
                    PlError::Law(format!("plethysm action does not descend at ({s}|{t}): {e}"))
                })?;
            act.insert((s.clone(), t.clone()), induced);
        }
    }
    let product = Bimodule {
        action: a_cat.clone(),
        flavor,
        value,
        act,
    };
    Ok(PlethysmResult {
        product,
        classes: CoendPresentation { slices },
    })
}

/// Functoriality of the plethysm: the induced map `r1 [] r2 -> r1' [] r2'`.
pub fn plethysm_map(
    f1: &BimoduleMap,
    f2: &BimoduleMap,
    p_src: &PlethysmResult,
    p_tgt: &PlethysmResult,
) -> Result<BimoduleMap, PlError> {
    let flavor = p_src.product.flavor;
    let mut component = BTreeMap::new();
    for ((a, c), src_slice) in &p_src.classes.slices {
        let tgt_slice = &p_tgt.classes.slices[&(a.clone(), c.clone())];
        let gm = coend_gen_mor(
            &src_slice.gen_obj,
            &tgt_slice.gen_obj,
            flavor,
            |b| f1.at(a, b),
            |b| f2.at(b, c),
        );
        let induced = induce_through_quotient(&src_slice.project, &gm, &tgt_slice.project)?;
        component.insert((a.clone(), c.clone()), induced);
    }
    Ok(BimoduleMap {
        source: p_src.product.clone(),
        target: p_tgt.product.clone(),
        component,
    })
}

/// FinSet only: build a bimodule map out of a plethysm product from a rule on
/// representative triples, verifying class-independence on every generator.
pub fn gamma_from_fn(
    p: &PlethysmResult,
    target: &Bimodule,
    rule: impl Fn(&str, &str, &str, &str, &str) -> Option<Id>,
) -> Result<BimoduleMap, PlError> {
    if p.product.flavor != Flavor::FinSet {
        return Err(PlError::Unsupported(
            "representative-level maps are FinSet only".into(),
        ));
    }
    let mut component = BTreeMap::new();
    for ((a, c), slice) in &p.classes.slices {
        let out = target.val(a, c);
        let mut gm_map = BTreeMap::new();
        for g in &slice.generators {
            let (b, x, y) = split_gen(g);
            let v = rule(a, c, &b, &x, &y).ok_or_else(|| {
                PlError::Law(format!("rule undefined on generator {g} at ({a}, {c})"))
            })?;
            if !out.names().contains(&v) {
                return Err(PlError::Law(format!(
                    "rule value {v} at generator {g} not in target ({a}, {c})"
                )));
            }
            gm_map.insert(g.clone(), v);
        }
        let gm = TargetMor::from_map(&slice.gen_obj, out, gm_map);
        let induced = induce_through_quotient(&slice.project, &gm, &TargetMor::identity(out))
            .map_err(|_| {
                PlError::Law(format!(
                    "rule is not constant on coend classes at ({a}, {c})"
                ))
            })?;
        component.insert((a.clone(), c.clone()), induced);
    }
    Ok(BimoduleMap {
        source: p.product.clone(),
        target: target.clone(),
        component,
    })
}

fn triple_id(b: &str, c: &str, x: &str, y: &str, z: &str) -> Id {
    join_parts(&[b, c, x, y, z])
}

/// The associativity constraint `(r1 [] r2) [] r3 -> r1 [] (r2 [] r3)`,
/// via the joint quotient of the raw triple object.
pub fn assoc_iso(r1: &Bimodule, r2: &Bimodule, r3: &Bimodule) -> Result<BimoduleMap, PlError> {
    let p12 = plethysm(r1, r2)?;
    let p12_3 = plethysm(&p12.product, r3)?;
    let p23 = plethysm(r2, r3)?;
    let p1_23 = plethysm(r1, &p23.product)?;
    let flavor = r1.flavor;
    let a_cat = &r1.action;
    let mut component = BTreeMap::new();
    for a in &a_cat.objects {
        for d in &a_cat.objects {
            let mut triples = Vec::new();
            for b in &a_cat.objects {
                for c in &a_cat.objects {
                    for x in r1.val(a, b).names() {
                        for y in r2.val(b, c).names() {
                            for z in r3.val(c, d).names() {
                                triples.push(triple_id(b, c, x, y, z));
                            }
                        }
                    }
                }
            }
            let tri_obj = match flavor {
                Flavor::FinSet => TargetObj::set(triples.clone()),
                Flavor::FinVect => TargetObj::vect(triples.clone()),
            };
            let left_slice = p12_3.slice(a, d);
            let right_slice = p1_23.slice(a, d);
            let (pi_l, pi_r) = match flavor {
                Flavor::FinSet => {
                    let l = TargetMor::from_fn(&tri_obj, &left_slice.project.cod, |t| {
                        let parts = split_parts(t);
                        let (b, c, x, y, z) =
                            (&parts[0], &parts[1], &parts[2], &parts[3], &parts[4]);
                        let inner = p12.slice(a, c).class_of(b, x, y);
                        left_slice.class_of(c, inner, z).clone()
                    });
                    let r = TargetMor::from_fn(&tri_obj, &right_slice.project.cod, |t| {
                        let parts = split_parts(t);
                        let (b, c, x, y, z) =
                            (&parts[0], &parts[1], &parts[2], &parts[3], &parts[4]);
                        let inner = p23.slice(b, d).class_of(c, y, z);
                        right_slice.class_of(b, x, inner).clone()
                    });
                    (l, r)
                }
                Flavor::FinVect => {
                    let build = |nested_first: bool,
                                 slice: &CoendSlice,
                                 inner_p: &PlethysmResult|
                     -> TargetMor {
                        let cod = slice.project.cod.clone();
                        let mut mat = mat_zero(cod.size(), tri_obj.size());
                        for (j, t) in tri_obj.names().iter().enumerate() {
                            let parts = split_parts(t);
                            let (b, c, x, y, z) =
                                (&parts[0], &parts[1], &parts[2], &parts[3], &parts[4]);
                            // expand the inner class as a vector, then push each
                            // term through the outer projection
                            let (inner_slice, inner_gen, outer_gen): (_, Id, _) = if nested_first {
                                (
                                    inner_p.slice(a, c),
                                    gen_id(b, x, y),
                                    Box::new(|v: &str| gen_id(c, v, z))
                                        as Box<dyn Fn(&str) -> Id>,
                                )
                            } else {
                                (
                                    inner_p.slice(b, d),
                                    gen_id(c, y, z),
                                    Box::new(|v: &str| gen_id(b, x, v))
                                        as Box<dyn Fn(&str) -> Id>,
                                )
                            };
                            let gk = inner_slice
                                .gen_obj
                                .names()
                                .iter()
                                .position(|e| e == &inner_gen)
                                .unwrap();
                            for (vi, vname) in inner_slice.project.cod.names().iter().enumerate() {
                                let coeff = inner_slice.project.matrix()[vi][gk].clone();
                                if coeff.is_zero() {
                                    continue;
                                }
                                let og = outer_gen(vname);
                                let ok = slice
                                    .gen_obj
                                    .names()
                                    .iter()
                                    .position(|e| e == &og)
                                    .unwrap();
                                for (qi, row) in slice.project.matrix().iter().enumerate() {
                                    if !row[ok].is_zero() {
                                        let add = &coeff * &row[ok];
                                        mat[qi][j] += add;
                                    }
                                }
                            }
                        }
                        TargetMor {
                            dom: tri_obj.clone(),
                            cod,
                            data: MorData::Matrix(mat),
                        }
                    };
                    (build(true, left_slice, &p12), build(false, right_slice, &p23))
                }
            };
            let ident = match flavor {
                Flavor::FinSet => TargetMor::identity(&tri_obj),
                Flavor::FinVect => TargetMor::identity(&tri_obj),
            };
            let assoc = induce_through_quotient(&pi_l, &ident, &pi_r).map_err(|e| {
                PlError::Law(format!("associativity constraint fails at ({a}, {d}): {e}"))
            })?;
            component.insert((a.clone(), d.clone()), assoc);
        }
    }
    Ok(BimoduleMap {
        source: p12_3.product,
        target: p1_23.product,
        component,
    })
}

/// Left unit `unit [] r -> r` by the density formula: `[h, y] -> (h|id).y`.
pub fn left_unit_iso(r: &Bimodule) -> Result<BimoduleMap, PlError> {
    let unit = hom_unit(&r.action, r.flavor);
    let p = plethysm(&unit, r)?;
    let mut component = BTreeMap::new();
    for ((a, c), slice) in &p.classes.slices {
        let out = r.val(a, c);
        // the unit collapse is not factor-wise, so build the generator map
        // directly instead of going through coend_gen_mor
        let gm = match r.flavor {
            Flavor::FinSet => TargetMor::from_fn(&slice.gen_obj, out, |g| {
                let (_, h, y) = split_gen(g);
                r.action_mor(&h, r.action.id_of(c)).apply(&y).clone()
            }),
            Flavor::FinVect => {
                let mut mat = mat_zero(out.size(), slice.gen_obj.size());
                for (j, g) in slice.gen_obj.names().iter().enumerate() {
                    let (_, h, y) = split_gen(g);
                    let m = r.action_mor(&h, r.action.id_of(c));
                    let k = m.dom.names().iter().position(|e| e == &y).unwrap();
                    for (i, row) in m.matrix().iter().enumerate() {
                        mat[i][j] = row[k].clone();
                    }
                }
                TargetMor {
                    dom: slice.gen_obj.clone(),
                    cod: out.clone(),
                    data: MorData::Matrix(mat),
                }
            }
        };
        let induced = induce_through_quotient(&slice.project, &gm, &TargetMor::identity(out))
            .map_err(|e| PlError::Law(format!("left unit fails at ({a}, {c}): {e}")))?;
        component.insert((a.clone(), c.clone()), induced);
    }
    Ok(BimoduleMap {
        source: p.product,
        target: r.clone(),
        component,
    })
}

/// Right unit `r [] unit -> r`: `[y, h] -> (id|h).y`.
pub fn right_unit_iso(r: &Bimodule) -> Result<BimoduleMap, PlError> {
    let unit = hom_unit(&r.action, r.flavor);
    let p = plethysm(r, &unit)?;
    let mut component = BTreeMap::new();
    for ((a, c), slice) in &p.classes.slices {
        let out = r.val(a, c);
        let gm = match r.flavor {
            Flavor::FinSet => TargetMor::from_fn(&slice.gen_obj, out, |g| {
                let (_, y, h) = split_gen(g);
                r.action_mor(r.action.id_of(a), &h).apply(&y).clone()
            }),
            Flavor::FinVect => {
                let mut mat = mat_zero(out.size(), slice.gen_obj.size());
                for (j, g) in slice.gen_obj.names().iter().enumerate() {
                    let (_, y, h) = split_gen(g);
                    let m = r.action_mor(r.action.id_of(a), &h);
                    let k = m.dom.names().iter().position(|e| e == &y).unwrap();
                    for (i, row) in m.matrix().iter().enumerate() {
                        mat[i][j] = row[k].clone();
                    }
                }
                TargetMor {
                    dom: slice.gen_obj.clone(),
                    cod: out.clone(),
                    data: MorData::Matrix(mat),
                }
            }
        };
        let induced = induce_through_quotient(&slice.project, &gm, &TargetMor::identity(out))
            .map_err(|e| PlError::Law(format!("right unit fails at ({a}, {c}): {e}")))?;
        component.insert((a.clone(), c.clone()), induced);
    }
    Ok(BimoduleMap {
        source: p.product,
        target: r.clone(),
        component,
    })
}

pub struct MonoidalConstraints {
    pub assoc: BimoduleMap,
    pub left_unit: BTreeMap<Id, BimoduleMap>,
    pub right_unit: BTreeMap<Id, BimoduleMap>,
}

/// Associativity and unit constraints for a triple, each verified invertible
/// and natural.
pub fn monoidal_constraints(
    r1: &Bimodule,
    r2: &Bimodule,
    r3: &Bimodule,
) -> Result<(BimoduleMap, BimoduleMap, BimoduleMap), PlError> {
    let assoc = assoc_iso(r1, r2, r3)?;
    let lu = left_unit_iso(r1)?;
    let ru = right_unit_iso(r1)?;
    for (name, m) in [("assoc", &assoc), ("left unit", &lu), ("right unit", &ru)] {
        if !m.is_iso() {
            return Err(PlError::Law(format!("{name} constraint is not invertible")));
        }
        let rep = m.validate();
        if !rep.is_ok() {
            return Err(PlError::Law(format!("{name} constraint not natural: {rep}")));
        }
    }
    Ok((assoc, lu, ru))
}

/// Pentagon coherence for four bimodules over a shared action.
pub fn check_pentagon(
    r1: &Bimodule,
    r2: &Bimodule,
    r3: &Bimodule,
    r4: &Bimodule,
) -> Result<LawReport, PlError> {
    let mut report = LawReport::new();
    let p12 = plethysm(r1, r2)?;
    let p23 = plethysm(r2, r3)?;
    let p34 = plethysm(r3, r4)?;
    let p12_3 = plethysm(&p12.product, r3)?;
    let p1_23 = plethysm(r1, &p23.product)?;
    let p123_4 = plethysm(&p12_3.product, r4)?;
    let p_1_23_then_4 = plethysm(&p1_23.product, r4)?;
    let p23_4 = plethysm(&p23.product, r4)?;
    let p_1_then_23_4 = plethysm(r1, &p23_4.product)?;
    let p2_34 = plethysm(r2, &p34.product)?;
    let p_1_then_2_34 = plethysm(r1, &p2_34.product)?;

    let a_12_3_4 = assoc_iso(&p12.product, r3, r4)?; // ((12)3)4 -> (12)(34)
    let a_1_2_34 = assoc_iso(r1, r2, &p34.product)?; // (12)(34) -> 1(2(34))
    let path1 = a_12_3_4.then(&a_1_2_34);

    let a_123 = assoc_iso(r1, r2, r3)?;
    let step1 = plethysm_map(&a_123, &BimoduleMap::identity(r4), &p123_4, &p_1_23_then_4)?;
    let a_1_23_4 = assoc_iso(r1, &p23.product, r4)?; // (1(23))4 -> 1((23)4)
    let a_234 = assoc_iso(r2, r3, r4)?;
    let step3 = plethysm_map(&BimoduleMap::identity(r1), &a_234, &p_1_then_23_4, &p_1_then_2_34)?;
    let path2 = step1.then(&a_1_23_4).then(&step3);

    for (k, m1) in &path1.component {
        if m1 != &path2.component[k] {
            report.violation(format!("pentagon fails at ({}, {})", k.0, k.1));
        }
    }
    Ok(report)
}

/// Triangle coherence: `(r1 [] unit) [] r2 -> r1 [] (unit [] r2)` commutes
/// with the unit constraints.
pub fn check_triangle(r1: &Bimodule, r2: &Bimodule) -> Result<LawReport, PlError> {
    let mut report = LawReport::new();
    let unit = hom_unit(&r1.action, r1.flavor);
    let p_1u = plethysm(r1, &unit)?;
    let p_u2 = plethysm(&unit, r2)?;
    let p_left = plethysm(&p_1u.product, r2)?;
    let p_right = plethysm(r1, &p_u2.product)?;
    let p12 = plethysm(r1, r2)?;
    let a = assoc_iso(r1, &unit, r2)?;
    let ru = right_unit_iso(r1)?;
    let lu = left_unit_iso(r2)?;
    let left = plethysm_map(&ru, &BimoduleMap::identity(r2), &p_left, &p12)?;
    let right = plethysm_map(&BimoduleMap::identity(r1), &lu, &p_right, &p12)?;
    let via_assoc = a.then(&right);
    for (k, m1) in &left.component {
        if m1 != &via_assoc.component[k] {
            report.violation(format!("triangle fails at ({}, {})", k.0, k.1));
        }
    }
    Ok(report)
}

/// A bimodule with a (possibly unital) monoid structure; the carrier type for
/// all monoid-shaped fixtures.
#[derive(Debug, Clone)]
pub struct BimoduleMonoid {
    pub bimodule: Bimodule,
    pub square: PlethysmResult,
    pub gamma: BimoduleMap,
    pub unit: Option<BimoduleMap>,
}

/// Check associativity (through the joint-quotient associativity constraint)
/// and, when a unit is present, both unit triangles.
pub fn check_monoid(
    r: &Bimodule,
    g: &BimoduleMap,
    h: Option<&BimoduleMap>,
) -> Result<LawReport, PlError> {
    let mut report = LawReport::new();
    report.merge(g.validate().prefixed("multiplication"));
    let p = plethysm(r, r)?;
    if g.source.value != p.product.value {
        return Err(PlError::Mismatch(
            "multiplication source is not the plethysm square".into(),
        ));
    }
    let pp_l = plethysm(&p.product, r)?;
    let pp_r = plethysm(r, &p.product)?;
    let gl = plethysm_map(g, &BimoduleMap::identity(r), &pp_l, &p)?.then(g);
    let a = assoc_iso(r, r, r)?;
    let gr = a.then(&plethysm_map(&BimoduleMap::identity(r), g, &pp_r, &p)?.then(g));
    for (k, m1) in &gl.component {
        if m1 != &gr.component[k] {
            report.violation(format!("associativity square fails at ({}, {})", k.0, k.1));
        }
    }
    if let Some(h) = h {
        report.merge(h.validate().prefixed("unit"));
        let unit = hom_unit(&r.action, r.flavor);
        let p_ur = plethysm(&unit, r)?;
        let p_ru = plethysm(r, &unit)?;
        let lu = left_unit_iso(r)?;
        let ru = right_unit_iso(r)?;
        let left_tri = plethysm_map(h, &BimoduleMap::identity(r), &p_ur, &p)?.then(g);
        for (k, m1) in &left_tri.component {
            if m1 != &lu.component[k] {
                report.violation(format!("left unit triangle fails at ({}, {})", k.0, k.1));
            }
        }
        let right_tri = plethysm_map(&BimoduleMap::identity(r), h, &p_ru, &p)?.then(g);
        for (k, m1) in &right_tri.component {
            if m1 != &ru.component[k] {
                report.violation(format!("right unit triangle fails at ({}, {})", k.0, k.1));
            }
        }
    }
    Ok(report)
}

pub fn el_mor_id(a: &str, b: &str, x: &str) -> Id {
    join_parts(&[a, b, x])
}

/// A unital FinSet monoid presents a category: hom-sets are the values,
/// composition is the multiplication on representatives, identities come from
/// the unit. Also returns the identity-on-objects functor from the action.
pub fn category_from_monoid(
    r: &Bimodule,
    g: &BimoduleMap,
    h: &BimoduleMap,
    p: &PlethysmResult,
) -> Result<(FinCategory, FunctorData), PlError> {
    if r.flavor != Flavor::FinSet {
        return Err(PlError::Unsupported(
            "category presentation needs the FinSet flavor".into(),
        ));
    }
    let a_cat = &r.action;
    let mut morphisms = BTreeMap::new();
    for ((a, b), v) in &r.value {
        for x in v.names() {
            morphisms.insert(el_mor_id(a, b, x), (a.clone(), b.clone()));
        }
    }
    let mut identity = BTreeMap::new();
    for a in &a_cat.objects {
        let e = h.at(a, a).apply(a_cat.id_of(a));
        identity.insert(a.clone(), el_mor_id(a, a, e));
    }
    let mut compose = BTreeMap::new();
    for (m1, (a, b)) in &morphisms {
        for (m2, (b2, c)) in &morphisms {
            if b != b2 {
                continue;
            }
            let x = &split_parts(m1)[2];
            let y = &split_parts(m2)[2];
            let class = p.slice(a, c).class_of(b, x, y);
            let z = g.at(a, c).apply(class);
            compose.insert((m1.clone(), m2.clone()), el_mor_id(a, c, z));
        }
    }
    let k = FinCategory {
        objects: a_cat.objects.clone(),
        morphisms,
        identity,
        compose,
    };
    k.size_guard()?;
    let incl = FunctorData {
        source: a_cat.clone(),
        target: k.clone(),
        ob: a_cat.objects.iter().map(|o| (o.clone(), o.clone())).collect(),
        mor: a_cat
            .morphisms
            .iter()
            .map(|(m, (s, t))| {
                let x = h.at(s, t).apply(m);
                (m.clone(), el_mor_id(s, t, x))
            })
            .collect(),
    };
    Ok((k, incl))
}

/// The canonical unital monoid of a category along an identity-on-objects
/// functor: values are hom-sets, the action conjugates through the functor,
/// multiplication is composition, the unit is the functor itself.
pub fn monoid_from_category(
    k: &FinCategory,
    i: &FunctorData,
) -> Result<BimoduleMonoid, PlError> {
    if &i.target != k {
        return Err(PlError::Mismatch("functor does not land in the category".into()));
    }
    if i.ob.iter().any(|(a, b)| a != b) {
        return Err(PlError::Mismatch("functor is not identity on objects".into()));
    }
    let a_cat = &i.source;
    let mut value = BTreeMap::new();
    for x in &a_cat.objects {
        for y in &a_cat.objects {
            value.insert((x.clone(), y.clone()), TargetObj::set(k.hom(x, y)));
        }
    }
    let r = Bimodule::from_rule(a_cat, value, |s, t, phi| {
        k.then(k.then(&i.mor[s], phi), &i.mor[t]).clone()
    });
    let p = plethysm(&r, &r)?;
    let gamma = gamma_from_fn(&p, &r, |_, _, _, x, y| Some(k.then(x, y).clone()))?;
    let unit_src = hom_unit(a_cat, Flavor::FinSet);
    let unit = BimoduleMap {
        source: unit_src.clone(),
        target: r.clone(),
        component: unit_src
            .value
            .iter()
            .map(|((a, b), v)| {
                let m = TargetMor::from_fn(v, r.val(a, b), |s| i.mor[s].clone());
                ((a.clone(), b.clone()), m)
            })
            .collect(),
    };
    Ok(BimoduleMonoid {
        bimodule: r,
        square: p,
        gamma,
        unit: Some(unit),
    })
}

/// Both composites of the category <-> monoid correspondence, as law reports.
pub fn correspondence_roundtrip(k: &FinCategory, i: &FunctorData) -> Result<LawReport, PlError> {
    let mut report = LawReport::new();
    let m = monoid_from_category(k, i)?;
    let unit = m.unit.clone().unwrap();
    let (k2, i2) = category_from_monoid(&m.bimodule, &m.gamma, &unit, &m.square)?;
    // canonical comparison functor k -> k2
    let cmp = FunctorData {
        source: k.clone(),
        target: k2.clone(),
        ob: k.objects.iter().map(|o| (o.clone(), o.clone())).collect(),
        mor: k
            .morphisms
            .iter()
            .map(|(phi, (s, t))| (phi.clone(), el_mor_id(s, t, phi)))
            .collect(),
    };
    report.merge(check_functor(&cmp).prefixed("category round trip"));
    report.check(cmp.is_iso(), || "category round trip comparison is not an isomorphism".into());
    report.check(i.then(&cmp) == i2, || {
        "category round trip does not match the identity-on-objects functor".into()
    });
    // monoid round trip: rebuild a monoid from (k2, i2) and compare through
    // the canonical bijection x -> <A><B><x>
    let m2 = monoid_from_category(&k2, &i2)?;
    for ((a, b), v) in &m.bimodule.value {
        let w = m2.bimodule.val(a, b);
        report.check(v.size() == w.size(), || {
            format!("monoid round trip changes value size at ({a}, {b})")
        });
        for x in v.names() {
            report.check(w.names().contains(&el_mor_id(a, b, x)), || {
                format!("monoid round trip misses element {x} at ({a}, {b})")
            });
        }
    }
    // multiplication transported along the bijection agrees
    for ((a, c), slice) in &m.square.classes.slices {
        for g in &slice.generators {
            let (b, x, y) = split_gen(g);
            let z = m.gamma.at(a, c).apply(slice.class_of(&b, &x, &y));
            let g2 = m2
                .square
                .slice(a, c)
                .class_of(&b, &el_mor_id(a, &b, &x), &el_mor_id(&b, c, &y));
            let z2 = m2.gamma.at(a, c).apply(g2);
            report.check(z2 == &el_mor_id(a, c, z), || {
                format!("monoid round trip multiplication disagrees on ({x}, {y}) at ({a}, {c})")
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corecat::validate_category;

    fn s2_category() -> FinCategory {
        FinCategory {
            objects: vec!["*".into()],
            morphisms: BTreeMap::from([
                ("e".to_string(), ("*".to_string(), "*".to_string())),
                ("s".to_string(), ("*".to_string(), "*".to_string())),
            ]),
            identity: BTreeMap::from([("*".into(), "e".into())]),
            compose: BTreeMap::from([
                (("e".into(), "e".into()), "e".into()),
                (("e".into(), "s".into()), "s".into()),
                (("s".into(), "e".into()), "s".into()),
                (("s".into(), "s".into()), "e".into()),
            ]),
        }
    }

    #[test]
    fn hom_unit_terminal_is_constant_singleton() {
        let u = hom_unit(&FinCategory::terminal(), Flavor::FinSet);
        assert_eq!(u.val("*", "*").size(), 1);
        assert!(u.validate().is_ok());
    }

    #[test]
    fn hom_unit_s2_vect_is_group_algebra() {
        let u = hom_unit(&s2_category(), Flavor::FinVect);
        assert_eq!(u.val("*", "*").size(), 2);
        assert!(u.validate().is_ok());
        // two-sided multiplication: acting by (s, s) fixes the basis vector e
        // (s e s = e) and fixes s (s s s = s)
        let m = u.action_mor("s", "s");
        assert!(m.is_iso());
    }

    #[test]
    fn plethysm_unit_square_over_s2() {
        // hom-unit squared over S_2: coend classes biject with the group
        let c = s2_category();
        let u = hom_unit(&c, Flavor::FinSet);
        let p = plethysm(&u, &u).unwrap();
        assert_eq!(p.product.val("*", "*").size(), 2);
        assert!(p.product.validate().is_ok());
    }

    #[test]
    fn plethysm_with_empty_is_empty() {
        let c = s2_category();
        let u = hom_unit(&c, Flavor::FinSet);
        let z = Bimodule::empty(&c, Flavor::FinSet);
        let p = plethysm(&u, &z).unwrap();
        assert_eq!(p.product.val("*", "*").size(), 0);
    }

    /// Independent oracle: naive fixpoint closure of the co-wedge relation,
    /// no union-find involved.
    fn orbit_classes_oracle(
        r1: &Bimodule,
        r2: &Bimodule,
        a: &str,
        c: &str,
    ) -> Vec<Vec<Id>> {
        let cat = &r1.action;
        let mut gens: Vec<Id> = Vec::new();
        for b in &cat.objects {
            for x in r1.val(a, b).names() {
                for y in r2.val(b, c).names() {
                    gens.push(gen_id(b, x, y));
                }
            }
        }
        let mut classes: Vec<Vec<Id>> = gens.iter().map(|g| vec![g.clone()]).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for (m, (b, b2)) in &cat.morphisms {
                let left = r1.action_mor(cat.id_of(a), m);
                let right = r2.action_mor(m, cat.id_of(c));
                for x in r1.val(a, b).names() {
                    for y2 in r2.val(b2, c).names() {
                        let lhs = gen_id(b2, left.apply(x), y2);
                        let rhs = gen_id(b, x, right.apply(y2));
                        let ci = classes.iter().position(|cl| cl.contains(&lhs)).unwrap();
                        let cj = classes.iter().position(|cl| cl.contains(&rhs)).unwrap();
                        if ci != cj {
                            let moved = classes.remove(ci.max(cj));
                            classes[ci.min(cj)].extend(moved);
                            changed = true;
                        }
                    }
                }
            }
        }
        classes
    }

    #[test]
    fn coend_classes_match_orbit_oracle() {
        let c = s2_category();
        let u = hom_unit(&c, Flavor::FinSet);
        let p = plethysm(&u, &u).unwrap();
        let oracle = orbit_classes_oracle(&u, &u, "*", "*");
        assert_eq!(p.product.val("*", "*").size(), oracle.len());
        // class map constant on oracle orbits, injective across them
        let slice = p.slice("*", "*");
        for class in &oracle {
            let reps: Vec<&Id> = class.iter().map(|g| slice.project.apply(g)).collect();
            assert!(reps.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn unit_constraints_are_isos_over_s2() {
        let c = s2_category();
        let u = hom_unit(&c, Flavor::FinSet);
        let (a, l, r) = monoidal_constraints(&u, &u, &u).unwrap();
        assert!(a.is_iso() && l.is_iso() && r.is_iso());
    }

    #[test]
    fn pentagon_and_triangle_over_s2() {
        let c = s2_category();
        let u = hom_unit(&c, Flavor::FinSet);
        assert!(check_pentagon(&u, &u, &u, &u).unwrap().is_ok());
        assert!(check_triangle(&u, &u).unwrap().is_ok());
    }

    #[test]
    fn canonical_monoid_of_s2_checks() {
        let c = s2_category();
        let m = monoid_from_category(&c, &FunctorData::identity(&c)).unwrap();
        let unit = m.unit.clone().unwrap();
        let report = check_monoid(&m.bimodule, &m.gamma, Some(&unit)).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn corrupted_gamma_reports_unit_failure() {
        let c = s2_category();
        let m = monoid_from_category(&c, &FunctorData::identity(&c)).unwrap();
        let mut g = m.gamma.clone();
        // post-compose the multiplication with the swap; over Z/2 this stays
        // associative but breaks both unit triangles
        let key = ("*".to_string(), "*".to_string());
        let comp = &g.component[&key];
        let flipped = TargetMor::from_fn(&comp.dom, &comp.cod, |cl| {
            if comp.apply(cl) == "e" {
                "s".into()
            } else {
                "e".into()
            }
        });
        g.component.insert(key, flipped);
        let unit = m.unit.clone().unwrap();
        let report = check_monoid(&m.bimodule, &g, Some(&unit)).unwrap();
        assert!(!report.is_ok());
        assert!(format!("{report}").contains("unit triangle"));
    }

    #[test]
    fn category_monoid_roundtrip_s2() {
        let c = s2_category();
        let report = correspondence_roundtrip(&c, &FunctorData::identity(&c)).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn roundtrip_on_a_two_object_category() {
        // a category with two objects, an isomorphism between them, over the
        // discrete action on the same objects
        let mut k = FinCategory::discrete(&["a", "b"]);
        k.morphisms
            .insert("f".into(), ("a".to_string(), "b".to_string()));
        k.morphisms
            .insert("g".into(), ("b".to_string(), "a".to_string()));
        for (x, y, z) in [
            ("f", "g", "id_a"),
            ("g", "f", "id_b"),
            ("id_a", "f", "f"),
            ("f", "id_b", "f"),
            ("id_b", "g", "g"),
            ("g", "id_a", "g"),
        ] {
            k.compose.insert((x.into(), y.into()), z.into());
        }
        assert!(validate_category(&k).is_ok());
        let a = FinCategory::discrete(&["a", "b"]);
        let i = FunctorData {
            source: a.clone(),
            target: k.clone(),
            ob: a.objects.iter().map(|o| (o.clone(), o.clone())).collect(),
            mor: BTreeMap::from([
                ("id_a".to_string(), "id_a".to_string()),
                ("id_b".to_string(), "id_b".to_string()),
            ]),
        };
        let report = correspondence_roundtrip(&k, &i).unwrap();
        assert!(report.is_ok(), "{report}");
    }
}
