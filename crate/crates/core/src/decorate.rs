//! Decorated categories of elements and the decorated plethysm.
//!
//! A finite-set representation `D` over a category of elements can itself be
//! read as a system of decorations: its category of elements pairs each base
//! element with a point of its fiber.  Representations over that doubled
//! category multiply by a decorated plethysm, and the whole picture is
//! controlled by an isomorphism with the category of elements of the
//! characteristic bimodule of `D`.

use std::collections::{BTreeMap, BTreeSet};

use crate::bimodule::{gen_id, plethysm, Bimodule, BimoduleMap, BimoduleMonoid};
use crate::corecat::{join_parts, pair_ob, split_parts, FunctorData, Id};
use crate::elements::{
    chi, chi_map, el_functor, el_mor_label, el_ob_id, element_category, element_plethysm,
    external_tensor, mu_comparison, pointwise_lan, ChiResult, DiamondResult, ElementCat,
    ElementRep, KanResult, RepMap,
};
use crate::report::LawReport;
use crate::target::{
    colimit_graph, factor_cocone_into, tensor, tensor_mor, tuple_name, ColimitResult, DiagGraph,
    Flavor, TargetFunctor, TargetMor, TargetObj,
};
use crate::PlError;

/// Flatten the fibers of a finite-set representation into a bimodule: the
/// elements over `(a, b)` pair each base element with one of its decorations,
/// and a morphism pair lifts both coordinates at once.
pub fn decoration_bimodule(d: &ElementRep) -> Result<Bimodule, PlError> {
    if d.flavor() != Flavor::FinSet {
        return Err(PlError::Unsupported(
            "decorations are finite-set valued; vector-space fibers have no element listing"
                .into(),
        ));
    }
    let act = &d.base.action;
    let mut value: BTreeMap<(Id, Id), Vec<Id>> = BTreeMap::new();
    for a in &act.objects {
        for b in &act.objects {
            value.insert((a.clone(), b.clone()), Vec::new());
        }
    }
    for (ob, (a, b, x)) in &d.base.data {
        let fiber = value.get_mut(&(a.clone(), b.clone())).unwrap();
        for u in d.value(ob).names() {
            fiber.push(join_parts(&[x, u]));
        }
    }
    let value = value
        .into_iter()
        .map(|(k, v)| (k, TargetObj::set(v)))
        .collect();
    Ok(Bimodule::from_rule(act, value, |s, t, e| {
        let parts = split_parts(e);
        let m = el_mor_label(s, t, act.tgt(s), act.src(t), &parts[0]);
        let (_, tgt_ob) = &d.base.cat.morphisms[&m];
        let x2 = &d.base.data[tgt_ob].2;
        join_parts(&[x2, d.lift_mor(&m).apply(&parts[1])])
    }))
}

/// The decorated category of elements: objects are base elements together
/// with a decoration, morphisms are the simultaneous lifts of both.
pub fn decorated_element_category(d: &ElementRep) -> Result<ElementCat, PlError> {
    element_category(&decoration_bimodule(d)?)
}

/// The comparison between the decorated category of elements and the category
/// of elements of the characteristic bimodule, which is an isomorphism of
/// categories for finite-set decorations: each pointing of the characteristic
/// value factors uniquely through one coprojection.
pub struct LambdaIso {
    pub dec: ElementCat,
    pub chi: ChiResult,
    pub el_chi: ElementCat,
    pub functor: FunctorData,
    pub inverse: FunctorData,
}

pub fn lambda_iso(d: &ElementRep) -> Result<LambdaIso, PlError> {
    let dec = decorated_element_category(d)?;
    let c = chi(d)?;
    let el_chi = element_category(&c.bimodule)?;
    let mut ob = BTreeMap::new();
    for (o, (a, b, xu)) in &dec.data {
        let parts = split_parts(xu);
        let cls = c.kan.lambda[&el_ob_id(a, b, &parts[0])].apply(&parts[1]);
        ob.insert(o.clone(), el_chi.object(a, b, cls));
    }
    let distinct: BTreeSet<_> = ob.values().collect();
    if distinct.len() != ob.len() || ob.len() != el_chi.data.len() {
        return Err(PlError::Law(
            "pointing comparison is not bijective on objects".into(),
        ));
    }
    let mut mor = BTreeMap::new();
    for (m, (s, t)) in &dec.over {
        let (src, tgt) = &dec.cat.morphisms[m];
        let there = el_chi.lift(s, t, &ob[src]);
        if el_chi.cat.morphisms[&there].1 != ob[tgt] {
            return Err(PlError::Law(format!(
                "pointing comparison is not functorial at {m}"
            )));
        }
        mor.insert(m.clone(), there);
    }
    let mdistinct: BTreeSet<_> = mor.values().collect();
    if mdistinct.len() != mor.len() || mor.len() != el_chi.cat.morphisms.len() {
        return Err(PlError::Law(
            "pointing comparison is not bijective on morphisms".into(),
        ));
    }
    let functor = FunctorData {
        source: dec.cat.clone(),
        target: el_chi.cat.clone(),
        ob: ob.clone(),
        mor: mor.clone(),
    };
    let inverse = FunctorData {
        source: el_chi.cat.clone(),
        target: dec.cat.clone(),
        ob: ob.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
        mor: mor.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
    };
    Ok(LambdaIso {
        dec,
        chi: c,
        el_chi,
        functor,
        inverse,
    })
}

/// The map of flattened bimodules induced by an equivariant map of
/// representations over a shared base.
pub fn decoration_map(g: &RepMap) -> Result<BimoduleMap, PlError> {
    if g.source.base.cat != g.target.base.cat {
        return Err(PlError::Mismatch(
            "decoration map needs representations over a shared base".into(),
        ));
    }
    let source = decoration_bimodule(&g.source)?;
    let target = decoration_bimodule(&g.target)?;
    let mut component = BTreeMap::new();
    for ((a, b), v) in &source.value {
        let mor = TargetMor::from_fn(v, target.val(a, b), |e| {
            let parts = split_parts(e);
            let u2 = g.component[&el_ob_id(a, b, &parts[0])].apply(&parts[1]);
            join_parts(&[&parts[0], u2])
        });
        component.insert((a.clone(), b.clone()), mor);
    }
    Ok(BimoduleMap {
        source,
        target,
        component,
    })
}

/// A decoration carrying a multiplication from its own plethysm square.
pub struct DecMonoid {
    pub base: BimoduleMonoid,
    pub d: ElementRep,
    /// the multiplication `D <> D -> D` over the base elements
    pub gamma: RepMap,
    pub dd: DiamondResult,
    pub flat: Bimodule,
    pub el_dec: ElementCat,
}

pub fn dec_monoid(
    d: &ElementRep,
    m: &BimoduleMonoid,
    gamma: &RepMap,
) -> Result<DecMonoid, PlError> {
    let dd = element_plethysm(d, d, m)?;
    if gamma.source != dd.rep || gamma.target != *d {
        return Err(PlError::Mismatch(
            "decoration multiplication must go from the plethysm of the decoration with itself"
                .into(),
        ));
    }
    if !gamma.validate().is_ok() {
        return Err(PlError::Law(
            "decoration multiplication is not equivariant".into(),
        ));
    }
    let flat = decoration_bimodule(d)?;
    let el_dec = element_category(&flat)?;
    Ok(DecMonoid {
        base: m.clone(),
        d: d.clone(),
        gamma: gamma.clone(),
        dd,
        flat,
        el_dec,
    })
}

/// The plethysm class of a decorated composable pair: the coend class of the
/// underlying pair, pushed through the pair-diagram colimit and the extension
/// comparison of the undecorated plethysm.
fn dec_pair_class(
    g: &DecMonoid,
    a: &str,
    c: &str,
    b: &str,
    x: &str,
    y: &str,
    u: &str,
    v: &str,
) -> (Id, Id) {
    let zcls = g.base.square.slice(a, c).class_of(b, x, y);
    let zo = el_ob_id(a, c, zcls);
    let z = g.base.gamma.at(a, c).apply(zcls).clone();
    let ext = g.dd.ext.colims[&zo].cocone[&gen_id(b, x, y)].apply(&tuple_name(&[u, v]));
    let w = g.dd.kan.lambda[&zo].apply(ext).clone();
    (z, w)
}

fn apex_id(m: &str, x: &str, y: &str) -> Id {
    join_parts(&["ap", m, x, y])
}

fn node_parts(node: &str) -> (Id, Id, Id, bool) {
    let parts = split_parts(node);
    if parts.len() == 4 && parts[0] == "ap" {
        (parts[1].clone(), parts[2].clone(), parts[3].clone(), true)
    } else {
        (parts[0].clone(), parts[1].clone(), parts[2].clone(), false)
    }
}

/// The decorated plethysm of two representations over the decorated category
/// of elements: the extension, along the element functor of the decoration
/// multiplication, of the decorated external tensor, whose value on a
/// decorated class is the colimit of factor tensors over all of its
/// composable-pair representatives and the bridging spans between them.
#[derive(Debug, Clone)]
pub struct DecDiamond {
    pub rep: ElementRep,
    pub kan: KanResult,
    /// the decorated external tensor over the decorated elements of `D <> D`
    pub tensor: ElementRep,
    pub colims: BTreeMap<Id, ColimitResult>,
}

pub fn decorated_plethysm(
    e1: &ElementRep,
    e2: &ElementRep,
    g: &DecMonoid,
) -> Result<DecDiamond, PlError> {
    if e1.base.cat != g.el_dec.cat || e2.base.cat != g.el_dec.cat {
        return Err(PlError::Mismatch(
            "decorated factors must live over the decorated category of elements".into(),
        ));
    }
    if e1.flavor() != e2.flavor() {
        return Err(PlError::Mismatch("decorated plethysm: flavors differ".into()));
    }
    let flavor = e1.flavor();
    let rd = &g.flat;
    let act = &g.base.bimodule.action;
    let el_dd = element_category(&decoration_bimodule(&g.dd.rep)?)?;
    let mut colims = BTreeMap::new();
    for (ob, (a, c, zw)) in &el_dd.data {
        let parts = split_parts(zw);
        let (z, w) = (&parts[0], &parts[1]);
        let mut nodes = BTreeMap::new();
        for b in &act.objects {
            for xt in rd.val(a, b).names() {
                for yt in rd.val(b, c).names() {
                    let px = split_parts(xt);
                    let py = split_parts(yt);
                    let (z2, w2) = dec_pair_class(g, a, c, b, &px[0], &py[0], &px[1], &py[1]);
                    if &z2 != z || &w2 != w {
                        continue;
                    }
                    let val = tensor(
                        e1.value(&el_ob_id(a, b, xt)),
                        e2.value(&el_ob_id(b, c, yt)),
                    )?;
                    nodes.insert(gen_id(b, xt, yt), val);
                }
            }
        }
        let mut edges = Vec::new();
        for (m, (b, b2)) in &act.morphisms {
            if act.is_identity(m) {
                continue;
            }
            let left = rd.action_mor(act.id_of(a), m);
            let right = rd.action_mor(m, act.id_of(c));
            for xt in rd.val(a, b).names() {
                for y2 in rd.val(b2, c).names() {
                    let n1 = gen_id(b2, left.apply(xt), y2);
                    if !nodes.contains_key(&n1) {
                        continue;
                    }
                    let n2 = gen_id(b, xt, right.apply(y2));
                    debug_assert!(nodes.contains_key(&n2));
                    let ap = apex_id(m, xt, y2);
                    let apex_val = tensor(
                        e1.value(&el_ob_id(a, b, xt)),
                        e2.value(&el_ob_id(b2, c, y2)),
                    )?;
                    let lift1 = e1.lift_mor(&el_mor_label(act.id_of(a), m, a, b, xt));
                    let lift2 = e2.lift_mor(&el_mor_label(m, act.id_of(c), b2, c, y2));
                    let le = tensor_mor(
                        lift1,
                        &TargetMor::identity(e2.value(&el_ob_id(b2, c, y2))),
                    )?;
                    let re = tensor_mor(
                        &TargetMor::identity(e1.value(&el_ob_id(a, b, xt))),
                        lift2,
                    )?;
                    nodes.insert(ap.clone(), apex_val);
                    edges.push((ap.clone(), n1, le));
                    edges.push((ap, n2, re));
                }
            }
        }
        colims.insert(ob.clone(), colimit_graph(&DiagGraph { nodes, edges }, flavor));
    }
    let mut mor = BTreeMap::new();
    for (em, (src, tgt)) in &el_dd.cat.morphisms {
        let (s, t) = &el_dd.over[em];
        let (a, c, _) = &el_dd.data[src];
        let colim = &colims[src];
        let tgt_colim = &colims[tgt];
        let mut test = BTreeMap::new();
        for node in colim.cocone.keys() {
            let (mid, xt, yt, is_apex) = node_parts(node);
            let (b_left, b_right) = if is_apex {
                (act.src(&mid).clone(), act.tgt(&mid).clone())
            } else {
                (mid.clone(), mid.clone())
            };
            let x2 = rd.action_mor(s, act.id_of(&b_left)).apply(&xt).clone();
            let y2 = rd.action_mor(act.id_of(&b_right), t).apply(&yt).clone();
            let lift1 = e1.lift_mor(&el_mor_label(s, act.id_of(&b_left), a, &b_left, &xt));
            let lift2 = e2.lift_mor(&el_mor_label(act.id_of(&b_right), t, &b_right, c, &yt));
            let step = tensor_mor(lift1, lift2)?;
            let there = if is_apex {
                apex_id(&mid, &x2, &y2)
            } else {
                gen_id(&mid, &x2, &y2)
            };
            test.insert(node.clone(), step.then(&tgt_colim.cocone[&there]));
        }
        let induced = factor_cocone_into(colim, &test, &tgt_colim.obj).ok_or_else(|| {
            PlError::Law(format!("decorated tensor action does not descend along {em}"))
        })?;
        mor.insert(em.clone(), induced);
    }
    let fun = TargetFunctor {
        source: el_dd.cat.clone(),
        flavor,
        ob: colims
            .iter()
            .map(|(k, v)| (k.clone(), v.obj.clone()))
            .collect(),
        mor,
    };
    let tensor_rep = ElementRep { base: el_dd, fun };
    let k = el_functor(&decoration_map(&g.gamma)?, &tensor_rep.base, &g.el_dec)?;
    let kan = pointwise_lan(&tensor_rep.fun, &k)?;
    let rep = ElementRep {
        base: g.el_dec.clone(),
        fun: kan.fun.clone(),
    };
    Ok(DecDiamond {
        rep,
        kan,
        tensor: tensor_rep,
        colims,
    })
}

/// Reindex a representation along an isomorphism of element categories.
pub fn transport_along(e: &ElementRep, f: &FunctorData, base: &ElementCat) -> ElementRep {
    let ob = base
        .cat
        .objects
        .iter()
        .map(|o| (o.clone(), e.fun.ob[&f.ob[o]].clone()))
        .collect();
    let mor = base
        .cat
        .morphisms
        .keys()
        .map(|m| (m.clone(), e.fun.mor[&f.mor[m]].clone()))
        .collect();
    ElementRep {
        base: base.clone(),
        fun: TargetFunctor {
            source: base.cat.clone(),
            flavor: e.flavor(),
            ob,
            mor,
        },
    }
}

/// Compare the two routes from a pair of decorated representations to a
/// product: through the characteristic bimodule, whose multiplication is the
/// product comparison followed by the image of the decoration multiplication,
/// and directly through the decorated plethysm.  Both are extensions of
/// isomorphic tensors along matched functors, so the induced comparison must
/// be a natural isomorphism.
pub fn plus_element_equivalence(
    e1: &ElementRep,
    e2: &ElementRep,
    g: &DecMonoid,
) -> Result<LawReport, PlError> {
    let mut report = LawReport::new();
    let lam = lambda_iso(&g.d)?;
    let f1 = transport_along(e1, &lam.inverse, &lam.el_chi);
    let f2 = transport_along(e2, &lam.inverse, &lam.el_chi);
    let chi_d = &lam.chi;
    let chi_dd = chi(&g.dd.rep)?;
    let p_chi = plethysm(&chi_d.bimodule, &chi_d.bimodule)?;
    let mu = mu_comparison(&g.d, &g.d, chi_d, chi_d, &g.dd, &chi_dd, &g.base, &p_chi)?;
    let chi_g = chi_map(&g.gamma, &chi_dd, chi_d)?;
    let gamma_chi = mu.then(&chi_g);
    let ext = external_tensor(&f1, &f2, &chi_d.bimodule, &chi_d.bimodule, &p_chi)?;
    let k_chi = el_functor(&gamma_chi, &ext.rep.base, &lam.el_chi)?;
    let kan = pointwise_lan(&ext.rep.fun, &k_chi)?;
    let dec = decorated_plethysm(e1, e2, g)?;

    // per pair class: the comparison between the two tensor colimits, one
    // over characteristic classes and one over decorated representatives
    let mut pair_iso: BTreeMap<Id, (Id, TargetMor)> = BTreeMap::new();
    for (a_ob, (a, c, sq)) in &ext.rep.base.data {
        let mu_cls = mu.at(a, c).apply(sq);
        let (zo, w) = chi_dd.kan.decode(&pair_ob(a, c), mu_cls).ok_or_else(|| {
            PlError::Law(format!("product class {mu_cls} has no decorated representative"))
        })?;
        let z = &g.dd.rep.base.data[&zo].2;
        let a_dec = el_ob_id(a, c, &join_parts(&[z, &w]));
        let dcolim = &dec.colims[&a_dec];
        let ecolim = &ext.colims[a_ob];
        let mut test = BTreeMap::new();
        for (node, leg) in &ecolim.cocone {
            let (mid, p, q, is_apex) = node_parts(node);
            let (b_left, b_right) = if is_apex {
                (
                    g.base.bimodule.action.src(&mid).clone(),
                    g.base.bimodule.action.tgt(&mid).clone(),
                )
            } else {
                (mid.clone(), mid.clone())
            };
            let (xo, u) = chi_d.kan.decode(&pair_ob(a, &b_left), &p).ok_or_else(|| {
                PlError::Law(format!("characteristic class {p} has no pointing"))
            })?;
            let (yo, v) = chi_d.kan.decode(&pair_ob(&b_right, c), &q).ok_or_else(|| {
                PlError::Law(format!("characteristic class {q} has no pointing"))
            })?;
            let xt = join_parts(&[&g.d.base.data[&xo].2, &u]);
            let yt = join_parts(&[&g.d.base.data[&yo].2, &v]);
            let dnode = if is_apex {
                apex_id(&mid, &xt, &yt)
            } else {
                gen_id(&mid, &xt, &yt)
            };
            let dleg = dcolim.cocone[&dnode].clone();
            test.insert(
                node.clone(),
                TargetMor::from_fn(&leg.dom, &dcolim.obj, |e| dleg.apply(e).clone()),
            );
        }
        let iso = factor_cocone_into(ecolim, &test, &dcolim.obj).ok_or_else(|| {
            PlError::Law(format!("pair comparison does not descend at {a_ob}"))
        })?;
        pair_iso.insert(a_ob.clone(), (a_dec, iso));
    }

    // per base class: factor the comparison cocone through the extension on
    // the characteristic side and check it lands isomorphically
    let mut cmp: BTreeMap<Id, TargetMor> = BTreeMap::new();
    for (b_ob, kcolim) in &kan.colims {
        let rhs_val = dec.rep.value(&lam.inverse.ob[b_ob]).clone();
        let mut test = BTreeMap::new();
        let mut broken = false;
        for cob in kcolim.cocone.keys() {
            let parts = split_parts(cob);
            let a_ob = &parts[0];
            let mchi = &parts[2];
            let (a_dec, iso) = &pair_iso[a_ob];
            let mid_dec = &dec.kan.along.ob[a_dec];
            let mid_chi = &lam.inverse.ob[&k_chi.ob[a_ob]];
            if mid_dec != mid_chi {
                report.violation(format!("multiplication images disagree at {a_ob}"));
                broken = true;
                break;
            }
            let step = &dec.rep.fun.mor[&lam.inverse.mor[mchi]];
            test.insert(cob.clone(), iso.then(&dec.kan.lambda[a_dec]).then(step));
        }
        if broken {
            continue;
        }
        match factor_cocone_into(kcolim, &test, &rhs_val) {
            Some(mor) => {
                report.check(mor.is_iso(), || {
                    format!("comparison is not invertible at {b_ob}")
                });
                cmp.insert(b_ob.clone(), mor);
            }
            None => report.violation(format!("comparison does not descend at {b_ob}")),
        }
    }
    for (m, (src, tgt)) in &lam.el_chi.cat.morphisms {
        let (Some(cs), Some(ct)) = (cmp.get(src), cmp.get(tgt)) else {
            continue;
        };
        let lhs = kan.fun.mor[m].then(ct);
        let rhs = cs.then(&dec.rep.fun.mor[&lam.inverse.mor[m]]);
        if lhs != rhs {
            report.violation(format!("comparison is not natural at {m}"));
        }
    }
    Ok(report)
}
