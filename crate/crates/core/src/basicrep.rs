//! Representations of the category of elements of a basic bimodule:
//! element-wise horizontal extension along the joining functor, the basic
//! element plethysm with its Kan-extension unit, and the basic relative
//! product of bimodules over the basics.

use std::collections::BTreeMap;

use crate::bimodule::{plethysm, plethysm_map, Bimodule, BimoduleMap, BimoduleMonoid};
use crate::corecat::{pair_mor, pair_ob, split_parts, FunctorData, Id};
use crate::elements::{
    chi, el_mor_label, el_ob_id, element_category, external_tensor, plethysm_unit_rep,
    ElementCat, ElementRep, KanResult, UnitRep,
};
use crate::factorize::{
    basic_pairs, bimodule_pullback, extend_map, ext_node_id, free_smc, full_subcategory,
    horizontal_extension, tuple_elem, tuple_split, FactorizableAction, FactorizationWitness,
    FreeSMC,
};
use crate::report::LawReport;
use crate::target::{tag, Flavor, TargetFunctor, TargetMor, TargetObj};
use crate::PlError;

/// The joining functor from words of basic elements into the elements of the
/// extension: fold the elements into a decorated word class.
pub struct JoinData {
    pub free: FreeSMC,
    pub el_basic: ElementCat,
    pub el_ext: ElementCat,
    pub functor: FunctorData,
}

pub fn join_functor(
    w: &FactorizationWitness,
    fa: &FactorizableAction,
) -> Result<JoinData, PlError> {
    let cat = &fa.action;
    let m = &fa.monoidal;
    let el_basic = element_category(&w.basic)?;
    let el_ext = element_category(&w.extension)?;
    let free = free_smc(&el_basic.cat, w.cap, m.symmetric)?;
    // keep only words whose letter pairs fold within the truncation and are
    // supported in the extension (reduced mode drops the unit-pair letter)
    let unit_pair = (m.unit.clone(), m.unit.clone());
    let keep: Vec<Id> = free
        .category
        .objects
        .iter()
        .filter(|ob| {
            let letters = &free.word_of[*ob];
            let mut ta = m.unit.clone();
            let mut tb = m.unit.clone();
            for l in letters {
                let (a, b, _) = &el_basic.data[l];
                if w.reduced && (a.clone(), b.clone()) == unit_pair {
                    return false;
                }
                match (m.ob(&ta, a), m.ob(&tb, b)) {
                    (Some(x), Some(y)) => {
                        ta = x.clone();
                        tb = y.clone();
                    }
                    _ => return false,
                }
            }
            true
        })
        .cloned()
        .collect();
    let source = full_subcategory(&free.category, &keep);
    let mut ob = BTreeMap::new();
    for wid in &keep {
        let letters = &free.word_of[wid];
        let word: Vec<(Id, Id)> = letters
            .iter()
            .map(|l| {
                let (a, b, _) = &el_basic.data[l];
                (a.clone(), b.clone())
            })
            .collect();
        let elems: Vec<&str> = letters
            .iter()
            .map(|l| el_basic.data[l].2.as_str())
            .collect();
        let a_all = m
            .fold_ob(&word.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>())
            .unwrap();
        let b_all = m
            .fold_ob(&word.iter().map(|(_, b)| b.clone()).collect::<Vec<_>>())
            .unwrap();
        let node = ext_node_id(&word, cat.id_of(&a_all), cat.id_of(&b_all));
        let class = w.slice(&a_all, &b_all).colim.class_of[&tag(&node, &tuple_elem(&elems))]
            .clone();
        ob.insert(wid.clone(), el_ext.object(&a_all, &b_all, &class));
    }
    let mut mor = BTreeMap::new();
    for (mid, (src, _)) in &source.morphisms {
        let (p, letters) = &free.mor_data[mid];
        // the base decoration: permuted tensors of the per-letter actions
        let mut s_parts = Vec::new();
        let mut t_parts = Vec::new();
        let mut a_src_tgt = Vec::new(); // A-side sources in target-word order
        let mut b_tgt_src = Vec::new(); // B-side targets in source-word order
        let k = letters.len();
        let mut a_by_target = vec![String::new(); k];
        for (i, l) in letters.iter().enumerate() {
            let (s, t) = &el_basic.over[l];
            s_parts.push(s.clone());
            t_parts.push(t.clone());
            a_by_target[p[i]] = cat.src(s).clone();
            b_tgt_src.push(cat.tgt(t).clone());
        }
        a_src_tgt.extend(a_by_target);
        let fold_s = m
            .fold_mor(cat, &s_parts)
            .ok_or_else(|| PlError::SizeCap("joined action leaves the truncation".into()))?;
        let fold_t = m
            .fold_mor(cat, &t_parts)
            .ok_or_else(|| PlError::SizeCap("joined action leaves the truncation".into()))?;
        let mut p_inv = vec![0usize; k];
        for (i, pi) in p.iter().enumerate() {
            p_inv[*pi] = i;
        }
        let perm_a = m
            .perm_block_mor(cat, &a_src_tgt, &p_inv)
            .ok_or_else(|| PlError::SizeCap("block permutation leaves the truncation".into()))?;
        let perm_b = m
            .perm_block_mor(cat, &b_tgt_src, p)
            .ok_or_else(|| PlError::SizeCap("block permutation leaves the truncation".into()))?;
        let s_all = cat
            .comp(&perm_a, &fold_s)
            .ok_or_else(|| PlError::Mismatch("joined contravariant decoration missing".into()))?
            .clone();
        let t_all = cat
            .comp(&fold_t, &perm_b)
            .ok_or_else(|| PlError::Mismatch("joined covariant decoration missing".into()))?
            .clone();
        mor.insert(mid.clone(), el_ext.lift(&s_all, &t_all, &ob[src]));
    }
    let functor = FunctorData {
        source,
        target: el_ext.cat.clone(),
        ob,
        mor,
    };
    Ok(JoinData {
        free,
        el_basic,
        el_ext,
        functor,
    })
}

/// The element-wise horizontal extension of a basic element representation:
/// a left Kan extension of the folded word values along the joining functor.
pub struct ExtendedRep {
    pub rep: ElementRep,
    pub kan: KanResult,
    pub join: JoinData,
}

pub fn extend_rep(
    d: &ElementRep,
    w: &FactorizationWitness,
    fa: &FactorizableAction,
) -> Result<ExtendedRep, PlError> {
    if d.flavor() != Flavor::FinSet {
        return Err(PlError::Unsupported(
            "element-wise extension is computed for finite-set representations".into(),
        ));
    }
    if d.base.cat != element_category(&w.basic)?.cat {
        return Err(PlError::Mismatch(
            "representation is not based on the witnessed basics".into(),
        ));
    }
    let join = join_functor(w, fa)?;
    let mut ob = BTreeMap::new();
    let mut mor = BTreeMap::new();
    for wid in &join.functor.source.objects {
        let letters = &join.free.word_of[wid];
        let mut tuples: Vec<Vec<Id>> = vec![vec![]];
        for l in letters {
            let names = d.fun.ob[l].names();
            tuples = tuples
                .iter()
                .flat_map(|t| {
                    names.iter().map(move |n| {
                        let mut t2 = t.clone();
                        t2.push(n.clone());
                        t2
                    })
                })
                .collect();
        }
        let elems = tuples
            .into_iter()
            .map(|t| tuple_elem(&t.iter().map(|s| s.as_str()).collect::<Vec<_>>()))
            .collect();
        ob.insert(wid.clone(), TargetObj::set(elems));
    }
    for (mid, (src, tgt)) in &join.functor.source.morphisms {
        let (p, letters) = &join.free.mor_data[mid];
        let lifts: Vec<TargetMor> = letters.iter().map(|l| d.fun.mor[l].clone()).collect();
        let p2 = p.clone();
        let f = TargetMor::from_fn(&ob[src], &ob[tgt], move |e| {
            let parts = tuple_split(e);
            let mut out = vec![String::new(); parts.len()];
            for (i, x) in parts.iter().enumerate() {
                out[p2[i]] = lifts[i].apply(x).clone();
            }
            tuple_elem(&out.iter().map(|s| s.as_str()).collect::<Vec<_>>())
        });
        mor.insert(mid.clone(), f);
    }
    let word_fun = TargetFunctor {
        source: join.functor.source.clone(),
        flavor: Flavor::FinSet,
        ob,
        mor,
    };
    let kan = crate::elements::pointwise_lan(&word_fun, &join.functor)?;
    let rep = ElementRep {
        base: join.el_ext.clone(),
        fun: kan.fun.clone(),
    };
    Ok(ExtendedRep { rep, kan, join })
}

/// Check that the two extensions commute past the characteristic bimodule:
/// the bimodule extension of chi(D) maps isomorphically onto chi of the
/// element-wise extension.
pub fn chi_otimes_commute(
    d: &ElementRep,
    w: &FactorizationWitness,
    fa: &FactorizableAction,
) -> Result<LawReport, PlError> {
    let cat = &fa.action;
    let m = &fa.monoidal;
    let ext = extend_rep(d, w, fa)?;
    let chi_ext = chi(&ext.rep)?;
    let chi_d = chi(d)?;
    let w_chi = horizontal_extension(&chi_d.bimodule, fa, w.cap, w.reduced)?;
    let mut r = LawReport::new();
    for ((a, c), slice) in &w_chi.slices {
        let tgt_colim = &chi_ext.kan.colims[&pair_ob(a, c)];
        let mut map: BTreeMap<Id, Id> = BTreeMap::new();
        let mut ok = true;
        for (node, leg) in &slice.colim.cocone {
            let info = &slice.nodes[node];
            'elem: for e in leg.dom.names() {
                let class = &slice.colim.class_of[&tag(node, e)];
                let parts = tuple_split(e);
                // decode every letter class back to a basic element with a
                // decoration that folds within the truncation
                let mut basic_obs: Vec<Id> = Vec::new();
                let mut us: Vec<Id> = Vec::new();
                let mut sigmas: Vec<Id> = Vec::new();
                let mut taus: Vec<Id> = Vec::new();
                for (i, ci) in parts.iter().enumerate() {
                    let (ai, bi) = &info.word[i];
                    let pair = pair_ob(ai, bi);
                    let mut found = false;
                    for (el_ob, lam) in &chi_d.kan.lambda {
                        if &chi_d.kan.along.ob[el_ob] != &pair {
                            continue;
                        }
                        for u in lam.dom.names() {
                            if lam.apply(u) == ci {
                                basic_obs.push(el_ob.clone());
                                us.push(u.clone());
                                sigmas.push(cat.id_of(ai).clone());
                                taus.push(cat.id_of(bi).clone());
                                found = true;
                                break;
                            }
                        }
                        if found {
                            break;
                        }
                    }
                    if !found {
                        // classes reachable only through decorated elements
                        for (cob, leg2) in chi_d.kan.colims[&pair].cocone.iter() {
                            let cparts = split_parts(cob);
                            let (s, t) = crate::corecat::split_pair(&cparts[2]);
                            for u in leg2.dom.names() {
                                if leg2.apply(u) == ci {
                                    basic_obs.push(cparts[0].clone());
                                    us.push(u.clone());
                                    sigmas.push(s.clone());
                                    taus.push(t.clone());
                                    found = true;
                                    break;
                                }
                            }
                            if found {
                                break;
                            }
                        }
                    }
                    if !found {
                        r.violation(format!("undecodable letter class {ci} at ({ai}, {bi})"));
                        ok = false;
                        continue 'elem;
                    }
                }
                // the joined element of the extension
                let word: Vec<(Id, Id)> = basic_obs
                    .iter()
                    .map(|o| {
                        let (a2, b2, _) = &ext.join.el_basic.data[o];
                        (a2.clone(), b2.clone())
                    })
                    .collect();
                let xs: Vec<&str> = basic_obs
                    .iter()
                    .map(|o| ext.join.el_basic.data[o].2.as_str())
                    .collect();
                let a_all = match m.fold_ob(&word.iter().map(|(x, _)| x.clone()).collect::<Vec<_>>())
                {
                    Some(v) => v,
                    None => {
                        r.violation(format!("decoded word folds outside the truncation at ({a}, {c})"));
                        ok = false;
                        continue;
                    }
                };
                let b_all = m
                    .fold_ob(&word.iter().map(|(_, y)| y.clone()).collect::<Vec<_>>())
                    .unwrap();
                let node0 = ext_node_id(&word, cat.id_of(&a_all), cat.id_of(&b_all));
                let xi = w.slice(&a_all, &b_all).colim.class_of
                    [&tag(&node0, &tuple_elem(&xs))]
                    .clone();
                let xi_ob = el_ob_id(&a_all, &b_all, &xi);
                // its decoration down to (a, c)
                let fold_s = m.fold_mor(cat, &sigmas).unwrap();
                let fold_t = m.fold_mor(cat, &taus).unwrap();
                let f = cat.comp(&info.sigma, &fold_s).unwrap().clone();
                let g = cat.comp(&fold_t, &info.tau).unwrap().clone();
                // the representation element inside the extended value
                let word_ob = crate::factorize::word_id(&basic_obs);
                let ident = ext.join.el_ext.cat.id_of(&xi_ob);
                let dcomma = crate::corecat::comma_object_id(&word_ob, "*", ident);
                let dclass = ext.kan.colims[&xi_ob].class_of[&tag(
                    &dcomma,
                    &tuple_elem(&us.iter().map(|s| s.as_str()).collect::<Vec<_>>()),
                )]
                    .clone();
                let tcomma = crate::corecat::comma_object_id(&xi_ob, "*", &pair_mor(&f, &g));
                let tclass = tgt_colim.class_of[&tag(&tcomma, &dclass)].clone();
                match map.get(class) {
                    Some(prev) if prev != &tclass => {
                        r.violation(format!(
                            "comparison is not well defined at class {class} of ({a}, {c})"
                        ));
                        ok = false;
                    }
                    _ => {
                        map.insert(class.clone(), tclass);
                    }
                }
            }
        }
        if ok {
            let images: std::collections::BTreeSet<&Id> = map.values().collect();
            r.check(
                images.len() == map.len() && map.len() == tgt_colim.obj.size(),
                || {
                    format!(
                        "comparison is not bijective at ({a}, {c}): {} classes onto {} of {}",
                        map.len(),
                        images.len(),
                        tgt_colim.obj.size()
                    )
                },
            );
        }
    }
    Ok(r)
}

/// The unit basic representation: the Kan extension of the trivial
/// representation along the unit of the basics.
pub fn basic_unit(h0: &BimoduleMap, flavor: Flavor) -> Result<UnitRep, PlError> {
    plethysm_unit_rep(h0, flavor)
}

/// All the shared data the basic constructions need: the factorizable
/// action, a unique-factorization monoid, its witnessed basics, the basic
/// composable pairs, and the basic multiplication.
pub struct BasicContext {
    pub fa: FactorizableAction,
    pub monoid: BimoduleMonoid,
    pub witness: FactorizationWitness,
    pub beta: Bimodule,
    /// beta -> the composable pairs of the monoid
    pub into_pairs: BimoduleMap,
    /// beta -> the basics
    pub gamma0: BimoduleMap,
    pub el_nu: ElementCat,
}

pub fn basic_context(
    fa: &FactorizableAction,
    monoid: &BimoduleMonoid,
    witness: &FactorizationWitness,
) -> Result<BasicContext, PlError> {
    if witness.iso.is_none() || witness.inclusion.is_none() {
        return Err(PlError::Mismatch(
            "the witness must be compared against the monoid first".into(),
        ));
    }
    if witness.iso.as_ref().unwrap().target.value != monoid.bimodule.value {
        return Err(PlError::Mismatch(
            "the witness compares against a different bimodule".into(),
        ));
    }
    let (beta, into_pairs, gamma0) = basic_pairs(&monoid.gamma, witness)?;
    let el_nu = element_category(&witness.basic)?;
    Ok(BasicContext {
        fa: fa.clone(),
        monoid: monoid.clone(),
        witness: witness.clone(),
        beta,
        into_pairs,
        gamma0,
        el_nu,
    })
}

/// Move a representation across a bimodule isomorphism by renaming the
/// element objects.
pub fn transport_rep(rep: &ElementRep, iso: &BimoduleMap) -> Result<ElementRep, PlError> {
    if !iso.is_iso() {
        return Err(PlError::Mismatch("transport needs an isomorphism".into()));
    }
    let el_t = element_category(&iso.target)?;
    let mut ob = BTreeMap::new();
    let mut mor = BTreeMap::new();
    for (o, (a, b, x)) in &el_t.data {
        let x0 = iso
            .at(a, b)
            .dom
            .names()
            .iter()
            .find(|y| iso.at(a, b).apply(y) == x)
            .unwrap()
            .clone();
        ob.insert(o.clone(), rep.fun.ob[&el_ob_id(a, b, &x0)].clone());
    }
    for (mid, (s, t)) in &el_t.over {
        let (src, _) = &el_t.cat.morphisms[mid];
        let (a, b, x) = &el_t.data[src];
        let x0 = iso
            .at(a, b)
            .dom
            .names()
            .iter()
            .find(|y| iso.at(a, b).apply(y) == x)
            .unwrap()
            .clone();
        mor.insert(mid.clone(), rep.fun.mor[&el_mor_label(s, t, a, b, &x0)].clone());
    }
    let source = el_t.cat.clone();
    Ok(ElementRep {
        base: el_t,
        fun: TargetFunctor {
            source,
            flavor: rep.flavor(),
            ob,
            mor,
        },
    })
}

/// The basic element plethysm: restrict the external tensor of the two
/// extensions to the basic composable pairs, then extend along the basic
/// multiplication.
pub struct BasicDiamond {
    pub rep: ElementRep,
    pub kan: KanResult,
    /// the external tensor of the two extensions, over the monoid square
    pub ext: crate::elements::ExtTensor,
    pub el_beta: ElementCat,
    /// el(beta) -> el(square), over the mono into the composable pairs
    pub incl: FunctorData,
}

pub fn basic_element_plethysm(
    d1: &ElementRep,
    d2: &ElementRep,
    ctx: &BasicContext,
) -> Result<BasicDiamond, PlError> {
    let iso = ctx.witness.iso.as_ref().unwrap();
    let e1 = extend_rep(d1, &ctx.witness, &ctx.fa)?;
    let e2 = extend_rep(d2, &ctx.witness, &ctx.fa)?;
    let t1 = transport_rep(&e1.rep, iso)?;
    let t2 = transport_rep(&e2.rep, iso)?;
    let r = &ctx.monoid.bimodule;
    let ext = external_tensor(&t1, &t2, r, r, &ctx.monoid.square)?;
    let el_beta = element_category(&ctx.beta)?;
    let incl = crate::elements::el_functor(&ctx.into_pairs, &el_beta, &ext.rep.base)?;
    let restricted = TargetFunctor {
        source: el_beta.cat.clone(),
        flavor: Flavor::FinSet,
        ob: incl
            .ob
            .iter()
            .map(|(o, o2)| (o.clone(), ext.rep.fun.ob[o2].clone()))
            .collect(),
        mor: incl
            .mor
            .iter()
            .map(|(m2, m3)| (m2.clone(), ext.rep.fun.mor[m3].clone()))
            .collect(),
    };
    let k = crate::elements::el_functor(&ctx.gamma0, &el_beta, &ctx.el_nu)?;
    let kan = crate::elements::pointwise_lan(&restricted, &k)?;
    let rep = ElementRep {
        base: ctx.el_nu.clone(),
        fun: kan.fun.clone(),
    };
    Ok(BasicDiamond {
        rep,
        kan,
        ext,
        el_beta,
        incl,
    })
}

/// A bimodule projecting to the basics.
#[derive(Debug, Clone)]
pub struct BasicRelative {
    pub total: Bimodule,
    pub projection: BimoduleMap,
}

impl BasicRelative {
    pub fn validate(&self) -> LawReport {
        let mut r = self.total.validate();
        r.merge(self.projection.validate().prefixed("projection"));
        r
    }
}

/// The basic relative product: pull the plethysm of the two extensions back
/// along the basic composable pairs, projecting through the basic
/// multiplication.
pub fn basic_relative_product(
    x1: &BasicRelative,
    x2: &BasicRelative,
    ctx: &BasicContext,
) -> Result<BasicRelative, PlError> {
    let iso = ctx.witness.iso.as_ref().unwrap();
    let w1 = horizontal_extension(&x1.total, &ctx.fa, ctx.witness.cap, true)?;
    let w2 = horizontal_extension(&x2.total, &ctx.fa, ctx.witness.cap, true)?;
    let p1 = extend_map(&x1.projection, &w1, &ctx.witness)?.then(iso);
    let p2 = extend_map(&x2.projection, &w2, &ctx.witness)?.then(iso);
    let p12 = plethysm(&w1.extension, &w2.extension)?;
    let down = plethysm_map(&p1, &p2, &p12, &ctx.monoid.square)?;
    let (total, _, onto_beta) = bimodule_pullback(&down, &ctx.into_pairs)?;
    let projection = onto_beta.then(&ctx.gamma0);
    Ok(BasicRelative { total, projection })
}

/// The unit for the basic relative product.
pub fn basic_relative_unit(h0: &BimoduleMap) -> BasicRelative {
    BasicRelative {
        total: h0.source.clone(),
        projection: h0.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::monoid_from_category;
    use crate::corecat::check_functor;
    use crate::factorize::basic_action_bimodule;
    use crate::zoo::s_action;

    fn hom_fixture() -> (FactorizableAction, BimoduleMonoid, FactorizationWitness) {
        let fa = s_action(2);
        let w = basic_action_bimodule(&fa, 2).unwrap();
        let m = monoid_from_category(&fa.action, &FunctorData::identity(&fa.action)).unwrap();
        (fa, m, w)
    }

    #[test]
    fn join_functor_is_lawful() {
        let (fa, _, w) = hom_fixture();
        let join = join_functor(&w, &fa).unwrap();
        let r = check_functor(&join.functor);
        assert!(r.is_ok(), "{r}");
        // the empty word joins to the unit identity class
        let empty = join
            .functor
            .source
            .objects
            .iter()
            .find(|o| join.free.word_of[*o].is_empty())
            .unwrap();
        let (a, b, _) = &join.el_ext.data[&join.functor.ob[empty]];
        assert_eq!((a.as_str(), b.as_str()), ("0", "0"));
        // a singleton word joins to the corresponding singleton class
        let single = join
            .functor
            .source
            .objects
            .iter()
            .find(|o| join.free.word_of[*o].len() == 1)
            .unwrap();
        let (a, b, _) = &join.el_ext.data[&join.functor.ob[single]];
        assert_eq!((a.as_str(), b.as_str()), ("1", "1"));
    }

    #[test]
    fn trivial_rep_extends_to_singletons() {
        let (fa, _, w) = hom_fixture();
        let el_nu = element_category(&w.basic).unwrap();
        let t = ElementRep::trivial(&el_nu, Flavor::FinSet);
        let ext = extend_rep(&t, &w, &fa).unwrap();
        for (ob, v) in &ext.rep.fun.ob {
            assert_eq!(v.size(), 1, "at {ob}");
        }
        assert!(ext.rep.validate().is_ok());
    }

    #[test]
    fn doubled_rep_counts_unordered_pairs() {
        let (fa, _, w) = hom_fixture();
        let el_nu = element_category(&w.basic).unwrap();
        let mut fun_ob = BTreeMap::new();
        let mut fun_mor = BTreeMap::new();
        for o in &el_nu.cat.objects {
            fun_ob.insert(o.clone(), TargetObj::set(vec!["u".into(), "v".into()]));
        }
        for m in el_nu.cat.morphisms.keys() {
            let (s, t) = &el_nu.cat.morphisms[m];
            fun_mor.insert(
                m.clone(),
                TargetMor::from_fn(&fun_ob[s].clone(), &fun_ob[t], |e| e.to_string()),
            );
        }
        let d = ElementRep {
            base: el_nu.clone(),
            fun: TargetFunctor {
                source: el_nu.cat.clone(),
                flavor: Flavor::FinSet,
                ob: fun_ob,
                mor: fun_mor,
            },
        };
        let ext = extend_rep(&d, &w, &fa).unwrap();
        // a two-letter class carries ordered pairs of labels: the tensor of
        // the component fibers, with the block swap acting by functoriality
        for c in w.classes("2", "2").names() {
            let v = &ext.rep.fun.ob[&el_ob_id("2", "2", c)];
            assert_eq!(v.size(), 4, "at class {c}");
            let swap = ext.rep.base.lift("s2:10", "s2:10", &el_ob_id("2", "2", c));
            let f = &ext.rep.fun.mor[&swap];
            let moved = f.dom.names().iter().filter(|e| f.apply(e) != *e).count();
            assert_eq!(moved, 2, "swap moves the two mixed labels at {c}");
        }
        // singleton classes keep both labels
        for c in w.classes("1", "1").names() {
            assert_eq!(ext.rep.fun.ob[&el_ob_id("1", "1", c)].size(), 2);
        }
    }

    #[test]
    fn chi_commutes_with_extension() {
        let (fa, _, w) = hom_fixture();
        let el_nu = element_category(&w.basic).unwrap();
        let t = ElementRep::trivial(&el_nu, Flavor::FinSet);
        let r = chi_otimes_commute(&t, &w, &fa).unwrap();
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn basic_unit_of_identity_is_trivial() {
        let (_, _, w) = hom_fixture();
        let id = BimoduleMap::identity(&w.basic);
        let u = basic_unit(&id, Flavor::FinSet).unwrap();
        for v in u.rep.fun.ob.values() {
            assert_eq!(v.size(), 1);
        }
    }

    #[test]
    fn unit_diamond_keeps_values() {
        let (fa, m, w) = hom_fixture();
        let ctx = basic_context(&fa, &m, &w).unwrap();
        let id = BimoduleMap::identity(&w.basic);
        let v_eta = basic_unit(&id, Flavor::FinSet).unwrap();
        let el_nu = &ctx.el_nu;
        let mut fun_ob = BTreeMap::new();
        let mut fun_mor = BTreeMap::new();
        for o in &el_nu.cat.objects {
            fun_ob.insert(o.clone(), TargetObj::set(vec!["u".into(), "v".into()]));
        }
        for (mid, (s, t)) in &el_nu.cat.morphisms {
            fun_mor.insert(
                mid.clone(),
                TargetMor::from_fn(&fun_ob[s].clone(), &fun_ob[t], |e| e.to_string()),
            );
        }
        let d = ElementRep {
            base: el_nu.clone(),
            fun: TargetFunctor {
                source: el_nu.cat.clone(),
                flavor: Flavor::FinSet,
                ob: fun_ob,
                mor: fun_mor,
            },
        };
        let left = basic_element_plethysm(&v_eta.rep, &d, &ctx).unwrap();
        let right = basic_element_plethysm(&d, &v_eta.rep, &ctx).unwrap();
        for o in &el_nu.cat.objects {
            assert_eq!(left.rep.fun.ob[o].size(), 2, "left unit at {o}");
            assert_eq!(right.rep.fun.ob[o].size(), 2, "right unit at {o}");
        }
        // diamond of the doubled representation with itself counts
        // two-level composites: pairs of labels
        let dd = basic_element_plethysm(&d, &d, &ctx).unwrap();
        for o in &el_nu.cat.objects {
            assert_eq!(dd.rep.fun.ob[o].size(), 4, "square at {o}");
        }
    }

    #[test]
    fn empty_factor_kills_the_diamond() {
        let (fa, m, w) = hom_fixture();
        let ctx = basic_context(&fa, &m, &w).unwrap();
        let el_nu = &ctx.el_nu;
        let empty = ElementRep {
            base: el_nu.clone(),
            fun: TargetFunctor {
                source: el_nu.cat.clone(),
                flavor: Flavor::FinSet,
                ob: el_nu
                    .cat
                    .objects
                    .iter()
                    .map(|o| (o.clone(), TargetObj::set(vec![])))
                    .collect(),
                mor: el_nu
                    .cat
                    .morphisms
                    .iter()
                    .map(|(mid, _)| {
                        (
                            mid.clone(),
                            TargetMor::from_map(
                                &TargetObj::set(vec![]),
                                &TargetObj::set(vec![]),
                                BTreeMap::new(),
                            ),
                        )
                    })
                    .collect(),
            },
        };
        let t = ElementRep::trivial(el_nu, Flavor::FinSet);
        let out = basic_element_plethysm(&empty, &t, &ctx).unwrap();
        for o in &el_nu.cat.objects {
            assert_eq!(out.rep.fun.ob[o].size(), 0);
        }
    }

    #[test]
    fn basic_relative_unit_law_and_square() {
        let (fa, m, w) = hom_fixture();
        let ctx = basic_context(&fa, &m, &w).unwrap();
        let id = BimoduleMap::identity(&w.basic);
        let unit = basic_relative_unit(&id);
        let prod = basic_relative_product(&unit, &unit, &ctx).unwrap();
        assert!(prod.validate().is_ok());
        for ((a, b), v) in &prod.total.value {
            assert_eq!(v.size(), w.basic.val(a, b).size(), "at ({a}, {b})");
        }
        // a doubled S-module style total: two elements over the basic corolla
        let mut value = BTreeMap::new();
        for ((a, b), v) in &w.basic.value {
            let elems = v
                .names()
                .iter()
                .flat_map(|x| ["p", "q"].iter().map(move |l| format!("{x}:{l}")))
                .collect();
            value.insert((a.clone(), b.clone()), TargetObj::set(elems));
        }
        let doubled = Bimodule::from_rule(&fa.action, value, |s, t, e| {
            let (x, l) = e.rsplit_once(':').unwrap();
            let y = w.basic.action_mor(s, t).apply(x);
            format!("{y}:{l}")
        });
        let proj = BimoduleMap {
            source: doubled.clone(),
            target: w.basic.clone(),
            component: doubled
                .value
                .iter()
                .map(|((a, b), v)| {
                    let mor = TargetMor::from_fn(v, w.basic.val(a, b), |e| {
                        e.rsplit_once(':').unwrap().0.to_string()
                    });
                    ((a.clone(), b.clone()), mor)
                })
                .collect(),
        };
        let xi = BasicRelative {
            total: doubled,
            projection: proj,
        };
        let sq = basic_relative_product(&xi, &xi, &ctx).unwrap();
        assert!(sq.validate().is_ok());
        // two-level composites of arity-one generators: all label pairs
        assert_eq!(sq.total.val("1", "1").size(), 4);
        // the unit absorbs on both sides
        let lu = basic_relative_product(&unit, &xi, &ctx).unwrap();
        let ru = basic_relative_product(&xi, &unit, &ctx).unwrap();
        for ((a, b), v) in &xi.total.value {
            assert_eq!(lu.total.val(a, b).size(), v.size(), "left unit ({a}, {b})");
            assert_eq!(ru.total.val(a, b).size(), v.size(), "right unit ({a}, {b})");
        }
    }
}
