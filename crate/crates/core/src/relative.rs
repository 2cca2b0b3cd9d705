//! Bimodules relative to a base monoid: the relative plethysm, relative
//! monoids, the indexing functor on presented categories, weights, and the
//! Cartesian equivalence with element representations.

use std::collections::BTreeMap;

use crate::bimodule::{
    check_monoid, el_mor_id, plethysm, plethysm_map, Bimodule,
    BimoduleMap, BimoduleMonoid, PlethysmResult,
};
use crate::corecat::{split_parts, FunctorData, Id};
use crate::elements::{
    chi, chi_map, el_ob_id, element_category, element_plethysm, mu_comparison, ChiResult,
    DiamondResult, ElementRep, RepMap,
};
use crate::report::LawReport;
use crate::target::{
    free_mor, free_obj, Flavor, TargetFunctor, TargetMor, TargetObj,
};
use crate::PlError;

/// A bimodule with a projection to the carrier of a base monoid.
#[derive(Debug, Clone)]
pub struct RelativeBimodule {
    pub total: Bimodule,
    pub projection: BimoduleMap,
    pub base: BimoduleMonoid,
}

impl RelativeBimodule {
    pub fn validate(&self) -> LawReport {
        let mut r = self.total.validate().prefixed("total");
        r.merge(self.projection.validate().prefixed("projection"));
        r.check(self.projection.source.value == self.total.value, || {
            "projection does not start at the total bimodule".into()
        });
        r.check(
            self.projection.target.value == self.base.bimodule.value,
            || "projection does not land in the base carrier".into(),
        );
        r
    }
}

/// The unit for the relative plethysm: the hom bimodule with the monoid unit
/// as projection.
pub fn relative_unit(base: &BimoduleMonoid) -> Result<RelativeBimodule, PlError> {
    let h = base
        .unit
        .clone()
        .ok_or_else(|| PlError::Unsupported("relative unit needs a unital base".into()))?;
    Ok(RelativeBimodule {
        total: h.source.clone(),
        projection: h,
        base: base.clone(),
    })
}

/// The relative plethysm: totals multiply by the plain plethysm, and the new
/// projection is the multiplied projections followed by the base
/// multiplication.
pub fn relative_plethysm(
    a: &RelativeBimodule,
    b: &RelativeBimodule,
) -> Result<(RelativeBimodule, PlethysmResult), PlError> {
    if a.base.bimodule.value != b.base.bimodule.value {
        return Err(PlError::Mismatch("relative plethysm: bases differ".into()));
    }
    let p = plethysm(&a.total, &b.total)?;
    let pp = plethysm_map(&a.projection, &b.projection, &p, &a.base.square)?;
    let projection = pp.then(&a.base.gamma);
    Ok((
        RelativeBimodule {
            total: p.product.clone(),
            projection,
            base: a.base.clone(),
        },
        p,
    ))
}

/// Laws of a relative monoid: the plain monoid laws on the total bimodule
/// plus compatibility of the multiplication (and unit) with the projections.
pub fn check_relative_monoid(
    a: &RelativeBimodule,
    g: &BimoduleMap,
    h: Option<&BimoduleMap>,
) -> Result<LawReport, PlError> {
    let mut report = check_monoid(&a.total, g, h)?;
    let p = plethysm(&a.total, &a.total)?;
    let pp = plethysm_map(&a.projection, &a.projection, &p, &a.base.square)?;
    let lhs = pp.then(&a.base.gamma);
    let rhs = g.then(&a.projection);
    for (k, l) in &lhs.component {
        if l != &rhs.component[k] {
            report.violation(format!(
                "projection square fails at ({}, {})",
                k.0, k.1
            ));
        }
    }
    if let Some(h) = h {
        let base_unit = a.base.unit.as_ref().ok_or_else(|| {
            PlError::Mismatch("unital relative monoid over a non-unital base".into())
        })?;
        let through = h.then(&a.projection);
        for (k, l) in &through.component {
            if l != &base_unit.component[k] {
                report.violation(format!("unit projection fails at ({}, {})", k.0, k.1));
            }
        }
    }
    Ok(report)
}

/// The functor between presented categories induced by the projection of a
/// unital relative monoid: identity on objects, projection on hom-sets.
pub fn indexing_functor(
    a: &RelativeBimodule,
    g: &BimoduleMap,
    h: &BimoduleMap,
) -> Result<FunctorData, PlError> {
    let base_unit = a
        .base
        .unit
        .as_ref()
        .ok_or_else(|| PlError::Unsupported("indexing functor needs a unital base".into()))?;
    let p_total = plethysm(&a.total, &a.total)?;
    let (k_total, _) = crate::bimodule::category_from_monoid(&a.total, g, h, &p_total)?;
    let (k_base, _) = crate::bimodule::category_from_monoid(
        &a.base.bimodule,
        &a.base.gamma,
        base_unit,
        &a.base.square,
    )?;
    let mor = k_total
        .morphisms
        .iter()
        .map(|(mor, (s, t))| {
            let x = &split_parts(mor)[2];
            (mor.clone(), el_mor_id(s, t, a.projection.at(s, t).apply(x)))
        })
        .collect();
    Ok(FunctorData {
        source: k_total,
        target: k_base.clone(),
        ob: k_base.objects.iter().map(|o| (o.clone(), o.clone())).collect(),
        mor,
    })
}

/// A weight on an element representation: a morphism to the trivial one.
#[derive(Debug, Clone)]
pub struct Weight {
    pub eps: RepMap,
}

impl Weight {
    /// The unique finite-set weight.
    pub fn canonical(d: &ElementRep) -> Weight {
        let trivial = ElementRep::trivial(&d.base, d.flavor());
        let component = d
            .fun
            .ob
            .iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    TargetMor::relabel(v, &TargetObj::unit(d.flavor()), |_| "*".into()),
                )
            })
            .collect();
        Weight {
            eps: RepMap {
                source: d.clone(),
                target: trivial,
                component,
            },
        }
    }
}

/// The canonical isomorphism from the characteristic bimodule of the trivial
/// representation to the free bimodule on the underlying one: each comma leg
/// sends the point to the transported element.
pub fn chi_trivial_to_free(
    chi_t: &ChiResult,
    r: &Bimodule,
    flavor: Flavor,
) -> Result<BimoduleMap, PlError> {
    let free = linearize_bimodule(r, flavor);
    let mut component = BTreeMap::new();
    for (pair, colim) in &chi_t.kan.colims {
        let (a, b) = crate::corecat::split_pair(pair);
        let out = free.val(&a, &b).clone();
        let mut test = BTreeMap::new();
        for cob in colim.cocone.keys() {
            let parts = split_parts(cob);
            let (el_ob, m) = (&parts[0], &parts[2]);
            let (s, t) = crate::corecat::split_pair(m);
            let el_parts = split_parts(el_ob);
            let x = &el_parts[2];
            let moved = r.action_mor(&s, &t).apply(x).clone();
            test.insert(
                cob.clone(),
                TargetMor::relabel(&TargetObj::unit(flavor), &out, move |_| moved.clone()),
            );
        }
        let iso = crate::target::factor_cocone_into(colim, &test, &out).ok_or_else(|| {
            PlError::Law(format!("trivial characteristic does not factor at {pair}"))
        })?;
        component.insert((a, b), iso);
    }
    let map = BimoduleMap {
        source: chi_t.bimodule.clone(),
        target: free,
        component,
    };
    if !map.is_iso() {
        return Err(PlError::Law(
            "trivial characteristic comparison is not invertible".into(),
        ));
    }
    Ok(map)
}

/// Free bimodule on a finite-set bimodule in the requested flavor.
pub fn linearize_bimodule(r: &Bimodule, flavor: Flavor) -> Bimodule {
    if flavor == Flavor::FinSet {
        return r.clone();
    }
    let value = r
        .value
        .iter()
        .map(|(k, v)| (k.clone(), free_obj(flavor, v.as_set())))
        .collect();
    let act = r
        .act
        .iter()
        .map(|(k, m)| {
            (
                k.clone(),
                free_mor(flavor, m.dom.as_set(), m.cod.as_set(), m.map()),
            )
        })
        .collect();
    Bimodule {
        action: r.action.clone(),
        flavor,
        value,
        act,
    }
}

/// Free monoid on a finite-set monoid in the requested flavor; multiplication
/// is induced on the linearized coend through the set-level class map.
pub fn linearize_monoid(m: &BimoduleMonoid, flavor: Flavor) -> Result<BimoduleMonoid, PlError> {
    if flavor == Flavor::FinSet {
        return Ok(m.clone());
    }
    let r = linearize_bimodule(&m.bimodule, flavor);
    let p = plethysm(&r, &r)?;
    let mut component = BTreeMap::new();
    for ((a, c), slice) in &p.classes.slices {
        let out = r.val(a, c);
        let set_slice = m.square.slice(a, c);
        let gm = TargetMor::relabel(&slice.gen_obj, out, |g| {
            m.gamma.at(a, c).apply(set_slice.project.apply(g)).clone()
        });
        let induced =
            crate::target::induce_through_quotient(&slice.project, &gm, &TargetMor::identity(out))?;
        component.insert((a.clone(), c.clone()), induced);
    }
    let gamma = BimoduleMap {
        source: p.product.clone(),
        target: r.clone(),
        component,
    };
    let unit = m.unit.as_ref().map(|h| BimoduleMap {
        source: linearize_bimodule(&h.source, flavor),
        target: r.clone(),
        component: h
            .component
            .iter()
            .map(|(k, c)| {
                (
                    k.clone(),
                    free_mor(flavor, c.dom.as_set(), c.cod.as_set(), c.map()),
                )
            })
            .collect(),
    });
    Ok(BimoduleMonoid {
        bimodule: r,
        square: p,
        gamma,
        unit,
    })
}

/// A weighted representation induces a relative bimodule over the free
/// bimodule on the base: the characteristic of the weight followed by the
/// trivial-characteristic comparison.
pub fn weight_to_relative(
    d: &ElementRep,
    w: &Weight,
    base: &BimoduleMonoid,
) -> Result<RelativeBimodule, PlError> {
    let flavor = d.flavor();
    let chi_d = chi(d)?;
    let chi_t = chi(&w.eps.target)?;
    let chi_eps = chi_map(&w.eps, &chi_d, &chi_t)?;
    let comparison = chi_trivial_to_free(&chi_t, &base.bimodule, flavor)?;
    let projection = chi_eps.then(&comparison);
    Ok(RelativeBimodule {
        total: chi_d.bimodule,
        projection,
        base: linearize_monoid(base, flavor)?,
    })
}

/// The element representation of a finite-set relative bimodule: fibers of
/// the projection with restricted lifts.
pub fn relative_to_rep(a: &RelativeBimodule) -> Result<ElementRep, PlError> {
    if a.total.flavor != Flavor::FinSet {
        return Err(PlError::Unsupported(
            "fiber representations need the finite-set flavor".into(),
        ));
    }
    let el = element_category(&a.base.bimodule)?;
    let fiber = |pa: &str, pb: &str, x: &str| -> TargetObj {
        let elems = a
            .total
            .val(pa, pb)
            .names()
            .iter()
            .filter(|e| a.projection.at(pa, pb).apply(e) == x)
            .cloned()
            .collect();
        TargetObj::set(elems)
    };
    let ob: BTreeMap<Id, TargetObj> = el
        .data
        .iter()
        .map(|(o, (pa, pb, x))| (o.clone(), fiber(pa, pb, x)))
        .collect();
    let mut mor = BTreeMap::new();
    for (mid, (s, t)) in &el.over {
        let (src, tgt) = &el.cat.morphisms[mid];
        let action = a.total.action_mor(s, t);
        let m = TargetMor::from_fn(&ob[src], &ob[tgt], |e| action.apply(e).clone());
        mor.insert(mid.clone(), m);
    }
    Ok(ElementRep {
        base: el.clone(),
        fun: TargetFunctor {
            source: el.cat,
            flavor: Flavor::FinSet,
            ob,
            mor,
        },
    })
}

/// Both directions of the Cartesian equivalence on a finite-set fixture:
/// fibers-then-characteristic recovers the total bimodule, and
/// characteristic-then-fibers recovers the representation.
pub fn equivalence_roundtrip(a: &RelativeBimodule) -> Result<LawReport, PlError> {
    let mut report = LawReport::new();
    let d = relative_to_rep(a)?;
    report.merge(d.validate().prefixed("fiber representation"));
    let rel2 = weight_to_relative(&d, &Weight::canonical(&d), &a.base)?;
    // chi_D(A, B) -> xi(A, B): decode a class to its identity-leg element
    let chi_d = chi(&d)?;
    let mut iso_ok = true;
    for ((pa, pb), v) in &chi_d.bimodule.value {
        let out = a.total.val(pa, pb);
        let mut seen = BTreeMap::new();
        for cls in v.names() {
            match chi_d.kan.decode(&crate::corecat::pair_ob(pa, pb), cls) {
                Some((_, e)) => {
                    seen.insert(e, cls.clone());
                }
                None => iso_ok = false,
            }
        }
        if seen.len() != out.size() || v.size() != out.size() {
            iso_ok = false;
        }
    }
    report.check(iso_ok, || {
        "characteristic of the fibers is not bijective with the total bimodule".into()
    });
    // the recovered projection matches the original through the decode map
    for ((pa, pb), v) in &rel2.total.value {
        for cls in v.names() {
            let (el_ob, e) = chi_d
                .kan
                .decode(&crate::corecat::pair_ob(pa, pb), cls)
                .expect("decodable class");
            let x = &split_parts(&el_ob)[2];
            report.check(a.projection.at(pa, pb).apply(&e) == x, || {
                format!("recovered projection disagrees at class {cls}")
            });
            report.check(rel2.projection.at(pa, pb).apply(cls) == x, || {
                format!("weighted projection disagrees at class {cls}")
            });
        }
    }
    // characteristic-then-fibers: lambda components are fiberwise bijections
    let d2 = relative_to_rep(&rel2)?;
    for (el_ob, lam) in &chi_d.kan.lambda {
        let fiber = d2.value(el_ob);
        report.check(lam.dom.size() == fiber.size(), || {
            format!("fiber size changes through the round trip at {el_ob}")
        });
        let mut images: Vec<&Id> = lam.dom.names().iter().map(|e| lam.apply(e)).collect();
        images.sort();
        images.dedup();
        report.check(images.len() == lam.dom.size(), || {
            format!("fiber coprojection is not injective at {el_ob}")
        });
    }
    Ok(report)
}

/// The induced weight on an element plethysm: tensor the two weights on each
/// pair node and factor through the extension colimits.
pub fn diamond_weight(
    dd: &DiamondResult,
    w1: &Weight,
    w2: &Weight,
) -> Result<Weight, PlError> {
    let flavor = dd.rep.flavor();
    let unit = TargetObj::unit(flavor);
    let collapse_src = crate::target::tensor(&unit, &unit)?;
    let collapse = TargetMor::relabel(&collapse_src, &unit, |_| "*".into());
    // per square-element object, the weight on the external tensor
    let mut ext_eps = BTreeMap::new();
    for (zo, colim) in &dd.ext.colims {
        let (a, c, _) = &dd.ext.rep.base.data[zo];
        let mut test = BTreeMap::new();
        for node in colim.cocone.keys() {
            let parts = split_parts(node);
            let (mid, x, y, is_apex) = if parts.len() == 4 && parts[0] == "ap" {
                (parts[1].clone(), parts[2].clone(), parts[3].clone(), true)
            } else {
                (parts[0].clone(), parts[1].clone(), parts[2].clone(), false)
            };
            let act = &dd.ext.rep.base.action;
            let (bl, br) = if is_apex {
                (act.src(&mid).clone(), act.tgt(&mid).clone())
            } else {
                (mid.clone(), mid.clone())
            };
            let e1 = &w1.eps.component[&el_ob_id(a, &bl, &x)];
            let e2 = &w2.eps.component[&el_ob_id(&br, c, &y)];
            let leg = crate::target::tensor_mor(e1, e2)?.then(&collapse);
            test.insert(node.clone(), leg);
        }
        let eps = crate::target::factor_cocone_into(colim, &test, &unit).ok_or_else(|| {
            PlError::Law(format!("weights do not factor through the pair diagram at {zo}"))
        })?;
        ext_eps.insert(zo.clone(), eps);
    }
    // extend along the multiplication to the plethysm representation
    let mut component = BTreeMap::new();
    for (ro, colim) in &dd.kan.colims {
        let mut test = BTreeMap::new();
        for cob in colim.cocone.keys() {
            let zo = &split_parts(cob)[0];
            test.insert(cob.clone(), ext_eps[zo].clone());
        }
        let eps = crate::target::factor_cocone_into(colim, &test, &unit).ok_or_else(|| {
            PlError::Law(format!("weights do not factor through the extension at {ro}"))
        })?;
        component.insert(ro.clone(), eps);
    }
    let trivial = ElementRep::trivial(&dd.rep.base, flavor);
    Ok(Weight {
        eps: RepMap {
            source: dd.rep.clone(),
            target: trivial,
            component,
        },
    })
}

/// The monoidality square of weights: multiplying the weighted projections
/// agrees with the induced weight on the plethysm through the product
/// comparison.
pub fn check_weight_monoidality(
    m: &BimoduleMonoid,
    d1: &ElementRep,
    d2: &ElementRep,
    w1: &Weight,
    w2: &Weight,
) -> Result<LawReport, PlError> {
    let mut report = LawReport::new();
    let rel1 = weight_to_relative(d1, w1, m)?;
    let rel2 = weight_to_relative(d2, w2, m)?;
    let (rel_prod, p_chi) = relative_plethysm(&rel1, &rel2)?;
    let dd = element_plethysm(d1, d2, m)?;
    let w12 = diamond_weight(&dd, w1, w2)?;
    let rel12 = weight_to_relative(&dd.rep, &w12, m)?;
    let chi1 = chi(d1)?;
    let chi2 = chi(d2)?;
    let chi12 = chi(&dd.rep)?;
    let mu = mu_comparison(d1, d2, &chi1, &chi2, &dd, &chi12, m, &p_chi)?;
    let lhs = mu.then(&rel12.projection);
    let rhs = &rel_prod.projection;
    for (k, l) in &lhs.component {
        if l != &rhs.component[k] {
            report.violation(format!("weight square fails at ({}, {})", k.0, k.1));
        }
    }
    Ok(report)
}
