//! Finite categories, functors, natural transformations, and comma categories.
//!
//! Everything downstream (bimodules, element categories, Kan extensions) is
//! phrased in terms of the types here. Composition tables are stored
//! diagrammatically: `compose[(f, g)]` is defined exactly when `tgt f = src g`
//! and holds "f then g".

use std::collections::BTreeMap;

use crate::report::LawReport;
use crate::PlError;

pub type Id = String;

/// Desk-scale guard: categories beyond this many morphisms are rejected.
pub const MAX_MORPHISMS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    pub objects: Vec<Id>,
    /// morphism id -> (source, target)
    pub morphisms: BTreeMap<Id, (Id, Id)>,
    /// object id -> identity morphism id
    pub identity: BTreeMap<Id, Id>,
    /// (f, g) with tgt f = src g  ->  "f then g"
    pub compose: BTreeMap<(Id, Id), Id>,
}

impl FinCategory {
    pub fn terminal() -> FinCategory {
        FinCategory {
            objects: vec!["*".into()],
            morphisms: BTreeMap::from([("id".into(), ("*".into(), "*".into()))]),
            identity: BTreeMap::from([("*".into(), "id".into())]),
            compose: BTreeMap::from([(("id".into(), "id".into()), "id".into())]),
        }
    }

    pub fn discrete(objects: &[&str]) -> FinCategory {
        let mut morphisms = BTreeMap::new();
        let mut identity = BTreeMap::new();
        let mut compose = BTreeMap::new();
        for ob in objects {
            let id = format!("id_{ob}");
            morphisms.insert(id.clone(), (ob.to_string(), ob.to_string()));
            identity.insert(ob.to_string(), id.clone());
            compose.insert((id.clone(), id.clone()), id);
        }
        FinCategory {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            morphisms,
            identity,
            compose,
        }
    }

    pub fn src(&self, f: &str) -> &Id {
        &self.morphisms[f].0
    }

    pub fn tgt(&self, f: &str) -> &Id {
        &self.morphisms[f].1
    }

    pub fn hom(&self, a: &str, b: &str) -> Vec<Id> {
        self.morphisms
            .iter()
            .filter(|(_, (s, t))| s == a && t == b)
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// "f then g"; panics if the pair is not in the table.
    pub fn then(&self, f: &str, g: &str) -> &Id {
        self.compose
            .get(&(f.to_string(), g.to_string()))
            .unwrap_or_else(|| panic!("composite ({f}, {g}) missing"))
    }

    pub fn comp(&self, f: &str, g: &str) -> Option<&Id> {
        self.compose.get(&(f.to_string(), g.to_string()))
    }

    pub fn id_of(&self, ob: &str) -> &Id {
        &self.identity[ob]
    }

    pub fn is_identity(&self, f: &str) -> bool {
        let (s, _) = &self.morphisms[f];
        self.identity.get(s).map(|i| i == f).unwrap_or(false)
    }

    /// Every morphism has a two-sided inverse.
    pub fn is_groupoid(&self) -> bool {
        self.morphisms.keys().all(|f| self.inverse(f).is_some())
    }

    pub fn inverse(&self, f: &str) -> Option<Id> {
        let (s, t) = &self.morphisms[f];
        for g in self.hom(t, s) {
            if self.comp(f, &g) == Some(self.id_of(s)) && self.comp(&g, f) == Some(self.id_of(t)) {
                return Some(g);
            }
        }
        None
    }

    pub fn size_guard(&self) -> Result<(), PlError> {
        if self.morphisms.len() > MAX_MORPHISMS {
            Err(PlError::SizeCap(format!(
                "category has {} morphisms (cap {MAX_MORPHISMS})",
                self.morphisms.len()
            )))
        } else {
            Ok(())
        }
    }
}

/// Report every violated category law. Empty report iff lawful.
pub fn validate_category(c: &FinCategory) -> LawReport {
    let mut r = LawReport::new();
    for (i, ob) in c.objects.iter().enumerate() {
        if c.objects[..i].contains(ob) {
            r.violation(format!("duplicate object {ob}"));
        }
    }
    for (f, (s, t)) in &c.morphisms {
        if !c.objects.contains(s) {
            r.violation(format!("morphism {f} has unknown source {s}"));
        }
        if !c.objects.contains(t) {
            r.violation(format!("morphism {f} has unknown target {t}"));
        }
    }
    for ob in &c.objects {
        match c.identity.get(ob) {
            None => r.violation(format!("object {ob} has no identity")),
            Some(i) => match c.morphisms.get(i) {
                None => r.violation(format!("identity {i} of {ob} is not a morphism")),
                Some((s, t)) => {
                    if s != ob || t != ob {
                        r.violation(format!("identity {i} of {ob} is not an endomorphism of it"));
                    }
                }
            },
        }
    }
    // composition defined exactly on composable pairs, with correct endpoints
    for (f, (_, tf)) in &c.morphisms {
        for (g, (sg, _)) in &c.morphisms {
            let key = (f.clone(), g.clone());
            match (tf == sg, c.compose.get(&key)) {
                (true, None) => r.violation(format!("missing composite ({f}, {g})")),
                (false, Some(_)) => r.violation(format!("spurious composite ({f}, {g})")),
                (true, Some(h)) => match c.morphisms.get(h) {
                    None => r.violation(format!("composite ({f}, {g}) = {h} is not a morphism")),
                    Some((sh, th)) => {
                        if sh != c.src(f) || th != c.tgt(g) {
                            r.violation(format!("composite ({f}, {g}) = {h} has wrong endpoints"));
                        }
                    }
                },
                (false, None) => {}
            }
        }
    }
    if !r.is_ok() {
        // identity/associativity checks below assume a total well-typed table
        return r;
    }
    for (f, (s, t)) in &c.morphisms {
        if c.then(c.id_of(s), f) != f {
            r.violation(format!("left identity fails at {f}"));
        }
        if c.then(f, c.id_of(t)) != f {
            r.violation(format!("right identity fails at {f}"));
        }
    }
    for (f, (_, tf)) in &c.morphisms {
        for (g, (sg, tg)) in &c.morphisms {
            if tf != sg {
                continue;
            }
            for (h, (sh, _)) in &c.morphisms {
                if tg != sh {
                    continue;
                }
                let fg_h = c.then(c.then(f, g), h);
                let f_gh = c.then(f, c.then(g, h));
                if fg_h != f_gh {
                    r.violation(format!(
                        "associativity fails at ({f}, {g}, {h}): {fg_h} vs {f_gh}"
                    ));
                }
            }
        }
    }
    r
}

/// Collision-proof composite ids: each part is wrapped in angle brackets, so
/// generated ids can be nested arbitrarily and split back unambiguously (all
/// generated ids keep their brackets balanced).
pub fn join_parts(parts: &[&str]) -> Id {
    let mut s = String::new();
    for p in parts {
        s.push('\u{27e8}');
        s.push_str(p);
        s.push('\u{27e9}');
    }
    s
}

pub fn split_parts(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '\u{27e8}' => {
                if depth > 0 {
                    cur.push(ch);
                }
                depth += 1;
            }
            '\u{27e9}' => {
                depth -= 1;
                if depth == 0 {
                    parts.push(std::mem::take(&mut cur));
                } else {
                    cur.push(ch);
                }
            }
            _ => cur.push(ch),
        }
    }
    assert_eq!(depth, 0, "unbalanced part string: {s}");
    parts
}

pub fn pair_ob(a: &str, b: &str) -> Id {
    join_parts(&[a, b])
}

pub fn pair_mor(f: &str, g: &str) -> Id {
    join_parts(&[f, g])
}

/// Split a pair id produced by `pair_ob` / `pair_mor`.
pub fn split_pair(s: &str) -> (Id, Id) {
    let parts = split_parts(s);
    assert_eq!(parts.len(), 2, "not a pair id: {s}");
    let mut it = parts.into_iter();
    (it.next().unwrap(), it.next().unwrap())
}

/// The category `c^op x d`. A morphism `(f|g): (A|B) -> (A'|B')` packages
/// `f: A' -> A` in `c` and `g: B -> B'` in `d`.
pub fn opposite_product(c: &FinCategory, d: &FinCategory) -> FinCategory {
    let mut objects = Vec::new();
    for a in &c.objects {
        for b in &d.objects {
            objects.push(pair_ob(a, b));
        }
    }
    let mut morphisms = BTreeMap::new();
    for (f, (sf, tf)) in &c.morphisms {
        for (g, (sg, tg)) in &d.morphisms {
            morphisms.insert(pair_mor(f, g), (pair_ob(tf, sg), pair_ob(sf, tg)));
        }
    }
    let mut identity = BTreeMap::new();
    for a in &c.objects {
        for b in &d.objects {
            identity.insert(pair_ob(a, b), pair_mor(c.id_of(a), d.id_of(b)));
        }
    }
    let mut compose = BTreeMap::new();
    for (f1, (sf1, _)) in &c.morphisms {
        for (f2, (_, tf2)) in &c.morphisms {
            // (f1|_) then (f2|_) needs tgt in c^op of f1 = src of f2's op,
            // i.e. in c: src f1 = tgt f2, composite is "f2 then f1" in c.
            if tf2 != sf1 {
                continue;
            }
            let fc = c.then(f2, f1).clone();
            for (g1, (_, tg1)) in &d.morphisms {
                for (g2, (sg2, _)) in &d.morphisms {
                    if tg1 != sg2 {
                        continue;
                    }
                    let gc = d.then(g1, g2).clone();
                    compose.insert((pair_mor(f1, g1), pair_mor(f2, g2)), pair_mor(&fc, &gc));
                }
            }
        }
    }
    FinCategory {
        objects,
        morphisms,
        identity,
        compose,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorData {
    pub source: FinCategory,
    pub target: FinCategory,
    pub ob: BTreeMap<Id, Id>,
    pub mor: BTreeMap<Id, Id>,
}

impl FunctorData {
    pub fn identity(c: &FinCategory) -> FunctorData {
        FunctorData {
            source: c.clone(),
            target: c.clone(),
            ob: c.objects.iter().map(|o| (o.clone(), o.clone())).collect(),
            mor: c.morphisms.keys().map(|m| (m.clone(), m.clone())).collect(),
        }
    }

    /// "self then g" (apply self first).
    pub fn then(&self, g: &FunctorData) -> FunctorData {
        assert_eq!(self.target, g.source, "functor composition mismatch");
        FunctorData {
            source: self.source.clone(),
            target: g.target.clone(),
            ob: self
                .ob
                .iter()
                .map(|(a, b)| (a.clone(), g.ob[b].clone()))
                .collect(),
            mor: self
                .mor
                .iter()
                .map(|(m, n)| (m.clone(), g.mor[n].clone()))
                .collect(),
        }
    }

    /// Bijective on objects and morphisms (an isomorphism of categories).
    pub fn is_iso(&self) -> bool {
        use std::collections::BTreeSet;
        let obs: BTreeSet<_> = self.ob.values().collect();
        let mors: BTreeSet<_> = self.mor.values().collect();
        obs.len() == self.target.objects.len()
            && self.ob.len() == self.source.objects.len()
            && mors.len() == self.target.morphisms.len()
            && self.mor.len() == self.source.morphisms.len()
    }
}

pub fn check_functor(f: &FunctorData) -> LawReport {
    let mut r = LawReport::new();
    for a in &f.source.objects {
        match f.ob.get(a) {
            None => r.violation(format!("object {a} has no image")),
            Some(b) => {
                if !f.target.objects.contains(b) {
                    r.violation(format!("object image {b} of {a} not in target"));
                }
            }
        }
    }
    for (m, (s, t)) in &f.source.morphisms {
        let Some(n) = f.mor.get(m) else {
            r.violation(format!("morphism {m} has no image"));
            continue;
        };
        let Some((ns, nt)) = f.target.morphisms.get(n) else {
            r.violation(format!("morphism image {n} of {m} not in target"));
            continue;
        };
        if Some(ns) != f.ob.get(s) || Some(nt) != f.ob.get(t) {
            r.violation(format!("morphism {m} image {n} breaks source/target"));
        }
    }
    if !r.is_ok() {
        return r;
    }
    for (a, i) in &f.source.identity {
        if &f.mor[i] != f.target.id_of(&f.ob[a]) {
            r.violation(format!("identity of {a} not preserved"));
        }
    }
    for ((m1, m2), m12) in &f.source.compose {
        let lhs = f.target.comp(&f.mor[m1], &f.mor[m2]);
        if lhs != Some(&f.mor[m12]) {
            r.violation(format!("composition ({m1}, {m2}) not preserved"));
        }
    }
    r
}

#[derive(Debug, Clone)]
pub struct NatTransData {
    pub source: FunctorData,
    pub target: FunctorData,
    /// object of the shared source category -> morphism of the shared target
    pub component: BTreeMap<Id, Id>,
}

pub fn check_nat(n: &NatTransData) -> LawReport {
    let mut r = LawReport::new();
    if n.source.source != n.target.source || n.source.target != n.target.target {
        r.violation("functors are not parallel".into());
        return r;
    }
    let base = &n.source.source;
    let cat = &n.source.target;
    for a in &base.objects {
        let Some(c) = n.component.get(a) else {
            r.violation(format!("no component at {a}"));
            continue;
        };
        let Some((s, t)) = cat.morphisms.get(c) else {
            r.violation(format!("component {c} at {a} not a morphism"));
            continue;
        };
        if s != &n.source.ob[a] || t != &n.target.ob[a] {
            r.violation(format!("component at {a} has wrong endpoints"));
        }
    }
    if !r.is_ok() {
        return r;
    }
    for (m, (a, b)) in &base.morphisms {
        let lhs = cat.comp(&n.component[a], &n.target.mor[m]);
        let rhs = cat.comp(&n.source.mor[m], &n.component[b]);
        if lhs.is_none() || lhs != rhs {
            r.violation(format!("naturality square at {m} fails"));
        }
    }
    r
}

pub enum FunctorNat<'a> {
    Functor(&'a FunctorData),
    Nat(&'a NatTransData),
}

pub fn check_functor_nat(x: FunctorNat<'_>) -> LawReport {
    match x {
        FunctorNat::Functor(f) => check_functor(f),
        FunctorNat::Nat(n) => check_nat(n),
    }
}

#[derive(Debug, Clone)]
pub struct CommaCategory {
    pub cat: FinCategory,
    pub left_proj: FunctorData,
    pub right_proj: FunctorData,
    /// comma object id -> (a, b, mediating morphism F a -> G b)
    pub objects: BTreeMap<Id, (Id, Id, Id)>,
    /// comma morphism id -> (p, q)
    pub mor_pairs: BTreeMap<Id, (Id, Id)>,
}

pub fn comma_object_id(a: &str, b: &str, m: &str) -> Id {
    join_parts(&[a, b, m])
}

/// The comma category `(f / g)` for functors with a shared codomain.
pub fn comma_category(f: &FunctorData, g: &FunctorData) -> Result<CommaCategory, PlError> {
    if f.target != g.target {
        return Err(PlError::Mismatch("comma: functor codomains differ".into()));
    }
    let cat = &f.target;
    let mut objects = BTreeMap::new();
    for a in &f.source.objects {
        for b in &g.source.objects {
            for m in cat.hom(&f.ob[a], &g.ob[b]) {
                objects.insert(comma_object_id(a, b, &m), (a.clone(), b.clone(), m));
            }
        }
    }
    let mut morphisms = BTreeMap::new();
    let mut mor_pairs = BTreeMap::new();
    let mut lmor = BTreeMap::new();
    let mut rmor = BTreeMap::new();
    for (o1, (a1, b1, m1)) in &objects {
        for (o2, (a2, b2, m2)) in &objects {
            for p in f.source.hom(a1, a2) {
                for q in g.source.hom(b1, b2) {
                    // F p then m2 == m1 then G q
                    let lhs = cat.comp(&f.mor[&p], m2);
                    let rhs = cat.comp(m1, &g.mor[&q]);
                    if lhs.is_some() && lhs == rhs {
                        let id = join_parts(&[&p, &q, o1, o2]);
                        morphisms.insert(id.clone(), (o1.clone(), o2.clone()));
                        mor_pairs.insert(id.clone(), (p.clone(), q.clone()));
                        lmor.insert(id.clone(), p.clone());
                        rmor.insert(id, q.clone());
                    }
                }
            }
        }
    }
    let mut identity = BTreeMap::new();
    for (o, (a, b, _)) in &objects {
        let p = f.source.id_of(a);
        let q = g.source.id_of(b);
        identity.insert(o.clone(), join_parts(&[p, q, o, o]));
    }
    let mut compose = BTreeMap::new();
    for (m1, (s1, t1)) in &morphisms {
        for (m2, (s2, t2)) in &morphisms {
            if t1 != s2 {
                continue;
            }
            let (p1, q1) = &mor_pairs[m1];
            let (p2, q2) = &mor_pairs[m2];
            let p = f.source.then(p1, p2);
            let q = g.source.then(q1, q2);
            compose.insert((m1.clone(), m2.clone()), join_parts(&[p, q, s1, t2]));
        }
    }
    let comma = FinCategory {
        objects: objects.keys().cloned().collect(),
        morphisms,
        identity,
        compose,
    };
    comma.size_guard()?;
    let left_proj = FunctorData {
        source: comma.clone(),
        target: f.source.clone(),
        ob: objects
            .iter()
            .map(|(o, (a, _, _))| (o.clone(), a.clone()))
            .collect(),
        mor: lmor,
    };
    let right_proj = FunctorData {
        source: comma.clone(),
        target: g.source.clone(),
        ob: objects
            .iter()
            .map(|(o, (_, b, _))| (o.clone(), b.clone()))
            .collect(),
        mor: rmor,
    };
    Ok(CommaCategory {
        cat: comma,
        left_proj,
        right_proj,
        objects,
        mor_pairs,
    })
}

/// A functor from the one-object category picking out `ob` in `cat`.
pub fn point_functor(cat: &FinCategory, ob: &str) -> FunctorData {
    let term = FinCategory::terminal();
    FunctorData {
        source: term,
        target: cat.clone(),
        ob: BTreeMap::from([("*".into(), ob.to_string())]),
        mor: BTreeMap::from([("id".into(), cat.id_of(ob).clone())]),
    }
}

#[cfg(test)]
pub mod tests {
    use super::*;

    pub fn s2_category() -> FinCategory {
        // the symmetric group on two letters, as a one-object category
        let e = "e".to_string();
        let s = "s".to_string();
        FinCategory {
            objects: vec!["*".into()],
            morphisms: BTreeMap::from([
                (e.clone(), ("*".into(), "*".into())),
                (s.clone(), ("*".into(), "*".into())),
            ]),
            identity: BTreeMap::from([("*".into(), e.clone())]),
            compose: BTreeMap::from([
                ((e.clone(), e.clone()), e.clone()),
                ((e.clone(), s.clone()), s.clone()),
                ((s.clone(), e.clone()), s.clone()),
                ((s.clone(), s.clone()), e.clone()),
            ]),
        }
    }

    #[test]
    fn terminal_is_lawful() {
        assert!(validate_category(&FinCategory::terminal()).is_ok());
    }

    #[test]
    fn s2_is_lawful_groupoid() {
        let c = s2_category();
        assert!(validate_category(&c).is_ok());
        assert!(c.is_groupoid());
    }

    #[test]
    fn broken_table_is_reported() {
        let mut c = s2_category();
        // corrupt e.s from s to e: breaks left identity and associativity
        c.compose.insert(("e".into(), "s".into()), "e".into());
        let r = validate_category(&c);
        assert!(!r.is_ok());
        assert!(r.violations.iter().any(|v| v.contains("identity")));
    }

    #[test]
    fn opposite_product_of_terminals() {
        let t = FinCategory::terminal();
        let p = opposite_product(&t, &t);
        assert_eq!(p.objects.len(), 1);
        assert_eq!(p.morphisms.len(), 1);
        assert!(validate_category(&p).is_ok());
    }

    #[test]
    fn opposite_product_of_s2() {
        let c = s2_category();
        let p = opposite_product(&c, &c);
        assert_eq!(p.objects.len(), 1);
        assert_eq!(p.morphisms.len(), 4);
        assert!(validate_category(&p).is_ok());
    }

    #[test]
    fn comma_of_identities_on_terminal() {
        let t = FinCategory::terminal();
        let idf = FunctorData::identity(&t);
        let c = comma_category(&idf, &idf).unwrap();
        assert_eq!(c.cat.objects.len(), 1);
        assert!(validate_category(&c.cat).is_ok());
        assert!(check_functor(&c.left_proj).is_ok());
        assert!(check_functor(&c.right_proj).is_ok());
    }

    #[test]
    fn comma_object_count_is_hom_sum() {
        let c = s2_category();
        let idf = FunctorData::identity(&c);
        let cm = comma_category(&idf, &idf).unwrap();
        // one object pair, |Hom(*,*)| = 2
        assert_eq!(cm.cat.objects.len(), 2);
        assert!(validate_category(&cm.cat).is_ok());
    }

    #[test]
    fn identity_functor_checks() {
        let c = s2_category();
        assert!(check_functor(&FunctorData::identity(&c)).is_ok());
    }

    #[test]
    fn corrupted_nat_reports_square() {
        let c = s2_category();
        let idf = FunctorData::identity(&c);
        // the identity nat trans, then corrupt the component
        let mut n = NatTransData {
            source: idf.clone(),
            target: idf,
            component: BTreeMap::from([("*".into(), "e".into())]),
        };
        assert!(check_nat(&n).is_ok());
        n.component.insert("*".into(), "s".into());
        // conjugation by s is identity on S_2, so this is still natural;
        // corrupt the table instead to see a violation
        assert!(check_nat(&n).is_ok());
        let mut bad = n.clone();
        bad.component.insert("*".into(), "missing".into());
        assert!(!check_nat(&bad).is_ok());
    }
}
