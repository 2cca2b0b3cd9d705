//! Concrete fixture builders: truncated permutation and discrete-naturals
//! actions, trivial-bimodule extensions, cospans, surjections, glued graphs,
//! and the op correspondence.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use crate::basicrep::{basic_element_plethysm, BasicContext};
use crate::bimodule::{
    gamma_from_fn, hom_unit, plethysm, Bimodule, BimoduleMap, BimoduleMonoid,
};
use crate::corecat::{split_parts, FinCategory, Id};
use crate::elements::{ElementRep, RepMap};
use crate::factorize::{
    basic_pairs, horizontal_extension, perms, witness_against, ElemTensor, FactorizableAction,
    FactorizationWitness, MonoidalData,
};
use crate::relative::RelativeBimodule;
use crate::report::LawReport;
use crate::target::{Flavor, TargetMor, TargetObj};
use crate::PlError;

/// One-line image string of a permutation, e.g. `[1,0]` -> "10".
fn perm_str(images: &[usize]) -> String {
    images.iter().map(|i| i.to_string()).collect()
}

fn perm_id(n: usize, images: &[usize]) -> Id {
    format!("s{n}:{}", perm_str(images))
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for slot in 0..n {
            let mut q = Vec::with_capacity(n);
            q.extend_from_slice(&p[..slot]);
            q.push(n - 1);
            q.extend_from_slice(&p[slot..]);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// The groupoid of symmetric groups on 0..=nmax letters; composition is
/// diagrammatic (i -> g[f[i]]).
pub fn s_category(nmax: usize) -> FinCategory {
    let objects: Vec<Id> = (0..=nmax).map(|n| n.to_string()).collect();
    let mut morphisms = BTreeMap::new();
    let mut identity = BTreeMap::new();
    let mut perms: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for n in 0..=nmax {
        let ps = all_perms(n);
        for p in &ps {
            morphisms.insert(perm_id(n, p), (n.to_string(), n.to_string()));
        }
        identity.insert(n.to_string(), perm_id(n, &(0..n).collect::<Vec<_>>()));
        perms.insert(n, ps);
    }
    let mut compose = BTreeMap::new();
    for (n, ps) in &perms {
        for f in ps {
            for g in ps {
                let h: Vec<usize> = (0..*n).map(|i| g[f[i]]).collect();
                compose.insert((perm_id(*n, f), perm_id(*n, g)), perm_id(*n, &h));
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

pub(crate) fn parse_perm(id: &str) -> (usize, Vec<usize>) {
    let (n, images) = id[1..].split_once(':').expect("permutation id");
    let n: usize = n.parse().unwrap();
    let images = images
        .chars()
        .map(|c| c.to_digit(10).unwrap() as usize)
        .collect();
    (n, images)
}

/// Monoidal structure on the truncated permutation groupoid: addition on
/// objects, block sum on permutations, block transpositions as symmetries.
/// Tensors leaving the truncation are absent from the tables.
pub fn s_monoidal(nmax: usize) -> MonoidalData {
    let mut tensor_ob = BTreeMap::new();
    let mut tensor_mor = BTreeMap::new();
    let mut symmetry = BTreeMap::new();
    for a in 0..=nmax {
        for b in 0..=(nmax - a) {
            tensor_ob.insert((a.to_string(), b.to_string()), (a + b).to_string());
            for f in all_perms(a) {
                for g in all_perms(b) {
                    let mut h: Vec<usize> = f.clone();
                    h.extend(g.iter().map(|i| i + a));
                    tensor_mor.insert((perm_id(a, &f), perm_id(b, &g)), perm_id(a + b, &h));
                }
            }
            // the block transposition a+b -> b+a
            let c: Vec<usize> = (0..a + b)
                .map(|i| if i < a { i + b } else { i - a })
                .collect();
            symmetry.insert((a.to_string(), b.to_string()), perm_id(a + b, &c));
        }
    }
    MonoidalData {
        unit: "0".into(),
        tensor_ob,
        tensor_mor,
        symmetry,
        symmetric: true,
    }
}

/// The permutation action as a factorizable action: single-letter objects
/// generate everything.
pub fn s_action(nmax: usize) -> FactorizableAction {
    FactorizableAction {
        action: s_category(nmax),
        monoidal: s_monoidal(nmax),
        basics: vec!["1".into()],
        decomposition: (0..=nmax)
            .map(|n| (n.to_string(), vec!["1".into(); n]))
            .collect(),
    }
}

/// The discrete category of naturals 0..=nmax with addition; no symmetries.
pub fn n_action(nmax: usize) -> FactorizableAction {
    let objects: Vec<String> = (0..=nmax).map(|n| n.to_string()).collect();
    let object_refs: Vec<&str> = objects.iter().map(|s| s.as_str()).collect();
    let action = FinCategory::discrete(&object_refs);
    let mut tensor_ob = BTreeMap::new();
    let mut tensor_mor = BTreeMap::new();
    for a in 0..=nmax {
        for b in 0..=(nmax - a) {
            tensor_ob.insert((a.to_string(), b.to_string()), (a + b).to_string());
            tensor_mor.insert(
                (format!("id_{a}"), format!("id_{b}")),
                format!("id_{}", a + b),
            );
        }
    }
    FactorizableAction {
        action,
        monoidal: MonoidalData {
            unit: "0".into(),
            tensor_ob,
            tensor_mor,
            symmetry: BTreeMap::new(),
            symmetric: false,
        },
        basics: vec!["1".into()],
        decomposition: (0..=nmax)
            .map(|n| (n.to_string(), vec!["1".into(); n]))
            .collect(),
    }
}

/// The terminal-set bimodule over an action category: a point at every pair,
/// every action constant.
pub fn trivial_bimodule(action: &FinCategory) -> Bimodule {
    let mut value = BTreeMap::new();
    for a in &action.objects {
        for b in &action.objects {
            value.insert((a.clone(), b.clone()), TargetObj::unit(Flavor::FinSet));
        }
    }
    Bimodule::from_rule(action, value, |_, _, _| "*".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauVariant {
    N,
    S,
}

/// The horizontal extension of the trivial bimodule over the chosen
/// truncated action; class counts are read off the witness.
pub fn build_tau(
    variant: TauVariant,
    nmax: usize,
    cap: usize,
) -> Result<(FactorizableAction, FactorizationWitness), PlError> {
    let fa = match variant {
        TauVariant::N => n_action(nmax),
        TauVariant::S => s_action(nmax),
    };
    let tau = trivial_bimodule(&fa.action);
    let w = horizontal_extension(&tau, &fa, cap, true)?;
    Ok((fa, w))
}

fn digits(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect()
}

fn parse_digits(s: &str) -> Vec<usize> {
    s.chars().map(|c| c.to_digit(10).unwrap() as usize).collect()
}

/// All partitions of {0, .., n-1} into nonempty blocks.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for i in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for slot in 0..p.len() {
                let mut q = p.clone();
                q[slot].push(i);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// A cospan `S -> V <- T` between ordinals, stored by leg images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CospanElem {
    pub nv: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl CospanElem {
    pub fn id(&self) -> Id {
        format!("c{}:{}:{}", self.nv, digits(&self.left), digits(&self.right))
    }

    pub fn parse(id: &str) -> CospanElem {
        let mut it = id[1..].split(':');
        let nv = it.next().unwrap().parse().unwrap();
        let left = parse_digits(it.next().unwrap());
        let right = parse_digits(it.next().unwrap());
        CospanElem { nv, left, right }
    }

    /// Vertices missed by both legs.
    pub fn isolated(&self) -> usize {
        let mut used = vec![false; self.nv];
        for &v in self.left.iter().chain(self.right.iter()) {
            used[v] = true;
        }
        used.iter().filter(|u| !**u).count()
    }

    fn relabel(&self, p: &[usize]) -> CospanElem {
        CospanElem {
            nv: self.nv,
            left: self.left.iter().map(|&v| p[v]).collect(),
            right: self.right.iter().map(|&v| p[v]).collect(),
        }
    }

    /// The lexicographic minimum over vertex bijections: brute force at desk
    /// scale, memoized; larger cospans fall back to a preimage-signature
    /// ordering (vertices have distinct nonempty preimages or are isolated,
    /// so the order is equally canonical).
    pub fn canonical(&self) -> CospanElem {
        thread_local! {
            static CACHE: RefCell<BTreeMap<CospanElem, CospanElem>> =
                RefCell::new(BTreeMap::new());
        }
        if let Some(hit) = CACHE.with(|c| c.borrow().get(self).cloned()) {
            return hit;
        }
        let out = if self.nv <= 6 {
            perms(self.nv)
                .iter()
                .map(|p| self.relabel(p))
                .min()
                .unwrap_or_else(|| self.clone())
        } else {
            let mut keys: Vec<(bool, Vec<usize>, Vec<usize>, usize)> = (0..self.nv)
                .map(|v| {
                    let l: Vec<usize> = (0..self.left.len())
                        .filter(|&i| self.left[i] == v)
                        .collect();
                    let r: Vec<usize> = (0..self.right.len())
                        .filter(|&i| self.right[i] == v)
                        .collect();
                    (l.is_empty() && r.is_empty(), l, r, v)
                })
                .collect();
            keys.sort();
            let mut p = vec![0usize; self.nv];
            for (rank, k) in keys.iter().enumerate() {
                p[k.3] = rank;
            }
            self.relabel(&p)
        };
        CACHE.with(|c| c.borrow_mut().insert(self.clone(), out.clone()));
        out
    }
}

/// Disjoint union of cospans, second summand's vertices shifted up.
pub fn cospan_union(x: &CospanElem, y: &CospanElem) -> CospanElem {
    CospanElem {
        nv: x.nv + y.nv,
        left: x
            .left
            .iter()
            .copied()
            .chain(y.left.iter().map(|&v| v + x.nv))
            .collect(),
        right: x
            .right
            .iter()
            .copied()
            .chain(y.right.iter().map(|&v| v + x.nv))
            .collect(),
    }
}

/// Pushout composition of `x: A -> B` and `y: B -> C` along the shared
/// middle ordinal, without truncation or canonicalization.
pub fn cospan_compose(x: &CospanElem, y: &CospanElem, mid: usize) -> CospanElem {
    let n = x.nv + y.nv;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for t in 0..mid {
        let a = find(&mut parent, x.right[t]);
        let b = find(&mut parent, x.nv + y.left[t]);
        parent[a] = b;
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let next = index.len();
        comp[i] = *index.entry(r).or_insert(next);
    }
    CospanElem {
        nv: index.len(),
        left: x.left.iter().map(|&v| comp[v]).collect(),
        right: y.right.iter().map(|&v| comp[x.nv + v]).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CospanVariant {
    /// isolated vertices kept, saturating at the cap
    Full,
    /// no isolated vertices anywhere; the empty pair has only the empty cospan
    Nd,
}

/// Apply the variant's isolated-vertex policy and canonicalize.
pub fn cospan_truncate(
    c: &CospanElem,
    variant: CospanVariant,
    isolated_cap: usize,
) -> CospanElem {
    let keep = match variant {
        CospanVariant::Nd => 0,
        CospanVariant::Full => c.isolated().min(isolated_cap),
    };
    let mut used = vec![false; c.nv];
    for &v in c.left.iter().chain(c.right.iter()) {
        used[v] = true;
    }
    let mut remap = vec![0usize; c.nv];
    let mut next = 0usize;
    for (v, u) in used.iter().enumerate() {
        if *u {
            remap[v] = next;
            next += 1;
        }
    }
    CospanElem {
        nv: next + keep,
        left: c.left.iter().map(|&v| remap[v]).collect(),
        right: c.right.iter().map(|&v| remap[v]).collect(),
    }
    .canonical()
}

/// The cospan bimodule over truncated finite sets, with its pushout monoid
/// and the basics of single-vertex cospans.
pub struct CospanFixture {
    pub fa: FactorizableAction,
    pub monoid: BimoduleMonoid,
    pub witness: FactorizationWitness,
    pub variant: CospanVariant,
    pub isolated_cap: usize,
}

pub fn build_cospan(
    nmax: usize,
    isolated_cap: usize,
    variant: CospanVariant,
) -> Result<CospanFixture, PlError> {
    if nmax > 4 || nmax == 0 {
        return Err(PlError::SizeCap(format!(
            "cospan enumeration supports 1 <= nmax <= 4, got {nmax}"
        )));
    }
    let fa = s_action(nmax);
    let cat = fa.action.clone();
    let iso_max = match variant {
        CospanVariant::Nd => 0,
        CospanVariant::Full => isolated_cap,
    };
    let mut value = BTreeMap::new();
    for a in 0..=nmax {
        for b in 0..=nmax {
            let mut elems = BTreeSet::new();
            for p in set_partitions(a + b) {
                for extra in 0..=iso_max {
                    let nv = p.len() + extra;
                    if nv > 9 {
                        return Err(PlError::SizeCap("cospan has too many vertices".into()));
                    }
                    let mut left = vec![0usize; a];
                    let mut right = vec![0usize; b];
                    for (vi, block) in p.iter().enumerate() {
                        for &i in block {
                            if i < a {
                                left[i] = vi;
                            } else {
                                right[i - a] = vi;
                            }
                        }
                    }
                    elems.insert(CospanElem { nv, left, right }.canonical().id());
                }
            }
            value.insert(
                (a.to_string(), b.to_string()),
                TargetObj::set(elems.into_iter().collect()),
            );
        }
    }
    let rho = Bimodule::from_rule(&cat, value, |s, t, e| {
        let (_, si) = parse_perm(s);
        let (_, ti) = parse_perm(t);
        let c = CospanElem::parse(e);
        let mut tinv = vec![0usize; ti.len()];
        for (j, &v) in ti.iter().enumerate() {
            tinv[v] = j;
        }
        CospanElem {
            nv: c.nv,
            left: si.iter().map(|&i| c.left[i]).collect(),
            right: tinv.iter().map(|&j| c.right[j]).collect(),
        }
        .canonical()
        .id()
    });
    let square = plethysm(&rho, &rho)?;
    let gamma = gamma_from_fn(&square, &rho, |_, _, b, x, y| {
        let mid: usize = b.parse().ok()?;
        let raw = cospan_compose(&CospanElem::parse(x), &CospanElem::parse(y), mid);
        Some(cospan_truncate(&raw, variant, isolated_cap).id())
    })?;
    let unit_src = hom_unit(&cat, Flavor::FinSet);
    let eta_component = unit_src
        .value
        .iter()
        .map(|((a, b), v)| {
            let mor = TargetMor::from_fn(v, rho.val(a, b), |perm| {
                let (n, im) = parse_perm(perm);
                CospanElem {
                    nv: n,
                    left: im,
                    right: (0..n).collect(),
                }
                .canonical()
                .id()
            });
            ((a.clone(), b.clone()), mor)
        })
        .collect();
    let eta = BimoduleMap {
        source: unit_src,
        target: rho.clone(),
        component: eta_component,
    };
    let monoid = BimoduleMonoid {
        bimodule: rho.clone(),
        square,
        gamma,
        unit: Some(eta),
    };
    // single-vertex cospans as basics; the lone isolated vertex counts only
    // in the full variant
    let mut nu_value = BTreeMap::new();
    for a in 0..=nmax {
        for b in 0..=nmax {
            let elems = if a + b >= 1 {
                vec![CospanElem {
                    nv: 1,
                    left: vec![0; a],
                    right: vec![0; b],
                }
                .id()]
            } else if variant == CospanVariant::Full && isolated_cap >= 1 {
                vec![CospanElem {
                    nv: 1,
                    left: vec![],
                    right: vec![],
                }
                .id()]
            } else {
                vec![]
            };
            nu_value.insert((a.to_string(), b.to_string()), TargetObj::set(elems));
        }
    }
    let nu = Bimodule::from_rule(&cat, nu_value, |_, _, e| e.to_string());
    let cap = 2 * nmax
        + match variant {
            CospanVariant::Full => isolated_cap,
            CospanVariant::Nd => 0,
        };
    let mut witness = horizontal_extension(&nu, &fa, cap, variant == CospanVariant::Nd)?;
    if variant == CospanVariant::Nd {
        let tensor = ElemTensor {
            rule: &|_, _, x1, _, _, x2| {
                cospan_union(&CospanElem::parse(x1), &CospanElem::parse(x2))
                    .canonical()
                    .id()
            },
            unit: Some(
                CospanElem {
                    nv: 0,
                    left: vec![],
                    right: vec![],
                }
                .id(),
            ),
        };
        witness_against(&mut witness, &rho, &|_, _, x| x.to_string(), &tensor, &fa)?;
    }
    Ok(CospanFixture {
        fa,
        monoid,
        witness,
        variant,
        isolated_cap,
    })
}

/// The composable pairs with a basic product, as a witnessed bimodule over
/// the plethysm square: the mono into the pairs is the basic inclusion.
/// Returns the restricted multiplication and the witness, ready for the
/// heredity check of the full multiplication.
/// Words of basic pairs grow much faster than words of basics, so the
/// comparison cap is a parameter; the matching truncation of the basics
/// witness is returned alongside.
pub fn cospan_pair_witness(
    f: &CospanFixture,
    cap: usize,
) -> Result<(BimoduleMap, FactorizationWitness, FactorizationWitness), PlError> {
    let (_beta, into_pairs, gamma0) = basic_pairs(&f.monoid.gamma, &f.witness)?;
    let mut w = horizontal_extension(&into_pairs.source, &f.fa, cap, true)?;
    w.inclusion = Some(into_pairs);
    let wt = if cap == f.witness.cap {
        f.witness.clone()
    } else {
        let mut wt =
            horizontal_extension(&f.witness.basic, &f.fa, cap, f.witness.reduced)?;
        wt.inclusion = f.witness.inclusion.clone();
        wt
    };
    Ok((gamma0, w, wt))
}

fn surj_id(images: &[usize]) -> Id {
    format!("f{}", digits(images))
}

pub(crate) fn parse_surj(id: &str) -> Vec<usize> {
    parse_digits(&id[1..])
}

fn surjections(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut f = vec![0usize; n];
    loop {
        let mut hit = vec![false; m];
        for &v in &f {
            hit[v] = true;
        }
        if hit.iter().all(|h| *h) && (m > 0 || n == 0) {
            out.push(f.clone());
        }
        // next function in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if m > 0 && f[i] + 1 < m {
                f[i] += 1;
                for v in f.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
            if m == 0 {
                return out;
            }
            f[i] = 0;
        }
    }
}

/// Surjections of finite ordinals as a bimodule monoid: composition is the
/// composite function, basics are the single-block surjections.
pub struct SurjFixture {
    pub fa: FactorizableAction,
    pub monoid: BimoduleMonoid,
    pub witness: FactorizationWitness,
}

pub fn build_surjection(nmax: usize) -> Result<SurjFixture, PlError> {
    if nmax > 4 || nmax == 0 {
        return Err(PlError::SizeCap(format!(
            "surjection enumeration supports 1 <= nmax <= 4, got {nmax}"
        )));
    }
    let fa = s_action(nmax);
    let cat = fa.action.clone();
    let mut value = BTreeMap::new();
    for n in 0..=nmax {
        for m in 0..=nmax {
            let elems: Vec<Id> = surjections(n, m).iter().map(|f| surj_id(f)).collect();
            value.insert((n.to_string(), m.to_string()), TargetObj::set(elems));
        }
    }
    let rho = Bimodule::from_rule(&cat, value, |s, t, e| {
        let (_, si) = parse_perm(s);
        let (_, ti) = parse_perm(t);
        let f = parse_surj(e);
        surj_id(&si.iter().map(|&i| ti[f[i]]).collect::<Vec<_>>())
    });
    let square = plethysm(&rho, &rho)?;
    let gamma = gamma_from_fn(&square, &rho, |_, _, _, x, y| {
        let f = parse_surj(x);
        let g = parse_surj(y);
        Some(surj_id(&f.iter().map(|&i| g[i]).collect::<Vec<_>>()))
    })?;
    let unit_src = hom_unit(&cat, Flavor::FinSet);
    let eta_component = unit_src
        .value
        .iter()
        .map(|((a, b), v)| {
            let mor = TargetMor::from_fn(v, rho.val(a, b), |perm| {
                let (_, im) = parse_perm(perm);
                surj_id(&im)
            });
            ((a.clone(), b.clone()), mor)
        })
        .collect();
    let eta = BimoduleMap {
        source: unit_src,
        target: rho.clone(),
        component: eta_component,
    };
    let monoid = BimoduleMonoid {
        bimodule: rho.clone(),
        square,
        gamma,
        unit: Some(eta),
    };
    // basics: the single-block surjections n -> 1
    let mut nu_value = BTreeMap::new();
    for n in 0..=nmax {
        for m in 0..=nmax {
            let elems = if m == 1 && n >= 1 {
                vec![surj_id(&vec![0; n])]
            } else {
                vec![]
            };
            nu_value.insert((n.to_string(), m.to_string()), TargetObj::set(elems));
        }
    }
    let nu = Bimodule::from_rule(&cat, nu_value, |_, _, e| e.to_string());
    let mut witness = horizontal_extension(&nu, &fa, nmax, true)?;
    let tensor = ElemTensor {
        rule: &|_, c1, x1, _, _, x2| {
            let m1: usize = c1.parse().unwrap();
            let mut f = parse_surj(x1);
            f.extend(parse_surj(x2).iter().map(|&v| v + m1));
            surj_id(&f)
        },
        unit: Some(surj_id(&[])),
    };
    witness_against(&mut witness, &rho, &|_, _, x| x.to_string(), &tensor, &fa)?;
    Ok(SurjFixture {
        fa,
        monoid,
        witness,
    })
}

/// A directed open graph: `nv` vertices, legs attached by the `ins`/`outs`
/// maps, and a sorted multiset of directed edges (loops allowed).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphElem {
    pub nv: usize,
    pub ins: Vec<usize>,
    pub outs: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl GraphElem {
    pub fn id(&self) -> Id {
        let es: Vec<String> = self.edges.iter().map(|(s, t)| format!("{s}{t}")).collect();
        format!(
            "g{}:{}:{}:{}",
            self.nv,
            digits(&self.ins),
            digits(&self.outs),
            es.join(",")
        )
    }

    pub fn parse(id: &str) -> GraphElem {
        let mut it = id[1..].split(':');
        let nv = it.next().unwrap().parse().unwrap();
        let ins = parse_digits(it.next().unwrap());
        let outs = parse_digits(it.next().unwrap());
        let es = it.next().unwrap();
        let edges = if es.is_empty() {
            vec![]
        } else {
            es.split(',')
                .map(|e| {
                    let d = parse_digits(e);
                    (d[0], d[1])
                })
                .collect()
        };
        GraphElem {
            nv,
            ins,
            outs,
            edges,
        }
    }

    fn relabel(&self, p: &[usize]) -> GraphElem {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(s, t)| (p[s], p[t]))
            .collect();
        edges.sort();
        GraphElem {
            nv: self.nv,
            ins: self.ins.iter().map(|&v| p[v]).collect(),
            outs: self.outs.iter().map(|&v| p[v]).collect(),
            edges,
        }
    }

    /// Lexicographic minimum over vertex bijections, memoized.
    pub fn canonical(&self) -> GraphElem {
        thread_local! {
            static CACHE: RefCell<BTreeMap<GraphElem, GraphElem>> =
                RefCell::new(BTreeMap::new());
        }
        if let Some(hit) = CACHE.with(|c| c.borrow().get(self).cloned()) {
            return hit;
        }
        let out = perms(self.nv)
            .iter()
            .map(|p| self.relabel(p))
            .min()
            .unwrap_or_else(|| self.clone());
        CACHE.with(|c| c.borrow_mut().insert(self.clone(), out.clone()));
        out
    }

    /// Connected-component index per vertex, first-appearance order.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.nv).collect();
        fn find(p: &mut Vec<usize>, mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for &(s, t) in &self.edges {
            let a = find(&mut parent, s);
            let b = find(&mut parent, t);
            parent[a] = b;
        }
        let mut index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut comp = vec![0usize; self.nv];
        for i in 0..self.nv {
            let r = find(&mut parent, i);
            let next = index.len();
            comp[i] = *index.entry(r).or_insert(next);
        }
        comp
    }

    /// Collapse every connected component to a cospan vertex; closed
    /// components become isolated vertices.
    pub fn contract(&self) -> CospanElem {
        let comp = self.components();
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        CospanElem {
            nv: ncomp,
            left: self.ins.iter().map(|&v| comp[v]).collect(),
            right: self.outs.iter().map(|&v| comp[v]).collect(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.nv <= 1 || self.components().iter().copied().max() == Some(0)
    }
}

/// Glue two open graphs: one fresh edge per middle leg pair.
pub fn glue_compose(x: &GraphElem, y: &GraphElem, mid: usize) -> GraphElem {
    let mut edges: Vec<(usize, usize)> = x.edges.clone();
    edges.extend(y.edges.iter().map(|&(s, t)| (s + x.nv, t + x.nv)));
    for t in 0..mid {
        edges.push((x.outs[t], x.nv + y.ins[t]));
    }
    edges.sort();
    GraphElem {
        nv: x.nv + y.nv,
        ins: x.ins.clone(),
        outs: y.outs.iter().map(|&v| v + x.nv).collect(),
        edges,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GlueBounds {
    pub nmax: usize,
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for GlueBounds {
    fn default() -> GlueBounds {
        GlueBounds {
            nmax: 2,
            max_vertices: 4,
            max_edges: 2,
        }
    }
}

/// Open graphs as a bimodule relative to the cospan monoid: the projection
/// contracts connected components.
pub struct GlueFixture {
    pub relative: RelativeBimodule,
    pub bounds: GlueBounds,
    pub cospans: CospanFixture,
}

fn maps_into(n: usize, nv: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    if nv == 0 {
        return vec![];
    }
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for f in &out {
            for v in 0..nv {
                let mut g = f.clone();
                g.push(v);
                next.push(g);
            }
        }
        out = next;
    }
    out
}

fn edge_multisets(nv: usize, max_edges: usize) -> Vec<Vec<(usize, usize)>> {
    let codes: Vec<(usize, usize)> = (0..nv)
        .flat_map(|s| (0..nv).map(move |t| (s, t)))
        .collect();
    let mut out: Vec<Vec<(usize, usize)>> = vec![vec![]];
    let mut layer: Vec<(usize, Vec<(usize, usize)>)> =
        vec![(0, vec![])];
    for _ in 0..max_edges {
        let mut next = Vec::new();
        for (start, es) in &layer {
            for (i, e) in codes.iter().enumerate().skip(*start) {
                let mut es2 = es.clone();
                es2.push(*e);
                out.push(es2.clone());
                next.push((i, es2));
            }
        }
        layer = next;
    }
    out
}

pub fn build_glue(bounds: GlueBounds) -> Result<GlueFixture, PlError> {
    if bounds.max_vertices > 6 || bounds.nmax > 4 {
        return Err(PlError::SizeCap("glue bounds too large to enumerate".into()));
    }
    let cospans = build_cospan(bounds.nmax, bounds.max_vertices, CospanVariant::Full)?;
    let cat = cospans.fa.action.clone();
    let mut value = BTreeMap::new();
    for a in 0..=bounds.nmax {
        for b in 0..=bounds.nmax {
            let mut elems = BTreeSet::new();
            for nv in 0..=bounds.max_vertices {
                for ins in maps_into(a, nv) {
                    for outs in maps_into(b, nv) {
                        for edges in edge_multisets(nv, bounds.max_edges) {
                            elems.insert(
                                GraphElem {
                                    nv,
                                    ins: ins.clone(),
                                    outs: outs.clone(),
                                    edges,
                                }
                                .canonical()
                                .id(),
                            );
                        }
                    }
                }
            }
            value.insert(
                (a.to_string(), b.to_string()),
                TargetObj::set(elems.into_iter().collect()),
            );
        }
    }
    let xi = Bimodule::from_rule(&cat, value, |s, t, e| {
        let (_, si) = parse_perm(s);
        let (_, ti) = parse_perm(t);
        let g = GraphElem::parse(e);
        let mut tinv = vec![0usize; ti.len()];
        for (j, &v) in ti.iter().enumerate() {
            tinv[v] = j;
        }
        GraphElem {
            nv: g.nv,
            ins: si.iter().map(|&i| g.ins[i]).collect(),
            outs: tinv.iter().map(|&j| g.outs[j]).collect(),
            edges: g.edges,
        }
        .canonical()
        .id()
    });
    let base_rho = &cospans.monoid.bimodule;
    let projection_component = xi
        .value
        .iter()
        .map(|((a, b), v)| {
            let mor = TargetMor::from_fn(v, base_rho.val(a, b), |e| {
                cospan_truncate(
                    &GraphElem::parse(e).contract(),
                    CospanVariant::Full,
                    bounds.max_vertices,
                )
                .id()
            });
            ((a.clone(), b.clone()), mor)
        })
        .collect();
    let projection = BimoduleMap {
        source: xi.clone(),
        target: base_rho.clone(),
        component: projection_component,
    };
    let relative = RelativeBimodule {
        total: xi,
        projection,
        base: cospans.monoid.clone(),
    };
    Ok(GlueFixture {
        relative,
        bounds,
        cospans,
    })
}

/// Element-wise relative multiplication law on side-bounded graphs: gluing
/// then contracting agrees with contracting then composing cospans. Gluing
/// escapes any vertex bound eventually, so the check quantifies over graphs
/// whose doubled size still fits.
pub fn glue_square_check(
    f: &GlueFixture,
    side_vertices: usize,
    side_edges: usize,
) -> Result<LawReport, PlError> {
    let b = &f.bounds;
    if 2 * side_vertices > b.max_vertices || 2 * side_edges + b.nmax > b.max_edges {
        return Err(PlError::Mismatch(
            "side bounds leave the enumerated range after gluing".into(),
        ));
    }
    let mut r = LawReport::new();
    let xi = &f.relative.total;
    let pi = &f.relative.projection;
    for a in 0..=b.nmax {
        for m in 0..=b.nmax {
            for c in 0..=b.nmax {
                let (a, m, c) = (a.to_string(), m.to_string(), c.to_string());
                let mid: usize = m.parse().unwrap();
                for e1 in xi.val(&a, &m).names() {
                    let g1 = GraphElem::parse(e1);
                    if g1.nv > side_vertices || g1.edges.len() > side_edges {
                        continue;
                    }
                    for e2 in xi.val(&m, &c).names() {
                        let g2 = GraphElem::parse(e2);
                        if g2.nv > side_vertices || g2.edges.len() > side_edges {
                            continue;
                        }
                        let comp = glue_compose(&g1, &g2, mid).canonical();
                        if !xi.val(&a, &c).names().contains(&comp.id()) {
                            r.violation(format!(
                                "glued graph {} escapes the enumeration at ({a}, {c})",
                                comp.id()
                            ));
                            continue;
                        }
                        let lhs = pi.at(&a, &c).apply(&comp.id()).clone();
                        let rhs = cospan_truncate(
                            &cospan_compose(
                                &CospanElem::parse(pi.at(&a, &m).apply(e1)),
                                &CospanElem::parse(pi.at(&m, &c).apply(e2)),
                                mid,
                            ),
                            CospanVariant::Full,
                            b.max_vertices,
                        )
                        .id();
                        if lhs != rhs {
                            r.violation(format!(
                                "contraction square fails at ({a}, {m}, {c}) on ({e1}, {e2}): \
                                 {lhs} vs {rhs}"
                            ));
                        }
                        if comp.nv > 0 {
                            let single = CospanElem::parse(&lhs).nv == 1;
                            if comp.is_connected() != single {
                                r.violation(format!(
                                    "connectivity disagrees with the contracted vertex count \
                                     on ({e1}, {e2})"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}

/// An operad-like structure on a basic representation: a one-step composition
/// per basic composable pair, equivariant over the pair category.
pub struct OpData {
    pub d: ElementRep,
    /// basic-pair element object -> composition on the restricted tensor fiber
    pub comp: BTreeMap<Id, TargetMor>,
    pub equivariance: LawReport,
}

/// Read an op off a monoid multiplication: compose the Kan comparison with
/// the multiplication component at the image basic.
pub fn plus_monoid_to_op(
    d: &ElementRep,
    g: &RepMap,
    ctx: &BasicContext,
) -> Result<OpData, PlError> {
    let dd = basic_element_plethysm(d, d, ctx)?;
    if g.source.fun.ob != dd.rep.fun.ob {
        return Err(PlError::Mismatch(
            "multiplication source is not the basic plethysm of the representation".into(),
        ));
    }
    let mut comp = BTreeMap::new();
    for b in &dd.el_beta.cat.objects {
        let lam = &dd.kan.lambda[b];
        let target = &g.component[&dd.kan.along.ob[b]];
        comp.insert(b.clone(), lam.then(target));
    }
    let mut equivariance = LawReport::new();
    for (mid, (src, tgt)) in &dd.el_beta.cat.morphisms {
        let step = &dd.ext.rep.fun.mor[&dd.incl.mor[mid]];
        let lhs = step.then(&comp[tgt]);
        let rhs = comp[src].then(&d.fun.mor[&dd.kan.along.mor[mid]]);
        if lhs != rhs {
            equivariance.violation(format!("composition is not equivariant along {mid}"));
        }
    }
    Ok(OpData {
        d: d.clone(),
        comp,
        equivariance,
    })
}

/// Rebuild the monoid multiplication from an op by the universal property of
/// the Kan colimits: every class is hit through some pair node, and
/// equivariance makes the choice immaterial.
pub fn plus_op_to_monoid(o: &OpData, ctx: &BasicContext) -> Result<RepMap, PlError> {
    let dd = basic_element_plethysm(&o.d, &o.d, ctx)?;
    let mut component = BTreeMap::new();
    for y in &ctx.el_nu.cat.objects {
        let colim = &dd.kan.colims[y];
        let mut map: BTreeMap<Id, Id> = BTreeMap::new();
        for (key, class) in &colim.class_of {
            let (node, elem) = crate::factorize::split_tag(key);
            let parts = split_parts(&node);
            let (b, m) = (&parts[0], &parts[2]);
            let comp_b = o.comp.get(b).ok_or_else(|| {
                PlError::Mismatch(format!("op has no composition at {b}"))
            })?;
            let image = o.d.fun.mor[m].apply(comp_b.apply(&elem)).clone();
            match map.get(class) {
                Some(prev) if prev != &image => {
                    return Err(PlError::Law(format!(
                        "op composition is not equivariant: class {class} at {y} \
                         receives two images"
                    )))
                }
                _ => {
                    map.insert(class.clone(), image);
                }
            }
        }
        component.insert(
            y.clone(),
            TargetMor::from_map(&colim.obj, o.d.value(y), map),
        );
    }
    Ok(RepMap {
        source: dd.rep,
        target: o.d.clone(),
        component,
    })
}

/// Round trip both directions of the op correspondence and report every
/// mismatch.
pub fn plus_roundtrip_check(
    d: &ElementRep,
    g: &RepMap,
    ctx: &BasicContext,
) -> Result<LawReport, PlError> {
    let mut r = LawReport::new();
    let op = plus_monoid_to_op(d, g, ctx)?;
    r.merge(op.equivariance.clone().prefixed("op equivariance"));
    let g2 = plus_op_to_monoid(&op, ctx)?;
    r.merge(g2.validate().prefixed("rebuilt multiplication"));
    for (y, m) in &g.component {
        if m != &g2.component[y] {
            r.violation(format!("rebuilt multiplication differs at {y}"));
        }
    }
    let op2 = plus_monoid_to_op(d, &g2, ctx)?;
    for (b, m) in &op.comp {
        if m != &op2.comp[b] {
            r.violation(format!("rebuilt op differs at {b}"));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corecat::validate_category;

    #[test]
    fn s_category_is_a_groupoid_of_the_right_size() {
        let c = s_category(3);
        assert!(validate_category(&c).is_ok(), "{}", validate_category(&c));
        assert!(c.is_groupoid());
        assert_eq!(c.hom("3", "3").len(), 6);
        assert_eq!(c.hom("0", "0").len(), 1);
        assert_eq!(c.hom("1", "2").len(), 0);
    }

    #[test]
    fn s_monoidal_tables_are_lawful() {
        let fa = s_action(3);
        let report = fa.validate();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn n_action_is_lawful() {
        let fa = n_action(3);
        let report = fa.validate();
        assert!(report.is_ok(), "{report}");
    }

    use crate::basicrep::{basic_context, basic_relative_product, BasicRelative};
    use crate::bimodule::check_monoid;
    use crate::factorize::{basic_action_bimodule, hereditary_check};
    use crate::target::TargetFunctor;

    #[test]
    fn cospan_counts_and_monoid_laws() {
        let f = build_cospan(2, 0, CospanVariant::Nd).unwrap();
        let rho = &f.monoid.bimodule;
        // Bell numbers of the total leg count
        assert_eq!(rho.val("0", "0").size(), 1);
        assert_eq!(rho.val("1", "1").size(), 2);
        assert_eq!(rho.val("2", "0").size(), 2);
        assert_eq!(rho.val("2", "2").size(), 15);
        let r = check_monoid(rho, &f.monoid.gamma, f.monoid.unit.as_ref()).unwrap();
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn cospan_unit_distinguishes_permutations() {
        let f = build_cospan(2, 0, CospanVariant::Nd).unwrap();
        let eta = f.monoid.unit.as_ref().unwrap();
        assert_eq!(eta.at("1", "1").apply("s1:0"), "c1:0:0");
        let id2 = eta.at("2", "2").apply("s2:01");
        let swap = eta.at("2", "2").apply("s2:10");
        assert_ne!(id2, swap);
    }

    #[test]
    fn cospan_extension_matches_enumeration() {
        let f = build_cospan(2, 0, CospanVariant::Nd).unwrap();
        assert!(f.witness.iso.is_some());
        assert!(f.witness.inclusion.is_some());
        for (pair, v) in &f.monoid.bimodule.value {
            assert_eq!(
                f.witness.extension.value[pair].size(),
                v.size(),
                "at {pair:?}"
            );
        }
    }

    #[test]
    fn cospan_full_variant_saturates_isolated_vertices() {
        let f = build_cospan(2, 1, CospanVariant::Full).unwrap();
        let rho = &f.monoid.bimodule;
        // the empty cospan and one isolated vertex
        assert_eq!(rho.val("0", "0").size(), 2);
        assert_eq!(rho.val("1", "1").size(), 4);
        assert!(f.witness.iso.is_none());
        // the law suite on the saturating variant is affordable one size down
        let g = build_cospan(1, 1, CospanVariant::Full).unwrap();
        let r = check_monoid(
            &g.monoid.bimodule,
            &g.monoid.gamma,
            g.monoid.unit.as_ref(),
        )
        .unwrap();
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn surjection_counts_and_witness() {
        let f = build_surjection(3).unwrap();
        let rho = &f.monoid.bimodule;
        assert_eq!(rho.val("3", "2").size(), 6);
        assert_eq!(rho.val("3", "3").size(), 6);
        assert_eq!(rho.val("2", "3").size(), 0);
        assert!(f.witness.iso.is_some());
        let r = check_monoid(rho, &f.monoid.gamma, f.monoid.unit.as_ref()).unwrap();
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn graph_canonical_handles_loops_and_relabeling() {
        let g = GraphElem {
            nv: 2,
            ins: vec![0],
            outs: vec![1],
            edges: vec![(0, 0)],
        };
        let h = GraphElem {
            nv: 2,
            ins: vec![1],
            outs: vec![0],
            edges: vec![(1, 1)],
        };
        assert_eq!(g.canonical(), h.canonical());
        assert_eq!(GraphElem::parse(&g.id()), g);
        assert!(!g.is_connected());
        assert_eq!(g.contract().nv, 2);
    }

    #[test]
    fn glue_fixture_contracts_naturally() {
        let f = build_glue(GlueBounds::default()).unwrap();
        let r = f.relative.validate();
        assert!(r.is_ok(), "{r}");
        let sq = glue_square_check(&f, 2, 0).unwrap();
        assert!(sq.is_ok(), "{sq}");
    }

    #[test]
    fn gluing_can_close_a_component() {
        // a path through two vertices closes up when glued to its reverse
        let x = GraphElem {
            nv: 1,
            ins: vec![],
            outs: vec![0],
            edges: vec![],
        };
        let y = GraphElem {
            nv: 1,
            ins: vec![0],
            outs: vec![],
            edges: vec![],
        };
        let c = glue_compose(&x, &y, 1);
        assert!(c.is_connected());
        assert_eq!(c.contract().isolated(), 1);
    }

    #[test]
    fn cospan_multiplication_and_unit_are_hereditary() {
        let f = build_cospan(2, 0, CospanVariant::Nd).unwrap();
        let (gamma0, pw, wt) = cospan_pair_witness(&f, 2).unwrap();
        assert!(gamma0.validate().is_ok());
        let r = hereditary_check(&f.monoid.gamma, &pw, &wt).unwrap();
        assert!(r.is_ok(), "{r}");
        let wh = basic_action_bimodule(&f.fa, f.witness.cap).unwrap();
        let r2 =
            hereditary_check(f.monoid.unit.as_ref().unwrap(), &wh, &f.witness).unwrap();
        assert!(r2.is_ok(), "{r2}");
    }

    /// An S-module concentrated on the basics with the given fiber sizes per
    /// arity, all symmetries acting trivially.
    fn sized_rep(ctx: &BasicContext, sizes: &[usize]) -> ElementRep {
        let base = ctx.el_nu.clone();
        let mut ob = BTreeMap::new();
        for (o, (a, _, _)) in &base.data {
            let n: usize = a.parse().unwrap();
            let elems: Vec<Id> = (0..sizes[n - 1]).map(|i| format!("e{i}")).collect();
            ob.insert(o.clone(), TargetObj::set(elems));
        }
        let mut mor = BTreeMap::new();
        for m in base.over.keys() {
            let (src, _) = &base.cat.morphisms[m];
            mor.insert(m.clone(), TargetMor::identity(&ob[src]));
        }
        ElementRep {
            base: base.clone(),
            fun: TargetFunctor {
                source: base.cat.clone(),
                flavor: Flavor::FinSet,
                ob,
                mor,
            },
        }
    }

    #[test]
    fn basic_plethysm_matches_substitution_oracle() {
        let f = build_surjection(3).unwrap();
        let ctx = basic_context(&f.fa, &f.monoid, &f.witness).unwrap();
        let d = sized_rep(&ctx, &[2, 1, 1]);
        let dd = basic_element_plethysm(&d, &d, &ctx).unwrap();
        // sum over set partitions P of [n] of d_|P| * prod over blocks d_|B|
        let oracle = |n: usize| -> usize {
            let sizes = [2usize, 1, 1];
            set_partitions(n)
                .iter()
                .map(|p| {
                    sizes[p.len() - 1]
                        * p.iter().map(|b| sizes[b.len() - 1]).product::<usize>()
                })
                .sum()
        };
        for n in 1..=3usize {
            let y = ctx
                .el_nu
                .object(&n.to_string(), "1", &surj_id(&vec![0; n]));
            assert_eq!(dd.rep.value(&y).size(), oracle(n), "arity {n}");
        }
    }

    #[test]
    fn plus_correspondence_round_trips() {
        let f = build_surjection(2).unwrap();
        let ctx = basic_context(&f.fa, &f.monoid, &f.witness).unwrap();
        let d = ElementRep::trivial(&ctx.el_nu, Flavor::FinSet);
        let dd = basic_element_plethysm(&d, &d, &ctx).unwrap();
        let component = dd
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
        assert!(g.validate().is_ok());
        let r = plus_roundtrip_check(&d, &g, &ctx).unwrap();
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn doubled_basics_square_counts_two_level_trees() {
        let f = build_surjection(2).unwrap();
        let ctx = basic_context(&f.fa, &f.monoid, &f.witness).unwrap();
        let nu = f.witness.basic.clone();
        let mut value = BTreeMap::new();
        for ((a, b), v) in &nu.value {
            let elems: Vec<Id> = v
                .names()
                .iter()
                .flat_map(|x| [format!("{x}.0"), format!("{x}.1")])
                .collect();
            value.insert((a.clone(), b.clone()), TargetObj::set(elems));
        }
        let nu2 = nu.clone();
        let total = Bimodule::from_rule(&f.fa.action, value, move |s, t, e| {
            let (x, copy) = e.rsplit_once('.').unwrap();
            format!("{}.{copy}", nu2.action_mor(s, t).apply(x))
        });
        let projection_component = total
            .value
            .iter()
            .map(|((a, b), v)| {
                let mor = TargetMor::from_fn(v, nu.val(a, b), |e| {
                    e.rsplit_once('.').unwrap().0.to_string()
                });
                ((a.clone(), b.clone()), mor)
            })
            .collect();
        let x = BasicRelative {
            total: total.clone(),
            projection: crate::bimodule::BimoduleMap {
                source: total,
                target: nu,
                component: projection_component,
            },
        };
        let sq = basic_relative_product(&x, &x, &ctx).unwrap();
        assert!(sq.validate().is_ok());
        // two-level trees with labels from two colors: at one leaf,
        // top node x bottom node; at two leaves, either one binary top
        // (2 x 2) or a pair of unary tops carrying their leaf matching,
        // ordered pairs mod simultaneous swap (4 x 2)
        assert_eq!(sq.total.val("1", "1").size(), 4);
        assert_eq!(sq.total.val("2", "1").size(), 12);
    }

    #[test]
    fn block_sum_and_transposition_agree() {
        let m = s_monoidal(4);
        let c = s_category(4);
        // c_{1,1} is the swap in S_2
        assert_eq!(m.symmetry[&("1".to_string(), "1".to_string())], "s2:10");
        // naturality of the symmetry on a sample pair
        let f = "s2:10";
        let g = "s1:0";
        let fg = &m.tensor_mor[&(f.to_string(), g.to_string())];
        let gf = &m.tensor_mor[&(g.to_string(), f.to_string())];
        let c21 = &m.symmetry[&("2".to_string(), "1".to_string())];
        assert_eq!(c.then(fg, c21), c.then(c21, gf));
    }
}
