//! Canonical integrals modulo total derivatives.
//!
//! A monomial's integral is reduced against every integration-by-parts
//! relation reachable from its derivative class. Relations are kept in fully
//! reduced row-echelon form with the pivot on the largest term, so the
//! remainder is unique. Terms with more antiderivatives are larger; among
//! those, a lexicographically larger (descending) list of local derivative
//! orders is larger. The canonical form therefore pushes derivatives down
//! and removes antiderivatives where some relation allows it.

use super::density::{is_zero_mean_atom, settle, AtomProduct, Factor, Monomial, Var};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

/// Monomials related by derivatives: same antiderivatives, same multiset of
/// local variables, same total local derivative order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct ClassKey {
    antis: Vec<Factor>,
    vars: Vec<Var>,
    total: u32,
}

fn class_of(m: &[Factor]) -> ClassKey {
    let mut antis = Vec::new();
    let mut vars = Vec::new();
    let mut total = 0;
    for f in m {
        match f {
            Factor::Local { var, d } => {
                vars.push(*var);
                total += d;
            }
            Factor::Anti { .. } => antis.push(f.clone()),
        }
    }
    vars.sort();
    ClassKey { antis, vars, total }
}

/// Non-increasing sequences of length `n` summing to `t`, each part ≤ `cap`.
fn partitions(t: u32, n: usize, cap: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if t == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=t.min(cap)).rev() {
        if first * (n as u32) < t {
            break;
        }
        for mut tail in partitions(t - first, n - 1, first) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

fn members(c: &ClassKey) -> Vec<Monomial> {
    let mut groups: Vec<(Var, usize)> = Vec::new();
    for v in &c.vars {
        match groups.last_mut() {
            Some((w, n)) if w == v => *n += 1,
            _ => groups.push((*v, 1)),
        }
    }
    let mut out = Vec::new();
    fn rec(groups: &[(Var, usize)], left: u32, acc: &mut Vec<Factor>, antis: &[Factor], out: &mut Vec<Monomial>) {
        let Some(((var, n), rest)) = groups.split_first() else {
            if left == 0 {
                let mut m = acc.clone();
                m.extend_from_slice(antis);
                out.push(settle(m));
            }
            return;
        };
        let budget = if rest.is_empty() { left..=left } else { 0..=left };
        for t in budget {
            for p in partitions(t, *n, t) {
                let len = acc.len();
                acc.extend(p.iter().map(|&d| Factor::local(*var, d)));
                rec(rest, left - t, acc, antis, out);
                acc.truncate(len);
            }
        }
    }
    rec(&groups, c.total, &mut Vec::new(), &c.antis, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Prod(AtomProduct),
    Mono { antis: usize, orders: Vec<u32>, m: Monomial },
}

fn mono_key(m: Monomial) -> Key {
    let antis = m.iter().filter(|f| f.is_anti()).count();
    let mut orders: Vec<u32> = m
        .iter()
        .filter_map(|f| match f {
            Factor::Local { d, .. } => Some(*d),
            Factor::Anti { .. } => None,
        })
        .collect();
    orders.sort_unstable_by(|a, b| b.cmp(a));
    Key::Mono { antis, orders, m }
}

fn product_key(p: AtomProduct) -> Option<Key> {
    if p.iter().any(|a| is_zero_mean_atom(a)) {
        return None;
    }
    if p.len() == 1 {
        return Some(mono_key(p.into_iter().next().unwrap()));
    }
    Some(Key::Prod(p))
}

type Row = BTreeMap<Key, BigRational>;

fn add_entry(row: &mut Row, k: Key, q: BigRational) {
    if q.is_zero() {
        return;
    }
    let e = row.entry(k.clone()).or_insert_with(BigRational::zero);
    *e += q;
    if e.is_zero() {
        row.remove(&k);
    }
}

#[derive(Default)]
struct System {
    pivots: BTreeMap<Key, Row>,
}

impl System {
    fn reduce(&self, row: &mut Row) {
        let hits: Vec<Key> = row.keys().filter(|k| self.pivots.contains_key(*k)).cloned().collect();
        for k in hits {
            let Some(c) = row.get(&k).cloned() else { continue };
            for (pk, pv) in &self.pivots[&k] {
                add_entry(row, pk.clone(), -(&c * pv));
            }
        }
    }

    fn insert(&mut self, mut row: Row) {
        self.reduce(&mut row);
        let Some((lead, c)) = row.iter().next_back().map(|(k, v)| (k.clone(), v.clone())) else {
            return;
        };
        if matches!(lead, Key::Prod(_)) {
            return;
        }
        let inv = c.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for prow in self.pivots.values_mut() {
            if let Some(f) = prow.get(&lead).cloned() {
                for (k, v) in &row {
                    add_entry(prow, k.clone(), -(&f * v));
                }
            }
        }
        self.pivots.insert(lead, row);
    }
}

fn merge(a: &[Monomial], b: &[Monomial]) -> AtomProduct {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v.sort();
    v
}

/// `∂(pre)`, integrated, as a relation row.
fn derivative_row(pre: &[Factor]) -> Row {
    let mut row = Row::new();
    for (i, f) in pre.iter().enumerate() {
        match f {
            Factor::Local { var, d } => {
                let mut m = pre.to_vec();
                m[i] = Factor::local(*var, d + 1);
                add_entry(&mut row, mono_key(settle(m)), BigRational::one());
            }
            Factor::Anti { .. } => {
                let inner = f.inner_factors();
                let mut rest = pre.to_vec();
                rest.remove(i);
                let mut m = rest.clone();
                m.extend(inner.iter().cloned());
                add_entry(&mut row, mono_key(settle(m)), BigRational::one());
                let a = integrate_monomial(&inner);
                let b = integrate_monomial(&rest);
                for (ka, qa) in &a {
                    for (kb, qb) in &b {
                        if let Some(k) = product_key(merge(ka, kb)) {
                            add_entry(&mut row, k, -(qa * qb));
                        }
                    }
                }
            }
        }
    }
    row
}

/// `∮ L·D⁻¹(M) + ∮ M·D⁻¹(L)` for a single-variable local product `L`.
fn skew_row(m: &[Factor]) -> Option<Row> {
    let (antis, locals): (Vec<Factor>, Vec<Factor>) = m.iter().cloned().partition(|f| f.is_anti());
    if antis.len() != 1 || locals.is_empty() {
        return None;
    }
    let var = locals[0].var();
    if locals.iter().any(|f| f.var() != var) {
        return None;
    }
    let orders: Vec<u32> = locals
        .iter()
        .map(|f| match f {
            Factor::Local { d, .. } => *d,
            Factor::Anti { .. } => unreachable!(),
        })
        .collect();
    let mut other = antis[0].inner_factors();
    other.push(Factor::anti(var, orders).ok()?);
    let mut row = Row::new();
    add_entry(&mut row, mono_key(m.to_vec()), BigRational::one());
    add_entry(&mut row, mono_key(settle(other)), BigRational::one());
    Some(row)
}

fn build_system(root: &ClassKey) -> System {
    let mut seen = BTreeSet::new();
    let mut work = vec![root.clone()];
    let mut rows = Vec::new();
    let push_classes = |row: &Row, work: &mut Vec<ClassKey>| {
        for k in row.keys() {
            if let Key::Mono { m, .. } = k {
                work.push(class_of(m));
            }
        }
    };
    while let Some(c) = work.pop() {
        if !seen.insert(c.clone()) {
            continue;
        }
        if c.total > 0 && !c.vars.is_empty() {
            let pre_class = ClassKey { total: c.total - 1, ..c.clone() };
            for pre in members(&pre_class) {
                let row = derivative_row(&pre);
                push_classes(&row, &mut work);
                rows.push(row);
            }
        }
        if c.antis.len() == 1 {
            for m in members(&c) {
                if let Some(row) = skew_row(&m) {
                    push_classes(&row, &mut work);
                    rows.push(row);
                }
            }
        }
    }
    let mut sys = System::default();
    for r in rows {
        sys.insert(r);
    }
    sys
}

type Integral = Arc<Vec<(AtomProduct, BigRational)>>;

fn system_cache() -> &'static RwLock<HashMap<ClassKey, Arc<System>>> {
    static CACHE: OnceLock<RwLock<HashMap<ClassKey, Arc<System>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn integral_cache() -> &'static RwLock<HashMap<Monomial, Integral>> {
    static CACHE: OnceLock<RwLock<HashMap<Monomial, Integral>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn system_for(c: &ClassKey) -> Arc<System> {
    if let Some(s) = system_cache().read().unwrap().get(c) {
        return s.clone();
    }
    let s = Arc::new(build_system(c));
    system_cache().write().unwrap().entry(c.clone()).or_insert(s).clone()
}

/// Canonical `∮ m` as a rational combination of atom products.
pub fn integrate_monomial(m: &[Factor]) -> Vec<(AtomProduct, BigRational)> {
    let m = settle(m.to_vec());
    if m.is_empty() {
        return vec![(Vec::new(), BigRational::one())];
    }
    if is_zero_mean_atom(&m) {
        return Vec::new();
    }
    if let Some(r) = integral_cache().read().unwrap().get(&m) {
        return r.as_ref().clone();
    }
    let sys = system_for(&class_of(&m));
    let mut row = Row::new();
    row.insert(mono_key(m.clone()), BigRational::one());
    sys.reduce(&mut row);
    let out: Vec<(AtomProduct, BigRational)> = row
        .into_iter()
        .filter_map(|(k, q)| match k {
            Key::Mono { m, .. } if is_zero_mean_atom(&m) => None,
            Key::Mono { m, .. } => Some((vec![m], q)),
            Key::Prod(p) => Some((p, q)),
        })
        .collect();
    integral_cache().write().unwrap().insert(m, Arc::new(out.clone()));
    out
}
