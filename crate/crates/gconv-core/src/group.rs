//! Finite groups realized through dense Cayley tables, their subgroups and
//! coset spaces, and the lifting/projection maps between functions on a
//! group and functions on its quotients.
//!
//! Elements are integer ids into the owning group's tables; id 0 is always
//! the identity. Groups are built from a small spec grammar: `Z<n>` (cyclic),
//! `D<n>` (dihedral of order 2n), `S<n>` (symmetric, n <= 6), and products
//! of these joined by `x`, e.g. `Z4xZ4` or `S3xZ2`.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C};

/// Default cap on group order; override with the GCONV_MAX_ORDER env var.
pub const DEFAULT_MAX_ORDER: usize = 720;

fn max_order() -> usize {
    std::env::var("GCONV_MAX_ORDER")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

/// How a group was constructed; drives irrep construction downstream.
#[derive(Debug, Clone)]
pub enum GroupFamily {
    Cyclic {
        n: usize,
    },
    Dihedral {
        n: usize,
    },
    /// Permutations stored in one-line notation, lexicographic order.
    Symmetric {
        n: usize,
        perms: Vec<Vec<u8>>,
    },
    Product {
        factors: Vec<Arc<FiniteGroup>>,
    },
    /// Built from a raw Cayley table; no named structure attached.
    Table,
}

/// A finite group given by its full multiplication table.
#[derive(Debug)]
pub struct FiniteGroup {
    pub name: String,
    pub order: usize,
    /// Flattened |G| x |G| table: `cayley[a * order + b] = a * b`.
    cayley: Vec<usize>,
    inverse: Vec<usize>,
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    /// A small generating set, used wherever checking all elements is
    /// equivalent to checking generators.
    generators: Vec<usize>,
    pub(crate) family: GroupFamily,
}

impl FiniteGroup {
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element_by_label(&self, label: &str) -> Result<usize> {
        self.label_index
            .get(label.trim())
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn check_element(&self, id: usize) -> Result<()> {
        if id < self.order {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                id,
                order: self.order,
            })
        }
    }

    /// Verify the Cayley invariants: identity and inverse laws, every row
    /// and column a permutation, and associativity (exhaustive up to order
    /// 120, generator-seeded triples beyond that).
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        for g in 0..n {
            if self.mul(0, g) != g || self.mul(g, 0) != g {
                return Err(Error::Invalid(format!("identity law fails at {g}")));
            }
            if self.mul(g, self.inv(g)) != 0 || self.mul(self.inv(g), g) != 0 {
                return Err(Error::Invalid(format!("inverse law fails at {g}")));
            }
        }
        let mut seen_row = vec![false; n];
        let mut seen_col = vec![false; n];
        for a in 0..n {
            seen_row.fill(false);
            seen_col.fill(false);
            for b in 0..n {
                let r = self.mul(a, b);
                let c = self.mul(b, a);
                if seen_row[r] || seen_col[c] {
                    return Err(Error::Invalid(format!(
                        "row/column {a} is not a permutation"
                    )));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        if n <= 120 {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(Error::Invalid(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            for &a in &self.generators {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(Error::Invalid(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Build a group directly from tables. Used for subgroups rebuilt as
    /// standalone groups; the caller guarantees id 0 is the identity.
    pub(crate) fn from_table(
        name: String,
        cayley: Vec<usize>,
        labels: Vec<String>,
    ) -> Result<Arc<Self>> {
        let order = labels.len();
        assert_eq!(cayley.len(), order * order);
        let mut inverse = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if cayley[a * order + b] == 0 {
                    inverse[a] = b;
                }
            }
        }
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut g = FiniteGroup {
            name,
            order,
            cayley,
            inverse,
            labels,
            label_index,
            generators: Vec::new(),
            family: GroupFamily::Table,
        };
        g.generators = greedy_generators(&g);
        g.validate()?;
        Ok(Arc::new(g))
    }
}

/// Smallest greedy generating set: scan ids ascending, keep any element that
/// enlarges the generated subgroup.
fn greedy_generators(g: &FiniteGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut closed = vec![0usize];
    for cand in 1..g.order {
        if closed.contains(&cand) {
            continue;
        }
        gens.push(cand);
        closed = close_under_mul(g, &{
            let mut s = closed.clone();
            s.push(cand);
            s
        });
        if closed.len() == g.order {
            break;
        }
    }
    gens
}

fn close_under_mul(g: &FiniteGroup, seed: &[usize]) -> Vec<usize> {
    let mut in_set = vec![false; g.order];
    in_set[0] = true;
    let mut members = vec![0usize];
    let mut queue: Vec<usize> = seed.iter().copied().filter(|&s| s != 0).collect();
    for &s in &queue {
        in_set[s] = true;
    }
    members.extend(queue.iter().copied());
    while let Some(a) = queue.pop() {
        // right-multiplying by current members is enough for a finite closure
        let snapshot: Vec<usize> = members.clone();
        for b in snapshot {
            for p in [g.mul(a, b), g.mul(b, a)] {
                if !in_set[p] {
                    in_set[p] = true;
                    members.push(p);
                    queue.push(p);
                }
            }
        }
    }
    members.sort_unstable();
    members
}

// ---------------------------------------------------------------------------
// Spec parsing and family constructions
// ---------------------------------------------------------------------------

/// Build a group from its spec string (`Z4`, `D4`, `S3`, `Z4xZ4`, ...).
pub fn build_group(spec: &str) -> Result<Arc<FiniteGroup>> {
    let atoms: Vec<&str> = spec.trim().split('x').collect();
    if atoms.is_empty() || atoms.iter().any(|a| a.is_empty()) {
        return Err(Error::MalformedSpec(spec.to_string()));
    }
    let mut factors = Vec::new();
    let mut order: usize = 1;
    for atom in &atoms {
        let g = build_atom(atom)?;
        order = order
            .checked_mul(g.order)
            .ok_or_else(|| Error::MalformedSpec(spec.to_string()))?;
        factors.push(g);
    }
    let cap = max_order();
    if order > cap {
        return Err(Error::OrderCap { order, cap });
    }
    if factors.len() == 1 {
        return Ok(factors.pop().unwrap());
    }
    Ok(build_product(factors))
}

fn build_atom(atom: &str) -> Result<Arc<FiniteGroup>> {
    let atom = atom.trim();
    let (letter, digits) = atom.split_at(1);
    let n: usize = digits
        .parse()
        .map_err(|_| Error::MalformedSpec(atom.to_string()))?;
    if n == 0 {
        return Err(Error::MalformedSpec(atom.to_string()));
    }
    let cap = max_order();
    let g = match letter {
        "Z" => build_cyclic(n),
        "D" => build_dihedral(n),
        "S" => {
            if n > 6 {
                return Err(Error::MalformedSpec(format!(
                    "{atom}: symmetric groups supported up to S6"
                )));
            }
            build_symmetric(n)
        }
        _ => return Err(Error::MalformedSpec(atom.to_string())),
    };
    if g.order > cap {
        return Err(Error::OrderCap {
            order: g.order,
            cap,
        });
    }
    Ok(g)
}

fn finish(
    name: String,
    order: usize,
    mul: impl Fn(usize, usize) -> usize,
    labels: Vec<String>,
    generators: Vec<usize>,
    family: GroupFamily,
) -> Arc<FiniteGroup> {
    let mut cayley = vec![0usize; order * order];
    for a in 0..order {
        for b in 0..order {
            cayley[a * order + b] = mul(a, b);
        }
    }
    let mut inverse = vec![usize::MAX; order];
    for a in 0..order {
        for b in 0..order {
            if cayley[a * order + b] == 0 {
                inverse[a] = b;
                break;
            }
        }
    }
    let label_index = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    Arc::new(FiniteGroup {
        name,
        order,
        cayley,
        inverse,
        labels,
        label_index,
        generators,
        family,
    })
}

fn build_cyclic(n: usize) -> Arc<FiniteGroup> {
    let labels = (0..n).map(|i| i.to_string()).collect();
    let gens = if n > 1 { vec![1] } else { vec![] };
    finish(
        format!("Z{n}"),
        n,
        |a, b| (a + b) % n,
        labels,
        gens,
        GroupFamily::Cyclic { n },
    )
}

/// Dihedral group of order 2n; id = b*n + a encodes the element r^a s^b.
fn build_dihedral(n: usize) -> Arc<FiniteGroup> {
    let order = 2 * n;
    let mul = move |x: usize, y: usize| {
        let (a1, b1) = (x % n, x / n);
        let (a2, b2) = (y % n, y / n);
        let a = if b1 == 0 {
            (a1 + a2) % n
        } else {
            (a1 + n - a2 % n) % n
        };
        let b = (b1 + b2) % 2;
        b * n + a
    };
    let mut labels = Vec::with_capacity(order);
    for b in 0..2 {
        for a in 0..n {
            let rot = match a {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r{a}"),
            };
            let l = format!("{rot}{}", if b == 1 { "s" } else { "" });
            labels.push(if l.is_empty() { "e".to_string() } else { l });
        }
    }
    let gens = if n > 1 { vec![1, n] } else { vec![n] };
    finish(
        format!("D{n}"),
        order,
        mul,
        labels,
        gens,
        GroupFamily::Dihedral { n },
    )
}

fn all_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    // lexicographic next-permutation loop; identity comes first
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| cur[i] < cur[i + 1])
        else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

pub(crate) fn compose(a: &[u8], b: &[u8]) -> Vec<u8> {
    // (a . b)(i) = a(b(i))
    b.iter().map(|&i| a[i as usize]).collect()
}

/// Cycle notation with 1-based points, cycles keyed by their minimal element.
pub(crate) fn cycle_label(p: &[u8]) -> String {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || p[start] as usize == start {
            seen[start] = true;
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut cur = p[start] as usize;
        while cur != start {
            seen[cur] = true;
            cyc.push(cur);
            cur = p[cur] as usize;
        }
        out.push('(');
        for v in cyc {
            out.push_str(&(v + 1).to_string());
        }
        out.push(')');
    }
    if out.is_empty() {
        "e".to_string()
    } else {
        out
    }
}

fn build_symmetric(n: usize) -> Arc<FiniteGroup> {
    let perms = all_permutations(n);
    let order = perms.len();
    let index: HashMap<Vec<u8>, usize> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let labels: Vec<String> = perms.iter().map(|p| cycle_label(p)).collect();
    let perms_for_mul = perms.clone();
    let mul = move |a: usize, b: usize| index[&compose(&perms_for_mul[a], &perms_for_mul[b])];
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t = (0..n as u8).collect::<Vec<_>>();
        t.swap(0, 1);
        gens.push(perms.iter().position(|p| *p == t).unwrap());
    }
    if n >= 3 {
        let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
        gens.push(perms.iter().position(|p| *p == cycle).unwrap());
    }
    finish(
        format!("S{n}"),
        order,
        mul,
        labels,
        gens,
        GroupFamily::Symmetric { n, perms },
    )
}

fn build_product(factors: Vec<Arc<FiniteGroup>>) -> Arc<FiniteGroup> {
    let order: usize = factors.iter().map(|f| f.order).product();
    let name = factors
        .iter()
        .map(|f| f.name.clone())
        .collect::<Vec<_>>()
        .join("x");
    let sizes: Vec<usize> = factors.iter().map(|f| f.order).collect();
    let decode = |mut id: usize| -> Vec<usize> {
        let mut parts = vec![0usize; sizes.len()];
        for i in (0..sizes.len()).rev() {
            parts[i] = id % sizes[i];
            id /= sizes[i];
        }
        parts
    };
    let encode = |parts: &[usize]| -> usize {
        parts
            .iter()
            .zip(&sizes)
            .fold(0usize, |acc, (&p, &s)| acc * s + p)
    };
    let fs = factors.clone();
    let mul = move |a: usize, b: usize| {
        let (pa, pb) = (decode(a), decode(b));
        let parts: Vec<usize> = pa
            .iter()
            .zip(&pb)
            .zip(&fs)
            .map(|((&x, &y), f)| f.mul(x, y))
            .collect();
        encode(&parts)
    };
    let mut labels = Vec::with_capacity(order);
    for id in 0..order {
        let mut rem = id;
        let mut parts = vec![0usize; sizes.len()];
        for i in (0..sizes.len()).rev() {
            parts[i] = rem % sizes[i];
            rem /= sizes[i];
        }
        labels.push(
            parts
                .iter()
                .zip(&factors)
                .map(|(&p, f)| f.label(p).to_string())
                .collect::<Vec<_>>()
                .join("|"),
        );
    }
    let mut gens = Vec::new();
    let mut stride = order;
    for (i, f) in factors.iter().enumerate() {
        stride /= f.order;
        for &g in f.generators() {
            gens.push(g * stride);
        }
        let _ = i;
    }
    finish(
        name,
        order,
        mul,
        labels,
        gens,
        GroupFamily::Product { factors },
    )
}

// ---------------------------------------------------------------------------
// Subgroups
// ---------------------------------------------------------------------------

/// A subgroup given by its sorted member ids within a parent group.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub parent: Arc<FiniteGroup>,
    pub members: Vec<usize>,
    pub name: String,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup {
            parent: parent.clone(),
            members: vec![0],
            name: "<e>".to_string(),
        }
    }

    pub fn whole(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup {
            parent: parent.clone(),
            members: (0..parent.order).collect(),
            name: parent.name.clone(),
        }
    }

    /// Same parent group and same member set.
    pub fn same_as(&self, other: &Subgroup) -> bool {
        self.parent.name == other.parent.name && self.members == other.members
    }

    /// Rebuild this subgroup as a standalone group over its own Cayley
    /// table. Returns the group together with the member list mapping the
    /// new ids back to parent ids (new id i corresponds to members[i]).
    pub fn standalone(&self) -> Result<Arc<FiniteGroup>> {
        let m = self.order();
        let pos: HashMap<usize, usize> = self
            .members
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        let mut cayley = vec![0usize; m * m];
        for i in 0..m {
            for j in 0..m {
                let p = self.parent.mul(self.members[i], self.members[j]);
                cayley[i * m + j] = *pos.get(&p).ok_or_else(|| {
                    Error::Invalid(format!("{} is not closed under multiplication", self.name))
                })?;
            }
        }
        let labels = self
            .members
            .iter()
            .map(|&id| self.parent.label(id).to_string())
            .collect();
        FiniteGroup::from_table(
            format!("{}<{}", self.name, self.parent.name),
            cayley,
            labels,
        )
    }
}

/// Closure of the given generators (plus the identity) under multiplication.
pub fn subgroup_from_generators(parent: &Arc<FiniteGroup>, gens: &[usize]) -> Result<Subgroup> {
    for &g in gens {
        parent.check_element(g)?;
    }
    let members = close_under_mul(parent, gens);
    assert!(
        parent.order.is_multiple_of(members.len()),
        "Lagrange violation: subgroup order {} does not divide {}",
        members.len(),
        parent.order
    );
    let name = if gens.is_empty() {
        "<e>".to_string()
    } else {
        format!(
            "<{}>",
            gens.iter()
                .map(|&g| parent.label(g).to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    };
    Ok(Subgroup {
        parent: parent.clone(),
        members,
        name,
    })
}

/// Parse a comma-separated list of element labels into a subgroup.
pub fn subgroup_from_labels(parent: &Arc<FiniteGroup>, labels: &str) -> Result<Subgroup> {
    let labels = labels.trim();
    if labels.is_empty() || labels == "e" {
        return Ok(Subgroup::trivial(parent));
    }
    let ids = labels
        .split(',')
        .map(|l| parent.element_by_label(l))
        .collect::<Result<Vec<_>>>()?;
    subgroup_from_generators(parent, &ids)
}

// ---------------------------------------------------------------------------
// Quotient spaces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuotientKind {
    #[serde(rename = "LEFT")]
    Left,
    #[serde(rename = "RIGHT")]
    Right,
    #[serde(rename = "DOUBLE")]
    Double,
}

impl std::fmt::Display for QuotientKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuotientKind::Left => write!(f, "LEFT"),
            QuotientKind::Right => write!(f, "RIGHT"),
            QuotientKind::Double => write!(f, "DOUBLE"),
        }
    }
}

/// A coset space G/H, H\G, or H\G/K with canonically chosen representatives.
///
/// Points are enumerated in ascending order of their minimal element id, and
/// the representative of each coset is that minimal element.
#[derive(Debug)]
pub struct QuotientSpace {
    pub group: Arc<FiniteGroup>,
    pub kind: QuotientKind,
    pub h: Subgroup,
    pub k: Option<Subgroup>,
    pub points: Vec<Vec<usize>>,
    pub representative: Vec<usize>,
    pub element_to_point: Vec<usize>,
}

impl QuotientSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The coset index of a group element: [g]_X.
    pub fn point_of(&self, g: usize) -> usize {
        self.element_to_point[g]
    }

    pub fn same_as(&self, other: &QuotientSpace) -> bool {
        self.kind == other.kind
            && self.group.name == other.group.name
            && self.h.members == other.h.members
            && self.k.as_ref().map(|k| &k.members) == other.k.as_ref().map(|k| &k.members)
    }
}

/// Enumerate the coset space of the given kind. `k` is required for DOUBLE
/// and ignored otherwise.
pub fn coset_space(
    kind: QuotientKind,
    h: &Subgroup,
    k: Option<&Subgroup>,
) -> Result<Arc<QuotientSpace>> {
    let g = &h.parent;
    if kind == QuotientKind::Double && k.is_none() {
        return Err(Error::KindMismatch(
            "double coset space needs a second subgroup K".into(),
        ));
    }
    if let Some(k) = k {
        if k.parent.name != g.name {
            return Err(Error::GroupMismatch(format!(
                "H lives in {} but K lives in {}",
                g.name, k.parent.name
            )));
        }
    }
    let n = g.order;
    let mut element_to_point = vec![usize::MAX; n];
    let mut points = Vec::new();
    let mut representative = Vec::new();
    for start in 0..n {
        if element_to_point[start] != usize::MAX {
            continue;
        }
        let mut coset: Vec<usize> = match kind {
            QuotientKind::Left => h.members.iter().map(|&m| g.mul(start, m)).collect(),
            QuotientKind::Right => h.members.iter().map(|&m| g.mul(m, start)).collect(),
            QuotientKind::Double => {
                let kk = k.unwrap();
                let mut set = Vec::new();
                for &a in &h.members {
                    let left = g.mul(a, start);
                    for &b in &kk.members {
                        set.push(g.mul(left, b));
                    }
                }
                set.sort_unstable();
                set.dedup();
                set
            }
        };
        coset.sort_unstable();
        coset.dedup();
        let idx = points.len();
        for &e in &coset {
            element_to_point[e] = idx;
        }
        representative.push(start);
        points.push(coset);
    }
    let space = QuotientSpace {
        group: g.clone(),
        kind,
        h: h.clone(),
        k: k.cloned(),
        points,
        representative,
        element_to_point,
    };
    // partition sanity
    let total: usize = space.points.iter().map(|p| p.len()).sum();
    assert_eq!(total, n, "cosets must partition the group");
    if kind != QuotientKind::Double {
        assert_eq!(space.len() * h.order(), n);
    }
    Ok(Arc::new(space))
}

/// The action of g on a point of a LEFT quotient space: g . xH = (g r(x)) H.
pub fn act(g: usize, x: usize, space: &QuotientSpace) -> Result<usize> {
    if space.kind != QuotientKind::Left {
        return Err(Error::KindMismatch(format!(
            "the translation action is defined on LEFT quotients, got {}",
            space.kind
        )));
    }
    space.group.check_element(g)?;
    Ok(space.point_of(space.group.mul(g, space.representative[x])))
}

// ---------------------------------------------------------------------------
// Functions on spaces
// ---------------------------------------------------------------------------

/// Either the group itself or one of its quotients; the index set a
/// function lives on.
#[derive(Debug, Clone)]
pub enum Space {
    Group(Arc<FiniteGroup>),
    Quotient(Arc<QuotientSpace>),
}

impl Space {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        match self {
            Space::Group(g) => g,
            Space::Quotient(q) => &q.group,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Space::Group(g) => g.order,
            Space::Quotient(q) => q.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn same_as(&self, other: &Space) -> bool {
        match (self, other) {
            (Space::Group(a), Space::Group(b)) => a.name == b.name && a.order == b.order,
            (Space::Quotient(a), Space::Quotient(b)) => a.same_as(b),
            _ => false,
        }
    }

    pub fn quotient(&self) -> Option<&Arc<QuotientSpace>> {
        match self {
            Space::Group(_) => None,
            Space::Quotient(q) => Some(q),
        }
    }

    /// Point reached from point `x` under the translation action of `g`.
    /// Defined for the group itself (left multiplication) and LEFT quotients.
    pub fn act(&self, g: usize, x: usize) -> Result<usize> {
        match self {
            Space::Group(grp) => {
                grp.check_element(g)?;
                Ok(grp.mul(g, x))
            }
            Space::Quotient(q) => act(g, x, q),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Space::Group(g) => g.name.clone(),
            Space::Quotient(q) => match q.kind {
                QuotientKind::Left => format!("{}/{}", q.group.name, q.h.name),
                QuotientKind::Right => format!("{}\\{}", q.h.name, q.group.name),
                QuotientKind::Double => format!(
                    "{}\\{}/{}",
                    q.h.name,
                    q.group.name,
                    q.k.as_ref().map(|k| k.name.clone()).unwrap_or_default()
                ),
            },
        }
    }
}

/// A (possibly matrix-valued) function on a group or quotient space.
/// Scalars are 1x1 values, channel rows 1xm, filters m_in x m_out.
#[derive(Debug, Clone)]
pub struct SpaceFunction {
    pub space: Space,
    pub shape: (usize, usize),
    pub values: Vec<CMat>,
}

impl SpaceFunction {
    pub fn zeros(space: Space, shape: (usize, usize)) -> SpaceFunction {
        let n = space.len();
        SpaceFunction {
            space,
            shape,
            values: vec![CMat::zeros(shape.0, shape.1); n],
        }
    }

    pub fn from_values(
        space: Space,
        shape: (usize, usize),
        values: Vec<CMat>,
    ) -> Result<SpaceFunction> {
        if values.len() != space.len() {
            return Err(Error::ShapeMismatch(format!(
                "space has {} points but {} values were given",
                space.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.shape() != shape) {
            return Err(Error::ShapeMismatch(
                "value matrices disagree with the declared shape".into(),
            ));
        }
        Ok(SpaceFunction {
            space,
            shape,
            values,
        })
    }

    /// Scalar indicator of a single point.
    pub fn delta(space: Space, point: usize) -> SpaceFunction {
        let mut f = SpaceFunction::zeros(space, (1, 1));
        f.values[point][(0, 0)] = C::new(1.0, 0.0);
        f
    }

    pub fn constant(space: Space, value: C) -> SpaceFunction {
        let n = space.len();
        SpaceFunction {
            space,
            shape: (1, 1),
            values: vec![CMat::from_element(1, 1, value); n],
        }
    }

    /// Seeded iid complex Gaussian values.
    pub fn random<R: Rng>(space: Space, shape: (usize, usize), rng: &mut R) -> SpaceFunction {
        let n = space.len();
        let values = (0..n)
            .map(|_| {
                CMat::from_fn(shape.0, shape.1, |_, _| {
                    C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
            })
            .collect();
        SpaceFunction {
            space,
            shape,
            values,
        }
    }

    pub fn scalar(&self, point: usize) -> C {
        self.values[point][(0, 0)]
    }

    /// Largest entry-wise difference to another function on the same space.
    pub fn max_diff(&self, other: &SpaceFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| crate::linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(crate::linalg::max_abs)
            .fold(0.0, f64::max)
    }

    /// Apply a closure to every entry of every value matrix.
    pub fn map_entries(&self, f: impl Fn(C) -> C) -> SpaceFunction {
        SpaceFunction {
            space: self.space.clone(),
            shape: self.shape,
            values: self.values.iter().map(|m| m.map(&f)).collect(),
        }
    }
}

/// The translation (T_g f)(x) = f(g^-1 . x); a permutation of the values.
pub fn translate(g: usize, f: &SpaceFunction) -> Result<SpaceFunction> {
    let grp = f.space.group();
    grp.check_element(g)?;
    let ginv = grp.inv(g);
    if let Space::Quotient(q) = &f.space {
        if q.kind != QuotientKind::Left {
            return Err(Error::KindMismatch(
                "translation acts on functions on G or on LEFT quotients".into(),
            ));
        }
    }
    let n = f.space.len();
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        values.push(f.values[f.space.act(ginv, x)?].clone());
    }
    Ok(SpaceFunction {
        space: f.space.clone(),
        shape: f.shape,
        values,
    })
}

/// Lift a quotient-space function to the group: f^G(g) = f([g]_X).
/// Functions already on G are returned unchanged.
pub fn lift(f: &SpaceFunction) -> SpaceFunction {
    match &f.space {
        Space::Group(_) => f.clone(),
        Space::Quotient(q) => {
            let values = (0..q.group.order)
                .map(|u| f.values[q.point_of(u)].clone())
                .collect();
            SpaceFunction {
                space: Space::Group(q.group.clone()),
                shape: f.shape,
                values,
            }
        }
    }
}

/// Project a function on G down to a quotient space by averaging over each
/// coset. Double cosets vary in size, so the average always uses the actual
/// coset size; this makes project . lift the identity on every kind.
pub fn project(f: &SpaceFunction, space: &Arc<QuotientSpace>) -> Result<SpaceFunction> {
    match &f.space {
        Space::Group(g) if g.name == space.group.name => {}
        _ => {
            return Err(Error::GroupMismatch(
                "projection expects a function on the parent group".into(),
            ))
        }
    }
    let values = space
        .points
        .iter()
        .map(|coset| {
            let mut acc = CMat::zeros(f.shape.0, f.shape.1);
            for &e in coset {
                acc += &f.values[e];
            }
            acc.unscale(coset.len() as f64)
        })
        .collect();
    Ok(SpaceFunction {
        space: Space::Quotient(space.clone()),
        shape: f.shape,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn z4_multiplication_and_validation() {
        let g = build_group("Z4").unwrap();
        assert_eq!(g.order, 4);
        assert_eq!(g.mul(1, 3), 0);
        g.validate().unwrap();
    }

    #[test]
    fn s3_has_order_six() {
        let g = build_group("S3").unwrap();
        assert_eq!(g.order, 6);
        g.validate().unwrap();
    }

    #[test]
    fn d4_passes_exhaustive_checks() {
        let g = build_group("D4").unwrap();
        assert_eq!(g.order, 8);
        g.validate().unwrap();
        // s r s = r^-1
        let (r, s) = (1, 4);
        assert_eq!(g.mul(g.mul(s, r), s), g.inv(r));
    }

    #[test]
    fn product_group_mixed_radix() {
        let g = build_group("Z4xZ4").unwrap();
        assert_eq!(g.order, 16);
        g.validate().unwrap();
        assert_eq!(g.label(0), "0|0");
        // (1,2) * (3,3) = (0,1)
        let a = 4 + 2;
        let b = 3 * 4 + 3;
        assert_eq!(g.mul(a, b), 1);
    }

    #[test]
    fn malformed_specs_rejected() {
        assert!(build_group("Q8").is_err());
        assert!(build_group("S7").is_err());
        assert!(build_group("Z0").is_err());
        assert!(build_group("").is_err());
        assert!(build_group("Z4x").is_err());
    }

    #[test]
    fn involution_generates_order_two() {
        let g = build_group("S3").unwrap();
        let t = g.element_by_label("(12)").unwrap();
        let h = subgroup_from_generators(&g, &[t]).unwrap();
        assert_eq!(h.members, vec![0, t]);
    }

    #[test]
    fn empty_generators_give_trivial_subgroup() {
        let g = build_group("D4").unwrap();
        let h = subgroup_from_generators(&g, &[]).unwrap();
        assert_eq!(h.members, vec![0]);
    }

    #[test]
    fn s4_closure_of_transposition_and_three_cycle() {
        // (12) and (123) generate the copy of S3 fixing point 4
        let g = build_group("S4").unwrap();
        let a = g.element_by_label("(12)").unwrap();
        let b = g.element_by_label("(123)").unwrap();
        let h = subgroup_from_generators(&g, &[a, b]).unwrap();
        assert_eq!(h.order(), 6);
        // brute-force closure oracle agrees
        let mut set = std::collections::BTreeSet::from([0, a, b]);
        loop {
            let mut next = set.clone();
            for &x in &set {
                for &y in &set {
                    next.insert(g.mul(x, y));
                }
            }
            if next == set {
                break;
            }
            set = next;
        }
        assert_eq!(h.members, set.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn left_cosets_of_s2_in_s3() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        assert_eq!(x.len(), 3);
        for (i, p) in x.points.iter().enumerate() {
            assert_eq!(p.len(), 2);
            assert_eq!(x.representative[i], p[0]);
        }
    }

    #[test]
    fn double_cosets_of_s2_in_s3() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Double, &h, Some(&h)).unwrap();
        let mut sizes: Vec<usize> = x.points.iter().map(|p| p.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 4]);
    }

    #[test]
    fn trivial_subgroup_quotient_is_the_group() {
        let g = build_group("D4").unwrap();
        let h = Subgroup::trivial(&g);
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        assert_eq!(x.len(), g.order);
        for (i, p) in x.points.iter().enumerate() {
            assert_eq!(p, &vec![i]);
        }
    }

    #[test]
    fn action_is_a_group_action_exhaustively() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        // identity acts trivially
        for p in 0..x.len() {
            assert_eq!(act(0, p, &x).unwrap(), p);
        }
        // T_{g2 g1} = T_{g2} . T_{g1}
        for g1 in 0..g.order {
            for g2 in 0..g.order {
                for p in 0..x.len() {
                    let lhs = act(g.mul(g2, g1), p, &x).unwrap();
                    let rhs = act(g2, act(g1, p, &x).unwrap(), &x).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        // transitivity: the orbit of point 0 is everything
        let orbit: std::collections::BTreeSet<usize> =
            (0..g.order).map(|u| act(u, 0, &x).unwrap()).collect();
        assert_eq!(orbit.len(), x.len());
    }

    #[test]
    fn action_composes_on_generator_pairs_for_larger_groups() {
        // order 64: generator pairs against all elements instead of all pairs
        let g = build_group("Z8xZ8").unwrap();
        let h = subgroup_from_labels(&g, "1|0").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        for &g1 in g.generators() {
            for g2 in 0..g.order {
                for p in 0..x.len() {
                    let lhs = act(g.mul(g1, g2), p, &x).unwrap();
                    let rhs = act(g1, act(g2, p, &x).unwrap(), &x).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let orbit: std::collections::BTreeSet<usize> =
            (0..g.order).map(|u| act(u, 0, &x).unwrap()).collect();
        assert_eq!(orbit.len(), x.len());
    }

    #[test]
    fn three_cycle_moves_base_coset() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let c3 = g.element_by_label("(123)").unwrap();
        assert_eq!(act(c3, 0, &x).unwrap(), x.point_of(c3));
    }

    #[test]
    fn translation_composes_and_fixes_identity() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = SpaceFunction::random(Space::Quotient(x), (1, 1), &mut rng);
        assert_eq!(translate(0, &f).unwrap().max_diff(&f), 0.0);
        for g1 in 0..g.order {
            for g2 in 0..g.order {
                let a = translate(g2, &translate(g1, &f).unwrap()).unwrap();
                let b = translate(g.mul(g2, g1), &f).unwrap();
                assert_eq!(a.max_diff(&b), 0.0);
            }
        }
    }

    #[test]
    fn lift_examples() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let f = SpaceFunction::delta(Space::Quotient(x.clone()), 1);
        let up = lift(&f);
        for u in 0..g.order {
            let expect = if x.point_of(u) == 1 { 1.0 } else { 0.0 };
            assert_eq!(up.scalar(u).re, expect);
        }
        let one = SpaceFunction::constant(Space::Quotient(x), C::new(1.0, 0.0));
        let up1 = lift(&one);
        assert!(up1.values.iter().all(|v| v[(0, 0)].re == 1.0));
    }

    #[test]
    fn lifted_functions_are_right_h_invariant() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SpaceFunction::random(Space::Quotient(x), (1, 1), &mut rng);
        let up = lift(&f);
        for u in 0..g.order {
            for &hh in &h.members {
                assert_eq!(up.scalar(g.mul(u, hh)), up.scalar(u));
            }
        }
    }

    #[test]
    fn project_is_coset_mean_and_inverts_lift() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fq = SpaceFunction::random(Space::Quotient(x.clone()), (1, 1), &mut rng);
        let back = project(&lift(&fq), &x).unwrap();
        assert!(back.max_diff(&fq) < 1e-14);

        let f = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let down = project(&f, &x).unwrap();
        for (i, coset) in x.points.iter().enumerate() {
            let mean: C =
                coset.iter().map(|&e| f.scalar(e)).sum::<C>() / C::new(coset.len() as f64, 0.0);
            assert!((down.scalar(i) - mean).norm() < 1e-14);
        }

        let c = SpaceFunction::constant(Space::Group(g), C::new(2.5, -1.0));
        let dc = project(&c, &x).unwrap();
        assert!(dc
            .values
            .iter()
            .all(|v| (v[(0, 0)] - C::new(2.5, -1.0)).norm() < 1e-15));
    }

    #[test]
    fn double_coset_projection_uses_actual_sizes() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let d = coset_space(QuotientKind::Double, &h, Some(&h)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fq = SpaceFunction::random(Space::Quotient(d.clone()), (1, 1), &mut rng);
        let back = project(&lift(&fq), &d).unwrap();
        assert!(back.max_diff(&fq) < 1e-14);
    }

    #[test]
    fn standalone_subgroup_rebuild() {
        let g = build_group("S4").unwrap();
        let a = g.element_by_label("(12)").unwrap();
        let b = g.element_by_label("(34)").unwrap();
        let h = subgroup_from_generators(&g, &[a, b]).unwrap();
        let sa = h.standalone().unwrap();
        assert_eq!(sa.order, 4);
        sa.validate().unwrap();
    }
}
