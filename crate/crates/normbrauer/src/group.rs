//! Finite groups as explicit multiplication tables: validation, subgroup
//! closure, cosets, conjugacy classes, cyclic subgroups up to conjugacy.

use std::collections::BTreeMap;
use thiserror::Error;

/// Default bound on permutation closures.
pub const DEFAULT_CLOSURE_BOUND: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("permutation closure exceeds bound {0}")]
    ClosureTooLarge(usize),
    #[error("bad generator: {0}")]
    BadGenerator(String),
}

#[derive(Debug, Clone)]
pub enum GroupSpec {
    /// Explicit Cayley table; `table[a][b]` is the index of `a*b`.
    Table { table: Vec<Vec<usize>>, generator_names: BTreeMap<String, usize> },
    /// Permutations of `{0..degree-1}`, given as images.
    Permutations { degree: usize, generators: Vec<(String, Vec<usize>)> },
    /// Direct product of cyclic groups; generators named g0, g1, ...
    CyclicProduct { orders: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub order: usize,
    /// Row-major `order x order` table of element indices.
    table: Vec<usize>,
    pub identity: usize,
    pub inverse: Vec<usize>,
    /// Optional display labels (permutation images or generator words).
    pub labels: Option<Vec<String>>,
    /// Named generators for resolving words from input files.
    pub generator_names: BTreeMap<String, usize>,
}

impl FiniteGroup {
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conj(&self, g: usize, h: usize) -> usize {
        // h g h^-1
        self.mul(self.mul(h, g), self.inv(h))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, g);
            n += 1;
        }
        n
    }

    /// Elements of the cyclic subgroup generated by `g`, in power order.
    pub fn cyclic(&self, g: usize) -> Vec<usize> {
        let mut out = vec![self.identity];
        let mut x = g;
        while x != self.identity {
            out.push(x);
            x = self.mul(x, g);
        }
        out
    }

    pub fn label(&self, g: usize) -> String {
        match &self.labels {
            Some(l) => l[g].clone(),
            None => format!("e{}", g),
        }
    }

    /// Resolve a word over the named generators, e.g. `g0^2*g1` or
    /// `a*b^-1`; factors are applied left to right.
    pub fn resolve_word(&self, word: &str) -> Result<usize, GroupError> {
        let mut acc = self.identity;
        let trimmed = word.trim();
        if trimmed.is_empty() || trimmed == "e" || trimmed == "1" {
            return Ok(acc);
        }
        for token in trimmed.split(|c| c == '*' || c == ' ').filter(|t| !t.is_empty()) {
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| GroupError::BadGenerator(format!("bad exponent in '{token}'")))?;
                    (n, e)
                }
                None => (token, 1),
            };
            let &g = self
                .generator_names
                .get(name)
                .ok_or_else(|| GroupError::BadGenerator(format!("unknown generator '{name}'")))?;
            let base = if exp >= 0 { g } else { self.inv(g) };
            for _ in 0..exp.unsigned_abs() {
                acc = self.mul(acc, base);
            }
        }
        Ok(acc)
    }
}

/// Subgroup as an explicit element set of its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    /// Sorted element indices.
    pub elements: Vec<usize>,
    /// Membership bitmap of length `parent.order`.
    member: Vec<bool>,
}

impl Subgroup {
    fn from_set(order: usize, mut elements: Vec<usize>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let mut member = vec![false; order];
        for &e in &elements {
            member[e] = true;
        }
        Subgroup { elements, member }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.member[g]
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        Subgroup::from_set(g.order, vec![g.identity])
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup::from_set(g.order, (0..g.order).collect())
    }

    pub fn conjugate(&self, g: &FiniteGroup, h: usize) -> Subgroup {
        Subgroup::from_set(g.order, self.elements.iter().map(|&x| g.conj(x, h)).collect())
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let elems: Vec<usize> =
            self.elements.iter().copied().filter(|&e| other.contains(e)).collect();
        Subgroup::from_set(self.member.len(), elems)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }
}

#[derive(Debug, Clone)]
pub struct ConjugacyClassTable {
    pub class_of: Vec<usize>,
    /// Element-index sets, each sorted; representative is the minimum.
    pub classes: Vec<Vec<usize>>,
}

impl ConjugacyClassTable {
    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }
}

fn validate_table(order: usize, table: &[usize]) -> Result<(usize, Vec<usize>), GroupError> {
    // Rows and columns must be permutations.
    for a in 0..order {
        let mut seen_row = vec![false; order];
        let mut seen_col = vec![false; order];
        for b in 0..order {
            let ab = table[a * order + b];
            let ba = table[b * order + a];
            if ab >= order || ba >= order {
                return Err(GroupError::NotAGroup("entry out of range".into()));
            }
            if seen_row[ab] || seen_col[ba] {
                return Err(GroupError::NotAGroup(format!("row or column {a} not a permutation")));
            }
            seen_row[ab] = true;
            seen_col[ba] = true;
        }
    }
    // Identity.
    let identity = (0..order)
        .find(|&e| (0..order).all(|a| table[e * order + a] == a && table[a * order + e] == a))
        .ok_or_else(|| GroupError::NotAGroup("no identity element".into()))?;
    // Inverses.
    let mut inverse = vec![0usize; order];
    for a in 0..order {
        let inv = (0..order)
            .find(|&b| table[a * order + b] == identity && table[b * order + a] == identity)
            .ok_or_else(|| GroupError::NotAGroup(format!("element {a} has no inverse")))?;
        inverse[a] = inv;
    }
    // Associativity.
    for a in 0..order {
        for b in 0..order {
            let ab = table[a * order + b];
            for c in 0..order {
                if table[ab * order + c] != table[a * order + table[b * order + c]] {
                    return Err(GroupError::NotAGroup(format!(
                        "associativity fails at ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    Ok((identity, inverse))
}

fn perm_label(perm: &[usize]) -> String {
    // Cycle notation on moved points.
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || perm[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut x = perm[start];
        while x != start {
            seen[x] = true;
            cyc.push(x);
            x = perm[x];
        }
        out.push('(');
        out.push_str(&cyc.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup, GroupError> {
    build_group_bounded(spec, DEFAULT_CLOSURE_BOUND)
}

pub fn build_group_bounded(spec: &GroupSpec, closure_bound: usize) -> Result<FiniteGroup, GroupError> {
    match spec {
        GroupSpec::Table { table, generator_names } => {
            let order = table.len();
            if order == 0 {
                return Err(GroupError::NotAGroup("empty table".into()));
            }
            let mut flat = Vec::with_capacity(order * order);
            for row in table {
                if row.len() != order {
                    return Err(GroupError::NotAGroup("table not square".into()));
                }
                flat.extend_from_slice(row);
            }
            let (identity, inverse) = validate_table(order, &flat)?;
            for (name, &g) in generator_names {
                if g >= order {
                    return Err(GroupError::BadGenerator(format!("'{name}' out of range")));
                }
            }
            Ok(FiniteGroup {
                order,
                table: flat,
                identity,
                inverse,
                labels: None,
                generator_names: generator_names.clone(),
            })
        }
        GroupSpec::Permutations { degree, generators } => {
            let n = *degree;
            for (name, p) in generators {
                let mut seen = vec![false; n];
                if p.len() != n {
                    return Err(GroupError::BadGenerator(format!("'{name}' has wrong degree")));
                }
                for &img in p {
                    if img >= n || seen[img] {
                        return Err(GroupError::BadGenerator(format!("'{name}' not a permutation")));
                    }
                    seen[img] = true;
                }
            }
            // Breadth-first closure, deterministic: generator index order,
            // then discovery order.
            let id: Vec<usize> = (0..n).collect();
            let mut elements: Vec<Vec<usize>> = vec![id.clone()];
            let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            index.insert(id, 0);
            let mut frontier = 0usize;
            while frontier < elements.len() {
                let cur = elements[frontier].clone();
                for (_, p) in generators {
                    let prod: Vec<usize> = (0..n).map(|x| p[cur[x]]).collect();
                    if !index.contains_key(&prod) {
                        if elements.len() >= closure_bound {
                            return Err(GroupError::ClosureTooLarge(closure_bound));
                        }
                        index.insert(prod.clone(), elements.len());
                        elements.push(prod);
                    }
                }
                frontier += 1;
            }
            let order = elements.len();
            let mut table = vec![0usize; order * order];
            for a in 0..order {
                for b in 0..order {
                    let prod: Vec<usize> = (0..n).map(|x| elements[a][elements[b][x]]).collect();
                    table[a * order + b] = index[&prod];
                }
            }
            let (identity, inverse) = validate_table(order, &table)?;
            let labels = elements.iter().map(|p| perm_label(p)).collect();
            let mut generator_names = BTreeMap::new();
            for (name, p) in generators {
                generator_names.insert(name.clone(), index[p]);
            }
            Ok(FiniteGroup { order, table, identity, inverse, labels: Some(labels), generator_names })
        }
        GroupSpec::CyclicProduct { orders } => {
            if orders.iter().any(|&o| o == 0) {
                return Err(GroupError::NotAGroup("cyclic factor of order 0".into()));
            }
            let order: usize = orders.iter().product();
            if order == 0 || order > DEFAULT_CLOSURE_BOUND {
                return Err(GroupError::ClosureTooLarge(DEFAULT_CLOSURE_BOUND));
            }
            // Mixed-radix encoding, last factor fastest.
            let k = orders.len();
            let decode = |mut idx: usize| -> Vec<usize> {
                let mut v = vec![0usize; k];
                for i in (0..k).rev() {
                    v[i] = idx % orders[i];
                    idx /= orders[i];
                }
                v
            };
            let encode = |v: &[usize]| -> usize {
                let mut idx = 0usize;
                for i in 0..k {
                    idx = idx * orders[i] + v[i];
                }
                idx
            };
            let mut table = vec![0usize; order * order];
            for a in 0..order {
                let va = decode(a);
                for b in 0..order {
                    let vb = decode(b);
                    let vc: Vec<usize> =
                        (0..k).map(|i| (va[i] + vb[i]) % orders[i]).collect();
                    table[a * order + b] = encode(&vc);
                }
            }
            let (identity, inverse) = validate_table(order, &table)?;
            let labels = (0..order)
                .map(|a| {
                    let v = decode(a);
                    let parts: Vec<String> = v
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e != 0)
                        .map(|(i, &e)| if e == 1 { format!("g{i}") } else { format!("g{i}^{e}") })
                        .collect();
                    if parts.is_empty() {
                        "e".to_string()
                    } else {
                        parts.join("*")
                    }
                })
                .collect();
            let mut generator_names = BTreeMap::new();
            for i in 0..k {
                let mut v = vec![0usize; k];
                if orders[i] > 1 {
                    v[i] = 1;
                }
                generator_names.insert(format!("g{i}"), encode(&v));
            }
            Ok(FiniteGroup { order, table, identity, inverse, labels: Some(labels), generator_names })
        }
    }
}

/// Smallest subgroup containing the given elements.
pub fn subgroup_closure(g: &FiniteGroup, gens: &[usize]) -> Subgroup {
    let mut member = vec![false; g.order];
    member[g.identity] = true;
    let mut elems = vec![g.identity];
    let mut frontier = 0usize;
    while frontier < elems.len() {
        let cur = elems[frontier];
        for &gen in gens {
            for next in [g.mul(cur, gen), g.mul(cur, g.inv(gen))] {
                if !member[next] {
                    member[next] = true;
                    elems.push(next);
                }
            }
        }
        frontier += 1;
    }
    Subgroup::from_set(g.order, elems)
}

pub fn conjugacy_classes(g: &FiniteGroup) -> ConjugacyClassTable {
    let mut class_of = vec![usize::MAX; g.order];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for start in 0..g.order {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut class = Vec::new();
        for h in 0..g.order {
            let c = g.conj(start, h);
            if class_of[c] == usize::MAX {
                class_of[c] = id;
                class.push(c);
            }
        }
        class.sort_unstable();
        classes.push(class);
    }
    ConjugacyClassTable { class_of, classes }
}

/// One representative per conjugacy class of cyclic subgroups.
pub fn cyclic_subgroups_up_to_conjugacy(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut canonical: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for e in 0..g.order {
        let sub = {
            let mut s = g.cyclic(e);
            s.sort_unstable();
            s
        };
        // Canonical form: lexicographically smallest conjugate element set.
        let mut best = sub.clone();
        for h in 0..g.order {
            let mut conj: Vec<usize> = sub.iter().map(|&x| g.conj(x, h)).collect();
            conj.sort_unstable();
            if conj < best {
                best = conj;
            }
        }
        canonical.entry(best.clone()).or_insert(best);
    }
    let mut subs: Vec<Subgroup> =
        canonical.into_values().map(|s| Subgroup::from_set(g.order, s)).collect();
    subs.sort_by_key(|s| (s.order(), s.elements.clone()));
    subs
}

pub fn is_normal(g: &FiniteGroup, h: &Subgroup) -> bool {
    (0..g.order).all(|x| h.elements.iter().all(|&e| h.contains(g.conj(e, x))))
}

/// If `h` is normal and `G/h` is cyclic, return the quotient order and the
/// minimal element generating a generator coset.
pub fn quotient_is_cyclic(g: &FiniteGroup, h: &Subgroup) -> Option<(usize, usize)> {
    if !is_normal(g, h) {
        return None;
    }
    let index = g.order / h.order();
    // Coset of x has order index iff the smallest k>0 with x^k in h is index.
    let coset_order = |x: usize| -> usize {
        let mut acc = x;
        let mut k = 1;
        while !h.contains(acc) {
            acc = g.mul(acc, x);
            k += 1;
        }
        k
    };
    (0..g.order).find(|&x| coset_order(x) == index).map(|x| (index, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn klein() -> FiniteGroup {
        build_group(&GroupSpec::CyclicProduct { orders: vec![2, 2] }).unwrap()
    }

    fn s3() -> FiniteGroup {
        build_group(&GroupSpec::Permutations {
            degree: 3,
            generators: vec![
                ("s".into(), vec![1, 0, 2]),
                ("r".into(), vec![1, 2, 0]),
            ],
        })
        .unwrap()
    }

    #[test]
    fn klein_four_from_orders() {
        let g = klein();
        assert_eq!(g.order, 4);
        assert!((0..4).all(|x| g.mul(x, x) == g.identity));
    }

    #[test]
    fn klein_four_from_permutations() {
        let g = build_group(&GroupSpec::Permutations {
            degree: 4,
            generators: vec![
                ("a".into(), vec![1, 0, 2, 3]),
                ("b".into(), vec![0, 1, 3, 2]),
            ],
        })
        .unwrap();
        assert_eq!(g.order, 4);
        assert!((0..4).all(|x| g.mul(x, x) == g.identity));
    }

    #[test]
    fn non_associative_rejected() {
        // Latin square that is not a group table (order 5 loop).
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = build_group(&GroupSpec::Table { table, generator_names: BTreeMap::new() });
        assert!(matches!(err, Err(GroupError::NotAGroup(_))));
    }

    #[test]
    fn closure_examples() {
        let g = klein();
        assert_eq!(subgroup_closure(&g, &[]).elements, vec![g.identity]);
        let a = g.resolve_word("g0").unwrap();
        assert_eq!(subgroup_closure(&g, &[a]).order(), 2);

        let z8 = build_group(&GroupSpec::CyclicProduct { orders: vec![8] }).unwrap();
        let s2 = z8.resolve_word("g0^2").unwrap();
        let h = subgroup_closure(&z8, &[s2]);
        assert_eq!(h.order(), 4);
        assert!(h.contains(z8.resolve_word("g0^6").unwrap()));
    }

    #[test]
    fn conjugacy_classes_abelian_singletons() {
        let g = klein();
        let t = conjugacy_classes(&g);
        assert_eq!(t.classes.len(), 4);
        assert!(t.classes.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn conjugacy_classes_s3() {
        let g = s3();
        let t = conjugacy_classes(&g);
        let mut sizes: Vec<usize> = t.classes.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        let total: usize = t.classes.iter().map(|c| c.len()).sum();
        assert_eq!(total, g.order);
    }

    #[test]
    fn conjugacy_classes_trivial_group() {
        let g = build_group(&GroupSpec::CyclicProduct { orders: vec![1] }).unwrap();
        let t = conjugacy_classes(&g);
        assert_eq!(t.classes.len(), 1);
    }

    #[test]
    fn cyclic_subgroups_klein() {
        let g = klein();
        let subs = cyclic_subgroups_up_to_conjugacy(&g);
        assert_eq!(subs.len(), 4); // trivial + three order-2
        assert_eq!(subs.iter().filter(|s| s.order() == 2).count(), 3);
    }

    #[test]
    fn cyclic_subgroups_z4() {
        let g = build_group(&GroupSpec::CyclicProduct { orders: vec![4] }).unwrap();
        let subs = cyclic_subgroups_up_to_conjugacy(&g);
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 4]);
    }

    #[test]
    fn cyclic_subgroups_s3() {
        let g = s3();
        let subs = cyclic_subgroups_up_to_conjugacy(&g);
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 3]);
        // Coverage: every element's generated subgroup is conjugate to one listed.
        for e in 0..g.order {
            let mut gen = g.cyclic(e);
            gen.sort_unstable();
            let covered = subs.iter().any(|s| {
                (0..g.order).any(|h| {
                    let mut c: Vec<usize> = s.elements.iter().map(|&x| g.conj(x, h)).collect();
                    c.sort_unstable();
                    c == gen
                })
            });
            assert!(covered);
        }
    }

    #[test]
    fn normality_and_cyclic_quotients() {
        let g = klein();
        let a = g.resolve_word("g0").unwrap();
        let h = subgroup_closure(&g, &[a]);
        assert!(is_normal(&g, &h));
        let (order, _) = quotient_is_cyclic(&g, &h).unwrap();
        assert_eq!(order, 2);

        let s = s3();
        let t = s.resolve_word("s").unwrap();
        let h2 = subgroup_closure(&s, &[t]);
        assert!(!is_normal(&s, &h2));

        let g44 = build_group(&GroupSpec::CyclicProduct { orders: vec![4, 4] }).unwrap();
        let h3 = subgroup_closure(&g44, &[g44.resolve_word("g0").unwrap()]);
        let (order, gen) = quotient_is_cyclic(&g44, &h3).unwrap();
        assert_eq!(order, 4);
        assert!(!h3.contains(gen));
    }

    #[test]
    fn word_resolution() {
        let g = build_group(&GroupSpec::CyclicProduct { orders: vec![4, 4] }).unwrap();
        let x = g.resolve_word("g0^2*g1^3").unwrap();
        let y = g.mul(
            g.mul(g.resolve_word("g0").unwrap(), g.resolve_word("g0").unwrap()),
            g.inv(g.resolve_word("g1").unwrap()),
        );
        assert_eq!(x, y);
        assert!(g.resolve_word("zz").is_err());
    }
}
