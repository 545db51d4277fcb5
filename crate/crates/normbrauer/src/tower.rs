//! Subfield-chain setup for a cyclic extension of prime-power degree.
//!
//! From `(G, G_K, {G_{K_i}}, p)` this derives the chain of subgroups
//! `G = G_{K(0)} ⊇ … ⊇ G_{K(n)} = G_K` (one step per power of p), the
//! degree table `e_i(m) = log_p [G_{K_i} : G_{K_i} ∩ G_{K(m)}]`, the
//! partition of the factor indices into blocks by `e_i(n)`, and the
//! splitting of a composite-degree input into its prime-power parts.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::group::{quotient_is_cyclic, subgroup_closure, FiniteGroup, Subgroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("G/G_K is not cyclic")]
    NotCyclic,
    #[error("[G:G_K] = {0} is not a power of {1}")]
    NotPrimePower(usize, usize),
    #[error("[G:G_K] = 1: the base extension is trivial")]
    TrivialExtension,
    #[error("no norm factors given")]
    EmptyFactors,
}

#[derive(Debug, Clone)]
pub struct TowerSetup {
    pub group: FiniteGroup,
    pub gk: Subgroup,
    pub factor_labels: Vec<String>,
    pub factors: Vec<Subgroup>,
    pub p: usize,
    pub n: usize,
    /// `chain[m]` = G_{K(m)}, the subgroup fixing the degree-p^m subfield;
    /// chain[0] = G, chain[n] = gk.
    pub chain: Vec<Subgroup>,
    /// `e[i][m]` = e_i(m); each row starts at 0 and climbs by steps of 0 or 1.
    pub e: Vec<Vec<usize>>,
    /// Partition of factor indices by the terminal degree e_i(n).
    pub blocks: BTreeMap<usize, Vec<usize>>,
    /// ê = max_i e_i(n).
    pub e_hat: usize,
    /// Caller-asserted flag that the field characteristic differs from p.
    pub char_exclusion: bool,
}

impl TowerSetup {
    /// p^k as usize; exponents stay tiny (p^n divides |G| ≤ 512).
    pub fn p_pow(&self, k: usize) -> u64 {
        (self.p as u64).pow(k as u32)
    }

    /// Coordinate modulus p^{e_i(n)} of factor i.
    pub fn modulus(&self, i: usize) -> u64 {
        self.p_pow(self.e[i][self.n])
    }
}

fn log_exact(mut value: usize, base: usize) -> Option<usize> {
    let mut k = 0;
    while value > 1 {
        if value % base != 0 {
            return None;
        }
        value /= base;
        k += 1;
    }
    Some(k)
}

/// Stabilizers of the left G_{K_i}-action on G/G_{K(m)} all equal
/// G_{K_i} ∩ G_{K(m)}; this is what makes the e-table independent of
/// which cyclic factor of K⊗K_i one looks at. Normality of G_{K(m)}
/// guarantees it, and we verify rather than trust.
fn assert_factor_choice_independent(g: &FiniteGroup, gki: &Subgroup, gkm: &Subgroup) {
    let inter = gki.intersect(gkm);
    for x in 0..g.order {
        // Stabilizer of the coset x·G_{K(m)} inside G_{K_i}.
        let stab: Vec<usize> = gki
            .elements
            .iter()
            .copied()
            .filter(|&h| gkm.contains(g.mul(g.inv(x), g.mul(h, x))))
            .collect();
        assert_eq!(stab, inter.elements, "coset stabilizer differs from plain intersection");
    }
}

pub fn build_tower(
    group: &FiniteGroup,
    gk: &Subgroup,
    factors: &[(String, Subgroup)],
    p: usize,
) -> Result<TowerSetup, TowerError> {
    if factors.is_empty() {
        return Err(TowerError::EmptyFactors);
    }
    let (index, gen) = quotient_is_cyclic(group, gk).ok_or(TowerError::NotCyclic)?;
    if index == 1 {
        return Err(TowerError::TrivialExtension);
    }
    let n = log_exact(index, p).ok_or(TowerError::NotPrimePower(index, p))?;

    // G_{K(m)} = preimage of <gen^{p^m}> under G -> G/G_K.
    let mut chain = Vec::with_capacity(n + 1);
    let mut step = gen;
    for m in 0..=n {
        let mut gens = gk.elements.clone();
        gens.push(step);
        let sub = subgroup_closure(group, &gens);
        debug_assert_eq!(group.order / sub.order(), p.pow(m as u32));
        chain.push(sub);
        // step -> step^p for the next level.
        let mut next = step;
        for _ in 1..p {
            next = group.mul(next, step);
        }
        step = next;
    }
    debug_assert!(gk.is_subgroup_of(&chain[n]) && chain[n].order() == gk.order());

    let mut e = Vec::with_capacity(factors.len());
    for (_, gki) in factors {
        let mut row = Vec::with_capacity(n + 1);
        for gkm in &chain {
            let inter = gki.intersect(gkm);
            let idx = gki.order() / inter.order();
            let ei = log_exact(idx, p).expect("subgroup index in a p-tower must be a p-power");
            row.push(ei);
            assert_factor_choice_independent(group, gki, gkm);
        }
        assert_eq!(row[0], 0);
        for m in 1..=n {
            assert!(row[m] == row[m - 1] || row[m] == row[m - 1] + 1, "e-step must be 0 or 1");
        }
        e.push(row);
    }

    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, row) in e.iter().enumerate() {
        blocks.entry(row[n]).or_default().push(i);
    }
    // Within a block the whole e-row agrees, not just its endpoint.
    for idxs in blocks.values() {
        for w in idxs.windows(2) {
            assert_eq!(e[w[0]], e[w[1]], "factors with equal e_i(n) must share the full e-row");
        }
    }
    let e_hat = *blocks.keys().next_back().unwrap();

    Ok(TowerSetup {
        group: group.clone(),
        gk: gk.clone(),
        factor_labels: factors.iter().map(|(l, _)| l.clone()).collect(),
        factors: factors.iter().map(|(_, s)| s.clone()).collect(),
        p,
        n,
        chain,
        e,
        blocks,
        e_hat,
        char_exclusion: true,
    })
}

/// Split a cyclic extension of composite degree into one tower per prime:
/// for each p with p-part p^a of [G:G_K], the unique intermediate subgroup
/// of index p^a serves as the base of a degree-p^a tower over the same
/// factor list. The total answer is the direct sum over the parts.
pub fn prime_power_parts(
    group: &FiniteGroup,
    gk: &Subgroup,
    factors: &[(String, Subgroup)],
) -> Result<Vec<(usize, TowerSetup)>, TowerError> {
    if factors.is_empty() {
        return Err(TowerError::EmptyFactors);
    }
    let (index, gen) = quotient_is_cyclic(group, gk).ok_or(TowerError::NotCyclic)?;
    if index == 1 {
        return Err(TowerError::TrivialExtension);
    }
    let mut parts = Vec::new();
    let mut rest = index;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            let mut a = 0;
            while rest % p == 0 {
                rest /= p;
                a += 1;
            }
            // G_{K[p]} = preimage of <gen^{p^a}>: index exactly p^a.
            let pa = p.pow(a);
            let mut step = group.identity;
            for _ in 0..pa {
                step = group.mul(step, gen);
            }
            let mut gens = gk.elements.clone();
            gens.push(step);
            let gkp = subgroup_closure(group, &gens);
            debug_assert_eq!(group.order / gkp.order(), pa);
            parts.push((p, build_tower(group, &gkp, factors, p)?));
        }
        p += 1;
    }
    Ok(parts)
}
