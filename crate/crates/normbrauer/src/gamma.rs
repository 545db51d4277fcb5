//! Conjugacy-class obstruction sets Γᵢᵐ and the pairwise constraint levels.
//!
//! A class belongs to Γᵢᵐ when some element g of it satisfies
//! ⟨g⟩ ∩ (G_{E_i(n−m)} ∖ G_{E_i(n−m+1)}) ≠ ∅, where
//! G_{E_i(m)} = G_{K_i} ∩ G_{K(m)}. The symmetric table
//! m_{ij} = max{ m : Γᵢᵐ ∩ Γⱼᵐ ≠ ∅ } records, per pair of factors, the
//! strongest congruence the class sets force between coordinates.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::group::{conjugacy_classes, ConjugacyClassTable, Subgroup};
use crate::tower::TowerSetup;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GammaError {
    #[error("degree-p shortcut requires n = 1, got n = {0}")]
    PreconditionViolated(usize),
}

#[derive(Debug, Clone)]
pub struct GammaTable {
    pub classes: ConjugacyClassTable,
    /// `gamma[i][m-1]` = set of conjugacy-class ids in Γᵢᵐ, m = 1..n.
    pub gamma: Vec<Vec<BTreeSet<usize>>>,
    /// `levels[i][j]` = m_{ij}; 0 when no level intersects.
    pub levels: Vec<Vec<usize>>,
}

impl GammaTable {
    pub fn gamma_set(&self, i: usize, m: usize) -> &BTreeSet<usize> {
        &self.gamma[i][m - 1]
    }
}

/// Does ⟨g⟩ meet G_{E_i(n−m)} ∖ G_{E_i(n−m+1)}? The intersections with
/// G_{K_i} are taken elementwise; |⟨g⟩| ≤ |G| so plain iteration suffices.
fn class_in_gamma(setup: &TowerSetup, gki: &Subgroup, g: usize, m: usize) -> bool {
    let lo = &setup.chain[setup.n - m];
    let hi = &setup.chain[setup.n - m + 1];
    setup
        .group
        .cyclic(g)
        .into_iter()
        .any(|x| gki.contains(x) && lo.contains(x) && !hi.contains(x))
}

pub fn compute_gamma(setup: &TowerSetup) -> GammaTable {
    let classes = conjugacy_classes(&setup.group);
    let nfac = setup.factors.len();
    let mut gamma = vec![vec![BTreeSet::new(); setup.n]; nfac];
    for (i, gki) in setup.factors.iter().enumerate() {
        for m in 1..=setup.n {
            let set = &mut gamma[i][m - 1];
            for (cid, class) in classes.classes.iter().enumerate() {
                // Quantified over the whole class: G_{K_i} need not be
                // normal, so single elements of a qualifying class can fail
                // the raw condition.
                if class.iter().any(|&g| class_in_gamma(setup, gki, g, m)) {
                    set.insert(cid);
                }
            }
            // A nonempty level forces the degree jump e_i(n) - e_i(n-m) = m.
            if !set.is_empty() {
                assert!(setup.e[i][setup.n] >= m);
                assert_eq!(setup.e[i][setup.n] - setup.e[i][setup.n - m], m);
            }
        }
    }

    let mut levels = vec![vec![0usize; nfac]; nfac];
    for i in 0..nfac {
        for j in i..nfac {
            let mut best = 0;
            for m in 1..=setup.n {
                if !gamma[i][m - 1].is_disjoint(&gamma[j][m - 1]) {
                    best = m;
                }
            }
            levels[i][j] = best;
            levels[j][i] = best;
        }
    }
    GammaTable { classes, gamma, levels }
}

/// The n = 1 special case: Γᵢ¹ from ⟨g⟩ ∩ (G_{K_i} ∖ G_{K_i} ∩ G_K) ≠ ∅.
/// Used as an agreement check against the general path.
pub fn gamma_for_degree_p(setup: &TowerSetup) -> Result<GammaTable, GammaError> {
    if setup.n != 1 {
        return Err(GammaError::PreconditionViolated(setup.n));
    }
    let classes = conjugacy_classes(&setup.group);
    let nfac = setup.factors.len();
    let mut gamma = vec![vec![BTreeSet::new(); 1]; nfac];
    for (i, gki) in setup.factors.iter().enumerate() {
        let ei = gki.intersect(&setup.gk);
        for (cid, class) in classes.classes.iter().enumerate() {
            let hit = class.iter().any(|&g| {
                setup
                    .group
                    .cyclic(g)
                    .into_iter()
                    .any(|x| gki.contains(x) && !ei.contains(x))
            });
            if hit {
                gamma[i][0].insert(cid);
            }
        }
    }
    let mut levels = vec![vec![0usize; nfac]; nfac];
    for i in 0..nfac {
        for j in i..nfac {
            let m = if gamma[i][0].is_disjoint(&gamma[j][0]) { 0 } else { 1 };
            levels[i][j] = m;
            levels[j][i] = m;
        }
    }
    Ok(GammaTable { classes, gamma, levels })
}
