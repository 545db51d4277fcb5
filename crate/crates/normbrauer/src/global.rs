//! Global-field layer: place sets Vᵢᵐ, the arithmetic congruence group
//! C_arith(L)/D ≅ Ш²(k, T̂), and the Brauer–Manin pairing evaluator.
//!
//! No places of number fields are ever computed. Unramified places are
//! represented by Frobenius conjugacy classes (each class is hit by
//! infinitely many unramified places, so Vᵢᵐ-intersection questions reduce
//! to Γᵢᵐ-intersection questions), and ramified places enter as
//! user-supplied decomposition groups.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::comb::{brauer_group_from_levels, delta, BrauerGroupResult, CMap, Provenance};
use crate::gamma::GammaTable;
use crate::group::Subgroup;
use crate::tower::TowerSetup;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GlobalError {
    #[error("invariant at ({place}, {index}) has a denominator that is not a power of {p}")]
    MalformedInvariant { place: String, index: usize, p: u64 },
    #[error("place {place} is missing an invariant entry for factor index {index}")]
    MissingEntry { place: String, index: usize },
}

/// A ramified place of k, given by a decomposition group at a chosen place
/// of the Galois closure above it (any conjugate gives the same verdicts).
#[derive(Debug, Clone)]
pub struct RamifiedPlace {
    pub label: String,
    pub decomposition: Subgroup,
}

/// Membership of a ramified place in Vᵢᵐ: some place w of K_i above v has
/// local degree ≥ pᵐ over the corresponding place of k. The places w
/// correspond to (decomposition, G_{K_i}) double cosets, and the degree of
/// K ⊗ (K_i)_w at w is the order of the image of g⁻¹·D·g ∩ G_{K_i} in the
/// cyclic quotient G/G_K.
pub fn v_membership(place: &RamifiedPlace, i: usize, m: usize, setup: &TowerSetup) -> bool {
    let g = &setup.group;
    let target = setup.p_pow(m) as usize;
    (0..g.order).any(|h| {
        let conj = place.decomposition.conjugate(g, h);
        let s = conj.intersect(&setup.factors[i]);
        let fixed = s.intersect(&setup.gk);
        s.order() / fixed.order() >= target
    })
}

/// Ramified membership per (i, m); the unramified part of Vᵢᵐ is Γᵢᵐ.
#[derive(Debug, Clone)]
pub struct VTable {
    pub place_labels: Vec<String>,
    /// `ramified[i][m-1]` = indices of ramified places lying in Vᵢᵐ.
    pub ramified: Vec<Vec<BTreeSet<usize>>>,
}

pub fn build_vtable(setup: &TowerSetup, places: &[RamifiedPlace]) -> VTable {
    let nfac = setup.factors.len();
    let mut ramified = vec![vec![BTreeSet::new(); setup.n]; nfac];
    for (v, place) in places.iter().enumerate() {
        for i in 0..nfac {
            for m in 1..=setup.n {
                if v_membership(place, i, m, setup) {
                    ramified[i][m - 1].insert(v);
                }
            }
            // Degree-at-least conditions nest downward.
            for m in 2..=setup.n {
                if ramified[i][m - 1].contains(&v) {
                    assert!(ramified[i][m - 2].contains(&v));
                }
            }
        }
    }
    VTable { place_labels: places.iter().map(|p| p.label.clone()).collect(), ramified }
}

/// Constraint levels with ramified places taken into account:
/// m_{ij} = max { m : Vᵢᵐ ∩ Vⱼᵐ ≠ ∅ }, the unramified contribution being
/// exactly Γᵢᵐ ∩ Γⱼᵐ ≠ ∅.
pub fn arith_levels(setup: &TowerSetup, gamma: &GammaTable, vtable: &VTable) -> Vec<Vec<usize>> {
    let nfac = setup.factors.len();
    let mut levels = vec![vec![0usize; nfac]; nfac];
    for i in 0..nfac {
        for j in i..nfac {
            let mut best = 0;
            for m in 1..=setup.n {
                let unramified = !gamma.gamma_set(i, m).is_disjoint(gamma.gamma_set(j, m));
                let ram = !vtable.ramified[i][m - 1].is_disjoint(&vtable.ramified[j][m - 1]);
                if unramified || ram {
                    best = m;
                }
            }
            levels[i][j] = best;
            levels[j][i] = best;
        }
    }
    levels
}

/// C_arith(L)/D from Γ plus the supplied ramified places.
pub fn c_arith(
    setup: &TowerSetup,
    gamma: &GammaTable,
    places: &[RamifiedPlace],
) -> BrauerGroupResult {
    let vtable = build_vtable(setup, places);
    let levels = arith_levels(setup, gamma, &vtable);
    let result = brauer_group_from_levels(setup, &levels, Provenance::Combinatorial);
    // More constraints can only shrink the group: |C_arith/D| divides
    // |C(L)/D|.
    let omega = brauer_group_from_levels(setup, &gamma.levels, Provenance::Combinatorial);
    let arith_order: BigInt = result.invariant_factors.iter().product();
    let omega_order: BigInt = omega.invariant_factors.iter().product();
    assert!((&omega_order % &arith_order).is_zero());
    result
}

/// One abstract place together with its Vᵢᵐ membership verdicts.
enum EffectivePlace {
    /// An unramified Frobenius class (stands for infinitely many places).
    Class(usize),
    /// Index into the ramified list.
    Ramified(usize),
}

fn in_v(
    place: &EffectivePlace,
    i: usize,
    m: usize,
    setup: &TowerSetup,
    gamma: &GammaTable,
    vtable: &VTable,
) -> bool {
    if m == 0 {
        return true;
    }
    if m > setup.n {
        return false;
    }
    match place {
        EffectivePlace::Class(cid) => gamma.gamma_set(i, m).contains(cid),
        EffectivePlace::Ramified(v) => vtable.ramified[i][m - 1].contains(v),
    }
}

/// Evaluate both sides of the coefficient-vector criterion and report
/// whether they agree:
/// (a) membership of the associated map in C_arith(L);
/// (b) emptiness of ∩_r ∪_{i ∉ I_r(a)} V_i^{δ(r, a_i)+1} over the
/// effective places (one synthetic place per Frobenius class plus the
/// ramified list).
pub fn g_equivalence_check(
    a: &CMap,
    setup: &TowerSetup,
    gamma: &GammaTable,
    places: &[RamifiedPlace],
) -> bool {
    let vtable = build_vtable(setup, places);
    let levels = arith_levels(setup, gamma, &vtable);

    // Side (a): the pairwise congruences at the binding levels.
    let in_c_arith = (0..a.values.len()).all(|i| {
        (i + 1..a.values.len()).all(|j| {
            let m = levels[i][j];
            m == 0 || {
                let q = setup.p_pow(m);
                a.values[i] % q == a.values[j] % q
            }
        })
    });

    // Side (b): no effective place survives every r.
    let mut effective: Vec<EffectivePlace> =
        (0..gamma.classes.classes.len()).map(EffectivePlace::Class).collect();
    effective.extend((0..places.len()).map(EffectivePlace::Ramified));

    let e_hat_pow = setup.p_pow(setup.e_hat);
    let survives = |place: &EffectivePlace| -> bool {
        // The place is in the intersection iff for EVERY r it lies in the
        // union over i ∉ I_r(a).
        (0..e_hat_pow).all(|r| {
            (0..a.values.len()).any(|i| {
                let ei = setup.e[i][setup.n];
                let in_ir = a.values[i] == r % a.moduli[i];
                if in_ir {
                    return false;
                }
                let d = delta(a.p, r, setup.e_hat, a.values[i], ei);
                in_v(place, i, d + 1, setup, gamma, &vtable)
            })
        })
    };
    let in_g = !effective.iter().any(survives);

    in_c_arith == in_g
}

/// Exact Brauer–Manin pairing α_a(c) = Σ_v Σ_i c(i)·inv(v, i) in Q/Z.
/// `invariants` holds, per place label, one exact rational per factor
/// index; each denominator must be a power of p.
pub fn brauer_manin_pairing(
    c: &CMap,
    invariants: &[(String, Vec<BigRational>)],
) -> Result<BigRational, GlobalError> {
    let nfac = c.values.len();
    let p_big = BigInt::from(c.p);
    let mut total = BigRational::zero();
    for (place, row) in invariants {
        for i in 0..nfac {
            let inv = row.get(i).ok_or_else(|| GlobalError::MissingEntry {
                place: place.clone(),
                index: i,
            })?;
            let mut den = inv.denom().clone();
            while (&den % &p_big).is_zero() {
                den /= &p_big;
            }
            if !den.is_one() {
                return Err(GlobalError::MalformedInvariant {
                    place: place.clone(),
                    index: i,
                    p: c.p,
                });
            }
            total += inv * BigRational::from_integer(BigInt::from(c.values[i]));
        }
    }
    // Reduce into [0, 1).
    let floor = total.floor();
    Ok(total - floor)
}

/// Obstruction verdict: is the pairing nonzero on some generator of
/// C_arith(L)/D?
pub fn obstruction_present(
    result: &BrauerGroupResult,
    invariants: &[(String, Vec<BigRational>)],
) -> Result<bool, GlobalError> {
    for gen in &result.generators {
        if !brauer_manin_pairing(&gen.cmap, invariants)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}
