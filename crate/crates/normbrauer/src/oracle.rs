//! Brute-force group cohomology used to cross-check the congruence answer.
//!
//! For the character lattice M = T̂_{L/k} (the cokernel of the diagonal Z
//! inside ⊕ Z[G/H_j]), this computes H²(G, M) from normalized inhomogeneous
//! cochains and then Ш²_cycl(G, M): the classes restricting to a coboundary
//! on every cyclic subgroup. Only exact integer lattice arithmetic is used:
//! H² is finite and the degree-3 cochain group is torsion-free, so the
//! 2-cocycles are exactly the saturation of the 1-coboundaries and
//! H² = torsion(coker d¹) — no kernel of d² is ever materialized, and the
//! chosen representatives are still verified against d² directly.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::{cyclic_subgroups_up_to_conjugacy, FiniteGroup, Subgroup};
use crate::tower::TowerSetup;
use crate::zlinalg::{
    left_kernel, quotient_structure, saturate, AbelianGroupStructure, IntMatrix, LatticeBasis,
};

pub const DEFAULT_ORACLE_BUDGET: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("group order {order} exceeds the oracle budget {budget}")]
    BudgetExceeded { order: usize, budget: usize },
}

/// A G-lattice: free Z-module with an integral G-action, one matrix per
/// group element acting on column vectors (action[gh] = action[g]·action[h]).
#[derive(Debug, Clone)]
pub struct GLattice {
    pub rank: usize,
    pub action: Vec<IntMatrix>,
    pub labels: Vec<String>,
}

impl GLattice {
    pub fn trivial(rank: usize, group_order: usize) -> Self {
        GLattice {
            rank,
            action: vec![IntMatrix::identity(rank); group_order],
            labels: (0..rank).map(|i| format!("e{i}")).collect(),
        }
    }

    /// Apply the action of element `g` to a vector.
    pub fn act(&self, g: usize, v: &[BigInt]) -> Vec<BigInt> {
        let a = &self.action[g];
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| &a[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// The action must be a homomorphism into GL(rank, Z).
    pub fn verify_action(&self, g: &FiniteGroup) {
        assert_eq!(self.action.len(), g.order);
        for a in 0..g.order {
            for b in 0..g.order {
                assert_eq!(
                    self.action[a].mul(&self.action[b]),
                    self.action[g.mul(a, b)],
                    "action is not a homomorphism"
                );
            }
        }
        for a in 0..g.order {
            let d = self.action[a].det();
            assert!(d == BigInt::one() || d == -BigInt::one(), "action matrix not unimodular");
        }
    }
}

/// Left cosets of `h` in `g`, each as the id of its minimal element; returns
/// (coset representative list, element -> coset position).
fn left_cosets(g: &FiniteGroup, h: &Subgroup) -> (Vec<usize>, Vec<usize>) {
    let mut coset_of = vec![usize::MAX; g.order];
    let mut reps = Vec::new();
    for x in 0..g.order {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for &e in &h.elements {
            coset_of[g.mul(x, e)] = id;
        }
    }
    (reps, coset_of)
}

/// The permutation module Z[G/H].
pub fn permutation_module(g: &FiniteGroup, h: &Subgroup) -> GLattice {
    let (reps, coset_of) = left_cosets(g, h);
    let n = reps.len();
    let mut action = Vec::with_capacity(g.order);
    for a in 0..g.order {
        let mut mat = IntMatrix::zero(n, n);
        for (c, &rep) in reps.iter().enumerate() {
            mat[(coset_of[g.mul(a, rep)], c)] = BigInt::one();
        }
        action.push(mat);
    }
    let labels = reps.iter().map(|&r| format!("[{}]", g.label(r))).collect();
    GLattice { rank: n, action, labels }
}

/// The character lattice T̂_{L/k}: cokernel of the diagonal embedding of Z
/// into Z[G/G_K] ⊕ ⊕ Z[G/G_{K_i}] (1 ↦ sum of every coset basis vector),
/// realized on the basis that drops the final coordinate.
pub fn character_lattice(g: &FiniteGroup, gk: &Subgroup, factors: &[Subgroup]) -> GLattice {
    let mut blocks = vec![gk.clone()];
    blocks.extend(factors.iter().cloned());
    // Permutation of the concatenated coset coordinates, per group element.
    let mut coords: Vec<(Vec<usize>, Vec<usize>)> = Vec::new(); // (reps, coset_of)
    let mut labels_full: Vec<String> = Vec::new();
    for (b, h) in blocks.iter().enumerate() {
        let (reps, coset_of) = left_cosets(g, h);
        for &r in &reps {
            labels_full.push(format!("[{}·H{}]", g.label(r), b));
        }
        coords.push((reps, coset_of));
    }
    let total: usize = coords.iter().map(|(r, _)| r.len()).sum();
    let rank = total - 1;

    let perm_of = |a: usize| -> Vec<usize> {
        let mut perm = Vec::with_capacity(total);
        let mut offset = 0;
        for (reps, coset_of) in &coords {
            for &rep in reps {
                perm.push(offset + coset_of[g.mul(a, rep)]);
            }
            offset += reps.len();
        }
        perm
    };

    let mut action = Vec::with_capacity(g.order);
    for a in 0..g.order {
        let perm = perm_of(a);
        let mut mat = IntMatrix::zero(rank, rank);
        for (k, &img) in perm.iter().take(rank).enumerate() {
            if img < rank {
                mat[(img, k)] = BigInt::one();
            } else {
                // The dropped coordinate satisfies e_last = -Σ others.
                for i in 0..rank {
                    mat[(i, k)] = -BigInt::one();
                }
            }
        }
        action.push(mat);
    }
    GLattice { rank, action, labels: labels_full.into_iter().take(rank).collect() }
}

/// Convenience for the pipeline input shape.
pub fn character_lattice_for(setup: &TowerSetup) -> GLattice {
    character_lattice(&setup.group, &setup.gk, &setup.factors)
}

/// Cochain indexing over the non-identity elements of a chosen subgroup,
/// with coefficients in a G-lattice of rank `r`; degree-k cochains are row
/// vectors of length (s-1)^k · r for subgroup order s.
struct CochainSpace<'a> {
    group: &'a FiniteGroup,
    module: &'a GLattice,
    /// Non-identity elements, ascending.
    elems: Vec<usize>,
    /// Position of each group element in `elems`; usize::MAX for others.
    pos: Vec<usize>,
}

impl<'a> CochainSpace<'a> {
    fn new(group: &'a FiniteGroup, module: &'a GLattice, sub: &[usize]) -> Self {
        let elems: Vec<usize> = sub.iter().copied().filter(|&x| x != group.identity).collect();
        let mut pos = vec![usize::MAX; group.order];
        for (i, &e) in elems.iter().enumerate() {
            pos[e] = i;
        }
        CochainSpace { group, module, elems, pos }
    }

    fn s(&self) -> usize {
        self.elems.len()
    }

    fn r(&self) -> usize {
        self.module.rank
    }

    fn c1_dim(&self) -> usize {
        self.s() * self.r()
    }

    fn c2_dim(&self) -> usize {
        self.s() * self.s() * self.r()
    }

    fn idx2(&self, u: usize, v: usize, j: usize) -> usize {
        (self.pos[u] * self.s() + self.pos[v]) * self.r() + j
    }

    /// The matrix of d¹ acting on row vectors: row (x, j) holds
    /// d(δ_x · e_j)(u, v) = u·f(v) − f(uv) + f(u) over all pairs (u, v).
    fn d1_matrix(&self) -> IntMatrix {
        let r = self.r();
        let mut m = IntMatrix::zero(self.c1_dim(), self.c2_dim());
        for (xi, &x) in self.elems.iter().enumerate() {
            for j in 0..r {
                let row = xi * r + j;
                for &u in &self.elems {
                    // Term u·f(v) at v = x: column block gets column j of
                    // the action matrix of u.
                    let a = &self.module.action[u];
                    for i in 0..r {
                        if !a[(i, j)].is_zero() {
                            let c = self.idx2(u, x, i);
                            let add = a[(i, j)].clone();
                            m[(row, c)] += add;
                        }
                    }
                    // Term +f(u) at u = x.
                    if u == x {
                        for &v in &self.elems {
                            let c = self.idx2(x, v, j);
                            m[(row, c)] += BigInt::one();
                        }
                    }
                    // Term −f(uv) where uv = x (u, v both ≠ e).
                    for &v in &self.elems {
                        if self.group.mul(u, v) == x {
                            let c = self.idx2(u, v, j);
                            m[(row, c)] -= BigInt::one();
                        }
                    }
                }
            }
        }
        m
    }

    /// Value of a degree-2 cochain (row vector) at (u, v); zero when either
    /// argument is the identity (normalization).
    fn eval2(&self, z: &[BigInt], u: usize, v: usize) -> Vec<BigInt> {
        if u == self.group.identity || v == self.group.identity {
            return vec![BigInt::zero(); self.r()];
        }
        let base = (self.pos[u] * self.s() + self.pos[v]) * self.r();
        z[base..base + self.r()].to_vec()
    }

    /// d² applied to a degree-2 cochain:
    /// (dF)(u,v,w) = u·F(v,w) − F(uv,w) + F(u,vw) − F(u,v).
    fn d2_apply(&self, z: &[BigInt]) -> Vec<BigInt> {
        let r = self.r();
        let mut out = Vec::with_capacity(self.s().pow(3) * r);
        for &u in &self.elems {
            for &v in &self.elems {
                for &w in &self.elems {
                    let mut val = self.module.act(u, &self.eval2(z, v, w));
                    let fvw = self.eval2(z, self.group.mul(u, v), w);
                    let fuvw = self.eval2(z, u, self.group.mul(v, w));
                    let fuv = self.eval2(z, u, v);
                    for j in 0..r {
                        val[j] = &val[j] - &fvw[j] + &fuvw[j] - &fuv[j];
                    }
                    out.extend(val);
                }
            }
        }
        out
    }

    /// Restrict a degree-2 cochain on the full group to this subgroup's
    /// index set (self must be a sub-cochain-space of `amb`).
    fn restrict2_from(&self, amb: &CochainSpace, z: &[BigInt]) -> Vec<BigInt> {
        let r = self.r();
        let mut out = Vec::with_capacity(self.c2_dim());
        for &u in &self.elems {
            for &v in &self.elems {
                let base = (amb.pos[u] * amb.s() + amb.pos[v]) * r;
                out.extend_from_slice(&z[base..base + r]);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CocycleClassSet {
    pub c1_dim: usize,
    pub c2_dim: usize,
    pub structure: AbelianGroupStructure,
    /// One degree-2 cocycle (row vector of length c2_dim) per invariant
    /// factor.
    pub representatives: IntMatrix,
    /// The coboundary lattice im d¹ (basis rows in C² coordinates).
    pub coboundaries: LatticeBasis,
}

fn check_budget(g: &FiniteGroup, budget: usize) -> Result<(), OracleError> {
    if g.order > budget {
        return Err(OracleError::BudgetExceeded { order: g.order, budget });
    }
    Ok(())
}

/// H²(G, M) with explicit cocycle representatives.
pub fn h2(g: &FiniteGroup, m: &GLattice, budget: usize) -> Result<CocycleClassSet, OracleError> {
    check_budget(g, budget)?;
    let all: Vec<usize> = (0..g.order).collect();
    let space = CochainSpace::new(g, m, &all);
    let d1 = space.d1_matrix();
    let coboundaries = LatticeBasis::from_generators(space.c2_dim(), d1);
    // H² is finite and C³ is torsion-free, so Z² = saturation(im d¹) and
    // H² = torsion(C²/im d¹).
    let cocycles = saturate(&coboundaries);
    let structure = quotient_structure(&cocycles, &coboundaries)
        .expect("coboundaries sit inside their saturation with full rank");

    // Independent check: every representative really is killed by d², and
    // the exponent divides |G|.
    let order = BigInt::from(g.order as u64);
    for t in 0..structure.invariant_factors.len() {
        assert!(
            (&order % &structure.invariant_factors[t]).is_zero(),
            "cohomology exponent must divide the group order"
        );
        let z = structure.generator_lifts.row(t);
        assert!(
            space.d2_apply(z).iter().all(|x| x.is_zero()),
            "chosen representative is not a 2-cocycle"
        );
    }
    let representatives = structure.generator_lifts.clone();
    Ok(CocycleClassSet {
        c1_dim: space.c1_dim(),
        c2_dim: space.c2_dim(),
        structure,
        representatives,
        coboundaries,
    })
}

/// Ш²_cycl(G, M): the classes of H²(G, M) restricting to a coboundary on
/// every cyclic subgroup (one representative per conjugacy class).
pub fn sha2_cycl(
    g: &FiniteGroup,
    m: &GLattice,
    budget: usize,
) -> Result<AbelianGroupStructure, OracleError> {
    let h = h2(g, m, budget)?;
    let t = h.structure.invariant_factors.len();
    if t == 0 {
        return Ok(AbelianGroupStructure::trivial(0));
    }
    let all: Vec<usize> = (0..g.order).collect();
    let amb = CochainSpace::new(g, m, &all);

    // Coefficient vectors a with Σ a_s z_s globally a coboundary.
    let relations = LatticeBasis::from_generators(
        t,
        IntMatrix::diagonal(&h.structure.invariant_factors),
    );
    let mut kernel = LatticeBasis::full(t);
    for sub in cyclic_subgroups_up_to_conjugacy(g) {
        if sub.order() == 1 {
            continue;
        }
        kernel = lattice_and(&kernel, &subgroup_kernel(g, m, &amb, &h, &sub, t));
    }
    assert!(kernel.contains_lattice(&relations));
    let sha = quotient_structure(&kernel, &relations).expect("relations have full rank");
    let h2_order: BigInt = h.structure.invariant_factors.iter().product();
    assert!((&h2_order % sha.order()).is_zero(), "|Ш²| must divide |H²|");
    Ok(sha)
}

/// Coefficient vectors a ∈ Z^t whose class restricts to a coboundary on
/// `sub`: a·R ∈ rowspace(d¹ of the subgroup), where R collects the
/// restricted representatives.
fn subgroup_kernel(
    g: &FiniteGroup,
    m: &GLattice,
    amb: &CochainSpace,
    h: &CocycleClassSet,
    sub: &Subgroup,
    t: usize,
) -> LatticeBasis {
    let space = CochainSpace::new(g, m, &sub.elements);
    let mut rows: Vec<BigInt> = Vec::new();
    for s in 0..t {
        rows.extend(space.restrict2_from(amb, h.representatives.row(s)));
    }
    let restricted = IntMatrix::new(t, space.c2_dim(), rows);
    let d1_sub = space.d1_matrix();
    let b_rows = d1_sub.rows;
    // (a | b) with a·R + b·d1 = 0: the a-projection is the wanted lattice.
    let ker = left_kernel(&restricted.vstack(&d1_sub));
    let mut out: Vec<BigInt> = Vec::new();
    for i in 0..ker.rank() {
        out.extend_from_slice(&ker.basis.row(i)[..t]);
    }
    let _ = b_rows;
    LatticeBasis::from_generators(t, IntMatrix::new(ker.rank(), t, out))
}

fn lattice_and(a: &LatticeBasis, b: &LatticeBasis) -> LatticeBasis {
    crate::zlinalg::lattice_intersection(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, subgroup_closure, GroupSpec};
    use num_traits::ToPrimitive;

    fn factors_u64(s: &AbelianGroupStructure) -> Vec<u64> {
        s.invariant_factors.iter().map(|f| f.to_u64().unwrap()).collect()
    }

    fn cyclic(n: usize) -> FiniteGroup {
        build_group(&GroupSpec::CyclicProduct { orders: vec![n] }).unwrap()
    }

    fn klein() -> FiniteGroup {
        build_group(&GroupSpec::CyclicProduct { orders: vec![2, 2] }).unwrap()
    }

    #[test]
    fn h2_of_cyclic_groups_with_trivial_coefficients() {
        for n in [2, 3, 4, 6] {
            let g = cyclic(n);
            let m = GLattice::trivial(1, g.order);
            let h = h2(&g, &m, 16).unwrap();
            assert_eq!(factors_u64(&h.structure), vec![n as u64], "H²(Z/{n}, Z)");
        }
    }

    #[test]
    fn h2_of_regular_module_vanishes() {
        for g in [klein(), cyclic(4)] {
            let m = permutation_module(&g, &Subgroup::trivial(&g));
            let h = h2(&g, &m, 16).unwrap();
            assert!(h.structure.is_trivial(), "H²(G, Z[G]) ≠ 0");
        }
    }

    #[test]
    fn h2_of_coset_module_is_subgroup_abelianization() {
        // Z[G/H] is induced from the trivial H-module, so H²(G, Z[G/H]) ≅
        // H²(H, Z) ≅ Hom(H, Q/Z) ≅ H for abelian H.
        let g = klein();
        for word in ["g0", "g1", "g0*g1"] {
            let h_sub = subgroup_closure(&g, &[g.resolve_word(word).unwrap()]);
            let m = permutation_module(&g, &h_sub);
            let h = h2(&g, &m, 16).unwrap();
            assert_eq!(factors_u64(&h.structure), vec![2]);
        }
        let z8 = cyclic(8);
        let h_sub = subgroup_closure(&z8, &[z8.resolve_word("g0^2").unwrap()]);
        let m = permutation_module(&z8, &h_sub);
        let h = h2(&z8, &m, 16).unwrap();
        assert_eq!(factors_u64(&h.structure), vec![4]);
    }

    #[test]
    fn actions_are_homomorphisms() {
        let g = klein();
        let gk = subgroup_closure(&g, &[g.resolve_word("g0").unwrap()]);
        let k1 = subgroup_closure(&g, &[g.resolve_word("g1").unwrap()]);
        let k2 = subgroup_closure(&g, &[g.resolve_word("g0*g1").unwrap()]);
        let m = character_lattice(&g, &gk, &[k1.clone(), k2]);
        assert_eq!(m.rank, 2 + 2 + 2 - 1);
        m.verify_action(&g);
        permutation_module(&g, &k1).verify_action(&g);
    }

    #[test]
    fn character_lattice_of_two_trivial_factors() {
        // L = k × k: both blocks are single cosets, M ≅ Z with trivial
        // action.
        let g = cyclic(3);
        let whole = Subgroup::whole(&g);
        let m = character_lattice(&g, &whole, &[whole.clone()]);
        assert_eq!(m.rank, 1);
        for a in 0..g.order {
            assert_eq!(m.action[a], IntMatrix::identity(1));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = cyclic(8);
        let m = GLattice::trivial(1, g.order);
        assert_eq!(
            h2(&g, &m, 4).unwrap_err(),
            OracleError::BudgetExceeded { order: 8, budget: 4 }
        );
    }

    #[test]
    fn restriction_of_coboundary_is_coboundary() {
        // res ∘ d¹ = d¹ ∘ res as matrices on pseudo-random 1-cochains.
        let g = klein();
        let gk = subgroup_closure(&g, &[g.resolve_word("g0").unwrap()]);
        let k1 = subgroup_closure(&g, &[g.resolve_word("g1").unwrap()]);
        let m = character_lattice(&g, &gk, &[k1.clone()]);
        let all: Vec<usize> = (0..g.order).collect();
        let amb = CochainSpace::new(&g, &m, &all);
        let sub_space = CochainSpace::new(&g, &m, &k1.elements);
        let d1_amb = amb.d1_matrix();
        let d1_sub = sub_space.d1_matrix();
        let mut state = 0x9e3779b9u64;
        for _ in 0..5 {
            let f: Vec<BigInt> = (0..amb.c1_dim())
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    BigInt::from((state >> 33) as i64 % 7 - 3)
                })
                .collect();
            // df, then restrict.
            let df: Vec<BigInt> = (0..amb.c2_dim())
                .map(|c| (0..amb.c1_dim()).map(|r| &f[r] * &d1_amb[(r, c)]).sum())
                .collect();
            let res_df = sub_space.restrict2_from(&amb, &df);
            // Restrict f (as a 1-cochain), then d.
            let res_f: Vec<BigInt> = sub_space
                .elems
                .iter()
                .flat_map(|&u| {
                    let base = amb.pos[u] * amb.r();
                    f[base..base + amb.r()].to_vec()
                })
                .collect();
            let d_res_f: Vec<BigInt> = (0..sub_space.c2_dim())
                .map(|c| (0..sub_space.c1_dim()).map(|r| &res_f[r] * &d1_sub[(r, c)]).sum())
                .collect();
            assert_eq!(res_df, d_res_f);
        }
    }

    #[test]
    fn sha_of_single_cyclic_factor_is_trivial() {
        // L = K alone: the norm-one torus of a cyclic extension.
        for n in [2, 3, 4] {
            let g = cyclic(n);
            let gk = Subgroup::trivial(&g);
            let m = character_lattice(&g, &gk, &[Subgroup::trivial(&g)]);
            let sha = sha2_cycl(&g, &m, 16).unwrap();
            assert!(sha.is_trivial());
        }
    }

    #[test]
    fn sha_of_klein_fixture() {
        let g = klein();
        let gk = subgroup_closure(&g, &[g.resolve_word("g0").unwrap()]);
        let k1 = subgroup_closure(&g, &[g.resolve_word("g1").unwrap()]);
        let k2 = subgroup_closure(&g, &[g.resolve_word("g0*g1").unwrap()]);
        let m = character_lattice(&g, &gk, &[k1, k2]);
        let sha = sha2_cycl(&g, &m, 16).unwrap();
        assert_eq!(factors_u64(&sha), vec![2]);
    }

    #[test]
    fn conjugate_cyclic_subgroups_give_same_kernel() {
        // Dihedral of order 8: reflections come in conjugate pairs; the
        // coefficient lattice from ⟨s⟩ and from ⟨rsr⁻¹⟩ must agree, which
        // justifies restricting to one subgroup per conjugacy class.
        let g = build_group(&GroupSpec::Permutations {
            degree: 4,
            generators: vec![
                ("r".into(), vec![1, 2, 3, 0]),
                ("s".into(), vec![0, 3, 2, 1]),
            ],
        })
        .unwrap();
        let r = g.resolve_word("r").unwrap();
        let s = g.resolve_word("s").unwrap();
        let gk = subgroup_closure(&g, &[r]);
        let k1 = subgroup_closure(&g, &[s]);
        let k2 = subgroup_closure(&g, &[g.mul(r, s)]);
        let m = character_lattice(&g, &gk, &[k1.clone(), k2]);
        let h = h2(&g, &m, 16).unwrap();
        let t = h.structure.invariant_factors.len();
        if t == 0 {
            return;
        }
        let all: Vec<usize> = (0..g.order).collect();
        let amb = CochainSpace::new(&g, &m, &all);
        let conj = k1.conjugate(&g, r);
        let a = subgroup_kernel(&g, &m, &amb, &h, &k1, t);
        let b = subgroup_kernel(&g, &m, &amb, &h, &conj, t);
        assert!(a.contains_lattice(&b) && b.contains_lattice(&a));
    }
}
