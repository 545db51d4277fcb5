//! The congruence group C(L)/D.
//!
//! Coordinate maps c : I → ⊕ Z/p^{e_i(n)} are constrained by pairwise
//! congruences c(i) ≡ c(j) mod p^{m_ij} read off the Γ tables; C(L) is the
//! subgroup of maps satisfying them all, D is the image of the constant
//! maps, and the answer Br(X_a^c)/Im Br(k) ≅ C(L)/D comes out as an
//! invariant-factor decomposition with explicit generator lifts.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::GammaTable;
use crate::tower::TowerSetup;
use crate::zlinalg::{congruence_lattice, quotient_structure, IntMatrix, LatticeBasis};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombError {
    #[error("the map is constant modulo the coordinate moduli")]
    ConstantMap,
    #[error("the map violates a level-{level} congruence between coordinates {i} and {j}")]
    CongruenceViolated { i: usize, j: usize, level: usize },
}

/// A coordinate map c with c(i) canonical in [0, p^{e_i(n)}).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CMap {
    pub p: u64,
    pub values: Vec<u64>,
    pub moduli: Vec<u64>,
}

impl CMap {
    pub fn new(p: u64, values: Vec<u64>, moduli: Vec<u64>) -> Self {
        assert_eq!(values.len(), moduli.len());
        let values = values.iter().zip(&moduli).map(|(v, m)| v % m).collect();
        CMap { p, values, moduli }
    }

    pub fn from_lift(setup: &TowerSetup, lift: &[BigInt]) -> Self {
        let moduli: Vec<u64> = (0..lift.len()).map(|i| setup.modulus(i)).collect();
        let values = lift
            .iter()
            .zip(&moduli)
            .map(|(x, &m)| {
                let m_big = BigInt::from(m);
                let mut r = x % &m_big;
                if r.is_negative() {
                    r += &m_big;
                }
                r.to_u64().unwrap()
            })
            .collect();
        CMap { p: setup.p as u64, values, moduli }
    }

    /// Coordinatewise difference, each coordinate mod its own modulus.
    pub fn sub(&self, other: &CMap) -> CMap {
        assert_eq!(self.moduli, other.moduli);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.moduli)
            .map(|((a, b), m)| (a + m - b) % m)
            .collect();
        CMap { p: self.p, values, moduli: self.moduli.clone() }
    }

    /// Is this the image of a constant map I → Z/pⁿ?
    pub fn is_constant(&self) -> bool {
        // Reducing any common lift coordinatewise: equivalent to agreeing
        // with the coordinate of largest modulus everywhere.
        let Some(i0) = (0..self.values.len()).max_by_key(|&i| self.moduli[i]) else {
            return true;
        };
        self.values.iter().zip(&self.moduli).all(|(&v, &m)| v == self.values[i0] % m)
    }

    /// Indices where the map differs from the constant extension of its
    /// value on the reference coordinate `i0`.
    pub fn support(&self, i0: usize) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] != self.values[i0] % self.moduli[i])
            .collect()
    }
}

/// Largest d ≤ min(m, r) with x ≡ y mod p^d, for x mod p^m and y mod p^r.
pub fn delta(p: u64, x: u64, m: usize, y: u64, r: usize) -> usize {
    let mut d = 0;
    let mut q = 1u64;
    while d < m.min(r) {
        q *= p;
        if x % q != y % q {
            break;
        }
        d += 1;
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Combinatorial,
    Oracle,
    Both,
}

/// One symbolic term c(i)·(N_i, χ) of a generator expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionTerm {
    pub index: usize,
    pub coefficient: u64,
    pub label: String,
    pub order_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorExpression {
    pub terms: Vec<ExpressionTerm>,
}

impl GeneratorExpression {
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|t| format!("{}·{}", t.coefficient, t.label))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub prime: u64,
    pub cmap: CMap,
    pub expression: GeneratorExpression,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrauerGroupResult {
    /// Invariant factors d₁ | d₂ | …, each ≥ 2.
    pub invariant_factors: Vec<BigInt>,
    pub generators: Vec<GeneratorEntry>,
    pub provenance: Provenance,
}

impl BrauerGroupResult {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

/// The lattice K̃ = { x ∈ Z^I : x_i ≡ x_j mod p^{m_ij} } together with the
/// coordinate moduli p^{e_i(n)}; C(L) = K̃ / diag(moduli)·Z^I.
pub fn build_cl_lattice(setup: &TowerSetup, gamma: &GammaTable) -> (LatticeBasis, Vec<u64>) {
    let nfac = setup.factors.len();
    let moduli: Vec<u64> = (0..nfac).map(|i| setup.modulus(i)).collect();
    let mut rows: Vec<BigInt> = Vec::new();
    let mut row_moduli: Vec<BigInt> = Vec::new();
    for i in 0..nfac {
        for j in i + 1..nfac {
            let m = gamma.levels[i][j];
            if m >= 1 {
                let mut row = vec![BigInt::zero(); nfac];
                row[i] = BigInt::one();
                row[j] = -BigInt::one();
                rows.extend(row);
                row_moduli.push(BigInt::from(setup.p_pow(m)));
            }
        }
    }
    let conditions = IntMatrix::new(row_moduli.len(), nfac, rows);
    (congruence_lattice(&conditions, &row_moduli), moduli)
}

/// The denominator lattice diag(p^{e_i(n)})·Z^I + Z·(1,…,1), whose quotient
/// class group inside C(L) is the image of the constant maps.
pub fn build_d(setup: &TowerSetup) -> LatticeBasis {
    let nfac = setup.factors.len();
    let mut rows: Vec<BigInt> = vec![BigInt::one(); nfac];
    for i in 0..nfac {
        let mut row = vec![BigInt::zero(); nfac];
        row[i] = BigInt::from(setup.modulus(i));
        rows.extend(row);
    }
    LatticeBasis::from_generators(nfac, IntMatrix::new(nfac + 1, nfac, rows))
}

/// Index [Z^n : L] of a full-rank sublattice: product of HNF pivots.
fn lattice_index(l: &LatticeBasis) -> BigInt {
    assert_eq!(l.rank(), l.ambient_rank, "index of a non-full-rank lattice");
    l.pivot_cols()
        .iter()
        .enumerate()
        .map(|(r, &c)| l.basis[(r, c)].abs())
        .product()
}

/// Does the map satisfy every congruence constraint of C(L)?
pub fn check_in_cl(c: &CMap, setup: &TowerSetup, gamma: &GammaTable) -> Result<(), CombError> {
    for i in 0..c.values.len() {
        for j in i + 1..c.values.len() {
            let m = gamma.levels[i][j];
            if m >= 1 {
                let q = setup.p_pow(m);
                if c.values[i] % q != c.values[j] % q {
                    return Err(CombError::CongruenceViolated { i, j, level: m });
                }
            }
        }
    }
    Ok(())
}

fn reference_index(setup: &TowerSetup) -> usize {
    (0..setup.factors.len())
        .find(|&i| setup.e[i][setup.n] == setup.e_hat)
        .expect("some factor attains the maximal degree")
}

/// Symbolic expression Σ c(i)·(N_i, χ) for a generator, normalized by a
/// constant so that the reference coordinate (in the top block) vanishes.
fn expression_for(setup: &TowerSetup, c: &CMap) -> GeneratorExpression {
    let i0 = reference_index(setup);
    let terms = (0..c.values.len())
        .filter_map(|i| {
            let m = c.moduli[i];
            let coeff = (c.values[i] + m - c.values[i0] % m) % m;
            (coeff != 0).then(|| ExpressionTerm {
                index: i,
                coefficient: coeff,
                label: format!("(N_{{{}}}, χ)", setup.factor_labels[i]),
                order_bound: m,
            })
        })
        .collect();
    GeneratorExpression { terms }
}

/// C(L)/D with generator lifts, from the Γ constraint table.
pub fn brauer_group(setup: &TowerSetup, gamma: &GammaTable) -> BrauerGroupResult {
    brauer_group_from_levels(setup, &gamma.levels, Provenance::Combinatorial)
}

/// Shared quotient machinery; `levels` may be the Γ table itself or the
/// strengthened table of the global layer.
pub fn brauer_group_from_levels(
    setup: &TowerSetup,
    levels: &[Vec<usize>],
    provenance: Provenance,
) -> BrauerGroupResult {
    let nfac = setup.factors.len();
    let moduli: Vec<u64> = (0..nfac).map(|i| setup.modulus(i)).collect();
    let mut rows: Vec<BigInt> = Vec::new();
    let mut row_moduli: Vec<BigInt> = Vec::new();
    for i in 0..nfac {
        for j in i + 1..nfac {
            let m = levels[i][j];
            if m >= 1 {
                let mut row = vec![BigInt::zero(); nfac];
                row[i] = BigInt::one();
                row[j] = -BigInt::one();
                rows.extend(row);
                row_moduli.push(BigInt::from(setup.p_pow(m)));
            }
        }
    }
    let conditions = IntMatrix::new(row_moduli.len(), nfac, rows);
    let numerator = congruence_lattice(&conditions, &row_moduli);
    let denominator = build_d(setup);
    assert!(
        numerator.contains_lattice(&denominator),
        "constant maps must satisfy every congruence"
    );

    let structure = quotient_structure(&numerator, &denominator).expect("full-rank quotient");

    // |C(L)/D| = |C(L)| / |D| with both sides computed independently:
    // |C(L)| = ∏ p^{e_i(n)} / [Z^I : K̃] and |D| = p^ê.
    let coord_order: BigInt = moduli.iter().map(|&m| BigInt::from(m)).product();
    let cl_order = &coord_order / lattice_index(&numerator);
    let d_order = BigInt::from(setup.p_pow(setup.e_hat));
    assert_eq!(&coord_order / lattice_index(&denominator), d_order);
    let order: BigInt = structure.invariant_factors.iter().product();
    assert_eq!(order * &d_order, cl_order);

    let mut generators = Vec::new();
    for r in 0..structure.invariant_factors.len() {
        let cmap = CMap::from_lift(setup, structure.generator_lifts.row(r));
        // Replay the congruence constraints on the reduced lift.
        for i in 0..nfac {
            for j in i + 1..nfac {
                let m = levels[i][j];
                if m >= 1 {
                    let q = setup.p_pow(m);
                    assert_eq!(cmap.values[i] % q, cmap.values[j] % q);
                }
            }
        }
        let expression = expression_for(setup, &cmap);
        generators.push(GeneratorEntry { prime: setup.p as u64, cmap, expression });
    }
    BrauerGroupResult {
        invariant_factors: structure.invariant_factors,
        generators,
        provenance,
    }
}

/// Direct sum over the prime-power parts of one configuration, with the
/// concatenated invariant factors renormalized to a divisibility chain.
pub fn compose_prime_parts(parts: &[(usize, BrauerGroupResult)]) -> BrauerGroupResult {
    // Per prime: exponent lists sorted descending, then position-wise
    // products across primes form the chain from the top down.
    let mut per_prime: Vec<(usize, Vec<u32>)> = Vec::new();
    for (p, part) in parts {
        let p_big = BigInt::from(*p);
        let mut exps: Vec<u32> = part
            .invariant_factors
            .iter()
            .map(|f| {
                let mut v = f.clone();
                let mut e = 0u32;
                while (&v % &p_big).is_zero() && v > BigInt::one() {
                    v /= &p_big;
                    e += 1;
                }
                assert!(v.is_one(), "per-prime part has a factor not a power of its prime");
                e
            })
            .collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push((*p, exps));
    }
    let len = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut chain: Vec<BigInt> = (0..len)
        .map(|k| {
            per_prime
                .iter()
                .map(|(p, e)| BigInt::from(*p).pow(e.get(k).copied().unwrap_or(0)))
                .product()
        })
        .collect();
    chain.reverse();

    let generators = parts.iter().flat_map(|(_, r)| r.generators.iter().cloned()).collect();
    BrauerGroupResult {
        invariant_factors: chain,
        generators,
        provenance: parts
            .first()
            .map(|(_, r)| r.provenance)
            .unwrap_or(Provenance::Combinatorial),
    }
}

/// The support-shrinking rewrite c ↦ c′: c′ agrees with c exactly on the
/// coordinates whose p-adic distance from the reference value is critical,
/// and is constant elsewhere. Guarantees c′ ∈ C(L)∖D and that c − c′ has
/// strictly smaller support, which is the induction step for expressing any
/// class as a sum of one-block pieces.
pub fn normalize_c(
    c: &CMap,
    setup: &TowerSetup,
    gamma: &GammaTable,
) -> Result<CMap, CombError> {
    check_in_cl(c, setup, gamma)?;
    if c.is_constant() {
        return Err(CombError::ConstantMap);
    }
    let p = setup.p as u64;
    let n = setup.n;
    let e_hat = setup.e_hat;
    let i0 = reference_index(setup);

    // Largest l with the level-l projection of c constant: per coordinate,
    // agreement mod p^{e_i(n) - e_i(n-l)}.
    let mut m = 0;
    for l in (0..=n).rev() {
        let ok = (0..c.values.len()).all(|i| {
            let d = setup.e[i][n] - setup.e[i][n - l];
            let q = setup.p_pow(d);
            c.values[i] % q == c.values[i0] % q
        });
        if ok {
            m = l;
            break;
        }
    }
    assert!(m < e_hat, "a map constant at level ê is constant outright");

    // Coordinates at critical distance; nonempty since c is nonconstant.
    let critical: Vec<usize> = (0..c.values.len())
        .filter(|&i| {
            setup.e[i][n] > m
                && delta(p, c.values[i], setup.e[i][n], c.values[i0], e_hat) == m
        })
        .collect();
    let j = *critical.first().expect("a nonconstant map has a critical coordinate");
    // r: a value at distance exactly m from c(i0); the value of c at a
    // critical coordinate works and makes c′ reproduce c there.
    let r = c.values[j];
    debug_assert_eq!(delta(p, r, e_hat, c.values[i0], e_hat), m);

    let values = (0..c.values.len())
        .map(|i| {
            if critical.contains(&i) {
                r % c.moduli[i]
            } else {
                c.values[i0] % c.moduli[i]
            }
        })
        .collect();
    let c_prime = CMap { p, values, moduli: c.moduli.clone() };

    check_in_cl(&c_prime, setup, gamma).expect("rewritten map must stay in C(L)");
    assert!(!c_prime.is_constant(), "rewritten map must stay outside D");
    let before = c.support(i0).len();
    let after = c.sub(&c_prime).support(i0).len();
    assert!(after < before, "support must strictly shrink");
    Ok(c_prime)
}
