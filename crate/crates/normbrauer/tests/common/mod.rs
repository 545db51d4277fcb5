//! Shared fixtures and property-suite bodies used by both the standalone
//! property tests and the acceptance gate.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use normbrauer::comb::CMap;
use normbrauer::config::JobConfig;
use normbrauer::gamma::compute_gamma;
use normbrauer::global::{c_arith, g_equivalence_check, RamifiedPlace};
use normbrauer::group::{
    build_group, subgroup_closure, FiniteGroup, GroupSpec, Subgroup,
};
use normbrauer::tower::{prime_power_parts, TowerSetup};
use normbrauer::zlinalg::{
    hermite_normal_form, quotient_structure, IntMatrix, LatticeBasis,
};

fn resolve_all(g: &FiniteGroup, words: &[&str]) -> Subgroup {
    let elems: Vec<usize> =
        words.iter().map(|w| g.resolve_word(w).expect("fixture word")).collect();
    subgroup_closure(g, &elems)
}

pub fn job(
    spec: GroupSpec,
    gk_words: &[&str],
    factor_words: &[(&str, &[&str])],
) -> JobConfig {
    let group = build_group(&spec).expect("fixture group");
    let gk = resolve_all(&group, gk_words);
    let factors = factor_words
        .iter()
        .map(|(label, words)| (label.to_string(), resolve_all(&group, words)))
        .collect();
    JobConfig { group, gk, factors, a_label: None }
}

pub fn cyclic_job(
    orders: &[usize],
    gk_words: &[&str],
    factor_words: &[(&str, &[&str])],
) -> JobConfig {
    job(GroupSpec::CyclicProduct { orders: orders.to_vec() }, gk_words, factor_words)
}

fn perm_job(
    degree: usize,
    gens: &[(&str, &[usize])],
    gk_words: &[&str],
    factor_words: &[(&str, &[&str])],
) -> JobConfig {
    let spec = GroupSpec::Permutations {
        degree,
        generators: gens.iter().map(|(n, v)| (n.to_string(), v.to_vec())).collect(),
    };
    job(spec, gk_words, factor_words)
}

pub fn dihedral8(gk_words: &[&str], factor_words: &[(&str, &[&str])]) -> JobConfig {
    perm_job(
        4,
        &[("r", &[1, 2, 3, 0]), ("f", &[0, 3, 2, 1])],
        gk_words,
        factor_words,
    )
}

pub fn quaternion8(gk_words: &[&str], factor_words: &[(&str, &[&str])]) -> JobConfig {
    // Left-regular representation on the eight elements 1, i, -1, -i, j,
    // k, -j, -k with g0 = i, g1 = j.
    perm_job(
        8,
        &[("i", &[1, 2, 3, 0, 5, 6, 7, 4]), ("j", &[4, 7, 6, 5, 2, 1, 0, 3])],
        gk_words,
        factor_words,
    )
}

pub fn symmetric3(gk_words: &[&str], factor_words: &[(&str, &[&str])]) -> JobConfig {
    perm_job(3, &[("r", &[1, 2, 0]), ("s", &[1, 0, 2])], gk_words, factor_words)
}

/// Prime-power-degree configurations with |G| ≤ 16 covering n ∈ {1, 2, 3},
/// disjoint/nested/duplicated factors, and non-abelian groups.
pub fn oracle_catalogue() -> Vec<(String, JobConfig)> {
    let mut cat: Vec<(String, JobConfig)> = Vec::new();
    let mut add = |name: &str, job: JobConfig| cat.push((name.to_string(), job));

    // Klein-four variants.
    add("klein_disjoint", cyclic_job(&[2, 2], &["g0"], &[("K1", &["g1"]), ("K2", &["g0*g1"])]));
    add("klein_duplicate", cyclic_job(&[2, 2], &["g0"], &[("K1", &["g1"]), ("K2", &["g1"])]));
    add("klein_factor_equals_k", cyclic_job(&[2, 2], &["g0"], &[("K1", &["g0"]), ("K2", &["g1"])]));
    add("klein_single", cyclic_job(&[2, 2], &["g0"], &[("K1", &["g1"])]));
    add(
        "klein_mixed_triple",
        cyclic_job(&[2, 2], &["g0"], &[("K1", &["g1"]), ("K2", &["g0*g1"]), ("K3", &["g1"])]),
    );

    // Cyclic towers (nested factors).
    add("z4_nested", cyclic_job(&[4], &["e"], &[("K1", &["g0^2"])]));
    add("z4_full_factor", cyclic_job(&[4], &["e"], &[("K1", &["e"])]));
    add("z4_two_factors", cyclic_job(&[4], &["e"], &[("K1", &["g0^2"]), ("K2", &["e"])]));
    add("z8_n2_chain", cyclic_job(&[8], &["g0^4"], &[("K1", &["g0^2"]), ("K2", &["g0^4"]), ("K3", &["e"])]));
    add("z8_n3", cyclic_job(&[8], &["e"], &[("K1", &["g0^4"]), ("K2", &["g0^2"])]));
    add("z9_nested", cyclic_job(&[9], &["e"], &[("K1", &["g0^3"]), ("K2", &["e"])]));
    add("z16_n2", cyclic_job(&[16], &["g0^4"], &[("K1", &["g0^2"]), ("K2", &["g0^4"])]));

    // Bicyclic 2-groups.
    add("z4xz2_disjoint", cyclic_job(&[4, 2], &["g1"], &[("K1", &["g0"]), ("K2", &["g0*g1"])]));
    add("z4xz2_mixed", cyclic_job(&[4, 2], &["g0"], &[("K1", &["g1"]), ("K2", &["g0*g1"])]));
    add("z4xz2_subfield", cyclic_job(&[4, 2], &["g1"], &[("K1", &["g0"]), ("K2", &["g0^2", "g1"])]));
    add("bicyclic44_pair", cyclic_job(&[4, 4], &["g0"], &[("K1", &["g1"]), ("K2", &["g0*g1"])]));
    add(
        "bicyclic44_triple",
        cyclic_job(
            &[4, 4],
            &["g0"],
            &[("K1", &["g1"]), ("K2", &["g0*g1"]), ("K3", &["g0^3*g1"])],
        ),
    );
    add(
        "quartic_biquadratic",
        cyclic_job(&[4, 4], &["g1"], &[("K1", &["g0*g1^3"]), ("K2", &["g0"])]),
    );
    add("z2xz8_three", cyclic_job(&[8, 2], &["g0^4", "g1"], &[("K1", &["g0"]), ("K2", &["g0*g1"]), ("K3", &["g0^2", "g1"])]));

    // Elementary abelian.
    add(
        "elem8_quadratic_base",
        cyclic_job(&[2, 2, 2], &["g0", "g1"], &[("K1", &["g2"]), ("K2", &["g0*g2"]), ("K3", &["g1*g2"])]),
    );
    add(
        "elem8_large_factors",
        cyclic_job(&[2, 2, 2], &["g0", "g1"], &[("K1", &["g0", "g2"]), ("K2", &["g1", "g2"])]),
    );

    // Odd primes.
    add(
        "z3z3_disjoint",
        cyclic_job(&[3, 3], &["g0"], &[("K1", &["g1"]), ("K2", &["g0*g1"]), ("K3", &["g0^2*g1"])]),
    );
    add("z3z3_duplicate", cyclic_job(&[3, 3], &["g0"], &[("K1", &["g1"]), ("K2", &["g1"])]));

    // Non-abelian.
    add("s3_quadratic", symmetric3(&["r"], &[("K1", &["s"]), ("K2", &["r*s"])]));
    add("s3_single", symmetric3(&["r"], &[("K1", &["s"])]));
    add("d4_cyclic_k", dihedral8(&["r"], &[("K1", &["f"]), ("K2", &["r*f"])]));
    add("d4_mixed", dihedral8(&["r"], &[("K1", &["r^2", "f"]), ("K2", &["f"])]));
    add("d4_quadratic_k", dihedral8(&["r^2", "f"], &[("K1", &["r"]), ("K2", &["f"])]));
    add("q8_cyclic_k", quaternion8(&["i"], &[("K1", &["j"]), ("K2", &["i*j"])]));

    cat
}

/// Composite-degree configurations with |G| ≤ 12.
pub fn composite_catalogue() -> Vec<(String, JobConfig)> {
    vec![
        (
            "z6_degree6".to_string(),
            cyclic_job(&[6], &["e"], &[("K1", &["g0^3"]), ("K2", &["g0^2"])]),
        ),
        (
            "z12_degree6".to_string(),
            cyclic_job(
                &[12],
                &["g0^6"],
                &[("K1", &["g0^2"]), ("K2", &["g0^3"]), ("K3", &["g0^4"])],
            ),
        ),
        (
            "z6xz2_degree6".to_string(),
            cyclic_job(&[6, 2], &["g1"], &[("K1", &["g0"]), ("K2", &["g0*g1"])]),
        ),
    ]
}

pub fn towers_of(job: &JobConfig) -> Vec<(usize, TowerSetup)> {
    prime_power_parts(&job.group, &job.gk, &job.factors).expect("catalogue config must build")
}

// ---------------------------------------------------------------------------
// Property-suite bodies (criterion-level checks, also runnable standalone).
// ---------------------------------------------------------------------------

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::zero(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = BigInt::from(rng.gen_range(-bound..=bound));
        }
    }
    m
}

/// ≥ `cases` random small integer matrices: the Hermite form is
/// reconstructed by a unimodular transform, and quotients of nested
/// full-rank lattices have order |det| with a divisibility chain,
/// cross-checked by brute-force coset counting for small determinants.
pub fn zlinalg_random_suite(cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut done = 0usize;
    while done < cases {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=4);
        let m = random_matrix(&mut rng, rows, cols, 9);

        // Hermite reconstruction: h = u·m with u invertible over Z.
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, u.mul(&m));
        assert!(u.det().abs().is_one());

        // Quotient of full-rank lattices: N ⊇ N·M with |quotient| = |det M|.
        let dim = rng.gen_range(1..=3);
        let numer_gen = random_matrix(&mut rng, dim, dim, 4);
        if numer_gen.det().is_zero() {
            continue;
        }
        let mult = random_matrix(&mut rng, dim, dim, 3);
        if mult.det().is_zero() {
            continue;
        }
        // Keep determinants small enough for brute-force counting.
        let numer = LatticeBasis::from_generators(dim, numer_gen.clone());
        let denom_gen = mult.mul(&numer_gen);
        let denom = LatticeBasis::from_generators(dim, denom_gen);
        let q = quotient_structure(&numer, &denom).expect("nested full-rank lattices");
        let order: BigInt = q.invariant_factors.iter().product();
        assert_eq!(order, mult.det().abs());
        for w in q.invariant_factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }

        // Brute-force coset count for small quotients: a triangular
        // fundamental box of the denominator contains one representative
        // per coset of Z^dim, and (denominator ⊆ numerator) membership in
        // the numerator is coset-invariant, so counting box vectors inside
        // the numerator counts the quotient.
        if order.to_u64().map(|o| o <= 64).unwrap_or(false) {
            let (hd, _) = hermite_normal_form(&denom.basis);
            let diag: Vec<i64> = (0..dim).map(|i| hd[(i, i)].to_i64().unwrap().abs()).collect();
            if diag.iter().all(|&d| d > 0 && d <= 16) {
                let mut count = 0u64;
                let total: i64 = diag.iter().product();
                let mut idx = vec![0i64; dim];
                for flat in 0..total {
                    let mut rem = flat;
                    for (i, &d) in diag.iter().enumerate() {
                        idx[i] = rem % d;
                        rem /= d;
                    }
                    let v: Vec<BigInt> = idx.iter().map(|&x| BigInt::from(x)).collect();
                    if numer.contains(&v) {
                        count += 1;
                    }
                }
                assert_eq!(BigInt::from(count), order);
            }
        }
        done += 1;
    }
}

/// Γ membership is a property of conjugacy classes: recomputing from every
/// element of every class reproduces the stored sets.
pub fn gamma_saturation_suite() {
    for (name, job) in oracle_catalogue() {
        for (_, setup) in towers_of(&job) {
            let t = compute_gamma(&setup);
            for i in 0..setup.factors.len() {
                for m in 1..=setup.n {
                    for (cid, class) in t.classes.classes.iter().enumerate() {
                        let listed = t.gamma_set(i, m).contains(&cid);
                        let any = class.iter().any(|&g| {
                            let lo = &setup.chain[setup.n - m];
                            let hi = &setup.chain[setup.n - m + 1];
                            setup.group.cyclic(g).into_iter().any(|x| {
                                setup.factors[i].contains(x)
                                    && lo.contains(x)
                                    && !hi.contains(x)
                            })
                        });
                        assert_eq!(any, listed, "config {name}, factor {i}, level {m}");
                    }
                }
            }
        }
    }
}

/// A few decomposition groups per configuration (every cyclic subgroup, up
/// to conjugacy, plus the whole group).
pub fn sample_places(g: &FiniteGroup) -> Vec<RamifiedPlace> {
    let mut places: Vec<RamifiedPlace> = normbrauer::group::cyclic_subgroups_up_to_conjugacy(g)
        .into_iter()
        .enumerate()
        .map(|(i, s)| RamifiedPlace { label: format!("v{i}"), decomposition: s })
        .collect();
    places.push(RamifiedPlace { label: "v_full".into(), decomposition: Subgroup::whole(g) });
    places
}

/// |C_arith/D| divides |C(L)/D| with arbitrary ramified data.
pub fn c_arith_divisibility_suite() {
    for (name, job) in oracle_catalogue() {
        for (_, setup) in towers_of(&job) {
            let gamma = compute_gamma(&setup);
            let omega = normbrauer::comb::brauer_group(&setup, &gamma);
            let places = sample_places(&setup.group);
            let arith = c_arith(&setup, &gamma, &places);
            let a: BigInt = arith.invariant_factors.iter().product();
            let o: BigInt = omega.invariant_factors.iter().product();
            assert!((&o % &a).is_zero(), "config {name}");
        }
    }
}

/// Exhaustive agreement of the two coefficient-vector membership criteria
/// on every vector, for configurations whose modulus product is ≤ 2¹².
pub fn g_equivalence_suite() {
    for (name, job) in oracle_catalogue() {
        for (_, setup) in towers_of(&job) {
            let moduli: Vec<u64> = (0..setup.factors.len()).map(|i| setup.modulus(i)).collect();
            let total: u64 = moduli.iter().product();
            if total > 1 << 12 {
                continue;
            }
            let gamma = compute_gamma(&setup);
            let places = sample_places(&setup.group);
            for code in 0..total {
                let mut rem = code;
                let mut values = Vec::with_capacity(moduli.len());
                for &m in &moduli {
                    values.push(rem % m);
                    rem /= m;
                }
                let a = CMap::new(setup.p as u64, values, moduli.clone());
                assert!(
                    g_equivalence_check(&a, &setup, &gamma, &places),
                    "config {name}, vector code {code}"
                );
                assert!(
                    g_equivalence_check(&a, &setup, &gamma, &[]),
                    "config {name} (unramified), vector code {code}"
                );
            }
        }
    }
}
