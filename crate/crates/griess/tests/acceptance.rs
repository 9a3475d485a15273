//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --release --test acceptance -- --nocapture`.

use griess::axioms::{
    check_b0_polynomiality, check_commutator, check_griess, check_unit_translation,
    check_virasoro, CheckRanges, QuotientView,
};
use griess::coalgebra::{
    build_tower, graph_generator, internalize, load_algebra, weights_of_length, Weight,
};
use griess::funspaces::{
    comp0_multi, factor_indecomposables, is_admissible, is_indecomposable, ordered_partitions,
    oz_weights, prescribe_poles, reassemble_factors, set_partitions, reconstruct_from_parts,
    split_component, SpaceCache,
};
use griess::linalg::{rref_kernel, Matrix};
use griess::quotient::{augmentation_character, corr_quotient_dim, monomial_star, CorrFamily};
use griess::rat::{rat, ratio, Rat};
use griess::ratfun::{PartitionSpec, RatFun};
use griess::vertexbuild::{build_truncation, VertexTruncation};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

fn verdict(name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {name}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {name} failed: {detail}");
}

fn virasoro_doc(c_num: i64, c_den: i64) -> String {
    format!(
        r#"{{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"{}/{}"]],"unit":["1"]}}"#,
        c_num,
        8 * c_den
    )
}

const TWODIM: &str = r#"{"dim":2,"basis":["e","x"],
    "product":[[1,1,["1","0"]],[1,2,["0","1"]],[2,2,["1","0"]]],
    "form":[[1,1,"1/4"],[1,2,"0"],[2,2,"1/4"]],
    "unit":["1","0"]}"#;

fn pole(l: usize, i: usize, j: usize, k: i64) -> RatFun {
    let mut d = BTreeMap::new();
    d.insert((i, j), k);
    RatFun {
        nvars: l,
        numer: griess::poly::Poly::one(l),
        diag: d,
    }
}

#[test]
fn criterion_1_dimension_table() {
    let mut cache = SpaceCache::new();
    let dims = (
        cache.admissible(2).unwrap().dim(),
        cache.admissible(3).unwrap().dim(),
        cache.admissible(4).unwrap().dim(),
        cache.indecomposable(4).unwrap().dim(),
        cache.admissible(5).unwrap().dim(),
        cache.indecomposable(5).unwrap().dim(),
    );
    verdict(
        "1 (dimension table)",
        dims == (1, 1, 6, 3, 26, 16),
        &format!("dims (R2,R3,R4,R4_0,R5,R5_0) = {dims:?}, expected (1,1,6,3,26,16)"),
    );
}

#[test]
fn criterion_2_small_arity_formulas() {
    let input = load_algebra(TWODIM).unwrap();
    let alg = internalize(&input).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    let chi = augmentation_character(&tower).unwrap();
    let a = &tower.algebra;
    let form = |x: &Vec<Rat>, y: &Vec<Rat>| a.form(x, y);
    let prod = |x: &Vec<Rat>, y: &Vec<Rat>| a.prod(x, y);
    let gens: Vec<Vec<Rat>> = (0..a.n).map(|g| a.basis_vec(g)).collect();
    let mut checked = 0usize;
    let mut ok = true;
    // l = 2 and l = 3 closed forms on every generator tuple
    for t in weights_of_length(a.n, 2) {
        let got = chi.phi_slots(&t.0).unwrap();
        let expect = pole(2, 0, 1, -4).scale(&form(&gens[t.0[0]], &gens[t.0[1]]));
        ok &= got == expect;
        checked += 1;
    }
    for t in weights_of_length(a.n, 3) {
        let got = chi.phi_slots(&t.0).unwrap();
        let expect = pole(3, 0, 1, -2)
            .mul(&pole(3, 0, 2, -2))
            .mul(&pole(3, 1, 2, -2))
            .scale(&form(&gens[t.0[0]], &prod(&gens[t.0[1]], &gens[t.0[2]])));
        ok &= got == expect;
        checked += 1;
    }
    // l = 4 six-term expression; the crossing pairing (13)(24) carries a
    // minus sign (rho-consistency and equivariance force it)
    for t in weights_of_length(a.n, 4) {
        let got = chi.phi_slots(&t.0).unwrap();
        let g = |k: usize| &gens[t.0[k]];
        let mut expect = pole(4, 0, 1, -4)
            .mul(&pole(4, 2, 3, -4))
            .scale(&(form(g(0), g(1)) * form(g(2), g(3))));
        expect = expect.add(
            &pole(4, 0, 2, -4)
                .mul(&pole(4, 1, 3, -4))
                .scale(&(form(g(0), g(2)) * form(g(1), g(3)))),
        );
        expect = expect.add(
            &pole(4, 0, 3, -4)
                .mul(&pole(4, 1, 2, -4))
                .scale(&(form(g(0), g(3)) * form(g(1), g(2)))),
        );
        expect = expect.add(
            &pole(4, 0, 1, -2)
                .mul(&pole(4, 2, 3, -2))
                .mul(&pole(4, 0, 2, -1))
                .mul(&pole(4, 0, 3, -1))
                .mul(&pole(4, 1, 2, -1))
                .mul(&pole(4, 1, 3, -1))
                .scale(&form(&prod(g(0), g(1)), &prod(g(2), g(3)))),
        );
        expect = expect.sub(
            &pole(4, 0, 2, -2)
                .mul(&pole(4, 1, 3, -2))
                .mul(&pole(4, 0, 1, -1))
                .mul(&pole(4, 0, 3, -1))
                .mul(&pole(4, 1, 2, -1))
                .mul(&pole(4, 2, 3, -1))
                .scale(&form(&prod(g(0), g(2)), &prod(g(1), g(3)))),
        );
        expect = expect.add(
            &pole(4, 0, 3, -2)
                .mul(&pole(4, 1, 2, -2))
                .mul(&pole(4, 0, 1, -1))
                .mul(&pole(4, 0, 2, -1))
                .mul(&pole(4, 1, 3, -1))
                .mul(&pole(4, 2, 3, -1))
                .scale(&form(&prod(g(0), g(3)), &prod(g(1), g(2)))),
        );
        ok &= got == expect;
        checked += 1;
    }
    verdict(
        "2 (small-arity formulas)",
        ok,
        &format!("{checked} generator tuples at lengths 2, 3, 4"),
    );
}

#[test]
fn criterion_3_virasoro_relations() {
    // <e,e> = c/8 with c = 1/2
    let doc = virasoro_doc(1, 2);
    let alg = internalize(&load_algebra(&doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 5, &mut cache).unwrap();
    let b0_ok = tower.b0_dims == vec![1, 1, 1, 1, 1, 1];
    let chi = augmentation_character(&tower).unwrap();
    let family = CorrFamily::from_character(&chi);
    let trunc = build_truncation(tower, 5, 8).unwrap();
    let view = QuotientView {
        trunc: &trunc,
        family: &family,
    };
    let rep = check_virasoro(&trunc, &view).unwrap();
    verdict(
        "3 (virasoro relations + B_0 = k)",
        rep.ok() && b0_ok,
        &format!(
            "{} relations passed, {} skipped, B_0 dims through length 5 all 1: {b0_ok}",
            rep.passed, rep.skipped
        ),
    );
}

// --- independent Verma-module oracle --------------------------------------

/// Vacuum Verma states: combinations of `L_{-n_1} ... L_{-n_k} |0>` with the
/// modes kept as produced (no ordering assumptions; the commutation engine
/// normalizes every action).
type VState = BTreeMap<Vec<i64>, Rat>;

fn vadd(s: &mut VState, mono: Vec<i64>, c: Rat) {
    if c.is_zero() {
        return;
    }
    let e = s.entry(mono).or_insert_with(Rat::zero);
    *e += c;
    if e.is_zero() {
        s.remove(&s.keys().find(|k| s[*k].is_zero()).unwrap().clone());
    }
}

/// `L_k` applied to a monomial state, fully reduced so every surviving
/// monomial has all modes <= -2.
fn act_l(k: i64, mono: &[i64], c: &Rat, central: &Rat, out: &mut VState) {
    if mono.is_empty() {
        // L_k |0> = 0 for k >= -1
        if k <= -2 {
            vadd(out, vec![k], c.clone());
        }
        return;
    }
    let m = mono[0];
    let rest = &mono[1..];
    if k <= -2 && k <= m {
        // already normally ordered at the front
        let mut mm = vec![k];
        mm.extend_from_slice(mono);
        vadd(out, mm, c.clone());
        return;
    }
    // commute: L_k L_m = L_m L_k + (k - m) L_{k+m} + delta c-term
    let mut inner = VState::new();
    act_l(k, rest, c, central, &mut inner);
    for (mono2, c2) in inner {
        let mut mm = vec![m];
        mm.extend_from_slice(&mono2);
        // re-normalize the front recursively
        let front = mm[0];
        let tail: Vec<i64> = mm[1..].to_vec();
        act_l(front, &tail, &c2, central, out);
    }
    let bracket = rat(k - m);
    if !bracket.is_zero() {
        let mut sub = VState::new();
        act_l(k + m, rest, &(c.clone() * bracket), central, &mut sub);
        for (mono2, c2) in sub {
            vadd(out, mono2, c2);
        }
    }
    if k + m == 0 {
        let cc = c.clone() * rat((k * k * k - k) / 6) * central.clone() / rat(2);
        // (k^3 - k)/12 * c: split to stay in integers
        let mut sub = VState::new();
        act_l_unit(rest, &cc, central, &mut sub);
        for (mono2, c2) in sub {
            vadd(out, mono2, c2);
        }
    }
}

fn act_l_unit(mono: &[i64], c: &Rat, central: &Rat, out: &mut VState) {
    if mono.is_empty() {
        vadd(out, vec![], c.clone());
        return;
    }
    let front = mono[0];
    let tail: Vec<i64> = mono[1..].to_vec();
    let mut inner = VState::new();
    act_l_unit(&tail, c, central, &mut inner);
    for (mono2, c2) in inner {
        act_l(front, &mono2, &c2, central, out);
    }
}

/// `<L_{-mu} 0 | L_{-nu} 0>` for partitions mu, nu (parts >= 2).
fn verma_pairing(mu: &[i64], nu: &[i64], central: &Rat) -> Rat {
    // the adjoint of L_{-n_1}...L_{-n_k} is L_{n_k}...L_{n_1}, so L_{n_1}
    // acts first: iterate mu in its stored (descending) order
    let mut state = VState::new();
    let nu_modes: Vec<i64> = nu.iter().map(|&n| -n).collect();
    state.insert(nu_modes, Rat::one());
    for &m in mu.iter() {
        let mut next = VState::new();
        for (mono, c) in &state {
            act_l(m, mono, c, central, &mut next);
        }
        state = next;
    }
    state.get(&vec![]).cloned().unwrap_or_else(Rat::zero)
}

fn partitions_min2(d: i64) -> Vec<Vec<i64>> {
    fn rec(d: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if d == 0 {
            out.push(cur.clone());
            return;
        }
        let mut p = max.min(d);
        while p >= 2 {
            cur.push(p);
            rec(d - p, p, cur, out);
            cur.pop();
            p -= 1;
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_4_virasoro_graded_dimensions() {
    let c10 = rat(10);
    // engine side: family pairings at c = 10
    let doc = virasoro_doc(10, 1);
    let alg = internalize(&load_algebra(&doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg.clone(), 4, &mut cache).unwrap();
    let chi = augmentation_character(&tower).unwrap();
    let mut family = CorrFamily::from_character(&chi);
    family.extend_omega(&alg, 6).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for d in 2..=6i64 {
        let engine = corr_quotient_dim(&family, 1, d, 3).unwrap();
        // oracle: rank of the Verma Gram on partitions of d into parts >= 2
        let parts = partitions_min2(d);
        let k = parts.len();
        let mut gram = Matrix::zero(k, k);
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = verma_pairing(&parts[i], &parts[j], &c10);
            }
        }
        let (oracle, _) = rref_kernel(&gram);
        ok &= engine == oracle;
        detail.push_str(&format!("d={d}: engine {engine} oracle {oracle}; "));
        // stronger: the pairing values themselves agree on partition words
        for i in 0..k {
            for j in 0..k {
                let wi: Vec<(usize, i64)> = parts[i].iter().map(|&n| (0usize, 1 - n)).collect();
                let wj: Vec<(usize, i64)> = parts[j].iter().map(|&n| (0usize, 1 - n)).collect();
                let mut full = monomial_star(&wi);
                full.extend(wj.iter().cloned());
                let engine_val = family.word_value(&full).unwrap();
                ok &= engine_val == gram[(i, j)];
            }
        }
    }
    let expected = [1usize, 1, 2, 2, 4];
    let got: Vec<usize> = (2..=6)
        .map(|d| corr_quotient_dim(&family, 1, d, 3).unwrap())
        .collect();
    ok &= got == expected;
    verdict(
        "4 (virasoro graded dims at c=10)",
        ok,
        &format!("dims d=2..6 = {got:?} expected {expected:?}; {detail}"),
    );
}

fn full_suites(doc: &str, l: usize, d: i64) -> (usize, usize, usize) {
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, l, &mut cache).unwrap();
    let chi = augmentation_character(&tower).unwrap();
    let family = CorrFamily::from_character(&chi);
    let trunc = build_truncation(tower, l, d).unwrap();
    let view = QuotientView {
        trunc: &trunc,
        family: &family,
    };
    let ranges = CheckRanges {
        n_min: -4,
        n_max: 6,
        max_degree: 6,
    };
    let mut attempted = 0;
    let mut passed = 0;
    let mut skipped = 0;
    for rep in [
        check_unit_translation(&trunc, ranges).unwrap(),
        check_commutator(&trunc, ranges).unwrap(),
        check_virasoro(&trunc, &view).unwrap(),
        check_griess(&trunc, &view).unwrap(),
    ] {
        assert!(rep.ok(), "{}: {:?}", rep.suite, rep.failures.iter().take(3).collect::<Vec<_>>());
        attempted += rep.attempted;
        passed += rep.passed;
        skipped += rep.skipped;
    }
    (attempted, passed, skipped)
}

#[test]
fn criterion_5_axiom_suite() {
    let (a1, p1, s1) = full_suites(&virasoro_doc(10, 1), 4, 8);
    let (a2, p2, s2) = full_suites(TWODIM, 4, 8);
    verdict(
        "5 (axiom suite, two algebras)",
        a1 == p1 && a2 == p2,
        &format!("virasoro {p1}/{a1} (+{s1} skipped), dim-2 {p2}/{a2} (+{s2} skipped)"),
    );
}

/// A scrambled three-dimensional Frobenius algebra: three orthogonal
/// idempotents with pseudo-random pairings, conjugated by a fixed
/// pseudo-random invertible basis change (all rational, all exact).
fn threedim_random_doc() -> String {
    // idempotent data e_i e_j = delta_ij e_i, <e_i, e_i> = c_i
    let c = [ratio(1, 4), ratio(1, 3), ratio(2, 5)];
    // deterministic small scramble matrix with det != 0
    let t = [
        [rat(1), rat(1), rat(0)],
        [rat(0), rat(1), rat(2)],
        [rat(1), rat(0), rat(1)],
    ];
    // basis b_i = sum_j t[i][j] e_j; products/forms in the new basis
    let prod_b = |i: usize, j: usize| -> Vec<Rat> {
        // b_i b_j = sum_k t[i][k] t[j][k] e_k; express in b-coordinates by
        // solving T^T x = coeffs
        let coeffs: Vec<Rat> = (0..3)
            .map(|k| t[i][k].clone() * t[j][k].clone())
            .collect();
        // T^T x = coeffs
        let m = Matrix::from_rows(vec![
            vec![t[0][0].clone(), t[1][0].clone(), t[2][0].clone()],
            vec![t[0][1].clone(), t[1][1].clone(), t[2][1].clone()],
            vec![t[0][2].clone(), t[1][2].clone(), t[2][2].clone()],
        ]);
        griess::linalg::solve(&m, &coeffs).expect("scramble invertible")
    };
    let form_b = |i: usize, j: usize| -> Rat {
        (0..3)
            .map(|k| t[i][k].clone() * t[j][k].clone() * c[k].clone())
            .fold(Rat::zero(), |a, b| a + b)
    };
    // unit: e = e_1 + e_2 + e_3 in b-coordinates
    let m = Matrix::from_rows(vec![
        vec![t[0][0].clone(), t[1][0].clone(), t[2][0].clone()],
        vec![t[0][1].clone(), t[1][1].clone(), t[2][1].clone()],
        vec![t[0][2].clone(), t[1][2].clone(), t[2][2].clone()],
    ]);
    let unit = griess::linalg::solve(&m, &[Rat::one(), Rat::one(), Rat::one()]).unwrap();
    let fmt = griess::rat::format_rat;
    let mut product_entries = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let p = prod_b(i, j);
            product_entries.push(format!(
                "[{},{},[\"{}\",\"{}\",\"{}\"]]",
                i + 1,
                j + 1,
                fmt(&p[0]),
                fmt(&p[1]),
                fmt(&p[2])
            ));
        }
    }
    let mut form_entries = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            form_entries.push(format!("[{},{},\"{}\"]", i + 1, j + 1, fmt(&form_b(i, j))));
        }
    }
    format!(
        r#"{{"dim":3,"product":[{}],"form":[{}],"unit":["{}","{}","{}"]}}"#,
        product_entries.join(","),
        form_entries.join(","),
        fmt(&unit[0]),
        fmt(&unit[1]),
        fmt(&unit[2])
    )
}

#[test]
fn criterion_6_griess_recovery_threedim() {
    let doc = threedim_random_doc();
    let alg = internalize(&load_algebra(&doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    let chi = augmentation_character(&tower).unwrap();
    let family = CorrFamily::from_character(&chi);
    let trunc = build_truncation(tower, 4, 6).unwrap();
    let view = QuotientView {
        trunc: &trunc,
        family: &family,
    };
    let rep = check_griess(&trunc, &view).unwrap();
    verdict(
        "6 (griess recovery, random 3-dim)",
        rep.ok(),
        &format!("{} recovery identities, {} skipped", rep.passed, rep.skipped),
    );
}

#[test]
fn criterion_7_round_trip_oracles() {
    let mut cache = SpaceCache::new();
    let mut ok = true;
    let mut detail = String::new();
    for l in [4usize, 5] {
        let space = cache.admissible(l).unwrap().clone();
        let ind = cache.indecomposable(l).unwrap().clone();
        let w = oz_weights(l);
        let mut factor_ok = true;
        let mut poles_ok = true;
        let mut parts_ok = true;
        for b in &space.basis {
            // factorization round-trip
            let terms = factor_indecomposables(&mut cache, b).unwrap();
            factor_ok &= reassemble_factors(l, &terms) == *b;
            // prescribed-poles round-trip on the rho data
            let mut data = BTreeMap::new();
            for i in 0..l {
                for j in (i + 1)..l {
                    for k in [-2i64, -4] {
                        data.insert((i, j, k), b.rho_embedded(i, j, k));
                    }
                }
            }
            let found = prescribe_poles(&mut cache, l, &data).unwrap();
            for (&(i, j, k), target) in &data {
                poles_ok &= found.rho_embedded(i, j, k) == *target;
            }
            // reconstruction from degree-0 parts: components match, and the
            // defect (if any) is indecomposable
            let mut comps = BTreeMap::new();
            for p in set_partitions(l) {
                if p.len() < 2 {
                    continue;
                }
                comps.insert(p.clone(), comp0_multi(b, &p, &w).unwrap());
            }
            let rec = reconstruct_from_parts(l, &comps, &w).unwrap();
            for (p, c) in &comps {
                parts_ok &= comp0_multi(&rec, p, &w).unwrap() == *c;
            }
            let diff = rec.sub(b);
            if !diff.is_zero() {
                parts_ok &= ind.contains(&diff).unwrap();
            }
        }
        ok &= factor_ok && poles_ok && parts_ok;
        detail.push_str(&format!(
            "l={l}: factor {factor_ok}, poles {poles_ok}, parts {parts_ok}; "
        ));
    }
    verdict("7 (round-trip oracles)", ok, &detail);
}

#[test]
fn criterion_8_structural_invariants() {
    let mut cache = SpaceCache::new();
    let mut ok = true;
    let mut detail = String::new();
    // rho-commutation and component completeness on R^4 and R^5 bases
    for l in [4usize, 5] {
        let space = cache.admissible(l).unwrap().clone();
        let w = oz_weights(l);
        let mut rhocom = true;
        let mut comp_complete = true;
        let mut fixed_point = true;
        let mut swap_law = true;
        for b in &space.basis {
            // disjoint-pair rho commutation at the pole orders
            for k in [-2i64, -4] {
                for m in [-2i64, -4] {
                    let ab = b.rho_embedded(0, 1, k).rho_embedded(2, 3, m);
                    let ba = b.rho_embedded(2, 3, m).rho_embedded(0, 1, k);
                    rhocom &= ab == ba;
                }
            }
            // component completeness: expansions need not terminate, so
            // the exact statement is that the residual after the partial
            // sum has no components up to the truncation order
            for jlen in 1..l {
                let j_set: Vec<usize> = ((l - jlen)..l).collect();
                let i_set: Vec<usize> = (0..(l - jlen)).collect();
                let p = PartitionSpec::new(l, i_set, j_set).unwrap();
                let n_top = 2 * l as i64;
                let mut acc = RatFun::zero(l);
                for n in 0..=n_top {
                    acc = acc.add(&b.component(&p, n, &w).unwrap());
                }
                let residual = b.sub(&acc);
                let mut settled = true;
                for n in 0..=n_top {
                    settled &= residual.component(&p, n, &w).unwrap().is_zero();
                }
                comp_complete &= settled;
            }
            // minimal-degree regular fixed point
            fixed_point &= b.involution(&w) == *b;
            // swap law: the (J,I)-split at degree n is the slotwise
            // involution of the (I,J)-split, compared as product sums
            let p = PartitionSpec::new(l, (0..2).collect(), (2..l).collect()).unwrap();
            for n in [0i64, 2, 3] {
                let direct: RatFun = b.component(&p.swap(), n, &w).unwrap();
                let pairs = split_component(b, &p, n, &w).unwrap();
                let mut rebuilt = RatFun::zero(l);
                for (fi, fj) in &pairs {
                    let fi_star = fi.involution(&oz_weights(fi.nvars));
                    let fj_star = fj.involution(&oz_weights(fj.nvars));
                    let emb_i = griess::funspaces::embed_block(&fi_star, &p.i_set, l);
                    let emb_j = griess::funspaces::embed_block(&fj_star, &p.j_set, l);
                    rebuilt = rebuilt.add(&emb_i.mul(&emb_j));
                }
                swap_law &= direct == rebuilt;
            }
        }
        ok &= rhocom && comp_complete && fixed_point && swap_law;
        detail.push_str(&format!(
            "l={l}: rhocom {rhocom}, completeness {comp_complete}, fixed point {fixed_point}, swap {swap_law}; "
        ));
    }
    // raising-operator coefficient identities on R^{l-1} bases, l <= 5
    let mut raising = true;
    for lm1 in [2usize, 3, 4] {
        let basis = cache.admissible(lm1).unwrap().basis.clone();
        let l = lm1 + 1;
        for beta in &basis {
            let alpha = RatFun::te_operator(beta).unwrap();
            raising &= is_admissible(&alpha).unwrap();
            for i in 0..lm1 {
                let r2 = alpha.rho_embedded(i, l - 1, -2);
                let beta_sub = beta.extend_vars(l).rho_embedded(i, l - 1, 0);
                raising &= r2 == beta_sub.scale(&rat(2));
                // the order -1 coefficient carries +d beta (the paper's
                // displayed sign is off; the expansion of beta's own
                // z_i-dependence flips it)
                let r1 = alpha.rho_embedded(i, l - 1, -1);
                let dbeta = beta.extend_vars(l).diff(i).rho_embedded(i, l - 1, 0);
                raising &= r1 == dbeta;
            }
        }
    }
    ok &= raising;
    detail.push_str(&format!("raising identities {raising}"));
    verdict("8 (structural invariants)", ok, &detail);
}

#[test]
fn criterion_9_polynomiality_and_graph_witness() {
    // two non-omega generators with zero product and form: the free-flavored
    // input whose degree-zero algebra is polynomial
    let doc = r#"{"dim":2,
        "product":[[1,1,["0","0"]],[1,2,["0","0"]],[2,2,["0","0"]]],
        "form":[[1,1,"0"],[1,2,"0"],[2,2,"0"]]}"#;
    let input = load_algebra(doc).unwrap();
    let alg = internalize(&input).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    let rep = check_b0_polynomiality(&tower, 4).unwrap();
    // K_{4,4} witness: a nonzero symmetric indecomposable simple-pole
    // function in eight variables
    let mut edges = Vec::new();
    for a in 0..4usize {
        for b in 4..8usize {
            edges.push((a, b));
        }
    }
    let witness = graph_generator(&edges).unwrap();
    let nonzero = !witness.is_zero();
    let regular = witness.apply_delta_star(&vec![4; 8]).is_zero();
    let simple = witness.diag.values().all(|&k| k >= -1);
    // indecomposability: every proper degree-0 component vanishes; the
    // component floors make almost all of them vanish for free
    let w8 = oz_weights(8);
    let mut indecomp = true;
    for p in ordered_partitions(8) {
        if !witness.component(&p, 0, &w8).unwrap().is_zero() {
            indecomp = false;
            break;
        }
    }
    verdict(
        "9 (polynomiality + K44 witness)",
        rep.ok() && nonzero && regular && simple && indecomp,
        &format!(
            "bookkeeping ok {}, witness nonzero {nonzero}, regular {regular}, simple poles {simple}, indecomposable {indecomp}",
            rep.ok()
        ),
    );
}

#[test]
fn criterion_10_automorphism_equivariance() {
    // 2-dim example with the order-2 automorphism x -> -x
    let doc = r#"{"dim":2,"basis":["e","x"],
        "product":[[1,1,["1","0"]],[1,2,["0","1"]],[2,2,["1","0"]]],
        "form":[[1,1,"1/4"],[1,2,"0"],[2,2,"1/4"]],
        "unit":["1","0"],
        "automorphisms":[[["1","0"],["0","-1"]]]}"#;
    let input = load_algebra(doc).unwrap();
    let alg = internalize(&input).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg.clone(), 4, &mut cache).unwrap();
    let chi = augmentation_character(&tower).unwrap();
    let family = CorrFamily::from_character(&chi);
    let trunc = build_truncation(tower, 4, 6).unwrap();
    let view = QuotientView {
        trunc: &trunc,
        family: &family,
    };
    // equivariance of structure constants is part of the griess suite
    let rep = check_griess(&trunc, &view).unwrap();
    // quotient dimensions computed with the automorphism-conjugated input
    // must agree (the conjugated document describes the same algebra)
    let doc_conj = r#"{"dim":2,"basis":["e","x"],
        "product":[[1,1,["1","0"]],[1,2,["0","1"]],[2,2,["1","0"]]],
        "form":[[1,1,"1/4"],[1,2,"0"],[2,2,"1/4"]],
        "unit":["1","0"]}"#;
    let alg2 = internalize(&load_algebra(doc_conj).unwrap()).unwrap();
    let mut cache2 = SpaceCache::new();
    let tower2 = build_tower(alg2, 4, &mut cache2).unwrap();
    let chi2 = augmentation_character(&tower2).unwrap();
    let family2 = CorrFamily::from_character(&chi2);
    let mut ok = rep.ok();
    let mut dims = Vec::new();
    for d in 0..=4i64 {
        let d1 = corr_quotient_dim(&family, 2, d, 2).unwrap();
        let d2 = corr_quotient_dim(&family2, 2, d, 2).unwrap();
        ok &= d1 == d2;
        dims.push(d1);
    }
    // chi itself is automorphism-invariant: the weight functions must be
    // unchanged under the sign flip of x (odd x-count weights vanish)
    for (w, f) in &chi.functions {
        let sign = w.0.iter().filter(|&&g| g == 0).count() % 2;
        if sign == 1 {
            ok &= f.is_zero();
        }
    }
    verdict(
        "10 (automorphism equivariance)",
        ok,
        &format!(
            "griess equivariance {} identities; quotient dims d=0..4 = {dims:?} invariant",
            rep.passed
        ),
    );
}
