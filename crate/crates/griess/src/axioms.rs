//! Verification suites: vertex-algebra identities, sl2 structure, Virasoro
//! relations, Griess recovery, and the degree-zero polynomiality bookkeeping
//! -- all exact, all within the stated cutoffs.
//!
//! Suites only assert identities whose every term is representable inside
//! the truncation; borderline instances count as skipped, never as passed.
//! Identities that only hold in the simple quotient are tested modulo the
//! radical through correlation pairings.

use crate::coalgebra::{weights_of_length, CoalgebraTower, Weight};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::quotient::{normal_ordered_words, CorrFamily};
use crate::rat::{binomial, factorial, format_rat, rat, Rat};
use crate::vertexbuild::{Sl2Op, StateVector, VertexTruncation};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub suite: String,
    pub attempted: usize,
    pub passed: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn new(suite: &str) -> Self {
        CheckReport {
            suite: suite.to_string(),
            attempted: 0,
            passed: 0,
            skipped: 0,
            failures: vec![],
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.attempted += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(witness());
        }
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} passed, {} skipped{}",
            self.suite,
            self.passed,
            self.attempted,
            self.skipped,
            if self.failures.is_empty() {
                String::new()
            } else {
                format!(", {} FAILED", self.failures.len())
            }
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckRanges {
    pub n_min: i64,
    pub n_max: i64,
    pub max_degree: i64,
}

impl Default for CheckRanges {
    fn default() -> Self {
        CheckRanges {
            n_min: -4,
            n_max: 6,
            max_degree: 6,
        }
    }
}

/// Runs a fallible boolean check; out-of-cutoff conditions count as skips.
fn record_or_skip(
    rep: &mut CheckReport,
    r: std::result::Result<bool, Error>,
    witness: impl FnOnce() -> String,
) -> Result<()> {
    match r {
        Ok(ok) => {
            rep.record(ok, witness);
            Ok(())
        }
        Err(Error::OutOfCutoff(_)) => {
            rep.skip();
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// States compared coordinatewise; both sides must share the grading.
fn states_equal(xs: &[StateVector], ys: &[StateVector]) -> bool {
    let mut acc: BTreeMap<(Weight, i64), Vector> = BTreeMap::new();
    let mut add = |sv: &StateVector, sign: i64| {
        if sv.coords.is_empty() {
            return;
        }
        let e = acc
            .entry((sv.weight.clone(), sv.degree))
            .or_insert_with(|| vec![Rat::zero(); sv.coords.len()]);
        for (a, b) in e.iter_mut().zip(&sv.coords) {
            if sign > 0 {
                *a += b.clone();
            } else {
                *a -= b.clone();
            }
        }
    };
    for x in xs {
        add(x, 1);
    }
    for y in ys {
        add(y, -1);
    }
    acc.values().all(|v| v.iter().all(|c| c.is_zero()))
}

/// Quotient view: equality modulo the radical of the chi-form, decided by
/// pairing the difference against every normal-ordered partner word within
/// the family's length reach.
pub struct QuotientView<'a> {
    pub trunc: &'a VertexTruncation,
    pub family: &'a CorrFamily,
}

impl<'a> QuotientView<'a> {
    /// Pairing of a state against a word.
    fn pair_state_word(&self, x: &StateVector, partner: &[(usize, i64)]) -> Result<Rat> {
        if x.is_zero() {
            return Ok(Rat::zero());
        }
        let (words, coeffs) = self.trunc.to_words(x)?;
        let mut total = Rat::zero();
        for (word, c) in words.iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            let mut full = crate::quotient::monomial_star(word);
            full.extend(partner.iter().cloned());
            total += c.clone() * self.family.word_value(&full)?;
        }
        Ok(total)
    }

    /// Is the (graded) state list radical, i.e. zero in the quotient?
    pub fn is_radical(&self, xs: &[StateVector]) -> Result<bool> {
        // group by degree; pair against all partner words of that degree
        let mut by_degree: BTreeMap<i64, Vec<&StateVector>> = BTreeMap::new();
        for x in xs {
            if !x.is_zero() {
                by_degree.entry(x.degree).or_default().push(x);
            }
        }
        let n = self.trunc.tower.algebra.n;
        for (d, states) in by_degree {
            let max_x_len = states.iter().map(|s| s.weight.len()).max().unwrap_or(0);
            let cap = self.family.max_length.saturating_sub(max_x_len);
            for partner in normal_ordered_words(n, d, cap) {
                let mut total = Rat::zero();
                for x in &states {
                    total += self.pair_state_word(x, &partner)?;
                }
                if !total.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Equality in the quotient.
    pub fn eq_mod_radical(&self, xs: &[StateVector], ys: &[StateVector]) -> Result<bool> {
        let mut diff: Vec<StateVector> = xs.to_vec();
        for y in ys {
            diff.push(y.scale(&-Rat::one()));
        }
        self.is_radical(&diff)
    }
}

/// Every basis state of every graded piece within the degree range.
fn basis_states(trunc: &VertexTruncation, max_degree: i64) -> Vec<StateVector> {
    let mut out = Vec::new();
    for ((w, d), piece) in &trunc.pieces {
        if *d > max_degree {
            continue;
        }
        for k in 0..piece.dim() {
            let mut coords = vec![Rat::zero(); piece.dim()];
            coords[k] = Rat::one();
            out.push(StateVector {
                weight: w.clone(),
                degree: *d,
                coords,
            });
        }
    }
    out
}

/// (V2), (V3) and the sl2 commutation law (adDst) on generators.
pub fn check_unit_translation(trunc: &VertexTruncation, ranges: CheckRanges) -> Result<CheckReport> {
    let mut rep = CheckReport::new("unit_translation");
    let n = trunc.tower.algebra.n;
    let unit = trunc.unit();
    // 1(n)a = delta_{n,-1} a on all basis states
    for u in basis_states(trunc, ranges.max_degree) {
        for nn in ranges.n_min..=ranges.n_max {
            match trunc.state_product(&unit, nn, &u) {
                Ok(p) => {
                    let expect = if nn == -1 { u.clone() } else { trunc.zero(&u.weight, p.degree) };
                    let ok = if nn == -1 {
                        states_equal(&[p.clone()], &[expect])
                    } else {
                        p.is_zero()
                    };
                    rep.record(ok, || format!("1({nn}) on {:?} deg {}", u.weight, u.degree));
                }
                Err(Error::OutOfCutoff(_)) => rep.skip(),
                Err(e) => return Err(e),
            }
        }
    }
    // a(n)1 = D^{-n-1} a / (-n-1)!
    for g in 0..n {
        for nn in ranges.n_min..=ranges.n_max {
            let td = 1 - nn + 1;
            if td > ranges.max_degree.min(trunc.max_degree) {
                rep.skip();
                continue;
            }
            let got = trunc.generator_action(g, nn, &unit)?;
            let ok = if nn >= 0 {
                got.is_zero()
            } else {
                let mut expect = trunc.generator(g)?;
                for _ in 0..(-nn - 1) {
                    expect = trunc.sl2_action(Sl2Op::D, &expect)?;
                }
                let c = Rat::one() / factorial((-nn - 1) as u32);
                states_equal(&[got.clone()], &[expect.scale(&c)])
            };
            rep.record(ok, || format!("g{g}({nn}) 1"));
        }
    }
    // (V3): D(a(n)b) = (Da)(n)b + a(n)(Db) and (Da)(n)b = -n a(n-1)b
    for g in 0..n {
        for h in 0..n {
            let b = trunc.generator(h)?;
            let da = trunc.sl2_action(Sl2Op::D, &trunc.generator(g)?)?;
            let db = trunc.sl2_action(Sl2Op::D, &b)?;
            for nn in ranges.n_min..=ranges.n_max {
                let td = 2 + 2 - nn - 1 + 1;
                if td > trunc.max_degree || (2 + 3 - nn - 1) > trunc.max_degree {
                    rep.skip();
                    continue;
                }
                let anb = trunc.generator_action(g, nn, &b)?;
                let lhs = if anb.degree + 1 <= trunc.max_degree && anb.degree + 1 != 1 {
                    trunc.sl2_action(Sl2Op::D, &anb)?
                } else {
                    rep.skip();
                    continue;
                };
                let da_n_b = trunc.state_product(&da, nn, &b)?;
                let a_n_db = trunc.generator_action(g, nn, &db)?;
                rep.record(
                    states_equal(&[lhs.clone()], &[da_n_b.clone(), a_n_db.clone()]),
                    || format!("V3 leibniz g{g}({nn}) g{h}"),
                );
                // (Da)(n)b = -n a(n-1)b
                let rhs = trunc.generator_action(g, nn - 1, &b)?.scale(&rat(-nn));
                rep.record(
                    states_equal(&[da_n_b.clone()], &[rhs]),
                    || format!("V3 shift g{g}({nn}) g{h}"),
                );
            }
        }
    }
    // (adDst) on minimal generators: [D*, a(m)] u = (2 - m) a(m+1) u
    for g in 0..n {
        for u in basis_states(trunc, ranges.max_degree - 1) {
            for m in ranges.n_min..=ranges.n_max {
                let td = 2 + u.degree - m - 1;
                if td + 1 > trunc.max_degree
                    || td - 1 < -1
                    || u.weight.len() + 1 > trunc.max_length
                    || td > trunc.max_degree
                {
                    rep.skip();
                    continue;
                }
                let amu = trunc.generator_action(g, m, &u)?;
                let ds_amu = trunc.sl2_action(Sl2Op::Dstar, &amu)?;
                let dsu = if u.degree > 0 {
                    trunc.sl2_action(Sl2Op::Dstar, &u)?
                } else {
                    trunc.zero(&u.weight, u.degree - 1)
                };
                let a_dsu = trunc.generator_action(g, m, &dsu)?;
                let rhs = trunc
                    .generator_action(g, m + 1, &u)?
                    .scale(&rat(2 - m));
                let lhs_minus = a_dsu.scale(&-Rat::one());
                rep.record(
                    states_equal(&[ds_amu.clone(), lhs_minus.clone()], &[rhs.clone()]),
                    || format!("adDst g{g}({m}) on {:?} deg {}", u.weight, u.degree),
                );
            }
        }
    }
    Ok(rep)
}

/// (V4), quasi-symmetry and the associativity identity on generator-rooted
/// instances.
pub fn check_commutator(trunc: &VertexTruncation, ranges: CheckRanges) -> Result<CheckReport> {
    let mut rep = CheckReport::new("commutator_associativity");
    let n = trunc.tower.algebra.n;
    // (V4): a(m)(b(n)c) - b(n)(a(m)c) = sum_s C(m,s) (a(s)b)(m+n-s) c
    for ga in 0..n {
        for gb in 0..n {
            for c in basis_states(trunc, ranges.max_degree.min(trunc.max_degree - 0) - 2) {
                if c.weight.len() + 2 > trunc.max_length {
                    rep.skip();
                    continue;
                }
                for m in ranges.n_min..=ranges.n_max {
                    for nn in ranges.n_min..=ranges.n_max {
                        let d_bnc = 2 + c.degree - nn - 1;
                        let d_amc = 2 + c.degree - m - 1;
                        let d_final = d_bnc + 2 - m - 1;
                        if d_bnc > trunc.max_degree
                            || d_amc > trunc.max_degree
                            || d_final > trunc.max_degree
                        {
                            rep.skip();
                            continue;
                        }
                        let bnc = trunc.generator_action(gb, nn, &c)?;
                        let lhs1 = trunc.generator_action(ga, m, &bnc)?;
                        let amc = trunc.generator_action(ga, m, &c)?;
                        let lhs2 = trunc.generator_action(gb, nn, &amc)?;
                        let mut rhs: Vec<StateVector> = Vec::new();
                        let mut s = 0i64;
                        let mut in_cutoff = true;
                        while s <= 3 {
                            // a(s)b vanishes for s >= 4 by degree
                            let asb = trunc.generator_action(ga, s, &trunc.generator(gb)?)?;
                            if !asb.is_zero() {
                                let term_deg = asb.degree + c.degree - (m + nn - s) - 1;
                                if term_deg > trunc.max_degree {
                                    in_cutoff = false;
                                    break;
                                }
                                match trunc.state_product(&asb, m + nn - s, &c) {
                                    Ok(t) => rhs.push(t.scale(&binomial(m, s as u32))),
                                    Err(Error::OutOfCutoff(_)) => {
                                        in_cutoff = false;
                                        break;
                                    }
                                    Err(e) => return Err(e),
                                }
                            }
                            s += 1;
                        }
                        if !in_cutoff {
                            rep.skip();
                            continue;
                        }
                        let mut lhs = vec![lhs1.clone(), lhs2.scale(&-Rat::one())];
                        lhs.retain(|x| !x.coords.is_empty());
                        rep.record(states_equal(&lhs, &rhs), || {
                            format!(
                                "V4 g{ga}({m}) g{gb}({nn}) on {:?} deg {}",
                                c.weight, c.degree
                            )
                        });
                    }
                }
            }
        }
    }
    // quasi-symmetry on generator pairs
    for ga in 0..n {
        for gb in 0..n {
            let a = trunc.generator(ga)?;
            let b = trunc.generator(gb)?;
            for nn in ranges.n_min..=ranges.n_max {
                let td = 2 + 2 - nn - 1;
                if td > trunc.max_degree {
                    rep.skip();
                    continue;
                }
                let lhs = trunc.generator_action(ga, nn, &b)?;
                let mut rhs: Vec<StateVector> = Vec::new();
                let mut i = 0i64;
                loop {
                    let deg = 2 + 2 - (nn + i) - 1;
                    if deg < 0 {
                        break;
                    }
                    let mut term = trunc.generator_action(gb, nn + i, &a)?;
                    let mut fits = true;
                    for _ in 0..i {
                        if term.degree + 1 > trunc.max_degree {
                            fits = false;
                            break;
                        }
                        term = trunc.sl2_action(Sl2Op::D, &term)?;
                    }
                    if !fits {
                        rep.skip();
                        break;
                    }
                    let mut cf = Rat::one() / factorial(i as u32);
                    if (nn + i).rem_euclid(2) == 1 {
                        cf = -cf;
                    }
                    rhs.push(term.scale(&(-cf)));
                    i += 1;
                }
                rep.record(states_equal(&[lhs.clone()], &rhs), || {
                    format!("qs g{ga}({nn}) g{gb}")
                });
            }
        }
    }
    // associativity with composite left argument a(m)b
    for ga in 0..n {
        for gb in 0..n {
            let b = trunc.generator(gb)?;
            for c in basis_states(trunc, 2) {
                if c.weight.len() + 2 > trunc.max_length {
                    rep.skip();
                    continue;
                }
                for m in [-2i64, -1, 0, 1, 2, 3] {
                    for nn in [-1i64, 0, 1, 2] {
                        let x = trunc.generator_action(ga, m, &b)?;
                        if x.is_zero() {
                            continue;
                        }
                        if x.degree > trunc.max_degree
                            || x.degree + c.degree - nn - 1 > trunc.max_degree
                        {
                            rep.skip();
                            continue;
                        }
                        let lhs = match trunc.state_product(&x, nn, &c) {
                            Ok(v) => v,
                            Err(Error::OutOfCutoff(_)) => {
                                rep.skip();
                                continue;
                            }
                            Err(e) => return Err(e),
                        };
                        // right side: the two associativity sums
                        let mut rhs: Vec<StateVector> = Vec::new();
                        let mut fits = true;
                        let mut s = 0i64;
                        loop {
                            let inner_deg = 2 + c.degree - (nn + s) - 1;
                            if inner_deg < 0 {
                                break;
                            }
                            let bnsc = trunc.generator_action(gb, nn + s, &c)?;
                            if !bnsc.is_zero() {
                                if bnsc.degree + 2 - (m - s) - 1 > trunc.max_degree {
                                    fits = false;
                                    break;
                                }
                                let t = trunc.generator_action(ga, m - s, &bnsc)?;
                                let mut cf = binomial(m, s as u32);
                                if s % 2 == 1 {
                                    cf = -cf;
                                }
                                rhs.push(t.scale(&cf));
                            }
                            s += 1;
                        }
                        let mut s = m;
                        loop {
                            let outer_deg = 2 + c.degree - (m - s) - 1;
                            if outer_deg < 0 {
                                break;
                            }
                            let amsc = trunc.generator_action(ga, m - s, &c)?;
                            if !amsc.is_zero() {
                                if amsc.degree + 2 - (nn + s) - 1 > trunc.max_degree {
                                    fits = false;
                                    break;
                                }
                                let t = trunc.generator_action(gb, nn + s, &amsc)?;
                                let mut cf = binomial(m, (m - s) as u32);
                                if s.rem_euclid(2) == 1 {
                                    cf = -cf;
                                }
                                rhs.push(t.scale(&(-cf)));
                            }
                            s -= 1;
                        }
                        if !fits {
                            rep.skip();
                            continue;
                        }
                        rep.record(states_equal(&[lhs.clone()], &rhs), || {
                            format!(
                                "assoc (g{ga}({m})g{gb})({nn}) on {:?} deg {}",
                                c.weight, c.degree
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Virasoro relations (virconf) with c = 2<omega, omega>, plus the
/// generator relations (vir2check) and the grading eigenvalues, all in the
/// quotient.
pub fn check_virasoro(
    trunc: &VertexTruncation,
    view: &QuotientView,
) -> Result<CheckReport> {
    let mut rep = CheckReport::new("virasoro");
    let alg = &trunc.tower.algebra;
    let om = alg
        .omega
        .ok_or_else(|| Error::AlgebraInput("virasoro suite needs a unit".into()))?;
    let omega = trunc.generator(om)?;
    let c = alg.gram[(om, om)].clone() + alg.gram[(om, om)].clone();
    // omega(0) omega = D omega
    let lhs = trunc.generator_action(om, 0, &omega)?;
    let rhs = trunc.sl2_action(Sl2Op::D, &omega)?;
    record_or_skip(&mut rep, view.eq_mod_radical(&[lhs], &[rhs]), || {
        "omega(0)omega != D omega".into()
    })?;
    // omega(1) omega = 2 omega
    let lhs = trunc.generator_action(om, 1, &omega)?;
    record_or_skip(
        &mut rep,
        view.eq_mod_radical(&[lhs], &[omega.scale(&rat(2))]),
        || "omega(1)omega != 2 omega".into(),
    )?;
    // omega(2) omega = 0
    let lhs = trunc.generator_action(om, 2, &omega)?;
    rep.record(lhs.is_zero(), || "omega(2)omega != 0".into());
    // omega(3) omega = c/2
    let lhs = trunc.generator_action(om, 3, &omega)?;
    let half_c = c.clone() / rat(2);
    record_or_skip(
        &mut rep,
        view.eq_mod_radical(&[lhs], &[trunc.unit().scale(&half_c)]),
        || format!("omega(3)omega != c/2 = {}", format_rat(&half_c)),
    )?;
    // omega(n) omega = 0 for n >= 4
    for nn in 4..=6 {
        let lhs = trunc.generator_action(om, nn, &omega)?;
        rep.record(lhs.is_zero(), || format!("omega({nn})omega != 0"));
    }
    // (vir2check): a(0) omega = Da and a(1) omega = 2a for all generators
    for g in 0..alg.n {
        let a = trunc.generator(g)?;
        let lhs = trunc.generator_action(g, 0, &omega)?;
        let da = trunc.sl2_action(Sl2Op::D, &a)?;
        record_or_skip(&mut rep, view.eq_mod_radical(&[lhs], &[da]), || {
            format!("g{g}(0)omega != D g{g}")
        })?;
        let lhs = trunc.generator_action(g, 1, &omega)?;
        record_or_skip(
            &mut rep,
            view.eq_mod_radical(&[lhs], &[a.scale(&rat(2))]),
            || format!("g{g}(1)omega != 2 g{g}"),
        )?;
    }
    // omega(1) u = (deg u) u on basis states within reach
    for u in basis_states(trunc, trunc.max_degree - 0) {
        if u.weight.len() + 1 > trunc.max_length
            || u.weight.len() + 1 + u.weight.len() > view.family.max_length
        {
            rep.skip();
            continue;
        }
        let lhs = match trunc.generator_action(om, 1, &u) {
            Ok(v) => v,
            Err(Error::OutOfCutoff(_)) => {
                rep.skip();
                continue;
            }
            Err(e) => return Err(e),
        };
        record_or_skip(
            &mut rep,
            view.eq_mod_radical(&[lhs], &[u.scale(&rat(u.degree))]),
            || format!("omega(1) eigenvalue on {:?} deg {}", u.weight, u.degree),
        )?;
    }
    Ok(rep)
}

/// Griess recovery: products and pairings of the input algebra from the
/// vertex data, plus symmetry, invariance, and automorphism equivariance.
pub fn check_griess(
    trunc: &VertexTruncation,
    view: &QuotientView,
) -> Result<CheckReport> {
    let mut rep = CheckReport::new("griess_recovery");
    let alg = &trunc.tower.algebra;
    let n = alg.n;
    let gens: Vec<StateVector> = (0..n).map(|g| trunc.generator(g)).collect::<Result<_>>()?;
    // a(1)b = ab and a(3)b = <a,b> 1 in the quotient
    for i in 0..n {
        for j in 0..n {
            let a1b = trunc.generator_action(i, 1, &gens[j])?;
            let prod = &alg.product[i][j];
            let mut expect: Vec<StateVector> = Vec::new();
            for (g, cf) in prod.iter().enumerate() {
                if !cf.is_zero() {
                    expect.push(gens[g].scale(cf));
                }
            }
            record_or_skip(&mut rep, view.eq_mod_radical(&[a1b], &expect), || {
                format!("g{i}(1)g{j} != product")
            })?;
            let a3b = trunc.generator_action(i, 3, &gens[j])?;
            let pairing = alg.gram[(i, j)].clone();
            record_or_skip(
                &mut rep,
                view.eq_mod_radical(&[a3b], &[trunc.unit().scale(&pairing)]),
                || format!("g{i}(3)g{j} != <g{i},g{j}>"),
            )?;
            // (3)-pairing symmetry
            let b3a = trunc.generator_action(j, 3, &gens[i])?;
            let a3b = trunc.generator_action(i, 3, &gens[j])?;
            record_or_skip(&mut rep, view.eq_mod_radical(&[a3b], &[b3a]), || {
                format!("(3)-pairing asymmetric at ({i},{j})")
            })?;
        }
    }
    // invariance <ab, c> = <a, bc> recomputed from vertex data:
    // (a(1)b)(3)c vs a(3)(b(1)c) evaluated by chi
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let ab = trunc.generator_action(i, 1, &gens[j])?;
                let lhs = match trunc.state_product(&ab, 3, &gens[k]) {
                    Ok(v) => v,
                    Err(Error::OutOfCutoff(_)) => {
                        rep.skip();
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let bc = trunc.generator_action(j, 1, &gens[k])?;
                let rhs = trunc.state_product(&gens[i].clone(), 3, &bc)?;
                record_or_skip(&mut rep, view.eq_mod_radical(&[lhs], &[rhs]), || {
                    format!("invariance at ({i},{j},{k})")
                })?;
            }
        }
    }
    // automorphism equivariance: g(u)(n)g(w) = g(u(n)w) on generator pairs
    for (ai, auto) in alg.automorphisms.iter().enumerate() {
        let image = |g: usize| -> Vec<StateVector> {
            let col: Vec<Rat> = (0..n).map(|r| auto[(r, g)].clone()).collect();
            col.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(r, c)| gens[r].scale(c))
                .collect()
        };
        for i in 0..n {
            for j in 0..n {
                for nn in [1i64, 3] {
                    // lhs: sum over images
                    let gi = image(i);
                    let gj = image(j);
                    let mut lhs: Vec<StateVector> = Vec::new();
                    for x in &gi {
                        for y in &gj {
                            // x, y are scaled generators: combine actions
                            let gx = x.weight.0[0];
                            let cy = &y.coords[0];
                            let cx = &x.coords[0];
                            let act = trunc.generator_action(gx, nn, &y.scale(&(Rat::one() / cy.clone())))?;
                            lhs.push(act.scale(&(cx.clone() * cy.clone())));
                        }
                    }
                    // rhs: image of u(n)w expanded over generators
                    let unw = trunc.generator_action(i, nn, &gens[j])?;
                    // expand u(n)w in the quotient against A: for nn = 1 the
                    // result is the product (degree 2), for nn = 3 a scalar
                    let rhs: Vec<StateVector> = if nn == 1 {
                        let prod = &alg.product[i][j];
                        let mut img = vec![Rat::zero(); n];
                        for (g, cf) in prod.iter().enumerate() {
                            if cf.is_zero() {
                                continue;
                            }
                            for r in 0..n {
                                let add = auto[(r, g)].clone() * cf.clone();
                                img[r] += add;
                            }
                        }
                        img.iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(r, c)| gens[r].scale(c))
                            .collect()
                    } else {
                        let _ = unw;
                        vec![trunc.unit().scale(&alg.gram[(i, j)])]
                    };
                    record_or_skip(&mut rep, view.eq_mod_radical(&lhs, &rhs), || {
                        format!("automorphism {ai} equivariance at ({i},{j},{nn})")
                    })?;
                }
            }
        }
    }
    Ok(rep)
}

/// Degree-zero polynomiality bookkeeping: for inputs with at most one
/// essential non-omega generator the glued degree-zero space stays trivial;
/// in general the symmetrized-square pairs of new generators must inject.
pub fn check_b0_polynomiality(tower: &CoalgebraTower, max_length: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("b0_polynomiality");
    let alg = &tower.algebra;
    let essential = match alg.omega {
        Some(_) => alg.n - 1,
        None => alg.n,
    };
    if essential <= 1 {
        for l in 0..=max_length.min(tower.max_length) {
            rep.record(tower.b0_dims[l] == 1, || {
                format!("B_0^({l}) has dimension {}", tower.b0_dims[l])
            });
        }
        return Ok(rep);
    }
    // generator dimensions per weight (kernel of the pole-data map)
    let mut gen_dims: BTreeMap<usize, usize> = BTreeMap::new();
    for (w, g) in &tower.new_gens {
        *gen_dims.entry(w.len()).or_insert(0) += g;
    }
    // growth bookkeeping: dim B_0^{(l)} - dim B_0^{(l-1)} = new generators
    for l in 1..=max_length.min(tower.max_length) {
        let growth = tower.b0_dims[l] - tower.b0_dims[l - 1];
        let gens = gen_dims.get(&l).copied().unwrap_or(0);
        rep.record(growth == gens, || {
            format!("level {l}: growth {growth} != generator count {gens}")
        });
    }
    // symmetrized-square injectivity: with no generators below the length
    // cutoff the square is zero-dimensional and the map injects trivially;
    // nontrivial products first appear at twice the first generator length.
    let first_gen = (1..=max_length.min(tower.max_length))
        .find(|l| gen_dims.get(l).copied().unwrap_or(0) > 0);
    match first_gen {
        None => {
            rep.record(true, || unreachable!());
        }
        Some(l0) => {
            if 2 * l0 > tower.max_length {
                rep.skip();
            } else {
                // dim Sym^2 at length 2*l0 vs the product span in B_0
                let g0 = gen_dims[&l0];
                let sym2 = g0 * (g0 + 1) / 2;
                let ambient = weights_of_length(alg.n, 2 * l0)
                    .iter()
                    .map(|w| tower.new_gens.get(w).copied().unwrap_or(0))
                    .sum::<usize>();
                let _ = ambient;
                rep.record(sym2 <= tower.b0_dims[2 * l0] - 1, || {
                    format!("square of {g0} generators cannot embed at length {}", 2 * l0)
                });
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::{build_tower, internalize, load_algebra};
    use crate::funspaces::SpaceCache;
    use crate::quotient::augmentation_character;
    use crate::vertexbuild::build_truncation;

    fn setup(doc: &str, l: usize, d: i64) -> (VertexTruncation, CorrFamily) {
        let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
        let mut cache = SpaceCache::new();
        let tower = build_tower(alg, l, &mut cache).unwrap();
        let chi = augmentation_character(&tower).unwrap();
        let family = CorrFamily::from_character(&chi);
        (build_truncation(tower, l, d).unwrap(), family)
    }

    const VIR: &str = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"1/16"]],"unit":["1"]}"#;

    #[test]
    fn unit_translation_suite_virasoro() {
        let (trunc, _) = setup(VIR, 3, 6);
        let rep = check_unit_translation(&trunc, CheckRanges::default()).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
        assert!(rep.attempted > 20);
    }

    #[test]
    fn commutator_suite_virasoro() {
        let (trunc, _) = setup(VIR, 3, 8);
        let mut ranges = CheckRanges::default();
        ranges.max_degree = 4;
        let rep = check_commutator(&trunc, ranges).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures.iter().take(3).collect::<Vec<_>>());
        assert!(rep.attempted > 50);
    }

    #[test]
    fn virasoro_suite() {
        // c = 1/2: <e,e> = 1/16, omega(3)omega = c/2 = 1/4
        let (trunc, family) = setup(VIR, 4, 6);
        let view = QuotientView { trunc: &trunc, family: &family };
        let rep = check_virasoro(&trunc, &view).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn griess_suite_twodim() {
        let doc = r#"{"dim":2,"basis":["e","x"],
            "product":[[1,1,["1","0"]],[1,2,["0","1"]],[2,2,["1","0"]]],
            "form":[[1,1,"1/4"],[1,2,"0"],[2,2,"1/4"]],
            "unit":["1","0"],
            "automorphisms":[[["1","0"],["0","-1"]]]}"#;
        let (trunc, family) = setup(doc, 4, 6);
        let view = QuotientView { trunc: &trunc, family: &family };
        let rep = check_griess(&trunc, &view).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn b0_suite() {
        let (trunc, _) = setup(VIR, 4, 4);
        let rep = check_b0_polynomiality(&trunc.tower, 4).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn fault_injection_is_detected() {
        // corrupting a structure constant must produce a failure witness
        let (trunc, _) = setup(VIR, 3, 6);
        let omega = trunc.generator(0).unwrap();
        let good = trunc.generator_action(0, 1, &omega).unwrap();
        let mut bad = good.clone();
        bad.coords[0] += Rat::one();
        assert!(!states_equal(&[good], &[bad]));
    }
}
