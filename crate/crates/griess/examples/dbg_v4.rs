use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::vertexbuild::*;
use griess::rat::{rat, binomial, factorial};
use griess::Rat;
use num_traits::One;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"1/16"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 3, &mut cache).unwrap();
    let t = build_truncation(tower, 3, 8).unwrap();
    let omega = t.generator(0).unwrap();
    let unit = t.unit();

    // independent check A: (D omega)(-4) 1 = 4 omega(-5) 1 = D^4 omega / 3!
    let d_omega = t.sl2_action(Sl2Op::D, &omega).unwrap();
    let lhs = t.state_product(&d_omega, -4, &unit).unwrap();
    let rhs = t.generator_action(0, -5, &unit).unwrap().scale(&rat(4));
    println!("A: (Dw)(-4)1 == 4 w(-5)1 ? {}", lhs.coords == rhs.coords && lhs.degree == rhs.degree);

    // independent check B: v0 = w(3)w; v0(-7)1 = D^6 v0 / 6!
    let v0 = t.generator_action(0, 3, &omega).unwrap();
    let lhs = t.state_product(&v0, -7, &unit).unwrap();
    let mut rhs = v0.clone();
    for _ in 0..6 { rhs = t.sl2_action(Sl2Op::D, &rhs).unwrap(); }
    let rhs = rhs.scale(&(Rat::one() / factorial(6)));
    println!("B: v0(-7)1 == D^6 v0/6! ? {} (degrees {} vs {})", lhs.coords == rhs.coords, lhs.degree, rhs.degree);

    // the failing V4 instance: m=-4, n=0, c=1
    let m = -4i64; let n = 0i64;
    let bnc = t.generator_action(0, n, &unit).unwrap();
    let lhs1 = t.generator_action(0, m, &bnc).unwrap();
    let amc = t.generator_action(0, m, &unit).unwrap();
    let lhs2 = t.generator_action(0, n, &amc).unwrap();
    println!("lhs1 zero: {} lhs2 deg {} dim {}", lhs1.is_zero(), lhs2.degree, lhs2.coords.len());
    // rhs terms
    for s in 0..=3i64 {
        let asb = t.generator_action(0, s, &omega).unwrap();
        if asb.is_zero() { println!("s={s}: asb = 0"); continue; }
        let tprod = t.state_product(&asb, m + n - s, &unit).unwrap();
        println!("s={s}: C={} asb deg {} term deg {} zero={}", griess::rat::format_rat(&binomial(m, s as u32)), asb.degree, tprod.degree, tprod.is_zero());
    }
    // also: w(n)(w(-4)1) with w(-4)1 = D^3 w/6: use V3+qs independent route:
    // w(0) x = D-related? compute w(0)(D^3 w)/6 via Leibniz: D(w(0)y)=...
    // simpler independent: w(0)y for y = D^3 omega / 3!... skip
}
