use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::vertexbuild::*;
use griess::rat::{rat, factorial, format_rat};
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

    // term-by-term: x(-k)1 via word route vs D-powers (V2)
    for (label, x, k) in [
        ("w(0)w", t.generator_action(0, 0, &omega).unwrap(), 4i64),
        ("w(1)w", t.generator_action(0, 1, &omega).unwrap(), 5i64),
    ] {
        let via_words = t.state_product(&x, -k, &unit).unwrap();
        let mut dp = x.clone();
        for _ in 0..(k - 1) { dp = t.sl2_action(Sl2Op::D, &dp).unwrap(); }
        let dp = dp.scale(&(Rat::one() / factorial((k - 1) as u32)));
        let same = via_words.coords == dp.coords;
        println!("{label}(-{k})1: word route == D-powers ? {same}");
        if !same {
            println!("  words: {:?}", via_words.coords.iter().map(format_rat).collect::<Vec<_>>());
            println!("  Dpows: {:?}", dp.coords.iter().map(format_rat).collect::<Vec<_>>());
        }
    }
    // lhs2 = w(0)(w(-4)1)
    let amc = t.generator_action(0, -4, &unit).unwrap();
    let lhs2 = t.generator_action(0, 0, &amc).unwrap();
    println!("lhs2 coords: {:?}", lhs2.coords.iter().map(format_rat).collect::<Vec<_>>());
    let s0 = {
        let x = t.generator_action(0, 0, &omega).unwrap();
        t.state_product(&x, -4, &unit).unwrap()
    };
    let s1 = {
        let x = t.generator_action(0, 1, &omega).unwrap();
        t.state_product(&x, -5, &unit).unwrap().scale(&rat(-4))
    };
    let mut rhs = s0.clone();
    rhs.add_assign(&s1);
    println!("rhs  coords: {:?}", rhs.coords.iter().map(format_rat).collect::<Vec<_>>());
    let mut diff = lhs2.clone();
    diff.add_assign(&rhs.scale(&-Rat::one()));
    println!("diff zero: {}", diff.is_zero());
}
