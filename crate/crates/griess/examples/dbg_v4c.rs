use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::vertexbuild::*;
use griess::rat::format_rat;
use griess::Rat;
use num_traits::One;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"1/16"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 3, &mut cache).unwrap();
    let t = build_truncation(tower, 3, 8).unwrap();
    let omega = t.generator(0).unwrap();

    let w0w = t.generator_action(0, 0, &omega).unwrap();  // degree 3, weight 2w
    let w1w = t.generator_action(0, 1, &omega).unwrap();  // degree 2, weight 2w
    let mut d3_w0w = w0w.clone();
    for _ in 0..3 { d3_w0w = t.sl2_action(Sl2Op::D, &d3_w0w).unwrap(); }
    let mut d4_w1w = w1w.clone();
    for _ in 0..4 { d4_w1w = t.sl2_action(Sl2Op::D, &d4_w1w).unwrap(); }
    println!("D3(w(0)w): {:?}", d3_w0w.coords.iter().map(format_rat).collect::<Vec<_>>());
    println!("D4(w(1)w): {:?}", d4_w1w.coords.iter().map(format_rat).collect::<Vec<_>>());
    // relation forced by V4 both ways: D4(w(1)w) == 2 D3(w(0)w)
    let rel = d4_w1w.coords.iter().zip(&d3_w0w.coords)
        .all(|(a, b)| *a == b.clone() + b.clone());
    println!("D4(w(1)w) == 2 D3(w(0)w)? {rel}");

    // Leibniz on higher-degree u: w(0)(Du) == D(w(0)u) for u = D^k w
    let mut u = omega.clone();
    for k in 0..3 {
        let du = t.sl2_action(Sl2Op::D, &u).unwrap();
        let lhs = t.generator_action(0, 0, &du).unwrap();
        let w0u = t.generator_action(0, 0, &u).unwrap();
        let rhs = t.sl2_action(Sl2Op::D, &w0u).unwrap();
        println!("k={k}: w(0)(Du) == D(w(0)u)? {}", lhs.coords == rhs.coords);
        u = du;
    }
}
