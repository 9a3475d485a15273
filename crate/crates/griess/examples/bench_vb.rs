use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::vertexbuild::*;
use griess::rat::rat;
use std::time::Instant;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"10/8"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let t0 = Instant::now();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    eprintln!("tower L=4: {:?}", t0.elapsed());
    let t1 = Instant::now();
    let trunc = build_truncation(tower, 4, 6).unwrap();
    eprintln!("truncation D=6: {:?}  pieces={}", t1.elapsed(), trunc.pieces.len());
    for ((w, d), p) in &trunc.pieces {
        eprintln!("  piece {:?} d={}: dim {}", w.0, d, p.dim());
    }
    let t2 = Instant::now();
    let omega = trunc.generator(0).unwrap();
    let o1o = trunc.generator_action(0, 1, &omega).unwrap();
    eprintln!("gen action: {:?} -> dim {}", t2.elapsed(), o1o.coords.len());
    let t3 = Instant::now();
    let d_omega = trunc.sl2_action(Sl2Op::D, &omega).unwrap();
    let _ = trunc.state_product(&d_omega, 1, &omega).unwrap();
    eprintln!("state product: {:?}", t3.elapsed());
}
