use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::vertexbuild::*;
use std::time::Instant;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"10/8"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 3, &mut cache).unwrap();
    let t1 = Instant::now();
    let trunc = build_truncation(tower, 3, 6).unwrap();
    eprintln!("truncation L=3 D=6: {:?} pieces={}", t1.elapsed(), trunc.pieces.len());
    let t2 = Instant::now();
    let omega = trunc.generator(0).unwrap();
    eprintln!("generator: {:?}", t2.elapsed());
    let t3 = Instant::now();
    let o = trunc.generator_action(0, -1, &omega).unwrap();
    eprintln!("omega(-1)omega: {:?} dim {}", t3.elapsed(), o.coords.len());
    let t4 = Instant::now();
    let rep = trunc.word_rep(&Weight::new(vec![0,0]), 4).unwrap();
    eprintln!("word_rep (2w,4): {:?} words {}", t4.elapsed(), rep.words.len());
    let t5 = Instant::now();
    let rep2 = trunc.word_rep(&Weight::new(vec![0,0,0]), 6).unwrap();
    eprintln!("word_rep (3w,6): {:?} words {}", t5.elapsed(), rep2.words.len());
}
