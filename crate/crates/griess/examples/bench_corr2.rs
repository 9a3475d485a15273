use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::quotient::*;
use std::time::Instant;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"5/4"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg.clone(), 4, &mut cache).unwrap();
    let chi = augmentation_character(&tower).unwrap();
    let mut family = CorrFamily::from_character(&chi);
    family.extend_omega(&alg, 6).unwrap();
    // single length-6 word: <L_{-2}^3 0, L_{-2}^3 0> -> star(W) W:
    // W = w(-1) w(-1) w(-1); star = w(3) w(3) w(3)
    let w: Vec<(usize,i64)> = vec![(0,-1),(0,-1),(0,-1)];
    let t = Instant::now();
    let v = family.pair_words(&w, &w).unwrap();
    eprintln!("<L-2^3, L-2^3> = {} ({:?})", griess::rat::format_rat(&v), t.elapsed());
    let t = Instant::now();
    let w2: Vec<(usize,i64)> = vec![(0,-2),(0,-1)];
    let v2 = family.pair_words(&w2, &w2).unwrap();
    eprintln!("len-4 pairing = {} ({:?})", griess::rat::format_rat(&v2), t.elapsed());
}
