use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use std::time::Instant;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"10/8"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    for l in (2..=4usize).rev() {
        for w in weights_of_length(1, l) {
            for d in [0i64, 2, 3, 4, 5, 6] {
                let t = Instant::now();
                let layer = coalgebra_layer(&tower, &w, d, 4).unwrap();
                eprintln!("layer {:?} d={}: dim {} ({:?})", w.0, d, layer.dim(), t.elapsed());
            }
        }
    }
}
