use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use std::time::Instant;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"10/8"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let t0 = Instant::now();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    eprintln!("tower L=4: {:?}", t0.elapsed());
    for l in 0..=4usize {
        for w in weights_of_length(1, l) {
            eprintln!("  omega0 {:?}: dim {}", w.0, tower.omega0[&w].dim());
        }
    }
    for d in 0..=6i64 {
        if d == 1 { continue; }
        for l in 0..=2usize {
            for w in weights_of_length(1, l) {
                let t = Instant::now();
                let layer = coalgebra_layer(&tower, &w, d, 4).unwrap();
                eprintln!("layer {:?} d={}: dim {} ({:?})", w.0, d, layer.dim(), t.elapsed());
            }
        }
    }
}
