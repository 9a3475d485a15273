use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use std::time::Instant;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"5/4"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let mut tower = CoalgebraTower::new(alg);
    for l in 1..=6 {
        let t = Instant::now();
        extend_tower(&mut tower, &mut cache).unwrap();
        let w = Weight::new(vec![0; l]);
        let s = &tower.omega0[&w];
        let terms = s.basis.first().map(|f| f.numer.terms.len()).unwrap_or(0);
        eprintln!("level {l}: dim {} numer_terms {} ({:?})", s.dim(), terms, t.elapsed());
    }
}
