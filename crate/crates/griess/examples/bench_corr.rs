use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::quotient::*;
use std::time::Instant;

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"5/4"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let t0 = Instant::now();
    let tower = build_tower(alg.clone(), 4, &mut cache).unwrap();
    eprintln!("tower L=4: {:?}", t0.elapsed());
    let t1 = Instant::now();
    let chi = augmentation_character(&tower).unwrap();
    eprintln!("character: {:?}", t1.elapsed());
    let mut family = CorrFamily::from_character(&chi);
    let t2 = Instant::now();
    family.extend_omega(&alg, 6).unwrap();
    for (w, s) in &family.functions {
        let total: usize = s.iter().map(|f| f.numer.terms.len()).sum();
        eprintln!("  weight {:?}: {} summands, {} total terms", w.0, s.len(), total);
    }
    eprintln!("extend to 6: {:?}", t2.elapsed());
    for d in [0i64, 2, 3] {
        let t = Instant::now();
        let r = corr_quotient_dim(&family, 1, d, 3, 6).unwrap();
        eprintln!("corr dim d={d}: {r} ({:?})", t.elapsed());
    }
}
