use griess::coalgebra::*;
use griess::funspaces::SpaceCache;
use griess::ratfun::RatFun;
use griess::rat::format_rat;
use griess::Rat;
use num_traits::Zero;

// coefficient of z1^{p1} z2^{p2} in a 2-variable function
fn coeff2(f: &RatFun, p1: i64, p2: i64) -> Rat {
    for (pw1, c1) in f.series_at_infinity(0, p1) {
        if pw1 != p1 { continue; }
        let g = c1.remove_var(0).unwrap();
        for (pw2, c2) in g.series_at_infinity(0, p2) {
            if pw2 != p2 { continue; }
            let h = c2.remove_var(0).unwrap();
            return h.numer.terms.values().next().cloned().unwrap_or_else(Rat::zero);
        }
    }
    Rat::zero()
}

fn main() {
    let doc = r#"{"dim":1,"basis":["e"],"product":[[1,1,["1"]]],"form":[[1,1,"1/16"]],"unit":["1"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 3, &mut cache).unwrap();
    let w2 = Weight::new(vec![0, 0]);
    let layer6 = coalgebra_layer(&tower, &w2, 6, 3).unwrap();
    println!("layer (2w,6) dim {}", layer6.dim());
    // dual-side test of the relation forced by V4:
    // coeff_{z1^-2 z2^0}(Delta^4 a) == 2 coeff_{z1^-1 z2^0}(Delta^3 a)
    let mut all_ok = true;
    for (k, a) in layer6.basis.iter().enumerate() {
        let mut d3 = a.clone();
        for _ in 0..3 { d3 = d3.apply_delta(); }
        let d4 = d3.apply_delta();
        let lhs = coeff2(&d4, -2, 0);
        let rhs = coeff2(&d3, -1, 0);
        let ok = lhs == rhs.clone() + rhs.clone();
        if !ok {
            println!("  basis {k}: lhs {} rhs {}", format_rat(&lhs), format_rat(&rhs));
            all_ok = false;
        }
    }
    println!("dual-side relation holds on the whole layer: {all_ok}");
}
