use griess::coalgebra::*;
use griess::funspaces::*;
use griess::ratfun::RatFun;
use griess::rat::rat;
use griess::Rat;
use num_traits::Zero;
use std::collections::BTreeMap;

fn pole(l: usize, i: usize, j: usize, k: i64) -> RatFun {
    let mut d = BTreeMap::new();
    d.insert((i, j), k);
    RatFun { nvars: l, numer: griess::poly::Poly::one(l), diag: d }
}

fn main() {
    let doc = r#"{"dim":2,"basis":["e","x"],
        "product":[[1,1,["1","0"]],[1,2,["0","1"]],[2,2,["1","0"]]],
        "form":[[1,1,"1/4"],[1,2,"0"],[2,2,"1/4"]],
        "unit":["1","0"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    let f = vec![rat(1)];
    // check each basis-tensor weight at l = 4 against the six-term formula
    for w in weights_of_length(2, 4) {
        let got = tower.phi_tensor(&f, 4, &w.0).unwrap();
        let a: Vec<Vec<Rat>> = w.0.iter().map(|&g| tower.algebra.basis_vec(g)).collect();
        let form = |x: &Vec<Rat>, y: &Vec<Rat>| tower.algebra.form(x, y);
        let prod = |x: &Vec<Rat>, y: &Vec<Rat>| tower.algebra.prod(x, y);
        let mut expect = pole(4,0,1,-4).mul(&pole(4,2,3,-4)).scale(&(form(&a[0],&a[1])*form(&a[2],&a[3])));
        expect = expect.add(&pole(4,0,2,-4).mul(&pole(4,1,3,-4)).scale(&(form(&a[0],&a[2])*form(&a[1],&a[3]))));
        expect = expect.add(&pole(4,0,3,-4).mul(&pole(4,1,2,-4)).scale(&(form(&a[0],&a[3])*form(&a[1],&a[2]))));
        expect = expect.add(&pole(4,0,1,-2).mul(&pole(4,2,3,-2)).mul(&pole(4,0,2,-1)).mul(&pole(4,0,3,-1)).mul(&pole(4,1,2,-1)).mul(&pole(4,1,3,-1)).scale(&form(&prod(&a[0],&a[1]),&prod(&a[2],&a[3]))));
        expect = expect.add(&pole(4,0,2,-2).mul(&pole(4,1,3,-2)).mul(&pole(4,0,1,-1)).mul(&pole(4,0,3,-1)).mul(&pole(4,1,2,-1)).mul(&pole(4,2,3,-1)).scale(&form(&prod(&a[0],&a[2]),&prod(&a[1],&a[3]))));
        expect = expect.add(&pole(4,0,3,-2).mul(&pole(4,1,2,-2)).mul(&pole(4,0,1,-1)).mul(&pole(4,0,2,-1)).mul(&pole(4,1,3,-1)).mul(&pole(4,2,3,-1)).scale(&form(&prod(&a[0],&a[3]),&prod(&a[1],&a[2]))));
        let diff = got.sub(&expect);
        let dim = tower.omega0[&w].dim();
        if diff.is_zero() {
            println!("weight {:?}: OK (dim {})", w.0, dim);
        } else {
            println!("weight {:?}: MISMATCH (dim {})", w.0, dim);
            println!("  diff poles: {:?}", diff.diag);
            println!("  diff admissible: {:?}", is_admissible(&diff));
            println!("  diff is multiple of expect: {}", {
                // try ratio at a point
                let pt: Vec<Rat> = (1..=4).map(|i| rat(i*i+3)).collect();
                let dv = diff.eval(&pt).unwrap();
                let ev = expect.eval(&pt).unwrap();
                if ev.is_zero() { "expect=0".to_string() } else { format!("{}", griess::rat::format_rat(&(dv/ev))) }
            });
        }
    }
}
