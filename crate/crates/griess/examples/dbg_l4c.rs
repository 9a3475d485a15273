use griess::coalgebra::*;
use griess::funspaces::*;
use griess::ratfun::RatFun;
use griess::rat::{rat, format_rat};
use griess::Rat;
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
    // weight (x,x,x,x): internal x = 0
    let got = tower.phi_tensor(&f, 4, &[0, 0, 0, 0]).unwrap();
    let shapes = vec![
        pole(4,0,1,-4).mul(&pole(4,2,3,-4)),
        pole(4,0,2,-4).mul(&pole(4,1,3,-4)),
        pole(4,0,3,-4).mul(&pole(4,1,2,-4)),
        pole(4,0,1,-2).mul(&pole(4,2,3,-2)).mul(&pole(4,0,2,-1)).mul(&pole(4,0,3,-1)).mul(&pole(4,1,2,-1)).mul(&pole(4,1,3,-1)),
        pole(4,0,2,-2).mul(&pole(4,1,3,-2)).mul(&pole(4,0,1,-1)).mul(&pole(4,0,3,-1)).mul(&pole(4,1,2,-1)).mul(&pole(4,2,3,-1)),
        pole(4,0,3,-2).mul(&pole(4,1,2,-2)).mul(&pole(4,0,1,-1)).mul(&pole(4,0,2,-1)).mul(&pole(4,1,3,-1)).mul(&pole(4,2,3,-1)),
    ];
    let space = echelonized_space(4, SpaceKind::Admissible, &shapes);
    println!("shape span dim = {}", space.dim());
    let coords = space.coordinates(&got).unwrap().unwrap();
    // re-express: solve got = sum c_i shape_i directly
    let vecs: Vec<Vec<Rat>> = shapes.iter().map(|s| space.coordinates(s).unwrap().unwrap()).collect();
    let m = griess::linalg::Matrix::from_rows(vecs).transpose();
    let c = griess::linalg::solve(&m, &coords).unwrap();
    // for x: <x,x> = 1/4, x*x = omega/2: <xx,xx> = 1/4<omega... <w/2,w/2> = 1/4 * 1 = 1/4
    println!("expected scalars: quartic terms 1/16, double terms +-1/4*...");
    for (i, ci) in c.iter().enumerate() {
        println!("shape {}: {}", i + 1, format_rat(ci));
    }
}
