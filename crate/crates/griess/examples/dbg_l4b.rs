use griess::coalgebra::*;
use griess::funspaces::*;
use griess::rat::rat;

fn main() {
    let doc = r#"{"dim":2,"basis":["e","x"],
        "product":[[1,1,["1","0"]],[1,2,["0","1"]],[2,2,["1","0"]]],
        "form":[[1,1,"1/4"],[1,2,"0"],[2,2,"1/4"]],
        "unit":["1","0"]}"#;
    let alg = internalize(&load_algebra(doc).unwrap()).unwrap();
    let mut cache = SpaceCache::new();
    let tower = build_tower(alg, 4, &mut cache).unwrap();
    let f = vec![rat(1)];
    for w in weights_of_length(2, 4) {
        if tower.omega0[&w].dim() == 0 { continue; }
        let fun = tower.phi_tensor(&f, 4, &w.0).unwrap();
        for i in 0..4usize {
            for j in (i+1)..4 {
                for k in [1u8, 3u8] {
                    let rho_k = if k == 1 { -2 } else { -4 };
                    let lhs = fun.rho_embedded(i, j, rho_k);
                    let lt = r_map(&tower.algebra, &w.0, i, j, k);
                    let dead: Vec<usize> = if k == 1 { vec![i] } else { vec![i, j] };
                    let rhs = tower.phi_lin_embedded(&f, 4, &lt, 4, &dead).unwrap();
                    if lhs != rhs {
                        println!("w={:?} (i,j,k)=({i},{j},{k}): RHOPHI BROKEN", w.0);
                    }
                }
            }
        }
        println!("w={:?} checked", w.0);
    }
}
