use griess::funspaces::*;
use griess::ratfun::RatFun;
use std::collections::BTreeMap;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let mut cache = SpaceCache::new();
    let r4 = cache.admissible(4).unwrap().clone();
    eprintln!("admissible(4): {:?}", t0.elapsed());
    let coeffs: Vec<griess::Rat> = (0..6).map(|k| griess::rat::ratio(k as i64 + 1, 2)).collect();
    let alpha = r4.from_coordinates(&coeffs);
    let t1 = Instant::now();
    let mut data = BTreeMap::new();
    for i in 0..4usize {
        for j in (i + 1)..4usize {
            for k in [-2i64, -4] {
                data.insert((i, j, k), alpha.rho_embedded(i, j, k));
            }
        }
    }
    eprintln!("rho data: {:?}", t1.elapsed());
    let t2 = Instant::now();
    let found = prescribe_poles(&mut cache, 4, &data).unwrap();
    eprintln!("prescribe: {:?}", t2.elapsed());
    let _ = found;
}
