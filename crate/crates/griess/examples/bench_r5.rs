use griess::funspaces::*;
use std::time::Instant;

fn main() {
    let mut cache = SpaceCache::new();
    let t0 = Instant::now();
    let d40 = cache.indecomposable(4).unwrap().dim();
    eprintln!("dim R_0^4 = {d40}  ({:?})", t0.elapsed());
    let t1 = Instant::now();
    let d4 = cache.admissible(4).unwrap().dim();
    eprintln!("dim R^4  = {d4}  ({:?})", t1.elapsed());
    let t2 = Instant::now();
    let d50 = cache.indecomposable(5).unwrap().dim();
    eprintln!("dim R_0^5 = {d50}  ({:?})", t2.elapsed());
    let t3 = Instant::now();
    let d5 = cache.admissible(5).unwrap().dim();
    eprintln!("dim R^5  = {d5}  ({:?})", t3.elapsed());
    let t4 = Instant::now();
    let s5 = cache.simple_pole(5).unwrap().dim();
    let s50 = cache.simple_pole_indecomposable(5).unwrap().dim();
    eprintln!("dim S^5 = {s5}, dim S_0^5 = {s50}  ({:?})", t4.elapsed());
}
