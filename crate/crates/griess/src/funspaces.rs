//! Bases of the function spaces: regular, admissible `R^l`, indecomposable
//! `R_0^l`, simple-pole `S^l`, `S_0^l`, and the free-mode (order-bounded)
//! graded pieces, plus the Mittag-Leffler solver and the degree-0
//! reconstruction formula.
//!
//! Indecomposable spaces are exact kernels inside the order `>= -2` monomial
//! space; admissible spaces are assembled as products of indecomposables
//! over set partitions, which keeps the l = 5 computation inside a
//! 1001-dimensional candidate space instead of a 46000-dimensional one.

use crate::error::{Error, Result};
use crate::linalg::{rref_kernel, solve, Matrix, Subspace, Vector};
use crate::poly::{Expo, Poly};
use crate::rat::{rat, Rat};
use crate::ratfun::{PartitionSpec, RatFun, WeightVector};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// OZ slot degrees: every tensor slot has degree 2.
pub fn oz_weights(l: usize) -> WeightVector {
    vec![2; l]
}

// ---------------------------------------------------------------------------
// Monomial coordinates
// ---------------------------------------------------------------------------

/// Shared monomial indexing for a family of functions: all diagonals are
/// lowered to the componentwise minimum exponent and the adjusted numerators
/// are read off against a common monomial list.
#[derive(Clone, Debug)]
pub struct FunCoords {
    pub nvars: usize,
    pub diag_min: BTreeMap<(usize, usize), i64>,
    pub monomials: Vec<Expo>,
    index: BTreeMap<Expo, usize>,
}

impl FunCoords {
    pub fn build(funs: &[RatFun]) -> FunCoords {
        let nvars = funs.first().map(|f| f.nvars).unwrap_or(0);
        let mut diag_min: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for f in funs {
            for (&p, &k) in &f.diag {
                let e = diag_min.entry(p).or_insert(0);
                *e = (*e).min(k);
            }
        }
        let mut index = BTreeMap::new();
        let mut monomials = Vec::new();
        for f in funs {
            let lifted = Self::lift_with(&diag_min, f);
            for e in lifted.terms.keys() {
                if !index.contains_key(e) {
                    index.insert(e.clone(), monomials.len());
                    monomials.push(e.clone());
                }
            }
        }
        FunCoords {
            nvars,
            diag_min,
            monomials,
            index,
        }
    }

    fn lift_with(diag_min: &BTreeMap<(usize, usize), i64>, f: &RatFun) -> Poly {
        let mut n = f.numer.clone();
        for (&(i, j), &kmin) in diag_min {
            let k = f.diag.get(&(i, j)).copied().unwrap_or(0);
            debug_assert!(k >= kmin, "function has deeper pole than the frame");
            let d = Poly::diag(f.nvars, i, j);
            for _ in 0..(k - kmin) {
                n = n.mul(&d);
            }
        }
        n
    }

    /// Coordinate vector; None if the function does not fit the frame
    /// (deeper pole or unknown monomial).
    pub fn vector(&self, f: &RatFun) -> Option<Vector> {
        for (&p, &k) in &f.diag {
            if k < self.diag_min.get(&p).copied().unwrap_or(0) {
                return None;
            }
        }
        let lifted = Self::lift_with(&self.diag_min, f);
        let mut v = vec![Rat::zero(); self.monomials.len()];
        for (e, c) in &lifted.terms {
            let &i = self.index.get(e)?;
            v[i] = c.clone();
        }
        Some(v)
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }
}

// ---------------------------------------------------------------------------
// Regular matrices
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RegularMatrixSet {
    pub l: usize,
    pub row_target: Vec<i64>,
    pub lower_bound: i64,
    pub matrices: Vec<Vec<Vec<i64>>>,
}

/// All symmetric integer matrices with zero diagonal, entries bounded below,
/// and row sums `-n_i`, by backtracking over the upper triangle with
/// row-sum pruning.
pub fn enumerate_regular_matrices(l: usize, n: &[i64], lower_bound: i64) -> RegularMatrixSet {
    assert_eq!(n.len(), l);
    let pairs: Vec<(usize, usize)> = (0..l)
        .flat_map(|i| ((i + 1)..l).map(move |j| (i, j)))
        .collect();

    fn recurse(
        pos: usize,
        pairs: &[(usize, usize)],
        entries: &mut [i64],
        row_sum: &mut [i64],
        n: &[i64],
        lower: i64,
        l: usize,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        if pos == pairs.len() {
            if row_sum.iter().zip(n).all(|(&s, &ni)| s == -ni) {
                let mut m = vec![vec![0i64; l]; l];
                for (idx, &(i, j)) in pairs.iter().enumerate() {
                    m[i][j] = entries[idx];
                    m[j][i] = entries[idx];
                }
                out.push(m);
            }
            return;
        }
        let (i, j) = pairs[pos];
        let mut free = vec![0i64; l];
        for &(a, b) in &pairs[pos + 1..] {
            free[a] += 1;
            free[b] += 1;
        }
        // upper bound: the rest of each touched row can contribute at least
        // lower * (free entries), so this entry cannot exceed the residue
        let hi_i = -n[i] - row_sum[i] - lower * free[i];
        let hi_j = -n[j] - row_sum[j] - lower * free[j];
        let hi = hi_i.min(hi_j);
        let mut s = lower;
        while s <= hi {
            entries[pos] = s;
            row_sum[i] += s;
            row_sum[j] += s;
            let ok_i = free[i] > 0 || row_sum[i] == -n[i];
            let ok_j = free[j] > 0 || row_sum[j] == -n[j];
            if ok_i && ok_j {
                recurse(pos + 1, pairs, entries, row_sum, n, lower, l, out);
            }
            row_sum[i] -= s;
            row_sum[j] -= s;
            s += 1;
        }
        entries[pos] = 0;
    }

    let mut matrices = Vec::new();
    let mut entries = vec![0i64; pairs.len()];
    let mut row_sum = vec![0i64; l];
    if l >= 2 {
        recurse(
            0,
            &pairs,
            &mut entries,
            &mut row_sum,
            n,
            lower_bound,
            l,
            &mut matrices,
        );
    }
    RegularMatrixSet {
        l,
        row_target: n.to_vec(),
        lower_bound,
        matrices,
    }
}

// ---------------------------------------------------------------------------
// Function spaces
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Regular,
    Admissible,
    Indecomposable,
    SimplePole,
    SimplePoleIndecomposable,
    OrdBounded { bound: i64, degree: i64 },
}

/// A factorized admissible basis element: disjoint blocks of slots, each
/// carrying an index into the indecomposable basis of its size.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProductTerm {
    pub blocks: Vec<(Vec<usize>, usize)>,
}

#[derive(Clone, Debug)]
pub struct FunSpace {
    pub l: usize,
    pub kind: SpaceKind,
    pub basis: Vec<RatFun>,
    /// Product structure per basis element (admissible spaces only).
    pub terms: Option<Vec<ProductTerm>>,
    /// Monomial frame + echelon coordinates (kernel-born spaces only).
    monomial: Option<(FunCoords, Subspace)>,
    /// Evaluation-based coordinates, built lazily.
    eval: std::cell::RefCell<Option<EvalCoords>>,
}

#[derive(Clone, Debug)]
struct EvalCoords {
    points: Vec<Vec<Rat>>,
    /// rows: points, cols: basis
    matrix: Matrix,
}

impl FunSpace {
    pub fn new(l: usize, kind: SpaceKind, basis: Vec<RatFun>) -> FunSpace {
        FunSpace {
            l,
            kind,
            basis,
            terms: None,
            monomial: None,
            eval: std::cell::RefCell::new(None),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Deterministic pole-free evaluation points.
    fn eval_point(l: usize, m: usize) -> Vec<Rat> {
        // z_i = (i+1) * (m+2)^i: pairwise distinct, nonzero, and varying
        // enough across m to separate any finite independent family.
        (0..l)
            .map(|i| {
                let mut v = rat((i + 1) as i64);
                for _ in 0..i {
                    v *= rat((m + 2) as i64);
                }
                v
            })
            .collect()
    }

    fn ensure_eval(&self) -> Result<()> {
        if self.eval.borrow().is_some() {
            return Ok(());
        }
        let n = self.basis.len();
        let mut points = Vec::new();
        let mut rows: Vec<Vector> = Vec::new();
        let mut m = 0usize;
        loop {
            for _ in 0..(n + 4) {
                let p = Self::eval_point(self.l, m);
                m += 1;
                let row: Vector = self
                    .basis
                    .iter()
                    .map(|f| f.eval(&p))
                    .collect::<Result<_>>()?;
                rows.push(row);
                points.push(p);
            }
            let (rank, _) = rref_kernel(&Matrix::from_rows(rows.clone()));
            if rank == n {
                break;
            }
            if m > 40 * (n + 4) {
                return Err(Error::Internal(
                    "evaluation coordinates failed to reach full rank".into(),
                ));
            }
        }
        *self.eval.borrow_mut() = Some(EvalCoords {
            points,
            matrix: Matrix::from_rows(rows),
        });
        Ok(())
    }

    /// Coordinates of `f` in this basis, None if not a member.  Solutions
    /// found through evaluation are certified by exact symbolic equality.
    pub fn coordinates(&self, f: &RatFun) -> Result<Option<Vector>> {
        if f.is_zero() {
            return Ok(Some(vec![Rat::zero(); self.dim()]));
        }
        if self.dim() == 0 {
            return Ok(None);
        }
        if let Some((fc, sub)) = &self.monomial {
            let Some(v) = fc.vector(f) else {
                return Ok(None);
            };
            return Ok(sub.coordinates(&v));
        }
        self.ensure_eval()?;
        let guard = self.eval.borrow();
        let ec = guard.as_ref().unwrap();
        let b: Vector = ec
            .points
            .iter()
            .map(|p| f.eval(p))
            .collect::<Result<_>>()?;
        let Some(x) = solve(&ec.matrix, &b) else {
            return Ok(None);
        };
        // certificate: the claimed combination must equal f exactly
        let comb = self.from_coordinates(&x);
        if comb == *f {
            Ok(Some(x))
        } else {
            Ok(None)
        }
    }

    pub fn contains(&self, f: &RatFun) -> Result<bool> {
        Ok(self.coordinates(f)?.is_some())
    }

    /// Function with the given coordinates.
    pub fn from_coordinates(&self, coords: &[Rat]) -> RatFun {
        let mut f = RatFun::zero(self.l);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                f = f.add(&b.scale(c));
            }
        }
        f
    }
}

// ---------------------------------------------------------------------------
// Admissibility predicates
// ---------------------------------------------------------------------------

/// Every ordered proper partition of `{0..l-1}`, as (I, J) pairs.
pub fn ordered_partitions(l: usize) -> Vec<PartitionSpec> {
    let mut out = Vec::new();
    for mask in 1..((1usize << l) - 1) {
        let j_set: Vec<usize> = (0..l).filter(|&v| mask & (1 << v) != 0).collect();
        let i_set: Vec<usize> = (0..l).filter(|&v| mask & (1 << v) == 0).collect();
        out.push(PartitionSpec::new(l, i_set, j_set).unwrap());
    }
    out
}

/// Least degree `n` at which a component of `f` can be nonzero for `p`.
pub fn component_floor(f: &RatFun, p: &PartitionSpec, w: &[i64]) -> i64 {
    let in_j = |v: usize| p.j_set.contains(&v);
    let mut base: i64 = f
        .diag
        .iter()
        .filter(|(&(a, b), _)| in_j(a) && in_j(b))
        .map(|(_, &q)| q)
        .sum();
    base += f
        .numer
        .terms
        .keys()
        .map(|e| {
            e.iter()
                .enumerate()
                .filter(|(v, _)| in_j(*v))
                .map(|(_, &x)| x as i64)
                .sum::<i64>()
        })
        .min()
        .unwrap_or(0);
    base + p.j_set.iter().map(|&j| w[j]).sum::<i64>()
}

/// `(4,..,4)`-regular with vanishing components at `n < 0` and `n = 1`.
pub fn is_admissible(f: &RatFun) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let l = f.nvars;
    let w = oz_weights(l);
    if f.degree() != Some(-2 * (l as i64)) {
        return Ok(false);
    }
    // no single-variable poles in Phi^l proper
    if f.numer.terms.keys().any(|e| e.iter().any(|&x| x < 0)) {
        return Ok(false);
    }
    let n4: Vec<i64> = vec![4; l];
    if !f.apply_delta_star(&n4).is_zero() {
        return Ok(false);
    }
    for p in ordered_partitions(l) {
        let floor = component_floor(f, &p, &w);
        for n in floor..=1 {
            if (n < 0 || n == 1) && !f.component(&p, n, &w)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Admissible with all degree-0 components vanishing.
pub fn is_indecomposable(f: &RatFun) -> Result<bool> {
    if !is_admissible(f)? {
        return Ok(false);
    }
    let l = f.nvars;
    let w = oz_weights(l);
    for p in ordered_partitions(l) {
        if !f.component(&p, 0, &w)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Space construction
// ---------------------------------------------------------------------------

/// Memoizing builder for the function spaces of each arity.
#[derive(Default)]
pub struct SpaceCache {
    indecomposable: BTreeMap<usize, FunSpace>,
    admissible: BTreeMap<usize, FunSpace>,
    simple: BTreeMap<usize, FunSpace>,
    simple_ind: BTreeMap<usize, FunSpace>,
}

impl SpaceCache {
    pub fn new() -> Self {
        SpaceCache::default()
    }

    /// Kernel of the admissibility conditions inside the uniform-bound space
    /// `p * pi(bound)` of homogeneous degree `-2l`; `indecomposable` also
    /// kills the degree-0 components.
    fn bounded_kernel(l: usize, bound: i64, indecomposable: bool) -> Result<FunSpace> {
        let kind = match (bound, indecomposable) {
            (-2, true) => SpaceKind::Indecomposable,
            (-1, true) => SpaceKind::SimplePoleIndecomposable,
            (-1, false) => SpaceKind::SimplePole,
            _ => SpaceKind::OrdBounded {
                bound,
                degree: -2 * (l as i64),
            },
        };
        let npairs = (l * (l - 1) / 2) as i64;
        let pdeg = -2 * (l as i64) - bound * npairs;
        if pdeg < 0 {
            return Ok(FunSpace::new(l, kind, vec![]));
        }
        let mut all = vec![vec![0i64; l]; l];
        for i in 0..l {
            for j in 0..l {
                if i != j {
                    all[i][j] = bound;
                }
            }
        }
        let pi = RatFun::pi_product(&all)?;
        let mut expos: Vec<Expo> = Vec::new();
        gen_monomials(l, pdeg as i32, &mut vec![0; l], 0, &mut expos);
        let mut current: Vec<RatFun> = expos
            .iter()
            .map(|e| RatFun::from_poly(Poly::monomial(l, e.clone(), Rat::one())).mul(&pi))
            .collect();

        let cut = |current: &mut Vec<RatFun>, images: Vec<RatFun>| -> Result<()> {
            if current.is_empty() || images.iter().all(|f| f.is_zero()) {
                return Ok(());
            }
            let fc = FunCoords::build(&images);
            let cols: Vec<Vector> = images
                .iter()
                .map(|f| {
                    fc.vector(f)
                        .ok_or_else(|| Error::Internal("image escaped its frame".into()))
                })
                .collect::<Result<_>>()?;
            let m = Matrix::from_rows(cols).transpose();
            let (_, ker) = rref_kernel(&m);
            let mut next = Vec::with_capacity(ker.dim());
            for ki in 0..ker.dim() {
                let u = ker.basis.row(ki);
                let mut f = RatFun::zero(current[0].nvars);
                for (idx, coef) in u.iter().enumerate() {
                    if !coef.is_zero() {
                        f = f.add(&current[idx].scale(coef));
                    }
                }
                next.push(f);
            }
            *current = next;
            Ok(())
        };

        // regularity, then component conditions partition by partition
        let n4: Vec<i64> = vec![4; l];
        let images: Vec<RatFun> = current.iter().map(|f| f.apply_delta_star(&n4)).collect();
        cut(&mut current, images)?;
        let wv = oz_weights(l);
        for p in ordered_partitions(l) {
            if current.is_empty() {
                break;
            }
            let floor = current
                .iter()
                .filter(|f| !f.is_zero())
                .map(|f| component_floor(f, &p, &wv))
                .min()
                .unwrap_or(2);
            for n in floor..=1 {
                let active = n < 0 || n == 1 || (n == 0 && indecomposable);
                if !active {
                    continue;
                }
                let images: Vec<RatFun> = current
                    .iter()
                    .map(|f| f.component(&p, n, &wv))
                    .collect::<Result<_>>()?;
                cut(&mut current, images)?;
                if current.is_empty() {
                    break;
                }
            }
        }
        // canonical echelon basis over the survivors' monomial coordinates
        Ok(echelonized_space(l, kind, &current))
    }

    /// Indecomposable admissible functions `R_0^l`.
    pub fn indecomposable(&mut self, l: usize) -> Result<&FunSpace> {
        if !self.indecomposable.contains_key(&l) {
            let fs = match l {
                0 | 1 => FunSpace::new(l, SpaceKind::Indecomposable, vec![]),
                2 => {
                    let mut d = BTreeMap::new();
                    d.insert((0usize, 1usize), -4i64);
                    let f = RatFun {
                        nvars: 2,
                        numer: Poly::one(2),
                        diag: d,
                    };
                    echelonized_space(2, SpaceKind::Indecomposable, &[f])
                }
                _ => Self::bounded_kernel(l, -2, true)?,
            };
            self.indecomposable.insert(l, fs);
        }
        Ok(&self.indecomposable[&l])
    }

    /// Admissible functions `R^l` as products of indecomposables over set
    /// partitions with blocks of size at least 2.
    pub fn admissible(&mut self, l: usize) -> Result<&FunSpace> {
        if !self.admissible.contains_key(&l) {
            let mut basis = Vec::new();
            let mut terms = Vec::new();
            if l >= 2 {
                for m in 2..=l {
                    self.indecomposable(m)?;
                }
                for partition in set_partitions_min2(l) {
                    let dims: Vec<usize> = partition
                        .iter()
                        .map(|b| self.indecomposable[&b.len()].dim())
                        .collect();
                    if dims.iter().any(|&d| d == 0) {
                        continue;
                    }
                    let mut idx = vec![0usize; partition.len()];
                    'outer: loop {
                        let mut f = RatFun::one(l);
                        let mut blocks = Vec::new();
                        for (b, block) in partition.iter().enumerate() {
                            let local = &self.indecomposable[&block.len()].basis[idx[b]];
                            f = f.mul(&embed_block(local, block, l));
                            blocks.push((block.clone(), idx[b]));
                        }
                        basis.push(f);
                        terms.push(ProductTerm { blocks });
                        let mut carry = 0usize;
                        loop {
                            idx[carry] += 1;
                            if idx[carry] < dims[carry] {
                                break;
                            }
                            idx[carry] = 0;
                            carry += 1;
                            if carry == idx.len() {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            let mut fs = FunSpace::new(l, SpaceKind::Admissible, basis);
            fs.terms = Some(terms);
            self.admissible.insert(l, fs);
        }
        Ok(&self.admissible[&l])
    }

    /// Simple-pole admissible functions `S^l`.
    pub fn simple_pole(&mut self, l: usize) -> Result<&FunSpace> {
        if !self.simple.contains_key(&l) {
            let fs = if l < 2 {
                FunSpace::new(l, SpaceKind::SimplePole, vec![])
            } else {
                Self::bounded_kernel(l, -1, false)?
            };
            self.simple.insert(l, fs);
        }
        Ok(&self.simple[&l])
    }

    /// Indecomposable simple-pole functions `S_0^l`.
    pub fn simple_pole_indecomposable(&mut self, l: usize) -> Result<&FunSpace> {
        if !self.simple_ind.contains_key(&l) {
            let fs = if l < 2 {
                FunSpace::new(l, SpaceKind::SimplePoleIndecomposable, vec![])
            } else {
                Self::bounded_kernel(l, -1, true)?
            };
            self.simple_ind.insert(l, fs);
        }
        Ok(&self.simple_ind[&l])
    }

    /// Coordinates of `sigma` applied to an admissible basis element,
    /// computed block by block through indecomposable monomial coordinates.
    pub fn permuted_admissible_coords(
        &mut self,
        l: usize,
        term_index: usize,
        sigma: &[usize],
    ) -> Result<Vector> {
        self.admissible(l)?;
        let (term, all_terms, dim) = {
            let space = &self.admissible[&l];
            (
                space.terms.as_ref().unwrap()[term_index].clone(),
                space.terms.as_ref().unwrap().clone(),
                space.dim(),
            )
        };
        let mut block_coords: Vec<(Vec<usize>, Vector)> = Vec::new();
        for (block, bi) in &term.blocks {
            let m = block.len();
            let mut new_block: Vec<usize> = block.iter().map(|&v| sigma[v]).collect();
            new_block.sort_unstable();
            // local relabeling: original local slot k holds variable
            // block[k], which moves to sigma[block[k]]
            let mut tau = vec![0usize; m];
            for (k, &v) in block.iter().enumerate() {
                tau[k] = new_block.iter().position(|&x| x == sigma[v]).unwrap();
            }
            let (permuted, coords) = {
                let space = self.indecomposable(m)?;
                let permuted = space.basis[*bi].permute(&tau)?;
                let coords = space.coordinates(&permuted)?;
                (permuted, coords)
            };
            let _ = permuted;
            let coords = coords
                .ok_or_else(|| Error::Internal("indecomposable space not permutation-stable".into()))?;
            block_coords.push((new_block, coords));
        }
        let mut out = vec![Rat::zero(); dim];
        let mut idx = vec![0usize; block_coords.len()];
        'outer: loop {
            let mut coef = Rat::one();
            let mut blocks: Vec<(Vec<usize>, usize)> = Vec::new();
            for (b, (block, coords)) in block_coords.iter().enumerate() {
                coef *= coords[idx[b]].clone();
                blocks.push((block.clone(), idx[b]));
            }
            if !coef.is_zero() {
                blocks.sort();
                let pos = all_terms
                    .iter()
                    .position(|t| {
                        let mut tb = t.blocks.clone();
                        tb.sort();
                        tb == blocks
                    })
                    .ok_or_else(|| Error::Internal("product term missing from basis".into()))?;
                out[pos] += coef;
            }
            let mut carry = 0usize;
            loop {
                if carry == idx.len() {
                    break 'outer;
                }
                idx[carry] += 1;
                if idx[carry] < block_coords[carry].1.len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
        }
        Ok(out)
    }
}

/// Echelonizes a family of functions over their own monomial frame and
/// attaches the monomial coordinate system.
pub fn echelonized_space(l: usize, kind: SpaceKind, funs: &[RatFun]) -> FunSpace {
    let live: Vec<RatFun> = funs.iter().filter(|f| !f.is_zero()).cloned().collect();
    if live.is_empty() {
        return FunSpace::new(l, kind, vec![]);
    }
    let fc = FunCoords::build(&live);
    let vecs: Vec<Vector> = live.iter().map(|f| fc.vector(f).expect("own frame")).collect();
    let sub = Subspace::from_vectors(fc.dim(), &vecs);
    let basis: Vec<RatFun> = (0..sub.dim())
        .map(|ri| {
            let mut p = Poly::zero(l);
            for (mi, mono) in fc.monomials.iter().enumerate() {
                let c = sub.basis[(ri, mi)].clone();
                if !c.is_zero() {
                    p.add_term(mono.clone(), c);
                }
            }
            let mut f = RatFun {
                nvars: l,
                numer: p,
                diag: fc.diag_min.clone(),
            };
            f.normalize();
            f
        })
        .collect();
    let mut fs = FunSpace::new(l, kind, basis);
    fs.monomial = Some((fc, sub));
    fs
}

/// Regular span: echelonized span of `pi(S)` over the enumerated matrices.
/// Feasible for small `l`; the admissible pipeline does not depend on it.
pub fn regular_space(l: usize, n: &[i64], lower_bound: i64) -> Result<FunSpace> {
    if l > 4 {
        return Err(Error::OutOfCutoff(
            "regular span materialization is limited to l <= 4".into(),
        ));
    }
    let set = enumerate_regular_matrices(l, n, lower_bound);
    let funs: Vec<RatFun> = set
        .matrices
        .iter()
        .map(|m| RatFun::pi_product(m))
        .collect::<Result<_>>()?;
    Ok(echelonized_space(l, SpaceKind::Regular, &funs))
}

/// Free-mode graded piece: all `p * pi(bound)` of total degree `degree`.
pub fn ord_bounded_space(l: usize, bound: i64, degree: i64) -> Result<FunSpace> {
    let npairs = (l * (l - 1) / 2) as i64;
    let pdeg = degree - bound * npairs;
    let kind = SpaceKind::OrdBounded { bound, degree };
    if pdeg < 0 {
        return Ok(FunSpace::new(l, kind, vec![]));
    }
    let mut all = vec![vec![0i64; l]; l];
    for i in 0..l {
        for j in 0..l {
            if i != j {
                all[i][j] = bound;
            }
        }
    }
    let pi = RatFun::pi_product(&all)?;
    let mut expos: Vec<Expo> = Vec::new();
    gen_monomials(l, pdeg as i32, &mut vec![0; l], 0, &mut expos);
    let funs: Vec<RatFun> = expos
        .iter()
        .map(|e| RatFun::from_poly(Poly::monomial(l, e.clone(), Rat::one())).mul(&pi))
        .collect();
    Ok(echelonized_space(l, kind, &funs))
}

/// Places a local function on the given global slots (ascending).
pub fn embed_block(local: &RatFun, block: &[usize], l: usize) -> RatFun {
    let mut numer = Poly::zero(l);
    for (e, c) in &local.numer.terms {
        let mut ne = vec![0; l];
        for (k, &x) in e.iter().enumerate() {
            ne[block[k]] = x;
        }
        numer.add_term(ne, c.clone());
    }
    let mut diag = BTreeMap::new();
    for (&(a, b), &k) in &local.diag {
        let (na, nb) = (block[a], block[b]);
        diag.insert((na.min(nb), na.max(nb)), k);
    }
    RatFun {
        nvars: l,
        numer,
        diag,
    }
}

fn gen_monomials(l: usize, deg: i32, cur: &mut Vec<i32>, pos: usize, out: &mut Vec<Expo>) {
    if l == 0 {
        if deg == 0 {
            out.push(vec![]);
        }
        return;
    }
    if pos == l - 1 {
        cur[pos] = deg - cur[..pos].iter().sum::<i32>();
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    let used: i32 = cur[..pos].iter().sum();
    for e in 0..=(deg - used) {
        cur[pos] = e;
        gen_monomials(l, deg, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// Unordered set partitions of `{0..l-1}` with every block of size >= 2.
pub fn set_partitions_min2(l: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(rest: Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>, acc: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            let mut p = acc.clone();
            p.sort();
            out.push(p);
            return;
        }
        let first = rest[0];
        let others = &rest[1..];
        let n = others.len();
        for mask in 0..(1usize << n) {
            let block: Vec<usize> = std::iter::once(first)
                .chain((0..n).filter(|&k| mask & (1 << k) != 0).map(|k| others[k]))
                .collect();
            if block.len() < 2 {
                continue;
            }
            let remaining: Vec<usize> = (0..n)
                .filter(|&k| mask & (1 << k) == 0)
                .map(|k| others[k])
                .collect();
            acc.push(block);
            rec(remaining, out, acc);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec((0..l).collect(), &mut out, &mut Vec::new());
    out.sort();
    out
}

/// All unordered set partitions of `{0..l-1}`.
pub fn set_partitions(l: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(v: usize, l: usize, acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if v == l {
            let mut p = acc.clone();
            p.sort();
            out.push(p);
            return;
        }
        for b in 0..acc.len() {
            acc[b].push(v);
            rec(v + 1, l, acc, out);
            acc[b].pop();
        }
        acc.push(vec![v]);
        rec(v + 1, l, acc, out);
        acc.pop();
    }
    let mut out = Vec::new();
    rec(0, l, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Subgroup of `Sigma_l` generated by the given permutations.
pub fn permutation_closure(l: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..l).collect();
    let mut seen: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    seen.insert(id.clone());
    let mut queue = vec![id];
    while let Some(g) = queue.pop() {
        for h in gens {
            // compose: (g h)(i) = g[h[i]]
            let gh: Vec<usize> = (0..l).map(|i| g[h[i]]).collect();
            if seen.insert(gh.clone()) {
                queue.push(gh);
            }
        }
    }
    seen.into_iter().collect()
}

/// Basis of the invariant subspace under the group generated by `gens`,
/// via the exact averaging projector.
pub fn symmetrize(cache: &mut SpaceCache, space: &FunSpace, gens: &[Vec<usize>]) -> Result<FunSpace> {
    let l = space.l;
    let group = permutation_closure(l, gens);
    if group.len() == 1 || space.dim() == 0 {
        return Ok(space.clone());
    }
    let order = rat(group.len() as i64);
    let dim = space.dim();
    // averaged images of each basis element, in coordinates
    let mut proj = Matrix::zero(dim, dim);
    for (bi, _) in space.basis.iter().enumerate() {
        let mut acc = vec![Rat::zero(); dim];
        for sigma in &group {
            let coords = match (&space.kind, &space.terms) {
                (SpaceKind::Admissible, Some(_)) => {
                    cache.permuted_admissible_coords(l, bi, sigma)?
                }
                _ => {
                    let img = space.basis[bi].permute(sigma)?;
                    space.coordinates(&img)?.ok_or_else(|| {
                        Error::Internal("space is not stable under the group".into())
                    })?
                }
            };
            for (k, c) in coords.into_iter().enumerate() {
                acc[k] += c;
            }
        }
        for (k, c) in acc.into_iter().enumerate() {
            proj[(k, bi)] = c / order.clone();
        }
    }
    // invariants = column space of the projector
    let cols: Vec<Vector> = (0..dim)
        .map(|j| (0..dim).map(|i| proj[(i, j)].clone()).collect())
        .collect();
    let sub = Subspace::from_vectors(dim, &cols);
    let basis: Vec<RatFun> = (0..sub.dim())
        .map(|ri| space.from_coordinates(sub.basis.row(ri)))
        .collect();
    let mut fs = FunSpace::new(l, space.kind.clone(), basis);
    fs.terms = None;
    Ok(fs)
}

/// Unique expansion of an admissible function into products of
/// indecomposables: list of (coefficient, factors on their slot supports).
pub fn factor_indecomposables(
    cache: &mut SpaceCache,
    alpha: &RatFun,
) -> Result<Vec<(Rat, Vec<(Vec<usize>, RatFun)>)>> {
    if !is_admissible(alpha)? {
        return Err(Error::NotAdmissible("factor_indecomposables input".into()));
    }
    factor_rec(cache, alpha)
}

fn factor_rec(
    cache: &mut SpaceCache,
    alpha: &RatFun,
) -> Result<Vec<(Rat, Vec<(Vec<usize>, RatFun)>)>> {
    if alpha.is_zero() {
        return Ok(vec![]);
    }
    let l = alpha.nvars;
    let w = oz_weights(l);
    // unordered 2-part partitions ordered by smaller-part size, then lex
    let mut parts: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for mask in 1..(1usize << (l - 1)) {
        // subsets containing slot 0 act as I1 to deduplicate
        let i1: Vec<usize> = (0..l)
            .filter(|&v| v == 0 || mask & (1 << (v - 1)) != 0)
            .collect();
        let i2: Vec<usize> = (0..l).filter(|&v| !i1.contains(&v)).collect();
        if i2.is_empty() {
            continue;
        }
        let (small, big) = if i1.len() <= i2.len() {
            (i1.clone(), i2.clone())
        } else {
            (i2.clone(), i1.clone())
        };
        parts.push((small, big));
    }
    parts.sort_by(|a, b| (a.0.len(), &a.0, &a.1).cmp(&(b.0.len(), &b.0, &b.1)));

    for (small, big) in parts {
        let p = PartitionSpec::new(l, small.clone(), big.clone())?;
        let comp = alpha.component(&p, 0, &w)?;
        if comp.is_zero() {
            continue;
        }
        let pairs = reduce_split(alpha.split_component_raw(&p, 0, &w)?)?;
        let mut out: Vec<(Rat, Vec<(Vec<usize>, RatFun)>)> = Vec::new();
        for (fi, fj) in pairs {
            let a_loc = fi.restrict_to_vars(&small)?;
            let b_loc = fj.restrict_to_vars(&big)?;
            let fa = factor_rec(cache, &a_loc)?;
            let fb = factor_rec(cache, &b_loc)?;
            for (ca, fact_a) in &fa {
                for (cb, fact_b) in &fb {
                    let mut factors: Vec<(Vec<usize>, RatFun)> = Vec::new();
                    for (sup, f) in fact_a {
                        factors.push((sup.iter().map(|&v| small[v]).collect(), f.clone()));
                    }
                    for (sup, f) in fact_b {
                        factors.push((sup.iter().map(|&v| big[v]).collect(), f.clone()));
                    }
                    factors.sort_by(|x, y| x.0.cmp(&y.0));
                    out.push((ca.clone() * cb.clone(), factors));
                }
            }
        }
        let beta = alpha.sub(&comp);
        out.extend(factor_rec(cache, &beta)?);
        return Ok(merge_factor_terms(out));
    }
    // no nonzero degree-0 component: indecomposable
    Ok(vec![(
        Rat::one(),
        vec![((0..l).collect(), alpha.clone())],
    )])
}

fn merge_factor_terms(
    terms: Vec<(Rat, Vec<(Vec<usize>, RatFun)>)>,
) -> Vec<(Rat, Vec<(Vec<usize>, RatFun)>)> {
    let mut map: BTreeMap<Vec<(Vec<usize>, RatFun)>, Rat> = BTreeMap::new();
    for (c, f) in terms {
        let e = map.entry(f).or_insert_with(Rat::zero);
        *e += c;
    }
    map.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(f, c)| (c, f))
        .collect()
}

/// Reassembles a factorization into a single function on `l` slots.
pub fn reassemble_factors(l: usize, terms: &[(Rat, Vec<(Vec<usize>, RatFun)>)]) -> RatFun {
    let mut total = RatFun::zero(l);
    for (c, factors) in terms {
        let mut f = RatFun::constant(l, c.clone());
        for (sup, local) in factors {
            f = f.mul(&embed_block(local, sup, l));
        }
        total = total.add(&f);
    }
    total
}

/// One-sided reduction: the key side (left) is made linearly independent,
/// the value side (right) is combined accordingly.
fn reduce_keyed(pairs: Vec<(RatFun, RatFun)>) -> Result<Vec<(RatFun, RatFun)>> {
    let pairs: Vec<(RatFun, RatFun)> = pairs
        .into_iter()
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .collect();
    if pairs.is_empty() {
        return Ok(vec![]);
    }
    let keys: Vec<RatFun> = pairs.iter().map(|(a, _)| a.clone()).collect();
    let fc = FunCoords::build(&keys);
    let vecs: Vec<Vector> = keys
        .iter()
        .map(|f| fc.vector(f).ok_or_else(|| Error::Internal("split frame".into())))
        .collect::<Result<_>>()?;
    let mut chosen: Vec<usize> = Vec::new();
    let mut span = crate::linalg::IncrementalSpan::new();
    for (k, v) in vecs.iter().enumerate() {
        if span.insert(v) {
            chosen.push(k);
        }
    }
    let m = Matrix::from_rows(chosen.iter().map(|&c| vecs[c].clone()).collect::<Vec<_>>())
        .transpose();
    let coords = crate::linalg::solve_many(&m, &vecs)
        .ok_or_else(|| Error::Internal("split reduction solve".into()))?;
    let nvars = pairs[0].1.nvars;
    let mut values: Vec<RatFun> = vec![RatFun::zero(nvars); chosen.len()];
    for (k, (_, value)) in pairs.iter().enumerate() {
        for (ci, coef) in coords[k].iter().enumerate() {
            if !coef.is_zero() {
                values[ci] = values[ci].add_raw(&value.scale(coef));
            }
        }
    }
    Ok(chosen
        .into_iter()
        .zip(values)
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, mut v)| {
            v.normalize();
            (pairs[c].0.clone(), v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect())
}

/// Minimal-rank reduction of raw split pairs: first the I side is made
/// independent (so the combined J parts are exactly the slices of the
/// component tensor, spanning its intrinsic J-support and nothing more),
/// then the J side (cleaning the I parts).  An empty result certifies a
/// zero component.
pub fn reduce_split(pairs: Vec<(RatFun, RatFun)>) -> Result<Vec<(RatFun, RatFun)>> {
    let i_reduced = reduce_keyed(pairs)?;
    // swap orientation, reduce the J side, swap back
    let swapped: Vec<(RatFun, RatFun)> = i_reduced.into_iter().map(|(a, b)| (b, a)).collect();
    let j_reduced = reduce_keyed(swapped)?;
    Ok(j_reduced.into_iter().map(|(b, a)| (a, b)).collect())
}

/// Public split with reduced, genuinely independent J-factors, restricted to
/// the partition's own variables.
pub fn split_component(
    alpha: &RatFun,
    p: &PartitionSpec,
    n: i64,
    w: &[i64],
) -> Result<Vec<(RatFun, RatFun)>> {
    // degenerate partitions split trivially
    if p.i_set.is_empty() || p.j_set.is_empty() {
        let c = alpha.component(p, n, w)?;
        if c.is_zero() {
            return Ok(vec![]);
        }
        let one = RatFun::one(0);
        return if p.i_set.is_empty() {
            Ok(vec![(one, c.restrict_to_vars(&p.j_set)?)])
        } else {
            Ok(vec![(c.restrict_to_vars(&p.i_set)?, one)])
        };
    }
    let raw = alpha.split_component_raw(p, n, w)?;
    let reduced = reduce_split(raw)?;
    reduced
        .into_iter()
        .map(|(a, b)| Ok((a.restrict_to_vars(&p.i_set)?, b.restrict_to_vars(&p.j_set)?)))
        .collect()
}

/// Solves for some admissible function with the prescribed double- and
/// quadruple-pole coefficients, against the full `R^l` basis.
///
/// `data[(i, j, k)]` is `rho^{(k)}_{ij} alpha`, embedded on `l` variables
/// with slot `i` dead (and slot `j` dead too for `k = -4`).
pub fn prescribe_poles(
    cache: &mut SpaceCache,
    l: usize,
    data: &BTreeMap<(usize, usize, i64), RatFun>,
) -> Result<RatFun> {
    // compatibility across disjoint pairs
    for (&(i, j, k), f) in data {
        if !(i < j && j < l) || !(k == -2 || k == -4) {
            return Err(Error::PoleData(format!("bad key ({i},{j},{k})")));
        }
        if f.nvars != l {
            return Err(Error::NvarsMismatch(f.nvars, l));
        }
        for (&(s, t, m), g) in data {
            if s.max(t).max(i).max(j) < l
                && (s != i && s != j && t != i && t != j)
                && ((i, j, k) < (s, t, m))
            {
                let lhs = f.rho_embedded(s, t, m);
                let rhs = g.rho_embedded(i, j, k);
                if lhs != rhs {
                    return Err(Error::PoleData(format!(
                        "rho({s},{t},{m}) of data({i},{j},{k}) mismatch"
                    )));
                }
            }
        }
    }
    let space = cache.admissible(l)?;
    // unknowns: coefficients over the R^l basis
    let mut rows: Vec<Vector> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for (&(i, j, k), target) in data {
        let images: Vec<RatFun> = space
            .basis
            .iter()
            .map(|b| b.rho_embedded(i, j, k))
            .collect();
        let mut frame_funs = images.clone();
        frame_funs.push(target.clone());
        let fc = FunCoords::build(&frame_funs);
        let tvec = fc
            .vector(target)
            .ok_or_else(|| Error::PoleData("target escapes admissible frame".into()))?;
        let cols: Vec<Vector> = images
            .iter()
            .map(|f| fc.vector(f).expect("own frame"))
            .collect();
        for r in 0..fc.dim() {
            rows.push(cols.iter().map(|c| c[r].clone()).collect());
            rhs.push(tvec[r].clone());
        }
    }
    if rows.is_empty() {
        return Ok(RatFun::zero(l));
    }
    let m = Matrix::from_rows(rows);
    let x = solve(&m, &rhs).ok_or_else(|| {
        Error::PoleData("system inconsistent: compatibility hypothesis violated".into())
    })?;
    Ok(cache.admissible(l)?.from_coordinates(&x))
}

/// Iterated degree-0 component over a multi-block partition.
pub fn comp0_multi(alpha: &RatFun, parts: &[Vec<usize>], w: &[i64]) -> Result<RatFun> {
    let l = alpha.nvars;
    let mut gamma = alpha.clone();
    for s in (1..parts.len()).rev() {
        let j_set = parts[s].clone();
        let i_set: Vec<usize> = (0..l).filter(|v| !j_set.contains(v)).collect();
        let p = PartitionSpec::new(l, i_set, j_set)?;
        gamma = gamma.component(&p, 0, w)?;
        if gamma.is_zero() {
            return Ok(gamma);
        }
    }
    Ok(gamma)
}

/// Reconstruction from degree-0 components over all partitions into at
/// least two parts: `alpha = sum_P (-1)^{|P|} (|P|-1)! alpha(P)`.
pub fn reconstruct_from_parts(
    l: usize,
    components: &BTreeMap<Vec<Vec<usize>>, RatFun>,
    w: &[i64],
) -> Result<RatFun> {
    // coherence on 2-part partitions
    for (p, f) in components {
        if p.len() == 2 {
            for (q, g) in components {
                if q.len() == 2 && p < q {
                    let pq = comp0_multi(f, q, w)?;
                    let qp = comp0_multi(g, p, w)?;
                    if pq != qp {
                        return Err(Error::Coherence(format!(
                            "components disagree on refinements of {p:?} and {q:?}"
                        )));
                    }
                }
            }
        }
    }
    let mut alpha = RatFun::zero(l);
    for (p, f) in components {
        if p.len() < 2 {
            return Err(Error::Coherence("trivial partition supplied".into()));
        }
        let parts = p.len() as i64;
        let mut c = Rat::one();
        for m in 1..parts {
            c *= rat(m);
        }
        if parts % 2 == 1 {
            c = -c;
        }
        alpha = alpha.add(&f.scale(&c));
    }
    // verify the defining property
    for (p, f) in components {
        let got = comp0_multi(&alpha, p, w)?;
        if got != *f {
            return Err(Error::Coherence(format!(
                "reconstruction disagrees with the supplied component for {p:?}"
            )));
        }
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn regular_matrix_enumeration() {
        // l=2, n=(4,4): exactly the single matrix [[0,-4],[-4,0]]
        let set = enumerate_regular_matrices(2, &[4, 4], -4);
        assert_eq!(set.matrices, vec![vec![vec![0, -4], vec![-4, 0]]]);
        // l=3 contains the all -2 matrix
        let set3 = enumerate_regular_matrices(3, &[4, 4, 4], -4);
        assert!(set3
            .matrices
            .contains(&vec![vec![0, -2, -2], vec![-2, 0, -2], vec![-2, -2, 0]]));
        // brute-force oracle for l=4 over entries in [-4, 4]
        let set4 = enumerate_regular_matrices(4, &[4, 4, 4, 4], -4);
        let mut brute = 0usize;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                for c in -4i64..=4 {
                    for d in -4i64..=4 {
                        for e in -4i64..=4 {
                            for f in -4i64..=4 {
                                // pairs (12,13,14,23,24,34) = (a,b,c,d,e,f)
                                if a + b + c == -4
                                    && a + d + e == -4
                                    && b + d + f == -4
                                    && c + e + f == -4
                                {
                                    brute += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        // upper-triangle entries above 4 are impossible at l=4 (bound is
        // -4 - 2*(-4) = 4), so the brute force is exhaustive
        assert_eq!(set4.matrices.len(), brute);
        for m in &set4.matrices {
            let pi = RatFun::pi_product(m).unwrap();
            assert!(pi.apply_delta_star(&[4, 4, 4, 4]).is_zero());
        }
    }

    #[test]
    fn small_dimension_table() {
        let mut cache = SpaceCache::new();
        assert_eq!(cache.admissible(2).unwrap().dim(), 1);
        assert_eq!(cache.admissible(3).unwrap().dim(), 1);
        assert_eq!(cache.indecomposable(3).unwrap().dim(), 1);
        assert_eq!(cache.indecomposable(4).unwrap().dim(), 3);
        assert_eq!(cache.admissible(4).unwrap().dim(), 6);
        // S^l vanishes through l = 4
        assert_eq!(cache.simple_pole(3).unwrap().dim(), 0);
        assert_eq!(cache.simple_pole(4).unwrap().dim(), 0);
    }

    #[test]
    fn admissible_basis_members_are_admissible() {
        let mut cache = SpaceCache::new();
        let space = cache.admissible(4).unwrap().clone();
        for b in &space.basis {
            assert!(is_admissible(b).unwrap());
        }
        let ind = cache.indecomposable(4).unwrap().clone();
        for b in &ind.basis {
            assert!(is_indecomposable(b).unwrap());
        }
        // the all -2 product is the R^3 basis element up to scale
        let r3 = cache.admissible(3).unwrap().clone();
        let pi = RatFun::pi_product(&[vec![0, -2, -2], vec![-2, 0, -2], vec![-2, -2, 0]]).unwrap();
        assert!(r3.contains(&pi).unwrap());
    }

    #[test]
    fn regular_span_cross_check_l3() {
        // span of pi(S) == kernel of delta* on the ord-bounded space
        let reg = regular_space(3, &[4, 4, 4], -4).unwrap();
        let free = ord_bounded_space(3, -4, -6).unwrap();
        let n4 = [4i64, 4, 4];
        let images: Vec<RatFun> = free.basis.iter().map(|f| f.apply_delta_star(&n4)).collect();
        let fc = FunCoords::build(&images);
        let cols: Vec<Vector> = images.iter().map(|f| fc.vector(f).unwrap()).collect();
        let m = Matrix::from_rows(cols).transpose();
        let (_, ker) = rref_kernel(&m);
        assert_eq!(ker.dim(), reg.dim());
        for ki in 0..ker.dim() {
            let f = free.from_coordinates(ker.basis.row(ki));
            assert!(reg.contains(&f).unwrap());
        }
    }

    #[test]
    fn symmetrize_examples() {
        let mut cache = SpaceCache::new();
        let r2 = cache.admissible(2).unwrap().clone();
        let sym = symmetrize(&mut cache, &r2, &[vec![1, 0]]).unwrap();
        assert_eq!(sym.dim(), 1);
        let r3 = cache.admissible(3).unwrap().clone();
        let sym3 = symmetrize(&mut cache, &r3, &[vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert_eq!(sym3.dim(), 1);
    }

    #[test]
    fn factor_indecomposables_round_trip() {
        let mut cache = SpaceCache::new();
        // product of two R^2 elements
        let prod = {
            let mut d = BTreeMap::new();
            d.insert((0usize, 1usize), -4i64);
            d.insert((2usize, 3usize), -4i64);
            RatFun {
                nvars: 4,
                numer: Poly::one(4),
                diag: d,
            }
        };
        let terms = factor_indecomposables(&mut cache, &prod).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].1.len(), 2);
        assert_eq!(reassemble_factors(4, &terms), prod);
        // a random combination of the six R^4 basis elements
        let r4 = cache.admissible(4).unwrap().clone();
        let coeffs: Vec<Rat> = (0..6).map(|k| ratio(2 * k as i64 - 5, 3)).collect();
        let alpha = r4.from_coordinates(&coeffs);
        let terms = factor_indecomposables(&mut cache, &alpha).unwrap();
        assert_eq!(reassemble_factors(4, &terms), alpha);
        // indecomposables come back whole
        let ind = cache.indecomposable(4).unwrap().basis[0].clone();
        let t = factor_indecomposables(&mut cache, &ind).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].1.len(), 1);
        // non-admissible input is rejected
        assert!(factor_indecomposables(&mut cache, &RatFun::one(2)).is_err());
    }

    #[test]
    fn split_component_empty_for_indecomposable() {
        let mut cache = SpaceCache::new();
        let ind = cache.indecomposable(4).unwrap().basis[1].clone();
        let w = oz_weights(4);
        let p = PartitionSpec::new(4, vec![0, 1], vec![2, 3]).unwrap();
        let pairs = split_component(&ind, &p, 0, &w).unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn prescribe_poles_round_trip_l4() {
        let mut cache = SpaceCache::new();
        let r4 = cache.admissible(4).unwrap().clone();
        let coeffs: Vec<Rat> = (0..6).map(|k| ratio(k as i64 + 1, 2)).collect();
        let alpha = r4.from_coordinates(&coeffs);
        let mut data = BTreeMap::new();
        for i in 0..4usize {
            for j in (i + 1)..4usize {
                for k in [-2i64, -4] {
                    data.insert((i, j, k), alpha.rho_embedded(i, j, k));
                }
            }
        }
        let found = prescribe_poles(&mut cache, 4, &data).unwrap();
        for (&(i, j, k), target) in &data {
            assert_eq!(found.rho_embedded(i, j, k), *target);
        }
        // all-zero data admits the zero solution
        let zero_data: BTreeMap<(usize, usize, i64), RatFun> = [((0usize, 1usize, -2i64), RatFun::zero(4))].into();
        let z = prescribe_poles(&mut cache, 4, &zero_data).unwrap();
        assert!(z.rho_embedded(0, 1, -2).is_zero());
    }

    #[test]
    fn reconstruct_from_parts_round_trip() {
        let mut cache = SpaceCache::new();
        let w = oz_weights(4);
        let prod = {
            let mut d = BTreeMap::new();
            d.insert((0usize, 1usize), -4i64);
            d.insert((2usize, 3usize), -4i64);
            RatFun {
                nvars: 4,
                numer: Poly::one(4),
                diag: d,
            }
        };
        let mut comps = BTreeMap::new();
        for p in set_partitions(4) {
            if p.len() < 2 {
                continue;
            }
            comps.insert(p.clone(), comp0_multi(&prod, &p, &w).unwrap());
        }
        let rec = reconstruct_from_parts(4, &comps, &w).unwrap();
        assert_eq!(rec, prod);
        // all-zero components reconstruct zero
        let zero_comps: BTreeMap<_, _> = comps
            .keys()
            .map(|k| (k.clone(), RatFun::zero(4)))
            .collect();
        assert!(reconstruct_from_parts(4, &zero_comps, &w).unwrap().is_zero());
        // Every R^4 basis element round-trips at the level of degree-0
        // component data; the function itself is recovered exactly when it
        // has no indecomposable part (indecomposables have all components
        // zero, so no formula in the components can see them).
        let r4 = cache.admissible(4).unwrap().clone();
        let ind4 = cache.indecomposable(4).unwrap().clone();
        for b in &r4.basis {
            let mut comps = BTreeMap::new();
            for p in set_partitions(4) {
                if p.len() < 2 {
                    continue;
                }
                comps.insert(p.clone(), comp0_multi(b, &p, &w).unwrap());
            }
            let rec = reconstruct_from_parts(4, &comps, &w).unwrap();
            for (p, c) in &comps {
                assert_eq!(&comp0_multi(&rec, p, &w).unwrap(), c);
            }
            let diff = rec.sub(b);
            if diff.is_zero() {
                continue;
            }
            // the defect is purely indecomposable
            assert!(ind4.contains(&diff).unwrap());
        }
    }

    #[test]
    fn rho_closure_on_r4() {
        let mut cache = SpaceCache::new();
        let r4 = cache.admissible(4).unwrap().clone();
        let r3 = cache.admissible(3).unwrap().clone();
        let r2 = cache.admissible(2).unwrap().clone();
        for b in &r4.basis {
            for i in 0..4usize {
                for j in (i + 1)..4 {
                    assert!(b.rho(i, j, -3).unwrap().is_zero());
                    let m2 = b.rho(i, j, -2).unwrap();
                    assert!(r3.contains(&m2).unwrap());
                    let m4 = b.rho_embedded(i, j, -4).remove_var(i).unwrap();
                    // still depends formally on slot j? It must not.
                    let jj = if j > i { j - 1 } else { j };
                    let m4 = m4.remove_var(jj).unwrap();
                    assert!(r2.contains(&m4).unwrap());
                }
            }
        }
    }
}
