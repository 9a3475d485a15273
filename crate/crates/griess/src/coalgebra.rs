//! The inductive construction of the degree-zero correlation spaces: from an
//! algebra input, the spaces `Omega_0^lambda`, the glued duals `B_0^(l)`,
//! the evaluation maps, and the coalgebra layers feeding the vertex algebra.
//!
//! Glued spaces are handled dually: a functional on `B_0^(l)` is a
//! compatible family -- a functional on `B_0^(l-1)` together with one
//! function per length-l weight whose double/quadruple pole coefficients
//! match the lower evaluation maps (and which, for weights ending in omega,
//! is pinned entirely by the raising formula).  The compatible-family space
//! is one exact kernel per level, and dimensions, restriction maps and
//! evaluation maps all fall out of it.

use crate::error::{Error, Result};
use crate::funspaces::{
    echelonized_space, symmetrize, FunCoords, FunSpace, SpaceCache, SpaceKind,
};
use crate::linalg::{rref_kernel, solve, solve_preimage, Matrix, Subspace, Vector};
use crate::rat::{parse_rat, rat, Rat};
use crate::ratfun::{PartitionSpec, RatFun};
use num_traits::{One, Zero};
use serde::Deserialize;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Algebra input
// ---------------------------------------------------------------------------

/// Raw algebra document: commutative product, symmetric invariant form,
/// optional unit and automorphisms, over the user's basis.
#[derive(Clone, Debug)]
pub struct GriessAlgebraInput {
    pub dim: usize,
    pub labels: Vec<String>,
    /// product[i][j] = coordinates of `a_i a_j`
    pub product: Vec<Vec<Vector>>,
    pub gram: Matrix,
    pub unit: Option<Vector>,
    pub automorphisms: Vec<Matrix>,
    pub nondegenerate: bool,
}

#[derive(Deserialize)]
struct AlgebraDoc {
    dim: usize,
    #[serde(default)]
    basis: Vec<String>,
    product: Vec<(usize, usize, Vec<String>)>,
    form: Vec<(usize, usize, String)>,
    #[serde(default)]
    unit: Option<Vec<String>>,
    #[serde(default)]
    automorphisms: Vec<Vec<Vec<String>>>,
}

/// Parses and validates an algebra document (JSON, 1-based indices,
/// rationals as `p/q` strings).
pub fn load_algebra(text: &str) -> Result<GriessAlgebraInput> {
    let doc: AlgebraDoc =
        serde_json::from_str(text).map_err(|e| Error::AlgebraInput(format!("parse: {e}")))?;
    let n = doc.dim;
    if n == 0 {
        return Err(Error::AlgebraInput("dim must be positive".into()));
    }
    let labels = if doc.basis.is_empty() {
        (1..=n).map(|i| format!("a{i}")).collect()
    } else if doc.basis.len() == n {
        doc.basis.clone()
    } else {
        return Err(Error::AlgebraInput("basis label count != dim".into()));
    };
    let parse_vec = |v: &[String]| -> Result<Vector> {
        if v.len() != n {
            return Err(Error::AlgebraInput(
                "coordinate vector of wrong length".into(),
            ));
        }
        v.iter().map(|s| parse_rat(s)).collect()
    };
    let mut product = vec![vec![vec![Rat::zero(); n]; n]; n];
    let mut seen = vec![vec![false; n]; n];
    for (i, j, coords) in &doc.product {
        if *i == 0 || *j == 0 || *i > n || *j > n {
            return Err(Error::AlgebraInput(format!(
                "product index out of range ({i},{j})"
            )));
        }
        let (i, j) = (i - 1, j - 1);
        let v = parse_vec(coords)?;
        product[i][j] = v.clone();
        product[j][i] = v;
        seen[i][j] = true;
        seen[j][i] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if !seen[i][j] {
                return Err(Error::AlgebraInput(format!(
                    "product of basis elements {} and {} not given",
                    labels[i], labels[j]
                )));
            }
        }
    }
    let mut gram = Matrix::zero(n, n);
    for (i, j, v) in &doc.form {
        if *i == 0 || *j == 0 || *i > n || *j > n {
            return Err(Error::AlgebraInput("form index out of range".into()));
        }
        let (i, j) = (i - 1, j - 1);
        let r = parse_rat(v)?;
        gram[(i, j)] = r.clone();
        gram[(j, i)] = r;
    }
    let unit = doc.unit.as_deref().map(parse_vec).transpose()?;
    let automorphisms: Vec<Matrix> = doc
        .automorphisms
        .iter()
        .map(|rows| {
            let rows: Result<Vec<Vector>> = rows.iter().map(|r| parse_vec(r)).collect();
            Ok(Matrix::from_rows(rows?))
        })
        .collect::<Result<_>>()?;

    let input = GriessAlgebraInput {
        dim: n,
        labels,
        product,
        gram,
        unit,
        automorphisms,
        nondegenerate: false,
    };
    validate_algebra(input)
}

fn validate_algebra(mut input: GriessAlgebraInput) -> Result<GriessAlgebraInput> {
    let n = input.dim;
    let prod = |x: &[Rat], y: &[Rat]| -> Vector {
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                for k in 0..n {
                    let add = x[i].clone() * y[j].clone() * input.product[i][j][k].clone();
                    out[k] += add;
                }
            }
        }
        out
    };
    let form = |x: &[Rat], y: &[Rat]| -> Rat {
        let mut s = Rat::zero();
        for i in 0..n {
            for j in 0..n {
                s += x[i].clone() * y[j].clone() * input.gram[(i, j)].clone();
            }
        }
        s
    };
    let basis_vec = |i: usize| -> Vector {
        (0..n)
            .map(|k| if k == i { Rat::one() } else { Rat::zero() })
            .collect()
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = form(&input.product[i][j], &basis_vec(k));
                let rhs = form(&basis_vec(i), &input.product[j][k]);
                if lhs != rhs {
                    return Err(Error::AlgebraInput(format!(
                        "invariance fails on triple ({}, {}, {}): <ab,c> = {} but <a,bc> = {}",
                        input.labels[i],
                        input.labels[j],
                        input.labels[k],
                        crate::rat::format_rat(&lhs),
                        crate::rat::format_rat(&rhs),
                    )));
                }
            }
        }
    }
    if let Some(e) = &input.unit {
        for i in 0..n {
            let ea = prod(e, &basis_vec(i));
            if ea != basis_vec(i) {
                return Err(Error::AlgebraInput(format!(
                    "unit axiom fails: e * {} != {}",
                    input.labels[i], input.labels[i]
                )));
            }
        }
    }
    for (gi, g) in input.automorphisms.iter().enumerate() {
        if g.rows != n || g.cols != n {
            return Err(Error::AlgebraInput(format!(
                "automorphism {gi} has wrong shape"
            )));
        }
        let apply = |x: &[Rat]| -> Vector { g.mul_vec(x) };
        for i in 0..n {
            for j in 0..n {
                let lhs = apply(&prod(&basis_vec(i), &basis_vec(j)));
                let rhs = prod(&apply(&basis_vec(i)), &apply(&basis_vec(j)));
                if lhs != rhs {
                    return Err(Error::AlgebraInput(format!(
                        "automorphism {gi} does not preserve the product at ({}, {})",
                        input.labels[i], input.labels[j]
                    )));
                }
                let lf = form(&basis_vec(i), &basis_vec(j));
                let rf = form(&apply(&basis_vec(i)), &apply(&basis_vec(j)));
                if lf != rf {
                    return Err(Error::AlgebraInput(format!(
                        "automorphism {gi} does not preserve the form at ({}, {})",
                        input.labels[i], input.labels[j]
                    )));
                }
            }
        }
        if let Some(e) = &input.unit {
            if &apply(e) != e {
                return Err(Error::AlgebraInput(format!(
                    "automorphism {gi} moves the unit"
                )));
            }
        }
    }
    let (rank, _) = rref_kernel(&input.gram);
    input.nondegenerate = rank == n;
    Ok(input)
}

// ---------------------------------------------------------------------------
// Internal algebra: basis with omega last
// ---------------------------------------------------------------------------

/// Algebra in the working basis.  When a unit is present, the last generator
/// is `omega = 2e`; if `<omega, omega> != 0` the others are projected
/// orthogonal to it.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub n: usize,
    pub product: Vec<Vec<Vector>>,
    pub gram: Matrix,
    /// Index of omega (always `n-1`) when the input had a unit.
    pub omega: Option<usize>,
    /// Rows: internal coordinates of each input basis vector.
    pub input_to_internal: Matrix,
    /// Automorphisms acting on internal coordinate vectors.
    pub automorphisms: Vec<Matrix>,
    pub nondegenerate: bool,
    pub labels: Vec<String>,
}

impl Algebra {
    pub fn prod(&self, x: &[Rat], y: &[Rat]) -> Vector {
        let n = self.n;
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                for k in 0..n {
                    if self.product[i][j][k].is_zero() {
                        continue;
                    }
                    let add = x[i].clone() * y[j].clone() * self.product[i][j][k].clone();
                    out[k] += add;
                }
            }
        }
        out
    }

    pub fn form(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if self.gram[(i, j)].is_zero() || y[j].is_zero() {
                    continue;
                }
                s += x[i].clone() * y[j].clone() * self.gram[(i, j)].clone();
            }
        }
        s
    }

    pub fn basis_vec(&self, i: usize) -> Vector {
        (0..self.n)
            .map(|k| if k == i { Rat::one() } else { Rat::zero() })
            .collect()
    }
}

/// Change to the internal basis (omega last when a unit exists).
pub fn internalize(input: &GriessAlgebraInput) -> Result<Algebra> {
    let n = input.dim;
    let form_in = |x: &[Rat], y: &[Rat]| -> Rat {
        let mut s = Rat::zero();
        for i in 0..n {
            for j in 0..n {
                s += x[i].clone() * y[j].clone() * input.gram[(i, j)].clone();
            }
        }
        s
    };
    let basis_rows: Vec<Vector> = if let Some(e) = &input.unit {
        let omega: Vector = e.iter().map(|x| x.clone() + x.clone()).collect();
        let oo = form_in(&omega, &omega);
        let mut rows: Vec<Vector> = Vec::new();
        let mut span = Subspace::from_vectors(n, std::slice::from_ref(&omega));
        for i in 0..n {
            if rows.len() == n - 1 {
                break;
            }
            let mut v: Vector = (0..n)
                .map(|k| if k == i { Rat::one() } else { Rat::zero() })
                .collect();
            if !oo.is_zero() {
                let c = form_in(&v, &omega) / oo.clone();
                for k in 0..n {
                    let sub = c.clone() * omega[k].clone();
                    v[k] -= sub;
                }
            }
            if !span.contains(&v) {
                rows.push(v);
                let mut all = rows.clone();
                all.push(omega.clone());
                span = Subspace::from_vectors(n, &all);
            }
        }
        if rows.len() != n - 1 {
            return Err(Error::AlgebraInput(
                "couldn't complete a basis containing omega".into(),
            ));
        }
        rows.push(omega);
        rows
    } else {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| if k == i { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect()
    };
    // internal -> input is `t`; invert for input -> internal
    let t = Matrix::from_rows(basis_rows.clone());
    let tt = t.transpose();
    let mut input_to_internal_rows = Vec::with_capacity(n);
    for i in 0..n {
        let v: Vector = (0..n)
            .map(|k| if k == i { Rat::one() } else { Rat::zero() })
            .collect();
        let x = solve(&tt, &v)
            .ok_or_else(|| Error::AlgebraInput("internal basis is singular".into()))?;
        input_to_internal_rows.push(x);
    }
    let input_to_internal = Matrix::from_rows(input_to_internal_rows);
    let prod_in = |x: &[Rat], y: &[Rat]| -> Vector {
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            for j in 0..n {
                if x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                for k in 0..n {
                    let add = x[i].clone() * y[j].clone() * input.product[i][j][k].clone();
                    out[k] += add;
                }
            }
        }
        out
    };
    let to_internal = |v: &[Rat]| -> Vector { input_to_internal.transpose().mul_vec(v) };
    let mut product = vec![vec![vec![Rat::zero(); n]; n]; n];
    let mut gram = Matrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let p = prod_in(&basis_rows[i], &basis_rows[j]);
            product[i][j] = to_internal(&p);
            gram[(i, j)] = form_in(&basis_rows[i], &basis_rows[j]);
        }
    }
    let automorphisms: Vec<Matrix> = input
        .automorphisms
        .iter()
        .map(|a| {
            let mut m = Matrix::zero(n, n);
            for c in 0..n {
                let img = a.mul_vec(&basis_rows[c]);
                let img_int = to_internal(&img);
                for r in 0..n {
                    m[(r, c)] = img_int[r].clone();
                }
            }
            m
        })
        .collect();
    let labels = (0..n)
        .map(|i| {
            if input.unit.is_some() && i == n - 1 {
                "omega".to_string()
            } else {
                format!("g{}", i + 1)
            }
        })
        .collect();
    Ok(Algebra {
        n,
        product,
        gram,
        omega: input.unit.as_ref().map(|_| n - 1),
        input_to_internal,
        automorphisms,
        nondegenerate: input.nondegenerate,
        labels,
    })
}

// ---------------------------------------------------------------------------
// Weights and tensors
// ---------------------------------------------------------------------------

/// Multiset of generator indices, stored sorted ascending; omega is the
/// largest index, so it sorts last.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Weight(pub Vec<usize>);

impl Weight {
    pub fn new(mut slots: Vec<usize>) -> Weight {
        slots.sort_unstable();
        Weight(slots)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Transpositions of adjacent equal slots generate the stabilizer.
    pub fn stabilizer_gens(&self) -> Vec<Vec<usize>> {
        let l = self.len();
        let mut gens = Vec::new();
        for k in 1..l {
            if self.0[k] == self.0[k - 1] {
                let mut p: Vec<usize> = (0..l).collect();
                p.swap(k, k - 1);
                gens.push(p);
            }
        }
        gens
    }
}

/// All weights of the given length over `n` generators.
pub fn weights_of_length(n: usize, l: usize) -> Vec<Weight> {
    fn rec(n: usize, l: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Weight>) {
        if cur.len() == l {
            out.push(Weight(cur.clone()));
            return;
        }
        for g in start..n {
            cur.push(g);
            rec(n, l, g, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, l, 0, &mut Vec::new(), &mut out);
    out
}

/// Linear combination of basis tensors of one common length.
pub type LinTensor = Vec<(Rat, Vec<usize>)>;

/// `r^{(1)}_{ij}`: slots i, j merge into their product, which stays at j's
/// position while slot i disappears (so the embedded correlation function
/// keeps living on the variables with `z_i` removed, matching `rho_{ij}`).
/// `r^{(3)}_{ij}`: both slots are deleted and the pairing multiplies.
pub fn r_map(alg: &Algebra, t: &[usize], i: usize, j: usize, k: u8) -> LinTensor {
    assert!(i < j && j < t.len());
    match k {
        1 => {
            let p = &alg.product[t[i]][t[j]];
            let mut out = Vec::new();
            for (g, c) in p.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut slots = t.to_vec();
                slots[j] = g;
                slots.remove(i);
                out.push((c.clone(), slots));
            }
            out
        }
        3 => {
            let c = alg.gram[(t[i], t[j])].clone();
            if c.is_zero() {
                return vec![];
            }
            let mut slots = t.to_vec();
            slots.remove(j);
            slots.remove(i);
            vec![(c, slots)]
        }
        _ => panic!("r_map supports k = 1 or 3"),
    }
}

// ---------------------------------------------------------------------------
// The tower
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CoalgebraTower {
    pub algebra: Algebra,
    pub max_length: usize,
    /// `Omega_0^lambda` per weight, Gamma-symmetric echelon basis.
    pub omega0: BTreeMap<Weight, FunSpace>,
    /// dim `B_0^(l)` per level.
    pub b0_dims: Vec<usize>,
    /// Restriction of functionals: level-l coordinates -> level-(l-1).
    pub restr: Vec<Matrix>,
    /// Evaluation: level-|lambda| functional coordinates -> coordinates in
    /// the `Omega_0^lambda` basis.
    pub ev: BTreeMap<Weight, Matrix>,
    /// Dimension of the pole-data kernel per weight (the new generators).
    pub new_gens: BTreeMap<Weight, usize>,
}

impl CoalgebraTower {
    pub fn new(algebra: Algebra) -> CoalgebraTower {
        let mut omega0 = BTreeMap::new();
        let empty = Weight(vec![]);
        omega0.insert(
            empty.clone(),
            echelonized_space(0, SpaceKind::Admissible, &[RatFun::one(0)]),
        );
        let mut ev = BTreeMap::new();
        ev.insert(empty, Matrix::identity(1));
        CoalgebraTower {
            algebra,
            max_length: 0,
            omega0,
            b0_dims: vec![1],
            restr: vec![Matrix::zero(0, 1)],
            ev,
            new_gens: BTreeMap::new(),
        }
    }

    /// Functional restriction from level `from` down to level `to`.
    pub fn restrict(&self, f: &[Rat], from: usize, to: usize) -> Vector {
        let mut v = f.to_vec();
        for l in ((to + 1)..=from).rev() {
            v = self.restr[l].mul_vec(&v);
        }
        v
    }

    /// Coordinates of the unit element of `B_0^(level)` as the pairing
    /// row: `g(unit) = unit_row . g` for functional coordinates `g`.
    pub fn unit_row(&self, level: usize) -> Vector {
        let dim = self.b0_dims[level];
        (0..dim)
            .map(|k| {
                let mut g = vec![Rat::zero(); dim];
                g[k] = Rat::one();
                let r = self.restrict(&g, level, 0);
                r[0].clone()
            })
            .collect()
    }

    /// Correlation function of a level functional against a basis tensor,
    /// on `slots.len()` compact variables.
    pub fn phi_tensor(&self, f: &[Rat], level: usize, slots: &[usize]) -> Result<RatFun> {
        let m = slots.len();
        if m > level || level > self.max_length {
            return Err(Error::TowerIncomplete(m.max(level), self.max_length));
        }
        let fm = self.restrict(f, level, m);
        let w = Weight::new(slots.to_vec());
        let space = self
            .omega0
            .get(&w)
            .ok_or_else(|| Error::TowerIncomplete(m, self.max_length))?;
        if space.dim() == 0 {
            return Ok(RatFun::zero(m));
        }
        let coords = self.ev[&w].mul_vec(&fm);
        let sorted_fun = space.from_coordinates(&coords);
        // sigma with sorted[sigma[k]] = slots[k]
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by_key(|&k| (slots[k], k));
        let mut sigma = vec![0usize; m];
        for (r, &k) in idx.iter().enumerate() {
            sigma[k] = r;
        }
        sorted_fun.permute(&sigma)
    }

    /// phi of a linear combination, embedded on `l` variables with the given
    /// dead slots (ascending).
    pub fn phi_lin_embedded(
        &self,
        f: &[Rat],
        level: usize,
        lt: &LinTensor,
        l: usize,
        dead: &[usize],
    ) -> Result<RatFun> {
        let mut total = RatFun::zero(l);
        for (c, slots) in lt {
            let mut fun = self.phi_tensor(f, level, slots)?;
            for &d in dead {
                fun = fun.insert_var(d);
            }
            total = total.add(&fun.scale(c));
        }
        Ok(total)
    }
}

/// Per-weight data produced while building one level.
struct WeightBuild {
    space: FunSpace,
    /// For omega weights: `alpha`-coordinates = pin * f.  For generic
    /// weights: rows of (data map, phi map) sharing target frames.
    constraint: WeightConstraint,
    new_gens: usize,
}

enum WeightConstraint {
    /// alpha_coords - pin * f = 0
    Pinned { pin: Matrix },
    /// dmat * alpha_coords - fmat * f = 0
    Data { dmat: Matrix, fmat: Matrix },
}

/// Pole-data targets for a weight: every pair (i, j) with k in {1, 3}.
fn data_keys(l: usize) -> Vec<(usize, usize, u8)> {
    let mut keys = Vec::new();
    for i in 0..l {
        for j in (i + 1)..l {
            keys.push((i, j, 1u8));
            keys.push((i, j, 3u8));
        }
    }
    keys
}

fn build_weight(
    tower: &CoalgebraTower,
    cache: &mut SpaceCache,
    w: &Weight,
) -> Result<WeightBuild> {
    let l = w.len();
    let alg = &tower.algebra;
    let r_prev = tower.b0_dims[l - 1];
    let func_basis: Vec<Vector> = (0..r_prev)
        .map(|k| {
            (0..r_prev)
                .map(|i| if i == k { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();

    if alg.omega == Some(*w.0.last().unwrap_or(&usize::MAX)) {
        // omega branch: alpha = (1/2) T E beta + sum_i (z_i - z_l)^{-4} beta_i
        let rest: Vec<usize> = w.0[..l - 1].to_vec();
        let full = &w.0;
        let mut images: Vec<RatFun> = Vec::with_capacity(r_prev);
        for f in &func_basis {
            // beta = phi(f, 2 * rest)
            let beta_lt: LinTensor = vec![(rat(2), rest.clone())];
            let beta = tower.phi_lin_embedded(f, l - 1, &beta_lt, l - 1, &[])?;
            let mut alpha = RatFun::te_operator(&beta)?.scale(&crate::rat::ratio(1, 2));
            for i in 0..(l - 1) {
                let bi = r_map(alg, full, i, l - 1, 3);
                if bi.is_empty() {
                    continue;
                }
                // beta_i on l-2 compact vars; embed with dead slots {i, l-1}
                let fun = tower.phi_lin_embedded(f, l - 1, &bi, l - 2, &[])?;
                let emb = fun.insert_var(i).insert_var(l - 1);
                let mut d = BTreeMap::new();
                d.insert((i, l - 1), -4i64);
                let pole = RatFun {
                    nvars: l,
                    numer: crate::poly::Poly::one(l),
                    diag: d,
                };
                alpha = alpha.add(&pole.mul(&emb));
            }
            images.push(alpha);
        }
        let space = echelonized_space(l, SpaceKind::Admissible, &images);
        // pin matrix: coordinates of each image in the echelon basis
        let mut pin = Matrix::zero(space.dim(), r_prev);
        for (k, img) in images.iter().enumerate() {
            let coords = space
                .coordinates(img)?
                .ok_or_else(|| Error::Internal("omega image escaped its own span".into()))?;
            for (r, c) in coords.into_iter().enumerate() {
                pin[(r, k)] = c;
            }
        }
        // Gamma-symmetry assertion (property (B1)/(B3) for repeated slots)
        for gen in w.stabilizer_gens() {
            for b in &space.basis {
                if &b.permute(&gen)? != b {
                    return Err(Error::Internal(format!(
                        "omega-branch space for {w:?} is not stabilizer-symmetric"
                    )));
                }
            }
        }
        Ok(WeightBuild {
            space,
            constraint: WeightConstraint::Pinned { pin },
            new_gens: 0,
        })
    } else {
        // generic branch: Gamma-symmetric admissible functions whose pole
        // data lies in the image of the lower evaluation maps
        let sym = {
            let adm = cache.admissible(l)?.clone();
            symmetrize(cache, &adm, &w.stabilizer_gens())?
        };
        let keys = data_keys(l);
        let mut dmat_rows: Vec<Vector> = Vec::new();
        let mut fmat_rows: Vec<Vector> = Vec::new();
        for &(i, j, k) in &keys {
            let rho_k = if k == 1 { -2 } else { -4 };
            let rho_images: Vec<RatFun> = sym
                .basis
                .iter()
                .map(|b| b.rho_embedded(i, j, rho_k))
                .collect();
            let lt = r_map(alg, &w.0, i, j, k);
            let dead: Vec<usize> = if k == 1 { vec![i] } else { vec![i, j] };
            let phi_images: Vec<RatFun> = func_basis
                .iter()
                .map(|f| tower.phi_lin_embedded(f, l - 1, &lt, l, &dead))
                .collect::<Result<_>>()?;
            let mut frame_funs = rho_images.clone();
            frame_funs.extend(phi_images.iter().cloned());
            let fc = FunCoords::build(&frame_funs);
            let rho_vecs: Vec<Vector> = rho_images
                .iter()
                .map(|f| fc.vector(f).expect("own frame"))
                .collect();
            let phi_vecs: Vec<Vector> = phi_images
                .iter()
                .map(|f| fc.vector(f).expect("own frame"))
                .collect();
            for r in 0..fc.dim() {
                dmat_rows.push(rho_vecs.iter().map(|v| v[r].clone()).collect());
                fmat_rows.push(phi_vecs.iter().map(|v| v[r].clone()).collect());
            }
        }
        let (space, dmat, fmat, new_gens) = if sym.dim() == 0 || dmat_rows.is_empty() {
            let space = FunSpace::new(l, SpaceKind::Admissible, vec![]);
            (
                space,
                Matrix::zero(dmat_rows.len(), 0),
                Matrix::from_rows(fmat_rows.clone()),
                0,
            )
        } else {
            let dmat_sym = Matrix::from_rows(dmat_rows.clone());
            let fmat = Matrix::from_rows(fmat_rows.clone());
            // target subspace: the column space of fmat
            let cols: Vec<Vector> = (0..r_prev)
                .map(|c| (0..fmat.rows).map(|r| fmat[(r, c)].clone()).collect())
                .collect();
            let target = Subspace::from_vectors(fmat.rows, &cols);
            let pre = solve_preimage(&dmat_sym, &target)?;
            let funs: Vec<RatFun> = (0..pre.dim())
                .map(|ri| sym.from_coordinates(pre.basis.row(ri)))
                .collect();
            let space = echelonized_space(l, SpaceKind::Admissible, &funs);
            // data map on the echelon basis, through its sym coordinates so
            // the target frames stay shared with fmat
            let mut sym_coords: Vec<Vector> = Vec::with_capacity(space.dim());
            for b in &space.basis {
                let c = sym
                    .coordinates(b)?
                    .ok_or_else(|| Error::Internal("echelon basis left the domain".into()))?;
                sym_coords.push(c);
            }
            let mut dmat = Matrix::zero(dmat_sym.rows, space.dim());
            for (col, c) in sym_coords.iter().enumerate() {
                let v = dmat_sym.mul_vec(c);
                for r in 0..dmat_sym.rows {
                    dmat[(r, col)] = v[r].clone();
                }
            }
            // new generators: kernel of the data map on the weight space
            let (_, ker) = rref_kernel(&dmat);
            let new_gens = ker.dim();
            (space, dmat, fmat, new_gens)
        };
        Ok(WeightBuild {
            space,
            constraint: WeightConstraint::Data { dmat, fmat },
            new_gens,
        })
    }
}

/// Extends the tower by one length level, checking the structural
/// properties of the construction along the way.
pub fn extend_tower(
    tower: &mut CoalgebraTower,
    cache: &mut SpaceCache,
) -> Result<()> {
    let l = tower.max_length + 1;
    let n = tower.algebra.n;
    let r_prev = tower.b0_dims[l - 1];
    let weights = weights_of_length(n, l);
    let mut builds: Vec<(Weight, WeightBuild)> = Vec::new();
    for w in &weights {
        let b = build_weight(tower, cache, w)?;
        builds.push((w.clone(), b));
    }
    // assemble the compatible-family kernel
    let dims: Vec<usize> = builds.iter().map(|(_, b)| b.space.dim()).collect();
    let total_alpha: usize = dims.iter().sum();
    let ncols = r_prev + total_alpha;
    let mut rows: Vec<Vector> = Vec::new();
    let mut offset = r_prev;
    for (_, b) in &builds {
        match &b.constraint {
            WeightConstraint::Pinned { pin } => {
                for r in 0..b.space.dim() {
                    let mut row = vec![Rat::zero(); ncols];
                    for c in 0..r_prev {
                        row[c] = -pin[(r, c)].clone();
                    }
                    row[offset + r] = Rat::one();
                    rows.push(row);
                }
            }
            WeightConstraint::Data { dmat, fmat } => {
                debug_assert_eq!(dmat.rows, fmat.rows);
                for r in 0..dmat.rows {
                    let mut row = vec![Rat::zero(); ncols];
                    let mut nonzero = false;
                    for c in 0..r_prev {
                        row[c] = -fmat[(r, c)].clone();
                        nonzero |= !row[c].is_zero();
                    }
                    for c in 0..dmat.cols {
                        row[offset + c] = dmat[(r, c)].clone();
                        nonzero |= !row[offset + c].is_zero();
                    }
                    if nonzero {
                        rows.push(row);
                    }
                }
            }
        }
        offset += b.space.dim();
    }
    let kernel = if rows.is_empty() {
        Subspace::full(ncols)
    } else {
        let (_, k) = rref_kernel(&Matrix::from_rows(rows));
        k
    };
    let r_new = kernel.dim();
    // restriction and evaluation matrices from the kernel basis
    let mut restr = Matrix::zero(r_prev, r_new);
    for c in 0..r_new {
        for r in 0..r_prev {
            restr[(r, c)] = kernel.basis[(c, r)].clone();
        }
    }
    // (Prop Omega) every lower functional extends: the f-block has full rank
    {
        let (rank, _) = rref_kernel(&restr);
        if rank != r_prev {
            return Err(Error::Internal(format!(
                "level {l}: lower functionals do not all extend (rank {rank} < {r_prev})"
            )));
        }
    }
    let mut evs: Vec<(Weight, Matrix)> = Vec::new();
    let mut offset = r_prev;
    let mut growth = 0usize;
    for ((w, b), d) in builds.iter().zip(&dims) {
        let mut ev = Matrix::zero(*d, r_new);
        for c in 0..r_new {
            for r in 0..*d {
                ev[(r, c)] = kernel.basis[(c, offset + r)].clone();
            }
        }
        // every function in the weight space is realized by some functional
        let (rank, _) = rref_kernel(&ev);
        if rank != *d {
            return Err(Error::Internal(format!(
                "level {l}: weight {w:?} functions not all realized (rank {rank} < {d})"
            )));
        }
        evs.push((w.clone(), ev));
        growth += b.new_gens;
        offset += d;
    }
    // (B5)-style growth bookkeeping
    if r_new != r_prev + growth {
        return Err(Error::Internal(format!(
            "level {l}: dim B_0 grew by {} but the data kernels total {growth}",
            r_new - r_prev
        )));
    }
    tower.max_length = l;
    tower.b0_dims.push(r_new);
    tower.restr.push(restr);
    for (w, b) in builds {
        tower.new_gens.insert(w.clone(), b.new_gens);
        tower.omega0.insert(w.clone(), b.space);
    }
    for (w, ev) in evs {
        tower.ev.insert(w, ev);
    }
    Ok(())
}

/// Builds a tower to the requested length.
pub fn build_tower(algebra: Algebra, max_length: usize, cache: &mut SpaceCache) -> Result<CoalgebraTower> {
    let mut tower = CoalgebraTower::new(algebra);
    for _ in 0..max_length {
        extend_tower(&mut tower, cache)?;
    }
    Ok(tower)
}

// ---------------------------------------------------------------------------
// Coalgebra layers
// ---------------------------------------------------------------------------

/// `Omega^lambda_d`: the span of degree-`d` J-factors of the degree-zero
/// functions over all companion weights within the length cutoff.
pub fn coalgebra_layer(
    tower: &CoalgebraTower,
    lambda: &Weight,
    d: i64,
    max_length: usize,
) -> Result<FunSpace> {
    let l = lambda.len();
    if d < 0 {
        return Ok(FunSpace::new(l, SpaceKind::Admissible, vec![]));
    }
    let w_all = |m: usize| crate::funspaces::oz_weights(m);
    let mut collected: Vec<RatFun> = Vec::new();
    for total in l..=max_length {
        for nu in weights_of_length(tower.algebra.n, total) {
            // J-slot subsets of nu matching lambda's multiset
            let subsets = matching_subsets(&nu.0, &lambda.0);
            if subsets.is_empty() {
                continue;
            }
            let space = tower
                .omega0
                .get(&nu)
                .ok_or_else(|| Error::TowerIncomplete(total, tower.max_length))?;
            if space.dim() == 0 {
                continue;
            }
            for jset in subsets {
                let iset: Vec<usize> = (0..total).filter(|v| !jset.contains(v)).collect();
                let p = PartitionSpec::new(total, iset, jset.clone())?;
                for b in &space.basis {
                    let pairs = crate::funspaces::split_component(b, &p, d, &w_all(total))?;
                    for (_, jf) in pairs {
                        collected.push(jf);
                    }
                }
            }
        }
    }
    Ok(echelonized_space(l, SpaceKind::Admissible, &collected))
}

/// Position subsets of the sorted slot list `nu` whose entries form exactly
/// the multiset `lambda`.
fn matching_subsets(nu: &[usize], lambda: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = nu.len();
    let l = lambda.len();
    if l > total {
        return out;
    }
    let mut choice: Vec<usize> = Vec::new();
    fn rec(
        nu: &[usize],
        lambda: &[usize],
        start: usize,
        choice: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if choice.len() == lambda.len() {
            out.push(choice.clone());
            return;
        }
        let need = lambda[choice.len()];
        for pos in start..nu.len() {
            if nu[pos] == need {
                choice.push(pos);
                rec(nu, lambda, pos + 1, choice, out);
                choice.pop();
            }
        }
    }
    rec(nu, lambda, 0, &mut choice, &mut out);
    // the sorted slots can repeat; distinct position sets may pick the same
    // entries, which is fine (duplicates only add repeated spans)
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Graph generators
// ---------------------------------------------------------------------------

/// Builds the symmetrized simple-pole witness of a bipartite 4-regular
/// graph that stays connected after removing any two edges.
pub fn graph_generator(edges: &[(usize, usize)]) -> Result<RatFun> {
    // vertex set
    let l = edges
        .iter()
        .map(|&(a, b)| a.max(b) + 1)
        .max()
        .ok_or_else(|| Error::BadGraph("empty edge list".into()))?;
    let mut adj = vec![vec![]; l];
    for &(a, b) in edges {
        if a == b {
            return Err(Error::BadGraph("loop edge".into()));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    // 4-regular
    if adj.iter().any(|nb| nb.len() != 4) {
        return Err(Error::BadGraph("graph is not 4-regular".into()));
    }
    // bipartite 2-coloring
    let mut color = vec![-1i32; l];
    color[0] = 0;
    let mut queue = vec![0usize];
    while let Some(v) = queue.pop() {
        for &u in &adj[v] {
            if color[u] == -1 {
                color[u] = 1 - color[v];
                queue.push(u);
            } else if color[u] == color[v] {
                return Err(Error::BadGraph("graph is not bipartite".into()));
            }
        }
    }
    if color.iter().any(|&c| c == -1) {
        return Err(Error::BadGraph("graph is not connected".into()));
    }
    // connectivity after removal of any two edges
    let connected_without = |skip: &[usize]| -> bool {
        let mut seen = vec![false; l];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (ei, &(a, b)) in edges.iter().enumerate() {
                if skip.contains(&ei) {
                    continue;
                }
                let u = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    for e1 in 0..edges.len() {
        for e2 in (e1 + 1)..edges.len() {
            if !connected_without(&[e1, e2]) {
                return Err(Error::BadGraph(format!(
                    "removing edges {e1} and {e2} disconnects the graph"
                )));
            }
        }
    }
    // pi(S) with -1 on edges
    let mut s = vec![vec![0i64; l]; l];
    for &(a, b) in edges {
        s[a][b] = -1;
        s[b][a] = -1;
    }
    let pi = RatFun::pi_product(&s)?;
    // symmetrize over color classes
    let left: Vec<usize> = (0..l).filter(|&v| color[v] == 0).collect();
    let right: Vec<usize> = (0..l).filter(|&v| color[v] == 1).collect();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for grp in [&left, &right] {
        for k in 1..grp.len() {
            let mut p: Vec<usize> = (0..l).collect();
            p.swap(grp[k - 1], grp[k]);
            gens.push(p);
        }
    }
    let group = crate::funspaces::permutation_closure(l, &gens);
    let terms: Vec<RatFun> = group
        .iter()
        .map(|sigma| pi.permute(sigma))
        .collect::<Result<_>>()?;
    let sum = RatFun::sum_many(&terms);
    Ok(sum.scale(&(Rat::one() / rat(group.len() as i64))))
}
