//! Cosimplicial complexes and the signed Alexander-Whitney map.
//!
//! A cosimplicial complex is a cosimplicial object in complexes, stored
//! up to a finite top level. Its totalization places the internal degree
//! in the first coordinate and the cosimplicial degree in the second, so
//! the cosimplicial direction picks up the sign (-1)^{internal degree}.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::complex::{tensor_map, ChainMap, Complex, TensorComplex};
use crate::graded::Degree;
use crate::matrix::Matrix;
use crate::multicomplex::{MultiComplex, TotalAssembly};
use crate::ring::{sign_pow, Scalar};

/// A cosimplicial object in complexes, truncated at a top level.
/// `cofaces[r][i]` is the i-th coface level r -> level r+1 for
/// i = 0..=r+1; `codegens[r][j]` is the j-th codegeneracy
/// level r+1 -> level r for j = 0..=r.
pub struct CosimplicialComplex<S: Scalar> {
    levels: Vec<Complex<S>>,
    cofaces: Vec<Vec<ChainMap<S>>>,
    codegens: Vec<Vec<ChainMap<S>>>,
}

impl<S: Scalar> CosimplicialComplex<S> {
    /// Validates arities, endpoints, and every cosimplicial identity
    /// expressible within the truncation. The structure maps are chain
    /// maps by construction of `ChainMap`.
    pub fn new(
        levels: Vec<Complex<S>>,
        cofaces: Vec<Vec<ChainMap<S>>>,
        codegens: Vec<Vec<ChainMap<S>>>,
    ) -> Result<Self, String> {
        if levels.is_empty() {
            return Err("a cosimplicial complex needs at least one level".into());
        }
        let top = levels.len() - 1;
        if cofaces.len() != top || codegens.len() != top {
            return Err("one family of structure maps per adjacent pair of levels".into());
        }
        for r in 0..top {
            if cofaces[r].len() != r + 2 {
                return Err(format!("level {r} needs {} cofaces", r + 2));
            }
            if codegens[r].len() != r + 1 {
                return Err(format!("level {} needs {} codegeneracies", r + 1, r + 1));
            }
            for d in &cofaces[r] {
                if d.degree() != 0 || *d.source() != levels[r] || *d.target() != levels[r + 1] {
                    return Err(format!("coface endpoints wrong at level {r}"));
                }
            }
            for s in &codegens[r] {
                if s.degree() != 0 || *s.source() != levels[r + 1] || *s.target() != levels[r] {
                    return Err(format!("codegeneracy endpoints wrong at level {}", r + 1));
                }
            }
        }
        let c = CosimplicialComplex {
            levels,
            cofaces,
            codegens,
        };
        c.check_identities()?;
        Ok(c)
    }

    // delta^j delta^i = delta^i delta^{j-1} for i < j;
    // sigma^j sigma^i = sigma^i sigma^{j+1} for i <= j;
    // sigma^j delta^i = delta^i sigma^{j-1} for i < j, the identity for
    // i = j and i = j+1, and delta^{i-1} sigma^j for i > j+1.
    fn check_identities(&self) -> Result<(), String> {
        let top = self.top();
        for r in 0..top.saturating_sub(1) {
            for j in 0..=r + 2 {
                for i in 0..j {
                    let lhs = self.coface(r + 1, j).compose(self.coface(r, i));
                    let rhs = self.coface(r + 1, i).compose(self.coface(r, j - 1));
                    if !maps_equal(&lhs, &rhs) {
                        return Err(format!("coface identity fails at level {r}, (i, j) = ({i}, {j})"));
                    }
                }
            }
            for j in 0..=r {
                for i in 0..=j {
                    let lhs = self.codegeneracy(r, j).compose(self.codegeneracy(r + 1, i));
                    let rhs = self.codegeneracy(r, i).compose(self.codegeneracy(r + 1, j + 1));
                    if !maps_equal(&lhs, &rhs) {
                        return Err(format!(
                            "codegeneracy identity fails at level {r}, (i, j) = ({i}, {j})"
                        ));
                    }
                }
            }
        }
        for r in 0..top {
            for j in 0..=r {
                for i in 0..=r + 1 {
                    let lhs = self.codegeneracy(r, j).compose(self.coface(r, i));
                    // At the bottom level only the unit cases can occur
                    // (i < j or i > j+1 both force r >= 1).
                    let rhs = if i == j || i == j + 1 {
                        ChainMap::identity(&self.levels[r])
                    } else if i < j {
                        self.coface(r - 1, i).compose(self.codegeneracy(r - 1, j - 1))
                    } else {
                        self.coface(r - 1, i - 1).compose(self.codegeneracy(r - 1, j))
                    };
                    if !maps_equal(&lhs, &rhs) {
                        return Err(format!(
                            "mixed identity fails at level {r}, (i, j) = ({i}, {j})"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The constant cosimplicial complex on `c` with identity structure
    /// maps, truncated at `top`.
    pub fn constant(c: &Complex<S>, top: usize) -> Self {
        let levels = vec![c.clone(); top + 1];
        let cofaces = (0..top)
            .map(|r| vec![ChainMap::identity(c); r + 2])
            .collect();
        let codegens = (0..top).map(|r| vec![ChainMap::identity(c); r + 1]).collect();
        CosimplicialComplex {
            levels,
            cofaces,
            codegens,
        }
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, r: usize) -> &Complex<S> {
        &self.levels[r]
    }

    pub fn coface(&self, r: usize, i: usize) -> &ChainMap<S> {
        &self.cofaces[r][i]
    }

    pub fn codegeneracy(&self, r: usize, j: usize) -> &ChainMap<S> {
        &self.codegens[r][j]
    }

    /// The alternating coface sum out of level r.
    pub fn cosimplicial_differential(&self, r: usize) -> ChainMap<S> {
        let mut d = ChainMap::zero(&self.levels[r], &self.levels[r + 1], 0);
        for (i, f) in self.cofaces[r].iter().enumerate() {
            d = d.add(&f.scale(&sign_pow(i as i64)));
        }
        d
    }

    /// Totalization: internal degree first, cosimplicial degree second,
    /// so the coface sum acts with the sign (-1)^{internal degree}.
    pub fn total(&self) -> TotalAssembly<S> {
        let mut ranks = BTreeMap::new();
        let mut d_int = BTreeMap::new();
        let mut d_cos = BTreeMap::new();
        for (r, lv) in self.levels.iter().enumerate() {
            let boundary = if r < self.top() {
                Some(self.cosimplicial_differential(r))
            } else {
                None
            };
            for &n in &lv.support() {
                ranks.insert(vec![n, r as Degree], lv.rank(n));
                let m = lv.d(n);
                if !m.is_zero() {
                    d_int.insert(vec![n, r as Degree], m);
                }
                if let Some(b) = &boundary {
                    let m = b.component(n);
                    if !m.is_zero() {
                        d_cos.insert(vec![n, r as Degree], m);
                    }
                }
            }
        }
        MultiComplex::new(2, ranks, vec![d_int, d_cos])
            .expect("cosimplicial structure maps assemble a bicomplex")
            .total()
    }
}

/// The cosimplicial complex of `v`-valued functions on the standard
/// simplicial k-simplex, truncated at `top`: level n holds one copy of
/// `v` per monotone map [n] -> [k], and the structure maps precompose
/// with the simplicial faces and degeneracies. The cosimplicial
/// identities hold because the simplicial ones do, which makes this a
/// convenient independent supply of fully structured examples.
pub fn simplex_functions<S: Scalar>(
    k: usize,
    top: usize,
    v: &Complex<S>,
) -> Result<CosimplicialComplex<S>, String> {
    // Monotone sequences of length n+1 in 0..=k, lexicographically.
    let simplices = |n: usize| -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..=n {
            let mut next = Vec::new();
            for s in &out {
                let lo = s.last().copied().unwrap_or(0);
                for a in lo..=k {
                    let mut t = s.clone();
                    t.push(a);
                    next.push(t);
                }
            }
            out = next;
        }
        out
    };
    let copies: Vec<Vec<Vec<usize>>> = (0..=top).map(simplices).collect();
    let level = |n: usize| -> Complex<S> {
        let mut c = Complex::zero();
        for _ in 0..copies[n].len() {
            c = c.direct_sum(v);
        }
        c
    };
    let levels: Vec<Complex<S>> = (0..=top).map(level).collect();
    // The 0/1 matrix of precomposition with `op`, tensored with the
    // identity of `v` degreewise.
    let induced = |src: usize, tgt: usize, op: &dyn Fn(&[usize]) -> Vec<usize>| -> ChainMap<S> {
        let mut perm: Matrix<S> = Matrix::zero(copies[tgt].len(), copies[src].len());
        for (row, x) in copies[tgt].iter().enumerate() {
            let img = op(x);
            let col = copies[src]
                .iter()
                .position(|y| *y == img)
                .expect("face image is a simplex");
            perm.set(row, col, S::one());
        }
        let mut comps = BTreeMap::new();
        for &n in &v.support() {
            comps.insert(n, perm.kronecker(&Matrix::identity(v.rank(n))));
        }
        ChainMap::new(levels[src].clone(), levels[tgt].clone(), 0, comps)
            .expect("precomposition is a chain map")
    };
    let mut cofaces = Vec::new();
    let mut codegens = Vec::new();
    for r in 0..top {
        cofaces.push(
            (0..=r + 1)
                .map(|i| {
                    induced(r, r + 1, &move |x: &[usize]| {
                        let mut y = x.to_vec();
                        y.remove(i);
                        y
                    })
                })
                .collect(),
        );
        codegens.push(
            (0..=r)
                .map(|j| {
                    induced(r + 1, r, &move |x: &[usize]| {
                        let mut y = x.to_vec();
                        y.insert(j, x[j]);
                        y
                    })
                })
                .collect(),
        );
    }
    CosimplicialComplex::new(levels, cofaces, codegens)
}

fn maps_equal<S: Scalar>(f: &ChainMap<S>, g: &ChainMap<S>) -> bool {
    let mut degs = f.source().support();
    degs.extend(g.source().support());
    degs.sort_unstable();
    degs.dedup();
    degs.iter().all(|&n| f.component(n) == g.component(n))
}

/// The diagonal of two cosimplicial complexes: levelwise tensor product
/// with tensored structure maps, truncated at the smaller top. Returns
/// the tensor presentations alongside, for block bookkeeping.
pub fn diagonal<S: Scalar>(
    a: &CosimplicialComplex<S>,
    b: &CosimplicialComplex<S>,
) -> Result<(CosimplicialComplex<S>, Vec<TensorComplex<S>>), String> {
    let top = a.top().min(b.top());
    let tcs: Vec<TensorComplex<S>> = (0..=top)
        .map(|r| TensorComplex::new(a.level(r), b.level(r)))
        .collect();
    let levels = tcs.iter().map(|tc| tc.complex.clone()).collect();
    let mut cofaces = Vec::new();
    let mut codegens = Vec::new();
    for r in 0..top {
        cofaces.push(
            (0..=r + 1)
                .map(|i| tensor_map(a.coface(r, i), b.coface(r, i), &tcs[r], &tcs[r + 1]))
                .collect(),
        );
        codegens.push(
            (0..=r)
                .map(|j| tensor_map(a.codegeneracy(r, j), b.codegeneracy(r, j), &tcs[r + 1], &tcs[r]))
                .collect(),
        );
    }
    let diag = CosimplicialComplex::new(levels, cofaces, codegens)?;
    Ok((diag, tcs))
}

// The front inclusion [p] -> [p+q], i |-> i, as the composite of top
// cofaces; the identity when q = 0.
fn front_inclusion<S: Scalar>(a: &CosimplicialComplex<S>, p: usize, q: usize) -> ChainMap<S> {
    let mut f = ChainMap::identity(a.level(p));
    for s in p + 1..=p + q {
        f = a.coface(s - 1, s).compose(&f);
    }
    f
}

// The back inclusion [q] -> [p+q], j |-> p+j, as the composite of zeroth
// cofaces; the identity when p = 0.
fn back_inclusion<S: Scalar>(b: &CosimplicialComplex<S>, q: usize, p: usize) -> ChainMap<S> {
    let mut f = ChainMap::identity(b.level(q));
    for s in 0..p {
        f = b.coface(q + s, 0).compose(&f);
    }
    f
}

/// The signed Alexander-Whitney package: the tensor of the totalizations,
/// the diagonal, and the verified chain map between their totals.
pub struct AwPackage<S: Scalar> {
    pub left_total: TotalAssembly<S>,
    pub right_total: TotalAssembly<S>,
    /// Tot(A) ⊗ Tot(B) with its block structure.
    pub source: TensorComplex<S>,
    pub diagonal: CosimplicialComplex<S>,
    /// The levelwise tensor presentations of the diagonal.
    pub diagonal_levels: Vec<TensorComplex<S>>,
    pub target: TotalAssembly<S>,
    pub map: ChainMap<S>,
}

/// The Alexander-Whitney map Tot(A) ⊗ Tot(B) -> Tot(diagonal), sending a
/// generator of internal degree p at cosimplicial level n tensored with
/// one of internal degree q at level m to (-1)^{qn} times the front
/// inclusion tensor the back inclusion, both landing at level n+m.
/// Components at levels beyond the truncation are dropped; the result is
/// verified to be a chain map.
pub fn aw_map<S: Scalar>(
    a: &CosimplicialComplex<S>,
    b: &CosimplicialComplex<S>,
) -> Result<AwPackage<S>, String> {
    let left_total = a.total();
    let right_total = b.total();
    let source = TensorComplex::new(&left_total.complex, &right_total.complex);
    let (diag, diag_levels) = diagonal(a, b)?;
    let target = diag.total();
    let top = diag.top();

    let mut comps = BTreeMap::new();
    for &deg in &source.complex.support() {
        let mut mat: Matrix<S> = Matrix::zero(target.complex.rank(deg), source.complex.rank(deg));
        for (ldeg, rdeg) in source.degree_blocks(deg) {
            let col_base = source.offset(deg, ldeg);
            let rrank = right_total.complex.rank(rdeg);
            for (lblk, _) in left_total.blocks(ldeg) {
                let (p, n) = (lblk[0], lblk[1] as usize);
                for (rblk, _) in right_total.blocks(rdeg) {
                    let (q, m) = (rblk[0], rblk[1] as usize);
                    if n + m > top {
                        continue;
                    }
                    let front = front_inclusion(a, n, m).component(p);
                    let back = back_inclusion(b, m, n).component(q);
                    let blk = front
                        .kronecker(&back)
                        .scale(&sign_pow(q as i64 * n as i64));
                    if blk.is_zero() {
                        continue;
                    }
                    let row_base = target
                        .offset(deg, &[p + q, (n + m) as Degree])
                        .expect("diagonal block exists")
                        + diag_levels[n + m].offset(p + q, p);
                    let col_l = left_total.offset(ldeg, lblk).expect("left block exists");
                    let col_r = right_total.offset(rdeg, rblk).expect("right block exists");
                    let (la, ca) = (front.rows(), front.cols());
                    let (lb, cb) = (back.rows(), back.cols());
                    for fa in 0..la {
                        for gb in 0..lb {
                            for xa in 0..ca {
                                for yb in 0..cb {
                                    let v = blk.get(fa * lb + gb, xa * cb + yb).clone();
                                    if v.is_zero() {
                                        continue;
                                    }
                                    let row = row_base + fa * lb + gb;
                                    let col = col_base + (col_l + xa) * rrank + (col_r + yb);
                                    let u = mat.get(row, col).clone() + v;
                                    mat.set(row, col, u);
                                }
                            }
                        }
                    }
                }
            }
        }
        comps.insert(deg, mat);
    }
    let map = ChainMap::new(source.complex.clone(), target.complex.clone(), 0, comps)
        .map_err(|e| format!("Alexander-Whitney map: {e:?}"))?;
    Ok(AwPackage {
        left_total,
        right_total,
        source,
        diagonal: diag,
        diagonal_levels: diag_levels,
        target,
        map,
    })
}
