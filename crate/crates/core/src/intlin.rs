//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Vectors are rows. A presentation with `n` generators and relation matrix
//! `R` (one relation per row) describes the group `Z^n / rowspan(R)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntLinError {
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("relation {row} of the source is not sent into the relations of the target")]
    RelationNotRespected { row: usize },
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn from_big_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        IntMatrix { rows: n, cols, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, IntLinError> {
        if self.cols != other.rows {
            return Err(IntLinError::Dimensions(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(k, j);
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix, IntLinError> {
        if self.cols != other.cols {
            return Err(IntLinError::Dimensions(format!("stacking {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> Option<BigInt> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(BigInt::one());
        }
        let mut a = self.row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return Some(BigInt::zero());
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Some(sign * &a[n - 1][n - 1])
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            f.write_str(&r.join(" "))?;
        }
        f.write_str("]")
    }
}

/// `u * m * v = d` with `u`, `v` unimodular and `d` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// The nonzero diagonal entries, all positive.
    pub diagonal: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

fn min_abs_position(a: &[Vec<BigInt>], from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(from) {
        for (j, x) in row.iter().enumerate().skip(from) {
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    smith_impl(m, true)
}

/// Skips the row transform, which is `rows x rows` and dominates the cost for
/// tall relation matrices. The returned `u` is empty.
fn smith_diagonal_only(m: &IntMatrix) -> Smith {
    smith_impl(m, false)
}

fn smith_impl(m: &IntMatrix, track_u: bool) -> Smith {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.row_vecs();
    let mut u = if track_u { IntMatrix::identity(rows).row_vecs() } else { vec![vec![]; rows] };
    // v is kept transposed so that column operations become row operations
    let mut vt = IntMatrix::identity(cols).row_vecs();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_abs_position(&a, t) else {
            break;
        };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        vt.swap(t, pj);
        loop {
            let pivot = a[t][t].clone();
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&pivot);
                for j in t..cols {
                    let x = &q * &a[t][j];
                    a[i][j] -= x;
                }
                for j in 0..u[t].len() {
                    let x = &q * &u[t][j];
                    u[i][j] -= x;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&pivot);
                for row in a.iter_mut().skip(t) {
                    let x = &q * &row[t];
                    row[j] -= x;
                }
                for k in 0..cols {
                    let x = &q * &vt[t][k];
                    vt[j][k] -= x;
                }
            }
            // a smaller remainder in the pivot row or column becomes the new pivot
            let mut smaller: Option<(usize, usize)> = None;
            for i in t + 1..rows {
                if !a[i][t].is_zero() && smaller.map_or(true, |(si, sj)| a[i][t].abs() < a[si][sj].abs()) {
                    smaller = Some((i, t));
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() && smaller.map_or(true, |(si, sj)| a[t][j].abs() < a[si][sj].abs()) {
                    smaller = Some((t, j));
                }
            }
            if let Some((i, j)) = smaller {
                if j == t {
                    a.swap(t, i);
                    u.swap(t, i);
                } else {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    vt.swap(t, j);
                }
                continue;
            }
            let pivot = a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            if let Some(i) = bad {
                for j in t..cols {
                    let x = a[i][j].clone();
                    a[t][j] += x;
                }
                for j in 0..u[i].len() {
                    let x = u[i][j].clone();
                    u[t][j] += x;
                }
                continue;
            }
            break;
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let diagonal: Vec<BigInt> = (0..rows.min(cols)).map(|i| a[i][i].clone()).take_while(|x| !x.is_zero()).collect();
    let mut v = IntMatrix::zeros(cols, cols);
    for (i, row) in vt.into_iter().enumerate() {
        for (j, x) in row.into_iter().enumerate() {
            v.set(j, i, x);
        }
    }
    Smith {
        u: if track_u { IntMatrix::from_big_rows(rows, u) } else { IntMatrix::zeros(0, 0) },
        d: IntMatrix::from_big_rows(cols, a),
        v,
        diagonal,
    }
}

/// The sublattice of `Z^n` spanned by the rows of a matrix.
#[derive(Clone, Debug)]
pub struct RowLattice {
    smith: Smith,
}

impl RowLattice {
    pub fn new(m: &IntMatrix) -> RowLattice {
        RowLattice {
            smith: smith_diagonal_only(m),
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let w = self.smith.v.apply_row(v);
        w.iter().enumerate().all(|(j, x)| match self.smith.diagonal.get(j) {
            Some(d) => x.is_multiple_of(d),
            None => x.is_zero(),
        })
    }
}

fn dedup_rows(cols: usize, m: &IntMatrix) -> IntMatrix {
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    for i in 0..m.rows() {
        let r = m.row(i);
        if r.iter().all(Zero::is_zero) {
            continue;
        }
        // a row and its negative span the same lattice
        let canonical: Vec<BigInt> = match r.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => r.iter().map(|y| -y).collect(),
            _ => r.to_vec(),
        };
        if seen.insert(canonical.clone()) {
            rows.push(canonical);
        }
    }
    IntMatrix::from_big_rows(cols, rows)
}

/// A finitely generated abelian group presented as `Z^n / rowspan(R)`,
/// together with its invariant factors.
#[derive(Clone, Debug)]
pub struct FgAbelianGroup {
    generators: usize,
    relations: IntMatrix,
    smith: Smith,
    torsion: Vec<BigInt>,
    rank: usize,
}

/// Coordinates of an element: residues modulo each invariant factor, then
/// the free coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coordinates {
    pub torsion: Vec<BigInt>,
    pub free: Vec<BigInt>,
}

pub fn cokernel(relations: &IntMatrix) -> FgAbelianGroup {
    let n = relations.cols();
    let relations = dedup_rows(n, relations);
    let smith = smith_diagonal_only(&relations);
    let torsion = smith.diagonal.iter().filter(|d| !d.is_one()).cloned().collect();
    let rank = n - smith.rank();
    FgAbelianGroup {
        generators: n,
        relations,
        smith,
        torsion,
        rank,
    }
}

impl FgAbelianGroup {
    pub fn free(n: usize) -> FgAbelianGroup {
        cokernel(&IntMatrix::zeros(0, n))
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Invariant factors greater than one, each dividing the next.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// The order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.rank > 0 {
            return None;
        }
        Some(self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    /// Invariant-factor isomorphism type. Comparing this alone says nothing
    /// about any particular map; use [`GroupHom::is_isomorphism`] for that.
    pub fn same_type(&self, other: &FgAbelianGroup) -> bool {
        self.rank == other.rank && self.torsion == other.torsion
    }

    pub fn coordinates(&self, v: &[BigInt]) -> Coordinates {
        assert_eq!(v.len(), self.generators);
        let w = self.smith.v.apply_row(v);
        let mut torsion = Vec::new();
        let mut free = Vec::new();
        for (j, x) in w.into_iter().enumerate() {
            match self.smith.diagonal.get(j) {
                Some(d) if d.is_one() => {}
                Some(d) => torsion.push(x.mod_floor(d)),
                None => free.push(x),
            }
        }
        Coordinates { torsion, free }
    }

    pub fn generator_coordinates(&self, i: usize) -> Coordinates {
        let mut v = vec![BigInt::zero(); self.generators];
        v[i] = BigInt::one();
        self.coordinates(&v)
    }

    /// Whether `v` lies in the relation lattice, i.e. is zero in the group.
    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        let c = self.coordinates(v);
        c.torsion.iter().all(Zero::is_zero) && c.free.iter().all(Zero::is_zero)
    }

    /// Number of elements `x` with `k x = 0`.
    pub fn count_killed_by(&self, k: u64) -> Option<BigInt> {
        if k == 0 {
            return self.order();
        }
        let k = BigInt::from(k);
        Some(self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d.gcd(&k)))
    }

    /// `Z^r + Z/d1 + … + Z/dk`, or `0` for the trivial group.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    pub fn torsion_u64(&self) -> Vec<Option<u64>> {
        self.torsion.iter().map(ToPrimitive::to_u64).collect()
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A homomorphism given on generators: row `i` of `matrix` is the image of
/// generator `i` of the source, written in the generators of the target.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: FgAbelianGroup, target: FgAbelianGroup, matrix: IntMatrix) -> Result<GroupHom, IntLinError> {
        if matrix.rows() != source.generators() || matrix.cols() != target.generators() {
            return Err(IntLinError::Dimensions(format!(
                "{}x{} matrix for {} -> {} generators",
                matrix.rows(),
                matrix.cols(),
                source.generators(),
                target.generators()
            )));
        }
        let lattice = RowLattice::new(target.relations());
        for r in 0..source.relations().rows() {
            let image = matrix.apply_row(source.relations().row(r));
            if !lattice.contains(&image) {
                return Err(IntLinError::RelationNotRespected { row: r });
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    pub fn source(&self) -> &FgAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom, IntLinError> {
        let matrix = self.matrix.mul(&other.matrix)?;
        GroupHom::new(self.source.clone(), other.target.clone(), matrix)
    }

    pub fn is_surjective(&self) -> bool {
        let n = self.target.generators();
        let stacked = self.matrix.vstack(self.target.relations()).expect("same column count");
        let smith = smith_diagonal_only(&stacked);
        smith.rank() == n && smith.diagonal.iter().all(One::is_one)
    }

    pub fn is_injective(&self) -> bool {
        let m = self.source.generators();
        let stacked = self.matrix.vstack(self.target.relations()).expect("same column count");
        let smith = smith_normal_form(&stacked);
        let source_lattice = RowLattice::new(self.source.relations());
        // rows of u past the rank span the left kernel of the stacked matrix
        (smith.rank()..stacked.rows()).all(|i| source_lattice.contains(&smith.u.row(i)[..m]))
    }

    /// Whether the induced map of quotient groups is bijective.
    pub fn is_isomorphism(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }
}

pub fn induced_iso_check(h: &GroupHom) -> bool {
    h.is_isomorphism()
}

/// A commutative monoid presented by generators and relations `lhs = rhs`,
/// each side a multiset of generators (the empty word is the unit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidPresentation {
    pub generators: usize,
    pub relations: Vec<(Vec<usize>, Vec<usize>)>,
}

impl MonoidPresentation {
    pub fn relation_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = self
            .relations
            .iter()
            .map(|(lhs, rhs)| {
                let mut row = vec![BigInt::zero(); self.generators];
                for &g in lhs {
                    row[g] += 1;
                }
                for &g in rhs {
                    row[g] -= 1;
                }
                row
            })
            .collect();
        IntMatrix::from_big_rows(self.generators, rows)
    }
}

/// The Grothendieck group of a finitely presented commutative monoid.
pub fn group_completion(p: &MonoidPresentation) -> FgAbelianGroup {
    cokernel(&p.relation_matrix())
}
