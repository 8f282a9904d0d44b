//! Independent oracles shared by the integration tests. None of these call
//! into the library's own algorithms for the quantity they check.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dendroid::tree::Tree;

/// Root of each vertex's component, by union-find.
pub fn union_find_roots(vertices: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..vertices).map(|v| find(&mut parent, v)).collect()
}

/// Connected components of a graph.
pub fn union_find_components(vertices: usize, edges: &[(usize, usize)]) -> usize {
    let roots = union_find_roots(vertices, edges);
    (0..vertices).filter(|&v| roots[v] == v).count()
}

/// Determinant by Laplace expansion along the first row.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: `d_k = D_k / D_{k-1}` where
/// `D_k` is the gcd of all `k × k` minors. Stops at the first zero `D_k`.
pub fn minors_gcd_invariants(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect()).collect();
                g = gcd(g, det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

/// The Grothendieck group of a finite commutative monoid built from pairs:
/// `(a, b) ~ (c, d)` iff `a + d + k = b + c + k` for some `k`. Returns, for
/// each `n` in `1..=limit`, the number of classes `x` with `n x = 0`.
pub fn grothendieck_pairs_torsion_profile(op: &[Vec<usize>], unit: usize, limit: u64) -> Vec<usize> {
    let m = op.len();
    let add = |a: usize, b: usize| op[a][b];
    let pair = |a: usize, b: usize| a * m + b;
    let mut parent: Vec<usize> = (0..m * m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if (0..m).any(|k| add(add(a, d), k) == add(add(b, c), k)) {
                        let (x, y) = (find(&mut parent, pair(a, b)), find(&mut parent, pair(c, d)));
                        parent[x] = y;
                    }
                }
            }
        }
    }
    let zero = find(&mut parent, pair(unit, unit));
    let mut classes: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for a in 0..m {
        for b in 0..m {
            let r = find(&mut parent, pair(a, b));
            classes.entry(r).or_insert((a, b));
        }
    }
    (1..=limit)
        .map(|n| {
            classes
                .values()
                .filter(|&&(a, b)| {
                    let (mut x, mut y) = (unit, unit);
                    for _ in 0..n {
                        x = add(x, a);
                        y = add(y, b);
                    }
                    find(&mut parent, pair(x, y)) == zero
                })
                .count()
        })
        .collect()
}

/// Whether the edge map is valid, checked from the definition: each source
/// vertex goes to an identity (unary, input and output equal) or to the
/// operation spanned by distinct input images over the output image.
pub fn naive_valid(s: &Tree, t: &Tree, edges: &[usize]) -> bool {
    s.vertices().iter().all(|v| {
        let out = edges[v.output];
        let ins: Vec<usize> = v.inputs.iter().map(|&i| edges[i]).collect();
        if ins.len() == 1 && ins[0] == out {
            return true;
        }
        let mut sorted = ins.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == ins.len() && spans(t, out, &ins)
    })
}

/// Whether `leaves` are exactly the leaves of a subtree of `t` rooted at
/// `root`: every edge of `leaves` lies above `root`, none lies above
/// another, and every path from `root` upward meets one of them or ends at
/// a nullary vertex.
fn spans(t: &Tree, root: usize, leaves: &[usize]) -> bool {
    let above = |lo: usize, hi: usize| -> bool {
        let mut e = hi;
        loop {
            if e == lo {
                return true;
            }
            match t.vertex_below(e) {
                Some(v) => e = t.vertex(v).output,
                None => return false,
            }
        }
    };
    if leaves.iter().any(|&l| !above(root, l)) {
        return false;
    }
    for (i, &a) in leaves.iter().enumerate() {
        for (j, &b) in leaves.iter().enumerate() {
            if i != j && above(a, b) {
                return false;
            }
        }
    }
    // every maximal upward path from root must hit a chosen edge
    fn covered(t: &Tree, e: usize, leaves: &[usize]) -> bool {
        if leaves.contains(&e) {
            return true;
        }
        match t.vertex_above(e) {
            None => false,
            Some(v) => t.vertex(v).inputs.iter().all(|&i| covered(t, i, leaves)),
        }
    }
    covered(t, root, leaves)
}

/// All valid maps `s → t` by brute force over `|E_t|^|E_s|` edge maps,
/// sorted.
pub fn brute_force_hom(s: &Tree, t: &Tree, valid: impl Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
    let (ns, nt) = (s.num_edges(), t.num_edges());
    let mut out = Vec::new();
    let mut e = vec![0usize; ns];
    loop {
        if valid(&e) {
            out.push(e.clone());
        }
        let mut i = 0;
        loop {
            if i == ns {
                out.sort();
                return out;
            }
            e[i] += 1;
            if e[i] < nt {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Relations of the three horns of `C(n,k)` written out by hand, as
/// `(label, [(left side, right side)])` over edge names.
pub fn displayed_grafted_horns(n: usize, k: usize) -> Vec<(&'static str, Vec<(Vec<String>, Vec<String>)>)> {
    let a: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (1..=k).map(|i| format!("b{i}")).collect();
    let bk = format!("b{k}");
    let c = "c".to_string();
    let lower_without_bk: Vec<String> = b[..k - 1].to_vec();
    let mut composite = lower_without_bk.clone();
    composite.extend(a.iter().cloned());
    vec![
        ("bk", vec![(a.clone(), vec![bk.clone()]), (b.clone(), vec![c.clone()])]),
        ("v", vec![(a.clone(), vec![bk]), (composite.clone(), vec![c.clone()])]),
        ("w", vec![(b, vec![c.clone()]), (composite, vec![c])]),
    ]
}
