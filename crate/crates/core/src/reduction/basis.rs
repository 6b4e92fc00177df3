//! Isomorphism and direct-summand detection up to change of basis.
//!
//! Both structures are graded by the weight of their arrows in `Z⁴`, the
//! multiplicities of the three Reeb letters and of `U`, modulo the lattice
//! spanned by cycles. Projecting to a `Z`-valued grading that kills the lattice
//! bounds the possible terms of a homogeneous morphism, and the morphism
//! equation becomes a linear system over F₂. `small` is a direct summand of
//! `big` when there are morphisms `f: small → big` and `g: big → small` whose
//! composite has an invertible unit part.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::structures::{Coefficient, DCoef, TypeDStructure};
use crate::torus_algebra::Kind;

type Weight = [i64; 4];

/// A verified summand inclusion, with the generator matching read off the
/// unit part of the inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisIso {
    /// `(generator of small, generator of big)` pairs.
    pub matching: Vec<(String, String)>,
    /// Sparse inclusion `small → big` as `(small index, coefficient, big index)`.
    pub inclusion: Vec<(usize, DCoef, usize)>,
    /// Sparse projection `big → small`.
    pub projection: Vec<(usize, DCoef, usize)>,
}

fn weight(c: DCoef) -> Weight {
    let mut w = [0, 0, 0, c.u as i64];
    for &l in c.alg.letters() {
        w[l as usize - 1] += 1;
    }
    w
}

/// Potential `W` with `W(y) = W(x) − weight` along each arrow, plus the cycle
/// discrepancies it meets.
fn potential(m: &TypeDStructure) -> (Vec<Weight>, Vec<Weight>) {
    let a = &m.arrows;
    let n = a.len();
    let mut adj: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); n];
    for (x, y, c) in a.arrows() {
        let w = weight(c);
        adj[x].push((y, w.map(|v| -v)));
        adj[y].push((x, w));
    }
    let mut pot: Vec<Option<Weight>> = vec![None; n];
    let mut cycles = Vec::new();
    for root in 0..n {
        if pot[root].is_some() {
            continue;
        }
        pot[root] = Some([0; 4]);
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            let px = pot[x].unwrap();
            for &(y, d) in &adj[x] {
                let want = [px[0] + d[0], px[1] + d[1], px[2] + d[2], px[3] + d[3]];
                match pot[y] {
                    None => {
                        pot[y] = Some(want);
                        stack.push(y);
                    }
                    Some(py) if py != want => {
                        cycles.push([want[0] - py[0], want[1] - py[1], want[2] - py[2], want[3] - py[3]]);
                    }
                    _ => {}
                }
            }
        }
    }
    (pot.into_iter().map(Option::unwrap).collect(), cycles)
}

/// An integer functional vanishing on `rows` with nonzero `U` component.
fn grading_functional(rows: &[Weight]) -> Option<Weight> {
    // Fraction-free row reduction over i128, then read a kernel vector.
    let mut m: Vec<[i128; 4]> = rows.iter().map(|r| r.map(|v| v as i128)).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..4 {
        let Some(p) = (r..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][col] != 0 {
                let (a, b) = (m[r][col], m[i][col]);
                for c in 0..4 {
                    m[i][c] = m[i][c] * a - m[r][c] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
                if g > 1 {
                    m[i].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..4).filter(|c| !pivots.contains(c)).collect();
    // Sum the kernel basis vectors, scaled to integers, until the U entry is nonzero.
    let mut best: Option<[i128; 4]> = None;
    for &f in &free {
        let mut v = [0i128; 4];
        let l = pivots.iter().enumerate().fold(1i128, |l, (i, &c)| lcm(l, m[i][c].abs()));
        v[f] = l;
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = -m[i][f] * l / m[i][c];
        }
        best = Some(match best {
            None => v,
            Some(b) => [b[0] + v[0], b[1] + v[1], b[2] + v[2], b[3] + v[3]],
        });
        if best.unwrap()[3] != 0 {
            break;
        }
    }
    let v = best?;
    (v[3] != 0).then(|| {
        let s = if v[3] < 0 { -1 } else { 1 };
        v.map(|x| (x * s) as i64)
    })
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        a / gcd(a, b) * b
    }
}

fn dot(phi: &Weight, w: &Weight) -> i64 {
    phi.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Unknown morphism term `from → U^u·alg·to`.
#[derive(Clone, Copy, Debug)]
struct Var {
    from: usize,
    to: usize,
    coef: DCoef,
}

/// Homogeneous morphism candidates `src → dst` of degree `shift`.
fn variables(src: &TypeDStructure, gs: &[i64], dst: &TypeDStructure, gd: &[i64], phi: &Weight, shift: i64) -> Vec<Var> {
    let mut vars = Vec::new();
    for from in 0..src.len() {
        for to in 0..dst.len() {
            for alg in Kind::BASIS {
                if alg.source() != Some(src.idem(from)) || alg.target() != Some(dst.idem(to)) {
                    continue;
                }
                // Homogeneity: gs(from) − gd(to) + shift = φ(weight).
                let need = gs[from] - gd[to] + shift - dot(phi, &weight(DCoef::new(0, alg)));
                if need < 0 || need % phi[3] != 0 {
                    continue;
                }
                vars.push(Var { from, to, coef: DCoef::new((need / phi[3]) as u32, alg) });
            }
        }
    }
    vars
}

/// Row-reduced nullspace of the morphism equation `δ_dst ∘ f + f ∘ δ_src = 0`.
fn morphism_space(src: &TypeDStructure, dst: &TypeDStructure, vars: &[Var]) -> Vec<Vec<u64>> {
    let mut incoming: Vec<Vec<(usize, DCoef)>> = vec![Vec::new(); src.len()];
    for (x, y, c) in src.arrows.arrows() {
        incoming[y].push((x, c));
    }
    let mut eqs: HashMap<(usize, usize, DCoef), Vec<usize>> = HashMap::new();
    for (i, v) in vars.iter().enumerate() {
        for &(t, c) in dst.arrows.delta(v.to) {
            if let Some(p) = v.coef.mul(c) {
                eqs.entry((v.from, t, p)).or_default().push(i);
            }
        }
        for &(s, c) in &incoming[v.from] {
            if let Some(p) = c.mul(v.coef) {
                eqs.entry((s, v.to, p)).or_default().push(i);
            }
        }
    }
    let words = vars.len().div_ceil(64);
    let mut rows: Vec<Vec<u64>> = eqs
        .into_values()
        .map(|vs| {
            let mut r = vec![0u64; words];
            for v in vs {
                r[v / 64] ^= 1 << (v % 64);
            }
            r
        })
        .filter(|r| r.iter().any(|&w| w != 0))
        .collect();
    let bit = |r: &[u64], i: usize| r[i / 64] >> (i % 64) & 1 == 1;
    let mut pivot_of_col = vec![None; vars.len()];
    let mut rank = 0;
    for col in 0..vars.len() {
        let Some(p) = (rank..rows.len()).find(|&i| bit(&rows[i], col)) else { continue };
        rows.swap(rank, p);
        let pr = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && bit(r, col) {
                r.iter_mut().zip(&pr).for_each(|(a, b)| *a ^= b);
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in (0..vars.len()).filter(|&c| pivot_of_col[c].is_none()) {
        let mut v = vec![0u64; words];
        v[free / 64] |= 1 << (free % 64);
        for (col, p) in pivot_of_col.iter().enumerate() {
            if let Some(p) = *p {
                if bit(&rows[p], free) {
                    v[col / 64] |= 1 << (col % 64);
                }
            }
        }
        basis.push(v);
    }
    basis
}

fn sample(basis: &[Vec<u64>], words: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut v = vec![0u64; words];
    for b in basis {
        if rng.gen::<bool>() {
            v.iter_mut().zip(b).for_each(|(a, c)| *a ^= c);
        }
    }
    v
}

fn terms(vars: &[Var], bits: &[u64]) -> Vec<(usize, DCoef, usize)> {
    vars.iter()
        .enumerate()
        .filter(|(i, _)| bits[i / 64] >> (i % 64) & 1 == 1)
        .map(|(_, v)| (v.from, v.coef, v.to))
        .collect()
}

/// Checks `δ_dst ∘ f + f ∘ δ_src = 0` by direct expansion.
pub fn is_morphism(src: &TypeDStructure, dst: &TypeDStructure, f: &[(usize, DCoef, usize)]) -> bool {
    let mut acc: HashMap<(usize, usize, DCoef), bool> = HashMap::new();
    for &(x, c, y) in f {
        for &(z, d) in dst.arrows.delta(y) {
            if let Some(p) = c.mul(d) {
                *acc.entry((x, z, p)).or_default() ^= true;
            }
        }
    }
    for (x, y, d) in src.arrows.arrows() {
        for &(s, c, t) in f {
            if s == y {
                if let Some(p) = d.mul(c) {
                    *acc.entry((x, t, p)).or_default() ^= true;
                }
            }
        }
    }
    acc.values().all(|&b| !b)
}

/// Unit part of a morphism as a dense F₂ matrix.
fn unit_matrix(f: &[(usize, DCoef, usize)], rows: usize, cols: usize) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; cols]; rows];
    for &(x, c, y) in f {
        if c.is_unit() {
            m[x][y] ^= true;
        }
    }
    m
}

fn invertible(mut m: Vec<Vec<bool>>) -> bool {
    let n = m.len();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| m[i][col]) else { return false };
        m.swap(col, p);
        let pr = m[col].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != col && r[col] {
                r.iter_mut().zip(&pr).for_each(|(a, b)| *a ^= b);
            }
        }
    }
    true
}

/// A perfect matching inside the support of an invertible `rows × cols` F₂ matrix,
/// found by augmenting paths.
fn support_matching(m: &[Vec<bool>]) -> Option<Vec<usize>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    fn augment(r: usize, m: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..m[r].len() {
            if m[r][c] && !seen[c] {
                seen[c] = true;
                if owner[c].is_none_or(|o| augment(o, m, seen, owner)) {
                    owner[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    for r in 0..m.len() {
        if !augment(r, m, &mut vec![false; cols], &mut owner) {
            return None;
        }
    }
    let mut out = vec![0; m.len()];
    for (c, o) in owner.iter().enumerate() {
        if let Some(r) = o {
            out[*r] = c;
        }
    }
    Some(out)
}

/// Searches for `small` as a direct summand of `big` up to change of basis.
/// Returns `None` when no witness is found within `tries` random samples per
/// grading offset.
pub fn summand_up_to_basis(big: &TypeDStructure, small: &TypeDStructure, seed: u64, tries: usize) -> Option<BasisIso> {
    if small.is_empty() {
        return Some(BasisIso { matching: Vec::new(), inclusion: Vec::new(), projection: Vec::new() });
    }
    if small.len() > big.len() || big.side != small.side {
        return None;
    }
    let (wb, cb) = potential(big);
    let (ws, cs) = potential(small);
    let mut lattice = cb;
    lattice.extend(cs);
    let phi = grading_functional(&lattice)?;
    let gb: Vec<i64> = wb.iter().map(|w| dot(&phi, w)).collect();
    let gs: Vec<i64> = ws.iter().map(|w| dot(&phi, w)).collect();
    let mut shifts: Vec<i64> =
        (0..big.len()).filter(|&m| big.idem(m) == small.idem(0)).map(|m| gb[m] - gs[0]).collect();
    shifts.sort_unstable();
    shifts.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for shift in shifts {
        // A unit term small(0) → big(m) has degree 0: gs(0) − gb(m) + shift = 0.
        let fv = variables(small, &gs, big, &gb, &phi, shift);
        let gv = variables(big, &gb, small, &gs, &phi, -shift);
        let fs = morphism_space(small, big, &fv);
        let gsp = morphism_space(big, small, &gv);
        if fs.is_empty() || gsp.is_empty() {
            continue;
        }
        for _ in 0..tries {
            let f = terms(&fv, &sample(&fs, fv.len().div_ceil(64), &mut rng));
            let g = terms(&gv, &sample(&gsp, gv.len().div_ceil(64), &mut rng));
            let f0 = unit_matrix(&f, small.len(), big.len());
            let g0 = unit_matrix(&g, big.len(), small.len());
            let comp: Vec<Vec<bool>> = f0
                .iter()
                .map(|row| {
                    (0..small.len())
                        .map(|j| row.iter().zip(&g0).filter(|(a, r)| **a && r[j]).count() % 2 == 1)
                        .collect()
                })
                .collect();
            if !invertible(comp) {
                continue;
            }
            if !is_morphism(small, big, &f) || !is_morphism(big, small, &g) {
                continue;
            }
            let matching = support_matching(&f0).unwrap_or_default();
            let matching = matching
                .iter()
                .enumerate()
                .map(|(s, &b)| (small.arrows.name(s).to_string(), big.arrows.name(b).to_string()))
                .collect();
            return Some(BasisIso { matching, inclusion: f, projection: g });
        }
    }
    None
}

/// Isomorphism up to change of basis: equal size plus a summand witness.
pub fn isomorphic_up_to_basis(m1: &TypeDStructure, m2: &TypeDStructure, seed: u64) -> Option<BasisIso> {
    if m1.len() != m2.len() {
        return None;
    }
    summand_up_to_basis(m1, m2, seed, 200)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{change_basis, Substitution};
    use crate::torus_algebra::{Idem, Side};

    fn sample_structure() -> TypeDStructure {
        let mut d = TypeDStructure::new(Side::Sigma, true);
        for (n, i) in [("x", Idem::I0), ("y", Idem::I1), ("z", Idem::I0), ("w", Idem::I1)] {
            d.add_gen(n, i).unwrap();
        }
        d.add_arrow("x", 0, Kind::R1, "y").unwrap();
        d.add_arrow("z", 0, Kind::R1, "w").unwrap();
        d.add_arrow("x", 1, Kind::Iota0, "z").unwrap();
        d.add_arrow("y", 1, Kind::Iota1, "w").unwrap();
        d
    }

    #[test]
    fn functional_kills_cycles() {
        let phi = grading_functional(&[[1, 0, 1, -1], [0, 1, 0, -1]]).unwrap();
        assert_eq!(dot(&phi, &[1, 0, 1, -1]), 0);
        assert_eq!(dot(&phi, &[0, 1, 0, -1]), 0);
        assert!(phi[3] > 0);
    }

    #[test]
    fn changed_basis_is_detected() {
        let d = sample_structure();
        let e = change_basis(&d, &[Substitution::new("x", "x'", &[(1, Kind::Iota0, "z")])]).unwrap();
        assert!(isomorphic_up_to_basis(&d, &e, 1).is_some());
    }

    #[test]
    fn different_structures_are_not_isomorphic() {
        let d = sample_structure();
        let mut e = sample_structure();
        e.arrows.toggle(0, 2, DCoef::new(1, Kind::Iota0));
        e.arrows.toggle(0, 2, DCoef::new(2, Kind::Iota0));
        e.arrows.toggle(1, 3, DCoef::new(1, Kind::Iota1));
        e.arrows.toggle(1, 3, DCoef::new(2, Kind::Iota1));
        assert!(isomorphic_up_to_basis(&d, &e, 1).is_none());
    }

    #[test]
    fn summand_of_a_sum() {
        let d = sample_structure();
        let mut big = d.clone();
        big.add_gen("p", Idem::I1).unwrap();
        big.add_gen("q", Idem::I1).unwrap();
        big.add_arrow("p", 1, Kind::Iota1, "q").unwrap();
        assert!(summand_up_to_basis(&big, &d, 3, 50).is_some());
    }
}
