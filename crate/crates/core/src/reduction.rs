//! Cancellation of unit arrows, connected components, isomorphism search and
//! graded homology over F₂[U].

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use thiserror::Error;

use crate::structures::{toggle, Arrows, Coefficient, GradedComplexFU, UPow, Vector};

mod basis;

pub use basis::{is_morphism, isomorphic_up_to_basis, summand_up_to_basis, BasisIso};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("generator {0} has no grading")]
    Ungraded(String),
    #[error("grading inconsistency on arrow {0} -> {1}")]
    Inhomogeneous(String, String),
}

/// Which unit arrow to cancel first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CancelOrder {
    /// Smallest `(source name, target name)` first.
    #[default]
    Lex,
    /// Largest `(source name, target name)` first.
    ReverseLex,
}

/// Working copy used by the cancellation loops.
struct Work<C: Coefficient> {
    delta: Vec<Vector<C>>,
    alive: Vec<bool>,
}

impl<C: Coefficient> Work<C> {
    fn new<L: Clone>(m: &Arrows<L, C>) -> Self {
        Work { delta: (0..m.len()).map(|i| m.delta(i).clone()).collect(), alive: vec![true; m.len()] }
    }

    /// Cancels `x -> c y`, where `c` divides every other coefficient into `y`
    /// through `quotient`, adding the zig-zag terms `z -> (a/c)·δx`.
    fn cancel(&mut self, x: usize, y: usize, quotient: impl Fn(C) -> Option<C>) {
        let dx: Vec<(usize, C)> = self.delta[x].iter().copied().filter(|&(t, _)| t != y).collect();
        for z in 0..self.delta.len() {
            if z == x || !self.alive[z] {
                continue;
            }
            let into_y: Vec<C> = self.delta[z].iter().filter(|&&(t, _)| t == y).map(|&(_, c)| c).collect();
            for a in into_y {
                self.delta[z].remove(&(y, a));
                let Some(q) = quotient(a) else { continue };
                for &(w, b) in &dx {
                    if let Some(p) = q.mul(b) {
                        toggle(&mut self.delta[z], (w, p));
                    }
                }
            }
        }
        self.alive[x] = false;
        self.alive[y] = false;
        self.delta[x].clear();
        self.delta[y].clear();
        for d in self.delta.iter_mut() {
            d.retain(|&(t, _)| t != x && t != y);
        }
    }
}

/// Cancels unit arrows until none remain, in the given order.
pub fn reduce_with<L: Clone, C: Coefficient>(m: &Arrows<L, C>, order: CancelOrder) -> Arrows<L, C> {
    let mut w = Work::new(m);
    loop {
        let mut best: Option<(usize, usize, C)> = None;
        for x in 0..m.len() {
            if !w.alive[x] {
                continue;
            }
            for &(y, c) in &w.delta[x] {
                if !c.is_unit() || y == x {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bx, by, _)) => {
                        let key = (m.name(x), m.name(y));
                        let cur = (m.name(bx), m.name(by));
                        match order {
                            CancelOrder::Lex => key < cur,
                            CancelOrder::ReverseLex => key > cur,
                        }
                    }
                };
                if better {
                    best = Some((x, y, c));
                }
            }
        }
        let Some((x, y, c)) = best else { break };
        // The unit c is an idempotent, so a·c⁻¹ = a whenever the product is defined.
        w.cancel(x, y, |a| a.mul(c));
    }
    m.restrict(&w.alive).with_delta_from(m, &w.delta)
}

/// [`reduce_with`] in lexicographic order.
pub fn reduce<L: Clone, C: Coefficient>(m: &Arrows<L, C>) -> Arrows<L, C> {
    reduce_with(m, CancelOrder::Lex)
}

trait WithDelta<L, C: Coefficient> {
    fn with_delta_from(self, orig: &Arrows<L, C>, delta: &[Vector<C>]) -> Arrows<L, C>;
}

impl<L: Clone, C: Coefficient> WithDelta<L, C> for Arrows<L, C> {
    /// Fills a restricted copy with the working differential of the original.
    fn with_delta_from(mut self, orig: &Arrows<L, C>, delta: &[Vector<C>]) -> Arrows<L, C> {
        let map: HashMap<usize, usize> =
            (0..orig.len()).filter_map(|i| self.find(orig.name(i)).map(|j| (i, j))).collect();
        for (i, d) in delta.iter().enumerate() {
            if let Some(&si) = map.get(&i) {
                let v = d.iter().map(|&(t, c)| (map[&t], c)).collect();
                self.set_delta(si, v);
            }
        }
        self
    }
}

/// Splits into connected components of the undirected arrow graph, ordered by
/// their first generator.
pub fn split_components<L: Clone, C: Coefficient>(m: &Arrows<L, C>) -> Vec<Arrows<L, C>> {
    let n = m.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (s, t, _) in m.arrows() {
        let (a, b) = (root(&mut parent, s), root(&mut parent, t));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups
        .values()
        .map(|members| {
            let mut keep = vec![false; n];
            for &i in members {
                keep[i] = true;
            }
            m.restrict(&keep)
        })
        .collect()
}

/// The component containing generator `name`, if present.
pub fn component_of<L: Clone, C: Coefficient>(m: &Arrows<L, C>, name: &str) -> Option<Arrows<L, C>> {
    split_components(m).into_iter().find(|c| c.find(name).is_some())
}

/// Searches for a bijection `f` (indices of `m1` to indices of `m2`) that
/// preserves labels and carries every arrow `x -> c y` to `f(x) -> c f(y)`.
pub fn isomorphic<L, C>(m1: &Arrows<L, C>, m2: &Arrows<L, C>) -> Option<Vec<usize>>
where
    L: Clone + Eq + Hash + Ord,
    C: Coefficient,
{
    if m1.len() != m2.len() || m1.arrow_count() != m2.arrow_count() {
        return None;
    }
    let n = m1.len();
    let (c1, c2) = refine_colors(m1, m2);
    let mut sorted1 = c1.clone();
    let mut sorted2 = c2.clone();
    sorted1.sort_unstable();
    sorted2.sort_unstable();
    if sorted1 != sorted2 {
        return None;
    }
    let e1 = edge_map(m1);
    let e2 = edge_map(m2);
    // Visit in BFS order over the undirected graph so constraints bite early.
    let order = bfs_order(m1, &c1);
    let mut f = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut search = Search { m1, c1: &c1, c2: &c2, e1: &e1, e2: &e2, order: &order };
    if search.extend(0, &mut f, &mut used) {
        Some(f)
    } else {
        None
    }
}

/// Name-level view of an isomorphism from [`isomorphic`].
pub fn relabeling<L: Clone, C: Coefficient>(
    m1: &Arrows<L, C>,
    m2: &Arrows<L, C>,
    f: &[usize],
) -> Vec<(String, String)> {
    f.iter().enumerate().map(|(i, &j)| (m1.name(i).to_string(), m2.name(j).to_string())).collect()
}

type EdgeMap<C> = HashMap<(usize, usize), Vec<C>>;

fn edge_map<L: Clone, C: Coefficient>(m: &Arrows<L, C>) -> EdgeMap<C> {
    let mut e: EdgeMap<C> = HashMap::new();
    for (s, t, c) in m.arrows() {
        e.entry((s, t)).or_default().push(c);
    }
    for v in e.values_mut() {
        v.sort_unstable();
    }
    e
}

fn bfs_order<L: Clone, C: Coefficient>(m: &Arrows<L, C>, colors: &[u64]) -> Vec<usize> {
    let n = m.len();
    let mut nbrs = vec![Vec::new(); n];
    for (s, t, _) in m.arrows() {
        nbrs[s].push(t);
        nbrs[t].push(s);
    }
    // Rarest colour first as BFS roots.
    let mut freq: HashMap<u64, usize> = HashMap::new();
    for &c in colors {
        *freq.entry(c).or_default() += 1;
    }
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&i| (freq[&colors[i]], i));
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for r in roots {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut queue = std::collections::VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &nbrs[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Colour refinement run on both structures at once so colours are comparable.
fn refine_colors<L, C>(m1: &Arrows<L, C>, m2: &Arrows<L, C>) -> (Vec<u64>, Vec<u64>)
where
    L: Clone + Eq + Hash + Ord,
    C: Coefficient,
{
    use std::collections::hash_map::DefaultHasher;
    use std::hash::Hasher;
    let hash = |v: &dyn Fn(&mut DefaultHasher)| {
        let mut h = DefaultHasher::new();
        v(&mut h);
        h.finish()
    };
    let init = |m: &Arrows<L, C>| -> Vec<u64> { (0..m.len()).map(|i| hash(&|h| m.label(i).hash(h))).collect() };
    let step = |m: &Arrows<L, C>, col: &[u64]| -> Vec<u64> {
        let mut outs = vec![Vec::new(); m.len()];
        let mut ins = vec![Vec::new(); m.len()];
        for (s, t, c) in m.arrows() {
            outs[s].push((c, col[t], s == t));
            ins[t].push((c, col[s], s == t));
        }
        (0..m.len())
            .map(|i| {
                outs[i].sort_unstable();
                ins[i].sort_unstable();
                hash(&|h| {
                    col[i].hash(h);
                    outs[i].hash(h);
                    ins[i].hash(h);
                })
            })
            .collect()
    };
    let (mut a, mut b) = (init(m1), init(m2));
    let classes = |a: &[u64], b: &[u64]| {
        let mut s: Vec<u64> = a.iter().chain(b).copied().collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let mut count = classes(&a, &b);
    loop {
        let (na, nb) = (step(m1, &a), step(m2, &b));
        let next = classes(&na, &nb);
        a = na;
        b = nb;
        if next == count {
            break;
        }
        count = next;
    }
    (a, b)
}

struct Search<'a, L: Clone, C: Coefficient> {
    m1: &'a Arrows<L, C>,
    c1: &'a [u64],
    c2: &'a [u64],
    e1: &'a EdgeMap<C>,
    e2: &'a EdgeMap<C>,
    order: &'a [usize],
}

impl<L: Clone, C: Coefficient> Search<'_, L, C> {
    fn consistent(&self, u: usize, v: usize, f: &[usize]) -> bool {
        let empty = Vec::new();
        let get = |e: &EdgeMap<C>, k: (usize, usize)| e.get(&k).unwrap_or(&empty).clone();
        if get(self.e1, (u, u)) != get(self.e2, (v, v)) {
            return false;
        }
        for &w in self.order {
            let fw = f[w];
            if fw == usize::MAX {
                continue;
            }
            if get(self.e1, (u, w)) != get(self.e2, (v, fw)) || get(self.e1, (w, u)) != get(self.e2, (fw, v)) {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, depth: usize, f: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let u = self.order[depth];
        for v in 0..self.m1.len() {
            if used[v] || self.c2[v] != self.c1[u] || !self.consistent(u, v, f) {
                continue;
            }
            f[u] = v;
            used[v] = true;
            if self.extend(depth + 1, f, used) {
                return true;
            }
            f[u] = usize::MAX;
            used[v] = false;
        }
        false
    }
}

/// Homology of a graded complex over F₂[U]: free towers and torsion summands.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Homology {
    /// Alexander grading of each free tower generator, sorted.
    pub free: Vec<i64>,
    /// `(grading, k)` for each `F[U]/U^k` summand, sorted.
    pub torsion: Vec<(i64, u32)>,
}

impl Homology {
    pub fn free_rank(&self) -> usize {
        self.free.len()
    }
}

/// Checks that every arrow `x -> U^k y` has `A(x) = A(y) − k`.
pub fn check_homogeneous(c: &GradedComplexFU) -> Result<(), ReductionError> {
    let a = &c.arrows;
    for i in 0..a.len() {
        let gi = c.grading(i).ok_or_else(|| ReductionError::Ungraded(a.name(i).to_string()))?;
        for &(j, u) in a.delta(i) {
            let gj = c.grading(j).ok_or_else(|| ReductionError::Ungraded(a.name(j).to_string()))?;
            if gi != gj - i64::from(u.0) {
                return Err(ReductionError::Inhomogeneous(a.name(i).to_string(), a.name(j).to_string()));
            }
        }
    }
    Ok(())
}

/// Homology via homogeneous elimination: repeatedly isolate the arrow with
/// the smallest U-exponent `k`, which then divides every entry in its row and
/// column. `k = 0` pairs cancel, `k > 0` pairs give `F[U]/U^k` at the target.
pub fn graded_homology(c: &GradedComplexFU) -> Result<Homology, ReductionError> {
    check_homogeneous(c)?;
    let a = &c.arrows;
    let mut w = Work::new(a);
    let mut h = Homology::default();
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for x in 0..a.len() {
            if !w.alive[x] {
                continue;
            }
            // A loop is never a pivot; d² = 0 keeps an off-diagonal one available.
            for &(y, u) in w.delta[x].iter().filter(|&&(y, _)| y != x) {
                if best.is_none_or(|b| (u.0, x, y) < b) {
                    best = Some((u.0, x, y));
                }
            }
        }
        let Some((k, x, y)) = best else { break };
        if k > 0 {
            h.torsion.push((c.grading(y).expect("checked"), k));
        }
        w.cancel(x, y, |UPow(m)| Some(UPow(m - k)));
    }
    for i in 0..a.len() {
        if w.alive[i] {
            h.free.push(c.grading(i).expect("checked"));
        }
    }
    h.free.sort_unstable();
    h.torsion.sort_unstable();
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{DCoef, TypeDStructure};
    use crate::torus_algebra::{Idem, Kind, Side};

    fn complex(gens: &[(&str, i64)], arrows: &[(&str, u32, &str)]) -> GradedComplexFU {
        let mut c = GradedComplexFU::new();
        for &(n, g) in gens {
            c.add_gen(n, Some(g)).unwrap();
        }
        for &(s, u, t) in arrows {
            c.add_arrow(s, u, t).unwrap();
        }
        c
    }

    #[test]
    fn self_loop_is_not_a_pivot() {
        // d(a) = a + b, d(b) = a + b is acyclic.
        let c = complex(&[("a", 0), ("b", 0)], &[("a", 0, "a"), ("a", 0, "b"), ("b", 0, "a"), ("b", 0, "b")]);
        assert_eq!(graded_homology(&c).unwrap(), Homology::default());
        assert!(reduce(&c.arrows).is_empty());
    }

    #[test]
    fn acyclic_pair_cancels() {
        let c = complex(&[("x", 0), ("y", 0)], &[("x", 0, "y")]);
        assert!(reduce(&c.arrows).is_empty());
    }

    #[test]
    fn zig_zag_term_is_added() {
        // a -> b, c -> b, a -> U d: cancelling a -> b leaves c -> U d.
        let c = complex(&[("a", 0), ("b", 0), ("c", 0), ("d", 1)], &[("a", 0, "b"), ("c", 0, "b"), ("a", 1, "d")]);
        let r = reduce(&c.arrows);
        assert_eq!(r.names().collect::<Vec<_>>(), ["c", "d"]);
        assert_eq!(r.delta(0), &Vector::from([(1, UPow(1))]));
    }

    #[test]
    fn torsion_from_u_arrow() {
        let c = complex(&[("x", 0), ("y", -1)], &[("y", 1, "x")]);
        let h = graded_homology(&c).unwrap();
        assert_eq!(h.free_rank(), 0);
        assert_eq!(h.torsion, vec![(0, 1)]);
    }

    #[test]
    fn inhomogeneous_arrow_is_rejected() {
        let c = complex(&[("x", 0), ("y", 1)], &[("y", 1, "x")]);
        assert!(matches!(graded_homology(&c), Err(ReductionError::Inhomogeneous(..))));
    }

    #[test]
    fn single_free_generator() {
        let c = complex(&[("x", 0)], &[]);
        assert_eq!(graded_homology(&c).unwrap(), Homology { free: vec![0], torsion: vec![] });
    }

    #[test]
    fn components_and_isomorphism() {
        let mut d = TypeDStructure::new(Side::Sigma, true);
        for (n, i) in [("a", Idem::I0), ("b", Idem::I1), ("c", Idem::I0), ("e", Idem::I1)] {
            d.add_gen(n, i).unwrap();
        }
        d.add_arrow("a", 1, Kind::R1, "b").unwrap();
        d.add_arrow("c", 0, Kind::R3, "e").unwrap();
        let comps = split_components(&d.arrows);
        assert_eq!(comps.len(), 2);
        assert!(split_components(&Arrows::<Idem, DCoef>::new()).is_empty());
        let f = isomorphic(&d.arrows, &d.arrows).unwrap();
        assert_eq!(f, vec![0, 1, 2, 3]);
        let mut e = d.clone();
        e.add_arrow("a", 1, Kind::R1, "b").unwrap();
        e.add_arrow("a", 0, Kind::R1, "b").unwrap();
        assert!(isomorphic(&d.arrows, &e.arrows).is_none());
    }
}
