//! A∞ modules over the ρ-side torus algebra with U-coefficients.

use std::collections::{BTreeSet, HashMap};

use super::{toggle, StructureError, ValidationReport, Vector};
use crate::structures::UPow;
use crate::torus_algebra::{Idem, Kind, Side};

/// `m(source, prefix, (ρ₂₃)^i, suffix) = U^(u + u_step·i) target`, for all
/// `i ≥ 0` when `starred`, otherwise only the literal word `prefix`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationPattern {
    pub source: usize,
    pub prefix: Vec<Kind>,
    pub starred: bool,
    pub suffix: Vec<Kind>,
    pub u: u32,
    pub u_step: u32,
    pub target: usize,
}

/// The only letter a starred block may repeat.
pub const STAR_LETTER: Kind = Kind::R23;

impl OperationPattern {
    pub fn literal(source: usize, word: &[Kind], u: u32, target: usize) -> Self {
        OperationPattern { source, prefix: word.to_vec(), starred: false, suffix: Vec::new(), u, u_step: 0, target }
    }

    pub fn family(source: usize, prefix: &[Kind], suffix: &[Kind], u: u32, u_step: u32, target: usize) -> Self {
        OperationPattern { source, prefix: prefix.to_vec(), starred: true, suffix: suffix.to_vec(), u, u_step, target }
    }

    /// The word with `stars` repetitions of the starred block.
    pub fn expand(&self, stars: usize) -> Vec<Kind> {
        let mut w = self.prefix.clone();
        if self.starred {
            w.extend(std::iter::repeat_n(STAR_LETTER, stars));
            w.extend_from_slice(&self.suffix);
        }
        w
    }

    fn max_stars(&self, len: usize) -> usize {
        if self.starred {
            len + 1
        } else {
            0
        }
    }

    /// U-power of every way `word` matches this pattern exactly.
    pub fn matches(&self, word: &[Kind]) -> Vec<u32> {
        let fixed = self.prefix.len() + self.suffix.len();
        if !self.starred {
            return if self.prefix == word { vec![self.u] } else { Vec::new() };
        }
        if word.len() < fixed {
            return Vec::new();
        }
        let i = word.len() - fixed;
        if self.expand(i) == word {
            vec![self.u + self.u_step * i as u32]
        } else {
            Vec::new()
        }
    }

    /// Whether some word of this pattern has `word` as a prefix.
    pub fn extends(&self, word: &[Kind]) -> bool {
        (0..=self.max_stars(word.len())).any(|i| {
            let w = self.expand(i);
            w.len() >= word.len() && w[..word.len()] == *word
        })
    }

    /// Whether the starred block can be pumped after `word` has been read.
    /// True when `word` ends inside the star region of the pattern.
    pub fn in_star_region(&self, word: &[Kind]) -> bool {
        self.starred
            && word.len() >= self.prefix.len()
            && word[..self.prefix.len()] == *self.prefix
            && word[self.prefix.len()..].iter().all(|&k| k == STAR_LETTER)
    }
}

/// A strictly unital A∞ module over the ρ-side torus algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AInftyModule {
    gens: Vec<(String, Idem)>,
    index: HashMap<String, usize>,
    ops: Vec<OperationPattern>,
    by_source: Vec<Vec<usize>>,
}

impl AInftyModule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_gen(&mut self, name: &str, idem: Idem) -> Result<usize, StructureError> {
        if self.index.contains_key(name) {
            return Err(StructureError::DuplicateGenerator(name.to_string()));
        }
        self.gens.push((name.to_string(), idem));
        self.index.insert(name.to_string(), self.gens.len() - 1);
        self.by_source.push(Vec::new());
        Ok(self.gens.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn idx(&self, name: &str) -> Result<usize, StructureError> {
        self.find(name).ok_or_else(|| StructureError::UnknownGenerator(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.gens[i].0
    }

    pub fn idem(&self, i: usize) -> Idem {
        self.gens[i].1
    }

    pub fn generators(&self) -> &[(String, Idem)] {
        &self.gens
    }

    pub fn ops(&self) -> &[OperationPattern] {
        &self.ops
    }

    pub fn ops_from(&self, source: usize) -> impl Iterator<Item = &OperationPattern> {
        self.by_source[source].iter().map(|&i| &self.ops[i])
    }

    pub fn push_op(&mut self, op: OperationPattern) {
        self.by_source[op.source].push(self.ops.len());
        self.ops.push(op);
    }

    /// Adds the literal operation `m(src, word) = U^u tgt`.
    pub fn add_op(&mut self, src: &str, word: &[Kind], u: u32, tgt: &str) -> Result<(), StructureError> {
        let op = OperationPattern::literal(self.idx(src)?, word, u, self.idx(tgt)?);
        self.push_op(op);
        Ok(())
    }

    /// Adds `m(src, prefix, (ρ₂₃)^i, suffix) = U^(u + u_step·i) tgt` for all `i`.
    pub fn add_family(
        &mut self,
        src: &str,
        prefix: &[Kind],
        suffix: &[Kind],
        u: u32,
        u_step: u32,
        tgt: &str,
    ) -> Result<(), StructureError> {
        let op = OperationPattern::family(self.idx(src)?, prefix, suffix, u, u_step, self.idx(tgt)?);
        self.push_op(op);
        Ok(())
    }

    /// `m(source, word)` as a mod-2 sum of `(target, U-power)`.
    pub fn apply(&self, source: usize, word: &[Kind]) -> Vector<UPow> {
        let mut out = Vector::new();
        for op in self.ops_from(source) {
            for u in op.matches(word) {
                toggle(&mut out, (op.target, UPow(u)));
            }
        }
        out
    }

    /// Whether any operation from `source` reads a word starting with `word`.
    pub fn has_extension(&self, source: usize, word: &[Kind]) -> bool {
        self.ops_from(source).any(|op| op.extends(word))
    }

    /// Every op with the star block expanded up to `max_stars` times.
    pub fn expanded(&self, max_stars: usize, max_len: usize) -> Vec<(usize, Vec<Kind>, u32, usize)> {
        let mut out = Vec::new();
        for op in &self.ops {
            let top = if op.starred { max_stars } else { 0 };
            for i in 0..=top {
                let w = op.expand(i);
                if w.len() <= max_len {
                    out.push((op.source, w, op.u + op.u_step * i as u32, op.target));
                }
            }
        }
        out
    }

    /// Canonical mod-2 form of the expanded table, used for comparisons.
    pub fn expanded_table(&self, max_stars: usize, max_len: usize) -> BTreeSet<(String, Vec<Kind>, u32, String)> {
        let mut acc: HashMap<(usize, Vec<Kind>, u32, usize), bool> = HashMap::new();
        for (s, w, u, t) in self.expanded(max_stars, max_len) {
            *acc.entry((s, w, u, t)).or_default() ^= true;
        }
        acc.into_iter()
            .filter(|(_, on)| *on)
            .map(|((s, w, u, t), _)| (self.name(s).to_string(), w, u, self.name(t).to_string()))
            .collect()
    }

    /// Checks idempotent chaining of every op, strict unitality (no idempotent
    /// letters) and the A∞ relations on every word of length ≤ `max_len`
    /// that could carry a nonzero relation, expanding stars up to four times
    /// to generate candidates.
    pub fn validate(&self, max_len: usize) -> ValidationReport {
        const MAX_STARS: usize = 4;
        let mut rep = ValidationReport::default();
        for op in &self.ops {
            let letters = op.prefix.iter().chain(op.suffix.iter());
            if letters.clone().any(|k| !k.is_reeb()) {
                rep.push(format!("unitality: op from {} has a non-Reeb letter", self.name(op.source)));
                continue;
            }
            for i in 0..=(if op.starred { 2 } else { 0 }) {
                if !chains(self.idem(op.source), &op.expand(i), self.idem(op.target)) {
                    rep.push(format!(
                        "idempotents do not chain: m({}, {}) -> {}",
                        self.name(op.source),
                        render_word(&op.expand(i)),
                        self.name(op.target)
                    ));
                }
            }
        }
        if !rep.is_valid() {
            return rep;
        }

        let table = self.expanded(MAX_STARS, max_len);
        let mut words_from: Vec<BTreeSet<Vec<Kind>>> = vec![BTreeSet::new(); self.len()];
        for (s, w, _, _) in &table {
            words_from[*s].insert(w.clone());
        }
        let mut candidates: BTreeSet<(usize, Vec<Kind>)> = BTreeSet::new();
        for (s, w, _, t) in &table {
            for v in &words_from[*t] {
                if w.len() + v.len() <= max_len {
                    let mut c = w.clone();
                    c.extend_from_slice(v);
                    candidates.insert((*s, c));
                }
            }
            if w.len() < max_len {
                for (j, &k) in w.iter().enumerate() {
                    for (p, q) in splittings(k) {
                        let mut c = w[..j].to_vec();
                        c.push(p);
                        c.push(q);
                        c.extend_from_slice(&w[j + 1..]);
                        candidates.insert((*s, c));
                    }
                }
            }
        }
        for (x, w) in candidates {
            let rel = self.relation(x, &w);
            if !rel.is_empty() {
                let terms: Vec<String> = rel.iter().map(|&(t, u)| format!("U^{} {}", u.0, self.name(t))).collect();
                rep.push(format!(
                    "A-infinity relation fails on m({}, {}): {}",
                    self.name(x),
                    render_word(&w),
                    terms.join(" + ")
                ));
            }
        }
        rep
    }

    /// The A∞ relation evaluated on `(x, w)`.
    pub fn relation(&self, x: usize, w: &[Kind]) -> Vector<UPow> {
        let mut out = Vector::new();
        for i in 0..=w.len() {
            for (y, u) in self.apply(x, &w[..i]) {
                for (z, v) in self.apply(y, &w[i..]) {
                    toggle(&mut out, (z, UPow(u.0 + v.0)));
                }
            }
        }
        for j in 0..w.len().saturating_sub(1) {
            let p = w[j].mul(w[j + 1]);
            if !p.is_zero() {
                let mut merged = w[..j].to_vec();
                merged.push(p);
                merged.extend_from_slice(&w[j + 2..]);
                for t in self.apply(x, &merged) {
                    toggle(&mut out, t);
                }
            }
        }
        out
    }
}

/// Ordered pairs of Reeb elements whose product is `k`.
pub fn splittings(k: Kind) -> Vec<(Kind, Kind)> {
    let mut out = Vec::new();
    for a in Kind::REEB {
        for b in Kind::REEB {
            if a.mul(b) == k && !k.is_zero() {
                out.push((a, b));
            }
        }
    }
    out
}

/// Whether the letters of `word` chain from idempotent `from` to `to`.
pub fn chains(from: Idem, word: &[Kind], to: Idem) -> bool {
    let mut cur = from;
    for k in word {
        if k.source() != Some(cur) {
            return false;
        }
        cur = k.target().expect("non-zero letter");
    }
    cur == to
}

pub fn render_word(word: &[Kind]) -> String {
    let parts: Vec<String> = word.iter().map(|k| k.render(Side::Rho)).collect();
    format!("[{}]", parts.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Kind::*;

    fn core() -> AInftyModule {
        let mut m = AInftyModule::new();
        m.add_gen("a", Idem::I0).unwrap();
        m.add_family("a", &[R3], &[R2], 1, 1, "a").unwrap();
        m
    }

    #[test]
    fn star_matching() {
        let m = core();
        assert_eq!(m.apply(0, &[R3, R2]), Vector::from([(0, UPow(1))]));
        assert_eq!(m.apply(0, &[R3, R23, R23, R2]), Vector::from([(0, UPow(3))]));
        assert!(m.apply(0, &[R3, R23]).is_empty());
        assert!(m.has_extension(0, &[R3, R23, R23]));
        assert!(!m.has_extension(0, &[R2]));
    }

    #[test]
    fn core_module_is_valid() {
        assert!(m_valid(&core()));
    }

    fn m_valid(m: &AInftyModule) -> bool {
        let rep = m.validate(12);
        rep.is_valid()
    }

    #[test]
    fn unit_letter_is_rejected() {
        let mut m = core();
        m.add_op("a", &[Iota0], 0, "a").unwrap();
        let rep = m.validate(12);
        assert!(rep.issues.iter().any(|s| s.contains("unitality")));
    }

    #[test]
    fn missing_family_member_breaks_relation() {
        let mut m = AInftyModule::new();
        m.add_gen("a", Idem::I0).unwrap();
        m.add_op("a", &[R3, R2], 1, "a").unwrap();
        m.add_op("a", &[R3, R23, R2], 2, "a").unwrap();
        // m(a, r3, r23, r2, r3, r2) from the U·a output needs its partner.
        assert!(!m.validate(12).is_valid());
    }

    #[test]
    fn splittings_of_r123() {
        assert_eq!(splittings(R123), vec![(R1, R23), (R12, R3)]);
        assert!(splittings(R1).is_empty());
    }
}
