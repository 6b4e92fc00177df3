//! Type D structures, DD bimodules, A∞ modules and chain complexes over F₂[U].
//!
//! Everything with a differential is stored as an [`Arrows`] table: an
//! insertion-ordered generator list plus, per generator, a mod-2 set of
//! `(target, coefficient)` terms.

mod ainfty;
mod text;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::torus_algebra::{AlgebraError, Idem, Kind, Side};

pub use ainfty::{render_word, AInftyModule, OperationPattern};

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("substitution is not invertible: {0}")]
    NonInvertible(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
}

/// A coefficient monoid: products may vanish, and some elements are units.
pub trait Coefficient: Copy + Ord + Hash + Debug + Send + Sync + 'static {
    fn mul(self, rhs: Self) -> Option<Self>;
    fn is_unit(self) -> bool;
}

/// `U^u · alg` for a one-sided type D structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DCoef {
    pub u: u32,
    pub alg: Kind,
}

impl DCoef {
    pub fn new(u: u32, alg: Kind) -> Self {
        DCoef { u, alg }
    }
}

impl Coefficient for DCoef {
    fn mul(self, rhs: Self) -> Option<Self> {
        let alg = self.alg.mul(rhs.alg);
        (!alg.is_zero()).then_some(DCoef::new(self.u + rhs.u, alg))
    }
    fn is_unit(self) -> bool {
        self.u == 0 && self.alg.is_idempotent()
    }
}

/// `ρ-part ⊗ σ-part` for a DD bimodule (hat version, no U).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DDCoef {
    pub rho: Kind,
    pub sigma: Kind,
}

impl DDCoef {
    pub fn new(rho: Kind, sigma: Kind) -> Self {
        DDCoef { rho, sigma }
    }
}

impl Coefficient for DDCoef {
    fn mul(self, rhs: Self) -> Option<Self> {
        let rho = self.rho.mul(rhs.rho);
        let sigma = self.sigma.mul(rhs.sigma);
        (!rho.is_zero() && !sigma.is_zero()).then_some(DDCoef::new(rho, sigma))
    }
    fn is_unit(self) -> bool {
        self.rho.is_idempotent() && self.sigma.is_idempotent()
    }
}

/// A power of U, the coefficient of a chain complex over F₂[U].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UPow(pub u32);

impl Coefficient for UPow {
    fn mul(self, rhs: Self) -> Option<Self> {
        Some(UPow(self.0 + rhs.0))
    }
    fn is_unit(self) -> bool {
        self.0 == 0
    }
}

/// A mod-2 linear combination of `(generator index, coefficient)` terms.
pub type Vector<C> = BTreeSet<(usize, C)>;

pub fn toggle<C: Coefficient>(v: &mut Vector<C>, term: (usize, C)) {
    if !v.remove(&term) {
        v.insert(term);
    }
}

/// Generators with labels, plus a mod-2 differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrows<L, C: Coefficient> {
    gens: Vec<(String, L)>,
    index: HashMap<String, usize>,
    delta: Vec<Vector<C>>,
}

impl<L, C: Coefficient> Default for Arrows<L, C> {
    fn default() -> Self {
        Arrows { gens: Vec::new(), index: HashMap::new(), delta: Vec::new() }
    }
}

impl<L: Clone, C: Coefficient> Arrows<L, C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn add_gen(&mut self, name: &str, label: L) -> Result<usize, StructureError> {
        if self.index.contains_key(name) {
            return Err(StructureError::DuplicateGenerator(name.to_string()));
        }
        let i = self.gens.len();
        self.gens.push((name.to_string(), label));
        self.index.insert(name.to_string(), i);
        self.delta.push(Vector::new());
        Ok(i)
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

    pub fn label(&self, i: usize) -> &L {
        &self.gens[i].1
    }

    pub fn set_label(&mut self, i: usize, label: L) {
        self.gens[i].1 = label;
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gens.iter().map(|g| g.0.as_str())
    }

    pub fn generators(&self) -> &[(String, L)] {
        &self.gens
    }

    /// Adds a term mod 2 (adding it twice removes it).
    pub fn toggle(&mut self, src: usize, tgt: usize, c: C) {
        toggle(&mut self.delta[src], (tgt, c));
    }

    pub fn delta(&self, i: usize) -> &Vector<C> {
        &self.delta[i]
    }

    pub fn set_delta(&mut self, i: usize, v: Vector<C>) {
        self.delta[i] = v;
    }

    pub fn arrow_count(&self) -> usize {
        self.delta.iter().map(|d| d.len()).sum()
    }

    /// All arrows as `(src, tgt, coef)`, in generator then term order.
    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize, C)> + '_ {
        self.delta.iter().enumerate().flat_map(|(s, d)| d.iter().map(move |&(t, c)| (s, t, c)))
    }

    /// Keeps the generators with `keep[i]`, in order, dropping arrows to the rest.
    pub fn restrict(&self, keep: &[bool]) -> Self {
        let mut map = vec![usize::MAX; self.len()];
        let mut out = Self::new();
        for (i, (name, label)) in self.gens.iter().enumerate() {
            if keep[i] {
                map[i] = out.add_gen(name, label.clone()).expect("names are unique");
            }
        }
        for (s, t, c) in self.arrows() {
            if keep[s] && keep[t] {
                out.toggle(map[s], map[t], c);
            }
        }
        out
    }

    /// Renames generators; `f` must stay injective.
    pub fn rename(&self, mut f: impl FnMut(&str) -> String) -> Result<Self, StructureError> {
        let mut out = Self::new();
        for (name, label) in &self.gens {
            out.add_gen(&f(name), label.clone())?;
        }
        out.delta = self.delta.clone();
        Ok(out)
    }

    /// Sum over two-step paths `x -> y -> z` of the coefficient products, mod 2.
    pub fn delta_squared(&self, i: usize) -> Vector<C> {
        let mut out = Vector::new();
        for &(j, c1) in &self.delta[i] {
            for &(k, c2) in &self.delta[j] {
                if let Some(c) = c1.mul(c2) {
                    toggle(&mut out, (k, c));
                }
            }
        }
        out
    }

    /// Right-multiplies every term of `v` by the row of `m` for its generator.
    pub fn substitute(v: &Vector<C>, rows: &[Vector<C>]) -> Vector<C> {
        let mut out = Vector::new();
        for &(g, a) in v {
            for &(h, b) in &rows[g] {
                if let Some(c) = a.mul(b) {
                    toggle(&mut out, (h, c));
                }
            }
        }
        out
    }
}

/// Validator output; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn push(&mut self, msg: impl Into<String>) {
        self.issues.push(msg.into());
    }
}

/// A one-sided type D structure over the torus algebra, optionally U-enabled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDStructure {
    pub side: Side,
    pub u_enabled: bool,
    pub arrows: Arrows<Idem, DCoef>,
}

impl TypeDStructure {
    pub fn new(side: Side, u_enabled: bool) -> Self {
        TypeDStructure { side, u_enabled, arrows: Arrows::new() }
    }

    pub fn add_gen(&mut self, name: &str, idem: Idem) -> Result<usize, StructureError> {
        self.arrows.add_gen(name, idem)
    }

    pub fn add_arrow(&mut self, src: &str, u: u32, alg: Kind, tgt: &str) -> Result<(), StructureError> {
        let (s, t) = (self.arrows.idx(src)?, self.arrows.idx(tgt)?);
        if !alg.is_zero() {
            self.arrows.toggle(s, t, DCoef::new(u, alg));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn idem(&self, i: usize) -> Idem {
        *self.arrows.label(i)
    }

    /// Generators with the given idempotent, in order.
    pub fn gens_with(&self, idem: Idem) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.idem(i) == idem).collect()
    }

    pub fn with_arrows(&self, arrows: Arrows<Idem, DCoef>) -> Self {
        TypeDStructure { side: self.side, u_enabled: self.u_enabled, arrows }
    }
}

/// A DD bimodule over the ρ-side and σ-side torus algebras.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DDBimodule {
    pub arrows: Arrows<(Idem, Idem), DDCoef>,
}

impl DDBimodule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_gen(&mut self, name: &str, rho: Idem, sigma: Idem) -> Result<usize, StructureError> {
        self.arrows.add_gen(name, (rho, sigma))
    }

    pub fn add_arrow(&mut self, src: &str, rho: Kind, sigma: Kind, tgt: &str) -> Result<(), StructureError> {
        let (s, t) = (self.arrows.idx(src)?, self.arrows.idx(tgt)?);
        self.arrows.toggle(s, t, DDCoef::new(rho, sigma));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// A chain complex over F₂[U] whose generators may carry Alexander gradings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedComplexFU {
    pub arrows: Arrows<Option<i64>, UPow>,
}

impl GradedComplexFU {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn grading(&self, i: usize) -> Option<i64> {
        *self.arrows.label(i)
    }

    /// Reports ∂² terms and arrows breaking `A(x) = A(y) − k` between graded ends.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let a = &self.arrows;
        for i in 0..a.len() {
            for (j, u) in a.delta_squared(i) {
                rep.push(format!("d^2({}) contains U^{} {}", a.name(i), u.0, a.name(j)));
            }
            for &(j, u) in a.delta(i) {
                if let (Some(gx), Some(gy)) = (self.grading(i), self.grading(j)) {
                    if gx != gy - i64::from(u.0) {
                        rep.push(format!("grading: {} (A={gx}) -> U^{} {} (A={gy})", a.name(i), u.0, a.name(j)));
                    }
                }
            }
        }
        rep
    }
}

/// Checks idempotent matching, the hat restriction, and δ² = 0.
pub fn validate_type_d(m: &TypeDStructure) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let a = &m.arrows;
    for (s, t, c) in a.arrows() {
        if c.alg.source() != Some(m.idem(s)) || c.alg.target() != Some(m.idem(t)) {
            rep.push(format!("idempotent mismatch: {} -> {} {}", a.name(s), c.alg.render(m.side), a.name(t)));
        }
        if !m.u_enabled && c.u > 0 {
            rep.push(format!("U power in hat structure: {} -> {}", a.name(s), a.name(t)));
        }
    }
    for i in 0..a.len() {
        for (j, c) in a.delta_squared(i) {
            rep.push(format!("delta^2({}) contains U^{} {} {}", a.name(i), c.u, c.alg.render(m.side), a.name(j)));
        }
    }
    rep
}

/// Checks both idempotent matchings and two-sided d² = 0.
pub fn validate_dd(b: &DDBimodule) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let a = &b.arrows;
    for (s, t, c) in a.arrows() {
        let (rs, ss) = *a.label(s);
        let (rt, st) = *a.label(t);
        if c.rho.source() != Some(rs) || c.rho.target() != Some(rt) {
            rep.push(format!("rho idempotent mismatch: {} -> {}", a.name(s), a.name(t)));
        }
        if c.sigma.source() != Some(ss) || c.sigma.target() != Some(st) {
            rep.push(format!("sigma idempotent mismatch: {} -> {}", a.name(s), a.name(t)));
        }
    }
    for i in 0..a.len() {
        for (j, c) in a.delta_squared(i) {
            rep.push(format!(
                "d^2({}) contains {}.{} {}",
                a.name(i),
                c.rho.render(Side::Rho),
                c.sigma.render(Side::Sigma),
                a.name(j)
            ));
        }
    }
    rep
}

/// One basis change `new = old + Σ U^u · alg · other` (others in the old basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub old: String,
    pub new_name: String,
    pub terms: Vec<(u32, Kind, String)>,
}

impl Substitution {
    pub fn new(old: &str, new_name: &str, terms: &[(u32, Kind, &str)]) -> Self {
        Substitution {
            old: old.to_string(),
            new_name: new_name.to_string(),
            terms: terms.iter().map(|&(u, k, g)| (u, k, g.to_string())).collect(),
        }
    }
}

/// Rewrites `m` in the basis given by `subs` (unlisted generators are unchanged).
///
/// With `F = I + H` the substitution matrix, the new differential is
/// `δ'(g') = Σ_h F[g,h]·δ(h)` rewritten through `F⁻¹ = Σ_j H^j`; `H` must be
/// nilpotent.
pub fn change_basis(m: &TypeDStructure, subs: &[Substitution]) -> Result<TypeDStructure, StructureError> {
    let n = m.len();
    let a = &m.arrows;
    let mut h: Vec<Vector<DCoef>> = vec![Vector::new(); n];
    let mut names: Vec<String> = a.names().map(str::to_string).collect();
    for s in subs {
        let g = a.idx(&s.old)?;
        names[g] = s.new_name.clone();
        for (u, k, other) in &s.terms {
            let t = a.idx(other)?;
            if t == g {
                return Err(StructureError::NonInvertible(format!("{} refers to itself", s.old)));
            }
            if k.source() != Some(m.idem(g)) || k.target() != Some(m.idem(t)) {
                return Err(StructureError::NonInvertible(format!(
                    "coefficient {} does not match idempotents of {} and {}",
                    k.render(m.side),
                    s.old,
                    other
                )));
            }
            toggle(&mut h[g], (t, DCoef::new(*u, *k)));
        }
    }
    let identity: Vec<Vector<DCoef>> =
        (0..n).map(|i| Vector::from([(i, DCoef::new(0, m.idem(i).element()))])).collect();
    // F⁻¹ = I + H + H² + ...; H^n must vanish.
    let mut inv = identity.clone();
    let mut power = h.clone();
    for step in 0..=n {
        if power.iter().all(|r| r.is_empty()) {
            break;
        }
        if step == n {
            return Err(StructureError::NonInvertible("substitution matrix is not unipotent".into()));
        }
        for (i, row) in power.iter().enumerate() {
            for &t in row {
                toggle(&mut inv[i], t);
            }
        }
        power = power.iter().map(|r| Arrows::<Idem, DCoef>::substitute(r, &h)).collect();
    }
    let mut forward = identity;
    for (i, row) in h.iter().enumerate() {
        for &t in row {
            toggle(&mut forward[i], t);
        }
    }
    let mut out = Arrows::new();
    for (i, name) in names.iter().enumerate() {
        out.add_gen(name, m.idem(i))?;
    }
    for (i, row) in forward.iter().enumerate() {
        let mut image = Vector::new();
        for &(g, c) in row {
            for &(t, d) in a.delta(g) {
                if let Some(p) = c.mul(d) {
                    toggle(&mut image, (t, p));
                }
            }
        }
        out.set_delta(i, Arrows::<Idem, DCoef>::substitute(&image, &inv));
    }
    Ok(m.with_arrows(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unknot() -> TypeDStructure {
        let mut d = TypeDStructure::new(Side::Rho, false);
        d.add_gen("xi0", Idem::I0).unwrap();
        d.add_arrow("xi0", 0, Kind::R12, "xi0").unwrap();
        d
    }

    #[test]
    fn unknot_cfd_is_valid() {
        assert!(validate_type_d(&unknot()).is_valid());
    }

    #[test]
    fn empty_dd_is_valid() {
        assert!(validate_dd(&DDBimodule::new()).is_valid());
    }

    #[test]
    fn idempotent_mismatch_is_reported() {
        let mut d = TypeDStructure::new(Side::Rho, false);
        d.add_gen("a", Idem::I0).unwrap();
        d.add_gen("b", Idem::I0).unwrap();
        d.add_arrow("a", 0, Kind::R1, "b").unwrap();
        let rep = validate_type_d(&d);
        assert_eq!(rep.issues.len(), 1);
        assert!(rep.issues[0].contains("idempotent"));
    }

    #[test]
    fn hat_structure_rejects_u() {
        let mut d = TypeDStructure::new(Side::Rho, false);
        d.add_gen("a", Idem::I0).unwrap();
        d.add_gen("b", Idem::I1).unwrap();
        d.add_arrow("a", 1, Kind::R1, "b").unwrap();
        assert!(!validate_type_d(&d).is_valid());
    }

    #[test]
    fn toggling_twice_cancels() {
        let mut d = unknot();
        d.add_arrow("xi0", 0, Kind::R12, "xi0").unwrap();
        assert_eq!(d.arrows.arrow_count(), 0);
    }

    #[test]
    fn identity_substitution_is_noop() {
        let d = unknot();
        assert_eq!(change_basis(&d, &[]).unwrap(), d);
        let same = change_basis(&d, &[Substitution::new("xi0", "xi0", &[])]).unwrap();
        assert_eq!(same, d);
    }

    #[test]
    fn cyclic_substitution_is_rejected() {
        let mut d = TypeDStructure::new(Side::Sigma, true);
        d.add_gen("a", Idem::I0).unwrap();
        d.add_gen("b", Idem::I0).unwrap();
        let subs = [
            Substitution::new("a", "a", &[(0, Kind::Iota0, "b")]),
            Substitution::new("b", "b", &[(0, Kind::Iota0, "a")]),
        ];
        assert!(matches!(change_basis(&d, &subs), Err(StructureError::NonInvertible(_))));
    }

    #[test]
    fn substitution_round_trip() {
        // a -> s1 c, b -> s3 c; a' = a + b changes δa' to s1 c + s3 c.
        let mut d = TypeDStructure::new(Side::Sigma, true);
        d.add_gen("a", Idem::I0).unwrap();
        d.add_gen("b", Idem::I0).unwrap();
        d.add_gen("c", Idem::I1).unwrap();
        d.add_arrow("a", 0, Kind::R1, "c").unwrap();
        d.add_arrow("b", 1, Kind::R3, "c").unwrap();
        let fwd = change_basis(&d, &[Substitution::new("a", "a", &[(0, Kind::Iota0, "b")])]).unwrap();
        assert_eq!(fwd.arrows.delta(0).len(), 2);
        let back = change_basis(&fwd, &[Substitution::new("a", "a", &[(0, Kind::Iota0, "b")])]).unwrap();
        assert_eq!(back, d);
    }
}
