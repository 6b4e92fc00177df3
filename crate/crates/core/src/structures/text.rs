//! Text dumps and JSON for every structure type.
//!
//! Dumps list generators first (`gen NAME IDEM...`), then one arrow per line
//! (`src -> [U^n] alg tgt`). Lines starting with `#` are ignored on input.

use serde::{Deserialize, Serialize};

use super::ainfty::{render_word, STAR_LETTER};
use super::{AInftyModule, DDBimodule, GradedComplexFU, OperationPattern, StructureError, TypeDStructure, UPow};
use crate::torus_algebra::{Idem, Kind, Side};

fn perr(line: usize, msg: impl Into<String>) -> StructureError {
    StructureError::Parse { line, msg: msg.into() }
}

fn u_prefix(u: u32) -> String {
    match u {
        0 => String::new(),
        1 => "U ".to_string(),
        n => format!("U^{n} "),
    }
}

/// Parses `U` / `U^n` into a power; `None` when the token is not a U-power.
fn parse_u(tok: &str) -> Option<u32> {
    if tok == "U" {
        Some(1)
    } else {
        tok.strip_prefix("U^").and_then(|n| n.parse().ok())
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#'))
}

fn parse_kind(line: usize, tok: &str, side: Side) -> Result<Kind, StructureError> {
    let (s, k) = Kind::parse(tok).map_err(|e| perr(line, e.to_string()))?;
    if let Some(s) = s {
        if s != side {
            return Err(perr(line, format!("`{tok}` is on the wrong side")));
        }
    }
    Ok(k)
}

fn parse_idem(line: usize, tok: &str) -> Result<Idem, StructureError> {
    tok.parse().map_err(|_| perr(line, format!("bad idempotent `{tok}`")))
}

impl TypeDStructure {
    pub fn dump(&self) -> String {
        let a = &self.arrows;
        let mut out = format!("typed side={} u={}\n", self.side, if self.u_enabled { "on" } else { "off" });
        for (name, idem) in a.generators() {
            out.push_str(&format!("gen {name} {idem}\n"));
        }
        for (s, t, c) in a.arrows() {
            out.push_str(&format!("{} -> {}{} {}\n", a.name(s), u_prefix(c.u), c.alg.render(self.side), a.name(t)));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, StructureError> {
        let mut it = lines(text);
        let (ln, head) = it.next().ok_or_else(|| perr(0, "empty input"))?;
        if head.len() != 3 || head[0] != "typed" {
            return Err(perr(ln, "expected `typed side=... u=...`"));
        }
        let side: Side =
            head[1].strip_prefix("side=").and_then(|s| s.parse().ok()).ok_or_else(|| perr(ln, "bad side"))?;
        let u_enabled = match head[2] {
            "u=on" => true,
            "u=off" => false,
            _ => return Err(perr(ln, "bad u flag")),
        };
        let mut m = TypeDStructure::new(side, u_enabled);
        for (ln, t) in it {
            match t.as_slice() {
                ["gen", name, idem] => {
                    m.add_gen(name, parse_idem(ln, idem)?)?;
                }
                [src, "->", rest @ ..] => {
                    let (u, rest) = match rest.first().and_then(|t| parse_u(t)) {
                        Some(u) => (u, &rest[1..]),
                        None => (0, rest),
                    };
                    let [alg, tgt] = rest else {
                        return Err(perr(ln, "expected `src -> [U^n] alg tgt`"));
                    };
                    let k = parse_kind(ln, alg, side)?;
                    m.add_arrow(src, u, k, tgt)?;
                }
                _ => return Err(perr(ln, "unrecognized line")),
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let a = &self.arrows;
        let wire = TypeDJson {
            side: self.side,
            u_enabled: self.u_enabled,
            generators: a.generators().iter().map(|(n, i)| GenJson { name: n.clone(), idem: i.to_string() }).collect(),
            arrows: a
                .arrows()
                .map(|(s, t, c)| DArrowJson {
                    source: a.name(s).to_string(),
                    target: a.name(t).to_string(),
                    u: c.u,
                    coefficient: c.alg.render(self.side),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let wire: TypeDJson = serde_json::from_str(text)?;
        let mut m = TypeDStructure::new(wire.side, wire.u_enabled);
        for g in &wire.generators {
            m.add_gen(&g.name, parse_idem(0, &g.idem)?)?;
        }
        for a in &wire.arrows {
            let k = parse_kind(0, &a.coefficient, wire.side)?;
            m.add_arrow(&a.source, a.u, k, &a.target)?;
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct GenJson {
    name: String,
    idem: String,
}

#[derive(Serialize, Deserialize)]
struct TypeDJson {
    side: Side,
    u_enabled: bool,
    generators: Vec<GenJson>,
    arrows: Vec<DArrowJson>,
}

#[derive(Serialize, Deserialize)]
struct DArrowJson {
    source: String,
    target: String,
    u: u32,
    coefficient: String,
}

impl DDBimodule {
    pub fn dump(&self) -> String {
        let a = &self.arrows;
        let mut out = String::from("dd\n");
        for (name, (r, s)) in a.generators() {
            out.push_str(&format!("gen {name} {r} {s}\n"));
        }
        for (s, t, c) in a.arrows() {
            out.push_str(&format!(
                "{} -> {}.{} {}\n",
                a.name(s),
                c.rho.render(Side::Rho),
                c.sigma.render(Side::Sigma),
                a.name(t)
            ));
        }
        out
    }

    /// Parses a DD coefficient. Besides `rho.sigma`, a bare `r..` or `s..`
    /// token is accepted, with the other side the source's idempotent.
    fn parse_coef(&self, ln: usize, tok: &str, src: &str) -> Result<(Kind, Kind), StructureError> {
        if let Some((r, s)) = tok.split_once('.') {
            return Ok((parse_kind(ln, r, Side::Rho)?, parse_kind(ln, s, Side::Sigma)?));
        }
        let (ri, si) = *self.arrows.label(self.arrows.idx(src)?);
        match Kind::parse(tok).map_err(|e| perr(ln, e.to_string()))? {
            (Some(Side::Rho), k) => Ok((k, si.element())),
            (Some(Side::Sigma), k) => Ok((ri.element(), k)),
            _ => Err(perr(ln, format!("ambiguous coefficient `{tok}`"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self, StructureError> {
        let mut it = lines(text);
        match it.next() {
            Some((_, h)) if h == ["dd"] => {}
            Some((ln, _)) => return Err(perr(ln, "expected `dd`")),
            None => return Err(perr(0, "empty input")),
        }
        let mut b = DDBimodule::new();
        for (ln, t) in it {
            match t.as_slice() {
                ["gen", name, r, s] => {
                    b.add_gen(name, parse_idem(ln, r)?, parse_idem(ln, s)?)?;
                }
                [src, "->", coef, tgt] => {
                    let (r, s) = b.parse_coef(ln, coef, src)?;
                    b.add_arrow(src, r, s, tgt)?;
                }
                _ => return Err(perr(ln, "unrecognized line")),
            }
        }
        Ok(b)
    }

    pub fn to_json(&self) -> String {
        let a = &self.arrows;
        let wire = DDJson {
            generators: a
                .generators()
                .iter()
                .map(|(n, (r, s))| DDGenJson { name: n.clone(), rho_idem: r.to_string(), sigma_idem: s.to_string() })
                .collect(),
            arrows: a
                .arrows()
                .map(|(s, t, c)| DDArrowJson {
                    source: a.name(s).to_string(),
                    target: a.name(t).to_string(),
                    rho: c.rho.render(Side::Rho),
                    sigma: c.sigma.render(Side::Sigma),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let wire: DDJson = serde_json::from_str(text)?;
        let mut b = DDBimodule::new();
        for g in &wire.generators {
            b.add_gen(&g.name, parse_idem(0, &g.rho_idem)?, parse_idem(0, &g.sigma_idem)?)?;
        }
        for a in &wire.arrows {
            let r = parse_kind(0, &a.rho, Side::Rho)?;
            let s = parse_kind(0, &a.sigma, Side::Sigma)?;
            b.add_arrow(&a.source, r, s, &a.target)?;
        }
        Ok(b)
    }
}

#[derive(Serialize, Deserialize)]
struct DDGenJson {
    name: String,
    rho_idem: String,
    sigma_idem: String,
}

#[derive(Serialize, Deserialize)]
struct DDJson {
    generators: Vec<DDGenJson>,
    arrows: Vec<DDArrowJson>,
}

#[derive(Serialize, Deserialize)]
struct DDArrowJson {
    source: String,
    target: String,
    rho: String,
    sigma: String,
}

impl GradedComplexFU {
    pub fn add_gen(&mut self, name: &str, grading: Option<i64>) -> Result<usize, StructureError> {
        self.arrows.add_gen(name, grading)
    }

    pub fn add_arrow(&mut self, src: &str, u: u32, tgt: &str) -> Result<(), StructureError> {
        let (s, t) = (self.arrows.idx(src)?, self.arrows.idx(tgt)?);
        self.arrows.toggle(s, t, UPow(u));
        Ok(())
    }

    pub fn dump(&self) -> String {
        let a = &self.arrows;
        let mut out = String::from("complex\n");
        for (name, g) in a.generators() {
            match g {
                Some(g) => out.push_str(&format!("gen {name} A={g}\n")),
                None => out.push_str(&format!("gen {name} A=?\n")),
            }
        }
        for (s, t, u) in a.arrows() {
            let coef = if u.0 == 0 { "1 ".to_string() } else { u_prefix(u.0) };
            out.push_str(&format!("{} -> {}{}\n", a.name(s), coef, a.name(t)));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, StructureError> {
        let mut it = lines(text);
        match it.next() {
            Some((_, h)) if h == ["complex"] => {}
            Some((ln, _)) => return Err(perr(ln, "expected `complex`")),
            None => return Err(perr(0, "empty input")),
        }
        let mut c = GradedComplexFU::new();
        for (ln, t) in it {
            match t.as_slice() {
                ["gen", name, g] => {
                    let g = g.strip_prefix("A=").ok_or_else(|| perr(ln, "expected A=..."))?;
                    let g = if g == "?" { None } else { Some(g.parse().map_err(|_| perr(ln, "bad grading"))?) };
                    c.add_gen(name, g)?;
                }
                [src, "->", coef, tgt] => {
                    let u = if *coef == "1" { 0 } else { parse_u(coef).ok_or_else(|| perr(ln, "bad U power"))? };
                    c.add_arrow(src, u, tgt)?;
                }
                _ => return Err(perr(ln, "unrecognized line")),
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let a = &self.arrows;
        let wire = ComplexJson {
            generators: a.generators().iter().map(|(n, g)| ComplexGenJson { name: n.clone(), grading: *g }).collect(),
            arrows: a
                .arrows()
                .map(|(s, t, u)| ComplexArrowJson {
                    source: a.name(s).to_string(),
                    target: a.name(t).to_string(),
                    u: u.0,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let wire: ComplexJson = serde_json::from_str(text)?;
        let mut c = GradedComplexFU::new();
        for g in &wire.generators {
            c.add_gen(&g.name, g.grading)?;
        }
        for a in &wire.arrows {
            c.add_arrow(&a.source, a.u, &a.target)?;
        }
        Ok(c)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexGenJson {
    name: String,
    grading: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    generators: Vec<ComplexGenJson>,
    arrows: Vec<ComplexArrowJson>,
}

#[derive(Serialize, Deserialize)]
struct ComplexArrowJson {
    source: String,
    target: String,
    u: u32,
}

fn render_pattern_word(op: &OperationPattern) -> String {
    if !op.starred {
        return render_word(&op.prefix);
    }
    let mut parts: Vec<String> = op.prefix.iter().map(|k| k.render(Side::Rho)).collect();
    parts.push(format!("({})*", STAR_LETTER.render(Side::Rho)));
    parts.extend(op.suffix.iter().map(|k| k.render(Side::Rho)));
    format!("[{}]", parts.join(" "))
}

fn render_pattern_u(op: &OperationPattern) -> String {
    if op.starred {
        format!("U^({}+{}i) ", op.u, op.u_step)
    } else {
        u_prefix(op.u)
    }
}

/// Splits `[a b (r23)* c]` tokens into prefix, star flag and suffix.
fn parse_word(ln: usize, toks: &[&str]) -> Result<(Vec<Kind>, bool, Vec<Kind>), StructureError> {
    let star_tok = format!("({})*", STAR_LETTER.render(Side::Rho));
    let (mut pre, mut post, mut starred) = (Vec::new(), Vec::new(), false);
    for t in toks {
        if *t == star_tok {
            if starred {
                return Err(perr(ln, "more than one starred block"));
            }
            starred = true;
        } else {
            let k = parse_kind(ln, t, Side::Rho)?;
            if starred {
                post.push(k);
            } else {
                pre.push(k);
            }
        }
    }
    Ok((pre, starred, post))
}

impl AInftyModule {
    pub fn dump(&self) -> String {
        let mut out = String::from("ainfty\n");
        for (name, idem) in self.generators() {
            out.push_str(&format!("gen {name} {idem}\n"));
        }
        for op in self.ops() {
            out.push_str(&format!(
                "m {} {} = {}{}\n",
                self.name(op.source),
                render_pattern_word(op),
                render_pattern_u(op),
                self.name(op.target)
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, StructureError> {
        let mut it = lines(text);
        match it.next() {
            Some((_, h)) if h == ["ainfty"] => {}
            Some((ln, _)) => return Err(perr(ln, "expected `ainfty`")),
            None => return Err(perr(0, "empty input")),
        }
        let mut m = AInftyModule::new();
        for (ln, t) in it {
            match t.as_slice() {
                ["gen", name, idem] => {
                    m.add_gen(name, parse_idem(ln, idem)?)?;
                }
                ["m", src, rest @ ..] => {
                    let text = rest.join(" ");
                    let (word, rhs) = text
                        .strip_prefix('[')
                        .and_then(|r| r.split_once(']'))
                        .ok_or_else(|| perr(ln, "expected `[word]`"))?;
                    let rhs = rhs.trim().strip_prefix('=').ok_or_else(|| perr(ln, "expected `=`"))?;
                    let toks: Vec<&str> = word.split_whitespace().collect();
                    let (pre, starred, post) = parse_word(ln, &toks)?;
                    let rt: Vec<&str> = rhs.split_whitespace().collect();
                    let (u, step, tgt) = match rt.as_slice() {
                        [tgt] => (0, 0, *tgt),
                        [u, tgt] => match parse_u(u) {
                            Some(u) => (u, 0, *tgt),
                            None => {
                                let (a, b) = parse_affine(u).ok_or_else(|| perr(ln, "bad U power"))?;
                                (a, b, *tgt)
                            }
                        },
                        _ => return Err(perr(ln, "expected `[U^n] target`")),
                    };
                    if starred {
                        m.add_family(src, &pre, &post, u, step, tgt)?;
                    } else {
                        if step != 0 {
                            return Err(perr(ln, "affine U power without a starred block"));
                        }
                        m.add_op(src, &pre, u, tgt)?;
                    }
                }
                _ => return Err(perr(ln, "unrecognized line")),
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let wire = AInftyJson {
            generators: self
                .generators()
                .iter()
                .map(|(n, i)| GenJson { name: n.clone(), idem: i.to_string() })
                .collect(),
            ops: self
                .ops()
                .iter()
                .map(|op| OpJson {
                    source: self.name(op.source).to_string(),
                    prefix: op.prefix.iter().map(|k| k.render(Side::Rho)).collect(),
                    starred: op.starred,
                    suffix: op.suffix.iter().map(|k| k.render(Side::Rho)).collect(),
                    u: op.u,
                    u_step: op.u_step,
                    target: self.name(op.target).to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let wire: AInftyJson = serde_json::from_str(text)?;
        let mut m = AInftyModule::new();
        for g in &wire.generators {
            m.add_gen(&g.name, parse_idem(0, &g.idem)?)?;
        }
        let kinds = |v: &[String]| -> Result<Vec<Kind>, StructureError> {
            v.iter().map(|t| parse_kind(0, t, Side::Rho)).collect()
        };
        for op in &wire.ops {
            let (pre, post) = (kinds(&op.prefix)?, kinds(&op.suffix)?);
            if op.starred {
                m.add_family(&op.source, &pre, &post, op.u, op.u_step, &op.target)?;
            } else {
                m.add_op(&op.source, &pre, op.u, &op.target)?;
            }
        }
        Ok(m)
    }
}

/// Parses `U^(a+bi)`.
fn parse_affine(tok: &str) -> Option<(u32, u32)> {
    let inner = tok.strip_prefix("U^(")?.strip_suffix("i)")?;
    let (a, b) = inner.split_once('+')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

#[derive(Serialize, Deserialize)]
struct AInftyJson {
    generators: Vec<GenJson>,
    ops: Vec<OpJson>,
}

#[derive(Serialize, Deserialize)]
struct OpJson {
    source: String,
    prefix: Vec<String>,
    starred: bool,
    suffix: Vec<String>,
    u: u32,
    u_step: u32,
    target: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use Kind::*;

    fn sample_d() -> TypeDStructure {
        let mut d = TypeDStructure::new(Side::Sigma, true);
        d.add_gen("x0", Idem::I0).unwrap();
        d.add_gen("y1", Idem::I1).unwrap();
        d.add_gen("x1", Idem::I1).unwrap();
        d.add_arrow("x0", 1, R1, "y1").unwrap();
        d.add_arrow("x1", 2, Iota1, "y1").unwrap();
        d.add_arrow("x1", 0, R2, "x0").unwrap();
        d
    }

    #[test]
    fn type_d_dump_format() {
        let text = sample_d().dump();
        assert_eq!(
            text,
            "typed side=sigma u=on\ngen x0 i0\ngen y1 i1\ngen x1 i1\n\
             x0 -> U s1 y1\nx1 -> s2 x0\nx1 -> U^2 i1 y1\n"
        );
        assert_eq!(TypeDStructure::parse(&text).unwrap(), sample_d());
        assert_eq!(TypeDStructure::from_json(&sample_d().to_json()).unwrap(), sample_d());
    }

    #[test]
    fn dd_shorthand_and_round_trip() {
        let text = "dd\ngen g1 i0 i1\ngen g24 i1 i1\ngen g2 i0 i0\ngen g6 i1 i1\n\
                    g1 -> r1 g24\ng2 -> r3.s3 g6\n";
        let b = DDBimodule::parse(text).unwrap();
        assert_eq!(b.arrows.arrow_count(), 2);
        let dumped = b.dump();
        assert!(dumped.contains("g1 -> r1.i1 g24"));
        assert_eq!(DDBimodule::parse(&dumped).unwrap(), b);
        assert_eq!(DDBimodule::from_json(&b.to_json()).unwrap(), b);
    }

    #[test]
    fn ainfty_round_trip() {
        let mut m = AInftyModule::new();
        m.add_gen("a", Idem::I0).unwrap();
        m.add_gen("b", Idem::I0).unwrap();
        m.add_family("a", &[R3], &[R2], 1, 1, "a").unwrap();
        m.add_op("b", &[], 1, "a").unwrap();
        m.add_op("b", &[R12], 0, "a").unwrap();
        let text = m.dump();
        assert!(text.contains("m a [r3 (r23)* r2] = U^(1+1i) a"));
        assert!(text.contains("m b [] = U a"));
        assert!(text.contains("m b [r12] = a"));
        assert_eq!(AInftyModule::parse(&text).unwrap(), m);
        assert_eq!(AInftyModule::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn complex_round_trip() {
        let mut c = GradedComplexFU::new();
        c.add_gen("x", Some(0)).unwrap();
        c.add_gen("y", None).unwrap();
        c.add_arrow("y", 1, "x").unwrap();
        c.add_arrow("x", 0, "y").unwrap();
        let text = c.dump();
        assert!(text.contains("gen y A=?"));
        assert!(text.contains("x -> 1 y"));
        assert_eq!(GradedComplexFU::parse(&text).unwrap(), c);
        assert_eq!(GradedComplexFU::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = TypeDStructure::parse("typed side=rho u=off\ngen a i0\na -> r9 a\n").unwrap_err();
        assert!(matches!(err, StructureError::Parse { line: 3, .. }));
        assert!(TypeDStructure::parse("typed side=rho u=off\na -> r1 b\n").is_err());
    }
}
