//! Normal-form arithmetic in the finite groups that appear as automorphism
//! groups and as obstruction groups.
//!
//! Words:
//!
//! | group                 | word        | element            |
//! |-----------------------|-------------|--------------------|
//! | `C{N}`                | `[e]`       | `t^e`              |
//! | `M(n=..,p=..,r=..)`   | `[a, b]`    | `x^a y^b`          |
//! | `Ext2(inner)`         | `[s, w..]`  | `s^s w`            |
//! | `D{N}`                | `[s, e]`    | `s^s t^e`          |
//!
//! The metacyclic relation `y^-1 x y = x^r` gives `y^b x^c = x^(c r^-b) y^b`,
//! so `x^a y^b * x^c y^d = x^(a + c r^-b) y^(b+d)`. In both extensions the
//! involution `s` acts by inverting the generators.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{is_odd_prime, pow_mod};
use crate::error::{Error, Result};
use crate::text::Cursor;

/// Largest group the brute-force isomorphism test accepts.
pub const ISOMORPHISM_LIMIT: usize = 200;

/// Largest group for which a full Cayley table is built.
pub const TABLE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupSpec {
    Cyclic { order: u32 },
    Metacyclic { n: u32, p: u32, r: u32 },
    InvertingExtension { inner: Box<GroupSpec> },
    Dihedral { n: u32 },
}

impl GroupSpec {
    pub fn cyclic(order: u32) -> Result<Self> {
        let g = GroupSpec::Cyclic { order };
        g.validate()?;
        Ok(g)
    }

    pub fn metacyclic(n: u32, p: u32, r: u32) -> Result<Self> {
        let g = GroupSpec::Metacyclic { n, p, r };
        g.validate()?;
        Ok(g)
    }

    pub fn inverting_extension(inner: GroupSpec) -> Result<Self> {
        let g = GroupSpec::InvertingExtension {
            inner: Box::new(inner),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn dihedral(n: u32) -> Result<Self> {
        let g = GroupSpec::Dihedral { n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGroup(m));
        match self {
            GroupSpec::Cyclic { order } | GroupSpec::Dihedral { n: order } => {
                if *order == 0 {
                    return bad(format!("{self}: order must be at least 1"));
                }
            }
            GroupSpec::Metacyclic { n, p, r } => {
                if *n == 0 {
                    return bad(format!("{self}: n must be at least 1"));
                }
                if !is_odd_prime(*p) {
                    return bad(format!("{self}: p must be an odd prime"));
                }
                if *r == 0 || *r >= *p {
                    return bad(format!("{self}: r must satisfy 0 < r < p"));
                }
                if pow_mod(u64::from(*r), u64::from(*n), u64::from(*p)) != 1 {
                    return bad(format!("{self}: r^n is not 1 mod p"));
                }
            }
            GroupSpec::InvertingExtension { inner } => {
                inner.validate()?;
                match inner.as_ref() {
                    GroupSpec::Cyclic { .. } => {}
                    GroupSpec::Metacyclic { p, r, .. } => {
                        if (u64::from(*r) * u64::from(*r)) % u64::from(*p) != 1 {
                            return bad(format!(
                                "{self}: inversion of x and y is an automorphism only when r^2 = 1 mod p"
                            ));
                        }
                    }
                    _ => return bad(format!("{self}: inner group must be cyclic or metacyclic")),
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        match self {
            GroupSpec::Cyclic { order } => *order as usize,
            GroupSpec::Metacyclic { n, p, .. } => (*n as usize) * (*p as usize),
            GroupSpec::InvertingExtension { inner } => 2 * inner.order(),
            GroupSpec::Dihedral { n } => 2 * (*n as usize),
        }
    }

    fn word_len(&self) -> usize {
        match self {
            GroupSpec::Cyclic { .. } => 1,
            GroupSpec::Metacyclic { .. } | GroupSpec::Dihedral { .. } => 2,
            GroupSpec::InvertingExtension { inner } => 1 + inner.word_len(),
        }
    }

    /// Component moduli of the normal-form word.
    fn moduli(&self) -> Vec<u32> {
        match self {
            GroupSpec::Cyclic { order } => vec![*order],
            GroupSpec::Metacyclic { n, p, .. } => vec![*p, *n],
            GroupSpec::InvertingExtension { inner } => {
                let mut m = vec![2];
                m.extend(inner.moduli());
                m
            }
            GroupSpec::Dihedral { n } => vec![2, *n],
        }
    }

    pub fn is_word(&self, w: &Word) -> bool {
        let m = self.moduli();
        w.0.len() == m.len() && w.0.iter().zip(&m).all(|(e, m)| e < m)
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if self.is_word(w) {
            Ok(())
        } else {
            Err(Error::MalformedWord {
                group: self.to_string(),
                word: w.0.clone(),
            })
        }
    }

    pub fn identity(&self) -> Word {
        Word(vec![0; self.word_len()])
    }

    /// All elements, in lexicographic word order.
    pub fn elements(&self) -> Vec<Word> {
        let moduli = self.moduli();
        let mut out = vec![Vec::new()];
        for m in moduli {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..m).map(move |e| {
                        let mut w = prefix.clone();
                        w.push(e);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(Word).collect()
    }

    /// Lexicographic rank of a normal-form word.
    fn rank(&self, w: &Word) -> usize {
        self.moduli()
            .iter()
            .zip(&w.0)
            .fold(0usize, |acc, (&m, &e)| acc * m as usize + e as usize)
    }

    pub fn mul(&self, a: &Word, b: &Word) -> Result<Word> {
        self.check_word(a)?;
        self.check_word(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn inv(&self, a: &Word) -> Result<Word> {
        self.check_word(a)?;
        Ok(self.inv_unchecked(a))
    }

    fn mul_unchecked(&self, a: &Word, b: &Word) -> Word {
        match self {
            GroupSpec::Cyclic { order } => Word(vec![(a.0[0] + b.0[0]) % order]),
            GroupSpec::Metacyclic { n, p, r } => {
                let (n, p) = (u64::from(*n), u64::from(*p));
                let (x1, y1, x2, y2) = (a.0[0] as u64, a.0[1] as u64, b.0[0] as u64, b.0[1] as u64);
                // y^b x^c = x^(c r^-b) y^b and r^-b = r^(n-b).
                let twist = pow_mod(u64::from(*r), (n - y1) % n, p);
                Word(vec![((x1 + x2 * twist) % p) as u32, ((y1 + y2) % n) as u32])
            }
            GroupSpec::InvertingExtension { inner } => {
                let (s1, w1) = (a.0[0], Word(a.0[1..].to_vec()));
                let (s2, w2) = (b.0[0], Word(b.0[1..].to_vec()));
                let left = if s2 == 1 { inner.invert_generators(&w1) } else { w1 };
                let mut out = vec![(s1 + s2) % 2];
                out.extend(inner.mul_unchecked(&left, &w2).0);
                Word(out)
            }
            GroupSpec::Dihedral { n } => {
                let (s1, e1, s2, e2) = (a.0[0], a.0[1], b.0[0], b.0[1]);
                let e1 = if s2 == 1 { (n - e1) % n } else { e1 };
                Word(vec![(s1 + s2) % 2, (e1 + e2) % n])
            }
        }
    }

    fn inv_unchecked(&self, a: &Word) -> Word {
        match self {
            GroupSpec::Cyclic { order } => Word(vec![(order - a.0[0]) % order]),
            GroupSpec::Metacyclic { n, p, r } => {
                // (x^a y^b)^-1 = y^-b x^-a = x^(-a r^b) y^-b
                let (nn, pp) = (u64::from(*n), u64::from(*p));
                let (x, y) = (a.0[0] as u64, a.0[1] as u64);
                let twist = pow_mod(u64::from(*r), y, pp);
                let xa = (pp - (x * twist) % pp) % pp;
                Word(vec![xa as u32, ((nn - y) % nn) as u32])
            }
            GroupSpec::InvertingExtension { inner } => {
                let w = Word(a.0[1..].to_vec());
                let wi = inner.inv_unchecked(&w);
                // (s w)^-1 = w^-1 s = s psi(w^-1)
                let body = if a.0[0] == 1 { inner.invert_generators(&wi) } else { wi };
                let mut out = vec![a.0[0]];
                out.extend(body.0);
                Word(out)
            }
            GroupSpec::Dihedral { n } => {
                if a.0[0] == 1 {
                    a.clone()
                } else {
                    Word(vec![0, (n - a.0[1]) % n])
                }
            }
        }
    }

    /// The automorphism inverting the standard generators (`t -> t^-1`, or
    /// `x -> x^-1, y -> y^-1` when `r^2 = 1`). In normal form it negates every
    /// exponent.
    fn invert_generators(&self, w: &Word) -> Word {
        let m = self.moduli();
        Word(w.0.iter().zip(&m).map(|(&e, &m)| (m - e) % m).collect())
    }

    pub fn pow(&self, a: &Word, k: u64) -> Result<Word> {
        self.check_word(a)?;
        let mut acc = self.identity();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_unchecked(&acc, &base);
            }
            base = self.mul_unchecked(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Least `k >= 1` with `a^k = 1`, by iterated multiplication.
    pub fn element_order(&self, a: &Word) -> Result<u64> {
        self.check_word(a)?;
        let id = self.identity();
        let mut acc = a.clone();
        let mut k = 1u64;
        while acc != id {
            acc = self.mul_unchecked(&acc, a);
            k += 1;
        }
        Ok(k)
    }

    /// Named generators, for building maps by hand.
    pub fn gen_t(&self, e: i64) -> Word {
        match self {
            GroupSpec::Cyclic { order } => Word(vec![e.rem_euclid(i64::from(*order)) as u32]),
            GroupSpec::Dihedral { n } => Word(vec![0, e.rem_euclid(i64::from(*n)) as u32]),
            _ => panic!("{self} has no generator t"),
        }
    }

    /// `x^a y^b` in a metacyclic group.
    pub fn xy(&self, a: i64, b: i64) -> Word {
        match self {
            GroupSpec::Metacyclic { n, p, .. } => Word(vec![
                a.rem_euclid(i64::from(*p)) as u32,
                b.rem_euclid(i64::from(*n)) as u32,
            ]),
            _ => panic!("{self} is not metacyclic"),
        }
    }

    /// `s^sigma w` in an extension.
    pub fn with_s(&self, sigma: u32, inner: &Word) -> Word {
        let mut out = vec![sigma % 2];
        out.extend(&inner.0);
        Word(out)
    }

    pub fn table(&self) -> Result<FiniteGroup> {
        FiniteGroup::new(self.clone())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic { order } => write!(f, "C{order}"),
            GroupSpec::Metacyclic { n, p, r } => write!(f, "M(n={n},p={p},r={r})"),
            GroupSpec::InvertingExtension { inner } => write!(f, "Ext2({inner})"),
            GroupSpec::Dihedral { n } => write!(f, "D{n}"),
        }
    }
}

fn parse_group(cur: &mut Cursor<'_>) -> Result<GroupSpec> {
    if cur.eat_str("Ext2") {
        cur.expect('(')?;
        let inner = parse_group(cur)?;
        cur.expect(')')?;
        return GroupSpec::inverting_extension(inner);
    }
    if cur.eat('M') {
        cur.expect('(')?;
        cur.expect_str("n=")?;
        let n = cur.number()?;
        cur.expect(',')?;
        cur.expect_str("p=")?;
        let p = cur.number()?;
        cur.expect(',')?;
        cur.expect_str("r=")?;
        let r = cur.number()?;
        cur.expect(')')?;
        return GroupSpec::metacyclic(n, p, r);
    }
    if cur.eat('C') {
        return GroupSpec::cyclic(cur.number()?);
    }
    if cur.eat('D') {
        return GroupSpec::dihedral(cur.number()?);
    }
    cur.error("expected C, D, M(...) or Ext2(...)")
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let g = parse_group(&mut cur)?;
        cur.finish()?;
        Ok(g)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Normal-form exponent tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u32>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An element together with the group it lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub spec: GroupSpec,
    pub word: Word,
}

impl GroupElement {
    pub fn new(spec: GroupSpec, word: Word) -> Result<Self> {
        spec.check_word(&word)?;
        Ok(Self { spec, word })
    }

    pub fn identity(spec: GroupSpec) -> Self {
        let word = spec.identity();
        Self { spec, word }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(self.spec.to_string(), other.spec.to_string()));
        }
        Ok(GroupElement {
            spec: self.spec.clone(),
            word: self.spec.mul_unchecked(&self.word, &other.word),
        })
    }

    pub fn inv(&self) -> GroupElement {
        GroupElement {
            spec: self.spec.clone(),
            word: self.spec.inv_unchecked(&self.word),
        }
    }

    pub fn order(&self) -> u64 {
        self.spec.element_order(&self.word).expect("word checked at construction")
    }

    pub fn is_identity(&self) -> bool {
        self.word == self.spec.identity()
    }
}

/// A set of elements of a [`FiniteGroup`], by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSet {
    members: Vec<bool>,
    len: usize,
}

impl ElementSet {
    pub fn empty(group_order: usize) -> Self {
        Self {
            members: vec![false; group_order],
            len: 0,
        }
    }

    pub fn from_indices(group_order: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(group_order);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) -> bool {
        if self.members[i] {
            false
        } else {
            self.members[i] = true;
            self.len += 1;
            true
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }
}

/// Cayley table of a [`GroupSpec`]. Element `i` is the `i`-th word in
/// lexicographic order; index 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    spec: GroupSpec,
    words: Vec<Word>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    orders: Vec<u32>,
}

impl FiniteGroup {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        spec.validate()?;
        let order = spec.order();
        if order > TABLE_LIMIT {
            return Err(Error::OrderTooLarge(order, TABLE_LIMIT));
        }
        let words = spec.elements();
        let mut mul = vec![0u32; order * order];
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                mul[i * order + j] = spec.rank(&spec.mul_unchecked(a, b)) as u32;
            }
        }
        let inv = words.iter().map(|w| spec.rank(&spec.inv_unchecked(w)) as u32).collect();
        let mut orders = vec![0u32; order];
        for (i, o) in orders.iter_mut().enumerate() {
            let mut acc = i;
            let mut k = 1;
            while acc != 0 {
                acc = mul[acc * order + i] as usize;
                k += 1;
            }
            *o = k;
        }
        Ok(Self {
            spec,
            words,
            mul,
            inv,
            orders,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub const IDENTITY: usize = 0;

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.words.len() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    #[inline]
    pub fn element_order(&self, a: usize) -> u32 {
        self.orders[a]
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let k = k % u64::from(self.orders[a]);
        (0..k).fold(Self::IDENTITY, |acc, _| self.mul(acc, a))
    }

    pub fn conj(&self, a: usize, by: usize) -> usize {
        self.mul(self.mul(by, a), self.inv(by))
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn index_of(&self, w: &Word) -> Result<usize> {
        self.spec.check_word(w)?;
        Ok(self.spec.rank(w))
    }

    pub fn elements_of_order(&self, k: u32) -> Vec<usize> {
        (0..self.order()).filter(|&i| self.orders[i] == k).collect()
    }

    /// Closure of `gens` under multiplication (finite, so inverses come for free).
    pub fn subgroup(&self, gens: &[usize]) -> ElementSet {
        let mut set = ElementSet::empty(self.order());
        set.insert(Self::IDENTITY);
        let mut queue = VecDeque::from([Self::IDENTITY]);
        while let Some(u) = queue.pop_front() {
            for &g in gens {
                let v = self.mul(u, g);
                if set.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        set
    }

    pub fn is_subgroup(&self, set: &ElementSet) -> bool {
        set.contains(Self::IDENTITY)
            && set.iter().all(|a| set.iter().all(|b| set.contains(self.mul(a, b))))
    }

    pub fn is_normal(&self, set: &ElementSet) -> bool {
        self.is_subgroup(set)
            && (0..self.order()).all(|g| set.iter().all(|h| set.contains(self.conj(h, g))))
    }

    /// Involutions not in `sub`. When `sub` is the orientation-preserving part of
    /// an action, an empty result means no anticonformal involution.
    pub fn involutions_outside(&self, sub: &ElementSet) -> Result<Vec<usize>> {
        if !self.is_subgroup(sub) {
            return Err(Error::NotASubgroup);
        }
        Ok((0..self.order())
            .filter(|&g| self.orders[g] == 2 && !sub.contains(g))
            .collect())
    }

    /// `square_roots()[z]` lists every `d` with `d^2 = z`.
    pub fn square_roots(&self) -> Vec<Vec<usize>> {
        let mut roots = vec![Vec::new(); self.order()];
        for d in 0..self.order() {
            roots[self.mul(d, d)].push(d);
        }
        roots
    }

    /// Extends `gens[i] -> images[i]` to a homomorphism into `target`, returning
    /// the image of every element, or `None` if the assignment does not respect
    /// the relations of `self`. `gens` must generate `self`.
    pub fn extend_homomorphism(
        &self,
        gens: &[usize],
        target: &FiniteGroup,
        images: &[usize],
    ) -> Option<Vec<usize>> {
        const UNSET: usize = usize::MAX;
        let mut map = vec![UNSET; self.order()];
        map[Self::IDENTITY] = FiniteGroup::IDENTITY;
        let mut queue = VecDeque::from([Self::IDENTITY]);
        while let Some(u) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let v = self.mul(u, g);
                let want = target.mul(map[u], img);
                if map[v] == UNSET {
                    map[v] = want;
                    queue.push_back(v);
                } else if map[v] != want {
                    return None;
                }
            }
        }
        if map.contains(&UNSET) {
            return None;
        }
        Some(map)
    }

    /// A small generating set: repeatedly adds an element of largest order not
    /// yet covered.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (0..self.order()).collect();
        by_order.sort_by_key(|&i| (std::cmp::Reverse(self.orders[i]), i));
        let mut gens = Vec::new();
        let mut span = self.subgroup(&gens);
        for i in by_order {
            if span.len() == self.order() {
                break;
            }
            if !span.contains(i) {
                gens.push(i);
                span = self.subgroup(&gens);
            }
        }
        gens
    }

    fn order_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.order() + 1];
        for &o in &self.orders {
            h[o as usize] += 1;
        }
        h
    }
}

/// Brute-force isomorphism test for groups of order at most [`ISOMORPHISM_LIMIT`].
pub fn is_isomorphic(a: &GroupSpec, b: &GroupSpec) -> Result<bool> {
    for g in [a, b] {
        if g.order() > ISOMORPHISM_LIMIT {
            return Err(Error::OrderTooLarge(g.order(), ISOMORPHISM_LIMIT));
        }
    }
    if a.order() != b.order() {
        return Ok(false);
    }
    if a == b {
        return Ok(true);
    }
    let ga = a.table()?;
    let gb = b.table()?;
    if ga.order_histogram() != gb.order_histogram() {
        return Ok(false);
    }
    let gens = ga.generating_set();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| gb.elements_of_order(ga.element_order(g)))
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    Ok(search_iso(&ga, &gens, &gb, &candidates, &mut images))
}

fn search_iso(
    ga: &FiniteGroup,
    gens: &[usize],
    gb: &FiniteGroup,
    candidates: &[Vec<usize>],
    images: &mut Vec<usize>,
) -> bool {
    if images.len() == gens.len() {
        let Some(map) = ga.extend_homomorphism(gens, gb, images) else {
            return false;
        };
        let mut seen = vec![false; gb.order()];
        return map.iter().all(|&v| !std::mem::replace(&mut seen[v], true));
    }
    for &c in &candidates[images.len()] {
        images.push(c);
        if search_iso(ga, gens, gb, candidates, images) {
            return true;
        }
        images.pop();
    }
    false
}
