//! NEC signatures and their exact area arithmetic.
//!
//! A signature `(h; ±; [m1,...,mr]; {(n11,...),...})` records the orbit genus,
//! orientability, the proper periods and the period cycles of an NEC group.
//! Everything here is exact rational arithmetic.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::is_odd_prime;
use crate::error::{Error, Result};
use crate::text::Cursor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Euler characteristic weight of the orbit genus: 2 for orientable, 1 otherwise.
    pub fn epsilon(self) -> u32 {
        match self {
            Sign::Plus => 2,
            Sign::Minus => 1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MinusSignNeedsGenus,
    ProperPeriodBelowTwo { index: usize, value: u32 },
    LinkPeriodBelowTwo { cycle: usize, index: usize, value: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MinusSignNeedsGenus => f.write_str("sign - needs genus >= 1"),
            Violation::ProperPeriodBelowTwo { index, value } => {
                write!(f, "period < 2 (proper period #{} is {value})", index + 1)
            }
            Violation::LinkPeriodBelowTwo { cycle, index, value } => write!(
                f,
                "period < 2 (link period #{} of cycle #{} is {value})",
                index + 1,
                cycle + 1
            ),
        }
    }
}

/// The combinatorial datum of an NEC group.
///
/// Proper periods keep their original order, because canonical generators are
/// addressed by position. Equality and hashing ignore that order.
#[derive(Debug, Clone)]
pub struct NecSignature {
    pub genus: u32,
    pub sign: Sign,
    pub proper_periods: Vec<u32>,
    pub period_cycles: Vec<Vec<u32>>,
}

impl PartialEq for NecSignature {
    fn eq(&self, other: &Self) -> bool {
        self.genus == other.genus
            && self.sign == other.sign
            && self.sorted_periods() == other.sorted_periods()
            && self.period_cycles == other.period_cycles
    }
}

impl Eq for NecSignature {}

impl Hash for NecSignature {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.genus.hash(state);
        self.sign.hash(state);
        self.sorted_periods().hash(state);
        self.period_cycles.hash(state);
    }
}

impl NecSignature {
    pub fn new(genus: u32, sign: Sign, proper_periods: Vec<u32>, period_cycles: Vec<Vec<u32>>) -> Self {
        Self {
            genus,
            sign,
            proper_periods,
            period_cycles,
        }
    }

    /// `(h; -; [periods])`, the shape of every group uniformizing a pseudo-real quotient.
    pub fn non_orientable(genus: u32, proper_periods: Vec<u32>) -> Self {
        Self::new(genus, Sign::Minus, proper_periods, Vec::new())
    }

    pub fn orientable(genus: u32, proper_periods: Vec<u32>) -> Self {
        Self::new(genus, Sign::Plus, proper_periods, Vec::new())
    }

    pub fn surface(genus: u32) -> Self {
        Self::orientable(genus, Vec::new())
    }

    pub fn sorted_periods(&self) -> Vec<u32> {
        let mut v = self.proper_periods.clone();
        v.sort_unstable();
        v
    }

    pub fn is_surface_group(&self) -> bool {
        self.sign == Sign::Plus
            && self.proper_periods.is_empty()
            && self.period_cycles.is_empty()
            && self.genus >= 2
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.sign == Sign::Minus && self.genus == 0 {
            out.push(Violation::MinusSignNeedsGenus);
        }
        for (index, &value) in self.proper_periods.iter().enumerate() {
            if value < 2 {
                out.push(Violation::ProperPeriodBelowTwo { index, value });
            }
        }
        for (cycle, links) in self.period_cycles.iter().enumerate() {
            for (index, &value) in links.iter().enumerate() {
                if value < 2 {
                    out.push(Violation::LinkPeriodBelowTwo { cycle, index, value });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSignature(violations))
        }
    }

    /// `mu / 2pi = eps*h - 2 + k + sum(1 - 1/m_i) + 1/2 sum(1 - 1/n_ij)`.
    pub fn normalized_area(&self) -> Result<BigRational> {
        self.ensure_valid()?;
        Ok(self.area_unchecked())
    }

    fn area_unchecked(&self) -> BigRational {
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        let one = BigRational::one();
        let mut area = int(i64::from(self.sign.epsilon()) * i64::from(self.genus) - 2
            + self.period_cycles.len() as i64);
        for &m in &self.proper_periods {
            area += &one - BigRational::new(BigInt::one(), BigInt::from(m));
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for links in &self.period_cycles {
            for &n in links {
                area += (&one - BigRational::new(BigInt::one(), BigInt::from(n))) * &half;
            }
        }
        area
    }

    pub fn is_degenerate(&self) -> Result<bool> {
        Ok(!self.normalized_area()?.is_positive())
    }

    /// Genus of a surface-kernel subgroup of index `group_order`, from
    /// `2g - 2 = |G| * area`. Returns `None` when that genus is not an integer `>= 2`.
    pub fn genus_of_surface_kernel(&self, group_order: u64) -> Result<Option<u64>> {
        let area = self.normalized_area()?;
        if !area.is_positive() {
            return Err(Error::DegenerateSignature(self.to_string()));
        }
        if group_order == 0 {
            return Err(Error::InvalidParameter("group order must be at least 1".into()));
        }
        let twice_genus_minus_two = area * BigRational::from_integer(BigInt::from(group_order));
        if !twice_genus_minus_two.is_integer() {
            return Ok(None);
        }
        let v = twice_genus_minus_two.to_integer();
        if (&v % 2u32) != BigInt::zero() {
            return Ok(None);
        }
        let g = v / 2u32 + 1u32;
        Ok(g.to_u64().filter(|&g| g >= 2))
    }

    /// Signature of the orientation-preserving half of a group `(h;-;[m1..mr])`:
    /// `(h-1;+;[m1,m1,...,mr,mr])`.
    pub fn canonical_fuchsian(&self) -> Result<NecSignature> {
        self.ensure_valid()?;
        if self.sign != Sign::Minus || !self.period_cycles.is_empty() {
            return Err(Error::UnsupportedSignature(self.to_string()));
        }
        let periods = self.proper_periods.iter().flat_map(|&m| [m, m]).collect();
        Ok(NecSignature::orientable(self.genus - 1, periods))
    }
}

/// Orientable genus `h` with `2h - 2 + sum(1 - 1/m) = area`, if it is a
/// non-negative integer.
pub fn solve_orientable_genus(area: &BigRational, periods: &[u32]) -> Option<u32> {
    let probe = NecSignature::orientable(0, periods.to_vec());
    // area(probe) = -2 + sum(...), so 2h = area - area(probe).
    let twice_h = area - probe.area_unchecked();
    if !twice_h.is_integer() || twice_h.is_negative() {
        return None;
    }
    let v = twice_h.to_integer();
    if (&v % 2u32) != BigInt::zero() {
        return None;
    }
    (v / 2u32).to_u32()
}

impl fmt::Display for NecSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "({};{};[{}]", self.genus, self.sign, join(&self.proper_periods))?;
        if !self.period_cycles.is_empty() {
            let cycles: Vec<String> = self
                .period_cycles
                .iter()
                .map(|c| format!("({})", join(c)))
                .collect();
            write!(f, ";{{{}}}", cycles.join(","))?;
        }
        f.write_str(")")
    }
}

impl FromStr for NecSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        cur.expect('(')?;
        let genus = cur.number()?;
        cur.expect(';')?;
        let sign = if cur.eat('+') {
            Sign::Plus
        } else if cur.eat('-') {
            Sign::Minus
        } else {
            return cur.error("expected sign '+' or '-'");
        };
        cur.expect(';')?;
        cur.expect('[')?;
        let proper_periods = cur.number_list(']')?;
        cur.expect(']')?;
        let mut period_cycles = Vec::new();
        if cur.eat(';') {
            cur.expect('{')?;
            if cur.peek() != Some('}') {
                loop {
                    cur.expect('(')?;
                    period_cycles.push(cur.number_list(')')?);
                    cur.expect(')')?;
                    if !cur.eat(',') {
                        break;
                    }
                }
            }
            cur.expect('}')?;
        }
        cur.expect(')')?;
        cur.finish()?;
        Ok(NecSignature::new(genus, sign, proper_periods, period_cycles))
    }
}

impl Serialize for NecSignature {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NecSignature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The two signature shapes a pseudo-real cyclic p-gonal quotient can have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `(1;-;[p x l, n/2])`, `l = 2(g+p-1)/(n(p-1))`.
    #[serde(rename = "i")]
    I,
    /// `(1;-;[p x l, np/2])`, `l = 2g/(n(p-1))`.
    #[serde(rename = "ii")]
    II,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::I, Family::II];

    /// The period count `l` as an exact rational.
    pub fn period_count(self, p: u32, n: u32, g: u64) -> BigRational {
        let numerator = match self {
            Family::I => 2 * (BigInt::from(g) + BigInt::from(p) - 1),
            Family::II => 2 * BigInt::from(g),
        };
        BigRational::new(numerator, BigInt::from(n) * BigInt::from(p - 1))
    }

    /// The last period: `n/2` for family i, `np/2` for family ii.
    pub fn tail_period(self, p: u32, n: u32) -> u32 {
        match self {
            Family::I => n / 2,
            Family::II => n / 2 * p,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::I => "i",
            Family::II => "ii",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" | "I" | "1" => Ok(Family::I),
            "ii" | "II" | "2" => Ok(Family::II),
            _ => Err(Error::InvalidParameter(format!("unknown signature family {s:?}"))),
        }
    }
}

/// A family signature together with its period count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySignature {
    pub family: Family,
    pub l: u32,
    pub signature: NecSignature,
}

impl FamilySignature {
    /// `l = 1` signatures are not maximal: they sit with index 2 in
    /// `(0;+;[2];{(p, m)})`.
    pub fn is_l1(&self) -> bool {
        self.l == 1
    }
}

/// The family signature for `(p, n, g)`, or `None` when `l` is not a positive integer.
pub fn paper_signature(p: u32, n: u32, g: u64, family: Family) -> Result<Option<FamilySignature>> {
    if !is_odd_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not an odd prime")));
    }
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n = {n} is not a positive even integer")));
    }
    let l = family.period_count(p, n, g);
    if !l.is_integer() || !l.is_positive() {
        return Ok(None);
    }
    let Some(l) = l.to_integer().to_u32() else {
        return Ok(None);
    };
    let tail = family.tail_period(p, n);
    if tail < 2 {
        return Ok(None);
    }
    let mut periods = vec![p; l as usize];
    periods.push(tail);
    Ok(Some(FamilySignature {
        family,
        l,
        signature: NecSignature::non_orientable(1, periods),
    }))
}
