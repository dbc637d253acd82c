//! Existence criteria for pseudo-real cyclic p-gonal surfaces with a given full
//! automorphism group, per-genus classification, maximal orders, and the
//! criteria-versus-search cross validation.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::actions::{self, find_first, Requirement, SurfaceKernelMap};
use crate::arith::{gcd, is_odd_prime, mult_order, pow_mod};
use crate::error::{Error, Result};
use crate::groups::{is_isomorphic, GroupSpec, ISOMORPHISM_LIMIT};
use crate::nec::{paper_signature, Family, NecSignature};

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

fn require_odd_prime(p: u32) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p = {p} is not an odd prime")))
    }
}

/// `g <= (p-1)^2`: the p-gonal subgroup need not be unique, so the criteria
/// are evaluated but their hypothesis does not hold.
pub fn hypothesis_violated(p: u32, g: u64) -> bool {
    g <= u64::from(p - 1).pow(2)
}

pub fn hypothesis_warning(p: u32, g: u64) -> Option<String> {
    hypothesis_violated(p, g).then(|| {
        format!("hypothesis g > (p-1)^2 violated: g = {g} <= {}", u64::from(p - 1).pow(2))
    })
}

fn integer_above_one(r: &BigRational) -> bool {
    r.is_integer() && r > &BigRational::one()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub p: u32,
    pub n: u32,
    pub g: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub l1: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub l2: BigRational,
    pub gcd_pn2: u32,
    /// Families whose signature realizes the group.
    pub families: Vec<Family>,
    /// For the general semidirect criterion: every `1 < r < p-1` with `r^n = 1 mod p`.
    pub qualifying_r: Vec<u32>,
    pub reasons: Vec<Condition>,
    pub warnings: Vec<String>,
}

impl ExistenceVerdict {
    fn base(p: u32, n: u32, g: u64) -> Self {
        let four = n > 0 && n.is_multiple_of(4);
        let mut v = ExistenceVerdict {
            exists: false,
            p,
            n,
            g,
            l1: Family::I.period_count(p, n.max(1), g),
            l2: Family::II.period_count(p, n.max(1), g),
            gcd_pn2: gcd(p, n / 2),
            families: Vec::new(),
            qualifying_r: Vec::new(),
            reasons: Vec::new(),
            warnings: hypothesis_warning(p, g).into_iter().collect(),
        };
        v.push("4 | n", four);
        v
    }

    fn push(&mut self, name: &str, passed: bool) -> bool {
        self.reasons.push(Condition {
            name: name.to_string(),
            passed,
        });
        passed
    }

    fn four_divides_n(&self) -> bool {
        self.reasons[0].passed
    }
}

/// `C_n x|_r C_p` with `1 < r < p-1`: exists iff `4 | n`, such an `r` with
/// `r^n = 1 mod p` exists, and `l1` is an integer `> 1`.
pub fn exists_semidirect_general(p: u32, n: u32, g: u64) -> Result<ExistenceVerdict> {
    require_odd_prime(p)?;
    let mut v = ExistenceVerdict::base(p, n, g);
    v.qualifying_r = (2..p.saturating_sub(1))
        .filter(|&r| pow_mod(u64::from(r), u64::from(n), u64::from(p)) == 1)
        .collect();
    let has_r = v.push("exists r, 1<r<p-1, r^n = 1 mod p", !v.qualifying_r.is_empty());
    let l1_ok = v.push("l1 integer > 1", integer_above_one(&v.l1));
    v.exists = v.four_divides_n() && has_r && l1_ok;
    if v.exists {
        v.families.push(Family::I);
    }
    Ok(v)
}

/// `C_np`: exists iff `4 | n`, `gcd(p, n/2) = 1` and one of `l1`, `l2` is an
/// integer `> 1`.
pub fn exists_cyclic(p: u32, n: u32, g: u64) -> Result<ExistenceVerdict> {
    require_odd_prime(p)?;
    let mut v = ExistenceVerdict::base(p, n, g);
    let coprime = v.push("gcd(p, n/2) = 1", v.gcd_pn2 == 1);
    let l1_ok = v.push("l1 integer > 1", integer_above_one(&v.l1));
    let l2_ok = v.push("l2 integer > 1", integer_above_one(&v.l2));
    v.exists = v.four_divides_n() && coprime && (l1_ok || l2_ok);
    if v.exists {
        if l1_ok {
            v.families.push(Family::I);
        }
        if l2_ok {
            v.families.push(Family::II);
        }
    }
    Ok(v)
}

/// `C_n x|_r C_p` with `r = 1` or `p-1`: exists iff `4 | n` and either `l1` is
/// an integer `> 1`, or `l2` is an integer `> 1` and `gcd(p, n/2) = 1`.
pub fn exists_semidirect_r1_pm1(p: u32, n: u32, g: u64) -> Result<ExistenceVerdict> {
    require_odd_prime(p)?;
    let mut v = ExistenceVerdict::base(p, n, g);
    let l1_ok = v.push("l1 integer > 1", integer_above_one(&v.l1));
    let l2_ok = v.push("l2 integer > 1", integer_above_one(&v.l2));
    let coprime = v.push("gcd(p, n/2) = 1", v.gcd_pn2 == 1);
    v.exists = v.four_divides_n() && (l1_ok || (l2_ok && coprime));
    if v.exists {
        if l1_ok {
            v.families.push(Family::I);
        }
        if l2_ok && coprime {
            v.families.push(Family::II);
        }
    }
    if v.exists && gcd(n, p) == 1 {
        v.warnings
            .push(format!("r = 1 gives C{n} x C{p}, isomorphic to C{}", n * p));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RClass {
    Cyclic,
    One,
    PMinusOne,
    General(u32),
}

impl RClass {
    fn verdict(self, p: u32, n: u32, g: u64) -> Result<ExistenceVerdict> {
        match self {
            RClass::Cyclic => exists_cyclic(p, n, g),
            RClass::One | RClass::PMinusOne => exists_semidirect_r1_pm1(p, n, g),
            RClass::General(_) => exists_semidirect_general(p, n, g),
        }
    }
}

impl fmt::Display for RClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RClass::Cyclic => f.write_str("cyclic"),
            RClass::One => f.write_str("r=1"),
            RClass::PMinusOne => f.write_str("r=p-1"),
            RClass::General(r) => write!(f, "r={r}"),
        }
    }
}

impl Serialize for RClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A group of order `np` that can carry the action, with the presentations
/// merged into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateGroup {
    pub group: GroupSpec,
    pub r_class: RClass,
    /// Every class realized by this isomorphism type (the kept one first).
    pub classes: Vec<RClass>,
    pub merged: Vec<String>,
}

fn arithmetic_isomorphic(a: &(GroupSpec, RClass), b: &(GroupSpec, RClass), p: u32, n: u32) -> bool {
    let order = |c: RClass| match c {
        RClass::Cyclic => None,
        RClass::One => Some(1),
        RClass::PMinusOne => mult_order(u64::from(p - 1), u64::from(p)),
        RClass::General(r) => mult_order(u64::from(r), u64::from(p)),
    };
    match (order(a.1), order(b.1)) {
        (None, None) => true,
        (None, Some(1)) | (Some(1), None) => gcd(n, p) == 1,
        (None, _) | (_, None) => false,
        (Some(x), Some(y)) => x == y,
    }
}

/// Cyclic, `r = 1`, `r = p-1` and general-`r` groups of order `np`, merged up to
/// isomorphism.
pub fn candidate_groups(p: u32, n: u32) -> Result<Vec<CandidateGroup>> {
    require_odd_prime(p)?;
    let mut raw: Vec<(GroupSpec, RClass)> = vec![(GroupSpec::cyclic(n * p)?, RClass::Cyclic)];
    // r = 1 and r = p-1 first, then the general exponents.
    let exponents = [1, p - 1].into_iter().chain(2..p - 1);
    for r in exponents {
        if pow_mod(u64::from(r), u64::from(n), u64::from(p)) != 1 {
            continue;
        }
        let class = if r == 1 {
            RClass::One
        } else if r == p - 1 {
            RClass::PMinusOne
        } else {
            RClass::General(r)
        };
        raw.push((GroupSpec::metacyclic(n, p, r)?, class));
    }
    let mut out: Vec<CandidateGroup> = Vec::new();
    for item in raw {
        let mut merged_into = None;
        for (i, kept) in out.iter().enumerate() {
            let same = if item.0.order() <= ISOMORPHISM_LIMIT {
                is_isomorphic(&kept.group, &item.0)?
            } else {
                arithmetic_isomorphic(&(kept.group.clone(), kept.r_class), &item, p, n)
            };
            if same {
                merged_into = Some(i);
                break;
            }
        }
        match merged_into {
            Some(i) => {
                let kept = &mut out[i];
                kept.merged.push(format!("{} is isomorphic to {}", item.0, kept.group));
                kept.classes.push(item.1);
            }
            None => out.push(CandidateGroup {
                group: item.0,
                r_class: item.1,
                classes: vec![item.1],
                merged: Vec::new(),
            }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationRecord {
    pub p: u32,
    pub g: u64,
    pub n: u32,
    pub group: GroupSpec,
    pub r_class: RClass,
    pub signature_family: Family,
    pub signature: NecSignature,
    pub l: u32,
    /// Branch count of the p-gonal covering, `2(g+p-1)/(p-1)`.
    pub q: u64,
    pub witness: Option<SurfaceKernelMap>,
    /// Whether a witness was checked to be pseudo-real and p-gonal.
    pub witness_verified: Option<bool>,
    pub is_max_order: bool,
}

impl ClassificationRecord {
    pub fn order(&self) -> u64 {
        u64::from(self.n) * u64::from(self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub p: u32,
    pub g: u64,
    pub records: Vec<ClassificationRecord>,
    pub notes: Vec<String>,
}

/// Branch count `q = 2(g+p-1)/(p-1)`, when integral.
pub fn branch_count(p: u32, g: u64) -> Option<u64> {
    let num = 2 * (g + u64::from(p) - 1);
    let den = u64::from(p - 1);
    num.is_multiple_of(den).then_some(num / den)
}

fn witness_for(
    p: u32,
    n: u32,
    g: u64,
    cand: &CandidateGroup,
    family: Family,
    l: u32,
    signature: &NecSignature,
    budget: u64,
) -> Result<SurfaceKernelMap> {
    let map = match (&cand.group, family) {
        (GroupSpec::Metacyclic { r, .. }, Family::I) => actions::construct_thm5(p, n, *r, l)?,
        (GroupSpec::Metacyclic { r, .. }, Family::II) => actions::construct_thm7(p, n, *r, l)?,
        _ => find_first(signature, &cand.group, Requirement::PseudoRealPGonal { p }, budget)?
            .found
            .ok_or_else(|| {
                Error::Internal(format!(
                    "no pseudo-real {p}-gonal action of {} on {signature} (g = {g})",
                    cand.group
                ))
            })?,
    };
    Ok(map)
}

fn verify_witness(map: &SurfaceKernelMap, p: u32, g: u64) -> Result<bool> {
    let report = actions::check(map)?;
    let gonal = actions::verify_p_gonal(map, p)?;
    Ok(report.valid && report.pseudo_real && report.genus == Some(g) && gonal.is_some())
}

/// All records for genus `g`: every `n` with `4 | n` and every merged group
/// type whose criterion holds, one record per realizing signature family.
pub fn classify_genus(p: u32, g: u64, with_witnesses: bool) -> Result<Classification> {
    classify_genus_with_budget(p, g, with_witnesses, actions::DEFAULT_BUDGET)
}

pub fn classify_genus_with_budget(p: u32, g: u64, with_witnesses: bool, budget: u64) -> Result<Classification> {
    require_odd_prime(p)?;
    let mut notes: Vec<String> = hypothesis_warning(p, g).into_iter().collect();
    if g % 2 == 1 {
        notes.push("genus must be even".to_string());
        return Ok(Classification {
            p,
            g,
            records: Vec::new(),
            notes,
        });
    }
    let q = branch_count(p, g).unwrap_or(0);
    // l >= 2 in family i forces n <= (g+p-1)/(p-1); family ii is stricter.
    let n_max = (g + u64::from(p) - 1) / u64::from(p - 1);
    let mut records = Vec::new();
    let mut n = 4u32;
    while u64::from(n) <= n_max {
        for cand in candidate_groups(p, n)? {
            let mut families: Vec<Family> = Vec::new();
            for class in &cand.classes {
                for f in class.verdict(p, n, g)?.families {
                    if !families.contains(&f) {
                        families.push(f);
                    }
                }
            }
            families.sort();
            notes.extend(cand.merged.iter().cloned());
            for family in families {
                let fs = paper_signature(p, n, g, family)?
                    .ok_or_else(|| Error::Internal(format!("family {family} not integral")))?;
                let (witness, witness_verified) = if with_witnesses {
                    let w = witness_for(p, n, g, &cand, family, fs.l, &fs.signature, budget)?;
                    let ok = verify_witness(&w, p, g)?;
                    (Some(w), Some(ok))
                } else {
                    (None, None)
                };
                records.push(ClassificationRecord {
                    p,
                    g,
                    n,
                    group: cand.group.clone(),
                    r_class: cand.r_class,
                    signature_family: family,
                    signature: fs.signature,
                    l: fs.l,
                    q,
                    witness,
                    witness_verified,
                    is_max_order: false,
                });
            }
        }
        n += 4;
    }
    let max = records.iter().map(ClassificationRecord::order).max();
    for r in &mut records {
        r.is_max_order = Some(r.order()) == max;
    }
    records.sort_by(|a, b| {
        (a.g, a.n, a.group.to_string(), a.signature_family).cmp(&(b.g, b.n, b.group.to_string(), b.signature_family))
    });
    notes.dedup();
    Ok(Classification { p, g, records, notes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximalOrderCase {
    /// `g/(p-1) = 3 mod 4`.
    ThreeModFour,
    /// `g/(p-1) = 0 mod 4`.
    ZeroModFour,
    /// Other residues: enumeration only.
    Enumerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalOrder {
    pub p: u32,
    pub g: u64,
    pub order: u64,
    pub n: u32,
    pub group_types: Vec<String>,
    pub signatures: Vec<NecSignature>,
    pub case: MaximalOrderCase,
    /// Order given by the closed formula in the proposition's statement.
    pub statement_order: Option<String>,
    /// Order given by the proof's closing sentence.
    pub proof_order: Option<String>,
    /// `gcd(p, (g+p-1)/(2(p-1)))` as in the statement, when integral.
    pub statement_gcd: Option<u32>,
    /// `gcd(p, g/(2(p-1)))` as in the proof, when integral.
    pub proof_gcd: Option<u32>,
    /// Whether the classification agrees with the formula for this case.
    pub formula_agrees: Option<bool>,
    pub resolution: String,
}

fn ratio_string(num: u64, den: u64) -> String {
    BigRational::new(BigInt::from(num), BigInt::from(den)).to_string()
}

fn integral_gcd(p: u32, num: u64, den: u64) -> Option<u32> {
    num.is_multiple_of(den).then(|| gcd(u64::from(p), num / den) as u32)
}

/// Largest `|G|` over the classification of genus `g`, with the closed-form
/// readings for the two residue cases. `None` when no record exists.
pub fn maximal_order(p: u32, g: u64) -> Result<Option<MaximalOrder>> {
    require_odd_prime(p)?;
    let pm1 = u64::from(p - 1);
    if !g.is_multiple_of(pm1) {
        return Err(Error::InvalidParameter(format!("p - 1 = {pm1} does not divide g = {g}")));
    }
    if hypothesis_violated(p, g) {
        return Err(Error::InvalidParameter(
            hypothesis_warning(p, g).expect("violated"),
        ));
    }
    let classification = classify_genus(p, g, false)?;
    let Some(order) = classification.records.iter().map(ClassificationRecord::order).max() else {
        return Ok(None);
    };
    let at_max: Vec<&ClassificationRecord> =
        classification.records.iter().filter(|r| r.order() == order).collect();
    let n = at_max[0].n;
    let mut group_types: Vec<String> = Vec::new();
    let mut signatures: Vec<NecSignature> = Vec::new();
    for r in &at_max {
        let t = format!("{} ({})", r.group, r.r_class);
        if !group_types.contains(&t) {
            group_types.push(t);
        }
        if !signatures.contains(&r.signature) {
            signatures.push(r.signature.clone());
        }
    }
    let k = g / pm1;
    let pp = u64::from(p);
    let statement_gcd = integral_gcd(p, g + pm1, 2 * pm1);
    let proof_gcd = integral_gcd(p, g, 2 * pm1);
    let (case, statement_order, proof_order, formula_agrees, resolution) = match k % 4 {
        3 => {
            let formula = pp * (g + pm1) / pm1;
            let n_formula = (k + 1) as u32;
            let cyclic_expected = gcd(p, n_formula / 2) == 1;
            let cyclic_found = at_max.iter().any(|r| r.r_class == RClass::Cyclic);
            let agrees = formula == order && cyclic_expected == cyclic_found;
            (
                MaximalOrderCase::ThreeModFour,
                Some(formula.to_string()),
                Some(formula.to_string()),
                Some(agrees),
                format!("p(g+p-1)/(p-1) = {formula} with n = {n_formula}; enumeration gives {order}"),
            )
        }
        0 => {
            let statement = ratio_string(pp * g, pm1);
            let proof = ratio_string(pp * g, 2 * pm1);
            let n_formula = k as u32;
            let derived = pp * k;
            let applies = gcd(p, n_formula / 2) == 1;
            let verdict = if applies {
                format!("n = g/(p-1) = {n_formula} gives order np = {derived}")
            } else {
                format!("gcd(p, n/2) != 1 for n = g/(p-1) = {n_formula}, so the case does not apply")
            };
            (
                MaximalOrderCase::ZeroModFour,
                Some(statement.clone()),
                Some(proof.clone()),
                applies.then_some(derived == order),
                format!(
                    "statement reads pg/(p-1) = {statement}, proof reads pg/(2(p-1)) = {proof}; \
                     {verdict}; enumeration gives {order}"
                ),
            )
        }
        _ => (
            MaximalOrderCase::Enumerated,
            None,
            None,
            None,
            format!("g/(p-1) = {k} is neither 0 nor 3 mod 4; order {order} from enumeration"),
        ),
    };
    Ok(Some(MaximalOrder {
        p,
        g,
        order,
        n,
        group_types,
        signatures,
        case,
        statement_order,
        proof_order,
        statement_gcd,
        proof_gcd,
        formula_agrees,
        resolution,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Agree,
    Discrepancy,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignatureSearch {
    pub family: Family,
    pub l: u32,
    pub signature: NecSignature,
    pub found: Option<bool>,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellResult {
    pub g: u64,
    pub n: u32,
    pub group: GroupSpec,
    pub r_class: RClass,
    pub predicate: bool,
    /// `None` when a search ran out of budget before deciding.
    pub oracle: Option<bool>,
    pub witness: Option<SurfaceKernelMap>,
    pub searches: Vec<SignatureSearch>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossValidationReport {
    pub p: u32,
    pub g_from: u64,
    pub g_to: u64,
    pub budget: u64,
    pub cells: Vec<CellResult>,
    pub skipped_odd: Vec<u64>,
    pub partial: bool,
}

impl CrossValidationReport {
    pub fn discrepancies(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.status == CellStatus::Discrepancy)
    }

    pub fn discrepancy_count(&self) -> usize {
        self.discrepancies().count()
    }
}

struct Cell {
    g: u64,
    n: u32,
    cand: CandidateGroup,
    signatures: Vec<(Family, u32, NecSignature)>,
}

fn cells_for(p: u32, g: u64) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    // l1 >= 1 bounds n by 2(g+p-1)/(p-1).
    let n_max = 2 * (g + u64::from(p) - 1) / u64::from(p - 1);
    let mut n = 4u32;
    while u64::from(n) <= n_max {
        let signatures: Vec<(Family, u32, NecSignature)> = Family::ALL
            .iter()
            .filter_map(|&f| paper_signature(p, n, g, f).transpose())
            .map(|r| r.map(|fs| (fs.family, fs.l, fs.signature)))
            .collect::<Result<_>>()?;
        if !signatures.is_empty() {
            for cand in candidate_groups(p, n)? {
                out.push(Cell {
                    g,
                    n,
                    cand,
                    signatures: signatures.clone(),
                });
            }
        }
        n += 4;
    }
    Ok(out)
}

fn run_cell(p: u32, cell: Cell, budget: u64) -> Result<CellResult> {
    let mut predicate = false;
    for class in &cell.cand.classes {
        predicate |= class.verdict(p, cell.n, cell.g)?.exists;
    }
    let mut searches = Vec::new();
    let mut witness = None;
    let mut undecided = false;
    for (family, l, signature) in cell.signatures {
        if witness.is_some() {
            break;
        }
        match find_first(&signature, &cell.cand.group, Requirement::PseudoRealPGonal { p }, budget) {
            Ok(outcome) => {
                searches.push(SignatureSearch {
                    family,
                    l,
                    signature,
                    found: Some(outcome.found.is_some()),
                    nodes: outcome.nodes,
                });
                witness = outcome.found;
            }
            Err(Error::BudgetExceeded { .. }) => {
                undecided = true;
                searches.push(SignatureSearch {
                    family,
                    l,
                    signature,
                    found: None,
                    nodes: budget,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let oracle = if witness.is_some() {
        Some(true)
    } else if undecided {
        None
    } else {
        Some(false)
    };
    let status = match oracle {
        None => CellStatus::BudgetExceeded,
        Some(o) if o == predicate => CellStatus::Agree,
        Some(_) => CellStatus::Discrepancy,
    };
    Ok(CellResult {
        g: cell.g,
        n: cell.n,
        group: cell.cand.group,
        r_class: cell.cand.r_class,
        predicate,
        oracle,
        witness,
        searches,
        status,
    })
}

/// Compares the existence criteria with exhaustive search for every even genus
/// in `g_from..=g_to`, every `n` with an integral family signature, and every
/// candidate group. Cells run in parallel; the report order is fixed.
pub fn cross_validate(
    p: u32,
    g_from: u64,
    g_to: u64,
    budget: u64,
    workers: Option<usize>,
) -> Result<CrossValidationReport> {
    require_odd_prime(p)?;
    if g_from > g_to {
        return Err(Error::InvalidParameter(format!("empty genus range {g_from}..{g_to}")));
    }
    let skipped_odd: Vec<u64> = (g_from..=g_to).filter(|g| g % 2 == 1).collect();
    let mut cells = Vec::new();
    for g in (g_from..=g_to).filter(|g| g % 2 == 0) {
        cells.extend(cells_for(p, g)?);
    }
    let run = || {
        cells
            .into_par_iter()
            .map(|c| run_cell(p, c, budget))
            .collect::<Result<Vec<_>>>()
    };
    let results = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let partial = results.iter().any(|c| c.status == CellStatus::BudgetExceeded);
    Ok(CrossValidationReport {
        p,
        g_from,
        g_to,
        budget,
        cells: results,
        skipped_odd,
        partial,
    })
}

/// `l` as an integer when the family signature exists and `l >= 1`.
pub fn integral_l(p: u32, n: u32, g: u64, family: Family) -> Option<u32> {
    let l = family.period_count(p, n, g);
    (l.is_integer() && l.is_positive()).then(|| l.to_integer().to_u32()).flatten()
}
