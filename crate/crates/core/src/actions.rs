//! Surface-kernel epimorphisms from NEC groups with signature `(1;-;[m1..mr])`
//! onto finite groups.
//!
//! Such a group has canonical generators `d, x1, ..., xr` with relations
//! `xi^mi = 1` and `x1 ... xr d^2 = 1`. A map is determined by the images of
//! those generators. This module checks maps, enumerates them exhaustively,
//! builds the explicit metacyclic actions, tests p-gonality and constructs the
//! index-2 extensions that rule out the two-period case.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num::{BigRational, BigInt};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_odd_prime, pow_mod};
use crate::error::{Error, Result};
use crate::groups::{ElementSet, FiniteGroup, GroupSpec, Word};
use crate::nec::{paper_signature, solve_orientable_genus, Family, NecSignature, Sign};

/// Default node budget for exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Images of the canonical generators of a `(1;-;[m1..mr])` group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceKernelMap {
    pub signature: NecSignature,
    pub group: GroupSpec,
    #[serde(rename = "d")]
    pub image_d: Word,
    #[serde(rename = "x")]
    pub image_x: Vec<Word>,
}

impl SurfaceKernelMap {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map serialization cannot fail")
    }

    /// Parses the JSON map format and checks that every word belongs to the group
    /// and that there is one `x` image per proper period.
    pub fn from_json(s: &str) -> Result<Self> {
        let map: SurfaceKernelMap = serde_json::from_str(s).map_err(|e| Error::Parse {
            offset: e.column(),
            message: e.to_string(),
        })?;
        map.group.validate()?;
        ensure_shape(&map.signature)?;
        if map.image_x.len() != map.signature.proper_periods.len() {
            return Err(Error::InvalidParameter(format!(
                "{} x-images for {} proper periods",
                map.image_x.len(),
                map.signature.proper_periods.len()
            )));
        }
        for w in map.image_x.iter().chain(std::iter::once(&map.image_d)) {
            if !map.group.is_word(w) {
                return Err(Error::MalformedWord {
                    group: map.group.to_string(),
                    word: w.0.clone(),
                });
            }
        }
        Ok(map)
    }

    fn bind(&self, group: &FiniteGroup) -> Result<(usize, Vec<usize>)> {
        let d = group.index_of(&self.image_d)?;
        let xs = self
            .image_x
            .iter()
            .map(|w| group.index_of(w))
            .collect::<Result<Vec<_>>>()?;
        Ok((d, xs))
    }

    /// `G+`: the image of the orientation-preserving half, generated by the
    /// `x` images, `d^2` and the `d`-conjugates of the `x` images.
    pub fn orientation_subgroup(&self) -> Result<(FiniteGroup, ElementSet)> {
        let group = self.group.table()?;
        let (d, xs) = self.bind(&group)?;
        let plus = orientation_subgroup(&group, d, &xs);
        Ok((group, plus))
    }
}

fn ensure_shape(sig: &NecSignature) -> Result<()> {
    if sig.genus != 1 || sig.sign != Sign::Minus || !sig.period_cycles.is_empty() || !sig.is_valid() {
        return Err(Error::UnsupportedSignature(sig.to_string()));
    }
    Ok(())
}

fn orientation_subgroup(group: &FiniteGroup, d: usize, xs: &[usize]) -> ElementSet {
    let mut gens: Vec<usize> = xs.to_vec();
    gens.push(group.mul(d, d));
    gens.extend(xs.iter().map(|&x| group.conj(x, d)));
    group.subgroup(&gens)
}

/// Whether the map extends over the index-2 overgroup `(0;+;[2];{(m1,m2)})` of a
/// two-period group `(1;-;[m1,m2])`.
///
/// With canonical reflections `c0, c1, c2` and elliptic `x'` of the overgroup,
/// `x1 = c0 c1`, `x2 = c1 c2`, `d = x' c0`. Conjugation by `c0` acts on the
/// two-period group by `x1 -> x1^-1`, `d -> d^-1`, and the kernel is normal in
/// the overgroup iff this descends to an automorphism of `G`.
fn extends_over_two_period_overgroup(group: &FiniteGroup, d: usize, x1: usize) -> bool {
    let gens = [x1, d];
    let images = [group.inv(x1), group.inv(d)];
    group.extend_homomorphism(&gens, group, &images).is_some()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckFailure {
    LongRelation,
    PeriodOrder { index: usize, expected: u32, found: u32 },
    NotSurjective { generated: usize },
    OrientationIndex { index: usize },
    GlideReflectionPreservesOrientation,
    GenusNotIntegral,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub valid: bool,
    pub genus: Option<u64>,
    /// No involution of `G` lies outside `G+`.
    pub pseudo_real_in_group: bool,
    /// Two-period signatures only: whether the action extends to the index-2
    /// overgroup, which always adds an anticonformal involution.
    pub extends_to_overgroup: Option<bool>,
    /// Valid, no anticonformal involution in `G`, and no extension to the
    /// overgroup.
    pub pseudo_real: bool,
    pub orientation_index: usize,
    pub failures: Vec<CheckFailure>,
}

pub fn check(map: &SurfaceKernelMap) -> Result<CheckReport> {
    ensure_shape(&map.signature)?;
    let group = map.group.table()?;
    check_with(&group, map)
}

fn check_with(group: &FiniteGroup, map: &SurfaceKernelMap) -> Result<CheckReport> {
    ensure_shape(&map.signature)?;
    if map.image_x.len() != map.signature.proper_periods.len() {
        return Err(Error::InvalidParameter(format!(
            "{} x-images for signature {}",
            map.image_x.len(),
            map.signature
        )));
    }
    let (d, xs) = map.bind(group)?;
    let mut failures = Vec::new();

    let product = xs.iter().fold(FiniteGroup::IDENTITY, |acc, &x| group.mul(acc, x));
    if group.mul(product, group.mul(d, d)) != FiniteGroup::IDENTITY {
        failures.push(CheckFailure::LongRelation);
    }
    for (index, (&x, &m)) in xs.iter().zip(&map.signature.proper_periods).enumerate() {
        let found = group.element_order(x);
        if found != m {
            failures.push(CheckFailure::PeriodOrder { index, expected: m, found });
        }
    }
    let mut all = xs.clone();
    all.push(d);
    let generated = group.subgroup(&all).len();
    if generated != group.order() {
        failures.push(CheckFailure::NotSurjective { generated });
    }
    let plus = orientation_subgroup(group, d, &xs);
    let orientation_index = group.order() / plus.len();
    if orientation_index != 2 {
        failures.push(CheckFailure::OrientationIndex { index: orientation_index });
    }
    if plus.contains(d) {
        failures.push(CheckFailure::GlideReflectionPreservesOrientation);
    }
    let genus = match map.signature.genus_of_surface_kernel(group.order() as u64) {
        Ok(g) => g,
        Err(Error::DegenerateSignature(_)) => None,
        Err(e) => return Err(e),
    };
    if genus.is_none() {
        failures.push(CheckFailure::GenusNotIntegral);
    }
    let valid = failures.is_empty();
    let pseudo_real_in_group = valid && group.involutions_outside(&plus)?.is_empty();
    let extends_to_overgroup = (valid && xs.len() == 2)
        .then(|| extends_over_two_period_overgroup(group, d, xs[0]));
    let pseudo_real = pseudo_real_in_group && extends_to_overgroup != Some(true);
    Ok(CheckReport {
        valid,
        genus,
        pseudo_real_in_group,
        extends_to_overgroup,
        pseudo_real,
        orientation_index,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of search nodes (partial assignments plus `d` candidates).
    pub budget: u64,
    /// Worker threads for [`enumerate`]; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            workers: None,
        }
    }
}

struct NodeCounter {
    used: AtomicU64,
    budget: u64,
}

impl NodeCounter {
    fn new(budget: u64) -> Self {
        Self {
            used: AtomicU64::new(0),
            budget,
        }
    }

    fn tick(&self) -> Result<()> {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.budget {
            Err(Error::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }

    fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed).min(self.budget)
    }
}

/// Backtracking over `x` images of exact order `m_i`, with `d` taken from the
/// square roots of `(x1 ... xr)^-1`.
struct SearchSpace<'g> {
    group: &'g FiniteGroup,
    candidates: Vec<Vec<usize>>,
    roots: Vec<Vec<usize>>,
}

impl<'g> SearchSpace<'g> {
    fn new(group: &'g FiniteGroup, periods: &[u32]) -> Self {
        Self {
            group,
            candidates: periods.iter().map(|&m| group.elements_of_order(m)).collect(),
            roots: group.square_roots(),
        }
    }

    fn walk<F>(
        &self,
        xs: &mut Vec<usize>,
        prefix: usize,
        nodes: &NodeCounter,
        stop: &AtomicBool,
        visit: &mut F,
    ) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[usize], usize) -> ControlFlow<()>,
    {
        if stop.load(Ordering::Relaxed) {
            return Ok(ControlFlow::Break(()));
        }
        let level = xs.len();
        if level == self.candidates.len() {
            for &d in &self.roots[self.group.inv(prefix)] {
                nodes.tick()?;
                if visit(xs, d).is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
            return Ok(ControlFlow::Continue(()));
        }
        for &x in &self.candidates[level] {
            nodes.tick()?;
            xs.push(x);
            let flow = self.walk(xs, self.group.mul(prefix, x), nodes, stop, visit)?;
            xs.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Cheap validity test used inside searches: orders and the long relation
/// already hold by construction.
fn leaf_report(group: &FiniteGroup, xs: &[usize], d: usize) -> Option<LeafInfo> {
    let mut all = xs.to_vec();
    all.push(d);
    if group.subgroup(&all).len() != group.order() {
        return None;
    }
    let plus = orientation_subgroup(group, d, xs);
    if plus.len() * 2 != group.order() || plus.contains(d) {
        return None;
    }
    let pseudo_real_in_group = (0..group.order())
        .all(|g| group.element_order(g) != 2 || plus.contains(g));
    let extends = xs.len() == 2 && extends_over_two_period_overgroup(group, d, xs[0]);
    Some(LeafInfo {
        plus,
        pseudo_real: pseudo_real_in_group && !extends,
    })
}

struct LeafInfo {
    plus: ElementSet,
    pseudo_real: bool,
}

fn make_map(group: &FiniteGroup, signature: &NecSignature, xs: &[usize], d: usize) -> SurfaceKernelMap {
    SurfaceKernelMap {
        signature: signature.clone(),
        group: group.spec().clone(),
        image_d: group.word(d).clone(),
        image_x: xs.iter().map(|&x| group.word(x).clone()).collect(),
    }
}

fn ensure_searchable(signature: &NecSignature) -> Result<()> {
    ensure_shape(signature)?;
    if signature.is_degenerate()? {
        return Err(Error::DegenerateSignature(signature.to_string()));
    }
    Ok(())
}

/// Every surface-kernel map from `signature` onto `spec` (pseudo-real ones only
/// when requested), in lexicographic order of `(x1, ..., xr, d)`.
pub fn enumerate(
    signature: &NecSignature,
    spec: &GroupSpec,
    want_pseudo_real: bool,
    config: &SearchConfig,
) -> Result<Vec<SurfaceKernelMap>> {
    ensure_searchable(signature)?;
    let group = spec.table()?;
    if signature.genus_of_surface_kernel(group.order() as u64)?.is_none() {
        return Ok(Vec::new());
    }
    let space = SearchSpace::new(&group, &signature.proper_periods);
    let nodes = NodeCounter::new(config.budget);
    let stop = AtomicBool::new(false);

    let run_branch = |first: Option<usize>| -> Result<Vec<SurfaceKernelMap>> {
        let mut found = Vec::new();
        let mut visit = |xs: &[usize], d: usize| {
            if let Some(info) = leaf_report(&group, xs, d) {
                if !want_pseudo_real || info.pseudo_real {
                    found.push(make_map(&group, signature, xs, d));
                }
            }
            ControlFlow::Continue(())
        };
        let mut xs = Vec::new();
        let mut prefix = FiniteGroup::IDENTITY;
        if let Some(x) = first {
            nodes.tick()?;
            xs.push(x);
            prefix = x;
        }
        let result = space.walk(&mut xs, prefix, &nodes, &stop, &mut visit);
        if result.is_err() {
            stop.store(true, Ordering::Relaxed);
        }
        let _ = result?;
        Ok(found)
    };

    let branches: Vec<Result<Vec<SurfaceKernelMap>>> = if space.candidates.is_empty() {
        vec![run_branch(None)]
    } else {
        let firsts = &space.candidates[0];
        let par = || firsts.par_iter().map(|&x| run_branch(Some(x))).collect::<Vec<_>>();
        match config.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?
                .install(par),
            None => par(),
        }
    };
    let mut out = Vec::new();
    for b in branches {
        out.extend(b?);
    }
    Ok(out)
}

/// What an existence search requires of a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    Valid,
    PseudoReal,
    /// Pseudo-real, with a normal order-`p` subgroup whose quotient has genus 0.
    PseudoRealPGonal { p: u32 },
}

/// Outcome of a budgeted existence search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub found: Option<SurfaceKernelMap>,
    pub nodes: u64,
}

/// First map in lexicographic order meeting `req`, with early exit. Sequential
/// and deterministic.
pub fn find_first(
    signature: &NecSignature,
    spec: &GroupSpec,
    req: Requirement,
    budget: u64,
) -> Result<SearchOutcome> {
    ensure_searchable(signature)?;
    let group = spec.table()?;
    if signature.genus_of_surface_kernel(group.order() as u64)?.is_none() {
        return Ok(SearchOutcome { found: None, nodes: 0 });
    }
    let space = SearchSpace::new(&group, &signature.proper_periods);
    let nodes = NodeCounter::new(budget);
    let stop = AtomicBool::new(false);
    let mut found = None;
    let mut visit = |xs: &[usize], d: usize| {
        let Some(info) = leaf_report(&group, xs, d) else {
            return ControlFlow::Continue(());
        };
        let ok = match req {
            Requirement::Valid => true,
            Requirement::PseudoReal => info.pseudo_real,
            Requirement::PseudoRealPGonal { p } => {
                info.pseudo_real
                    && find_p_gonal_subgroup(&group, &signature.proper_periods, xs, &info.plus, p)
                        .is_some()
            }
        };
        if ok {
            found = Some(make_map(&group, signature, xs, d));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    };
    let _ = space.walk(&mut Vec::new(), FiniteGroup::IDENTITY, &nodes, &stop, &mut visit)?;
    Ok(SearchOutcome {
        found,
        nodes: nodes.used(),
    })
}

fn cancelling_pairs(spec: &GroupSpec, pairs: usize) -> Vec<Word> {
    (0..pairs).flat_map(|_| [spec.xy(1, 0), spec.xy(-1, 0)]).collect()
}

fn check_metacyclic_params(p: u32, n: u32, r: u32, l: u32) -> Result<GroupSpec> {
    if !is_odd_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not an odd prime")));
    }
    if n == 0 || !n.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!("n = {n} is not a multiple of 4")));
    }
    if l < 2 {
        return Err(Error::InvalidParameter(format!(
            "l = {l}: the period count must be an integer > 1"
        )));
    }
    GroupSpec::metacyclic(n, p, r)
        .map_err(|e| Error::InvalidParameter(format!("inconsistent presentation: {e}")))
}

/// The action on `(1;-;[p x l, n/2])` onto `M(n,p,r)`: cancelling pairs
/// `(x, x^-1)` (closed by `x, x, x^-2` when `l` is odd), `x_{l+1} -> y^2`,
/// `d -> y^-1`.
pub fn construct_thm5(p: u32, n: u32, r: u32, l: u32) -> Result<SurfaceKernelMap> {
    let spec = check_metacyclic_params(p, n, r, l)?;
    let mut xs = if l.is_multiple_of(2) {
        cancelling_pairs(&spec, l as usize / 2)
    } else {
        let mut xs = cancelling_pairs(&spec, (l as usize - 3) / 2);
        xs.extend([spec.xy(1, 0), spec.xy(1, 0), spec.xy(-2, 0)]);
        xs
    };
    xs.push(spec.xy(0, 2));
    let mut periods = vec![p; l as usize];
    periods.push(n / 2);
    Ok(SurfaceKernelMap {
        signature: NecSignature::non_orientable(1, periods),
        image_d: spec.xy(0, -1),
        group: spec,
        image_x: xs,
    })
}

/// The action on `(1;-;[p x l, np/2])` onto `M(n,p,r)` with `r = 1` or `p-1`:
/// the last elliptic generator goes to `x^-1 y^2` (`l` odd) or `x^-2 y^2`
/// (`l` even), both of order `np/2` when `gcd(p, n/2) = 1`.
pub fn construct_thm7(p: u32, n: u32, r: u32, l: u32) -> Result<SurfaceKernelMap> {
    let spec = check_metacyclic_params(p, n, r, l)?;
    if r != 1 && r != p - 1 {
        return Err(Error::InvalidParameter(format!("r = {r} is neither 1 nor p-1")));
    }
    if gcd(p, n / 2) != 1 {
        return Err(Error::InvalidParameter(format!(
            "gcd(p, n/2) = gcd({p}, {}) != 1: no element of order np/2",
            n / 2
        )));
    }
    let mut xs = if l % 2 == 1 {
        let mut xs = cancelling_pairs(&spec, (l as usize - 1) / 2);
        xs.extend([spec.xy(1, 0), spec.xy(-1, 2)]);
        xs
    } else {
        let mut xs = cancelling_pairs(&spec, (l as usize - 2) / 2);
        xs.extend([spec.xy(1, 0), spec.xy(1, 0), spec.xy(-2, 2)]);
        xs
    };
    xs.shrink_to_fit();
    let mut periods = vec![p; l as usize];
    periods.push(n / 2 * p);
    Ok(SurfaceKernelMap {
        signature: NecSignature::non_orientable(1, periods),
        image_d: spec.xy(0, -1),
        group: spec,
        image_x: xs,
    })
}

/// Signature of the preimage of a normal subgroup `N <= G+`.
///
/// Each `x_i` whose image has order `k` in `G/N` contributes `[G:N]/k` periods
/// equal to `m_i/k`; the genus follows from area multiplicativity.
pub fn induced_quotient_signature(map: &SurfaceKernelMap, normal_sub: &ElementSet) -> Result<NecSignature> {
    ensure_shape(&map.signature)?;
    let group = map.group.table()?;
    let (d, xs) = map.bind(&group)?;
    if normal_sub.len() == group.order() && group.is_subgroup(normal_sub) {
        return Ok(map.signature.clone());
    }
    let plus = orientation_subgroup(&group, d, &xs);
    induced_signature_with(&group, &map.signature.proper_periods, &xs, &plus, normal_sub)
}

fn induced_signature_with(
    group: &FiniteGroup,
    periods: &[u32],
    xs: &[usize],
    plus: &ElementSet,
    normal_sub: &ElementSet,
) -> Result<NecSignature> {
    if !group.is_normal(normal_sub) {
        return Err(Error::NotNormal);
    }
    if normal_sub.iter().any(|h| !plus.contains(h)) {
        return Err(Error::InvalidParameter(
            "normal subgroup is not contained in the orientation-preserving subgroup".into(),
        ));
    }
    let index = group.order() / normal_sub.len();
    let mut out_periods = Vec::new();
    for (&x, &m) in xs.iter().zip(periods) {
        let mut k = 1u32;
        let mut acc = x;
        while !normal_sub.contains(acc) {
            acc = group.mul(acc, x);
            k += 1;
        }
        let value = m / k;
        if value > 1 {
            out_periods.extend(std::iter::repeat_n(value, index / k as usize));
        }
    }
    let delta = NecSignature::non_orientable(1, periods.to_vec());
    let area = delta.normalized_area()? * BigRational::from_integer(BigInt::from(index));
    let genus = solve_orientable_genus(&area, &out_periods).ok_or_else(|| {
        Error::Internal(format!("non-integral genus for the preimage of a normal subgroup of {}", group.spec()))
    })?;
    Ok(NecSignature::orientable(genus, out_periods))
}

/// A normal order-`p` subgroup with genus-0 quotient, and the branch count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PGonalWitness {
    pub map: SurfaceKernelMap,
    pub h_generator: Word,
    pub quotient_signature: NecSignature,
    pub q: u32,
}

fn find_p_gonal_subgroup(
    group: &FiniteGroup,
    periods: &[u32],
    xs: &[usize],
    plus: &ElementSet,
    p: u32,
) -> Option<(usize, NecSignature)> {
    let mut seen: Vec<ElementSet> = Vec::new();
    for h in group.elements_of_order(p) {
        let sub = group.subgroup(&[h]);
        if seen.contains(&sub) {
            continue;
        }
        seen.push(sub.clone());
        if !group.is_normal(&sub) || sub.iter().any(|e| !plus.contains(e)) {
            continue;
        }
        let Ok(sig) = induced_signature_with(group, periods, xs, plus, &sub) else {
            continue;
        };
        if sig.genus == 0 && !sig.proper_periods.is_empty() && sig.proper_periods.iter().all(|&m| m == p) {
            return Some((h, sig));
        }
    }
    None
}

/// Looks for the p-gonal subgroup of a valid map.
pub fn verify_p_gonal(map: &SurfaceKernelMap, p: u32) -> Result<Option<PGonalWitness>> {
    ensure_shape(&map.signature)?;
    let group = map.group.table()?;
    let (d, xs) = map.bind(&group)?;
    let plus = orientation_subgroup(&group, d, &xs);
    Ok(find_p_gonal_subgroup(&group, &map.signature.proper_periods, &xs, &plus, p).map(|(h, sig)| {
        PGonalWitness {
            map: map.clone(),
            h_generator: group.word(h).clone(),
            q: sig.proper_periods.len() as u32,
            quotient_signature: sig,
        }
    }))
}

/// Images of the overgroup generators under an extended action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OvergroupImages {
    pub c0: Word,
    pub c1: Word,
    pub c2: Word,
    pub elliptic: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionEvidence {
    pub base_map: SurfaceKernelMap,
    pub extended_signature: NecSignature,
    pub extended_group: GroupSpec,
    pub images: OvergroupImages,
    /// An anticonformal involution of the extended action (the image of `c0`).
    pub involution: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum L1Obstruction {
    Extended(ExtensionEvidence),
    /// `s x s = x^-1, s y s = y^-1` is not an automorphism because `r^2 != 1 mod p`.
    InconsistentPresentation { group: GroupSpec, r: u32 },
    /// The base map admits no extension of the stated shape.
    NotExtendable { base_map: SurfaceKernelMap },
    /// The two-period signature has no surface-kernel map onto the group at all.
    NoMap { signature: NecSignature, group: GroupSpec },
}

/// Extends a two-period action to the overgroup `(0;+;[2];{(m1, m2)})`.
///
/// The base map is the first map (lexicographically) on `(1;-;[p, m])` onto
/// `group` with no anticonformal involution inside `group`, where `m = n/2`
/// for family i and `np/2` for family ii.
pub fn l1_obstruction(p: u32, n: u32, family: Family, group: &GroupSpec) -> Result<L1Obstruction> {
    if !is_odd_prime(p) || n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("invalid (p, n) = ({p}, {n})")));
    }
    if group.order() != (n as usize) * (p as usize) {
        return Err(Error::InvalidParameter(format!("{group} does not have order np = {}", n * p)));
    }
    let extended = match group {
        GroupSpec::Cyclic { order } => GroupSpec::dihedral(*order)?,
        GroupSpec::Metacyclic { p: gp, r, .. } => {
            if pow_mod(u64::from(*r), 2, u64::from(*gp)) != 1 {
                return Ok(L1Obstruction::InconsistentPresentation {
                    group: group.clone(),
                    r: *r,
                });
            }
            GroupSpec::inverting_extension(group.clone())?
        }
        other => return Err(Error::InvalidParameter(format!("{other} is not cyclic or metacyclic"))),
    };
    let signature = NecSignature::non_orientable(1, vec![p, family.tail_period(p, n)]);
    let base = find_first(&signature, group, Requirement::Valid, DEFAULT_BUDGET)?;
    // Prefer a map that has no anticonformal involution inside the group.
    let all = enumerate(&signature, group, false, &SearchConfig::default())?;
    let g = group.table()?;
    let found = all
        .into_iter()
        .find(|m| check_with(&g, m).map(|r| r.pseudo_real_in_group).unwrap_or(false))
        .or(base.found);
    let Some(base_map) = found else {
        return Ok(L1Obstruction::NoMap {
            signature,
            group: group.clone(),
        });
    };
    Ok(match extend_two_period(&base_map, &extended)? {
        Some(evidence) => L1Obstruction::Extended(evidence),
        None => L1Obstruction::NotExtendable { base_map },
    })
}

/// Searches `u` in `G` such that `c0 -> s u` extends the map on the two-period
/// group to its overgroup inside `extended` (whose index-2 part is `G`).
pub fn extend_two_period(map: &SurfaceKernelMap, extended: &GroupSpec) -> Result<Option<ExtensionEvidence>> {
    ensure_shape(&map.signature)?;
    if map.image_x.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "{} is not a two-period signature (l != 1)",
            map.signature
        )));
    }
    let e = extended.table()?;
    let embed = |w: &Word| e.index_of(&extended.with_s(0, w));
    let d = embed(&map.image_d)?;
    let x1 = embed(&map.image_x[0])?;
    let x2 = embed(&map.image_x[1])?;
    let (m1, m2) = (map.signature.proper_periods[0], map.signature.proper_periods[1]);
    for u in map.group.elements() {
        let c0 = e.index_of(&extended.with_s(1, &u))?;
        let c1 = e.mul(c0, x1);
        let c2 = e.mul(c1, x2);
        let elliptic = e.mul(d, c0);
        let is_inv = |a: usize| e.mul(a, a) == FiniteGroup::IDENTITY;
        let ok = is_inv(c0)
            && is_inv(c1)
            && is_inv(c2)
            && is_inv(elliptic)
            && elliptic != FiniteGroup::IDENTITY
            && e.element_order(e.mul(c0, c1)) == m1
            && e.element_order(e.mul(c1, c2)) == m2
            && c2 == e.conj(c0, elliptic)
            && e.subgroup(&[c0, c1, elliptic]).len() == e.order();
        if ok {
            return Ok(Some(ExtensionEvidence {
                base_map: map.clone(),
                extended_signature: NecSignature::new(0, Sign::Plus, vec![2], vec![vec![m1, m2]]),
                extended_group: extended.clone(),
                images: OvergroupImages {
                    c0: e.word(c0).clone(),
                    c1: e.word(c1).clone(),
                    c2: e.word(c2).clone(),
                    elliptic: e.word(elliptic).clone(),
                },
                involution: e.word(c0).clone(),
            }));
        }
    }
    Ok(None)
}

/// Convenience: the family signature for `(p, n, g)` as a plain signature.
pub fn family_signature(p: u32, n: u32, g: u64, family: Family) -> Result<Option<NecSignature>> {
    Ok(paper_signature(p, n, g, family)?.map(|f| f.signature))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(sig: &str, group: &str, d: Word, xs: Vec<Word>) -> SurfaceKernelMap {
        SurfaceKernelMap {
            signature: sig.parse().unwrap(),
            group: group.parse().unwrap(),
            image_d: d,
            image_x: xs,
        }
    }

    fn t(e: u32) -> Word {
        Word(vec![e])
    }

    fn c12_map() -> SurfaceKernelMap {
        map("(1;-;[3,3,2])", "C12", t(3), vec![t(4), t(8), t(6)])
    }

    fn m432_map() -> SurfaceKernelMap {
        let m: GroupSpec = "M(n=4,p=3,r=2)".parse().unwrap();
        map("(1;-;[3,3,2])", "M(n=4,p=3,r=2)", m.xy(0, -1), vec![m.xy(1, 0), m.xy(-1, 0), m.xy(0, 2)])
    }

    #[test]
    fn check_examples() {
        let r = check(&c12_map()).unwrap();
        assert!(r.valid && r.pseudo_real, "{r:?}");
        assert_eq!(r.genus, Some(6));
        assert_eq!(r.extends_to_overgroup, None);

        let bad = map("(1;-;[3,3,2])", "C12", t(2), vec![t(4), t(8), t(6)]);
        let r = check(&bad).unwrap();
        assert!(!r.valid);
        assert!(r.failures.contains(&CheckFailure::GlideReflectionPreservesOrientation));

        let r = check(&m432_map()).unwrap();
        assert!(r.valid && r.pseudo_real);
        assert_eq!(r.genus, Some(6));
    }

    #[test]
    fn check_reports_each_failure() {
        let wrong_order = map("(1;-;[3,3,2])", "C12", t(3), vec![t(2), t(8), t(6)]);
        let r = check(&wrong_order).unwrap();
        assert!(r.failures.contains(&CheckFailure::PeriodOrder { index: 0, expected: 3, found: 6 }));
        assert!(r.failures.contains(&CheckFailure::LongRelation));

        let not_onto = map("(1;-;[3,3,2])", "C24", t(6), vec![t(8), t(16), t(12)]);
        let r = check(&not_onto).unwrap();
        assert!(r.failures.iter().any(|f| matches!(f, CheckFailure::NotSurjective { .. })));

        let wrong_shape = map("(2;-;[3,3,2])", "C12", t(3), vec![t(4), t(8), t(6)]);
        assert!(matches!(check(&wrong_shape), Err(Error::UnsupportedSignature(_))));
    }

    #[test]
    fn json_format_is_stable() {
        let json = c12_map().to_json();
        assert_eq!(json, r#"{"signature":"(1;-;[3,3,2])","group":"C12","d":[3],"x":[[4],[8],[6]]}"#);
        assert_eq!(SurfaceKernelMap::from_json(&json).unwrap(), c12_map());
        assert!(SurfaceKernelMap::from_json(r#"{"signature":"(1;-;[3])","group":"C12","d":[3],"x":[[4],[8]]}"#).is_err());
        assert!(SurfaceKernelMap::from_json(r#"{"signature":"(1;-;[3])","group":"C12","d":[13],"x":[[4]]}"#).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let cfg = SearchConfig::default();
        let found = enumerate(&"(1;-;[3,3,2])".parse().unwrap(), &"C12".parse().unwrap(), true, &cfg).unwrap();
        assert!(found.contains(&c12_map()));
        let found = enumerate(&"(1;-;[3,4])".parse().unwrap(), &"C24".parse().unwrap(), true, &cfg).unwrap();
        assert!(found.is_empty());
        let found = enumerate(&"(1;-;[3,3,2])".parse().unwrap(), &"D6".parse().unwrap(), true, &cfg).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn enumerate_respects_budget() {
        let cfg = SearchConfig { budget: 3, workers: Some(1) };
        let r = enumerate(&"(1;-;[3,3,2])".parse().unwrap(), &"C12".parse().unwrap(), true, &cfg);
        assert_eq!(r, Err(Error::BudgetExceeded { budget: 3 }));
    }

    #[test]
    fn thm5_examples() {
        let m = construct_thm5(3, 4, 2, 2).unwrap();
        assert_eq!(m, m432_map());
        let m = construct_thm5(3, 4, 2, 3).unwrap();
        let spec = m.group.clone();
        assert_eq!(m.image_x, vec![spec.xy(1, 0), spec.xy(1, 0), spec.xy(-2, 0), spec.xy(0, 2)]);
        let r = check(&m).unwrap();
        assert!(r.valid && r.pseudo_real);
        assert_eq!(r.genus, Some(10));
        assert!(construct_thm5(3, 4, 2, 1).is_err());
        assert!(construct_thm5(5, 4, 2, 0).is_err());
        assert!(construct_thm5(3, 6, 2, 2).is_err());
    }

    #[test]
    fn thm7_examples() {
        let m = construct_thm7(3, 4, 2, 2).unwrap();
        let s = m.group.clone();
        assert_eq!(m.signature.to_string(), "(1;-;[3,3,6])");
        assert_eq!(m.image_x, vec![s.xy(1, 0), s.xy(1, 0), s.xy(-2, 2)]);
        assert_eq!(m.image_d, s.xy(0, -1));
        assert_eq!(check(&m).unwrap().genus, Some(8));

        let m = construct_thm7(3, 4, 1, 3).unwrap();
        let s = m.group.clone();
        assert_eq!(m.signature.to_string(), "(1;-;[3,3,3,6])");
        assert_eq!(m.image_x, vec![s.xy(1, 0), s.xy(-1, 0), s.xy(1, 0), s.xy(-1, 2)]);
        let r = check(&m).unwrap();
        assert!(r.valid && r.pseudo_real);
        assert_eq!(r.genus, Some(12));

        assert!(construct_thm7(3, 12, 2, 2).is_err());
        assert!(construct_thm7(3, 4, 2, 1).is_err());
        assert!(construct_thm7(5, 4, 2, 2).is_err());
    }

    #[test]
    fn induced_signature_examples() {
        let m = c12_map();
        let g = m.group.table().unwrap();
        let n = g.subgroup(&[4]);
        let sig = induced_quotient_signature(&m, &n).unwrap();
        assert_eq!(sig.to_string(), "(0;+;[3,3,3,3,3,3,3,3])");
        let whole = g.subgroup(&[1]);
        assert_eq!(induced_quotient_signature(&m, &whole).unwrap(), m.signature);

        let m = m432_map();
        let g = m.group.table().unwrap();
        let x = g.index_of(&m.group.xy(1, 0)).unwrap();
        let sig = induced_quotient_signature(&m, &g.subgroup(&[x])).unwrap();
        assert_eq!(sig, NecSignature::orientable(0, vec![3; 8]));

        // y x y^-1 = x^2 is not in <y>.
        let y = g.index_of(&m.group.xy(0, 1)).unwrap();
        assert_eq!(induced_quotient_signature(&m, &g.subgroup(&[y])), Err(Error::NotNormal));
    }

    #[test]
    fn p_gonal_examples() {
        let w = verify_p_gonal(&c12_map(), 3).unwrap().unwrap();
        assert_eq!(w.q, 8);
        assert_eq!(w.h_generator, t(4));
        let w = verify_p_gonal(&m432_map(), 3).unwrap().unwrap();
        assert_eq!(w.q, 8);
        // A genus-2 action of C4 on (1;-;[2,2,2]) has no order-3 subgroup at all.
        let hyper = map("(1;-;[2,2,2])", "C4", t(1), vec![t(2), t(2), t(2)]);
        assert_eq!(check(&hyper).unwrap().genus, Some(2));
        assert!(check(&hyper).unwrap().valid);
        assert_eq!(verify_p_gonal(&hyper, 3).unwrap(), None);
    }

    #[test]
    fn l1_examples() {
        match l1_obstruction(3, 8, Family::I, &"C24".parse().unwrap()).unwrap() {
            L1Obstruction::Extended(ev) => {
                assert_eq!(ev.extended_group.to_string(), "D24");
                assert_eq!(ev.involution.0[0], 1);
                assert_eq!(ev.extended_signature.to_string(), "(0;+;[2];{(3,4)})");
            }
            other => panic!("{other:?}"),
        }
        match l1_obstruction(3, 4, Family::II, &"M(n=4,p=3,r=1)".parse().unwrap()).unwrap() {
            L1Obstruction::Extended(ev) => {
                assert_eq!(ev.extended_group.to_string(), "Ext2(M(n=4,p=3,r=1))");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            l1_obstruction(5, 4, Family::I, &"M(n=4,p=5,r=2)".parse().unwrap()).unwrap(),
            L1Obstruction::InconsistentPresentation { r: 2, .. }
        ));
        let three = construct_thm5(3, 4, 2, 2).unwrap();
        assert!(extend_two_period(&three, &"Ext2(M(n=4,p=3,r=2))".parse().unwrap()).is_err());
    }
}
