//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons only.
//!
//! Run with `cargo test -p pgonal --test acceptance`. The process exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use pgonal::actions::{
    check, construct_thm5, construct_thm7, enumerate, l1_obstruction, verify_p_gonal, L1Obstruction, SearchConfig,
    SurfaceKernelMap,
};
use pgonal::arith::{gcd, pow_mod};
use pgonal::classify::{candidate_groups, classify_genus, cross_validate, maximal_order, CrossValidationReport};
use pgonal::cli::{run, EXIT_OK};
use pgonal::nec::{paper_signature, Family, NecSignature};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

/// Pseudo-real maps gathered by criteria 2 to 4, re-examined by criterion 5.
type Found = Vec<SurfaceKernelMap>;

type Criterion = Box<dyn FnOnce(&mut Found) -> Verdict>;

fn listed(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(" [{}]", items.join(" "))
    }
}

fn riemann_hurwitz() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for p in [3u32, 5, 7] {
        for n in (4..=32u32).step_by(4) {
            for family in Family::ALL {
                for l in 1..=8u64 {
                    let half = l * u64::from(n) * u64::from(p - 1) / 2;
                    let g = match family {
                        Family::I => half.checked_sub(u64::from(p - 1)),
                        Family::II => Some(half),
                    };
                    let Some(g) = g else { continue };
                    checked += 1;
                    let ok = match paper_signature(p, n, g, family) {
                        Ok(Some(fs)) => {
                            u64::from(fs.l) == l
                                && fs.signature.genus_of_surface_kernel(u64::from(n * p)).ok() == Some(Some(g))
                        }
                        _ => false,
                    };
                    if !ok {
                        bad.push(format!("(p={p}, n={n}, {family}, l={l})"));
                    }
                }
            }
        }
    }
    Verdict::new(bad.is_empty(), format!("{checked} signatures, {} mismatches{}", bad.len(), listed(&bad)))
}

fn constructor_soundness(found: &mut Found) -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for p in [3u32, 5] {
        for n in (4..=120 / p).step_by(4) {
            for r in 1..p {
                if pow_mod(u64::from(r), u64::from(n), u64::from(p)) != 1 {
                    continue;
                }
                for l in 2..=6 {
                    let mut maps = vec![construct_thm5(p, n, r, l)];
                    if (r == 1 || r == p - 1) && gcd(p, n / 2) == 1 {
                        maps.push(construct_thm7(p, n, r, l));
                    }
                    for map in maps {
                        checked += 1;
                        let ok = map.as_ref().is_ok_and(|m| {
                            let rep = check(m).ok();
                            let g = rep.as_ref().and_then(|r| r.genus);
                            let gonal = verify_p_gonal(m, p).ok().flatten();
                            let q_ok = match (g, &gonal) {
                                (Some(g), Some(w)) => {
                                    w.quotient_signature.genus == 0
                                        && u64::from(w.q) * u64::from(p - 1) == 2 * (g + u64::from(p) - 1)
                                }
                                _ => false,
                            };
                            rep.is_some_and(|r| r.valid && r.pseudo_real) && q_ok
                        });
                        if ok {
                            found.push(map.unwrap());
                        } else {
                            bad.push(format!("(p={p}, n={n}, r={r}, l={l})"));
                        }
                    }
                }
            }
        }
    }
    Verdict::new(bad.is_empty(), format!("{checked} constructed maps, {} failures{}", bad.len(), listed(&bad)))
}

fn describe(report: &CrossValidationReport) -> String {
    let cells: Vec<String> = report
        .discrepancies()
        .map(|c| {
            let search = match c.oracle {
                Some(true) => "found",
                Some(false) => "none",
                None => "undecided",
            };
            format!("g={} n={} {} (criteria {}, search {search})", c.g, c.n, c.group, c.predicate)
        })
        .collect();
    format!(
        "p={} g={}..{}: {} cells, {} discrepancies{}{}",
        report.p,
        report.g_from,
        report.g_to,
        report.cells.len(),
        cells.len(),
        if report.partial { ", PARTIAL" } else { "" },
        if cells.is_empty() { String::new() } else { format!(" [{}]", cells.join("; ")) }
    )
}

fn predicate_vs_oracle(found: &mut Found) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, from, to) in [(3u32, 6u64, 60u64), (5, 18, 40)] {
        match cross_validate(p, from, to, pgonal::actions::DEFAULT_BUDGET, None) {
            Ok(report) => {
                pass &= report.discrepancy_count() == 0 && !report.partial;
                found.extend(report.cells.iter().filter_map(|c| c.witness.clone()));
                parts.push(describe(&report));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("p={p}: {e}"));
            }
        }
    }
    Verdict::new(pass, parts.join(" | "))
}

fn l1_obstruction_check(found: &mut Found) -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, family) in [(8u32, Family::I), (4, Family::II)] {
        let signature = NecSignature::non_orientable(1, vec![3, family.tail_period(3, n)]);
        let groups = match candidate_groups(3, n) {
            Ok(g) => g,
            Err(e) => return Verdict::new(false, e.to_string()),
        };
        for cand in groups {
            let group = cand.group;
            let pseudo = enumerate(&signature, &group, true, &SearchConfig::default());
            let all = enumerate(&signature, &group, false, &SearchConfig::default());
            let (Ok(pseudo), Ok(all)) = (pseudo, all) else {
                pass = false;
                notes.push(format!("{signature} on {group}: search failed"));
                continue;
            };
            pass &= pseudo.is_empty();
            found.extend(pseudo.iter().cloned());
            let outcome = match l1_obstruction(3, n, family, &group) {
                Ok(L1Obstruction::Extended(ev)) => {
                    let inv = ev.extended_group.element_order(&ev.involution).ok() == Some(2) && ev.involution.0[0] == 1;
                    pass &= inv;
                    format!("extends to {} via {}", ev.extended_group, ev.extended_signature)
                }
                Ok(L1Obstruction::NoMap { .. }) => {
                    pass &= all.is_empty();
                    "no surface-kernel map".to_string()
                }
                Ok(L1Obstruction::InconsistentPresentation { r, .. }) => format!("inconsistent presentation r={r}"),
                Ok(L1Obstruction::NotExtendable { .. }) => {
                    pass = false;
                    "not extendable".to_string()
                }
                Err(e) => {
                    pass = false;
                    e.to_string()
                }
            };
            notes.push(format!("{signature} on {group}: {} pseudo-real, {outcome}", pseudo.len()));
        }
    }
    Verdict::new(pass, notes.join("; "))
}

fn parity(found: &Found) -> Verdict {
    let mut bad = 0;
    for m in found {
        let order = m.group.order();
        let genus = check(m).ok().and_then(|r| r.pseudo_real.then_some(r.genus)).flatten();
        if order % 4 != 0 || genus.is_none_or(|g| g % 2 != 0) {
            bad += 1;
        }
    }
    Verdict::new(
        bad == 0 && !found.is_empty(),
        format!("{} pseudo-real maps, {bad} exceptions", found.len()),
    )
}

fn maximal_orders() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for g in [6u64, 8] {
        let enumerated = classify_genus(3, g, false)
            .ok()
            .and_then(|c| c.records.iter().map(|r| r.order()).max());
        match maximal_order(3, g) {
            Ok(Some(m)) => {
                pass &= m.order == 12
                    && Some(m.order) == enumerated
                    && m.statement_order.is_some()
                    && m.proof_order.is_some();
                notes.push(format!("g={g}: {} ({})", m.order, m.resolution));
            }
            other => {
                pass = false;
                notes.push(format!("g={g}: {other:?}"));
            }
        }
    }
    Verdict::new(pass, notes.join("; "))
}

fn determinism() -> Verdict {
    let table = |workers: &str| {
        let env = |_: &str| None;
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let args = ["pgonal", "--workers", workers, "table", "--p", "3", "--genus", "6..30"];
        let code = run(args, &env, &mut out, &mut err);
        (code, out)
    };
    let (c1, a) = table("1");
    let (c2, b) = table("4");
    Verdict::new(
        c1 == EXIT_OK && c2 == EXIT_OK && a == b && !a.is_empty(),
        format!("{} bytes with 1 worker, {} bytes with 4 workers", a.len(), b.len()),
    )
}

fn main() -> ExitCode {
    let mut found = Found::new();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("Riemann-Hurwitz for both signature families", Box::new(|_| riemann_hurwitz())),
        ("constructor soundness", Box::new(constructor_soundness)),
        ("existence criteria agree with exhaustive search", Box::new(predicate_vs_oracle)),
        ("l = 1 obstruction", Box::new(l1_obstruction_check)),
        ("4 | |G| and even genus for every pseudo-real map", Box::new(|f: &mut Found| parity(f))),
        ("maximal orders", Box::new(|_| maximal_orders())),
        ("table output independent of worker count", Box::new(|_| determinism())),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = f(&mut found);
        failed += usize::from(!v.pass);
        println!(
            "criterion {}: {} - {name} ({:.1?}): {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed(),
            v.detail
        );
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
