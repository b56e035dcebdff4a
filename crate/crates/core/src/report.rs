//! Per-ring pipeline and its JSON report.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cache::SnfCache;
use crate::coeff_rings::{Hypotheses, LocalRing, RingSpec};
use crate::config_complex::{
    actions_are_involutions, kappa_calibrate, lambda_equivariant, ComplexGroups, ComplexOptions, ConfigComplex,
    KappaReport, Psi1Suite, Psi1Quotients,
};
use crate::error::{Error, Result};
use crate::exact_linalg::FinAbGroup;
use crate::group_ring::gw_bar;
use crate::rp_presentation::RpPresentation;
use crate::torsion_invariants::{bloch_wigner_report, sym_square_closed, unit_group, BlochWignerReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssertMode {
    Strict,
    ReportOnly,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub max_level: usize,
    pub point_cap: usize,
    pub tuple_cap: usize,
    pub assert_mode: AssertMode,
    pub orbit_trials: usize,
    pub orbit_max_word: usize,
    pub seed: u64,
    pub include_timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        let c = ComplexOptions::default();
        RunOptions {
            max_level: c.max_level,
            point_cap: c.point_cap,
            tuple_cap: c.tuple_cap,
            assert_mode: AssertMode::Strict,
            orbit_trials: 1000,
            orbit_max_word: 8,
            seed: 0x5eed,
            include_timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { detail: String },
    Skipped { reason: String },
}

impl Verdict {
    fn of(ok: bool, detail: impl FnOnce() -> String) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail { detail: detail() }
        }
    }

    fn skipped(reason: impl Into<String>) -> Self {
        Verdict::Skipped { reason: reason.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub asserted: bool,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl Check {
    pub fn failed_assertion(&self) -> bool {
        self.asserted && matches!(self.verdict, Verdict::Fail { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RingInfo {
    pub size: usize,
    pub characteristic: u64,
    pub residue_field_size: u64,
    pub is_field: bool,
    pub projective_points: usize,
    pub psl2_order: u64,
    pub square_classes: usize,
    pub units: usize,
    pub w_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationSide {
    pub generators: usize,
    pub five_term_relations: usize,
    pub vacuous: bool,
    pub rp: FinAbGroup,
    pub rp1: FinAbGroup,
    pub rb: FinAbGroup,
    pub sym_square: FinAbGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexSide {
    pub level_sizes: Vec<usize>,
    pub boundary_ranks: Vec<usize>,
    pub homology: Vec<FinAbGroup>,
    pub gw_prime: FinAbGroup,
    pub i_prime: FinAbGroup,
    pub gw_bar: FinAbGroup,
    pub x3_orbits: Option<usize>,
    pub rp: Option<FinAbGroup>,
    pub rp1: Option<FinAbGroup>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RpReport {
    pub schema_version: u32,
    pub ring: String,
    pub ring_info: RingInfo,
    pub hypotheses: Hypotheses,
    pub presentation: PresentationSide,
    pub complex: Option<ComplexSide>,
    pub kappa: Option<KappaReport>,
    pub psi1: Option<Psi1Suite>,
    pub psi1_quotients: Option<Psi1Quotients>,
    pub bloch_wigner: BlochWignerReport,
    pub checks: Vec<Check>,
    pub errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<&'static str, u64>>,
}

impl RpReport {
    pub fn asserted_failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.failed_assertion()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum BatchEntry {
    Report(Box<RpReport>),
    Error { schema_version: u32, ring: String, error: String },
}

impl BatchEntry {
    pub fn failed_assertion(&self) -> bool {
        match self {
            BatchEntry::Report(r) => !r.asserted_failures().is_empty(),
            BatchEntry::Error { .. } => false,
        }
    }
}

struct Timer {
    on: bool,
    start: Instant,
    marks: BTreeMap<&'static str, u64>,
}

impl Timer {
    fn mark(&mut self, name: &'static str) {
        if self.on {
            self.marks.insert(name, self.start.elapsed().as_millis() as u64);
        }
    }
}

fn ring_seed(seed: u64, ring: &str) -> u64 {
    let d = Sha256::digest(format!("{seed}:{ring}").as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

pub fn run(spec: &RingSpec, opts: &RunOptions, cache: Option<&SnfCache>) -> Result<RpReport> {
    if !(2..=3).contains(&opts.max_level) {
        return Err(Error::Parse(format!("max level must be 2 or 3, got {}", opts.max_level)));
    }
    let ring = spec.build()?;
    let name = spec.to_string();
    let strict = opts.assert_mode == AssertMode::Strict;
    let hyp = ring.hypotheses();
    let mut timer = Timer { on: opts.include_timing, start: Instant::now(), marks: BTreeMap::new() };
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    let mut push = |name: &'static str, asserted: bool, verdict: Verdict| checks.push(Check { name, asserted, verdict });

    let pres = RpPresentation::build_with(&ring, cache)?;
    timer.mark("presentation");
    push(
        "lambda1_annihilates_relations",
        true,
        Verdict::of(pres.lambda1_failure().is_none(), || format!("relation row {:?}", pres.lambda1_failure())),
    );
    push(
        "lambda2_annihilates_relations",
        true,
        Verdict::of(pres.lambda2_failure().is_none(), || format!("relation row {:?}", pres.lambda2_failure())),
    );
    push("lambda1_equivariant", true, Verdict::of(pres.lambda1_equivariant(), || "matrix identity fails".into()));
    let s2_closed = sym_square_closed(&unit_group(&ring));
    push(
        "sym_square_closed_form",
        true,
        Verdict::of(&s2_closed == pres.s2.group(), || format!("closed form {s2_closed}, presentation {}", pres.s2.group())),
    );

    let copts = ComplexOptions { max_level: opts.max_level, point_cap: opts.point_cap, tuple_cap: opts.tuple_cap };
    let mut complex = None;
    let mut kappa = None;
    let mut psi1 = None;
    let mut psi1_quotients = None;
    let gwbar = gw_bar(&ring);
    match ConfigComplex::build(&ring, &copts) {
        Err(e @ Error::SizeCap { .. }) => {
            let reason = e.to_string();
            errors.push(reason.clone());
            for n in COMPLEX_CHECKS {
                push(n, false, Verdict::skipped(reason.clone()));
            }
        }
        Err(e) => return Err(e),
        Ok(cx) => {
            timer.mark("levels");
            push(
                "boundary_squared_zero",
                true,
                Verdict::of(cx.check_boundaries().is_ok(), || format!("{:?}", cx.check_boundaries().err())),
            );
            let eq = cx.check_equivariance();
            push("generator_equivariance", true, Verdict::of(eq.is_ok(), || format!("{:?}", eq.err())));
            let mut rng = ChaCha8Rng::seed_from_u64(ring_seed(opts.seed, &name));
            let bad = cx.orbit_class_trials(&mut rng, opts.orbit_trials, opts.orbit_max_word);
            push(
                "orbit_class_invariance",
                true,
                Verdict::of(bad == 0, || format!("{bad} of {} samples changed class", opts.orbit_trials)),
            );
            timer.mark("complex_checks");

            let groups = ComplexGroups::compute_with(&cx, cache)?;
            timer.mark("coinvariants");
            let h = &groups.homology;
            push(
                "h0_is_z",
                strict,
                Verdict::of(h.h(0) == Some(&FinAbGroup::free(1)), || format!("H_0 = {:?}", h.h(0).map(|g| g.to_string()))),
            );
            push(
                "h1_vanishes",
                strict,
                Verdict::of(groups.h1_vanishes() == Some(true), || format!("H_1 = {:?}", h.h(1).map(|g| g.to_string()))),
            );
            push(
                "x2_orbits_match_classes",
                true,
                Verdict::of(groups.x2_orbits_match_classes, || "X_2 orbits differ from square classes".into()),
            );
            let with_z = groups.i_prime.group.sum(&FinAbGroup::free(1));
            push(
                "augmentation_splits",
                true,
                Verdict::of(with_z == groups.gw_prime.group, || format!("GW' = {}, I' + Z = {with_z}", groups.gw_prime.group)),
            );
            let h2_zero = groups.h2_vanishes() == Some(true) && groups.h1_vanishes() == Some(true);
            push(
                "gw_prime_vs_gw_bar",
                strict && h2_zero,
                if h2_zero {
                    Verdict::of(groups.gw_prime.group == gwbar, || format!("GW' = {}, GW-bar = {gwbar}", groups.gw_prime.group))
                } else {
                    Verdict::skipped("H_2 of the complex not confirmed zero")
                },
            );

            match groups.rp.as_ref() {
                None => {
                    for n in RP_CHECKS {
                        push(n, false, Verdict::skipped("level X_3 not built"));
                    }
                }
                Some(_) if !h2_zero => {
                    for n in RP_CHECKS {
                        push(n, false, Verdict::skipped("H_2 of the complex not confirmed zero"));
                    }
                }
                Some(rp) => {
                    push(
                        "class_actions_involutive",
                        true,
                        Verdict::of(actions_are_involutions(&cx, rp)?, || "an action does not square to 1".into()),
                    );
                    push("lambda_equivariant", true, Verdict::of(lambda_equivariant(&cx, rp), || "matrix identity fails".into()));
                    let k = kappa_calibrate(&cx, rp, &pres)?;
                    timer.mark("kappa");
                    let cross = strict && hyp.residue_large;
                    push(
                        "cross_oracle_rp",
                        cross,
                        Verdict::of(pres.canon.group == rp.canon.group, || {
                            format!("presentation {}, complex {}", pres.canon.group, rp.canon.group)
                        }),
                    );
                    push(
                        "cross_oracle_rp1",
                        cross,
                        if k.chosen.is_none() {
                            Verdict::Fail { detail: "no candidate matched".into() }
                        } else {
                            Verdict::of(pres.rp1.group == rp.rp1.group && k.isomorphism, || {
                                format!(
                                    "presentation {}, complex {}, kappa isomorphism {}",
                                    pres.rp1.group, rp.rp1.group, k.isomorphism
                                )
                            })
                        },
                    );
                    let suite = Psi1Suite::run(&cx, rp)?;
                    push(
                        "psi1_identities",
                        strict,
                        Verdict::of(suite.passed(), || {
                            format!(
                                "not cycles {:?}, lambda {:?}, squares {:?}",
                                suite.not_cycles, suite.lambda_mismatches, suite.square_mismatches
                            )
                        }),
                    );
                    let rb_gens = if k.isomorphism { k.transport(rp, &pres.rb.lift) } else { None };
                    let tb = Psi1Quotients::compute(&cx, rp, rb_gens.as_deref())?;
                    timer.mark("psi1");
                    push(
                        "psi1_squares_contained",
                        strict,
                        Verdict::of(tb.squares_contained, || "some psi_1(a^2) lies outside Z[G] psi_1(-1)".into()),
                    );
                    push(
                        "psi1_quotient_orders",
                        strict && tb.rp1.orders_multiply.is_some(),
                        match tb.rp1.orders_multiply {
                            Some(ok) => Verdict::of(ok, || "|submodule| * |quotient| != |RP_1|".into()),
                            None => Verdict::skipped("RP_1 is infinite"),
                        },
                    );
                    kappa = Some(k);
                    psi1 = Some(suite);
                    psi1_quotients = Some(tb);
                }
            }
            complex = Some(ComplexSide {
                level_sizes: h.sizes.clone(),
                boundary_ranks: h.boundary_ranks.clone(),
                homology: h.groups.clone(),
                gw_prime: groups.gw_prime.group.clone(),
                i_prime: groups.i_prime.group.clone(),
                gw_bar: gwbar.clone(),
                x3_orbits: groups.rp.as_ref().map(|rp| rp.num_orbits()),
                rp: groups.rp.as_ref().map(|rp| rp.canon.group.clone()),
                rp1: groups.rp.as_ref().map(|rp| rp.rp1.group.clone()),
            });
        }
    }

    let bw = bloch_wigner_report(&ring, if pres.vacuous { None } else { pres.rb.group.order() });
    let tor_expected = (ring.is_field() && ring.characteristic() != 2).then(|| (ring.size() as u64 - 1) / 2);
    push(
        "tor_order_formula",
        strict && tor_expected.is_some(),
        match tor_expected {
            Some(t) => Verdict::of(bw.tor_order == t.into(), || format!("tor order {} but (q-1)/2 = {t}", bw.tor_order)),
            None => Verdict::skipped("formula stated for odd-characteristic fields"),
        },
    );
    timer.mark("total");

    Ok(RpReport {
        schema_version: SCHEMA_VERSION,
        ring: name,
        ring_info: ring_info(&ring, &pres),
        hypotheses: hyp,
        presentation: PresentationSide {
            generators: pres.num_gens(),
            five_term_relations: pres.relations.len(),
            vacuous: pres.vacuous,
            rp: pres.canon.group.clone(),
            rp1: pres.rp1.group.clone(),
            rb: pres.rb.group.clone(),
            sym_square: pres.s2.group().clone(),
        },
        complex,
        kappa,
        psi1,
        psi1_quotients,
        bloch_wigner: bw,
        checks,
        errors,
        timing_ms: timer.on.then_some(timer.marks),
    })
}

const COMPLEX_CHECKS: [&str; 15] = [
    "boundary_squared_zero",
    "generator_equivariance",
    "orbit_class_invariance",
    "h0_is_z",
    "h1_vanishes",
    "x2_orbits_match_classes",
    "augmentation_splits",
    "gw_prime_vs_gw_bar",
    "class_actions_involutive",
    "lambda_equivariant",
    "cross_oracle_rp",
    "cross_oracle_rp1",
    "psi1_identities",
    "psi1_squares_contained",
    "psi1_quotient_orders",
];

const RP_CHECKS: [&str; 7] = [
    "class_actions_involutive",
    "lambda_equivariant",
    "cross_oracle_rp",
    "cross_oracle_rp1",
    "psi1_identities",
    "psi1_squares_contained",
    "psi1_quotient_orders",
];

fn ring_info(ring: &LocalRing, pres: &RpPresentation) -> RingInfo {
    RingInfo {
        size: ring.size(),
        characteristic: ring.characteristic(),
        residue_field_size: ring.residue_size(),
        is_field: ring.is_field(),
        projective_points: ring.num_points(),
        psl2_order: ring.psl2_data().order,
        square_classes: ring.num_classes(),
        units: ring.units().len(),
        w_size: pres.w.len(),
    }
}

/// Runs one descriptor, turning any failure into an error entry.
pub fn run_entry(spec: &str, opts: &RunOptions, cache: Option<&SnfCache>) -> BatchEntry {
    let result = spec.parse::<RingSpec>().and_then(|s| run(&s, opts, cache));
    match result {
        Ok(r) => BatchEntry::Report(Box::new(r)),
        Err(e) => BatchEntry::Error { schema_version: SCHEMA_VERSION, ring: spec.to_string(), error: e.to_string() },
    }
}

/// Reports in the order of `specs`, computed in parallel.
pub fn batch(specs: &[String], opts: &RunOptions, cache: Option<&SnfCache>) -> Vec<BatchEntry> {
    specs.par_iter().map(|s| run_entry(s, opts, cache)).collect()
}

pub fn to_json(entries: &[BatchEntry]) -> String {
    let mut s = serde_json::to_string_pretty(entries).expect("reports serialize");
    s.push('\n');
    s
}
