//! Acceptance suite. Prints one PASS/FAIL line per check and a summary line
//! per criterion; exits nonzero if anything fails.

use std::time::{Duration, Instant};

use facecolor::homology::{self, betti, build_complex, harmonic_dim, BASIS_TOL, DEFAULT_DIM_BUDGET};
use facecolor::invariants::{census, chromatic_touch, pk_bracket_with, PkMethod, DEFAULT_BUDGET};
use facecolor::ribbon::examples;
use facecolor::states::{self, StateIndex};
use facecolor::{
    color_bracket, corpus, oracle_pm_colorings, penrose, pk_bracket, tensor_contraction, total_polynomial, IntPoly,
    PmDiagram, RibbonGraph,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const D_SQUARED_TOL: f64 = 1e-8;
const RANDOM_DIAGRAMS: usize = 200;
const HOMOLOGY_RANDOM: usize = 40;

struct Criterion {
    id: &'static str,
    checks: usize,
    failed: usize,
    start: Instant,
}

impl Criterion {
    fn new(id: &'static str) -> Self {
        Self {
            id,
            checks: 0,
            failed: 0,
            start: Instant::now(),
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl AsRef<str>) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
        }
        println!(
            "{} {}.{name}: {}",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            detail.as_ref()
        );
    }

    fn timed<T>(&mut self, name: &str, limit: Duration, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        let took = t.elapsed();
        self.check(
            &format!("{name}.time"),
            took <= limit,
            format!("{:.3} s (limit {} s)", took.as_secs_f64(), limit.as_secs_f64()),
        );
        out
    }

    fn finish(self, limit: Option<Duration>, report: &mut Vec<bool>) {
        let took = self.start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let ok = self.failed == 0 && in_time;
        let limit_text = limit
            .map(|l| format!(", limit {} s", l.as_secs_f64()))
            .unwrap_or_default();
        println!(
            "{} criterion {}: {}/{} checks passed in {:.2} s{limit_text}",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.checks - self.failed,
            self.checks,
            took.as_secs_f64()
        );
        report.push(ok);
    }
}

fn pd(text: &str) -> PmDiagram {
    PmDiagram::parse(text).expect("corpus parses")
}

fn poly(text: &str) -> IntPoly {
    text.parse().expect("expected value parses")
}

fn show(p: &IntPoly) -> String {
    p.to_string()
}

/// Random connected trivalent ribbon graph with a random perfect matching,
/// immersed with at most `max_virtuals` crossings. Returns `None` on a dud draw.
fn random_instance(rng: &mut ChaCha8Rng, max_sites: usize, max_virtuals: usize) -> Option<(RibbonGraph, PmDiagram)> {
    let sites = rng.random_range(1..=max_sites);
    let vertices = 2 * sites;
    let mut darts: Vec<u32> = (0..3 * vertices as u32).collect();
    darts.shuffle(rng);
    let edges: Vec<[u32; 2]> = darts.chunks(2).map(|c| [c[0], c[1]]).collect();
    let rotations: Vec<Vec<u32>> = (0..vertices as u32)
        .map(|v| {
            let mut r = vec![3 * v, 3 * v + 1, 3 * v + 2];
            if rng.random_bool(0.5) {
                r.swap(1, 2);
            }
            r
        })
        .collect();
    let g = RibbonGraph::from_named(&rotations, &edges).ok()?;
    if !g.is_connected() {
        return None;
    }
    let matchings = g.matchings();
    let m = matchings.get(rng.random_range(0..matchings.len().max(1)))?;
    let g = g.with_matching(m).ok()?;
    let d = g.immerse().ok()?;
    (d.num_virtuals() <= max_virtuals).then_some((g, d))
}

fn random_instances(seed: u64, count: usize, max_sites: usize, max_virtuals: usize) -> Vec<(RibbonGraph, PmDiagram)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Some(x) = random_instance(&mut rng, max_sites, max_virtuals) {
            out.push(x);
        }
    }
    out
}

fn regression(report: &mut Vec<bool>) {
    let mut c = Criterion::new("1");
    let second = Duration::from_secs(1);
    let cases: [(&str, &str, &str, Option<&str>); 6] = [
        ("theta", corpus::THETA, "n^2 - n", Some("n^2 - n")),
        ("double_theta", corpus::DOUBLE_THETA_CHORDS, "n(n-1)^2", None),
        ("double_theta_alt", corpus::DOUBLE_THETA_ENDS, "2n(n-1)", None),
        ("k33", corpus::K33, "n(n-1)^2", Some("n(n-1)(n-3)")),
        ("petersen", corpus::PETERSEN, "0", None),
        ("j3", corpus::J3, "n(n^3 - 6n^2 + 11n - 6)", None),
    ];
    for (name, text, pk_expected, penrose_expected) in cases {
        let d = pd(text);
        let pk = c.timed(name, second, || pk_bracket(&d).unwrap());
        c.check(
            &format!("{name}.pk"),
            pk == poly(pk_expected),
            format!("{} vs {pk_expected}", show(&pk)),
        );
        if let Some(p) = penrose_expected {
            let got = penrose(&d).unwrap();
            c.check(
                &format!("{name}.penrose"),
                got == poly(p),
                format!("{} vs {p}", show(&got)),
            );
        }
    }
    let theta = pd(corpus::THETA);
    let col = color_bracket(&theta).unwrap();
    let tot = total_polynomial(&theta).unwrap();
    c.check("theta.color", col == poly("n^2 - n"), show(&col));
    c.check(
        "theta.total",
        tot == poly("n^2 - n") && tot.t_coefficient(1).is_zero(),
        format!("{} (t^1 coefficient {})", show(&tot), show(&tot.t_coefficient(1))),
    );
    let k33 = pd(corpus::K33);
    let (a, b) = (pk_bracket(&k33).unwrap().eval(3, 0), penrose(&k33).unwrap().eval(3, 0));
    c.check(
        "k33.at3",
        a == 12.into() && b == 0.into(),
        format!("pk {a}, penrose {b} (expected 12, 0)"),
    );
    let j3 = pk_bracket(&pd(corpus::J3)).unwrap();
    let (j3a, j3b) = (j3.eval(3, 0), j3.eval(4, 0));
    c.check(
        "j3.values",
        j3a == 0.into() && j3b == 24.into(),
        format!("n=3: {j3a}, n=4: {j3b} (expected 0, 24)"),
    );

    let petbu = pd(corpus::PETERSEN_BLOWUP);
    let expected = poly("(n-4)(n-3)(n-2)(n-1)n(40+2n)");
    let got = c.timed("petbu", Duration::from_secs(60), || pk_bracket(&petbu).unwrap());
    c.check(
        "petbu.pk",
        got == expected,
        format!("{} vs {}", show(&got), show(&expected)),
    );
    c.check(
        "petbu.sites",
        petbu.num_matchings() + petbu.num_virtuals() == 23,
        format!("{} matching + {} virtual", petbu.num_matchings(), petbu.num_virtuals()),
    );
    let full = c.timed("petbu_full_state_sum", Duration::from_secs(60), || {
        pk_bracket_with(&petbu, PkMethod::StateSum).unwrap()
    });
    c.check("petbu.full", full == expected, "full sum over all 2^23 states agrees");
    c.finish(None, report);
}

struct Tally {
    name: &'static str,
    tested: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            tested: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.tested += 1;
        if !ok && self.failures.len() < 3 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    fn report(self, c: &mut Criterion) {
        let shown: Vec<&String> = self.failures.iter().filter(|s| !s.is_empty()).collect();
        let detail = if self.failures.is_empty() {
            format!("{} cases agree", self.tested)
        } else {
            format!(
                "{} of {} cases disagree, e.g. {:?}",
                self.failures.len(),
                self.tested,
                shown
            )
        };
        c.check(self.name, self.failures.is_empty(), detail);
    }
}

fn identities(report: &mut Vec<bool>) {
    let mut c = Criterion::new("2");
    let randoms = random_instances(0x5eed, RANDOM_DIAGRAMS, 5, 4);
    let mut cases: Vec<(Option<RibbonGraph>, PmDiagram)> = corpus::SMALL_DIAGRAMS
        .iter()
        .map(|t| (Some(RibbonGraph::from_diagram(&pd(t))), pd(t)))
        .collect();
    cases.extend(randoms.into_iter().map(|(g, d)| (Some(g), d)));
    let planar = cases.iter().filter(|(_, d)| d.num_virtuals() == 0).count();
    c.check(
        "sample",
        cases.len() >= RANDOM_DIAGRAMS && planar > 0 && planar < cases.len(),
        format!(
            "{} diagrams ({} random, seed 0x5eed), {planar} without virtual crossings",
            cases.len(),
            RANDOM_DIAGRAMS
        ),
    );

    let mut pk_color = Tally::new("pk_equals_color");
    let mut total_color = Tally::new("total_at_t1_equals_color");
    let mut penrose_pk = Tally::new("penrose_equals_pk_without_virtuals");
    let mut tensor = Tally::new("tensor_equals_pk_n234_all_plus_one");
    let mut oracle = Tally::new("oracle_equals_color_n234");
    for (g, d) in &cases {
        let label = || d.serialize();
        let pk = pk_bracket(d).unwrap();
        let col = color_bracket(d).unwrap();
        pk_color.record(pk == col, || format!("{}: {} vs {}", label(), pk, col));
        let t1 = total_polynomial(d).unwrap().at_t(1);
        total_color.record(t1 == col, || format!("{}: {} vs {}", label(), t1, col));
        if d.num_virtuals() == 0 {
            let p = penrose(d).unwrap();
            penrose_pk.record(p == pk, || format!("{}: {} vs {}", label(), p, pk));
        }
        for n in 2..=4u64 {
            let r = tensor_contraction(d, n, DEFAULT_BUDGET).unwrap();
            let want = pk.eval(n as i64, 0);
            tensor.record(want == r.value.into() && r.all_terms_plus_one, || {
                format!(
                    "{} n={n}: {} (all +1: {}) vs {want}",
                    label(),
                    r.value,
                    r.all_terms_plus_one
                )
            });
            if let Some(g) = g {
                let unmatched = g.num_edges() - g.num_vertices() / 2;
                if unmatched <= 12 {
                    let count = oracle_pm_colorings(g, n, DEFAULT_BUDGET).unwrap();
                    let want = col.eval(n as i64, 0);
                    oracle.record(want == count.into(), || format!("{} n={n}: {count} vs {want}", label()));
                }
            }
        }
    }
    for t in [pk_color, total_color, penrose_pk, tensor, oracle] {
        t.report(&mut c);
    }

    let base = pd(corpus::THETA);
    let with_self = pd("G[M[1,2,2,1],V[1,1]]");
    let (a, b) = (pk_bracket(&base).unwrap(), pk_bracket(&with_self).unwrap());
    c.check("self_virtual_removal", a == b, format!("{a} with and without V[1,1]"));
    let mut tally = Tally::new("self_virtual_removal_random");
    for (_, d) in cases.iter().take(60) {
        let label = d.arc_labels()[0];
        let mut e = d.clone();
        e.virtuals.push([label, label]);
        let (p, q) = (pk_bracket(d).unwrap(), pk_bracket(&e).unwrap());
        tally.record(p == q, || format!("{}: {p} vs {q}", d.serialize()));
    }
    tally.report(&mut c);
    // planar state: two circles meeting at one virtual crossing; crossed state: one circle
    let two = pk_bracket(&pd("G[M[1,2,2,1],V[1,2]]")).unwrap();
    let two_circle = &two + &IntPoly::n();
    c.check(
        "two_circle_value",
        two_circle == poly("2n - n^2"),
        format!("planar-state contribution {two_circle} (expected 2n - n^2)"),
    );
    c.finish(None, report);
}

fn homology_certification(report: &mut Vec<bool>) {
    let mut c = Criterion::new("3");
    let mut diagrams: Vec<PmDiagram> = corpus::SMALL_DIAGRAMS
        .iter()
        .map(|t| pd(t))
        .filter(|d| d.num_matchings() <= 4)
        .collect();
    diagrams.extend(
        random_instances(0xc0ffee, HOMOLOGY_RANDOM, 4, 4)
            .into_iter()
            .map(|(_, d)| d),
    );
    c.check(
        "sample",
        true,
        format!("{} diagrams with at most 4 sites, n in 2..=4", diagrams.len()),
    );

    let mut d2 = Tally::new("d_squared_zero");
    let mut poincare = Tally::new("betti_equals_total_polynomial");
    let mut euler = Tally::new("euler_characteristic_equals_penrose");
    let mut harmonic = Tally::new("harmonic_dim_equals_touch_chromatic");
    let mut worst = 0.0f64;
    for d in &diagrams {
        let total = total_polynomial(d).unwrap();
        let pen = penrose(d).unwrap();
        let touch: Vec<(StateIndex, IntPoly)> = StateIndex::all(d.num_matchings())
            .map(|s| (s, chromatic_touch(&states::touch_graph(d, s).unwrap())))
            .collect();
        for n in 2..=4usize {
            let cx = build_complex(d, n, DEFAULT_DIM_BUDGET).unwrap();
            let b = betti(&cx).unwrap();
            worst = worst.max(b.d_squared_defect);
            d2.record(b.d_squared_defect <= D_SQUARED_TOL, || {
                format!("{} n={n}: {:e}", d.serialize(), b.d_squared_defect)
            });
            let agrees = b
                .betti
                .iter()
                .enumerate()
                .all(|(i, &bi)| total.t_coefficient(i as u32).eval(n as i64, 0) == bi.into())
                && total.degree_t().is_none_or(|top| top as usize <= d.num_matchings());
            poincare.record(agrees, || {
                format!("{} n={n}: {:?} vs {}", d.serialize(), b.betti, total)
            });
            let want = pen.eval(n as i64, 0);
            euler.record(want == b.euler_characteristic.into(), || {
                format!("{} n={n}: {} vs {want}", d.serialize(), b.euler_characteristic)
            });
            for (s, p) in &touch {
                let h = harmonic_dim(d, *s, n).unwrap();
                let want = p.eval(n as i64, 0);
                harmonic.record(want == h.into(), || {
                    format!("{} {s} n={n}: {h} vs {want}", d.serialize())
                });
            }
        }
    }
    for t in [d2, poincare, euler, harmonic] {
        t.report(&mut c);
    }
    c.check(
        "d_squared_worst",
        worst <= D_SQUARED_TOL,
        format!("{worst:e} (tolerance {D_SQUARED_TOL:e})"),
    );

    let mut dev = 0.0f64;
    let mut all_pass = true;
    let mut scalars = Vec::new();
    for n in 2..=12 {
        let r = homology::color_basis_check(n).unwrap();
        dev = dev.max(r.max_deviation);
        all_pass &= r.passed;
        let s: Vec<String> = r
            .checks
            .iter()
            .filter_map(|c| c.scalar.map(|s| format!("{s:.4}")))
            .collect();
        scalars.push(format!("n={n}: [{}]", s.join(", ")));
    }
    c.check(
        "color_basis_identities",
        all_pass && dev <= BASIS_TOL,
        format!("max deviation {dev:.2e} over n = 2..=12 (tolerance {BASIS_TOL:e})"),
    );
    c.check(
        "adjoint_scalars",
        all_pass,
        format!(
            "conjugate-transpose adjoints match up to positive scalars (m*, Δ*, η*): {}",
            scalars.join("; ")
        ),
    );
    let n2 = homology::color_basis_check(2).unwrap();
    c.check(
        "color_basis_n2",
        n2.max_deviation <= 1e-12,
        format!("{:.2e} (tolerance 1e-12)", n2.max_deviation),
    );
    c.finish(Some(Duration::from_secs(30)), report);
}

fn census_evidence(report: &mut Vec<bool>) {
    let mut c = Criterion::new("4");
    let probes = [3, 4];
    for (name, g) in [
        ("petersen_drawing", examples::petersen()),
        ("petersen_code", RibbonGraph::from_diagram(&pd(corpus::PETERSEN))),
    ] {
        let rows = census(&g, &probes).unwrap();
        c.check(
            name,
            !rows.is_empty() && rows.iter().all(|r| r.zero),
            format!(
                "{} matchings, {} zero",
                rows.len(),
                rows.iter().filter(|r| r.zero).count()
            ),
        );
    }
    let j3 = RibbonGraph::from_diagram(&pd(corpus::J3));
    let rows = census(&j3, &probes).unwrap();
    let target = poly("n(n^3 - 6n^2 + 11n - 6)");
    let zeros = rows.iter().filter(|r| r.zero).count();
    let hits = rows.iter().filter(|r| r.pk == target).count();
    c.check(
        "j3",
        zeros >= 1 && hits >= 1,
        format!(
            "{} matchings: {zeros} zero, {hits} equal to n(n^3 - 6n^2 + 11n - 6)",
            rows.len()
        ),
    );
    c.finish(Some(Duration::from_secs(10)), report);
}

fn fingerprint() -> String {
    let mut out = String::new();
    let mut all: Vec<&str> = corpus::SMALL_DIAGRAMS.to_vec();
    all.push(corpus::PETERSEN_BLOWUP);
    for t in all {
        let d = pd(t);
        out.push_str(&format!(
            "{}|{}|{}|{}|{}\n",
            d.serialize(),
            pk_bracket(&d).unwrap(),
            penrose(&d).unwrap(),
            color_bracket(&d).unwrap(),
            total_polynomial(&d).unwrap()
        ));
    }
    for g in [examples::petersen(), RibbonGraph::from_diagram(&pd(corpus::J3))] {
        out.push_str(&serde_json::to_string(&census(&g, &[3, 4]).unwrap()).unwrap());
        out.push('\n');
    }
    out
}

fn determinism(report: &mut Vec<bool>) {
    let mut c = Criterion::new("5");
    let runs: Vec<String> = [1, 8, 1, 8]
        .iter()
        .map(|&w| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .unwrap()
                .install(fingerprint)
        })
        .collect();
    let same = runs.windows(2).all(|p| p[0] == p[1]);
    c.check(
        "workers_1_vs_8",
        same,
        format!(
            "{} bytes of corpus output, 4 runs alternating 1 and 8 workers",
            runs[0].len()
        ),
    );
    c.finish(None, report);
}

fn main() {
    let mut report = Vec::new();
    regression(&mut report);
    identities(&mut report);
    homology_certification(&mut report);
    census_evidence(&mut report);
    determinism(&mut report);
    let passed = report.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", report.len());
    if passed != report.len() {
        std::process::exit(1);
    }
}
