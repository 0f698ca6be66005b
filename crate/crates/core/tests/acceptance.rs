//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. `FORGE_SEED` overrides the random seed.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use forge_core::area::bounded_area;
use forge_core::derivation::{self, check_derivation, remap};
use forge_core::diagram::{self, band_side_label, boundary_position, diagram_from_derivation, trace_bands, Side};
use forge_core::encode::{self, h_encode, hub_word, skeleton_machine};
use forge_core::lemma3::{self, closed_filling, lemma3_derivation, lemma3_end, lemma3_start, loop_word};
use forge_core::presentation::{self, build_presentation, component_census, s4_fragment};
use forge_core::smachine::{self, match_rule, AdmissibleWord, SMachine};
use forge_core::subdisc::{subdisc_search, SubdiscLimits, Verdict};
use forge_core::tm::{self, fixtures};
use forge_core::word::special;
use forge_core::{Letter, Symbol, Word};

type Outcome = Result<String, String>;

const DEFAULT_SEED: u64 = 0x5eed_f0e9;

fn seed() -> u64 {
    std::env::var("FORGE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let detail = f()?;
    let took = t.elapsed();
    ensure(took <= limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(format!("{detail} in {took:.2?}"))
}

fn lemma3_identity() -> Outcome {
    timed(Duration::from_secs(5), || {
        let p = s4_fragment();
        let mut areas = Vec::new();
        for n in 0..=8 {
            let d = lemma3_derivation(n);
            ensure(d.start == lemma3_start(n), || format!("n={n}: wrong start"))?;
            let c = check_derivation(&p, &d).map_err(|e| format!("n={n}: {e}"))?;
            ensure(c.end_word == lemma3_end(n), || format!("n={n}: ends at {}", c.end_word))?;
            areas.push(c.area);
        }
        Ok(format!("n=0..8 valid, areas {areas:?}"))
    })
}

fn oracle_cross_check() -> Outcome {
    const MAX_AREA: usize = 256;
    const MAX_LEN: usize = 64;
    timed(Duration::from_secs(60), || {
        let core = lemma3::core_presentation();
        let full = s4_fragment();
        let mut out = Vec::new();
        let mut areas = Vec::new();
        for n in 1..=2 {
            let w = loop_word(n);
            let f = bounded_area(&core, &w, MAX_AREA, MAX_LEN).map_err(|e| format!("n={n}: {e}"))?;
            let witness = remap(&f.witness, &core, &full).ok_or_else(|| format!("n={n}: witness not remappable"))?;
            ensure(witness.start == w, || format!("n={n}: witness starts elsewhere"))?;
            let c = check_derivation(&full, &witness).map_err(|e| format!("n={n}: witness {e}"))?;
            ensure(c.raw_end.is_empty(), || format!("n={n}: witness ends at {}", c.end_word))?;
            ensure(c.area == f.area, || format!("n={n}: witness area {} vs {}", c.area, f.area))?;
            let lemma = check_derivation(&full, &closed_filling(n)).map_err(|e| e.to_string())?.area;
            ensure(f.area <= lemma, || format!("n={n}: a={} exceeds filling area {lemma}", f.area))?;
            out.push(format!("a{n}={} (filling {lemma})", f.area));
            areas.push(f.area);
        }
        // Plain breadth-first search agrees on the smallest loop.
        let bfs = forge_core::area::search_area(&core, &loop_word(1), forge_core::area::Limits::new(8, 10))
            .map_err(|e| format!("search on u_1: {e}"))?;
        ensure(bfs.area == areas[0], || format!("search finds {} on u_1", bfs.area))?;
        Ok(format!("{}, caps area<={MAX_AREA} len<={MAX_LEN}, search agrees on u_1", out.join(", ")))
    })
}

fn random_word(rng: &mut ChaCha8Rng, alphabet: &[Symbol], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let mut raw: Vec<Letter> = Vec::new();
    while raw.len() < len {
        let s = alphabet[rng.gen_range(0..alphabet.len())];
        let l = if rng.gen_bool(0.5) { s.pos() } else { s.neg() };
        if raw.last().is_some_and(|x| x.cancels(l)) {
            continue;
        }
        raw.push(l);
    }
    Word::reduce(raw)
}

/// A random admissible word. With a rule given, the state letters it reads
/// are used so that matches are not vanishingly rare.
fn random_admissible(rng: &mut ChaCha8Rng, m: &SMachine, bias: Option<&smachine::SRule>) -> AdmissibleWord {
    let hw = &m.hardware;
    let mut states: Vec<Symbol> = hw
        .states()
        .iter()
        .map(|q| {
            let q: Vec<Symbol> = q.iter().copied().collect();
            q[rng.gen_range(0..q.len())]
        })
        .collect();
    if let Some(r) = bias {
        for c in &r.components {
            for l in c.lhs.letters() {
                if let Some(j) = hw.component_of(l.symbol) {
                    states[j] = l.symbol;
                }
            }
        }
    }
    let segments = hw
        .tapes()
        .iter()
        .map(|y| {
            let y: Vec<Symbol> = y.iter().copied().collect();
            random_word(rng, &y, 8)
        })
        .collect();
    AdmissibleWord::new(states, segments)
}

fn rule_round_trip() -> Outcome {
    let seed = seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let machines: Vec<SMachine> =
        ["S1", "S2", "S3", "S4"].iter().map(|n| smachine::builtin(n).expect("builtin")).collect();
    let mut matched = 0;
    let mut failures = Vec::new();
    for i in 0..1000 {
        let m = &machines[i % machines.len()];
        let rules = m.all_rules();
        let sigma = &rules[rng.gen_range(0..rules.len())];
        let bias = rng.gen_bool(0.75).then_some(sigma);
        let w = random_admissible(&mut rng, m, bias);
        w.check(&m.hardware).map_err(|e| format!("generator produced a bad word: {e}"))?;
        let hit = match_rule(&w, sigma, &m.hardware).map_err(|e| e.to_string())?;
        if !hit.is_match() {
            continue;
        }
        matched += 1;
        let mid = match m.apply(&w, &sigma.name) {
            Ok(mid) => mid,
            Err(e) => {
                failures.push(format!("{} {} on {w}: {e}", m.name, sigma.name));
                continue;
            }
        };
        if let Err(e) = mid.check(&m.hardware) {
            failures.push(format!("{} {} on {w}: intermediate {mid} not admissible: {e}", m.name, sigma.name));
            continue;
        }
        match m.apply(&mid, &sigma.inverse().name) {
            Ok(back) if back == w => {}
            Ok(back) => failures.push(format!("{} {} on {w}: came back as {back}", m.name, sigma.name)),
            Err(e) => failures.push(format!("{} {} on {w}: inverse failed: {e}", m.name, sigma.name)),
        }
    }
    ensure(failures.is_empty(), || format!("{} failure(s), first: {}", failures.len(), failures[0]))?;
    ensure(matched >= 100, || format!("only {matched} of 1000 words matched"))?;
    Ok(format!("1000 words (seed {seed}), {matched} matched, 0 failures"))
}

fn s1_gating() -> Outcome {
    let m = smachine::builtin("S1").expect("S1");
    let rule3 = m.rule("rule3").ok_or("S1 has no rule3")?;
    let states: Vec<Symbol> = ["p1", "q1", "r1", "s1", "t1", "u1"].iter().map(|s| Symbol::intern(s)).collect();
    let d = special::delta();
    let mut total = 0;
    let mut matched = 0;
    for code in 0..7usize.pow(5) {
        let exps: Vec<i64> = (0..5).map(|i| (code / 7usize.pow(i)) as i64 % 7 - 3).collect();
        let w = AdmissibleWord::new(states.clone(), exps.iter().map(|&e| Word::power(d, e)).collect());
        let hit = match_rule(&w, &rule3, &m.hardware).map_err(|e| e.to_string())?.is_match();
        ensure(hit == (exps[0] == 1), || format!("exponents {exps:?}: match={hit}"))?;
        total += 1;
        matched += hit as usize;
    }
    Ok(format!("{total} words, {matched} matches, all with p-q segment δ"))
}

fn census() -> Outcome {
    let mut out = Vec::new();
    for (m, want) in [(fixtures::unary(), 23), (fixtures::two_tape(), 40)] {
        let k = m.tapes.len();
        let c = component_census(&skeleton_machine(&m));
        ensure(c.state_components == 17 * k + 6 && c.state_components == want, || {
            format!("{}: k={k}, {} components", m.name, c.state_components)
        })?;
        out.push(format!("k={k} -> {}", c.state_components));
    }
    Ok(out.join(", "))
}

fn hub_and_encoding() -> Outcome {
    let seed = seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    let alphabet: Vec<Symbol> = ["δ", "α", "ω", "a", "p1", "q1"].iter().map(|s| Symbol::intern(s)).collect();
    for _ in 0..200 {
        let u = random_word(&mut rng, &alphabet, 12);
        let n = rng.gen_range(1..=6);
        let k = hub_word(&u, n).map_err(|e| e.to_string())?;
        let kappas = k.letters().iter().filter(|l| special::is_kappa(l.symbol)).count();
        ensure(kappas == 4 * n, || format!("u={u} N={n}: {kappas} κ letters"))?;
    }
    let m = fixtures::unary();
    let a = Symbol::intern("a");
    let mut seen = BTreeSet::new();
    let mut inputs = 0;
    for len in 1..=4 {
        let h = h_encode(&m, &Word::power(a, len), 1).map_err(|e| e.to_string())?;
        ensure(seen.insert(h), || format!("collision at a^{len}"))?;
        inputs += 1;
    }
    let lens: Vec<i64> =
        (1..=16).map(|l| h_encode(&m, &Word::power(a, l), 1).map(|h| h.len() as i64)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let first: Vec<i64> = lens.windows(2).map(|w| w[1] - w[0]).collect();
    let second: Vec<i64> = first.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(second.iter().all(|&s| s == second[0] && s > 0), || format!("second differences {second:?}"))?;
    Ok(format!(
        "200 hub words (seed {seed}) with 4N κ letters, {inputs} inputs injective, |H(a^l)| quadratic (second difference {})",
        second[0]
    ))
}

fn delta(n: usize) -> Result<(diagram::Diagram, usize), String> {
    let p = s4_fragment();
    let d = closed_filling(n);
    let area = check_derivation(&p, &d).map_err(|e| e.to_string())?.area;
    let dg = diagram_from_derivation(&p, &d).map_err(|e| e.to_string())?;
    Ok((dg, area))
}

fn band_structure() -> Outcome {
    for n in 1..=4 {
        let (dg, area) = delta(n)?;
        ensure(dg.perimeter() == 10 * n, || format!("n={n}: perimeter {}", dg.perimeter()))?;
        ensure(dg.area() == area, || format!("n={n}: diagram area {} vs derivation {area}", dg.area()))?;
        ensure(Word::reduce(dg.boundary_label()) == loop_word(n), || format!("n={n}: boundary label"))?;
        // Boundary arcs of u_n: left σ1^-n σ4^-n, top (s2 r1)^n, right σ4^n σ1^n, bottom the rest.
        let left = 0..2 * n;
        let right = 4 * n..6 * n;
        for x in [lemma3::sigma4(), lemma3::sigma1()] {
            let bands = trace_bands(&dg, x);
            ensure(bands.len() == n, || format!("n={n}: {} {x}-bands", bands.len()))?;
            for b in &bands {
                ensure(!b.annulus, || format!("n={n}: {x}-annulus"))?;
                let s = b.start_edge().and_then(|e| boundary_position(&dg, e));
                let e = b.end_edge().and_then(|e| boundary_position(&dg, e));
                let (Some(s), Some(e)) = (s, e) else {
                    return Err(format!("n={n}: {x}-band does not end on the boundary"));
                };
                let (s, e) = (s.min(e), s.max(e));
                ensure(left.contains(&s) && right.contains(&e), || format!("n={n}: {x}-band runs {s}..{e}"))?;
                let inner = &b.edges[1..b.edges.len() - 1];
                ensure(inner.iter().all(|&e| boundary_position(&dg, e).is_none()), || {
                    format!("n={n}: {x}-band touches the boundary")
                })?;
            }
        }
    }
    Ok("n=1..4: n σ4-bands and n σ1-bands from left to right, perimeter 10n, areas match".into())
}

fn side_label() -> Outcome {
    for n in 1..=3 {
        let (dg, _) = delta(n)?;
        let bands = trace_bands(&dg, lemma3::sigma4());
        // The σ4 edge next to the σ1 letters on the left arc.
        let outer = bands
            .iter()
            .find(|b| b.start_edge().and_then(|e| boundary_position(&dg, e)) == Some(n))
            .ok_or_else(|| format!("n={n}: no band at the outermost σ4 edge"))?;
        let got = band_side_label(&dg, outer, Side::Bottom);
        let want = lemma3::sigma4_stage_middle(n);
        ensure(got == want, || format!("n={n}: side reads {got}"))?;
        let by_hand: Word = format!("d^-{n} s2 d^{n} r1 ").repeat(n).parse().unwrap();
        ensure(got == by_hand, || format!("n={n}: side reads {got}, expected {by_hand}"))?;
    }
    Ok("n=1..3: outermost σ4-band side reads (δ^-n s2 δ^n r1)^n".into())
}

fn subdisc_sanity() -> Outcome {
    let full = s4_fragment();
    for r in &full.relators {
        match subdisc_search(&full, &r.word, 1, r.word.len(), SubdiscLimits::default()) {
            Verdict::Found { pieces, .. } if pieces.len() == 1 && pieces[0].area == 1 => {}
            other => return Err(format!("relator {}: {other}", r.word)),
        }
    }
    let core = lemma3::core_presentation();
    let pigeon = subdisc_search(&core, &loop_word(2), 1, 5, SubdiscLimits::default());
    ensure(matches!(pigeon, Verdict::NotFoundWithinLimits { .. }), || format!("pigeonhole case: {pigeon}"))?;
    let cases = [(2, 2, 12, 2), (2, 2, 20, 1), (1, 2, 8, 2), (2, 1, 5, 2)];
    for (n, k, perim, chord) in cases {
        let run = |threads| {
            let limits = SubdiscLimits { max_chord_len: chord, threads, ..SubdiscLimits::default() };
            subdisc_search(&core, &loop_word(n), k, perim, limits)
        };
        let (one, four) = (run(1), run(4));
        ensure(one == four, || format!("n={n} k={k} perim={perim}: 1 thread {one} vs 4 threads {four}"))?;
    }
    Ok(format!(
        "{} relators found at k=1, pigeonhole case not found, {} cases identical on 1 and 4 threads",
        full.relators.len(),
        cases.len()
    ))
}

fn round_trips() -> Outcome {
    for name in ["S1", "S2", "S3", "S4"] {
        let m = smachine::builtin(name).unwrap();
        let text = smachine::serialize_machine(&m);
        let back = smachine::parse_machine(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(back == m && smachine::serialize_machine(&back) == text, || format!("{name}: machine round trip"))?;
    }
    let mut presentations = Vec::new();
    for text in [fixtures::UNARY_TEXT, fixtures::TWO_TAPE_TEXT] {
        let m = tm::parse_tm(text).map_err(|e| e.to_string())?;
        let back = tm::parse_tm(&tm::serialize_tm(&m)).map_err(|e| e.to_string())?;
        ensure(back == m, || format!("{}: Turing machine round trip", m.name))?;
        let w0 = encode::accept_word(&m).map_err(|e| e.to_string())?;
        let sk = skeleton_machine(&m);
        presentations.push(build_presentation(&sk, 2, Some(&w0)).map_err(|e| e.to_string())?);
    }
    for name in ["S1", "S2", "S3", "S4"] {
        presentations.push(build_presentation(&smachine::builtin(name).unwrap(), 0, None).map_err(|e| e.to_string())?);
    }
    for p in &presentations {
        let text = presentation::serialize(p);
        let back = presentation::parse(&text).map_err(|e| e.to_string())?;
        ensure(&back == p && presentation::serialize(&back) == text, || "presentation round trip".into())?;
    }
    let golden = include_str!("golden/s4_fragment.pres");
    ensure(presentation::serialize(&s4_fragment()) == golden, || "S4 fragment differs from golden file".into())?;
    for n in 0..=4 {
        for d in [lemma3_derivation(n), closed_filling(n)] {
            let text = derivation::serialize(&d);
            let back = derivation::parse(&text).map_err(|e| format!("n={n}: {e}"))?;
            ensure(back == d && derivation::serialize(&back) == text, || format!("n={n}: derivation round trip"))?;
        }
    }
    for n in 1..=3 {
        let a = diagram::export_dot(&delta(n)?.0);
        let b = diagram::export_dot(&delta(n)?.0);
        ensure(a == b, || format!("n={n}: DOT output differs between runs"))?;
    }
    let dot = diagram::export_dot(&delta(1)?.0);
    ensure(dot == include_str!("golden/delta_1.dot"), || "Δ_1 DOT differs from golden file".into())?;
    Ok(format!("4 machines, 2 Turing machines, {} presentations, 10 derivations, DOT stable", presentations.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("conjugation identity derivations", lemma3_identity),
        ("area oracle cross-check", oracle_cross_check),
        ("rule round trip", rule_round_trip),
        ("S1 rule3 gating", s1_gating),
        ("component census", census),
        ("hub and encoding", hub_and_encoding),
        ("band structure", band_structure),
        ("band side label", side_label),
        ("subdisc probe sanity", subdisc_sanity),
        ("file round trips", round_trips),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
