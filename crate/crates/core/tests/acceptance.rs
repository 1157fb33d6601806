//! One check per acceptance criterion. Run with `--nocapture` to see the
//! pass/fail lines.

mod common;

use std::time::{Duration, Instant};

use anp_psi::analyzer::{bare_secret_payloads, explore_ceremony, extract_pomset, Trace};
use anp_psi::anp::{make_anp_instance, AnpAssertion, AnpCondition, AnpInstance};
use anp_psi::ceremony::{compile, parse_ceremony, pretty_print, validate, CeremonySpec, CompiledCeremony};
use anp_psi::cli::{run_cli, EXIT_FAILURE, EXIT_NO_COMPLETE_TRACE, EXIT_OK};
use anp_psi::nominal::{Name, Sort};
use anp_psi::pi::{make_pi_instance, PiAssertion};
use anp_psi::psi::{EventId, Process};
use anp_psi::term::Term;
use common::laws::{frame_law, guarded_invisible, instance_laws};
use common::pi_oracle::{oracle_traces, psi_traces};
use common::AnpPool;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str) -> (CeremonySpec, CompiledCeremony) {
    let spec = parse_ceremony(&common::fixture(name)).expect("fixture parses");
    let c = compile(&spec).expect("fixture compiles");
    (spec, c)
}

fn explore(c: &CompiledCeremony) -> Result<Vec<Trace<AnpAssertion>>, String> {
    explore_ceremony(c, 64, 2).map_err(|e| e.to_string())
}

fn cli_code(args: &[&str]) -> i32 {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    run_cli(std::iter::once("anp").chain(args.iter().copied()), &mut out, &mut err, false)
}

fn fixture_arg(name: &str) -> String {
    common::fixture_path(name).to_string_lossy().into_owned()
}

fn anp_instance(pool: &AnpPool) -> AnpInstance {
    let events = pool.records.iter().map(|r| r.event.clone()).collect();
    let probes = vec![AnpCondition::TermEq(pool.messages[0].clone(), pool.messages[1].clone())];
    make_anp_instance(Vec::new(), events, probes)
}

fn instance_laws_hold() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = StdRng::seed_from_u64(1);
    let pool = AnpPool::new();
    let inst = anp_instance(&pool);
    let chans: Vec<Term> = pool.channels.iter().cloned().map(Term::Channel).collect();
    for _ in 0..CASES {
        let (a, b, c) = (pool.assertion(&mut rng), pool.assertion(&mut rng), pool.assertion(&mut rng));
        let m = chans.choose(&mut rng).unwrap();
        let n = chans.choose(&mut rng).unwrap();
        let k = chans.choose(&mut rng).unwrap();
        instance_laws(&inst, true, &a, &b, &c, [m, n, k])?;
    }
    let names: Vec<Term> = ["a", "b", "c", "d", "e"]
        .iter()
        .map(|h| Term::Name(Name::new(Sort::Channel, h)))
        .collect();
    let pi = make_pi_instance(names.iter().filter_map(|t| match t {
        Term::Name(n) => Some(n.clone()),
        _ => None,
    }));
    for _ in 0..CASES {
        let m = names.choose(&mut rng).unwrap();
        let n = names.choose(&mut rng).unwrap();
        let k = names.choose(&mut rng).unwrap();
        instance_laws(&pi, false, &PiAssertion, &PiAssertion, &PiAssertion, [m, n, k])?;
    }
    Ok(format!("{CASES} ANP cases, {CASES} pi cases"))
}

fn frame_laws_hold() -> Outcome {
    const CASES: usize = 500;
    let mut rng = StdRng::seed_from_u64(2);
    let pool = AnpPool::new();
    let inst = anp_instance(&pool);
    for _ in 0..CASES {
        frame_law(&inst, &pool.process(&mut rng, 4))?;
    }
    let ch = Term::Channel(pool.channels[0].clone());
    let m = pool.messages[0].clone();
    for _ in 0..CASES / 5 {
        let a = pool.assertion(&mut rng);
        guarded_invisible(&inst, |p| Process::output(ch.clone(), m.clone(), p), a.clone())?;
        guarded_invisible(&inst, |p| Process::input(ch.clone(), vec![], m.clone(), p), a.clone())?;
        guarded_invisible(&inst, |p| Process::Case(vec![(AnpCondition::done([]), p)]), a.clone())?;
        guarded_invisible(&inst, Process::replicate, a)?;
    }
    Ok(format!("{CASES} random processes, {} guarded assertions", CASES / 5 * 4))
}

fn pi_oracle_agrees() -> Outcome {
    const PROCESSES: usize = 30;
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    let free = [Name::new(Sort::Channel, "a"), Name::new(Sort::Channel, "b")];
    let mut traces = 0;
    for _ in 0..PROCESSES {
        let p = common::random_pi(&mut rng, &free, 3);
        let psi = psi_traces(&p, 4, 2);
        ensure(psi == oracle_traces(&p, 4, 2), || format!("trace sets differ for {p:?}"))?;
        traces += psi.len();
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("{PROCESSES} processes, {traces} traces, {took:.2?}"))
}

fn cap_honest_run() -> Outcome {
    let start = Instant::now();
    let (spec, c) = load("cap.anp");
    let traces = explore(&c)?;
    let complete: Vec<_> = traces.iter().filter(|t| t.complete()).collect();
    ensure(!complete.is_empty(), || "no complete trace".into())?;
    let (recv_fresh, send_pair) = (EventId::new("e2"), EventId::new("e4"));
    for t in &complete {
        let run = extract_pomset(t).map_err(|e| e.to_string())?;
        ensure(run.precedes(&recv_fresh, &send_pair), || "fresh value reception does not precede the keyboard pair".into())?;
        // the pair typed at the reader carries the fresh value received over the cyber channel
        let fresh = &run.elements[&recv_fresh];
        let pair = &run.elements[&send_pair];
        ensure(c.channel_kind(&fresh.channel) == Some("cyb"), || format!("{fresh} is not on a cyber channel"))?;
        ensure(c.channel_kind(&pair.channel) == Some("kyb"), || format!("{pair} is not on a keyboard channel"))?;
        match &pair.payload {
            Term::App(f, args) if &**f == "pair" && args.len() == 2 && args[1] == fresh.payload => {}
            other => return Err(format!("unexpected keyboard payload {other}")),
        }
        for r in &spec.run {
            ensure(run.precedes(&EventId::new(&r.before), &EventId::new(&r.after)), || {
                format!("missing desired pair {} < {}", r.before, r.after)
            })?;
        }
    }
    let code = cli_code(&["verify", &fixture_arg("cap.anp")]);
    ensure(code == EXIT_OK, || format!("verify exited {code}"))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("{} of {} traces complete, {took:.2?}", complete.len(), traces.len()))
}

fn cap_negative_runs() -> Outcome {
    let (_, c) = load("cap_wrong_password.anp");
    let traces = explore(&c)?;
    ensure(!traces.is_empty(), || "wrong password: no traces".into())?;
    ensure(traces.iter().all(|t| !t.complete()), || "wrong password: complete trace".into())?;
    let check = EventId::new("e5");
    ensure(traces.iter().all(|t| t.step_of(&check).is_none()), || {
        "wrong password: password check fired".into()
    })?;
    let code = cli_code(&["verify", &fixture_arg("cap_wrong_password.anp")]);
    ensure(code == EXIT_NO_COMPLETE_TRACE || code == EXIT_FAILURE, || {
        format!("wrong password: verify exited {code}")
    })?;

    let (_, c) = load("cap_bad_response.anp");
    let bad = explore(&c)?;
    ensure(!bad.is_empty(), || "bad response: no traces".into())?;
    let accept = EventId::new("e10");
    ensure(bad.iter().all(|t| t.step_of(&accept).is_none() && !t.complete()), || {
        "bad response: bank accepted".into()
    })?;
    Ok(format!("{} and {} traces, none accepted", traces.len(), bad.len()))
}

fn guards_respect_dependencies() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut checked = 0;
    for _ in 0..10 {
        let spec = common::random_spec(&mut rng, 8);
        let c = compile(&spec).map_err(|d| format!("{d:?}"))?;
        let traces = explore_ceremony(&c, 48, 0).map_err(|e| e.to_string())?;
        for t in &traces {
            for e in &spec.events {
                let Some(at) = t.step_of(&EventId::new(&e.id)) else { continue };
                for d in &e.deps {
                    let before = t.step_of(&EventId::new(d));
                    ensure(before.is_some_and(|b| b < at), || {
                        format!("{} at step {at} but dependency {d} at {before:?}\n{}", e.id, pretty_print(&spec))
                    })?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("10 specs, {checked} traces"))
}

fn secrets_stay_off_the_cyber_channel() -> Outcome {
    let mut traces = 0;
    for f in ["cap.anp", "cap_wrong_password.anp", "cap_bad_response.anp"] {
        let (_, c) = load(f);
        for t in explore(&c)? {
            let leaked = bare_secret_payloads(&c, &t.final_assertion, "cyb");
            ensure(leaked.is_empty(), || format!("{f}: bare secret in {}", leaked[0]))?;
            traces += 1;
        }
    }
    let (_, c) = load("cap.anp");
    let hashed = explore(&c)?.iter().all(|t| {
        t.final_assertion.done().iter().any(|r| {
            c.channel_kind(&r.channel) == Some("cyb")
                && matches!(&r.payload, Term::App(f, args) if &**f == "hash"
                    && matches!(&args[0], Term::Name(n) if n.hint() == "sAB"))
        })
    });
    ensure(hashed, || "the response does not carry the hashed key".into())?;
    Ok(format!("{traces} traces"))
}

fn round_trip_and_golden() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    for i in 0..100 {
        let spec = common::random_spec(&mut rng, 8);
        ensure(validate(&spec).iter().all(|d| !d.is_error()), || format!("spec {i} invalid"))?;
        let text = pretty_print(&spec);
        let back = parse_ceremony(&text).map_err(|d| format!("spec {i}: {d:?}"))?;
        ensure(back == spec, || format!("spec {i} changed:\n{text}"))?;
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args = ["anp", "run", &fixture_arg("cap.anp"), "--format", "json"];
    run_cli(args, &mut out, &mut err, false);
    let golden = std::fs::read(common::golden_path("cap_run.json")).map_err(|e| e.to_string())?;
    ensure(out == golden, || "JSON output differs from golden".into())?;
    Ok("100 specs, golden byte-identical".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("instance laws", instance_laws_hold),
        ("frame laws", frame_laws_hold),
        ("pi oracle equivalence", pi_oracle_agrees),
        ("CAP honest run", cap_honest_run),
        ("CAP negative runs", cap_negative_runs),
        ("guard ordering", guards_respect_dependencies),
        ("secret non-escape", secrets_stay_off_the_cyber_channel),
        ("round trip and golden output", round_trip_and_golden),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                println!("[FAIL] criterion {}: {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
