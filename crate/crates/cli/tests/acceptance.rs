//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linkrisk_core::anonymity::{
    check_c_plus_d_match, choice_likelihood_in, convergent_subset, is_kd_anonymous, matching_bound, CrossMatrix,
    DistanceMatrix,
};
use linkrisk_core::corpus::normalize;
use linkrisk_core::eval::spearman;
use linkrisk_core::framework::{
    critical_sets, posterior, sigma_satisfies, Adversary, Belief, BeliefSlice, Candidate, EntityModel, Observation,
    PrivacyPolicy, Requirement, Universe, WorldKnowledge,
};
use linkrisk_core::{distance, js, Distribution, NormalizationConfig};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_dist(rng: &mut ChaCha8Rng, vocab: usize, max_support: usize) -> Distribution {
    let support = rng.gen_range(1..=max_support.min(vocab));
    let mut weights = BTreeMap::new();
    while weights.len() < support {
        weights.insert(format!("w{:02}", rng.gen_range(0..vocab)), rng.gen_range(0.01..1.0));
    }
    Distribution::from_weights(weights).unwrap()
}

fn mixture(rng: &mut ChaCha8Rng, a: &Distribution, b: &Distribution) -> Distribution {
    let lambda: f64 = rng.gen_range(0.0..1.0);
    let mut w: BTreeMap<String, f64> = BTreeMap::new();
    for (t, p) in a.iter() {
        *w.entry(t.to_string()).or_default() += lambda * p;
    }
    for (t, p) in b.iter() {
        *w.entry(t.to_string()).or_default() += (1.0 - lambda) * p;
    }
    w.retain(|_, v| *v > 0.0);
    Distribution::from_weights(w).unwrap()
}

fn within(dists: &[Distribution]) -> DistanceMatrix<usize> {
    DistanceMatrix::from_fn((0..dists.len()).collect(), |i, j| distance(&dists[i], &dists[j])).unwrap()
}

fn metric_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_triangle = f64::NEG_INFINITY;
    for n in 0..10_000 {
        let p = random_dist(&mut rng, 30, 12);
        let q = if n % 3 == 0 {
            let noise = random_dist(&mut rng, 30, 12);
            mixture(&mut rng, &p, &noise)
        } else {
            random_dist(&mut rng, 30, 12)
        };
        let r = random_dist(&mut rng, 30, 12);
        let (pq, qr, pr) = (distance(&p, &q), distance(&q, &r), distance(&p, &r));
        check(
            pq == distance(&q, &p) && qr == distance(&r, &q) && pr == distance(&r, &p),
            || format!("asymmetric distance in triple {n}"),
        )?;
        for x in [&p, &q, &r] {
            check(distance(x, x).abs() <= 1e-12, || format!("d(P,P) != 0 in triple {n}"))?;
        }
        for v in [pq, qr, pr] {
            check((0.0..=1.0).contains(&v), || {
                format!("distance {v} outside [0,1] in triple {n}")
            })?;
        }
        for (a, b, c) in [(pr, pq, qr), (pq, pr, qr), (qr, pq, pr)] {
            worst_triangle = worst_triangle.max(a - b - c);
            check(a <= b + c + 1e-9, || {
                format!("triangle inequality fails in triple {n}: {a} > {b} + {c}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "10000 triples in {elapsed:.2?}, max triangle excess {worst_triangle:.3e}"
    ))
}

fn js_extremes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 0..1000 {
        let p = random_dist(&mut rng, 20, 10);
        let shifted: BTreeMap<String, f64> = random_dist(&mut rng, 20, 10)
            .iter()
            .map(|(t, v)| (format!("x{t}"), v))
            .collect();
        let q = Distribution::from_weights(shifted).unwrap();
        let v = js(&p, &q);
        check((v - 1.0).abs() <= 1e-12, || format!("disjoint pair {n}: js = {v}"))?;
    }
    // 50-digit evaluation of the definition with mpmath.
    const ORACLE: f64 = 0.311_278_124_459_132_863_909_695_792_04;
    let p = Distribution::point("a");
    let q = Distribution::from_weights([("a", 0.5), ("b", 0.5)]).unwrap();
    let v = js(&p, &q);
    check((v - ORACLE).abs() <= 1e-9, || {
        format!("worked value {v}, oracle {ORACLE}")
    })?;
    Ok(format!("1000 disjoint pairs at 1 +- 1e-12; worked value {v:.12}"))
}

/// A source community, one target profile and the target's true match in
/// the source community.
struct Instance {
    sources: Vec<Distribution>,
    target: Distribution,
    matched: usize,
}

fn instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(2..=50);
    let target = random_dist(rng, 40, 15);
    let mut sources: Vec<Distribution> = (0..n)
        .map(|_| {
            let base = random_dist(rng, 40, 15);
            if rng.gen_bool(0.3) {
                mixture(rng, &target, &base)
            } else {
                base
            }
        })
        .collect();
    let matched = rng.gen_range(0..n);
    let noise = random_dist(rng, 40, 15);
    sources[matched] = mixture(rng, &target, &noise);
    Instance {
        sources,
        target,
        matched,
    }
}

fn matching_likelihood_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    let mut closest = f64::INFINITY;
    while done < 1000 {
        let inst = instance(&mut rng);
        let m = within(&inst.sources);
        let cross = CrossMatrix::from_fn((0..inst.sources.len()).collect(), vec!["target"], |i, _| {
            distance(&inst.sources[i], &inst.target)
        })
        .unwrap();
        let c = cross.get(inst.matched, 0);
        if c == 0.0 {
            continue;
        }
        // Radius between the nearest and farthest neighbour of the match, so
        // the anonymous subset has at least two members.
        let mut others: Vec<f64> = (0..m.len())
            .filter(|&j| j != inst.matched)
            .map(|j| m.get(inst.matched, j))
            .collect();
        others.sort_by(f64::total_cmp);
        let d = rng.gen_range(others[0]..=others[others.len() - 1]);
        let anon = convergent_subset(&m, &inst.matched, d).unwrap();
        let bound = matching_bound(c, d, anon.k).unwrap();
        let like = choice_likelihood_in(&cross, &anon.members, &"target", &inst.matched).unwrap();
        check(like.score <= bound.t + 1e-9, || {
            format!(
                "instance {done}: likelihood {} exceeds t = {} (c={c}, d={d}, k={})",
                like.score, bound.t, anon.k
            )
        })?;
        closest = closest.min(bound.t - like.score);
        done += 1;
    }
    Ok(format!("1000 instances, smallest margin to t {closest:.3e}"))
}

fn within_c_plus_d() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut members_checked = 0usize;
    for n in 0..1000 {
        let inst = instance(&mut rng);
        let m = within(&inst.sources);
        let targets = vec![inst.target.clone(), random_dist(&mut rng, 40, 15)];
        let cross = CrossMatrix::from_fn((0..inst.sources.len()).collect(), vec![0usize, 1], |i, j| {
            distance(&inst.sources[i], &targets[j])
        })
        .unwrap();
        let anchor = rng.gen_range(0..inst.sources.len());
        let t = rng.gen_range(0..2);
        let c = (cross.get(anchor, t) + rng.gen_range(0.0..0.1)).min(1.0);
        let d = rng.gen_range(0.0..=1.0);
        let set = convergent_subset(&m, &anchor, d).unwrap().members;
        let ok = check_c_plus_d_match(&m, &cross, &anchor, &set, &t, c, d).map_err(|e| format!("instance {n}: {e}"))?;
        check(ok, || format!("instance {n}: c + d check returned false"))?;
        for &i in &set {
            check(cross.get(i, t) <= c + d + 1e-9, || {
                format!("instance {n}: member {i} beyond c + d")
            })?;
            members_checked += 1;
        }
    }
    Ok(format!("1000 instances, {members_checked} members within c + d"))
}

fn superset_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut nontrivial = 0;
    for n in 0..1000 {
        let base: Vec<Distribution> = (0..rng.gen_range(2..=30))
            .map(|_| random_dist(&mut rng, 25, 10))
            .collect();
        let m = within(&base);
        let row = m.row(0);
        let d = row[rng.gen_range(0..row.len())];
        let ball = convergent_subset(&m, &0, d).unwrap();
        let k = rng.gen_range(1..=ball.k);
        check(is_kd_anonymous(&m, &0, k, d).unwrap(), || {
            format!("instance {n}: not anonymous before extension")
        })?;
        nontrivial += (k > 1) as usize;

        let mut extended = base.clone();
        for _ in 0..rng.gen_range(1..=10) {
            let x = random_dist(&mut rng, 25, 10);
            extended.push(if rng.gen_bool(0.5) {
                mixture(&mut rng, &base[0], &x)
            } else {
                x
            });
        }
        let big = within(&extended);
        check(is_kd_anonymous(&big, &0, k, d).unwrap(), || {
            format!("instance {n}: extension destroyed ({k},{d})-anonymity")
        })?;
        let big_ball = convergent_subset(&big, &0, d).unwrap();
        check(ball.members.iter().all(|x| big_ball.members.contains(x)), || {
            format!("instance {n}: anonymous subset shrank")
        })?;
    }
    Ok(format!("1000 extensions, {nontrivial} with k > 1"))
}

fn linkrisk(args: &[&str], workers: Option<&str>) -> Result<std::process::Output, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_linkrisk"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("LINKRISK_WORKERS", w),
        None => cmd.env_remove("LINKRISK_WORKERS"),
    };
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "linkrisk {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out)
}

fn impossibility() -> Outcome {
    let out = linkrisk(&["framework", "impossibility"], None)?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let sd = v["sd"].as_f64().ok_or("no sd in output")?;
    check(sd == 1.0, || format!("SD = {sd}"))?;
    Ok("SD = 1.0".into())
}

/// Every nonempty subset of `dom`, as bit masks.
fn subsets(n: usize) -> impl Iterator<Item = u32> {
    1u32..(1 << n)
}

fn drop_attrs(m: &EntityModel, dom: &[String], mask: u32) -> EntityModel {
    let attrs = dom
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, a)| a.clone())
        .collect();
    m.without(&attrs)
}

fn no_critical_implies_satisfied() -> Outcome {
    let sigmas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let (mut checked, mut vacuous, mut cross_checked, mut universes) = (0usize, 0usize, 0usize, 0usize);
    for n_attr in 1..=4usize {
        for n_val in 1..=3usize {
            universes += 1;
            let values: BTreeMap<String, Vec<String>> = (0..n_attr)
                .map(|a| (format!("a{a}"), (0..n_val).map(|v| format!("v{v}")).collect()))
                .collect();
            let universe = Universe::enumerate(&values);
            let small = universe.len() <= 27;
            for knowledge in [WorldKnowledge::Literal, WorldKnowledge::Consistent] {
                let adv = Adversary {
                    prior: Belief::uniform(universe.clone(), ["P"]),
                    knowledge,
                };
                let posts: Vec<BeliefSlice> = universe
                    .candidates()
                    .iter()
                    .map(|c| posterior(&adv, &Observation::single("P", c.values.clone()), "P"))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                let pos = |m: &EntityModel| universe.position(m).unwrap();
                let empty = pos(&EntityModel::new());
                let requirements: Vec<Requirement> = universe
                    .candidates()
                    .iter()
                    .filter(|c| !c.values.domain().is_empty())
                    .map(|c| Requirement {
                        profile: "P".into(),
                        forbidden: c.values.values().clone(),
                    })
                    .collect();
                // Each observation with its position and the positions of
                // every model obtained by withholding a nonempty subset.
                let observations: Vec<(&EntityModel, usize, Vec<usize>)> = universe
                    .candidates()
                    .iter()
                    .filter(|c| !c.values.domain().is_empty())
                    .map(|c| {
                        let dom: Vec<String> = c.values.domain().into_iter().map(str::to_owned).collect();
                        let reduced = subsets(dom.len())
                            .map(|s| pos(&drop_attrs(&c.values, &dom, s)))
                            .collect();
                        (&c.values, pos(&c.values), reduced)
                    })
                    .collect();
                for r in &requirements {
                    for &sigma in &sigmas {
                        let violated: Vec<bool> = posts.iter().map(|p| !sigma_satisfies(p, r, sigma)).collect();
                        for (observed, at, reduced) in &observations {
                            if violated[empty] {
                                // Withholding everything still violates: the
                                // statement needs a prior that satisfies the
                                // policy.
                                vacuous += 1;
                                continue;
                            }
                            let critical = violated[*at] && reduced.iter().any(|&q| !violated[q]);
                            if !critical {
                                check(!violated[*at], || {
                                    format!(
                                        "{n_attr}x{n_val}: no critical set yet {observed:?} violates {:?} at {sigma}",
                                        r.forbidden
                                    )
                                })?;
                            }
                            checked += 1;
                            if small {
                                let policy = PrivacyPolicy {
                                    requirements: vec![r.clone()],
                                };
                                let lib =
                                    critical_sets("P", observed, &adv, &policy, sigma).map_err(|e| e.to_string())?;
                                check(lib.is_empty() != critical, || {
                                    format!("{n_attr}x{n_val}: critical set search disagrees on {observed:?}")
                                })?;
                                cross_checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{universes} universes, {checked} observation/requirement/sigma cases ({cross_checked} cross-checked, {vacuous} without a satisfying prior)"
    ))
}

fn normalization_golden() -> Outcome {
    let cfg = NormalizationConfig::with_defaults();
    let cases = [
        ("cooooooool", "coool"),
        ("*text*", "text"),
        ("see https://www.mypage.com/a?q=1", "www.mypage.com"),
        ("walrus\n\n```\nrm -rf /tmp/x\n```\n\nbanana", "walrus banana"),
        ("    indented code line\nkeep", "keep"),
        ("`rm -rf`", ""),
        ("great :) game", "great :) game"),
        ("meh -_- bye ^_^", "meh -_- bye ^_^"),
    ];
    for (input, want) in cases {
        let got = normalize(input, &cfg).join(" ");
        check(got == want, || format!("{input:?} -> {got:?}, expected {want:?}"))?;
    }
    Ok(format!("{} golden cases", cases.len()))
}

fn posterior_correctness() -> Outcome {
    let universe = Universe::new(
        ["a".to_string()].into(),
        (0..4)
            .map(|i| Candidate {
                id: format!("m{i}"),
                values: EntityModel::from_pairs([("a", i.to_string())]),
            })
            .collect(),
    )
    .unwrap();
    let adv = Adversary {
        prior: Belief::uniform(universe.clone(), ["P"]),
        knowledge: WorldKnowledge::Table {
            likelihoods: [("m0", 1.0), ("m1", 0.5), ("m2", 0.5), ("m3", 0.0)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        },
    };
    let post = posterior(&adv, &Observation::default(), "P").map_err(|e| e.to_string())?;
    for (got, want) in post.masses().iter().zip([0.5, 0.25, 0.25, 0.0]) {
        check((got - want).abs() <= 1e-12, || format!("posterior {:?}", post.masses()))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 0..1000 {
        let size = rng.gen_range(2..=12);
        let universe = Universe::new(
            ["a".to_string()].into(),
            (0..size)
                .map(|i| Candidate {
                    id: format!("m{i}"),
                    values: EntityModel::from_pairs([("a", i.to_string())]),
                })
                .collect(),
        )
        .unwrap();
        let w: Vec<f64> = (0..size).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        let prior: Vec<f64> = w.iter().map(|x| x / total).collect();
        let likelihoods: BTreeMap<String, f64> = (0..size)
            .map(|i| {
                (
                    format!("m{i}"),
                    if rng.gen_bool(0.2) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.0)
                    },
                )
            })
            .collect();
        if likelihoods.values().zip(&prior).all(|(l, p)| l * p == 0.0) {
            continue;
        }
        let belief = Belief::new(universe, [("P".to_string(), prior.clone())].into()).map_err(|e| e.to_string())?;
        let adv = Adversary {
            prior: belief,
            knowledge: WorldKnowledge::Table {
                likelihoods: likelihoods.clone(),
            },
        };
        let post = posterior(&adv, &Observation::default(), "P").map_err(|e| e.to_string())?;
        let sum: f64 = post.masses().iter().sum();
        check((sum - 1.0).abs() <= 1e-12, || {
            format!("random case {n}: posterior sums to {sum}")
        })?;
        for (i, m) in post.masses().iter().enumerate() {
            if likelihoods[&format!("m{i}")] == 0.0 {
                check(*m == 0.0, || {
                    format!("random case {n}: zero-likelihood model has mass {m}")
                })?;
            }
        }
    }
    Ok("worked example within 1e-12; 1000 random posteriors normalize".into())
}

fn read_csv_rows(path: &Path) -> Result<Vec<BTreeMap<String, String>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty csv")?.split(',').collect();
    Ok(lines
        .map(|l| {
            header
                .iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(str::to_owned))
                .collect()
        })
        .collect())
}

fn run_pipeline(dir: &Path, workers: &str) -> Result<Duration, String> {
    let start = Instant::now();
    let p = |s: &str| dir.join(s).to_string_lossy().into_owned();
    let w = Some(workers);
    linkrisk(
        &[
            "synth",
            "--users",
            "500",
            "--topics",
            "20",
            "--seed",
            "42",
            "--out",
            &p("corpus"),
        ],
        w,
    )?;
    linkrisk(
        &[
            "ingest",
            "--input",
            &p("corpus/a.jsonl"),
            "--input",
            &p("corpus/b.jsonl"),
            "--min-comments",
            "1",
            "--min-profiles",
            "1",
            "--out",
            &p("ingest"),
        ],
        w,
    )?;
    linkrisk(
        &[
            "build-models",
            "--streams",
            &p("ingest/streams.jsonl"),
            "--out",
            &p("models"),
        ],
        w,
    )?;
    linkrisk(
        &[
            "eval",
            "--models",
            &p("models/models.jsonl"),
            "--community-a",
            "a",
            "--community-b",
            "b",
            "--out",
            &p("report"),
        ],
        w,
    )?;
    Ok(start.elapsed())
}

struct Pipeline {
    dir: tempfile::TempDir,
    elapsed: Result<Duration, String>,
}

fn scatter_below_diagonal(run: &Pipeline) -> Outcome {
    let elapsed = run.elapsed.clone()?;
    let rows = read_csv_rows(&run.dir.path().join("report/scatter.csv"))?;
    let below = rows
        .iter()
        .filter(|r| r["matching"].parse::<f64>().unwrap() < r["avg_nonmatching"].parse::<f64>().unwrap())
        .count();
    let frac = below as f64 / rows.len() as f64;
    check(rows.len() == 500, || format!("{} scatter rows", rows.len()))?;
    check(frac >= 0.9, || format!("only {:.1}% below the diagonal", 100.0 * frac))?;
    check(elapsed < Duration::from_secs(300), || {
        format!("pipeline took {elapsed:?}")
    })?;
    Ok(format!(
        "{:.1}% of 500 pairs below the diagonal, pipeline {elapsed:.1?}",
        100.0 * frac
    ))
}

fn anon_size_trend(run: &Pipeline) -> Outcome {
    run.elapsed.clone()?;
    let rows = read_csv_rows(&run.dir.path().join("report/anon_precision.csv"))?;
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r["k"] == "5")
        .map(|r| {
            (
                r["bin_lo"].parse::<f64>().unwrap(),
                r["precision"].parse::<f64>().unwrap(),
            )
        })
        .unzip();
    let rho = spearman(&x, &y).ok_or("correlation undefined")?;
    check(rho <= -0.5, || format!("Spearman {rho:.3} over {} bins", x.len()))?;
    Ok(format!("Spearman {rho:.3} over {} bins (precision@5)", x.len()))
}

fn determinism(a: &Pipeline, b: &Pipeline) -> Outcome {
    a.elapsed.clone()?;
    b.elapsed.clone()?;
    let mut compared = 0;
    for f in [
        "corpus/links.csv",
        "report/links.csv",
        "report/precision.csv",
        "report/anon_precision.csv",
        "report/scatter.csv",
        "ingest/streams.jsonl",
        "models/models.jsonl",
    ] {
        let x = fs::read(a.dir.path().join(f)).map_err(|e| e.to_string())?;
        let y = fs::read(b.dir.path().join(f)).map_err(|e| e.to_string())?;
        check(x == y, || format!("{f} differs between worker counts"))?;
        compared += 1;
    }
    Ok(format!("{compared} outputs byte-identical with 1 and 4 workers"))
}

fn main() {
    let one = tempfile::tempdir().unwrap();
    let elapsed = run_pipeline(one.path(), "1");
    let first = Pipeline { dir: one, elapsed };
    let four = tempfile::tempdir().unwrap();
    let elapsed = run_pipeline(four.path(), "4");
    let second = Pipeline { dir: four, elapsed };

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("metric axioms", Box::new(metric_axioms)),
        ("js extremes", Box::new(js_extremes)),
        ("matching bound", Box::new(matching_likelihood_bound)),
        ("members within c + d", Box::new(within_c_plus_d)),
        ("superset monotonicity", Box::new(superset_monotonicity)),
        ("impossibility", Box::new(impossibility)),
        (
            "no critical attributes => satisfied",
            Box::new(no_critical_implies_satisfied),
        ),
        ("normalization golden suite", Box::new(normalization_golden)),
        (
            "matched vs average scatter",
            Box::new(|| scatter_below_diagonal(&first)),
        ),
        (
            "anonymous subset size vs precision",
            Box::new(|| anon_size_trend(&first)),
        ),
        ("posterior correctness", Box::new(posterior_correctness)),
        (
            "determinism across worker counts",
            Box::new(|| determinism(&first, &second)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        match outcome {
            Ok(msg) => println!("PASS [{:>2}] {name}: {msg} ({took:.1?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {msg} ({took:.1?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
