use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use linkrisk_core::anonymity::{convergent_subset, matching_bound, CrossMatrix, DistanceMatrix};
use linkrisk_core::corpus::{
    build_streams, filter_interesting, ingest_path, write_jsonl, NormalizationConfig, ProfileKey, Steps, Strictness,
    TokenStream,
};
use linkrisk_core::eval::{self, across_stats, spearman, within_stats, Linkage, SynthConfig};
use linkrisk_core::framework::{impossibility_demo, run_scenario, Scenario};
use linkrisk_core::lm::{build_models, ModelSet};
use linkrisk_core::metric::Vocabulary;
use linkrisk_core::{store, WordList};

use crate::manifest::Manifest;
use crate::{
    AnonymityArgs, BoundArgs, BuildModelsArgs, Cli, Command, DistancesArgs, EvalArgs, FrameworkCommand,
    FrameworkRunArgs, ImpossibilityArgs, IngestArgs, SynthArgs, TopUnigramsArgs,
};

pub fn run(cli: Cli, ignored: &[String]) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("starting worker pool")?;
    let workers = pool.current_num_threads();
    let (manifest, dir) = pool.install(|| dispatch(cli.command))?;
    manifest.finish(dir.as_deref(), workers, ignored)
}

fn dispatch(cmd: Command) -> Result<(Manifest, Option<PathBuf>)> {
    match cmd {
        Command::Ingest(a) => ingest(a),
        Command::BuildModels(a) => build(a),
        Command::TopUnigrams(a) => top_unigrams(a),
        Command::Distances(a) => distances(a),
        Command::Anonymity(a) => anonymity(a),
        Command::Bound(a) => bound(a),
        Command::Eval(a) => evaluate(a),
        Command::Synth(a) => synth(a),
        Command::Framework(FrameworkCommand::Run(a)) => framework_run(a),
        Command::Framework(FrameworkCommand::Impossibility(a)) => impossibility(a),
    }
}

fn make_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Print JSON to stdout, and into `dir/name` when an output directory is set.
fn emit<T: Serialize>(m: &mut Manifest, dir: Option<&Path>, name: &str, value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    if let Some(d) = dir {
        make_dir(d)?;
        let p = d.join(name);
        write_json(&p, value)?;
        m.output(p);
    }
    Ok(())
}

fn load_list(path: Option<&Path>, default: fn() -> WordList) -> Result<WordList> {
    match path {
        Some(p) => WordList::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(default()),
    }
}

fn load_models(path: &Path) -> Result<ModelSet> {
    store::read_models(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn ingest(a: IngestArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let stopwords = load_list(a.stopwords.as_deref(), WordList::default_stopwords)?;
    let smilies = load_list(a.smilies.as_deref(), WordList::default_smilies)?;
    let cfg = NormalizationConfig::new(&stopwords, &smilies, a.max_repeat, Steps::default())?;
    let mode = if a.lenient {
        Strictness::Lenient
    } else {
        Strictness::Strict
    };

    let mut m = Manifest::new("ingest");
    let mut comments = Vec::new();
    let mut skipped = Vec::new();
    for p in &a.input {
        let got = ingest_path(p, mode).with_context(|| format!("reading {}", p.display()))?;
        comments.extend(got.comments);
        skipped.extend(got.errors.iter().map(|e| format!("{}: {e}", p.display())));
        m.input(p);
    }
    let exclude: BTreeSet<String> = a.exclude.iter().cloned().collect();
    let streams = build_streams(&comments, &cfg);
    let (kept, stats) = filter_interesting(streams, a.min_comments, a.min_profiles, &exclude);

    make_dir(&a.out)?;
    let path = a.out.join("streams.jsonl");
    let mut w = create(&path)?;
    for s in kept.values() {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    m.output(&path);
    for s in &skipped {
        eprintln!("skipped {s}");
    }
    m.param("min_comments", a.min_comments)
        .param("min_profiles", a.min_profiles)
        .param("exclude", &a.exclude)
        .param("max_repeat", a.max_repeat)
        .param("lenient", a.lenient)
        .param("stopwords", &a.stopwords)
        .param("smilies", &a.smilies)
        .detail("stopwords_sha256", cfg.stopwords_hash())
        .detail("smilies_sha256", cfg.smilies_hash())
        .detail("stopwords_count", stopwords.len())
        .detail("smilies_count", smilies.len())
        .detail("comments", comments.len())
        .detail("skipped_records", skipped.len())
        .detail("filter", stats);
    Ok((m, Some(a.out)))
}

fn build(a: BuildModelsArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let mut streams = Vec::new();
    let text = fs::read_to_string(&a.streams).with_context(|| format!("reading {}", a.streams.display()))?;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let s: TokenStream =
            serde_json::from_str(line).with_context(|| format!("{} line {}", a.streams.display(), i + 1))?;
        streams.push(s);
    }
    let models = build_models(&streams);
    make_dir(&a.out)?;
    let path = a.out.join("models.jsonl");
    let mut w = create(&path)?;
    store::write_models(&mut w, &models)?;
    w.flush()?;
    let mut m = Manifest::new("build-models");
    m.input(&a.streams)
        .output(&path)
        .detail("profiles", models.profiles.len())
        .detail("communities", models.communities.len())
        .detail("global_tokens", models.global.total());
    Ok((m, Some(a.out)))
}

fn top_unigrams(a: TopUnigramsArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let models = load_models(&a.models)?;
    let model = if a.key == "global" {
        &models.global
    } else if let Some((c, u)) = a.key.split_once('/') {
        models
            .profiles
            .get(&ProfileKey::new(u, c))
            .ok_or_else(|| anyhow!("no profile {}", a.key))?
    } else {
        models
            .communities
            .get(&a.key)
            .ok_or_else(|| anyhow!("no community {:?}", a.key))?
    };
    let top = model.top_k(a.k);
    let mut m = Manifest::new("top-unigrams");
    m.input(&a.models).param("key", &a.key).param("k", a.k);
    let mut out = csv::Writer::from_writer(std::io::stdout());
    out.write_record(["rank", "token", "count"])?;
    for (i, (t, c)) in top.iter().enumerate() {
        out.write_record([(i + 1).to_string(), t.clone(), c.to_string()])?;
    }
    out.flush()?;
    if let Some(d) = &a.out {
        make_dir(d)?;
        let p = d.join("top_unigrams.csv");
        #[derive(Serialize)]
        struct Row<'a> {
            rank: usize,
            token: &'a str,
            count: u64,
        }
        write_csv(
            &p,
            top.iter().enumerate().map(|(i, (t, c))| Row {
                rank: i + 1,
                token: t,
                count: *c,
            }),
        )?;
        m.output(p);
    }
    Ok((m, a.out))
}

#[derive(Serialize)]
struct DistanceRow {
    row: String,
    col: String,
    distance: f64,
}

fn community_dists(models: &ModelSet, community: &str) -> Result<(Vec<ProfileKey>, Vec<linkrisk_core::Distribution>)> {
    let mut keys = Vec::new();
    let mut dists = Vec::new();
    for (k, m) in models.community_profiles(community) {
        if m.is_empty() {
            continue;
        }
        keys.push(k.clone());
        dists.push(m.to_distribution()?);
    }
    if keys.is_empty() {
        bail!("community {community:?} has no nonempty profiles");
    }
    Ok((keys, dists))
}

fn within_matrix(models: &ModelSet, community: &str) -> Result<DistanceMatrix<ProfileKey>> {
    let (keys, dists) = community_dists(models, community)?;
    let vocab = Vocabulary::from_distributions(&dists);
    let idx = dists
        .iter()
        .map(|d| vocab.index(d))
        .collect::<linkrisk_core::Result<Vec<_>>>()?;
    Ok(DistanceMatrix::from_distributions(keys, &idx)?)
}

fn distances(a: DistancesArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let models = load_models(&a.models)?;
    make_dir(&a.out)?;
    let mut m = Manifest::new("distances");
    m.input(&a.models)
        .param("community", &a.community)
        .param("community_b", &a.community_b);
    let matrix_path = a.out.join("distances.lrdm");
    let stats_path = a.out.join("stats.json");
    match &a.community_b {
        None => {
            let mx = within_matrix(&models, &a.community)?;
            store::write_distance_matrix(create(&matrix_path)?, &mx)?;
            let stats = within_stats(&mx)?;
            write_json(&stats_path, &stats)?;
            m.detail("stats", stats).detail("profiles", mx.len());
            if a.csv {
                let p = a.out.join("distances.csv");
                let n = mx.len();
                let keys = mx.keys();
                write_csv(
                    &p,
                    (0..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .map(|(i, j)| DistanceRow {
                            row: keys[i].to_string(),
                            col: keys[j].to_string(),
                            distance: mx.get(i, j),
                        }),
                )?;
                m.output(p);
            }
        }
        Some(b) => {
            let (ka, da) = community_dists(&models, &a.community)?;
            let (kb, db) = community_dists(&models, b)?;
            let vocab = Vocabulary::from_distributions(da.iter().chain(&db));
            let ia = da
                .iter()
                .map(|d| vocab.index(d))
                .collect::<linkrisk_core::Result<Vec<_>>>()?;
            let ib = db
                .iter()
                .map(|d| vocab.index(d))
                .collect::<linkrisk_core::Result<Vec<_>>>()?;
            let mx = CrossMatrix::from_distributions(ka, &ia, kb, &ib)?;
            store::write_cross_matrix(create(&matrix_path)?, &mx)?;
            let stats = across_stats(&mx)?;
            write_json(&stats_path, &stats)?;
            m.detail("stats", stats);
            if a.csv {
                let p = a.out.join("distances.csv");
                let (rows, cols) = (mx.rows(), mx.cols());
                write_csv(
                    &p,
                    (0..rows.len())
                        .flat_map(|i| (0..cols.len()).map(move |j| (i, j)))
                        .map(|(i, j)| DistanceRow {
                            row: rows[i].to_string(),
                            col: cols[j].to_string(),
                            distance: mx.get(i, j),
                        }),
                )?;
                m.output(p);
            }
        }
    }
    m.output(&matrix_path).output(&stats_path);
    Ok((m, Some(a.out)))
}

fn anonymity(a: AnonymityArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let mut m = Manifest::new("anonymity");
    let mx: DistanceMatrix<ProfileKey> = match (&a.matrix, &a.models) {
        (Some(p), _) => {
            m.input(p);
            store::read_distance_matrix(open(p)?).with_context(|| format!("reading {}", p.display()))?
        }
        (None, Some(p)) => {
            m.input(p);
            within_matrix(&load_models(p)?, &a.community)?
        }
        (None, None) => bail!("either --matrix or --models is required"),
    };
    let subject = ProfileKey::new(&a.subject, &a.community);
    let res = convergent_subset(&mx, &subject, a.d)?;
    m.param("community", &a.community)
        .param("subject", &a.subject)
        .param("d", a.d);
    emit(&mut m, a.out.as_deref(), "anonymity.json", &res)?;
    Ok((m, a.out))
}

fn bound(a: BoundArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let b = matching_bound(a.c, a.d, a.k)?;
    println!("c={} d={} k={} t={:.6}", b.c, b.d, b.k, b.t);
    let mut m = Manifest::new("bound");
    m.param("c", a.c).param("d", a.d).param("k", a.k).detail("t", b.t);
    if let Some(d) = &a.out {
        make_dir(d)?;
        let p = d.join("bound.json");
        write_json(&p, &b)?;
        m.output(p);
    }
    Ok((m, a.out))
}

#[derive(Serialize)]
struct LinkRow {
    source: String,
    target: String,
    matching_distance: f64,
    rank: usize,
    anon_size: usize,
}

#[derive(Serialize)]
struct PrecisionRow {
    k: usize,
    pairs: usize,
    precision: f64,
}

#[derive(Serialize)]
struct BinRow {
    k: usize,
    bin_lo: usize,
    bin_hi: usize,
    pairs: usize,
    hits: usize,
    precision: f64,
}

#[derive(Serialize)]
struct ScatterRow {
    source: String,
    target: String,
    avg_nonmatching: f64,
    matching: f64,
}

fn evaluate(a: EvalArgs) -> Result<(Manifest, Option<PathBuf>)> {
    if a.k.is_empty() || a.k.contains(&0) {
        bail!("--k needs positive cutoffs");
    }
    let models = load_models(&a.models)?;
    let linkage = Linkage::build(&models, &a.community_a, &a.community_b)?;
    let details = linkage.link_details()?;
    let scatter = linkage.matched_vs_average_scatter()?;
    make_dir(&a.out)?;
    let mut m = Manifest::new("eval");
    m.input(&a.models)
        .param("community_a", &a.community_a)
        .param("community_b", &a.community_b)
        .param("k", &a.k);

    let p = a.out.join("links.csv");
    write_csv(
        &p,
        details.iter().map(|d| LinkRow {
            source: d.source.to_string(),
            target: d.target.to_string(),
            matching_distance: d.matching_distance,
            rank: d.rank,
            anon_size: d.anon_size,
        }),
    )?;
    m.output(p);

    let mut precision = Vec::new();
    let mut bins = Vec::new();
    let mut correlations = serde_json::Map::new();
    for &k in &a.k {
        precision.push(PrecisionRow {
            k,
            pairs: details.len(),
            precision: linkage.precision_at_k(k)?,
        });
        let report = eval::bin_precision(&details, k);
        let x: Vec<f64> = report.bins.iter().map(|b| b.lo as f64).collect();
        let y: Vec<f64> = report.bins.iter().map(|b| b.precision).collect();
        correlations.insert(k.to_string(), serde_json::to_value(spearman(&x, &y))?);
        bins.extend(report.bins.into_iter().map(|b| BinRow {
            k,
            bin_lo: b.lo,
            bin_hi: b.hi,
            pairs: b.pairs,
            hits: b.hits,
            precision: b.precision,
        }));
    }
    let p = a.out.join("precision.csv");
    write_csv(&p, precision)?;
    m.output(p);
    let p = a.out.join("anon_precision.csv");
    write_csv(&p, bins)?;
    m.output(p);
    let p = a.out.join("scatter.csv");
    write_csv(
        &p,
        scatter.rows.iter().map(|r| ScatterRow {
            source: r.source.to_string(),
            target: r.target.to_string(),
            avg_nonmatching: r.avg_nonmatching,
            matching: r.matching,
        }),
    )?;
    m.output(p);

    let meta = serde_json::json!({
        "community_a": a.community_a,
        "community_b": a.community_b,
        "k": a.k,
        "bin_width": eval::BIN_WIDTH,
        "links": details.len(),
        "skipped_empty_profiles": linkage.skipped_empty.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        "below_diagonal": scatter.below_diagonal,
        "spearman_bin_vs_precision": correlations,
        "within_stats": within_stats(&linkage.within).ok(),
        "across_stats": across_stats(&linkage.cross).ok(),
    });
    let p = a.out.join("report.json");
    write_json(&p, &meta)?;
    m.output(p).detail("below_diagonal", scatter.below_diagonal);
    Ok((m, Some(a.out)))
}

fn synth(a: SynthArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let cfg = SynthConfig {
        users: a.users,
        topics: a.topics,
        comments_per_user: a.comments_per_user,
        idiosyncrasy: a.idiosyncrasy,
        community_shift: a.community_shift,
        seed: a.seed,
        ..SynthConfig::default()
    };
    let corpus = eval::synth_corpus(&cfg)?;
    make_dir(&a.out)?;
    let mut m = Manifest::new("synth");
    for (name, comments) in [("a.jsonl", &corpus.a), ("b.jsonl", &corpus.b)] {
        let p = a.out.join(name);
        let mut w = create(&p)?;
        write_jsonl(&mut w, comments)?;
        w.flush()?;
        m.output(p);
    }
    #[derive(Serialize)]
    struct Row {
        source: String,
        target: String,
    }
    let p = a.out.join("links.csv");
    write_csv(
        &p,
        corpus.links.iter().map(|l| Row {
            source: l.source.to_string(),
            target: l.target.to_string(),
        }),
    )?;
    m.output(p);
    let p = a.out.join("synth.json");
    write_json(&p, &cfg)?;
    m.output(p).param("config", &cfg);
    Ok((m, Some(a.out)))
}

fn framework_run(a: FrameworkRunArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let text = fs::read_to_string(&a.scenario).with_context(|| format!("reading {}", a.scenario.display()))?;
    let scenario = Scenario::from_json(&text).with_context(|| format!("parsing {}", a.scenario.display()))?;
    let report = run_scenario(&scenario)?;
    let mut m = Manifest::new("framework run");
    m.input(&a.scenario).detail("policy_satisfied", report.policy_satisfied);
    emit(&mut m, a.out.as_deref(), "report.json", &report)?;
    Ok((m, a.out))
}

fn impossibility(a: ImpossibilityArgs) -> Result<(Manifest, Option<PathBuf>)> {
    let report = impossibility_demo(&a.x, &a.x_star)?;
    let mut m = Manifest::new("framework impossibility");
    m.param("x", &a.x).param("x_star", &a.x_star).detail("sd", report.sd);
    emit(&mut m, a.out.as_deref(), "impossibility.json", &report)?;
    Ok((m, a.out))
}
