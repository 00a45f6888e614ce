// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and sizes are the pinned acceptance values.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "../oracles.hpp"
#include "../test_support.hpp"
#include "commlm/classifiers.hpp"
#include "commlm/cli.hpp"
#include "commlm/corpus.hpp"
#include "commlm/evaluation.hpp"
#include "commlm/hash.hpp"
#include "commlm/keywords.hpp"
#include "commlm/line_io.hpp"
#include "commlm/rng.hpp"
#include "commlm/synthgen.hpp"
#include "commlm/textprep.hpp"
#include "commlm/topics.hpp"
#include "commlm/vectorizer.hpp"

using namespace commlm;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Collects failure notes for one criterion.
struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
  void note(const std::string& s) {
    if (ok) detail = detail.empty() ? s : detail + "; " + s;
  }
};

std::vector<TokenList> tokens_of(const CorpusSlice& s, const PreprocessConfig& pc) {
  std::vector<TokenList> out;
  for (const auto& c : s.comments) {
    auto t = preprocess(c.body, pc);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

CorpusSlice renamed(CorpusSlice s, const std::string& community) {
  for (auto& c : s.comments) c.community = community;
  return s;
}

LldaConfig llda_defaults(std::uint64_t seed) {
  LldaConfig c;
  c.seed = seed;
  return c;
}

/// Current resident set size in kB.
long rss_kb() {
  long pages = 0, resident = 0;
  if (std::FILE* f = std::fopen("/proc/self/statm", "r")) {
    if (std::fscanf(f, "%ld %ld", &pages, &resident) != 2) resident = 0;
    std::fclose(f);
  }
  return resident * (sysconf(_SC_PAGESIZE) / 1024);
}

// ---------------------------------------------------------------------------

Check metric_oracle() {
  Check c;
  const auto t0 = Clock::now();
  Rng rng(1001);
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    const std::size_t n = 1 + rng.below(1000);
    std::vector<Label> p(n), y(n);
    const double bias = rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = Label(rng.uniform() < bias);
      p[i] = Label(rng.below(2));
    }
    const auto m = compute_metrics(p, y);
    const auto t = oracle::tally(p, y);
    c.require(m.counts.tp == t.tp && m.counts.fp == t.fp && m.counts.tn == t.tn && m.counts.fn == t.fn,
              "count mismatch in trial " + std::to_string(trial));
    for (auto [a, b] : {std::pair{m.accuracy, t.accuracy}, {m.precision, t.precision}, {m.recall, t.recall},
                        {m.f1, t.f1}, {m.kappa, t.kappa}})
      c.require(std::abs(a - b) <= 1e-12, "ratio mismatch in trial " + std::to_string(trial));
  }
  const double secs = seconds_since(t0);
  c.require(secs < 5.0, "runtime " + fmt("%.2f s", secs));
  const auto ex = EvalMetrics::from_counts({40, 20, 30, 10});
  c.require(ex.kappa == 0.40, "worked example kappa " + fmt("%.17g", ex.kappa));
  c.require(ex.accuracy == 0.70 && ex.recall == 0.80, "worked example accuracy/recall");
  c.note("1000 random vectors in " + fmt("%.2f s", secs) + ", worked example kappa " + fmt("%.2f", ex.kappa));
  return c;
}

Check nb_oracle() {
  Check c;
  Rng rng(2002);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenList> docs;
    std::vector<Label> labels;
    const std::size_t n = 2 + rng.below(19);
    for (std::size_t i = 0; i < n; ++i) {
      TokenList d;
      const std::size_t len = 1 + rng.below(10);
      for (std::size_t t = 0; t < len; ++t) d.push_back("v" + std::to_string(rng.below(10)));
      docs.push_back(d);
      labels.push_back(i == 0 ? Label::positive : i == 1 ? Label::negative : Label(rng.below(2)));
    }
    const double alpha = 0.1 + 2 * rng.uniform();
    const auto vec = TfidfModel::fit(docs, 1);
    std::vector<SparseVector> x;
    for (const auto& d : docs) x.push_back(featurize(ClassifierKind::NB, vec, d));
    TrainConfig cfg;
    cfg.kind = ClassifierKind::NB;
    cfg.nb_alpha = alpha;
    const auto model = train(x, labels, cfg);
    for (int q = 0; q < 5; ++q) {
      TokenList query;
      const std::size_t len = rng.below(8);
      for (std::size_t t = 0; t < len; ++t) query.push_back("v" + std::to_string(rng.below(12)));
      const double s = decision_score(model, featurize(ClassifierKind::NB, vec, query));
      const double lp = s >= 0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s));
      worst = std::max(worst, std::abs(lp - oracle::nb_log_posterior_positive(docs, labels, query, alpha, 1)));
    }
  }
  c.require(worst <= 1e-9, "max log-posterior difference " + fmt("%.3g", worst));
  c.note("100 corpora, max log-posterior difference " + fmt("%.2g", worst));
  return c;
}

Check lr_gradient() {
  Check c;
  Rng rng(3003);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 2 + rng.below(8), n = 2 + rng.below(10);
    std::vector<SparseVector> xs;
    std::vector<std::vector<double>> dense;
    std::vector<Label> labels;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      SparseVector v;
      v.dim = dim;
      std::vector<double> row(dim, 0.0);
      for (std::uint32_t j = 0; j < dim; ++j)
        if (rng.uniform() < 0.7) {
          row[j] = 2 * rng.uniform() - 1;
          v.entries.push_back({j, row[j]});
        }
      xs.push_back(v);
      dense.push_back(row);
      labels.push_back(Label(rng.below(2)));
      y.push_back(labels.back() == Label::positive ? 1 : -1);
    }
    std::vector<double> w(dim);
    for (auto& v : w) v = 2 * rng.uniform() - 1;
    const double b = rng.uniform() - 0.5, lambda = 1e-3 + 0.1 * rng.uniform();
    const auto g = logistic_gradient(w, b, xs, labels, lambda);
    const double h = 1e-6;
    auto rel = [](double a, double e) { return std::abs(a - e) / std::max(1e-8, std::abs(a) + std::abs(e)); };
    for (std::size_t j = 0; j <= dim; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < dim) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double fd = (oracle::logistic_loss(wp, bp, dense, y, lambda) - oracle::logistic_loss(wm, bm, dense, y, lambda)) / (2 * h);
      worst = std::max(worst, rel(j < dim ? g.weights[j] : g.bias, fd));
    }
  }
  c.require(worst <= 1e-5, "max relative error " + fmt("%.3g", worst));
  c.note("50 instances, max relative error " + fmt("%.2g", worst));
  return c;
}

Check llda_oracle() {
  Check c;
  const auto t0 = Clock::now();
  Rng rng(4004);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TokenList> docs;
    std::vector<std::string> labels;
    const std::size_t n = 3 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
      TokenList d;
      const std::size_t len = 1 + rng.below(12);
      for (std::size_t t = 0; t < len; ++t) d.push_back("t" + std::to_string(rng.below(25)));
      docs.push_back(d);
      labels.push_back(i < 2 ? std::string(1, char('a' + i)) : std::string(1, char('a' + rng.below(4))));
    }
    LldaConfig cfg = llda_defaults(trial);
    cfg.beta = 0.01 + rng.uniform();
    const auto m = fit_llda(docs, labels, cfg);
    for (const auto& [label, row] : oracle::smoothed_label_frequencies(docs, labels, cfg.beta)) {
      const auto k = m.label_index(label);
      for (std::size_t w = 0; w < m.vocab.size(); ++w) worst = std::max(worst, std::abs(m.phi[k][w] - row.at(m.vocab[w])));
    }
  }
  c.require(worst <= 1e-6, "max phi deviation " + fmt("%.3g", worst));

  SynthSpec spec;
  spec.n_docs = 250;
  spec.overlap_weight = 0.3;
  spec.seed = 4005;
  const auto corpus = generate(spec);
  const auto pc = PreprocessConfig::defaults();
  std::vector<TokenList> docs = tokens_of(corpus.positive, pc);
  std::vector<std::string> labels(docs.size(), "pos");
  for (auto& d : tokens_of(corpus.negative, pc)) {
    docs.push_back(std::move(d));
    labels.emplace_back("neg");
  }
  const auto m = fit_llda(docs, labels, llda_defaults(4006));
  std::size_t worst_hits = 20;
  for (const auto& [label, planted] : {std::pair{"pos", corpus.truth.positive_core}, {"neg", corpus.truth.negative_core}}) {
    std::size_t hits = 0;
    for (const auto& t : top_terms(m, label, 20)) hits += std::count(planted.begin(), planted.end(), t.term);
    worst_hits = std::min(worst_hits, hits);
  }
  c.require(worst_hits >= 18, "planted recovery " + std::to_string(worst_hits) + "/20");
  const double secs = seconds_since(t0);
  c.require(secs < 30.0, "runtime " + fmt("%.1f s", secs));
  c.note("max phi deviation " + fmt("%.2g", worst) + ", planted recovery " + std::to_string(worst_hits) +
         "/20 at 500 docs, " + fmt("%.1f s", secs));
  return c;
}

Check chi2_oracle() {
  Check c;
  Rng rng(5005);
  std::vector<TokenList> pos, neg;
  for (int i = 0; i < 10; ++i) {
    TokenList d;
    const std::size_t len = 1 + rng.below(6);
    for (std::size_t t = 0; t < len; ++t) d.push_back("w" + std::to_string(rng.below(9)));
    (i < 5 ? pos : neg).push_back(d);
  }
  const auto lib = chi2_scores(pos, neg, 1);
  const auto ref = oracle::chi2(pos, neg, 1);
  c.require(lib == ref, "10-document scores differ from brute force");

  std::vector<TokenList> p50(50, TokenList{"t", "half"}), n50(50, TokenList{"x"});
  for (int i = 0; i < 25; ++i) {
    p50[i].pop_back();
    n50[i].push_back("half");
  }
  const auto s = chi2_scores(p50, n50, 1);
  c.require(s.at("t") == 100.0, "perfect association gives " + fmt("%g", s.at("t")));
  c.require(s.at("half") == 0.0, "independence gives " + fmt("%g", s.at("half")));
  c.note(std::to_string(ref.size()) + " terms exact; perfect association " + fmt("%g", s.at("t")) + " = N");
  return c;
}

Check jaccard() {
  Check c;
  c.require(jaccard_index({"a", "b", "c"}, {"b", "c", "d"}) == 0.5, "{a,b,c} vs {b,c,d}");
  c.require(jaccard_index({"a", "b", "c"}, {"a", "b", "c"}) == 1.0, "identical sets");
  c.require(jaccard_index({}, {}) == 0.0, "both empty");
  c.require(jaccard_index({"a"}, {}) == 0.0, "one empty");
  c.require(jaccard_index({"a", "b"}, {"c"}) == 0.0, "disjoint");
  c.require(jaccard_index({"a", "b", "c", "d"}, {"a", "b", "e"}) == 0.4, "2 of 5");
  c.note("0.5, 1.0, empty and disjoint conventions exact");
  return c;
}

Check vocabulary_overlap() {
  Check c;
  const auto pc = PreprocessConfig::defaults();
  std::vector<double> ji;
  for (double overlap : {0.0, 0.3, 0.7}) {
    SynthSpec spec;
    spec.n_docs = 1000;
    spec.overlap_weight = overlap;
    spec.seed = 7007;
    const auto corpus = generate(spec);
    const auto bg = tokens_of(corpus.background, pc);
    std::set<std::string> hate, support;
    for (const auto& t : community_topics(tokens_of(corpus.positive, pc), bg, 15, llda_defaults(7008))) hate.insert(t.term);
    for (const auto& t : community_topics(tokens_of(corpus.negative, pc), bg, 15, llda_defaults(7009))) support.insert(t.term);
    ji.push_back(jaccard_index(hate, support));
  }
  c.require(ji[0] == 0.0, "JI at overlap 0 is " + fmt("%.2f", ji[0]));
  c.require(ji[0] <= ji[1] && ji[1] <= ji[2], "JI not monotone");
  c.note("top-15 JI " + fmt("%.2f", ji[0]) + " / " + fmt("%.2f", ji[1]) + " / " + fmt("%.2f", ji[2]) +
         " at overlap 0 / 0.3 / 0.7");
  return c;
}

/// Community-trained LR vs top-30 chi2-I keyword-baseline LR, same test set.
std::pair<double, double> precision_gap_run(std::uint64_t seed) {
  const auto pc = PreprocessConfig::defaults();
  SynthSpec spec;
  spec.n_docs = 5000;
  spec.overlap_weight = 0.6;
  spec.background_support_fraction = 0.2;
  spec.background_hate_fraction = 0.02;
  spec.seed = derive_seed(seed, "precision-gap/train");
  const auto train_corpus = generate(spec);

  spec.seed = derive_seed(seed, "precision-gap/test");
  spec.n_docs = 1000;
  spec.n_background = 1000;
  const auto test_corpus = generate(spec);
  const LabeledDataset test = build_balanced(test_corpus.positive, test_corpus.background, pc, derive_seed(seed, "test")).dataset;

  spec.seed = derive_seed(seed, "precision-gap/pool");
  spec.n_docs = 1;
  spec.n_background = 60000;
  const auto pool = renamed(generate(spec).background, "pool");

  const std::vector<ClassifierKind> lr{ClassifierKind::LR};
  const LabeledDataset community = build_balanced(train_corpus.positive, train_corpus.background, pc, seed).dataset;
  const double community_precision = train_and_test(community, test, lr, seed).metrics.at(ClassifierKind::LR).precision;

  KeywordParams kp;
  kp.k = 30;
  kp.source_communities = {"synth_hate", "synth_background"};
  const auto keywords = build_keyword_set(KeywordMethod::CHI2_I, tokens_of(train_corpus.positive, pc),
                                          tokens_of(train_corpus.background, pc), kp);
  const LabeledDataset baseline = keyword_match_dataset(pool, keywords, 5000, 5000, pc, seed);
  const double baseline_precision = train_and_test(baseline, test, lr, seed).metrics.at(ClassifierKind::LR).precision;
  return {community_precision, baseline_precision};
}

Check precision_gap() {
  Check c;
  std::vector<double> gaps;
  double slowest = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t0 = Clock::now();
    const auto [community, baseline] = precision_gap_run(seed);
    slowest = std::max(slowest, seconds_since(t0));
    gaps.push_back(community - baseline);
    detail += (detail.empty() ? "" : ", ") + fmt("%.3f", community) + " vs " + fmt("%.3f", baseline);
  }
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[2];
  c.require(median >= 0.05, "median precision gap " + fmt("%.3f", median) + " (" + detail + ")");
  c.require(slowest < 120.0, "pipeline runtime " + fmt("%.1f s", slowest));
  c.note("median precision gap " + fmt("%+.3f", median) + " over 5 seeds (" + detail + "), slowest run " +
         fmt("%.1f s", slowest));
  return c;
}

Check separability() {
  Check c;
  const auto pc = PreprocessConfig::defaults();
  SynthSpec spec;
  spec.n_docs = 1000;
  spec.overlap_weight = 0.0;
  spec.seed = 9009;
  const auto corpus = generate(spec);
  LabeledDataset d = build_balanced(corpus.positive, corpus.negative, pc, 9010).dataset;
  const std::vector<ClassifierKind> kinds(kAllClassifierKinds.begin(), kAllClassifierKinds.end());
  const auto cv = cross_validate(d, 10, kinds, 9011);
  std::string acc;
  for (auto k : kinds) {
    const double a = cv.mean.at(k).accuracy;
    c.require(a >= 0.95, std::string(to_string(k)) + " accuracy " + fmt("%.3f", a));
    acc += std::string(acc.empty() ? "" : " ") + std::string(to_string(k)) + "=" + fmt("%.3f", a);
  }
  Rng rng(9012);
  rng.shuffle(d.labels);
  const auto shuffled = cross_validate(d, 10, kinds, 9013);
  std::string kap;
  for (auto k : kinds) {
    const double kappa = shuffled.mean.at(k).kappa;
    c.require(std::abs(kappa) <= 0.1, std::string(to_string(k)) + " shuffled kappa " + fmt("%.3f", kappa));
    kap += std::string(kap.empty() ? "" : " ") + std::string(to_string(k)) + "=" + fmt("%+.3f", kappa);
  }
  c.note("CV accuracy " + acc + " on " + std::to_string(d.size()) + " docs; shuffled kappa " + kap);
  return c;
}

Check determinism() {
  Check c;
  testing::TempDir dir("accept_det");
  const std::string d = dir.path().string();
  std::ostringstream out, err;
  c.require(cli::run({"synth", "--n", "600", "--overlap", "0.3", "--background-support", "0.2", "--seed", "10", "--out",
                      d + "/syn"},
                     out, err) == 0,
            "synth failed: " + err.str());
  write_text_file(dir / "exp.json", R"({
    "seed": 10, "classifier": {"epochs": 10},
    "experiments": [
      {"name": "cv", "train": {"positive": "syn/positive.jsonl", "negative": "syn/background.jsonl"}, "test": "cv:5"},
      {"name": "holdout", "train": {"positive": "syn/positive.jsonl", "negative": "syn/background.jsonl"},
       "test": {"positive": "syn/positive.jsonl", "negative": "syn/negative.jsonl"}}]})");
  for (const char* run : {"a", "b"}) {
    const std::vector<std::string> args{"experiment", "--config", d + "/exp.json", "--out", d + "/" + run, "--jobs",
                                        run[0] == 'a' ? "1" : "4"};
    c.require(cli::run(args, out, err) == 0, std::string("experiment run failed: ") + err.str());
  }
  std::size_t compared = 0;
  for (const char* name : {"cv.report.json", "holdout.report.json"}) {
    auto load = [&](const char* run) {
      json j = json::parse(read_text_file(dir / run / name));
      j.erase("generated_at");
      return j.dump(1);
    };
    c.require(load("a") == load("b"), std::string(name) + " differs between runs");
    ++compared;
  }
  for (const char* name : {"metrics.csv", "cv.report.txt", "holdout.report.txt"}) {
    c.require(read_text_file(dir / "a" / name) == read_text_file(dir / "b" / name), std::string(name) + " differs");
    ++compared;
  }
  c.note(std::to_string(compared) + " report files identical across two runs (jobs 1 and 4), timestamp excluded");
  return c;
}

Check imbalance() {
  Check c;
  testing::TempDir dir("accept_imb");
  SynthSpec spec;
  spec.n_docs = 1000;
  spec.n_background = 25000;
  spec.overlap_weight = 0.3;
  spec.background_support_fraction = 0.1;
  spec.seed = 11011;
  write_synth_corpus(dir.path(), spec, generate(spec));
  SynthSpec test_spec = spec;
  test_spec.seed = 11012;
  std::filesystem::create_directories(dir / "test");
  write_synth_corpus(dir / "test", test_spec, generate(test_spec));

  ExperimentSpec e;
  e.name = "imbalanced";
  e.train.positive = dir / "positive.jsonl";
  e.train.negative = dir / "background.jsonl";
  e.test = DatasetSource{{}, dir / "test/positive.jsonl", dir / "test/background.jsonl"};
  e.imbalance_ratios = {{10}, {100}, {1000}};
  e.seed = 11013;
  const auto report = run_experiment(e, PreprocessConfig::defaults());
  c.require(report.sections.size() == 3, "expected 3 sections");
  std::string detail;
  for (std::size_t i = 0; i < report.sections.size(); ++i) {
    const auto& s = report.sections[i];
    const std::size_t ratio = e.imbalance_ratios[i].negatives_per_positive;
    c.require(s.test.positives > 0 && s.test.negatives == ratio * s.test.positives, s.label + " ratio not exact");
    c.require(s.metrics.size() == 3, s.label + " missing classifier metrics");
    const auto& lr = s.metrics.at(ClassifierKind::LR);
    detail += (detail.empty() ? "" : ", ") + s.label + " (" + std::to_string(s.test.positives) + "+" +
              std::to_string(s.test.negatives) + ", LR P=" + fmt("%.2f", lr.precision) + " R=" + fmt("%.2f", lr.recall) + ")";
  }
  c.require(report.to_csv().find("1:1000") != std::string::npos, "CSV lacks 1:1000 rows");
  c.note(detail);
  return c;
}

Check data_readiness() {
  Check c;
  testing::TempDir dir("accept_io");
  const std::size_t lines = 100000;
  Rng rng(12012);
  std::vector<std::string> words;
  for (int i = 0; i < 500; ++i) words.push_back("w" + std::to_string(i));
  for (const char* name : {"dump.jsonl", "dump.jsonl.gz"}) {
    LineWriter w(dir / name);
    Rng r(12013);
    for (std::size_t i = 0; i < lines; ++i) {
      std::string body;
      const std::size_t len = 5 + r.below(60);
      for (std::size_t t = 0; t < len; ++t) body += words[r.below(words.size())] + (t % 7 == 6 ? ". " : " ");
      if (i % 97 == 0) body = "[deleted]";
      if (i % 89 == 0) body += " caf\xC3\xA9 \"quoted\"\n\ttab \xF0\x9F\x98\x80";
      json rec{{"id", "t1_" + std::to_string(i)},
               {"body", body},
               {"subreddit", "sub" + std::to_string(r.below(40))},
               {"created_utc", 1420070400 + static_cast<std::int64_t>(i)},
               {"author", i % 113 == 0 ? "AutoModerator" : "user" + std::to_string(r.below(5000))},
               {"score", static_cast<int>(r.below(100))},
               {"gilded", 0},
               {"controversiality", 0}};
      if (i % 2) rec["created_utc"] = std::to_string(1420070400 + i);
      w.write_line(rec.dump());
    }
    w.close();
  }

  std::string detail;
  for (const char* name : {"dump.jsonl", "dump.jsonl.gz"}) {
    const auto t0 = Clock::now();
    std::size_t n = 0;
    for_each_comment(dir / name, Platform::reddit, ParseMode::strict, [&](Comment&&) { ++n; });
    const double rate = n / seconds_since(t0);
    c.require(n == lines, std::string(name) + " read " + std::to_string(n) + " lines");
    c.require(rate > 20000, std::string(name) + " ingest rate " + fmt("%.0f lines/s", rate));
    detail += (detail.empty() ? "" : ", ") + std::string(name) + " " + fmt("%.0f lines/s", rate);
  }

  const auto original = load_jsonl(dir / "dump.jsonl.gz").slice;
  write_jsonl(dir / "canonical.jsonl.gz", original);
  const auto back = load_jsonl(dir / "canonical.jsonl.gz").slice;
  c.require(back.comments == original.comments, "canonical round trip lost data");
  write_jsonl(dir / "canonical2.jsonl.gz", back);
  c.require(file_fingerprint(dir / "canonical.jsonl.gz") == file_fingerprint(dir / "canonical2.jsonl.gz"),
            "canonical form not stable");

  // Streaming: a corpus much larger than the reservoir must not raise peak
  // memory anywhere near its body volume.
  const std::size_t big_lines = 200000;
  {
    LineWriter w(dir / "big.jsonl.gz");
    Rng r(12014);
    std::string body;
    for (std::size_t i = 0; i < big_lines; ++i) {
      body.clear();
      for (int t = 0; t < 80; ++t) body += words[r.below(words.size())] + ' ';
      w.write_line(json{{"id", std::to_string(i)}, {"body", body}, {"subreddit", "s"}}.dump());
    }
    w.close();
  }
  const long before = rss_kb();
  long peak = before;
  std::size_t body_bytes = 0, seen = 0;
  for_each_comment(dir / "big.jsonl.gz", Platform::reddit, ParseMode::strict, [&](Comment&& cm) {
    body_bytes += cm.body.size();
    if (++seen % 5000 == 0) peak = std::max(peak, rss_kb());
  });
  const auto sample = reservoir_sample_jsonl(dir / "big.jsonl.gz", 1000, {}, Platform::reddit, ParseMode::strict, 5);
  peak = std::max(peak, rss_kb());
  const long growth_mb = (peak - before) / 1024;
  const double body_mb = body_bytes / 1048576.0;
  c.require(before > 0, "resident set size unavailable");
  c.require(sample.size() == 1000, "reservoir sample size");
  c.require(growth_mb * 10 < body_mb, "peak memory grew " + std::to_string(growth_mb) + " MB streaming " +
                                          fmt("%.0f MB", body_mb) + " of bodies");
  c.note(detail + "; lossless canonical round trip; streamed " + fmt("%.0f MB", body_mb) + " of bodies with " +
         std::to_string(growth_mb) + " MB resident growth");
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"metric oracle", metric_oracle},
      {"naive Bayes oracle", nb_oracle},
      {"logistic gradient check", lr_gradient},
      {"labeled LDA oracle and planted recovery", llda_oracle},
      {"chi-square oracle", chi2_oracle},
      {"Jaccard index", jaccard},
      {"vocabulary overlap grows with shared topics", vocabulary_overlap},
      {"community LR beats keyword baseline on precision", precision_gap},
      {"separability and shuffled-label kappa", separability},
      {"deterministic experiment reports", determinism},
      {"imbalanced test grid", imbalance},
      {"ingestion throughput, round trip and streaming", data_readiness},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = Clock::now();
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failures += !c.ok;
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << ": " << c.detail << " ("
              << fmt("%.1f s", seconds_since(t0)) << ")" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
