#include "commlm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "commlm/classifiers.hpp"
#include "commlm/corpus.hpp"
#include "commlm/error.hpp"
#include "commlm/evaluation.hpp"
#include "commlm/hash.hpp"
#include "commlm/keywords.hpp"
#include "commlm/line_io.hpp"
#include "commlm/rng.hpp"
#include "commlm/synthgen.hpp"
#include "commlm/textprep.hpp"
#include "commlm/topics.hpp"
#include "commlm/vectorizer.hpp"

namespace commlm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Run configuration: defaults < config file < flags.

struct Comparison {
  std::string community;
  std::vector<std::string> baselines;
  ClassifierKind kind = ClassifierKind::LR;
};

struct RunConfig {
  std::uint64_t seed = 0;
  fs::path output_dir = "commlm_out";
  std::size_t jobs = 1;

  fs::path stopwords_file;  // empty: built-in list
  std::set<std::string> bot_authors{"AutoModerator"};
  bool strip_urls = true, strip_digits = true, strip_punct = true, lowercase = true;

  std::size_t min_df = 2;
  TrainConfig train;
  LldaConfig llda;
  std::size_t keyword_k = 30;
  std::size_t keyword_min_df = 5;

  std::vector<json> experiments;
  std::vector<Comparison> comparisons;
  fs::path base_dir;

  PreprocessConfig preprocess_config() const {
    PreprocessConfig c = PreprocessConfig::defaults();
    if (!stopwords_file.empty()) c.stopwords = load_stopwords(stopwords_file);
    c.bot_authors = bot_authors;
    c.strip_urls = strip_urls;
    c.strip_digits = strip_digits;
    c.strip_punct = strip_punct;
    c.lowercase = lowercase;
    return c;
  }

  PipelineParams pipeline_params() const { return {min_df, train, jobs}; }

  json to_json() const {
    json comps = json::array();
    for (const auto& c : comparisons)
      comps.push_back({{"community", c.community}, {"baselines", c.baselines}, {"classifier", std::string(to_string(c.kind))}});
    json t = train.to_json();
    t.erase("kind");
    t.erase("seed");
    json l = llda.to_json();
    l.erase("seed");
    return {{"seed", seed},
            {"output_dir", output_dir.string()},
            {"jobs", jobs},
            {"preprocess",
             {{"stopwords_file", stopwords_file.string()},
              {"bot_authors", bot_authors},
              {"strip_urls", strip_urls},
              {"strip_digits", strip_digits},
              {"strip_punct", strip_punct},
              {"lowercase", lowercase}}},
            {"vectorizer", {{"min_df", min_df}}},
            {"classifier", std::move(t)},
            {"llda", std::move(l)},
            {"keywords", {{"k", keyword_k}, {"min_df", keyword_min_df}}},
            {"experiments", experiments},
            {"comparisons", std::move(comps)}};
  }
};

template <typename F>
void for_each_key(const json& j, const std::string& where, F&& handle) {
  if (!j.is_object()) throw UsageError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!handle(key, value)) throw UsageError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
}

fs::path config_path(const json& v, const fs::path& base) {
  fs::path p(v.get<std::string>());
  return p.empty() || p.is_absolute() ? p : base / p;
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig c;
  c.base_dir = path.parent_path();
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  try {
    for_each_key(j, "", [&](const std::string& key, const json& v) {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "output_dir") c.output_dir = config_path(v, c.base_dir);
      else if (key == "jobs") c.jobs = v.get<std::size_t>();
      else if (key == "preprocess") {
        for_each_key(v, key, [&](const std::string& k, const json& x) {
          if (k == "stopwords_file") c.stopwords_file = config_path(x, c.base_dir);
          else if (k == "bot_authors") c.bot_authors = x.get<std::set<std::string>>();
          else if (k == "strip_urls") c.strip_urls = x.get<bool>();
          else if (k == "strip_digits") c.strip_digits = x.get<bool>();
          else if (k == "strip_punct") c.strip_punct = x.get<bool>();
          else if (k == "lowercase") c.lowercase = x.get<bool>();
          else return false;
          return true;
        });
      } else if (key == "vectorizer") {
        for_each_key(v, key, [&](const std::string& k, const json& x) {
          if (k != "min_df") return false;
          c.min_df = x.get<std::size_t>();
          return true;
        });
      } else if (key == "classifier") {
        for_each_key(v, key, [&](const std::string& k, const json& x) {
          if (k == "l2_lambda") c.train.l2_lambda = x.get<double>();
          else if (k == "epochs") c.train.epochs = x.get<std::size_t>();
          else if (k == "learning_rate") c.train.learning_rate = x.get<double>();
          else if (k == "nb_alpha") c.train.nb_alpha = x.get<double>();
          else return false;
          return true;
        });
      } else if (key == "llda") {
        for_each_key(v, key, [&](const std::string& k, const json& x) {
          if (k == "alpha") c.llda.alpha = x.get<double>();
          else if (k == "beta") c.llda.beta = x.get<double>();
          else if (k == "iterations") c.llda.iterations = x.get<std::size_t>();
          else if (k == "burn_in") c.llda.burn_in = x.get<std::size_t>();
          else return false;
          return true;
        });
      } else if (key == "keywords") {
        for_each_key(v, key, [&](const std::string& k, const json& x) {
          if (k == "k") c.keyword_k = x.get<std::size_t>();
          else if (k == "min_df") c.keyword_min_df = x.get<std::size_t>();
          else return false;
          return true;
        });
      } else if (key == "experiments") {
        if (!v.is_array()) throw UsageError("'experiments' must be an array");
        c.experiments = v.get<std::vector<json>>();
      } else if (key == "comparisons") {
        if (!v.is_array()) throw UsageError("'comparisons' must be an array");
        for (const auto& cj : v) {
          Comparison cmp;
          for_each_key(cj, "comparisons[]", [&](const std::string& k, const json& x) {
            if (k == "community") cmp.community = x.get<std::string>();
            else if (k == "baselines") cmp.baselines = x.get<std::vector<std::string>>();
            else if (k == "classifier") cmp.kind = parse_classifier_kind(x.get<std::string>());
            else return false;
            return true;
          });
          c.comparisons.push_back(std::move(cmp));
        }
      } else {
        return false;
      }
      return true;
    });
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Manifest

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args) : command_(std::move(command)), args_(std::move(args)) {}

  void add_input(const fs::path& p) { inputs_.push_back({{"path", p.string()}, {"fingerprint", file_fingerprint(p)}}); }
  void add_seed(const std::string& stage, std::uint64_t s) { seeds_[stage] = s; }
  void add_artifact(const fs::path& p, const std::string& kind, int version) {
    artifacts_.push_back({{"file", p.filename().string()}, {"kind", kind}, {"format_version", version}});
  }

  void write(const fs::path& dir, const RunConfig& config) const {
    json j{{"tool", "commlm"},
           {"tool_version", kToolVersion},
           {"command", command_},
           {"args", args_},
           {"config", config.to_json()},
           {"inputs", inputs_},
           {"seeds", {{"global", config.seed}, {"stages", seeds_}}},
           {"artifacts", artifacts_}};
    write_text_file(dir / "manifest.json", j.dump(1) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  json inputs_ = json::array();
  std::map<std::string, std::uint64_t> seeds_;
  json artifacts_ = json::array();
};

// ---------------------------------------------------------------------------

struct Context {
  RunConfig config;
  Manifest manifest;
  std::ostream& out;
  std::vector<fs::path> inputs;

  std::uint64_t seed(const std::string& stage) {
    const std::uint64_t s = derive_seed(config.seed, stage);
    manifest.add_seed(stage, s);
    return s;
  }

  /// Validates inputs exist and prepares the output directory. Called
  /// before any work; refuses to write over an input.
  void prepare(std::vector<fs::path> paths) {
    for (const auto& p : paths) {
      if (!fs::exists(p)) throw UsageError("input not found: " + p.string());
      if (fs::is_directory(p)) throw UsageError("input is a directory: " + p.string());
    }
    if (!config.stopwords_file.empty() && !fs::exists(config.stopwords_file))
      throw UsageError("stopword file not found: " + config.stopwords_file.string());
    inputs = std::move(paths);
    if (!config.stopwords_file.empty()) inputs.push_back(config.stopwords_file);
    for (const auto& p : inputs) manifest.add_input(p);
    fs::create_directories(config.output_dir);
  }

  fs::path output(const std::string& name) {
    const fs::path p = config.output_dir / name;
    for (const auto& in : inputs)
      if (fs::exists(p) && fs::equivalent(p, in)) throw UsageError("refusing to overwrite input " + in.string());
    return p;
  }

  void write_json(const std::string& name, const json& j, const std::string& kind, int version) {
    const fs::path p = output(name);
    write_text_file(p, j.dump(1) + "\n");
    manifest.add_artifact(p, kind, version);
  }

  void write_text(const std::string& name, const std::string& text, const std::string& kind) {
    const fs::path p = output(name);
    write_text_file(p, text);
    manifest.add_artifact(p, kind, 1);
  }

  void finish() { manifest.write(config.output_dir, config); }
};

std::vector<TokenList> preprocess_all(const CorpusSlice& slice, const PreprocessConfig& pc) {
  std::vector<TokenList> docs;
  for (const auto& c : filter_noise(slice, pc).comments) {
    TokenList t = preprocess(c.body, pc);
    if (!t.empty()) docs.push_back(std::move(t));
  }
  return docs;
}

std::set<std::string> communities_of(const CorpusSlice& slice) {
  std::set<std::string> out;
  for (const auto& c : slice.comments) out.insert(c.community);
  return out;
}

std::vector<ClassifierKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<ClassifierKind> kinds;
  for (const auto& n : names) kinds.push_back(parse_classifier_kind(n));
  if (kinds.empty()) kinds.assign(kAllClassifierKinds.begin(), kAllClassifierKinds.end());
  return kinds;
}

// ---------------------------------------------------------------------------
// Subcommands

struct SynthArgs {
  SynthSpec spec;
};

void cmd_synth(Context& ctx, SynthArgs a) {
  ctx.prepare({});
  a.spec.seed = ctx.seed("synth");
  const SynthCorpus corpus = generate(a.spec);
  write_synth_corpus(ctx.config.output_dir, a.spec, corpus);
  for (const char* f : {"positive.jsonl", "negative.jsonl", "background.jsonl"})
    ctx.manifest.add_artifact(ctx.config.output_dir / f, "corpus", 1);
  ctx.manifest.add_artifact(ctx.config.output_dir / "truth.json", "synth_truth", 1);
  ctx.out << "wrote " << corpus.positive.size() << " positive, " << corpus.negative.size() << " negative and "
          << corpus.background.size() << " background comments to " << ctx.config.output_dir.string() << '\n';
}

struct IngestArgs {
  fs::path input;
  std::string platform = "reddit";
  std::vector<std::string> communities;
  std::vector<std::string> exclude;
  bool lenient = false;
  std::optional<std::size_t> sample;
  std::string output = "ingested.jsonl";
};

void cmd_ingest(Context& ctx, const IngestArgs& a) {
  const Platform platform = parse_platform(a.platform);
  const ParseMode mode = a.lenient ? ParseMode::lenient : ParseMode::strict;
  ctx.prepare({a.input});
  const fs::path out_path = ctx.output(a.output);
  const std::set<std::string> include(a.communities.begin(), a.communities.end());
  const std::set<std::string> exclude(a.exclude.begin(), a.exclude.end());

  std::size_t kept = 0, skipped = 0;
  if (a.sample) {
    auto sample = reservoir_sample_jsonl(a.input, *a.sample, exclude, platform, mode, ctx.seed("ingest/sample"));
    if (!include.empty()) std::erase_if(sample.comments, [&](const Comment& c) { return !include.contains(c.community); });
    write_jsonl(out_path, sample);
    kept = sample.size();
  } else {
    LineWriter writer(out_path);
    skipped = for_each_comment(a.input, platform, mode, [&](Comment&& c) {
      if (!include.empty() && !include.contains(c.community)) return;
      if (exclude.contains(c.community)) return;
      writer.write_line(comment_to_json(c).dump());
      ++kept;
    });
    writer.close();
  }
  ctx.manifest.add_artifact(out_path, "corpus", 1);
  ctx.out << "kept " << kept << " comments";
  if (a.lenient && !a.sample) ctx.out << ", skipped " << skipped << " malformed lines";
  ctx.out << "; wrote " << out_path.string() << '\n';
}

struct PreprocessArgs {
  fs::path pos, neg;
  std::optional<std::string> ratio;
  std::string output = "dataset.jsonl";
};

void cmd_preprocess(Context& ctx, const PreprocessArgs& a) {
  std::optional<ImbalanceRatio> ratio;
  if (a.ratio) ratio = ImbalanceRatio::parse(*a.ratio);
  ctx.prepare({a.pos, a.neg});
  const PreprocessConfig pc = ctx.config.preprocess_config();
  const auto pos = filter_noise(load_jsonl(a.pos).slice, pc);
  const auto neg = filter_noise(load_jsonl(a.neg).slice, pc);
  const BuiltDataset built = ratio ? build_imbalanced_testset(pos, neg, *ratio, pc, ctx.seed("preprocess/imbalanced"))
                                   : build_balanced(pos, neg, pc, ctx.seed("preprocess/balance"));
  const fs::path out_path = ctx.output(a.output);
  write_dataset(out_path, built.dataset);
  ctx.manifest.add_artifact(out_path, "dataset", 1);
  ctx.out << "dataset: " << built.dataset.count(Label::positive) << " positive, " << built.dataset.count(Label::negative)
          << " negative; dropped " << built.dropped_empty << " empty after preprocessing; wrote " << out_path.string()
          << '\n';
}

struct TopicsArgs {
  fs::path pos, neg;
  std::optional<fs::path> support;
  std::size_t k = 15;
  bool raw_phi = false;
};

void cmd_topics(Context& ctx, const TopicsArgs& a) {
  std::vector<fs::path> inputs{a.pos, a.neg};
  if (a.support) inputs.push_back(*a.support);
  ctx.prepare(inputs);
  const PreprocessConfig pc = ctx.config.preprocess_config();
  const TermRanking ranking = a.raw_phi ? TermRanking::raw_phi : TermRanking::distinctiveness;
  LldaConfig llda = ctx.config.llda;

  const auto pos = load_jsonl(a.pos).slice;
  const auto neg = load_jsonl(a.neg).slice;
  const auto pos_docs = preprocess_all(pos, pc);
  const auto neg_docs = preprocess_all(neg, pc);
  auto name_of = [](const CorpusSlice& s, const std::string& fallback) {
    const auto comms = communities_of(s);
    return comms.size() == 1 ? *comms.begin() : fallback;
  };

  std::vector<TopicColumn> columns;
  if (a.support) {
    // Hate and support communities, each fit against the background.
    const auto sup = load_jsonl(*a.support).slice;
    llda.seed = ctx.seed("topics/positive");
    columns.push_back({name_of(pos, "positive"), community_topics(pos_docs, neg_docs, a.k, llda, ranking)});
    llda.seed = ctx.seed("topics/support");
    columns.push_back({name_of(sup, "support"), community_topics(preprocess_all(sup, pc), neg_docs, a.k, llda, ranking)});
  } else {
    llda.seed = ctx.seed("topics/llda");
    const std::size_t n = std::min(pos_docs.size(), neg_docs.size());
    if (n == 0) throw DataError("topic analysis needs both corpora non-empty after preprocessing");
    Rng rng(derive_seed(llda.seed, "topics/balance"));
    std::vector<TokenList> docs;
    std::vector<std::string> labels;
    for (std::size_t i : sample_indices(pos_docs.size(), n, rng)) {
      docs.push_back(pos_docs[i]);
      labels.emplace_back("positive");
    }
    for (std::size_t i : sample_indices(neg_docs.size(), n, rng)) {
      docs.push_back(neg_docs[i]);
      labels.emplace_back("negative");
    }
    const LldaModel model = fit_llda(docs, labels, llda);
    columns.push_back({name_of(pos, "positive"), top_terms(model, "positive", a.k, ranking)});
    columns.push_back({name_of(neg, "negative"), top_terms(model, "negative", a.k, ranking)});
  }
  const TopicReport report = make_topic_report(std::move(columns), a.k);
  json j = report.to_json();
  j["llda"] = ctx.config.llda.to_json();
  j["ranking"] = a.raw_phi ? "phi" : "distinctiveness";
  ctx.write_json("topics.json", j, "topic_report", 1);
  ctx.write_text("topics.txt", report.to_text(), "topic_table");
  ctx.out << report.to_text();
}

struct KeywordsArgs {
  std::string method = "chi2-i";
  fs::path hate, contrast;
  std::optional<std::size_t> k;
  std::string target;
  std::optional<fs::path> pool;
  std::size_t n_pos = 50000, n_neg = 50000;
};

void cmd_keywords(Context& ctx, const KeywordsArgs& a) {
  const KeywordMethod method = parse_keyword_method(a.method);
  std::vector<fs::path> inputs{a.hate, a.contrast};
  if (a.pool) inputs.push_back(*a.pool);
  ctx.prepare(inputs);
  const PreprocessConfig pc = ctx.config.preprocess_config();
  const auto hate = load_jsonl(a.hate).slice;
  const auto contrast = load_jsonl(a.contrast).slice;

  KeywordParams params;
  params.k = a.k.value_or(ctx.config.keyword_k);
  params.min_df = ctx.config.keyword_min_df;
  params.llda = ctx.config.llda;
  params.llda.seed = ctx.seed("keywords/llda");
  params.target_group = a.target;
  params.source_communities = communities_of(hate);
  for (const auto& c : communities_of(contrast)) params.source_communities.insert(c);

  const KeywordSet set = build_keyword_set(method, preprocess_all(hate, pc), preprocess_all(contrast, pc), params);
  if (set.truncated)
    ctx.out << "warning: only " << set.terms.size() << " candidate keywords available (k=" << set.k << ")\n";
  ctx.write_json("keywords.json", set.to_json(), "keyword_set", 1);
  ctx.write_text("keywords.txt", set.to_plain_list(), "keyword_list");
  ctx.out << "keywords (" << to_string(method) << "):";
  for (const auto& t : set.terms) ctx.out << ' ' << t.term;
  ctx.out << '\n';

  if (a.pool) {
    const auto pool = load_jsonl(*a.pool).slice;
    KeywordMatchCounts counts;
    const LabeledDataset d = keyword_match_dataset(filter_noise(pool, pc), set, a.n_pos, a.n_neg, pc,
                                                   ctx.seed("keywords/match"), &counts);
    const fs::path p = ctx.output("keyword_dataset.jsonl");
    write_dataset(p, d);
    ctx.manifest.add_artifact(p, "dataset", 1);
    ctx.out << "keyword-matched dataset: " << a.n_pos << " positive, " << a.n_neg << " negative (pool had "
            << counts.matching << " matching, " << counts.non_matching << " non-matching)\n";
  }
}

struct TrainArgs {
  fs::path dataset;
  std::vector<std::string> classifiers;
};

void cmd_train(Context& ctx, const TrainArgs& a) {
  const auto kinds = parse_kinds(a.classifiers);
  ctx.config.train.validate();
  ctx.prepare({a.dataset});
  const LabeledDataset d = read_dataset(a.dataset);
  d.validate();
  const TfidfModel vec = TfidfModel::fit(d.documents, ctx.config.min_df);
  const fs::path vec_path = ctx.output("vectorizer.json");
  vec.save(vec_path);
  ctx.manifest.add_artifact(vec_path, "vectorizer", TfidfModel::kFormatVersion);
  for (ClassifierKind kind : kinds) {
    std::vector<SparseVector> x;
    x.reserve(d.size());
    for (const auto& doc : d.documents) x.push_back(featurize(kind, vec, doc));
    TrainConfig cfg = ctx.config.train;
    cfg.kind = kind;
    cfg.seed = ctx.seed("train/" + std::string(to_string(kind)));
    ClassifierModel m = train(x, d.labels, cfg);
    m.vectorizer_fingerprint = vec.fingerprint();
    const fs::path p = ctx.output("model_" + std::string(to_string(kind)) + ".json");
    m.save(p);
    ctx.manifest.add_artifact(p, "classifier", ClassifierModel::kFormatVersion);
    ctx.out << "trained " << to_string(kind) << " on " << d.size() << " documents (" << vec.dim()
            << " features): " << p.string() << '\n';
  }
}

struct EvaluateArgs {
  fs::path model_dir;
  fs::path dataset;
  std::vector<std::string> classifiers;
};

void cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  if (!fs::is_directory(a.model_dir)) throw UsageError("model directory not found: " + a.model_dir.string());
  std::vector<ClassifierKind> kinds;
  if (a.classifiers.empty()) {
    for (auto k : kAllClassifierKinds)
      if (fs::exists(a.model_dir / ("model_" + std::string(to_string(k)) + ".json"))) kinds.push_back(k);
    if (kinds.empty()) throw UsageError("no model_*.json files in " + a.model_dir.string());
  } else {
    kinds = parse_kinds(a.classifiers);
  }
  std::vector<fs::path> inputs{a.dataset, a.model_dir / "vectorizer.json"};
  for (auto k : kinds) inputs.push_back(a.model_dir / ("model_" + std::string(to_string(k)) + ".json"));
  ctx.prepare(inputs);

  const TfidfModel vec = TfidfModel::load(a.model_dir / "vectorizer.json");
  const LabeledDataset d = read_dataset(a.dataset);
  const std::string fp = vec.fingerprint();
  json metrics = json::object();
  std::string table = "classifier  accuracy  precision  recall  f1      kappa\n";
  for (ClassifierKind kind : kinds) {
    const ClassifierModel m = ClassifierModel::load(a.model_dir / ("model_" + std::string(to_string(kind)) + ".json"));
    if (m.vectorizer_fingerprint != fp)
      throw DataError("model " + std::string(to_string(kind)) + " was trained against vectorizer " +
                      m.vectorizer_fingerprint + " but " + (a.model_dir / "vectorizer.json").string() + " is " + fp);
    std::vector<Label> predicted;
    predicted.reserve(d.size());
    for (const auto& doc : d.documents) predicted.push_back(classify(m, featurize(kind, vec, doc)));
    const EvalMetrics em = compute_metrics(predicted, d.labels);
    metrics[std::string(to_string(kind))] = em.to_json();
    char row[128];
    std::snprintf(row, sizeof row, "%-10s  %-8.2f  %-9.2f  %-6.2f  %-6.2f  %.2f\n", std::string(to_string(kind)).c_str(),
                  em.accuracy, em.precision, em.recall, em.f1, em.kappa);
    table += row;
  }
  json j{{"schema_version", 1},
         {"dataset", DatasetFingerprint::of(d).to_json()},
         {"vectorizer_fingerprint", fp},
         {"metrics", std::move(metrics)}};
  ctx.write_json("evaluation.json", j, "evaluation", 1);
  ctx.write_text("evaluation.txt", table, "evaluation_table");
  ctx.out << table;
}

void cmd_experiment(Context& ctx) {
  if (ctx.config.experiments.empty()) throw UsageError("config lists no experiments");
  std::vector<ExperimentSpec> specs;
  std::set<std::string> names;
  std::vector<fs::path> inputs;
  for (const auto& ej : ctx.config.experiments) {
    const std::string name = ej.is_object() ? ej.value("name", std::string{}) : std::string{};
    ExperimentSpec s = ExperimentSpec::from_json(ej, ctx.config.base_dir, derive_seed(ctx.config.seed, "experiment/" + name));
    if (!names.insert(s.name).second) throw UsageError("duplicate experiment name '" + s.name + "'");
    ctx.manifest.add_seed("experiment/" + s.name, s.seed);
    for (const auto& p : s.train.paths()) inputs.push_back(p);
    if (s.test)
      for (const auto& p : s.test->paths()) inputs.push_back(p);
    specs.push_back(std::move(s));
  }
  for (const auto& c : ctx.config.comparisons) {
    if (!names.contains(c.community)) throw UsageError("comparison references unknown experiment '" + c.community + "'");
    for (const auto& b : c.baselines)
      if (!names.contains(b)) throw UsageError("comparison references unknown experiment '" + b + "'");
  }
  ctx.config.train.validate();
  std::sort(inputs.begin(), inputs.end());
  inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
  ctx.prepare(inputs);

  const PreprocessConfig pc = ctx.config.preprocess_config();
  const PipelineParams params = ctx.config.pipeline_params();
  std::map<std::string, EvalReport> reports;
  std::string csv;
  for (const auto& spec : specs) {
    EvalReport r = run_experiment(spec, pc, params);
    ctx.write_json(spec.name + ".report.json", r.to_json(), "eval_report", EvalReport::kSchemaVersion);
    ctx.write_text(spec.name + ".report.txt", r.to_text(), "eval_table");
    const std::string c = r.to_csv();
    csv += csv.empty() ? c : c.substr(c.find('\n') + 1);
    ctx.out << r.to_text() << '\n';
    reports.emplace(spec.name, std::move(r));
  }
  ctx.write_text("metrics.csv", csv, "metric_grid");

  for (const auto& c : ctx.config.comparisons) {
    std::vector<EvalReport> baselines;
    for (const auto& b : c.baselines) baselines.push_back(reports.at(b));
    const BaselineComparison cmp = compare_baseline(reports.at(c.community), baselines, c.kind);
    ctx.write_json("comparison_" + c.community + ".json", cmp.to_json(), "baseline_comparison", 1);
    ctx.write_text("comparison_" + c.community + ".txt", cmp.to_text(), "comparison_table");
    ctx.out << cmp.to_text() << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Community-based hateful speech language models: corpora, topics, keywords, classifiers, experiments"};
  app.name("commlm");
  app.require_subcommand(1);

  std::optional<fs::path> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out_dir;
  std::optional<std::size_t> jobs;
  std::optional<fs::path> stopwords;
  std::optional<std::size_t> min_df;
  std::optional<std::size_t> iterations, burn_in;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON run configuration");
    sub->add_option("--seed", seed, "Global seed (stage seeds derive from it)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--jobs", jobs, "Parallel folds");
    sub->add_option("--stopwords", stopwords, "Stopword file, one term per line");
  };

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic community corpus");
  s_synth->add_option("--n", synth.spec.n_docs, "Documents per side");
  s_synth->add_option("--overlap", synth.spec.overlap_weight, "Probability mass on shared topical vocabulary");
  s_synth->add_option("--core", synth.spec.vocab_core, "Planted terms per side");
  s_synth->add_option("--shared", synth.spec.vocab_shared, "Shared topical terms");
  s_synth->add_option("--min-len", synth.spec.min_length, "Minimum document length");
  s_synth->add_option("--max-len", synth.spec.max_length, "Maximum document length");
  s_synth->add_option("--background", synth.spec.n_background, "Background documents (default: --n)");
  s_synth->add_option("--background-vocab", synth.spec.vocab_background, "Background vocabulary size");
  s_synth->add_option("--background-support", synth.spec.background_support_fraction,
                      "Fraction of background drawn from the support distribution");
  s_synth->add_option("--background-hate", synth.spec.background_hate_fraction,
                      "Fraction of background drawn from the hate distribution");
  s_synth->add_flag("--zipf", synth.spec.zipf, "Zipf weights within term classes");
  add_common(s_synth);

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Filter or sample a JSONL comment dump (.gz supported)");
  s_ingest->add_option("--input", ingest.input, "Input JSONL or JSONL.gz")->required();
  s_ingest->add_option("--platform", ingest.platform, "reddit, voat, forum or other");
  s_ingest->add_option("--community", ingest.communities, "Keep only these communities");
  s_ingest->add_option("--exclude", ingest.exclude, "Drop these communities");
  s_ingest->add_flag("--lenient", ingest.lenient, "Skip malformed lines instead of failing");
  s_ingest->add_option("--sample", ingest.sample, "Reservoir-sample this many comments");
  s_ingest->add_option("--output", ingest.output, "Output file name inside --out");
  add_common(s_ingest);

  PreprocessArgs prep;
  auto* s_prep = app.add_subcommand("preprocess", "Build a labelled dataset from two corpora");
  s_prep->add_option("--pos", prep.pos, "Positive (hate community) corpus")->required();
  s_prep->add_option("--neg", prep.neg, "Negative corpus")->required();
  s_prep->add_option("--ratio", prep.ratio, "Imbalanced test set ratio 1:N (default: balanced)");
  s_prep->add_option("--output", prep.output, "Output file name inside --out");
  add_common(s_prep);

  TopicsArgs topics;
  auto* s_topics = app.add_subcommand("topics", "Top topical terms per community via labeled LDA");
  s_topics->add_option("--pos", topics.pos, "Community corpus")->required();
  s_topics->add_option("--neg", topics.neg, "Background corpus")->required();
  s_topics->add_option("--support", topics.support, "Support community corpus, also fit against --neg");
  s_topics->add_option("--k", topics.k, "Terms per community");
  s_topics->add_flag("--raw-phi", topics.raw_phi, "Rank by topic probability instead of distinctiveness");
  s_topics->add_option("--iterations", iterations, "Gibbs sweeps");
  s_topics->add_option("--burn-in", burn_in, "Sweeps before averaging");
  add_common(s_topics);

  KeywordsArgs kw;
  auto* s_kw = app.add_subcommand("keywords", "Keyword sets and keyword-matched baseline datasets");
  s_kw->add_option("--method", kw.method, "llda, chi2-i or chi2-ii");
  s_kw->add_option("--hate", kw.hate, "Hate community corpus")->required();
  s_kw->add_option("--contrast", kw.contrast, "Background (chi2-i, llda) or support (chi2-ii) corpus")->required();
  s_kw->add_option("--k", kw.k, "Keywords to keep");
  s_kw->add_option("--target", kw.target, "Target group name");
  s_kw->add_option("--pool", kw.pool, "Separate corpus to sample a keyword-matched dataset from");
  s_kw->add_option("--n-pos", kw.n_pos, "Keyword-matching samples");
  s_kw->add_option("--n-neg", kw.n_neg, "Non-matching samples");
  s_kw->add_option("--iterations", iterations, "Gibbs sweeps (llda)");
  s_kw->add_option("--burn-in", burn_in, "Sweeps before averaging (llda)");
  add_common(s_kw);

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "Fit the vectorizer and classifiers on a dataset");
  s_train->add_option("--dataset", tr.dataset, "Dataset JSONL")->required();
  s_train->add_option("--classifier", tr.classifiers, "NB, LR, SVM (default: all)");
  s_train->add_option("--min-df", min_df, "Minimum document frequency");
  add_common(s_train);

  EvaluateArgs ev;
  auto* s_eval = app.add_subcommand("evaluate", "Score trained models on a dataset");
  s_eval->add_option("--model-dir", ev.model_dir, "Directory written by train")->required();
  s_eval->add_option("--dataset", ev.dataset, "Dataset JSONL")->required();
  s_eval->add_option("--classifier", ev.classifiers, "Subset of trained classifiers");
  add_common(s_eval);

  auto* s_exp = app.add_subcommand("experiment", "Run the experiments listed in --config");
  s_exp->add_option("--min-df", min_df, "Minimum document frequency");
  add_common(s_exp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    RunConfig config = config_file ? load_run_config(*config_file) : RunConfig{};
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (jobs) config.jobs = *jobs;
    if (stopwords) config.stopwords_file = *stopwords;
    if (min_df) config.min_df = *min_df;
    if (iterations) config.llda.iterations = *iterations;
    if (burn_in) config.llda.burn_in = *burn_in;
    config.llda.validate();

    Context ctx{std::move(config), Manifest(active->get_name(), args), out, {}};
    const std::string& name = active->get_name();
    if (name == "synth") cmd_synth(ctx, synth);
    else if (name == "ingest") cmd_ingest(ctx, ingest);
    else if (name == "preprocess") cmd_preprocess(ctx, prep);
    else if (name == "topics") cmd_topics(ctx, topics);
    else if (name == "keywords") cmd_keywords(ctx, kw);
    else if (name == "train") cmd_train(ctx, tr);
    else if (name == "evaluate") cmd_evaluate(ctx, ev);
    else if (name == "experiment") {
      if (!config_file) throw UsageError("experiment requires --config");
      cmd_experiment(ctx);
    }
    ctx.finish();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace commlm::cli
