#include "commlm/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <future>
#include <sstream>

#include "commlm/error.hpp"
#include "commlm/rng.hpp"
#include "commlm/vectorizer.hpp"

namespace commlm {

using nlohmann::json;

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

EvalMetrics EvalMetrics::from_counts(const ConfusionCounts& c) {
  EvalMetrics m;
  m.counts = c;
  const auto n = static_cast<double>(c.total());
  if (n == 0) return m;
  const auto tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  m.accuracy = (tp + tn) / n;
  m.precision = c.tp + c.fp == 0 ? 0.0 : tp / (tp + fp);
  m.recall = c.tp + c.fn == 0 ? 0.0 : tp / (tp + fn);
  m.f1 = c.tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
  // p_o = (tp+tn)/n and p_e = chance / n^2, kept in counts until the final division.
  const double agree = tp + tn;
  const double chance = (tp + fp) * (tp + fn) + (tn + fn) * (tn + fp);
  if (chance == n * n) m.kappa = agree == n ? 1.0 : 0.0;
  else m.kappa = (n * agree - chance) / (n * n - chance);
  return m;
}

json EvalMetrics::to_json() const {
  return {{"accuracy", accuracy}, {"precision", precision}, {"recall", recall}, {"f1", f1}, {"kappa", kappa},
          {"tp", counts.tp},      {"fp", counts.fp},        {"tn", counts.tn},  {"fn", counts.fn}};
}

namespace {

EvalMetrics metrics_from_json(const json& j) {
  EvalMetrics m;
  m.accuracy = j.at("accuracy").get<double>();
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.kappa = j.at("kappa").get<double>();
  m.counts = {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("tn").get<std::size_t>(),
              j.at("fn").get<std::size_t>()};
  return m;
}

json metrics_map_json(const std::map<ClassifierKind, EvalMetrics>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[std::string(to_string(k))] = v.to_json();
  return j;
}

std::map<ClassifierKind, EvalMetrics> metrics_map_from_json(const json& j) {
  std::map<ClassifierKind, EvalMetrics> out;
  for (const auto& [k, v] : j.items()) out.emplace(parse_classifier_kind(k), metrics_from_json(v));
  return out;
}

}  // namespace

EvalMetrics compute_metrics(std::span<const Label> predicted, std::span<const Label> expected) {
  if (predicted.size() != expected.size())
    throw DataError("metrics: " + std::to_string(predicted.size()) + " predictions for " +
                    std::to_string(expected.size()) + " labels");
  if (predicted.empty()) throw DataError("metrics: no predictions");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::positive;
    const bool e = expected[i] == Label::positive;
    if (p && e) ++c.tp;
    else if (p) ++c.fp;
    else if (e) ++c.fn;
    else ++c.tn;
  }
  return EvalMetrics::from_counts(c);
}

EvalMetrics mean_metrics(std::span<const EvalMetrics> folds) {
  EvalMetrics m;
  if (folds.empty()) return m;
  for (const auto& f : folds) {
    m.accuracy += f.accuracy;
    m.precision += f.precision;
    m.recall += f.recall;
    m.f1 += f.f1;
    m.kappa += f.kappa;
    m.counts += f.counts;
  }
  const auto n = static_cast<double>(folds.size());
  m.accuracy /= n;
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.kappa /= n;
  return m;
}

json PipelineParams::to_json() const {
  json t = train.to_json();
  t.erase("kind");
  t.erase("seed");
  return {{"min_df", min_df}, {"train", std::move(t)}};
}

// ---------------------------------------------------------------------------
// Train/score pipeline

namespace {

struct TrainedPipeline {
  TfidfModel vectorizer;
  std::map<ClassifierKind, ClassifierModel> models;
};

TrainedPipeline fit_pipeline(std::span<const TokenList> docs, std::span<const Label> labels,
                             std::span<const ClassifierKind> kinds, std::uint64_t seed, const PipelineParams& params) {
  TrainedPipeline p;
  p.vectorizer = TfidfModel::fit(docs, params.min_df);
  const std::string fp = p.vectorizer.fingerprint();
  std::map<bool, std::vector<SparseVector>> features;  // keyed by "is NB"
  for (ClassifierKind kind : kinds) {
    const bool nb = kind == ClassifierKind::NB;
    auto& x = features[nb];
    if (x.empty()) {
      x.reserve(docs.size());
      for (const auto& d : docs) x.push_back(featurize(kind, p.vectorizer, d));
    }
    TrainConfig cfg = params.train;
    cfg.kind = kind;
    cfg.seed = derive_seed(seed, "train/" + std::string(to_string(kind)));
    ClassifierModel m = train(x, labels, cfg);
    m.vectorizer_fingerprint = fp;
    p.models.emplace(kind, std::move(m));
  }
  return p;
}

std::map<ClassifierKind, EvalMetrics> score_pipeline(const TrainedPipeline& p, std::span<const TokenList> docs,
                                                     std::span<const Label> labels) {
  std::map<ClassifierKind, EvalMetrics> out;
  std::vector<Label> predicted(docs.size());
  for (const auto& [kind, model] : p.models) {
    for (std::size_t i = 0; i < docs.size(); ++i) predicted[i] = classify(model, featurize(kind, p.vectorizer, docs[i]));
    out.emplace(kind, compute_metrics(predicted, labels));
  }
  return out;
}

void check_kinds(std::span<const ClassifierKind> kinds) {
  if (kinds.empty()) throw UsageError("no classifier kinds selected");
}

}  // namespace

CvResult cross_validate(const LabeledDataset& dataset, std::size_t k, std::span<const ClassifierKind> kinds,
                        std::uint64_t seed, const PipelineParams& params) {
  check_kinds(kinds);
  dataset.validate();
  const auto folds = kfold_split(dataset, k, derive_seed(seed, "cv/split"));
  CvResult result;
  result.folds.resize(folds.size());

  auto run_fold = [&](std::size_t f) {
    const Fold& fold = folds[f];
    std::vector<TokenList> train_docs, test_docs;
    std::vector<Label> train_labels, test_labels;
    train_docs.reserve(fold.train.size());
    for (std::size_t i : fold.train) {
      train_docs.push_back(dataset.documents[i]);
      train_labels.push_back(dataset.labels[i]);
    }
    for (std::size_t i : fold.test) {
      test_docs.push_back(dataset.documents[i]);
      test_labels.push_back(dataset.labels[i]);
    }
    const auto p = fit_pipeline(train_docs, train_labels, kinds, derive_seed(seed, "cv/fold/" + std::to_string(f)), params);
    FoldResult& r = result.folds[f];
    r.train_size = fold.train.size();
    r.test_size = fold.test.size();
    r.vectorizer_fingerprint = p.vectorizer.fingerprint();
    r.metrics = score_pipeline(p, test_docs, test_labels);
  };

  const std::size_t jobs = std::max<std::size_t>(1, params.jobs);
  if (jobs == 1) {
    for (std::size_t f = 0; f < folds.size(); ++f) run_fold(f);
  } else {
    for (std::size_t start = 0; start < folds.size(); start += jobs) {
      std::vector<std::future<void>> batch;
      for (std::size_t f = start; f < std::min(folds.size(), start + jobs); ++f)
        batch.push_back(std::async(std::launch::async, run_fold, f));
      for (auto& b : batch) b.get();
    }
  }

  for (ClassifierKind kind : kinds) {
    std::vector<EvalMetrics> per_fold;
    ConfusionCounts pooled;
    for (const auto& f : result.folds) {
      per_fold.push_back(f.metrics.at(kind));
      pooled += f.metrics.at(kind).counts;
    }
    result.mean[kind] = mean_metrics(per_fold);
    result.pooled[kind] = EvalMetrics::from_counts(pooled);
  }
  return result;
}

HoldoutResult train_and_test(const LabeledDataset& train, const LabeledDataset& test,
                             std::span<const ClassifierKind> kinds, std::uint64_t seed, const PipelineParams& params) {
  check_kinds(kinds);
  train.validate();
  test.validate();
  const auto p = fit_pipeline(train.documents, train.labels, kinds, derive_seed(seed, "holdout"), params);
  return {p.vectorizer.fingerprint(), score_pipeline(p, test.documents, test.labels)};
}

// ---------------------------------------------------------------------------
// Experiment specs

namespace {

std::filesystem::path resolve_path(const json& v, const std::filesystem::path& base_dir) {
  std::filesystem::path p(v.get<std::string>());
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw UsageError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

json DatasetSource::to_json() const {
  if (is_dataset()) return {{"dataset", dataset.string()}};
  return {{"positive", positive.string()}, {"negative", negative.string()}};
}

DatasetSource DatasetSource::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw UsageError("dataset source must be an object");
  reject_unknown(j, {"dataset", "positive", "negative"}, "dataset source");
  DatasetSource s;
  if (j.contains("dataset")) {
    if (j.contains("positive") || j.contains("negative"))
      throw UsageError("dataset source takes either 'dataset' or 'positive'+'negative', not both");
    s.dataset = resolve_path(j.at("dataset"), base_dir);
  } else {
    if (!j.contains("positive") || !j.contains("negative"))
      throw UsageError("dataset source needs 'dataset' or both 'positive' and 'negative'");
    s.positive = resolve_path(j.at("positive"), base_dir);
    s.negative = resolve_path(j.at("negative"), base_dir);
  }
  return s;
}

std::vector<std::filesystem::path> DatasetSource::paths() const {
  if (is_dataset()) return {dataset};
  return {positive, negative};
}

std::string_view to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::cv: return "cv";
    case ExperimentMode::holdout: return "holdout";
    case ExperimentMode::imbalanced: return "imbalanced";
  }
  return "cv";
}

ExperimentMode ExperimentSpec::mode() const {
  if (!test) return ExperimentMode::cv;
  return imbalance_ratios.empty() ? ExperimentMode::holdout : ExperimentMode::imbalanced;
}

void ExperimentSpec::validate() const {
  if (name.empty()) throw UsageError("experiment needs a name");
  if (kinds.empty()) throw UsageError("experiment '" + name + "' selects no classifiers");
  if (mode() == ExperimentMode::cv && folds < 2) throw UsageError("experiment '" + name + "': cv needs k >= 2");
  if (!test && !imbalance_ratios.empty())
    throw UsageError("experiment '" + name + "': imbalance ratios need a positive/negative test source");
  if (mode() == ExperimentMode::imbalanced && test->is_dataset())
    throw UsageError("experiment '" + name + "': imbalance ratios need a positive/negative test source");
}

json ExperimentSpec::to_json() const {
  json kinds_json = json::array();
  for (auto k : kinds) kinds_json.push_back(std::string(to_string(k)));
  json j{{"name", name}, {"train", train.to_json()}, {"classifiers", std::move(kinds_json)}, {"seed", seed}};
  j["test"] = test ? test->to_json() : json("cv:" + std::to_string(folds));
  if (!imbalance_ratios.empty()) {
    json r = json::array();
    for (const auto& x : imbalance_ratios) r.push_back(x.str());
    j["imbalance_ratios"] = std::move(r);
  }
  return j;
}

ExperimentSpec ExperimentSpec::from_json(const json& j, const std::filesystem::path& base_dir,
                                         std::uint64_t default_seed) {
  if (!j.is_object()) throw UsageError("experiment must be a JSON object");
  reject_unknown(j, {"name", "train", "test", "classifiers", "seed", "imbalance_ratios"}, "experiment");
  ExperimentSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    s.train = DatasetSource::from_json(j.at("train"), base_dir);
    const json test = j.value("test", json("cv:10"));
    if (test.is_string()) {
      const auto t = test.get<std::string>();
      if (!t.starts_with("cv:")) throw UsageError("experiment test must be \"cv:K\" or a dataset source");
      try {
        s.folds = std::stoul(t.substr(3));
      } catch (const std::exception&) {
        throw UsageError("invalid fold count in '" + t + "'");
      }
    } else {
      s.test = DatasetSource::from_json(test, base_dir);
      if (*s.test == s.train) throw UsageError("experiment '" + s.name + "': test equals train; use \"cv:K\"");
    }
    if (j.contains("classifiers")) {
      s.kinds.clear();
      for (const auto& k : j.at("classifiers")) s.kinds.push_back(parse_classifier_kind(k.get<std::string>()));
    }
    s.seed = j.value("seed", default_seed);
    if (j.contains("imbalance_ratios"))
      for (const auto& r : j.at("imbalance_ratios")) s.imbalance_ratios.push_back(ImbalanceRatio::parse(r.get<std::string>()));
  } catch (const json::exception& e) {
    throw UsageError("invalid experiment: " + std::string(e.what()));
  }
  s.validate();
  return s;
}

DatasetFingerprint DatasetFingerprint::of(const LabeledDataset& d) {
  return {d.size(), d.count(Label::positive), d.count(Label::negative), d.fingerprint()};
}

json DatasetFingerprint::to_json() const {
  return {{"size", size}, {"positives", positives}, {"negatives", negatives}, {"hash", hash}};
}

namespace {

DatasetFingerprint fingerprint_from_json(const json& j) {
  return {j.at("size").get<std::size_t>(), j.at("positives").get<std::size_t>(),
          j.at("negatives").get<std::size_t>(), j.at("hash").get<std::string>()};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fmt_signed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports

json EvalReport::to_json(bool include_timestamp) const {
  json sections_json = json::array();
  for (const auto& s : sections) {
    json sj{{"label", s.label}, {"test", s.test.to_json()}, {"metrics", metrics_map_json(s.metrics)}};
    if (!s.folds.empty()) {
      sj["pooled"] = metrics_map_json(s.pooled);
      json folds = json::array();
      for (const auto& f : s.folds)
        folds.push_back({{"train_size", f.train_size},
                         {"test_size", f.test_size},
                         {"vectorizer_fingerprint", f.vectorizer_fingerprint},
                         {"metrics", metrics_map_json(f.metrics)}});
      sj["folds"] = std::move(folds);
    } else {
      sj["vectorizer_fingerprint"] = s.vectorizer_fingerprint;
    }
    sections_json.push_back(std::move(sj));
  }
  json j{{"schema_version", kSchemaVersion},
         {"experiment", spec.to_json()},
         {"mode", std::string(to_string(spec.mode()))},
         {"params", params.to_json()},
         {"train", train.to_json()},
         {"sections", std::move(sections_json)}};
  if (include_timestamp) j["generated_at"] = generated_at;
  return j;
}

EvalReport EvalReport::from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
      throw DataError("unsupported report schema version " + j.at("schema_version").dump());
    EvalReport r;
    r.spec = ExperimentSpec::from_json(j.at("experiment"), {}, 0);
    r.params.min_df = j.at("params").at("min_df").get<std::size_t>();
    const auto& t = j.at("params").at("train");
    r.params.train.l2_lambda = t.at("l2_lambda").get<double>();
    r.params.train.epochs = t.at("epochs").get<std::size_t>();
    r.params.train.learning_rate = t.at("learning_rate").get<double>();
    r.params.train.nb_alpha = t.at("nb_alpha").get<double>();
    r.train = fingerprint_from_json(j.at("train"));
    for (const auto& sj : j.at("sections")) {
      EvalSection s;
      s.label = sj.at("label").get<std::string>();
      s.test = fingerprint_from_json(sj.at("test"));
      s.metrics = metrics_map_from_json(sj.at("metrics"));
      if (sj.contains("folds")) {
        s.pooled = metrics_map_from_json(sj.at("pooled"));
        for (const auto& fj : sj.at("folds")) {
          FoldResult f;
          f.train_size = fj.at("train_size").get<std::size_t>();
          f.test_size = fj.at("test_size").get<std::size_t>();
          f.vectorizer_fingerprint = fj.at("vectorizer_fingerprint").get<std::string>();
          f.metrics = metrics_map_from_json(fj.at("metrics"));
          s.folds.push_back(std::move(f));
        }
      } else {
        s.vectorizer_fingerprint = sj.value("vectorizer_fingerprint", std::string{});
      }
      r.sections.push_back(std::move(s));
    }
    r.generated_at = j.value("generated_at", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "Experiment: " << spec.name << " (" << to_string(spec.mode()) << ")\n";
  os << "Train: " << train.size << " documents (" << train.positives << " positive, " << train.negatives
     << " negative)\n\n";

  std::vector<ClassifierKind> kinds = spec.kinds;
  static constexpr const char* kHeads[] = {"Accuracy", "Precision", "Recall", "F1-Score", "Cohen's kappa"};
  const std::size_t cell = 6;
  const std::size_t group = std::max<std::size_t>(kinds.size() * cell, 14);
  std::size_t label_w = 8;
  for (const auto& s : sections) label_w = std::max(label_w, s.label.size());

  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  os << pad("Test", label_w) << " |";
  for (const char* h : kHeads) os << ' ' << pad(h, group) << " |";
  os << '\n' << pad("", label_w) << " |";
  for (std::size_t h = 0; h < 5; ++h) {
    std::string sub;
    for (auto k : kinds) sub += pad(std::string(to_string(k)), cell);
    os << ' ' << pad(sub, group) << " |";
  }
  os << '\n' << std::string(label_w + 5 * (group + 3) + 2, '-') << '\n';
  for (const auto& s : sections) {
    os << pad(s.label, label_w) << " |";
    for (std::size_t h = 0; h < 5; ++h) {
      std::string sub;
      for (auto k : kinds) {
        auto it = s.metrics.find(k);
        if (it == s.metrics.end()) {
          sub += pad("-", cell);
          continue;
        }
        const EvalMetrics& m = it->second;
        const double v = h == 0 ? m.accuracy : h == 1 ? m.precision : h == 2 ? m.recall : h == 3 ? m.f1 : m.kappa;
        sub += pad(fmt2(v), cell);
      }
      os << ' ' << pad(sub, group) << " |";
    }
    os << "  (n=" << s.test.size << ")\n";
  }
  return os.str();
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os << "experiment,section,classifier,accuracy,precision,recall,f1,kappa,tp,fp,tn,fn\n";
  for (const auto& s : sections)
    for (const auto& [k, m] : s.metrics)
      os << spec.name << ',' << s.label << ',' << to_string(k) << ',' << fmt4(m.accuracy) << ',' << fmt4(m.precision)
         << ',' << fmt4(m.recall) << ',' << fmt4(m.f1) << ',' << fmt4(m.kappa) << ',' << m.counts.tp << ','
         << m.counts.fp << ',' << m.counts.tn << ',' << m.counts.fn << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Running experiments

LabeledDataset resolve_dataset(const DatasetSource& source, const PreprocessConfig& config, std::uint64_t seed) {
  if (source.is_dataset()) return read_dataset(source.dataset);
  const auto pos = filter_noise(load_jsonl(source.positive).slice, config);
  const auto neg = filter_noise(load_jsonl(source.negative).slice, config);
  return build_balanced(pos, neg, config, seed).dataset;
}

namespace {

/// Keeps comments that survive noise filtering and preprocess to tokens.
CorpusSlice usable(const CorpusSlice& slice, const PreprocessConfig& config) {
  CorpusSlice out = filter_noise(slice, config);
  std::erase_if(out.comments, [&](const Comment& c) { return preprocess(c.body, config).empty(); });
  return out;
}

}  // namespace

EvalReport run_experiment(const ExperimentSpec& spec, const PreprocessConfig& preprocess_config,
                          const PipelineParams& params) {
  spec.validate();
  EvalReport report;
  report.spec = spec;
  report.params = params;
  report.generated_at = utc_timestamp();

  const LabeledDataset train = resolve_dataset(spec.train, preprocess_config, derive_seed(spec.seed, "dataset/train"));
  report.train = DatasetFingerprint::of(train);

  switch (spec.mode()) {
    case ExperimentMode::cv: {
      CvResult cv = cross_validate(train, spec.folds, spec.kinds, derive_seed(spec.seed, "cv"), params);
      EvalSection s;
      s.label = "cv:" + std::to_string(spec.folds);
      s.test = report.train;
      s.metrics = std::move(cv.mean);
      s.pooled = std::move(cv.pooled);
      s.folds = std::move(cv.folds);
      report.sections.push_back(std::move(s));
      break;
    }
    case ExperimentMode::holdout: {
      const LabeledDataset test = resolve_dataset(*spec.test, preprocess_config, derive_seed(spec.seed, "dataset/test"));
      HoldoutResult h = train_and_test(train, test, spec.kinds, spec.seed, params);
      EvalSection s;
      s.label = "holdout";
      s.test = DatasetFingerprint::of(test);
      s.metrics = std::move(h.metrics);
      s.vectorizer_fingerprint = std::move(h.vectorizer_fingerprint);
      report.sections.push_back(std::move(s));
      break;
    }
    case ExperimentMode::imbalanced: {
      const CorpusSlice pos = usable(load_jsonl(spec.test->positive).slice, preprocess_config);
      const CorpusSlice neg = usable(load_jsonl(spec.test->negative).slice, preprocess_config);
      const auto pipeline = fit_pipeline(train.documents, train.labels, spec.kinds, derive_seed(spec.seed, "holdout"), params);
      for (const auto& ratio : spec.imbalance_ratios) {
        const std::size_t cap = std::min(pos.size(), neg.size() / ratio.negatives_per_positive);
        if (cap == 0)
          throw DataError("ratio " + ratio.str() + " needs at least " + std::to_string(ratio.negatives_per_positive) +
                          " negatives and one positive; test corpora have " + std::to_string(neg.size()) +
                          " negatives and " + std::to_string(pos.size()) + " positives");
        const auto test = build_imbalanced_testset(pos, neg, ratio, preprocess_config,
                                                   derive_seed(spec.seed, "dataset/test/" + ratio.str()), cap)
                              .dataset;
        EvalSection s;
        s.label = ratio.str();
        s.test = DatasetFingerprint::of(test);
        s.metrics = score_pipeline(pipeline, test.documents, test.labels);
        s.vectorizer_fingerprint = pipeline.vectorizer.fingerprint();
        report.sections.push_back(std::move(s));
      }
      break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Baseline comparison

namespace {

EvalMetrics subtract(const EvalMetrics& a, const EvalMetrics& b) {
  EvalMetrics d;
  d.accuracy = a.accuracy - b.accuracy;
  d.precision = a.precision - b.precision;
  d.recall = a.recall - b.recall;
  d.f1 = a.f1 - b.f1;
  d.kappa = a.kappa - b.kappa;
  return d;
}

json five(const EvalMetrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"kappa", m.kappa}};
}

const EvalSection& first_section(const EvalReport& r) {
  if (r.sections.empty()) throw DataError("report '" + r.spec.name + "' has no results");
  return r.sections.front();
}

const EvalMetrics& metrics_for(const EvalReport& r, ClassifierKind kind) {
  const auto& s = first_section(r);
  auto it = s.metrics.find(kind);
  if (it == s.metrics.end())
    throw DataError("report '" + r.spec.name + "' has no " + std::string(to_string(kind)) + " results");
  return it->second;
}

}  // namespace

BaselineComparison compare_baseline(const EvalReport& community, std::span<const EvalReport> baselines,
                                    ClassifierKind kind) {
  BaselineComparison c;
  c.kind = kind;
  c.community_name = community.spec.name;
  c.section = first_section(community).label;
  c.community = metrics_for(community, kind);
  const DatasetFingerprint& test = first_section(community).test;
  for (const auto& b : baselines) {
    if (!(first_section(b).test == test))
      throw DataError("report '" + b.spec.name + "' was evaluated on a different test set (" + first_section(b).test.hash +
                      ") than '" + community.spec.name + "' (" + test.hash + "); comparison is invalid");
    BaselineDelta d;
    d.name = b.spec.name;
    d.metrics = metrics_for(b, kind);
    d.delta = subtract(c.community, d.metrics);
    d.community_precision_higher = c.community.precision > d.metrics.precision;
    c.baselines.push_back(std::move(d));
  }
  return c;
}

json BaselineComparison::to_json() const {
  json rows = json::array();
  for (const auto& b : baselines)
    rows.push_back({{"name", b.name},
                    {"metrics", five(b.metrics)},
                    {"delta", five(b.delta)},
                    {"community_precision_higher", b.community_precision_higher}});
  return {{"classifier", std::string(to_string(kind))},
          {"section", section},
          {"community", {{"name", community_name}, {"metrics", five(community)}}},
          {"baselines", std::move(rows)}};
}

std::string BaselineComparison::to_text() const {
  std::size_t w = community_name.size();
  for (const auto& b : baselines) w = std::max(w, b.name.size());
  w = std::max<std::size_t>(w, 8);
  auto pad = [](std::string s, std::size_t n) {
    if (s.size() < n) s.append(n - s.size(), ' ');
    return s;
  };
  std::ostringstream os;
  os << "Baseline comparison (" << to_string(kind) << ", " << section << ")\n";
  os << pad("Training", w) << "  Acc    Pre    Rec    F1     kappa\n";
  auto row = [&](const std::string& name, const EvalMetrics& m) {
    os << pad(name, w) << "  " << pad(fmt2(m.accuracy), 7) << pad(fmt2(m.precision), 7) << pad(fmt2(m.recall), 7)
       << pad(fmt2(m.f1), 7) << fmt2(m.kappa) << '\n';
  };
  row(community_name, community);
  for (const auto& b : baselines) row(b.name, b.metrics);
  os << "\nCommunity minus baseline\n";
  for (const auto& b : baselines)
    os << pad(b.name, w) << "  " << pad(fmt_signed(b.delta.accuracy), 7) << pad(fmt_signed(b.delta.precision), 7)
       << pad(fmt_signed(b.delta.recall), 7) << pad(fmt_signed(b.delta.f1), 7) << fmt_signed(b.delta.kappa)
       << (b.community_precision_higher ? "  precision higher" : "  precision NOT higher") << '\n';
  return os.str();
}

}  // namespace commlm
