#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "commlm/classifiers.hpp"
#include "commlm/corpus.hpp"
#include "commlm/textprep.hpp"

namespace commlm {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Positive class is the hateful-community label.
///   precision = 0 when tp + fp = 0; recall = 0 when tp + fn = 0;
///   f1 = 0 when precision + recall = 0;
///   kappa = (p_o - p_e) / (1 - p_e), with kappa = 1 if p_e = p_o = 1 and
///   kappa = 0 if p_e = 1 otherwise.
struct EvalMetrics {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, kappa = 0;
  ConfusionCounts counts;

  static EvalMetrics from_counts(const ConfusionCounts& c);
  nlohmann::json to_json() const;
};

/// Throws DataError on a length mismatch or empty input.
EvalMetrics compute_metrics(std::span<const Label> predicted, std::span<const Label> expected);

/// Unweighted mean of per-fold metrics; counts are pooled.
EvalMetrics mean_metrics(std::span<const EvalMetrics> folds);

/// Hyperparameters shared by every model an experiment trains.
struct PipelineParams {
  std::size_t min_df = 2;
  TrainConfig train;  ///< kind and seed are overwritten per model
  std::size_t jobs = 1;

  nlohmann::json to_json() const;
};

struct FoldResult {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::string vectorizer_fingerprint;
  std::map<ClassifierKind, EvalMetrics> metrics;
};

struct CvResult {
  std::vector<FoldResult> folds;
  std::map<ClassifierKind, EvalMetrics> mean;
  std::map<ClassifierKind, EvalMetrics> pooled;
};

/// Per fold: fit the vectorizer on the training indices only, train each
/// classifier, score the test fold. Fold and model seeds derive from seed.
CvResult cross_validate(const LabeledDataset& dataset, std::size_t k,
                        std::span<const ClassifierKind> kinds, std::uint64_t seed,
                        const PipelineParams& params = {});

struct HoldoutResult {
  std::string vectorizer_fingerprint;
  std::map<ClassifierKind, EvalMetrics> metrics;
};

/// Fits on the whole training set and evaluates on a separate test set.
HoldoutResult train_and_test(const LabeledDataset& train, const LabeledDataset& test,
                             std::span<const ClassifierKind> kinds, std::uint64_t seed,
                             const PipelineParams& params = {});

// ---------------------------------------------------------------------------
// Experiments

/// Where an experiment reads labelled data from: a persisted dataset file,
/// or a positive/negative corpus pair balanced on the fly.
struct DatasetSource {
  std::filesystem::path dataset;
  std::filesystem::path positive;
  std::filesystem::path negative;

  bool is_dataset() const { return !dataset.empty(); }
  nlohmann::json to_json() const;
  static DatasetSource from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  std::vector<std::filesystem::path> paths() const;
  friend bool operator==(const DatasetSource&, const DatasetSource&) = default;
};

enum class ExperimentMode { cv, holdout, imbalanced };
std::string_view to_string(ExperimentMode m);

/// JSON form:
///   {"name": ..., "train": <source>, "test": "cv:10" | <source>,
///    "classifiers": ["NB","SVM","LR"], "seed": 7,
///    "imbalance_ratios": ["1:10", ...]}
/// A source is {"dataset": path} or {"positive": path, "negative": path}.
/// Imbalance ratios require a positive/negative test source.
struct ExperimentSpec {
  std::string name;
  DatasetSource train;
  std::optional<DatasetSource> test;  ///< empty in cv mode
  std::size_t folds = 10;
  std::vector<ClassifierKind> kinds{kAllClassifierKinds.begin(), kAllClassifierKinds.end()};
  std::uint64_t seed = 0;
  std::vector<ImbalanceRatio> imbalance_ratios;

  ExperimentMode mode() const;
  /// Throws UsageError for inconsistent combinations.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                  std::uint64_t default_seed);
};

struct DatasetFingerprint {
  std::size_t size = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::string hash;

  static DatasetFingerprint of(const LabeledDataset& d);
  nlohmann::json to_json() const;
  friend bool operator==(const DatasetFingerprint&, const DatasetFingerprint&) = default;
};

/// Result block for one evaluation (the whole CV run, the held-out test, or
/// one imbalance ratio).
struct EvalSection {
  std::string label;  ///< "cv:10", "holdout", "1:100", ...
  DatasetFingerprint test;
  std::map<ClassifierKind, EvalMetrics> metrics;                  ///< CV: mean of folds
  std::map<ClassifierKind, EvalMetrics> pooled;                   ///< CV only
  std::vector<FoldResult> folds;                                  ///< CV only
  std::string vectorizer_fingerprint;                             ///< non-CV
};

struct EvalReport {
  static constexpr int kSchemaVersion = 1;

  ExperimentSpec spec;
  PipelineParams params;
  DatasetFingerprint train;
  std::vector<EvalSection> sections;
  std::string generated_at;  ///< the only non-deterministic field

  /// Full report. With include_timestamp false the JSON is a pure function
  /// of spec, seeds and data.
  nlohmann::json to_json(bool include_timestamp = true) const;
  static EvalReport from_json(const nlohmann::json& j);
  /// Aligned table: a row per section, accuracy / precision / recall / F1 /
  /// kappa with one sub-column per classifier.
  std::string to_text() const;
  /// section,classifier,accuracy,precision,recall,f1,kappa,tp,fp,tn,fn
  std::string to_csv() const;
};

/// Loads a DatasetSource, balancing corpus pairs with the given
/// preprocessing under the seed.
LabeledDataset resolve_dataset(const DatasetSource& source, const PreprocessConfig& config,
                               std::uint64_t seed);

EvalReport run_experiment(const ExperimentSpec& spec, const PreprocessConfig& preprocess,
                          const PipelineParams& params = {});

struct BaselineDelta {
  std::string name;
  EvalMetrics metrics;
  EvalMetrics delta;  ///< community minus baseline, per metric
  bool community_precision_higher = false;
};

struct BaselineComparison {
  ClassifierKind kind = ClassifierKind::LR;
  std::string section;
  std::string community_name;
  EvalMetrics community;
  std::vector<BaselineDelta> baselines;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Compares one classifier kind across reports evaluated on the same test
/// set (the first section of each report). Throws DataError if the test
/// fingerprints differ or a report lacks the kind.
BaselineComparison compare_baseline(const EvalReport& community,
                                    std::span<const EvalReport> baselines,
                                    ClassifierKind kind = ClassifierKind::LR);

}  // namespace commlm
