#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "commlm/corpus.hpp"
#include "commlm/vectorizer.hpp"

namespace commlm {

enum class ClassifierKind { NB, LR, SVM };

std::string_view to_string(ClassifierKind k);
ClassifierKind parse_classifier_kind(std::string_view s);
inline constexpr std::array<ClassifierKind, 3> kAllClassifierKinds = {
    ClassifierKind::NB, ClassifierKind::SVM, ClassifierKind::LR};

struct TrainConfig {
  ClassifierKind kind = ClassifierKind::LR;
  double l2_lambda = 1e-4;
  std::size_t epochs = 20;
  /// Initial SGD step; step t uses learning_rate / (1 + learning_rate * l2_lambda * t).
  double learning_rate = 0.1;
  double nb_alpha = 1.0;
  std::uint64_t seed = 0;

  /// Throws UsageError unless every hyperparameter is strictly positive.
  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Trained binary classifier. Positive decision scores mean Label::positive.
///
/// NB keeps log class priors and Laplace-smoothed log likelihood tables
/// (row 0 = negative, row 1 = positive). LR and SVM keep a dense weight
/// vector and bias.
struct ClassifierModel {
  static constexpr int kFormatVersion = 1;

  ClassifierKind kind = ClassifierKind::LR;
  std::size_t dim = 0;
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_likelihood;
  std::vector<double> weights;
  double bias = 0.0;
  TrainConfig config;
  std::string vectorizer_fingerprint;

  nlohmann::json to_json() const;
  static ClassifierModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static ClassifierModel load(const std::filesystem::path& path);
};

/// Features each classifier consumes: raw term counts for NB (multinomial
/// NB is defined over counts), L2-normalised tf-idf for LR and SVM.
SparseVector featurize(ClassifierKind kind, const TfidfModel& vectorizer, const TokenList& document);

/// Trains on parallel vectors/labels. NB is closed form; LR (logistic loss)
/// and SVM (hinge loss) use L2-regularised SGD with a seeded shuffle per
/// epoch. Throws DataError on single-class input or on a non-finite
/// parameter, naming the epoch.
ClassifierModel train(std::span<const SparseVector> vectors, std::span<const Label> labels,
                      const TrainConfig& config);

/// NB: log P(pos|v) - log P(neg|v). LR/SVM: w.v + b.
/// Throws std::invalid_argument on a dimension mismatch.
double decision_score(const ClassifierModel& model, const SparseVector& v);

/// Positive iff decision_score > 0. A score of exactly 0 is negative.
Label classify(const ClassifierModel& model, const SparseVector& v);

/// Regularised mean logistic loss over a batch, labels mapped to +-1:
///   J(w, b) = (1/n) sum_i log(1 + exp(-y_i (w.x_i + b))) + (lambda/2) |w|^2
/// Exposed for gradient checking; SGD uses the same per-example gradient.
double logistic_objective(std::span<const double> weights, double bias,
                          std::span<const SparseVector> vectors, std::span<const Label> labels,
                          double l2_lambda);

struct LogisticGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

LogisticGradient logistic_gradient(std::span<const double> weights, double bias,
                                   std::span<const SparseVector> vectors,
                                   std::span<const Label> labels, double l2_lambda);

}  // namespace commlm
