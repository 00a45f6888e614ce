#include "commlm/classifiers.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "commlm/error.hpp"
#include "commlm/line_io.hpp"
#include "commlm/rng.hpp"

namespace commlm {

using nlohmann::json;

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::NB: return "NB";
    case ClassifierKind::LR: return "LR";
    case ClassifierKind::SVM: return "SVM";
  }
  return "LR";
}

ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "NB" || s == "nb") return ClassifierKind::NB;
  if (s == "LR" || s == "lr") return ClassifierKind::LR;
  if (s == "SVM" || s == "svm") return ClassifierKind::SVM;
  throw UsageError("unknown classifier '" + std::string(s) + "' (expected NB, LR or SVM)");
}

void TrainConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(l2_lambda)) throw UsageError("l2_lambda must be > 0");
  if (epochs == 0) throw UsageError("epochs must be > 0");
  if (!positive(learning_rate)) throw UsageError("learning_rate must be > 0");
  if (!positive(nb_alpha)) throw UsageError("nb_alpha must be > 0");
  // The per-step shrink factor 1 - eta * lambda must stay positive.
  if (learning_rate * l2_lambda >= 1.0) throw UsageError("learning_rate * l2_lambda must be < 1");
}

json TrainConfig::to_json() const {
  return {{"kind", std::string(to_string(kind))}, {"l2_lambda", l2_lambda}, {"epochs", epochs},
          {"learning_rate", learning_rate},       {"nb_alpha", nb_alpha},   {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  c.kind = parse_classifier_kind(j.at("kind").get<std::string>());
  c.l2_lambda = j.at("l2_lambda").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.nb_alpha = j.at("nb_alpha").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

SparseVector featurize(ClassifierKind kind, const TfidfModel& vectorizer, const TokenList& document) {
  return kind == ClassifierKind::NB ? vectorizer.counts(document) : vectorizer.transform(document);
}

namespace {

double sign_of(Label l) { return l == Label::positive ? 1.0 : -1.0; }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(-z))
double logistic_loss(double z) { return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

ClassifierModel train_nb(std::span<const SparseVector> vectors, std::span<const Label> labels,
                         const TrainConfig& config, std::size_t dim) {
  ClassifierModel m;
  m.kind = ClassifierKind::NB;
  m.dim = dim;
  m.config = config;
  std::array<double, 2> docs{};
  std::array<std::vector<double>, 2> mass{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    docs[c] += 1.0;
    for (const auto& e : vectors[i].entries) mass[c][e.index] += e.weight;
  }
  const double n = docs[0] + docs[1];
  for (std::size_t c = 0; c < 2; ++c) {
    m.log_prior[c] = std::log(docs[c] / n);
    const double total = std::accumulate(mass[c].begin(), mass[c].end(), 0.0);
    const double denom = std::log(total + config.nb_alpha * static_cast<double>(dim));
    m.log_likelihood[c].resize(dim);
    for (std::size_t j = 0; j < dim; ++j) m.log_likelihood[c][j] = std::log(mass[c][j] + config.nb_alpha) - denom;
  }
  return m;
}

ClassifierModel train_sgd(std::span<const SparseVector> vectors, std::span<const Label> labels,
                          const TrainConfig& config, std::size_t dim) {
  const bool hinge = config.kind == ClassifierKind::SVM;
  // w = scale * v, so the L2 shrink is O(1) per step.
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;

  std::vector<std::size_t> order(vectors.size());
  Rng rng(config.seed);
  const double eta0 = config.learning_rate;
  const double lambda = config.l2_lambda;
  std::uint64_t t = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t i : order) {
      const double eta = eta0 / (1.0 + eta0 * lambda * static_cast<double>(t));
      const double y = sign_of(labels[i]);
      const double margin = scale * vectors[i].dot(v) + bias;
      // d loss / d margin
      double g = 0.0;
      if (hinge) g = (y * margin < 1.0) ? -y : 0.0;
      else g = -y * sigmoid(-y * margin);

      scale *= 1.0 - eta * lambda;
      if (g != 0.0) {
        const double step = -eta * g / scale;
        for (const auto& e : vectors[i].entries) v[e.index] += step * e.weight;
        bias -= eta * g;
      }
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
      ++t;
    }
    bool finite = std::isfinite(scale) && std::isfinite(bias);
    for (double w : v) finite = finite && std::isfinite(w);
    if (!finite)
      throw DataError(std::string(to_string(config.kind)) + " training produced non-finite parameters in epoch " +
                      std::to_string(epoch));
  }

  ClassifierModel m;
  m.kind = config.kind;
  m.dim = dim;
  m.config = config;
  m.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) m.weights[j] = scale * v[j];
  m.bias = bias;
  return m;
}

}  // namespace

ClassifierModel train(std::span<const SparseVector> vectors, std::span<const Label> labels,
                      const TrainConfig& config) {
  config.validate();
  if (vectors.size() != labels.size())
    throw DataError("training set has " + std::to_string(vectors.size()) + " vectors but " +
                    std::to_string(labels.size()) + " labels");
  if (vectors.empty()) throw DataError("training set is empty");
  const std::size_t dim = vectors.front().dim;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].dim != dim) throw DataError("training vectors have inconsistent dimensions");
    positives += labels[i] == Label::positive;
  }
  if (positives == 0 || positives == vectors.size())
    throw DataError("training set contains a single class; both labels are required");

  return config.kind == ClassifierKind::NB ? train_nb(vectors, labels, config, dim)
                                           : train_sgd(vectors, labels, config, dim);
}

double decision_score(const ClassifierModel& model, const SparseVector& v) {
  if (v.dim != model.dim)
    throw std::invalid_argument("feature dimension " + std::to_string(v.dim) + " does not match model dimension " +
                                std::to_string(model.dim));
  if (model.kind == ClassifierKind::NB) {
    double pos = model.log_prior[1];
    double neg = model.log_prior[0];
    for (const auto& e : v.entries) {
      pos += e.weight * model.log_likelihood[1][e.index];
      neg += e.weight * model.log_likelihood[0][e.index];
    }
    return pos - neg;
  }
  return v.dot(model.weights) + model.bias;
}

Label classify(const ClassifierModel& model, const SparseVector& v) {
  return decision_score(model, v) > 0.0 ? Label::positive : Label::negative;
}

double logistic_objective(std::span<const double> weights, double bias, std::span<const SparseVector> vectors,
                          std::span<const Label> labels, double l2_lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    loss += logistic_loss(sign_of(labels[i]) * (vectors[i].dot(weights) + bias));
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return loss / static_cast<double>(vectors.size()) + 0.5 * l2_lambda * sq;
}

LogisticGradient logistic_gradient(std::span<const double> weights, double bias,
                                   std::span<const SparseVector> vectors, std::span<const Label> labels,
                                   double l2_lambda) {
  LogisticGradient g;
  g.weights.assign(weights.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const double y = sign_of(labels[i]);
    const double coef = -y * sigmoid(-y * (vectors[i].dot(weights) + bias)) * inv_n;
    for (const auto& e : vectors[i].entries) g.weights[e.index] += coef * e.weight;
    g.bias += coef;
  }
  for (std::size_t j = 0; j < weights.size(); ++j) g.weights[j] += l2_lambda * weights[j];
  return g;
}

// ---------------------------------------------------------------------------

json ClassifierModel::to_json() const {
  json j{{"version", kFormatVersion},
         {"kind", std::string(to_string(kind))},
         {"dim", dim},
         {"config", config.to_json()},
         {"vectorizer_fingerprint", vectorizer_fingerprint}};
  if (kind == ClassifierKind::NB) {
    j["log_prior"] = {{"negative", log_prior[0]}, {"positive", log_prior[1]}};
    j["log_likelihood"] = {{"negative", log_likelihood[0]}, {"positive", log_likelihood[1]}};
  } else {
    j["weights"] = weights;
    j["bias"] = bias;
  }
  return j;
}

ClassifierModel ClassifierModel::from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kFormatVersion)
      throw DataError("unsupported classifier format version " + j.at("version").dump());
    ClassifierModel m;
    m.kind = parse_classifier_kind(j.at("kind").get<std::string>());
    m.dim = j.at("dim").get<std::size_t>();
    m.config = TrainConfig::from_json(j.at("config"));
    m.vectorizer_fingerprint = j.at("vectorizer_fingerprint").get<std::string>();
    if (m.kind == ClassifierKind::NB) {
      m.log_prior = {j.at("log_prior").at("negative").get<double>(), j.at("log_prior").at("positive").get<double>()};
      m.log_likelihood[0] = j.at("log_likelihood").at("negative").get<std::vector<double>>();
      m.log_likelihood[1] = j.at("log_likelihood").at("positive").get<std::vector<double>>();
      if (m.log_likelihood[0].size() != m.dim || m.log_likelihood[1].size() != m.dim)
        throw DataError("likelihood table size does not match dim");
    } else {
      m.weights = j.at("weights").get<std::vector<double>>();
      m.bias = j.at("bias").get<double>();
      if (m.weights.size() != m.dim) throw DataError("weight vector size does not match dim");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed classifier model: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed classifier model: ") + e.what());
  }
}

void ClassifierModel::save(const std::filesystem::path& path) const { write_text_file(path, to_json().dump(1) + "\n"); }

ClassifierModel ClassifierModel::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace commlm
