#include "commlm/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "commlm/error.hpp"
#include "commlm/line_io.hpp"
#include "commlm/rng.hpp"

namespace commlm {

using nlohmann::json;

void SynthSpec::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (n_docs < 1 || vocab_core < 1 || vocab_shared < 1 || vocab_background < 1 || min_length < 1)
    throw UsageError("synthetic corpus counts must be >= 1");
  if (min_length > max_length) throw UsageError("synthetic min_length exceeds max_length");
  if (!prob(overlap_weight) || !prob(background_support_fraction) || !prob(background_hate_fraction))
    throw UsageError("synthetic probabilities must lie in [0, 1]");
  if (background_support_fraction + background_hate_fraction > 1.0)
    throw UsageError("background support and hate fractions sum above 1");
}

json SynthSpec::to_json() const {
  return {{"n_docs", n_docs},
          {"vocab_core", vocab_core},
          {"vocab_shared", vocab_shared},
          {"overlap_weight", overlap_weight},
          {"min_length", min_length},
          {"max_length", max_length},
          {"n_background", n_background},
          {"vocab_background", vocab_background},
          {"background_support_fraction", background_support_fraction},
          {"background_hate_fraction", background_hate_fraction},
          {"zipf", zipf},
          {"seed", seed}};
}

SynthSpec SynthSpec::from_json(const json& j) {
  SynthSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_docs") s.n_docs = value.get<std::size_t>();
    else if (key == "vocab_core") s.vocab_core = value.get<std::size_t>();
    else if (key == "vocab_shared") s.vocab_shared = value.get<std::size_t>();
    else if (key == "overlap_weight") s.overlap_weight = value.get<double>();
    else if (key == "min_length") s.min_length = value.get<std::size_t>();
    else if (key == "max_length") s.max_length = value.get<std::size_t>();
    else if (key == "n_background") s.n_background = value.get<std::size_t>();
    else if (key == "vocab_background") s.vocab_background = value.get<std::size_t>();
    else if (key == "background_support_fraction") s.background_support_fraction = value.get<double>();
    else if (key == "background_hate_fraction") s.background_hate_fraction = value.get<double>();
    else if (key == "zipf") s.zipf = value.get<bool>();
    else if (key == "seed") s.seed = value.get<std::uint64_t>();
    else throw UsageError("unknown synth key '" + key + "'");
  }
  s.validate();
  return s;
}

json SynthTruth::to_json() const {
  return {{"positive_core", positive_core}, {"negative_core", negative_core}, {"shared", shared}, {"background", background}};
}

namespace {

/// Alphabetic term names ("posaa", "posab", ...) so they survive
/// preprocessing untouched.
std::vector<std::string> make_terms(const std::string& prefix, std::size_t n) {
  std::size_t width = 2;
  for (std::size_t cap = 26 * 26; cap < n; cap *= 26) ++width;
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string suffix(width, 'a');
    std::size_t v = i;
    for (std::size_t p = width; p-- > 0;) {
      suffix[p] = static_cast<char>('a' + v % 26);
      v /= 26;
    }
    out.push_back(prefix + suffix);
  }
  return out;
}

class TermClass {
 public:
  TermClass(const std::vector<std::string>& terms, bool zipf) : terms_(&terms) {
    double total = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      total += zipf ? 1.0 / static_cast<double>(i + 1) : 1.0;
      cumulative_.push_back(total);
    }
  }

  const std::string& draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), terms_->size() - 1);
    return (*terms_)[i];
  }

 private:
  const std::vector<std::string>* terms_;
  std::vector<double> cumulative_;
};

std::size_t draw_length(const SynthSpec& spec, Rng& rng) {
  return spec.min_length + static_cast<std::size_t>(rng.below(spec.max_length - spec.min_length + 1));
}

std::string topical_doc(const SynthSpec& spec, const TermClass& own, const TermClass& shared, Rng& rng) {
  const std::size_t len = draw_length(spec, rng);
  std::string body;
  for (std::size_t t = 0; t < len; ++t) {
    if (t) body.push_back(' ');
    body += rng.uniform() < spec.overlap_weight ? shared.draw(rng) : own.draw(rng);
  }
  return body;
}

Comment make_comment(const std::string& prefix, std::size_t i, const std::string& community, std::string body) {
  char id[32];
  std::snprintf(id, sizeof id, "%s-%06zu", prefix.c_str(), i + 1);
  Comment c;
  c.id = id;
  c.body = std::move(body);
  c.community = community;
  c.platform = Platform::other;
  c.created_at = 1420070400 + static_cast<std::int64_t>(i);
  c.author = "synth_user";
  return c;
}

}  // namespace

SynthCorpus generate(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus out;
  out.truth.positive_core = make_terms("pos", spec.vocab_core);
  out.truth.negative_core = make_terms("neg", spec.vocab_core);
  out.truth.shared = make_terms("shr", spec.vocab_shared);
  out.truth.background = make_terms("bkg", spec.vocab_background);

  const TermClass pos_core(out.truth.positive_core, spec.zipf);
  const TermClass neg_core(out.truth.negative_core, spec.zipf);
  const TermClass shared(out.truth.shared, spec.zipf);
  const TermClass background(out.truth.background, spec.zipf);

  out.positive.source_label = SourceLabel::hate;
  out.positive.target_group = "synthetic";
  out.negative.source_label = SourceLabel::support;
  out.negative.target_group = "synthetic";
  out.background.source_label = SourceLabel::background;

  Rng pos_rng(derive_seed(spec.seed, "synth/positive"));
  Rng neg_rng(derive_seed(spec.seed, "synth/negative"));
  for (std::size_t i = 0; i < spec.n_docs; ++i) {
    out.positive.comments.push_back(make_comment("pos", i, "synth_hate", topical_doc(spec, pos_core, shared, pos_rng)));
    out.negative.comments.push_back(make_comment("neg", i, "synth_support", topical_doc(spec, neg_core, shared, neg_rng)));
  }

  Rng bg_rng(derive_seed(spec.seed, "synth/background"));
  const std::size_t n_bg = spec.n_background ? spec.n_background : spec.n_docs;
  for (std::size_t i = 0; i < n_bg; ++i) {
    const double r = bg_rng.uniform();
    std::string body;
    if (r < spec.background_support_fraction) {
      body = topical_doc(spec, neg_core, shared, bg_rng);
    } else if (r < spec.background_support_fraction + spec.background_hate_fraction) {
      body = topical_doc(spec, pos_core, shared, bg_rng);
    } else {
      const std::size_t len = draw_length(spec, bg_rng);
      for (std::size_t t = 0; t < len; ++t) {
        if (t) body.push_back(' ');
        body += background.draw(bg_rng);
      }
    }
    out.background.comments.push_back(make_comment("bkg", i, "synth_background", std::move(body)));
  }
  return out;
}

void write_synth_corpus(const std::filesystem::path& dir, const SynthSpec& spec, const SynthCorpus& corpus) {
  std::filesystem::create_directories(dir);
  write_jsonl(dir / "positive.jsonl", corpus.positive);
  write_jsonl(dir / "negative.jsonl", corpus.negative);
  write_jsonl(dir / "background.jsonl", corpus.background);
  json truth = corpus.truth.to_json();
  truth["spec"] = spec.to_json();
  write_text_file(dir / "truth.json", truth.dump(1) + "\n");
}

}  // namespace commlm
