#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "../test_support.hpp"
#include "commlm/corpus.hpp"
#include "commlm/error.hpp"
#include "commlm/line_io.hpp"
#include "commlm/textprep.hpp"

using namespace commlm;
using nlohmann::json;

namespace {

Comment make(std::string id, std::string body, std::string community = "c", std::string author = "u") {
  Comment c;
  c.id = std::move(id);
  c.body = std::move(body);
  c.community = std::move(community);
  c.author = std::move(author);
  c.platform = Platform::reddit;
  c.deleted = is_deleted_body(c.body);
  return c;
}

CorpusSlice numbered(std::size_t n, const std::string& prefix, const std::string& community = "c") {
  CorpusSlice s;
  for (std::size_t i = 0; i < n; ++i) s.comments.push_back(make(prefix + std::to_string(i), "word" + prefix + " text", community));
  return s;
}

}  // namespace

TEST_CASE("reddit field mapping") {
  const json rec = json::parse(
      R"({"id":"abc","body":"hello","subreddit":"CoonTown","created_utc":"1425168000","author":"x","score":5})");
  const Comment c = comment_from_json(rec, Platform::reddit);
  CHECK(c.id == "abc");
  CHECK(c.body == "hello");
  CHECK(c.community == "CoonTown");
  CHECK(c.created_at == 1425168000);
  CHECK(c.author == "x");
  CHECK(c.platform == Platform::reddit);
  CHECK_FALSE(c.deleted);

  const Comment v = comment_from_json(json::parse(R"({"id":"1","body":"[deleted]","subverse":"v"})"), Platform::voat);
  CHECK(v.community == "v");
  CHECK(v.platform == Platform::voat);
  CHECK(v.created_at == 0);
  CHECK(v.author.empty());
  CHECK(v.deleted);

  CHECK_THROWS_AS(comment_from_json(json::parse(R"({"id":"1","subreddit":"v"})"), Platform::reddit), DataError);
  CHECK_THROWS_AS(comment_from_json(json::parse(R"({"id":[1],"body":"x","subreddit":"v"})"), Platform::reddit), DataError);
  CHECK(comment_from_json(json::parse(R"({"id":7,"body":"x","board":"b"})"), Platform::forum).id == "7");
  CHECK_THROWS_AS(comment_from_json(json::parse(R"([1,2])"), Platform::reddit), DataError);
}

TEST_CASE("load_jsonl examples") {
  testing::TempDir dir("corpus");
  write_text_file(dir / "two.jsonl",
                  "{\"id\":\"1\",\"body\":\"a\",\"subreddit\":\"s\"}\n{\"id\":\"2\",\"body\":\"b\",\"subreddit\":\"s\"}\n");
  const auto two = load_jsonl(dir / "two.jsonl");
  REQUIRE(two.slice.size() == 2);
  CHECK(two.slice.comments[0].id == "1");
  CHECK(two.slice.comments[1].id == "2");

  write_text_file(dir / "empty.jsonl", "");
  const auto empty = load_jsonl(dir / "empty.jsonl");
  CHECK(empty.slice.size() == 0);
  CHECK(empty.skipped == 0);

  write_text_file(dir / "bad.jsonl",
                  "{\"id\":\"1\",\"body\":\"a\",\"subreddit\":\"s\"}\n{not json\n{\"id\":\"3\",\"body\":\"c\",\"subreddit\":\"s\"}\n");
  LoadOptions lenient;
  lenient.mode = ParseMode::lenient;
  const auto lr = load_jsonl(dir / "bad.jsonl", lenient);
  CHECK(lr.slice.size() == 2);
  CHECK(lr.skipped == 1);
  try {
    load_jsonl(dir / "bad.jsonl");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK_THROWS_AS(load_jsonl(dir / "missing.jsonl"), DataError);

  LoadOptions filtered;
  filtered.community_filter = std::set<std::string>{"other"};
  CHECK(load_jsonl(dir / "two.jsonl", filtered).slice.size() == 0);
}

TEST_CASE("jsonl round trip through gzip") {
  testing::TempDir dir("roundtrip");
  CorpusSlice s;
  s.comments.push_back(make("1", "unicode \xC3\xA9 and \"quotes\"\nnewline", "x"));
  s.comments.push_back(make("2", "[removed]", "y"));
  s.comments[0].created_at = 1234567890;
  for (const char* name : {"r.jsonl", "r.jsonl.gz"}) {
    write_jsonl(dir / name, s);
    const auto back = load_jsonl(dir / name);
    CHECK(back.slice.comments == s.comments);
  }
}

TEST_CASE("sample_background") {
  const CorpusSlice all = numbered(1000, "a");
  const auto full = sample_background(all, 1000, {}, 1);
  CHECK(full.size() == 1000);
  CHECK(sample_background(all, 100, {}, 5).comments == sample_background(all, 100, {}, 5).comments);
  CHECK(sample_background(all, 100, {}, 5).comments != sample_background(all, 100, {}, 6).comments);

  CorpusSlice mixed = numbered(900, "a", "keep");
  for (const auto& c : numbered(100, "x", "X").comments) mixed.comments.push_back(c);
  try {
    sample_background(mixed, 950, {"X"}, 1);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("900") != std::string::npos);
  }
  const auto ok = sample_background(mixed, 900, {"X"}, 1);
  for (const auto& c : ok.comments) CHECK(c.community == "keep");
}

TEST_CASE("reservoir sample is uniform-ish, ordered and deterministic") {
  testing::TempDir dir("reservoir");
  write_jsonl(dir / "pool.jsonl.gz", numbered(500, "p"));
  const auto a = reservoir_sample_jsonl(dir / "pool.jsonl.gz", 50, {}, Platform::reddit, ParseMode::strict, 4);
  const auto b = reservoir_sample_jsonl(dir / "pool.jsonl.gz", 50, {}, Platform::reddit, ParseMode::strict, 4);
  CHECK(a.size() == 50);
  CHECK(a.comments == b.comments);
  for (std::size_t i = 1; i < a.size(); ++i)
    CHECK(std::stoi(a.comments[i - 1].id.substr(1)) < std::stoi(a.comments[i].id.substr(1)));
  CHECK_THROWS_AS(reservoir_sample_jsonl(dir / "pool.jsonl.gz", 600, {}, Platform::reddit, ParseMode::strict, 4),
                  DataError);
}

TEST_CASE("build_balanced") {
  const auto cfg = PreprocessConfig::defaults();
  const auto b = build_balanced(numbered(100, "p"), numbered(500, "n"), cfg, 1);
  CHECK(b.dataset.count(Label::positive) == 100);
  CHECK(b.dataset.count(Label::negative) == 100);
  CHECK(b.dataset.labels.front() == Label::positive);
  b.dataset.validate();

  CorpusSlice pos = numbered(10, "p");
  pos.comments[3].body = "the and of";
  pos.comments[7].body = "!!! 123";
  const auto d = build_balanced(pos, numbered(10, "n"), cfg, 1);
  CHECK(d.dataset.count(Label::positive) == 8);
  CHECK(d.dataset.count(Label::negative) == 8);
  CHECK(d.dropped_empty == 2);

  CHECK_THROWS_AS(build_balanced(CorpusSlice{}, numbered(10, "n"), cfg, 1), DataError);
}

TEST_CASE("imbalanced test sets") {
  const auto cfg = PreprocessConfig::defaults();
  CHECK(ImbalanceRatio::parse("1:100").negatives_per_positive == 100);
  CHECK(ImbalanceRatio{10}.str() == "1:10");
  CHECK_THROWS_AS(ImbalanceRatio::parse("2:3"), UsageError);
  CHECK_THROWS_AS(ImbalanceRatio::parse("1:0"), UsageError);

  const auto d = build_imbalanced_testset(numbered(50, "p"), numbered(600, "n"), {10}, cfg, 2);
  CHECK(d.dataset.count(Label::positive) == 50);
  CHECK(d.dataset.count(Label::negative) == 500);

  try {
    build_imbalanced_testset(numbered(50, "p"), numbered(1000, "n"), {1000}, cfg, 2);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("50000") != std::string::npos);
    CHECK(msg.find("1000") != std::string::npos);
  }

  const auto capped = build_imbalanced_testset(numbered(50, "p"), numbered(1000, "n"), {100}, cfg, 2, 10);
  CHECK(capped.dataset.count(Label::positive) == 10);
  CHECK(capped.dataset.count(Label::negative) == 1000);

  const auto one = build_imbalanced_testset(numbered(20, "p"), numbered(30, "n"), {1}, cfg, 3);
  CHECK(one.dataset.count(Label::positive) == 20);
  CHECK(one.dataset.count(Label::negative) == 20);
}

TEST_CASE("kfold_split") {
  auto dataset_of = [](std::size_t pos, std::size_t neg) {
    LabeledDataset d;
    for (std::size_t i = 0; i < pos + neg; ++i) {
      d.documents.push_back({"t"});
      d.labels.push_back(i < pos ? Label::positive : Label::negative);
      d.provenance.push_back({std::to_string(i), "c"});
    }
    return d;
  };
  const auto d100 = dataset_of(50, 50);
  const auto folds = kfold_split(d100, 10, 1);
  REQUIRE(folds.size() == 10);
  std::set<std::size_t> all;
  for (const auto& f : folds) {
    CHECK(f.test.size() == 10);
    CHECK(f.train.size() == 90);
    std::size_t pos = 0;
    for (auto i : f.test) {
      CHECK(all.insert(i).second);
      pos += d100.labels[i] == Label::positive;
    }
    CHECK(pos == 5);
  }
  CHECK(all.size() == 100);

  const auto f105 = kfold_split(dataset_of(53, 52), 10, 1);
  std::size_t elevens = 0, tens = 0;
  for (const auto& f : f105) (f.test.size() == 11 ? elevens : tens) += 1;
  CHECK(elevens == 5);
  CHECK(tens == 5);

  CHECK_THROWS_AS(kfold_split(dataset_of(2, 2), 5, 1), DataError);
  CHECK_THROWS_AS(kfold_split(dataset_of(2, 2), 1, 1), UsageError);
}

TEST_CASE("dataset persistence") {
  testing::TempDir dir("dataset");
  LabeledDataset d;
  d.documents = {{"a", "b"}, {"c"}};
  d.labels = {Label::positive, Label::negative};
  d.provenance = {{"1", "x"}, {"2", "y"}};
  write_dataset(dir / "d.jsonl", d);
  const auto back = read_dataset(dir / "d.jsonl");
  CHECK(back.documents == d.documents);
  CHECK(back.labels == d.labels);
  CHECK(back.provenance == d.provenance);
  CHECK(back.fingerprint() == d.fingerprint());
  d.labels[1] = Label::positive;
  CHECK(back.fingerprint() != d.fingerprint());
  d.labels.pop_back();
  CHECK_THROWS_AS(d.validate(), DataError);
}
