#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "../test_support.hpp"
#include "commlm/hash.hpp"
#include "commlm/line_io.hpp"
#include "commlm/rng.hpp"

using namespace commlm;

TEST_CASE("mt19937_64 reference output") {
  // The 10000th output for the default seed is fixed by the C++ standard.
  std::mt19937_64 e;
  e.discard(9999);
  CHECK(e() == 9981545732273789042ULL);
}

TEST_CASE("below stays in range and covers it") {
  Rng rng(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK(rng.below(1) == 0);
}

TEST_CASE("uniform in [0,1) with plausible mean") {
  Rng rng(2);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("shuffle is a permutation and seed-deterministic") {
  std::vector<int> a(50), b;
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(9), r2(9);
  r1.shuffle(a);
  r2.shuffle(b);
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("derive_seed separates stages") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("sample_indices") {
  Rng rng(3);
  const auto idx = sample_indices(100, 30, rng);
  CHECK(idx.size() == 30);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 30);
  CHECK(idx.back() < 100);
  Rng r2(3);
  CHECK(sample_indices(5, 5, r2) == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(to_hex(0xabcULL) == "0000000000000abc");
  Fnv1a64 h;
  h.update("foo").update("bar");
  CHECK(h.value() == fnv1a64("foobar"));
}

TEST_CASE("line io round trip, plain and gzip") {
  testing::TempDir dir("lineio");
  for (const char* name : {"a.txt", "a.txt.gz"}) {
    const auto p = dir / name;
    {
      LineWriter w(p);
      w.write_line("first");
      w.write_line("");
      w.write_line(std::string(100000, 'x'));
      w.close();
    }
    LineReader r(p);
    std::string line;
    REQUIRE(r.next(line));
    CHECK(line == "first");
    REQUIRE(r.next(line));
    CHECK(line.empty());
    REQUIRE(r.next(line));
    CHECK(line.size() == 100000);
    CHECK(r.line_number() == 3);
    CHECK_FALSE(r.next(line));
  }
  write_text_file(dir / "crlf.txt", "a\r\nb\r\n");
  LineReader r(dir / "crlf.txt");
  std::string line;
  REQUIRE(r.next(line));
  CHECK(line == "a");
  CHECK(file_fingerprint(dir / "crlf.txt") == to_hex(fnv1a64("a\r\nb\r\n")));
}
