#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "stem/error.hpp"
#include "stem/transition.hpp"

using namespace stem;

namespace {

std::vector<Outcome> irv(std::initializer_list<int> values) {
  std::vector<Outcome> out;
  for (int v : values) out.push_back(outcome_from_int(v));
  return out;
}

// Reference classifier written straight from the class definitions.
IrvClass brute_force(const std::vector<Outcome>& v) {
  for (auto o : v)
    if (o == Outcome::Error) return {IrvKind::InferenceError, std::nullopt};
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i] == Outcome::Correct && v[i + 1] == Outcome::Wrong)
      return {IrvKind::NonMonotonic, std::nullopt};
  int zeros = 0;
  for (auto o : v) zeros += o == Outcome::Wrong;
  return {IrvKind::Valid, zeros + 1};
}

OutcomeMatrix make_matrix(std::map<std::string, std::vector<Outcome>> entries) {
  return OutcomeMatrix{ModelFamily::qwen3(), "bench", std::move(entries)};
}

}  // namespace

TEST_SUITE("transition") {
  TEST_CASE("reference vectors") {
    CHECK(classify_irv(irv({0, 0, 0, 1, 1, 1, 1, 1})) == IrvClass{IrvKind::Valid, 4});
    CHECK(classify_irv(irv({1, 1, 1, 1, 1, 1, 1, 1})) == IrvClass{IrvKind::Valid, 1});
    CHECK(classify_irv(irv({0, 0, 0, 0, 0, 0, 0, 0})) == IrvClass{IrvKind::Valid, 9});
    CHECK(classify_irv(irv({0, 0, 1, 0, 1, 1, 0, 1})).kind == IrvKind::NonMonotonic);
    CHECK(classify_irv(irv({0, 0, 0, -1, 0, -1, 1, 1})).kind == IrvKind::InferenceError);
    CHECK_FALSE(classify_irv(irv({0, 1, 0})).transition_index.has_value());
    CHECK_THROWS_AS(classify_irv(irv({1})), ArgumentError);
    CHECK(std::string(to_string(IrvKind::NonMonotonic)) == "non_monotonic");
  }

  TEST_CASE("exhaustive agreement with the reference classifier over 3^8 vectors") {
    int valid = 0;
    std::set<int> tis;
    for (int code = 0; code < 6561; ++code) {
      std::vector<Outcome> v(8);
      int c = code;
      for (auto& o : v) {
        o = outcome_from_int(c % 3 - 1);
        c /= 3;
      }
      const auto got = classify_irv(v);
      REQUIRE(got == brute_force(v));
      if (got.kind == IrvKind::Valid) {
        ++valid;
        const int ti = *got.transition_index;
        tis.insert(ti);
        CHECK(ti >= 1);
        CHECK(ti <= 9);
        CHECK((ti == 1) == (v[0] == Outcome::Correct));
        CHECK((ti == 9) == std::ranges::all_of(v, [](Outcome o) { return o == Outcome::Wrong; }));
      }
    }
    CHECK(valid == 9);
    CHECK(tis.size() == 9);
  }

  TEST_CASE("classification depends on entry order") {
    CHECK(classify_irv(irv({0, 0, 1, 1})).kind == IrvKind::Valid);
    CHECK(classify_irv(irv({1, 1, 0, 0})).kind == IrvKind::NonMonotonic);
  }

  TEST_CASE("pool from five reference vectors") {
    const auto built = build_sts_pool(make_matrix({
        {"a", irv({0, 0, 0, 1, 1, 1, 1, 1})},
        {"b", irv({1, 1, 1, 1, 1, 1, 1, 1})},
        {"c", irv({0, 0, 0, 0, 0, 0, 0, 0})},
        {"d", irv({0, 0, 1, 0, 1, 1, 0, 1})},
        {"e", irv({0, 0, 0, -1, 0, -1, 1, 1})},
    }));
    const auto& b = built.pool.buckets;
    CHECK(b.size() == 9);
    for (int k = 1; k <= 9; ++k) CHECK(b.contains(k));
    CHECK(b.at(1) == std::vector<std::string>{"b"});
    CHECK(b.at(4) == std::vector<std::string>{"a"});
    CHECK(b.at(9) == std::vector<std::string>{"c"});
    CHECK(b.at(2).empty());
    REQUIRE(built.rejects.size() == 2);
    CHECK(built.rejects[0].sample_id == "d");
    CHECK(built.rejects[0].cls.kind == IrvKind::NonMonotonic);
    CHECK(built.rejects[1].sample_id == "e");
    CHECK(built.rejects[1].cls.kind == IrvKind::InferenceError);
    CHECK(built.pool.size() + built.rejects.size() == 5);

    const auto& s = built.summary;
    CHECK(s.total == 5);
    CHECK(s.abnormal_fraction() == doctest::Approx(0.2));
    CHECK(s.error_fraction() == doctest::Approx(0.2));
    CHECK(s.rejected_fraction() == doctest::Approx(0.4));
    double sum = s.abnormal_fraction() + s.error_fraction();
    for (int k = 1; k <= 9; ++k) sum += s.per_ti_fraction(k);
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }

  TEST_CASE("abnormal fractions") {
    const auto all_valid = build_sts_pool(make_matrix({
        {"x", irv({0, 1, 1, 1, 1, 1, 1, 1})},
        {"y", irv({0, 0, 0, 0, 0, 0, 1, 1})},
    }));
    CHECK(all_valid.summary.abnormal_fraction() == 0.0);
    CHECK(all_valid.rejects.empty());

    const auto mostly_bad = build_sts_pool(make_matrix({
        {"x", irv({1, 0, 0, 0, 0, 0, 0, 0})},
        {"y", irv({0, 1, 0, 1, 0, 1, 0, 1})},
        {"z", irv({0, 0, 0, 0, 0, 0, 0, 1})},
    }));
    CHECK(mostly_bad.summary.abnormal_fraction() == doctest::Approx(2.0 / 3.0));
    CHECK(mostly_bad.summary.per_ti_fraction(8) == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(build_sts_pool(make_matrix({})), DataError);
  }

  TEST_CASE("pool partition over random matrices") {
    std::uint32_t state = 17;
    auto next = [&] { return state = state * 1664525u + 1013904223u; };
    std::map<std::string, std::vector<Outcome>> entries;
    for (int s = 0; s < 500; ++s) {
      std::vector<Outcome> v(8);
      const bool monotone = next() % 2;
      const int cut = static_cast<int>(next() % 9);
      for (int i = 0; i < 8; ++i)
        v[i] = monotone ? (i >= cut ? Outcome::Correct : Outcome::Wrong)
                        : outcome_from_int(static_cast<int>((next() >> 8) % 3) - 1);
      entries["s" + std::to_string(1000 + s)] = v;
    }
    const auto built = build_sts_pool(make_matrix(entries));
    std::set<std::string> seen;
    for (const auto& [k, ids] : built.pool.buckets) {
      CHECK(std::ranges::is_sorted(ids));
      for (const auto& id : ids) {
        CHECK(seen.insert(id).second);
        CHECK(*classify_irv(entries.at(id)).transition_index == k);
      }
    }
    CHECK(built.pool.size() + built.rejects.size() == entries.size());
  }

  TEST_CASE("contamination flags") {
    const auto m = make_matrix({
        {"zz", irv({0, 1, 0, 0, 0, 0, 0, 0})},
        {"aa", irv({1, 1, 1, 0, 1, 1, 1, 1})},
        {"ok", irv({0, 0, 1, 1, 1, 1, 1, 1})},
        {"err", irv({0, -1, 0, 0, 1, 0, 0, 0})},
    });
    CHECK(flag_contamination(m) == std::vector<std::string>{"aa", "zz"});
    CHECK(flag_contamination(make_matrix({{"ok", irv({0, 0, 1, 1, 1, 1, 1, 1})}})).empty());
  }
}
