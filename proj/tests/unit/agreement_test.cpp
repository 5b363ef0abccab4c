#include <doctest.h>

#include <algorithm>
#include <random>

#include "forge/analysis/agreement.hpp"
#include "forge/error.hpp"
#include "oracles/agreement_oracle.hpp"

using namespace forge;
using namespace forge::analysis;

namespace {

constexpr auto A = IntentLabel::AskInfo;
constexpr auto B = IntentLabel::ReplyInfo;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

AnnotationMatrix to_matrix(const oracle::Grid& g) {
  AnnotationMatrix m;
  for (const auto& row : g) {
    auto& out = m.labels.emplace_back();
    for (int v : row) out.push_back(v < 0 ? std::nullopt : std::optional(kAllIntents[static_cast<std::size_t>(v)]));
  }
  return m;
}

}  // namespace

TEST_CASE("fleiss kappa examples") {
  CHECK(fleiss_kappa({{{A, A}, {A, B}}}) == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(fleiss_kappa({{{A, A, A}, {B, B, B}, {A, A, A}}}) == 1.0);
  CHECK(code_of([] { fleiss_kappa({{{A, A}, {A, A}}}); }) == ErrorCode::DegenerateExpected);
  CHECK(code_of([] { fleiss_kappa({{{A, std::nullopt}, {A, B}}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { fleiss_kappa({{{A}, {B}}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { fleiss_kappa({}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("krippendorff alpha examples") {
  CHECK(krippendorff_alpha({{{A, A}, {B, B}, {A, A}}}) == 1.0);
  // one missing cell, checked against the pairwise oracle
  oracle::Grid g = {{0, 0, -1}, {0, 1, 1}, {1, 1, 1}, {2, 2, 0}};
  CHECK(krippendorff_alpha(to_matrix(g)) == doctest::Approx(oracle::krippendorff_alpha(g)).epsilon(1e-12));
  CHECK(code_of([] { krippendorff_alpha({{{A, std::nullopt}, {std::nullopt, B}}}); }) ==
        ErrorCode::TooFewPairableValues);
  CHECK(code_of([] { krippendorff_alpha({{{A, A}, {A, A}}}); }) == ErrorCode::NoVariance);
}

TEST_CASE("agreement matches the brute-force oracle on random matrices") {
  std::mt19937 rng(21);
  int kappa_checked = 0, alpha_checked = 0;
  for (int round = 0; round < 500; ++round) {
    const std::size_t items = 1 + rng() % 6, raters = 2 + rng() % 3, cats = 1 + rng() % 5;
    oracle::Grid full(items, std::vector<int>(raters));
    for (auto& row : full)
      for (auto& v : row) v = static_cast<int>(rng() % cats);
    oracle::Grid holes = full;
    for (auto& row : holes)
      for (auto& v : row)
        if (rng() % 4 == 0) v = -1;

    std::set<int> seen;
    for (const auto& row : full) seen.insert(row.begin(), row.end());
    if (seen.size() > 1) {
      CHECK(fleiss_kappa(to_matrix(full)) == doctest::Approx(oracle::fleiss_kappa(full)).epsilon(1e-9));
      ++kappa_checked;
    } else {
      CHECK(code_of([&] { fleiss_kappa(to_matrix(full)); }) == ErrorCode::DegenerateExpected);
    }

    std::vector<int> pairable;
    for (const auto& row : holes) {
      std::vector<int> vals;
      std::copy_if(row.begin(), row.end(), std::back_inserter(vals), [](int v) { return v >= 0; });
      if (vals.size() >= 2) pairable.insert(pairable.end(), vals.begin(), vals.end());
    }
    const std::set<int> distinct(pairable.begin(), pairable.end());
    if (pairable.size() < 2) {
      CHECK(code_of([&] { krippendorff_alpha(to_matrix(holes)); }) == ErrorCode::TooFewPairableValues);
    } else if (distinct.size() < 2) {
      CHECK(code_of([&] { krippendorff_alpha(to_matrix(holes)); }) == ErrorCode::NoVariance);
    } else {
      CHECK(krippendorff_alpha(to_matrix(holes)) ==
            doctest::Approx(oracle::krippendorff_alpha(holes)).epsilon(1e-9));
      ++alpha_checked;
    }
  }
  CHECK(kappa_checked > 300);
  CHECK(alpha_checked > 300);
}

TEST_CASE("agreement is invariant under item and annotator permutation") {
  std::mt19937 rng(8);
  for (int round = 0; round < 100; ++round) {
    oracle::Grid g(5, std::vector<int>(3));
    for (auto& row : g)
      for (auto& v : row) v = static_cast<int>(rng() % 3);
    g[0] = {0, 1, 2};
    oracle::Grid p = g;
    std::shuffle(p.begin(), p.end(), rng);
    std::vector<std::size_t> order = {0, 1, 2};
    std::shuffle(order.begin(), order.end(), rng);
    for (auto& row : p) row = {row[order[0]], row[order[1]], row[order[2]]};
    CHECK(fleiss_kappa(to_matrix(g)) == doctest::Approx(fleiss_kappa(to_matrix(p))).epsilon(1e-12));
    CHECK(krippendorff_alpha(to_matrix(g)) == doctest::Approx(krippendorff_alpha(to_matrix(p))).epsilon(1e-12));
  }
}
