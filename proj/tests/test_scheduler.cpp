#include <doctest.h>

#include <cmath>
#include <random>

#include "netbd/bd_core.hpp"
#include "netbd/scheduler.hpp"
#include "test_helpers.hpp"

using namespace netbd;

namespace {

// Best weighted objective over all subsets of size 1..max_users, via the
// explicit null-space route rather than the Gram evaluator.
double exhaustive_best(const std::vector<CMatrix>& pool, int max_users, double budget,
                       std::vector<int>* argmax = nullptr) {
  const int n = static_cast<int>(pool.size());
  double best = 0.0;
  for (int mask = 1; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) > max_users) continue;
    std::vector<CMatrix> h;
    std::vector<int> members;
    for (int u = 0; u < n; ++u) {
      if (mask & (1 << u)) {
        h.push_back(pool[u]);
        members.push_back(u);
      }
    }
    try {
      PrecoderSet p = conventional_bd(effective_channels(h), budget);
      const double r = sum_rate(h, p);
      if (r > best + 1e-12) {
        best = r;
        if (argmax) *argmax = members;
      }
    } catch (const DegenerateChannelError&) {
    }
  }
  return best;
}

}  // namespace

TEST_CASE("greedy_select: trivial pools") {
  const std::vector<CMatrix> one = {CMatrix::Ones(1, 2)};
  const GramEvaluator ev(one, 1.0);
  CHECK(greedy_select(1, 2, ev, RVector::Ones(1)) == std::vector<int>{0});
  CHECK(greedy_select(0, 2, ev, RVector::Ones(0)).empty());
}

TEST_CASE("greedy_select skips the colinear user") {
  std::vector<CMatrix> pool(3, CMatrix(1, 2));
  pool[0] << cd(1, 0), cd(0, 0);
  pool[1] << cd(0, 0), cd(0.9, 0);
  pool[2] << cd(1.2, 0), cd(0, 0);
  const GramEvaluator ev(pool, 2.0);
  std::vector<int> sel = greedy_select(3, 2, ev, RVector::Ones(3));
  std::sort(sel.begin(), sel.end());
  std::vector<int> oracle;
  exhaustive_best(pool, 2, 2.0, &oracle);
  CHECK(oracle == std::vector<int>{1, 2});
  CHECK(sel == oracle);

  // With user 2 identical in strength to user 0, the tie goes to the lowest index.
  pool[2] << cd(1, 0), cd(0, 0);
  const GramEvaluator tie(pool, 2.0);
  sel = greedy_select(3, 2, tie, RVector::Ones(3));
  std::sort(sel.begin(), sel.end());
  CHECK(sel == std::vector<int>{0, 1});
}

TEST_CASE("greedy_select honours weights") {
  const auto pool = testing::random_channels(5, 1, 4, 9);
  const GramEvaluator ev(pool, 1.0);
  RVector w = RVector::Zero(5);
  w(0) = 1.0;
  const std::vector<int> sel = greedy_select(5, 4, ev, w);
  REQUIRE(!sel.empty());
  CHECK(sel.front() == 0);
  // Nobody else carries weight, and adding users only takes power from user 0.
  CHECK(sel.size() == 1);
}

TEST_CASE("greedy_select: size bound and positive marginal gains") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n_r = 1 + static_cast<int>(seed % 2);
    const int total_tx = 6;
    const int k_max = total_tx / n_r;
    auto pool = testing::random_channels(10, n_r, total_tx, seed);
    pool[3].setZero();
    const GramEvaluator ev(pool, 1.0);
    const std::vector<int> sel = greedy_select(10, 100, ev, RVector::Ones(10));
    CHECK(static_cast<int>(sel.size()) <= k_max);
    CHECK(std::find(sel.begin(), sel.end(), 3) == sel.end());
    double prev = 0.0;
    for (std::size_t i = 1; i <= sel.size(); ++i) {
      const std::vector<int> prefix(sel.begin(), sel.begin() + static_cast<long>(i));
      const double v = ev(prefix).sum();
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("greedy reaches at least 85% of exhaustive search") {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gain(0.1, 3.0);
    auto pool = testing::random_channels(8, 1, 3, seed);
    for (auto& h : pool) h *= gain(rng);
    const GramEvaluator ev(pool, 10.0);
    const std::vector<int> sel = greedy_select(8, 3, ev, RVector::Ones(8));
    const double greedy = ev(sel).sum();
    const double best = exhaustive_best(pool, 3, 10.0);
    CHECK(greedy <= best + 1e-9);
    if (greedy >= 0.85 * best) ++ok;
  }
  CHECK(ok == 100);
}

TEST_CASE("pf_update") {
  ScheduleState s = ScheduleState::create(2, 10.0);
  CHECK(s.weights(0) == doctest::Approx(1e6));
  RVector r(2);
  r << 1.0, 0.0;
  s = pf_update(s, r);
  CHECK(s.throughput(0) == doctest::Approx(0.1));
  CHECK(s.throughput(1) == 0.0);
  CHECK(s.weights(0) == doctest::Approx(10.0));
  CHECK(s.weights(1) == doctest::Approx(1e6));
  CHECK(s.slot == 1);

  for (int i = 0; i < 300; ++i) s = pf_update(s, RVector::Constant(2, 2.0));
  CHECK(s.throughput(0) == doctest::Approx(2.0).epsilon(1e-9));

  const double before = s.throughput(1);
  s = pf_update(s, RVector::Zero(2));
  CHECK(s.throughput(1) == doctest::Approx(0.9 * before));
  CHECK(s.weights.allFinite());
  CHECK((s.weights.array() > 0).all());

  CHECK_THROWS_AS(ScheduleState::create(2, 0.5), ConfigError);
  CHECK_THROWS(pf_update(s, RVector::Constant(2, -1.0)));
}
