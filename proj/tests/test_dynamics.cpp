#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adherence/dynamics.hpp"
#include "support/oracles.hpp"
#include "support/param_sets.hpp"

using namespace adherence;
using testsupport::canonical_sets;

namespace {
const PatientParams kBase(0.3, 0.2, 1.0, 0.95);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PatientParams(0.0, 0.2, 1.0, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(PatientParams(0.3, 0.0, 1.0, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(PatientParams(0.3, 0.2, 0.0, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(PatientParams(0.3, 0.2, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PatientParams(0.3, 0.2, 1.0, 0.95, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(PatientParams(0.6, 0.4, 1.0, 0.95), std::invalid_argument);  // rho = 0
  const PatientParams ok(0.3, 0.2, 1.0, 0.95);
  CHECK(ok.rho == doctest::Approx(0.5));
  CHECK(ok.z_inf == doctest::Approx(0.6));
  CHECK(ok.z_inf == doctest::Approx(ok.p / (1.0 - ok.rho)));
}

TEST_CASE("passive step") {
  CHECK(passive_step(kBase, 0.0) == doctest::Approx(0.3));   // h(0) = p
  CHECK(passive_step(kBase, 0.2) == doctest::Approx(0.4));
  CHECK(passive_step(kBase, 1.0) == doctest::Approx(0.8));   // h(1) = 1 - q
}

TEST_CASE("passive step contracts with factor rho") {
  for (const PatientParams& pp : canonical_sets()) {
    for (int i = 0; i < 40; ++i) {
      const double x = i / 39.0;
      const double y = 1.0 - x / 2.0;
      CHECK(std::abs(passive_step(pp, x) - passive_step(pp, y)) ==
            doctest::Approx(pp.rho * std::abs(x - y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("trajectory point") {
  CHECK(trajectory_point(kBase, kBase.z_inf, 7) == doctest::Approx(kBase.z_inf));
  CHECK(trajectory_point(kBase, 0.3, 2) == doctest::Approx(0.525));
  CHECK(trajectory_point(kBase, 0.775, 0) == 0.775);  // exact identity at t = 0

  for (const PatientParams& pp : canonical_sets()) {
    double iterated = 0.15;
    for (std::int64_t t = 0; t <= 60; ++t) {
      CHECK(trajectory_point(pp, 0.15, t) == doctest::Approx(iterated).epsilon(1e-11));
      // |h_t(x) - z_inf| = rho^t |x - z_inf| exactly
      CHECK(std::abs(trajectory_point(pp, 0.15, t) - pp.z_inf) ==
            doctest::Approx(std::pow(pp.rho, double(t)) * std::abs(0.15 - pp.z_inf)));
      iterated = passive_step(pp, iterated);
    }
  }
}

TEST_CASE("trajectory monotone toward the limit") {
  for (const PatientParams& pp : canonical_sets()) {
    for (double x : {0.0, pp.z_inf / 2.0, pp.z_inf, (1.0 + pp.z_inf) / 2.0, 1.0}) {
      double prev = trajectory_point(pp, x, 0);
      for (std::int64_t t = 1; t <= 30; ++t) {
        const double cur = trajectory_point(pp, x, t);
        if (x < pp.z_inf) CHECK(cur > prev);
        if (x > pp.z_inf) CHECK(cur < prev);
        prev = cur;
      }
    }
  }
}

TEST_CASE("crossing time examples") {
  CHECK(*crossing_time(kBase, 0.7, Threshold::finite(0.5)) == 0);
  CHECK(*crossing_time(kBase, 0.3, Threshold::finite(0.5)) == 2);
  CHECK_FALSE(crossing_time(kBase, 0.3, Threshold::finite(0.7)).has_value());
  CHECK(*crossing_time(kBase, 0.9, Threshold::always_active()) == 0);
  CHECK_FALSE(crossing_time(kBase, 0.9, Threshold::always_passive()).has_value());
  // z == z_inf: bounded trajectory never exceeds it
  CHECK_FALSE(crossing_time(kBase, 0.1, Threshold::finite(kBase.z_inf)).has_value());
}

TEST_CASE("crossing time matches the brute-force loop on a 200x200 grid") {
  for (const PatientParams& pp :
       {PatientParams(0.3, 0.2, 1.0, 0.95), PatientParams(0.01, 0.01, 1.0, 0.9),
        PatientParams(0.35, 0.01, 1.0, 0.99)}) {
    for (int i = 0; i < 200; ++i) {
      const double x = i / 199.0;
      for (int j = 0; j < 200; ++j) {
        const double z = j / 199.0;
        const CrossingTime got = crossing_time(pp, x, z);
        const auto want = testsupport::brute_crossing(pp, x, z);
        REQUIRE(got.has_value() == want.has_value());
        if (got) REQUIRE(*got == *want);
      }
    }
  }
}

TEST_CASE("crossing time at exact breakpoints") {
  // z exactly on a trajectory point: weak inequality keeps the policy passive
  // there, so the crossing lands one step later. At these boundary cases the
  // iterated recursion is authoritative.
  for (const PatientParams& pp : canonical_sets()) {
    for (std::int64_t t = 1; t <= 8; ++t) {
      double z = 0.0;
      for (std::int64_t k = 0; k < t; ++k) z = passive_step(pp, z);
      if (z >= pp.z_inf) break;
      const CrossingTime got = crossing_time(pp, 0.0, z);
      REQUIRE(got.has_value());
      double belief = 0.0;
      for (std::int64_t k = 0; k < *got; ++k) {
        CHECK(belief <= z);
        belief = passive_step(pp, belief);
      }
      CHECK(belief > z);
    }
    CHECK(*crossing_time(pp, 0.25, 0.25) >= 1);  // x == z is passive now
  }
}

TEST_CASE("state breakpoints") {
  CHECK(state_breakpoint(kBase, -1) == 0.0);
  CHECK(state_breakpoint(kBase, 0) == doctest::Approx(0.3));
  CHECK(state_breakpoint(kBase, 2) == doctest::Approx(0.525));
  for (const PatientParams& pp : canonical_sets()) {
    // Strict increase is checked while the increment rho^t (1-rho)(z_inf - p)
    // stays clear of double-precision resolution near z_inf.
    for (std::int64_t t = -1; t <= 50; ++t) {
      if (std::pow(pp.rho, double(t + 1)) * (1.0 - pp.rho) * (pp.z_inf - pp.p) < 1e-13) break;
      CHECK(state_breakpoint(pp, t) < state_breakpoint(pp, t + 1));
      CHECK(state_breakpoint(pp, t + 1) < pp.z_inf);
    }
    // z_t = h_t(p) = h_{t+1}(0)
    for (std::int64_t t = 0; t <= 20; ++t)
      CHECK(state_breakpoint(pp, t) ==
            doctest::Approx(trajectory_point(pp, 0.0, t + 1)).epsilon(1e-13));
  }
}

TEST_CASE("discounted passive sums") {
  CHECK(disc_passive_sum(kBase, 0.4, 0) == 0.0);
  CHECK(disc_passive_sum(kBase, 0.3, 1) == doctest::Approx(0.7));
  CHECK(disc_passive_sum_inf(kBase, 0.3) == doctest::Approx(8.571428571428571));

  for (const PatientParams& pp : canonical_sets()) {
    const double tail = std::pow(pp.beta, 2000.0) / (1.0 - pp.beta);
    for (double x : {0.0, 0.3, pp.z_inf, 0.9}) {
      CHECK(std::abs(disc_passive_sum_inf(pp, x) -
                     testsupport::brute_disc_passive_sum(pp, x, 2000)) <= tail + 1e-12);
      for (std::int64_t t : {1, 2, 5, 17}) {
        CHECK(disc_passive_sum(pp, x, t) ==
              doctest::Approx(testsupport::brute_disc_passive_sum(pp, x, t)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("undiscounted passive sums") {
  CHECK(avg_passive_sum(kBase, 0.2, 0) == 0.0);
  CHECK(avg_passive_sum(kBase, 0.3, 2) == doctest::Approx(1.25));
  CHECK(avg_passive_sum(kBase, kBase.z_inf, 5) == doctest::Approx(5.0 * (1.0 - kBase.z_inf)));
  for (const PatientParams& pp : canonical_sets()) {
    double direct = 0.0;
    double belief = 0.37;
    for (std::int64_t t = 0; t <= 25; ++t) {
      CHECK(avg_passive_sum(pp, 0.37, t) == doctest::Approx(direct).epsilon(1e-12));
      direct += 1.0 - belief;
      belief = passive_step(pp, belief);
    }
  }
}
