#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "reflex/reflex_core.hpp"

using namespace reflex;

namespace {

// Fig-4-style default configuration used across the suite.
CollisionParams1D default_params() {
  CollisionParams1D p;
  p.m_f = 0.1;
  p.m_r = 1.0;
  p.k_m = 1000.0;
  p.k_s = 100.0;
  p.sensing = ForceThreshold{3.0};
  p.v_0 = 0.5;
  p.f_a = 10.0;
  return p;
}

CollisionParams1D random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto log_uniform = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, u(rng));
  };
  CollisionParams1D p;
  p.m_f = log_uniform(0.02, 0.5);
  p.m_r = log_uniform(0.2, 5.0);
  p.k_m = log_uniform(300.0, 5000.0);
  p.k_s = log_uniform(30.0, 500.0);
  p.sensing = ForceThreshold{log_uniform(1.0, 8.0)};
  p.v_0 = log_uniform(0.1, 3.0);
  p.f_a = log_uniform(2.0, 50.0);
  return p;
}

}  // namespace

TEST_CASE("combined stiffness is the series combination") {
  // Frozen from the static two-spring-chain oracle below.
  CHECK(combined_stiffness(1000.0, 100.0) ==
        doctest::Approx(90.9090909090909).epsilon(1e-12));
  CHECK(combined_stiffness(1000.0, 0.0) == 1000.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(10.0, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double k = u(rng);
    CHECK(combined_stiffness(k, k) == doctest::Approx(k / 2).epsilon(1e-12));
    const double k2 = u(rng);
    CHECK(combined_stiffness(k, k2) ==
          doctest::Approx(oracles::two_spring_chain_stiffness(k, k2))
              .epsilon(1e-9));
  }

  CHECK_THROWS_AS(combined_stiffness(0.0, 100.0), DomainError);
  CHECK_THROWS_AS(combined_stiffness(-5.0, 100.0), DomainError);
}

TEST_CASE("effective threshold per sensing mode") {
  CHECK(effective_threshold(ForceThreshold{3.0}, 0.0) == 3.0);
  CHECK(effective_threshold(PositionErrorThreshold{0.03}, 100.0) ==
        doctest::Approx(3.0).epsilon(1e-15));
  CHECK(effective_threshold(PositionErrorThreshold{0.03}, 200.0) ==
        doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(effective_threshold(PositionErrorThreshold{0.03}, 0.0),
                  DomainError);
  CHECK_THROWS_AS(effective_threshold(ForceThreshold{0.0}, 10.0), DomainError);
}

TEST_CASE("plastic impulse") {
  CHECK(plastic_impulse(0.1, 0.5) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(plastic_impulse(0.0, 2.0) == 0.0);
  CHECK(plastic_impulse(0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(plastic_impulse(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(plastic_impulse(0.1, -0.5), DomainError);
}

TEST_CASE("sensing time: ramp crossing") {
  const double k = combined_stiffness(1000.0, 100.0);
  CHECK(sensing_time(3.0, k, 0.5) == doctest::Approx(0.066).epsilon(1e-12));

  // Time-stepping oracle: march the ramp F = k v0 t to the threshold.
  {
    const double dt = 1e-8;
    double t = 0.0;
    while (k * 0.5 * t < 3.0) {
      t += dt;
    }
    CHECK(sensing_time(3.0, k, 0.5) == doctest::Approx(t).epsilon(1e-5));
  }

  CHECK(sensing_time(3.0, k, 1.0) ==
        doctest::Approx(0.5 * sensing_time(3.0, k, 0.5)).epsilon(1e-12));
  CHECK(sensing_time(1e-12, k, 0.5) < 1e-10);
  CHECK_THROWS_AS(sensing_time(3.0, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(sensing_time(3.0, k, 0.0), DomainError);
}

TEST_CASE("sensing impulse: triangle area, validated by quadrature") {
  const double k = combined_stiffness(1000.0, 100.0);
  CHECK(sensing_impulse(3.0, k, 0.5) == doctest::Approx(0.099).epsilon(1e-12));

  const double t1 = sensing_time(3.0, k, 0.5);
  const double quad = oracles::dense_trapezoid(
      [&](double t) { return k * 0.5 * t; }, 0.0, t1);
  CHECK(sensing_impulse(3.0, k, 0.5) == doctest::Approx(quad).epsilon(1e-9));

  CHECK(sensing_impulse(3.0, k, 1e9) < 1e-9);  // vanishes at high speed

  // At the optimal velocity the sensing impulse equals the plastic impulse.
  const double v_star = optimal_velocity(3.0, k, 0.1);
  CHECK(sensing_impulse(3.0, k, v_star) ==
        doctest::Approx(0.070356).epsilon(1e-4));
  CHECK(sensing_impulse(3.0, k, v_star) ==
        doctest::Approx(plastic_impulse(0.1, v_star)).epsilon(1e-12));
}

TEST_CASE("reaction impulse: closed form vs quadrature of the decay") {
  CHECK(reaction_impulse(3.0, 1000.0, 10.0) ==
        doctest::Approx(0.04898979485566356).epsilon(1e-12));

  const double duration = reaction_duration(3.0, 1000.0, 10.0);
  const double quad = oracles::dense_trapezoid(
      [&](double t) { return 3.0 - 0.5 * 1000.0 * 10.0 * t * t; }, 0.0,
      duration);
  CHECK(reaction_impulse(3.0, 1000.0, 10.0) ==
        doctest::Approx(quad).epsilon(1e-9));

  CHECK(reaction_impulse(0.0, 1000.0, 10.0) == 0.0);
  CHECK(reaction_impulse(3.0, 1000.0, 1e12) < 1e-6);
  CHECK_THROWS_AS(reaction_impulse(3.0, 1000.0, 0.0), DomainError);
  CHECK_THROWS_AS(reaction_impulse(3.0, -1.0, 10.0), DomainError);
}

TEST_CASE("total impulse: default configuration and exact additivity") {
  const PhaseBreakdown b = total_impulse(default_params());
  CHECK(b.i_plastic == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(b.i_sensing == doctest::Approx(0.099).epsilon(1e-12));
  CHECK(b.i_reaction == doctest::Approx(0.04898979485566356).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(0.19798979485566356).epsilon(1e-12));
  CHECK(b.t1 == doctest::Approx(0.066).epsilon(1e-12));
  CHECK(b.t2 ==
        doctest::Approx(0.066 + 0.024494897427831782).epsilon(1e-12));
  CHECK(b.total == b.i_plastic + b.i_sensing + b.i_reaction);  // exact

  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const PhaseBreakdown r = total_impulse(random_params(rng));
    CHECK(r.total == r.i_plastic + r.i_sensing + r.i_reaction);
    CHECK(r.t2 > r.t1);
    CHECK(r.t1 > 0.0);
  }
}

TEST_CASE("total impulse vanishes with no contact content") {
  CollisionParams1D p = default_params();
  p.m_f = 1e-15;
  p.sensing = ForceThreshold{1e-12};
  CHECK(total_impulse(p).total < 1e-9);
}

TEST_CASE("convexity, stationarity, and reaction independence in v_0") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    CollisionParams1D p = random_params(rng);
    const auto total_at = [&](double v) {
      CollisionParams1D q = p;
      q.v_0 = v;
      return total_impulse(q).total;
    };

    const double va = 0.01 + 5.0 * u(rng);
    const double vb = va + 0.01 + 5.0 * u(rng);
    CHECK(total_at(0.5 * (va + vb)) <=
          0.5 * (total_at(va) + total_at(vb)) + 1e-12);

    // Positive second difference.
    const double h = 0.05 * va;
    CHECK(total_at(va + h) + total_at(va - h) - 2.0 * total_at(va) > 0.0);

    // Stationarity at v*.
    const double f_s = effective_threshold(p.sensing, p.k_s);
    const double k = combined_stiffness(p.k_m, p.k_s);
    const double v_star = optimal_velocity(f_s, k, p.m_f);
    const double slope = oracles::central_difference(
        total_at, v_star, 1e-6 * v_star);
    CHECK(std::abs(slope) < 1e-8 * (total_at(v_star) / v_star));

    // Reaction impulse ignores v_0 and m_f.
    CollisionParams1D q = p;
    q.v_0 = p.v_0 * 7.3;
    q.m_f = p.m_f * 0.11;
    CHECK(total_impulse(q).i_reaction == total_impulse(p).i_reaction);
  }
}

TEST_CASE("per-phase scaling exponents under (F_s, F_a, k) scaling") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(0.2, 5.0);
  for (int i = 0; i < 100; ++i) {
    const CollisionParams1D p = random_params(rng);
    const double f_s = effective_threshold(p.sensing, p.k_s);
    const double k = combined_stiffness(p.k_m, p.k_s);
    const double a = p.acceleration();
    const double scale = lam(rng);

    // Sensing: F_s^2 / k is homogeneous of degree 1.
    CHECK(sensing_impulse(scale * f_s, scale * k, p.v_0) ==
          doctest::Approx(scale * sensing_impulse(f_s, k, p.v_0))
              .epsilon(1e-12));
    // Sensing time is invariant.
    CHECK(sensing_time(scale * f_s, scale * k, p.v_0) ==
          doctest::Approx(sensing_time(f_s, k, p.v_0)).epsilon(1e-12));
    // Reaction: degree 1/2 when F_s, a, k_m all scale.
    CHECK(reaction_impulse(scale * f_s, scale * p.k_m, scale * a) ==
          doctest::Approx(std::sqrt(scale) * reaction_impulse(f_s, p.k_m, a))
              .epsilon(1e-12));
    // Plastic: independent of forces and stiffness.
    CHECK(plastic_impulse(p.m_f, p.v_0) ==
          plastic_impulse(p.m_f, p.v_0) * 1.0);
    // Optimal velocity: degree 1/2 in the same scaling.
    CHECK(optimal_velocity(scale * f_s, scale * k, p.m_f) ==
          doctest::Approx(std::sqrt(scale) * optimal_velocity(f_s, k, p.m_f))
              .epsilon(1e-12));
  }
}

TEST_CASE("optimal velocity: closed form vs golden-section minimization") {
  const double k = combined_stiffness(1000.0, 100.0);
  CHECK(optimal_velocity(3.0, k, 0.1) ==
        doctest::Approx(0.70356236).epsilon(1e-7));

  // Quadrupling the stiffness halves v*.
  CHECK(optimal_velocity(3.0, 4.0 * k, 0.1) ==
        doctest::Approx(0.5 * optimal_velocity(3.0, k, 0.1)).epsilon(1e-12));

  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    const CollisionParams1D p = random_params(rng);
    const double f_s = effective_threshold(p.sensing, p.k_s);
    const double kk = combined_stiffness(p.k_m, p.k_s);
    const auto total_at = [&](double v) {
      CollisionParams1D q = p;
      q.v_0 = v;
      return total_impulse(q).total;
    };
    const double v_star = optimal_velocity(f_s, kk, p.m_f);
    const double v_num = oracles::golden_section_min(total_at, 1e-4, 100.0);
    CHECK(std::abs(v_num - v_star) / v_star < 1e-6);

    // Phase equality at the optimum.
    CHECK(plastic_impulse(p.m_f, v_star) ==
          doctest::Approx(sensing_impulse(f_s, kk, v_star)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(optimal_velocity(0.0, k, 0.1), DomainError);
}

TEST_CASE("minimum impulse: substitution equals the bandwidth form") {
  const CollisionParams1D p = default_params();
  const double i_star = minimum_impulse(p);
  CHECK(i_star == doctest::Approx(0.18970).epsilon(1e-4));

  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const CollisionParams1D q = random_params(rng);
    const double f_s = effective_threshold(q.sensing, q.k_s);
    const double k = combined_stiffness(q.k_m, q.k_s);
    const double omega_s = std::sqrt(k / q.m_f);
    const double omega_a = std::sqrt(q.k_m / q.m_r);
    const double bandwidth_form =
        f_s * std::sqrt(2.0) / omega_s +
        (f_s / omega_a) * std::sqrt(8.0 * f_s / (9.0 * q.f_a));
    CHECK(minimum_impulse(q) ==
          doctest::Approx(bandwidth_form).epsilon(1e-12));
  }

  // The reaction term vanishes with unbounded reaction force.
  CollisionParams1D q = p;
  q.f_a = 1e18;
  const double f_s = 3.0;
  const double k = combined_stiffness(q.k_m, q.k_s);
  const double sensing_only = f_s * std::sqrt(2.0) / std::sqrt(k / q.m_f);
  CHECK(minimum_impulse(q) == doctest::Approx(sensing_only).epsilon(1e-6));
}

TEST_CASE("minimum impulse lower-bounds a dense velocity scan") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 20; ++i) {
    CollisionParams1D p = random_params(rng);
    const double i_star = minimum_impulse(p);
    for (int j = 0; j <= 400; ++j) {
      p.v_0 = 1e-3 * std::pow(1e4, j / 400.0);  // 1e-3 .. 10
      CHECK(total_impulse(p).total >= i_star - 1e-12);
    }
  }
}
