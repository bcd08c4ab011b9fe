#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "reflex/quadrature.hpp"
#include "reflex/reflex_core.hpp"
#include "reflex/trace_fit.hpp"

using namespace reflex;

namespace {

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

std::string temp_path(const char* name) {
  return std::string("reflex_test_") + name + ".csv";
}

ForceTrace ramp_trace(double f_end, double t_end, int n) {
  ForceTrace trace;
  for (int i = 0; i <= n; ++i) {
    const double t = t_end * i / n;
    trace.t.push_back(t);
    trace.f.push_back(f_end * t / t_end);
  }
  return trace;
}

}  // namespace

TEST_CASE("trace CSV round trip and parse errors") {
  // Minimal two-sample file.
  {
    const std::string path = temp_path("minimal");
    std::ofstream out(path);
    out << "t_s,force_n\n0,0\n0.001,1.5\n";
    out.close();
    const ForceTrace trace = read_trace(path);
    REQUIRE(trace.size() == 2);
    CHECK(trace.t[1] == 0.001);
    CHECK(trace.f[1] == 1.5);
    std::remove(path.c_str());
  }

  // CRLF is accepted.
  {
    const std::string path = temp_path("crlf");
    std::ofstream out(path, std::ios::binary);
    out << "t_s,force_n\r\n0,0\r\n1,2\r\n";
    out.close();
    CHECK(read_trace(path).size() == 2);
    std::remove(path.c_str());
  }

  // Write -> read identity within 1e-9 relative.
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    ForceTrace trace;
    double t = 0.123456789;
    for (int i = 0; i < 500; ++i) {
      trace.t.push_back(t);
      trace.f.push_back(u(rng));
      t += 1e-4 * (1.0 + 0.5 * std::abs(u(rng)) / 10.0);
    }
    const std::string path = temp_path("roundtrip");
    write_trace(trace, path);
    const ForceTrace back = read_trace(path);
    REQUIRE(back.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
      CHECK(std::abs(back.t[i] - trace.t[i]) <=
            1e-9 * std::max(1.0, std::abs(trace.t[i])));
      CHECK(std::abs(back.f[i] - trace.f[i]) <=
            1e-9 * std::max(1.0, std::abs(trace.f[i])));
    }
    std::remove(path.c_str());
  }

  // Shuffled rows violate monotonic time, naming the offending line.
  {
    const std::string path = temp_path("shuffled");
    std::ofstream out(path);
    out << "t_s,force_n\n0,0\n0.002,1\n0.001,2\n";
    out.close();
    try {
      read_trace(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
    std::remove(path.c_str());
  }

  // Missing header and non-numeric cells.
  {
    const std::string path = temp_path("noheader");
    std::ofstream out(path);
    out << "time,force\n0,0\n";
    out.close();
    CHECK_THROWS_AS(read_trace(path), ParseError);
    std::remove(path.c_str());
  }
  {
    const std::string path = temp_path("badcell");
    std::ofstream out(path);
    out << "t_s,force_n\n0,zero\n";
    out.close();
    try {
      read_trace(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::remove(path.c_str());
  }

  CHECK_THROWS_AS(read_trace("does_not_exist.csv"), IoError);
}

TEST_CASE("integration: constant, triangle, and synthetic traces") {
  // Constant 1 N over [0, 1] s.
  {
    ForceTrace flat;
    for (int i = 0; i <= 1000; ++i) {
      flat.t.push_back(i / 1000.0);
      flat.f.push_back(1.0);
    }
    CHECK(integrate_trace(flat, IntegrationMethod::kTrapezoid) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_trace(flat, IntegrationMethod::kGaussKronrod) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  // Triangle ramp 0 -> 3 N over the closed-form sensing time.
  {
    const ForceTrace tri = ramp_trace(3.0, 0.066, 2000);
    CHECK(integrate_trace(tri, IntegrationMethod::kTrapezoid) ==
          doctest::Approx(0.099).epsilon(1e-9));
    CHECK(integrate_trace(tri, IntegrationMethod::kGaussKronrod) ==
          doctest::Approx(0.099).epsilon(1e-6));
  }

  // Default synthetic trace integrates to the closed-form total.
  {
    const ForceTrace trace = synthesize_trace(default_params(), SimOptions{});
    const double closed = total_impulse(default_params()).total;
    const double trap = integrate_trace(trace, IntegrationMethod::kTrapezoid);
    const double gk = integrate_trace(trace, IntegrationMethod::kGaussKronrod);
    CHECK(std::abs(trap - closed) / closed < 0.02);
    CHECK(std::abs(gk - closed) / closed < 0.02);
    CHECK(std::abs(gk - trap) / trap < 0.005);
  }

  ForceTrace tiny = ramp_trace(1.0, 1.0, 5);
  CHECK_THROWS_AS(integrate_trace(tiny, IntegrationMethod::kTrapezoid),
                  DomainError);
}

TEST_CASE("integration methods agree within 0.5% on synthetic traces") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    CollisionParams1D p = default_params();
    p.m_f = 0.05 + 0.3 * u(rng);
    p.v_0 = 0.2 + 2.0 * u(rng);
    p.k_s = 50.0 + 300.0 * u(rng);
    SimOptions opt;
    opt.noise_sigma = 0.005 * u(rng);
    opt.seed = i;
    const ForceTrace trace = synthesize_trace(p, opt);
    REQUIRE(trace.size() >= 1000);
    const double trap = integrate_trace(trace, IntegrationMethod::kTrapezoid);
    const double gk = integrate_trace(trace, IntegrationMethod::kGaussKronrod);
    CHECK(std::abs(gk - trap) <= 0.005 * std::abs(trap));
  }
}

TEST_CASE("integration linearity") {
  const ForceTrace base = synthesize_trace(default_params(), SimOptions{});
  for (double scale : {2.0, 10.0, 0.5}) {
    ForceTrace scaled = base;
    for (double& f : scaled.f) {
      f *= scale;
    }
    const double trap_base =
        integrate_trace(base, IntegrationMethod::kTrapezoid);
    const double trap_scaled =
        integrate_trace(scaled, IntegrationMethod::kTrapezoid);
    CHECK(std::abs(trap_scaled - scale * trap_base) <=
          1e-12 * std::abs(trap_scaled));

    const double gk_base =
        integrate_trace(base, IntegrationMethod::kGaussKronrod);
    const double gk_scaled =
        integrate_trace(scaled, IntegrationMethod::kGaussKronrod);
    CHECK(std::abs(gk_scaled - scale * gk_base) <=
          1e-12 * std::abs(gk_scaled));
  }
}

TEST_CASE("adaptive quadrature sanity on analytic integrands") {
  CHECK(adaptive_gauss_kronrod([](double x) { return std::sin(x); }, 0.0,
                               M_PI) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(adaptive_gauss_kronrod([](double x) { return x * x * x; }, -1.0,
                               2.0) == doctest::Approx(3.75).epsilon(1e-12));
  // Sharp peak needs subdivision.
  const double peaked = adaptive_gauss_kronrod(
      [](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-10);
  const double analytic = 2.0 / 1e-2 * std::atan(1.0 / 1e-2);
  CHECK(peaked == doctest::Approx(analytic).epsilon(1e-9));
}

TEST_CASE("synthesized noise is seeded and reproducible") {
  SimOptions opt;
  opt.noise_sigma = 0.01;
  opt.seed = 42;
  const ForceTrace a = synthesize_trace(default_params(), opt);
  const ForceTrace b = synthesize_trace(default_params(), opt);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.f[i] == b.f[i]);
  }
  // Noise-free equals the simulator trace exactly.
  SimOptions clean;
  const ForceTrace c = synthesize_trace(default_params(), clean);
  const SimResult sim = simulate(default_params(), clean);
  REQUIRE(c.size() == sim.trace.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.f[i] == sim.trace.f[i]);
  }
}

TEST_CASE("synthetic ramp peak sits at the threshold") {
  const ForceTrace trace = synthesize_trace(default_params(), SimOptions{});
  // Peak force after the spike has decayed: scan the final two thirds.
  double peak = 0.0;
  for (std::size_t i = trace.size() / 3; i < trace.size(); ++i) {
    peak = std::max(peak, trace.f[i]);
  }
  CHECK(std::abs(peak - 3.0) < 0.02 * 3.0);
}

TEST_CASE("segmentation: clean default trace") {
  const ForceTrace trace = synthesize_trace(default_params(), SimOptions{});
  const Segmentation seg = segment_trace(trace);
  const PhaseBreakdown closed = total_impulse(default_params());
  const double dt = 1e-5;

  CHECK(std::abs(seg.t_contact - 0.01) <= 2.0 * dt);
  CHECK(std::abs((seg.t1 - seg.t_contact) - closed.t1) <= 2.0 * dt);
  CHECK(std::abs((seg.t2 - seg.t_contact) - closed.t2) <= 5.0 * dt);
  CHECK(seg.t_contact < seg.t1);
  CHECK(seg.t1 < seg.t2);
  CHECK(seg.f_peak == doctest::Approx(3.0).epsilon(0.02));
  CHECK(seg.ramp_slope ==
        doctest::Approx(combined_stiffness(1000.0, 100.0) * 0.5)
            .epsilon(0.01));
}

TEST_CASE("segmentation: noisy boundaries stay within 5 dt of clean ones") {
  const double dt = 1e-5;
  const ForceTrace clean = synthesize_trace(default_params(), SimOptions{});
  const Segmentation seg_clean = segment_trace(clean);

  SimOptions noisy_opt;
  noisy_opt.noise_sigma = 0.01;
  noisy_opt.seed = 2024;
  const ForceTrace noisy = synthesize_trace(default_params(), noisy_opt);
  const Segmentation seg_noisy = segment_trace(noisy);

  CHECK(std::abs(seg_noisy.t_contact - seg_clean.t_contact) <= 5.0 * dt);
  CHECK(std::abs(seg_noisy.t1 - seg_clean.t1) <= 5.0 * dt);
  CHECK(std::abs(seg_noisy.t2 - seg_clean.t2) <= 5.0 * dt);
}

TEST_CASE("segmentation rejects quiet and ambiguous traces") {
  ForceTrace zero;
  for (int i = 0; i <= 1000; ++i) {
    zero.t.push_back(i * 1e-4);
    zero.f.push_back(0.0);
  }
  CHECK_THROWS_AS(segment_trace(zero), TraceError);

  // Two far-apart episodes.
  const ForceTrace one = synthesize_trace(default_params(), SimOptions{});
  ForceTrace two = one;
  const double shift = two.t.back() + 0.05;
  for (std::size_t i = 0; i < one.size(); ++i) {
    two.t.push_back(one.t[i] + shift);
    two.f.push_back(one.f[i]);
  }
  try {
    segment_trace(two);
    FAIL("expected TraceError");
  } catch (const TraceError& e) {
    CHECK(e.code() == "ambiguous");
  }
}

TEST_CASE("fit: noise-free recovery within 0.5%") {
  CollisionParams1D p;
  p.m_f = 0.1;
  p.m_r = 1.0;
  p.k_m = 2.0e7;
  p.k_s = 440.0;
  p.sensing = ForceThreshold{3.0};
  p.v_0 = 0.1;
  p.f_a = 5.0;

  SimOptions opt;
  opt.dt = 1e-6;
  opt.lead_in = 0.004;
  opt.tail = 0.002;
  const ForceTrace trace = synthesize_trace(p, opt);
  const FitResult fit = fit_trace(trace, p.k_m, p.v_0);

  CHECK(fit.converged);
  CHECK(std::abs(fit.m_f - 0.1) / 0.1 < 0.005);
  CHECK(std::abs(fit.k_s - 440.0) / 440.0 < 0.005);
  CHECK(std::abs(fit.f_s - 3.0) / 3.0 < 0.005);
  CHECK(std::abs(fit.a - 5.0) / 5.0 < 0.005);
  CHECK(fit.residual_rms < 0.01);
}

TEST_CASE("fit: noisy recovery within 5% (a within 15%)") {
  CollisionParams1D p;
  p.m_f = 0.1;
  p.m_r = 1.0;
  p.k_m = 2.0e7;
  p.k_s = 440.0;
  p.sensing = ForceThreshold{3.0};
  p.v_0 = 0.1;
  p.f_a = 5.0;

  SimOptions opt;
  opt.dt = 1e-6;
  opt.lead_in = 0.004;
  opt.tail = 0.002;
  opt.noise_sigma = 0.01;
  opt.seed = 77;
  const ForceTrace trace = synthesize_trace(p, opt);
  const FitResult fit = fit_trace(trace, p.k_m, p.v_0);

  CHECK(std::abs(fit.m_f - 0.1) / 0.1 < 0.05);
  CHECK(std::abs(fit.k_s - 440.0) / 440.0 < 0.05);
  CHECK(std::abs(fit.f_s - 3.0) / 3.0 < 0.05);
  CHECK(std::abs(fit.a - 5.0) / 5.0 < 0.15);
  CHECK(fit.sigma_m_f > 0.0);
  CHECK(fit.sigma_f_s > 0.0);
}

TEST_CASE("fit round-trip over randomized parameter sets") {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto log_uniform = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, u(rng));
  };

  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    CollisionParams1D p;
    p.m_f = log_uniform(0.05, 0.3);
    p.m_r = 1.0;
    p.k_m = 2.0e7;
    p.k_s = log_uniform(200.0, 800.0);
    p.sensing = ForceThreshold{log_uniform(1.0, 4.0)};
    p.v_0 = log_uniform(0.3, 1.0);
    p.f_a = log_uniform(2.0, 20.0);

    SimOptions opt;
    opt.dt = 1e-6;
    opt.lead_in = 0.005;  // keeps the 5% floor window ahead of contact
    opt.tail = 0.001;

    const double f_s = effective_threshold(p.sensing, p.k_s);
    const double a = p.acceleration();

    // Clean recovery.
    const FitResult clean = fit_trace(synthesize_trace(p, opt), p.k_m, p.v_0);
    CHECK(std::abs(clean.m_f - p.m_f) / p.m_f < 0.005);
    CHECK(std::abs(clean.k_s - p.k_s) / p.k_s < 0.005);
    CHECK(std::abs(clean.f_s - f_s) / f_s < 0.005);
    CHECK(std::abs(clean.a - a) / a < 0.005);

    // Noisy recovery for (m_f, k_s, f_s).
    opt.noise_sigma = 0.01;
    opt.seed = 1000 + i;
    const FitResult noisy = fit_trace(synthesize_trace(p, opt), p.k_m, p.v_0);
    CHECK(std::abs(noisy.m_f - p.m_f) / p.m_f < 0.05);
    CHECK(std::abs(noisy.k_s - p.k_s) / p.k_s < 0.05);
    CHECK(std::abs(noisy.f_s - f_s) / f_s < 0.05);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("fit rejects traces without contact") {
  ForceTrace zero;
  for (int i = 0; i <= 1000; ++i) {
    zero.t.push_back(i * 1e-4);
    zero.f.push_back(0.0);
  }
  CHECK_THROWS_AS(fit_trace(zero, 2e7, 0.1), TraceError);
}
