#include "reflex/collision_sim.hpp"

#include <cmath>

#include "reflex/reflex_core.hpp"

namespace reflex {

namespace {

// Classical RK4 step for dx/dt = f(x) with a state-independent or linear f;
// exact for the polynomial dynamics used here.
template <typename State, typename Deriv>
State rk4_step(const State& x, double h, Deriv f) {
  const State k1 = f(x);
  const State k2 = f(x + 0.5 * h * k1);
  const State k3 = f(x + 0.5 * h * k2);
  const State k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Vec2 {
  double a = 0.0;
  double b = 0.0;

  Vec2 operator+(const Vec2& o) const { return {a + o.a, b + o.b}; }
  friend Vec2 operator*(double s, const Vec2& v) { return {s * v.a, s * v.b}; }
};

double trapezoid_between(const std::vector<double>& t,
                         const std::vector<double>& f, std::size_t begin,
                         std::size_t end) {
  double sum = 0.0;
  for (std::size_t i = begin + 1; i <= end; ++i) {
    sum += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
  }
  return sum;
}

}  // namespace

void validate(const SimOptions& opt) {
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) {
    throw DomainError("dt must be positive and finite");
  }
  if (!(opt.t_max > opt.dt)) {
    throw DomainError("t_max must exceed dt");
  }
  if (opt.spike == SpikeModel::kHalfSine && !(opt.contact_stiffness > 0.0)) {
    throw DomainError("half-sine spike needs a positive contact stiffness");
  }
  if (opt.noise_sigma < 0.0 || opt.lead_in < 0.0 || opt.tail < 0.0 ||
      opt.latency < 0.0) {
    throw DomainError("noise, lead-in, tail, and latency must be >= 0");
  }
}

SimResult simulate(const CollisionParams1D& p, const SimOptions& opt) {
  validate(p);
  validate(opt);

  const double f_s = effective_threshold(p.sensing, p.k_s);
  const double k_sense = combined_stiffness(p.k_m, p.k_s);
  const double accel = p.acceleration();
  const double t_contact = opt.lead_in;

  // Half-sine spike: amplitude chosen so the pulse integral is m_f * v_0.
  const bool half_sine = opt.spike == SpikeModel::kHalfSine;
  const double spike_duration =
      half_sine ? M_PI * std::sqrt(p.m_f / opt.contact_stiffness) : 0.0;
  const double spike_amplitude =
      half_sine ? 0.5 * p.v_0 * std::sqrt(p.m_f * opt.contact_stiffness) : 0.0;
  const auto spike_at = [&](double t) {
    const double s = t - t_contact;
    if (!half_sine || s < 0.0 || s > spike_duration) {
      return 0.0;
    }
    return spike_amplitude * std::sin(M_PI * s / spike_duration);
  };
  const double spike_dt =
      half_sine ? std::min(opt.dt, spike_duration / 64.0) : opt.dt;

  SimResult result;
  std::vector<double>& ts = result.trace.t;
  std::vector<double>& phase_force = result.trace.f;  // spike added at the end

  // Events may land arbitrarily close to a grid sample; keep a minimum
  // separation so emitted times stay strictly increasing even after being
  // printed at finite precision.
  const auto emit = [&](double t, double force) {
    if (!ts.empty() &&
        t <= ts.back() + 1e-10 * std::max(1.0, std::abs(ts.back()))) {
      return;
    }
    ts.push_back(t);
    phase_force.push_back(force);
  };

  // Quiet lead-in, ending exactly at contact.
  for (std::size_t i = 0; i * opt.dt < t_contact; ++i) {
    emit(i * opt.dt, 0.0);
  }
  emit(t_contact, 0.0);
  result.events.t_contact = t_contact;

  const auto horizon_exceeded = [&](double t) { return t - t_contact > opt.t_max; };
  const auto throw_horizon = [&](const char* what) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      result.trace.f[i] += spike_at(ts[i]);
    }
    throw HorizonError(what, std::move(result));
  };

  // Sensing phase (plus any reaction latency): the velocity-controlled robot
  // compresses the series spring, F = k_sense * v_0 * (t - t_contact).
  double t = t_contact;
  double setpoint = 0.0;  // commanded displacement past the contact point
  double t_reaction_start = 0.0;
  double reaction_start_force = 0.0;
  bool detected = false;
  while (true) {
    const double h =
        (t - t_contact) < spike_duration ? spike_dt : opt.dt;
    const Vec2 next = rk4_step(Vec2{setpoint, 0.0}, h,
                               [&](const Vec2&) { return Vec2{p.v_0, 0.0}; });
    const double force_now = k_sense * setpoint;
    const double force_next = k_sense * next.a;

    if (!detected && force_next >= f_s) {
      // The ramp is linear, so the crossing interpolates exactly.
      const double frac = (f_s - force_now) / (force_next - force_now);
      const double t_cross = t + frac * h;
      result.events.t_detect = t_cross;
      detected = true;
      if (opt.latency == 0.0) {
        emit(t_cross, f_s);
        t_reaction_start = t_cross;
        reaction_start_force = f_s;
        setpoint = f_s / k_sense;
        break;
      }
    }
    if (detected && t + h >= result.events.t_detect + opt.latency) {
      const double t_start = result.events.t_detect + opt.latency;
      const double sp = setpoint + p.v_0 * (t_start - t);
      emit(t_start, k_sense * sp);
      t_reaction_start = t_start;
      reaction_start_force = k_sense * sp;
      setpoint = sp;
      break;
    }

    t += h;
    setpoint = next.a;
    emit(t, force_next);
    if (horizon_exceeded(t)) {
      throw_horizon("threshold not reached within t_max");
    }
  }

  // Reaction phase: software spring zeroed, the mechanical spring starts at
  // compression F1/k_m, and the robot mass retracts under constant force.
  // State: (retraction distance d, retraction speed v), d'' = accel.
  t = t_reaction_start;
  Vec2 state{0.0, 0.0};
  while (true) {
    const Vec2 next =
        rk4_step(state, opt.dt, [&](const Vec2& s) { return Vec2{s.b, accel}; });
    const double force_now = reaction_start_force - p.k_m * state.a;
    const double force_next = reaction_start_force - p.k_m * next.a;

    if (force_next <= 0.0) {
      const double frac = (force_now - 0.0) / (force_now - force_next);
      const double t_cross = t + frac * opt.dt;
      emit(t_cross, 0.0);
      result.events.t_release = t_cross;
      break;
    }
    t += opt.dt;
    state = next;
    emit(t, force_next);
    if (horizon_exceeded(t)) {
      throw_horizon("contact force did not release within t_max");
    }
  }

  // Quiet tail.
  const double t_end = result.events.t_release + opt.tail;
  for (std::size_t i = 1; result.events.t_release + i * opt.dt < t_end; ++i) {
    emit(result.events.t_release + i * opt.dt, 0.0);
  }
  if (opt.tail > 0.0) {
    emit(t_end, 0.0);
  }

  // Assemble total force and per-phase impulses. The spike is superposed on
  // the phase force, so the trapezoid integrals of the components add up to
  // the integral of the trace exactly.
  result.spike_component.resize(ts.size());
  std::size_t i_reaction = 0;
  std::size_t i_release = 0;
  std::size_t i_contact = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    result.spike_component[i] = spike_at(ts[i]);
    if (ts[i] <= t_contact) i_contact = i;
    if (ts[i] <= t_reaction_start) i_reaction = i;
    if (ts[i] <= result.events.t_release) i_release = i;
  }

  PhaseBreakdown& imp = result.impulses;
  imp.i_plastic =
      half_sine
          ? trapezoid_between(ts, result.spike_component, 0, ts.size() - 1)
          : plastic_impulse(p.m_f, p.v_0);
  imp.i_sensing = trapezoid_between(ts, phase_force, i_contact, i_reaction);
  imp.i_reaction = trapezoid_between(ts, phase_force, i_reaction, i_release);
  imp.total = imp.i_plastic + imp.i_sensing + imp.i_reaction;
  imp.t1 = result.events.t_detect - t_contact;
  imp.t2 = result.events.t_release - t_contact;

  for (std::size_t i = 0; i < ts.size(); ++i) {
    result.trace.f[i] += result.spike_component[i];
  }
  result.trace.source = "simulate";
  result.trace.nominal_rate_hz = 1.0 / opt.dt;
  return result;
}

PhaseBreakdown simulated_impulse(const CollisionParams1D& p,
                                 const SimOptions& opt) {
  return simulate(p, opt).impulses;
}

}  // namespace reflex
