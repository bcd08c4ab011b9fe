#pragma once

#include <cstdint>
#include <memory>

#include "reflex/collision_params.hpp"
#include "reflex/force_trace.hpp"

namespace reflex {

// How the plastic impact deposits the finger momentum into the trace. The
// instantaneous form matches the analytical model exactly (the spike never
// appears in the sampled force); the half-sine form spreads m_f*v_0 over a
// pulse of duration pi*sqrt(m_f/k_c), which is what real sensor traces show.
enum class SpikeModel { kInstantaneous, kHalfSine };

struct SimOptions {
  double dt = 1e-5;          // base step [s]
  double t_max = 10.0;       // horizon measured from contact [s]
  SpikeModel spike = SpikeModel::kHalfSine;
  double contact_stiffness = 2.0e7;  // k_c of the half-sine spike [N/m]
  double noise_sigma = 0.0;  // [N], applied by synthesize_trace, not here
  std::uint64_t seed = 0;
  double lead_in = 0.01;     // quiet time recorded before contact [s]
  double tail = 0.005;       // quiet time recorded after release [s]
  double latency = 0.0;      // delay between detection and reaction [s]
};

void validate(const SimOptions& opt);

struct SimEvents {
  double t_contact = 0.0;  // absolute trace time of first contact [s]
  double t_detect = 0.0;   // threshold crossing [s]
  double t_release = 0.0;  // contact force back to zero [s]
};

struct SimResult {
  ForceTrace trace;  // total contact force (spike + phase force)
  std::vector<double> spike_component;  // same sampling as trace
  SimEvents events;
  PhaseBreakdown impulses;  // per-phase trapezoid integrals of the trace
};

// Collision ran past t_max before releasing; carries the partial result.
class HorizonError : public Error {
 public:
  HorizonError(const std::string& what, SimResult partial)
      : Error("horizon", what),
        partial_(std::make_shared<SimResult>(std::move(partial))) {}

  const SimResult& partial() const { return *partial_; }

 private:
  std::shared_ptr<SimResult> partial_;
};

// Time-stepping realization of the collision timeline, independent of the
// closed forms: ideal velocity control ramps the series spring force until it
// crosses the threshold, then the software spring is zeroed and a constant
// reaction force pulls the robot mass off the mechanical spring. Integration
// is fixed-step classical RK4 with interpolated event times; the spike
// support is oversampled so its impulse is resolved by the trapezoid rule.
SimResult simulate(const CollisionParams1D& p, const SimOptions& opt);

// Convenience wrapper returning only the integrated per-phase impulses.
PhaseBreakdown simulated_impulse(const CollisionParams1D& p,
                                 const SimOptions& opt);

}  // namespace reflex
