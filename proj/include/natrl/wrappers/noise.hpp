#pragma once

// Pure-noise observation substitution: the probe for open-loop policies.
// The replacement is i.i.d. N(0, 1) generated from (seed, step index) alone,
// so it carries no information about the wrapped state.

#include <memory>

#include "natrl/core/environment.hpp"

namespace natrl {

inline Observation pure_noise_observation(const Shape& shape, const SeedTree& seed, std::uint64_t step) {
  Rng rng = seed.derive("pure_noise_step", step).stream();
  Observation obs;
  obs.shape = shape;
  obs.values.resize(shape_size(shape));
  for (auto& v : obs.values) v = static_cast<float>(rng.normal());
  return obs;
}

// Rewards, termination and the inner environment's seed are untouched.
class PureNoiseEnv : public EnvWrapper {
 public:
  using EnvWrapper::EnvWrapper;

  Observation reset(const SeedTree& seed) override {
    seed_ = seed.derive("pure_noise", 0);
    step_ = 0;
    Observation inner_obs = inner_->reset(seed);
    return replace(inner_obs);
  }

  StepResult step(int action) override {
    StepResult r = inner_->step(action);
    r.obs = replace(r.obs);
    return r;
  }

  std::string name() const override { return "pure_noise(" + inner_->name() + ")"; }

 private:
  // The goal side field is dropped too; nothing of the inner observation survives.
  Observation replace(const Observation& inner_obs) { return pure_noise_observation(inner_obs.shape, seed_, step_++); }

  SeedTree seed_;
  std::uint64_t step_ = 0;
};

}  // namespace natrl
