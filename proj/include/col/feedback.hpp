#pragma once

#include <string>

#include "col/bifunction.hpp"

namespace col {

/// Bias sequence xi_n = s(n) * kappa * u for a fixed unit direction u.
///   zero:     s(n) = 0
///   harmonic: s(n) = 1/n   (summable total bias up to log N)
///   constant: s(n) = 1     (total bias kappa * N)
struct AdversarySpec {
  enum class Schedule { kZero, kHarmonic, kConstant };
  Schedule schedule = Schedule::kZero;
  double kappa = 0.0;
  Vector direction;  // empty means e_0

  double norm_at(long n) const;
  Vector bias_at(long n, Index dim) const;
  void validate(Index dim) const;

  static Schedule parse_schedule(const std::string& s);
  static std::string schedule_name(Schedule s);
};

struct FeedbackSpec {
  enum class Mode { kDeterministic, kStochastic, kAdversarial, kCombined };
  // Gaussian: i.i.d. N(0, sigma^2) per coordinate. Problem: the bifunction's own sampler.
  enum class Noise { kGaussian, kProblem };

  Mode mode = Mode::kDeterministic;
  double sigma = 0.0;
  Noise noise = Noise::kGaussian;
  AdversarySpec adversary;

  bool has_noise() const { return mode == Mode::kStochastic || mode == Mode::kCombined; }
  bool has_bias() const { return mode == Mode::kAdversarial || mode == Mode::kCombined; }
  bool deterministic() const { return mode == Mode::kDeterministic; }
  void validate(const Bifunction& f) const;

  static Mode parse_mode(const std::string& s);
  static std::string mode_name(Mode m);
};

struct FeedbackSample {
  Vector g;
  double xi_norm = 0.0;
};

/// g_n = grad l_n(x_n) + eps_n + xi_n, drawing eps_n from `rng`.
FeedbackSample first_order_feedback(const Bifunction& f, const FeedbackSpec& spec, long n,
                                    const Vector& x_n, const Vector& tilt, Rng& rng);

}  // namespace col
