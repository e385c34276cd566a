#include "col/feedback.hpp"

#include <cmath>

namespace col {

double AdversarySpec::norm_at(long n) const {
  switch (schedule) {
    case Schedule::kZero: return 0.0;
    case Schedule::kHarmonic: return kappa / static_cast<double>(n);
    case Schedule::kConstant: return kappa;
  }
  return 0.0;
}

Vector AdversarySpec::bias_at(long n, Index dim) const {
  Vector u = Vector::Zero(dim);
  if (direction.size() == 0) {
    u[0] = 1.0;
  } else {
    u = direction / direction.norm();
  }
  return norm_at(n) * u;
}

void AdversarySpec::validate(Index dim) const {
  if (!std::isfinite(kappa) || kappa < 0.0) throw InvalidArgument("adversary kappa must be >= 0");
  if (direction.size() != 0) {
    if (direction.size() != dim) throw DimensionMismatch("adversary direction has wrong dimension");
    if (!(direction.norm() > 0.0) || !direction.allFinite()) {
      throw InvalidArgument("adversary direction must be a finite nonzero vector");
    }
  }
}

AdversarySpec::Schedule AdversarySpec::parse_schedule(const std::string& s) {
  if (s == "zero") return Schedule::kZero;
  if (s == "harmonic") return Schedule::kHarmonic;
  if (s == "constant") return Schedule::kConstant;
  throw InvalidArgument("unknown adversary schedule '" + s + "' (expected zero|harmonic|constant)");
}

std::string AdversarySpec::schedule_name(Schedule s) {
  switch (s) {
    case Schedule::kZero: return "zero";
    case Schedule::kHarmonic: return "harmonic";
    case Schedule::kConstant: return "constant";
  }
  return "zero";
}

void FeedbackSpec::validate(const Bifunction& f) const {
  if (has_noise()) {
    if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidArgument("feedback sigma must be >= 0");
    if (noise == Noise::kProblem && !f.sample_grad) {
      throw InvalidArgument("problem '" + f.name + "' has no stochastic gradient sampler");
    }
  }
  if (has_bias()) adversary.validate(f.dim());
}

FeedbackSpec::Mode FeedbackSpec::parse_mode(const std::string& s) {
  if (s == "deterministic") return Mode::kDeterministic;
  if (s == "stochastic") return Mode::kStochastic;
  if (s == "adversarial") return Mode::kAdversarial;
  if (s == "combined") return Mode::kCombined;
  throw InvalidArgument("unknown feedback mode '" + s +
                        "' (expected deterministic|stochastic|adversarial|combined)");
}

std::string FeedbackSpec::mode_name(Mode m) {
  switch (m) {
    case Mode::kDeterministic: return "deterministic";
    case Mode::kStochastic: return "stochastic";
    case Mode::kAdversarial: return "adversarial";
    case Mode::kCombined: return "combined";
  }
  return "deterministic";
}

FeedbackSample first_order_feedback(const Bifunction& f, const FeedbackSpec& spec, long n,
                                    const Vector& x_n, const Vector& tilt, Rng& rng) {
  FeedbackSample out;
  if (spec.has_noise() && spec.noise == FeedbackSpec::Noise::kProblem) {
    out.g = f.sample_grad(x_n, x_n, rng);
    if (tilt.size() != 0) out.g += tilt;
  } else {
    out.g = round_grad(f, x_n, tilt, x_n);
    if (spec.has_noise()) {
      std::normal_distribution<double> n01(0.0, 1.0);
      for (Index i = 0; i < out.g.size(); ++i) out.g[i] += spec.sigma * n01(rng);
    }
  }
  if (spec.has_bias()) {
    const Vector xi = spec.adversary.bias_at(n, out.g.size());
    out.g += xi;
    out.xi_norm = xi.norm();
  }
  return out;
}

}  // namespace col
