#include "radvel/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace radvel {

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::L2: return "l2";
    case LossKind::TruncatedL2: return "truncated_l2";
    case LossKind::Huber: return "huber";
    case LossKind::Cauchy: return "cauchy";
    case LossKind::BarronGeneral: return "barron";
  }
  return "l2";
}

void validate(const LossSpec& spec) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw Error(Errc::InvalidLossSpec, "scale must be positive, got " + std::to_string(spec.scale));
  }
  if (!(spec.truncation > 0.0) || !std::isfinite(spec.truncation)) {
    throw Error(Errc::InvalidLossSpec,
                "truncation must be positive, got " + std::to_string(spec.truncation));
  }
  if (std::isnan(spec.alpha) || spec.alpha == std::numeric_limits<double>::infinity()) {
    throw Error(Errc::InvalidLossSpec, "alpha must be finite or -inf");
  }
}

namespace {

double barron(double x, double c, double alpha) {
  const double s = (x / c) * (x / c);
  if (alpha == 2.0) return 0.5 * s;
  if (alpha == 0.0) return std::log1p(0.5 * s);
  if (std::isinf(alpha)) return -std::expm1(-0.5 * s);
  const double b = std::fabs(alpha - 2.0);
  return (b / alpha) * std::expm1(0.5 * alpha * std::log1p(s / b));
}

// rho'(x) / x for the general family.
double barron_curvature(double x, double c, double alpha) {
  const double c2 = c * c;
  const double s = (x / c) * (x / c);
  if (alpha == 2.0) return 1.0 / c2;
  if (alpha == 0.0) return 2.0 / (s * c2 + 2.0 * c2);
  if (std::isinf(alpha)) return std::exp(-0.5 * s) / c2;
  const double b = std::fabs(alpha - 2.0);
  return std::exp((0.5 * alpha - 1.0) * std::log1p(s / b)) / c2;
}

double rho(const LossSpec& spec, double x) {
  switch (spec.kind) {
    case LossKind::L2: return 0.5 * x * x;
    case LossKind::TruncatedL2: {
      const double t = spec.truncation;
      return 0.5 * std::min(x * x, t * t);
    }
    case LossKind::Huber: {
      const double c = spec.scale;
      const double a = std::fabs(x);
      return a <= c ? 0.5 * x * x : c * (a - 0.5 * c);
    }
    case LossKind::Cauchy: {
      const double c = spec.scale;
      return 0.5 * c * c * std::log1p((x / c) * (x / c));
    }
    case LossKind::BarronGeneral: return barron(x, spec.scale, spec.alpha);
  }
  return 0.0;
}

}  // namespace

double irls_weight(const LossSpec& spec, double x) {
  switch (spec.kind) {
    case LossKind::L2: return 1.0;
    case LossKind::TruncatedL2: return std::fabs(x) < spec.truncation ? 1.0 : 0.0;
    case LossKind::Huber: {
      const double a = std::fabs(x);
      return a <= spec.scale ? 1.0 : spec.scale / a;
    }
    case LossKind::Cauchy: {
      const double r = x / spec.scale;
      return 1.0 / (1.0 + r * r);
    }
    case LossKind::BarronGeneral: return barron_curvature(x, spec.scale, spec.alpha);
  }
  return 1.0;
}

double eval(const LossSpec& spec, double x, double w) {
  validate(spec);
  return w * rho(spec, x);
}

double eval_grad(const LossSpec& spec, double x, double w) {
  validate(spec);
  if (spec.kind == LossKind::Huber && std::fabs(x) > spec.scale) {
    return w * std::copysign(spec.scale, x);
  }
  return w * irls_weight(spec, x) * x;
}

double weight_of(const Detection& d, const LossSpec& spec, double max_snr) {
  if (!spec.snr_weighting || !(max_snr > 0.0)) return 1.0;
  return d.snr / max_snr;
}

std::vector<double> scan_weights(const RadarScan& scan, const LossSpec& spec) {
  double max_snr = 0.0;
  for (const auto& d : scan.detections) max_snr = std::max(max_snr, d.snr);
  std::vector<double> w;
  w.reserve(scan.size());
  for (const auto& d : scan.detections) w.push_back(weight_of(d, spec, max_snr));
  return w;
}

}  // namespace radvel
