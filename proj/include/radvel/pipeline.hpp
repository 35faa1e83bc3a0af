#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radvel/loss.hpp"
#include "radvel/motion_gate.hpp"
#include "radvel/optimizer.hpp"
#include "radvel/rejection.hpp"
#include "radvel/types.hpp"

namespace radvel {

enum class DopplerSign : std::uint8_t { AsIs, Flipped };

struct EstimatorConfig {
  RejectorConfig rejector;
  LossSpec loss;
  SolverConfig solver;
  ZeroVelocityConfig zero_velocity;
  FilterConfig filter;
  bool filter_enabled = true;
  /// Applied by the scan readers at ingestion; the estimator itself always
  /// sees Dopplers in the static-target convention.
  DopplerSign doppler_sign = DopplerSign::AsIs;
};

void validate(const EstimatorConfig& cfg);

/// Scans with fewer returns than this are reported Degenerate.
inline constexpr std::size_t kMinDetectionsForEstimate = 3;

/// Side information from the last processed scan, for logging.
struct ScanDiagnostics {
  std::vector<std::string> warnings;
  std::optional<GateOutcome> gate;
  std::string failure;  // why a scan ended Degenerate/Rejected before the gate
};

/// Per-stream estimator: zero-velocity check, outlier rejection, solve, and
/// the sliding-window feasibility gate. Strictly sequential; one instance per
/// radar stream.
class VelocityEstimator {
 public:
  explicit VelocityEstimator(EstimatorConfig cfg);

  VelocityEstimate process_scan(const RadarScan& scan);

  const EstimatorConfig& config() const noexcept { return cfg_; }
  const FilterState& filter_state() const noexcept { return filter_; }
  /// Seed for the next robust solve when no rejector hypothesis applies.
  const std::optional<Vec3>& last_accepted() const noexcept { return last_accepted_; }
  const ScanDiagnostics& diagnostics() const noexcept { return diag_; }

 private:
  VelocityEstimate estimate_motion(const RadarScan& scan);
  void gate(VelocityEstimate& estimate);

  EstimatorConfig cfg_;
  FilterState filter_;
  std::optional<Vec3> last_accepted_;
  ScanDiagnostics diag_;
};

VelocityEstimate process_scan(VelocityEstimator& estimator, const RadarScan& scan);

/// One estimate per scan, in input order, from a fresh estimator.
std::vector<VelocityEstimate> process_sequence(const EstimatorConfig& cfg,
                                               std::span<const RadarScan> scans);

}  // namespace radvel
