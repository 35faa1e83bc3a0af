#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "radvel/cli.hpp"

namespace {

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    }
  }
  if (out.size() != n) throw CLI::ValidationError(flag, "expected " + std::to_string(n) + " comma-separated numbers");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar ego-velocity estimation from single scans"};
  app.require_subcommand(1);

  std::string config_path, input_path = "-", output_path = "-";
  auto* estimate = app.add_subcommand("estimate", "estimate ego-velocity for every scan in a scan file");
  estimate->add_option("--config", config_path, "JSON config; defaults when omitted");
  estimate->add_option("--input", input_path, "scan file or - for stdin");
  estimate->add_option("--output", output_path, "estimate log or - for stdout");

  std::string estimates_path, gt_path, lever_arm = "0,0,0", rotation = "1,0,0,0,1,0,0,0,1", report_path = "-";
  auto* evaluate = app.add_subcommand("eval", "score an estimate log against ground truth");
  evaluate->add_option("--estimates", estimates_path, "estimate log")->required();
  evaluate->add_option("--gt", gt_path, "ground-truth file")->required();
  evaluate->add_option("--lever-arm", lever_arm, "body point to radar offset x,y,z [m]");
  evaluate->add_option("--rotation", rotation, "body-to-radar rotation, 9 values row-major");
  evaluate->add_option("--report", report_path, "JSON report path or - for stdout");

  std::string spec_path, synth_out = "-", synth_gt;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scan fixture");
  synth->add_option("--spec", spec_path, "JSON scene/stream description")->required();
  synth->add_option("--output", synth_out, "scan file or - for stdout");
  synth->add_option("--gt", synth_gt, "also write the true velocities here");

  radvel::metrics::ExtrinsicSpec extrinsics;
  try {
    app.parse(argc, argv);
    if (*evaluate) {
      const auto l = parse_list(lever_arm, 3, "--lever-arm");
      const auto r = parse_list(rotation, 9, "--rotation");
      extrinsics.lever_arm = radvel::Vec3(l[0], l[1], l[2]);
      for (int i = 0; i < 9; ++i) extrinsics.rotation(i / 3, i % 3) = r[i];
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : radvel::cli::kExitUsage;
  }

  if (*estimate) return radvel::cli::run_estimate_command(config_path, input_path, output_path, std::cerr);
  if (*evaluate) {
    return radvel::cli::run_eval_command(estimates_path, gt_path, extrinsics, report_path, std::cout, std::cerr);
  }
  return radvel::cli::run_synth_command(spec_path, synth_out, synth_gt, std::cerr);
}
