#include "radvel/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "radvel/config.hpp"
#include "radvel/io.hpp"
#include "radvel/synth.hpp"

namespace radvel::cli {
namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot open " + path + " for reading");
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot open " + path + " for writing");
  return f;
}

int report_error(std::ostream& log, const std::string& context, const Error& e) {
  log << "radvel: " << context << ": " << e.what() << '\n';
  return exit_code_for(e.code());
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::ConfigError:
    case Errc::InvalidConfig:
    case Errc::InvalidLossSpec:
      return kExitUsage;
    case Errc::NoPairs:
      return kExitEmpty;
    default:
      return kExitIo;
  }
}

std::size_t run_estimation(std::istream& in, std::ostream& out, const EstimatorConfig& cfg,
                           std::ostream& log) {
  io::ScanReader reader(in, cfg.doppler_sign);
  VelocityEstimator estimator(cfg);
  std::set<std::string> seen;
  std::size_t n = 0;
  io::write_estimate_header(out);
  while (auto scan = reader.next()) {
    const VelocityEstimate e = estimator.process_scan(*scan);
    for (const auto& w : estimator.diagnostics().warnings) {
      if (seen.insert(w).second) {
        log << "radvel: warning: scan " << reader.last_scan_id() << ": " << w << '\n';
      }
    }
    io::write_estimate_row(out, e);
    out.flush();
    ++n;
  }
  return n;
}

int run_estimate_command(const std::string& config_path, const std::string& input_path,
                         const std::string& output_path, std::ostream& log) {
  EstimatorConfig cfg;
  try {
    cfg = config::load(config_path);
  } catch (const Error& e) {
    return report_error(log, config_path.empty() ? "config" : config_path, e);
  }
  try {
    std::ifstream fin;
    std::ofstream fout;
    std::istream* in = &std::cin;
    std::ostream* out = &std::cout;
    if (input_path != "-") {
      fin = open_in(input_path);
      in = &fin;
    }
    if (output_path != "-") {
      fout = open_out(output_path);
      out = &fout;
    }
    run_estimation(*in, *out, cfg, log);
    if (!*out) throw Error(Errc::IoError, "write failed on " + output_path);
  } catch (const Error& e) {
    return report_error(log, input_path, e);
  }
  return kExitOk;
}

nlohmann::json report_to_json(const metrics::ErrorReport& r) {
  auto axes = [](const Vec3& v) { return nlohmann::json{{"x", v.x()}, {"y", v.y()}, {"z", v.z()}}; };
  return {{"ave", axes(r.ave)}, {"rmse", axes(r.rmse)}, {"n_pairs", r.n_pairs}, {"n_excluded", r.n_excluded}};
}

std::string format_report_table(const metrics::ErrorReport& r) {
  char buf[128];
  std::ostringstream s;
  s << "metric       x       y       z\n";
  std::snprintf(buf, sizeof buf, "AVE    %7.3f %7.3f %7.3f\n", r.ave.x(), r.ave.y(), r.ave.z());
  s << buf;
  std::snprintf(buf, sizeof buf, "RMSE   %7.3f %7.3f %7.3f\n", r.rmse.x(), r.rmse.y(), r.rmse.z());
  s << buf;
  s << "pairs " << r.n_pairs << ", excluded " << r.n_excluded << '\n';
  return s.str();
}

int run_eval_command(const std::string& estimates_path, const std::string& gt_path,
                     const metrics::ExtrinsicSpec& extrinsics, const std::string& report_path,
                     std::ostream& out, std::ostream& log) {
  try {
    extrinsics.validate();
  } catch (const Error& e) {
    return report_error(log, "extrinsics", e);
  }
  std::vector<VelocityEstimate> estimates;
  io::GroundTruthFile gt;
  try {
    auto f = open_in(estimates_path);
    estimates = io::parse_estimate_log(f);
  } catch (const Error& e) {
    return report_error(log, estimates_path, e);
  }
  try {
    auto f = open_in(gt_path);
    gt = io::parse_gt_file(f);
    metrics::validate(gt.samples);
  } catch (const Error& e) {
    return report_error(log, gt_path, e);
  }
  if (!gt.has_angular_velocity) {
    log << "radvel: warning: " << gt_path
        << " has no angular velocity columns; the lever-arm term is taken as zero\n";
  }

  metrics::ErrorReport report;
  try {
    report = metrics::score(estimates, gt.samples, extrinsics);
  } catch (const Error& e) {
    return report_error(log, estimates_path + " vs " + gt_path, e);
  }

  const std::string text = report_to_json(report).dump(2) + "\n";
  try {
    if (report_path.empty() || report_path == "-") {
      out << text;
    } else {
      auto f = open_out(report_path);
      f << text;
      if (!f) throw Error(Errc::IoError, "write failed on " + report_path);
    }
  } catch (const Error& e) {
    return report_error(log, report_path, e);
  }
  out << format_report_table(report);
  return kExitOk;
}

int run_synth_command(const std::string& spec_path, const std::string& output_path,
                      const std::string& gt_path, std::ostream& log) {
  config::SynthJob job;
  try {
    auto f = open_in(spec_path);
    auto j = nlohmann::json::parse(f, nullptr, false, true);
    if (j.is_discarded()) throw Error(Errc::ConfigError, "not valid JSON");
    job = config::synth_job_from_json(j);
  } catch (const Error& e) {
    return report_error(log, spec_path, e);
  }

  std::vector<RadarScan> scans;
  std::vector<metrics::GroundTruthSample> truth;
  if (job.stream) {
    for (auto& tick : synth::generate_trajectory_stream(job.profile, *job.stream, job.scene)) {
      truth.push_back({tick.labeled.scan.timestamp, tick.true_velocity, Vec3::Zero(), ""});
      scans.push_back(std::move(tick.labeled.scan));
    }
  } else {
    synth::SceneSpec scene = job.scene;
    scene.ego_velocity = job.profile(0.0);
    scans.push_back(synth::generate_scan(scene, 0.0).scan);
    truth.push_back({0.0, scene.ego_velocity, Vec3::Zero(), ""});
  }

  try {
    std::ofstream fout;
    std::ostream* out = &std::cout;
    if (output_path != "-") {
      fout = open_out(output_path);
      out = &fout;
    }
    io::write_scan_file(*out, scans);
    if (!*out) throw Error(Errc::IoError, "write failed on " + output_path);
    if (!gt_path.empty()) {
      auto g = open_out(gt_path);
      io::write_gt_file(g, truth);
      if (!g) throw Error(Errc::IoError, "write failed on " + gt_path);
    }
  } catch (const Error& e) {
    return report_error(log, output_path, e);
  }
  return kExitOk;
}

}  // namespace radvel::cli
