// pwave: run one spectral-threshold experiment from a flat key = value config.
//
// Exit status: 0 when every verdict passes, 2 when a verdict fails, 1 on input
// or solver errors.

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "pwave/config.hpp"
#include "pwave/errors.hpp"

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw pwave::InputError("cannot write " + path.string());
  out << std::setw(2) << j << "\n";
}

int run(const std::string& config_path, std::string out_dir, bool oracle, bool mesh_out,
        bool verbose) {
  const pwave::RunConfig config = pwave::RunConfig::load(config_path);
  if (out_dir.empty()) out_dir = config.output();
  const fs::path dir(out_dir);

  const auto start = std::chrono::steady_clock::now();
  const pwave::ExperimentReport report = pwave::run_experiment(config, {oracle});
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  // Nothing is written unless the experiment ran.
  fs::create_directories(dir);
  if (mesh_out) {
    const pwave::Numerics num = pwave::numerics_from_config(config);
    const auto mesh = pwave::build_mesh(pwave::section_from_config(config), num.h);
    std::ofstream out(dir / "mesh.txt");
    mesh.write(out);
  }

  write_json(dir / "report.json", report.to_json(utc_timestamp()));
  for (const pwave::DataTable& table : report.tables) {
    std::ofstream out(dir / (table.name + ".csv"));
    table.write_csv(out);
  }
  nlohmann::ordered_json timings(report.runtimes);
  timings["total"] = total;
  write_json(dir / "timings.json", timings);

  if (oracle) {
    nlohmann::ordered_json j;
    j["experiment"] = report.experiment;
    if (report.quantities.contains("oracle")) j["values"] = report.quantities["oracle"];
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const pwave::Verdict& v : report.verdicts) {
      if (v.rule.find("oracle") == std::string::npos) continue;
      checks.push_back({{"rule", v.rule}, {"passed", v.passed}, {"value", v.value},
                        {"threshold", v.threshold}});
    }
    j["checks"] = checks;
    write_json(dir / "oracle.json", j);
  }

  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  for (const pwave::Verdict& v : report.verdicts) {
    if (verbose || !v.passed) {
      std::cout << (v.passed ? "pass " : "FAIL ") << v.rule << "  value=" << v.value
                << " threshold=" << v.threshold << "  (" << v.detail << ")\n";
    }
  }
  if (verbose) {
    for (const auto& [phase, seconds] : report.runtimes) {
      std::cout << "time " << phase << " " << seconds << " s\n";
    }
  }
  std::cout << report.experiment << ": " << (report.passed() ? "PASS" : "FAIL") << " ("
            << report.verdicts.size() << " verdicts, " << total << " s) -> " << dir.string()
            << "\n";
  return report.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral thresholds of the Dirichlet p-Laplacian in tubes"};
  std::string config_path;
  std::string out_dir;
  bool oracle = false;
  bool mesh_out = false;
  bool verbose = false;
  app.add_option("--config", config_path, "experiment config file (key = value)");
  app.add_option("--out", out_dir, "output directory (default: the config's output key)");
  app.add_flag("--seed-oracle", oracle, "also run the p = 2 and 1D reference computations");
  app.add_flag("--mesh-out", mesh_out, "write the cross-section mesh to mesh.txt");
  app.add_flag("-v,--verbose", verbose, "print every verdict and phase timing");
  CLI::App* list = app.add_subcommand("list", "list the available experiments");
  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    pwave::print_catalogue(std::cout);
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required (or use `pwave list`)\n";
    return 1;
  }
  try {
    return run(config_path, out_dir, oracle, mesh_out, verbose);
  } catch (const pwave::ConvergenceError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
