// Command-line experiment runner.
//
//   feecavg run CONFIG [--output-dir DIR]   run an experiment and write report.json and errors.csv
//   feecavg list                            list meshes, named spaces, fields and other options
//
// Exit codes: 0 success, 1 a configured assertion failed, 2 configuration or
// usage error, 3 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "feec/experiment.hpp"

namespace {

constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

int run(const std::string& config_path, const std::string& output_override) {
  feec::ExperimentConfig config;
  std::filesystem::path dir;
  try {
    config = feec::load_experiment_config(config_path);
    dir = output_override.empty() ? std::filesystem::path(config.output_dir) : std::filesystem::path(output_override);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
      throw feec::ConfigError("output directory '" + dir.string() + "' cannot be created");
  } catch (const feec::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  feec::ExperimentResult result;
  try {
    result = feec::run_experiment(config);
  } catch (const feec::ConfigError& e) {
    std::cerr << "configuration error: " << config_path << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  for (const auto& line : result.log) std::cout << line << "\n";

  try {
    write_file(dir / config.report_file, result.report.dump(2) + "\n");
    write_file(dir / config.csv_file, result.csv);
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cout << "wrote " << (dir / config.report_file).string() << " and " << (dir / config.csv_file).string() << "\n";

  for (const auto& f : result.failures) std::cerr << "assertion failed: " << f << "\n";
  if (!result.passed()) return kExitAssertion;
  std::cout << "all assertions passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaging projections for finite element differential forms: experiment runner"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON configuration");
  run_cmd->add_option("config", config_path, "Path of the configuration file")->required();
  run_cmd->add_option("--output-dir", output_dir, "Directory for report.json and errors.csv");
  auto* list_cmd = app.add_subcommand("list", "List mesh generators, named spaces, fields and options");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (list_cmd->parsed()) {
    std::cout << feec::catalog_listing();
    return 0;
  }
  return run(config_path, output_dir);
}
