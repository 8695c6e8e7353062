#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cascade/constants.hpp"
#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"
#include "cascade/runner.hpp"
#include "cascade/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kIoError = 1, kParseError = 2, kNumericalError = 3, kDarkLine = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven biexciton-exciton cascade: dressed-state spectra, Rabi dynamics and "
               "filtered photon correlations"};
  app.set_version_flag("--version", std::string(cascade::kVersion));
  app.require_subcommand(1);

  std::string scenario_file;
  std::string out_dir = ".";
  unsigned jobs = cascade::default_jobs();

  auto* run = app.add_subcommand("run", "Run a scenario and write CSV files plus a manifest");
  run->add_option("scenario", scenario_file, "Scenario file")->required();
  run->add_option("--jobs,-j", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out_dir, "Output directory");

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("scenario", scenario_file, "Scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  cascade::Scenario scenario;
  try {
    scenario = cascade::parse_scenario(read_file(scenario_file));
  } catch (const cascade::ParseError& e) {
    std::cerr << fmt::format("{}: parse error: {}\n", scenario_file, e.what());
    return kParseError;
  } catch (const cascade::InvalidInputError& e) {
    std::cerr << fmt::format("{}: invalid scenario: {}\n", scenario_file, e.what());
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kIoError;
  }

  if (validate->parsed()) {
    std::cout << fmt::format("{}: ok (kind = {})\n", scenario_file, cascade::kind_name(scenario.kind));
    return kOk;
  }

  try {
    cascade::RunOptions options;
    options.out_dir = out_dir;
    options.jobs = jobs;
    options.scenario_name = scenario_file;
    const auto manifest = cascade::run(scenario, options);
    for (const auto& p : manifest.outputs) std::cout << p.string() << '\n';
    return kOk;
  } catch (const cascade::UndefinedNormalizationError& e) {
    std::cerr << "dark line: " << e.what() << '\n';
    return kDarkLine;
  } catch (const cascade::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const cascade::InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}
