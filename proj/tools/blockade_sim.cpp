// Copyright 2026 The blockade-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// blockade-sim: command-line driver for the experiment configs.
//
//   blockade-sim run --config <path.json> [--jobs N] [--out <dir>]
//   blockade-sim validate --config <path.json>
//   blockade-sim single-drive --config <path.json> [--delta2 <value>]
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "blockade/config.hpp"
#include "blockade/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int report_validation(const blockade::ValidationError& e) {
  std::cerr << e.what() << '\n';
  return kExitValidation;
}

int report_numerical(const std::exception& e) {
  std::cerr << "numerical failure: " << e.what() << '\n';
  return kExitNumerical;
}

std::string cell(const blockade::Cell& c) { return c ? blockade::format_number(*c) : "null"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven two-resonator photon-blockade simulator"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = blockade::default_jobs();
  std::string out_dir;
  std::optional<double> delta2;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (overrides output.path)");

  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", config_path, "experiment config (JSON)")->required();

  auto* single = app.add_subcommand("single-drive", "single-drive blockade control check");
  single->add_option("--config", config_path, "circuit and numerics source (JSON)")->required();
  single->add_option("--delta2", delta2, "override the supermode splitting");

  CLI11_PARSE(app, argc, argv);

  blockade::ExperimentConfig cfg;
  try {
    cfg = blockade::load_config(config_path);
  } catch (const blockade::ValidationError& e) {
    return report_validation(e);
  }

  if (*validate) {
    std::cout << "ok: " << blockade::to_string(cfg.experiment) << " config is valid (hash fnv1a64:"
              << blockade::hex64(blockade::config_hash(cfg.source)) << ")\n";
    return kExitOk;
  }

  try {
    if (*single) {
      const auto p = blockade::single_drive_parameters(cfg.circuit);
      const auto r = blockade::single_drive_check(p, cfg.numerics.levels(), delta2);
      std::printf("Delta2 = %.17g\n", r.sp.Delta2);
      std::printf("N = %.17g %.17g %.17g\n", r.N.N1, r.N.N2, r.N.N3);
      std::cout << "g2(0) = " << cell(r.g2[0]) << ' ' << cell(r.g2[1]) << ' ' << cell(r.g2[2]) << '\n';
      std::cout << (r.all_below_band ? "PASS" : "FAIL") << ": all ports below g2(0) = 0.1\n";
      return kExitOk;
    }

    blockade::RunOptions opt;
    opt.jobs = jobs;
    opt.log = &std::cerr;
    const auto result = blockade::run(cfg, opt);
    const auto file = blockade::write_outputs(cfg, result, out_dir.empty() ? cfg.output_path : out_dir);
    std::cout << "wrote " << file.string() << " (" << result.table.rows.size() << " rows";
    if (!result.warnings.empty()) std::cout << ", " << result.warnings.size() << " warnings";
    std::cout << ")\n";
    return kExitOk;
  } catch (const blockade::ValidationError& e) {
    return report_validation(e);
  } catch (const blockade::ConstraintViolation& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const blockade::InvalidArgument& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    return report_numerical(e);
  }
}
