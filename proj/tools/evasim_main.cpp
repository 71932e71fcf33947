// Copyright 2026 The evasim Authors
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

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "evasim/commands.hpp"
#include "evasim/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string scenes;
  std::string out;
  std::string selector = "closest";
  std::string planner;
  std::string annotations;
  std::string grid;
  std::string input;
  std::string name;
  int stride = 10;
  evasim::TemplateParams params;
};

evasim::RunConfig resolve(const Flags& f) {
  evasim::RunConfig cfg = f.config.empty() ? evasim::RunConfig{} : evasim::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (!f.planner.empty()) cfg.planner = evasim::planner_from_string(f.planner);
  if (!f.out.empty()) cfg.output_dir = f.out;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Run config file");
  cmd->add_option("--seed", f.seed, "Overrides the config seed");
  cmd->add_option("--jobs", f.jobs, "Worker threads (0: logical cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-evasion scenario generation and evaluation"};
  app.require_subcommand(1);
  Flags f;

  auto* annotate = app.add_subcommand("annotate", "Annotate feasible adversaries per scene");
  add_common(annotate, f);
  annotate->add_option("--scenes", f.scenes, "Scene file or directory")->required();

  auto* generate = app.add_subcommand("generate", "Run the two-stage pipeline and export scenarios");
  add_common(generate, f);
  generate->add_option("--scenes", f.scenes, "Scene file or directory")->required();
  generate->add_option("--selector", f.selector, "closest | rule | random | from_annotation");
  generate->add_option("--annotations", f.annotations, "Annotation directory for from_annotation");

  auto* evaluate = app.add_subcommand("evaluate", "Compute metrics over a generate output tree");
  add_common(evaluate, f);
  evaluate->add_option("--results", f.input, "Output directory of generate")->required();
  evaluate->add_option("--planner", f.planner, "constant_velocity | reactive_brake");

  auto* ablate = app.add_subcommand("ablate", "Sweep guidance weights and the decay factor");
  add_common(ablate, f);
  ablate->add_option("--scenes", f.scenes, "Scene file or directory")->required();
  ablate->add_option("--grid", f.grid, "param=v1,v2;... (default: the full grid)");

  auto* render = app.add_subcommand("render", "Render a scenario file as SVG");
  render->add_option("--input", f.input, "Scenario file")->required();
  render->add_option("--out", f.out, "Output .svg path")->required();
  render->add_option("--stride", f.stride, "Frames between drawn boxes")->check(CLI::PositiveNumber);

  auto* tmpl = app.add_subcommand("template", "Write a synthetic template scene");
  tmpl->add_option("--name", f.name, "Template name, or 'suite' for the full suite")->required();
  tmpl->add_option("--out", f.out, "Output file (directory for 'suite')")->required();
  tmpl->add_option("--gap", f.params.gap);
  tmpl->add_option("--ego-speed", f.params.ego_speed);
  tmpl->add_option("--adv-speed", f.params.adv_speed);
  tmpl->add_option("--lateral-offset", f.params.lateral_offset);
  tmpl->add_option("--strip-width", f.params.strip_width);
  tmpl->add_option("--background", f.params.background);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? evasim::kExitOk : evasim::kExitInputError;
  }

  try {
    if (*annotate) {
      const evasim::RunConfig cfg = resolve(f);
      return evasim::cmd_annotate(cfg, f.scenes, cfg.output_dir, std::cerr);
    }
    if (*generate) {
      const evasim::RunConfig cfg = resolve(f);
      return evasim::cmd_generate(cfg, f.scenes, evasim::selector_from_string(f.selector),
                                  cfg.output_dir, f.annotations, std::cerr);
    }
    if (*evaluate) {
      const evasim::RunConfig cfg = resolve(f);
      return evasim::cmd_evaluate(cfg, f.input, f.out.empty() ? f.input : cfg.output_dir,
                                  std::cerr);
    }
    if (*ablate) {
      const evasim::RunConfig cfg = resolve(f);
      return evasim::cmd_ablate(cfg, f.scenes, evasim::parse_ablation_grid(f.grid),
                                cfg.output_dir, std::cerr);
    }
    if (*render) {
      return evasim::cmd_render(f.input, f.out, f.stride, std::cerr);
    }
    if (*tmpl) {
      return evasim::cmd_template(f.name, f.params, f.out, std::cerr);
    }
  } catch (const evasim::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return evasim::kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return evasim::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return evasim::kExitInternalError;
  }
  return evasim::kExitInternalError;
}
