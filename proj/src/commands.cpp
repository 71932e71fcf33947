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

#include "evasim/commands.hpp"

#include <cctype>
#include <filesystem>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "evasim/errors.hpp"
#include "evasim/io.hpp"
#include "evasim/pipeline.hpp"

namespace evasim {

namespace fs = std::filesystem;

SelectorKind selector_from_string(const std::string& s) {
  if (s == "closest") return SelectorKind::kClosest;
  if (s == "rule") return SelectorKind::kRule;
  if (s == "random") return SelectorKind::kRandom;
  if (s == "from_annotation") return SelectorKind::kFromAnnotation;
  throw InvalidInput("unknown selector '" + s + "'");
}

std::string to_string(SelectorKind k) {
  switch (k) {
    case SelectorKind::kClosest:
      return "closest";
    case SelectorKind::kRule:
      return "rule";
    case SelectorKind::kRandom:
      return "random";
    case SelectorKind::kFromAnnotation:
      return "from_annotation";
  }
  return "unknown";
}

std::string file_stem(const std::string& scene_id) {
  std::string out = scene_id;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return out;
}

namespace {

std::string join(const std::string& dir, const std::string& rel) {
  return (fs::path(dir) / rel).string();
}

SceneSet load_and_report(const std::string& scenes_path, const std::string& out_dir,
                         std::ostream& log) {
  SceneSet set = load_scenes(scenes_path);
  if (!set.errors.empty()) {
    std::string text;
    for (const SceneLoadError& e : set.errors) {
      log << "error: skipping " << e.path << ": " << e.message << "\n";
      text += e.path + ": " + e.message + "\n";
    }
    write_text_file(join(out_dir, "errors.log"), text);
  }
  if (set.scenes.empty()) {
    log << "warning: no scenes found in " << scenes_path << "\n";
  }
  return set;
}

int finish(const SceneSet& set) { return set.errors.empty() ? kExitOk : kExitInputError; }

std::vector<AnnotationRecord> annotate_all(const std::vector<Scene>& scenes, const RunConfig& cfg) {
  const SimConfig sim = cfg.sim_config();
  std::vector<std::pair<std::size_t, int>> work;
  std::vector<AnnotationRecord> recs(scenes.size());
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    recs[s].scene_id = scenes[s].scene_id;
    recs[s].candidates = candidates_within(scenes[s], cfg.D);
    for (int id : recs[s].candidates) work.emplace_back(s, id);
  }
  std::vector<CollisionOutcome> outcomes(work.size());
  std::vector<std::string> errors(work.size());
  parallel_for(work.size(), cfg.jobs, [&](std::size_t i) {
    SimConfig c = sim;
    c.seed = candidate_seed(sim.seed, work[i].second);
    try {
      outcomes[i] = run_collision_stage(scenes[work[i].first], work[i].second, c);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < work.size(); ++i) {
    AnnotationRecord& r = recs[work[i].first];
    const int id = work[i].second;
    if (!errors[i].empty()) {
      r.errors[id] = errors[i];
      continue;
    }
    r.per_candidate[id] = summarize(outcomes[i], candidate_seed(sim.seed, id));
    if (outcomes[i].valid) r.s_coll.insert(id);
  }
  return recs;
}

std::optional<int> choose_from_annotation(const Scene& scene, const AnnotationRecord& rec) {
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int id : rec.s_coll) {
    const VehicleState* v = scene.find(id);
    if (!v) continue;
    const double d = center_distance(*v, scene.ego());
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

struct GeneratedScene {
  Json entry;
  std::vector<std::pair<std::string, std::string>> files;  // relative path, content
  std::string status;
};

std::string run_name(const std::string& scene_id, int adv) {
  return file_stem(scene_id) + "__adv" + std::to_string(adv);
}

GeneratedScene generate_one(const Scene& scene, std::optional<int> choice, const RunConfig& cfg) {
  GeneratedScene g;
  g.entry = {{"scene_id", scene.scene_id}};
  if (!choice) {
    g.status = "no_candidate";
    g.entry["status"] = g.status;
    g.entry["adv_id"] = nullptr;
    return g;
  }
  const SimConfig sim = cfg.sim_config();
  const CandidateRun run = run_candidate(scene, *choice, sim);
  g.entry["adv_id"] = *choice;
  g.entry["seed"] = run.seed;
  if (!run.ok()) {
    g.status = "error";
    g.entry["status"] = g.status;
    g.entry["error"] = run.error;
    return g;
  }
  const std::string name = run_name(scene.scene_id, *choice);
  const CollisionOutcome& co = run.collision;
  g.entry["collision_valid"] = co.valid;
  g.entry["collision_step"] = co.collision_step ? Json(*co.collision_step) : Json();
  g.entry["failure_reason"] = co.failure_reason ? Json(to_string(*co.failure_reason)) : Json();
  g.entry["closest_distance"] = closest_distance(co.trajectories, co.ego_id, co.adv_id);
  g.files.emplace_back("runs/" + name + ".collision.json",
                       serialize_scenario(make_scenario_file(scene, co.trajectories, "collision",
                                                             *choice)));
  SimConfig origin_cfg = sim;
  origin_cfg.seed = run.seed;
  g.files.emplace_back("origin/" + name + ".json",
                       serialize_scenario(make_scenario_file(
                           scene, origin_rollout(scene, origin_cfg), "origin", *choice)));
  if (!co.valid) {
    g.status = to_string(*co.failure_reason);
    g.entry["status"] = g.status;
    return g;
  }
  const EvasionOutcome& eo = *run.evasion;
  g.entry["evasion_success"] = eo.success;
  g.entry["min_ego_adv_distance"] = eo.min_ego_adv_distance;
  const std::string evasion_text =
      serialize_scenario(make_scenario_file(scene, eo.trajectories, "evasion", *choice));
  g.files.emplace_back("runs/" + name + ".evasion.json", evasion_text);
  if (eo.success) {
    g.status = "exported";
    g.entry["scenario"] = "scenarios/" + name + ".json";
    g.files.emplace_back("scenarios/" + name + ".json", evasion_text);
  } else {
    g.status = "evasion_failed";
  }
  g.entry["status"] = g.status;
  return g;
}

}  // namespace

int cmd_annotate(const RunConfig& cfg, const std::string& scenes_path, const std::string& out_dir,
                 std::ostream& log) {
  const SceneSet set = load_and_report(scenes_path, out_dir, log);
  const std::vector<AnnotationRecord> recs = annotate_all(set.scenes, cfg);
  for (const AnnotationRecord& r : recs) {
    write_text_file(join(out_dir, "annotations/" + file_stem(r.scene_id) + ".json"),
                    dump_json(annotation_to_json(r)));
    for (const auto& [id, msg] : r.errors) {
      log << "error: " << r.scene_id << " candidate " << id << ": " << msg << "\n";
    }
  }
  log << "annotated " << recs.size() << " scene(s)\n";
  return finish(set);
}

int cmd_generate(const RunConfig& cfg, const std::string& scenes_path, SelectorKind selector,
                 const std::string& out_dir, const std::string& annotations_dir,
                 std::ostream& log) {
  const SceneSet set = load_and_report(scenes_path, out_dir, log);
  const std::vector<Scene>& scenes = set.scenes;

  std::vector<std::optional<int>> choice(scenes.size());
  if (selector == SelectorKind::kFromAnnotation) {
    std::vector<AnnotationRecord> recs(scenes.size());
    std::vector<Scene> missing;
    std::vector<std::size_t> missing_idx;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const std::string path =
          annotations_dir.empty()
              ? std::string()
              : join(annotations_dir, file_stem(scenes[i].scene_id) + ".json");
      if (!path.empty() && fs::exists(path)) {
        recs[i] = annotation_from_json(Json::parse(read_text_file(path)));
      } else {
        missing.push_back(scenes[i]);
        missing_idx.push_back(i);
      }
    }
    const std::vector<AnnotationRecord> fresh = annotate_all(missing, cfg);
    for (std::size_t k = 0; k < fresh.size(); ++k) recs[missing_idx[k]] = fresh[k];
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      choice[i] = choose_from_annotation(scenes[i], recs[i]);
    }
  } else {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const Scene& s = scenes[i];
      if (selector == SelectorKind::kClosest) {
        choice[i] = select_closest(s, cfg.D).choice;
      } else if (selector == SelectorKind::kRule) {
        choice[i] = select_rule_based(s, cfg.D).choice;
      } else {
        Rng rng(mix_seed(cfg.seed, hash_string(s.scene_id)));
        choice[i] = select_random_adjacent(s, cfg.D, rng, cfg.lane_width).choice;
      }
    }
  }

  std::vector<GeneratedScene> results(scenes.size());
  parallel_for(scenes.size(), cfg.jobs,
               [&](std::size_t i) { results[i] = generate_one(scenes[i], choice[i], cfg); });

  std::map<std::string, int> dropped = {{"no_candidate", 0},   {"no_collision", 0},
                                        {"hit_other_first", 0}, {"off_road_first", 0},
                                        {"evasion_failed", 0}, {"error", 0}};
  int exported = 0;
  int collision_in = 0;
  int collision_out = 0;
  Json entries = Json::array();
  for (const GeneratedScene& g : results) {
    for (const auto& [rel, text] : g.files) write_text_file(join(out_dir, rel), text);
    if (g.status == "exported") {
      ++exported;
    } else {
      ++dropped.at(g.status);
    }
    if (g.status != "no_candidate") ++collision_in;
    if (g.status == "exported" || g.status == "evasion_failed") ++collision_out;
    entries.push_back(g.entry);
  }
  Json load_errors = Json::array();
  for (const SceneLoadError& e : set.errors) {
    load_errors.push_back({{"path", e.path}, {"message", e.message}});
  }
  const int n = static_cast<int>(scenes.size());
  const Json ledger = {
      {"selector", to_string(selector)},
      {"seed", cfg.seed},
      {"scenes_in", n},
      {"exported", exported},
      {"dropped", dropped},
      {"stages",
       {{"selection", {{"in", n}, {"out", n - dropped.at("no_candidate")}}},
        {"collision", {{"in", collision_in}, {"out", collision_out}}},
        {"evasion", {{"in", collision_out}, {"out", exported}}}}},
      {"entries", entries},
      {"load_errors", load_errors}};
  write_text_file(join(out_dir, "ledger.json"), dump_json(ledger));
  log << "generated " << exported << " scenario(s) from " << n << " scene(s)\n";
  return finish(set);
}

namespace {

ScenarioFile load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

/// Initial-frame scene of a scenario file, for the planner.
Scene scene_of(const ScenarioFile& f) {
  Scene s;
  s.scene_id = f.scene_id;
  if (f.map) s.map = *f.map;
  if (f.frames.empty()) throw InvalidInput("scenario '" + f.scene_id + "' has no frames");
  for (const ScenarioBox& b : f.frames.front().boxes) {
    VehicleState v;
    v.id = b.id;
    v.position = {b.x, b.y};
    v.heading = b.heading;
    v.speed = b.speed;
    v.length = b.length;
    v.width = b.width;
    v.is_ego = b.id == f.ego_id;
    s.vehicles.push_back(v);
  }
  s.validate();
  return s;
}

std::string horizon_key(double t) {
  std::ostringstream o;
  o << t << "s";
  return o.str();
}

Json cr_table(const std::vector<PlannerTrace>& traces, const std::vector<double>& horizons) {
  Json j;
  for (const auto& [name, grouping] :
       {std::pair{"sample", CrGrouping::kSample}, std::pair{"scene", CrGrouping::kScene}}) {
    Json row = Json::object();
    double sum = 0.0;
    CrAggregate last;
    for (double t : horizons) {
      last = aggregate_cr(traces, grouping, t);
      row[horizon_key(t)] = last.value;
      sum += last.value;
    }
    row["avg"] = horizons.empty() ? 0.0 : sum / static_cast<double>(horizons.size());
    j[name] = row;
    j["valid_samples"] = last.valid_samples;
    j["invalid_samples"] = last.invalid_samples;
  }
  return j;
}

}  // namespace

int cmd_evaluate(const RunConfig& cfg, const std::string& results_dir, const std::string& out_dir,
                 std::ostream& log) {
  const std::string ledger_path = join(results_dir, "ledger.json");
  if (!fs::exists(ledger_path)) {
    throw InvalidInput("no ledger.json in '" + results_dir + "'");
  }
  const Json ledger = Json::parse(read_text_file(ledger_path));

  std::vector<CollisionOutcome> collisions;
  std::vector<EvasionOutcome> evasions;
  std::vector<AdversaryRun> adversaries;
  std::vector<TrajectoryBatch> finals;
  std::vector<TrajectoryBatch> origins;
  std::vector<PlannerTrace> gen_traces;
  std::vector<PlannerTrace> origin_traces;
  MetricsReport rep;
  double closest_sum = 0.0;
  for (const Json& e : ledger.at("entries")) {
    const std::string scene_id = e.at("scene_id").get<std::string>();
    const std::string status = e.at("status").get<std::string>();
    if (status == "no_candidate" || status == "error") continue;
    const int adv = e.at("adv_id").get<int>();
    const std::string name = run_name(scene_id, adv);
    const ScenarioFile cf = load_scenario(join(results_dir, "runs/" + name + ".collision.json"));
    const Scene scene = scene_of(cf);
    SceneBreakdown& b = rep.per_scene[scene_id];
    ++b.candidates;

    CollisionOutcome co;
    co.valid = e.at("collision_valid").get<bool>();
    co.ego_id = cf.ego_id;
    co.adv_id = adv;
    co.trajectories = scenario_to_batch(cf);
    collisions.push_back(co);
    closest_sum += closest_distance(co.trajectories, co.ego_id, adv);
    TrajectoryBatch final_batch = co.trajectories;
    if (co.valid) {
      ++b.valid_collisions;
      const ScenarioFile ef = load_scenario(join(results_dir, "runs/" + name + ".evasion.json"));
      EvasionOutcome eo;
      eo.success = e.at("evasion_success").get<bool>();
      eo.ego_id = ef.ego_id;
      eo.adv_id = adv;
      eo.trajectories = scenario_to_batch(ef);
      eo.min_ego_adv_distance = e.at("min_ego_adv_distance").get<double>();
      b.evasions += eo.success ? 1 : 0;
      final_batch = eo.trajectories;
      evasions.push_back(eo);
    }
    adversaries.push_back({final_batch, cf.ego_id, adv, scene.map});
    finals.push_back(final_batch);

    const ScenarioFile of = load_scenario(join(results_dir, "origin/" + name + ".json"));
    const TrajectoryBatch origin = scenario_to_batch(of);
    origins.push_back(origin);
    if (status == "exported") {
      const ScenarioFile sf = load_scenario(join(results_dir, e.at("scenario").get<std::string>()));
      const auto g = planner_samples(cfg.planner, scenario_to_batch(sf), scene, name);
      gen_traces.insert(gen_traces.end(), g.begin(), g.end());
      const auto o = planner_samples(cfg.planner, origin, scene, name);
      origin_traces.insert(origin_traces.end(), o.begin(), o.end());
    }
  }

  rep.csr = collision_success_rate(collisions);
  rep.esr = evasion_success_rate(evasions);
  rep.collision_rate = trajectory_collision_rate(adversaries);
  rep.off_road_rate = off_road_rate(adversaries, cfg.sim.guidance.grid, cfg.sim.offroad_steps);
  rep.closest_distance_mean =
      collisions.empty() ? 0.0 : closest_sum / static_cast<double>(collisions.size());
  if (!finals.empty()) {
    const RealismStats reference =
        cfg.realism_reference.empty()
            ? realism_stats(origins)
            : realism_stats_from_json(Json::parse(read_text_file(cfg.realism_reference)));
    rep.realism = realism_distance(finals, reference);
  } else {
    log << "warning: no simulated runs in " << results_dir << "; reporting zeros\n";
  }
  if (gen_traces.empty()) {
    log << "warning: no exported scenarios; CR tables are empty\n";
  }

  Json out = metrics_report_to_json(rep);
  out["cr"] = {{"planner", to_string(cfg.planner)},
               {"generated", cr_table(gen_traces, cfg.cr_horizons)},
               {"origin", cr_table(origin_traces, cfg.cr_horizons)}};
  write_text_file(join(out_dir, "metrics.json"), dump_json(out));
  log << "CSR " << rep.csr << "  ESR " << rep.esr << "\n";
  return kExitOk;
}

std::vector<AblationAxis> default_ablation_grid() {
  const std::vector<double> w = {0.0, 1.0, 50.0};
  return {{"collision_stage.alpha", w}, {"collision_stage.beta", w}, {"collision_stage.gamma", w},
          {"evasion_stage.beta", w},    {"evasion_stage.gamma", w},  {"lambda_decay", {0.0, 0.9, 1.0}}};
}

std::vector<AblationAxis> parse_ablation_grid(const std::string& text) {
  if (text.empty()) return default_ablation_grid();
  std::vector<AblationAxis> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos) throw InvalidInput("grid entry '" + part + "' lacks '='");
    AblationAxis axis;
    axis.param = part.substr(0, eq);
    std::stringstream vs(part.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      try {
        std::size_t used = 0;
        axis.values.push_back(std::stod(v, &used));
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw InvalidInput("grid value '" + v + "' is not a number");
      }
    }
    if (axis.values.empty()) throw InvalidInput("grid entry '" + axis.param + "' has no values");
    with_param(RunConfig{}, axis.param, axis.values.front());  // validates the name
    out.push_back(std::move(axis));
  }
  return out;
}

RunConfig with_param(const RunConfig& cfg, const std::string& param, double value) {
  RunConfig c = cfg;
  GuidanceParams& g = c.sim.guidance;
  if (param == "collision_stage.alpha") {
    g.collision.alpha = value;
  } else if (param == "collision_stage.beta") {
    g.collision.beta = value;
  } else if (param == "collision_stage.gamma") {
    g.collision.gamma = value;
  } else if (param == "evasion_stage.beta") {
    g.evasion.beta = value;
  } else if (param == "evasion_stage.gamma") {
    g.evasion.gamma = value;
  } else if (param == "lambda_decay") {
    g.lambda_decay = value;
  } else {
    throw InvalidInput("unknown ablation parameter '" + param + "'");
  }
  c.validate();
  return c;
}

int cmd_ablate(const RunConfig& cfg, const std::string& scenes_path,
               const std::vector<AblationAxis>& grid, const std::string& out_dir,
               std::ostream& log) {
  const SceneSet set = load_and_report(scenes_path, out_dir, log);
  const std::vector<Scene>& scenes = set.scenes;
  const SimConfig base = cfg.sim_config();

  RealismStats reference;
  if (!cfg.realism_reference.empty()) {
    reference = realism_stats_from_json(Json::parse(read_text_file(cfg.realism_reference)));
  } else if (!scenes.empty()) {
    std::vector<TrajectoryBatch> origins(scenes.size());
    parallel_for(scenes.size(), cfg.jobs,
                 [&](std::size_t i) { origins[i] = origin_rollout(scenes[i], base); });
    reference = realism_stats(origins);
  }

  std::map<std::string, MetricsReport> cache;
  Json rows = Json::array();
  std::string csv = "param,value,CSR,ESR,collision_rate,off_road_rate,realism,closest_distance\n";
  for (const AblationAxis& axis : grid) {
    for (double value : axis.values) {
      const RunConfig c = with_param(cfg, axis.param, value);
      const std::string key = format_config(c);
      auto it = cache.find(key);
      if (it == cache.end()) {
        const SimConfig sim = c.sim_config();
        const std::vector<CandidateRun> runs = run_candidates(scenes, sim, c.D, c.jobs);
        it = cache.emplace(key, build_report(scenes, runs, reference, sim)).first;
      }
      const MetricsReport& r = it->second;
      Json row = metrics_report_to_json(r);
      row.erase("per_scene");
      row["param"] = axis.param;
      row["value"] = value;
      rows.push_back(row);
      std::ostringstream line;
      line << axis.param << "," << value << "," << r.csr << "," << r.esr << "," << r.collision_rate
           << "," << r.off_road_rate << "," << r.realism << "," << r.closest_distance_mean << "\n";
      csv += line.str();
      log << line.str();
    }
  }
  write_text_file(join(out_dir, "ablation.json"), dump_json({{"rows", rows}}));
  write_text_file(join(out_dir, "ablation.csv"), csv);
  return finish(set);
}

int cmd_render(const std::string& scenario_path, const std::string& out_path, int stride,
               std::ostream& log) {
  const ScenarioFile f = load_scenario(scenario_path);
  write_text_file(out_path, render_svg(f, stride));
  log << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_template(const std::string& name, const TemplateParams& params,
                 const std::string& out_path, std::ostream& log) {
  if (name == "suite") {
    const std::vector<Scene> suite = synthetic_suite();
    for (const Scene& s : suite) {
      write_text_file(join(out_path, file_stem(s.scene_id) + ".json"),
                      dump_json(scene_to_json(s)));
    }
    log << "wrote " << suite.size() << " scenes to " << out_path << "\n";
    return kExitOk;
  }
  write_text_file(out_path, dump_json(scene_to_json(make_template(name, params))));
  log << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace evasim
