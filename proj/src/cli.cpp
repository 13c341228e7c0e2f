#include "ota/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "ota/error.hpp"
#include "ota/io.hpp"

namespace ota {

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kIo:
    case Errc::kParse:
      return kExitIo;
    case Errc::kUnbalanced:
    case Errc::kTooLarge:
      return kExitProblem;
    case Errc::kInvalidArgument:
    case Errc::kInvalidSpec:
      return kExitUsage;
    case Errc::kEmptyScene:
    case Errc::kSupplyOverflow:
    case Errc::kNumericUnderflow:
    case Errc::kNonfiniteInput:
      return kExitSolver;
  }
  return kExitSolver;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(Errc::kInvalidArgument, "--values: '" + item + "' is not an integer");
    values.push_back(v);
  }
  return values;
}

void emit(const json& value, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    write_json(out, value);
    out << '\n';
  } else {
    write_json_file(path, value);
  }
}

const std::map<std::string, RegMode> kRegModes{{"iou_log", RegMode::kIouLog}, {"giou", RegMode::kGiou}};
const std::map<std::string, SupplyMode> kSupplyModes{{"dynamic", SupplyMode::kDynamicK},
                                                     {"fixed", SupplyMode::kFixedK}};
const std::map<std::string, Baseline> kBaselines{{"topk_maxiou", Baseline::kTopkMaxIou},
                                                 {"min_area", Baseline::kMinArea}};

CLI::Validator open_unit_interval() {
  return CLI::Validator(
      [](std::string& text) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(text, v) || !(v > 0.0 && v < 1.0)) {
          return "Value " + text + " not in open interval (0, 1)";
        }
        return {};
      },
      "(0,1)");
}

void add_sinkhorn_flags(CLI::App* cmd, SinkhornConfig& cfg) {
  cmd->add_option("--gamma", cfg.gamma, "Entropic regularization intensity")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--iters", cfg.iters, "Sinkhorn iterations")
      ->check(CLI::Range(1, 1000000))->capture_default_str();
  cmd->add_flag("--log-domain", cfg.log_domain, "Force the log-domain solver");
  cmd->add_option("--residual-tol", cfg.residual_tol, "Early-stop L1 column residual (0 = off)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
}

void add_ota_flags(CLI::App* cmd, OtaConfig& cfg) {
  cmd->add_option("--r", cfg.center_prior.r, "Center prior radius (r*r anchors per level)")
      ->check(CLI::Range(1, 1000))->capture_default_str();
  cmd->add_option("--penalty", cfg.center_prior.penalty, "Cost added outside the center prior")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--supply-mode", cfg.supply.mode, "Positive supply estimate")
      ->transform(CLI::CheckedTransformer(kSupplyModes, CLI::ignore_case));
  cmd->add_option("--k", cfg.supply.k, "Fixed positive supply per gt")
      ->check(CLI::Range(1, 1000000))->capture_default_str();
  cmd->add_option("--q", cfg.supply.q, "Top-q IoUs summed by dynamic k")
      ->check(CLI::Range(1, 1000000))->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "Regression cost weight")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--focal-alpha", cfg.loss.focal_alpha, "Focal loss alpha")
      ->check(open_unit_interval())->capture_default_str();
  cmd->add_option("--focal-gamma", cfg.loss.focal_gamma, "Focal loss gamma")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--iou-eps", cfg.loss.iou_eps, "Probability / IoU clamp")
      ->check(CLI::Range(1e-300, 1e-3))->capture_default_str();
  cmd->add_option("--reg-mode", cfg.loss.reg_mode, "Regression cost")
      ->transform(CLI::CheckedTransformer(kRegModes, CLI::ignore_case));
  add_sinkhorn_flags(cmd, cfg.sinkhorn);
}

void add_scene_flags(CLI::App* cmd, SceneSpec& spec) {
  cmd->add_option("--seed", spec.seed, "Scene seed")->capture_default_str();
  cmd->add_option("--width", spec.image_w, "Image width")->check(CLI::Range(1, 1 << 16))->capture_default_str();
  cmd->add_option("--height", spec.image_h, "Image height")->check(CLI::Range(1, 1 << 16))->capture_default_str();
  cmd->add_option("--strides", spec.strides, "Pyramid strides")
      ->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--gts", spec.num_gts, "Ground truths per scene")
      ->check(CLI::Range(0, 100000))->capture_default_str();
  cmd->add_option("--crowding", spec.crowding, "Object crowding in [0,1]")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--classes", spec.num_classes, "Number of classes")
      ->check(CLI::Range(1, 100000))->capture_default_str();
  cmd->add_option("--pred-noise", spec.pred_noise, "Predicted box jitter")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--sharpness", spec.score_sharpness, "Score sharpness")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--min-box", spec.min_box_frac, "Minimum box side / image side")
      ->check(CLI::Range(1e-6, 1.0))->capture_default_str();
  cmd->add_option("--max-box", spec.max_box_frac, "Maximum box side / image side")
      ->check(CLI::Range(1e-6, 1.0))->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal transport label assignment"};
  app.name("ota");
  app.require_subcommand(1);

  // gen-scene
  SceneSpec scene_spec;
  std::string scene_out;
  bool explicit_anchors = false;
  CLI::App* gen = app.add_subcommand("gen-scene", "Generate a synthetic scene");
  add_scene_flags(gen, scene_spec);
  gen->add_option("--out", scene_out, "Output scene JSON")->required();
  gen->add_flag("--explicit-anchors", explicit_anchors, "Write the anchor list instead of regenerating it");

  // assign
  OtaConfig ota_cfg;
  std::string assign_scene, assign_out, plan_out, cost_out;
  CLI::App* assign = app.add_subcommand("assign", "Assign labels for a scene");
  assign->add_option("--scene", assign_scene, "Scene JSON")->required();
  assign->add_option("--out", assign_out, "Assignment JSON (default stdout)");
  assign->add_option("--plan-out", plan_out, "Also write the transport plan");
  assign->add_option("--cost-out", cost_out, "Also write the cost/supply problem");
  add_ota_flags(assign, ota_cfg);

  // solve
  SinkhornConfig solve_cfg;
  std::string solve_in, solve_out;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a cost/supply problem with Sinkhorn");
  solve_cmd->add_option("--input", solve_in, "Cost JSON")->required();
  solve_cmd->add_option("--out", solve_out, "Plan JSON (default stdout)");
  add_sinkhorn_flags(solve_cmd, solve_cfg);

  // oracle
  std::string oracle_in, oracle_out, oracle_method = "hungarian";
  std::size_t oracle_limit = kDefaultExactLimit;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exact integral optimum of a cost/supply problem");
  oracle_cmd->add_option("--input", oracle_in, "Cost JSON")->required();
  oracle_cmd->add_option("--out", oracle_out, "Solution JSON (default stdout)");
  oracle_cmd->add_option("--limit", oracle_limit, "Largest n accepted")->capture_default_str();
  oracle_cmd->add_option("--method", oracle_method, "hungarian or enumerate")
      ->check(CLI::IsMember({"hungarian", "enumerate"}))->capture_default_str();

  // bench
  SweepOptions sweep;
  std::string sweep_kind, values_text, bench_out;
  std::vector<std::string> baseline_names{"topk_maxiou", "min_area"};
  bool dynamic = false;
  int tp_m = 50, tp_n = 8525, repeats = 5;
  bool values_given = false;
  CLI::App* bench = app.add_subcommand("bench", "Run an r, k or throughput sweep");
  bench->add_option("--sweep", sweep_kind, "r, k or throughput")
      ->required()->check(CLI::IsMember({"r", "k", "throughput"}));
  bench->add_option_function<std::string>(
      "--values", [&](const std::string& v) { values_text = v; values_given = true; },
      "Comma-separated r or k values");
  bench->add_option("--scenes", sweep.scenes, "Scenes per setting")->check(CLI::Range(1, 1000000))->capture_default_str();
  bench->add_option("--oracle-scenes", sweep.oracle_scenes, "Reduced scenes for the oracle gap")
      ->check(CLI::Range(0, 100000))->capture_default_str();
  bench->add_option("--baselines", baseline_names, "Baselines for the r sweep")
      ->delimiter(',')->check(CLI::IsMember({"topk_maxiou", "min_area"}));
  bench->add_flag("--dynamic", dynamic, "Add a dynamic-k row to the k sweep");
  bench->add_option("--m", tp_m, "Throughput: gt count")->check(CLI::Range(0, 100000));
  bench->add_option("--n", tp_n, "Throughput: anchor count")->check(CLI::Range(1, 100000000));
  bench->add_option("--repeats", repeats, "Throughput: timed solves")->check(CLI::Range(3, 100000));
  bench->add_option("--out", bench_out, "CSV report; a .json sidecar is written next to it")->required();
  add_scene_flags(bench, sweep.spec);
  add_ota_flags(bench, sweep.ota);

  std::vector<std::string> argv_storage{"ota"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      emit(scene_to_json(generate(scene_spec), explicit_anchors), scene_out, out);
    } else if (*assign) {
      const Scene scene = scene_from_json(read_json_file(assign_scene));
      const OtaRun run = run_ota_detailed(scene, ota_cfg);
      if (!cost_out.empty()) {
        if (scene.num_gts() == 0) throw Error(Errc::kEmptyScene, "no cost matrix for a scene without gts");
        write_json_file(cost_out, cost_to_json(run.cost, run.supply));
      }
      if (!plan_out.empty()) {
        if (scene.num_gts() == 0) throw Error(Errc::kEmptyScene, "no transport plan for a scene without gts");
        write_json_file(plan_out, plan_to_json(run.plan, objective(run.cost, run.plan.plan)));
      }
      emit(assignment_to_json(run.result, ota_cfg), assign_out, out);
    } else if (*solve_cmd) {
      const auto [cost, sd] = cost_from_json(read_json_file(solve_in));
      const TransportPlan plan = solve_with_fallback(cost, sd, solve_cfg);
      emit(plan_to_json(plan, objective(cost, plan.plan)), solve_out, out);
    } else if (*oracle_cmd) {
      const auto [cost, sd] = cost_from_json(read_json_file(oracle_in));
      const ExactSolution sol =
          oracle_method == "enumerate" ? enumerate_exact(cost, sd) : solve_exact(cost, sd, oracle_limit);
      emit(exact_to_json(sol), oracle_out, out);
    } else if (*bench) {
      std::vector<int> values;
      if (sweep_kind != "throughput") {
        values = parse_int_list(values_text);
        if (!values_given || values.empty()) {
          err << "bench: --values must list at least one integer\n";
          return kExitUsage;
        }
      }
      BenchReport report;
      if (sweep_kind == "r") {
        std::vector<Baseline> baselines;
        for (const std::string& name : baseline_names) baselines.push_back(kBaselines.at(name));
        report = run_r_sweep(sweep, values, baselines);
      } else if (sweep_kind == "k") {
        report = run_k_sweep(sweep, values, dynamic);
      } else {
        report = run_throughput(tp_m, tp_n, sweep.ota.sinkhorn.gamma, sweep.ota.sinkhorn.iters, repeats,
                                sweep.spec.seed);
      }
      std::ofstream csv(bench_out, std::ios::binary | std::ios::trunc);
      if (!csv) throw Error(Errc::kIo, "cannot write " + bench_out);
      write_csv(csv, report);
      json config = config_to_json(sweep.ota);
      config["scene"] = {{"seed", sweep.spec.seed},
                         {"image_w", sweep.spec.image_w},
                         {"image_h", sweep.spec.image_h},
                         {"strides", sweep.spec.strides},
                         {"num_gts", sweep.spec.num_gts},
                         {"crowding", sweep.spec.crowding},
                         {"num_classes", sweep.spec.num_classes},
                         {"pred_noise", sweep.spec.pred_noise},
                         {"score_sharpness", sweep.spec.score_sharpness},
                         {"min_box_frac", sweep.spec.min_box_frac},
                         {"max_box_frac", sweep.spec.max_box_frac}};
      config["scenes"] = sweep.scenes;
      config["values"] = values;
      write_json_file(bench_out + ".json", report_to_json(report, config));
    }
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace ota
