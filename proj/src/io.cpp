#include "ota/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ota/error.hpp"

namespace ota {

namespace {

void write_number(std::ostream& os, double x) {
  if (!std::isfinite(x)) {
    os << "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

void check_schema(const json& j, const char* what) {
  if (!j.is_object()) throw Error(Errc::kParse, std::string(what) + ": expected a JSON object");
  if (!j.contains("schema_version")) {
    throw Error(Errc::kParse, std::string(what) + ": missing schema_version");
  }
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion) {
    throw Error(Errc::kParse, std::string(what) + ": unsupported schema_version " + std::to_string(version));
  }
}

json box_to_json(const BoxXYXY& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

BoxXYXY box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(Errc::kParse, "box must be [x1,y1,x2,y2]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json matrix_to_json(const MatrixD& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

// Wraps nlohmann's type errors so malformed-but-parseable files surface as
// PARSE_ERROR instead of an unrelated exception type.
template <typename F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string(what) + ": " + e.what());
  }
}

const char* reg_mode_name(RegMode m) { return m == RegMode::kGiou ? "giou" : "iou_log"; }
const char* supply_mode_name(SupplyMode m) { return m == SupplyMode::kFixedK ? "fixed" : "dynamic"; }

}  // namespace

void write_json(std::ostream& os, const json& value) {
  switch (value.type()) {
    case json::value_t::object: {
      os << '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) os << ',';
        first = false;
        os << json(it.key()).dump() << ':';
        write_json(os, it.value());
      }
      os << '}';
      break;
    }
    case json::value_t::array: {
      os << '[';
      bool first = true;
      for (const auto& v : value) {
        if (!first) os << ',';
        first = false;
        write_json(os, v);
      }
      os << ']';
      break;
    }
    case json::value_t::number_float:
      write_number(os, value.get<double>());
      break;
    default:
      os << value.dump();
  }
}

std::string dump_json(const json& value) {
  std::ostringstream os;
  write_json(os, value);
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::kParse, path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& value) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  write_json(out, value);
  out << '\n';
  if (!out) throw Error(Errc::kIo, "write failed for " + path);
}

json scene_to_json(const Scene& scene, bool explicit_anchors) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["image"] = {{"w", scene.image_w}, {"h", scene.image_h}};
  j["levels"] = scene.strides;
  if (explicit_anchors) {
    json anchors = json::array();
    for (const Anchor& a : scene.anchors) {
      anchors.push_back({{"cx", a.cx}, {"cy", a.cy}, {"level", a.level}, {"stride", a.stride}});
    }
    j["anchors"] = std::move(anchors);
  }
  json gts = json::array();
  for (const GroundTruth& g : scene.gts) gts.push_back({{"box", box_to_json(g.box)}, {"class", g.class_id}});
  j["gts"] = std::move(gts);
  json boxes = json::array();
  for (const BoxXYXY& b : scene.preds.boxes) boxes.push_back(box_to_json(b));
  j["preds"] = {{"scores", matrix_to_json(scene.preds.cls_scores)}, {"boxes", std::move(boxes)}};
  j["seed"] = scene.seed;
  return j;
}

Scene scene_from_json(const json& j) {
  check_schema(j, "scene");
  return parse_guard("scene", [&] {
    Scene scene;
    scene.image_w = j.at("image").at("w").get<int>();
    scene.image_h = j.at("image").at("h").get<int>();
    scene.strides = j.at("levels").get<std::vector<int>>();
    scene.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("anchors")) {
      for (const json& a : j.at("anchors")) {
        scene.anchors.push_back({a.at("cx").get<double>(), a.at("cy").get<double>(),
                                 a.at("level").get<int>(), a.at("stride").get<int>()});
      }
    } else {
      scene.anchors = make_anchor_grid(scene.image_w, scene.image_h, scene.strides);
    }
    for (const json& g : j.at("gts")) {
      scene.gts.push_back({box_from_json(g.at("box")), g.at("class").get<int>()});
    }
    const json& scores = j.at("preds").at("scores");
    const std::size_t n = scores.size();
    const std::size_t classes = n == 0 ? 0 : scores[0].size();
    scene.preds.cls_scores = MatrixD(n, classes);
    for (std::size_t r = 0; r < n; ++r) {
      if (scores[r].size() != classes) throw Error(Errc::kParse, "scene: ragged score matrix");
      for (std::size_t c = 0; c < classes; ++c) scene.preds.cls_scores(r, c) = scores[r][c].get<double>();
    }
    for (const json& b : j.at("preds").at("boxes")) scene.preds.boxes.push_back(box_from_json(b));
    try {
      validate_scene(scene);
    } catch (const Error& e) {
      throw Error(Errc::kParse, std::string("scene: ") + e.what());
    }
    return scene;
  });
}

json cost_to_json(const CostMatrix& cost, const SupplyDemand& sd) {
  return {{"schema_version", kSchemaVersion},
          {"m", cost.m()},
          {"n", cost.n()},
          {"cost", matrix_to_json(cost.values)},
          {"supply", sd.supply}};
}

std::pair<CostMatrix, SupplyDemand> cost_from_json(const json& j) {
  check_schema(j, "cost");
  return parse_guard("cost", [&] {
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    const json& rows = j.at("cost");
    if (rows.size() != m + 1) throw Error(Errc::kParse, "cost: expected m+1 rows");
    MatrixD values(m + 1, n);
    for (std::size_t i = 0; i <= m; ++i) {
      if (rows[i].size() != n) throw Error(Errc::kParse, "cost: expected n columns in every row");
      for (std::size_t c = 0; c < n; ++c) values(i, c) = rows[i][c].get<double>();
    }
    SupplyDemand sd;
    sd.supply = j.at("supply").get<std::vector<double>>();
    if (sd.supply.size() != m + 1) throw Error(Errc::kParse, "cost: expected m+1 supplies");
    sd.demand.assign(n, 1.0);
    return std::pair{CostMatrix(std::move(values)), std::move(sd)};
  });
}

json plan_to_json(const TransportPlan& plan, double objective_value) {
  return {{"schema_version", kSchemaVersion},
          {"plan", matrix_to_json(plan.plan)},
          {"u", plan.u},
          {"v", plan.v},
          {"log_u", plan.log_u},
          {"log_v", plan.log_v},
          {"residual", plan.marginal_residual},
          {"iterations", plan.iterations_run},
          {"log_domain", plan.log_domain},
          {"objective", objective_value}};
}

json exact_to_json(const ExactSolution& sol) {
  return {{"schema_version", kSchemaVersion}, {"assignment", sol.assignment}, {"cost", sol.cost}};
}

json config_to_json(const OtaConfig& cfg) {
  return {{"r", cfg.center_prior.r},
          {"penalty", cfg.center_prior.penalty},
          {"supply_mode", supply_mode_name(cfg.supply.mode)},
          {"k", cfg.supply.k},
          {"q", cfg.supply.q},
          {"alpha", cfg.alpha},
          {"gamma", cfg.sinkhorn.gamma},
          {"iters", cfg.sinkhorn.iters},
          {"log_domain", cfg.sinkhorn.log_domain},
          {"residual_tol", cfg.sinkhorn.residual_tol},
          {"focal_alpha", cfg.loss.focal_alpha},
          {"focal_gamma", cfg.loss.focal_gamma},
          {"iou_eps", cfg.loss.iou_eps},
          {"reg_mode", reg_mode_name(cfg.loss.reg_mode)}};
}

json assignment_to_json(const AssignmentResult& res, const OtaConfig& cfg) {
  json flags = json::array();
  for (bool f : res.ambiguous_flags) flags.push_back(f);
  return {{"schema_version", kSchemaVersion},
          {"labels", res.labels},
          {"background", res.background()},
          {"fg_count", res.fg_count},
          {"per_gt_positives", res.per_gt_positives},
          {"ambiguous_flags", std::move(flags)},
          {"ambiguous_count", res.ambiguous_count},
          {"residual", res.marginal_residual},
          {"iterations", res.iterations},
          {"log_domain", res.log_domain},
          {"config", config_to_json(cfg)}};
}

json report_to_json(const BenchReport& report, const json& config) {
  json rows = json::array();
  for (const BenchRow& r : report.rows) {
    rows.push_back({{"method", r.method},
                    {"r", r.r},
                    {"k_mode", r.k_mode},
                    {"k", r.k},
                    {"q", r.q},
                    {"gamma", r.gamma},
                    {"iters", r.iters},
                    {"scenes", r.scenes},
                    {"mean_amb", r.mean_amb},
                    {"mean_fg", r.mean_fg},
                    {"mean_gap", r.mean_gap},
                    {"median_ms", r.median_ms},
                    {"mean_per_gt_positives", r.mean_per_gt_positives},
                    {"mean_supply", r.mean_supply},
                    {"mean_iterations", r.mean_iterations},
                    {"per_iteration_ms", r.per_iteration_ms}});
  }
  return {{"schema_version", kSchemaVersion},
          {"sweep", report.sweep},
          {"config", config},
          {"notes", report.notes},
          {"rows", std::move(rows)}};
}

}  // namespace ota
