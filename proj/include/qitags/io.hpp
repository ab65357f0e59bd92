#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qitags/active_learning.hpp"
#include "qitags/analysis.hpp"
#include "qitags/domain.hpp"
#include "qitags/gp.hpp"
#include "qitags/search.hpp"
#include "qitags/solution.hpp"

namespace qitags::io {

using nlohmann::json;

// Shortest decimal text that round-trips the double.
inline std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write " + path.string());
  out << text;
}

// Parses JSON text; syntax errors become InvalidInput with line:column.
inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InvalidInput(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                       ": malformed JSON (" + e.what() + ")");
  }
}

namespace detail {

inline GridCell cell_from(const json& j, const char* what) {
  require(j.is_array() && j.size() == 2, std::string(what) + " must be [col, row]");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

inline json cell_to(GridCell c) { return json::array({c.col, c.row}); }

}  // namespace detail

inline json gp_model_to_json(const GPModel& g) {
  return {{"signal_var", g.hyper().signal_var},
          {"length_scale", g.hyper().length_scale},
          {"noise_var", g.hyper().noise_var},
          {"dim", g.dim()},
          {"inputs", g.inputs()},
          {"labels", g.labels()}};
}

inline GPModel gp_model_from_json(const json& j) {
  try {
    GPHyperparameters h{j.at("signal_var").get<double>(), j.at("length_scale").get<double>(),
                        j.at("noise_var").get<double>()};
    auto inputs = j.at("inputs").get<std::vector<std::vector<double>>>();
    auto labels = j.at("labels").get<std::vector<double>>();
    if (inputs.empty()) return GPModel::prior(j.at("dim").get<std::size_t>(), h);
    return gp_fit(std::move(inputs), std::move(labels), h);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("invalid GP model: ") + e.what());
  }
}

inline GPModel load_gp_model(const std::filesystem::path& path) {
  return gp_model_from_json(parse_json(read_file(path), path.string()));
}

inline void save_gp_model(const GPModel& g, const std::filesystem::path& path) {
  write_file(path, gp_model_to_json(g).dump(2) + "\n");
}

// `base_dir` resolves relative model_path entries of learned quality maps.
inline ProblemDomain instance_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  ProblemDomain d;
  try {
    require(j.is_object(), "instance must be a JSON object");
    d.world = WorldMap::from_ascii(j.at("map").get<std::vector<std::string>>(),
                                   j.at("cell_size").get<double>());
    int id = 0;
    for (const auto& r : j.at("robots")) {
      Robot robot;
      robot.id = id++;
      robot.traits = r.at("traits").get<std::vector<double>>();
      robot.start_cell = detail::cell_from(r.at("start"), "robot start");
      robot.speed = r.at("speed").get<double>();
      d.robots.push_back(std::move(robot));
    }
    id = 0;
    for (const auto& t : j.at("tasks")) {
      Task task;
      task.id = id++;
      task.duration = t.at("duration").get<double>();
      task.start_site = detail::cell_from(t.at("start_site"), "task start_site");
      task.end_site = detail::cell_from(t.at("end_site"), "task end_site");
      d.network.tasks.push_back(task);
      const auto& qm = t.at("quality_map");
      const auto type = qm.at("type").get<std::string>();
      if (type == "linear") {
        d.quality_maps.emplace_back(LinearQualityMap{qm.at("weights").get<std::vector<double>>(),
                                                     qm.value("normalizer", 1.0)});
      } else if (type == "learned") {
        const auto rel = qm.at("model_path").get<std::string>();
        auto model = std::make_shared<const GPModel>(load_gp_model(base_dir / rel));
        d.quality_maps.emplace_back(LearnedQualityMap{std::move(model), rel});
      } else {
        throw InvalidInput("unknown quality_map type '" + type + "'");
      }
    }
    for (const auto& p : j.value("precedence", json::array()))
      d.network.precedence.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    for (const auto& p : j.value("mutex", json::array()))
      d.network.mutex.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    d.time_budget = j.at("time_budget").get<double>();
    d.alpha = j.value("alpha", kDefaultAlpha);
    d.big_m = j.value("big_m", 0.0);
    if (j.contains("trait_normalizers")) d.trait_scale = j.at("trait_normalizers").get<std::vector<double>>();
    if (j.contains("seed")) d.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("invalid instance: ") + e.what());
  }
  finalize(d);
  resolve_big_m(d);
  return d;
}

inline ProblemDomain load_instance(const std::filesystem::path& path) {
  return instance_from_json(parse_json(read_file(path), path.string()), path.parent_path());
}

inline json instance_to_json(const ProblemDomain& d) {
  json j;
  json robots = json::array();
  for (const auto& r : d.robots)
    robots.push_back({{"traits", r.traits}, {"start", detail::cell_to(r.start_cell)}, {"speed", r.speed}});
  json tasks = json::array();
  for (std::size_t i = 0; i < d.num_tasks(); ++i) {
    const auto& t = d.network.tasks[i];
    json qm;
    const auto& v = d.quality_maps[i].variant();
    if (const auto* lin = std::get_if<LinearQualityMap>(&v)) {
      qm = {{"type", "linear"}, {"weights", lin->weights}, {"normalizer", lin->normalizer}};
    } else if (const auto* learned = std::get_if<LearnedQualityMap>(&v)) {
      qm = {{"type", "learned"}, {"model_path", learned->model_path}};
    } else {
      throw InvalidInput("callable quality maps cannot be serialized");
    }
    tasks.push_back({{"duration", t.duration},
                     {"start_site", detail::cell_to(t.start_site)},
                     {"end_site", detail::cell_to(t.end_site)},
                     {"quality_map", qm}});
  }
  j["robots"] = robots;
  j["tasks"] = tasks;
  j["precedence"] = json::array();
  for (auto [a, b] : d.network.precedence) j["precedence"].push_back({a, b});
  j["mutex"] = json::array();
  for (auto [a, b] : d.network.mutex) j["mutex"].push_back({a, b});
  j["map"] = d.world.to_ascii();
  j["cell_size"] = d.world.cell_size();
  j["time_budget"] = d.time_budget;
  j["alpha"] = d.alpha;
  j["big_m"] = d.big_m;
  if (!d.trait_scale.empty()) j["trait_normalizers"] = d.trait_scale;
  if (d.seed) j["seed"] = *d.seed;
  return j;
}

inline void save_instance(const ProblemDomain& d, const std::filesystem::path& path) {
  write_file(path, instance_to_json(d).dump(2) + "\n");
}

namespace detail {

// JSON has no infinity; encode it as null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

inline json bound_report_to_json(const BoundReport& b) {
  json j = {{"alpha", b.alpha},
            {"q_root", b.q_root},
            {"q_null", b.q_null},
            {"q_solution", b.q_solution},
            {"apriori_bound", detail::number(b.apriori_bound)},
            {"posthoc_bound", detail::number(b.posthoc_bound)},
            {"tbo_of_best_open", detail::number(b.tbo_of_best_open)},
            {"apriori_trivial", b.apriori_trivial},
            {"theorem_applies", b.theorem_applies}};
  j["q_optimal"] = b.q_optimal ? json(*b.q_optimal) : json(nullptr);
  j["gap"] = b.gap ? json(*b.gap) : json(nullptr);
  j["holds_apriori"] = b.holds_apriori ? json(*b.holds_apriori) : json(nullptr);
  j["holds_posthoc"] = b.holds_posthoc ? json(*b.holds_posthoc) : json(nullptr);
  return j;
}

inline json stats_to_json(const SearchStats& s) {
  return {{"nodes_expanded", s.nodes_expanded},
          {"nodes_generated", s.nodes_generated},
          {"scheduler_calls", s.scheduler_calls},
          {"refinement_rounds", s.refinement_rounds},
          {"planner_calls", s.planner_calls},
          {"open_set_size", s.open_set_snapshot.size()}};
}

inline json solution_to_json(const SearchResult& r) {
  json j;
  j["status"] = r.feasible() ? "solution" : "infeasible";
  j["alpha"] = r.alpha;
  j["c_worst"] = r.context.c_worst;
  j["time_budget"] = r.context.c_max;
  j["stats"] = stats_to_json(r.stats);
  if (!r.feasible()) return j;
  const Solution& s = *r.solution;
  j["allocation"] = s.allocation.to_rows();
  j["start_times"] = s.schedule.start_times;
  j["makespan"] = s.schedule.makespan;
  j["quality"] = s.total_quality;
  j["naq"] = s.naq;
  j["tbo"] = s.tbo;
  j["tetam"] = s.tetam;
  json ord = json::array();
  for (const auto& [pair, p] : s.schedule.orderings)
    ord.push_back({{"i", pair.first}, {"j", pair.second}, {"i_first", p == 1}});
  j["orderings"] = ord;
  json plans = json::array();
  for (const auto& leg : s.motion_plans) {
    json cells = json::array();
    for (auto c : leg.path.cells) cells.push_back(detail::cell_to(c));
    plans.push_back({{"robot", leg.robot},
                     {"from_task", leg.from_task},
                     {"to_task", leg.to_task},
                     {"length", leg.path.length},
                     {"cells", cells}});
  }
  j["motion_plans"] = plans;
  if (s.bound_report) j["bound_report"] = bound_report_to_json(*s.bound_report);
  return j;
}

inline json oracle_to_json(const OracleResult& o, const HeuristicContext& ctx) {
  json j;
  j["status"] = o.feasible() ? "optimal" : "infeasible";
  j["q_root"] = ctx.q_root;
  j["q_null"] = ctx.q_null;
  j["c_worst"] = ctx.c_worst;
  j["time_budget"] = ctx.c_max;
  j["allocations"] = o.allocations;
  j["scheduled"] = o.scheduled;
  if (o.feasible()) {
    j["best_quality"] = o.best_quality;
    j["allocation"] = o.best->to_rows();
    j["start_times"] = o.schedule.start_times;
    j["makespan"] = o.schedule.makespan;
  }
  return j;
}

inline const char* kSweepHeader =
    "alpha,quality,makespan,norm_gap,norm_apriori_bound,norm_posthoc_bound,holds_apriori,"
    "holds_posthoc";

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepHeader << "\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_number(v); };
  for (const auto& r : rows) {
    out << format_number(r.alpha) << ',' << cell(r.quality) << ',' << cell(r.makespan) << ','
        << cell(r.norm_gap) << ',' << cell(r.norm_apriori_bound) << ','
        << cell(r.norm_posthoc_bound) << ','
        << (r.holds_apriori ? "true" : "false") << ',' << (r.holds_posthoc ? "true" : "false")
        << "\n";
  }
  return out.str();
}

// Header row: trait names then a final label column.
inline Dataset parse_dataset_csv(const std::string& text, const std::string& origin = "dataset") {
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      out.push_back(cell);
    }
    return out;
  };
  require(static_cast<bool>(std::getline(in, line)), origin + ": missing header");
  auto header = split(line);
  require(header.size() >= 2, origin + ": need at least one trait and a label column");
  Dataset d;
  d.trait_names.assign(header.begin(), header.end() - 1);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    require(cells.size() == header.size(),
            origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                " columns");
    std::vector<double> x;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      char* end = nullptr;
      const double v = std::strtod(cells[k].c_str(), &end);
      require(end != cells[k].c_str() && *end == '\0',
              origin + ":" + std::to_string(lineno) + ": not a number: '" + cells[k] + "'");
      x.push_back(v);
    }
    const double label = x.back();
    x.pop_back();
    require(label >= 0.0 && label <= 1.0, origin + ":" + std::to_string(lineno) + ": label outside [0,1]");
    d.features.push_back(std::move(x));
    d.labels.push_back(label);
  }
  require(!d.features.empty(), origin + ": no data rows");
  return d;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset_csv(read_file(path), path.string());
}

inline std::string dataset_to_csv(const Dataset& d) {
  std::ostringstream out;
  for (const auto& name : d.trait_names) out << name << ',';
  out << "label\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double v : d.features[i]) out << format_number(v) << ',';
    out << format_number(d.labels[i]) << "\n";
  }
  return out.str();
}

}  // namespace qitags::io
