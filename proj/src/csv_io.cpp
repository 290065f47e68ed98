#include "coex/csv_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coex::cli {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_value(const std::string& text, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": malformed value \"" + text + "\"");
  }
}

long parse_run_id(const std::string& text, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size() || v <= 0) throw std::invalid_argument("not a positive integer");
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": malformed run_id \"" + text + "\"");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return in;
}

}  // namespace

std::map<std::string, EnsembleData> load_ensemble_csv(
    const std::string& path, const std::optional<std::vector<std::string>>& model_subset) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ++line_no;
  if (split_csv_line(line) !=
      std::vector<std::string>{"gridbox_id", "model_id", "scenario", "run_id", "value"}) {
    throw ParseError(path + ":1: expected header gridbox_id,model_id,scenario,run_id,value");
  }

  std::set<std::string> keep;
  if (model_subset) keep.insert(model_subset->begin(), model_subset->end());

  // (gridbox, model, scenario) -> run_id -> value; model order = first appearance.
  std::map<std::string, std::vector<std::string>> model_order;
  std::map<std::string, std::map<std::string, std::array<std::map<long, double>, 2>>> cells;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 5 fields, got " +
                       std::to_string(fields.size()));
    }
    const std::string& gid = fields[0];
    const std::string& model = fields[1];
    const std::string& scenario = fields[2];
    int scen_idx;
    if (scenario == "hist") {
      scen_idx = 0;
    } else if (scenario == "fut") {
      scen_idx = 1;
    } else {
      throw ParseError(path + ":" + std::to_string(line_no) + ": unknown scenario \"" + scenario +
                       "\" (expected hist or fut)");
    }
    const long run_id = parse_run_id(fields[3], path, line_no);
    const double value = parse_value(fields[4], path, line_no);

    if (model_subset && keep.count(model) == 0) continue;

    auto& models = cells[gid];
    if (models.find(model) == models.end()) model_order[gid].push_back(model);
    auto& runs = models[model][scen_idx];
    if (!runs.emplace(run_id, value).second) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate run (" + gid + "," +
                       model + "," + scenario + "," + fields[3] + ")");
    }
  }

  std::map<std::string, EnsembleData> out;
  for (auto& [gid, models] : cells) {
    EnsembleData data;
    for (const std::string& model : model_order[gid]) {
      ModelRuns runs;
      runs.model_id = model;
      for (const auto& [run_id, value] : models[model][0]) runs.hist_runs.push_back(value);
      for (const auto& [run_id, value] : models[model][1]) runs.fut_runs.push_back(value);
      data.models.push_back(std::move(runs));
    }
    out.emplace(gid, std::move(data));
  }
  return out;
}

std::map<std::string, ReanalysisData> load_reanalysis_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ++line_no;
  if (split_csv_line(line) != std::vector<std::string>{"gridbox_id", "reanalysis_id", "value"}) {
    throw ParseError(path + ":1: expected header gridbox_id,reanalysis_id,value");
  }

  std::map<std::string, ReanalysisData> out;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    if (!seen.emplace(fields[0], fields[1]).second) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate reanalysis (" +
                       fields[0] + "," + fields[1] + ")");
    }
    out[fields[0]].values.push_back(parse_value(fields[2], path, line_no));
  }
  return out;
}

std::vector<GridboxDataset> join_gridboxes(const std::map<std::string, EnsembleData>& ensembles,
                                           const std::map<std::string, ReanalysisData>& reanalyses) {
  std::set<std::string> ids;
  for (const auto& [gid, unused] : ensembles) ids.insert(gid);
  for (const auto& [gid, unused] : reanalyses) ids.insert(gid);

  std::vector<GridboxDataset> out;
  out.reserve(ids.size());
  for (const std::string& gid : ids) {
    GridboxDataset box;
    box.gridbox_id = gid;
    if (auto it = ensembles.find(gid); it != ensembles.end()) box.ensemble = it->second;
    if (auto it = reanalyses.find(gid); it != reanalyses.end()) box.reanalysis = it->second;
    out.push_back(std::move(box));
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_ensemble_csv(const std::string& path, const std::vector<GridboxDataset>& gridboxes) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "gridbox_id,model_id,scenario,run_id,value\n";
  for (const auto& box : gridboxes) {
    for (const auto& model : box.ensemble.models) {
      for (std::size_t r = 0; r < model.hist_runs.size(); ++r) {
        out << box.gridbox_id << ',' << model.model_id << ",hist," << (r + 1) << ','
            << format_double(model.hist_runs[r]) << '\n';
      }
      for (std::size_t r = 0; r < model.fut_runs.size(); ++r) {
        out << box.gridbox_id << ',' << model.model_id << ",fut," << (r + 1) << ','
            << format_double(model.fut_runs[r]) << '\n';
      }
    }
  }
}

void write_reanalysis_csv(const std::string& path, const std::vector<GridboxDataset>& gridboxes) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "gridbox_id,reanalysis_id,value\n";
  for (const auto& box : gridboxes) {
    for (std::size_t i = 0; i < box.reanalysis.values.size(); ++i) {
      out << box.gridbox_id << ",r" << (i + 1) << ',' << format_double(box.reanalysis.values[i])
          << '\n';
    }
  }
}

PriorConfig RunConfig::resolve_priors(std::size_t model_count) const {
  PriorConfig p = PriorConfig::defaults_for(model_count);
  auto set = [&](const char* key, double& field) {
    if (auto it = prior_overrides.find(key); it != prior_overrides.end()) field = it->second;
  };
  set("a_mu_h", p.a_mu_h);
  set("b_mu_h", p.b_mu_h);
  set("b_mu_f", p.b_mu_f);
  set("a_beta", p.a_beta);
  set("b_beta", p.b_beta);
  set("a_tau_h", p.a_tau_h);
  set("b_tau_h", p.b_tau_h);
  set("a_tau_f", p.a_tau_f);
  set("b_tau_f", p.b_tau_f);
  set("a_psi2", p.a_psi2);
  set("b_psi2", p.b_psi2);
  set("a_theta2", p.a_theta2);
  set("b_theta2", p.b_theta2);
  set("a_nu_h", p.a_nu_h);
  set("b_nu_h", p.b_nu_h);
  set("a_nu_f", p.a_nu_f);
  set("b_nu_f", p.b_nu_f);
  set("a_tau_w", p.a_tau_w);
  set("b_tau_w", p.b_tau_w);
  return p;
}

RunConfig parse_run_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  RunConfig cfg;
  try {
    if (j.contains("kappa")) cfg.inad.kappa = j["kappa"].get<double>();
    if (j.contains("kappa_w")) cfg.inad.kappa_w = j["kappa_w"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("model_subset")) {
      cfg.model_subset = j["model_subset"].get<std::vector<std::string>>();
    }
    if (j.contains("priors")) {
      for (const auto& [key, value] : j["priors"].items()) {
        cfg.prior_overrides[key] = value.get<double>();
      }
    }
    if (j.contains("chains")) {
      const auto& c = j["chains"];
      if (c.contains("n_chains")) cfg.chains.n_chains = c["n_chains"].get<std::size_t>();
      if (c.contains("iters_initial")) cfg.chains.iters_initial = c["iters_initial"].get<std::size_t>();
      if (c.contains("burn_in")) cfg.chains.burn_in = c["burn_in"].get<std::size_t>();
      if (c.contains("extend_by")) cfg.chains.extend_by = c["extend_by"].get<std::size_t>();
      if (c.contains("thin")) cfg.chains.thin = c["thin"].get<std::size_t>();
      if (c.contains("psrf_threshold")) cfg.chains.psrf_threshold = c["psrf_threshold"].get<double>();
      if (c.contains("max_total_iters")) cfg.chains.max_total_iters = c["max_total_iters"].get<std::size_t>();
      if (c.contains("lambda_h")) cfg.chains.lambda_h = c["lambda_h"].get<double>();
      if (c.contains("lambda_f")) cfg.chains.lambda_f = c["lambda_f"].get<double>();
      if (c.contains("adapt_lambda")) cfg.chains.adapt_lambda = c["adapt_lambda"].get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  cfg.chains.base_seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace coex::cli
