// Copyright 2026 The advscc Authors.
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

#pragma once

// File formats for the command-line tool. Requires nlohmann/json.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "advscc/classifier.hpp"
#include "advscc/core_model.hpp"
#include "advscc/discrete_game.hpp"
#include "advscc/error.hpp"
#include "advscc/game_spec.hpp"
#include "advscc/grid.hpp"
#include "advscc/scc.hpp"

namespace advscc::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

inline constexpr const char* kSpecFormat = "advscc/spec";
inline constexpr const char* kRejectionFormat = "advscc/rejection";
inline constexpr const char* kResultFormat = "advscc/result";
inline constexpr const char* kModelFormat = "advscc/scc-model";

// Stands in for z and type2 when no adversary meets the constraint.
inline constexpr const char* kUnconstrained = "unconstrained-by-adversary";

namespace detail {

using advscc::detail::require;

inline json parse_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, what + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kParse, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void check_header(const json& j, const char* format) {
  require(j.is_object(), ErrorCode::kParse, std::string(format) + ": expected a JSON object");
  require(j.contains("format") && j["format"].is_string(), ErrorCode::kParse,
          std::string(format) + ": missing 'format'");
  require(j["format"].get<std::string>() == format, ErrorCode::kParse,
          "expected format '" + std::string(format) + "', got '" +
              j["format"].get<std::string>() + "'");
  require(j.contains("version") && j["version"].is_number_integer(), ErrorCode::kParse,
          std::string(format) + ": missing integer 'version'");
  const auto v = j["version"].get<std::int64_t>();
  require(v == kFormatVersion, ErrorCode::kUnsupportedVersion,
          std::string(format) + " version " + std::to_string(v) + " is not supported (expected " +
              std::to_string(kFormatVersion) + ")");
}

inline json header(const char* format) { return {{"format", format}, {"version", kFormatVersion}}; }

// Field access with parse diagnostics instead of nlohmann type errors.
template <class T>
T field(const json& j, const char* key) {
  require(j.contains(key), ErrorCode::kParse, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return field<T>(j, key);
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Infinite thresholds (delta_minus <= 0) are stored as strings.
inline json threshold_json(double t) {
  if (std::isinf(t)) return t < 0 ? "-inf" : "inf";
  return t;
}

inline double threshold_value(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::kParse, "bad threshold '" + s + "'");
  }
  require(j.is_number(), ErrorCode::kParse, "threshold must be a number");
  return j.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------- specs

struct SpecFile {
  std::vector<double> p;
  std::optional<double> delta;
  double lambda = 0.0;
  std::string divergence = "kl2";
  std::optional<double> delta_q;

  GameSpec game() const {
    advscc::detail::require(delta.has_value(), ErrorCode::kParse, "spec has no 'delta'");
    return GameSpec(Pmf::from_values(p), *delta, lambda, DivergenceKind::parse(divergence));
  }
  DualSpec dual() const {
    advscc::detail::require(delta_q.has_value(), ErrorCode::kParse, "spec has no 'delta_q'");
    return DualSpec(Pmf::from_values(p), *delta_q, lambda, DivergenceKind::parse(divergence));
  }

  bool operator==(const SpecFile&) const = default;
};

inline json to_json(const SpecFile& s) {
  json j = detail::header(kSpecFormat);
  j["p"] = s.p;
  if (s.delta) j["delta"] = *s.delta;
  j["lambda"] = s.lambda;
  j["divergence"] = s.divergence;
  if (s.delta_q) j["delta_q"] = *s.delta_q;
  return j;
}

inline SpecFile spec_from_json(const json& j) {
  detail::check_header(j, kSpecFormat);
  SpecFile s;
  s.p = detail::field<std::vector<double>>(j, "p");
  s.delta = detail::optional_field<double>(j, "delta");
  s.lambda = detail::field<double>(j, "lambda");
  if (j.contains("divergence")) s.divergence = detail::field<std::string>(j, "divergence");
  s.delta_q = detail::optional_field<double>(j, "delta_q");
  // Validate eagerly so bad files fail at load time.
  Pmf::from_values(s.p);
  DivergenceKind::parse(s.divergence);
  return s;
}

inline SpecFile load_spec(const std::string& path) {
  return spec_from_json(detail::parse_text(detail::read_file(path), path));
}

// ------------------------------------------------------ rejection files

inline json rejection_to_json(const RejectionFunction& r) {
  json j = detail::header(kRejectionFormat);
  j["kind"] = r.kind() == RejectionKind::kHard ? "hard" : "soft";
  j["r"] = std::vector<double>(r.rates().begin(), r.rates().end());
  return j;
}

inline RejectionFunction rejection_from_json(const json& j) {
  detail::check_header(j, kRejectionFormat);
  auto rates = detail::field<std::vector<double>>(j, "r");
  const std::string kind = j.contains("kind") ? detail::field<std::string>(j, "kind") : "soft";
  if (kind == "hard") return RejectionFunction::hard(std::move(rates));
  advscc::detail::require(kind == "soft", ErrorCode::kParse, "unknown rejection kind '" + kind + "'");
  return RejectionFunction::soft(std::move(rates));
}

inline RejectionFunction load_rejection(const std::string& path) {
  return rejection_from_json(detail::parse_text(detail::read_file(path), path));
}

// -------------------------------------------------------------- results

struct ResultFile {
  std::string command;  // solve | hard | dual | oracle
  std::string status;
  std::vector<double> r_levels;
  std::vector<double> r_events;
  std::optional<double> z;
  std::optional<double> type2;
  std::optional<double> z_i;
  std::optional<double> value;
  std::optional<std::string> mode;
  std::vector<std::pair<std::size_t, double>> witness;  // original event index, mass
  std::optional<bool> vulnerable;
  std::vector<std::size_t> rejected;
  std::optional<double> rejected_mass;
  std::string tool_version = kToolVersion;
  std::optional<std::uint64_t> seed;
  std::optional<double> timing_seconds;

  bool operator==(const ResultFile&) const = default;
};

inline json to_json(const ResultFile& r) {
  json j = detail::header(kResultFormat);
  j["command"] = r.command;
  j["status"] = r.status;
  j["r_levels"] = r.r_levels;
  j["r_events"] = r.r_events;
  const bool infeasible = r.status == to_string(GameStatus::kAdversaryInfeasible);
  j["z"] = !r.z && infeasible ? json(kUnconstrained) : detail::optional_json(r.z);
  j["type2"] = !r.type2 && infeasible ? json(kUnconstrained) : detail::optional_json(r.type2);
  if (r.z_i) j["z_i"] = *r.z_i;
  if (r.value) j["value"] = *r.value;
  if (r.mode) j["mode"] = *r.mode;
  json w = json::array();
  for (const auto& [e, m] : r.witness) w.push_back({e, m});
  j["witness"] = w;
  j["vulnerable"] = detail::optional_json(r.vulnerable);
  if (!r.rejected.empty()) j["rejected"] = r.rejected;
  if (r.rejected_mass) j["rejected_mass"] = *r.rejected_mass;
  j["tool_version"] = r.tool_version;
  j["seed"] = detail::optional_json(r.seed);
  if (r.timing_seconds) j["timing_seconds"] = *r.timing_seconds;
  return j;
}

inline ResultFile result_from_json(const json& j) {
  detail::check_header(j, kResultFormat);
  ResultFile r;
  r.command = detail::field<std::string>(j, "command");
  r.status = detail::field<std::string>(j, "status");
  r.r_levels = detail::field<std::vector<double>>(j, "r_levels");
  r.r_events = detail::field<std::vector<double>>(j, "r_events");
  auto game_value = [&](const char* key) -> std::optional<double> {
    if (j.contains(key) && j.at(key) == kUnconstrained) return std::nullopt;
    return detail::optional_field<double>(j, key);
  };
  r.z = game_value("z");
  r.type2 = game_value("type2");
  r.z_i = detail::optional_field<double>(j, "z_i");
  r.value = detail::optional_field<double>(j, "value");
  r.mode = detail::optional_field<std::string>(j, "mode");
  for (const auto& pair : detail::field<json>(j, "witness")) {
    advscc::detail::require(pair.is_array() && pair.size() == 2, ErrorCode::kParse,
                            "witness entries must be [event, mass] pairs");
    r.witness.emplace_back(pair[0].get<std::size_t>(), pair[1].get<double>());
  }
  r.vulnerable = detail::optional_field<bool>(j, "vulnerable");
  if (j.contains("rejected")) r.rejected = detail::field<std::vector<std::size_t>>(j, "rejected");
  r.rejected_mass = detail::optional_field<double>(j, "rejected_mass");
  r.tool_version = detail::field<std::string>(j, "tool_version");
  r.seed = detail::optional_field<std::uint64_t>(j, "seed");
  r.timing_seconds = detail::optional_field<double>(j, "timing_seconds");
  return r;
}

namespace detail {

// Witness masses over surviving events, keyed by original event index.
inline std::vector<std::pair<std::size_t, double>> witness_pairs(const std::vector<double>& q,
                                                                 const Pmf& p) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) out.emplace_back(p.support()[i], q[i]);
  return out;
}

inline std::vector<double> rates_of(const RejectionFunction& r) {
  return {r.rates().begin(), r.rates().end()};
}

}  // namespace detail

inline ResultFile make_result(const SolveOutcome& o, const GameSpec& spec) {
  ResultFile r;
  r.command = "solve";
  r.status = to_string(o.status);
  r.r_levels = o.r_levels;
  r.r_events = detail::rates_of(o.r_events);
  r.z = o.z;
  r.type2 = o.type2();
  r.witness = detail::witness_pairs(o.witness_q, spec.p);
  r.vulnerable = o.vulnerable;
  return r;
}

inline ResultFile make_result(const HardOutcome& o, const GameSpec& spec) {
  ResultFile r;
  r.command = "hard";
  r.status = to_string(o.status);
  const auto part = partition_level_sets(spec.p);
  for (const auto& s : part.sets) r.r_levels.push_back(o.r[spec.p.support()[s.members.front()]]);
  r.r_events = detail::rates_of(o.r);
  r.z = o.value;
  r.type2 = o.type2();
  r.witness = detail::witness_pairs(o.witness_q, spec.p);
  r.rejected = o.rejected;
  r.rejected_mass = o.rejected_mass;
  return r;
}

inline ResultFile make_result(const DualOutcome& o) {
  ResultFile r;
  r.command = "dual";
  r.status = to_string(o.status);
  r.r_levels = o.r_levels;
  r.r_events = detail::rates_of(o.r_events);
  r.z_i = o.z_i;
  r.vulnerable = o.vulnerable;
  return r;
}

inline ResultFile make_result(const BestResponse& br, const RejectionFunction& r_in,
                              const GameSpec& spec) {
  ResultFile r;
  r.command = "oracle";
  r.status = "solved";
  r.r_events = detail::rates_of(r_in);
  r.value = br.value;
  r.type2 = 1.0 - br.value;
  r.mode = to_string(br.mode);
  r.witness = detail::witness_pairs(br.q, spec.p);
  return r;
}

// ---------------------------------------------------------------- models

inline json to_json(const SccModel& m) {
  const auto* k = dynamic_cast<const KernelLogisticClassifier*>(m.classifier.get());
  advscc::detail::require(k != nullptr, ErrorCode::kInvalidArgument,
                          "only kernel logistic classifiers can be saved");
  json j = detail::header(kModelFormat);
  j["grid"] = {{"origin", m.grid.origin}, {"pitch", m.grid.pitch}};
  j["covered"] = m.covered;
  json centers = json::array();
  for (Eigen::Index i = 0; i < k->centers().rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(k->centers().cols()));
    for (Eigen::Index c = 0; c < k->centers().cols(); ++c)
      row[static_cast<std::size_t>(c)] = k->centers()(i, c);
    centers.push_back(row);
  }
  j["classifier"] = {
      {"type", "kernel_logistic"},
      {"centers", centers},
      {"alpha", std::vector<double>(k->alpha().data(), k->alpha().data() + k->alpha().size())},
      {"bias", k->bias()},
      {"bandwidth", k->bandwidth()},
      {"iterations", k->info().iterations},
      {"final_loss", k->info().final_loss},
      {"converged", k->info().converged},
  };
  j["delta"] = m.delta;
  j["margins"] = {{"theta", m.margins.theta},
                  {"delta_minus", m.margins.delta_minus},
                  {"delta_plus", m.margins.delta_plus}};
  j["thresholds"] = {{"t_minus", detail::threshold_json(m.t_minus)},
                     {"t_plus", detail::threshold_json(m.t_plus)}};
  j["jitter"] = {{"m", m.jitter_m}, {"sigma", m.jitter_sigma}};
  j["n_train"] = m.n_train;
  j["n_synthetic"] = m.n_synthetic;
  j["min_count"] = m.min_count;
  j["seed"] = m.seed;
  j["notes"] = {{"jitter", "fixed m with sigma = max(1e-12, 1e-9 * score range)"},
                {"theta", "theta = 8 * cbrt(n), delta_minus = delta - 1/theta"}};
  return j;
}


inline SccModel model_from_json(const json& j) {
  detail::check_header(j, kModelFormat);
  SccModel m;
  try {
    const json& g = j.at("grid");
    m.grid.origin = g.at("origin").get<Point>();
    m.grid.pitch = g.at("pitch").get<double>();
    m.covered = j.at("covered").get<std::vector<CellKey>>();
    const json& c = j.at("classifier");
    advscc::detail::require(c.at("type").get<std::string>() == "kernel_logistic",
                            ErrorCode::kParse, "unknown classifier type");
    const auto rows = c.at("centers").get<std::vector<std::vector<double>>>();
    const auto alpha = c.at("alpha").get<std::vector<double>>();
    const std::size_t d = m.grid.dim();
    Eigen::MatrixXd centers(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      advscc::detail::require(rows[i].size() == d, ErrorCode::kParse,
                              "kernel center dimension does not match the grid");
      for (std::size_t k = 0; k < d; ++k)
        centers(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    TrainingInfo info;
    info.iterations = c.value("iterations", std::size_t{0});
    info.final_loss = c.value("final_loss", 0.0);
    info.converged = c.value("converged", false);
    m.classifier = std::make_shared<KernelLogisticClassifier>(
        std::move(centers), Eigen::Map<const Eigen::VectorXd>(alpha.data(),
                                                               static_cast<Eigen::Index>(alpha.size())),
        c.at("bias").get<double>(), c.at("bandwidth").get<double>(), info);
    m.delta = j.at("delta").get<double>();
    const json& mg = j.at("margins");
    m.margins.theta = mg.at("theta").get<double>();
    m.margins.delta_minus = mg.at("delta_minus").get<double>();
    m.margins.delta_plus = mg.at("delta_plus").get<double>();
    m.t_minus = detail::threshold_value(j.at("thresholds").at("t_minus"));
    m.t_plus = detail::threshold_value(j.at("thresholds").at("t_plus"));
    m.jitter_m = j.at("jitter").at("m").get<double>();
    m.jitter_sigma = j.at("jitter").at("sigma").get<double>();
    m.n_train = j.at("n_train").get<std::size_t>();
    m.n_synthetic = j.at("n_synthetic").get<std::size_t>();
    m.min_count = j.at("min_count").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed model: ") + e.what());
  }
  advscc::detail::require(m.grid.pitch > 0.0 && m.grid.dim() > 0, ErrorCode::kParse,
                          "model grid is invalid");
  for (const auto& key : m.covered)
    advscc::detail::require(key.size() == m.grid.dim(), ErrorCode::kParse,
                            "covered cell dimension does not match the grid");
  advscc::detail::require(std::is_sorted(m.covered.begin(), m.covered.end()), ErrorCode::kParse,
                          "covered cells must be sorted");
  return m;
}

inline SccModel load_model(const std::string& path) {
  return model_from_json(detail::parse_text(detail::read_file(path), path));
}

// ---------------------------------------------------------------- points

namespace detail {

inline std::optional<double> parse_number(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return std::nullopt;
  s = s.substr(b, e - b + 1);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

inline void check_point(const Point& x, std::size_t& dim, std::size_t line) {
  require(!x.empty(), ErrorCode::kParse, "line " + std::to_string(line) + ": empty point");
  if (dim == 0) dim = x.size();
  require(x.size() == dim, ErrorCode::kDimensionMismatch,
          "line " + std::to_string(line) + ": expected " + std::to_string(dim) + " columns");
  for (double v : x)
    require(std::isfinite(v), ErrorCode::kNonFinite,
            "line " + std::to_string(line) + ": non-finite coordinate");
}

}  // namespace detail

// One point per row; a first row that does not parse as numbers is a header.
inline Points parse_points_csv(const std::string& text) {
  Points out;
  std::istringstream in(text);
  std::string line;
  std::size_t dim = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    Point x;
    bool numeric = true;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto v = detail::parse_number(cell);
      if (!v) {
        numeric = false;
        break;
      }
      x.push_back(*v);
    }
    if (!numeric) {
      advscc::detail::require(out.empty() && dim == 0, ErrorCode::kParse,
                              "line " + std::to_string(lineno) + ": not a numeric row");
      dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
      continue;
    }
    detail::check_point(x, dim, lineno);
    out.push_back(std::move(x));
  }
  return out;
}

// One JSON array per line.
inline Points parse_points_jsonl(const std::string& text) {
  Points out;
  std::istringstream in(text);
  std::string line;
  std::size_t dim = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = detail::parse_text(line, "line " + std::to_string(lineno));
    advscc::detail::require(j.is_array(), ErrorCode::kParse,
                            "line " + std::to_string(lineno) + ": expected a JSON array");
    Point x;
    for (const auto& v : j) {
      advscc::detail::require(v.is_number(), ErrorCode::kParse,
                              "line " + std::to_string(lineno) + ": non-numeric coordinate");
      x.push_back(v.get<double>());
    }
    detail::check_point(x, dim, lineno);
    out.push_back(std::move(x));
  }
  return out;
}

inline Points load_points(const std::string& path) {
  const std::string text = detail::read_file(path);
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".jsonl" || ext == ".ndjson") return parse_points_jsonl(text);
  return parse_points_csv(text);
}

inline std::string points_to_csv(const Points& pts) {
  std::string out;
  char buf[32];
  for (const auto& x : pts) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", x[k]);
      if (k) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace advscc::io
