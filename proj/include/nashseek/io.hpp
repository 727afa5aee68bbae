#pragma once

// JSON scenario files, trajectory CSV and run summaries. Player indices are
// 1-based in every file and 0-based in memory.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nashseek/analysis.hpp"
#include "nashseek/presets.hpp"
#include "nashseek/sim.hpp"

namespace nashseek {

using json = nlohmann::json;

/// Scenario file that parses but violates the schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

namespace io {

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

inline Vector vector_of(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t k = 0; k < j.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = number(j[k], where);
  return v;
}

inline Matrix matrix_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw SchemaError(where + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw SchemaError(where + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<size_t>(c)], where);
  }
  return m;
}

/// Scalar broadcast to every player, or one entry per player.
inline Vector per_player(const json& j, int n, const std::string& where) {
  if (j.is_number()) return Vector::Constant(n, j.get<double>());
  Vector v = vector_of(j, where);
  if (v.size() != n) throw SchemaError(where + ": expected " + std::to_string(n) + " entries");
  return v;
}

inline Matrix per_pair(const json& j, int n, const std::string& where) {
  if (j.is_number()) return Matrix::Constant(n, n, j.get<double>());
  Matrix m = matrix_of(j, where);
  if (m.rows() != n || m.cols() != n)
    throw SchemaError(where + ": expected an N x N matrix");
  return m;
}

inline json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

inline int player_index(const json& j, int n, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": player index must be an integer");
  const int i = j.get<int>();
  if (i < 1 || i > n) throw SchemaError(where + ": player index out of range");
  return i - 1;
}

}  // namespace detail

// ---- graph ---------------------------------------------------------------

inline CommGraph graph_from_json(const json& j) {
  using namespace detail;
  const json& jn = field(j, "n", "graph");
  if (!jn.is_number_integer() || jn.get<int>() < 1) throw SchemaError("graph.n must be a positive integer");
  const int n = jn.get<int>();
  std::vector<CommGraph::Edge> edges;
  for (const auto& e : field(j, "edges", "graph")) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3)
      throw SchemaError("graph.edges: each edge is [i, j] or [i, j, weight]");
    const double w = e.size() == 3 ? number(e[2], "graph.edges") : 1.0;
    edges.emplace_back(player_index(e[0], n, "graph.edges"), player_index(e[1], n, "graph.edges"), w);
  }
  std::vector<DisruptionWindow> windows;
  if (j.contains("disruptions")) {
    for (const auto& d : j.at("disruptions")) {
      if (!d.is_array() || d.size() != 3)
        throw SchemaError("graph.disruptions: each window is [t_start, t_end, scale]");
      windows.push_back({number(d[0], "graph.disruptions"), number(d[1], "graph.disruptions"),
                         number(d[2], "graph.disruptions")});
    }
  }
  try {
    return CommGraph::from_edges(n, edges, std::move(windows));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("graph: ") + e.what());
  }
}

inline json to_json(const CommGraph& g) {
  json edges = json::array();
  for (const auto& [i, j, w] : g.edges()) edges.push_back({i + 1, j + 1, w});
  json windows = json::array();
  for (const auto& d : g.disruptions()) windows.push_back({d.t_start, d.t_end, d.scale});
  return {{"n", g.n_players()}, {"edges", edges}, {"disruptions", windows}};
}

// ---- game ----------------------------------------------------------------

inline ConnectivityGameSpec connectivity_spec_from_json(const json& j) {
  using namespace detail;
  ConnectivityGameSpec spec;
  spec.dim = j.value("dim", 2);
  const json& players = field(j, "players", "game");
  if (!players.is_array() || players.empty()) throw SchemaError("game.players must be a nonempty array");
  const int n = static_cast<int>(players.size());
  for (const auto& p : players) {
    spec.r_self.push_back(matrix_of(field(p, "r_self", "game.players"), "game.players.r_self"));
    spec.r_lin.push_back(vector_of(field(p, "r_lin", "game.players"), "game.players.r_lin"));
    spec.b.push_back(number(field(p, "b", "game.players"), "game.players.b"));
  }
  spec.coupling = Matrix::Zero(n, n);
  if (j.contains("couplings")) {
    for (const auto& c : j.at("couplings")) {
      if (!c.is_array() || c.size() != 3) throw SchemaError("game.couplings: each entry is [i, j, c_ij]");
      spec.coupling(player_index(c[0], n, "game.couplings"), player_index(c[1], n, "game.couplings")) =
          number(c[2], "game.couplings");
    }
  }
  return spec;
}

inline json to_json(const ConnectivityGameSpec& spec) {
  json players = json::array();
  for (int i = 0; i < spec.n_players(); ++i)
    players.push_back({{"r_self", detail::to_json(spec.r_self[static_cast<size_t>(i)])},
                       {"r_lin", detail::to_json(spec.r_lin[static_cast<size_t>(i)])},
                       {"b", spec.b[static_cast<size_t>(i)]}});
  json couplings = json::array();
  for (int i = 0; i < spec.n_players(); ++i)
    for (int j = 0; j < spec.n_players(); ++j)
      if (spec.coupling(i, j) > 0.0) couplings.push_back({i + 1, j + 1, spec.coupling(i, j)});
  return {{"type", "connectivity"}, {"dim", spec.dim}, {"players", players}, {"couplings", couplings}};
}

inline Game game_from_json(const json& j) {
  const std::string type = detail::field(j, "type", "game").get<std::string>();
  if (type == "builtin") {
    const std::string name = detail::field(j, "name", "game").get<std::string>();
    if (name == "sensor_network") return build_sensor_network_game();
    if (name == "nonquadratic") return build_nonquadratic_example();
    throw SchemaError("game: unknown builtin '" + name + "'");
  }
  if (type == "connectivity") {
    try {
      return build_connectivity_game(connectivity_spec_from_json(j));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string("game: ") + e.what());
    }
  }
  throw SchemaError("game: unknown type '" + type + "'");
}

inline json to_json(const Game& g) {
  if (g.name == "sensor_network" || g.name == "nonquadratic")
    return {{"type", "builtin"}, {"name", g.name}};
  if (g.connectivity) return to_json(*g.connectivity);
  throw std::invalid_argument("game '" + g.name + "' has no file representation");
}

// ---- environment ---------------------------------------------------------

inline DisturbanceSignal disturbance_from_json(const json& j, int dim) {
  const std::string type = detail::field(j, "type", "disturbance").get<std::string>();
  if (type == "zero") return DisturbanceSignal::zero(dim);
  if (type == "sinusoid")
    return DisturbanceSignal::sinusoid(
        dim, detail::number(detail::field(j, "amplitude", "disturbance"), "disturbance.amplitude"),
        detail::number(detail::field(j, "frequency", "disturbance"), "disturbance.frequency"));
  throw SchemaError("disturbance: unknown type '" + type + "'");
}

inline json to_json(const DisturbanceSignal& d) {
  if (d.kind == DisturbanceSignal::Kind::Zero) return {{"type", "zero"}};
  return {{"type", "sinusoid"}, {"amplitude", d.amplitude}, {"frequency", d.frequency}};
}

inline Environment environment_from_json(const json& j, int n_players, int dim) {
  const json& vs = detail::field(j, "varsigma", "environment");
  if (!vs.is_number_integer() || (vs.get<int>() != 0 && vs.get<int>() != 1))
    throw SchemaError("environment.varsigma must be 0 or 1");
  const json& dist = detail::field(j, "disturbances", "environment");
  if (!dist.is_array() || static_cast<int>(dist.size()) != n_players)
    throw SchemaError("environment.disturbances needs one entry per player");
  std::vector<DisturbanceSignal> signals;
  for (const auto& d : dist) signals.push_back(disturbance_from_json(d, dim));
  try {
    return make_environment(vs.get<int>(), std::move(signals), j.value("unmodeled", std::string("none")));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("environment: ") + e.what());
  }
}

inline json to_json(const Environment& env) {
  json dist = json::array();
  for (const auto& d : env.disturbances) dist.push_back(to_json(d));
  return {{"varsigma", env.varsigma}, {"disturbances", dist}, {"unmodeled", env.unmodeled_name}};
}

// ---- gains ---------------------------------------------------------------

inline SeekerGains gains_from_json(const std::string& seeker, const json& j, const Environment& env,
                                   int n) {
  using namespace detail;
  const json theta_bar = j.value("theta_bar", json(1.0));
  if (seeker == "pi") {
    PIGains g{number(field(j, "sigma", "gains"), "gains.sigma"),
              per_player(field(j, "k1", "gains"), n, "gains.k1"),
              per_player(field(j, "k2", "gains"), n, "gains.k2"),
              number(field(j, "theta", "gains"), "gains.theta"),
              per_pair(theta_bar, n, "gains.theta_bar")};
    return g;
  }
  if (seeker == "rise") {
    RISEGains g;
    g.ks = per_player(field(j, "ks", "gains"), n, "gains.ks");
    g.c = per_player(field(j, "c", "gains"), n, "gains.c");
    g.theta = number(field(j, "theta", "gains"), "gains.theta");
    g.theta_bar = per_pair(theta_bar, n, "gains.theta_bar");
    g.sgn_smoothing = j.value("sgn_smoothing", 0.0);
    if (j.contains("beta")) {
      g.beta = per_player(j.at("beta"), n, "gains.beta");
    } else if (j.contains("beta_factor")) {
      try {
        g.beta = Vector::Constant(n, number(j.at("beta_factor"), "gains.beta_factor") *
                                         beta_lower_bound(env, g.c));
      } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("gains.beta_factor: ") + e.what());
      }
    } else {
      throw SchemaError("gains: RISE needs 'beta' or 'beta_factor'");
    }
    return g;
  }
  throw SchemaError("seeker must be 'pi' or 'rise'");
}

inline json to_json(const SeekerGains& gains) {
  using detail::to_json;
  if (const auto* pi = std::get_if<PIGains>(&gains))
    return {{"sigma", pi->sigma}, {"k1", to_json(pi->k1)}, {"k2", to_json(pi->k2)},
            {"theta", pi->theta}, {"theta_bar", to_json(pi->theta_bar)}};
  const auto& r = std::get<RISEGains>(gains);
  return {{"ks", to_json(r.ks)},         {"c", to_json(r.c)},
          {"beta", to_json(r.beta)},     {"theta", r.theta},
          {"theta_bar", to_json(r.theta_bar)}, {"sgn_smoothing", r.sgn_smoothing}};
}

// ---- scenario ------------------------------------------------------------

inline Scenario scenario_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw SchemaError("scenario must be a JSON object");
  try {
    Scenario sc;
    sc.name = j.value("name", std::string("scenario"));
    sc.game = game_from_json(field(j, "game", "scenario"));
    sc.graph = graph_from_json(field(j, "graph", "scenario"));
    sc.env = environment_from_json(field(j, "environment", "scenario"), sc.game.n_players, sc.game.dim);
    const std::string seeker = field(j, "seeker", "scenario").get<std::string>();
    sc.gains = gains_from_json(seeker, field(j, "gains", "scenario"), sc.env, sc.game.n_players);
    sc.x0 = vector_of(field(j, "x0", "scenario"), "x0");
    sc.t0 = j.value("t0", 0.0);
    sc.t_end = j.value("t_end", 20.0);
    sc.dt = j.value("dt", 1e-4);
    sc.record_every = j.value("record_every", 100);
    sc.record_estimates = j.value("record_estimates", false);
    const std::string init = j.value("estimate_init", std::string("neighbor_seeded"));
    if (init == "neighbor_seeded")
      sc.estimate_init = EstimateInit::NeighborSeeded;
    else if (init == "zero")
      sc.estimate_init = EstimateInit::Zero;
    else if (init == "exact")
      sc.estimate_init = EstimateInit::Exact;
    else
      throw SchemaError("estimate_init must be 'neighbor_seeded', 'zero' or 'exact'");
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("scenario: ") + e.what());
  }
}

inline json to_json(const Scenario& sc) {
  return {{"name", sc.name},
          {"game", to_json(sc.game)},
          {"graph", to_json(sc.graph)},
          {"environment", to_json(sc.env)},
          {"seeker", is_rise(sc.gains) ? "rise" : "pi"},
          {"gains", to_json(sc.gains)},
          {"x0", detail::to_json(sc.x0)},
          {"t0", sc.t0},
          {"t_end", sc.t_end},
          {"dt", sc.dt},
          {"record_every", sc.record_every},
          {"record_estimates", sc.record_estimates},
          {"estimate_init", sc.estimate_init == EstimateInit::Zero    ? "zero"
                            : sc.estimate_init == EstimateInit::Exact ? "exact"
                                                                      : "neighbor_seeded"}};
}

/// Parses text, mapping syntax errors to SchemaError with line/column.
inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

/// Applies a dotted-path assignment such as "gains.sigma=40". The value is
/// parsed as JSON when possible and kept as a string otherwise.
inline void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw SchemaError("override '" + assignment + "' is not KEY=VALUE");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::stringstream keys(path);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) parts.push_back(key);
  for (size_t k = 0; k < parts.size(); ++k) {
    const std::string& p = parts[k];
    if (node->is_array()) {
      size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw SchemaError("override '" + path + "': '" + p + "' is not an array index");
      }
      if (idx >= node->size()) throw SchemaError("override '" + path + "': index out of range");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      if (k + 1 < parts.size() && !node->contains(p))
        throw SchemaError("override '" + path + "': no field '" + p + "'");
      node = &(*node)[p];
    } else {
      throw SchemaError("override '" + path + "': cannot descend into a scalar");
    }
  }
  *node = value;
}

// ---- CSV -----------------------------------------------------------------

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> trajectory_columns(const Trajectory& tr) {
  std::vector<std::string> cols{"t"};
  auto add = [&](const std::string& prefix) {
    for (int i = 1; i <= tr.n_players; ++i)
      for (int k = 1; k <= tr.dim; ++k)
        cols.push_back(prefix + "_" + std::to_string(i) + "_" + std::to_string(k));
  };
  add("x");
  add("xhat");
  add("zhat");
  add("xi");
  add("zeta1");
  add("zeta2");
  cols.push_back("eta_norm");
  if (tr.rise) add("gamma");
  return cols;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  const auto cols = trajectory_columns(tr);
  for (size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  auto put = [&](const Vector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) out << ',' << fmt17(v(k));
  };
  for (size_t s = 0; s < tr.size(); ++s) {
    out << fmt17(tr.times[s]);
    put(tr.x[s]);
    put(tr.xhat[s]);
    put(tr.zhat[s]);
    put(tr.xi[s]);
    put(tr.zeta1[s]);
    put(tr.zeta2[s]);
    out << ',' << fmt17(tr.eta_norm[s]);
    if (tr.rise) put(tr.gamma[s]);
    out << '\n';
  }
}

/// Columns t, y_i_j_k (player i's estimate of component k of player j).
inline void write_estimates_csv(std::ostream& out, const Trajectory& tr) {
  out << 't';
  for (int i = 1; i <= tr.n_players; ++i)
    for (int j = 1; j <= tr.n_players; ++j)
      for (int k = 1; k <= tr.dim; ++k) out << ",y_" << i << '_' << j << '_' << k;
  out << '\n';
  for (size_t s = 0; s < tr.y.size(); ++s) {
    out << fmt17(tr.times[s]);
    const Matrix& y = tr.y[s];
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      for (Eigen::Index c = 0; c < y.cols(); ++c) out << ',' << fmt17(y(i, c));
    out << '\n';
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  size_t column(const std::string& name) const {
    for (size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    throw std::out_of_range("no column '" + name + "'");
  }
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sigma,theta,ultimate_bound,diverged\n";
  for (const auto& r : rows)
    out << fmt17(r.sigma) << ',' << fmt17(r.theta) << ','
        << (r.diverged ? std::string("nan") : fmt17(r.ultimate_bound)) << ','
        << (r.diverged ? 1 : 0) << '\n';
}

// ---- summary -------------------------------------------------------------

struct RunStatistics {
  TimeWindow window;
  double final_error_inf = 0.0;
  double tail_error_inf = 0.0;
  double observer_tail_error = 0.0;
  double ultimate_bound = 0.0;
};

inline RunStatistics statistics(const Trajectory& tr, TimeWindow w) {
  return {w, tr.xi.back().lpNorm<Eigen::Infinity>(), window_sup_inf(tr, tr.xi, w),
          window_sup_inf(tr, tr.zeta2, w), nashseek::ultimate_bound(tr, w)};
}

inline json to_json(const GainReport& r) {
  json j = {{"seeker", r.seeker},
            {"gains_positive", r.gains_positive},
            {"monotonicity", r.monotonicity},
            {"monotone", r.monotone},
            {"notes", r.notes}};
  if (r.beta_bound) {
    j["beta_bound"] = *r.beta_bound;
    j["beta_sufficient"] = r.beta_sufficient;
  }
  return j;
}

struct ExpectationCheck {
  bool passed = true;
  std::vector<std::string> failures;
};

inline ExpectationCheck check_expectations(const RunStatistics& s, const Expectations& e) {
  ExpectationCheck c;
  auto check = [&](const char* what, const std::optional<double>& limit, double value) {
    if (limit && !(value <= *limit)) {
      c.passed = false;
      c.failures.push_back(std::string(what) + " " + fmt17(value) + " exceeds " + fmt17(*limit));
    }
  };
  check("tail_error_inf", e.tail_error_inf, s.tail_error_inf);
  check("final_error_inf", e.final_error_inf, s.final_error_inf);
  check("observer_tail_error", e.observer_tail_error, s.observer_tail_error);
  check("ultimate_bound", e.ultimate_bound, s.ultimate_bound);
  return c;
}

inline json expectations_json(const Expectations& e) {
  json j = {{"window", {e.window.begin, e.window.end}}};
  if (e.tail_error_inf) j["tail_error_inf"] = *e.tail_error_inf;
  if (e.final_error_inf) j["final_error_inf"] = *e.final_error_inf;
  if (e.observer_tail_error) j["observer_tail_error"] = *e.observer_tail_error;
  if (e.ultimate_bound) j["ultimate_bound"] = *e.ultimate_bound;
  return j;
}

inline json summary_json(const Trajectory& tr, const RunStatistics& s, const GainReport& report) {
  return {{"name", tr.name},
          {"seeker", tr.rise ? "rise" : "pi"},
          {"window", {s.window.begin, s.window.end}},
          {"final_error_inf", s.final_error_inf},
          {"tail_error_inf", s.tail_error_inf},
          {"observer_tail_error", s.observer_tail_error},
          {"ultimate_bound", s.ultimate_bound},
          {"gain_report", to_json(report)},
          {"nash_point", detail::to_json(tr.nash)}};
}

}  // namespace io
}  // namespace nashseek
