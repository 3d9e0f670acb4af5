#include "ilcgap/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "ilcgap/errors.hpp"

namespace ilcgap {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (s.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': not a number: '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& key) {
  const double v = to_double(s, key);
  if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("'" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<std::string> split_entries(const std::string& row) {
  std::string norm = row;
  for (char& c : norm)
    if (c == ',' || c == '\t') c = ' ';
  std::istringstream is(norm);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

// Section reader that remembers which keys were consumed.
class Section {
 public:
  Section(const pt::ptree& root, const std::string& name, std::set<std::string> allowed)
      : name_(name) {
    if (const auto child = root.get_child_optional(name)) tree_ = *child;
    for (const auto& [key, value] : tree_) {
      if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
    }
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (const auto v = tree_.get_optional<std::string>(key)) return *v;
    return std::nullopt;
  }
  void number(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = to_double(*v, qualified(key));
  }
  void integer(const std::string& key, int& out) const {
    if (auto v = raw(key)) out = to_int(*v, qualified(key));
  }
  void matrix(const std::string& key, Mat& out) const {
    if (auto v = raw(key)) out = parse_matrix(*v);
  }
  void vector(const std::string& key, Vec& out) const {
    if (auto v = raw(key)) out = parse_vector(*v);
  }

 private:
  std::string qualified(const std::string& key) const { return name_ + "." + key; }
  pt::ptree tree_;
  std::string name_;
};

pt::ptree read_ini(std::istream& in, const std::set<std::string>& sections) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed INI: ") + e.what());
  }
  for (const auto& [name, child] : root) {
    if (!sections.count(name)) throw ConfigError("unknown section [" + name + "]");
    if (child.data().size() && child.empty()) throw ConfigError("key '" + name + "' outside a section");
  }
  return root;
}

void read_grid(const pt::ptree& root, GridSpec& grid) {
  if (!root.get_child_optional("grid")) return;
  const Section s(root, "grid", {"values", "kind", "min", "max", "points", "start", "stop", "step"});
  if (auto v = s.raw("values")) {
    grid = GridSpec{};
    for (const auto& tok : split_entries(*v)) grid.values.push_back(to_double(tok, "grid.values"));
    return;
  }
  const auto kind = s.raw("kind");
  if (!kind) throw ConfigError("[grid] needs either 'values' or 'kind'");
  if (*kind == "log") {
    grid.kind = GridSpec::Kind::kLog;
    s.number("min", grid.min);
    if (auto mx = s.raw("max")) {
      grid.max_is_cap = *mx == "cap";
      if (!grid.max_is_cap) grid.max = to_double(*mx, "grid.max");
    }
    s.integer("points", grid.points);
  } else if (*kind == "linear") {
    grid.kind = GridSpec::Kind::kLinear;
    s.number("start", grid.start);
    s.number("stop", grid.stop);
    s.number("step", grid.step);
  } else {
    throw ConfigError("grid.kind must be 'log' or 'linear'");
  }
}

void read_ilqr(const pt::ptree& root, IlqrOptions& o) {
  const Section s(root, "ilqr",
                  {"max_iters", "rel_tol", "shrink", "max_halvings", "reg_init", "reg_factor", "reg_max"});
  s.integer("max_iters", o.max_iters);
  s.number("rel_tol", o.rel_tol);
  s.number("shrink", o.shrink);
  s.integer("max_halvings", o.max_halvings);
  s.number("reg_init", o.reg_init);
  s.number("reg_factor", o.reg_factor);
  s.number("reg_max", o.reg_max);
}

template <class Parse>
auto load(const std::string& path, Parse parse) {
  if (path.empty()) {
    std::istringstream empty;
    return parse(empty);
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  return parse(in);
}

}  // namespace

Mat parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(';', start);
    const auto row = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    std::vector<double> vals;
    for (const auto& tok : split_entries(row)) vals.push_back(to_double(tok, "matrix"));
    if (!vals.empty()) rows.push_back(std::move(vals));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (rows.empty()) throw ConfigError("empty matrix");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw ConfigError("ragged matrix rows: '" + text + "'");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Vec parse_vector(const std::string& text) {
  Mat m = parse_matrix(text);
  if (m.rows() != 1 && m.cols() != 1) throw ConfigError("expected a vector: '" + text + "'");
  return Eigen::Map<Vec>(m.data(), m.size());
}

LinearSweepConfig parse_linear_config(std::istream& in) {
  const auto root = read_ini(in, {"linear", "grid"});
  auto c = LinearSweepConfig::defaults();
  const Section s(root, "linear", {"A", "B", "Q", "Qf", "R", "x0", "horizon"});
  s.matrix("A", c.A);
  s.matrix("B", c.B);
  s.matrix("Q", c.Q);
  s.matrix("Qf", c.Qf);
  s.matrix("R", c.R);
  s.vector("x0", c.x0);
  s.integer("horizon", c.horizon);
  read_grid(root, c.grid);
  if (c.horizon < 1) throw ConfigError("linear.horizon must be at least 1");
  return c;
}

PendulumSweepConfig parse_pendulum_config(std::istream& in) {
  const auto root = read_ini(in, {"pendulum", "ilqr", "grid"});
  auto c = PendulumSweepConfig::defaults();
  const Section s(root, "pendulum",
                  {"m", "l", "g", "tau_min", "tau_max", "dt", "horizon", "gravity_sign", "x0",
                   "torque_weight"});
  s.number("m", c.params.m);
  s.number("l", c.params.l);
  s.number("g", c.params.g);
  s.number("tau_min", c.params.tau_min);
  s.number("tau_max", c.params.tau_max);
  s.number("dt", c.params.dt);
  s.integer("horizon", c.params.horizon);
  s.number("gravity_sign", c.params.gravity_sign);
  s.vector("x0", c.x0);
  s.number("torque_weight", c.torque_weight);
  read_ilqr(root, c.ilqr);
  read_grid(root, c.grid);
  if (c.params.gravity_sign != 1.0 && c.params.gravity_sign != -1.0)
    throw ConfigError("pendulum.gravity_sign must be 1 or -1");
  return c;
}

QuadrotorSweepConfig parse_quadrotor_config(std::istream& in) {
  const auto root = read_ini(in, {"quadrotor", "ilqr", "grid"});
  auto c = QuadrotorSweepConfig::defaults();
  const Section s(root, "quadrotor",
                  {"m", "l", "J", "g", "dt", "horizon", "Q", "R", "Qf", "x0", "goal"});
  s.number("m", c.params.m);
  s.number("l", c.params.l);
  c.params.J = 0.2 * c.params.m * c.params.l * c.params.l;
  s.number("J", c.params.J);
  s.number("g", c.params.g);
  s.number("dt", c.params.dt);
  s.integer("horizon", c.params.horizon);
  s.matrix("Q", c.Q);
  s.matrix("R", c.R);
  s.matrix("Qf", c.Qf);
  s.vector("x0", c.x0);
  s.vector("goal", c.x_goal);
  read_ilqr(root, c.ilqr);
  read_grid(root, c.grid);
  return c;
}

BoundSuiteConfig parse_bound_config(std::istream& in) {
  const auto root = read_ini(in, {"bounds"});
  BoundSuiteConfig c;
  const Section s(root, "bounds",
                  {"systems", "max_state_dim", "max_horizon", "eps_lo", "eps_hi", "lemma_trials",
                   "lemma_max_dim", "example_eps", "rhs_scale", "seed"});
  s.integer("systems", c.systems);
  s.integer("max_state_dim", c.max_state_dim);
  s.integer("max_horizon", c.max_horizon);
  s.number("eps_lo", c.eps_lo);
  s.number("eps_hi", c.eps_hi);
  s.integer("lemma_trials", c.lemma_trials);
  s.integer("lemma_max_dim", c.lemma_max_dim);
  if (auto v = s.raw("example_eps")) {
    c.example_eps.clear();
    for (const auto& tok : split_entries(*v)) c.example_eps.push_back(to_double(tok, "bounds.example_eps"));
  }
  s.number("rhs_scale", c.rhs_scale);
  if (auto v = s.raw("seed")) {
    try {
      c.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw ConfigError("bounds.seed must be an unsigned integer");
    }
  }
  return c;
}

LinearSweepConfig load_linear_config(const std::string& path) {
  return load(path, [](std::istream& in) { return parse_linear_config(in); });
}
PendulumSweepConfig load_pendulum_config(const std::string& path) {
  return load(path, [](std::istream& in) { return parse_pendulum_config(in); });
}
QuadrotorSweepConfig load_quadrotor_config(const std::string& path) {
  return load(path, [](std::istream& in) { return parse_quadrotor_config(in); });
}
BoundSuiteConfig load_bound_config(const std::string& path) {
  return load(path, [](std::istream& in) { return parse_bound_config(in); });
}

}  // namespace ilcgap
