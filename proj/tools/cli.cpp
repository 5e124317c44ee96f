#include "cli.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigchange/sigchange.hpp"

namespace sigchange::cli {

namespace {

using nlohmann::json;

/// Bad flag value or combination; exits with kUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
};

struct Options {
  std::string model = "toy";
  std::string model_file;
  int n = 2;
  std::string t_range;
  std::vector<double> x;
  std::optional<double> shift;
  std::string embedding = "explicit";
  std::optional<double> root_tol, quad_abs_tol, quad_rel_tol, fd_step;
  std::optional<int> max_iterations;
  std::string output;
  std::string format;
  double perturb_f = 1.0;
  std::vector<double> event;
  int kmax = 3;
};

double parse_double(const std::string& text, const char* flag) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw UsageError(std::string(flag) + ": '" + text + "' is not a finite number");
  }
  return v;
}

/// "lo:hi:count" or "lo:hi" (count defaults to `default_count`).
Range parse_range(const std::string& text, int default_count) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 2 && parts.size() != 3) {
    throw UsageError("--t-range: expected lo:hi or lo:hi:count, got '" + text + "'");
  }
  Range r;
  r.lo = parse_double(parts[0], "--t-range");
  r.hi = parse_double(parts[1], "--t-range");
  r.count = default_count;
  if (parts.size() == 3) {
    int c = 0;
    const std::string& s = parts[2];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), c);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError("--t-range: count '" + s + "' is not an integer");
    }
    r.count = c;
  }
  if (!(r.lo < r.hi)) throw UsageError("--t-range: need lo < hi, got '" + text + "'");
  if (r.count < 2) throw UsageError("--t-range: need count >= 2, got '" + text + "'");
  return r;
}

Grid1D to_grid(const Range& r) { return Grid1D{r.lo, r.hi, r.count}; }

NumericConfig numeric_config(const Options& o) {
  NumericConfig cfg;
  try {
    cfg = NumericConfig::from_environment();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  if (o.root_tol) cfg.root_tol = *o.root_tol;
  if (o.quad_abs_tol) cfg.quad_abs_tol = *o.quad_abs_tol;
  if (o.quad_rel_tol) cfg.quad_rel_tol = *o.quad_rel_tol;
  if (o.fd_step) cfg.fd_step = *o.fd_step;
  if (o.max_iterations) cfg.max_iterations = *o.max_iterations;
  try {
    cfg.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(std::string("tolerance flags: ") + e.what());
  }
  return cfg;
}

json config_json(const std::string& command, const Options& o, const Range& range, const NumericConfig& cfg,
                 const std::string& format, double shift) {
  json c;
  c["command"] = command;
  c["model"] = o.model;
  if (!o.model_file.empty()) c["model_file"] = o.model_file;
  c["n"] = o.n;
  c["t_range"] = {{"lo", range.lo}, {"hi", range.hi}, {"count", range.count}};
  c["x"] = o.x;
  c["shift"] = shift;
  c["embedding"] = o.embedding;
  c["format"] = format;
  c["output"] = o.output;
  c["tolerances"] = {{"quad_abs_tol", cfg.quad_abs_tol},
                     {"quad_rel_tol", cfg.quad_rel_tol},
                     {"root_tol", cfg.root_tol},
                     {"max_iterations", cfg.max_iterations},
                     {"fd_step", cfg.fd_step}};
  return c;
}

/// Numeric table with named columns; integers are kept exact in both formats.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<bool> integer_column;

  std::string csv() const {
    std::string s;
    for (std::size_t j = 0; j < columns.size(); ++j) s += (j ? "," : "") + columns[j];
    s += '\n';
    for (const auto& row : rows) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) s += ',';
        s += integer_column[j] ? std::to_string(static_cast<long long>(row[j])) : format_number(row[j]);
      }
      s += '\n';
    }
    return s;
  }

  json to_json() const {
    json rs = json::array();
    for (const auto& row : rows) {
      json r = json::array();
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (integer_column[j]) {
          r.push_back(static_cast<long long>(row[j]));
        } else if (std::isfinite(row[j])) {
          r.push_back(row[j]);
        } else {
          r.push_back(nullptr);
        }
      }
      rs.push_back(std::move(r));
    }
    return json{{"columns", columns}, {"rows", std::move(rs)}};
  }

  void add_column(std::string name, bool integer = false) {
    columns.push_back(std::move(name));
    integer_column.push_back(integer);
  }
};

void emit(const std::string& text, const Options& o, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.output, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open --output file '" + o.output + "'");
  file << text;
  if (!file) throw std::runtime_error("write to '" + o.output + "' failed");
}

std::string table_document(const Table& table, const std::string& format, json config, double timing_ms) {
  if (format == "csv") return table.csv();
  json doc{{"schema", "1"}, {"command", config["command"]}, {"config", std::move(config)}};
  json data = table.to_json();
  doc["columns"] = std::move(data["columns"]);
  doc["rows"] = std::move(data["rows"]);
  doc["timing_ms"] = timing_ms;
  return doc.dump(2) + "\n";
}

Vector spatial_point(const Options& o) {
  if (o.x.empty()) return Vector::Zero(o.n - 1);
  if (static_cast<int>(o.x.size()) != o.n - 1) {
    throw UsageError("--x: expected " + std::to_string(o.n - 1) + " value(s) for n = " + std::to_string(o.n));
  }
  Vector x(o.n - 1);
  for (int i = 0; i < o.n - 1; ++i) x(i) = o.x[i];
  return x;
}

double checked_shift(const Options& o, double fallback) {
  const double d = o.shift.value_or(fallback);
  if (!(d >= 0.0) || !std::isfinite(d)) throw UsageError("--shift: must be finite and >= 0");
  return d;
}

/// Shortest round-trip form, for messages; tables keep 17 significant digits.
std::string short_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string where_t(double t) { return "t = " + short_number(t); }

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

int cmd_embed(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const bool psi = o.embedding == "psi";
  const Range range = parse_range(o.t_range.empty() ? (psi ? "-0.5:5:100" : "-3:3:601") : o.t_range, 101);
  const NumericConfig cfg = numeric_config(o);
  const double shift = checked_shift(o, 0.0);
  const std::string format = o.format.empty() ? "csv" : o.format;
  const Vector x = spatial_point(o);
  const HyperbolaFamily family(shift);
  const EmbeddingMap map = psi ? psi_toy_map(o.n) : explicit_map(o.n, family, cfg);

  Table table;
  table.add_column("t");
  for (int i = 1; i < o.n; ++i) table.add_column("x" + std::to_string(i));
  table.add_column(psi ? "tau" : "theta");
  table.add_column(psi ? "y1" : "xi");
  for (int i = 2; i < o.n + 1; ++i) table.add_column("y" + std::to_string(i));

  const Grid1D grid = to_grid(range);
  for (int i = 0; i < grid.count; ++i) {
    const double t = grid.at(i);
    MinkowskiEvent e;
    try {
      e = map(ChartPoint(t, x));
    } catch (const Error& ex) {
      err << "embed: " << ex.what() << " (at " << where_t(t) << ")\n";
      return kFailure;
    }
    std::vector<double> row{t};
    for (int k = 0; k < x.size(); ++k) row.push_back(x(k));
    const Vector c = e.coords();
    for (int k = 0; k < c.size(); ++k) row.push_back(c(k));
    table.rows.push_back(std::move(row));
  }
  emit(table_document(table, format, config_json("embed", o, range, cfg, format, shift), elapsed_ms(start)), o, out);
  return kSuccess;
}

void add_misner_columns(Table& table) {
  table.add_column("T");
  table.add_column("phi");
  table.add_column("phi_raw");
  table.add_column("branch", true);
}

void push_misner(std::vector<double>& row, const MisnerCoordinates& m) {
  row.push_back(m.event.T);
  row.push_back(m.event.phi);
  row.push_back(m.phi_raw);
  row.push_back(static_cast<double>(m.branch));
}

int cmd_misner(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const bool psi = o.embedding == "psi";
  const NumericConfig cfg = numeric_config(o);
  const double shift = checked_shift(o, 1.0);
  const std::string format = o.format.empty() ? "csv" : o.format;
  Table table;
  Range range;

  if (!o.event.empty()) {
    if (o.event.size() < 2) throw UsageError("--event: need at least tau,y1");
    if (o.kmax < 0) throw UsageError("--kmax: must be >= 0");
    Vector y(o.event.size() - 1);
    for (std::size_t i = 1; i < o.event.size(); ++i) y(i - 1) = o.event[i];
    const MinkowskiEvent base(o.event[0], y);
    if (!in_region_R(base)) {
      err << "misner: event (tau, y1) = (" << short_number(base.tau) << ", " << short_number(base.y1())
          << ") lies outside the region y1 - tau > 0\n";
      return kFailure;
    }
    table.add_column("k", true);
    table.add_column("tau");
    for (int i = 1; i < base.dimension(); ++i) table.add_column("y" + std::to_string(i));
    add_misner_columns(table);
    const MisnerCoordinates base_misner = to_misner(base);
    for (int k = -o.kmax; k <= o.kmax; ++k) {
      const BoostSpec spec{std::numbers::pi, k};
      std::vector<double> row{static_cast<double>(k)};
      const Vector c = boost(base, spec).coords();
      for (int i = 0; i < c.size(); ++i) row.push_back(c(i));
      // The copy's Misner coordinates follow exactly from the base's; re-deriving them from
      // the boosted (tau, y1) would lose about e^{2 pi |k|} in accuracy.
      push_misner(row, boost(base_misner, spec));
      table.rows.push_back(std::move(row));
    }
  } else {
    range = parse_range(o.t_range.empty() ? (psi ? "-0.3:5:100" : "-3:3:601") : o.t_range, 101);
    const Vector x = spatial_point(o);
    const HyperbolaFamily family(shift);
    const EmbeddingSource source = psi ? EmbeddingSource::psi_toy : EmbeddingSource::explicit_embedding;
    table.add_column("t");
    for (int i = 1; i < o.n; ++i) table.add_column("x" + std::to_string(i));
    add_misner_columns(table);
    const Grid1D grid = to_grid(range);
    for (int i = 0; i < grid.count; ++i) {
      const double t = grid.at(i);
      MisnerCoordinates m;
      try {
        m = compose_embedding(ChartPoint(t, x), source, family, cfg);
      } catch (const RegionError& ex) {
        err << "misner: region violation at " << where_t(t) << ": image (tau, y1) = (" << short_number(ex.tau())
            << ", " << short_number(ex.y1()) << ") has y1 - tau <= 0\n";
        return kFailure;
      } catch (const Error& ex) {
        err << "misner: " << ex.what() << " (at " << where_t(t) << ")\n";
        return kFailure;
      }
      std::vector<double> row{t};
      for (int k = 0; k < x.size(); ++k) row.push_back(x(k));
      push_misner(row, m);
      table.rows.push_back(std::move(row));
    }
  }
  json config = config_json("misner", o, range, cfg, format, shift);
  if (!o.event.empty()) {
    config["event"] = o.event;
    config["kmax"] = o.kmax;
    config.erase("t_range");
  }
  emit(table_document(table, format, std::move(config), elapsed_ms(start)), o, out);
  return kSuccess;
}

MetricModel load_model_file(const std::string& path, int& n) {
  std::ifstream in(path);
  if (!in) throw UsageError("--model-file: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
    n = doc.at("dimension").get<int>();
    const auto block = doc.at("spatial_block").get<std::vector<std::vector<std::string>>>();
    return model_from_expressions(n, block);
  } catch (const json::exception& e) {
    throw UsageError("--model-file: '" + path + "': " + e.what());
  } catch (const PreconditionError& e) {
    throw UsageError("--model-file: '" + path + "': " + e.what());
  }
}

int cmd_verify(Options o, bool n_given, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Range range = parse_range(o.t_range.empty() ? "-0.99:10:200" : o.t_range, 200);
  const NumericConfig cfg = numeric_config(o);
  const double shift = checked_shift(o, 1.0);
  const std::string format = o.format.empty() ? "json" : o.format;
  if (!(o.perturb_f > 0.0)) throw UsageError("--perturb-f: must be positive");

  SuiteOptions suite;
  if (!o.model_file.empty() || o.model == "user") {
    if (o.model_file.empty()) throw UsageError("--model user needs --model-file");
    int file_n = 0;
    MetricModel model = load_model_file(o.model_file, file_n);
    if (n_given && file_n != o.n) {
      throw UsageError("--n: " + std::to_string(o.n) + " conflicts with dimension " + std::to_string(file_n) +
                       " in --model-file");
    }
    o.n = file_n;
    o.model = "user";
    suite.model = std::move(model);
  }
  suite.n = o.n;
  suite.t = to_grid(range);
  suite.shift = shift;
  suite.psi_f_scale = o.perturb_f;
  suite.cfg = cfg;

  std::vector<CheckResult> checks;
  try {
    checks = run_suite(suite);
  } catch (const Error& ex) {
    err << "verify: " << ex.what() << "\n";
    return kFailure;
  }

  json config = config_json("verify", o, range, cfg, format, shift);
  config["perturb_f"] = o.perturb_f;
  config["seed"] = suite.seed;
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    if (!c.pass) failed.push_back(c.name);
  }
  std::string text;
  if (format == "csv") {
    text = "name,pass,max_residual,threshold,bound,grid\n";
    for (const auto& c : checks) {
      text += c.name + "," + (c.pass ? "true" : "false") + "," + format_number(c.value) + "," +
              format_number(c.threshold) + "," + (c.bound == Bound::upper ? "upper" : "lower") + ",\"" + c.grid +
              "\"\n";
    }
  } else {
    json list = json::array();
    for (const auto& c : checks) {
      json j{{"name", c.name},
             {"pass", c.pass},
             {"max_residual", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
             {"grid", c.grid},
             {"threshold", c.threshold},
             {"bound", c.bound == Bound::upper ? "upper" : "lower"}};
      if (!c.detail.empty()) j["detail"] = c.detail;
      list.push_back(std::move(j));
    }
    json doc{{"schema", "1"}, {"command", "verify"}, {"config", std::move(config)}, {"checks", std::move(list)}};
    doc["timing_ms"] = elapsed_ms(start);
    text = doc.dump(2) + "\n";
  }
  emit(text, o, out);
  if (!failed.empty()) {
    err << "verify: failed check(s):";
    for (const auto& name : failed) err << " " << name;
    err << "\n";
    return kFailure;
  }
  return kSuccess;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Embeddings of signature-changing metrics into Minkowski and Misner space"};
  app.name(args.empty() ? "sigchange" : args.front());
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--model", o.model, "Metric model")->check(CLI::IsMember({"toy", "user"}));
    sub->add_option("--n", o.n, "Source dimension n (>= 2)")->check(CLI::Range(2, 64));
    sub->add_option("--t-range", o.t_range, "Time grid lo:hi[:count]");
    sub->add_option("--x", o.x, "Fixed spatial point x1,...,x(n-1)")->delimiter(',');
    sub->add_option("--shift", o.shift, "Hyperbola family shift d >= 0");
    sub->add_option("--root-tol", o.root_tol, "Root-finder relative tolerance");
    sub->add_option("--quad-abs-tol", o.quad_abs_tol, "Quadrature absolute tolerance");
    sub->add_option("--quad-rel-tol", o.quad_rel_tol, "Quadrature relative tolerance");
    sub->add_option("--fd-step", o.fd_step, "Base finite-difference step");
    sub->add_option("--max-iterations", o.max_iterations, "Iteration budget of the root finder");
    sub->add_option("--output", o.output, "Write to this file instead of standard output");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* embed = app.add_subcommand("embed", "Tabulate an embedding over a time grid");
  add_common(embed);
  embed->add_option("--embedding", o.embedding, "Embedding")->check(CLI::IsMember({"explicit", "psi"}));

  CLI::App* verify = app.add_subcommand("verify", "Run the verification suite and write a report");
  add_common(verify);
  verify->add_option("--model-file", o.model_file, "JSON model file with a spatial block");
  verify->add_option("--perturb-f", o.perturb_f, "Scale the temporal function (regression fixture)");

  CLI::App* misner = app.add_subcommand("misner", "Compose into Misner space or list orbit copies");
  add_common(misner);
  misner->add_option("--embedding", o.embedding, "Embedding")->check(CLI::IsMember({"explicit", "psi"}));
  misner->add_option("--event", o.event, "Minkowski event tau,y1,... whose orbit copies to list")->delimiter(',');
  misner->add_option("--kmax", o.kmax, "Orbit copies k = -kmax..kmax");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (embed->parsed()) return cmd_embed(o, out, err);
    if (misner->parsed()) return cmd_misner(o, out, err);
    return cmd_verify(o, verify->count("--n") > 0, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace sigchange::cli
