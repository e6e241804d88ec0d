#include "hettrans/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hettrans/errors.hpp"

namespace hettrans {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t column) {
  double v = 0.0;
  const char* first = cell.data();
  if (!cell.empty() && cell.front() == '+') ++first;
  const auto [end, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size())
    throw ParseError(row, column, "not a number: '" + std::string(cell) + "'");
  if (!std::isfinite(v)) throw ParseError(row, column, "non-finite value");
  return v;
}

std::ofstream open_out(const fs::path& dir, const char* name) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "no such directory: " + dir.string());
  std::ofstream out(dir / name);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
  out.precision(17);
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
  }
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json interval(const std::optional<Interval>& v) {
  return v ? json::array({v->lo, v->hi}) : json(nullptr);
}

std::optional<Interval> interval_get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return Interval{j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()};
}

}  // namespace

Dataset read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw ParseError(0, 0, "empty file");
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "y")
    throw ParseError(1, 1, "header must read y,x1,...,xd");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j))
      throw ParseError(1, j + 1, "expected column x" + std::to_string(j));
  }
  const std::size_t dim = header.size() - 1;
  std::vector<double> y;
  std::vector<double> x;
  std::size_t row = 1;
  std::size_t blank_run = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      ++blank_run;
      continue;
    }
    if (blank_run > 0) throw ParseError(row - blank_run, 1, "blank line inside the data");
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError(row, std::min(cells.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " columns");
    y.push_back(parse_cell(cells[0], row, 1));
    for (std::size_t j = 1; j < cells.size(); ++j) x.push_back(parse_cell(cells[j], row, j + 1));
  }
  return Dataset(std::move(y), std::move(x), dim);
}

FitSummary summarize(const FitResult& r, const FitOptions& opts, std::size_t n) {
  FitSummary s;
  s.n = n;
  s.dim = r.weight.dim();
  s.bandwidths = r.bandwidths;
  s.y1 = opts.y1;
  s.y2 = opts.y2;
  s.c_t = opts.c_t;
  s.b_method = opts.b_method == BMethod::Msd ? "msd" : "tilde";
  s.grid_size = r.lambda.grid().size();
  s.n_x = opts.lambda.n_x;
  s.y0_hat = r.components.y0_hat;
  s.b_tilde = r.components.b_tilde;
  s.b_tilde_suspicious = r.components.b_tilde_suspicious();
  s.alpha2_hat = r.components.alpha2_hat;
  s.t_n = r.components.t_n;
  s.var_y0 = r.components.var_y0;
  s.var_b_tilde = r.components.var_b_tilde;
  if (r.msd) {
    s.b_hat = r.msd->b_hat;
    s.a_min = r.msd->a_min;
  }
  if (r.msd_config) {
    s.m_x = r.msd_config->m_x;
    s.e_range = r.msd_config->e_range;
  }
  s.b_used = r.transform.b();
  s.dropped_points = r.lambda.dropped_points();
  return s;
}

void write_report(const FitResult& result, const FitOptions& opts, std::size_t n,
                  const fs::path& dir, std::size_t curve_points) {
  const FitSummary s = summarize(result, opts, n);
  json j = {
      {"command", "fit"},
      {"config",
       {{"n", s.n},
        {"dim", s.dim},
        {"h_y", s.bandwidths.h_y},
        {"h_x", s.bandwidths.h_x},
        {"y1", s.y1},
        {"y2", s.y2},
        {"c_t", s.c_t},
        {"b_method", s.b_method},
        {"grid_size", s.grid_size},
        {"n_x", s.n_x}}},
      {"estimates",
       {{"y0_hat", s.y0_hat},
        {"b_tilde", s.b_tilde},
        {"b_tilde_suspicious", s.b_tilde_suspicious},
        {"alpha2_hat", s.alpha2_hat},
        {"t_n", s.t_n},
        {"b_hat", opt(s.b_hat)},
        {"a_min", opt(s.a_min)},
        {"b_used", s.b_used}}},
      {"variances", {{"y0_hat", opt(s.var_y0)}, {"b_tilde", opt(s.var_b_tilde)}}},
      {"msd_region", {{"m_x", interval(s.m_x)}, {"e_range", interval(s.e_range)}}},
      {"diagnostics", {{"dropped_points", s.dropped_points}}},
  };
  auto report = open_out(dir, "report.json");
  report << j.dump(2) << '\n';

  const auto& t = result.transform;
  auto h = open_out(dir, "h_curve.csv");
  h << "y,h\n";
  for (double y : linspace(t.lo(), t.hi(), curve_points)) h << y << ',' << t(y) << '\n';

  auto lam = open_out(dir, "lambda_curve.csv");
  lam << "y,lambda\n";
  const auto& grid = result.lambda.grid();
  const auto& values = result.lambda.values();
  for (std::size_t i = 0; i < grid.size(); ++i) lam << grid[i] << ',' << values[i] << '\n';
  if (!report || !h || !lam) throw Error(ErrorCode::IoError, "write failed in " + dir.string());
}

FitSummary read_fit_summary(const fs::path& report_json) {
  const json j = read_json(report_json);
  FitSummary s;
  try {
    const auto& c = j.at("config");
    s.n = c.at("n");
    s.dim = c.at("dim");
    s.bandwidths = {c.at("h_y"), c.at("h_x")};
    s.y1 = c.at("y1");
    s.y2 = c.at("y2");
    s.c_t = c.at("c_t");
    s.b_method = c.at("b_method");
    s.grid_size = c.at("grid_size");
    s.n_x = c.at("n_x");
    const auto& e = j.at("estimates");
    s.y0_hat = e.at("y0_hat");
    s.b_tilde = e.at("b_tilde");
    s.b_tilde_suspicious = e.at("b_tilde_suspicious");
    s.alpha2_hat = e.at("alpha2_hat");
    s.t_n = e.at("t_n");
    s.b_hat = opt_get<double>(e, "b_hat");
    s.a_min = opt_get<double>(e, "a_min");
    s.b_used = e.at("b_used");
    s.var_y0 = opt_get<double>(j.at("variances"), "y0_hat");
    s.var_b_tilde = opt_get<double>(j.at("variances"), "b_tilde");
    s.m_x = interval_get(j.at("msd_region"), "m_x");
    s.e_range = interval_get(j.at("msd_region"), "e_range");
    s.dropped_points = j.at("diagnostics").at("dropped_points");
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::IoError, report_json.string() + ": " + ex.what());
  }
  return s;
}

void write_report(const sim::SimReport& r, const fs::path& dir) {
  const auto& c = r.config;
  json reps = json::array();
  for (const auto& p : r.reps) {
    reps.push_back({{"rep", p.rep},
                    {"seed", p.seed},
                    {"ok", p.ok},
                    {"failure", p.failure},
                    {"h_y", p.h_y},
                    {"h_x", p.h_x},
                    {"y0_hat", p.y0_hat},
                    {"b_tilde", p.b_tilde},
                    {"alpha2_hat", p.alpha2_hat},
                    {"t_n", p.t_n},
                    {"mise", p.mise}});
  }
  auto moments = [](const sim::Moments& m) { return json{{"mean", m.mean}, {"sd", m.sd}}; };
  json j = {
      {"command", "simulate"},
      {"config",
       {{"n", c.n},
        {"reps", c.reps},
        {"seed", c.seed},
        {"y1", c.y1},
        {"y2", c.y2},
        {"c_t", c.c_t},
        {"n_x", c.n_x},
        {"h_y", c.bandwidths ? json(c.bandwidths->h_y) : json(nullptr)},
        {"h_x", c.bandwidths ? json(c.bandwidths->h_x) : json(nullptr)},
        {"grid_size", c.grid_size},
        {"mise_points", c.mise_points},
        {"threads", c.threads}}},
      {"succeeded", r.succeeded},
      {"failures", r.failures},
      {"means",
       {{"y0_hat", moments(r.y0_hat)},
        {"b_tilde", moments(r.b_tilde)},
        {"alpha2_hat", moments(r.alpha2_hat)},
        {"mise", moments(r.mise)}}},
      {"qq", {{"y0_hat", r.qq_y0}, {"b_tilde", r.qq_b_tilde}}},
      {"reps", reps},
  };
  auto report = open_out(dir, "report.json");
  report << j.dump(2) << '\n';

  auto per_rep = open_out(dir, "per_rep.csv");
  per_rep << "rep,seed,ok,failure,h_y,h_x,y0_hat,b_tilde,alpha2_hat,t_n,mise\n";
  for (const auto& p : r.reps) {
    per_rep << p.rep << ',' << p.seed << ',' << (p.ok ? 1 : 0) << ',' << p.failure << ',' << p.h_y
            << ',' << p.h_x << ',' << p.y0_hat << ',' << p.b_tilde << ',' << p.alpha2_hat << ','
            << p.t_n << ',' << p.mise << '\n';
  }

  auto qq = open_out(dir, "qq.csv");
  qq << "estimator,normal_quantile,standardized\n";
  for (const auto& [a, b] : r.qq_y0) qq << "y0_hat," << a << ',' << b << '\n';
  for (const auto& [a, b] : r.qq_b_tilde) qq << "b_tilde," << a << ',' << b << '\n';
  if (!report || !per_rep || !qq) throw Error(ErrorCode::IoError, "write failed in " + dir.string());
}

sim::SimReport read_sim_report(const fs::path& report_json) {
  const json j = read_json(report_json);
  sim::SimReport r;
  try {
    const auto& c = j.at("config");
    r.config.n = c.at("n");
    r.config.reps = c.at("reps");
    r.config.seed = c.at("seed");
    r.config.y1 = c.at("y1");
    r.config.y2 = c.at("y2");
    r.config.c_t = c.at("c_t");
    r.config.n_x = c.at("n_x");
    if (!c.at("h_y").is_null()) r.config.bandwidths = Bandwidths{c.at("h_y"), c.at("h_x")};
    r.config.grid_size = c.at("grid_size");
    r.config.mise_points = c.at("mise_points");
    r.config.threads = c.at("threads");
    r.succeeded = j.at("succeeded");
    r.failures = j.at("failures").get<std::map<std::string, std::size_t>>();
    auto moments = [](const json& m) { return sim::Moments{m.at("mean"), m.at("sd")}; };
    const auto& m = j.at("means");
    r.y0_hat = moments(m.at("y0_hat"));
    r.b_tilde = moments(m.at("b_tilde"));
    r.alpha2_hat = moments(m.at("alpha2_hat"));
    r.mise = moments(m.at("mise"));
    r.qq_y0 = j.at("qq").at("y0_hat").get<std::vector<std::pair<double, double>>>();
    r.qq_b_tilde = j.at("qq").at("b_tilde").get<std::vector<std::pair<double, double>>>();
    for (const auto& p : j.at("reps")) {
      sim::RepResult q;
      q.rep = p.at("rep");
      q.seed = p.at("seed");
      q.ok = p.at("ok");
      q.failure = p.at("failure");
      q.h_y = p.at("h_y");
      q.h_x = p.at("h_x");
      q.y0_hat = p.at("y0_hat");
      q.b_tilde = p.at("b_tilde");
      q.alpha2_hat = p.at("alpha2_hat");
      q.t_n = p.at("t_n");
      q.mise = p.at("mise");
      r.reps.push_back(std::move(q));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::IoError, report_json.string() + ": " + ex.what());
  }
  return r;
}

}  // namespace hettrans
