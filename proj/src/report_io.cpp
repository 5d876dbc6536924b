#include "wsaa/error.hpp"
#include "wsaa/harness.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

namespace wsaa {

namespace {

using nlohmann::json;

constexpr const char* kColumns[] = { "schema_version", "grid_index",         "rep_id",
                                     "gamma",          "n",                  "m",
                                     "h",              "estimate",           "f_star",
                                     "lower",          "upper",              "half_width",
                                     "covered",        "optimization_error", "statistical_error",
                                     "solver_iterations", "elapsed_ms",      "failed",
                                     "failure" };
constexpr std::size_t kNumColumns = sizeof(kColumns) / sizeof(kColumns[0]);

void
put(std::ostream& out, double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

void
put_text(std::ostream& out, const std::string& s)
{
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"')
      out << '"';
    out << (c == '\n' || c == '\r' ? ' ' : c);
  }
  out << '"';
}

std::vector<std::string>
split_csv(const std::string& line)
{
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  return fields;
}

double
get_double(const std::string& s, std::size_t line)
{
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("records line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::uint64_t
get_uint(const std::string& s, std::size_t line)
{
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("records line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

json
finite_or_null(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json
vec(const Eigen::VectorXd& v)
{
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    a.push_back(v[i]);
  return a;
}

} // namespace

void
write_records_csv(const std::vector<ReplicationRecord>& records, std::ostream& out)
{
  for (std::size_t c = 0; c < kNumColumns; ++c)
    out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& r : records) {
    out << kRecordsSchemaVersion << ',' << r.grid_index << ',' << r.rep_id << ',' << r.gamma << ',' << r.n << ','
        << r.m << ',';
    put(out, r.h);
    for (double v : { r.estimate, r.f_star, r.lower, r.upper, r.half_width }) {
      out << ',';
      put(out, v);
    }
    out << ',' << (r.covered ? 1 : 0) << ',';
    put(out, r.optimization_error);
    out << ',';
    put(out, r.statistical_error);
    out << ',' << r.solver_iterations << ',';
    put(out, r.elapsed_ms);
    out << ',' << (r.failed ? 1 : 0) << ',';
    put_text(out, r.failure);
    out << '\n';
  }
}

std::vector<ReplicationRecord>
read_records_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line))
    throw InvalidArgument("records file is empty");
  const auto header = split_csv(line);
  if (header.size() != kNumColumns)
    throw InvalidArgument("records header has " + std::to_string(header.size()) + " columns, expected " +
                          std::to_string(kNumColumns));
  for (std::size_t c = 0; c < kNumColumns; ++c)
    if (header[c] != kColumns[c])
      throw InvalidArgument("records header column " + std::to_string(c) + " is '" + header[c] + "', expected '" +
                            kColumns[c] + "'");

  std::vector<ReplicationRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    const auto f = split_csv(line);
    if (f.size() != kNumColumns)
      throw InvalidArgument("records line " + std::to_string(line_no) + " has the wrong number of fields");
    if (get_uint(f[0], line_no) != static_cast<std::uint64_t>(kRecordsSchemaVersion))
      throw InvalidArgument("records line " + std::to_string(line_no) + ": unsupported schema version " + f[0]);
    ReplicationRecord r;
    r.grid_index = get_uint(f[1], line_no);
    r.rep_id = get_uint(f[2], line_no);
    r.gamma = get_uint(f[3], line_no);
    r.n = get_uint(f[4], line_no);
    r.m = get_uint(f[5], line_no);
    r.h = get_double(f[6], line_no);
    r.estimate = get_double(f[7], line_no);
    r.f_star = get_double(f[8], line_no);
    r.lower = get_double(f[9], line_no);
    r.upper = get_double(f[10], line_no);
    r.half_width = get_double(f[11], line_no);
    r.covered = get_uint(f[12], line_no) != 0;
    r.optimization_error = get_double(f[13], line_no);
    r.statistical_error = get_double(f[14], line_no);
    r.solver_iterations = get_uint(f[15], line_no);
    r.elapsed_ms = get_double(f[16], line_no);
    r.failed = get_uint(f[17], line_no) != 0;
    r.failure = f[18];
    out.push_back(std::move(r));
  }
  return out;
}

void
write_summary_json(const ExperimentSummary& s, std::ostream& out)
{
  json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["name"] = s.name;
  j["mode"] = s.budgeted ? "budgeted" : "unconstrained";
  j["x0"] = vec(s.x0);
  j["oracle"] = { { "z_star", vec(s.oracle.z) },
                  { "f_star", s.oracle.f },
                  { "std_error", s.oracle.std_error },
                  { "samples", s.oracle.samples } };
  j["theoretical_rate"] = finite_or_null(s.theoretical_rate);
  j["slope"] = finite_or_null(s.slope);
  j["slope_stderr"] = finite_or_null(s.slope_stderr);
  j["degraded"] = s.degraded;
  j["warnings"] = s.warnings;

  json grid = json::array();
  for (const auto& g : s.grid) {
    const GridPoint& p = g.point;
    json e;
    e["index"] = p.index;
    e["gamma"] = p.gamma;
    e["n"] = p.n;
    e["m"] = p.m;
    e["h0"] = p.h0;
    e["h"] = p.h;
    if (p.plan) {
      e["kappa_star"] = p.plan->kappa_star;
      e["kappa_used"] = p.plan->kappa_used;
      e["rate_exponent"] = finite_or_null(p.plan->rate_exponent);
    }
    if (p.solver) {
      e["algorithm"] = algorithm_name(p.solver->algorithm);
      if (const auto* sg = std::get_if<SubgradientMethod>(&p.solver->algorithm))
        e["mu0"] = sg->mu0;
      e["z0"] = vec(p.solver->z0);
    }
    if (p.cv_score)
      e["cv_score"] = finite_or_null(*p.cv_score);
    e["replications"] = g.replications;
    e["failures"] = g.failures;
    e["coverage"] = finite_or_null(g.coverage);
    e["rel_width_mean"] = finite_or_null(g.rel_width_mean);
    e["rel_width_sd"] = finite_or_null(g.rel_width_sd);
    e["rel_rmse"] = finite_or_null(g.rel_rmse);
    e["mean_estimate"] = finite_or_null(g.mean_estimate);
    e["mean_optimization_error"] = finite_or_null(g.mean_optimization_error);
    e["mean_statistical_error"] = finite_or_null(g.mean_statistical_error);
    e["ks_statistic"] = finite_or_null(g.ks_statistic);
    e["ks_p_value"] = finite_or_null(g.ks_p_value);
    e["degraded"] = g.degraded;
    grid.push_back(std::move(e));
  }
  j["grid"] = std::move(grid);
  if (!s.config_source.empty())
    j["config"] = json::parse(s.config_source);
  out << j.dump(2) << '\n';
}

void
write_experiment_outputs(const ExperimentResult& result, const std::string& dir)
{
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  std::ofstream rec(base / "records.csv", std::ios::binary);
  if (!rec)
    throw Error("cannot write " + (base / "records.csv").string());
  write_records_csv(result.records, rec);
  std::ofstream sum(base / "summary.json", std::ios::binary);
  if (!sum)
    throw Error("cannot write " + (base / "summary.json").string());
  write_summary_json(result.summary, sum);
}

} // namespace wsaa
