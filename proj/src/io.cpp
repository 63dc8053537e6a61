#include "imprint/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "imprint/errors.hpp"

namespace imprint::io {

namespace {

const char* const kHeader[] = {"type", "m", "f", "c", "n1", "n0", "sn1", "sn0"};

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

long parse_long(const std::string& tok, const std::string& source, std::size_t line,
                const char* column) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) {
    throw ParseError(source, line, std::string("column ") + column + ": '" + tok + "' is not an integer");
  }
  return v;
}

}  // namespace

std::string format_counts(const FamilyCounts& y) {
  std::ostringstream os;
  for (std::size_t i = 0; i < std::size(kHeader); ++i) os << (i ? "\t" : "") << kHeader[i];
  os << '\n';
  for (const auto& t : trio_types()) {
    const auto k = static_cast<std::size_t>(t.index - 1);
    os << t.index << '\t' << t.mother << '\t' << t.father << '\t' << t.child
       << '\t' << y.n1[k] << '\t' << y.n0[k] << '\t' << y.sn1[k] << '\t' << y.sn0[k] << '\n';
  }
  return os.str();
}

FamilyCounts parse_counts(std::istream& in, const std::string& source) {
  FamilyCounts y;
  bool header_seen = false;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t last_line = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto toks = split(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    last_line = line_no;
    if (!header_seen) {
      bool ok = toks.size() == std::size(kHeader);
      for (std::size_t i = 0; ok && i < toks.size(); ++i) ok = toks[i] == kHeader[i];
      if (!ok) throw ParseError(source, line_no, "expected header 'type m f c n1 n0 sn1 sn0'");
      header_seen = true;
      continue;
    }
    if (toks.size() != std::size(kHeader)) {
      throw ParseError(source, line_no,
                       "expected 8 columns, found " + std::to_string(toks.size()));
    }
    if (rows >= static_cast<std::size_t>(kTrioTypes)) {
      throw ParseError(source, line_no, "more than 15 data rows");
    }
    long v[8];
    for (std::size_t i = 0; i < 8; ++i) v[i] = parse_long(toks[i], source, line_no, kHeader[i]);
    const TrioType& t = trio_types()[rows];
    if (v[0] != t.index || v[1] != t.mother || v[2] != t.father ||
        v[3] != t.child) {
      throw ParseError(source, line_no,
                       "row " + std::to_string(rows + 1) + " must be type " + std::to_string(t.index) +
                           " (m=" + std::to_string(t.mother) + " f=" +
                           std::to_string(t.father) + " c=" + std::to_string(t.child) +
                           ")");
    }
    for (std::size_t i = 4; i < 8; ++i) {
      if (v[i] < 0) throw ParseError(source, line_no, std::string("negative count in column ") + kHeader[i]);
    }
    y.n1[rows] = v[4];
    y.n0[rows] = v[5];
    y.sn1[rows] = v[6];
    y.sn0[rows] = v[7];
    ++rows;
  }
  if (!header_seen) throw ParseError(source, line_no, "empty counts file");
  if (rows != static_cast<std::size_t>(kTrioTypes)) {
    throw ParseError(source, last_line,
                     "expected 15 data rows, found " + std::to_string(rows));
  }
  return y;
}

FamilyCounts read_counts_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open counts file " + path.string());
  return parse_counts(in, path.string());
}

void write_counts_file(const std::filesystem::path& path, const FamilyCounts& y) {
  write_file_atomic(path, format_counts(y));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const DiseaseModel& theta) {
  Json j = Json::object();
  for (int i = 0; i < kParameters; ++i) {
    const auto p = static_cast<Parameter>(i);
    j[std::string(parameter_name(p))] = theta.get(p);
  }
  return j;
}

DiseaseModel disease_model_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("disease model must be a JSON object");
  DiseaseModel theta;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("disease model entry '" + key + "' must be a number");
    Parameter p{};
    if (!parse_parameter(key, p)) throw ConfigError("unknown disease model parameter '" + key + "'");
    theta.set(p, value.get<double>());
  }
  return theta;
}

Json to_json(const DirichletParams& alpha) {
  Json j = Json::array();
  for (double a : alpha.alpha) j.push_back(a);
  return j;
}

Json to_json(const FitSummary& s) {
  return Json{{"theta", to_json(s.theta)},
              {"alpha", to_json(s.alpha)},
              {"q_data_term", s.q_data_term},
              {"q_latent_term", s.q_latent_term},
              {"converged", s.converged},
              {"iterations_used", s.iterations_used},
              {"mean_acceptance", s.mean_acceptance},
              {"ascent_violations", s.ascent_violations},
              {"fixed", s.mask},
              {"warnings", s.warnings}};
}

Json to_json(const TestResult& r) {
  Json levels = Json::array();
  for (const auto& [level, reject] : r.reject_at) levels.push_back(Json{{"level", level}, {"reject", reject}});
  return Json{{"test", test_name(r.kind)},
              {"form", statistic_form_name(r.form)},
              {"statistic", r.statistic},
              {"raw_statistic", r.raw_statistic},
              {"clamped", r.clamped},
              {"df", r.df},
              {"p_value", r.p_value},
              {"decisions", levels},
              {"compared_at_iteration", r.compared_at_iteration},
              {"null_fit", to_json(r.null_fit)},
              {"alt_fit", to_json(r.alt_fit)},
              {"diagnostics", r.diagnostics}};
}

Json fit_report(const McemFit& fit) {
  Json j = to_json(FitSummary::of(fit));
  j["acceptance_rates"] = fit.acceptance_rates;
  Json trace = Json::array();
  for (const auto& rec : fit.trace) {
    trace.push_back(Json{{"iteration", rec.iteration},
                         {"theta", to_json(rec.theta)},
                         {"alpha_sum", rec.alpha_sum},
                         {"q_before", rec.q_before},
                         {"q_after", rec.q_after},
                         {"acceptance_rate", rec.acceptance_rate},
                         {"lag1_autocorrelation", rec.lag1_autocorrelation},
                         {"change", rec.change},
                         {"ascent_holds", rec.ascent_holds}});
  }
  j["trace"] = std::move(trace);
  return j;
}

namespace {

void write_theta(std::ostream& os, const DiseaseModel& theta) {
  for (int i = 0; i < kParameters; ++i) {
    const auto p = static_cast<Parameter>(i);
    os << "  " << std::left << std::setw(6) << parameter_name(p) << std::setprecision(6)
       << theta.get(p) << '\n';
  }
}

}  // namespace

std::string fit_report_text(const McemFit& fit) {
  const FitSummary s = FitSummary::of(fit);
  std::ostringstream os;
  os << "MCEM fit (fixed: " << s.mask << ")\n";
  os << "converged: " << (s.converged ? "yes" : "no") << " after " << s.iterations_used
     << " iterations\n";
  os << "estimates:\n";
  write_theta(os, s.theta);
  os << "alpha:";
  for (double a : s.alpha.alpha) os << ' ' << std::setprecision(6) << a;
  os << "\nQ data term: " << std::setprecision(10) << s.q_data_term
     << "\nQ latent term: " << s.q_latent_term << '\n';
  os << "mean acceptance rate: " << std::setprecision(4) << s.mean_acceptance << '\n';
  os << "ascent violations: " << s.ascent_violations << '\n';
  for (const auto& w : s.warnings) os << "warning: " << w << '\n';
  return os.str();
}

std::string test_report_text(const std::vector<TestResult>& results) {
  std::ostringstream os;
  os << std::left << std::setw(13) << "test" << std::setw(12) << "statistic" << std::setw(5) << "df"
     << std::setw(12) << "p-value" << "decision\n";
  for (const auto& r : results) {
    os << std::setw(13) << test_name(r.kind) << std::setw(12) << std::setprecision(5) << r.statistic
       << std::setw(5) << r.df << std::setw(12) << std::setprecision(4) << r.p_value;
    bool first = true;
    for (const auto& [level, reject] : r.reject_at) {
      os << (first ? "" : ", ") << (reject ? "reject" : "fail to reject") << " at " << level;
      first = false;
    }
    os << '\n';
    for (const auto& d : r.diagnostics) os << "  note: " << d << '\n';
  }
  return os.str();
}

}  // namespace imprint::io
