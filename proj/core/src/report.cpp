#include "rankone/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rankone/error.hpp"

namespace rankone {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

namespace {

std::string str(Index v) { return std::to_string(v); }

json series_json(const std::vector<ErrorSeries>& series) {
  json j = json::array();
  for (const auto& s : series) j.push_back({{"label", s.label}, {"median", s.median()}, {"errors", s.errors}});
  return j;
}

Table series_summary(const std::vector<ErrorSeries>& series) {
  Table t{{"series", "median", "min", "max"}, {}};
  for (const auto& s : series) {
    double lo = INFINITY, hi = -INFINITY;
    for (double e : s.errors) lo = std::min(lo, e), hi = std::max(hi, e);
    t.rows.push_back({s.label, format_double(s.median()), format_double(lo), format_double(hi)});
  }
  return t;
}

Table series_trials(const std::vector<ErrorSeries>& series, const std::vector<std::uint64_t>& seeds) {
  Table t{{"trial", "seed"}, {}};
  for (const auto& s : series) t.header.push_back(s.label);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    std::vector<std::string> row{std::to_string(k), std::to_string(seeds[k])};
    for (const auto& s : series) row.push_back(format_double(s.errors[k]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

ExperimentReport make_report(const SuccessTable& table, const std::string& name) {
  ExperimentReport rep;
  rep.name = name;
  std::vector<std::string> solvers;
  for (const auto& c : table.cells)
    for (const auto& [s, count] : c.successes)
      if (std::find(solvers.begin(), solvers.end(), s) == solvers.end()) solvers.push_back(s);
  rep.summary.header = {"cell", "n", "N"};
  rep.summary.header.insert(rep.summary.header.end(), solvers.begin(), solvers.end());
  rep.trials.header = {"cell", "trial", "seed", "solver", "error", "iterations"};
  json cells = json::array();
  for (const auto& c : table.cells) {
    std::vector<std::string> row{c.label, str(c.n), str(c.big_n)};
    for (const auto& s : solvers) {
      auto it = c.successes.find(s);
      row.push_back(it == c.successes.end() ? "" : std::to_string(it->second));
    }
    rep.summary.rows.push_back(std::move(row));
    for (const auto& [s, errs] : c.errors)
      for (std::size_t k = 0; k < errs.size(); ++k)
        rep.trials.rows.push_back({c.label, std::to_string(k), std::to_string(c.seeds[k]), s,
                                   format_double(errs[k]), std::to_string(c.iterations.at(s)[k])});
    cells.push_back({{"label", c.label}, {"n", c.n}, {"N", c.big_n}, {"successes", c.successes}});
  }
  rep.json = json{{"experiment", name}, {"trials", table.trials}, {"wall_seconds", table.wall_seconds},
                  {"cells", cells}}.dump(2);
  return rep;
}

ExperimentReport make_report(const NoiseResult& r) {
  ExperimentReport rep{"noise", series_summary(r.series), series_trials(r.series, r.seeds), "", {}};
  rep.trials.header.push_back("snr_db");
  for (std::size_t k = 0; k < rep.trials.rows.size(); ++k) rep.trials.rows[k].push_back(format_double(r.realized_snr[k]));
  rep.json = json{{"experiment", "noise"}, {"wall_seconds", r.wall_seconds}, {"series", series_json(r.series)},
                  {"realized_snr", r.realized_snr}}.dump(2);
  return rep;
}

ExperimentReport make_report(const FailureResult& r) {
  ExperimentReport rep;
  rep.name = "failure";
  rep.summary = {{"system", "failures", "trials"},
                 {{"plain", std::to_string(r.plain_failures), std::to_string(r.seeds.size())},
                  {"rescaled", std::to_string(r.rescaled_failures), std::to_string(r.seeds.size())}}};
  rep.trials.header = {"trial", "seed", "plain_residual", "rescaled_residual", "plain_monotone", "rescaled_monotone"};
  for (std::size_t k = 0; k < r.seeds.size(); ++k)
    rep.trials.rows.push_back({std::to_string(k), std::to_string(r.seeds[k]), format_double(r.plain_residual[k]),
                               format_double(r.rescaled_residual[k]), r.plain_monotone[k] ? "1" : "0",
                               r.rescaled_monotone[k] ? "1" : "0"});
  // Residual curves of every trial, one row per iteration.
  Table curves{{"trial", "iter", "plain", "rescaled"}, {}};
  for (std::size_t k = 0; k < r.seeds.size(); ++k)
    for (std::size_t i = 0; i < r.plain_traces[k].size(); ++i)
      curves.rows.push_back({std::to_string(k), std::to_string(i), format_double(r.plain_traces[k][i]),
                             i < r.rescaled_traces[k].size() ? format_double(r.rescaled_traces[k][i]) : ""});
  rep.extras["failure_traces.csv"] = curves.to_csv();
  rep.json = json{{"experiment", "failure"}, {"wall_seconds", r.wall_seconds}, {"plain_failures", r.plain_failures},
                  {"rescaled_failures", r.rescaled_failures}, {"plain_residual", r.plain_residual},
                  {"rescaled_residual", r.rescaled_residual}}.dump(2);
  return rep;
}

ExperimentReport make_report(const SelectionResult& r) {
  ExperimentReport rep{"selection", series_summary(r.series), series_trials(r.series, r.seeds), "", {}};
  rep.json = json{{"experiment", "selection"}, {"wall_seconds", r.wall_seconds}, {"series", series_json(r.series)}}
                 .dump(2);
  return rep;
}

ExperimentReport make_report(const SpectralStudy& r) {
  const std::vector<ErrorSeries> series = {{"x_min", r.xmin_error},
                                           {"random", r.random_error},
                                           {"sign_recovery", r.sign_recovery_error},
                                           {"altmin_from_x_min", r.altmin_from_xmin},
                                           {"altmin_from_random", r.altmin_from_random},
                                           {"closeness_slack", r.closeness_slack}};
  ExperimentReport rep{"spectral-init", series_summary(series), series_trials(series, r.seeds), "", {}};
  rep.json = json{{"experiment", "spectral-init"}, {"wall_seconds", r.wall_seconds}, {"series", series_json(series)}}
                 .dump(2);
  return rep;
}

ExperimentReport make_report(const FourierResult& r) {
  ExperimentReport rep;
  rep.name = "fourier";
  std::vector<Index> ranks;
  for (const auto& t : r.trials)
    for (const auto& [rank, e] : t.error)
      if (std::find(ranks.begin(), ranks.end(), rank) == ranks.end()) ranks.push_back(rank);
  rep.trials.header = {"trial", "seed", "illumination", "snr_db"};
  for (Index rank : ranks) {
    rep.trials.header.push_back("error_r" + str(rank));
    rep.trials.header.push_back("residual_r" + str(rank));
  }
  std::vector<ErrorSeries> series;
  for (Index rank : ranks) series.push_back({"r=" + str(rank), {}});
  json trials = json::array();
  for (std::size_t k = 0; k < r.trials.size(); ++k) {
    const auto& t = r.trials[k];
    std::vector<std::string> row{std::to_string(k), std::to_string(t.seed), t.illumination, format_double(t.snr_db)};
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      row.push_back(format_double(t.error.at(ranks[i])));
      row.push_back(format_double(t.residual.at(ranks[i])));
      series[i].errors.push_back(t.error.at(ranks[i]));
    }
    rep.trials.rows.push_back(std::move(row));
    json e;
    for (const auto& [rank, v] : t.error) e[str(rank)] = v;
    trials.push_back({{"seed", t.seed}, {"illumination", t.illumination}, {"snr_db", t.snr_db}, {"error", e}});
  }
  rep.summary = series_summary(series);
  rep.json = json{{"experiment", "fourier"}, {"side", r.side}, {"padded", r.padded}, {"wall_seconds", r.wall_seconds},
                  {"trials", trials}}.dump(2);
  return rep;
}

ExperimentReport make_report(const StandardizeStudy& r) {
  ExperimentReport rep;
  rep.name = "standardize-demo";
  rep.trials.header = {"N", "n", "converged", "iterations", "defect", "agreement", "worst_increase", "monotone"};
  json trials = json::array();
  double worst_defect = 0, worst_agree = 0;
  int monotone = 0, converged = 0;
  for (const auto& t : r.trials) {
    rep.trials.rows.push_back({str(t.big_n), str(t.n), t.converged ? "1" : "0", std::to_string(t.iterations),
                               format_double(t.defect), format_double(t.agreement), format_double(t.worst_increase),
                               t.monotone ? "1" : "0"});
    converged += t.converged;
    if (!t.converged) continue;
    monotone += t.monotone;
    worst_defect = std::max(worst_defect, t.defect);
    worst_agree = std::max(worst_agree, t.agreement);
  }
  rep.summary = {{"trials", "converged", "monotone", "worst_defect", "worst_agreement"},
                 {{std::to_string(r.trials.size()), std::to_string(converged), std::to_string(monotone),
                   format_double(worst_defect), format_double(worst_agree)}}};
  rep.json = json{{"experiment", "standardize-demo"}, {"wall_seconds", r.wall_seconds}, {"converged", converged},
                  {"monotone", monotone}, {"worst_defect", worst_defect}, {"worst_agreement", worst_agree}}.dump(2);
  return rep;
}

std::string to_pgm(const RealVector& image, Index height, Index width) {
  require(image.size() == height * width, "to_pgm: image size does not match height * width");
  const double lo = image.minCoeff();
  const double span = std::max(image.maxCoeff() - lo, 1e-300);
  std::ostringstream os;
  os << "P5\n" << width << ' ' << height << "\n255\n";
  for (Index i = 0; i < image.size(); ++i)
    os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (image(i) - lo) / span))));
  return os.str();
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  ExperimentReport rep;
  switch (spec.experiment) {
    case ExperimentKind::kTable1: rep = make_report(run_table1(spec), "table1"); break;
    case ExperimentKind::kTable2: rep = make_report(run_table2(spec), "table2"); break;
    case ExperimentKind::kNoise: rep = make_report(run_noise(spec)); break;
    case ExperimentKind::kFailure: rep = make_report(run_failure(spec)); break;
    case ExperimentKind::kSelection: rep = make_report(run_selection(spec)); break;
    case ExperimentKind::kSpectralInit: rep = make_report(run_spectral_init(spec)); break;
    case ExperimentKind::kFourier: {
      rep = make_report(run_fourier(spec));
      Rng rng(derive_seed(trial_seed(spec.seed, 0, 0), 1));
      rep.extras["fourier_original.pgm"] = to_pgm(synthetic_image(spec.image_side, rng), spec.image_side,
                                                   spec.image_side);
      break;
    }
    case ExperimentKind::kStandardizeDemo: {
      std::vector<std::pair<Index, Index>> sizes;
      for (Index n : spec.n_values) sizes.emplace_back(spec.big_n > 0 ? spec.big_n : 2 * n, n);
      rep = make_report(run_standardize_demo(spec, sizes));
      break;
    }
  }
  json config = json::parse(spec_to_json(spec));
  json body = json::parse(rep.json);
  body["config"] = config;
  rep.json = body.dump(2);
  if (spec.write_files) write_report(rep, spec.output_dir);
  return rep;
}

std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + dir + "'");
  std::vector<std::string> written;
  auto put = [&](const std::string& file, const std::string& contents) {
    const std::string path = (fs::path(dir) / file).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
    out << contents;
    written.push_back(path);
  };
  put(report.name + ".csv", report.summary.to_csv());
  if (!report.trials.header.empty()) put(report.name + "_trials.csv", report.trials.to_csv());
  put(report.name + ".json", report.json);
  for (const auto& [file, contents] : report.extras) put(file, contents);
  return written;
}

}  // namespace rankone
