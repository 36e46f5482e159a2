#include "rankone/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "rankone/error.hpp"
#include "rankone/linalg.hpp"

namespace rankone {

using nlohmann::json;

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kTable1: return "table1";
    case ExperimentKind::kTable2: return "table2";
    case ExperimentKind::kNoise: return "noise";
    case ExperimentKind::kFailure: return "failure";
    case ExperimentKind::kSelection: return "selection";
    case ExperimentKind::kSpectralInit: return "spectral-init";
    case ExperimentKind::kFourier: return "fourier";
    case ExperimentKind::kStandardizeDemo: return "standardize-demo";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ExperimentKind::kStandardizeDemo); ++k) {
    const auto kind = static_cast<ExperimentKind>(k);
    if (name == to_string(kind)) return kind;
  }
  fail(ErrorCode::kInvalidArgument, "unknown experiment '" + name + "'");
}

namespace {

// Typed field readers that name the offending field on error.
template <typename T>
void read_field(const json& j, const char* name, T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, std::string("config field '") + name + "' has the wrong type");
  }
}

void read_index_list(const json& j, const char* name, std::vector<Index>& out) {
  if (!j.contains(name)) return;
  std::vector<long long> v;
  read_field(j, name, v);
  out.assign(v.begin(), v.end());
}

}  // namespace

ExperimentSpec spec_from_json(const std::string& text, ExperimentKind kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
  static const std::vector<std::string> known = {
      "schema", "experiment", "n_values", "trials", "beta", "gamma", "r_values", "seed", "output_dir",
      "threads", "max_iter", "tol", "success_tol", "solvers", "n_rules", "N", "snr_db", "snr_convention",
      "frac_I", "inits", "image_side", "image_path", "oversampling", "illuminations"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      fail(ErrorCode::kInvalidArgument, "config field '" + it.key() + "' is not recognised");
  if (j.contains("schema") && (!j["schema"].is_number_integer() || j["schema"].get<int>() != 1))
    fail(ErrorCode::kInvalidArgument, "config field 'schema' must be 1");

  ExperimentSpec s;
  s.experiment = kind;
  if (j.contains("experiment")) {
    std::string name;
    read_field(j, "experiment", name);
    if (experiment_kind_from_string(name) != kind)
      fail(ErrorCode::kInvalidArgument, "config field 'experiment' does not match the command");
  }
  read_index_list(j, "n_values", s.n_values);
  read_field(j, "trials", s.trials);
  read_field(j, "beta", s.beta);
  read_field(j, "gamma", s.gamma);
  read_index_list(j, "r_values", s.r_values);
  if (j.contains("seed")) {
    std::uint64_t v = 0;
    read_field(j, "seed", v);
    s.seed = Seed(v);
  }
  read_field(j, "output_dir", s.output_dir);
  read_field(j, "threads", s.threads);
  read_field(j, "max_iter", s.max_iter);
  read_field(j, "tol", s.tol);
  read_field(j, "success_tol", s.success_tol);
  read_field(j, "solvers", s.solvers);
  read_field(j, "n_rules", s.n_rules);
  if (j.contains("N")) {
    long long v = 0;
    read_field(j, "N", v);
    s.big_n = v;
  }
  read_field(j, "snr_db", s.snr_db);
  if (j.contains("snr_convention")) {
    std::string c;
    read_field(j, "snr_convention", c);
    if (c == "norm") s.snr_convention = SnrConvention::kNorm;
    else if (c == "squared") s.snr_convention = SnrConvention::kSquared;
    else fail(ErrorCode::kInvalidArgument, "config field 'snr_convention' must be 'norm' or 'squared'");
  }
  read_field(j, "frac_I", s.frac_I);
  read_field(j, "inits", s.inits);
  if (j.contains("image_side")) {
    long long v = 0;
    read_field(j, "image_side", v);
    s.image_side = v;
  }
  read_field(j, "image_path", s.image_path);
  read_field(j, "oversampling", s.oversampling);
  read_field(j, "illuminations", s.illuminations);

  if (s.trials < 1) fail(ErrorCode::kInvalidArgument, "config field 'trials' must be >= 1");
  if (s.n_values.empty()) fail(ErrorCode::kInvalidArgument, "config field 'n_values' must be nonempty");
  for (Index n : s.n_values)
    if (n < 1) fail(ErrorCode::kInvalidArgument, "config field 'n_values' must be positive");
  if (s.threads < 1) fail(ErrorCode::kInvalidArgument, "config field 'threads' must be >= 1");
  if (s.beta < 0) fail(ErrorCode::kInvalidArgument, "config field 'beta' must be positive");
  if (s.gamma < 0) fail(ErrorCode::kInvalidArgument, "config field 'gamma' must be nonnegative");
  return s;
}

std::string spec_to_json(const ExperimentSpec& s) {
  json j;
  j["schema"] = 1;
  j["experiment"] = to_string(s.experiment);
  j["n_values"] = std::vector<long long>(s.n_values.begin(), s.n_values.end());
  j["trials"] = s.trials;
  j["beta"] = s.beta;
  j["gamma"] = s.gamma;
  j["r_values"] = std::vector<long long>(s.r_values.begin(), s.r_values.end());
  j["seed"] = s.seed.value;
  j["output_dir"] = s.output_dir;
  j["threads"] = s.threads;
  j["max_iter"] = s.max_iter;
  j["tol"] = s.tol;
  j["success_tol"] = s.success_tol;
  j["solvers"] = s.solvers;
  j["n_rules"] = s.n_rules;
  j["N"] = s.big_n;
  j["snr_db"] = s.snr_db;
  j["snr_convention"] = s.snr_convention == SnrConvention::kNorm ? "norm" : "squared";
  j["frac_I"] = s.frac_I;
  j["inits"] = s.inits;
  j["image_side"] = s.image_side;
  j["image_path"] = s.image_path;
  j["oversampling"] = s.oversampling;
  j["illuminations"] = s.illuminations;
  return j.dump(2);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Seed trial_seed(Seed root, std::uint64_t cell, std::uint64_t trial) {
  return derive_seed(root, cell * 1000000ULL + trial);
}

double snr_of(const RealVector& b0, const RealVector& noise, SnrConvention conv) {
  const double signal = b0.squaredNorm();  // ||A x0||^2
  const double nn = noise.norm();
  return conv == SnrConvention::kNorm ? 10.0 * std::log10(signal / nn)
                                       : 10.0 * std::log10(signal / (nn * nn));
}

NoisyMeasurement add_noise(const RealVector& b0, double snr_db, SnrConvention conv, Rng& rng) {
  RealVector eta = rng.normal_vector<double>(b0.size());
  const double signal = b0.squaredNorm();
  const double target = conv == SnrConvention::kNorm ? signal / std::pow(10.0, snr_db / 10.0)
                                                      : std::sqrt(signal / std::pow(10.0, snr_db / 10.0));
  eta *= target / eta.norm();
  NoisyMeasurement m;
  m.b_sq = (b0.cwiseAbs2() + eta).cwiseMax(0.0);
  m.b = m.b_sq.cwiseSqrt();
  m.snr_db = snr_of(b0, eta, conv);
  return m;
}

double ErrorSeries::median() const {
  if (errors.empty()) return std::nan("");
  std::vector<double> v = errors;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid - 1), v.end());
  return 0.5 * (hi + v[mid - 1]);
}

namespace {

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Scalar>
struct Instance {
  Frame<Scalar> a;
  Vec<Scalar> x0;
  RealVector b;
};

// Gaussian frame and unit-norm signal drawn from independent streams.
template <typename Scalar>
Instance<Scalar> gaussian_instance(Index N, Index n, Seed seed) {
  Instance<Scalar> inst{gaussian_frame<Scalar>(N, n, derive_seed(seed, 0)), Vec<Scalar>(), RealVector()};
  Rng rng(derive_seed(seed, 1));
  inst.x0 = rng.unit_vector<Scalar>(n);
  inst.b = (inst.a.matrix() * inst.x0).cwiseAbs();
  return inst;
}

Index rule_rows(const std::string& rule, Index n) {
  if (rule == "2n-1") return 2 * n - 1;
  if (rule == "3n-1") return 3 * n - 1;
  if (rule == "4n-2") return 4 * n - 2;
  fail(ErrorCode::kInvalidArgument, "config field 'n_rules' has unknown rule '" + rule + "'");
}

// Lifted solvers on A or on its QR factor; errors are measured in A-space.
template <typename Scalar>
std::pair<double, int> lifted_trial(const Instance<Scalar>& inst, const std::string& solver, const ExperimentSpec& spec,
                                    double beta, int max_iter, double tol) {
  const bool via_q = solver.back() == 'Q';
  const bool pocs = solver.rfind("pocs", 0) == 0;
  Frame<Scalar> f = inst.a;
  Mat<Scalar> r;
  if (via_q) std::tie(f, r) = qr_standardize(inst.a);
  const RealVector b_sq = inst.b.cwiseAbs2();
  GramFactor<Scalar> gram(f);
  const Mat<Scalar> x_init = default_lifted_init(f, b_sq, &gram);
  LiftedReport<Scalar> rep;
  if (pocs) {
    rep = feasibility_pocs(f, b_sq, x_init, max_iter, tol, &gram);
  } else {
    LiftedOptions opt;
    opt.beta = beta;
    opt.max_iter = max_iter;
    opt.tol = tol;
    rep = lifted_adm(f, b_sq, x_init, opt, &gram);
  }
  Mat<Scalar> x = rep.x_final;
  if (via_q) {
    const Mat<Scalar> rinv = r.template triangularView<Eigen::Upper>().solve(Mat<Scalar>::Identity(r.rows(), r.cols()));
    x = rinv * x * rinv.adjoint();
  }
  (void)spec;
  return {lifted_error(x, inst.x0), rep.iterations};
}

template <typename Scalar>
void run_success_cell(SuccessCell& cell, const ExperimentSpec& spec, std::uint64_t cell_index,
                      const std::vector<std::string>& solvers, double beta, int max_iter, double tol) {
  const int T = spec.trials;
  for (const auto& s : solvers) {
    cell.errors[s].assign(static_cast<std::size_t>(T), 0.0);
    cell.iterations[s].assign(static_cast<std::size_t>(T), 0);
  }
  cell.seeds.assign(static_cast<std::size_t>(T), 0);
  parallel_for(T, spec.threads, [&](int t) {
    const Seed seed = trial_seed(spec.seed, cell_index, static_cast<std::uint64_t>(t));
    cell.seeds[static_cast<std::size_t>(t)] = seed.value;
    const auto inst = gaussian_instance<Scalar>(cell.big_n, cell.n, seed);
    for (const auto& s : solvers) {
      auto [err, it] = lifted_trial(inst, s, spec, beta, max_iter, tol);
      cell.errors[s][static_cast<std::size_t>(t)] = err;
      cell.iterations[s][static_cast<std::size_t>(t)] = it;
    }
  });
  for (const auto& s : solvers) {
    int count = 0;
    for (double e : cell.errors[s]) count += e <= spec.success_tol;
    cell.successes[s] = count;
  }
}

}  // namespace

SuccessTable run_table1(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "table1: trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> solvers = spec.solvers;
  if (solvers.empty()) solvers = {"pocs-A", "pocs-Q", "sigma1-A", "sigma1-Q"};
  for (const auto& s : solvers)
    if (s != "pocs-A" && s != "pocs-Q" && s != "sigma1-A" && s != "sigma1-Q")
      fail(ErrorCode::kInvalidArgument, "config field 'solvers' has unknown solver '" + s + "'");
  const double beta = spec.beta > 0 ? spec.beta : 1.0;
  const int max_iter = spec.max_iter > 0 ? spec.max_iter : 5000;
  const double tol = spec.tol > 0 ? spec.tol : 1e-10;
  SuccessTable table;
  table.trials = spec.trials;
  for (std::size_t c = 0; c < spec.n_values.size(); ++c) {
    SuccessCell cell;
    cell.n = spec.n_values[c];
    cell.big_n = 2 * cell.n - 1;
    cell.label = "n=" + std::to_string(cell.n);
    run_success_cell<double>(cell, spec, c, solvers, beta, max_iter, tol);
    table.cells.push_back(std::move(cell));
  }
  table.wall_seconds = elapsed(start);
  return table;
}

SuccessTable run_table2(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "table2: trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> rules = spec.n_rules;
  if (rules.empty()) rules = {"2n-1", "3n-1", "4n-2"};
  const double beta = spec.beta > 0 ? spec.beta : 1.0;
  const int max_iter = spec.max_iter > 0 ? spec.max_iter : 5000;
  const double tol = spec.tol > 0 ? spec.tol : 1e-10;
  SuccessTable table;
  table.trials = spec.trials;
  std::uint64_t c = 0;
  for (Index n : spec.n_values) {
    for (const auto& rule : rules) {
      SuccessCell cell;
      cell.n = n;
      cell.big_n = rule_rows(rule, n);
      cell.label = "n=" + std::to_string(n) + ",N=" + rule;
      run_success_cell<Complex>(cell, spec, c++, {"sigma1-Q"}, beta, max_iter, tol);
      table.cells.push_back(std::move(cell));
    }
  }
  table.wall_seconds = elapsed(start);
  return table;
}

namespace {

// Rank-r start: random Gaussian columns, or x_min (scaled to ||b||) in the
// first column plus small random columns.
template <typename Scalar>
Mat<Scalar> initial_factor(const std::string& init, const Frame<Scalar>& q, const RealVector& b, Index r,
                           double frac_I, Rng& rng) {
  Mat<Scalar> y0 = rng.normal_matrix<Scalar>(q.cols(), r);
  if (init == "spectral") {
    SpectralInitConfig cfg;
    cfg.frac_I = frac_I;
    const auto si = spectral_init(q, b, cfg);
    y0 *= 0.1 * b.norm() / std::sqrt(static_cast<double>(q.cols()));
    y0.col(0) = si.x_min * b.norm();
  } else if (init != "random") {
    fail(ErrorCode::kInvalidArgument, "config field 'inits' has unknown init '" + init + "'");
  }
  return y0;
}

}  // namespace

NoiseResult run_noise(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "noise: trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const Index n = spec.n_values.front();
  const Index N = spec.big_n > 0 ? spec.big_n : 2 * n;
  RankROptions base;
  base.beta = spec.beta > 0 ? spec.beta : 0.001;
  base.gamma = spec.gamma;
  base.max_iter = spec.max_iter > 0 ? spec.max_iter : 5000;
  base.tol = spec.tol > 0 ? spec.tol : 1e-8;

  NoiseResult res;
  const int T = spec.trials;
  std::vector<std::pair<Index, std::string>> combos;
  for (const auto& init : spec.inits)
    for (Index r : spec.r_values) combos.emplace_back(r, init);
  for (const auto& [r, init] : combos) {
    ErrorSeries s;
    s.label = "r=" + std::to_string(r) + "," + init;
    s.errors.assign(static_cast<std::size_t>(T), 0.0);
    res.series.push_back(std::move(s));
  }
  res.realized_snr.assign(static_cast<std::size_t>(T), 0.0);
  res.seeds.assign(static_cast<std::size_t>(T), 0);
  parallel_for(T, spec.threads, [&](int t) {
    const Seed seed = trial_seed(spec.seed, 0, static_cast<std::uint64_t>(t));
    res.seeds[static_cast<std::size_t>(t)] = seed.value;
    const auto inst = gaussian_instance<double>(N, n, seed);
    Rng rng(derive_seed(seed, 2));
    const auto noisy = add_noise(inst.b, spec.snr_db, spec.snr_convention, rng);
    res.realized_snr[static_cast<std::size_t>(t)] = noisy.snr_db;
    auto [q, r_mat] = qr_standardize(inst.a);
    const auto map = dense_map(q);
    Index rmax = 1;
    for (Index r : spec.r_values) rmax = std::max(rmax, r);
    for (std::size_t c = 0; c < combos.size(); ++c) {
      const auto& [r, init] = combos[c];
      // Same starting block for every r so the comparison is paired.
      Rng init_rng(derive_seed(seed, 3));
      const RealMatrix y0 = initial_factor(init, q, noisy.b, rmax, spec.frac_I, init_rng);
      RankROptions opt = base;
      opt.r = r;
      const auto out = run_rankr_adm(map, noisy.b, y0, opt);
      const RealVector x = r_mat.triangularView<Eigen::Upper>().solve(out.x);
      res.series[c].errors[static_cast<std::size_t>(t)] = recovery_error(x, inst.x0);
    }
  });
  res.wall_seconds = elapsed(start);
  return res;
}

namespace {

bool is_monotone(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k)
    if (trace[k] > trace[k - 1] * (1.0 + 1e-9) + 1e-300) return false;
  return true;
}

}  // namespace

FailureResult run_failure(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "failure: trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const Index n = spec.n_values.front();
  const Index N = spec.big_n > 0 ? spec.big_n : 4 * n;
  AdmOptions opt;
  opt.beta = spec.beta > 0 ? spec.beta : 0.01;
  opt.max_iter = spec.max_iter > 0 ? spec.max_iter : 500;
  opt.tol = 1e-14;  // run the full budget; success is judged afterwards
  opt.stationary_tol = 0.0;
  const double crit = spec.tol > 0 ? spec.tol : 1e-4;

  FailureResult res;
  const auto T = static_cast<std::size_t>(spec.trials);
  res.plain_residual.assign(T, 0.0);
  res.rescaled_residual.assign(T, 0.0);
  res.plain_monotone.assign(T, true);
  res.rescaled_monotone.assign(T, true);
  res.plain_traces.assign(T, {});
  res.rescaled_traces.assign(T, {});
  res.seeds.assign(T, 0);
  parallel_for(spec.trials, spec.threads, [&](int t) {
    const auto k = static_cast<std::size_t>(t);
    const Seed seed = trial_seed(spec.seed, 0, k);
    res.seeds[k] = seed.value;
    const auto inst = gaussian_instance<double>(N, n, seed);
    if ((inst.b.array() <= 0).any()) return;  // rescaling undefined; keep zeros
    Rng rng(derive_seed(seed, 2));
    const RealVector x_init = rng.normal_vector<double>(n);
    const auto plain = run_rank1_adm(inst.a, inst.b, x_init, opt);
    const Frame<double> scaled(inst.b.cwiseInverse().asDiagonal() * inst.a.matrix(), "rescaled");
    const RealVector ones = RealVector::Ones(N);
    const auto resc = run_rank1_adm(scaled, ones, x_init, opt);
    res.plain_residual[k] = plain.trace.back() / inst.b.norm();
    res.rescaled_residual[k] = resc.trace.back() / ones.norm();
    res.plain_monotone[k] = is_monotone(plain.trace);
    res.rescaled_monotone[k] = is_monotone(resc.trace);
    res.plain_traces[k] = plain.trace;
    res.rescaled_traces[k] = resc.trace;
  });
  for (std::size_t k = 0; k < T; ++k) {
    res.plain_failures += res.plain_residual[k] > crit;
    res.rescaled_failures += res.rescaled_residual[k] > crit;
  }
  res.wall_seconds = elapsed(start);
  return res;
}

std::map<std::string, std::vector<Index>> selection_subsets(const RealVector& b, Index k, Rng& rng) {
  const Index N = b.size();
  require(k >= 2 && k <= N, "selection: subset size must lie in [2, N]");
  std::vector<Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return b(i) < b(j); });
  std::map<std::string, std::vector<Index>> out;
  out["smallest"].assign(order.begin(), order.begin() + k);
  out["largest"].assign(order.end() - k, order.end());
  out["combined"].assign(order.begin(), order.begin() + (k - 1));
  out["combined"].push_back(order.back());
  std::vector<Index> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = N - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  out["random"].assign(perm.begin(), perm.begin() + k);
  std::sort(out["random"].begin(), out["random"].end());
  return out;
}

SelectionResult run_selection(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "selection: trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const Index n = spec.n_values.front();
  const Index N = spec.big_n > 0 ? spec.big_n : 4 * n;
  AdmOptions opt;
  opt.beta = spec.beta > 0 ? spec.beta : 0.01;
  opt.max_iter = spec.max_iter > 0 ? spec.max_iter : 2000;
  opt.tol = spec.tol > 0 ? spec.tol : 1e-8;
  const std::vector<std::string> names = {"smallest", "largest", "combined", "random"};
  SelectionResult res;
  const auto T = static_cast<std::size_t>(spec.trials);
  for (const auto& nm : names) res.series.push_back({nm, std::vector<double>(T, 0.0)});
  res.seeds.assign(T, 0);
  parallel_for(spec.trials, spec.threads, [&](int t) {
    const auto k = static_cast<std::size_t>(t);
    const Seed seed = trial_seed(spec.seed, 0, k);
    res.seeds[k] = seed.value;
    const auto inst = gaussian_instance<double>(N, n, seed);
    Rng rng(derive_seed(seed, 2));
    const auto subsets = selection_subsets(inst.b, N / 2, rng);
    const RealVector x_init = rng.normal_vector<double>(n);
    for (std::size_t s = 0; s < names.size(); ++s) {
      const auto& idx = subsets.at(names[s]);
      const Frame<double> sub(take_rows(inst.a.matrix(), idx), names[s]);
      const auto out = run_rank1_adm(sub, take(inst.b, idx), x_init, opt);
      res.series[s].errors[k] = recovery_error(out.x, inst.x0);
    }
  });
  res.wall_seconds = elapsed(start);
  return res;
}

SpectralStudy run_spectral_init(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "spectral-init: trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const Index n = spec.n_values.front();
  const Index N = spec.big_n > 0 ? spec.big_n : 4 * n;
  const int max_iter = spec.max_iter > 0 ? spec.max_iter : 500;
  SpectralStudy res;
  const auto T = static_cast<std::size_t>(spec.trials);
  for (auto* v : {&res.xmin_error, &res.random_error, &res.sign_recovery_error, &res.altmin_from_xmin,
                  &res.altmin_from_random, &res.closeness_slack})
    v->assign(T, 0.0);
  res.seeds.assign(T, 0);
  parallel_for(spec.trials, spec.threads, [&](int t) {
    const auto k = static_cast<std::size_t>(t);
    const Seed seed = trial_seed(spec.seed, 0, k);
    res.seeds[k] = seed.value;
    const auto inst = gaussian_instance<double>(N, n, seed);
    Rng rng(derive_seed(seed, 2));
    SpectralInitConfig cfg;
    cfg.frac_I = spec.frac_I;
    const auto si = spectral_init(inst.a, inst.b, cfg);
    const RealVector x_rand = rng.unit_vector<double>(n);
    res.xmin_error[k] = recovery_error(si.x_min, inst.x0);
    res.random_error[k] = recovery_error(x_rand, inst.x0);
    const RealVector x_sr = sign_recovery(take_rows(si.a_normalized, si.partition.large),
                                          take(si.b_normalized, si.partition.large), si.x_min);
    res.sign_recovery_error[k] = recovery_error(x_sr, inst.x0);
    res.altmin_from_xmin[k] =
        recovery_error(alternating_minimization(inst.a, inst.b, RealVector(si.x_min), max_iter), inst.x0);
    res.altmin_from_random[k] = recovery_error(alternating_minimization(inst.a, inst.b, x_rand, max_iter), inst.x0);
    const auto terms = closeness_terms(take_rows(si.a_normalized, si.partition.small), inst.x0, si.x_min);
    res.closeness_slack[k] = terms.lhs - terms.rhs;
  });
  res.wall_seconds = elapsed(start);
  return res;
}

RealVector synthetic_image(Index side, Rng& rng) {
  RealVector img = RealVector::Constant(side * side, 0.2);
  const double s = static_cast<double>(side);
  for (int blob = 0; blob < 5; ++blob) {
    const double cy = rng.uniform() * s;
    const double cx = rng.uniform() * s;
    const double width = s / 16.0 + rng.uniform() * (s / 5.0 - s / 16.0);
    const double amp = 0.5 + 0.5 * rng.uniform();
    for (Index y = 0; y < side; ++y)
      for (Index x = 0; x < side; ++x) {
        const double dy = static_cast<double>(y) - cy;
        const double dx = static_cast<double>(x) - cx;
        img(y * side + x) += amp * std::exp(-(dy * dy + dx * dx) / (2.0 * width * width));
      }
  }
  return img;
}

double normalized_reconstruction_error(const ComplexVector& x, const RealVector& x0) {
  const ComplexVector u0 = x0.cast<Complex>() / x0.norm();
  ComplexVector u = x / x.norm();
  const Complex inner = u0.dot(u);  // conj(u0) . u
  if (std::abs(inner) > 0) u *= std::conj(inner) / std::abs(inner);
  return (u - u0).norm();
}

namespace {

Illumination illumination_from_string(const std::string& s) {
  if (s == "uniform") return Illumination::kUniform;
  if (s == "random-phase") return Illumination::kRandomPhase;
  fail(ErrorCode::kInvalidArgument, "config field 'illuminations' has unknown value '" + s + "'");
}

// Least right singular vector of the small-measurement rows, by power
// iteration on I - Q_I^H Q_I (Q standardized, so its spectrum lies in [0,1]).
ComplexVector implicit_spectral_init(const LinearMap<Complex>& q, const RealVector& b, double frac_I, bool real_signal,
                                     Rng& rng, int iterations = 400) {
  const Index N = q.rows;
  const Index count = static_cast<Index>(std::llround(frac_I * static_cast<double>(N)));
  std::vector<Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return b(i) < b(j); });
  RealVector keep = RealVector::Zero(N);
  for (Index k = 0; k < count; ++k) keep(order[static_cast<std::size_t>(k)]) = 1.0;
  ComplexVector x = rng.normal_vector<Complex>(q.cols);
  if (real_signal) x = x.real().cast<Complex>();
  x.normalize();
  for (int it = 0; it < iterations; ++it) {
    ComplexMatrix qx = q.apply(ComplexMatrix(x));
    qx.col(0) = qx.col(0).cwiseProduct(keep.cast<Complex>());
    ComplexVector next = x - q.adjoint(qx).col(0);
    if (real_signal) next = next.real().cast<Complex>();
    x = next / next.norm();
  }
  return x;
}

}  // namespace

FourierResult run_fourier(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "fourier: trials must be >= 1");
  require(spec.image_side >= 1 && spec.image_side <= 64, "config field 'image_side' must lie in [1, 64]");
  const auto start = std::chrono::steady_clock::now();
  RankROptions base;
  base.beta = spec.beta > 0 ? spec.beta : 0.1;
  base.gamma = spec.gamma;
  base.max_iter = spec.max_iter > 0 ? spec.max_iter : 3000;
  base.tol = spec.tol > 0 ? spec.tol : 1e-8;
  base.real_signal = true;
  const Index side = spec.image_side;

  FourierResult res;
  res.side = side;
  const std::string init = spec.inits.empty() ? "random" : spec.inits.front();
  Index rmax = 1;
  for (Index r : spec.r_values) rmax = std::max(rmax, r);
  std::vector<std::pair<int, std::string>> jobs;
  for (const auto& il : spec.illuminations)
    for (int t = 0; t < spec.trials; ++t) jobs.emplace_back(t, il);
  res.trials.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), spec.threads, [&](int j) {
    const auto& [t, il] = jobs[static_cast<std::size_t>(j)];
    const Seed seed = trial_seed(spec.seed, 0, static_cast<std::uint64_t>(t));
    Rng rng(derive_seed(seed, 1));
    const RealVector x0 = synthetic_image(side, rng);
    const FourierOperator op(side, side, spec.oversampling, illumination_from_string(il), derive_seed(seed, 0));
    const auto q = op.standardized_map();
    const RealVector b0 = q.apply(ComplexMatrix(x0.cast<Complex>())).col(0).cwiseAbs();
    Rng noise_rng(derive_seed(seed, 2));
    const auto noisy = add_noise(b0, spec.snr_db, spec.snr_convention, noise_rng);
    FourierTrial trial;
    trial.seed = seed.value;
    trial.illumination = il;
    trial.snr_db = noisy.snr_db;
    Rng init_rng(derive_seed(seed, 3));
    ComplexMatrix y0 = init_rng.normal_matrix<Complex>(q.cols, rmax).real().cast<Complex>();
    if (init == "spectral") {
      y0 *= 0.1 * noisy.b.norm() / std::sqrt(static_cast<double>(q.cols));
      y0.col(0) = implicit_spectral_init(q, noisy.b, spec.frac_I, true, init_rng) * noisy.b.norm();
    } else if (init == "positive") {
      // Nonnegative random image; the spectral sets are too small when N is close to n.
      y0 *= 0.1 * noisy.b.norm() / std::sqrt(static_cast<double>(q.cols));
      const RealVector p = RealVector::NullaryExpr(q.cols, [&] { return init_rng.uniform(); });
      y0.col(0) = (p * (noisy.b.norm() / p.norm())).cast<Complex>();
    } else if (init != "random") {
      fail(ErrorCode::kInvalidArgument, "config field 'inits' has unknown init '" + init + "'");
    }
    for (Index r : spec.r_values) {
      RankROptions opt = base;
      opt.r = r;
      const auto out = run_rankr_adm(q, noisy.b, y0, opt);
      trial.error[r] = normalized_reconstruction_error(out.x, x0);
      trial.residual[r] = out.residual_trace.empty() ? 0.0 : out.residual_trace.back() / noisy.b.norm();
    }
    res.trials[static_cast<std::size_t>(j)] = std::move(trial);
    if (j == 0) res.padded = op.padded_height();
  });
  res.wall_seconds = elapsed(start);
  return res;
}

double trace_monotonicity_violation(const StandardizationResult& run, const RealVector& d_star) {
  double worst = -std::numeric_limits<double>::infinity();
  const RealVector w = d_star.cwiseInverse();
  for (std::size_t k = 0; k < run.unscaled.size() && k < run.history.size(); ++k) {
    const double before = w.dot(run.history[k]);
    const double after = w.dot(run.unscaled[k]);
    worst = std::max(worst, (after - before) / before);
  }
  return worst;
}

StandardizeStudy run_standardize_demo(const ExperimentSpec& spec, const std::vector<std::pair<Index, Index>>& sizes) {
  require(spec.trials >= 1, "standardize-demo: trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  StandardizeStudy res;
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t c = 0; c < sizes.size(); ++c)
    for (int t = 0; t < spec.trials; ++t) jobs.emplace_back(c, t);
  res.trials.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), spec.threads, [&](int j) {
    const auto [c, t] = jobs[static_cast<std::size_t>(j)];
    const auto [N, n] = sizes[c];
    const Seed seed = trial_seed(spec.seed, c, static_cast<std::uint64_t>(t));
    const auto a = gaussian_frame<double>(N, n, derive_seed(seed, 0));
    StandardizeTrial out;
    out.big_n = N;
    out.n = n;
    StandardizeOptions opt;
    opt.tol = spec.tol > 0 ? spec.tol : 1e-10;
    opt.max_iter = spec.max_iter > 0 ? spec.max_iter : 10000;
    opt.keep_history = true;
    try {
      const auto first = equal_norm_standardize(a.matrix(), opt);
      Rng rng(derive_seed(seed, 1));
      StandardizeOptions opt2 = opt;
      opt2.keep_history = false;
      RealVector d0(N);
      for (Index i = 0; i < N; ++i) d0(i) = 0.1 + 10.0 * rng.uniform();
      opt2.d0 = d0;
      const auto second = equal_norm_standardize(a.matrix(), opt2);
      out.defect = equal_norm_defect<double>(first.q);
      out.agreement = (first.d - second.d).cwiseQuotient(first.d).cwiseAbs().maxCoeff();
      out.worst_increase = trace_monotonicity_violation(first, first.d);
      out.monotone = out.worst_increase <= 1e-12;
      out.iterations = first.iterations;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoConvergence) throw;
      out.converged = false;
    }
    res.trials[static_cast<std::size_t>(j)] = out;
  });
  res.wall_seconds = elapsed(start);
  return res;
}

}  // namespace rankone
