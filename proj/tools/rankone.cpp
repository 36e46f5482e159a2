// rankone: command-line front end.
//
// Exit codes: 0 success, 1 solver did not converge (only with --strict),
// 2 bad input.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankone/error.hpp"
#include "rankone/experiments.hpp"
#include "rankone/factored.hpp"
#include "rankone/frames.hpp"
#include "rankone/lifted.hpp"
#include "rankone/linalg.hpp"
#include "rankone/matrix_io.hpp"
#include "rankone/oracle.hpp"
#include "rankone/report.hpp"

using namespace rankone;
using nlohmann::json;

namespace {

constexpr int kExitNoConvergence = 1;
constexpr int kExitBadInput = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Optional "ground_truth" of a JSON measurement file (numbers or complex strings).
std::optional<ComplexVector> read_ground_truth(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') return std::nullopt;
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("ground_truth")) return std::nullopt;
  const auto& g = j["ground_truth"];
  if (!g.is_array()) fail(ErrorCode::kInvalidArgument, "measurement json: field 'ground_truth' must be an array");
  ComplexVector x(static_cast<Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].is_number()) x(static_cast<Index>(i)) = g[i].get<double>();
    else if (g[i].is_string()) x(static_cast<Index>(i)) = parse_complex(g[i].get<std::string>());
    else fail(ErrorCode::kInvalidArgument, "measurement json: field 'ground_truth' has a bad entry");
  }
  return x;
}

// Measurements come either as JSON ({"b": [...]}) or as whitespace-separated numbers.
RealVector read_measurements(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return measurement_from_json(text).b;
  std::istringstream in(text);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "measurement entry " + std::to_string(v.size()) + " is not a number");
    }
  }
  RealVector b(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) b(static_cast<Index>(i)) = v[i];
  return b;
}

template <typename Vec>
json vector_json(const Vec& x) {
  json j = json::array();
  for (Index i = 0; i < x.size(); ++i) {
    if constexpr (kIsComplex<typename Vec::Scalar>) j.push_back(format_complex(x(i)));
    else j.push_back(x(i));
  }
  return j;
}

std::vector<Index> parse_index_list(const std::string& s, const char* field) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, std::string("option '") + field + "' expects comma-separated integers");
    }
  }
  return out;
}

template <typename Scalar>
Vec<Scalar> cast_truth(const ComplexVector& t, Index n) {
  if (t.size() != n) fail(ErrorCode::kInvalidArgument, "measurement json: 'ground_truth' length does not match the frame");
  if constexpr (kIsComplex<Scalar>) return t;
  else return t.real();
}

struct SolveArgs {
  std::string frame_path;
  std::string b_path;
  std::string method = "adm";
  std::string init = "random";
  Index r = 1;
  double beta = 0.0;
  double gamma = 0.0;
  int max_iter = 5000;
  double tol = 0.0;
  std::uint64_t seed = 1;
  bool standardize = true;
  bool strict = false;
};

template <typename Scalar>
int solve(const Frame<Scalar>& a, const RealVector& b, const std::optional<ComplexVector>& truth,
          const SolveArgs& args) {
  if (b.size() != a.rows())
    fail(ErrorCode::kInvalidArgument, "measurements have length " + std::to_string(b.size()) + ", frame has " +
                                          std::to_string(a.rows()) + " rows");
  if ((b.array() < 0).any()) fail(ErrorCode::kInvalidArgument, "measurements must be nonnegative");
  json out;
  bool converged = false;
  Rng rng{Seed(args.seed)};
  if (args.method == "pocs" || args.method == "lifted") {
    const RealVector b_sq = b.cwiseAbs2();
    auto [q, r] = qr_standardize(a);
    const Frame<Scalar>& f = args.standardize ? q : a;
    const Mat<Scalar> x_init = default_lifted_init(f, b_sq);
    LiftedReport<Scalar> rep;
    if (args.method == "pocs") {
      rep = feasibility_pocs(f, b_sq, x_init, args.max_iter, args.tol > 0 ? args.tol : 1e-10);
    } else {
      LiftedOptions opt;
      opt.beta = args.beta > 0 ? args.beta : 1.0;
      opt.max_iter = args.max_iter;
      if (args.tol > 0) opt.tol = args.tol;
      rep = lifted_adm(f, b_sq, x_init, opt);
    }
    Mat<Scalar> x = rep.x_final;
    if (args.standardize) {
      const Mat<Scalar> rinv = r.template triangularView<Eigen::Upper>().solve(Mat<Scalar>::Identity(r.rows(), r.cols()));
      x = rinv * x * rinv.adjoint();
    }
    DescendingEigen<Scalar> eig(x);
    Vec<Scalar> v = eig.vectors.col(0) * std::sqrt(std::max(eig.values(0), 0.0));
    out["x"] = vector_json(v);
    if (truth) out["recovery_error"] = recovery_error<Scalar>(v, cast_truth<Scalar>(*truth, v.size()));
    out["sigma1"] = eig.values(0);
    out["sigma2"] = eig.values.size() > 1 ? eig.values(1) : 0.0;
    out["feasibility"] = rep.feasibility;
    out["iterations"] = rep.iterations;
    out["converged"] = rep.converged;
    out["warnings"] = rep.warnings;
    converged = rep.converged;
  } else if (args.method == "adm") {
    auto [q, r] = qr_standardize(a);
    RankROptions opt;
    opt.r = args.r;
    opt.beta = args.beta > 0 ? args.beta : 0.01;
    opt.gamma = args.gamma;
    opt.max_iter = args.max_iter;
    if (args.tol > 0) opt.tol = args.tol;
    Mat<Scalar> y0 = rng.normal_matrix<Scalar>(a.cols(), args.r);
    if (args.init == "spectral") {
      const auto si = spectral_init(q, b);
      y0 *= 0.1 * b.norm() / std::sqrt(static_cast<double>(a.cols()));
      y0.col(0) = si.x_min * b.norm();
    }
    const auto res = run_rankr_adm(dense_map(q), b, y0, opt);
    Vec<Scalar> x = r.template triangularView<Eigen::Upper>().solve(res.x);
    normalize_global_phase(x);
    out["x"] = vector_json(x);
    if (truth) out["recovery_error"] = recovery_error<Scalar>(x, cast_truth<Scalar>(*truth, x.size()));
    out["residual"] = res.residual_trace.empty() ? 0.0 : res.residual_trace.back() / b.norm();
    out["iterations"] = res.iterations;
    out["status"] = to_string(res.status);
    converged = res.status == AdmStatus::kSolved;
  } else {
    fail(ErrorCode::kInvalidArgument, "option '--method' must be pocs, lifted or adm");
  }
  std::cout << out.dump(2) << '\n';
  if (!converged) std::cerr << "warning: solver did not converge\n";
  return (!converged && args.strict) ? kExitNoConvergence : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase retrieval by rank-one and rank-r relaxations"};
  app.require_subcommand(1);

  // standardize
  auto* std_cmd = app.add_subcommand("standardize", "Standardize a frame and report the diagonal deviation");
  std::string std_path, std_method = "equal-norm", std_out;
  std_cmd->add_option("frame", std_path, "Matrix file (header: N n real|complex)")->required();
  std_cmd->add_option("--method", std_method, "qr or equal-norm")->check(CLI::IsMember({"qr", "equal-norm"}));
  std_cmd->add_option("--out", std_out, "Write the standardized frame here");

  // solve
  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Recover a signal from magnitude measurements");
  solve_cmd->add_option("frame", sa.frame_path, "Matrix file")->required();
  solve_cmd->add_option("measurements", sa.b_path, "Measurements: JSON {\"b\": [...]} or plain numbers")->required();
  solve_cmd->add_option("--method", sa.method, "pocs, lifted or adm")->check(CLI::IsMember({"pocs", "lifted", "adm"}));
  solve_cmd->add_option("--r", sa.r, "Factor rank for adm")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--init", sa.init, "random or spectral")->check(CLI::IsMember({"random", "spectral"}));
  solve_cmd->add_option("--beta", sa.beta, "Penalty (0 = method default)");
  solve_cmd->add_option("--gamma", sa.gamma, "sigma_1 boost for adm, relative to ||b||");
  solve_cmd->add_option("--max-iter", sa.max_iter)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tol", sa.tol, "Stopping tolerance (0 = method default)");
  solve_cmd->add_option("--seed", sa.seed);
  solve_cmd->add_flag("!--raw", sa.standardize, "Run lifted methods on the frame as given");
  solve_cmd->add_flag("--strict", sa.strict, "Exit 1 when the solver does not converge");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force checks for small real frames");
  oracle_cmd->require_subcommand(1);
  std::string or_frame, or_b;
  auto* enum_cmd = oracle_cmd->add_subcommand("enumerate", "All solutions of |Ax| = b up to sign");
  enum_cmd->add_option("frame", or_frame)->required();
  enum_cmd->add_option("measurements", or_b)->required();
  auto* inj_cmd = oracle_cmd->add_subcommand("injectivity", "Decide injectivity of x -> |Ax| up to sign");
  inj_cmd->add_option("frame", or_frame)->required();

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Write a random Gaussian instance");
  Index gen_n = 5, gen_N = 9;
  std::string gen_field = "real", gen_prefix = "instance";
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--n", gen_n)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--N", gen_N)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--field", gen_field)->check(CLI::IsMember({"real", "complex"}));
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--prefix", gen_prefix, "Writes <prefix>_frame.txt and <prefix>_b.json");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run a named experiment");
  std::string exp_name, exp_config, exp_n, exp_conv, exp_out;
  int exp_trials = 0, exp_threads = 0;
  std::uint64_t exp_seed = 0;
  bool exp_seed_set = false;
  exp_cmd->add_option("name", exp_name,
                      "table1, table2, noise, failure, selection, spectral-init, fourier, standardize-demo")
      ->required();
  exp_cmd->add_option("--config", exp_config, "JSON config (schema 1)");
  exp_cmd->add_option("--trials", exp_trials)->check(CLI::PositiveNumber);
  exp_cmd->add_option("--n", exp_n, "Comma-separated signal sizes");
  exp_cmd->add_option("--snr-convention", exp_conv)->check(CLI::IsMember({"norm", "squared"}));
  exp_cmd->add_option("--output-dir", exp_out);
  exp_cmd->add_option("--threads", exp_threads)->check(CLI::PositiveNumber);
  auto* seed_opt = exp_cmd->add_option("--seed", exp_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }
  exp_seed_set = seed_opt->count() > 0;

  try {
    if (*std_cmd) {
      const AnyMatrix m = read_matrix_file(std_path);
      if (std_method == "equal-norm") {
        const auto* a = std::get_if<RealMatrix>(&m);
        if (!a) fail(ErrorCode::kInvalidArgument, "equal-norm standardization needs a real frame");
        const auto res = equal_norm_standardize(*a);
        std::cout << "iterations " << res.iterations << '\n';
        std::cout << "max_diag_deviation " << format_double(equal_norm_defect<double>(res.q)) << '\n';
        if (!std_out.empty()) write_matrix_file(std_out, res.q);
      } else {
        std::visit(
            [&](const auto& a) {
              using S = typename std::decay_t<decltype(a)>::Scalar;
              const auto [q, r] = qr_standardize(Frame<S>(a));
              std::cout << "max_diag_deviation " << format_double(equal_norm_defect<S>(q.matrix())) << '\n';
              std::cout << "orthonormality_defect " << format_double(q.orthonormality_defect()) << '\n';
              if (!std_out.empty()) write_matrix_file(std_out, q.matrix());
            },
            m);
      }
      return 0;
    }
    if (*solve_cmd) {
      const AnyMatrix m = read_matrix_file(sa.frame_path);
      const RealVector b = read_measurements(sa.b_path);
      const auto truth = read_ground_truth(sa.b_path);
      return std::visit(
          [&](const auto& a) {
            using S = typename std::decay_t<decltype(a)>::Scalar;
            return solve(Frame<S>(a), b, truth, sa);
          },
          m);
    }
    if (*oracle_cmd) {
      const AnyMatrix m = read_matrix_file(or_frame);
      const auto* a = std::get_if<RealMatrix>(&m);
      if (!a) fail(ErrorCode::kInvalidArgument, "the oracle needs a real frame");
      if (*enum_cmd) {
        const RealVector b = read_measurements(or_b);
        if (b.size() != a->rows()) fail(ErrorCode::kInvalidArgument, "measurements do not match the frame rows");
        std::cout << solution_set_to_json(enumerate_solutions(*a, b)) << '\n';
      } else {
        const auto res = check_injectivity(*a);
        json j{{"injective", res.injective}};
        if (res.witness) j["witness"] = {vector_json(res.witness->first), vector_json(res.witness->second)};
        std::cout << j.dump() << '\n';
      }
      return 0;
    }
    if (*gen_cmd) {
      std::visit(
          [&](auto tag) {
            using S = decltype(tag);
            const auto a = gaussian_frame<S>(gen_N, gen_n, derive_seed(Seed(gen_seed), 0));
            Rng rng(derive_seed(Seed(gen_seed), 1));
            const auto ms = measure(a, Vec<S>(rng.unit_vector<S>(gen_n)));
            write_matrix_file(gen_prefix + "_frame.txt", a.matrix());
            std::ofstream(gen_prefix + "_b.json") << measurement_to_json(ms) << '\n';
          },
          gen_field == "real" ? std::variant<double, Complex>(0.0) : std::variant<double, Complex>(Complex(0.0)));
      std::cout << gen_prefix << "_frame.txt " << gen_prefix << "_b.json\n";
      return 0;
    }
    if (*exp_cmd) {
      const ExperimentKind kind = experiment_kind_from_string(exp_name);
      ExperimentSpec spec = spec_from_json(exp_config.empty() ? "{}" : slurp(exp_config), kind);
      if (exp_trials > 0) spec.trials = exp_trials;
      if (!exp_n.empty()) spec.n_values = parse_index_list(exp_n, "--n");
      if (exp_conv == "squared") spec.snr_convention = SnrConvention::kSquared;
      if (exp_conv == "norm") spec.snr_convention = SnrConvention::kNorm;
      if (!exp_out.empty()) spec.output_dir = exp_out;
      if (exp_threads > 0) spec.threads = exp_threads;
      if (exp_seed_set) spec.seed = Seed(exp_seed);
      const auto rep = run_experiment(spec);
      std::cout << rep.summary.to_csv();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kNoConvergence ? kExitNoConvergence : kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return 0;
}
