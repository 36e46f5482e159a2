#include "rankone/oracle.hpp"

#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "rankone/error.hpp"
#include "rankone/linalg.hpp"

namespace rankone {

SolutionSet enumerate_solutions(const RealMatrix& a, const RealVector& b) {
  const Index N = a.rows();
  require(b.size() == N, "enumerate_solutions: b must have length N");
  if (N > 22) fail(ErrorCode::kBudgetExceeded, "enumerate_solutions: N > 22");
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(a);
  const RealMatrix pinv = cod.pseudoInverse();
  const RealMatrix resid_map = RealMatrix::Identity(N, N) - a * pinv;
  const double thresh = 1e-8 * std::max(b.cwiseAbs().maxCoeff(), 1e-300);

  SolutionSet set;
  const std::uint64_t patterns = std::uint64_t{1} << (N - 1);
  RealVector rhs(N);
  for (std::uint64_t code = 0; code < patterns; ++code) {
    rhs(0) = b(0);
    for (Index i = 1; i < N; ++i) rhs(i) = ((code >> (i - 1)) & 1U) ? -b(i) : b(i);
    if ((resid_map * rhs).cwiseAbs().maxCoeff() > thresh) continue;
    RealVector x = pinv * rhs;
    if (((a * x).cwiseAbs() - b).cwiseAbs().maxCoeff() > thresh) continue;
    bool duplicate = false;
    for (const auto& s : set.solutions) {
      const double tol = 1e-8 * std::max(1.0, s.norm());
      if ((s - x).norm() <= tol || (s + x).norm() <= tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) set.solutions.push_back(std::move(x));
  }
  return set;
}

std::string solution_set_to_json(const SolutionSet& s) {
  nlohmann::json j;
  j["exhaustive"] = s.exhaustive;
  j["solutions"] = nlohmann::json::array();
  for (const auto& x : s.solutions) j["solutions"].push_back(std::vector<double>(x.data(), x.data() + x.size()));
  return j.dump();
}

InjectivityResult check_injectivity(const RealMatrix& a) {
  const Index N = a.rows();
  const Index n = a.cols();
  if (N > 22 || n > 6) fail(ErrorCode::kBudgetExceeded, "check_injectivity: need N <= 22 and n <= 6");
  InjectivityResult res;
  const std::uint64_t patterns = std::uint64_t{1} << (N - 1);
  std::vector<Index> in_s, out_s;
  for (std::uint64_t code = 0; code < patterns; ++code) {
    // Row 0 always belongs to S; bit i-1 set puts row i in S^c.
    in_s.assign(1, 0);
    out_s.clear();
    for (Index i = 1; i < N; ++i) (((code >> (i - 1)) & 1U) ? out_s : in_s).push_back(i);
    auto rows_of = [&](const std::vector<Index>& idx) {
      RealMatrix m(static_cast<Index>(idx.size()), n);
      for (std::size_t k = 0; k < idx.size(); ++k) m.row(static_cast<Index>(k)) = a.row(idx[k]);
      return m;
    };
    const RealMatrix ns = null_space<double>(rows_of(in_s), 1e-10);
    if (ns.cols() == 0) continue;
    const RealMatrix nc = null_space<double>(rows_of(out_s), 1e-10);
    if (nc.cols() == 0) continue;
    // v in null(A_S) gives a_i.x = a_i.x_hat on S; u in null(A_Sc) gives
    // a_i.x = -a_i.x_hat on S^c.
    const RealVector v = ns.col(0);
    const RealVector u = nc.col(0);
    res.injective = false;
    res.witness = std::make_pair(RealVector((u + v) / 2.0), RealVector((u - v) / 2.0));
    res.split.assign(static_cast<std::size_t>(N), false);
    for (Index i : out_s) res.split[static_cast<std::size_t>(i)] = true;
    return res;
  }
  return res;
}

RealMatrix FeasibleFamily::at(const RealVector& t) const {
  RealMatrix x = particular;
  for (std::size_t k = 0; k < basis.size(); ++k) x += t(static_cast<Index>(k)) * basis[k];
  return x;
}

namespace {

double min_eig(const RealMatrix& x) {
  return Eigen::SelfAdjointEigenSolver<RealMatrix>(x, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

FeasibleFamily enumerate_feasible(const RealMatrix& a, const RealVector& b_sq, int grid) {
  const Index N = a.rows();
  const Index n = a.cols();
  require(b_sq.size() == N, "enumerate_feasible: b_sq must have length N");
  require(grid >= 2, "enumerate_feasible: grid must be >= 2");
  if (n > 4) fail(ErrorCode::kBudgetExceeded, "enumerate_feasible: n > 4");

  // Frobenius-orthonormal basis of symmetric matrices.
  std::vector<RealMatrix> sym;
  for (Index j = 0; j < n; ++j)
    for (Index k = j; k < n; ++k) {
      RealMatrix e = RealMatrix::Zero(n, n);
      if (j == k) {
        e(j, j) = 1.0;
      } else {
        e(j, k) = e(k, j) = 1.0 / std::sqrt(2.0);
      }
      sym.push_back(e);
    }
  const Index m = static_cast<Index>(sym.size());
  RealMatrix l(N, m);
  for (Index c = 0; c < m; ++c)
    l.col(c) = (a * sym[static_cast<std::size_t>(c)] * a.transpose()).diagonal();

  FeasibleFamily fam;
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(l);
  cod.setThreshold(1e-10);
  const RealVector p = cod.solve(b_sq);
  fam.consistent = (l * p - b_sq).norm() <= 1e-8 * (1.0 + b_sq.norm());
  const RealMatrix nul = null_space<double>(l, 1e-10);
  fam.dimension = nul.cols();
  if (fam.dimension > 3) fail(ErrorCode::kBudgetExceeded, "enumerate_feasible: affine dimension above 3");
  auto to_matrix = [&](const RealVector& coeff) {
    RealMatrix x = RealMatrix::Zero(n, n);
    for (Index c = 0; c < m; ++c) x += coeff(c) * sym[static_cast<std::size_t>(c)];
    return x;
  };
  fam.particular = to_matrix(p);
  for (Index k = 0; k < fam.dimension; ++k) fam.basis.push_back(to_matrix(nul.col(k)));
  if (!fam.consistent) return fam;

  // Fixed trace when I = A^T c: then ||X||_F <= tr X = c . b^2 on the PSD part.
  RealVector id(m);
  for (Index c = 0; c < m; ++c) id(c) = sym[static_cast<std::size_t>(c)].trace();
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> codt(l.transpose());
  const RealVector cvec = codt.solve(id);
  const double pn = fam.particular.norm();
  if ((l.transpose() * cvec - id).norm() <= 1e-9 * id.norm()) {
    fam.radius = std::max(cvec.dot(b_sq), 0.0) * 1.000001 + 1e-12;
  } else {
    fam.bounded = false;
    fam.radius = 10.0 * (1.0 + pn);
  }

  const Index d = fam.dimension;
  if (d == 0) {
    FeasibleSample s;
    s.params = RealVector(0);
    s.x = fam.particular;
    s.eigenvalues = DescendingEigen<double>(s.x).values;
    if (s.eigenvalues(n - 1) >= -1e-9 * (1.0 + pn)) {
      fam.samples.push_back(s);
      fam.argmax_sigma1 = 0;
      fam.local_maxima = {0};
    }
    return fam;
  }

  fam.spacing = 2.0 * fam.radius / static_cast<double>(grid - 1);
  const double slack = fam.spacing * std::sqrt(static_cast<double>(d)) / 2.0;
  Index total = 1;
  for (Index k = 0; k < d; ++k) total *= grid;
  std::unordered_map<Index, Index> where;
  RealVector t(d);
  for (Index lin = 0; lin < total; ++lin) {
    Index rem = lin;
    for (Index k = 0; k < d; ++k) {
      t(k) = -fam.radius + fam.spacing * static_cast<double>(rem % grid);
      rem /= grid;
    }
    RealMatrix x = fam.at(t);
    DescendingEigen<double> eig(x);
    if (eig.values(n - 1) < -slack) continue;
    where[lin] = static_cast<Index>(fam.samples.size());
    fam.samples.push_back({t, std::move(x), eig.values});
  }
  for (Index s = 0; s < static_cast<Index>(fam.samples.size()); ++s) {
    const double s1 = fam.samples[static_cast<std::size_t>(s)].eigenvalues(0);
    if (fam.argmax_sigma1 < 0 || s1 > fam.samples[static_cast<std::size_t>(fam.argmax_sigma1)].eigenvalues(0))
      fam.argmax_sigma1 = s;
  }
  // Grid-local maxima: compare against in-band axis neighbours.
  for (const auto& [lin, s] : where) {
    const double s1 = fam.samples[static_cast<std::size_t>(s)].eigenvalues(0);
    bool is_max = true;
    Index stride = 1;
    for (Index k = 0; k < d && is_max; ++k, stride *= grid) {
      const Index coord = (lin / stride) % grid;
      for (int dir : {-1, 1}) {
        if ((dir < 0 && coord == 0) || (dir > 0 && coord == grid - 1)) continue;
        auto it = where.find(lin + dir * stride);
        if (it != where.end() && fam.samples[static_cast<std::size_t>(it->second)].eigenvalues(0) > s1 + 1e-12) {
          is_max = false;
          break;
        }
      }
    }
    if (is_max) fam.local_maxima.push_back(s);
  }
  std::sort(fam.local_maxima.begin(), fam.local_maxima.end());

  if (d == 1) {
    // lambda_min(X_p + t B) is concave in t: golden-section for its maximum,
    // then bisection for the two ends of the PSD interval.
    auto f = [&](double s) { return min_eig(RealMatrix(fam.particular + s * fam.basis[0])); };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -fam.radius, hi = fam.radius;
    double c = hi - g * (hi - lo), e = lo + g * (hi - lo);
    double fc = f(c), fe = f(e);
    for (int it = 0; it < 200; ++it) {
      if (fc < fe) {
        lo = c; c = e; fc = fe; e = lo + g * (hi - lo); fe = f(e);
      } else {
        hi = e; e = c; fe = fc; c = hi - g * (hi - lo); fc = f(c);
      }
    }
    const double tstar = 0.5 * (lo + hi);
    const double tau = 1e-9 * (1.0 + pn);
    if (f(tstar) >= -tau) {
      auto edge = [&](double inside, double outside) {
        if (f(outside) >= -tau) return outside;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (inside + outside);
          (f(mid) >= -tau ? inside : outside) = mid;
        }
        return inside;
      };
      fam.interval = std::make_pair(edge(tstar, -fam.radius), edge(tstar, fam.radius));
    }
  }
  return fam;
}

bool grid_argmin_certificate(const std::function<double(const RealVector&)>& objective, const RealVector& center,
                             double radius, int samples, Seed seed) {
  require(radius > 0, "grid_argmin_certificate: radius must be positive");
  const double f0 = objective(center);
  Rng rng(seed);
  const Index d = center.size();
  for (int s = 0; s < samples; ++s) {
    RealVector dir = rng.normal_vector<double>(d);
    const double nrm = dir.norm();
    if (nrm == 0.0) continue;
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(std::max<Index>(d, 1)));
    if (objective(RealVector(center + dir * (r / nrm))) < f0 - 1e-10) return false;
  }
  return true;
}

}  // namespace rankone
