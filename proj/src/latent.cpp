#include <algorithm>
#include <cmath>
#include <limits>

#include "autoqsar/errors.hpp"
#include "autoqsar/fingerprints.hpp"
#include "learners_detail.hpp"

namespace autoqsar::detail {

namespace {
constexpr double kEps = 1e-12;
}

PlsFit pls_nipals(const Eigen::MatrixXd& x_centered, const Eigen::VectorXd& y_centered,
                  int max_comp) {
  const Eigen::Index p = x_centered.cols();
  PlsFit fit;
  fit.w.resize(p, max_comp);
  fit.p.resize(p, max_comp);
  fit.q.resize(max_comp);

  Eigen::MatrixXd x_res = x_centered;
  Eigen::VectorXd y_res = y_centered;
  for (int c = 0; c < max_comp; ++c) {
    Eigen::VectorXd w = x_res.transpose() * y_res;
    const double wn = w.norm();
    if (wn < kEps) break;
    w /= wn;
    Eigen::VectorXd t = x_res * w;
    const double tt = t.squaredNorm();
    if (tt < kEps) break;
    Eigen::VectorXd p_load = x_res.transpose() * t / tt;
    const double q = y_res.dot(t) / tt;
    x_res.noalias() -= t * p_load.transpose();
    y_res -= q * t;
    fit.w.col(c) = w;
    fit.p.col(c) = p_load;
    fit.q(c) = q;
    fit.components = c + 1;
  }
  return fit;
}

Eigen::VectorXd pls_beta(const PlsFit& fit, int ncomp) {
  ncomp = std::min(ncomp, fit.components);
  if (ncomp < 1) return Eigen::VectorXd::Zero(fit.w.rows());
  const Eigen::MatrixXd w = fit.w.leftCols(ncomp);
  const Eigen::MatrixXd p = fit.p.leftCols(ncomp);
  const Eigen::VectorXd q = fit.q.head(ncomp);
  return w * (p.transpose() * w).colPivHouseholderQr().solve(q);
}

PcrFit pcr_fit(const Eigen::MatrixXd& x_centered, const Eigen::VectorXd& y_centered) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x_centered,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double tol = std::max(x_centered.rows(), x_centered.cols()) *
                     std::numeric_limits<double>::epsilon() *
                     (sigma.size() > 0 ? sigma(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > tol) ++rank;

  PcrFit fit;
  fit.rank = rank;
  fit.v = svd.matrixV().leftCols(rank);
  fit.gamma.resize(rank);
  // Scores t_c = sigma_c * u_c are orthogonal: per-component regression.
  for (int c = 0; c < rank; ++c)
    fit.gamma(c) = svd.matrixU().col(c).dot(y_centered) / sigma(c);
  return fit;
}

Eigen::VectorXd pcr_beta(const PcrFit& fit, int ncomp) {
  ncomp = std::min(ncomp, fit.rank);
  if (ncomp < 1) return Eigen::VectorXd::Zero(fit.v.rows());
  return fit.v.leftCols(ncomp) * fit.gamma.head(ncomp);
}

KplsFit kpls_nipals(const Eigen::MatrixXd& k_centered, const Eigen::VectorXd& y_centered,
                    int max_comp) {
  const Eigen::Index n = k_centered.rows();
  KplsFit fit;
  fit.t.resize(n, max_comp);
  fit.u.resize(n, max_comp);

  Eigen::MatrixXd k_res = k_centered;
  Eigen::VectorXd y_res = y_centered;
  for (int c = 0; c < max_comp; ++c) {
    const double yn = y_res.norm();
    if (yn < kEps) break;
    Eigen::VectorXd u = y_res / yn;
    Eigen::VectorXd t = k_res * u;
    const double tn = t.norm();
    if (tn < kEps) break;
    t /= tn;
    // Deflate kernel and response: K <- (I - t t')K(I - t t').
    const Eigen::VectorXd kt = k_res * t;
    k_res.noalias() -= t * kt.transpose();
    const Eigen::VectorXd kt2 = k_res * t;  // K after left deflation, times t
    k_res.noalias() -= kt2 * t.transpose();
    y_res -= t * t.dot(y_res);
    fit.t.col(c) = t;
    fit.u.col(c) = u;
    fit.components = c + 1;
  }
  return fit;
}

Eigen::VectorXd kpls_alpha(const KplsFit& fit, const Eigen::MatrixXd& k_centered,
                           const Eigen::VectorXd& y_centered, int ncomp) {
  ncomp = std::min(ncomp, fit.components);
  if (ncomp < 1) return Eigen::VectorXd::Zero(k_centered.rows());
  const Eigen::MatrixXd t = fit.t.leftCols(ncomp);
  const Eigen::MatrixXd u = fit.u.leftCols(ncomp);
  const Eigen::MatrixXd m = t.transpose() * k_centered * u;  // ncomp x ncomp
  return u * m.colPivHouseholderQr().solve(t.transpose() * y_centered);
}

Eigen::MatrixXd kernel_block(KernelKind kind, double gamma,
                             const std::vector<const Fingerprint*>& a,
                             const std::vector<const Fingerprint*>& b) {
  if (kind != KernelKind::Tanimoto)
    throw ConfigError("fingerprint kernels are tanimoto only");
  (void)gamma;
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()),
                    static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          tanimoto(*a[i], *b[j]);
  return k;
}

Eigen::MatrixXd kernel_block(KernelKind kind, double gamma, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
  switch (kind) {
    case KernelKind::Linear:
      return a * b.transpose();
    case KernelKind::Gaussian: {
      Eigen::MatrixXd k(a.rows(), b.rows());
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j)
          k(i, j) = std::exp(-gamma * (a.row(i) - b.row(j)).squaredNorm());
      return k;
    }
    case KernelKind::Tanimoto:
      throw ConfigError("tanimoto kernel needs fingerprints");
  }
  throw ConfigError("unknown kernel");
}

double gaussian_gamma(const Eigen::MatrixXd& x_std) {
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(x_std.rows()) * (x_std.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < x_std.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x_std.rows(); ++j)
      dists.push_back((x_std.row(i) - x_std.row(j)).norm());
  if (dists.empty()) return 1.0;
  std::sort(dists.begin(), dists.end());
  const double median = dists[(dists.size() - 1) / 2];  // lower median
  if (median < 1e-12) return 1.0;
  return 1.0 / (median * median);
}

}  // namespace autoqsar::detail
