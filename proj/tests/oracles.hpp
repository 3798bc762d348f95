#pragma once
// Test-only reference implementations. Nothing here calls into the code paths
// it is used to check.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hdogm::oracle {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// MAP batch logistic regression with an isotropic Gaussian prior N(0, prior_variance)
/// on every weight. Damped Newton iterations on the full dense Hessian.
inline std::vector<double> fit_logistic_map(const std::vector<std::vector<double>>& rows,
                                            const std::vector<int>& labels, double prior_variance,
                                            int max_iter = 100) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  std::vector<double> w(d, 0.0);

  const auto objective = [&](const std::vector<double>& wv) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < d; ++j) z += rows[i][j] * wv[j];
      // log(1 + e^z) - y z, stable form
      f += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - labels[i] * z;
    }
    for (double v : wv) f += v * v / (2.0 * prior_variance);
    return f;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<double> grad(d, 0.0);
    std::vector<double> hess(d * d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] = w[j] / prior_variance;
      hess[j * d + j] = 1.0 / prior_variance;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < d; ++j) z += rows[i][j] * w[j];
      const double p = sigmoid(z);
      const double r = p * (1.0 - p);
      for (std::size_t a = 0; a < d; ++a) {
        if (rows[i][a] == 0.0) continue;
        grad[a] += (p - labels[i]) * rows[i][a];
        for (std::size_t b = 0; b < d; ++b) hess[a * d + b] += r * rows[i][a] * rows[i][b];
      }
    }
    double gnorm = 0.0;
    for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
    if (gnorm < 1e-10) break;

    // Cholesky solve H step = grad.
    std::vector<double> L(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = hess[i * d + j];
        for (std::size_t k = 0; k < j; ++k) s -= L[i * d + k] * L[j * d + k];
        if (i == j) {
          if (s <= 0) throw std::runtime_error("oracle: Hessian not positive definite");
          L[i * d + i] = std::sqrt(s);
        } else {
          L[i * d + j] = s / L[j * d + j];
        }
      }
    }
    std::vector<double> tmp(d), step(d);
    for (std::size_t i = 0; i < d; ++i) {
      double s = grad[i];
      for (std::size_t k = 0; k < i; ++k) s -= L[i * d + k] * tmp[k];
      tmp[i] = s / L[i * d + i];
    }
    for (std::size_t i = d; i-- > 0;) {
      double s = tmp[i];
      for (std::size_t k = i + 1; k < d; ++k) s -= L[k * d + i] * step[k];
      step[i] = s / L[i * d + i];
    }

    const double f0 = objective(w);
    double t = 1.0;
    std::vector<double> trial(d);
    for (int halve = 0; halve < 40; ++halve, t *= 0.5) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = w[j] - t * step[j];
      if (objective(trial) <= f0) break;
    }
    w = trial;
  }
  return w;
}

inline double predict_logistic(const std::vector<double>& w, const std::vector<double>& x) {
  double z = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return sigmoid(z);
}

}  // namespace hdogm::oracle
