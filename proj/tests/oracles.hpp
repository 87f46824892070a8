#pragma once
// Independent reference computations used only by the tests. Nothing here
// calls the library's solvers; the formulas are written out from scratch.

#include "specreg/types.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using specreg::Complex;
using specreg::CMatrix;
using specreg::CVector;
using specreg::RVector;
using specreg::WindowingForm;

inline CVector randomVector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = {g(rng), g(rng)};
  return v;
}

inline std::vector<CVector> randomBins(std::mt19937_64& rng, std::size_t M, std::size_t N, double scale = 1.0) {
  std::vector<CVector> bins;
  for (std::size_t m = 0; m < M; ++m) bins.push_back(randomVector(rng, static_cast<Eigen::Index>(N), scale));
  return bins;
}

inline std::vector<double> randomWeights(std::mt19937_64& rng, std::size_t M) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<double> w(M);
  for (auto& x : w) x = u(rng);
  return w;
}

// ---- design matrices -------------------------------------------------------

inline Complex padded(const CVector& y, long i) {
  return (i < 0 || i >= y.size()) ? Complex{} : y[i];
}

/// Prediction instants covered by each form.
inline std::pair<long, long> instants(WindowingForm form, long N, long P) {
  switch (form) {
    case WindowingForm::NonWindowed:
      return {P, N - 1};
    case WindowingForm::PreWindowed:
      return {0, N - 1};
    case WindowingForm::PostWindowed:
      return {P, N + P - 1};
    case WindowingForm::DoubleWindowed:
      return {0, N + P - 1};
  }
  return {0, -1};
}

/// Stacks the rows (y_t ; y_{t-1} ... y_{t-P}) for every instant t.
inline std::pair<CVector, CMatrix> design(const CVector& y, long P, WindowingForm form) {
  const auto [first, last] = instants(form, static_cast<long>(y.size()), P);
  const long L = last - first + 1;
  CVector yv(L);
  CMatrix Y(L, P);
  for (long r = 0; r < L; ++r) {
    const long t = first + r;
    yv[r] = padded(y, t);
    for (long p = 1; p <= P; ++p) Y(r, p - 1) = padded(y, t - p);
  }
  return {yv, Y};
}

// ---- spectral quantities ---------------------------------------------------

inline RVector deltaDiag(double k, long P) {
  RVector d(P);
  for (long p = 1; p <= P; ++p) d[p - 1] = std::exp(2.0 * k * std::log(static_cast<double>(p)));
  return d;
}

/// Trapezoid rule for the integral over [0, 1] of |d^k/dnu^k A_c(nu)|^2,
/// A_c(nu) = sum_p c_p exp(-2 j pi nu p), on `points` intervals.
inline double derivativeEnergy(const CVector& c, int k, int points) {
  double acc = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double nu = static_cast<double>(i) / points;
    Complex v{};
    for (Eigen::Index p = 1; p <= c.size(); ++p) {
      const Complex factor = std::pow(Complex{0.0, -2.0 * std::numbers::pi * static_cast<double>(p)}, k);
      v += c[p - 1] * factor * std::exp(Complex{0.0, -2.0 * std::numbers::pi * nu * static_cast<double>(p)});
    }
    acc += ((i == 0 || i == points) ? 0.5 : 1.0) * std::norm(v);
  }
  return acc / points;
}

// ---- stationary state-space model ------------------------------------------

/// Fixed point of u -> 1 / (2 + rho - u), by plain iteration from 0.
inline double iterateAlpha(double rho, int maxIter = 100000000) {
  double u = 0.0;
  for (int i = 0; i < maxIter; ++i) {
    const double next = 1.0 / (2.0 + rho - u);
    if (next == u) break;
    u = next;
  }
  return u;
}

struct Model {
  double alpha, rEps, rA;
};

inline Model model(double lambdaS, double lambdaD) {
  const double rho = lambdaS / lambdaD;
  const double alpha = iterateAlpha(rho);
  const double rEps = alpha / lambdaD;
  return {alpha, rEps, rEps / (1.0 - alpha * alpha)};
}

/// Negative log posterior of the Gauss-Markov chain (constants dropped):
/// fidelity + a_1' D a_1 / rA + sum_m (a_m - alpha a_{m-1})' D (...) / rEps.
inline double stateSpaceCriterion(const std::vector<CVector>& a, const std::vector<CVector>& bins, long P,
                                  WindowingForm form, const std::vector<double>& w, double k, const Model& mdl) {
  const RVector d = deltaDiag(k, P);
  auto quad = [&](const CVector& v) {
    double s = 0.0;
    for (long p = 0; p < P; ++p) s += d[p] * std::norm(v[p]);
    return s;
  };
  double q = 0.0;
  for (std::size_t m = 0; m < bins.size(); ++m) {
    const auto [yv, Y] = design(bins[m], P, form);
    q += (yv - Y * a[m]).squaredNorm() / w[m];
  }
  q += quad(a[0]) / mdl.rA;
  for (std::size_t m = 1; m < a.size(); ++m) q += quad(a[m] - mdl.alpha * a[m - 1]) / mdl.rEps;
  return q;
}

/// Regularized criterion written from its three terms.
inline double regularizedCriterion(const std::vector<CVector>& a, const std::vector<CVector>& bins, long P,
                                   WindowingForm form, const std::vector<double>& w, double k, double lambdaS,
                                   double lambdaD) {
  const RVector d = deltaDiag(k, P);
  double fid = 0.0, smooth = 0.0, cont = 0.0;
  for (std::size_t m = 0; m < bins.size(); ++m) {
    const auto [yv, Y] = design(bins[m], P, form);
    fid += (yv - Y * a[m]).squaredNorm() / w[m];
    for (long p = 0; p < P; ++p) smooth += d[p] * std::norm(a[m][p]);
    if (m + 1 < bins.size()) {
      for (long p = 0; p < P; ++p) cont += d[p] * std::norm(a[m][p] - a[m + 1][p]);
    }
  }
  return fid + lambdaS * smooth + lambdaD * cont;
}

/// Central-difference gradient over the 2MP real coordinates.
template <typename F>
RVector numericGradient(const F& objective, std::vector<CVector> a, double h = 1e-5) {
  const std::size_t M = a.size();
  const long P = a.front().size();
  RVector g(static_cast<Eigen::Index>(2 * M * static_cast<std::size_t>(P)));
  Eigen::Index i = 0;
  for (std::size_t m = 0; m < M; ++m) {
    for (long p = 0; p < P; ++p) {
      for (const Complex dir : {Complex{1.0, 0.0}, Complex{0.0, 1.0}}) {
        const Complex keep = a[m][p];
        a[m][p] = keep + h * dir;
        const double up = objective(a);
        a[m][p] = keep - h * dir;
        const double down = objective(a);
        a[m][p] = keep;
        g[i++] = (up - down) / (2.0 * h);
      }
    }
  }
  return g;
}

/// Prior covariance of the stacked state: Cov(a_m, a_n) = alpha^|m-n| rA D^{-1}.
inline CMatrix stackedPrior(std::size_t M, long P, double k, const Model& mdl) {
  const RVector d = deltaDiag(k, P);
  CMatrix S = CMatrix::Zero(static_cast<Eigen::Index>(M) * P, static_cast<Eigen::Index>(M) * P);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < M; ++n) {
      const double c = mdl.rA * std::pow(mdl.alpha, std::abs(static_cast<double>(m) - static_cast<double>(n)));
      for (long p = 0; p < P; ++p) S(static_cast<Eigen::Index>(m) * P + p, static_cast<Eigen::Index>(n) * P + p) = c / d[p];
    }
  }
  return S;
}

struct Evidence {
  double negLogDensity;  // -ln f(y), including the n ln pi constant
  std::size_t observations;
};

/// -ln of the circular complex Gaussian density of all stacked observations,
/// z = H a + noise with a drawn from the stationary prior.
inline Evidence denseEvidence(const std::vector<CVector>& bins, long P, WindowingForm form,
                              const std::vector<double>& w, double k, const Model& mdl) {
  const std::size_t M = bins.size();
  std::vector<std::pair<CVector, CMatrix>> rows;
  Eigen::Index n = 0;
  for (const auto& y : bins) {
    rows.push_back(design(y, P, form));
    n += rows.back().first.size();
  }
  CMatrix H = CMatrix::Zero(n, static_cast<Eigen::Index>(M) * P);
  CVector z(n);
  RVector noise(n);
  Eigen::Index r = 0;
  for (std::size_t m = 0; m < M; ++m) {
    const auto& [yv, Y] = rows[m];
    H.block(r, static_cast<Eigen::Index>(m) * P, yv.size(), P) = Y;
    z.segment(r, yv.size()) = yv;
    noise.segment(r, yv.size()).setConstant(w[m]);
    r += yv.size();
  }
  CMatrix C = H * stackedPrior(M, P, k, mdl) * H.adjoint();
  C.diagonal() += noise.cast<Complex>();
  C = 0.5 * (C + C.adjoint()).eval();
  Eigen::LLT<CMatrix> llt(C);
  const double logDet = 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
  const double quad = z.dot(llt.solve(z)).real();
  return {static_cast<double>(n) * std::log(std::numbers::pi) + logDet + quad, static_cast<std::size_t>(n)};
}

/// Posterior mean of a single bin under the prior CN(0, rA D^{-1}).
inline CVector singleBinRidge(const CVector& y, long P, WindowingForm form, double w, double k, double rA) {
  const auto [yv, Y] = design(y, P, form);
  CMatrix A = Y.adjoint() * Y / w;
  A.diagonal() += (deltaDiag(k, P) / rA).cast<Complex>();
  return A.ldlt().solve(Y.adjoint() * yv / w);
}

// ---- power weights ---------------------------------------------------------

/// Centered moving average truncated at the edges (mean over the bins present).
inline std::vector<double> movingAverage(const std::vector<double>& x, long win) {
  const long M = static_cast<long>(x.size());
  const long h = win / 2;
  std::vector<double> out(x.size());
  for (long m = 0; m < M; ++m) {
    double s = 0.0;
    int c = 0;
    for (long j = m - h; j <= m + h; ++j) {
      if (j >= 0 && j < M) {
        s += x[j];
        ++c;
      }
    }
    out[m] = s / c;
  }
  return out;
}

}  // namespace oracle
