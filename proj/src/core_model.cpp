#include "specreg/core_model.hpp"

#include <cmath>
#include <numbers>

namespace specreg {

namespace {

Complex paddedSample(const CVector& bin, std::ptrdiff_t t) {
  if (t < 0 || t >= bin.size()) return Complex{0.0, 0.0};
  return bin[t];
}

std::ptrdiff_t firstRow(WindowingForm form, std::size_t P) {
  switch (form) {
    case WindowingForm::NonWindowed:
    case WindowingForm::PostWindowed:
      return static_cast<std::ptrdiff_t>(P);
    case WindowingForm::PreWindowed:
    case WindowingForm::DoubleWindowed:
      return 0;
  }
  return 0;
}

double weightedNorm(const CVector& v, const RVector& diag) {
  double acc = 0.0;
  for (Eigen::Index p = 0; p < v.size(); ++p) acc += diag[p] * std::norm(v[p]);
  return acc;
}

}  // namespace

DesignPair buildDesign(const CVector& bin, std::size_t P, WindowingForm form) {
  const auto N = static_cast<std::size_t>(bin.size());
  const auto L = rowCount(form, N, P);
  const auto t0 = firstRow(form, P);

  DesignPair out;
  out.yvec.resize(static_cast<Eigen::Index>(L));
  out.Ymat.resize(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(P));
  for (std::size_t row = 0; row < L; ++row) {
    const auto t = t0 + static_cast<std::ptrdiff_t>(row);
    const auto r = static_cast<Eigen::Index>(row);
    out.yvec[r] = paddedSample(bin, t);
    for (std::size_t p = 1; p <= P; ++p) {
      out.Ymat(r, static_cast<Eigen::Index>(p - 1)) = paddedSample(bin, t - static_cast<std::ptrdiff_t>(p));
    }
  }
  return out;
}

Complex transferDenominator(const CVector& a, double nu) {
  Complex acc{1.0, 0.0};
  for (Eigen::Index p = 0; p < a.size(); ++p) {
    const double phase = -2.0 * std::numbers::pi * nu * static_cast<double>(p + 1);
    acc -= a[p] * Complex{std::cos(phase), std::sin(phase)};
  }
  return acc;
}

PsdResult arPsd(const CVector& a, double errPower, std::span<const double> nuGrid, double ceilingFactor) {
  if (!(errPower > 0.0)) throw InvalidArgument("arPsd needs a positive error power");
  PsdResult out;
  out.values.resize(static_cast<Eigen::Index>(nuGrid.size()));
  const double ceiling = ceilingFactor * errPower;
  for (std::size_t q = 0; q < nuGrid.size(); ++q) {
    const double denom = std::norm(transferDenominator(a, nuGrid[q]));
    double value;
    if (denom < kPsdDenominatorFloor) {
      value = ceiling;
      out.poleOnGrid = true;
    } else {
      value = errPower / denom;
      if (!std::isfinite(value)) {
        value = ceiling;
        out.poleOnGrid = true;
      }
    }
    out.values[static_cast<Eigen::Index>(q)] = value;
  }
  return out;
}

std::vector<double> uniformGrid(std::size_t Q) {
  std::vector<double> grid(Q);
  for (std::size_t q = 0; q < Q; ++q) grid[q] = static_cast<double>(q) / static_cast<double>(Q);
  return grid;
}

double sobolevDistance(const CVector& a, const CVector& b, const SpectralMatrix& delta) {
  const auto P = static_cast<Eigen::Index>(delta.order());
  if (a.size() != P || b.size() != P) throw InvalidArgument("sobolevDistance: dimension mismatch");
  return weightedNorm(a - b, delta.diag());
}

double sobolevSmoothness(const CVector& a, const SpectralMatrix& delta) {
  if (a.size() != static_cast<Eigen::Index>(delta.order())) {
    throw InvalidArgument("sobolevSmoothness: dimension mismatch");
  }
  return weightedNorm(a, delta.diag());
}

double residualEnergy(const DesignPair& design, const CVector& a) {
  return (design.yvec - design.Ymat * a).squaredNorm();
}

double regCriterion(const ArCoefficientField& field, const RangeBinDataset& data, const HyperParameters& hp,
                    WindowingForm form, std::span<const double> weights) {
  hp.validate();
  const auto M = data.M();
  if (field.M() != M || weights.size() != M) throw InvalidArgument("regCriterion: bin count mismatch");
  const SpectralMatrix delta(hp.k, hp.P);

  double fidelity = 0.0;
  double smooth = 0.0;
  double depth = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    if (!(weights[m] > 0.0)) throw InvalidArgument("regCriterion: weights must be positive");
    const auto design = buildDesign(data.bin(m), hp.P, form);
    fidelity += residualEnergy(design, field.coeffs[m]) / weights[m];
    smooth += sobolevSmoothness(field.coeffs[m], delta);
    if (m + 1 < M) depth += sobolevDistance(field.coeffs[m], field.coeffs[m + 1], delta);
  }
  return fidelity + hp.lambdaS * smooth + hp.lambdaD * depth;
}

}  // namespace specreg
