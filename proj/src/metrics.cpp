#include "specreg/metrics.hpp"

#include "specreg/core_model.hpp"

#include <cmath>

namespace specreg {

namespace {

void renderRow(const ArCoefficientField& field, const std::vector<double>& grid, SpectrumSheet& sheet,
               std::size_t m) {
  const auto psd = arPsd(field.coeffs[m], field.errPowers[static_cast<Eigen::Index>(m)], grid);
  sheet.values.row(static_cast<Eigen::Index>(m)) = psd.values.transpose();
  sheet.poleFlags[m] = psd.poleOnGrid;
}

void checkRender(const ArCoefficientField& field, std::size_t Q) {
  if (Q < 2) throw InvalidArgument("renderSheet needs Q >= 2");
  field.validate();
}

}  // namespace

SpectrumSheet renderSheet(const ArCoefficientField& field, std::size_t Q) {
  checkRender(field, Q);
  const auto grid = uniformGrid(Q);
  SpectrumSheet sheet(field.M(), Q);
  const auto M = static_cast<std::ptrdiff_t>(field.M());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < M; ++m) renderRow(field, grid, sheet, static_cast<std::size_t>(m));
  return sheet;
}

namespace serial {
SpectrumSheet renderSheet(const ArCoefficientField& field, std::size_t Q) {
  checkRender(field, Q);
  const auto grid = uniformGrid(Q);
  SpectrumSheet sheet(field.M(), Q);
  for (std::size_t m = 0; m < field.M(); ++m) renderRow(field, grid, sheet, m);
  return sheet;
}
}  // namespace serial

double lrDistance(const SpectrumSheet& est, const SpectrumSheet& truth, int r) {
  if (r != 1 && r != 2) throw InvalidArgument("lrDistance supports r = 1 or r = 2");
  if (est.values.rows() != truth.values.rows() || est.values.cols() != truth.values.cols()) {
    throw InvalidArgument("lrDistance: sheet shapes differ");
  }
  double num = 0.0;
  double den = 0.0;
  if (r == 1) {
    num = (est.values - truth.values).cwiseAbs().sum();
    den = truth.values.cwiseAbs().sum();
  } else {
    num = (est.values - truth.values).squaredNorm();
    den = truth.values.squaredNorm();
  }
  if (!(den > 0.0)) throw InvalidArgument("lrDistance: truth sheet is identically zero");
  // The common 1/Q Riemann factor cancels.
  return num / den;
}

double rowPower(const SpectrumSheet& sheet, std::size_t m) {
  return sheet.values.row(static_cast<Eigen::Index>(m)).sum() / static_cast<double>(sheet.gridSize());
}

}  // namespace specreg
