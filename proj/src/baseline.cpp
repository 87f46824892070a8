#include "specreg/baseline.hpp"

#include "specreg/core_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace specreg {

namespace {

struct StackedSystem {
  CMatrix Y;
  CVector y;
};

void appendRows(StackedSystem& sys, const DesignPair& design, double weight) {
  const auto rows = sys.Y.rows();
  const auto L = design.Ymat.rows();
  sys.Y.conservativeResize(rows + L, design.Ymat.cols());
  sys.y.conservativeResize(rows + L);
  const double s = std::sqrt(weight);
  sys.Y.bottomRows(L) = s * design.Ymat;
  sys.y.tail(L) = s * design.yvec;
}

// Least-norm LS with a relative singular-value cutoff.
CVector leastNorm(const CMatrix& Y, const CVector& y, bool& rankDeficient) {
  Eigen::JacobiSVD<CMatrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kSingularCutoff);
  rankDeficient = svd.rank() < Y.cols();
  if (svd.rank() == 0) return CVector::Zero(Y.cols());
  return svd.solve(y);
}

double flooredPower(double residual, double signalEnergy, std::size_t L) {
  const double Ld = static_cast<double>(L);
  const double floor = std::max(kErrPowerFloor * signalEnergy / Ld, std::numeric_limits<double>::min());
  return std::max(residual / Ld, floor);
}

void periodogramRow(const RangeBinDataset& data, const CVector& table, SpectrumSheet& sheet, std::size_t m) {
  const auto Q = sheet.gridSize();
  const auto& y = data.bin(m);
  const double N = static_cast<double>(data.N());
  for (std::size_t q = 0; q < Q; ++q) {
    Complex acc{0.0, 0.0};
    for (Eigen::Index t = 0; t < y.size(); ++t) {
      acc += y[t] * table[static_cast<Eigen::Index>((q * static_cast<std::size_t>(t)) % Q)];
    }
    sheet.values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(q)) = std::norm(acc) / N;
  }
}

CVector dftTable(std::size_t Q) {
  CVector table(static_cast<Eigen::Index>(Q));
  for (std::size_t i = 0; i < Q; ++i) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(Q);
    table[static_cast<Eigen::Index>(i)] = {std::cos(phase), std::sin(phase)};
  }
  return table;
}

void checkPeriodogram(const RangeBinDataset& data, std::size_t Q) {
  if (Q < data.N()) throw InvalidArgument("periodogram needs Q >= N");
}

struct PooledWindow {
  std::size_t first;
  std::size_t last;  // inclusive
};

PooledWindow windowAround(std::size_t m, std::size_t M, std::size_t W) {
  const auto before = W / 2;
  const auto after = W - 1 - before;
  const auto first = m >= before ? m - before : 0;
  const auto last = std::min(M - 1, m + after);
  return {first, last};
}

void fitAlsBin(const std::vector<DesignPair>& designs, const AlsConfig& cfg, ArCoefficientField& field,
               std::size_t m) {
  const auto M = designs.size();
  StackedSystem sys;
  sys.Y.resize(0, designs.front().Ymat.cols());
  sys.y.resize(0);
  if (const auto* win = std::get_if<SlidingWindow>(&cfg.mode)) {
    const auto range = windowAround(m, M, win->W);
    for (auto j = range.first; j <= range.last; ++j) appendRows(sys, designs[j], 1.0);
  } else {
    const double lambda = std::get<Forgetting>(cfg.mode).lambda;
    double w = 1.0;
    for (std::size_t j = m + 1; j-- > 0;) {
      appendRows(sys, designs[j], w);
      w *= lambda;
      if (w == 0.0) break;
    }
  }
  bool deficient = false;
  field.coeffs[m] = leastNorm(sys.Y, sys.y, deficient);
  field.rankDeficient[m] = deficient;
  const auto& own = designs[m];
  field.errPowers[static_cast<Eigen::Index>(m)] =
      flooredPower(residualEnergy(own, field.coeffs[m]), own.yvec.squaredNorm(),
                   static_cast<std::size_t>(own.yvec.size()));
}

ArCoefficientField emptyField(std::size_t M) {
  ArCoefficientField field;
  field.coeffs.resize(M);
  field.errPowers.resize(static_cast<Eigen::Index>(M));
  field.rankDeficient.assign(M, false);
  return field;
}

std::vector<DesignPair> allDesigns(const RangeBinDataset& data, std::size_t P, WindowingForm form) {
  rowCount(form, data.N(), P);
  std::vector<DesignPair> designs;
  designs.reserve(data.M());
  for (const auto& bin : data.bins()) designs.push_back(buildDesign(bin, P, form));
  return designs;
}

void storeLs(const LsEstimate& est, ArCoefficientField& field, std::size_t m) {
  field.coeffs[m] = est.a;
  field.errPowers[static_cast<Eigen::Index>(m)] = est.errPower;
  field.rankDeficient[m] = est.rankDeficient;
}

}  // namespace

SpectrumSheet periodogram(const RangeBinDataset& data, std::size_t Q) {
  checkPeriodogram(data, Q);
  const auto table = dftTable(Q);
  SpectrumSheet sheet(data.M(), Q);
  const auto M = static_cast<std::ptrdiff_t>(data.M());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < M; ++m) periodogramRow(data, table, sheet, static_cast<std::size_t>(m));
  return sheet;
}

LsEstimate lsEstimate(const CVector& bin, std::size_t P, WindowingForm form) {
  const auto design = buildDesign(bin, P, form);
  LsEstimate out;
  out.a = leastNorm(design.Ymat, design.yvec, out.rankDeficient);
  out.errPower = flooredPower(residualEnergy(design, out.a), design.yvec.squaredNorm(),
                              static_cast<std::size_t>(design.yvec.size()));
  return out;
}

ArCoefficientField lsField(const RangeBinDataset& data, std::size_t P, WindowingForm form) {
  rowCount(form, data.N(), P);
  auto field = emptyField(data.M());
  const auto M = static_cast<std::ptrdiff_t>(data.M());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < M; ++m) {
    const auto bin = static_cast<std::size_t>(m);
    storeLs(lsEstimate(data.bin(bin), P, form), field, bin);
  }
  return field;
}

void AlsConfig::validate() const {
  if (const auto* win = std::get_if<SlidingWindow>(&mode)) {
    if (win->W < 1) throw InvalidArgument("ALS window length W must be >= 1");
  } else {
    const double lambda = std::get<Forgetting>(mode).lambda;
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("ALS forgetting factor must lie in (0, 1]");
  }
}

ArCoefficientField alsField(const RangeBinDataset& data, std::size_t P, WindowingForm form, const AlsConfig& cfg) {
  cfg.validate();
  const auto designs = allDesigns(data, P, form);
  auto field = emptyField(data.M());
  const auto M = static_cast<std::ptrdiff_t>(data.M());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t m = 0; m < M; ++m) fitAlsBin(designs, cfg, field, static_cast<std::size_t>(m));
  return field;
}

double lsCriterion(const ArCoefficientField& field, const RangeBinDataset& data, WindowingForm form) {
  if (field.M() != data.M()) throw InvalidArgument("lsCriterion: bin count mismatch");
  double total = 0.0;
  for (std::size_t m = 0; m < data.M(); ++m) {
    total += residualEnergy(buildDesign(data.bin(m), field.order(), form), field.coeffs[m]);
  }
  return total;
}

namespace serial {

SpectrumSheet periodogram(const RangeBinDataset& data, std::size_t Q) {
  checkPeriodogram(data, Q);
  const auto table = dftTable(Q);
  SpectrumSheet sheet(data.M(), Q);
  for (std::size_t m = 0; m < data.M(); ++m) periodogramRow(data, table, sheet, m);
  return sheet;
}

ArCoefficientField lsField(const RangeBinDataset& data, std::size_t P, WindowingForm form) {
  rowCount(form, data.N(), P);
  auto field = emptyField(data.M());
  for (std::size_t m = 0; m < data.M(); ++m) storeLs(lsEstimate(data.bin(m), P, form), field, m);
  return field;
}

ArCoefficientField alsField(const RangeBinDataset& data, std::size_t P, WindowingForm form, const AlsConfig& cfg) {
  cfg.validate();
  const auto designs = allDesigns(data, P, form);
  auto field = emptyField(data.M());
  for (std::size_t m = 0; m < data.M(); ++m) fitAlsBin(designs, cfg, field, m);
  return field;
}

}  // namespace serial

}  // namespace specreg
