#include "specreg/tuner.hpp"

#include "specreg/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specreg {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2

HyperParameters pointToHp(double log10S, double log10D, std::size_t P, double k) {
  HyperParameters hp;
  hp.lambdaS = std::pow(10.0, log10S);
  hp.lambdaD = std::pow(10.0, log10D);
  hp.P = P;
  hp.k = k;
  return hp;
}

double nodeHcll(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                double k, double log10S, double log10D) {
  try {
    return hcllEvaluate(data, pointToHp(log10S, log10D, P, k), form, weights);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void checkSweep(const SweepGrid& grid) {
  if (grid.log10S.empty() || grid.log10D.empty()) throw InvalidArgument("sweep grid must be non-empty");
}

}  // namespace

PowerWeights powerWeights(const RangeBinDataset& data, std::size_t windowLen) {
  if (windowLen < 1 || windowLen % 2 == 0) throw InvalidArgument("power window length must be odd and >= 1");
  const auto M = static_cast<Eigen::Index>(data.M());
  const double N = static_cast<double>(data.N());
  PowerWeights pw;
  pw.windowLen = windowLen;
  pw.raw.resize(M);
  for (Eigen::Index m = 0; m < M; ++m) pw.raw[m] = data.bin(static_cast<std::size_t>(m)).squaredNorm() / N;

  const auto half = static_cast<Eigen::Index>(windowLen / 2);
  RVector avg(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    const auto lo = std::max<Eigen::Index>(0, m - half);
    const auto hi = std::min<Eigen::Index>(M - 1, m + half);
    avg[m] = pw.raw.segment(lo, hi - lo + 1).mean();
  }
  const double rawTotal = pw.raw.sum();
  const double avgTotal = avg.sum();
  pw.smoothed = avgTotal > 0.0 ? RVector(avg * (rawTotal / avgTotal)) : avg;

  const double maxRaw = pw.raw.maxCoeff();
  pw.allZero = !(maxRaw > 0.0);
  const double floor = pw.allZero ? std::numeric_limits<double>::min() : 1e-12 * maxRaw;
  pw.smoothed = pw.smoothed.cwiseMax(floor);
  return pw;
}

double hcllEvaluate(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                    std::span<const double> weights) {
  return kalmanFilter(data, hp, form, weights, stationaryModel(hp)).coLogLikelihood;
}

void SearchBox::validate() const {
  for (double v : {sLo, sHi, dLo, dHi}) {
    if (!std::isfinite(v)) throw InvalidArgument("search box bounds must be finite");
  }
  if (!(sLo < sHi) || !(dLo < dHi)) throw InvalidArgument("search box bounds must be increasing");
}

LineMinimum goldenSection(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? LineMinimum{c, fc} : LineMinimum{d, fd};
}

TuneResult tune(const std::function<double(double, double)>& objective, const TuneOptions& options) {
  options.box.validate();
  if (!(options.tol > 0.0) || !(options.lineTol > 0.0)) throw InvalidArgument("tolerances must be positive");
  const auto& box = options.box;

  double u = 0.5 * (box.sLo + box.sHi);
  double v = 0.5 * (box.dLo + box.dHi);
  if (options.start) {
    u = std::clamp(options.start->first, box.sLo, box.sHi);
    v = std::clamp(options.start->second, box.dLo, box.dHi);
  }

  TuneResult res;
  double best = objective(u, v);
  res.trace.push_back({u, v, best, true});

  for (int sweep = 0; sweep < options.maxSweeps; ++sweep) {
    const double before = best;

    const auto lineS = goldenSection([&](double x) { return objective(x, v); }, box.sLo, box.sHi, options.lineTol);
    const bool takeS = lineS.value < best;
    if (takeS) {
      u = lineS.x;
      best = lineS.value;
    }
    res.trace.push_back({lineS.x, v, lineS.value, takeS});

    const auto lineD = goldenSection([&](double x) { return objective(u, x); }, box.dLo, box.dHi, options.lineTol);
    const bool takeD = lineD.value < best;
    if (takeD) {
      v = lineD.x;
      best = lineD.value;
    }
    res.trace.push_back({u, lineD.x, lineD.value, takeD});

    res.sweeps = sweep + 1;
    if (before - best < options.tol) {
      res.converged = true;
      break;
    }
  }

  res.lambdaS = std::pow(10.0, u);
  res.lambdaD = std::pow(10.0, v);
  res.hcll = best;
  const double edge = 2.0 * options.lineTol;
  res.boundaryHit = u - box.sLo < edge || box.sHi - u < edge || v - box.dLo < edge || box.dHi - v < edge;
  return res;
}

TuneResult tune(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                double k, const TuneOptions& options) {
  // Validate once so failures surface as exceptions rather than NaN objective values.
  pointToHp(0.0, 0.0, P, k).validate();
  rowCount(form, data.N(), P);
  return tune(
      [&](double u, double v) {
        const double value = nodeHcll(data, form, weights, P, k, u, v);
        return std::isnan(value) ? std::numeric_limits<double>::infinity() : value;
      },
      options);
}

SweepGrid SweepGrid::uniform(double sLo, double sHi, std::size_t nS, double dLo, double dHi, std::size_t nD) {
  if (nS < 1 || nD < 1) throw InvalidArgument("sweep grid needs at least one node per axis");
  SweepGrid grid;
  auto axis = [](double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    return out;
  };
  grid.log10S = axis(sLo, sHi, nS);
  grid.log10D = axis(dLo, dHi, nD);
  return grid;
}

RMatrix hcllSweep(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                  double k, const SweepGrid& grid) {
  checkSweep(grid);
  const auto nS = grid.log10S.size();
  const auto nD = grid.log10D.size();
  RMatrix out(static_cast<Eigen::Index>(nS), static_cast<Eigen::Index>(nD));
  const auto nodes = static_cast<std::ptrdiff_t>(nS * nD);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < nodes; ++idx) {
    const auto i = static_cast<std::size_t>(idx) / nD;
    const auto j = static_cast<std::size_t>(idx) % nD;
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        nodeHcll(data, form, weights, P, k, grid.log10S[i], grid.log10D[j]);
  }
  return out;
}

namespace serial {
RMatrix hcllSweep(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                  double k, const SweepGrid& grid) {
  checkSweep(grid);
  RMatrix out(static_cast<Eigen::Index>(grid.log10S.size()), static_cast<Eigen::Index>(grid.log10D.size()));
  for (std::size_t i = 0; i < grid.log10S.size(); ++i) {
    for (std::size_t j = 0; j < grid.log10D.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          nodeHcll(data, form, weights, P, k, grid.log10S[i], grid.log10D[j]);
    }
  }
  return out;
}
}  // namespace serial

RMatrix l2Sweep(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                double k, const SweepGrid& grid, std::size_t Q) {
  checkSweep(grid);
  if (!data.truth()) throw InvalidArgument("l2Sweep needs a dataset with a truth sheet");
  const auto& truth = *data.truth();
  if (truth.gridSize() != Q) throw InvalidArgument("l2Sweep: truth grid size differs from Q");
  const auto nD = grid.log10D.size();
  RMatrix out(static_cast<Eigen::Index>(grid.log10S.size()), static_cast<Eigen::Index>(nD));
  const auto nodes = static_cast<std::ptrdiff_t>(grid.log10S.size() * nD);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < nodes; ++idx) {
    const auto i = static_cast<std::size_t>(idx) / nD;
    const auto j = static_cast<std::size_t>(idx) % nD;
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      const auto hp = pointToHp(grid.log10S[i], grid.log10D[j], P, k);
      const auto field = regularizedEstimate(data, hp, form, weights, Q);
      value = lrDistance(serial::renderSheet(field, Q), truth, 2);
    } catch (const std::exception&) {
    }
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
  }
  return out;
}

void matchPowers(ArCoefficientField& field, std::span<const double> targets, std::size_t Q) {
  if (targets.size() != field.M()) throw InvalidArgument("matchPowers: one target per bin is required");
  const auto grid = uniformGrid(Q);
  for (std::size_t m = 0; m < field.M(); ++m) {
    if (!(targets[m] > 0.0)) throw InvalidArgument("matchPowers: targets must be positive");
    const auto unit = arPsd(field.coeffs[m], 1.0, grid);
    field.errPowers[static_cast<Eigen::Index>(m)] = targets[m] / unit.values.mean();
  }
}

ArCoefficientField regularizedEstimate(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                                       std::span<const double> weights, std::size_t Q) {
  auto out = kalmanSmooth(data, hp, form, weights, stationaryModel(hp));
  matchPowers(out.field, weights, Q);
  return std::move(out.field);
}

GridMinimum gridMinimum(const RMatrix& sheet) {
  GridMinimum best{0, 0, std::numeric_limits<double>::infinity()};
  bool found = false;
  for (Eigen::Index i = 0; i < sheet.rows(); ++i) {
    for (Eigen::Index j = 0; j < sheet.cols(); ++j) {
      const double v = sheet(i, j);
      if (std::isfinite(v) && v < best.value) {
        best = {static_cast<std::size_t>(i), static_cast<std::size_t>(j), v};
        found = true;
      }
    }
  }
  if (!found) throw InvalidArgument("grid has no finite entry");
  return best;
}

}  // namespace specreg
