#pragma once

#include "specreg/kalman.hpp"
#include "specreg/metrics.hpp"
#include "specreg/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace specreg {

inline constexpr std::size_t kDefaultPowerWindow = 5;

struct PowerWeights {
  RVector raw;       // ||y_m||^2 / N
  RVector smoothed;  // centered moving average, renormalized to the raw total
  std::size_t windowLen = 1;
  bool allZero = false;

  std::span<const double> weights() const { return {smoothed.data(), static_cast<std::size_t>(smoothed.size())}; }
};

PowerWeights powerWeights(const RangeBinDataset& data, std::size_t windowLen = kDefaultPowerWindow);

/// Hyperparameter co-log-likelihood from the forward filter innovations,
/// without the (sum L_m) ln pi constant.
double hcllEvaluate(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                    std::span<const double> weights);

/// log10 search box for (lambda_s, lambda_d).
struct SearchBox {
  double sLo = -4.0, sHi = 4.0;
  double dLo = -4.0, dHi = 4.0;
  void validate() const;
};

struct TuneOptions {
  SearchBox box;
  double tol = 1e-4;      // stop when one sweep improves HCLL by less than this
  double lineTol = 1e-3;  // golden-section bracket width in log10 units
  int maxSweeps = 50;
  /// Starting point in log10 units; defaults to the box center.
  std::optional<std::pair<double, double>> start;
};

struct TraceEntry {
  double log10S;
  double log10D;
  double hcll;
  bool accepted;
};

struct TuneResult {
  double lambdaS = 0.0;
  double lambdaD = 0.0;
  double hcll = 0.0;
  std::vector<TraceEntry> trace;
  int sweeps = 0;
  bool converged = false;
  bool boundaryHit = false;
};

struct LineMinimum {
  double x;
  double value;
};

/// Golden-section minimization of a unimodal function on [lo, hi].
LineMinimum goldenSection(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Coordinate descent over (log10 lambda_s, log10 lambda_d) with golden-section line searches.
TuneResult tune(const std::function<double(double, double)>& objective, const TuneOptions& options = {});

/// ML tuning of (lambda_s, lambda_d) at fixed order P and smoothness k.
TuneResult tune(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                double k, const TuneOptions& options = {});

/// Rectangular log10 grid; rows index lambda_s, columns lambda_d.
struct SweepGrid {
  std::vector<double> log10S;
  std::vector<double> log10D;

  static SweepGrid uniform(double sLo, double sHi, std::size_t nS, double dLo, double dHi, std::size_t nD);
};

/// HCLL at every grid node, evaluated in parallel. Failed nodes hold NaN.
RMatrix hcllSweep(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                  double k, const SweepGrid& grid);

/// L^2 distance of the RegLS estimate to the dataset truth at every node.
RMatrix l2Sweep(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                double k, const SweepGrid& grid, std::size_t Q = kDefaultGridSize);

/// Smoothed RegLS field whose rendered PSD rows carry the weights' power.
ArCoefficientField regularizedEstimate(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                                       std::span<const double> weights, std::size_t Q = kDefaultGridSize);

/// Rescales errPowers so each rendered row integrates to targets[m].
void matchPowers(ArCoefficientField& field, std::span<const double> targets, std::size_t Q = kDefaultGridSize);

struct GridMinimum {
  std::size_t row;
  std::size_t col;
  double value;
};
/// Smallest finite entry. Throws if there is none.
GridMinimum gridMinimum(const RMatrix& sheet);

namespace serial {
RMatrix hcllSweep(const RangeBinDataset& data, WindowingForm form, std::span<const double> weights, std::size_t P,
                  double k, const SweepGrid& grid);
}

}  // namespace specreg
