#pragma once

#include "specreg/core_model.hpp"
#include "specreg/types.hpp"

#include <span>
#include <vector>

namespace specreg {

/// Stationary first-order state model a_{m+1} = alpha a_m + eps_m with
/// eps_m ~ CN(0, rEps Delta^{-1}) and a_1 ~ CN(0, rA Delta^{-1}).
struct StationaryModel {
  double alphaInf = 0.0;
  double rEpsInf = 0.0;
  double rAInf = 0.0;
  SpectralMatrix delta{1.0, 1};
  double rho = 0.0;
};

/// Closed-form stationary parameters for the given (lambda_s, lambda_d).
StationaryModel stationaryModel(const HyperParameters& hp);

/// Fixed-point map f(u) = 1 / (2 + rho - u) of the alpha recursion.
inline double alphaMap(double u, double rho) { return 1.0 / (2.0 + rho - u); }

/// Time-varying parameters whose smoother minimizes the regularized
/// criterion exactly, including at the edges. Index i holds the
/// transition from bin i to bin i + 1 (0-based).
struct HomogeneousSchedule {
  RVector alphas;
  RVector rEps;
  double rA = 0.0;
};

HomogeneousSchedule homogeneousSchedule(const HyperParameters& hp, std::size_t M);

struct SmootherOptions {
  /// Treat the initial moments as the prior at bin 1 and correct with y_1.
  /// false reproduces the literal reading where bin 1 is never observed.
  bool correctFirstBin = true;
};

/// Forward-pass results. innovations/innovationCovs are empty for bins the
/// filter does not correct (bin 0 when correctFirstBin is false).
struct FilterOutput {
  std::vector<CVector> predicted;  // a_{m|m-1}
  std::vector<CMatrix> predictedCovs;
  std::vector<CVector> filtered;  // a_{m|m}
  std::vector<CMatrix> filteredCovs;
  std::vector<CVector> innovations;  // e_m
  std::vector<CMatrix> innovationCovs;  // R_m
  /// sum_m ln det R_m + e_m^H R_m^{-1} e_m over corrected bins.
  double coLogLikelihood = 0.0;
};

struct SmootherOutput {
  ArCoefficientField field;  // a_{m|M}; errPowers carry the weights used
  std::vector<CMatrix> covariances;  // P_{m|M}
  std::vector<CVector> innovations;
  std::vector<CMatrix> innovationCovs;
};

FilterOutput kalmanFilter(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                          std::span<const double> weights, const StationaryModel& model,
                          const SmootherOptions& options = {});

SmootherOutput kalmanSmooth(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                            std::span<const double> weights, const StationaryModel& model,
                            const SmootherOptions& options = {});

/// Smoother driven by the homogeneous schedule; minimizes regCriterion.
SmootherOutput kalmanSmooth(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                            std::span<const double> weights, const HomogeneousSchedule& schedule,
                            const SmootherOptions& options = {});

/// Largest M*P accepted by the dense oracle solves.
inline constexpr std::size_t kDirectSolveLimit = 2000;

/// Dense Hermitian solve of grad Q^S = 0, assembled term by term.
ArCoefficientField directSolve(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                               std::span<const double> weights, const StationaryModel& model);

/// Dense Hermitian solve of grad Q^Reg = 0 (no edge terms).
ArCoefficientField directSolveReg(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                                  std::span<const double> weights);

/// The criterion minimized by the stationary smoother: regCriterion with
/// the model's coefficients plus alpha (1 - alpha) / rEps (s_1 + s_M).
double stationaryCriterion(const ArCoefficientField& field, const RangeBinDataset& data, const HyperParameters& hp,
                           WindowingForm form, std::span<const double> weights, const StationaryModel& model);

/// Edge contribution alone.
double stationaryEdgeTerms(const ArCoefficientField& field, const StationaryModel& model);

}  // namespace specreg
