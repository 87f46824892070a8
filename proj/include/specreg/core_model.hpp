#pragma once

#include "specreg/types.hpp"

#include <span>

namespace specreg {

/// Builds the prediction vector and regression matrix of one bin.
///
/// Rows run over prediction instants t = t0, ..., t0 + L - 1, where
/// t0 = P for the forms that do not pad the start (non- and post-windowed)
/// and t0 = 0 otherwise. Row t holds y_t and the past samples
/// y_{t-1}, ..., y_{t-P}, with zeros outside 0..N-1.
DesignPair buildDesign(const CVector& bin, std::size_t P, WindowingForm form);

/// Default ceiling applied to pole-on-grid PSD values, relative to errPower.
inline constexpr double kPsdCeilingFactor = 1e12;
inline constexpr double kPsdDenominatorFloor = 1e-300;

struct PsdResult {
  RVector values;
  bool poleOnGrid = false;
};

/// Evaluates 1 - sum_p a_p exp(-2 j pi nu p) at nu.
Complex transferDenominator(const CVector& a, double nu);

/// AR power spectral density errPower / |1 - A(nu)|^2 on the given grid.
PsdResult arPsd(const CVector& a, double errPower, std::span<const double> nuGrid,
                double ceilingFactor = kPsdCeilingFactor);

/// Uniform grid q/Q, q = 0..Q-1.
std::vector<double> uniformGrid(std::size_t Q);

/// (a - b)^H Delta_k (a - b).
double sobolevDistance(const CVector& a, const CVector& b, const SpectralMatrix& delta);
/// a^H Delta_k a.
double sobolevSmoothness(const CVector& a, const SpectralMatrix& delta);

/// Squared prediction residual ||y - Y a||^2 for one bin.
double residualEnergy(const DesignPair& design, const CVector& a);

/// Regularized criterion: weighted fidelity + lambda_s smoothness + lambda_d
/// depth continuity. `weights` stand in for the per-bin error powers.
double regCriterion(const ArCoefficientField& field, const RangeBinDataset& data, const HyperParameters& hp,
                    WindowingForm form, std::span<const double> weights);

}  // namespace specreg
