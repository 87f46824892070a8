#pragma once

#include "specreg/metrics.hpp"
#include "specreg/types.hpp"

#include <variant>

namespace specreg {

/// Raw per-bin periodogram |DFT_Q(y_m)|^2 / N.
SpectrumSheet periodogram(const RangeBinDataset& data, std::size_t Q = kDefaultGridSize);

struct LsEstimate {
  CVector a;
  double errPower = 0.0;
  bool rankDeficient = false;
};

/// Relative singular-value cutoff of the least-norm LS solve.
inline constexpr double kSingularCutoff = 1e-10;
/// errPower floor relative to ||y||^2 / L.
inline constexpr double kErrPowerFloor = 1e-12;

/// Least-norm solution of min ||y - Y a||^2 for one bin.
LsEstimate lsEstimate(const CVector& bin, std::size_t P, WindowingForm form);

/// Independent per-bin LS.
ArCoefficientField lsField(const RangeBinDataset& data, std::size_t P, WindowingForm form);

struct SlidingWindow {
  std::size_t W = 1;
};
struct Forgetting {
  double lambda = 1.0;
};

/// Adaptive LS configuration: pooled window of W bins or geometric forgetting.
struct AlsConfig {
  std::variant<SlidingWindow, Forgetting> mode = SlidingWindow{};
  void validate() const;
};

/// Adaptive LS field. A sliding window of W bins covers offsets
/// -floor(W/2) .. W - 1 - floor(W/2) around m (centered for odd W), truncated
/// at the edges. Forgetting pools bins m' <= m with weight lambda^{m-m'}.
ArCoefficientField alsField(const RangeBinDataset& data, std::size_t P, WindowingForm form, const AlsConfig& cfg);

/// Sum over bins of the unweighted LS criteria ||y_m - Y_m a_m||^2.
double lsCriterion(const ArCoefficientField& field, const RangeBinDataset& data, WindowingForm form);

namespace serial {
SpectrumSheet periodogram(const RangeBinDataset& data, std::size_t Q = kDefaultGridSize);
ArCoefficientField lsField(const RangeBinDataset& data, std::size_t P, WindowingForm form);
ArCoefficientField alsField(const RangeBinDataset& data, std::size_t P, WindowingForm form, const AlsConfig& cfg);
}  // namespace serial

}  // namespace specreg
