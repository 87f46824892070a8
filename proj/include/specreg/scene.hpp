#pragma once

#include "specreg/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace specreg {

struct SpectralMode {
  double center = 0.0;  // nu_0 in [0, 1)
  double width = 0.01;  // Gaussian standard deviation in normalized frequency
  double power = 1.0;
};

struct SceneSpec {
  std::size_t M = 0;
  std::size_t N = 0;
  std::size_t Q = 1024;
  std::vector<std::vector<SpectralMode>> modes;  // one list per bin
  double noiseFloor = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// Sum of mode powers plus noise floor, i.e. the bin's signal power r_m.
  double binPower(std::size_t m) const;
};

/// The committed demo scene: 110 bins of 8 samples with ground clutter
/// (bins 15-57), rain (35-75) and bimodal sea echoes (56-95), 1-based.
SceneSpec fig1LikeScene();

/// Truth PSD rows: circularly wrapped Gaussian bumps plus the noise floor.
/// Each bump is normalized on the grid so the row's Riemann sum is exact.
SpectrumSheet buildTruthSheet(const SceneSpec& spec);

/// Autocovariance r(l) = int S(nu) exp(2 j pi nu l) dnu, l = 0..lags-1,
/// computed as the inverse DFT of one truth row.
CVector autocovarianceFromPsd(const Eigen::Ref<const Eigen::RowVectorXd>& row, std::size_t lags);

/// Hermitian Toeplitz matrix C(t, s) = r(t - s) with r(-l) = conj(r(l)).
CMatrix toeplitzCovariance(const CVector& acov);

/// Stable, seedable complex Gaussian source: mt19937_64 bits + Box-Muller.
class ComplexGaussianSource {
 public:
  ComplexGaussianSource(std::uint64_t seed, std::uint64_t stream);
  /// Circular complex normal with unit variance E|z|^2 = 1.
  Complex next();
  double uniform();  // in (0, 1]

 private:
  std::mt19937_64 engine_;
};

/// Draws every bin from CN(0, C_m), with C_m the Toeplitz covariance of truth row m.
/// Bin m uses substream (seed, m), so the result does not depend on thread count.
RangeBinDataset sampleScene(const SceneSpec& spec);

namespace serial {
RangeBinDataset sampleScene(const SceneSpec& spec);
}

}  // namespace specreg
