#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace specreg {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Error categories. The CLI maps them onto exit codes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::ptrdiff_t bin = -1)
      : std::runtime_error(what), bin_(bin) {}
  std::ptrdiff_t bin() const noexcept { return bin_; }

 private:
  std::ptrdiff_t bin_;
};

class SynthesisFailure : public std::runtime_error {
 public:
  SynthesisFailure(const std::string& what, std::size_t bin)
      : std::runtime_error(what), bin_(bin) {}
  std::size_t bin() const noexcept { return bin_; }

 private:
  std::size_t bin_;
};

/// M x Q grid of nonnegative PSD values on nu = q/Q. Row m is bin m.
struct SpectrumSheet {
  RMatrix values;
  /// Bins where at least one grid value was clamped (pole on the grid).
  std::vector<bool> poleFlags;

  SpectrumSheet() = default;
  SpectrumSheet(std::size_t M, std::size_t Q)
      : values(RMatrix::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(Q))),
        poleFlags(M, false) {}

  std::size_t bins() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t gridSize() const { return static_cast<std::size_t>(values.cols()); }
  double nu(std::size_t q) const { return static_cast<double>(q) / static_cast<double>(gridSize()); }
};

/// M complex signals of common length N, plus optional ground truth.
class RangeBinDataset {
 public:
  RangeBinDataset() = default;
  explicit RangeBinDataset(std::vector<CVector> bins, std::optional<SpectrumSheet> truth = std::nullopt);

  std::size_t M() const { return bins_.size(); }
  std::size_t N() const { return bins_.empty() ? 0 : static_cast<std::size_t>(bins_.front().size()); }
  const CVector& bin(std::size_t m) const { return bins_.at(m); }
  const std::vector<CVector>& bins() const { return bins_; }

  const std::optional<SpectrumSheet>& truth() const { return truth_; }
  void setTruth(SpectrumSheet truth);

  // Provenance metadata carried through the dataset file.
  std::uint64_t seed = 0;
  std::string specHash;

 private:
  std::vector<CVector> bins_;
  std::optional<SpectrumSheet> truth_;
};

enum class WindowingForm { NonWindowed, PreWindowed, PostWindowed, DoubleWindowed };

/// Number of prediction rows L implied by the form, or throws if L < 1.
std::size_t rowCount(WindowingForm form, std::size_t N, std::size_t P);
std::string toString(WindowingForm form);
WindowingForm windowingFromString(const std::string& name);

struct DesignPair {
  CVector yvec;  // length L
  CMatrix Ymat;  // L x P
};

/// Diagonal smoothness metric diag[1^{2k}, ..., P^{2k}].
class SpectralMatrix {
 public:
  SpectralMatrix(double k, std::size_t P);

  double k() const { return k_; }
  std::size_t order() const { return static_cast<std::size_t>(diag_.size()); }
  const RVector& diag() const { return diag_; }

 private:
  double k_;
  RVector diag_;
};

struct ArCoefficientField {
  std::vector<CVector> coeffs;  // a_m, each of length P
  RVector errPowers;            // r_m^e, strictly positive
  std::vector<bool> rankDeficient;

  std::size_t M() const { return coeffs.size(); }
  std::size_t order() const { return coeffs.empty() ? 0 : static_cast<std::size_t>(coeffs.front().size()); }
  void validate() const;
};

struct HyperParameters {
  double lambdaS = 1.0;
  double lambdaD = 1.0;
  double k = 1.0;
  std::size_t P = 1;

  double rS() const { return 1.0 / lambdaS; }
  double rD() const { return 1.0 / lambdaD; }
  /// rho = r_d / r_s = lambda_s / lambda_d.
  double rho() const { return lambdaS / lambdaD; }
  void validate() const;
};

}  // namespace specreg
