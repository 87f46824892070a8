#include "specreg/types.hpp"

#include <cmath>

namespace specreg {

RangeBinDataset::RangeBinDataset(std::vector<CVector> bins, std::optional<SpectrumSheet> truth)
    : bins_(std::move(bins)) {
  if (bins_.empty()) throw InvalidArgument("dataset needs at least one bin");
  const auto N = bins_.front().size();
  if (N < 2) throw InvalidArgument("dataset bins need at least two samples");
  for (std::size_t m = 0; m < bins_.size(); ++m) {
    if (bins_[m].size() != N) {
      throw InvalidArgument("bin " + std::to_string(m) + " has length " + std::to_string(bins_[m].size()) +
                            ", expected " + std::to_string(N));
    }
  }
  if (truth) setTruth(std::move(*truth));
}

void RangeBinDataset::setTruth(SpectrumSheet truth) {
  if (truth.bins() != M()) throw InvalidArgument("truth sheet bin count does not match dataset");
  truth_ = std::move(truth);
}

std::size_t rowCount(WindowingForm form, std::size_t N, std::size_t P) {
  if (P < 1 || P + 1 > N) {
    throw InvalidArgument("AR order " + std::to_string(P) + " out of range for N = " + std::to_string(N));
  }
  switch (form) {
    case WindowingForm::NonWindowed:
      return N - P;
    case WindowingForm::PreWindowed:
    case WindowingForm::PostWindowed:
      return N;
    case WindowingForm::DoubleWindowed:
      return N + P;
  }
  throw InvalidArgument("unknown windowing form");
}

std::string toString(WindowingForm form) {
  switch (form) {
    case WindowingForm::NonWindowed:
      return "non";
    case WindowingForm::PreWindowed:
      return "pre";
    case WindowingForm::PostWindowed:
      return "post";
    case WindowingForm::DoubleWindowed:
      return "double";
  }
  return "?";
}

WindowingForm windowingFromString(const std::string& name) {
  if (name == "non" || name == "nonwindowed" || name == "covariance") return WindowingForm::NonWindowed;
  if (name == "pre" || name == "prewindowed") return WindowingForm::PreWindowed;
  if (name == "post" || name == "postwindowed") return WindowingForm::PostWindowed;
  if (name == "double" || name == "doublewindowed" || name == "autocorrelation") return WindowingForm::DoubleWindowed;
  throw InvalidArgument("unknown windowing form '" + name + "'");
}

SpectralMatrix::SpectralMatrix(double k, std::size_t P) : k_(k), diag_(static_cast<Eigen::Index>(P)) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidArgument("smoothness order k must be finite and >= 0");
  if (P < 1) throw InvalidArgument("spectral matrix needs P >= 1");
  for (std::size_t p = 1; p <= P; ++p) diag_[static_cast<Eigen::Index>(p - 1)] = std::pow(double(p), 2.0 * k);
}

void ArCoefficientField::validate() const {
  if (coeffs.empty()) throw InvalidArgument("empty coefficient field");
  if (static_cast<std::size_t>(errPowers.size()) != coeffs.size()) {
    throw InvalidArgument("coefficient field needs one error power per bin");
  }
  const auto P = coeffs.front().size();
  for (const auto& a : coeffs) {
    if (a.size() != P) throw InvalidArgument("coefficient vectors of unequal length");
  }
  for (Eigen::Index m = 0; m < errPowers.size(); ++m) {
    if (!(errPowers[m] > 0.0)) throw InvalidArgument("error powers must be strictly positive");
  }
}

void HyperParameters::validate() const {
  if (!(lambdaS > 0.0) || !std::isfinite(lambdaS)) throw InvalidArgument("lambda_s must be positive and finite");
  if (!(lambdaD > 0.0) || !std::isfinite(lambdaD)) throw InvalidArgument("lambda_d must be positive and finite");
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidArgument("smoothness order k must be >= 0");
  if (P < 1) throw InvalidArgument("AR order P must be >= 1");
}

}  // namespace specreg
