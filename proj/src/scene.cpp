#include "specreg/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace specreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Unnormalized circularly wrapped Gaussian on [0, 1).
double wrappedGaussian(double nu, double center, double width) {
  const int wraps = 1 + static_cast<int>(std::ceil(6.0 * width));
  double acc = 0.0;
  for (int k = -wraps; k <= wraps; ++k) {
    const double d = nu - center - k;
    acc += std::exp(-0.5 * d * d / (width * width));
  }
  return acc;
}

// Smooth 0..1 ramp used to fade scene regions in and out over a few bins.
double taper(double m, double first, double last, double ramp) {
  if (m < first || m > last) return 0.0;
  if (ramp <= 0.0) return 1.0;
  const double in = std::min(1.0, (m - first + 1.0) / ramp);
  const double out = std::min(1.0, (last - m + 1.0) / ramp);
  const double t = std::min(in, out);
  return 0.5 - 0.5 * std::cos(std::numbers::pi * t);
}

CVector sampleBin(const SceneSpec& spec, const SpectrumSheet& truth, std::size_t m) {
  const auto acov = autocovarianceFromPsd(truth.values.row(static_cast<Eigen::Index>(m)), spec.N);
  CMatrix cov = toeplitzCovariance(acov);

  const double trace = cov.trace().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov, Eigen::EigenvaluesOnly);
  const double minEig = eig.eigenvalues().minCoeff();
  if (minEig < -1e-10 * trace) {
    throw SynthesisFailure("covariance of bin " + std::to_string(m) + " is not positive semidefinite", m);
  }

  Eigen::LLT<CMatrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-10 * trace / static_cast<double>(spec.N);
    llt.compute(cov);
    if (llt.info() != Eigen::Success) {
      throw SynthesisFailure("Cholesky failed for bin " + std::to_string(m) + " after jitter", m);
    }
  }

  ComplexGaussianSource source(spec.seed, m);
  CVector z(static_cast<Eigen::Index>(spec.N));
  for (Eigen::Index t = 0; t < z.size(); ++t) z[t] = source.next();
  return llt.matrixL() * z;
}

}  // namespace

void SceneSpec::validate() const {
  if (M < 1) throw InvalidArgument("scene field 'M' must be >= 1");
  if (N < 2) throw InvalidArgument("scene field 'N' must be >= 2");
  if (Q < 2) throw InvalidArgument("scene field 'Q' must be >= 2");
  if (modes.size() != M) throw InvalidArgument("scene field 'modes' must list exactly M bins");
  if (!(noiseFloor >= 0.0) || !std::isfinite(noiseFloor)) throw InvalidArgument("scene field 'noiseFloor' must be >= 0");
  for (std::size_t m = 0; m < M; ++m) {
    for (const auto& mode : modes[m]) {
      if (!(mode.center >= 0.0 && mode.center < 1.0)) throw InvalidArgument("scene field 'center' must lie in [0, 1)");
      if (!(mode.width > 0.0) || !std::isfinite(mode.width)) throw InvalidArgument("scene field 'width' must be > 0");
      if (!(mode.power > 0.0) || !std::isfinite(mode.power)) throw InvalidArgument("scene field 'power' must be > 0");
    }
    if (!(binPower(m) > 0.0)) {
      throw InvalidArgument("scene field 'modes': bin " + std::to_string(m) + " has zero total power");
    }
  }
}

double SceneSpec::binPower(std::size_t m) const {
  double total = noiseFloor;
  for (const auto& mode : modes.at(m)) total += mode.power;
  return total;
}

SceneSpec fig1LikeScene() {
  SceneSpec spec;
  spec.M = 110;
  spec.N = 8;
  spec.Q = 1024;
  spec.noiseFloor = 0.05;
  spec.seed = 1001;
  spec.modes.resize(spec.M);

  for (std::size_t i = 0; i < spec.M; ++i) {
    const double m = static_cast<double>(i + 1);
    auto& bin = spec.modes[i];

    // Ground clutter: narrow, zero Doppler, abrupt onset.
    const double ground = taper(m, 15, 57, 3.0);
    if (ground > 0.0) bin.push_back({0.0, 0.05, 4.0 * (m < 18 ? 1.0 : ground)});

    // Rain: single broad mode whose Doppler and width drift with depth.
    const double rain = taper(m, 35, 75, 8.0);
    if (rain > 0.0) {
      const double s = (m - 35.0) / 40.0;
      bin.push_back({0.16 + 0.14 * s, 0.06 * (1.0 + 0.5 * s), 3.0 * rain});
    }

    // Sea echoes: two maxima from approaching and receding waves.
    const double sea = taper(m, 56, 95, 6.0);
    if (sea > 0.0) {
      const double s = (m - 56.0) / 39.0;
      bin.push_back({0.56 + 0.04 * s, 0.025, 2.0 * sea});
      bin.push_back({0.72 + 0.03 * s, 0.03, 1.4 * sea});
    }
  }
  return spec;
}

SpectrumSheet buildTruthSheet(const SceneSpec& spec) {
  spec.validate();
  SpectrumSheet sheet(spec.M, spec.Q);
  const double Q = static_cast<double>(spec.Q);
  RVector bump(static_cast<Eigen::Index>(spec.Q));
  for (std::size_t m = 0; m < spec.M; ++m) {
    auto row = sheet.values.row(static_cast<Eigen::Index>(m));
    row.setConstant(spec.noiseFloor);
    for (const auto& mode : spec.modes[m]) {
      for (std::size_t q = 0; q < spec.Q; ++q) {
        bump[static_cast<Eigen::Index>(q)] = wrappedGaussian(static_cast<double>(q) / Q, mode.center, mode.width);
      }
      const double mass = bump.sum() / Q;
      row += (mode.power / mass) * bump.transpose();
    }
  }
  return sheet;
}

CVector autocovarianceFromPsd(const Eigen::Ref<const Eigen::RowVectorXd>& row, std::size_t lags) {
  const auto Q = static_cast<std::size_t>(row.size());
  CVector acov = CVector::Zero(static_cast<Eigen::Index>(lags));
  for (std::size_t l = 0; l < lags; ++l) {
    Complex acc{0.0, 0.0};
    for (std::size_t q = 0; q < Q; ++q) {
      // Reduce the phase index mod Q to keep the argument small.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((q * l) % Q) / static_cast<double>(Q);
      acc += row[static_cast<Eigen::Index>(q)] * Complex{std::cos(phase), std::sin(phase)};
    }
    acov[static_cast<Eigen::Index>(l)] = acc / static_cast<double>(Q);
  }
  acov[0] = Complex{acov[0].real(), 0.0};
  return acov;
}

CMatrix toeplitzCovariance(const CVector& acov) {
  const auto N = acov.size();
  CMatrix cov(N, N);
  for (Eigen::Index t = 0; t < N; ++t) {
    for (Eigen::Index s = 0; s < N; ++s) {
      cov(t, s) = t >= s ? acov[t - s] : std::conj(acov[s - t]);
    }
  }
  return cov;
}

ComplexGaussianSource::ComplexGaussianSource(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ (0xD1B54A32D192ED03ull * (stream + 1)))) {}

double ComplexGaussianSource::uniform() {
  // 53 random bits mapped onto (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

Complex ComplexGaussianSource::next() {
  const double u1 = uniform();
  const double u2 = uniform();
  // Each quadrature has variance 1/2.
  const double radius = std::sqrt(-std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

RangeBinDataset sampleScene(const SceneSpec& spec) {
  auto truth = buildTruthSheet(spec);
  std::vector<CVector> bins(spec.M);
  std::vector<std::optional<SynthesisFailure>> failures(spec.M);
  const auto M = static_cast<std::ptrdiff_t>(spec.M);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < M; ++m) {
    const auto bin = static_cast<std::size_t>(m);
    try {
      bins[bin] = sampleBin(spec, truth, bin);
    } catch (const SynthesisFailure& e) {
      failures[bin] = e;
    }
  }
  for (const auto& failure : failures) {
    if (failure) throw *failure;
  }
  RangeBinDataset data(std::move(bins), std::move(truth));
  data.seed = spec.seed;
  return data;
}

namespace serial {
RangeBinDataset sampleScene(const SceneSpec& spec) {
  auto truth = buildTruthSheet(spec);
  std::vector<CVector> bins(spec.M);
  for (std::size_t m = 0; m < spec.M; ++m) bins[m] = sampleBin(spec, truth, m);
  RangeBinDataset data(std::move(bins), std::move(truth));
  data.seed = spec.seed;
  return data;
}
}  // namespace serial

}  // namespace specreg
