#include "specreg/kalman.hpp"

#include <cmath>

namespace specreg {

namespace {

// Per-transition state parameters shared by the stationary and homogeneous smoothers.
struct StateSchedule {
  std::vector<double> alpha;  // size M - 1
  std::vector<double> rEps;   // size M - 1
  double rA = 0.0;
};

StateSchedule constantSchedule(const StationaryModel& model, std::size_t M) {
  StateSchedule s;
  s.alpha.assign(M > 0 ? M - 1 : 0, model.alphaInf);
  s.rEps.assign(M > 0 ? M - 1 : 0, model.rEpsInf);
  s.rA = model.rAInf;
  return s;
}

StateSchedule fromHomogeneous(const HomogeneousSchedule& h) {
  StateSchedule s;
  s.alpha.assign(h.alphas.data(), h.alphas.data() + h.alphas.size());
  s.rEps.assign(h.rEps.data(), h.rEps.data() + h.rEps.size());
  s.rA = h.rA;
  return s;
}

void hermitize(CMatrix& X) { X = 0.5 * (X + X.adjoint()).eval(); }

void checkInputs(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                 std::span<const double> weights) {
  hp.validate();
  rowCount(form, data.N(), hp.P);
  if (weights.size() != data.M()) throw InvalidArgument("one weight per bin is required");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be positive and finite");
  }
}

FilterOutput runFilter(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                       std::span<const double> weights, const StateSchedule& sched, const SpectralMatrix& delta,
                       const SmootherOptions& options) {
  const auto M = data.M();
  const auto P = static_cast<Eigen::Index>(hp.P);
  const RVector invDiag = delta.diag().cwiseInverse();

  FilterOutput out;
  out.predicted.resize(M);
  out.predictedCovs.resize(M);
  out.filtered.resize(M);
  out.filteredCovs.resize(M);
  out.innovations.resize(M);
  out.innovationCovs.resize(M);

  for (std::size_t m = 0; m < M; ++m) {
    if (m == 0) {
      out.predicted[0] = CVector::Zero(P);
      out.predictedCovs[0] = CMatrix::Zero(P, P);
      out.predictedCovs[0].diagonal() = (sched.rA * invDiag).cast<Complex>();
    } else {
      const double alpha = sched.alpha[m - 1];
      out.predicted[m] = alpha * out.filtered[m - 1];
      out.predictedCovs[m] = (alpha * alpha) * out.filteredCovs[m - 1];
      out.predictedCovs[m].diagonal() += (sched.rEps[m - 1] * invDiag).cast<Complex>();
    }

    if (m == 0 && !options.correctFirstBin) {
      out.filtered[0] = out.predicted[0];
      out.filteredCovs[0] = out.predictedCovs[0];
      continue;
    }

    const auto design = buildDesign(data.bin(m), hp.P, form);
    const auto& Y = design.Ymat;
    const CMatrix& Ppred = out.predictedCovs[m];
    const CMatrix K = Ppred * Y.adjoint();
    CMatrix R = Y * K;
    R.diagonal().array() += weights[m];
    hermitize(R);
    Eigen::LLT<CMatrix> llt(R);
    if (llt.info() != Eigen::Success) {
      throw NumericalFailure("innovation covariance not invertible at bin " + std::to_string(m),
                             static_cast<std::ptrdiff_t>(m));
    }
    const CVector e = design.yvec - Y * out.predicted[m];
    const CVector Rinv_e = llt.solve(e);
    out.filtered[m] = out.predicted[m] + K * Rinv_e;
    out.filteredCovs[m] = Ppred - K * llt.solve(K.adjoint());
    hermitize(out.filteredCovs[m]);

    double logDet = 0.0;
    const CMatrix Lfac = llt.matrixL();
    for (Eigen::Index i = 0; i < Lfac.rows(); ++i) logDet += 2.0 * std::log(Lfac(i, i).real());
    out.coLogLikelihood += logDet + e.dot(Rinv_e).real();
    out.innovations[m] = e;
    out.innovationCovs[m] = std::move(R);
  }
  return out;
}

SmootherOutput runSmoother(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                           std::span<const double> weights, const StateSchedule& sched, const SpectralMatrix& delta,
                           const SmootherOptions& options) {
  auto filt = runFilter(data, hp, form, weights, sched, delta, options);
  const auto M = data.M();

  SmootherOutput out;
  out.field.coeffs.resize(M);
  out.field.errPowers.resize(static_cast<Eigen::Index>(M));
  out.field.rankDeficient.assign(M, false);
  out.covariances.resize(M);

  out.field.coeffs[M - 1] = filt.filtered[M - 1];
  out.covariances[M - 1] = filt.filteredCovs[M - 1];
  for (std::size_t m = M - 1; m-- > 0;) {
    const CMatrix& Pnext = filt.predictedCovs[m + 1];
    Eigen::LLT<CMatrix> llt(Pnext);
    if (llt.info() != Eigen::Success) {
      throw NumericalFailure("predicted covariance not invertible at bin " + std::to_string(m + 1),
                             static_cast<std::ptrdiff_t>(m + 1));
    }
    // Smoother gain alpha P_{m|m} P_{m+1|m}^{-1}, using Hermitian symmetry of both factors.
    const CMatrix gain = sched.alpha[m] * llt.solve(filt.filteredCovs[m]).adjoint();
    out.field.coeffs[m] = filt.filtered[m] + gain * (out.field.coeffs[m + 1] - filt.predicted[m + 1]);
    out.covariances[m] = filt.filteredCovs[m] + gain * (out.covariances[m + 1] - Pnext) * gain.adjoint();
    hermitize(out.covariances[m]);
  }
  for (std::size_t m = 0; m < M; ++m) out.field.errPowers[static_cast<Eigen::Index>(m)] = weights[m];
  out.innovations = std::move(filt.innovations);
  out.innovationCovs = std::move(filt.innovationCovs);
  return out;
}

// Coefficients of the quadratic penalty: smoothness, coupling, edge.
struct PenaltyWeights {
  double smooth;
  double coupling;
  double edge;
};

PenaltyWeights stationaryPenalty(const StationaryModel& model) {
  const double a = model.alphaInf;
  const double oneMinus = 1.0 - a;
  return {oneMinus * oneMinus / model.rEpsInf, a / model.rEpsInf, a * oneMinus / model.rEpsInf};
}

ArCoefficientField solveDense(const RangeBinDataset& data, std::size_t P, WindowingForm form,
                              std::span<const double> weights, const SpectralMatrix& delta,
                              const PenaltyWeights& pen) {
  const auto M = data.M();
  if (M * P > kDirectSolveLimit) throw InvalidArgument("directSolve is limited to M*P <= 2000");
  const auto n = static_cast<Eigen::Index>(M * P);
  const auto p = static_cast<Eigen::Index>(P);
  CMatrix H = CMatrix::Zero(n, n);
  CVector b = CVector::Zero(n);
  const auto& d = delta.diag();

  for (std::size_t m = 0; m < M; ++m) {
    const auto off = static_cast<Eigen::Index>(m) * p;
    const auto design = buildDesign(data.bin(m), P, form);
    H.block(off, off, p, p) += design.Ymat.adjoint() * design.Ymat / weights[m];
    b.segment(off, p) += design.Ymat.adjoint() * design.yvec / weights[m];

    double c = pen.smooth;
    if (m > 0) c += pen.coupling;
    if (m + 1 < M) c += pen.coupling;
    if (m == 0) c += pen.edge;
    if (m + 1 == M) c += pen.edge;
    for (Eigen::Index i = 0; i < p; ++i) H(off + i, off + i) += c * d[i];
    if (m + 1 < M) {
      for (Eigen::Index i = 0; i < p; ++i) {
        H(off + i, off + p + i) -= pen.coupling * d[i];
        H(off + p + i, off + i) -= pen.coupling * d[i];
      }
    }
  }

  Eigen::LLT<CMatrix> llt(H);
  if (llt.info() != Eigen::Success) throw NumericalFailure("direct system is not positive definite");
  const CVector x = llt.solve(b);

  ArCoefficientField field;
  field.coeffs.resize(M);
  field.errPowers.resize(static_cast<Eigen::Index>(M));
  field.rankDeficient.assign(M, false);
  for (std::size_t m = 0; m < M; ++m) {
    field.coeffs[m] = x.segment(static_cast<Eigen::Index>(m) * p, p);
    field.errPowers[static_cast<Eigen::Index>(m)] = weights[m];
  }
  return field;
}

}  // namespace

StationaryModel stationaryModel(const HyperParameters& hp) {
  hp.validate();
  StationaryModel model;
  model.delta = SpectralMatrix(hp.k, hp.P);
  const double rho = hp.rho();
  const double theta = 2.0 + rho;
  // sqrt(theta^2 - 4) without cancellation at small rho.
  const double root = std::sqrt(rho * (4.0 + rho));
  // Smaller root of u^2 - theta u + 1, in the stable product form.
  model.alphaInf = 2.0 / (theta + root);
  const double oneMinusAlpha = (rho + root) / (theta + root);
  model.rho = rho;
  model.rEpsInf = hp.rD() * model.alphaInf;
  model.rAInf = model.rEpsInf / (oneMinusAlpha * (1.0 + model.alphaInf));
  return model;
}

HomogeneousSchedule homogeneousSchedule(const HyperParameters& hp, std::size_t M) {
  hp.validate();
  if (M < 2) throw InvalidArgument("homogeneous schedule needs M >= 2");
  const double rho = hp.rho();
  HomogeneousSchedule s;
  s.alphas.resize(static_cast<Eigen::Index>(M - 1));
  s.rEps.resize(static_cast<Eigen::Index>(M - 1));
  const auto last = static_cast<Eigen::Index>(M - 2);
  s.alphas[last] = 1.0 / (1.0 + rho);
  for (Eigen::Index i = last; i-- > 0;) s.alphas[i] = alphaMap(s.alphas[i + 1], rho);
  s.rEps = hp.rD() * s.alphas;
  s.rA = hp.rD() / (1.0 + rho - s.alphas[0]);
  return s;
}

FilterOutput kalmanFilter(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                          std::span<const double> weights, const StationaryModel& model,
                          const SmootherOptions& options) {
  checkInputs(data, hp, form, weights);
  return runFilter(data, hp, form, weights, constantSchedule(model, data.M()), model.delta, options);
}

SmootherOutput kalmanSmooth(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                            std::span<const double> weights, const StationaryModel& model,
                            const SmootherOptions& options) {
  checkInputs(data, hp, form, weights);
  return runSmoother(data, hp, form, weights, constantSchedule(model, data.M()), model.delta, options);
}

SmootherOutput kalmanSmooth(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                            std::span<const double> weights, const HomogeneousSchedule& schedule,
                            const SmootherOptions& options) {
  checkInputs(data, hp, form, weights);
  if (static_cast<std::size_t>(schedule.alphas.size()) + 1 != data.M()) {
    throw InvalidArgument("homogeneous schedule length does not match the dataset");
  }
  return runSmoother(data, hp, form, weights, fromHomogeneous(schedule), SpectralMatrix(hp.k, hp.P), options);
}

ArCoefficientField directSolve(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                               std::span<const double> weights, const StationaryModel& model) {
  checkInputs(data, hp, form, weights);
  return solveDense(data, hp.P, form, weights, model.delta, stationaryPenalty(model));
}

ArCoefficientField directSolveReg(const RangeBinDataset& data, const HyperParameters& hp, WindowingForm form,
                                  std::span<const double> weights) {
  checkInputs(data, hp, form, weights);
  return solveDense(data, hp.P, form, weights, SpectralMatrix(hp.k, hp.P), {hp.lambdaS, hp.lambdaD, 0.0});
}

double stationaryEdgeTerms(const ArCoefficientField& field, const StationaryModel& model) {
  const auto pen = stationaryPenalty(model);
  return pen.edge * (sobolevSmoothness(field.coeffs.front(), model.delta) +
                     sobolevSmoothness(field.coeffs.back(), model.delta));
}

double stationaryCriterion(const ArCoefficientField& field, const RangeBinDataset& data, const HyperParameters& hp,
                           WindowingForm form, std::span<const double> weights, const StationaryModel& model) {
  checkInputs(data, hp, form, weights);
  if (field.M() != data.M()) throw InvalidArgument("stationaryCriterion: bin count mismatch");
  const auto pen = stationaryPenalty(model);
  double fidelity = 0.0;
  double smooth = 0.0;
  double coupling = 0.0;
  for (std::size_t m = 0; m < data.M(); ++m) {
    fidelity += residualEnergy(buildDesign(data.bin(m), hp.P, form), field.coeffs[m]) / weights[m];
    smooth += sobolevSmoothness(field.coeffs[m], model.delta);
    if (m + 1 < data.M()) coupling += sobolevDistance(field.coeffs[m], field.coeffs[m + 1], model.delta);
  }
  return fidelity + pen.smooth * smooth + pen.coupling * coupling + stationaryEdgeTerms(field, model);
}

}  // namespace specreg
