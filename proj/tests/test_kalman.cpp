#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "specreg/kalman.hpp"

#include <cmath>

using namespace specreg;
using oracle::randomVector;

namespace {

constexpr WindowingForm kForms[] = {WindowingForm::NonWindowed, WindowingForm::PreWindowed,
                                    WindowingForm::PostWindowed, WindowingForm::DoubleWindowed};

double fieldDistance(const ArCoefficientField& a, const ArCoefficientField& b) {
  double num = 0.0;
  for (std::size_t m = 0; m < a.M(); ++m) num += (a.coeffs[m] - b.coeffs[m]).squaredNorm();
  return std::sqrt(num);
}

double fieldNorm(const ArCoefficientField& a) {
  double s = 0.0;
  for (const auto& v : a.coeffs) s += v.squaredNorm();
  return std::sqrt(s);
}

struct Instance {
  std::vector<CVector> bins;
  std::vector<double> w;
  HyperParameters hp;
  WindowingForm form;
};

Instance randomInstance(std::mt19937_64& rng, std::size_t M, std::size_t N, std::size_t P, double rho,
                        WindowingForm form, double k = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double lambdaD = std::pow(10.0, u(rng));
  return {oracle::randomBins(rng, M, N), oracle::randomWeights(rng, M), {rho * lambdaD, lambdaD, k, P}, form};
}

}  // namespace

TEST_CASE("stationary model: closed form against fixed-point iteration") {
  const auto m1 = stationaryModel({1.0, 1.0, 1.0, 3});
  CHECK(m1.alphaInf == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(std::abs(m1.alphaInf - oracle::iterateAlpha(1.0)) <= 1e-12);
  CHECK(m1.rho == 1.0);

  const auto big = stationaryModel({1e6, 1.0, 1.0, 3});
  CHECK(big.alphaInf == doctest::Approx(1e-6).epsilon(0.01));
  CHECK(big.alphaInf == doctest::Approx(oracle::iterateAlpha(1e6)).epsilon(1e-12));

  // rho -> 0+: alpha approaches 1.
  const auto tiny = stationaryModel({1e-14, 1.0, 1.0, 3});
  CHECK(tiny.alphaInf < 1.0);
  CHECK(tiny.alphaInf > 1.0 - 1e-6);
}

TEST_CASE("stationary model: derived powers") {
  for (double lr = -6.0; lr <= 6.0; lr += 0.5) {
    const HyperParameters hp{std::pow(10.0, lr) * 3.0, 3.0, 1.0, 4};
    const auto mdl = stationaryModel(hp);
    CHECK(mdl.alphaInf > 0.0);
    CHECK(mdl.alphaInf < 1.0);
    CHECK(mdl.rEpsInf == doctest::Approx(hp.rD() * mdl.alphaInf).epsilon(1e-15));
    CHECK(mdl.rAInf == doctest::Approx(mdl.rEpsInf / (1.0 - mdl.alphaInf * mdl.alphaInf)).epsilon(1e-6));
    CHECK(mdl.delta.order() == 4);
  }
}

TEST_CASE("fixed point residual over a log grid of rho") {
  for (double lr = -6.0; lr <= 6.0; lr += 0.25) {
    const double rho = std::pow(10.0, lr);
    const double a = stationaryModel({rho, 1.0, 1.0, 1}).alphaInf;
    CHECK(std::abs(alphaMap(a, rho) - a) <= 1e-14);
  }
}

TEST_CASE("alpha map is a contraction on (0, 1)") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double rho : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
    for (int i = 0; i < 200; ++i) {
      const double a = u(rng), b = u(rng);
      const double bound = std::abs(a - b) / ((1.0 + rho) * (1.0 + rho));
      CHECK(std::abs(alphaMap(a, rho) - alphaMap(b, rho)) <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("homogeneous schedule: two bins") {
  const HyperParameters hp{2.0, 2.0, 1.0, 3};  // rho = 1
  const auto s = homogeneousSchedule(hp, 2);
  REQUIRE(s.alphas.size() == 1);
  CHECK(s.alphas[0] == 0.5);
  CHECK(s.rEps[0] == hp.rD() / 2.0);
  CHECK(s.rA == doctest::Approx(hp.rD() / 1.5).epsilon(1e-15));
  CHECK_THROWS_AS(homogeneousSchedule(hp, 1), InvalidArgument);
}

TEST_CASE("homogeneous schedule: convergence at rho = 1") {
  const auto s = homogeneousSchedule({1.0, 1.0, 1.0, 3}, 201);
  double u = 0.5;  // alpha_{M-1}
  for (int i = 0; i < 199; ++i) u = 1.0 / (3.0 - u);
  CHECK(s.alphas[0] == doctest::Approx(u).epsilon(1e-14));
  CHECK(std::abs(s.alphas[0] - (3.0 - std::sqrt(5.0)) / 2.0) <= 1e-10);
}

TEST_CASE("homogeneous schedule: bounds and monotonicity") {
  for (double rho : {1e-3, 1.0, 1e3}) {
    const HyperParameters hp{rho, 1.0, 1.0, 3};
    const auto s = homogeneousSchedule(hp, 110);
    const double ainf = stationaryModel(hp).alphaInf;
    for (Eigen::Index i = 0; i < s.alphas.size(); ++i) {
      CHECK(s.alphas[i] > 0.0);
      CHECK(s.alphas[i] < 1.0);
      CHECK(s.alphas[i] >= ainf - 1e-15);
      CHECK(s.rEps[i] == doctest::Approx(hp.rD() * s.alphas[i]).epsilon(1e-15));
      if (i > 0) CHECK(s.alphas[i] >= s.alphas[i - 1]);
    }
    CHECK(s.rA > 0.0);
  }
}

TEST_CASE("smoother: zero data gives a zero field") {
  std::vector<CVector> bins(5, CVector::Zero(8));
  const std::vector<double> w(5, 1.0);
  for (auto form : kForms) {
    const HyperParameters hp{0.3, 4.0, 1.0, 3};
    const auto out = kalmanSmooth(RangeBinDataset(bins), hp, form, w, stationaryModel(hp));
    for (const auto& a : out.field.coeffs) CHECK(a.norm() == 0.0);
    const auto direct = directSolve(RangeBinDataset(bins), hp, form, w, stationaryModel(hp));
    for (const auto& a : direct.coeffs) CHECK(a.norm() == 0.0);
  }
}

TEST_CASE("smoother: one bin is the ridge closed form") {
  std::mt19937_64 rng(22);
  for (auto form : kForms) {
    const CVector y = randomVector(rng, 8);
    const HyperParameters hp{0.4, 2.5, 1.0, 4};
    const double w = 0.8;
    const auto out = kalmanSmooth(RangeBinDataset({y}), hp, form, std::vector<double>{w}, stationaryModel(hp));
    const auto mdl = oracle::model(hp.lambdaS, hp.lambdaD);
    const CVector expect = oracle::singleBinRidge(y, 4, form, w, 1.0, mdl.rA);
    CHECK((out.field.coeffs[0] - expect).norm() <= 1e-10 * expect.norm());
  }
}

TEST_CASE("smoother: matches the dense solve on random instances") {
  std::mt19937_64 rng(23);
  int count = 0;
  for (double rho : {0.01, 1.0, 100.0}) {
    for (auto form : kForms) {
      for (std::size_t P = 1; P <= 4; ++P) {
        const std::size_t M = 2 + (count % 9);
        const auto inst = randomInstance(rng, M, 8, P, rho, form);
        const RangeBinDataset data(inst.bins);
        const auto mdl = stationaryModel(inst.hp);
        const auto ks = kalmanSmooth(data, inst.hp, form, inst.w, mdl);
        const auto ds = directSolve(data, inst.hp, form, inst.w, mdl);
        CHECK(fieldDistance(ks.field, ds) <= 1e-8 * fieldNorm(ds));
        ++count;
      }
    }
  }
  CHECK(count >= 48);
}

TEST_CASE("smoother: gradient of the state-space criterion vanishes") {
  std::mt19937_64 rng(24);
  for (double rho : {0.01, 1.0, 100.0}) {
    for (auto form : kForms) {
      const auto inst = randomInstance(rng, 5, 8, 3, rho, form);
      const auto mdl = oracle::model(inst.hp.lambdaS, inst.hp.lambdaD);
      auto f = [&](const std::vector<CVector>& a) {
        return oracle::stateSpaceCriterion(a, inst.bins, 3, form, inst.w, 1.0, mdl);
      };
      const auto out = kalmanSmooth(RangeBinDataset(inst.bins), inst.hp, form, inst.w, stationaryModel(inst.hp));
      const RVector g = oracle::numericGradient(f, out.field.coeffs);
      const RVector g0 = oracle::numericGradient(f, std::vector<CVector>(5, CVector::Zero(3)));
      CHECK(g.norm() <= 1e-5 * (1.0 + g0.norm()));
    }
  }
}

TEST_CASE("smoother: minimizer against random perturbations") {
  std::mt19937_64 rng(25);
  const auto inst = randomInstance(rng, 6, 8, 3, 1.0, WindowingForm::PostWindowed);
  const RangeBinDataset data(inst.bins);
  const auto mdl = stationaryModel(inst.hp);
  const auto out = kalmanSmooth(data, inst.hp, inst.form, inst.w, mdl);
  const double base = stationaryCriterion(out.field, data, inst.hp, inst.form, inst.w, mdl);
  for (int i = 0; i < 100; ++i) {
    auto moved = out.field;
    for (auto& a : moved.coeffs) a += randomVector(rng, 3, 1e-3);
    CHECK(stationaryCriterion(moved, data, inst.hp, inst.form, inst.w, mdl) >= base);
  }
}

TEST_CASE("smoother: covariances are Hermitian positive definite") {
  std::mt19937_64 rng(26);
  const auto inst = randomInstance(rng, 8, 8, 4, 0.1, WindowingForm::DoubleWindowed);
  const auto out = kalmanSmooth(RangeBinDataset(inst.bins), inst.hp, inst.form, inst.w, stationaryModel(inst.hp));
  REQUIRE(out.covariances.size() == 8);
  REQUIRE(out.innovationCovs.size() == 8);
  for (const auto& C : out.covariances) {
    CHECK((C - C.adjoint()).norm() <= 1e-12 * C.norm());
    CHECK(Eigen::LLT<CMatrix>(C).info() == Eigen::Success);
  }
  for (std::size_t m = 0; m < 8; ++m) {
    const auto& R = out.innovationCovs[m];
    CHECK(R.rows() == 12);
    CHECK((R - R.adjoint()).norm() <= 1e-12 * R.norm());
    CHECK(Eigen::LLT<CMatrix>(R).info() == Eigen::Success);
    CHECK(out.innovations[m].size() == 12);
    CHECK(out.field.errPowers[static_cast<Eigen::Index>(m)] == inst.w[m]);
  }
}

TEST_CASE("criteria: stationary criterion against the state-space form") {
  std::mt19937_64 rng(27);
  for (auto form : kForms) {
    for (double rho : {0.01, 1.0, 100.0}) {
      for (std::size_t M : {1u, 2u, 6u}) {
        const auto inst = randomInstance(rng, M, 8, 3, rho, form, 1.5);
        std::vector<CVector> a;
        for (std::size_t m = 0; m < M; ++m) a.push_back(randomVector(rng, 3));
        const ArCoefficientField field{a, RVector::Ones(static_cast<Eigen::Index>(M)), {}};
        const RangeBinDataset data(inst.bins);
        const auto mdl = stationaryModel(inst.hp);
        const double qs = stationaryCriterion(field, data, inst.hp, form, inst.w, mdl);
        const double expect =
            oracle::stateSpaceCriterion(a, inst.bins, 3, form, inst.w, 1.5, oracle::model(inst.hp.lambdaS, inst.hp.lambdaD));
        CHECK(qs == doctest::Approx(expect).epsilon(1e-10));
        // Differs from the regularized criterion by the edge terms alone.
        const double qreg = regCriterion(field, data, inst.hp, form, inst.w);
        const double edges = stationaryEdgeTerms(field, mdl);
        const double a1 = sobolevSmoothness(a.front(), mdl.delta), aM = sobolevSmoothness(a.back(), mdl.delta);
        CHECK(edges == doctest::Approx(mdl.alphaInf * (1.0 - mdl.alphaInf) / mdl.rEpsInf * (a1 + aM)).epsilon(1e-13));
        CHECK(qs - qreg == doctest::Approx(edges).epsilon(1e-8).scale(qs));
      }
    }
  }
  const std::vector<CVector> zero(3, CVector::Zero(2));
  const HyperParameters hp{1.0, 1.0, 1.0, 2};
  CHECK(stationaryCriterion({zero, RVector::Ones(3), {}}, RangeBinDataset(std::vector<CVector>(3, CVector::Zero(5))),
                            hp, WindowingForm::PreWindowed, std::vector<double>(3, 1.0), stationaryModel(hp)) == 0.0);
}

TEST_CASE("direct solve: limits in lambda") {
  std::mt19937_64 rng(28);
  const auto bins = oracle::randomBins(rng, 6, 8);
  const std::vector<double> w(6, 1.0);
  const RangeBinDataset data(bins);
  {
    const HyperParameters hp{0.1, 1e12, 1.0, 3};
    const auto f = directSolve(data, hp, WindowingForm::PostWindowed, w, stationaryModel(hp));
    for (const auto& a : f.coeffs) CHECK((a - f.coeffs[0]).norm() <= 1e-6 * (1.0 + f.coeffs[0].norm()));
  }
  {
    const HyperParameters hp{1e12, 1.0, 1.0, 3};
    const auto f = directSolve(data, hp, WindowingForm::PostWindowed, w, stationaryModel(hp));
    for (const auto& a : f.coeffs) CHECK(a.norm() <= 1e-6);
  }
  std::vector<CVector> many(1001, CVector::Ones(4));
  const HyperParameters hp{1.0, 1.0, 1.0, 2};
  CHECK_THROWS_AS(directSolve(RangeBinDataset(many), hp, WindowingForm::NonWindowed, std::vector<double>(1001, 1.0),
                              stationaryModel(hp)),
                  InvalidArgument);
}

TEST_CASE("homogeneous smoother minimizes the regularized criterion") {
  std::mt19937_64 rng(29);
  for (auto form : kForms) {
    for (double rho : {0.01, 1.0, 100.0}) {
      const auto inst = randomInstance(rng, 7, 8, 2, rho, form);
      const RangeBinDataset data(inst.bins);
      const auto out = kalmanSmooth(data, inst.hp, form, inst.w, homogeneousSchedule(inst.hp, 7));
      const auto ref = directSolveReg(data, inst.hp, form, inst.w);
      CHECK(fieldDistance(out.field, ref) <= 1e-8 * fieldNorm(ref));
      auto f = [&](const std::vector<CVector>& a) {
        return oracle::regularizedCriterion(a, inst.bins, 2, form, inst.w, 1.0, inst.hp.lambdaS, inst.hp.lambdaD);
      };
      const RVector g = oracle::numericGradient(f, out.field.coeffs);
      const RVector g0 = oracle::numericGradient(f, std::vector<CVector>(7, CVector::Zero(2)));
      CHECK(g.norm() <= 1e-5 * (1.0 + g0.norm()));
    }
  }
}

TEST_CASE("first-bin correction flag") {
  std::mt19937_64 rng(30);
  const auto inst = randomInstance(rng, 4, 8, 2, 1.0, WindowingForm::PostWindowed);
  const RangeBinDataset data(inst.bins);
  const auto mdl = stationaryModel(inst.hp);
  const auto corrected = kalmanFilter(data, inst.hp, inst.form, inst.w, mdl);
  const auto literal = kalmanFilter(data, inst.hp, inst.form, inst.w, mdl, SmootherOptions{false});
  CHECK(corrected.innovations[0].size() == 8);
  CHECK(literal.innovations[0].size() == 0);
  CHECK(literal.filtered[0] == CVector::Zero(2));
  CHECK(corrected.coLogLikelihood != literal.coLogLikelihood);
  const auto smoothed = kalmanSmooth(data, inst.hp, inst.form, inst.w, mdl, SmootherOptions{false});
  const auto ref = directSolve(data, inst.hp, inst.form, inst.w, mdl);
  CHECK(fieldDistance(smoothed.field, ref) > 1e-6 * fieldNorm(ref));
}

TEST_CASE("input validation") {
  std::vector<CVector> bins(3, CVector::Ones(8));
  const HyperParameters hp{1.0, 1.0, 1.0, 3};
  const auto mdl = stationaryModel(hp);
  CHECK_THROWS_AS(kalmanSmooth(RangeBinDataset(bins), hp, WindowingForm::NonWindowed, std::vector<double>{1.0, 0.0, 1.0},
                               mdl),
                  InvalidArgument);
  CHECK_THROWS_AS(kalmanSmooth(RangeBinDataset(bins), hp, WindowingForm::NonWindowed, std::vector<double>{1.0, 1.0},
                               mdl),
                  InvalidArgument);
  CHECK_THROWS_AS(kalmanSmooth(RangeBinDataset(bins), hp, WindowingForm::NonWindowed, std::vector<double>(3, 1.0),
                               homogeneousSchedule(hp, 4)),
                  InvalidArgument);
  CHECK_THROWS_AS(stationaryModel({-1.0, 1.0, 1.0, 3}), InvalidArgument);
}
