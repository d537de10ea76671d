#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmpw/cpw_builder.hpp"
#include "cmpw/cpw_transform.hpp"
#include "cmpw/errors.hpp"
#include "cmpw/fourier.hpp"
#include "oracles.hpp"

using namespace cmpw;

namespace {

const PeriodicGrid kGrid = build_grid(20.0, 128);

const BcpwSet& basis() {
  static const BcpwSet set = build_bcpw_set(kGrid, 2, 5.0, 5.0, {});
  return set;
}

Eigen::MatrixXd random_coeffs(std::uint64_t seed) {
  auto r = oracle::rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd c(basis().levels(), basis().N0);
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) c(i, j) = nd(r);
  return c;
}

CpwCoeffs wrap_coeffs(const Eigen::MatrixXd& values) {
  CpwCoeffs c;
  c.values = values;
  c.L = kGrid.L;
  c.w = basis().w;
  c.N0 = basis().N0;
  c.n_max = static_cast<int>(values.rows());
  return c;
}

}  // namespace

TEST_CASE("fast analysis equals member inner products") {
  const Field f = oracle::random_field(kGrid, 11);
  const CpwCoeffs c = cpw_forward(f, basis());
  CHECK(c.n_max == 2);
  CHECK(c.N0 == 4);
  const Eigen::MatrixXd direct = oracle::direct_forward(f, basis());
  CHECK((c.values - direct).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fast synthesis equals the naive member sum") {
  const Eigen::MatrixXd cm = random_coeffs(12);
  const Field fast = cpw_inverse(wrap_coeffs(cm), basis());
  const Field slow = oracle::naive_inverse(cm, basis());
  CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("analysis of a synthesis returns the coefficients") {
  const Eigen::MatrixXd cm = random_coeffs(13);
  const Field f = cpw_inverse(wrap_coeffs(cm), basis());
  const CpwCoeffs back = cpw_forward(f, basis());
  CHECK((back.values - cm).cwiseAbs().maxCoeff() <= 1e-9);
  // Norm is preserved inside the span.
  CHECK(back.values.squaredNorm() ==
        doctest::Approx(norm_w(kGrid, f) * norm_w(kGrid, f)).epsilon(1e-8));
}

TEST_CASE("analysis is linear") {
  const Field f = oracle::random_field(kGrid, 14);
  const Field g = oracle::random_field(kGrid, 15);
  const CpwCoeffs cf = cpw_forward(f, basis());
  const CpwCoeffs cg = cpw_forward(g, basis());
  const CpwCoeffs mix = cpw_forward(2.0 * f - 0.5 * g, basis());
  const Eigen::MatrixXd expect = 2.0 * cf.values - 0.5 * cg.values;
  CHECK((mix.values - expect).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("translating by one shift cell rotates the coefficient columns") {
  const Field f = oracle::random_field(kGrid, 16);
  const int cells = 32;  // w in grid cells on this aligned grid
  Field rolled(kGrid.n);
  for (int i = 0; i < kGrid.n; ++i)
    rolled[i] = f[((i - cells) % kGrid.n + kGrid.n) % kGrid.n];
  const CpwCoeffs cf = cpw_forward(f, basis());
  const CpwCoeffs cr = cpw_forward(rolled, basis());
  for (int lv = 0; lv < 2; ++lv)
    for (int j = 0; j < 4; ++j)
      CHECK(cr.values(lv, (j + 1) % 4) ==
            doctest::Approx(cf.values(lv, j)).epsilon(1e-10));
}

TEST_CASE("each member analyzes to a unit one hot block") {
  const Field m = basis().member(1, 2);
  const CpwCoeffs c = cpw_forward(m, basis());
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(2, 4);
  expect(0, 2) = 1.0;
  CHECK((c.values - expect).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("zero field maps to zero coefficients and back") {
  const Field z = Field::Zero(kGrid.n);
  const CpwCoeffs c = cpw_forward(z, basis());
  CHECK(c.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cpw_inverse(c, basis()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthesis rejects mismatched coefficient blocks") {
  CpwCoeffs c = wrap_coeffs(random_coeffs(17));
  c.N0 = 3;
  CHECK_THROWS_AS(cpw_inverse(c, basis()), Error);
  CpwCoeffs d = wrap_coeffs(random_coeffs(17));
  d.values(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(cpw_inverse(d, basis()), Error);
}

TEST_CASE("a single level block synthesizes against the full basis") {
  Eigen::MatrixXd one = random_coeffs(18).topRows(1);
  const Field f = cpw_inverse(wrap_coeffs(one), basis());
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(2, 4);
  padded.row(0) = one.row(0);
  const Field full = cpw_inverse(wrap_coeffs(padded), basis());
  CHECK((f - full).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("windowed synthesis equals the restricted full synthesis") {
  const Eigen::MatrixXd cm = random_coeffs(19);
  const Field full = cpw_inverse(wrap_coeffs(cm), basis());
  for (const Window win : {Window{17, 40}, Window{120, 30}, Window{0, 128}}) {
    const Field part = windowed_inverse(wrap_coeffs(cm), basis(), win);
    REQUIRE(part.size() == win.length);
    for (int t = 0; t < win.length; ++t)
      CHECK(part[t] ==
            doctest::Approx(full[(win.start + t) % kGrid.n]).epsilon(1e-11));
  }
}

TEST_CASE("degenerate windows are rejected") {
  const CpwCoeffs c = wrap_coeffs(random_coeffs(20));
  CHECK_THROWS_AS(windowed_inverse(c, basis(), Window{5, 0}), Error);
  CHECK_THROWS_AS(windowed_inverse(c, basis(), Window{5, 129}), Error);
  try {
    windowed_inverse(c, basis(), Window{5, 0});
  } catch (const Error& e) {
    CHECK(e.code == Err::EmptyWindow);
  }
}

TEST_CASE("windowed analysis matches the zero extended full analysis") {
  const Window win{40, 50};
  auto r = oracle::rng(21);
  std::normal_distribution<double> nd(0.0, 1.0);
  Field f_win(win.length);
  for (int t = 0; t < win.length; ++t) f_win[t] = nd(r);

  Field f = Field::Zero(kGrid.n);
  for (int t = 0; t < win.length; ++t)
    f[(win.start + t) % kGrid.n] = f_win[t];

  const PartialCoeffs part = windowed_forward(f_win, basis(), win);
  const CpwCoeffs full = cpw_forward(f, basis());
  CHECK(!part.members.empty());
  CHECK(part.members.size() < 8);

  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(2, 4);
  for (const auto& [lv, j] : part.members)
    dense(lv - 1, j) = part.coeffs.values(lv - 1, j);
  CHECK((dense - full.values).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("windowed analysis checks the sample count") {
  const Window win{0, 30};
  const Field wrong = Field::Zero(29);
  CHECK_THROWS_AS(windowed_forward(wrong, basis(), win), Error);
}

TEST_CASE("keeping every coefficient reconstructs span members exactly") {
  const Field f = cpw_inverse(wrap_coeffs(random_coeffs(22)), basis());
  CHECK(topk_error(f, basis(), TopkBasis::Cpw, 8) <= 1e-8);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 8; ++k) {
    const double e = topk_error(f, basis(), TopkBasis::Cpw, k);
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
  CHECK_THROWS_AS(topk_error(f, basis(), TopkBasis::Cpw, 0), Error);
  CHECK_THROWS_AS(topk_error(f, basis(), TopkBasis::Cpw, 9), Error);
}

TEST_CASE("tied coefficients resolve in index order") {
  const Field f = basis().member(1, 0) + basis().member(1, 2);
  const double e1 = topk_error(f, basis(), TopkBasis::Cpw, 1);
  const double e2 = topk_error(f, basis(), TopkBasis::Cpw, 2);
  CHECK(e1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e2 <= 1e-6);
}

TEST_CASE("fourier top k nails a pure cosine with one slot") {
  Field f(kGrid.n);
  const double G = 2.0 * M_PI * 3.0 / kGrid.L;
  for (int i = 0; i < kGrid.n; ++i) f[i] = std::cos(G * kGrid.node(i));
  CHECK(topk_error(f, basis(), TopkBasis::Fourier, 1) <= 1e-8);
  const Field g = oracle::random_field(kGrid, 23);
  CHECK(topk_error(g, basis(), TopkBasis::Fourier, kGrid.n) <= 1e-8);
  CHECK_THROWS_AS(topk_error(g, basis(), TopkBasis::Fourier, kGrid.n + 1),
                  Error);
}
