#include "gmrfgeo/christoffel.hpp"

namespace gmrfgeo {
namespace {

void set_sym(Mat3& m, int i, int j, double v) {
  m(i, j) = v;
  m(j, i) = v;
}

}  // namespace

ChristoffelTensor christoffel_specialized(const InverseMetric& inv, const MetricDerivatives& dg) {
  const Mat3& gi = inv.g_inv;
  const Mat3& ds = dg.d_sigma2;
  const Mat3& db = dg.d_beta;

  const double g11_s = ds(kMu, kMu);
  const double g11_b = db(kMu, kMu);
  const double g22_s = ds(kSigma2, kSigma2);
  const double g22_b = db(kSigma2, kSigma2);
  const double g23_s = ds(kSigma2, kBeta);
  const double g23_b = db(kSigma2, kBeta);
  const double g33_s = ds(kBeta, kBeta);
  const double g33_b = db(kBeta, kBeta);

  const double i11 = gi(kMu, kMu);
  const double i22 = gi(kSigma2, kSigma2);
  const double i23 = gi(kSigma2, kBeta);
  const double i33 = gi(kBeta, kBeta);

  ChristoffelTensor c;
  Mat3& c1 = c[kMu];
  Mat3& c2 = c[kSigma2];
  Mat3& c3 = c[kBeta];

  set_sym(c1, kMu, kSigma2, 0.5 * g11_s * i11);
  set_sym(c1, kMu, kBeta, 0.5 * g11_b * i11);

  c2(kMu, kMu) = -0.5 * (g11_s * i22 + g11_b * i23);
  c3(kMu, kMu) = -0.5 * (g11_s * i23 + g11_b * i33);

  const double cross22 = 2.0 * g23_s - g22_b;
  c2(kSigma2, kSigma2) = 0.5 * (g22_s * i22 + cross22 * i23);
  c3(kSigma2, kSigma2) = 0.5 * (g22_s * i23 + cross22 * i33);

  set_sym(c2, kSigma2, kBeta, 0.5 * (g22_b * i22 + g33_s * i23));
  set_sym(c3, kSigma2, kBeta, 0.5 * (g22_b * i23 + g33_s * i33));

  const double cross33 = 2.0 * g23_b - g33_s;
  c2(kBeta, kBeta) = 0.5 * (cross33 * i22 + g33_b * i23);
  c3(kBeta, kBeta) = 0.5 * (cross33 * i23 + g33_b * i33);
  return c;
}

ChristoffelTensor christoffel_general(const InverseMetric& inv, const MetricDerivatives& dg) {
  const Mat3 zero = Mat3::Zero();
  const std::array<const Mat3*, 3> d{&zero, &dg.d_sigma2, &dg.d_beta};
  ChristoffelTensor c;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int m = 0; m < 3; ++m) acc += ((*d[i])(j, m) + (*d[j])(i, m) - (*d[m])(i, j)) * inv.g_inv(m, k);
        c[k](i, j) = 0.5 * acc;
      }
  return c;
}

int count_zero_symbols(const ChristoffelTensor& c) {
  int zeros = 0;
  for (int k = 0; k < 3; ++k) zeros += static_cast<int>((c[k].array() == 0.0).count());
  return zeros;
}

}  // namespace gmrfgeo
