#include "gmrfgeo/patch_stats.hpp"

#include "gmrfgeo/errors.hpp"

namespace gmrfgeo {
namespace {

Eigen::Index wrap(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index m = i % n;
  return m < 0 ? m + n : m;
}

void append_patches(const FieldSample& field, PatchMatrix& out, Eigen::Index first_row) {
  const Eigen::Index rows = field.rows();
  const Eigen::Index cols = field.cols();
  const bool torus = field.boundary == Boundary::toroidal;
  const Eigen::Index lo = torus ? 0 : 1;
  Eigen::Index k = first_row;
  for (Eigen::Index r = lo; r < rows - lo; ++r) {
    for (Eigen::Index c = lo; c < cols - lo; ++c, ++k) {
      int j = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc, ++j) out(k, j) = field.values(wrap(r + dr, rows), wrap(c + dc, cols));
    }
  }
}

Eigen::Index patch_count(const FieldSample& field) {
  if (field.boundary == Boundary::toroidal) return field.rows() * field.cols();
  return (field.rows() - 2) * (field.cols() - 2);
}

PatchStats stats_from_covariance(const Mat9& sigma_p, long n) {
  PatchStats s;
  s.sigma_p = sigma_p;
  const auto parts = decompose(sigma_p);
  s.rho = parts.rho;
  s.sigma_minus = parts.sigma_minus;
  s.n_patches = n;
  return s;
}

// Maps 0..7 onto the 9 patch indices skipping the center.
constexpr int full_index(int k) { return k < kPatchCenter ? k : k + 1; }

}  // namespace

PatchMatrix extract_patches(const FieldSample& field) {
  field.validate();
  PatchMatrix out(patch_count(field), 9);
  append_patches(field, out, 0);
  return out;
}

Mat9 patch_covariance(const PatchMatrix& patches) {
  const Eigen::Index n = patches.rows();
  if (n < 2) throw DomainError("patch covariance needs at least 2 patches");
  const Eigen::Matrix<double, 1, 9> mean = patches.colwise().mean();
  const PatchMatrix centered = patches.rowwise() - mean;
  Mat9 cov = (centered.transpose() * centered) / static_cast<double>(n);
  // Exact symmetry regardless of summation order.
  cov = (0.5 * (cov + cov.transpose())).eval();
  return cov;
}

PatchDecomposition decompose(const Mat9& sigma_p) {
  PatchDecomposition d;
  for (int a = 0; a < 8; ++a) {
    d.rho[a] = sigma_p(kPatchCenter, full_index(a));
    for (int b = 0; b < 8; ++b) d.sigma_minus(a, b) = sigma_p(full_index(a), full_index(b));
  }
  return d;
}

Mat9 reassemble(const PatchDecomposition& parts, double center_variance) {
  Mat9 m;
  m(kPatchCenter, kPatchCenter) = center_variance;
  for (int a = 0; a < 8; ++a) {
    m(kPatchCenter, full_index(a)) = parts.rho[a];
    m(full_index(a), kPatchCenter) = parts.rho[a];
    for (int b = 0; b < 8; ++b) m(full_index(a), full_index(b)) = parts.sigma_minus(a, b);
  }
  return m;
}

PatchStats patch_stats(const FieldSample& field) {
  const PatchMatrix p = extract_patches(field);
  return stats_from_covariance(patch_covariance(p), static_cast<long>(p.rows()));
}

PatchStats pooled_patch_stats(std::span<const FieldSample> fields) {
  Eigen::Index total = 0;
  for (const auto& f : fields) {
    f.validate();
    total += patch_count(f);
  }
  PatchMatrix all(total, 9);
  Eigen::Index at = 0;
  for (const auto& f : fields) {
    append_patches(f, all, at);
    at += patch_count(f);
  }
  return stats_from_covariance(patch_covariance(all), static_cast<long>(total));
}

PatchStats independence_stats(double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("independence stats need sigma2 > 0");
  return stats_from_covariance(sigma2 * Mat9::Identity(), 0);
}

PatchStats stats_from_parts(const Vec8& rho, const Mat8& sigma_minus, double center_variance) {
  return stats_from_covariance(reassemble({rho, sigma_minus}, center_variance), 0);
}

}  // namespace gmrfgeo
