#pragma once
// Small fixed-bound linear algebra used throughout: ambient dimension m <= 8,
// intrinsic dimension d <= 2. Fields are sample-major flat arrays.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace knotgeo {

inline constexpr int kMaxDim = 8;
inline constexpr int kMaxIntrinsic = 2;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Sampled R^m-valued function on a grid: `data[s*m + c]` is component c at sample s.
struct Field {
  int m = 0;
  std::vector<double> data;

  Field() = default;
  Field(std::size_t samples, int dim) : m(dim), data(samples * dim, 0.0) {}

  std::size_t samples() const { return m == 0 ? 0 : data.size() / m; }
  double* at(std::size_t s) { return data.data() + s * m; }
  const double* at(std::size_t s) const { return data.data() + s * m; }
};

inline double dot(const double* a, const double* b, int m) {
  double acc = 0.0;
  for (int c = 0; c < m; ++c) acc += a[c] * b[c];
  return acc;
}

inline double norm2(const double* a, int m) { return dot(a, a, m); }

inline void axpy(double alpha, const double* x, double* y, int m) {
  for (int c = 0; c < m; ++c) y[c] += alpha * x[c];
}

inline void scale(double alpha, double* x, int m) {
  for (int c = 0; c < m; ++c) x[c] *= alpha;
}

/// Order-invariant summation: sorts the terms before accumulating, so any
/// permutation of the same values (e.g. from a cyclic grid shift) produces a
/// bit-identical result.
inline double stable_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

/// Determinant of a small row-major q x q matrix (q <= kMaxDim), by Gaussian
/// elimination with partial pivoting. Exact enough for q <= 4 cofactor-scale work.
inline double small_det(double* a, int q) {
  double det = 1.0;
  for (int col = 0; col < q; ++col) {
    int piv = col;
    for (int r = col + 1; r < q; ++r)
      if (std::fabs(a[r * q + col]) > std::fabs(a[piv * q + col])) piv = r;
    if (a[piv * q + col] == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < q; ++c) std::swap(a[piv * q + c], a[col * q + c]);
      det = -det;
    }
    det *= a[col * q + col];
    for (int r = col + 1; r < q; ++r) {
      double f = a[r * q + col] / a[col * q + col];
      for (int c = col; c < q; ++c) a[r * q + c] -= f * a[col * q + c];
    }
  }
  return det;
}

/// Gram determinant of q vectors of dimension m.
inline double gram_det(const double* const* vecs, int q, int m) {
  std::array<double, kMaxDim * kMaxDim> g{};
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) g[i * q + j] = dot(vecs[i], vecs[j], m);
  return small_det(g.data(), q);
}

inline double sup_norm(const Field& f) {
  double worst = 0.0;
  for (double v : f.data) worst = std::max(worst, std::fabs(v));
  return worst;
}

/// Max over samples of the pointwise Euclidean norm (order-invariant, since
/// max commutes with permutations). The headline defect norm for reports.
inline double sup_pointwise_norm(const Field& f) {
  double worst = 0.0;
  for (std::size_t s = 0; s < f.samples(); ++s)
    worst = std::max(worst, std::sqrt(norm2(f.at(s), f.m)));
  return worst;
}

/// Mean Euclidean pointwise norm of a field (diagnostic companion to sup_norm).
inline double mean_norm(const Field& f) {
  if (f.samples() == 0) return 0.0;
  std::vector<double> terms(f.samples());
  for (std::size_t s = 0; s < f.samples(); ++s)
    terms[s] = std::sqrt(norm2(f.at(s), f.m));
  return stable_sum(std::move(terms)) / static_cast<double>(f.samples());
}

}  // namespace knotgeo
