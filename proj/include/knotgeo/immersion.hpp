#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "knotgeo/small_linalg.hpp"
#include "knotgeo/vcp.hpp"

namespace knotgeo {

/// Periodic parameter grid of a point (d=0), circle (d=1), or 2-torus (d=2);
/// direction i carries sizes[i] samples at spacing 2*pi / sizes[i].
struct ParamGrid {
  int d = 0;
  std::array<int, kMaxIntrinsic> sizes{};

  std::size_t total() const {
    std::size_t n = 1;
    for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(sizes[a]);
    return n;
  }
  double spacing(int axis) const;
  /// Product of spacings: the quadrature cell measure (1 for d=0).
  double cell() const;
  /// Row-major flat index with periodic wrap per direction.
  std::size_t flat(const int* idx) const;
  void unflatten(std::size_t s, int* idx) const;
  /// Flat index of the sample shifted by `delta` along `axis` (wrapped).
  std::size_t neighbor(std::size_t s, int axis, int delta) const;
};

ParamGrid make_grid(const std::vector<int>& sizes);

/// Closed immersed S (point, loop, or torus) sampled over a grid: points are
/// ambient positions, row-major in the grid indices.
struct DiscreteImmersion {
  ParamGrid grid;
  int m = 0;
  Field points;
};

/// 4th-order periodic central difference along one grid axis, including the
/// 1/spacing factor. Works on any sampled field (positions, vectors).
Field grid_derivative(const ParamGrid& grid, const Field& f, int axis);

/// 4th-order periodic second derivative: same-axis stencil for a == b,
/// composed first derivatives for mixed pairs.
Field grid_second_derivative(const ParamGrid& grid, const Field& f, int a, int b);

/// Per-sample orthonormal tangent data of an immersion. With J the m x d
/// Jacobian (columns = parameter derivatives) and J = F R its Gram-Schmidt
/// factorization, stores the orthonormal columns F, R^{-1} (so that the
/// tangent vector F_i equals sum_a rinv[a][i] * d/dtheta_a), and the induced
/// volume density prod_i R[i][i] = sqrt(det Gram).
struct TangentFrame {
  ParamGrid grid;
  int m = 0;
  std::array<Field, kMaxIntrinsic> raw_jacobian;
  std::array<Field, kMaxIntrinsic> frames;
  std::vector<double> rinv;  // samples * d * d, entry [(s*d + a)*d + i]
  std::vector<double> vol;   // samples (all 1 for d=0)

  int d() const { return grid.d; }
  const double* frame(std::size_t s, int i) const { return frames[i].at(s); }
  double rinv_at(std::size_t s, int a, int i) const {
    return rinv[(s * grid.d + a) * grid.d + i];
  }
};

/// Computes frames by 4th-order differencing + modified Gram-Schmidt.
/// Throws (naming the sample) if the Jacobian's smallest singular value
/// falls to 1e-8 or below.
TangentFrame tangent_frame(const DiscreteImmersion& imm);

/// v - sum_i <v, f_i> f_i per sample: the pointwise orthogonal projection
/// onto the normal space. Idempotent.
Field normal_project(const TangentFrame& frame, const Field& ambient_field);

/// Per-sample sqrt(det Gram) of the parameter derivatives (1 for d=0).
std::vector<double> induced_volume(const DiscreteImmersion& imm);

/// Total volume: order-invariant trapezoidal sum of induced_volume times the
/// cell measure.
double total_volume(const DiscreteImmersion& imm);

/// Mean curvature vector H = (1/d) sum_i (second fundamental form)(f_i, f_i),
/// from 4th-order second derivatives converted through the frame. d >= 1.
Field mean_curvature(const DiscreteImmersion& imm);

/// The L2-gradient direction of total volume: -d * mean_curvature (zero
/// field for d=0).
Field gradient_field_W(const DiscreteImmersion& imm);

/// Cyclic grid shift per direction: an orientation-preserving discrete
/// reparametrization. Also applicable to any sampled field.
DiscreteImmersion reparametrize(const DiscreteImmersion& imm, const std::vector<int>& shift);
Field shift_field(const ParamGrid& grid, const Field& f, const std::vector<int>& shift);

/// Directional derivative of a sampled field along the orthonormal frame
/// vector f_i: sum_a rinv[a][i] * d/dtheta_a (chain rule through J = F R).
Field frame_derivative(const TangentFrame& tf, const Field& f, int i);

/// Second fundamental form slot (nabla_{f_i} f_j)^perp, from second
/// parameter derivatives converted through the frame and projected.
Field second_fundamental_form(const DiscreteImmersion& imm, const TangentFrame& tf, int i, int j);

// ---------------------------------------------------------------------------
// Presets. All accept the ambient dimension and embed in the leading
// coordinates; amplitudes of the seeded Fourier perturbations decay like
// 1/(1 + |k|^2) and the coefficients depend only on (seed, mode, coordinate),
// never on the grid size, so refinements sample one fixed smooth manifold.
// ---------------------------------------------------------------------------

/// Planar circle of given radius in the (e1, e2)-plane of R^m.
DiscreteImmersion make_circle(int m, double radius, int samples);

/// Trefoil-style knotted loop in the first three coordinates of R^m:
/// ((2 + cos 3t) cos 2t, (2 + cos 3t) sin 2t, sin 3t).
DiscreteImmersion make_trefoil_loop(int m, int samples);

/// Flat torus (r1 cos a, r1 sin a, r2 cos b, r2 sin b) in the first four
/// coordinates of R^m.
DiscreteImmersion make_flat_torus(int m, double r1, double r2, int n1, int n2);

/// Single point at the origin of R^m (d = 0).
DiscreteImmersion make_point(int m);

/// Adds a seeded band-limited displacement (modes up to kmax per direction)
/// of the given amplitude to every coordinate of an immersion.
DiscreteImmersion perturb_immersion(const DiscreteImmersion& imm, std::uint64_t seed,
                                    double amplitude, int kmax);

/// Seeded band-limited ambient-valued field over a grid (modes up to kmax
/// per direction); grid-size independent in the same sense as above.
Field band_limited_field(const ParamGrid& grid, int m, std::uint64_t seed, double amplitude,
                         int kmax);

/// Parses `{"grid":{"sizes":[...]}, "points":[[...], ...]}` (row-major).
DiscreteImmersion immersion_from_json(const std::string& text);

}  // namespace knotgeo
