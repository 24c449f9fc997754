#pragma once

#include <array>
#include <functional>
#include <vector>

#include "knotgeo/small_linalg.hpp"
#include "knotgeo/vcp.hpp"

namespace knotgeo {

enum class Topology { Euclidean, Torus };

/// Flat R^m or a flat torus R^m / (periods * Z^m), carrying a cross-product
/// field. twist_rate == 0 gives the translation-invariant (parallel) field;
/// twist_rate != 0 conjugates the base tensor by the point-dependent rotation
/// R(p) = exp(twist_rate * p[0] * A), A the (e2, e3)-plane generator, which is
/// smooth, pointwise-axiom-preserving, and non-constant along e1.
struct AmbientSpace {
  int m = 0;
  Topology topology = Topology::Euclidean;
  std::array<double, kMaxDim> periods{};  // meaningful for Torus only
  LinearVcp base;
  double twist_rate = 0.0;

  bool is_parallel() const { return twist_rate == 0.0; }
};

AmbientSpace make_euclidean_space(VcpKind kind, int m, double twist_rate = 0.0);
AmbientSpace make_torus_space(VcpKind kind, int m, const std::vector<double>& periods,
                              double twist_rate = 0.0);

/// Reduces p into the fundamental domain [0, period) per coordinate (no-op
/// for Euclidean topology).
void wrap_point(const AmbientSpace& space, double* p);

/// Shifts x by whole periods so that each coordinate lies within half a
/// period of ref (no-op for Euclidean topology). Used to lift torus-valued
/// samples to a continuous branch before finite differencing.
void unwrap_near(const AmbientSpace& space, const double* ref, double* x);

/// Riemannian exponential: p + v, wrapped into the fundamental domain on tori.
void exp_map(const AmbientSpace& space, const double* p, const double* v, double* out);

/// The rotation R(p) of the twist field, row-major m*m (identity when parallel).
void twist_rotation(const AmbientSpace& space, const double* p, double* rot);

/// The cross-product tensor of the field at p, materialized. For a parallel
/// field this is bitwise the base tensor at every point.
LinearVcp vcp_at(const AmbientSpace& space, const double* p);

/// Evaluates the field's chi at p on args without materializing the rotated
/// tensor: args are rotated into the base frame, chi applied, result rotated
/// back. Bitwise-identical to the base evaluation when parallel.
void chi_at(const AmbientSpace& space, const double* p, const double* const* args, double* out);

/// <chi_at(p)(args[0..r-1]), args[r]>.
double form_at(const AmbientSpace& space, const double* p, const double* const* args);

using CurveFn = std::function<void(double, double*)>;

/// Central-difference derivative of a vector-valued curve sample at t:
/// (field(t+h) - field(t-h)) / (2h). On tori the three samples are first
/// lifted to a continuous branch around field(t); in flat coordinates the
/// connection along the path is plain componentwise differentiation.
void ambient_derivative(const AmbientSpace& space, const CurveFn& path, const CurveFn& field,
                        double t, double h, double* out);

}  // namespace knotgeo
