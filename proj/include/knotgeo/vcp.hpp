#pragma once
// Exact linear algebra of r-fold vector cross products (VCPs) on R^m:
// the four classified kinds, their structure tensors, the (r+1)-form, and the
// complex structure each VCP induces on the orthogonal complement of an
// oriented (r-1)-plane.

#include <cstdint>
#include <string>
#include <vector>

#include "knotgeo/small_linalg.hpp"

namespace knotgeo {

enum class VcpKind {
  Kaehler,     // r = 1, m even: an orthogonal complex structure
  VolumeForm,  // r = m-1: signed-cofactor expansion of the volume form
  G2,          // r = 2, m = 7: imaginary-octonion cross product
  Spin7,       // r = 3, m = 8: octonion triple product
};

std::string to_string(VcpKind kind);

/// One nonzero block of the structure tensor over a strictly increasing lower
/// index tuple; evaluation contracts it with the r x r minor determinant of the
/// argument components at those indices.
struct ChiEntry {
  int out;                  // upper (output) index k
  std::array<int, 4> idx;   // strictly increasing lower indices, idx[0..r-1]
  double coeff;             // +-1
};

struct LinearVcp {
  VcpKind kind;
  int m = 0;
  int r = 0;
  /// Dense coefficients chi[k][i1]...[ir], row-major in the lower indices
  /// (size m^(r+1)); fully antisymmetric in the lower indices, entries in {-1,0,1}.
  std::vector<double> dense;
  /// Compressed form of `dense` over increasing lower tuples (the evaluator).
  std::vector<ChiEntry> entries;

  double chi_coeff(int k, const int* lower) const;
};

/// Constructs the structure tensor for the requested kind.
/// Legal dimensions: Kaehler m in {2,4,6,8}; VolumeForm m in {3,4,5};
/// G2 m = 7; Spin7 m = 8.
LinearVcp make_vcp(VcpKind kind, int m);

/// Recomputes `entries` from `dense` after the dense tensor was edited
/// (e.g. rotated). Keeps only increasing lower tuples with nonzero output.
void rebuild_entry_table(LinearVcp& vcp);

/// chi(args[0], ..., args[r-1]) written into out (dimension m).
void evaluate_chi(const LinearVcp& vcp, const double* const* args, double* out);

/// phi(args[0], ..., args[r]) = <chi(args[0..r-1]), args[r]>.
double vcp_form(const LinearVcp& vcp, const double* const* args);

/// Oriented q-plane given by q orthonormal vectors in R^m.
struct OrientedPlaneElement {
  int m = 0;
  std::vector<std::array<double, kMaxDim>> frame;

  int q() const { return static_cast<int>(frame.size()); }
  /// Max deviation of the frame Gram matrix from the identity.
  double orthonormality_defect() const;
};

/// Modified Gram-Schmidt re-orthonormalization (in place, orientation preserving).
void reorthonormalize(OrientedPlaneElement& plane);

/// J(xi) = chi(f_1, ..., f_{r-1}, xi) for a plane with q = r-1 frame vectors.
/// Requires xi orthogonal to the plane within `normal_tol` (default 1e-10);
/// the result is orthogonal to the plane and J(J(xi)) = -xi.
void induced_complex_structure(const LinearVcp& vcp, const OrientedPlaneElement& plane,
                               const double* xi, double* out, double normal_tol = 1e-10);

struct AxiomReport {
  double max_orthogonality = 0.0;  // worst |<chi(v_1..v_r), v_i>|
  double max_norm = 0.0;           // worst | ||chi||^2 - Gram determinant |
  double max_violation() const { return std::max(max_orthogonality, max_norm); }
};

/// Exhaustive basis-tuple check plus `trials` seeded random tuples.
AxiomReport verify_vcp_axioms(const LinearVcp& vcp, int trials, std::uint64_t seed);

/// Test hook: returns a copy with the sign of one nonzero coefficient flipped
/// (and its dense antisymmetric images left inconsistent on purpose).
LinearVcp corrupted_copy(const LinearVcp& vcp);

/// Exportable description: list of (upper index, lower tuple, coefficient).
std::string chi_to_json(const LinearVcp& vcp);

}  // namespace knotgeo
