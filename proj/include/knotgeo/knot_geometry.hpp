#pragma once

#include "knotgeo/ambient.hpp"
#include "knotgeo/immersion.hpp"
#include "knotgeo/small_linalg.hpp"
#include "knotgeo/vcp.hpp"

namespace knotgeo {

/// How a normal-field scheme extends its seed away from the base immersion.
/// In flat ambients both rules transport by translation and coincide; both
/// are kept so tensoriality checks can swap them.
enum class ExtensionRule { ConstantExtension, ExponentialVertical };

enum class ConnectionKind { Perp, LeviCivita };

/// The discretized knot space anchored at one base immersion: the ambient
/// space, the immersion, and its tangent frames. slot_sign flips the global
/// contraction convention (frames feed the leading slots of chi; -1 selects
/// the reversed convention).
struct KnotSpace {
  AmbientSpace ambient;
  DiscreteImmersion base;
  TangentFrame frame;
  double slot_sign = 1.0;
};

KnotSpace make_knot_space(AmbientSpace ambient, DiscreteImmersion base);

/// A tangent vector of the knot space at some immersion: a normal field,
/// extendable to nearby immersions by an ExtensionRule. compose_j wraps the
/// extension with the almost complex structure evaluated AT the target
/// immersion (never frozen at the base).
struct FieldScheme {
  ExtensionRule rule = ExtensionRule::ConstantExtension;
  bool compose_j = false;
  Field seed;
};

FieldScheme make_scheme(const KnotSpace& ks, Field seed,
                        ExtensionRule rule = ExtensionRule::ConstantExtension,
                        bool compose_j = false);

/// Projection onto the normal space at the base immersion.
Field project_normal(const KnotSpace& ks, const Field& ambient_values);

/// Weak L2 inner product at the base: quadrature of g(u, v) against the
/// induced volume density.
double l2_inner(const KnotSpace& ks, const Field& u, const Field& v);

/// Same, at an arbitrary frame (used at flowed immersions).
double l2_inner_at(const TangentFrame& tf, const Field& u, const Field& v);

/// Almost complex structure at the base: per sample, contract the cross
/// product with the oriented tangent frame, then with u. Enforces normality
/// of u within normal_tol.
Field apply_J(const KnotSpace& ks, const Field& u, double normal_tol = 1e-8);

/// J evaluated at an arbitrary immersion (frames recomputed by the caller).
Field apply_J_at(const AmbientSpace& ambient, const DiscreteImmersion& imm,
                 const TangentFrame& tf, const Field& u, double slot_sign = 1.0);

/// Transgressed 2-form: quadrature of phi(f_1, .., f_{r-1}, u, v) over S
/// (frame-first slot convention).
double omega2(const KnotSpace& ks, const Field& u, const Field& v);

/// Deforms the base immersion along a normal field: exp_map(x(s), t u(s)),
/// keeping torus coordinates on the continuous branch of the base lift.
DiscreteImmersion flow(const KnotSpace& ks, const Field& u, double t);

/// Value of the scheme at an immersion sharing the base grid: translation
/// transport of the seed, normal projection there, optional J composition.
Field field_value(const KnotSpace& ks, const FieldScheme& scheme, const DiscreteImmersion& imm);

/// Central-difference Lie bracket at the base, normal-projected:
/// [A, B] = D_A B - D_B A with D_A B = d/dt field_value(B, flow(A.seed, t)).
/// richardson combines steps h and h/2 as (4 D(h/2) - D(h)) / 3.
Field lie_bracket(const KnotSpace& ks, const FieldScheme& a, const FieldScheme& b, double h,
                  bool richardson = false);

/// Connection on the knot space. Perp: central difference along flow(u),
/// projected at base. LeviCivita: Perp minus the pointwise correction
/// (1/2) * [g(u,v) W - g(u,W) v - g(v,W) u] with v the scheme's base value.
Field covariant_derivative(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                           const FieldScheme& field, double h, bool richardson = false);

/// The symmetric bilinear correction tensor above (pointwise assembly;
/// scalar grid functions multiply normal fields sample-wise).
Field b_tensor(const KnotSpace& ks, const Field& u, const Field& v);

/// Nijenhuis tensor 2 { [Ju, Jv] - [u, v] - J[u, Jv] - J[Ju, v] } with the
/// J-composed schemes re-evaluating J at each flowed immersion.
Field nijenhuis(const KnotSpace& ks, const Field& u, const Field& v, double h,
                bool richardson = false);

/// nabla_u (J field) - J (nabla_u field) under the chosen connection.
Field nabla_J_defect(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                     const FieldScheme& field, double h, bool richardson = false);

/// nabla_a b - nabla_b a - [a, b].
Field torsion(const KnotSpace& ks, ConnectionKind kind, const FieldScheme& a,
              const FieldScheme& b, double h, bool richardson = false);

/// d/dt <b, c>_L2 along flow(u)  minus  <nabla_u b, c> + <b, nabla_u c>.
double metric_compatibility_defect(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                                   const FieldScheme& b, const FieldScheme& c, double h,
                                   bool richardson = false);

/// dω²(u, v, w) by the invariant formula: three FD directional derivatives
/// of omega2 along flows plus three bracket terms.
double d_omega2_defect(const KnotSpace& ks, const FieldScheme& u, const FieldScheme& v,
                       const FieldScheme& w, double h, bool richardson = false);

// ---------------------------------------------------------------------------
// Closed-form counterparts (no finite differencing in function space; only
// grid derivatives at the base). Derived from the first variation of the
// tangent frames under a normal flow:
//   S(b; v) := sum_i chi(f_1, .., (nabla_{f_i} b)^perp, .., f_d, v).
// ---------------------------------------------------------------------------

/// Closed form of nabla_J_defect for BOTH connections' shared part:
/// P S(u; v) where v is the field's base value. The LeviCivita variant
/// subtracts (1/2) P [ B(u, Jv) - J B(u, v) ].
Field nabla_J_closed_form(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                          const Field& v);

/// Closed form of the Nijenhuis tensor:
/// 2 { P S(kJ(u); v) - P S(kJ(v); u) - J P S(u; v) + J P S(v; u) } with
/// kJ_i(w) = sum_j chi(f_1, .., II_{ij}, .., f_d, w) + J((nabla_{f_i} w)^perp).
Field nijenhuis_closed_form(const KnotSpace& ks, const Field& u, const Field& v);

}  // namespace knotgeo
