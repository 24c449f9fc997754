// Tests for the discretized knot space: weak L2 metric, almost complex
// structure, transgressed two-form, flows, brackets, connections, and the
// integrability residues of the four flat parallel ambients.
//
// Numeric fixtures are pinned from converged runs of this implementation;
// identities get rounding-level tolerances, finite-difference quantities get
// tolerances matching the fourth-order stencil and step sizes used.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "knotgeo/knot_geometry.hpp"

using namespace knotgeo;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// Planar unit circle with an out-of-plane wobble, so the normal bundle twists
// along the loop and nothing degenerates by symmetry.
DiscreteImmersion wobble_circle(int m, int n, double w) {
  DiscreteImmersion imm = make_circle(m, 1.0, n);
  for (int i = 0; i < n; ++i) {
    double t = kTau * i / n;
    imm.points.at(static_cast<std::size_t>(i))[2] += w * std::cos(2.0 * t);
  }
  return imm;
}

Field field_diff(const Field& a, const Field& b) {
  Field out(a.samples(), a.m);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
  return out;
}

Field constant_field(std::size_t samples, int m, int axis) {
  Field f(samples, m);
  for (std::size_t s = 0; s < samples; ++s) f.at(s)[axis] = 1.0;
  return f;
}

Field radial_field(std::size_t samples, int m) {
  Field f(samples, m);
  for (std::size_t s = 0; s < samples; ++s) {
    double t = kTau * static_cast<double>(s) / static_cast<double>(samples);
    f.at(s)[0] = std::cos(t);
    f.at(s)[1] = std::sin(t);
  }
  return f;
}

}  // namespace

TEST_CASE("loop inner product and two-form reproduce the circle length") {
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::VolumeForm, 3), make_circle(3, 1.0, 128));
  std::size_t n = ks.base.grid.total();
  Field vert = constant_field(n, 3, 2);

  // g(e3, e3) = 1 pointwise, so the L2 norm integrates the arc length. The
  // fourth-order jacobian stencil carries a (1 - dx^4/30) bias, ~2e-7 at 128.
  CHECK(std::fabs(l2_inner(ks, vert, vert) - kTau) <= 1e-5);

  // omega2(e3, J e3) integrates |J e3|^2 = 1 over the loop.
  Field jv = apply_J(ks, vert);
  CHECK(std::fabs(omega2(ks, vert, jv) - kTau) <= 1e-5);
}

TEST_CASE("complex structure turns the vertical field of a planar circle radial") {
  std::size_t n = 128;
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::VolumeForm, 3), make_circle(3, 1.0, n));
  Field vert = constant_field(n, 3, 2);
  Field jv = apply_J(ks, vert);
  Field radial = radial_field(n, 3);
  // Tangent x e3 = outward radial. The unit-circle tangent frame is exact up
  // to rounding (normalization cancels the scalar stencil bias).
  CHECK(sup_pointwise_norm(field_diff(jv, radial)) <= 1e-12);
}

TEST_CASE("J squares to minus one and pairs into the two-form on every preset") {
  struct Preset {
    VcpKind kind;
    int m;
    DiscreteImmersion imm;
  };
  std::vector<Preset> presets;
  presets.push_back({VcpKind::VolumeForm, 3, make_circle(3, 1.0, 128)});
  presets.push_back({VcpKind::G2, 7, make_circle(7, 1.0, 128)});
  presets.push_back({VcpKind::VolumeForm, 4, make_flat_torus(4, 1.0, 1.0, 32, 32)});
  presets.push_back({VcpKind::Spin7, 8, make_flat_torus(8, 1.0, 1.0, 32, 32)});
  presets.push_back({VcpKind::Kaehler, 4, make_point(4)});

  for (const Preset& p : presets) {
    CAPTURE(static_cast<int>(p.kind));
    CAPTURE(p.m);
    KnotSpace ks = make_knot_space(make_euclidean_space(p.kind, p.m), p.imm);
    Field u = project_normal(ks, band_limited_field(ks.base.grid, p.m, 21, 1.0, 4));
    Field v = project_normal(ks, band_limited_field(ks.base.grid, p.m, 22, 1.0, 4));

    Field ju = apply_J(ks, u);
    Field jju = apply_J(ks, ju);
    // J J u = -u pointwise.
    Field sum(u.samples(), u.m);
    for (std::size_t i = 0; i < u.data.size(); ++i) sum.data[i] = jju.data[i] + u.data[i];
    CHECK(sup_pointwise_norm(sum) <= 1e-10);

    // Pointwise isometry: |J u| = |u| at every sample.
    double iso = 0.0;
    for (std::size_t s = 0; s < u.samples(); ++s) {
      double a = std::sqrt(dot(ju.at(s), ju.at(s), u.m));
      double b = std::sqrt(dot(u.at(s), u.at(s), u.m));
      iso = std::max(iso, std::fabs(a - b));
    }
    CHECK(iso <= 1e-10);

    // The transgressed two-form is the metric twisted by J, and antisymmetric.
    double w_uv = omega2(ks, u, v);
    CHECK(std::fabs(w_uv - l2_inner(ks, ju, v)) <= 1e-10);
    CHECK(std::fabs(w_uv + omega2(ks, v, u)) <= 1e-10);
  }
}

TEST_CASE("complex structure rejects fields with tangential components") {
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 64, 0.3));
  Field tangential(ks.base.grid.total(), 7);
  for (std::size_t s = 0; s < tangential.samples(); ++s)
    for (int c = 0; c < 7; ++c) tangential.at(s)[c] = ks.frame.frame(s, 0)[c];
  CHECK_THROWS_AS((void)apply_J(ks, tangential), Error);
}

TEST_CASE("scheme evaluation at the base immersion returns the seed") {
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 96, 0.3));
  Field u = project_normal(ks, band_limited_field(ks.base.grid, 7, 5, 1.0, 4));

  FieldScheme plain = make_scheme(ks, u);
  Field at_base = field_value(ks, plain, ks.base);
  CHECK(sup_pointwise_norm(field_diff(at_base, plain.seed)) <= 1e-13);

  // A J-composed scheme evaluates to J of the seed at the base.
  FieldScheme composed = make_scheme(ks, u, ExtensionRule::ConstantExtension, true);
  Field at_base_j = field_value(ks, composed, ks.base);
  CHECK(sup_pointwise_norm(field_diff(at_base_j, apply_J(ks, u))) <= 1e-13);
}

TEST_CASE("flow at time zero is the identity and radial flow rescales the circle") {
  std::size_t n = 128;
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::VolumeForm, 3), make_circle(3, 1.0, n));
  Field radial = radial_field(n, 3);

  DiscreteImmersion frozen = flow(ks, radial, 0.0);
  CHECK(std::memcmp(frozen.points.data.data(), ks.base.points.data.data(),
                    frozen.points.data.size() * sizeof(double)) == 0);

  DiscreteImmersion grown = flow(ks, radial, 0.5);
  DiscreteImmersion target = make_circle(3, 1.5, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < grown.points.data.size(); ++i)
    worst = std::max(worst, std::fabs(grown.points.data[i] - target.points.data[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("bracket is antisymmetric and kills equal and constant arguments") {
  std::size_t n = 96;
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, n, 0.3));
  FieldScheme a = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 31, 1.0, 4)));
  FieldScheme b = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 32, 1.0, 4)));

  Field ab = lie_bracket(ks, a, b, 1e-4, true);
  Field ba = lie_bracket(ks, b, a, 1e-4, true);
  // Swapping arguments negates every difference exactly (IEEE negation).
  bool exact = true;
  for (std::size_t i = 0; i < ab.data.size(); ++i)
    if (ab.data[i] != -ba.data[i]) exact = false;
  CHECK(exact);

  Field aa = lie_bracket(ks, a, a, 1e-4, true);
  CHECK(sup_pointwise_norm(aa) == 0.0);

  // Constant extensions of everywhere-normal constant vectors commute; the
  // leftover projector variation is tangential and dies in the projection.
  KnotSpace flat = make_knot_space(make_euclidean_space(VcpKind::VolumeForm, 3), make_circle(3, 1.0, 128));
  FieldScheme c1 = make_scheme(flat, constant_field(128, 3, 2));
  FieldScheme c2 = make_scheme(flat, radial_field(128, 3));
  Field cc = lie_bracket(flat, c1, c2, 1e-4, true);
  CHECK(sup_pointwise_norm(cc) <= 1e-6);
}

TEST_CASE("extension rules coincide over a flat ambient") {
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 64, 0.3));
  Field u = project_normal(ks, band_limited_field(ks.base.grid, 7, 8, 1.0, 4));
  Field v = project_normal(ks, band_limited_field(ks.base.grid, 7, 9, 1.0, 4));
  FieldScheme translated = make_scheme(ks, v, ExtensionRule::ConstantExtension);
  FieldScheme lifted = make_scheme(ks, v, ExtensionRule::ExponentialVertical);
  Field da = covariant_derivative(ks, ConnectionKind::Perp, u, translated, 1e-4, true);
  Field db = covariant_derivative(ks, ConnectionKind::Perp, u, lifted, 1e-4, true);
  CHECK(sup_pointwise_norm(field_diff(da, db)) == 0.0);
}

TEST_CASE("vertical exponential extensions have vanishing normal derivative") {
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 128, 0.3));
  Field u = project_normal(ks, band_limited_field(ks.base.grid, 7, 11, 1.0, 4));
  Field v = project_normal(ks, band_limited_field(ks.base.grid, 7, 12, 1.0, 4));
  FieldScheme fv = make_scheme(ks, v, ExtensionRule::ExponentialVertical);

  const double steps[] = {1e-2, 3e-3, 1e-3, 1e-4};
  const double pinned[] = {1.3233e-3, 1.1929e-4, 1.3256e-5, 1.3257e-7};
  double sup[4];
  for (int i = 0; i < 4; ++i) {
    Field cd = covariant_derivative(ks, ConnectionKind::Perp, u, fv, steps[i], false);
    sup[i] = sup_pointwise_norm(cd);
    CHECK(std::fabs(sup[i] - pinned[i]) <= 0.10 * pinned[i]);
  }
  CHECK(sup[3] <= 1e-6);

  // Second-order decay in the step between the last two pre-floor points.
  double slope = std::log(sup[2] / sup[3]) / std::log(steps[2] / steps[3]);
  CHECK(slope >= 1.9);
}

TEST_CASE("both connections are torsion-free to rounding") {
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 128, 0.3));
  FieldScheme fa = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 11, 1.0, 4)));
  FieldScheme fb = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 12, 1.0, 4)));
  CHECK(sup_pointwise_norm(torsion(ks, ConnectionKind::Perp, fa, fb, 1e-4, true)) <= 1e-12);
  CHECK(sup_pointwise_norm(torsion(ks, ConnectionKind::LeviCivita, fa, fb, 1e-4, true)) <= 1e-12);
}

TEST_CASE("raw-connection metric defect matches the shape-derivative quadrature") {
  std::size_t n = 128;
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::VolumeForm, 3), make_circle(3, 1.0, n));
  Field u = project_normal(ks, radial_field(n, 3));
  FieldScheme fb = make_scheme(ks, u);

  double dperp = metric_compatibility_defect(ks, ConnectionKind::Perp, u, fb, fb, 1e-4, true);
  double dlc = metric_compatibility_defect(ks, ConnectionKind::LeviCivita, u, fb, fb, 1e-4, true);

  // Independent oracle: the volume-variation term integrated by the same
  // trapezoid rule. Radial flow of the unit circle changes length at rate
  // 2 pi, so the defect itself sits at the loop length.
  Field w = gradient_field_W(ks.base);
  std::vector<double> terms(n);
  for (std::size_t s = 0; s < n; ++s)
    terms[s] = dot(u.at(s), u.at(s), 3) * dot(u.at(s), w.at(s), 3) * ks.frame.vol[s];
  double oracle = stable_sum(std::move(terms)) * ks.base.grid.cell();

  CHECK(std::fabs(dperp - oracle) <= 5e-6);
  CHECK(std::fabs(dperp - kTau) <= 1e-5);
  // The volume correction restores metric compatibility.
  CHECK(std::fabs(dlc) <= 5e-6);
}

TEST_CASE("codimension-two volume-form ambients are integrable to the FD floor") {
  struct Setup {
    VcpKind kind;
    int m;
    DiscreteImmersion imm;
  };
  std::vector<Setup> setups;
  setups.push_back({VcpKind::VolumeForm, 3, wobble_circle(3, 128, 0.3)});
  setups.push_back({VcpKind::VolumeForm, 4, make_flat_torus(4, 1.0, 1.0, 48, 48)});

  for (const Setup& st : setups) {
    CAPTURE(st.m);
    KnotSpace ks = make_knot_space(make_euclidean_space(st.kind, st.m), st.imm);
    Field u = project_normal(ks, band_limited_field(ks.base.grid, st.m, 31, 1.0, 4));
    Field v = project_normal(ks, band_limited_field(ks.base.grid, st.m, 32, 1.0, 4));

    CHECK(sup_pointwise_norm(nijenhuis(ks, u, v, 1e-4, true)) <= 1e-9);
    FieldScheme fv = make_scheme(ks, v);
    CHECK(sup_pointwise_norm(nabla_J_defect(ks, ConnectionKind::Perp, u, fv, 1e-4, true)) <= 1e-9);
    CHECK(sup_pointwise_norm(nabla_J_defect(ks, ConnectionKind::LeviCivita, u, fv, 1e-4, true)) <= 1e-9);
  }
}

TEST_CASE("exceptional ambients leave a residue that matches the closed form") {
  // Seven-dimensional two-fold case on a loop.
  {
    KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 128, 0.3));
    Field u = project_normal(ks, band_limited_field(ks.base.grid, 7, 31, 1.0, 4));
    Field v = project_normal(ks, band_limited_field(ks.base.grid, 7, 32, 1.0, 4));

    Field nj = nijenhuis(ks, u, v, 1e-4, true);
    double raw = sup_pointwise_norm(nj);
    CHECK(std::fabs(raw - 22.338) <= 0.01 * 22.338);
    CHECK(sup_pointwise_norm(field_diff(nj, nijenhuis_closed_form(ks, u, v))) <= 1e-2);

    FieldScheme fv = make_scheme(ks, v);
    Field dp = nabla_J_defect(ks, ConnectionKind::Perp, u, fv, 1e-4, true);
    Field dl = nabla_J_defect(ks, ConnectionKind::LeviCivita, u, fv, 1e-4, true);
    CHECK(std::fabs(sup_pointwise_norm(dp) - 4.0050) <= 0.01 * 4.0050);
    CHECK(std::fabs(sup_pointwise_norm(dl) - 4.0620) <= 0.01 * 4.0620);
    CHECK(sup_pointwise_norm(field_diff(dp, nabla_J_closed_form(ks, ConnectionKind::Perp, u, v))) <= 1e-8);
    CHECK(sup_pointwise_norm(field_diff(dl, nabla_J_closed_form(ks, ConnectionKind::LeviCivita, u, v))) <= 1e-8);
  }
  // Eight-dimensional three-fold case on a torus.
  {
    KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::Spin7, 8),
                                   make_flat_torus(8, 1.0, 1.0, 48, 48));
    Field u = project_normal(ks, band_limited_field(ks.base.grid, 8, 31, 1.0, 4));
    Field v = project_normal(ks, band_limited_field(ks.base.grid, 8, 32, 1.0, 4));

    Field nj = nijenhuis(ks, u, v, 1e-4, true);
    double raw = sup_pointwise_norm(nj);
    CHECK(std::fabs(raw - 459.12) <= 0.01 * 459.12);
    // Grid-limited agreement: the deviation is small relative to the residue.
    CHECK(sup_pointwise_norm(field_diff(nj, nijenhuis_closed_form(ks, u, v))) <= 5e-3 * raw);

    FieldScheme fv = make_scheme(ks, v);
    Field dp = nabla_J_defect(ks, ConnectionKind::Perp, u, fv, 1e-4, true);
    CHECK(sup_pointwise_norm(field_diff(dp, nabla_J_closed_form(ks, ConnectionKind::Perp, u, v))) <= 1e-8);
  }
}

TEST_CASE("closed-form deviation shrinks under joint grid and step refinement") {
  struct Cell {
    int n;
    double h;
  };
  const Cell loop_cells[] = {{32, 1e-3}, {64, 3e-4}, {128, 1e-4}};
  const Cell torus_cells[] = {{16, 1e-3}, {32, 3e-4}, {48, 1e-4}};

  auto deviation = [](VcpKind kind, int m, int d, int n, double h) {
    DiscreteImmersion imm =
        d == 1 ? wobble_circle(m, n, 0.3) : make_flat_torus(m, 1.0, 1.0, n, n);
    KnotSpace ks = make_knot_space(make_euclidean_space(kind, m), imm);
    Field u = project_normal(ks, band_limited_field(ks.base.grid, m, 41, 1.0, 4));
    Field v = project_normal(ks, band_limited_field(ks.base.grid, m, 42, 1.0, 4));
    Field nj = nijenhuis(ks, u, v, h, true);
    return sup_pointwise_norm(field_diff(nj, nijenhuis_closed_form(ks, u, v)));
  };

  // Seven- and eight-dimensional residues converge to the closed form.
  double g2[3], s7[3], r4[3], r3[3];
  for (int i = 0; i < 3; ++i) {
    g2[i] = deviation(VcpKind::G2, 7, 1, loop_cells[i].n, loop_cells[i].h);
    s7[i] = deviation(VcpKind::Spin7, 8, 2, torus_cells[i].n, torus_cells[i].h);
    r4[i] = deviation(VcpKind::VolumeForm, 4, 2, torus_cells[i].n, torus_cells[i].h);
    r3[i] = deviation(VcpKind::VolumeForm, 3, 1, loop_cells[i].n, loop_cells[i].h);
  }
  CHECK(g2[0] > g2[1]);
  CHECK(g2[1] > g2[2]);
  CHECK(std::fabs(g2[2] - 1.1857e-3) <= 0.10 * 1.1857e-3);
  CHECK(s7[0] > s7[1]);
  CHECK(s7[1] > s7[2]);
  CHECK(r4[0] > r4[1]);
  CHECK(r4[1] > r4[2]);
  // The three-dimensional loop case bottoms out at the rounding floor of the
  // h-scaled central differences; every cell sits below it.
  for (double d : r3) CHECK(d <= 1e-9);
}

TEST_CASE("twisting the ambient structure breaks integrability and interpolates back") {
  for (unsigned seed : {41u, 51u, 61u}) {
    CAPTURE(seed);
    DiscreteImmersion imm = wobble_circle(7, 128, 0.3);
    KnotSpace parallel = make_knot_space(make_euclidean_space(VcpKind::G2, 7), imm);
    KnotSpace twisted = make_knot_space(make_euclidean_space(VcpKind::G2, 7, 0.5), imm);
    KnotSpace nearly = make_knot_space(make_euclidean_space(VcpKind::G2, 7, 1e-3), imm);

    Field u0 = band_limited_field(imm.grid, 7, seed, 1.0, 4);
    Field v0 = band_limited_field(imm.grid, 7, seed + 1000, 1.0, 4);

    auto closed_form_deviation = [&](KnotSpace& ks) {
      Field u = project_normal(ks, u0);
      Field v = project_normal(ks, v0);
      Field nj = nijenhuis(ks, u, v, 1e-4, true);
      return sup_pointwise_norm(field_diff(nj, nijenhuis_closed_form(ks, u, v)));
    };
    auto raw_residue = [&](KnotSpace& ks) {
      Field u = project_normal(ks, u0);
      Field v = project_normal(ks, v0);
      return sup_pointwise_norm(nijenhuis(ks, u, v, 1e-4, true));
    };

    // The position-dependent structure falls off the parallel closed-form
    // model by orders of magnitude; the parallel case stays on it.
    CHECK(closed_form_deviation(twisted) >= 100.0 * closed_form_deviation(parallel));

    // A tiny twist interpolates back to the parallel residue.
    double ratio = raw_residue(nearly) / raw_residue(parallel);
    CHECK(ratio >= 1.0 / 1.05);
    CHECK(ratio <= 1.05);
  }
}

TEST_CASE("the two-form is closed under refinement and degenerate arguments vanish") {
  // Coarse grid: stencil-limited closedness defect.
  {
    KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 128, 0.3));
    FieldScheme su = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 11, 1.0, 4)));
    FieldScheme sv = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 12, 1.0, 4)));
    FieldScheme sw = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 13, 1.0, 4)));
    CHECK(std::fabs(d_omega2_defect(ks, su, sv, sw, 1e-4, true)) <= 5e-4);
    // A repeated argument cancels exactly through the antisymmetrization.
    CHECK(std::fabs(d_omega2_defect(ks, su, sv, su, 1e-4, true)) <= 1e-9);
  }
  // Fine grid: the defect drops with the fourth power of resolution.
  {
    KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), wobble_circle(7, 384, 0.3));
    FieldScheme su = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 11, 1.0, 4)));
    FieldScheme sv = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 12, 1.0, 4)));
    FieldScheme sw = make_scheme(ks, project_normal(ks, band_limited_field(ks.base.grid, 7, 13, 1.0, 4)));
    CHECK(std::fabs(d_omega2_defect(ks, su, sv, sw, 1e-4, true)) <= 1e-5);
  }
}

TEST_CASE("point immersions with a planar-rotation ambient are exactly integrable") {
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::Kaehler, 4), make_point(4));
  Field u = band_limited_field(ks.base.grid, 4, 3, 1.0, 0);
  Field v = band_limited_field(ks.base.grid, 4, 4, 1.0, 0);
  CHECK(sup_pointwise_norm(nijenhuis(ks, u, v, 1e-4, false)) <= 1e-14);
  FieldScheme fv = make_scheme(ks, v);
  CHECK(sup_pointwise_norm(nabla_J_defect(ks, ConnectionKind::Perp, u, fv, 1e-4, false)) <= 1e-14);
  CHECK(sup_pointwise_norm(nabla_J_defect(ks, ConnectionKind::LeviCivita, u, fv, 1e-4, false)) <= 1e-14);
}

TEST_CASE("reversing the contraction convention preserves even quantities and flips odd ones") {
  DiscreteImmersion imm = wobble_circle(7, 96, 0.3);
  KnotSpace plus = make_knot_space(make_euclidean_space(VcpKind::G2, 7), imm);
  KnotSpace minus = plus;
  minus.slot_sign = -1.0;

  Field u = project_normal(plus, band_limited_field(imm.grid, 7, 31, 1.0, 4));
  Field v = project_normal(plus, band_limited_field(imm.grid, 7, 32, 1.0, 4));

  // The integrability tensor contains the structure an even number of times.
  Field np = nijenhuis(plus, u, v, 1e-4, true);
  Field nm = nijenhuis(minus, u, v, 1e-4, true);
  CHECK(sup_pointwise_norm(field_diff(np, nm)) <= 1e-12);

  // The parallelism defect contains it an odd number of times.
  FieldScheme fp = make_scheme(plus, v);
  FieldScheme fm = make_scheme(minus, v);
  Field dp = nabla_J_defect(plus, ConnectionKind::Perp, u, fp, 1e-4, true);
  Field dm = nabla_J_defect(minus, ConnectionKind::Perp, u, fm, 1e-4, true);
  Field sum(dp.samples(), dp.m);
  for (std::size_t i = 0; i < dp.data.size(); ++i) sum.data[i] = dp.data[i] + dm.data[i];
  CHECK(sup_pointwise_norm(sum) <= 1e-12);
}

TEST_CASE("scalar invariants are bit-identical under grid shifts") {
  DiscreteImmersion imm = wobble_circle(7, 128, 0.3);
  KnotSpace ks = make_knot_space(make_euclidean_space(VcpKind::G2, 7), imm);
  Field u = project_normal(ks, band_limited_field(imm.grid, 7, 31, 1.0, 4));
  Field v = project_normal(ks, band_limited_field(imm.grid, 7, 32, 1.0, 4));

  std::vector<int> shift = {37};
  KnotSpace moved = make_knot_space(ks.ambient, reparametrize(imm, shift));
  Field us = shift_field(imm.grid, u, shift);
  Field vs = shift_field(imm.grid, v, shift);

  CHECK(l2_inner(ks, u, v) == l2_inner(moved, us, vs));
  CHECK(omega2(ks, u, v) == omega2(moved, us, vs));
  CHECK(sup_pointwise_norm(nijenhuis(ks, u, v, 1e-4, true)) ==
        sup_pointwise_norm(nijenhuis(moved, us, vs, 1e-4, true)));
}

TEST_CASE("construction rejects rank and dimension mismatches") {
  // A three-fold structure needs a two-parameter immersion, not a loop.
  CHECK_THROWS_AS(
      (void)make_knot_space(make_euclidean_space(VcpKind::Spin7, 8), make_circle(8, 1.0, 64)),
      Error);
  // Ambient and immersion dimensions must agree.
  CHECK_THROWS_AS(
      (void)make_knot_space(make_euclidean_space(VcpKind::G2, 7), make_circle(3, 1.0, 64)),
      Error);
}
