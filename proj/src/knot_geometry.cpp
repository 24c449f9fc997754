#include "knotgeo/knot_geometry.hpp"

#include <cmath>
#include <string>

namespace knotgeo {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

int intrinsic_dim(const KnotSpace& ks) { return ks.base.grid.d; }

void check_field(const KnotSpace& ks, const Field& f, const char* what) {
  require(f.m == ks.ambient.m && f.samples() == ks.base.grid.total(),
          std::string(what) + ": field shape does not match the knot space");
}

/// chi contracted with the given frame vectors (leading slots) and one final
/// argument, at ambient point p; multiplied by slot_sign.
void contract_frames(const AmbientSpace& ambient, double slot_sign, const double* p,
                     const double* const* frame_ptrs, int d, const double* last, double* out) {
  std::array<const double*, 4> args{};
  for (int i = 0; i < d; ++i) args[i] = frame_ptrs[i];
  args[d] = last;
  chi_at(ambient, p, args.data(), out);
  if (slot_sign != 1.0) scale(slot_sign, out, ambient.m);
}

Field apply_J_impl(const AmbientSpace& ambient, const DiscreteImmersion& imm,
                   const TangentFrame& tf, const Field& u, double slot_sign) {
  const int d = imm.grid.d, m = imm.m;
  require(ambient.base.r == d + 1,
          "cross-product arity " + std::to_string(ambient.base.r) +
              " does not match intrinsic dimension + 1 = " + std::to_string(d + 1));
  Field out(imm.grid.total(), m);
  std::array<const double*, kMaxIntrinsic> frames{};
  for (std::size_t s = 0; s < out.samples(); ++s) {
    for (int i = 0; i < d; ++i) frames[i] = tf.frame(s, i);
    contract_frames(ambient, slot_sign, imm.points.at(s), frames.data(), d, u.at(s), out.at(s));
  }
  return out;
}

/// Scheme value at an immersion whose frame is already computed.
Field value_with_frame(const KnotSpace& ks, const FieldScheme& scheme,
                       const DiscreteImmersion& imm, const TangentFrame& tf) {
  // Both extension rules transport by translation in a flat ambient (the
  // differential of the exponential map is the identity), so ambient
  // components are reused verbatim and projected at the target.
  Field value = normal_project(tf, scheme.seed);
  if (scheme.compose_j) value = apply_J_impl(ks.ambient, imm, tf, value, ks.slot_sign);
  return value;
}

/// d/dt field_value(scheme, flow(seed, t)) at t=0, ambient components
/// compared by translation. No projection (callers project at base).
Field flow_derivative(const KnotSpace& ks, const Field& flow_seed, const FieldScheme& scheme,
                      double h) {
  DiscreteImmersion plus = flow(ks, flow_seed, +h);
  DiscreteImmersion minus = flow(ks, flow_seed, -h);
  TangentFrame tfp = tangent_frame(plus), tfm = tangent_frame(minus);
  Field vp = value_with_frame(ks, scheme, plus, tfp);
  Field vm = value_with_frame(ks, scheme, minus, tfm);
  Field out(vp.samples(), vp.m);
  const double inv = 1.0 / (2.0 * h);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = (vp.data[i] - vm.data[i]) * inv;
  return out;
}

Field richardson_combine(const Field& coarse, const Field& fine) {
  Field out(coarse.samples(), coarse.m);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = (4.0 * fine.data[i] - coarse.data[i]) / 3.0;
  return out;
}

Field scaled_sum(const Field& a, double ca, const Field& b, double cb) {
  Field out(a.samples(), a.m);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = ca * a.data[i] + cb * b.data[i];
  return out;
}

/// S(b; v) = sum_i chi(f_1, .., (nabla_{f_i} b)^perp, .., f_d, v), ambient-valued.
Field s_term(const KnotSpace& ks, const Field& b, const Field& v) {
  const int d = intrinsic_dim(ks), m = ks.ambient.m;
  Field out(ks.base.grid.total(), m);
  std::array<const double*, kMaxIntrinsic> frames{};
  std::array<double, kMaxDim> val{};
  for (int i = 0; i < d; ++i) {
    Field kb = normal_project(ks.frame, frame_derivative(ks.frame, b, i));
    for (std::size_t s = 0; s < out.samples(); ++s) {
      for (int j = 0; j < d; ++j) frames[j] = ks.frame.frame(s, j);
      frames[i] = kb.at(s);
      contract_frames(ks.ambient, ks.slot_sign, ks.base.points.at(s), frames.data(), d, v.at(s),
                      val.data());
      axpy(1.0, val.data(), out.at(s), m);
    }
  }
  return out;
}

}  // namespace

KnotSpace make_knot_space(AmbientSpace ambient, DiscreteImmersion base) {
  require(ambient.m == base.m, "ambient and immersion dimensions differ");
  require(ambient.base.r == base.grid.d + 1,
          "cross-product arity must equal intrinsic dimension + 1");
  KnotSpace ks;
  ks.ambient = std::move(ambient);
  ks.base = std::move(base);
  ks.frame = tangent_frame(ks.base);
  return ks;
}

FieldScheme make_scheme(const KnotSpace& ks, Field seed, ExtensionRule rule, bool compose_j) {
  check_field(ks, seed, "make_scheme");
  FieldScheme scheme;
  scheme.rule = rule;
  scheme.compose_j = compose_j;
  scheme.seed = normal_project(ks.frame, std::move(seed));
  return scheme;
}

Field project_normal(const KnotSpace& ks, const Field& ambient_values) {
  check_field(ks, ambient_values, "project_normal");
  return normal_project(ks.frame, ambient_values);
}

double l2_inner_at(const TangentFrame& tf, const Field& u, const Field& v) {
  require(u.samples() == tf.grid.total() && v.samples() == tf.grid.total() && u.m == v.m,
          "l2_inner: field shapes disagree");
  std::vector<double> terms(u.samples());
  for (std::size_t s = 0; s < u.samples(); ++s) terms[s] = dot(u.at(s), v.at(s), u.m) * tf.vol[s];
  return stable_sum(std::move(terms)) * tf.grid.cell();
}

double l2_inner(const KnotSpace& ks, const Field& u, const Field& v) {
  check_field(ks, u, "l2_inner");
  check_field(ks, v, "l2_inner");
  return l2_inner_at(ks.frame, u, v);
}

Field apply_J_at(const AmbientSpace& ambient, const DiscreteImmersion& imm,
                 const TangentFrame& tf, const Field& u, double slot_sign) {
  return apply_J_impl(ambient, imm, tf, u, slot_sign);
}

Field apply_J(const KnotSpace& ks, const Field& u, double normal_tol) {
  check_field(ks, u, "apply_J");
  for (std::size_t s = 0; s < u.samples(); ++s)
    for (int i = 0; i < intrinsic_dim(ks); ++i)
      if (std::fabs(dot(u.at(s), ks.frame.frame(s, i), u.m)) > normal_tol)
        throw Error("apply_J: input is not a normal field (violation at sample " +
                    std::to_string(s) + ")");
  return apply_J_impl(ks.ambient, ks.base, ks.frame, u, ks.slot_sign);
}

double omega2(const KnotSpace& ks, const Field& u, const Field& v) {
  check_field(ks, u, "omega2");
  check_field(ks, v, "omega2");
  const int d = intrinsic_dim(ks), m = ks.ambient.m;
  std::array<const double*, kMaxIntrinsic> frames{};
  std::array<double, kMaxDim> val{};
  std::vector<double> terms(u.samples());
  for (std::size_t s = 0; s < u.samples(); ++s) {
    for (int i = 0; i < d; ++i) frames[i] = ks.frame.frame(s, i);
    // phi(f_1, .., f_{r-1}, u, v) = <chi(f_1, .., f_{r-1}, u), v>.
    contract_frames(ks.ambient, ks.slot_sign, ks.base.points.at(s), frames.data(), d, u.at(s),
                    val.data());
    terms[s] = dot(val.data(), v.at(s), m) * ks.frame.vol[s];
  }
  return stable_sum(std::move(terms)) * ks.base.grid.cell();
}

DiscreteImmersion flow(const KnotSpace& ks, const Field& u, double t) {
  check_field(ks, u, "flow");
  DiscreteImmersion out = ks.base;
  for (std::size_t s = 0; s < u.samples(); ++s) {
    const double* p = ks.base.points.at(s);
    double* q = out.points.at(s);
    std::array<double, kMaxDim> step{};
    for (int c = 0; c < u.m; ++c) step[c] = t * u.at(s)[c];
    exp_map(ks.ambient, p, step.data(), q);
    // Keep the sampled surface on one continuous coordinate branch.
    unwrap_near(ks.ambient, p, q);
  }
  return out;
}

Field field_value(const KnotSpace& ks, const FieldScheme& scheme, const DiscreteImmersion& imm) {
  require(imm.grid.total() == ks.base.grid.total() && imm.grid.d == ks.base.grid.d,
          "field_value: immersion does not share the base grid");
  TangentFrame tf = tangent_frame(imm);
  return value_with_frame(ks, scheme, imm, tf);
}

Field lie_bracket(const KnotSpace& ks, const FieldScheme& a, const FieldScheme& b, double h,
                  bool richardson) {
  require(h > 0.0, "lie_bracket needs h > 0");
  Field seed_a = value_with_frame(ks, a, ks.base, ks.frame);
  Field seed_b = value_with_frame(ks, b, ks.base, ks.frame);
  auto at = [&](double hh) {
    Field dab = flow_derivative(ks, seed_a, b, hh);
    Field dba = flow_derivative(ks, seed_b, a, hh);
    return scaled_sum(dab, 1.0, dba, -1.0);
  };
  Field val = at(h);
  if (richardson) val = richardson_combine(val, at(h / 2.0));
  return normal_project(ks.frame, val);
}

Field b_tensor(const KnotSpace& ks, const Field& u, const Field& v) {
  check_field(ks, u, "b_tensor");
  check_field(ks, v, "b_tensor");
  Field w = gradient_field_W(ks.base);
  const int m = ks.ambient.m;
  Field out(u.samples(), m);
  for (std::size_t s = 0; s < u.samples(); ++s) {
    double guv = dot(u.at(s), v.at(s), m);
    double guw = dot(u.at(s), w.at(s), m);
    double gvw = dot(v.at(s), w.at(s), m);
    double* o = out.at(s);
    axpy(guv, w.at(s), o, m);
    axpy(-guw, v.at(s), o, m);
    axpy(-gvw, u.at(s), o, m);
  }
  return out;
}

Field covariant_derivative(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                           const FieldScheme& field, double h, bool richardson) {
  require(h > 0.0, "covariant_derivative needs h > 0");
  check_field(ks, u, "covariant_derivative");
  Field val = flow_derivative(ks, u, field, h);
  if (richardson) val = richardson_combine(val, flow_derivative(ks, u, field, h / 2.0));
  Field out = normal_project(ks.frame, val);
  if (kind == ConnectionKind::LeviCivita) {
    Field base_value = value_with_frame(ks, field, ks.base, ks.frame);
    Field corr = b_tensor(ks, u, base_value);
    out = scaled_sum(out, 1.0, corr, -0.5);
  }
  return out;
}

Field nijenhuis(const KnotSpace& ks, const Field& u_raw, const Field& v_raw, double h,
                bool richardson) {
  Field u = project_normal(ks, u_raw);
  Field v = project_normal(ks, v_raw);
  FieldScheme fu = make_scheme(ks, u);
  FieldScheme fv = make_scheme(ks, v);
  FieldScheme fju = make_scheme(ks, u, ExtensionRule::ConstantExtension, true);
  FieldScheme fjv = make_scheme(ks, v, ExtensionRule::ConstantExtension, true);

  Field t = lie_bracket(ks, fju, fjv, h, richardson);
  t = scaled_sum(t, 1.0, lie_bracket(ks, fu, fv, h, richardson), -1.0);
  Field ju_bracket = apply_J_impl(ks.ambient, ks.base, ks.frame,
                                  lie_bracket(ks, fu, fjv, h, richardson), ks.slot_sign);
  Field jv_bracket = apply_J_impl(ks.ambient, ks.base, ks.frame,
                                  lie_bracket(ks, fju, fv, h, richardson), ks.slot_sign);
  t = scaled_sum(t, 1.0, ju_bracket, -1.0);
  t = scaled_sum(t, 1.0, jv_bracket, -1.0);
  for (double& x : t.data) x *= 2.0;
  return t;
}

Field nabla_J_defect(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                     const FieldScheme& field, double h, bool richardson) {
  FieldScheme jfield = field;
  jfield.compose_j = !field.compose_j;
  Field t1 = covariant_derivative(ks, kind, u, jfield, h, richardson);
  Field t2 = covariant_derivative(ks, kind, u, field, h, richardson);
  Field jt2 = apply_J_impl(ks.ambient, ks.base, ks.frame, t2, ks.slot_sign);
  return scaled_sum(t1, 1.0, jt2, -1.0);
}

Field torsion(const KnotSpace& ks, ConnectionKind kind, const FieldScheme& a,
              const FieldScheme& b, double h, bool richardson) {
  Field seed_a = value_with_frame(ks, a, ks.base, ks.frame);
  Field seed_b = value_with_frame(ks, b, ks.base, ks.frame);
  Field da_b = covariant_derivative(ks, kind, seed_a, b, h, richardson);
  Field db_a = covariant_derivative(ks, kind, seed_b, a, h, richardson);
  Field br = lie_bracket(ks, a, b, h, richardson);
  Field out = scaled_sum(da_b, 1.0, db_a, -1.0);
  return scaled_sum(out, 1.0, br, -1.0);
}

double metric_compatibility_defect(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                                   const FieldScheme& b, const FieldScheme& c, double h,
                                   bool richardson) {
  require(h > 0.0, "metric_compatibility_defect needs h > 0");
  check_field(ks, u, "metric_compatibility_defect");
  auto scalar_derivative = [&](double hh) {
    DiscreteImmersion plus = flow(ks, u, +hh);
    DiscreteImmersion minus = flow(ks, u, -hh);
    TangentFrame tfp = tangent_frame(plus), tfm = tangent_frame(minus);
    double ip = l2_inner_at(tfp, value_with_frame(ks, b, plus, tfp),
                            value_with_frame(ks, c, plus, tfp));
    double im = l2_inner_at(tfm, value_with_frame(ks, b, minus, tfm),
                            value_with_frame(ks, c, minus, tfm));
    return (ip - im) / (2.0 * hh);
  };
  double ds = scalar_derivative(h);
  if (richardson) ds = (4.0 * scalar_derivative(h / 2.0) - ds) / 3.0;

  Field base_b = value_with_frame(ks, b, ks.base, ks.frame);
  Field base_c = value_with_frame(ks, c, ks.base, ks.frame);
  Field nabla_b = covariant_derivative(ks, kind, u, b, h, richardson);
  Field nabla_c = covariant_derivative(ks, kind, u, c, h, richardson);
  return ds - l2_inner(ks, nabla_b, base_c) - l2_inner(ks, base_b, nabla_c);
}

double d_omega2_defect(const KnotSpace& ks, const FieldScheme& u, const FieldScheme& v,
                       const FieldScheme& w, double h, bool richardson) {
  require(h > 0.0, "d_omega2_defect needs h > 0");
  const FieldScheme* schemes[3] = {&u, &v, &w};
  Field base_vals[3];
  for (int i = 0; i < 3; ++i) base_vals[i] = value_with_frame(ks, *schemes[i], ks.base, ks.frame);

  // omega2 evaluated at a flowed immersion, with both fields extended there.
  auto omega_at = [&](const DiscreteImmersion& imm, const FieldScheme& fa,
                      const FieldScheme& fb) {
    TangentFrame tf = tangent_frame(imm);
    Field a = value_with_frame(ks, fa, imm, tf);
    Field bb = value_with_frame(ks, fb, imm, tf);
    Field ja = apply_J_impl(ks.ambient, imm, tf, a, ks.slot_sign);
    return l2_inner_at(tf, ja, bb);
  };
  auto directional = [&](int i, int j, int k) {
    auto at = [&](double hh) {
      DiscreteImmersion plus = flow(ks, base_vals[i], +hh);
      DiscreteImmersion minus = flow(ks, base_vals[i], -hh);
      return (omega_at(plus, *schemes[j], *schemes[k]) -
              omega_at(minus, *schemes[j], *schemes[k])) /
             (2.0 * hh);
    };
    double val = at(h);
    if (richardson) val = (4.0 * at(h / 2.0) - val) / 3.0;
    return val;
  };

  Field br01 = lie_bracket(ks, u, v, h, richardson);
  Field br02 = lie_bracket(ks, u, w, h, richardson);
  Field br12 = lie_bracket(ks, v, w, h, richardson);

  return directional(0, 1, 2) - directional(1, 0, 2) + directional(2, 0, 1) -
         omega2(ks, br01, base_vals[2]) + omega2(ks, br02, base_vals[1]) -
         omega2(ks, br12, base_vals[0]);
}

Field nabla_J_closed_form(const KnotSpace& ks, ConnectionKind kind, const Field& u,
                          const Field& v) {
  check_field(ks, u, "nabla_J_closed_form");
  check_field(ks, v, "nabla_J_closed_form");
  Field out = normal_project(ks.frame, s_term(ks, u, v));
  if (kind == ConnectionKind::LeviCivita) {
    Field jv = apply_J_impl(ks.ambient, ks.base, ks.frame, v, ks.slot_sign);
    Field corr = b_tensor(ks, u, jv);
    Field jbuv = apply_J_impl(ks.ambient, ks.base, ks.frame,
                              normal_project(ks.frame, b_tensor(ks, u, v)), ks.slot_sign);
    corr = scaled_sum(corr, 1.0, jbuv, -1.0);
    out = scaled_sum(out, 1.0, normal_project(ks.frame, corr), -0.5);
  }
  return out;
}

Field nijenhuis_closed_form(const KnotSpace& ks, const Field& u_raw, const Field& v_raw) {
  const int d = intrinsic_dim(ks), m = ks.ambient.m;
  Field u = project_normal(ks, u_raw);
  Field v = project_normal(ks, v_raw);

  std::array<std::array<Field, kMaxIntrinsic>, kMaxIntrinsic> ii;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ii[i][j] = second_fundamental_form(ks.base, ks.frame, i, j);

  // kJ_i(w) = P sum_j chi(f_1, .., II_{ij} at slot j, .., w) + J((nabla_{f_i} w)^perp):
  // the first variation of J w along the frame direction f_i.
  auto kj_list = [&](const Field& w) {
    std::vector<Field> list;
    std::array<const double*, kMaxIntrinsic> frames{};
    std::array<double, kMaxDim> val{};
    for (int i = 0; i < d; ++i) {
      Field acc(ks.base.grid.total(), m);
      for (int j = 0; j < d; ++j) {
        for (std::size_t s = 0; s < acc.samples(); ++s) {
          for (int t = 0; t < d; ++t) frames[t] = ks.frame.frame(s, t);
          frames[j] = ii[i][j].at(s);
          contract_frames(ks.ambient, ks.slot_sign, ks.base.points.at(s), frames.data(), d,
                          w.at(s), val.data());
          axpy(1.0, val.data(), acc.at(s), m);
        }
      }
      acc = normal_project(ks.frame, acc);
      Field dw = normal_project(ks.frame, frame_derivative(ks.frame, w, i));
      Field jdw = apply_J_impl(ks.ambient, ks.base, ks.frame, dw, ks.slot_sign);
      list.push_back(scaled_sum(acc, 1.0, jdw, 1.0));
    }
    return list;
  };

  auto s_from_list = [&](const std::vector<Field>& klist, const Field& v2) {
    Field out(ks.base.grid.total(), m);
    std::array<const double*, kMaxIntrinsic> frames{};
    std::array<double, kMaxDim> val{};
    for (int i = 0; i < d; ++i)
      for (std::size_t s = 0; s < out.samples(); ++s) {
        for (int t = 0; t < d; ++t) frames[t] = ks.frame.frame(s, t);
        frames[i] = klist[i].at(s);
        contract_frames(ks.ambient, ks.slot_sign, ks.base.points.at(s), frames.data(), d,
                        v2.at(s), val.data());
        axpy(1.0, val.data(), out.at(s), m);
      }
    return out;
  };

  auto project = [&](const Field& f) { return normal_project(ks.frame, f); };
  auto apply_j = [&](const Field& f) {
    return apply_J_impl(ks.ambient, ks.base, ks.frame, f, ks.slot_sign);
  };

  Field half = project(s_from_list(kj_list(u), v));
  half = scaled_sum(half, 1.0, project(s_from_list(kj_list(v), u)), -1.0);
  half = scaled_sum(half, 1.0, apply_j(project(s_term(ks, u, v))), -1.0);
  half = scaled_sum(half, 1.0, apply_j(project(s_term(ks, v, u))), 1.0);
  for (double& x : half.data) x *= 2.0;
  return half;
}

}  // namespace knotgeo
