#include "knotgeo/ambient.hpp"

#include <cmath>
#include <string>

namespace knotgeo {

namespace {

void validate_dim(const AmbientSpace& space, int n, const char* what) {
  if (n != space.m)
    throw Error(std::string(what) + ": dimension " + std::to_string(n) + " != ambient m=" +
                std::to_string(space.m));
}

// out = R * v with R row-major m*m.
void mat_vec(const double* rot, const double* v, int m, double* out) {
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += rot[i * m + j] * v[j];
    out[i] = acc;
  }
}

// out = R^T * v.
void mat_t_vec(const double* rot, const double* v, int m, double* out) {
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += rot[j * m + i] * v[j];
    out[i] = acc;
  }
}

}  // namespace

AmbientSpace make_euclidean_space(VcpKind kind, int m, double twist_rate) {
  AmbientSpace space;
  space.m = m;
  space.topology = Topology::Euclidean;
  space.base = make_vcp(kind, m);
  space.twist_rate = twist_rate;
  if (twist_rate != 0.0 && m < 3)
    throw Error("twist field needs m >= 3 for the (e2, e3) rotation plane");
  return space;
}

AmbientSpace make_torus_space(VcpKind kind, int m, const std::vector<double>& periods,
                              double twist_rate) {
  AmbientSpace space = make_euclidean_space(kind, m, twist_rate);
  space.topology = Topology::Torus;
  if (static_cast<int>(periods.size()) != m)
    throw Error("torus needs exactly m=" + std::to_string(m) + " periods, got " +
                std::to_string(periods.size()));
  for (int c = 0; c < m; ++c) {
    if (!(periods[c] > 0.0)) throw Error("torus periods must be positive");
    space.periods[c] = periods[c];
  }
  return space;
}

void wrap_point(const AmbientSpace& space, double* p) {
  if (space.topology != Topology::Torus) return;
  for (int c = 0; c < space.m; ++c) {
    double period = space.periods[c];
    p[c] -= period * std::floor(p[c] / period);
  }
}

void unwrap_near(const AmbientSpace& space, const double* ref, double* x) {
  if (space.topology != Topology::Torus) return;
  for (int c = 0; c < space.m; ++c) {
    double period = space.periods[c];
    x[c] -= period * std::round((x[c] - ref[c]) / period);
  }
}

void exp_map(const AmbientSpace& space, const double* p, const double* v, double* out) {
  for (int c = 0; c < space.m; ++c) out[c] = p[c] + v[c];
  wrap_point(space, out);
}

void twist_rotation(const AmbientSpace& space, const double* p, double* rot) {
  const int m = space.m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) rot[i * m + j] = (i == j) ? 1.0 : 0.0;
  if (space.is_parallel()) return;
  const double theta = space.twist_rate * p[0];
  const double c = std::cos(theta), s = std::sin(theta);
  rot[1 * m + 1] = c;
  rot[1 * m + 2] = -s;
  rot[2 * m + 1] = s;
  rot[2 * m + 2] = c;
}

LinearVcp vcp_at(const AmbientSpace& space, const double* p) {
  if (space.is_parallel()) return space.base;

  const int m = space.m, r = space.base.r;
  std::vector<double> rot(static_cast<size_t>(m) * m);
  twist_rotation(space, p, rot.data());

  // chi'(v_1..v_r) = R chi(R^T v_1, ..., R^T v_r) in components means every
  // tensor index contracts with R the same way: apply R along each axis.
  LinearVcp out = space.base;
  std::vector<double> buf(out.dense.size());
  size_t total = out.dense.size();
  for (int axis = 0; axis < r + 1; ++axis) {
    // Strides of a row-major tensor with r+1 axes of extent m.
    size_t stride = 1;
    for (int a = axis + 1; a < r + 1; ++a) stride *= m;
    std::fill(buf.begin(), buf.end(), 0.0);
    for (size_t flat = 0; flat < total; ++flat) {
      double value = out.dense[flat];
      if (value == 0.0) continue;
      int old_idx = static_cast<int>((flat / stride) % m);
      size_t base_flat = flat - old_idx * stride;
      for (int new_idx = 0; new_idx < m; ++new_idx) {
        double w = rot[new_idx * m + old_idx];
        if (w != 0.0) buf[base_flat + new_idx * stride] += w * value;
      }
    }
    out.dense.swap(buf);
  }
  rebuild_entry_table(out);
  return out;
}

void chi_at(const AmbientSpace& space, const double* p, const double* const* args, double* out) {
  if (space.is_parallel()) {
    evaluate_chi(space.base, args, out);
    return;
  }
  const int m = space.m, r = space.base.r;
  std::vector<double> rot(static_cast<size_t>(m) * m);
  twist_rotation(space, p, rot.data());
  std::array<std::array<double, kMaxDim>, 4> back{};
  std::array<const double*, 4> ptrs{};
  for (int t = 0; t < r; ++t) {
    mat_t_vec(rot.data(), args[t], m, back[t].data());
    ptrs[t] = back[t].data();
  }
  std::array<double, kMaxDim> val{};
  evaluate_chi(space.base, ptrs.data(), val.data());
  mat_vec(rot.data(), val.data(), m, out);
}

double form_at(const AmbientSpace& space, const double* p, const double* const* args) {
  std::array<double, kMaxDim> val{};
  chi_at(space, p, args, val.data());
  return dot(val.data(), args[space.base.r], space.m);
}

void ambient_derivative(const AmbientSpace& space, const CurveFn& path, const CurveFn& field,
                        double t, double h, double* out) {
  if (!(h > 0.0)) throw Error("ambient_derivative needs h > 0");
  (void)path;  // flat connection: the path only fixes where samples live
  const int m = space.m;
  std::array<double, kMaxDim> mid{}, plus{}, minus{};
  field(t, mid.data());
  field(t + h, plus.data());
  field(t - h, minus.data());
  validate_dim(space, m, "ambient_derivative");
  unwrap_near(space, mid.data(), plus.data());
  unwrap_near(space, mid.data(), minus.data());
  for (int c = 0; c < m; ++c) out[c] = (plus[c] - minus[c]) / (2.0 * h);
}

}  // namespace knotgeo
