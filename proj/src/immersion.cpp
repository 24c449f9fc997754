#include "knotgeo/immersion.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace knotgeo {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step: decorrelates (seed, salt) streams.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double ParamGrid::spacing(int axis) const {
  require(axis >= 0 && axis < d, "grid axis out of range");
  return kTau / sizes[axis];
}

double ParamGrid::cell() const {
  double c = 1.0;
  for (int a = 0; a < d; ++a) c *= spacing(a);
  return c;
}

std::size_t ParamGrid::flat(const int* idx) const {
  std::size_t s = 0;
  for (int a = 0; a < d; ++a) {
    int n = sizes[a];
    int w = ((idx[a] % n) + n) % n;
    s = s * static_cast<std::size_t>(n) + static_cast<std::size_t>(w);
  }
  return s;
}

void ParamGrid::unflatten(std::size_t s, int* idx) const {
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(s % static_cast<std::size_t>(sizes[a]));
    s /= static_cast<std::size_t>(sizes[a]);
  }
}

std::size_t ParamGrid::neighbor(std::size_t s, int axis, int delta) const {
  int idx[kMaxIntrinsic] = {0, 0};
  unflatten(s, idx);
  idx[axis] += delta;
  return flat(idx);
}

ParamGrid make_grid(const std::vector<int>& sizes) {
  ParamGrid g;
  require(sizes.size() <= kMaxIntrinsic, "grid supports at most 2 directions");
  g.d = static_cast<int>(sizes.size());
  for (int a = 0; a < g.d; ++a) {
    require(sizes[a] >= 8, "grid direction needs at least 8 samples for the 5-point stencils");
    g.sizes[a] = sizes[a];
  }
  return g;
}

Field grid_derivative(const ParamGrid& grid, const Field& f, int axis) {
  require(axis >= 0 && axis < grid.d, "derivative axis out of range");
  require(f.samples() == grid.total(), "field/grid size mismatch");
  const int m = f.m;
  const double inv = 1.0 / (12.0 * grid.spacing(axis));
  Field out(f.samples(), m);
  for (std::size_t s = 0; s < f.samples(); ++s) {
    const double* p1 = f.at(grid.neighbor(s, axis, +1));
    const double* p2 = f.at(grid.neighbor(s, axis, +2));
    const double* m1 = f.at(grid.neighbor(s, axis, -1));
    const double* m2 = f.at(grid.neighbor(s, axis, -2));
    double* o = out.at(s);
    for (int c = 0; c < m; ++c) o[c] = (-p2[c] + 8.0 * p1[c] - 8.0 * m1[c] + m2[c]) * inv;
  }
  return out;
}

Field grid_second_derivative(const ParamGrid& grid, const Field& f, int a, int b) {
  if (a != b) return grid_derivative(grid, grid_derivative(grid, f, a), b);
  require(a >= 0 && a < grid.d, "derivative axis out of range");
  require(f.samples() == grid.total(), "field/grid size mismatch");
  const int m = f.m;
  const double h = grid.spacing(a);
  const double inv = 1.0 / (12.0 * h * h);
  Field out(f.samples(), m);
  for (std::size_t s = 0; s < f.samples(); ++s) {
    const double* p1 = f.at(grid.neighbor(s, a, +1));
    const double* p2 = f.at(grid.neighbor(s, a, +2));
    const double* m1 = f.at(grid.neighbor(s, a, -1));
    const double* m2 = f.at(grid.neighbor(s, a, -2));
    const double* mid = f.at(s);
    double* o = out.at(s);
    for (int c = 0; c < m; ++c)
      o[c] = (-p2[c] + 16.0 * p1[c] - 30.0 * mid[c] + 16.0 * m1[c] - m2[c]) * inv;
  }
  return out;
}

TangentFrame tangent_frame(const DiscreteImmersion& imm) {
  const ParamGrid& grid = imm.grid;
  const int d = grid.d, m = imm.m;
  require(imm.points.samples() == grid.total(), "immersion points/grid size mismatch");

  TangentFrame tf;
  tf.grid = grid;
  tf.m = m;
  const std::size_t n = grid.total();
  tf.vol.assign(n, 1.0);
  if (d == 0) return tf;

  for (int a = 0; a < d; ++a) {
    tf.raw_jacobian[a] = grid_derivative(grid, imm.points, a);
    tf.frames[a] = Field(n, m);
  }
  tf.rinv.assign(n * d * d, 0.0);

  for (std::size_t s = 0; s < n; ++s) {
    // Modified Gram-Schmidt with positive diagonal: J = F R.
    double r[kMaxIntrinsic][kMaxIntrinsic] = {};
    for (int a = 0; a < d; ++a) {
      double* fa = tf.frames[a].at(s);
      const double* ja = tf.raw_jacobian[a].at(s);
      for (int c = 0; c < m; ++c) fa[c] = ja[c];
      for (int i = 0; i < a; ++i) {
        r[i][a] = dot(tf.frames[i].at(s), fa, m);
        axpy(-r[i][a], tf.frames[i].at(s), fa, m);
      }
      r[a][a] = std::sqrt(norm2(fa, m));
      if (r[a][a] <= 1e-8)
        throw Error("immersion condition violated at sample " + std::to_string(s) +
                    ": smallest singular value <= 1e-8");
      scale(1.0 / r[a][a], fa, m);
    }

    // Smallest singular value of the Jacobian = sqrt(min eigenvalue of Gram).
    if (d == 2) {
      double g00 = r[0][0] * r[0][0];
      double g01 = r[0][0] * r[0][1];
      double g11 = r[0][1] * r[0][1] + r[1][1] * r[1][1];
      double tr = g00 + g11, det = g00 * g11 - g01 * g01;
      double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
      double lo = tr / 2.0 - disc;
      if (!(lo > 1e-16))
        throw Error("immersion condition violated at sample " + std::to_string(s) +
                    ": smallest singular value <= 1e-8");
    }

    // Invert the upper-triangular R (d <= 2).
    double* ri = tf.rinv.data() + s * d * d;
    if (d == 1) {
      ri[0] = 1.0 / r[0][0];
      tf.vol[s] = r[0][0];
    } else {
      ri[0 * d + 0] = 1.0 / r[0][0];
      ri[1 * d + 1] = 1.0 / r[1][1];
      ri[0 * d + 1] = -r[0][1] / (r[0][0] * r[1][1]);
      tf.vol[s] = r[0][0] * r[1][1];
    }
  }
  return tf;
}

Field normal_project(const TangentFrame& frame, const Field& ambient_field) {
  require(ambient_field.samples() == frame.grid.total() && ambient_field.m == frame.m,
          "normal_project shape mismatch");
  Field out = ambient_field;
  for (std::size_t s = 0; s < out.samples(); ++s) {
    double* v = out.at(s);
    for (int i = 0; i < frame.d(); ++i) {
      const double* fi = frame.frame(s, i);
      axpy(-dot(v, fi, frame.m), fi, v, frame.m);
    }
  }
  return out;
}

std::vector<double> induced_volume(const DiscreteImmersion& imm) {
  return tangent_frame(imm).vol;
}

double total_volume(const DiscreteImmersion& imm) {
  std::vector<double> vol = induced_volume(imm);
  return stable_sum(std::move(vol)) * imm.grid.cell();
}

Field mean_curvature(const DiscreteImmersion& imm) {
  const int d = imm.grid.d, m = imm.m;
  require(d >= 1, "mean_curvature needs intrinsic dimension >= 1");
  TangentFrame tf = tangent_frame(imm);
  const std::size_t n = imm.grid.total();

  std::array<std::array<Field, kMaxIntrinsic>, kMaxIntrinsic> dd;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) dd[a][b] = grid_second_derivative(imm.grid, imm.points, a, b);

  Field h(n, m);
  for (std::size_t s = 0; s < n; ++s) {
    double* out = h.at(s);
    // H = (1/d) sum_i II(f_i, f_i), II(f_i, f_j) = sum_ab rinv[a][i] rinv[b][j]
    // (d^2 x / dtheta_a dtheta_b)^perp.
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          double w = tf.rinv_at(s, a, i) * tf.rinv_at(s, b, i);
          if (w == 0.0) continue;
          const double* second = dd[std::min(a, b)][std::max(a, b)].at(s);
          axpy(w, second, out, m);
        }
    for (int c = 0; c < m; ++c) out[c] /= d;
  }
  return normal_project(tf, h);
}

Field gradient_field_W(const DiscreteImmersion& imm) {
  if (imm.grid.d == 0) return Field(1, imm.m);
  Field w = mean_curvature(imm);
  for (double& v : w.data) v *= -imm.grid.d;
  return w;
}

Field shift_field(const ParamGrid& grid, const Field& f, const std::vector<int>& shift) {
  require(static_cast<int>(shift.size()) == grid.d, "shift needs one offset per direction");
  require(f.samples() == grid.total(), "field/grid size mismatch");
  Field out(f.samples(), f.m);
  int idx[kMaxIntrinsic] = {0, 0};
  for (std::size_t s = 0; s < f.samples(); ++s) {
    grid.unflatten(s, idx);
    for (int a = 0; a < grid.d; ++a) idx[a] += shift[a];
    const double* src = f.at(grid.flat(idx));
    double* dst = out.at(s);
    for (int c = 0; c < f.m; ++c) dst[c] = src[c];
  }
  return out;
}

DiscreteImmersion reparametrize(const DiscreteImmersion& imm, const std::vector<int>& shift) {
  DiscreteImmersion out = imm;
  out.points = shift_field(imm.grid, imm.points, shift);
  return out;
}

Field frame_derivative(const TangentFrame& tf, const Field& f, int i) {
  const int d = tf.grid.d;
  require(i >= 0 && i < d, "frame index out of range");
  Field out(tf.grid.total(), f.m);
  for (int a = 0; a < d; ++a) {
    Field da = grid_derivative(tf.grid, f, a);
    for (std::size_t s = 0; s < out.samples(); ++s)
      axpy(tf.rinv_at(s, a, i), da.at(s), out.at(s), f.m);
  }
  return out;
}

Field second_fundamental_form(const DiscreteImmersion& imm, const TangentFrame& tf, int i,
                              int j) {
  const int d = imm.grid.d, m = imm.m;
  require(i >= 0 && i < d && j >= 0 && j < d, "frame index out of range");
  std::array<std::array<Field, kMaxIntrinsic>, kMaxIntrinsic> dd;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) dd[a][b] = grid_second_derivative(imm.grid, imm.points, a, b);
  Field out(imm.grid.total(), m);
  for (std::size_t s = 0; s < out.samples(); ++s)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double w = tf.rinv_at(s, a, i) * tf.rinv_at(s, b, j);
        if (w != 0.0) axpy(w, dd[std::min(a, b)][std::max(a, b)].at(s), out.at(s), m);
      }
  return normal_project(tf, out);
}

DiscreteImmersion make_circle(int m, double radius, int samples) {
  require(m >= 2, "circle needs ambient dimension >= 2");
  require(radius > 0.0, "circle radius must be positive");
  DiscreteImmersion imm;
  imm.grid = make_grid({samples});
  imm.m = m;
  imm.points = Field(imm.grid.total(), m);
  for (int i = 0; i < samples; ++i) {
    double t = kTau * i / samples;
    double* p = imm.points.at(i);
    p[0] = radius * std::cos(t);
    p[1] = radius * std::sin(t);
  }
  return imm;
}

DiscreteImmersion make_trefoil_loop(int m, int samples) {
  require(m >= 3, "trefoil loop needs ambient dimension >= 3");
  DiscreteImmersion imm;
  imm.grid = make_grid({samples});
  imm.m = m;
  imm.points = Field(imm.grid.total(), m);
  for (int i = 0; i < samples; ++i) {
    double t = kTau * i / samples;
    double* p = imm.points.at(i);
    p[0] = (2.0 + std::cos(3.0 * t)) * std::cos(2.0 * t);
    p[1] = (2.0 + std::cos(3.0 * t)) * std::sin(2.0 * t);
    p[2] = std::sin(3.0 * t);
  }
  return imm;
}

DiscreteImmersion make_flat_torus(int m, double r1, double r2, int n1, int n2) {
  require(m >= 4, "flat torus needs ambient dimension >= 4");
  require(r1 > 0.0 && r2 > 0.0, "torus radii must be positive");
  DiscreteImmersion imm;
  imm.grid = make_grid({n1, n2});
  imm.m = m;
  imm.points = Field(imm.grid.total(), m);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      double a = kTau * i / n1, b = kTau * j / n2;
      int idx[2] = {i, j};
      double* p = imm.points.at(imm.grid.flat(idx));
      p[0] = r1 * std::cos(a);
      p[1] = r1 * std::sin(a);
      p[2] = r2 * std::cos(b);
      p[3] = r2 * std::sin(b);
    }
  return imm;
}

DiscreteImmersion make_point(int m) {
  DiscreteImmersion imm;
  imm.grid = ParamGrid{};
  imm.m = m;
  imm.points = Field(1, m);
  return imm;
}

Field band_limited_field(const ParamGrid& grid, int m, std::uint64_t seed, double amplitude,
                         int kmax) {
  require(kmax >= 0, "band limit must be nonnegative");
  const std::size_t n = grid.total();
  Field out(n, m);
  const double norm = amplitude / (kmax + 1);
  int idx[kMaxIntrinsic] = {0, 0};

  if (grid.d == 0) {
    std::mt19937_64 rng(mix_seed(seed, 0));
    std::normal_distribution<double> gauss;
    for (int c = 0; c < m; ++c) out.at(0)[c] = amplitude * gauss(rng);
    return out;
  }

  if (grid.d == 1) {
    for (int k = 0; k <= kmax; ++k) {
      std::mt19937_64 rng(mix_seed(seed, k));
      std::normal_distribution<double> gauss;
      double a[kMaxDim], b[kMaxDim];
      for (int c = 0; c < m; ++c) a[c] = gauss(rng);
      for (int c = 0; c < m; ++c) b[c] = gauss(rng);
      for (std::size_t s = 0; s < n; ++s) {
        grid.unflatten(s, idx);
        double t = k * kTau * idx[0] / grid.sizes[0];
        double ct = std::cos(t), st = std::sin(t);
        double* o = out.at(s);
        for (int c = 0; c < m; ++c) o[c] += norm * (ct * a[c] + st * b[c]);
      }
    }
    return out;
  }

  for (int k1 = 0; k1 <= kmax; ++k1)
    for (int k2 = 0; k2 <= kmax; ++k2) {
      std::mt19937_64 rng(mix_seed(seed, (k1 + 1) * 131 + k2));
      std::normal_distribution<double> gauss;
      double a[kMaxDim], b[kMaxDim], c2[kMaxDim], e[kMaxDim];
      for (int c = 0; c < m; ++c) a[c] = gauss(rng);
      for (int c = 0; c < m; ++c) b[c] = gauss(rng);
      for (int c = 0; c < m; ++c) c2[c] = gauss(rng);
      for (int c = 0; c < m; ++c) e[c] = gauss(rng);
      for (std::size_t s = 0; s < n; ++s) {
        grid.unflatten(s, idx);
        double t1 = k1 * kTau * idx[0] / grid.sizes[0];
        double t2 = k2 * kTau * idx[1] / grid.sizes[1];
        double* o = out.at(s);
        double cp = std::cos(t1 + t2), sp = std::sin(t1 + t2);
        double cm = std::cos(t1 - t2), sm = std::sin(t1 - t2);
        for (int c = 0; c < m; ++c)
          o[c] += norm * (cp * a[c] + sp * b[c] + cm * c2[c] + sm * e[c]);
      }
    }
  return out;
}

DiscreteImmersion perturb_immersion(const DiscreteImmersion& imm, std::uint64_t seed,
                                    double amplitude, int kmax) {
  Field bump = band_limited_field(imm.grid, imm.m, seed, amplitude, kmax);
  DiscreteImmersion out = imm;
  for (std::size_t i = 0; i < out.points.data.size(); ++i) out.points.data[i] += bump.data[i];
  return out;
}

DiscreteImmersion immersion_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("grid") || !j["grid"].contains("sizes") || !j.contains("points"))
    throw Error("custom immersion JSON needs grid.sizes and points");
  std::vector<int> sizes = j["grid"]["sizes"].get<std::vector<int>>();
  DiscreteImmersion imm;
  imm.grid = make_grid(sizes);
  const auto& pts = j["points"];
  if (pts.empty() || !pts.is_array()) throw Error("custom immersion JSON: points must be a nonempty array");
  if (pts.size() != imm.grid.total())
    throw Error("custom immersion JSON: points count " + std::to_string(pts.size()) +
                " != grid total " + std::to_string(imm.grid.total()));
  imm.m = static_cast<int>(pts.front().size());
  if (imm.m < 2 || imm.m > kMaxDim)
    throw Error("custom immersion JSON: ambient dimension must be in [2, 8]");
  imm.points = Field(imm.grid.total(), imm.m);
  for (std::size_t s = 0; s < pts.size(); ++s) {
    if (static_cast<int>(pts[s].size()) != imm.m)
      throw Error("custom immersion JSON: ragged point rows");
    for (int c = 0; c < imm.m; ++c) imm.points.at(s)[c] = pts[s][c].get<double>();
  }
  return imm;
}

}  // namespace knotgeo
