#include "knotgeo/vcp.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace knotgeo {
namespace {

// Octonion multiplication table over the basis 1, e1..e7 with the seven
// cyclically positive unit triples below. table[i][j] = (k, sign) means
// e_i * e_j = sign * e_k (indices 0..7, e_0 = 1).
struct OctTable {
  int idx[8][8];
  double sgn[8][8];
};

const OctTable& octonion_table() {
  static const OctTable table = [] {
    OctTable t{};
    constexpr int triples[7][3] = {{1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6},
                                   {2, 5, 7}, {3, 4, 7}, {3, 6, 5}};
    for (int i = 0; i < 8; ++i) {
      t.idx[0][i] = i; t.sgn[0][i] = 1.0;
      t.idx[i][0] = i; t.sgn[i][0] = 1.0;
    }
    for (int i = 1; i < 8; ++i) {
      t.idx[i][i] = 0; t.sgn[i][i] = -1.0;
    }
    for (const auto& tr : triples) {
      const int cyc[3][3] = {{tr[0], tr[1], tr[2]}, {tr[1], tr[2], tr[0]}, {tr[2], tr[0], tr[1]}};
      for (const auto& c : cyc) {
        t.idx[c[0]][c[1]] = c[2]; t.sgn[c[0]][c[1]] = 1.0;
        t.idx[c[1]][c[0]] = c[2]; t.sgn[c[1]][c[0]] = -1.0;
      }
    }
    return t;
  }();
  return table;
}

using Oct = std::array<double, 8>;

Oct omul(const Oct& x, const Oct& y) {
  const OctTable& t = octonion_table();
  Oct out{};
  for (int i = 0; i < 8; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < 8; ++j) {
      if (y[j] == 0.0) continue;
      out[t.idx[i][j]] += t.sgn[i][j] * x[i] * y[j];
    }
  }
  return out;
}

Oct oconj(const Oct& x) {
  Oct out{};
  out[0] = x[0];
  for (int i = 1; i < 8; ++i) out[i] = -x[i];
  return out;
}

std::size_t dense_size(int m, int r) {
  std::size_t s = m;
  for (int t = 0; t < r; ++t) s *= m;
  return s;
}

std::size_t dense_offset(int m, int r, int k, const int* lower) {
  std::size_t off = k;
  for (int t = 0; t < r; ++t) off = off * m + lower[t];
  return off;
}

void build_kaehler(LinearVcp& vcp) {
  // J e_{2t} = e_{2t+1}, J e_{2t+1} = -e_{2t}.
  for (int t = 0; t * 2 + 1 < vcp.m; ++t) {
    int a = 2 * t, b = 2 * t + 1;
    vcp.dense[dense_offset(vcp.m, 1, b, &a)] = 1.0;
    vcp.dense[dense_offset(vcp.m, 1, a, &b)] = -1.0;
  }
}

int permutation_sign(int* p, int n) {
  int s = 1;
  for (int i = 0; i < n; ++i) {
    while (p[i] != i) {
      std::swap(p[i], p[p[i]]);
      s = -s;
    }
  }
  return s;
}

void build_volume_form(LinearVcp& vcp) {
  // chi[k][i1..i_{m-1}] = sign of the permutation (i1, ..., i_{m-1}, k).
  const int m = vcp.m;
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end());
  do {
    std::vector<int> copy = perm;
    int s = permutation_sign(copy.data(), m);
    vcp.dense[dense_offset(m, m - 1, perm[m - 1], perm.data())] = s;
  } while (std::next_permutation(perm.begin(), perm.end()));
}

void build_g2(LinearVcp& vcp) {
  // chi(e_i, e_j) = imaginary part of the octonion product e_{i+1} e_{j+1}.
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      Oct x{}, y{};
      x[i + 1] = 1.0;
      y[j + 1] = 1.0;
      Oct p = omul(x, y);
      for (int k = 0; k < 7; ++k) {
        int lower[2] = {i, j};
        vcp.dense[dense_offset(7, 2, k, lower)] = p[k + 1];
      }
    }
  }
}

void build_spin7(LinearVcp& vcp) {
  // chi(x, y, z) = (x (conj(y) z) - z (conj(y) x)) / 2 on the full octonions.
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      for (int l = 0; l < 8; ++l) {
        Oct x{}, y{}, z{};
        x[i] = 1.0; y[j] = 1.0; z[l] = 1.0;
        Oct a = omul(x, omul(oconj(y), z));
        Oct b = omul(z, omul(oconj(y), x));
        for (int k = 0; k < 8; ++k) {
          int lower[3] = {i, j, l};
          vcp.dense[dense_offset(8, 3, k, lower)] = 0.5 * (a[k] - b[k]);
        }
      }
    }
  }
}

void build_entries(LinearVcp& vcp) {
  const int m = vcp.m, r = vcp.r;
  vcp.entries.clear();
  std::array<int, 4> tuple{};
  // Iterate strictly increasing r-tuples.
  for (int t = 0; t < r; ++t) tuple[t] = t;
  if (r > m) return;
  while (true) {
    for (int k = 0; k < m; ++k) {
      double c = vcp.dense[dense_offset(m, r, k, tuple.data())];
      if (c != 0.0) vcp.entries.push_back(ChiEntry{k, tuple, c});
    }
    int t = r - 1;
    while (t >= 0 && tuple[t] == m - r + t) --t;
    if (t < 0) break;
    ++tuple[t];
    for (int s = t + 1; s < r; ++s) tuple[s] = tuple[s - 1] + 1;
  }
}

}  // namespace

std::string to_string(VcpKind kind) {
  switch (kind) {
    case VcpKind::Kaehler: return "kaehler";
    case VcpKind::VolumeForm: return "volume";
    case VcpKind::G2: return "g2";
    case VcpKind::Spin7: return "spin7";
  }
  return "?";
}

double LinearVcp::chi_coeff(int k, const int* lower) const {
  return dense[dense_offset(m, r, k, lower)];
}

LinearVcp make_vcp(VcpKind kind, int m) {
  LinearVcp vcp;
  vcp.kind = kind;
  vcp.m = m;
  switch (kind) {
    case VcpKind::Kaehler:
      if (m < 2 || m > kMaxDim || m % 2 != 0)
        throw Error("kaehler kind requires even m in [2, 8], got m=" + std::to_string(m));
      vcp.r = 1;
      break;
    case VcpKind::VolumeForm:
      if (m < 3 || m > 5)
        throw Error("volume-form kind supports m in {3, 4, 5}, got m=" + std::to_string(m));
      vcp.r = m - 1;
      break;
    case VcpKind::G2:
      if (m != 7) throw Error("g2 kind requires m=7, got m=" + std::to_string(m));
      vcp.r = 2;
      break;
    case VcpKind::Spin7:
      if (m != 8) throw Error("spin7 kind requires m=8, got m=" + std::to_string(m));
      vcp.r = 3;
      break;
  }
  vcp.dense.assign(dense_size(vcp.m, vcp.r), 0.0);
  switch (kind) {
    case VcpKind::Kaehler: build_kaehler(vcp); break;
    case VcpKind::VolumeForm: build_volume_form(vcp); break;
    case VcpKind::G2: build_g2(vcp); break;
    case VcpKind::Spin7: build_spin7(vcp); break;
  }
  build_entries(vcp);
  return vcp;
}

void rebuild_entry_table(LinearVcp& vcp) { build_entries(vcp); }

void evaluate_chi(const LinearVcp& vcp, const double* const* args, double* out) {
  const int m = vcp.m, r = vcp.r;
  for (int c = 0; c < m; ++c) out[c] = 0.0;
  std::array<double, 16> minor{};
  for (const ChiEntry& e : vcp.entries) {
    for (int row = 0; row < r; ++row)
      for (int col = 0; col < r; ++col) minor[row * r + col] = args[row][e.idx[col]];
    out[e.out] += e.coeff * small_det(minor.data(), r);
  }
}

double vcp_form(const LinearVcp& vcp, const double* const* args) {
  std::array<double, kMaxDim> chi_val{};
  evaluate_chi(vcp, args, chi_val.data());
  return dot(chi_val.data(), args[vcp.r], vcp.m);
}

double OrientedPlaneElement::orthonormality_defect() const {
  double worst = 0.0;
  for (int i = 0; i < q(); ++i)
    for (int j = 0; j < q(); ++j) {
      double g = dot(frame[i].data(), frame[j].data(), m);
      worst = std::max(worst, std::fabs(g - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

void reorthonormalize(OrientedPlaneElement& plane) {
  for (int i = 0; i < plane.q(); ++i) {
    double* v = plane.frame[i].data();
    for (int j = 0; j < i; ++j)
      axpy(-dot(plane.frame[j].data(), v, plane.m), plane.frame[j].data(), v, plane.m);
    double n = std::sqrt(norm2(v, plane.m));
    if (n == 0.0) throw Error("degenerate frame vector " + std::to_string(i));
    scale(1.0 / n, v, plane.m);
  }
}

void induced_complex_structure(const LinearVcp& vcp, const OrientedPlaneElement& plane,
                               const double* xi, double* out, double normal_tol) {
  if (plane.m != vcp.m)
    throw Error("plane dimension " + std::to_string(plane.m) + " != ambient " + std::to_string(vcp.m));
  if (plane.q() != vcp.r - 1)
    throw Error("induced complex structure needs a plane with r-1=" + std::to_string(vcp.r - 1) +
                " frame vectors, got " + std::to_string(plane.q()));
  if (plane.orthonormality_defect() > 1e-10)
    throw Error("plane frame is not orthonormal within 1e-10");
  for (int i = 0; i < plane.q(); ++i)
    if (std::fabs(dot(plane.frame[i].data(), xi, vcp.m)) > normal_tol)
      throw Error("argument is not normal to the plane within tolerance");
  std::array<const double*, 4> args{};
  for (int i = 0; i < plane.q(); ++i) args[i] = plane.frame[i].data();
  args[plane.q()] = xi;
  evaluate_chi(vcp, args.data(), out);
}

AxiomReport verify_vcp_axioms(const LinearVcp& vcp, int trials, std::uint64_t seed) {
  const int m = vcp.m, r = vcp.r;
  AxiomReport rep;

  auto check_tuple = [&](const double* const* args) {
    std::array<double, kMaxDim> val{};
    evaluate_chi(vcp, args, val.data());
    for (int t = 0; t < r; ++t)
      rep.max_orthogonality =
          std::max(rep.max_orthogonality, std::fabs(dot(val.data(), args[t], m)));
    double g = gram_det(args, r, m);
    rep.max_norm = std::max(rep.max_norm, std::fabs(norm2(val.data(), m) - g));
  };

  // Exhaustive basis tuples (m^r is at most 5^4 = 625 for the supported kinds).
  std::vector<int> tuple(r, 0);
  std::vector<std::array<double, kMaxDim>> basis_args(r);
  std::array<const double*, 4> ptrs{};
  while (true) {
    for (int t = 0; t < r; ++t) {
      basis_args[t].fill(0.0);
      basis_args[t][tuple[t]] = 1.0;
      ptrs[t] = basis_args[t].data();
    }
    check_tuple(ptrs.data());
    int t = r - 1;
    while (t >= 0 && tuple[t] == m - 1) { tuple[t] = 0; --t; }
    if (t < 0) break;
    ++tuple[t];
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::array<double, kMaxDim>> rand_args(r);
  for (int trial = 0; trial < trials; ++trial) {
    for (int t = 0; t < r; ++t) {
      rand_args[t].fill(0.0);
      for (int c = 0; c < m; ++c) rand_args[t][c] = gauss(rng);
      // Both axioms are scale-covariant; unit-norm arguments keep the
      // residual at rounding scale instead of amplifying it by the norms.
      double n = std::sqrt(norm2(rand_args[t].data(), m));
      if (n > 0.0) scale(1.0 / n, rand_args[t].data(), m);
      ptrs[t] = rand_args[t].data();
    }
    check_tuple(ptrs.data());
  }
  return rep;
}

LinearVcp corrupted_copy(const LinearVcp& vcp) {
  LinearVcp bad = vcp;
  if (bad.entries.empty()) throw Error("cannot corrupt an empty tensor");
  ChiEntry& e = bad.entries.front();
  e.coeff = -e.coeff;
  bad.dense[dense_offset(bad.m, bad.r, e.out, e.idx.data())] = e.coeff;
  return bad;
}

std::string chi_to_json(const LinearVcp& vcp) {
  std::ostringstream os;
  os << "{\"kind\":\"" << to_string(vcp.kind) << "\",\"m\":" << vcp.m << ",\"r\":" << vcp.r
     << ",\"entries\":[";
  for (std::size_t i = 0; i < vcp.entries.size(); ++i) {
    const ChiEntry& e = vcp.entries[i];
    if (i) os << ",";
    os << "[[" << e.out << "],[";
    for (int t = 0; t < vcp.r; ++t) os << (t ? "," : "") << e.idx[t];
    os << "]," << e.coeff << "]";
  }
  os << "]}";
  return os.str();
}

}  // namespace knotgeo
